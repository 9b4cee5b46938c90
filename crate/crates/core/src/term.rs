//! Core terms of the type layer.
//!
//! Variables are de Bruijn indices in a single index space shared by cube
//! variables and typed variables, so a lambda is an ordinary `Lam` whether it
//! abstracts over a term or over a cube point; which one it is follows from the
//! type it is checked against. Binder names are display hints only and are
//! ignored by equality, which makes derived `PartialEq` alpha-equivalence.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::rc::Rc;

use crate::tope::{Cube, CubeExpr, Tope};

/// A binder name. All names compare equal.
#[derive(Clone)]
pub struct Name(pub Rc<str>);

impl Name {
    pub fn new(s: &str) -> Self {
        Name(Rc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl PartialEq for Name {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for Name {}

impl Hash for Name {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Var(usize),
    Const(Rc<str>),
    Universe,
    UnitType,
    UnitVal,
    Pi(Name, Rc<Expr>, Rc<Expr>),
    /// Abstraction over a term or over a cube point.
    Lam(Name, Rc<Expr>),
    /// Application to a term or, for extension types, to a cube point.
    App(Rc<Expr>, Rc<Expr>),
    Sigma(Name, Rc<Expr>, Rc<Expr>),
    Pair(Rc<Expr>, Rc<Expr>),
    First(Rc<Expr>),
    Second(Rc<Expr>),
    /// `lhs =_{ty} rhs`
    Id(Rc<Expr>, Rc<Expr>, Rc<Expr>),
    Refl,
    J(Rc<JElim>),
    Ext(Rc<ExtType>),
    /// Tope case split `recOR(phi_1 |-> a_1, ...)`; branches must agree on overlaps.
    Case(Rc<Vec<(Tope, Expr)>>),
    Point0,
    Point1,
    Star,
    Ann(Rc<Expr>, Rc<Expr>),
}

/// `idJ(ty, base, motive, refl_case, target, path)`
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct JElim {
    pub ty: Expr,
    pub base: Expr,
    pub motive: Expr,
    pub refl_case: Expr,
    pub target: Expr,
    pub path: Expr,
}

/// `<(t : cube | shape) -> family [bdry_tope |-> bdry]>`; every field except
/// `cube` lives under the bound cube variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtType {
    pub name: Name,
    pub cube: Cube,
    pub shape: Tope,
    pub family: Expr,
    pub bdry_tope: Tope,
    pub bdry: Expr,
}

impl ExtType {
    /// True when the boundary is empty (`BOT |-> recBOT`).
    pub fn is_unrestricted(&self) -> bool {
        self.bdry_tope == Tope::Bot && matches!(&self.bdry, Expr::Case(bs) if bs.is_empty())
    }
}

/// Reads a term as a cube point, if it has that shape.
pub fn to_cube(e: &Expr) -> Option<CubeExpr> {
    Some(match e {
        Expr::Var(i) => CubeExpr::Var(*i),
        Expr::Point0 => CubeExpr::Zero,
        Expr::Point1 => CubeExpr::One,
        Expr::Star => CubeExpr::Star,
        Expr::Pair(a, b) => CubeExpr::pair(to_cube(a)?, to_cube(b)?),
        Expr::First(a) => CubeExpr::first(to_cube(a)?),
        Expr::Second(a) => CubeExpr::second(to_cube(a)?),
        _ => return None,
    })
}

pub fn from_cube(c: &CubeExpr) -> Expr {
    match c {
        CubeExpr::Var(i) => Expr::Var(*i),
        CubeExpr::Zero => Expr::Point0,
        CubeExpr::One => Expr::Point1,
        CubeExpr::Star => Expr::Star,
        CubeExpr::Pair(a, b) => Expr::pair(from_cube(a), from_cube(b)),
        CubeExpr::First(a) => Expr::first(from_cube(a)),
        CubeExpr::Second(a) => Expr::second(from_cube(a)),
    }
}

fn cube_of_subst(e: Expr) -> CubeExpr {
    to_cube(&e).unwrap_or_else(|| panic!("cube position substituted by a non-point term {e:?}"))
}

impl Expr {
    pub fn app(f: Expr, a: Expr) -> Expr {
        Expr::App(Rc::new(f), Rc::new(a))
    }

    pub fn apps<I: IntoIterator<Item = Expr>>(f: Expr, args: I) -> Expr {
        args.into_iter().fold(f, Expr::app)
    }

    pub fn lam(name: &str, body: Expr) -> Expr {
        Expr::Lam(Name::new(name), Rc::new(body))
    }

    pub fn pi(name: &str, dom: Expr, cod: Expr) -> Expr {
        Expr::Pi(Name::new(name), Rc::new(dom), Rc::new(cod))
    }

    pub fn sigma(name: &str, a: Expr, b: Expr) -> Expr {
        Expr::Sigma(Name::new(name), Rc::new(a), Rc::new(b))
    }

    pub fn pair(a: Expr, b: Expr) -> Expr {
        Expr::Pair(Rc::new(a), Rc::new(b))
    }

    pub fn first(a: Expr) -> Expr {
        Expr::First(Rc::new(a))
    }

    pub fn second(a: Expr) -> Expr {
        Expr::Second(Rc::new(a))
    }

    pub fn id(ty: Expr, a: Expr, b: Expr) -> Expr {
        Expr::Id(Rc::new(ty), Rc::new(a), Rc::new(b))
    }

    pub fn constant(name: &str) -> Expr {
        Expr::Const(Rc::from(name))
    }

    pub fn ann(e: Expr, ty: Expr) -> Expr {
        Expr::Ann(Rc::new(e), Rc::new(ty))
    }

    pub fn case(branches: Vec<(Tope, Expr)>) -> Expr {
        Expr::Case(Rc::new(branches))
    }

    pub fn ext(ext: ExtType) -> Expr {
        Expr::Ext(Rc::new(ext))
    }

    /// Splits `f a1 ... an` into `f` and the arguments.
    pub fn spine(&self) -> (&Expr, Vec<&Expr>) {
        let mut head = self;
        let mut args = vec![];
        while let Expr::App(f, a) = head {
            args.push(&**a);
            head = f;
        }
        args.reverse();
        (head, args)
    }

    /// Rebuilds the term, replacing every variable `Var(i)` occurring under
    /// `depth` additional binders with `f(i, depth)`.
    pub fn map_vars(&self, depth: usize, f: &mut dyn FnMut(usize, usize) -> Expr) -> Expr {
        let rc = |e: &Expr, d: usize, f: &mut dyn FnMut(usize, usize) -> Expr| Rc::new(e.map_vars(d, f));
        match self {
            Expr::Var(i) => f(*i, depth),
            Expr::Const(_)
            | Expr::Universe
            | Expr::UnitType
            | Expr::UnitVal
            | Expr::Refl
            | Expr::Point0
            | Expr::Point1
            | Expr::Star => self.clone(),
            Expr::Pi(n, a, b) => Expr::Pi(n.clone(), rc(a, depth, f), rc(b, depth + 1, f)),
            Expr::Lam(n, b) => Expr::Lam(n.clone(), rc(b, depth + 1, f)),
            Expr::App(a, b) => Expr::App(rc(a, depth, f), rc(b, depth, f)),
            Expr::Sigma(n, a, b) => Expr::Sigma(n.clone(), rc(a, depth, f), rc(b, depth + 1, f)),
            Expr::Pair(a, b) => Expr::Pair(rc(a, depth, f), rc(b, depth, f)),
            Expr::First(a) => Expr::First(rc(a, depth, f)),
            Expr::Second(a) => Expr::Second(rc(a, depth, f)),
            Expr::Id(t, a, b) => Expr::Id(rc(t, depth, f), rc(a, depth, f), rc(b, depth, f)),
            Expr::J(j) => Expr::J(Rc::new(JElim {
                ty: j.ty.map_vars(depth, f),
                base: j.base.map_vars(depth, f),
                motive: j.motive.map_vars(depth, f),
                refl_case: j.refl_case.map_vars(depth, f),
                target: j.target.map_vars(depth, f),
                path: j.path.map_vars(depth, f),
            })),
            Expr::Ext(x) => {
                let d = depth + 1;
                Expr::Ext(Rc::new(ExtType {
                    name: x.name.clone(),
                    cube: x.cube.clone(),
                    shape: x.shape.map_vars(d, &mut |i, d| cube_of_subst(f(i, d))),
                    family: x.family.map_vars(d, f),
                    bdry_tope: x.bdry_tope.map_vars(d, &mut |i, d| cube_of_subst(f(i, d))),
                    bdry: x.bdry.map_vars(d, f),
                }))
            }
            Expr::Case(bs) => Expr::Case(Rc::new(
                bs.iter()
                    .map(|(t, e)| {
                        (t.map_vars(depth, &mut |i, d| cube_of_subst(f(i, d))), e.map_vars(depth, f))
                    })
                    .collect(),
            )),
            Expr::Ann(e, t) => Expr::Ann(rc(e, depth, f), rc(t, depth, f)),
        }
    }

    /// Shifts free variables at or above `cutoff` by `by`.
    pub fn shift_from(&self, by: isize, cutoff: usize) -> Expr {
        if by == 0 {
            return self.clone();
        }
        self.map_vars(cutoff, &mut |i, c| {
            if i >= c {
                Expr::Var((i as isize + by) as usize)
            } else {
                Expr::Var(i)
            }
        })
    }

    pub fn shift(&self, by: isize) -> Expr {
        self.shift_from(by, 0)
    }

    /// Substitutes `v` for the innermost bound variable of a binder body and
    /// lowers the remaining free variables by one.
    pub fn instantiate(&self, v: &Expr) -> Expr {
        self.map_vars(0, &mut |i, d| match i.cmp(&d) {
            std::cmp::Ordering::Equal => v.shift(d as isize),
            std::cmp::Ordering::Greater => Expr::Var(i - 1),
            std::cmp::Ordering::Less => Expr::Var(i),
        })
    }

    /// Whether free variable `ix` occurs.
    pub fn occurs(&self, ix: usize) -> bool {
        let mut found = false;
        self.map_vars(0, &mut |i, d| {
            if i == ix + d {
                found = true;
            }
            Expr::Var(i)
        });
        found
    }

    /// Number of free variables the term may reference, i.e. one more than
    /// the largest free index (0 for closed terms).
    pub fn free_bound(&self) -> usize {
        let mut bound = 0;
        self.map_vars(0, &mut |i, d| {
            if i >= d {
                bound = bound.max(i - d + 1);
            }
            Expr::Var(i)
        });
        bound
    }
}

/// Capture-avoiding substitution of `v` for the typed variable `x`. Both are
/// interpreted in the same context; `x` stays in scope.
pub fn subst_typed(e: &Expr, x: usize, v: &Expr) -> Expr {
    e.map_vars(0, &mut |i, d| if i == x + d { v.shift(d as isize) } else { Expr::Var(i) })
}

/// Substitution of the point `c` for the cube variable `t`.
pub fn subst_cube(e: &Expr, t: usize, c: &CubeExpr) -> Expr {
    subst_typed(e, t, &from_cube(c))
}

/// Simultaneous substitution of several free variables.
pub fn subst_many(e: &Expr, subs: &[(usize, Expr)]) -> Expr {
    e.map_vars(0, &mut |i, d| {
        if i >= d {
            if let Some((_, v)) = subs.iter().find(|(x, _)| *x + d == i) {
                return v.shift(d as isize);
            }
        }
        Expr::Var(i)
    })
}

/// Substitution in a tope (used for boundary and shape premises).
pub fn instantiate_tope(t: &Tope, c: &CubeExpr) -> Tope {
    t.map_vars(0, &mut |i, d| match i.cmp(&d) {
        std::cmp::Ordering::Equal => c.map_vars(0, &mut |j, _| CubeExpr::Var(j + d)),
        std::cmp::Ordering::Greater => CubeExpr::Var(i - 1),
        std::cmp::Ordering::Less => CubeExpr::Var(i),
    })
}
