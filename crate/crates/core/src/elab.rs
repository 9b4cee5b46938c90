//! Scope resolution: raw syntax to core terms.
//!
//! Cube patterns `(t1, t2)` bind a single variable; the leaves elaborate to
//! projections of it. Declaration parameters become `Pi`/extension binders in
//! the type and lambdas in the body.

use std::rc::Rc;

use crate::diagnostic::{Diagnostic, FailureKind};
use crate::syntax::parser::RawSequent;
use crate::syntax::raw::{DeclKind, Pattern, Raw, RawBinder, RawCube, RawDecl, RawKind, RawTope};
use crate::syntax::Span;
use crate::term::{instantiate_tope, Expr, ExtType, JElim, Name};
use crate::tope::{Cube, CubeCtx, CubeExpr, Shape, Tope};

/// Names visible at top level.
pub trait GlobalScope {
    fn has_const(&self, name: &str) -> bool;
    fn shape(&self, name: &str) -> Option<&Shape>;
}

/// A declaration after scope resolution.
#[derive(Clone, Debug)]
pub struct CoreDecl {
    pub name: String,
    pub kind: DeclKind,
    /// Number of telescope binders, so callers can open the type.
    pub params: usize,
    pub ty: Expr,
    pub body: Option<Expr>,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub enum Elaborated {
    Shape(String, Shape),
    Decl(CoreDecl),
}

type EResult<T> = Result<T, Diagnostic>;

fn scope_err(span: Span, msg: String) -> Diagnostic {
    let mut d = Diagnostic::new(FailureKind::ScopeError, msg);
    d.span = Some(span);
    d
}

struct Local {
    name: String,
    level: usize,
    /// Projections from the bound variable, `true` for `first`.
    path: Vec<bool>,
}

struct Scope<'a> {
    g: &'a dyn GlobalScope,
    locals: Vec<Local>,
    depth: usize,
    later_params: Vec<String>,
}

fn leaves(p: &Pattern, path: &mut Vec<bool>, out: &mut Vec<(String, Vec<bool>)>) {
    match p {
        Pattern::Name(n, _) => out.push((n.clone(), path.clone())),
        Pattern::Pair(a, b) => {
            path.push(true);
            leaves(a, path, out);
            path.pop();
            path.push(false);
            leaves(b, path, out);
            path.pop();
        }
    }
}

fn pattern_span(p: &Pattern) -> Span {
    match p {
        Pattern::Name(_, s) => *s,
        Pattern::Pair(a, b) => pattern_span(a).join(pattern_span(b)),
    }
}

impl<'a> Scope<'a> {
    fn new(g: &'a dyn GlobalScope) -> Self {
        Scope { g, locals: vec![], depth: 0, later_params: vec![] }
    }

    /// Binds one variable destructured by `p`; returns its display hint.
    fn bind(&mut self, p: &Pattern) -> String {
        let mut ls = vec![];
        leaves(p, &mut vec![], &mut ls);
        for (name, path) in ls {
            self.locals.push(Local { name, level: self.depth, path });
        }
        self.depth += 1;
        p.hint()
    }

    fn unbind(&mut self) {
        self.depth -= 1;
        while self.locals.last().is_some_and(|l| l.level >= self.depth) {
            self.locals.pop();
        }
    }

    fn local(&self, name: &str) -> Option<Expr> {
        if name == "_" {
            return None;
        }
        let l = self.locals.iter().rev().find(|l| l.name == name)?;
        let mut e = Expr::Var(self.depth - 1 - l.level);
        for &first in &l.path {
            e = if first { Expr::first(e) } else { Expr::second(e) };
        }
        Some(e)
    }

    fn unknown(&self, name: &str, span: Span) -> Diagnostic {
        if self.later_params.iter().any(|p| p == name) {
            let mut d = Diagnostic::new(
                FailureKind::MisorderedTelescope,
                format!("`{name}` is used before the parameter that binds it"),
            );
            d.span = Some(span);
            d
        } else if self.g.shape(name).is_some() {
            scope_err(span, format!("shape `{name}` used where a term or point is expected"))
        } else {
            scope_err(span, format!("unknown identifier `{name}`"))
        }
    }

    fn resolve(&self, name: &str, span: Span) -> EResult<Expr> {
        if let Some(e) = self.local(name) {
            return Ok(e);
        }
        if self.g.has_const(name) {
            return Ok(Expr::Const(Rc::from(name)));
        }
        Err(self.unknown(name, span))
    }

    fn shape_named(&self, name: &str) -> Option<Shape> {
        if self.local(name).is_some() || self.g.has_const(name) {
            return None;
        }
        self.g.shape(name).cloned()
    }

    /// Reads `1`, `2`, products and shape names as a cube with a constraint
    /// on the bound variable.
    fn cube_type(&self, r: &Raw) -> Option<(Cube, Tope)> {
        match &r.kind {
            RawKind::Num(1) => Some((Cube::Unit, Tope::Top)),
            RawKind::Num(2) => Some((Cube::Interval, Tope::Top)),
            RawKind::Prod(a, b) => match (self.cube_type(a)?, self.cube_type(b)?) {
                ((a, Tope::Top), (b, Tope::Top)) => Some((Cube::product(a, b), Tope::Top)),
                _ => None,
            },
            RawKind::Var(n) => self.shape_named(n).map(|s| (s.cube, s.constraint)),
            _ => None,
        }
    }

    fn cube(&self, c: &RawCube) -> EResult<CubeExpr> {
        Ok(match c {
            RawCube::Var(n, sp) => {
                let e = self.resolve(n, *sp)?;
                crate::term::to_cube(&e).ok_or_else(|| scope_err(*sp, format!("`{n}` is not a cube point")))?
            }
            RawCube::Zero => CubeExpr::Zero,
            RawCube::One => CubeExpr::One,
            RawCube::Star => CubeExpr::Star,
            RawCube::Pair(a, b) => CubeExpr::pair(self.cube(a)?, self.cube(b)?),
            RawCube::First(a) => CubeExpr::first(self.cube(a)?),
            RawCube::Second(a) => CubeExpr::second(self.cube(a)?),
        })
    }

    fn tope(&self, t: &RawTope) -> EResult<Tope> {
        Ok(match t {
            RawTope::Top => Tope::Top,
            RawTope::Bot => Tope::Bot,
            RawTope::And(a, b) => Tope::And(Box::new(self.tope(a)?), Box::new(self.tope(b)?)),
            RawTope::Or(a, b) => Tope::Or(Box::new(self.tope(a)?), Box::new(self.tope(b)?)),
            RawTope::Le(a, b) => Tope::Le(self.cube(a)?, self.cube(b)?),
            RawTope::Eq(a, b) => Tope::Eq(self.cube(a)?, self.cube(b)?),
            RawTope::Shape(s, sp, c) => {
                let shape = self.shape_named(s).ok_or_else(|| scope_err(*sp, format!("unknown shape `{s}`")))?;
                instantiate_tope(&shape.constraint, &self.cube(c)?)
            }
        })
    }

    fn rc(&mut self, r: &Raw) -> EResult<Rc<Expr>> {
        Ok(Rc::new(self.expr(r)?))
    }

    fn under<T>(&mut self, p: &Pattern, f: impl FnOnce(&mut Self, String) -> EResult<T>) -> EResult<T> {
        let hint = self.bind(p);
        let r = f(self, hint);
        self.unbind();
        r
    }

    fn expr(&mut self, r: &Raw) -> EResult<Expr> {
        Ok(match &r.kind {
            RawKind::Var(n) => self.resolve(n, r.span)?,
            RawKind::Num(0) => Expr::Point0,
            RawKind::Num(1) => Expr::Point1,
            RawKind::Num(n) => return Err(scope_err(r.span, format!("numeral `{n}` is not a term"))),
            RawKind::Universe => Expr::Universe,
            RawKind::UnitType => Expr::UnitType,
            RawKind::UnitVal => Expr::UnitVal,
            RawKind::Star => Expr::Star,
            RawKind::Refl => Expr::Refl,
            RawKind::App(f, a) => Expr::App(self.rc(f)?, self.rc(a)?),
            RawKind::Lam(pats, body) => self.lams(pats, &mut |s| s.expr(body))?,
            RawKind::Pi(bs, body) => self.telescope(bs, &mut |s| s.expr(body))?,
            RawKind::Arrow(a, b) => {
                let a = self.rc(a)?;
                let b = self.under(&Pattern::Name("_".into(), r.span), |s, _| s.rc(b))?;
                Expr::Pi(Name::new("_"), a, b)
            }
            RawKind::Sigma(p, a, b) => {
                let Pattern::Name(..) = p else {
                    return Err(scope_err(pattern_span(p), "Sigma binds a single name".into()));
                };
                let a = self.rc(a)?;
                let (hint, b) = self.under(p, |s, h| Ok((h, s.rc(b)?)))?;
                Expr::Sigma(Name::new(&hint), a, b)
            }
            RawKind::Prod(a, b) => {
                let a = self.rc(a)?;
                let b = self.under(&Pattern::Name("_".into(), r.span), |s, _| s.rc(b))?;
                Expr::Sigma(Name::new("_"), a, b)
            }
            RawKind::Pair(a, b) => Expr::Pair(self.rc(a)?, self.rc(b)?),
            RawKind::First(a) => Expr::First(self.rc(a)?),
            RawKind::Second(a) => Expr::Second(self.rc(a)?),
            RawKind::Id(t, a, b) => Expr::Id(self.rc(t)?, self.rc(a)?, self.rc(b)?),
            RawKind::J(args) => {
                let v: Vec<Expr> = args.iter().map(|a| self.expr(a)).collect::<EResult<_>>()?;
                let [ty, base, motive, refl_case, target, path] = <[Expr; 6]>::try_from(v).unwrap();
                Expr::J(Rc::new(JElim { ty, base, motive, refl_case, target, path }))
            }
            RawKind::Ext(b, fam, bdry) => {
                let [p] = b.pats.as_slice() else {
                    return Err(scope_err(b.span, "an extension type binds one cube pattern".into()));
                };
                let (cube, base) = self
                    .cube_type(&b.ty)
                    .ok_or_else(|| scope_err(b.ty.span, "extension binder needs a cube or shape".into()))?;
                self.under(p, |s, hint| {
                    let shape = match &b.tope {
                        Some(t) => Tope::and(base, s.tope(t)?),
                        None => base,
                    };
                    let family = s.expr(fam)?;
                    let (bdry_tope, bdry) = match bdry {
                        Some((t, e)) => (s.tope(t)?, s.expr(e)?),
                        None => (Tope::Bot, Expr::case(vec![])),
                    };
                    Ok(Expr::ext(ExtType { name: Name::new(&hint), cube, shape, family, bdry_tope, bdry }))
                })?
            }
            RawKind::Case(bs) => {
                let v = bs.iter().map(|(t, e)| Ok((self.tope(t)?, self.expr(e)?))).collect::<EResult<Vec<_>>>()?;
                Expr::case(v)
            }
            RawKind::Ann(e, t) => Expr::Ann(self.rc(e)?, self.rc(t)?),
        })
    }

    fn lams(&mut self, pats: &[Pattern], k: &mut dyn FnMut(&mut Self) -> EResult<Expr>) -> EResult<Expr> {
        match pats.split_first() {
            None => k(self),
            Some((p, rest)) => {
                let (hint, body) = self.under(p, |s, h| Ok((h, s.lams(rest, k)?)))?;
                Ok(Expr::Lam(Name::new(&hint), Rc::new(body)))
            }
        }
    }

    /// Wraps the result of `k` in one binder per pattern of `bs`.
    fn telescope(&mut self, bs: &[RawBinder], k: &mut dyn FnMut(&mut Self) -> EResult<Expr>) -> EResult<Expr> {
        let Some((b, rest)) = bs.split_first() else {
            return k(self);
        };
        let later: Vec<String> =
            rest.iter().flat_map(|b| b.pats.iter().flat_map(|p| p.leaves())).map(str::to_string).collect();
        let saved = self.later_params.clone();
        self.later_params = later.into_iter().chain(saved.iter().cloned()).collect();
        let current = self.later_params.clone();
        let r = self.binder(b, 0, &mut |s| {
            s.later_params = saved.clone();
            let r = s.telescope(rest, k);
            s.later_params = current.clone();
            r
        });
        self.later_params = saved;
        r
    }

    fn binder(&mut self, b: &RawBinder, i: usize, k: &mut dyn FnMut(&mut Self) -> EResult<Expr>) -> EResult<Expr> {
        let Some(p) = b.pats.get(i) else {
            return k(self);
        };
        let last = i + 1 == b.pats.len();
        if let Some((cube, base)) = self.cube_type(&b.ty) {
            return self.under(p, |s, hint| {
                let shape = match (&b.tope, last) {
                    (Some(t), true) => Tope::and(base, s.tope(t)?),
                    _ => base,
                };
                let family = s.binder(b, i + 1, k)?;
                Ok(Expr::ext(ExtType {
                    name: Name::new(&hint),
                    cube,
                    shape,
                    family,
                    bdry_tope: Tope::Bot,
                    bdry: Expr::case(vec![]),
                }))
            });
        }
        if b.tope.is_some() {
            return Err(scope_err(b.span, "tope restriction on a binder that is not a cube".into()));
        }
        let Pattern::Name(..) = p else {
            return Err(scope_err(pattern_span(p), "only cube binders can be destructured".into()));
        };
        let dom = self.rc(&b.ty)?;
        let (hint, body) = self.under(p, |s, h| Ok((h, s.binder(b, i + 1, k)?)))?;
        Ok(Expr::Pi(Name::new(&hint), dom, Rc::new(body)))
    }
}

pub fn elab_decl(g: &dyn GlobalScope, d: &RawDecl) -> Result<Elaborated, Diagnostic> {
    let mut s = Scope::new(g);
    if let Some(sh) = &d.shape {
        let (cube, base) = s
            .cube_type(&sh.cube)
            .ok_or_else(|| scope_err(sh.cube.span, "a shape needs a cube or another shape".into()))?;
        let tope = s.under(&sh.pat, |s, _| s.tope(&sh.tope))?;
        return Ok(Elaborated::Shape(d.name.clone(), Shape::new(cube, Tope::and(base, tope))));
    }
    let raw_ty = d.ty.as_ref().expect("non-shape declarations have a type");
    let ty = s.telescope(&d.params, &mut |s| s.expr(raw_ty))?;
    let pats: Vec<Pattern> = d.params.iter().flat_map(|b| b.pats.iter().cloned()).collect();
    let body = match &d.body {
        Some(b) => Some(s.lams(&pats, &mut |s| s.expr(b))?),
        None => None,
    };
    Ok(Elaborated::Decl(CoreDecl { name: d.name.clone(), kind: d.kind, params: pats.len(), ty, body, span: d.span }))
}

/// Elaborates an expression in a scope whose variables are `names`
/// (outermost first), each bound as a plain variable.
pub fn elab_expr(g: &dyn GlobalScope, names: &[String], r: &Raw) -> Result<Expr, Diagnostic> {
    let mut s = Scope::new(g);
    for n in names {
        s.bind(&Pattern::Name(n.clone(), r.span));
    }
    s.expr(r)
}

pub fn elab_tope(g: &dyn GlobalScope, names: &[String], t: &RawTope) -> Result<Tope, Diagnostic> {
    let mut s = Scope::new(g);
    let dummy = Span { start: 0, end: 0, line: 1, col: 1 };
    for n in names {
        s.bind(&Pattern::Name(n.clone(), dummy));
    }
    s.tope(t)
}

/// Elaborates a tope sequent. Variables typed by a shape contribute the
/// shape's constraint to the hypothesis.
pub fn elab_sequent(g: &dyn GlobalScope, seq: &RawSequent) -> Result<(CubeCtx, Tope, Tope), Diagnostic> {
    let mut s = Scope::new(g);
    let mut ctx = CubeCtx::new();
    let mut hyp = Tope::Top;
    for (name, ty) in &seq.vars {
        let (cube, constraint) = s
            .cube_type(ty)
            .ok_or_else(|| scope_err(ty.span, format!("`{name}` needs a cube or shape type")))?;
        s.bind(&Pattern::Name(name.clone(), ty.span));
        ctx = ctx.with(name, cube);
        hyp = Tope::and(hyp.shift(1, 0), constraint);
    }
    let hyp = Tope::and(hyp, s.tope(&seq.hyp)?);
    let goal = s.tope(&seq.goal)?;
    Ok((ctx, hyp, goal))
}
