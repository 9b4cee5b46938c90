//! Canonical ASCII printing. Output re-parses to an alpha-equivalent term.

use std::collections::HashSet;

use super::parser::is_keyword;
use crate::term::{Expr, ExtType};
use crate::tope::{Cube, CubeExpr, Shape, Tope};

/// Printer with an optional table of named shapes, used to print extension
/// binders and boundaries by name when they match exactly.
#[derive(Default)]
pub struct Printer<'a> {
    shapes: &'a [(String, Shape)],
}

pub fn print_expr(names: &[String], e: &Expr) -> String {
    Printer::default().expr(names, e)
}

pub fn print_tope(names: &[String], t: &Tope) -> String {
    Printer::default().tope(names, t)
}

struct Env {
    names: Vec<String>,
    avoid: HashSet<String>,
}

impl Env {
    fn name(&self, i: usize) -> String {
        let n = self.names.len();
        if i < n {
            self.names[n - 1 - i].clone()
        } else {
            format!("#{}", i - n)
        }
    }

    fn fresh(&self, hint: &str) -> String {
        let valid = hint.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
            && hint.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '\'' || c == '-')
            && !hint.ends_with('-')
            && !hint.contains("--");
        let base = if !valid || hint == "_" || is_keyword(hint) { "x" } else { hint };
        let taken = |s: &str| self.names.iter().any(|n| n == s) || self.avoid.contains(s) || is_keyword(s);
        if !taken(base) {
            return base.to_string();
        }
        (1..).map(|k| format!("{base}{k}")).find(|s| !taken(s)).unwrap()
    }
}

fn collect_consts(e: &Expr, out: &mut HashSet<String>) {
    match e {
        Expr::Const(c) => {
            out.insert(c.to_string());
        }
        Expr::Pi(_, a, b) | Expr::Sigma(_, a, b) | Expr::App(a, b) | Expr::Pair(a, b) | Expr::Ann(a, b) => {
            collect_consts(a, out);
            collect_consts(b, out);
        }
        Expr::Lam(_, a) | Expr::First(a) | Expr::Second(a) => collect_consts(a, out),
        Expr::Id(a, b, c) => {
            for x in [a, b, c] {
                collect_consts(x, out);
            }
        }
        Expr::J(j) => {
            for x in [&j.ty, &j.base, &j.motive, &j.refl_case, &j.target, &j.path] {
                collect_consts(x, out);
            }
        }
        Expr::Ext(x) => {
            collect_consts(&x.family, out);
            collect_consts(&x.bdry, out);
        }
        Expr::Case(bs) => bs.iter().for_each(|(_, b)| collect_consts(b, out)),
        _ => {}
    }
}

fn paren(s: String, wrap: bool) -> String {
    if wrap {
        format!("({s})")
    } else {
        s
    }
}

pub fn print_cube_type(c: &Cube) -> String {
    c.to_string()
}

impl<'a> Printer<'a> {
    pub fn with_shapes(shapes: &'a [(String, Shape)]) -> Self {
        Printer { shapes }
    }

    fn env(&self, names: &[String], roots: &[&Expr]) -> Env {
        let mut avoid: HashSet<String> = self.shapes.iter().map(|(n, _)| n.clone()).collect();
        for r in roots {
            collect_consts(r, &mut avoid);
        }
        Env { names: names.to_vec(), avoid }
    }

    pub fn expr(&self, names: &[String], e: &Expr) -> String {
        let mut env = self.env(names, &[e]);
        self.go(&mut env, e, 0)
    }

    pub fn tope(&self, names: &[String], t: &Tope) -> String {
        let env = self.env(names, &[]);
        self.tope_at(&env, t, 0)
    }

    fn bind<R>(&self, env: &mut Env, hint: &str, f: impl FnOnce(&mut Env, String) -> R) -> R {
        let n = env.fresh(hint);
        env.names.push(n.clone());
        let r = f(env, n);
        env.names.pop();
        r
    }

    /// Levels: 0 binders and arrows, 1 identity, 2 product, 3 application, 4 atom.
    fn go(&self, env: &mut Env, e: &Expr, level: u8) -> String {
        match e {
            Expr::Var(i) => env.name(*i),
            Expr::Const(c) => c.to_string(),
            Expr::Universe => "U".into(),
            Expr::UnitType => "Unit".into(),
            Expr::UnitVal => "unit".into(),
            Expr::Refl => "refl".into(),
            Expr::Point0 => "0".into(),
            Expr::Point1 => "1".into(),
            Expr::Star => "star".into(),
            Expr::Pi(n, a, b) => {
                let s = if b.occurs(0) {
                    let a = self.go(env, a, 0);
                    self.bind(env, n.as_str(), |env, x| format!("({x} : {a}) -> {}", self.go(env, b, 0)))
                } else {
                    // `(x : T) -> B` would read back as a binder.
                    let a = paren(self.go(env, a, 1), matches!(**a, Expr::Ann(..)));
                    let b = self.bind(env, "_", |env, _| self.go(env, b, 0));
                    format!("{a} -> {b}")
                };
                paren(s, level > 0)
            }
            Expr::Lam(n, b) => {
                let s = self.bind(env, n.as_str(), |env, x| format!("\\{x}. {}", self.go(env, b, 0)));
                paren(s, level > 0)
            }
            Expr::Sigma(n, a, b) => {
                if b.occurs(0) {
                    let a = self.go(env, a, 0);
                    let s = self.bind(env, n.as_str(), |env, x| format!("Sigma ({x} : {a}), {}", self.go(env, b, 0)));
                    paren(s, level > 0)
                } else {
                    let a = self.go(env, a, 3);
                    let b = self.bind(env, "_", |env, _| self.go(env, b, 2));
                    paren(format!("{a} * {b}"), level > 2)
                }
            }
            Expr::Pair(a, b) => format!("({}, {})", self.go(env, a, 0), self.go(env, b, 0)),
            Expr::First(a) => paren(format!("first {}", self.go(env, a, 4)), level > 3),
            Expr::Second(a) => paren(format!("second {}", self.go(env, a, 4)), level > 3),
            Expr::App(f, a) => paren(format!("{} {}", self.go(env, f, 3), self.go(env, a, 4)), level > 3),
            Expr::Id(t, a, b) => {
                let s = format!("{} =_{{{}}} {}", self.go(env, a, 2), self.go(env, t, 0), self.go(env, b, 2));
                paren(s, level > 1)
            }
            Expr::J(j) => {
                let parts: Vec<String> = [&j.ty, &j.base, &j.motive, &j.refl_case, &j.target, &j.path]
                    .into_iter()
                    .map(|x| self.go(env, x, 0))
                    .collect();
                format!("idJ({})", parts.join(", "))
            }
            Expr::Ext(x) => self.ext(env, x),
            Expr::Case(bs) if bs.is_empty() => "recBOT".into(),
            Expr::Case(bs) => {
                let parts: Vec<String> = bs
                    .iter()
                    .map(|(t, b)| format!("{} |-> {}", self.tope_at(env, t, 0), self.go(env, b, 0)))
                    .collect();
                format!("recOR({})", parts.join(", "))
            }
            Expr::Ann(a, t) => format!("({} : {})", self.go(env, a, 0), self.go(env, t, 0)),
        }
    }

    fn shape_named(&self, cube: &Cube, t: &Tope) -> Option<&str> {
        self.shapes.iter().find(|(_, s)| &s.cube == cube && &s.constraint == t).map(|(n, _)| n.as_str())
    }

    fn ext(&self, env: &mut Env, x: &ExtType) -> String {
        self.bind(env, x.name.as_str(), |env, t| {
            let binder = match self.shape_named(&x.cube, &x.shape) {
                Some(s) => format!("({t} : {s})"),
                None if x.shape == Tope::Top => format!("({t} : {})", x.cube),
                None => format!("({t} : {} | {})", x.cube, self.tope_at(env, &x.shape, 0)),
            };
            let fam = self.go(env, &x.family, 0);
            if x.is_unrestricted() {
                format!("<{binder} -> {fam}>")
            } else {
                let bt = match self.shape_named(&x.cube, &x.bdry_tope) {
                    Some(s) => format!("{s}({t})"),
                    None => self.tope_at(env, &x.bdry_tope, 0),
                };
                format!("<{binder} -> {fam} [{bt} |-> {}]>", self.go(env, &x.bdry, 0))
            }
        })
    }

    /// Levels: 0 disjunction, 1 conjunction, 2 atom.
    fn tope_at(&self, env: &Env, t: &Tope, level: u8) -> String {
        match t {
            Tope::Top => "TOP".into(),
            Tope::Bot => "BOT".into(),
            Tope::Or(a, b) => paren(format!("{} \\/ {}", self.tope_at(env, a, 0), self.tope_at(env, b, 1)), level > 0),
            Tope::And(a, b) => paren(format!("{} /\\ {}", self.tope_at(env, a, 1), self.tope_at(env, b, 2)), level > 1),
            Tope::Le(a, b) => format!("{} <= {}", self.cube(env, a, false), self.cube(env, b, false)),
            Tope::Eq(a, b) => format!("{} === {}", self.cube(env, a, false), self.cube(env, b, false)),
        }
    }

    fn cube(&self, env: &Env, c: &CubeExpr, atomic: bool) -> String {
        match c {
            CubeExpr::Var(i) => env.name(*i),
            CubeExpr::Zero => "0".into(),
            CubeExpr::One => "1".into(),
            CubeExpr::Star => "star".into(),
            CubeExpr::Pair(a, b) => format!("({}, {})", self.cube(env, a, false), self.cube(env, b, false)),
            CubeExpr::First(a) => paren(format!("first {}", self.cube(env, a, true)), atomic),
            CubeExpr::Second(a) => paren(format!("second {}", self.cube(env, a, true)), atomic),
        }
    }
}
