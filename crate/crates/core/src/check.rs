//! Bidirectional type checking, weak-head reduction and judgmental equality.

use std::cell::{Cell, RefCell};
use std::collections::HashMap;
use std::rc::Rc;

use serde::Serialize;

use crate::context::{Entry, TriContext};
use crate::diagnostic::{Diagnostic, FailureKind};
use crate::elab::{elab_decl, CoreDecl, Elaborated, GlobalScope};
use crate::syntax::raw::DeclKind;
use crate::syntax::{parse_module, Printer};
use crate::term::{from_cube, instantiate_tope, to_cube, Expr, ExtType, JElim, Name};
use crate::tope::{self, Cube, CubeExpr, CubeScope, Entailment, Shape, Tope, TopeError};

/// Reduction steps allowed per declaration unless configured otherwise.
pub const DEFAULT_FUEL: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LedgerTag {
    Definition,
    Axiom,
    TheoremProved,
    TheoremStated,
}

impl LedgerTag {
    pub fn of(kind: DeclKind, has_body: bool) -> LedgerTag {
        match (kind, has_body) {
            (DeclKind::Postulate, _) => LedgerTag::Axiom,
            (DeclKind::Thm, true) => LedgerTag::TheoremProved,
            (DeclKind::Thm, false) => LedgerTag::TheoremStated,
            _ => LedgerTag::Definition,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            LedgerTag::Definition => "definition",
            LedgerTag::Axiom => "axiom",
            LedgerTag::TheoremProved => "theorem-proved",
            LedgerTag::TheoremStated => "theorem-stated",
        }
    }
}

#[derive(Clone, Debug)]
pub struct GlobalDecl {
    pub name: Rc<str>,
    pub ty: Expr,
    pub body: Option<Expr>,
    pub tag: LedgerTag,
    pub params: usize,
}

/// Checked declarations and named shapes, in insertion order.
#[derive(Clone, Debug, Default)]
pub struct Globals {
    decls: HashMap<Rc<str>, GlobalDecl>,
    order: Vec<Rc<str>>,
    shapes: Vec<(String, Shape)>,
}

impl GlobalScope for Globals {
    fn has_const(&self, name: &str) -> bool {
        self.decls.contains_key(name)
    }

    fn shape(&self, name: &str) -> Option<&Shape> {
        self.shapes.iter().find(|(n, _)| n == name).map(|(_, s)| s)
    }
}

impl Globals {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, name: &str) -> Option<&GlobalDecl> {
        self.decls.get(name)
    }

    pub fn insert(&mut self, d: GlobalDecl) {
        if self.decls.insert(d.name.clone(), d.clone()).is_none() {
            self.order.push(d.name);
        }
    }

    /// Adds every declaration and shape of `other` not already present.
    pub fn merge(&mut self, other: &Globals) {
        for d in other.decls() {
            if !self.decls.contains_key(&d.name) {
                self.insert(d.clone());
            }
        }
        for (n, s) in &other.shapes {
            if self.shape(n).is_none() {
                self.shapes.push((n.clone(), s.clone()));
            }
        }
    }

    pub fn insert_shape(&mut self, name: &str, shape: Shape) {
        self.shapes.retain(|(n, _)| n != name);
        self.shapes.push((name.to_string(), shape));
    }

    pub fn shapes(&self) -> &[(String, Shape)] {
        &self.shapes
    }

    pub fn decls(&self) -> impl Iterator<Item = &GlobalDecl> {
        self.order.iter().map(|n| &self.decls[n])
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn printer(&self) -> Printer<'_> {
        Printer::with_shapes(&self.shapes)
    }

    /// Parses, elaborates and checks every declaration of `src` in order,
    /// stopping at the first failure. Postulates are accepted without a ledger.
    pub fn extend_from_source(&mut self, src: &str) -> Result<(), Diagnostic> {
        let m = parse_module(src).map_err(|e| {
            let mut d = Diagnostic::new(FailureKind::ParseError, e.message.clone());
            d.span = Some(e.span);
            d
        })?;
        for raw in &m.decls {
            let el = elab_decl(self, raw).map_err(|d| d.at("", &raw.name, Some(raw.name_span)))?;
            self.add_checked(el, DEFAULT_FUEL).map_err(|d| d.at("", &raw.name, Some(raw.name_span)))?;
        }
        Ok(())
    }

    /// Checks an elaborated declaration and, on success, adds it.
    pub fn add_checked(&mut self, el: Elaborated, fuel: u64) -> Result<Option<LedgerTag>, Diagnostic> {
        match el {
            Elaborated::Shape(name, shape) => {
                let ctx = crate::tope::CubeCtx::new().with("t", shape.cube.clone());
                validate_tope(&ctx, &shape.constraint).map_err(tope_error)?;
                self.insert_shape(&name, shape);
                Ok(None)
            }
            Elaborated::Decl(d) => {
                let tag = Checker::new(self).with_fuel(fuel).check_decl(&d)?;
                self.insert(GlobalDecl {
                    name: Rc::from(d.name.as_str()),
                    ty: d.ty,
                    body: d.body,
                    tag,
                    params: d.params,
                });
                Ok(Some(tag))
            }
        }
    }
}

/// Checks that both sides of every atom live in the right cube.
pub fn validate_tope(scope: &dyn CubeScope, t: &Tope) -> Result<(), TopeError> {
    match t {
        Tope::Top | Tope::Bot => Ok(()),
        Tope::And(a, b) | Tope::Or(a, b) => {
            validate_tope(scope, a)?;
            validate_tope(scope, b)
        }
        Tope::Le(a, b) => {
            for c in [a, b] {
                let cube = tope::infer_cube(scope, c)?;
                if cube != Cube::Interval {
                    return Err(TopeError::CubeMismatch { expected: Cube::Interval, found: cube });
                }
            }
            Ok(())
        }
        Tope::Eq(a, b) => {
            let ca = tope::infer_cube(scope, a)?;
            let cb = tope::infer_cube(scope, b)?;
            if ca != cb {
                return Err(TopeError::CubeMismatch { expected: ca, found: cb });
            }
            Ok(())
        }
    }
}

fn tope_error(e: TopeError) -> Diagnostic {
    match e {
        TopeError::TooLarge => Diagnostic::new(FailureKind::TopeTooLarge, e.to_string()),
        TopeError::Scope(_) => Diagnostic::new(FailureKind::ScopeError, e.to_string()),
        _ => Diagnostic::new(FailureKind::TypeMismatch, e.to_string()),
    }
}

fn collect_consts(e: &Expr, out: &mut Vec<Rc<str>>) {
    match e {
        Expr::Const(c) => out.push(c.clone()),
        Expr::Pi(_, a, b) | Expr::Sigma(_, a, b) | Expr::App(a, b) | Expr::Pair(a, b) | Expr::Ann(a, b) => {
            collect_consts(a, out);
            collect_consts(b, out);
        }
        Expr::Lam(_, a) | Expr::First(a) | Expr::Second(a) => collect_consts(a, out),
        Expr::Id(a, b, c) => [a, b, c].into_iter().for_each(|x| collect_consts(x, out)),
        Expr::J(j) => [&j.ty, &j.base, &j.motive, &j.refl_case, &j.target, &j.path]
            .into_iter()
            .for_each(|x| collect_consts(x, out)),
        Expr::Ext(x) => {
            collect_consts(&x.family, out);
            collect_consts(&x.bdry, out);
        }
        Expr::Case(bs) => bs.iter().for_each(|(_, b)| collect_consts(b, out)),
        _ => {}
    }
}

/// Every constant a term mentions.
pub fn constants_of(e: &Expr) -> Vec<Rc<str>> {
    let mut out = vec![];
    collect_consts(e, &mut out);
    out.sort();
    out.dedup();
    out
}

type CResult<T> = Result<T, Diagnostic>;

type MemoKey = (Tope, Tope, Vec<(usize, Option<Cube>)>);

pub struct Checker<'g> {
    globals: &'g Globals,
    fuel_limit: u64,
    fuel: Cell<u64>,
    depth: Cell<u32>,
    memo: RefCell<HashMap<MemoKey, bool>>,
}

/// Nesting limit for typing, reduction and equality calls. Deep terms are
/// reported as exhausting the budget instead of overflowing the stack.
pub const MAX_DEPTH: u32 = 2_000;

const RED_ZONE: usize = 128 * 1024;
const STACK_CHUNK: usize = 4 * 1024 * 1024;

struct DepthGuard<'a>(&'a Cell<u32>);

impl Drop for DepthGuard<'_> {
    fn drop(&mut self) {
        self.0.set(self.0.get() - 1);
    }
}

fn cube_vars_only(ctx: &TriContext, c: &CubeExpr) -> bool {
    let mut vs = vec![];
    c.vars(&mut vs);
    vs.iter().all(|&i| ctx.is_cube_var(i))
}

/// The kept and dropped components of a projection out of a bare pair.
fn projected(e: &Expr) -> (&Expr, &Expr) {
    match e {
        Expr::First(p) | Expr::Second(p) => match &**p {
            Expr::Pair(a, b) if matches!(e, Expr::First(_)) => (a, b),
            Expr::Pair(a, b) => (b, a),
            _ => unreachable!("projection out of a non-pair"),
        },
        _ => unreachable!("not a projection"),
    }
}

fn push_case(bs: &[(Tope, Expr)], f: impl Fn(&Expr) -> Expr) -> Expr {
    Expr::case(bs.iter().map(|(g, b)| (g.clone(), f(b))).collect())
}

fn first_of(e: &Expr) -> Expr {
    match e {
        Expr::Pair(a, _) => (**a).clone(),
        _ => Expr::first(e.clone()),
    }
}

fn second_of(e: &Expr) -> Expr {
    match e {
        Expr::Pair(_, b) => (**b).clone(),
        _ => Expr::second(e.clone()),
    }
}

/// `e x` for the fresh variable `x = Var(0)`, with `e` already shifted.
fn apply_fresh(e: &Expr) -> Expr {
    match e {
        Expr::Lam(_, body) => (**body).clone(),
        _ => Expr::app(e.shift(1), Expr::Var(0)),
    }
}

impl<'g> Checker<'g> {
    pub fn new(globals: &'g Globals) -> Self {
        Checker { globals, fuel_limit: DEFAULT_FUEL, fuel: Cell::new(DEFAULT_FUEL), depth: Cell::new(0), memo: RefCell::new(HashMap::new()) }
    }

    pub fn with_fuel(mut self, fuel: u64) -> Self {
        self.fuel_limit = fuel;
        self.fuel.set(fuel);
        self
    }

    pub fn reset_fuel(&self) {
        self.fuel.set(self.fuel_limit);
    }

    pub fn fuel_used(&self) -> u64 {
        self.fuel_limit - self.fuel.get()
    }

    fn enter(&self) -> CResult<DepthGuard<'_>> {
        let d = self.depth.get();
        if d >= MAX_DEPTH {
            return Err(Diagnostic::new(
                FailureKind::FuelExhausted,
                format!("terms are nested more than {MAX_DEPTH} levels deep"),
            ));
        }
        self.depth.set(d + 1);
        Ok(DepthGuard(&self.depth))
    }

    fn tick(&self) -> CResult<()> {
        let f = self.fuel.get();
        if f == 0 {
            return Err(Diagnostic::new(
                FailureKind::FuelExhausted,
                format!("reduction exceeded the budget of {} steps", self.fuel_limit),
            ));
        }
        self.fuel.set(f - 1);
        Ok(())
    }

    // ---- display helpers ----

    fn display_names(&self, ctx: &TriContext) -> Vec<String> {
        let mut out: Vec<String> = vec![];
        for n in ctx.names() {
            let mut m = if n.is_empty() || n == "_" { "x".to_string() } else { n };
            while out.contains(&m) || self.globals.has_const(&m) {
                m.push('\'');
            }
            out.push(m);
        }
        out
    }

    pub fn show(&self, ctx: &TriContext, e: &Expr) -> String {
        self.globals.printer().expr(&self.display_names(ctx), e)
    }

    pub fn show_tope(&self, ctx: &TriContext, t: &Tope) -> String {
        self.globals.printer().tope(&self.display_names(ctx), t)
    }

    fn context_lines(&self, ctx: &TriContext) -> Vec<String> {
        let names = self.display_names(ctx);
        let p = self.globals.printer();
        let mut out: Vec<String> = ctx
            .entries()
            .iter()
            .enumerate()
            .map(|(i, e)| match e {
                Entry::Typed { ty, .. } => format!("{} : {}", names[i], p.expr(&names[..i], ty)),
                Entry::Cube { cube, .. } => format!("{} : {}", names[i], cube),
            })
            .collect();
        let phi = ctx.phi();
        if phi != Tope::Top {
            out.push(format!("| {}", p.tope(&names, &phi)));
        }
        out
    }

    fn err(&self, ctx: &TriContext, kind: FailureKind, msg: impl Into<String>) -> Diagnostic {
        Diagnostic::new(kind, msg).with_context(self.context_lines(ctx))
    }

    fn mismatch(&self, ctx: &TriContext, msg: &str, expected: &Expr, found: &Expr) -> Diagnostic {
        self.err(ctx, FailureKind::TypeMismatch, msg).with_sides(self.show(ctx, expected), self.show(ctx, found))
    }

    fn sequent(&self, ctx: &TriContext, goal: &Tope) -> String {
        let names = self.display_names(ctx);
        let cubes: Vec<String> = ctx
            .entries()
            .iter()
            .enumerate()
            .filter_map(|(i, e)| match e {
                Entry::Cube { cube, .. } => Some(format!("{} : {}", names[i], cube)),
                _ => None,
            })
            .collect();
        format!("{} | {} |- {}", cubes.join(", "), self.show_tope(ctx, &ctx.phi()), self.show_tope(ctx, goal))
    }

    // ---- topes ----

    pub fn entails(&self, ctx: &TriContext, goal: &Tope) -> CResult<bool> {
        Ok(self.entailment(ctx, goal)?.is_none())
    }

    /// `None` when `ctx |- goal` holds, otherwise a counter-model.
    fn entailment(&self, ctx: &TriContext, goal: &Tope) -> CResult<Option<tope::CounterModel>> {
        if *goal == Tope::Top {
            return Ok(None);
        }
        let phi = ctx.phi();
        let mut vs = vec![];
        phi.vars(&mut vs);
        goal.vars(&mut vs);
        vs.sort_unstable();
        vs.dedup();
        let sig = vs.iter().map(|&i| (i, ctx.cube_of(i).ok())).collect();
        let key = (phi.clone(), goal.clone(), sig);
        if let Some(&b) = self.memo.borrow().get(&key) {
            if b {
                return Ok(None);
            }
        }
        let r = tope::entails(ctx, &phi, goal).map_err(|e| tope_error(e).with_context(self.context_lines(ctx)))?;
        self.memo.borrow_mut().insert(key, r.holds());
        Ok(match r {
            Entailment::Yes => None,
            Entailment::No(m) => Some(m),
        })
    }

    fn require(&self, ctx: &TriContext, goal: &Tope, what: &str) -> CResult<()> {
        match self.entailment(ctx, goal)? {
            None => Ok(()),
            Some(m) => Err(self
                .err(ctx, FailureKind::UnsolvedTope, format!("{what}; counter-model {m}"))
                .with_sequent(self.sequent(ctx, goal))),
        }
    }

    fn inconsistent(&self, ctx: &TriContext) -> CResult<bool> {
        self.entails(ctx, &Tope::Bot)
    }

    fn check_tope(&self, ctx: &TriContext, t: &Tope) -> CResult<()> {
        validate_tope(ctx, t).map_err(|e| tope_error(e).with_context(self.context_lines(ctx)))
    }

    fn tope_equiv(&self, ctx: &TriContext, a: &Tope, b: &Tope) -> CResult<bool> {
        Ok(a == b || (self.entails(&ctx.assume(a.clone()), b)? && self.entails(&ctx.assume(b.clone()), a)?))
    }

    /// Reads `a` as a point of `cube`.
    fn point(&self, ctx: &TriContext, a: &Expr, cube: &Cube) -> CResult<CubeExpr> {
        let c = to_cube(a).ok_or_else(|| {
            self.err(ctx, FailureKind::TypeMismatch, format!("expected a point of cube {cube}"))
                .with_sides(cube.to_string(), self.show(ctx, a))
        })?;
        let found = tope::infer_cube(ctx, &c).map_err(|e| tope_error(e).with_context(self.context_lines(ctx)))?;
        if &found != cube {
            return Err(self
                .err(ctx, FailureKind::TypeMismatch, "point lives in the wrong cube")
                .with_sides(cube.to_string(), found.to_string()));
        }
        Ok(c)
    }

    // ---- declarations ----

    pub fn check_decl(&self, d: &CoreDecl) -> CResult<LedgerTag> {
        self.reset_fuel();
        let ctx = TriContext::new();
        let tag = LedgerTag::of(d.kind, d.body.is_some());
        self.check_type(&ctx, &d.ty)?;
        if let Some(body) = &d.body {
            for c in constants_of(body) {
                if self.globals.get(&c).is_some_and(|g| g.tag == LedgerTag::TheoremStated) {
                    return Err(Diagnostic::new(
                        FailureKind::UnprovedDependency,
                        format!("the proof uses `{c}`, which is stated but not proved"),
                    ));
                }
            }
            self.check(&ctx, body, &d.ty)?;
        }
        Ok(tag)
    }

    // ---- typing ----

    pub fn check_type(&self, ctx: &TriContext, ty: &Expr) -> CResult<()> {
        self.check(ctx, ty, &Expr::Universe)
    }

    pub fn infer(&self, ctx: &TriContext, e: &Expr) -> CResult<Expr> {
        let _depth = self.enter()?;
        stacker::maybe_grow(RED_ZONE, STACK_CHUNK, || self.infer_in(ctx, e))
    }

    fn infer_in(&self, ctx: &TriContext, e: &Expr) -> CResult<Expr> {
        match e {
            Expr::Var(i) => match ctx.entry(*i) {
                Some(Entry::Typed { .. }) => Ok(ctx.type_of(*i).unwrap()),
                Some(Entry::Cube { name, .. }) => {
                    Err(self.err(ctx, FailureKind::TypeMismatch, format!("cube variable `{name}` used as a term")))
                }
                None => Err(self.err(ctx, FailureKind::ScopeError, format!("variable #{i} is out of scope"))),
            },
            Expr::Const(c) => match self.globals.get(c) {
                Some(g) => Ok(g.ty.clone()),
                None => Err(self.err(ctx, FailureKind::ScopeError, format!("unknown constant `{c}`"))),
            },
            Expr::Universe | Expr::UnitType => Ok(Expr::Universe),
            Expr::UnitVal => Ok(Expr::UnitType),
            Expr::Pi(n, a, b) | Expr::Sigma(n, a, b) => {
                self.check_type(ctx, a)?;
                self.check_type(&ctx.push_typed(n.as_str(), (**a).clone()), b)?;
                Ok(Expr::Universe)
            }
            Expr::Id(t, a, b) => {
                self.check_type(ctx, t)?;
                self.check(ctx, a, t)?;
                self.check(ctx, b, t)?;
                Ok(Expr::Universe)
            }
            Expr::Ext(x) => {
                self.ext_formation(ctx, x)?;
                Ok(Expr::Universe)
            }
            Expr::App(f, a) if matches!(**f, Expr::Lam(..)) => {
                // A bare redex, as left behind by reduction: type its reduct.
                let Expr::Lam(_, body) = &**f else { unreachable!() };
                self.redex_arg(ctx, a)?;
                self.tick()?;
                self.infer(ctx, &body.instantiate(a))
            }
            Expr::App(f, a) => {
                let ft = self.infer(ctx, f)?;
                match self.whnf(ctx, &ft)? {
                    Expr::Pi(_, dom, cod) => {
                        self.check(ctx, a, &dom)?;
                        Ok(cod.instantiate(a))
                    }
                    Expr::Ext(x) => {
                        let c = self.point(ctx, a, &x.cube)?;
                        self.require(ctx, &instantiate_tope(&x.shape, &c), "point lies outside the extension shape")?;
                        Ok(x.family.instantiate(&from_cube(&c)))
                    }
                    other => Err(self.err(ctx, FailureKind::TypeMismatch, "applied a term that is not a function")
                        .with_sides("a function or extension type".into(), self.show(ctx, &other))),
                }
            }
            Expr::First(p) | Expr::Second(p) if matches!(**p, Expr::Pair(..)) => {
                let (kept, dropped) = projected(e);
                self.infer(ctx, dropped)?;
                self.tick()?;
                self.infer(ctx, kept)
            }
            Expr::First(p) | Expr::Second(p) => {
                let pt = self.infer(ctx, p)?;
                match self.whnf(ctx, &pt)? {
                    Expr::Sigma(_, a, b) => Ok(if matches!(e, Expr::First(_)) {
                        (*a).clone()
                    } else {
                        b.instantiate(&first_of(p))
                    }),
                    other => Err(self.err(ctx, FailureKind::TypeMismatch, "projection from a term that is not a pair")
                        .with_sides("a Sigma type".into(), self.show(ctx, &other))),
                }
            }
            Expr::J(j) => {
                self.check_type(ctx, &j.ty)?;
                self.check(ctx, &j.base, &j.ty)?;
                let motive_ty = Expr::pi(
                    "y",
                    j.ty.clone(),
                    Expr::pi("p", Expr::id(j.ty.shift(1), j.base.shift(1), Expr::Var(0)), Expr::Universe),
                );
                self.check(ctx, &j.motive, &motive_ty)?;
                self.check(ctx, &j.refl_case, &Expr::apps(j.motive.clone(), [j.base.clone(), Expr::Refl]))?;
                self.check(ctx, &j.target, &j.ty)?;
                self.check(ctx, &j.path, &Expr::id(j.ty.clone(), j.base.clone(), j.target.clone()))?;
                Ok(Expr::apps(j.motive.clone(), [j.target.clone(), j.path.clone()]))
            }
            Expr::Ann(e, t) => {
                self.check_type(ctx, t)?;
                self.check(ctx, e, t)?;
                Ok((**t).clone())
            }
            Expr::Lam(..) | Expr::Pair(..) | Expr::Refl | Expr::Case(..) => Err(self.err(
                ctx,
                FailureKind::TypeMismatch,
                format!("cannot infer a type for `{}`; add an annotation", self.show(ctx, e)),
            )),
            Expr::Point0 | Expr::Point1 | Expr::Star => {
                Err(self.err(ctx, FailureKind::TypeMismatch, "a cube point is not a term"))
            }
        }
    }

    /// Validates the argument of a bare redex: a cube point or an
    /// inferable term.
    fn redex_arg(&self, ctx: &TriContext, a: &Expr) -> CResult<()> {
        match to_cube(a) {
            Some(c) if cube_vars_only(ctx, &c) => tope::infer_cube(ctx, &c).map(|_| ()).map_err(tope_error),
            _ => self.infer(ctx, a).map(|_| ()),
        }
    }

    pub fn check(&self, ctx: &TriContext, e: &Expr, ty: &Expr) -> CResult<()> {
        let _depth = self.enter()?;
        stacker::maybe_grow(RED_ZONE, STACK_CHUNK, || self.check_in(ctx, e, ty))
    }

    fn check_in(&self, ctx: &TriContext, e: &Expr, ty: &Expr) -> CResult<()> {
        let intro = matches!(e, Expr::Lam(..) | Expr::Pair(..) | Expr::Refl);
        if let Expr::Case(bs) = e {
            return self.check_case(ctx, bs, ty);
        }
        match e {
            Expr::App(f, a) if matches!(**f, Expr::Lam(..)) => {
                let Expr::Lam(_, body) = &**f else { unreachable!() };
                self.redex_arg(ctx, a)?;
                self.tick()?;
                return self.check(ctx, &body.instantiate(a), ty);
            }
            Expr::First(p) | Expr::Second(p) if matches!(**p, Expr::Pair(..)) => {
                let (kept, dropped) = projected(e);
                self.infer(ctx, dropped)?;
                self.tick()?;
                return self.check(ctx, kept, ty);
            }
            _ => {}
        }
        if !intro {
            let found = self.infer(ctx, e)?;
            if !self.equal_types(ctx, &found, ty)? {
                return Err(self.mismatch(ctx, "type mismatch", ty, &found));
            }
            return Ok(());
        }
        let tw = self.whnf(ctx, ty)?;
        match (e, &tw) {
            (_, Expr::Case(bs)) => {
                for (g, t) in bs.iter() {
                    self.check(&ctx.assume(g.clone()), e, t)?;
                }
                Ok(())
            }
            (Expr::Lam(n, body), Expr::Pi(_, dom, cod)) => self.check(&ctx.push_typed(n.as_str(), (**dom).clone()), body, cod),
            (Expr::Lam(n, body), Expr::Ext(x)) => self.check_ext_lam(ctx, n, body, x),
            (Expr::Pair(a, b), Expr::Sigma(_, ta, tb)) => {
                self.check(ctx, a, ta)?;
                self.check(ctx, b, &tb.instantiate(a))
            }
            (Expr::Refl, Expr::Id(t, a, b)) => {
                if self.equal(ctx, t, a, b)? {
                    Ok(())
                } else {
                    Err(self.err(ctx, FailureKind::TypeMismatch, "refl: the endpoints are not judgmentally equal")
                        .with_sides(self.show(ctx, a), self.show(ctx, b)))
                }
            }
            _ => {
                let what = match e {
                    Expr::Lam(..) => "a lambda needs a function or extension type",
                    Expr::Pair(..) => "a pair needs a Sigma type",
                    _ => "refl needs an identity type",
                };
                Err(self.err(ctx, FailureKind::TypeMismatch, what).with_sides(self.show(ctx, &tw), self.show(ctx, e)))
            }
        }
    }

    fn check_ext_lam(&self, ctx: &TriContext, n: &Name, body: &Expr, x: &ExtType) -> CResult<()> {
        let inner = ctx.push_cube(n.as_str(), x.cube.clone(), x.shape.clone());
        self.check(&inner, body, &x.family)?;
        if x.is_unrestricted() {
            return Ok(());
        }
        let on_bdry = inner.assume(x.bdry_tope.clone());
        if self.equal(&on_bdry, &x.family, body, &x.bdry)? {
            return Ok(());
        }
        let (ctx_bad, expected) = match &x.bdry {
            Expr::Case(bs) => {
                let mut found = None;
                for (g, b) in bs.iter() {
                    let c = on_bdry.assume(g.clone());
                    if !self.equal(&c, &x.family, body, b)? {
                        found = Some((c, b.clone()));
                        break;
                    }
                }
                found.unwrap_or((on_bdry.clone(), x.bdry.clone()))
            }
            _ => (on_bdry.clone(), x.bdry.clone()),
        };
        let found = self.whnf(&ctx_bad, body).unwrap_or_else(|_| body.clone());
        let phi = ctx_bad.phi();
        Err(self
            .err(&ctx_bad, FailureKind::BoundaryMismatch, "the body does not agree with the boundary")
            .with_sides(self.show(&ctx_bad, &expected), self.show(&ctx_bad, &found))
            .with_sequent(self.show_tope(&ctx_bad, &phi)))
    }

    fn check_case(&self, ctx: &TriContext, bs: &[(Tope, Expr)], ty: &Expr) -> CResult<()> {
        for (g, _) in bs {
            self.check_tope(ctx, g)?;
        }
        let cover = Tope::disj(bs.iter().map(|(g, _)| g.clone()));
        self.require(ctx, &cover, "the tope cases do not cover the context")?;
        for (g, e) in bs {
            self.check(&ctx.assume(g.clone()), e, ty)?;
        }
        for i in 0..bs.len() {
            for j in i + 1..bs.len() {
                let both = ctx.assume(Tope::and(bs[i].0.clone(), bs[j].0.clone()));
                if !self.equal(&both, ty, &bs[i].1, &bs[j].1)? {
                    let phi = both.phi();
                    return Err(self
                        .err(&both, FailureKind::BoundaryMismatch, "tope-case branches disagree on their overlap")
                        .with_sides(self.show(&both, &bs[i].1), self.show(&both, &bs[j].1))
                        .with_sequent(self.show_tope(&both, &phi)));
                }
            }
        }
        Ok(())
    }

    fn ext_formation(&self, ctx: &TriContext, x: &ExtType) -> CResult<()> {
        let name = x.name.as_str();
        let free = ctx.push_cube(name, x.cube.clone(), Tope::Top);
        self.check_tope(&free, &x.shape)?;
        self.check_tope(&free, &x.bdry_tope)?;
        let inner = ctx.push_cube(name, x.cube.clone(), x.shape.clone());
        self.check_type(&inner, &x.family)?;
        self.require(&free.assume(x.bdry_tope.clone()), &x.shape, "the boundary tope is not inside the shape")?;
        self.check(&inner.assume(x.bdry_tope.clone()), &x.bdry, &x.family)
    }

    // ---- reduction ----

    /// Weak-head normal form.
    pub fn whnf(&self, ctx: &TriContext, e: &Expr) -> CResult<Expr> {
        let _depth = self.enter()?;
        stacker::maybe_grow(RED_ZONE, STACK_CHUNK, || self.whnf_in(ctx, e))
    }

    fn whnf_in(&self, ctx: &TriContext, e: &Expr) -> CResult<Expr> {
        let mut e = e.clone();
        'outer: loop {
            match &e {
                Expr::App(f, a) => {
                    let fw = self.whnf(ctx, f)?;
                    match &fw {
                        Expr::Lam(_, body) => {
                            self.tick()?;
                            e = body.instantiate(a);
                        }
                        Expr::Case(bs) => e = push_case(bs, |b| Expr::app(b.clone(), (**a).clone())),
                        _ => match self.ext_boundary(ctx, &fw, a)? {
                            Some(r) => {
                                self.tick()?;
                                e = r;
                            }
                            None => return Ok(Expr::App(Rc::new(fw), a.clone())),
                        },
                    }
                }
                Expr::First(p) | Expr::Second(p) => {
                    let is_first = matches!(e, Expr::First(_));
                    let pw = self.whnf(ctx, p)?;
                    match &pw {
                        Expr::Pair(a, b) => e = if is_first { (**a).clone() } else { (**b).clone() },
                        Expr::Case(bs) => {
                            e = push_case(bs, |b| if is_first { Expr::first(b.clone()) } else { Expr::second(b.clone()) })
                        }
                        _ => return Ok(if is_first { Expr::First(Rc::new(pw)) } else { Expr::Second(Rc::new(pw)) }),
                    }
                }
                Expr::J(j) => {
                    let pw = self.whnf(ctx, &j.path)?;
                    match &pw {
                        Expr::Refl => {
                            self.tick()?;
                            e = j.refl_case.clone();
                        }
                        Expr::Case(bs) => {
                            e = push_case(bs, |b| Expr::J(Rc::new(JElim { path: b.clone(), ..(**j).clone() })))
                        }
                        _ => return Ok(Expr::J(Rc::new(JElim { path: pw, ..(**j).clone() }))),
                    }
                }
                Expr::Const(c) => match self.globals.get(c).and_then(|g| g.body.clone()) {
                    Some(b) => {
                        self.tick()?;
                        e = b;
                    }
                    None => return Ok(e),
                },
                Expr::Case(bs) => {
                    for (g, b) in bs.iter() {
                        if self.entails(ctx, g)? {
                            e = b.clone();
                            continue 'outer;
                        }
                    }
                    return Ok(e);
                }
                Expr::Ann(x, _) => e = (**x).clone(),
                _ => return Ok(e),
            }
        }
    }

    /// Reduces `f c` to the boundary value when `f` is a neutral element of an
    /// extension type and `c` lies on the boundary.
    fn ext_boundary(&self, ctx: &TriContext, f: &Expr, a: &Expr) -> CResult<Option<Expr>> {
        let Some(c) = to_cube(a) else { return Ok(None) };
        let mut vs = vec![];
        c.vars(&mut vs);
        if vs.iter().any(|&i| !ctx.is_cube_var(i)) {
            return Ok(None);
        }
        let Some(ft) = self.type_of_neutral(ctx, f)? else { return Ok(None) };
        let Expr::Ext(x) = self.whnf(ctx, &ft)? else { return Ok(None) };
        if x.is_unrestricted() {
            return Ok(None);
        }
        if self.entails(ctx, &instantiate_tope(&x.bdry_tope, &c))? {
            Ok(Some(x.bdry.instantiate(a)))
        } else {
            Ok(None)
        }
    }

    /// The type of a neutral term, read off without re-checking arguments.
    fn type_of_neutral(&self, ctx: &TriContext, e: &Expr) -> CResult<Option<Expr>> {
        Ok(match e {
            Expr::Var(i) => ctx.type_of(*i),
            Expr::Const(c) => self.globals.get(c).map(|g| g.ty.clone()),
            Expr::App(f, a) => {
                let Some(ft) = self.type_of_neutral(ctx, f)? else { return Ok(None) };
                match self.whnf(ctx, &ft)? {
                    Expr::Pi(_, _, cod) => Some(cod.instantiate(a)),
                    Expr::Ext(x) if to_cube(a).is_some() => Some(x.family.instantiate(a)),
                    _ => None,
                }
            }
            Expr::First(p) | Expr::Second(p) => {
                let Some(pt) = self.type_of_neutral(ctx, p)? else { return Ok(None) };
                match self.whnf(ctx, &pt)? {
                    Expr::Sigma(_, a, b) => Some(if matches!(e, Expr::First(_)) {
                        (*a).clone()
                    } else {
                        b.instantiate(&first_of(p))
                    }),
                    _ => None,
                }
            }
            Expr::J(j) => Some(Expr::apps(j.motive.clone(), [j.target.clone(), j.path.clone()])),
            Expr::Ann(_, t) => Some((**t).clone()),
            _ => None,
        })
    }

    /// Full normal form, reducing under binders.
    pub fn normalize(&self, ctx: &TriContext, ty: &Expr, e: &Expr) -> CResult<Expr> {
        let _ = ty;
        self.nf(ctx, e)
    }

    fn nf(&self, ctx: &TriContext, e: &Expr) -> CResult<Expr> {
        let w = self.whnf(ctx, e)?;
        let rc = |x: Expr| Rc::new(x);
        Ok(match &w {
            Expr::Lam(n, b) => {
                // The binder's kind is not known here; a typed placeholder is
                // enough because reduction never consults its type.
                Expr::Lam(n.clone(), rc(self.nf(&ctx.push_typed(n.as_str(), Expr::UnitType), b)?))
            }
            Expr::Pi(n, a, b) => {
                Expr::Pi(n.clone(), rc(self.nf(ctx, a)?), rc(self.nf(&ctx.push_typed(n.as_str(), (**a).clone()), b)?))
            }
            Expr::Sigma(n, a, b) => Expr::Sigma(
                n.clone(),
                rc(self.nf(ctx, a)?),
                rc(self.nf(&ctx.push_typed(n.as_str(), (**a).clone()), b)?),
            ),
            Expr::App(f, a) => Expr::App(rc(self.nf(ctx, f)?), rc(self.nf(ctx, a)?)),
            Expr::Pair(a, b) => Expr::Pair(rc(self.nf(ctx, a)?), rc(self.nf(ctx, b)?)),
            Expr::First(a) => Expr::First(rc(self.nf(ctx, a)?)),
            Expr::Second(a) => Expr::Second(rc(self.nf(ctx, a)?)),
            Expr::Id(t, a, b) => Expr::Id(rc(self.nf(ctx, t)?), rc(self.nf(ctx, a)?), rc(self.nf(ctx, b)?)),
            Expr::J(j) => Expr::J(Rc::new(JElim {
                ty: self.nf(ctx, &j.ty)?,
                base: self.nf(ctx, &j.base)?,
                motive: self.nf(ctx, &j.motive)?,
                refl_case: self.nf(ctx, &j.refl_case)?,
                target: self.nf(ctx, &j.target)?,
                path: self.nf(ctx, &j.path)?,
            })),
            _ => w,
        })
    }

    // ---- equality ----

    pub fn equal_types(&self, ctx: &TriContext, a: &Expr, b: &Expr) -> CResult<bool> {
        self.equal(ctx, &Expr::Universe, a, b)
    }

    /// Judgmental equality of `a` and `b` at type `ty`. When the direct
    /// comparison fails, the tope hypotheses are split into disjuncts and
    /// each is tried separately.
    pub fn equal(&self, ctx: &TriContext, ty: &Expr, a: &Expr, b: &Expr) -> CResult<bool> {
        let _depth = self.enter()?;
        stacker::maybe_grow(RED_ZONE, STACK_CHUNK, || self.equal_in(ctx, ty, a, b))
    }

    fn equal_in(&self, ctx: &TriContext, ty: &Expr, a: &Expr, b: &Expr) -> CResult<bool> {
        if a == b || self.equal_core(ctx, ty, a, b)? {
            return Ok(true);
        }
        if self.inconsistent(ctx)? {
            return Ok(true);
        }
        let branches = tope::dnf(&ctx.phi()).map_err(tope_error)?;
        if branches.len() <= 1 {
            return Ok(false);
        }
        for br in branches {
            let c = ctx.with_phi(Tope::conj(br));
            if self.inconsistent(&c)? {
                continue;
            }
            if !self.equal_core(&c, ty, a, b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn equal_core(&self, ctx: &TriContext, ty: &Expr, a: &Expr, b: &Expr) -> CResult<bool> {
        if a == b {
            return Ok(true);
        }
        let tw = self.whnf(ctx, ty)?;
        match &tw {
            Expr::Pi(n, dom, cod) => {
                let inner = ctx.push_typed(n.as_str(), (**dom).clone());
                self.equal(&inner, cod, &apply_fresh(a), &apply_fresh(b))
            }
            Expr::Sigma(_, ta, tb) => {
                let (a1, b1) = (first_of(a), first_of(b));
                Ok(self.equal(ctx, ta, &a1, &b1)? && self.equal(ctx, &tb.instantiate(&a1), &second_of(a), &second_of(b))?)
            }
            Expr::UnitType => Ok(true),
            Expr::Universe => self.equal_types_core(ctx, a, b),
            Expr::Case(bs) => {
                for (g, t) in bs.iter() {
                    if !self.equal(&ctx.assume(g.clone()), t, a, b)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            _ => {
                let aw = self.whnf(ctx, a)?;
                let bw = self.whnf(ctx, b)?;
                if aw == bw {
                    return Ok(true);
                }
                if let Some(r) = self.split_stuck(ctx, &tw, &aw, &bw)? {
                    return Ok(r);
                }
                match (&aw, &bw, &tw) {
                    (Expr::Lam(_, ba), Expr::Lam(_, bb), Expr::Ext(x)) => {
                        let inner = ctx.push_cube(x.name.as_str(), x.cube.clone(), x.shape.clone());
                        self.equal(&inner, &x.family, ba, bb)
                    }
                    (Expr::Lam(..), _, _) | (_, Expr::Lam(..), _) => Ok(false),
                    (Expr::Refl, Expr::Refl, _) => Ok(true),
                    _ => Ok(self.neutral_eq(ctx, &aw, &bw)?.is_some()),
                }
            }
        }
    }

    /// Splits on the guards of a stuck tope case on either side.
    fn split_stuck(&self, ctx: &TriContext, ty: &Expr, a: &Expr, b: &Expr) -> CResult<Option<bool>> {
        let (bs, other, flip) = match (a, b) {
            (Expr::Case(bs), _) => (bs, b, false),
            (_, Expr::Case(bs)) => (bs, a, true),
            _ => return Ok(None),
        };
        for (g, e) in bs.iter() {
            let c = ctx.assume(g.clone());
            let ok = if flip { self.equal(&c, ty, other, e)? } else { self.equal(&c, ty, e, other)? };
            if !ok {
                return Ok(Some(false));
            }
        }
        Ok(Some(true))
    }

    fn equal_types_core(&self, ctx: &TriContext, a: &Expr, b: &Expr) -> CResult<bool> {
        let aw = self.whnf(ctx, a)?;
        let bw = self.whnf(ctx, b)?;
        if aw == bw {
            return Ok(true);
        }
        if let Some(r) = self.split_stuck(ctx, &Expr::Universe, &aw, &bw)? {
            return Ok(r);
        }
        let u = Expr::Universe;
        match (&aw, &bw) {
            (Expr::Pi(n, a1, b1), Expr::Pi(_, a2, b2)) | (Expr::Sigma(n, a1, b1), Expr::Sigma(_, a2, b2))
                if std::mem::discriminant(&aw) == std::mem::discriminant(&bw) =>
            {
                Ok(self.equal(ctx, &u, a1, a2)?
                    && self.equal(&ctx.push_typed(n.as_str(), (**a1).clone()), &u, b1, b2)?)
            }
            (Expr::Id(t1, x1, y1), Expr::Id(t2, x2, y2)) => {
                Ok(self.equal(ctx, &u, t1, t2)? && self.equal(ctx, t1, x1, x2)? && self.equal(ctx, t1, y1, y2)?)
            }
            (Expr::Ext(x1), Expr::Ext(x2)) => self.ext_eq(ctx, x1, x2),
            _ => Ok(self.neutral_eq(ctx, &aw, &bw)?.is_some()),
        }
    }

    fn ext_eq(&self, ctx: &TriContext, x1: &ExtType, x2: &ExtType) -> CResult<bool> {
        if x1.cube != x2.cube {
            return Ok(false);
        }
        let name = x1.name.as_str();
        let free = ctx.push_cube(name, x1.cube.clone(), Tope::Top);
        if !self.tope_equiv(&free, &x1.shape, &x2.shape)? {
            return Ok(false);
        }
        let inner = ctx.push_cube(name, x1.cube.clone(), x1.shape.clone());
        if !self.equal(&inner, &Expr::Universe, &x1.family, &x2.family)? {
            return Ok(false);
        }
        if !self.tope_equiv(&inner, &x1.bdry_tope, &x2.bdry_tope)? {
            return Ok(false);
        }
        self.equal(&inner.assume(x1.bdry_tope.clone()), &x1.family, &x1.bdry, &x2.bdry)
    }

    /// Structural comparison of neutral terms; returns their common type.
    fn neutral_eq(&self, ctx: &TriContext, a: &Expr, b: &Expr) -> CResult<Option<Expr>> {
        match (a, b) {
            (Expr::Var(i), Expr::Var(j)) if i == j => Ok(ctx.type_of(*i)),
            (Expr::Const(c), Expr::Const(d)) if c == d => Ok(self.globals.get(c).map(|g| g.ty.clone())),
            (Expr::Universe, Expr::Universe) | (Expr::UnitType, Expr::UnitType) => Ok(Some(Expr::Universe)),
            (Expr::UnitVal, Expr::UnitVal) => Ok(Some(Expr::UnitType)),
            (Expr::App(f, x), Expr::App(g, y)) => {
                let Some(ft) = self.neutral_eq(ctx, f, g)? else { return Ok(None) };
                match self.whnf(ctx, &ft)? {
                    Expr::Pi(_, dom, cod) => Ok(self.equal(ctx, &dom, x, y)?.then(|| cod.instantiate(x))),
                    Expr::Ext(t) => {
                        let (Some(cx), Some(cy)) = (to_cube(x), to_cube(y)) else { return Ok(None) };
                        let same = tope::eq_under(ctx, &ctx.phi(), &cx, &cy).map_err(tope_error)?;
                        Ok(same.then(|| t.family.instantiate(x)))
                    }
                    _ => Ok(None),
                }
            }
            (Expr::First(p), Expr::First(q)) | (Expr::Second(p), Expr::Second(q))
                if std::mem::discriminant(a) == std::mem::discriminant(b) =>
            {
                let Some(pt) = self.neutral_eq(ctx, p, q)? else { return Ok(None) };
                match self.whnf(ctx, &pt)? {
                    Expr::Sigma(_, ta, tb) => Ok(Some(if matches!(a, Expr::First(_)) {
                        (*ta).clone()
                    } else {
                        tb.instantiate(&first_of(p))
                    })),
                    _ => Ok(None),
                }
            }
            (Expr::J(j1), Expr::J(j2)) => {
                let u = Expr::Universe;
                let motive_ty = Expr::pi(
                    "y",
                    j1.ty.clone(),
                    Expr::pi("p", Expr::id(j1.ty.shift(1), j1.base.shift(1), Expr::Var(0)), Expr::Universe),
                );
                let ok = self.equal(ctx, &u, &j1.ty, &j2.ty)?
                    && self.equal(ctx, &j1.ty, &j1.base, &j2.base)?
                    && self.equal(ctx, &motive_ty, &j1.motive, &j2.motive)?
                    && self.equal(
                        ctx,
                        &Expr::apps(j1.motive.clone(), [j1.base.clone(), Expr::Refl]),
                        &j1.refl_case,
                        &j2.refl_case,
                    )?
                    && self.equal(ctx, &j1.ty, &j1.target, &j2.target)?
                    && self.equal(
                        ctx,
                        &Expr::id(j1.ty.clone(), j1.base.clone(), j1.target.clone()),
                        &j1.path,
                        &j2.path,
                    )?;
                Ok(ok.then(|| Expr::apps(j1.motive.clone(), [j1.target.clone(), j1.path.clone()])))
            }
            _ => Ok(None),
        }
    }
}
