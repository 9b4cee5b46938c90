//! Term generators: arbitrary well-scoped core terms for printing, and a
//! typed fragment with an independent evaluator for the equality checks.

use std::rc::Rc;

use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use sstt::elab::GlobalScope;
use sstt::term::{ExtType, JElim, Name};
use sstt::tope::{Cube, CubeExpr, Shape, Tope};
use sstt::{Expr, TriContext};

// ---- arbitrary terms ----

/// Free variables available to generated terms, outermost first.
pub const OUTER: [&str; 6] = ["a", "b", "c", "p", "q", "r"];
pub const CONSTS: [&str; 2] = ["k", "hom-ish"];

pub struct Consts;

impl GlobalScope for Consts {
    fn has_const(&self, name: &str) -> bool {
        CONSTS.contains(&name)
    }

    fn shape(&self, _: &str) -> Option<&Shape> {
        None
    }
}

pub fn outer_names() -> Vec<String> {
    OUTER.iter().map(|s| s.to_string()).collect()
}

fn hint() -> impl Strategy<Value = Name> {
    prop::sample::select(vec!["x", "y", "t", "f", "a", "_", "s1"]).prop_map(Name::new)
}

fn cube_point() -> impl Strategy<Value = CubeExpr> {
    let leaf = prop_oneof![
        (0..OUTER.len()).prop_map(CubeExpr::Var),
        Just(CubeExpr::Zero),
        Just(CubeExpr::One),
        Just(CubeExpr::Star),
    ];
    leaf.prop_recursive(2, 6, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| CubeExpr::pair(a, b)),
            inner.clone().prop_map(CubeExpr::first),
            inner.prop_map(CubeExpr::second),
        ]
    })
}

pub fn tope() -> impl Strategy<Value = Tope> {
    let leaf = prop_oneof![
        1 => Just(Tope::Top),
        1 => Just(Tope::Bot),
        4 => (cube_point(), cube_point()).prop_map(|(a, b)| Tope::le(a, b)),
        4 => (cube_point(), cube_point()).prop_map(|(a, b)| Tope::eq(a, b)),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Tope::And(Box::new(a), Box::new(b))),
            (inner.clone(), inner).prop_map(|(a, b)| Tope::or(a, b)),
        ]
    })
}

fn cube() -> impl Strategy<Value = Cube> {
    prop_oneof![
        Just(Cube::Unit),
        Just(Cube::Interval),
        Just(Cube::product(Cube::Interval, Cube::Interval)),
        Just(Cube::product(Cube::product(Cube::Interval, Cube::Interval), Cube::Unit)),
    ]
}

/// Terms the surface syntax reads as a cube in binder position.
fn cube_like(e: &Expr) -> bool {
    match e {
        Expr::Point1 => true,
        Expr::Sigma(_, a, b) => !b.occurs(0) && cube_like(a) && cube_like(b),
        _ => false,
    }
}

pub fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        4 => (0..OUTER.len()).prop_map(Expr::Var),
        1 => prop::sample::select(CONSTS.to_vec()).prop_map(Expr::constant),
        1 => Just(Expr::Universe),
        1 => Just(Expr::UnitType),
        1 => Just(Expr::UnitVal),
        1 => Just(Expr::Refl),
        1 => Just(Expr::Point0),
        1 => Just(Expr::Point1),
        1 => Just(Expr::Star),
    ];
    leaf.prop_recursive(5, 48, 6, |e| {
        let bdry = prop_oneof![
            1 => Just(None),
            2 => (tope(), e.clone()).prop_map(Some),
        ];
        prop_oneof![
            3 => (hint(), e.clone(), e.clone())
                .prop_filter("cube-like binder domain", |(_, a, b)| !(b.occurs(0) && cube_like(a)))
                .prop_map(|(n, a, b)| Expr::Pi(n, Rc::new(a), Rc::new(b))),
            3 => (hint(), e.clone()).prop_map(|(n, b)| Expr::Lam(n, Rc::new(b))),
            4 => (e.clone(), e.clone()).prop_map(|(f, a)| Expr::app(f, a)),
            2 => (hint(), e.clone(), e.clone()).prop_map(|(n, a, b)| Expr::Sigma(n, Rc::new(a), Rc::new(b))),
            2 => (e.clone(), e.clone()).prop_map(|(a, b)| Expr::pair(a, b)),
            1 => e.clone().prop_map(Expr::first),
            1 => e.clone().prop_map(Expr::second),
            2 => (e.clone(), e.clone(), e.clone()).prop_map(|(t, a, b)| Expr::id(t, a, b)),
            1 => prop::collection::vec(e.clone(), 6).prop_map(|v| {
                let [ty, base, motive, refl_case, target, path] = <[Expr; 6]>::try_from(v).unwrap();
                Expr::J(Rc::new(JElim { ty, base, motive, refl_case, target, path }))
            }),
            2 => (hint(), cube(), prop_oneof![Just(Tope::Top), tope()], e.clone(), bdry).prop_map(
                |(name, cube, shape, family, b)| {
                    let (bdry_tope, bdry) = b.unwrap_or((Tope::Bot, Expr::case(vec![])));
                    Expr::ext(ExtType { name, cube, shape, family, bdry_tope, bdry })
                }
            ),
            1 => prop::collection::vec((tope(), e.clone()), 0..3).prop_map(Expr::case),
            1 => (e.clone(), e).prop_map(|(a, t)| Expr::ann(a, t)),
        ]
    })
}

// ---- a typed fragment with a reference evaluator ----

/// The fixed context of the equality checks, outermost first:
/// `A : U, a b : A, f : A -> A, g : A -> A -> A,
///  h : <(t : 2) -> A [t === 0 \/ t === 1 |-> recOR(t === 0 |-> a, t === 1 |-> b)]>,
///  x y : 2`.
pub fn fragment_ctx() -> TriContext {
    let a_ty = |shift: usize| Expr::Var(shift);
    let t = || CubeExpr::Var(0);
    let ctx = TriContext::new()
        .push_typed("A", Expr::Universe)
        .push_typed("a", a_ty(0))
        .push_typed("b", a_ty(1))
        .push_typed("f", Expr::pi("_", a_ty(2), a_ty(3)))
        .push_typed("g", Expr::pi("_", a_ty(3), Expr::pi("_", a_ty(4), a_ty(5))));
    let endpoints = Tope::or(Tope::eq(t(), CubeExpr::Zero), Tope::eq(t(), CubeExpr::One));
    let h_ty = Expr::ext(ExtType {
        name: Name::new("t"),
        cube: Cube::Interval,
        shape: Tope::Top,
        family: a_ty(5),
        bdry_tope: endpoints,
        bdry: Expr::case(vec![
            (Tope::eq(t(), CubeExpr::Zero), Expr::Var(4)),
            (Tope::eq(t(), CubeExpr::One), Expr::Var(3)),
        ]),
    });
    ctx.push_typed("h", h_ty).push_cube("x", Cube::Interval, Tope::Top).push_cube("y", Cube::Interval, Tope::Top)
}

/// Context indices at binder depth zero.
const IX_A: usize = 7;
const IX_LA: usize = 6;
const IX_LB: usize = 5;
const IX_F: usize = 4;
const IX_G: usize = 3;
const IX_H: usize = 2;
const IX_X: usize = 1;
const IX_Y: usize = 0;

pub fn a_type(depth: usize) -> Expr {
    Expr::Var(IX_A + depth)
}

/// Values of the fragment: first-order trees over the context constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Val {
    A,
    B,
    F(Box<Val>),
    G(Box<Val>, Box<Val>),
    /// `h` at an interior point of the interval.
    H(u8),
}

/// Interval points as integers in `0..=4`.
pub type Point = u8;

fn cube_val(c: &CubeExpr, depth: usize, x: Point, y: Point) -> Point {
    match c {
        CubeExpr::Zero => 0,
        CubeExpr::One => 4,
        CubeExpr::Var(i) if *i == IX_X + depth => x,
        CubeExpr::Var(i) if *i == IX_Y + depth => y,
        other => panic!("not a fragment point: {other:?}"),
    }
}

pub fn tope_val(t: &Tope, depth: usize, x: Point, y: Point) -> bool {
    match t {
        Tope::Top => true,
        Tope::Bot => false,
        Tope::And(a, b) => tope_val(a, depth, x, y) && tope_val(b, depth, x, y),
        Tope::Or(a, b) => tope_val(a, depth, x, y) || tope_val(b, depth, x, y),
        Tope::Le(a, b) => cube_val(a, depth, x, y) <= cube_val(b, depth, x, y),
        Tope::Eq(a, b) => cube_val(a, depth, x, y) == cube_val(b, depth, x, y),
    }
}

/// Evaluates a fragment term of type `A`; `env` holds the values of the
/// lambda-bound variables, innermost last.
pub fn eval(e: &Expr, env: &mut Vec<Val>, x: Point, y: Point) -> Val {
    let depth = env.len();
    match e {
        Expr::Ann(inner, _) => eval(inner, env, x, y),
        Expr::Var(i) if *i < depth => env[depth - 1 - i].clone(),
        Expr::Var(i) if *i == IX_LA + depth => Val::A,
        Expr::Var(i) if *i == IX_LB + depth => Val::B,
        Expr::App(fun, arg) => match unann(fun) {
            Expr::Lam(_, body) => {
                let v = eval(arg, env, x, y);
                env.push(v);
                let r = eval(body, env, x, y);
                env.pop();
                r
            }
            Expr::Var(i) if *i == IX_F + depth => Val::F(Box::new(eval(arg, env, x, y))),
            Expr::Var(i) if *i == IX_H + depth => {
                let p = sstt::term::to_cube(arg).expect("point argument");
                match cube_val(&p, depth, x, y) {
                    0 => Val::A,
                    4 => Val::B,
                    v => Val::H(v),
                }
            }
            Expr::App(g, a1) if matches!(&**g, Expr::Var(i) if *i == IX_G + depth) => {
                Val::G(Box::new(eval(a1, env, x, y)), Box::new(eval(arg, env, x, y)))
            }
            other => panic!("not a fragment head: {other:?}"),
        },
        Expr::First(p) => match unann(p) {
            Expr::Pair(a, _) => eval(a, env, x, y),
            other => panic!("not a fragment pair: {other:?}"),
        },
        Expr::Second(p) => match unann(p) {
            Expr::Pair(_, b) => eval(b, env, x, y),
            other => panic!("not a fragment pair: {other:?}"),
        },
        Expr::Case(bs) => {
            let (_, b) = bs.iter().find(|(g, _)| tope_val(g, depth, x, y)).expect("case covers the valuation");
            eval(b, env, x, y)
        }
        other => panic!("not a fragment term: {other:?}"),
    }
}

fn unann(e: &Expr) -> &Expr {
    match e {
        Expr::Ann(inner, _) => unann(inner),
        _ => e,
    }
}

/// `\z. body : A -> A` applied to `arg`.
fn redex(depth: usize, body: Expr, arg: Expr) -> Expr {
    let fun = Expr::ann(Expr::lam("z", body), Expr::pi("_", a_type(depth), a_type(depth + 1)));
    Expr::app(fun, arg)
}

/// `(l, r) : A * A`.
fn pair(depth: usize, l: Expr, r: Expr) -> Expr {
    Expr::ann(Expr::pair(l, r), Expr::sigma("_", a_type(depth), a_type(depth + 1)))
}

fn point(rng: &mut ChaCha8Rng, depth: usize) -> Expr {
    match rng.gen_range(0..4) {
        0 => Expr::Point0,
        1 => Expr::Point1,
        2 => Expr::Var(IX_X + depth),
        _ => Expr::Var(IX_Y + depth),
    }
}

/// A random term of type `A` under `depth` lambda-bound variables of type `A`.
pub fn gen_term(rng: &mut ChaCha8Rng, depth: usize, size: u32) -> Expr {
    if size == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..3 + depth.min(2)) {
            0 => Expr::Var(IX_LA + depth),
            1 => Expr::Var(IX_LB + depth),
            2 => Expr::app(Expr::Var(IX_H + depth), point(rng, depth)),
            _ => Expr::Var(rng.gen_range(0..depth)),
        };
    }
    let s = size - 1;
    match rng.gen_range(0..7) {
        0 => Expr::app(Expr::Var(IX_F + depth), gen_term(rng, depth, s)),
        1 => Expr::apps(Expr::Var(IX_G + depth), [gen_term(rng, depth, s / 2), gen_term(rng, depth, s / 2)]),
        2 => redex(depth, gen_term(rng, depth + 1, s), gen_term(rng, depth, s / 2)),
        3 => Expr::first(pair(depth, gen_term(rng, depth, s), gen_term(rng, depth, s / 2))),
        4 => Expr::second(pair(depth, gen_term(rng, depth, s / 2), gen_term(rng, depth, s))),
        5 => {
            let e = gen_term(rng, depth, s);
            variant(rng, &e, depth)
        }
        _ => coherent_case(rng, depth, s),
    }
}

/// A small term whose type can be inferred.
fn inferable(rng: &mut ChaCha8Rng, depth: usize) -> Expr {
    match rng.gen_range(0..4) {
        0 => Expr::Var(IX_LA + depth),
        1 => Expr::Var(IX_LB + depth),
        2 => Expr::app(Expr::Var(IX_H + depth), point(rng, depth)),
        _ => Expr::app(Expr::Var(IX_F + depth), Expr::Var(IX_LA + depth)),
    }
}

/// A term with the same value as `e` at every valuation but a different
/// syntax tree.
pub fn variant(rng: &mut ChaCha8Rng, e: &Expr, depth: usize) -> Expr {
    match rng.gen_range(0..4) {
        0 if rng.gen_bool(0.5) => Expr::app(Expr::lam("w", e.shift(1)), inferable(rng, depth)),
        0 => redex(depth, e.shift(1), gen_term(rng, depth, 1)),
        1 if rng.gen_bool(0.5) => Expr::first(Expr::pair(e.clone(), inferable(rng, depth))),
        1 => Expr::first(pair(depth, e.clone(), gen_term(rng, depth, 1))),
        2 if rng.gen_bool(0.5) => Expr::second(Expr::pair(inferable(rng, depth), e.clone())),
        2 => Expr::second(pair(depth, gen_term(rng, depth, 1), e.clone())),
        _ => {
            let (x, y) = (CubeExpr::Var(IX_X + depth), CubeExpr::Var(IX_Y + depth));
            Expr::case(vec![(Tope::le(x.clone(), y.clone()), e.clone()), (Tope::le(y, x), e.clone())])
        }
    }
}

/// A tope case whose branches agree wherever their guards overlap.
fn coherent_case(rng: &mut ChaCha8Rng, depth: usize, size: u32) -> Expr {
    let (x, y) = (CubeExpr::Var(IX_X + depth), CubeExpr::Var(IX_Y + depth));
    let h = |c: &CubeExpr| Expr::app(Expr::Var(IX_H + depth), sstt::term::from_cube(c));
    let (la, lb) = (Expr::Var(IX_LA + depth), Expr::Var(IX_LB + depth));
    match rng.gen_range(0..3) {
        0 => Expr::case(vec![(Tope::eq(x.clone(), CubeExpr::Zero), la), (Tope::le(x.clone(), CubeExpr::One), h(&x))]),
        1 => Expr::case(vec![
            (Tope::eq(y.clone(), CubeExpr::One), lb),
            (Tope::le(CubeExpr::Zero, y.clone()), h(&y)),
        ]),
        _ => {
            let e = gen_term(rng, depth, size);
            Expr::case(vec![
                (Tope::le(x.clone(), y.clone()), e.clone()),
                (Tope::le(y, x), variant(rng, &e, depth)),
            ])
        }
    }
}

/// A random tope over `x`, `y`, `0` and `1` at binder depth zero.
pub fn gen_hyp(rng: &mut ChaCha8Rng, size: u32) -> Tope {
    let pt = |rng: &mut ChaCha8Rng| match rng.gen_range(0..4) {
        0 => CubeExpr::Zero,
        1 => CubeExpr::One,
        2 => CubeExpr::Var(IX_X),
        _ => CubeExpr::Var(IX_Y),
    };
    if size == 0 || rng.gen_bool(0.4) {
        let (a, b) = (pt(rng), pt(rng));
        return if rng.gen_bool(0.5) { Tope::le(a, b) } else { Tope::eq(a, b) };
    }
    let l = gen_hyp(rng, size - 1);
    let r = gen_hyp(rng, size - 1);
    if rng.gen_bool(0.5) {
        Tope::And(Box::new(l), Box::new(r))
    } else {
        Tope::or(l, r)
    }
}

/// Whether two terms evaluate alike at every valuation satisfying `hyp`.
pub fn oracle_equal(hyp: &Tope, s: &Expr, t: &Expr) -> bool {
    (0..=4u8).all(|x| {
        (0..=4u8).all(|y| !tope_val(hyp, 0, x, y) || eval(s, &mut vec![], x, y) == eval(t, &mut vec![], x, y))
    })
}
