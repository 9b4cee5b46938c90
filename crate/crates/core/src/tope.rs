//! Cubes, topes and the tope entailment decision procedure.
//!
//! Topes are positive formulas (`TOP`, `BOT`, `/\`, `\/`, `<=`, `===`) over
//! points of cubes. Their models are bounded total orders with `0 < 1`, and
//! the truth of a positive formula under a valuation only depends on the weak
//! order the valuation induces on the atoms together with `0` and `1`. So
//! `entails` is complete once it has looked at every weak order:
//!
//! 1. points are normalized to tuples of interval-valued atoms
//!    ([`normalize_cube`]); `===` on products becomes a conjunction of
//!    component equalities, `===` on the unit cube is `TOP`;
//! 2. the hypothesis is expanded into disjunctive normal form (capped at
//!    [`MAX_DISJUNCTS`]);
//! 3. for every disjunct, all weak orders of `{0, 1, atoms}` that satisfy the
//!    disjunct and keep `0 < 1` are enumerated, and the goal is evaluated in
//!    each one. The first falsifying order is returned as a counter-model.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Upper bound on the number of disjuncts produced by DNF expansion.
pub const MAX_DISJUNCTS: usize = 4096;

/// Cube types: `1`, `2` and binary products.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cube {
    Unit,
    Interval,
    Product(Box<Cube>, Box<Cube>),
}

impl Cube {
    pub fn product(a: Cube, b: Cube) -> Cube {
        Cube::Product(Box::new(a), Box::new(b))
    }
}

impl fmt::Display for Cube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cube::Unit => write!(f, "1"),
            Cube::Interval => write!(f, "2"),
            Cube::Product(a, b) => {
                if matches!(**a, Cube::Product(..)) {
                    write!(f, "({}) * {}", a, b)
                } else {
                    write!(f, "{} * {}", a, b)
                }
            }
        }
    }
}

/// Points of cubes. Variables are de Bruijn indices into the enclosing scope.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CubeExpr {
    Var(usize),
    Zero,
    One,
    /// The unique point of the unit cube.
    Star,
    Pair(Box<CubeExpr>, Box<CubeExpr>),
    First(Box<CubeExpr>),
    Second(Box<CubeExpr>),
}

impl CubeExpr {
    pub fn pair(a: CubeExpr, b: CubeExpr) -> CubeExpr {
        CubeExpr::Pair(Box::new(a), Box::new(b))
    }

    pub fn first(a: CubeExpr) -> CubeExpr {
        CubeExpr::First(Box::new(a))
    }

    pub fn second(a: CubeExpr) -> CubeExpr {
        CubeExpr::Second(Box::new(a))
    }

    /// Rebuilds the expression, replacing each variable `Var(i)` found under
    /// `depth` extra binders by `f(i, depth)`.
    pub fn map_vars(&self, depth: usize, f: &mut dyn FnMut(usize, usize) -> CubeExpr) -> CubeExpr {
        match self {
            CubeExpr::Var(i) => f(*i, depth),
            CubeExpr::Zero | CubeExpr::One | CubeExpr::Star => self.clone(),
            CubeExpr::Pair(a, b) => CubeExpr::pair(a.map_vars(depth, f), b.map_vars(depth, f)),
            CubeExpr::First(a) => CubeExpr::first(a.map_vars(depth, f)),
            CubeExpr::Second(a) => CubeExpr::second(a.map_vars(depth, f)),
        }
    }

    pub fn vars(&self, out: &mut Vec<usize>) {
        match self {
            CubeExpr::Var(i) => out.push(*i),
            CubeExpr::Zero | CubeExpr::One | CubeExpr::Star => {}
            CubeExpr::Pair(a, b) => {
                a.vars(out);
                b.vars(out);
            }
            CubeExpr::First(a) | CubeExpr::Second(a) => a.vars(out),
        }
    }
}

/// Tope formulas. There is deliberately no negation, implication or quantifier.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tope {
    Top,
    Bot,
    And(Box<Tope>, Box<Tope>),
    Or(Box<Tope>, Box<Tope>),
    Le(CubeExpr, CubeExpr),
    Eq(CubeExpr, CubeExpr),
}

impl Tope {
    pub fn and(a: Tope, b: Tope) -> Tope {
        match (a, b) {
            (Tope::Top, b) => b,
            (a, Tope::Top) => a,
            (a, b) => Tope::And(Box::new(a), Box::new(b)),
        }
    }

    pub fn or(a: Tope, b: Tope) -> Tope {
        Tope::Or(Box::new(a), Box::new(b))
    }

    pub fn le(a: CubeExpr, b: CubeExpr) -> Tope {
        Tope::Le(a, b)
    }

    pub fn eq(a: CubeExpr, b: CubeExpr) -> Tope {
        Tope::Eq(a, b)
    }

    /// Conjunction of all topes; `TOP` when empty.
    pub fn conj<I: IntoIterator<Item = Tope>>(items: I) -> Tope {
        items.into_iter().fold(Tope::Top, Tope::and)
    }

    /// Disjunction of all topes; `BOT` when empty.
    pub fn disj<I: IntoIterator<Item = Tope>>(items: I) -> Tope {
        let mut items: Vec<Tope> = items.into_iter().collect();
        match items.len() {
            0 => Tope::Bot,
            _ => {
                let mut acc = items.pop().unwrap();
                while let Some(t) = items.pop() {
                    acc = Tope::or(t, acc);
                }
                acc
            }
        }
    }

    pub fn map_vars(&self, depth: usize, f: &mut dyn FnMut(usize, usize) -> CubeExpr) -> Tope {
        match self {
            Tope::Top | Tope::Bot => self.clone(),
            Tope::And(a, b) => Tope::And(Box::new(a.map_vars(depth, f)), Box::new(b.map_vars(depth, f))),
            Tope::Or(a, b) => Tope::Or(Box::new(a.map_vars(depth, f)), Box::new(b.map_vars(depth, f))),
            Tope::Le(a, b) => Tope::Le(a.map_vars(depth, f), b.map_vars(depth, f)),
            Tope::Eq(a, b) => Tope::Eq(a.map_vars(depth, f), b.map_vars(depth, f)),
        }
    }

    pub fn vars(&self, out: &mut Vec<usize>) {
        match self {
            Tope::Top | Tope::Bot => {}
            Tope::And(a, b) | Tope::Or(a, b) => {
                a.vars(out);
                b.vars(out);
            }
            Tope::Le(a, b) | Tope::Eq(a, b) => {
                a.vars(out);
                b.vars(out);
            }
        }
    }

    /// Shifts free variables at or above `cutoff` by `by`.
    pub fn shift(&self, by: isize, cutoff: usize) -> Tope {
        self.map_vars(cutoff, &mut |i, c| {
            if i >= c {
                CubeExpr::Var((i as isize + by) as usize)
            } else {
                CubeExpr::Var(i)
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopeError {
    #[error("cube variable #{0} is out of scope")]
    Scope(usize),
    #[error("`{0}` is not a cube variable")]
    NotCube(String),
    #[error("cube mismatch: expected {expected}, found {found}")]
    CubeMismatch { expected: Cube, found: Cube },
    #[error("projection out of a point of the non-product cube {0}")]
    NotProduct(Cube),
    #[error("tope too large: more than {MAX_DISJUNCTS} disjuncts")]
    TooLarge,
}

/// Resolves cube variables for the solver.
pub trait CubeScope {
    fn cube_of(&self, ix: usize) -> Result<Cube, TopeError>;
    fn name_of(&self, ix: usize) -> String;
}

/// A plain cube context; the last entry is de Bruijn index 0.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CubeCtx {
    pub vars: Vec<(String, Cube)>,
}

impl CubeCtx {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, cube: Cube) -> Self {
        self.vars.push((name.to_string(), cube));
        self
    }

    /// Index of the innermost variable called `name`.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().rev().position(|(n, _)| n == name)
    }

    pub fn var(&self, name: &str) -> CubeExpr {
        CubeExpr::Var(self.index_of(name).unwrap_or_else(|| panic!("unbound cube variable {name}")))
    }
}

impl CubeScope for CubeCtx {
    fn cube_of(&self, ix: usize) -> Result<Cube, TopeError> {
        let n = self.vars.len();
        if ix < n {
            Ok(self.vars[n - 1 - ix].1.clone())
        } else {
            Err(TopeError::Scope(ix))
        }
    }

    fn name_of(&self, ix: usize) -> String {
        let n = self.vars.len();
        if ix < n {
            self.vars[n - 1 - ix].0.clone()
        } else {
            format!("#{ix}")
        }
    }
}

/// Infers the cube of a point.
pub fn infer_cube(scope: &dyn CubeScope, e: &CubeExpr) -> Result<Cube, TopeError> {
    normalize_typed(scope, e).map(|(_, c)| c)
}

/// Tuple normal form: projections pushed through pairs and every variable of
/// product cube eta-expanded, so that the leaves are interval-valued atoms.
pub fn normalize_cube(scope: &dyn CubeScope, e: &CubeExpr) -> Result<CubeExpr, TopeError> {
    normalize_typed(scope, e).map(|(n, _)| n)
}

fn eta(e: CubeExpr, cube: &Cube) -> CubeExpr {
    match cube {
        Cube::Unit => CubeExpr::Star,
        Cube::Interval => e,
        Cube::Product(a, b) => CubeExpr::pair(
            eta(CubeExpr::first(e.clone()), a),
            eta(CubeExpr::second(e), b),
        ),
    }
}

fn normalize_typed(scope: &dyn CubeScope, e: &CubeExpr) -> Result<(CubeExpr, Cube), TopeError> {
    match e {
        CubeExpr::Var(i) => {
            let cube = scope.cube_of(*i)?;
            Ok((eta(e.clone(), &cube), cube))
        }
        CubeExpr::Zero | CubeExpr::One => Ok((e.clone(), Cube::Interval)),
        CubeExpr::Star => Ok((CubeExpr::Star, Cube::Unit)),
        CubeExpr::Pair(a, b) => {
            let (na, ca) = normalize_typed(scope, a)?;
            let (nb, cb) = normalize_typed(scope, b)?;
            Ok((CubeExpr::pair(na, nb), Cube::product(ca, cb)))
        }
        CubeExpr::First(a) | CubeExpr::Second(a) => {
            let (na, ca) = normalize_typed(scope, a)?;
            let is_first = matches!(e, CubeExpr::First(_));
            match (na, ca) {
                (CubeExpr::Pair(x, y), Cube::Product(cx, cy)) => {
                    if is_first {
                        Ok((*x, *cx))
                    } else {
                        Ok((*y, *cy))
                    }
                }
                (_, c) => Err(TopeError::NotProduct(c)),
            }
        }
    }
}

fn leaves(e: &CubeExpr, out: &mut Vec<CubeExpr>) {
    match e {
        CubeExpr::Pair(a, b) => {
            leaves(a, out);
            leaves(b, out);
        }
        CubeExpr::Star => {}
        other => out.push(other.clone()),
    }
}

/// Expands a tope into disjunctive normal form over its atomic formulas.
pub fn dnf(t: &Tope) -> Result<Vec<Vec<Tope>>, TopeError> {
    match t {
        Tope::Top => Ok(vec![vec![]]),
        Tope::Bot => Ok(vec![]),
        Tope::Le(..) | Tope::Eq(..) => Ok(vec![vec![t.clone()]]),
        Tope::Or(a, b) => {
            let mut out = dnf(a)?;
            out.extend(dnf(b)?);
            if out.len() > MAX_DISJUNCTS {
                return Err(TopeError::TooLarge);
            }
            Ok(out)
        }
        Tope::And(a, b) => {
            let da = dnf(a)?;
            let db = dnf(b)?;
            if da.len().saturating_mul(db.len()) > MAX_DISJUNCTS {
                return Err(TopeError::TooLarge);
            }
            let mut out = Vec::with_capacity(da.len() * db.len());
            for x in &da {
                for y in &db {
                    let mut c = x.clone();
                    c.extend(y.iter().cloned());
                    out.push(c);
                }
            }
            Ok(out)
        }
    }
}

const ZERO: usize = 0;
const ONE: usize = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Rel {
    Le,
    Eq,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Lit {
    rel: Rel,
    a: usize,
    b: usize,
}

#[derive(Clone, Debug)]
enum NTope {
    Top,
    Bot,
    And(Vec<NTope>),
    Or(Vec<NTope>),
    Lit(Lit),
}

/// Atoms interned by their normal form; ids 0 and 1 are the endpoints.
#[derive(Default)]
struct Atoms {
    list: Vec<CubeExpr>,
    index: HashMap<CubeExpr, usize>,
}

impl Atoms {
    fn new() -> Self {
        let mut a = Atoms::default();
        a.intern(CubeExpr::Zero);
        a.intern(CubeExpr::One);
        a
    }

    fn intern(&mut self, e: CubeExpr) -> usize {
        if let Some(&i) = self.index.get(&e) {
            return i;
        }
        let i = self.list.len();
        self.list.push(e.clone());
        self.index.insert(e, i);
        i
    }
}

fn normalize_tope(scope: &dyn CubeScope, t: &Tope, atoms: &mut Atoms) -> Result<NTope, TopeError> {
    Ok(match t {
        Tope::Top => NTope::Top,
        Tope::Bot => NTope::Bot,
        Tope::And(a, b) => NTope::And(vec![
            normalize_tope(scope, a, atoms)?,
            normalize_tope(scope, b, atoms)?,
        ]),
        Tope::Or(a, b) => NTope::Or(vec![
            normalize_tope(scope, a, atoms)?,
            normalize_tope(scope, b, atoms)?,
        ]),
        Tope::Le(a, b) => {
            let (na, ca) = normalize_typed(scope, a)?;
            let (nb, cb) = normalize_typed(scope, b)?;
            for c in [ca, cb] {
                if c != Cube::Interval {
                    return Err(TopeError::CubeMismatch { expected: Cube::Interval, found: c });
                }
            }
            NTope::Lit(Lit { rel: Rel::Le, a: atoms.intern(na), b: atoms.intern(nb) })
        }
        Tope::Eq(a, b) => {
            let (na, ca) = normalize_typed(scope, a)?;
            let (nb, cb) = normalize_typed(scope, b)?;
            if ca != cb {
                return Err(TopeError::CubeMismatch { expected: ca, found: cb });
            }
            let (mut la, mut lb) = (vec![], vec![]);
            leaves(&na, &mut la);
            leaves(&nb, &mut lb);
            NTope::And(
                la.into_iter()
                    .zip(lb)
                    .map(|(x, y)| NTope::Lit(Lit { rel: Rel::Eq, a: atoms.intern(x), b: atoms.intern(y) }))
                    .collect(),
            )
        }
    })
}

fn ndnf(t: &NTope) -> Result<Vec<Vec<Lit>>, TopeError> {
    match t {
        NTope::Top => Ok(vec![vec![]]),
        NTope::Bot => Ok(vec![]),
        NTope::Lit(l) => Ok(vec![vec![*l]]),
        NTope::Or(ts) => {
            let mut out = vec![];
            for t in ts {
                out.extend(ndnf(t)?);
                if out.len() > MAX_DISJUNCTS {
                    return Err(TopeError::TooLarge);
                }
            }
            Ok(out)
        }
        NTope::And(ts) => {
            let mut acc: Vec<Vec<Lit>> = vec![vec![]];
            for t in ts {
                let d = ndnf(t)?;
                if acc.len().saturating_mul(d.len()) > MAX_DISJUNCTS {
                    return Err(TopeError::TooLarge);
                }
                let mut next = Vec::with_capacity(acc.len() * d.len());
                for x in &acc {
                    for y in &d {
                        let mut c = x.clone();
                        c.extend(y.iter().copied());
                        next.push(c);
                    }
                }
                acc = next;
            }
            Ok(acc)
        }
    }
}

fn lit_holds(l: &Lit, rank: &[u32]) -> bool {
    match l.rel {
        Rel::Le => rank[l.a] <= rank[l.b],
        Rel::Eq => rank[l.a] == rank[l.b],
    }
}

fn eval(t: &NTope, rank: &[u32]) -> bool {
    match t {
        NTope::Top => true,
        NTope::Bot => false,
        NTope::And(ts) => ts.iter().all(|t| eval(t, rank)),
        NTope::Or(ts) => ts.iter().any(|t| eval(t, rank)),
        NTope::Lit(l) => lit_holds(l, rank),
    }
}

fn collect_atoms(t: &NTope, out: &mut Vec<usize>) {
    match t {
        NTope::Top | NTope::Bot => {}
        NTope::And(ts) | NTope::Or(ts) => ts.iter().for_each(|t| collect_atoms(t, out)),
        NTope::Lit(l) => {
            out.push(l.a);
            out.push(l.b);
        }
    }
}

/// Enumerates weak orders of `order` placed into `blocks` (block 0 holds `0`,
/// the last block holds `1`), pruning with `lits`; returns the first order in
/// which `goal` is false.
struct Search<'a> {
    lits: &'a [Lit],
    goal: &'a NTope,
    order: Vec<usize>,
    n_atoms: usize,
}

impl Search<'_> {
    fn ranks(&self, blocks: &[Vec<usize>]) -> (Vec<u32>, Vec<bool>) {
        let mut rank = vec![0; self.n_atoms];
        let mut placed = vec![false; self.n_atoms];
        for (r, b) in blocks.iter().enumerate() {
            for &a in b {
                rank[a] = r as u32;
                placed[a] = true;
            }
        }
        (rank, placed)
    }

    fn consistent(&self, blocks: &[Vec<usize>]) -> bool {
        let (rank, placed) = self.ranks(blocks);
        self.lits
            .iter()
            .all(|l| !(placed[l.a] && placed[l.b]) || lit_holds(l, &rank))
    }

    fn run(&self, k: usize, blocks: &mut Vec<Vec<usize>>) -> Option<Vec<Vec<usize>>> {
        if k == self.order.len() {
            let (rank, _) = self.ranks(blocks);
            return if eval(self.goal, &rank) { None } else { Some(blocks.clone()) };
        }
        let a = self.order[k];
        for b in 0..blocks.len() {
            blocks[b].push(a);
            if self.consistent(blocks) {
                if let Some(m) = self.run(k + 1, blocks) {
                    blocks[b].pop();
                    return Some(m);
                }
            }
            blocks[b].pop();
        }
        for gap in 1..blocks.len() {
            blocks.insert(gap, vec![a]);
            if self.consistent(blocks) {
                if let Some(m) = self.run(k + 1, blocks) {
                    blocks.remove(gap);
                    return Some(m);
                }
            }
            blocks.remove(gap);
        }
        None
    }
}

/// A weak order of atoms falsifying a sequent, listed from bottom to top.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterModel {
    /// Normalized atoms in each block. Block 0 contains `0`, the last block `1`.
    pub blocks: Vec<Vec<CubeExpr>>,
    /// Display names, parallel to `blocks`.
    pub names: Vec<Vec<String>>,
}

impl CounterModel {
    fn rank_of(&self, atom: &CubeExpr) -> u32 {
        self.blocks
            .iter()
            .position(|b| b.contains(atom))
            .map(|r| r as u32)
            .unwrap_or(0)
    }

    /// Evaluates a tope in this model. Atoms the model does not mention sit
    /// at the bottom.
    pub fn satisfies(&self, scope: &dyn CubeScope, t: &Tope) -> Result<bool, TopeError> {
        let mut atoms = Atoms::new();
        let n = normalize_tope(scope, t, &mut atoms)?;
        let rank: Vec<u32> = atoms.list.iter().map(|a| self.rank_of(a)).collect();
        Ok(eval(&n, &rank))
    }
}

impl fmt::Display for CounterModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let blocks: Vec<String> = self.names.iter().map(|b| b.join(" = ")).collect();
        write!(f, "{}", blocks.join(" < "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Entailment {
    Yes,
    No(CounterModel),
}

impl Entailment {
    pub fn holds(&self) -> bool {
        matches!(self, Entailment::Yes)
    }
}

/// Display name of a normalized interval atom.
pub fn atom_name(scope: &dyn CubeScope, e: &CubeExpr) -> String {
    match e {
        CubeExpr::Zero => "0".into(),
        CubeExpr::One => "1".into(),
        CubeExpr::Star => "*".into(),
        CubeExpr::Var(i) => scope.name_of(*i),
        CubeExpr::First(a) => format!("first {}", atom_name_paren(scope, a)),
        CubeExpr::Second(a) => format!("second {}", atom_name_paren(scope, a)),
        CubeExpr::Pair(a, b) => format!("({}, {})", atom_name(scope, a), atom_name(scope, b)),
    }
}

fn atom_name_paren(scope: &dyn CubeScope, e: &CubeExpr) -> String {
    match e {
        CubeExpr::First(_) | CubeExpr::Second(_) => format!("({})", atom_name(scope, e)),
        _ => atom_name(scope, e),
    }
}

/// Decides `scope | hyp |- goal`.
pub fn entails(scope: &dyn CubeScope, hyp: &Tope, goal: &Tope) -> Result<Entailment, TopeError> {
    let mut atoms = Atoms::new();
    let nh = normalize_tope(scope, hyp, &mut atoms)?;
    let ng = normalize_tope(scope, goal, &mut atoms)?;
    let mut goal_atoms = vec![];
    collect_atoms(&ng, &mut goal_atoms);
    for conj in ndnf(&nh)? {
        let mut order: Vec<usize> = vec![];
        for a in conj.iter().flat_map(|l| [l.a, l.b]).chain(goal_atoms.iter().copied()) {
            if a != ZERO && a != ONE && !order.contains(&a) {
                order.push(a);
            }
        }
        let search = Search { lits: &conj, goal: &ng, order, n_atoms: atoms.list.len() };
        let mut blocks = vec![vec![ZERO], vec![ONE]];
        if !search.consistent(&blocks) {
            continue;
        }
        if let Some(found) = search.run(0, &mut blocks) {
            let blocks: Vec<Vec<CubeExpr>> = found
                .iter()
                .map(|b| b.iter().map(|&a| atoms.list[a].clone()).collect())
                .collect();
            let last = blocks.len() - 1;
            let names = blocks
                .iter()
                .enumerate()
                .map(|(r, b)| {
                    let mut names: Vec<String> = b
                        .iter()
                        .filter(|a| !matches!(a, CubeExpr::Zero | CubeExpr::One))
                        .map(|a| atom_name(scope, a))
                        .collect();
                    if r == 0 {
                        names.insert(0, "0".into());
                    }
                    if r == last {
                        names.push("1".into());
                    }
                    names
                })
                .collect();
            return Ok(Entailment::No(CounterModel { blocks, names }));
        }
    }
    Ok(Entailment::Yes)
}

/// A sequent `cube context | hypotheses |- goal`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sequent {
    pub ctx: CubeCtx,
    pub hyp: Tope,
    pub goal: Tope,
}

impl Sequent {
    pub fn decide(&self) -> Result<Entailment, TopeError> {
        entails(&self.ctx, &self.hyp, &self.goal)
    }
}

/// Strict equality of two points under `hyp`, decided componentwise on the
/// tuple normal forms.
pub fn eq_under(scope: &dyn CubeScope, hyp: &Tope, s: &CubeExpr, t: &CubeExpr) -> Result<bool, TopeError> {
    if s == t {
        infer_cube(scope, s)?;
        return Ok(true);
    }
    entails(scope, hyp, &Tope::eq(s.clone(), t.clone())).map(|e| e.holds())
}

/// A shape `{t : I | phi}`; the constraint mentions only `Var(0)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shape {
    pub cube: Cube,
    pub constraint: Tope,
}

fn t0() -> CubeExpr {
    CubeExpr::Var(0)
}

fn t1() -> CubeExpr {
    CubeExpr::first(CubeExpr::Var(0))
}

fn t2() -> CubeExpr {
    CubeExpr::second(CubeExpr::Var(0))
}

impl Shape {
    pub fn new(cube: Cube, constraint: Tope) -> Self {
        Shape { cube, constraint }
    }

    pub fn delta0() -> Self {
        Shape::new(Cube::Unit, Tope::Top)
    }

    pub fn delta1() -> Self {
        Shape::new(Cube::Interval, Tope::Top)
    }

    pub fn boundary1() -> Self {
        Shape::new(
            Cube::Interval,
            Tope::or(Tope::eq(t0(), CubeExpr::Zero), Tope::eq(t0(), CubeExpr::One)),
        )
    }

    pub fn delta2() -> Self {
        Shape::new(Cube::product(Cube::Interval, Cube::Interval), Tope::le(t2(), t1()))
    }

    /// The three edges of the 2-simplex: `t2 === 0`, `t1 === t2`, `t1 === 1`.
    pub fn boundary2() -> Self {
        let edges = Tope::disj([
            Tope::eq(t2(), CubeExpr::Zero),
            Tope::eq(t1(), t2()),
            Tope::eq(t1(), CubeExpr::One),
        ]);
        Shape::new(Shape::delta2().cube, Tope::and(Shape::delta2().constraint, edges))
    }

    pub fn horn21() -> Self {
        let edges = Tope::or(Tope::eq(t1(), CubeExpr::One), Tope::eq(t2(), CubeExpr::Zero));
        Shape::new(Shape::delta2().cube, Tope::and(Shape::delta2().constraint, edges))
    }

    fn scope(&self) -> CubeCtx {
        CubeCtx::new().with("t", self.cube.clone())
    }
}

/// Whether `sub` is a sub-shape of `sup` (same cube, constraint entailment).
pub fn shape_included(sub: &Shape, sup: &Shape) -> Result<Entailment, TopeError> {
    if sub.cube != sup.cube {
        return Err(TopeError::CubeMismatch { expected: sup.cube.clone(), found: sub.cube.clone() });
    }
    entails(&sub.scope(), &sub.constraint, &sup.constraint)
}

/// Names the leaves of a cube pattern: `t` for a single variable,
/// `t1, t2, ...` for the components of a product.
fn pattern_names(cube: &Cube) -> (String, HashMap<Vec<bool>, String>) {
    fn go(c: &Cube, path: &mut Vec<bool>, counter: &mut usize, map: &mut HashMap<Vec<bool>, String>) -> String {
        match c {
            Cube::Product(a, b) => {
                path.push(true);
                let x = go(a, path, counter, map);
                path.pop();
                path.push(false);
                let y = go(b, path, counter, map);
                path.pop();
                let s = format!("({x},{y})");
                map.insert(path.clone(), s.clone());
                s
            }
            _ => {
                *counter += 1;
                let s = format!("t{counter}");
                map.insert(path.clone(), s.clone());
                s
            }
        }
    }
    let mut map = HashMap::new();
    if !matches!(cube, Cube::Product(..)) {
        map.insert(vec![], "t".to_string());
        return ("t".into(), map);
    }
    let pat = go(cube, &mut vec![], &mut 0, &mut map);
    (pat, map)
}

fn projection_path(e: &CubeExpr) -> Option<Vec<bool>> {
    match e {
        CubeExpr::Var(0) => Some(vec![]),
        CubeExpr::First(a) => projection_path(a).map(|mut p| {
            p.push(true);
            p
        }),
        CubeExpr::Second(a) => projection_path(a).map(|mut p| {
            p.push(false);
            p
        }),
        _ => None,
    }
}

fn unicode_cube(e: &CubeExpr, names: &HashMap<Vec<bool>, String>) -> String {
    if let Some(n) = projection_path(e).and_then(|p| names.get(&p)) {
        return n.clone();
    }
    match e {
        CubeExpr::Zero => "0".into(),
        CubeExpr::One => "1".into(),
        CubeExpr::Star => "*".into(),
        CubeExpr::Var(i) => format!("#{i}"),
        CubeExpr::Pair(a, b) => format!("({},{})", unicode_cube(a, names), unicode_cube(b, names)),
        CubeExpr::First(a) => format!("π₁ {}", unicode_cube(a, names)),
        CubeExpr::Second(a) => format!("π₂ {}", unicode_cube(a, names)),
    }
}

fn unicode_tope(t: &Tope, prec: u8, names: &HashMap<Vec<bool>, String>) -> String {
    let (s, p) = match t {
        Tope::Top => ("⊤".to_string(), 2),
        Tope::Bot => ("⊥".to_string(), 2),
        Tope::Le(a, b) => (format!("{} ≤ {}", unicode_cube(a, names), unicode_cube(b, names)), 2),
        Tope::Eq(a, b) => (format!("{} ≡ {}", unicode_cube(a, names), unicode_cube(b, names)), 2),
        Tope::And(a, b) => (format!("{} ∧ {}", unicode_tope(a, 1, names), unicode_tope(b, 1, names)), 1),
        Tope::Or(a, b) => (format!("{} ∨ {}", unicode_tope(a, 0, names), unicode_tope(b, 0, names)), 0),
    };
    if p < prec {
        format!("({s})")
    } else {
        s
    }
}

fn unicode_cube_type(c: &Cube) -> String {
    match c {
        Cube::Unit => "1".into(),
        Cube::Interval => "2".into(),
        Cube::Product(a, b) => {
            let l = unicode_cube_type(a);
            let l = if matches!(**a, Cube::Product(..)) { format!("({l})") } else { l };
            format!("{}×{}", l, unicode_cube_type(b))
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (pat, names) = pattern_names(&self.cube);
        write!(
            f,
            "{{{} : {} | {}}}",
            pat,
            unicode_cube_type(&self.cube),
            unicode_tope(&self.constraint, 0, &names)
        )
    }
}
