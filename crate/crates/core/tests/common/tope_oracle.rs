//! Brute-force tope semantics over a finite chain of interval points.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use sstt::tope::{entails, Cube, CubeCtx, CubeExpr, Entailment, Tope};

/// Interval points 0, 1/4, 1/2, 3/4, 1 scaled to integers. Five points
/// realize every weak order of three variables strictly between 0 and 1.
const POINTS: [u8; 5] = [0, 1, 2, 3, 4];

pub fn ctx3() -> CubeCtx {
    CubeCtx::new().with("x", Cube::Interval).with("y", Cube::Interval).with("z", Cube::Interval)
}

pub fn terms() -> Vec<CubeExpr> {
    vec![CubeExpr::Zero, CubeExpr::One, CubeExpr::Var(0), CubeExpr::Var(1), CubeExpr::Var(2)]
}

/// Every `<=` and `===` atom between distinct terms, excluding those between
/// two constants. `===` is taken once per unordered pair.
pub fn atoms() -> Vec<Tope> {
    let ts = terms();
    let mut out = vec![];
    for (i, a) in ts.iter().enumerate() {
        for (j, b) in ts.iter().enumerate() {
            if i == j || (i < 2 && j < 2) {
                continue;
            }
            out.push(Tope::le(a.clone(), b.clone()));
            if i < j {
                out.push(Tope::eq(a.clone(), b.clone()));
            }
        }
    }
    out
}

fn value(e: &CubeExpr, val: &[u8; 3]) -> u8 {
    match e {
        CubeExpr::Zero => 0,
        CubeExpr::One => 4,
        CubeExpr::Var(i) => val[*i],
        other => panic!("oracle only handles interval atoms, got {other:?}"),
    }
}

pub fn eval(t: &Tope, val: &[u8; 3]) -> bool {
    match t {
        Tope::Top => true,
        Tope::Bot => false,
        Tope::And(a, b) => eval(a, val) && eval(b, val),
        Tope::Or(a, b) => eval(a, val) || eval(b, val),
        Tope::Le(a, b) => value(a, val) <= value(b, val),
        Tope::Eq(a, b) => value(a, val) == value(b, val),
    }
}

pub fn oracle_entails(hyp: &Tope, goal: &Tope) -> bool {
    for &x in &POINTS {
        for &y in &POINTS {
            for &z in &POINTS {
                let v = [z, y, x];
                if eval(hyp, &v) && !eval(goal, &v) {
                    return false;
                }
            }
        }
    }
    true
}

/// Compares the solver with the oracle on one sequent, validating any
/// counter-model it returns.
pub fn agree(ctx: &CubeCtx, hyp: &Tope, goal: &Tope) -> Result<(), String> {
    let expected = oracle_entails(hyp, goal);
    let got = entails(ctx, hyp, goal).map_err(|e| format!("solver error {e} on {hyp:?} |- {goal:?}"))?;
    match got {
        Entailment::Yes if expected => Ok(()),
        Entailment::No(m) if !expected => {
            let h = m.satisfies(ctx, hyp).map_err(|e| e.to_string())?;
            let g = m.satisfies(ctx, goal).map_err(|e| e.to_string())?;
            if h && !g {
                Ok(())
            } else {
                Err(format!("invalid counter-model {m} for {hyp:?} |- {goal:?}"))
            }
        }
        other => Err(format!("solver says {other:?}, oracle says {expected} for {hyp:?} |- {goal:?}")),
    }
}

pub fn random_tope(rng: &mut ChaCha8Rng, atoms: &[Tope], depth: u32) -> Tope {
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..20) {
            0 => Tope::Top,
            1 => Tope::Bot,
            _ => atoms[rng.gen_range(0..atoms.len())].clone(),
        };
    }
    let a = random_tope(rng, atoms, depth - 1);
    let b = random_tope(rng, atoms, depth - 1);
    if rng.gen_bool(0.5) {
        Tope::And(Box::new(a), Box::new(b))
    } else {
        Tope::or(a, b)
    }
}
