//! Criterion checks shared by the per-criterion test files and the
//! `acceptance` target. Each returns a short summary or the first failure.
#![allow(dead_code)]

pub mod exprs;
pub mod tope_oracle;

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sstt::tope::{entails, shape_included, Cube, CubeCtx, CubeExpr, Entailment, Shape, Tope};

pub type Outcome = Result<String, String>;

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn tests_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---- criterion 1: tope decisions agree with a brute-force oracle ----

pub const RANDOM_SEQUENTS: usize = 10_000;

pub fn tope_oracle_exhaustive() -> Outcome {
    let ctx = tope_oracle::ctx3();
    let atoms = tope_oracle::atoms();
    let mut hyps = vec![Tope::Top];
    hyps.extend(atoms.iter().cloned());
    let mut goals: Vec<Tope> = atoms.clone();
    for (i, a) in atoms.iter().enumerate() {
        for b in &atoms[i + 1..] {
            hyps.push(Tope::And(Box::new(a.clone()), Box::new(b.clone())));
            goals.push(Tope::And(Box::new(a.clone()), Box::new(b.clone())));
            goals.push(Tope::or(a.clone(), b.clone()));
        }
    }
    let mut n = 0;
    for h in &hyps {
        for g in &goals {
            tope_oracle::agree(&ctx, h, g)?;
            n += 1;
        }
    }
    Ok(format!("{n} sequents over {} atoms", atoms.len()))
}

pub fn tope_oracle_random(seed: u64, count: usize) -> Outcome {
    let ctx = tope_oracle::ctx3();
    let atoms = tope_oracle::atoms();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..count {
        let h = tope_oracle::random_tope(&mut rng, &atoms, 3);
        let g = tope_oracle::random_tope(&mut rng, &atoms, 4);
        tope_oracle::agree(&ctx, &h, &g)?;
    }
    Ok(format!("{count} random sequents"))
}

pub fn criterion_1() -> Outcome {
    let start = Instant::now();
    let a = tope_oracle_exhaustive()?;
    let b = tope_oracle_random(0x5eed, RANDOM_SEQUENTS)?;
    let took = start.elapsed();
    ensure(took < Duration::from_secs(60), || format!("took {took:?}"))?;
    Ok(format!("{a}; {b}; {took:.2?}"))
}

// ---- criterion 2: the tope axioms hold and shape inclusions are decided ----

fn ctx_n(n: usize) -> CubeCtx {
    ["x", "y", "z"][..n].iter().fold(CubeCtx::new(), |c, v| c.with(v, Cube::Interval))
}

fn terms_n(n: usize) -> Vec<CubeExpr> {
    let mut ts = vec![CubeExpr::Zero, CubeExpr::One];
    ts.extend((0..n).map(CubeExpr::Var));
    ts
}

fn must_hold(ctx: &CubeCtx, hyp: Tope, goal: Tope, schema: &str) -> Result<(), String> {
    match entails(ctx, &hyp, &goal).map_err(|e| e.to_string())? {
        Entailment::Yes => Ok(()),
        Entailment::No(m) => Err(format!("{schema}: {hyp:?} |- {goal:?} refuted by {m}")),
    }
}

/// Instances of the axiom schemas, over contexts of one to three variables.
pub fn axiom_schemas() -> Outcome {
    let mut n = 0;
    for size in 1..=3 {
        let ctx = ctx_n(size);
        let ts = terms_n(size);
        let le = |a: &CubeExpr, b: &CubeExpr| Tope::le(a.clone(), b.clone());
        let eq = |a: &CubeExpr, b: &CubeExpr| Tope::eq(a.clone(), b.clone());
        let and = |a: Tope, b: Tope| Tope::And(Box::new(a), Box::new(b));
        must_hold(&ctx, Tope::eq(CubeExpr::Zero, CubeExpr::One), Tope::Bot, "distinct endpoints")?;
        n += 1;
        for s in &ts {
            must_hold(&ctx, Tope::Top, le(s, s), "reflexivity")?;
            must_hold(&ctx, Tope::Top, le(&CubeExpr::Zero, s), "bottom")?;
            must_hold(&ctx, Tope::Top, le(s, &CubeExpr::One), "top")?;
            n += 3;
            for t in &ts {
                must_hold(&ctx, Tope::Top, Tope::or(le(s, t), le(t, s)), "totality")?;
                must_hold(&ctx, and(le(s, t), le(t, s)), eq(s, t), "antisymmetry")?;
                n += 2;
                for u in &ts {
                    must_hold(&ctx, and(le(s, t), le(t, u)), le(s, u), "transitivity")?;
                    must_hold(&ctx, and(eq(s, t), le(s, u)), le(t, u), "congruence")?;
                    must_hold(&ctx, and(eq(s, t), le(u, s)), le(u, t), "congruence")?;
                    n += 3;
                }
            }
        }
    }
    Ok(format!("{n} schema instances"))
}

pub fn shape_inclusions() -> Outcome {
    let yes = [
        ("horn", Shape::horn21(), "boundary", Shape::boundary2()),
        ("boundary", Shape::boundary2(), "simplex", Shape::delta2()),
        ("horn", Shape::horn21(), "simplex", Shape::delta2()),
        ("boundary1", Shape::boundary1(), "delta1", Shape::delta1()),
    ];
    for (a, sa, b, sb) in &yes {
        let r = shape_included(sa, sb).map_err(|e| e.to_string())?;
        ensure(r.holds(), || format!("{a} should be included in {b}: {r:?}"))?;
    }
    let no = [
        ("simplex", Shape::delta2(), "boundary", Shape::boundary2()),
        ("boundary", Shape::boundary2(), "horn", Shape::horn21()),
        ("delta1", Shape::delta1(), "boundary1", Shape::boundary1()),
    ];
    for (a, sa, b, sb) in &no {
        match shape_included(sa, sb).map_err(|e| e.to_string())? {
            Entailment::Yes => return Err(format!("{a} should not be included in {b}")),
            Entailment::No(m) => {
                let scope = CubeCtx::new().with("t", sa.cube.clone());
                let inside = m.satisfies(&scope, &sa.constraint).map_err(|e| e.to_string())?;
                let outside = !m.satisfies(&scope, &sb.constraint).map_err(|e| e.to_string())?;
                ensure(inside && outside, || format!("bad witness {m} for {a} not in {b}"))?;
            }
        }
    }
    Ok(format!("{} inclusions, {} refutations", yes.len(), no.len()))
}

pub fn criterion_2() -> Outcome {
    Ok(format!("{}; {}", axiom_schemas()?, shape_inclusions()?))
}

// ---- criterion 3: the corpus checks and its manifest is as expected ----

use sstt::corpus::{boundary_laws, check_corpus, check_files, CorpusManifest, CorpusRun, Ledger, Options, Status};
use sstt::{FailureKind, LedgerTag};

/// Theorems that must be proved, not merely stated.
pub const MUST_BE_PROVED: &[&str] = &[
    "hom-source",
    "hom-target",
    "comp-id-left",
    "comp-id-right",
    "initial-unique",
    "terminal-unique",
    "colimit-unique",
    "limit-unique",
    "colimit-universal-property",
    "ext-sigma-from-to",
    "ext-sigma-to-from-first",
    "ext-sigma-to-from-second",
    "ext-comp-from-to",
    "ext-comp-to-from-first",
    "ext-comp-to-from-second",
];

pub fn run_corpus(dir: &Path) -> Result<CorpusRun, String> {
    check_corpus(dir, Options::default()).map_err(|d| d.to_string())
}

fn all_decls(m: &CorpusManifest) -> impl Iterator<Item = &sstt::corpus::DeclReport> {
    m.files.iter().flat_map(|f| f.decls.iter())
}

pub fn corpus_checks() -> Outcome {
    let start = Instant::now();
    let run = run_corpus(&corpus_dir())?;
    let took = start.elapsed();
    let m = &run.manifest;
    ensure(m.failures.is_empty(), || format!("failures: {:#?}", m.failures))?;
    ensure(m.is_success(), || "manifest reports failure".into())?;
    ensure(m.totals.failed == 0 && m.totals.skipped == 0, || format!("totals {:?}", m.totals))?;
    ensure(took < Duration::from_secs(10), || format!("corpus took {took:?}"))?;

    let ledger = Ledger::load(&corpus_dir()).map_err(|e| e.to_string())?;
    let mut ledger_names: Vec<&str> = ledger.names().collect();
    let mut axioms: Vec<&str> = m.axioms.iter().map(|a| a.name.as_str()).collect();
    let mut tagged = m.with_tag(LedgerTag::Axiom);
    ledger_names.sort();
    axioms.sort();
    tagged.sort();
    ensure(axioms == ledger_names, || format!("axioms {axioms:?} vs ledger {ledger_names:?}"))?;
    ensure(tagged == ledger_names, || format!("postulates {tagged:?} vs ledger {ledger_names:?}"))?;
    ensure(m.unused_ledger_entries.is_empty(), || format!("unused {:?}", m.unused_ledger_entries))?;
    for a in &m.axioms {
        ensure(!a.description.trim().is_empty(), || format!("axiom {} has no description", a.name))?;
    }

    for name in MUST_BE_PROVED {
        let d = m.decl(name).ok_or_else(|| format!("missing {name}"))?;
        ensure(d.tag == Some(LedgerTag::TheoremProved) && d.status == Status::Checked, || {
            format!("{name} is {:?}/{:?}", d.tag, d.status)
        })?;
    }

    let t = &m.totals;
    let count = |tag| all_decls(m).filter(|d| d.tag == Some(tag)).count();
    ensure(t.files == m.files.len(), || "file total".into())?;
    ensure(t.definitions == count(LedgerTag::Definition), || "definition total".into())?;
    ensure(t.axioms == count(LedgerTag::Axiom), || "axiom total".into())?;
    ensure(t.theorems_proved == count(LedgerTag::TheoremProved), || "proved total".into())?;
    ensure(t.theorems_stated == count(LedgerTag::TheoremStated), || "stated total".into())?;
    ensure(t.checked == all_decls(m).count(), || "checked total".into())?;
    Ok(format!(
        "{} files, {} decls, {} axioms, {} proved, {} stated in {took:.2?}",
        t.files, t.checked, t.axioms, t.theorems_proved, t.theorems_stated
    ))
}

pub fn golden_path() -> PathBuf {
    tests_dir().join("golden/manifest.json")
}

/// Compares the manifest with the committed copy. Set `SSTT_BLESS=1` to
/// rewrite the committed copy instead.
pub fn golden_manifest() -> Outcome {
    let json = run_corpus(&corpus_dir())?.manifest.to_json();
    if std::env::var_os("SSTT_BLESS").is_some() {
        std::fs::write(golden_path(), &json).map_err(|e| e.to_string())?;
        return Ok("golden manifest rewritten".into());
    }
    let golden = std::fs::read_to_string(golden_path()).map_err(|e| format!("{}: {e}", golden_path().display()))?;
    if golden == json {
        return Ok("manifest matches golden copy".into());
    }
    let diff = golden
        .lines()
        .zip(json.lines())
        .enumerate()
        .find(|(_, (a, b))| a != b)
        .map(|(i, (a, b))| format!("line {}: golden `{a}`, got `{b}`", i + 1))
        .unwrap_or_else(|| "lengths differ".into());
    Err(format!("manifest differs from golden copy, {diff}"))
}

fn copy_dir(from: &Path, to: &Path) -> std::io::Result<()> {
    for e in std::fs::read_dir(from)? {
        let e = e?;
        if e.file_type()?.is_file() {
            std::fs::copy(e.path(), to.join(e.file_name()))?;
        }
    }
    Ok(())
}

/// Breaks one boundary in a copy of the corpus; exactly that declaration
/// fails and the declarations depending on it are skipped.
pub fn fault_injection() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    copy_dir(&corpus_dir(), dir.path()).map_err(|e| e.to_string())?;
    let file = dir.path().join("03-segal.sstt");
    let src = std::fs::read_to_string(&file).map_err(|e| e.to_string())?;
    let good = "hom2 A x x y (id-arr A x) f f := \\(t1, t2). f t2";
    ensure(src.contains(good), || "mutation site not found".into())?;
    std::fs::write(&file, src.replace(good, "hom2 A x x y (id-arr A x) f f := \\(t1, t2). f t1"))
        .map_err(|e| e.to_string())?;
    let m = run_corpus(dir.path())?.manifest;
    ensure(!m.is_success(), || "mutated corpus passed".into())?;
    let failed: Vec<&str> =
        all_decls(&m).filter(|d| d.status == Status::Failed).map(|d| d.name.as_str()).collect();
    ensure(failed == ["id-filler-left"], || format!("failed decls {failed:?}"))?;
    ensure(m.failures.len() == 1 && m.failures[0].kind == FailureKind::BoundaryMismatch, || {
        format!("failures {:?}", m.failures)
    })?;
    for dep in ["comp-id-left", "id-is-iso"] {
        let d = m.decl(dep).ok_or_else(|| format!("missing {dep}"))?;
        ensure(d.status == Status::Skipped, || format!("{dep} is {:?}", d.status))?;
    }
    ensure(m.totals.failed == 1 && m.totals.skipped >= 2, || format!("totals {:?}", m.totals))?;
    Ok(format!("1 failure, {} skipped", m.totals.skipped))
}

pub fn empty_corpus() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let m = run_corpus(dir.path())?.manifest;
    ensure(m.is_success() && m.files.is_empty() && m.axioms.is_empty(), || format!("{m:?}"))?;
    Ok("empty corpus is an empty success".into())
}

pub fn criterion_3() -> Outcome {
    Ok(format!("{}; {}; {}; {}", corpus_checks()?, golden_manifest()?, fault_injection()?, empty_corpus()?))
}

// ---- criterion 4: every term of a hom type meets its endpoints ----

pub fn criterion_4() -> Outcome {
    let run = run_corpus(&corpus_dir())?;
    let laws = boundary_laws(&run.globals, "hom").map_err(|d| d.to_string())?;
    ensure(laws.len() >= 10, || format!("only {} hom-typed terms found", laws.len()))?;
    for l in &laws {
        ensure(l.source_ok && l.target_ok, || format!("{l:?}"))?;
    }
    Ok(format!("{} hom-typed terms satisfy both endpoint laws", laws.len()))
}

// ---- criterion 5: ill-formed inputs fail with the expected diagnostic ----

pub fn negative_dir() -> PathBuf {
    tests_dir().join("negative")
}

pub struct NegativeCase {
    pub file: String,
    pub kind: FailureKind,
    pub decl: String,
}

pub fn negative_cases() -> Result<Vec<NegativeCase>, String> {
    let text = std::fs::read_to_string(negative_dir().join("expected.txt")).map_err(|e| e.to_string())?;
    let mut out = vec![];
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let cols: Vec<&str> = line.split_whitespace().collect();
        let [file, kind, decl] = cols[..] else { return Err(format!("bad line `{line}`")) };
        let kind = FailureKind::parse(kind).ok_or_else(|| format!("unknown kind `{kind}`"))?;
        let decl = if decl == "-" { "" } else { decl };
        out.push(NegativeCase { file: file.into(), kind, decl: decl.into() });
    }
    Ok(out)
}

pub fn check_negative(case: &NegativeCase) -> Result<(), String> {
    let path = negative_dir().join(&case.file);
    let run = check_files(&[path], Some(&negative_dir()), Options::default());
    let m = &run.manifest;
    let own: Vec<_> = m.failures.iter().filter(|d| d.file == case.file).collect();
    ensure(!own.is_empty(), || format!("{} was accepted: {:?}", case.file, m.failures))?;
    let d = own[0];
    ensure(d.kind == case.kind && d.decl == case.decl, || {
        format!("{}: expected {} in `{}`, got {} in `{}`: {}", case.file, case.kind, case.decl, d.kind, d.decl, d.message)
    })?;
    ensure(m.failures.len() == 1, || format!("{}: extra failures {:?}", case.file, m.failures))?;
    Ok(())
}

pub fn criterion_5() -> Outcome {
    let cases = negative_cases()?;
    ensure(cases.len() >= 20, || format!("only {} negative cases", cases.len()))?;
    let mut listed: Vec<&str> = cases.iter().map(|c| c.file.as_str()).collect();
    listed.sort();
    let mut on_disk: Vec<String> = std::fs::read_dir(negative_dir())
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok()?.file_name().into_string().ok())
        .filter(|n| n.ends_with(".sstt"))
        .collect();
    on_disk.sort();
    ensure(listed == on_disk, || format!("expected.txt lists {listed:?}, directory has {on_disk:?}"))?;
    let errors: Vec<String> = cases.iter().filter_map(|c| check_negative(c).err()).collect();
    ensure(errors.is_empty(), || errors.join("\n"))?;
    let kinds: std::collections::BTreeSet<_> = cases.iter().map(|c| c.kind).collect();
    Ok(format!("{} rejected inputs covering {} failure kinds", cases.len(), kinds.len()))
}

// ---- criterion 6: kernel properties ----

use sstt::{Checker, Expr, TriContext};

/// Opens the parameters of a global, returning the context, the applied
/// constant and its type.
fn open_decl(checker: &Checker, d: &sstt::check::GlobalDecl) -> Result<(TriContext, Expr, Expr), String> {
    let mut ctx = TriContext::new();
    let mut ty = d.ty.clone();
    let mut term = Expr::Const(d.name.clone());
    for _ in 0..d.params {
        match checker.whnf(&ctx, &ty).map_err(|e| e.to_string())? {
            Expr::Pi(n, a, b) => {
                ctx = ctx.push_typed(n.as_str(), (*a).clone());
                ty = (*b).clone();
            }
            Expr::Ext(x) => {
                ctx = ctx.push_cube(x.name.as_str(), x.cube.clone(), x.shape.clone());
                ty = x.family.clone();
            }
            other => return Err(format!("{}: parameter type {other:?}", d.name)),
        }
        term = Expr::app(term.shift(1), Expr::Var(0));
    }
    Ok((ctx, term, ty))
}

/// Every corpus declaration, applied to its parameters, has its declared
/// type, and so does its weak-head reduct.
pub fn subject_reduction() -> Outcome {
    let run = run_corpus(&corpus_dir())?;
    let checker = Checker::new(&run.globals);
    let mut n = 0;
    for d in run.globals.decls() {
        checker.reset_fuel();
        let (ctx, term, ty) = open_decl(&checker, d)?;
        let err = |e: sstt::Diagnostic| format!("{}: {e}", d.name);
        let inferred = checker.infer(&ctx, &term).map_err(err)?;
        ensure(checker.equal_types(&ctx, &inferred, &ty).map_err(err)?, || format!("{}: inferred type differs", d.name))?;
        let reduct = checker.whnf(&ctx, &term).map_err(err)?;
        checker.check(&ctx, &reduct, &ty).map_err(err)?;
        n += 1;
    }
    Ok(format!("{n} declarations preserve their types under reduction"))
}

pub const GENERATED_TERMS: usize = 1_000;

/// Equality on a generated fragment: agreement with a reference evaluator,
/// the equivalence-relation laws, congruence, typing of reducts, and
/// agreement between a disjunctive hypothesis and its two halves.
pub fn equality_properties(seed: u64, count: usize) -> Outcome {
    use exprs::*;
    let globals = sstt::Globals::new();
    let checker = Checker::new(&globals);
    let base = fragment_ctx();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a_ty = a_type(0);
    let (mut equal_pairs, mut split_cases) = (0, 0);
    for i in 0..count {
        let hyp = if rng.gen_bool(0.3) { Tope::Top } else { gen_hyp(&mut rng, 2) };
        let ctx = base.assume(hyp.clone());
        let s = gen_term(&mut rng, 0, 5);
        let t = if rng.gen_bool(0.6) { variant(&mut rng, &s, 0) } else { gen_term(&mut rng, 0, 5) };
        let u = if rng.gen_bool(0.6) { variant(&mut rng, &t, 0) } else { gen_term(&mut rng, 0, 5) };
        let show = |e: &Expr| checker.show(&ctx, e);
        let fail = |what: &str| format!("sample {i}: {what} under {hyp:?}\n  s = {}\n  t = {}\n  u = {}", show(&s), show(&t), show(&u));
        let eq = |c: &TriContext, ty: &Expr, a: &Expr, b: &Expr| {
            checker.reset_fuel();
            checker.equal(c, ty, a, b).map_err(|e| fail(&e.to_string()))
        };
        for e in [&s, &t, &u] {
            checker.reset_fuel();
            checker.check(&ctx, e, &a_ty).map_err(|d| fail(&format!("ill-typed: {d}")))?;
            let w = checker.whnf(&ctx, e).map_err(|d| fail(&d.to_string()))?;
            checker.check(&ctx, &w, &a_ty).map_err(|d| fail(&format!("reduct ill-typed: {d}")))?;
            ensure(eq(&ctx, &a_ty, e, e)?, || fail("not reflexive"))?;
        }
        let st = eq(&ctx, &a_ty, &s, &t)?;
        let tu = eq(&ctx, &a_ty, &t, &u)?;
        let su = eq(&ctx, &a_ty, &s, &u)?;
        ensure(st == oracle_equal(&hyp, &s, &t), || fail(&format!("s = t decided {st}")))?;
        ensure(tu == oracle_equal(&hyp, &t, &u), || fail(&format!("t = u decided {tu}")))?;
        ensure(st == eq(&ctx, &a_ty, &t, &s)?, || fail("not symmetric"))?;
        ensure(!(st && tu) || su, || fail("not transitive"))?;
        if st {
            equal_pairs += 1;
            let f = Expr::Var(4);
            let g = Expr::Var(3);
            ensure(eq(&ctx, &a_ty, &Expr::app(f.clone(), s.clone()), &Expr::app(f, t.clone()))?, || fail("f s /= f t"))?;
            let gs = Expr::apps(g.clone(), [s.clone(), u.clone()]);
            let gt = Expr::apps(g.clone(), [t.clone(), u.clone()]);
            ensure(eq(&ctx, &a_ty, &gs, &gt)?, || fail("g s u /= g t u"))?;
            let prod = Expr::sigma("_", a_ty.clone(), a_type(1));
            let ps = Expr::pair(s.clone(), u.clone());
            let pt = Expr::pair(t.clone(), u.clone());
            ensure(eq(&ctx, &prod, &ps, &pt)?, || fail("(s, u) /= (t, u)"))?;
            let fun = Expr::pi("_", a_ty.clone(), a_type(1));
            let ls = Expr::lam("z", Expr::apps(g.shift(1), [Expr::Var(0), s.shift(1)]));
            let lt = Expr::lam("z", Expr::apps(g.shift(1), [Expr::Var(0), t.shift(1)]));
            ensure(eq(&ctx, &fun, &ls, &lt)?, || fail("\\z. g z s /= \\z. g z t"))?;
        }
        let (h1, h2) = (gen_hyp(&mut rng, 1), gen_hyp(&mut rng, 1));
        let whole = eq(&base.assume(Tope::or(h1.clone(), h2.clone())), &a_ty, &s, &t)?;
        let parts = eq(&base.assume(h1), &a_ty, &s, &t)? && eq(&base.assume(h2), &a_ty, &s, &t)?;
        ensure(whole == parts, || fail(&format!("split disagrees: whole {whole}, parts {parts}")))?;
        split_cases += 1;
    }
    Ok(format!("{count} generated triples, {equal_pairs} equal pairs, {split_cases} split checks"))
}

pub fn determinism() -> Outcome {
    let a = run_corpus(&corpus_dir())?.manifest.to_json();
    let b = run_corpus(&corpus_dir())?.manifest.to_json();
    ensure(a == b, || "two runs produced different manifests".into())?;
    Ok(format!("identical {}-byte manifests", a.len()))
}

pub fn criterion_6() -> Outcome {
    Ok(format!(
        "{}; {}; {}",
        subject_reduction()?,
        equality_properties(0xC0FFEE, GENERATED_TERMS)?,
        determinism()?
    ))
}

// ---- criterion 7: printing and re-reading a term gives the same term ----

pub const ROUND_TRIP_CASES: u32 = 10_000;

pub fn round_trip_one(e: &Expr) -> Result<(), String> {
    let names = exprs::outer_names();
    let text = sstt::syntax::print_expr(&names, e);
    let raw = sstt::syntax::parse_expr(&text).map_err(|p| format!("`{text}` does not parse: {}", p.message))?;
    let back = sstt::elab::elab_expr(&exprs::Consts, &names, &raw).map_err(|d| format!("`{text}`: {d}"))?;
    ensure(&back == e, || format!("`{text}` reads back as `{}`\n{e:?}\n{back:?}", sstt::syntax::print_expr(&names, &back)))
}

pub fn round_trip(cases: u32) -> Outcome {
    use proptest::test_runner::{Config, TestCaseError, TestRunner};
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    let mut runner = TestRunner::new_with_rng(config, proptest::test_runner::TestRng::deterministic_rng(config_algorithm()));
    runner
        .run(&exprs::expr(), |e| round_trip_one(&e).map_err(TestCaseError::fail))
        .map_err(|e| e.to_string())?;
    Ok(format!("{cases} generated terms print and re-read identically"))
}

fn config_algorithm() -> proptest::test_runner::RngAlgorithm {
    proptest::test_runner::RngAlgorithm::ChaCha
}

pub fn criterion_7() -> Outcome {
    round_trip(ROUND_TRIP_CASES)
}
