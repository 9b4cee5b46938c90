//! Loading and checking a directory of `.sstt` files.
//!
//! Files are checked in import order; each file sees the declarations of
//! its transitive imports. Postulates must be listed in the ledger file
//! (`axioms.ledger`) of their directory. A declaration that mentions a failed
//! or skipped name is marked skipped rather than failed.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::check::{Globals, LedgerTag, DEFAULT_FUEL};
use crate::context::TriContext;
use crate::diagnostic::{Diagnostic, FailureKind};
use crate::elab::{elab_decl, Elaborated};
use crate::syntax::raw::{DeclKind, SourceModule};
use crate::syntax::parse_module;
use crate::term::Expr;
use crate::Checker;

pub const LEDGER_FILE: &str = "axioms.ledger";
pub const EXTENSION: &str = "sstt";

/// The committed list of admitted postulates: `name<TAB>description` lines,
/// `#` starts a comment.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Ledger {
    entries: BTreeMap<String, String>,
}

impl Ledger {
    pub fn parse(text: &str) -> Ledger {
        let entries = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(|l| match l.split_once('\t') {
                Some((n, d)) => (n.trim().to_string(), d.trim().to_string()),
                None => (l.to_string(), String::new()),
            })
            .collect();
        Ledger { entries }
    }

    /// The ledger of `dir`, empty when there is none.
    pub fn load(dir: &Path) -> std::io::Result<Ledger> {
        match fs::read_to_string(dir.join(LEDGER_FILE)) {
            Ok(t) => Ok(Ledger::parse(&t)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Ledger::default()),
            Err(e) => Err(e),
        }
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn description(&self, name: &str) -> Option<&str> {
        self.entries.get(name).map(String::as_str)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Checked,
    Failed,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeclReport {
    pub name: String,
    pub line: usize,
    /// `None` for shapes.
    pub tag: Option<LedgerTag>,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FileReport {
    pub file: String,
    pub status: Status,
    pub imports: Vec<String>,
    pub decls: Vec<DeclReport>,
    /// First failure in the file.
    pub diagnostic: Option<Diagnostic>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Totals {
    pub files: usize,
    pub shapes: usize,
    pub definitions: usize,
    pub axioms: usize,
    pub theorems_proved: usize,
    pub theorems_stated: usize,
    pub checked: usize,
    pub failed: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomEntry {
    pub name: String,
    pub file: String,
    pub description: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CorpusManifest {
    pub files: Vec<FileReport>,
    pub totals: Totals,
    pub axioms: Vec<AxiomEntry>,
    /// Ledger entries with no matching postulate.
    pub unused_ledger_entries: Vec<String>,
    pub failures: Vec<Diagnostic>,
}

impl CorpusManifest {
    pub fn is_success(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn decl(&self, name: &str) -> Option<&DeclReport> {
        self.files.iter().flat_map(|f| &f.decls).find(|d| d.name == name)
    }

    pub fn with_tag(&self, tag: LedgerTag) -> Vec<&str> {
        self.files
            .iter()
            .flat_map(|f| &f.decls)
            .filter(|d| d.tag == Some(tag) && d.status == Status::Checked)
            .map(|d| d.name.as_str())
            .collect()
    }
}

/// A finished run: the manifest plus everything needed to inspect it.
pub struct CorpusRun {
    pub manifest: CorpusManifest,
    /// Union of every checked declaration.
    pub globals: Globals,
    /// Source text by display name.
    pub sources: BTreeMap<String, String>,
}

#[derive(Clone, Copy, Debug)]
pub struct Options {
    pub fuel: u64,
}

impl Default for Options {
    fn default() -> Self {
        Options { fuel: DEFAULT_FUEL }
    }
}

/// Checks every `.sstt` file in `root`.
pub fn load_and_check_corpus(root: &Path) -> Result<CorpusManifest, Diagnostic> {
    check_corpus(root, Options::default()).map(|r| r.manifest)
}

pub fn check_corpus(root: &Path, opts: Options) -> Result<CorpusRun, Diagnostic> {
    let entries = fs::read_dir(root).map_err(|e| io_diag(&root.display().to_string(), &e))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == EXTENSION) && p.is_file())
        .collect();
    files.sort();
    Ok(check_files(&files, Some(root), opts))
}

fn io_diag(file: &str, e: &std::io::Error) -> Diagnostic {
    let mut d = Diagnostic::new(FailureKind::IoError, e.to_string());
    d.file = file.to_string();
    d
}

struct Loaded {
    display: String,
    dir: PathBuf,
    module: Result<SourceModule, Diagnostic>,
    imports: Vec<PathBuf>,
}

fn resolve_import(dir: &Path, name: &str) -> PathBuf {
    let p = dir.join(name);
    if p.extension().is_some() {
        p
    } else {
        p.with_extension(EXTENSION)
    }
}

fn key(p: &Path) -> PathBuf {
    fs::canonicalize(p).unwrap_or_else(|_| p.to_path_buf())
}

/// Checks the given files and everything they import. Display names are
/// relative to `base` when given.
pub fn check_files(roots: &[PathBuf], base: Option<&Path>, opts: Options) -> CorpusRun {
    let base_key = base.map(key);
    let display = |p: &Path| -> String {
        let k = key(p);
        match &base_key {
            Some(b) => k.strip_prefix(b).map(|r| r.display().to_string()).unwrap_or_else(|_| p.display().to_string()),
            None => p.display().to_string(),
        }
    };

    // Load every reachable file.
    let mut loaded: HashMap<PathBuf, Loaded> = HashMap::new();
    let mut sources = BTreeMap::new();
    let mut queue: Vec<PathBuf> = roots.to_vec();
    while let Some(p) = queue.pop() {
        let k = key(&p);
        if loaded.contains_key(&k) {
            continue;
        }
        let name = display(&p);
        let dir = p.parent().map(Path::to_path_buf).unwrap_or_default();
        let (module, imports) = match fs::read_to_string(&p) {
            Err(e) => (Err(io_diag(&name, &e)), vec![]),
            Ok(text) => {
                sources.insert(name.clone(), text.clone());
                match parse_module(&text) {
                    Err(e) => {
                        let mut d = Diagnostic::new(FailureKind::ParseError, e.message.clone());
                        d.span = Some(e.span);
                        d.file = name.clone();
                        (Err(d), vec![])
                    }
                    Ok(m) => {
                        let imports: Vec<PathBuf> = m.imports.iter().map(|(i, _)| resolve_import(&dir, i)).collect();
                        queue.extend(imports.iter().cloned());
                        (Ok(m), imports)
                    }
                }
            }
        };
        loaded.insert(k, Loaded { display: name, dir, module, imports });
    }

    // Topological order, ties broken by display name.
    let mut keys: Vec<PathBuf> = loaded.keys().cloned().collect();
    keys.sort_by(|a, b| loaded[a].display.cmp(&loaded[b].display));
    let mut order: Vec<PathBuf> = vec![];
    let mut state: HashMap<PathBuf, u8> = HashMap::new();
    let mut cyclic: HashSet<PathBuf> = HashSet::new();
    fn visit(
        k: &PathBuf,
        loaded: &HashMap<PathBuf, Loaded>,
        state: &mut HashMap<PathBuf, u8>,
        order: &mut Vec<PathBuf>,
        cyclic: &mut HashSet<PathBuf>,
        stack: &mut Vec<PathBuf>,
    ) {
        match state.get(k) {
            Some(2) => return,
            Some(1) => {
                if let Some(pos) = stack.iter().position(|s| s == k) {
                    cyclic.extend(stack[pos..].iter().cloned());
                }
                return;
            }
            _ => {}
        }
        state.insert(k.clone(), 1);
        stack.push(k.clone());
        if let Some(l) = loaded.get(k) {
            for i in &l.imports {
                visit(&key(i), loaded, state, order, cyclic, stack);
            }
        }
        stack.pop();
        state.insert(k.clone(), 2);
        order.push(k.clone());
    }
    for k in &keys {
        visit(k, &loaded, &mut state, &mut order, &mut cyclic, &mut vec![]);
    }

    let mut ledgers: HashMap<PathBuf, Result<Ledger, String>> = HashMap::new();
    let mut exported: HashMap<PathBuf, Globals> = HashMap::new();
    let mut unavailable: HashSet<String> = HashSet::new();
    let mut manifest = CorpusManifest::default();
    let mut all = Globals::new();
    let mut used_ledgers: BTreeSet<PathBuf> = BTreeSet::new();

    for k in &order {
        let l = &loaded[k];
        let import_names: Vec<String> = l.imports.iter().map(|p| display(p)).collect();
        let mut report =
            FileReport { file: l.display.clone(), status: Status::Checked, imports: import_names, decls: vec![], diagnostic: None };
        let module = match &l.module {
            Err(d) => {
                report.status = Status::Failed;
                report.diagnostic = Some(d.clone());
                manifest.failures.push(d.clone());
                manifest.files.push(report);
                continue;
            }
            Ok(m) => m,
        };
        if cyclic.contains(k) {
            let d = Diagnostic::new(FailureKind::ScopeError, "import cycle").at(&l.display, "", None);
            report.status = Status::Failed;
            report.diagnostic = Some(d.clone());
            manifest.failures.push(d);
            manifest.files.push(report);
            continue;
        }
        let mut scope = Globals::new();
        let mut missing_import = false;
        for i in &l.imports {
            match exported.get(&key(i)) {
                Some(g) => scope.merge(g),
                None => missing_import = true,
            }
        }
        let ledger = ledgers
            .entry(l.dir.clone())
            .or_insert_with(|| Ledger::load(&l.dir).map_err(|e| e.to_string()))
            .clone();
        used_ledgers.insert(l.dir.clone());

        for raw in &module.decls {
            let tag_guess = match raw.kind {
                DeclKind::Shape => None,
                k => Some(LedgerTag::of(k, raw.body.is_some())),
            };
            let mut dr = DeclReport { name: raw.name.clone(), line: raw.name_span.line, tag: tag_guess, status: Status::Checked };
            let blocked = missing_import || raw.idents().iter().any(|n| unavailable.contains(n));
            if blocked {
                dr.status = Status::Skipped;
                unavailable.insert(raw.name.clone());
                report.decls.push(dr);
                if report.status == Status::Checked {
                    report.status = Status::Skipped;
                }
                continue;
            }
            let result = (|| -> Result<(), Diagnostic> {
                if raw.kind == DeclKind::Postulate {
                    match &ledger {
                        Err(e) => {
                            return Err(Diagnostic::new(FailureKind::IoError, format!("cannot read ledger: {e}")));
                        }
                        Ok(led) if !led.contains(&raw.name) => {
                            let mut d = Diagnostic::new(
                                FailureKind::UnledgeredPostulate,
                                format!("postulate `{}` is not listed in {LEDGER_FILE}", raw.name),
                            );
                            d.span = Some(raw.name_span);
                            return Err(d);
                        }
                        Ok(_) => {}
                    }
                }
                let el = elab_decl(&scope, raw)?;
                if let Elaborated::Decl(d) = &el {
                    if all.get(&d.name).is_some() && scope.get(&d.name).is_none() {
                        // Same name declared in an unrelated file.
                        return Err(Diagnostic::new(
                            FailureKind::ScopeError,
                            format!("`{}` is already declared in another file", d.name),
                        ));
                    }
                }
                scope.add_checked(el, opts.fuel)?;
                Ok(())
            })();
            if let Err(d) = result {
                let d = d.at(&l.display, &raw.name, Some(raw.name_span));
                dr.status = Status::Failed;
                unavailable.insert(raw.name.clone());
                if report.diagnostic.is_none() {
                    report.diagnostic = Some(d.clone());
                }
                report.status = Status::Failed;
                manifest.failures.push(d);
            } else if raw.kind == DeclKind::Postulate {
                let desc = ledger.as_ref().ok().and_then(|led| led.description(&raw.name)).unwrap_or("").to_string();
                manifest.axioms.push(AxiomEntry { name: raw.name.clone(), file: l.display.clone(), description: desc });
            }
            report.decls.push(dr);
        }
        all.merge(&scope);
        exported.insert(k.clone(), scope);
        manifest.files.push(report);
    }

    let declared: HashSet<&str> = manifest.axioms.iter().map(|a| a.name.as_str()).collect();
    let mut unused = BTreeSet::new();
    for dir in &used_ledgers {
        if let Some(Ok(led)) = ledgers.get(dir) {
            for n in led.names() {
                if !declared.contains(n) {
                    unused.insert(n.to_string());
                }
            }
        }
    }
    manifest.unused_ledger_entries = unused.into_iter().collect();
    manifest.totals = totals(&manifest);
    CorpusRun { manifest, globals: all, sources }
}

fn totals(m: &CorpusManifest) -> Totals {
    let mut t = Totals { files: m.files.len(), ..Totals::default() };
    for d in m.files.iter().flat_map(|f| &f.decls) {
        match d.status {
            Status::Checked => t.checked += 1,
            Status::Failed => t.failed += 1,
            Status::Skipped => t.skipped += 1,
        }
        if d.status != Status::Checked {
            continue;
        }
        match d.tag {
            None => t.shapes += 1,
            Some(LedgerTag::Definition) => t.definitions += 1,
            Some(LedgerTag::Axiom) => t.axioms += 1,
            Some(LedgerTag::TheoremProved) => t.theorems_proved += 1,
            Some(LedgerTag::TheoremStated) => t.theorems_stated += 1,
        }
    }
    t
}

/// One hom-typed term and whether both endpoint laws hold for it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundaryLaw {
    /// The declaration, or `decl/param` for a hom-typed parameter.
    pub term: String,
    pub source_ok: bool,
    pub target_ok: bool,
}

/// For every declaration whose type (after its parameters) is `hom A x y`,
/// and every parameter of such a type, checks `f 0 = x` and `f 1 = y`.
pub fn boundary_laws(globals: &Globals, hom: &str) -> Result<Vec<BoundaryLaw>, Diagnostic> {
    let checker = Checker::new(globals);
    let mut out = vec![];
    for d in globals.decls() {
        checker.reset_fuel();
        let mut ctx = TriContext::new();
        let mut ty = d.ty.clone();
        let mut term = Expr::Const(d.name.clone());
        for _ in 0..d.params {
            match checker.whnf(&ctx, &ty)? {
                Expr::Pi(n, a, b) => {
                    ctx = ctx.push_typed(n.as_str(), (*a).clone());
                    let label = format!("{}/{}", d.name, n.as_str());
                    if let Some(law) = hom_law(&checker, &ctx, &a.shift(1), hom, &Expr::Var(0), &label)? {
                        out.push(law);
                    }
                    term = Expr::app(term.shift(1), Expr::Var(0));
                    ty = (*b).clone();
                }
                Expr::Ext(x) => {
                    ctx = ctx.push_cube(x.name.as_str(), x.cube.clone(), x.shape.clone());
                    term = Expr::app(term.shift(1), Expr::Var(0));
                    ty = x.family.clone();
                }
                _ => break,
            }
        }
        if let Some(law) = hom_law(&checker, &ctx, &ty, hom, &term, d.name.as_ref())? {
            out.push(law);
        }
    }
    Ok(out)
}

fn hom_law(
    checker: &Checker,
    ctx: &TriContext,
    ty: &Expr,
    hom: &str,
    term: &Expr,
    label: &str,
) -> Result<Option<BoundaryLaw>, Diagnostic> {
    let (head, args) = ty.spine();
    let is_hom = matches!(head, Expr::Const(c) if &**c == hom) && args.len() == 3;
    if !is_hom {
        return Ok(None);
    }
    let (a, x, y) = (args[0], args[1], args[2]);
    let source_ok = checker.equal(ctx, a, &Expr::app(term.clone(), Expr::Point0), x)?;
    let target_ok = checker.equal(ctx, a, &Expr::app(term.clone(), Expr::Point1), y)?;
    Ok(Some(BoundaryLaw { term: label.to_string(), source_ok, target_ok }))
}
