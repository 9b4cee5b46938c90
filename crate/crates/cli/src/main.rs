use std::io::{IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use sstt::corpus::{check_corpus, check_files, CorpusRun, Options};
use sstt::diagnostic::{Diagnostic, FailureKind};
use sstt::elab::elab_sequent;
use sstt::syntax::{parse_sequent, print_tope};
use sstt::tope::{entails, Entailment};
use sstt::Globals;

#[derive(Parser, Debug)]
#[command(name = "sstt", version, about = "Checker for simplicial type theory with extension types")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Emit one JSON document instead of human-readable text.
    #[arg(long, global = true)]
    machine: bool,
    /// Maximum number of unfoldings per declaration.
    #[arg(long, global = true, default_value_t = sstt::check::DEFAULT_FUEL,
          value_parser = clap::value_parser!(u64).range(1..))]
    fuel: u64,
    /// Disable colored output.
    #[arg(long, global = true)]
    no_color: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check source files and everything they import.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Check every source file in a directory and print the manifest.
    Corpus { dir: PathBuf },
    /// Decide a tope sequent such as "x y | x <= y |- x <= 1".
    Tope { sequent: String },
}

const OK: u8 = 0;
const FAILED: u8 = 1;
const USAGE: u8 = 2;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { OK };
            e.print().ok();
            return ExitCode::from(code);
        }
    };
    let color = !cli.no_color && std::env::var_os("NO_COLOR").is_none() && std::io::stdout().is_terminal();
    let opts = Options { fuel: cli.fuel };
    let code = match &cli.command {
        Command::Check { files } => report_run(check_files(files, None, opts), cli.machine, color, false),
        Command::Corpus { dir } => match check_corpus(dir, opts) {
            Ok(run) => report_run(run, cli.machine, color, true),
            Err(d) => report_error(&d, cli.machine),
        },
        Command::Tope { sequent } => tope(sequent, cli.machine),
    };
    ExitCode::from(code)
}

/// Writes to stdout, ignoring failures such as a closed pipe.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn report_error(d: &Diagnostic, machine: bool) -> u8 {
    if machine {
        emit(&format!("{}\n", serde_json::to_string_pretty(&serde_json::json!({ "error": d })).unwrap()));
    } else {
        eprint!("{}", d.render(None, false));
    }
    USAGE
}

fn report_run(run: CorpusRun, machine: bool, color: bool, totals: bool) -> u8 {
    let m = &run.manifest;
    let mut text = String::new();
    if machine {
        text = format!("{}\n", m.to_json());
    } else {
        for d in &m.failures {
            text += &d.render(run.sources.get(&d.file).map(String::as_str), color);
        }
        let t = &m.totals;
        if totals {
            text += &format!(
                "{} files: {} shapes, {} definitions, {} axioms, {} theorems proved, {} theorems stated\n",
                t.files, t.shapes, t.definitions, t.axioms, t.theorems_proved, t.theorems_stated
            );
            for name in &m.unused_ledger_entries {
                text += &format!("warning: ledger entry `{name}` is never postulated\n");
            }
        }
        text += &format!("{} checked, {} failed, {} skipped\n", t.checked, t.failed, t.skipped);
    }
    emit(&text);
    if m.failures.iter().any(|d| d.kind == FailureKind::IoError) {
        USAGE
    } else if m.is_success() {
        OK
    } else {
        FAILED
    }
}

#[derive(Serialize)]
struct TopeReport {
    sequent: String,
    entailed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    counter_model: Option<String>,
}

fn tope(text: &str, machine: bool) -> u8 {
    let parsed = parse_sequent(text).map_err(|e| {
        let mut d = Diagnostic::new(FailureKind::ParseError, e.message.clone());
        d.span = Some(e.span);
        d.file = "sequent".into();
        d
    });
    let globals = Globals::new();
    let result = parsed.and_then(|s| elab_sequent(&globals, &s)).and_then(|(ctx, hyp, goal)| {
        let r = entails(&ctx, &hyp, &goal).map_err(|e| Diagnostic::new(FailureKind::TopeTooLarge, e.to_string()))?;
        let names: Vec<String> = ctx.vars.iter().map(|(n, _)| n.clone()).collect();
        let sequent = format!("{} |- {}", print_tope(&names, &hyp), print_tope(&names, &goal));
        Ok((sequent, r))
    });
    let (sequent, r) = match result {
        Ok(x) => x,
        Err(d) => {
            if machine {
                emit(&format!("{}\n", serde_json::to_string_pretty(&serde_json::json!({ "error": d })).unwrap()));
            } else {
                eprint!("{}", d.render(Some(text), false));
            }
            return USAGE;
        }
    };
    let report = match &r {
        Entailment::Yes => TopeReport { sequent, entailed: true, counter_model: None },
        Entailment::No(m) => TopeReport { sequent, entailed: false, counter_model: Some(m.to_string()) },
    };
    if machine {
        emit(&format!("{}\n", serde_json::to_string_pretty(&report).unwrap()));
    } else if let Some(m) = &report.counter_model {
        emit(&format!("not entailed: {}\ncounter-model: {m}\n", report.sequent));
    } else {
        emit(&format!("entailed: {}\n", report.sequent));
    }
    if report.entailed {
        OK
    } else {
        FAILED
    }
}
