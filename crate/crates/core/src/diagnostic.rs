//! Structured check failures.

use std::fmt;

use serde::Serialize;

use crate::syntax::Span;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureKind {
    ParseError,
    ScopeError,
    MisorderedTelescope,
    TypeMismatch,
    UnsolvedTope,
    BoundaryMismatch,
    UnledgeredPostulate,
    UnprovedDependency,
    FuelExhausted,
    TopeTooLarge,
    IoError,
}

impl FailureKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            FailureKind::ParseError => "parse-error",
            FailureKind::ScopeError => "scope-error",
            FailureKind::MisorderedTelescope => "misordered-telescope",
            FailureKind::TypeMismatch => "type-mismatch",
            FailureKind::UnsolvedTope => "unsolved-tope",
            FailureKind::BoundaryMismatch => "boundary-mismatch",
            FailureKind::UnledgeredPostulate => "unledgered-postulate",
            FailureKind::UnprovedDependency => "unproved-dependency",
            FailureKind::FuelExhausted => "fuel-exhausted",
            FailureKind::TopeTooLarge => "tope-too-large",
            FailureKind::IoError => "io-error",
        }
    }

    pub fn parse(s: &str) -> Option<FailureKind> {
        use FailureKind::*;
        [
            ParseError,
            ScopeError,
            MisorderedTelescope,
            TypeMismatch,
            UnsolvedTope,
            BoundaryMismatch,
            UnledgeredPostulate,
            UnprovedDependency,
            FuelExhausted,
            TopeTooLarge,
            IoError,
        ]
        .into_iter()
        .find(|k| k.as_str() == s)
    }
}

impl fmt::Display for FailureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One failed rule premise, with enough context to print it. Boxed so that
/// `Result<_, Diagnostic>` stays pointer-sized on the checker's hot paths.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Diagnostic(Box<Report>);

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub kind: FailureKind,
    pub message: String,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub file: String,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub decl: String,
    pub span: Option<Span>,
    /// The failing tope sequent, pre-printed.
    pub sequent: Option<String>,
    pub expected: Option<String>,
    pub found: Option<String>,
    /// `name : type` lines for the local context at the failure.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub context: Vec<String>,
}

impl Diagnostic {
    pub fn new(kind: FailureKind, message: impl Into<String>) -> Self {
        Diagnostic(Box::new(Report {
            kind,
            message: message.into(),
            file: String::new(),
            decl: String::new(),
            span: None,
            sequent: None,
            expected: None,
            found: None,
            context: vec![],
        }))
    }

    pub fn with_sides(mut self, expected: String, found: String) -> Self {
        self.expected = Some(expected);
        self.found = Some(found);
        self
    }

    pub fn with_sequent(mut self, sequent: String) -> Self {
        self.sequent = Some(sequent);
        self
    }

    pub fn with_context(mut self, context: Vec<String>) -> Self {
        self.context = context;
        self
    }

    pub fn at(mut self, file: &str, decl: &str, span: Option<Span>) -> Self {
        self.file = file.to_string();
        self.decl = decl.to_string();
        if self.span.is_none() {
            self.span = span;
        }
        self
    }

    /// Multi-line human rendering with a source excerpt when `source` is given.
    pub fn render(&self, source: Option<&str>, color: bool) -> String {
        let (red, bold, reset) = if color { ("\x1b[31m", "\x1b[1m", "\x1b[0m") } else { ("", "", "") };
        let mut out = String::new();
        let loc = match self.span {
            Some(s) => format!("{}:{}:{}", self.file, s.line, s.col),
            None => self.file.clone(),
        };
        out.push_str(&format!("{red}error[{}]{reset}: {bold}{loc}{reset}", self.kind));
        if !self.decl.is_empty() {
            out.push_str(&format!(" in `{}`", self.decl));
        }
        out.push_str(&format!(": {}\n", self.message));
        if let Some(e) = &self.expected {
            out.push_str(&format!("  expected: {e}\n"));
        }
        if let Some(f) = &self.found {
            out.push_str(&format!("     found: {f}\n"));
        }
        if let Some(s) = &self.sequent {
            out.push_str(&format!("   sequent: {s}\n"));
        }
        if !self.context.is_empty() {
            out.push_str("   context:\n");
            for c in &self.context {
                out.push_str(&format!("     {c}\n"));
            }
        }
        if let (Some(src), Some(span)) = (source, self.span) {
            if let Some(line) = src.lines().nth(span.line.saturating_sub(1)) {
                out.push_str(&format!("{:>5} | {}\n", span.line, line));
            }
        }
        out
    }
}

impl std::ops::Deref for Diagnostic {
    type Target = Report;

    fn deref(&self) -> &Report {
        &self.0
    }
}

impl std::ops::DerefMut for Diagnostic {
    fn deref_mut(&mut self) -> &mut Report {
        &mut self.0
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl std::error::Error for Diagnostic {}
