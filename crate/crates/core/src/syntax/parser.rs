use std::collections::{BTreeSet, HashMap};
use std::fmt;

use super::lexer::{lex, Tok, Token};
use super::raw::*;
use super::Span;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub span: Span,
    pub expected: Vec<String>,
    pub found: String,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.span.line, self.span.col, self.message)
    }
}

impl std::error::Error for ParseError {}

const KEYWORDS: &[&str] = &[
    "def", "postulate", "thm", "shape", "import", "U", "Unit", "unit", "refl", "first", "second", "idJ", "recOR",
    "recBOT", "Sigma", "TOP", "BOT", "star",
];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

enum Fail {
    Soft,
    Hard(ParseError),
}

type PResult<T> = Result<T, Fail>;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    furthest: usize,
    expected: BTreeSet<String>,
}

impl Parser {
    fn new(src: &str) -> Result<Self, ParseError> {
        let toks = lex(src).map_err(|e| ParseError {
            span: e.span,
            expected: vec![],
            found: String::new(),
            message: e.message,
        })?;
        Ok(Parser { toks, pos: 0, furthest: 0, expected: BTreeSet::new() })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn here(&self) -> Span {
        self.toks[self.pos].span
    }

    /// Span from `start` to the end of the last consumed token.
    fn close(&self, start: Span) -> Span {
        let end = if self.pos == 0 { start.end } else { self.toks[self.pos - 1].span.end };
        Span { end: end.max(start.start), ..start }
    }

    fn bump(&mut self) -> Span {
        let s = self.here();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        s
    }

    fn fail<T>(&mut self, what: &str) -> PResult<T> {
        if self.pos > self.furthest {
            self.furthest = self.pos;
            self.expected.clear();
        }
        if self.pos == self.furthest {
            self.expected.insert(what.to_string());
        }
        Err(Fail::Soft)
    }

    fn hard<T>(&self, span: Span, message: String) -> PResult<T> {
        Err(Fail::Hard(ParseError { span, expected: vec![], found: String::new(), message }))
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == s)
    }

    fn sym(&mut self, s: &str) -> PResult<Span> {
        if self.is_sym(s) {
            Ok(self.bump())
        } else {
            self.fail(&format!("`{s}`"))
        }
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            self.fail::<()>(&format!("`{s}`")).ok();
            false
        }
    }

    fn ident(&mut self) -> PResult<(String, Span)> {
        match self.peek().clone() {
            Tok::Ident(x) if !is_keyword(&x) => Ok((x, self.bump())),
            _ => self.fail("identifier"),
        }
    }

    fn attempt<T>(&mut self, f: impl FnOnce(&mut Self) -> PResult<T>) -> PResult<Option<T>> {
        let save = self.pos;
        match f(self) {
            Ok(v) => Ok(Some(v)),
            Err(Fail::Soft) => {
                self.pos = save;
                Ok(None)
            }
            Err(h) => Err(h),
        }
    }

    fn finish<T>(&mut self, r: PResult<T>) -> Result<T, ParseError> {
        match r {
            Ok(v) => Ok(v),
            Err(Fail::Hard(e)) => Err(e),
            Err(Fail::Soft) => {
                let tok = &self.toks[self.furthest];
                let expected: Vec<String> = self.expected.iter().cloned().collect();
                let found = tok.tok.describe();
                Err(ParseError {
                    span: tok.span,
                    message: format!("expected {}, found {}", expected.join(" or "), found),
                    expected,
                    found,
                })
            }
        }
    }

    fn eof(&mut self) -> PResult<()> {
        if matches!(self.peek(), Tok::Eof) {
            Ok(())
        } else {
            self.fail("end of input")
        }
    }

    // ---- declarations ----

    fn module(&mut self) -> PResult<SourceModule> {
        let mut imports = vec![];
        while self.is_kw("import") {
            self.bump();
            match self.peek().clone() {
                Tok::Str(s) => {
                    let sp = self.bump();
                    imports.push((s, sp));
                }
                _ => return self.fail("quoted file name"),
            }
        }
        let mut decls: Vec<RawDecl> = vec![];
        let mut seen: HashMap<String, Span> = HashMap::new();
        while !matches!(self.peek(), Tok::Eof) {
            let d = self.decl()?;
            if let Some(prev) = seen.get(&d.name) {
                return self.hard(
                    d.name_span,
                    format!("duplicate declaration `{}` (first declared at line {})", d.name, prev.line),
                );
            }
            seen.insert(d.name.clone(), d.name_span);
            decls.push(d);
        }
        Ok(SourceModule { imports, decls })
    }

    fn decl(&mut self) -> PResult<RawDecl> {
        let start = self.here();
        let kind = match self.peek() {
            Tok::Ident(k) if k == "shape" => DeclKind::Shape,
            Tok::Ident(k) if k == "def" => DeclKind::Def,
            Tok::Ident(k) if k == "postulate" => DeclKind::Postulate,
            Tok::Ident(k) if k == "thm" => DeclKind::Thm,
            _ => {
                for k in ["`def`", "`postulate`", "`thm`", "`shape`"] {
                    self.fail::<()>(k).ok();
                }
                return Err(Fail::Soft);
            }
        };
        self.bump();
        let (name, name_span) = self.ident()?;
        if kind == DeclKind::Shape {
            self.sym(":=")?;
            self.sym("{")?;
            let pat = self.pattern()?;
            self.sym(":")?;
            let cube = self.prod_level()?;
            let tope = if self.eat_sym("|") { self.tope()? } else { RawTope::Top };
            self.sym("}")?;
            return Ok(RawDecl {
                kind,
                name,
                name_span,
                params: vec![],
                ty: None,
                body: None,
                shape: Some(RawShape { pat, cube, tope }),
                span: self.close(start),
            });
        }
        let mut params = vec![];
        while self.is_sym("(") {
            params.push(self.binder()?);
        }
        self.sym(":")?;
        let ty = self.expr()?;
        let body = match kind {
            DeclKind::Def => {
                self.sym(":=")?;
                Some(self.expr()?)
            }
            DeclKind::Thm if self.eat_sym(":=") => Some(self.expr()?),
            _ => None,
        };
        Ok(RawDecl { kind, name, name_span, params, ty: Some(ty), body, shape: None, span: self.close(start) })
    }

    fn pattern(&mut self) -> PResult<Pattern> {
        if self.is_sym("(") {
            self.bump();
            let a = self.pattern()?;
            self.sym(",")?;
            let b = self.pattern()?;
            self.sym(")")?;
            Ok(Pattern::Pair(Box::new(a), Box::new(b)))
        } else {
            let (n, s) = self.ident()?;
            Ok(Pattern::Name(n, s))
        }
    }

    fn binder(&mut self) -> PResult<RawBinder> {
        let start = self.sym("(")?;
        let mut pats = vec![self.pattern()?];
        while !self.is_sym(":") {
            pats.push(self.pattern()?);
        }
        self.sym(":")?;
        let ty = self.expr()?;
        let tope = if self.eat_sym("|") { Some(self.tope()?) } else { None };
        self.sym(")")?;
        Ok(RawBinder { pats, ty, tope, span: self.close(start) })
    }

    // ---- expressions ----

    fn expr(&mut self) -> PResult<Raw> {
        let start = self.here();
        if self.is_sym("\\") {
            self.bump();
            let mut pats = vec![self.pattern()?];
            while !self.is_sym(".") {
                pats.push(self.pattern()?);
            }
            self.sym(".")?;
            let body = self.expr()?;
            return Ok(Raw { kind: RawKind::Lam(pats, Box::new(body)), span: self.close(start) });
        }
        if self.is_kw("Sigma") {
            self.bump();
            self.sym("(")?;
            let pat = self.pattern()?;
            self.sym(":")?;
            let a = self.expr()?;
            self.sym(")")?;
            self.sym(",")?;
            let b = self.expr()?;
            return Ok(Raw { kind: RawKind::Sigma(pat, Box::new(a), Box::new(b)), span: self.close(start) });
        }
        if self.is_sym("(") {
            let pi = self.attempt(|p| {
                let mut bs = vec![p.binder()?];
                while p.is_sym("(") {
                    bs.push(p.binder()?);
                }
                p.sym("->")?;
                Ok(bs)
            })?;
            if let Some(bs) = pi {
                let body = self.expr()?;
                return Ok(Raw { kind: RawKind::Pi(bs, Box::new(body)), span: self.close(start) });
            }
        }
        let lhs = self.eq_level()?;
        if self.eat_sym("->") {
            let rhs = self.expr()?;
            return Ok(Raw { kind: RawKind::Arrow(Box::new(lhs), Box::new(rhs)), span: self.close(start) });
        }
        Ok(lhs)
    }

    fn eq_level(&mut self) -> PResult<Raw> {
        let start = self.here();
        let lhs = self.prod_level()?;
        if self.eat_sym("=_{") {
            let ty = self.expr()?;
            self.sym("}")?;
            let rhs = self.prod_level()?;
            return Ok(Raw { kind: RawKind::Id(Box::new(ty), Box::new(lhs), Box::new(rhs)), span: self.close(start) });
        }
        Ok(lhs)
    }

    fn prod_level(&mut self) -> PResult<Raw> {
        let start = self.here();
        let lhs = self.app_level()?;
        if self.eat_sym("*") {
            let rhs = self.prod_level()?;
            return Ok(Raw { kind: RawKind::Prod(Box::new(lhs), Box::new(rhs)), span: self.close(start) });
        }
        Ok(lhs)
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Tok::Ident(x) => {
                !is_keyword(x) || matches!(x.as_str(), "U" | "Unit" | "unit" | "refl" | "recBOT" | "star" | "idJ" | "recOR")
            }
            Tok::Num(_) => true,
            Tok::Sym(s) => matches!(*s, "(" | "<"),
            _ => false,
        }
    }

    fn app_level(&mut self) -> PResult<Raw> {
        let start = self.here();
        let mut head = if self.is_kw("first") || self.is_kw("second") {
            let first = self.is_kw("first");
            self.bump();
            let arg = self.atom()?;
            let kind = if first { RawKind::First(Box::new(arg)) } else { RawKind::Second(Box::new(arg)) };
            Raw { kind, span: self.close(start) }
        } else {
            self.atom()?
        };
        while self.starts_atom() {
            let arg = self.atom()?;
            head = Raw { kind: RawKind::App(Box::new(head), Box::new(arg)), span: self.close(start) };
        }
        for k in ["identifier", "`(`"] {
            self.fail::<()>(k).ok();
        }
        Ok(head)
    }

    fn atom(&mut self) -> PResult<Raw> {
        let start = self.here();
        let simple = |kind| Ok(Raw { kind, span: start });
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                simple(RawKind::Num(n))
            }
            Tok::Ident(x) if !is_keyword(&x) => {
                self.bump();
                simple(RawKind::Var(x))
            }
            Tok::Ident(x) => match x.as_str() {
                "U" | "Unit" | "unit" | "refl" | "recBOT" | "star" => {
                    self.bump();
                    simple(match x.as_str() {
                        "U" => RawKind::Universe,
                        "Unit" => RawKind::UnitType,
                        "unit" => RawKind::UnitVal,
                        "refl" => RawKind::Refl,
                        "star" => RawKind::Star,
                        _ => RawKind::Case(vec![]),
                    })
                }
                "idJ" => {
                    self.bump();
                    self.sym("(")?;
                    let mut args = vec![self.expr()?];
                    for _ in 0..5 {
                        self.sym(",")?;
                        args.push(self.expr()?);
                    }
                    self.sym(")")?;
                    Ok(Raw { kind: RawKind::J(args), span: self.close(start) })
                }
                "recOR" => {
                    self.bump();
                    self.sym("(")?;
                    let mut branches = vec![];
                    loop {
                        let t = self.tope()?;
                        self.sym("|->")?;
                        let e = self.expr()?;
                        branches.push((t, e));
                        if !self.eat_sym(",") {
                            break;
                        }
                    }
                    self.sym(")")?;
                    Ok(Raw { kind: RawKind::Case(branches), span: self.close(start) })
                }
                _ => self.fail("expression"),
            },
            Tok::Sym("(") => {
                self.bump();
                let e = self.expr()?;
                if self.eat_sym(",") {
                    let b = self.expr()?;
                    self.sym(")")?;
                    return Ok(Raw { kind: RawKind::Pair(Box::new(e), Box::new(b)), span: self.close(start) });
                }
                if self.eat_sym(":") {
                    let t = self.expr()?;
                    self.sym(")")?;
                    return Ok(Raw { kind: RawKind::Ann(Box::new(e), Box::new(t)), span: self.close(start) });
                }
                self.sym(")")?;
                Ok(Raw { kind: e.kind, span: self.close(start) })
            }
            Tok::Sym("<") => {
                self.bump();
                let b = self.binder()?;
                self.sym("->")?;
                let fam = self.expr()?;
                let bdry = if self.eat_sym("[") {
                    let t = self.tope()?;
                    self.sym("|->")?;
                    let e = self.expr()?;
                    self.sym("]")?;
                    Some((t, Box::new(e)))
                } else {
                    None
                };
                self.sym(">")?;
                Ok(Raw { kind: RawKind::Ext(Box::new(b), Box::new(fam), bdry), span: self.close(start) })
            }
            _ => self.fail("expression"),
        }
    }

    // ---- topes ----

    fn tope(&mut self) -> PResult<RawTope> {
        let mut t = self.tope_conj()?;
        while self.eat_sym("\\/") {
            let r = self.tope_conj()?;
            t = RawTope::Or(Box::new(t), Box::new(r));
        }
        Ok(t)
    }

    fn tope_conj(&mut self) -> PResult<RawTope> {
        let mut t = self.tope_atom()?;
        while self.eat_sym("/\\") {
            let r = self.tope_atom()?;
            t = RawTope::And(Box::new(t), Box::new(r));
        }
        Ok(t)
    }

    fn tope_atom(&mut self) -> PResult<RawTope> {
        if self.is_kw("TOP") {
            self.bump();
            return Ok(RawTope::Top);
        }
        if self.is_kw("BOT") {
            self.bump();
            return Ok(RawTope::Bot);
        }
        if let Tok::Ident(x) = self.peek().clone() {
            if !is_keyword(&x) && matches!(self.peek_at(1), Tok::Sym("(")) {
                let sp = self.bump();
                self.bump();
                let c = self.cube()?;
                self.sym(")")?;
                return Ok(RawTope::Shape(x, sp, c));
            }
        }
        if self.is_sym("(") {
            let inner = self.attempt(|p| {
                p.bump();
                let t = p.tope()?;
                p.sym(")")?;
                Ok(t)
            })?;
            if let Some(t) = inner {
                return Ok(t);
            }
        }
        let a = self.cube()?;
        if self.eat_sym("<=") {
            Ok(RawTope::Le(a, self.cube()?))
        } else if self.eat_sym("===") {
            Ok(RawTope::Eq(a, self.cube()?))
        } else {
            Err(Fail::Soft)
        }
    }

    fn cube(&mut self) -> PResult<RawCube> {
        if self.is_kw("first") {
            self.bump();
            return Ok(RawCube::First(Box::new(self.cube_atom()?)));
        }
        if self.is_kw("second") {
            self.bump();
            return Ok(RawCube::Second(Box::new(self.cube_atom()?)));
        }
        self.cube_atom()
    }

    fn cube_atom(&mut self) -> PResult<RawCube> {
        match self.peek().clone() {
            Tok::Num(0) => {
                self.bump();
                Ok(RawCube::Zero)
            }
            Tok::Num(1) => {
                self.bump();
                Ok(RawCube::One)
            }
            Tok::Ident(x) if x == "star" => {
                self.bump();
                Ok(RawCube::Star)
            }
            Tok::Ident(x) if !is_keyword(&x) => {
                let sp = self.bump();
                Ok(RawCube::Var(x, sp))
            }
            Tok::Sym("(") => {
                self.bump();
                let a = self.cube()?;
                if self.eat_sym(",") {
                    let b = self.cube()?;
                    self.sym(")")?;
                    Ok(RawCube::Pair(Box::new(a), Box::new(b)))
                } else {
                    self.sym(")")?;
                    Ok(a)
                }
            }
            _ => self.fail("cube point"),
        }
    }
}

pub fn parse_module(src: &str) -> Result<SourceModule, ParseError> {
    let mut p = Parser::new(src)?;
    let r = p.module();
    p.finish(r)
}

pub fn parse_expr(src: &str) -> Result<Raw, ParseError> {
    let mut p = Parser::new(src)?;
    let r = p.expr().and_then(|e| p.eof().map(|_| e));
    p.finish(r)
}

pub fn parse_tope_text(src: &str) -> Result<RawTope, ParseError> {
    let mut p = Parser::new(src)?;
    let r = p.tope().and_then(|t| p.eof().map(|_| t));
    p.finish(r)
}

/// A tope sequent `x y, p : 2 * 2 | hyp |- goal`. Variables without a cube
/// annotation range over `2`; the hypothesis is optional.
pub struct RawSequent {
    pub vars: Vec<(String, Raw)>,
    pub hyp: RawTope,
    pub goal: RawTope,
}

pub fn parse_sequent(src: &str) -> Result<RawSequent, ParseError> {
    let mut p = Parser::new(src)?;
    let r = (|| {
        let mut vars = vec![];
        if !p.is_sym("|") && !p.is_sym("|-") {
            loop {
                let mut names = vec![p.ident()?.0];
                while !p.is_sym(":") && !p.is_sym(",") && !p.is_sym("|") && !p.is_sym("|-") {
                    names.push(p.ident()?.0);
                }
                let cube = if p.eat_sym(":") {
                    p.prod_level()?
                } else {
                    Raw { kind: RawKind::Num(2), span: p.here() }
                };
                for n in names {
                    vars.push((n, cube.clone()));
                }
                if !p.eat_sym(",") {
                    break;
                }
            }
        }
        let hyp = if p.eat_sym("|") { p.tope()? } else { RawTope::Top };
        p.sym("|-")?;
        let goal = p.tope()?;
        p.eof()?;
        Ok(RawSequent { vars, hyp, goal })
    })();
    p.finish(r)
}
