use super::Span;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Num(u32),
    Str(String),
    /// Punctuation, always in its ASCII spelling.
    Sym(&'static str),
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Num(n) => format!("`{n}`"),
            Tok::Str(s) => format!("\"{s}\""),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".to_string(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexError {
    pub span: Span,
    pub message: String,
}

const ASCII_SYMS: &[&str] = &[
    "|->", "===", "=_{", ":=", "|-", "->", "<=", "/\\", "\\/", "(", ")", "{", "}", "[", "]", "<", ">",
    ",", ":", "|", "\\", ".", "*",
];

fn unicode_sym(c: char) -> Option<Tok> {
    Some(match c {
        '→' => Tok::Sym("->"),
        '↦' => Tok::Sym("|->"),
        '⊢' => Tok::Sym("|-"),
        '≤' => Tok::Sym("<="),
        '≡' => Tok::Sym("==="),
        '∧' => Tok::Sym("/\\"),
        '∨' => Tok::Sym("\\/"),
        '×' => Tok::Sym("*"),
        'λ' => Tok::Sym("\\"),
        'Σ' => Tok::Ident("Sigma".into()),
        '⊤' => Tok::Ident("TOP".into()),
        '⊥' => Tok::Ident("BOT".into()),
        _ => return None,
    })
}

fn ident_start(c: char) -> bool {
    (c.is_alphabetic() || c == '_' || c == '∂') && unicode_sym(c).is_none()
}

fn ident_continue(c: char) -> bool {
    ident_start(c) || c.is_numeric() || c == '\'' || matches!(c, '₀'..='₉' | '¹' | '²' | '³' | '⁰')
}

pub fn lex(src: &str) -> Result<Vec<Token>, LexError> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let mut line_start = 0;
    let at = |k: usize| chars.get(k).map(|&(_, c)| c);
    let off = |k: usize| chars.get(k).map(|&(o, _)| o).unwrap_or(src.len());
    while i < chars.len() {
        let (start, c) = chars[i];
        if c == '\n' {
            line += 1;
            i += 1;
            line_start = off(i);
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '-' && at(i + 1) == Some('-') {
            while i < chars.len() && chars[i].1 != '\n' {
                i += 1;
            }
            continue;
        }
        let col = src[line_start..start].chars().count() + 1;
        let mk = |end: usize| Span { start, end, line, col };
        if ident_start(c) {
            let mut j = i + 1;
            while let Some(d) = at(j) {
                let dash = d == '-' && at(j + 1).is_some_and(|e| e.is_alphanumeric()) && at(j + 1) != Some('-');
                if ident_continue(d) || dash {
                    j += 1;
                } else {
                    break;
                }
            }
            let end = off(j);
            out.push(Token { tok: Tok::Ident(src[start..end].to_string()), span: mk(end) });
            i = j;
            continue;
        }
        if c.is_ascii_digit() {
            let mut j = i + 1;
            while at(j).is_some_and(|d| d.is_ascii_digit()) {
                j += 1;
            }
            let end = off(j);
            let n = src[start..end].parse::<u32>().map_err(|_| LexError {
                span: mk(end),
                message: "numeral too large".into(),
            })?;
            out.push(Token { tok: Tok::Num(n), span: mk(end) });
            i = j;
            continue;
        }
        if c == '"' {
            let mut j = i + 1;
            while at(j).is_some_and(|d| d != '"' && d != '\n') {
                j += 1;
            }
            if at(j) != Some('"') {
                return Err(LexError { span: mk(off(j)), message: "unterminated string".into() });
            }
            let end = off(j + 1);
            out.push(Token { tok: Tok::Str(src[off(i + 1)..off(j)].to_string()), span: mk(end) });
            i = j + 1;
            continue;
        }
        if let Some(tok) = unicode_sym(c) {
            let end = off(i + 1);
            out.push(Token { tok, span: mk(end) });
            i += 1;
            continue;
        }
        let rest = &src[start..];
        if let Some(sym) = ASCII_SYMS.iter().find(|s| rest.starts_with(**s)) {
            let end = start + sym.len();
            out.push(Token { tok: Tok::Sym(sym), span: mk(end) });
            i += sym.chars().count();
            continue;
        }
        return Err(LexError { span: mk(off(i + 1)), message: format!("unexpected character `{c}`") });
    }
    let col = src[line_start..].chars().count() + 1;
    out.push(Token { tok: Tok::Eof, span: Span { start: src.len(), end: src.len(), line, col } });
    Ok(out)
}
