use super::Span;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pattern {
    Name(String, Span),
    Pair(Box<Pattern>, Box<Pattern>),
}

impl Pattern {
    pub fn leaves(&self) -> Vec<&str> {
        match self {
            Pattern::Name(n, _) => vec![n.as_str()],
            Pattern::Pair(a, b) => {
                let mut v = a.leaves();
                v.extend(b.leaves());
                v
            }
        }
    }

    /// A readable single name for the variable the pattern destructures.
    pub fn hint(&self) -> String {
        match self {
            Pattern::Name(n, _) => n.clone(),
            Pattern::Pair(..) => self.leaves().concat(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RawCube {
    Var(String, Span),
    Zero,
    One,
    Star,
    Pair(Box<RawCube>, Box<RawCube>),
    First(Box<RawCube>),
    Second(Box<RawCube>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RawTope {
    Top,
    Bot,
    And(Box<RawTope>, Box<RawTope>),
    Or(Box<RawTope>, Box<RawTope>),
    Le(RawCube, RawCube),
    Eq(RawCube, RawCube),
    /// `S(c)`: a named shape's constraint instantiated at `c`.
    Shape(String, Span, RawCube),
}

/// `(p1 p2 ... : ty | tope)`. Several patterns only for typed groups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawBinder {
    pub pats: Vec<Pattern>,
    pub ty: Raw,
    pub tope: Option<RawTope>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Raw {
    pub kind: RawKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RawKind {
    Var(String),
    Num(u32),
    Universe,
    UnitType,
    UnitVal,
    Star,
    Refl,
    App(Box<Raw>, Box<Raw>),
    Lam(Vec<Pattern>, Box<Raw>),
    Pi(Vec<RawBinder>, Box<Raw>),
    Arrow(Box<Raw>, Box<Raw>),
    Sigma(Pattern, Box<Raw>, Box<Raw>),
    Prod(Box<Raw>, Box<Raw>),
    Pair(Box<Raw>, Box<Raw>),
    First(Box<Raw>),
    Second(Box<Raw>),
    Id(Box<Raw>, Box<Raw>, Box<Raw>),
    J(Vec<Raw>),
    Ext(Box<RawBinder>, Box<Raw>, Option<(RawTope, Box<Raw>)>),
    Case(Vec<(RawTope, Raw)>),
    Ann(Box<Raw>, Box<Raw>),
}

impl Raw {
    /// Immediate subterms, in source order.
    pub fn children(&self) -> Vec<&Raw> {
        match &self.kind {
            RawKind::Var(_)
            | RawKind::Num(_)
            | RawKind::Universe
            | RawKind::UnitType
            | RawKind::UnitVal
            | RawKind::Star
            | RawKind::Refl => vec![],
            RawKind::App(a, b)
            | RawKind::Arrow(a, b)
            | RawKind::Prod(a, b)
            | RawKind::Pair(a, b)
            | RawKind::Ann(a, b)
            | RawKind::Sigma(_, a, b) => vec![a, b],
            RawKind::Lam(_, b) | RawKind::First(b) | RawKind::Second(b) => vec![b],
            RawKind::Pi(bs, b) => bs.iter().map(|x| &x.ty).chain(std::iter::once(&**b)).collect(),
            RawKind::Id(a, b, c) => vec![a, b, c],
            RawKind::J(v) => v.iter().collect(),
            RawKind::Ext(bd, fam, bdry) => {
                let mut v = vec![&bd.ty, &**fam];
                if let Some((_, b)) = bdry {
                    v.push(b);
                }
                v
            }
            RawKind::Case(bs) => bs.iter().map(|(_, e)| e).collect(),
        }
    }

    /// Every identifier referenced anywhere, including inside topes.
    pub fn idents(&self, out: &mut Vec<String>) {
        fn cube(c: &RawCube, out: &mut Vec<String>) {
            match c {
                RawCube::Var(n, _) => out.push(n.clone()),
                RawCube::Zero | RawCube::One | RawCube::Star => {}
                RawCube::Pair(a, b) => {
                    cube(a, out);
                    cube(b, out);
                }
                RawCube::First(a) | RawCube::Second(a) => cube(a, out),
            }
        }
        fn tope(t: &RawTope, out: &mut Vec<String>) {
            match t {
                RawTope::Top | RawTope::Bot => {}
                RawTope::And(a, b) | RawTope::Or(a, b) => {
                    tope(a, out);
                    tope(b, out);
                }
                RawTope::Le(a, b) | RawTope::Eq(a, b) => {
                    cube(a, out);
                    cube(b, out);
                }
                RawTope::Shape(s, _, c) => {
                    out.push(s.clone());
                    cube(c, out);
                }
            }
        }
        if let RawKind::Var(n) = &self.kind {
            out.push(n.clone());
        }
        match &self.kind {
            RawKind::Pi(bs, _) => bs.iter().filter_map(|b| b.tope.as_ref()).for_each(|t| tope(t, out)),
            RawKind::Ext(bd, _, bdry) => {
                if let Some(t) = &bd.tope {
                    tope(t, out);
                }
                if let Some((t, _)) = bdry {
                    tope(t, out);
                }
            }
            RawKind::Case(bs) => bs.iter().for_each(|(t, _)| tope(t, out)),
            _ => {}
        }
        for c in self.children() {
            c.idents(out);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeclKind {
    Shape,
    Def,
    Postulate,
    Thm,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawShape {
    pub pat: Pattern,
    pub cube: Raw,
    pub tope: RawTope,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawDecl {
    pub kind: DeclKind,
    pub name: String,
    pub name_span: Span,
    pub params: Vec<RawBinder>,
    pub ty: Option<Raw>,
    pub body: Option<Raw>,
    pub shape: Option<RawShape>,
    pub span: Span,
}

impl RawDecl {
    pub fn idents(&self) -> Vec<String> {
        let mut out = vec![];
        for p in &self.params {
            p.ty.idents(&mut out);
            if let Some(t) = &p.tope {
                let fake = Raw {
                    kind: RawKind::Case(vec![(t.clone(), Raw { kind: RawKind::UnitVal, span: p.span })]),
                    span: p.span,
                };
                fake.idents(&mut out);
            }
        }
        for e in self.ty.iter().chain(self.body.iter()) {
            e.idents(&mut out);
        }
        if let Some(s) = &self.shape {
            s.cube.idents(&mut out);
            let fake = Raw {
                kind: RawKind::Case(vec![(s.tope.clone(), Raw { kind: RawKind::UnitVal, span: self.span })]),
                span: self.span,
            };
            fake.idents(&mut out);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceModule {
    pub imports: Vec<(String, Span)>,
    pub decls: Vec<RawDecl>,
}
