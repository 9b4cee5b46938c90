//! Three-layer judgment contexts `Xi | Phi | Gamma`.

use std::rc::Rc;

use crate::term::Expr;
use crate::tope::{Cube, CubeScope, Tope, TopeError};

#[derive(Clone, Debug)]
pub enum Entry {
    Typed { name: Rc<str>, ty: Expr },
    Cube { name: Rc<str>, cube: Cube },
}

impl Entry {
    pub fn name(&self) -> &str {
        match self {
            Entry::Typed { name, .. } | Entry::Cube { name, .. } => name,
        }
    }
}

/// Cube and typed variables share one de Bruijn index space. Tope hypotheses
/// remember the context length at which they were added so they can be
/// shifted to the current scope; hypotheses are only ever added.
#[derive(Clone, Debug, Default)]
pub struct TriContext {
    entries: Vec<Entry>,
    topes: Vec<(usize, Tope)>,
}

impl TriContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn push_typed(&self, name: &str, ty: Expr) -> Self {
        let mut c = self.clone();
        c.entries.push(Entry::Typed { name: Rc::from(name), ty });
        c
    }

    /// Binds a cube variable constrained by `tope` (which may mention it).
    pub fn push_cube(&self, name: &str, cube: Cube, tope: Tope) -> Self {
        let mut c = self.clone();
        c.entries.push(Entry::Cube { name: Rc::from(name), cube });
        if tope != Tope::Top {
            c.topes.push((c.entries.len(), tope));
        }
        c
    }

    pub fn assume(&self, tope: Tope) -> Self {
        let mut c = self.clone();
        if tope != Tope::Top {
            c.topes.push((c.entries.len(), tope));
        }
        c
    }

    /// The same variables with the hypotheses replaced by `phi`. Used when
    /// splitting on a disjunct of the current hypotheses.
    pub fn with_phi(&self, phi: Tope) -> Self {
        let mut c = self.clone();
        c.topes = vec![(c.entries.len(), phi)];
        c
    }

    /// The conjunction of all hypotheses, expressed in the current scope.
    pub fn phi(&self) -> Tope {
        let n = self.entries.len();
        Tope::conj(self.topes.iter().map(|(d, t)| t.shift((n - d) as isize, 0)))
    }

    pub fn entry(&self, ix: usize) -> Option<&Entry> {
        let n = self.entries.len();
        (ix < n).then(|| &self.entries[n - 1 - ix])
    }

    /// The type of typed variable `ix`, shifted into the current scope.
    pub fn type_of(&self, ix: usize) -> Option<Expr> {
        match self.entry(ix)? {
            Entry::Typed { ty, .. } => Some(ty.shift(ix as isize + 1)),
            Entry::Cube { .. } => None,
        }
    }

    pub fn is_cube_var(&self, ix: usize) -> bool {
        matches!(self.entry(ix), Some(Entry::Cube { .. }))
    }

    /// Variable names, outermost first.
    pub fn names(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.name().to_string()).collect()
    }
}

impl CubeScope for TriContext {
    fn cube_of(&self, ix: usize) -> Result<Cube, TopeError> {
        match self.entry(ix) {
            Some(Entry::Cube { cube, .. }) => Ok(cube.clone()),
            Some(Entry::Typed { name, .. }) => Err(TopeError::NotCube(name.to_string())),
            None => Err(TopeError::Scope(ix)),
        }
    }

    fn name_of(&self, ix: usize) -> String {
        self.entry(ix).map(|e| e.name().to_string()).unwrap_or_else(|| format!("#{ix}"))
    }
}
