//! First-order unification over types with metavariables. Used to
//! reconstruct lambda domains of unannotated core terms.

use crate::types::{Base, Ground, Type};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum MType {
    Meta(usize),
    Unknown,
    Base(Base),
    Arrow(Box<MType>, Box<MType>),
}

impl MType {
    pub(crate) fn arrow(a: MType, b: MType) -> MType {
        MType::Arrow(Box::new(a), Box::new(b))
    }

    pub(crate) fn ground(g: Ground) -> MType {
        match g {
            Ground::Base(b) => MType::Base(b),
            Ground::Fun => MType::arrow(MType::Unknown, MType::Unknown),
        }
    }
}

impl From<&Type> for MType {
    fn from(t: &Type) -> MType {
        match t {
            Type::Unknown => MType::Unknown,
            Type::Base(b) => MType::Base(*b),
            Type::Arrow(a, b) => MType::arrow(MType::from(&**a), MType::from(&**b)),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub(crate) struct Metas {
    bindings: Vec<Option<MType>>,
}

impl Metas {
    pub(crate) fn new() -> Metas {
        Metas::default()
    }

    pub(crate) fn fresh(&mut self) -> MType {
        self.bindings.push(None);
        MType::Meta(self.bindings.len() - 1)
    }

    /// Follow bindings at the head only.
    pub(crate) fn shallow(&self, t: &MType) -> MType {
        let mut cur = t.clone();
        while let MType::Meta(i) = cur {
            match &self.bindings[i] {
                Some(next) => cur = next.clone(),
                None => break,
            }
        }
        cur
    }

    fn occurs(&self, meta: usize, t: &MType) -> bool {
        match self.shallow(t) {
            MType::Meta(j) => j == meta,
            MType::Arrow(a, b) => self.occurs(meta, &a) || self.occurs(meta, &b),
            MType::Unknown | MType::Base(_) => false,
        }
    }

    pub(crate) fn unify(&mut self, a: &MType, b: &MType) -> bool {
        let a = self.shallow(a);
        let b = self.shallow(b);
        match (&a, &b) {
            (MType::Meta(i), MType::Meta(j)) if i == j => true,
            (MType::Meta(i), other) | (other, MType::Meta(i)) => {
                if self.occurs(*i, other) {
                    return false;
                }
                self.bindings[*i] = Some(other.clone());
                true
            }
            (MType::Unknown, MType::Unknown) => true,
            (MType::Base(x), MType::Base(y)) => x == y,
            (MType::Arrow(a1, b1), MType::Arrow(a2, b2)) => {
                self.unify(a1, a2) && self.unify(b1, b2)
            }
            _ => false,
        }
    }

    /// Apply all bindings and read unsolved metavariables as `★`.
    pub(crate) fn default_type(&self, t: &MType) -> Type {
        match self.shallow(t) {
            MType::Meta(_) | MType::Unknown => Type::Unknown,
            MType::Base(b) => Type::Base(b),
            MType::Arrow(a, b) => Type::arrow(self.default_type(&a), self.default_type(&b)),
        }
    }
}
