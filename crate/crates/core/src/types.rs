//! Static vocabulary of the calculus: base types, types, ground types and
//! literals, plus the value predicate and type consistency.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::abt::Term;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Base {
    Nat,
    Bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Type {
    /// The unknown type `★`.
    Unknown,
    Base(Base),
    Arrow(Box<Type>, Box<Type>),
}

impl Type {
    pub const NAT: Type = Type::Base(Base::Nat);
    pub const BOOL: Type = Type::Base(Base::Bool);

    pub fn arrow(dom: Type, cod: Type) -> Type {
        Type::Arrow(Box::new(dom), Box::new(cod))
    }

    /// `★ ⇒ ★`
    pub fn dyn_fun() -> Type {
        Type::arrow(Type::Unknown, Type::Unknown)
    }

    /// Height of the type tree; `★` and base types have depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Type::Unknown | Type::Base(_) => 1,
            Type::Arrow(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// Every type of depth at most `depth`, in a fixed order.
    pub fn enumerate(depth: usize) -> Vec<Type> {
        if depth == 0 {
            return Vec::new();
        }
        let smaller = Type::enumerate(depth - 1);
        let mut out = vec![Type::Unknown, Type::NAT, Type::BOOL];
        for a in &smaller {
            for b in &smaller {
                out.push(Type::arrow(a.clone(), b.clone()));
            }
        }
        out
    }
}

/// Ground types: the base types and `★ ⇒ ★`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Ground {
    Base(Base),
    Fun,
}

impl Ground {
    pub const ALL: [Ground; 3] = [
        Ground::Base(Base::Nat),
        Ground::Base(Base::Bool),
        Ground::Fun,
    ];
    pub const NAT: Ground = Ground::Base(Base::Nat);
    pub const BOOL: Ground = Ground::Base(Base::Bool);
}

/// Literal constants. Naturals are stored as `u64`; arithmetic never
/// happens on them, so the bound only limits what the parser accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Lit {
    Num(u64),
    Bool(bool),
}

impl Lit {
    pub fn base(&self) -> Base {
        match self {
            Lit::Num(_) => Base::Nat,
            Lit::Bool(_) => Base::Bool,
        }
    }
}

/// `⌈G⌉`
pub fn ground_to_type(g: Ground) -> Type {
    match g {
        Ground::Base(b) => Type::Base(b),
        Ground::Fun => Type::dyn_fun(),
    }
}

/// The ground type heading `a`, if `a` is not `★`.
pub fn ground_of(a: &Type) -> Option<Ground> {
    match a {
        Type::Unknown => None,
        Type::Base(b) => Some(Ground::Base(*b)),
        Type::Arrow(..) => Some(Ground::Fun),
    }
}

/// Values are lambdas, literals and injections of values.
pub fn is_value(m: &Term) -> bool {
    match m {
        Term::Lam(_) | Term::Lit(_) => true,
        Term::Inject(v, _) => is_value(v),
        _ => false,
    }
}

pub fn consistent(a: &Type, b: &Type) -> bool {
    match (a, b) {
        (Type::Unknown, _) | (_, Type::Unknown) => true,
        (Type::Base(x), Type::Base(y)) => x == y,
        (Type::Arrow(a1, b1), Type::Arrow(a2, b2)) => consistent(a1, a2) && consistent(b1, b2),
        _ => false,
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Base::Nat => f.write_str("Nat"),
            Base::Bool => f.write_str("Bool"),
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Unknown => f.write_str("*"),
            Type::Base(b) => write!(f, "{b}"),
            Type::Arrow(a, b) => write!(f, "(-> {a} {b})"),
        }
    }
}

impl fmt::Display for Ground {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ground::Base(b) => write!(f, "{b}"),
            Ground::Fun => f.write_str("Fun"),
        }
    }
}
