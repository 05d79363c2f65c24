//! De Bruijn terms with parallel renaming and substitution.
//!
//! Substitutions and renamings are total maps on indices. They are stored
//! as a finite explicit prefix followed by a shifted identity tail, so that
//! `σ(i) = prefix[i]` for `i < prefix.len()` and
//! `σ(i) = Var(i - prefix.len() + shift)` otherwise.

use serde::{Deserialize, Serialize};

use crate::types::{Ground, Lit};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Term {
    /// De Bruijn index, 0 is the innermost binder.
    Var(usize),
    /// Binds one variable in its body.
    Lam(Box<Term>),
    App(Box<Term>, Box<Term>),
    Lit(Lit),
    /// `M⟨G!⟩`
    Inject(Box<Term>, Ground),
    /// `M⟨H?⟩`
    Project(Box<Term>, Ground),
    Blame,
}

impl Term {
    pub fn lam(body: Term) -> Term {
        Term::Lam(Box::new(body))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    pub fn num(n: u64) -> Term {
        Term::Lit(Lit::Num(n))
    }

    pub fn bool(b: bool) -> Term {
        Term::Lit(Lit::Bool(b))
    }

    pub fn inject(m: Term, g: Ground) -> Term {
        Term::Inject(Box::new(m), g)
    }

    pub fn project(m: Term, h: Ground) -> Term {
        Term::Project(Box::new(m), h)
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Lit(_) | Term::Blame => 1,
            Term::Lam(n) | Term::Inject(n, _) | Term::Project(n, _) => 1 + n.size(),
            Term::App(l, m) => 1 + l.size() + m.size(),
        }
    }

    /// True when every variable index is below the number of enclosing binders
    /// plus `depth`.
    pub fn is_closed_under(&self, depth: usize) -> bool {
        match self {
            Term::Var(i) => *i < depth,
            Term::Lit(_) | Term::Blame => true,
            Term::Lam(n) => n.is_closed_under(depth + 1),
            Term::Inject(n, _) | Term::Project(n, _) => n.is_closed_under(depth),
            Term::App(l, m) => l.is_closed_under(depth) && m.is_closed_under(depth),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.is_closed_under(0)
    }

    pub fn is_blame(&self) -> bool {
        matches!(self, Term::Blame)
    }

    /// `⇑`: shift every free variable up by one.
    pub fn shift(&self) -> Term {
        rename(&Renaming::shift(1), self)
    }
}

fn bump(i: usize, by: usize) -> usize {
    i.checked_add(by).expect("de Bruijn index overflow")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Renaming {
    prefix: Vec<usize>,
    shift: usize,
}

impl Renaming {
    pub fn ident() -> Renaming {
        Renaming {
            prefix: Vec::new(),
            shift: 0,
        }
    }

    /// `λi. i + k`
    pub fn shift(k: usize) -> Renaming {
        Renaming {
            prefix: Vec::new(),
            shift: k,
        }
    }

    pub fn from_parts(prefix: Vec<usize>, shift: usize) -> Renaming {
        Renaming { prefix, shift }
    }

    pub fn lookup(&self, i: usize) -> usize {
        match self.prefix.get(i) {
            Some(&j) => j,
            None => bump(i - self.prefix.len(), self.shift),
        }
    }

    /// `extr ρ`: fixes 0 and maps `1 + x` to `1 + ρ(x)`.
    pub fn ext(&self) -> Renaming {
        let mut prefix = Vec::with_capacity(self.prefix.len() + 1);
        prefix.push(0);
        prefix.extend(self.prefix.iter().map(|&j| bump(j, 1)));
        Renaming {
            prefix,
            shift: bump(self.shift, 1),
        }
    }
}

pub fn rename(rho: &Renaming, m: &Term) -> Term {
    match m {
        Term::Var(i) => Term::Var(rho.lookup(*i)),
        Term::Lam(n) => Term::lam(rename(&rho.ext(), n)),
        Term::App(l, r) => Term::app(rename(rho, l), rename(rho, r)),
        Term::Lit(c) => Term::Lit(*c),
        Term::Inject(n, g) => Term::inject(rename(rho, n), *g),
        Term::Project(n, h) => Term::project(rename(rho, n), *h),
        Term::Blame => Term::Blame,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subst {
    prefix: Vec<Term>,
    shift: usize,
}

impl Subst {
    pub fn ident() -> Subst {
        Subst {
            prefix: Vec::new(),
            shift: 0,
        }
    }

    pub fn shift(k: usize) -> Subst {
        Subst {
            prefix: Vec::new(),
            shift: k,
        }
    }

    pub fn from_parts(prefix: Vec<Term>, shift: usize) -> Subst {
        Subst { prefix, shift }
    }

    pub fn prefix(&self) -> &[Term] {
        &self.prefix
    }

    pub fn tail_shift(&self) -> usize {
        self.shift
    }

    pub fn lookup(&self, i: usize) -> Term {
        match self.prefix.get(i) {
            Some(t) => t.clone(),
            None => Term::Var(bump(i - self.prefix.len(), self.shift)),
        }
    }

    /// Stream cons `V • σ`.
    pub fn cons(v: Term, sigma: &Subst) -> Subst {
        let mut prefix = Vec::with_capacity(sigma.prefix.len() + 1);
        prefix.push(v);
        prefix.extend(sigma.prefix.iter().cloned());
        Subst {
            prefix,
            shift: sigma.shift,
        }
    }

    /// Transport `σ` under one binder.
    pub fn ext(&self) -> Subst {
        let mut prefix = Vec::with_capacity(self.prefix.len() + 1);
        prefix.push(Term::Var(0));
        prefix.extend(self.prefix.iter().map(Term::shift));
        Subst {
            prefix,
            shift: bump(self.shift, 1),
        }
    }

    /// Extensional agreement on indices `0..bound`.
    pub fn agrees_on(&self, other: &Subst, bound: usize) -> bool {
        (0..bound).all(|i| self.lookup(i) == other.lookup(i))
    }
}

/// `⟪ σ ⟫ M`
pub fn subst_apply(sigma: &Subst, m: &Term) -> Term {
    match m {
        Term::Var(i) => sigma.lookup(*i),
        Term::Lam(n) => Term::lam(subst_apply(&sigma.ext(), n)),
        Term::App(l, r) => Term::app(subst_apply(sigma, l), subst_apply(sigma, r)),
        Term::Lit(c) => Term::Lit(*c),
        Term::Inject(n, g) => Term::inject(subst_apply(sigma, n), *g),
        Term::Project(n, h) => Term::project(subst_apply(sigma, n), *h),
        Term::Blame => Term::Blame,
    }
}

/// `M [ N ]`: replace variable 0 by `n` and decrement the other free variables.
pub fn bracket(m: &Term, n: &Term) -> Term {
    subst_apply(&Subst::cons(n.clone(), &Subst::ident()), m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: usize) -> Term {
        Term::Var(i)
    }

    #[test]
    fn variable_equation() {
        let sigma = Subst::from_parts(vec![Term::num(3), v(5)], 2);
        assert_eq!(subst_apply(&sigma, &v(0)), Term::num(3));
        assert_eq!(subst_apply(&sigma, &v(1)), v(5));
        assert_eq!(subst_apply(&sigma, &v(4)), v(4));
    }

    #[test]
    fn identity_substitution() {
        let m = Term::lam(Term::app(v(0), Term::inject(v(3), Ground::NAT)));
        assert_eq!(subst_apply(&Subst::ident(), &m), m);
        assert_eq!(rename(&Renaming::ident(), &m), m);
    }

    #[test]
    fn cons_then_apply() {
        let sigma = Subst::cons(Term::num(7), &Subst::ident());
        assert_eq!(
            subst_apply(&sigma, &Term::app(v(0), v(0))),
            Term::app(Term::num(7), Term::num(7))
        );
    }

    #[test]
    fn ext_identity_is_identity() {
        assert!(Subst::ident().ext().agrees_on(&Subst::ident(), 64));
    }

    #[test]
    fn ext_of_cons() {
        let n = Term::lam(Term::app(v(0), v(2)));
        let e = Subst::cons(n.clone(), &Subst::ident()).ext();
        assert_eq!(e.lookup(0), v(0));
        assert_eq!(e.lookup(1), n.shift());
        assert_eq!(e.lookup(1), Term::lam(Term::app(v(0), v(3))));
        assert_eq!(e.lookup(2), v(1));
    }

    #[test]
    fn bracket_examples() {
        let n = Term::bool(true);
        assert_eq!(
            bracket(&Term::app(v(1), v(0)), &n),
            Term::app(v(0), n.clone())
        );
        assert_eq!(bracket(&Term::num(3), &n), Term::num(3));
        assert_eq!(bracket(&Term::lam(v(0)), &n), Term::lam(v(0)));
    }

    #[test]
    fn rename_examples() {
        let up = Renaming::shift(1);
        assert_eq!(rename(&up, &v(0)), v(1));
        assert_eq!(rename(&up, &Term::lam(v(0))), Term::lam(v(0)));
        assert_eq!(rename(&up, &Term::lam(v(1))), Term::lam(v(2)));
    }

    #[test]
    fn extr_laws() {
        let rho = Renaming::from_parts(vec![4, 2], 7);
        let e = rho.ext();
        assert_eq!(e.lookup(0), 0);
        for x in 0..20 {
            assert_eq!(e.lookup(1 + x), 1 + rho.lookup(x));
        }
    }

    #[test]
    fn cons_laws() {
        let sigma = Subst::from_parts(vec![Term::num(1), v(9)], 3);
        let c = Subst::cons(Term::Blame, &sigma);
        assert_eq!(c.lookup(0), Term::Blame);
        for x in 0..20 {
            assert_eq!(c.lookup(1 + x), sigma.lookup(x));
        }
    }

    #[test]
    #[should_panic(expected = "overflow")]
    fn index_overflow_is_an_error() {
        Renaming::shift(usize::MAX).lookup(1);
    }

    #[test]
    fn closedness() {
        assert!(Term::lam(v(0)).is_closed());
        assert!(!Term::lam(v(1)).is_closed());
        assert_eq!(Term::app(Term::lam(v(0)), Term::num(1)).size(), 4);
    }
}
