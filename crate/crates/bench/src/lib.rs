//! Fixed workloads shared by the benchmarks.

use castcalc::harness::{gen_term, omega, GenConfig};
use castcalc::{Ground, Term, Type};

/// `(λx:★. x⟨Nat?⟩) 3⟨Nat!⟩` nested `depth` times around a literal.
pub fn cast_tower(depth: usize) -> Term {
    let mut m = Term::num(3);
    for _ in 0..depth {
        let id = Term::lam(Term::project(Term::Var(0), Ground::NAT));
        m = Term::app(id, Term::inject(m, Ground::NAT));
    }
    m
}

pub fn diverging() -> Term {
    omega().erase()
}

/// `n` generated closed terms at `★`, seeds `0..n`.
pub fn corpus(n: u64) -> Vec<Term> {
    (0..n)
        .map(|seed| {
            let cfg = GenConfig {
                seed,
                ..GenConfig::default()
            };
            gen_term(&cfg, &Type::Unknown)
                .expect("default weights never starve")
                .erase()
        })
        .collect()
}
