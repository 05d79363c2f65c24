//! Building precision-related pairs by making a term less precise.
//!
//! The walk starts from the reflexive derivation of `m′ ⊑ m′` and edits the
//! left side and the derivation together, so every intermediate pair comes
//! with its own derivation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::abt::Term;
use crate::precision::{refl_prec, term_prec_conclusion, PrecTriple, TermPrecDeriv, TypePrecDeriv};
use crate::typecheck::{elaborate_core, AnnNode, AnnTerm};
use crate::types::{Ground, Type};

/// A pair `less ⊑ more` with its derivation `d` concluding at `c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrecPair {
    pub less: Term,
    pub more: Term,
    pub c: TypePrecDeriv,
    pub d: TermPrecDeriv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MutationMode {
    #[default]
    Standard,
    /// Also replace right-side subterms by blame.
    Adversarial,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MutateError {
    #[error("the input term does not have the given type")]
    IllTyped,
    #[error("no precision-lowering edit applies")]
    MutationBudgetExhausted,
}

/// The derivation of `m ⊑ m` for an annotated term.
pub fn refl_term_prec(m: &AnnTerm) -> TermPrecDeriv {
    use TermPrecDeriv::*;
    match &m.node {
        AnnNode::Var(i) => PVar(*i),
        AnnNode::Lit(c) => PLit(*c),
        AnnNode::App(f, a) => PApp(Box::new(refl_term_prec(f)), Box::new(refl_term_prec(a))),
        AnnNode::Lam(a, body) => PLam(refl_prec(a), Box::new(refl_term_prec(body))),
        AnnNode::Inject(n, g) => PInjR(*g, Box::new(PInjL(*g, Box::new(refl_term_prec(n))))),
        AnnNode::Project(n, h) => PProjL(*h, Box::new(PProjR(*h, Box::new(refl_term_prec(n))))),
        AnnNode::Blame(a) => PBlame(a.clone()),
    }
}

fn ground_type(a: &Type) -> Option<Ground> {
    match a {
        Type::Base(b) => Some(Ground::Base(*b)),
        Type::Arrow(d, c) if **d == Type::Unknown && **c == Type::Unknown => Some(Ground::Fun),
        _ => None,
    }
}

/// Ground domain of a lambda derivation, if its left domain can be relaxed.
fn relaxable(d: &TermPrecDeriv) -> Option<Ground> {
    match d {
        TermPrecDeriv::PLam(c, _) => ground_type(&c.conclusion()?.0),
        _ => None,
    }
}

/// Replace left occurrences of variable `x` by `x⟨h?⟩`.
fn project_var(m: &Term, x: usize, h: Ground) -> Term {
    match m {
        Term::Var(i) if *i == x => Term::project(Term::Var(x), h),
        Term::Var(_) | Term::Lit(_) | Term::Blame => m.clone(),
        Term::Lam(n) => Term::lam(project_var(n, x + 1, h)),
        Term::App(f, a) => Term::app(project_var(f, x, h), project_var(a, x, h)),
        Term::Inject(n, g) => Term::inject(project_var(n, x, h), *g),
        Term::Project(n, g) => Term::project(project_var(n, x, h), *g),
    }
}

/// Rewrite a lambda body after its left binder moved from `⌈h⌉` to `★`.
fn relax_body(less: &Term, d: &TermPrecDeriv, x: usize, h: Ground) -> (Term, TermPrecDeriv) {
    use TermPrecDeriv::*;
    let bx = Box::new;
    match (less, d) {
        (Term::Var(i), PVar(_)) if *i == x => {
            (Term::project(Term::Var(x), h), PProjL(h, bx(PVar(x))))
        }
        (_, PVar(_)) | (_, PLit(_)) => (less.clone(), d.clone()),
        (_, PBlame(a)) => (project_var(less, x, h), PBlame(a.clone())),
        (Term::App(l1, l2), PApp(d1, d2)) => {
            let (l1, d1) = relax_body(l1, d1, x, h);
            let (l2, d2) = relax_body(l2, d2, x, h);
            (Term::app(l1, l2), PApp(bx(d1), bx(d2)))
        }
        (Term::Lam(n), PLam(c, db)) => {
            let (n, db) = relax_body(n, db, x + 1, h);
            (Term::lam(n), PLam(c.clone(), bx(db)))
        }
        (Term::Inject(n, _), PInjL(g, s)) => {
            let (n, s) = relax_body(n, s, x, h);
            (Term::inject(n, *g), PInjL(*g, bx(s)))
        }
        (Term::Project(n, _), PProjL(g, s)) => {
            let (n, s) = relax_body(n, s, x, h);
            (Term::project(n, *g), PProjL(*g, bx(s)))
        }
        (_, PInjR(g, s)) => {
            let (l, s) = relax_body(less, s, x, h);
            (l, PInjR(*g, bx(s)))
        }
        (_, PProjR(g, s)) => {
            let (l, s) = relax_body(less, s, x, h);
            (l, PProjR(*g, bx(s)))
        }
        _ => unreachable!("derivation does not match its left term"),
    }
}

/// Relax the domain of a lambda node. Returns the new left term and derivation.
fn relax_lambda(less: &Term, d: &TermPrecDeriv, h: Ground) -> (Term, TermPrecDeriv) {
    let (Term::Lam(n), TermPrecDeriv::PLam(c, body)) = (less, d) else {
        unreachable!("relax_lambda on a non-lambda")
    };
    let (n, body) = relax_body(n, body, 0, h);
    (
        Term::lam(n),
        TermPrecDeriv::PLam(TypePrecDeriv::unk_ground(h, c.clone()), Box::new(body)),
    )
}

type Node = (Term, Term, TermPrecDeriv);

/// Pre-order walk that counts edit sites and applies the one numbered `target`.
struct Editor {
    mode: MutationMode,
    seen: usize,
    target: usize,
}

impl Editor {
    fn hit(&mut self) -> bool {
        let here = self.seen == self.target;
        self.seen += 1;
        here
    }

    fn walk(
        &mut self,
        ctx: &[PrecTriple],
        less: &Term,
        more: &Term,
        d: &TermPrecDeriv,
        root: bool,
    ) -> Node {
        use TermPrecDeriv::*;
        let bx = Box::new;
        let c = term_prec_conclusion(ctx, d, less, more).expect("walk on a valid derivation");
        let (left_ty, right_ty) = c.conclusion().expect("conclusions are well formed");

        if let Some(g) = ground_type(&left_ty) {
            if self.hit() {
                return if root {
                    (
                        Term::inject(less.clone(), g),
                        more.clone(),
                        PInjL(g, bx(d.clone())),
                    )
                } else {
                    let wrapped = Term::project(Term::inject(less.clone(), g), g);
                    (
                        wrapped,
                        more.clone(),
                        PProjL(g, bx(PInjL(g, bx(d.clone())))),
                    )
                };
            }
        }
        if root {
            if let Some(h) = relaxable(d) {
                if self.hit() {
                    let (l, d) = relax_lambda(less, d, h);
                    return (l, more.clone(), d);
                }
            }
        }
        if self.mode == MutationMode::Adversarial
            && left_ty == right_ty
            && !more.is_blame()
            && self.hit()
        {
            return (less.clone(), Term::Blame, PBlame(left_ty));
        }

        match (less, more, d) {
            (Term::App(l1, l2), Term::App(r1, r2), PApp(d1, d2)) => {
                if let Some(h) = relaxable(d1) {
                    if self.hit() {
                        let (f, df) = relax_lambda(l1, d1, h);
                        let arg = Term::inject((**l2).clone(), h);
                        return (
                            Term::app(f, arg),
                            more.clone(),
                            PApp(bx(df), bx(PInjL(h, d2.clone()))),
                        );
                    }
                }
                let (l1, r1, d1) = self.walk(ctx, l1, r1, d1, false);
                let (l2, r2, d2) = self.walk(ctx, l2, r2, d2, false);
                (Term::app(l1, l2), Term::app(r1, r2), PApp(bx(d1), bx(d2)))
            }
            (Term::Lam(n), Term::Lam(np), PLam(cb, db)) => {
                let (a, b) = cb.conclusion().expect("binder derivation is well formed");
                let mut inner = Vec::with_capacity(ctx.len() + 1);
                inner.push(PrecTriple {
                    less: a,
                    more: b,
                    deriv: cb.clone(),
                });
                inner.extend_from_slice(ctx);
                let (n, np, db) = self.walk(&inner, n, np, db, false);
                (Term::lam(n), Term::lam(np), PLam(cb.clone(), bx(db)))
            }
            (Term::Inject(n, g), _, PInjL(_, s)) => {
                let (n, r, s) = self.walk(ctx, n, more, s, false);
                (Term::inject(n, *g), r, PInjL(*g, bx(s)))
            }
            (Term::Project(n, h), _, PProjL(_, s)) => {
                let (n, r, s) = self.walk(ctx, n, more, s, false);
                (Term::project(n, *h), r, PProjL(*h, bx(s)))
            }
            (_, Term::Inject(np, g), PInjR(_, s)) => {
                let (l, np, s) = self.walk(ctx, less, np, s, false);
                (l, Term::inject(np, *g), PInjR(*g, bx(s)))
            }
            (_, Term::Project(np, h), PProjR(_, s)) => {
                let (l, np, s) = self.walk(ctx, less, np, s, false);
                (l, Term::project(np, *h), PProjR(*h, bx(s)))
            }
            _ => (less.clone(), more.clone(), d.clone()),
        }
    }
}

fn count_sites(mode: MutationMode, less: &Term, more: &Term, d: &TermPrecDeriv) -> usize {
    let mut e = Editor {
        mode,
        seen: 0,
        target: usize::MAX,
    };
    e.walk(&[], less, more, d, true);
    e.seen
}

/// Make `more ⦂ a` less precise with up to `budget` edits chosen by `seed`.
///
/// Edits inject at ground-typed nodes (wrapped in a matching projection
/// below the root), relax a ground lambda domain to `★` with projections at
/// its uses and, in adversarial mode, turn a right subterm into blame.
/// Stops early once no site remains; fails only if a positive budget finds
/// no site at all.
pub fn abstract_mutate(
    more: &Term,
    a: &Type,
    budget: usize,
    seed: u64,
    mode: MutationMode,
) -> Result<PrecPair, MutateError> {
    let ann = elaborate_core(&[], more, a).map_err(|_| MutateError::IllTyped)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut node: Node = (more.clone(), more.clone(), refl_term_prec(&ann));
    for round in 0..budget {
        let sites = count_sites(mode, &node.0, &node.1, &node.2);
        if sites == 0 {
            if round == 0 {
                return Err(MutateError::MutationBudgetExhausted);
            }
            break;
        }
        let target = rng.gen_range(0..sites);
        let mut e = Editor {
            mode,
            seen: 0,
            target,
        };
        node = e.walk(&[], &node.0, &node.1, &node.2, true);
    }
    let (less, more, d) = node;
    let c = term_prec_conclusion(&[], &d, &less, &more)
        .expect("mutation produced an invalid derivation");
    Ok(PrecPair { less, more, c, d })
}
