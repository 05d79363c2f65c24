//! Seeded, type-directed generation of closed well-typed terms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::typecheck::AnnTerm;
use crate::types::{ground_to_type, Base, Ground, Type};

/// Relative weights of the constructors the generator picks from. A zero
/// weight disables a constructor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Weights {
    pub var: u32,
    pub lit: u32,
    pub lam: u32,
    pub app: u32,
    pub inject: u32,
    pub project: u32,
    pub blame: u32,
    /// The fixed divergent term at `★`.
    pub diverge: u32,
}

impl Default for Weights {
    fn default() -> Weights {
        Weights {
            var: 4,
            lit: 3,
            lam: 3,
            app: 3,
            inject: 3,
            project: 2,
            blame: 1,
            diverge: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenConfig {
    pub seed: u64,
    pub max_size: usize,
    /// Depth bound on target and argument types.
    pub type_depth: usize,
    pub weights: Weights,
    pub fuel: usize,
    /// Mutation budget per generated pair.
    pub edits: usize,
    /// Allow right-hand blame edits and include unvalidated control pairs.
    pub adversarial: bool,
}

impl Default for GenConfig {
    fn default() -> GenConfig {
        GenConfig {
            seed: 0,
            max_size: 12,
            type_depth: 2,
            weights: Weights::default(),
            fuel: 1000,
            edits: 3,
            adversarial: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("no term of type {target} within size {max_size} under the given weights")]
    GenerationExhausted { target: Type, max_size: usize },
}

const RETRIES: usize = 32;

/// `δ = λx:★. (x⟨Fun?⟩) x` applied to `δ⟨Fun!⟩`. Its reduction cycles with
/// period two.
pub fn omega() -> AnnTerm {
    let delta = AnnTerm::lam(
        Type::Unknown,
        AnnTerm::app(
            AnnTerm::project(AnnTerm::var(0), Ground::Fun),
            AnnTerm::var(0),
        ),
    );
    AnnTerm::app(delta.clone(), AnnTerm::inject(delta, Ground::Fun))
}

const OMEGA_SIZE: usize = 12;

/// Size of the smallest closed term of type `a` the generator can build
/// without variables or blame.
fn min_size(a: &Type) -> usize {
    match a {
        Type::Base(_) => 1,
        Type::Unknown => 2,
        Type::Arrow(_, b) => 1 + min_size(b),
    }
}

fn ground_type(a: &Type) -> Option<Ground> {
    match a {
        Type::Base(b) => Some(Ground::Base(*b)),
        Type::Arrow(d, c) if **d == Type::Unknown && **c == Type::Unknown => Some(Ground::Fun),
        _ => None,
    }
}

#[derive(Clone, Copy)]
enum Choice {
    Var,
    Lit,
    Lam,
    App,
    Inject,
    Project,
    Blame,
    Diverge,
}

pub struct Generator {
    rng: ChaCha8Rng,
    cfg: GenConfig,
}

impl Generator {
    pub fn new(cfg: &GenConfig) -> Generator {
        Generator {
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            cfg: cfg.clone(),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.gen()
    }

    /// A type of depth at most `type_depth`.
    pub fn random_type(&mut self) -> Type {
        let depth = self.cfg.type_depth.max(1);
        self.type_of_depth(depth)
    }

    fn type_of_depth(&mut self, depth: usize) -> Type {
        let arrow = depth > 1 && self.rng.gen_ratio(1, 4);
        if arrow {
            let d = self.type_of_depth(depth - 1);
            let c = self.type_of_depth(depth - 1);
            return Type::arrow(d, c);
        }
        match self.rng.gen_range(0..3) {
            0 => Type::Unknown,
            1 => Type::NAT,
            _ => Type::BOOL,
        }
    }

    /// A closed term checking at `target`, retried a bounded number of times.
    pub fn term(&mut self, target: &Type) -> Result<AnnTerm, GenError> {
        for _ in 0..RETRIES {
            if let Some(m) = self.build(&[], target, self.cfg.max_size) {
                return Ok(m);
            }
        }
        Err(GenError::GenerationExhausted {
            target: target.clone(),
            max_size: self.cfg.max_size,
        })
    }

    fn pick(&mut self, options: &[(Choice, u32)]) -> Option<Choice> {
        let total: u32 = options.iter().map(|o| o.1).sum();
        if total == 0 {
            return None;
        }
        let mut r = self.rng.gen_range(0..total);
        for &(c, w) in options {
            if r < w {
                return Some(c);
            }
            r -= w;
        }
        None
    }

    fn build(&mut self, ctx: &[Type], target: &Type, budget: usize) -> Option<AnnTerm> {
        if budget == 0 {
            return None;
        }
        let w = self.cfg.weights.clone();
        let vars: Vec<usize> = (0..ctx.len()).filter(|&i| ctx[i] == *target).collect();
        let mut options = Vec::new();
        if !vars.is_empty() {
            options.push((Choice::Var, w.var));
        }
        match target {
            Type::Base(_) => options.push((Choice::Lit, w.lit)),
            Type::Arrow(_, b) if budget > min_size(b) => options.push((Choice::Lam, w.lam)),
            Type::Unknown if budget >= 2 => {
                options.push((Choice::Inject, w.inject));
                if budget >= OMEGA_SIZE {
                    options.push((Choice::Diverge, w.diverge));
                }
            }
            _ => {}
        }
        if ground_type(target).is_some() && budget > min_size(&Type::Unknown) {
            options.push((Choice::Project, w.project));
        }
        if budget >= 2 + min_size(target) + 1 {
            options.push((Choice::App, w.app));
        }
        options.push((Choice::Blame, w.blame));

        match self.pick(&options)? {
            Choice::Var => Some(AnnTerm::var(vars[self.rng.gen_range(0..vars.len())])),
            Choice::Lit => Some(match target {
                Type::Base(Base::Nat) => AnnTerm::num(self.rng.gen_range(0..10)),
                _ => AnnTerm::bool(self.rng.gen()),
            }),
            Choice::Lam => {
                let Type::Arrow(a, b) = target else {
                    unreachable!()
                };
                let mut inner = Vec::with_capacity(ctx.len() + 1);
                inner.push((**a).clone());
                inner.extend_from_slice(ctx);
                let body = self.build(&inner, b, budget - 1)?;
                Some(AnnTerm::lam((**a).clone(), body))
            }
            Choice::Inject => {
                let grounds: Vec<Ground> = Ground::ALL
                    .iter()
                    .copied()
                    .filter(|g| 1 + min_size(&ground_to_type(*g)) <= budget)
                    .collect();
                let g = grounds[self.rng.gen_range(0..grounds.len())];
                let body = self.build(ctx, &ground_to_type(g), budget - 1)?;
                Some(AnnTerm::inject(body, g))
            }
            Choice::Project => {
                let h = ground_type(target).expect("checked above");
                let body = self.build(ctx, &Type::Unknown, budget - 1)?;
                Some(AnnTerm::project(body, h))
            }
            Choice::App => {
                let mut dom = self.random_type();
                let fn_min = 1 + min_size(target);
                if 1 + fn_min + min_size(&dom) > budget {
                    dom = Type::NAT;
                }
                let remaining = budget - 1;
                let fn_budget = self.rng.gen_range(fn_min..=remaining - min_size(&dom));
                let f = self.build(ctx, &Type::arrow(dom.clone(), target.clone()), fn_budget)?;
                let arg = self.build(ctx, &dom, remaining - f.size())?;
                Some(AnnTerm::app(f, arg))
            }
            Choice::Blame => Some(AnnTerm::blame(target.clone())),
            Choice::Diverge => Some(omega()),
        }
    }
}

/// A closed term of type `target`, determined by `cfg`.
pub fn gen_term(cfg: &GenConfig, target: &Type) -> Result<AnnTerm, GenError> {
    Generator::new(cfg).term(target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduce::{eval, run_exact};
    use crate::typecheck::check;

    #[test]
    fn omega_shape() {
        let w = omega();
        assert_eq!(w.size(), OMEGA_SIZE);
        assert!(check(&[], &w, &Type::Unknown).is_ok());
        let m = w.erase();
        assert!(eval(&m, 500).unwrap().is_timeout());
        assert_eq!(run_exact(&m, 2).unwrap(), Some(m.clone()));
    }

    #[test]
    fn samples_check_at_their_target() {
        let targets = [Type::NAT, Type::BOOL, Type::Unknown, Type::dyn_fun()];
        for t in &targets {
            for seed in 0..1000 {
                let cfg = GenConfig {
                    seed,
                    ..GenConfig::default()
                };
                let m = gen_term(&cfg, t).unwrap();
                assert!(m.size() <= cfg.max_size, "{seed}: size {}", m.size());
                assert!(check(&[], &m, t).is_ok(), "seed {seed} at {t}");
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = GenConfig {
            seed: 42,
            ..GenConfig::default()
        };
        let t = Type::arrow(Type::NAT, Type::Unknown);
        assert_eq!(gen_term(&cfg, &t).unwrap(), gen_term(&cfg, &t).unwrap());
    }

    #[test]
    fn starved_weights_exhaust() {
        let weights = Weights {
            var: 0,
            lit: 0,
            lam: 0,
            app: 0,
            inject: 0,
            project: 0,
            blame: 0,
            diverge: 0,
        };
        let cfg = GenConfig {
            weights,
            ..GenConfig::default()
        };
        assert!(matches!(
            gen_term(&cfg, &Type::NAT),
            Err(GenError::GenerationExhausted { .. })
        ));
    }
}
