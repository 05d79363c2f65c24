//! Differential testing of the gradual guarantee on generated pairs.

pub mod campaign;
pub mod gen;
pub mod mutate;
pub mod verdict;

pub use campaign::{fuzz_campaign, CampaignReport};
pub use gen::{gen_term, omega, GenConfig, GenError, Generator, Weights};
pub use mutate::{abstract_mutate, refl_term_prec, MutateError, MutationMode, PrecPair};
pub use verdict::{
    gradual_verdict, sem_approx, Clause, Dir, SemError, ThreeValued, TimeoutPattern, Verdict,
};
