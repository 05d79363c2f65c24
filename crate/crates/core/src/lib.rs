//! A workbench for a gradually typed cast calculus: typing, small-step
//! evaluation with blame, precision derivations, cast compilation and a
//! differential test harness for the gradual guarantee.

pub mod abt;
pub mod castcomp;
pub mod harness;
pub mod precision;
pub mod reduce;
pub mod syntax;
pub mod typecheck;
pub mod types;
mod unify;

pub use abt::{bracket, rename, subst_apply, Renaming, Subst, Term};
pub use castcomp::{compile_cast, compile_cast_ann, CastError};
pub use precision::{
    infer_term_prec, infer_term_prec_at, refl_prec, type_prec, validate_term_prec, PrecTriple,
    TermPrecDeriv, TypePrecDeriv,
};
pub use reduce::{eval, eval_traced, run_exact, step, Outcome, StuckTerm};
pub use syntax::{parse, parse_type, print_ann, print_term, ParseError};
pub use typecheck::{check, infer, AnnTerm, TypeError};
pub use types::{consistent, ground_of, ground_to_type, is_value, Base, Ground, Lit, Type};
