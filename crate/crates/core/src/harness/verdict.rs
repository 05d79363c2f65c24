//! Fuel-bounded checks of the gradual guarantee and of semantic
//! approximation at a fixed step index.

use serde::Serialize;
use thiserror::Error;

use crate::abt::Term;
use crate::reduce::{eval, run_exact, Outcome, StuckTerm};

/// The clause of the guarantee a finite run refuted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Clause {
    /// The less precise term blamed while the more precise one reached a value.
    LessBlamesMoreHalts,
}

/// Which side ran out of fuel while its outcome was needed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimeoutPattern {
    LessTimedOut,
    MoreTimedOut,
    BothDivergeSoFar,
}

impl TimeoutPattern {
    pub fn name(self) -> &'static str {
        match self {
            TimeoutPattern::LessTimedOut => "less-timed-out",
            TimeoutPattern::MoreTimedOut => "more-timed-out",
            TimeoutPattern::BothDivergeSoFar => "both-diverge-so-far",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Consistent,
    Violation(Clause),
    Inconclusive(TimeoutPattern),
}

/// Decide the verdict from already computed outcomes.
pub fn verdict_from_outcomes(less: &Outcome, more: &Outcome) -> Verdict {
    match (less, more) {
        (_, Outcome::Blamed { .. }) => Verdict::Consistent,
        (Outcome::Val { .. }, Outcome::Val { .. }) => Verdict::Consistent,
        (Outcome::Blamed { .. }, Outcome::Val { .. }) => {
            Verdict::Violation(Clause::LessBlamesMoreHalts)
        }
        (Outcome::Timeout { .. }, Outcome::Val { .. }) => {
            Verdict::Inconclusive(TimeoutPattern::LessTimedOut)
        }
        (Outcome::Timeout { .. }, Outcome::Timeout { .. }) => {
            Verdict::Inconclusive(TimeoutPattern::BothDivergeSoFar)
        }
        (_, Outcome::Timeout { .. }) => Verdict::Inconclusive(TimeoutPattern::MoreTimedOut),
    }
}

/// Run both sides with `fuel` steps and compare their outcomes.
pub fn gradual_verdict(m: &Term, mp: &Term, fuel: usize) -> Result<Verdict, StuckTerm> {
    Ok(verdict_from_outcomes(&eval(m, fuel)?, &eval(mp, fuel)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ThreeValued {
    Holds,
    Fails,
    Unknown,
}

/// Direction of approximation: `≼` steps the less precise side exactly
/// `k` times, `≽` the more precise side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dir {
    Le,
    Ge,
}

impl Dir {
    pub const BOTH: [Dir; 2] = [Dir::Le, Dir::Ge];
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemError {
    #[error("fuel {fuel} is below the step index {k}")]
    FuelBelowIndex { fuel: usize, k: usize },
    #[error(transparent)]
    Stuck(#[from] StuckTerm),
}

/// Decide approximation at index `k` from outcomes computed with fuel at
/// least `k`.
pub fn sem_approx_from_outcomes(dir: Dir, k: usize, less: &Outcome, more: &Outcome) -> ThreeValued {
    let (stepped, probed) = match dir {
        Dir::Le => (less, more),
        Dir::Ge => (more, less),
    };
    // A run that did not halt in fewer than k steps has a reduction of length exactly k.
    match stepped.halted_after() {
        None => return ThreeValued::Holds,
        Some(j) if j >= k => return ThreeValued::Holds,
        Some(_) => {}
    }
    match (dir, stepped, probed) {
        (_, _, Outcome::Timeout { .. }) if !(dir == Dir::Ge && stepped.is_blamed()) => {
            ThreeValued::Unknown
        }
        (Dir::Le, Outcome::Val { .. }, _) => ThreeValued::Holds,
        (Dir::Le, Outcome::Blamed { .. }, Outcome::Blamed { .. }) => ThreeValued::Holds,
        (Dir::Le, Outcome::Blamed { .. }, _) => ThreeValued::Fails,
        (Dir::Ge, Outcome::Blamed { .. }, _) => ThreeValued::Holds,
        (Dir::Ge, Outcome::Val { .. }, Outcome::Val { .. }) => ThreeValued::Holds,
        (Dir::Ge, Outcome::Val { .. }, _) => ThreeValued::Fails,
        (_, Outcome::Timeout { .. }, _) => unreachable!("halted runs only"),
    }
}

/// Check `m ⊑ m′` semantically at step index `k` in direction `dir`.
pub fn sem_approx(
    dir: Dir,
    m: &Term,
    mp: &Term,
    k: usize,
    fuel: usize,
) -> Result<ThreeValued, SemError> {
    if fuel < k {
        return Err(SemError::FuelBelowIndex { fuel, k });
    }
    let (stepped, probed) = match dir {
        Dir::Le => (m, mp),
        Dir::Ge => (mp, m),
    };
    if run_exact(stepped, k)?.is_some() {
        return Ok(ThreeValued::Holds);
    }
    let s = eval(stepped, k)?;
    if dir == Dir::Ge && s.is_blamed() {
        return Ok(ThreeValued::Holds);
    }
    let p = eval(probed, fuel)?;
    let (less, more) = match dir {
        Dir::Le => (s, p),
        Dir::Ge => (p, s),
    };
    Ok(sem_approx_from_outcomes(dir, k, &less, &more))
}
