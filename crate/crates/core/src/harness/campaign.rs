//! Seeded campaigns over generated precision pairs.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::gen::{GenConfig, Generator};
use super::mutate::{abstract_mutate, MutationMode};
use super::verdict::{
    sem_approx_from_outcomes, verdict_from_outcomes, Clause, Dir, ThreeValued, Verdict,
};
use crate::abt::Term;
use crate::reduce::{eval, eval_traced, TraceStep};
use crate::syntax::print_term;

/// Step indices at which semantic approximation is checked for every pair.
pub const SEM_INDICES: [usize; 5] = [0, 1, 2, 4, 8];

/// Longest trace kept per side of a violation.
pub const TRACE_CAP: usize = 64;

/// Terms drawn per pair before it is skipped. A bare `blame` at a
/// non-ground type offers no edit site.
const DRAWS: usize = 4;

/// Seed of pair `index`, a SplitMix64 scramble of the campaign seed.
pub fn pair_seed(seed: u64, index: usize) -> u64 {
    let mut z = seed.wrapping_add(
        (index as u64)
            .wrapping_add(1)
            .wrapping_mul(0x9E37_79B9_7F4A_7C15),
    );
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Totals {
    pub consistent: usize,
    pub violation: usize,
    pub inconclusive: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Traces {
    pub less: Vec<TraceStep>,
    pub more: Vec<TraceStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ViolationRecord {
    pub index: usize,
    pub seed: u64,
    pub less: String,
    pub more: String,
    /// Whether the pair carries a checked precision derivation.
    pub validated: bool,
    pub clause: Clause,
    pub traces: Traces,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SemFailure {
    pub index: usize,
    pub seed: u64,
    pub dir: Dir,
    pub k: usize,
    pub less: String,
    pub more: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CampaignReport {
    pub config: GenConfig,
    pub pairs: usize,
    pub totals: Totals,
    pub inconclusive_reasons: BTreeMap<&'static str, usize>,
    /// Pairs skipped because generation or mutation found nothing to do.
    pub skipped: usize,
    pub violations: Vec<ViolationRecord>,
    pub sem_approx_failures: Vec<SemFailure>,
}

impl CampaignReport {
    pub fn inconclusive_rate(&self) -> f64 {
        let judged = self.totals.consistent + self.totals.violation + self.totals.inconclusive;
        if judged == 0 {
            0.0
        } else {
            self.totals.inconclusive as f64 / judged as f64
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// One pair of a campaign before evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CampaignPair {
    pub index: usize,
    pub seed: u64,
    pub less: Term,
    pub more: Term,
    pub validated: bool,
}

/// The pair at position `index`, or `None` if it was skipped.
pub fn campaign_pair(cfg: &GenConfig, index: usize) -> Option<CampaignPair> {
    if cfg.adversarial && index == 0 {
        // Control pair: blame is never below a value, so this must be flagged.
        return Some(CampaignPair {
            index,
            seed: cfg.seed,
            less: Term::Blame,
            more: Term::num(4),
            validated: false,
        });
    }
    let seed = pair_seed(cfg.seed, index);
    let mut g = Generator::new(&GenConfig {
        seed,
        ..cfg.clone()
    });
    let mode = if cfg.adversarial {
        MutationMode::Adversarial
    } else {
        MutationMode::Standard
    };
    let pair = (0..DRAWS).find_map(|_| {
        let target = g.random_type();
        let more = g.term(&target).ok()?.erase();
        abstract_mutate(&more, &target, cfg.edits, g.next_u64(), mode).ok()
    })?;
    if cfg.adversarial && index % 2 == 1 {
        Some(CampaignPair {
            index,
            seed,
            less: pair.more,
            more: pair.less,
            validated: false,
        })
    } else {
        Some(CampaignPair {
            index,
            seed,
            less: pair.less,
            more: pair.more,
            validated: true,
        })
    }
}

enum PairResult {
    Skipped,
    Judged {
        verdict: Verdict,
        violation: Option<ViolationRecord>,
        failures: Vec<SemFailure>,
    },
}

fn traced(m: &Term, fuel: usize) -> Vec<TraceStep> {
    let (_, trace) = eval_traced(m, fuel.min(TRACE_CAP)).expect("campaign terms are well-typed");
    trace
}

fn judge(cfg: &GenConfig, index: usize) -> PairResult {
    let Some(p) = campaign_pair(cfg, index) else {
        return PairResult::Skipped;
    };
    let fuel = cfg.fuel.max(SEM_INDICES[SEM_INDICES.len() - 1]);
    let less = eval(&p.less, fuel).expect("campaign terms are well-typed");
    let more = eval(&p.more, fuel).expect("campaign terms are well-typed");
    let verdict = verdict_from_outcomes(&less, &more);
    let violation = match verdict {
        Verdict::Violation(clause) => Some(ViolationRecord {
            index,
            seed: p.seed,
            less: print_term(&p.less),
            more: print_term(&p.more),
            validated: p.validated,
            clause,
            traces: Traces {
                less: traced(&p.less, fuel),
                more: traced(&p.more, fuel),
            },
        }),
        _ => None,
    };
    let mut failures = Vec::new();
    if p.validated {
        for k in SEM_INDICES {
            for dir in Dir::BOTH {
                if sem_approx_from_outcomes(dir, k, &less, &more) == ThreeValued::Fails {
                    failures.push(SemFailure {
                        index,
                        seed: p.seed,
                        dir,
                        k,
                        less: print_term(&p.less),
                        more: print_term(&p.more),
                    });
                }
            }
        }
    }
    PairResult::Judged {
        verdict,
        violation,
        failures,
    }
}

/// Generate `n_pairs` pairs, judge each and merge in index order.
pub fn fuzz_campaign(cfg: &GenConfig, n_pairs: usize) -> CampaignReport {
    let results: Vec<PairResult> = (0..n_pairs)
        .into_par_iter()
        .map(|i| judge(cfg, i))
        .collect();
    let mut report = CampaignReport {
        config: cfg.clone(),
        pairs: n_pairs,
        totals: Totals::default(),
        inconclusive_reasons: BTreeMap::new(),
        skipped: 0,
        violations: Vec::new(),
        sem_approx_failures: Vec::new(),
    };
    for r in results {
        match r {
            PairResult::Skipped => report.skipped += 1,
            PairResult::Judged {
                verdict,
                violation,
                failures,
            } => {
                match verdict {
                    Verdict::Consistent => report.totals.consistent += 1,
                    Verdict::Violation(_) => report.totals.violation += 1,
                    Verdict::Inconclusive(why) => {
                        report.totals.inconclusive += 1;
                        *report.inconclusive_reasons.entry(why.name()).or_insert(0) += 1;
                    }
                }
                report.violations.extend(violation);
                report.sem_approx_failures.extend(failures);
            }
        }
    }
    report
}
