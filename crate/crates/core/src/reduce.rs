//! Small-step reduction with frames, fuel-bounded evaluation and
//! exact-length probing.
//!
//! Evaluation is call-by-value and left to right: the function position of
//! an application reduces before the argument, and casts reduce their body.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::abt::{bracket, Term};
use crate::syntax;
use crate::types::{is_value, Ground};

/// A single evaluation-context layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Frame {
    /// `□ · M`
    AppL(Term),
    /// `V · □`; the stored term must be a value.
    AppR(Term),
    /// `□⟨G!⟩`
    InjF(Ground),
    /// `□⟨H?⟩`
    ProjF(Ground),
}

impl Frame {
    pub fn plug(&self, m: Term) -> Term {
        match self {
            Frame::AppL(arg) => Term::app(m, arg.clone()),
            Frame::AppR(f) => Term::app(f.clone(), m),
            Frame::InjF(g) => Term::inject(m, *g),
            Frame::ProjF(h) => Term::project(m, *h),
        }
    }

    pub fn tag(&self) -> FrameTag {
        match self {
            Frame::AppL(_) => FrameTag::AppL,
            Frame::AppR(_) => FrameTag::AppR,
            Frame::InjF(_) => FrameTag::Inject,
            Frame::ProjF(_) => FrameTag::Project,
        }
    }
}

/// Possibly-empty frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PEFrame {
    Hole,
    F(Frame),
}

impl PEFrame {
    pub fn plug(&self, m: Term) -> Term {
        match self {
            PEFrame::Hole => m,
            PEFrame::F(f) => f.plug(m),
        }
    }
}

pub fn plug(f: &PEFrame, m: Term) -> Term {
    f.plug(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrameTag {
    AppL,
    AppR,
    Inject,
    Project,
}

/// Which reduction rule fired; congruence wraps the rule used under the frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    Beta,
    Collapse,
    Collide,
    Cong(Frame, Box<Rule>),
    CongBlame(Frame),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleTag {
    Beta,
    Collapse,
    Collide,
    /// Blame propagating out of a frame.
    Blame,
}

impl Rule {
    /// The rule applied at the focus, beneath all congruences.
    pub fn root(&self) -> RuleTag {
        match self {
            Rule::Beta => RuleTag::Beta,
            Rule::Collapse => RuleTag::Collapse,
            Rule::Collide => RuleTag::Collide,
            Rule::Cong(_, inner) => inner.root(),
            Rule::CongBlame(_) => RuleTag::Blame,
        }
    }

    /// Frames from the outside in, ending at the focus.
    pub fn path(&self) -> Vec<FrameTag> {
        let mut out = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                Rule::Cong(f, inner) => {
                    out.push(f.tag());
                    cur = inner;
                }
                Rule::CongBlame(f) => {
                    out.push(f.tag());
                    return out;
                }
                _ => return out,
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepResult {
    pub next: Term,
    pub rule: Rule,
}

/// Reduce `m` in one step. `None` for values, `blame`, and stuck terms,
/// which only arise from ill-typed input.
pub fn step(m: &Term) -> Option<StepResult> {
    match m {
        Term::App(l, r) => {
            if !is_value(l) {
                let frame = || Frame::AppL((**r).clone());
                if l.is_blame() {
                    return Some(StepResult {
                        next: Term::Blame,
                        rule: Rule::CongBlame(frame()),
                    });
                }
                let inner = step(l)?;
                return Some(StepResult {
                    next: Term::app(inner.next, (**r).clone()),
                    rule: Rule::Cong(frame(), Box::new(inner.rule)),
                });
            }
            if r.is_blame() {
                return Some(StepResult {
                    next: Term::Blame,
                    rule: Rule::CongBlame(Frame::AppR((**l).clone())),
                });
            }
            if !is_value(r) {
                let inner = step(r)?;
                return Some(StepResult {
                    next: Term::app((**l).clone(), inner.next),
                    rule: Rule::Cong(Frame::AppR((**l).clone()), Box::new(inner.rule)),
                });
            }
            match &**l {
                Term::Lam(body) => Some(StepResult {
                    next: bracket(body, r),
                    rule: Rule::Beta,
                }),
                _ => None,
            }
        }
        Term::Inject(body, g) => {
            if body.is_blame() {
                return Some(StepResult {
                    next: Term::Blame,
                    rule: Rule::CongBlame(Frame::InjF(*g)),
                });
            }
            if is_value(body) {
                return None;
            }
            let inner = step(body)?;
            Some(StepResult {
                next: Term::inject(inner.next, *g),
                rule: Rule::Cong(Frame::InjF(*g), Box::new(inner.rule)),
            })
        }
        Term::Project(body, h) => {
            if body.is_blame() {
                return Some(StepResult {
                    next: Term::Blame,
                    rule: Rule::CongBlame(Frame::ProjF(*h)),
                });
            }
            if is_value(body) {
                return match &**body {
                    Term::Inject(v, g) if g == h => Some(StepResult {
                        next: (**v).clone(),
                        rule: Rule::Collapse,
                    }),
                    Term::Inject(_, _) => Some(StepResult {
                        next: Term::Blame,
                        rule: Rule::Collide,
                    }),
                    _ => None,
                };
            }
            let inner = step(body)?;
            Some(StepResult {
                next: Term::project(inner.next, *h),
                rule: Rule::Cong(Frame::ProjF(*h), Box::new(inner.rule)),
            })
        }
        Term::Var(_) | Term::Lam(_) | Term::Lit(_) | Term::Blame => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("stuck term: {}", syntax::print_term(.0))]
pub struct StuckTerm(pub Term);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Val { value: Term, steps: usize },
    Blamed { steps: usize },
    Timeout { fuel: usize },
}

impl Outcome {
    pub fn is_val(&self) -> bool {
        matches!(self, Outcome::Val { .. })
    }

    pub fn is_blamed(&self) -> bool {
        matches!(self, Outcome::Blamed { .. })
    }

    pub fn is_timeout(&self) -> bool {
        matches!(self, Outcome::Timeout { .. })
    }

    pub fn value(&self) -> Option<&Term> {
        match self {
            Outcome::Val { value, .. } => Some(value),
            _ => None,
        }
    }

    /// Number of steps taken before halting, if the term halted.
    pub fn halted_after(&self) -> Option<usize> {
        match self {
            Outcome::Val { steps, .. } | Outcome::Blamed { steps } => Some(*steps),
            Outcome::Timeout { .. } => None,
        }
    }
}

/// One reduction step as recorded by [`eval_traced`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    /// 1-based position of the step in the reduction sequence.
    pub index: usize,
    pub rule: RuleTag,
    pub path: Vec<FrameTag>,
    pub term: Term,
}

impl Serialize for TraceStep {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("TraceStep", 4)?;
        s.serialize_field("index", &self.index)?;
        s.serialize_field("rule", &self.rule)?;
        s.serialize_field("path", &self.path)?;
        s.serialize_field("term", &syntax::print_term(&self.term))?;
        s.end()
    }
}

fn run(
    m: &Term,
    fuel: usize,
    mut on_step: impl FnMut(usize, &StepResult),
) -> Result<Outcome, StuckTerm> {
    let mut cur = m.clone();
    let mut steps = 0;
    loop {
        if is_value(&cur) {
            return Ok(Outcome::Val { value: cur, steps });
        }
        if cur.is_blame() {
            return Ok(Outcome::Blamed { steps });
        }
        if steps == fuel {
            return Ok(Outcome::Timeout { fuel });
        }
        match step(&cur) {
            Some(next) => {
                steps += 1;
                on_step(steps, &next);
                cur = next.next;
            }
            None => return Err(StuckTerm(cur)),
        }
    }
}

/// Take at most `fuel` steps.
pub fn eval(m: &Term, fuel: usize) -> Result<Outcome, StuckTerm> {
    run(m, fuel, |_, _| {})
}

pub fn eval_traced(m: &Term, fuel: usize) -> Result<(Outcome, Vec<TraceStep>), StuckTerm> {
    let mut trace = Vec::new();
    let outcome = run(m, fuel, |index, s| {
        trace.push(TraceStep {
            index,
            rule: s.rule.root(),
            path: s.rule.path(),
            term: s.next.clone(),
        });
    })?;
    Ok((outcome, trace))
}

/// The term reached after exactly `k` steps, or `None` if `m` halts sooner.
pub fn run_exact(m: &Term, k: usize) -> Result<Option<Term>, StuckTerm> {
    let mut cur = m.clone();
    for _ in 0..k {
        if is_value(&cur) || cur.is_blame() {
            return Ok(None);
        }
        match step(&cur) {
            Some(next) => cur = next.next,
            None => return Err(StuckTerm(cur)),
        }
    }
    Ok(Some(cur))
}
