//! General casts `⟨A ⇒ B⟩` compiled to injections, projections and lambdas.

use thiserror::Error;

use crate::abt::Term;
use crate::typecheck::{check_core, AnnTerm};
use crate::types::{consistent, ground_of, Ground, Type};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CastError {
    #[error("cannot cast between inconsistent types {0} and {1}")]
    Inconsistent(Type, Type),
}

/// A cast to be compiled, `subject ⦂ source` cast to `target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CastRequest {
    pub source: Type,
    pub target: Type,
    pub subject: Term,
}

impl CastRequest {
    pub fn compile(&self) -> Result<Term, CastError> {
        compile_cast(&self.source, &self.target, &self.subject)
    }
}

/// Ground type an arrow factors through on its way to or from `★`.
fn is_ground_type(a: &Type) -> Option<Ground> {
    match a {
        Type::Base(b) => Some(Ground::Base(*b)),
        Type::Arrow(d, c) if **d == Type::Unknown && **c == Type::Unknown => Some(Ground::Fun),
        _ => None,
    }
}

/// Operations the compiler needs from a term representation.
trait CastTarget: Sized {
    fn inject(self, g: Ground) -> Self;
    fn project(self, h: Ground) -> Self;
    fn shift(&self) -> Self;
    fn var0() -> Self;
    fn app(f: Self, a: Self) -> Self;
    fn lam(dom: &Type, body: Self) -> Self;
}

impl CastTarget for Term {
    fn inject(self, g: Ground) -> Term {
        Term::inject(self, g)
    }
    fn project(self, h: Ground) -> Term {
        Term::project(self, h)
    }
    fn shift(&self) -> Term {
        Term::shift(self)
    }
    fn var0() -> Term {
        Term::Var(0)
    }
    fn app(f: Term, a: Term) -> Term {
        Term::app(f, a)
    }
    fn lam(_dom: &Type, body: Term) -> Term {
        Term::lam(body)
    }
}

impl CastTarget for AnnTerm {
    fn inject(self, g: Ground) -> AnnTerm {
        AnnTerm::inject(self, g)
    }
    fn project(self, h: Ground) -> AnnTerm {
        AnnTerm::project(self, h)
    }
    fn shift(&self) -> AnnTerm {
        self.shift_from(0)
    }
    fn var0() -> AnnTerm {
        AnnTerm::var(0)
    }
    fn app(f: AnnTerm, a: AnnTerm) -> AnnTerm {
        AnnTerm::app(f, a)
    }
    fn lam(dom: &Type, body: AnnTerm) -> AnnTerm {
        AnnTerm::lam(dom.clone(), body)
    }
}

fn compile<T: CastTarget + Clone>(a: &Type, b: &Type, m: T) -> Result<T, CastError> {
    if !consistent(a, b) {
        return Err(CastError::Inconsistent(a.clone(), b.clone()));
    }
    if a == b {
        return Ok(m);
    }
    match (a, b) {
        (_, Type::Unknown) => match is_ground_type(a) {
            Some(g) => Ok(m.inject(g)),
            None => Ok(compile(a, &Type::dyn_fun(), m)?.inject(Ground::Fun)),
        },
        (Type::Unknown, _) => match is_ground_type(b) {
            Some(h) => Ok(m.project(h)),
            None => {
                let h = ground_of(b).expect("a type consistent with ★ other than ★ has a ground");
                compile(&Type::dyn_fun(), b, m.project(h))
            }
        },
        (Type::Arrow(da, ca), Type::Arrow(db, cb)) => {
            let arg = compile(db, da, T::var0())?;
            let body = compile(ca, cb, T::app(m.shift(), arg))?;
            Ok(T::lam(db, body))
        }
        _ => unreachable!("consistent distinct types are handled above"),
    }
}

/// Compile the cast of `m ⦂ a` to `b`.
pub fn compile_cast(a: &Type, b: &Type, m: &Term) -> Result<Term, CastError> {
    debug_assert!(
        !m.is_closed() || check_core(&[], m, a).is_ok(),
        "cast subject does not have the source type"
    );
    compile(a, b, m.clone())
}

/// As [`compile_cast`], with eta-expansions annotated by their domain.
pub fn compile_cast_ann(a: &Type, b: &Type, m: &AnnTerm) -> Result<AnnTerm, CastError> {
    compile(a, b, m.clone())
}
