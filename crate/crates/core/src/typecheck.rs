//! Typing for the cast calculus.
//!
//! Surface programs are [`AnnTerm`]s: lambdas carry their domain and
//! `blame` carries a type, which makes inference syntax directed. Core
//! [`Term`]s carry no annotations; [`infer_core`] reconstructs lambda
//! domains by unification and reads unconstrained domains as `★`.

use std::fmt;

use thiserror::Error;

use crate::abt::Term;
use crate::types::{ground_to_type, Ground, Lit, Type};
use crate::unify::{MType, Metas};

/// Byte range in the source text a node was parsed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Span {
        Span { start, end }
    }
}

#[derive(Debug, Clone)]
pub struct AnnTerm {
    pub node: AnnNode,
    pub span: Option<Span>,
}

/// Equality ignores spans.
impl PartialEq for AnnTerm {
    fn eq(&self, other: &AnnTerm) -> bool {
        self.node == other.node
    }
}

impl Eq for AnnTerm {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnnNode {
    Var(usize),
    Lam(Type, Box<AnnTerm>),
    App(Box<AnnTerm>, Box<AnnTerm>),
    Lit(Lit),
    Inject(Box<AnnTerm>, Ground),
    Project(Box<AnnTerm>, Ground),
    Blame(Type),
}

impl From<AnnNode> for AnnTerm {
    fn from(node: AnnNode) -> AnnTerm {
        AnnTerm { node, span: None }
    }
}

impl AnnTerm {
    pub fn with_span(node: AnnNode, span: Span) -> AnnTerm {
        AnnTerm {
            node,
            span: Some(span),
        }
    }

    pub fn var(i: usize) -> AnnTerm {
        AnnNode::Var(i).into()
    }

    pub fn lam(dom: Type, body: AnnTerm) -> AnnTerm {
        AnnNode::Lam(dom, Box::new(body)).into()
    }

    pub fn app(f: AnnTerm, a: AnnTerm) -> AnnTerm {
        AnnNode::App(Box::new(f), Box::new(a)).into()
    }

    pub fn lit(c: Lit) -> AnnTerm {
        AnnNode::Lit(c).into()
    }

    pub fn num(n: u64) -> AnnTerm {
        AnnTerm::lit(Lit::Num(n))
    }

    pub fn bool(b: bool) -> AnnTerm {
        AnnTerm::lit(Lit::Bool(b))
    }

    pub fn inject(m: AnnTerm, g: Ground) -> AnnTerm {
        AnnNode::Inject(Box::new(m), g).into()
    }

    pub fn project(m: AnnTerm, h: Ground) -> AnnTerm {
        AnnNode::Project(Box::new(m), h).into()
    }

    pub fn blame(a: Type) -> AnnTerm {
        AnnNode::Blame(a).into()
    }

    pub fn size(&self) -> usize {
        match &self.node {
            AnnNode::Var(_) | AnnNode::Lit(_) | AnnNode::Blame(_) => 1,
            AnnNode::Lam(_, n) | AnnNode::Inject(n, _) | AnnNode::Project(n, _) => 1 + n.size(),
            AnnNode::App(l, m) => 1 + l.size() + m.size(),
        }
    }

    pub fn erase(&self) -> Term {
        match &self.node {
            AnnNode::Var(i) => Term::Var(*i),
            AnnNode::Lam(_, n) => Term::lam(n.erase()),
            AnnNode::App(l, m) => Term::app(l.erase(), m.erase()),
            AnnNode::Lit(c) => Term::Lit(*c),
            AnnNode::Inject(n, g) => Term::inject(n.erase(), *g),
            AnnNode::Project(n, h) => Term::project(n.erase(), *h),
            AnnNode::Blame(_) => Term::Blame,
        }
    }

    /// Shift free variables at or above `cutoff` up by one. Spans are dropped.
    pub fn shift_from(&self, cutoff: usize) -> AnnTerm {
        match &self.node {
            AnnNode::Var(i) if *i >= cutoff => {
                AnnTerm::var(i.checked_add(1).expect("de Bruijn index overflow"))
            }
            AnnNode::Var(i) => AnnTerm::var(*i),
            AnnNode::Lam(a, n) => AnnTerm::lam(a.clone(), n.shift_from(cutoff + 1)),
            AnnNode::App(l, m) => AnnTerm::app(l.shift_from(cutoff), m.shift_from(cutoff)),
            AnnNode::Lit(c) => AnnTerm::lit(*c),
            AnnNode::Inject(n, g) => AnnTerm::inject(n.shift_from(cutoff), *g),
            AnnNode::Project(n, h) => AnnTerm::project(n.shift_from(cutoff), *h),
            AnnNode::Blame(a) => AnnTerm::blame(a.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeErrorKind {
    #[error("unbound variable #{0}")]
    UnboundVariable(usize),
    #[error("application of a non-function of type {0}")]
    AppNotArrow(Type),
    #[error("argument has type {found}, expected {expected}")]
    AppArgMismatch { expected: Type, found: Type },
    #[error("injected term has type {found}, expected {expected}")]
    InjectBodyMismatch { expected: Type, found: Type },
    #[error("projected term has type {0}, expected *")]
    ProjectBodyNotUnknown(Type),
    #[error("term has type {inferred}, expected {expected}")]
    TypeMismatch { expected: Type, inferred: Type },
}

impl TypeErrorKind {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            TypeErrorKind::UnboundVariable(_) => "unbound-variable",
            TypeErrorKind::AppNotArrow(_) => "app-not-arrow",
            TypeErrorKind::AppArgMismatch { .. } => "app-arg-mismatch",
            TypeErrorKind::InjectBodyMismatch { .. } => "inject-body-mismatch",
            TypeErrorKind::ProjectBodyNotUnknown(_) => "project-body-not-unknown",
            TypeErrorKind::TypeMismatch { .. } => "type-mismatch",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct TypeError {
    pub kind: TypeErrorKind,
    pub span: Option<Span>,
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind.code(), self.kind)
    }
}

impl TypeError {
    fn at(kind: TypeErrorKind, m: &AnnTerm) -> TypeError {
        TypeError { kind, span: m.span }
    }
}

fn extend(ctx: &[Type], a: &Type) -> Vec<Type> {
    let mut out = Vec::with_capacity(ctx.len() + 1);
    out.push(a.clone());
    out.extend_from_slice(ctx);
    out
}

/// Infer the type of `m` under `ctx` (index `i` of `ctx` types variable `i`),
/// returning the erased term alongside.
pub fn infer(ctx: &[Type], m: &AnnTerm) -> Result<(Term, Type), TypeError> {
    let ty = infer_type(ctx, m)?;
    Ok((m.erase(), ty))
}

/// Check `m` against `a`. `blame` checks against every type.
pub fn check(ctx: &[Type], m: &AnnTerm, a: &Type) -> Result<Term, TypeError> {
    check_type(ctx, m, a, |expected, inferred| {
        TypeErrorKind::TypeMismatch { expected, inferred }
    })?;
    Ok(m.erase())
}

fn check_type(
    ctx: &[Type],
    m: &AnnTerm,
    a: &Type,
    mismatch: impl FnOnce(Type, Type) -> TypeErrorKind,
) -> Result<(), TypeError> {
    if let AnnNode::Blame(_) = m.node {
        return Ok(());
    }
    let found = infer_type(ctx, m)?;
    if &found == a {
        Ok(())
    } else {
        Err(TypeError::at(mismatch(a.clone(), found), m))
    }
}

fn infer_type(ctx: &[Type], m: &AnnTerm) -> Result<Type, TypeError> {
    match &m.node {
        AnnNode::Var(i) => ctx
            .get(*i)
            .cloned()
            .ok_or_else(|| TypeError::at(TypeErrorKind::UnboundVariable(*i), m)),
        AnnNode::Lit(c) => Ok(Type::Base(c.base())),
        AnnNode::Lam(dom, body) => {
            let cod = infer_type(&extend(ctx, dom), body)?;
            Ok(Type::arrow(dom.clone(), cod))
        }
        AnnNode::App(f, arg) => match infer_type(ctx, f)? {
            Type::Arrow(dom, cod) => {
                check_type(ctx, arg, &dom, |expected, found| {
                    TypeErrorKind::AppArgMismatch { expected, found }
                })?;
                Ok(*cod)
            }
            other => Err(TypeError::at(TypeErrorKind::AppNotArrow(other), f)),
        },
        AnnNode::Inject(body, g) => {
            check_type(ctx, body, &ground_to_type(*g), |expected, found| {
                TypeErrorKind::InjectBodyMismatch { expected, found }
            })?;
            Ok(Type::Unknown)
        }
        AnnNode::Project(body, h) => {
            check_type(ctx, body, &Type::Unknown, |_, found| {
                TypeErrorKind::ProjectBodyNotUnknown(found)
            })?;
            Ok(ground_to_type(*h))
        }
        AnnNode::Blame(a) => Ok(a.clone()),
    }
}

/// Failure to type an unannotated core term.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoreTypeError {
    #[error("unbound variable #{0}")]
    UnboundVariable(usize),
    #[error("no typing exists")]
    Untypable,
}

/// Principal typing of a core term with unconstrained metavariables read as `★`.
pub fn infer_core(ctx: &[Type], m: &Term) -> Result<Type, CoreTypeError> {
    let mut metas = Metas::new();
    let mctx: Vec<MType> = ctx.iter().map(MType::from).collect();
    let t = infer_meta(&mut metas, &mctx, m)?;
    Ok(metas.default_type(&t))
}

/// Whether `m` has type `a` under `ctx` for some choice of lambda domains.
pub fn check_core(ctx: &[Type], m: &Term, a: &Type) -> Result<(), CoreTypeError> {
    let mut metas = Metas::new();
    let mctx: Vec<MType> = ctx.iter().map(MType::from).collect();
    let t = infer_meta(&mut metas, &mctx, m)?;
    if metas.unify(&t, &MType::from(a)) {
        Ok(())
    } else {
        Err(CoreTypeError::Untypable)
    }
}

/// Annotate a core term at type `a`, reading unconstrained lambda domains
/// and blame types as `★`.
pub fn elaborate_core(ctx: &[Type], m: &Term, a: &Type) -> Result<AnnTerm, CoreTypeError> {
    let mut metas = Metas::new();
    let mctx: Vec<MType> = ctx.iter().map(MType::from).collect();
    let mut notes = Vec::new();
    let t = infer_noted(&mut metas, &mctx, m, &mut notes)?;
    if !metas.unify(&t, &MType::from(a)) {
        return Err(CoreTypeError::Untypable);
    }
    let mut notes = notes.into_iter();
    Ok(rebuild(&metas, m, &mut notes))
}

// Annotations for lambdas and blames, in pre-order.
fn infer_noted(
    metas: &mut Metas,
    ctx: &[MType],
    m: &Term,
    notes: &mut Vec<MType>,
) -> Result<MType, CoreTypeError> {
    match m {
        Term::Lam(body) => {
            let dom = metas.fresh();
            notes.push(dom.clone());
            let mut inner = Vec::with_capacity(ctx.len() + 1);
            inner.push(dom.clone());
            inner.extend_from_slice(ctx);
            let cod = infer_noted(metas, &inner, body, notes)?;
            Ok(MType::arrow(dom, cod))
        }
        Term::App(f, arg) => {
            let tf = infer_noted(metas, ctx, f, notes)?;
            let ta = infer_noted(metas, ctx, arg, notes)?;
            let cod = metas.fresh();
            if metas.unify(&tf, &MType::arrow(ta, cod.clone())) {
                Ok(cod)
            } else {
                Err(CoreTypeError::Untypable)
            }
        }
        Term::Inject(body, g) => {
            let tb = infer_noted(metas, ctx, body, notes)?;
            if metas.unify(&tb, &MType::ground(*g)) {
                Ok(MType::Unknown)
            } else {
                Err(CoreTypeError::Untypable)
            }
        }
        Term::Project(body, h) => {
            let tb = infer_noted(metas, ctx, body, notes)?;
            if metas.unify(&tb, &MType::Unknown) {
                Ok(MType::ground(*h))
            } else {
                Err(CoreTypeError::Untypable)
            }
        }
        Term::Blame => {
            let t = metas.fresh();
            notes.push(t.clone());
            Ok(t)
        }
        Term::Var(_) | Term::Lit(_) => infer_meta(metas, ctx, m),
    }
}

fn rebuild(metas: &Metas, m: &Term, notes: &mut impl Iterator<Item = MType>) -> AnnTerm {
    match m {
        Term::Var(i) => AnnTerm::var(*i),
        Term::Lit(c) => AnnTerm::lit(*c),
        Term::Lam(body) => {
            let dom = metas.default_type(&notes.next().expect("one note per lambda"));
            AnnTerm::lam(dom, rebuild(metas, body, notes))
        }
        Term::App(f, arg) => {
            let f = rebuild(metas, f, notes);
            AnnTerm::app(f, rebuild(metas, arg, notes))
        }
        Term::Inject(body, g) => AnnTerm::inject(rebuild(metas, body, notes), *g),
        Term::Project(body, h) => AnnTerm::project(rebuild(metas, body, notes), *h),
        Term::Blame => {
            AnnTerm::blame(metas.default_type(&notes.next().expect("one note per blame")))
        }
    }
}

pub(crate) fn infer_meta(
    metas: &mut Metas,
    ctx: &[MType],
    m: &Term,
) -> Result<MType, CoreTypeError> {
    match m {
        Term::Var(i) => ctx
            .get(*i)
            .cloned()
            .ok_or(CoreTypeError::UnboundVariable(*i)),
        Term::Lit(c) => Ok(MType::Base(c.base())),
        Term::Lam(body) => {
            let dom = metas.fresh();
            let mut inner = Vec::with_capacity(ctx.len() + 1);
            inner.push(dom.clone());
            inner.extend_from_slice(ctx);
            let cod = infer_meta(metas, &inner, body)?;
            Ok(MType::arrow(dom, cod))
        }
        Term::App(f, arg) => {
            let tf = infer_meta(metas, ctx, f)?;
            let ta = infer_meta(metas, ctx, arg)?;
            let cod = metas.fresh();
            if metas.unify(&tf, &MType::arrow(ta, cod.clone())) {
                Ok(cod)
            } else {
                Err(CoreTypeError::Untypable)
            }
        }
        Term::Inject(body, g) => {
            let tb = infer_meta(metas, ctx, body)?;
            if metas.unify(&tb, &MType::ground(*g)) {
                Ok(MType::Unknown)
            } else {
                Err(CoreTypeError::Untypable)
            }
        }
        Term::Project(body, h) => {
            let tb = infer_meta(metas, ctx, body)?;
            if metas.unify(&tb, &MType::Unknown) {
                Ok(MType::ground(*h))
            } else {
                Err(CoreTypeError::Untypable)
            }
        }
        Term::Blame => Ok(metas.fresh()),
    }
}
