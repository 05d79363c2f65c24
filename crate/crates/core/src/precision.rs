//! Type precision `A ⊑ B` and term precision `Γ ⊩ M ⊑ M′ ⦂ c`.
//!
//! Type precision is decided structurally and its derivations are unique.
//! Term precision is found by a backtracking search over the rules. The
//! terms are unannotated, so binder types are metavariables solved by
//! unification; the precision side conditions on binders are solved once a
//! candidate derivation is complete. Every derivation the search returns is
//! re-checked by [`validate_term_prec`].

use serde_json::{json, Value};
use thiserror::Error;

use crate::abt::Term;
use crate::typecheck::{check_core, infer_core, infer_meta};
use crate::types::{ground_of, ground_to_type, Base, Ground, Lit, Type};
use crate::unify::{MType, Metas};

/// Derivation of `A ⊑ B`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TypePrecDeriv {
    /// `★ ⊑ ★`
    UnkUnk,
    /// `★ ⊑ B` from `⌈G⌉ ⊑ B`
    UnkGround(Ground, Box<TypePrecDeriv>),
    BaseP(Base),
    FunP(Box<TypePrecDeriv>, Box<TypePrecDeriv>),
}

impl TypePrecDeriv {
    pub fn unk_ground(g: Ground, sub: TypePrecDeriv) -> TypePrecDeriv {
        TypePrecDeriv::UnkGround(g, Box::new(sub))
    }

    pub fn fun(dom: TypePrecDeriv, cod: TypePrecDeriv) -> TypePrecDeriv {
        TypePrecDeriv::FunP(Box::new(dom), Box::new(cod))
    }

    /// The pair of types this tree concludes, or `None` if a premise does
    /// not fit its rule.
    pub fn conclusion(&self) -> Option<(Type, Type)> {
        match self {
            TypePrecDeriv::UnkUnk => Some((Type::Unknown, Type::Unknown)),
            TypePrecDeriv::UnkGround(g, sub) => {
                let (a, b) = sub.conclusion()?;
                (a == ground_to_type(*g)).then_some((Type::Unknown, b))
            }
            TypePrecDeriv::BaseP(b) => Some((Type::Base(*b), Type::Base(*b))),
            TypePrecDeriv::FunP(d, c) => {
                let (a1, b1) = d.conclusion()?;
                let (a2, b2) = c.conclusion()?;
                Some((Type::arrow(a1, a2), Type::arrow(b1, b2)))
            }
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            TypePrecDeriv::UnkUnk => json!({ "rule": "unk-unk" }),
            TypePrecDeriv::UnkGround(g, sub) => {
                json!({ "rule": "unk", "ground": g.to_string(), "premises": [sub.to_json()] })
            }
            TypePrecDeriv::BaseP(b) => json!({ "rule": "base", "base": b.to_string() }),
            TypePrecDeriv::FunP(d, c) => {
                json!({ "rule": "fun", "premises": [d.to_json(), c.to_json()] })
            }
        }
    }
}

/// Decide `a ⊑ b`, returning its unique derivation.
pub fn type_prec(a: &Type, b: &Type) -> Option<TypePrecDeriv> {
    match (a, b) {
        (Type::Unknown, Type::Unknown) => Some(TypePrecDeriv::UnkUnk),
        (Type::Unknown, _) => {
            let g = ground_of(b)?;
            let sub = type_prec(&ground_to_type(g), b)?;
            Some(TypePrecDeriv::unk_ground(g, sub))
        }
        (Type::Base(x), Type::Base(y)) if x == y => Some(TypePrecDeriv::BaseP(*x)),
        (Type::Arrow(a1, a2), Type::Arrow(b1, b2)) => {
            Some(TypePrecDeriv::fun(type_prec(a1, b1)?, type_prec(a2, b2)?))
        }
        _ => None,
    }
}

/// Reflexivity, by structural recursion on `a`.
pub fn refl_prec(a: &Type) -> TypePrecDeriv {
    match a {
        Type::Unknown => TypePrecDeriv::UnkUnk,
        Type::Base(b) => TypePrecDeriv::BaseP(*b),
        Type::Arrow(d, c) => TypePrecDeriv::fun(refl_prec(d), refl_prec(c)),
    }
}

/// Two precision-related types with the derivation relating them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrecTriple {
    pub less: Type,
    pub more: Type,
    pub deriv: TypePrecDeriv,
}

impl PrecTriple {
    pub fn new(less: Type, more: Type) -> Option<PrecTriple> {
        let deriv = type_prec(&less, &more)?;
        Some(PrecTriple { less, more, deriv })
    }

    pub fn refl(a: Type) -> PrecTriple {
        PrecTriple {
            deriv: refl_prec(&a),
            less: a.clone(),
            more: a,
        }
    }

    fn well_formed(&self) -> bool {
        self.deriv.conclusion() == Some((self.less.clone(), self.more.clone()))
    }
}

/// Derivation of `Γ ⊩ M ⊑ M′ ⦂ c`, one constructor per rule.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TermPrecDeriv {
    PVar(usize),
    PLit(Lit),
    PApp(Box<TermPrecDeriv>, Box<TermPrecDeriv>),
    /// Carries the precision between the two binder types.
    PLam(TypePrecDeriv, Box<TermPrecDeriv>),
    PInjL(Ground, Box<TermPrecDeriv>),
    PInjR(Ground, Box<TermPrecDeriv>),
    PProjL(Ground, Box<TermPrecDeriv>),
    PProjR(Ground, Box<TermPrecDeriv>),
    /// `M ⊑ blame` with `M ⦂ A`.
    PBlame(Type),
}

impl TermPrecDeriv {
    pub fn rule_name(&self) -> &'static str {
        match self {
            TermPrecDeriv::PVar(_) => "var",
            TermPrecDeriv::PLit(_) => "lit",
            TermPrecDeriv::PApp(..) => "app",
            TermPrecDeriv::PLam(..) => "lam",
            TermPrecDeriv::PInjL(..) => "inj-L",
            TermPrecDeriv::PInjR(..) => "inj-R",
            TermPrecDeriv::PProjL(..) => "proj-L",
            TermPrecDeriv::PProjR(..) => "proj-R",
            TermPrecDeriv::PBlame(_) => "blame",
        }
    }

    pub fn size(&self) -> usize {
        match self {
            TermPrecDeriv::PVar(_) | TermPrecDeriv::PLit(_) | TermPrecDeriv::PBlame(_) => 1,
            TermPrecDeriv::PApp(f, a) => 1 + f.size() + a.size(),
            TermPrecDeriv::PLam(_, d)
            | TermPrecDeriv::PInjL(_, d)
            | TermPrecDeriv::PInjR(_, d)
            | TermPrecDeriv::PProjL(_, d)
            | TermPrecDeriv::PProjR(_, d) => 1 + d.size(),
        }
    }

    /// Rule-tagged tree; children are listed in premise order.
    pub fn to_json(&self) -> Value {
        let rule = self.rule_name();
        match self {
            TermPrecDeriv::PVar(i) => json!({ "rule": rule, "index": i }),
            TermPrecDeriv::PLit(c) => json!({ "rule": rule, "literal": lit_text(c) }),
            TermPrecDeriv::PApp(f, a) => {
                json!({ "rule": rule, "premises": [f.to_json(), a.to_json()] })
            }
            TermPrecDeriv::PLam(c, body) => {
                json!({ "rule": rule, "binder": c.to_json(), "premises": [body.to_json()] })
            }
            TermPrecDeriv::PInjL(g, d)
            | TermPrecDeriv::PInjR(g, d)
            | TermPrecDeriv::PProjL(g, d)
            | TermPrecDeriv::PProjR(g, d) => {
                json!({ "rule": rule, "ground": g.to_string(), "premises": [d.to_json()] })
            }
            TermPrecDeriv::PBlame(a) => json!({ "rule": rule, "type": a.to_string() }),
        }
    }
}

fn lit_text(c: &Lit) -> String {
    match c {
        Lit::Num(n) => n.to_string(),
        Lit::Bool(b) => b.to_string(),
    }
}

fn extend(ctx: &[PrecTriple], t: PrecTriple) -> Vec<PrecTriple> {
    let mut out = Vec::with_capacity(ctx.len() + 1);
    out.push(t);
    out.extend_from_slice(ctx);
    out
}

/// The type-precision derivation concluded by `d` for `m ⊑ m′`, if `d` is a
/// correct derivation under `ctx`.
pub fn term_prec_conclusion(
    ctx: &[PrecTriple],
    d: &TermPrecDeriv,
    m: &Term,
    mp: &Term,
) -> Option<TypePrecDeriv> {
    if !ctx.iter().all(PrecTriple::well_formed) {
        return None;
    }
    conclude(ctx, d, m, mp)
}

fn conclude(ctx: &[PrecTriple], d: &TermPrecDeriv, m: &Term, mp: &Term) -> Option<TypePrecDeriv> {
    use TermPrecDeriv::*;
    match d {
        PVar(i) => match (m, mp) {
            (Term::Var(x), Term::Var(y)) if x == i && y == i => {
                ctx.get(*i).map(|t| t.deriv.clone())
            }
            _ => None,
        },
        PLit(c) => match (m, mp) {
            (Term::Lit(x), Term::Lit(y)) if x == c && y == c => {
                Some(TypePrecDeriv::BaseP(c.base()))
            }
            _ => None,
        },
        PApp(fd, ad) => match (m, mp) {
            (Term::App(l, r), Term::App(lp, rp)) => match conclude(ctx, fd, l, lp)? {
                TypePrecDeriv::FunP(dom, cod) => {
                    (conclude(ctx, ad, r, rp)? == *dom).then_some(*cod)
                }
                _ => None,
            },
            _ => None,
        },
        PLam(c, bd) => match (m, mp) {
            (Term::Lam(n), Term::Lam(np)) => {
                let (a, b) = c.conclusion()?;
                let inner = extend(
                    ctx,
                    PrecTriple {
                        less: a,
                        more: b,
                        deriv: c.clone(),
                    },
                );
                let body = conclude(&inner, bd, n, np)?;
                Some(TypePrecDeriv::fun(c.clone(), body))
            }
            _ => None,
        },
        PInjL(g, sd) => match m {
            Term::Inject(n, g2) if g2 == g => {
                let c = conclude(ctx, sd, n, mp)?;
                let (a, _) = c.conclusion()?;
                (a == ground_to_type(*g)).then(|| TypePrecDeriv::unk_ground(*g, c))
            }
            _ => None,
        },
        PInjR(g, sd) => match mp {
            Term::Inject(np, g2) if g2 == g => {
                let c = conclude(ctx, sd, m, np)?;
                (c.conclusion()? == (Type::Unknown, ground_to_type(*g)))
                    .then_some(TypePrecDeriv::UnkUnk)
            }
            _ => None,
        },
        PProjL(h, sd) => match m {
            Term::Project(n, h2) if h2 == h => match conclude(ctx, sd, n, mp)? {
                TypePrecDeriv::UnkGround(g, c) if g == *h => Some(*c),
                _ => None,
            },
            _ => None,
        },
        PProjR(h, sd) => match mp {
            Term::Project(np, h2) if h2 == h => match conclude(ctx, sd, m, np)? {
                TypePrecDeriv::UnkUnk => type_prec(&Type::Unknown, &ground_to_type(*h)),
                _ => None,
            },
            _ => None,
        },
        PBlame(a) => {
            if !mp.is_blame() {
                return None;
            }
            let less: Vec<Type> = ctx.iter().map(|t| t.less.clone()).collect();
            check_core(&less, m, a).ok().map(|_| refl_prec(a))
        }
    }
}

/// Whether `d` is a correct derivation of `ctx ⊩ m ⊑ m′` at its computed
/// type precision.
pub fn validate_term_prec(ctx: &[PrecTriple], d: &TermPrecDeriv, m: &Term, mp: &Term) -> bool {
    term_prec_conclusion(ctx, d, m, mp).is_some()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Less,
    More,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PrecError {
    #[error("the {0:?} term is ill-typed")]
    IllTyped(Side),
}

/// Grace added to `size(m) + size(m′)` for the search depth bound.
const DEPTH_SLACK: usize = 8;

type Pair = (MType, MType);

#[derive(Debug, Clone)]
enum MDeriv {
    Var(usize),
    Lit(Lit),
    App(Box<MDeriv>, Box<MDeriv>),
    Lam(Pair, Box<MDeriv>),
    InjL(Ground, Box<MDeriv>),
    InjR(Ground, Box<MDeriv>),
    ProjL(Ground, Box<MDeriv>),
    ProjR(Ground, Box<MDeriv>),
    Blame(MType),
}

#[derive(Debug, Clone)]
struct State {
    metas: Metas,
    /// Binder pairs that must stand in the precision relation.
    binders: Vec<Pair>,
}

struct Solution {
    metas: Metas,
    deriv: MDeriv,
}

type Cont<'k> = &'k mut dyn FnMut(State, Pair, MDeriv) -> Option<Solution>;

struct Search {
    bound: usize,
}

/// Shape a type must have for `⌈h⌉ ⊑ _` to hold.
fn ground_shape(metas: &mut Metas, h: Ground) -> MType {
    match h {
        Ground::Base(b) => MType::Base(b),
        Ground::Fun => MType::arrow(metas.fresh(), metas.fresh()),
    }
}

impl Search {
    fn go(
        &self,
        st: &State,
        ctx: &[Pair],
        m: &Term,
        mp: &Term,
        depth: usize,
        k: Cont,
    ) -> Option<Solution> {
        if depth > self.bound {
            return None;
        }
        let depth = depth + 1;

        if mp.is_blame() {
            let mut st = st.clone();
            let less: Vec<MType> = ctx.iter().map(|p| p.0.clone()).collect();
            if let Ok(a) = infer_meta(&mut st.metas, &less, m) {
                if let Some(s) = k(st, (a.clone(), a.clone()), MDeriv::Blame(a)) {
                    return Some(s);
                }
            }
        }

        let found = match (m, mp) {
            (Term::Var(x), Term::Var(y)) if x == y => match ctx.get(*x) {
                Some(pair) => k(st.clone(), pair.clone(), MDeriv::Var(*x)),
                None => None,
            },
            (Term::Lit(c), Term::Lit(c2)) if c == c2 => {
                let b = MType::Base(c.base());
                k(st.clone(), (b.clone(), b), MDeriv::Lit(*c))
            }
            (Term::App(l, r), Term::App(lp, rp)) => {
                self.go(st, ctx, l, lp, depth, &mut |mut st, (tf, tfp), dl| {
                    let (a, b, c, d) = (
                        st.metas.fresh(),
                        st.metas.fresh(),
                        st.metas.fresh(),
                        st.metas.fresh(),
                    );
                    if !st.metas.unify(&tf, &MType::arrow(a.clone(), b.clone()))
                        || !st.metas.unify(&tfp, &MType::arrow(c.clone(), d.clone()))
                    {
                        return None;
                    }
                    self.go(&st, ctx, r, rp, depth, &mut |mut st, (ta, tap), dr| {
                        if !st.metas.unify(&ta, &a) || !st.metas.unify(&tap, &c) {
                            return None;
                        }
                        let node = MDeriv::App(Box::new(dl.clone()), Box::new(dr));
                        k(st, (b.clone(), d.clone()), node)
                    })
                })
            }
            (Term::Lam(n), Term::Lam(np)) => {
                let mut st = st.clone();
                let binder = (st.metas.fresh(), st.metas.fresh());
                st.binders.push(binder.clone());
                let mut inner = Vec::with_capacity(ctx.len() + 1);
                inner.push(binder.clone());
                inner.extend_from_slice(ctx);
                self.go(&st, &inner, n, np, depth, &mut |st, (b, d), db| {
                    let pair = (
                        MType::arrow(binder.0.clone(), b),
                        MType::arrow(binder.1.clone(), d),
                    );
                    k(st, pair, MDeriv::Lam(binder.clone(), Box::new(db)))
                })
            }
            _ => None,
        };
        if found.is_some() {
            return found;
        }

        let found = match m {
            Term::Inject(n, g) => self.go(st, ctx, n, mp, depth, &mut |mut st, (x, b), d| {
                if !st.metas.unify(&x, &MType::ground(*g)) {
                    return None;
                }
                k(st, (MType::Unknown, b), MDeriv::InjL(*g, Box::new(d)))
            }),
            Term::Project(n, h) => self.go(st, ctx, n, mp, depth, &mut |mut st, (x, b), d| {
                let shape = ground_shape(&mut st.metas, *h);
                if !st.metas.unify(&x, &MType::Unknown) || !st.metas.unify(&b, &shape) {
                    return None;
                }
                k(st, (MType::ground(*h), b), MDeriv::ProjL(*h, Box::new(d)))
            }),
            _ => None,
        };
        if found.is_some() {
            return found;
        }

        match mp {
            Term::Inject(np, g) => self.go(st, ctx, m, np, depth, &mut |mut st, (x, y), d| {
                if !st.metas.unify(&x, &MType::Unknown) || !st.metas.unify(&y, &MType::ground(*g)) {
                    return None;
                }
                k(
                    st,
                    (MType::Unknown, MType::Unknown),
                    MDeriv::InjR(*g, Box::new(d)),
                )
            }),
            Term::Project(np, h) => self.go(st, ctx, m, np, depth, &mut |mut st, (x, y), d| {
                if !st.metas.unify(&x, &MType::Unknown) || !st.metas.unify(&y, &MType::Unknown) {
                    return None;
                }
                k(
                    st,
                    (MType::Unknown, MType::ground(*h)),
                    MDeriv::ProjR(*h, Box::new(d)),
                )
            }),
            _ => None,
        }
    }
}

/// Solve `less ⊑ more` constraints by unification. Whatever remains has a
/// metavariable on the less-precise side and is met by reading every
/// leftover metavariable as `★`.
fn solve_precision(metas: &mut Metas, constraints: &[Pair]) -> bool {
    let mut work: Vec<Pair> = constraints.to_vec();
    loop {
        let mut progress = false;
        let mut deferred = Vec::new();
        while let Some((a, c)) = work.pop() {
            let a = metas.shallow(&a);
            let c = metas.shallow(&c);
            match (&a, &c) {
                (MType::Unknown, _) => {}
                (_, MType::Unknown) => {
                    if !metas.unify(&a, &MType::Unknown) {
                        return false;
                    }
                    progress = true;
                }
                (MType::Meta(_), _) => deferred.push((a, c)),
                (MType::Base(x), MType::Base(y)) => {
                    if x != y {
                        return false;
                    }
                }
                (MType::Base(_), MType::Meta(_)) => {
                    metas.unify(&c, &a);
                    progress = true;
                }
                (MType::Arrow(a1, a2), MType::Arrow(c1, c2)) => {
                    work.push(((**a1).clone(), (**c1).clone()));
                    work.push(((**a2).clone(), (**c2).clone()));
                }
                (MType::Arrow(..), MType::Meta(_)) => {
                    let shape = MType::arrow(metas.fresh(), metas.fresh());
                    metas.unify(&c, &shape);
                    work.push((a, c));
                    progress = true;
                }
                _ => return false,
            }
        }
        if !progress || deferred.is_empty() {
            return true;
        }
        work = deferred;
    }
}

fn finish(metas: &Metas, d: &MDeriv) -> TermPrecDeriv {
    use TermPrecDeriv::*;
    let bx = |d: &MDeriv| Box::new(finish(metas, d));
    match d {
        MDeriv::Var(i) => PVar(*i),
        MDeriv::Lit(c) => PLit(*c),
        MDeriv::App(f, a) => PApp(bx(f), bx(a)),
        MDeriv::Lam((a, c), body) => {
            let (a, c) = (metas.default_type(a), metas.default_type(c));
            let binder = type_prec(&a, &c).expect("binder constraints were solved");
            PLam(binder, bx(body))
        }
        MDeriv::InjL(g, d) => PInjL(*g, bx(d)),
        MDeriv::InjR(g, d) => PInjR(*g, bx(d)),
        MDeriv::ProjL(h, d) => PProjL(*h, bx(d)),
        MDeriv::ProjR(h, d) => PProjR(*h, bx(d)),
        MDeriv::Blame(a) => PBlame(metas.default_type(a)),
    }
}

/// Search for a derivation of `ctx ⊩ m ⊑ m′`.
///
/// Rules are tried in a fixed order with backtracking: `⊑-blame` when `m′`
/// is blame, then the structural rule matching both heads, then the cast
/// rules with the cast on the left, then those with the cast on the right.
/// `Ok(None)` means both terms are well-typed but no derivation relates
/// them.
pub fn infer_term_prec(
    ctx: &[PrecTriple],
    m: &Term,
    mp: &Term,
) -> Result<Option<(TypePrecDeriv, TermPrecDeriv)>, PrecError> {
    search(ctx, m, mp, None)
}

/// As [`infer_term_prec`], with the conclusion fixed to `less_ty ⊑ more_ty`.
pub fn infer_term_prec_at(
    ctx: &[PrecTriple],
    m: &Term,
    mp: &Term,
    less_ty: &Type,
    more_ty: &Type,
) -> Result<Option<(TypePrecDeriv, TermPrecDeriv)>, PrecError> {
    search(ctx, m, mp, Some((less_ty, more_ty)))
}

fn search(
    ctx: &[PrecTriple],
    m: &Term,
    mp: &Term,
    at: Option<(&Type, &Type)>,
) -> Result<Option<(TypePrecDeriv, TermPrecDeriv)>, PrecError> {
    if !ctx.iter().all(PrecTriple::well_formed) {
        return Ok(None);
    }
    let search = Search {
        bound: m.size() + mp.size() + DEPTH_SLACK,
    };
    let st = State {
        metas: Metas::new(),
        binders: Vec::new(),
    };
    let pairs: Vec<Pair> = ctx
        .iter()
        .map(|t| (MType::from(&t.less), MType::from(&t.more)))
        .collect();
    let solution = search.go(&st, &pairs, m, mp, 0, &mut |mut st, (a, b), deriv| {
        if let Some((less_ty, more_ty)) = at {
            if !st.metas.unify(&a, &MType::from(less_ty))
                || !st.metas.unify(&b, &MType::from(more_ty))
            {
                return None;
            }
        }
        solve_precision(&mut st.metas, &st.binders).then_some(Solution {
            metas: st.metas,
            deriv,
        })
    });
    match solution {
        Some(Solution { metas, deriv }) => {
            let d = finish(&metas, &deriv);
            let c = term_prec_conclusion(ctx, &d, m, mp)
                .expect("search produced an invalid derivation");
            Ok(Some((c, d)))
        }
        None => {
            let less: Vec<Type> = ctx.iter().map(|t| t.less.clone()).collect();
            let more: Vec<Type> = ctx.iter().map(|t| t.more.clone()).collect();
            let (less_ok, more_ok) = match at {
                Some((a, b)) => (
                    check_core(&less, m, a).is_ok(),
                    check_core(&more, mp, b).is_ok(),
                ),
                None => (infer_core(&less, m).is_ok(), infer_core(&more, mp).is_ok()),
            };
            if !less_ok {
                Err(PrecError::IllTyped(Side::Less))
            } else if !more_ok {
                Err(PrecError::IllTyped(Side::More))
            } else {
                Ok(None)
            }
        }
    }
}
