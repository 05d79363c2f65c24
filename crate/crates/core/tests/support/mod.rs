//! Shared test fixtures and oracles written independently of the library:
//! untyped random terms, random substitutions, named-variable substitution,
//! redex decomposition and derivation enumeration.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use castcalc::precision::{TermPrecDeriv, TypePrecDeriv};
use castcalc::reduce::RuleTag;
use castcalc::{bracket, ground_to_type, is_value, Ground, Lit, Subst, Term, Type};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

fn ground(r: &mut ChaCha8Rng) -> Ground {
    Ground::ALL[r.gen_range(0..Ground::ALL.len())]
}

/// Arbitrary term with free variables below `free`, not necessarily well-typed.
pub fn random_term(r: &mut ChaCha8Rng, free: usize, size: usize) -> Term {
    if size <= 1 {
        return match r.gen_range(0..4) {
            0 if free > 0 => Term::Var(r.gen_range(0..free)),
            1 => Term::num(r.gen_range(0..5)),
            2 => Term::bool(r.gen()),
            3 => Term::Blame,
            _ => Term::num(0),
        };
    }
    match r.gen_range(0..6) {
        0 => Term::lam(random_term(r, free + 1, size - 1)),
        1 | 2 if size >= 3 => {
            let left = r.gen_range(1..=size - 2);
            let right = size - 1 - left;
            Term::app(random_term(r, free, left), random_term(r, free, right))
        }
        3 => Term::inject(random_term(r, free, size - 1), ground(r)),
        4 => Term::project(random_term(r, free, size - 1), ground(r)),
        _ => Term::inject(random_term(r, free, size - 1), Ground::NAT),
    }
}

/// Substitution with `k` explicit entries whose images mention variables
/// below `free`, and a random tail shift.
pub fn random_subst(r: &mut ChaCha8Rng, k: usize, free: usize) -> Subst {
    let prefix = (0..k)
        .map(|_| {
            let n = r.gen_range(1..6);
            random_term(r, free, n)
        })
        .collect();
    Subst::from_parts(prefix, r.gen_range(0..3))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Named {
    Var(String),
    Lam(String, Box<Named>),
    App(Box<Named>, Box<Named>),
    Lit(Lit),
    Inject(Box<Named>, Ground),
    Project(Box<Named>, Ground),
    Blame,
}

pub fn free_name(i: usize) -> String {
    format!("v{i}")
}

/// Indices that escape a term, relative to its own root.
fn escaping(m: &Term, depth: usize, out: &mut BTreeSet<usize>) {
    match m {
        Term::Var(i) if *i >= depth => {
            out.insert(i - depth);
        }
        Term::Var(_) | Term::Lit(_) | Term::Blame => {}
        Term::Lam(n) => escaping(n, depth + 1, out),
        Term::App(f, a) => {
            escaping(f, depth, out);
            escaping(a, depth, out);
        }
        Term::Inject(n, _) | Term::Project(n, _) => escaping(n, depth, out),
    }
}

/// Binder names are drawn from a small pool that overlaps free names, so
/// shadowing and capture both occur; a name is skipped only when it would
/// capture a reference to an outer variable.
const POOL: [&str; 5] = ["v0", "v1", "v2", "a", "b"];

/// Translate with `scope[j]` naming index `j`; indices past the scope are free.
pub fn to_named(r: &mut ChaCha8Rng, m: &Term, scope: &[String]) -> Named {
    match m {
        Term::Var(i) => Named::Var(
            scope
                .get(*i)
                .cloned()
                .unwrap_or_else(|| free_name(i - scope.len())),
        ),
        Term::Lit(c) => Named::Lit(*c),
        Term::Blame => Named::Blame,
        Term::App(f, a) => Named::App(
            Box::new(to_named(r, f, scope)),
            Box::new(to_named(r, a, scope)),
        ),
        Term::Inject(n, g) => Named::Inject(Box::new(to_named(r, n, scope)), *g),
        Term::Project(n, h) => Named::Project(Box::new(to_named(r, n, scope)), *h),
        Term::Lam(body) => {
            let mut outer = BTreeSet::new();
            escaping(body, 1, &mut outer);
            let taken: BTreeSet<String> = outer
                .iter()
                .map(|&j| {
                    scope
                        .get(j)
                        .cloned()
                        .unwrap_or_else(|| free_name(j - scope.len()))
                })
                .collect();
            let options: Vec<&str> = POOL
                .iter()
                .copied()
                .filter(|n| !taken.contains(*n))
                .collect();
            let name = if options.is_empty() {
                format!("fresh{}", scope.len())
            } else {
                options[r.gen_range(0..options.len())].to_string()
            };
            let mut inner = Vec::with_capacity(scope.len() + 1);
            inner.push(name.clone());
            inner.extend_from_slice(scope);
            Named::Lam(name, Box::new(to_named(r, body, &inner)))
        }
    }
}

/// Back to indices; free names must be of the form `v{j}`.
pub fn to_indices(m: &Named, scope: &mut Vec<String>) -> Term {
    match m {
        Named::Var(x) => match scope.iter().rev().position(|y| y == x) {
            Some(i) => Term::Var(i),
            None => {
                let j: usize = x
                    .strip_prefix('v')
                    .and_then(|s| s.parse().ok())
                    .expect("free names are v{j}");
                Term::Var(j + scope.len())
            }
        },
        Named::Lit(c) => Term::Lit(*c),
        Named::Blame => Term::Blame,
        Named::App(f, a) => Term::app(to_indices(f, scope), to_indices(a, scope)),
        Named::Inject(n, g) => Term::inject(to_indices(n, scope), *g),
        Named::Project(n, h) => Term::project(to_indices(n, scope), *h),
        Named::Lam(x, body) => {
            scope.push(x.clone());
            let b = to_indices(body, scope);
            scope.pop();
            Term::lam(b)
        }
    }
}

pub fn free_vars(m: &Named, out: &mut BTreeSet<String>) {
    fn go(m: &Named, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match m {
            Named::Var(x) if !bound.contains(x) => {
                out.insert(x.clone());
            }
            Named::Var(_) | Named::Lit(_) | Named::Blame => {}
            Named::App(f, a) => {
                go(f, bound, out);
                go(a, bound, out);
            }
            Named::Inject(n, _) | Named::Project(n, _) => go(n, bound, out),
            Named::Lam(x, b) => {
                bound.push(x.clone());
                go(b, bound, out);
                bound.pop();
            }
        }
    }
    go(m, &mut Vec::new(), out)
}

fn rename_free(m: &Named, from: &str, to: &str) -> Named {
    match m {
        Named::Var(x) if x == from => Named::Var(to.to_string()),
        Named::Var(_) | Named::Lit(_) | Named::Blame => m.clone(),
        Named::App(f, a) => Named::App(
            Box::new(rename_free(f, from, to)),
            Box::new(rename_free(a, from, to)),
        ),
        Named::Inject(n, g) => Named::Inject(Box::new(rename_free(n, from, to)), *g),
        Named::Project(n, h) => Named::Project(Box::new(rename_free(n, from, to)), *h),
        Named::Lam(x, _) if x == from => m.clone(),
        Named::Lam(x, b) => Named::Lam(x.clone(), Box::new(rename_free(b, from, to))),
    }
}

/// Simultaneous capture-avoiding substitution of names.
pub fn named_subst(m: &Named, map: &BTreeMap<String, Named>) -> Named {
    match m {
        Named::Var(x) => map.get(x).cloned().unwrap_or_else(|| m.clone()),
        Named::Lit(_) | Named::Blame => m.clone(),
        Named::App(f, a) => {
            Named::App(Box::new(named_subst(f, map)), Box::new(named_subst(a, map)))
        }
        Named::Inject(n, g) => Named::Inject(Box::new(named_subst(n, map)), *g),
        Named::Project(n, h) => Named::Project(Box::new(named_subst(n, map)), *h),
        Named::Lam(x, body) => {
            let mut inner = map.clone();
            inner.remove(x);
            let mut body_free = BTreeSet::new();
            free_vars(body, &mut body_free);
            let mut danger = BTreeSet::new();
            for (y, image) in &inner {
                if body_free.contains(y) {
                    free_vars(image, &mut danger);
                }
            }
            if !danger.contains(x) {
                return Named::Lam(x.clone(), Box::new(named_subst(body, &inner)));
            }
            let mut avoid = danger;
            avoid.extend(body_free);
            avoid.extend(inner.keys().cloned());
            let fresh = (0..)
                .map(|n| format!("{x}'{n}"))
                .find(|n| !avoid.contains(n))
                .unwrap();
            let body = rename_free(body, x, &fresh);
            Named::Lam(fresh, Box::new(named_subst(&body, &inner)))
        }
    }
}

/// Generated closed well-typed terms with their target types, one per seed.
pub fn typed_corpus(n: u64) -> Vec<(castcalc::AnnTerm, castcalc::Type)> {
    use castcalc::harness::{GenConfig, Generator};
    (0..n)
        .map(|seed| {
            let mut g = Generator::new(&GenConfig {
                seed,
                ..GenConfig::default()
            });
            let t = g.random_type();
            let m = g.term(&t).expect("default weights never starve");
            (m, t)
        })
        .collect()
}

/// One layer of an evaluation context, collected from the root down.
#[derive(Clone)]
pub enum Hole {
    Fun(Term),
    Arg(Term),
    Inj(Ground),
    Proj(Ground),
}

pub fn refill(path: &[Hole], m: Term) -> Term {
    path.iter().rev().fold(m, |acc, h| match h {
        Hole::Fun(arg) => Term::app(acc, arg.clone()),
        Hole::Arg(f) => Term::app(f.clone(), acc),
        Hole::Inj(g) => Term::inject(acc, *g),
        Hole::Proj(h) => Term::project(acc, *h),
    })
}

/// Contract a redex at the root, if it is one.
pub fn contract(m: &Term) -> Option<(Term, RuleTag)> {
    match m {
        Term::App(f, a) if is_value(a) => match &**f {
            Term::Lam(body) => Some((bracket(body, a), RuleTag::Beta)),
            _ => None,
        },
        Term::Project(n, h) => match &**n {
            Term::Inject(v, g) if is_value(v) && g == h => Some(((**v).clone(), RuleTag::Collapse)),
            Term::Inject(v, _) if is_value(v) => Some((Term::Blame, RuleTag::Collide)),
            _ => None,
        },
        _ => None,
    }
}

/// Every way of writing `m` as `E[r]` with `r` a redex or `F[blame]` for a
/// single frame `F`. Searches all positions rather than following the
/// evaluation order.
pub fn decompositions(m: &Term) -> Vec<(Term, RuleTag)> {
    fn go(m: &Term, path: &mut Vec<Hole>, out: &mut Vec<(Term, RuleTag)>) {
        if let Some((r, tag)) = contract(m) {
            out.push((refill(path, r), tag));
        }
        if m.is_blame() && !path.is_empty() {
            // Blame escapes one frame per step.
            out.push((refill(&path[..path.len() - 1], Term::Blame), RuleTag::Blame));
        }
        match m {
            Term::App(f, a) => {
                path.push(Hole::Fun((**a).clone()));
                go(f, path, out);
                path.pop();
                if is_value(f) {
                    path.push(Hole::Arg((**f).clone()));
                    go(a, path, out);
                    path.pop();
                }
            }
            Term::Inject(n, g) => {
                path.push(Hole::Inj(*g));
                go(n, path, out);
                path.pop();
            }
            Term::Project(n, h) => {
                path.push(Hole::Proj(*h));
                go(n, path, out);
                path.pop();
            }
            _ => {}
        }
    }
    let mut out = Vec::new();
    go(m, &mut Vec::new(), &mut out);
    out
}

/// Every derivation tree of `a ⊑ b`, built by trying each rule.
pub fn all_derivs(a: &Type, b: &Type) -> Vec<TypePrecDeriv> {
    let mut out = Vec::new();
    if *a == Type::Unknown && *b == Type::Unknown {
        out.push(TypePrecDeriv::UnkUnk);
    }
    if *a == Type::Unknown {
        for g in Ground::ALL {
            for sub in all_derivs(&ground_to_type(g), b) {
                out.push(TypePrecDeriv::unk_ground(g, sub));
            }
        }
    }
    if let (Type::Base(x), Type::Base(y)) = (a, b) {
        if x == y {
            out.push(TypePrecDeriv::BaseP(*x));
        }
    }
    if let (Type::Arrow(a1, a2), Type::Arrow(b1, b2)) = (a, b) {
        for d in all_derivs(a1, b1) {
            for c in all_derivs(a2, b2) {
                out.push(TypePrecDeriv::fun(d.clone(), c));
            }
        }
    }
    out
}

/// Change one literal, variable index or cast tag, each of which the
/// derivation must match exactly.
pub fn corrupt(d: &TermPrecDeriv, target: usize, seen: &mut usize) -> Option<TermPrecDeriv> {
    use TermPrecDeriv::*;
    let other = |g: Ground| Ground::ALL.into_iter().find(|h| *h != g).unwrap();
    let here = *seen == target;
    let bx = Box::new;
    match d {
        PLit(c) => {
            *seen += 1;
            here.then(|| {
                PLit(match c {
                    Lit::Num(n) => Lit::Num(n + 1),
                    Lit::Bool(b) => Lit::Bool(!b),
                })
            })
        }
        PVar(i) => {
            *seen += 1;
            here.then(|| PVar(i + 1))
        }
        PBlame(_) => None,
        PApp(f, a) => {
            if let Some(f) = corrupt(f, target, seen) {
                return Some(PApp(bx(f), a.clone()));
            }
            corrupt(a, target, seen).map(|a| PApp(f.clone(), bx(a)))
        }
        PLam(c, b) => corrupt(b, target, seen).map(|b| PLam(c.clone(), bx(b))),
        PInjL(g, s) | PInjR(g, s) | PProjL(g, s) | PProjR(g, s) => {
            *seen += 1;
            let rebuild = |g: Ground, s: TermPrecDeriv| match d {
                PInjL(..) => PInjL(g, bx(s)),
                PInjR(..) => PInjR(g, bx(s)),
                PProjL(..) => PProjL(g, bx(s)),
                _ => PProjR(g, bx(s)),
            };
            if here {
                return Some(rebuild(other(*g), (**s).clone()));
            }
            corrupt(s, target, seen).map(|s| rebuild(*g, s))
        }
    }
}
