//! Random generators shared by the integration tests.
//!
//! Generated terms only ever place values or variables in argument and
//! constructor-component positions, and variables are only ever replaced by
//! values. Under that discipline call-by-name and call-by-value reach the
//! same canonical form, so verdicts must not depend on the strategy.

#![allow(dead_code)]

use ctt_kernel::kripke::{WJudgment, WorldModel};
use ctt_kernel::{ground_types, parse, Term};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn term(rng: &mut StdRng, depth: usize, scope: &mut Vec<String>) -> Term {
    if depth == 0 || rng.gen_bool(0.25) {
        return leaf(rng, scope);
    }
    match rng.gen_range(0..9) {
        0 | 1 => value(rng, depth, scope),
        2 => Term::app(term(rng, depth - 1, scope), value(rng, depth - 1, scope)),
        3 => Term::fst(term(rng, depth - 1, scope)),
        4 => Term::snd(term(rng, depth - 1, scope)),
        5 => {
            let s = term(rng, depth - 1, scope);
            let (a, b) = (fresh(scope), fresh(scope));
            scope.push(a.clone());
            let l = term(rng, depth - 1, scope);
            scope.pop();
            scope.push(b.clone());
            let r = term(rng, depth - 1, scope);
            scope.pop();
            Term::case(s, &a, l, &b, r)
        }
        6 => omega_or(rng, depth, scope),
        _ => ty(rng, depth, scope),
    }
}

/// A canonical form whose components are values or variables.
pub fn value(rng: &mut StdRng, depth: usize, scope: &mut Vec<String>) -> Term {
    if depth == 0 {
        return if !scope.is_empty() && rng.gen_bool(0.5) {
            Term::var(scope.choose(rng).unwrap())
        } else {
            Term::It
        };
    }
    match rng.gen_range(0..6) {
        0 => Term::It,
        1 => Term::inl(value(rng, depth - 1, scope)),
        2 => Term::inr(value(rng, depth - 1, scope)),
        3 => Term::pair(value(rng, depth - 1, scope), value(rng, depth - 1, scope)),
        4 => {
            let x = fresh(scope);
            scope.push(x.clone());
            let body = term(rng, depth - 1, scope);
            scope.pop();
            Term::lam(&x, body)
        }
        _ => value(rng, 0, scope),
    }
}

fn leaf(rng: &mut StdRng, scope: &[String]) -> Term {
    match rng.gen_range(0..5) {
        0 if !scope.is_empty() => Term::var(scope.choose(rng).unwrap()),
        1 => Term::True,
        2 => Term::False,
        _ => Term::It,
    }
}

fn omega_or(rng: &mut StdRng, depth: usize, scope: &mut Vec<String>) -> Term {
    if rng.gen_bool(0.3) {
        let w = Term::lam("w", Term::app(Term::var("w"), Term::var("w")));
        Term::app(w.clone(), w)
    } else {
        value(rng, depth, scope)
    }
}

/// A type former, possibly with a dependent family or ill-formed parts.
pub fn ty(rng: &mut StdRng, depth: usize, scope: &mut Vec<String>) -> Term {
    if depth == 0 {
        return if rng.gen_bool(0.5) {
            Term::True
        } else {
            Term::False
        };
    }
    let d = ty(rng, depth - 1, scope);
    let x = fresh(scope);
    scope.push(x.clone());
    let f = if rng.gen_bool(0.8) {
        ty(rng, depth - 1, scope)
    } else {
        term(rng, depth - 1, scope)
    };
    scope.pop();
    match rng.gen_range(0..3) {
        0 => Term::forall(d, &x, f),
        1 => Term::exists(d, &x, f),
        _ => Term::disj(d, ty(rng, depth - 1, scope)),
    }
}

fn fresh(scope: &[String]) -> String {
    format!("v{}", scope.len())
}

/// Ground types up to former depth 3 plus a few dependent and ill-formed
/// types, used as the type side of generated checks.
pub fn type_pool() -> Vec<Term> {
    let mut pool = ground_types(3);
    for s in [
        "forall x : True \\/ True . case x of inl a -> True | inr b -> False",
        "exists x : True \\/ True . case x of inl a -> True | inr b -> False",
        "forall x : True \\/ False . case x of inl a -> True | inr b -> False",
        "forall x : False . x",
        "exists x : True . x",
        "(lam x. x) True",
        "fst <True, it>",
        "it",
        "True \\/ it",
    ] {
        pool.push(parse(s).unwrap());
    }
    pool
}

/// A random model: worlds `w0..`, order edges only from lower to higher
/// index so the closure is a partial order, tokens scattered at random.
pub fn world_model(rng: &mut StdRng, max_worlds: usize, max_atoms: usize) -> WorldModel {
    let n = rng.gen_range(1..=max_worlds);
    let k = rng.gen_range(1..=max_atoms);
    let worlds: Vec<String> = (0..n).map(|i| format!("w{i}")).collect();
    let atoms: Vec<String> = (0..k)
        .map(|i| ["A", "B", "C", "D"][i].to_string())
        .collect();
    let mut order = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(0.4) {
                order.push((worlds[i].clone(), worlds[j].clone()));
            }
        }
    }
    let mut verify = Vec::new();
    for w in &worlds {
        for a in &atoms {
            if rng.gen_bool(0.3) {
                let t = format!("t{}", rng.gen_range(0..3));
                verify.push((w.clone(), a.clone(), t));
            }
        }
    }
    WorldModel::new(&worlds, &order, &atoms, &verify).expect("forward edges are antisymmetric")
}

/// Atoms and one level of rule and hypothetical judgments over them.
pub fn shallow_judgments(atoms: &[String]) -> Vec<WJudgment> {
    let base: Vec<WJudgment> = atoms.iter().map(|a| WJudgment::atom(a)).collect();
    let mut out = base.clone();
    for p in &base {
        for q in &base {
            out.push(WJudgment::rule(p.clone(), q.clone()));
            out.push(WJudgment::hyp(p.clone(), q.clone()));
        }
    }
    out
}
