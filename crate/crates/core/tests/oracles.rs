//! Reference semantics written independently of the checkers: a recursive
//! evaluator and the unary and binary relations for ground types, with
//! function types quantified over a fixed pool of closed canonical terms
//! rather than the checkers' representative functions.

use ctt_kernel::{ground_types, parse, Checker, Inhabitation, Term};

fn t(s: &str) -> Term {
    parse(s).unwrap()
}

/// Plain recursive call-by-name evaluation; `None` when stuck or out of fuel.
fn reference_eval(term: &Term, fuel: &mut usize) -> Option<Term> {
    let spend = |fuel: &mut usize| -> Option<()> {
        *fuel = fuel.checked_sub(1)?;
        Some(())
    };
    match term {
        Term::App(f, a) => match reference_eval(f, fuel)? {
            Term::Lam(x, body) => {
                spend(fuel)?;
                reference_eval(&body.substitute(&x, a), fuel)
            }
            _ => None,
        },
        Term::Fst(p) | Term::Snd(p) => match reference_eval(p, fuel)? {
            Term::Pair(a, b) => {
                spend(fuel)?;
                reference_eval(if matches!(term, Term::Fst(_)) { &a } else { &b }, fuel)
            }
            _ => None,
        },
        Term::Case {
            scrutinee,
            left_binder,
            left,
            right_binder,
            right,
        } => {
            let next = match reference_eval(scrutinee, fuel)? {
                Term::Inl(v) => left.substitute(left_binder, &v),
                Term::Inr(v) => right.substitute(right_binder, &v),
                _ => return None,
            };
            spend(fuel)?;
            reference_eval(&next, fuel)
        }
        Term::Var(_) => None,
        canonical => Some(canonical.clone()),
    }
}

fn ev(term: &Term) -> Option<Term> {
    reference_eval(term, &mut 1000)
}

/// Closed canonical terms: `it`, injections and pairs of pool members, and
/// lambdas over a list of bodies.
fn pool() -> Vec<Term> {
    let mut base = vec![Term::It];
    for _ in 0..2 {
        let prev = base.clone();
        for a in &prev {
            base.push(Term::inl(a.clone()));
            base.push(Term::inr(a.clone()));
            for b in &prev {
                base.push(Term::pair(a.clone(), b.clone()));
            }
        }
        ctt_kernel::term::sort_dedup(&mut base);
    }
    let bodies = [
        "x",
        "it",
        "inl x",
        "inr x",
        "<x, it>",
        "<it, it>",
        "fst x",
        "snd x",
        "x it",
        "case x of inl a -> it | inr b -> <it, it>",
        "case x of inl a -> a | inr b -> b",
        "case x of inl a -> inr a | inr b -> inl b",
        "case x of inl a -> inl it | inr b -> inl it",
    ];
    for b in bodies {
        base.push(Term::lam("x", t(b)));
    }
    base
}

/// `m = n ∈ a` for closed ground types, by the relation clauses.
fn related(a: &Term, m: &Term, n: &Term, pool: &[Term]) -> bool {
    let (Some(m), Some(n)) = (ev(m), ev(n)) else {
        return false;
    };
    match a {
        Term::True => m == Term::It && n == Term::It,
        Term::False => false,
        Term::Disj(l, r) => match (&m, &n) {
            (Term::Inl(u), Term::Inl(v)) => related(l, u, v, pool),
            (Term::Inr(u), Term::Inr(v)) => related(r, u, v, pool),
            _ => false,
        },
        Term::Exists(d, _, f) => match (&m, &n) {
            (Term::Pair(p1, q1), Term::Pair(p2, q2)) => {
                related(d, p1, p2, pool) && related(f, q1, q2, pool)
            }
            _ => false,
        },
        Term::Forall(d, _, f) => {
            matches!((&m, &n), (Term::Lam(..), Term::Lam(..)))
                && pool.iter().all(|y| {
                    pool.iter().all(|z| {
                        !related(d, y, z, pool)
                            || related(
                                f,
                                &Term::app(m.clone(), y.clone()),
                                &Term::app(n.clone(), z.clone()),
                                pool,
                            )
                    })
                })
        }
        _ => false,
    }
}

#[test]
fn reference_evaluator_matches_examples() {
    assert_eq!(ev(&t("(lam x. x) it")), Some(Term::It));
    assert_eq!(
        ev(&t("case inl it of inl x -> x | inr y -> <y, y>")),
        Some(Term::It)
    );
    assert_eq!(ev(&t("(lam x. x x) (lam x. x x)")), None);
    assert_eq!(ev(&t("lam x. <it, it>")), Some(t("lam x. <it, it>")));
}

#[test]
fn binary_checker_agrees_with_reference_relation() {
    let pool = pool();
    let c = Checker::new(1000, 3);
    let mut checked = 0;
    for a in ground_types(2) {
        for m in &pool {
            for n in &pool {
                let expected = related(&a, m, n, &pool);
                let v = c.eq_member(m, n, &a).unwrap();
                assert!(v.is_definitive(), "{m} = {n} ∈ {a}: {}", v.kind());
                assert_eq!(v.is_verified(), expected, "{m} = {n} ∈ {a}");
                checked += 1;
            }
        }
    }
    assert!(checked > 10_000);
}

#[test]
fn unary_checker_agrees_with_reference_diagonal() {
    let pool = pool();
    let c = Checker::new(1000, 3);
    for a in ground_types(2) {
        for m in &pool {
            let v = c.member(m, &a).unwrap();
            assert_eq!(v.is_verified(), related(&a, m, m, &pool), "{m} ∈ {a}");
        }
    }
}

#[test]
fn eq_set_of_empty_domain_functions_by_pair_enumeration() {
    // both types relate exactly all pairs of lambdas
    let pool = pool();
    let (a, b) = (t("False => True"), t("False => False"));
    for m in &pool {
        for n in &pool {
            assert_eq!(related(&a, m, n, &pool), related(&b, m, n, &pool));
        }
    }
    assert!(Checker::default().eq_set(&a, &b).unwrap().is_verified());
}

#[test]
fn uninhabited_function_type_by_brute_force() {
    let pool = pool();
    let a = t("True => False");
    assert!(pool.iter().all(|m| !related(&a, m, m, &pool)));
    assert_eq!(
        Checker::default().inhabited_exact(&a),
        Ok(Inhabitation::Uninhabited)
    );
}

#[test]
fn enumeration_examples_by_brute_force() {
    let pool = pool();
    let c = Checker::default();
    for (ty, depth) in [
        ("True \\/ True", 2),
        ("True /\\ True", 2),
        ("(True \\/ False) /\\ True", 3),
    ] {
        let a = t(ty);
        let mut expected: Vec<Term> = pool
            .iter()
            .filter(|m| {
                m.depth() <= depth && !matches!(m, Term::Lam(..)) && related(&a, m, m, &pool)
            })
            .cloned()
            .collect();
        ctt_kernel::term::sort_dedup(&mut expected);
        let e = c.enumerate_to(&a, depth).unwrap();
        assert!(e.complete);
        assert_eq!(e.witnesses, expected, "{ty}");
    }
}

#[test]
fn case_function_pair_by_hand_evaluation() {
    let f = t("lam x. case x of inl a -> it | inr b -> <it, it>");
    let pool = pool();
    let d = t("True \\/ True");
    let bad: Vec<(Term, Term)> = pool
        .iter()
        .flat_map(|y| pool.iter().map(move |z| (y.clone(), z.clone())))
        .filter(|(y, z)| related(&d, y, z, &pool))
        .filter(|(y, z)| {
            !related(
                &Term::True,
                &Term::app(f.clone(), y.clone()),
                &Term::app(f.clone(), z.clone()),
                &pool,
            )
        })
        .collect();
    assert_eq!(bad, vec![(t("inr it"), t("inr it"))]);
    assert_eq!(ev(&Term::app(f.clone(), t("inr it"))), Some(t("<it, it>")));
    let v = Checker::default()
        .functionality(&f, &d, "_", &Term::True)
        .unwrap();
    assert_eq!(
        v.counterexample().unwrap().witnesses,
        vec![t("inr it"), t("inr it")]
    );
}
