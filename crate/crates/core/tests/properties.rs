use ctt_kernel::kripke::{Monotonicity, WJudgment, WorldModel};
use ctt_kernel::rules::{admissible, derive, Derivability, RuleScheme};
use ctt_kernel::{
    eval, eval_with, former_depth, ground_types, parse, Checker, EvalResult, Exec, Term,
    VerdictKind,
};
use proptest::prelude::*;

const NAMES: [&str; 4] = ["x", "y", "z", "x'"];

fn name() -> impl Strategy<Value = String> {
    prop::sample::select(NAMES.to_vec()).prop_map(String::from)
}

/// Arbitrary terms, open or closed, over a small set of names.
fn term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        Just(Term::It),
        Just(Term::True),
        Just(Term::False),
        name().prop_map(|n| Term::var(&n)),
    ];
    leaf.prop_recursive(5, 48, 3, |inner| {
        prop_oneof![
            (name(), inner.clone()).prop_map(|(x, b)| Term::lam(&x, b)),
            (inner.clone(), inner.clone()).prop_map(|(f, a)| Term::app(f, a)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::pair(a, b)),
            inner.clone().prop_map(Term::fst),
            inner.clone().prop_map(Term::snd),
            inner.clone().prop_map(Term::inl),
            inner.clone().prop_map(Term::inr),
            (inner.clone(), name(), inner.clone(), name(), inner.clone())
                .prop_map(|(s, a, l, b, r)| Term::case(s, &a, l, &b, r)),
            (inner.clone(), name(), inner.clone()).prop_map(|(d, x, f)| Term::forall(d, &x, f)),
            (inner.clone(), name(), inner.clone()).prop_map(|(d, x, f)| Term::exists(d, &x, f)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::disj(a, b)),
        ]
    })
}

fn closed_term() -> impl Strategy<Value = Term> {
    term().prop_filter("closed", Term::is_closed)
}

fn ground_type(depth: usize) -> impl Strategy<Value = Term> {
    prop::sample::select(ground_types(depth))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn printing_then_parsing_is_identity(t in term()) {
        let printed = t.to_string();
        let back = parse(&printed).unwrap_or_else(|e| panic!("{printed}: {e}"));
        // unused binders come back as `_` through the arrow sugar
        prop_assert!(back.alpha_eq(&t));
        prop_assert_eq!(back.to_string(), printed);
    }

    #[test]
    fn alpha_equivalence_is_an_equivalence(a in term(), b in term(), c in term()) {
        prop_assert!(a.alpha_eq(&a));
        prop_assert_eq!(a.alpha_eq(&b), b.alpha_eq(&a));
        if a.alpha_eq(&b) && b.alpha_eq(&c) {
            prop_assert!(a.alpha_eq(&c));
        }
        prop_assert_eq!(a.alpha_eq(&b), a.nameless() == b.nameless());
    }

    #[test]
    fn renaming_a_binder_preserves_alpha(x in name(), body in term()) {
        let fresh = "w";
        let renamed = Term::lam(fresh, body.substitute(&x, &Term::var(fresh)));
        prop_assume!(!body.occurs_free(fresh));
        prop_assert!(Term::lam(&x, body).alpha_eq(&renamed));
    }

    #[test]
    fn substitution_free_variables(t in term(), x in name(), v in term()) {
        let s = t.substitute(&x, &v);
        let mut expected = t.free_vars();
        if expected.remove(&x) {
            expected.extend(v.free_vars());
        }
        prop_assert_eq!(s.free_vars(), expected);
    }

    #[test]
    fn substituting_an_absent_variable_changes_nothing(t in term(), v in term()) {
        prop_assume!(!t.occurs_free("q"));
        prop_assert!(t.substitute("q", &v).alpha_eq(&t));
    }

    #[test]
    fn evaluation_is_deterministic_and_fuel_exact(t in closed_term()) {
        let r = eval(&t, 200);
        prop_assert_eq!(&r, &eval(&t, 200));
        if let EvalResult::Canonical(c, n) = &r {
            prop_assert!(c.to_term().is_canonical());
            prop_assert_eq!(&eval(&t, *n), &r);
            prop_assert_eq!(&eval(&t, n + 100), &r);
            if *n > 0 {
                prop_assert!(matches!(eval(&t, n - 1), EvalResult::FuelExhausted(_)));
            }
        }
    }

    #[test]
    fn canonical_terms_are_values(t in closed_term()) {
        if let Some(c) = t.as_canonical() {
            prop_assert_eq!(eval(&t, 0), EvalResult::Canonical(c, 0));
        }
    }

    #[test]
    fn call_by_value_agrees_when_both_finish(t in closed_term()) {
        if let (EvalResult::Canonical(a, _), EvalResult::Canonical(b, _)) =
            (eval(&t, 300), eval_with(&t, 300, ctt_kernel::Strategy::CallByValue))
        {
            // both are weak head forms of the same term; heads must agree
            prop_assert_eq!(std::mem::discriminant(&a), std::mem::discriminant(&b));
        }
    }

    #[test]
    fn material_discharge(m in closed_term(), b in ground_type(2)) {
        let f = Term::lam("x", m);
        let c = Checker::new(200, 2);
        prop_assert!(c.member(&f, &Term::imp(Term::False, b.clone())).unwrap().is_verified());
        prop_assert!(c.eq_member(&f, &f, &Term::imp(Term::False, b)).unwrap().is_verified());
    }

    #[test]
    fn deeper_search_never_flips(m in closed_term(), a in ground_type(3)) {
        let shallow = Checker::new(200, 1).member(&m, &a).unwrap().kind();
        let deep = Checker::new(400, 3).member(&m, &a).unwrap().kind();
        let flip = matches!(
            (shallow, deep),
            (VerdictKind::Verified, VerdictKind::Refuted) | (VerdictKind::Refuted, VerdictKind::Verified)
        );
        prop_assert!(!flip, "{} ∈ {}: {} then {}", m, a, shallow, deep);
    }

    #[test]
    fn eq_set_is_symmetric(a in ground_type(3), b in ground_type(3)) {
        let c = Checker::new(200, 3);
        prop_assert_eq!(c.eq_set(&a, &b).unwrap().kind(), c.eq_set(&b, &a).unwrap().kind());
        prop_assert!(c.eq_set(&a, &a).unwrap().is_verified());
    }

    #[test]
    fn enumerated_witnesses_are_members(a in ground_type(3)) {
        let c = Checker::new(200, 3);
        let e = c.enumerate(&a).unwrap();
        for w in &e.witnesses {
            prop_assert!(c.member(w, &a).unwrap().is_verified(), "{} ∈ {}", w, a);
        }
        for pair in e.witnesses.windows(2) {
            prop_assert_eq!(pair[0].canonical_cmp(&pair[1]), std::cmp::Ordering::Less);
        }
    }
}

fn scheme() -> impl Strategy<Value = RuleScheme> {
    let atom = prop_oneof![
        Just(Term::var("P")),
        Just(Term::var("Q")),
        Just(Term::True),
        Just(Term::False),
    ];
    let ty = atom.prop_recursive(2, 8, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::conj(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::disj(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::imp(a, b)),
        ]
    });
    (prop::collection::vec(ty.clone(), 0..3), ty)
        .prop_map(|(ps, c)| RuleScheme::new(ps, c).expect("uppercase metavariables"))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn derivable_rules_are_admissible(rule in scheme()) {
        if let Derivability::Derived(d) = derive(&rule, 5) {
            d.check(&rule).unwrap();
            let v = admissible(&rule, 1, 2, 1000, Exec::Sequential);
            prop_assert!(!v.is_refuted(), "{}: {:?}", rule, v.counterexample());
        }
    }

    #[test]
    fn derivations_realize_their_conclusion(rule in scheme()) {
        if let Derivability::Derived(d) = derive(&rule, 5) {
            let realizer = d.extract_witness();
            for inst in instantiations(&rule, 2) {
                let (premises, conclusion) = rule.instantiate(&inst);
                // witnesses of a ground type never need more depth than the type has
                let c = Checker::new(1000, former_depth(&conclusion).max(2));
                let mut m = realizer.clone();
                let mut vacuous = false;
                for (i, p) in premises.iter().enumerate() {
                    match c.enumerate(p).unwrap().witnesses.first() {
                        Some(w) => m = m.substitute(&format!("h{i}"), w),
                        None => vacuous = true,
                    }
                }
                if !vacuous {
                    prop_assert!(c.member(&m, &conclusion).unwrap().is_verified(), "{} ∈ {}", m, conclusion);
                }
            }
        }
    }

    #[test]
    fn derivation_checking_rejects_other_goals(rule in scheme(), other in scheme()) {
        if let Derivability::Derived(d) = derive(&rule, 5) {
            let mut moved = other.clone();
            moved.premises = rule.premises.clone();
            if !moved.conclusion.alpha_eq(&rule.conclusion) {
                prop_assert!(d.check(&moved).is_err());
            }
        }
    }
}

fn instantiations(rule: &RuleScheme, depth: usize) -> Vec<Vec<Term>> {
    let ground = ground_types(depth);
    rule.metavariables.iter().fold(vec![vec![]], |acc, _| {
        acc.iter()
            .flat_map(|p| {
                ground.iter().map(move |g| {
                    let mut v = p.clone();
                    v.push(g.clone());
                    v
                })
            })
            .collect()
    })
}

fn model() -> impl Strategy<Value = WorldModel> {
    (1usize..=5, 1usize..=3).prop_flat_map(|(n, k)| {
        let edges = prop::collection::vec(any::<bool>(), n * n);
        let toks = prop::collection::vec(0u8..4, n * k);
        (Just(n), Just(k), edges, toks).prop_map(|(n, k, edges, toks)| {
            let worlds: Vec<String> = (0..n).map(|i| format!("w{i}")).collect();
            let atoms: Vec<String> = ["A", "B", "C"][..k].iter().map(|s| s.to_string()).collect();
            let mut order = vec![];
            for i in 0..n {
                for j in i + 1..n {
                    if edges[i * n + j] {
                        order.push((worlds[i].clone(), worlds[j].clone()));
                    }
                }
            }
            let mut verify = vec![];
            for (idx, t) in toks.iter().enumerate() {
                if *t > 1 {
                    verify.push((
                        worlds[idx / k].clone(),
                        atoms[idx % k].clone(),
                        format!("t{t}"),
                    ));
                }
            }
            WorldModel::new(&worlds, &order, &atoms, &verify).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn hypothetical_judgments_are_monotone(m in model()) {
        for p in m.atoms() {
            for q in m.atoms() {
                let j = WJudgment::hyp(WJudgment::atom(p), WJudgment::atom(q));
                prop_assert_eq!(m.check_monotone(&j, Exec::Sequential).unwrap(), Monotonicity::Pass);
                let nested = WJudgment::hyp(WJudgment::rule(WJudgment::atom(p), WJudgment::atom(q)), WJudgment::atom(q));
                prop_assert_eq!(m.check_monotone(&nested, Exec::Sequential).unwrap(), Monotonicity::Pass);
            }
        }
    }

    #[test]
    fn atoms_are_monotone(m in model()) {
        for a in m.atoms() {
            prop_assert_eq!(m.check_monotone(&WJudgment::atom(a), Exec::Parallel).unwrap(), Monotonicity::Pass);
        }
    }

    #[test]
    fn consequent_tokens_never_break_hypotheticals(m in model(), w in 0usize..5) {
        let w = &m.worlds()[w % m.worlds().len()];
        for p in m.atoms() {
            for q in m.atoms() {
                let j = WJudgment::hyp(WJudgment::atom(p), WJudgment::atom(q));
                let bigger = m.with_token(w, q, "fresh").unwrap();
                for v in m.worlds() {
                    if m.forces(v, &j).unwrap() {
                        prop_assert!(bigger.forces(v, &j).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn rule_validity_only_looks_here(m in model()) {
        for w in m.worlds() {
            for p in m.atoms() {
                for q in m.atoms() {
                    let r = WJudgment::rule(WJudgment::atom(p), WJudgment::atom(q));
                    let h = WJudgment::hyp(WJudgment::atom(p), WJudgment::atom(q));
                    // forcing the hypothetical implies the rule is valid here
                    if m.forces(w, &h).unwrap() {
                        prop_assert!(m.forces(w, &r).unwrap());
                    }
                }
            }
        }
    }
}
