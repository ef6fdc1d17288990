//! Binary logical relations: each type denotes a partial equivalence
//! relation on canonical terms. `A = B set` compares relations, `M = N ∈ A`
//! asks whether the evaluated pair lies in the relation of the evaluated
//! type. Quantifier clauses range over related pairs of the domain, which
//! is where functionality is enforced.

use crate::checker::{ensure_closed, CheckError, Checker, Domain, Whnf, MAX_NESTING};
use crate::judgment::{Judgment, Premises, Step, Trace, Verdict, VerdictKind};
use crate::term::{Name, Term};
use crate::unary::{incomplete_note, with_witnesses, wrap};

/// Related canonical pairs of a domain, found by filtering all enumerated
/// pairs through `M = N ∈ A`.
struct RelatedPairs {
    pairs: Vec<(Term, Term)>,
    /// Set when enumeration was incomplete or some pair was undecided.
    pending: Option<Verdict>,
}

impl Checker {
    /// `checkEqSet`
    pub fn eq_set(&self, a: &Term, b: &Term) -> Result<Verdict, CheckError> {
        ensure_closed(a)?;
        ensure_closed(b)?;
        Ok(self.eq_set_at(a, b, 0))
    }

    /// `checkEqMember`. The type must first be equal to itself as a set.
    pub fn eq_member(&self, m: &Term, n: &Term, a: &Term) -> Result<Verdict, CheckError> {
        ensure_closed(m)?;
        ensure_closed(n)?;
        ensure_closed(a)?;
        let j = Judgment::EqMember(m.clone(), n.clone(), a.clone());
        Ok(match self.eq_set_at(a, a, 0) {
            Verdict::Verified(_) => self.eq_member_at(m, n, a, 0),
            other => gate_failure(other, j),
        })
    }

    /// `checkFunctionality`: reflexive membership of `f` at the dependent
    /// function type `forall binder : domain . family`.
    pub fn functionality(
        &self,
        f: &Term,
        domain: &Term,
        binder: &str,
        family: &Term,
    ) -> Result<Verdict, CheckError> {
        let pi = Term::forall(domain.clone(), binder, family.clone());
        self.eq_member(f, f, &pi)
    }

    /// Decides `M = N ∈ A` for every ordered pair of candidates, checking
    /// that `A` is a set only once. Entry `[i][j]` relates candidates `i`
    /// and `j`; a non-set type yields an all-refuted matrix.
    pub fn relation_matrix(
        &self,
        a: &Term,
        candidates: &[Term],
    ) -> Result<Vec<Vec<VerdictKind>>, CheckError> {
        ensure_closed(a)?;
        for c in candidates {
            ensure_closed(c)?;
        }
        let gate = self.eq_set_at(a, a, 0).kind();
        Ok(candidates
            .iter()
            .map(|m| {
                candidates
                    .iter()
                    .map(|n| match gate {
                        VerdictKind::Verified => self.eq_member_at(m, n, a, 0).kind(),
                        other => other,
                    })
                    .collect()
            })
            .collect())
    }

    pub(crate) fn eq_set_at(&self, a: &Term, b: &Term, nest: usize) -> Verdict {
        let j = Judgment::EqSet(a.clone(), b.clone());
        if nest > MAX_NESTING {
            return self.nesting_exceeded(a);
        }
        let (a1, b1) = match (self.whnf(a), self.whnf(b)) {
            (Ok(a1), Ok(b1)) => (a1, b1),
            (Err(Whnf::Diverged(r)), _) | (_, Err(Whnf::Diverged(r))) => {
                return Verdict::Diverged(r)
            }
            (Err(Whnf::Stuck(s)), _) | (_, Err(Whnf::Stuck(s))) => {
                return Verdict::refuted_leaf(Judgment::IsSet(s), "evaluation stuck")
            }
        };
        let mut ps = Premises::new();
        ps.push_trace(Trace::leaf(Judgment::Eval(a.clone(), a1.clone()), "eval"));
        ps.push_trace(Trace::leaf(Judgment::Eval(b.clone(), b1.clone()), "eval"));
        match (&a1, &b1) {
            (Term::True, Term::True) | (Term::False, Term::False) => {
                ps.finish(j, "VAL(A') ≡ VAL(B')")
            }
            (Term::Disj(l1, r1), Term::Disj(l2, r2)) => {
                let rule = "EqSet(∨)";
                for (x, y) in [(l1, l2), (r1, r2)] {
                    if let Step::Refuted(v) = ps.add(self.eq_set_at(x, y, nest + 1), &j, rule) {
                        return v;
                    }
                }
                ps.finish(j, rule)
            }
            (Term::Forall(d1, x1, f1), Term::Forall(d2, x2, f2))
            | (Term::Exists(d1, x1, f1), Term::Exists(d2, x2, f2)) => {
                let rule = if matches!(a1, Term::Forall(..)) {
                    "EqSet(∀)"
                } else {
                    "EqSet(∃)"
                };
                let dv = self.eq_set_at(d1, d2, nest + 1);
                let domain_ok = dv.is_verified();
                if let Step::Refuted(v) = ps.add(dv, &j, rule) {
                    return v;
                }
                if !domain_ok {
                    return ps.finish(j, rule);
                }
                let dom = self
                    .whnf(d1)
                    .unwrap_or_else(|_| unreachable!("domain evaluated above"));
                match self.domain(&dom, nest) {
                    Err(v) => {
                        if let Step::Refuted(v) = ps.add(v, &j, rule) {
                            return v;
                        }
                    }
                    Ok(Domain::Empty(leaf)) => ps.push_trace(leaf),
                    Ok(Domain::Witnesses(_)) if !f1.occurs_free(x1) && !f2.occurs_free(x2) => {
                        if let Step::Refuted(v) = ps.add(self.eq_set_at(f1, f2, nest + 1), &j, rule)
                        {
                            return v;
                        }
                    }
                    Ok(Domain::Witnesses(_)) => {
                        let rel = self.related_pairs(&dom, nest);
                        for (y, z) in &rel.pairs {
                            let v = self.eq_set_at(
                                &f1.substitute(x1, y),
                                &f2.substitute(x2, z),
                                nest + 1,
                            );
                            if let Step::Refuted(v) = ps.add(with_witnesses(v, &[y, z]), &j, rule) {
                                return v;
                            }
                        }
                        if let Some(p) = rel.pending {
                            if let Step::Refuted(v) = ps.add(p, &j, rule) {
                                return v;
                            }
                        }
                    }
                }
                ps.finish(j, rule)
            }
            _ => {
                let failed = Judgment::EqSet(a1.clone(), b1.clone());
                let rule = if a1.as_canonical().is_some_and(|c| c.is_type_former())
                    && b1.as_canonical().is_some_and(|c| c.is_type_former())
                {
                    "different type formers"
                } else {
                    "no VAL clause"
                };
                let mut children = vec![
                    Trace::leaf(Judgment::Eval(a.clone(), a1.clone()), "eval"),
                    Trace::leaf(Judgment::Eval(b.clone(), b1.clone()), "eval"),
                ];
                children.push(Trace::leaf(failed.clone(), rule));
                Verdict::refuted(Trace::node(j, rule, children), failed)
            }
        }
    }

    fn related_pairs(&self, dom: &Term, nest: usize) -> RelatedPairs {
        let en = match self.enumerate_at(dom, self.depth, nest + 1) {
            Ok(e) => e,
            Err(crate::checker::EnumError::Diverged(r)) => {
                return RelatedPairs {
                    pairs: vec![],
                    pending: Some(Verdict::Diverged(r)),
                }
            }
            Err(e) => unreachable!("domain was checked to be a set: {e}"),
        };
        let mut pairs = Vec::new();
        let mut pending = None;
        for y in &en.witnesses {
            for z in &en.witnesses {
                match self.eq_member_at(y, z, dom, nest + 1) {
                    Verdict::Verified(_) => pairs.push((y.clone(), z.clone())),
                    Verdict::Refuted { .. } => {}
                    v => {
                        if !matches!(pending, Some(Verdict::Diverged(_))) {
                            pending = Some(v);
                        }
                    }
                }
            }
        }
        if pending.is_none() && !en.complete {
            pending = Some(Verdict::Unknown {
                depth: self.depth,
                evidence: incomplete_note(dom, self.depth),
            });
        }
        RelatedPairs { pairs, pending }
    }

    /// `M = N ∈ A` iff `A ⇓ A'` and `EXP(A')(M, N)`.
    pub(crate) fn eq_member_at(&self, m: &Term, n: &Term, a: &Term, nest: usize) -> Verdict {
        let j = Judgment::EqMember(m.clone(), n.clone(), a.clone());
        if nest > MAX_NESTING {
            return self.nesting_exceeded(a);
        }
        let a1 = match self.whnf(a) {
            Ok(t) => t,
            Err(Whnf::Stuck(_)) => {
                return Verdict::refuted(Trace::leaf(j.clone(), "type is stuck"), j)
            }
            Err(Whnf::Diverged(r)) => return Verdict::Diverged(r),
        };
        let eval_a = Trace::leaf(Judgment::Eval(a.clone(), a1.clone()), "eval");
        let mut values = Vec::with_capacity(2);
        for side in [m, n] {
            match self.whnf(side) {
                Ok(t) => values.push(t),
                Err(Whnf::Stuck(s)) => {
                    let failed = Judgment::ExpPair(a1.clone(), m.clone(), n.clone());
                    return Verdict::refuted(
                        Trace::node(
                            j,
                            "EqMember",
                            vec![
                                eval_a,
                                Trace::leaf(failed.clone(), format!("evaluation stuck at {s}")),
                            ],
                        ),
                        failed,
                    );
                }
                Err(Whnf::Diverged(r)) => return Verdict::Diverged(r),
            }
        }
        let n1 = values.pop().unwrap();
        let m1 = values.pop().unwrap();
        let exp = Judgment::All(vec![
            Judgment::Eval(m.clone(), m1.clone()),
            Judgment::Eval(n.clone(), n1.clone()),
            Judgment::ValPair(a1.clone(), m1.clone(), n1.clone()),
        ]);
        wrap(self.val_pair_at(&a1, &m1, &n1, nest), |t| {
            Trace::node(
                j,
                "EqMember",
                vec![eval_a, Trace::node(exp, "EXP", vec![t])],
            )
        })
    }

    /// `VAL(A)(M, N)` for canonical arguments.
    pub(crate) fn val_pair_at(&self, a: &Term, m: &Term, n: &Term, nest: usize) -> Verdict {
        let j = Judgment::ValPair(a.clone(), m.clone(), n.clone());
        match (a, m, n) {
            (Term::True, Term::It, Term::It) => Verdict::Verified(Trace::leaf(j, "VAL(True)")),
            (Term::True, _, _) => Verdict::refuted_leaf(j, "VAL(True) = {(it, it)}"),
            (Term::False, _, _) => Verdict::refuted_leaf(j, "VAL(False) = ∅"),
            (Term::Disj(l, _), Term::Inl(u), Term::Inl(v)) => {
                wrap(self.eq_member_at(u, v, l, nest + 1), |t| {
                    Trace::node(j, "VAL(∨) inl", vec![t])
                })
            }
            (Term::Disj(_, r), Term::Inr(u), Term::Inr(v)) => {
                wrap(self.eq_member_at(u, v, r, nest + 1), |t| {
                    Trace::node(j, "VAL(∨) inr", vec![t])
                })
            }
            (Term::Disj(..), _, _) => {
                Verdict::refuted_leaf(j, "VAL(∨) relates only matching injections")
            }
            (Term::Exists(d, x, f), Term::Pair(p1, q1), Term::Pair(p2, q2)) => {
                let rule = "VAL(∃)";
                let mut ps = Premises::new();
                if let Step::Refuted(v) = ps.add(self.eq_member_at(p1, p2, d, nest + 1), &j, rule) {
                    return v;
                }
                let fam = f.substitute(x, p1);
                if let Step::Refuted(v) =
                    ps.add(self.eq_member_at(q1, q2, &fam, nest + 1), &j, rule)
                {
                    return v;
                }
                ps.finish(j, rule)
            }
            (Term::Exists(..), _, _) => Verdict::refuted_leaf(j, "VAL(∃) relates only pairs"),
            (Term::Forall(d, x, f), Term::Lam(y1, e1), Term::Lam(y2, e2)) => {
                self.val_pair_forall(d, x, f, (y1, e1), (y2, e2), nest)
            }
            (Term::Forall(..), _, _) => Verdict::refuted_leaf(j, "VAL(∀) relates only lambdas"),
            _ => Verdict::refuted_leaf(Judgment::IsSet(a.clone()), "no VAL clause"),
        }
    }

    fn val_pair_forall(
        &self,
        d: &Term,
        x: &str,
        f: &Term,
        (y1, e1): (&Name, &Term),
        (y2, e2): (&Name, &Term),
        nest: usize,
    ) -> Verdict {
        let (g, h) = (Term::var("y"), Term::var("z"));
        let consequent = Judgment::EqMember(
            e1.substitute(y1, &g),
            e2.substitute(y2, &h),
            f.substitute(x, &g),
        );
        let binders = vec!["y".to_string(), "z".to_string()];
        let clause = Judgment::gen(
            binders.clone(),
            Judgment::hyp(
                vec![Judgment::EqMember(g.clone(), h.clone(), d.clone())],
                consequent.clone(),
            ),
        );
        let rule = "VAL(∀)";
        let dom = match self.whnf(d) {
            Ok(t) => t,
            Err(Whnf::Diverged(r)) => return Verdict::Diverged(r),
            Err(Whnf::Stuck(_)) => {
                return Verdict::refuted_leaf(Judgment::IsSet(d.clone()), "domain is stuck")
            }
        };
        match self.domain(&dom, nest) {
            Err(v) => wrap(v, |t| Trace::node(clause, rule, vec![t])),
            Ok(Domain::Empty(leaf)) => {
                let (sm, sn) = (Term::var("M"), Term::var("N"));
                let as_exp = Judgment::gen(
                    binders.clone(),
                    Judgment::hyp(
                        vec![Judgment::ExpPair(dom.clone(), g.clone(), h.clone())],
                        consequent.clone(),
                    ),
                );
                let as_val = Judgment::gen(
                    binders,
                    Judgment::hyp(
                        vec![
                            Judgment::Eval(g, sm.clone()),
                            Judgment::Eval(h, sn.clone()),
                            Judgment::ValPair(dom.clone(), sm, sn),
                        ],
                        consequent,
                    ),
                );
                Verdict::Verified(Trace::node(
                    clause,
                    rule,
                    vec![Trace::node(
                        as_exp,
                        "EqMember",
                        vec![
                            Trace::leaf(Judgment::Eval(d.clone(), dom.clone()), "eval"),
                            Trace::node(as_val, "EXP", vec![leaf]),
                        ],
                    )],
                ))
            }
            Ok(Domain::Witnesses(_)) => {
                let rel = self.related_pairs(&dom, nest);
                let mut ps = Premises::new();
                for (u, v) in &rel.pairs {
                    let left = e1.substitute(y1, u);
                    let right = e2.substitute(y2, v);
                    let fam = f.substitute(x, u);
                    let inst_j = Judgment::hyp(
                        vec![Judgment::EqMember(u.clone(), v.clone(), d.clone())],
                        Judgment::EqMember(left.clone(), right.clone(), fam.clone()),
                    );
                    let verdict = self.eq_member_at(&left, &right, &fam, nest + 1);
                    let verdict = wrap(with_witnesses(verdict, &[u, v]), |t| {
                        Trace::node(inst_j, "instance", vec![t])
                    });
                    if let Step::Refuted(r) = ps.add(verdict, &clause, rule) {
                        return r;
                    }
                }
                if let Some(p) = rel.pending {
                    if let Step::Refuted(r) = ps.add(p, &clause, rule) {
                        return r;
                    }
                }
                ps.finish(clause, rule)
            }
        }
    }
}

fn gate_failure(gate: Verdict, j: Judgment) -> Verdict {
    match gate {
        Verdict::Refuted {
            trace,
            counterexample,
        } => Verdict::Refuted {
            trace: Trace::node(j, "type is not a set", vec![trace]),
            counterexample,
        },
        Verdict::Unknown { depth, evidence } => Verdict::Unknown {
            depth,
            evidence: Trace::node(j, "type not yet known to be a set", vec![evidence]),
        },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn t(s: &str) -> Term {
        parse(s).unwrap()
    }

    fn c() -> Checker {
        Checker::new(1000, 4)
    }

    #[test]
    fn eq_set_examples() {
        assert!(c().eq_set(&Term::True, &Term::True).unwrap().is_verified());
        assert!(c().eq_set(&Term::True, &Term::False).unwrap().is_refuted());
        assert!(c()
            .eq_set(&t("False => True"), &t("False => False"))
            .unwrap()
            .is_verified());
        assert!(c()
            .eq_set(&t("True => True"), &t("True => False"))
            .unwrap()
            .is_refuted());
        assert!(c()
            .eq_set(&t("True \\/ False"), &t("True /\\ False"))
            .unwrap()
            .is_refuted());
    }

    #[test]
    fn eq_member_examples() {
        assert!(c()
            .eq_member(&Term::It, &Term::It, &Term::True)
            .unwrap()
            .is_verified());
        assert!(c()
            .eq_member(&t("lam x. x"), &t("lam y. y"), &t("True => True"))
            .unwrap()
            .is_verified());
        assert!(c()
            .eq_member(&t("inl it"), &t("inr it"), &t("True \\/ True"))
            .unwrap()
            .is_refuted());
        // extensionally equal functions are related
        assert!(c()
            .eq_member(&t("lam x. x"), &t("lam x. it"), &t("True => True"))
            .unwrap()
            .is_verified());
    }

    #[test]
    fn functionality_counterexample() {
        let f = t("lam x. case x of inl a -> it | inr b -> <it, it>");
        let v = c()
            .functionality(&f, &t("True \\/ True"), "_", &Term::True)
            .unwrap();
        let cx = v.counterexample().expect("refuted");
        assert_eq!(cx.witnesses, vec![t("inr it"), t("inr it")]);
        assert_eq!(
            cx.failed,
            Judgment::ValPair(Term::True, t("<it, it>"), t("<it, it>"))
        );
    }

    #[test]
    fn functionality_positive() {
        assert!(c()
            .functionality(&t("lam x. x"), &Term::True, "_", &Term::True)
            .unwrap()
            .is_verified());
        assert!(c()
            .functionality(&t("lam x. it"), &Term::False, "_", &Term::True)
            .unwrap()
            .is_verified());
    }

    #[test]
    fn non_sets_refute() {
        assert!(c()
            .eq_member(&Term::It, &Term::It, &Term::It)
            .unwrap()
            .is_refuted());
        assert!(c().eq_set(&Term::It, &Term::It).unwrap().is_refuted());
    }

    #[test]
    fn dependent_family_must_be_functional() {
        // y = z ∈ True => True relates lam x. x and lam x. it, but the family
        // distinguishes them intensionally only by application, which agrees.
        let a = t("forall f : True => True . case (f it) of inl a -> True | inr b -> True");
        // f it evaluates to `it`, so the case is stuck: not a set.
        assert!(c().eq_set(&a, &a).unwrap().is_refuted());
    }

    #[test]
    fn relation_matrix_is_symmetric_on_disjunction() {
        let cands = vec![t("inl it"), t("inr it"), Term::It];
        let m = c().relation_matrix(&t("True \\/ True"), &cands).unwrap();
        assert_eq!(m[0][0], VerdictKind::Verified);
        assert_eq!(m[0][1], VerdictKind::Refuted);
        assert_eq!(m[1][1], VerdictKind::Verified);
        assert_eq!(m[2][2], VerdictKind::Refuted);
    }
}
