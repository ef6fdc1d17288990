//! Unary logical relations: `VAL(A)` per canonical type, `EXP(A)` through
//! evaluation, and the `A set` / `M ∈ A` judgments built on them.
//!
//! Quantifier clauses are checked materially. An empty domain discharges
//! the general-hypothetical premise outright; an inhabited one is checked
//! instance by instance over its enumerated canonical members, and is only
//! `Verified` when that enumeration is complete.

use crate::checker::{ensure_closed, general_name, CheckError, Checker, Domain, Whnf, MAX_NESTING};
use crate::judgment::{Judgment, Premises, Step, Trace, Verdict};
use crate::term::Term;

/// Fresh name for the schematic canonical form in an unfolded `EXP`.
const SCHEMATIC: &str = "M";

impl Checker {
    /// `checkIsSet`
    pub fn is_set(&self, a: &Term) -> Result<Verdict, CheckError> {
        ensure_closed(a)?;
        Ok(self.is_set_at(a, 0))
    }

    /// `checkMember`
    pub fn member(&self, m: &Term, a: &Term) -> Result<Verdict, CheckError> {
        ensure_closed(m)?;
        ensure_closed(a)?;
        Ok(self.member_gated(m, a, 0))
    }

    /// The `VAL(A)(M)` clause alone, for a canonical type and a canonical
    /// witness. `member` is `eval` followed by this.
    pub fn val(&self, a: &Term, m: &Term) -> Result<Verdict, CheckError> {
        ensure_closed(m)?;
        ensure_closed(a)?;
        Ok(self.val_at(a, m, 0))
    }

    pub(crate) fn is_set_at(&self, a: &Term, nest: usize) -> Verdict {
        let j = Judgment::IsSet(a.clone());
        if nest > MAX_NESTING {
            return self.nesting_exceeded(a);
        }
        let a1 = match self.whnf(a) {
            Ok(t) => t,
            Err(Whnf::Stuck(s)) => {
                return Verdict::refuted(
                    Trace::leaf(j.clone(), format!("evaluation stuck at {s}")),
                    j,
                )
            }
            Err(Whnf::Diverged(r)) => return Verdict::Diverged(r),
        };
        let mut ps = Premises::new();
        ps.push_trace(Trace::leaf(Judgment::Eval(a.clone(), a1.clone()), "eval"));
        match &a1 {
            Term::True | Term::False => ps.finish(j, "VAL defined"),
            Term::Disj(l, r) => {
                for part in [l, r] {
                    if let Step::Refuted(v) = ps.add(self.is_set_at(part, nest + 1), &j, "IsSet(∨)")
                    {
                        return v;
                    }
                }
                ps.finish(j, "IsSet(∨)")
            }
            Term::Forall(d, x, f) | Term::Exists(d, x, f) => {
                let rule = if matches!(a1, Term::Forall(..)) {
                    "IsSet(∀)"
                } else {
                    "IsSet(∃)"
                };
                let dv = self.is_set_at(d, nest + 1);
                let domain_ok = dv.is_verified();
                if let Step::Refuted(v) = ps.add(dv, &j, rule) {
                    return v;
                }
                if !domain_ok {
                    return ps.finish(j, rule);
                }
                let dom = self
                    .whnf(d)
                    .unwrap_or_else(|_| unreachable!("domain evaluated above"));
                match self.domain(&dom, nest) {
                    Err(v) => {
                        if let Step::Refuted(v) = ps.add(v, &j, rule) {
                            return v;
                        }
                    }
                    Ok(Domain::Empty(leaf)) => ps.push_trace(leaf),
                    Ok(Domain::Witnesses(_)) if !f.occurs_free(x) => {
                        if let Step::Refuted(v) = ps.add(self.is_set_at(f, nest + 1), &j, rule) {
                            return v;
                        }
                    }
                    Ok(Domain::Witnesses(e)) => {
                        for w in &e.witnesses {
                            let inst = self.is_set_at(&f.substitute(x, w), nest + 1);
                            if let Step::Refuted(v) = ps.add(with_witness(inst, w), &j, rule) {
                                return v;
                            }
                        }
                        if !e.complete {
                            ps.incomplete(self.depth, incomplete_note(&dom, self.depth));
                        }
                    }
                }
                ps.finish(j, rule)
            }
            other => Verdict::refuted(
                Trace::node(
                    j,
                    "IsSet",
                    vec![
                        Trace::leaf(Judgment::Eval(a.clone(), a1.clone()), "eval"),
                        Trace::leaf(Judgment::IsSet(other.clone()), "no VAL clause"),
                    ],
                ),
                Judgment::IsSet(other.clone()),
            ),
        }
    }

    /// Membership with the well-formedness premise on the type checked first.
    pub(crate) fn member_gated(&self, m: &Term, a: &Term, nest: usize) -> Verdict {
        let j = Judgment::Member(m.clone(), a.clone());
        match self.is_set_at(a, nest) {
            Verdict::Verified(_) => self.member_at(m, a, nest),
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
            d @ Verdict::Diverged(_) => d,
        }
    }

    /// `M ∈ A` iff `A ⇓ A'` and `EXP(A')(M)`, where `EXP(A')(M)` iff
    /// `M ⇓ M'` and `VAL(A')(M')`.
    pub(crate) fn member_at(&self, m: &Term, a: &Term, nest: usize) -> Verdict {
        let j = Judgment::Member(m.clone(), a.clone());
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
        let m1 = match self.whnf(m) {
            Ok(t) => t,
            Err(Whnf::Stuck(s)) => {
                let failed = Judgment::Exp(a1.clone(), m.clone());
                return Verdict::refuted(
                    Trace::node(
                        j,
                        "member",
                        vec![
                            eval_a,
                            Trace::leaf(failed.clone(), format!("evaluation stuck at {s}")),
                        ],
                    ),
                    failed,
                );
            }
            Err(Whnf::Diverged(r)) => return Verdict::Diverged(r),
        };
        let exp = Judgment::All(vec![
            Judgment::Eval(m.clone(), m1.clone()),
            Judgment::Val(a1.clone(), m1.clone()),
        ]);
        wrap(self.val_at(&a1, &m1, nest), |t| {
            Trace::node(j, "member", vec![eval_a, Trace::node(exp, "EXP", vec![t])])
        })
    }

    /// `VAL(A)(M)` for canonical `A` and `M`. The returned trace is the
    /// unfolded clause.
    pub(crate) fn val_at(&self, a: &Term, m: &Term, nest: usize) -> Verdict {
        let j = Judgment::Val(a.clone(), m.clone());
        match (a, m) {
            (Term::True, Term::It) => Verdict::Verified(Trace::leaf(j, "VAL(True)")),
            (Term::True, _) => Verdict::refuted_leaf(j, "VAL(True) = {it}"),
            (Term::False, _) => Verdict::refuted_leaf(j, "VAL(False) = ∅"),
            (Term::Disj(l, _), Term::Inl(v)) => wrap(self.member_at(v, l, nest + 1), |t| {
                Trace::node(j, "VAL(∨) inl", vec![t])
            }),
            (Term::Disj(_, r), Term::Inr(v)) => wrap(self.member_at(v, r, nest + 1), |t| {
                Trace::node(j, "VAL(∨) inr", vec![t])
            }),
            (Term::Disj(..), _) => Verdict::refuted_leaf(j, "VAL(∨) holds only injections"),
            (Term::Exists(d, x, f), Term::Pair(p, q)) => {
                let mut ps = Premises::new();
                let rule = "VAL(∃)";
                if let Step::Refuted(v) = ps.add(self.member_at(p, d, nest + 1), &j, rule) {
                    return v;
                }
                let fam = f.substitute(x, p);
                if let Step::Refuted(v) = ps.add(self.member_at(q, &fam, nest + 1), &j, rule) {
                    return v;
                }
                ps.finish(j, rule)
            }
            (Term::Exists(..), _) => Verdict::refuted_leaf(j, "VAL(∃) holds only pairs"),
            (Term::Forall(d, x, f), Term::Lam(y, e)) => self.val_forall(d, x, f, y, e, nest),
            (Term::Forall(..), _) => Verdict::refuted_leaf(j, "VAL(∀) holds only lambdas"),
            _ => Verdict::refuted_leaf(Judgment::IsSet(a.clone()), "no VAL clause"),
        }
    }

    fn val_forall(&self, d: &Term, x: &str, f: &Term, y: &str, e: &Term, nest: usize) -> Verdict {
        let g = general_name(y);
        let gv = Term::var(&g);
        let consequent = Judgment::Member(e.substitute(y, &gv), f.substitute(x, &gv));
        let clause = Judgment::gen(
            vec![g.clone()],
            Judgment::hyp(
                vec![Judgment::Member(gv.clone(), d.clone())],
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
                // Unfold the antecedent down to VAL(dom) and discharge it.
                let schematic = Term::var(SCHEMATIC);
                let as_exp = Judgment::gen(
                    vec![g.clone()],
                    Judgment::hyp(
                        vec![Judgment::Exp(dom.clone(), gv.clone())],
                        consequent.clone(),
                    ),
                );
                let as_val = Judgment::gen(
                    vec![g.clone()],
                    Judgment::hyp(
                        vec![
                            Judgment::Eval(gv.clone(), schematic.clone()),
                            Judgment::Val(dom.clone(), schematic),
                        ],
                        consequent,
                    ),
                );
                Verdict::Verified(Trace::node(
                    clause,
                    rule,
                    vec![Trace::node(
                        as_exp,
                        "member",
                        vec![
                            Trace::leaf(Judgment::Eval(d.clone(), dom.clone()), "eval"),
                            Trace::node(as_val, "EXP", vec![leaf]),
                        ],
                    )],
                ))
            }
            Ok(Domain::Witnesses(en)) => {
                let mut ps = Premises::new();
                for w in &en.witnesses {
                    let inst_j = Judgment::hyp(
                        vec![Judgment::Member(w.clone(), d.clone())],
                        Judgment::Member(e.substitute(y, w), f.substitute(x, w)),
                    );
                    let v = self.member_at(&e.substitute(y, w), &f.substitute(x, w), nest + 1);
                    let v = wrap(with_witness(v, w), |t| {
                        Trace::node(inst_j, "instance", vec![t])
                    });
                    if let Step::Refuted(v) = ps.add(v, &clause, rule) {
                        return v;
                    }
                }
                if !en.complete {
                    ps.incomplete(self.depth, incomplete_note(&dom, self.depth));
                }
                ps.finish(clause, rule)
            }
        }
    }
}

pub(crate) fn incomplete_note(dom: &Term, depth: usize) -> Trace {
    Trace::leaf(
        Judgment::IsSet(dom.clone()),
        format!("domain enumeration incomplete at depth {depth}"),
    )
}

/// Re-roots the trace of a verdict, keeping its kind and counterexample.
pub(crate) fn wrap(v: Verdict, f: impl FnOnce(Trace) -> Trace) -> Verdict {
    match v {
        Verdict::Verified(t) => Verdict::Verified(f(t)),
        Verdict::Refuted {
            trace,
            counterexample,
        } => Verdict::Refuted {
            trace: f(trace),
            counterexample,
        },
        Verdict::Unknown { depth, evidence } => Verdict::Unknown {
            depth,
            evidence: f(evidence),
        },
        d @ Verdict::Diverged(_) => d,
    }
}

/// Records the domain witness chosen at this level of a refutation.
pub(crate) fn with_witness(v: Verdict, w: &Term) -> Verdict {
    with_witnesses(v, &[w])
}

pub(crate) fn with_witnesses(v: Verdict, ws: &[&Term]) -> Verdict {
    match v {
        Verdict::Refuted {
            trace,
            mut counterexample,
        } => {
            let outer: Vec<Term> = ws.iter().map(|w| (*w).clone()).collect();
            counterexample.witnesses.splice(0..0, outer);
            Verdict::Refuted {
                trace,
                counterexample,
            }
        }
        other => other,
    }
}
