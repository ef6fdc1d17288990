//! Judgments, derivation traces and the four-valued verdict.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eval::{eval_with, EvalResult, Strategy};
use crate::term::{Name, Term};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Judgment {
    /// `A set`
    IsSet(Term),
    /// `M ∈ A`
    Member(Term, Term),
    /// `A = B set`
    EqSet(Term, Term),
    /// `M = N ∈ A`
    EqMember(Term, Term, Term),
    /// `A true`, used by the rule lab.
    True(Term),
    /// `M ⇓ N`
    Eval(Term, Term),
    /// `EXP(A)(M)`
    Exp(Term, Term),
    /// `EXP(A)(M, N)`
    ExpPair(Term, Term, Term),
    /// `VAL(A)(M)`
    Val(Term, Term),
    /// `VAL(A)(M, N)`
    ValPair(Term, Term, Term),
    /// `VAL(A) = ∅`
    ValEmpty(Term),
    /// Several premises established together.
    All(Vec<Judgment>),
    Hyp {
        antecedents: Vec<Judgment>,
        consequent: Box<Judgment>,
    },
    Gen {
        binders: Vec<Name>,
        body: Box<Judgment>,
    },
}

impl Judgment {
    pub fn hyp(antecedents: Vec<Judgment>, consequent: Judgment) -> Judgment {
        Judgment::Hyp {
            antecedents,
            consequent: Box::new(consequent),
        }
    }

    pub fn gen(binders: Vec<Name>, body: Judgment) -> Judgment {
        Judgment::Gen {
            binders,
            body: Box::new(body),
        }
    }
}

fn join(f: &mut fmt::Formatter<'_>, js: &[Judgment]) -> fmt::Result {
    for (i, j) in js.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{j}")?;
    }
    Ok(())
}

impl fmt::Display for Judgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Judgment::IsSet(a) => write!(f, "{a} set"),
            Judgment::Member(m, a) => write!(f, "{m} ∈ {a}"),
            Judgment::EqSet(a, b) => write!(f, "{a} = {b} set"),
            Judgment::EqMember(m, n, a) => write!(f, "{m} = {n} ∈ {a}"),
            Judgment::True(a) => write!(f, "{a} true"),
            Judgment::Eval(m, n) => write!(f, "{m} ⇓ {n}"),
            Judgment::Exp(a, m) => write!(f, "EXP({a})({m})"),
            Judgment::ExpPair(a, m, n) => write!(f, "EXP({a})({m}, {n})"),
            Judgment::Val(a, m) => write!(f, "VAL({a})({m})"),
            Judgment::ValPair(a, m, n) => write!(f, "VAL({a})({m}, {n})"),
            Judgment::ValEmpty(a) => write!(f, "VAL({a}) = ∅"),
            Judgment::All(js) => join(f, js),
            Judgment::Hyp {
                antecedents,
                consequent,
            } => {
                write!(f, "{consequent} given ")?;
                join(f, antecedents)
            }
            Judgment::Gen { binders, body } => {
                write!(f, "for all {}: {body}", binders.join(", "))
            }
        }
    }
}

/// A derivation tree: each node records the judgment, the rule that
/// established (or failed to establish) it, and its sub-derivations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub judgment: Judgment,
    pub rule: String,
    pub children: Vec<Trace>,
}

impl Trace {
    pub fn leaf(judgment: Judgment, rule: impl Into<String>) -> Trace {
        Trace {
            judgment,
            rule: rule.into(),
            children: Vec::new(),
        }
    }

    pub fn node(judgment: Judgment, rule: impl Into<String>, children: Vec<Trace>) -> Trace {
        Trace {
            judgment,
            rule: rule.into(),
            children,
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Trace::size).sum::<usize>()
    }

    /// Nodes with children, in pre-order. These are the numbered steps of the
    /// rendered derivation; leaves are shown as annotations.
    pub fn steps(&self) -> Vec<&Trace> {
        let mut out = Vec::new();
        self.collect_steps(&mut out);
        out
    }

    fn collect_steps<'a>(&'a self, out: &mut Vec<&'a Trace>) {
        if !self.children.is_empty() {
            out.push(self);
        }
        for c in &self.children {
            c.collect_steps(out);
        }
    }

    /// Numbered derivation rendering.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut n = 0;
        self.render_into(&mut out, &mut n, 0);
        out
    }

    fn render_into(&self, out: &mut String, n: &mut usize, indent: usize) {
        use std::fmt::Write;
        let pad = "  ".repeat(indent);
        if self.children.is_empty() {
            let _ = writeln!(out, "{pad}     - {}   [{}]", self.judgment, self.rule);
            return;
        }
        *n += 1;
        let _ = writeln!(out, "{pad}({n}) {}   [{}]", self.judgment, self.rule);
        let branching = self
            .children
            .iter()
            .filter(|c| !c.children.is_empty())
            .count()
            > 1;
        for c in &self.children {
            c.render_into(out, n, if branching { indent + 1 } else { indent });
        }
    }

    /// Re-runs every closed evaluation recorded in the trace and checks the
    /// recorded canonical form is reached again. Also re-matches the leaf
    /// clauses for `True`.
    pub fn replay(&self, fuel: usize, strategy: Strategy) -> Result<usize, ReplayError> {
        let mut checked = 0;
        self.replay_into(fuel, strategy, &mut checked)?;
        Ok(checked)
    }

    fn replay_into(
        &self,
        fuel: usize,
        strategy: Strategy,
        checked: &mut usize,
    ) -> Result<(), ReplayError> {
        replay_judgment(&self.judgment, &self.rule, fuel, strategy, checked)?;
        for c in &self.children {
            c.replay_into(fuel, strategy, checked)?;
        }
        Ok(())
    }
}

fn replay_judgment(
    j: &Judgment,
    rule: &str,
    fuel: usize,
    strategy: Strategy,
    checked: &mut usize,
) -> Result<(), ReplayError> {
    match j {
        Judgment::Eval(m, v) if m.is_closed() && v.is_closed() => {
            *checked += 1;
            match eval_with(m, fuel, strategy) {
                EvalResult::Canonical(c, _) if c.to_term().alpha_eq(v) => Ok(()),
                other => Err(ReplayError::Eval {
                    term: m.clone(),
                    recorded: v.clone(),
                    got: other.to_string(),
                }),
            }
        }
        Judgment::Val(Term::True, m) if rule == "VAL(True)" => {
            *checked += 1;
            if *m == Term::It {
                Ok(())
            } else {
                Err(ReplayError::Clause(j.clone()))
            }
        }
        Judgment::ValPair(Term::True, m, n) if rule == "VAL(True)" => {
            *checked += 1;
            if *m == Term::It && *n == Term::It {
                Ok(())
            } else {
                Err(ReplayError::Clause(j.clone()))
            }
        }
        Judgment::All(js) => {
            for j in js {
                replay_judgment(j, "", fuel, strategy, checked)?;
            }
            Ok(())
        }
        _ => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("recorded {term} ⇓ {recorded}, but evaluation gave {got}")]
    Eval {
        term: Term,
        recorded: Term,
        got: String,
    },
    #[error("clause no longer matches: {0}")]
    Clause(Judgment),
}

/// Why a refutation holds: the domain witnesses picked on the way down (outer
/// first), any metavariable instantiation, and the innermost judgment that
/// failed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub instantiation: Vec<(Name, Term)>,
    pub witnesses: Vec<Term>,
    pub failed: Judgment,
}

impl Counterexample {
    pub fn new(failed: Judgment) -> Self {
        Counterexample {
            instantiation: Vec::new(),
            witnesses: Vec::new(),
            failed,
        }
    }
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (x, t) in &self.instantiation {
            write!(f, "{x} := {t}; ")?;
        }
        if !self.witnesses.is_empty() {
            let ws: Vec<String> = self.witnesses.iter().map(|w| w.to_string()).collect();
            write!(f, "witnesses ({}); ", ws.join(", "))?;
        }
        write!(f, "fails: {}", self.failed)
    }
}

/// What ran out of fuel.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuelReport {
    pub fuel: usize,
    pub term: Term,
    /// The redex about to fire when the budget ran out, or the type whose
    /// structure kept unfolding past the nesting limit.
    pub at: Term,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Verified(Trace),
    Refuted {
        trace: Trace,
        counterexample: Counterexample,
    },
    /// The depth bound was exhausted before a definitive answer. The trace
    /// holds the partial evidence gathered.
    Unknown {
        depth: usize,
        evidence: Trace,
    },
    Diverged(FuelReport),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerdictKind {
    Verified,
    Refuted,
    Unknown,
    Diverged,
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictKind::Verified => "verified",
            VerdictKind::Refuted => "refuted",
            VerdictKind::Unknown => "unknown",
            VerdictKind::Diverged => "diverged",
        })
    }
}

impl Verdict {
    pub fn kind(&self) -> VerdictKind {
        match self {
            Verdict::Verified(_) => VerdictKind::Verified,
            Verdict::Refuted { .. } => VerdictKind::Refuted,
            Verdict::Unknown { .. } => VerdictKind::Unknown,
            Verdict::Diverged(_) => VerdictKind::Diverged,
        }
    }

    pub fn is_verified(&self) -> bool {
        matches!(self, Verdict::Verified(_))
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::Refuted { .. })
    }

    pub fn is_definitive(&self) -> bool {
        self.is_verified() || self.is_refuted()
    }

    pub fn trace(&self) -> Option<&Trace> {
        match self {
            Verdict::Verified(t) => Some(t),
            Verdict::Refuted { trace, .. } => Some(trace),
            Verdict::Unknown { evidence, .. } => Some(evidence),
            Verdict::Diverged(_) => None,
        }
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match self {
            Verdict::Refuted { counterexample, .. } => Some(counterexample),
            _ => None,
        }
    }

    pub fn refuted(trace: Trace, failed: Judgment) -> Verdict {
        Verdict::Refuted {
            trace,
            counterexample: Counterexample::new(failed),
        }
    }

    /// A leaf refutation whose trace is the failing judgment itself.
    pub fn refuted_leaf(failed: Judgment, rule: impl Into<String>) -> Verdict {
        Verdict::refuted(Trace::leaf(failed.clone(), rule), failed)
    }
}

/// Accumulates the premises of one rule application, short-circuiting on
/// the first refutation.
pub(crate) struct Premises {
    children: Vec<Trace>,
    pending: Option<Verdict>,
}

pub(crate) enum Step {
    Continue,
    Refuted(Verdict),
}

impl Premises {
    pub fn new() -> Self {
        Premises {
            children: Vec::new(),
            pending: None,
        }
    }

    pub fn push_trace(&mut self, t: Trace) {
        self.children.push(t);
    }

    /// Records a premise verdict. A refutation is returned wrapped in the
    /// parent node so the caller can bail out.
    pub fn add(&mut self, v: Verdict, judgment: &Judgment, rule: &str) -> Step {
        match v {
            Verdict::Verified(t) => {
                self.children.push(t);
                Step::Continue
            }
            Verdict::Refuted {
                trace,
                counterexample,
            } => {
                let mut children = std::mem::take(&mut self.children);
                children.push(trace);
                Step::Refuted(Verdict::Refuted {
                    trace: Trace::node(judgment.clone(), rule, children),
                    counterexample,
                })
            }
            Verdict::Unknown { depth, evidence } => {
                self.children.push(evidence.clone());
                if self.pending.is_none() {
                    self.pending = Some(Verdict::Unknown { depth, evidence });
                }
                Step::Continue
            }
            Verdict::Diverged(r) => {
                // Divergence outranks an unknown: more fuel is needed first.
                if !matches!(self.pending, Some(Verdict::Diverged(_))) {
                    self.pending = Some(Verdict::Diverged(r));
                }
                Step::Continue
            }
        }
    }

    /// Marks the conclusion as not yet established at this depth.
    pub fn incomplete(&mut self, depth: usize, note: Trace) {
        self.children.push(note.clone());
        if self.pending.is_none() {
            self.pending = Some(Verdict::Unknown {
                depth,
                evidence: note,
            });
        }
    }

    pub fn finish(self, judgment: Judgment, rule: &str) -> Verdict {
        let node = Trace::node(judgment, rule, self.children);
        match self.pending {
            None => Verdict::Verified(node),
            Some(Verdict::Unknown { depth, .. }) => Verdict::Unknown {
                depth,
                evidence: node,
            },
            Some(other) => other,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rendering_numbers_inner_nodes() {
        let t = Trace::node(
            Judgment::Member(Term::It, Term::True),
            "member",
            vec![
                Trace::leaf(Judgment::Eval(Term::True, Term::True), "eval"),
                Trace::node(
                    Judgment::Exp(Term::True, Term::It),
                    "EXP",
                    vec![Trace::leaf(
                        Judgment::Val(Term::True, Term::It),
                        "VAL(True)",
                    )],
                ),
            ],
        );
        let r = t.render();
        assert!(r.contains("(1) it ∈ True"));
        assert!(r.contains("(2) EXP(True)(it)"));
        assert!(!r.contains("(3)"));
        assert_eq!(t.steps().len(), 2);
        assert_eq!(t.replay(10, Strategy::CallByName), Ok(2));
    }

    #[test]
    fn replay_catches_a_bad_record() {
        let t = Trace::leaf(
            Judgment::Eval(Term::fst(Term::pair(Term::It, Term::True)), Term::True),
            "eval",
        );
        assert!(t.replay(10, Strategy::CallByName).is_err());
    }

    #[test]
    fn premises_prefer_refutation() {
        let j = Judgment::IsSet(Term::True);
        let mut p = Premises::new();
        let d = Verdict::Diverged(FuelReport {
            fuel: 1,
            term: Term::It,
            at: Term::It,
        });
        assert!(matches!(p.add(d, &j, "r"), Step::Continue));
        let r = Verdict::refuted_leaf(Judgment::Val(Term::False, Term::It), "VAL(False)");
        assert!(matches!(
            p.add(r, &j, "r"),
            Step::Refuted(Verdict::Refuted { .. })
        ));
    }
}
