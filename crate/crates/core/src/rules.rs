//! Two readings of an inference rule `J1, ..., Jn ⊢ J`.
//!
//! Derivability is the uniform reading: a single derivation, built from
//! introduction rules and the hypothesis rule only, that works for every
//! instantiation of the metavariables. Admissibility is the material
//! reading: for every ground instantiation and every canonical verification
//! of the premises, the conclusion has a verification. The latter is
//! checked by bounded enumeration and certified relative to its bounds.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::checker::{ground_types, Checker, Inhabitation};
use crate::judgment::{Counterexample, Judgment, Trace, Verdict};
use crate::par::Exec;
use crate::syntax::{parse, ParseError};
use crate::term::{Name, Term};

/// A rule whose premises and conclusion are all of the form `A true`.
/// Each judgment is stored as its type; metavariables are the free
/// variables, which must start with an uppercase letter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleScheme {
    /// In order of first appearance.
    pub metavariables: Vec<Name>,
    pub premises: Vec<Term>,
    pub conclusion: Term,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("expected `|-` between premises and conclusion")]
    MissingTurnstile,
    #[error("judgment `{0}` must end with `true`")]
    NotTruth(String),
    #[error("in `{text}`: {source}")]
    Term { text: String, source: ParseError },
    #[error("free variable `{0}` is not a metavariable (metavariables are uppercase)")]
    LowercaseFree(Name),
}

impl RuleScheme {
    pub fn new(premises: Vec<Term>, conclusion: Term) -> Result<Self, RuleError> {
        let mut metavariables: Vec<Name> = Vec::new();
        for t in premises.iter().chain(std::iter::once(&conclusion)) {
            for v in ordered_free_vars(t) {
                if !v.starts_with(|c: char| c.is_ascii_uppercase()) {
                    return Err(RuleError::LowercaseFree(v));
                }
                if !metavariables.contains(&v) {
                    metavariables.push(v);
                }
            }
        }
        Ok(RuleScheme {
            metavariables,
            premises,
            conclusion,
        })
    }

    /// Parses `premises: J1; J2 |- conclusion: J`. Both labels are
    /// optional, premises may also be separated by commas, and `⊢` is
    /// accepted for `|-`.
    pub fn parse(text: &str) -> Result<Self, RuleError> {
        let text = text.replace('⊢', "|-");
        let (lhs, rhs) = text.split_once("|-").ok_or(RuleError::MissingTurnstile)?;
        let lhs = strip_label(lhs, "premises:");
        let rhs = strip_label(rhs, "conclusion:");
        let premises = split_premises(lhs)
            .into_iter()
            .map(parse_truth)
            .collect::<Result<Vec<_>, _>>()?;
        RuleScheme::new(premises, parse_truth(rhs)?)
    }

    /// Substitutes ground types for the metavariables, in order.
    pub fn instantiate(&self, types: &[Term]) -> (Vec<Term>, Term) {
        let subst = |t: &Term| {
            self.metavariables
                .iter()
                .zip(types)
                .fold(t.clone(), |acc, (m, g)| acc.substitute(m, g))
        };
        (
            self.premises.iter().map(subst).collect(),
            subst(&self.conclusion),
        )
    }

    /// The rule as a hypothetical judgment.
    pub fn judgment(&self) -> Judgment {
        Judgment::hyp(
            self.premises.iter().cloned().map(Judgment::True).collect(),
            Judgment::True(self.conclusion.clone()),
        )
    }
}

impl fmt::Display for RuleScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.premises.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{p} true")?;
        }
        if !self.premises.is_empty() {
            write!(f, " ")?;
        }
        write!(f, "|- {} true", self.conclusion)
    }
}

/// Parses a rule file: one rule per block, blocks separated by blank
/// lines, `#` starts a comment.
pub fn parse_rule_file(text: &str) -> Result<Vec<RuleScheme>, RuleError> {
    let mut rules = Vec::new();
    let mut block = String::new();
    for line in text.lines().chain(std::iter::once("")) {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            if !block.trim().is_empty() {
                rules.push(RuleScheme::parse(&block)?);
            }
            block.clear();
        } else {
            block.push(' ');
            block.push_str(line);
        }
    }
    Ok(rules)
}

fn ordered_free_vars(t: &Term) -> Vec<Name> {
    // free_vars is sorted; recover first-appearance order from the printed form
    let fv = t.free_vars();
    let printed = t.to_string();
    let mut found: Vec<(usize, Name)> = fv
        .into_iter()
        .map(|v| (first_word_index(&printed, &v).unwrap_or(usize::MAX), v))
        .collect();
    found.sort();
    found.into_iter().map(|(_, v)| v).collect()
}

fn first_word_index(hay: &str, word: &str) -> Option<usize> {
    let is_ident = |c: char| c.is_alphanumeric() || c == '_' || c == '\'';
    hay.match_indices(word).map(|(i, _)| i).find(|&i| {
        let before = hay[..i].chars().next_back().is_none_or(|c| !is_ident(c));
        let after = hay[i + word.len()..]
            .chars()
            .next()
            .is_none_or(|c| !is_ident(c));
        before && after
    })
}

fn strip_label<'a>(s: &'a str, label: &str) -> &'a str {
    let s = s.trim();
    s.strip_prefix(label).map(str::trim).unwrap_or(s)
}

/// Splits on `;`, or on top-level commas when no `;` is present. Commas
/// inside parentheses or pair brackets belong to terms.
fn split_premises(s: &str) -> Vec<&str> {
    if s.trim().is_empty() {
        return Vec::new();
    }
    if s.contains(';') {
        return s.split(';').map(str::trim).collect();
    }
    let mut parts = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    let mut prev = ' ';
    for (i, c) in s.char_indices() {
        match c {
            '(' | '<' => depth += 1,
            ')' => depth -= 1,
            '>' if prev != '=' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
        prev = c;
    }
    parts.push(s[start..].trim());
    parts
}

fn parse_truth(s: &str) -> Result<Term, RuleError> {
    let s = s.trim();
    let body = s
        .strip_suffix("true")
        .filter(|b| b.ends_with(char::is_whitespace) || b.ends_with(')'))
        .ok_or_else(|| RuleError::NotTruth(s.to_string()))?;
    parse(body).map_err(|source| RuleError::Term {
        text: body.trim().to_string(),
        source,
    })
}

/// The rules of the uniform system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntroRule {
    Hypothesis(Name),
    TopIntro,
    /// ∧ and ∃ introduction.
    PairIntro,
    InlIntro,
    InrIntro,
    /// ⊃ and ∀ introduction, discharging the named hypothesis.
    LamIntro(Name),
}

impl fmt::Display for IntroRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntroRule::Hypothesis(h) => write!(f, "hyp {h}"),
            IntroRule::TopIntro => write!(f, "⊤-intro"),
            IntroRule::PairIntro => write!(f, "∧/∃-intro"),
            IntroRule::InlIntro => write!(f, "∨-intro-left"),
            IntroRule::InrIntro => write!(f, "∨-intro-right"),
            IntroRule::LamIntro(h) => write!(f, "⊃/∀-intro [{h}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Derivation {
    pub rule: IntroRule,
    pub goal: Term,
    pub children: Vec<Derivation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DerivationError {
    #[error("goal `{found}` does not match expected `{expected}`")]
    GoalMismatch { expected: Term, found: Term },
    #[error("`{rule}` does not apply to `{goal}`")]
    Inapplicable { rule: IntroRule, goal: Term },
    #[error("`{rule}` expects {expected} premises, found {found}")]
    Arity {
        rule: IntroRule,
        expected: usize,
        found: usize,
    },
    #[error("hypothesis `{0}` is not in scope")]
    UnboundHypothesis(Name),
}

/// Name of the `i`th premise hypothesis.
pub fn hypothesis_name(i: usize) -> Name {
    format!("h{i}")
}

impl Derivation {
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Derivation::size).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        1 + self
            .children
            .iter()
            .map(Derivation::height)
            .max()
            .unwrap_or(0)
    }

    /// Checks the derivation against `rule`, visiting each node once.
    pub fn check(&self, rule: &RuleScheme) -> Result<(), DerivationError> {
        if !self.goal.alpha_eq(&rule.conclusion) {
            return Err(DerivationError::GoalMismatch {
                expected: rule.conclusion.clone(),
                found: self.goal.clone(),
            });
        }
        let mut ctx: Vec<(Name, Term)> = rule
            .premises
            .iter()
            .enumerate()
            .map(|(i, p)| (hypothesis_name(i), p.clone()))
            .collect();
        self.check_in(&mut ctx)
    }

    fn check_in(&self, ctx: &mut Vec<(Name, Term)>) -> Result<(), DerivationError> {
        let inapplicable = || DerivationError::Inapplicable {
            rule: self.rule.clone(),
            goal: self.goal.clone(),
        };
        let expect = |n: usize| {
            if self.children.len() == n {
                Ok(())
            } else {
                Err(DerivationError::Arity {
                    rule: self.rule.clone(),
                    expected: n,
                    found: self.children.len(),
                })
            }
        };
        let child_goal = |i: usize, expected: &Term| {
            let found = &self.children[i].goal;
            if found.alpha_eq(expected) {
                Ok(())
            } else {
                Err(DerivationError::GoalMismatch {
                    expected: expected.clone(),
                    found: found.clone(),
                })
            }
        };
        match (&self.rule, &self.goal) {
            (IntroRule::Hypothesis(h), goal) => {
                expect(0)?;
                let (_, ty) = ctx
                    .iter()
                    .rev()
                    .find(|(n, _)| n == h)
                    .ok_or_else(|| DerivationError::UnboundHypothesis(h.clone()))?;
                if ty.alpha_eq(goal) {
                    Ok(())
                } else {
                    Err(inapplicable())
                }
            }
            (IntroRule::TopIntro, Term::True) => expect(0),
            (IntroRule::PairIntro, Term::Exists(a, x, b)) => {
                expect(2)?;
                child_goal(0, a)?;
                self.children[0].check_in(ctx)?;
                let w = self.children[0].extract_witness();
                child_goal(1, &b.substitute(x, &w))?;
                self.children[1].check_in(ctx)
            }
            (IntroRule::InlIntro, Term::Disj(a, _)) | (IntroRule::InrIntro, Term::Disj(_, a)) => {
                expect(1)?;
                child_goal(0, a)?;
                self.children[0].check_in(ctx)
            }
            (IntroRule::LamIntro(h), Term::Forall(a, x, b)) => {
                expect(1)?;
                child_goal(0, &b.substitute(x, &Term::var(h)))?;
                ctx.push((h.clone(), (**a).clone()));
                let r = self.children[0].check_in(ctx);
                ctx.pop();
                r
            }
            _ => Err(inapplicable()),
        }
    }

    /// The realizer the derivation constructs, with premise hypotheses
    /// free as `h0`, `h1`, ...
    pub fn extract_witness(&self) -> Term {
        match &self.rule {
            IntroRule::Hypothesis(h) => Term::var(h),
            IntroRule::TopIntro => Term::It,
            IntroRule::PairIntro => Term::pair(
                self.children[0].extract_witness(),
                self.children[1].extract_witness(),
            ),
            IntroRule::InlIntro => Term::inl(self.children[0].extract_witness()),
            IntroRule::InrIntro => Term::inr(self.children[0].extract_witness()),
            IntroRule::LamIntro(h) => Term::lam(h, self.children[0].extract_witness()),
        }
    }

    /// Renders the derivation as an indented tree, conclusion first.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(&mut out, 0);
        out
    }

    fn render_into(&self, out: &mut String, indent: usize) {
        out.push_str(&format!(
            "{:indent$}{} true   [{}]\n",
            "", self.goal, self.rule
        ));
        for c in &self.children {
            c.render_into(out, indent + 2);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Derivability {
    Derived(Derivation),
    /// No derivation of height at most `at_depth` exists. When
    /// `exhaustive`, the search never hit the depth cut, so no derivation
    /// of any height exists.
    NotDerivable {
        at_depth: usize,
        exhaustive: bool,
    },
}

impl Derivability {
    pub fn is_derivable(&self) -> bool {
        matches!(self, Derivability::Derived(_))
    }
}

/// Bounded goal-directed search in the intro-only system.
///
/// The search is complete up to the bound: goals are decomposed by their
/// head former, and the only choice points are the hypothesis rule and the
/// two disjunction introductions. A goal headed by a metavariable or
/// `False` can only be closed by a hypothesis, so when no branch reaches
/// the bound the failure is definitive.
pub fn derive(rule: &RuleScheme, search_depth: usize) -> Derivability {
    let ctx: Vec<(Name, Term)> = rule
        .premises
        .iter()
        .enumerate()
        .map(|(i, p)| (hypothesis_name(i), p.clone()))
        .collect();
    let mut cut = false;
    match search(&rule.conclusion, &ctx, search_depth, &mut cut) {
        Some(d) => Derivability::Derived(d),
        None => Derivability::NotDerivable {
            at_depth: search_depth,
            exhaustive: !cut,
        },
    }
}

fn search(goal: &Term, ctx: &[(Name, Term)], depth: usize, cut: &mut bool) -> Option<Derivation> {
    if depth == 0 {
        *cut = true;
        return None;
    }
    let node = |rule, children| Derivation {
        rule,
        goal: goal.clone(),
        children,
    };
    if let Some((h, _)) = ctx.iter().rev().find(|(_, ty)| ty.alpha_eq(goal)) {
        return Some(node(IntroRule::Hypothesis(h.clone()), vec![]));
    }
    match goal {
        Term::True => Some(node(IntroRule::TopIntro, vec![])),
        Term::Exists(a, x, b) => {
            let left = search(a, ctx, depth - 1, cut)?;
            let b = b.substitute(x, &left.extract_witness());
            let right = search(&b, ctx, depth - 1, cut)?;
            Some(node(IntroRule::PairIntro, vec![left, right]))
        }
        Term::Disj(a, b) => {
            if let Some(d) = search(a, ctx, depth - 1, cut) {
                return Some(node(IntroRule::InlIntro, vec![d]));
            }
            search(b, ctx, depth - 1, cut).map(|d| node(IntroRule::InrIntro, vec![d]))
        }
        Term::Forall(a, x, b) => {
            let h = hypothesis_name(ctx.len());
            let mut inner = ctx.to_vec();
            inner.push((h.clone(), (**a).clone()));
            let body = b.substitute(x, &Term::var(&h));
            search(&body, &inner, depth - 1, cut).map(|d| node(IntroRule::LamIntro(h), vec![d]))
        }
        _ => None,
    }
}

/// Bounds for the material reading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub search_depth: usize,
    pub instance_depth: usize,
    pub witness_depth: usize,
    pub fuel: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            search_depth: 5,
            instance_depth: 2,
            witness_depth: 3,
            fuel: crate::checker::DEFAULT_FUEL,
        }
    }
}

enum Instance {
    /// Every premise witness tuple was transformed; the leaf records how.
    Transformed(Trace),
    Refuted(Counterexample, Trace),
    Unknown(Trace),
}

/// Checks the rule under the material reading: every ground instantiation
/// of the metavariables (types up to `instance_depth`) and every tuple of
/// canonical premise verifications (up to `witness_depth`) must yield a
/// verification of the conclusion. The first failure in enumeration order
/// is reported.
pub fn admissible(
    rule: &RuleScheme,
    instance_depth: usize,
    witness_depth: usize,
    fuel: usize,
    exec: Exec,
) -> Verdict {
    let checker = Checker::new(fuel, witness_depth);
    let ground = ground_types(instance_depth);
    let instantiations = cartesian(&vec![ground; rule.metavariables.len()]);
    let results = exec.map(&instantiations, |inst| check_instance(&checker, rule, inst));
    let bound =
        format!("admissible at instanceDepth {instance_depth}, witnessDepth {witness_depth}");
    let mut children = Vec::with_capacity(results.len());
    let mut unknown = false;
    for r in results {
        match r {
            Instance::Transformed(t) => children.push(t),
            Instance::Unknown(t) => {
                unknown = true;
                children.push(t);
            }
            Instance::Refuted(cx, t) => {
                children.push(t);
                return Verdict::Refuted {
                    trace: Trace::node(rule.judgment(), "not admissible", children),
                    counterexample: cx,
                };
            }
        }
    }
    let trace = Trace::node(rule.judgment(), bound, children);
    if unknown {
        Verdict::Unknown {
            depth: witness_depth,
            evidence: trace,
        }
    } else {
        Verdict::Verified(trace)
    }
}

fn check_instance(checker: &Checker, rule: &RuleScheme, inst: &[Term]) -> Instance {
    let (premises, conclusion) = rule.instantiate(inst);
    let j = Judgment::hyp(
        premises.iter().cloned().map(Judgment::True).collect(),
        Judgment::True(conclusion.clone()),
    );
    let instantiation: Vec<(Name, Term)> = rule
        .metavariables
        .iter()
        .cloned()
        .zip(inst.iter().cloned())
        .collect();
    let mut witness_sets = Vec::with_capacity(premises.len());
    for p in &premises {
        match checker.enumerate(p) {
            Ok(e) => witness_sets.push(e.witnesses),
            Err(e) => {
                return Instance::Unknown(Trace::leaf(j, format!("premise not enumerable: {e}")))
            }
        }
    }
    let tuples = cartesian(&witness_sets);
    if tuples.is_empty() {
        return Instance::Transformed(Trace::leaf(j, "vacuous: no premise verification"));
    }
    let targets = match checker.enumerate(&conclusion) {
        Ok(e) => e.witnesses,
        Err(e) => {
            return Instance::Unknown(Trace::leaf(j, format!("conclusion not enumerable: {e}")))
        }
    };
    let mut steps = Vec::with_capacity(tuples.len());
    for ws in &tuples {
        let from_premises = ws.iter().flat_map(closed_subterms).find(|s| {
            checker
                .member(s, &conclusion)
                .is_ok_and(|v| v.is_verified())
        });
        let step_j = Judgment::hyp(
            premises
                .iter()
                .zip(ws)
                .map(|(p, w)| Judgment::Member(w.clone(), p.clone()))
                .collect(),
            Judgment::True(conclusion.clone()),
        );
        match from_premises.or_else(|| targets.first().cloned()) {
            Some(m) => steps.push(Trace::leaf(step_j, format!("verified by {m}"))),
            None => {
                let failed = Judgment::True(conclusion.clone());
                let cx = Counterexample {
                    instantiation,
                    witnesses: ws.clone(),
                    failed: failed.clone(),
                };
                return match checker.inhabited_exact(&conclusion) {
                    Ok(Inhabitation::Uninhabited) => {
                        steps.push(Trace::leaf(Judgment::ValEmpty(conclusion), "uninhabited"));
                        Instance::Refuted(
                            cx,
                            Trace::node(j, "no verification of the conclusion", steps),
                        )
                    }
                    _ => Instance::Unknown(Trace::leaf(
                        j,
                        format!(
                            "no verification of {conclusion} found at depth {}",
                            checker.depth
                        ),
                    )),
                };
            }
        }
    }
    Instance::Transformed(Trace::node(
        j,
        "every premise verification transformed",
        steps,
    ))
}

/// Closed subterms, outermost first.
fn closed_subterms(t: &Term) -> Vec<Term> {
    let mut out = Vec::new();
    let mut stack = vec![t];
    while let Some(s) = stack.pop() {
        if s.is_closed() {
            out.push(s.clone());
        }
        match s {
            Term::Lam(_, b) | Term::Fst(b) | Term::Snd(b) | Term::Inl(b) | Term::Inr(b) => {
                stack.push(b)
            }
            Term::App(a, b) | Term::Pair(a, b) => {
                stack.push(b);
                stack.push(a);
            }
            Term::Case {
                scrutinee,
                left,
                right,
                ..
            } => {
                stack.push(right);
                stack.push(left);
                stack.push(scrutinee);
            }
            Term::Forall(a, _, b) | Term::Exists(a, _, b) | Term::Disj(a, b) => {
                stack.push(b);
                stack.push(a);
            }
            Term::Var(_) | Term::It | Term::True | Term::False => {}
        }
    }
    out
}

fn cartesian<T: Clone>(sets: &[Vec<T>]) -> Vec<Vec<T>> {
    sets.iter().fold(vec![Vec::new()], |acc, set| {
        acc.iter()
            .flat_map(|prefix| {
                set.iter().map(move |x| {
                    let mut v = prefix.clone();
                    v.push(x.clone());
                    v
                })
            })
            .collect()
    })
}

/// Both readings side by side.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub derivable: Derivability,
    pub admissible: Verdict,
    pub bounds: Bounds,
}

impl Comparison {
    /// Admissible but not derivable: a rule justified only materially.
    pub fn flagged(&self) -> bool {
        self.admissible.is_verified() && !self.derivable.is_derivable()
    }
}

pub fn compare_readings(rule: &RuleScheme, bounds: Bounds, exec: Exec) -> Comparison {
    Comparison {
        derivable: derive(rule, bounds.search_depth),
        admissible: admissible(
            rule,
            bounds.instance_depth,
            bounds.witness_depth,
            bounds.fuel,
            exec,
        ),
        bounds,
    }
}
