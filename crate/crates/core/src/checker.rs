//! Shared machinery for the unary and binary checkers: budgets, evaluation
//! to canonical form, canonical-witness enumeration and exact inhabitation
//! for the ground fragment.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eval::{eval_with, EvalResult, Strategy};
use crate::judgment::{FuelReport, Judgment, Trace, Verdict};
use crate::term::{sort_dedup, Name, Nameless, Term, UNUSED_BINDER};

/// How far type structure may unfold inside one check before it is treated
/// as divergent. Types such as `(lam f. f f) (lam f. True => f f)` evaluate
/// to canonical forms whose components never bottom out.
pub const MAX_NESTING: usize = 64;

pub const DEFAULT_FUEL: usize = 10_000;
pub const DEFAULT_DEPTH: usize = 4;

/// Budgets and strategy for one family of checks. Fuel bounds each
/// individual evaluation; depth bounds the constructor nesting of
/// enumerated canonical witnesses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checker {
    pub fuel: usize,
    pub depth: usize,
    pub strategy: Strategy,
}

impl Default for Checker {
    fn default() -> Self {
        Checker::new(DEFAULT_FUEL, DEFAULT_DEPTH)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("term has free variables: {}", .0.iter().cloned().collect::<Vec<_>>().join(", "))]
    Open(BTreeSet<Name>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumError {
    #[error("evaluation diverged within fuel {}", .0.fuel)]
    Diverged(FuelReport),
    #[error("{0} is not a set")]
    NotASet(Term),
    #[error(transparent)]
    Check(#[from] CheckError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Inhabitation {
    Inhabited,
    Uninhabited,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InhabitError {
    #[error("a type family depends on its binder")]
    NotGround,
    #[error("{0} is not a set")]
    NotASet(Term),
    #[error("evaluation diverged within fuel {}", .0.fuel)]
    Diverged(FuelReport),
    #[error(transparent)]
    Check(#[from] CheckError),
}

/// Canonical members of a type up to a constructor depth, in the order of
/// [`Term::canonical_cmp`], pairwise non-alpha-equivalent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Enumeration {
    pub witnesses: Vec<Term>,
    /// The list exhausts the type. For function types this is relative to
    /// the representative grammar: constant functions over the codomain's
    /// members, plus the identity when the domain equals the codomain or is
    /// empty.
    pub complete: bool,
}

impl Enumeration {
    fn new(witnesses: Vec<Term>, complete: bool) -> Self {
        Enumeration {
            witnesses,
            complete,
        }
    }

    pub fn is_provably_empty(&self) -> bool {
        self.complete && self.witnesses.is_empty()
    }
}

pub(crate) enum Whnf {
    Stuck(Term),
    Diverged(FuelReport),
}

/// Result of asking whether a quantifier's domain has canonical members.
pub(crate) enum Domain {
    /// No canonical member exists; the leaf records why.
    Empty(Trace),
    Witnesses(Enumeration),
}

pub(crate) fn ensure_closed(t: &Term) -> Result<(), CheckError> {
    let fv = t.free_vars();
    if fv.is_empty() {
        Ok(())
    } else {
        Err(CheckError::Open(fv))
    }
}

/// Name for the generic variable of a general judgment.
pub(crate) fn general_name(binder: &str) -> Name {
    if binder == UNUSED_BINDER {
        "x".to_string()
    } else {
        binder.to_string()
    }
}

impl Checker {
    pub fn new(fuel: usize, depth: usize) -> Self {
        Checker {
            fuel,
            depth,
            strategy: Strategy::CallByName,
        }
    }

    pub fn with_strategy(self, strategy: Strategy) -> Self {
        Checker { strategy, ..self }
    }

    pub fn with_depth(self, depth: usize) -> Self {
        Checker { depth, ..self }
    }

    pub fn with_fuel(self, fuel: usize) -> Self {
        Checker { fuel, ..self }
    }

    /// Evaluates to a canonical form, returned as a term.
    pub(crate) fn whnf(&self, t: &Term) -> Result<Term, Whnf> {
        match eval_with(t, self.fuel, self.strategy) {
            EvalResult::Canonical(c, _) => Ok(c.into_term()),
            EvalResult::Stuck(s) => Err(Whnf::Stuck(s)),
            EvalResult::FuelExhausted(redex) => Err(Whnf::Diverged(FuelReport {
                fuel: self.fuel,
                term: t.clone(),
                at: redex,
            })),
        }
    }

    pub(crate) fn nesting_exceeded(&self, t: &Term) -> Verdict {
        Verdict::Diverged(FuelReport {
            fuel: self.fuel,
            term: t.clone(),
            at: t.clone(),
        })
    }

    /// `inhabitedExact`: decides inhabitation for ground types, where no
    /// family depends on its binder.
    pub fn inhabited_exact(&self, a: &Term) -> Result<Inhabitation, InhabitError> {
        ensure_closed(a)?;
        self.inhabited_at(a, 0)
    }

    fn inhabited_at(&self, a: &Term, nest: usize) -> Result<Inhabitation, InhabitError> {
        use Inhabitation::*;
        if nest > MAX_NESTING {
            return Err(InhabitError::Diverged(FuelReport {
                fuel: self.fuel,
                term: a.clone(),
                at: a.clone(),
            }));
        }
        let a1 = match self.whnf(a) {
            Ok(t) => t,
            Err(Whnf::Stuck(s)) => return Err(InhabitError::NotASet(s)),
            Err(Whnf::Diverged(r)) => return Err(InhabitError::Diverged(r)),
        };
        let both = |l: &Term, r: &Term| -> Result<(bool, bool), InhabitError> {
            let l = self.inhabited_at(l, nest + 1)? == Inhabited;
            let r = self.inhabited_at(r, nest + 1)? == Inhabited;
            Ok((l, r))
        };
        let yes = |b: bool| if b { Inhabited } else { Uninhabited };
        match &a1 {
            Term::True => Ok(Inhabited),
            Term::False => Ok(Uninhabited),
            Term::Disj(l, r) => {
                let (l, r) = both(l, r)?;
                Ok(yes(l || r))
            }
            Term::Exists(d, x, f) | Term::Forall(d, x, f) => {
                if f.occurs_free(x) {
                    // still evaluate the domain so divergence is reported
                    self.inhabited_at(d, nest + 1)?;
                    return Err(InhabitError::NotGround);
                }
                let (d_in, f_in) = both(d, f)?;
                Ok(match a1 {
                    Term::Exists(..) => yes(d_in && f_in),
                    _ => yes(!d_in || f_in),
                })
            }
            other => Err(InhabitError::NotASet(other.clone())),
        }
    }

    /// `enumerateCanonical` at the checker's depth.
    pub fn enumerate(&self, a: &Term) -> Result<Enumeration, EnumError> {
        ensure_closed(a)?;
        self.enumerate_at(a, self.depth, 0)
    }

    pub fn enumerate_to(&self, a: &Term, depth: usize) -> Result<Enumeration, EnumError> {
        ensure_closed(a)?;
        self.enumerate_at(a, depth, 0)
    }

    pub(crate) fn enumerate_at(
        &self,
        a: &Term,
        depth: usize,
        nest: usize,
    ) -> Result<Enumeration, EnumError> {
        if nest > MAX_NESTING {
            return Err(EnumError::Diverged(FuelReport {
                fuel: self.fuel,
                term: a.clone(),
                at: a.clone(),
            }));
        }
        let a1 = match self.whnf(a) {
            Ok(t) => t,
            Err(Whnf::Stuck(s)) => return Err(EnumError::NotASet(s)),
            Err(Whnf::Diverged(r)) => return Err(EnumError::Diverged(r)),
        };
        let sub = depth.saturating_sub(1);
        let rec = |t: &Term| self.enumerate_at(t, sub, nest + 1);
        let mut out = match &a1 {
            Term::False => Enumeration::new(vec![], true),
            Term::True => {
                if depth >= 1 {
                    Enumeration::new(vec![Term::It], true)
                } else {
                    Enumeration::new(vec![], false)
                }
            }
            Term::Disj(l, r) => {
                let (l, r) = (rec(l)?, rec(r)?);
                if depth == 0 {
                    Enumeration::new(vec![], l.is_provably_empty() && r.is_provably_empty())
                } else {
                    let ws = l
                        .witnesses
                        .iter()
                        .map(|w| Term::inl(w.clone()))
                        .chain(r.witnesses.iter().map(|w| Term::inr(w.clone())))
                        .collect();
                    Enumeration::new(ws, l.complete && r.complete)
                }
            }
            Term::Exists(d, x, f) => {
                let dom = rec(d)?;
                if dom.is_provably_empty() {
                    Enumeration::new(vec![], true)
                } else if !f.occurs_free(x) {
                    let fam = rec(f)?;
                    if fam.is_provably_empty() {
                        Enumeration::new(vec![], true)
                    } else if depth == 0 {
                        Enumeration::new(vec![], false)
                    } else {
                        let mut ws = Vec::new();
                        for p in &dom.witnesses {
                            for q in &fam.witnesses {
                                ws.push(Term::pair(p.clone(), q.clone()));
                            }
                        }
                        Enumeration::new(ws, dom.complete && fam.complete)
                    }
                } else if depth == 0 {
                    Enumeration::new(vec![], false)
                } else {
                    let mut ws = Vec::new();
                    let mut complete = dom.complete;
                    for p in &dom.witnesses {
                        let fam = rec(&f.substitute(x, p))?;
                        complete &= fam.complete;
                        for q in fam.witnesses {
                            ws.push(Term::pair(p.clone(), q));
                        }
                    }
                    Enumeration::new(ws, complete)
                }
            }
            Term::Forall(d, x, f) => {
                if depth == 0 {
                    Enumeration::new(vec![], false)
                } else {
                    self.enumerate_functions(d, x, f, depth, nest)?
                }
            }
            other => return Err(EnumError::NotASet(other.clone())),
        };
        sort_dedup(&mut out.witnesses);
        Ok(out)
    }

    fn enumerate_functions(
        &self,
        d: &Term,
        x: &str,
        f: &Term,
        depth: usize,
        nest: usize,
    ) -> Result<Enumeration, EnumError> {
        let sub = depth - 1;
        let lx = general_name(x);
        let identity = Term::lam(&lx, Term::var(&lx));
        let dom = self.enumerate_at(d, sub, nest + 1)?;
        let dom_empty = dom.is_provably_empty();
        if !f.occurs_free(x) {
            let fam = self.enumerate_at(f, sub, nest + 1)?;
            let mut ws: Vec<Term> = fam
                .witnesses
                .iter()
                .map(|c| Term::lam(&lx, c.clone()))
                .collect();
            let with_identity = dom_empty || d.alpha_eq(f);
            if with_identity && depth >= 2 {
                ws.push(identity);
            }
            let complete = fam.complete && dom.complete && (!with_identity || depth >= 2);
            return Ok(Enumeration::new(ws, complete));
        }
        if dom_empty {
            let ws = if depth >= 2 { vec![identity] } else { vec![] };
            return Ok(Enumeration::new(ws, depth >= 2));
        }
        if !dom.complete {
            return Ok(Enumeration::new(vec![], false));
        }
        // A constant function must land in every instance of the family.
        let mut common: Option<Vec<(Nameless, Term)>> = None;
        for w in &dom.witnesses {
            let inst = self.enumerate_at(&f.substitute(x, w), sub, nest + 1)?;
            let keyed: Vec<(Nameless, Term)> = inst
                .witnesses
                .into_iter()
                .map(|t| (t.nameless(), t))
                .collect();
            common = Some(match common {
                None => keyed,
                Some(prev) => prev
                    .into_iter()
                    .filter(|(k, _)| keyed.iter().any(|(k2, _)| k2 == k))
                    .collect(),
            });
        }
        let ws = common
            .unwrap_or_default()
            .into_iter()
            .map(|(_, c)| Term::lam(&lx, c))
            .collect();
        Ok(Enumeration::new(ws, false))
    }

    /// Decides whether a (canonical) quantifier domain is empty, using the
    /// exact oracle on ground domains and complete enumeration otherwise.
    pub(crate) fn domain(&self, dom: &Term, nest: usize) -> Result<Domain, Verdict> {
        match self.inhabited_at(dom, nest + 1) {
            Ok(Inhabitation::Uninhabited) => {
                let rule = if *dom == Term::False {
                    "VAL(False) = ∅"
                } else {
                    "uninhabited (exact, ground)"
                };
                return Ok(Domain::Empty(Trace::leaf(
                    Judgment::ValEmpty(dom.clone()),
                    rule,
                )));
            }
            Err(InhabitError::Diverged(r)) => return Err(Verdict::Diverged(r)),
            Ok(Inhabitation::Inhabited) | Err(_) => {}
        }
        match self.enumerate_at(dom, self.depth, nest + 1) {
            Ok(e) if e.is_provably_empty() => Ok(Domain::Empty(Trace::leaf(
                Judgment::ValEmpty(dom.clone()),
                "enumeration complete and empty",
            ))),
            Ok(e) => Ok(Domain::Witnesses(e)),
            Err(EnumError::Diverged(r)) => Err(Verdict::Diverged(r)),
            Err(EnumError::NotASet(t)) => {
                Err(Verdict::refuted_leaf(Judgment::IsSet(t), "no VAL clause"))
            }
            Err(EnumError::Check(_)) => unreachable!("domains of closed types are closed"),
        }
    }
}

/// All ground types built from `False` and `True` with `/\`, `\/` and `=>`
/// up to the given former depth, in enumeration order.
pub fn ground_types(max_depth: usize) -> Vec<Term> {
    let mut all: Vec<Term> = Vec::new();
    if max_depth == 0 {
        return all;
    }
    all.push(Term::False);
    all.push(Term::True);
    for _ in 1..max_depth {
        let prev = all.clone();
        for a in &prev {
            for b in &prev {
                all.push(Term::conj(a.clone(), b.clone()));
                all.push(Term::disj(a.clone(), b.clone()));
                all.push(Term::imp(a.clone(), b.clone()));
            }
        }
        sort_dedup(&mut all);
    }
    all
}

/// Former depth of a type: `True` and `False` count 1.
pub fn former_depth(t: &Term) -> usize {
    t.depth()
}
