//! Weak big-step evaluation to canonical form under a step budget.
//!
//! Evaluation never looks inside `lam` bodies, pair components, injection
//! arguments or type-former fields. A step is one beta reduction, one
//! projection or one case dispatch.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::term::{CanonicalForm, Name, Term};

/// Reduction strategy. Call-by-name is the default everywhere; call-by-value
/// only changes when an application's argument is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Strategy {
    #[default]
    CallByName,
    CallByValue,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum EvalResult {
    Canonical(CanonicalForm, usize),
    /// The budget ran out; carries the redex that was about to fire.
    FuelExhausted(Term),
    /// An eliminator met a canonical form of the wrong shape, or a free
    /// variable reached head position.
    Stuck(Term),
}

impl EvalResult {
    pub fn canonical(&self) -> Option<&CanonicalForm> {
        match self {
            EvalResult::Canonical(c, _) => Some(c),
            _ => None,
        }
    }
}

impl fmt::Display for EvalResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalResult::Canonical(c, steps) => write!(f, "canonical {c} ({steps} steps)"),
            EvalResult::FuelExhausted(redex) => write!(f, "fuel exhausted at {redex}"),
            EvalResult::Stuck(t) => write!(f, "stuck at {t}"),
        }
    }
}

enum Frame {
    Apply(Term),
    /// Call-by-value: the function has been evaluated, the argument is next.
    Bind(Name, Term),
    Fst,
    Snd,
    Case {
        left_binder: Name,
        left: Term,
        right_binder: Name,
        right: Term,
    },
}

impl Frame {
    /// Rebuilds the eliminator around `hole`, for error reports.
    fn plug(self, hole: Term) -> Term {
        match self {
            Frame::Apply(arg) => Term::app(hole, arg),
            Frame::Bind(x, body) => Term::app(Term::Lam(x, Box::new(body)), hole),
            Frame::Fst => Term::fst(hole),
            Frame::Snd => Term::snd(hole),
            Frame::Case {
                left_binder,
                left,
                right_binder,
                right,
            } => Term::Case {
                scrutinee: Box::new(hole),
                left_binder,
                left: Box::new(left),
                right_binder,
                right: Box::new(right),
            },
        }
    }
}

fn rebuild(mut stack: Vec<Frame>, mut t: Term) -> Term {
    while let Some(frame) = stack.pop() {
        t = frame.plug(t);
    }
    t
}

/// Call-by-name evaluation.
pub fn eval(term: &Term, fuel: usize) -> EvalResult {
    eval_with(term, fuel, Strategy::CallByName)
}

pub fn eval_with(term: &Term, fuel: usize, strategy: Strategy) -> EvalResult {
    let mut stack: Vec<Frame> = Vec::new();
    let mut cur = term.clone();
    let mut steps = 0usize;
    loop {
        // Descend to the head.
        cur = match cur {
            Term::App(f, a) => {
                stack.push(Frame::Apply(*a));
                *f
            }
            Term::Fst(p) => {
                stack.push(Frame::Fst);
                *p
            }
            Term::Snd(p) => {
                stack.push(Frame::Snd);
                *p
            }
            Term::Case {
                scrutinee,
                left_binder,
                left,
                right_binder,
                right,
            } => {
                stack.push(Frame::Case {
                    left_binder,
                    left: *left,
                    right_binder,
                    right: *right,
                });
                *scrutinee
            }
            Term::Var(_) => return EvalResult::Stuck(rebuild(stack, cur)),
            value => {
                let Some(frame) = stack.pop() else {
                    let c = value.as_canonical().expect("head is canonical");
                    return EvalResult::Canonical(c, steps);
                };
                // Call-by-value defers the step until the argument is a value.
                if let (Frame::Apply(arg), Strategy::CallByValue, Term::Lam(x, body)) =
                    (&frame, strategy, &value)
                {
                    stack.push(Frame::Bind(x.clone(), (**body).clone()));
                    cur = arg.clone();
                    continue;
                }
                if steps >= fuel {
                    return EvalResult::FuelExhausted(frame.plug(value));
                }
                match reduce(frame, value) {
                    Ok(next) => {
                        steps += 1;
                        next
                    }
                    Err(redex) => return EvalResult::Stuck(rebuild(stack, redex)),
                }
            }
        };
    }
}

/// Fires one redex whose head is the canonical `value`.
fn reduce(frame: Frame, value: Term) -> Result<Term, Term> {
    match (frame, value) {
        (Frame::Apply(arg), Term::Lam(x, body)) => Ok(body.substitute(&x, &arg)),
        (Frame::Bind(x, body), arg) => Ok(body.substitute(&x, &arg)),
        (Frame::Fst, Term::Pair(a, _)) => Ok(*a),
        (Frame::Snd, Term::Pair(_, b)) => Ok(*b),
        (
            Frame::Case {
                left_binder, left, ..
            },
            Term::Inl(v),
        ) => Ok(left.substitute(&left_binder, &v)),
        (
            Frame::Case {
                right_binder,
                right,
                ..
            },
            Term::Inr(v),
        ) => Ok(right.substitute(&right_binder, &v)),
        (frame, value) => Err(frame.plug(value)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn omega() -> Term {
        let w = Term::lam("x", Term::app(Term::var("x"), Term::var("x")));
        Term::app(w.clone(), w)
    }

    #[test]
    fn canonical_is_a_value() {
        let t = Term::lam("x", Term::pair(Term::It, Term::It));
        assert_eq!(
            eval(&t, 100),
            EvalResult::Canonical(
                CanonicalForm::Lam("x".into(), Box::new(Term::pair(Term::It, Term::It))),
                0
            )
        );
    }

    #[test]
    fn single_beta() {
        let t = Term::app(Term::lam("x", Term::var("x")), Term::It);
        assert_eq!(eval(&t, 100), EvalResult::Canonical(CanonicalForm::It, 1));
    }

    #[test]
    fn case_dispatch() {
        // case inl it of inl x -> x | inr y -> <y, y>: one dispatch step to `it`
        let t = Term::case(
            Term::inl(Term::It),
            "x",
            Term::var("x"),
            "y",
            Term::pair(Term::var("y"), Term::var("y")),
        );
        assert_eq!(eval(&t, 100), EvalResult::Canonical(CanonicalForm::It, 1));
    }

    #[test]
    fn self_application_runs_out_of_fuel() {
        assert!(matches!(eval(&omega(), 1000), EvalResult::FuelExhausted(_)));
    }

    #[test]
    fn stuck_projection() {
        let t = Term::fst(Term::inl(Term::It));
        assert_eq!(eval(&t, 10), EvalResult::Stuck(t));
        let t = Term::app(Term::It, Term::It);
        assert_eq!(eval(&t, 10), EvalResult::Stuck(t));
    }

    #[test]
    fn stuck_inside_context_reports_whole_term() {
        let t = Term::app(Term::fst(Term::It), Term::It);
        assert_eq!(eval(&t, 10), EvalResult::Stuck(t));
    }

    #[test]
    fn no_reduction_under_constructors() {
        let redex = Term::app(Term::lam("x", Term::var("x")), Term::It);
        for t in [
            Term::pair(redex.clone(), Term::It),
            Term::inl(redex.clone()),
            Term::lam("y", redex.clone()),
            Term::imp(redex.clone(), redex.clone()),
        ] {
            assert_eq!(
                eval(&t, 10),
                EvalResult::Canonical(t.as_canonical().unwrap(), 0)
            );
        }
    }

    #[test]
    fn call_by_value_evaluates_arguments() {
        // (lam x. it) ((lam y. y) it): CBN takes 1 step, CBV takes 2
        let t = Term::app(
            Term::lam("x", Term::It),
            Term::app(Term::lam("y", Term::var("y")), Term::It),
        );
        assert_eq!(eval(&t, 10), EvalResult::Canonical(CanonicalForm::It, 1));
        assert_eq!(
            eval_with(&t, 10, Strategy::CallByValue),
            EvalResult::Canonical(CanonicalForm::It, 2)
        );
        // an unused divergent argument only hurts call-by-value
        let t = Term::app(Term::lam("x", Term::It), omega());
        assert!(eval(&t, 50).canonical().is_some());
        assert!(matches!(
            eval_with(&t, 50, Strategy::CallByValue),
            EvalResult::FuelExhausted(_)
        ));
    }

    #[test]
    fn fuel_is_exact() {
        let t = Term::app(Term::lam("x", Term::var("x")), Term::It);
        assert!(matches!(eval(&t, 0), EvalResult::FuelExhausted(_)));
        assert_eq!(eval(&t, 1), EvalResult::Canonical(CanonicalForm::It, 1));
    }
}
