//! The untyped term language. Witnesses and types share one syntactic
//! category: `True`, `False`, the quantifiers and `\/` are ordinary terms
//! that happen to be canonical type formers.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Variable and binder names.
pub type Name = String;

/// The binder name used by the `=>` and `/\` sugar.
pub const UNUSED_BINDER: &str = "_";

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Term {
    Var(Name),
    Lam(Name, Box<Term>),
    App(Box<Term>, Box<Term>),
    Pair(Box<Term>, Box<Term>),
    Fst(Box<Term>),
    Snd(Box<Term>),
    Inl(Box<Term>),
    Inr(Box<Term>),
    Case {
        scrutinee: Box<Term>,
        left_binder: Name,
        left: Box<Term>,
        right_binder: Name,
        right: Box<Term>,
    },
    It,
    True,
    False,
    Forall(Box<Term>, Name, Box<Term>),
    Exists(Box<Term>, Name, Box<Term>),
    Disj(Box<Term>, Box<Term>),
}

/// Closed terms in canonical form: introduction forms and type formers.
/// Components are left unevaluated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum CanonicalForm {
    It,
    Lam(Name, Box<Term>),
    Pair(Box<Term>, Box<Term>),
    Inl(Box<Term>),
    Inr(Box<Term>),
    True,
    False,
    Forall(Box<Term>, Name, Box<Term>),
    Exists(Box<Term>, Name, Box<Term>),
    Disj(Box<Term>, Box<Term>),
}

impl CanonicalForm {
    pub fn to_term(&self) -> Term {
        self.clone().into_term()
    }

    pub fn into_term(self) -> Term {
        match self {
            CanonicalForm::It => Term::It,
            CanonicalForm::Lam(x, b) => Term::Lam(x, b),
            CanonicalForm::Pair(a, b) => Term::Pair(a, b),
            CanonicalForm::Inl(a) => Term::Inl(a),
            CanonicalForm::Inr(a) => Term::Inr(a),
            CanonicalForm::True => Term::True,
            CanonicalForm::False => Term::False,
            CanonicalForm::Forall(a, x, b) => Term::Forall(a, x, b),
            CanonicalForm::Exists(a, x, b) => Term::Exists(a, x, b),
            CanonicalForm::Disj(a, b) => Term::Disj(a, b),
        }
    }

    /// True for `True`, `False` and the three type formers.
    pub fn is_type_former(&self) -> bool {
        matches!(
            self,
            CanonicalForm::True
                | CanonicalForm::False
                | CanonicalForm::Forall(..)
                | CanonicalForm::Exists(..)
                | CanonicalForm::Disj(..)
        )
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_term().fmt(f)
    }
}

// Convenience constructors, mostly for tests and generated terms.
impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn lam(binder: &str, body: Term) -> Term {
        Term::Lam(binder.to_string(), Box::new(body))
    }

    pub fn app(fun: Term, arg: Term) -> Term {
        Term::App(Box::new(fun), Box::new(arg))
    }

    pub fn pair(fst: Term, snd: Term) -> Term {
        Term::Pair(Box::new(fst), Box::new(snd))
    }

    pub fn fst(t: Term) -> Term {
        Term::Fst(Box::new(t))
    }

    pub fn snd(t: Term) -> Term {
        Term::Snd(Box::new(t))
    }

    pub fn inl(t: Term) -> Term {
        Term::Inl(Box::new(t))
    }

    pub fn inr(t: Term) -> Term {
        Term::Inr(Box::new(t))
    }

    pub fn case(scrutinee: Term, lx: &str, left: Term, rx: &str, right: Term) -> Term {
        Term::Case {
            scrutinee: Box::new(scrutinee),
            left_binder: lx.to_string(),
            left: Box::new(left),
            right_binder: rx.to_string(),
            right: Box::new(right),
        }
    }

    pub fn forall(domain: Term, binder: &str, family: Term) -> Term {
        Term::Forall(Box::new(domain), binder.to_string(), Box::new(family))
    }

    pub fn exists(domain: Term, binder: &str, family: Term) -> Term {
        Term::Exists(Box::new(domain), binder.to_string(), Box::new(family))
    }

    /// `P => Q`, a non-dependent `forall`.
    pub fn imp(p: Term, q: Term) -> Term {
        Term::forall(p, UNUSED_BINDER, q)
    }

    /// `P /\ Q`, a non-dependent `exists`.
    pub fn conj(p: Term, q: Term) -> Term {
        Term::exists(p, UNUSED_BINDER, q)
    }

    pub fn disj(p: Term, q: Term) -> Term {
        Term::Disj(Box::new(p), Box::new(q))
    }
}

impl Term {
    /// Classifies a term as canonical. Variables and eliminators are not.
    pub fn as_canonical(&self) -> Option<CanonicalForm> {
        Some(match self {
            Term::It => CanonicalForm::It,
            Term::Lam(x, b) => CanonicalForm::Lam(x.clone(), b.clone()),
            Term::Pair(a, b) => CanonicalForm::Pair(a.clone(), b.clone()),
            Term::Inl(a) => CanonicalForm::Inl(a.clone()),
            Term::Inr(a) => CanonicalForm::Inr(a.clone()),
            Term::True => CanonicalForm::True,
            Term::False => CanonicalForm::False,
            Term::Forall(a, x, b) => CanonicalForm::Forall(a.clone(), x.clone(), b.clone()),
            Term::Exists(a, x, b) => CanonicalForm::Exists(a.clone(), x.clone(), b.clone()),
            Term::Disj(a, b) => CanonicalForm::Disj(a.clone(), b.clone()),
            Term::Var(_) | Term::App(..) | Term::Fst(_) | Term::Snd(_) | Term::Case { .. } => {
                return None
            }
        })
    }

    pub fn is_canonical(&self) -> bool {
        !matches!(
            self,
            Term::Var(_) | Term::App(..) | Term::Fst(_) | Term::Snd(_) | Term::Case { .. }
        )
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a str>, out: &mut BTreeSet<Name>) {
        match self {
            Term::Var(x) => {
                if !bound.contains(&x.as_str()) {
                    out.insert(x.clone());
                }
            }
            Term::Lam(x, b) => {
                bound.push(x);
                b.collect_free(bound, out);
                bound.pop();
            }
            Term::Forall(a, x, b) | Term::Exists(a, x, b) => {
                a.collect_free(bound, out);
                bound.push(x);
                b.collect_free(bound, out);
                bound.pop();
            }
            Term::Case {
                scrutinee,
                left_binder,
                left,
                right_binder,
                right,
            } => {
                scrutinee.collect_free(bound, out);
                bound.push(left_binder);
                left.collect_free(bound, out);
                bound.pop();
                bound.push(right_binder);
                right.collect_free(bound, out);
                bound.pop();
            }
            Term::App(a, b) | Term::Pair(a, b) | Term::Disj(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Term::Fst(a) | Term::Snd(a) | Term::Inl(a) | Term::Inr(a) => a.collect_free(bound, out),
            Term::It | Term::True | Term::False => {}
        }
    }

    pub fn occurs_free(&self, name: &str) -> bool {
        match self {
            Term::Var(x) => x == name,
            Term::Lam(x, b) => x != name && b.occurs_free(name),
            Term::Forall(a, x, b) | Term::Exists(a, x, b) => {
                a.occurs_free(name) || (x != name && b.occurs_free(name))
            }
            Term::Case {
                scrutinee,
                left_binder,
                left,
                right_binder,
                right,
            } => {
                scrutinee.occurs_free(name)
                    || (left_binder != name && left.occurs_free(name))
                    || (right_binder != name && right.occurs_free(name))
            }
            Term::App(a, b) | Term::Pair(a, b) | Term::Disj(a, b) => {
                a.occurs_free(name) || b.occurs_free(name)
            }
            Term::Fst(a) | Term::Snd(a) | Term::Inl(a) | Term::Inr(a) => a.occurs_free(name),
            Term::It | Term::True | Term::False => false,
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Constructor nesting depth. Atoms have depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) | Term::It | Term::True | Term::False => 1,
            Term::Lam(_, b) | Term::Fst(b) | Term::Snd(b) | Term::Inl(b) | Term::Inr(b) => {
                1 + b.depth()
            }
            Term::App(a, b)
            | Term::Pair(a, b)
            | Term::Disj(a, b)
            | Term::Forall(a, _, b)
            | Term::Exists(a, _, b) => 1 + a.depth().max(b.depth()),
            Term::Case {
                scrutinee,
                left,
                right,
                ..
            } => 1 + scrutinee.depth().max(left.depth()).max(right.depth()),
        }
    }

    /// `[value/binder]self`, renaming bound variables of `self` that would
    /// capture free variables of `value`.
    pub fn substitute(&self, binder: &str, value: &Term) -> Term {
        if binder == UNUSED_BINDER {
            return self.clone();
        }
        let value_fv = value.free_vars();
        self.subst(binder, value, &value_fv)
    }

    fn subst(&self, x: &str, v: &Term, vfv: &BTreeSet<Name>) -> Term {
        match self {
            Term::Var(y) => {
                if y == x {
                    v.clone()
                } else {
                    self.clone()
                }
            }
            Term::Lam(y, b) => {
                let (y, b) = subst_under(y, b, x, v, vfv);
                Term::Lam(y, Box::new(b))
            }
            Term::Forall(a, y, b) => {
                let a = a.subst(x, v, vfv);
                let (y, b) = subst_under(y, b, x, v, vfv);
                Term::Forall(Box::new(a), y, Box::new(b))
            }
            Term::Exists(a, y, b) => {
                let a = a.subst(x, v, vfv);
                let (y, b) = subst_under(y, b, x, v, vfv);
                Term::Exists(Box::new(a), y, Box::new(b))
            }
            Term::Case {
                scrutinee,
                left_binder,
                left,
                right_binder,
                right,
            } => {
                let scrutinee = scrutinee.subst(x, v, vfv);
                let (left_binder, left) = subst_under(left_binder, left, x, v, vfv);
                let (right_binder, right) = subst_under(right_binder, right, x, v, vfv);
                Term::Case {
                    scrutinee: Box::new(scrutinee),
                    left_binder,
                    left: Box::new(left),
                    right_binder,
                    right: Box::new(right),
                }
            }
            Term::App(a, b) => Term::app(a.subst(x, v, vfv), b.subst(x, v, vfv)),
            Term::Pair(a, b) => Term::pair(a.subst(x, v, vfv), b.subst(x, v, vfv)),
            Term::Disj(a, b) => Term::disj(a.subst(x, v, vfv), b.subst(x, v, vfv)),
            Term::Fst(a) => Term::fst(a.subst(x, v, vfv)),
            Term::Snd(a) => Term::snd(a.subst(x, v, vfv)),
            Term::Inl(a) => Term::inl(a.subst(x, v, vfv)),
            Term::Inr(a) => Term::inr(a.subst(x, v, vfv)),
            Term::It | Term::True | Term::False => self.clone(),
        }
    }

    /// Identity up to consistent renaming of bound variables.
    pub fn alpha_eq(&self, other: &Term) -> bool {
        alpha(self, other, &mut Vec::new())
    }

    /// A representation with binders replaced by de Bruijn indices. Two terms
    /// are alpha-equivalent iff their nameless forms are equal.
    pub fn nameless(&self) -> Nameless {
        to_nameless(self, &mut Vec::new())
    }

    /// The total order used for every enumeration in the crate: shallower
    /// terms first, then the derived order on nameless forms.
    pub fn canonical_cmp(&self, other: &Term) -> Ordering {
        self.depth()
            .cmp(&other.depth())
            .then_with(|| self.nameless().cmp(&other.nameless()))
    }
}

fn subst_under(y: &Name, body: &Term, x: &str, v: &Term, vfv: &BTreeSet<Name>) -> (Name, Term) {
    if y == x || !body.occurs_free(x) {
        return (y.clone(), body.clone());
    }
    if vfv.contains(y) {
        let mut avoid = body.free_vars();
        avoid.extend(vfv.iter().cloned());
        avoid.insert(x.to_string());
        let fresh = fresh_name(y, &avoid);
        let renamed = body.substitute(y, &Term::Var(fresh.clone()));
        let out = renamed.subst(x, v, vfv);
        (fresh, out)
    } else {
        (y.clone(), body.subst(x, v, vfv))
    }
}

/// Picks `base`, `base'`, `base''`, ... avoiding every name in `avoid`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<Name>) -> Name {
    let base = if base == UNUSED_BINDER { "x" } else { base };
    let mut candidate = base.to_string();
    while avoid.contains(&candidate) {
        candidate.push('\'');
    }
    candidate
}

fn alpha<'a>(a: &'a Term, b: &'a Term, env: &mut Vec<(&'a str, &'a str)>) -> bool {
    match (a, b) {
        (Term::Var(x), Term::Var(y)) => {
            for (l, r) in env.iter().rev() {
                if *l == x || *r == y {
                    return *l == x && *r == y;
                }
            }
            x == y
        }
        (Term::Lam(x, ba), Term::Lam(y, bb)) => under(x, ba, y, bb, env),
        (Term::Forall(a1, x, b1), Term::Forall(a2, y, b2))
        | (Term::Exists(a1, x, b1), Term::Exists(a2, y, b2)) => {
            alpha(a1, a2, env) && under(x, b1, y, b2, env)
        }
        (
            Term::Case {
                scrutinee: s1,
                left_binder: lx1,
                left: l1,
                right_binder: rx1,
                right: r1,
            },
            Term::Case {
                scrutinee: s2,
                left_binder: lx2,
                left: l2,
                right_binder: rx2,
                right: r2,
            },
        ) => alpha(s1, s2, env) && under(lx1, l1, lx2, l2, env) && under(rx1, r1, rx2, r2, env),
        (Term::App(a1, b1), Term::App(a2, b2))
        | (Term::Pair(a1, b1), Term::Pair(a2, b2))
        | (Term::Disj(a1, b1), Term::Disj(a2, b2)) => alpha(a1, a2, env) && alpha(b1, b2, env),
        (Term::Fst(x), Term::Fst(y))
        | (Term::Snd(x), Term::Snd(y))
        | (Term::Inl(x), Term::Inl(y))
        | (Term::Inr(x), Term::Inr(y)) => alpha(x, y, env),
        (Term::It, Term::It) | (Term::True, Term::True) | (Term::False, Term::False) => true,
        _ => false,
    }
}

fn under<'a>(
    x: &'a str,
    a: &'a Term,
    y: &'a str,
    b: &'a Term,
    env: &mut Vec<(&'a str, &'a str)>,
) -> bool {
    env.push((x, y));
    let r = alpha(a, b, env);
    env.pop();
    r
}

/// Locally nameless shape of a term. The variant order fixes the enumeration
/// order: `False` sorts before `True`, which sorts before the witnesses.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Nameless {
    False,
    True,
    It,
    Bound(usize),
    Free(Name),
    Inl(Box<Nameless>),
    Inr(Box<Nameless>),
    Pair(Box<Nameless>, Box<Nameless>),
    Lam(Box<Nameless>),
    Fst(Box<Nameless>),
    Snd(Box<Nameless>),
    App(Box<Nameless>, Box<Nameless>),
    Case(Box<Nameless>, Box<Nameless>, Box<Nameless>),
    Exists(Box<Nameless>, Box<Nameless>),
    Disj(Box<Nameless>, Box<Nameless>),
    Forall(Box<Nameless>, Box<Nameless>),
}

fn to_nameless<'a>(t: &'a Term, env: &mut Vec<&'a str>) -> Nameless {
    let bind = |x: &'a str, b: &'a Term, env: &mut Vec<&'a str>| {
        env.push(x);
        let r = to_nameless(b, env);
        env.pop();
        Box::new(r)
    };
    match t {
        Term::Var(x) => match env.iter().rev().position(|y| y == x) {
            Some(i) => Nameless::Bound(i),
            None => Nameless::Free(x.clone()),
        },
        Term::Lam(x, b) => Nameless::Lam(bind(x, b, env)),
        Term::Forall(a, x, b) => {
            let a = Box::new(to_nameless(a, env));
            Nameless::Forall(a, bind(x, b, env))
        }
        Term::Exists(a, x, b) => {
            let a = Box::new(to_nameless(a, env));
            Nameless::Exists(a, bind(x, b, env))
        }
        Term::Case {
            scrutinee,
            left_binder,
            left,
            right_binder,
            right,
        } => {
            let s = Box::new(to_nameless(scrutinee, env));
            let l = bind(left_binder, left, env);
            let r = bind(right_binder, right, env);
            Nameless::Case(s, l, r)
        }
        Term::App(a, b) => {
            Nameless::App(Box::new(to_nameless(a, env)), Box::new(to_nameless(b, env)))
        }
        Term::Pair(a, b) => {
            Nameless::Pair(Box::new(to_nameless(a, env)), Box::new(to_nameless(b, env)))
        }
        Term::Disj(a, b) => {
            Nameless::Disj(Box::new(to_nameless(a, env)), Box::new(to_nameless(b, env)))
        }
        Term::Fst(a) => Nameless::Fst(Box::new(to_nameless(a, env))),
        Term::Snd(a) => Nameless::Snd(Box::new(to_nameless(a, env))),
        Term::Inl(a) => Nameless::Inl(Box::new(to_nameless(a, env))),
        Term::Inr(a) => Nameless::Inr(Box::new(to_nameless(a, env))),
        Term::It => Nameless::It,
        Term::True => Nameless::True,
        Term::False => Nameless::False,
    }
}

/// Sorts by [`Term::canonical_cmp`] and drops alpha-equivalent duplicates.
pub fn sort_dedup(terms: &mut Vec<Term>) {
    let mut keyed: Vec<(usize, Nameless, Term)> = terms
        .drain(..)
        .map(|t| (t.depth(), t.nameless(), t))
        .collect();
    keyed.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    keyed.dedup_by(|a, b| a.1 == b.1);
    terms.extend(keyed.into_iter().map(|(_, _, t)| t));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn substitute_unused_binder() {
        let body = Term::pair(Term::It, Term::It);
        assert_eq!(body.substitute("x", &Term::It), body);
    }

    #[test]
    fn substitute_direct() {
        assert_eq!(
            Term::var("x").substitute("x", &Term::inl(Term::It)),
            Term::inl(Term::It)
        );
    }

    #[test]
    fn substitute_respects_shadowing() {
        let id = Term::lam("x", Term::var("x"));
        assert_eq!(id.substitute("x", &Term::It), id);
    }

    #[test]
    fn substitute_avoids_capture_of_open_values() {
        // [y/x](lam y. x) must not become lam y. y
        let t = Term::lam("y", Term::var("x"));
        let out = t.substitute("x", &Term::var("y"));
        assert!(!out.alpha_eq(&Term::lam("y", Term::var("y"))));
        assert_eq!(out.free_vars(), ["y".to_string()].into_iter().collect());
        assert!(out.alpha_eq(&Term::lam("z", Term::var("y"))));
    }

    #[test]
    fn alpha_examples() {
        assert!(Term::lam("x", Term::var("x")).alpha_eq(&Term::lam("y", Term::var("y"))));
        assert!(!Term::inl(Term::It).alpha_eq(&Term::inr(Term::It)));
        assert!(
            Term::forall(Term::True, "x", Term::var("x")).alpha_eq(&Term::forall(
                Term::True,
                "z",
                Term::var("z")
            ))
        );
        // lam x. lam y. x  vs  lam x. lam y. y
        assert!(!Term::lam("x", Term::lam("y", Term::var("x")))
            .alpha_eq(&Term::lam("x", Term::lam("y", Term::var("y")))));
        // free names must match exactly
        assert!(!Term::var("a").alpha_eq(&Term::var("b")));
        // a bound name on one side cannot match a free one on the other
        assert!(!Term::lam("x", Term::var("y")).alpha_eq(&Term::lam("y", Term::var("y"))));
    }

    #[test]
    fn canonical_classification() {
        assert!(Term::It.is_canonical());
        assert!(Term::imp(Term::False, Term::True).is_canonical());
        assert!(!Term::fst(Term::pair(Term::It, Term::It)).is_canonical());
        assert!(!Term::var("x").is_canonical());
        assert!(Term::True.as_canonical().unwrap().is_type_former());
        assert!(!Term::It.as_canonical().unwrap().is_type_former());
    }

    #[test]
    fn order_puts_false_first() {
        let mut v = vec![Term::inl(Term::It), Term::True, Term::It, Term::False];
        sort_dedup(&mut v);
        assert_eq!(
            v,
            vec![Term::False, Term::True, Term::It, Term::inl(Term::It)]
        );
    }

    #[test]
    fn sort_dedup_merges_alpha_variants() {
        let mut v = vec![
            Term::lam("x", Term::var("x")),
            Term::lam("y", Term::var("y")),
        ];
        sort_dedup(&mut v);
        assert_eq!(v.len(), 1);
    }
}
