//! Finite Kripke models of expanding knowledge. A world records which
//! verification tokens are known for each atomic judgment; moving up the
//! order can only add tokens.
//!
//! Rule validity at a world looks only at that world, so it can fail to
//! persist. A hypothetical judgment quantifies over all future worlds and
//! is monotone by construction.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::par::Exec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KripkeError {
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("world `{0}` declared twice")]
    DuplicateWorld(String),
    #[error("order is not antisymmetric: `{0}` and `{1}` are distinct but mutually below")]
    NotAntisymmetric(String, String),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

/// A finite poset of worlds with monotone verification sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorldModel {
    worlds: Vec<String>,
    atoms: Vec<String>,
    /// `le[u][v]` iff u ⪯ v, reflexive and transitive.
    le: Vec<Vec<bool>>,
    /// Indexed by world then atom.
    tokens: Vec<Vec<BTreeSet<String>>>,
}

impl WorldModel {
    /// Builds a model from generating order pairs `(u, v)` meaning u ⪯ v and
    /// verification triples `(world, atom, token)`. The order is closed
    /// reflexively and transitively, and every token is propagated to all
    /// worlds above the one where it was recorded.
    pub fn new<S: AsRef<str>>(
        worlds: &[S],
        order: &[(S, S)],
        atoms: &[S],
        verifications: &[(S, S, S)],
    ) -> Result<Self, KripkeError> {
        let worlds: Vec<String> = worlds.iter().map(|w| w.as_ref().to_string()).collect();
        for (i, w) in worlds.iter().enumerate() {
            if worlds[..i].contains(w) {
                return Err(KripkeError::DuplicateWorld(w.clone()));
            }
        }
        let mut atom_list: Vec<String> = Vec::new();
        for a in atoms {
            if !atom_list.iter().any(|x| x == a.as_ref()) {
                atom_list.push(a.as_ref().to_string());
            }
        }
        let n = worlds.len();
        let index = |w: &str| {
            worlds
                .iter()
                .position(|x| x == w)
                .ok_or_else(|| KripkeError::UnknownWorld(w.to_string()))
        };
        let mut le = vec![vec![false; n]; n];
        for (i, row) in le.iter_mut().enumerate() {
            row[i] = true;
        }
        for (u, v) in order {
            le[index(u.as_ref())?][index(v.as_ref())?] = true;
        }
        for k in 0..n {
            let through = le[k].clone();
            for row in le.iter_mut().filter(|row| row[k]) {
                for (cell, &reach) in row.iter_mut().zip(&through) {
                    *cell |= reach;
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if le[i][j] && le[j][i] {
                    return Err(KripkeError::NotAntisymmetric(
                        worlds[i].clone(),
                        worlds[j].clone(),
                    ));
                }
            }
        }
        let mut tokens = vec![vec![BTreeSet::new(); atom_list.len()]; n];
        for (w, a, t) in verifications {
            let wi = index(w.as_ref())?;
            let ai = atom_list
                .iter()
                .position(|x| x == a.as_ref())
                .ok_or_else(|| KripkeError::UnknownAtom(a.as_ref().to_string()))?;
            for v in 0..n {
                if le[wi][v] {
                    tokens[v][ai].insert(t.as_ref().to_string());
                }
            }
        }
        Ok(WorldModel {
            worlds,
            atoms: atom_list,
            le,
            tokens,
        })
    }

    pub fn worlds(&self) -> &[String] {
        &self.worlds
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn le(&self, u: &str, v: &str) -> Result<bool, KripkeError> {
        Ok(self.le[self.world(u)?][self.world(v)?])
    }

    pub fn tokens(&self, w: &str, atom: &str) -> Result<&BTreeSet<String>, KripkeError> {
        Ok(&self.tokens[self.world(w)?][self.atom(atom)?])
    }

    /// A copy of the model with one more token, propagated upward.
    pub fn with_token(&self, w: &str, atom: &str, token: &str) -> Result<Self, KripkeError> {
        let (wi, ai) = (self.world(w)?, self.atom(atom)?);
        let mut m = self.clone();
        for v in 0..m.worlds.len() {
            if m.le[wi][v] {
                m.tokens[v][ai].insert(token.to_string());
            }
        }
        Ok(m)
    }

    fn world(&self, w: &str) -> Result<usize, KripkeError> {
        self.worlds
            .iter()
            .position(|x| x == w)
            .ok_or_else(|| KripkeError::UnknownWorld(w.to_string()))
    }

    fn atom(&self, a: &str) -> Result<usize, KripkeError> {
        self.atoms
            .iter()
            .position(|x| x == a)
            .ok_or_else(|| KripkeError::UnknownAtom(a.to_string()))
    }

    /// `w ⊩ j`
    pub fn forces(&self, w: &str, j: &WJudgment) -> Result<bool, KripkeError> {
        let wi = self.world(w)?;
        self.resolve(j)?;
        Ok(self.forces_at(wi, j))
    }

    fn resolve(&self, j: &WJudgment) -> Result<(), KripkeError> {
        match j {
            WJudgment::Atom(a) => self.atom(a).map(|_| ()),
            WJudgment::RuleValid(p, q) | WJudgment::HypForced(p, q) => {
                self.resolve(p)?;
                self.resolve(q)
            }
        }
    }

    fn forces_at(&self, w: usize, j: &WJudgment) -> bool {
        match j {
            WJudgment::Atom(a) => {
                let ai = self.atoms.iter().position(|x| x == a).expect("resolved");
                !self.tokens[w][ai].is_empty()
            }
            // a total map between finite sets exists iff the source is
            // empty or the target is not
            WJudgment::RuleValid(p, q) => !self.forces_at(w, p) || self.forces_at(w, q),
            WJudgment::HypForced(p, q) => (0..self.worlds.len())
                .filter(|&v| self.le[w][v])
                .all(|v| !self.forces_at(v, p) || self.forces_at(v, q)),
        }
    }

    /// Searches all pairs u ⪯ v for `u ⊩ j` but not `v ⊩ j`. The first
    /// failing pair in declaration order is reported.
    pub fn check_monotone(&self, j: &WJudgment, exec: Exec) -> Result<Monotonicity, KripkeError> {
        self.resolve(j)?;
        let n = self.worlds.len();
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (0..n).map(move |v| (u, v)))
            .filter(|&(u, v)| u != v && self.le[u][v])
            .collect();
        let broken = exec.map(&pairs, |&(u, v)| {
            self.forces_at(u, j) && !self.forces_at(v, j)
        });
        Ok(pairs
            .iter()
            .zip(broken)
            .find(|(_, b)| *b)
            .map_or(Monotonicity::Pass, |(&(u, v), _)| {
                Monotonicity::Counterexample {
                    lower: self.worlds[u].clone(),
                    upper: self.worlds[v].clone(),
                }
            }))
    }
}

impl FromStr for WorldModel {
    type Err = KripkeError;

    /// Lines `worlds u v ...`, `order u v` (u below v), `atoms A B ...` and
    /// `verify <world> <atom> <token>`; `#` starts a comment.
    fn from_str(text: &str) -> Result<Self, KripkeError> {
        let (mut worlds, mut order, mut atoms, mut verify) = (vec![], vec![], vec![], vec![]);
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("");
            let words: Vec<&str> = line.split_whitespace().collect();
            let err = |message: &str| KripkeError::Syntax {
                line: i + 1,
                message: message.to_string(),
            };
            match words.as_slice() {
                [] => {}
                ["worlds", ws @ ..] => worlds.extend(ws.iter().map(|w| w.to_string())),
                ["atoms", as_ @ ..] => atoms.extend(as_.iter().map(|a| a.to_string())),
                ["order", u, v] => order.push((u.to_string(), v.to_string())),
                ["order", ..] => return Err(err("expected `order <world> <world>`")),
                ["verify", w, a, t] => verify.push((w.to_string(), a.to_string(), t.to_string())),
                ["verify", ..] => return Err(err("expected `verify <world> <atom> <token>`")),
                [other, ..] => return Err(err(&format!("unknown directive `{other}`"))),
            }
        }
        WorldModel::new(&worlds, &order, &atoms, &verify)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Monotonicity {
    Pass,
    Counterexample { lower: String, upper: String },
}

/// Judgments interpreted at a world.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WJudgment {
    Atom(String),
    /// The rule `J1 / J2` is valid at this world.
    RuleValid(Box<WJudgment>, Box<WJudgment>),
    /// `J2` given `J1`, at this and every future world.
    HypForced(Box<WJudgment>, Box<WJudgment>),
}

impl WJudgment {
    pub fn atom(a: &str) -> Self {
        WJudgment::Atom(a.to_string())
    }

    pub fn rule(p: WJudgment, q: WJudgment) -> Self {
        WJudgment::RuleValid(Box::new(p), Box::new(q))
    }

    pub fn hyp(p: WJudgment, q: WJudgment) -> Self {
        WJudgment::HypForced(Box::new(p), Box::new(q))
    }

    /// Atoms in order of first appearance.
    pub fn atoms(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            WJudgment::Atom(a) => {
                if !out.contains(&a.as_str()) {
                    out.push(a)
                }
            }
            WJudgment::RuleValid(p, q) | WJudgment::HypForced(p, q) => {
                p.collect_atoms(out);
                q.collect_atoms(out);
            }
        }
    }
}

impl fmt::Display for WJudgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub = |f: &mut fmt::Formatter<'_>, j: &WJudgment| match j {
            WJudgment::Atom(a) => write!(f, "{a}"),
            _ => write!(f, "({j})"),
        };
        match self {
            WJudgment::Atom(a) => write!(f, "{a}"),
            WJudgment::RuleValid(p, q) | WJudgment::HypForced(p, q) => {
                let kw = if matches!(self, WJudgment::RuleValid(..)) {
                    "rule"
                } else {
                    "hyp"
                };
                write!(f, "{kw} ")?;
                sub(f, p)?;
                write!(f, " ")?;
                sub(f, q)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("judgment syntax: {0}")]
pub struct WJudgmentParseError(String);

impl FromStr for WJudgment {
    type Err = WJudgmentParseError;

    /// `A`, `rule J J`, `hyp J J`, with parentheses for grouping.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let spaced = s.replace('(', " ( ").replace(')', " ) ");
        let toks: Vec<&str> = spaced.split_whitespace().collect();
        let mut pos = 0;
        let j = parse_wj(&toks, &mut pos)?;
        if pos != toks.len() {
            return Err(WJudgmentParseError(format!("unexpected `{}`", toks[pos])));
        }
        Ok(j)
    }
}

fn parse_wj(toks: &[&str], pos: &mut usize) -> Result<WJudgment, WJudgmentParseError> {
    let tok = *toks
        .get(*pos)
        .ok_or_else(|| WJudgmentParseError("unexpected end of input".into()))?;
    *pos += 1;
    match tok {
        "(" => {
            let j = parse_wj(toks, pos)?;
            if toks.get(*pos) != Some(&")") {
                return Err(WJudgmentParseError("expected `)`".into()));
            }
            *pos += 1;
            Ok(j)
        }
        "rule" | "hyp" => {
            let p = parse_wj(toks, pos)?;
            let q = parse_wj(toks, pos)?;
            Ok(if tok == "rule" {
                WJudgment::rule(p, q)
            } else {
                WJudgment::hyp(p, q)
            })
        }
        ")" => Err(WJudgmentParseError("unexpected `)`".into())),
        a if a.chars().all(|c| c.is_alphanumeric() || c == '_') => Ok(WJudgment::atom(a)),
        other => Err(WJudgmentParseError(format!("bad atom `{other}`"))),
    }
}
