//! Concrete ASCII syntax.
//!
//! ```text
//! expr  ::= lam x. expr | forall x : expr . expr | exists x : expr . expr
//!         | case expr of inl x -> expr | inr y -> expr
//!         | disj [=> expr]
//! disj  ::= conj [\/ disj]
//! conj  ::= app [/\ conj]
//! app   ::= unary unary*
//! unary ::= (fst | snd | inl | inr) unary | atom
//! atom  ::= x | it | True | False | <expr, expr> | (expr)
//! ```
//!
//! `=>`, `\/` and `/\` associate to the right. `A => B` is a `forall` whose
//! binder is unused and `A /\ B` an `exists` likewise.

use std::fmt;

use thiserror::Error;

use crate::term::{Term, UNUSED_BINDER};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Lam,
    It,
    True,
    False,
    Fst,
    Snd,
    Inl,
    Inr,
    Case,
    Of,
    Forall,
    Exists,
    Dot,
    Comma,
    Colon,
    LAngle,
    RAngle,
    LParen,
    RParen,
    Imp,
    And,
    Or,
    Arrow,
    Bar,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(x) => return write!(f, "identifier `{x}`"),
            Tok::Lam => "`lam`",
            Tok::It => "`it`",
            Tok::True => "`True`",
            Tok::False => "`False`",
            Tok::Fst => "`fst`",
            Tok::Snd => "`snd`",
            Tok::Inl => "`inl`",
            Tok::Inr => "`inr`",
            Tok::Case => "`case`",
            Tok::Of => "`of`",
            Tok::Forall => "`forall`",
            Tok::Exists => "`exists`",
            Tok::Dot => "`.`",
            Tok::Comma => "`,`",
            Tok::Colon => "`:`",
            Tok::LAngle => "`<`",
            Tok::RAngle => "`>`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::Imp => "`=>`",
            Tok::And => "`/\\`",
            Tok::Or => "`\\/`",
            Tok::Arrow => "`->`",
            Tok::Bar => "`|`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut column) = (0, 1, 1);
    let err = |line, column, message: String| ParseError {
        line,
        column,
        message,
    };
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            column += 1;
            continue;
        }
        let (start_line, start_col) = (line, column);
        let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
        let sym2 = match two.as_str() {
            "=>" => Some(Tok::Imp),
            "/\\" => Some(Tok::And),
            "\\/" => Some(Tok::Or),
            "->" => Some(Tok::Arrow),
            _ => None,
        };
        if let Some(tok) = sym2 {
            out.push(Spanned {
                tok,
                line: start_line,
                column: start_col,
            });
            i += 2;
            column += 2;
            continue;
        }
        let sym1 = match c {
            '.' => Some(Tok::Dot),
            ',' => Some(Tok::Comma),
            ':' => Some(Tok::Colon),
            '<' => Some(Tok::LAngle),
            '>' => Some(Tok::RAngle),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '|' => Some(Tok::Bar),
            _ => None,
        };
        if let Some(tok) = sym1 {
            out.push(Spanned {
                tok,
                line: start_line,
                column: start_col,
            });
            i += 1;
            column += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut word = String::new();
            while i < chars.len()
                && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'')
            {
                word.push(chars[i]);
                i += 1;
                column += 1;
            }
            let tok = match word.as_str() {
                "lam" => Tok::Lam,
                "it" => Tok::It,
                "True" => Tok::True,
                "False" => Tok::False,
                "fst" => Tok::Fst,
                "snd" => Tok::Snd,
                "inl" => Tok::Inl,
                "inr" => Tok::Inr,
                "case" => Tok::Case,
                "of" => Tok::Of,
                "forall" => Tok::Forall,
                "exists" => Tok::Exists,
                _ => Tok::Ident(word),
            };
            out.push(Spanned {
                tok,
                line: start_line,
                column: start_col,
            });
            continue;
        }
        return Err(err(
            start_line,
            start_col,
            format!("unexpected character `{c}`"),
        ));
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: String) -> ParseError {
        let s = &self.toks[self.pos];
        ParseError {
            line: s.line,
            column: s.column,
            message,
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected {tok}, found {}", self.peek())))
        }
    }

    fn binder(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(x) => {
                self.bump();
                Ok(x)
            }
            other => Err(self.error(format!("expected a binder name, found {other}"))),
        }
    }

    fn expr(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Tok::Lam => {
                self.bump();
                let x = self.binder()?;
                self.expect(Tok::Dot)?;
                let body = self.expr()?;
                Ok(Term::Lam(x, Box::new(body)))
            }
            Tok::Forall | Tok::Exists => {
                let universal = self.bump() == Tok::Forall;
                let x = self.binder()?;
                self.expect(Tok::Colon)?;
                let domain = self.expr()?;
                self.expect(Tok::Dot)?;
                let family = self.expr()?;
                Ok(if universal {
                    Term::Forall(Box::new(domain), x, Box::new(family))
                } else {
                    Term::Exists(Box::new(domain), x, Box::new(family))
                })
            }
            Tok::Case => {
                self.bump();
                let scrutinee = self.expr()?;
                self.expect(Tok::Of)?;
                self.expect(Tok::Inl)?;
                let lx = self.binder()?;
                self.expect(Tok::Arrow)?;
                let left = self.expr()?;
                self.expect(Tok::Bar)?;
                self.expect(Tok::Inr)?;
                let rx = self.binder()?;
                self.expect(Tok::Arrow)?;
                let right = self.expr()?;
                Ok(Term::Case {
                    scrutinee: Box::new(scrutinee),
                    left_binder: lx,
                    left: Box::new(left),
                    right_binder: rx,
                    right: Box::new(right),
                })
            }
            _ => {
                let lhs = self.disj()?;
                if *self.peek() == Tok::Imp {
                    self.bump();
                    let rhs = self.expr()?;
                    Ok(Term::imp(lhs, rhs))
                } else {
                    Ok(lhs)
                }
            }
        }
    }

    fn disj(&mut self) -> Result<Term, ParseError> {
        let lhs = self.conj()?;
        if *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.disj_operand()?;
            Ok(Term::disj(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    // The right operand of `\/` and `/\` may also be a binder form, which then
    // extends as far right as possible.
    fn disj_operand(&mut self) -> Result<Term, ParseError> {
        if self.at_binder_form() {
            self.expr()
        } else {
            self.disj()
        }
    }

    fn conj(&mut self) -> Result<Term, ParseError> {
        let lhs = self.app()?;
        if *self.peek() == Tok::And {
            self.bump();
            let rhs = if self.at_binder_form() {
                self.expr()?
            } else {
                self.conj()?
            };
            Ok(Term::conj(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn at_binder_form(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Lam | Tok::Forall | Tok::Exists | Tok::Case
        )
    }

    fn app(&mut self) -> Result<Term, ParseError> {
        let mut head = self.unary()?;
        while self.starts_unary() {
            let arg = self.unary()?;
            head = Term::app(head, arg);
        }
        Ok(head)
    }

    fn starts_unary(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Ident(_)
                | Tok::It
                | Tok::True
                | Tok::False
                | Tok::LAngle
                | Tok::LParen
                | Tok::Fst
                | Tok::Snd
                | Tok::Inl
                | Tok::Inr
        )
    }

    fn unary(&mut self) -> Result<Term, ParseError> {
        let wrap: fn(Term) -> Term = match self.peek() {
            Tok::Fst => Term::fst,
            Tok::Snd => Term::snd,
            Tok::Inl => Term::inl,
            Tok::Inr => Term::inr,
            _ => return self.atom(),
        };
        self.bump();
        Ok(wrap(self.unary()?))
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::Ident(x) => {
                if x == UNUSED_BINDER {
                    return Err(self.error("`_` cannot be used as a variable".into()));
                }
                self.bump();
                Ok(Term::Var(x))
            }
            Tok::It => {
                self.bump();
                Ok(Term::It)
            }
            Tok::True => {
                self.bump();
                Ok(Term::True)
            }
            Tok::False => {
                self.bump();
                Ok(Term::False)
            }
            Tok::LAngle => {
                self.bump();
                let a = self.expr()?;
                self.expect(Tok::Comma)?;
                let b = self.expr()?;
                self.expect(Tok::RAngle)?;
                Ok(Term::pair(a, b))
            }
            Tok::LParen => {
                self.bump();
                let t = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            other => Err(self.error(format!("expected a term, found {other}"))),
        }
    }
}

/// Parses one term. Open terms are accepted here; semantic checks reject them.
pub fn parse(text: &str) -> Result<Term, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    let t = p.expr()?;
    if *p.peek() != Tok::Eof {
        return Err(p.error(format!("unexpected {} after term", p.peek())));
    }
    Ok(t)
}

impl std::str::FromStr for Term {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

// Printer precedence levels, loosest first.
const TOP: u8 = 0;
const DISJ: u8 = 1;
const CONJ: u8 = 2;
const APP: u8 = 3;
const ATOM: u8 = 4;

fn is_conj(t: &Term) -> bool {
    matches!(t, Term::Exists(_, x, b) if !b.occurs_free(x))
}

fn level(t: &Term) -> u8 {
    match t {
        Term::Lam(..) | Term::Case { .. } => TOP,
        Term::Forall(..) => TOP,
        Term::Exists(..) if !is_conj(t) => TOP,
        Term::Disj(..) => DISJ,
        Term::Exists(..) => CONJ,
        Term::App(..) | Term::Fst(_) | Term::Snd(_) | Term::Inl(_) | Term::Inr(_) => APP,
        Term::Var(_) | Term::It | Term::True | Term::False | Term::Pair(..) => ATOM,
    }
}

fn write_at(t: &Term, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if level(t) < min {
        f.write_str("(")?;
        write_term(t, f)?;
        f.write_str(")")
    } else {
        write_term(t, f)
    }
}

fn write_term(t: &Term, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match t {
        Term::Var(x) => f.write_str(x),
        Term::It => f.write_str("it"),
        Term::True => f.write_str("True"),
        Term::False => f.write_str("False"),
        Term::Lam(x, b) => {
            write!(f, "lam {x}. ")?;
            write_term(b, f)
        }
        Term::Pair(a, b) => {
            f.write_str("<")?;
            write_term(a, f)?;
            f.write_str(", ")?;
            write_term(b, f)?;
            f.write_str(">")
        }
        Term::App(a, b) => {
            write_at(a, APP, f)?;
            f.write_str(" ")?;
            write_at(b, ATOM, f)
        }
        Term::Fst(a) | Term::Snd(a) | Term::Inl(a) | Term::Inr(a) => {
            let kw = match t {
                Term::Fst(_) => "fst",
                Term::Snd(_) => "snd",
                Term::Inl(_) => "inl",
                _ => "inr",
            };
            write!(f, "{kw} ")?;
            write_at(a, ATOM, f)
        }
        Term::Case {
            scrutinee,
            left_binder,
            left,
            right_binder,
            right,
        } => {
            f.write_str("case ")?;
            write_at(scrutinee, DISJ, f)?;
            write!(f, " of inl {left_binder} -> ")?;
            write_at(left, DISJ, f)?;
            write!(f, " | inr {right_binder} -> ")?;
            write_term(right, f)
        }
        Term::Forall(a, x, b) if !b.occurs_free(x) => {
            write_at(a, DISJ, f)?;
            f.write_str(" => ")?;
            write_term(b, f)
        }
        Term::Exists(a, x, b) if !b.occurs_free(x) => {
            write_at(a, APP, f)?;
            f.write_str(" /\\ ")?;
            write_at(b, CONJ, f)
        }
        Term::Forall(a, x, b) | Term::Exists(a, x, b) => {
            let kw = if matches!(t, Term::Forall(..)) {
                "forall"
            } else {
                "exists"
            };
            write!(f, "{kw} {x} : ")?;
            write_at(a, DISJ, f)?;
            f.write_str(" . ")?;
            write_term(b, f)
        }
        Term::Disj(a, b) => {
            write_at(a, CONJ, f)?;
            f.write_str(" \\/ ")?;
            write_at(b, DISJ, f)
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(self, f)
    }
}
