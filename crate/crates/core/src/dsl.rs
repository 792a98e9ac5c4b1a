// SPDX-License-Identifier: Apache-2.0

//! A small equation language for generator functions.
//!
//! ```text
//! # two latches sharing an input
//! inputs: 1
//! x1' = x1 & x2
//! x2' = x2 ^ u1
//! ```
//!
//! One `x<i>' = <expr>` per line (or separated by `;`). Operators from loosest
//! to tightest: `|`, `^`, `&`, prefix `!`. State variables `x1..xn` must all be
//! defined; `n` is the number of definitions. Inputs `u1..um` are declared with
//! an optional `inputs: <m>` line, otherwise `m` is the largest index used.

use std::fmt;

use crate::bits::BitVec;
use crate::boolfn::GeneratorFn;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Const(bool),
    /// `x<i>`, 1-based.
    State(usize),
    /// `u<j>`, 1-based.
    Input(usize),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Xor(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn eval(&self, mu: &BitVec, lambda: &BitVec) -> bool {
        match self {
            Expr::Const(b) => *b,
            Expr::State(i) => mu.bits() >> (i - 1) & 1 == 1,
            Expr::Input(j) => lambda.bits() >> (j - 1) & 1 == 1,
            Expr::Not(e) => !e.eval(mu, lambda),
            Expr::And(a, b) => a.eval(mu, lambda) && b.eval(mu, lambda),
            Expr::Xor(a, b) => a.eval(mu, lambda) ^ b.eval(mu, lambda),
            Expr::Or(a, b) => a.eval(mu, lambda) || b.eval(mu, lambda),
        }
    }

    fn visit(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Not(e) => e.visit(f),
            Expr::And(a, b) | Expr::Xor(a, b) | Expr::Or(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Or(..) => 0,
            Expr::Xor(..) => 1,
            Expr::And(..) => 2,
            _ => 3,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let operand = |f: &mut fmt::Formatter<'_>, e: &Expr, min: u8| {
            if e.precedence() < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            Expr::Const(b) => write!(f, "{}", u8::from(*b)),
            Expr::State(i) => write!(f, "x{i}"),
            Expr::Input(j) => write!(f, "u{j}"),
            Expr::Not(e) => {
                f.write_str("!")?;
                operand(f, e, 3)
            }
            Expr::And(a, b) | Expr::Xor(a, b) | Expr::Or(a, b) => {
                let (p, op) = match self {
                    Expr::And(..) => (2, " & "),
                    Expr::Xor(..) => (1, " ^ "),
                    _ => (0, " | "),
                };
                operand(f, a, p)?;
                f.write_str(op)?;
                // operators are left-associative, so a right operand of equal
                // precedence needs parentheses to survive a reparse
                operand(f, b, p + 1)
            }
        }
    }
}

/// A parsed set of state equations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquationProgram {
    m: usize,
    /// `equations[i - 1]` defines `x<i>'`.
    equations: Vec<Expr>,
}

impl EquationProgram {
    pub fn n(&self) -> usize {
        self.equations.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn equations(&self) -> &[Expr] {
        &self.equations
    }

    pub fn state_names(&self) -> Vec<String> {
        (1..=self.n()).map(|i| format!("x{i}")).collect()
    }

    pub fn input_names(&self) -> Vec<String> {
        (1..=self.m).map(|j| format!("u{j}")).collect()
    }
}

impl fmt::Display for EquationProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "inputs: {}", self.m)?;
        for (k, e) in self.equations.iter().enumerate() {
            writeln!(f, "x{}' = {e}", k + 1)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Name(String),
    Const(bool),
    Not,
    And,
    Xor,
    Or,
    Open,
    Close,
}

struct Lexed {
    tok: Tok,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn lex(text: &str, line: usize, offset: usize) -> Result<Vec<Lexed>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        let column = offset + k + 1;
        let simple = match c {
            '!' => Some(Tok::Not),
            '&' => Some(Tok::And),
            '^' => Some(Tok::Xor),
            '|' => Some(Tok::Or),
            '(' => Some(Tok::Open),
            ')' => Some(Tok::Close),
            '0' => Some(Tok::Const(false)),
            '1' => Some(Tok::Const(true)),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push(Lexed { tok, column });
            k += 1;
        } else if c.is_whitespace() {
            k += 1;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = k;
            while k < chars.len() && (chars[k].is_ascii_alphanumeric() || chars[k] == '_') {
                k += 1;
            }
            out.push(Lexed {
                tok: Tok::Name(chars[start..k].iter().collect()),
                column,
            });
        } else {
            return Err(syntax(line, column, format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Var {
    State(usize),
    Input(usize),
}

fn classify(name: &str) -> Option<Var> {
    let kind = name.chars().next()?;
    let digits = &name[kind.len_utf8()..];
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0')
    {
        return None;
    }
    let index = digits.parse().ok()?;
    match kind {
        'x' => Some(Var::State(index)),
        'u' => Some(Var::Input(index)),
        _ => None,
    }
}

struct Parser<'a> {
    toks: &'a [Lexed],
    pos: usize,
    line: usize,
    end_column: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|l| &l.tok)
    }

    fn column(&self) -> usize {
        self.toks
            .get(self.pos)
            .map_or(self.end_column, |l| l.column)
    }

    fn binary(
        &mut self,
        op: Tok,
        next: fn(&mut Self) -> Result<Expr>,
        build: fn(Box<Expr>, Box<Expr>) -> Expr,
    ) -> Result<Expr> {
        let mut lhs = next(self)?;
        while self.peek() == Some(&op) {
            self.pos += 1;
            let rhs = next(self)?;
            lhs = build(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn expr(&mut self) -> Result<Expr> {
        self.binary(Tok::Or, Self::xor, Expr::Or)
    }

    fn xor(&mut self) -> Result<Expr> {
        self.binary(Tok::Xor, Self::term, Expr::Xor)
    }

    fn term(&mut self) -> Result<Expr> {
        self.binary(Tok::And, Self::factor, Expr::And)
    }

    fn factor(&mut self) -> Result<Expr> {
        let column = self.column();
        let Some(tok) = self.peek().cloned() else {
            return Err(syntax(self.line, column, "expected an operand"));
        };
        self.pos += 1;
        match tok {
            Tok::Not => Ok(Expr::Not(Box::new(self.factor()?))),
            Tok::Open => {
                let e = self.expr()?;
                if self.peek() != Some(&Tok::Close) {
                    return Err(syntax(self.line, self.column(), "expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Tok::Const(b) => Ok(Expr::Const(b)),
            Tok::Name(name) => match classify(&name) {
                Some(Var::State(i)) => Ok(Expr::State(i)),
                Some(Var::Input(j)) => Ok(Expr::Input(j)),
                None => Err(Error::UndeclaredVariable {
                    line: self.line,
                    name,
                }),
            },
            other => Err(syntax(
                self.line,
                column,
                format!("expected an operand, found {other:?}"),
            )),
        }
    }
}

/// Parses one statement `x<i>' = <expr>` starting at `offset` within its line.
fn parse_statement(text: &str, line: usize, offset: usize) -> Result<(usize, Expr)> {
    let Some(eq) = text.find('=') else {
        return Err(syntax(line, offset + 1, "expected `x<i>' = <expr>`"));
    };
    let lhs = text[..eq].trim();
    let lhs_col = offset + text.find(|c: char| !c.is_whitespace()).unwrap_or(0) + 1;
    let target = lhs
        .strip_suffix('\'')
        .map(str::trim_end)
        .ok_or_else(|| syntax(line, lhs_col, "left-hand side must be `x<i>'`"))?;
    let index = match classify(target) {
        Some(Var::State(i)) if i > crate::bits::MAX_WIDTH => {
            return Err(Error::WidthOutOfRange(i));
        }
        Some(Var::State(i)) => i,
        _ => {
            return Err(syntax(
                line,
                lhs_col,
                format!("`{target}` is not a state variable"),
            ))
        }
    };
    let rhs = &text[eq + 1..];
    let toks = lex(rhs, line, offset + eq + 1)?;
    let mut parser = Parser {
        toks: &toks,
        pos: 0,
        line,
        end_column: offset + text.chars().count() + 1,
    };
    let expr = parser.expr()?;
    if parser.pos != toks.len() {
        return Err(syntax(line, parser.column(), "unexpected trailing input"));
    }
    Ok((index, expr))
}

/// Parses a program from `(line number, text)` pairs.
pub(crate) fn parse_numbered<'a>(
    lines: impl IntoIterator<Item = (usize, &'a str)>,
) -> Result<EquationProgram> {
    let mut defs: Vec<Option<(usize, Expr)>> = Vec::new();
    let mut declared_m: Option<usize> = None;
    for (line, raw) in lines {
        let body = raw.split('#').next().unwrap_or("");
        if let Some(rest) = body.trim_start().strip_prefix("inputs:") {
            let col = body.find("inputs:").unwrap_or(0) + 1;
            declared_m = Some(
                rest.trim()
                    .parse()
                    .map_err(|_| syntax(line, col, "expected `inputs: <count>`"))?,
            );
            continue;
        }
        let mut offset = 0;
        for stmt in body.split(';') {
            if !stmt.trim().is_empty() {
                let (i, expr) = parse_statement(stmt, line, offset)?;
                if defs.len() < i {
                    defs.resize(i, None);
                }
                if defs[i - 1].is_some() {
                    return Err(Error::DuplicateDefinition {
                        line,
                        name: format!("x{i}"),
                    });
                }
                defs[i - 1] = Some((line, expr));
            }
            offset += stmt.chars().count() + 1;
        }
    }
    if defs.is_empty() {
        return Err(Error::MissingDefinition("x1".into()));
    }
    let n = defs.len();
    let mut equations = Vec::with_capacity(n);
    let mut max_input = 0;
    for (k, def) in defs.into_iter().enumerate() {
        let (line, expr) = def.ok_or_else(|| Error::MissingDefinition(format!("x{}", k + 1)))?;
        let mut bad = None;
        expr.visit(&mut |e| match e {
            Expr::State(i) if *i > n => bad = bad.take().or(Some(format!("x{i}"))),
            Expr::Input(j) => {
                max_input = max_input.max(*j);
                if declared_m.is_some_and(|m| *j > m) {
                    bad = bad.take().or(Some(format!("u{j}")));
                }
            }
            _ => {}
        });
        if let Some(name) = bad {
            return Err(Error::UndeclaredVariable { line, name });
        }
        equations.push(expr);
    }
    Ok(EquationProgram {
        m: declared_m.unwrap_or(max_input),
        equations,
    })
}

pub fn parse_dsl(text: &str) -> Result<EquationProgram> {
    parse_numbered(text.lines().enumerate().map(|(k, l)| (k + 1, l)))
}

/// Tabulates the program over all `2^(n+m)` points.
pub fn compile(prog: &EquationProgram) -> Result<GeneratorFn> {
    let n = prog.n();
    GeneratorFn::from_fn(n, prog.m, |mu, lambda| {
        let bits = prog
            .equations
            .iter()
            .enumerate()
            .fold(0u64, |acc, (k, e)| acc | (u64::from(e.eval(&mu, &lambda)) << k));
        BitVec::new(n, bits).expect("n equations fit in n bits")
    })
}
