//! Line-oriented text formats for instances and DLRs.
//!
//! ```text
//! # comments run to the end of the line
//! mode start
//! algebra auto
//! interval A
//! interval B
//! rel A {p pi} B
//! dlr A- - B- = 5
//! dlr A- <= 3/2*B- + 42.3 | A- != B-
//! ```
//!
//! An endpoint is written as the interval name immediately followed by `-`
//! (start) or `+` (end). Binary `+` and `-` must therefore be preceded by
//! whitespace when they follow a name.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::catalog::AlgebraId;
use crate::dlr::{Dlr, LinearOp, LinearPolynomial, LinearRelation, Var};
use crate::instance::{IntervalId, MIsatInstance, Mode};
use crate::relation::{IntervalRelation, Side};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Endpoint(String, Side),
    Number(Rational),
    Op(LinearOp),
    Plus,
    Minus,
    Star,
    Bar,
    LBrace,
    RBrace,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Endpoint(s, Side::Start) => write!(f, "`{s}-`"),
            Tok::Endpoint(s, Side::End) => write!(f, "`{s}+`"),
            Tok::Number(n) => write!(f, "`{n}`"),
            Tok::Op(op) => write!(f, "`{op}`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Minus => f.write_str("`-`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Bar => f.write_str("`|`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
        }
    }
}

/// How variables are spelled in a DLR.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarSyntax {
    /// `A-` and `A+` denote the endpoints of interval `A`.
    Endpoints,
    /// Bare identifiers such as `x` and `y`.
    Plain,
}

struct Lexer {
    line: usize,
    chars: Vec<(usize, char)>,
    pos: usize,
    syntax: VarSyntax,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

impl Lexer {
    /// `offset` is the column of the first character of `src`, minus one.
    fn new(src: &str, line: usize, offset: usize, syntax: VarSyntax) -> Self {
        Lexer {
            line,
            chars: src.chars().enumerate().map(|(i, c)| (i + 1 + offset, c)).collect(),
            pos: 0,
            syntax,
        }
    }

    fn error(&self, column: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            column,
            message: message.into(),
        }
    }

    fn peek_char(&self, k: usize) -> Option<char> {
        self.chars.get(self.pos + k).map(|&(_, c)| c)
    }

    fn end_column(&self) -> usize {
        self.chars.last().map_or(1, |&(col, _)| col + 1)
    }

    fn tokens(mut self) -> Result<Vec<(usize, Tok)>, ParseError> {
        let mut out = Vec::new();
        while let Some(&(col, c)) = self.chars.get(self.pos) {
            if c.is_whitespace() {
                self.pos += 1;
                continue;
            }
            let tok = match c {
                '+' => {
                    self.pos += 1;
                    Tok::Plus
                }
                '-' => {
                    self.pos += 1;
                    Tok::Minus
                }
                '*' => {
                    self.pos += 1;
                    Tok::Star
                }
                '|' => {
                    self.pos += 1;
                    Tok::Bar
                }
                '{' => {
                    self.pos += 1;
                    Tok::LBrace
                }
                '}' => {
                    self.pos += 1;
                    Tok::RBrace
                }
                '<' | '>' | '=' | '!' => self.operator(col)?,
                c if c.is_ascii_digit() => Tok::Number(self.number(col)?),
                c if is_ident_start(c) => self.word(),
                other => return Err(self.error(col, format!("unexpected character `{other}`"))),
            };
            out.push((col, tok));
        }
        Ok(out)
    }

    fn operator(&mut self, col: usize) -> Result<Tok, ParseError> {
        let c = self.peek_char(0).expect("called on a character");
        let eq_next = self.peek_char(1) == Some('=');
        let (op, len) = match (c, eq_next) {
            ('<', true) => (LinearOp::Le, 2),
            ('<', false) => (LinearOp::Lt, 1),
            ('>', true) => (LinearOp::Ge, 2),
            ('>', false) => (LinearOp::Gt, 1),
            ('=', true) => (LinearOp::Eq, 2),
            ('=', false) => (LinearOp::Eq, 1),
            ('!', true) => (LinearOp::Ne, 2),
            _ => return Err(self.error(col, "expected `!=`")),
        };
        self.pos += len;
        Ok(Tok::Op(op))
    }

    fn digits(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek_char(0).filter(char::is_ascii_digit) {
            s.push(c);
            self.pos += 1;
        }
        s
    }

    /// `123`, `4.56` or `7/8`, all exact.
    fn number(&mut self, col: usize) -> Result<Rational, ParseError> {
        let whole = self.digits();
        let mut value = Rational::from_integer(whole.parse::<BigInt>().expect("digits"));
        if self.peek_char(0) == Some('.') {
            self.pos += 1;
            let frac = self.digits();
            if frac.is_empty() {
                return Err(self.error(col, "expected digits after the decimal point"));
            }
            let scale = BigInt::from(10).pow(frac.len() as u32);
            let frac = Rational::new(frac.parse::<BigInt>().expect("digits"), scale);
            value += frac;
        } else if self.peek_char(0) == Some('/') {
            self.pos += 1;
            let denom = self.digits();
            if denom.is_empty() {
                return Err(self.error(col, "expected a denominator after `/`"));
            }
            let denom: BigInt = denom.parse().expect("digits");
            if denom.is_zero() {
                return Err(self.error(col, "zero denominator"));
            }
            value /= Rational::from_integer(denom);
        }
        Ok(value)
    }

    fn word(&mut self) -> Tok {
        let mut s = String::new();
        while let Some(c) = self.peek_char(0).filter(|&c| is_ident_char(c)) {
            s.push(c);
            self.pos += 1;
        }
        if self.syntax == VarSyntax::Endpoints {
            let side = match self.peek_char(0) {
                Some('-') => Some(Side::Start),
                Some('+') => Some(Side::End),
                _ => None,
            };
            if let Some(side) = side {
                self.pos += 1;
                return Tok::Endpoint(s, side);
            }
        }
        Tok::Ident(s)
    }
}

/// Maps a variable spelling to a variable: the name and, for endpoint
/// syntax, the side.
pub type Resolver<'a> = dyn FnMut(&str, Option<Side>) -> Result<Var, String> + 'a;

struct DlrParser<'r, 'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    line: usize,
    end_column: usize,
    resolve: &'r mut Resolver<'a>,
}

impl DlrParser<'_, '_> {
    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            column: self.toks.get(self.pos).map_or(self.end_column, |t| t.0),
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        match self.peek() {
            Some(t) => self.error(format!("expected {wanted}, found {t}")),
            None => self.error(format!("expected {wanted}, found end of line")),
        }
    }

    fn variable(&mut self) -> Result<Option<Var>, ParseError> {
        let (name, side) = match self.peek() {
            Some(Tok::Endpoint(name, side)) => (name.clone(), Some(*side)),
            Some(Tok::Ident(name)) => (name.clone(), None),
            _ => return Ok(None),
        };
        let var = (self.resolve)(&name, side).map_err(|m| self.error(m))?;
        self.pos += 1;
        Ok(Some(var))
    }

    /// `[number ['*']] variable | number`
    fn term(&mut self, sign: &Rational, poly: &mut LinearPolynomial) -> Result<(), ParseError> {
        if let Some(Tok::Number(n)) = self.peek() {
            let n = n.clone() * sign;
            self.pos += 1;
            let starred = self.peek() == Some(&Tok::Star);
            if starred {
                self.pos += 1;
            }
            match self.variable()? {
                Some(v) => poly.add_term(n, v),
                None if starred => return Err(self.unexpected("a variable after `*`")),
                None => poly.add_constant(&n),
            }
            return Ok(());
        }
        match self.variable()? {
            Some(v) => {
                poly.add_term(sign.clone(), v);
                Ok(())
            }
            None => Err(self.unexpected("a number or variable")),
        }
    }

    fn polynomial(&mut self) -> Result<LinearPolynomial, ParseError> {
        let mut poly = LinearPolynomial::zero();
        let mut sign = Rational::one();
        if self.peek() == Some(&Tok::Minus) {
            sign = -sign;
            self.pos += 1;
        } else if self.peek() == Some(&Tok::Plus) {
            self.pos += 1;
        }
        self.term(&sign, &mut poly)?;
        loop {
            let sign = match self.peek() {
                Some(Tok::Plus) => Rational::one(),
                Some(Tok::Minus) => -Rational::one(),
                _ => return Ok(poly),
            };
            self.pos += 1;
            self.term(&sign, &mut poly)?;
        }
    }

    fn relation(&mut self) -> Result<LinearRelation, ParseError> {
        let lhs = self.polynomial()?;
        let Some(Tok::Op(op)) = self.peek().cloned() else {
            return Err(self.unexpected("a comparison operator"));
        };
        self.pos += 1;
        let rhs = self.polynomial()?;
        Ok(LinearRelation::new(lhs, op, rhs))
    }

    fn dlr(&mut self) -> Result<Dlr, ParseError> {
        let mut disjuncts = vec![self.relation()?];
        while self.peek() == Some(&Tok::Bar) {
            self.pos += 1;
            disjuncts.push(self.relation()?);
        }
        if self.peek().is_some() {
            return Err(self.unexpected("`|` or end of line"));
        }
        Ok(Dlr::new(disjuncts).expect("at least one disjunct"))
    }
}

fn parse_dlr_at(
    text: &str,
    line: usize,
    offset: usize,
    syntax: VarSyntax,
    resolve: &mut Resolver<'_>,
) -> Result<Dlr, ParseError> {
    let lexer = Lexer::new(text, line, offset, syntax);
    let end_column = lexer.end_column();
    let toks = lexer.tokens()?;
    let mut p = DlrParser {
        toks,
        pos: 0,
        line,
        end_column,
        resolve,
    };
    p.dlr()
}

/// Parses one DLR, resolving variable names through `resolve`.
pub fn parse_dlr_with(text: &str, syntax: VarSyntax, resolve: &mut Resolver<'_>) -> Result<Dlr, ParseError> {
    parse_dlr_at(text, 1, 0, syntax, resolve)
}

/// Parses a DLR over bare identifiers, numbering variables `x0, x1, …` in
/// order of first appearance. Returns the DLR and the names.
///
/// ```
/// use allen_metric::text::parse_plain_dlr;
/// let (d, names) = parse_plain_dlr("x + 2*y <= 3*z + 42.3 | x != 3/12").unwrap();
/// assert!(d.is_horn());
/// assert_eq!(names, ["x", "y", "z"]);
/// ```
pub fn parse_plain_dlr(text: &str) -> Result<(Dlr, Vec<String>), ParseError> {
    let mut names: Vec<String> = Vec::new();
    let mut resolve = |name: &str, _side: Option<Side>| {
        let k = match names.iter().position(|n| n == name) {
            Some(k) => k,
            None => {
                names.push(name.to_string());
                names.len() - 1
            }
        };
        Ok(Var::Free(k as u32))
    };
    let d = parse_dlr_with(text, VarSyntax::Plain, &mut resolve)?;
    Ok((d, names))
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("")
}

/// Parses an instance file.
///
/// ```
/// use allen_metric::text::parse_instance;
/// let inst = parse_instance("mode start\ninterval A\ninterval B\nrel A {p pi} B\ndlr A- - B- = 5\n").unwrap();
/// assert_eq!(inst.num_intervals(), 2);
/// assert_eq!(inst.edges.len(), 1);
/// assert_eq!(inst.metric.len(), 1);
/// ```
pub fn parse_instance(text: &str) -> Result<MIsatInstance, ParseError> {
    let mut inst = MIsatInstance::new(Mode::Start);
    let mut ids: HashMap<String, IntervalId> = HashMap::new();
    let mut seen_mode = false;
    let mut seen_algebra = false;

    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = strip_comment(raw);
        let trimmed = line.trim_start();
        if trimmed.trim().is_empty() {
            continue;
        }
        let indent = line.len() - trimmed.len();
        let col_of = |s: &str| indent + (trimmed.len() - s.len()) + 1;
        let err = |column: usize, message: String| ParseError {
            line: line_no,
            column,
            message,
        };
        let (keyword, rest) = trimmed.split_once(char::is_whitespace).unwrap_or((trimmed, ""));
        let rest_trim = rest.trim_start();
        let rest_col = col_of(rest_trim);
        let mut words = rest_trim.split_whitespace();
        match keyword {
            "mode" => {
                if seen_mode {
                    return Err(err(1, "duplicate `mode` declaration".into()));
                }
                seen_mode = true;
                inst.mode = match words.next() {
                    Some("start") => Mode::Start,
                    Some("end") => Mode::End,
                    Some(other) => return Err(err(rest_col, format!("unknown mode `{other}`; expected `start` or `end`"))),
                    None => return Err(err(rest_col, "expected `start` or `end`".into())),
                };
                if let Some(extra) = words.next() {
                    return Err(err(col_of(extra), format!("unexpected `{extra}`")));
                }
            }
            "algebra" => {
                if seen_algebra {
                    return Err(err(1, "duplicate `algebra` declaration".into()));
                }
                seen_algebra = true;
                inst.algebra = match words.next() {
                    Some("auto") => None,
                    Some(name) => Some(name.parse::<AlgebraId>().map_err(|e| err(rest_col, e.to_string()))?),
                    None => return Err(err(rest_col, "expected an algebra name or `auto`".into())),
                };
                if let Some(extra) = words.next() {
                    return Err(err(col_of(extra), format!("unexpected `{extra}`")));
                }
            }
            "interval" => {
                let Some(name) = words.next() else {
                    return Err(err(rest_col, "expected an interval name".into()));
                };
                if !name.starts_with(is_ident_start) || !name.chars().all(is_ident_char) {
                    return Err(err(rest_col, format!("invalid interval name `{name}`")));
                }
                if ids.contains_key(name) {
                    return Err(err(rest_col, format!("duplicate interval `{name}`")));
                }
                if let Some(extra) = words.next() {
                    return Err(err(col_of(extra), format!("unexpected `{extra}`")));
                }
                ids.insert(name.to_string(), inst.add_interval(name));
            }
            "rel" => {
                let lookup = |name: &str, column: usize| {
                    ids.get(name)
                        .copied()
                        .ok_or_else(|| err(column, format!("undeclared interval `{name}`")))
                };
                let Some(from) = words.next() else {
                    return Err(err(rest_col, "expected `rel <name> <relation> <name>`".into()));
                };
                let from_id = lookup(from, rest_col)?;
                let after_from = rest_trim[from.len()..].trim_start();
                let (label_text, after_label) = if let Some(body) = after_from.strip_prefix("top") {
                    ("top", body)
                } else if after_from.starts_with('{') {
                    match after_from.find('}') {
                        Some(close) => (&after_from[..=close], &after_from[close + 1..]),
                        None => return Err(err(col_of(after_from), "missing `}`".into())),
                    }
                } else {
                    return Err(err(col_of(after_from), "expected a relation such as `{p m}` or `top`".into()));
                };
                let label: IntervalRelation = label_text
                    .parse()
                    .map_err(|e| err(col_of(after_from), format!("{e}")))?;
                let to_text = after_label.trim_start();
                let mut tail = to_text.split_whitespace();
                let Some(to) = tail.next() else {
                    return Err(err(col_of(to_text), "expected the second interval name".into()));
                };
                let to_id = lookup(to, col_of(to_text))?;
                if let Some(extra) = tail.next() {
                    return Err(err(col_of(extra), format!("unexpected `{extra}`")));
                }
                inst.relate(from_id, label, to_id);
            }
            "dlr" => {
                let mut resolve = |name: &str, side: Option<Side>| match (ids.get(name), side) {
                    (Some(&id), Some(side)) => Ok(id.endpoint(side)),
                    (None, _) => Err(format!("undeclared interval `{name}`")),
                    (Some(_), None) => Err(format!("write `{name}-` or `{name}+` for an endpoint of `{name}`")),
                };
                let d = parse_dlr_at(rest_trim, line_no, rest_col - 1, VarSyntax::Endpoints, &mut resolve)?;
                inst.constrain(d);
            }
            other => return Err(err(col_of(trimmed), format!("unknown directive `{other}`"))),
        }
    }
    Ok(inst)
}

/// Serializes an instance in the format read by [`parse_instance`].
pub fn write_instance(inst: &MIsatInstance) -> String {
    let mut out = format!("mode {}\n", inst.mode);
    match inst.algebra {
        Some(a) => out.push_str(&format!("algebra {a}\n")),
        None => out.push_str("algebra auto\n"),
    }
    for name in &inst.names {
        out.push_str(&format!("interval {name}\n"));
    }
    for e in &inst.edges {
        out.push_str(&format!("rel {} {} {}\n", inst.name(e.from), e.label, inst.name(e.to)));
    }
    for d in &inst.metric {
        let name = |v: Var| inst.var_name(v);
        out.push_str(&format!("dlr {}\n", d.display_with(&name)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn instance_example() {
        let inst = parse_instance("mode start\ninterval A\ninterval B\nrel A {p pi} B\n").unwrap();
        assert_eq!(inst.num_intervals(), 2);
        assert_eq!(inst.edges.len(), 1);
        assert_eq!(inst.edges[0].label.to_string(), "{p pi}");
    }

    #[test]
    fn dlr_example() {
        let inst = parse_instance("interval A\ninterval B\ndlr A- - B- = 5").unwrap();
        let d = &inst.metric[0];
        let r = &d.disjuncts()[0];
        assert_eq!(r.lhs.coefficient(IntervalId(0).start()), q(1, 1));
        assert_eq!(r.lhs.coefficient(IntervalId(1).start()), q(-1, 1));
        assert_eq!(r.op, LinearOp::Eq);
        assert_eq!(r.rhs.constant_term(), &q(5, 1));
    }

    #[test]
    fn unknown_basic_is_a_syntax_error() {
        let e = parse_instance("interval A\ninterval B\nrel A {q} B").unwrap_err();
        assert_eq!(e.line, 3);
        assert!(e.message.contains('q'), "{e}");
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_instance("interval A\ninterval A").unwrap_err();
        assert_eq!((e.line, e.column), (2, 10));
        let e = parse_instance("interval A\nrel A {p} B").unwrap_err();
        assert_eq!((e.line, e.column), (2, 11));
        let e = parse_instance("interval A\ndlr A- < B-").unwrap_err();
        assert_eq!((e.line, e.column), (2, 10));
        let e = parse_instance("interval A\ndlr A- <").unwrap_err();
        assert_eq!((e.line, e.column), (2, 9));
        let e = parse_instance("frobnicate").unwrap_err();
        assert_eq!((e.line, e.column), (1, 1));
        let e = parse_instance("mode sideways").unwrap_err();
        assert_eq!(e.column, 6);
        let e = parse_instance("algebra S(q)").unwrap_err();
        assert!(e.message.contains("unknown algebra"));
    }

    #[test]
    fn comments_and_blank_lines() {
        let inst = parse_instance("# header\n\nmode end  # trailing\ninterval X # x\n  rel X top X\n").unwrap();
        assert_eq!(inst.mode, Mode::End);
        assert_eq!(inst.edges[0].label, IntervalRelation::FULL);
    }

    #[test]
    fn exact_decimals_and_fractions() {
        let (d, names) = parse_plain_dlr("x + 2*y <= 3*z + 42.3 | x != 3/12").unwrap();
        assert_eq!(names, ["x", "y", "z"]);
        let first = &d.disjuncts()[0];
        assert_eq!(first.rhs.constant_term(), &q(423, 10));
        assert_eq!(d.disjuncts()[1].rhs.constant_term(), &q(1, 4));
        assert!(d.is_horn());
        let (d, _) = parse_plain_dlr("x + 2*y <= 3*z + 42.3 | x > 3/12").unwrap();
        assert!(!d.is_horn());
        assert!(parse_plain_dlr("x < 1/0").is_err());
        assert!(parse_plain_dlr("x <").is_err());
        assert!(parse_plain_dlr("x < y |").is_err());
    }

    #[test]
    fn implicit_multiplication_and_signs() {
        let (d, _) = parse_plain_dlr("-2x - y >= -1/2").unwrap();
        let r = &d.disjuncts()[0];
        assert_eq!(r.lhs.coefficient(Var::Free(0)), q(-2, 1));
        assert_eq!(r.lhs.coefficient(Var::Free(1)), q(-1, 1));
        assert_eq!(r.rhs.constant_term(), &q(-1, 2));
    }

    fn arb_instance() -> impl Strategy<Value = MIsatInstance> {
        let names = 1usize..5;
        names.prop_flat_map(|n| {
            let edge = (0..n as u32, 0u16..8192, 0..n as u32);
            let coef = (-9i64..10, 1i64..5).prop_map(|(a, b)| Rational::new(a.into(), b.into()));
            let term = (coef.clone(), 0..n as u32, any::<bool>());
            let poly = (proptest::collection::vec(term, 0..3), coef.clone());
            let relation = (poly.clone(), 0usize..6, poly);
            let dlr = proptest::collection::vec(relation, 1..3);
            (
                Just(n),
                any::<bool>(),
                proptest::option::of(0usize..8),
                proptest::collection::vec(edge, 0..5),
                proptest::collection::vec(dlr, 0..3),
            )
        })
        .prop_map(|(n, end_mode, algebra, edges, dlrs)| {
            let mode = if end_mode { Mode::End } else { Mode::Start };
            let mut inst = MIsatInstance::new(mode);
            for i in 0..n {
                inst.add_interval(format!("I{i}"));
            }
            inst.algebra = algebra.map(|k| AlgebraId::ALL[k]);
            for (a, bits, b) in edges {
                inst.relate(IntervalId(a), IntervalRelation::from_bits_truncate(bits), IntervalId(b));
            }
            let build = |(terms, k): (Vec<(Rational, u32, bool)>, Rational)| {
                let mut p = LinearPolynomial::constant(k);
                for (c, i, end) in terms {
                    let id = IntervalId(i);
                    p.add_term(c, if end { id.end() } else { id.start() });
                }
                p
            };
            for d in dlrs {
                let disjuncts = d
                    .into_iter()
                    .map(|(l, op, r)| LinearRelation::new(build(l), LinearOp::ALL[op], build(r)))
                    .collect();
                inst.constrain(Dlr::new(disjuncts).unwrap());
            }
            inst
        })
    }

    proptest! {
        #[test]
        fn write_then_parse_is_identity(inst in arb_instance()) {
            let text = write_instance(&inst);
            let back = parse_instance(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
            prop_assert_eq!(back, inst);
        }
    }
}
