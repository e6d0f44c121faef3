use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;

use crate::graded::{Chart, EvenScalar, GradedError, SuperScalar};

/// Deepest nesting of parentheses and unary minus accepted.
pub const MAX_DEPTH: usize = 128;
/// Largest exponent accepted after `^`.
pub const MAX_EXPONENT: u32 = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedEnd,
    Expected {
        expected: &'static str,
        found: String,
    },
    UnknownIdentifier(String),
    BadArguments {
        symbol: String,
        expected: Vec<String>,
    },
    ExponentTooLarge(String),
    TooDeep,
    Graded(GradedError),
}

/// A diagnostic anchored at a byte offset of the source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character `{c}`"),
            ParseErrorKind::UnexpectedEnd => f.write_str("unexpected end of input"),
            ParseErrorKind::Expected { expected, found } => {
                write!(f, "expected {expected}, found {found}")
            }
            ParseErrorKind::UnknownIdentifier(name) => write!(f, "unknown identifier `{name}`"),
            ParseErrorKind::BadArguments { symbol, expected } => write!(
                f,
                "`{symbol}` must be called as {symbol}({})",
                expected.join(",")
            ),
            ParseErrorKind::ExponentTooLarge(e) => {
                write!(f, "exponent {e} exceeds the limit of {MAX_EXPONENT}")
            }
            ParseErrorKind::TooDeep => write!(f, "nesting deeper than {MAX_DEPTH}"),
            ParseErrorKind::Graded(e) => e.fmt(f),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at byte {}: {}", self.offset, self.kind)
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(n) => format!("number `{n}`"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut out = Vec::new();
    let mut it = src.char_indices().peekable();
    while let Some(&(i, c)) = it.peek() {
        if c.is_whitespace() {
            it.next();
            continue;
        }
        if c.is_ascii_digit() {
            let mut end = i;
            while let Some(&(j, d)) = it.peek() {
                if !d.is_ascii_digit() {
                    break;
                }
                end = j + d.len_utf8();
                it.next();
            }
            let n: BigInt = src[i..end].parse().expect("digits");
            out.push((i, Tok::Num(n)));
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let mut end = i;
            while let Some(&(j, d)) = it.peek() {
                if !(d.is_alphanumeric() || d == '_') {
                    break;
                }
                end = j + d.len_utf8();
                it.next();
            }
            out.push((i, Tok::Ident(src[i..end].to_string())));
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            other => {
                return Err(ParseError {
                    offset: i,
                    kind: ParseErrorKind::UnexpectedChar(other),
                })
            }
        };
        out.push((i, tok));
        it.next();
    }
    out.push((src.len(), Tok::End));
    Ok(out)
}

struct Parser<'a> {
    chart: &'a Arc<Chart>,
    toks: Vec<(usize, Tok)>,
    pos: usize,
    depth: usize,
}

impl<'a> Parser<'a> {
    // The last token is always `End`; reading past it keeps returning it.
    fn current(&self) -> &(usize, Tok) {
        &self.toks[self.pos.min(self.toks.len() - 1)]
    }

    fn peek(&self) -> &Tok {
        &self.current().1
    }

    fn offset(&self) -> usize {
        self.current().0
    }

    fn bump(&mut self) -> (usize, Tok) {
        let t = self.current().clone();
        self.pos += 1;
        t
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            offset: self.offset(),
            kind,
        }
    }

    fn expected(&self, what: &'static str) -> ParseError {
        let kind = match self.peek() {
            Tok::End => ParseErrorKind::UnexpectedEnd,
            t => ParseErrorKind::Expected {
                expected: what,
                found: t.describe(),
            },
        };
        self.err(kind)
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.err(ParseErrorKind::TooDeep));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<SuperScalar, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<SuperScalar, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    acc = &acc * &self.factor()?;
                }
                Tok::Slash => {
                    let (at, _) = self.bump();
                    let d = self.factor()?;
                    acc = acc.checked_div(&d).map_err(|e| ParseError {
                        offset: at,
                        kind: ParseErrorKind::Graded(e),
                    })?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<SuperScalar, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            self.enter()?;
            let v = self.factor()?;
            self.depth -= 1;
            return Ok(-&v);
        }
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let at = self.offset();
        match self.bump().1 {
            Tok::Num(n) => {
                let e = u32::try_from(&n)
                    .ok()
                    .filter(|&e| e <= MAX_EXPONENT)
                    .ok_or(ParseError {
                        offset: at,
                        kind: ParseErrorKind::ExponentTooLarge(n.to_string()),
                    })?;
                Ok(base.pow(e))
            }
            _ => {
                self.pos -= 1;
                Err(self.expected("a non-negative integer exponent"))
            }
        }
    }

    fn atom(&mut self) -> Result<SuperScalar, ParseError> {
        let (at, tok) = self.bump();
        match tok {
            Tok::Num(n) => Ok(SuperScalar::from_even(
                self.chart,
                EvenScalar::from_bigint(n),
            )),
            Tok::LParen => {
                self.enter()?;
                let v = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.expected("`)`"));
                }
                self.bump();
                self.depth -= 1;
                Ok(v)
            }
            Tok::Ident(name) => self.identifier(at, &name),
            _ => {
                self.pos -= 1;
                Err(self.expected("a number, identifier or `(`"))
            }
        }
    }

    fn identifier(&mut self, at: usize, name: &str) -> Result<SuperScalar, ParseError> {
        if let Some(i) = self.chart.index_of(name) {
            return Ok(SuperScalar::coordinate_at(self.chart, i));
        }
        let Some((symbol, orders)) = resolve_symbol(self.chart, name) else {
            return Err(ParseError {
                offset: at,
                kind: ParseErrorKind::UnknownIdentifier(name.to_string()),
            });
        };
        let sym = &self.chart.symbols()[symbol.as_str()];
        if *self.peek() == Tok::LParen {
            let call_at = self.offset();
            self.bump();
            let mut args = Vec::new();
            if *self.peek() != Tok::RParen {
                loop {
                    match self.bump().1 {
                        Tok::Ident(a) => args.push(a),
                        _ => {
                            self.pos -= 1;
                            return Err(self.expected("a coordinate name"));
                        }
                    }
                    match self.peek() {
                        Tok::Comma => {
                            self.bump();
                        }
                        Tok::RParen => break,
                        _ => return Err(self.expected("`,` or `)`")),
                    }
                }
            }
            self.bump();
            let deps: Vec<String> = sym.deps().iter().map(|d| d.to_string()).collect();
            if args != deps {
                return Err(ParseError {
                    offset: call_at,
                    kind: ParseErrorKind::BadArguments {
                        symbol: symbol.clone(),
                        expected: deps,
                    },
                });
            }
        }
        Ok(SuperScalar::from_even(self.chart, sym.jet(orders)))
    }
}

/// Resolves `h` or a jet name such as `h_xy` / `f_r_theta` to its symbol
/// and per-dependency derivative orders.
fn resolve_symbol(chart: &Chart, name: &str) -> Option<(String, Vec<u32>)> {
    if let Some(s) = chart.symbol(name) {
        return Some((name.to_string(), vec![0; s.deps().len()]));
    }
    for (sname, s) in chart.symbols() {
        let Some(suffix) = name
            .strip_prefix(sname.as_ref())
            .and_then(|r| r.strip_prefix('_'))
        else {
            continue;
        };
        if suffix.is_empty() || s.has_registered_derivatives() {
            continue;
        }
        let short = s.deps().iter().all(|d| d.chars().count() == 1);
        let parts: Vec<String> = if short {
            suffix.chars().map(String::from).collect()
        } else {
            suffix.split('_').map(String::from).collect()
        };
        let mut orders = vec![0u32; s.deps().len()];
        let mut ok = true;
        for p in &parts {
            match s.deps().iter().position(|d| d.as_ref() == p) {
                Some(k) => orders[k] += 1,
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return Some((sname.to_string(), orders));
        }
    }
    None
}

/// Parses an expression over the coordinates and function symbols of
/// `chart`.
///
/// Precedence from loosest: `+`/`-`, then `*`/`/`, then unary minus, then
/// `^` with a literal exponent. Division needs an even divisor with
/// invertible body.
pub fn parse_expression(src: &str, chart: &Arc<Chart>) -> Result<SuperScalar, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser {
        chart,
        toks,
        pos: 0,
        depth: 0,
    };
    let v = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.expected("an operator or end of input"));
    }
    Ok(v)
}

/// Parses an expression that must be even, such as a metric entry body or
/// a registered derivative.
pub fn parse_even_expression(src: &str, chart: &Arc<Chart>) -> Result<EvenScalar, ParseError> {
    let v = parse_expression(src, chart)?;
    if v.terms().keys().any(|m| m.degree() > 0) {
        return Err(ParseError {
            offset: 0,
            kind: ParseErrorKind::Graded(GradedError::Parity(
                "expected an expression free of odd coordinates".into(),
            )),
        });
    }
    Ok(v.body())
}
