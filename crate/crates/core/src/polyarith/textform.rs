//! Canonical text form for polynomials and the expression parser.
//!
//! Printing: terms in descending graded-lex order, explicit `*` and `^`,
//! e.g. `x3^2 - x2^2 - x1^2` or `5*x0^2*x2 - 5*x1^3 + 2*x2 - 4*x1`.
//! Parsing accepts the same grammar plus `/`, parentheses, unary minus and
//! `**` as an alias for `^`.

use num_traits::{One, Signed};

use super::{Integer, MultiPoly, PolyError, Rational, RationalFunction, VarSet};

/// Render a polynomial in canonical text form.
pub fn poly_to_string(p: &MultiPoly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    // descending graded-lex
    for (i, (mono, coeff)) in p.terms().collect::<Vec<_>>().into_iter().rev().enumerate() {
        let neg = coeff.is_negative();
        let abs = coeff.abs();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mut factors: Vec<String> = Vec::new();
        if !abs.is_one() || mono.is_constant() {
            factors.push(rational_to_string(&abs));
        }
        for (v, e) in mono.iter() {
            if e == 1 {
                factors.push(p.vars().name(v).to_string());
            } else {
                factors.push(format!("{}^{}", p.vars().name(v), e));
            }
        }
        out.push_str(&factors.join("*"));
    }
    out
}

fn rational_to_string(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parse error with a byte offset into the source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "parse error at byte {}: {}", self.position, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Int(Integer),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' => {
                toks.push((i, Token::Plus));
                i += 1;
            }
            b'-' => {
                toks.push((i, Token::Minus));
                i += 1;
            }
            b'*' => {
                if i + 1 < bytes.len() && bytes[i + 1] == b'*' {
                    toks.push((i, Token::Caret));
                    i += 2;
                } else {
                    toks.push((i, Token::Star));
                    i += 1;
                }
            }
            b'/' => {
                toks.push((i, Token::Slash));
                i += 1;
            }
            b'^' => {
                toks.push((i, Token::Caret));
                i += 1;
            }
            b'(' => {
                toks.push((i, Token::LParen));
                i += 1;
            }
            b')' => {
                toks.push((i, Token::RParen));
                i += 1;
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let text = &src[start..i];
                toks.push((
                    start,
                    Token::Int(text.parse::<Integer>().map_err(|e| ParseError {
                        position: start,
                        message: format!("bad integer: {e}"),
                    })?),
                ));
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push((start, Token::Ident(src[start..i].to_string())));
            }
            _ => {
                return Err(ParseError {
                    position: i,
                    message: format!("unexpected character {:?}", src[i..].chars().next().unwrap()),
                })
            }
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<(usize, Token)>,
    pos: usize,
    vars: &'a VarSet,
    src_len: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|(p, _)| *p)
            .unwrap_or(self.src_len)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            position: self.here(),
            message: message.into(),
        })
    }

    fn expr(&mut self) -> Result<RationalFunction, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = self.lift(acc.add(&rhs))?;
                }
                Some(Token::Minus) => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = self.lift(acc.sub(&rhs))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RationalFunction, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.bump();
                    let rhs = self.unary()?;
                    acc = self.lift(acc.mul(&rhs))?;
                }
                Some(Token::Slash) => {
                    self.bump();
                    let rhs = self.unary()?;
                    if rhs.is_zero() {
                        return self.err("division by zero");
                    }
                    let inv = self.lift(rhs.recip())?;
                    acc = self.lift(acc.mul(&inv))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<RationalFunction, ParseError> {
        if matches!(self.peek(), Some(Token::Minus)) {
            self.bump();
            let inner = self.unary()?;
            let neg = RationalFunction::constant(
                self.vars.clone(),
                -Rational::one(),
            );
            return self.lift(neg.mul(&inner));
        }
        self.power()
    }

    fn power(&mut self) -> Result<RationalFunction, ParseError> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Token::Caret)) {
            self.bump();
            let at = self.here();
            match self.bump() {
                Some(Token::Int(k)) => {
                    let k: i64 = k.try_into().map_err(|_| ParseError {
                        position: at,
                        message: "exponent too large".into(),
                    })?;
                    if k < 0 {
                        return self.err("negative exponent");
                    }
                    return self.lift(base.pow_signed(k));
                }
                _ => {
                    return Err(ParseError {
                        position: at,
                        message: "expected integer exponent".into(),
                    })
                }
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RationalFunction, ParseError> {
        let at = self.here();
        match self.bump() {
            Some(Token::Int(n)) => Ok(RationalFunction::constant(
                self.vars.clone(),
                Rational::from_integer(n),
            )),
            Some(Token::Ident(name)) => match self.vars.index_of(&name) {
                Some(id) => Ok(RationalFunction::from_poly(MultiPoly::variable(
                    self.vars.clone(),
                    id,
                ))),
                None => Err(ParseError {
                    position: at,
                    message: format!("unknown variable {name}"),
                }),
            },
            Some(Token::LParen) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Token::RParen) => Ok(inner),
                    _ => Err(ParseError {
                        position: at,
                        message: "unclosed parenthesis".into(),
                    }),
                }
            }
            other => Err(ParseError {
                position: at,
                message: format!("expected a value, found {other:?}"),
            }),
        }
    }

    fn lift(
        &self,
        r: Result<RationalFunction, PolyError>,
    ) -> Result<RationalFunction, ParseError> {
        r.map_err(|e| ParseError {
            position: self.here(),
            message: e.to_string(),
        })
    }
}

/// Parse an expression over the given variables into a rational function.
pub fn parse_rational_function(src: &str, vars: &VarSet) -> Result<RationalFunction, ParseError> {
    let toks = tokenize(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        vars,
        src_len: src.len(),
    };
    let rf = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(rf)
}

/// Parse an expression that must reduce to a polynomial (denominator 1).
pub fn parse_poly(src: &str, vars: &VarSet) -> Result<MultiPoly, ParseError> {
    let rf = parse_rational_function(src, vars)?;
    match rf.as_poly() {
        Some(p) => Ok(p.clone()),
        None => Err(ParseError {
            position: 0,
            message: "expression is not a polynomial".into(),
        }),
    }
}
