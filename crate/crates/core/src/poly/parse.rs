//! Recursive-descent parser for polynomial expressions.
//!
//! Grammar: integer and rational literals (`5`, `3/4`), named variables,
//! `+ - * ^` and parentheses. Multiplication is always explicit (`2*z1`,
//! never `2z1`); exponents are integer literals, optionally negative.
//! The Unicode minus sign is accepted as `-`.

use super::{PolyError, SparsePoly, DEFAULT_TERM_BUDGET};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// Character offset into the input.
    pub position: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at position {}: {}", self.position, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(BigRational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Num(v) => format!("number `{v}`"),
            Token::Ident(name) => format!("identifier `{name}`"),
            Token::Plus => "`+`".into(),
            Token::Minus => "`-`".into(),
            Token::Star => "`*`".into(),
            Token::Caret => "`^`".into(),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                tokens.push((pos, Token::Plus));
                i += 1;
            }
            '-' | '\u{2212}' => {
                tokens.push((pos, Token::Minus));
                i += 1;
            }
            '*' => {
                tokens.push((pos, Token::Star));
                i += 1;
            }
            '^' => {
                tokens.push((pos, Token::Caret));
                i += 1;
            }
            '(' => {
                tokens.push((pos, Token::LParen));
                i += 1;
            }
            ')' => {
                tokens.push((pos, Token::RParen));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].1.is_ascii_digit() {
                    i += 1;
                }
                let numer: String = chars[start..i].iter().map(|&(_, c)| c).collect();
                let numer = BigInt::parse_bytes(numer.as_bytes(), 10).unwrap();
                // Rational literal: digits '/' digits.
                if i + 1 < chars.len() && chars[i].1 == '/' && chars[i + 1].1.is_ascii_digit() {
                    i += 1;
                    let dstart = i;
                    while i < chars.len() && chars[i].1.is_ascii_digit() {
                        i += 1;
                    }
                    let denom: String = chars[dstart..i].iter().map(|&(_, c)| c).collect();
                    let denom = BigInt::parse_bytes(denom.as_bytes(), 10).unwrap();
                    if denom.is_zero() {
                        return Err(ParseError {
                            position: chars[dstart].0,
                            message: "zero denominator in rational literal".into(),
                        });
                    }
                    tokens.push((pos, Token::Num(BigRational::new(numer, denom))));
                } else {
                    tokens.push((pos, Token::Num(BigRational::from_integer(numer))));
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len()
                    && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_')
                {
                    i += 1;
                }
                let name: String = chars[start..i].iter().map(|&(_, c)| c).collect();
                tokens.push((pos, Token::Ident(name)));
            }
            other => {
                return Err(ParseError {
                    position: pos,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    vars: &'a [String],
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn position(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|&(p, _)| p)
            .unwrap_or(self.end)
    }

    fn advance(&mut self) -> Option<(usize, Token)> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            position: self.position(),
            message: message.into(),
        }
    }

    fn parse_expr(&mut self) -> Result<SparsePoly, ParseError> {
        let mut acc = self.parse_term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.advance();
                    let rhs = self.parse_term()?;
                    acc = acc.add(&rhs).map_err(|e| self.error(e.to_string()))?;
                }
                Some(Token::Minus) => {
                    self.advance();
                    let rhs = self.parse_term()?;
                    acc = acc.sub(&rhs).map_err(|e| self.error(e.to_string()))?;
                }
                Some(Token::RParen) | None => return Ok(acc),
                Some(other) => {
                    return Err(self.error(format!(
                        "expected `+`, `-`, `*`, `^` or end of expression, found {} \
                         (implicit multiplication is not allowed)",
                        other.describe()
                    )))
                }
            }
        }
    }

    fn parse_term(&mut self) -> Result<SparsePoly, ParseError> {
        let mut acc = self.parse_factor()?;
        while self.peek() == Some(&Token::Star) {
            self.advance();
            let rhs = self.parse_factor()?;
            acc = acc
                .mul_budget(&rhs, DEFAULT_TERM_BUDGET)
                .map_err(|e| self.error(e.to_string()))?;
        }
        Ok(acc)
    }

    fn parse_factor(&mut self) -> Result<SparsePoly, ParseError> {
        if self.peek() == Some(&Token::Minus) {
            self.advance();
            let inner = self.parse_factor()?;
            return Ok(inner.neg());
        }
        let base = self.parse_primary()?;
        if self.peek() == Some(&Token::Caret) {
            let caret_pos = self.position();
            self.advance();
            let exponent = self.parse_exponent()?;
            return base.pow_budget(exponent, DEFAULT_TERM_BUDGET).map_err(|e| {
                match e {
                    PolyError::Parse(p) => p,
                    other => ParseError {
                        position: caret_pos,
                        message: other.to_string(),
                    },
                }
            });
        }
        Ok(base)
    }

    fn parse_exponent(&mut self) -> Result<i64, ParseError> {
        let negate = if self.peek() == Some(&Token::Minus) {
            self.advance();
            true
        } else {
            false
        };
        match self.advance() {
            Some((pos, Token::Num(v))) => {
                if !v.denom().is_one() {
                    return Err(ParseError {
                        position: pos,
                        message: format!("non-integer exponent `{v}`"),
                    });
                }
                let value = v.numer().to_i64().ok_or_else(|| ParseError {
                    position: pos,
                    message: "exponent too large".into(),
                })?;
                Ok(if negate { -value } else { value })
            }
            Some((pos, other)) => Err(ParseError {
                position: pos,
                message: format!("expected an integer exponent, found {}", other.describe()),
            }),
            None => Err(ParseError {
                position: self.end,
                message: "expected an integer exponent, found end of input".into(),
            }),
        }
    }

    fn parse_primary(&mut self) -> Result<SparsePoly, ParseError> {
        match self.advance() {
            Some((_, Token::Num(v))) => Ok(SparsePoly::constant(self.vars.len(), v)),
            Some((pos, Token::Ident(name))) => {
                match self.vars.iter().position(|v| *v == name) {
                    Some(i) => Ok(SparsePoly::var(self.vars.len(), i)),
                    None => Err(ParseError {
                        position: pos,
                        message: format!(
                            "unknown variable `{name}` (expected one of: {})",
                            self.vars.join(", ")
                        ),
                    }),
                }
            }
            Some((_, Token::LParen)) => {
                let inner = self.parse_expr()?;
                match self.advance() {
                    Some((_, Token::RParen)) => Ok(inner),
                    Some((pos, other)) => Err(ParseError {
                        position: pos,
                        message: format!("expected `)`, found {}", other.describe()),
                    }),
                    None => Err(ParseError {
                        position: self.end,
                        message: "expected `)`, found end of input".into(),
                    }),
                }
            }
            Some((pos, other)) => Err(ParseError {
                position: pos,
                message: format!(
                    "expected a number, variable or `(`, found {}",
                    other.describe()
                ),
            }),
            None => Err(ParseError {
                position: self.end,
                message: "expected a number, variable or `(`, found end of input".into(),
            }),
        }
    }
}

/// Parse an expression into a canonical sparse polynomial over the named
/// variables.
pub fn parse_poly(text: &str, vars: &[String]) -> Result<SparsePoly, ParseError> {
    let tokens = lex(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        vars,
        end: text.chars().count(),
    };
    let poly = parser.parse_expr()?;
    match parser.peek() {
        None => Ok(poly),
        Some(t) => Err(parser.error(format!("unexpected trailing {}", t.describe()))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("z{i}")).collect()
    }

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn five_term_example() {
        let p = parse_poly("2*z1^2*z2 + 3*z1^2 + z1*z2 - 5*z2 - 1", &vars(2)).unwrap();
        assert_eq!(p.n_terms(), 5);
        assert_eq!(p.coefficient(&[2, 1]), q(2));
        assert_eq!(p.coefficient(&[0, 0]), q(-1));
        assert_eq!(p.coefficient(&[0, 1]), q(-5));
    }

    #[test]
    fn zero_polynomial() {
        let p = parse_poly("0", &vars(2)).unwrap();
        assert!(p.is_zero());
        let p = parse_poly("z1 - z1", &vars(2)).unwrap();
        assert!(p.is_zero());
    }

    #[test]
    fn binomial_square() {
        let p = parse_poly("(z1+z2)^2", &vars(2)).unwrap();
        assert_eq!(p.n_terms(), 3);
        assert_eq!(p.coefficient(&[2, 0]), q(1));
        assert_eq!(p.coefficient(&[1, 1]), q(2));
        assert_eq!(p.coefficient(&[0, 2]), q(1));
    }

    #[test]
    fn rational_literals_and_unary_minus() {
        let p = parse_poly("3/4*z1 - -z2", &vars(2)).unwrap();
        assert_eq!(p.coefficient(&[1, 0]), BigRational::new(3.into(), 4.into()));
        assert_eq!(p.coefficient(&[0, 1]), q(1));
    }

    #[test]
    fn laurent_exponent() {
        let p = parse_poly("z1^-2*z2", &vars(2)).unwrap();
        assert_eq!(p.coefficient(&[-2, 1]), q(1));
        assert!(p.is_laurent());
    }

    #[test]
    fn unicode_minus_accepted() {
        let p = parse_poly("\u{2212}z1 + 2", &vars(1)).unwrap();
        assert_eq!(p.coefficient(&[1]), q(-1));
    }

    #[test]
    fn implicit_multiplication_rejected() {
        let err = parse_poly("2*z1 + 3z2", &vars(2)).unwrap_err();
        assert_eq!(err.position, 8);
        assert!(err.message.contains("implicit multiplication"));
    }

    #[test]
    fn unknown_variable_reported_with_position() {
        let err = parse_poly("z1 + w", &vars(2)).unwrap_err();
        assert_eq!(err.position, 5);
        assert!(err.message.contains("unknown variable `w`"));
    }

    #[test]
    fn non_integer_exponent_rejected() {
        let err = parse_poly("z1^(1/2)", &vars(1)).unwrap_err();
        assert!(err.message.contains("expected an integer exponent"));
        let err = parse_poly("z1^1/2", &vars(1)).unwrap_err();
        assert!(err.message.contains("non-integer exponent"));
    }

    #[test]
    fn negative_power_of_sum_rejected() {
        let err = parse_poly("(z1+z2)^-1", &vars(2)).unwrap_err();
        assert!(err.message.contains("single term"));
    }

    #[test]
    fn unbalanced_parens() {
        let err = parse_poly("(z1 + z2", &vars(2)).unwrap_err();
        assert!(err.message.contains("expected `)`"));
    }
}
