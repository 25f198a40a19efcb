//! Expression grammar for spin polynomials.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('+' | '-') unary | power
//! power  := atom ('^' integer)?
//! atom   := number | 'S+' | 'S-' | 'Sz' | 'Sx' | 'Sy' | 'i' | '(' expr ')'
//! ```
//!
//! Numbers are integers or finite decimals; `p/q` is ordinary division.
//! Division is only allowed by a nonzero constant. Each spin letter stands
//! for the operator divided by `√N`.

use num::traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{gaussian, parse_rational, real, GaussianRational};
use crate::spin::{SpinPolynomial, SpinWord};

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Number(String),
    Ident(&'static str),
    Op(char),
    Open,
    Close,
}

fn tokenize(src: &str) -> Result<Vec<(usize, Token)>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '0'..='9' | '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                out.push((start, Token::Number(chars[start..i].iter().collect())));
            }
            'S' => {
                let ident = match chars.get(i + 1) {
                    Some('+') => "S+",
                    Some('-') => "S-",
                    Some('z') => "Sz",
                    Some('x') => "Sx",
                    Some('y') => "Sy",
                    _ => {
                        return Err(Error::Parse {
                            position: i,
                            message: "expected one of S+, S-, Sz, Sx, Sy".into(),
                        })
                    }
                };
                out.push((i, Token::Ident(ident)));
                i += 2;
            }
            'i' => {
                out.push((i, Token::Ident("i")));
                i += 1;
            }
            '+' | '-' | '*' | '/' | '^' => {
                out.push((i, Token::Op(c)));
                i += 1;
            }
            '(' => {
                out.push((i, Token::Open));
                i += 1;
            }
            ')' => {
                out.push((i, Token::Close));
                i += 1;
            }
            _ => {
                let word: String = chars[i..].iter().take_while(|c| c.is_alphanumeric()).collect();
                let shown = if word.is_empty() { c.to_string() } else { word };
                return Err(Error::Parse {
                    position: i,
                    message: format!("unknown identifier '{shown}'"),
                });
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            position: self.offset(),
            message: message.into(),
        })
    }

    fn expr(&mut self) -> Result<SpinPolynomial> {
        let mut acc = self.term()?;
        while let Some(Token::Op(op @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == '+' { acc + rhs } else { acc - rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<SpinPolynomial> {
        let mut acc = self.unary()?;
        while let Some(Token::Op(op @ ('*' | '/'))) = self.peek().cloned() {
            self.pos += 1;
            let at = self.offset();
            let rhs = self.unary()?;
            acc = if op == '*' {
                acc * rhs
            } else {
                let c = constant_value(&rhs).ok_or_else(|| Error::Parse {
                    position: at,
                    message: "division is only defined by a constant".into(),
                })?;
                if c.is_zero() {
                    return Err(Error::Domain("division by zero".into()));
                }
                acc.scale(&(GaussianRational::one() / c))
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<SpinPolynomial> {
        match self.peek() {
            Some(Token::Op('-')) => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(Token::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<SpinPolynomial> {
        let base = self.atom()?;
        if let Some(Token::Op('^')) = self.peek() {
            self.pos += 1;
            let exp = match self.peek().cloned() {
                Some(Token::Number(s)) if s.bytes().all(|b| b.is_ascii_digit()) => s,
                _ => return self.error("exponent must be a nonnegative integer"),
            };
            let exp: u32 = match exp.parse() {
                Ok(e) => e,
                Err(_) => return self.error("exponent too large"),
            };
            self.pos += 1;
            return Ok(base.pow(exp));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<SpinPolynomial> {
        let at = self.offset();
        match self.peek().cloned() {
            Some(Token::Number(s)) => {
                self.pos += 1;
                let r = parse_rational(&s).map_err(|_| Error::Parse {
                    position: at,
                    message: format!("invalid number '{s}'"),
                })?;
                Ok(SpinPolynomial::constant(real(r)))
            }
            Some(Token::Ident(id)) => {
                self.pos += 1;
                Ok(match id {
                    "S+" => SpinPolynomial::plus(),
                    "S-" => SpinPolynomial::minus(),
                    "Sz" => SpinPolynomial::sz(),
                    "Sx" => SpinPolynomial::sx(),
                    "Sy" => SpinPolynomial::sy(),
                    _ => SpinPolynomial::constant(gaussian(Zero::zero(), One::one())),
                })
            }
            Some(Token::Open) => {
                self.pos += 1;
                let inner = self.expr()?;
                match self.peek() {
                    Some(Token::Close) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => self.error("expected ')'"),
                }
            }
            Some(_) => self.error("expected a number, spin operator or '('"),
            None => self.error("unexpected end of expression"),
        }
    }
}

fn constant_value(p: &SpinPolynomial) -> Option<GaussianRational> {
    if p.terms().all(|(w, _)| w.is_empty()) {
        Some(p.coefficient(&SpinWord::identity()))
    } else {
        None
    }
}

pub fn parse_polynomial(expr: &str) -> Result<SpinPolynomial> {
    let tokens = tokenize(expr)?;
    if tokens.is_empty() {
        return Err(Error::Parse {
            position: 0,
            message: "empty expression".into(),
        });
    }
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: expr.chars().count(),
    };
    let poly = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return parser.error("unexpected trailing input");
    }
    Ok(poly)
}

/// Parses `1,2,3` style lists.
pub fn parse_list<T>(s: &str, item: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    s.split(',').map(|p| item(p.trim())).collect()
}

pub fn parse_count(s: &str) -> Result<u32> {
    s.parse::<u32>()
        .map_err(|_| Error::Domain(format!("'{s}' is not a nonnegative integer")))
}

/// Coefficients of a polynomial in `Sz` alone, lowest power first.
pub fn position_coefficients(p: &SpinPolynomial) -> Option<Vec<num::BigRational>> {
    use crate::spin::SpinLetter;
    let mut coeffs = Vec::new();
    for (w, c) in p.terms() {
        if w.count(SpinLetter::Z) != w.len() || !c.im.is_zero() {
            return None;
        }
        if coeffs.len() <= w.len() {
            coeffs.resize(w.len() + 1, num::BigRational::zero());
        }
        coeffs[w.len()] = c.re.clone();
    }
    Some(coeffs)
}
