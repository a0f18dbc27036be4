//! Text syntax for field elements.
//!
//! ```text
//! expr    := ["+" | "-"] term (("+" | "-") term)*
//! term    := unary (("*" | "/") unary)*
//! unary   := "-" unary | power
//! power   := atom ["^" ["-"] INT | "^" "(" ["-"] INT ")"]
//! atom    := INT | "p" | "X" | "t" | "(" expr ")" | "O" "(" expr ")" | "..."
//! ```
//!
//! `p` is the uniformizer of Q_p, `X` the one of F_q((X)) and `t` the
//! generator of F_q over F_p (only when q > p). `O(...)` and `...` stand for
//! the unknown tail and evaluate to zero. Integers are reduced into the
//! field, so `5` means `1` in F_2((X)).

use std::fmt;
use std::sync::Arc;

use locdyn_core::localfield::MAX_PRECISION;
use locdyn_core::{Element, FieldKind, FieldSpec, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyntaxError {
    /// Byte offset inside the parsed text.
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (at character {})", self.message, self.offset + 1)
    }
}

impl std::error::Error for SyntaxError {}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(i64),
    Sym(char),
    Ellipsis,
    Op(char),
    Open,
    Close,
}

fn lex(s: &str) -> Result<Vec<(usize, Tok)>, SyntaxError> {
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n = s[start..i].parse::<i64>().map_err(|_| SyntaxError {
                    offset: start,
                    message: format!("integer {} is too large", &s[start..i]),
                })?;
                out.push((start, Tok::Int(n)));
            }
            '.' if s[i..].starts_with("...") => {
                out.push((i, Tok::Ellipsis));
                i += 3;
            }
            'p' | 'X' | 't' | 'O' => {
                out.push((i, Tok::Sym(c)));
                i += 1;
            }
            '+' | '-' | '*' | '/' | '^' => {
                out.push((i, Tok::Op(c)));
                i += 1;
            }
            '(' => {
                out.push((i, Tok::Open));
                i += 1;
            }
            ')' => {
                out.push((i, Tok::Close));
                i += 1;
            }
            _ => {
                let ch = s[i..].chars().next().unwrap_or('?');
                return Err(SyntaxError { offset: i, message: format!("unexpected character '{ch}'") });
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    spec: &'a Arc<FieldSpec>,
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

type PResult<T> = Result<T, SyntaxError>;

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn fail<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(SyntaxError { offset: self.offset(), message: message.into() })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn field_error<T>(&self, at: usize, e: locdyn_core::Error) -> PResult<T> {
        Err(SyntaxError { offset: at, message: e.to_string() })
    }

    fn expr(&mut self) -> PResult<Element> {
        let negate = if self.eat(&Tok::Op('-')) {
            true
        } else {
            self.eat(&Tok::Op('+'));
            false
        };
        let first = self.term()?;
        let mut acc = if negate { -first } else { first };
        loop {
            if self.eat(&Tok::Op('+')) {
                acc = &acc + &self.term()?;
            } else if self.eat(&Tok::Op('-')) {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> PResult<Element> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(&Tok::Op('*')) {
                acc = &acc * &self.unary()?;
            } else if self.peek() == Some(&Tok::Op('/')) {
                let at = self.offset();
                self.pos += 1;
                let rhs = self.unary()?;
                acc = match acc.checked_div(&rhs) {
                    Ok(v) => v,
                    Err(e) => return self.field_error(at, e),
                };
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> PResult<Element> {
        if self.eat(&Tok::Op('-')) {
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn exponent(&mut self) -> PResult<i64> {
        let paren = self.eat(&Tok::Open);
        let neg = self.eat(&Tok::Op('-'));
        let Some(Tok::Int(n)) = self.peek().cloned() else {
            return self.fail("expected an integer exponent");
        };
        self.pos += 1;
        if paren && !self.eat(&Tok::Close) {
            return self.fail("expected ')' after the exponent");
        }
        Ok(if neg { -n } else { n })
    }

    fn power(&mut self) -> PResult<Element> {
        let start = self.offset();
        let (base, uniformizer) = self.atom()?;
        if !self.eat(&Tok::Op('^')) {
            return Ok(base);
        }
        let e = self.exponent()?;
        if uniformizer {
            // exact, and allowed even where the inverse would lose digits
            let k = i32::try_from(e).map_err(|_| SyntaxError { offset: start, message: "exponent too large".into() })?;
            return Ok(Element::uniformizer_pow(self.spec, k));
        }
        match base.pow(e) {
            Ok(v) => Ok(v),
            Err(err) => self.field_error(start, err),
        }
    }

    /// The flag marks a bare uniformizer symbol.
    fn atom(&mut self) -> PResult<(Element, bool)> {
        let at = self.offset();
        let Some(tok) = self.peek().cloned() else {
            return self.fail("unexpected end of input");
        };
        self.pos += 1;
        match tok {
            Tok::Int(n) => Ok((Element::from_integer(self.spec, n), false)),
            Tok::Ellipsis => Ok((Element::zero(self.spec), false)),
            Tok::Open => {
                let v = self.expr()?;
                if !self.eat(&Tok::Close) {
                    return self.fail("expected ')'");
                }
                Ok((v, false))
            }
            Tok::Sym('p') => match self.spec.kind() {
                FieldKind::PAdic => Ok((Element::uniformizer(self.spec), true)),
                FieldKind::Laurent => Err(SyntaxError {
                    offset: at,
                    message: "'p' is the uniformizer of Q_p; use 'X' in a Laurent field".into(),
                }),
            },
            Tok::Sym('X') => match self.spec.kind() {
                FieldKind::Laurent => Ok((Element::uniformizer(self.spec), true)),
                FieldKind::PAdic => Err(SyntaxError {
                    offset: at,
                    message: "'X' is the uniformizer of F_q((X)); use 'p' in Q_p".into(),
                }),
            },
            Tok::Sym('t') => {
                if self.spec.kind() != FieldKind::Laurent || self.spec.residue_degree() == 1 {
                    return Err(SyntaxError { offset: at, message: "'t' needs a residue field larger than F_p".into() });
                }
                let g = self.spec.residue().generator();
                Ok((Element::residue_constant(self.spec, g), false))
            }
            Tok::Sym('O') => {
                if !self.eat(&Tok::Open) {
                    return self.fail("expected '(' after 'O'");
                }
                self.expr()?;
                if !self.eat(&Tok::Close) {
                    return self.fail("expected ')'");
                }
                Ok((Element::zero(self.spec), false))
            }
            Tok::Sym(c) => Err(SyntaxError { offset: at, message: format!("unexpected symbol '{c}'") }),
            Tok::Op(c) => Err(SyntaxError { offset: at, message: format!("unexpected operator '{c}'") }),
            Tok::Close => Err(SyntaxError { offset: at, message: "unexpected ')'".into() }),
        }
    }
}

/// Parses an element of the given field.
pub fn parse_element(spec: &Arc<FieldSpec>, text: &str) -> Result<Element, SyntaxError> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(SyntaxError { offset: 0, message: "empty element".into() });
    }
    // negative powers shift digits out of the window, so evaluate with slack
    let wide = spec.with_precision((spec.precision() + 64).min(MAX_PRECISION)).unwrap_or_else(|_| spec.clone());
    let mut p = Parser { spec: &wide, toks, pos: 0, end: text.len() };
    let v = p.expr()?;
    if p.pos != p.toks.len() {
        return p.fail("trailing input");
    }
    Ok(v.with_spec(spec))
}

/// Parses `a`, `-a` or `a/b` with integers `a, b`.
pub fn parse_rational(text: &str) -> Result<Rational, SyntaxError> {
    let t = text.trim();
    let bad = || SyntaxError { offset: 0, message: format!("'{t}' is not a rational number") };
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.trim().parse::<i64>().map_err(|_| bad())?, b.trim().parse::<i64>().map_err(|_| bad())?),
        None => (t.parse::<i64>().map_err(|_| bad())?, 1),
    };
    if den == 0 {
        return Err(SyntaxError { offset: 0, message: "zero denominator".into() });
    }
    Ok(Rational::new(num, den))
}

/// Canonical exact text of a rational: `n` or `n/d`.
pub fn rational_text(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q3() -> Arc<FieldSpec> {
        FieldSpec::padic(3, 20).unwrap()
    }

    #[test]
    fn integers_and_uniformizers() {
        let k = q3();
        assert_eq!(parse_element(&k, "5").unwrap(), Element::from_integer(&k, 5));
        assert_eq!(parse_element(&k, "p^-2").unwrap(), Element::uniformizer_pow(&k, -2));
        assert_eq!(parse_element(&k, "p^(-2)").unwrap(), Element::uniformizer_pow(&k, -2));
        assert_eq!(parse_element(&k, "-p").unwrap(), -Element::uniformizer(&k));
    }

    #[test]
    fn half_in_q3() {
        let k = q3();
        let h = parse_element(&k, "1/2").unwrap();
        assert!((&h * &Element::from_integer(&k, 2)).eq_mod(&Element::one(&k), 20));
    }

    #[test]
    fn expansions_with_tails() {
        let k = q3();
        let a = parse_element(&k, "p^3 * (2 + 1*p + ...)").unwrap();
        assert_eq!(a, Element::from_integer(&k, 5).shift(3));
        let b = parse_element(&k, "1 + p + O(p^20)").unwrap();
        assert_eq!(b, Element::from_integer(&k, 4));
    }

    #[test]
    fn laurent_syntax() {
        let k = FieldSpec::laurent(2, 16).unwrap();
        let a = parse_element(&k, "X^-1*(1 + X^2)").unwrap();
        let b = &Element::uniformizer_pow(&k, -1) + &Element::uniformizer(&k);
        assert_eq!(a, b);
        assert!(parse_element(&k, "p").is_err());
        assert!(parse_element(&k, "t").is_err());
        let k4 = FieldSpec::laurent_ext(2, vec![1, 1, 1], 16).unwrap();
        let t = parse_element(&k4, "t").unwrap();
        assert_eq!(parse_element(&k4, "t^2 + t + 1").unwrap(), Element::zero(&k4));
        assert!(!t.is_zero());
    }

    #[test]
    fn printed_forms_read_back() {
        for k in [q3(), FieldSpec::laurent(3, 16).unwrap(), FieldSpec::laurent_ext(2, vec![1, 1, 1], 16).unwrap()] {
            let mut x = Element::from_integer(&k, 7).shift(-2);
            for _ in 0..6 {
                x = &(&x * &x) + &Element::from_integer(&k, -1);
                let plain = parse_element(&k, &x.to_string()).unwrap();
                let full = parse_element(&k, &x.to_canonical_string()).unwrap();
                assert_eq!(plain, x);
                assert_eq!(full, x);
            }
        }
    }

    #[test]
    fn errors_point_at_the_problem() {
        let k = q3();
        let e = parse_element(&k, "1 + $").unwrap_err();
        assert_eq!(e.offset, 4);
        assert!(parse_element(&k, "(1 + p").is_err());
        assert!(parse_element(&k, "").is_err());
        assert!(parse_element(&k, "1 2").is_err());
        assert!(parse_element(&k, "1/0").is_err());
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("-3/6").unwrap(), Rational::new(-1, 2));
        assert_eq!(parse_rational("4").unwrap(), Rational::from_integer(4));
        assert!(parse_rational("1/0").is_err());
        assert_eq!(rational_text(&Rational::new(3, -6)), "-1/2");
    }
}
