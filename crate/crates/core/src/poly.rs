//! Dense univariate polynomials over a local field.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::localfield::{Element, FieldSpec};

/// Coefficients low to high; trailing precise zeros are trimmed.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    spec: Arc<FieldSpec>,
    coeffs: Vec<Element>,
}

impl Poly {
    pub fn new(spec: &Arc<FieldSpec>, mut coeffs: Vec<Element>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { spec: spec.clone(), coeffs }
    }

    pub fn zero(spec: &Arc<FieldSpec>) -> Poly {
        Poly { spec: spec.clone(), coeffs: Vec::new() }
    }

    pub fn one(spec: &Arc<FieldSpec>) -> Poly {
        Poly::constant(Element::one(spec))
    }

    pub fn constant(c: Element) -> Poly {
        let spec = c.spec().clone();
        Poly::new(&spec, vec![c])
    }

    /// `c·T^k`.
    pub fn monomial(c: Element, k: usize) -> Poly {
        let spec = c.spec().clone();
        let mut coeffs = vec![Element::zero(&spec); k];
        coeffs.push(c);
        Poly::new(&spec, coeffs)
    }

    /// `T - c`.
    pub fn linear_root(c: &Element) -> Poly {
        let spec = c.spec().clone();
        Poly::new(&spec, vec![-c, Element::one(&spec)])
    }

    /// Product of `T - r` over the given roots.
    pub fn from_roots(spec: &Arc<FieldSpec>, roots: &[Element]) -> Poly {
        roots.iter().fold(Poly::one(spec), |acc, r| acc.mul(&Poly::linear_root(r)))
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `T^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> Element {
        self.coeffs.get(i).cloned().unwrap_or_else(|| Element::zero(&self.spec))
    }

    pub fn coeffs(&self) -> &[Element] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&Element> {
        self.coeffs.last()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| c.is_one())
    }

    /// Smallest coefficient valuation; `None` for the zero polynomial.
    pub fn min_valuation(&self) -> Option<i32> {
        self.coeffs.iter().filter_map(|c| c.valuation()).min()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n).map(|i| &self.coeff(i) + &other.coeff(i)).collect();
        Poly::new(&self.spec, c)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n).map(|i| &self.coeff(i) - &other.coeff(i)).collect();
        Poly::new(&self.spec, c)
    }

    pub fn neg(&self) -> Poly {
        Poly::new(&self.spec, self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(&self.spec);
        }
        let mut out = vec![Element::zero(&self.spec); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Poly::new(&self.spec, out)
    }

    pub fn scale(&self, c: &Element) -> Poly {
        Poly::new(&self.spec, self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Multiplies every coefficient by `π^k`.
    pub fn shift_coeffs(&self, k: i32) -> Poly {
        Poly::new(&self.spec, self.coeffs.iter().map(|a| a.shift(k)).collect())
    }

    /// `f(c·T)`.
    pub fn scale_variable(&self, c: &Element) -> Poly {
        let mut pw = Element::one(&self.spec);
        let mut out = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            out.push(a * &pw);
            pw = &pw * c;
        }
        Poly::new(&self.spec, out)
    }

    /// Same polynomial divided by its leading coefficient.
    pub fn monic(&self) -> Result<Poly> {
        let lc = self.leading().ok_or(Error::DivisionByZero)?;
        let inv = lc.inv()?;
        Ok(self.scale(&inv))
    }

    /// Euclidean division; the divisor's leading coefficient must be
    /// invertible to precision.
    pub fn divrem(&self, b: &Poly) -> Result<(Poly, Poly)> {
        let db = b.degree().ok_or(Error::DivisionByZero)?;
        let lc_inv = if b.is_monic() { None } else { Some(b.leading().unwrap().inv()?) };
        let mut r = self.coeffs.clone();
        if r.len() <= db {
            return Ok((Poly::zero(&self.spec), self.clone()));
        }
        let mut q = vec![Element::zero(&self.spec); r.len() - db];
        for k in (0..q.len()).rev() {
            let lead = r[k + db].clone();
            if lead.is_zero() {
                continue;
            }
            let c = match &lc_inv {
                None => lead,
                Some(inv) => &lead * inv,
            };
            for (j, bj) in b.coeffs.iter().enumerate() {
                r[k + j] = &r[k + j] - &(&c * bj);
            }
            r[k + db] = Element::zero(&self.spec);
            q[k] = c;
        }
        r.truncate(db);
        Ok((Poly::new(&self.spec, q), Poly::new(&self.spec, r)))
    }

    pub fn rem(&self, b: &Poly) -> Result<Poly> {
        Ok(self.divrem(b)?.1)
    }

    pub fn eval(&self, x: &Element) -> Element {
        let mut acc = Element::zero(&self.spec);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    /// Coefficientwise congruence modulo `π^k`.
    pub fn eq_mod(&self, other: &Poly, k: i32) -> bool {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n).all(|i| self.coeff(i).eq_mod(&other.coeff(i), k))
    }

    /// Text form in the variable `T`, highest degree first.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = fmt::write(&mut s, format_args!("{self}"));
        s
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mono = match i {
                0 => String::new(),
                1 => String::from("T"),
                _ => alloc::format!("T^{i}"),
            };
            if i == 0 {
                write!(f, "({c})")?;
            } else if c.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "({c})*{mono}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divrem_roundtrip() {
        let k = FieldSpec::padic(5, 12).unwrap();
        let e = |n: i64| Element::from_integer(&k, n);
        let a = Poly::new(&k, vec![e(3), e(-2), e(7), e(1), e(4)]);
        let b = Poly::new(&k, vec![e(5), e(2), e(1)]);
        let (q, r) = a.divrem(&b).unwrap();
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.degree().unwrap() < 2);
    }

    #[test]
    fn roots_vanish() {
        let k = FieldSpec::laurent(3, 10).unwrap();
        let x = Element::uniformizer(&k);
        let roots = [x.clone(), Element::one(&k), x.inv().unwrap()];
        let f = Poly::from_roots(&k, &roots);
        assert!(f.is_monic());
        for r in &roots {
            assert!(f.eval(r).is_negligible());
        }
    }

    #[test]
    fn variable_scaling() {
        let k = FieldSpec::padic(3, 10).unwrap();
        let p = Element::uniformizer(&k);
        let f = Poly::from_roots(&k, core::slice::from_ref(&p));
        let g = f.scale_variable(&p);
        // f(pT) = pT - p
        assert_eq!(g.coeff(1), p);
        assert_eq!(g.coeff(0), -&p);
    }
}
