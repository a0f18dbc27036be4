//! Fixed-precision arithmetic in the local fields Q_p and F_q((X)).
//!
//! Every element carries absolute precision `N`: it is known modulo `π^N`,
//! where the uniformizer `π` is `p` or `X`. An element that vanishes modulo
//! `π^N` is the distinguished *precise zero*; nothing smaller is ever
//! mistaken for a unit.

mod absvalue;
mod element;
pub mod residue;

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

pub use absvalue::{AbsValue, Rational};
pub use element::Element;
pub use residue::ResidueField;

use crate::error::{Error, Result};

/// Default absolute precision.
pub const DEFAULT_PRECISION: i32 = 32;
/// Largest accepted absolute precision.
pub const MAX_PRECISION: i32 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldKind {
    /// The p-adic numbers, uniformizer `p`.
    PAdic,
    /// Laurent series over F_q, uniformizer `X`.
    Laurent,
}

/// A local field together with the working precision.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    kind: FieldKind,
    residue: ResidueField,
    precision: i32,
}

pub(crate) fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn check_precision(precision: i32) -> Result<()> {
    if !(1..=MAX_PRECISION).contains(&precision) {
        return Err(Error::InvalidField(format!(
            "precision {precision} outside 1..={MAX_PRECISION}"
        )));
    }
    Ok(())
}

fn check_prime(p: u32) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::InvalidField(format!("{p} is not prime")));
    }
    if p >= 1 << 16 {
        return Err(Error::InvalidField(format!("prime {p} too large (limit 65536)")));
    }
    Ok(())
}

impl FieldSpec {
    /// Q_p at absolute precision `precision`.
    pub fn padic(p: u32, precision: i32) -> Result<Arc<FieldSpec>> {
        check_prime(p)?;
        check_precision(precision)?;
        Ok(Arc::new(FieldSpec { kind: FieldKind::PAdic, residue: ResidueField::prime(p), precision }))
    }

    /// F_p((X)) at absolute precision `precision`.
    pub fn laurent(p: u32, precision: i32) -> Result<Arc<FieldSpec>> {
        check_prime(p)?;
        check_precision(precision)?;
        Ok(Arc::new(FieldSpec { kind: FieldKind::Laurent, residue: ResidueField::prime(p), precision }))
    }

    /// F_q((X)) with F_q = F_p[t]/(modulus); `modulus` is monic, low to high.
    pub fn laurent_ext(p: u32, modulus: Vec<u32>, precision: i32) -> Result<Arc<FieldSpec>> {
        check_prime(p)?;
        check_precision(precision)?;
        if modulus.len() < 2 {
            return Err(Error::InvalidField("residue modulus must have degree >= 1".into()));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidField("modulus coefficients must lie in 0..p".into()));
        }
        if *modulus.last().unwrap() != 1 {
            return Err(Error::InvalidField("residue modulus must be monic".into()));
        }
        let f = modulus.len() - 1;
        if f == 1 {
            return Self::laurent(p, precision);
        }
        if (p as u64).checked_pow(f as u32).is_none_or(|q| q >= u32::MAX as u64) {
            return Err(Error::InvalidField("residue field too large".into()));
        }
        let prime_field = ResidueField::prime(p);
        if !residue::poly::is_irreducible(&prime_field, &modulus) {
            return Err(Error::InvalidField(format!("modulus {modulus:?} is reducible over F_{p}")));
        }
        Ok(Arc::new(FieldSpec {
            kind: FieldKind::Laurent,
            residue: ResidueField::extension(p, modulus),
            precision,
        }))
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }
    pub fn p(&self) -> u32 {
        self.residue.p()
    }
    pub fn residue_degree(&self) -> u32 {
        self.residue.degree()
    }
    /// Cardinality `q` of the residue field.
    pub fn q(&self) -> u64 {
        self.residue.order()
    }
    pub fn precision(&self) -> i32 {
        self.precision
    }
    pub fn residue(&self) -> &ResidueField {
        &self.residue
    }

    /// Same field, different precision.
    pub fn with_precision(&self, precision: i32) -> Result<Arc<FieldSpec>> {
        check_precision(precision)?;
        Ok(Arc::new(FieldSpec { precision, ..self.clone() }))
    }

    /// Valuations computed by higher-level routines must satisfy `|v| <= margin`.
    pub fn margin(&self) -> i32 {
        self.precision / 2
    }

    /// Errors if `v` violates the margin rule.
    pub fn check_margin(&self, v: i64, what: &str) -> Result<()> {
        if v.abs() > self.margin() as i64 {
            return Err(Error::PrecisionExhausted(format!(
                "{what}: valuation {v} exceeds the margin {} at precision {}",
                self.margin(),
                self.precision
            )));
        }
        Ok(())
    }

    /// Symbol used for the uniformizer in text output.
    pub fn uniformizer_symbol(&self) -> &'static str {
        match self.kind {
            FieldKind::PAdic => "p",
            FieldKind::Laurent => "X",
        }
    }

    pub fn describe(&self) -> String {
        match self.kind {
            FieldKind::PAdic => format!("Q_{}", self.p()),
            FieldKind::Laurent if self.residue_degree() == 1 => format!("F_{}((X))", self.p()),
            FieldKind::Laurent => format!("F_{}((X))", self.q()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_specs() {
        assert!(FieldSpec::padic(4, 10).is_err());
        assert!(FieldSpec::padic(3, 0).is_err());
        assert!(FieldSpec::laurent_ext(2, alloc::vec![1, 0, 1], 8).is_err());
        assert!(FieldSpec::laurent_ext(2, alloc::vec![1, 1, 2], 8).is_err());
        let f4 = FieldSpec::laurent_ext(2, alloc::vec![1, 1, 1], 8).unwrap();
        assert_eq!(f4.q(), 4);
        assert_eq!(f4.describe(), "F_4((X))");
    }
}
