use core::cmp::Ordering;
use core::fmt;

use num_rational::Ratio;
use num_traits::{One, Zero};

/// Exact rational numbers used for valuations and norm exponents.
pub type Rational = Ratio<i64>;

/// An absolute value `q^e` with exact rational exponent, or zero.
///
/// For field elements the exponent is `-v(x)`, an integer; rational
/// exponents arise from Newton-polygon slopes and adapted norms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AbsValue {
    Zero,
    Pow(Rational),
}

impl AbsValue {
    pub fn one() -> Self {
        AbsValue::Pow(Rational::zero())
    }

    pub fn from_exponent(e: Rational) -> Self {
        AbsValue::Pow(e)
    }

    pub fn from_int_exponent(e: i64) -> Self {
        AbsValue::Pow(Rational::from_integer(e))
    }

    /// Exponent `e` with value `q^e`; `None` for zero.
    pub fn exponent(&self) -> Option<Rational> {
        match self {
            AbsValue::Zero => None,
            AbsValue::Pow(e) => Some(*e),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, AbsValue::Zero)
    }

    pub fn mul(self, other: AbsValue) -> AbsValue {
        match (self, other) {
            (AbsValue::Pow(a), AbsValue::Pow(b)) => AbsValue::Pow(a + b),
            _ => AbsValue::Zero,
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(self) -> Option<AbsValue> {
        self.exponent().map(|e| AbsValue::Pow(-e))
    }

    pub fn powi(self, k: i64) -> AbsValue {
        match self {
            AbsValue::Zero if k > 0 => AbsValue::Zero,
            AbsValue::Zero => AbsValue::Zero,
            AbsValue::Pow(e) => AbsValue::Pow(e * Rational::from_integer(k)),
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self, AbsValue::Pow(e) if e.is_zero())
    }

    /// Numeric value `q^e` as `(numerator, denominator)` when the exponent is
    /// an integer and the result fits.
    pub fn as_fraction(&self, q: u64) -> Option<(u128, u128)> {
        let e = self.exponent()?;
        if !e.is_integer() {
            return None;
        }
        let n = *e.numer();
        let pow = (q as u128).checked_pow(n.unsigned_abs() as u32)?;
        if n >= 0 {
            Some((pow, 1))
        } else {
            Some((1, pow))
        }
    }
}

impl PartialOrd for AbsValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for AbsValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (AbsValue::Zero, AbsValue::Zero) => Ordering::Equal,
            (AbsValue::Zero, _) => Ordering::Less,
            (_, AbsValue::Zero) => Ordering::Greater,
            (AbsValue::Pow(a), AbsValue::Pow(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for AbsValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AbsValue::Zero => write!(f, "0"),
            AbsValue::Pow(e) if e.is_zero() => write!(f, "1"),
            AbsValue::Pow(e) if e.is_one() => write!(f, "q"),
            AbsValue::Pow(e) if e.is_integer() => write!(f, "q^{}", e.numer()),
            AbsValue::Pow(e) => write!(f, "q^({}/{})", e.numer(), e.denom()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_and_arithmetic() {
        let a = AbsValue::from_int_exponent(-2);
        let b = AbsValue::from_exponent(Rational::new(1, 2));
        assert!(AbsValue::Zero < a && a < AbsValue::one() && AbsValue::one() < b);
        assert_eq!(a.mul(b), AbsValue::from_exponent(Rational::new(-3, 2)));
        assert_eq!(a.inv(), Some(AbsValue::from_int_exponent(2)));
        assert_eq!(a.as_fraction(3), Some((1, 9)));
        assert_eq!(alloc::format!("{b}"), "q^(1/2)");
    }
}
