use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::hash::{Hash, Hasher};
use core::ops::{Add, Mul, Neg, Sub};

use rand::Rng;

use super::{AbsValue, FieldKind, FieldSpec, ResidueField};
use crate::error::{Error, Result};

/// A field element `π^v · (d_0 + d_1 π + ... )` known modulo `π^N`.
///
/// `digits[i]` is the residue coefficient of `π^(v+i)`, `digits[0] != 0` and
/// `digits.len() == N - v`. `None` is the precise zero.
#[derive(Clone)]
pub struct Element {
    spec: Arc<FieldSpec>,
    repr: Option<Unit>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Unit {
    v: i32,
    digits: Vec<u32>,
}

// ---------------------------------------------------------------------------
// digit kernels: sequences starting at exponent 0, truncated to `len` digits

fn add_digits(kind: FieldKind, k: &ResidueField, a: &[u32], b: &[u32], len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    match kind {
        FieldKind::PAdic => {
            let p = k.p() as u64;
            let mut carry = 0u64;
            for i in 0..len {
                let s = *a.get(i).unwrap_or(&0) as u64 + *b.get(i).unwrap_or(&0) as u64 + carry;
                out.push((s % p) as u32);
                carry = s / p;
            }
        }
        FieldKind::Laurent => {
            for i in 0..len {
                out.push(k.add(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0)));
            }
        }
    }
    out
}

fn neg_digits(kind: FieldKind, k: &ResidueField, a: &[u32], len: usize) -> Vec<u32> {
    match kind {
        FieldKind::PAdic => {
            let p = k.p();
            let mut out = vec![0u32; len];
            let first = a.iter().take(len).position(|&d| d != 0);
            if let Some(i0) = first {
                out[i0] = p - a[i0];
                for (i, o) in out.iter_mut().enumerate().skip(i0 + 1) {
                    *o = p - 1 - *a.get(i).unwrap_or(&0);
                }
            }
            out
        }
        FieldKind::Laurent => (0..len).map(|i| k.neg(*a.get(i).unwrap_or(&0))).collect(),
    }
}

fn mul_digits(kind: FieldKind, k: &ResidueField, a: &[u32], b: &[u32], len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    let la = a.len().min(len);
    let lb = b.len().min(len);
    match kind {
        FieldKind::PAdic => {
            let p = k.p() as u64;
            let mut carry = 0u64;
            for n in 0..len {
                let mut acc = carry;
                let lo = n.saturating_sub(lb.saturating_sub(1));
                let hi = n.min(la.saturating_sub(1));
                if la > 0 && lb > 0 && lo <= hi {
                    for i in lo..=hi {
                        acc += a[i] as u64 * b[n - i] as u64;
                    }
                }
                out.push((acc % p) as u32);
                carry = acc / p;
            }
        }
        FieldKind::Laurent if k.degree() == 1 => {
            let p = k.p() as u64;
            for n in 0..len {
                let mut acc = 0u64;
                let lo = n.saturating_sub(lb.saturating_sub(1));
                let hi = n.min(la.saturating_sub(1));
                if la > 0 && lb > 0 && lo <= hi {
                    for i in lo..=hi {
                        acc += a[i] as u64 * b[n - i] as u64;
                    }
                }
                out.push((acc % p) as u32);
            }
        }
        FieldKind::Laurent => {
            for n in 0..len {
                let mut acc = 0u32;
                let lo = n.saturating_sub(lb.saturating_sub(1));
                let hi = n.min(la.saturating_sub(1));
                if la > 0 && lb > 0 && lo <= hi {
                    for i in lo..=hi {
                        if a[i] != 0 && b[n - i] != 0 {
                            acc = k.add(acc, k.mul(a[i], b[n - i]));
                        }
                    }
                }
                out.push(acc);
            }
        }
    }
    out
}

/// Inverse of a unit digit sequence (`a[0] != 0`) by Newton iteration.
fn inv_digits(kind: FieldKind, k: &ResidueField, a: &[u32], len: usize) -> Vec<u32> {
    let mut w = vec![k.inv(a[0])];
    let mut prec = 1usize;
    let one = [1u32];
    while prec < len {
        let next = (2 * prec).min(len);
        let aw = mul_digits(kind, k, a, &w, next);
        let defect = add_digits(kind, k, &one, &neg_digits(kind, k, &aw, next), next);
        let corr = mul_digits(kind, k, &w, &defect, next);
        w = add_digits(kind, k, &w, &corr, next);
        prec = next;
    }
    w.truncate(len);
    w
}

// ---------------------------------------------------------------------------

impl Element {
    /// Builds an element from `Σ digits[i] π^(start+i)`, normalizing and
    /// truncating at the precision.
    fn from_window(spec: &Arc<FieldSpec>, start: i32, digits: Vec<u32>) -> Element {
        let n = spec.precision();
        let avail = (n as i64 - start as i64).max(0) as usize;
        let limit = digits.len().min(avail);
        let Some(z) = digits[..limit].iter().position(|&d| d != 0) else {
            return Element::zero(spec);
        };
        let v = start + z as i32;
        let want = (n - v) as usize;
        let mut ds: Vec<u32> = digits[z..limit].to_vec();
        ds.resize(want, 0);
        Element { spec: spec.clone(), repr: Some(Unit { v, digits: ds }) }
    }

    pub fn zero(spec: &Arc<FieldSpec>) -> Element {
        Element { spec: spec.clone(), repr: None }
    }

    pub fn one(spec: &Arc<FieldSpec>) -> Element {
        Element::from_window(spec, 0, vec![1])
    }

    /// The uniformizer `p` or `X`.
    pub fn uniformizer(spec: &Arc<FieldSpec>) -> Element {
        Element::from_window(spec, 1, vec![1])
    }

    /// `π^k` for any integer `k`.
    pub fn uniformizer_pow(spec: &Arc<FieldSpec>, k: i32) -> Element {
        Element::from_window(spec, k, vec![1])
    }

    /// A constant of the residue field, given by its code (Teichmüller-free
    /// digit lift for Q_p).
    pub fn residue_constant(spec: &Arc<FieldSpec>, code: u32) -> Element {
        Element::from_window(spec, 0, vec![code])
    }

    pub fn from_integer(spec: &Arc<FieldSpec>, n: i64) -> Element {
        match spec.kind() {
            FieldKind::Laurent => {
                let c = spec.residue().from_int(n);
                Element::from_window(spec, 0, vec![c])
            }
            FieldKind::PAdic => {
                let p = spec.p() as u64;
                let mut m = n.unsigned_abs();
                let mut digits = Vec::new();
                while m > 0 && digits.len() < spec.precision().max(0) as usize {
                    digits.push((m % p) as u32);
                    m /= p;
                }
                let pos = Element::from_window(spec, 0, digits);
                if n < 0 {
                    -pos
                } else {
                    pos
                }
            }
        }
    }

    pub fn from_rational(spec: &Arc<FieldSpec>, num: i64, den: i64) -> Result<Element> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        let d = Element::from_integer(spec, den);
        Element::from_integer(spec, num).checked_div(&d)
    }

    /// `π^v · Σ coeffs[i] π^i`. Coefficients are residue codes (`< q`), and
    /// for Q_p plain digits (`< p`).
    pub fn from_coefficients(spec: &Arc<FieldSpec>, v: i32, coeffs: &[u32]) -> Result<Element> {
        let bound = match spec.kind() {
            FieldKind::PAdic => spec.p() as u64,
            FieldKind::Laurent => spec.q(),
        };
        if let Some(bad) = coeffs.iter().find(|&&c| c as u64 >= bound) {
            return Err(Error::Malformed(format!("coefficient {bad} is not below {bound}")));
        }
        Ok(Element::from_window(spec, v, coeffs.to_vec()))
    }

    /// Random element with valuation at least `vmin` (digits uniform).
    pub fn random<R: Rng + ?Sized>(spec: &Arc<FieldSpec>, vmin: i32, rng: &mut R) -> Element {
        let len = (spec.precision() - vmin).max(0) as usize;
        let bound = match spec.kind() {
            FieldKind::PAdic => spec.p(),
            FieldKind::Laurent => spec.q() as u32,
        };
        let digits = (0..len).map(|_| rng.gen_range(0..bound)).collect();
        Element::from_window(spec, vmin, digits)
    }

    /// Random element of valuation exactly `v`.
    pub fn random_with_valuation<R: Rng + ?Sized>(spec: &Arc<FieldSpec>, v: i32, rng: &mut R) -> Element {
        let bound = match spec.kind() {
            FieldKind::PAdic => spec.p(),
            FieldKind::Laurent => spec.q() as u32,
        };
        let len = (spec.precision() - v).max(0) as usize;
        let mut digits: Vec<u32> = (0..len).map(|_| rng.gen_range(0..bound)).collect();
        if let Some(d) = digits.first_mut() {
            *d = rng.gen_range(1..bound);
        }
        Element::from_window(spec, v, digits)
    }

    /// Re-reads the known digits in another precision of the same field.
    /// Missing digits become zero.
    pub fn with_spec(&self, spec: &Arc<FieldSpec>) -> Element {
        match &self.repr {
            None => Element::zero(spec),
            Some(u) => Element::from_window(spec, u.v, u.digits.clone()),
        }
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    pub fn same_field(&self, other: &Element) -> bool {
        Arc::ptr_eq(&self.spec, &other.spec) || *self.spec == *other.spec
    }

    fn check_field(&self, other: &Element) -> Result<()> {
        if self.same_field(other) {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    /// Zero modulo `π^N`.
    pub fn is_zero(&self) -> bool {
        self.repr.is_none()
    }

    pub fn is_one(&self) -> bool {
        matches!(&self.repr, Some(u) if u.v == 0 && u.digits[0] == 1 && u.digits[1..].iter().all(|&d| d == 0))
    }

    /// Valuation, `None` for the precise zero.
    pub fn valuation(&self) -> Option<i32> {
        self.repr.as_ref().map(|u| u.v)
    }

    /// Valuation with the precise zero mapped to the precision `N`.
    pub fn valuation_or_precision(&self) -> i32 {
        self.valuation().unwrap_or(self.spec.precision())
    }

    /// Natural absolute value `q^(-v)`.
    pub fn abs(&self) -> AbsValue {
        match self.valuation() {
            None => AbsValue::Zero,
            Some(v) => AbsValue::from_int_exponent(-(v as i64)),
        }
    }

    pub fn is_integral(&self) -> bool {
        self.valuation().is_none_or(|v| v >= 0)
    }

    /// Coefficient of `π^k`.
    pub fn coefficient(&self, k: i32) -> u32 {
        match &self.repr {
            Some(u) if k >= u.v => *u.digits.get((k - u.v) as usize).unwrap_or(&0),
            _ => 0,
        }
    }

    /// `(v, digits)` or `None` for zero.
    pub fn coefficients(&self) -> Option<(i32, &[u32])> {
        self.repr.as_ref().map(|u| (u.v, u.digits.as_slice()))
    }

    fn window(&self, start: i32, len: usize) -> Vec<u32> {
        let mut out = vec![0u32; len];
        if let Some(u) = &self.repr {
            let off = (u.v - start) as usize;
            for (i, &d) in u.digits.iter().enumerate() {
                if off + i < len {
                    out[off + i] = d;
                }
            }
        }
        out
    }

    pub fn checked_add(&self, other: &Element) -> Result<Element> {
        self.check_field(other)?;
        Ok(self.add_unchecked(other))
    }

    fn add_unchecked(&self, other: &Element) -> Element {
        let (a, b) = match (&self.repr, &other.repr) {
            (None, _) => return other.clone(),
            (_, None) => return self.clone(),
            (Some(a), Some(b)) => (a, b),
        };
        let start = a.v.min(b.v);
        let len = (self.spec.precision() - start) as usize;
        let wa = self.window(start, len);
        let wb = other.window(start, len);
        let s = add_digits(self.spec.kind(), self.spec.residue(), &wa, &wb, len);
        Element::from_window(&self.spec, start, s)
    }

    pub fn checked_sub(&self, other: &Element) -> Result<Element> {
        self.check_field(other)?;
        Ok(self.add_unchecked(&other.neg_ref()))
    }

    fn neg_ref(&self) -> Element {
        match &self.repr {
            None => self.clone(),
            Some(u) => {
                let d = neg_digits(self.spec.kind(), self.spec.residue(), &u.digits, u.digits.len());
                Element::from_window(&self.spec, u.v, d)
            }
        }
    }

    pub fn checked_mul(&self, other: &Element) -> Result<Element> {
        self.check_field(other)?;
        if let (Some(a), Some(b)) = (&self.repr, &other.repr) {
            let v = a.v as i64 + b.v as i64;
            if v <= -(self.spec.precision() as i64) {
                return Err(Error::PrecisionWindow { valuation: v, precision: self.spec.precision() });
            }
        }
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Element) -> Element {
        let (a, b) = match (&self.repr, &other.repr) {
            (Some(a), Some(b)) => (a, b),
            _ => return Element::zero(&self.spec),
        };
        let v = a.v + b.v;
        let n = self.spec.precision();
        if v >= n {
            return Element::zero(&self.spec);
        }
        let len = (n - v) as usize;
        let d = mul_digits(self.spec.kind(), self.spec.residue(), &a.digits, &b.digits, len);
        Element::from_window(&self.spec, v, d)
    }

    /// Multiplicative inverse. The unit part is inverted to the relative
    /// precision `N + v` needed for absolute precision `N`.
    pub fn inv(&self) -> Result<Element> {
        let u = self.repr.as_ref().ok_or(Error::DivisionByZero)?;
        let n = self.spec.precision();
        if u.v >= n || -(u.v as i64) <= -(n as i64) {
            return Err(Error::PrecisionWindow { valuation: -(u.v as i64), precision: n });
        }
        let len = (n + u.v) as usize;
        let d = inv_digits(self.spec.kind(), self.spec.residue(), &u.digits, len);
        Ok(Element::from_window(&self.spec, -u.v, d))
    }

    pub fn checked_div(&self, other: &Element) -> Result<Element> {
        self.check_field(other)?;
        let inv = other.inv()?;
        if self.is_zero() {
            return Ok(self.clone());
        }
        Ok(self.mul_unchecked(&inv))
    }

    /// Integer power; negative exponents invert first.
    pub fn pow(&self, e: i64) -> Result<Element> {
        let mut base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Element::one(&self.spec);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        Ok(acc)
    }

    /// Multiplication by `π^k`.
    pub fn shift(&self, k: i32) -> Element {
        match &self.repr {
            None => self.clone(),
            Some(u) => Element::from_window(&self.spec, u.v + k, u.digits.clone()),
        }
    }

    /// Splits into the part with exponents `< k` and the part with exponents
    /// `>= k`; both parts are exact digit truncations.
    pub fn split_at(&self, k: i32) -> (Element, Element) {
        match &self.repr {
            None => (self.clone(), self.clone()),
            Some(u) if u.v >= k => (Element::zero(&self.spec), self.clone()),
            Some(u) => {
                let cut = ((k - u.v) as usize).min(u.digits.len());
                let low = Element::from_window(&self.spec, u.v, u.digits[..cut].to_vec());
                let high = Element::from_window(&self.spec, u.v + cut as i32, u.digits[cut..].to_vec());
                (low, high)
            }
        }
    }

    /// Residue class modulo `π` of an integral element.
    pub fn residue(&self) -> u32 {
        self.coefficient(0)
    }

    /// `v(self - other) >= k`.
    pub fn eq_mod(&self, other: &Element, k: i32) -> bool {
        (self - other).valuation().is_none_or(|v| v >= k)
    }

    /// Treats anything of valuation at least `N - margin` as zero.
    pub fn is_negligible(&self) -> bool {
        self.valuation().is_none_or(|v| v >= self.spec.precision() - self.spec.margin())
    }

    /// For Q_p: the integer `n` with `self = n` when `|n| < p^(N/2)`.
    pub fn as_small_integer(&self) -> Option<i64> {
        if self.spec.kind() != FieldKind::PAdic {
            return None;
        }
        let u = match &self.repr {
            None => return Some(0),
            Some(u) => u,
        };
        if u.v < 0 {
            return None;
        }
        let p = self.spec.p() as i64;
        let n = self.spec.precision();
        let half = (n / 2).max(1);
        let top = |k: i32| self.coefficient(k);
        let positive = (half..n).all(|k| top(k) == 0);
        let negative = (half..n).all(|k| top(k) as i64 == p - 1);
        let mut acc: i64 = 0;
        let mut place: i64 = 1;
        if positive {
            for k in 0..half {
                acc = acc.checked_add((top(k) as i64).checked_mul(place)?)?;
                place = place.checked_mul(p)?;
            }
            Some(acc)
        } else if negative {
            let neg = -self;
            neg.as_small_integer().map(|m| -m)
        } else {
            None
        }
    }

    /// Canonical text form `Σ c·π^k`, accepted back by the text parser.
    /// True if `n * p^v` agrees with `self` on every known digit.
    fn is_small_multiple(&self, n: i64, v: i32) -> bool {
        let wide = match self.spec.with_precision(self.spec.precision() - v) {
            Ok(w) => w,
            Err(_) => return false,
        };
        Element::from_integer(&wide, n).shift(v).with_spec(&self.spec) == *self
    }

    pub fn to_canonical_string(&self) -> String {
        let mut s = String::new();
        let _ = fmt::write(&mut s, format_args!("{}", Expansion(self)));
        s
    }
}

struct Expansion<'a>(&'a Element);

fn fmt_residue(f: &mut fmt::Formatter<'_>, spec: &FieldSpec, c: u32) -> fmt::Result {
    let k = spec.residue();
    if k.degree() == 1 {
        return write!(f, "{c}");
    }
    let ds = k.digits(c);
    let terms: Vec<String> = ds
        .iter()
        .enumerate()
        .filter(|(_, &d)| d != 0)
        .map(|(i, &d)| match (i, d) {
            (0, d) => format!("{d}"),
            (1, 1) => String::from("t"),
            (1, d) => format!("{d}*t"),
            (i, 1) => format!("t^{i}"),
            (i, d) => format!("{d}*t^{i}"),
        })
        .collect();
    if terms.len() == 1 {
        write!(f, "{}", terms[0])
    } else {
        write!(f, "(")?;
        for (i, t) in terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for Expansion<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = self.0;
        let sym = e.spec.uniformizer_symbol();
        let Some(u) = &e.repr else {
            return write!(f, "0");
        };
        let mut first = true;
        for (i, &d) in u.digits.iter().enumerate() {
            if d == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let k = u.v + i as i32;
            let unit_coeff = d == 1;
            if k == 0 {
                fmt_residue(f, &e.spec, d)?;
            } else {
                if !unit_coeff {
                    fmt_residue(f, &e.spec, d)?;
                    write!(f, "*")?;
                }
                if k == 1 {
                    write!(f, "{sym}")?;
                } else {
                    write!(f, "{sym}^{k}")?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for Element {
    /// Compact form: small p-adic integers times a power of `p` are printed
    /// as such; everything else as the full expansion.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(v) = self.valuation() {
            if self.spec.kind() == FieldKind::PAdic {
                let unit = self.shift(-v);
                if let Some(n) = unit.as_small_integer().filter(|&n| v >= 0 || self.is_small_multiple(n, v)) {
                    return match (v, n) {
                        (0, n) => write!(f, "{n}"),
                        (v, 1) => write!(f, "p^{v}"),
                        (v, -1) => write!(f, "-p^{v}"),
                        (v, n) => write!(f, "{n}*p^{v}"),
                    };
                }
            }
        }
        write!(f, "{}", Expansion(self))?;
        if f.alternate() {
            write!(f, " + O({}^{})", self.spec.uniformizer_symbol(), self.spec.precision())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self)
    }
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        self.same_field(other) && self.repr == other.repr
    }
}

impl Eq for Element {}

impl Hash for Element {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.repr.hash(state);
    }
}

impl PartialOrd for Element {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Arbitrary total order (for use as map keys); not compatible with size.
impl Ord for Element {
    fn cmp(&self, other: &Self) -> Ordering {
        self.repr.cmp(&other.repr)
    }
}

// Operator overloads panic on field mismatch; use the `checked_*` methods
// where that is a recoverable condition.

impl Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        assert!(self.same_field(rhs), "field mismatch in addition");
        self.add_unchecked(rhs)
    }
}

impl Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        assert!(self.same_field(rhs), "field mismatch in subtraction");
        self.add_unchecked(&rhs.neg_ref())
    }
}

impl Mul for &Element {
    type Output = Element;
    fn mul(self, rhs: &Element) -> Element {
        assert!(self.same_field(rhs), "field mismatch in multiplication");
        self.mul_unchecked(rhs)
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.neg_ref()
    }
}

impl Neg for Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.neg_ref()
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Element {
            type Output = Element;
            fn $m(self, rhs: Element) -> Element {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Element> for Element {
            type Output = Element;
            fn $m(self, rhs: &Element) -> Element {
                (&self).$m(rhs)
            }
        }
        impl $tr<Element> for &Element {
            type Output = Element;
            fn $m(self, rhs: Element) -> Element {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
