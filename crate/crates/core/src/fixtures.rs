//! Finite checks on maps of `F_p[[X]] / (X^N)` and on the shift model,
//! where the group scale and the linear scale behave differently from the
//! analytic case.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::localfield::{Element, FieldKind, FieldSpec};
use crate::scaletidy::{scale_linear, ScaleResult};

/// Maps `z ↦ α(z)` of the truncated power series ring, described by their
/// action on coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TruncatedSeriesMap {
    Identity,
    /// `z ↦ a z`.
    Linear(Element),
    /// `z ↦ z + X z^p`.
    FrobeniusTwist,
    /// `z ↦ z + Σ_k a_k X^(ℓ_k)` with `a_k` the coefficient of `X^k` in
    /// `z`; `exponents[k - 1] = ℓ_k`.
    Nonanalytic { exponents: Vec<i32> },
}

impl TruncatedSeriesMap {
    pub fn name(&self) -> &'static str {
        match self {
            TruncatedSeriesMap::Identity => "identity",
            TruncatedSeriesMap::Linear(_) => "linear",
            TruncatedSeriesMap::FrobeniusTwist => "frobenius-twist",
            TruncatedSeriesMap::Nonanalytic { .. } => "nonanalytic",
        }
    }

    /// Image of an element of `F_q[[X]]`; errors on non-integral input.
    pub fn apply(&self, z: &Element) -> Result<Element> {
        if !z.is_integral() {
            return Err(Error::Precondition(format!("{z} lies outside the power series ring")));
        }
        let spec = z.spec();
        Ok(match self {
            TruncatedSeriesMap::Identity => z.clone(),
            TruncatedSeriesMap::Linear(a) => a * z,
            TruncatedSeriesMap::FrobeniusTwist => z + &z.pow(spec.p() as i64)?.shift(1),
            TruncatedSeriesMap::Nonanalytic { exponents } => {
                let n = spec.precision();
                let mut out = z.clone();
                for (i, &l) in exponents.iter().enumerate() {
                    let k = i as i32 + 1;
                    if k >= n || l >= n {
                        break;
                    }
                    let a = z.coefficient(k);
                    if a != 0 {
                        out = &out + &Element::residue_constant(spec, a).shift(l);
                    }
                }
                out
            }
        })
    }
}

/// `ℓ_k = k^2` for `1 <= k < n`.
pub fn square_exponents(n: i32) -> Vec<i32> {
    (1..n).map(|k| k * k).collect()
}

fn laurent_field(p: u32, n: i32) -> Result<Arc<FieldSpec>> {
    FieldSpec::laurent(p, n)
}

fn monomial(spec: &Arc<FieldSpec>, k: i32) -> Element {
    Element::uniformizer_pow(spec, k)
}

/// Random element of valuation `>= v` of the truncated ring.
fn random_series<R: Rng + ?Sized>(spec: &Arc<FieldSpec>, v: i32, rng: &mut R) -> Element {
    Element::random(spec, v, rng)
}

// ---------------------------------------------------------------------------
// difference quotients

/// `(f(x + t y) - f(x)) / t`, known modulo `X^(N - v(t))`.
pub fn difference_quotient(f: &TruncatedSeriesMap, x: &Element, y: &Element, t: &Element) -> Result<Element> {
    if t.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let shifted = x + &(t * y);
    let num = &f.apply(&shifted)? - &f.apply(x)?;
    num.checked_div(t)
}

#[derive(Clone, Debug)]
pub struct QuotientStep {
    /// `t = X^j`.
    pub j: i32,
    pub value: Element,
    /// Digits of `value` that are determined by the truncation.
    pub known_digits: i32,
    /// `v(q_j - q_(j-1))`, compared on common known digits.
    pub change_valuation: Option<i32>,
}

#[derive(Clone, Debug)]
pub struct DiffQuotientReport {
    pub map: &'static str,
    pub steps: Vec<QuotientStep>,
    /// Whether the changes have strictly increasing valuation.
    pub converging: bool,
    /// Last value reduced to the digits agreeing with its predecessor.
    pub limit: Option<Element>,
    pub limit_digits: i32,
}

/// Difference quotients for `t = X^j`, `1 <= j <= jmax`.
pub fn difference_quotients(f: &TruncatedSeriesMap, x: &Element, y: &Element, jmax: i32) -> Result<DiffQuotientReport> {
    let spec = x.spec().clone();
    let n = spec.precision();
    let mut steps: Vec<QuotientStep> = Vec::new();
    for j in 1..=jmax.min(n - 1) {
        let value = difference_quotient(f, x, y, &monomial(&spec, j))?;
        let known = n - j;
        let change_valuation = steps.last().map(|prev: &QuotientStep| {
            let d = (&value - &prev.value).split_at(known.min(prev.known_digits)).0;
            d.valuation().unwrap_or(known.min(prev.known_digits))
        });
        steps.push(QuotientStep { j, value, known_digits: known, change_valuation });
    }
    let changes: Vec<i32> = steps.iter().filter_map(|s| s.change_valuation).collect();
    let converging = changes.windows(2).all(|w| w[1] > w[0] || w[1] >= steps.last().map_or(0, |s| s.known_digits));
    let (limit, limit_digits) = match steps.last() {
        Some(last) => {
            let digits = last.change_valuation.unwrap_or(last.known_digits).min(last.known_digits);
            (Some(last.value.split_at(digits).0), digits)
        }
        None => (None, 0),
    };
    Ok(DiffQuotientReport { map: f.name(), steps, converging, limit, limit_digits })
}

// ---------------------------------------------------------------------------
// shift model

#[derive(Clone, Debug)]
pub struct ShiftReport {
    pub p: u32,
    pub window: usize,
    /// Scale of `(v, w) ↦ (X^-1 v, X w)` on `F_p((X))^2`.
    pub linear: ScaleResult,
    /// The group is compact, so its scale is 1.
    pub group_scale: u64,
    pub group_scale_reason: &'static str,
    pub configurations: u64,
    pub exhaustive: bool,
    /// Configurations with a witness for every cut-off `m`.
    pub witnessed: u64,
    pub mismatch: bool,
}

const SHIFT_EXHAUSTIVE_LIMIT: u64 = 1 << 16;

/// Window `[-W, W)` of `F_p^Z` with the right shift. Every configuration
/// is matched on `[-m, W)` by a configuration supported there, which the
/// shift carries out of the window after `W + m` steps.
pub fn shift_fixture<R: Rng + ?Sized>(p: u32, w: usize, rng: &mut R) -> Result<ShiftReport> {
    if w < 2 {
        return Err(Error::Precondition("window half-width must be at least 2".into()));
    }
    let spec = laurent_field(p, 32)?;
    let beta = Matrix::diag_uniformizer(&spec, &[-1, 1]);
    let linear = scale_linear(&beta)?;
    let len = 2 * w;
    let total = (p as u64).checked_pow(len as u32);
    let exhaustive = total.is_some_and(|t| t <= SHIFT_EXHAUSTIVE_LIMIT);
    let count = if exhaustive { total.unwrap() } else { 4096 };
    let mut witnessed = 0;
    for idx in 0..count {
        let g: Vec<u32> = if exhaustive {
            let mut c = idx;
            (0..len)
                .map(|_| {
                    let d = (c % p as u64) as u32;
                    c /= p as u64;
                    d
                })
                .collect()
        } else {
            (0..len).map(|_| rng.gen_range(0..p)).collect()
        };
        // position i of the window is the integer i - W
        let ok = (1..=w).all(|m| {
            let lo = w - m;
            let witness: Vec<u32> = (0..len).map(|i| if i >= lo { g[i] } else { 0 }).collect();
            let agrees = (lo..len).all(|i| witness[i] == g[i]);
            let supported = (0..lo).all(|i| witness[i] == 0);
            let mut shifted = witness.clone();
            for _ in 0..w + m {
                shifted.rotate_right(1);
                shifted[0] = 0;
            }
            agrees && supported && shifted.iter().all(|&x| x == 0)
        });
        if ok {
            witnessed += 1;
        }
    }
    Ok(ShiftReport {
        p,
        window: w,
        mismatch: linear.exponent != 0,
        linear,
        group_scale: 1,
        group_scale_reason: "the group is compact",
        configurations: count,
        exhaustive,
        witnessed,
    })
}

// ---------------------------------------------------------------------------
// z ↦ z + X z^p

#[derive(Clone, Debug)]
pub struct FrobeniusReport {
    pub p: u32,
    pub precision: i32,
    pub samples: usize,
    /// `α(z + w) = α(z) + α(w)` on all samples and `α(c z) = c α(z)` for
    /// `c ∈ F_p`.
    pub additive: bool,
    /// The matrix of `α` over `F_p` in the basis `X^i` is unitriangular.
    pub unitriangular: bool,
    /// Fixed-point inverse undoes `α` on all samples.
    pub inverse_ok: bool,
    /// Most iterations used by the fixed-point inverse.
    pub inverse_iterations: usize,
    /// `α(X) = X + X^(p+1)`.
    pub image_of_x: bool,
    /// Difference quotients at 0 in direction 1.
    pub derivative: DiffQuotientReport,
    /// `α'(0) = id` to the known digits.
    pub derivative_identity: bool,
    /// For each level `m < (N - 1)/p`, a point of valuation `m` moved by α.
    pub moved_levels: Vec<i32>,
    pub all_levels_moved: bool,
}

impl FrobeniusReport {
    pub fn passed(&self) -> bool {
        self.additive && self.unitriangular && self.inverse_ok && self.image_of_x && self.derivative_identity && self.all_levels_moved
    }
}

/// Inverse of `z ↦ z + X z^p` by iterating `z ↦ w - X z^p`.
pub fn frobenius_twist_inverse(w: &Element) -> Result<(Element, usize)> {
    let spec = w.spec();
    let p = spec.p() as i64;
    let mut z = w.clone();
    for it in 1..=spec.precision() as usize + 1 {
        let next = w - &z.pow(p)?.shift(1);
        if next == z {
            return Ok((z, it));
        }
        z = next;
    }
    Err(Error::PrecisionExhausted("fixed-point inverse did not settle".into()))
}

pub fn frobenius_twist_fixture<R: Rng + ?Sized>(p: u32, n: i32, samples: usize, rng: &mut R) -> Result<FrobeniusReport> {
    if n < p as i32 + 2 {
        return Err(Error::Precondition(format!("precision {n} is below p + 2")));
    }
    let spec = laurent_field(p, n)?;
    let f = TruncatedSeriesMap::FrobeniusTwist;
    let mut additive = true;
    let mut inverse_ok = true;
    let mut inverse_iterations = 0;
    for _ in 0..samples {
        let z = random_series(&spec, 0, rng);
        let w = random_series(&spec, 0, rng);
        let c = Element::residue_constant(&spec, rng.gen_range(0..p));
        if f.apply(&(&z + &w))? != &f.apply(&z)? + &f.apply(&w)? || f.apply(&(&c * &z))? != &c * &f.apply(&z)? {
            additive = false;
        }
        let (back, its) = frobenius_twist_inverse(&f.apply(&z)?)?;
        inverse_iterations = inverse_iterations.max(its);
        let (pre, its) = frobenius_twist_inverse(&w)?;
        inverse_iterations = inverse_iterations.max(its);
        if back != z || f.apply(&pre)? != w {
            inverse_ok = false;
        }
    }
    // columns: images of X^i, rows: coefficients
    let mut unitriangular = true;
    for i in 0..n {
        let img = f.apply(&monomial(&spec, i))?;
        for r in 0..=i {
            let expect = u32::from(r == i);
            if img.coefficient(r) != expect {
                unitriangular = false;
            }
        }
    }
    let x = monomial(&spec, 1);
    let image_of_x = f.apply(&x)? == &x + &monomial(&spec, p as i32 + 1);
    let zero = Element::zero(&spec);
    let one = Element::one(&spec);
    let derivative = difference_quotients(&f, &zero, &one, n / 2)?;
    let derivative_identity = derivative.converging && derivative.limit.as_ref() == Some(&one.split_at(derivative.limit_digits).0);
    let mut moved_levels = Vec::new();
    let mut all_levels_moved = true;
    let mut m = 0;
    while (m * p as i32) < n - 1 {
        let z = monomial(&spec, m);
        if f.apply(&z)? != z {
            moved_levels.push(m);
        } else {
            all_levels_moved = false;
        }
        m += 1;
    }
    Ok(FrobeniusReport {
        p,
        precision: n,
        samples,
        additive,
        unitriangular,
        inverse_ok,
        inverse_iterations,
        image_of_x,
        derivative,
        derivative_identity,
        moved_levels,
        all_levels_moved,
    })
}

// ---------------------------------------------------------------------------
// z ↦ z + Σ a_k X^(ℓ_k)

#[derive(Clone, Debug)]
pub struct DecayCertificate {
    pub n: i32,
    /// Smallest valuation from which `v(α(z) - z) >= n v(z) + 1` holds.
    pub from_valuation: i32,
    pub checked: u64,
    pub holds: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug)]
pub struct NonanalyticReport {
    pub p: u32,
    pub precision: i32,
    pub exponents: Vec<i32>,
    /// `v(α(z) - z) >= ℓ_(v(z))` on the sweep.
    pub exponent_bound: bool,
    pub certificates: Vec<DecayCertificate>,
    /// Certified starting valuations do not decrease with `n`.
    pub monotone: bool,
    pub zero_fixed: bool,
}

impl NonanalyticReport {
    pub fn passed(&self) -> bool {
        self.exponent_bound && self.monotone && self.zero_fixed && self.certificates.iter().all(|c| c.holds)
    }
}

/// Number of free low coefficients enumerated above the leading one.
const SWEEP_WIDTH: i32 = 3;

fn start_valuation(exponents: &[i32], n: i32, limit: i32) -> i32 {
    let ell = |v: i32| exponents[(v - 1) as usize];
    let mut start = limit;
    for v in (1..limit).rev() {
        if ell(v) > n * v {
            start = v;
        } else {
            break;
        }
    }
    start
}

/// Sweeps all `z = X^v (c_0 + c_1 X + ... )` with `c_0 != 0` and the next
/// `SWEEP_WIDTH` coefficients arbitrary, for every `v` with `ℓ_v < N`.
pub fn nonanalytic_fixture(p: u32, precision: i32, exponents: Option<Vec<i32>>, n_max: i32) -> Result<NonanalyticReport> {
    let spec = laurent_field(p, precision)?;
    let exponents = exponents.unwrap_or_else(|| square_exponents(precision));
    if exponents.is_empty() || exponents.windows(2).any(|w| w[1] <= w[0]) || exponents[0] < 1 {
        return Err(Error::Precondition("exponents ℓ_k must be positive and strictly increasing".into()));
    }
    let f = TruncatedSeriesMap::Nonanalytic { exponents: exponents.clone() };
    let ell = |v: i32| exponents.get((v - 1) as usize).copied();
    // valuations whose image difference is still visible
    let top = (1..precision).take_while(|&v| ell(v).is_some_and(|l| l < precision)).last().unwrap_or(0);
    let mut patterns: Vec<Vec<u32>> = vec![Vec::new()];
    for _ in 0..SWEEP_WIDTH {
        patterns = patterns.iter().flat_map(|pre| (0..p).map(move |c| [pre.clone(), vec![c]].concat())).collect();
    }
    let mut exponent_bound = true;
    let mut diffs: Vec<(i32, Option<i32>, Element)> = Vec::new();
    for v in 1..=top.max(1) + 1 {
        for lead in 1..p {
            for pat in &patterns {
                let mut coeffs = vec![lead];
                coeffs.extend_from_slice(pat);
                let z = Element::from_coefficients(&spec, v, &coeffs)?;
                let d = &f.apply(&z)? - &z;
                let dv = d.valuation();
                if let (Some(l), Some(dv)) = (ell(v), dv) {
                    if dv < l {
                        exponent_bound = false;
                    }
                }
                diffs.push((v, dv, z));
            }
        }
    }
    let mut certificates = Vec::new();
    for n in 1..=n_max {
        let from = start_valuation(&exponents, n, top + 2);
        let mut checked = 0;
        let mut witness = None;
        for (v, dv, z) in &diffs {
            if *v < from {
                continue;
            }
            checked += 1;
            let ok = dv.is_none_or(|dv| dv > n * v);
            if !ok && witness.is_none() {
                witness = Some(format!("{z}"));
            }
        }
        certificates.push(DecayCertificate { n, from_valuation: from, checked, holds: witness.is_none() && checked > 0, witness });
    }
    let monotone = certificates.windows(2).all(|w| w[1].from_valuation >= w[0].from_valuation);
    let zero = Element::zero(&spec);
    Ok(NonanalyticReport {
        p,
        precision,
        exponents,
        exponent_bound,
        certificates,
        monotone,
        zero_fixed: f.apply(&zero)? == zero,
    })
}

/// Checks that a field is of the kind the fixtures run on.
pub fn require_laurent(spec: &FieldSpec) -> Result<()> {
    if spec.kind() != FieldKind::Laurent {
        return Err(Error::Precondition("fixture maps live on F_q[[X]]".into()));
    }
    Ok(())
}
