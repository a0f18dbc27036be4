//! Scale of a linear automorphism and tidiness of norm balls.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{vec_add, IndexReport, Lattice, Matrix, OracleMode};
use crate::localfield::{Element, Rational};
use crate::newton::expanding_exponent;
use crate::spectral::{decompose, verify_adapted, Norm, Part, SpectralDecomposition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ScaleMethod {
    /// Sum of `-slope · length` over the non-positive slopes.
    Polygon,
    /// `-v(det α|E_+)` on the spectral decomposition.
    Determinant,
    /// Hermite index `[α(K) : K]`, optionally with coset enumeration.
    Bruteforce,
}

impl ScaleMethod {
    pub fn tag(self) -> &'static str {
        match self {
            ScaleMethod::Polygon => "polygon",
            ScaleMethod::Determinant => "determinant",
            ScaleMethod::Bruteforce => "bruteforce",
        }
    }
}

/// `s = q^exponent`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaleResult {
    pub q: u64,
    pub exponent: i64,
    /// `q^exponent` when it fits.
    pub value: Option<u128>,
    pub methods: Vec<(ScaleMethod, i64)>,
    pub agree: bool,
}

fn pow_q(q: u64, m: i64) -> Option<u128> {
    u32::try_from(m).ok().and_then(|m| (q as u128).checked_pow(m))
}

/// Scale from the Newton polygon, cross-checked against the determinant of
/// `α` on `E_+`.
pub fn scale_linear(alpha: &Matrix) -> Result<ScaleResult> {
    scale_of(&decompose(alpha)?)
}

pub fn scale_of(dec: &SpectralDecomposition) -> Result<ScaleResult> {
    let spec = dec.alpha().spec();
    let m = expanding_exponent(dec.polygon());
    if !m.is_integer() {
        return Err(Error::PrecisionExhausted(format!("non-integral scale exponent {m}")));
    }
    let m_poly = m.to_integer();
    let a_plus = dec.restriction(Part::Plus);
    let m_det = if a_plus.rows() == 0 {
        0
    } else {
        let det = a_plus.det()?;
        -(det.valuation().ok_or(Error::Singular)? as i64)
    };
    if m_det != m_poly {
        return Err(Error::OracleDisagreement(format!(
            "polygon gives scale exponent {m_poly}, determinant on E_+ gives {m_det}"
        )));
    }
    Ok(ScaleResult {
        q: spec.q(),
        exponent: m_poly,
        value: pow_q(spec.q(), m_poly),
        methods: vec![(ScaleMethod::Polygon, m_poly), (ScaleMethod::Determinant, m_det)],
        agree: true,
    })
}

fn part_lattice(v: &Lattice, basis: &Matrix) -> Result<Lattice> {
    if basis.cols() == 0 {
        return Ok(Lattice::standard(v.spec(), 0));
    }
    v.preimage(basis)
}

fn image_or_empty(l: &Lattice, a: &Matrix) -> Result<Lattice> {
    if l.dim() == 0 {
        return Ok(l.clone());
    }
    l.image(a)
}

/// `[α(K) : K]` for `K = B_r ∩ E_+`, expressed in the coordinates of the
/// spectral basis of `E_+`.
pub fn scale_bruteforce(dec: &SpectralDecomposition, norm: &Norm, t: Rational, mode: OracleMode) -> Result<IndexReport> {
    let spec = dec.alpha().spec();
    let v = norm.ball(spec, dec.dim(), t)?;
    let k = part_lattice(&v, &dec.subspace_plus())?;
    if k.dim() == 0 {
        return Ok(IndexReport { exponent: 0, value: Some(1), enumerated: Some(1) });
    }
    let ak = k.image(&dec.restriction(Part::Plus))?;
    ak.index_bruteforce(&k, mode)
}

#[derive(Clone, Debug)]
pub struct TidyReport {
    /// Requested radius exponent: the ball is `{N < q^t}`.
    pub radius: Rational,
    /// Grid point of the value group giving the same ball.
    pub effective_radius: Rational,
    /// Columns span `(B_r)_+ = B_r ∩ E_+`, ambient coordinates.
    pub v_plus: Matrix,
    pub v_minus: Matrix,
    /// `(B_r)_± = B_r ∩ E_±` by double inclusion.
    pub plus_minus: bool,
    pub ta: bool,
    pub tb: bool,
    /// Exponent of `[α(V_+) : V_+]`.
    pub index_plus: i64,
    /// Exponent of `[V_- : α(V_-)]`.
    pub index_minus: i64,
    /// `v(det α)`.
    pub det_valuation: i64,
    /// `index_plus - index_minus = -v(det α)`.
    pub consistent: bool,
    /// Steps until `α^n(V_+) ∩ E_1` stopped moving.
    pub chain_length: usize,
    pub samples: usize,
    pub notes: Vec<String>,
}

impl TidyReport {
    pub fn tidy(&self) -> bool {
        self.plus_minus && self.ta && self.tb && self.consistent
    }
}

fn span(basis: &Matrix, l: &Lattice) -> Result<Matrix> {
    if l.dim() == 0 {
        return Ok(Matrix::zeros(basis.spec(), basis.rows(), 0));
    }
    basis.mul(l.basis())
}

/// Checks TA and TB for the ball `{N < q^t}`. Norms failing the sampled
/// axioms are rejected with `NotAdapted`.
pub fn tidy_check<R: Rng + ?Sized>(
    dec: &SpectralDecomposition,
    norm: &Norm,
    t: Rational,
    samples: usize,
    rng: &mut R,
) -> Result<TidyReport> {
    let alpha = dec.alpha();
    let spec = alpha.spec().clone();
    let d = dec.dim();
    let axioms = verify_adapted(norm, dec, samples.max(1), rng)?;
    if !axioms.passed() {
        let why = axioms.failures.first().cloned().unwrap_or_else(|| "lattice not invariant".into());
        return Err(Error::NotAdapted(why));
    }
    let mut notes = Vec::new();
    let effective = norm.effective_radius(t);
    if effective != t {
        notes.push(format!(
            "radius exponent {} lies between grid points; the ball equals the one of exponent {}",
            crate::newton::fmt_rational(&t),
            crate::newton::fmt_rational(&effective)
        ));
    }
    let v = norm.ball(&spec, d, t)?;
    let comps = dec.components();

    // TA: V is the direct sum of its intersections with the E_ρ.
    let mut parts = Vec::with_capacity(comps.len());
    let mut gens = Vec::new();
    for c in comps {
        let vi = v.preimage(&c.basis)?;
        for col in span(&c.basis, &vi)?.columns() {
            gens.push(col);
        }
        parts.push(vi);
    }
    let mut ta = Lattice::from_generators(&spec, d, &gens)?.eq_lattice(&v);
    for _ in 0..samples {
        let coeffs: Vec<Element> = (0..d).map(|_| Element::random(&spec, 0, rng)).collect();
        let x = v.basis().mul_vec(&coeffs)?;
        let pieces = dec.project(&x)?;
        if !pieces.iter().all(|p| v.contains(p)) {
            ta = false;
            notes.push(String::from("a sampled ball vector has a component outside the ball"));
            break;
        }
        let plus = dec.project_part(&x, Part::Plus)?;
        let minus = dec.project_part(&x, Part::Minus)?;
        let levi = dec.project_part(&x, Part::Levi)?;
        let back = crate::linalg::vec_sub(&vec_add(&plus, &minus), &levi);
        if !v.contains(&plus) || !v.contains(&minus) || !crate::linalg::is_negligible_vec(&crate::linalg::vec_sub(&back, &x)) {
            ta = false;
            notes.push(String::from("a sampled ball vector does not split as v_+ + v_-"));
            break;
        }
    }

    // (B_r)_± = B_r ∩ E_±.
    let p_plus = dec.subspace_plus();
    let p_minus = dec.subspace_minus();
    let a_plus = dec.restriction(Part::Plus);
    let a_minus = dec.restriction(Part::Minus);
    let v_plus = part_lattice(&v, &p_plus)?;
    let v_minus = part_lattice(&v, &p_minus)?;
    let mut plus_minus = true;
    if v_plus.dim() > 0 && !v_plus.contains_lattice(&v_plus.image(&a_plus.inverse()?)?) {
        plus_minus = false;
        notes.push(String::from("α^-1(V ∩ E_+) is not inside V ∩ E_+"));
    }
    if v_minus.dim() > 0 && !v_minus.contains_lattice(&v_minus.image(&a_minus)?) {
        plus_minus = false;
        notes.push(String::from("α(V ∩ E_-) is not inside V ∩ E_-"));
    }
    // Outside E_±, some power of α^∓1 pushes V_ρ strictly into π V_ρ.
    for (c, vi) in comps.iter().zip(&parts) {
        if c.slope.is_zero() {
            continue;
        }
        let step = if c.slope > Rational::zero() { c.block.pow(c.e)? } else { c.block.pow(-c.e)? };
        if !vi.scaled(1).contains_lattice(&vi.image(&step)?) {
            plus_minus = false;
            notes.push(format!("no contraction certificate for slope {}", crate::newton::fmt_rational(&c.slope)));
        }
    }

    // TB: the chain α^n(V_+) is constant on E_1 and exhausts each E_ρ, ρ > 1.
    let mut tb = true;
    let mut chain_length = 0;
    for (c, vi) in comps.iter().zip(&parts) {
        if c.slope.is_zero() {
            let mut cur = vi.clone();
            loop {
                let next = cur.image(&c.block)?;
                if next.eq_lattice(&cur) {
                    break;
                }
                chain_length += 1;
                if chain_length > d * spec.precision() as usize || !next.contains_lattice(&cur) {
                    tb = false;
                    notes.push(String::from("the chain α^n(V_+) does not stabilize on E_1"));
                    break;
                }
                cur = next;
            }
        } else if c.slope < Rational::zero() {
            let grown = vi.image(&c.block.pow(c.e)?)?;
            if !grown.eq_lattice(&vi.scaled(c.h as i32)) {
                tb = false;
                notes.push(format!(
                    "α^{} V_ρ differs from π^{} V_ρ for slope {}",
                    c.e,
                    c.h,
                    crate::newton::fmt_rational(&c.slope)
                ));
            }
        }
    }

    let index_plus = if v_plus.dim() == 0 { 0 } else { v_plus.image(&a_plus)?.index_hermite(&v_plus)? };
    let index_minus = if v_minus.dim() == 0 { 0 } else { v_minus.index_hermite(&image_or_empty(&v_minus, &a_minus)?)? };
    let det_valuation = alpha.det()?.valuation().ok_or(Error::Singular)? as i64;
    let consistent = index_plus - index_minus == -det_valuation;
    if !consistent {
        notes.push(format!("index exponents {index_plus} - {index_minus} differ from -v(det) = {}", -det_valuation));
    }
    Ok(TidyReport {
        radius: t,
        effective_radius: effective,
        v_plus: span(&p_plus, &v_plus)?,
        v_minus: span(&p_minus, &v_minus)?,
        plus_minus,
        ta,
        tb,
        index_plus,
        index_minus,
        det_valuation,
        consistent,
        chain_length,
        samples,
        notes,
    })
}

/// `x = u + m + w` along contraction, Levi and anti-contraction parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub contraction: Vec<Element>,
    pub levi: Vec<Element>,
    pub anticontraction: Vec<Element>,
}

pub fn classify_vector(dec: &SpectralDecomposition, x: &[Element]) -> Result<Classification> {
    Ok(Classification {
        contraction: dec.project_part(x, Part::Contraction)?,
        levi: dec.project_part(x, Part::Levi)?,
        anticontraction: dec.project_part(x, Part::AntiContraction)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localfield::FieldSpec;
    use crate::spectral::adapted_norm;
    use alloc::sync::Arc;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q3() -> Arc<FieldSpec> {
        FieldSpec::padic(3, 32).unwrap()
    }

    #[test]
    fn scale_examples() {
        let k = q3();
        let s = scale_linear(&Matrix::diag_uniformizer(&k, &[-1, 1])).unwrap();
        assert_eq!((s.exponent, s.value), (1, Some(3)));
        let l = FieldSpec::laurent(2, 32).unwrap();
        assert_eq!(scale_linear(&Matrix::diag_uniformizer(&l, &[-1, 1])).unwrap().value, Some(2));
        let iso = Matrix::from_integers(&k, &[&[1, 2], &[1, 1]]);
        assert_eq!(scale_linear(&iso).unwrap().exponent, 0);
    }

    #[test]
    fn bruteforce_examples() {
        let k = q3();
        for (ks, expect) in [(vec![-1, 1], 1), (vec![-2, 0, 1], 2), (vec![0, 0], 0)] {
            let a = Matrix::diag_uniformizer(&k, &ks);
            let dec = decompose(&a).unwrap();
            let norm = Norm::Adapted(adapted_norm(&dec).unwrap());
            let r = scale_bruteforce(&dec, &norm, Rational::from_integer(1), OracleMode::On).unwrap();
            assert_eq!(r.exponent, expect);
            assert_eq!(r.enumerated, Some(3u64.pow(expect as u32)));
        }
    }

    #[test]
    fn tidy_diagonal() {
        let k = q3();
        let a = Matrix::diag_uniformizer(&k, &[-1, 1]);
        let dec = decompose(&a).unwrap();
        let norm = Norm::Adapted(adapted_norm(&dec).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for t in [-1, 0, 2] {
            let rep = tidy_check(&dec, &norm, Rational::from_integer(t), 10, &mut rng).unwrap();
            assert!(rep.tidy(), "{:?}", rep.notes);
            assert_eq!((rep.index_plus, rep.index_minus), (1, 1));
        }
    }

    #[test]
    fn tidy_identity() {
        let k = q3();
        let dec = decompose(&Matrix::identity(&k, 2)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let rep = tidy_check(&dec, &Norm::Max, Rational::from_integer(0), 10, &mut rng).unwrap();
        assert!(rep.tidy());
        assert_eq!(rep.v_plus.cols(), 2);
        assert_eq!(rep.index_plus, 0);
    }

    #[test]
    fn sheared_max_norm_rejected() {
        let k = q3();
        let mut g = Matrix::identity(&k, 2);
        g.set(0, 1, Element::uniformizer_pow(&k, -2));
        let a = Matrix::diag_uniformizer(&k, &[-1, 1]).conjugate_by(&g).unwrap();
        let dec = decompose(&a).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let err = tidy_check(&dec, &Norm::Max, Rational::zero(), 20, &mut rng).unwrap_err();
        assert!(matches!(err, Error::NotAdapted(_)));
    }

    #[test]
    fn classify_examples() {
        let k = q3();
        let a = Matrix::diag_uniformizer(&k, &[-1, 1]);
        let dec = decompose(&a).unwrap();
        let one = Element::one(&k);
        let zero = Element::zero(&k);
        let c = classify_vector(&dec, &[one.clone(), one.clone()]).unwrap();
        assert_eq!(c.contraction, vec![zero.clone(), one.clone()]);
        assert_eq!(c.anticontraction, vec![one.clone(), zero.clone()]);
        assert_eq!(c.levi, vec![zero.clone(), zero.clone()]);
        let z = classify_vector(&dec, &[zero.clone(), zero.clone()]).unwrap();
        assert!(z.contraction.iter().chain(&z.levi).all(|e| e.is_zero()));
    }
}
