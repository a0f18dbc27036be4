//! Newton polygons and factorization by root absolute value.
//!
//! Convention: for monic `f = Σ a_i T^i` of degree `d` the polygon is the
//! lower convex hull of the points `(i, v(a_(d-i)))`. Its slopes, counted
//! with horizontal length, are exactly the valuations of the roots. For
//! example `T^2 - (p + p^-1) T + 1 = (T - p)(T - p^-1)` has vertices
//! `(0, 0), (1, -1), (2, 0)` and slopes `-1, 1`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::localfield::residue::poly as rpoly;
use crate::localfield::{AbsValue, Element, Rational};
use crate::poly::Poly;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    /// Common valuation of the roots on this segment.
    pub slope: Rational,
    /// Number of roots.
    pub length: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub vertices: Vec<(usize, i32)>,
    pub segments: Vec<Segment>,
}

impl NewtonPolygon {
    /// Root valuations with multiplicity, in increasing order.
    pub fn root_valuations(&self) -> Vec<Rational> {
        self.segments.iter().flat_map(|s| core::iter::repeat_n(s.slope, s.length)).collect()
    }

    pub fn slopes(&self) -> Vec<Rational> {
        self.segments.iter().map(|s| s.slope).collect()
    }

    /// Vertex list followed by a slope table.
    pub fn render(&self) -> String {
        let mut s = String::from("vertices:");
        for (i, v) in &self.vertices {
            s.push_str(&format!(" ({i}, {v})"));
        }
        s.push_str("\nslope    length  |root|\n");
        for seg in &self.segments {
            let abs = AbsValue::from_exponent(-seg.slope);
            s.push_str(&format!("{:<8} {:<7} {}\n", fmt_rational(&seg.slope), seg.length, abs));
        }
        s
    }
}

pub(crate) fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for NewtonPolygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn check_monic(f: &Poly) -> Result<usize> {
    let d = f.degree().ok_or_else(|| Error::Malformed("zero polynomial".into()))?;
    if !f.is_monic() {
        return Err(Error::Malformed(format!("polynomial {f} is not monic")));
    }
    Ok(d)
}

/// Newton polygon of a monic polynomial with nonzero constant term.
pub fn newton_polygon(f: &Poly) -> Result<NewtonPolygon> {
    let d = check_monic(f)?;
    if f.coeff(0).is_zero() {
        return Err(Error::ZeroConstantTerm);
    }
    let pts: Vec<(i64, i64)> = (0..=d)
        .filter_map(|i| f.coeff(d - i).valuation().map(|v| (i as i64, v as i64)))
        .collect();
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b unless it lies strictly below the chord a..pt
            let cross = (b.0 - a.0) * (pt.1 - a.1) - (b.1 - a.1) * (pt.0 - a.0);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let segments = hull
        .windows(2)
        .map(|w| Segment {
            slope: Rational::new(w[1].1 - w[0].1, w[1].0 - w[0].0),
            length: (w[1].0 - w[0].0) as usize,
        })
        .collect();
    Ok(NewtonPolygon { vertices: hull.iter().map(|&(i, v)| (i as usize, v as i32)).collect(), segments })
}

/// `q^(-slope)` for every root, with multiplicity.
pub fn root_abs_values(f: &Poly) -> Result<Vec<AbsValue>> {
    Ok(newton_polygon(f)?.root_valuations().into_iter().map(|s| AbsValue::from_exponent(-s)).collect())
}

fn lift(f: &Poly, codes: &[u32]) -> Poly {
    let spec = f.spec();
    Poly::new(spec, codes.iter().map(|&c| Element::residue_constant(spec, c)).collect())
}

fn min_val(f: &Poly) -> i32 {
    f.min_valuation().unwrap_or(f.spec().precision())
}

/// Splits `f = f_h · f_rest` where the roots of `f_h` are exactly the roots
/// of `f` of valuation `h`.
pub fn split_integer_slope(f: &Poly, h: i32) -> Result<(Poly, Poly)> {
    let spec = f.spec().clone();
    let poly = newton_polygon(f)?;
    let target = Rational::from_integer(h as i64);
    let Some(seg) = poly.segments.iter().find(|s| s.slope == target) else {
        return Err(Error::NotASlope(format!("{h}")));
    };
    if poly.segments.len() == 1 {
        return Ok((f.clone(), Poly::one(&spec)));
    }
    let ell = seg.length;
    let d = f.degree().unwrap();
    let n = spec.precision();
    let margin = spec.margin();
    let k = spec.residue();

    // G(T) = π^(-m) π^(-hd) f(π^h T), primitive
    let g: Vec<Element> = (0..=d).map(|i| f.coeff(i).shift(-h * (d - i) as i32)).collect();
    let g = Poly::new(&spec, g);
    let big_g = g.shift_coeffs(-min_val(&g));

    let gbar: Vec<u32> = rpoly::trim(big_g.coeffs().iter().map(|c| c.residue()).collect());
    let b = gbar.iter().position(|&c| c != 0).ok_or(Error::NotCoprime)?;
    let ubar = gbar[b..].to_vec();
    if rpoly::degree(&ubar) != Some(ell) {
        return Err(Error::HenselNonConvergence(format!(
            "residue factor has degree {:?}, expected {ell}",
            rpoly::degree(&ubar)
        )));
    }
    let lc = *ubar.last().unwrap();
    let hbar = rpoly::scale(k, &ubar, k.inv(lc));
    let mut cof = vec![0u32; b + 1];
    cof[b] = lc;
    if rpoly::resultant(k, &cof, &hbar) == 0 {
        return Err(Error::NotCoprime);
    }
    let (gcd, sbar, _) = rpoly::ext_gcd(k, &cof, &hbar);
    if gcd != [1] {
        return Err(Error::NotCoprime);
    }

    let mut hh = lift(f, &hbar);
    let mut s = lift(f, &sbar);
    let mut gr = big_g.divrem(&hh)?.0;
    let mut prec = 1;
    let one = Poly::one(&spec);
    loop {
        let e = big_g.sub(&gr.mul(&hh));
        if min_val(&e) < prec {
            return Err(Error::HenselNonConvergence(format!(
                "defect valuation {} below {prec}",
                min_val(&e)
            )));
        }
        if prec >= n {
            break;
        }
        hh = hh.add(&s.mul(&e).rem(&hh)?);
        gr = big_g.divrem(&hh)?.0;
        let defect = s.mul(&gr).sub(&one).rem(&hh)?;
        s = s.sub(&s.mul(&defect).rem(&hh)?);
        prec = (2 * prec).min(n);
    }
    if min_val(&big_g.sub(&gr.mul(&hh))) < n - margin {
        return Err(Error::HenselNonConvergence("final defect too large".into()));
    }

    // f_h(T) = π^(hℓ) H(π^-h T)
    let fh: Vec<Element> = (0..=ell).map(|i| hh.coeff(i).shift(h * (ell - i) as i32)).collect();
    let mut fh = Poly::new(&spec, fh);
    if !fh.is_monic() {
        fh = fh.monic()?;
    }
    let rest = f.divrem(&fh)?.0;
    Ok((fh, rest))
}

/// One factor per root absolute value.
#[derive(Clone, Debug)]
pub struct SlopeFactor {
    pub slope: Rational,
    pub abs: AbsValue,
    pub poly: Poly,
    pub multiplicity: usize,
}

#[derive(Clone, Debug)]
pub struct SlopeFactorization {
    /// Sorted by increasing slope.
    pub factors: Vec<SlopeFactor>,
}

impl SlopeFactorization {
    pub fn product(&self) -> Option<Poly> {
        let first = self.factors.first()?;
        Some(self.factors.iter().skip(1).fold(first.poly.clone(), |acc, f| acc.mul(&f.poly)))
    }
}

/// Splits off every integer slope. At most one fractional slope may remain,
/// which then forms its own factor; several fractional slopes must be
/// reduced through a matrix power by the caller.
pub fn slope_factorization(f: &Poly) -> Result<SlopeFactorization> {
    let poly = newton_polygon(f)?;
    let fractional: Vec<&Segment> = poly.segments.iter().filter(|s| !s.slope.is_integer()).collect();
    if fractional.len() > 1 {
        let list: Vec<String> = fractional.iter().map(|s| fmt_rational(&s.slope)).collect();
        return Err(Error::FractionalSlope(list.join(", ")));
    }
    let mut rest = f.clone();
    let mut factors = Vec::new();
    let integer: Vec<&Segment> = poly.segments.iter().filter(|s| s.slope.is_integer()).collect();
    for (idx, seg) in integer.iter().enumerate() {
        let last = idx + 1 == integer.len() && fractional.is_empty();
        let fh = if last {
            core::mem::replace(&mut rest, Poly::one(f.spec()))
        } else {
            let (fh, r) = split_integer_slope(&rest, seg.slope.to_integer() as i32)?;
            rest = r;
            fh
        };
        factors.push(SlopeFactor {
            slope: seg.slope,
            abs: AbsValue::from_exponent(-seg.slope),
            poly: fh,
            multiplicity: seg.length,
        });
    }
    if let Some(seg) = fractional.first() {
        factors.push(SlopeFactor {
            slope: seg.slope,
            abs: AbsValue::from_exponent(-seg.slope),
            poly: rest,
            multiplicity: seg.length,
        });
    }
    factors.sort_by_key(|a| a.slope);
    Ok(SlopeFactorization { factors })
}

/// Sum of `-slope · length` over the segments of slope `<= 0`; the exponent
/// `m` of `Π_{|λ| >= 1} |λ| = q^m`.
pub fn expanding_exponent(poly: &NewtonPolygon) -> Rational {
    poly.segments
        .iter()
        .filter(|s| s.slope <= Rational::zero())
        .fold(Rational::zero(), |acc, s| acc - s.slope * Rational::from_integer(s.length as i64))
}

/// Sum of all root valuations `Σ v(λ)`, i.e. `v(a_0)`.
pub fn total_valuation(poly: &NewtonPolygon) -> Rational {
    poly.segments
        .iter()
        .fold(Rational::zero(), |acc, s| acc + s.slope * Rational::from_integer(s.length as i64))
}

/// Smallest `e` making `e·slope` integral.
pub fn denominator(slope: &Rational) -> i64 {
    if slope.is_integer() {
        i64::one()
    } else {
        *slope.denom()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localfield::FieldSpec;
    use alloc::sync::Arc;

    fn q3() -> Arc<FieldSpec> {
        FieldSpec::padic(3, 24).unwrap()
    }

    #[test]
    fn polygon_of_p_and_inverse() {
        let k = q3();
        let p = Element::uniformizer(&k);
        let f = Poly::from_roots(&k, &[p.clone(), p.inv().unwrap()]);
        let np = newton_polygon(&f).unwrap();
        assert_eq!(np.vertices, vec![(0, 0), (1, -1), (2, 0)]);
        assert_eq!(np.root_valuations(), vec![Rational::from_integer(-1), Rational::from_integer(1)]);
        let abs = root_abs_values(&f).unwrap();
        assert_eq!(abs, vec![AbsValue::from_int_exponent(1), AbsValue::from_int_exponent(-1)]);
    }

    #[test]
    fn linear_and_square_root() {
        let k = q3();
        let f = Poly::from_roots(&k, &[Element::one(&k)]);
        assert_eq!(newton_polygon(&f).unwrap().root_valuations(), vec![Rational::zero()]);
        let g = Poly::new(&k, vec![-Element::uniformizer(&k), Element::zero(&k), Element::one(&k)]);
        let np = newton_polygon(&g).unwrap();
        assert_eq!(np.segments, vec![Segment { slope: Rational::new(1, 2), length: 2 }]);
    }

    #[test]
    fn split_unit_root() {
        let k = q3();
        let p = Element::uniformizer(&k);
        let f = Poly::from_roots(&k, &[p.clone(), Element::one(&k)]);
        let (fh, rest) = split_integer_slope(&f, 0).unwrap();
        assert!(fh.eq_mod(&Poly::from_roots(&k, &[Element::one(&k)]), 20));
        assert!(rest.eq_mod(&Poly::from_roots(&k, &[p]), 20));
    }

    #[test]
    fn split_middle_slope() {
        let k = q3();
        let p = Element::uniformizer(&k);
        let p2 = &p * &p;
        let f = Poly::from_roots(&k, &[p.clone(), p2.clone(), Element::one(&k)]);
        let (fh, rest) = split_integer_slope(&f, 1).unwrap();
        assert!(fh.eq_mod(&Poly::from_roots(&k, core::slice::from_ref(&p)), 18));
        assert!(fh.mul(&rest).eq_mod(&f, 18));
        assert_eq!(split_integer_slope(&f, 5).unwrap_err(), Error::NotASlope("5".into()));
    }

    #[test]
    fn single_slope_is_returned_whole() {
        let k = q3();
        let f = Poly::from_roots(&k, &[Element::from_integer(&k, 2), Element::one(&k)]);
        let (fh, rest) = split_integer_slope(&f, 0).unwrap();
        assert_eq!(fh, f);
        assert!(rest.is_one());
    }

    #[test]
    fn factorization_examples() {
        let k = q3();
        let p = Element::uniformizer(&k);
        let f = Poly::from_roots(&k, &[p.clone(), p.inv().unwrap()]);
        let sf = slope_factorization(&f).unwrap();
        assert_eq!(sf.factors.len(), 2);
        assert!(sf.product().unwrap().eq_mod(&f, 18));
        for fac in &sf.factors {
            assert_eq!(newton_polygon(&fac.poly).unwrap().segments.len(), 1);
        }
        let t = Poly::monomial(Element::one(&k), 3);
        assert_eq!(slope_factorization(&t).unwrap_err(), Error::ZeroConstantTerm);
        let sq = Poly::from_roots(&k, &[Element::one(&k), Element::one(&k)]);
        let sf = slope_factorization(&sq).unwrap();
        assert_eq!((sf.factors.len(), sf.factors[0].multiplicity), (1, 2));
    }

    #[test]
    fn laurent_split_with_extension_residues() {
        let k = FieldSpec::laurent_ext(2, vec![1, 1, 1], 24).unwrap();
        let x = Element::uniformizer(&k);
        let t = Element::residue_constant(&k, k.residue().generator());
        let roots = [&t * &x, x.inv().unwrap(), &t + &x, Element::one(&k)];
        let f = Poly::from_roots(&k, &roots);
        let sf = slope_factorization(&f).unwrap();
        assert_eq!(sf.factors.iter().map(|s| s.multiplicity).collect::<Vec<_>>(), vec![1, 2, 1]);
        assert!(sf.product().unwrap().eq_mod(&f, 16));
        let unit = &sf.factors[1].poly;
        assert!(unit.eval(&roots[2]).valuation().is_none_or(|v| v >= 16));
    }
}
