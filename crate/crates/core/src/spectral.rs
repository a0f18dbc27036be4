//! Splitting `E = ⊕ E_ρ` along eigenvalue absolute values, and norms
//! adapted to an automorphism.
//!
//! A root valuation `h/e` (lowest terms) gives `ρ = q^(-h/e)`. Its space is
//! `E_ρ = ker g_h(α^e)`, where `g_h` is the slope-`h` factor of the
//! characteristic polynomial of `α^e`; this keeps all lifting over `K`.
//! Components are stored by increasing slope, so the expanding ones come
//! first.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{is_negligible_vec, vec_add, Lattice, Matrix};
use crate::localfield::{AbsValue, Element, Rational};
use crate::newton::{newton_polygon, split_integer_slope, NewtonPolygon};
use crate::poly::Poly;

/// One generalized eigenspace `E_ρ`.
#[derive(Clone, Debug)]
pub struct Component {
    /// Root valuation `h/e`.
    pub slope: Rational,
    pub h: i64,
    pub e: i64,
    /// `ρ = q^(-slope)`.
    pub abs: AbsValue,
    /// Columns span `E_ρ`.
    pub basis: Matrix,
    /// Factor of the characteristic polynomial of `α^e` killing `E_ρ`.
    pub factor: Poly,
    /// Matrix of `α|E_ρ` in the coordinates of `basis`.
    pub block: Matrix,
}

impl Component {
    pub fn dim(&self) -> usize {
        self.basis.cols()
    }
}

#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    alpha: Matrix,
    polygon: NewtonPolygon,
    components: Vec<Component>,
    change: Matrix,
    change_inv: Matrix,
    offsets: Vec<usize>,
    block_defect: Option<i32>,
}

/// Which part of `E` a basis should span.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    /// `ρ < 1`, the contraction part `U_α`.
    Contraction,
    /// `ρ = 1`, the Levi part `M_α`.
    Levi,
    /// `ρ > 1`, the anti-contraction part `U_(α^-1)`.
    AntiContraction,
    /// `ρ >= 1`.
    Plus,
    /// `ρ <= 1`.
    Minus,
}

impl Part {
    pub fn admits(self, slope: &Rational) -> bool {
        match self {
            Part::Contraction => slope.is_positive(),
            Part::Levi => slope.is_zero(),
            Part::AntiContraction => slope.is_negative(),
            Part::Plus => !slope.is_positive(),
            Part::Minus => !slope.is_negative(),
        }
    }
}

/// Spectral decomposition of an invertible matrix.
pub fn decompose(alpha: &Matrix) -> Result<SpectralDecomposition> {
    if !alpha.is_square() {
        return Err(Error::Dimension("automorphism must be square".into()));
    }
    let spec = alpha.spec().clone();
    let d = alpha.rows();
    if alpha.det()?.is_zero() {
        return Err(Error::Singular);
    }
    let chi = alpha.char_poly()?;
    // det α != 0 was checked, so a vanishing constant term means lost digits
    let lost = |e: Error| match e {
        Error::ZeroConstantTerm => Error::PrecisionExhausted("constant term of the characteristic polynomial lost".into()),
        e => e,
    };
    let polygon = newton_polygon(&chi).map_err(lost)?;
    let mut components = Vec::new();
    for seg in &polygon.segments {
        let (h, e) = (*seg.slope.numer(), *seg.slope.denom());
        let ae = alpha.pow(e)?;
        let g = if e == 1 { chi.clone() } else { ae.char_poly()? };
        let (gh, _) = split_integer_slope(&g, h as i32).map_err(lost)?;
        let size = ae.min_valuation().unwrap_or(0);
        let reference = gh
            .coeffs()
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.valuation().map(|v| v + i as i32 * size))
            .min()
            .unwrap_or(0);
        let basis = ae.eval_poly(&gh)?.kernel_at(reference);
        if basis.cols() != seg.length {
            return Err(Error::Dimension(format!(
                "space for root valuation {} has dimension {} but multiplicity {}",
                crate::newton::fmt_rational(&seg.slope),
                basis.cols(),
                seg.length
            )));
        }
        components.push(Component {
            slope: seg.slope,
            h,
            e,
            abs: AbsValue::from_exponent(-seg.slope),
            basis,
            factor: gh,
            block: Matrix::zeros(&spec, 0, 0),
        });
    }
    let parts: Vec<&Matrix> = components.iter().map(|c| &c.basis).collect();
    let change = Matrix::hstack(&spec, d, &parts)?;
    if change.rank() != d {
        return Err(Error::PrecisionExhausted("spectral bases are not independent".into()));
    }
    let change_inv = change.inverse()?;
    let conj = change_inv.mul(alpha)?.mul(&change)?;
    let mut offsets = Vec::with_capacity(components.len() + 1);
    let mut off = 0;
    for c in &components {
        offsets.push(off);
        off += c.dim();
    }
    offsets.push(off);
    let mut block_defect: Option<i32> = None;
    for i in 0..d {
        for j in 0..d {
            let bi = offsets.iter().rposition(|&o| o <= i).unwrap();
            let bj = offsets.iter().rposition(|&o| o <= j).unwrap();
            if bi != bj {
                if let Some(v) = conj.get(i, j).valuation() {
                    block_defect = Some(block_defect.map_or(v, |b| b.min(v)));
                }
            }
        }
    }
    let limit = spec.precision() - spec.margin();
    if let Some(v) = block_defect {
        let scale = conj.min_valuation().unwrap_or(0).min(0);
        if v < limit + scale - spec.margin() / 2 {
            return Err(Error::PrecisionExhausted(format!(
                "conjugated matrix is not block diagonal (off-block valuation {v})"
            )));
        }
    }
    for (i, c) in components.iter_mut().enumerate() {
        c.block = conj.submatrix(offsets[i]..offsets[i + 1], offsets[i]..offsets[i + 1]);
    }
    Ok(SpectralDecomposition { alpha: alpha.clone(), polygon, components, change, change_inv, offsets, block_defect })
}

impl SpectralDecomposition {
    pub fn alpha(&self) -> &Matrix {
        &self.alpha
    }

    pub fn dim(&self) -> usize {
        self.alpha.rows()
    }

    pub fn polygon(&self) -> &NewtonPolygon {
        &self.polygon
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// All component bases side by side.
    pub fn change_of_basis(&self) -> &Matrix {
        &self.change
    }

    pub fn change_of_basis_inv(&self) -> &Matrix {
        &self.change_inv
    }

    /// Smallest valuation of an entry outside the diagonal blocks of the
    /// conjugated matrix (`None` if they all vanish).
    pub fn block_defect(&self) -> Option<i32> {
        self.block_defect
    }

    /// Coordinate range of component `i`.
    pub fn range(&self, i: usize) -> core::ops::Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    /// Indices of the components that belong to `part`.
    pub fn indices(&self, part: Part) -> Vec<usize> {
        (0..self.components.len()).filter(|&i| part.admits(&self.components[i].slope)).collect()
    }

    /// Basis (columns) of the requested part; may have no columns.
    pub fn subspace(&self, part: Part) -> Matrix {
        let idx = self.indices(part);
        let cols: Vec<Vec<Element>> = idx.iter().flat_map(|&i| self.components[i].basis.columns()).collect();
        Matrix::from_columns(self.alpha.spec(), self.dim(), &cols)
    }

    pub fn contraction_subspace(&self) -> Matrix {
        self.subspace(Part::Contraction)
    }
    pub fn levi_subspace(&self) -> Matrix {
        self.subspace(Part::Levi)
    }
    pub fn anticontraction_subspace(&self) -> Matrix {
        self.subspace(Part::AntiContraction)
    }
    pub fn subspace_plus(&self) -> Matrix {
        self.subspace(Part::Plus)
    }
    pub fn subspace_minus(&self) -> Matrix {
        self.subspace(Part::Minus)
    }

    /// Matrix of `α` restricted to a part, block diagonal in the component
    /// coordinates.
    pub fn restriction(&self, part: Part) -> Matrix {
        let idx = self.indices(part);
        let n: usize = idx.iter().map(|&i| self.components[i].dim()).sum();
        let mut m = Matrix::zeros(self.alpha.spec(), n, n);
        let mut off = 0;
        for &i in &idx {
            let b = &self.components[i].block;
            for r in 0..b.rows() {
                for c in 0..b.cols() {
                    m.set(off + r, off + c, b.get(r, c).clone());
                }
            }
            off += b.rows();
        }
        m
    }

    /// Component coordinates of `x`, one vector per component.
    pub fn split(&self, x: &[Element]) -> Result<Vec<Vec<Element>>> {
        let c = self.change_inv.mul_vec(x)?;
        Ok((0..self.components.len()).map(|i| c[self.range(i)].to_vec()).collect())
    }

    /// `x = Σ x_ρ` with `x_ρ ∈ E_ρ`, in ambient coordinates.
    pub fn project(&self, x: &[Element]) -> Result<Vec<Vec<Element>>> {
        let parts = self.split(x)?;
        parts.iter().zip(&self.components).map(|(c, comp)| comp.basis.mul_vec(c)).collect()
    }

    /// Sum of the projections onto the components of `part`.
    pub fn project_part(&self, x: &[Element], part: Part) -> Result<Vec<Element>> {
        let proj = self.project(x)?;
        let mut acc = vec![Element::zero(self.alpha.spec()); self.dim()];
        for i in self.indices(part) {
            acc = vec_add(&acc, &proj[i]);
        }
        Ok(acc)
    }

    /// Random vector of `E_ρ` for component `i`, coordinates of valuation
    /// at least `vmin`.
    pub fn random_in_component<R: Rng + ?Sized>(&self, i: usize, vmin: i32, rng: &mut R) -> Vec<Element> {
        let comp = &self.components[i];
        let c: Vec<Element> = (0..comp.dim()).map(|_| Element::random(self.alpha.spec(), vmin, rng)).collect();
        comp.basis.mul_vec(&c).expect("basis shape")
    }
}

// ---------------------------------------------------------------------------
// adapted norms

/// Norm data on one component: the lattice `Λ` is invariant under
/// `β = π^-h A^e`, and `N(x) = max_{k<e} q^(hk/e) · q^(-depth_Λ(A^k x))`.
#[derive(Clone, Debug)]
pub struct NormComponent {
    pub slope: Rational,
    pub h: i64,
    pub e: i64,
    pub lattice: Lattice,
    /// `A^k` for `0 <= k < e`.
    powers: Vec<Matrix>,
    /// `A^-k` for `0 <= k < e`.
    inv_powers: Vec<Matrix>,
    pub saturation_steps: usize,
}

#[derive(Clone, Debug)]
pub struct AdaptedNorm {
    dec: SpectralDecomposition,
    comps: Vec<NormComponent>,
}

/// Either the max-norm of the standard coordinates or an adapted norm.
#[derive(Clone, Debug)]
pub enum Norm {
    Max,
    Adapted(AdaptedNorm),
}

/// Builds the adapted norm by saturating `O^k` under `β` and `β^-1` in
/// every component.
pub fn adapted_norm(dec: &SpectralDecomposition) -> Result<AdaptedNorm> {
    let spec = dec.alpha.spec().clone();
    let d = dec.dim();
    let budget = 4 * d * spec.precision() as usize;
    let mut comps = Vec::new();
    for (i, c) in dec.components.iter().enumerate() {
        let k = c.dim();
        let a = &c.block;
        let beta = a.pow(c.e)?.shift(-c.h as i32);
        let beta_inv = beta.inverse()?;
        let mut lat = Lattice::standard(&spec, k);
        let mut steps = 0;
        loop {
            let cols = lat.basis().columns();
            let mut gens = cols.clone();
            for x in &cols {
                gens.push(beta.mul_vec(x)?);
                gens.push(beta_inv.mul_vec(x)?);
            }
            let next = Lattice::from_generators(&spec, k, &gens)?;
            if next.eq_lattice(&lat) {
                break;
            }
            lat = next;
            steps += 1;
            if steps > budget {
                return Err(Error::SaturationBudget { component: i });
            }
        }
        for &ex in lat.exponents() {
            spec.check_margin(ex as i64, "saturated lattice")?;
        }
        let mut powers = vec![Matrix::identity(&spec, k)];
        let mut inv_powers = vec![Matrix::identity(&spec, k)];
        let a_inv = a.inverse()?;
        for j in 1..c.e as usize {
            powers.push(powers[j - 1].mul(a)?);
            inv_powers.push(inv_powers[j - 1].mul(&a_inv)?);
        }
        comps.push(NormComponent {
            slope: c.slope,
            h: c.h,
            e: c.e,
            lattice: lat,
            powers,
            inv_powers,
            saturation_steps: steps,
        });
    }
    Ok(AdaptedNorm { dec: dec.clone(), comps })
}

/// Exponent `t` of the open ball `{N < q^t}` as a lattice depth condition:
/// `q^a < q^t` iff `a < t`.
fn open_depth(shift: Rational, t: Rational) -> i32 {
    // depth > shift - t
    ((shift - t).floor().to_integer() + 1) as i32
}

impl AdaptedNorm {
    pub fn decomposition(&self) -> &SpectralDecomposition {
        &self.dec
    }

    pub fn components(&self) -> &[NormComponent] {
        &self.comps
    }

    /// Norm exponent of component coordinates `c` of component `i`;
    /// `None` for zero.
    pub fn component_exponent(&self, i: usize, c: &[Element]) -> Result<Option<Rational>> {
        if is_negligible_vec(c) {
            return Ok(None);
        }
        let nc = &self.comps[i];
        let mut best: Option<Rational> = None;
        for (k, pk) in nc.powers.iter().enumerate() {
            let y = pk.mul_vec(c)?;
            let Some(depth) = nc.lattice.depth(&y)? else { continue };
            let val = Rational::new(nc.h * k as i64, nc.e) - Rational::from_integer(depth as i64);
            best = Some(best.map_or(val, |b: Rational| b.max(val)));
        }
        Ok(best)
    }

    /// `N(x)` for `x` in ambient coordinates.
    pub fn eval(&self, x: &[Element]) -> Result<AbsValue> {
        let parts = self.dec.split(x)?;
        let mut best: Option<Rational> = None;
        for (i, c) in parts.iter().enumerate() {
            if let Some(v) = self.component_exponent(i, c)? {
                best = Some(best.map_or(v, |b: Rational| b.max(v)));
            }
        }
        Ok(best.map_or(AbsValue::Zero, AbsValue::from_exponent))
    }

    /// `{x ∈ E_ρ : N(x) < q^t}` in the coordinates of component `i`.
    pub fn component_ball(&self, i: usize, t: Rational) -> Result<Lattice> {
        let nc = &self.comps[i];
        let mut acc: Option<Lattice> = None;
        for (k, inv) in nc.inv_powers.iter().enumerate() {
            let m = open_depth(Rational::new(nc.h * k as i64, nc.e), t);
            let lk = nc.lattice.scaled(m).image(inv)?;
            acc = Some(match acc {
                None => lk,
                Some(a) => a.intersection(&lk)?,
            });
        }
        Ok(acc.expect("at least one shift"))
    }

    /// The open ball `{x : N(x) < q^t}` as a lattice in ambient coordinates.
    pub fn ball(&self, t: Rational) -> Result<Lattice> {
        let spec = self.dec.alpha.spec();
        let mut gens = Vec::new();
        for (i, comp) in self.dec.components.iter().enumerate() {
            let b = self.component_ball(i, t)?;
            for c in b.basis().columns() {
                gens.push(comp.basis.mul_vec(&c)?);
            }
        }
        Lattice::from_generators(spec, self.dec.dim(), &gens)
    }

    /// Whether every `Λ` satisfies `βΛ = Λ` exactly.
    pub fn lattices_invariant(&self) -> Result<bool> {
        for (nc, c) in self.comps.iter().zip(&self.dec.components) {
            let beta = c.block.pow(c.e)?.shift(-c.h as i32);
            if !nc.lattice.image(&beta)?.eq_lattice(&nc.lattice) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Least common denominator of the slopes; norm values lie in
    /// `q^((1/E) Z)`.
    pub fn value_denominator(&self) -> i64 {
        self.comps.iter().fold(1, |acc, c| acc.lcm(&c.e))
    }
}

impl Norm {
    pub fn eval(&self, x: &[Element]) -> Result<AbsValue> {
        match self {
            Norm::Max => Ok(match crate::linalg::min_valuation(x) {
                _ if is_negligible_vec(x) => AbsValue::Zero,
                Some(v) => AbsValue::from_int_exponent(-(v as i64)),
                None => AbsValue::Zero,
            }),
            Norm::Adapted(n) => n.eval(x),
        }
    }

    /// The open ball of radius `q^t` in ambient coordinates.
    pub fn ball(&self, spec: &alloc::sync::Arc<crate::FieldSpec>, d: usize, t: Rational) -> Result<Lattice> {
        match self {
            Norm::Max => Ok(Lattice::standard(spec, d).scaled(open_depth(Rational::zero(), t))),
            Norm::Adapted(n) => n.ball(t),
        }
    }

    /// Smallest grid value `t' >= t` of the norm's value group; the open
    /// balls of radius `q^t` and `q^t'` coincide.
    pub fn effective_radius(&self, t: Rational) -> Rational {
        let den = match self {
            Norm::Max => 1,
            Norm::Adapted(n) => n.value_denominator(),
        };
        (t * Rational::from_integer(den)).ceil() / Rational::from_integer(den)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Norm::Max => "max",
            Norm::Adapted(_) => "adapted",
        }
    }
}

/// Outcome of checking the axioms A1-A3 on samples.
#[derive(Clone, Debug, Default)]
pub struct AdaptedReport {
    pub samples: usize,
    pub a1: bool,
    pub a2: bool,
    pub a3: bool,
    /// `βΛ = Λ` for every component (adapted norms only).
    pub lattices_invariant: Option<bool>,
    pub failures: Vec<String>,
}

impl AdaptedReport {
    pub fn passed(&self) -> bool {
        self.a1 && self.a2 && self.a3 && self.lattices_invariant != Some(false)
    }
}

/// Checks A1 on random triples, A2 on random mixtures of components and A3
/// on random vectors of each component, all as exact exponent identities.
pub fn verify_adapted<R: Rng + ?Sized>(
    norm: &Norm,
    dec: &SpectralDecomposition,
    samples: usize,
    rng: &mut R,
) -> Result<AdaptedReport> {
    let alpha = dec.alpha();
    let spec = alpha.spec();
    let d = dec.dim();
    let mut rep = AdaptedReport { samples, a1: true, a2: true, a3: true, ..Default::default() };
    if let Norm::Adapted(n) = norm {
        rep.lattices_invariant = Some(n.lattices_invariant()?);
    }
    let vrange = 2;
    for s in 0..samples {
        // A1
        let x: Vec<Element> = (0..d).map(|_| Element::random(spec, -vrange, rng)).collect();
        let y: Vec<Element> = (0..d).map(|_| Element::random(spec, -vrange, rng)).collect();
        let (nx, ny, nxy) = (norm.eval(&x)?, norm.eval(&y)?, norm.eval(&vec_add(&x, &y))?);
        if nxy > nx.max(ny) || (nx != ny && nxy != nx.max(ny)) {
            rep.a1 = false;
            rep.failures.push(format!("A1 sample {s}: N(x+y) = {nxy}, N(x) = {nx}, N(y) = {ny}"));
        }
        // A2
        let mut parts = Vec::new();
        let mut mix = vec![Element::zero(spec); d];
        for i in 0..dec.components().len() {
            let v = if rng.gen_bool(0.8) {
                dec.random_in_component(i, -vrange, rng)
            } else {
                vec![Element::zero(spec); d]
            };
            parts.push(norm.eval(&v)?);
            mix = vec_add(&mix, &v);
        }
        let expect = parts.iter().copied().max().unwrap_or(AbsValue::Zero);
        let got = norm.eval(&mix)?;
        if got != expect {
            rep.a2 = false;
            rep.failures.push(format!("A2 sample {s}: N(Σx_ρ) = {got}, max N(x_ρ) = {expect}"));
        }
        // A3
        for (i, comp) in dec.components().iter().enumerate() {
            let v = dec.random_in_component(i, -vrange, rng);
            let nv = norm.eval(&v)?;
            let nav = norm.eval(&alpha.mul_vec(&v)?)?;
            if nav != comp.abs.mul(nv) {
                rep.a3 = false;
                rep.failures.push(format!(
                    "A3 sample {s}, ρ = {}: N(αx) = {nav}, ρN(x) = {}",
                    comp.abs,
                    comp.abs.mul(nv)
                ));
            }
        }
    }
    Ok(rep)
}

/// Norm exponents of `x, αx, ..., α^(n-1) x`. The sequence stops early,
/// with `truncated` set, once the iterate leaves the precision margin.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitNorms {
    pub values: Vec<AbsValue>,
    pub truncated: bool,
}

pub fn orbit_norms(alpha: &Matrix, x: &[Element], norm: &Norm, n: usize) -> Result<OrbitNorms> {
    let spec = alpha.spec();
    let margin = spec.margin();
    let mut values = Vec::with_capacity(n);
    let mut y = x.to_vec();
    let zero_start = is_negligible_vec(x);
    for k in 0..n {
        if k > 0 {
            y = alpha.mul_vec(&y)?;
        }
        let lost = !zero_start
            && (is_negligible_vec(&y) || crate::linalg::min_valuation(&y).is_some_and(|v| v < -margin));
        if lost {
            return Ok(OrbitNorms { values, truncated: true });
        }
        values.push(norm.eval(&y)?);
    }
    Ok(OrbitNorms { values, truncated: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localfield::FieldSpec;
    use alloc::sync::Arc;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q3() -> Arc<FieldSpec> {
        FieldSpec::padic(3, 32).unwrap()
    }

    fn e(spec: &Arc<FieldSpec>, i: usize, d: usize) -> Vec<Element> {
        (0..d).map(|j| if i == j { Element::one(spec) } else { Element::zero(spec) }).collect()
    }

    #[test]
    fn diagonal_decomposition() {
        let k = q3();
        let a = Matrix::diag_uniformizer(&k, &[-1, 1]);
        let dec = decompose(&a).unwrap();
        assert_eq!(dec.components().len(), 2);
        assert_eq!(dec.components()[0].abs, AbsValue::from_int_exponent(1));
        assert_eq!(dec.components()[0].basis.column(0), e(&k, 0, 2));
        assert_eq!(dec.contraction_subspace().column(0), e(&k, 1, 2));
        assert_eq!(dec.levi_subspace().cols(), 0);
        assert_eq!(dec.anticontraction_subspace().column(0), e(&k, 0, 2));
        assert_eq!(dec.subspace_plus().cols(), 1);
        assert_eq!(dec.subspace_minus().cols(), 1);
    }

    #[test]
    fn identity_is_one_component() {
        let k = q3();
        let dec = decompose(&Matrix::identity(&k, 3)).unwrap();
        assert_eq!(dec.components().len(), 1);
        assert!(dec.components()[0].abs.is_one());
        assert_eq!(dec.levi_subspace().cols(), 3);
        assert_eq!(dec.subspace_plus().cols(), 3);
        assert_eq!(dec.subspace_minus().cols(), 3);
    }

    #[test]
    fn diag_one_p_parts() {
        let k = q3();
        let dec = decompose(&Matrix::diag_uniformizer(&k, &[0, 1])).unwrap();
        assert_eq!(dec.subspace_plus().cols(), 1);
        assert_eq!(dec.subspace_minus().cols(), 2);
    }

    fn companion_sqrt_p(k: &Arc<FieldSpec>) -> Matrix {
        let mut m = Matrix::zeros(k, 2, 2);
        m.set(1, 0, Element::one(k));
        m.set(0, 1, Element::uniformizer(k));
        m
    }

    #[test]
    fn fractional_slope_component() {
        let k = q3();
        let dec = decompose(&companion_sqrt_p(&k)).unwrap();
        assert_eq!(dec.components().len(), 1);
        let c = &dec.components()[0];
        assert_eq!((c.h, c.e, c.dim()), (1, 2, 2));
        assert_eq!(c.abs, AbsValue::from_exponent(Rational::new(-1, 2)));
    }

    #[test]
    fn adapted_norm_scales_exactly() {
        let k = q3();
        let a = companion_sqrt_p(&k);
        let dec = decompose(&a).unwrap();
        let norm = Norm::Adapted(adapted_norm(&dec).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rep = verify_adapted(&norm, &dec, 100, &mut rng).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures);
        assert_eq!(norm.eval(&[Element::zero(&k), Element::zero(&k)]).unwrap(), AbsValue::Zero);
    }

    #[test]
    fn unipotent_block_keeps_standard_lattice() {
        let k = q3();
        let a = Matrix::from_integers(&k, &[&[1, 1], &[0, 1]]);
        let dec = decompose(&a).unwrap();
        let n = adapted_norm(&dec).unwrap();
        assert_eq!(n.components()[0].saturation_steps, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rep = verify_adapted(&Norm::Adapted(n), &dec, 50, &mut rng).unwrap();
        assert!(rep.passed());
    }

    #[test]
    fn max_norm_fails_for_sheared_diagonal() {
        let k = q3();
        let d = Matrix::diag_uniformizer(&k, &[-1, 1]);
        let mut g = Matrix::identity(&k, 2);
        g.set(0, 1, Element::uniformizer_pow(&k, -2));
        let a = d.conjugate_by(&g).unwrap();
        let dec = decompose(&a).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rep = verify_adapted(&Norm::Max, &dec, 30, &mut rng).unwrap();
        assert!(!rep.a2 && !rep.passed());
        let adapted = Norm::Adapted(adapted_norm(&dec).unwrap());
        assert!(verify_adapted(&adapted, &dec, 30, &mut rng).unwrap().passed());
    }

    #[test]
    fn orbit_shapes() {
        let k = q3();
        let a = Matrix::diag_uniformizer(&k, &[-1, 1]);
        let dec = decompose(&a).unwrap();
        let norm = Norm::Adapted(adapted_norm(&dec).unwrap());
        let x = vec![Element::one(&k), Element::one(&k)];
        let o = orbit_norms(&a, &x, &norm, 5).unwrap();
        let ex: Vec<i64> = o.values.iter().map(|v| v.exponent().unwrap().to_integer()).collect();
        assert_eq!(ex, vec![0, 1, 2, 3, 4]);
        let down = orbit_norms(&a, &e(&k, 1, 2), &norm, 4).unwrap();
        let ex: Vec<i64> = down.values.iter().map(|v| v.exponent().unwrap().to_integer()).collect();
        assert_eq!(ex, vec![0, -1, -2, -3]);
    }
}
