//! Nilpotent Lie algebras over `O` and the group law given by the
//! Baker-Campbell-Hausdorff series in logarithmic coordinates.
//!
//! Elements of the group are vectors of the Lie algebra; `x * y` is the
//! truncated BCH sum, `x^-1 = -x` and `x^n = n x`.

use alloc::collections::BTreeMap;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{is_negligible_vec, min_valuation, vec_add, vec_scale, vec_sub, Lattice, Matrix, OracleMode, ENUMERATION_LIMIT};
use crate::localfield::{Element, FieldSpec, Rational};
use crate::scaletidy::{scale_of, ScaleResult};
use crate::spectral::{adapted_norm, decompose, Norm, Part, SpectralDecomposition};

/// Highest nilpotency class supported by the built-in BCH series.
pub const MAX_CLASS: usize = 5;

/// Word in the letters `0 = x`, `1 = y`.
type Word = Vec<u8>;

/// Homogeneous components of `log(e^x e^y)` up to degree `n`, as Lie
/// elements `Σ c_w [..[w_1, w_2], .., w_k]` (left-normed brackets).
fn bch_series(n: usize) -> Vec<(Word, Rational)> {
    type Series = BTreeMap<Word, Rational>;
    fn mul(a: &Series, b: &Series, n: usize) -> Series {
        let mut out = Series::new();
        for (u, cu) in a {
            for (v, cv) in b {
                if u.len() + v.len() > n {
                    continue;
                }
                let mut w = u.clone();
                w.extend_from_slice(v);
                *out.entry(w).or_insert_with(Rational::zero) += cu * cv;
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }
    let exp = |letter: u8| {
        let mut s = Series::new();
        let mut fact = 1i64;
        for k in 0..=n {
            if k > 0 {
                fact *= k as i64;
            }
            s.insert(vec![letter; k], Rational::new(1, fact));
        }
        s
    };
    let mut w = mul(&exp(0), &exp(1), n);
    w.remove(&Word::new());
    let mut log = Series::new();
    let mut pw = w.clone();
    for k in 1..=n {
        let sign = if k % 2 == 1 { 1 } else { -1 };
        for (word, c) in &pw {
            *log.entry(word.clone()).or_insert_with(Rational::zero) += c * Rational::new(sign, k as i64);
        }
        pw = mul(&pw, &w, n);
    }
    // Dynkin-Specht-Wever: a Lie polynomial P of degree k equals (1/k)
    // times the left-normed bracketing of its words.
    log.into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(word, c)| {
            let k = word.len() as i64;
            (word, c / Rational::from_integer(k))
        })
        .filter(|(w, _)| w.len() == 1 || w[0] != w[1])
        .collect()
}

/// Finite-dimensional nilpotent Lie algebra with structure constants in
/// `O`.
#[derive(Clone, Debug)]
pub struct NilpotentLieAlgebra {
    spec: Arc<FieldSpec>,
    dim: usize,
    /// `[e_i, e_j]` for `i < j`, nonzero ones only.
    table: Vec<(usize, usize, Vec<Element>)>,
    class: usize,
    series: Vec<(Word, Element)>,
}

impl NilpotentLieAlgebra {
    /// `brackets[i][j]` is `[e_i, e_j]`. Checks antisymmetry, integrality,
    /// Jacobi on all basis triples and nilpotency.
    pub fn new(spec: &Arc<FieldSpec>, dim: usize, brackets: &[Vec<Vec<Element>>]) -> Result<NilpotentLieAlgebra> {
        if dim == 0 {
            return Err(Error::InvalidAlgebra("dimension must be positive".into()));
        }
        if brackets.len() != dim || brackets.iter().any(|r| r.len() != dim || r.iter().any(|v| v.len() != dim)) {
            return Err(Error::Dimension(format!("structure constants must form a {dim}x{dim}x{dim} table")));
        }
        let mut table = Vec::new();
        for i in 0..dim {
            if !is_negligible_vec(&brackets[i][i]) {
                return Err(Error::InvalidAlgebra(format!("[e{i}, e{i}] is not zero")));
            }
            for j in i + 1..dim {
                let sum = vec_add(&brackets[i][j], &brackets[j][i]);
                if !is_negligible_vec(&sum) {
                    return Err(Error::InvalidAlgebra(format!("[e{i}, e{j}] + [e{j}, e{i}] is not zero")));
                }
                if !brackets[i][j].iter().all(Element::is_integral) {
                    return Err(Error::InvalidAlgebra(format!("[e{i}, e{j}] has a non-integral coefficient")));
                }
                if !is_negligible_vec(&brackets[i][j]) {
                    table.push((i, j, brackets[i][j].clone()));
                }
            }
        }
        let mut alg = NilpotentLieAlgebra { spec: spec.clone(), dim, table, class: 0, series: Vec::new() };
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    let (a, b, c) = (alg.basis(i), alg.basis(j), alg.basis(k));
                    let s1 = alg.bracket(&a, &alg.bracket(&b, &c));
                    let s2 = alg.bracket(&b, &alg.bracket(&c, &a));
                    let s3 = alg.bracket(&c, &alg.bracket(&a, &b));
                    if !is_negligible_vec(&vec_add(&vec_add(&s1, &s2), &s3)) {
                        return Err(Error::InvalidAlgebra(format!("Jacobi identity fails on (e{i}, e{j}, e{k})")));
                    }
                }
            }
        }
        alg.class = alg.lower_central_series()?.len();
        if alg.class > MAX_CLASS {
            return Err(Error::Precondition(format!("nilpotency class {} exceeds {MAX_CLASS}", alg.class)));
        }
        if alg.class >= 2 && spec.p() <= 5 {
            return Err(Error::Precondition(format!(
                "BCH denominators need p > 5 for class {}, got p = {}",
                alg.class,
                spec.p()
            )));
        }
        let mut series = Vec::new();
        for (w, c) in bch_series(alg.class) {
            let e = Element::from_rational(spec, *c.numer(), *c.denom())?;
            series.push((w, e));
        }
        alg.series = series;
        Ok(alg)
    }

    /// Builds the table from sparse integer data `[e_i, e_j] = Σ c e_k`.
    pub fn from_integer_brackets(spec: &Arc<FieldSpec>, dim: usize, data: &[(usize, usize, &[(usize, i64)])]) -> Result<NilpotentLieAlgebra> {
        let zero = vec![vec![vec![Element::zero(spec); dim]; dim]; dim];
        let mut t = zero;
        for &(i, j, terms) in data {
            if i >= dim || j >= dim || terms.iter().any(|&(k, _)| k >= dim) {
                return Err(Error::Dimension(format!("bracket index out of range for dimension {dim}")));
            }
            for &(k, c) in terms {
                let e = Element::from_integer(spec, c);
                t[i][j][k] = &t[i][j][k] + &e;
                t[j][i][k] = &t[j][i][k] - &e;
            }
        }
        NilpotentLieAlgebra::new(spec, dim, &t)
    }

    pub fn abelian(spec: &Arc<FieldSpec>, dim: usize) -> Result<NilpotentLieAlgebra> {
        NilpotentLieAlgebra::from_integer_brackets(spec, dim, &[])
    }

    /// `[e_0, e_1] = e_2`.
    pub fn heisenberg(spec: &Arc<FieldSpec>) -> Result<NilpotentLieAlgebra> {
        NilpotentLieAlgebra::from_integer_brackets(spec, 3, &[(0, 1, &[(2, 1)])])
    }

    /// `[e_0, e_i] = e_(i+1)` for `1 <= i < dim - 1`, of class `dim - 1`.
    pub fn filiform(spec: &Arc<FieldSpec>, dim: usize) -> Result<NilpotentLieAlgebra> {
        if !(3..=MAX_CLASS + 1).contains(&dim) {
            return Err(Error::InvalidAlgebra(format!("filiform algebras here have dimension 3 to {}", MAX_CLASS + 1)));
        }
        let terms: Vec<[(usize, i64); 1]> = (1..dim - 1).map(|i| [(i + 1, 1)]).collect();
        let data: Vec<(usize, usize, &[(usize, i64)])> = terms.iter().enumerate().map(|(i, t)| (0, i + 1, &t[..])).collect();
        NilpotentLieAlgebra::from_integer_brackets(spec, dim, &data)
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn class(&self) -> usize {
        self.class
    }

    /// Full structure-constant table `[e_i, e_j]`.
    pub fn structure_constants(&self) -> Vec<Vec<Vec<Element>>> {
        let d = self.dim;
        let mut t = vec![vec![vec![Element::zero(&self.spec); d]; d]; d];
        for (i, j, v) in &self.table {
            t[*i][*j] = v.clone();
            t[*j][*i] = v.iter().map(|x| -x).collect();
        }
        t
    }

    pub fn basis(&self, i: usize) -> Vec<Element> {
        let mut v = vec![Element::zero(&self.spec); self.dim];
        v[i] = Element::one(&self.spec);
        v
    }

    pub fn zero(&self) -> Vec<Element> {
        vec![Element::zero(&self.spec); self.dim]
    }

    pub fn bracket(&self, x: &[Element], y: &[Element]) -> Vec<Element> {
        let mut out = self.zero();
        for (i, j, v) in &self.table {
            let c = &(&x[*i] * &y[*j]) - &(&x[*j] * &y[*i]);
            if c.is_zero() {
                continue;
            }
            for (k, vk) in v.iter().enumerate() {
                if !vk.is_zero() {
                    out[k] = &out[k] + &(&c * vk);
                }
            }
        }
        out
    }

    /// Dimensions of `γ_1 ⊃ γ_2 ⊃ ...` down to the last nonzero term.
    pub fn lower_central_series(&self) -> Result<Vec<usize>> {
        let mut gens: Vec<Vec<Element>> = (0..self.dim).map(|i| self.basis(i)).collect();
        let mut dims = Vec::new();
        while !gens.is_empty() {
            dims.push(gens.len());
            if dims.len() > self.dim {
                return Err(Error::InvalidAlgebra("lower central series does not reach zero".into()));
            }
            let mut next: Vec<Vec<Element>> = Vec::new();
            for i in 0..self.dim {
                for g in &gens {
                    let b = self.bracket(&self.basis(i), g);
                    if is_negligible_vec(&b) {
                        continue;
                    }
                    next.push(b);
                    if Matrix::from_columns(&self.spec, self.dim, &next).rank() < next.len() {
                        next.pop();
                    }
                }
            }
            gens = next;
        }
        Ok(dims)
    }

    /// Whether `[L, L] ⊆ L` for the lattice `L`, checked on basis pairs.
    pub fn is_lie_lattice(&self, l: &Lattice) -> bool {
        let cols = l.basis().columns();
        cols.iter().enumerate().all(|(i, a)| cols[i + 1..].iter().all(|b| l.contains(&self.bracket(a, b))))
    }

    fn check_length(&self, x: &[Element]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::Dimension(format!("vector of length {} in dimension {}", x.len(), self.dim)));
        }
        Ok(())
    }

    /// BCH product without the ball check.
    pub fn star(&self, x: &[Element], y: &[Element]) -> Vec<Element> {
        // Left-normed brackets of prefixes: level k holds [..[w_1, w_2], .., w_k]
        // for every word of length k, indexed by its bits.
        let letters = [x.to_vec(), y.to_vec()];
        let mut levels: Vec<Vec<Vec<Element>>> = vec![letters.to_vec()];
        for k in 1..self.class {
            let prev = &levels[k - 1];
            let mut cur = Vec::with_capacity(prev.len() * 2);
            for p in prev {
                for l in &letters {
                    cur.push(if p.iter().all(Element::is_zero) { self.zero() } else { self.bracket(p, l) });
                }
            }
            levels.push(cur);
        }
        let mut out = self.zero();
        for (w, c) in &self.series {
            let idx = w.iter().fold(0usize, |acc, &b| acc * 2 + b as usize);
            let v = &levels[w.len() - 1][idx];
            if !v.iter().all(Element::is_zero) {
                out = vec_add(&out, &vec_scale(v, c));
            }
        }
        out
    }
}

fn check_ball(x: &[Element]) -> Result<()> {
    match min_valuation(x) {
        Some(v) if v < 1 && !is_negligible_vec(x) => Err(Error::OutsideBall { level: v }),
        _ => Ok(()),
    }
}

/// `x * y`; both arguments must have coordinates of valuation at least 1.
pub fn bch_mul(alg: &NilpotentLieAlgebra, x: &[Element], y: &[Element]) -> Result<Vec<Element>> {
    alg.check_length(x)?;
    alg.check_length(y)?;
    check_ball(x)?;
    check_ball(y)?;
    Ok(alg.star(x, y))
}

pub fn bch_inv(alg: &NilpotentLieAlgebra, x: &[Element]) -> Result<Vec<Element>> {
    alg.check_length(x)?;
    check_ball(x)?;
    Ok(x.iter().map(|e| -e).collect())
}

/// `x^n = n x` (powers of one element commute).
pub fn power(alg: &NilpotentLieAlgebra, x: &[Element], n: i64) -> Result<Vec<Element>> {
    alg.check_length(x)?;
    check_ball(x)?;
    Ok(vec_scale(x, &Element::from_integer(alg.spec(), n)))
}

/// `n`-fold product by repeated squaring with the BCH law; equal to
/// [`power`] on exact inputs and used to test it.
pub fn power_by_squaring(alg: &NilpotentLieAlgebra, x: &[Element], n: i64) -> Vec<Element> {
    let mut base: Vec<Element> = if n < 0 { x.iter().map(|e| -e).collect() } else { x.to_vec() };
    let mut k = n.unsigned_abs();
    let mut acc = alg.zero();
    while k > 0 {
        if k & 1 == 1 {
            acc = alg.star(&acc, &base);
        }
        base = alg.star(&base, &base);
        k >>= 1;
    }
    acc
}

/// Automorphism of the group given by a bracket-preserving matrix.
#[derive(Clone, Debug)]
pub struct LieAutomorphism {
    pub matrix: Matrix,
}

impl LieAutomorphism {
    pub fn apply(&self, x: &[Element]) -> Result<Vec<Element>> {
        self.matrix.mul_vec(x)
    }
}

pub fn automorphism_from_lie(alg: &NilpotentLieAlgebra, a: &Matrix) -> Result<LieAutomorphism> {
    if a.rows() != alg.dim() || a.cols() != alg.dim() {
        return Err(Error::Dimension("automorphism size differs from the algebra dimension".into()));
    }
    if a.det()?.is_negligible() {
        return Err(Error::Singular);
    }
    for i in 0..alg.dim() {
        for j in i + 1..alg.dim() {
            let lhs = a.mul_vec(&alg.bracket(&alg.basis(i), &alg.basis(j)))?;
            let rhs = alg.bracket(&a.column(i), &a.column(j));
            if !is_negligible_vec(&vec_sub(&lhs, &rhs)) {
                return Err(Error::NotBracketPreserving(format!("A[e{i}, e{j}] differs from [Ae{i}, Ae{j}]")));
            }
        }
    }
    Ok(LieAutomorphism { matrix: a.clone() })
}

/// Group-level scale at one ball level, with the additive and literal
/// coset counts.
#[derive(Clone, Debug)]
pub struct GroupScaleReport {
    pub level: i32,
    /// Exponent of `[A(V_+) : V_+]` from Hermite diagonals.
    pub exponent: i64,
    pub value: Option<u128>,
    /// Number of `*`-cosets found by closing `{V_+}` under left
    /// multiplication, when run.
    pub star_cosets: Option<u64>,
    /// Whether distinct representatives were checked to lie in distinct
    /// `*`-cosets pairwise.
    pub pairwise_checked: bool,
    pub linear: ScaleResult,
    pub agree: bool,
}

/// Cosets are compared pairwise only below this count.
const PAIRWISE_LIMIT: u64 = 256;

/// `V_+ = V ∩ E_+` in ambient coordinates together with a membership test.
struct PlusBall {
    dec: SpectralDecomposition,
    lattice: Lattice,
}

impl PlusBall {
    fn contains(&self, x: &[Element]) -> Result<bool> {
        let parts = self.dec.split(x)?;
        let plus = self.dec.indices(Part::Plus);
        let mut coords = Vec::new();
        for (i, c) in parts.iter().enumerate() {
            if plus.contains(&i) {
                coords.extend_from_slice(c);
            } else if !is_negligible_vec(c) {
                return Ok(false);
            }
        }
        Ok(self.lattice.contains(&coords))
    }
}

/// `s_G(A)` from the ball of the given level: `V = {N < q^(1 - level)}` for
/// the norm adapted to `A`.
pub fn group_scale(alg: &NilpotentLieAlgebra, aut: &LieAutomorphism, level: i32, mode: OracleMode) -> Result<GroupScaleReport> {
    if level < 1 {
        return Err(Error::OutsideBall { level });
    }
    let spec = alg.spec().clone();
    let d = alg.dim();
    let dec = decompose(&aut.matrix)?;
    let linear = scale_of(&dec)?;
    let norm = Norm::Adapted(adapted_norm(&dec)?);
    let v = norm.ball(&spec, d, Rational::from_integer(1 - level as i64))?;
    if !Lattice::standard(&spec, d).scaled(1).contains_lattice(&v) {
        return Err(Error::OutsideBall { level });
    }
    if !alg.is_lie_lattice(&v) {
        return Err(Error::NotSubgroup(format!("the level {level} ball is not closed under brackets")));
    }
    let p_plus = dec.subspace_plus();
    let a_plus = dec.restriction(Part::Plus);
    let (exponent, star_cosets, pairwise_checked) = if p_plus.cols() == 0 {
        (0, Some(1), true)
    } else {
        let vp = v.preimage(&p_plus)?;
        let avp = vp.image(&a_plus)?;
        let exponent = avp.index_hermite(&vp)?;
        let q = spec.q() as u128;
        let small = u32::try_from(exponent).ok().and_then(|e| q.checked_pow(e)).is_some_and(|n| n <= ENUMERATION_LIMIT as u128);
        let run = match mode {
            OracleMode::On => true,
            OracleMode::Off => false,
            OracleMode::Auto => small,
        };
        if run {
            let plus = PlusBall { dec: dec.clone(), lattice: vp.clone() };
            let gens: Vec<Vec<Element>> = avp.basis().columns().iter().map(|c| p_plus.mul_vec(c)).collect::<Result<_>>()?;
            let (count, pairwise) = count_star_cosets(alg, &plus, &vp, &p_plus, &gens)?;
            (exponent, Some(count), pairwise)
        } else {
            (exponent, None, false)
        }
    };
    let value = u32::try_from(exponent).ok().and_then(|e| (spec.q() as u128).checked_pow(e));
    let agree = exponent == linear.exponent && star_cosets.is_none_or(|n| Some(n as u128) == value);
    if !agree {
        return Err(Error::OracleDisagreement(format!(
            "group index q^{exponent} ({star_cosets:?} cosets counted) against linear scale q^{}",
            linear.exponent
        )));
    }
    Ok(GroupScaleReport { level, exponent, value, star_cosets, pairwise_checked, linear, agree })
}

/// Closes `{V_+}` under left multiplication by `π^j t g` for the generators
/// `g` of `A(V_+)`. Representatives are the additive reductions; each new
/// element is checked to lie in the `*`-coset of its representative.
fn count_star_cosets(
    alg: &NilpotentLieAlgebra,
    plus: &PlusBall,
    vp: &Lattice,
    p_plus: &Matrix,
    gens: &[Vec<Element>],
) -> Result<(u64, bool)> {
    let spec = alg.spec();
    let depth = 64 - ENUMERATION_LIMIT.leading_zeros() as i32;
    let mut steps = Vec::new();
    for g in gens {
        for j in 0..depth {
            for t in spec.residue().additive_basis() {
                let c = Element::residue_constant(spec, t).shift(j);
                let step = vec_scale(g, &c);
                // steps inside V_+ fix every coset
                if !plus.contains(&step)? {
                    steps.push(step);
                }
            }
        }
    }
    let key = |x: &[Element]| -> Result<Vec<Element>> {
        let c = plus.dec.split(x)?;
        let idx = plus.dec.indices(Part::Plus);
        let coords: Vec<Element> = idx.iter().flat_map(|&i| c[i].clone()).collect();
        p_plus.mul_vec(&vp.reduce(&coords))
    };
    let zero = alg.zero();
    let mut seen: BTreeSet<Vec<Element>> = BTreeSet::new();
    seen.insert(zero.clone());
    let mut frontier = vec![zero];
    while let Some(x) = frontier.pop() {
        for s in &steps {
            let z = alg.star(s, &x);
            let k = key(&z)?;
            let neg: Vec<Element> = k.iter().map(|e| -e).collect();
            if !plus.contains(&alg.star(&neg, &z))? {
                return Err(Error::OracleDisagreement("an element is not in the *-coset of its representative".into()));
            }
            if seen.insert(k.clone()) {
                if seen.len() as u64 > ENUMERATION_LIMIT {
                    return Err(Error::QuotientTooLarge { limit: ENUMERATION_LIMIT });
                }
                frontier.push(k);
            }
        }
    }
    let n = seen.len() as u64;
    let pairwise = n <= PAIRWISE_LIMIT;
    if pairwise {
        let reps: Vec<&Vec<Element>> = seen.iter().collect();
        for (i, a) in reps.iter().enumerate() {
            let neg: Vec<Element> = a.iter().map(|e| -e).collect();
            for b in &reps[i + 1..] {
                if plus.contains(&alg.star(&neg, b))? {
                    return Err(Error::OracleDisagreement("two representatives share a *-coset".into()));
                }
            }
        }
    }
    Ok((n, pairwise))
}

/// Sampled check that `π^level O^d` is a group under `*`.
#[derive(Clone, Debug)]
pub struct BallSubgroupReport {
    pub level: i32,
    /// `[B, B] ⊆ B` on basis pairs, which makes every BCH term stay in `B`.
    pub lie_closed: bool,
    pub closed: bool,
    pub inverses: bool,
    /// `x * B_s = x + B_s` for `s >= level` on samples.
    pub coset_identity: bool,
    pub samples: usize,
    pub witness: Option<String>,
    pub notes: Vec<String>,
}

impl BallSubgroupReport {
    pub fn passed(&self) -> bool {
        self.lie_closed && self.closed && self.inverses && self.coset_identity
    }
}

pub fn verify_ball_subgroup<R: Rng + ?Sized>(alg: &NilpotentLieAlgebra, level: i32, samples: usize, rng: &mut R) -> Result<BallSubgroupReport> {
    let spec = alg.spec();
    let d = alg.dim();
    let ball = |s: i32| Lattice::standard(spec, d).scaled(s);
    let b = ball(level);
    let mut rep = BallSubgroupReport {
        level,
        lie_closed: alg.is_lie_lattice(&b),
        closed: true,
        inverses: true,
        coset_identity: true,
        samples,
        witness: None,
        notes: Vec::new(),
    };
    if level < 1 {
        rep.notes.push(format!(
            "level {level} lies outside the convergence ball; the series is a polynomial here since the class is {}",
            alg.class()
        ));
    }
    let sample = |s: i32, rng: &mut R| -> Vec<Element> { (0..d).map(|_| Element::random(spec, s, rng)).collect() };
    for _ in 0..samples {
        let x = sample(level, rng);
        let y = sample(level, rng);
        let xy = alg.star(&x, &y);
        if rep.closed && !b.contains(&xy) {
            rep.closed = false;
            rep.witness.get_or_insert_with(|| format!("x*y leaves the ball for x = {x:?}, y = {y:?}"));
        }
        let inv: Vec<Element> = x.iter().map(|e| -e).collect();
        if rep.inverses && !(b.contains(&inv) && is_negligible_vec(&alg.star(&x, &inv))) {
            rep.inverses = false;
            rep.witness.get_or_insert_with(|| format!("x*(-x) is not zero for x = {x:?}"));
        }
        let s = level + rng.gen_range(0..3);
        let bs = ball(s);
        let z = sample(s, rng);
        // x * z ∈ x + B_s and x + z ∈ x * B_s
        let left = bs.contains(&vec_sub(&alg.star(&x, &z), &x));
        let right = bs.contains(&alg.star(&inv, &vec_add(&x, &z)));
        if rep.coset_identity && !(left && right) {
            rep.coset_identity = false;
            rep.witness.get_or_insert_with(|| format!("x*B_{s} differs from x+B_{s} at x = {x:?}"));
        }
    }
    Ok(rep)
}

/// Whether `A^k x` tends to the identity: all eigenvalues of `A` have
/// absolute value below 1 and the adapted norms of the iterates decrease
/// strictly until the precision floor.
pub fn contractive_orbit_check(a: &Matrix, x: &[Element], n: usize) -> Result<bool> {
    let dec = decompose(a)?;
    if dec.components().iter().any(|c| !c.slope.is_positive()) {
        return Ok(false);
    }
    let norm = Norm::Adapted(adapted_norm(&dec)?);
    let orbit = crate::spectral::orbit_norms(a, x, &norm, n)?;
    Ok(orbit.values.windows(2).all(|w| w[1] < w[0] || (w[0].is_zero() && w[1].is_zero())))
}
