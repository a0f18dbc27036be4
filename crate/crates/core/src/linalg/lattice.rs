use alloc::collections::BTreeSet;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::matrix::{min_valuation, vec_add, vec_sub, Matrix};
use crate::error::{Error, Result};
use crate::localfield::{AbsValue, Element, FieldSpec};

/// Default bound on literal coset enumeration.
pub const ENUMERATION_LIMIT: u64 = 4096;

/// A full-rank O-lattice in K^d, stored by its column Hermite basis: upper
/// triangular, diagonal `π^k_i`, and every entry above the diagonal in row
/// `i` carrying only digits of exponent `< k_i`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Lattice {
    basis: Matrix,
    exps: Vec<i32>,
}

/// Whether to run literal coset enumeration next to the Hermite formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleMode {
    On,
    Off,
    /// Enumerate only when the quotient has at most [`ENUMERATION_LIMIT`] cosets.
    Auto,
}

/// `[L1 : L2] = q^exponent`, with the enumeration count when it ran.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexReport {
    pub exponent: i64,
    pub value: Option<u128>,
    pub enumerated: Option<u64>,
}

impl Lattice {
    /// `O^d`.
    pub fn standard(spec: &Arc<FieldSpec>, d: usize) -> Lattice {
        Lattice { basis: Matrix::identity(spec, d), exps: vec![0; d] }
    }

    /// `π^k_0 O ⊕ π^k_1 O ⊕ ...`.
    pub fn diagonal(spec: &Arc<FieldSpec>, ks: &[i32]) -> Lattice {
        Lattice { basis: Matrix::diag_uniformizer(spec, ks), exps: ks.to_vec() }
    }

    /// Hermite form of the O-span of the given columns.
    pub fn from_generators(spec: &Arc<FieldSpec>, d: usize, gens: &[Vec<Element>]) -> Result<Lattice> {
        if gens.iter().any(|g| g.len() != d) {
            return Err(Error::Dimension("generator length differs from the dimension".into()));
        }
        hermite(spec, d, gens.to_vec())
    }

    /// Hermite form of the span of the columns of `m`.
    pub fn from_matrix(m: &Matrix) -> Result<Lattice> {
        hermite(m.spec(), m.rows(), m.columns())
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        self.basis.spec()
    }

    pub fn dim(&self) -> usize {
        self.exps.len()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    /// Diagonal exponents `k_i`.
    pub fn exponents(&self) -> &[i32] {
        &self.exps
    }

    /// Covolume exponent `Σ k_i`: `[O^d : L] = q^(Σ k_i)` when `L ⊆ O^d`.
    pub fn covolume_exponent(&self) -> i64 {
        self.exps.iter().map(|&k| k as i64).sum()
    }

    /// `π^k L`.
    pub fn scaled(&self, k: i32) -> Lattice {
        Lattice { basis: self.basis.shift(k), exps: self.exps.iter().map(|&e| e + k).collect() }
    }

    /// `A L` for invertible `A`.
    pub fn image(&self, a: &Matrix) -> Result<Lattice> {
        Lattice::from_matrix(&a.mul(&self.basis)?)
    }

    /// Coordinates `c` with `x = B c`, by back substitution.
    pub fn coordinates(&self, x: &[Element]) -> Result<Vec<Element>> {
        let d = self.dim();
        if x.len() != d {
            return Err(Error::Dimension(format!("vector of length {} in dimension {d}", x.len())));
        }
        let mut r = x.to_vec();
        let mut c = vec![Element::zero(self.spec()); d];
        for i in (0..d).rev() {
            let ci = r[i].shift(-self.exps[i]);
            if !ci.is_zero() {
                for row in 0..=i {
                    r[row] = &r[row] - &(&ci * self.basis.get(row, i));
                }
            }
            c[i] = ci;
        }
        Ok(c)
    }

    pub fn contains(&self, x: &[Element]) -> bool {
        self.coordinates(x).is_ok_and(|c| c.iter().all(|e| e.is_integral()))
    }

    /// `other ⊆ self`.
    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        other.basis.columns().iter().all(|c| self.contains(c))
    }

    /// Canonical representative of `x + L`: coordinate `i` keeps only digits
    /// of exponent `< k_i`.
    pub fn reduce(&self, x: &[Element]) -> Vec<Element> {
        let mut r = x.to_vec();
        for i in (0..self.dim()).rev() {
            let (_, high) = r[i].split_at(self.exps[i]);
            if high.is_zero() {
                continue;
            }
            let c = high.shift(-self.exps[i]);
            for row in 0..=i {
                r[row] = &r[row] - &(&c * self.basis.get(row, i));
            }
        }
        r
    }

    pub fn sum(&self, other: &Lattice) -> Result<Lattice> {
        let mut gens = self.basis.columns();
        gens.extend(other.basis.columns());
        hermite(self.spec(), self.dim(), gens)
    }

    /// `{y : y·x ∈ O for all x ∈ L}`, spanned by the columns of `B^-T`.
    pub fn dual(&self) -> Result<Lattice> {
        Lattice::from_matrix(&self.basis.inverse()?.transpose())
    }

    pub fn intersection(&self, other: &Lattice) -> Result<Lattice> {
        self.dual()?.sum(&other.dual()?)?.dual()
    }

    /// `{c ∈ K^k : P c ∈ L}` for a `d x k` matrix `P` of rank `k`.
    pub fn preimage(&self, p: &Matrix) -> Result<Lattice> {
        let d = self.dim();
        let k = p.cols();
        if p.rows() != d {
            return Err(Error::Dimension("preimage basis height differs from the dimension".into()));
        }
        if p.rank() != k {
            return Err(Error::RankDeficient);
        }
        let mut cols = p.columns();
        for j in 0..d {
            if cols.len() == d {
                break;
            }
            let mut e = vec![Element::zero(self.spec()); d];
            e[j] = Element::one(self.spec());
            cols.push(e);
            if Matrix::from_columns(self.spec(), d, &cols).rank() != cols.len() {
                cols.pop();
            }
        }
        let full = Matrix::from_columns(self.spec(), d, &cols);
        let m = Lattice::from_matrix(&full.inverse()?.mul(&self.basis)?)?;
        let head = m.basis.submatrix(0..k, 0..k);
        Ok(Lattice { basis: head, exps: m.exps[..k].to_vec() })
    }

    /// `[self : sub]` from the Hermite diagonals. Errors unless `sub ⊆ self`.
    pub fn index_hermite(&self, sub: &Lattice) -> Result<i64> {
        if self.dim() != sub.dim() {
            return Err(Error::Dimension("lattices of different dimension".into()));
        }
        if !self.contains_lattice(sub) {
            return Err(Error::NotContained);
        }
        Ok(sub.covolume_exponent() - self.covolume_exponent())
    }

    /// Literal count of `self / sub` by closing `{0}` under translations by
    /// `π^j t^l b_i` (with `b_i` the basis of `self`) modulo `sub`.
    pub fn enumerate_cosets(&self, sub: &Lattice, limit: u64) -> Result<u64> {
        if !self.contains_lattice(sub) {
            return Err(Error::NotContained);
        }
        let spec = self.spec();
        let d = self.dim();
        let depth = 64 - limit.max(1).leading_zeros() as i32;
        let mut gens = Vec::new();
        for b in self.basis.columns() {
            for j in 0..depth {
                for t in spec.residue().additive_basis() {
                    let c = Element::residue_constant(spec, t).shift(j);
                    gens.push(sub.reduce(&b.iter().map(|x| x * &c).collect::<Vec<_>>()));
                }
            }
        }
        gens.retain(|g| g.iter().any(|x| !x.is_zero()));
        let zero = vec![Element::zero(spec); d];
        let mut seen: BTreeSet<Vec<Element>> = BTreeSet::new();
        seen.insert(zero.clone());
        let mut frontier = vec![zero];
        while let Some(x) = frontier.pop() {
            for g in &gens {
                let y = sub.reduce(&vec_add(&x, g));
                if seen.insert(y.clone()) {
                    if seen.len() as u64 > limit {
                        return Err(Error::QuotientTooLarge { limit });
                    }
                    frontier.push(y);
                }
            }
        }
        Ok(seen.len() as u64)
    }

    /// `[self : sub]` by the Hermite formula and, per `mode`, by literal
    /// coset enumeration; the two must agree.
    pub fn index_bruteforce(&self, sub: &Lattice, mode: OracleMode) -> Result<IndexReport> {
        let exponent = self.index_hermite(sub)?;
        let q = self.spec().q() as u128;
        let value = u32::try_from(exponent).ok().and_then(|e| q.checked_pow(e));
        let run = match mode {
            OracleMode::Off => false,
            OracleMode::On => true,
            OracleMode::Auto => value.is_some_and(|v| v <= ENUMERATION_LIMIT as u128),
        };
        let enumerated = if run { Some(self.enumerate_cosets(sub, ENUMERATION_LIMIT)?) } else { None };
        if let (Some(n), Some(v)) = (enumerated, value) {
            if n as u128 != v {
                return Err(Error::OracleDisagreement(format!(
                    "Hermite index q^{exponent} = {v} but {n} cosets enumerated"
                )));
            }
        }
        Ok(IndexReport { exponent, value, enumerated })
    }

    /// `[self : sub]` as an absolute value `q^exponent`.
    pub fn index_abs(&self, sub: &Lattice) -> Result<AbsValue> {
        Ok(AbsValue::from_int_exponent(self.index_hermite(sub)?))
    }

    /// Largest `m` with `x ∈ π^m L`; `None` for `x = 0`.
    pub fn depth(&self, x: &[Element]) -> Result<Option<i32>> {
        Ok(min_valuation(&self.coordinates(x)?))
    }

    pub fn eq_lattice(&self, other: &Lattice) -> bool {
        self.contains_lattice(other) && other.contains_lattice(self)
    }
}

/// Column Hermite form of the O-span of `gens` in K^d.
fn hermite(spec: &Arc<FieldSpec>, d: usize, mut gens: Vec<Vec<Element>>) -> Result<Lattice> {
    let mut basis: Vec<Vec<Element>> = vec![Vec::new(); d];
    let mut exps = vec![0i32; d];
    for i in (0..d).rev() {
        let mut best: Option<(usize, i32)> = None;
        for (c, g) in gens.iter().enumerate() {
            if g[i].is_negligible() {
                continue;
            }
            let v = g[i].valuation().unwrap();
            if best.is_none_or(|(_, bv)| v < bv) {
                best = Some((c, v));
            }
        }
        let (c, k) = best.ok_or(Error::RankDeficient)?;
        let piv = gens.swap_remove(c);
        let unit_inv = piv[i].shift(-k).inv()?;
        let mut col: Vec<Element> = piv.iter().map(|x| x * &unit_inv).collect();
        col[i] = Element::uniformizer_pow(spec, k);
        for row in col.iter_mut().skip(i + 1) {
            *row = Element::zero(spec);
        }
        for g in gens.iter_mut() {
            if g[i].is_zero() {
                continue;
            }
            let m = g[i].shift(-k);
            *g = vec_sub(g, &col.iter().map(|x| x * &m).collect::<Vec<_>>());
            g[i] = Element::zero(spec);
            for row in g.iter_mut().skip(i + 1) {
                *row = Element::zero(spec);
            }
        }
        basis[i] = col;
        exps[i] = k;
    }
    // reduce above-diagonal entries
    for j in 0..d {
        for i in (0..j).rev() {
            let (_, high) = basis[j][i].split_at(exps[i]);
            if high.is_zero() {
                continue;
            }
            let c = high.shift(-exps[i]);
            let col_i = basis[i].clone();
            for row in 0..=i {
                basis[j][row] = &basis[j][row] - &(&c * &col_i[row]);
            }
            basis[j][i] = basis[j][i].split_at(exps[i]).0;
        }
    }
    Ok(Lattice { basis: Matrix::from_columns(spec, d, &basis), exps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ball_index_formula_small() {
        let k = FieldSpec::padic(2, 16).unwrap();
        let l1 = Lattice::standard(&k, 2);
        let l2 = l1.scaled(1);
        let r = l1.index_bruteforce(&l2, OracleMode::On).unwrap();
        assert_eq!(r.value, Some(4));
        assert_eq!(r.enumerated, Some(4));
    }

    #[test]
    fn self_index_is_one() {
        let k = FieldSpec::laurent(3, 12).unwrap();
        let l = Lattice::diagonal(&k, &[1, -1, 2]);
        let r = l.index_bruteforce(&l, OracleMode::On).unwrap();
        assert_eq!((r.exponent, r.enumerated), (0, Some(1)));
    }

    #[test]
    fn diagonal_sublattice_index() {
        let k = FieldSpec::padic(3, 16).unwrap();
        let l1 = Lattice::standard(&k, 2);
        let l2 = Lattice::diagonal(&k, &[1, 2]);
        let r = l1.index_bruteforce(&l2, OracleMode::On).unwrap();
        assert_eq!(r.value, Some(27));
        assert_eq!(r.enumerated, Some(27));
        assert_eq!(l2.index_hermite(&l1), Err(Error::NotContained));
    }

    #[test]
    fn sum_with_larger_lattice() {
        let k = FieldSpec::padic(5, 16).unwrap();
        let o = Lattice::standard(&k, 2);
        let big = Lattice::diagonal(&k, &[-1, 0]);
        assert_eq!(o.sum(&o).unwrap(), o);
        let s = o.sum(&big).unwrap();
        assert_eq!(s.index_hermite(&o).unwrap(), 1);
    }

    #[test]
    fn hermite_is_canonical() {
        let k = FieldSpec::padic(3, 20).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let a = Matrix::random(&k, 3, 3, -1, &mut rng);
            if a.rank() < 3 {
                continue;
            }
            let g = Matrix::random_isometry(&k, 3, &mut rng);
            let l1 = Lattice::from_matrix(&a).unwrap();
            let l2 = Lattice::from_matrix(&a.mul(&g).unwrap()).unwrap();
            assert_eq!(l1.exponents(), l2.exponents());
            assert!(l1.basis().eq_mod(l2.basis(), 12));
            for c in a.columns() {
                assert!(l1.contains(&c));
            }
        }
    }

    #[test]
    fn intersection_and_dual() {
        let k = FieldSpec::laurent(2, 16).unwrap();
        let a = Lattice::diagonal(&k, &[0, 2]);
        let b = Lattice::diagonal(&k, &[1, 1]);
        let c = a.intersection(&b).unwrap();
        assert_eq!(c.exponents(), &[1, 2]);
        assert_eq!(a.dual().unwrap().exponents(), &[0, -2]);
    }

    #[test]
    fn preimage_along_a_line() {
        let k = FieldSpec::padic(3, 16).unwrap();
        let l = Lattice::diagonal(&k, &[1, 2]);
        let p = Matrix::from_integers(&k, &[&[1], &[1]]);
        let m = l.preimage(&p).unwrap();
        assert_eq!(m.exponents(), &[2]);
    }

    #[test]
    fn laurent_extension_enumeration() {
        let k = FieldSpec::laurent_ext(2, vec![1, 1, 1], 12).unwrap();
        let l1 = Lattice::standard(&k, 2);
        let l2 = Lattice::diagonal(&k, &[1, 2]);
        let r = l1.index_bruteforce(&l2, OracleMode::On).unwrap();
        assert_eq!(r.value, Some(64));
        assert_eq!(r.enumerated, Some(64));
    }
}
