use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::localfield::{AbsValue, Element, FieldSpec};
use crate::poly::Poly;

/// Smallest valuation among the entries; `None` if all vanish.
pub fn min_valuation(v: &[Element]) -> Option<i32> {
    v.iter().filter_map(|x| x.valuation()).min()
}

/// True when every entry is negligible at the working precision.
pub fn is_negligible_vec(v: &[Element]) -> bool {
    v.iter().all(|x| x.is_negligible())
}

pub fn vec_add(a: &[Element], b: &[Element]) -> Vec<Element> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_sub(a: &[Element], b: &[Element]) -> Vec<Element> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_scale(a: &[Element], c: &Element) -> Vec<Element> {
    a.iter().map(|x| x * c).collect()
}

pub fn vec_shift(a: &[Element], k: i32) -> Vec<Element> {
    a.iter().map(|x| x.shift(k)).collect()
}

/// Dense matrix over a local field, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    spec: Arc<FieldSpec>,
    rows: usize,
    cols: usize,
    data: Vec<Element>,
}

impl Matrix {
    pub fn zeros(spec: &Arc<FieldSpec>, rows: usize, cols: usize) -> Matrix {
        Matrix { spec: spec.clone(), rows, cols, data: vec![Element::zero(spec); rows * cols] }
    }

    pub fn identity(spec: &Arc<FieldSpec>, n: usize) -> Matrix {
        let mut m = Matrix::zeros(spec, n, n);
        for i in 0..n {
            m.set(i, i, Element::one(spec));
        }
        m
    }

    pub fn diag(spec: &Arc<FieldSpec>, d: &[Element]) -> Matrix {
        let mut m = Matrix::zeros(spec, d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m.set(i, i, x.clone());
        }
        m
    }

    /// `diag(π^k_0, π^k_1, ...)`.
    pub fn diag_uniformizer(spec: &Arc<FieldSpec>, ks: &[i32]) -> Matrix {
        let d: Vec<Element> = ks.iter().map(|&k| Element::uniformizer_pow(spec, k)).collect();
        Matrix::diag(spec, &d)
    }

    pub fn from_fn(spec: &Arc<FieldSpec>, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Element) -> Matrix {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { spec: spec.clone(), rows, cols, data }
    }

    pub fn from_rows(spec: &Arc<FieldSpec>, rows: Vec<Vec<Element>>) -> Result<Matrix> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::Dimension("rows of unequal length".into()));
        }
        if rows.iter().flatten().any(|x| !x.same_field(&Element::zero(spec))) {
            return Err(Error::FieldMismatch);
        }
        Ok(Matrix { spec: spec.clone(), rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Matrix with the given columns; `rows` fixes the height when there are
    /// no columns.
    pub fn from_columns(spec: &Arc<FieldSpec>, rows: usize, cols: &[Vec<Element>]) -> Matrix {
        Matrix::from_fn(spec, rows, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn from_integers(spec: &Arc<FieldSpec>, rows: &[&[i64]]) -> Matrix {
        let c = rows.first().map_or(0, |r| r.len());
        Matrix::from_fn(spec, rows.len(), c, |i, j| Element::from_integer(spec, rows[i][j]))
    }

    /// Entries with valuation at least `vmin`, uniform digits.
    pub fn random<R: Rng + ?Sized>(spec: &Arc<FieldSpec>, rows: usize, cols: usize, vmin: i32, rng: &mut R) -> Matrix {
        Matrix::from_fn(spec, rows, cols, |_, _| Element::random(spec, vmin, rng))
    }

    /// Uniform element of GL_n(O): random integral matrices until the
    /// determinant is a unit.
    pub fn random_isometry<R: Rng + ?Sized>(spec: &Arc<FieldSpec>, n: usize, rng: &mut R) -> Matrix {
        loop {
            let m = Matrix::random(spec, n, n, 0, rng);
            if m.det().is_ok_and(|d| d.valuation() == Some(0)) {
                return m;
            }
        }
    }

    /// Entrywise [`Element::with_spec`].
    pub fn with_spec(&self, spec: &Arc<FieldSpec>) -> Matrix {
        Matrix::from_fn(spec, self.rows, self.cols, |i, j| self.get(i, j).with_spec(spec))
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Element {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Element) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> Vec<Element> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<Element> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Element>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn entries(&self) -> &[Element] {
        &self.data
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(&self.spec, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn submatrix(&self, rows: core::ops::Range<usize>, cols: core::ops::Range<usize>) -> Matrix {
        let (r0, c0) = (rows.start, cols.start);
        Matrix::from_fn(&self.spec, rows.len(), cols.len(), |i, j| self.get(r0 + i, c0 + j).clone())
    }

    pub fn select_columns(&self, idx: &[usize]) -> Matrix {
        Matrix::from_fn(&self.spec, self.rows, idx.len(), |i, j| self.get(i, idx[j]).clone())
    }

    /// Columns of all arguments side by side.
    pub fn hstack(spec: &Arc<FieldSpec>, rows: usize, parts: &[&Matrix]) -> Result<Matrix> {
        if parts.iter().any(|m| m.rows != rows) {
            return Err(Error::Dimension("hstack height mismatch".into()));
        }
        let cols: Vec<Vec<Element>> = parts.iter().flat_map(|m| m.columns()).collect();
        Ok(Matrix::from_columns(spec, rows, &cols))
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Matrix { data, ..self.clone() })
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Matrix { data, ..self.clone() })
    }

    fn same_shape(&self, other: &Matrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn scale(&self, c: &Element) -> Matrix {
        Matrix { data: self.data.iter().map(|a| a * c).collect(), ..self.clone() }
    }

    /// Multiplies every entry by `π^k`.
    pub fn shift(&self, k: i32) -> Matrix {
        Matrix { data: self.data.iter().map(|a| a.shift(k)).collect(), ..self.clone() }
    }

    pub fn neg(&self) -> Matrix {
        Matrix { data: self.data.iter().map(|a| -a).collect(), ..self.clone() }
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(&self.spec, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] = &out.data[idx] + &(a * b);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[Element]) -> Result<Vec<Element>> {
        if x.len() != self.cols {
            return Err(Error::Dimension(format!("vector of length {} for {} columns", x.len(), self.cols)));
        }
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = Element::zero(&self.spec);
                for (j, xj) in x.iter().enumerate() {
                    let a = self.get(i, j);
                    if !a.is_zero() && !xj.is_zero() {
                        acc = &acc + &(a * xj);
                    }
                }
                acc
            })
            .collect())
    }

    /// Integer power; negative exponents invert first.
    pub fn pow(&self, e: i64) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::Dimension("power of a non-square matrix".into()));
        }
        let mut base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Matrix::identity(&self.spec, self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// `f(A)` by Horner's rule.
    pub fn eval_poly(&self, f: &Poly) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::Dimension("polynomial of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut acc = Matrix::zeros(&self.spec, n, n);
        for c in f.coeffs().iter().rev() {
            acc = acc.mul(self)?;
            for i in 0..n {
                let x = acc.get(i, i) + c;
                acc.set(i, i, x);
            }
        }
        Ok(acc)
    }

    pub fn min_valuation(&self) -> Option<i32> {
        min_valuation(&self.data)
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.is_integral())
    }

    pub fn is_negligible(&self) -> bool {
        is_negligible_vec(&self.data)
    }

    /// Entrywise congruence modulo `π^k`.
    pub fn eq_mod(&self, other: &Matrix, k: i32) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.data.iter().zip(&other.data).all(|(a, b)| a.eq_mod(b, k))
    }

    fn square(&self) -> Result<usize> {
        if !self.is_square() {
            return Err(Error::Dimension(format!("{}x{} matrix is not square", self.rows, self.cols)));
        }
        Ok(self.rows)
    }

    /// Determinant by elimination with minimal-valuation pivots.
    pub fn det(&self) -> Result<Element> {
        let n = self.square()?;
        let mut a: Vec<Vec<Element>> = (0..n).map(|i| self.row(i)).collect();
        let mut det = Element::one(&self.spec);
        for j in 0..n {
            let Some(piv) = pivot_row(&a, j, j, None) else {
                return Ok(Element::zero(&self.spec));
            };
            if piv != j {
                a.swap(piv, j);
                det = -det;
            }
            let inv = a[j][j].inv()?;
            det = &det * &a[j][j];
            for r in j + 1..n {
                if a[r][j].is_zero() {
                    continue;
                }
                let m = &a[r][j] * &inv;
                for c in j + 1..n {
                    let t = &a[r][c] - &(&m * &a[j][c]);
                    a[r][c] = t;
                }
            }
        }
        Ok(det)
    }

    /// Inverse by Gauss-Jordan elimination with minimal-valuation pivots.
    pub fn inverse(&self) -> Result<Matrix> {
        let n = self.square()?;
        let mut a: Vec<Vec<Element>> = (0..n).map(|i| self.row(i)).collect();
        let mut b: Vec<Vec<Element>> = (0..n).map(|i| Matrix::identity(&self.spec, n).row(i)).collect();
        for j in 0..n {
            let piv = pivot_row(&a, j, j, None).ok_or(Error::Singular)?;
            a.swap(piv, j);
            b.swap(piv, j);
            let inv = a[j][j].inv()?;
            for c in 0..n {
                a[j][c] = &a[j][c] * &inv;
                b[j][c] = &b[j][c] * &inv;
            }
            for r in 0..n {
                if r == j || a[r][j].is_zero() {
                    continue;
                }
                let m = a[r][j].clone();
                for c in 0..n {
                    let t = &a[r][c] - &(&m * &a[j][c]);
                    a[r][c] = t;
                    let t = &b[r][c] - &(&m * &b[j][c]);
                    b[r][c] = t;
                }
            }
        }
        Ok(Matrix { spec: self.spec.clone(), rows: n, cols: n, data: b.into_iter().flatten().collect() })
    }

    /// Solves `A x = b` for square invertible `A`.
    pub fn solve(&self, b: &[Element]) -> Result<Vec<Element>> {
        self.inverse()?.mul_vec(b)
    }

    /// Row echelon form of the matrix scaled to minimal valuation zero, with
    /// entries of valuation `>= N - margin` treated as zero. Returns the rows
    /// and pivot columns.
    fn echelon(&self) -> (Vec<Vec<Element>>, Vec<usize>) {
        self.echelon_at(self.min_valuation().unwrap_or(0))
    }

    /// Echelon form with zero decisions made relative to valuation
    /// `reference` instead of the matrix's own minimum.
    fn echelon_at(&self, reference: i32) -> (Vec<Vec<Element>>, Vec<usize>) {
        let shift = -reference;
        let mut a: Vec<Vec<Element>> = (0..self.rows).map(|i| vec_shift(&self.row(i), shift)).collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for j in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(piv) = pivot_row(&a, j, r, Some(())) else {
                for row in a.iter_mut().skip(r) {
                    row[j] = Element::zero(&self.spec);
                }
                continue;
            };
            a.swap(piv, r);
            let inv = a[r][j].inv().expect("pivot is a nonzero element");
            for i in r + 1..self.rows {
                if a[i][j].is_zero() {
                    continue;
                }
                let m = &a[i][j] * &inv;
                for c in j..self.cols {
                    let t = &a[i][c] - &(&m * &a[r][c]);
                    a[i][c] = t;
                }
                a[i][j] = Element::zero(&self.spec);
            }
            pivots.push(j);
            r += 1;
        }
        (a, pivots)
    }

    /// Rank, with the margin rule for zero decisions.
    pub fn rank(&self) -> usize {
        self.echelon().1.len()
    }

    /// Basis of the kernel as the columns of a `cols x k` matrix; each column
    /// is primitive (minimal valuation zero).
    pub fn kernel(&self) -> Matrix {
        self.kernel_at(self.min_valuation().unwrap_or(0))
    }

    /// Kernel of a matrix computed from data of size `q^-reference`: entries
    /// below that size by more than the precision window count as zero.
    pub fn kernel_at(&self, reference: i32) -> Matrix {
        let reference = self.min_valuation().map_or(reference, |v| v.min(reference));
        let (a, pivots) = self.echelon_at(reference);
        let free: Vec<usize> = (0..self.cols).filter(|j| !pivots.contains(j)).collect();
        let mut basis = Vec::with_capacity(free.len());
        for &f in &free {
            let mut x = vec![Element::zero(&self.spec); self.cols];
            x[f] = Element::one(&self.spec);
            for (r, &pc) in pivots.iter().enumerate().rev() {
                let mut acc = Element::zero(&self.spec);
                for c in pc + 1..self.cols {
                    if !a[r][c].is_zero() && !x[c].is_zero() {
                        acc = &acc + &(&a[r][c] * &x[c]);
                    }
                }
                x[pc] = -(&acc * &a[r][pc].inv().expect("pivot is a nonzero element"));
            }
            let v = min_valuation(&x).unwrap_or(0);
            basis.push(vec_shift(&x, -v));
        }
        Matrix::from_columns(&self.spec, self.cols, &basis)
    }

    /// Characteristic polynomial `det(T·1 - A)` via reduction to Hessenberg
    /// form of the integral matrix `π^k A`.
    pub fn char_poly(&self) -> Result<Poly> {
        let n = self.square()?;
        let k = self.min_valuation().map_or(0, |v| (-v).max(0));
        let b = self.shift(k);
        let h = hessenberg(&b);
        let chi_b = hessenberg_char_poly(&h, &self.spec);
        // chi_A(T) = π^(-kn) chi_B(π^k T)
        let coeffs = (0..=n).map(|i| chi_b[i].shift(k * (i as i32 - n as i32))).collect();
        Ok(Poly::new(&self.spec, coeffs))
    }

    /// Characteristic polynomial by Berkowitz's division-free algorithm.
    pub fn char_poly_berkowitz(&self) -> Result<Poly> {
        let n = self.square()?;
        let one = Element::one(&self.spec);
        let zero = Element::zero(&self.spec);
        if n == 0 {
            return Ok(Poly::one(&self.spec));
        }
        // high-to-low coefficient vectors
        let mut c = vec![one.clone(), -self.get(0, 0)];
        for r in 1..n {
            let a = self.get(r, r);
            let row: Vec<Element> = (0..r).map(|j| self.get(r, j).clone()).collect();
            let mut s: Vec<Element> = (0..r).map(|i| self.get(i, r).clone()).collect();
            let mut t = vec![one.clone(), -a];
            for _ in 0..r {
                let dot = row.iter().zip(&s).fold(zero.clone(), |acc, (x, y)| &acc + &(x * y));
                t.push(-dot);
                s = (0..r)
                    .map(|i| (0..r).fold(zero.clone(), |acc, j| &acc + &(self.get(i, j) * &s[j])))
                    .collect();
            }
            let next: Vec<Element> = (0..=r + 1)
                .map(|i| {
                    (0..=i.min(r)).fold(zero.clone(), |acc, j| {
                        if i - j < t.len() {
                            &acc + &(&t[i - j] * &c[j])
                        } else {
                            acc
                        }
                    })
                })
                .collect();
            c = next;
        }
        c.reverse();
        Ok(Poly::new(&self.spec, c))
    }

    /// Determinant from the Berkowitz characteristic polynomial.
    pub fn det_berkowitz(&self) -> Result<Element> {
        let n = self.square()?;
        let c0 = self.char_poly_berkowitz()?.coeff(0);
        Ok(if n % 2 == 0 { c0 } else { -c0 })
    }

    /// The module `|det A|`.
    pub fn module(&self) -> Result<AbsValue> {
        let d = self.det()?;
        if d.is_zero() {
            return Err(Error::Singular);
        }
        Ok(d.abs())
    }

    /// Whether `A` is an isometry of the max-norm, i.e. `A` and `A^-1` are
    /// integral.
    pub fn is_isometry_maxnorm(&self) -> bool {
        self.is_square()
            && self.is_integral()
            && self.det().is_ok_and(|d| d.valuation() == Some(0))
            && self.inverse().is_ok_and(|m| m.is_integral())
    }

    /// `g A g^-1`.
    pub fn conjugate_by(&self, g: &Matrix) -> Result<Matrix> {
        g.mul(self)?.mul(&g.inverse()?)
    }
}

/// Row in `from..` with the entry of smallest valuation in column `j`; ties
/// go to the lowest row. With `margin`, negligible entries do not count.
fn pivot_row(a: &[Vec<Element>], j: usize, from: usize, margin: Option<()>) -> Option<usize> {
    let mut best: Option<(usize, i32)> = None;
    for (i, row) in a.iter().enumerate().skip(from) {
        let x = &row[j];
        if margin.is_some() && x.is_negligible() {
            continue;
        }
        if let Some(v) = x.valuation() {
            if best.is_none_or(|(_, bv)| v < bv) {
                best = Some((i, v));
            }
        }
    }
    best.map(|(i, _)| i)
}

/// Upper Hessenberg form by similarity transforms with minimal-valuation
/// pivots; integral input stays integral.
fn hessenberg(m: &Matrix) -> Vec<Vec<Element>> {
    let n = m.rows();
    let mut a: Vec<Vec<Element>> = (0..n).map(|i| m.row(i)).collect();
    for j in 0..n.saturating_sub(2) {
        let Some(piv) = pivot_row(&a, j, j + 1, None) else { continue };
        if piv != j + 1 {
            a.swap(piv, j + 1);
            for row in a.iter_mut() {
                row.swap(piv, j + 1);
            }
        }
        let inv = a[j + 1][j].inv().expect("pivot is a nonzero element");
        for r in j + 2..n {
            if a[r][j].is_zero() {
                continue;
            }
            let mult = &a[r][j] * &inv;
            for c in 0..n {
                let t = &a[r][c] - &(&mult * &a[j + 1][c]);
                a[r][c] = t;
            }
            for row in a.iter_mut() {
                let t = &row[j + 1] + &(&mult * &row[r]);
                row[j + 1] = t;
            }
        }
    }
    a
}

/// Characteristic polynomial of an upper Hessenberg matrix, low to high.
fn hessenberg_char_poly(h: &[Vec<Element>], spec: &Arc<FieldSpec>) -> Vec<Element> {
    let n = h.len();
    let mut ps: Vec<Poly> = vec![Poly::one(spec)];
    for m in 0..n {
        let t_minus = Poly::new(spec, vec![-&h[m][m], Element::one(spec)]);
        let mut pm = t_minus.mul(&ps[m]);
        let mut prod = Element::one(spec);
        for i in (0..m).rev() {
            prod = &prod * &h[i + 1][i];
            if prod.is_zero() {
                break;
            }
            let c = &h[i][m] * &prod;
            pm = pm.sub(&ps[i].scale(&c));
        }
        ps.push(pm);
    }
    (0..=n).map(|i| ps[n].coeff(i)).collect()
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q3() -> Arc<FieldSpec> {
        FieldSpec::padic(3, 20).unwrap()
    }

    #[test]
    fn det_examples() {
        let k = q3();
        assert!(Matrix::identity(&k, 3).det().unwrap().is_one());
        assert!(Matrix::diag_uniformizer(&k, &[-1, 1]).det().unwrap().is_one());
        let e12 = Matrix::from_integers(&k, &[&[1, 1], &[0, 1]]);
        assert!(e12.det().unwrap().is_one());
        let a = Matrix::from_integers(&k, &[&[2, 3, 1], &[4, 1, 5], &[7, 2, 2]]);
        assert_eq!(a.det().unwrap(), Element::from_integer(&k, 2 * (2 - 10) - 3 * (8 - 35) + (8 - 7)));
    }

    #[test]
    fn char_poly_examples() {
        let k = q3();
        let p = Element::uniformizer(&k);
        let pinv = p.inv().unwrap();
        let a = Matrix::diag(&k, &[pinv.clone(), p.clone()]);
        let chi = a.char_poly().unwrap();
        assert!(chi.coeff(2).is_one());
        assert!(chi.coeff(1).eq_mod(&-(&p + &pinv), 18));
        assert!(chi.coeff(0).is_one());
        let z = Matrix::zeros(&k, 3, 3).char_poly().unwrap();
        assert_eq!(z, Poly::monomial(Element::one(&k), 3));
    }

    #[test]
    fn companion_recovers_polynomial() {
        let k = FieldSpec::laurent(5, 24).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let c: Vec<Element> = (0..4).map(|_| Element::random(&k, -2, &mut rng)).collect();
            let mut m = Matrix::zeros(&k, 4, 4);
            for i in 1..4 {
                m.set(i, i - 1, Element::one(&k));
            }
            for i in 0..4 {
                m.set(i, 3, -&c[i]);
            }
            let chi = m.char_poly().unwrap();
            let chib = m.char_poly_berkowitz().unwrap();
            for i in 0..4 {
                assert!(chi.coeff(i).eq_mod(&c[i], 14));
                assert!(chib.coeff(i).eq_mod(&c[i], 14));
            }
        }
    }

    #[test]
    fn hessenberg_matches_berkowitz() {
        let k = q3();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..6 {
            let a = Matrix::random(&k, n, n, -1, &mut rng);
            let h = a.char_poly().unwrap();
            let b = a.char_poly_berkowitz().unwrap();
            assert!(h.eq_mod(&b, 20 - 2 * n as i32 - 4), "{h} vs {b}");
        }
    }

    #[test]
    fn inverse_and_solve() {
        let k = q3();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = Matrix::random_isometry(&k, 4, &mut rng);
        let prod = a.mul(&a.inverse().unwrap()).unwrap();
        assert!(prod.eq_mod(&Matrix::identity(&k, 4), 20));
        let b: Vec<Element> = (0..4).map(|i| Element::from_integer(&k, i)).collect();
        let x = a.solve(&b).unwrap();
        let ax = a.mul_vec(&x).unwrap();
        assert!(ax.iter().zip(&b).all(|(u, v)| u.eq_mod(v, 20)));
        assert_eq!(Matrix::zeros(&k, 2, 2).inverse(), Err(Error::Singular));
    }

    #[test]
    fn kernels() {
        let k = q3();
        assert_eq!(Matrix::zeros(&k, 3, 3).kernel(), Matrix::identity(&k, 3));
        let d = Matrix::diag(&k, &[Element::one(&k), Element::zero(&k)]);
        assert_eq!(d.kernel(), Matrix::from_integers(&k, &[&[0], &[1]]));
        let j = Matrix::from_integers(&k, &[&[3, 1], &[0, 3]]);
        let n = j.sub(&Matrix::identity(&k, 2).scale(&Element::from_integer(&k, 3))).unwrap();
        assert_eq!(n.mul(&n).unwrap().kernel().cols(), 2);
        assert_eq!(n.kernel().cols(), 1);
    }

    #[test]
    fn isometries() {
        let k = q3();
        assert!(Matrix::identity(&k, 3).is_isometry_maxnorm());
        assert!(!Matrix::diag_uniformizer(&k, &[1, 0]).is_isometry_maxnorm());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = Matrix::random(&k, 3, 3, 1, &mut rng).add(&Matrix::identity(&k, 3)).unwrap();
        assert!(a.is_isometry_maxnorm());
    }

    #[test]
    fn module_of_scalar() {
        let k = q3();
        let a = Matrix::diag_uniformizer(&k, &[1, 1, 1]);
        assert_eq!(a.module().unwrap(), AbsValue::from_int_exponent(-3));
        assert!(Matrix::identity(&k, 2).module().unwrap().is_one());
    }
}
