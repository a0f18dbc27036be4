//! Arithmetic in the residue field F_q, q = p^f.
//!
//! Elements are encoded as integers `c < q`; for `f > 1` the base-`p` digits
//! of `c` are the coefficients (low to high) of a polynomial reduced modulo
//! the defining modulus.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ResidueField {
    p: u32,
    f: u32,
    q: u64,
    /// Monic modulus of degree `f`, low to high. `[0, 1]` when `f == 1`.
    modulus: Vec<u32>,
}

impl ResidueField {
    pub fn prime(p: u32) -> Self {
        ResidueField { p, f: 1, q: p as u64, modulus: vec![0, 1] }
    }

    /// Caller guarantees `modulus` is monic of degree `f >= 1` with entries `< p`.
    pub fn extension(p: u32, modulus: Vec<u32>) -> Self {
        let f = (modulus.len() - 1) as u32;
        ResidueField { p, f, q: (p as u64).pow(f), modulus }
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn degree(&self) -> u32 {
        self.f
    }
    pub fn order(&self) -> u64 {
        self.q
    }
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    fn decode(&self, a: u32) -> Vec<u32> {
        let mut out = vec![0u32; self.f as usize];
        let mut a = a;
        for c in out.iter_mut() {
            *c = a % self.p;
            a /= self.p;
        }
        out
    }

    fn encode(&self, digits: &[u32]) -> u32 {
        digits.iter().rev().fold(0u32, |acc, &d| acc * self.p + d)
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.f == 1 {
            ((a as u64 + b as u64) % self.p as u64) as u32
        } else {
            let (mut a, mut b) = (a, b);
            let mut out = 0u32;
            let mut place = 1u32;
            for _ in 0..self.f {
                let d = (a % self.p + b % self.p) % self.p;
                out += d * place;
                a /= self.p;
                b /= self.p;
                place = place.wrapping_mul(self.p);
            }
            out
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if self.f == 1 {
            if a == 0 {
                0
            } else {
                self.p - a
            }
        } else {
            let mut a = a;
            let mut out = 0u32;
            let mut place = 1u32;
            for _ in 0..self.f {
                let d = a % self.p;
                out += ((self.p - d) % self.p) * place;
                a /= self.p;
                place = place.wrapping_mul(self.p);
            }
            out
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if self.f == 1 {
            return ((a as u64 * b as u64) % self.p as u64) as u32;
        }
        let (x, y) = (self.decode(a), self.decode(b));
        let f = self.f as usize;
        let p = self.p as u64;
        let mut prod = vec![0u64; 2 * f - 1];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                prod[i + j] = (prod[i + j] + xi as u64 * yj as u64) % p;
            }
        }
        for k in (f..prod.len()).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for (i, &m) in self.modulus[..f].iter().enumerate() {
                let idx = k - f + i;
                prod[idx] = (prod[idx] + (p - c) * m as u64) % p;
            }
        }
        let digits: Vec<u32> = prod[..f].iter().map(|&c| c as u32).collect();
        self.encode(&digits)
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `a` must be nonzero.
    pub fn inv(&self, a: u32) -> u32 {
        debug_assert!(a != 0);
        if self.f == 1 {
            // extended Euclid in i64
            let (mut r0, mut r1) = (self.p as i64, a as i64);
            let (mut t0, mut t1) = (0i64, 1i64);
            while r1 != 0 {
                let qt = r0 / r1;
                (r0, r1) = (r1, r0 - qt * r1);
                (t0, t1) = (t1, t0 - qt * t1);
            }
            return t0.rem_euclid(self.p as i64) as u32;
        }
        self.pow(a, self.q - 2)
    }

    pub fn from_int(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }

    /// The class of the polynomial variable (a root of the modulus).
    pub fn generator(&self) -> u32 {
        if self.f == 1 {
            // the modulus is T, whose root is 0; there is no separate generator
            0
        } else {
            self.p
        }
    }

    /// An F_p-basis of the residue field: 1, t, ..., t^(f-1).
    pub fn additive_basis(&self) -> Vec<u32> {
        (0..self.f).map(|i| self.p.pow(i)).collect()
    }

    /// Polynomial-in-`t` digits of a residue code (for display).
    pub fn digits(&self, a: u32) -> Vec<u32> {
        self.decode(a)
    }
}

/// Dense polynomials over a residue field, low to high, trimmed.
pub mod poly {
    use super::ResidueField;
    use alloc::vec;
    use alloc::vec::Vec;

    pub fn trim(mut a: Vec<u32>) -> Vec<u32> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn degree(a: &[u32]) -> Option<usize> {
        a.iter().rposition(|&c| c != 0)
    }

    pub fn add(k: &ResidueField, a: &[u32], b: &[u32]) -> Vec<u32> {
        let n = a.len().max(b.len());
        let out = (0..n)
            .map(|i| k.add(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0)))
            .collect();
        trim(out)
    }

    pub fn sub(k: &ResidueField, a: &[u32], b: &[u32]) -> Vec<u32> {
        let n = a.len().max(b.len());
        let out = (0..n)
            .map(|i| k.sub(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0)))
            .collect();
        trim(out)
    }

    pub fn mul(k: &ResidueField, a: &[u32], b: &[u32]) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u32; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = k.add(out[i + j], k.mul(x, y));
            }
        }
        trim(out)
    }

    pub fn scale(k: &ResidueField, a: &[u32], c: u32) -> Vec<u32> {
        trim(a.iter().map(|&x| k.mul(x, c)).collect())
    }

    /// Quotient and remainder; `b` must be nonzero.
    pub fn divrem(k: &ResidueField, a: &[u32], b: &[u32]) -> (Vec<u32>, Vec<u32>) {
        let db = degree(b).expect("division by the zero polynomial");
        let lead_inv = k.inv(b[db]);
        let mut r = trim(a.to_vec());
        let mut q = vec![0u32; r.len().saturating_sub(db).max(1)];
        while let Some(dr) = degree(&r) {
            if dr < db {
                break;
            }
            let c = k.mul(r[dr], lead_inv);
            let shift = dr - db;
            q[shift] = c;
            for (i, &bi) in b[..=db].iter().enumerate() {
                r[shift + i] = k.sub(r[shift + i], k.mul(c, bi));
            }
            r = trim(r);
        }
        (trim(q), r)
    }

    /// Returns `(g, s, t)` with `s a + t b = g`, `g` monic (or zero).
    pub fn ext_gcd(k: &ResidueField, a: &[u32], b: &[u32]) -> (Vec<u32>, Vec<u32>, Vec<u32>) {
        let (mut r0, mut r1) = (trim(a.to_vec()), trim(b.to_vec()));
        let (mut s0, mut s1) = (vec![1u32], Vec::new());
        let (mut t0, mut t1) = (Vec::new(), vec![1u32]);
        while !r1.is_empty() {
            let (q, r) = divrem(k, &r0, &r1);
            let s2 = sub(k, &s0, &mul(k, &q, &s1));
            let t2 = sub(k, &t0, &mul(k, &q, &t1));
            r0 = core::mem::replace(&mut r1, r);
            s0 = core::mem::replace(&mut s1, s2);
            t0 = core::mem::replace(&mut t1, t2);
        }
        if let Some(d) = degree(&r0) {
            let li = k.inv(r0[d]);
            (scale(k, &r0, li), scale(k, &s0, li), scale(k, &t0, li))
        } else {
            (r0, s0, t0)
        }
    }

    pub fn mulmod(k: &ResidueField, a: &[u32], b: &[u32], m: &[u32]) -> Vec<u32> {
        divrem(k, &mul(k, a, b), m).1
    }

    pub fn powmod(k: &ResidueField, a: &[u32], mut e: u64, m: &[u32]) -> Vec<u32> {
        let mut base = divrem(k, a, m).1;
        let mut acc = vec![1u32];
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(k, &acc, &base, m);
            }
            base = mulmod(k, &base, &base, m);
            e >>= 1;
        }
        acc
    }

    /// Resultant via the Euclidean algorithm.
    pub fn resultant(k: &ResidueField, a: &[u32], b: &[u32]) -> u32 {
        let (Some(mut da), Some(mut db)) = (degree(a), degree(b)) else {
            return 0;
        };
        let mut a = trim(a.to_vec());
        let mut b = trim(b.to_vec());
        let mut res = 1u32;
        loop {
            if db == 0 {
                return k.mul(res, k.pow(b[0], da as u64));
            }
            let (_, r) = divrem(k, &a, &b);
            let Some(dr) = degree(&r) else {
                return 0;
            };
            // res(a, b) = (-1)^(da db) lc(b)^(da - dr) res(b, r)
            let mut factor = k.pow(b[db], (da - dr) as u64);
            if (da * db) % 2 == 1 {
                factor = k.neg(factor);
            }
            res = k.mul(res, factor);
            a = b;
            b = r;
            da = db;
            db = dr;
        }
    }

    /// Rabin's irreducibility test for a monic polynomial over a prime field.
    pub fn is_irreducible(k: &ResidueField, m: &[u32]) -> bool {
        let Some(f) = degree(m) else { return false };
        if f == 0 {
            return false;
        }
        if f == 1 {
            return true;
        }
        let p = k.p() as u64;
        let x = vec![0u32, 1];
        let mut prime_divisors = Vec::new();
        let mut n = f;
        let mut d = 2;
        while d * d <= n {
            if n % d == 0 {
                prime_divisors.push(d);
                while n % d == 0 {
                    n /= d;
                }
            }
            d += 1;
        }
        if n > 1 {
            prime_divisors.push(n);
        }
        // x^(p^j) mod m by repeated Frobenius
        let frob = |j: usize| {
            let mut acc = x.clone();
            for _ in 0..j {
                acc = powmod(k, &acc, p, m);
            }
            acc
        };
        for r in prime_divisors {
            let h = sub(k, &frob(f / r), &x);
            let (g, _, _) = ext_gcd(k, &h, m);
            if degree(&g) != Some(0) {
                return false;
            }
        }
        let h = sub(k, &frob(f), &x);
        divrem(k, &h, m).1.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_inverse() {
        let k = ResidueField::prime(7);
        for a in 1..7 {
            assert_eq!(k.mul(a, k.inv(a)), 1);
        }
    }

    #[test]
    fn f4_arithmetic() {
        // F_4 = F_2[t]/(t^2 + t + 1)
        let k = ResidueField::extension(2, vec![1, 1, 1]);
        let t = k.generator();
        assert_eq!(k.order(), 4);
        // t^2 = t + 1
        assert_eq!(k.mul(t, t), k.add(t, 1));
        for a in 1..4 {
            assert_eq!(k.mul(a, k.inv(a)), 1);
        }
        assert_eq!(k.pow(t, 3), 1);
    }

    #[test]
    fn irreducibility() {
        let f2 = ResidueField::prime(2);
        assert!(poly::is_irreducible(&f2, &[1, 1, 1]));
        assert!(!poly::is_irreducible(&f2, &[1, 0, 1]));
        // x^4 + x + 1 irreducible, x^4 + x^2 + 1 = (x^2+x+1)^2 not
        assert!(poly::is_irreducible(&f2, &[1, 1, 0, 0, 1]));
        assert!(!poly::is_irreducible(&f2, &[1, 0, 1, 0, 1]));
        let f3 = ResidueField::prime(3);
        assert!(poly::is_irreducible(&f3, &[1, 0, 1]));
        assert!(!poly::is_irreducible(&f3, &[2, 0, 1]));
    }

    #[test]
    fn resultant_detects_common_root() {
        let k = ResidueField::prime(5);
        // (x-1)(x-2) and (x-2)(x-3) share the root 2
        let a = poly::mul(&k, &[4, 1], &[3, 1]);
        let b = poly::mul(&k, &[3, 1], &[2, 1]);
        assert_eq!(poly::resultant(&k, &a, &b), 0);
        // res(x - 1, x - 3) = 1 - 3 = -2
        assert_eq!(poly::resultant(&k, &[4, 1], &[2, 1]), k.from_int(-2));
    }

    #[test]
    fn ext_gcd_bezout() {
        let k = ResidueField::prime(7);
        let a = [1, 2, 1]; // (x+1)^2
        let b = [3, 1]; // x + 3
        let (g, s, t) = poly::ext_gcd(&k, &a, &b);
        assert_eq!(g, vec![1]);
        let lhs = poly::add(&k, &poly::mul(&k, &s, &a), &poly::mul(&k, &t, &b));
        assert_eq!(lhs, vec![1]);
    }
}
