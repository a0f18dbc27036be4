//! Random test automorphisms with prescribed slope patterns.

use alloc::vec::Vec;
use alloc::sync::Arc;

use rand::Rng;

use crate::linalg::Matrix;
use crate::localfield::{Element, FieldSpec};

/// A diagonal block of a generated automorphism.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Block {
    /// `π^k u` for a random unit `u`.
    Scalar(i32),
    /// Jordan block of size 2 with eigenvalue `π^k u`.
    Jordan(i32),
    /// Companion matrix of `T^e - π^h u`, one root valuation `h/e`.
    Root { h: i32, e: usize },
}

impl Block {
    pub fn size(&self) -> usize {
        match self {
            Block::Scalar(_) => 1,
            Block::Jordan(_) => 2,
            Block::Root { e, .. } => *e,
        }
    }
}

fn random_unit<R: Rng + ?Sized>(spec: &Arc<FieldSpec>, rng: &mut R) -> Element {
    Element::random_with_valuation(spec, 0, rng)
}

/// Block-diagonal matrix with the given blocks.
pub fn block_matrix<R: Rng + ?Sized>(spec: &Arc<FieldSpec>, blocks: &[Block], rng: &mut R) -> Matrix {
    let d: usize = blocks.iter().map(Block::size).sum();
    let mut m = Matrix::zeros(spec, d, d);
    let mut off = 0;
    for b in blocks {
        match *b {
            Block::Scalar(k) => m.set(off, off, random_unit(spec, rng).shift(k)),
            Block::Jordan(k) => {
                let l = random_unit(spec, rng).shift(k);
                m.set(off, off, l.clone());
                m.set(off + 1, off + 1, l);
                m.set(off, off + 1, Element::one(spec));
            }
            Block::Root { h, e } => {
                for i in 1..e {
                    m.set(off + i, off + i - 1, Element::one(spec));
                }
                m.set(off, off + e - 1, random_unit(spec, rng).shift(h));
            }
        }
        off += b.size();
    }
    m
}

/// Random block pattern of total size `d` using slopes in `[-2, 2]`;
/// with `fractional`, blocks with non-integer root valuations are allowed.
pub fn random_blocks<R: Rng + ?Sized>(d: usize, fractional: bool, rng: &mut R) -> Vec<Block> {
    let mut blocks = Vec::new();
    let mut left = d;
    while left > 0 {
        let kind = rng.gen_range(0..if fractional { 3 } else { 2 });
        let b = match kind {
            1 if left >= 2 => Block::Jordan(rng.gen_range(-1..=1)),
            2 if left >= 2 => {
                let e = rng.gen_range(2..=left.min(4));
                let h = loop {
                    let h = rng.gen_range(-2..=2i32);
                    if h != 0 && num_integer::gcd(h.unsigned_abs() as usize, e) == 1 {
                        break h;
                    }
                };
                Block::Root { h, e }
            }
            _ => Block::Scalar(rng.gen_range(-2..=2)),
        };
        left -= b.size();
        blocks.push(b);
    }
    blocks
}

/// Random element of `GL_d(K)` whose entries have valuation at least
/// `vmin` and whose determinant has valuation at most `d`.
pub fn random_invertible<R: Rng + ?Sized>(spec: &Arc<FieldSpec>, d: usize, vmin: i32, rng: &mut R) -> Matrix {
    loop {
        let m = Matrix::random(spec, d, d, vmin, rng);
        if m.det().ok().and_then(|x| x.valuation()).is_some_and(|v| v <= d as i32) {
            return m;
        }
    }
}

/// `g D g^-1` for a random block pattern `D` and `g ∈ GL_d(O)`.
pub fn random_automorphism<R: Rng + ?Sized>(spec: &Arc<FieldSpec>, d: usize, fractional: bool, rng: &mut R) -> Matrix {
    let blocks = random_blocks(d, fractional, rng);
    let base = block_matrix(spec, &blocks, rng);
    let g = Matrix::random_isometry(spec, d, rng);
    base.conjugate_by(&g).expect("isometry is invertible")
}
