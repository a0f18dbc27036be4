use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use locdyn_core::bch::{automorphism_from_lie, group_scale, NilpotentLieAlgebra};
use locdyn_core::fixtures::{frobenius_twist_fixture, nonanalytic_fixture, shift_fixture};
use locdyn_core::linalg::{vec_sub, Lattice};
use locdyn_core::newton::{newton_polygon, slope_factorization};
use locdyn_core::samples::{block_matrix, random_automorphism, random_invertible, Block};
use locdyn_core::scaletidy::scale_linear;
use locdyn_core::spectral::{adapted_norm, decompose, Part};
use locdyn_core::{Element, FieldSpec, Matrix, OracleMode, Poly};

fn field(which: u8) -> Arc<FieldSpec> {
    match which % 5 {
        0 => FieldSpec::padic(2, 32).unwrap(),
        1 => FieldSpec::padic(3, 32).unwrap(),
        2 => FieldSpec::padic(7, 32).unwrap(),
        3 => FieldSpec::laurent(3, 32).unwrap(),
        _ => FieldSpec::laurent_ext(2, vec![1, 1, 1], 32).unwrap(),
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn rank_of(cols: &[Vec<Element>], spec: &Arc<FieldSpec>, d: usize) -> usize {
    Matrix::from_columns(spec, d, cols).rank()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn absolute_value_is_ultrametric(which in 0u8..5, seed in any::<u64>()) {
        let k = field(which);
        let mut r = rng(seed);
        for _ in 0..20 {
            let a = Element::random(&k, -5, &mut r);
            let b = Element::random(&k, -5, &mut r);
            prop_assert_eq!((&a * &b).abs(), a.abs().mul(b.abs()));
            let s = (&a + &b).abs();
            prop_assert!(s <= a.abs().max(b.abs()));
            if a.abs() != b.abs() {
                prop_assert_eq!(s, a.abs().max(b.abs()));
            }
        }
    }

    #[test]
    fn balls_are_subgroups(which in 0u8..5, seed in any::<u64>(), level in -3i32..4) {
        let k = field(which);
        let mut r = rng(seed);
        let xs: Vec<Element> = (0..8).map(|_| Element::random(&k, level, &mut r)).collect();
        for x in &xs {
            for y in &xs {
                let s = x - y;
                prop_assert!(s.is_zero() || s.valuation().unwrap() >= level);
            }
        }
    }

    #[test]
    fn inversion_is_an_involution(which in 0u8..5, seed in any::<u64>()) {
        let k = field(which);
        let mut r = rng(seed);
        let x = Element::random(&k, -4, &mut r);
        prop_assume!(!x.is_zero());
        let v = x.valuation().unwrap();
        let back = x.inv().unwrap().inv().unwrap();
        prop_assert!(back.eq_mod(&x, k.precision() - 2 * v.abs()));
    }

    #[test]
    fn elimination_and_berkowitz_agree(which in 0u8..5, seed in any::<u64>(), n in 1usize..5) {
        let k = field(which);
        let mut r = rng(seed);
        let a = Matrix::random(&k, n, n, 0, &mut r);
        let d1 = a.det().unwrap();
        let d2 = a.det_berkowitz().unwrap();
        prop_assert_eq!(d1.valuation(), d2.valuation());
    }

    #[test]
    fn module_is_multiplicative(which in 0u8..5, seed in any::<u64>(), n in 1usize..4) {
        let k = field(which);
        let mut r = rng(seed);
        let a = random_invertible(&k, n, -1, &mut r);
        let b = random_invertible(&k, n, -1, &mut r);
        let ab = a.mul(&b).unwrap();
        prop_assert_eq!(ab.module().unwrap(), a.module().unwrap().mul(b.module().unwrap()));
    }

    #[test]
    fn hermite_and_enumeration_agree(which in 0u8..5, seed in any::<u64>(), n in 1usize..4) {
        let k = field(which);
        let mut r = rng(seed);
        let m = Matrix::random(&k, n, n, 0, &mut r);
        prop_assume!(m.det().unwrap().valuation().is_some_and(|v| v <= 4));
        let big = Lattice::standard(&k, n);
        let sub = Lattice::from_matrix(&m).unwrap();
        let rep = big.index_bruteforce(&sub, OracleMode::Auto).unwrap();
        if let (Some(v), Some(e)) = (rep.value, rep.enumerated) {
            prop_assert_eq!(v, e as u128);
        }
    }

    #[test]
    fn slope_factors_multiply_back(which in 0u8..5, seed in any::<u64>()) {
        let k = field(which);
        let mut r = rng(seed);
        let roots: Vec<Element> = (0..r.gen_range(1..5)).map(|_| {
            let v = r.gen_range(-2..3);
            Element::random_with_valuation(&k, v, &mut r)
        }).collect();
        let f = Poly::from_roots(&k, &roots);
        let fac = slope_factorization(&f).unwrap();
        let prod = fac.product().unwrap();
        prop_assert!(prod.eq_mod(&f, k.precision() - k.margin()));
        for factor in &fac.factors {
            prop_assert_eq!(newton_polygon(&factor.poly).unwrap().segments.len(), 1);
        }
    }

    #[test]
    fn scale_exponent_is_integral(which in 0u8..5, seed in any::<u64>(), d in 1usize..5) {
        let k = field(which);
        let mut r = rng(seed);
        let a = random_automorphism(&k, d, true, &mut r);
        let np = newton_polygon(&a.char_poly().unwrap()).unwrap();
        prop_assert!(locdyn_core::newton::expanding_exponent(&np).is_integer());
        for v in &np.vertices {
            let _: i32 = v.1;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn decomposition_is_a_direct_sum(which in 0u8..5, seed in any::<u64>(), d in 1usize..5) {
        let k = field(which);
        let mut r = rng(seed);
        let a = random_automorphism(&k, d, true, &mut r);
        let dec = decompose(&a).unwrap();
        prop_assert_eq!(dec.change_of_basis().rank(), d);
        let plus = dec.subspace(Part::Plus).cols();
        let minus = dec.subspace(Part::Minus).cols();
        let levi = dec.subspace(Part::Levi).cols();
        prop_assert_eq!(plus + minus - levi, d);
        let norm = adapted_norm(&dec).unwrap();
        prop_assert!(norm.lattices_invariant().unwrap());
    }

    #[test]
    fn eigenspaces_match_generalized_kernels(which in 0u8..5, seed in any::<u64>(), d in 1usize..4) {
        let k = field(which);
        let mut r = rng(seed);
        let ks: Vec<i32> = (0..d).map(|_| r.gen_range(-2..=2)).collect();
        let blocks: Vec<Block> = ks.iter().map(|&x| Block::Scalar(x)).collect();
        let base = block_matrix(&k, &blocks, &mut r);
        let g = Matrix::random_isometry(&k, d, &mut r);
        let a = base.conjugate_by(&g).unwrap();
        let dec = decompose(&a).unwrap();
        for comp in dec.components() {
            let h = comp.h as i32;
            let mut cols = Vec::new();
            for i in 0..d {
                if ks[i] != h {
                    continue;
                }
                let lam = base.get(i, i).clone();
                let shifted = a.sub(&Matrix::identity(&k, d).scale(&lam)).unwrap();
                let size = d as i32 * lam.valuation().unwrap().min(a.min_valuation().unwrap());
                cols.extend(shifted.pow(d as i64).unwrap().kernel_at(size).columns());
            }
            let own = comp.basis.columns();
            let joint: Vec<Vec<Element>> = own.iter().chain(&cols).cloned().collect();
            prop_assert_eq!(rank_of(&cols, &k, d), own.len());
            prop_assert_eq!(rank_of(&joint, &k, d), own.len());
        }
    }

    #[test]
    fn scale_identities(which in 0u8..5, seed in any::<u64>(), d in 1usize..5) {
        let k = field(which);
        let mut r = rng(seed);
        let a = random_automorphism(&k, d, true, &mut r);
        let m = scale_linear(&a).unwrap().exponent;
        let m_inv = scale_linear(&a.inverse().unwrap()).unwrap().exponent;
        let v_det = a.det().unwrap().valuation().unwrap() as i64;
        prop_assert_eq!(m - m_inv, -v_det);
        // conjugation and powers spread the valuations, so they need more digits
        let wide = k.with_precision(96).unwrap();
        let aw = a.with_spec(&wide);
        let g = random_invertible(&wide, d, -1, &mut r);
        prop_assert_eq!(scale_linear(&aw.conjugate_by(&g).unwrap()).unwrap().exponent, m);
        for power in 2..=3 {
            prop_assert_eq!(scale_linear(&aw.pow(power).unwrap()).unwrap().exponent, power * m);
        }
    }

    #[test]
    fn lie_automorphisms_respect_the_product(seed in any::<u64>(), p in prop::sample::select(vec![7u32, 11, 13])) {
        let k = FieldSpec::padic(p, 32).unwrap();
        let h = NilpotentLieAlgebra::heisenberg(&k).unwrap();
        let mut r = rng(seed);
        // [[M, 0], [c, det M]] preserves [e0, e1] = e2
        let m = random_invertible(&k, 2, 0, &mut r);
        let mut a = Matrix::zeros(&k, 3, 3);
        for i in 0..2 {
            for j in 0..2 {
                a.set(i, j, m.get(i, j).clone());
            }
            a.set(2, i, Element::random(&k, 0, &mut r));
        }
        a.set(2, 2, m.det().unwrap());
        let aut = automorphism_from_lie(&h, &a).unwrap();
        for _ in 0..10 {
            let x: Vec<Element> = (0..3).map(|_| Element::random(&k, 1, &mut r)).collect();
            let y: Vec<Element> = (0..3).map(|_| Element::random(&k, 1, &mut r)).collect();
            let lhs = aut.apply(&h.star(&x, &y)).unwrap();
            let rhs = h.star(&aut.apply(&x).unwrap(), &aut.apply(&y).unwrap());
            prop_assert!(vec_sub(&lhs, &rhs).iter().all(|e| e.is_negligible()));
        }
    }

    #[test]
    fn group_scale_ignores_the_level(a in -2i32..=2, b in -2i32..=2) {
        let k = FieldSpec::padic(7, 32).unwrap();
        let h = NilpotentLieAlgebra::heisenberg(&k).unwrap();
        let aut = automorphism_from_lie(&h, &Matrix::diag_uniformizer(&k, &[a, b, a + b])).unwrap();
        let linear = scale_linear(&aut.matrix).unwrap().exponent;
        for level in 1..=3 {
            match group_scale(&h, &aut, level, OracleMode::Off) {
                Ok(rep) => prop_assert_eq!(rep.exponent, linear),
                Err(locdyn_core::Error::OutsideBall { .. }) => {}
                Err(e) => return Err(TestCaseError::fail(format!("{e}"))),
            }
        }
    }

    #[test]
    fn fixtures_are_deterministic(seed in any::<u64>(), p in prop::sample::select(vec![2u32, 3, 5])) {
        let once = format!("{:?}", frobenius_twist_fixture(p, 24, 5, &mut rng(seed)).unwrap());
        let twice = format!("{:?}", frobenius_twist_fixture(p, 24, 5, &mut rng(seed)).unwrap());
        prop_assert_eq!(once, twice);
        let s1 = format!("{:?}", shift_fixture(p, 2, &mut rng(seed)).unwrap());
        let s2 = format!("{:?}", shift_fixture(p, 2, &mut rng(seed)).unwrap());
        prop_assert_eq!(s1, s2);
        let n1 = format!("{:?}", nonanalytic_fixture(p, 30, None, 3).unwrap());
        let n2 = format!("{:?}", nonanalytic_fixture(p, 30, None, 3).unwrap());
        prop_assert_eq!(n1, n2);
    }
}
