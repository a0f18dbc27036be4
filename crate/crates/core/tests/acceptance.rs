//! Acceptance suite: one line per criterion, process fails if any does.

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use locdyn_core::bch::{automorphism_from_lie, bch_inv, bch_mul, group_scale, verify_ball_subgroup, NilpotentLieAlgebra};
use locdyn_core::fixtures::{frobenius_twist_fixture, nonanalytic_fixture, shift_fixture};
use locdyn_core::linalg::{vec_scale, Lattice};
use locdyn_core::newton::{newton_polygon, total_valuation};
use locdyn_core::samples::{block_matrix, random_automorphism, random_invertible, Block};
use locdyn_core::scaletidy::{scale_bruteforce, scale_linear, scale_of, tidy_check};
use locdyn_core::spectral::{adapted_norm, decompose, verify_adapted, Norm};
use locdyn_core::{Element, FieldSpec, Matrix, OracleMode, Rational};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fields(n: i32) -> Vec<Arc<FieldSpec>> {
    vec![
        FieldSpec::padic(2, n).unwrap(),
        FieldSpec::padic(3, n).unwrap(),
        FieldSpec::laurent(2, n).unwrap(),
        FieldSpec::laurent(3, n).unwrap(),
    ]
}

fn criterion_1() -> Outcome {
    let mut checked = 0;
    for p in [2u32, 3] {
        for spec in [FieldSpec::padic(p, 32).unwrap(), FieldSpec::laurent(p, 32).unwrap()] {
            for n in 1..=3usize {
                for m in 1..=2i32 {
                    for t in [-1, 0, 2] {
                        // B_r with r = q^t is π^(1 - t) O^n; shrinking r by p^m gives π^(1 - t + m) O^n
                        let big = Lattice::standard(&spec, n).scaled(1 - t);
                        let small = big.scaled(m);
                        let count = big.enumerate_cosets(&small, 4096).map_err(|e| format!("{e}"))?;
                        let expect = (p as u64).pow(m as u32 * n as u32);
                        ensure(count == expect, || format!("p={p} n={n} m={m}: {count} cosets, expected {expect}"))?;
                        checked += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{checked} ball pairs"))
}

fn criterion_2(rng: &mut ChaCha8Rng) -> Outcome {
    let mut enumerated = 0;
    let fs = fields(32);
    let total = 64;
    for i in 0..total {
        let spec = &fs[i % fs.len()];
        let n = 1 + i % 3;
        let a = random_invertible(spec, n, -1, rng);
        let det_exp = -(a.det().unwrap().valuation().unwrap() as i64);
        let std = Lattice::standard(spec, n);
        let img = std.image(&a).map_err(|e| format!("{e}"))?;
        let meet = std.intersection(&img).map_err(|e| format!("{e}"))?;
        let up = img.index_bruteforce(&meet, OracleMode::Auto).map_err(|e| format!("{e}"))?;
        let down = std.index_bruteforce(&meet, OracleMode::Auto).map_err(|e| format!("{e}"))?;
        if up.enumerated.is_some() && down.enumerated.is_some() {
            enumerated += 1;
        }
        let hermite = up.exponent - down.exponent;
        let chi = a.char_poly().map_err(|e| format!("{e}"))?;
        let roots = -total_valuation(&newton_polygon(&chi).map_err(|e| format!("{e}"))?);
        ensure(hermite == det_exp && roots == Rational::from_integer(det_exp), || {
            format!("sample {i}: Hermite {hermite}, det {det_exp}, roots {roots}")
        })?;
    }
    Ok(format!("{total} matrices, {enumerated} with both quotients enumerated"))
}

/// Automorphisms for criteria 3-5: half from random block patterns, half
/// with a forced fractional-slope block.
fn automorphism_set(rng: &mut ChaCha8Rng) -> Vec<Matrix> {
    let fs = fields(32);
    let mut out = Vec::new();
    for i in 0..24 {
        let spec = &fs[i % fs.len()];
        let d = 1 + i % 4;
        let a = if i % 2 == 1 && d >= 2 {
            let e = d.min(2 + i % 3);
            let mut blocks = vec![Block::Root { h: if i % 4 == 1 { 1 } else { -1 }, e }];
            for _ in e..d {
                blocks.push(Block::Scalar(rng.gen_range(-2..=2)));
            }
            let g = Matrix::random_isometry(spec, d, rng);
            block_matrix(spec, &blocks, rng).conjugate_by(&g).unwrap()
        } else {
            random_automorphism(spec, d, true, rng)
        };
        out.push(a);
    }
    out
}

fn criterion_3(set: &[Matrix], rng: &mut ChaCha8Rng) -> Outcome {
    let mut fractional = 0;
    for (i, a) in set.iter().enumerate() {
        let dec = decompose(a).map_err(|e| format!("automorphism {i}: {e}"))?;
        if dec.components().iter().any(|c| c.e > 1) {
            fractional += 1;
        }
        let norm = Norm::Adapted(adapted_norm(&dec).map_err(|e| format!("automorphism {i}: {e}"))?);
        let rep = verify_adapted(&norm, &dec, 100, rng).map_err(|e| format!("{e}"))?;
        ensure(rep.passed(), || format!("automorphism {i}: {:?}", rep.failures.first()))?;
    }
    ensure(fractional > 0, || "no fractional slopes in the set".into())?;
    Ok(format!("{} automorphisms ({fractional} with fractional slopes), 100 samples each", set.len()))
}

fn criterion_4(set: &[Matrix], rng: &mut ChaCha8Rng) -> Outcome {
    let mut conjugations = 0;
    for (i, a) in set.iter().enumerate() {
        let dec = decompose(a).map_err(|e| format!("{e}"))?;
        let s = scale_of(&dec).map_err(|e| format!("automorphism {i}: {e}"))?;
        let norm = Norm::Adapted(adapted_norm(&dec).map_err(|e| format!("{e}"))?);
        for t in [-1, 0, 1] {
            let b = scale_bruteforce(&dec, &norm, Rational::from_integer(t), OracleMode::Auto).map_err(|e| format!("{e}"))?;
            ensure(b.exponent == s.exponent, || format!("automorphism {i}: bruteforce {} vs {}", b.exponent, s.exponent))?;
        }
        for _ in 0..20 {
            let g = random_invertible(a.spec(), a.rows(), -1, rng);
            let c = scale_linear(&a.conjugate_by(&g).unwrap()).map_err(|e| format!("automorphism {i} conjugated: {e}"))?;
            ensure(c.exponent == s.exponent, || format!("automorphism {i}: conjugate scale {} vs {}", c.exponent, s.exponent))?;
            conjugations += 1;
        }
    }
    Ok(format!("{} automorphisms, 3 radii, {conjugations} conjugations", set.len()))
}

fn criterion_5(set: &[Matrix], rng: &mut ChaCha8Rng) -> Outcome {
    for (i, a) in set.iter().enumerate() {
        let dec = decompose(a).map_err(|e| format!("{e}"))?;
        let norm = Norm::Adapted(adapted_norm(&dec).map_err(|e| format!("{e}"))?);
        for t in [-1, 0, 2] {
            let r = tidy_check(&dec, &norm, Rational::from_integer(t), 10, rng).map_err(|e| format!("automorphism {i}: {e}"))?;
            ensure(r.ta && r.tb && r.plus_minus && r.consistent, || format!("automorphism {i} radius {t}: {:?}", r.notes))?;
        }
    }
    Ok(format!("{} automorphisms at 3 radii", set.len()))
}

fn criterion_6() -> Outcome {
    let mut lines = Vec::new();
    for p in [7u32, 11] {
        let spec = FieldSpec::padic(p, 32).unwrap();
        let h = NilpotentLieAlgebra::heisenberg(&spec).map_err(|e| format!("{e}"))?;
        for (ks, expect) in [([-1, 1, 0], 1i64), ([-1, -1, -2], 4)] {
            let a = Matrix::diag_uniformizer(&spec, &ks);
            let aut = automorphism_from_lie(&h, &a).map_err(|e| format!("{e}"))?;
            let g = group_scale(&h, &aut, 1, OracleMode::Auto).map_err(|e| format!("{e}"))?;
            let l = scale_linear(&a).map_err(|e| format!("{e}"))?;
            ensure(g.exponent == expect && l.exponent == expect, || {
                format!("p={p} {ks:?}: group q^{} linear q^{}", g.exponent, l.exponent)
            })?;
            lines.push(format!("p={p}: {}", g.value.unwrap()));
        }
    }
    Ok(lines.join(", "))
}

fn criterion_7(rng: &mut ChaCha8Rng) -> Outcome {
    for p in [2u32, 3, 5] {
        let r = shift_fixture(p, 2, rng).map_err(|e| format!("{e}"))?;
        ensure(r.group_scale == 1 && r.linear.value == Some(p as u128) && r.witnessed == r.configurations, || {
            format!("p={p}: s_G {} linear {:?}", r.group_scale, r.linear.value)
        })?;
    }
    Ok("s_G = 1, linear scale p for p = 2, 3, 5".into())
}

fn criterion_8(rng: &mut ChaCha8Rng) -> Outcome {
    for p in [2u32, 3, 5, 7] {
        let r = frobenius_twist_fixture(p, 32, 100, rng).map_err(|e| format!("{e}"))?;
        let levels = (0..).take_while(|m| m * (p as i32) < 31).count();
        ensure(r.passed() && r.moved_levels.len() == levels, || format!("p={p}: {r:?}"))?;
    }
    Ok("p = 2, 3, 5, 7 at N = 32".into())
}

fn criterion_9() -> Outcome {
    let mut checked = 0;
    for p in [2u32, 3] {
        let r = nonanalytic_fixture(p, 64, None, 4).map_err(|e| format!("{e}"))?;
        ensure(r.passed(), || format!("p={p}: {:?}", r.certificates))?;
        checked += r.certificates.iter().map(|c| c.checked).sum::<u64>();
    }
    Ok(format!("n <= 4, {checked} swept points"))
}

fn criterion_10(rng: &mut ChaCha8Rng) -> Outcome {
    let spec = FieldSpec::padic(7, 32).unwrap();
    let algebras = vec![
        ("heisenberg", NilpotentLieAlgebra::heisenberg(&spec).unwrap()),
        ("filiform-4", NilpotentLieAlgebra::filiform(&spec, 4).unwrap()),
        ("filiform-6", NilpotentLieAlgebra::filiform(&spec, 6).unwrap()),
    ];
    let two = Element::from_integer(&spec, 2);
    for (name, alg) in &algebras {
        let d = alg.dim();
        let ball = Lattice::standard(&spec, d).scaled(1);
        for s in 0..100 {
            let mut r = || (0..d).map(|_| Element::random(&spec, 1, rng)).collect::<Vec<_>>();
            let (x, y, z) = (r(), r(), r());
            let xy = bch_mul(alg, &x, &y).map_err(|e| format!("{e}"))?;
            let left = bch_mul(alg, &xy, &z).map_err(|e| format!("{e}"))?;
            let right = bch_mul(alg, &x, &bch_mul(alg, &y, &z).unwrap()).map_err(|e| format!("{e}"))?;
            ensure(left == right, || format!("{name} sample {s}: associativity"))?;
            ensure(ball.contains(&xy), || format!("{name} sample {s}: product leaves the ball"))?;
            ensure(bch_mul(alg, &x, &x).unwrap() == vec_scale(&x, &two), || format!("{name} sample {s}: x*x"))?;
            let inv = bch_inv(alg, &x).unwrap();
            ensure(inv == x.iter().map(|e| -e).collect::<Vec<_>>(), || format!("{name} sample {s}: inverse"))?;
            ensure(bch_mul(alg, &x, &inv).unwrap() == alg.zero(), || format!("{name} sample {s}: x*x^-1"))?;
        }
        let rep = verify_ball_subgroup(alg, 1, 100, rng).map_err(|e| format!("{e}"))?;
        ensure(rep.passed(), || format!("{name}: {:?}", rep.witness))?;
    }
    Ok("heisenberg, filiform classes 3 and 5, 100 samples each".into())
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let set = automorphism_set(&mut rng);
    let mut failed = 0;
    let mut run = |id: u32, limit: Option<u64>, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let out = f();
        let took = start.elapsed();
        let slow = limit.is_some_and(|l| took > Duration::from_secs(l));
        let (status, detail) = match (&out, slow) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("{d}; over the {} s limit", limit.unwrap())),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("criterion {id:>2}: {status} ({:.2} s) {detail}", took.as_secs_f64());
    };
    run(1, Some(5), &mut criterion_1);
    run(2, Some(30), &mut || criterion_2(&mut ChaCha8Rng::seed_from_u64(2)));
    run(3, Some(60), &mut || criterion_3(&set, &mut ChaCha8Rng::seed_from_u64(3)));
    run(4, Some(60), &mut || criterion_4(&set, &mut ChaCha8Rng::seed_from_u64(4)));
    run(5, None, &mut || criterion_5(&set, &mut ChaCha8Rng::seed_from_u64(5)));
    run(6, Some(10), &mut criterion_6);
    run(7, None, &mut || criterion_7(&mut ChaCha8Rng::seed_from_u64(7)));
    run(8, Some(5), &mut || criterion_8(&mut ChaCha8Rng::seed_from_u64(8)));
    run(9, None, &mut criterion_9);
    run(10, None, &mut || criterion_10(&mut ChaCha8Rng::seed_from_u64(10)));
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
