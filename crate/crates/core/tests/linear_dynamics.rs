use locdyn_core::samples::random_automorphism;
use locdyn_core::scaletidy::{scale_bruteforce, scale_of, tidy_check};
use locdyn_core::spectral::{adapted_norm, decompose, verify_adapted, Norm};
use locdyn_core::{FieldSpec, OracleMode, Rational};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn random_automorphisms_are_tidy() {
    let fields = [FieldSpec::padic(2, 32).unwrap(), FieldSpec::padic(3, 32).unwrap(), FieldSpec::laurent(2, 32).unwrap(), FieldSpec::laurent(3, 32).unwrap()];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut fails = 0;
    let rounds: usize = std::env::var("STRESS").ok().and_then(|s| s.parse().ok()).unwrap_or(40);
    for round in 0..rounds {
        let k = &fields[round % fields.len()];
        let d = 1 + round % 4;
        let a = random_automorphism(k, d, true, &mut rng);
        let dec = match decompose(&a) {
            Ok(d) => d,
            Err(e) => { eprintln!("round {round}: decompose {e:?}\n{a:?}"); fails += 1; continue; }
        };
        let norm = match adapted_norm(&dec) {
            Ok(n) => Norm::Adapted(n),
            Err(e) => { eprintln!("round {round}: norm {e:?}"); fails += 1; continue; }
        };
        let rep = verify_adapted(&norm, &dec, 20, &mut rng).unwrap();
        if !rep.passed() { eprintln!("round {round}: axioms {:?}", &rep.failures[..rep.failures.len().min(3)]); fails += 1; continue; }
        let s = scale_of(&dec).unwrap();
        let g = locdyn_core::samples::random_invertible(k, d, -1, &mut rng);
        match locdyn_core::scaletidy::scale_linear(&a.conjugate_by(&g).unwrap()) {
            Ok(c) if c.exponent == s.exponent => {}
            other => { eprintln!("round {round}: conjugate {other:?}"); fails += 1; }
        }
        for t in [-1, 0, 1] {
            let b = scale_bruteforce(&dec, &norm, Rational::from_integer(t), OracleMode::Auto).unwrap();
            if b.exponent != s.exponent { eprintln!("round {round}: scale {} vs {}", b.exponent, s.exponent); fails += 1; }
            match tidy_check(&dec, &norm, Rational::from_integer(t), 5, &mut rng) {
                Ok(r) if r.tidy() => {}
                Ok(r) => { eprintln!("round {round}: untidy {:?}", r.notes); fails += 1; }
                Err(e) => { eprintln!("round {round}: tidy {e:?}"); fails += 1; }
            }
        }
    }
    assert_eq!(fails, 0);
}
