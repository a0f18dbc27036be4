//! One function per task. Each returns the `results` block plus notes and
//! the list of formula/oracle disagreements it observed.

use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use locdyn_core::bch::{automorphism_from_lie, group_scale, verify_ball_subgroup};
use locdyn_core::fixtures::{difference_quotients, frobenius_twist_fixture, nonanalytic_fixture, shift_fixture, DiffQuotientReport};
use locdyn_core::linalg::{is_negligible_vec, vec_add, vec_sub};
use locdyn_core::scaletidy::{classify_vector, scale_bruteforce, scale_of, tidy_check};
use locdyn_core::spectral::{adapted_norm, decompose, orbit_norms, verify_adapted, Norm, SpectralDecomposition};
use locdyn_core::{AbsValue, Element, Error, Matrix, OracleMode, Rational, Result};

use crate::problem::{FixtureInput, NormChoice, Problem, TaskInput};
use crate::report::{abs_value, columns, element, matrix, tagged, tagged_rational, vector};
use crate::syntax::rational_text;

/// Orders certified by the nonanalytic fixture unless `n_max` is given.
const DEFAULT_ORDERS: i32 = 4;

#[derive(Debug, Default)]
pub struct TaskOutput {
    pub results: Map<String, Value>,
    pub notes: Vec<String>,
    pub disagreements: Vec<String>,
}

impl TaskOutput {
    fn put(&mut self, key: &str, v: Value) {
        self.results.insert(key.to_string(), v);
    }
}

fn big(v: Option<u128>) -> Value {
    match v {
        Some(x) => match u64::try_from(x) {
            Ok(small) => Value::from(small),
            Err(_) => Value::String(x.to_string()),
        },
        None => Value::Null,
    }
}

fn power_text(q: u64, m: i64) -> String {
    format!("{q}^{m}")
}

pub fn run_task(problem: &Problem, oracle: OracleMode, rng: &mut ChaCha8Rng) -> Result<TaskOutput> {
    let mut out = TaskOutput::default();
    let alpha = problem.matrix.as_ref();
    match &problem.input {
        TaskInput::Scale { radii } => scale(alpha.unwrap(), radii, oracle, &mut out)?,
        TaskInput::Decompose => decomposition(alpha.unwrap(), &mut out)?,
        TaskInput::AdaptedNorm { vectors, samples, radius } => norm_task(alpha.unwrap(), vectors, *samples, *radius, rng, &mut out)?,
        TaskInput::Tidy { radius, norm, samples } => tidy(alpha.unwrap(), *radius, *norm, *samples, rng, &mut out)?,
        TaskInput::Classify { vector, steps } => classify(alpha.unwrap(), vector, *steps, &mut out)?,
        TaskInput::Orbit { vector, steps, norm } => orbit(alpha.unwrap(), vector, *steps, *norm, &mut out)?,
        TaskInput::BchScale { level, samples } => bch_scale(problem, *level, *samples, oracle, rng, &mut out)?,
        TaskInput::Fixture(f) => fixture(f, rng, &mut out)?,
        TaskInput::Diffquot { map, x, y, jmax } => {
            let rep = difference_quotients(map, x, y, *jmax)?;
            out.put("map", Value::from(rep.map));
            out.put("x", element(x));
            out.put("y", element(y));
            out.put("quotients", quotients(&rep));
        }
    }
    Ok(out)
}

fn scale(alpha: &Matrix, radii: &[Rational], oracle: OracleMode, out: &mut TaskOutput) -> Result<()> {
    let dec = decompose(alpha)?;
    let s = scale_of(&dec)?;
    let norm = Norm::Adapted(adapted_norm(&dec)?);
    out.put("q", tagged(s.q, "residue-field-order"));
    let mut methods = Map::new();
    for (m, e) in &s.methods {
        methods.insert(m.tag().to_string(), tagged(*e, m.tag()));
    }
    out.put("exponent", tagged(s.exponent, "polygon"));
    out.put("exponent_by_method", Value::Object(methods));
    out.put("scale", tagged(big(s.value), "polygon"));
    out.put("scale_power", Value::String(power_text(s.q, s.exponent)));
    let mut checks = Vec::new();
    for r in radii {
        let rep = scale_bruteforce(&dec, &norm, *r, oracle)?;
        let mut row = Map::new();
        row.insert("radius".into(), tagged_rational(r, "input"));
        row.insert("effective_radius".into(), tagged_rational(&norm.effective_radius(*r), "value-group-grid"));
        row.insert("index_exponent".into(), tagged(rep.exponent, "hermite"));
        row.insert(
            "cosets".into(),
            match rep.enumerated {
                Some(n) => tagged(n, "enumeration"),
                None => Value::Null,
            },
        );
        if rep.exponent != s.exponent {
            out.disagreements.push(format!(
                "radius {}: index exponent {} differs from the polygon exponent {}",
                rational_text(r),
                rep.exponent,
                s.exponent
            ));
        }
        if let (Some(n), Some(v)) = (rep.enumerated, s.value) {
            if n as u128 != v {
                out.disagreements.push(format!("radius {}: {n} cosets enumerated, scale is {v}", rational_text(r)));
            }
        }
        checks.push(Value::Object(row));
    }
    if oracle == OracleMode::Off {
        out.notes.push("coset enumeration disabled (--oracle off); Hermite indices only".into());
    }
    out.put("bruteforce", Value::Array(checks));
    out.put("agree", Value::Bool(out.disagreements.is_empty()));
    Ok(())
}

fn decomposition_value(dec: &SpectralDecomposition) -> Map<String, Value> {
    let mut m = Map::new();
    let poly = dec.polygon();
    m.insert(
        "polygon".into(),
        json!({
            "vertices": tagged(poly.vertices.iter().map(|(i, v)| json!([i, v])).collect::<Vec<_>>(), "newton-polygon"),
            "segments": poly.segments.iter().map(|s| json!({
                "slope": tagged_rational(&s.slope, "newton-polygon"),
                "length": tagged(s.length, "newton-polygon"),
                "root_abs": tagged(abs_value(&AbsValue::from_exponent(-s.slope)), "newton-polygon"),
            })).collect::<Vec<_>>(),
        }),
    );
    let comps: Vec<Value> = dec
        .components()
        .iter()
        .map(|c| {
            json!({
                "slope": tagged_rational(&c.slope, "newton-polygon"),
                "abs": tagged(abs_value(&c.abs), "newton-polygon"),
                "dim": tagged(c.dim(), "kernel-rank"),
                "basis": columns(&c.basis),
                "factor": c.factor.coeffs().iter().map(element).collect::<Vec<_>>(),
                "block": matrix(&c.block),
            })
        })
        .collect();
    m.insert("components".into(), Value::Array(comps));
    m.insert("change_of_basis".into(), matrix(dec.change_of_basis()));
    m.insert(
        "block_defect".into(),
        match dec.block_defect() {
            Some(v) => tagged(v, "off-block-valuation"),
            None => Value::String("exact".into()),
        },
    );
    m
}

fn decomposition(alpha: &Matrix, out: &mut TaskOutput) -> Result<()> {
    let dec = decompose(alpha)?;
    out.put("char_poly", Value::Array(alpha.char_poly()?.coeffs().iter().map(element).collect()));
    for (k, v) in decomposition_value(&dec) {
        out.results.insert(k, v);
    }
    Ok(())
}

fn adapted(alpha: &Matrix) -> Result<(SpectralDecomposition, Norm)> {
    let dec = decompose(alpha)?;
    let n = adapted_norm(&dec)?;
    Ok((dec, Norm::Adapted(n)))
}

fn norm_task(
    alpha: &Matrix,
    vectors: &[Vec<Element>],
    samples: usize,
    radius: Option<Rational>,
    rng: &mut ChaCha8Rng,
    out: &mut TaskOutput,
) -> Result<()> {
    let (dec, norm) = adapted(alpha)?;
    let Norm::Adapted(n) = &norm else { unreachable!() };
    let comps: Vec<Value> = n
        .components()
        .iter()
        .map(|c| {
            json!({
                "slope": tagged_rational(&c.slope, "newton-polygon"),
                "h": tagged(c.h, "newton-polygon"),
                "e": tagged(c.e, "newton-polygon"),
                "lattice": columns(c.lattice.basis()),
                "saturation_steps": tagged(c.saturation_steps, "saturation"),
            })
        })
        .collect();
    out.put("components", Value::Array(comps));
    out.put("value_denominator", tagged(n.value_denominator(), "newton-polygon"));
    out.put("lattices_invariant", Value::Bool(n.lattices_invariant()?));
    let rep = verify_adapted(&norm, &dec, samples, rng)?;
    out.put(
        "axioms",
        json!({
            "samples": tagged(rep.samples, "sampled"),
            "A1": rep.a1,
            "A2": rep.a2,
            "A3": rep.a3,
            "failures": rep.failures,
        }),
    );
    if !rep.passed() {
        out.disagreements.push("the constructed norm fails the sampled axioms".into());
    }
    let evals: Vec<Value> = vectors
        .iter()
        .map(|v| Ok(json!({ "vector": vector(v), "norm": tagged(abs_value(&norm.eval(v)?), "adapted-norm") })))
        .collect::<Result<_>>()?;
    if !evals.is_empty() {
        out.put("evaluations", Value::Array(evals));
    }
    if let Some(t) = radius {
        let ball = norm.ball(alpha.spec(), dec.dim(), t)?;
        out.put(
            "ball",
            json!({
                "radius": tagged_rational(&t, "input"),
                "effective_radius": tagged_rational(&norm.effective_radius(t), "value-group-grid"),
                "basis": columns(ball.basis()),
                "covolume_exponent": tagged(ball.covolume_exponent(), "hermite"),
            }),
        );
    }
    Ok(())
}

fn tidy(alpha: &Matrix, radius: Rational, choice: NormChoice, samples: usize, rng: &mut ChaCha8Rng, out: &mut TaskOutput) -> Result<()> {
    let dec = decompose(alpha)?;
    let norm = match choice {
        NormChoice::Adapted => Norm::Adapted(adapted_norm(&dec)?),
        NormChoice::Max => Norm::Max,
    };
    let s = scale_of(&dec)?;
    let rep = tidy_check(&dec, &norm, radius, samples, rng)?;
    out.put("norm", Value::from(choice.name()));
    out.put("radius", tagged_rational(&rep.radius, "input"));
    out.put("effective_radius", tagged_rational(&rep.effective_radius, "value-group-grid"));
    out.put("v_plus", columns(&rep.v_plus));
    out.put("v_minus", columns(&rep.v_minus));
    out.put("plus_minus", Value::Bool(rep.plus_minus));
    out.put("TA", Value::Bool(rep.ta));
    out.put("TB", Value::Bool(rep.tb));
    out.put("tidy", Value::Bool(rep.tidy()));
    out.put("index_plus", tagged(rep.index_plus, "hermite"));
    out.put("index_minus", tagged(rep.index_minus, "hermite"));
    out.put("det_valuation", tagged(rep.det_valuation, "elimination"));
    out.put("scale_exponent", tagged(s.exponent, "polygon"));
    out.put("consistent", Value::Bool(rep.consistent));
    out.put("chain_length", tagged(rep.chain_length, "chain-stabilization"));
    out.put("samples", tagged(rep.samples, "sampled"));
    out.notes.extend(rep.notes.iter().cloned());
    if !rep.consistent {
        out.disagreements.push("index_plus - index_minus differs from -v(det)".into());
    }
    if rep.tidy() && rep.index_plus != s.exponent {
        out.disagreements.push(format!(
            "tidy ball gives [αV_+ : V_+] = q^{}, polygon gives q^{}",
            rep.index_plus, s.exponent
        ));
    }
    Ok(())
}

fn behaviour(values: &[AbsValue]) -> &'static str {
    if values.iter().all(AbsValue::is_zero) {
        "zero"
    } else if values.windows(2).all(|w| w[1] < w[0]) {
        "decays"
    } else if values.windows(2).all(|w| w[1] > w[0]) {
        "grows"
    } else if values.windows(2).all(|w| w[1] == w[0]) {
        "bounded"
    } else {
        "mixed"
    }
}

fn classify(alpha: &Matrix, x: &[Element], steps: usize, out: &mut TaskOutput) -> Result<()> {
    let (dec, norm) = adapted(alpha)?;
    let c = classify_vector(&dec, x)?;
    let sum = vec_add(&vec_add(&c.contraction, &c.levi), &c.anticontraction);
    if !is_negligible_vec(&vec_sub(&sum, x)) {
        return Err(Error::PrecisionExhausted("the three parts do not add back to x".into()));
    }
    out.put("vector", vector(x));
    let parts = [
        ("contraction", &c.contraction, "decays"),
        ("levi", &c.levi, "bounded"),
        ("anticontraction", &c.anticontraction, "grows"),
    ];
    for (name, part, expected) in parts {
        let orbit = orbit_norms(alpha, part, &norm, steps)?;
        let seen = behaviour(&orbit.values);
        if seen != "zero" && seen != expected && !(orbit.truncated && orbit.values.len() < 2) {
            out.disagreements.push(format!("{name} part should {expected} under α but {seen}"));
        }
        out.put(
            name,
            json!({
                "part": vector(part),
                "orbit_norms": tagged(orbit.values.iter().map(abs_value).collect::<Vec<_>>(), "adapted-norm"),
                "truncated": orbit.truncated,
                "behaviour": seen,
            }),
        );
    }
    Ok(())
}

fn orbit(alpha: &Matrix, x: &[Element], steps: usize, choice: NormChoice, out: &mut TaskOutput) -> Result<()> {
    let norm = match choice {
        NormChoice::Adapted => adapted(alpha)?.1,
        NormChoice::Max => Norm::Max,
    };
    let orbit = orbit_norms(alpha, x, &norm, steps)?;
    let method = format!("{}-norm", choice.name());
    out.put("vector", vector(x));
    out.put("norm", Value::from(choice.name()));
    out.put("norms", tagged(orbit.values.iter().map(abs_value).collect::<Vec<_>>(), &method));
    out.put("truncated", Value::Bool(orbit.truncated));
    out.put("behaviour", Value::from(behaviour(&orbit.values)));
    if orbit.truncated {
        out.notes.push(format!("orbit left the precision margin after {} steps", orbit.values.len()));
    }
    Ok(())
}

fn bch_scale(problem: &Problem, level: i32, samples: usize, oracle: OracleMode, rng: &mut ChaCha8Rng, out: &mut TaskOutput) -> Result<()> {
    let alg = problem.algebra.as_ref().unwrap();
    let a = problem.matrix.as_ref().unwrap();
    let aut = automorphism_from_lie(alg, a)?;
    let rep = group_scale(alg, &aut, level, oracle)?;
    let ball = verify_ball_subgroup(alg, level, samples, rng)?;
    out.put("dim", tagged(alg.dim(), "input"));
    out.put("class", tagged(alg.class(), "lower-central-series"));
    out.put("level", tagged(rep.level, "input"));
    out.put("group_exponent", tagged(rep.exponent, "hermite"));
    out.put("group_scale", tagged(big(rep.value), "hermite"));
    out.put(
        "star_cosets",
        match rep.star_cosets {
            Some(n) => tagged(n, "star-coset-closure"),
            None => Value::Null,
        },
    );
    out.put("pairwise_checked", Value::Bool(rep.pairwise_checked));
    out.put("lie_exponent", tagged(rep.linear.exponent, "polygon"));
    out.put("lie_scale", tagged(big(rep.linear.value), "polygon"));
    out.put("agree", Value::Bool(rep.agree));
    out.put(
        "ball_subgroup",
        json!({
            "level": tagged(ball.level, "input"),
            "lie_closed": ball.lie_closed,
            "closed": ball.closed,
            "inverses": ball.inverses,
            "coset_identity": ball.coset_identity,
            "samples": tagged(ball.samples, "sampled"),
            "witness": ball.witness,
        }),
    );
    out.notes.extend(ball.notes.iter().cloned());
    if !rep.agree {
        out.disagreements.push(format!(
            "group scale q^{} (star cosets {:?}) differs from the Lie algebra scale q^{}",
            rep.exponent, rep.star_cosets, rep.linear.exponent
        ));
    }
    if !ball.passed() {
        out.disagreements.push("the ball failed the sampled subgroup checks".into());
    }
    Ok(())
}

fn quotients(rep: &DiffQuotientReport) -> Value {
    json!({
        "steps": rep.steps.iter().map(|s| json!({
            "j": tagged(s.j, "input"),
            "value": element(&s.value),
            "known_digits": tagged(s.known_digits, "truncation"),
            "change_valuation": s.change_valuation.map(|v| tagged(v, "difference")),
        })).collect::<Vec<_>>(),
        "converging": rep.converging,
        "limit": rep.limit.as_ref().map(element),
        "limit_digits": tagged(rep.limit_digits, "difference"),
    })
}

fn fixture(f: &FixtureInput, rng: &mut ChaCha8Rng, out: &mut TaskOutput) -> Result<()> {
    match f {
        FixtureInput::Shift { p, window } => {
            let rep = shift_fixture(*p, *window, rng)?;
            out.put("name", Value::from("shift"));
            out.put("p", tagged(rep.p, "input"));
            out.put("window", tagged(rep.window, "input"));
            out.put("lie_exponent", tagged(rep.linear.exponent, "polygon"));
            out.put("lie_scale", tagged(big(rep.linear.value), "polygon"));
            out.put("group_scale", tagged(rep.group_scale, "compactness"));
            out.put("group_scale_reason", Value::from(rep.group_scale_reason));
            out.put("configurations", tagged(rep.configurations, if rep.exhaustive { "exhaustive" } else { "sampled" }));
            out.put("witnessed", tagged(rep.witnessed, "window-witness"));
            out.put("mismatch", Value::Bool(rep.mismatch));
            let lie = big(rep.linear.value);
            out.put(
                "verdict",
                Value::String(if rep.mismatch {
                    format!("mismatch: group scale {} but Lie algebra scale {lie}", rep.group_scale)
                } else {
                    "group and Lie algebra scales agree".into()
                }),
            );
            if rep.witnessed != rep.configurations {
                out.disagreements.push(format!(
                    "only {} of {} configurations have window witnesses",
                    rep.witnessed, rep.configurations
                ));
            }
        }
        FixtureInput::FrobeniusTwist { p, precision, samples } => {
            let rep = frobenius_twist_fixture(*p, *precision, *samples, rng)?;
            out.put("name", Value::from("frobenius-twist"));
            out.put("p", tagged(rep.p, "input"));
            out.put("precision", tagged(rep.precision, "input"));
            out.put("samples", tagged(rep.samples, "sampled"));
            out.put("additive", Value::Bool(rep.additive));
            out.put("unitriangular", Value::Bool(rep.unitriangular));
            out.put("inverse_ok", Value::Bool(rep.inverse_ok));
            out.put("inverse_iterations", tagged(rep.inverse_iterations, "fixed-point"));
            out.put("image_of_x", Value::Bool(rep.image_of_x));
            out.put("derivative", quotients(&rep.derivative));
            out.put("derivative_identity", Value::Bool(rep.derivative_identity));
            out.put("moved_levels", tagged(rep.moved_levels.clone(), "witness-search"));
            out.put("all_levels_moved", Value::Bool(rep.all_levels_moved));
            out.put("passed", Value::Bool(rep.passed()));
            if !rep.passed() {
                out.disagreements.push("the Frobenius twist fixture failed a check".into());
            }
        }
        FixtureInput::Nonanalytic { p, precision, exponents, n_max } => {
            let mut rep = nonanalytic_fixture(*p, *precision, exponents.clone(), n_max.unwrap_or(DEFAULT_ORDERS))?;
            // orders whose sweep starts beyond the visible valuations check nothing
            if let Some(c) = rep.certificates.iter().find(|c| c.checked == 0) {
                let msg = format!("order n = {} needs differences from valuation {} on, invisible at precision {}", c.n, c.from_valuation, precision);
                if n_max.is_some() {
                    return Err(Error::PrecisionExhausted(msg));
                }
                out.notes.push(format!("{msg}; reporting orders below {}", c.n));
                let keep = c.n;
                rep.certificates.retain(|c| c.n < keep);
            }
            if rep.certificates.is_empty() {
                return Err(Error::PrecisionExhausted(format!("precision {precision} certifies no order")));
            }
            out.put("name", Value::from("nonanalytic"));
            out.put("p", tagged(rep.p, "input"));
            out.put("precision", tagged(rep.precision, "input"));
            out.put("exponents", tagged(rep.exponents.clone(), "input"));
            out.put("exponent_bound", Value::Bool(rep.exponent_bound));
            out.put(
                "certificates",
                Value::Array(
                    rep.certificates
                        .iter()
                        .map(|c| {
                            json!({
                                "n": tagged(c.n, "input"),
                                "from_valuation": tagged(c.from_valuation, "sweep"),
                                "checked": tagged(c.checked, "sweep"),
                                "holds": c.holds,
                                "witness": c.witness,
                            })
                        })
                        .collect(),
                ),
            );
            out.put("monotone", Value::Bool(rep.monotone));
            out.put("zero_fixed", Value::Bool(rep.zero_fixed));
            out.put("passed", Value::Bool(rep.passed()));
            if !rep.passed() {
                out.disagreements.push("the nonanalytic fixture failed a check".into());
            }
        }
    }
    Ok(())
}
