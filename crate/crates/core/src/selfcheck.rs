//! Invariant suites at fixed small parameters, one pass/fail line each.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::codes::{rs_code, LinearCode};
use crate::config::{Budget, Tolerances};
use crate::decode::{berlekamp_welch, brute_force_list, unique_radius};
use crate::error::Result;
use crate::galois::fourier::{code_character_sum, fourier_transform};
use crate::galois::vector::decode_index;
use crate::galois::{character, ComplexFunction, Direction, FieldVector, Fq};
use crate::noise::{convolution_square_sum, fourth_power_sum, tail_mass, ConstraintSet, ErrorProfile};
use crate::opi::{brute_force_icc, brute_force_opi, opi_to_icc, OpiInstance};
use crate::qsim::{verify_bound, DecoderUnitary, QuantumState, Reduction};
use crate::rng::{stream, Stream};
use crate::thresholds::{max_reference_deviation, table1};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

type Suite = fn(&Tolerances, &Budget, &mut ChaCha8Rng) -> Result<(bool, String)>;

const SUITES: [(&str, Suite); 13] = [
    ("field", field_suite),
    ("orthogonality", orthogonality_suite),
    ("parseval", parseval_suite),
    ("codes", codes_suite),
    ("character_sum", character_sum_suite),
    ("noise", noise_suite),
    ("fourth_power", fourth_power_suite),
    ("decode", decode_suite),
    ("unitarity", unitarity_suite),
    ("symmetrization", symmetrization_suite),
    ("reduction", reduction_suite),
    ("thresholds", thresholds_suite),
    ("opi", opi_suite),
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|(n, _)| *n).collect()
}

/// Runs every suite. Each suite draws from its own generator so the report
/// depends only on `seed`.
pub fn run_all(tol: &Tolerances, budget: &Budget, seed: u64) -> Vec<SuiteResult> {
    SUITES
        .iter()
        .enumerate()
        .map(|(i, (name, suite))| {
            let mut rng = stream(seed.wrapping_add(i as u64), Stream::SelfCheck);
            let (passed, detail) = match suite(tol, budget, &mut rng) {
                Ok(r) => r,
                Err(e) => (false, format!("error: {e}")),
            };
            SuiteResult { name: name.to_string(), passed, detail }
        })
        .collect()
}

fn random_function(field: Fq, n: usize, rng: &mut ChaCha8Rng, budget: &Budget) -> Result<ComplexFunction> {
    let mut f = ComplexFunction::zeros(field, n, budget)?;
    for a in f.amps.iter_mut() {
        *a = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
    }
    Ok(f)
}

fn field_suite(_: &Tolerances, _: &Budget, _: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut ok = true;
    for q in [2u32, 3, 5, 7, 11] {
        let f = Fq::new(q)?;
        for a in 0..q {
            if a != 0 {
                ok &= f.mul(a, f.inv(a)?) == 1;
            }
            ok &= f.add(a, f.neg(a)) == 0;
            for b in 0..q {
                for c in 0..q {
                    ok &= f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c));
                }
            }
        }
    }
    ok &= f_inv_is_error()?;
    Ok((ok, "axioms for q in {2,3,5,7,11}".into()))
}

fn f_inv_is_error() -> Result<bool> {
    Ok(Fq::new(7)?.inv(0).is_err() && Fq::new(9).is_err())
}

fn orthogonality_suite(tol: &Tolerances, _: &Budget, _: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let (q, n) = (3u32, 3usize);
    let f = Fq::new(q)?;
    let size = 27usize;
    let mut worst = 0.0f64;
    for x in 0..size {
        for x2 in 0..size {
            let xv = FieldVector::from_index(f, n, x);
            let x2v = FieldVector::from_index(f, n, x2);
            let mut sum = Complex64::new(0.0, 0.0);
            for y in 0..size {
                let yv = FieldVector::from_index(f, n, y);
                sum += character(&yv, &xv)? * character(&yv, &x2v)?.conj();
            }
            let expected = if x == x2 { size as f64 } else { 0.0 };
            worst = worst.max((sum - expected).norm() / size as f64);
        }
    }
    Ok((worst <= tol.orthogonality, format!("max relative deviation {worst:.3e}")))
}

fn parseval_suite(tol: &Tolerances, budget: &Budget, rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let f = Fq::new(5)?;
    let mut worst = 0.0f64;
    for _ in 0..4 {
        let g = random_function(f, 4, rng, budget)?;
        let hat = fourier_transform(&g, Direction::Forward, budget)?;
        worst = worst.max((hat.norm() - g.norm()).abs());
        let back = fourier_transform(&hat, Direction::Inverse, budget)?;
        let err = back.amps.iter().zip(&g.amps).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        worst = worst.max(err);
    }
    Ok((worst <= tol.parseval, format!("max deviation {worst:.3e}")))
}

fn codes_suite(_: &Tolerances, budget: &Budget, rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut ok = true;
    for q in [2u32, 3, 5, 7] {
        for k in 1..q as usize {
            let dual = rs_code(q, k)?.dual()?;
            let other = rs_code(q, q as usize - k)?;
            let mut a = dual.codewords(budget)?;
            let mut b = other.codewords(budget)?;
            a.sort();
            b.sort();
            ok &= a == b;
        }
    }
    for _ in 0..5 {
        let code = LinearCode::random(Fq::new(5)?, 6, 3, rng)?;
        ok &= code.generator().mul(&code.parity_check().transpose())?.is_zero();
    }
    Ok((ok, "RS duality for q <= 7, G H^T = 0 on random codes".into()))
}

fn character_sum_suite(tol: &Tolerances, budget: &Budget, rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let f = Fq::new(3)?;
    let code = LinearCode::random(f, 4, 2, rng)?;
    let dual = code.dual()?;
    let size = code.codewords(budget)?.len() as f64;
    let mut worst = 0.0f64;
    for y in 0..81 {
        let yv = FieldVector::from_index(f, 4, y);
        let s = code_character_sum(&code, &yv, budget)?;
        let expected = if dual.contains(&yv.coords) { size } else { 0.0 };
        worst = worst.max((s - expected).norm() / size);
    }
    Ok((worst <= tol.orthogonality, format!("max relative deviation {worst:.3e}")))
}

fn noise_suite(tol: &Tolerances, budget: &Budget, _: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let profile = ErrorProfile::interval(5, 4, 1, 0.8)?;
    let mut worst = 0.0f64;
    for i in 0..profile.n() {
        let hat: f64 = profile.u_hat(i).iter().map(|v| v * v).sum();
        let u: f64 = profile.u(i).iter().map(|a| a.norm_sqr()).sum();
        worst = worst.max((hat - 1.0).abs()).max((u - 1.0).abs());
        worst = worst.max((profile.center_probability() - profile.center_probability_numeric(i)).abs());
    }
    let hat = fourier_transform(&profile.materialize(budget)?, Direction::Forward, budget)?;
    for ttilde in [0.25, 0.5, 0.75] {
        let t = ConstraintSet::from_profile(&profile, ttilde)?;
        let outside: f64 = hat.points().filter(|(y, _)| !t.contains(y)).map(|(_, a)| a.norm_sqr()).sum();
        let tm = tail_mass(&profile, ttilde)?;
        worst = worst.max((outside - tm.exact).abs());
        if tm.exact > tm.hoeffding {
            return Ok((false, format!("exact tail {} above Hoeffding {}", tm.exact, tm.hoeffding)));
        }
    }
    Ok((worst <= tol.parseval, format!("max deviation {worst:.3e}")))
}

fn fourth_power_suite(tol: &Tolerances, _: &Budget, _: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut min_gap = f64::INFINITY;
    let mut worst_rel = 0.0f64;
    for q in [11u32, 13, 17] {
        for z in 0..(q - 1) / 2 {
            for tau in [0.6, 0.8, 1.0] {
                let fp = fourth_power_sum(q, z, tau)?;
                min_gap = min_gap.min(fp.gap());
                let p = ErrorProfile::interval(q, 1, z, tau)?;
                let lhs = convolution_square_sum(p.u_hat(0));
                worst_rel = worst_rel.max((lhs - q as f64 * fp.exact).abs() / (q as f64 * fp.exact));
            }
        }
    }
    let ok = min_gap >= -tol.fourth_power && worst_rel <= tol.orthogonality;
    Ok((ok, format!("min gap {min_gap:.3e}, convolution identity {worst_rel:.3e}")))
}

fn decode_suite(_: &Tolerances, budget: &Budget, _: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let code = rs_code(5, 2)?;
    let t0 = unique_radius(5, 2);
    let mut ok = true;
    for i in 0..3125 {
        let y = decode_index(i, 5, 5);
        let list = brute_force_list(&code, &y, t0, budget)?;
        ok &= berlekamp_welch(&code, &y)? == list.first().cloned();
    }
    Ok((ok, "Berlekamp-Welch equals nearest codeword within radius, q=5 d=2".into()))
}

fn random_state(q: u32, dims: &[usize], rng: &mut ChaCha8Rng, budget: &Budget) -> Result<QuantumState> {
    let mut s = QuantumState::zeros(q, dims, budget)?;
    for a in s.amps_mut() {
        *a = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
    }
    let n = s.norm();
    s.scale(1.0 / n);
    Ok(s)
}

fn unitarity_suite(tol: &Tolerances, budget: &Budget, rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let code = rs_code(3, 1)?;
    let table: Vec<usize> = (0..27).map(|_| rng.gen_range(0..3)).collect();
    let plain = DecoderUnitary::from_table(&code, table)?;
    let mut worst = 0.0f64;
    for u in [plain.clone(), plain.symmetrized()] {
        let s = random_state(3, &u.dims(), rng, budget)?;
        let mut t = s.clone();
        u.apply(&mut t, u.default_map());
        worst = worst.max((t.norm() - 1.0).abs());
        u.apply_adjoint(&mut t, u.default_map());
        let err = s.amps().iter().zip(t.amps()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        worst = worst.max(err);
    }
    Ok((worst <= tol.unitarity, format!("max deviation {worst:.3e}")))
}

fn symmetrization_suite(tol: &Tolerances, budget: &Budget, _: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let f = Fq::new(2)?;
    let code = LinearCode::from_generator(crate::codes::Matrix::from_rows(f, &[vec![1, 1, 1]])?)?;
    // Always answers the zero message: right for s = 0 only.
    let u = DecoderUnitary::from_table(&code, vec![0; 8])?;
    let profile = ErrorProfile::uniform(2, 3, &[0], 0.8)?;
    let amps = profile.materialize(budget)?;
    let plain: Vec<f64> = u.diagonal_gammas(&amps, budget)?.iter().map(|g| g.norm_sqr()).collect();
    let mean = plain.iter().sum::<f64>() / plain.len() as f64;
    let sym = u.symmetrized().diagonal_gammas(&amps, budget)?;
    let worst = sym.iter().map(|g| (g - Complex64::new(mean.sqrt(), 0.0)).norm()).fold(0.0, f64::max);
    Ok((worst <= tol.unitarity, format!("max deviation from sqrt(mean p_s) {worst:.3e}")))
}

fn reduction_suite(tol: &Tolerances, budget: &Budget, _: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let code = rs_code(3, 1)?;
    let profile = ErrorProfile::interval(3, 3, 0, 0.8)?;
    let t = ConstraintSet::from_profile(&profile, 0.6)?;
    let dec = crate::decode::Decoder::new(crate::decode::DecoderKind::BruteForceNearest, code.clone(), budget)?;
    let red = Reduction::new(&code, &profile, &dec, &t, budget)?;
    let outcomes = red.run_all()?;
    let accept = outcomes.iter().map(|o| (o.post_select_prob - red.p_dec()).abs()).fold(0.0, f64::max);
    let report = verify_bound(&outcomes, 3, 1, red.p_dec(), red.eta())?;
    let ok = report.slack >= -tol.bound && accept <= tol.bound;
    Ok((ok, format!("mean p_u {:.6}, bound {:.6}, acceptance error {accept:.3e}", report.mean_p, report.bound)))
}

fn thresholds_suite(_: &Tolerances, _: &Budget, _: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let dev = max_reference_deviation(&table1()?);
    Ok((dev <= 5e-4, format!("max deviation from the reference table {dev:.2e}")))
}

fn opi_suite(_: &Tolerances, budget: &Budget, rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut ok = true;
    for _ in 0..10 {
        let seed = rng.gen();
        let inst = OpiInstance::generate(5, 2, 2, 0.6, seed)?;
        let direct = brute_force_opi(&inst, budget)?;
        let (_, count) = brute_force_icc(&opi_to_icc(&inst)?, budget)?;
        ok &= direct.count == count;
    }
    Ok((ok, "optimal counts agree on 10 random q=5 k=2 instances".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass_and_are_deterministic() {
        let tol = Tolerances::default();
        let a = run_all(&tol, &Budget::default(), 5);
        for r in &a {
            assert!(r.passed, "{r:?}");
        }
        assert_eq!(a, run_all(&tol, &Budget::default(), 5));
    }

    #[test]
    fn tampered_parseval_tolerance_fails() {
        let mut tol = Tolerances::default();
        tol.set("parseval", 1e-20).unwrap();
        let r = run_all(&tol, &Budget::default(), 5);
        assert!(!r.iter().find(|s| s.name == "parseval").unwrap().passed);
    }
}
