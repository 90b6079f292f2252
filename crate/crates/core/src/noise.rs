//! Product error functions built on the Fourier side, their tail masses,
//! and the fourth-power sums that gate soft-decision decoding.
//!
//! Each coordinate carries a set `S_i` and a mass `tau`: the Fourier-side
//! amplitude `u_hat_i` is flat on `S_i` with total mass `tau` and flat off it
//! with mass `1 - tau`. The error function is `f = u_1 (x) ... (x) u_n`.

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::Budget;
use crate::error::{Error, Result};
use crate::galois::fourier::transform_coordinates;
use crate::galois::{ComplexFunction, Direction, Fq};

/// Slack used when turning a fraction into a minimum integer count.
const COUNT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorProfile {
    field: Fq,
    tau: f64,
    sets: Vec<Vec<u32>>,
    u_hat: Vec<Vec<f64>>,
    u: Vec<Vec<Complex64>>,
}

/// JSON form `{q, n, tau, sets}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSpec {
    pub q: u32,
    pub n: usize,
    pub tau: f64,
    pub sets: Vec<Vec<u32>>,
}

/// Validates and normalizes per-coordinate sets: sorted, deduplicated,
/// all of one nonzero size, below q unless `allow_full`.
pub(crate) fn normalize_sets(field: Fq, sets: &[Vec<u32>], allow_full: bool) -> Result<Vec<Vec<u32>>> {
    let mut out = Vec::with_capacity(sets.len());
    for s in sets {
        let mut s = s.clone();
        if let Some(&bad) = s.iter().find(|&&a| a >= field.q()) {
            return Err(Error::InvalidParameter(format!("set element {bad} is not a residue mod {}", field.q())));
        }
        s.sort_unstable();
        s.dedup();
        out.push(s);
    }
    let Some(first) = out.first() else {
        return Err(Error::InvalidParameter("at least one coordinate set is required".into()));
    };
    let size = first.len();
    if out.iter().any(|s| s.len() != size) {
        return Err(Error::RaggedSets);
    }
    let q = field.q() as usize;
    if size == 0 || size > q || (size == q && !allow_full) {
        let rel = if allow_full { "<=" } else { "<" };
        return Err(Error::InvalidParameter(format!("set size {size} must satisfy 1 <= |S| {rel} q = {q}")));
    }
    Ok(out)
}

impl ErrorProfile {
    /// Builds the profile for sets `sets[i]` (one per coordinate) and mass `tau`.
    pub fn new(q: u32, n: usize, sets: &[Vec<u32>], tau: f64) -> Result<Self> {
        let field = Fq::new(q)?;
        if sets.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: sets.len() });
        }
        if !(tau > 0.0 && tau <= 1.0) {
            return Err(Error::InvalidParameter(format!("tau = {tau} must lie in (0, 1]")));
        }
        let sets = normalize_sets(field, sets, false)?;
        let qq = q as usize;
        let size = sets[0].len();
        let on = (tau / size as f64).sqrt();
        let off = ((1.0 - tau) / (qq - size) as f64).sqrt();
        let mut u_hat = Vec::with_capacity(n);
        let mut u = Vec::with_capacity(n);
        for s in &sets {
            let mut row = vec![off; qq];
            for &a in s {
                row[a as usize] = on;
            }
            let mut amps: Vec<Complex64> = row.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            transform_coordinates(&mut amps, q, 1, 0..1, Direction::Inverse);
            u_hat.push(row);
            u.push(amps);
        }
        Ok(Self { field, tau, sets, u_hat, u })
    }

    /// Same set on every coordinate.
    pub fn uniform(q: u32, n: usize, set: &[u32], tau: f64) -> Result<Self> {
        Self::new(q, n, &vec![set.to_vec(); n], tau)
    }

    /// Centered interval `[-z, z]` on every coordinate.
    pub fn interval(q: u32, n: usize, z: u32, tau: f64) -> Result<Self> {
        let set = Fq::new(q)?.centered_interval(z)?;
        Self::uniform(q, n, &set, tau)
    }

    /// Independent uniformly random sets of size `size` per coordinate.
    pub fn random<R: Rng + ?Sized>(q: u32, n: usize, size: usize, tau: f64, rng: &mut R) -> Result<Self> {
        if size == 0 || size >= q as usize {
            return Err(Error::InvalidParameter(format!("set size {size} must lie in [1, {q})")));
        }
        let sets: Vec<Vec<u32>> =
            (0..n).map(|_| sample(rng, q as usize, size).into_iter().map(|v| v as u32).collect()).collect();
        Self::new(q, n, &sets, tau)
    }

    pub fn from_spec(spec: &ProfileSpec) -> Result<Self> {
        Self::new(spec.q, spec.n, &spec.sets, spec.tau)
    }

    pub fn to_spec(&self) -> ProfileSpec {
        ProfileSpec { q: self.q(), n: self.n(), tau: self.tau, sets: self.sets.clone() }
    }

    pub fn field(&self) -> Fq {
        self.field
    }

    pub fn q(&self) -> u32 {
        self.field.q()
    }

    pub fn n(&self) -> usize {
        self.sets.len()
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn sets(&self) -> &[Vec<u32>] {
        &self.sets
    }

    pub fn set_size(&self) -> usize {
        self.sets[0].len()
    }

    pub fn rho(&self) -> f64 {
        self.set_size() as f64 / self.q() as f64
    }

    /// Fourier-side amplitudes of coordinate `i`.
    pub fn u_hat(&self, i: usize) -> &[f64] {
        &self.u_hat[i]
    }

    /// Amplitudes of coordinate `i` (inverse transform of `u_hat`).
    pub fn u(&self, i: usize) -> &[Complex64] {
        &self.u[i]
    }

    /// `|u_i|^2`, the per-coordinate error distribution.
    pub fn error_distribution(&self, i: usize) -> Vec<f64> {
        self.u[i].iter().map(|a| a.norm_sqr()).collect()
    }

    /// `|u_i(0)|^2` read off the numeric amplitudes.
    pub fn center_probability_numeric(&self, i: usize) -> f64 {
        self.u[i][0].norm_sqr()
    }

    /// Closed form `(sqrt(tau rho) + sqrt((1 - tau)(1 - rho)))^2`.
    pub fn center_probability(&self) -> f64 {
        center_probability(self.tau, self.rho())
    }

    /// Mass of `|u_hat_i|^2` on `S_i`; equals `tau`.
    pub fn in_set_probability(&self, i: usize) -> f64 {
        self.sets[i].iter().map(|&a| self.u_hat[i][a as usize].powi(2)).sum()
    }

    /// Dense `f = (x)_i u_i`.
    pub fn materialize(&self, budget: &Budget) -> Result<ComplexFunction> {
        ComplexFunction::tensor_product(self.field, &self.u, budget)
    }

    /// Dense `f_hat = (x)_i u_hat_i`.
    pub fn materialize_hat(&self, budget: &Budget) -> Result<ComplexFunction> {
        let factors: Vec<Vec<Complex64>> =
            self.u_hat.iter().map(|r| r.iter().map(|&v| Complex64::new(v, 0.0)).collect()).collect();
        ComplexFunction::tensor_product(self.field, &factors, budget)
    }
}

/// `(sqrt(tau rho) + sqrt((1 - tau)(1 - rho)))^2`.
pub fn center_probability(tau: f64, rho: f64) -> f64 {
    let s = (tau * rho).sqrt() + ((1.0 - tau).max(0.0) * (1.0 - rho).max(0.0)).sqrt();
    s * s
}

/// `tau = ttilde + n^{-1/3}`.
pub fn tau_from_threshold(ttilde: f64, n: usize) -> Result<f64> {
    let tau = ttilde + (n as f64).powf(-1.0 / 3.0);
    if tau > 1.0 {
        return Err(Error::InvalidParameter(format!("tau = {tau} exceeds 1 for n = {n}")));
    }
    Ok(tau)
}

/// Binary-code threshold for a decoder correcting a `t` fraction of errors:
/// `1/2 + sqrt(t (1 - t))`.
pub fn binary_threshold(t: f64) -> f64 {
    0.5 + (t * (1.0 - t)).sqrt()
}

/// `T = {y : #{i : y_i in S_i} >= threshold * n}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintSet {
    pub sets: Vec<Vec<u32>>,
    pub threshold: f64,
}

impl ConstraintSet {
    pub fn new(field: Fq, sets: &[Vec<u32>], threshold: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&threshold) {
            return Err(Error::InvalidParameter(format!("threshold {threshold} outside [0, 1]")));
        }
        Ok(Self { sets: normalize_sets(field, sets, true)?, threshold })
    }

    /// `T_ttilde` for the sets of `profile`; requires `ttilde <= tau`.
    pub fn from_profile(profile: &ErrorProfile, ttilde: f64) -> Result<Self> {
        if ttilde > profile.tau() {
            return Err(Error::ThresholdAboveTau { ttilde, tau: profile.tau() });
        }
        Self::new(profile.field(), profile.sets(), ttilde)
    }

    pub fn n(&self) -> usize {
        self.sets.len()
    }

    /// Smallest satisfied count that puts a word in `T`.
    pub fn min_count(&self) -> usize {
        (self.threshold * self.n() as f64 - COUNT_EPS).ceil().max(0.0) as usize
    }

    pub fn count(&self, y: &[u32]) -> usize {
        y.iter().zip(&self.sets).filter(|(a, s)| s.binary_search(a).is_ok()).count()
    }

    pub fn contains(&self, y: &[u32]) -> bool {
        self.count(y) >= self.min_count()
    }
}

/// Fourier-side mass outside `T`: exact and Hoeffding bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailMass {
    pub exact: f64,
    pub hoeffding: f64,
}

/// `eta` for `T_ttilde`: the probability that fewer than `min_count`
/// coordinates of `y ~ |f_hat|^2` land in their sets. Computed by a
/// dynamic program over the per-coordinate Bernoulli events.
pub fn tail_mass(profile: &ErrorProfile, ttilde: f64) -> Result<TailMass> {
    let constraint = ConstraintSet::from_profile(profile, ttilde)?;
    let n = profile.n();
    let probs: Vec<f64> = (0..n).map(|i| profile.in_set_probability(i)).collect();
    let dist = success_count_distribution(&probs);
    let exact: f64 = dist[..constraint.min_count().min(n + 1)].iter().sum();
    let gap = profile.tau() - ttilde;
    let hoeffding = 2.0 * (-2.0 * n as f64 * gap * gap).exp();
    Ok(TailMass { exact, hoeffding })
}

/// Distribution of the number of successes among independent Bernoulli trials.
pub fn success_count_distribution(probs: &[f64]) -> Vec<f64> {
    let mut dist = vec![0.0; probs.len() + 1];
    dist[0] = 1.0;
    for (i, &p) in probs.iter().enumerate() {
        for j in (0..=i + 1).rev() {
            let stay = dist[j] * (1.0 - p);
            let step = if j > 0 { dist[j - 1] * p } else { 0.0 };
            dist[j] = stay + step;
        }
    }
    dist
}

/// `sum_a (u_hat * u_hat)(a)^2` with `*` the additive convolution on F_q.
pub fn convolution_square_sum(u_hat: &[f64]) -> f64 {
    let q = u_hat.len();
    (0..q)
        .map(|a| {
            let c: f64 = (0..q).map(|b| u_hat[b] * u_hat[(a + q - b) % q]).sum();
            c * c
        })
        .sum()
}

/// Sum of `|u|^4` for an interval profile, and its closed-form lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourthPower {
    pub exact: f64,
    pub bound: f64,
}

impl FourthPower {
    pub fn gap(&self) -> f64 {
        self.exact - self.bound
    }
}

fn check_interval(q: u32, z: u32) -> Result<()> {
    if 2 * z as u64 + 1 >= q as u64 {
        return Err(Error::InvalidParameter(format!("interval [-{z}, {z}] must be a proper subset of F_{q}")));
    }
    Ok(())
}

/// Closed-form lower bound on `sum |u|^4` for `S = [-z, z]`, written in
/// terms of `q` and `z`. The `rho >= 1/2` branch uses `l = q - (2z + 1)`.
pub fn fourth_power_bound(q: u32, z: u32, tau: f64) -> Result<f64> {
    check_interval(q, z)?;
    let qf = q as f64;
    let s = 2.0 * z as f64 + 1.0;
    let rho = s / qf;
    let b = ((1.0 - tau) / (qf - s)).sqrt();
    let a = (tau / s).sqrt() - b;
    let gamma = 2.0 * a * b * s + qf * b * b;
    let a2 = a * a;
    let a4 = a2 * a2;
    let value = if rho <= 0.5 {
        a4 * 2.0 * rho.powi(3) * qf * qf / 3.0 + 2.0 * a2 * gamma * rho * rho * qf + gamma * gamma
    } else {
        let l = qf - s;
        let zf = z as f64;
        let conv_sum = s + l * (4.0 * zf + 1.0 - l) + (s - l) * (qf - 2.0 * l - 1.0);
        a4 * (qf * qf * rho * rho * (10.0 * rho / 3.0 - 4.0 + 2.0 / rho - 1.0 / (3.0 * rho * rho)))
            + 2.0 * a2 * gamma / qf * conv_sum
            + gamma * gamma
    };
    Ok(value)
}

/// Lower bound on `sum_a (1_S * 1_S)(a)^2 / q^3` for an interval of density `rho`.
fn interval_self_convolution_density(rho: f64) -> f64 {
    if rho <= 0.5 {
        2.0 * rho.powi(3) / 3.0
    } else {
        rho * rho * (10.0 * rho / 3.0 - 4.0 + 2.0 / rho - 1.0 / (3.0 * rho * rho))
    }
}

/// The same bound as a function of a real density `rho`. When
/// `rho = (2z + 1) / q` it coincides with [`fourth_power_bound`]: every
/// power of `q` cancels.
pub fn kv_bound(tau: f64, rho: f64) -> f64 {
    let b = ((1.0 - tau) / (1.0 - rho)).sqrt();
    let a = (tau / rho).sqrt() - b;
    let gamma = 2.0 * a * b * rho + b * b;
    let a2 = a * a;
    a2 * a2 * interval_self_convolution_density(rho) + 2.0 * a2 * gamma * rho * rho + gamma * gamma
}

/// Numeric `sum |u|^4` for `S = [-z, z]` alongside its closed-form bound.
pub fn fourth_power_sum(q: u32, z: u32, tau: f64) -> Result<FourthPower> {
    check_interval(q, z)?;
    let profile = ErrorProfile::interval(q, 1, z, tau)?;
    let exact = profile.u(0).iter().map(|a| a.norm_sqr().powi(2)).sum();
    Ok(FourthPower { exact, bound: fourth_power_bound(q, z, tau)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galois::fourier::fourier_transform;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn binary_profile_amplitudes() {
        let tau = 0.83;
        let p = ErrorProfile::uniform(2, 3, &[0], tau).unwrap();
        assert!(close(p.u_hat(0)[0], tau.sqrt(), 1e-15));
        assert!(close(p.u_hat(0)[1], (1.0 - tau).sqrt(), 1e-15));
        let expected = ((tau / 2.0).sqrt() + ((1.0 - tau) / 2.0).sqrt()).powi(2);
        assert!(close(p.center_probability_numeric(0), expected, 1e-12));
        assert!(close(p.center_probability(), expected, 1e-12));
    }

    #[test]
    fn normalization_and_closed_form() {
        let p = ErrorProfile::uniform(5, 4, &[1, 2, 3, 4], 1.0).unwrap();
        for i in 0..4 {
            let hat: f64 = p.u_hat(i).iter().map(|v| v * v).sum();
            assert!(close(hat, 1.0, 1e-12));
            let u: f64 = p.u(i).iter().map(|a| a.norm_sqr()).sum();
            assert!(close(u, 1.0, 1e-12));
        }
        let p = ErrorProfile::uniform(5, 2, &[0, 3], 0.8).unwrap();
        let closed = ((0.8f64 * 0.4).sqrt() + (0.2f64 * 0.6).sqrt()).powi(2);
        assert!(close(p.center_probability(), closed, 1e-12));
        assert!(close(p.center_probability_numeric(1), closed, 1e-10));
    }

    #[test]
    fn center_probability_examples() {
        assert!(close(center_probability(1.0, 1.0), 1.0, 1e-15));
        // tau = rho makes u_hat flat, so u is a point mass at 0.
        assert!(close(center_probability(0.5, 0.5), 1.0, 1e-15));
        let p = ErrorProfile::uniform(7, 1, &[0, 1, 2], 3.0 / 7.0).unwrap();
        assert!(close(p.center_probability_numeric(0), 1.0, 1e-12));
        assert!(close(center_probability(0.7179, 0.5), 0.95, 1e-3));
    }

    #[test]
    fn ragged_and_degenerate_sets_are_rejected() {
        let err = ErrorProfile::new(5, 2, &[vec![0], vec![0, 1]], 0.5).unwrap_err();
        assert_eq!(err.to_string(), "sets must have equal size");
        assert!(ErrorProfile::new(5, 1, &[vec![]], 0.5).is_err());
        assert!(ErrorProfile::new(3, 1, &[vec![0, 1, 2]], 0.5).is_err());
        assert!(ErrorProfile::new(5, 1, &[vec![0]], 0.0).is_err());
        assert!(ErrorProfile::new(5, 1, &[vec![0]], 1.1).is_err());
        assert!(ErrorProfile::new(4, 1, &[vec![0]], 0.5).is_err());
    }

    #[test]
    fn product_structure() {
        let b = Budget::default();
        let p = ErrorProfile::new(3, 4, &[vec![0], vec![1], vec![2], vec![0]], 0.7).unwrap();
        let f = p.materialize(&b).unwrap();
        let hat = fourier_transform(&f, Direction::Forward, &b).unwrap();
        let direct = p.materialize_hat(&b).unwrap();
        for (x, y) in hat.amps.iter().zip(&direct.amps) {
            assert!((x - y).norm() < 1e-10);
        }
    }

    #[test]
    fn tail_mass_edge_cases() {
        let p = ErrorProfile::uniform(5, 6, &[0, 1], 0.7).unwrap();
        assert_eq!(tail_mass(&p, 0.0).unwrap().exact, 0.0);
        let p1 = ErrorProfile::uniform(5, 1, &[0, 1], 0.7).unwrap();
        assert!(close(tail_mass(&p1, 0.5).unwrap().exact, 0.3, 1e-12));
        assert_eq!(
            tail_mass(&p1, 0.8).unwrap_err(),
            Error::ThresholdAboveTau { ttilde: 0.8, tau: 0.7 }
        );
    }

    #[test]
    fn tail_mass_matches_outcome_enumeration() {
        // n = 20, q = 5, |S| = 2: enumerate all 2^20 in/out patterns.
        let sets: Vec<Vec<u32>> = (0..20).map(|i| vec![i % 5, (i + 2) % 5]).collect();
        let p = ErrorProfile::new(5, 20, &sets, 0.8).unwrap();
        let tm = tail_mass(&p, 0.6).unwrap();
        let mut oracle = 0.0;
        for pattern in 0u32..(1 << 20) {
            let hits = pattern.count_ones() as i32;
            if hits < 12 {
                oracle += 0.8f64.powi(hits) * 0.2f64.powi(20 - hits);
            }
        }
        assert!(close(tm.exact, oracle, 1e-12));
        assert!(tm.exact <= tm.hoeffding);
    }

    #[test]
    fn tail_mass_matches_fourier_mass() {
        let b = Budget::default();
        let p = ErrorProfile::interval(5, 5, 1, 0.75).unwrap();
        for ttilde in [0.4, 0.6, 0.75] {
            let t = ConstraintSet::from_profile(&p, ttilde).unwrap();
            let hat = fourier_transform(&p.materialize(&b).unwrap(), Direction::Forward, &b).unwrap();
            let outside: f64 = hat.points().filter(|(y, _)| !t.contains(y)).map(|(_, a)| a.norm_sqr()).sum();
            let tm = tail_mass(&p, ttilde).unwrap();
            assert!(close(outside, tm.exact, 1e-10), "{outside} vs {}", tm.exact);
            assert!(tm.exact <= tm.hoeffding);
        }
    }

    #[test]
    fn constraint_set_monotone() {
        let f = Fq::new(3).unwrap();
        let lo = ConstraintSet::new(f, &vec![vec![0]; 4], 0.25).unwrap();
        let hi = ConstraintSet::new(f, &vec![vec![0]; 4], 0.75).unwrap();
        for i in 0..81 {
            let y = crate::galois::decode_index(i, 4, 3);
            if hi.contains(&y) {
                assert!(lo.contains(&y));
            }
        }
        assert_eq!(ConstraintSet::new(f, &vec![vec![0]; 5], 0.6).unwrap().min_count(), 3);
    }

    #[test]
    fn threshold_offset_helper() {
        assert!(close(tau_from_threshold(0.5, 1000).unwrap(), 0.6, 1e-12));
        assert!(tau_from_threshold(0.9, 8).is_err());
    }

    #[test]
    fn binary_corollary_value() {
        let tau = binary_threshold(6350.0 / 50000.0);
        assert!(close(tau, 0.833, 5e-4));
    }

    #[test]
    fn fourth_power_closed_form_at_full_mass() {
        // tau = 1, rho <= 1/2 collapses to 2 rho / 3.
        for (q, z) in [(11u32, 2u32), (13, 2), (17, 1), (2, 0)] {
            let rho = (2 * z + 1) as f64 / q as f64;
            assert!(close(fourth_power_bound(q, z, 1.0).unwrap(), 2.0 * rho / 3.0, 1e-12));
        }
        assert!(close(fourth_power_bound(2, 0, 1.0).unwrap(), 1.0 / 3.0, 1e-15));
        assert!(close(kv_bound(1.0, 0.5), 1.0 / 3.0, 1e-15));
    }

    #[test]
    fn fourth_power_exact_dominates_bound() {
        let fp = fourth_power_sum(11, 2, 0.9).unwrap();
        assert!(fp.exact >= fp.bound - 1e-10);
        assert!(fourth_power_sum(7, 3, 0.9).is_err());
    }

    #[test]
    fn q_free_bound_agrees_with_explicit_form() {
        for (q, z) in [(11u32, 1u32), (11, 3), (13, 4), (17, 6), (17, 7)] {
            let rho = (2 * z + 1) as f64 / q as f64;
            for tau in [0.6, 0.8, 1.0] {
                let a = fourth_power_bound(q, z, tau).unwrap();
                assert!(close(a, kv_bound(tau, rho), 1e-12), "q={q} z={z} tau={tau}");
            }
        }
    }

    #[test]
    fn convolution_identity() {
        for (q, z) in [(11u32, 2u32), (13, 5)] {
            let p = ErrorProfile::interval(q, 1, z, 0.8).unwrap();
            let lhs = convolution_square_sum(p.u_hat(0));
            let rhs: f64 = p.u(0).iter().map(|a| a.norm_sqr().powi(2)).sum::<f64>() * q as f64;
            assert!(((lhs - rhs) / rhs).abs() < 1e-9);
        }
    }

    #[test]
    fn profile_spec_round_trip() {
        let p = ErrorProfile::interval(7, 3, 1, 0.6).unwrap();
        let json = serde_json::to_string(&p.to_spec()).unwrap();
        let back: ProfileSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(ErrorProfile::from_spec(&back).unwrap(), p);
    }
}
