//! Exact simulation of the reduction from decoding to finding constrained
//! words in a dual coset.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::state::QuantumState;
use super::unitary::{DecoderUnitary, RegisterMap};
use crate::codes::LinearCode;
use crate::config::Budget;
use crate::decode::Decoder;
use crate::error::{Error, Result};
use crate::galois::fourier::fourier_transform;
use crate::galois::vector::{decode_index, encode_index};
use crate::galois::{roots_of_unity, ComplexFunction, Direction};
use crate::noise::{ConstraintSet, ErrorProfile};

/// Per-message success probabilities closer than this count as uniform and
/// skip symmetrization.
pub const UNIFORMITY_TOL: f64 = 1e-10;

/// `P_Dec (1 - eta) - 2 sqrt(eta P_Dec (1 - P_Dec))`.
pub fn theorem_bound(p_dec: f64, eta: f64) -> f64 {
    p_dec * (1.0 - eta) - 2.0 * (eta * p_dec * (1.0 - p_dec)).max(0.0).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionOutcome {
    pub u: Vec<u32>,
    /// Probability that the measured word lies in the dual coset and in `T`.
    pub p_u: f64,
    /// Probability of reading zero in the comparison register.
    pub post_select_prob: f64,
    pub p_dec: f64,
    pub eta: f64,
    pub bound: f64,
    /// `p_u - bound`; the guarantee holds for the mean over `u`.
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub mean_p: f64,
    pub p_dec: f64,
    pub eta: f64,
    pub bound: f64,
    pub slack: f64,
    pub holds: bool,
}

/// Everything about a reduction instance that does not depend on `u`.
#[derive(Debug, Clone)]
pub struct Reduction {
    code: LinearCode,
    f: ComplexFunction,
    f_hat: ComplexFunction,
    constraint: ConstraintSet,
    unitary: DecoderUnitary,
    message_success: Vec<f64>,
    p_dec: f64,
    eta: f64,
    budget: Budget,
}

impl Reduction {
    /// Prepares the instance; symmetrizes the decoder when its per-message
    /// success probabilities differ.
    pub fn new(
        code: &LinearCode,
        profile: &ErrorProfile,
        decoder: &Decoder,
        constraint: &ConstraintSet,
        budget: &Budget,
    ) -> Result<Self> {
        let unitary = DecoderUnitary::from_decoder(decoder, budget)?;
        Self::from_unitary(code, profile, unitary, constraint, budget)
    }

    pub fn from_unitary(
        code: &LinearCode,
        profile: &ErrorProfile,
        unitary: DecoderUnitary,
        constraint: &ConstraintSet,
        budget: &Budget,
    ) -> Result<Self> {
        if profile.n() != code.n() {
            return Err(Error::LengthMismatch { expected: code.n(), got: profile.n() });
        }
        if constraint.n() != code.n() {
            return Err(Error::LengthMismatch { expected: code.n(), got: constraint.n() });
        }
        if profile.q() != code.q() {
            return Err(Error::MixedModuli(code.q(), profile.q()));
        }
        let (n, k, q) = (code.n(), code.k(), code.q());
        // Symmetrized runs need word, message, shift and comparison registers.
        budget.check(q, n + 2 * k)?;
        let f = profile.materialize(budget)?;
        let gammas = unitary.diagonal_gammas(&f, budget)?;
        let message_success: Vec<f64> = gammas.iter().map(|g| g.norm_sqr()).collect();
        let p_dec = message_success.iter().sum::<f64>() / message_success.len() as f64;
        let spread = message_success.iter().fold(0.0f64, |m, p| m.max((p - p_dec).abs()));
        let unitary = if spread > UNIFORMITY_TOL {
            budget.check(q, n + 3 * k)?;
            unitary.symmetrized()
        } else {
            unitary
        };
        let f_hat = fourier_transform(&f, Direction::Forward, budget)?;
        let eta = f_hat.points().filter(|(y, _)| !constraint.contains(y)).map(|(_, a)| a.norm_sqr()).sum();
        Ok(Self {
            code: code.clone(),
            f,
            f_hat,
            constraint: constraint.clone(),
            unitary,
            message_success,
            p_dec,
            eta,
            budget: *budget,
        })
    }

    pub fn p_dec(&self) -> f64 {
        self.p_dec
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// `p_s` of the unsymmetrized decoder.
    pub fn message_success(&self) -> &[f64] {
        &self.message_success
    }

    pub fn is_symmetrized(&self) -> bool {
        self.unitary.is_symmetrized()
    }

    pub fn unitary(&self) -> &DecoderUnitary {
        &self.unitary
    }

    pub fn f(&self) -> &ComplexFunction {
        &self.f
    }

    pub fn f_hat(&self) -> &ComplexFunction {
        &self.f_hat
    }

    pub fn bound(&self) -> f64 {
        theorem_bound(self.p_dec, self.eta)
    }

    fn messages(&self) -> usize {
        (self.code.q() as usize).pow(self.code.k() as u32)
    }

    fn check_u(&self, u: &[u32]) -> Result<()> {
        if u.len() != self.code.k() {
            return Err(Error::LengthMismatch { expected: self.code.k(), got: u.len() });
        }
        if let Some(&bad) = u.iter().find(|&&x| x >= self.code.q()) {
            return Err(Error::InvalidParameter(format!("syndrome entry {bad} is not a residue")));
        }
        Ok(())
    }

    /// Steps 1 to 4. Returns the state after the adjoint decoder (registers
    /// as in the unitary's layout) and the acceptance probability of step 3.
    pub fn step4_state(&self, u: &[u32]) -> Result<(QuantumState, f64)> {
        self.check_u(u)?;
        let (q, n, k) = (self.code.q(), self.code.n(), self.code.k());
        let mut dims = self.unitary.dims();
        dims.push(k);
        let comparison = dims.len() - 1;
        let mut state = QuantumState::zeros(q, &dims, &self.budget)?;
        let map = self.unitary.default_map();
        let l = state.layout();

        // Step 1: q^{-k/2} sum_s chi_{-u}(s) |psi_s>|0>|s>.
        let roots = roots_of_unity(q);
        let norm = 1.0 / ((self.messages()) as f64).sqrt();
        for s in 0..self.messages() {
            let sv = decode_index(s, k, q);
            let dot = crate::galois::vector::dot(self.code.field(), &sv, u);
            let phase = roots[((q - dot) % q) as usize] * norm;
            let c = encode_index(&self.code.encode_index(s), q);
            for (e, &amp) in self.f.amps.iter().enumerate() {
                let y = crate::galois::vector::add_indices(c, e, n, q);
                let idx = y * l.stride(map.word) + s * l.stride(comparison);
                state.amps_mut()[idx] = amp * phase;
            }
        }

        // Step 2: decoder on (word, message), then comparison -= message.
        self.unitary.apply(&mut state, map);
        let msg = map.message;
        state.permute(|i| {
            let b = l.value(i, msg);
            let c = l.value(i, comparison);
            l.with_value(i, comparison, crate::galois::vector::add_indices(c, b, k, q))
        });

        // Step 3: condition on reading zero, then drop the register.
        let accept = state.project(comparison, 0);
        let mut state = state.slice(comparison, 0);
        if accept > 0.0 {
            state.scale(1.0 / accept.sqrt());
        }

        // Step 4.
        self.unitary.apply_adjoint(&mut state, map);
        Ok((state, accept))
    }

    /// Steps 1 to 5 for one dual syndrome.
    pub fn run(&self, u: &[u32]) -> Result<ReductionOutcome> {
        let (mut state, accept) = self.step4_state(u)?;
        let map: RegisterMap = self.unitary.default_map();
        let p_u = if accept > 0.0 {
            state.fourier(map.word, Direction::Forward);
            self.success_mass(&state.marginal(map.word), u)
        } else {
            0.0
        };
        Ok(self.outcome(u, p_u, accept))
    }

    fn outcome(&self, u: &[u32], p_u: f64, accept: f64) -> ReductionOutcome {
        let bound = self.bound();
        ReductionOutcome {
            u: u.to_vec(),
            p_u,
            post_select_prob: accept,
            p_dec: self.p_dec,
            eta: self.eta,
            bound,
            slack: p_u - bound,
        }
    }

    /// Steps 1 to 4 for every dual syndrome at once, as a state whose leading
    /// register holds `u` (the remaining registers as in [`Self::step4_state`]).
    ///
    /// Reading zero in the comparison register leaves
    /// `q^{-k/2} sum_s chi_{-u}(s) Pi_{B=s} U |psi_s, 0>` with the comparison
    /// register dropped, so each `s` term goes through `U` and `U^dagger` once
    /// and the sum over `s` is an inverse transform on the leading register.
    pub fn batched_step4(&self) -> Result<(QuantumState, f64)> {
        let k = self.code.k();
        let mut dims = vec![k];
        dims.extend(self.unitary.dims());
        let mut all = QuantumState::zeros(self.code.q(), &dims, &self.budget)?;
        let block = all.stride(0);
        let map = self.unitary.default_map();
        let mut kept = 0.0;
        for s in 0..self.messages() {
            let mut state = self.unitary.code_state(&self.f, s, &self.budget)?;
            self.unitary.apply(&mut state, map);
            kept += state.project(map.message, s);
            self.unitary.apply_adjoint(&mut state, map);
            all.amps_mut()[s * block..(s + 1) * block].copy_from_slice(state.amps());
        }
        all.fourier(0, Direction::Inverse);
        let accept = kept / self.messages() as f64;
        if accept > 0.0 {
            all.scale(1.0 / accept.sqrt());
        }
        Ok((all, accept))
    }

    /// Mass of `probs` on the dual coset of `u` intersected with `T`.
    pub fn success_mass(&self, probs: &[f64], u: &[u32]) -> f64 {
        let (n, q) = (self.code.n(), self.code.q());
        probs
            .iter()
            .enumerate()
            .filter(|&(_, &p)| p > 0.0)
            .filter(|&(y, _)| {
                let yv = decode_index(y, n, q);
                self.code.generator().mul_vec(&yv) == u && self.constraint.contains(&yv)
            })
            .map(|(_, p)| p)
            .sum()
    }

    /// Runs every dual syndrome in index order. Equivalent to calling
    /// [`Self::run`] for each `u`, at the cost of a single pass per message.
    pub fn run_all(&self) -> Result<Vec<ReductionOutcome>> {
        let (k, q) = (self.code.k(), self.code.q());
        let (mut all, accept) = self.batched_step4()?;
        // Registers of `all` are shifted by one behind the leading `u`.
        let word = self.unitary.default_map().word + 1;
        if accept > 0.0 {
            all.fourier(word, Direction::Forward);
        }
        Ok((0..self.messages())
            .map(|m| {
                let u = decode_index(m, k, q);
                let p_u = if accept > 0.0 { self.success_mass(&all.slice(0, m).marginal(word - 1), &u) } else { 0.0 };
                self.outcome(&u, p_u, accept)
            })
            .collect())
    }

    /// `U^dagger (|psi~_{s,s}>|s>)` for message `s`, which splits as
    /// `sqrt(P) |psi_s, 0> + sqrt(1 - P) |Z_s>` once the decoder is uniform.
    pub fn decoded_component(&self, s: usize) -> Result<QuantumState> {
        let map = self.unitary.default_map();
        let mut state = self.unitary.code_state(&self.f, s, &self.budget)?;
        self.unitary.apply(&mut state, map);
        let kept = state.project(map.message, s);
        if kept > 0.0 {
            state.scale(1.0 / kept.sqrt());
        }
        self.unitary.apply_adjoint(&mut state, map);
        Ok(state)
    }

    /// `|psi_s>|0...>` in the unitary's layout.
    pub fn code_state(&self, s: usize) -> Result<QuantumState> {
        self.unitary.code_state(&self.f, s, &self.budget)
    }
}

/// One-shot convenience around [`Reduction`].
pub fn run_reduction(
    code: &LinearCode,
    profile: &ErrorProfile,
    decoder: &Decoder,
    u: &[u32],
    constraint: &ConstraintSet,
    budget: &Budget,
) -> Result<ReductionOutcome> {
    Reduction::new(code, profile, decoder, constraint, budget)?.run(u)
}

/// Averages `p_u` over all dual syndromes and compares with the bound.
pub fn verify_bound(outcomes: &[ReductionOutcome], q: u32, k: usize, p_dec: f64, eta: f64) -> Result<BoundReport> {
    let expected = (q as usize).pow(k as u32);
    let mut seen = vec![false; expected];
    for o in outcomes {
        if o.u.len() != k || o.u.iter().any(|&x| x >= q) {
            return Err(Error::InvalidParameter("outcome syndrome has the wrong shape".into()));
        }
        seen[encode_index(&o.u, q)] = true;
    }
    let covered = seen.iter().filter(|&&b| b).count();
    if covered != expected || outcomes.len() != expected {
        return Err(Error::IncompleteCoverage { covered, expected });
    }
    let mean_p = outcomes.iter().map(|o| o.p_u).sum::<f64>() / expected as f64;
    let bound = theorem_bound(p_dec, eta);
    let slack = mean_p - bound;
    Ok(BoundReport { mean_p, p_dec, eta, bound, slack, holds: slack >= -1e-9 })
}

/// Amplitude of the Fourier-side closed form for `p_u`, used to cross-check
/// a full simulation: `sqrt(q^k P) f_hat(y) [r = 0] + sqrt((1 - P) / q^k)
/// sum_s chi_{-u}(s) z_s(y, r)`.
pub fn closed_form_p_u(red: &Reduction, u: &[u32]) -> Result<f64> {
    let code = &red.code;
    let (q, k) = (code.q(), code.k());
    let messages = red.messages();
    let p = red.p_dec;
    let roots = roots_of_unity(q);
    let map = red.unitary.default_map();
    let mut total: Option<QuantumState> = None;
    for s in 0..messages {
        let mut z = red.decoded_component(s)?;
        let psi = red.code_state(s)?;
        // z = (r_s - sqrt(P) psi_s) / sqrt(1 - P)
        for (a, b) in z.amps_mut().iter_mut().zip(psi.amps()) {
            *a = (*a - b * p.sqrt()) / (1.0 - p).max(f64::MIN_POSITIVE).sqrt();
        }
        z.fourier(map.word, Direction::Forward);
        let sv = decode_index(s, k, q);
        let dot = crate::galois::vector::dot(code.field(), &sv, u);
        let phase = roots[((q - dot) % q) as usize];
        match total.as_mut() {
            None => {
                z.amps_mut().iter_mut().for_each(|a| *a *= phase);
                total = Some(z);
            }
            Some(t) => {
                for (a, b) in t.amps_mut().iter_mut().zip(z.amps()) {
                    *a += b * phase;
                }
            }
        }
    }
    let mut total = total.expect("at least one message");
    let residual_scale = ((1.0 - p) / messages as f64).sqrt();
    let ideal_scale = (messages as f64 * p).sqrt();
    let l = total.layout();
    let stride = l.stride(map.word);
    for (i, a) in total.amps_mut().iter_mut().enumerate() {
        *a *= residual_scale;
        if i % stride == 0 {
            let y = i / stride;
            let in_coset = code.generator().mul_vec(&decode_index(y, code.n(), q)) == u;
            if in_coset {
                *a += red.f_hat.amps[y] * ideal_scale;
            }
        }
    }
    Ok(red.success_mass(&total.marginal(map.word), u))
}

/// `sum_s chi_{-u}(s) |psi_hat_s>` over the word register.
pub fn fourier_code_sum(red: &Reduction, u: &[u32]) -> Result<Vec<Complex64>> {
    let code = &red.code;
    let (q, k, n) = (code.q(), code.k(), code.n());
    let roots = roots_of_unity(q);
    let mut acc = vec![Complex64::new(0.0, 0.0); red.f.amps.len()];
    for s in 0..red.messages() {
        let c = encode_index(&code.encode_index(s), q);
        let mut shifted = vec![Complex64::new(0.0, 0.0); acc.len()];
        for (e, &amp) in red.f.amps.iter().enumerate() {
            shifted[crate::galois::vector::add_indices(c, e, n, q)] = amp;
        }
        let psi = ComplexFunction::from_amplitudes(code.field(), n, shifted)?;
        let hat = fourier_transform(&psi, Direction::Forward, &red.budget)?;
        let dot = crate::galois::vector::dot(code.field(), &decode_index(s, k, q), u);
        let phase = roots[((q - dot) % q) as usize];
        for (a, b) in acc.iter_mut().zip(&hat.amps) {
            *a += b * phase;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::rs_code;
    use crate::decode::DecoderKind;

    fn b() -> Budget {
        Budget::default()
    }

    fn instance(kind: DecoderKind, tau: f64, ttilde: f64) -> Reduction {
        let code = rs_code(3, 1).unwrap();
        let profile = ErrorProfile::interval(3, 3, 0, tau).unwrap();
        let t = ConstraintSet::from_profile(&profile, ttilde).unwrap();
        let dec = Decoder::new(kind, code.clone(), &b()).unwrap();
        Reduction::new(&code, &profile, &dec, &t, &b()).unwrap()
    }

    #[test]
    fn perfect_decoder_and_full_constraint() {
        // tau = rho makes f a point mass, so every decoder is perfect.
        let red = instance(DecoderKind::BruteForceNearest, 1.0 / 3.0, 0.0);
        assert!((red.p_dec() - 1.0).abs() < 1e-12);
        assert!(red.eta().abs() < 1e-12);
        for o in red.run_all().unwrap() {
            assert!((o.p_u - 1.0).abs() < 1e-9, "{o:?}");
        }
    }

    #[test]
    fn bound_holds_and_acceptance_is_p_dec() {
        for kind in [DecoderKind::BruteForceNearest, DecoderKind::BerlekampWelch] {
            let red = instance(kind, 0.8, 0.6);
            let outcomes = red.run_all().unwrap();
            for o in &outcomes {
                assert!((o.post_select_prob - red.p_dec()).abs() < 1e-9);
                assert!(o.p_u >= -1e-12 && o.p_u <= 1.0 + 1e-12);
            }
            let report = verify_bound(&outcomes, 3, 1, red.p_dec(), red.eta()).unwrap();
            assert!(report.holds, "{report:?}");
        }
    }

    #[test]
    fn fourier_image_of_code_states() {
        let red = instance(DecoderKind::BruteForceNearest, 0.8, 0.6);
        let code = rs_code(3, 1).unwrap();
        for u in 0..3u32 {
            let acc = fourier_code_sum(&red, &[u]).unwrap();
            for (y, a) in acc.iter().enumerate() {
                let yv = decode_index(y, 3, 3);
                let expected = if code.generator().mul_vec(&yv) == [u] { red.f_hat().amps[y] * 3.0 } else { Complex64::new(0.0, 0.0) };
                assert!((a - expected).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn residual_is_orthogonal_and_closed_form_matches() {
        let red = instance(DecoderKind::BruteForceNearest, 0.8, 0.6);
        assert!(red.is_symmetrized());
        let p = red.p_dec();
        for s in 0..3 {
            let r = red.decoded_component(s).unwrap();
            let psi = red.code_state(s).unwrap();
            let overlap = psi.inner(&r);
            assert!((overlap - Complex64::new(p.sqrt(), 0.0)).norm() < 1e-9);
            assert!((r.norm() - 1.0).abs() < 1e-9);
        }
        for u in 0..3u32 {
            let sim = red.run(&[u]).unwrap().p_u;
            let closed = closed_form_p_u(&red, &[u]).unwrap();
            assert!((sim - closed).abs() < 1e-9, "{sim} vs {closed}");
        }
    }

    #[test]
    fn batched_run_matches_literal_steps() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let code = LinearCode::random(crate::galois::Fq::new(3).unwrap(), 4, 2, &mut rng).unwrap();
        let profile = ErrorProfile::random(3, 4, 2, 0.9, &mut rng).unwrap();
        let t = ConstraintSet::from_profile(&profile, 0.6).unwrap();
        let dec = Decoder::new(DecoderKind::BruteForceNearest, code.clone(), &b()).unwrap();
        let red = Reduction::new(&code, &profile, &dec, &t, &b()).unwrap();
        let batched = red.run_all().unwrap();
        for o in &batched {
            let literal = red.run(&o.u).unwrap();
            assert!((literal.p_u - o.p_u).abs() < 1e-10, "{literal:?} vs {o:?}");
            assert!((literal.post_select_prob - o.post_select_prob).abs() < 1e-10);
        }
        for kind in [DecoderKind::BruteForceNearest, DecoderKind::BerlekampWelch] {
            let red = instance(kind, 0.8, 0.4);
            for o in red.run_all().unwrap() {
                assert!((red.run(&o.u).unwrap().p_u - o.p_u).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn coverage_is_checked() {
        let red = instance(DecoderKind::BruteForceNearest, 0.8, 0.6);
        let outcomes = red.run_all().unwrap();
        assert!(matches!(
            verify_bound(&outcomes[..2], 3, 1, red.p_dec(), red.eta()),
            Err(Error::IncompleteCoverage { covered: 2, expected: 3 })
        ));
    }

    #[test]
    fn bound_specializations() {
        assert_eq!(theorem_bound(0.7, 0.0), 0.7);
        assert!((theorem_bound(1.0, 0.2) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn syndrome_shape_is_validated() {
        let red = instance(DecoderKind::BruteForceNearest, 0.8, 0.6);
        assert!(red.run(&[0, 0]).is_err());
        assert!(red.run(&[3]).is_err());
    }
}
