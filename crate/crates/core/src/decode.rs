//! Classical decoders and their success probability against a product channel.
//!
//! Every decoder is a total function of the received word: failure maps to
//! the all-zero message.

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codes::LinearCode;
use crate::config::Budget;
use crate::error::{Error, Result};
use crate::galois::poly;
use crate::galois::vector::{add_indices, decode_index, encode_index, hamming_distance};
use crate::noise::{success_count_distribution, ErrorProfile};
use crate::rng::{stream, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DecoderKind {
    BerlekampWelch,
    BruteForceNearest,
    /// Nearest codeword within `radius`, else failure.
    BruteForceList { radius: usize },
}

/// Unique-decoding radius `floor((n - d) / 2)`.
pub fn unique_radius(n: usize, d: usize) -> usize {
    n.saturating_sub(d) / 2
}

/// Johnson radius `ceil(n - sqrt(n (n - d))) - 1`.
pub fn johnson_radius(n: usize, d: usize) -> usize {
    let r = (n as f64 - (n as f64 * (n - d) as f64).sqrt()).ceil() as usize;
    r.saturating_sub(1)
}

/// Berlekamp-Welch on a full-support RS code: returns the message of the
/// codeword within `floor((n - d) / 2)` of `y`, or `None`.
pub fn berlekamp_welch(code: &LinearCode, y: &[u32]) -> Result<Option<Vec<u32>>> {
    let d = code
        .rs_dimension()
        .ok_or_else(|| Error::InvalidCode("Berlekamp-Welch needs a full-support Reed-Solomon code".into()))?;
    let n = code.n();
    if y.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: y.len() });
    }
    let f = code.field();
    let t0 = unique_radius(n, d);
    // Unknowns: E_0..E_{t0-1} (E monic of degree t0), then Q_0..Q_{d+t0-1}.
    let cols = t0 + d + t0;
    let mut m = crate::codes::Matrix::zeros(f, n, cols);
    let mut rhs = vec![0u32; n];
    for (i, &yi) in y.iter().enumerate() {
        let a = i as u32;
        let mut pow = 1u32;
        for j in 0..cols {
            if j < t0 {
                m.set(i, j, f.neg(f.mul(yi, pow)));
            }
            if j == t0 {
                rhs[i] = f.mul(yi, pow);
            }
            if j < d + t0 {
                m.set(i, t0 + j, pow);
            }
            pow = f.mul(pow, a);
        }
    }
    let Some(sol) = m.solve(&rhs) else {
        return Ok(None);
    };
    let mut e = sol[..t0].to_vec();
    e.push(1);
    let q_poly = sol[t0..].to_vec();
    let (quot, rem) = poly::div_rem(f, &q_poly, &e)?;
    if poly::degree(&rem).is_some() || quot.len() > d {
        return Ok(None);
    }
    let word = poly::eval_all(f, &quot);
    if hamming_distance(&word, y) > t0 {
        return Ok(None);
    }
    Ok(code.message_of(&word))
}

/// All messages whose codewords lie within `radius` of `y`, sorted by
/// distance then lexicographically.
pub fn brute_force_list(code: &LinearCode, y: &[u32], radius: usize, budget: &Budget) -> Result<Vec<Vec<u32>>> {
    if y.len() != code.n() {
        return Err(Error::LengthMismatch { expected: code.n(), got: y.len() });
    }
    let count = budget.check(code.q(), code.k())?;
    let mut hits: Vec<(usize, usize)> = (0..count)
        .filter_map(|m| {
            let dist = hamming_distance(&code.encode_index(m), y);
            (dist <= radius).then_some((dist, m))
        })
        .collect();
    hits.sort_unstable();
    Ok(hits.into_iter().map(|(_, m)| decode_index(m, code.k(), code.q())).collect())
}

#[derive(Debug, Clone)]
pub struct Decoder {
    kind: DecoderKind,
    code: LinearCode,
    codewords: Vec<Vec<u32>>,
}

impl Decoder {
    pub fn new(kind: DecoderKind, code: LinearCode, budget: &Budget) -> Result<Self> {
        let codewords = match kind {
            DecoderKind::BerlekampWelch => {
                if code.rs_dimension().is_none() {
                    return Err(Error::InvalidCode("Berlekamp-Welch needs a full-support Reed-Solomon code".into()));
                }
                Vec::new()
            }
            _ => code.codewords(budget)?,
        };
        Ok(Self { kind, code, codewords })
    }

    pub fn kind(&self) -> DecoderKind {
        self.kind
    }

    pub fn code(&self) -> &LinearCode {
        &self.code
    }

    /// The decoded message, or `None` on failure.
    pub fn try_decode(&self, y: &[u32]) -> Option<Vec<u32>> {
        let radius = match self.kind {
            DecoderKind::BerlekampWelch => return berlekamp_welch(&self.code, y).ok().flatten(),
            DecoderKind::BruteForceNearest => self.code.n(),
            DecoderKind::BruteForceList { radius } => radius,
        };
        // Strict improvement keeps the lexicographically first nearest message.
        let mut best: Option<(usize, usize)> = None;
        for (m, c) in self.codewords.iter().enumerate() {
            let dist = hamming_distance(c, y);
            if dist <= radius && best.is_none_or(|(bd, _)| dist < bd) {
                best = Some((dist, m));
            }
        }
        best.map(|(_, m)| decode_index(m, self.code.k(), self.code.q()))
    }

    /// Total version: failure becomes the zero message.
    pub fn decode(&self, y: &[u32]) -> Vec<u32> {
        self.try_decode(y).unwrap_or_else(|| vec![0; self.code.k()])
    }

    /// Message index for every received word, indexed by the word's index.
    pub fn table(&self, budget: &Budget) -> Result<Vec<usize>> {
        let size = budget.check(self.code.q(), self.code.n())?;
        let (n, q) = (self.code.n(), self.code.q());
        Ok((0..size).into_par_iter().map(|i| encode_index(&self.decode(&decode_index(i, n, q)), q)).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    Exact,
    MonteCarlo { samples: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecoderReport {
    pub p_dec: f64,
    pub mode: String,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    /// Three-sigma half-width of the estimate.
    pub ci: Option<f64>,
}

fn check_profile(code: &LinearCode, profile: &ErrorProfile) -> Result<()> {
    if profile.n() != code.n() {
        return Err(Error::LengthMismatch { expected: code.n(), got: profile.n() });
    }
    if profile.q() != code.q() {
        return Err(Error::MixedModuli(code.q(), profile.q()));
    }
    Ok(())
}

/// Dense `|f(e)|^2` over F_q^n.
pub fn error_probabilities(profile: &ErrorProfile, budget: &Budget) -> Result<Vec<f64>> {
    Ok(profile.materialize(budget)?.amps.iter().map(|a| a.norm_sqr()).collect())
}

/// `p_s = sum_e |f(e)|^2 [D(sG + e) = s]` for every message `s`, given a
/// decoding table.
pub fn message_success_from_table(code: &LinearCode, table: &[usize], probs: &[f64]) -> Vec<f64> {
    let (n, q) = (code.n(), code.q());
    let messages = (q as usize).pow(code.k() as u32);
    (0..messages)
        .into_par_iter()
        .map(|s| {
            let c = encode_index(&code.encode_index(s), q);
            probs
                .iter()
                .enumerate()
                .filter(|&(e, _)| table[add_indices(c, e, n, q)] == s)
                .map(|(_, p)| p)
                .sum()
        })
        .collect()
}

/// Per-message success probabilities, by exhaustive enumeration.
pub fn message_success_probabilities(decoder: &Decoder, profile: &ErrorProfile, budget: &Budget) -> Result<Vec<f64>> {
    check_profile(decoder.code(), profile)?;
    let probs = error_probabilities(profile, budget)?;
    let table = decoder.table(budget)?;
    Ok(message_success_from_table(decoder.code(), &table, &probs))
}

/// `P_Dec`: success probability for a uniformly random message.
pub fn success_probability(
    decoder: &Decoder,
    profile: &ErrorProfile,
    mode: EvalMode,
    budget: &Budget,
) -> Result<DecoderReport> {
    check_profile(decoder.code(), profile)?;
    match mode {
        EvalMode::Exact => {
            let ps = message_success_probabilities(decoder, profile, budget)?;
            Ok(DecoderReport {
                p_dec: ps.iter().sum::<f64>() / ps.len() as f64,
                mode: "exact".into(),
                samples: None,
                seed: None,
                ci: None,
            })
        }
        EvalMode::MonteCarlo { samples, seed } => {
            if samples == 0 {
                return Err(Error::InvalidParameter("Monte Carlo needs at least one sample".into()));
            }
            let code = decoder.code();
            let mut rng = stream(seed, Stream::Decode);
            let coords: Vec<WeightedIndex<f64>> = (0..code.n())
                .map(|i| WeightedIndex::new(profile.error_distribution(i)))
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::InvalidParameter(e.to_string()))?;
            let f = code.field();
            let mut hits = 0u64;
            for _ in 0..samples {
                let s: Vec<u32> = (0..code.k()).map(|_| rng.gen_range(0..f.q())).collect();
                let c = code.encode(&s);
                let y: Vec<u32> = c.iter().zip(&coords).map(|(&ci, w)| f.add(ci, w.sample(&mut rng) as u32)).collect();
                if decoder.decode(&y) == s {
                    hits += 1;
                }
            }
            let p = hits as f64 / samples as f64;
            Ok(DecoderReport {
                p_dec: p,
                mode: "monte_carlo".into(),
                samples: Some(samples),
                seed: Some(seed),
                ci: Some(3.0 * (p * (1.0 - p) / samples as f64).sqrt()),
            })
        }
    }
}

/// `Pr[wt(e) <= t]` for `e ~ |f|^2`.
pub fn weight_at_most(profile: &ErrorProfile, t: usize) -> f64 {
    let probs: Vec<f64> = (0..profile.n()).map(|i| 1.0 - profile.center_probability_numeric(i)).collect();
    success_count_distribution(&probs).iter().take(t + 1).sum()
}
