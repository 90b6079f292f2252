//! Optimal polynomial interpolation and its equivalence with finding a
//! constrained word in a Reed-Solomon coset.
//!
//! Constraint `i` is attached to evaluation point `i`, matching the
//! coordinate order of [`rs_code`].

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::codes::{rs_code, LinearCode, Side};
use crate::config::Budget;
use crate::error::{Error, Result};
use crate::galois::vector::decode_index;
use crate::galois::{poly, FieldVector, Fq};
use crate::noise::{normalize_sets, ConstraintSet};
use crate::rng::{stream, Stream};

/// Find `P` with `deg P < k` such that `P(i) + x_i` lands in `S_i` for at
/// least a `tau` fraction of `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpiInstance {
    pub q: u32,
    pub k: usize,
    pub tau: f64,
    pub sets: Vec<Vec<u32>>,
    pub x: Vec<u32>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpiSolution {
    /// Low-degree-first.
    pub coeffs: Vec<u32>,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    pub count: usize,
    pub meets: bool,
}

impl OpiInstance {
    pub fn new(q: u32, k: usize, tau: f64, sets: Vec<Vec<u32>>, x: Vec<u32>, seed: u64) -> Result<Self> {
        let inst = Self { q, k, tau, sets, x, seed };
        inst.validate()?;
        Ok(Self { sets: normalize_sets(inst.field()?, &inst.sets, true)?, ..inst })
    }

    /// Random sets of `set_size` elements and a uniform `x`, all from `seed`.
    pub fn generate(q: u32, k: usize, set_size: usize, tau: f64, seed: u64) -> Result<Self> {
        if set_size == 0 || set_size > q as usize {
            return Err(Error::InvalidParameter(format!("set size {set_size} must lie in [1, {q}]")));
        }
        Fq::new(q)?;
        let mut rng = stream(seed, Stream::Opi);
        let sets = (0..q)
            .map(|_| sample(&mut rng, q as usize, set_size).into_iter().map(|a| a as u32).collect())
            .collect();
        let x = (0..q).map(|_| rng.gen_range(0..q)).collect();
        Self::new(q, k, tau, sets, x, seed)
    }

    pub fn field(&self) -> Result<Fq> {
        Fq::new(self.q)
    }

    pub fn validate(&self) -> Result<()> {
        let f = self.field()?;
        if self.k == 0 || self.k >= self.q as usize {
            return Err(Error::InvalidParameter(format!("k = {} must satisfy 1 <= k < q = {}", self.k, self.q)));
        }
        if !(0.0..=1.0).contains(&self.tau) {
            return Err(Error::InvalidParameter(format!("tau = {} outside [0, 1]", self.tau)));
        }
        let q = self.q as usize;
        if self.sets.len() != q {
            return Err(Error::LengthMismatch { expected: q, got: self.sets.len() });
        }
        if self.x.len() != q {
            return Err(Error::LengthMismatch { expected: q, got: self.x.len() });
        }
        if let Some(&bad) = self.x.iter().find(|&&v| v >= self.q) {
            return Err(Error::InvalidParameter(format!("x entry {bad} is not a residue")));
        }
        normalize_sets(f, &self.sets, true)?;
        Ok(())
    }

    /// `ceil(tau q)`.
    pub fn target_count(&self) -> usize {
        (self.tau * self.q as f64 - 1e-9).ceil().max(0.0) as usize
    }

    /// `#{i : P(i) + x_i in S_i}`; rejects `deg P >= k`.
    pub fn count(&self, coeffs: &[u32]) -> Result<usize> {
        if let Some(d) = poly::degree(coeffs) {
            if d >= self.k {
                return Err(Error::DegreeViolation { degree: d, bound: self.k });
            }
        }
        let f = self.field()?;
        let values = poly::eval_all(f, coeffs);
        Ok(self.count_word(&values.iter().zip(&self.x).map(|(&p, &x)| f.add(p, x)).collect::<Vec<_>>()))
    }

    /// `#{i : y_i in S_i}`.
    pub fn count_word(&self, y: &[u32]) -> usize {
        y.iter().zip(&self.sets).filter(|(v, s)| s.binary_search(v).is_ok()).count()
    }

    pub fn constraint(&self) -> Result<ConstraintSet> {
        ConstraintSet::new(self.field()?, &self.sets, self.tau)
    }
}

pub fn verify(instance: &OpiInstance, solution: &OpiSolution) -> Result<Verification> {
    let count = instance.count(&solution.coeffs)?;
    Ok(Verification { count, meets: count >= instance.target_count() })
}

/// The coset form: code `RS_k`, primal syndrome `u = H x^T`, and `T`.
#[derive(Debug, Clone)]
pub struct IccForm {
    pub code: LinearCode,
    pub u: FieldVector,
    pub constraint: ConstraintSet,
}

/// Serializable description of an [`IccForm`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IccDescription {
    pub q: u32,
    pub n: usize,
    pub k: usize,
    pub parity_check: Vec<Vec<u32>>,
    pub u: Vec<u32>,
    pub sets: Vec<Vec<u32>>,
    pub threshold: f64,
    pub min_count: usize,
}

impl IccForm {
    pub fn describe(&self) -> IccDescription {
        IccDescription {
            q: self.code.q(),
            n: self.code.n(),
            k: self.code.k(),
            parity_check: self.code.parity_check().to_rows(),
            u: self.u.coords.clone(),
            sets: self.constraint.sets.clone(),
            threshold: self.constraint.threshold,
            min_count: self.constraint.min_count(),
        }
    }

    /// `y` in the coset and in `T`.
    pub fn accepts(&self, y: &FieldVector) -> Result<bool> {
        Ok(self.code.syndrome(y, Side::Primal)? == self.u && self.constraint.contains(&y.coords))
    }
}

pub fn opi_to_icc(instance: &OpiInstance) -> Result<IccForm> {
    instance.validate()?;
    let code = rs_code(instance.q, instance.k)?;
    let x = FieldVector::new(code.field(), instance.x.clone());
    let u = code.syndrome(&x, Side::Primal)?;
    Ok(IccForm { code, u, constraint: instance.constraint()? })
}

/// Recovers `P` from a coset word: `y - x` must be an RS_k codeword.
pub fn icc_to_opi(instance: &OpiInstance, y: &FieldVector) -> Result<OpiSolution> {
    let code = rs_code(instance.q, instance.k)?;
    let f = code.field();
    if y.len() != code.n() {
        return Err(Error::LengthMismatch { expected: code.n(), got: y.len() });
    }
    let diff: Vec<u32> = y.coords.iter().zip(&instance.x).map(|(&a, &b)| f.sub(a, b)).collect();
    if !code.contains(&diff) {
        return Err(Error::NotCosetSolution);
    }
    let points: Vec<u32> = f.elements().collect();
    let mut coeffs = poly::interpolate(f, &points, &diff)?;
    coeffs.resize(instance.k, 0);
    let count = instance.count(&coeffs)?;
    Ok(OpiSolution { coeffs, count })
}

/// Solves the coset problem through an OPI solver: sample `x` in the
/// coset, solve, and return `x + (P(i))_i`.
pub fn icc_from_opi_solver<R, S>(form: &IccForm, tau: f64, solver: S, rng: &mut R) -> Result<FieldVector>
where
    R: Rng + ?Sized,
    S: FnOnce(&OpiInstance) -> Result<OpiSolution>,
{
    let code = &form.code;
    let k = code.rs_dimension().ok_or_else(|| Error::InvalidCode("expected a Reed-Solomon code".into()))?;
    let x = code.coset_sample(&form.u, Side::Primal, rng)?;
    let instance = OpiInstance::new(code.q(), k, tau, form.constraint.sets.clone(), x.coords.clone(), 0)?;
    let solution = solver(&instance)?;
    instance.count(&solution.coeffs)?;
    let f = code.field();
    let values = poly::eval_all(f, &solution.coeffs);
    Ok(FieldVector::new(f, x.coords.iter().zip(&values).map(|(&a, &b)| f.add(a, b)).collect()))
}

/// Exhaustive search over all `q^k` polynomials; the first best in index
/// order wins.
pub fn brute_force_opi(instance: &OpiInstance, budget: &Budget) -> Result<OpiSolution> {
    instance.validate()?;
    let total = budget.check(instance.q, instance.k)?;
    let mut best: Option<OpiSolution> = None;
    for m in 0..total {
        let coeffs = decode_index(m, instance.k, instance.q);
        let count = instance.count(&coeffs)?;
        if best.as_ref().is_none_or(|b| count > b.count) {
            best = Some(OpiSolution { coeffs, count });
        }
    }
    best.ok_or_else(|| Error::SolverFailed("no polynomials enumerated".into()))
}

/// Exhaustive search of the coset for the word with the most satisfied
/// constraints.
pub fn brute_force_icc(form: &IccForm, budget: &Budget) -> Result<(FieldVector, usize)> {
    let code = &form.code;
    let f = code.field();
    let particular = code
        .parity_check()
        .solve(&form.u.coords)
        .ok_or_else(|| Error::SolverFailed("inconsistent syndrome".into()))?;
    let mut best: Option<(FieldVector, usize)> = None;
    for c in code.codewords(budget)? {
        let y: Vec<u32> = particular.iter().zip(&c).map(|(&a, &b)| f.add(a, b)).collect();
        let count = form.constraint.count(&y);
        if best.as_ref().is_none_or(|(_, b)| count > *b) {
            best = Some((FieldVector::new(f, y), count));
        }
    }
    best.ok_or_else(|| Error::SolverFailed("empty coset".into()))
}
