//! Dense state vectors over a product of F_q registers.
//!
//! Register `r` spans `dims[r]` consecutive coordinates of the global
//! mixed-radix index, register 0 most significant.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::config::Budget;
use crate::error::{Error, Result};
use crate::galois::fourier::transform_coordinates;
use crate::galois::Direction;

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    q: u32,
    dims: Vec<usize>,
    amps: Vec<Complex64>,
}

impl QuantumState {
    /// All-zero amplitudes (not a valid state until filled).
    pub fn zeros(q: u32, dims: &[usize], budget: &Budget) -> Result<Self> {
        let len = budget.check(q, dims.iter().sum())?;
        Ok(Self { q, dims: dims.to_vec(), amps: vec![Complex64::new(0.0, 0.0); len] })
    }

    pub fn from_amplitudes(q: u32, dims: &[usize], amps: Vec<Complex64>) -> Result<Self> {
        let expected = (q as usize).pow(dims.iter().sum::<usize>() as u32);
        if amps.len() != expected {
            return Err(Error::LengthMismatch { expected, got: amps.len() });
        }
        Ok(Self { q, dims: dims.to_vec(), amps })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.par_iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&mut self, c: f64) {
        self.amps.par_iter_mut().for_each(|a| *a *= c);
    }

    /// `<self | other>`.
    pub fn inner(&self, other: &QuantumState) -> Complex64 {
        assert_eq!(self.amps.len(), other.amps.len());
        self.amps.par_iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    fn offset(&self, r: usize) -> usize {
        self.dims[..r].iter().sum()
    }

    /// Index stride of register `r`.
    pub fn stride(&self, r: usize) -> usize {
        (self.q as usize).pow(self.dims[r + 1..].iter().sum::<usize>() as u32)
    }

    /// Number of basis values of register `r`.
    pub fn register_size(&self, r: usize) -> usize {
        (self.q as usize).pow(self.dims[r] as u32)
    }

    /// A view of the index layout, cheap to copy into parallel closures.
    pub fn layout(&self) -> IndexLayout {
        IndexLayout {
            strides: (0..self.dims.len()).map(|r| self.stride(r)).collect(),
            sizes: (0..self.dims.len()).map(|r| self.register_size(r)).collect(),
        }
    }

    /// Out-of-place permutation: `new[i] = old[source(i)]`. `source` must be
    /// a bijection.
    pub fn permute<F>(&mut self, source: F)
    where
        F: Fn(usize) -> usize + Sync,
    {
        let old = &self.amps;
        let new: Vec<Complex64> = (0..old.len()).into_par_iter().map(|i| old[source(i)]).collect();
        self.amps = new;
    }

    /// `new[i] = old[j]` where `j` is `i` with register `target` replaced by
    /// `table[c * size(target) + t]`, `c` and `t` being the values of
    /// `control` and `target` at `i`. Each row of `table` must be a
    /// permutation of the target's values.
    pub fn permute_register(&mut self, target: usize, control: usize, table: &[usize]) {
        let (st, nt) = (self.stride(target), self.register_size(target));
        let (sc, nc) = (self.stride(control), self.register_size(control));
        debug_assert_eq!(table.len(), nt * nc);
        let old = &self.amps;
        let mut new = vec![Complex64::new(0.0, 0.0); old.len()];
        if sc > st {
            // The control is fixed on runs of length sc, each holding whole
            // target cycles; move runs of length st.
            let cycle = st * nt;
            new.par_chunks_mut(sc).enumerate().for_each(|(j, run)| {
                let row = &table[(j % nc) * nt..][..nt];
                let start = j * sc;
                for g in (0..sc).step_by(cycle) {
                    for (t, &src) in row.iter().enumerate() {
                        let from = start + g + src * st;
                        run[g + t * st..][..st].copy_from_slice(&old[from..from + st]);
                    }
                }
            });
        } else {
            // The control varies inside each target run, identically per run.
            let controls: Vec<usize> = (0..st).map(|o| (o / sc) % nc).collect();
            new.par_chunks_mut(st).enumerate().for_each(|(j, run)| {
                let t = j % nt;
                let base = (j - t) * st;
                for (o, a) in run.iter_mut().enumerate() {
                    *a = old[base + table[controls[o] * nt + t] * st + o];
                }
            });
        }
        self.amps = new;
    }

    /// Fourier transform on every coordinate of register `r`.
    pub fn fourier(&mut self, r: usize, dir: Direction) {
        let total = self.dims.iter().sum();
        let start = self.offset(r);
        transform_coordinates(&mut self.amps, self.q, total, start..start + self.dims[r], dir);
    }

    /// Zeroes every amplitude whose register `r` differs from `value` and
    /// returns the retained squared norm.
    pub fn project(&mut self, r: usize, value: usize) -> f64 {
        let layout = self.layout();
        self.amps.par_iter_mut().enumerate().for_each(|(i, a)| {
            if layout.value(i, r) != value {
                *a = Complex64::new(0.0, 0.0);
            }
        });
        self.norm_sqr()
    }

    /// The slice with register `r` fixed to `value`, as a state without `r`.
    pub fn slice(&self, r: usize, value: usize) -> QuantumState {
        let mut dims = self.dims.clone();
        dims.remove(r);
        let stride = self.stride(r);
        let size = self.register_size(r);
        let outer = self.amps.len() / (stride * size);
        let mut amps = Vec::with_capacity(outer * stride);
        for o in 0..outer {
            let base = o * stride * size + value * stride;
            amps.extend_from_slice(&self.amps[base..base + stride]);
        }
        QuantumState { q: self.q, dims, amps }
    }

    /// Probabilities of the outcomes of measuring register `r`.
    pub fn marginal(&self, r: usize) -> Vec<f64> {
        let layout = self.layout();
        let mut out = vec![0.0; self.register_size(r)];
        for (i, a) in self.amps.iter().enumerate() {
            out[layout.value(i, r)] += a.norm_sqr();
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct IndexLayout {
    strides: Vec<usize>,
    sizes: Vec<usize>,
}

impl IndexLayout {
    /// Value of register `r` in global index `i`.
    #[inline]
    pub fn value(&self, i: usize, r: usize) -> usize {
        (i / self.strides[r]) % self.sizes[r]
    }

    /// `i` with register `r` replaced by `v`.
    #[inline]
    pub fn with_value(&self, i: usize, r: usize, v: usize) -> usize {
        i - self.value(i, r) * self.strides[r] + v * self.strides[r]
    }

    #[inline]
    pub fn stride(&self, r: usize) -> usize {
        self.strides[r]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(q: u32, dims: &[usize], i: usize) -> QuantumState {
        let mut s = QuantumState::zeros(q, dims, &Budget::default()).unwrap();
        s.amps_mut()[i] = Complex64::new(1.0, 0.0);
        s
    }

    #[test]
    fn register_values() {
        let s = basis(3, &[2, 1], 0);
        let l = s.layout();
        // index of (a = (1, 2), b = 1) is (1*3 + 2)*3 + 1 = 16
        assert_eq!(l.value(16, 0), 5);
        assert_eq!(l.value(16, 1), 1);
        assert_eq!(l.with_value(16, 1, 2), 17);
        assert_eq!(l.with_value(16, 0, 0), 1);
    }

    #[test]
    fn slice_and_marginal() {
        let mut s = QuantumState::zeros(2, &[1, 1], &Budget::default()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        s.amps_mut()[1] = Complex64::new(h, 0.0);
        s.amps_mut()[2] = Complex64::new(0.0, h);
        assert!(s.marginal(0).iter().all(|p| (p - 0.5).abs() < 1e-15));
        let t = s.slice(1, 1);
        assert_eq!(t.amps(), &[Complex64::new(h, 0.0), Complex64::new(0.0, 0.0)]);
        let mut p = s.clone();
        assert!((p.project(1, 0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn fourier_round_trip_on_one_register() {
        let mut s = basis(3, &[1, 2], 7);
        let orig = s.clone();
        s.fourier(1, Direction::Forward);
        assert!((s.norm() - 1.0).abs() < 1e-12);
        s.fourier(1, Direction::Inverse);
        for (a, b) in s.amps().iter().zip(orig.amps()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn budget_checked_before_allocation() {
        let err = QuantumState::zeros(5, &[10, 10], &Budget::new(1000)).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn register_permutation_matches_generic_permute() {
        let (q, dims) = (3u32, [2usize, 1, 2, 1]);
        let mut s = QuantumState::zeros(q, &dims, &Budget::default()).unwrap();
        for (i, a) in s.amps_mut().iter_mut().enumerate() {
            *a = Complex64::new(i as f64, (i * i % 7) as f64);
        }
        for (target, control) in [(1, 0), (0, 1), (3, 0), (0, 3), (2, 3), (3, 2), (1, 2)] {
            let (nt, nc) = (s.register_size(target), s.register_size(control));
            // Row c rotates the target by c + 1.
            let table: Vec<usize> = (0..nc).flat_map(|c| (0..nt).map(move |t| (t + c + 1) % nt)).collect();
            let mut fast = s.clone();
            fast.permute_register(target, control, &table);
            let l = s.layout();
            let mut slow = s.clone();
            slow.permute(|i| l.with_value(i, target, table[l.value(i, control) * nt + l.value(i, target)]));
            assert_eq!(fast.amps(), slow.amps(), "target {target} control {control}");
        }
    }
}
