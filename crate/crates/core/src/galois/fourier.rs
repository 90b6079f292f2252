//! Additive characters and the Fourier transform on F_q^n.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::field::Fq;
use super::vector::{decode_index, dot, FieldVector};
use crate::codes::LinearCode;
use crate::config::Budget;
use crate::error::{Error, Result};

/// `exp(2 pi i j / q)` for `j` in `[0, q)`.
pub fn roots_of_unity(q: u32) -> Vec<Complex64> {
    (0..q).map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / q as f64)).collect()
}

/// `chi_y(x) = exp(2 pi i (x . y) / q)`.
pub fn character(y: &FieldVector, x: &FieldVector) -> Result<Complex64> {
    let e = y.dot(x)?;
    Ok(Complex64::from_polar(1.0, 2.0 * PI * e as f64 / y.field.q() as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `f_hat(x) = q^{-n/2} sum_y chi_x(y) f(y)`.
    Forward,
    /// Same with conjugated characters; inverts `Forward`.
    Inverse,
}

/// The unitary q x q DFT matrix, row-major.
fn dft_matrix(q: u32, dir: Direction) -> Vec<Complex64> {
    let roots = roots_of_unity(q);
    let scale = 1.0 / (q as f64).sqrt();
    let qq = q as usize;
    let mut m = vec![Complex64::new(0.0, 0.0); qq * qq];
    for x in 0..qq {
        for y in 0..qq {
            let e = (x * y) % qq;
            let w = match dir {
                Direction::Forward => roots[e],
                Direction::Inverse => roots[e].conj(),
            };
            m[x * qq + y] = w * scale;
        }
    }
    m
}

/// Applies the size-q transform to coordinates `coords` of a dense array
/// over F_q^dims (mixed radix, coordinate 0 most significant).
pub fn transform_coordinates(
    amps: &mut [Complex64],
    q: u32,
    dims: usize,
    coords: std::ops::Range<usize>,
    dir: Direction,
) {
    let qq = q as usize;
    debug_assert_eq!(amps.len(), qq.pow(dims as u32));
    let m = dft_matrix(q, dir);
    for c in coords {
        let stride = qq.pow((dims - 1 - c) as u32);
        let block = stride * qq;
        amps.par_chunks_mut(block).for_each_init(|| vec![Complex64::new(0.0, 0.0); qq], |buf, chunk| {
            for o in 0..stride {
                for (j, b) in buf.iter_mut().enumerate() {
                    *b = chunk[o + j * stride];
                }
                for x in 0..qq {
                    let row = &m[x * qq..(x + 1) * qq];
                    chunk[o + x * stride] =
                        row.iter().zip(buf.iter()).fold(Complex64::new(0.0, 0.0), |acc, (w, v)| acc + w * v);
                }
            }
        });
    }
}

/// A dense complex function on F_q^n.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexFunction {
    pub field: Fq,
    pub n: usize,
    pub amps: Vec<Complex64>,
}

impl ComplexFunction {
    pub fn zeros(field: Fq, n: usize, budget: &Budget) -> Result<Self> {
        let size = budget.check(field.q(), n)?;
        Ok(Self { field, n, amps: vec![Complex64::new(0.0, 0.0); size] })
    }

    pub fn from_amplitudes(field: Fq, n: usize, amps: Vec<Complex64>) -> Result<Self> {
        let expected = (field.q() as usize).pow(n as u32);
        if amps.len() != expected {
            return Err(Error::LengthMismatch { expected, got: amps.len() });
        }
        Ok(Self { field, n, amps })
    }

    /// Indicator of the zero vector.
    pub fn delta_zero(field: Fq, n: usize, budget: &Budget) -> Result<Self> {
        let mut f = Self::zeros(field, n, budget)?;
        f.amps[0] = Complex64::new(1.0, 0.0);
        Ok(f)
    }

    /// Tensor product of per-coordinate functions `factors[i]: F_q -> C`.
    pub fn tensor_product(field: Fq, factors: &[Vec<Complex64>], budget: &Budget) -> Result<Self> {
        let n = factors.len();
        let q = field.q() as usize;
        for fac in factors {
            if fac.len() != q {
                return Err(Error::LengthMismatch { expected: q, got: fac.len() });
            }
        }
        let size = budget.check(field.q(), n)?;
        let mut amps = vec![Complex64::new(1.0, 0.0); 1];
        amps.reserve(size);
        for fac in factors {
            let mut next = Vec::with_capacity(amps.len() * q);
            for a in &amps {
                for v in fac {
                    next.push(a * v);
                }
            }
            amps = next;
        }
        Ok(Self { field, n, amps })
    }

    pub fn get(&self, x: &FieldVector) -> Complex64 {
        self.amps[x.index()]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn points(&self) -> impl Iterator<Item = (Vec<u32>, Complex64)> + '_ {
        let (n, q) = (self.n, self.field.q());
        self.amps.iter().enumerate().map(move |(i, &a)| (decode_index(i, n, q), a))
    }
}

/// Fourier transform computed as `n` passes of size-q transforms.
pub fn fourier_transform(f: &ComplexFunction, dir: Direction, budget: &Budget) -> Result<ComplexFunction> {
    budget.check(f.field.q(), f.n)?;
    let mut out = f.clone();
    transform_coordinates(&mut out.amps, f.field.q(), f.n, 0..f.n, dir);
    Ok(out)
}

/// Direct O(q^{2n}) evaluation of the transform; test oracle only.
pub fn fourier_transform_naive(f: &ComplexFunction, dir: Direction) -> ComplexFunction {
    let q = f.field.q();
    let roots = roots_of_unity(q);
    let size = f.amps.len();
    let scale = (size as f64).sqrt().recip();
    let vecs: Vec<Vec<u32>> = (0..size).map(|i| decode_index(i, f.n, q)).collect();
    let amps = vecs
        .iter()
        .map(|x| {
            let s = vecs.iter().zip(&f.amps).fold(Complex64::new(0.0, 0.0), |acc, (y, v)| {
                let w = roots[dot(f.field, x, y) as usize];
                let w = if dir == Direction::Inverse { w.conj() } else { w };
                acc + w * v
            });
            s * scale
        })
        .collect();
    ComplexFunction { field: f.field, n: f.n, amps }
}

/// `sum_{c in C} chi_y(c)`, by enumerating all `q^k` codewords.
pub fn code_character_sum(code: &LinearCode, y: &FieldVector, budget: &Budget) -> Result<Complex64> {
    if y.len() != code.n() {
        return Err(Error::LengthMismatch { expected: code.n(), got: y.len() });
    }
    let count = budget.check(code.q(), code.k())?;
    let roots = roots_of_unity(code.q());
    let field = code.field();
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 0..count {
        let c = code.encode_index(m);
        acc += roots[dot(field, &c, &y.coords) as usize];
    }
    Ok(acc)
}
