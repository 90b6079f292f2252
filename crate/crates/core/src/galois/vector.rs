//! Row vectors over F_q and the mixed-radix index encoding.
//!
//! A vector `(x_0, ..., x_{n-1})` is stored at index
//! `x_0 q^{n-1} + x_1 q^{n-2} + ... + x_{n-1}`: coordinate 0 is the most
//! significant digit. Dense functions, quantum registers and CSV output all
//! use this ordering.

use serde::{Deserialize, Serialize};

use super::field::Fq;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldVector {
    pub field: Fq,
    pub coords: Vec<u32>,
}

impl FieldVector {
    /// Reduces every coordinate modulo q.
    pub fn new(field: Fq, coords: Vec<u32>) -> Self {
        let coords = coords.into_iter().map(|c| field.reduce(c as u64)).collect();
        Self { field, coords }
    }

    pub fn zeros(field: Fq, n: usize) -> Self {
        Self { field, coords: vec![0; n] }
    }

    pub fn from_index(field: Fq, n: usize, index: usize) -> Self {
        Self { field, coords: decode_index(index, n, field.q()) }
    }

    pub fn index(&self) -> usize {
        encode_index(&self.coords, self.field.q())
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    fn check_compatible(&self, other: &FieldVector) -> Result<()> {
        if self.field != other.field {
            return Err(Error::MixedModuli(self.field.q(), other.field.q()));
        }
        if self.len() != other.len() {
            return Err(Error::LengthMismatch { expected: self.len(), got: other.len() });
        }
        Ok(())
    }

    /// Inner product `sum_i x_i y_i` in F_q.
    pub fn dot(&self, other: &FieldVector) -> Result<u32> {
        self.check_compatible(other)?;
        Ok(dot(self.field, &self.coords, &other.coords))
    }

    pub fn add(&self, other: &FieldVector) -> Result<FieldVector> {
        self.check_compatible(other)?;
        let f = self.field;
        let coords = self.coords.iter().zip(&other.coords).map(|(&a, &b)| f.add(a, b)).collect();
        Ok(FieldVector { field: f, coords })
    }

    pub fn sub(&self, other: &FieldVector) -> Result<FieldVector> {
        self.check_compatible(other)?;
        let f = self.field;
        let coords = self.coords.iter().zip(&other.coords).map(|(&a, &b)| f.sub(a, b)).collect();
        Ok(FieldVector { field: f, coords })
    }

    pub fn neg(&self) -> FieldVector {
        let f = self.field;
        FieldVector { field: f, coords: self.coords.iter().map(|&a| f.neg(a)).collect() }
    }

    pub fn scale(&self, c: u32) -> FieldVector {
        let f = self.field;
        FieldVector { field: f, coords: self.coords.iter().map(|&a| f.mul(a, c)).collect() }
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.coords.iter().filter(|&&c| c != 0).count()
    }

    pub fn distance(&self, other: &FieldVector) -> Result<usize> {
        self.check_compatible(other)?;
        Ok(hamming_distance(&self.coords, &other.coords))
    }
}

pub fn dot(field: Fq, a: &[u32], b: &[u32]) -> u32 {
    let acc = a.iter().zip(b).fold(0u64, |acc, (&x, &y)| (acc + x as u64 * y as u64) % field.q() as u64);
    acc as u32
}

pub fn hamming_distance(a: &[u32], b: &[u32]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

pub fn encode_index(coords: &[u32], q: u32) -> usize {
    coords.iter().fold(0usize, |acc, &c| acc * q as usize + c as usize)
}

pub fn decode_index(mut index: usize, n: usize, q: u32) -> Vec<u32> {
    let mut out = vec![0u32; n];
    for slot in out.iter_mut().rev() {
        *slot = (index % q as usize) as u32;
        index /= q as usize;
    }
    out
}

/// Digit-wise sum of two encoded vectors of length `n`.
pub fn add_indices(a: usize, b: usize, n: usize, q: u32) -> usize {
    let q = q as usize;
    let (mut a, mut b) = (a, b);
    let mut out = 0usize;
    let mut place = 1usize;
    for _ in 0..n {
        let d = (a % q + b % q) % q;
        out += d * place;
        place *= q;
        a /= q;
        b /= q;
    }
    out
}

/// Digit-wise difference `a - b` of two encoded vectors of length `n`.
pub fn sub_indices(a: usize, b: usize, n: usize, q: u32) -> usize {
    let q = q as usize;
    let (mut a, mut b) = (a, b);
    let mut out = 0usize;
    let mut place = 1usize;
    for _ in 0..n {
        let d = (a % q + q - b % q) % q;
        out += d * place;
        place *= q;
        a /= q;
        b /= q;
    }
    out
}
