//! Prime-field arithmetic on `u32` residues.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest accepted modulus; keeps every product below `u64::MAX`.
pub const MAX_MODULUS: u32 = 1 << 31;

/// The prime field F_q. Elements are plain residues in `[0, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Fq {
    q: u32,
}

impl TryFrom<u32> for Fq {
    type Error = Error;
    fn try_from(q: u32) -> Result<Self> {
        Fq::new(q)
    }
}

impl From<Fq> for u32 {
    fn from(f: Fq) -> u32 {
        f.q
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

impl Fq {
    /// Builds F_q, rejecting composite moduli (prime powers included).
    pub fn new(q: u32) -> Result<Self> {
        if q > MAX_MODULUS || !is_prime(q as u64) {
            return Err(Error::NotPrime(q as u64));
        }
        Ok(Self { q })
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    #[inline]
    pub fn reduce(&self, a: u64) -> u32 {
        (a % self.q as u64) as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        if s >= self.q as u64 {
            (s - self.q as u64) as u32
        } else {
            s as u32
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            self.q - (b - a)
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.q as u64) as u32
    }

    pub fn pow(&self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1 % self.q;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse by Fermat's little theorem.
    pub fn inv(&self, a: u32) -> Result<u32> {
        if a % self.q == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.q as u64 - 2))
    }

    /// Signed representative in `[-floor((q-1)/2), ceil((q-1)/2)]`.
    pub fn signed(&self, a: u32) -> i64 {
        let half_up = self.q as i64 / 2; // ceil((q-1)/2)
        let a = a as i64;
        if a > half_up {
            a - self.q as i64
        } else {
            a
        }
    }

    pub fn from_signed(&self, a: i64) -> u32 {
        a.rem_euclid(self.q as i64) as u32
    }

    /// Residues of the centered interval `[-z, z]`, ascending.
    pub fn centered_interval(&self, z: u32) -> Result<Vec<u32>> {
        if 2 * (z as u64) + 1 > self.q as u64 {
            return Err(Error::InvalidParameter(format!(
                "interval radius {z} too large for q = {}",
                self.q
            )));
        }
        let mut set: Vec<u32> = (-(z as i64)..=z as i64).map(|a| self.from_signed(a)).collect();
        set.sort_unstable();
        Ok(set)
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.q
    }
}

/// A residue tagged with its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldElement {
    pub value: u32,
    pub q: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    /// Unary; the second operand is ignored.
    Inv,
    /// Unary; the second operand is ignored.
    Neg,
}

impl FieldElement {
    pub fn new(value: u64, field: Fq) -> Self {
        Self { value: field.reduce(value), q: field.q() }
    }

    pub fn field(&self) -> Fq {
        Fq { q: self.q }
    }
}

/// Checked arithmetic between tagged elements.
pub fn field_arith(a: FieldElement, b: FieldElement, op: ArithOp) -> Result<FieldElement> {
    let f = a.field();
    let binary = matches!(op, ArithOp::Add | ArithOp::Sub | ArithOp::Mul);
    if binary && a.q != b.q {
        return Err(Error::MixedModuli(a.q, b.q));
    }
    let value = match op {
        ArithOp::Add => f.add(a.value, b.value),
        ArithOp::Sub => f.sub(a.value, b.value),
        ArithOp::Mul => f.mul(a.value, b.value),
        ArithOp::Inv => f.inv(a.value)?,
        ArithOp::Neg => f.neg(a.value),
    };
    Ok(FieldElement { value, q: a.q })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn el(v: u64, q: u32) -> FieldElement {
        FieldElement::new(v, Fq::new(q).unwrap())
    }

    #[test]
    fn small_examples() {
        assert_eq!(field_arith(el(2, 3), el(2, 3), ArithOp::Add).unwrap().value, 1);
        // brute-force oracle for the inverse of 3 mod 7
        let oracle = (1..7u32).find(|b| (3 * b) % 7 == 1).unwrap();
        assert_eq!(oracle, 5);
        assert_eq!(field_arith(el(3, 7), el(0, 7), ArithOp::Inv).unwrap().value, oracle);
        for q in [2, 3, 5, 11] {
            assert_eq!(field_arith(el(0, q), el(0, q), ArithOp::Neg).unwrap().value, 0);
        }
    }

    #[test]
    fn errors() {
        let e = field_arith(el(0, 5), el(0, 5), ArithOp::Inv).unwrap_err();
        assert_eq!(e.to_string(), "division by zero in F_q");
        assert_eq!(
            field_arith(el(1, 5), el(1, 7), ArithOp::Add),
            Err(Error::MixedModuli(5, 7))
        );
        assert!(Fq::new(4).is_err());
        assert!(Fq::new(9).is_err());
        assert!(Fq::new(1).is_err());
        assert!(Fq::new(2).is_ok());
    }

    #[test]
    fn signed_representatives() {
        let f = Fq::new(5).unwrap();
        let reps: Vec<i64> = f.elements().map(|a| f.signed(a)).collect();
        assert_eq!(reps, vec![0, 1, 2, -2, -1]);
        let f = Fq::new(2).unwrap();
        assert_eq!(f.signed(1), 1);
        assert_eq!(Fq::new(7).unwrap().centered_interval(1).unwrap(), vec![0, 1, 6]);
        assert!(Fq::new(7).unwrap().centered_interval(4).is_err());
    }

    proptest! {
        #[test]
        fn field_axioms(a in 0u32..101, b in 1u32..101, c in 0u32..101) {
            let f = Fq::new(101).unwrap();
            prop_assert_eq!(f.sub(f.add(a, c), c), a);
            prop_assert_eq!(f.mul(f.inv(b).unwrap(), b), 1);
            prop_assert_eq!(f.add(a, f.neg(a)), 0);
            prop_assert_eq!(f.from_signed(f.signed(a)), a);
            prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        }
    }
}
