//! Dense univariate polynomials over F_q, coefficients low-degree-first.

use super::field::Fq;
use crate::error::{Error, Result};

/// Drops trailing zero coefficients. The zero polynomial becomes empty.
pub fn trim(p: &mut Vec<u32>) {
    while p.last() == Some(&0) {
        p.pop();
    }
}

/// Degree, or `None` for the zero polynomial.
pub fn degree(p: &[u32]) -> Option<usize> {
    p.iter().rposition(|&c| c != 0)
}

pub fn eval(f: Fq, p: &[u32], x: u32) -> u32 {
    p.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
}

/// Evaluations at `0, 1, ..., q-1`.
pub fn eval_all(f: Fq, p: &[u32]) -> Vec<u32> {
    f.elements().map(|x| eval(f, p, x)).collect()
}

pub fn mul(f: Fq, a: &[u32], b: &[u32]) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    trim(&mut out);
    out
}

/// Euclidean division `a = quot * b + rem`.
pub fn div_rem(f: Fq, a: &[u32], b: &[u32]) -> Result<(Vec<u32>, Vec<u32>)> {
    let db = degree(b).ok_or(Error::DivisionByZero)?;
    let lead_inv = f.inv(b[db])?;
    let mut rem: Vec<u32> = a.to_vec();
    trim(&mut rem);
    if rem.len() <= db {
        return Ok((Vec::new(), rem));
    }
    let mut quot = vec![0u32; rem.len() - db];
    while let Some(dr) = degree(&rem) {
        if dr < db {
            break;
        }
        let c = f.mul(rem[dr], lead_inv);
        let shift = dr - db;
        quot[shift] = c;
        for (j, &bj) in b[..=db].iter().enumerate() {
            rem[shift + j] = f.sub(rem[shift + j], f.mul(c, bj));
        }
        trim(&mut rem);
    }
    trim(&mut quot);
    Ok((quot, rem))
}

/// Lagrange interpolation through `(xs[i], ys[i])`; the `xs` must be distinct.
pub fn interpolate(f: Fq, xs: &[u32], ys: &[u32]) -> Result<Vec<u32>> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch { expected: xs.len(), got: ys.len() });
    }
    let mut out = vec![0u32; xs.len()];
    for (i, (&xi, &yi)) in xs.iter().zip(ys).enumerate() {
        if yi == 0 {
            continue;
        }
        let mut basis = vec![1u32];
        let mut denom = 1u32;
        for (j, &xj) in xs.iter().enumerate() {
            if j == i {
                continue;
            }
            basis = mul(f, &basis, &[f.neg(xj), 1]);
            denom = f.mul(denom, f.sub(xi, xj));
        }
        let scale = f.mul(yi, f.inv(denom)?);
        for (o, &b) in out.iter_mut().zip(&basis) {
            *o = f.add(*o, f.mul(scale, b));
        }
    }
    trim(&mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn division_by_zero_polynomial_fails() {
        let f = Fq::new(7).unwrap();
        assert!(div_rem(f, &[1, 2], &[]).is_err());
    }

    #[test]
    fn exact_division() {
        let f = Fq::new(7).unwrap();
        let a = [3, 1];
        let b = [5, 0, 2];
        let prod = mul(f, &a, &b);
        let (quot, rem) = div_rem(f, &prod, &b).unwrap();
        assert_eq!(quot, a.to_vec());
        assert!(rem.is_empty());
    }

    proptest! {
        #[test]
        fn interpolation_inverts_evaluation(coeffs in proptest::collection::vec(0u32..11, 0..11)) {
            let f = Fq::new(11).unwrap();
            let mut p = coeffs.clone();
            trim(&mut p);
            let xs: Vec<u32> = f.elements().collect();
            let ys = eval_all(f, &p);
            prop_assert_eq!(interpolate(f, &xs, &ys).unwrap(), p);
        }

        #[test]
        fn division_identity(a in proptest::collection::vec(0u32..13, 0..8), b in proptest::collection::vec(0u32..13, 1..5)) {
            let f = Fq::new(13).unwrap();
            prop_assume!(degree(&b).is_some());
            let (quot, rem) = div_rem(f, &a, &b).unwrap();
            prop_assert!(degree(&rem).map_or(true, |d| d < degree(&b).unwrap()));
            let mut back = mul(f, &quot, &b);
            back.resize(back.len().max(rem.len()), 0);
            for (i, &r) in rem.iter().enumerate() {
                back[i] = f.add(back[i], r);
            }
            trim(&mut back);
            let mut a = a.clone();
            trim(&mut a);
            prop_assert_eq!(back, a);
        }
    }
}
