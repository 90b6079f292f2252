//! Linear codes over F_q: generator/parity-check pairs, duals, syndromes,
//! cosets and full-support Reed-Solomon codes.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::Budget;
use crate::error::{Error, Result};
use crate::galois::vector::decode_index;
use crate::galois::{FieldVector, Fq};

/// Dense row-major matrix over F_q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    field: Fq,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl Matrix {
    pub fn zeros(field: Fq, rows: usize, cols: usize) -> Self {
        Self { field, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn from_rows(field: Fq, rows: &[Vec<u32>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::LengthMismatch { expected: cols, got: r.len() });
            }
            data.extend(r.iter().map(|&v| field.reduce(v as u64)));
        }
        Ok(Self { field, rows: rows.len(), cols, data })
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn field(&self) -> Fq {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::LengthMismatch { expected: self.cols, got: other.rows });
        }
        let f = self.field;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = 0u64;
                for l in 0..self.cols {
                    acc += self.get(i, l) as u64 * other.get(l, j) as u64;
                }
                out.set(i, j, f.reduce(acc));
            }
        }
        Ok(out)
    }

    /// `M v^T` as a vector of length `rows`.
    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        debug_assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let acc = self.row(i).iter().zip(v).fold(0u64, |a, (&x, &y)| a + x as u64 * y as u64);
                self.field.reduce(acc)
            })
            .collect()
    }

    /// `v M` as a vector of length `cols`.
    pub fn vec_mul(&self, v: &[u32]) -> Vec<u32> {
        debug_assert_eq!(v.len(), self.rows);
        let mut acc = vec![0u64; self.cols];
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0 {
                continue;
            }
            for (a, &m) in acc.iter_mut().zip(self.row(i)) {
                *a += vi as u64 * m as u64;
            }
        }
        acc.into_iter().map(|a| self.field.reduce(a)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| m.get(i, c) != 0) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    let (a, b) = (m.get(p, j), m.get(r, j));
                    m.set(p, j, b);
                    m.set(r, j, a);
                }
            }
            let inv = f.inv(m.get(r, c)).expect("pivot is nonzero");
            for j in 0..m.cols {
                m.set(r, j, f.mul(m.get(r, j), inv));
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let factor = m.get(i, c);
                if factor == 0 {
                    continue;
                }
                for j in 0..m.cols {
                    let v = f.sub(m.get(i, j), f.mul(factor, m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis (as rows) of `{x : M x^T = 0}`.
    pub fn null_space(&self) -> Matrix {
        let f = self.field;
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Matrix::zeros(f, free.len(), self.cols);
        for (row, &fc) in free.iter().enumerate() {
            out.set(row, fc, 1);
            for (i, &pc) in pivots.iter().enumerate() {
                out.set(row, pc, f.neg(r.get(i, fc)));
            }
        }
        out
    }

    /// One solution of `M x^T = b^T`, or `None` if the system is inconsistent.
    pub fn solve(&self, b: &[u32]) -> Option<Vec<u32>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Matrix::zeros(self.field, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, self.cols, b[i]);
        }
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![0u32; self.cols];
        for (i, &pc) in pivots.iter().enumerate() {
            x[pc] = r.get(i, self.cols);
        }
        Some(x)
    }

    /// Inverse of a square matrix.
    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(self.field, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, 1);
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Matrix::zeros(self.field, n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j));
            }
        }
        Some(inv)
    }

    fn select_columns(&self, cols: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.field, self.rows, cols.len());
        for i in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                out.set(i, j, self.get(i, c));
            }
        }
        out
    }
}

/// Which coset family a syndrome refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `C_u = {y : H y^T = u^T}`, syndrome of length `n - k`.
    Primal,
    /// `C^perp_u = {y : G y^T = u^T}`, syndrome of length `k`.
    Dual,
}

/// A q-ary linear `[n, k]` code with `1 <= k < n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearCode {
    generator: Matrix,
    parity_check: Matrix,
    info_set: Vec<usize>,
    info_inverse: Matrix,
    rs_dimension: Option<usize>,
}

/// JSON form: `{q, generator: [[..]], parity_check: [[..]]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CodeSpec {
    pub q: u32,
    pub generator: Vec<Vec<u32>>,
    pub parity_check: Vec<Vec<u32>>,
}

impl LinearCode {
    /// Builds the code generated by `g`, computing a parity-check matrix.
    pub fn from_generator(g: Matrix) -> Result<Self> {
        let h = g.null_space();
        Self::from_parts(g, h)
    }

    /// Builds the code with parity-check matrix `h`.
    pub fn from_parity_check(h: Matrix) -> Result<Self> {
        let g = h.null_space();
        Self::from_parts(g, h)
    }

    /// Validates ranks and `G H^T = 0`.
    pub fn from_parts(g: Matrix, h: Matrix) -> Result<Self> {
        let n = g.cols();
        let k = g.rows();
        if g.field() != h.field() {
            return Err(Error::MixedModuli(g.field().q(), h.field().q()));
        }
        if k == 0 || k >= n {
            return Err(Error::InvalidCode(format!("dimension {k} must satisfy 1 <= k < n = {n}")));
        }
        if h.cols() != n || h.rows() != n - k {
            return Err(Error::InvalidCode(format!(
                "parity-check matrix is {}x{}, expected {}x{n}",
                h.rows(),
                h.cols(),
                n - k
            )));
        }
        if g.rank() != k {
            return Err(Error::InvalidCode("generator matrix is not full rank".into()));
        }
        if h.rank() != n - k {
            return Err(Error::InvalidCode("parity-check matrix is not full rank".into()));
        }
        if !g.mul(&h.transpose())?.is_zero() {
            return Err(Error::InvalidCode("G H^T is not zero".into()));
        }
        let (_, info_set) = g.rref();
        let info_inverse = g.select_columns(&info_set).inverse().expect("information set is invertible");
        Ok(Self { generator: g, parity_check: h, info_set, info_inverse, rs_dimension: None })
    }

    pub fn from_spec(spec: &CodeSpec) -> Result<Self> {
        let f = Fq::new(spec.q)?;
        Self::from_parts(Matrix::from_rows(f, &spec.generator)?, Matrix::from_rows(f, &spec.parity_check)?)
    }

    pub fn to_spec(&self) -> CodeSpec {
        CodeSpec {
            q: self.q(),
            generator: self.generator.to_rows(),
            parity_check: self.parity_check.to_rows(),
        }
    }

    /// Uniformly random `[n, k]` code (rejection-sampled until full rank).
    pub fn random<R: Rng + ?Sized>(field: Fq, n: usize, k: usize, rng: &mut R) -> Result<Self> {
        if k == 0 || k >= n {
            return Err(Error::InvalidCode(format!("dimension {k} must satisfy 1 <= k < n = {n}")));
        }
        loop {
            let rows: Vec<Vec<u32>> =
                (0..k).map(|_| (0..n).map(|_| rng.gen_range(0..field.q())).collect()).collect();
            let g = Matrix::from_rows(field, &rows)?;
            if g.rank() == k {
                return Self::from_generator(g);
            }
        }
    }

    pub fn field(&self) -> Fq {
        self.generator.field()
    }

    pub fn q(&self) -> u32 {
        self.field().q()
    }

    pub fn n(&self) -> usize {
        self.generator.cols()
    }

    pub fn k(&self) -> usize {
        self.generator.rows()
    }

    pub fn generator(&self) -> &Matrix {
        &self.generator
    }

    pub fn parity_check(&self) -> &Matrix {
        &self.parity_check
    }

    /// `Some(d)` when this is the full-support Reed-Solomon code `RS_d`.
    pub fn rs_dimension(&self) -> Option<usize> {
        self.rs_dimension
    }

    pub fn encode(&self, msg: &[u32]) -> Vec<u32> {
        self.generator.vec_mul(msg)
    }

    /// Codeword for the message with mixed-radix index `m`.
    pub fn encode_index(&self, m: usize) -> Vec<u32> {
        self.encode(&decode_index(m, self.k(), self.q()))
    }

    /// Message `s` with `s G = c`, or `None` when `c` is not a codeword.
    pub fn message_of(&self, c: &[u32]) -> Option<Vec<u32>> {
        let restricted: Vec<u32> = self.info_set.iter().map(|&j| c[j]).collect();
        let msg = self.info_inverse.vec_mul(&restricted);
        (self.encode(&msg) == c).then_some(msg)
    }

    pub fn contains(&self, y: &[u32]) -> bool {
        self.parity_check.mul_vec(y).iter().all(|&v| v == 0)
    }

    /// All `q^k` codewords in message-index order.
    pub fn codewords(&self, budget: &Budget) -> Result<Vec<Vec<u32>>> {
        let count = budget.check(self.q(), self.k())?;
        Ok((0..count).map(|m| self.encode_index(m)).collect())
    }

    /// The dual code: generator and parity-check roles swapped.
    pub fn dual(&self) -> Result<LinearCode> {
        let mut d = LinearCode::from_parts(self.parity_check.clone(), self.generator.clone())?;
        d.rs_dimension = self.rs_dimension.map(|k| self.n() - k);
        Ok(d)
    }

    /// `H y^T` (primal) or `G y^T` (dual).
    pub fn syndrome(&self, y: &FieldVector, side: Side) -> Result<FieldVector> {
        if y.len() != self.n() {
            return Err(Error::LengthMismatch { expected: self.n(), got: y.len() });
        }
        if y.field != self.field() {
            return Err(Error::MixedModuli(self.q(), y.field.q()));
        }
        let m = match side {
            Side::Primal => &self.parity_check,
            Side::Dual => &self.generator,
        };
        Ok(FieldVector { field: self.field(), coords: m.mul_vec(&y.coords) })
    }

    pub fn syndrome_len(&self, side: Side) -> usize {
        match side {
            Side::Primal => self.n() - self.k(),
            Side::Dual => self.k(),
        }
    }

    /// Uniform element of the coset with syndrome `u`: a Gaussian-elimination
    /// particular solution plus a uniform element of the kernel.
    pub fn coset_sample<R: Rng + ?Sized>(&self, u: &FieldVector, side: Side, rng: &mut R) -> Result<FieldVector> {
        if u.len() != self.syndrome_len(side) {
            return Err(Error::LengthMismatch { expected: self.syndrome_len(side), got: u.len() });
        }
        let (system, kernel) = match side {
            Side::Primal => (&self.parity_check, &self.generator),
            Side::Dual => (&self.generator, &self.parity_check),
        };
        let particular = system.solve(&u.coords).expect("full-rank system is always consistent");
        let coeffs: Vec<u32> = (0..kernel.rows()).map(|_| rng.gen_range(0..self.q())).collect();
        let shift = kernel.vec_mul(&coeffs);
        let f = self.field();
        let coords = particular.iter().zip(&shift).map(|(&a, &b)| f.add(a, b)).collect();
        Ok(FieldVector { field: f, coords })
    }
}

/// A coset `C_u` or `C^perp_u`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coset {
    pub side: Side,
    pub syndrome: FieldVector,
}

impl Coset {
    pub fn contains(&self, code: &LinearCode, y: &FieldVector) -> Result<bool> {
        Ok(code.syndrome(y, self.side)? == self.syndrome)
    }
}

/// Full-support Reed-Solomon code `RS_k` over F_q, with evaluation points in
/// ascending residue order and generator row `i` equal to `(a^i)_a`.
pub fn rs_code(q: u32, k: usize) -> Result<LinearCode> {
    let field = Fq::new(q)?;
    if k == 0 || k >= q as usize {
        return Err(Error::InvalidCode(format!("RS dimension {k} must satisfy 1 <= k < q = {q}")));
    }
    let rows: Vec<Vec<u32>> =
        (0..k).map(|i| field.elements().map(|a| field.pow(a, i as u64)).collect()).collect();
    let mut code = LinearCode::from_generator(Matrix::from_rows(field, &rows)?)?;
    code.rs_dimension = Some(k);
    Ok(code)
}
