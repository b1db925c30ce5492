//! Dense exact matrices: fraction-free determinants and rational solves.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::ExactRational;

/// Row-major dense matrix of exact rationals.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<ExactRational>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix { rows, cols, data: vec![ExactRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, ExactRational::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> ExactRational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ExactMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &ExactRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: ExactRational) {
        self.data[i * self.cols + j] = value;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Leading `k x k` principal submatrix.
    pub fn leading(&self, k: usize) -> ExactMatrix {
        ExactMatrix::from_fn(k, k, |i, j| self.get(i, j).clone())
    }

    pub fn mul_vec(&self, v: &[ExactRational]) -> Result<Vec<ExactRational>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!("{}x{} matrix times vector of length {}", self.rows, self.cols, v.len())));
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).fold(ExactRational::zero(), |acc, j| acc + self.get(i, j) * &v[j]))
            .collect())
    }

    /// Integer matrix obtained by scaling each row by the lcm of its
    /// denominators, together with those scale factors.
    fn integer_rows(&self) -> (Vec<Vec<BigInt>>, Vec<BigInt>) {
        let mut scales = Vec::with_capacity(self.rows);
        let mut out = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            let lcm = row.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
            out.push(row.iter().map(|v| v.numer() * (&lcm / v.denom())).collect());
            scales.push(lcm);
        }
        (out, scales)
    }
}

/// One fraction-free elimination step on rows/cols below `k`.
fn bareiss_step(a: &mut [Vec<BigInt>], k: usize, prev: &BigInt) {
    let n = a.len();
    let (head, tail) = a.split_at_mut(k + 1);
    let pivot_row = &head[k];
    for row in tail.iter_mut() {
        let lead = row[k].clone();
        for j in (k + 1)..n {
            let updated = &row[j] * &pivot_row[k] - &lead * &pivot_row[j];
            // Sylvester's identity guarantees exact divisibility.
            row[j] = updated / prev;
        }
        row[k] = BigInt::zero();
    }
}

/// Exact determinant by Bareiss fraction-free elimination with row pivoting.
pub fn det_bareiss(m: &ExactMatrix) -> Result<ExactRational> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("determinant of a {}x{} matrix", m.rows, m.cols)));
    }
    let n = m.rows;
    if n == 0 {
        return Ok(ExactRational::one());
    }
    let (mut a, scales) = m.integer_rows();
    let mut prev = BigInt::one();
    let mut negate = false;
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    negate = !negate;
                }
                None => return Ok(ExactRational::zero()),
            }
        }
        if k + 1 < n {
            bareiss_step(&mut a, k, &prev);
        }
        prev = a[k][k].clone();
    }
    let scale = scales.iter().fold(BigInt::one(), |acc, s| acc * s);
    let det = BigRational::new(a[n - 1][n - 1].clone(), scale);
    Ok(if negate { -det } else { det })
}

/// All leading principal minors `det M[..k, ..k]` for `k = 1..=n`, from a
/// single pivot-free Bareiss pass. When a leading minor vanishes the
/// remaining minors are computed one by one with pivoting.
pub fn leading_minors(m: &ExactMatrix) -> Result<Vec<ExactRational>> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("leading minors of a {}x{} matrix", m.rows, m.cols)));
    }
    let n = m.rows;
    let (mut a, scales) = m.integer_rows();
    let mut minors = Vec::with_capacity(n);
    let mut prev = BigInt::one();
    let mut row_scale = BigInt::one();
    for k in 0..n {
        row_scale *= &scales[k];
        if a[k][k].is_zero() {
            minors.push(ExactRational::zero());
            for j in (k + 2)..=n {
                minors.push(det_bareiss(&m.leading(j))?);
            }
            return Ok(minors);
        }
        minors.push(BigRational::new(a[k][k].clone(), row_scale.clone()));
        if k + 1 < n {
            bareiss_step(&mut a, k, &prev);
        }
        prev = a[k][k].clone();
    }
    Ok(minors)
}

/// Solves `m x = b` exactly by Gauss-Jordan elimination over the rationals.
pub fn solve_exact(m: &ExactMatrix, b: &[ExactRational]) -> Result<Vec<ExactRational>> {
    if !m.is_square() || b.len() != m.rows {
        return Err(Error::Dimension(format!("solve with {}x{} matrix and rhs of length {}", m.rows, m.cols, b.len())));
    }
    let n = m.rows;
    let mut aug: Vec<Vec<ExactRational>> = (0..n)
        .map(|i| {
            let mut row: Vec<ExactRational> = (0..n).map(|j| m.get(i, j).clone()).collect();
            row.push(b[i].clone());
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&i| !aug[i][col].is_zero()).ok_or(Error::Singular)?;
        aug.swap(col, pivot);
        let inv = aug[col][col].recip();
        for v in aug[col].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = aug[col].clone();
        for (i, row) in aug.iter_mut().enumerate() {
            if i == col || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                *v -= &factor * p;
            }
        }
    }
    Ok(aug.into_iter().map(|mut row| row.pop().unwrap_or_default()).collect())
}

pub fn dot(a: &[ExactRational], b: &[ExactRational]) -> ExactRational {
    a.iter().zip(b).fold(ExactRational::zero(), |acc, (x, y)| acc + x * y)
}
