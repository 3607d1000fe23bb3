//! Exact integer and rational matrices.
//!
//! Row-major storage, column-action convention: a matrix `A` acts on column
//! vectors, so `A e_j` is the j-th column. Integer matrices use
//! arbitrary-precision entries; rational matrices keep every entry in lowest
//! terms with positive denominator (guaranteed by `BigRational`). All
//! operations are pure and exact.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatrixError {
    /// Inner dimensions do not match for a product or application.
    DimensionMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },
    /// Operation requires a square matrix.
    NotSquare { rows: usize, cols: usize },
    /// Matrix is singular where an invertible one is required.
    Singular,
    /// Rows of unequal length, or no rows at all.
    BadShape,
}

impl fmt::Display for MatrixError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixError::DimensionMismatch { expected, got } => write!(
                f,
                "dimension mismatch: expected {}x{}, got {}x{}",
                expected.0, expected.1, got.0, got.1
            ),
            MatrixError::NotSquare { rows, cols } => {
                write!(f, "matrix must be square, got {rows}x{cols}")
            }
            MatrixError::Singular => write!(f, "matrix is singular"),
            MatrixError::BadShape => write!(f, "rows must be non-empty and of equal length"),
        }
    }
}

impl std::error::Error for MatrixError {}

// ---------------------------------------------------------------------------
// IntMatrix
// ---------------------------------------------------------------------------

/// Dense matrix with arbitrary-precision integer entries.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    n_rows: usize,
    n_cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: Vec<Vec<BigInt>>) -> Result<Self, MatrixError> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(MatrixError::BadShape);
        }
        let n_cols = rows[0].len();
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(MatrixError::BadShape);
        }
        let n_rows = rows.len();
        let entries = rows.into_iter().flatten().collect();
        Ok(IntMatrix {
            n_rows,
            n_cols,
            entries,
        })
    }

    /// Convenience constructor from machine integers. Panics on ragged input.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        Self::new(rows).expect("from_i64: ragged or empty input")
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.entries[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn zero(n_rows: usize, n_cols: usize) -> Self {
        IntMatrix {
            n_rows,
            n_cols,
            entries: vec![BigInt::zero(); n_rows * n_cols],
        }
    }

    pub fn diag(entries: &[i64]) -> Self {
        let n = entries.len();
        let mut m = Self::zero(n, n);
        for (i, &d) in entries.iter().enumerate() {
            m.entries[i * n + i] = BigInt::from(d);
        }
        m
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.n_cols + j]
    }

    pub fn set_entry(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.n_cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn col(&self, j: usize) -> Vec<BigInt> {
        (0..self.n_rows).map(|i| self.entry(i, j).clone()).collect()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[BigInt]> {
        self.entries.chunks(self.n_cols)
    }

    /// Exact matrix product under the column-action convention.
    pub fn mul(&self, rhs: &IntMatrix) -> Result<IntMatrix, MatrixError> {
        if self.n_cols != rhs.n_rows {
            return Err(MatrixError::DimensionMismatch {
                expected: (self.n_cols, rhs.n_rows),
                got: (rhs.n_rows, rhs.n_cols),
            });
        }
        let mut out = IntMatrix::zero(self.n_rows, rhs.n_cols);
        for i in 0..self.n_rows {
            for k in 0..self.n_cols {
                let a = self.entry(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.n_cols {
                    let term = a * rhs.entry(k, j);
                    let e = &mut out.entries[i * rhs.n_cols + j];
                    *e += term;
                }
            }
        }
        Ok(out)
    }

    /// Exact power by binary exponentiation; `A^0 = I`.
    pub fn pow(&self, k: u64) -> Result<IntMatrix, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NotSquare {
                rows: self.n_rows,
                cols: self.n_cols,
            });
        }
        let mut result = IntMatrix::identity(self.n_rows);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    /// Apply to a column vector.
    pub fn apply(&self, v: &[BigInt]) -> Result<Vec<BigInt>, MatrixError> {
        if v.len() != self.n_cols {
            return Err(MatrixError::DimensionMismatch {
                expected: (self.n_cols, 1),
                got: (v.len(), 1),
            });
        }
        Ok((0..self.n_rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .map(|(a, x)| a * x)
                    .sum::<BigInt>()
            })
            .collect())
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut out = IntMatrix::zero(self.n_cols, self.n_rows);
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                out.entries[j * self.n_rows + i] = self.entry(i, j).clone();
            }
        }
        out
    }

    /// Entrywise absolute value of the transpose.
    pub fn abs_transpose(&self) -> IntMatrix {
        let mut out = self.transpose();
        for e in &mut out.entries {
            if e.is_negative() {
                *e = -&*e;
            }
        }
        out
    }

    /// Sum of absolute values of all entries.
    pub fn l1_norm(&self) -> BigInt {
        self.entries.iter().map(|e| e.abs()).sum()
    }

    pub fn trace(&self) -> Result<BigInt, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NotSquare {
                rows: self.n_rows,
                cols: self.n_cols,
            });
        }
        Ok((0..self.n_rows).map(|i| self.entry(i, i).clone()).sum())
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Result<BigInt, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NotSquare {
                rows: self.n_rows,
                cols: self.n_cols,
            });
        }
        let n = self.n_rows;
        let mut m: Vec<Vec<BigInt>> = (0..n).map(|i| self.row(i).to_vec()).collect();
        let mut sign = 1i32;
        let mut prev = BigInt::one();
        for k in 0..n {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                    Some(i) => {
                        m.swap(k, i);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &m[k][k] * &m[i][j] - &m[i][k] * &m[k][j];
                    m[i][j] = num / &prev; // exact by Bareiss
                }
                m[i][k] = BigInt::zero();
            }
            prev = m[k][k].clone();
        }
        let d = m[n - 1][n - 1].clone();
        Ok(if sign < 0 { -d } else { d })
    }

    /// Monic characteristic polynomial, coefficients ascending
    /// (constant term first, leading 1 last).
    pub fn char_poly(&self) -> Result<Vec<BigInt>, MatrixError> {
        let rat = self.to_rat().char_poly()?;
        Ok(rat
            .into_iter()
            .map(|c| {
                debug_assert!(c.denom().is_one());
                c.to_integer()
            })
            .collect())
    }

    pub fn rank(&self) -> usize {
        self.to_rat().rank()
    }

    pub fn to_rat(&self) -> RatMatrix {
        RatMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            entries: self
                .entries
                .iter()
                .map(|e| BigRational::from_integer(e.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> IntMatrix {
        IntMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            entries: self.entries.iter().map(|e| e * c).collect(),
        }
    }

    pub fn add(&self, rhs: &IntMatrix) -> Result<IntMatrix, MatrixError> {
        if self.n_rows != rhs.n_rows || self.n_cols != rhs.n_cols {
            return Err(MatrixError::DimensionMismatch {
                expected: (self.n_rows, self.n_cols),
                got: (rhs.n_rows, rhs.n_cols),
            });
        }
        Ok(IntMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n_rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.n_cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.entry(i, j))?;
            }
        }
        write!(f, "]")
    }
}

// ---------------------------------------------------------------------------
// RatMatrix
// ---------------------------------------------------------------------------

/// Dense matrix with arbitrary-precision rational entries, each stored in
/// lowest terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMatrix {
    n_rows: usize,
    n_cols: usize,
    entries: Vec<BigRational>,
}

impl RatMatrix {
    pub fn new(rows: Vec<Vec<BigRational>>) -> Result<Self, MatrixError> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(MatrixError::BadShape);
        }
        let n_cols = rows[0].len();
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(MatrixError::BadShape);
        }
        let n_rows = rows.len();
        Ok(RatMatrix {
            n_rows,
            n_cols,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.entries[i * n + i] = BigRational::one();
        }
        m
    }

    pub fn zero(n_rows: usize, n_cols: usize) -> Self {
        RatMatrix {
            n_rows,
            n_cols,
            entries: vec![BigRational::zero(); n_rows * n_cols],
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.n_cols + j]
    }

    pub fn set_entry(&mut self, i: usize, j: usize, v: BigRational) {
        self.entries[i * self.n_cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.entries[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn col(&self, j: usize) -> Vec<BigRational> {
        (0..self.n_rows).map(|i| self.entry(i, j).clone()).collect()
    }

    pub fn mul(&self, rhs: &RatMatrix) -> Result<RatMatrix, MatrixError> {
        if self.n_cols != rhs.n_rows {
            return Err(MatrixError::DimensionMismatch {
                expected: (self.n_cols, rhs.n_rows),
                got: (rhs.n_rows, rhs.n_cols),
            });
        }
        let mut out = RatMatrix::zero(self.n_rows, rhs.n_cols);
        for i in 0..self.n_rows {
            for k in 0..self.n_cols {
                let a = self.entry(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.n_cols {
                    let term = a * rhs.entry(k, j);
                    let e = &mut out.entries[i * rhs.n_cols + j];
                    *e += term;
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u64) -> Result<RatMatrix, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NotSquare {
                rows: self.n_rows,
                cols: self.n_cols,
            });
        }
        let mut result = RatMatrix::identity(self.n_rows);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    pub fn apply(&self, v: &[BigRational]) -> Result<Vec<BigRational>, MatrixError> {
        if v.len() != self.n_cols {
            return Err(MatrixError::DimensionMismatch {
                expected: (self.n_cols, 1),
                got: (v.len(), 1),
            });
        }
        Ok((0..self.n_rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .map(|(a, x)| a * x)
                    .sum::<BigRational>()
            })
            .collect())
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut out = RatMatrix::zero(self.n_cols, self.n_rows);
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                out.entries[j * self.n_rows + i] = self.entry(i, j).clone();
            }
        }
        out
    }

    pub fn add(&self, rhs: &RatMatrix) -> Result<RatMatrix, MatrixError> {
        if self.n_rows != rhs.n_rows || self.n_cols != rhs.n_cols {
            return Err(MatrixError::DimensionMismatch {
                expected: (self.n_rows, self.n_cols),
                got: (rhs.n_rows, rhs.n_cols),
            });
        }
        Ok(RatMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn scale(&self, c: &BigRational) -> RatMatrix {
        RatMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            entries: self.entries.iter().map(|e| e * c).collect(),
        }
    }

    /// Exact rank by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut m: Vec<Vec<BigRational>> = (0..self.n_rows).map(|i| self.row(i).to_vec()).collect();
        let mut rank = 0;
        let mut col = 0;
        while rank < self.n_rows && col < self.n_cols {
            match (rank..self.n_rows).find(|&i| !m[i][col].is_zero()) {
                None => {
                    col += 1;
                    continue;
                }
                Some(p) => {
                    m.swap(rank, p);
                    let pivot = m[rank][col].clone();
                    for j in col..self.n_cols {
                        let v = &m[rank][j] / &pivot;
                        m[rank][j] = v;
                    }
                    for i in 0..self.n_rows {
                        if i != rank && !m[i][col].is_zero() {
                            let factor = m[i][col].clone();
                            for j in col..self.n_cols {
                                let v = &m[i][j] - &factor * &m[rank][j];
                                m[i][j] = v;
                            }
                        }
                    }
                    rank += 1;
                    col += 1;
                }
            }
        }
        rank
    }

    pub fn det(&self) -> Result<BigRational, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NotSquare {
                rows: self.n_rows,
                cols: self.n_cols,
            });
        }
        let n = self.n_rows;
        let mut m: Vec<Vec<BigRational>> = (0..n).map(|i| self.row(i).to_vec()).collect();
        let mut det = BigRational::one();
        for k in 0..n {
            match (k..n).find(|&i| !m[i][k].is_zero()) {
                None => return Ok(BigRational::zero()),
                Some(p) => {
                    if p != k {
                        m.swap(k, p);
                        det = -det;
                    }
                }
            }
            let pivot = m[k][k].clone();
            det *= &pivot;
            for i in k + 1..n {
                if m[i][k].is_zero() {
                    continue;
                }
                let factor = &m[i][k] / &pivot;
                for j in k..n {
                    let v = &m[i][j] - &factor * &m[k][j];
                    m[i][j] = v;
                }
            }
        }
        Ok(det)
    }

    /// Exact inverse; `Err(Singular)` when the determinant vanishes.
    pub fn inverse(&self) -> Result<RatMatrix, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NotSquare {
                rows: self.n_rows,
                cols: self.n_cols,
            });
        }
        let n = self.n_rows;
        let mut m: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                let mut row = self.row(i).to_vec();
                row.extend((0..n).map(|j| {
                    if i == j {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                }));
                row
            })
            .collect();
        for k in 0..n {
            let p = (k..n)
                .find(|&i| !m[i][k].is_zero())
                .ok_or(MatrixError::Singular)?;
            m.swap(k, p);
            let pivot = m[k][k].clone();
            for j in 0..2 * n {
                let v = &m[k][j] / &pivot;
                m[k][j] = v;
            }
            for i in 0..n {
                if i != k && !m[i][k].is_zero() {
                    let factor = m[i][k].clone();
                    for j in 0..2 * n {
                        let v = &m[i][j] - &factor * &m[k][j];
                        m[i][j] = v;
                    }
                }
            }
        }
        let rows = m.into_iter().map(|r| r[n..].to_vec()).collect();
        RatMatrix::new(rows)
    }

    /// Solve `A x = b` for the unique solution when the columns of `A` are
    /// linearly independent. Returns `None` when the system is inconsistent.
    pub fn solve(&self, b: &[BigRational]) -> Result<Option<Vec<BigRational>>, MatrixError> {
        if b.len() != self.n_rows {
            return Err(MatrixError::DimensionMismatch {
                expected: (self.n_rows, 1),
                got: (b.len(), 1),
            });
        }
        let rows = self.n_rows;
        let cols = self.n_cols;
        let mut m: Vec<Vec<BigRational>> = (0..rows)
            .map(|i| {
                let mut row = self.row(i).to_vec();
                row.push(b[i].clone());
                row
            })
            .collect();
        let mut pivot_cols = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            match (r..rows).find(|&i| !m[i][c].is_zero()) {
                None => continue,
                Some(p) => {
                    m.swap(r, p);
                    let pivot = m[r][c].clone();
                    for j in c..=cols {
                        let v = &m[r][j] / &pivot;
                        m[r][j] = v;
                    }
                    for i in 0..rows {
                        if i != r && !m[i][c].is_zero() {
                            let factor = m[i][c].clone();
                            for j in c..=cols {
                                let v = &m[i][j] - &factor * &m[r][j];
                                m[i][j] = v;
                            }
                        }
                    }
                    pivot_cols.push(c);
                    r += 1;
                }
            }
        }
        // Inconsistent if a zero row has nonzero right-hand side.
        for i in r..rows {
            if !m[i][cols].is_zero() {
                return Ok(None);
            }
        }
        // Free columns mean the solution is not unique; callers guarantee
        // independent columns, so treat it as a usage bug.
        if pivot_cols.len() != cols {
            return Err(MatrixError::Singular);
        }
        let mut x = vec![BigRational::zero(); cols];
        for (row_idx, &c) in pivot_cols.iter().enumerate() {
            x[c] = m[row_idx][cols].clone();
        }
        Ok(Some(x))
    }

    /// Basis of the right null space `{ x : A x = 0 }`.
    pub fn null_space_basis(&self) -> Vec<Vec<BigRational>> {
        let rows = self.n_rows;
        let cols = self.n_cols;
        let mut m: Vec<Vec<BigRational>> = (0..rows).map(|i| self.row(i).to_vec()).collect();
        let mut pivot_of_col: Vec<Option<usize>> = vec![None; cols];
        let mut r = 0;
        for c in 0..cols {
            if r >= rows {
                break;
            }
            match (r..rows).find(|&i| !m[i][c].is_zero()) {
                None => continue,
                Some(p) => {
                    m.swap(r, p);
                    let pivot = m[r][c].clone();
                    for j in c..cols {
                        let v = &m[r][j] / &pivot;
                        m[r][j] = v;
                    }
                    for i in 0..rows {
                        if i != r && !m[i][c].is_zero() {
                            let factor = m[i][c].clone();
                            for j in c..cols {
                                let v = &m[i][j] - &factor * &m[r][j];
                                m[i][j] = v;
                            }
                        }
                    }
                    pivot_of_col[c] = Some(r);
                    r += 1;
                }
            }
        }
        let mut basis = Vec::new();
        for free in 0..cols {
            if pivot_of_col[free].is_some() {
                continue;
            }
            let mut x = vec![BigRational::zero(); cols];
            x[free] = BigRational::one();
            for c in 0..cols {
                if let Some(row_idx) = pivot_of_col[c] {
                    x[c] = -m[row_idx][free].clone();
                }
            }
            basis.push(x);
        }
        basis
    }

    /// Monic characteristic polynomial by the Faddeev–LeVerrier recurrence,
    /// coefficients ascending.
    pub fn char_poly(&self) -> Result<Vec<BigRational>, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NotSquare {
                rows: self.n_rows,
                cols: self.n_cols,
            });
        }
        let n = self.n_rows;
        let mut coeffs = vec![BigRational::zero(); n + 1];
        coeffs[n] = BigRational::one();
        let mut m = RatMatrix::zero(n, n);
        for k in 1..=n {
            // M_k = A*M_{k-1} + c_{n-k+1} * I
            let mut am = self.mul(&m)?;
            for i in 0..n {
                let v = am.entry(i, i) + &coeffs[n - k + 1];
                am.set_entry(i, i, v);
            }
            m = am;
            let t: BigRational = {
                let prod = self.mul(&m)?;
                (0..n).map(|i| prod.entry(i, i).clone()).sum()
            };
            coeffs[n - k] = -t / BigRational::from_integer(BigInt::from(k as i64));
        }
        Ok(coeffs)
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(|e| e.denom().is_one())
    }

    pub fn to_int(&self) -> Option<IntMatrix> {
        if !self.is_integral() {
            return None;
        }
        Some(IntMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            entries: self.entries.iter().map(|e| e.to_integer()).collect(),
        })
    }

    /// Smallest positive integer `m` with `m * A` integral.
    pub fn denominator_lcm(&self) -> BigInt {
        self.entries
            .iter()
            .fold(BigInt::one(), |acc, e| acc.lcm(e.denom()))
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n_rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.n_cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.entry(i, j))?;
            }
        }
        write!(f, "]")
    }
}

// ---------------------------------------------------------------------------
// Lattice basis (column Hermite form)
// ---------------------------------------------------------------------------

/// Basis of the lattice spanned by the given integer vectors, as the columns
/// of a square matrix. Errors unless the span has full rank.
pub fn lattice_basis(dim: usize, generators: &[Vec<BigInt>]) -> Result<IntMatrix, MatrixError> {
    if generators.iter().any(|g| g.len() != dim) {
        return Err(MatrixError::BadShape);
    }
    // Column-style Hermite reduction: entries[i][j] is coordinate i of
    // generator j; eliminate below-diagonal rows with gcd column ops.
    let mut cols: Vec<Vec<BigInt>> = generators.to_vec();
    let mut basis: Vec<Vec<BigInt>> = Vec::new();
    for row in 0..dim {
        // Reduce all columns so that at most one has a nonzero entry at `row`.
        loop {
            let mut nonzero: Vec<usize> = (0..cols.len())
                .filter(|&j| !cols[j][row].is_zero())
                .collect();
            if nonzero.len() <= 1 {
                break;
            }
            // Pick the column with the smallest nonzero |entry| and reduce
            // the rest; truncated division leaves |remainder| < |pivot|.
            nonzero.sort_by_key(|&j| cols[j][row].abs());
            let pivot = nonzero[0];
            for &j in &nonzero[1..] {
                let q = &cols[j][row] / &cols[pivot][row];
                for i in 0..dim {
                    let v = &cols[j][i] - &q * &cols[pivot][i];
                    cols[j][i] = v;
                }
            }
        }
        if let Some(j) = (0..cols.len()).find(|&j| !cols[j][row].is_zero()) {
            let mut c = cols.remove(j);
            if c[row].is_negative() {
                for e in &mut c {
                    *e = -&*e;
                }
            }
            basis.push(c);
        }
    }
    if basis.len() != dim {
        return Err(MatrixError::Singular);
    }
    // Assemble: column k of the result is basis[k].
    let mut m = IntMatrix::zero(dim, dim);
    for (k, b) in basis.iter().enumerate() {
        for i in 0..dim {
            m.set_entry(i, k, b[i].clone());
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn a_unstable() -> IntMatrix {
        IntMatrix::from_i64(&[&[-1, -2], &[2, 0]])
    }

    #[test]
    fn identity_times_anything() {
        let m = a_unstable();
        let i = IntMatrix::identity(2);
        assert_eq!(i.mul(&m).unwrap(), m);
        assert_eq!(m.mul(&i).unwrap(), m);
    }

    #[test]
    fn hand_multiplied_square() {
        let a = a_unstable();
        let expected = IntMatrix::from_i64(&[&[-3, 2], &[-2, -4]]);
        assert_eq!(a.mul(&a).unwrap(), expected);
    }

    #[test]
    fn column_extraction() {
        let a = IntMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        let v = vec![BigInt::from(1), BigInt::from(0)];
        assert_eq!(a.apply(&v).unwrap(), vec![BigInt::from(2), BigInt::from(1)]);
    }

    #[test]
    fn pow_zero_is_identity() {
        let a = a_unstable();
        assert_eq!(a.pow(0).unwrap(), IntMatrix::identity(2));
    }

    #[test]
    fn pow_two_matches_repeated_mul() {
        let a = a_unstable();
        assert_eq!(a.pow(2).unwrap(), a.mul(&a).unwrap());
    }

    #[test]
    fn diagonal_pow() {
        let a = IntMatrix::diag(&[-3, 2]);
        assert_eq!(a.pow(3).unwrap(), IntMatrix::diag(&[-27, 8]));
    }

    #[test]
    fn pow_additivity_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let rows: Vec<Vec<BigInt>> = (0..3)
                .map(|_| (0..3).map(|_| BigInt::from(rng.gen_range(-3..=3))).collect())
                .collect();
            let a = IntMatrix::new(rows).unwrap();
            let j = rng.gen_range(0..=8u64);
            let k = rng.gen_range(0..=8u64);
            let lhs = a.pow(j + k).unwrap();
            let rhs = a.pow(j).unwrap().mul(&a.pow(k).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn char_poly_identity() {
        // x^2 - 2x + 1
        let p = IntMatrix::identity(2).char_poly().unwrap();
        assert_eq!(p, vec![BigInt::from(1), BigInt::from(-2), BigInt::from(1)]);
    }

    #[test]
    fn char_poly_trace_det() {
        // trace -1, det 4 -> x^2 + x + 4
        let p = a_unstable().char_poly().unwrap();
        assert_eq!(p, vec![BigInt::from(4), BigInt::from(1), BigInt::from(1)]);
    }

    #[test]
    fn char_poly_diagonal() {
        // (x+3)^2 (x-2) = x^3 + 4x^2 - 3x - 18
        let p = IntMatrix::diag(&[-3, -3, 2]).char_poly().unwrap();
        assert_eq!(
            p,
            vec![
                BigInt::from(-18),
                BigInt::from(-3),
                BigInt::from(4),
                BigInt::from(1)
            ]
        );
    }

    #[test]
    fn cayley_hamilton_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 2..=5usize {
            for _ in 0..4 {
                let rows: Vec<Vec<BigInt>> = (0..n)
                    .map(|_| (0..n).map(|_| BigInt::from(rng.gen_range(-4..=4))).collect())
                    .collect();
                let a = IntMatrix::new(rows).unwrap();
                let coeffs = a.char_poly().unwrap();
                let mut acc = IntMatrix::zero(n, n);
                for (k, c) in coeffs.iter().enumerate() {
                    acc = acc.add(&a.pow(k as u64).unwrap().scale(c)).unwrap();
                }
                assert_eq!(acc, IntMatrix::zero(n, n));
            }
        }
    }

    #[test]
    fn det_matches_char_poly_constant() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for n in 1..=4usize {
            for _ in 0..6 {
                let rows: Vec<Vec<BigInt>> = (0..n)
                    .map(|_| (0..n).map(|_| BigInt::from(rng.gen_range(-5..=5))).collect())
                    .collect();
                let a = IntMatrix::new(rows).unwrap();
                let det = a.det().unwrap();
                let c0 = a.char_poly().unwrap()[0].clone();
                // char(0) = det(-A) = (-1)^n det(A)
                let expected = if n % 2 == 0 { det } else { -det };
                assert_eq!(c0, expected);
            }
        }
    }

    #[test]
    fn inverse_round_trip() {
        let a = a_unstable().to_rat();
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), RatMatrix::identity(2));
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        // Columns (-1,-1) and (0,1): solve for (-1,2) -> (1,3).
        let g = RatMatrix::new(vec![
            vec![
                BigRational::from_integer(BigInt::from(-1)),
                BigRational::from_integer(BigInt::from(0)),
            ],
            vec![
                BigRational::from_integer(BigInt::from(-1)),
                BigRational::from_integer(BigInt::from(1)),
            ],
        ])
        .unwrap();
        let b = vec![
            BigRational::from_integer(BigInt::from(-1)),
            BigRational::from_integer(BigInt::from(2)),
        ];
        let x = g.solve(&b).unwrap().unwrap();
        assert_eq!(x[0], BigRational::from_integer(BigInt::from(1)));
        assert_eq!(x[1], BigRational::from_integer(BigInt::from(3)));

        // Single column (1,0): (0,1) is outside the column space.
        let g2 = RatMatrix::new(vec![
            vec![BigRational::from_integer(BigInt::from(1))],
            vec![BigRational::from_integer(BigInt::from(0))],
        ])
        .unwrap();
        let b2 = vec![
            BigRational::from_integer(BigInt::from(0)),
            BigRational::from_integer(BigInt::from(1)),
        ];
        assert!(g2.solve(&b2).unwrap().is_none());
    }

    #[test]
    fn dimension_mismatch_reported() {
        let a = IntMatrix::from_i64(&[&[1, 2]]);
        let b = IntMatrix::from_i64(&[&[1, 2]]);
        assert!(matches!(
            a.mul(&b),
            Err(MatrixError::DimensionMismatch { .. })
        ));
        let c = IntMatrix::from_i64(&[&[1, 2]]);
        assert!(matches!(c.pow(2), Err(MatrixError::NotSquare { .. })));
    }

    #[test]
    fn lattice_basis_weighted_example() {
        // Scaled generators of the weight (1,2,3) lattice: lcm = 6,
        // 6*e0/1 = (-6,-6), 6*e1/2 = (3,0), 6*e2/3 = (0,2).
        let gens = vec![
            vec![BigInt::from(-6), BigInt::from(-6)],
            vec![BigInt::from(3), BigInt::from(0)],
            vec![BigInt::from(0), BigInt::from(2)],
        ];
        let b = lattice_basis(2, &gens).unwrap();
        // Lattice is 3Z + 2Z... determinant must be |3*2| = 6 up to sign.
        assert_eq!(b.det().unwrap().abs(), BigInt::from(6));
        // Every generator must be an integer combination of the basis columns.
        let binv = b.to_rat().inverse().unwrap();
        for g in &gens {
            let gr: Vec<BigRational> = g
                .iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect();
            let coords = binv.apply(&gr).unwrap();
            assert!(coords.iter().all(|c| c.denom().is_one()));
        }
    }
}
