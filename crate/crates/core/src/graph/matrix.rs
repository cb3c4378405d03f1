//! Dense coupling matrices and the Kronecker product/sum.
//!
//! The Kronecker product here follows the block layout used throughout the
//! multiplex construction: block `(i, j)` of `a ⊗ b` is `a` scaled by
//! `b[i][j]`. That is the transpose-of-convention layout (textbook `b ⊗ a`).
//! [`kronecker_sum`] is built from the same product, so for `a = A_intra`
//! (`N×N`) and `b = A_inter` (`M×M`) the result has `A_intra` on its `M`
//! diagonal blocks and `ε_lk · I_N` off the diagonal, which is the
//! layer-major ordering of the phase vector.

use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Scalar};

/// Dense row-major real matrix holding coupling weights.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix<T>", bound = "T: Scalar")]
pub struct CouplingMatrix<T> {
    n_rows: usize,
    n_cols: usize,
    entries: Vec<T>,
}

#[derive(Deserialize)]
#[serde(bound = "T: Scalar")]
struct RawMatrix<T> {
    n_rows: usize,
    n_cols: usize,
    entries: Vec<T>,
}

impl<T: Scalar> TryFrom<RawMatrix<T>> for CouplingMatrix<T> {
    type Error = Error;

    fn try_from(raw: RawMatrix<T>) -> Result<Self> {
        CouplingMatrix::from_row_major(raw.n_rows, raw.n_cols, raw.entries)
    }
}

impl<T: fmt::Debug> fmt::Debug for CouplingMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CouplingMatrix {}x{} [", self.n_rows, self.n_cols)?;
        for row in self.entries.chunks(self.n_cols.max(1)) {
            write!(f, "  ")?;
            for x in row {
                write!(f, "{x:>10.4?} ")?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl<T: Scalar> CouplingMatrix<T> {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            entries: vec![T::zero(); n_rows * n_cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    /// Builds a matrix from row-major entries; rejects wrong lengths and
    /// non-finite values.
    pub fn from_row_major(n_rows: usize, n_cols: usize, entries: Vec<T>) -> Result<Self> {
        let expected = n_rows.checked_mul(n_cols).ok_or(Error::DimensionOverflow)?;
        if entries.len() != expected {
            return Err(Error::DimensionMismatch {
                context: "matrix entries",
                expected,
                found: entries.len(),
            });
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                context: "matrix entries",
            });
        }
        Ok(Self {
            n_rows,
            n_cols,
            entries,
        })
    }

    /// Builds a matrix from nested rows.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(n_rows * n_cols);
        for row in rows {
            if row.len() != n_cols {
                return Err(Error::DimensionMismatch {
                    context: "matrix row length",
                    expected: n_cols,
                    found: row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        Self::from_row_major(n_rows, n_cols, entries)
    }

    /// Convenience constructor from `f64` rows, converted into `T`.
    pub fn from_f64_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<T>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| lit(x)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    /// Row-major entries.
    #[inline]
    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[i * self.n_cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.entries[i * self.n_cols + j] = value;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.entries[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        // chunks_exact panics on a zero chunk size
        self.entries.chunks_exact(self.n_cols.max(1)).take(self.n_rows)
    }

    pub fn row_sums(&self) -> Vec<T> {
        self.rows().map(|r| r.iter().copied().sum()).collect()
    }

    pub fn scaled(&self, factor: T) -> Self {
        Self {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            entries: self.entries.iter().map(|&x| x * factor).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n_rows != other.n_rows || self.n_cols != other.n_cols {
            return Err(Error::DimensionMismatch {
                context: "matrix addition",
                expected: self.n_rows * self.n_cols,
                found: other.n_rows * other.n_cols,
            });
        }
        Ok(Self {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| a + b)
                .collect(),
        })
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n_cols, self.n_rows);
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn frobenius_norm(&self) -> T {
        self.entries.iter().map(|&x| x * x).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.entries
            .iter()
            .fold(T::zero(), |acc, &x| acc.max(x.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(
            (self.n_rows, self.n_cols),
            (other.n_rows, other.n_cols),
            "max_abs_diff requires equal shapes"
        );
        self.entries
            .iter()
            .zip(&other.entries)
            .fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs()))
    }

    /// Largest `|a_ij - a_ji|`; `None` for non-square matrices.
    pub fn max_asymmetry(&self) -> Option<T> {
        if !self.is_square() {
            return None;
        }
        let n = self.n_rows;
        let mut worst = T::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        Some(worst)
    }

    /// Exact symmetry: `a_ij == a_ji` bit for bit.
    pub fn is_symmetric(&self) -> bool {
        self.max_asymmetry() == Some(T::zero())
    }

    /// Errors unless the matrix is square and symmetric to the scalar's
    /// relative symmetry tolerance.
    pub fn ensure_symmetric(&self) -> Result<()> {
        let asym = self.max_asymmetry().ok_or(Error::NotSquare {
            rows: self.n_rows,
            cols: self.n_cols,
        })?;
        let scale = T::one().max(self.max_abs());
        if asym > lit::<T>(T::SYMMETRY_TOLERANCE) * scale {
            return Err(Error::NotSymmetric {
                max_asymmetry: to_f64(asym),
            });
        }
        Ok(())
    }

    pub fn has_zero_diagonal(&self) -> bool {
        (0..self.n_rows.min(self.n_cols)).all(|i| self.get(i, i) == T::zero())
    }

    /// Writes the matrix as dense CSV: one row per line, no header.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(|x| format!("{x}")).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }

    /// Reads a dense CSV written by [`write_csv`](Self::write_csv).
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut rows = Vec::new();
        for line in r.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let row = line
                .split(',')
                .map(|cell| {
                    cell.trim()
                        .parse::<f64>()
                        .map(lit::<T>)
                        .map_err(|e| Error::InvalidParameter {
                            name: "csv cell",
                            reason: format!("`{cell}`: {e}"),
                        })
                })
                .collect::<Result<Vec<T>>>()?;
            rows.push(row);
        }
        Self::from_rows(&rows)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Kronecker product with block `(i, j)` equal to `a · b[i][j]`.
///
/// For `a` of shape `p×q` and `b` of shape `r×s` the result is `(p·r)×(q·s)`.
pub fn kronecker_product<T: Scalar>(
    a: &CouplingMatrix<T>,
    b: &CouplingMatrix<T>,
) -> Result<CouplingMatrix<T>> {
    let (p, q) = (a.n_rows, a.n_cols);
    let (r, s) = (b.n_rows, b.n_cols);
    let rows = p.checked_mul(r).ok_or(Error::DimensionOverflow)?;
    let cols = q.checked_mul(s).ok_or(Error::DimensionOverflow)?;
    rows.checked_mul(cols).ok_or(Error::DimensionOverflow)?;

    let mut out = CouplingMatrix::zeros(rows, cols);
    for bi in 0..r {
        for bj in 0..s {
            let scale = b.get(bi, bj);
            if scale == T::zero() {
                continue;
            }
            for ai in 0..p {
                for aj in 0..q {
                    out.set(bi * p + ai, bj * q + aj, a.get(ai, aj) * scale);
                }
            }
        }
    }
    Ok(out)
}

/// Kronecker sum `a ⊗ I_m + I_n ⊗ b` for square `a` (`n×n`) and `b` (`m×m`).
///
/// This is the adjacency of the Cartesian product graph: `M = m` diagonal
/// blocks equal to `a` and off-diagonal block `(l, k)` equal to `b[l][k]·I_n`.
pub fn kronecker_sum<T: Scalar>(
    a: &CouplingMatrix<T>,
    b: &CouplingMatrix<T>,
) -> Result<CouplingMatrix<T>> {
    for m in [a, b] {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.n_rows,
                cols: m.n_cols,
            });
        }
    }
    let left = kronecker_product(a, &CouplingMatrix::identity(b.n_rows))?;
    let right = kronecker_product(&CouplingMatrix::identity(a.n_rows), b)?;
    left.add(&right)
}
