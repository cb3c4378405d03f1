//! Dense symmetric eigensolver (cyclic Jacobi rotations).
//!
//! Each sweep visits every upper-triangle pair `(p, q)` and applies the plane
//! rotation that annihilates `a_pq`. Sweeps stop once the off-diagonal
//! Frobenius mass drops below `T::EIGEN_TOLERANCE · ‖A‖_F`.

use crate::error::{Error, Result};
use crate::graph::matrix::CouplingMatrix;
use crate::scalar::{lit, to_f64, Scalar};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues (ascending) and matching orthonormal eigenvectors.
#[derive(Clone, Debug)]
pub struct SymmetricEigen<T> {
    pub values: Vec<T>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: CouplingMatrix<T>,
    pub sweeps: usize,
}

impl<T: Scalar> SymmetricEigen<T> {
    /// `V · diag(values) · Vᵀ`.
    pub fn reconstruct(&self) -> CouplingMatrix<T> {
        let n = self.values.len();
        let v = &self.vectors;
        let mut out = CouplingMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = T::zero();
                for k in 0..n {
                    acc = acc + v.get(i, k) * self.values[k] * v.get(j, k);
                }
                out.set(i, j, acc);
            }
        }
        out
    }
}

/// Sorted (ascending) eigenvalues of a symmetric matrix.
pub fn spectrum_sym<T: Scalar>(a: &CouplingMatrix<T>) -> Result<Vec<T>> {
    Ok(jacobi(a, false)?.0)
}

/// Full eigen-decomposition of a symmetric matrix.
pub fn eigen_sym<T: Scalar>(a: &CouplingMatrix<T>) -> Result<SymmetricEigen<T>> {
    let (values, vectors, sweeps) = jacobi(a, true)?;
    Ok(SymmetricEigen {
        values,
        vectors: vectors.expect("vectors requested"),
        sweeps,
    })
}

fn off_diagonal_mass<T: Scalar>(a: &[T], n: usize) -> T {
    let mut acc = T::zero();
    for p in 0..n {
        for q in (p + 1)..n {
            let x = a[p * n + q];
            acc = acc + x * x;
        }
    }
    (acc + acc).sqrt()
}

#[allow(clippy::type_complexity)]
fn jacobi<T: Scalar>(
    input: &CouplingMatrix<T>,
    want_vectors: bool,
) -> Result<(Vec<T>, Option<CouplingMatrix<T>>, usize)> {
    input.ensure_symmetric()?;
    let n = input.n_rows();

    // work on the exactly symmetrized copy
    let mut a = input.entries().to_vec();
    for p in 0..n {
        for q in (p + 1)..n {
            let avg = (a[p * n + q] + a[q * n + p]) * lit(0.5);
            a[p * n + q] = avg;
            a[q * n + p] = avg;
        }
    }
    let mut v = if want_vectors {
        Some(CouplingMatrix::<T>::identity(n).entries().to_vec())
    } else {
        None
    };

    let frob = input.frobenius_norm();
    let threshold = lit::<T>(T::EIGEN_TOLERANCE) * frob;
    let mut sweeps = 0;
    loop {
        let off = off_diagonal_mass(&a, n);
        if off <= threshold {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NotConverged {
                sweeps,
                off_diagonal: to_f64(off / frob),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == T::zero() {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (apq + apq);
                let t = {
                    let mag = T::one() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    if theta < T::zero() { -mag } else { mag }
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;

                // A <- A·P (columns p and q)
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                // A <- Pᵀ·A (rows p and q)
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = T::zero();
                a[q * n + p] = T::zero();

                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }

    let diag: Vec<T> = (0..n).map(|i| a[i * n + i]).collect();
    let mut order: Vec<usize> = (0..n).collect();
    // stable sort keeps ties in their original diagonal order
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).expect("finite eigenvalues"));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = v.map(|v| {
        let mut sorted = CouplingMatrix::zeros(n, n);
        for (new_col, &old_col) in order.iter().enumerate() {
            for row in 0..n {
                sorted.set(row, new_col, v[row * n + old_col]);
            }
        }
        sorted
    });
    Ok((values, vectors, sweeps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generators::gen_ring;

    #[test]
    fn identity_spectrum() {
        let s = spectrum_sym(&CouplingMatrix::<f64>::identity(3)).unwrap();
        assert_eq!(s, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn two_by_two_edge() {
        let a = CouplingMatrix::<f64>::from_f64_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let s = spectrum_sym(&a).unwrap();
        assert!((s[0] + 1.0).abs() < 1e-14 && (s[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ring_matches_circulant_formula() {
        for n in [3usize, 4, 7, 12, 25] {
            let got = spectrum_sym(&gen_ring::<f64>(n).unwrap()).unwrap();
            let mut want: Vec<f64> = (0..n)
                .map(|k| 2.0 * (2.0 * std::f64::consts::PI * k as f64 / n as f64).cos())
                .collect();
            want.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() < 1e-10, "n={n}: {g} vs {w}");
            }
        }
    }

    #[test]
    fn rejects_asymmetric() {
        let a = CouplingMatrix::<f64>::from_f64_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(spectrum_sym(&a), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn empty_and_zero_matrices() {
        assert!(spectrum_sym(&CouplingMatrix::<f64>::zeros(0, 0)).unwrap().is_empty());
        assert_eq!(spectrum_sym(&CouplingMatrix::<f64>::zeros(3, 3)).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn single_precision_ring() {
        let s = spectrum_sym(&gen_ring::<f32>(6).unwrap()).unwrap();
        assert!((s[0] + 2.0).abs() < 1e-5 && (s[5] - 2.0).abs() < 1e-5);
    }
}
