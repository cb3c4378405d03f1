//! Unweighted graph generators returning symmetric 0/1 adjacency matrices
//! with zero diagonal.

use crate::error::{Error, Result};
use crate::graph::matrix::CouplingMatrix;
use crate::graph::rng::SeededRng;
use crate::scalar::Scalar;

/// Erdős–Rényi `G(n, p)`: each unordered pair `{i, j}` is an edge
/// independently with probability `p`.
///
/// Pairs are visited in row-major upper-triangle order (`i < j`), one
/// Bernoulli draw each.
pub fn gen_erdos_renyi<T: Scalar>(n: usize, p: f64, rng: &mut SeededRng) -> Result<CouplingMatrix<T>> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: "graph needs at least one node".into(),
        });
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter {
            name: "p",
            reason: format!("edge probability {p} outside [0, 1]"),
        });
    }
    let mut a = CouplingMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.bernoulli(p) {
                a.set(i, j, T::one());
                a.set(j, i, T::one());
            }
        }
    }
    Ok(a)
}

/// Cycle `C_n` with periodic boundary. For `n = 2` this is a single edge.
pub fn gen_ring<T: Scalar>(n: usize) -> Result<CouplingMatrix<T>> {
    if n < 2 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: format!("ring needs at least 2 nodes, got {n}"),
        });
    }
    let mut a = CouplingMatrix::zeros(n, n);
    for i in 0..n {
        let j = (i + 1) % n;
        a.set(i, j, T::one());
        a.set(j, i, T::one());
    }
    Ok(a)
}

/// Circulant graph linking each node to its `half_width` nearest neighbours
/// on each side; every node has degree `2 · half_width`.
pub fn gen_circulant<T: Scalar>(n: usize, half_width: usize) -> Result<CouplingMatrix<T>> {
    if half_width == 0 || n < 3 || half_width > (n - 1) / 2 {
        return Err(Error::InvalidParameter {
            name: "half_width",
            reason: format!("need 1 <= half_width <= (n-1)/2, got half_width={half_width}, n={n}"),
        });
    }
    let mut a = CouplingMatrix::zeros(n, n);
    for i in 0..n {
        for d in 1..=half_width {
            a.set(i, (i + d) % n, T::one());
            a.set(i, (i + n - d) % n, T::one());
        }
    }
    Ok(a)
}

/// Complete graph `K_n`.
pub fn gen_complete<T: Scalar>(n: usize) -> Result<CouplingMatrix<T>> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: "graph needs at least one node".into(),
        });
    }
    let mut a = CouplingMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                a.set(i, j, T::one());
            }
        }
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn degrees(a: &CouplingMatrix<f64>) -> Vec<f64> {
        a.row_sums()
    }

    #[test]
    fn er_extremes() {
        let mut rng = SeededRng::new(5);
        let empty: CouplingMatrix<f64> = gen_erdos_renyi(12, 0.0, &mut rng).unwrap();
        assert_eq!(empty, CouplingMatrix::zeros(12, 12));
        let full: CouplingMatrix<f64> = gen_erdos_renyi(12, 1.0, &mut rng).unwrap();
        assert_eq!(full, gen_complete(12).unwrap());
    }

    #[test]
    fn er_edge_count_within_four_sigma() {
        let (n, p) = (1000usize, 0.25);
        let mut rng = SeededRng::new(2024);
        let a: CouplingMatrix<f64> = gen_erdos_renyi(n, p, &mut rng).unwrap();
        assert!(a.is_symmetric() && a.has_zero_diagonal());
        let edges = a.entries().iter().sum::<f64>() / 2.0;
        let pairs = (n * (n - 1) / 2) as f64;
        let mean = p * pairs;
        let sd = (pairs * p * (1.0 - p)).sqrt();
        assert!((edges - mean).abs() < 4.0 * sd, "edges={edges}, mean={mean}, sd={sd}");
    }

    #[test]
    fn er_rejects_bad_probability() {
        let mut rng = SeededRng::new(0);
        assert!(gen_erdos_renyi::<f64>(4, 1.5, &mut rng).is_err());
        assert!(gen_erdos_renyi::<f64>(0, 0.5, &mut rng).is_err());
    }

    #[test]
    fn small_rings() {
        let r3: CouplingMatrix<f64> = gen_ring(3).unwrap();
        assert_eq!(r3, gen_complete(3).unwrap());
        let r2: CouplingMatrix<f64> = gen_ring(2).unwrap();
        assert_eq!(r2, CouplingMatrix::from_f64_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap());
        let r4: CouplingMatrix<f64> = gen_ring(4).unwrap();
        let expected = CouplingMatrix::from_f64_rows(&[
            &[0.0, 1.0, 0.0, 1.0],
            &[1.0, 0.0, 1.0, 0.0],
            &[0.0, 1.0, 0.0, 1.0],
            &[1.0, 0.0, 1.0, 0.0],
        ])
        .unwrap();
        assert_eq!(r4, expected);
        assert!(gen_ring::<f64>(1).is_err());
    }

    #[test]
    fn circulant_cases() {
        let c: CouplingMatrix<f64> = gen_circulant(100, 10).unwrap();
        assert!(c.is_symmetric() && c.has_zero_diagonal());
        assert!(degrees(&c).iter().all(|&d| d == 20.0));
        assert_eq!(gen_circulant::<f64>(9, 1).unwrap(), gen_ring(9).unwrap());
        assert_eq!(gen_circulant::<f64>(5, 2).unwrap(), gen_complete(5).unwrap());
        assert!(gen_circulant::<f64>(5, 3).is_err());
        assert!(gen_circulant::<f64>(5, 0).is_err());
    }
}
