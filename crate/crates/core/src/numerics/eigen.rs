use super::SymmetricMatrix;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;
const TOLERANCE: f64 = 1e-15;

/// Eigenvalues in ascending order with matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    /// Row-major `n x n`; column `k` is the eigenvector of `values[k]`.
    vectors: Vec<f64>,
    order: usize,
}

impl EigenDecomposition {
    pub fn order(&self) -> usize {
        self.order
    }

    /// Component `i` of eigenvector `k`.
    #[inline]
    pub fn component(&self, i: usize, k: usize) -> f64 {
        self.vectors[i * self.order + k]
    }

    pub fn vector(&self, k: usize) -> Vec<f64> {
        (0..self.order).map(|i| self.component(i, k)).collect()
    }
}

/// Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Sweeps visit the pairs `(p, q)` in a fixed order, so the result is a
/// deterministic function of the input.
pub fn eig_symmetric(m: &SymmetricMatrix) -> Result<EigenDecomposition> {
    let n = m.order();
    if n == 0 {
        return Err(Error::InvalidParameter("matrix order must be at least 1".into()));
    }
    if m.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("symmetric matrix"));
    }

    let mut a = m.as_slice().to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let scale = m.frobenius_norm();
    let off_norm = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                s += a[p * n + q] * a[p * n + q];
            }
        }
        (2.0 * s).sqrt()
    };

    let mut sweeps = 0;
    loop {
        let off = off_norm(&a);
        if off <= TOLERANCE * scale || off == 0.0 {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, residual: off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                // Skip rotations below the resolution of the diagonal.
                if apq.abs() < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut a, &mut v, n, p, q, c, s, t, apq);
            }
        }
    }

    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]).then(i.cmp(&j)));
    let values = idx.iter().map(|&i| a[i * n + i]).collect();
    let mut vectors = vec![0.0; n * n];
    for (k, &src) in idx.iter().enumerate() {
        for i in 0..n {
            vectors[i * n + k] = v[i * n + src];
        }
    }
    Ok(EigenDecomposition { values, vectors, order: n })
}

#[allow(clippy::too_many_arguments)]
fn rotate(a: &mut [f64], v: &mut [f64], n: usize, p: usize, q: usize, c: f64, s: f64, t: f64, apq: f64) {
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        let new_p = c * akp - s * akq;
        let new_q = s * akp + c * akq;
        a[k * n + p] = new_p;
        a[p * n + k] = new_p;
        a[k * n + q] = new_q;
        a[q * n + k] = new_q;
    }
    a[p * n + p] -= t * apq;
    a[q * n + q] += t * apq;
    a[p * n + q] = 0.0;
    a[q * n + p] = 0.0;
    for k in 0..n {
        let vkp = v[k * n + p];
        let vkq = v[k * n + q];
        v[k * n + p] = c * vkp - s * vkq;
        v[k * n + q] = s * vkp + c * vkq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_pairs(m: &SymmetricMatrix, e: &EigenDecomposition) {
        let n = m.order();
        let tol = 1e-8 * m.frobenius_norm().max(1.0);
        for k in 0..n {
            let vk = e.vector(k);
            let resid: f64 = (0..n)
                .map(|i| {
                    let mv: f64 = (0..n).map(|j| m.get(i, j) * vk[j]).sum();
                    (mv - e.values[k] * vk[i]).powi(2)
                })
                .sum::<f64>()
                .sqrt();
            assert!(resid <= tol, "pair {k} residual {resid}");
        }
    }

    #[test]
    fn identity() {
        let m = SymmetricMatrix::identity(3);
        let e = eig_symmetric(&m).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0, 1.0]);
        check_pairs(&m, &e);
    }

    #[test]
    fn two_by_two_laplacian() {
        let m = SymmetricMatrix::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        let e = eig_symmetric(&m).unwrap();
        assert!((e.values[0] - 0.0).abs() < 1e-14);
        assert!((e.values[1] - 2.0).abs() < 1e-14);
        let v0 = e.vector(0);
        assert!((v0[0] - v0[1]).abs() < 1e-12);
        let v1 = e.vector(1);
        assert!((v1[0] + v1[1]).abs() < 1e-12);
        check_pairs(&m, &e);
    }

    #[test]
    fn diagonal_sorted_ascending() {
        let m = SymmetricMatrix::from_fn(3, |i, j| if i == j { [3.0, 1.0, 2.0][i] } else { 0.0 }).unwrap();
        let e = eig_symmetric(&m).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
        assert_eq!(e.vector(0), vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn zero_and_scalar_matrices() {
        let e = eig_symmetric(&SymmetricMatrix::zeros(4)).unwrap();
        assert_eq!(e.values, vec![0.0; 4]);
        let e = eig_symmetric(&SymmetricMatrix::from_row_major(1, &[-2.5]).unwrap()).unwrap();
        assert_eq!(e.values, vec![-2.5]);
    }

    #[test]
    fn rejects_empty() {
        assert!(eig_symmetric(&SymmetricMatrix::zeros(0)).is_err());
    }

    #[test]
    fn dense_matrix_pairs() {
        let m = SymmetricMatrix::from_fn(12, |i, j| ((i * 31 + j * 17) % 13) as f64 / 7.0 - 0.8).unwrap();
        let e = eig_symmetric(&m).unwrap();
        check_pairs(&m, &e);
        let trace: f64 = (0..12).map(|i| m.get(i, i)).sum();
        assert!((e.values.iter().sum::<f64>() - trace).abs() < 1e-10);
    }
}
