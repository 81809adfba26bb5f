//! Small dense symmetric matrices: packed storage, cyclic Jacobi eigenvalues,
//! Cholesky with a named failing pivot. Everything here is sized for the
//! covariance blocks of the experiments (dimension a few dozen at most).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Symmetric matrix with one stored copy per entry pair (packed lower
/// triangle), so `m[(i, j)] == m[(j, i)]` holds by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    dim: usize,
    /// Row-major packed lower triangle: entry (i, j), i >= j, at i(i+1)/2 + j.
    packed: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        SymMatrix {
            dim,
            packed: vec![0.0; dim * (dim + 1) / 2],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = SymMatrix::zeros(dim);
        for i in 0..dim {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let mut m = SymMatrix::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    /// Builds from full rows; rejects non-finite or asymmetric input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::invalid("matrix", "rows must form a square matrix"));
        }
        let mut m = SymMatrix::zeros(dim);
        for i in 0..dim {
            for j in 0..=i {
                let v = rows[i][j];
                if !v.is_finite() || rows[j][i] != v {
                    return Err(Error::BadMatrixEntry { row: i, col: j });
                }
                m.set(i, j, v);
            }
        }
        Ok(m)
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = SymMatrix::zeros(dim);
        for i in 0..dim {
            for j in 0..=i {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        self.packed[r * (r + 1) / 2 + c]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        self.packed[r * (r + 1) / 2 + c] = v;
    }

    pub fn is_finite(&self) -> bool {
        self.packed.iter().all(|v| v.is_finite())
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.packed.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let v = self.get(i, j);
                s += v * v;
            }
        }
        s.sqrt()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim);
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Robust for the small dense matrices used here; eigenvalues ascending,
/// `vectors[c]` is the eigenvector for `values[c]`.
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

pub fn sym_eigen(m: &SymMatrix) -> Result<SymEigen> {
    if !m.is_finite() {
        return Err(Error::invalid("matrix", "non-finite entries"));
    }
    let n = m.dim();
    let mut a = m.to_rows();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }

    let scale = m.max_abs().max(1.0);
    let tol = 1e-15 * scale;
    const MAX_SWEEPS: usize = 64;

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p][q].abs();
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() <= tol * 1e-2 {
                    continue;
                }
                let theta = 0.5 * (a[q][q] - a[p][p]) / a[p][q];
                let t = if theta.abs() > 1e12 {
                    0.5 / theta
                } else {
                    let s = theta.signum();
                    s / (theta.abs() + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);

                let apq = a[p][q];
                a[p][p] -= t * apq;
                a[q][q] += t * apq;
                a[p][q] = 0.0;
                a[q][p] = 0.0;
                for r in 0..n {
                    if r != p && r != q {
                        let arp = a[r][p];
                        let arq = a[r][q];
                        a[r][p] = arp - s * (arq + tau * arp);
                        a[p][r] = a[r][p];
                        a[r][q] = arq + s * (arp - tau * arq);
                        a[q][r] = a[r][q];
                    }
                }
                for row in v.iter_mut() {
                    let rp = row[p];
                    let rq = row[q];
                    row[p] = rp - s * (rq + tau * rp);
                    row[q] = rq + s * (rp - tau * rq);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].partial_cmp(&a[j][j]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| a[i][i]).collect();
    let vectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&c| (0..n).map(|r| v[r][c]).collect())
        .collect();
    Ok(SymEigen { values, vectors })
}

/// Eigenvalues only, sorted ascending.
pub fn sym_eigenvalues(m: &SymMatrix) -> Result<Vec<f64>> {
    sym_eigen(m).map(|e| e.values)
}

/// Dense lower-triangular factor, row-major packed like [`SymMatrix`].
#[derive(Debug, Clone, PartialEq)]
pub struct LowerTriangular {
    dim: usize,
    packed: Vec<f64>,
}

impl LowerTriangular {
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j > i {
            0.0
        } else {
            self.packed[i * (i + 1) / 2 + j]
        }
    }

    /// `L x` for a full vector.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim);
        (0..self.dim)
            .map(|i| {
                let row = &self.packed[i * (i + 1) / 2..i * (i + 1) / 2 + i + 1];
                row.iter().zip(&x[..=i]).map(|(l, v)| l * v).sum()
            })
            .collect()
    }

    /// Writes `L x` into `out` without allocating.
    pub fn matvec_into(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(out.len(), self.dim);
        for i in 0..self.dim {
            let row = &self.packed[i * (i + 1) / 2..i * (i + 1) / 2 + i + 1];
            out[i] = row.iter().zip(&x[..=i]).map(|(l, v)| l * v).sum();
        }
    }

    /// Reconstructs `L L^T`.
    pub fn lltranspose(&self) -> SymMatrix {
        SymMatrix::from_fn(self.dim, |i, j| {
            (0..=j.min(i)).map(|k| self.get(i, k) * self.get(j, k)).sum()
        })
    }
}

/// Relative pivot tolerance: a pivot at or below `1e-12 * max diagonal`
/// rejects the near-singular covariances the rank-perturbation argument
/// is meant to avoid.
pub const SPD_PIVOT_RTOL: f64 = 1e-12;

/// Cholesky factorization `M = L L^T`; fails with the index of the first
/// pivot at or below tolerance.
pub fn cholesky(m: &SymMatrix) -> Result<LowerTriangular> {
    if !m.is_finite() {
        return Err(Error::invalid("matrix", "non-finite entries"));
    }
    let n = m.dim();
    let max_diag = (0..n).fold(0.0_f64, |a, i| a.max(m.get(i, i)));
    let tol = SPD_PIVOT_RTOL * max_diag.max(f64::MIN_POSITIVE);
    let mut l = vec![0.0; n * (n + 1) / 2];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = m.get(i, j);
            for k in 0..j {
                sum -= l[i * (i + 1) / 2 + k] * l[j * (j + 1) / 2 + k];
            }
            if i == j {
                if sum <= tol {
                    return Err(Error::NotSpd {
                        index: i,
                        value: sum,
                        tolerance: tol,
                    });
                }
                l[i * (i + 1) / 2 + j] = sum.sqrt();
            } else {
                l[i * (i + 1) / 2 + j] = sum / l[j * (j + 1) / 2 + j];
            }
        }
    }
    Ok(LowerTriangular { dim: n, packed: l })
}

/// Convenience: is the matrix SPD under the pivot tolerance?
pub fn is_spd(m: &SymMatrix) -> bool {
    cholesky(m).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_eigenvalues_are_ones() {
        for dim in [1, 2, 5, 8] {
            let vals = sym_eigenvalues(&SymMatrix::identity(dim)).unwrap();
            assert!(vals.iter().all(|&v| (v - 1.0).abs() < 1e-14));
        }
    }

    #[test]
    fn diagonal_eigenvalues_sorted() {
        let vals = sym_eigenvalues(&SymMatrix::diagonal(&[-2.0, 3.0])).unwrap();
        assert_eq!(vals, vec![-2.0, 3.0]);
    }

    #[test]
    fn two_by_two_closed_form() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3 (quadratic formula).
        let m = SymMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let vals = sym_eigenvalues(&m).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-12);
        assert!((vals[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn eigen_residuals_small() {
        let m = SymMatrix::from_fn(6, |i, j| 1.0 / (1.0 + i as f64 + j as f64));
        let eig = sym_eigen(&m).unwrap();
        let scale = m.max_abs();
        for (lam, v) in eig.values.iter().zip(&eig.vectors) {
            let mv = m.matvec(v);
            let resid: f64 = mv
                .iter()
                .zip(v)
                .map(|(a, b)| (a - lam * b) * (a - lam * b))
                .sum::<f64>()
                .sqrt();
            assert!(resid <= 1e-10 * scale, "residual {resid}");
        }
    }

    #[test]
    fn nonfinite_rejected() {
        let mut m = SymMatrix::identity(2);
        m.set(0, 1, f64::NAN);
        assert!(sym_eigenvalues(&m).is_err());
    }

    #[test]
    fn cholesky_identity() {
        let l = cholesky(&SymMatrix::identity(3)).unwrap();
        assert_eq!(l.lltranspose(), SymMatrix::identity(3));
    }

    #[test]
    fn cholesky_hand_value() {
        // [[4,2],[2,5]] = [[2,0],[1,2]] [[2,1],[0,2]]
        let m = SymMatrix::from_rows(&[vec![4.0, 2.0], vec![2.0, 5.0]]).unwrap();
        let l = cholesky(&m).unwrap();
        assert!((l.get(0, 0) - 2.0).abs() < 1e-15);
        assert!((l.get(1, 0) - 1.0).abs() < 1e-15);
        assert!((l.get(1, 1) - 2.0).abs() < 1e-15);
        let back = l.lltranspose();
        for i in 0..2 {
            for j in 0..2 {
                assert!((back.get(i, j) - m.get(i, j)).abs() <= 1e-12 * m.max_abs());
            }
        }
    }

    #[test]
    fn cholesky_rejects_indefinite_with_pivot_index() {
        // [[1,2],[2,1]] has eigenvalue -1; the second pivot fails.
        let m = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        match cholesky(&m) {
            Err(Error::NotSpd { index, .. }) => assert_eq!(index, 1),
            other => panic!("expected NotSpd, got {other:?}"),
        }
    }

    #[test]
    fn random_spd_matrices_pass_both_routes() {
        use rand::Rng;
        let mut rng = crate::rng::RngStream::new(11, 0).rng();
        for dim in [2_usize, 4, 8] {
            for _ in 0..20 {
                let g: Vec<Vec<f64>> = (0..dim)
                    .map(|_| (0..dim).map(|_| rng.random::<f64>() - 0.5).collect())
                    .collect();
                let m = SymMatrix::from_fn(dim, |i, j| {
                    let dot: f64 = (0..dim).map(|k| g[i][k] * g[j][k]).sum();
                    dot + if i == j { 1e-3 } else { 0.0 }
                });
                assert!(sym_eigenvalues(&m).unwrap().iter().all(|&v| v > 0.0));
                assert!(cholesky(&m).is_ok());
            }
        }
    }

    #[test]
    fn asymmetric_input_rejected() {
        let r = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0000001, 1.0]]);
        assert!(r.is_err());
    }
}
