//! Small dense linear algebra kernels.
//!
//! Everything here operates at desk scale (dimensions in the hundreds, with
//! tall-skinny matrices up to a few tens of thousands of rows), so we keep a
//! plain row-major `Vec<f64>` layout and textbook algorithms: LU with partial
//! pivoting, Cholesky, cyclic Jacobi for symmetric eigenproblems, and
//! one-sided Jacobi for singular values. The one-sided variant is used for
//! rank decisions because it delivers small singular values with high
//! relative accuracy, which a Gram-matrix route cannot.

use crate::error::{Error, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_fn<F: FnMut(usize, usize) -> f64>(rows: usize, cols: usize, mut f: F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidInput("ragged rows in matrix".into()));
        }
        Ok(Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, col: &[f64]) {
        debug_assert_eq!(col.len(), self.rows);
        for (i, &x) in col.iter().enumerate() {
            self[(i, j)] = x;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// y = A x
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| dot(self.row(i), x))
            .collect()
    }

    /// y = A^T x
    pub fn tr_matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.rows);
        let mut y = vec![0.0; self.cols];
        for i in 0..self.rows {
            let xi = x[i];
            if xi == 0.0 {
                continue;
            }
            for (j, &a) in self.row(i).iter().enumerate() {
                y[j] += a * xi;
            }
        }
        y
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        debug_assert_eq!(self.cols, other.rows);
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let orow = other.row(k);
                let out_row = out.row_mut(i);
                for (j, &b) in orow.iter().enumerate() {
                    out_row[j] += a * b;
                }
            }
        }
        out
    }

    /// A^T A, exploiting symmetry.
    pub fn gram(&self) -> Mat {
        let d = self.cols;
        let mut g = Mat::zeros(d, d);
        for i in 0..self.rows {
            let r = self.row(i);
            for a in 0..d {
                let ra = r[a];
                if ra == 0.0 {
                    continue;
                }
                for b in a..d {
                    g[(a, b)] += ra * r[b];
                }
            }
        }
        for a in 0..d {
            for b in 0..a {
                g[(a, b)] = g[(b, a)];
            }
        }
        g
    }

    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solve A x = b by LU with partial pivoting. Returns `None` when A is
/// numerically singular.
pub fn lu_solve(a: &Mat, b: &[f64]) -> Option<Vec<f64>> {
    let n = a.rows();
    debug_assert_eq!(a.cols(), n);
    debug_assert_eq!(b.len(), n);
    let mut m = a.clone();
    let mut x = b.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();

    for k in 0..n {
        let mut piv = k;
        let mut best = m[(perm[k], k)].abs();
        for i in k + 1..n {
            let v = m[(perm[i], k)].abs();
            if v > best {
                best = v;
                piv = i;
            }
        }
        if best < 1e-300 {
            return None;
        }
        perm.swap(k, piv);
        let pk = perm[k];
        let diag = m[(pk, k)];
        for i in k + 1..n {
            let pi = perm[i];
            let factor = m[(pi, k)] / diag;
            m[(pi, k)] = factor;
            for j in k + 1..n {
                let upd = factor * m[(pk, j)];
                m[(pi, j)] -= upd;
            }
            x[pi] -= factor * x[pk];
        }
    }
    // Back substitution.
    let mut out = vec![0.0; n];
    for k in (0..n).rev() {
        let pk = perm[k];
        let mut s = x[pk];
        for j in k + 1..n {
            s -= m[(pk, j)] * out[j];
        }
        out[k] = s / m[(pk, k)];
    }
    if out.iter().all(|v| v.is_finite()) {
        Some(out)
    } else {
        None
    }
}

/// Solve A x = b for symmetric positive-definite A via Cholesky.
/// Returns `None` when the factorization breaks down.
pub fn cholesky_solve(a: &Mat, b: &[f64]) -> Option<Vec<f64>> {
    let n = a.rows();
    debug_assert_eq!(a.cols(), n);
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= 0.0 || !s.is_finite() {
                    return None;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    // Forward then backward substitution.
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[k * n + i] * x[k];
        }
        x[i] = s / l[i * n + i];
    }
    Some(x)
}

/// Eigen-decomposition of a symmetric matrix, eigenvalues descending,
/// eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Mat,
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigenvalue iteration for a symmetric matrix.
pub fn jacobi_eigen_sym(g: &Mat) -> Result<SymEigen> {
    let n = g.rows();
    if g.cols() != n {
        return Err(Error::InvalidInput("jacobi_eigen_sym needs a square matrix".into()));
    }
    let mut a = g.clone();
    let mut v = Mat::identity(n);
    let scale = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| a[(i, j)].abs())
        .fold(0.0f64, f64::max);
    if scale == 0.0 {
        return Ok(SymEigen {
            values: vec![0.0; n],
            vectors: v,
        });
    }
    let stop = 1e-15 * scale;

    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off = off.max(a[(p, q)].abs());
            }
        }
        if off <= stop {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&i, &j| a[(j, j)].partial_cmp(&a[(i, i)]).unwrap());
            let values = order.iter().map(|&i| a[(i, i)]).collect();
            let vectors = Mat::from_fn(n, n, |i, j| v[(i, order[j])]);
            return Ok(SymEigen { values, vectors });
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() <= stop * 1e-2 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Update rows/columns p and q of A.
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    Err(Error::Numerical(
        "jacobi eigenvalue iteration did not converge".into(),
    ))
}

const HESTENES_MAX_SWEEPS: usize = 100;

/// Singular values of a general matrix, descending, via one-sided Jacobi
/// (Hestenes) on the taller orientation. Small singular values retain high
/// relative accuracy, which matters for numeric-rank thresholds around
/// `1e-8 * sigma_1`.
pub fn singular_values(a: &Mat) -> Result<Vec<f64>> {
    let tall = if a.rows() >= a.cols() {
        a.clone()
    } else {
        a.transpose()
    };
    let m = tall.rows();
    let n = tall.cols();
    // Column-major working copy.
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| tall.column(j)).collect();
    let mut norms2: Vec<f64> = cols.iter().map(|c| dot(c, c)).collect();

    let mut converged = false;
    for _sweep in 0..HESTENES_MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n {
            for j in i + 1..n {
                let aa = norms2[i];
                let bb = norms2[j];
                if aa == 0.0 || bb == 0.0 {
                    continue;
                }
                let g = dot(&cols[i], &cols[j]);
                if g.abs() <= 1e-15 * (aa * bb).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (bb - aa) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..m {
                    let x = cols[i][k];
                    let y = cols[j][k];
                    cols[i][k] = c * x - s * y;
                    cols[j][k] = s * x + c * y;
                }
                norms2[i] = dot(&cols[i], &cols[i]);
                norms2[j] = dot(&cols[j], &cols[j]);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Numerical(
            "one-sided jacobi svd did not converge".into(),
        ));
    }
    let mut sv: Vec<f64> = norms2.iter().map(|&x| x.sqrt()).collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(sv)
}

/// Count of singular values above `rel_tol * sigma_1`.
pub fn numeric_rank(singular: &[f64], rel_tol: f64) -> usize {
    match singular.first() {
        None => 0,
        Some(&s1) if s1 <= 0.0 => 0,
        Some(&s1) => singular.iter().filter(|&&s| s > rel_tol * s1).count(),
    }
}

/// Orthonormalize `vec` against the first `k` columns of `basis` (two MGS
/// passes) and normalize. Returns `None` when the remainder is negligible.
pub fn orthogonalize_against(basis: &Mat, k: usize, vec: &[f64]) -> Option<Vec<f64>> {
    let mut w = vec.to_vec();
    for _pass in 0..2 {
        for j in 0..k {
            let col = basis.column(j);
            let proj = dot(&w, &col);
            for (wi, ci) in w.iter_mut().zip(col.iter()) {
                *wi -= proj * ci;
            }
        }
    }
    let norm = dot(&w, &w).sqrt();
    if norm < 1e-8 {
        return None;
    }
    for wi in w.iter_mut() {
        *wi /= norm;
    }
    Some(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use rand_distr::{Distribution as _, StandardNormal};

    fn random_mat(rows: usize, cols: usize, seed: u64) -> Mat {
        let mut rng = seeded(seed);
        Mat::from_fn(rows, cols, |_, _| StandardNormal.sample(&mut rng))
    }

    #[test]
    fn lu_solves_random_systems() {
        for seed in 0..5 {
            let a = random_mat(8, 8, seed);
            let x_true: Vec<f64> = (0..8).map(|i| i as f64 - 3.5).collect();
            let b = a.matvec(&x_true);
            let x = lu_solve(&a, &b).unwrap();
            for (xi, ti) in x.iter().zip(&x_true) {
                assert!((xi - ti).abs() < 1e-9, "{xi} vs {ti}");
            }
        }
    }

    #[test]
    fn lu_rejects_singular() {
        let a = Mat::from_rows(vec![vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(lu_solve(&a, &[1.0, 1.0]).is_none());
    }

    #[test]
    fn cholesky_matches_lu_on_spd() {
        let b = random_mat(6, 6, 3);
        let a = b.gram(); // SPD with probability 1
        let rhs: Vec<f64> = (0..6).map(|i| (i as f64).sin()).collect();
        let x1 = cholesky_solve(&a, &rhs).unwrap();
        let x2 = lu_solve(&a, &rhs).unwrap();
        for (p, q) in x1.iter().zip(&x2) {
            assert!((p - q).abs() < 1e-8);
        }
    }

    #[test]
    fn jacobi_recovers_diagonal() {
        let a = Mat::from_rows(vec![
            vec![3.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 2.0],
        ])
        .unwrap();
        let e = jacobi_eigen_sym(&a).unwrap();
        assert!((e.values[0] - 3.0).abs() < 1e-12);
        assert!((e.values[1] - 2.0).abs() < 1e-12);
        assert!((e.values[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn jacobi_reconstructs_symmetric() {
        let b = random_mat(10, 10, 11);
        let a = Mat::from_fn(10, 10, |i, j| 0.5 * (b[(i, j)] + b[(j, i)]));
        let e = jacobi_eigen_sym(&a).unwrap();
        // A = V diag(lambda) V^T
        let mut recon = Mat::zeros(10, 10);
        for k in 0..10 {
            let vk = e.vectors.column(k);
            for i in 0..10 {
                for j in 0..10 {
                    recon[(i, j)] += e.values[k] * vk[i] * vk[j];
                }
            }
        }
        for i in 0..10 {
            for j in 0..10 {
                assert!((recon[(i, j)] - a[(i, j)]).abs() < 1e-10);
            }
        }
        // V orthonormal
        let vtv = e.vectors.gram();
        for i in 0..10 {
            for j in 0..10 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((vtv[(i, j)] - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn singular_values_match_gram_eigenvalues() {
        let a = random_mat(12, 7, 21);
        let sv = singular_values(&a).unwrap();
        let eig = jacobi_eigen_sym(&a.gram()).unwrap();
        for (s, l) in sv.iter().zip(&eig.values) {
            assert!((s * s - l).abs() < 1e-9 * eig.values[0].max(1.0));
        }
        // Orientation must not matter.
        let sv_t = singular_values(&a.transpose()).unwrap();
        for (x, y) in sv.iter().zip(&sv_t) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn rank_deficient_matrix_has_tiny_trailing_singular_values() {
        // 20x9 matrix of rank 3.
        let left = random_mat(20, 3, 5);
        let right = random_mat(3, 9, 6);
        let a = left.matmul(&right);
        let sv = singular_values(&a).unwrap();
        assert_eq!(numeric_rank(&sv, 1e-8), 3);
        assert!(sv[3] < 1e-12 * sv[0]);
    }

    #[test]
    fn orthogonalize_fills_complement() {
        let mut basis = Mat::zeros(4, 3);
        basis.set_column(0, &[1.0, 0.0, 0.0, 0.0]);
        basis.set_column(1, &[0.0, 1.0, 0.0, 0.0]);
        let w = orthogonalize_against(&basis, 2, &[1.0, 1.0, 1.0, 0.0]).unwrap();
        assert!(w[0].abs() < 1e-12 && w[1].abs() < 1e-12);
        assert!((dot(&w, &w) - 1.0).abs() < 1e-12);
        // A vector entirely inside the span is rejected.
        assert!(orthogonalize_against(&basis, 2, &[0.3, -0.2, 0.0, 0.0]).is_none());
    }
}
