//! Minimal dense linear algebra for the truncated representations: matrix
//! products, pivoted Gram–Schmidt QR, a cyclic Jacobi eigensolver for
//! symmetric matrices, and power-iteration operator norms. Everything here
//! is desk-scale (dimensions up to a few thousand).

#![allow(clippy::needless_range_loop)] // indexed kernels read better here

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl DMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DMat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = DMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn add_at(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] += v;
    }

    pub fn transpose(&self) -> DMat {
        let mut t = DMat::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn matmul(&self, other: &DMat) -> DMat {
        assert_eq!(self.cols, other.rows);
        let mut out = DMat::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0.0 {
                    continue;
                }
                let row_off = k * other.cols;
                let out_off = r * other.cols;
                for c in 0..other.cols {
                    out.data[out_off + c] += a * other.data[row_off + c];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &DMat) -> DMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        DMat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &DMat) -> DMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        DMat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, s: f64) -> DMat {
        DMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![0.0; self.rows];
        for r in 0..self.rows {
            let off = r * self.cols;
            out[r] = (0..self.cols).map(|c| self.data[off + c] * v[c]).sum();
        }
        out
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, a| m.max(a.abs()))
    }

    /// Largest singular value by power iteration on AᵀA.
    pub fn op_norm(&self) -> f64 {
        if self.data.iter().all(|&x| x == 0.0) {
            return 0.0;
        }
        let at = self.transpose();
        let mut v: Vec<f64> = (0..self.cols)
            .map(|i| 1.0 + (i as f64 * 0.7133).sin())
            .collect();
        normalize(&mut v);
        let mut norm = 0.0;
        for _ in 0..200 {
            let mut w = at.apply(&self.apply(&v));
            let new_norm = vec_norm(&w).sqrt();
            normalize(&mut w);
            if (new_norm - norm).abs() <= 1e-13 * norm.max(1.0) {
                return new_norm;
            }
            norm = new_norm;
            v = w;
        }
        norm
    }
}

pub fn vec_norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn normalize(v: &mut [f64]) {
    let n = vec_norm(v);
    if n > 0.0 {
        for x in v.iter_mut() {
            *x /= n;
        }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Column-pivoted modified Gram–Schmidt.
///
/// Returns `(q, coords, perm, rank)`: `q` holds `rank` orthonormal columns,
/// `coords[j]` are the coefficients of input column `j` in that basis, and
/// `perm` records the pivot order. Columns whose remaining norm falls below
/// `tol` (relative to the largest pivot) are treated as dependent.
pub struct PivotedQr {
    pub q: Vec<Vec<f64>>,
    pub coords: Vec<Vec<f64>>,
    pub perm: Vec<usize>,
    pub rank: usize,
    pub pivot_norms: Vec<f64>,
}

pub fn pivoted_qr(columns: &[Vec<f64>], tol: f64) -> PivotedQr {
    let k = columns.len();
    let mut work: Vec<Vec<f64>> = columns.to_vec();
    let mut remaining: Vec<usize> = (0..k).collect();
    let mut q: Vec<Vec<f64>> = Vec::new();
    let mut perm = Vec::new();
    let mut pivot_norms = Vec::new();
    let mut first_pivot = 0.0f64;

    loop {
        // pick the remaining column with the largest residual norm
        let best = remaining
            .iter()
            .map(|&j| (j, vec_norm(&work[j])))
            .max_by(|a, b| a.1.total_cmp(&b.1));
        let (j, norm) = match best {
            Some(x) => x,
            None => break,
        };
        if q.is_empty() {
            first_pivot = norm;
        }
        if norm <= tol * first_pivot.max(1e-300) {
            break;
        }
        let mut col = work[j].clone();
        for x in col.iter_mut() {
            *x /= norm;
        }
        // re-orthogonalize once for numerical hygiene
        for qc in &q {
            let d = dot(&col, qc);
            for (x, y) in col.iter_mut().zip(qc) {
                *x -= d * y;
            }
        }
        normalize(&mut col);
        perm.push(j);
        pivot_norms.push(norm);
        remaining.retain(|&r| r != j);
        for &r in &remaining {
            let d = dot(&work[r], &col);
            let wr = &mut work[r];
            for (x, y) in wr.iter_mut().zip(&col) {
                *x -= d * y;
            }
        }
        q.push(col);
    }

    let rank = q.len();
    let coords = columns
        .iter()
        .map(|c| q.iter().map(|qc| dot(c, qc)).collect())
        .collect();
    PivotedQr {
        q,
        coords,
        perm,
        rank,
        pivot_norms,
    }
}

/// Eigenvalues and eigenvectors of a symmetric matrix by cyclic Jacobi.
/// Returns eigenvalues descending with matching orthonormal columns.
pub fn jacobi_symmetric(a: &DMat) -> (Vec<f64>, DMat) {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    let mut m = a.clone();
    let mut v = DMat::identity(n);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m.get(p, q).abs();
            }
        }
        if off < 1e-15 * (1.0 + m.max_abs()) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let theta = 0.5 * (aqq - app) / apq;
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, q);
                    m.set(k, p, c * mkp - s * mkq);
                    m.set(k, q, s * mkp + c * mkq);
                }
                for k in 0..n {
                    let mpk = m.get(p, k);
                    let mqk = m.get(q, k);
                    m.set(p, k, c * mpk - s * mqk);
                    m.set(q, k, s * mpk + c * mqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    let mut pairs: Vec<(f64, usize)> = (0..n).map(|i| (m.get(i, i), i)).collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let eigvals = pairs.iter().map(|p| p.0).collect();
    let mut vecs = DMat::zeros(n, n);
    for (new_c, &(_, old_c)) in pairs.iter().enumerate() {
        for r in 0..n {
            vecs.set(r, new_c, v.get(r, old_c));
        }
    }
    (eigvals, vecs)
}

/// SVD of a small matrix via the eigendecomposition of AᵀA:
/// `a = u · diag(σ) · vᵀ` with σ descending. Intended for d×d blocks.
pub fn svd_small(a: &DMat) -> (DMat, Vec<f64>, DMat) {
    let ata = a.transpose().matmul(a);
    let (eig, v) = jacobi_symmetric(&ata);
    let sigma: Vec<f64> = eig.iter().map(|&e| e.max(0.0).sqrt()).collect();
    let n = a.rows;
    let k = a.cols;
    let av = a.matmul(&v);
    let mut u = DMat::zeros(n, k.min(n));
    let mut used: Vec<Vec<f64>> = Vec::new();
    for c in 0..k.min(n) {
        let mut col: Vec<f64> = (0..n).map(|r| av.get(r, c)).collect();
        if sigma[c] > 1e-300 {
            for x in col.iter_mut() {
                *x /= sigma[c];
            }
        } else {
            // null direction: pick anything orthogonal to the previous columns
            col = vec![0.0; n];
            'seed: for seed in 0..n {
                let mut cand = vec![0.0; n];
                cand[seed] = 1.0;
                for prev in &used {
                    let d = dot(&cand, prev);
                    for (x, y) in cand.iter_mut().zip(prev) {
                        *x -= d * y;
                    }
                }
                if vec_norm(&cand) > 0.5 {
                    normalize(&mut cand);
                    col = cand;
                    break 'seed;
                }
            }
        }
        used.push(col.clone());
        for r in 0..n {
            u.set(r, c, col[r]);
        }
    }
    (u, sigma, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matmul_identity() {
        let mut a = DMat::zeros(2, 2);
        a.set(0, 0, 1.0);
        a.set(0, 1, 2.0);
        a.set(1, 0, 3.0);
        a.set(1, 1, 4.0);
        let i = DMat::identity(2);
        assert_eq!(a.matmul(&i), a);
        assert_eq!(i.matmul(&a), a);
    }

    #[test]
    fn op_norm_of_known_matrix() {
        // diag(3, 1) has operator norm 3
        let mut a = DMat::zeros(2, 2);
        a.set(0, 0, 3.0);
        a.set(1, 1, 1.0);
        assert!((a.op_norm() - 3.0).abs() < 1e-10);
    }

    #[test]
    fn qr_detects_rank() {
        let cols = vec![
            vec![1.0, 0.0, 0.0],
            vec![2.0, 0.0, 0.0], // dependent
            vec![0.0, 1.0, 0.0],
        ];
        let qr = pivoted_qr(&cols, 1e-10);
        assert_eq!(qr.rank, 2);
        // coordinates reproduce the inputs
        for (j, c) in cols.iter().enumerate() {
            let mut recon = [0.0; 3];
            for (k, qc) in qr.q.iter().enumerate() {
                for (r, val) in recon.iter_mut().enumerate() {
                    *val += qr.coords[j][k] * qc[r];
                }
            }
            for (a, b) in recon.iter().zip(c) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn jacobi_diagonalizes() {
        let mut a = DMat::zeros(3, 3);
        a.set(0, 0, 2.0);
        a.set(1, 1, 2.0);
        a.set(0, 1, 1.0);
        a.set(1, 0, 1.0);
        a.set(2, 2, 5.0);
        let (eig, v) = jacobi_symmetric(&a);
        assert!((eig[0] - 5.0).abs() < 1e-12);
        assert!((eig[1] - 3.0).abs() < 1e-12);
        assert!((eig[2] - 1.0).abs() < 1e-12);
        // V diagonalizes: ‖A·V − V·diag(eig)‖ small
        let av = a.matmul(&v);
        for c in 0..3 {
            for r in 0..3 {
                assert!((av.get(r, c) - eig[c] * v.get(r, c)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn svd_recovers_singular_values() {
        let mut a = DMat::zeros(2, 2);
        // antidiagonal (swap) with values 1/√2
        let x = std::f64::consts::FRAC_1_SQRT_2;
        a.set(0, 1, x);
        a.set(1, 0, x);
        let (u, s, v) = svd_small(&a);
        assert!((s[0] - x).abs() < 1e-12 && (s[1] - x).abs() < 1e-12);
        // reconstruction
        let mut sd = DMat::zeros(2, 2);
        sd.set(0, 0, s[0]);
        sd.set(1, 1, s[1]);
        let recon = u.matmul(&sd).matmul(&v.transpose());
        assert!(recon.sub(&a).max_abs() < 1e-12);
    }
}
