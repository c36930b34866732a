//! Dense complex linear algebra.
//!
//! Everything here works on small to medium matrices (up to a few hundred
//! rows and columns) and favours accuracy over speed: the SVD is one-sided
//! Jacobi, least squares goes through Householder QR, and rank decisions
//! on Gram matrices use diagonal pivoting.

use std::ops::{Index, IndexMut};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

const JACOBI_MAX_SWEEPS: usize = 80;
const QR_MAX_ITER_PER_EIGENVALUE: usize = 60;

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn diagonal(values: &[C64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[C64]) -> Result<Vec<C64>> {
        if x.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector of length {} against {} columns",
                x.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `A* x`
    pub fn adjoint_mul_vec(&self, x: &[C64]) -> Result<Vec<C64>> {
        if x.len() != self.rows {
            return Err(Error::Dimension(format!(
                "vector of length {} against {} rows",
                x.len(),
                self.rows
            )));
        }
        let mut out = vec![C64::new(0.0, 0.0); self.cols];
        for (i, xi) in x.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a.conj() * xi;
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &DenseMatrix) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension("shape mismatch in subtraction".into()));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn to_columns(&self) -> Vec<Vec<C64>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    fn from_columns(rows: usize, cols: &[Vec<C64>]) -> Self {
        Self::from_fn(rows, cols.len(), |i, j| cols[j][i])
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// `Σ conj(a_i) b_i`
pub fn dot_conj(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm2(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Thin singular value decomposition `A = U diag(s) V*` with
/// `k = min(rows, cols)` singular values in descending order.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: DenseMatrix,
    pub s: Vec<f64>,
    pub v: DenseMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> DenseMatrix {
        let k = self.s.len();
        let us = DenseMatrix::from_fn(self.u.rows(), k, |i, j| self.u[(i, j)] * self.s[j]);
        us.matmul(&self.v.adjoint()).expect("svd factors are conformant")
    }

    /// Left and right singular vectors of index `j`.
    pub fn pair(&self, j: usize) -> (Vec<C64>, Vec<C64>) {
        (self.u.column(j), self.v.column(j))
    }
}

pub fn svd(a: &DenseMatrix) -> Result<Svd> {
    if !a.is_finite() {
        return Err(Error::Invariant("svd input has non-finite entries".into()));
    }
    if a.rows() >= a.cols() {
        jacobi_svd_tall(a)
    } else {
        let t = jacobi_svd_tall(&a.adjoint())?;
        Ok(Svd {
            u: t.v,
            s: t.s,
            v: t.u,
        })
    }
}

/// One-sided (Hestenes) Jacobi on the columns of a matrix with
/// `rows >= cols`.
fn jacobi_svd_tall(a: &DenseMatrix) -> Result<Svd> {
    let m = a.rows();
    let n = a.cols();
    let mut cols = a.to_columns();
    let mut vcols: Vec<Vec<C64>> = (0..n)
        .map(|j| {
            let mut e = vec![C64::new(0.0, 0.0); n];
            e[j] = C64::new(1.0, 0.0);
            e
        })
        .collect();

    let tol = 4.0 * f64::EPSILON;
    let mut converged = n < 2;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma = dot_conj(&cols[p], &cols[q]);
                let g = gamma.norm();
                if g <= tol * (alpha * beta).sqrt() || g < f64::MIN_POSITIVE {
                    continue;
                }
                rotated = true;
                let phase_conj = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta == 0.0 {
                    1.0
                } else {
                    zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_pair(&mut cols, p, q, phase_conj, c, s);
                rotate_pair(&mut vcols, p, q, phase_conj, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            what: "one-sided Jacobi SVD",
            iterations: JACOBI_MAX_SWEEPS,
        });
    }

    let norms: Vec<f64> = cols.iter().map(|c| norm2(c)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let smax = order.first().map_or(0.0, |&i| norms[i]);

    let mut ucols: Vec<Vec<C64>> = Vec::with_capacity(n);
    let mut pending = Vec::new();
    let mut s = Vec::with_capacity(n);
    for (slot, &j) in order.iter().enumerate() {
        s.push(norms[j]);
        if norms[j] > smax * 1e-13 && norms[j] > 0.0 {
            ucols.push(cols[j].iter().map(|z| z / norms[j]).collect());
        } else {
            ucols.push(vec![C64::new(0.0, 0.0); m]);
            pending.push(slot);
        }
    }
    complete_orthonormal(&mut ucols, &pending, m);

    let v = DenseMatrix::from_columns(n, &order.iter().map(|&j| vcols[j].clone()).collect::<Vec<_>>());
    Ok(Svd {
        u: DenseMatrix::from_columns(m, &ucols),
        s,
        v,
    })
}

fn rotate_pair(cols: &mut [Vec<C64>], p: usize, q: usize, phase_conj: C64, c: f64, s: f64) {
    let (left, right) = cols.split_at_mut(q);
    let cp = &mut left[p];
    let cq = &mut right[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let yt = *y * phase_conj;
        let xn = *x * c - yt * s;
        let yn = *x * s + yt * c;
        *x = xn;
        *y = yn;
    }
}

/// Fill the columns listed in `pending` with unit vectors orthogonal to
/// every other column.
fn complete_orthonormal(cols: &mut [Vec<C64>], pending: &[usize], m: usize) {
    let mut candidate = 0;
    for &slot in pending {
        while candidate < m {
            let mut e = vec![C64::new(0.0, 0.0); m];
            e[candidate] = C64::new(1.0, 0.0);
            candidate += 1;
            for _ in 0..2 {
                for (k, c) in cols.iter().enumerate() {
                    if k == slot || norm2(c) == 0.0 {
                        continue;
                    }
                    let proj = dot_conj(c, &e);
                    for (ei, ci) in e.iter_mut().zip(c) {
                        *ei -= proj * ci;
                    }
                }
            }
            let nrm = norm2(&e);
            if nrm > 1e-8 {
                cols[slot] = e.iter().map(|z| z / nrm).collect();
                break;
            }
        }
    }
}

/// Diagonally pivoted Cholesky factorization of a Hermitian positive
/// semidefinite matrix, truncated at numerical rank.
#[derive(Clone, Debug)]
pub struct PivotedCholesky {
    /// Retained pivot indices, in elimination order.
    pub pivots: Vec<usize>,
    /// Lower-triangular `rank × rank` factor with
    /// `Gram[pivots, pivots] = L L*`.
    pub factor: DenseMatrix,
    pub dim: usize,
}

impl PivotedCholesky {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Coefficient matrix `C` (`dim × rank`) such that the vectors
    /// `Σ_q b_q C[q, i]` are orthonormal whenever `Gram[p, q] = ⟨b_q, b_p⟩`.
    /// Rows outside the pivot set are zero.
    pub fn orthonormalizer(&self) -> DenseMatrix {
        let r = self.rank();
        let linv = lower_triangular_inverse(&self.factor);
        let mut c = DenseMatrix::zeros(self.dim, r);
        for (a, &p) in self.pivots.iter().enumerate() {
            for i in 0..r {
                // (L^{-*})[a, i] = conj(L^{-1}[i, a])
                c[(p, i)] = linv[(i, a)].conj();
            }
        }
        c
    }
}

fn lower_triangular_inverse(l: &DenseMatrix) -> DenseMatrix {
    let n = l.rows();
    let mut inv = DenseMatrix::zeros(n, n);
    for j in 0..n {
        inv[(j, j)] = l[(j, j)].inv();
        for i in j + 1..n {
            let mut acc = C64::new(0.0, 0.0);
            for k in j..i {
                acc += l[(i, k)] * inv[(k, j)];
            }
            inv[(i, j)] = -acc / l[(i, i)];
        }
    }
    inv
}

/// Pivoted Cholesky with pivots dropped once the largest remaining diagonal
/// falls to `tol_rank` times the largest initial diagonal.
pub fn cholesky_psd(gram: &DenseMatrix, tol_rank: f64) -> Result<PivotedCholesky> {
    let n = gram.rows();
    if gram.cols() != n {
        return Err(Error::Dimension("Gram matrix must be square".into()));
    }
    let scale = gram.max_abs().max(f64::MIN_POSITIVE);
    for i in 0..n {
        for j in i..n {
            if (gram[(i, j)] - gram[(j, i)].conj()).norm() > 1e-10 * scale {
                return Err(Error::Invariant(format!(
                    "Gram matrix not Hermitian at ({i}, {j})"
                )));
            }
        }
    }

    let mut diag: Vec<f64> = (0..n).map(|i| gram[(i, i)].re).collect();
    let dmax = diag.iter().cloned().fold(0.0, f64::max);
    let tol = tol_rank * dmax;
    let mut perm: Vec<usize> = (0..n).collect();
    // l[row][step]
    let mut l = vec![Vec::<C64>::new(); n];
    let mut rank = 0;
    for k in 0..n {
        let (best, &dbest) = perm[k..]
            .iter()
            .enumerate()
            .map(|(i, &p)| (i + k, &diag[p]))
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty remainder");
        if let Some(neg) = perm[k..].iter().map(|&p| diag[p]).find(|&d| d < -tol.max(f64::MIN_POSITIVE)) {
            return Err(Error::NotPsd { value: neg, tol });
        }
        if dbest <= tol || dbest <= 0.0 {
            break;
        }
        perm.swap(k, best);
        let p = perm[k];
        let lkk = dbest.sqrt();
        for &i in &perm[k + 1..] {
            let dot: C64 = l[i].iter().zip(&l[p]).take(k).map(|(a, b)| a * b.conj()).sum();
            let v = (gram[(i, p)] - dot) / lkk;
            l[i].push(v);
            diag[i] -= v.norm_sqr();
        }
        l[p].push(C64::new(lkk, 0.0));
        for &i in &perm[..k] {
            l[i].push(C64::new(0.0, 0.0));
        }
        rank += 1;
    }
    if let Some(neg) = perm[rank..].iter().map(|&p| diag[p]).find(|&d| d < -tol.max(f64::MIN_POSITIVE)) {
        return Err(Error::NotPsd { value: neg, tol });
    }

    let pivots: Vec<usize> = perm[..rank].to_vec();
    let factor = DenseMatrix::from_fn(rank, rank, |a, b| {
        if b <= a {
            l[pivots[a]][b]
        } else {
            C64::new(0.0, 0.0)
        }
    });
    Ok(PivotedCholesky {
        pivots,
        factor,
        dim: n,
    })
}

#[derive(Clone, Debug)]
pub struct LeastSquares {
    pub x: Vec<C64>,
    pub residual: f64,
}

/// Minimum-norm least-squares solution of `A x ≈ b`.
pub fn least_squares(a: &DenseMatrix, b: &[C64]) -> Result<LeastSquares> {
    if b.len() != a.rows() {
        return Err(Error::Dimension(format!(
            "right-hand side of length {} for {} rows",
            b.len(),
            a.rows()
        )));
    }
    let n = a.cols();
    let x = if a.rows() > n && n > 0 {
        // reduce to the n×n triangle first
        let (r, qtb) = householder_qr(a, b);
        min_norm_solve(&r, &qtb[..n])?
    } else {
        min_norm_solve(a, b)?
    };
    let ax = a.mul_vec(&x)?;
    let residual = ax
        .iter()
        .zip(b)
        .map(|(p, q)| (p - q).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok(LeastSquares { x, residual })
}

fn min_norm_solve(a: &DenseMatrix, b: &[C64]) -> Result<Vec<C64>> {
    let n = a.cols();
    if n == 0 || a.rows() == 0 {
        return Ok(vec![C64::new(0.0, 0.0); n]);
    }
    let d = svd(a)?;
    let smax = d.s.first().copied().unwrap_or(0.0);
    let cutoff = smax * f64::EPSILON * (a.rows().max(n) as f64) * 4.0;
    let mut x = vec![C64::new(0.0, 0.0); n];
    for (j, &sj) in d.s.iter().enumerate() {
        if sj <= cutoff || sj == 0.0 {
            continue;
        }
        let (u, v) = d.pair(j);
        let coef = dot_conj(&u, b) / sj;
        for (xi, vi) in x.iter_mut().zip(&v) {
            *xi += coef * vi;
        }
    }
    Ok(x)
}

/// Returns the upper triangle `R` (`n × n`) and `Q* b`.
fn householder_qr(a: &DenseMatrix, b: &[C64]) -> (DenseMatrix, Vec<C64>) {
    let m = a.rows();
    let n = a.cols();
    let mut cols = a.to_columns();
    let mut rhs = b.to_vec();
    for k in 0..n.min(m) {
        let x = &cols[k][k..];
        let xnorm = norm2(x);
        if xnorm == 0.0 {
            continue;
        }
        let x0 = x[0];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { C64::new(1.0, 0.0) };
        let alpha = -phase * xnorm;
        let mut v: Vec<C64> = x.to_vec();
        v[0] -= alpha;
        let vnorm = norm2(&v);
        if vnorm == 0.0 {
            continue;
        }
        for vi in v.iter_mut() {
            *vi /= vnorm;
        }
        for col in cols.iter_mut().skip(k) {
            let tail = &mut col[k..];
            let proj = dot_conj(&v, tail) * 2.0;
            for (t, vi) in tail.iter_mut().zip(&v) {
                *t -= proj * vi;
            }
        }
        let tail = &mut rhs[k..];
        let proj = dot_conj(&v, tail) * 2.0;
        for (t, vi) in tail.iter_mut().zip(&v) {
            *t -= proj * vi;
        }
    }
    let r = DenseMatrix::from_fn(n, n, |i, j| if i <= j { cols[j][i] } else { C64::new(0.0, 0.0) });
    (r, rhs)
}

/// Determinant by LU with partial pivoting.
pub fn determinant(a: &DenseMatrix) -> Result<C64> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::Dimension("determinant of a non-square matrix".into()));
    }
    let mut m = a.clone();
    let mut det = C64::new(1.0, 0.0);
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| m[(i, k)].norm().total_cmp(&m[(j, k)].norm()))
            .expect("non-empty");
        if m[(p, k)].norm() == 0.0 {
            return Ok(C64::new(0.0, 0.0));
        }
        if p != k {
            for j in 0..n {
                let t = m[(k, j)];
                m[(k, j)] = m[(p, j)];
                m[(p, j)] = t;
            }
            det = -det;
        }
        let pivot = m[(k, k)];
        det *= pivot;
        for i in k + 1..n {
            let f = m[(i, k)] / pivot;
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            for j in k + 1..n {
                let t = m[(k, j)];
                m[(i, j)] -= f * t;
            }
        }
    }
    Ok(det)
}

/// Eigenvalues of an upper Hessenberg matrix by shifted QR with Givens
/// rotations and Wilkinson shifts.
pub fn hessenberg_eigenvalues(h: &DenseMatrix) -> Result<Vec<C64>> {
    let n = h.rows();
    if h.cols() != n {
        return Err(Error::Dimension("eigenvalues of a non-square matrix".into()));
    }
    let mut a = h.clone();
    let mut eig = Vec::with_capacity(n);
    let mut hi = n;
    let mut iter = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        if hi == 1 {
            eig.push(a[(0, 0)]);
            break;
        }
        let mut lo = hi - 1;
        while lo > 0 {
            let s = a[(lo, lo)].norm() + a[(lo - 1, lo - 1)].norm();
            let s = if s == 0.0 { 1.0 } else { s };
            if a[(lo, lo - 1)].norm() <= f64::EPSILON * s {
                a[(lo, lo - 1)] = C64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi - 1 {
            eig.push(a[(hi - 1, hi - 1)]);
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > QR_MAX_ITER_PER_EIGENVALUE * n {
            return Err(Error::NonConvergence {
                what: "Hessenberg QR",
                iterations: total,
            });
        }
        let p = a[(hi - 2, hi - 2)];
        let q = a[(hi - 2, hi - 1)];
        let r = a[(hi - 1, hi - 2)];
        let s = a[(hi - 1, hi - 1)];
        let mu = if iter.is_multiple_of(11) {
            // exceptional shift
            s + C64::new(r.norm() * 0.75, r.norm() * 0.4)
        } else {
            let half = (p - s) * 0.5;
            let disc = (half * half + q * r).sqrt();
            let m1 = (p + s) * 0.5 + disc;
            let m2 = (p + s) * 0.5 - disc;
            if (m1 - s).norm() < (m2 - s).norm() { m1 } else { m2 }
        };
        qr_step(&mut a, lo, hi, mu);
    }
    Ok(eig)
}

fn qr_step(a: &mut DenseMatrix, lo: usize, hi: usize, mu: C64) {
    for k in lo..hi {
        a[(k, k)] -= mu;
    }
    let mut rots = Vec::with_capacity(hi - lo);
    for k in lo..hi - 1 {
        let x = a[(k, k)];
        let y = a[(k + 1, k)];
        let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
        let (c, s) = if r == 0.0 {
            (1.0, C64::new(0.0, 0.0))
        } else if x.norm() == 0.0 {
            (0.0, y.conj() / r)
        } else {
            (x.norm() / r, (x / x.norm()) * y.conj() / r)
        };
        for j in k..hi {
            let u = a[(k, j)];
            let v = a[(k + 1, j)];
            a[(k, j)] = u * c + s * v;
            a[(k + 1, j)] = -s.conj() * u + v * c;
        }
        rots.push((c, s));
    }
    for (idx, (c, s)) in rots.into_iter().enumerate() {
        let k = lo + idx;
        for i in lo..(k + 2).min(hi) {
            let u = a[(i, k)];
            let v = a[(i, k + 1)];
            a[(i, k)] = u * c + v * s.conj();
            a[(i, k + 1)] = -u * s + v * c;
        }
    }
    for k in lo..hi {
        a[(k, k)] += mu;
    }
}

/// Roots of `Σ_k coeffs[k] z^k` via companion-matrix eigenvalues, polished
/// by Newton steps on the original polynomial.
pub fn polynomial_roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    let deg = match coeffs.iter().rposition(|c| c.norm() > 0.0) {
        Some(d) => d,
        None => return Err(Error::Parse("zero polynomial has no isolated roots".into())),
    };
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[deg];
    let mut comp = DenseMatrix::zeros(deg, deg);
    for i in 1..deg {
        comp[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for i in 0..deg {
        comp[(i, deg - 1)] = -coeffs[i] / lead;
    }
    let mut roots = hessenberg_eigenvalues(&comp)?;
    let poly = &coeffs[..=deg];
    for root in roots.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner_with_derivative(poly, *root);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            if !step.re.is_finite() || !step.im.is_finite() || step.norm() > 1e-3 * (1.0 + root.norm()) {
                break;
            }
            *root -= step;
        }
    }
    Ok(roots)
}

fn horner_with_derivative(poly: &[C64], z: C64) -> (C64, C64) {
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for c in poly.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DenseMatrix {
        DenseMatrix::from_fn(rows, cols, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    fn orthonormality_error(q: &DenseMatrix) -> f64 {
        let g = q.adjoint().matmul(q).unwrap();
        g.sub(&DenseMatrix::identity(q.cols())).unwrap().max_abs()
    }

    #[test]
    fn svd_identity_and_diagonal() {
        let d = svd(&DenseMatrix::identity(2)).unwrap();
        assert!((d.s[0] - 1.0).abs() < 1e-15 && (d.s[1] - 1.0).abs() < 1e-15);
        let d = svd(&DenseMatrix::diagonal(&[c(3.0, 0.0), c(0.0, 0.0)])).unwrap();
        assert!((d.s[0] - 3.0).abs() < 1e-15);
        assert_eq!(d.s[1], 0.0);
        assert!(orthonormality_error(&d.u) < 1e-12);
    }

    #[test]
    fn svd_random_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let r = rng.gen_range(1..=64);
            let k = rng.gen_range(1..=64);
            let a = random_matrix(&mut rng, r, k);
            let d = svd(&a).unwrap();
            let err = d.reconstruct().sub(&a).unwrap().frobenius_norm();
            assert!(err < 1e-10 * a.frobenius_norm(), "{r}x{k}: {err}");
            assert!(orthonormality_error(&d.u) < 1e-10);
            assert!(orthonormality_error(&d.v) < 1e-10);
            assert!(d.s.windows(2).all(|w| w[0] >= w[1]));
            assert!(d.s.iter().all(|&s| s >= 0.0));
        }
    }

    #[test]
    fn svd_rank_deficient_completes_u() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = random_matrix(&mut rng, 6, 1);
        let y = random_matrix(&mut rng, 1, 4);
        let a = x.matmul(&y).unwrap();
        let d = svd(&a).unwrap();
        assert!(d.s[1] < 1e-13 * d.s[0]);
        assert!(orthonormality_error(&d.u) < 1e-10);
        assert!(d.reconstruct().sub(&a).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn cholesky_identity_full_rank() {
        let f = cholesky_psd(&DenseMatrix::identity(3), 1e-9).unwrap();
        assert_eq!(f.rank(), 3);
        assert!(f.factor.sub(&DenseMatrix::identity(3)).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn cholesky_ones_rank_one() {
        let g = DenseMatrix::from_fn(2, 2, |_, _| c(1.0, 0.0));
        assert_eq!(cholesky_psd(&g, 1e-9).unwrap().rank(), 1);
    }

    #[test]
    fn cholesky_nearly_parallel_rank_one() {
        let angle: f64 = 1e-12;
        let u = [c(1.0, 0.0), c(0.0, 0.0)];
        let v = [c(angle.cos(), 0.0), c(angle.sin(), 0.0)];
        let vecs = [u, v];
        let g = DenseMatrix::from_fn(2, 2, |p, q| dot_conj(&vecs[p], &vecs[q]));
        assert_eq!(cholesky_psd(&g, 1e-9).unwrap().rank(), 1);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let g = DenseMatrix::from_rows(&[vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(2.0, 0.0), c(1.0, 0.0)]]).unwrap();
        assert!(matches!(cholesky_psd(&g, 1e-9), Err(Error::NotPsd { .. })));
        let g = DenseMatrix::diagonal(&[c(1.0, 0.0), c(-1.0, 0.0)]);
        assert!(matches!(cholesky_psd(&g, 1e-9), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn cholesky_orthonormalizer_on_random_family() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        // 7 vectors spanning a 4-dimensional space
        let basis = random_matrix(&mut rng, 10, 4);
        let mix = random_matrix(&mut rng, 4, 7);
        let b = basis.matmul(&mix).unwrap();
        let gram = b.adjoint().matmul(&b).unwrap();
        let f = cholesky_psd(&gram, 1e-9).unwrap();
        assert_eq!(f.rank(), 4);
        let sub = DenseMatrix::from_fn(4, 4, |i, j| gram[(f.pivots[i], f.pivots[j])]);
        let llh = f.factor.matmul(&f.factor.adjoint()).unwrap();
        assert!(llh.sub(&sub).unwrap().max_abs() < 1e-9);
        let e = b.matmul(&f.orthonormalizer()).unwrap();
        assert!(orthonormality_error(&e) < 1e-9);
    }

    #[test]
    fn least_squares_examples() {
        let b = vec![c(1.0, 2.0), c(-3.0, 0.5)];
        let ls = least_squares(&DenseMatrix::identity(2), &b).unwrap();
        assert!(ls.residual < 1e-15);
        assert!((ls.x[0] - b[0]).norm() < 1e-15 && (ls.x[1] - b[1]).norm() < 1e-15);

        let a = DenseMatrix::from_rows(&[vec![c(1.0, 0.0)], vec![c(1.0, 0.0)]]).unwrap();
        let ls = least_squares(&a, &[c(1.0, 0.0), c(3.0, 0.0)]).unwrap();
        assert!((ls.x[0] - c(2.0, 0.0)).norm() < 1e-14);
        assert!((ls.residual - 2f64.sqrt()).abs() < 1e-14);

        let ls = least_squares(&DenseMatrix::zeros(2, 3), &b).unwrap();
        assert!(ls.x.iter().all(|z| z.norm() == 0.0));
        assert!((ls.residual - norm2(&b)).abs() < 1e-15);
    }

    #[test]
    fn least_squares_residual_orthogonal_to_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let a = random_matrix(&mut rng, 40, 6);
            let b: Vec<C64> = (0..40).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let ls = least_squares(&a, &b).unwrap();
            let ax = a.mul_vec(&ls.x).unwrap();
            let r: Vec<C64> = b.iter().zip(&ax).map(|(p, q)| p - q).collect();
            let atr = a.adjoint_mul_vec(&r).unwrap();
            assert!(norm2(&atr) < 1e-9);
        }
    }

    #[test]
    fn least_squares_min_norm_for_wide_systems() {
        let a = DenseMatrix::from_rows(&[vec![c(1.0, 0.0), c(1.0, 0.0)]]).unwrap();
        let ls = least_squares(&a, &[c(2.0, 0.0)]).unwrap();
        assert!((ls.x[0] - c(1.0, 0.0)).norm() < 1e-14);
        assert!((ls.x[1] - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn determinant_swap_sign() {
        let a = DenseMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]).unwrap();
        assert!((determinant(&a).unwrap() + 1.0).norm() < 1e-15);
    }

    #[test]
    fn roots_of_known_polynomials() {
        // 1 - 0.4 z
        let r = polynomial_roots(&[c(1.0, 0.0), c(-0.4, 0.0)]).unwrap();
        assert!((r[0] - c(2.5, 0.0)).norm() < 1e-14);
        // (z - 0.5)(z + 2i)(z - 3)
        let want = [c(0.5, 0.0), c(0.0, -2.0), c(3.0, 0.0)];
        let mut coeffs = vec![c(1.0, 0.0)];
        for w in want {
            let mut next = vec![c(0.0, 0.0); coeffs.len() + 1];
            for (k, a) in coeffs.iter().enumerate() {
                next[k + 1] += a;
                next[k] -= a * w;
            }
            coeffs = next;
        }
        let r = polynomial_roots(&coeffs).unwrap();
        for w in want {
            assert!(r.iter().any(|z| (z - w).norm() < 1e-12), "missing root {w}");
        }
    }

    #[test]
    fn roots_of_high_degree_unit_circle_polynomial() {
        // z^12 - 0.5^12: roots on |z| = 0.5
        let mut coeffs = vec![c(0.0, 0.0); 13];
        coeffs[0] = c(-(0.5f64.powi(12)), 0.0);
        coeffs[12] = c(1.0, 0.0);
        let r = polynomial_roots(&coeffs).unwrap();
        assert_eq!(r.len(), 12);
        assert!(r.iter().all(|z| (z.norm() - 0.5).abs() < 1e-12));
    }
}
