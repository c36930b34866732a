//! Analytic candidates `Q`: reading and writing them, and checking a
//! candidate against the level-0 Schmidt conditions and the constancy of
//! the singular values of `G − Q` on the circle.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::{CircleGrid, FourierVector};
use crate::hankel::hankel_top_adaptive;
use crate::linalg::DenseMatrix;
use crate::rational::{laurent_matrix_document, parse_laurent_matrix, sample_symbol, LaurentPoly, SymbolSpec};
use crate::solver::{error_profile, PolyMatrix, SolverConfig};

/// Default tolerance of [`check_candidate`].
pub const DEFAULT_CHECK_TOL: f64 = 1e-6;

/// Reads a candidate written in the symbol schema with Laurent entries of
/// nonnegative exponents only.
pub fn parse_candidate(document: &str) -> Result<PolyMatrix> {
    let (m, n, entries) = parse_laurent_matrix(document)?;
    if m == 0 || n == 0 {
        return Err(Error::Dimension(format!("candidate has shape {m}x{n}")));
    }
    let mut degree = 0usize;
    for (i, p) in entries.iter().enumerate() {
        if let Some(lo) = p.min_exponent().filter(|&k| k < 0) {
            return Err(Error::Parse(format!(
                "candidate entry ({}, {}) has the negative exponent {lo}; Q must be analytic",
                i / n,
                i % n
            )));
        }
        degree = degree.max(p.max_exponent().unwrap_or(0) as usize);
    }
    let coeffs = (0..=degree)
        .map(|d| {
            DenseMatrix::from_fn(m, n, |r, c| {
                entries[r * n + c]
                    .terms()
                    .find(|&(k, _)| k == d as i64)
                    .map_or(C64::new(0.0, 0.0), |(_, v)| v)
            })
        })
        .collect();
    PolyMatrix::from_coefficients(coeffs)
}

/// Document of `q` in the candidate schema. Zero coefficients are omitted.
pub fn candidate_document(q: &PolyMatrix) -> Result<serde_json::Value> {
    let entries: Vec<LaurentPoly> = (0..q.rows())
        .flat_map(|r| (0..q.cols()).map(move |c| (r, c)))
        .map(|(r, c)| {
            LaurentPoly::new(
                (0..=q.degree())
                    .map(|d| (d as i64, q.coefficient(d)[(r, c)]))
                    .filter(|(_, v)| v.norm() > 0.0),
            )
        })
        .collect();
    laurent_matrix_document(q.rows(), q.cols(), &entries)
}

/// The analytic part of a matrix function from the Fourier coefficients of
/// its entries (row-major), dropping coefficients below
/// `rel_floor · max |coefficient|` and trimming the degree accordingly.
pub fn truncate_analytic(rows: usize, cols: usize, entries: &[FourierVector], rel_floor: f64) -> Result<PolyMatrix> {
    if entries.len() != rows * cols || entries.is_empty() {
        return Err(Error::Dimension(format!(
            "{} coefficient vectors for a {rows}x{cols} matrix",
            entries.len()
        )));
    }
    let half = entries[0].grid().half();
    let scale = entries
        .iter()
        .flat_map(|e| e.component(0).iter())
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let floor = rel_floor * scale;
    let keep = |z: C64| if z.norm() > floor { z } else { C64::new(0.0, 0.0) };
    let degree = (0..half)
        .rev()
        .find(|&k| entries.iter().any(|e| e.coeff(0, k).norm() > floor))
        .unwrap_or(0) as usize;
    let coeffs = (0..=degree)
        .map(|d| DenseMatrix::from_fn(rows, cols, |r, c| keep(entries[r * cols + c].coeff(0, d as i64))))
        .collect();
    PolyMatrix::from_coefficients(coeffs)
}

#[derive(Clone, Debug, Serialize)]
pub struct ProfileCheck {
    /// Index `j` of the singular value `s_j((G − Q)(θ))`.
    pub index: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub stddev: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CandidateReport {
    pub tol: f64,
    /// `‖H_G‖`.
    pub t0: f64,
    /// `‖(G − Q)x_0 − t_0 y_0‖ / t_0` in `L²`.
    pub residual_x: f64,
    /// `‖(G − Q)* y_0 − t_0 x_0‖ / t_0` in `L²`.
    pub residual_y: f64,
    /// `max_θ ‖(G − Q)(θ)‖`.
    pub sup_error: f64,
    pub level0_pass: bool,
    pub profiles: Vec<ProfileCheck>,
    pub pass: bool,
}

/// Checks whether `q` satisfies `(G − Q)x_0 = t_0 y_0`,
/// `(G − Q)* y_0 = t_0 x_0` and `‖G − Q‖_∞ = t_0`, and whether every
/// singular value of `G − Q` is constant on the grid. Deviations are
/// measured relative to `t_0` (or to `sup |G|` when `G` is analytic).
pub fn check_candidate(spec: &SymbolSpec, q: &PolyMatrix, config: &SolverConfig, tol: f64) -> Result<CandidateReport> {
    config.validate()?;
    if q.rows() != spec.rows() || q.cols() != spec.cols() {
        return Err(Error::Dimension(format!(
            "candidate is {}x{} but the symbol is {}x{}",
            q.rows(),
            q.cols(),
            spec.rows(),
            spec.cols()
        )));
    }
    let grid = CircleGrid::new(config.grid_size)?;
    let g = sample_symbol(spec, grid)?;
    let qs = q.sample(grid);
    let diff = g.sub(&qs)?;
    let max_trunc = config.max_trunc.min(grid.size() / 4).max(config.trunc);
    let (_, top) = hankel_top_adaptive(&g, config.trunc, max_trunc, config.tol_rank, config.tol_residual)?;

    let scale = if top.pair.is_some() { top.t } else { g.sup_abs().max(1.0) };
    let profile = error_profile(&g, &qs)?;
    let sup_error = profile.iter().map(|s| s[0]).fold(0.0, f64::max);

    let (residual_x, residual_y) = match &top.pair {
        Some(pair) => {
            let ex = diff.mul_vector(&pair.x)?.sub(&pair.y.scale(C64::new(top.t, 0.0)))?;
            let ey = diff
                .left_mul_adjoint(&pair.y)?
                .conj()
                .sub(&pair.x.scale(C64::new(top.t, 0.0)))?;
            (ex.l2_norm() / top.t, ey.l2_norm() / top.t)
        }
        None => (0.0, 0.0),
    };
    let t0 = if top.pair.is_some() { top.t } else { 0.0 };
    let level0_pass = residual_x < tol && residual_y < tol && sup_error <= t0 + tol * scale;

    let count = spec.rows().min(spec.cols());
    let profiles: Vec<ProfileCheck> = (0..count)
        .map(|j| {
            let col: Vec<f64> = profile.iter().map(|s| s[j]).collect();
            let len = col.len() as f64;
            let mean = col.iter().sum::<f64>() / len;
            let stddev = (col.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / len).sqrt();
            ProfileCheck {
                index: j,
                min: col.iter().copied().fold(f64::INFINITY, f64::min),
                max: col.iter().copied().fold(0.0, f64::max),
                mean,
                stddev,
                pass: stddev < tol * scale,
            }
        })
        .collect();
    let pass = level0_pass && profiles.iter().all(|p| p.pass);
    Ok(CandidateReport {
        tol,
        t0,
        residual_x,
        residual_y,
        sup_error,
        level0_pass,
        profiles,
        pass,
    })
}
