//! Truncated block Hankel matrices of matrix symbols and their top Schmidt
//! pairs.
//!
//! `H_G x = P_−(G x)` maps `H²(ℂⁿ)` to `H²_−(ℂᵐ)`. In the bases
//! `{z^k e_b}` and `{z̄^{l+1} e_a}` its block `(l, k)` is `Ĝ(−l−k−1)`, so
//! row `l·m + a` and column `k·n + b` hold `Ĝ_{ab}(−(l+k+1))`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fourier::{CircleGrid, FourierVector, GridMatrix, GridVector, Riesz, TOL_TAIL};
use crate::linalg::{norm2, svd, DenseMatrix};

pub const DEFAULT_TRUNCATION: usize = 64;
pub const MAX_TRUNCATION: usize = 512;

#[derive(Clone, Debug)]
pub struct HankelRealization {
    trunc: usize,
    rows: usize,
    cols: usize,
    matrix: DenseMatrix,
    tail: f64,
    decay_rate: f64,
}

impl HankelRealization {
    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    /// Largest `|Ĝ(−p)|` with `p > 2N`, relative to the largest coefficient.
    pub fn tail(&self) -> f64 {
        self.tail
    }

    /// Geometric decay rate fitted to `max_{ab} |Ĝ_{ab}(−p)|`.
    pub fn decay_rate(&self) -> f64 {
        self.decay_rate
    }
}

/// Fits `ρ` in `|c_p| ≈ C ρ^p` by least squares on `log |c_p|`.
fn fit_decay(mags: &[(f64, f64)]) -> f64 {
    let top = mags.iter().map(|p| p.1).fold(0.0, f64::max);
    let pts: Vec<(f64, f64)> = mags
        .iter()
        .filter(|(_, m)| *m > 1e-12 * top && *m > 0.0)
        .map(|&(p, m)| (p, m.ln()))
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxy / sxx).exp().min(1.0)
}

fn negative_coefficient_profile(coeffs: &[FourierVector], half: i64) -> Vec<(f64, f64)> {
    (1..half)
        .map(|p| {
            let m = coeffs.iter().map(|c| c.coeff(0, -p).norm()).fold(0.0, f64::max);
            (p as f64, m)
        })
        .collect()
}

/// `(N·m) × (N·n)` block Hankel matrix of the sampled symbol.
pub fn build_hankel_matrix(g: &GridMatrix, trunc: usize) -> Result<HankelRealization> {
    let grid = g.grid();
    if trunc == 0 {
        return Err(Error::Config("truncation order must be positive".into()));
    }
    if grid.size() < 4 * trunc {
        return Err(Error::Config(format!(
            "grid size {} is below 4N = {}",
            grid.size(),
            4 * trunc
        )));
    }
    let (m, n) = (g.rows(), g.cols());
    let coeffs = g.transform_entries();
    for (idx, c) in coeffs.iter().enumerate() {
        c.check_bandwidth(TOL_TAIL, &format!("symbol entry ({}, {})", idx / n, idx % n))?;
    }
    let profile = negative_coefficient_profile(&coeffs, grid.half());
    let scale = coeffs
        .iter()
        .flat_map(|c| c.component(0).iter().map(|z| z.norm()))
        .fold(0.0, f64::max);
    let tail_abs = profile
        .iter()
        .filter(|(p, _)| *p > 2.0 * trunc as f64)
        .map(|(_, m)| *m)
        .fold(0.0, f64::max);
    let tail = if scale > 0.0 { tail_abs / scale } else { 0.0 };
    let decay_rate = fit_decay(&profile[..profile.len().min(2 * trunc)]);
    if tail >= TOL_TAIL {
        return Err(Error::Truncation {
            what: format!("symbol coefficients beyond frequency -2N have relative size {tail:e}"),
            decay_rate,
        });
    }
    let matrix = DenseMatrix::from_fn(trunc * m, trunc * n, |row, col| {
        let (l, a) = (row / m, row % m);
        let (k, b) = (col / n, col % n);
        coeffs[a * n + b].coeff(0, -((l + k + 1) as i64))
    });
    Ok(HankelRealization {
        trunc,
        rows: m,
        cols: n,
        matrix,
        tail,
        decay_rate,
    })
}

/// Rotates `v` so that its largest-modulus entry is real and positive;
/// returns the unimodular factor applied.
pub fn normalize_phase(v: &mut [C64]) -> C64 {
    let Some(big) = v.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())) else {
        return C64::new(1.0, 0.0);
    };
    if big.norm() == 0.0 {
        return C64::new(1.0, 0.0);
    }
    let phase = big.conj() / big.norm();
    for z in v.iter_mut() {
        *z *= phase;
    }
    phase
}

/// `Σ_k c_k z^k e_b` from the stacked coefficients `c[k·n + b]`.
pub fn lift_analytic(grid: CircleGrid, dim: usize, stacked: &[C64]) -> Result<FourierVector> {
    let terms = stacked
        .iter()
        .enumerate()
        .map(|(i, &v)| (i % dim, (i / dim) as i64, v));
    let mut out = FourierVector::from_terms(grid, dim, terms)?;
    out.mark_analytic(f64::INFINITY)?;
    Ok(out)
}

/// `Σ_l c_l z̄^{l+1} e_a` from the stacked coefficients `c[l·m + a]`.
pub fn lift_coanalytic(grid: CircleGrid, dim: usize, stacked: &[C64]) -> Result<FourierVector> {
    let terms = stacked
        .iter()
        .enumerate()
        .map(|(i, &v)| (i % dim, -((i / dim) as i64) - 1, v));
    FourierVector::from_terms(grid, dim, terms)
}

/// Relative `ℓ²` mass of the stacked coefficients with block index at
/// least `3N/4`.
fn high_block_mass(stacked: &[C64], dim: usize, trunc: usize) -> f64 {
    let cut = (3 * trunc / 4) * dim;
    let total = norm2(stacked);
    if total == 0.0 {
        return 0.0;
    }
    norm2(&stacked[cut.min(stacked.len())..]) / total
}

#[derive(Clone, Debug)]
pub struct SchmidtPair {
    pub x: GridVector,
    pub y: GridVector,
    pub x_coeffs: FourierVector,
    pub y_coeffs: FourierVector,
    /// `‖H x − t y‖ / t`, measured with the full symbol on the grid.
    pub residual_x: f64,
    /// `‖H* y − t x‖ / t`.
    pub residual_y: f64,
}

#[derive(Clone, Debug)]
pub struct HankelTop {
    pub t: f64,
    /// Second singular value, `0` when there is none.
    pub second: f64,
    /// `None` when `t` is below the rank threshold.
    pub pair: Option<SchmidtPair>,
}

/// Applies `H_G` and `H_G*` on the grid and compares with the pair.
pub fn schmidt_residuals(
    g: &GridMatrix,
    t: f64,
    x: &FourierVector,
    y: &FourierVector,
) -> Result<(f64, f64)> {
    let gx = g.mul_vector(&x.inverse())?.transform().riesz_project(Riesz::Minus);
    let rx = residual_norm(&gx, y, t)?;
    let gy = g.left_mul_adjoint(&y.inverse())?.conj().transform().riesz_project(Riesz::Plus);
    let ry = residual_norm(&gy, x, t)?;
    Ok((rx / t, ry / t))
}

fn residual_norm(image: &FourierVector, target: &FourierVector, t: f64) -> Result<f64> {
    let mut acc = 0.0;
    for c in 0..image.dim() {
        for (a, b) in image.component(c).iter().zip(target.component(c)) {
            acc += (a - b * t).norm_sqr();
        }
    }
    Ok(acc.sqrt())
}

/// Top singular value of the realization, with the lifted pair
/// `x = Σ_k v[k·n+b] z^k e_b`, `y = H x / t`.
pub fn top_schmidt_pair(h: &HankelRealization, g: &GridMatrix, tol_rank: f64) -> Result<HankelTop> {
    let dec = svd(&h.matrix)?;
    let t = dec.s.first().copied().unwrap_or(0.0);
    let second = dec.s.get(1).copied().unwrap_or(0.0);
    let scale = g.sup_abs();
    if t <= tol_rank * scale || t == 0.0 {
        return Ok(HankelTop {
            t,
            second,
            pair: None,
        });
    }
    let mut v = dec.v.column(0);
    normalize_phase(&mut v);
    let hv = h.matrix.mul_vec(&v)?;
    let u: Vec<C64> = hv.iter().map(|z| z / t).collect();
    let grid = g.grid();
    let x_coeffs = lift_analytic(grid, h.cols, &v)?;
    let y_coeffs = lift_coanalytic(grid, h.rows, &u)?;
    let (residual_x, residual_y) = schmidt_residuals(g, t, &x_coeffs, &y_coeffs)?;
    Ok(HankelTop {
        t,
        second,
        pair: Some(SchmidtPair {
            x: x_coeffs.inverse(),
            y: y_coeffs.inverse(),
            x_coeffs,
            y_coeffs,
            residual_x,
            residual_y,
        }),
    })
}

/// Builds the realization at `start`, doubling `N` up to `max` while the
/// coefficient tail, the lifted vector tails or the operator residuals
/// exceed their tolerances.
pub fn hankel_top_adaptive(
    g: &GridMatrix,
    start: usize,
    max: usize,
    tol_rank: f64,
    tol_residual: f64,
) -> Result<(HankelRealization, HankelTop)> {
    let mut trunc = start;
    loop {
        let attempt = build_hankel_matrix(g, trunc).and_then(|h| {
            let top = top_schmidt_pair(&h, g, tol_rank)?;
            if let Some(pair) = &top.pair {
                let v: Vec<C64> = stacked(&pair.x_coeffs, trunc, false);
                let u: Vec<C64> = stacked(&pair.y_coeffs, trunc, true);
                let mass = high_block_mass(&v, h.cols, trunc).max(high_block_mass(&u, h.rows, trunc));
                let residual = pair.residual_x.max(pair.residual_y);
                if mass >= tol_residual || residual >= tol_residual {
                    return Err(Error::Truncation {
                        what: format!(
                            "top Schmidt pair not resolved at N = {trunc} (tail {mass:e}, residual {residual:e})"
                        ),
                        decay_rate: h.decay_rate,
                    });
                }
            }
            Ok((h, top))
        });
        match attempt {
            Err(e @ Error::Truncation { .. }) => {
                let next = trunc * 2;
                if next > max || 4 * next > g.grid().size() {
                    return Err(e);
                }
                trunc = next;
            }
            other => return other,
        }
    }
}

fn stacked(f: &FourierVector, trunc: usize, coanalytic: bool) -> Vec<C64> {
    let dim = f.dim();
    (0..trunc * dim)
        .map(|i| {
            let (blk, c) = (i / dim, i % dim);
            let k = if coanalytic { -(blk as i64) - 1 } else { blk as i64 };
            f.coeff(c, k)
        })
        .collect()
}
