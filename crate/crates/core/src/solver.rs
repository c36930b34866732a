//! The level recursion.
//!
//! Level 0 takes the top Schmidt pair `(x_0, y_0)` of the Hankel operator
//! `H_G`. Level `j ≥ 1`:
//!
//! 1. find an analytic `Q_j` with `(G − Q_j)x_i = t_i y_i` and
//!    `y_i*(G − Q_j) = t_i x_i*` for `i < j`;
//! 2. realize `T_j(Ξ ∧̇ f) = P_Y(H ∧̇ (G − Q_j) f)` between
//!    `X_j = Ξ ∧̇ H²(ℂⁿ)` and `Y_j = H ∧̇ H²_−(ℂᵐ)`, where
//!    `Ξ = ξ_0 ∧̇ … ∧̇ ξ_{j−1}` and `H = η̄_0 ∧̇ … ∧̇ η̄_{j−1}`;
//! 3. take its top singular value `t_j` and Schmidt preimages
//!    `(v_j, w_j)`, then `x_j = (I − Σ ξ_i ξ_i*) v_j`,
//!    `y_j = (I − Σ η̄_i η̄_i*) w_j`, `h_j` the outer factor of `‖x_j‖²`,
//!    `ξ_j = x_j / h_j` and `η_j = z̄ ȳ_j / h_j`.
//!
//! The recursion stops once `t_j < tol_rank·t_0` or `j = min(m, n)`, and
//! `𝒜G = G − Σ_i t_i y_i x_i* / |h_i|²`.
//!
//! In the truncated bases `{z^k e_b}` (`k < N`) and `{z̄^{l+1} e_a}`
//! (`l < N`) the Gram matrices and `T_j` only need the Fourier
//! coefficients of three pointwise kernels:
//!
//! ```text
//! K_{l,l'}  = ⟨Ξ ∧ e_l', Ξ ∧ e_l⟩          Gram_X[(k,l),(k',l')] = K̂_{l,l'}(k − k')
//! K^Y_{a,a'} = ⟨H ∧ e_a', H ∧ e_a⟩         Gram_Y[(l,a),(l',a')] = K̂^Y_{a,a'}(l' − l)
//! L_{a,b}   = ⟨H ∧ (G − Q)e_b, H ∧ e_a⟩    R[(l,a),(k,b)]        = L̂_{a,b}(−(k + l + 1))
//! ```

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::{CircleGrid, FourierVector, GridMatrix, GridScalar, GridVector, DEFAULT_GRID_SIZE, TOL_TAIL};
use crate::hankel::{
    hankel_top_adaptive, lift_analytic, lift_coanalytic, normalize_phase, DEFAULT_TRUNCATION, MAX_TRUNCATION,
};
use crate::linalg::{cholesky_psd, least_squares, norm2, svd, DenseMatrix};
use crate::outer::{check_outer, inner_outer_split, spectral_factor, OuterScalar, DEFAULT_TOL_ANALYTIC, DEFAULT_TOL_ZERO};
use crate::rational::{sample_symbol, SymbolSpec};
use crate::wedge::{exterior_append, frame_orthonormality_deviation, project_out_frame, WedgeGridVector};

/// Tolerance for the pointwise invariants recorded per level and in the
/// report.
pub const INVARIANT_TOL: f64 = 1e-6;
/// Slack allowed in `t_0 ≥ t_1 ≥ …`.
pub const MONOTONE_SLACK: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolverConfig {
    pub grid_size: usize,
    pub trunc: usize,
    pub max_trunc: usize,
    pub max_q_degree: usize,
    pub tol_rank: f64,
    pub tol_residual: f64,
    pub tol_zero: f64,
    pub tol_analytic: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            grid_size: DEFAULT_GRID_SIZE,
            trunc: DEFAULT_TRUNCATION,
            max_trunc: MAX_TRUNCATION,
            max_q_degree: 16,
            tol_rank: 1e-9,
            tol_residual: 1e-8,
            tol_zero: DEFAULT_TOL_ZERO,
            tol_analytic: DEFAULT_TOL_ANALYTIC,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        CircleGrid::new(self.grid_size)?;
        if self.trunc == 0 || 4 * self.trunc > self.grid_size {
            return Err(Error::Config(format!(
                "truncation N = {} must satisfy 1 ≤ 4N ≤ grid size {}",
                self.trunc, self.grid_size
            )));
        }
        if self.max_trunc < self.trunc {
            return Err(Error::Config("max truncation is below the starting truncation".into()));
        }
        if self.max_q_degree == 0 || 4 * self.max_q_degree > self.grid_size {
            return Err(Error::Config(format!(
                "max-q-degree {} must be positive and at most a quarter of the grid size",
                self.max_q_degree
            )));
        }
        for (name, v) in [
            ("tol-rank", self.tol_rank),
            ("tol-residual", self.tol_residual),
            ("tol-zero", self.tol_zero),
            ("tol-analytic", self.tol_analytic),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be a positive number, got {v}")));
            }
        }
        Ok(())
    }

    /// Degrees tried for `Q_j`: 1, 2, 4, … capped at `max_q_degree`.
    pub fn q_degree_schedule(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut d = 1;
        while d < self.max_q_degree {
            out.push(d);
            d *= 2;
        }
        out.push(self.max_q_degree);
        out
    }
}

/// Analytic matrix polynomial `Σ_{d} C_d z^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    coeffs: Vec<DenseMatrix>,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            coeffs: vec![DenseMatrix::zeros(rows, cols)],
        }
    }

    pub fn from_coefficients(coeffs: Vec<DenseMatrix>) -> Result<Self> {
        let first = coeffs
            .first()
            .ok_or_else(|| Error::Dimension("polynomial needs at least one coefficient".into()))?;
        let (rows, cols) = (first.rows(), first.cols());
        if coeffs.iter().any(|c| c.rows() != rows || c.cols() != cols) {
            return Err(Error::Dimension("coefficient shapes differ".into()));
        }
        Ok(Self { rows, cols, coeffs })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficient(&self, d: usize) -> &DenseMatrix {
        &self.coeffs[d]
    }

    pub fn eval(&self, z: C64) -> DenseMatrix {
        let mut acc = DenseMatrix::zeros(self.rows, self.cols);
        for c in self.coeffs.iter().rev() {
            acc = DenseMatrix::from_fn(self.rows, self.cols, |i, j| acc[(i, j)] * z + c[(i, j)]);
        }
        acc
    }

    pub fn sample(&self, grid: CircleGrid) -> GridMatrix {
        let m = grid.size();
        let mut out = GridMatrix::zeros(grid, self.rows, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                let samples = out.entry_mut(r, c);
                for (j, s) in samples.iter_mut().enumerate() {
                    *s = self
                        .coeffs
                        .iter()
                        .enumerate()
                        .map(|(d, cd)| cd[(r, c)] * grid.point((d * j) % m))
                        .sum();
                }
            }
        }
        out
    }
}

/// One completed level's data entering the interpolation conditions.
#[derive(Clone, Debug)]
pub struct InterpolationPair {
    pub t: f64,
    pub x: GridVector,
    pub y: GridVector,
}

#[derive(Clone, Debug)]
pub struct QSolution {
    pub q: PolyMatrix,
    /// Largest constraint residual in `L²`, relative to `‖G‖_∞ · max ‖x_i‖`.
    pub residual: f64,
}

fn sup_frobenius(g: &GridMatrix) -> f64 {
    (0..g.grid().size())
        .map(|k| g.at(k).frobenius_norm())
        .fold(0.0, f64::max)
}

/// Relative residual of both constraint families for `D = G − Q`.
pub fn interpolant_residual(diff: &GridMatrix, scale: f64, pairs: &[InterpolationPair]) -> Result<f64> {
    let mut worst = 0.0f64;
    let mut xmax = 0.0f64;
    for p in pairs {
        let lhs = diff.mul_vector(&p.x)?;
        let first = lhs.sub(&p.y.scale(C64::new(p.t, 0.0)))?.l2_norm();
        let row = diff.left_mul_adjoint(&p.y)?;
        let second = row.sub(&p.x.conj().scale(C64::new(p.t, 0.0)))?.l2_norm();
        worst = worst.max(first).max(second);
        xmax = xmax.max(p.x.l2_norm());
    }
    let denom = scale * xmax;
    Ok(if denom > 0.0 { worst / denom } else { worst })
}

/// Least-squares fit of a degree-`degree` analytic `Q` to both constraint
/// families, sampled at every grid point.
pub fn solve_interpolant_q(g: &GridMatrix, pairs: &[InterpolationPair], degree: usize) -> Result<QSolution> {
    let (m, n) = (g.rows(), g.cols());
    if pairs.is_empty() {
        return Ok(QSolution {
            q: PolyMatrix::zeros(m, n),
            residual: 0.0,
        });
    }
    let grid = g.grid();
    let size = grid.size();
    let unknowns = (degree + 1) * m * n;
    let idx = |d: usize, r: usize, c: usize| (d * m + r) * n + c;
    let rows = size * pairs.len() * (m + n);
    let mut a = DenseMatrix::zeros(rows, unknowns);
    let mut b = vec![C64::new(0.0, 0.0); rows];
    let mut row = 0;
    for p in pairs {
        let t = C64::new(p.t, 0.0);
        for j in 0..size {
            let powers: Vec<C64> = (0..=degree).map(|d| grid.point((d * j) % size)).collect();
            let x = p.x.at(j);
            let y = p.y.at(j);
            let gm = g.at(j);
            for r in 0..m {
                let mut gx = C64::new(0.0, 0.0);
                for c in 0..n {
                    gx += gm[(r, c)] * x[c];
                    for (d, zd) in powers.iter().enumerate() {
                        a[(row, idx(d, r, c))] = zd * x[c];
                    }
                }
                b[row] = gx - t * y[r];
                row += 1;
            }
            for c in 0..n {
                let mut yg = C64::new(0.0, 0.0);
                for r in 0..m {
                    yg += y[r].conj() * gm[(r, c)];
                    for (d, zd) in powers.iter().enumerate() {
                        a[(row, idx(d, r, c))] = y[r].conj() * zd;
                    }
                }
                b[row] = yg - t * x[c].conj();
                row += 1;
            }
        }
    }
    let sol = least_squares(&a, &b)?;
    let coeffs = (0..=degree)
        .map(|d| DenseMatrix::from_fn(m, n, |r, c| sol.x[idx(d, r, c)]))
        .collect();
    let q = PolyMatrix::from_coefficients(coeffs)?;
    let diff = g.sub(&q.sample(grid))?;
    let residual = interpolant_residual(&diff, sup_frobenius(g), pairs)?;
    Ok(QSolution { q, residual })
}

/// Tries the configured degree schedule and returns the first interpolant
/// whose residual is below `tol_residual`.
pub fn solve_interpolant_schedule(
    g: &GridMatrix,
    pairs: &[InterpolationPair],
    config: &SolverConfig,
) -> Result<QSolution> {
    if pairs.is_empty() {
        return solve_interpolant_q(g, pairs, 0);
    }
    let mut best = f64::INFINITY;
    for d in config.q_degree_schedule() {
        let sol = solve_interpolant_q(g, pairs, d)?;
        if sol.residual < config.tol_residual {
            return Ok(sol);
        }
        best = best.min(sol.residual);
    }
    Err(Error::InterpolantNotFound {
        degree: config.max_q_degree,
        residual: best,
    })
}

/// Orthonormalized truncated bases of `X_j` and `Y_j`.
#[derive(Clone, Debug)]
pub struct LevelBases {
    grid: CircleGrid,
    m: usize,
    n: usize,
    trunc: usize,
    pub gram_x: DenseMatrix,
    pub gram_y: DenseMatrix,
    /// `C_X`: `Σ_q b_q C_X[q, i]` are orthonormal in `X_j`.
    pub ortho_x: DenseMatrix,
    pub ortho_y: DenseMatrix,
    eta_wedge: WedgeGridVector,
    y_wedges: Vec<WedgeGridVector>,
}

impl LevelBases {
    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn rank_x(&self) -> usize {
        self.ortho_x.cols()
    }

    pub fn rank_y(&self) -> usize {
        self.ortho_y.cols()
    }
}

/// `out[i][j]` holds the FFT of `⟨cols[j](θ), rows[i](θ)⟩`.
fn kernel_fft(rows: &[WedgeGridVector], cols: &[WedgeGridVector]) -> Result<Vec<Vec<FourierVector>>> {
    rows.iter()
        .map(|r| cols.iter().map(|c| Ok(c.pointwise_inner(r)?.transform())).collect())
        .collect()
}

fn append_units(base: &WedgeGridVector, dim: usize) -> Result<Vec<WedgeGridVector>> {
    (0..dim)
        .map(|l| exterior_append(base, &GridVector::unit(base.grid(), dim, l)))
        .collect()
}

/// Gram matrices of `{Ξ ∧̇ z^k e_l}` and `{H ∧̇ z̄^{l+1} e_a}` for `k, l < N`
/// and their pivoted-Cholesky orthonormalizers.
pub fn build_level_bases(
    grid: CircleGrid,
    n: usize,
    m: usize,
    xi_frame: &[GridVector],
    eta_frame: &[GridVector],
    trunc: usize,
    tol_rank: f64,
) -> Result<LevelBases> {
    if 4 * trunc > grid.size() {
        return Err(Error::Config(format!("grid size {} is below 4N = {}", grid.size(), 4 * trunc)));
    }
    let xi_wedge = WedgeGridVector::from_frame(grid, n, xi_frame)?;
    let eta_bar: Vec<GridVector> = eta_frame.iter().map(GridVector::conj).collect();
    let eta_wedge = WedgeGridVector::from_frame(grid, m, &eta_bar)?;

    let x_wedges = append_units(&xi_wedge, n)?;
    let kx = kernel_fft(&x_wedges, &x_wedges)?;
    let gram_x = DenseMatrix::from_fn(trunc * n, trunc * n, |p, q| {
        let (k, l) = (p / n, p % n);
        let (k2, l2) = (q / n, q % n);
        kx[l][l2].coeff(0, k as i64 - k2 as i64)
    });

    let y_wedges = append_units(&eta_wedge, m)?;
    let ky = kernel_fft(&y_wedges, &y_wedges)?;
    let gram_y = DenseMatrix::from_fn(trunc * m, trunc * m, |p, q| {
        let (l, a) = (p / m, p % m);
        let (l2, a2) = (q / m, q % m);
        ky[a][a2].coeff(0, l2 as i64 - l as i64)
    });

    let ortho_x = cholesky_psd(&gram_x, tol_rank)?.orthonormalizer();
    let ortho_y = cholesky_psd(&gram_y, tol_rank)?.orthonormalizer();
    Ok(LevelBases {
        grid,
        m,
        n,
        trunc,
        gram_x,
        gram_y,
        ortho_x,
        ortho_y,
        eta_wedge,
        y_wedges,
    })
}

#[derive(Clone, Debug)]
pub struct LevelOperator {
    /// Cross matrix between the raw bases.
    pub cross: DenseMatrix,
    /// `T = C_Y* R C_X` in the orthonormalized bases.
    pub t: DenseMatrix,
}

/// Matrix of `T_j` between the orthonormalized bases.
pub fn assemble_t_matrix(g: &GridMatrix, q: &PolyMatrix, bases: &LevelBases) -> Result<LevelOperator> {
    let (m, n, trunc) = (bases.m, bases.n, bases.trunc);
    if g.rows() != m || g.cols() != n || q.rows() != m || q.cols() != n {
        return Err(Error::Dimension("symbol, interpolant and bases disagree in shape".into()));
    }
    let grid = bases.grid;
    let diff = g.sub(&q.sample(grid))?;
    let images = (0..n)
        .map(|b| {
            let col = GridVector::new(grid, (0..m).map(|r| diff.entry(r, b).to_vec()).collect())?;
            exterior_append(&bases.eta_wedge, &col)
        })
        .collect::<Result<Vec<_>>>()?;
    let kernel = kernel_fft(&bases.y_wedges, &images)?;

    let scale = kernel
        .iter()
        .flatten()
        .flat_map(|f| f.component(0).iter().map(|z| z.norm()))
        .fold(0.0, f64::max);
    let tail = kernel
        .iter()
        .flatten()
        .flat_map(|f| (2 * trunc as i64 + 1..grid.half()).map(move |p| f.coeff(0, -p).norm()))
        .fold(0.0, f64::max);
    if scale > 0.0 && tail >= TOL_TAIL * scale {
        return Err(Error::Truncation {
            what: format!("level kernel coefficients beyond frequency -2N have relative size {:e}", tail / scale),
            decay_rate: f64::NAN,
        });
    }
    for row in &kernel {
        for f in row {
            f.check_bandwidth(TOL_TAIL, "level kernel")?;
        }
    }

    let cross = DenseMatrix::from_fn(trunc * m, trunc * n, |p, qi| {
        let (l, a) = (p / m, p % m);
        let (k, b) = (qi / n, qi % n);
        kernel[a][b].coeff(0, -((k + l + 1) as i64))
    });
    let t = bases.ortho_y.adjoint().matmul(&cross)?.matmul(&bases.ortho_x)?;
    Ok(LevelOperator { cross, t })
}

/// Top singular data of one level, lifted to grid functions.
#[derive(Clone, Debug)]
pub struct LevelSchmidt {
    pub t: f64,
    pub second: f64,
    /// `v_j ∈ H²(ℂⁿ)` and its coefficients.
    pub v: GridVector,
    pub v_coeffs: FourierVector,
    /// `w_j ∈ H²_−(ℂᵐ)` and its coefficients.
    pub w: GridVector,
    pub w_coeffs: FourierVector,
    /// Relative `ℓ²` mass of the lifted coefficients in blocks `≥ 3N/4`.
    pub tail: f64,
}

impl LevelSchmidt {
    /// Multiplies both Schmidt vectors by the same unimodular scalar.
    pub fn rotate(&mut self, phase: C64) {
        self.v = self.v.scale(phase);
        self.w = self.w.scale(phase);
        self.v_coeffs = scale_coeffs(&self.v_coeffs, phase);
        self.w_coeffs = scale_coeffs(&self.w_coeffs, phase);
    }
}

fn scale_coeffs(f: &FourierVector, s: C64) -> FourierVector {
    let mut out = f.clone();
    for (c, k, v) in f.iter_frequency() {
        if v != C64::new(0.0, 0.0) {
            out.set_coeff(c, k, v * s);
        }
    }
    out
}

#[derive(Clone, Debug)]
pub enum SchmidtOutcome {
    Pair(LevelSchmidt),
    /// `t ≤ threshold`: the level operator vanishes numerically.
    Vanishing { t: f64 },
}

fn block_tail(stacked: &[C64], dim: usize, trunc: usize) -> f64 {
    let total = norm2(stacked);
    if total == 0.0 {
        return 0.0;
    }
    let cut = ((3 * trunc / 4) * dim).min(stacked.len());
    norm2(&stacked[cut..]) / total
}

/// `t_j = σ_max(T)` and the Schmidt preimages `v_j = Σ (C_X v)[k·n+b] z^k e_b`,
/// `w_j = Σ (C_Y u)[l·m+a] z̄^{l+1} e_a`.
pub fn schmidt_from_t(t_mat: &DenseMatrix, bases: &LevelBases, threshold: f64) -> Result<SchmidtOutcome> {
    if t_mat.rows() == 0 || t_mat.cols() == 0 {
        return Ok(SchmidtOutcome::Vanishing { t: 0.0 });
    }
    let dec = svd(t_mat)?;
    let t = dec.s[0];
    let second = dec.s.get(1).copied().unwrap_or(0.0);
    if t <= threshold || t == 0.0 {
        return Ok(SchmidtOutcome::Vanishing { t });
    }
    let mut v = dec.v.column(0);
    normalize_phase(&mut v);
    let u: Vec<C64> = t_mat.mul_vec(&v)?.into_iter().map(|z| z / t).collect();
    let v_raw = bases.ortho_x.mul_vec(&v)?;
    let w_raw = bases.ortho_y.mul_vec(&u)?;
    let tail = block_tail(&v_raw, bases.n, bases.trunc).max(block_tail(&w_raw, bases.m, bases.trunc));
    let v_coeffs = lift_analytic(bases.grid, bases.n, &v_raw)?;
    let w_coeffs = lift_coanalytic(bases.grid, bases.m, &w_raw)?;
    Ok(SchmidtOutcome::Pair(LevelSchmidt {
        t,
        second,
        v: v_coeffs.inverse(),
        v_coeffs,
        w: w_coeffs.inverse(),
        w_coeffs,
        tail,
    }))
}

#[derive(Clone, Debug)]
pub struct LevelRecord {
    pub level: usize,
    pub t: f64,
    /// `t_j − σ_2(T_j)`.
    pub gap: f64,
    pub trunc: usize,
    pub rank_x: usize,
    pub rank_y: usize,
    pub x: GridVector,
    pub y: GridVector,
    pub xi: GridVector,
    pub eta: GridVector,
    pub h: OuterScalar,
    pub v: GridVector,
    pub w: GridVector,
    pub q: PolyMatrix,
    pub q_residual: f64,
    pub diagnostics: BTreeMap<String, f64>,
}

impl LevelRecord {
    pub fn eta_bar(&self) -> GridVector {
        self.eta.conj()
    }
}

/// Bookkeeping of the level operator used by [`level_update`].
#[derive(Clone, Debug)]
pub struct LevelContext {
    pub level: usize,
    pub trunc: usize,
    pub rank_x: usize,
    pub rank_y: usize,
    pub q: PolyMatrix,
    pub q_residual: f64,
}

fn max_unit_deviation(f: &GridVector) -> f64 {
    f.pointwise_norms().iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max)
}

/// Turns a Schmidt pair into `(x_j, y_j, h_j, ξ_j, η_j)` given the frames
/// of the earlier levels.
pub fn level_update(
    schmidt: &LevelSchmidt,
    xi_frame: &[GridVector],
    eta_frame: &[GridVector],
    context: LevelContext,
    config: &SolverConfig,
) -> Result<LevelRecord> {
    let grid = schmidt.v.grid();
    let n = schmidt.v.dim();
    let eta_bar: Vec<GridVector> = eta_frame.iter().map(GridVector::conj).collect();
    let x = project_out_frame(&schmidt.v, xi_frame)?;
    let y = project_out_frame(&schmidt.w, &eta_bar)?;

    let mut frame = xi_frame.to_vec();
    frame.push(schmidt.v.clone());
    let wedge = WedgeGridVector::from_frame(grid, n, &frame)?;
    let profile = wedge.pointwise_norm_sqr();
    let h = spectral_factor(&profile, config.tol_zero, config.tol_analytic)?;
    let xi = inner_outer_split(&x, &h)?;

    let shifted = y.conj().transform().laurent_shift(-1)?.inverse();
    let eta = shifted.div_scalar(h.values())?;

    let hmod: Vec<f64> = h.values().values().iter().map(|z| z.norm()).collect();
    let hmax = hmod.iter().copied().fold(0.0, f64::max);
    let chain = x
        .pointwise_norms()
        .iter()
        .zip(y.pointwise_norms())
        .zip(&hmod)
        .map(|((a, b), c)| (a - c).abs().max((b - c).abs()))
        .fold(0.0, f64::max)
        / hmax;
    let outer = check_outer(h.values(), config.tol_analytic);

    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("norm_chain".to_string(), chain);
    diagnostics.insert("xi_unit".to_string(), max_unit_deviation(&xi));
    diagnostics.insert("eta_unit".to_string(), max_unit_deviation(&eta));
    diagnostics.insert("outer_modulus".to_string(), h.modulus_residual());
    diagnostics.insert("outer_negative".to_string(), outer.negative_coefficient);
    diagnostics.insert("outer_winding".to_string(), outer.winding as f64);
    diagnostics.insert("lift_tail".to_string(), schmidt.tail);

    Ok(LevelRecord {
        level: context.level,
        t: schmidt.t,
        gap: schmidt.t - schmidt.second,
        trunc: context.trunc,
        rank_x: context.rank_x,
        rank_y: context.rank_y,
        x,
        y,
        xi,
        eta,
        h,
        v: schmidt.v.clone(),
        w: schmidt.w.clone(),
        q: context.q,
        q_residual: context.q_residual,
        diagnostics,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelCheck {
    pub level: usize,
    pub t: f64,
    pub gap: f64,
    pub trunc: usize,
    pub rank_x: usize,
    pub rank_y: usize,
    pub q_degree: usize,
    pub q_residual: f64,
    /// `max_θ |s_j((G − 𝒜G)(θ)) − t_j|`.
    pub profile_max_deviation: f64,
    /// Standard deviation of `s_j((G − 𝒜G)(θ))` over the grid.
    pub profile_stddev: f64,
    /// `‖(G − 𝒜G)x_j − t_j y_j‖` and `‖y_j*(G − 𝒜G) − t_j x_j*‖` in `L²`,
    /// the larger of the two.
    pub constraint_residual: f64,
    pub norm_chain: f64,
    pub outer_pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Diagnostics {
    pub r: usize,
    pub levels: Vec<LevelCheck>,
    pub xi_orthonormality: f64,
    pub eta_orthonormality: f64,
    /// `max_θ s_j((G − 𝒜G)(θ))` over `j ≥ r`.
    pub trailing_singular_max: f64,
    /// `Σ_{k<0} |𝒜Ĝ_{ab}(k)|` summed over all entries.
    pub approximant_negative_mass: f64,
    pub monotone: bool,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct SuperoptResult {
    pub config: SolverConfig,
    pub symbol: GridMatrix,
    pub r: usize,
    pub levels: Vec<LevelRecord>,
    /// The first `t_j` that fell below the threshold, when the recursion
    /// stopped for that reason.
    pub terminal_t: Option<f64>,
    pub approximant: GridMatrix,
    pub approximant_coeffs: Vec<FourierVector>,
    /// `error_profile[k]` lists the singular values of `(G − 𝒜G)(θ_k)` in
    /// decreasing order.
    pub error_profile: Vec<Vec<f64>>,
    pub report: Diagnostics,
}

impl SuperoptResult {
    pub fn grid(&self) -> CircleGrid {
        self.symbol.grid()
    }

    pub fn t_values(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.t).collect()
    }

    /// `t_0, …, t_{r−1}` followed by the sup of the remaining error singular
    /// values, `min(m, n)` numbers in all.
    pub fn superoptimal_values(&self) -> Vec<f64> {
        let k = self.symbol.rows().min(self.symbol.cols());
        (0..k)
            .map(|j| match self.levels.get(j) {
                Some(l) => l.t,
                None => self.error_profile.iter().map(|s| s[j]).fold(0.0, f64::max),
            })
            .collect()
    }

    /// Recomputes the error profile and the report, e.g. after `approximant`
    /// was replaced.
    pub fn refresh(&mut self) -> Result<()> {
        self.approximant_coeffs = self.approximant.transform_entries();
        self.error_profile = error_profile(&self.symbol, &self.approximant)?;
        self.report = diagnostics_report(self)?;
        Ok(())
    }
}

/// `𝒜G = G − Σ_i t_i y_i x_i* / |h_i|²` pointwise.
pub fn approximant(g: &GridMatrix, levels: &[LevelRecord]) -> Result<GridMatrix> {
    let mut out = g.clone();
    let (m, n) = (g.rows(), g.cols());
    for lvl in levels {
        let weights: Vec<f64> = lvl.h.values().values().iter().map(|h| lvl.t / h.norm_sqr()).collect();
        for r in 0..m {
            for c in 0..n {
                let yr = lvl.y.component(r);
                let xc = lvl.x.component(c);
                for (k, e) in out.entry_mut(r, c).iter_mut().enumerate() {
                    *e -= yr[k] * xc[k].conj() * weights[k];
                }
            }
        }
    }
    Ok(out)
}

/// Singular values of `(G − 𝒜G)(θ)` at every grid point.
pub fn error_profile(g: &GridMatrix, ag: &GridMatrix) -> Result<Vec<Vec<f64>>> {
    let diff = g.sub(ag)?;
    (0..g.grid().size()).map(|k| Ok(svd(&diff.at(k))?.s)).collect()
}

pub fn run_superopt(spec: &SymbolSpec, config: &SolverConfig) -> Result<SuperoptResult> {
    run_with_hook(spec, config, |_, _| {})
}

/// Like [`run_superopt`], calling `hook(level, pair)` on every Schmidt pair
/// before it is used.
pub fn run_with_hook(
    spec: &SymbolSpec,
    config: &SolverConfig,
    hook: impl FnMut(usize, &mut LevelSchmidt),
) -> Result<SuperoptResult> {
    config.validate()?;
    let grid = CircleGrid::new(config.grid_size)?;
    let g = sample_symbol(spec, grid)?;
    solve_sampled(g, config, hook)
}

/// Runs the recursion on an already sampled symbol.
pub fn solve_sampled(
    g: GridMatrix,
    config: &SolverConfig,
    mut hook: impl FnMut(usize, &mut LevelSchmidt),
) -> Result<SuperoptResult> {
    config.validate()?;
    if g.grid().size() != config.grid_size {
        return Err(Error::Config("symbol grid differs from the configured grid size".into()));
    }
    let grid = g.grid();
    let (m, n) = (g.rows(), g.cols());
    let depth = m.min(n);
    let mut levels: Vec<LevelRecord> = Vec::new();
    let mut terminal_t = None;

    let (hankel, top) = hankel_top_adaptive(&g, config.trunc, config.max_trunc, config.tol_rank, config.tol_residual)
        .map_err(|e| e.at_level(0))?;
    let t0 = top.t;
    match top.pair {
        None => terminal_t = Some(t0),
        Some(pair) => {
            let mut schmidt = LevelSchmidt {
                t: top.t,
                second: top.second,
                v: pair.x,
                v_coeffs: pair.x_coeffs,
                w: pair.y,
                w_coeffs: pair.y_coeffs,
                tail: pair.residual_x.max(pair.residual_y),
            };
            hook(0, &mut schmidt);
            let context = LevelContext {
                level: 0,
                trunc: hankel.trunc(),
                rank_x: hankel.trunc() * n,
                rank_y: hankel.trunc() * m,
                q: PolyMatrix::zeros(m, n),
                q_residual: 0.0,
            };
            levels.push(level_update(&schmidt, &[], &[], context, config).map_err(|e| e.at_level(0))?);
        }
    }

    let mut trunc = hankel.trunc();
    while terminal_t.is_none() && levels.len() < depth {
        let j = levels.len();
        let mut step = || -> Result<Option<LevelRecord>> {
            let pairs: Vec<InterpolationPair> = levels
                .iter()
                .map(|l| InterpolationPair {
                    t: l.t,
                    x: l.x.clone(),
                    y: l.y.clone(),
                })
                .collect();
            let qsol = solve_interpolant_schedule(&g, &pairs, config)?;
            let xi_frame: Vec<GridVector> = levels.iter().map(|l| l.xi.clone()).collect();
            let eta_frame: Vec<GridVector> = levels.iter().map(|l| l.eta.clone()).collect();
            let mut n_cur = trunc;
            let (bases, outcome) = loop {
                let attempt = build_level_bases(grid, n, m, &xi_frame, &eta_frame, n_cur, config.tol_rank)
                    .and_then(|bases| {
                        let op = assemble_t_matrix(&g, &qsol.q, &bases)?;
                        let outcome = schmidt_from_t(&op.t, &bases, config.tol_rank * t0)?;
                        if let SchmidtOutcome::Pair(s) = &outcome {
                            if s.tail >= config.tol_residual.sqrt() {
                                return Err(Error::Truncation {
                                    what: format!("level Schmidt vectors not resolved at N = {n_cur} (tail {:e})", s.tail),
                                    decay_rate: f64::NAN,
                                });
                            }
                        }
                        Ok((bases, outcome))
                    });
                match attempt {
                    Err(e @ Error::Truncation { .. }) => {
                        let next = n_cur * 2;
                        if next > config.max_trunc || 4 * next > grid.size() {
                            return Err(e);
                        }
                        n_cur = next;
                    }
                    other => break other?,
                }
            };
            trunc = n_cur;
            match outcome {
                SchmidtOutcome::Vanishing { t } => {
                    terminal_t = Some(t);
                    Ok(None)
                }
                SchmidtOutcome::Pair(mut schmidt) => {
                    hook(j, &mut schmidt);
                    let context = LevelContext {
                        level: j,
                        trunc: n_cur,
                        rank_x: bases.rank_x(),
                        rank_y: bases.rank_y(),
                        q: qsol.q,
                        q_residual: qsol.residual,
                    };
                    level_update(&schmidt, &xi_frame, &eta_frame, context, config).map(Some)
                }
            }
        };
        match step().map_err(|e| e.at_level(j))? {
            Some(record) => levels.push(record),
            None => break,
        }
    }

    let ag = approximant(&g, &levels)?;
    let mut result = SuperoptResult {
        config: config.clone(),
        r: levels.len(),
        symbol: g,
        levels,
        terminal_t,
        approximant_coeffs: Vec::new(),
        error_profile: Vec::new(),
        approximant: ag,
        report: Diagnostics {
            r: 0,
            levels: Vec::new(),
            xi_orthonormality: 0.0,
            eta_orthonormality: 0.0,
            trailing_singular_max: 0.0,
            approximant_negative_mass: 0.0,
            monotone: true,
            pass: true,
        },
    };
    result.refresh()?;
    Ok(result)
}

fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Invariant checks on a completed run, computed from its current
/// approximant.
pub fn diagnostics_report(result: &SuperoptResult) -> Result<Diagnostics> {
    let g = &result.symbol;
    let diff = g.sub(&result.approximant)?;
    let profile = error_profile(g, &result.approximant)?;
    let t0 = result.levels.first().map(|l| l.t).unwrap_or(0.0);
    let scale = sup_frobenius(g);

    let mut checks = Vec::new();
    for lvl in &result.levels {
        let j = lvl.level;
        let column = profile.iter().map(|s| s[j]);
        let (_, stddev) = mean_std(column.clone());
        let deviation = column.map(|s| (s - lvl.t).abs()).fold(0.0, f64::max);
        let pair = InterpolationPair {
            t: lvl.t,
            x: lvl.x.clone(),
            y: lvl.y.clone(),
        };
        let constraint = interpolant_residual(&diff, scale, std::slice::from_ref(&pair))?;
        checks.push(LevelCheck {
            level: j,
            t: lvl.t,
            gap: lvl.gap,
            trunc: lvl.trunc,
            rank_x: lvl.rank_x,
            rank_y: lvl.rank_y,
            q_degree: lvl.q.degree(),
            q_residual: lvl.q_residual,
            profile_max_deviation: deviation,
            profile_stddev: stddev,
            constraint_residual: constraint,
            norm_chain: lvl.diagnostics.get("norm_chain").copied().unwrap_or(0.0),
            outer_pass: check_outer(lvl.h.values(), result.config.tol_analytic).pass,
        });
    }

    let xi: Vec<GridVector> = result.levels.iter().map(|l| l.xi.clone()).collect();
    let eta_bar: Vec<GridVector> = result.levels.iter().map(LevelRecord::eta_bar).collect();
    let xi_orthonormality = frame_orthonormality_deviation(&xi)?;
    let eta_orthonormality = frame_orthonormality_deviation(&eta_bar)?;
    let trailing_singular_max = profile
        .iter()
        .flat_map(|s| s.iter().skip(result.levels.len()).copied())
        .fold(0.0, f64::max);
    let approximant_negative_mass = result
        .approximant
        .transform_entries()
        .iter()
        .map(FourierVector::negative_mass)
        .sum();
    let monotone = result
        .levels
        .windows(2)
        .all(|w| w[1].t <= w[0].t + MONOTONE_SLACK);

    let t_scale = if t0 > 0.0 { t0 } else { 1.0 };
    let pass = monotone
        && xi_orthonormality < INVARIANT_TOL
        && eta_orthonormality < INVARIANT_TOL
        && approximant_negative_mass < INVARIANT_TOL
        && trailing_singular_max < INVARIANT_TOL * t_scale
        && checks.iter().all(|c| {
            c.profile_stddev < INVARIANT_TOL * t_scale
                && c.profile_max_deviation < INVARIANT_TOL * t_scale
                && c.constraint_residual < INVARIANT_TOL
                && c.norm_chain < INVARIANT_TOL
                && c.outer_pass
        });
    Ok(Diagnostics {
        r: result.levels.len(),
        levels: checks,
        xi_orthonormality,
        eta_orthonormality,
        trailing_singular_max,
        approximant_negative_mass,
        monotone,
        pass,
    })
}

/// Pointwise squared norm as a real grid scalar, exposed for callers that
/// build their own outer factors.
pub fn squared_norm(f: &GridVector) -> GridScalar {
    f.pointwise_norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hankel::{build_hankel_matrix, top_schmidt_pair};
    use crate::rational::builtin_symbol;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn s2() -> f64 {
        2f64.sqrt()
    }

    fn s3() -> f64 {
        3f64.sqrt()
    }

    fn gamma() -> f64 {
        -(10.0 - 2.0 * 13f64.sqrt()) / (4.0 * s3())
    }

    fn py_closed_form(z: C64) -> DenseMatrix {
        let g = gamma();
        let pre = s2() / (1.0 - g * z);
        let b = s3() + 4.0 * g;
        DenseMatrix::from_rows(&[
            vec![pre * (-g), pre * b],
            vec![pre * (2.0 + g * s3() - g * z), -pre * b * (s3() + z)],
        ])
        .unwrap()
    }

    fn py_run() -> SuperoptResult {
        run_superopt(&builtin_symbol("py2x2").unwrap(), &SolverConfig::default()).unwrap()
    }

    /// `max_θ ‖f(θ) − λ e(θ)‖` for the best single constant `λ`, and `λ`.
    fn proportional(f: &GridVector, e: impl Fn(C64) -> Vec<C64>) -> (f64, C64) {
        let grid = f.grid();
        let target = GridVector::from_fn(grid, f.dim(), e);
        let num: C64 = f.pointwise_inner(&target).unwrap().values().iter().sum();
        let den: f64 = target.pointwise_norm_sqr().values().iter().map(|z| z.re).sum();
        let lambda = num / den;
        (f.sub(&target.scale(lambda)).unwrap().sup_norm(), lambda)
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let bad = [
            SolverConfig { grid_size: 1000, ..Default::default() },
            SolverConfig { trunc: 512, ..Default::default() },
            SolverConfig { tol_rank: 0.0, ..Default::default() },
            SolverConfig { max_q_degree: 0, ..Default::default() },
            SolverConfig { trunc: 128, max_trunc: 64, ..Default::default() },
        ];
        for cfg in bad {
            assert!(matches!(cfg.validate(), Err(Error::Config(_))), "{cfg:?}");
        }
        let sched = SolverConfig { max_q_degree: 12, ..Default::default() }.q_degree_schedule();
        assert_eq!(sched, vec![1, 2, 4, 8, 12]);
    }

    #[test]
    fn poly_matrix_sampling_matches_evaluation() {
        let q = PolyMatrix::from_coefficients(vec![
            DenseMatrix::from_rows(&[vec![c(0.0, 0.0), c(s3() * s2(), 0.0)], vec![c(2.0 * s2(), 0.0), c(-3.0 * s2(), 0.0)]]).unwrap(),
            DenseMatrix::from_rows(&[vec![c(0.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(-s3() * s2(), 0.0)]]).unwrap(),
        ])
        .unwrap();
        assert_eq!(q.degree(), 1);
        let grid = CircleGrid::new(64).unwrap();
        let sampled = q.sample(grid);
        for k in 0..64 {
            let d = sampled.at(k).sub(&q.eval(grid.point(k))).unwrap();
            assert!(d.max_abs() < 1e-13);
        }
    }

    #[test]
    fn py_example_levels() {
        let res = py_run();
        let t = res.t_values();
        assert_eq!(res.r, 2);
        assert!((t[0] - 6f64.sqrt()).abs() < 1e-12);
        assert!((t[1] - s2() * (4.0 - 13f64.sqrt())).abs() < 1e-12);
        assert!(res.report.pass, "{:#?}", res.report);

        let grid = res.grid();
        let worst = (0..grid.size())
            .map(|k| res.approximant.at(k).sub(&py_closed_form(grid.point(k))).unwrap().max_abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-10, "approximant error {worst:e}");
    }

    #[test]
    fn py_example_vectors_match_closed_forms() {
        let res = py_run();
        let g = gamma();
        let l0 = &res.levels[0];
        let (err, _) = proportional(&l0.x, |z| vec![4.0 + s3() * z, c(1.0, 0.0)]);
        assert!(err < 1e-12);
        let (err, _) = proportional(&l0.y, |z| {
            let zb = z.conj();
            vec![2.0 * zb * (zb + s3()), 2.0 * zb]
        });
        assert!(err < 1e-12);
        let (err, lambda) = proportional(&l0.h.values().clone().into_vector(), |z| vec![1.0 - g * z]);
        assert!(err < 1e-12);
        assert!(lambda.re > 0.0 && lambda.im.abs() < 1e-12);

        let l1 = &res.levels[1];
        let (err, _) = proportional(&l1.x, |z| {
            let d = (1.0 - g * z) * (1.0 - g * z.conj());
            vec![1.0 / d, (-4.0 - s3() * z.conj()) / d]
        });
        assert!(err < 1e-10, "x1 error {err:e}");
        let (err, lambda) = proportional(&l1.h.values().clone().into_vector(), |z| vec![1.0 / (1.0 - g * z)]);
        assert!(err < 1e-10);
        assert!(lambda.re > 0.0 && lambda.im.abs() < 1e-10);
        assert_eq!(l1.q.degree(), 1);
    }

    #[test]
    fn closed_form_interpolant_satisfies_level_one_constraints() {
        let res = py_run();
        let l0 = &res.levels[0];
        let q1 = PolyMatrix::from_coefficients(vec![
            DenseMatrix::from_rows(&[
                vec![c(0.0, 0.0), c(6f64.sqrt(), 0.0)],
                vec![c(2.0 * s2(), 0.0), c(-6f64.sqrt() * s3(), 0.0)],
            ])
            .unwrap(),
            DenseMatrix::from_rows(&[vec![c(0.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(-6f64.sqrt(), 0.0)]]).unwrap(),
        ])
        .unwrap();
        let pair = InterpolationPair { t: l0.t, x: l0.x.clone(), y: l0.y.clone() };
        let diff = res.symbol.sub(&q1.sample(res.grid())).unwrap();
        let residual = interpolant_residual(&diff, sup_frobenius(&res.symbol), std::slice::from_ref(&pair)).unwrap();
        assert!(residual < 1e-12, "{residual:e}");
        let solved = solve_interpolant_q(&res.symbol, &[pair], 1).unwrap();
        assert!(solved.residual < 1e-12);
    }

    #[test]
    fn scalar_zbar_interpolant_is_zero() {
        let grid = CircleGrid::new(64).unwrap();
        let g = GridMatrix::from_fn(grid, 1, 1, |z| DenseMatrix::from_fn(1, 1, |_, _| z.conj()));
        let pair = InterpolationPair {
            t: 1.0,
            x: GridVector::constant(grid, &[c(1.0, 0.0)]),
            y: GridVector::from_fn(grid, 1, |z| vec![z.conj()]),
        };
        let sol = solve_interpolant_q(&g, &[pair], 2).unwrap();
        assert!(sol.residual < 1e-14);
        assert!((0..=2).all(|d| sol.q.coefficient(d).max_abs() < 1e-14));
        let empty = solve_interpolant_schedule(&g, &[], &SolverConfig::default()).unwrap();
        assert_eq!(empty.q, PolyMatrix::zeros(1, 1));
    }

    #[test]
    fn level_bases_examples() {
        let grid = CircleGrid::new(256).unwrap();
        let bases = build_level_bases(grid, 2, 3, &[], &[], 8, 1e-9).unwrap();
        assert!(bases.gram_x.sub(&DenseMatrix::identity(16)).unwrap().max_abs() < 1e-14);
        assert!(bases.gram_y.sub(&DenseMatrix::identity(24)).unwrap().max_abs() < 1e-14);
        assert_eq!((bases.rank_x(), bases.rank_y()), (16, 24));

        let e1 = GridVector::unit(grid, 3, 0);
        let e2 = GridVector::unit(grid, 3, 1);
        let bases = build_level_bases(grid, 3, 3, &[e1.clone(), e2.clone()], &[e1, e2], 8, 1e-9).unwrap();
        assert_eq!(bases.rank_x(), 8);
        assert_eq!(bases.rank_y(), 8);
    }

    #[test]
    fn py_level_one_x_gram_rank() {
        let res = py_run();
        let l0 = &res.levels[0];
        let n = DEFAULT_TRUNCATION;
        let bases = build_level_bases(res.grid(), 2, 2, std::slice::from_ref(&l0.xi), std::slice::from_ref(&l0.eta), n, 1e-9).unwrap();
        assert_eq!(bases.rank_x(), n + 1);
        assert_eq!(res.levels[1].rank_x, n + 1);
    }

    #[test]
    fn level_zero_through_generic_path_matches_hankel() {
        let grid = CircleGrid::new(1024).unwrap();
        let g = sample_symbol(&builtin_symbol("py2x2").unwrap(), grid).unwrap();
        let n = 32;
        let bases = build_level_bases(grid, 2, 2, &[], &[], n, 1e-9).unwrap();
        let op = assemble_t_matrix(&g, &PolyMatrix::zeros(2, 2), &bases).unwrap();
        let hankel = build_hankel_matrix(&g, n).unwrap();
        assert!(op.cross.sub(hankel.matrix()).unwrap().max_abs() < 1e-14);

        let top = top_schmidt_pair(&hankel, &g, 1e-9).unwrap();
        let pair = top.pair.unwrap();
        let SchmidtOutcome::Pair(s) = schmidt_from_t(&op.t, &bases, 1e-9).unwrap() else {
            panic!("expected a Schmidt pair");
        };
        assert!((s.t - top.t).abs() < 1e-9);
        assert!(s.v.sub(&pair.x).unwrap().sup_norm() < 1e-9);
        assert!(s.w.sub(&pair.y).unwrap().sup_norm() < 1e-9);
    }

    #[test]
    fn zero_operator_signals_termination() {
        let grid = CircleGrid::new(64).unwrap();
        let bases = build_level_bases(grid, 1, 1, &[], &[], 4, 1e-9).unwrap();
        let outcome = schmidt_from_t(&DenseMatrix::zeros(4, 4), &bases, 1e-9).unwrap();
        assert!(matches!(outcome, SchmidtOutcome::Vanishing { t } if t == 0.0));
    }

    #[test]
    fn analytic_symbol_terminates_immediately() {
        let grid = CircleGrid::new(256).unwrap();
        let g = GridMatrix::from_fn(grid, 2, 2, |z| DenseMatrix::from_rows(&[vec![z, c(1.0, 0.0)], vec![z * z, c(2.0, -1.0)]]).unwrap());
        let cfg = SolverConfig { grid_size: 256, ..Default::default() };
        let res = solve_sampled(g.clone(), &cfg, |_, _| {}).unwrap();
        assert_eq!(res.r, 0);
        assert!(res.approximant.sub(&g).unwrap().sup_abs() == 0.0);
        assert!(res.report.pass);
        assert!(res.superoptimal_values().iter().all(|&s| s < 1e-12));
    }

    #[test]
    fn diagonal_symbol() {
        let res = run_superopt(&builtin_symbol("diag").unwrap(), &SolverConfig::default()).unwrap();
        assert_eq!(res.r, 1);
        assert!(res.approximant.sup_abs() < 1e-12);
        let vals = res.superoptimal_values();
        assert!((vals[0] - 1.0).abs() < 1e-12 && vals[1].abs() < 1e-12);
        assert!(res.report.pass);
    }

    #[test]
    fn constant_frame_level_update() {
        let grid = CircleGrid::new(64).unwrap();
        let v = GridVector::constant(grid, &[c(0.6, 0.0), c(0.8, 0.0)]);
        let w = GridVector::from_fn(grid, 1, |z| vec![z.conj()]);
        let schmidt = LevelSchmidt {
            t: 1.0,
            second: 0.0,
            v_coeffs: v.transform(),
            v: v.clone(),
            w_coeffs: w.transform(),
            w,
            tail: 0.0,
        };
        let context = LevelContext { level: 0, trunc: 4, rank_x: 8, rank_y: 4, q: PolyMatrix::zeros(1, 2), q_residual: 0.0 };
        let rec = level_update(&schmidt, &[], &[], context, &SolverConfig::default()).unwrap();
        assert!(rec.x.sub(&v).unwrap().sup_norm() < 1e-15);
        assert!(rec.xi.sub(&v).unwrap().sup_norm() < 1e-14);
        assert!(rec.h.values().values().iter().all(|h| (h - 1.0).norm() < 1e-14));
        assert!(rec.eta.sub(&GridVector::constant(grid, &[c(1.0, 0.0)])).unwrap().sup_norm() < 1e-14);
    }

    #[test]
    fn corrupted_approximant_is_flagged() {
        let mut res = py_run();
        let grid = res.grid();
        for (k, e) in res.approximant.entry_mut(0, 1).iter_mut().enumerate() {
            *e += grid.point(k) * 1e-3;
        }
        res.refresh().unwrap();
        let worst = res.report.levels.iter().map(|l| l.profile_max_deviation).fold(0.0, f64::max);
        assert!(worst >= 1e-4, "{worst:e}");
        assert!(!res.report.pass);
    }

    #[test]
    fn phase_of_schmidt_pairs_does_not_matter() {
        let spec = builtin_symbol("py2x2").unwrap();
        let base = run_superopt(&spec, &SolverConfig::default()).unwrap();
        let phases = [c(0.3, 0.0).exp() * C64::i().powf(0.0), C64::from_polar(1.0, 2.1), C64::from_polar(1.0, -0.7)];
        let rotated = run_with_hook(&spec, &SolverConfig::default(), |level, s| {
            s.rotate(phases[level + 1]);
        })
        .unwrap();
        let diff = rotated.approximant.sub(&base.approximant).unwrap().sup_abs();
        assert!(diff < 1e-9, "{diff:e}");
        let _ = phases[0];
    }
}
