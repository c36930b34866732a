//! Functions on the unit circle sampled on a uniform FFT grid.
//!
//! A grid of size `M` holds the points `θ_k = 2πk/M`. Grid functions are
//! stored component-major (one `Vec` of `M` samples per component), and
//! their Fourier coefficients `c_k`, `k ∈ [−M/2, M/2)`, are stored in FFT
//! order with
//!
//! ```text
//! c_k = (1/M) Σ_j f(θ_j) e^{−ikθ_j},      f(θ_j) = Σ_k c_k e^{ikθ_j}.
//! ```
//!
//! Quadrature of `(1/2π)∫ f dθ` is the grid mean, which is exact for
//! trigonometric polynomials of degree below `M`.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

pub const DEFAULT_GRID_SIZE: usize = 1024;

/// Relative size below which Fourier tails are treated as negligible.
pub const TOL_TAIL: f64 = 1e-10;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(size: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(size)
        } else {
            p.plan_fft_forward(size)
        }
    })
}

/// Samples → coefficients for one component.
pub fn forward(values: &[C64]) -> Vec<C64> {
    let mut buf = values.to_vec();
    plan(buf.len(), false).process(&mut buf);
    let scale = 1.0 / buf.len() as f64;
    buf.iter_mut().for_each(|z| *z *= scale);
    buf
}

/// Coefficients (FFT order) → samples for one component.
pub fn inverse(coeffs: &[C64]) -> Vec<C64> {
    let mut buf = coeffs.to_vec();
    plan(buf.len(), true).process(&mut buf);
    buf
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CircleGrid {
    size: usize,
}

impl CircleGrid {
    pub fn new(size: usize) -> Result<Self> {
        if size < 4 || !size.is_power_of_two() {
            return Err(Error::Config(format!(
                "grid size must be a power of two and at least 4, got {size}"
            )));
        }
        Ok(Self { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// `M/2`: frequencies live in `[−half, half)`.
    pub fn half(&self) -> i64 {
        (self.size / 2) as i64
    }

    pub fn theta(&self, k: usize) -> f64 {
        2.0 * PI * k as f64 / self.size as f64
    }

    pub fn point(&self, k: usize) -> C64 {
        C64::from_polar(1.0, self.theta(k))
    }

    pub fn points(&self) -> Vec<C64> {
        (0..self.size).map(|k| self.point(k)).collect()
    }

    /// Storage slot of frequency `k`.
    pub fn slot(&self, k: i64) -> usize {
        k.rem_euclid(self.size as i64) as usize
    }

    /// Frequency stored in slot `idx`.
    pub fn frequency(&self, idx: usize) -> i64 {
        let k = idx as i64;
        if k >= self.half() {
            k - self.size as i64
        } else {
            k
        }
    }

    pub fn frequencies(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.size).map(|i| self.frequency(i))
    }
}

fn check_finite(values: &[C64]) -> Result<()> {
    if values.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::Invariant("grid function has non-finite samples".into()))
    }
}

/// Scalar function on the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridScalar {
    grid: CircleGrid,
    values: Vec<C64>,
}

impl GridScalar {
    pub fn new(grid: CircleGrid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.size() {
            return Err(Error::Dimension(format!(
                "{} samples on a grid of size {}",
                values.len(),
                grid.size()
            )));
        }
        check_finite(&values)?;
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: CircleGrid, f: impl Fn(C64) -> C64) -> Self {
        Self {
            grid,
            values: grid.points().into_iter().map(f).collect(),
        }
    }

    pub fn from_real(grid: CircleGrid, values: &[f64]) -> Result<Self> {
        Self::new(grid, values.iter().map(|&r| C64::new(r, 0.0)).collect())
    }

    pub fn grid(&self) -> CircleGrid {
        self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn transform(&self) -> FourierVector {
        FourierVector {
            grid: self.grid,
            components: vec![forward(&self.values)],
            analytic: false,
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn min_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Mean over the grid, i.e. `(1/2π)∫ f`.
    pub fn mean(&self) -> C64 {
        self.values.iter().sum::<C64>() / self.grid.size() as f64
    }

    pub fn into_vector(self) -> GridVector {
        GridVector {
            grid: self.grid,
            components: vec![self.values],
        }
    }
}

/// `ℂ^d`-valued function on the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridVector {
    grid: CircleGrid,
    components: Vec<Vec<C64>>,
}

impl GridVector {
    pub fn new(grid: CircleGrid, components: Vec<Vec<C64>>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Dimension("grid vector needs at least one component".into()));
        }
        for c in &components {
            if c.len() != grid.size() {
                return Err(Error::Dimension(format!(
                    "component with {} samples on a grid of size {}",
                    c.len(),
                    grid.size()
                )));
            }
            check_finite(c)?;
        }
        Ok(Self { grid, components })
    }

    pub fn zeros(grid: CircleGrid, dim: usize) -> Self {
        Self {
            grid,
            components: vec![vec![ZERO; grid.size()]; dim],
        }
    }

    /// Constant function equal to `v` everywhere.
    pub fn constant(grid: CircleGrid, v: &[C64]) -> Self {
        Self {
            grid,
            components: v.iter().map(|&c| vec![c; grid.size()]).collect(),
        }
    }

    /// Constant standard basis vector `e_l` of `ℂ^dim`.
    pub fn unit(grid: CircleGrid, dim: usize, l: usize) -> Self {
        let mut v = vec![ZERO; dim];
        v[l] = C64::new(1.0, 0.0);
        Self::constant(grid, &v)
    }

    pub fn from_fn(grid: CircleGrid, dim: usize, f: impl Fn(C64) -> Vec<C64>) -> Self {
        let mut out = Self::zeros(grid, dim);
        for (k, z) in grid.points().into_iter().enumerate() {
            let v = f(z);
            for (c, val) in v.into_iter().enumerate().take(dim) {
                out.components[c][k] = val;
            }
        }
        out
    }

    pub fn grid(&self) -> CircleGrid {
        self.grid
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, c: usize) -> &[C64] {
        &self.components[c]
    }

    pub fn components(&self) -> &[Vec<C64>] {
        &self.components
    }

    /// The vector `f(θ_k)`.
    pub fn at(&self, k: usize) -> Vec<C64> {
        self.components.iter().map(|c| c[k]).collect()
    }

    pub fn set_at(&mut self, k: usize, v: &[C64]) {
        for (c, val) in self.components.iter_mut().zip(v) {
            c[k] = *val;
        }
    }

    pub fn pointwise_norms(&self) -> Vec<f64> {
        (0..self.grid.size())
            .map(|k| self.components.iter().map(|c| c[k].norm_sqr()).sum::<f64>().sqrt())
            .collect()
    }

    pub fn pointwise_norm_sqr(&self) -> GridScalar {
        GridScalar {
            grid: self.grid,
            values: (0..self.grid.size())
                .map(|k| C64::new(self.components.iter().map(|c| c[k].norm_sqr()).sum(), 0.0))
                .collect(),
        }
    }

    /// Pointwise `⟨f(θ), g(θ)⟩ = g(θ)* f(θ)`.
    pub fn pointwise_inner(&self, other: &GridVector) -> Result<GridScalar> {
        self.check_compatible(other)?;
        let values = (0..self.grid.size())
            .map(|k| {
                self.components
                    .iter()
                    .zip(&other.components)
                    .map(|(a, b)| a[k] * b[k].conj())
                    .sum()
            })
            .collect();
        Ok(GridScalar {
            grid: self.grid,
            values,
        })
    }

    pub fn conj(&self) -> Self {
        Self {
            grid: self.grid,
            components: self
                .components
                .iter()
                .map(|c| c.iter().map(|z| z.conj()).collect())
                .collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            grid: self.grid,
            components: self
                .components
                .iter()
                .map(|c| c.iter().map(|z| z * s).collect())
                .collect(),
        }
    }

    pub fn mul_scalar(&self, s: &GridScalar) -> Result<Self> {
        if s.grid != self.grid {
            return Err(Error::Dimension("grid mismatch".into()));
        }
        Ok(Self {
            grid: self.grid,
            components: self
                .components
                .iter()
                .map(|c| c.iter().zip(&s.values).map(|(a, b)| a * b).collect())
                .collect(),
        })
    }

    pub fn div_scalar(&self, s: &GridScalar) -> Result<Self> {
        if s.grid != self.grid {
            return Err(Error::Dimension("grid mismatch".into()));
        }
        Ok(Self {
            grid: self.grid,
            components: self
                .components
                .iter()
                .map(|c| c.iter().zip(&s.values).map(|(a, b)| a / b).collect())
                .collect(),
        })
    }

    pub fn sub(&self, other: &GridVector) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            grid: self.grid,
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
                .collect(),
        })
    }

    pub fn add(&self, other: &GridVector) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            grid: self.grid,
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
                .collect(),
        })
    }

    /// Largest pointwise Euclidean norm.
    pub fn sup_norm(&self) -> f64 {
        self.pointwise_norms().into_iter().fold(0.0, f64::max)
    }

    pub fn l2_norm(&self) -> f64 {
        l2_inner(self, self).map(|z| z.re.max(0.0).sqrt()).unwrap_or(0.0)
    }

    pub fn transform(&self) -> FourierVector {
        transform(self)
    }

    fn check_compatible(&self, other: &GridVector) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::Dimension("grid mismatch".into()));
        }
        if self.dim() != other.dim() {
            return Err(Error::Dimension(format!(
                "vector dimensions {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(())
    }
}

/// `ℂ^{rows×cols}`-valued function on the grid, entries stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct GridMatrix {
    grid: CircleGrid,
    rows: usize,
    cols: usize,
    entries: Vec<Vec<C64>>,
}

impl GridMatrix {
    pub fn new(grid: CircleGrid, rows: usize, cols: usize, entries: Vec<Vec<C64>>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} grid matrix",
                entries.len()
            )));
        }
        for e in &entries {
            if e.len() != grid.size() {
                return Err(Error::Dimension("entry length differs from grid size".into()));
            }
            check_finite(e)?;
        }
        Ok(Self {
            grid,
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(grid: CircleGrid, rows: usize, cols: usize) -> Self {
        Self {
            grid,
            rows,
            cols,
            entries: vec![vec![ZERO; grid.size()]; rows * cols],
        }
    }

    pub fn from_fn(grid: CircleGrid, rows: usize, cols: usize, f: impl Fn(C64) -> DenseMatrix) -> Self {
        let mut out = Self::zeros(grid, rows, cols);
        for (k, z) in grid.points().into_iter().enumerate() {
            out.set_at(k, &f(z));
        }
        out
    }

    pub fn grid(&self) -> CircleGrid {
        self.grid
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, r: usize, c: usize) -> &[C64] {
        &self.entries[r * self.cols + c]
    }

    pub fn entry_mut(&mut self, r: usize, c: usize) -> &mut Vec<C64> {
        &mut self.entries[r * self.cols + c]
    }

    pub fn at(&self, k: usize) -> DenseMatrix {
        DenseMatrix::from_fn(self.rows, self.cols, |r, c| self.entries[r * self.cols + c][k])
    }

    pub fn set_at(&mut self, k: usize, m: &DenseMatrix) {
        for r in 0..self.rows {
            for c in 0..self.cols {
                self.entries[r * self.cols + c][k] = m[(r, c)];
            }
        }
    }

    pub fn sub(&self, other: &GridMatrix) -> Result<Self> {
        if self.grid != other.grid || self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension("grid matrix shape mismatch".into()));
        }
        Ok(Self {
            grid: self.grid,
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
                .collect(),
        })
    }

    /// Pointwise `F(θ) v(θ)`.
    pub fn mul_vector(&self, v: &GridVector) -> Result<GridVector> {
        if v.grid() != self.grid || v.dim() != self.cols {
            return Err(Error::Dimension(format!(
                "{}x{} grid matrix times vector of dimension {}",
                self.rows,
                self.cols,
                v.dim()
            )));
        }
        let mut out = GridVector::zeros(self.grid, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                let e = self.entry(r, c);
                let src = v.component(c);
                for ((o, a), b) in out.components[r].iter_mut().zip(e).zip(src) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Pointwise `v(θ)* F(θ)`, returned as the column `F(θ)* v(θ)` conjugated,
    /// i.e. the row vector stored as a grid vector of dimension `cols`.
    pub fn left_mul_adjoint(&self, v: &GridVector) -> Result<GridVector> {
        if v.grid() != self.grid || v.dim() != self.rows {
            return Err(Error::Dimension("row vector dimension mismatch".into()));
        }
        let mut out = GridVector::zeros(self.grid, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                let e = self.entry(r, c);
                let src = v.component(r);
                for ((o, a), b) in out.components[c].iter_mut().zip(e).zip(src) {
                    *o += b.conj() * a;
                }
            }
        }
        Ok(out)
    }

    /// Fourier coefficients of every entry, row-major.
    pub fn transform_entries(&self) -> Vec<FourierVector> {
        self.entries
            .iter()
            .map(|e| FourierVector {
                grid: self.grid,
                components: vec![forward(e)],
                analytic: false,
            })
            .collect()
    }

    pub fn sup_abs(&self) -> f64 {
        self.entries
            .iter()
            .flat_map(|e| e.iter().map(|z| z.norm()))
            .fold(0.0, f64::max)
    }
}

/// Fourier coefficients of a grid vector, one FFT-ordered array per
/// component.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierVector {
    grid: CircleGrid,
    components: Vec<Vec<C64>>,
    analytic: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Riesz {
    /// Frequencies `k ≥ 0`.
    Plus,
    /// Frequencies `k < 0`.
    Minus,
}

impl FourierVector {
    pub fn zeros(grid: CircleGrid, dim: usize) -> Self {
        Self {
            grid,
            components: vec![vec![ZERO; grid.size()]; dim],
            analytic: false,
        }
    }

    /// Builds coefficients from `(component, frequency, value)` triples.
    pub fn from_terms(grid: CircleGrid, dim: usize, terms: impl IntoIterator<Item = (usize, i64, C64)>) -> Result<Self> {
        let mut out = Self::zeros(grid, dim);
        for (c, k, v) in terms {
            if c >= dim {
                return Err(Error::Dimension(format!("component {c} of a {dim}-vector")));
            }
            if k < -grid.half() || k >= grid.half() {
                return Err(Error::Aliasing(format!(
                    "frequency {k} outside the window [{}, {})",
                    -grid.half(),
                    grid.half()
                )));
            }
            let slot = grid.slot(k);
            out.components[c][slot] += v;
        }
        Ok(out)
    }

    pub fn grid(&self) -> CircleGrid {
        self.grid
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn coeff(&self, c: usize, k: i64) -> C64 {
        if k < -self.grid.half() || k >= self.grid.half() {
            return ZERO;
        }
        self.components[c][self.grid.slot(k)]
    }

    pub fn set_coeff(&mut self, c: usize, k: i64, v: C64) {
        let slot = self.grid.slot(k);
        self.components[c][slot] = v;
        self.analytic = false;
    }

    pub fn component(&self, c: usize) -> &[C64] {
        &self.components[c]
    }

    pub fn is_analytic(&self) -> bool {
        self.analytic
    }

    /// Sets the analytic flag after checking `max_{k<0} |c_k| < tol`.
    pub fn mark_analytic(&mut self, tol: f64) -> Result<()> {
        let worst = self.max_negative();
        if worst >= tol {
            return Err(Error::Invariant(format!(
                "function flagged analytic has a negative-frequency coefficient of size {worst:e}"
            )));
        }
        self.analytic = true;
        Ok(())
    }

    pub fn max_negative(&self) -> f64 {
        self.iter_frequency()
            .filter(|&(_, k, _)| k < 0)
            .map(|(_, _, v)| v.norm())
            .fold(0.0, f64::max)
    }

    /// `Σ_{k<0} |c_k|` over all components.
    pub fn negative_mass(&self) -> f64 {
        self.iter_frequency()
            .filter(|&(_, k, _)| k < 0)
            .map(|(_, _, v)| v.norm())
            .sum()
    }

    /// `(component, frequency, value)` for every stored coefficient.
    pub fn iter_frequency(&self) -> impl Iterator<Item = (usize, i64, C64)> + '_ {
        self.components.iter().enumerate().flat_map(move |(c, comp)| {
            comp.iter()
                .enumerate()
                .map(move |(i, v)| (c, self.grid.frequency(i), *v))
        })
    }

    pub fn inverse(&self) -> GridVector {
        GridVector {
            grid: self.grid,
            components: self.components.iter().map(|c| inverse(c)).collect(),
        }
    }

    pub fn riesz_project(&self, sign: Riesz) -> FourierVector {
        let grid = self.grid;
        let components = self
            .components
            .iter()
            .map(|comp| {
                comp.iter()
                    .enumerate()
                    .map(|(i, v)| {
                        let k = grid.frequency(i);
                        let keep = match sign {
                            Riesz::Plus => k >= 0,
                            Riesz::Minus => k < 0,
                        };
                        if keep {
                            *v
                        } else {
                            ZERO
                        }
                    })
                    .collect()
            })
            .collect();
        FourierVector {
            grid,
            components,
            analytic: sign == Riesz::Plus,
        }
    }

    /// `Σ |c_k|²`, equal to the squared `L²` norm by Parseval.
    pub fn norm_sqr(&self) -> f64 {
        self.components
            .iter()
            .flat_map(|c| c.iter().map(|z| z.norm_sqr()))
            .sum()
    }

    /// Coefficient-space inner product `Σ c_k conj(d_k)`.
    pub fn inner(&self, other: &FourierVector) -> Result<C64> {
        if self.grid != other.grid || self.dim() != other.dim() {
            return Err(Error::Dimension("Fourier vector shape mismatch".into()));
        }
        Ok(self
            .components
            .iter()
            .zip(&other.components)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| x * y.conj()))
            .sum())
    }

    /// Largest coefficient modulus in the outer `fraction` of the frequency
    /// window, relative to the largest coefficient overall.
    pub fn relative_edge_mass(&self, fraction: f64) -> f64 {
        let half = self.grid.half();
        let edge = ((1.0 - fraction) * half as f64).floor() as i64;
        let mut total = 0.0f64;
        let mut tail = 0.0f64;
        for (_, k, v) in self.iter_frequency() {
            total = total.max(v.norm());
            if k.abs() >= edge {
                tail = tail.max(v.norm());
            }
        }
        if total == 0.0 {
            0.0
        } else {
            tail / total
        }
    }

    /// Fails with an aliasing diagnostic when the outer eighth of the window
    /// carries more than `tol` relative coefficient mass.
    pub fn check_bandwidth(&self, tol: f64, what: &str) -> Result<()> {
        let edge = self.relative_edge_mass(0.125);
        if edge >= tol {
            return Err(Error::Aliasing(format!(
                "{what}: coefficients near the edge of the grid window have relative size {edge:e}; increase the grid size"
            )));
        }
        Ok(())
    }

    /// Multiplication by `z^p`: `c_k ↦ c_{k−p}`. Coefficients that would
    /// leave the window must be negligible (`< TOL_TAIL` relative).
    pub fn laurent_shift(&self, p: i64) -> Result<FourierVector> {
        let grid = self.grid;
        let half = grid.half();
        if p.abs() >= half {
            return Err(Error::Aliasing(format!("shift by {p} on a window of half-width {half}")));
        }
        let scale = self
            .components
            .iter()
            .flat_map(|c| c.iter().map(|z| z.norm()))
            .fold(0.0, f64::max);
        let mut out = FourierVector::zeros(grid, self.dim());
        for (c, k, v) in self.iter_frequency() {
            let target = k + p;
            if target < -half || target >= half {
                if v.norm() > TOL_TAIL * scale {
                    return Err(Error::Aliasing(format!(
                        "shift by {p} pushes coefficient {k} (size {:e}) out of the window",
                        v.norm()
                    )));
                }
                continue;
            }
            out.components[c][grid.slot(target)] = v;
        }
        out.analytic = self.analytic && p >= 0;
        Ok(out)
    }
}

pub fn transform(f: &GridVector) -> FourierVector {
    FourierVector {
        grid: f.grid,
        components: f.components.iter().map(|c| forward(c)).collect(),
        analytic: false,
    }
}

/// `⟨f, g⟩ = (1/M) Σ_j ⟨f(θ_j), g(θ_j)⟩`.
pub fn l2_inner(f: &GridVector, g: &GridVector) -> Result<C64> {
    Ok(f.pointwise_inner(g)?.mean())
}
