//! Scalar outer (spectral) factors and inner–outer splitting.
//!
//! For a positive profile `r` on the circle the outer factor is
//! `h = exp(c_0/2 + Σ_{k>0} c_k z^k)` where `c_k` are the Fourier
//! coefficients of `log r`; then `|h|² = r`, `h` is analytic and zero-free
//! in the disk, and `h(0) > 0`.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::{forward, inverse, FourierVector, GridScalar, GridVector, TOL_TAIL};

/// Default relative floor below which a profile counts as vanishing.
pub const DEFAULT_TOL_ZERO: f64 = 1e-10;
/// Default relative bound on negative-frequency coefficients of `h`.
pub const DEFAULT_TOL_ANALYTIC: f64 = 1e-8;
const NEGATIVE_FLOOR: f64 = 1e-12;
const UNIT_TOL: f64 = 1e-7;

#[derive(Clone, Debug)]
pub struct OuterScalar {
    values: GridScalar,
    coeffs: FourierVector,
    modulus_residual: f64,
}

impl OuterScalar {
    pub fn values(&self) -> &GridScalar {
        &self.values
    }

    pub fn coeffs(&self) -> &FourierVector {
        &self.coeffs
    }

    /// `h(0)`, the zeroth coefficient.
    pub fn at_origin(&self) -> C64 {
        self.coeffs.coeff(0, 0)
    }

    /// `max_θ | |h|² − r | / max r`.
    pub fn modulus_residual(&self) -> f64 {
        self.modulus_residual
    }
}

/// Outer factor of the profile `r ≥ 0` sampled on the grid.
pub fn spectral_factor(r: &GridScalar, tol_zero: f64, tol_analytic: f64) -> Result<OuterScalar> {
    let grid = r.grid();
    let vals = r.values();
    let max = vals.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    if max.is_nan() || max <= 0.0 {
        return Err(Error::InvalidProfile("profile is not positive anywhere".into()));
    }
    let worst_imag = vals.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if worst_imag > NEGATIVE_FLOOR * max.max(1.0) {
        return Err(Error::InvalidProfile(format!(
            "profile has imaginary part of size {worst_imag:e}"
        )));
    }
    let min = vals.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    if min < -NEGATIVE_FLOOR * max.max(1.0) {
        return Err(Error::InvalidProfile(format!("profile takes the negative value {min:e}")));
    }
    if min <= tol_zero * max {
        return Err(Error::DegenerateOuter(format!(
            "profile minimum {min:e} is below {tol_zero:e} times its maximum {max:e}"
        )));
    }

    let logs: Vec<C64> = vals.iter().map(|z| C64::new(z.re.ln(), 0.0)).collect();
    let c = forward(&logs);
    let m = grid.size();
    let half = grid.half() as usize;
    let scale = c.iter().skip(1).map(|z| z.norm()).fold(1.0, f64::max);
    let edge = half - half / 8;
    let tail = (edge..=m - edge)
        .map(|i| c[i % m].norm())
        .fold(0.0, f64::max);
    if tail >= TOL_TAIL * scale {
        return Err(Error::Aliasing(format!(
            "log-profile coefficients near the window edge have size {tail:e}; increase the grid size"
        )));
    }

    let mut analytic_part = vec![C64::new(0.0, 0.0); m];
    analytic_part[0] = c[0] * 0.5;
    analytic_part[1..half].copy_from_slice(&c[1..half]);
    let exponent = inverse(&analytic_part);
    let values: Vec<C64> = exponent.iter().map(|z| z.exp()).collect();
    let values = GridScalar::new(grid, values)?;

    let mut coeffs = values.transform();
    let hmax = coeffs.component(0).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let negative = coeffs.max_negative();
    if negative >= tol_analytic * hmax {
        return Err(Error::Aliasing(format!(
            "outer factor has negative-frequency coefficients of relative size {:e}",
            negative / hmax
        )));
    }
    coeffs.mark_analytic(tol_analytic * hmax)?;

    let modulus_residual = values
        .values()
        .iter()
        .zip(vals)
        .map(|(h, r)| (h.norm_sqr() - r.re).abs())
        .fold(0.0, f64::max)
        / max;

    Ok(OuterScalar {
        values,
        coeffs,
        modulus_residual,
    })
}

/// `ξ = f / h`, pointwise of unit norm when `|h| = ‖f‖`.
pub fn inner_outer_split(f: &GridVector, h: &OuterScalar) -> Result<GridVector> {
    let hv = h.values();
    let floor = hv.max_abs() * DEFAULT_TOL_ZERO;
    if hv.min_abs() <= floor {
        return Err(Error::DegenerateOuter(format!(
            "outer factor nearly vanishes (min |h| = {:e})",
            hv.min_abs()
        )));
    }
    let xi = f.div_scalar(hv)?;
    let deviation = xi
        .pointwise_norms()
        .iter()
        .map(|n| (n - 1.0).abs())
        .fold(0.0, f64::max);
    if deviation > UNIT_TOL {
        return Err(Error::Invariant(format!(
            "inner factor deviates from unit norm by {deviation:e}"
        )));
    }
    Ok(xi)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OuterReport {
    pub winding: i64,
    pub min_modulus: f64,
    pub negative_coefficient: f64,
    pub pass: bool,
}

/// Winding number of the closed curve `θ ↦ f(θ)` around the origin.
pub fn winding_number(values: &[C64]) -> i64 {
    let m = values.len();
    let total: f64 = (0..m)
        .map(|k| (values[(k + 1) % m] / values[k]).arg())
        .sum();
    (total / std::f64::consts::TAU).round() as i64
}

/// Checks that `h` is analytic, zero-free on the circle, has winding
/// number zero and `h(0) > 0`.
pub fn check_outer(h: &GridScalar, tol_analytic: f64) -> OuterReport {
    let coeffs = h.transform();
    let scale = coeffs.component(0).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let negative_coefficient = if scale > 0.0 {
        coeffs.max_negative() / scale
    } else {
        0.0
    };
    let min_modulus = h.min_abs();
    let zero_free = min_modulus > DEFAULT_TOL_ZERO * scale;
    let winding = if zero_free { winding_number(h.values()) } else { 0 };
    let origin = coeffs.coeff(0, 0);
    let pass = zero_free
        && winding == 0
        && negative_coefficient < tol_analytic
        && origin.re > 0.0
        && origin.im.abs() <= 1e-10 * scale;
    OuterReport {
        winding,
        min_modulus,
        negative_coefficient,
        pass,
    }
}
