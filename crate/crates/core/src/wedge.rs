//! Exterior algebra on `ℂⁿ` in lexicographic multi-index coordinates, and
//! pointwise wedge products of grid functions.
//!
//! The basis of `∧^k ℂⁿ` is `{e_S = e_{i_1} ∧ … ∧ e_{i_k}}` over the
//! increasing `k`-subsets `S`, ordered lexicographically, and each `e_S` is
//! a unit vector. With that normalization
//! `⟨u_1 ∧ … ∧ u_p, x_1 ∧ … ∧ x_p⟩ = det[⟨u_i, x_j⟩]`.

use std::collections::HashMap;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fourier::{CircleGrid, GridScalar, GridVector};
use crate::linalg::{determinant, DenseMatrix};

pub const MAX_AMBIENT_DIM: usize = 16;

/// Tolerance on pointwise orthonormality for frames passed to
/// [`project_out_frame`].
pub const FRAME_TOL: f64 = 1e-6;

/// The `k`-subsets of `{0, …, n−1}` in lexicographic order.
#[derive(Clone, Debug)]
pub struct WedgeIndexSet {
    n: usize,
    k: usize,
    subsets: Vec<u32>,
    lookup: HashMap<u32, usize>,
}

impl WedgeIndexSet {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n == 0 || n > MAX_AMBIENT_DIM {
            return Err(Error::Config(format!(
                "ambient dimension {n} outside 1..={MAX_AMBIENT_DIM}"
            )));
        }
        if k > n {
            return Err(Error::Dimension(format!("wedge degree {k} exceeds dimension {n}")));
        }
        let mut subsets = Vec::new();
        let mut current = Vec::with_capacity(k);
        lexicographic(n, k, 0, &mut current, &mut subsets);
        let lookup = subsets.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        Ok(Self { n, k, subsets, lookup })
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    /// Members of subset `i`, increasing.
    pub fn subset(&self, i: usize) -> Vec<usize> {
        bits(self.subsets[i])
    }

    pub fn index_of(&self, members: &[usize]) -> Option<usize> {
        let mask = members.iter().fold(0u32, |m, &i| m | (1 << i));
        if mask.count_ones() as usize != members.len() {
            return None;
        }
        self.lookup.get(&mask).copied()
    }

    fn index_of_mask(&self, mask: u32) -> usize {
        self.lookup[&mask]
    }
}

fn lexicographic(n: usize, k: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<u32>) {
    if current.len() == k {
        out.push(current.iter().fold(0u32, |m, &i| m | (1 << i)));
        return;
    }
    for i in start..n {
        current.push(i);
        lexicographic(n, k, i + 1, current, out);
        current.pop();
    }
}

fn bits(mask: u32) -> Vec<usize> {
    (0..32).filter(|&i| mask & (1 << i) != 0).collect()
}

/// Grid function with values in `∧^k ℂⁿ`.
#[derive(Clone, Debug)]
pub struct WedgeGridVector {
    grid: CircleGrid,
    index: WedgeIndexSet,
    /// One array of grid samples per basis multi-index.
    coords: Vec<Vec<C64>>,
}

impl WedgeGridVector {
    /// The constant `1 ∈ ∧^0 ℂⁿ`, the neutral element for appending.
    pub fn unit(grid: CircleGrid, n: usize) -> Result<Self> {
        let index = WedgeIndexSet::new(n, 0)?;
        Ok(Self {
            grid,
            index,
            coords: vec![vec![C64::new(1.0, 0.0); grid.size()]],
        })
    }

    /// `f_1 ∧̇ f_2 ∧̇ … ∧̇ f_p`; the empty frame gives the unit.
    pub fn from_frame(grid: CircleGrid, n: usize, frame: &[GridVector]) -> Result<Self> {
        frame
            .iter()
            .try_fold(Self::unit(grid, n)?, |w, f| exterior_append(&w, f))
    }

    pub fn grid(&self) -> CircleGrid {
        self.grid
    }

    pub fn ambient(&self) -> usize {
        self.index.n
    }

    pub fn degree(&self) -> usize {
        self.index.k
    }

    pub fn index_set(&self) -> &WedgeIndexSet {
        &self.index
    }

    pub fn coordinate(&self, i: usize) -> &[C64] {
        &self.coords[i]
    }

    pub fn coords_at(&self, point: usize) -> Vec<C64> {
        self.coords.iter().map(|c| c[point]).collect()
    }

    /// Pointwise `Σ_S a_S conj(b_S)`.
    pub fn pointwise_inner(&self, other: &WedgeGridVector) -> Result<GridScalar> {
        if self.grid != other.grid || self.index.n != other.index.n || self.index.k != other.index.k {
            return Err(Error::Dimension("wedge vectors live in different spaces".into()));
        }
        let m = self.grid.size();
        let mut out = vec![C64::new(0.0, 0.0); m];
        for (a, b) in self.coords.iter().zip(&other.coords) {
            for ((o, x), y) in out.iter_mut().zip(a).zip(b) {
                *o += x * y.conj();
            }
        }
        GridScalar::new(self.grid, out)
    }

    pub fn pointwise_norm_sqr(&self) -> GridScalar {
        let m = self.grid.size();
        let mut out = vec![C64::new(0.0, 0.0); m];
        for a in &self.coords {
            for (o, x) in out.iter_mut().zip(a) {
                o.re += x.norm_sqr();
            }
        }
        GridScalar::new(self.grid, out).expect("finite by construction")
    }
}

/// `w ∧̇ v`: the coefficient of `e_T` (`|T| = k+1`) is
/// `Σ_{i∈T} (−1)^{#{t∈T : t>i}} w_{T∖i} v_i`.
pub fn exterior_append(w: &WedgeGridVector, v: &GridVector) -> Result<WedgeGridVector> {
    let n = w.index.n;
    let k = w.index.k;
    if v.grid() != w.grid {
        return Err(Error::Dimension("grid mismatch".into()));
    }
    if v.dim() != n {
        return Err(Error::Dimension(format!(
            "appending a vector of dimension {} to a wedge over ℂ^{n}",
            v.dim()
        )));
    }
    if k + 1 > n {
        return Err(Error::Dimension(format!(
            "cannot raise wedge degree to {} in dimension {n}",
            k + 1
        )));
    }
    let index = WedgeIndexSet::new(n, k + 1)?;
    let m = w.grid.size();
    let mut coords = vec![vec![C64::new(0.0, 0.0); m]; index.len()];
    for (t, coord) in index.subsets.iter().zip(coords.iter_mut()) {
        let members = bits(*t);
        for (pos, &i) in members.iter().enumerate() {
            let sign = if (k - pos).is_multiple_of(2) { 1.0 } else { -1.0 };
            let src = &w.coords[w.index.index_of_mask(t & !(1 << i))];
            let vi = v.component(i);
            for ((c, a), b) in coord.iter_mut().zip(src).zip(vi) {
                *c += a * b * sign;
            }
        }
    }
    Ok(WedgeGridVector {
        grid: w.grid,
        index,
        coords,
    })
}

/// `det[⟨u_i(θ), x_j(θ)⟩]` at one grid point, which equals the inner
/// product of `u_1 ∧ … ∧ u_p` with `x_1 ∧ … ∧ x_p` there.
pub fn wedge_gram_inner(u: &[GridVector], x: &[GridVector], point: usize) -> Result<C64> {
    if u.len() != x.len() {
        return Err(Error::Dimension(format!("{} vectors against {}", u.len(), x.len())));
    }
    let p = u.len();
    let uk: Vec<Vec<C64>> = u.iter().map(|f| f.at(point)).collect();
    let xk: Vec<Vec<C64>> = x.iter().map(|f| f.at(point)).collect();
    let gram = DenseMatrix::from_fn(p, p, |i, j| {
        uk[i].iter().zip(&xk[j]).map(|(a, b)| a * b.conj()).sum()
    });
    determinant(&gram)
}

/// Largest pointwise deviation of `⟨f_i(θ), f_k(θ)⟩` from `δ_ik`.
pub fn frame_orthonormality_deviation(frame: &[GridVector]) -> Result<f64> {
    let mut worst = 0.0f64;
    for (i, a) in frame.iter().enumerate() {
        for (k, b) in frame.iter().enumerate().skip(i) {
            let ip = a.pointwise_inner(b)?;
            let target = if i == k { 1.0 } else { 0.0 };
            worst = ip
                .values()
                .iter()
                .map(|z| (z - target).norm())
                .fold(worst, f64::max);
        }
    }
    Ok(worst)
}

/// `(I − Σ_i ξ_i ξ_i*) v` pointwise, for a pointwise orthonormal frame.
pub fn project_out_frame(v: &GridVector, frame: &[GridVector]) -> Result<GridVector> {
    let deviation = frame_orthonormality_deviation(frame)?;
    if deviation > FRAME_TOL {
        return Err(Error::FrameNotOrthonormal { deviation });
    }
    let mut out = v.clone();
    for xi in frame {
        // ξ (ξ* v)
        let coef = v.pointwise_inner(xi)?;
        out = out.sub(&xi.mul_scalar(&coef)?)?;
    }
    Ok(out)
}
