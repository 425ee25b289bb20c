//! Uniform sampling grids for tomograms `w(X, theta)` and phase-space
//! functions `W(q, p)`, with the quadrature and interpolation rules shared by
//! every other module.
//!
//! Units are `m = omega = hbar = 1` everywhere.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sampling of the optical tomogram domain: `X` on a symmetric interval with
/// an odd number of nodes (one sits at `X = 0`), `theta_j = j pi / n_theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_max: f64,
    pub n_x: usize,
    pub n_theta: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { x_max: 7.0, n_x: 281, n_theta: 64 }
    }
}

impl GridSpec {
    pub fn new(x_max: f64, n_x: usize, n_theta: usize) -> Result<Self> {
        let spec = Self { x_max, n_x, n_theta };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x_max.is_finite() && self.x_max > 0.0) {
            return Err(Error::InvalidGrid(format!("x_max must be positive, got {}", self.x_max)));
        }
        if self.n_x < 3 || self.n_x.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!("n_x must be odd and >= 3, got {}", self.n_x)));
        }
        if self.n_theta == 0 {
            return Err(Error::InvalidGrid("n_theta must be positive".into()));
        }
        Ok(())
    }

    pub fn x_min(&self) -> f64 {
        -self.x_max
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.x_max / (self.n_x - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        -self.x_max + i as f64 * self.dx()
    }

    pub fn theta(&self, j: usize) -> f64 {
        j as f64 * PI / self.n_theta as f64
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n_x).map(|i| self.x(i)).collect()
    }

    pub fn thetas(&self) -> Vec<f64> {
        (0..self.n_theta).map(|j| self.theta(j)).collect()
    }
}

/// Sampling of phase space: `q in [-q_max, q_max]`, `p in [-p_max, p_max]`,
/// endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseGridSpec {
    pub q_max: f64,
    pub p_max: f64,
    pub n_q: usize,
    pub n_p: usize,
}

impl Default for PhaseGridSpec {
    fn default() -> Self {
        Self { q_max: 7.0, p_max: 7.0, n_q: 256, n_p: 256 }
    }
}

impl PhaseGridSpec {
    pub fn square(half_width: f64, n: usize) -> Result<Self> {
        let spec = Self { q_max: half_width, p_max: half_width, n_q: n, n_p: n };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.q_max > 0.0 && self.p_max > 0.0 && self.q_max.is_finite() && self.p_max.is_finite()) {
            return Err(Error::InvalidGrid("phase-space bounds must be positive".into()));
        }
        if self.n_q < 3 || self.n_p < 3 {
            return Err(Error::InvalidGrid(format!(
                "phase grid needs at least 3x3 nodes, got {}x{}",
                self.n_q, self.n_p
            )));
        }
        Ok(())
    }

    pub fn dq(&self) -> f64 {
        2.0 * self.q_max / (self.n_q - 1) as f64
    }

    pub fn dp(&self) -> f64 {
        2.0 * self.p_max / (self.n_p - 1) as f64
    }

    pub fn q(&self, i: usize) -> f64 {
        -self.q_max + i as f64 * self.dq()
    }

    pub fn p(&self, j: usize) -> f64 {
        -self.p_max + j as f64 * self.dp()
    }

    /// Half-length of the longest line through the grid's bounding box.
    pub fn diagonal_extent(&self) -> f64 {
        self.q_max.hypot(self.p_max)
    }
}

/// Trapezoid rule on uniformly spaced samples.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => 0.0,
        n => h * (values.iter().sum::<f64>() - 0.5 * (values[0] + values[n - 1])),
    }
}

pub(crate) const STENCIL: usize = 6;

/// Six-point Lagrange interpolation stencil at fractional grid position `u`
/// (node `k` sits at `u = k`). Returns the first node index and the weights.
pub(crate) fn lagrange_stencil(u: f64) -> (isize, [f64; STENCIL]) {
    let base = u.floor();
    let t = u - base;
    let mut w = [0.0; STENCIL];
    for (a, wa) in w.iter_mut().enumerate() {
        let ja = a as f64 - 2.0;
        let mut num = 1.0;
        let mut den = 1.0;
        for b in 0..STENCIL {
            if b != a {
                let jb = b as f64 - 2.0;
                num *= t - jb;
                den *= ja - jb;
            }
        }
        *wa = num / den;
    }
    (base as isize - 2, w)
}

/// Interpolates uniformly spaced samples (first node at `x0`, spacing `h`);
/// samples outside `values` count as zero.
pub(crate) fn interpolate_1d(values: &[f64], x0: f64, h: f64, x: f64) -> f64 {
    let u = (x - x0) / h;
    let n = values.len() as isize;
    if u < -3.0 || u > n as f64 + 2.0 {
        return 0.0;
    }
    let (start, w) = lagrange_stencil(u);
    let mut acc = 0.0;
    for (k, wk) in w.iter().enumerate() {
        let idx = start + k as isize;
        if idx >= 0 && idx < n {
            acc += wk * values[idx as usize];
        }
    }
    acc
}

/// Samples of an optical tomogram `w(X, theta)`; row `j` holds `theta_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct OpticalTomogramGrid {
    pub spec: GridSpec,
    values: Vec<f64>,
}

impl OpticalTomogramGrid {
    pub fn new(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        spec.validate()?;
        if values.len() != spec.n_x * spec.n_theta {
            return Err(Error::InvalidGrid(format!(
                "expected {} values for {}x{} grid, got {}",
                spec.n_x * spec.n_theta,
                spec.n_theta,
                spec.n_x,
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid(format!("non-finite sample {bad}")));
        }
        Ok(Self { spec, values })
    }

    /// Samples `f(X, theta)` on every node.
    pub fn from_fn<F>(spec: GridSpec, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        spec.validate()?;
        let values: Vec<f64> = (0..spec.n_theta)
            .into_par_iter()
            .flat_map_iter(|j| {
                let theta = spec.theta(j);
                (0..spec.n_x).map(move |i| (i, theta))
            })
            .map(|(i, theta)| f(spec.x(i), theta))
            .collect();
        Self::new(spec, values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.values[j * self.spec.n_x..(j + 1) * self.spec.n_x]
    }

    pub fn get(&self, j: usize, i: usize) -> f64 {
        self.values[j * self.spec.n_x + i]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.spec.n_x)
    }

    /// `int w(X, theta_j) dX` for every row.
    pub fn row_norms(&self) -> Vec<f64> {
        let h = self.spec.dx();
        self.rows().map(|r| trapezoid(r, h)).collect()
    }

    /// Largest `|int w dX - 1|` over rows.
    pub fn normalization_defect(&self) -> f64 {
        self.row_norms().iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Largest absolute value in the two boundary columns.
    pub fn boundary_magnitude(&self) -> f64 {
        let last = self.spec.n_x - 1;
        self.rows().map(|r| r[0].abs().max(r[last].abs())).fold(0.0, f64::max)
    }

    /// Root-mean-square over theta of the L2 norm in X of `self - other`.
    pub fn l2_distance(&self, other: &Self) -> f64 {
        assert_eq!(self.spec, other.spec, "grids must share a spec");
        let h = self.spec.dx();
        let sum: f64 = self
            .rows()
            .zip(other.rows())
            .map(|(a, b)| {
                let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).collect();
                trapezoid(&d, h)
            })
            .sum();
        (sum / self.spec.n_theta as f64).sqrt()
    }

    /// Root-mean-square over theta of the L2 norm in X.
    pub fn l2_norm(&self) -> f64 {
        let h = self.spec.dx();
        let sum: f64 = self
            .rows()
            .map(|r| {
                let d: Vec<f64> = r.iter().map(|x| x * x).collect();
                trapezoid(&d, h)
            })
            .sum();
        (sum / self.spec.n_theta as f64).sqrt()
    }

    /// Trigonometric interpolant in theta over the parity-extended circle.
    pub fn circle(&self) -> ParityCircle {
        ParityCircle::new(self)
    }
}

/// Trigonometric interpolation of a tomogram grid in `theta`.
///
/// The `n_theta` rows on `[0, pi)` are extended to `2 n_theta` rows on
/// `[0, 2 pi)` by `w(X, theta + pi) = w(-X, theta)`; each `X` column is then
/// a periodic sequence with an exact discrete Fourier series.
#[derive(Debug, Clone)]
pub struct ParityCircle {
    spec: GridSpec,
    // cos/sin coefficients, harmonic-major: cos[k * n_x + i]
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl ParityCircle {
    pub fn new(grid: &OpticalTomogramGrid) -> Self {
        let spec = grid.spec;
        let n = spec.n_theta;
        let big_n = 2 * n;
        let nx = spec.n_x;
        let mut cos = vec![0.0; (n + 1) * nx];
        let mut sin = vec![0.0; (n + 1) * nx];
        let angles: Vec<f64> = (0..big_n).map(|j| j as f64 * PI / n as f64).collect();
        let mut column = vec![0.0; big_n];
        for i in 0..nx {
            for j in 0..n {
                column[j] = grid.get(j, i);
                column[j + n] = grid.get(j, nx - 1 - i);
            }
            for k in 0..=n {
                let (mut a, mut b) = (0.0, 0.0);
                for (s, &phi) in column.iter().zip(&angles) {
                    let arg = k as f64 * phi;
                    a += s * arg.cos();
                    b += s * arg.sin();
                }
                let scale = if k == 0 || k == n { 1.0 } else { 2.0 } / big_n as f64;
                cos[k * nx + i] = a * scale;
                sin[k * nx + i] = if k == n { 0.0 } else { b * scale };
            }
        }
        Self { spec, cos, sin }
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    /// The full `X` row at an arbitrary angle.
    pub fn row_at(&self, theta: f64) -> Vec<f64> {
        let nx = self.spec.n_x;
        let n = self.spec.n_theta;
        let mut row = vec![0.0; nx];
        for k in 0..=n {
            let (s, c) = (k as f64 * theta).sin_cos();
            let ck = &self.cos[k * nx..(k + 1) * nx];
            let sk = &self.sin[k * nx..(k + 1) * nx];
            for i in 0..nx {
                row[i] += c * ck[i] + s * sk[i];
            }
        }
        row
    }

    /// Value at an arbitrary `(X, theta)`: trigonometric in theta, six-point
    /// Lagrange in X, zero outside the X range.
    pub fn sample(&self, x: f64, theta: f64) -> f64 {
        let nx = self.spec.n_x;
        let u = (x - self.spec.x_min()) / self.spec.dx();
        if u < -3.0 || u > nx as f64 + 2.0 {
            return 0.0;
        }
        let (start, w) = lagrange_stencil(u);
        let n = self.spec.n_theta;
        let mut acc = 0.0;
        for k in 0..=n {
            let (s, c) = (k as f64 * theta).sin_cos();
            for (t, wt) in w.iter().enumerate() {
                let idx = start + t as isize;
                if idx >= 0 && (idx as usize) < nx {
                    let i = idx as usize;
                    acc += wt * (c * self.cos[k * nx + i] + s * self.sin[k * nx + i]);
                }
            }
        }
        acc
    }

    /// Grid of `w(X, theta_j + shift)` for all rows.
    pub fn shifted(&self, shift: f64) -> OpticalTomogramGrid {
        let spec = self.spec;
        let values: Vec<f64> = (0..spec.n_theta)
            .into_par_iter()
            .flat_map_iter(|j| self.row_at(spec.theta(j) + shift))
            .collect();
        OpticalTomogramGrid { spec, values }
    }
}

/// Samples of a phase-space function `W(q, p)`, row-major in `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    pub spec: PhaseGridSpec,
    values: Vec<f64>,
}

impl WignerGrid {
    pub fn new(spec: PhaseGridSpec, values: Vec<f64>) -> Result<Self> {
        spec.validate()?;
        if values.len() != spec.n_q * spec.n_p {
            return Err(Error::InvalidGrid(format!(
                "expected {} values for {}x{} phase grid, got {}",
                spec.n_q * spec.n_p,
                spec.n_q,
                spec.n_p,
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid(format!("non-finite sample {bad}")));
        }
        Ok(Self { spec, values })
    }

    pub fn from_fn<F>(spec: PhaseGridSpec, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        spec.validate()?;
        let values: Vec<f64> = (0..spec.n_q)
            .into_par_iter()
            .flat_map_iter(|i| {
                let q = spec.q(i);
                (0..spec.n_p).map(move |j| (q, j))
            })
            .map(|(q, j)| f(q, spec.p(j)))
            .collect();
        Self::new(spec, values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.spec.n_p + j]
    }

    pub fn q_row(&self, i: usize) -> &[f64] {
        &self.values[i * self.spec.n_p..(i + 1) * self.spec.n_p]
    }

    /// Two-dimensional trapezoid integral.
    pub fn integrate(&self) -> f64 {
        let dp = self.spec.dp();
        let rows: Vec<f64> = (0..self.spec.n_q).map(|i| trapezoid(self.q_row(i), dp)).collect();
        trapezoid(&rows, self.spec.dq())
    }

    /// Trapezoid integral of `f(q, p) W(q, p)`.
    pub fn integrate_with<F: Fn(f64, f64) -> f64>(&self, f: F) -> f64 {
        let dp = self.spec.dp();
        let rows: Vec<f64> = (0..self.spec.n_q)
            .map(|i| {
                let q = self.spec.q(i);
                let r: Vec<f64> =
                    self.q_row(i).iter().enumerate().map(|(j, w)| w * f(q, self.spec.p(j))).collect();
                trapezoid(&r, dp)
            })
            .collect();
        trapezoid(&rows, self.spec.dq())
    }

    /// Six-point tensor Lagrange interpolation; zero outside the grid.
    pub fn sample(&self, q: f64, p: f64) -> f64 {
        let s = &self.spec;
        let uq = (q + s.q_max) / s.dq();
        let up = (p + s.p_max) / s.dp();
        if uq < -3.0 || up < -3.0 || uq > s.n_q as f64 + 2.0 || up > s.n_p as f64 + 2.0 {
            return 0.0;
        }
        let (iq, wq) = lagrange_stencil(uq);
        let (ip, wp) = lagrange_stencil(up);
        let mut acc = 0.0;
        for (a, wa) in wq.iter().enumerate() {
            let i = iq + a as isize;
            if i < 0 || i >= s.n_q as isize {
                continue;
            }
            let row = self.q_row(i as usize);
            let mut inner = 0.0;
            for (b, wb) in wp.iter().enumerate() {
                let j = ip + b as isize;
                if j >= 0 && j < s.n_p as isize {
                    inner += wb * row[j as usize];
                }
            }
            acc += wa * inner;
        }
        acc
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.spec, other.spec, "grids must share a spec");
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// `sqrt(int (self - other)^2 dq dp)`.
    pub fn l2_distance(&self, other: &Self) -> f64 {
        assert_eq!(self.spec, other.spec, "grids must share a spec");
        let diff: Vec<f64> = self.values.iter().zip(&other.values).map(|(a, b)| (a - b) * (a - b)).collect();
        WignerGrid { spec: self.spec, values: diff }.integrate().sqrt()
    }

    /// Largest absolute value on the outermost ring of nodes.
    pub fn boundary_magnitude(&self) -> f64 {
        let s = &self.spec;
        let mut m: f64 = 0.0;
        for i in 0..s.n_q {
            m = m.max(self.get(i, 0).abs()).max(self.get(i, s.n_p - 1).abs());
        }
        for j in 0..s.n_p {
            m = m.max(self.get(0, j).abs()).max(self.get(s.n_q - 1, j).abs());
        }
        m
    }
}
