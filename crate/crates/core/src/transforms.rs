//! Radon maps between phase-space functions and tomograms, filtered
//! backprojection, characteristic functions and the optical/symplectic
//! conversion.
//!
//! Conventions: `w(X, theta) = int W(q, p) delta(X - q cos theta - p sin theta) dq dp`,
//! `M(X, mu, nu) = int W delta(X - mu q - nu p) dq dp` and
//! `phi(mu, nu) = int M(X, mu, nu) e^{iX} dX = int W e^{i(mu q + nu p)} dq dp`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::catalog::{polar_branch, Representation, State};
use crate::error::{Error, Result};
use crate::fock::{fock_optical_eval, fock_symplectic_eval, FockMatrix};
use crate::grid::{interpolate_1d, GridSpec, OpticalTomogramGrid, ParityCircle, PhaseGridSpec, WignerGrid};

/// Half-width (in units of the polar radius) and node count of the
/// quadrature used for closed-form characteristic functions and moments.
const QUAD_HALF_WIDTH: f64 = 10.0;
const QUAD_NODES: usize = 801;

/// Threshold above which a tomogram row is considered not to decay at the
/// edge of its X range.
pub const BOUNDARY_TOLERANCE: f64 = 1e-10;

/// A symplectic tomogram `M(X, mu, nu)`, realized either by a closed form or
/// through an optical tomogram and the polar relation
/// `M(X, mu, nu) = w(s X / r, theta) / r`, `(mu, nu) = s r (cos theta, sin theta)`.
#[derive(Debug, Clone)]
pub enum SymplecticView {
    /// A catalog entry, evaluated through its own closed forms.
    Catalog(State),
    /// Hermite-class sum of a Fock-basis matrix.
    Fock(FockMatrix),
    /// A sampled optical tomogram.
    Grid { grid: OpticalTomogramGrid, circle: ParityCircle },
    /// A sampled phase-space function, projected by line integrals.
    Phase(WignerGrid),
}

impl SymplecticView {
    pub fn from_state(state: State) -> Self {
        SymplecticView::Catalog(state)
    }

    pub fn from_optical(grid: OpticalTomogramGrid) -> Self {
        let circle = grid.circle();
        SymplecticView::Grid { grid, circle }
    }

    pub fn label(&self) -> String {
        match self {
            SymplecticView::Catalog(s) => s.name(),
            SymplecticView::Fock(rho) => format!("fock-matrix(n_max={})", rho.n_max()),
            SymplecticView::Grid { grid, .. } => {
                format!("optical-grid({}x{})", grid.spec.n_theta, grid.spec.n_x)
            }
            SymplecticView::Phase(w) => format!("wigner-grid({}x{})", w.spec.n_q, w.spec.n_p),
        }
    }

    /// Whether `M(lambda X, lambda mu, lambda nu) = |lambda|^{-1} M` holds by
    /// construction.
    pub fn is_homogeneous(&self) -> bool {
        match self {
            SymplecticView::Catalog(s) => s.is_homogeneous(),
            _ => true,
        }
    }

    /// `M(X, mu, nu)`.
    pub fn eval(&self, x: f64, mu: f64, nu: f64) -> Result<f64> {
        match self {
            SymplecticView::Catalog(s) if s.has(Representation::Symplectic) => s.symplectic(x, mu, nu),
            SymplecticView::Fock(rho) => fock_symplectic_eval(rho, x, mu, nu),
            _ => {
                let r = mu.hypot(nu);
                if r == 0.0 {
                    return Err(Error::OriginPoint { mu, nu });
                }
                let (s, theta) = polar_branch(mu, nu);
                Ok(self.optical(s * x / r, theta)? / r)
            }
        }
    }

    /// `w(X, theta) = M(X, cos theta, sin theta)`, using the optical closed
    /// form directly where one exists.
    pub fn optical(&self, x: f64, theta: f64) -> Result<f64> {
        match self {
            SymplecticView::Catalog(s) if s.has(Representation::Optical) => s.optical(x, theta),
            SymplecticView::Catalog(s) => s.symplectic(x, theta.cos(), theta.sin()),
            SymplecticView::Fock(rho) => Ok(fock_optical_eval(rho, x, theta)),
            SymplecticView::Grid { circle, .. } => Ok(circle.sample(x, theta)),
            SymplecticView::Phase(w) => Ok(radon_line_integral(w, x, theta, w.spec.dq().min(w.spec.dp()))),
        }
    }

    /// Restriction to the unit circle, sampled on `spec`.
    pub fn optical_grid(&self, spec: GridSpec) -> Result<OpticalTomogramGrid> {
        match self {
            SymplecticView::Grid { grid, .. } if grid.spec == spec => Ok(grid.clone()),
            SymplecticView::Grid { circle, .. } if circle.spec().n_x == spec.n_x && circle.spec().x_max == spec.x_max => {
                let values: Vec<f64> = (0..spec.n_theta).flat_map(|j| circle.row_at(spec.theta(j))).collect();
                OpticalTomogramGrid::new(spec, values)
            }
            SymplecticView::Phase(w) => radon_optical(w, spec),
            _ => {
                spec.validate()?;
                let values: Vec<f64> = (0..spec.n_theta)
                    .into_par_iter()
                    .flat_map_iter(|j| {
                        let theta = spec.theta(j);
                        (0..spec.n_x).map(move |i| self.optical(spec.x(i), theta))
                    })
                    .collect::<Result<_>>()?;
                OpticalTomogramGrid::new(spec, values)
            }
        }
    }

    /// `phi(mu, nu) = int M(X, mu, nu) e^{iX} dX`; `phi(0, 0) = 1` by the
    /// normalization limit.
    pub fn characteristic(&self, mu: f64, nu: f64) -> Complex64 {
        let r = mu.hypot(nu);
        if r == 0.0 {
            return Complex64::new(1.0, 0.0);
        }
        match self {
            SymplecticView::Phase(w) => wigner_characteristic(w, mu, nu),
            SymplecticView::Grid { grid, circle } => {
                let (s, theta) = polar_branch(mu, nu);
                let spec = grid.spec;
                let row = match node_index(&spec, theta) {
                    Some(j) => grid.row(j).to_vec(),
                    None => circle.row_at(theta),
                };
                // int w(s y, theta) e^{i r y} dy on the grid's own X nodes
                let n = spec.n_x;
                let h = spec.dx();
                let mut acc = Complex64::new(0.0, 0.0);
                for i in 0..n {
                    let v = if s > 0.0 { row[i] } else { row[n - 1 - i] };
                    let weight = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
                    acc += Complex64::from_polar(weight * v, r * spec.x(i));
                }
                acc * h
            }
            _ => {
                let scale = if self.is_homogeneous() { r } else { r.max(1.0) };
                let (ys, dy) = quadrature_nodes();
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, &y) in ys.iter().enumerate() {
                    let x = scale * y;
                    let m = self.eval(x, mu, nu).unwrap_or(0.0);
                    let weight = if k == 0 || k == ys.len() - 1 { 0.5 } else { 1.0 };
                    acc += Complex64::from_polar(weight * m, x);
                }
                acc * (dy * scale)
            }
        }
    }

    /// `int X^m M(X, mu, nu) dX`.
    pub fn moment(&self, m: usize, mu: f64, nu: f64) -> Result<f64> {
        let r = mu.hypot(nu);
        if r == 0.0 && self.is_homogeneous() {
            return Err(Error::OriginPoint { mu, nu });
        }
        if let SymplecticView::Grid { grid, circle } = self {
            let (s, theta) = polar_branch(mu, nu);
            let spec = grid.spec;
            let row = match node_index(&spec, theta) {
                Some(j) => grid.row(j).to_vec(),
                None => circle.row_at(theta),
            };
            // X = r y on the grid's own nodes, M dX = w(s y) dy
            let n = spec.n_x;
            let vals: Vec<f64> = (0..n)
                .map(|i| {
                    let v = if s > 0.0 { row[i] } else { row[n - 1 - i] };
                    (r * spec.x(i)).powi(m as i32) * v
                })
                .collect();
            return Ok(crate::grid::trapezoid(&vals, spec.dx()));
        }
        let scale = if self.is_homogeneous() { r } else { r.max(1.0) };
        let (ys, dy) = quadrature_nodes();
        let vals: Vec<f64> = ys
            .iter()
            .map(|&y| {
                let x = scale * y;
                self.eval(x, mu, nu).map(|v| x.powi(m as i32) * v)
            })
            .collect::<Result<_>>()?;
        Ok(crate::grid::trapezoid(&vals, dy) * scale)
    }
}

fn quadrature_nodes() -> (Vec<f64>, f64) {
    let dy = 2.0 * QUAD_HALF_WIDTH / (QUAD_NODES - 1) as f64;
    ((0..QUAD_NODES).map(|k| -QUAD_HALF_WIDTH + k as f64 * dy).collect(), dy)
}

fn node_index(spec: &GridSpec, theta: f64) -> Option<usize> {
    let u = theta * spec.n_theta as f64 / PI;
    let j = u.round();
    if (u - j).abs() < 1e-9 && j >= 0.0 && (j as usize) < spec.n_theta {
        Some(j as usize)
    } else {
        None
    }
}

/// `int W(q, p) e^{i(mu q + nu p)} dq dp` by the two-dimensional trapezoid
/// rule.
pub fn wigner_characteristic(w: &WignerGrid, mu: f64, nu: f64) -> Complex64 {
    let s = &w.spec;
    let edge = |k: usize, n: usize| if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
    let ep: Vec<Complex64> =
        (0..s.n_p).map(|j| Complex64::from_polar(edge(j, s.n_p) * s.dp(), nu * s.p(j))).collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..s.n_q {
        let row = w.q_row(i);
        let inner: Complex64 = row.iter().zip(&ep).map(|(v, e)| e * *v).sum();
        acc += inner * Complex64::from_polar(edge(i, s.n_q) * s.dq(), mu * s.q(i));
    }
    acc
}

/// Integral of `W` along the line `X = q cos theta + p sin theta` with
/// parameter step `ds`; `W` counts as zero outside its grid.
pub fn radon_line_integral(w: &WignerGrid, x: f64, theta: f64, ds: f64) -> f64 {
    let spec = &w.spec;
    let (sn, c) = theta.sin_cos();
    // q = X c - s sn, p = X sn + s c
    let q_lim = spec.q_max + 3.0 * spec.dq();
    let p_lim = spec.p_max + 3.0 * spec.dp();
    let s_max = spec.q_max.hypot(spec.p_max);
    let (mut lo, mut hi) = (-s_max, s_max);
    let mut clip = |center: f64, slope: f64, lim: f64| {
        // constraint |center + slope s| <= lim
        if slope.abs() < 1e-14 {
            if center.abs() > lim {
                lo = 1.0;
                hi = 0.0;
            }
            return;
        }
        let a = (-lim - center) / slope;
        let b = (lim - center) / slope;
        lo = lo.max(a.min(b));
        hi = hi.min(a.max(b));
    };
    clip(x * c, -sn, q_lim);
    clip(x * sn, c, p_lim);
    if lo > hi {
        return 0.0;
    }
    let k_lo = (lo / ds).ceil() as i64;
    let k_hi = (hi / ds).floor() as i64;
    let mut acc = 0.0;
    for k in k_lo..=k_hi {
        let s = k as f64 * ds;
        acc += w.sample(x * c - s * sn, x * sn + s * c);
    }
    acc * ds
}

/// Optical tomogram of a phase-space function by line integrals, one per
/// `(X, theta)` node of `out`.
pub fn radon_optical(w: &WignerGrid, out: GridSpec) -> Result<OpticalTomogramGrid> {
    out.validate()?;
    let extent = w.spec.diagonal_extent();
    if out.x_max > extent {
        return Err(Error::OutOfRange { x: out.x_max, extent });
    }
    let ds = out.dx();
    let values: Vec<f64> = (0..out.n_theta)
        .into_par_iter()
        .flat_map_iter(|j| {
            let theta = out.theta(j);
            (0..out.n_x).map(move |i| radon_line_integral(w, out.x(i), theta, ds))
        })
        .collect();
    OpticalTomogramGrid::new(out, values)
}

/// `M` realized from an optical tomogram through the polar relation.
pub fn optical_to_symplectic(w: OpticalTomogramGrid) -> SymplecticView {
    SymplecticView::from_optical(w)
}

/// Restriction `w(X, theta) = M(X, cos theta, sin theta)` on `spec`.
pub fn symplectic_to_optical(m: &SymplecticView, spec: GridSpec) -> Result<OpticalTomogramGrid> {
    spec.validate()?;
    let values: Vec<f64> = (0..spec.n_theta)
        .into_par_iter()
        .flat_map_iter(|j| {
            let (s, c) = spec.theta(j).sin_cos();
            (0..spec.n_x).map(move |i| m.eval(spec.x(i), c, s))
        })
        .collect::<Result<_>>()?;
    OpticalTomogramGrid::new(spec, values)
}

/// Output of [`inverse_radon_optical`].
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub wigner: WignerGrid,
    /// Largest `|w|` on the edge columns of the input.
    pub boundary_magnitude: f64,
    /// Set when the input does not decay at its X boundary, so the ramp
    /// filter rings.
    pub boundary_warning: bool,
}

/// Ram-Lak kernel: spatial samples of `|eta|` band-limited at the Nyquist
/// frequency of step `tau`.
fn ramp_kernel(n: i64, tau: f64) -> f64 {
    if n == 0 {
        1.0 / (4.0 * tau * tau)
    } else if n % 2 == 0 {
        0.0
    } else {
        -1.0 / ((n * n) as f64 * PI * PI * tau * tau)
    }
}

/// Filtered backprojection:
/// `W(q, p) = (1/(2 pi)^2) int_0^pi dtheta int |eta| w~(eta, theta) e^{i eta (q cos theta + p sin theta)} d eta`.
///
/// Each row is convolved with the Ram-Lak kernel (zero padded), then
/// backprojected with six-point interpolation along `X`.
pub fn inverse_radon_optical(w: &OpticalTomogramGrid, out: PhaseGridSpec) -> Result<Reconstruction> {
    out.validate()?;
    let spec = w.spec;
    let tau = spec.dx();
    let center = ((spec.n_x - 1) / 2) as i64;
    let reach = out.diagonal_extent() + 4.0 * tau;
    let half = (reach / tau).ceil() as i64;
    let len = (2 * half + 1) as usize;
    let filtered: Vec<Vec<f64>> = (0..spec.n_theta)
        .into_par_iter()
        .map(|j| {
            let row = w.row(j);
            (0..len)
                .map(|k| {
                    let kk = k as i64 - half;
                    let mut acc = 0.0;
                    for (i, v) in row.iter().enumerate() {
                        acc += ramp_kernel(kk - (i as i64 - center), tau) * v;
                    }
                    acc * tau
                })
                .collect()
        })
        .collect();
    let trig: Vec<(f64, f64)> = (0..spec.n_theta).map(|j| spec.theta(j).sin_cos()).collect();
    let x0 = -(half as f64) * tau;
    let dtheta = PI / spec.n_theta as f64;
    let values: Vec<f64> = (0..out.n_q)
        .into_par_iter()
        .flat_map_iter(|i| {
            let q = out.q(i);
            let filtered = &filtered;
            let trig = &trig;
            (0..out.n_p).map(move |jp| {
                let p = out.p(jp);
                let mut acc = 0.0;
                for (row, &(s, c)) in filtered.iter().zip(trig) {
                    acc += interpolate_1d(row, x0, tau, q * c + p * s);
                }
                acc * dtheta
            })
        })
        .collect();
    let boundary = w.boundary_magnitude();
    Ok(Reconstruction {
        wigner: WignerGrid::new(out, values)?,
        boundary_magnitude: boundary,
        boundary_warning: boundary > BOUNDARY_TOLERANCE,
    })
}

/// Characteristic-function values on a list of points.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicSamples {
    pub points: Vec<(f64, f64)>,
    pub values: Vec<Complex64>,
    /// True where the value is the normalization limit `phi(0, 0) = 1`
    /// rather than a quadrature.
    pub limit: Vec<bool>,
}

pub fn characteristic_function(source: &SymplecticView, points: &[(f64, f64)]) -> CharacteristicSamples {
    let values: Vec<Complex64> = points.par_iter().map(|&(mu, nu)| source.characteristic(mu, nu)).collect();
    let limit = points.iter().map(|&(mu, nu)| mu == 0.0 && nu == 0.0).collect();
    CharacteristicSamples { points: points.to_vec(), values, limit }
}

/// `phi` sampled on the uniform `(mu, nu)` grid described by `spec`
/// (`q` plays `mu`, `p` plays `nu`), row-major in `mu`.
pub fn characteristic_grid(source: &SymplecticView, spec: PhaseGridSpec) -> Result<Vec<Complex64>> {
    spec.validate()?;
    Ok((0..spec.n_q * spec.n_p)
        .into_par_iter()
        .map(|k| source.characteristic(spec.q(k / spec.n_p), spec.p(k % spec.n_p)))
        .collect())
}

/// Output of [`wigner_from_characteristic`].
#[derive(Debug, Clone)]
pub struct FourierReconstruction {
    pub wigner: WignerGrid,
    /// Largest imaginary part discarded.
    pub max_imag: f64,
    /// Largest `|phi|` on the edge of the `(mu, nu)` grid.
    pub edge_magnitude: f64,
    /// Set when `phi` does not decay below `1e-8` at the edge.
    pub decay_warning: bool,
}

/// `W(q, p) = (1/(2 pi)^2) int phi(mu, nu) e^{-i(mu q + nu p)} dmu dnu` by
/// a separable trapezoid sum.
pub fn wigner_from_characteristic(
    grid: PhaseGridSpec,
    phi: &[Complex64],
    out: PhaseGridSpec,
) -> Result<FourierReconstruction> {
    grid.validate()?;
    out.validate()?;
    if phi.len() != grid.n_q * grid.n_p {
        return Err(Error::InvalidGrid(format!(
            "expected {} characteristic samples, got {}",
            grid.n_q * grid.n_p,
            phi.len()
        )));
    }
    let edge = |k: usize, n: usize| if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
    // A[a][jp] = sum_nu phi(mu_a, nu) e^{-i nu p}
    let partial: Vec<Vec<Complex64>> = (0..grid.n_q)
        .into_par_iter()
        .map(|a| {
            let row = &phi[a * grid.n_p..(a + 1) * grid.n_p];
            (0..out.n_p)
                .map(|jp| {
                    let p = out.p(jp);
                    row.iter()
                        .enumerate()
                        .map(|(b, v)| v * Complex64::from_polar(edge(b, grid.n_p), -grid.p(b) * p))
                        .sum()
                })
                .collect()
        })
        .collect();
    let norm = grid.dq() * grid.dp() / (4.0 * PI * PI);
    let complex: Vec<Complex64> = (0..out.n_q)
        .into_par_iter()
        .flat_map_iter(|i| {
            let q = out.q(i);
            let phases: Vec<Complex64> =
                (0..grid.n_q).map(|a| Complex64::from_polar(edge(a, grid.n_q), -grid.q(a) * q)).collect();
            let partial = &partial;
            (0..out.n_p).map(move |jp| {
                let s: Complex64 = phases.iter().zip(partial).map(|(e, row)| e * row[jp]).sum();
                s * norm
            })
        })
        .collect();
    let max_imag = complex.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    let mut edge_magnitude: f64 = 0.0;
    for a in 0..grid.n_q {
        for b in 0..grid.n_p {
            if a == 0 || b == 0 || a == grid.n_q - 1 || b == grid.n_p - 1 {
                edge_magnitude = edge_magnitude.max(phi[a * grid.n_p + b].norm());
            }
        }
    }
    Ok(FourierReconstruction {
        wigner: WignerGrid::new(out, complex.iter().map(|c| c.re).collect())?,
        max_imag,
        edge_magnitude,
        decay_warning: edge_magnitude > 1e-8,
    })
}
