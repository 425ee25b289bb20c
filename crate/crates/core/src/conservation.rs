//! Conditions for a tomogram-like function to keep unit normalization under
//! tomographic evolution: harmonic content of the X-moments, the cubic
//! normalization flux, symplectic moment polynomials and the Hermite-class
//! projection.
//!
//! The moment `g_m(theta) = int X^m w dX` of a member of the Hermite class is
//! a trigonometric polynomial containing only harmonics `k <= m` with
//! `k = m (mod 2)`. The theta grid covers `[0, pi)`; moments are extended to
//! the full circle by `g_m(theta + pi) = (-1)^m g_m(theta)` before any
//! Fourier analysis.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{fock_optical_grid, psi_table, FockMatrix};
use crate::grid::{trapezoid, GridSpec, OpticalTomogramGrid, WignerGrid};
use crate::hermite::hermite_functions;
use crate::transforms::SymplecticView;

/// Boundary contribution above which a moment is flagged as truncated.
const TRUNCATION_TOLERANCE: f64 = 1e-6;
/// RMS moment size below which symplectic fits are judged absolutely.
const MOMENT_FLOOR: f64 = 1e-3;
/// High-frequency amplitude below which a profile counts as clean.
const NOISE_FLOOR: f64 = 1e-10;

/// `g_m(theta_j) = int X^m w(X, theta_j) dX`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentProfile {
    pub order: usize,
    pub thetas: Vec<f64>,
    pub values: Vec<f64>,
    /// Set when `|X|^m w` has not decayed at the X boundary.
    pub truncation_warning: bool,
}

pub fn moment_profile(w: &OpticalTomogramGrid, m: usize) -> MomentProfile {
    let spec = w.spec;
    let xs = spec.xs();
    let powers: Vec<f64> = xs.iter().map(|x| x.powi(m as i32)).collect();
    let values = w
        .rows()
        .map(|row| {
            let integrand: Vec<f64> = row.iter().zip(&powers).map(|(v, p)| v * p).collect();
            trapezoid(&integrand, spec.dx())
        })
        .collect();
    let tail = spec.x_max.powi(m as i32) * w.boundary_magnitude();
    MomentProfile { order: m, thetas: spec.thetas(), values, truncation_warning: tail > TRUNCATION_TOLERANCE }
}

/// One harmonic `a cos k theta + b sin k theta` of a moment profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Harmonic {
    pub k: usize,
    pub cos: f64,
    pub sin: f64,
    pub allowed: bool,
}

/// Harmonic decomposition of `g_m` split into the harmonics the moment
/// conditions allow (`k <= m`, `k = m mod 2`) and those they forbid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicFit {
    pub order: usize,
    pub harmonics: Vec<Harmonic>,
    /// L2 norm of the forbidden coefficients.
    pub residual: f64,
}

impl HarmonicFit {
    pub fn harmonic(&self, k: usize) -> Option<&Harmonic> {
        self.harmonics.iter().find(|h| h.k == k)
    }

    pub fn forbidden(&self) -> impl Iterator<Item = &Harmonic> {
        self.harmonics.iter().filter(|h| !h.allowed)
    }
}

/// Fourier coefficients of the parity-extended profile, `k = 0..=n_theta`.
fn circle_coefficients(g: &MomentProfile) -> Vec<(f64, f64)> {
    let n = g.values.len();
    let big_n = 2 * n;
    let sign = if g.order.is_multiple_of(2) { 1.0 } else { -1.0 };
    let extended: Vec<f64> = (0..big_n).map(|j| if j < n { g.values[j] } else { sign * g.values[j - n] }).collect();
    let twiddle: Vec<(f64, f64)> = (0..big_n).map(|r| (r as f64 * PI / n as f64).sin_cos()).collect();
    (0..=n)
        .map(|k| {
            let (mut a, mut b) = (0.0, 0.0);
            for (j, v) in extended.iter().enumerate() {
                let (s, c) = twiddle[(k * j) % big_n];
                a += v * c;
                b += v * s;
            }
            let scale = if k == 0 || k == n { 1.0 } else { 2.0 } / big_n as f64;
            (a * scale, if k == n { 0.0 } else { b * scale })
        })
        .collect()
}

fn is_allowed(k: usize, m: usize) -> bool {
    k <= m && (m - k).is_multiple_of(2)
}

pub fn harmonic_residual(g: &MomentProfile) -> HarmonicFit {
    let coeffs = circle_coefficients(g);
    let m = g.order;
    let harmonics: Vec<Harmonic> = coeffs
        .iter()
        .enumerate()
        .filter(|(k, _)| k % 2 == m % 2)
        .map(|(k, &(a, b))| Harmonic { k, cos: a, sin: b, allowed: is_allowed(k, m) })
        .collect();
    let residual = harmonics.iter().filter(|h| !h.allowed).map(|h| h.cos * h.cos + h.sin * h.sin).sum::<f64>().sqrt();
    HarmonicFit { order: m, harmonics, residual }
}

/// Pointwise residual of the moment ODE and its L2 norm over `[0, pi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdeResidual {
    pub order: usize,
    pub thetas: Vec<f64>,
    pub values: Vec<f64>,
    pub l2: f64,
    /// Set when more than 10% of the profile's energy sits in the upper
    /// half of the resolvable harmonics, above rounding level.
    pub noisy: bool,
}

/// Applies the moment operator spectrally:
/// odd `m = 2l + 1`: `prod_{i=0..l} (d^2/dtheta^2 + (2i+1)^2)`;
/// even `m = 2l`: `d/dtheta prod_{i=1..l} (d^2/dtheta^2 + (2i)^2)`.
pub fn ode_residual(g: &MomentProfile) -> Result<OdeResidual> {
    let m = g.order;
    if m < 1 {
        return Err(Error::MomentOrder { min: 1, got: m });
    }
    let coeffs = circle_coefficients(g);
    let n = g.values.len();
    let symbol = |k: usize| -> f64 {
        let kk = (k * k) as f64;
        if m % 2 == 1 {
            (0..=m / 2).map(|i| ((2 * i + 1) * (2 * i + 1)) as f64 - kk).product()
        } else {
            (1..=m / 2).map(|i| (4 * i * i) as f64 - kk).product()
        }
    };
    let values: Vec<f64> = g
        .thetas
        .iter()
        .map(|&theta| {
            coeffs
                .iter()
                .enumerate()
                .filter(|(k, _)| k % 2 == m % 2)
                .map(|(k, &(a, b))| {
                    let (s, c) = (k as f64 * theta).sin_cos();
                    let p = symbol(k);
                    if m % 2 == 1 {
                        p * (a * c + b * s)
                    } else {
                        p * k as f64 * (b * c - a * s)
                    }
                })
                .sum()
        })
        .collect();
    let l2 = (values.iter().map(|v| v * v).sum::<f64>() * PI / n as f64).sqrt();
    let energy = |range: std::ops::Range<usize>| -> f64 {
        range.filter(|k| k % 2 == m % 2).map(|k| coeffs[k].0.powi(2) + coeffs[k].1.powi(2)).sum()
    };
    let total = energy(0..n + 1);
    let high = energy(n / 2 + 1..n + 1);
    let scale = g.values.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let noisy = high > 0.1 * total && high.sqrt() > NOISE_FLOOR * scale;
    Ok(OdeResidual { order: m, thetas: g.thetas.clone(), values, l2, noisy })
}

/// `d/dt int w dX` produced at `t = 0` by a potential term `coupling q^3`:
/// `flux(theta) = coupling * 3 sin^3 theta * (g_1'' + g_1)`.
pub fn normalization_flux_cubic(w: &OpticalTomogramGrid, coupling: f64) -> Vec<f64> {
    let g1 = moment_profile(w, 1);
    let ode = ode_residual(&g1).expect("order 1 is valid");
    g1.thetas.iter().zip(&ode.values).map(|(t, r)| coupling * 3.0 * t.sin().powi(3) * r).collect()
}

/// Summary numbers of a flux profile over `[0, pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxSummary {
    /// `int_0^pi flux dtheta`
    pub integral: f64,
    /// `int_0^pi |flux| dtheta`
    pub abs_integral: f64,
    pub max_abs: f64,
}

pub fn summarize_flux(flux: &[f64]) -> FluxSummary {
    let h = PI / flux.len() as f64;
    FluxSummary {
        integral: flux.iter().sum::<f64>() * h,
        abs_integral: flux.iter().map(|v| v.abs()).sum::<f64>() * h,
        max_abs: flux.iter().map(|v| v.abs()).fold(0.0, f64::max),
    }
}

/// Default `(mu, nu)` panel for symplectic moment fits: radii
/// `{0.5, 1, 1.5, 2}` times twelve directions.
pub fn default_moment_panel() -> Vec<(f64, f64)> {
    let mut v = Vec::new();
    for &r in &[0.5, 1.0, 1.5, 2.0] {
        for k in 0..12 {
            let (s, c) = (k as f64 * PI / 6.0).sin_cos();
            v.push((r * c, r * s));
        }
    }
    v
}

/// Least-squares fit of `int X^m M dX` to `sum_k A_k mu^k nu^{m-k}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentPolynomialFit {
    pub order: usize,
    /// `A_k`, `k = 0..=m`.
    pub coefficients: Vec<f64>,
    /// `||misfit|| / max(||moments||, 1e-3 sqrt(N))`: relative, except that
    /// moments with RMS below `1e-3` are judged by their absolute RMS misfit.
    pub residual: f64,
}

pub fn symplectic_moment_residual(m_view: &SymplecticView, m: usize, panel: &[(f64, f64)]) -> Result<MomentPolynomialFit> {
    let data: Vec<f64> =
        panel.par_iter().map(|&(mu, nu)| m_view.moment(m, mu, nu)).collect::<Result<_>>()?;
    let rows = panel.len();
    let cols = m + 1;
    if rows < cols {
        return Err(Error::RankDeficient(format!("{rows} panel points cannot fit {cols} coefficients")));
    }
    let a = DMatrix::from_fn(rows, cols, |i, k| {
        let (mu, nu) = panel[i];
        mu.powi(k as i32) * nu.powi((m - k) as i32)
    });
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smin <= 1e-12 * smax {
        return Err(Error::RankDeficient(format!(
            "panel does not span degree-{m} homogeneous polynomials (singular value ratio {:.1e})",
            smin / smax
        )));
    }
    let b = DVector::from_vec(data.clone());
    let x = svd.solve(&b, 0.0).map_err(|e| Error::RankDeficient(e.to_string()))?;
    let misfit = (&a * &x - &b).norm();
    let scale = b.norm().max(MOMENT_FLOOR * (rows as f64).sqrt());
    Ok(MomentPolynomialFit { order: m, coefficients: x.iter().cloned().collect(), residual: misfit / scale })
}

/// Best Hermite-class approximation of an optical tomogram.
#[derive(Debug, Clone)]
pub struct HermiteProjection {
    pub rho: FockMatrix,
    /// Relative L2 distance between `w` and the class sum of `rho`.
    pub residual: f64,
    /// Largest least-squares condition number over the diagonals.
    pub condition: f64,
    /// Set when the condition number exceeds `1e10`; a smaller `n_max` or a
    /// wider X grid is needed.
    pub ill_conditioned: bool,
}

/// Extracts `rho_nm` with `w ~ sum rho_nm e^{i theta (m-n)} psi_n psi_m`.
///
/// A Fourier transform over the parity-extended theta circle isolates each
/// diagonal `k = m - n`; per `k` a linear least-squares fit in X against the
/// products `psi_n psi_{n+k}` gives `rho_{n,n+k}`. The `k` and `-k` fits are
/// averaged into a Hermitian matrix.
pub fn hermite_class_projection(w: &OpticalTomogramGrid, n_max: usize) -> Result<HermiteProjection> {
    let spec = w.spec;
    let n = spec.n_theta;
    if n_max >= n {
        return Err(Error::InvalidParameter(format!(
            "n_max = {n_max} needs more than {n} theta rows to resolve its harmonics"
        )));
    }
    let nx = spec.n_x;
    let big_n = 2 * n;
    // F_k(X_i) = (1/2n) sum_j w(X_i, phi_j) e^{-i k phi_j}, k = -n_max..=n_max
    let harmonics: Vec<Vec<Complex64>> = (0..=2 * n_max)
        .into_par_iter()
        .map(|idx| {
            let k = idx as f64 - n_max as f64;
            let phases: Vec<Complex64> =
                (0..big_n).map(|j| Complex64::from_polar(1.0 / big_n as f64, -k * j as f64 * PI / n as f64)).collect();
            (0..nx)
                .map(|i| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for j in 0..n {
                        acc += phases[j] * w.get(j, i) + phases[j + n] * w.get(j, nx - 1 - i);
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let psi = psi_table(n_max, &spec.xs());
    let dim = n_max + 1;
    let mut rho = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    let mut condition: f64 = 1.0;
    for k in 0..=n_max {
        let cols = dim - k;
        let a = DMatrix::from_fn(nx, cols, |i, c| psi[i][c] * psi[i][c + k]);
        let svd = a.svd(true, true);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        condition = condition.max(if smin > 0.0 { smax / smin } else { f64::INFINITY });
        let solve = |f: &[Complex64]| -> Result<(DVector<f64>, DVector<f64>)> {
            let re = DVector::from_iterator(nx, f.iter().map(|c| c.re));
            let im = DVector::from_iterator(nx, f.iter().map(|c| c.im));
            let sr = svd.solve(&re, 0.0).map_err(|e| Error::RankDeficient(e.to_string()))?;
            let si = svd.solve(&im, 0.0).map_err(|e| Error::RankDeficient(e.to_string()))?;
            Ok((sr, si))
        };
        let (pr, pi) = solve(&harmonics[n_max + k])?;
        let (mr, mi) = solve(&harmonics[n_max - k])?;
        for c in 0..cols {
            // +k gives rho_{c,c+k}; -k gives rho_{c+k,c} = conj(rho_{c,c+k})
            let v = Complex64::new(0.5 * (pr[c] + mr[c]), 0.5 * (pi[c] - mi[c]));
            if k == 0 {
                rho[(c, c)] = Complex64::new(v.re, 0.0);
            } else {
                rho[(c, c + k)] = v;
                rho[(c + k, c)] = v.conj();
            }
        }
    }
    let rho = FockMatrix::new(rho)?;
    let rebuilt = fock_optical_grid(&rho, spec)?;
    let norm = w.l2_norm();
    let residual = if norm > 0.0 { w.l2_distance(&rebuilt) / norm } else { 0.0 };
    Ok(HermiteProjection { rho, residual, condition, ill_conditioned: condition > 1e10 })
}

/// Hermite-class coefficients of a classical phase-space distribution,
/// `rho_nm = int W(x, p) e^{i p y} psi_n(x + y/2) psi_m(x - y/2) dx dy dp`.
///
/// `x` runs over the grid's q nodes and `y` over a symmetric lattice with
/// the same step reaching `2 q_max`.
pub fn classical_rho_extraction(w_cl: &WignerGrid, n_max: usize) -> Result<FockMatrix> {
    let spec = w_cl.spec;
    let h = spec.dq();
    let half = (2.0 * spec.q_max / h).ceil() as i64;
    let ys: Vec<f64> = (-half..=half).map(|l| l as f64 * h).collect();
    let edge = |k: usize, n: usize| if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
    let dim = n_max + 1;
    let partials: Vec<DMatrix<Complex64>> = (0..spec.n_q)
        .into_par_iter()
        .map(|i| {
            let x = spec.q(i);
            let row = w_cl.q_row(i);
            let mut acc = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
            for (l, &y) in ys.iter().enumerate() {
                // K(x, y) = int W(x, p) e^{i p y} dp
                let mut kernel = Complex64::new(0.0, 0.0);
                for (j, v) in row.iter().enumerate() {
                    kernel += Complex64::from_polar(edge(j, spec.n_p) * v, spec.p(j) * y);
                }
                kernel *= spec.dp() * edge(l, ys.len()) * h;
                if kernel.norm() == 0.0 {
                    continue;
                }
                let a = hermite_functions(n_max, x + 0.5 * y);
                let b = hermite_functions(n_max, x - 0.5 * y);
                for n in 0..dim {
                    for m in n..dim {
                        acc[(n, m)] += kernel * (a[n] * b[m]);
                    }
                }
            }
            acc * Complex64::new(edge(i, spec.n_q) * h, 0.0)
        })
        .collect();
    let mut rho = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for p in &partials {
        rho += p;
    }
    // kernel symmetry K(x, -y) = conj K(x, y) makes rho Hermitian
    for n in 0..dim {
        rho[(n, n)].im = 0.0;
        for m in n + 1..dim {
            rho[(m, n)] = rho[(n, m)].conj();
        }
    }
    FockMatrix::new(rho)
}

/// Tomogram of the class sum of `rho` on `spec`, the round trip partner of
/// [`hermite_class_projection`] and [`classical_rho_extraction`].
pub fn class_sum(rho: &FockMatrix, spec: GridSpec) -> Result<OpticalTomogramGrid> {
    fock_optical_grid(rho, spec)
}
