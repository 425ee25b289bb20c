//! Coefficient matrices in the Fock (Hermite-function) basis and the
//! tomograms, Wigner functions and quadrature moments they generate.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, OpticalTomogramGrid};
use crate::hermite::{hermite_functions, hermite_functions_into, laguerre};

const HERMITIAN_TOL: f64 = 1e-12;

/// Hermitian matrix `rho_nm`, `0 <= n, m <= n_max`.
///
/// Either a quantum density matrix or the coefficient set of a classical
/// distribution. Positivity is deliberately not required: several
/// non-physical functions of interest have Hermitian but indefinite
/// coefficient matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct FockMatrix {
    entries: DMatrix<Complex64>,
}

impl FockMatrix {
    /// Validates Hermiticity to `1e-12` relative to the largest entry.
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.nrows() == 0 {
            return Err(Error::InvalidParameter(format!(
                "Fock matrix must be square and non-empty, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let scale = entries.iter().map(|c| c.norm()).fold(1.0, f64::max);
        let dev = hermiticity_defect(&entries);
        if dev > HERMITIAN_TOL * scale {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self { entries })
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len().max(1);
        let mut m = DMatrix::zeros(n, n);
        for (k, &d) in diag.iter().enumerate() {
            m[(k, k)] = Complex64::new(d, 0.0);
        }
        Self { entries: m }
    }

    /// `|psi><psi|` for the (unnormalized) amplitude vector `psi`.
    pub fn pure(psi: &[Complex64]) -> Self {
        let n = psi.len();
        let m = DMatrix::from_fn(n, n, |i, j| psi[i] * psi[j].conj());
        Self { entries: m }
    }

    /// Number state `|n><n|` in a basis cut at `n_max >= n`.
    pub fn number(n: usize, n_max: usize) -> Self {
        let mut diag = vec![0.0; n_max.max(n) + 1];
        diag[n] = 1.0;
        Self::from_diagonal(&diag)
    }

    /// Coherent state centred at `(q0, p0)`, truncated and renormalized.
    pub fn coherent(q0: f64, p0: f64, n_max: usize) -> Self {
        let alpha = Complex64::new(q0, p0) / std::f64::consts::SQRT_2;
        let mut psi = Vec::with_capacity(n_max + 1);
        let mut c = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
        psi.push(c);
        for n in 1..=n_max {
            c = c * alpha / (n as f64).sqrt();
            psi.push(c);
        }
        normalize(&mut psi);
        Self::pure(&psi)
    }

    /// Squeezed vacuum with `Var q = e^{-2r}/2`, `Var p = e^{2r}/2`,
    /// truncated and renormalized.
    pub fn squeezed_vacuum(r: f64, n_max: usize) -> Self {
        let t = -r.tanh();
        let mut psi = vec![Complex64::new(0.0, 0.0); n_max + 1];
        // c_{2k} = sech^{1/2}(r) t^k sqrt((2k)!) / (2^k k!)
        let mut c = 1.0 / r.cosh().sqrt();
        for k in 0..=n_max / 2 {
            if k > 0 {
                let kf = k as f64;
                c *= t * ((2.0 * kf - 1.0) * (2.0 * kf)).sqrt() / (2.0 * kf);
            }
            psi[2 * k] = Complex64::new(c, 0.0);
        }
        normalize(&mut psi);
        Self::pure(&psi)
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<Complex64> {
        self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn n_max(&self) -> usize {
        self.dim() - 1
    }

    pub fn get(&self, n: usize, m: usize) -> Complex64 {
        self.entries[(n, m)]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|k| self.entries[(k, k)].re).sum()
    }

    /// Same matrix embedded in (or cut to) a basis of size `n_max + 1`.
    pub fn resized(&self, n_max: usize) -> Self {
        let d = n_max + 1;
        let m = DMatrix::from_fn(d, d, |i, j| {
            if i < self.dim() && j < self.dim() {
                self.entries[(i, j)]
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self { entries: m }
    }

    /// Multiplies every coefficient by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self { entries: self.entries.map(|z| z * c) }
    }

    /// `Tr(rho A)`.
    pub fn expectation(&self, op: &DMatrix<Complex64>) -> Complex64 {
        let d = self.dim().min(op.nrows());
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                acc += self.entries[(i, j)] * op[(j, i)];
            }
        }
        acc
    }

    /// Quadrature moments from ladder-operator matrices.
    pub fn quadrature_moments(&self) -> QuadratureMoments {
        // two extra levels so q^2, p^2, qp are exact on the populated block
        let d = self.dim() + 2;
        let q = position_operator(d);
        let p = momentum_operator(d);
        let qp = &q * &p;
        let sym = &qp + qp.adjoint();
        QuadratureMoments {
            q: self.expectation(&q).re,
            p: self.expectation(&p).re,
            q2: self.expectation(&(&q * &q)).re,
            p2: self.expectation(&(&p * &p)).re,
            qp_sym: self.expectation(&sym).re,
        }
    }

    /// Smallest eigenvalue of the coefficient matrix.
    pub fn min_eigenvalue(&self) -> f64 {
        self.entries.clone().symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

fn normalize(psi: &mut [Complex64]) {
    let n: f64 = psi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    for c in psi.iter_mut() {
        *c /= n;
    }
}

pub(crate) fn hermiticity_defect(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// `<q>, <p>, <q^2>, <p^2>, <qp + pq>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureMoments {
    pub q: f64,
    pub p: f64,
    pub q2: f64,
    pub p2: f64,
    pub qp_sym: f64,
}

/// Annihilation operator `a` on a basis of dimension `dim`.
pub fn annihilation_operator(dim: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(dim, dim, |i, j| {
        if j == i + 1 {
            Complex64::new((j as f64).sqrt(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `q = (a + a^dagger) / sqrt 2`.
pub fn position_operator(dim: usize) -> DMatrix<Complex64> {
    let a = annihilation_operator(dim);
    (&a + a.adjoint()) / Complex64::new(std::f64::consts::SQRT_2, 0.0)
}

/// `p = (a - a^dagger) / (i sqrt 2)`.
pub fn momentum_operator(dim: usize) -> DMatrix<Complex64> {
    let a = annihilation_operator(dim);
    (&a - a.adjoint()) / Complex64::new(0.0, std::f64::consts::SQRT_2)
}

/// Random density matrix `G G^dagger / Tr(G G^dagger)`, with the entries of
/// `G` uniform in the complex square `[-1, 1]^2`.
pub fn random_density_matrix<R: Rng + ?Sized>(n_max: usize, rng: &mut R) -> FockMatrix {
    let d = n_max + 1;
    let g = DMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let rho = &g * g.adjoint();
    let tr: f64 = (0..d).map(|k| rho[(k, k)].re).sum();
    let mut rho = rho / Complex64::new(tr, 0.0);
    symmetrize(&mut rho);
    FockMatrix { entries: rho }
}

/// Random Hermitian unit-trace matrix with no positivity constraint.
pub fn random_hermitian_unit_trace<R: Rng + ?Sized>(n_max: usize, rng: &mut R) -> FockMatrix {
    let d = n_max + 1;
    let g = DMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let mut h = (&g + g.adjoint()) * Complex64::new(0.5, 0.0);
    let tr: f64 = (0..d).map(|k| h[(k, k)].re).sum();
    // shift the diagonal so the trace is exactly one
    let shift = (1.0 - tr) / d as f64;
    for k in 0..d {
        h[(k, k)] += Complex64::new(shift, 0.0);
    }
    symmetrize(&mut h);
    FockMatrix { entries: h }
}

fn symmetrize(m: &mut DMatrix<Complex64>) {
    let n = m.nrows();
    for i in 0..n {
        m[(i, i)].im = 0.0;
        for j in i + 1..n {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
}

/// `sum_{nm} rho_nm e^{i theta (m - n)} psi_n(X) psi_m(X)` with precomputed
/// `psi`.
fn optical_from_psi(rho: &FockMatrix, psi: &[f64], theta: f64) -> f64 {
    let d = rho.dim();
    let phase = Complex64::from_polar(1.0, theta);
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 0..d {
        // e^{i theta (m - n)} for m >= n, built incrementally
        let mut ph = Complex64::new(1.0, 0.0);
        acc += rho.entries[(n, n)] * psi[n] * psi[n];
        for m in n + 1..d {
            ph *= phase;
            // pair (n, m) and (m, n) are conjugates of each other
            acc += 2.0 * (rho.entries[(n, m)] * ph).re * psi[n] * psi[m];
        }
    }
    debug_assert!(acc.im.abs() < 1e-12);
    acc.re
}

/// Optical tomogram of a Fock-basis matrix:
/// `w(X, theta) = sum rho_nm e^{i theta (m-n)} psi_n(X) psi_m(X)`.
pub fn fock_optical_eval(rho: &FockMatrix, x: f64, theta: f64) -> f64 {
    let psi = hermite_functions(rho.n_max(), x);
    optical_from_psi(rho, &psi, theta)
}

/// Symplectic tomogram of a Fock-basis matrix,
/// `M = r^{-1} sum rho_nm ((mu + i nu)/r)^m ((mu - i nu)/r)^n psi_n(X/r) psi_m(X/r)`
/// with `r = sqrt(mu^2 + nu^2)`.
pub fn fock_symplectic_eval(rho: &FockMatrix, x: f64, mu: f64, nu: f64) -> Result<f64> {
    let r = mu.hypot(nu);
    if r == 0.0 {
        return Err(Error::OriginPoint { mu, nu });
    }
    let psi = hermite_functions(rho.n_max(), x / r);
    let up = Complex64::new(mu, nu) / r;
    let down = up.conj();
    let d = rho.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut down_n = Complex64::new(1.0, 0.0);
    for n in 0..d {
        let mut up_m = Complex64::new(1.0, 0.0);
        for m in 0..d {
            acc += rho.entries[(n, m)] * up_m * down_n * psi[n] * psi[m];
            up_m *= up;
        }
        down_n *= down;
    }
    Ok(acc.re / r)
}

/// Wigner function of a Fock-basis matrix.
///
/// For `m >= n` the Wigner function of `|m><n|` is
/// `(-1)^n / pi * sqrt(n!/m!) (sqrt2 (q - i p))^{m-n} e^{-r^2} L_n^{(m-n)}(2 r^2)`;
/// `|n><m|` contributes the complex conjugate.
pub fn fock_wigner_eval(rho: &FockMatrix, q: f64, p: f64) -> f64 {
    let r2 = q * q + p * p;
    let gauss = (-r2).exp() / PI;
    let z = Complex64::new(q, -p) * std::f64::consts::SQRT_2;
    let d = rho.dim();
    let mut acc = 0.0;
    for n in 0..d {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let mut zk = Complex64::new(1.0, 0.0);
        let mut ratio = 1.0; // sqrt(n!/m!)
        for m in n..d {
            if m > n {
                zk *= z;
                ratio /= (m as f64).sqrt();
            }
            let basis = zk * (sign * ratio * gauss * laguerre(n, (m - n) as f64, 2.0 * r2));
            let c = rho.entries[(m, n)];
            if m == n {
                acc += c.re * basis.re;
            } else {
                acc += 2.0 * (c * basis).re;
            }
        }
    }
    acc
}

/// Samples [`fock_optical_eval`] on a tomogram grid.
pub fn fock_optical_grid(rho: &FockMatrix, spec: GridSpec) -> Result<OpticalTomogramGrid> {
    spec.validate()?;
    let n_max = rho.n_max();
    let psis: Vec<Vec<f64>> = spec.xs().iter().map(|&x| hermite_functions(n_max, x)).collect();
    let mut values = Vec::with_capacity(spec.n_x * spec.n_theta);
    for j in 0..spec.n_theta {
        let theta = spec.theta(j);
        values.extend(psis.iter().map(|psi| optical_from_psi(rho, psi, theta)));
    }
    OpticalTomogramGrid::new(spec, values)
}

/// Products `psi_n(x) psi_m(x)` evaluated into a buffer; shared by the
/// projection routines.
pub(crate) fn psi_table(n_max: usize, xs: &[f64]) -> Vec<Vec<f64>> {
    let mut buf = Vec::with_capacity(n_max + 1);
    xs.iter()
        .map(|&x| {
            hermite_functions_into(x, n_max, &mut buf);
            buf.clone()
        })
        .collect()
}
