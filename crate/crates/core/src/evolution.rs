//! Reference dynamics for one degree of freedom with `H = p^2/2 + V(q)`.
//!
//! Phase-space integrators use fourth-order central differences and
//! classical RK4 with zero values outside the grid:
//!
//! - Liouville: `dW/dt = -p dW/dq + V'(q) dW/dp`
//! - Moyal: the Liouville terms plus `-(1/24) V'''(q) d^3W/dp^3`, exact for
//!   polynomial `V` of degree at most four.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::StateSpec;
use crate::conservation::{normalization_flux_cubic, summarize_flux, FluxSummary};
use crate::error::{Error, Result};
use crate::fock::{fock_optical_grid, momentum_operator, position_operator, FockMatrix};
use crate::grid::{GridSpec, OpticalTomogramGrid, PhaseGridSpec, WignerGrid};
use crate::io::{read_grid, LoadedGrid};
use crate::transforms::{radon_optical, SymplecticView};
use crate::validation::describe_grid;

/// `V(q) = sum_k c_k q^k`, `k <= 4`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PolynomialPotential {
    pub coefficients: [f64; 5],
}

impl PolynomialPotential {
    pub const MAX_DEGREE: usize = 4;

    pub fn new(coefficients: &[f64]) -> Result<Self> {
        if let Some(k) = coefficients.iter().rposition(|c| *c != 0.0) {
            if k > Self::MAX_DEGREE {
                return Err(Error::PotentialDegree(k));
            }
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::MalformedPotential("coefficients must be finite".into()));
        }
        let mut c = [0.0; 5];
        for (dst, src) in c.iter_mut().zip(coefficients) {
            *dst = *src;
        }
        Ok(Self { coefficients: c })
    }

    /// `q^2 / 2`.
    pub fn harmonic() -> Self {
        Self { coefficients: [0.0, 0.0, 0.5, 0.0, 0.0] }
    }

    pub fn c(&self, k: usize) -> f64 {
        self.coefficients.get(k).copied().unwrap_or(0.0)
    }

    pub fn degree(&self) -> usize {
        self.coefficients.iter().rposition(|c| *c != 0.0).unwrap_or(0)
    }

    pub fn value(&self, q: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, c| acc * q + c)
    }

    /// `V'(q)`
    pub fn first_derivative(&self, q: f64) -> f64 {
        let c = &self.coefficients;
        c[1] + q * (2.0 * c[2] + q * (3.0 * c[3] + q * 4.0 * c[4]))
    }

    /// `V'''(q)`
    pub fn third_derivative(&self, q: f64) -> f64 {
        6.0 * self.coefficients[3] + 24.0 * self.coefficients[4] * q
    }

    /// True when `V''' = 0` and the Moyal bracket reduces to the Poisson one.
    pub fn is_quadratic(&self) -> bool {
        self.coefficients[3] == 0.0 && self.coefficients[4] == 0.0
    }
}

impl FromStr for PolynomialPotential {
    type Err = Error;

    /// Parses comma- or space-separated `ck=value` terms, e.g. `"c2=0.5,c3=0.1"`.
    fn from_str(s: &str) -> Result<Self> {
        let mut c = [0.0; 5];
        let mut seen = 0usize;
        for term in s.split(|ch: char| ch == ',' || ch.is_whitespace()).filter(|t| !t.is_empty()) {
            let (key, value) =
                term.split_once('=').ok_or_else(|| Error::MalformedPotential(format!("expected ck=value, got {term:?}")))?;
            let k: usize = key
                .trim()
                .strip_prefix('c')
                .and_then(|d| d.parse().ok())
                .ok_or_else(|| Error::MalformedPotential(format!("unknown coefficient {key:?}")))?;
            let v: f64 =
                value.trim().parse().map_err(|_| Error::MalformedPotential(format!("bad value in {term:?}")))?;
            if !v.is_finite() {
                return Err(Error::MalformedPotential(format!("non-finite value in {term:?}")));
            }
            if k > Self::MAX_DEGREE {
                return Err(Error::PotentialDegree(k));
            }
            if seen & (1 << k) != 0 {
                return Err(Error::MalformedPotential(format!("c{k} given twice")));
            }
            seen |= 1 << k;
            c[k] = v;
        }
        if seen == 0 {
            return Err(Error::MalformedPotential("empty potential".into()));
        }
        Ok(Self { coefficients: c })
    }
}

impl std::fmt::Display for PolynomialPotential {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let terms: Vec<String> = self
            .coefficients
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(k, c)| format!("c{k}={c}"))
            .collect();
        if terms.is_empty() {
            write!(f, "c0=0")
        } else {
            write!(f, "{}", terms.join(","))
        }
    }
}

/// Time series recorded by the integrators.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvolutionTrace {
    pub times: Vec<f64>,
    /// Phase-space mass or density-matrix trace.
    pub mass: Vec<f64>,
    /// `q`, `p`, `q2`, `p2` expectation series, same length as `times`.
    pub observables: BTreeMap<String, Vec<f64>>,
    /// Set when the grid boundary or the Fock cutoff carried more than
    /// `1e-6` of the mass (phase space) or `1e-8` of `[H, rho]` (Fock).
    pub leakage_warning: bool,
    pub max_leakage: f64,
}

impl EvolutionTrace {
    fn push(&mut self, t: f64, mass: f64, obs: [f64; 4]) {
        self.times.push(t);
        self.mass.push(mass);
        for (key, v) in ["q", "p", "q2", "p2"].iter().zip(obs) {
            self.observables.entry((*key).to_string()).or_default().push(v);
        }
    }

    /// Largest `|mass(t) - mass(0)|`.
    pub fn mass_drift(&self) -> f64 {
        let m0 = self.mass.first().copied().unwrap_or(0.0);
        self.mass.iter().map(|m| (m - m0).abs()).fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let keys: Vec<&String> = self.observables.keys().collect();
        let mut out = String::from("t,mass");
        for k in &keys {
            out.push(',');
            out.push_str(k);
        }
        out.push('\n');
        for (i, (t, m)) in self.times.iter().zip(&self.mass).enumerate() {
            let _ = write!(out, "{t:e},{m:e}");
            for k in &keys {
                let _ = write!(out, ",{:e}", self.observables[*k][i]);
            }
            out.push('\n');
        }
        out
    }
}

/// Exact harmonic evolution `w(X, theta, t) = w0(X, theta + t)`, with
/// trigonometric interpolation on the parity-extended circle.
pub fn evolve_harmonic_tomogram(w0: &OpticalTomogramGrid, t: f64) -> OpticalTomogramGrid {
    w0.circle().shifted(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Bracket {
    Poisson,
    Moyal,
}

/// Largest stable step for [`evolve_liouville`]:
/// `0.4 min(dq / max|p|, dp / max|V'|)`.
pub fn liouville_step_limit(spec: &PhaseGridSpec, v: &PolynomialPotential) -> f64 {
    let force = max_over_q(spec, |q| v.first_derivative(q));
    0.4 * (spec.dq() / spec.p_max).min(if force > 0.0 { spec.dp() / force } else { f64::INFINITY })
}

/// Largest stable step for [`evolve_moyal`]: the Liouville limit, further
/// restricted so the combined fourth-order stencil spectrum stays inside
/// 90% of the RK4 stability interval on the imaginary axis.
pub fn moyal_step_limit(spec: &PhaseGridSpec, v: &PolynomialPotential) -> f64 {
    const RK4_IMAGINARY: f64 = 2.828;
    const SIGMA1: f64 = 1.3723;
    const SIGMA3: f64 = 4.6088;
    let force = max_over_q(spec, |q| v.first_derivative(q));
    let third = max_over_q(spec, |q| v.third_derivative(q));
    let radius = SIGMA1 * (spec.p_max / spec.dq() + force / spec.dp()) + SIGMA3 * third / (24.0 * spec.dp().powi(3));
    liouville_step_limit(spec, v).min(0.9 * RK4_IMAGINARY / radius)
}

fn max_over_q(spec: &PhaseGridSpec, f: impl Fn(f64) -> f64) -> f64 {
    (0..spec.n_q).map(|i| f(spec.q(i)).abs()).fold(0.0, f64::max)
}

/// Phase-space RHS with precomputed coefficient tables.
struct PhaseOperator {
    nq: usize,
    np: usize,
    ps: Vec<f64>,
    force: Vec<f64>,
    third: Vec<f64>,
    inv12dq: f64,
    inv12dp: f64,
    inv8dp3: f64,
    moyal: bool,
}

impl PhaseOperator {
    fn new(spec: &PhaseGridSpec, v: &PolynomialPotential, bracket: Bracket) -> Self {
        let qs: Vec<f64> = (0..spec.n_q).map(|i| spec.q(i)).collect();
        Self {
            nq: spec.n_q,
            np: spec.n_p,
            ps: (0..spec.n_p).map(|j| spec.p(j)).collect(),
            force: qs.iter().map(|&q| v.first_derivative(q)).collect(),
            third: qs.iter().map(|&q| v.third_derivative(q) / 24.0).collect(),
            inv12dq: 1.0 / (12.0 * spec.dq()),
            inv12dp: 1.0 / (12.0 * spec.dp()),
            inv8dp3: 1.0 / (8.0 * spec.dp().powi(3)),
            moyal: bracket == Bracket::Moyal && !v.is_quadratic(),
        }
    }

    fn apply(&self, w: &[f64], out: &mut [f64]) {
        let np = self.np;
        let nq = self.nq;
        out.par_chunks_mut(np).enumerate().for_each(|(i, row_out)| {
            let row = |k: isize| -> Option<&[f64]> {
                let r = i as isize + k;
                (r >= 0 && (r as usize) < nq).then(|| &w[r as usize * np..(r as usize + 1) * np])
            };
            // -p dW/dq
            row_out.fill(0.0);
            for (k, c) in [(-2isize, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0)] {
                if let Some(r) = row(k) {
                    let c = -c * self.inv12dq;
                    for ((o, x), p) in row_out.iter_mut().zip(r).zip(&self.ps) {
                        *o += c * p * x;
                    }
                }
            }
            let cur = &w[i * np..(i + 1) * np];
            let at = |j: isize| if j >= 0 && (j as usize) < np { cur[j as usize] } else { 0.0 };
            // V'(q) dW/dp
            let f = self.force[i] * self.inv12dp;
            if f != 0.0 {
                for (j, o) in row_out.iter_mut().enumerate() {
                    let j = j as isize;
                    *o += f * (at(j - 2) - 8.0 * at(j - 1) + 8.0 * at(j + 1) - at(j + 2));
                }
            }
            // -(V'''/24) d^3W/dp^3
            let g = self.third[i] * self.inv8dp3;
            if self.moyal && g != 0.0 {
                for (j, o) in row_out.iter_mut().enumerate() {
                    let j = j as isize;
                    let d3 = at(j - 3) - 8.0 * at(j - 2) + 13.0 * at(j - 1) - 13.0 * at(j + 1) + 8.0 * at(j + 2)
                        - at(j + 3);
                    *o -= g * d3;
                }
            }
        });
    }
}

/// Mass within three cells of the phase-grid boundary.
fn boundary_mass(w: &[f64], nq: usize, np: usize, cell: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..nq {
        let row = &w[i * np..(i + 1) * np];
        if i < 3 || i + 3 >= nq {
            acc += row.iter().map(|v| v.abs()).sum::<f64>();
        } else {
            acc += row[..3].iter().chain(&row[np - 3..]).map(|v| v.abs()).sum::<f64>();
        }
    }
    acc * cell
}

/// Trapezoid mass and `q`, `p`, `q^2`, `p^2` moments in one pass.
fn phase_observables(spec: &PhaseGridSpec, w: &[f64]) -> (f64, [f64; 4]) {
    let edge = |k: usize, n: usize| if k == 0 || k + 1 == n { 0.5 } else { 1.0 };
    let mut sums = [0.0; 5];
    for i in 0..spec.n_q {
        let q = spec.q(i);
        let (mut m, mut mp, mut mp2) = (0.0, 0.0, 0.0);
        for (j, v) in w[i * spec.n_p..(i + 1) * spec.n_p].iter().enumerate() {
            let p = spec.p(j);
            let v = v * edge(j, spec.n_p);
            m += v;
            mp += v * p;
            mp2 += v * p * p;
        }
        let e = edge(i, spec.n_q);
        sums[0] += e * m;
        sums[1] += e * q * m;
        sums[2] += e * mp;
        sums[3] += e * q * q * m;
        sums[4] += e * mp2;
    }
    let cell = spec.dq() * spec.dp();
    (sums[0] * cell, [sums[1] * cell, sums[2] * cell, sums[3] * cell, sums[4] * cell])
}

/// Number of RK4 steps and the uniform step that reaches `t_end`.
fn schedule(t_end: f64, dt: f64) -> Result<(usize, f64)> {
    if !t_end.is_finite() || t_end < 0.0 {
        return Err(Error::InvalidParameter(format!("t_end must be a non-negative real, got {t_end}")));
    }
    if dt.is_nan() || dt <= 0.0 {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    let steps = (t_end / dt - 1e-9).ceil().max(0.0) as usize;
    Ok((steps, if steps == 0 { 0.0 } else { t_end / steps as f64 }))
}

/// Checkpoints recorded by the Fock integrator and the drift experiment.
const FOCK_CHECKPOINTS: usize = 20;

fn integrate_phase(
    w0: &WignerGrid,
    v: &PolynomialPotential,
    t_end: f64,
    dt: Option<f64>,
    bracket: Bracket,
) -> Result<(WignerGrid, EvolutionTrace)> {
    let spec = w0.spec;
    let limit = match bracket {
        Bracket::Poisson => liouville_step_limit(&spec, v),
        Bracket::Moyal => moyal_step_limit(&spec, v),
    };
    let dt = dt.unwrap_or(limit);
    if dt > limit * (1.0 + 1e-12) {
        return Err(Error::CflViolation { dt, limit });
    }
    let (steps, h) = schedule(t_end, dt)?;
    let op = PhaseOperator::new(&spec, v, bracket);
    let n = spec.n_q * spec.n_p;
    let cell = spec.dq() * spec.dp();
    let mut w = w0.values().to_vec();
    let mut k = vec![0.0; n];
    let mut acc = vec![0.0; n];
    let mut stage = vec![0.0; n];
    let mut trace = EvolutionTrace::default();
    let (m0, obs0) = phase_observables(&spec, &w);
    trace.push(0.0, m0, obs0);
    let mut max_boundary = boundary_mass(&w, spec.n_q, spec.n_p, cell);
    for step in 1..=steps {
        op.apply(&w, &mut k);
        for ((a, s), (x, d)) in acc.iter_mut().zip(stage.iter_mut()).zip(w.iter().zip(&k)) {
            *a = *d;
            *s = x + 0.5 * h * d;
        }
        op.apply(&stage, &mut k);
        for ((a, s), (x, d)) in acc.iter_mut().zip(stage.iter_mut()).zip(w.iter().zip(&k)) {
            *a += 2.0 * d;
            *s = x + 0.5 * h * d;
        }
        op.apply(&stage, &mut k);
        for ((a, s), (x, d)) in acc.iter_mut().zip(stage.iter_mut()).zip(w.iter().zip(&k)) {
            *a += 2.0 * d;
            *s = x + h * d;
        }
        op.apply(&stage, &mut k);
        for ((x, a), d) in w.iter_mut().zip(&acc).zip(&k) {
            *x += h / 6.0 * (a + d);
        }
        let (mass, obs) = phase_observables(&spec, &w);
        trace.push(step as f64 * h, mass, obs);
        max_boundary = max_boundary.max(boundary_mass(&w, spec.n_q, spec.n_p, cell));
    }
    trace.max_leakage = max_boundary / m0.abs().max(1e-300);
    trace.leakage_warning = trace.max_leakage > 1e-6;
    Ok((WignerGrid::new(spec, w)?, trace))
}

/// Liouville flow on a phase grid. `dt = None` uses
/// [`liouville_step_limit`].
pub fn evolve_liouville(
    w0: &WignerGrid,
    v: &PolynomialPotential,
    t_end: f64,
    dt: Option<f64>,
) -> Result<(WignerGrid, EvolutionTrace)> {
    integrate_phase(w0, v, t_end, dt, Bracket::Poisson)
}

/// Moyal flow on a phase grid. For `c3 = c4 = 0` the step is bit-for-bit the
/// Liouville step. `dt = None` uses [`moyal_step_limit`].
pub fn evolve_moyal(
    w0: &WignerGrid,
    v: &PolynomialPotential,
    t_end: f64,
    dt: Option<f64>,
) -> Result<(WignerGrid, EvolutionTrace)> {
    integrate_phase(w0, v, t_end, dt, Bracket::Moyal)
}

/// `H = p^2/2 + V(q)` on `dim` levels, built on `dim + 4` levels and
/// truncated so that every matrix element below the cutoff is exact.
pub fn hamiltonian(v: &PolynomialPotential, dim: usize) -> DMatrix<Complex64> {
    full_hamiltonian(v, dim + 4).view((0, 0), (dim, dim)).into_owned()
}

fn full_hamiltonian(v: &PolynomialPotential, big: usize) -> DMatrix<Complex64> {
    let q = position_operator(big);
    let p = momentum_operator(big);
    let mut h = &p * &p * Complex64::new(0.5, 0.0);
    let mut power = DMatrix::<Complex64>::identity(big, big);
    for k in 0..=4 {
        if k > 0 {
            power = &power * &q;
        }
        let c = v.c(k);
        if c != 0.0 {
            h += &power * Complex64::new(c, 0.0);
        }
    }
    h
}

/// Default step for [`evolve_fock`]: `min(0.01, 0.5 / spread(H))`.
pub fn fock_step(v: &PolynomialPotential, dim: usize) -> f64 {
    let eig = hamiltonian(v, dim).symmetric_eigenvalues();
    let spread = eig.max() - eig.min();
    if spread > 0.0 { (0.5 / spread).min(0.01) } else { 0.01 }
}

/// RK4 on `d rho/dt = -i [H, rho]` at the cutoff of `rho0`.
///
/// The leakage monitor is `||H_out rho||`, the part of `[H, rho]` that the
/// cutoff discards.
pub fn evolve_fock(
    rho0: &FockMatrix,
    v: &PolynomialPotential,
    t_end: f64,
    dt: Option<f64>,
) -> Result<(FockMatrix, EvolutionTrace)> {
    evolve_fock_checkpoints(rho0, v, t_end, dt, FOCK_CHECKPOINTS, |_, _| Ok(()))
}

/// [`evolve_fock`] with a callback at `checkpoints` uniform times (plus
/// `t = 0`).
pub fn evolve_fock_checkpoints<F>(
    rho0: &FockMatrix,
    v: &PolynomialPotential,
    t_end: f64,
    dt: Option<f64>,
    checkpoints: usize,
    mut visit: F,
) -> Result<(FockMatrix, EvolutionTrace)>
where
    F: FnMut(f64, &FockMatrix) -> Result<()>,
{
    let dim = rho0.dim();
    let big = full_hamiltonian(v, dim + 4);
    let h = big.view((0, 0), (dim, dim)).into_owned();
    let outside = big.view((dim, 0), (4, dim)).into_owned();
    let dt = dt.unwrap_or_else(|| fock_step(v, dim));
    let (steps, step) = schedule(t_end, dt)?;
    let checkpoints = checkpoints.max(1);
    // checkpoint c lands on step round(c * steps / checkpoints)
    let marks: Vec<usize> = (0..=checkpoints).map(|c| (c * steps + checkpoints / 2) / checkpoints).collect();
    let q = position_operator(dim);
    let p = momentum_operator(dim);
    let minus_i = Complex64::new(0.0, -1.0);
    let rhs = |r: &DMatrix<Complex64>| -> DMatrix<Complex64> { (&h * r - r * &h) * minus_i };
    let mut rho = rho0.entries().clone();
    let mut trace = EvolutionTrace::default();
    let mut record = |t: f64, r: &DMatrix<Complex64>, trace: &mut EvolutionTrace| -> Result<()> {
        let fm = FockMatrix::new(r.clone())?;
        let obs = [
            fm.expectation(&q).re,
            fm.expectation(&p).re,
            fm.expectation(&(&q * &q)).re,
            fm.expectation(&(&p * &p)).re,
        ];
        trace.push(t, fm.trace(), obs);
        trace.max_leakage = trace.max_leakage.max((&outside * r).norm());
        visit(t, &fm)
    };
    record(0.0, &rho, &mut trace)?;
    let mut next = 1;
    let half = Complex64::new(0.5 * step, 0.0);
    let full = Complex64::new(step, 0.0);
    let sixth = Complex64::new(step / 6.0, 0.0);
    for s in 1..=steps {
        let k1 = rhs(&rho);
        let k2 = rhs(&(&rho + &k1 * half));
        let k3 = rhs(&(&rho + &k2 * half));
        let k4 = rhs(&(&rho + &k3 * full));
        rho += (k1 + (k2 + k3) * Complex64::new(2.0, 0.0) + k4) * sixth;
        // restore exact Hermiticity lost to rounding
        rho = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
        while next < marks.len() && marks[next] == s {
            record(s as f64 * step, &rho, &mut trace)?;
            next += 1;
        }
    }
    while next < marks.len() {
        record(t_end, &rho, &mut trace)?;
        next += 1;
    }
    trace.leakage_warning = trace.max_leakage > 1e-8;
    Ok((FockMatrix::new(rho)?, trace))
}

/// Cutoff used when a catalog state is evolved in the Fock basis.
pub const DRIFT_N_MAX: usize = 40;

/// Outcome of [`drift_experiment`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DriftReport {
    pub state: String,
    pub potential: String,
    pub t_end: f64,
    /// `"fock"` when the state was evolved in the Fock basis, otherwise
    /// `"flux"`.
    pub mode: String,
    /// Checkpoint times and `max_theta |int w dX - 1|` at each.
    pub checkpoint_times: Vec<f64>,
    /// X grid of the checkpoint tomograms, wide enough for every Hermite
    /// function below the cutoff.
    pub normalization_grid: String,
    pub normalization_defect: Vec<f64>,
    pub trace: Option<EvolutionTrace>,
    /// Instantaneous cubic flux per theta row, when `c3 != 0`.
    pub flux_thetas: Vec<f64>,
    pub flux: Vec<f64>,
    pub flux_summary: Option<FluxSummary>,
    pub notes: Vec<String>,
}

impl DriftReport {
    pub fn max_normalization_defect(&self) -> f64 {
        self.normalization_defect.iter().copied().fold(0.0, f64::max)
    }
}

/// `grid` widened, at the same X step, past the turning point of
/// `psi_{n_max}` by five units.
fn covering_grid(grid: GridSpec, n_max: usize) -> GridSpec {
    let reach = ((2 * n_max + 1) as f64).sqrt() + 5.0;
    if grid.x_max >= reach {
        return grid;
    }
    let n_x = (2.0 * reach / grid.dx()).ceil() as usize + 1;
    GridSpec { x_max: reach, n_x, n_theta: grid.n_theta }
}

/// Contrasts Hermite-class states, evolved in the Fock basis with 20
/// checkpoints of `int w dX`, against the instantaneous cubic flux of
/// arbitrary tomograms.
pub fn drift_experiment(spec: &StateSpec, v: &PolynomialPotential, t_end: f64, grid: GridSpec) -> Result<DriftReport> {
    let (label, view, rho) = match spec {
        StateSpec::Catalog(state) => {
            (state.name(), SymplecticView::from_state(*state), state.fock_matrix(DRIFT_N_MAX))
        }
        StateSpec::GridFile(path) => {
            let view = match read_grid(path)? {
                LoadedGrid::Optical(w) => SymplecticView::from_optical(w),
                LoadedGrid::Wigner(w) => SymplecticView::from_optical(radon_optical(&w, grid)?),
            };
            (path.display().to_string(), view, None)
        }
    };
    let mut report = DriftReport {
        state: label,
        potential: v.to_string(),
        t_end,
        mode: if rho.is_some() { "fock" } else { "flux" }.into(),
        checkpoint_times: Vec::new(),
        normalization_grid: String::new(),
        normalization_defect: Vec::new(),
        trace: None,
        flux_thetas: Vec::new(),
        flux: Vec::new(),
        flux_summary: None,
        notes: Vec::new(),
    };
    if let Some(rho) = rho {
        let norm_grid = covering_grid(grid, DRIFT_N_MAX);
        report.normalization_grid = describe_grid(&norm_grid);
        let mut times = Vec::new();
        let mut defects = Vec::new();
        let (_, trace) = evolve_fock_checkpoints(&rho, v, t_end, None, FOCK_CHECKPOINTS, |t, r| {
            let w = fock_optical_grid(r, norm_grid)?;
            times.push(t);
            defects.push(w.normalization_defect());
            Ok(())
        })?;
        if trace.leakage_warning {
            report.notes.push(format!("Fock cutoff {DRIFT_N_MAX} leaks {:.1e} of [H, rho]", trace.max_leakage));
        }
        report.checkpoint_times = times;
        report.normalization_defect = defects;
        report.trace = Some(trace);
    }
    let c3 = v.c(3);
    if c3 != 0.0 {
        let w = view.optical_grid(grid)?;
        report.flux_thetas = grid.thetas();
        report.flux = normalization_flux_cubic(&w, c3);
        report.flux_summary = Some(summarize_flux(&report.flux));
    } else if report.mode == "flux" {
        report.notes.push("no implemented flux functional applies".into());
    }
    Ok(report)
}
