//! Tests of tomogram-hood: structural conditions, the entropic bound,
//! KLM and Bochner positivity, pure-state overlaps and the Radon fixed
//! point.
//!
//! Positivity checks sample finitely many point sets, so a pass means "no
//! violation found", never a proof.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_xorshift::XorShiftRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{polar_branch, State};
use crate::error::{Error, Result};
use crate::fock::{fock_wigner_eval, FockMatrix};
use crate::grid::{trapezoid, GridSpec, OpticalTomogramGrid, PhaseGridSpec, WignerGrid};
use crate::transforms::{
    characteristic_grid, inverse_radon_optical, radon_line_integral, wigner_from_characteristic, SymplecticView,
};

/// How a metric is compared with its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// pass iff `metric <= threshold`
    AtMost,
    /// pass iff `metric >= threshold`
    AtLeast,
}

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub metric: f64,
    pub threshold: f64,
    pub direction: Direction,
    pub pass: bool,
    #[serde(default)]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub grid: String,
    #[serde(default)]
    pub details: BTreeMap<String, f64>,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn new(check: impl Into<String>, metric: f64, threshold: f64, direction: Direction) -> Self {
        let pass = match direction {
            Direction::AtMost => metric <= threshold,
            Direction::AtLeast => metric >= threshold,
        };
        Self {
            check: check.into(),
            metric,
            threshold,
            direction,
            pass,
            seeds: Vec::new(),
            grid: String::new(),
            details: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn with_grid(mut self, grid: impl Into<String>) -> Self {
        self.grid = grid.into();
        self
    }

    pub fn detail(mut self, key: impl Into<String>, value: f64) -> Self {
        self.details.insert(key.into(), value);
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    /// Forces a failure, e.g. when a secondary condition is violated.
    pub fn fail(mut self) -> Self {
        self.pass = false;
        self
    }
}

pub fn describe_grid(spec: &GridSpec) -> String {
    format!("optical X=[-{0},{0}] n_x={1} n_theta={2}", spec.x_max, spec.n_x, spec.n_theta)
}

pub fn describe_phase_grid(spec: &PhaseGridSpec) -> String {
    format!("phase q=[-{},{}] p=[-{},{}] {}x{}", spec.q_max, spec.q_max, spec.p_max, spec.p_max, spec.n_q, spec.n_p)
}

/// Sampling points `(X, mu, nu)`: `X` in `{-1.5, -1, ..., 1.5}`, radius
/// `r` in `{0.5, 1, 2}`, polar angle `k pi / 4`.
pub fn standard_panel() -> Vec<(f64, f64, f64)> {
    let mut panel = Vec::new();
    for &r in &[0.5, 1.0, 2.0] {
        for k in 0..8 {
            let (s, c) = (k as f64 * PI / 4.0).sin_cos();
            let (mu, nu) = (clean(r * c), clean(r * s));
            for i in 0..7 {
                panel.push((-1.5 + 0.5 * i as f64, mu, nu));
            }
        }
    }
    panel
}

fn clean(v: f64) -> f64 {
    if v.abs() < 1e-12 {
        0.0
    } else {
        v
    }
}

/// Representation a structural check is applied to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TomogramKind {
    Optical,
    Symplectic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructuralTolerances {
    pub normalization: f64,
    pub negativity: f64,
    pub parity: f64,
    pub homogeneity: f64,
}

impl Default for StructuralTolerances {
    fn default() -> Self {
        Self { normalization: 1e-6, negativity: 1e-10, parity: 1e-8, homogeneity: 1e-10 }
    }
}

const HOMOGENEITY_SCALES: [f64; 4] = [-2.0, -0.5, 0.5, 3.0];

/// Normalization, non-negativity, parity and (symplectic only) homogeneity.
pub fn check_structural(
    source: &SymplecticView,
    kind: TomogramKind,
    spec: GridSpec,
    tol: StructuralTolerances,
) -> Result<Vec<CheckReport>> {
    let grid = source.optical_grid(spec)?;
    let label = describe_grid(&spec);
    let panel = standard_panel();

    let mut norm_defect = grid.normalization_defect();
    let mut min_value = grid.values().iter().cloned().fold(f64::INFINITY, f64::min);
    let mut parity: f64 = 0.0;
    for j in 0..spec.n_theta {
        let theta = spec.theta(j);
        for i in (0..spec.n_x).step_by(4) {
            let x = spec.x(i);
            let d = (source.optical(-x, theta + PI)? - source.optical(x, theta)?).abs();
            parity = parity.max(d);
        }
    }

    let mut reports = Vec::new();
    let mut homogeneity: f64 = 0.0;
    if kind == TomogramKind::Symplectic {
        let mut directions: Vec<(f64, f64)> = panel.iter().map(|&(_, mu, nu)| (mu, nu)).collect();
        directions.dedup();
        for &(mu, nu) in &directions {
            norm_defect = norm_defect.max((source.moment(0, mu, nu)? - 1.0).abs());
        }
        for &(x, mu, nu) in &panel {
            let m = source.eval(x, mu, nu)?;
            min_value = min_value.min(m);
            parity = parity.max((source.eval(-x, -mu, -nu)? - m).abs());
            for &lambda in &HOMOGENEITY_SCALES {
                let scaled = lambda.abs() * source.eval(lambda * x, lambda * mu, lambda * nu)?;
                homogeneity = homogeneity.max((scaled - m).abs());
            }
        }
    }

    reports.push(
        CheckReport::new("structural.normalization", norm_defect, tol.normalization, Direction::AtMost)
            .with_grid(label.clone()),
    );
    reports.push(
        CheckReport::new("structural.nonnegativity", min_value, -tol.negativity, Direction::AtLeast)
            .with_grid(label.clone()),
    );
    reports.push(CheckReport::new("structural.parity", parity, tol.parity, Direction::AtMost).with_grid(label.clone()));
    if kind == TomogramKind::Symplectic {
        reports.push(
            CheckReport::new("structural.homogeneity", homogeneity, tol.homogeneity, Direction::AtMost)
                .with_grid(label)
                .note("lambda in {-2, -0.5, 0.5, 3} over the standard (X, mu, nu) panel"),
        );
    }
    Ok(reports)
}

/// `-int w ln w dX` for one row, with `0 ln 0 = 0`.
pub fn row_entropy(row: &[f64], dx: f64, theta: f64) -> Result<f64> {
    let mut vals = Vec::with_capacity(row.len());
    for &v in row {
        if v < -1e-12 {
            return Err(Error::NegativeDensity { theta, value: v });
        }
        vals.push(if v > 0.0 { -v * v.ln() } else { 0.0 });
    }
    Ok(trapezoid(&vals, dx))
}

/// Tomographic Shannon entropy `S(theta) = -int w ln w dX`.
pub fn shannon_entropy(w: &OpticalTomogramGrid, theta: f64) -> Result<f64> {
    let spec = w.spec;
    let u = theta.rem_euclid(2.0 * PI) * spec.n_theta as f64 / PI;
    let j = u.round();
    if (u - j).abs() < 1e-9 {
        let j = j as usize % (2 * spec.n_theta);
        if j < spec.n_theta {
            return row_entropy(w.row(j), spec.dx(), theta);
        }
        // theta + pi: the row reversed in X, same entropy
        return row_entropy(w.row(j - spec.n_theta), spec.dx(), theta);
    }
    row_entropy(&w.circle().row_at(theta), spec.dx(), theta)
}

/// Entropic uncertainty bound `S(theta) + S(theta + pi/2) >= ln(pi e)`.
/// Metric: the minimum over the grid of the left side minus `ln(pi e)`.
pub fn check_hirschman(w: &OpticalTomogramGrid, tol: f64) -> Result<CheckReport> {
    let n = w.spec.n_theta;
    if !n.is_multiple_of(2) {
        return Err(Error::NoConjugatePairs(n));
    }
    let dx = w.spec.dx();
    let entropies: Vec<f64> =
        (0..n).map(|j| row_entropy(w.row(j), dx, w.spec.theta(j))).collect::<Result<_>>()?;
    let bound = (PI * std::f64::consts::E).ln();
    let min_sum = (0..n / 2).map(|j| entropies[j] + entropies[j + n / 2]).fold(f64::INFINITY, f64::min);
    Ok(CheckReport::new("hirschman", min_sum - bound, -tol, Direction::AtLeast)
        .with_grid(describe_grid(&w.spec))
        .detail("min_entropy_sum", min_sum)
        .detail("bound_ln_pi_e", bound))
}

/// Group elements `(mu_j, nu_j)` drawn uniformly from a disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    pub seed: u64,
    pub points: Vec<(f64, f64)>,
}

impl PointSet {
    /// `size` points uniform in the disk of `radius`, from
    /// `XorShiftRng::seed_from_u64(seed)`: radius `R sqrt(u)`, angle `2 pi v`
    /// with `u`, `v` drawn in that order per point.
    pub fn sample(seed: u64, size: usize, radius: f64) -> Self {
        let mut rng = XorShiftRng::seed_from_u64(seed);
        let points = (0..size)
            .map(|_| {
                let r = radius * rng.random::<f64>().sqrt();
                let a = 2.0 * PI * rng.random::<f64>();
                (r * a.cos(), r * a.sin())
            })
            .collect();
        Self { seed, points }
    }
}

/// Quantum (KLM) or classical (Bochner) positivity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PositivityMode {
    Quantum,
    Classical,
}

/// `Z_jk = e^{i (mu_j nu_k - mu_k nu_j)/2} phi(mu_j - mu_k, nu_j - nu_k)`
/// (quantum) or `Z_jk = phi(mu_j - mu_k, nu_j - nu_k)` (classical). The
/// upper triangle is evaluated and mirrored, so the result is exactly
/// Hermitian with diagonal `phi(0, 0)`.
pub fn build_positivity_matrix<F>(points: &[(f64, f64)], mode: PositivityMode, phi: F) -> DMatrix<Complex64>
where
    F: Fn(f64, f64) -> Complex64,
{
    let n = points.len();
    let mut z = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    let origin = phi(0.0, 0.0);
    for j in 0..n {
        z[(j, j)] = Complex64::new(origin.re, 0.0);
        for k in j + 1..n {
            let (mj, nj) = points[j];
            let (mk, nk) = points[k];
            let mut v = phi(mj - mk, nj - nk);
            if mode == PositivityMode::Quantum {
                v *= Complex64::from_polar(1.0, 0.5 * (mj * nk - mk * nj));
            }
            z[(j, k)] = v;
            z[(k, j)] = v.conj();
        }
    }
    z
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositivityConfig {
    pub n_sets: usize,
    pub set_size: usize,
    pub seed: u64,
    pub radius: f64,
    /// Relative tolerance: a set fails when `lambda_min < -tol * ||Z||`.
    pub tol: f64,
}

impl Default for PositivityConfig {
    fn default() -> Self {
        Self { n_sets: 100, set_size: 8, seed: 42, radius: 3.0, tol: 1e-8 }
    }
}

/// Smallest eigenvalue and spectral norm of a Hermitian matrix.
pub fn hermitian_extremes(z: &DMatrix<Complex64>) -> (f64, f64) {
    let eig = z.clone().symmetric_eigenvalues();
    let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    let norm = eig.iter().map(|v| v.abs()).fold(0.0, f64::max);
    (min, norm)
}

/// Seeded search for a point set whose positivity matrix has a negative
/// eigenvalue. Set `k` uses seed `seed + k`.
pub fn check_positivity(source: &SymplecticView, mode: PositivityMode, cfg: PositivityConfig) -> CheckReport {
    let results: Vec<(u64, f64, f64)> = (0..cfg.n_sets as u64)
        .into_par_iter()
        .map(|k| {
            let set = PointSet::sample(cfg.seed.wrapping_add(k), cfg.set_size, cfg.radius);
            let z = build_positivity_matrix(&set.points, mode, |mu, nu| source.characteristic(mu, nu));
            let (min, norm) = hermitian_extremes(&z);
            (set.seed, min, norm)
        })
        .collect();
    let failing: Vec<&(u64, f64, f64)> = results.iter().filter(|(_, min, norm)| *min < -cfg.tol * norm).collect();
    let worst = results
        .iter()
        .min_by(|a, b| (a.1 / a.2).total_cmp(&(b.1 / b.2)))
        .copied()
        .unwrap_or((cfg.seed, 1.0, 1.0));
    let name = match mode {
        PositivityMode::Quantum => "klm",
        PositivityMode::Classical => "bochner",
    };
    let mut report = CheckReport::new(name, worst.1, -cfg.tol * worst.2, Direction::AtLeast)
        .detail("n_sets", cfg.n_sets as f64)
        .detail("set_size", cfg.set_size as f64)
        .detail("radius", cfg.radius)
        .detail("failing_sets", failing.len() as f64)
        .note("sampled necessary condition: a pass means no violation was found");
    report.pass = failing.is_empty();
    report.seeds = match failing.first() {
        Some(f) => vec![f.0],
        None => vec![worst.0],
    };
    report.grid = format!("points uniform in disk radius {}", cfg.radius);
    report
}

/// Phase-space function of a candidate: the grid itself for Wigner-grid
/// views, filtered backprojection of the unit-circle restriction otherwise.
pub fn reconstruct_wigner(source: &SymplecticView, optical: GridSpec, phase: PhaseGridSpec) -> Result<(WignerGrid, bool)> {
    match source {
        SymplecticView::Phase(w) => Ok((w.clone(), false)),
        _ => {
            let grid = source.optical_grid(optical)?;
            let rec = inverse_radon_optical(&grid, phase)?;
            Ok((rec.wigner, rec.boundary_warning))
        }
    }
}

/// `2 pi int W_a W_b dq dp` on a shared grid.
pub fn wigner_overlap(a: &WignerGrid, b: &WignerGrid) -> f64 {
    assert_eq!(a.spec, b.spec, "grids must share a spec");
    let product: Vec<f64> = a.values().iter().zip(b.values()).map(|(x, y)| x * y).collect();
    2.0 * PI * WignerGrid::new(a.spec, product).expect("same spec").integrate()
}

/// `Tr(rho sigma) = 2 pi int W_rho W_sigma dq dp`.
pub fn pure_state_overlap(candidate: &WignerGrid, psi_rho: &FockMatrix) -> f64 {
    let reference = WignerGrid::from_fn(candidate.spec, |q, p| fock_wigner_eval(psi_rho, q, p))
        .expect("candidate spec is already validated");
    wigner_overlap(candidate, &reference)
}

/// Default reference states for [`check_overlap`]: Fock states 0 to 5 and
/// three coherent states.
pub fn default_overlap_states() -> Vec<State> {
    let mut v: Vec<State> = (0..=5).map(State::Fock).collect();
    v.extend([
        State::Coherent { q0: 1.0, p0: 0.0 },
        State::Coherent { q0: 0.0, p0: 1.5 },
        State::Coherent { q0: -1.0, p0: -1.0 },
    ]);
    v
}

/// Overlaps with every reference state must lie in `[-tol, 1 + tol]`.
pub fn check_overlap(candidate: &WignerGrid, tests: &[State], tol: f64) -> Result<CheckReport> {
    let values: Vec<(String, f64)> = tests
        .iter()
        .map(|state| {
            if !state.has(crate::catalog::Representation::Wigner) {
                return Err(Error::RepresentationUnavailable { state: state.name(), repr: "wigner".into() });
            }
            let reference = WignerGrid::from_fn(candidate.spec, |q, p| state.wigner(q, p).unwrap_or(0.0))?;
            Ok((state.name(), wigner_overlap(candidate, &reference)))
        })
        .collect::<Result<_>>()?;
    let min = values.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
    let max = values.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max);
    let mut report =
        CheckReport::new("overlap", min, -tol, Direction::AtLeast).with_grid(describe_phase_grid(&candidate.spec));
    for (name, v) in values {
        report.details.insert(format!("overlap:{name}"), v);
    }
    if max > 1.0 + tol {
        report = report.note(format!("overlap {max} exceeds 1")).fail();
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointConfig {
    pub optical: GridSpec,
    pub phase: PhaseGridSpec,
    /// `(mu, nu)` grid for the Fourier inverse of non-homogeneous candidates.
    pub characteristic: PhaseGridSpec,
    pub tol: f64,
}

impl Default for FixedPointConfig {
    fn default() -> Self {
        Self {
            optical: GridSpec::default(),
            phase: PhaseGridSpec::default(),
            characteristic: PhaseGridSpec { q_max: 10.0, p_max: 10.0, n_q: 201, n_p: 201 },
            tol: 5e-3,
        }
    }
}

/// Compares the candidate with the forward projection of its own inverse
/// map on the standard panel.
///
/// Homogeneous candidates are inverted by filtered backprojection of the
/// unit-circle restriction; others through the Fourier inverse of
/// `phi(mu, nu) = int M e^{iX} dX`.
pub fn check_radon_fixed_point(candidate: &SymplecticView, cfg: FixedPointConfig) -> Result<CheckReport> {
    let (w, route) = if candidate.is_homogeneous() {
        (reconstruct_wigner(candidate, cfg.optical, cfg.phase)?.0, "filtered backprojection")
    } else {
        let phi = characteristic_grid(candidate, cfg.characteristic)?;
        (wigner_from_characteristic(cfg.characteristic, &phi, cfg.phase)?.wigner, "characteristic-function inverse")
    };
    let ds = cfg.optical.dx();
    let panel = standard_panel();
    let pairs: Vec<(f64, f64)> = panel
        .par_iter()
        .map(|&(x, mu, nu)| {
            let r = mu.hypot(nu);
            let (s, theta) = polar_branch(mu, nu);
            let reprojected = radon_line_integral(&w, s * x / r, theta, ds) / r;
            candidate.eval(x, mu, nu).map(|c| (c, reprojected))
        })
        .collect::<Result<_>>()?;
    let scale = pairs.iter().map(|p| p.0.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let max_gap = pairs.iter().map(|p| (p.0 - p.1).abs()).fold(0.0, f64::max);
    let at = panel.iter().position(|&(x, mu, nu)| x == 0.0 && mu == 2.0 && nu == 0.0).expect("panel point");
    Ok(CheckReport::new("fixedpoint", max_gap / scale, cfg.tol, Direction::AtMost)
        .with_grid(format!("{}; {}", describe_grid(&cfg.optical), describe_phase_grid(&cfg.phase)))
        .detail("max_abs_gap", max_gap)
        .detail("candidate_at_0_2_0", pairs[at].0)
        .detail("reprojected_at_0_2_0", pairs[at].1)
        .detail("gap_at_0_2_0", (pairs[at].0 - pairs[at].1).abs())
        .note(format!("inverse route: {route}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::GROUND;

    #[test]
    fn entropy_examples() {
        let spec = GridSpec::default();
        let ground = SymplecticView::from_state(GROUND).optical_grid(spec).unwrap();
        let expected = 0.5 * (PI * std::f64::consts::E).ln();
        assert!((shannon_entropy(&ground, 0.3).unwrap() - expected).abs() < 1e-8);
        let uniform = OpticalTomogramGrid::from_fn(spec, |_, _| 1.0 / 14.0).unwrap();
        assert!((shannon_entropy(&uniform, 0.0).unwrap() - 14f64.ln()).abs() < 1e-12);
        let neg = OpticalTomogramGrid::from_fn(spec, |x, _| if x.abs() < 0.1 { -0.1 } else { 0.1 }).unwrap();
        assert!(matches!(shannon_entropy(&neg, 0.0), Err(Error::NegativeDensity { .. })));
    }

    #[test]
    fn hirschman_needs_conjugate_rows() {
        let spec = GridSpec::new(7.0, 101, 7).unwrap();
        let g = SymplecticView::from_state(GROUND).optical_grid(spec).unwrap();
        assert!(matches!(check_hirschman(&g, 1e-3), Err(Error::NoConjugatePairs(7))));
    }

    #[test]
    fn positivity_matrix_phase() {
        let pts = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)];
        let z = build_positivity_matrix(&pts, PositivityMode::Quantum, |_, _| Complex64::new(1.0, 0.0));
        assert!((z[(1, 2)] - Complex64::from_polar(1.0, 0.5)).norm() < 1e-15);
        assert_eq!(z[(2, 1)], z[(1, 2)].conj());
        let single = build_positivity_matrix(&[(0.4, 0.2)], PositivityMode::Classical, |_, _| Complex64::new(1.0, 0.0));
        assert_eq!(single[(0, 0)], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn point_sets_are_reproducible_and_bounded() {
        let a = PointSet::sample(7, 6, 3.0);
        assert_eq!(a, PointSet::sample(7, 6, 3.0));
        assert_ne!(a, PointSet::sample(8, 6, 3.0));
        assert!(a.points.iter().all(|(m, n)| m.hypot(*n) <= 3.0));
    }

    #[test]
    fn ground_passes_and_w1_fails_klm() {
        let cfg = PositivityConfig { n_sets: 40, ..Default::default() };
        let ground = check_positivity(&SymplecticView::from_state(GROUND), PositivityMode::Quantum, cfg);
        assert!(ground.pass, "{ground:?}");
        let w1 = check_positivity(&SymplecticView::from_state(State::W1), PositivityMode::Quantum, cfg);
        assert!(!w1.pass);
        assert!(w1.metric < -0.01);
    }

    #[test]
    fn panel_contains_reference_point() {
        let panel = standard_panel();
        assert_eq!(panel.len(), 168);
        assert!(panel.contains(&(0.0, 2.0, 0.0)));
        assert!(panel.contains(&(0.0, 0.0, 2.0)));
    }
}
