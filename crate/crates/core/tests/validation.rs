use std::f64::consts::{E, PI};

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_xorshift::XorShiftRng;
use tomokit::catalog::{polar_branch, GROUND};
use tomokit::fock::random_density_matrix;
use tomokit::transforms::{characteristic_grid, radon_line_integral, wigner_from_characteristic};
use tomokit::validation::*;
use tomokit::{FockMatrix, GridSpec, OpticalTomogramGrid, PhaseGridSpec, State, SymplecticView, WignerGrid};

fn structural(view: &SymplecticView, kind: TomogramKind) -> Vec<CheckReport> {
    check_structural(view, kind, GridSpec::default(), StructuralTolerances::default()).unwrap()
}

fn find<'a>(reports: &'a [CheckReport], name: &str) -> &'a CheckReport {
    reports.iter().find(|r| r.check == name).unwrap()
}

fn gaussian_tomogram(spec: GridSpec, var_at: impl Fn(f64) -> (f64, f64) + Sync) -> OpticalTomogramGrid {
    OpticalTomogramGrid::from_fn(spec, |x, t| {
        let (mean, var) = var_at(t);
        (-(x - mean).powi(2) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
    })
    .unwrap()
}

#[test]
fn structural_examples() {
    let ground = structural(&SymplecticView::from_state(GROUND), TomogramKind::Symplectic);
    assert_eq!(ground.len(), 4);
    for r in &ground {
        assert!(r.pass, "{}", r.check);
        assert!(r.metric.abs() < 1e-8, "{} = {}", r.check, r.metric);
    }

    let cos3 = structural(&SymplecticView::from_state(State::ExampleCos3), TomogramKind::Symplectic);
    for name in ["structural.normalization", "structural.nonnegativity", "structural.parity"] {
        assert!(find(&cos3, name).pass, "{name}");
    }

    let constant = OpticalTomogramGrid::from_fn(GridSpec::default(), |_, _| 0.2).unwrap();
    let reports = structural(&SymplecticView::from_optical(constant), TomogramKind::Optical);
    let norm = find(&reports, "structural.normalization");
    assert!(!norm.pass);
    assert!((norm.metric - (14.0 * 0.2 - 1.0)).abs() < 1e-12);
    assert!(find(&reports, "structural.nonnegativity").pass);
}

#[test]
fn entropy_examples() {
    let spec = GridSpec::default();
    let half_ln_pi_e = 0.5 * (PI * E).ln();
    let ground = SymplecticView::from_state(GROUND).optical_grid(spec).unwrap();
    let displaced = SymplecticView::from_state(State::Coherent { q0: 1.0, p0: 0.0 }).optical_grid(spec).unwrap();
    for theta in [0.0, 0.4, PI / 2.0] {
        assert!((shannon_entropy(&ground, theta).unwrap() - half_ln_pi_e).abs() < 1e-8);
        assert!((shannon_entropy(&displaced, theta).unwrap() - half_ln_pi_e).abs() < 1e-8);
    }
    let uniform = OpticalTomogramGrid::from_fn(spec, |_, _| 1.0 / 14.0).unwrap();
    assert!((shannon_entropy(&uniform, 0.0).unwrap() - 14f64.ln()).abs() < 1e-12);
}

#[test]
fn hirschman_examples() {
    let spec = GridSpec::default();
    let bound = (PI * E).ln();
    let ground = check_hirschman(&SymplecticView::from_state(GROUND).optical_grid(spec).unwrap(), 1e-3).unwrap();
    assert!(ground.pass && ground.metric.abs() < 1e-3);
    assert!((ground.details["min_entropy_sum"] - bound).abs() < 1e-3);

    // variance 1/4 at theta = 0 and 1 at theta = pi/2: entropy sum exceeds
    // ln(pi e) by ln(sqrt(1/4 * 1) * 2) = 0
    let squeezed = gaussian_tomogram(spec, |t| (0.0, 0.25 * t.cos().powi(2) + t.sin().powi(2)));
    let oracle = 0.5 * (2.0 * PI * E * 0.25).ln() + 0.5 * (2.0 * PI * E).ln();
    assert!((oracle - bound).abs() < 1e-12);
    let report = check_hirschman(&squeezed, 1e-3).unwrap();
    assert!(report.metric.abs() < 1e-3, "squeezed metric {}", report.metric);

    let cos3 = SymplecticView::from_state(State::ExampleCos3).optical_grid(spec).unwrap();
    assert!(check_hirschman(&cos3, 1e-3).unwrap().pass);
}

#[test]
fn genuine_states_respect_the_entropy_bound() {
    let spec = GridSpec::default();
    for state in State::all().into_iter().filter(|s| !s.is_counterexample()) {
        let w = SymplecticView::from_state(state).optical_grid(spec).unwrap();
        let report = check_hirschman(&w, 1e-3).unwrap();
        assert!(report.metric >= -1e-3, "{}: {}", state.name(), report.metric);
    }
}

#[test]
fn positivity_matrix_structure() {
    let single = build_positivity_matrix(&[(0.3, -0.1)], PositivityMode::Quantum, |_, _| Complex64::new(1.0, 0.0));
    assert_eq!(single.shape(), (1, 1));
    assert_eq!(single[(0, 0)], Complex64::new(1.0, 0.0));

    let ground = SymplecticView::from_state(GROUND);
    let set = PointSet::sample(7, 6, 3.0);
    for mode in [PositivityMode::Quantum, PositivityMode::Classical] {
        let z = build_positivity_matrix(&set.points, mode, |mu, nu| ground.characteristic(mu, nu));
        for j in 0..6 {
            assert_eq!(z[(j, j)], Complex64::new(1.0, 0.0));
            for k in 0..6 {
                assert_eq!(z[(j, k)], z[(k, j)].conj());
            }
        }
    }

    let pts = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)];
    let z = build_positivity_matrix(&pts, PositivityMode::Quantum, |_, _| Complex64::new(1.0, 0.0));
    assert!((z[(1, 2)].arg() - 0.5).abs() < 1e-15);
}

#[test]
fn klm_examples() {
    let size_six = PositivityConfig { set_size: 6, ..PositivityConfig::default() };
    let ground = check_positivity(&SymplecticView::from_state(GROUND), PositivityMode::Quantum, size_six);
    assert!(ground.pass && ground.metric >= -1e-8);
    let f1 = check_positivity(&SymplecticView::from_state(State::F1), PositivityMode::Quantum, size_six);
    assert!(f1.pass, "f1 metric {}", f1.metric);

    let w1 = check_positivity(&SymplecticView::from_state(State::W1), PositivityMode::Quantum, PositivityConfig::default());
    assert!(!w1.pass);
    assert!(w1.metric < -0.01, "w1 metric {}", w1.metric);
    assert_eq!(w1.seeds.len(), 1);

    // the recorded seed reproduces the violation on its own
    let seed = w1.seeds[0];
    let set = PointSet::sample(seed, 8, 3.0);
    let view = SymplecticView::from_state(State::W1);
    let z = build_positivity_matrix(&set.points, PositivityMode::Quantum, |mu, nu| view.characteristic(mu, nu));
    let (min, norm) = hermitian_extremes(&z);
    assert!(min < -1e-8 * norm);
}

#[test]
fn random_density_matrices_pass_klm() {
    let mut rng = XorShiftRng::seed_from_u64(2024);
    let cfg = PositivityConfig { n_sets: 20, ..PositivityConfig::default() };
    for _ in 0..20 {
        let rho = random_density_matrix(4, &mut rng);
        let report = check_positivity(&SymplecticView::Fock(rho), PositivityMode::Quantum, cfg);
        assert!(report.pass, "metric {}", report.metric);
    }
}

#[test]
fn classical_mixtures_pass_bochner() {
    let spec = PhaseGridSpec::square(7.0, 121).unwrap();
    let mut rng = XorShiftRng::seed_from_u64(99);
    let cfg = PositivityConfig { n_sets: 30, ..PositivityConfig::default() };
    for _ in 0..10 {
        let parts: Vec<(f64, f64, f64, f64)> = (0..3)
            .map(|_| {
                (rng.random_range(0.2..1.0), rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5), rng.random_range(0.3..1.0))
            })
            .collect();
        let total: f64 = parts.iter().map(|p| p.0).sum();
        let w = WignerGrid::from_fn(spec, |q, p| {
            parts
                .iter()
                .map(|&(a, q0, p0, var)| a / total * (-((q - q0).powi(2) + (p - p0).powi(2)) / (2.0 * var)).exp() / (2.0 * PI * var))
                .sum()
        })
        .unwrap();
        let report = check_positivity(&SymplecticView::Phase(w), PositivityMode::Classical, cfg);
        assert!(report.pass, "metric {}", report.metric);
    }
}

#[test]
fn overlap_examples() {
    let phase = PhaseGridSpec::default();
    let ground_w = WignerGrid::from_fn(phase, |q, p| GROUND.wigner(q, p).unwrap()).unwrap();
    let ground = FockMatrix::number(0, 0);
    assert!((pure_state_overlap(&ground_w, &ground) - 1.0).abs() < 1e-3);
    assert!(pure_state_overlap(&ground_w, &FockMatrix::number(1, 1)).abs() < 1e-3);

    let (w1, _) = reconstruct_wigner(&SymplecticView::from_state(State::W1), GridSpec::default(), phase).unwrap();
    assert!((pure_state_overlap(&w1, &ground) + 0.125).abs() < 2e-3);
    let report = check_overlap(&w1, &default_overlap_states(), 1e-3).unwrap();
    assert!(!report.pass);
    assert!((report.details["overlap:ground"] + 0.125).abs() < 2e-3);
}

#[test]
fn fixed_point_examples() {
    let cfg = FixedPointConfig::default();
    for state in [State::Fock(2), State::Coherent { q0: 1.0, p0: 0.0 }] {
        let report = check_radon_fixed_point(&SymplecticView::from_state(state), cfg).unwrap();
        assert!(report.pass && report.metric < 5e-3, "{}: {}", state.name(), report.metric);
    }

    let f1 = check_radon_fixed_point(&SymplecticView::from_state(State::F1), cfg).unwrap();
    assert!(!f1.pass);
    assert!((f1.details["candidate_at_0_2_0"] - (-0.75f64).exp() / PI.sqrt()).abs() < 1e-9);
    assert!((f1.details["reprojected_at_0_2_0"] - 0.5 / PI.sqrt()).abs() < 1e-3);
    assert!((f1.details["gap_at_0_2_0"] - 0.0156).abs() < 1e-3);
}

#[test]
fn f1_agrees_with_its_reprojection_on_the_unit_circle() {
    let cfg = FixedPointConfig::default();
    let f1 = SymplecticView::from_state(State::F1);
    let phi = characteristic_grid(&f1, cfg.characteristic).unwrap();
    let w = wigner_from_characteristic(cfg.characteristic, &phi, cfg.phase).unwrap().wigner;
    for k in 0..8 {
        let angle = k as f64 * PI / 4.0;
        let (mu, nu) = (angle.cos(), angle.sin());
        let (s, theta) = polar_branch(mu, nu);
        for x in [-1.0, 0.0, 0.5] {
            let reprojected = radon_line_integral(&w, s * x, theta, cfg.optical.dx());
            assert!((reprojected - f1.eval(x, mu, nu).unwrap()).abs() < 1e-3);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn overlap_is_linear(c in 0.1f64..3.0) {
        let phase = PhaseGridSpec::square(6.0, 97).unwrap();
        let w = WignerGrid::from_fn(phase, |q, p| State::Fock(1).wigner(q, p).unwrap()).unwrap();
        let scaled = WignerGrid::new(phase, w.values().iter().map(|v| c * v).collect()).unwrap();
        let rho = FockMatrix::coherent(0.5, -0.5, 20);
        let base = pure_state_overlap(&w, &rho);
        prop_assert!((pure_state_overlap(&scaled, &rho) - c * base).abs() < 1e-12);
    }

    #[test]
    fn hirschman_is_translation_invariant(a in -1.5f64..1.5, b in -1.5f64..1.5) {
        // wide enough that no shifted row is truncated
        let spec = GridSpec::new(10.0, 401, 64).unwrap();
        let var = |t: f64| 0.25 * t.cos().powi(2) + t.sin().powi(2);
        let centred = gaussian_tomogram(spec, |t| (0.0, var(t)));
        let shifted = gaussian_tomogram(spec, |t| (a * t.cos() + b * t.sin(), var(t)));
        let m0 = check_hirschman(&centred, 1e-3).unwrap().metric;
        let m1 = check_hirschman(&shifted, 1e-3).unwrap().metric;
        prop_assert!((m0 - m1).abs() < 1e-8, "{} vs {}", m0, m1);
    }
}
