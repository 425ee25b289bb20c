use std::f64::consts::PI;

use proptest::prelude::*;
use tomokit::conservation::moment_profile;
use tomokit::evolution::*;
use tomokit::fock::{fock_optical_grid, fock_wigner_eval};
use tomokit::transforms::radon_optical;
use tomokit::validation::{check_structural, StructuralTolerances, TomogramKind};
use tomokit::{Error, FockMatrix, GridSpec, PhaseGridSpec, State, StateSpec, SymplecticView, WignerGrid};

fn potential(s: &str) -> PolynomialPotential {
    s.parse().unwrap()
}

fn wigner(state: State, spec: PhaseGridSpec) -> WignerGrid {
    WignerGrid::from_fn(spec, |q, p| state.wigner(q, p).unwrap()).unwrap()
}

fn energy(rho: &FockMatrix, v: &PolynomialPotential) -> f64 {
    rho.expectation(&hamiltonian(v, rho.dim())).re
}

#[test]
fn harmonic_rotation_examples() {
    let spec = GridSpec::default();
    let w0 = fock_optical_grid(&FockMatrix::coherent(0.8, -0.3, 30), spec).unwrap();
    let full = evolve_harmonic_tomogram(&w0, 2.0 * PI);
    let err = full.values().iter().zip(w0.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(err < 1e-10, "full period error {err}");

    let half = evolve_harmonic_tomogram(&w0, PI);
    for j in 0..spec.n_theta {
        for i in 0..spec.n_x {
            assert!((half.get(j, i) - w0.get(j, spec.n_x - 1 - i)).abs() < 1e-10);
        }
    }

    let displaced = SymplecticView::from_state(State::Coherent { q0: 1.0, p0: 0.0 }).optical_grid(spec).unwrap();
    for t in [0.3, 1.7, 4.0] {
        let g = moment_profile(&evolve_harmonic_tomogram(&displaced, t), 1);
        for (theta, v) in g.thetas.iter().zip(&g.values) {
            assert!((v - (theta + t).cos()).abs() < 1e-9);
        }
    }
}

#[test]
fn harmonic_rotation_preserves_structural_metrics() {
    let spec = GridSpec::default();
    let w0 = SymplecticView::from_state(State::Squeezed { r: 0.3 }).optical_grid(spec).unwrap();
    let metrics = |w| -> Vec<f64> {
        check_structural(&SymplecticView::from_optical(w), TomogramKind::Optical, spec, StructuralTolerances::default())
            .unwrap()
            .iter()
            .map(|r| r.metric)
            .collect()
    };
    let before = metrics(w0.clone());
    for t in [0.4, 1.3, 2.9] {
        for (a, b) in before.iter().zip(metrics(evolve_harmonic_tomogram(&w0, t))) {
            assert!((a - b).abs() < 1e-8, "t={t}: {a} vs {b}");
        }
    }
}

#[test]
fn free_streaming() {
    let spec = PhaseGridSpec::default();
    let w0 = wigner(State::Fock(0), spec);
    let (w, trace) = evolve_liouville(&w0, &PolynomialPotential::default(), 1.0, None).unwrap();
    let exact = WignerGrid::from_fn(spec, |q, p| State::Fock(0).wigner(q - p, p).unwrap()).unwrap();
    let err = w.l2_distance(&exact);
    assert!(err < 1e-3, "free streaming L2 {err}");
    assert!(trace.mass_drift() < 1e-10);
}

#[test]
fn harmonic_flow_rotates_phase_space() {
    let spec = PhaseGridSpec::default();
    let w0 = wigner(State::Coherent { q0: 1.0, p0: 0.0 }, spec);
    let (_, trace) = evolve_liouville(&w0, &PolynomialPotential::harmonic(), 1.0, None).unwrap();
    for (i, t) in trace.times.iter().enumerate().step_by(40) {
        assert!((trace.observables["q"][i] - t.cos()).abs() < 1e-6, "t={t}");
        assert!((trace.observables["p"][i] + t.sin()).abs() < 1e-6, "t={t}");
    }
}

#[test]
fn moyal_equals_liouville_for_quadratic_potentials() {
    let spec = PhaseGridSpec::square(6.0, 96).unwrap();
    let w0 = wigner(State::Fock(3), spec);
    for v in [PolynomialPotential::harmonic(), potential("c1=0.3,c2=0.7")] {
        let dt = moyal_step_limit(&spec, &v);
        assert_eq!(dt, liouville_step_limit(&spec, &v));
        let (a, _) = evolve_liouville(&w0, &v, dt, Some(dt)).unwrap();
        let (b, _) = evolve_moyal(&w0, &v, dt, Some(dt)).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-12);
    }
}

#[test]
fn moyal_keeps_the_ground_state_stationary() {
    let spec = PhaseGridSpec::square(6.0, 129).unwrap();
    let w0 = wigner(State::Fock(0), spec);
    let (w, trace) = evolve_moyal(&w0, &PolynomialPotential::harmonic(), 2.0 * PI, None).unwrap();
    assert!(w.max_abs_diff(&w0) < 1e-6, "{}", w.max_abs_diff(&w0));
    assert!(trace.mass_drift() < 1e-10);
}

#[test]
fn moyal_conserves_mass_with_a_cubic_term() {
    let spec = PhaseGridSpec::square(6.0, 129).unwrap();
    let w0 = wigner(State::Coherent { q0: 0.5, p0: 0.0 }, spec);
    let (_, trace) = evolve_moyal(&w0, &potential("c2=0.5,c3=0.1"), 1.0, None).unwrap();
    assert!(trace.mass_drift() < 1e-6);
    assert!(!trace.leakage_warning);
    assert!(trace.times.windows(2).all(|t| t[1] > t[0]));
    assert!((trace.times.last().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn step_limits_are_enforced() {
    let spec = PhaseGridSpec::square(6.0, 65).unwrap();
    let w0 = wigner(State::Fock(0), spec);
    let v = potential("c2=0.5,c4=0.25");
    let limit = liouville_step_limit(&spec, &v);
    assert!(matches!(evolve_liouville(&w0, &v, 1.0, Some(1.5 * limit)), Err(Error::CflViolation { .. })));
    let limit = moyal_step_limit(&spec, &v);
    assert!(limit <= liouville_step_limit(&spec, &v));
    assert!(matches!(evolve_moyal(&w0, &v, 1.0, Some(1.01 * limit)), Err(Error::CflViolation { .. })));
}

#[test]
fn fock_evolution_examples() {
    let v = PolynomialPotential::harmonic();
    let rho0 = FockMatrix::from_diagonal(&[0.2, 0.5, 0.3, 0.0, 0.0]);
    let (rho, _) = evolve_fock(&rho0, &v, 1.0, None).unwrap();
    assert!((rho.entries() - rho0.entries()).norm() < 1e-12);

    let (_, trace) = evolve_fock(&FockMatrix::coherent(1.0, 0.0, 30), &v, 2.0, None).unwrap();
    assert_eq!(trace.times.len(), 21);
    for (i, t) in trace.times.iter().enumerate() {
        assert!((trace.observables["q"][i] - t.cos()).abs() < 1e-6, "t={t}");
        assert!((trace.observables["p"][i] + t.sin()).abs() < 1e-6, "t={t}");
    }

    let cubic = potential("c2=0.5,c3=0.1");
    let rho0 = FockMatrix::number(0, 30);
    let (rho, trace) = evolve_fock(&rho0, &cubic, 1.0, None).unwrap();
    assert!(trace.mass.iter().all(|m| (m - 1.0).abs() < 1e-10));
    let e = rho.entries();
    let hermiticity = (e - e.adjoint()).norm();
    assert!(hermiticity < 1e-10);
    assert!((energy(&rho, &cubic) - energy(&rho0, &cubic)).abs() < 1e-8);
}

#[test]
fn cross_integrator_consistency() {
    let v = potential("c2=0.5,c3=0.1");
    let t = 0.5;
    let spec = GridSpec::default();
    let (rho, _) = evolve_fock(&FockMatrix::number(0, 40), &v, t, None).unwrap();
    let via_fock = fock_optical_grid(&rho, spec).unwrap();
    let w0 = WignerGrid::from_fn(PhaseGridSpec::default(), |q, p| fock_wigner_eval(&FockMatrix::number(0, 0), q, p))
        .unwrap();
    let (w, _) = evolve_moyal(&w0, &v, t, None).unwrap();
    let via_moyal = radon_optical(&w, spec).unwrap();
    let err = via_fock.l2_distance(&via_moyal);
    assert!(err < 1e-2, "triangle L2 {err}");
}

#[test]
fn drift_examples() {
    let grid = GridSpec::default();
    let ground = drift_experiment(&StateSpec::Catalog(State::Fock(0)), &potential("c2=0.5,c3=0.1"), 1.0, grid).unwrap();
    assert_eq!(ground.mode, "fock");
    assert_eq!(ground.checkpoint_times.len(), 21);
    assert!(ground.max_normalization_defect() < 1e-6);

    let cos3 = drift_experiment(&StateSpec::Catalog(State::ExampleCos3), &potential("c3=1"), 1.0, grid).unwrap();
    assert_eq!(cos3.mode, "flux");
    let quarter = cos3.flux_thetas.iter().position(|t| (t - PI / 4.0).abs() < 1e-12).unwrap();
    assert!((cos3.flux[quarter] - 1.5).abs() < 0.01);
    let summary = cos3.flux_summary.unwrap();
    // 3 sin^3 cos 3theta integrates to zero over [0, pi)
    let n = 4096;
    let oracle: f64 = (0..n)
        .map(|j| {
            let th = (j as f64 + 0.5) * PI / n as f64;
            3.0 * th.sin().powi(3) * (-2.0 * (3.0 * th).cos())
        })
        .sum::<f64>()
        * PI
        / n as f64;
    assert!((summary.integral - oracle).abs() < 1e-10);
    assert!(summary.abs_integral > 1.0 && summary.max_abs > 1.5);

    let w1 = drift_experiment(&StateSpec::Catalog(State::W1), &potential("c3=1"), 0.1, grid).unwrap();
    assert!(w1.flux_summary.unwrap().max_abs < 1e-6);

    let f1 = drift_experiment(&StateSpec::Catalog(State::F1), &potential("c2=0.5"), 1.0, grid).unwrap();
    assert_eq!(f1.mode, "flux");
    assert!(f1.notes.iter().any(|n| n == "no implemented flux functional applies"));
    assert!(f1.flux.is_empty());
}

#[test]
fn trace_exports_csv() {
    let (_, trace) = evolve_fock(&FockMatrix::number(1, 6), &PolynomialPotential::harmonic(), 0.5, None).unwrap();
    let csv = trace.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,mass,p,p2,q,q2"));
    assert_eq!(lines.count(), trace.times.len());
}

fn phase_states() -> Vec<State> {
    State::all().into_iter().filter(|s| s.has(tomokit::Representation::Wigner)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn phase_space_flows_conserve_mass(
        which in 0usize..9,
        c2 in 0.0f64..0.5,
        c3 in -0.05f64..0.05,
        c4 in 0.0f64..0.05,
        t in 0.1f64..1.0,
        moyal in any::<bool>(),
    ) {
        let states = phase_states();
        let state = states[which % states.len()];
        // quartic forces carry fock5 tails past p = 10 within t = 1
        let spec = PhaseGridSpec { q_max: 7.0, p_max: 12.0, n_q: 128, n_p: 128 };
        let w0 = wigner(state, spec);
        let v = PolynomialPotential::new(&[0.0, 0.0, c2, c3, c4]).unwrap();
        let (_, trace) = if moyal { evolve_moyal(&w0, &v, t, None) } else { evolve_liouville(&w0, &v, t, None) }.unwrap();
        prop_assert!(trace.mass_drift() < 1e-6, "{}: drift {}", state.name(), trace.mass_drift());
    }

    #[test]
    fn fock_energy_is_conserved(c3 in -0.1f64..0.1, c4 in 0.0f64..0.1, q0 in -1.0f64..1.0) {
        let v = PolynomialPotential::new(&[0.0, 0.0, 0.5, c3, c4]).unwrap();
        let rho0 = FockMatrix::coherent(q0, 0.0, 24);
        let (rho, trace) = evolve_fock(&rho0, &v, 1.0, None).unwrap();
        prop_assert!((energy(&rho, &v) - energy(&rho0, &v)).abs() < 1e-8);
        prop_assert!(trace.mass.iter().all(|m| (m - 1.0).abs() < 1e-10));
    }
}
