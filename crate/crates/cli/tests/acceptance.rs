//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::{E, PI};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::SeedableRng;
use rand_xorshift::XorShiftRng;
use serde_json::Value;
use tomokit::catalog::GROUND;
use tomokit::conservation::*;
use tomokit::evolution::*;
use tomokit::fock::{fock_optical_grid, momentum_operator, position_operator, random_density_matrix};
use tomokit::transforms::{inverse_radon_optical, radon_optical};
use tomokit::validation::*;
use tomokit::{FockMatrix, GridSpec, PhaseGridSpec, State, SymplecticView, WignerGrid};

const DIAGNOSES: &str = include_str!("fixtures/diagnoses.json");

struct Criterion {
    ok: bool,
    parts: Vec<String>,
}

impl Criterion {
    fn new() -> Self {
        Criterion { ok: true, parts: Vec::new() }
    }

    fn within(&mut self, name: &str, value: f64, target: f64, tol: f64) -> &mut Self {
        let ok = (value - target).abs() <= tol;
        self.ok &= ok;
        self.parts.push(format!("{name}={value:.6e} target={target:.6e} tol={tol:.0e}"));
        self
    }

    fn below(&mut self, name: &str, value: f64, tol: f64) -> &mut Self {
        let ok = value < tol;
        self.ok &= ok;
        self.parts.push(format!("{name}={value:.3e} tol={tol:.0e}"));
        self
    }

    fn at_least(&mut self, name: &str, value: f64, bound: f64) -> &mut Self {
        let ok = value >= bound;
        self.ok &= ok;
        self.parts.push(format!("{name}={value:.6e} min={bound:.6e}"));
        self
    }

    fn holds(&mut self, name: &str, ok: bool) -> &mut Self {
        self.ok &= ok;
        self.parts.push(format!("{name}={ok}"));
        self
    }
}

fn optical(state: State) -> tomokit::OpticalTomogramGrid {
    SymplecticView::from_state(state).optical_grid(GridSpec::default()).unwrap()
}

fn wigner(state: State, spec: PhaseGridSpec) -> WignerGrid {
    WignerGrid::from_fn(spec, |q, p| state.wigner(q, p).unwrap()).unwrap()
}

fn overlap_with_ground() -> Criterion {
    let mut c = Criterion::new();
    let start = Instant::now();
    let (w1, _) =
        reconstruct_wigner(&SymplecticView::from_state(State::W1), GridSpec::default(), PhaseGridSpec::default()).unwrap();
    let overlap = pure_state_overlap(&w1, &FockMatrix::number(0, 0));
    let seconds = start.elapsed().as_secs_f64();
    c.within("overlap", overlap, -0.125, 2e-3).below("seconds", seconds, 5.0);
    c
}

/// Polynomial coefficients of the physicists' Hermite polynomial `H_n`.
fn hermite_poly(n: usize) -> Vec<f64> {
    let (mut prev, mut cur) = (vec![1.0], vec![0.0, 2.0]);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let mut next = vec![0.0; k + 2];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] += 2.0 * c;
        }
        for (i, c) in prev.iter().enumerate() {
            next[i] -= 2.0 * k as f64 * c;
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// Expands `sum_k a_k X^(2k)` over `H_n^2 / (2^n n!)`, which multiply
/// `e^{-X^2}/sqrt(pi)` to give `|psi_n(X)|^2`.
fn diagonal_expansion(even_poly: &[f64]) -> Vec<f64> {
    let top = even_poly.len() - 1;
    let basis: Vec<Vec<f64>> = (0..=2 * top)
        .step_by(2)
        .map(|two_n| {
            let n = two_n / 2;
            let h = hermite_poly(n);
            let norm = 2f64.powi(n as i32) * (1..=n).product::<usize>() as f64;
            let at = |i: usize| h.get(i).copied().unwrap_or(0.0);
            (0..=n).map(|k| (0..=2 * k).map(|i| at(i) * at(2 * k - i)).sum::<f64>() / norm).collect()
        })
        .collect();
    let mut rest = even_poly.to_vec();
    let mut coeffs = vec![0.0; top + 1];
    for n in (0..=top).rev() {
        coeffs[n] = rest[n] / basis[n][n];
        for k in 0..=n {
            rest[k] -= coeffs[n] * basis[n][k];
        }
    }
    coeffs
}

fn hermite_projection_of_w1() -> Criterion {
    let mut c = Criterion::new();
    let oracle = diagonal_expansion(&[0.125, 0.25, 1.0]);
    let proj = hermite_class_projection(&optical(State::W1), 10).unwrap();
    for (n, expected) in oracle.iter().enumerate() {
        c.within(&format!("rho{n}{n}"), proj.rho.get(n, n).re, *expected, 1e-3);
    }
    c.below("residual", proj.residual, 1e-6).within("trace", proj.rho.trace(), 1.0, 1e-6);
    c
}

fn hirschman() -> Criterion {
    let mut c = Criterion::new();
    let bound = (PI * E).ln();
    let ground = check_hirschman(&optical(GROUND), 1e-3).unwrap();
    c.within("ground_sum", ground.details["min_entropy_sum"], bound, 1e-3);
    let worst = State::all()
        .into_iter()
        .filter(|s| !s.is_counterexample())
        .map(|s| check_hirschman(&optical(s), 1e-3).unwrap().details["min_entropy_sum"])
        .fold(f64::INFINITY, f64::min);
    c.at_least("genuine_min_sum", worst, bound - 1e-3);
    c.holds("cos3_passes", check_hirschman(&optical(State::ExampleCos3), 1e-3).unwrap().pass);
    c
}

fn cos3_conservation() -> Criterion {
    let mut c = Criterion::new();
    let w = optical(State::ExampleCos3);
    let g1 = moment_profile(&w, 1);
    let fit = harmonic_residual(&g1);
    c.within("forbidden_cos3", fit.harmonic(3).unwrap().cos, 0.25, 1e-3);
    let flux = normalization_flux_cubic(&w, 1.0);
    let row = w.spec.thetas().iter().position(|t| (t - PI / 4.0).abs() < 1e-12).unwrap();
    c.within("flux_pi_4", flux[row], 1.5, 0.01);
    c.within("ode_l2", ode_residual(&g1).unwrap().l2, 2.5066, 0.01);
    c
}

fn f1_duality() -> Criterion {
    let mut c = Criterion::new();
    let f1 = SymplecticView::from_state(State::F1);
    let cfg = PositivityConfig { set_size: 6, ..PositivityConfig::default() };
    let klm = check_positivity(&f1, PositivityMode::Quantum, cfg);
    c.at_least("klm_min_eig", klm.metric, -1e-8).holds("klm_pass", klm.pass);
    let fixed = check_radon_fixed_point(&f1, FixedPointConfig::default()).unwrap();
    c.holds("fixedpoint_fails", !fixed.pass);
    c.within("gap_0_2_0", fixed.details["gap_at_0_2_0"], 0.0156, 1e-3);
    c
}

fn m1_properties() -> Criterion {
    let mut c = Criterion::new();
    let view = SymplecticView::from_state(State::M1);
    let mut defect = 0.0f64;
    for &(x, mu, nu) in &[(0.3, 1.0, 0.5), (-1.2, -0.4, 2.0), (2.0, 0.7, -0.7), (0.0, 1.5, 0.0)] {
        for lambda in [0.25, 1.7, -3.0] {
            let scaled = f64::abs(lambda) * view.eval(lambda * x, lambda * mu, lambda * nu).unwrap();
            defect = defect.max((scaled - view.eval(x, mu, nu).unwrap()).abs());
        }
    }
    c.below("homogeneity", defect, 1e-12);
    let panel = default_moment_panel();
    for m in 1..=2 {
        let fit = symplectic_moment_residual(&view, m, &panel).unwrap();
        c.below(&format!("moment{m}"), fit.residual, 1e-8);
    }
    let klm = check_positivity(&view, PositivityMode::Quantum, PositivityConfig::default());
    c.holds("klm_fails", !klm.pass).holds("seed_recorded", !klm.seeds.is_empty());
    if let Some(&seed) = klm.seeds.first() {
        let cfg = PositivityConfig::default();
        let set = PointSet::sample(seed, cfg.set_size, cfg.radius);
        let z = build_positivity_matrix(&set.points, PositivityMode::Quantum, |mu, nu| view.characteristic(mu, nu));
        let (min, norm) = hermitian_extremes(&z);
        c.holds("seed_reproduces", min < -cfg.tol * norm);
    }
    c
}

fn transform_fidelity() -> Criterion {
    let mut c = Criterion::new();
    let spec = GridSpec::default();
    let mut worst = 0.0f64;
    for n in 0..=3 {
        let w = fock_optical_grid(&FockMatrix::number(n, n), spec).unwrap();
        let rec = inverse_radon_optical(&w, PhaseGridSpec::default()).unwrap();
        worst = worst.max(radon_optical(&rec.wigner, spec).unwrap().l2_distance(&w));
    }
    c.below("radon_round_trip_l2", worst, 1e-2);
    let rec = inverse_radon_optical(&optical(State::W1), PhaseGridSpec::square(2.0, 41).unwrap()).unwrap();
    c.within("w1_origin", rec.wigner.get(20, 20), -0.25 / PI, 1e-3);
    c
}

fn phase_space_conservation() -> Criterion {
    let mut c = Criterion::new();
    let spec = PhaseGridSpec { q_max: 5.0, p_max: 12.0, n_q: 256, n_p: 256 };
    let quartic: PolynomialPotential = "c2=0.5,c4=0.1".parse().unwrap();
    let w0 = wigner(State::Coherent { q0: 1.0, p0: 0.0 }, spec);
    for (name, method) in [("liouville", evolve_liouville as fn(_, _, _, _) -> _), ("moyal", evolve_moyal)] {
        let start = Instant::now();
        let (_, trace) = method(&w0, &quartic, 1.0, None).unwrap();
        let seconds = start.elapsed().as_secs_f64();
        c.below(&format!("{name}_drift"), trace.mass_drift(), 1e-6);
        c.below(&format!("{name}_seconds"), seconds, 60.0);
    }
    let quadratic: PolynomialPotential = "c1=0.2,c2=0.5".parse().unwrap();
    let dt = moyal_step_limit(&spec, &quadratic);
    let (a, _) = evolve_liouville(&w0, &quadratic, dt, Some(dt)).unwrap();
    let (b, _) = evolve_moyal(&w0, &quadratic, dt, Some(dt)).unwrap();
    c.below("quadratic_step_diff", a.max_abs_diff(&b), 1e-12);
    c
}

fn moment_oracles() -> Criterion {
    let mut c = Criterion::new();
    let mut rng = XorShiftRng::seed_from_u64(9);
    let spec = GridSpec::default();
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let rho = random_density_matrix(4, &mut rng);
        // one extra level so that q^2 and qp are exact on the support
        let big = rho.resized(5);
        let (q, p) = (position_operator(big.dim()), momentum_operator(big.dim()));
        let mean_q = big.expectation(&q).re;
        let mean_p = big.expectation(&p).re;
        let qq = big.expectation(&(&q * &q)).re;
        let pp = big.expectation(&(&p * &p)).re;
        let sym = big.expectation(&(&q * &p + &p * &q)).re;
        let w = fock_optical_grid(&rho, spec).unwrap();
        let (g1, g2) = (moment_profile(&w, 1), moment_profile(&w, 2));
        for (k, t) in g1.thetas.iter().enumerate() {
            let (s, co) = t.sin_cos();
            worst = worst.max((g1.values[k] - (mean_q * co + mean_p * s)).abs());
            worst = worst.max((g2.values[k] - (qq * co * co + pp * s * s + sym * s * co)).abs());
        }
    }
    c.below("max_moment_error", worst, 1e-6);
    c
}

fn tomokit(dir: &Path, args: &[&str]) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_tomokit")).current_dir(dir).args(args).output().unwrap().status.code().unwrap()
}

fn cli_narrative() -> Criterion {
    let mut c = Criterion::new();
    let table: Value = serde_json::from_str(DIAGNOSES).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let validate = |state: &str, out: &str| {
        let code = tomokit(d, &["validate", "--state", state, "--checks", "all", "--seed", "42", "--out", out]);
        let report: Value = serde_json::from_str(&std::fs::read_to_string(d.join(out)).unwrap()).unwrap();
        (code, report)
    };
    let mut covered = 0;
    for (state, expected) in table["counterexamples"].as_object().unwrap() {
        let (code, report) = validate(state, &format!("{state}.json"));
        let failing: Vec<&str> = report["failing"].as_array().unwrap().iter().filter_map(Value::as_str).collect();
        let diagnosed = expected.as_array().unwrap().iter().all(|e| failing.contains(&e.as_str().unwrap()));
        c.holds(state, code == 1 && diagnosed);
        covered += 1;
    }
    for state in table["genuine"].as_array().unwrap() {
        let state = state.as_str().unwrap();
        let (code, _) = validate(state, &format!("{state}.json"));
        c.holds(state, code == 0);
        covered += 1;
    }
    c.holds("whole_catalog", covered == State::all().len());
    validate("w1", "again.json");
    let same = std::fs::read(d.join("w1.json")).unwrap() == std::fs::read(d.join("again.json")).unwrap();
    c.holds("byte_reproducible", same);
    c
}

type Check = fn() -> Criterion;

fn main() -> ExitCode {
    let criteria: [(&str, Check); 10] = [
        ("w1 overlap with the ground state", overlap_with_ground),
        ("Hermite-class projection of w1", hermite_projection_of_w1),
        ("Hirschman entropy bound", hirschman),
        ("example-cos3 conservation failure", cos3_conservation),
        ("f1 passes KLM but is not a Radon fixed point", f1_duality),
        ("M1 homogeneity, moments and positivity", m1_properties),
        ("transform fidelity", transform_fidelity),
        ("Liouville and Moyal mass conservation", phase_space_conservation),
        ("moment oracles for random density matrices", moment_oracles),
        ("end-to-end CLI verdicts", cli_narrative),
    ];
    let mut all = true;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let c = run();
        all &= c.ok;
        println!("{} criterion {}: {title}: {}", if c.ok { "PASS" } else { "FAIL" }, i + 1, c.parts.join(", "));
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
