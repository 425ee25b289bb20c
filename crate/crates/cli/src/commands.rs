use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;
use tomokit::catalog::State;
use tomokit::conservation::{
    default_moment_panel, harmonic_residual, hermite_class_projection, moment_profile, normalization_flux_cubic,
    ode_residual, summarize_flux, symplectic_moment_residual,
};
use tomokit::evolution::{
    drift_experiment, evolve_fock, evolve_harmonic_tomogram, evolve_liouville, evolve_moyal, PolynomialPotential,
};
use tomokit::io::{format_characteristic, read_grid, write_optical, write_wigner, LoadedGrid};
use tomokit::transforms::{characteristic_grid, inverse_radon_optical, radon_optical};
use tomokit::validation::{
    check_hirschman, check_overlap, check_positivity, check_radon_fixed_point, check_structural,
    default_overlap_states, describe_grid, reconstruct_wigner, CheckReport, Direction, FixedPointConfig,
    PositivityConfig, PositivityMode, StructuralTolerances, TomogramKind,
};
use tomokit::{Error, PhaseGridSpec, Representation, Result, StateSpec, SymplecticView, WignerGrid};

use crate::report::{sibling, RunReport};
use crate::{ConserveArgs, EvolveArgs, EvolveMethod, GridArgs, TransformArgs, TransformOp, ValidateArgs};

/// A loaded candidate.
struct Source {
    label: String,
    view: SymplecticView,
    state: Option<State>,
    kind: TomogramKind,
}

fn load(spec: &StateSpec) -> Result<Source> {
    match spec {
        StateSpec::Catalog(state) => Ok(Source {
            label: state.name(),
            view: SymplecticView::from_state(*state),
            state: Some(*state),
            kind: TomogramKind::Symplectic,
        }),
        StateSpec::GridFile(path) => {
            let view = match read_grid(path)? {
                LoadedGrid::Optical(w) => SymplecticView::from_optical(w),
                LoadedGrid::Wigner(w) => SymplecticView::Phase(w),
            };
            Ok(Source { label: path.display().to_string(), view, state: None, kind: TomogramKind::Optical })
        }
    }
}

/// Phase-space samples of a source: closed form, grid file or none.
fn phase_input(source: &Source, spec: PhaseGridSpec) -> Result<WignerGrid> {
    match (&source.view, source.state) {
        (SymplecticView::Phase(w), _) => Ok(w.clone()),
        (_, Some(state)) if state.has(Representation::Wigner) => {
            WignerGrid::from_fn(spec, |q, p| state.wigner(q, p).unwrap_or(0.0))
        }
        _ => Err(Error::RepresentationUnavailable { state: source.label.clone(), repr: "wigner".into() }),
    }
}

fn grid_config(report: &mut RunReport, grid: &GridArgs) -> Result<()> {
    report.config("optical_grid", describe_grid(&grid.optical()?));
    report.config("phase_grid", tomokit::validation::describe_phase_grid(&grid.phase()?));
    Ok(())
}

pub fn catalog(out: Option<&Path>) -> Result<bool> {
    let states = State::all();
    for s in &states {
        let reprs: Vec<String> = s.representations().iter().map(|r| r.to_string()).collect();
        println!("{:<14} {:<30} {}", s.name(), reprs.join(","), s.description());
    }
    if let Some(path) = out {
        let entries: Vec<_> = states
            .iter()
            .map(|s| {
                json!({
                    "name": s.name(),
                    "description": s.description(),
                    "counterexample": s.is_counterexample(),
                    "representations": s.representations().iter().map(|r| r.to_string()).collect::<Vec<_>>(),
                })
            })
            .collect();
        fs::write(path, serde_json::to_string_pretty(&entries)? + "\n")?;
    }
    Ok(true)
}

pub fn transform(args: &TransformArgs) -> Result<bool> {
    let source = load(&args.state)?;
    let optical = args.grid.optical()?;
    let phase = args.grid.phase()?;
    match args.op {
        TransformOp::Radon => {
            let w = phase_input(&source, phase)?;
            let grid = radon_optical(&w, optical)?;
            let out = args.out.clone().unwrap_or_else(|| PathBuf::from("tomokit-radon.json"));
            write_optical(&grid, &out)?;
            println!(
                "radon {}: normalization defect {:.3e}, written to {}",
                source.label,
                grid.normalization_defect(),
                out.display()
            );
        }
        TransformOp::Iradon => {
            let grid = source.view.optical_grid(optical)?;
            let rec = inverse_radon_optical(&grid, phase)?;
            let out = args.out.clone().unwrap_or_else(|| PathBuf::from("tomokit-iradon.json"));
            write_wigner(&rec.wigner, &out)?;
            println!(
                "iradon {}: W(0,0) = {:.6e}, boundary |w| {:.3e}{}, written to {}",
                source.label,
                rec.wigner.sample(0.0, 0.0),
                rec.boundary_magnitude,
                if rec.boundary_warning { " (warning: tomogram not decayed at the X boundary)" } else { "" },
                out.display()
            );
        }
        TransformOp::Char => {
            let spec = PhaseGridSpec::square(args.char_extent, args.char_n)?;
            let values = characteristic_grid(&source.view, spec)?;
            let points: Vec<(f64, f64)> =
                (0..spec.n_q).flat_map(|i| (0..spec.n_p).map(move |j| (spec.q(i), spec.p(j)))).collect();
            let out = args.out.clone().unwrap_or_else(|| PathBuf::from("tomokit-char.csv"));
            fs::write(&out, format_characteristic(&points, &values))?;
            println!("char {}: {} points written to {}", source.label, points.len(), out.display());
        }
    }
    Ok(true)
}

const CHECK_NAMES: [&str; 7] = ["structural", "hirschman", "klm", "bochner", "overlap", "fixedpoint", "conservation"];

/// Optical-grid harmonic residuals of `g_1 .. g_mmax`.
fn conservation_check(source: &Source, args: &GridArgs, mmax: usize, tol: f64) -> Result<CheckReport> {
    let spec = args.optical()?;
    let w = source.view.optical_grid(spec)?;
    let mut worst: f64 = 0.0;
    let mut report_details = Vec::new();
    let mut truncated = Vec::new();
    for m in 1..=mmax {
        let g = moment_profile(&w, m);
        let fit = harmonic_residual(&g);
        worst = worst.max(fit.residual);
        report_details.push((format!("harmonic_residual_m{m}"), fit.residual));
        if g.truncation_warning {
            truncated.push(m);
        }
    }
    let mut report = CheckReport::new("conservation", worst, tol, Direction::AtMost).with_grid(describe_grid(&spec));
    for (k, v) in report_details {
        report = report.detail(k, v);
    }
    if !truncated.is_empty() {
        report = report.note(format!("moments {truncated:?} are truncated by the X range"));
    }
    Ok(report)
}

pub fn validate(args: &ValidateArgs) -> Result<bool> {
    let source = load(&args.state)?;
    let all = args.checks.iter().any(|c| c == "all");
    let selected: Vec<&str> = if all {
        CHECK_NAMES.to_vec()
    } else {
        let mut v = Vec::new();
        for c in &args.checks {
            let name = CHECK_NAMES
                .iter()
                .find(|n| **n == c.as_str())
                .ok_or_else(|| Error::InvalidParameter(format!("unknown check `{c}`")))?;
            if !v.contains(name) {
                v.push(*name);
            }
        }
        v
    };
    let optical = args.grid.optical()?;
    let phase = args.grid.phase()?;
    let positivity =
        PositivityConfig { n_sets: args.sets, set_size: args.set_size, seed: args.seed, radius: args.radius, tol: args.tol_positivity };
    if args.sets == 0 || args.set_size == 0 {
        return Err(Error::InvalidParameter("--sets and --set-size must be positive".into()));
    }
    let against: Vec<State> = if args.against.is_empty() {
        default_overlap_states()
    } else {
        args.against.iter().map(|s| s.parse()).collect::<Result<_>>()?
    };

    let mut report = RunReport::new("validate", source.label.clone());
    report.config("checks", &selected);
    report.config("seed", args.seed);
    report.config("sets", args.sets);
    report.config("set_size", args.set_size);
    report.config("radius", args.radius);
    report.config("against", against.iter().map(|s| s.name()).collect::<Vec<_>>());
    report.config(
        "tolerances",
        json!({
            "normalization": args.tol_normalization,
            "negativity": args.tol_negativity,
            "parity": args.tol_parity,
            "homogeneity": args.tol_homogeneity,
            "hirschman": args.tol_hirschman,
            "positivity": args.tol_positivity,
            "overlap": args.tol_overlap,
            "fixedpoint": args.tol_fixedpoint,
            "conservation": args.tol_conservation,
        }),
    );
    grid_config(&mut report, &args.grid)?;

    for check in &selected {
        match *check {
            "structural" => {
                let tol = StructuralTolerances {
                    normalization: args.tol_normalization,
                    negativity: args.tol_negativity,
                    parity: args.tol_parity,
                    homogeneity: args.tol_homogeneity,
                };
                report.checks.extend(check_structural(&source.view, source.kind, optical, tol)?);
            }
            "hirschman" => {
                let w = source.view.optical_grid(optical)?;
                let r = match check_hirschman(&w, args.tol_hirschman) {
                    Ok(r) => r,
                    Err(Error::NegativeDensity { theta, value }) => {
                        CheckReport::new("hirschman", f64::NEG_INFINITY, -args.tol_hirschman, Direction::AtLeast)
                            .with_grid(describe_grid(&optical))
                            .note(format!("entropy undefined: row theta={theta} has value {value:.3e}"))
                    }
                    Err(e) => return Err(e),
                };
                report.checks.push(r);
            }
            "klm" => report.checks.push(check_positivity(&source.view, PositivityMode::Quantum, positivity)),
            "bochner" => report.checks.push(check_positivity(&source.view, PositivityMode::Classical, positivity)),
            "overlap" => {
                let (w, warning) = reconstruct_wigner(&source.view, optical, phase)?;
                let mut r = check_overlap(&w, &against, args.tol_overlap)?;
                if warning {
                    r = r.note("tomogram not decayed at the X boundary; reconstruction may be truncated");
                }
                report.checks.push(r);
            }
            "fixedpoint" => {
                let cfg = FixedPointConfig { optical, phase, tol: args.tol_fixedpoint, ..Default::default() };
                report.checks.push(check_radon_fixed_point(&source.view, cfg)?);
            }
            "conservation" => {
                report.checks.push(conservation_check(&source, &args.grid, 4, args.tol_conservation)?);
            }
            _ => unreachable!("check names are validated above"),
        }
    }

    report.failing = report.checks.iter().filter(|c| !c.pass).map(|c| c.check.clone()).collect();
    let passed = |prefix: &str| report.checks.iter().filter(|c| group_of(&c.check) == prefix).all(|c| c.pass);
    report.pass = if all {
        let common = passed("structural") && passed("fixedpoint") && passed("conservation");
        let quantum = passed("hirschman") && passed("klm") && passed("overlap");
        let classical = passed("bochner");
        report.result("quantum_conditions_hold", quantum);
        report.result("classical_conditions_hold", classical);
        report.config(
            "verdict_rule",
            "structural, fixedpoint and conservation pass, and either the quantum group (hirschman, klm, overlap) or the classical group (bochner) passes",
        );
        common && (quantum || classical)
    } else {
        report.config("verdict_rule", "every selected check passes");
        report.failing.is_empty()
    };
    report.print_summary();
    println!("{} {}: {}", if report.pass { "PASS" } else { "FAIL" }, report.state, verdict_line(&report));
    report.write(&args.out)?;
    Ok(report.pass)
}

fn group_of(check: &str) -> &str {
    check.split('.').next().unwrap_or(check)
}

fn verdict_line(report: &RunReport) -> String {
    match (report.pass, report.failing.is_empty()) {
        (_, true) => "all selected checks pass".into(),
        (true, false) => format!("passes; alternative group fails: {}", report.failing.join(", ")),
        (false, false) => format!("failing checks: {}", report.failing.join(", ")),
    }
}

pub fn conserve(args: &ConserveArgs) -> Result<bool> {
    if args.mmax < 1 {
        return Err(Error::MomentOrder { min: 1, got: args.mmax });
    }
    let source = load(&args.state)?;
    let spec = args.grid.optical()?;
    let w = source.view.optical_grid(spec)?;
    let mut report = RunReport::new("conserve", source.label.clone());
    report.config("mmax", args.mmax);
    report.config("n_max", args.n_max);
    report.config("tolerance", args.tol);
    report.config("flux_c3", args.flux_c3);
    report.config("optical_grid", describe_grid(&spec));

    let mut csv = String::from("theta");
    let mut profiles = Vec::new();
    let mut moments = Vec::new();
    for m in 1..=args.mmax {
        csv.push_str(&format!(",g{m}"));
        let g = moment_profile(&w, m);
        let fit = harmonic_residual(&g);
        let ode = ode_residual(&g)?;
        let mut check = CheckReport::new(format!("conservation.m{m}"), fit.residual, args.tol, Direction::AtMost)
            .with_grid(describe_grid(&spec))
            .detail("ode_residual_l2", ode.l2);
        for h in fit.forbidden().filter(|h| h.k <= m + 4) {
            check = check.detail(format!("forbidden_cos{}", h.k), h.cos).detail(format!("forbidden_sin{}", h.k), h.sin);
        }
        if g.truncation_warning {
            check = check.note("moment truncated by the X range");
        }
        if ode.noisy {
            check = check.note("high-frequency content above 10%: spectral derivatives are noise dominated");
        }
        report.checks.push(check);
        moments.push(json!({
            "order": m,
            "harmonics": fit.harmonics,
            "residual": fit.residual,
            "ode_residual_l2": ode.l2,
            "truncation_warning": g.truncation_warning,
            "noisy": ode.noisy,
        }));
        profiles.push(g);
    }
    csv.push('\n');
    for (j, theta) in spec.thetas().iter().enumerate() {
        csv.push_str(&format!("{theta:e}"));
        for g in &profiles {
            csv.push_str(&format!(",{:e}", g.values[j]));
        }
        csv.push('\n');
    }
    report.result("moments", moments);

    if let Some(c3) = args.flux_c3 {
        let flux = normalization_flux_cubic(&w, c3);
        let summary = summarize_flux(&flux);
        report.checks.push(
            CheckReport::new("conservation.flux", summary.max_abs, args.tol, Direction::AtMost)
                .with_grid(describe_grid(&spec))
                .detail("coupling", c3)
                .detail("theta_integral", summary.integral)
                .detail("abs_theta_integral", summary.abs_integral),
        );
        report.result("flux", json!({ "theta": spec.thetas(), "values": flux, "summary": summary }));
    }

    let mut symplectic = Vec::new();
    let panel = default_moment_panel();
    for m in 1..=args.mmax {
        match symplectic_moment_residual(&source.view, m, &panel) {
            Ok(fit) => symplectic.push(json!({ "order": m, "coefficients": fit.coefficients, "residual": fit.residual })),
            Err(e) => symplectic.push(json!({ "order": m, "error": e.to_string() })),
        }
    }
    report.result("symplectic_moments", symplectic);

    match hermite_class_projection(&w, args.n_max) {
        Ok(p) => {
            let diag: Vec<f64> = (0..p.rho.dim()).map(|n| p.rho.get(n, n).re).collect();
            report.result(
                "hermite_projection",
                json!({
                    "n_max": args.n_max,
                    "residual": p.residual,
                    "trace": p.rho.trace(),
                    "diagonal": diag,
                    "condition": p.condition,
                    "ill_conditioned": p.ill_conditioned,
                }),
            );
        }
        Err(e) => report.result("hermite_projection", json!({ "error": e.to_string() })),
    }

    let csv_path = sibling(&args.out, "moments.csv");
    fs::write(&csv_path, csv)?;
    report.artifact(&csv_path);
    report.finish_all();
    report.print_summary();
    report.write(&args.out)?;
    Ok(report.pass)
}

pub fn evolve(args: &EvolveArgs) -> Result<bool> {
    let v: PolynomialPotential = args.potential.parse()?;
    if !(args.t_end >= 0.0 && args.t_end.is_finite()) {
        return Err(Error::InvalidParameter(format!("--t must be a non-negative real, got {}", args.t_end)));
    }
    let source = load(&args.state)?;
    let optical = args.grid.optical()?;
    let phase = args.grid.phase()?;
    let mut report = RunReport::new("evolve", source.label.clone());
    report.config("potential", v.to_string());
    report.config("t", args.t_end);
    report.config("dt", args.dt);
    report.config("tolerance", args.tol);
    let method = match args.method {
        EvolveMethod::Drift => "drift",
        EvolveMethod::Fock => "fock",
        EvolveMethod::Liouville => "liouville",
        EvolveMethod::Moyal => "moyal",
        EvolveMethod::Harmonic => "harmonic",
    };
    report.config("method", method);
    grid_config(&mut report, &args.grid)?;
    let trace_path = sibling(&args.out, "trace.csv");

    match args.method {
        EvolveMethod::Drift => {
            let drift = drift_experiment(&args.state, &v, args.t_end, optical)?;
            if let Some(trace) = &drift.trace {
                fs::write(&trace_path, trace.to_csv())?;
                report.artifact(&trace_path);
                report.checks.push(
                    CheckReport::new("normalization", drift.max_normalization_defect(), args.tol, Direction::AtMost)
                        .with_grid(describe_grid(&optical))
                        .detail("checkpoints", drift.checkpoint_times.len() as f64),
                );
            }
            if let Some(summary) = drift.flux_summary {
                let mut flux = CheckReport::new("flux", summary.max_abs, args.tol, Direction::AtMost)
                    .with_grid(describe_grid(&optical))
                    .detail("theta_integral", summary.integral)
                    .detail("abs_theta_integral", summary.abs_integral);
                if drift.mode == "fock" {
                    flux = flux.note("Hermite-class state: flux shown for comparison");
                }
                report.checks.push(flux);
            }
            for note in &drift.notes {
                println!("NOTE {}: {note}", report.state);
            }
            report.result("drift", &drift);
        }
        EvolveMethod::Fock => {
            let state = source
                .state
                .ok_or_else(|| Error::InvalidParameter("--method fock needs a catalog state".into()))?;
            let rho = state.fock_matrix(args.n_max).ok_or_else(|| {
                Error::InvalidParameter(format!("{} is not in the Hermite class", state.name()))
            })?;
            let (rho_t, trace) = evolve_fock(&rho, &v, args.t_end, args.dt)?;
            fs::write(&trace_path, trace.to_csv())?;
            report.artifact(&trace_path);
            let mut check = CheckReport::new("trace", trace.mass_drift(), args.tol, Direction::AtMost)
                .detail("max_leakage", trace.max_leakage)
                .detail("min_eigenvalue_final", rho_t.min_eigenvalue());
            if trace.leakage_warning {
                check = check.note(format!("Fock cutoff {} leaks {:.1e} of [H, rho]", args.n_max, trace.max_leakage));
            }
            report.checks.push(check);
        }
        EvolveMethod::Liouville | EvolveMethod::Moyal => {
            let w0 = phase_input(&source, phase)?;
            let (w, trace) = if args.method == EvolveMethod::Liouville {
                evolve_liouville(&w0, &v, args.t_end, args.dt)?
            } else {
                evolve_moyal(&w0, &v, args.t_end, args.dt)?
            };
            fs::write(&trace_path, trace.to_csv())?;
            report.artifact(&trace_path);
            let grid_path = sibling(&args.out, "wigner.json");
            write_wigner(&w, &grid_path)?;
            report.artifact(&grid_path);
            let mut check = CheckReport::new("mass", trace.mass_drift(), args.tol, Direction::AtMost)
                .with_grid(tomokit::validation::describe_phase_grid(&phase))
                .detail("steps", (trace.times.len() - 1) as f64)
                .detail("boundary_mass", trace.max_leakage);
            if trace.leakage_warning {
                check = check.note("mass reached the phase-grid boundary");
            }
            report.checks.push(check);
        }
        EvolveMethod::Harmonic => {
            let w0 = source.view.optical_grid(optical)?;
            let w = evolve_harmonic_tomogram(&w0, args.t_end);
            let grid_path = sibling(&args.out, "optical.json");
            write_optical(&w, &grid_path)?;
            report.artifact(&grid_path);
            let drift = (w.normalization_defect() - w0.normalization_defect()).abs();
            report.checks.push(
                CheckReport::new("normalization", drift, args.tol, Direction::AtMost).with_grid(describe_grid(&optical)),
            );
        }
    }
    report.finish_all();
    report.print_summary();
    report.write(&args.out)?;
    Ok(report.pass)
}

pub fn merge(inputs: &[PathBuf], out: &Path) -> Result<bool> {
    let reports: Vec<RunReport> = inputs.iter().map(|p| RunReport::read(p)).collect::<Result<_>>()?;
    let pass = reports.iter().all(|r| r.pass);
    let failing: Vec<String> =
        reports.iter().flat_map(|r| r.failing.iter().map(move |c| format!("{}:{}", r.state, c))).collect();
    let merged = json!({
        "command": "report",
        "pass": pass,
        "failing": failing,
        "reports": reports,
    });
    fs::write(out, serde_json::to_string_pretty(&merged)? + "\n")?;
    for r in &reports {
        println!("{} {} {}", if r.pass { "PASS" } else { "FAIL" }, r.command, r.state);
    }
    Ok(pass)
}
