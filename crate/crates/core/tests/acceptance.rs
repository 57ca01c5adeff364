//! Acceptance suite. Each test prints one `[PASS]`/`[FAIL]` line.
//! Run with `cargo test --test acceptance -- --nocapture --test-threads=1`.

use std::time::{Duration, Instant};

use coherent_rx::experiments::*;
use coherent_rx::sim::summarize_log;
use coherent_rx::solver::ROOT_TOL;
use coherent_rx::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(id: &str, what: &str, elapsed: Duration, failures: &[String]) {
    let status = if failures.is_empty() { "PASS" } else { "FAIL" };
    println!("\n[{status}] {id} {what} ({:.3} s)", elapsed.as_secs_f64());
    for f in failures {
        println!("        {f}");
    }
    assert!(failures.is_empty(), "{id} failed: {failures:?}");
}

fn check(failures: &mut Vec<String>, ok: bool, msg: impl FnOnce() -> String) {
    if !ok {
        failures.push(msg());
    }
}

fn grid() -> Vec<f64> {
    linspace(0.01, 2.0, 81)
}

fn problem(alpha2: f64) -> DiscriminationProblem {
    DiscriminationProblem::from_mean_photons(alpha2).unwrap()
}

fn time_limit(f: &mut Vec<String>, start: Instant, secs: f64) -> Duration {
    let elapsed = start.elapsed();
    check(f, elapsed.as_secs_f64() < secs, || format!("runtime {elapsed:?} exceeds {secs} s"));
    elapsed
}

#[test]
fn ac1_analytic_identities() {
    let start = Instant::now();
    let mut f = Vec::new();
    let ideal = DetectorModel::ideal();
    let det = DetectorModel::new(0.55, 0.01, 0.996).unwrap();
    for a2 in grid() {
        let p = problem(a2);
        let s = DisplacementSetup::new(1.0, p.alpha()).unwrap();
        let d = displacement_error(&p, &ideal, &s).unwrap().value();
        let k = kennedy_error(&p).unwrap().value();
        check(&mut f, (d - k).abs() <= 1e-12, || format!("Kennedy reduction at {a2}: {d} vs {k}"));
        for (model, setup) in [(ideal, s), (det, DisplacementSetup::new(0.98, 0.9).unwrap())] {
            let (cp, cm) = click_probabilities(&p, &model, &setup).unwrap();
            let direct = displacement_error(&p, &model, &setup).unwrap().value();
            let r = 0.5 * (1.0 - cp) + 0.5 * cm;
            check(&mut f, (r - direct).abs() <= 1e-12, || format!("recombination at {a2}: {r} vs {direct}"));
        }
    }
    let t = time_limit(&mut f, start, 1.0);
    report("AC1", "analytic identities on 81-point grid", t, &f);
}

#[test]
fn ac2_receiver_ordering() {
    let start = Instant::now();
    let mut f = Vec::new();
    let r = amplitude_sweep(&grid(), &DetectorModel::ideal(), &HomodyneModel::ideal(), &AmplitudeSweep::analytic(&Receiver::ALL)).unwrap();
    let s = |n: &str| r.series(n).unwrap().values.clone();
    let (m, k, h, o) = (s("helstrom"), s("kennedy"), s("homodyne"), s("opt_displacement"));
    for (i, a2) in r.axis_values.iter().enumerate() {
        check(&mut f, m[i] <= o[i] && o[i] <= k[i].min(h[i]), || {
            format!("ordering at {a2}: M {} opt {} K {} H {}", m[i], o[i], k[i], h[i])
        });
        check(&mut f, o[i] < h[i], || format!("opt not strictly below homodyne at {a2}"));
    }
    let t = time_limit(&mut f, start, 1.0);
    report("AC2", "p_M <= p_opt <= min(p_K, p_H), p_opt < p_H", t, &f);
}

#[test]
fn ac3_displacement_sweep_structure() {
    let start = Instant::now();
    let mut f = Vec::new();
    let p = problem(0.16);
    let grid = linspace(0.0, 1.0, 101);
    let r = beta_sweep(&p, &DetectorModel::ideal(), TransmittancePolicy::Fixed { transmittance: 1.0 }, &grid, None).unwrap();
    let a = &r.annotations;
    let mut near = |name: &str, value: f64, target: f64, tol: f64| {
        check(&mut f, (value - target).abs() <= tol, || format!("{name} = {value}, expected {target} ± {tol}"));
    };
    near("grid minimum beta2", a["grid_min_beta2"], 0.56, 0.02);
    near("grid minimum error", a["grid_min_error"], 0.1908, 0.0005);
    near("optimum beta2", a["optimum_beta2"], 0.56, 0.02);
    near("optimum error", a["optimum_error"], 0.1908, 0.0005);
    near("Kennedy", a["kennedy_error"], 0.2637, 0.0005);
    near("homodyne", a["homodyne_error"], 0.2119, 0.0005);
    near("Helstrom", a["helstrom_error"], 0.1562, 0.0005);
    check(&mut f, a["grid_min_error"] < a["homodyne_error"] && a["homodyne_error"] < a["kennedy_error"], || {
        "ordering minimum < homodyne < Kennedy violated".into()
    });
    check(&mut f, r.warnings.is_empty(), || format!("warnings: {:?}", r.warnings));
    let t = time_limit(&mut f, start, 1.0);
    report("AC3", "displacement sweep at |alpha|^2 = 0.16", t, &f);
}

#[test]
fn ac4_solver() {
    let start = Instant::now();
    let mut f = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let err = |p: &DiscriminationProblem, d: &DetectorModel, t: f64, b: f64| {
        displacement_error(p, d, &DisplacementSetup::new(t, b).unwrap()).unwrap().value()
    };
    for _ in 0..200 {
        let (eta, xi, t, alpha) = (
            rng.random_range(0.3..=1.0),
            rng.random_range(0.9..=1.0),
            rng.random_range(0.9..=1.0),
            rng.random_range(0.05..=2.0),
        );
        let p = DiscriminationProblem::new(alpha).unwrap();
        let det = DetectorModel::new(eta, 0.0, xi).unwrap();
        match optimal_beta(&p, &det, t) {
            Ok(r) => {
                check(&mut f, r.residual <= ROOT_TOL, || format!("residual {} at {alpha}", r.residual));
                let c = err(&p, &det, t, r.root);
                let ok = c <= err(&p, &det, t, r.root * (1.0 - 1e-3)) && c <= err(&p, &det, t, r.root * (1.0 + 1e-3));
                check(&mut f, ok, || format!("not a minimizer: eta {eta} xi {xi} T {t} alpha {alpha}"));
            }
            Err(e) => f.push(format!("solver failed: {e}")),
        }
    }
    let ideal = DetectorModel::ideal();
    let small = optimal_beta(&DiscriminationProblem::new(1e-4).unwrap(), &ideal, 1.0).unwrap().root;
    check(&mut f, (small - 0.5f64.sqrt()).abs() <= 1e-4, || format!("small-alpha limit {small}"));
    let large = optimal_beta(&DiscriminationProblem::new(3.0).unwrap(), &ideal, 1.0).unwrap().root;
    check(&mut f, (large - 3.0).abs() <= 1e-6, || format!("large-alpha limit {large}"));
    let t = time_limit(&mut f, start, 1.0);
    report("AC4", "optimal displacement solver", t, &f);
}

#[test]
fn ac5_monte_carlo_oracles() {
    let start = Instant::now();
    let mut f = Vec::new();
    let p = problem(0.16);
    let trials = 1_000_000;
    let opts = SimOptions::default();
    let mut agree = |name: &str, e: ErrorEstimate, analytic: f64| {
        check(&mut f, e.agrees_with(analytic, 4.0), || {
            format!("{name}: p_hat {} vs {analytic} (std_err {})", e.p_hat, e.std_err)
        });
    };

    let ideal = DetectorModel::ideal();
    let kennedy = simulate_apd_sequence(&p, &ideal, &DisplacementSetup::displacement(p.alpha()).unwrap(), trials, 101, &opts).unwrap();
    agree("Kennedy", kennedy, kennedy_error(&p).unwrap().value());

    let homodyne = simulate_homodyne_sequence(&p, &HomodyneModel::ideal(), trials, 202, &opts).unwrap();
    agree("homodyne", homodyne, homodyne_error(&p).unwrap().value());

    let det = DetectorModel::new(0.55, 0.0, 0.996).unwrap();
    let setup = DisplacementPolicy::FixedGamma { gamma: 24.7f64.sqrt() }.resolve(&p, &det).unwrap();
    let imperfect = simulate_apd_sequence(&p, &det, &setup, trials, 303, &opts).unwrap();
    agree("imperfect displacement", imperfect, displacement_error(&p, &det, &setup).unwrap().value());

    let t = time_limit(&mut f, start, 30.0);
    report("AC5", "Monte Carlo agrees with analytic within 4 sigma (1e6 trials)", t, &f);
}

#[test]
fn ac6_determinism() {
    let start = Instant::now();
    let mut f = Vec::new();
    let p = problem(0.16);
    let det = DetectorModel::new(0.55, 0.0, 0.996).unwrap();
    let setup = DisplacementPolicy::FixedGamma { gamma: 24.7f64.sqrt() }.resolve(&p, &det).unwrap();
    let hd = HomodyneModel::new(0.858, 0.005).unwrap();
    let run = |w: usize| {
        let opts = SimOptions::with_workers(w);
        let log = generate_pulse_log(&p, &det, &setup, &hd, 300_000, 2024, &opts).unwrap();
        let mut csv = Vec::new();
        coherent_rx::output::write_pulse_log_csv(&log, &mut csv).unwrap();
        let apd = simulate_apd_sequence(&p, &det, &setup, 300_000, 2024, &opts).unwrap();
        let homodyne = simulate_homodyne_sequence(&p, &hd, 300_000, 2024, &opts).unwrap();
        (csv, summarize_log(&log).unwrap(), apd, homodyne)
    };
    let reference = run(1);
    check(&mut f, reference.1 == (reference.2, reference.3), || "log summary differs from sequence estimates".into());
    for w in [4, 8] {
        let other = run(w);
        check(&mut f, other.0 == reference.0, || format!("pulse log differs with {w} workers"));
        check(&mut f, other.2 == reference.2 && other.3 == reference.3, || format!("estimates differ with {w} workers"));
    }
    let t = time_limit(&mut f, start, 30.0);
    report("AC6", "byte-identical logs with 1, 4 and 8 workers", t, &f);
}

#[test]
fn ac7_crossover() {
    let start = Instant::now();
    let mut f = Vec::new();
    match crossover_find(Receiver::Kennedy, Receiver::Homodyne, (0.01, 2.0), CROSSOVER_TOL) {
        Ok(x) => {
            check(&mut f, 0.30 < x && x < 0.45, || format!("crossover {x} outside (0.30, 0.45)"));
            check(&mut f, (x - 0.384_099_278_395_414_91).abs() <= 1e-6, || format!("crossover {x} off oracle"));
            let below = x - 0.05;
            check(&mut f, ideal_error(Receiver::Homodyne, below).unwrap() < ideal_error(Receiver::Kennedy, below).unwrap(), || {
                "homodyne does not win below the crossover".into()
            });
        }
        Err(e) => f.push(e.to_string()),
    }
    report("AC7", "Kennedy/homodyne crossover", start.elapsed(), &f);
}

#[test]
fn ac8_imperfect_model_curves() {
    let start = Instant::now();
    let mut f = Vec::new();
    let det = DetectorModel::new(0.55, 0.0, 0.996).unwrap();
    let hd = HomodyneModel::new(0.858, 0.005).unwrap();
    let policy = DisplacementPolicy::FixedGamma { gamma: 24.7f64.sqrt() };
    let receivers = [Receiver::Kennedy, Receiver::Homodyne, Receiver::OptDisplacement];
    let mut grid = vec![0.0, 0.16];
    grid.extend(linspace(0.05, 2.0, 40));
    let ideal_spec = AmplitudeSweep::analytic(&receivers);
    let ideal = amplitude_sweep(&grid, &DetectorModel::ideal(), &HomodyneModel::ideal(), &ideal_spec).unwrap();

    for mode in [AmplitudeMode::Ideal, AmplitudeMode::Corrected] {
        let spec = AmplitudeSweep { mode, policy, ..AmplitudeSweep::analytic(&receivers) };
        let r = amplitude_sweep(&grid, &det, &hd, &spec).unwrap();
        for rx in receivers {
            let (a, b) = (&r.series(rx.label()).unwrap().values, &ideal.series(rx.label()).unwrap().values);
            for (i, x) in grid.iter().enumerate() {
                let ok = if *x > 0.0 { a[i] > b[i] } else { a[i] >= b[i] };
                check(&mut f, ok, || format!("{mode:?} {rx} at {x}: imperfect {} vs ideal {}", a[i], b[i]));
            }
        }
        if mode == AmplitudeMode::Corrected {
            let at = |name: &str| r.series(name).unwrap().values[1];
            let (o, h, k) = (at("opt_displacement"), at("homodyne"), at("kennedy"));
            let helstrom = ideal_error(Receiver::Helstrom, 0.16).unwrap();
            check(&mut f, helstrom < o && o < h && h < k, || {
                format!("ordering at 0.16: M {helstrom} opt {o} H {h} K {k}")
            });
        }
    }
    report("AC8", "imperfect-model curves above ideal, ordering kept at 0.16", start.elapsed(), &f);
}
