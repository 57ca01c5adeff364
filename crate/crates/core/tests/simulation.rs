use coherent_rx::sim::summarize_log;
use coherent_rx::*;

fn problem(alpha2: f64) -> DiscriminationProblem {
    DiscriminationProblem::from_mean_photons(alpha2).unwrap()
}

#[test]
fn kennedy_and_homodyne_match_analytic() {
    let p = problem(0.16);
    let det = DetectorModel::ideal();
    let setup = DisplacementSetup::displacement(0.4).unwrap();
    let opts = SimOptions::default();
    let apd = simulate_apd_sequence(&p, &det, &setup, 200_000, 11, &opts).unwrap();
    assert!(apd.agrees_with(kennedy_error(&p).unwrap().value(), 4.0), "{apd:?}");
    let hd = simulate_homodyne_sequence(&p, &HomodyneModel::ideal(), 200_000, 12, &opts).unwrap();
    assert!(hd.agrees_with(homodyne_error(&p).unwrap().value(), 4.0), "{hd:?}");
}

#[test]
fn imperfect_models_match_analytic() {
    let p = problem(0.5);
    let det = DetectorModel::new(0.55, 0.02, 0.99).unwrap();
    let setup = DisplacementSetup::new(0.97, 0.8).unwrap();
    let opts = SimOptions::default();
    let apd = simulate_apd_sequence(&p, &det, &setup, 200_000, 3, &opts).unwrap();
    assert!(apd.agrees_with(displacement_error(&p, &det, &setup).unwrap().value(), 4.0));
    let model = HomodyneModel::new(0.858, 0.005).unwrap();
    let hd = simulate_homodyne_sequence(&p, &model, 200_000, 4, &opts).unwrap();
    assert!(hd.agrees_with(homodyne_error_with(&p, &model).unwrap().value(), 4.0));
}

#[test]
fn homodyne_efficiency_is_an_amplitude_rescaling() {
    // η_HD·|α|² at unit efficiency (no excess noise) is the same experiment.
    let model = HomodyneModel::new(0.858, 0.0).unwrap();
    let direct = homodyne_error_with(&problem(0.16), &model).unwrap().value();
    let rescaled = homodyne_error(&problem(0.858 * 0.16)).unwrap().value();
    assert!((direct - rescaled).abs() < 1e-15);
}

#[test]
fn pulse_log_aggregates_to_sequence_estimates() {
    let p = problem(0.3);
    let det = DetectorModel::new(0.6, 0.01, 0.99).unwrap();
    let setup = DisplacementSetup::new(0.98, 0.7).unwrap();
    let model = HomodyneModel::new(0.9, 0.01).unwrap();
    let opts = SimOptions { chunk_size: 1000, workers: Some(3) };
    let log = generate_pulse_log(&p, &det, &setup, &model, 12_345, 99, &opts).unwrap();
    assert_eq!(log.len(), 12_345);
    for (i, r) in log.iter().enumerate() {
        assert_eq!(r.trial, i as u64);
        assert_eq!(r.decision_apd, coherent_rx::sim::decide_apd(r.apd_counts));
        assert_eq!(r.decision_homodyne, coherent_rx::sim::decide_homodyne(r.quadrature));
    }
    let (apd, hd) = summarize_log(&log).unwrap();
    assert_eq!(apd, simulate_apd_sequence(&p, &det, &setup, 12_345, 99, &opts).unwrap());
    assert_eq!(hd, simulate_homodyne_sequence(&p, &model, 12_345, 99, &opts).unwrap());
}

#[test]
fn results_independent_of_worker_count() {
    let p = problem(0.16);
    let det = DetectorModel::new(0.55, 0.0, 0.996).unwrap();
    let setup = DisplacementSetup::new(0.97, 0.75).unwrap();
    let model = HomodyneModel::new(0.858, 0.005).unwrap();
    let run = |w| {
        let opts = SimOptions { chunk_size: 4096, workers: Some(w) };
        generate_pulse_log(&p, &det, &setup, &model, 50_000, 7, &opts).unwrap()
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(one, run(8));
    assert_ne!(one, {
        let opts = SimOptions { chunk_size: 4096, workers: Some(1) };
        generate_pulse_log(&p, &det, &setup, &model, 50_000, 8, &opts).unwrap()
    });
}

#[test]
fn photon_counts_have_poisson_mean() {
    let p = problem(0.5);
    let det = DetectorModel::new(0.8, 0.05, 1.0).unwrap();
    let setup = DisplacementSetup::displacement(0.5f64.sqrt()).unwrap();
    let log = generate_pulse_log(&p, &det, &setup, &HomodyneModel::ideal(), 100_000, 5, &SimOptions::default()).unwrap();
    let (plus, minus) = coherent_rx::receivers::mean_photons_at_detector(&p, &det, &setup);
    for (h, n) in [(coherent_rx::sim::Hypothesis::Plus, plus), (coherent_rx::sim::Hypothesis::Minus, minus)] {
        let mean = 0.05 + 0.8 * n;
        let counts: Vec<u64> = log.iter().filter(|r| r.hypothesis == h).map(|r| r.apd_counts).collect();
        let m = counts.iter().sum::<u64>() as f64 / counts.len() as f64;
        let se = (mean / counts.len() as f64).sqrt();
        assert!((m - mean).abs() < 5.0 * se, "{h:?}: {m} vs {mean}");
    }
    let plus_share = log.iter().filter(|r| r.hypothesis == coherent_rx::sim::Hypothesis::Plus).count() as f64 / 1e5;
    assert!((plus_share - 0.5).abs() < 5.0 * (0.25f64 / 1e5).sqrt());
}

#[test]
fn vacuum_and_zero_trials() {
    let p = problem(0.0);
    let det = DetectorModel::ideal();
    let setup = DisplacementSetup::displacement(0.0).unwrap();
    let log = generate_pulse_log(&p, &det, &setup, &HomodyneModel::ideal(), 1000, 1, &SimOptions::default()).unwrap();
    assert!(log.iter().all(|r| r.apd_counts == 0));
    assert!(generate_pulse_log(&p, &det, &setup, &HomodyneModel::ideal(), 0, 1, &SimOptions::default())
        .unwrap()
        .is_empty());
    assert!(simulate_apd_sequence(&p, &det, &setup, 0, 1, &SimOptions::default()).is_err());
    assert!(summarize_log(&[]).is_err());
}
