use approx::assert_relative_eq;

use cqec::experiments::{
    run_fidelity_curve, sweep_scaling, sweep_surface, uncorrected_baseline, SimulationConfig,
};
use cqec::lindblad::{integrate, DissipatorTerm, IntegrationOptions, MasterEquationSpec};
use cqec::operator::{pauli_string, DensityMatrix, StateVector};
use cqec::Error;

#[test]
fn halving_the_step_changes_final_fidelity_below_1e_8() {
    let coarse = SimulationConfig::new(0.05, 100.0);
    let default_step = 0.1 / 250.0;
    let fine = SimulationConfig {
        step_hint: Some(default_step / 2.0),
        ..coarse.clone()
    };
    let a = run_fidelity_curve(&coarse).unwrap().trace.final_value();
    let b = run_fidelity_curve(&fine).unwrap().trace.final_value();
    assert!((a - b).abs() < 1e-8, "{a} vs {b}");
}

#[test]
fn ancilla_errors_are_dominated_by_cooling() {
    let off = SimulationConfig::new(0.05, 100.0);
    let on = SimulationConfig {
        errors_on_ancillas: true,
        ..off.clone()
    };
    let f_off = run_fidelity_curve(&off).unwrap().trace.final_value();
    let f_on = run_fidelity_curve(&on).unwrap().trace.final_value();
    assert!((f_off - f_on).abs() < 2e-2, "{f_off} vs {f_on}");
    assert!(f_on <= f_off);
}

#[test]
fn single_qubit_flip_channel_matches_closed_form() {
    let gamma = 0.05;
    let spec = MasterEquationSpec::dissipative(
        1,
        vec![DissipatorTerm::new(gamma, pauli_string("X").unwrap()).unwrap()],
    )
    .unwrap();
    let rho0 = DensityMatrix::from_pure(&StateVector::basis("0").unwrap());
    let rec = integrate(
        &spec,
        &rho0,
        10.0,
        |_, rho| rho.matrix()[(0, 0)].re,
        IntegrationOptions::default(),
    )
    .unwrap();
    assert_eq!(rec.times.len(), 1001);
    let expected = uncorrected_baseline(gamma, &rec.times);
    for (f, e) in rec.samples.iter().zip(&expected.fidelity) {
        assert_relative_eq!(*f, *e, epsilon = 1e-10);
    }
    assert_relative_eq!(*rec.samples.last().unwrap(), 0.683940, epsilon = 1e-6);
}

#[test]
fn corrected_curve_starts_at_one_and_stays_physical() {
    let cfg = SimulationConfig {
        horizon: 1.0,
        ..SimulationConfig::new(0.2, 50.0)
    };
    let run = run_fidelity_curve(&cfg).unwrap();
    assert_eq!(run.trace.fidelity[0], 1.0);
    assert!(run
        .trace
        .fidelity
        .iter()
        .all(|f| (0.0..=1.0 + 1e-12).contains(f)));
    assert!(run.conservation.max_trace_drift < 1e-9);
}

#[test]
fn sweeps_keep_grid_order() {
    let base = SimulationConfig {
        horizon: 0.2,
        output_points: 10,
        ..SimulationConfig::default()
    };
    let sweeps = sweep_scaling(&[20.0, 10.0], &[0.5, 1.0, 3.0], &base).unwrap();
    assert_eq!(sweeps.len(), 2);
    assert_eq!(sweeps[0].kappa, 20.0);
    assert_eq!(sweeps[1].kappa, 10.0);
    for sweep in &sweeps {
        let s: Vec<f64> = sweep.rows.iter().map(|r| r.s).collect();
        assert_eq!(s, vec![0.5, 1.0, 3.0]);
        for r in &sweep.rows {
            assert_relative_eq!(r.lambda, r.s * sweep.kappa);
        }
    }
    assert!(matches!(
        sweep_scaling(&[10.0], &[1.0, 0.5], &base),
        Err(Error::InvalidParameter(_))
    ));

    let surface = sweep_surface(&[0.1, 0.4], &[10.0, 20.0, 40.0], &base).unwrap();
    assert_eq!(surface.fidelity.len(), 2);
    assert!(surface.fidelity.iter().all(|row| row.len() == 3));
    // Stronger errors never help at fixed kappa.
    for j in 0..3 {
        assert!(surface.fidelity[1][j] < surface.fidelity[0][j]);
    }
}

#[test]
fn oversized_step_is_reported_as_divergence() {
    let cfg = SimulationConfig {
        step_hint: Some(1.0),
        ..SimulationConfig::new(0.05, 100.0)
    };
    assert!(matches!(
        run_fidelity_curve(&cfg),
        Err(Error::IntegrationDiverged { .. })
    ));
}
