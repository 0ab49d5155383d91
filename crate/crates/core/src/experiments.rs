//! Parameter studies over the bit-flip model: fidelity curves, the cooling
//! scaling sweep, the (gamma, kappa) surface and the uncorrected baseline.

use rayon::prelude::*;

use crate::bitflip::{build_model, fidelity, initial_state, LogicalState};
use crate::error::{Error, Result};
use crate::lindblad::{integrate, ConservationStats, IntegrationOptions, DEFAULT_OUTPUT_POINTS};

pub const DEFAULT_GAMMA: f64 = 0.05;
pub const DEFAULT_KAPPA: f64 = 100.0;
pub const DEFAULT_HORIZON: f64 = 10.0;
/// Cooling rate as a multiple of the Hamiltonian strength, `lambda = 2.5 kappa`.
pub const DEFAULT_COOLING_SCALE: f64 = 2.5;

/// Fidelity differences below this are treated as ties in monotonicity checks.
pub const MONOTONE_TOL: f64 = 1e-3;

/// `start, start + step, ...` up to and including `stop` (within rounding).
pub fn uniform_grid(start: f64, step: f64, stop: f64) -> Vec<f64> {
    if step <= 0.0 || stop < start {
        return vec![start];
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| start + step * i as f64).collect()
}

pub fn default_s_grid() -> Vec<f64> {
    uniform_grid(0.5, 0.25, 5.0)
}

pub fn default_kappa_list() -> Vec<f64> {
    vec![25.0, 50.0, 100.0, 200.0]
}

pub fn default_gamma_grid() -> Vec<f64> {
    uniform_grid(0.05, 0.05, 0.8)
}

pub fn default_kappa_grid() -> Vec<f64> {
    vec![25.0, 50.0, 100.0, 200.0, 400.0]
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationConfig {
    pub gamma: f64,
    pub kappa: f64,
    pub lambda: f64,
    pub horizon: f64,
    pub psi0: LogicalState,
    pub errors_on_ancillas: bool,
    pub step_hint: Option<f64>,
    pub output_points: usize,
}

impl SimulationConfig {
    /// `lambda = 2.5 kappa`, horizon 10, initial state `|000>`.
    pub fn new(gamma: f64, kappa: f64) -> Self {
        Self::with_lambda(gamma, kappa, DEFAULT_COOLING_SCALE * kappa)
    }

    pub fn with_lambda(gamma: f64, kappa: f64, lambda: f64) -> Self {
        Self {
            gamma,
            kappa,
            lambda,
            horizon: DEFAULT_HORIZON,
            psi0: LogicalState::zero(),
            errors_on_ancillas: false,
            step_hint: None,
            output_points: DEFAULT_OUTPUT_POINTS,
        }
    }

    fn options(&self) -> IntegrationOptions {
        IntegrationOptions {
            step_hint: self.step_hint,
            output_points: self.output_points,
        }
    }
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self::new(DEFAULT_GAMMA, DEFAULT_KAPPA)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FidelityTrace {
    pub times: Vec<f64>,
    pub fidelity: Vec<f64>,
}

impl FidelityTrace {
    pub fn final_value(&self) -> f64 {
        *self.fidelity.last().expect("trace is nonempty")
    }
}

#[derive(Clone, Debug)]
pub struct CurveRun {
    pub config: SimulationConfig,
    pub trace: FidelityTrace,
    pub conservation: ConservationStats,
}

/// Integrate the corrected model from `encode(psi0) (x) |00>` and record the
/// code-qubit fidelity on the output grid.
pub fn run_fidelity_curve(config: &SimulationConfig) -> Result<CurveRun> {
    let spec = build_model(
        config.gamma,
        config.kappa,
        config.lambda,
        config.errors_on_ancillas,
    )?;
    let rho0 = initial_state(&config.psi0);
    let psi = config.psi0;
    let record = integrate(
        &spec,
        &rho0,
        config.horizon,
        |_, rho| fidelity(rho, &psi),
        config.options(),
    )?;
    let fidelity = record.samples.into_iter().collect::<Result<Vec<f64>>>()?;
    Ok(CurveRun {
        config: config.clone(),
        trace: FidelityTrace {
            times: record.times,
            fidelity,
        },
        conservation: record.conservation,
    })
}

/// `F(t) = (1 + exp(-2 gamma t)) / 2` for one unprotected qubit.
pub fn uncorrected_baseline(gamma: f64, times: &[f64]) -> FidelityTrace {
    FidelityTrace {
        times: times.to_vec(),
        fidelity: times
            .iter()
            .map(|t| 0.5 * (1.0 + (-2.0 * gamma * t).exp()))
            .collect(),
    }
}

/// Largest shortfall of the corrected curve below the baseline.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransientDip {
    pub depth: f64,
    pub time: f64,
}

/// `max_t (baseline - corrected)` over the shared grid, restricted to
/// `t <= until`. A non-positive depth means the corrected curve never dips.
pub fn transient_dip(
    corrected: &FidelityTrace,
    baseline: &FidelityTrace,
    until: f64,
) -> TransientDip {
    corrected
        .times
        .iter()
        .zip(corrected.fidelity.iter().zip(&baseline.fidelity))
        .filter(|(t, _)| **t <= until)
        .map(|(t, (c, b))| TransientDip {
            depth: b - c,
            time: *t,
        })
        .fold(
            TransientDip {
                depth: f64::NEG_INFINITY,
                time: 0.0,
            },
            |best, d| if d.depth > best.depth { d } else { best },
        )
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalingRow {
    pub s: f64,
    pub lambda: f64,
    pub fidelity: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingSweepResult {
    pub kappa: f64,
    pub gamma: f64,
    pub horizon: f64,
    pub rows: Vec<ScalingRow>,
    pub conservation: ConservationStats,
}

/// Final fidelities for every `(kappa, s)` with `lambda = s kappa`.
pub fn sweep_scaling(
    kappa_list: &[f64],
    s_grid: &[f64],
    base: &SimulationConfig,
) -> Result<Vec<ScalingSweepResult>> {
    if kappa_list.is_empty() || s_grid.is_empty() {
        return Err(Error::EmptySweep);
    }
    if let Some(&s) = s_grid.iter().find(|&&s| s.is_nan() || s < 0.0) {
        return Err(Error::InvalidParameter(format!(
            "scaling s must be >= 0, got {s}"
        )));
    }
    if s_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "scaling grid must be strictly increasing".into(),
        ));
    }
    let points: Vec<(f64, f64)> = kappa_list
        .iter()
        .flat_map(|&k| s_grid.iter().map(move |&s| (k, s)))
        .collect();
    let runs: Vec<(f64, CurveRun)> = points
        .par_iter()
        .map(|&(kappa, s)| {
            let cfg = SimulationConfig {
                kappa,
                lambda: s * kappa,
                ..base.clone()
            };
            run_fidelity_curve(&cfg).map(|r| (s, r))
        })
        .collect::<Result<_>>()?;

    Ok(runs
        .chunks(s_grid.len())
        .zip(kappa_list)
        .map(|(chunk, &kappa)| ScalingSweepResult {
            kappa,
            gamma: base.gamma,
            horizon: base.horizon,
            rows: chunk
                .iter()
                .map(|(s, r)| ScalingRow {
                    s: *s,
                    lambda: r.config.lambda,
                    fidelity: r.trace.final_value(),
                })
                .collect(),
            conservation: chunk
                .iter()
                .fold(ConservationStats::default(), |acc, (_, r)| {
                    acc.merge(&r.conservation)
                }),
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceResult {
    pub gamma_grid: Vec<f64>,
    pub kappa_grid: Vec<f64>,
    /// `fidelity[i][j]` is `F(T)` at `gamma_grid[i]`, `kappa_grid[j]`.
    pub fidelity: Vec<Vec<f64>>,
    pub horizon: f64,
    pub conservation: ConservationStats,
}

/// `F(T)` over a `(gamma, kappa)` grid with `lambda = 2.5 kappa`.
pub fn sweep_surface(
    gamma_grid: &[f64],
    kappa_grid: &[f64],
    base: &SimulationConfig,
) -> Result<SurfaceResult> {
    if gamma_grid.is_empty() || kappa_grid.is_empty() {
        return Err(Error::EmptySweep);
    }
    let points: Vec<(f64, f64)> = gamma_grid
        .iter()
        .flat_map(|&g| kappa_grid.iter().map(move |&k| (g, k)))
        .collect();
    let runs: Vec<CurveRun> = points
        .par_iter()
        .map(|&(gamma, kappa)| {
            run_fidelity_curve(&SimulationConfig {
                gamma,
                kappa,
                lambda: DEFAULT_COOLING_SCALE * kappa,
                ..base.clone()
            })
        })
        .collect::<Result<_>>()?;
    let conservation = runs.iter().fold(ConservationStats::default(), |acc, r| {
        acc.merge(&r.conservation)
    });
    Ok(SurfaceResult {
        gamma_grid: gamma_grid.to_vec(),
        kappa_grid: kappa_grid.to_vec(),
        fidelity: runs
            .chunks(kappa_grid.len())
            .map(|row| row.iter().map(|r| r.trace.final_value()).collect())
            .collect(),
        horizon: base.horizon,
        conservation,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimalScaling {
    pub s: f64,
    pub fidelity: f64,
    /// Another grid point reached the same fidelity; the smaller `s` was kept.
    pub tie: bool,
    /// The maximum sits on the first or last grid point.
    pub boundary: bool,
}

/// Grid argmax of `F(T)` over `s`.
pub fn find_optimal_scaling(sweep: &ScalingSweepResult) -> Result<OptimalScaling> {
    let (best_idx, best) = sweep
        .rows
        .iter()
        .enumerate()
        .fold(
            None,
            |acc: Option<(usize, &ScalingRow)>, (i, r)| match acc {
                Some((_, b)) if r.fidelity <= b.fidelity => acc,
                _ => Some((i, r)),
            },
        )
        .ok_or(Error::EmptySweep)?;
    let tie = sweep
        .rows
        .iter()
        .enumerate()
        .any(|(i, r)| i != best_idx && (r.fidelity - best.fidelity).abs() <= 1e-12);
    let n = sweep.rows.len();
    Ok(OptimalScaling {
        s: best.s,
        fidelity: best.fidelity,
        tie,
        boundary: n > 1 && (best_idx == 0 || best_idx == n - 1),
    })
}

#[derive(Clone, Debug)]
pub struct CurveSet {
    pub configs: Vec<SimulationConfig>,
    pub traces: Vec<FidelityTrace>,
    pub baseline: FidelityTrace,
    pub conservation: ConservationStats,
}

/// One corrected curve per `kappa` (`lambda = 2.5 kappa`) plus the analytic
/// uncorrected baseline on the same grid.
pub fn run_curve_set(kappa_list: &[f64], base: &SimulationConfig) -> Result<CurveSet> {
    if kappa_list.is_empty() {
        return Err(Error::EmptySweep);
    }
    let runs: Vec<CurveRun> = kappa_list
        .par_iter()
        .map(|&kappa| {
            run_fidelity_curve(&SimulationConfig {
                kappa,
                lambda: DEFAULT_COOLING_SCALE * kappa,
                ..base.clone()
            })
        })
        .collect::<Result<_>>()?;
    let baseline = uncorrected_baseline(base.gamma, &runs[0].trace.times);
    let conservation = runs.iter().fold(ConservationStats::default(), |acc, r| {
        acc.merge(&r.conservation)
    });
    Ok(CurveSet {
        configs: runs.iter().map(|r| r.config.clone()).collect(),
        traces: runs.into_iter().map(|r| r.trace).collect(),
        baseline,
        conservation,
    })
}
