//! Command-line front end: argument handling, dispatch and CSV emission.
//!
//! ```text
//! cqec <command> [--config PATH] [--out DIR] [--key=value ...]
//! ```
//!
//! Exit codes:
//!
//! | code | meaning                                           |
//! |------|---------------------------------------------------|
//! | 0    | success                                           |
//! | 1    | a `verify` check failed                           |
//! | 2    | bad arguments or configuration                    |
//! | 3    | integration diverged (trace drift or negativity)  |
//! | 4    | dimension guard tripped                           |
//! | 5    | Zeno survival probability underflowed             |
//! | 6    | file system or CSV failure                        |
//! | 7    | any other error                                   |

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::config::{parse_config, Command, ConfigError, RunConfig};
use crate::csv_io::{self, write_csv, CsvTable};
use crate::error::{Error, Result};
use crate::experiments::{
    find_optimal_scaling, run_fidelity_curve, sweep_scaling, sweep_surface, uncorrected_baseline,
};
use crate::lindblad::ConservationStats;
use crate::verify::run_checks;
use crate::zeno::run_zeno_cycles;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DIVERGED: i32 = 3;
pub const EXIT_GUARD: i32 = 4;
pub const EXIT_SURVIVAL: i32 = 5;
pub const EXIT_IO: i32 = 6;
pub const EXIT_OTHER: i32 = 7;

pub const USAGE: &str = "\
usage: cqec <command> [--config PATH] [--out DIR] [--key=value ...]

commands: simulate, sweep-scaling, sweep-surface, zeno, verify

keys: gamma kappa lambda T alpha beta errors_on_ancillas step_hint
      output_points s_grid kappa_list gamma_grid kappa_grid
      epsilon zeno_time cycles n_env env_state out
";

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) => EXIT_CONFIG,
        Error::IntegrationDiverged { .. } => EXIT_DIVERGED,
        Error::DimensionGuard { .. } => EXIT_GUARD,
        Error::SurvivalUnderflow { .. } => EXIT_SURVIVAL,
        Error::Io { .. } | Error::Csv { .. } => EXIT_IO,
        _ => EXIT_OTHER,
    }
}

/// Parsed command line, before the config file is read.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Invocation {
    pub config_path: Option<PathBuf>,
    /// `key=value` overrides in command-line order.
    pub overrides: Vec<String>,
    pub help: bool,
}

pub fn parse_args<I, S>(args: I) -> std::result::Result<Invocation, ConfigError>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let mut inv = Invocation::default();
    let mut args = args.into_iter().map(Into::into);
    let missing = |flag: &str| ConfigError::Invalid(format!("{flag} needs a value"));
    while let Some(arg) = args.next() {
        if arg == "-h" || arg == "--help" {
            inv.help = true;
        } else if arg == "--config" {
            inv.config_path = Some(args.next().ok_or_else(|| missing("--config"))?.into());
        } else if let Some(path) = arg.strip_prefix("--config=") {
            inv.config_path = Some(path.into());
        } else if arg == "--out" {
            let dir = args.next().ok_or_else(|| missing("--out"))?;
            inv.overrides.push(format!("out={dir}"));
        } else if let Some(kv) = arg.strip_prefix("--") {
            if !kv.contains('=') {
                return Err(ConfigError::Invalid(format!(
                    "expected --key=value, got `{arg}`"
                )));
            }
            inv.overrides.push(kv.to_string());
        } else {
            inv.overrides.push(format!("command={arg}"));
        }
    }
    Ok(inv)
}

pub fn load_config(inv: &Invocation) -> Result<RunConfig> {
    let text = match &inv.config_path {
        Some(path) => Some(std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?),
        None => None,
    };
    Ok(parse_config(text.as_deref(), &inv.overrides)?)
}

fn output_path(cfg: &RunConfig, file: &str) -> Result<PathBuf> {
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).map_err(|source| Error::Io {
        path: dir.clone(),
        source,
    })?;
    Ok(dir.join(file))
}

fn io_err(source: std::io::Error) -> Error {
    Error::Io {
        path: PathBuf::from("<stdout>"),
        source,
    }
}

fn report_conservation(out: &mut dyn Write, stats: &ConservationStats) -> Result<()> {
    writeln!(
        out,
        "conservation: max |tr rho - 1| = {:.2e}, max hermiticity dev = {:.2e}, min eigenvalue = {:.2e}",
        stats.max_trace_drift, stats.max_hermiticity_deviation, stats.min_eigenvalue
    )
    .map_err(io_err)
}

fn wrote(out: &mut dyn Write, table: &CsvTable, path: &Path) -> Result<()> {
    writeln!(
        out,
        "wrote {} rows to {}",
        table.rows().len(),
        path.display()
    )
    .map_err(io_err)
}

fn simulate(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let run = run_fidelity_curve(&cfg.simulation()?)?;
    let baseline = uncorrected_baseline(cfg.gamma, &run.trace.times);
    let mut table = CsvTable::new(&csv_io::FIDELITY_CURVE);
    for ((t, f), b) in run
        .trace
        .times
        .iter()
        .zip(&run.trace.fidelity)
        .zip(&baseline.fidelity)
    {
        table.push_row(vec![*t, *f, *b])?;
    }
    let path = output_path(cfg, "fidelity_curve.csv")?;
    write_csv(&table, &path)?;
    writeln!(
        out,
        "gamma={} kappa={} lambda={} T={}: F(T) = {:.9}, uncorrected = {:.9}",
        cfg.gamma,
        cfg.kappa,
        cfg.lambda,
        cfg.horizon,
        run.trace.final_value(),
        baseline.final_value()
    )
    .map_err(io_err)?;
    report_conservation(out, &run.conservation)?;
    wrote(out, &table, &path)?;
    Ok(EXIT_OK)
}

fn scaling(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let sweeps = sweep_scaling(&cfg.kappa_list, &cfg.s_grid, &cfg.simulation()?)?;
    let mut table = CsvTable::new(&csv_io::SCALING_SWEEP);
    let mut stats = ConservationStats::default();
    for sweep in &sweeps {
        for row in &sweep.rows {
            table.push_row(vec![sweep.kappa, row.s, row.lambda, row.fidelity])?;
        }
        let best = find_optimal_scaling(sweep)?;
        writeln!(
            out,
            "kappa={}: best s = {} (F(T) = {:.9}){}",
            sweep.kappa,
            best.s,
            best.fidelity,
            if best.boundary {
                " [grid boundary]"
            } else {
                ""
            }
        )
        .map_err(io_err)?;
        stats = stats.merge(&sweep.conservation);
    }
    let path = output_path(cfg, "scaling_sweep.csv")?;
    write_csv(&table, &path)?;
    report_conservation(out, &stats)?;
    wrote(out, &table, &path)?;
    Ok(EXIT_OK)
}

fn surface(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let result = sweep_surface(&cfg.gamma_grid, &cfg.kappa_grid, &cfg.simulation()?)?;
    let mut table = CsvTable::new(&csv_io::SURFACE);
    for (gamma, row) in result.gamma_grid.iter().zip(&result.fidelity) {
        for (kappa, f) in result.kappa_grid.iter().zip(row) {
            table.push_row(vec![*gamma, *kappa, *f])?;
        }
    }
    let path = output_path(cfg, "surface.csv")?;
    write_csv(&table, &path)?;
    report_conservation(out, &result.conservation)?;
    wrote(out, &table, &path)?;
    Ok(EXIT_OK)
}

fn zeno(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let mut table = CsvTable::new(&csv_io::ZENO);
    let mut previous: Option<f64> = None;
    for zc in cfg.zeno_configs()? {
        let report = run_zeno_cycles(&zc)?;
        table.push_row(vec![
            report.cycles as f64,
            report.tau,
            report.survival_probability,
            report.deviation,
        ])?;
        let ratio = previous.filter(|p| *p > 0.0).map_or_else(String::new, |p| {
            format!(", ratio to previous {:.4}", report.deviation / p)
        });
        writeln!(
            out,
            "N={}: survival = {:.9}, deviation = {:.3e}{ratio}",
            report.cycles, report.survival_probability, report.deviation
        )
        .map_err(io_err)?;
        previous = Some(report.deviation);
    }
    let path = output_path(cfg, "zeno.csv")?;
    write_csv(&table, &path)?;
    wrote(out, &table, &path)?;
    Ok(EXIT_OK)
}

fn verify(out: &mut dyn Write) -> Result<i32> {
    let checks = run_checks()?;
    for c in &checks {
        writeln!(out, "{c}").map_err(io_err)?;
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    writeln!(out, "{} checks, {failed} failed", checks.len()).map_err(io_err)?;
    Ok(if failed == 0 {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}

/// Run the configured command, writing a human summary to `out`. Returns the
/// exit status on completion; errors carry their own code via [`exit_code`].
pub fn dispatch(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    match cfg.command {
        Command::Simulate => simulate(cfg, out),
        Command::SweepScaling => scaling(cfg, out),
        Command::SweepSurface => surface(cfg, out),
        Command::Zeno => zeno(cfg, out),
        Command::Verify => verify(out),
    }
}

/// Full CLI flow; returns the process exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let inv = match parse_args(args) {
        Ok(inv) => inv,
        Err(e) => {
            let _ = writeln!(err, "error: {e}\n\n{USAGE}");
            return EXIT_CONFIG;
        }
    };
    if inv.help {
        let _ = write!(out, "{USAGE}");
        return EXIT_OK;
    }
    let result = load_config(&inv).and_then(|cfg| dispatch(&cfg, out));
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if matches!(e, Error::Config(_)) {
                let _ = write!(err, "\n{USAGE}");
            }
            exit_code(&e)
        }
    }
}
