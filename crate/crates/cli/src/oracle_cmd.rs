//! `qms oracle` — dense-matrix cross-check of the cascade circuit.
//!
//! Builds the resonant tree Hamiltonian, evolves it under the π-pulse
//! schedule with dense matrix exponentials, and reports the worst
//! population deviation from the circuit over a θ grid.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use qms_core::hamiltonian::{self, PulseSchedule, TreeHamiltonianSpec, MAX_DENSE_LAYERS};
use qms_core::tree::{self, TreeConfig};
use serde::Serialize;

use crate::report::{self, CliError, Format, RunReport};

#[derive(Args, Serialize)]
pub struct OracleArgs {
    /// Number of detection layers (2..=3; the dense evolution is
    /// exponential in the qubit count).
    #[arg(long, default_value_t = 2)]
    pub layers: usize,

    /// Number of evenly spaced preparation angles on [0, π].
    #[arg(long, default_value_t = 9)]
    pub theta_grid: usize,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the report here instead of stdout.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

pub fn run(args: &OracleArgs) -> Result<(), CliError> {
    let start = Instant::now();
    if args.layers > MAX_DENSE_LAYERS {
        return Err(CliError::config(format!(
            "oracle limited to {MAX_DENSE_LAYERS} layers (got {})",
            args.layers
        )));
    }
    if args.layers < 2 {
        return Err(CliError::config(
            "oracle needs at least 2 layers to exercise a transfer cascade",
        ));
    }
    if args.theta_grid < 2 {
        return Err(CliError::config(
            "--theta-grid must contain at least 2 points",
        ));
    }

    let coupling = 1.0;
    let spec = TreeHamiltonianSpec::resonant(args.layers, coupling)?;
    let schedule = PulseSchedule::pi_pulses(&spec);

    let mut deviations: Vec<(f64, f64)> = Vec::with_capacity(args.theta_grid);
    for k in 0..args.theta_grid {
        let theta = k as f64 / (args.theta_grid - 1) as f64 * std::f64::consts::PI;
        let dev = hamiltonian::compare_with_circuit(&spec, &schedule, theta)?;
        deviations.push((theta, dev));
    }
    let max_deviation = deviations.iter().map(|&(_, d)| d).fold(0.0f64, f64::max);

    // Include the circuit's exact outcome distribution at the final grid
    // angle so oracle reports carry the same keys as the other models.
    let final_theta = deviations.last().expect("grid is non-empty").0;
    let cfg = TreeConfig::new(args.layers, final_theta, 0.0)?;
    let dist = tree::ideal_state(&cfg)?.probabilities(1e-12)?;
    let distribution: BTreeMap<String, f64> =
        dist.iter().map(|(bits, p)| (bits.to_string(), p)).collect();

    let diagnostics = serde_json::json!({
        "coupling": coupling,
        "deviations": deviations,
        "max_deviation": max_deviation,
        "distribution_theta": final_theta,
    });

    let report = RunReport {
        model: "oracle",
        config: serde_json::to_value(args).expect("args serialize"),
        distribution: Some(distribution),
        counts: None,
        diagnostics,
        seed: 0,
        wall_time_ms: report::elapsed_ms(start),
    };

    report.emit(
        &report::deviation_csv(&deviations),
        args.out.as_deref(),
        args.format,
    )
}
