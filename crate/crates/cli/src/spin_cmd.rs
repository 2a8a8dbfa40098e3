//! `qms spin` — the Ising spin-register measurement model.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, ValueEnum};
use qms_core::spin::{self, IsingTopology, OptimizeOptions, VariationalParams};
use qms_core::{RngSeed, StateVector};
use serde::{Deserialize, Serialize};

use crate::report::{self, CliError, Format, RunReport};

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Chain,
    Star,
    Ring,
}

#[derive(Args, Serialize)]
pub struct SpinArgs {
    /// Total qubit count (system qubit plus n-1 register spins).
    #[arg(long, default_value_t = 7)]
    pub n: usize,

    /// Circuit depth: number of coupling/mixing layer pairs.
    #[arg(long, default_value_t = 3)]
    pub p: usize,

    /// Preparation angle of the system qubit, in radians.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub theta: f64,

    /// Register coupling graph.
    #[arg(long, value_enum, default_value_t = Topology::Chain)]
    pub topology: Topology,

    /// Search for angles minimizing the register energy at theta = 0
    /// before running at --theta.
    #[arg(long, default_value_t = false, conflicts_with = "params")]
    pub optimize: bool,

    /// Load angles from a JSON file produced by --save-params.
    #[arg(long)]
    #[serde(skip)]
    pub params: Option<PathBuf>,

    /// After optimizing, write the winning angles to this file.
    #[arg(long, requires = "optimize")]
    #[serde(skip)]
    pub save_params: Option<PathBuf>,

    /// Number of samples drawn from the final state; 0 disables sampling.
    #[arg(long, default_value_t = 0)]
    pub shots: u64,

    /// RNG seed for the optimizer restarts and for sampling.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Optimizer evaluation budget (default: 1000 per layer).
    #[arg(long)]
    pub max_evals: Option<usize>,

    /// Number of optimizer restarts (default: 8).
    #[arg(long)]
    pub restarts: Option<usize>,

    /// Probabilities below this threshold are dropped from the report.
    #[arg(long, default_value_t = 1e-12)]
    pub cutoff: f64,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the report here instead of stdout.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

/// On-disk angle set, as written by --save-params.
#[derive(Serialize, Deserialize)]
struct ParamsFile {
    p: usize,
    gammas: Vec<f64>,
    betas: Vec<f64>,
}

fn load_params(path: &Path, expected_p: usize) -> Result<VariationalParams, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    let file: ParamsFile = serde_json::from_str(&text)
        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    if file.p != expected_p {
        return Err(CliError::config(format!(
            "params file has depth {} but --p is {expected_p}",
            file.p
        )));
    }
    Ok(VariationalParams::new(file.gammas, file.betas)?)
}

fn save_params(path: &Path, params: &VariationalParams) -> Result<(), CliError> {
    let file = ParamsFile {
        p: params.depth(),
        gammas: params.gammas.clone(),
        betas: params.betas.clone(),
    };
    let mut text = serde_json::to_string_pretty(&file).expect("params serialize");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn make_topology(kind: Topology, n: usize) -> Result<IsingTopology, CliError> {
    let topo = match kind {
        Topology::Chain => IsingTopology::chain(n),
        Topology::Star => IsingTopology::star(n),
        Topology::Ring => IsingTopology::ring(n),
    }?;
    Ok(topo)
}

pub fn run(args: &SpinArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let topo = make_topology(args.topology, args.n)?;

    // Resolve the angle set: optimizer winner, params file, or the ramp
    // schedule when neither is requested.
    let mut optimization: Option<serde_json::Value> = None;
    let params = if args.optimize {
        let opts = OptimizeOptions {
            max_evals: args.max_evals.unwrap_or(1000 * args.p),
            f_tol: 1e-6,
            restarts: args.restarts.unwrap_or(8),
            seed: RngSeed(args.seed),
        };
        let result = spin::optimize(&topo, args.p, 0.0, &opts)?;
        optimization = Some(serde_json::json!({
            "energy": result.energy,
            "evaluations": result.evaluations,
            "converged": result.converged,
        }));
        if let Some(path) = &args.save_params {
            save_params(path, &result.params)?;
        }
        result.params
    } else if let Some(path) = &args.params {
        load_params(path, args.p)?
    } else {
        VariationalParams::ramp(args.p)?
    };

    let circuit = spin::build_spin_circuit(&topo, &params, args.theta)?;
    let state = qms_core::gates::run_circuit(
        &circuit,
        StateVector::new_zero(args.n)?,
        qms_core::gates::NoiseMode::Ideal,
    )?;

    let dist = state.probabilities(args.cutoff)?;
    let distribution: BTreeMap<String, f64> =
        dist.iter().map(|(bits, p)| (bits.to_string(), p)).collect();

    let counts = if args.shots > 0 {
        Some(state.sample(args.shots, RngSeed(args.seed))?)
    } else {
        None
    };

    let weights = spin::spectral_weights(&state, &topo)?;
    let mut diagnostics = serde_json::Map::new();
    diagnostics.insert("energy".into(), spin::ising_energy(&state, &topo)?.into());
    diagnostics.insert(
        "cat_fidelity".into(),
        spin::cat_fidelity(&state, args.theta).into(),
    );
    diagnostics.insert("ground_weight".into(), weights.ground_weight().into());
    diagnostics.insert(
        "spectral_weights".into(),
        serde_json::to_value(weights.levels()).expect("levels serialize"),
    );
    if let Some(opt) = optimization {
        diagnostics.insert("optimization".into(), opt);
    }

    // Echo the resolved angles so the run is reproducible even when they
    // came from the optimizer or a file.
    let mut config = serde_json::to_value(args).expect("args serialize");
    config["gammas"] = serde_json::to_value(&params.gammas).expect("angles serialize");
    config["betas"] = serde_json::to_value(&params.betas).expect("angles serialize");

    let report = RunReport {
        model: "spin",
        config,
        distribution: Some(distribution),
        counts,
        diagnostics: diagnostics.into(),
        seed: args.seed,
        wall_time_ms: report::elapsed_ms(start),
    };

    let csv = match (&report.distribution, &report.counts) {
        (_, Some(counts)) => report::counts_csv(counts),
        (Some(dist), None) => report::distribution_csv(dist),
        (None, None) => unreachable!("spin runs always enumerate the distribution"),
    };
    report.emit(&csv, args.out.as_deref(), args.format)
}
