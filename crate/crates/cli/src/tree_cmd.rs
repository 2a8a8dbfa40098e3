//! `qms tree` — the single-photon detection cascade.

use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use qms_core::tree::{self, TreeConfig};
use qms_core::RngSeed;
use serde::Serialize;

use crate::report::{self, CliError, Format, RunReport};

#[derive(Args, Serialize)]
pub struct TreeArgs {
    /// Number of detection layers (1..=4 for exact enumeration).
    #[arg(long, default_value_t = 3)]
    pub layers: usize,

    /// Preparation angle of the system qubit, in radians.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub theta: f64,

    /// Per-site flip probability of the detection noise.
    #[arg(long, default_value_t = 0.0)]
    pub flip_prob: f64,

    /// Number of sampled trajectories; 0 means exact enumeration only.
    #[arg(long, default_value_t = 0)]
    pub shots: u64,

    /// RNG seed for trajectory sampling.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Force exact noisy enumeration even when sampling.
    #[arg(long, default_value_t = false)]
    pub exact: bool,

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

pub fn run(args: &TreeArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let cfg = TreeConfig::new(args.layers, args.theta, args.flip_prob)?;

    // Exact enumeration when noiseless, when explicitly requested, or when
    // no shots were asked for; trajectory sampling whenever shots > 0.
    let want_exact = args.flip_prob == 0.0 || args.exact || args.shots == 0;

    let distribution = if want_exact {
        let dist = if args.flip_prob == 0.0 {
            tree::ideal_state(&cfg)?.probabilities(args.cutoff)?
        } else {
            tree::exact_noisy_distribution(&cfg)?
        };
        let map: std::collections::BTreeMap<String, f64> = dist
            .iter()
            .filter(|(_, p)| *p >= args.cutoff)
            .map(|(bits, p)| (bits.to_string(), p))
            .collect();
        Some(map)
    } else {
        None
    };

    let counts = if args.shots > 0 {
        Some(tree::sample_trajectories(
            &cfg,
            args.shots,
            RngSeed(args.seed),
        )?)
    } else {
        None
    };

    let mut diagnostics = serde_json::Map::new();
    if let Some(dist) = &distribution {
        let total: f64 = dist.values().sum();
        diagnostics.insert("support".into(), dist.len().into());
        diagnostics.insert("total_probability".into(), total.into());
        // The mirror identity is an exhaustive check over the outcome set;
        // keep it to sizes where that sweep is instantaneous.
        if args.layers <= 3 {
            diagnostics.insert("mirror_deviation".into(), tree::mirror_check(&cfg)?.into());
        }
    }
    if let Some(counts) = &counts {
        let total: u64 = counts.values().sum();
        diagnostics.insert("sampled_shots".into(), total.into());
    }

    let report = RunReport {
        model: "tree",
        config: serde_json::to_value(args).expect("args serialize"),
        distribution,
        counts,
        diagnostics: diagnostics.into(),
        seed: args.seed,
        wall_time_ms: report::elapsed_ms(start),
    };

    let csv = match (&report.distribution, &report.counts) {
        (_, Some(counts)) => report::counts_csv(counts),
        (Some(dist), None) => report::distribution_csv(dist),
        (None, None) => unreachable!("one of distribution/counts is always produced"),
    };
    report.emit(&csv, args.out.as_deref(), args.format)
}
