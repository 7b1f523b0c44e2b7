use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;
use rankcollide::simulate::{self, Aggregate, SimConfig, TrackedWindow, DEFAULT_DT, DEFAULT_EPSILONS};
use rankcollide::SystemSpec;
use serde_json::json;

use crate::{manifest, Format, GlobalArgs, Outcome};

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// System spec (JSON).
    pub spec: PathBuf,
    /// Time horizon.
    #[arg(long = "T", value_name = "T")]
    pub horizon: f64,
    #[arg(long, default_value_t = DEFAULT_DT)]
    pub dt: f64,
    #[arg(long)]
    pub paths: usize,
    /// Proximity thresholds (repeatable or comma-separated).
    #[arg(long = "eps", value_delimiter = ',')]
    pub eps: Vec<f64>,
    /// Tracked window `k:n` (ranks k..k+n-1, 1-based); repeatable.
    #[arg(long = "window", value_name = "K:N")]
    pub windows: Vec<String>,
    /// Track every window of this width.
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of particles kept when truncating an infinite system.
    #[arg(long = "truncation-M", value_name = "M")]
    pub truncation_m: Option<usize>,
    /// Top buffer ranks excluded from statistics of a truncated system.
    #[arg(long = "buffer-B", value_name = "B", default_value_t = 0)]
    pub buffer_b: usize,
    /// Also write the trajectory of this path index as CSV.
    #[arg(long, value_name = "PATH_INDEX")]
    pub trajectory: Option<u64>,
    /// Rerun at dt/2 and write the differences (finite systems only).
    #[arg(long)]
    pub convergence_check: bool,
}

pub fn parse_window(s: &str) -> Result<TrackedWindow> {
    let (k, n) = s.split_once(':').ok_or_else(|| anyhow!("window `{s}` must look like k:n"))?;
    Ok(TrackedWindow {
        k: k.trim().parse().with_context(|| format!("window rank in `{s}`"))?,
        n: n.trim().parse().with_context(|| format!("window width in `{s}`"))?,
    })
}

/// Explicit windows, else every window of width `n`, else the full spread.
pub fn resolve_windows(explicit: &[String], n: Option<usize>, limit: usize) -> Result<Vec<TrackedWindow>> {
    if !explicit.is_empty() {
        return explicit.iter().map(|s| parse_window(s)).collect();
    }
    let width = n.unwrap_or(limit);
    if n.is_some() && (width < 2 || width > limit) {
        bail!("--n {width} must lie in 2..={limit}");
    }
    Ok(TrackedWindow::all_of_width(width, limit))
}

pub fn run(global: &GlobalArgs, args: SimulateArgs) -> Result<Outcome> {
    let started = manifest::now();
    let seed = global.seed.ok_or_else(|| anyhow!("--seed is required for simulate"))?;
    let out = global.out.clone().ok_or_else(|| anyhow!("--out is required for simulate"))?;
    let (spec, doc) = crate::load_spec(&args.spec)?;

    let mut config = SimConfig::new(args.horizon, args.dt, args.paths, seed);
    if !args.eps.is_empty() {
        config.epsilons = args.eps.clone();
    } else {
        config.epsilons = DEFAULT_EPSILONS.to_vec();
    }
    let limit = match &spec {
        SystemSpec::Finite(f) => f.n,
        SystemSpec::Infinite(_) => {
            let m = args
                .truncation_m
                .ok_or_else(|| anyhow!("infinite system specs need --truncation-M"))?;
            config = config.with_truncation(m, args.buffer_b);
            m.saturating_sub(args.buffer_b)
        }
    };
    config.track_windows = resolve_windows(&args.windows, args.n, limit)?;

    let threads = global.threads.unwrap_or(0);
    let run = || -> Result<(Aggregate, Option<serde_json::Value>, Option<String>)> {
        match &spec {
            SystemSpec::Finite(f) => {
                let agg = simulate::monte_carlo(f, &config)?;
                let conv = if args.convergence_check {
                    Some(serde_json::to_value(simulate::dt_halving_check(f, &config)?)?)
                } else {
                    None
                };
                let traj = args.trajectory.map(|p| simulate::trajectory_csv(f, &config, p)).transpose()?;
                Ok((agg, conv, traj))
            }
            SystemSpec::Infinite(inf) => {
                if args.convergence_check {
                    bail!("--convergence-check is only available for finite systems");
                }
                let agg = simulate::simulate_infinite_truncated(inf, &config)?;
                let traj = match args.trajectory {
                    Some(p) => Some(simulate::trajectory_csv(&inf.truncate(config.truncation_m.unwrap_or(0)), &config, p)?),
                    None => None,
                };
                Ok((agg, None, traj))
            }
        }
    };
    let (agg, convergence, trajectory) = if threads > 0 {
        simulate::with_threads(threads, run)??
    } else {
        run()?
    };

    crate::ensure_dir(&out)?;
    let json_text = serde_json::to_string_pretty(&agg)? + "\n";
    let csv_text = agg.to_csv();
    crate::write_file(&out, "aggregate.json", &json_text)?;
    crate::write_file(&out, "aggregate.csv", &csv_text)?;
    if let Some(conv) = convergence {
        crate::write_file(&out, "convergence.json", &serde_json::to_string_pretty(&conv)?)?;
    }
    if let (Some(p), Some(text)) = (args.trajectory, trajectory) {
        crate::write_file(&out, &format!("trajectory_{p}.csv"), &text)?;
    }
    let config_doc = json!({ "spec": doc, "sim": config });
    manifest::RunManifest::new("simulate", &config_doc, Some(seed), started).write(&out)?;

    match global.format {
        Format::Json => print!("{json_text}"),
        Format::Csv => print!("{csv_text}"),
        Format::Table => print!("{}", table(&agg)),
    }
    Ok(Outcome::Ok)
}

fn table(agg: &Aggregate) -> String {
    let mut out = format!(
        "paths={} steps={} com mean={:.6} (expected {:.6}, se {:.2e}) var={:.6} (expected {:.6}, se {:.2e})\n",
        agg.paths,
        agg.steps,
        agg.com.mean,
        agg.com.expected_mean,
        agg.com.mean_stderr,
        agg.com.variance,
        agg.com.expected_variance,
        agg.com.variance_stderr
    );
    if let Some(t) = &agg.truncation {
        out.push_str(&format!("truncation M={} B={} boundary contact fraction={}\n", t.m, t.b, t.boundary_contact_fraction));
    }
    out.push_str(&format!("{:>4} {:>4} {:>10} {:>10} {:>10} {:>12}\n", "k", "n", "eps", "fraction", "stderr", "spread_mean"));
    for w in &agg.windows {
        for p in &w.proximity {
            out.push_str(&format!(
                "{:>4} {:>4} {:>10.2e} {:>10.4} {:>10.4} {:>12.6}\n",
                w.k, w.n, p.epsilon, p.fraction, p.stderr, w.min_spread_mean
            ));
        }
    }
    out
}
