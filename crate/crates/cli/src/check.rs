use std::path::PathBuf;

use anyhow::{anyhow, bail, Result};
use clap::Args;
use rankcollide::conditions::{self, ConditionReport, Criterion, TotalCriterion};
use rankcollide::SystemSpec;
use serde_json::json;

use crate::{manifest, Format, GlobalArgs, Outcome};

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// System spec (JSON).
    pub spec: PathBuf,
    /// Collision order n (defaults to N, i.e. total collisions).
    #[arg(long)]
    pub n: Option<usize>,
    /// Criteria to evaluate (wire ids such as LEMMA21, COR22, THM11);
    /// defaults to WINDOW_REDUCTION for finite and THM42 for infinite systems.
    #[arg(long = "criterion", value_name = "ID")]
    pub criteria: Vec<String>,
    /// Total-collision criterion applied inside WINDOW_REDUCTION.
    #[arg(long, default_value = "LEMMA21")]
    pub window_criterion: String,
    /// Evaluate every inequality strictly.
    #[arg(long, conflicts_with = "non_strict")]
    pub strict: bool,
    /// Evaluate every inequality non-strictly.
    #[arg(long)]
    pub non_strict: bool,
}

impl CheckArgs {
    fn sense(&self) -> Option<bool> {
        match (self.strict, self.non_strict) {
            (true, _) => Some(true),
            (_, true) => Some(false),
            _ => None,
        }
    }
}

/// Evaluates `criteria` (all defaults when empty) for one spec.
pub fn evaluate(
    spec: &SystemSpec,
    criteria: &[Criterion],
    n: Option<usize>,
    window: TotalCriterion,
    strict: Option<bool>,
) -> Result<Vec<ConditionReport>> {
    let mut out = Vec::new();
    match spec {
        SystemSpec::Finite(f) => {
            let defaults = [Criterion::WindowReduction];
            let criteria = if criteria.is_empty() { &defaults[..] } else { criteria };
            for &c in criteria {
                out.push(conditions::check_criterion(&f.sigma2, c, n, window, strict)?);
            }
        }
        SystemSpec::Infinite(inf) => {
            let order = n.unwrap_or(4);
            for &c in criteria {
                if c != Criterion::InfiniteNTuple {
                    bail!("criterion {c} needs a finite system spec");
                }
            }
            out.push(conditions::infinite_ntuple_check(inf, order, strict)?);
        }
    }
    Ok(out)
}

pub fn parse_criteria(ids: &[String]) -> Result<Vec<Criterion>> {
    ids.iter()
        .flat_map(|s| s.split(','))
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.parse::<Criterion>().map_err(|e| anyhow!(e)))
        .collect()
}

pub fn run(global: &GlobalArgs, args: CheckArgs) -> Result<Outcome> {
    let started = manifest::now();
    let (spec, doc) = crate::load_spec(&args.spec)?;
    let criteria = parse_criteria(&args.criteria)?;
    let window: TotalCriterion = args.window_criterion.parse()?;
    let reports = evaluate(&spec, &criteria, args.n, window, args.sense())?;

    let rendered = match global.format {
        Format::Json => serde_json::to_string_pretty(&reports)? + "\n",
        Format::Csv => conditions::reports_to_csv(&reports),
        Format::Table => table(&reports),
    };
    print!("{rendered}");

    if let Some(dir) = &global.out {
        crate::ensure_dir(dir)?;
        crate::write_file(dir, "reports.json", &serde_json::to_string_pretty(&reports)?)?;
        crate::write_file(dir, "reports.csv", &conditions::reports_to_csv(&reports))?;
        let config = json!({
            "spec": doc,
            "n": args.n,
            "criteria": criteria.iter().map(|c| c.id()).collect::<Vec<_>>(),
            "window_criterion": window.criterion().id(),
            "strict": args.sense(),
        });
        manifest::RunManifest::new("check", &config, global.seed, started).write(dir)?;
    }

    Ok(if reports.iter().all(|r| r.holds) { Outcome::Ok } else { Outcome::Fails })
}

fn table(reports: &[ConditionReport]) -> String {
    let mut out = format!("{:<18} {:<6} {:>14} {:<7} {}\n", "criterion", "holds", "margin", "sense", "detail");
    for r in reports {
        let detail = match (&r.label, r.details.len()) {
            (Some(l), 0) => l.clone(),
            (Some(l), k) => format!("{l} ({k} sub-checks)"),
            (None, 0) => String::new(),
            (None, k) => format!("{k} sub-checks"),
        };
        out.push_str(&format!(
            "{:<18} {:<6} {:>14.6e} {:<7} {}\n",
            r.criterion.id(),
            r.holds,
            r.margin,
            if r.strict { "<" } else { "<=" },
            detail
        ));
    }
    out
}
