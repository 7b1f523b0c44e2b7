use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use rankcollide::SystemSpec;
use serde_json::json;

use crate::{Format, GlobalArgs, Outcome};

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// System spec (JSON).
    pub spec: PathBuf,
}

pub fn run(global: &GlobalArgs, args: ValidateArgs) -> Result<Outcome> {
    let (text, _) = crate::read_json(&args.spec)?;
    let spec = SystemSpec::from_json(&text).with_context(|| format!("invalid spec {}", args.spec.display()))?;
    let report = spec.validate();
    let series = match &spec {
        SystemSpec::Infinite(s) => Some(s.init.series_condition()),
        SystemSpec::Finite(_) => None,
    };
    match global.format {
        Format::Json => {
            let doc = json!({
                "kind": if series.is_some() { "infinite" } else { "finite" },
                "valid": report.is_valid(),
                "violations": report.violations,
                "series_condition": series,
            });
            println!("{}", serde_json::to_string_pretty(&doc)?);
        }
        Format::Table | Format::Csv => {
            if report.is_valid() {
                println!("valid");
            }
            for v in &report.violations {
                println!("violation: {v}");
            }
        }
    }
    Ok(if report.is_valid() { Outcome::Ok } else { Outcome::Fails })
}
