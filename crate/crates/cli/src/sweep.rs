use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;
use rankcollide::conditions::{Criterion, TotalCriterion};
use rankcollide::simulate::{self, SimConfig, TrackedWindow, DEFAULT_DT, DEFAULT_EPSILONS};
use rankcollide::{FiniteSystemSpec, SystemSpec};
use serde::Deserialize;
use serde_json::json;

use crate::check::{evaluate, parse_criteria};
use crate::{manifest, GlobalArgs, Outcome};

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Template document (JSON): a finite spec whose `sigma2` may be replaced
    /// by a `sigma2_rule`, plus optional `n` and `criteria`.
    pub template: PathBuf,
    /// Swept parameter, `NAME=start:end[:step]` or `NAME=v1,v2,...` with
    /// NAME one of `N`, `n`, `sigma2[k]` (1-based); repeatable.
    #[arg(long = "axis", value_name = "AXIS", required = true)]
    pub axes: Vec<String>,
    #[arg(long = "criterion", value_name = "ID")]
    pub criteria: Vec<String>,
    #[arg(long, default_value = "LEMMA21")]
    pub window_criterion: String,
    /// Also simulate every grid point and report proximity fractions of the
    /// window of ranks 1..n.
    #[arg(long)]
    pub simulate: bool,
    #[arg(long = "T", value_name = "T", default_value_t = 1.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = DEFAULT_DT)]
    pub dt: f64,
    #[arg(long, default_value_t = 1000)]
    pub paths: usize,
    #[arg(long = "eps", value_delimiter = ',')]
    pub eps: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Template {
    #[serde(rename = "N")]
    particles: Option<usize>,
    sigma2: Option<Vec<f64>>,
    sigma2_rule: Option<Sigma2Rule>,
    g: Option<Vec<f64>>,
    x0: Option<Vec<f64>>,
    n: Option<usize>,
    criteria: Option<Vec<String>>,
}

/// Diffusion coefficients generated from the particle count.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Sigma2Rule {
    Constant { value: f64 },
    /// `sigma2 = 1` at both ends and `1/(N-2)` in between.
    UnitEndsInverseMiddle,
    Linear { start: f64, step: f64 },
}

impl Sigma2Rule {
    fn generate(&self, n: usize) -> Vec<f64> {
        match self {
            Sigma2Rule::Constant { value } => vec![*value; n],
            Sigma2Rule::UnitEndsInverseMiddle => (0..n)
                .map(|k| if k == 0 || k + 1 == n { 1.0 } else { 1.0 / (n as f64 - 2.0) })
                .collect(),
            Sigma2Rule::Linear { start, step } => (0..n).map(|k| start + step * k as f64).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Param {
    Particles,
    Order,
    Sigma2Entry(usize),
}

#[derive(Debug, Clone)]
struct Axis {
    name: String,
    param: Param,
    values: Vec<f64>,
}

fn parse_axis(s: &str) -> Result<Axis> {
    let (name, spec) = s.split_once('=').ok_or_else(|| anyhow!("axis `{s}` must look like NAME=values"))?;
    let name = name.trim();
    let param = match name {
        "N" => Param::Particles,
        "n" => Param::Order,
        other => {
            let k = other
                .strip_prefix("sigma2[")
                .and_then(|r| r.strip_suffix(']'))
                .ok_or_else(|| anyhow!("unknown axis `{other}` (use N, n or sigma2[k])"))?;
            let k: usize = k.parse().with_context(|| format!("axis index in `{other}`"))?;
            if k == 0 {
                bail!("sigma2 axis index is 1-based");
            }
            Param::Sigma2Entry(k)
        }
    };
    let integer = !matches!(param, Param::Sigma2Entry(_));
    let values = if spec.contains(':') {
        let parts: Vec<f64> = spec
            .split(':')
            .map(|p| p.trim().parse::<f64>().with_context(|| format!("axis bound `{p}`")))
            .collect::<Result<_>>()?;
        let (start, end, step) = match parts[..] {
            [a, b] if integer => (a, b, 1.0),
            [a, b, c] => (a, b, c),
            _ => bail!("axis `{s}` needs start:end:step"),
        };
        if step.is_nan() || step <= 0.0 {
            bail!("axis step must be > 0");
        }
        let count = ((end - start) / step + 1e-9).floor();
        if count < 0.0 {
            Vec::new()
        } else {
            (0..=count as usize).map(|i| start + step * i as f64).collect()
        }
    } else {
        spec.split(',')
            .filter(|p| !p.trim().is_empty())
            .map(|p| p.trim().parse::<f64>().with_context(|| format!("axis value `{p}`")))
            .collect::<Result<_>>()?
    };
    if integer && values.iter().any(|v| v.fract() != 0.0 || *v < 0.0) {
        bail!("axis {name} takes non-negative integers");
    }
    Ok(Axis { name: name.to_string(), param, values })
}

fn grid(axes: &[Axis]) -> Vec<Vec<f64>> {
    axes.iter().fold(vec![Vec::new()], |acc, axis| {
        acc.into_iter()
            .flat_map(|prefix| {
                axis.values.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect()
    })
}

struct Point {
    spec: FiniteSystemSpec,
    order: Option<usize>,
}

fn build_point(t: &Template, axes: &[Axis], values: &[f64]) -> Result<Point> {
    let mut particles = t.particles.or(t.sigma2.as_ref().map(Vec::len));
    let mut order = t.n;
    for (axis, &v) in axes.iter().zip(values) {
        match axis.param {
            Param::Particles => particles = Some(v as usize),
            Param::Order => order = Some(v as usize),
            Param::Sigma2Entry(_) => {}
        }
    }
    let n = particles.ok_or_else(|| anyhow!("template needs N, sigma2 or an N axis"))?;
    let mut sigma2 = match (&t.sigma2_rule, &t.sigma2) {
        (Some(rule), _) => rule.generate(n),
        (None, Some(s)) if s.len() == n => s.clone(),
        (None, Some(s)) => bail!("template sigma2 has {} entries but N = {n}", s.len()),
        (None, None) => bail!("template needs sigma2 or sigma2_rule"),
    };
    for (axis, &v) in axes.iter().zip(values) {
        if let Param::Sigma2Entry(k) = axis.param {
            let slot = sigma2
                .get_mut(k - 1)
                .ok_or_else(|| anyhow!("axis {} is outside N = {n}", axis.name))?;
            *slot = v;
        }
    }
    let g = match &t.g {
        Some(g) if g.len() == n => g.clone(),
        Some(g) => bail!("template g has {} entries but N = {n}", g.len()),
        None => vec![0.0; n],
    };
    let x0 = match &t.x0 {
        Some(x) if x.len() == n => x.clone(),
        Some(x) => bail!("template x0 has {} entries but N = {n}", x.len()),
        None => (0..n).map(|i| i as f64).collect(),
    };
    let spec = FiniteSystemSpec { n, g, sigma2, x0 };
    let report = spec.validate();
    if !report.is_valid() {
        bail!("grid point {values:?}: {}", report.violations.join("; "));
    }
    Ok(Point { spec, order })
}

pub fn run(global: &GlobalArgs, args: SweepArgs) -> Result<Outcome> {
    let started = manifest::now();
    let (_, doc) = crate::read_json(&args.template)?;
    let template: Template = serde_json::from_value(doc.clone())
        .with_context(|| format!("invalid template {}", args.template.display()))?;
    let axes = args.axes.iter().map(|a| parse_axis(a)).collect::<Result<Vec<_>>>()?;
    let points = grid(&axes);
    if points.is_empty() || points.iter().all(Vec::is_empty) || axes.iter().any(|a| a.values.is_empty()) {
        bail!("the sweep grid is empty");
    }
    let mut ids = args.criteria.clone();
    if ids.is_empty() {
        ids = template.criteria.clone().unwrap_or_default();
    }
    let mut criteria = parse_criteria(&ids)?;
    if criteria.is_empty() {
        criteria.push(Criterion::WindowReduction);
    }
    let window: TotalCriterion = args.window_criterion.parse()?;
    let eps = if args.eps.is_empty() { DEFAULT_EPSILONS.to_vec() } else { args.eps.clone() };
    let seed = if args.simulate {
        Some(global.seed.ok_or_else(|| anyhow!("--seed is required with --simulate"))?)
    } else {
        None
    };

    let mut header: Vec<String> = vec!["point".into()];
    header.extend(axes.iter().map(|a| a.name.clone()));
    header.extend(["N".into(), "n".into()]);
    for c in &criteria {
        header.push(format!("{c}_holds"));
        header.push(format!("{c}_margin"));
    }
    if args.simulate {
        for e in &eps {
            header.push(format!("proximity_eps_{e}"));
            header.push(format!("stderr_eps_{e}"));
        }
    }
    let mut csv = header.join(",") + "\n";

    for (i, values) in points.iter().enumerate() {
        let point = build_point(&template, &axes, values)?;
        let system = SystemSpec::Finite(point.spec.clone());
        let mut row: Vec<String> = vec![i.to_string()];
        row.extend(values.iter().map(|v| v.to_string()));
        row.push(point.spec.n.to_string());
        row.push(point.order.map_or_else(|| "NA".into(), |n| n.to_string()));
        for &c in &criteria {
            match evaluate(&system, &[c], point.order, window, None) {
                Ok(r) => {
                    row.push(r[0].holds.to_string());
                    row.push(r[0].margin.to_string());
                }
                Err(_) => row.extend(["NA".to_string(), "NA".to_string()]),
            }
        }
        if let Some(seed) = seed {
            let width = point.order.unwrap_or(point.spec.n);
            let config = SimConfig::new(args.horizon, args.dt, args.paths, seed)
                .with_epsilons(eps.clone())
                .with_windows(vec![TrackedWindow { k: 1, n: width }]);
            let threads = global.threads.unwrap_or(0);
            let agg = if threads > 0 {
                simulate::monte_carlo_with_threads(&point.spec, &config, threads)?
            } else {
                simulate::monte_carlo(&point.spec, &config)?
            };
            for p in &agg.windows[0].proximity {
                row.push(p.fraction.to_string());
                row.push(p.stderr.to_string());
            }
        }
        csv.push_str(&row.join(","));
        csv.push('\n');
    }

    print!("{csv}");
    if let Some(dir) = &global.out {
        crate::ensure_dir(dir)?;
        crate::write_file(dir, "sweep.csv", &csv)?;
        let config = json!({
            "template": doc,
            "axes": args.axes,
            "criteria": criteria.iter().map(|c| c.id()).collect::<Vec<_>>(),
            "window_criterion": window.criterion().id(),
            "simulate": args.simulate.then(|| json!({"T": args.horizon, "dt": args.dt, "paths": args.paths, "eps": eps})),
        });
        manifest::RunManifest::new("sweep", &config, seed, started).write(dir)?;
    }
    Ok(Outcome::Ok)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_forms() {
        let a = parse_axis("N=4:7").unwrap();
        assert_eq!(a.values, vec![4.0, 5.0, 6.0, 7.0]);
        assert_eq!(a.param, Param::Particles);
        let a = parse_axis("sigma2[1]=0.5:1.0:0.25").unwrap();
        assert_eq!(a.values, vec![0.5, 0.75, 1.0]);
        assert_eq!(a.param, Param::Sigma2Entry(1));
        assert_eq!(parse_axis("n=4,6").unwrap().values, vec![4.0, 6.0]);
        assert!(parse_axis("sigma2[1]=0:1").is_err());
        assert!(parse_axis("N=4.5").is_err());
        assert!(parse_axis("temp=1").is_err());
        assert!(parse_axis("N=7:4").unwrap().values.is_empty());
    }

    #[test]
    fn inverse_middle_rule() {
        assert_eq!(Sigma2Rule::UnitEndsInverseMiddle.generate(4), vec![1.0, 0.5, 0.5, 1.0]);
    }

    #[test]
    fn cartesian_grid() {
        let axes = vec![parse_axis("N=4:5").unwrap(), parse_axis("n=2,3,4").unwrap()];
        assert_eq!(grid(&axes).len(), 6);
    }
}
