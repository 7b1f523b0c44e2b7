//! System descriptions and the ranking of particle positions.
//!
//! Names and ranks are 0-based in the Rust API (`names()[0]` is the name of
//! the lowest particle). The JSON documents and the CLI/Python front ends
//! present them 1-based.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{invalid, Error, Result};

/// A finite system of competing Brownian particles: rank-indexed drifts and
/// diffusions plus the initial positions of the named particles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteSystemSpec {
    #[serde(rename = "N")]
    pub n: usize,
    pub g: Vec<f64>,
    pub sigma2: Vec<f64>,
    pub x0: Vec<f64>,
}

impl FiniteSystemSpec {
    /// Builds a spec and rejects it if any structural invariant is violated.
    pub fn new(g: Vec<f64>, sigma2: Vec<f64>, x0: Vec<f64>) -> Result<Self> {
        let spec = Self { n: sigma2.len(), g, sigma2, x0 };
        let report = spec.validate();
        if report.is_valid() {
            Ok(spec)
        } else {
            Err(invalid(report.violations.join("; ")))
        }
    }

    pub fn validate(&self) -> ValidationReport {
        self.violations(2)
    }

    /// Structural violations with a configurable minimum particle count; the
    /// dynamics themselves are well defined for a single particle.
    pub(crate) fn violations(&self, min_n: usize) -> ValidationReport {
        let mut report = ValidationReport::default();
        if self.n < min_n {
            report.push(format!("N must be >= {min_n} (got {})", self.n));
        }
        for (field, len) in [("g", self.g.len()), ("sigma2", self.sigma2.len()), ("x0", self.x0.len())] {
            if len != self.n {
                report.push(format!("{field} has {len} entries, expected N = {}", self.n));
            }
        }
        for (k, &s) in self.sigma2.iter().enumerate() {
            if !s.is_finite() || s <= 0.0 {
                report.push(format!("sigma2[{}] must be > 0 (got {s})", k + 1));
            }
        }
        for (k, &v) in self.g.iter().enumerate() {
            if !v.is_finite() {
                report.push(format!("g[{}] must be finite", k + 1));
            }
        }
        for (i, &v) in self.x0.iter().enumerate() {
            if !v.is_finite() {
                report.push(format!("x0[{}] must be finite", i + 1));
            }
        }
        report
    }

    pub fn from_json(doc: &str) -> Result<Self> {
        Ok(serde_json::from_str(doc)?)
    }
}

/// List of violated invariants; empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, msg: String) {
        self.violations.push(msg);
    }
}

/// Ranking permutation of a configuration: `names()[k]` is the particle
/// holding rank `k`. Ties go to the lower name.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RankingPermutation {
    names: Vec<usize>,
}

fn check_finite(x: &[f64]) -> Result<()> {
    match x.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(invalid(format!("position x[{}] is not finite", i + 1))),
        None => Ok(()),
    }
}

/// Total order on names: by position, then by name. Positions must be finite.
#[inline]
fn rank_order(x: &[f64], a: usize, b: usize) -> Ordering {
    match x[a].partial_cmp(&x[b]) {
        Some(Ordering::Equal) | None => a.cmp(&b),
        Some(ord) => ord,
    }
}

impl RankingPermutation {
    pub fn of(x: &[f64]) -> Result<Self> {
        if x.is_empty() {
            return Err(invalid("cannot rank an empty configuration"));
        }
        check_finite(x)?;
        let mut names: Vec<usize> = (0..x.len()).collect();
        names.sort_unstable_by(|&a, &b| rank_order(x, a, b));
        Ok(Self { names })
    }

    /// Identity ranking of `n` particles.
    pub fn identity(n: usize) -> Self {
        Self { names: (0..n).collect() }
    }

    /// Re-sorts in place for a new configuration. Insertion sort: linear when
    /// only a few ranks changed since the previous call. Positions are
    /// assumed finite.
    pub fn rerank(&mut self, x: &[f64]) {
        debug_assert_eq!(x.len(), self.names.len());
        let names = &mut self.names;
        for i in 1..names.len() {
            let cur = names[i];
            let mut j = i;
            while j > 0 && rank_order(x, names[j - 1], cur) == Ordering::Greater {
                names[j] = names[j - 1];
                j -= 1;
            }
            names[j] = cur;
        }
    }

    pub fn names(&self) -> &[usize] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Rank held by each name (inverse permutation).
    pub fn ranks(&self) -> Vec<usize> {
        let mut ranks = vec![0; self.names.len()];
        for (k, &i) in self.names.iter().enumerate() {
            ranks[i] = k;
        }
        ranks
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.names.iter().map(|&i| i + 1).collect()
    }
}

/// Ranked positions `y[0] <= y[1] <= ...` together with the permutation
/// that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedState {
    pub y: Vec<f64>,
    pub perm: RankingPermutation,
}

impl RankedState {
    pub fn of(x: &[f64]) -> Result<Self> {
        let perm = RankingPermutation::of(x)?;
        let y = perm.names().iter().map(|&i| x[i]).collect();
        Ok(Self { y, perm })
    }

    /// Adjacent spacings `y[k+1] - y[k]`.
    pub fn gaps(&self) -> Result<Vec<f64>> {
        if self.y.len() < 2 {
            return Err(invalid("gaps need at least two particles"));
        }
        Ok(self.y.windows(2).map(|w| w[1] - w[0]).collect())
    }
}

pub fn rank_permutation(x: &[f64]) -> Result<RankingPermutation> {
    RankingPermutation::of(x)
}

pub fn ranked_values(x: &[f64]) -> Result<RankedState> {
    RankedState::of(x)
}

pub fn gaps(state: &RankedState) -> Result<Vec<f64>> {
    state.gaps()
}

/// Initial configuration of an infinite system, `x_i` for names `i = 1, 2, ...`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitFamily {
    /// `x_i = a + b i`
    Linear { a: f64, b: f64 },
    /// `x_i = c i^gamma`
    Power { c: f64, gamma: f64 },
    /// `x_i = c (ln(i + 1))^beta`
    LogPower { c: f64, beta: f64 },
    /// Given values for the first names, then a rule for the rest.
    Explicit { prefix: Vec<f64>, tail: Box<InitFamily> },
}

const FAMILY_KINDS: [&str; 4] = ["linear", "power", "log_power", "explicit"];

/// Outcome of the analytic decision of the series condition for a family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesVerdict {
    pub holds: bool,
    pub reason: String,
}

impl InitFamily {
    /// Position of name `i` (1-based).
    pub fn position(&self, i: usize) -> f64 {
        let t = i as f64;
        match self {
            InitFamily::Linear { a, b } => a + b * t,
            InitFamily::Power { c, gamma } => c * t.powf(*gamma),
            InitFamily::LogPower { c, beta } => c * (t + 1.0).ln().powf(*beta),
            InitFamily::Explicit { prefix, tail } => match prefix.get(i - 1) {
                Some(&v) => v,
                None => tail.position(i),
            },
        }
    }

    pub fn positions(&self, m: usize) -> Vec<f64> {
        (1..=m).map(|i| self.position(i)).collect()
    }

    fn parameter_violations(&self, out: &mut Vec<String>, nested: bool) {
        let finite = |name: &str, v: f64, out: &mut Vec<String>| {
            if !v.is_finite() {
                out.push(format!("init.{name} must be finite"));
            }
        };
        match self {
            InitFamily::Linear { a, b } => {
                finite("a", *a, out);
                if !(b.is_finite() && *b > 0.0) {
                    out.push(format!("init.b must be > 0 (got {b})"));
                }
            }
            InitFamily::Power { c, gamma } => {
                if !(c.is_finite() && *c > 0.0) {
                    out.push(format!("init.c must be > 0 (got {c})"));
                }
                if !(gamma.is_finite() && *gamma > 0.0) {
                    out.push(format!("init.gamma must be > 0 (got {gamma})"));
                }
            }
            InitFamily::LogPower { c, beta } => {
                if !(c.is_finite() && *c > 0.0) {
                    out.push(format!("init.c must be > 0 (got {c})"));
                }
                if !(beta.is_finite() && *beta > 0.0) {
                    out.push(format!("init.beta must be > 0 (got {beta})"));
                }
            }
            InitFamily::Explicit { prefix, tail } => {
                if nested {
                    out.push("init.tail must be a rule, not another explicit prefix".into());
                }
                for (i, v) in prefix.iter().enumerate() {
                    finite(&format!("prefix[{}]", i + 1), *v, out);
                }
                tail.parameter_violations(out, true);
            }
        }
    }

    /// Decides whether `sum_i exp(-alpha x_i^2) < inf` for every `alpha > 0`.
    ///
    /// Linear and power rules grow polynomially, so `x_i^2 / ln i -> inf`
    /// and the sum is dominated by any `i^-2` tail. For the log-power rule
    /// `exp(-alpha c^2 (ln(i+1))^(2 beta))` is summable for all alpha iff
    /// `2 beta > 1`; at `2 beta = 1` it is the p-series `(i+1)^(-alpha c^2)`,
    /// which diverges once `alpha <= 1/c^2`. A finite prefix changes nothing.
    pub fn series_condition(&self) -> SeriesVerdict {
        match self {
            InitFamily::Linear { .. } => SeriesVerdict {
                holds: true,
                reason: "linear growth: x_i^2 / ln i -> infinity".into(),
            },
            InitFamily::Power { .. } => SeriesVerdict {
                holds: true,
                reason: "power growth: x_i^2 / ln i -> infinity".into(),
            },
            InitFamily::LogPower { c, beta } => {
                if *beta > 0.5 {
                    SeriesVerdict {
                        holds: true,
                        reason: format!("(ln i)^{} grows faster than ln i", 2.0 * beta),
                    }
                } else if *beta == 0.5 {
                    SeriesVerdict {
                        holds: false,
                        reason: format!(
                            "terms equal (i+1)^(-alpha*{}); the sum diverges for alpha <= {}",
                            c * c,
                            1.0 / (c * c)
                        ),
                    }
                } else {
                    SeriesVerdict {
                        holds: false,
                        reason: "x_i^2 grows slower than ln i; the sum diverges for every alpha".into(),
                    }
                }
            }
            InitFamily::Explicit { tail, .. } => tail.series_condition(),
        }
    }
}

/// Infinite system with coefficients constant from rank `n0` on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfiniteSystemSpec {
    pub n0: usize,
    pub g_head: Vec<f64>,
    pub sigma2_head: Vec<f64>,
    pub g_tail: f64,
    pub sigma2_tail: f64,
    pub init: InitFamily,
}

impl InfiniteSystemSpec {
    /// Parses a JSON document, rejecting unknown `init.kind` values with
    /// [`Error::UnsupportedFamily`] before structural deserialization.
    pub fn from_json(doc: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(doc)?;
        Self::from_value(value)
    }

    pub fn from_value(value: Value) -> Result<Self> {
        if let Some(init) = value.get("init") {
            check_family_kind(init)?;
        }
        Ok(serde_json::from_value(value)?)
    }

    /// Drift of rank `k` (0-based).
    pub fn drift(&self, k: usize) -> f64 {
        self.g_head.get(k).copied().unwrap_or(self.g_tail)
    }

    /// Diffusion coefficient of rank `k` (0-based).
    pub fn diffusion(&self, k: usize) -> f64 {
        self.sigma2_head.get(k).copied().unwrap_or(self.sigma2_tail)
    }

    /// Exact supremum and infimum of the diffusion sequence.
    pub fn diffusion_bounds(&self) -> (f64, f64) {
        self.sigma2_head
            .iter()
            .fold((self.sigma2_tail, self.sigma2_tail), |(hi, lo), &s| (hi.max(s), lo.min(s)))
    }

    pub fn validate(&self) -> ValidationReport {
        self.gate_violations().into_iter().fold(ValidationReport::default(), |mut r, (_, m)| {
            r.push(m);
            r
        })
    }

    /// Every violation tagged with the gate it belongs to.
    pub fn gate_violations(&self) -> Vec<(crate::error::Gate, String)> {
        use crate::error::Gate;
        let mut out = Vec::new();
        if self.n0 < 1 {
            out.push((Gate::ConstantTail, "n0 must be >= 1".to_string()));
        }
        let head = self.n0.saturating_sub(1);
        if self.g_head.len() != head {
            out.push((
                Gate::ConstantTail,
                format!("g_head has {} entries, expected n0 - 1 = {head}", self.g_head.len()),
            ));
        }
        if self.sigma2_head.len() != head {
            out.push((
                Gate::ConstantTail,
                format!("sigma2_head has {} entries, expected n0 - 1 = {head}", self.sigma2_head.len()),
            ));
        }
        for (k, &s) in self.sigma2_head.iter().enumerate() {
            if !s.is_finite() || s <= 0.0 {
                out.push((Gate::BoundedCoefficients, format!("sigma2_head[{}] must be > 0 (got {s})", k + 1)));
            }
        }
        for (k, &v) in self.g_head.iter().enumerate() {
            if !v.is_finite() {
                out.push((Gate::BoundedCoefficients, format!("g_head[{}] must be finite", k + 1)));
            }
        }
        if !self.g_tail.is_finite() {
            out.push((Gate::BoundedCoefficients, "g_tail must be finite".to_string()));
        }
        if !self.sigma2_tail.is_finite() || self.sigma2_tail <= 0.0 {
            out.push((
                Gate::BoundedCoefficients,
                format!("sigma2_tail must be finite and > 0 (got {})", self.sigma2_tail),
            ));
        }
        let mut params = Vec::new();
        self.init.parameter_violations(&mut params, false);
        out.extend(params.into_iter().map(|m| (Gate::SeriesCondition, m)));
        let verdict = self.init.series_condition();
        if !verdict.holds {
            out.push((Gate::SeriesCondition, format!("series condition fails: {}", verdict.reason)));
        }
        out
    }

    /// Fails with the first violated gate.
    pub fn ensure_valid(&self) -> Result<()> {
        match self.gate_violations().into_iter().next() {
            Some((gate, detail)) => Err(Error::Precondition { gate, detail }),
            None => Ok(()),
        }
    }

    /// The finite system formed by the lowest `m` ranks and names.
    pub fn truncate(&self, m: usize) -> FiniteSystemSpec {
        FiniteSystemSpec {
            n: m,
            g: (0..m).map(|k| self.drift(k)).collect(),
            sigma2: (0..m).map(|k| self.diffusion(k)).collect(),
            x0: self.init.positions(m),
        }
    }
}

fn check_family_kind(init: &Value) -> Result<()> {
    let kind = init.get("kind").and_then(Value::as_str).unwrap_or("<missing>");
    if !FAMILY_KINDS.contains(&kind) {
        return Err(Error::UnsupportedFamily(kind.to_string()));
    }
    if let Some(tail) = init.get("tail") {
        check_family_kind(tail)?;
    }
    Ok(())
}

pub fn validate_finite_spec(spec: &FiniteSystemSpec) -> ValidationReport {
    spec.validate()
}

/// Structural report for an infinite spec. Errors only for an unsupported
/// family, which cannot occur once the spec is a typed value.
pub fn validate_infinite_spec(spec: &InfiniteSystemSpec) -> Result<ValidationReport> {
    Ok(spec.validate())
}

/// Either kind of system document; infinite documents carry `n0`.
#[derive(Debug, Clone, PartialEq)]
pub enum SystemSpec {
    Finite(FiniteSystemSpec),
    Infinite(InfiniteSystemSpec),
}

impl SystemSpec {
    pub fn from_json(doc: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(doc)?;
        if value.get("n0").is_some() {
            Ok(SystemSpec::Infinite(InfiniteSystemSpec::from_value(value)?))
        } else {
            Ok(SystemSpec::Finite(serde_json::from_value(value)?))
        }
    }

    pub fn validate(&self) -> ValidationReport {
        match self {
            SystemSpec::Finite(s) => s.validate(),
            SystemSpec::Infinite(s) => s.validate(),
        }
    }
}
