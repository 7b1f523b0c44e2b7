//! Sufficient conditions for absence of multiple collisions.
//!
//! Every checker returns a [`ConditionReport`] whose margin is
//! `right-hand side - left-hand side` of the governing inequality, so a
//! positive margin means the condition holds with room to spare. Compound
//! checks (window reduction, the four-particle family) report the minimum
//! margin over their parts.

mod sphere;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::InfiniteSystemSpec;

pub use sphere::{hyperplane_basis, sphere_max};

/// Criterion identifiers. The serialized names are the stable wire ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Criterion {
    /// Diffusion sequence is concave (no triple collisions).
    #[serde(rename = "CONCAVITY")]
    Concavity,
    /// Sphere maximum below `(N-1)/(2N) * sum` (no total collision).
    #[serde(rename = "LEMMA21")]
    SphereTotal,
    /// `max <= (N-1)/(2N) * sum` (no total collision).
    #[serde(rename = "COR22")]
    SumTotal,
    /// Four-particle form `max < 3/8 * sum`.
    #[serde(rename = "EQ_TOTAL4")]
    FourTotal,
    /// `max <= (N-1)/2 * min` (no total collision).
    #[serde(rename = "COR24")]
    RatioTotal,
    /// `max < (n-1)/2 * min` (no n-tuple collisions).
    #[serde(rename = "THM11")]
    NTupleRatio,
    /// Four particles, ranks 1-3 never meet.
    #[serde(rename = "LEMMA31A")]
    FourTripleLow,
    /// Four particles, ranks 2-4 never meet.
    #[serde(rename = "LEMMA31B")]
    FourTripleHigh,
    /// Four particles, no simultaneous 1=2 and 3=4.
    #[serde(rename = "LEMMA31C")]
    FourSimultaneous,
    /// Conjunction of total-collision checks over all enclosing windows.
    #[serde(rename = "WINDOW_REDUCTION")]
    WindowReduction,
    /// `sup < (n-1)/2 * inf` for an infinite system.
    #[serde(rename = "THM42")]
    InfiniteNTuple,
}

impl Criterion {
    pub const ALL: [Criterion; 11] = [
        Criterion::Concavity,
        Criterion::SphereTotal,
        Criterion::SumTotal,
        Criterion::FourTotal,
        Criterion::RatioTotal,
        Criterion::NTupleRatio,
        Criterion::FourTripleLow,
        Criterion::FourTripleHigh,
        Criterion::FourSimultaneous,
        Criterion::WindowReduction,
        Criterion::InfiniteNTuple,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Criterion::Concavity => "CONCAVITY",
            Criterion::SphereTotal => "LEMMA21",
            Criterion::SumTotal => "COR22",
            Criterion::FourTotal => "EQ_TOTAL4",
            Criterion::RatioTotal => "COR24",
            Criterion::NTupleRatio => "THM11",
            Criterion::FourTripleLow => "LEMMA31A",
            Criterion::FourTripleHigh => "LEMMA31B",
            Criterion::FourSimultaneous => "LEMMA31C",
            Criterion::WindowReduction => "WINDOW_REDUCTION",
            Criterion::InfiniteNTuple => "THM42",
        }
    }

    /// Inequality sense as stated for the criterion.
    pub fn stated_strict(self) -> bool {
        !matches!(self, Criterion::Concavity | Criterion::SumTotal | Criterion::RatioTotal)
    }

    /// Sense used when the caller gives no override. The sum bound is
    /// stated with `<=` in general but with `<` in its four-particle form;
    /// the strict reading is the default.
    pub fn default_strict(self) -> bool {
        match self {
            Criterion::SumTotal => true,
            c => c.stated_strict(),
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let up = s.trim().to_ascii_uppercase();
        Criterion::ALL
            .into_iter()
            .find(|c| c.id() == up)
            .ok_or_else(|| invalid(format!("unknown criterion `{s}`")))
    }
}

/// Total-collision criteria usable inside a window reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TotalCriterion {
    Sphere,
    Sum,
    Ratio,
}

impl TotalCriterion {
    pub fn criterion(self) -> Criterion {
        match self {
            TotalCriterion::Sphere => Criterion::SphereTotal,
            TotalCriterion::Sum => Criterion::SumTotal,
            TotalCriterion::Ratio => Criterion::RatioTotal,
        }
    }

    pub fn check(self, sigma2: &[f64], strict: Option<bool>) -> Result<ConditionReport> {
        match self {
            TotalCriterion::Sphere => sphere_total_check(sigma2, strict),
            TotalCriterion::Sum => sum_total_check(sigma2, strict),
            TotalCriterion::Ratio => ratio_total_check(sigma2, strict),
        }
    }
}

impl TryFrom<Criterion> for TotalCriterion {
    type Error = Error;

    fn try_from(c: Criterion) -> Result<Self> {
        match c {
            Criterion::SphereTotal => Ok(TotalCriterion::Sphere),
            Criterion::SumTotal => Ok(TotalCriterion::Sum),
            Criterion::RatioTotal => Ok(TotalCriterion::Ratio),
            other => Err(invalid(format!("{other} is not a total-collision criterion (use LEMMA21, COR22 or COR24)"))),
        }
    }
}

impl FromStr for TotalCriterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.parse::<Criterion>()?.try_into()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub criterion: Criterion,
    pub holds: bool,
    pub margin: f64,
    pub strict: bool,
    /// Enclosing rank window `(l_minus, l_plus)`, 1-based, for windowed checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inputs: Vec<f64>,
    #[serde(default)]
    pub details: Vec<ConditionReport>,
}

impl ConditionReport {
    /// Leaf verdict for `lhs (<|<=) rhs`.
    fn compare(criterion: Criterion, lhs: f64, rhs: f64, strict: Option<bool>) -> Self {
        let strict_used = strict.unwrap_or_else(|| criterion.default_strict());
        let margin = rhs - lhs;
        let note = (strict_used != criterion.stated_strict()).then(|| {
            format!(
                "evaluated with {}; stated with {}",
                sense(strict_used),
                sense(criterion.stated_strict())
            )
        });
        Self {
            criterion,
            holds: verdict(margin, strict_used),
            margin,
            strict: strict_used,
            window: None,
            label: None,
            note,
            inputs: Vec::new(),
            details: Vec::new(),
        }
    }

    /// Conjunction of `parts`. The margin is the smallest part margin and the
    /// strictness is that of the binding part (strict wins ties), so
    /// `holds` stays consistent with `margin` and `strict`.
    fn all_of(criterion: Criterion, parts: Vec<ConditionReport>) -> Self {
        debug_assert!(!parts.is_empty());
        let margin = parts.iter().map(|p| p.margin).fold(f64::INFINITY, f64::min);
        let strict = parts.iter().any(|p| p.margin == margin && p.strict);
        Self {
            criterion,
            holds: parts.iter().all(|p| p.holds),
            margin,
            strict,
            window: None,
            label: None,
            note: None,
            inputs: Vec::new(),
            details: parts,
        }
    }

    fn with_inputs(mut self, inputs: &[f64]) -> Self {
        self.inputs = inputs.to_vec();
        self
    }

    fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }
}

fn sense(strict: bool) -> &'static str {
    if strict {
        "<"
    } else {
        "<="
    }
}

fn verdict(margin: f64, strict: bool) -> bool {
    if strict {
        margin > 0.0
    } else {
        margin >= 0.0
    }
}

fn check_coefficients(sigma2: &[f64], min_len: usize) -> Result<()> {
    if sigma2.len() < min_len {
        return Err(invalid(format!(
            "need at least {min_len} diffusion coefficients, got {}",
            sigma2.len()
        )));
    }
    match sigma2.iter().position(|&s| !(s.is_finite() && s > 0.0)) {
        Some(k) => Err(invalid(format!("sigma2[{}] must be finite and > 0 (got {})", k + 1, sigma2[k]))),
        None => Ok(()),
    }
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn min_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

/// `(N-1)/(2N) * sum`
fn total_threshold(sigma2: &[f64]) -> f64 {
    let n = sigma2.len() as f64;
    (n - 1.0) * sigma2.iter().sum::<f64>() / (2.0 * n)
}

/// `sigma2[k] >= (sigma2[k-1] + sigma2[k+1]) / 2` at every interior rank:
/// each coefficient is at least the mean of its two neighbours.
pub fn concavity(sigma2: &[f64], strict: Option<bool>) -> Result<ConditionReport> {
    check_coefficients(sigma2, 3)?;
    let parts: Vec<ConditionReport> = (1..sigma2.len() - 1)
        .map(|k| interior_concavity(sigma2, k, strict))
        .collect();
    let mut report = ConditionReport::all_of(Criterion::Concavity, parts);
    report.note = report.details[0].note.clone();
    Ok(report.with_inputs(sigma2))
}

/// Concavity slack at the single interior rank `k` (0-based).
fn interior_concavity(sigma2: &[f64], k: usize, strict: Option<bool>) -> ConditionReport {
    let mid = 0.5 * (sigma2[k - 1] + sigma2[k + 1]);
    // sigma2[k] >= mid  <=>  mid <= sigma2[k]
    ConditionReport::compare(Criterion::Concavity, mid, sigma2[k], strict).with_label(format!("rank {}", k + 1))
}

pub fn sphere_total_check(sigma2: &[f64], strict: Option<bool>) -> Result<ConditionReport> {
    check_coefficients(sigma2, 2)?;
    let lhs = sphere_max(sigma2)?;
    Ok(ConditionReport::compare(Criterion::SphereTotal, lhs, total_threshold(sigma2), strict).with_inputs(sigma2))
}

pub fn sum_total_check(sigma2: &[f64], strict: Option<bool>) -> Result<ConditionReport> {
    check_coefficients(sigma2, 2)?;
    Ok(ConditionReport::compare(Criterion::SumTotal, max_of(sigma2), total_threshold(sigma2), strict)
        .with_inputs(sigma2))
}

pub fn four_total_check(sigma2: &[f64], strict: Option<bool>) -> Result<ConditionReport> {
    if sigma2.len() != 4 {
        return Err(invalid(format!("four-particle check needs exactly 4 coefficients, got {}", sigma2.len())));
    }
    check_coefficients(sigma2, 4)?;
    let rhs = 3.0 * sigma2.iter().sum::<f64>() / 8.0;
    Ok(ConditionReport::compare(Criterion::FourTotal, max_of(sigma2), rhs, strict).with_inputs(sigma2))
}

pub fn ratio_total_check(sigma2: &[f64], strict: Option<bool>) -> Result<ConditionReport> {
    check_coefficients(sigma2, 2)?;
    let n = sigma2.len() as f64;
    let rhs = (n - 1.0) * min_of(sigma2) / 2.0;
    Ok(ConditionReport::compare(Criterion::RatioTotal, max_of(sigma2), rhs, strict).with_inputs(sigma2))
}

/// `max_k sigma2 < (n-1)/2 * min_k sigma2` over all `N` coefficients, `4 <= n <= N`.
pub fn ntuple_ratio_check(sigma2: &[f64], n: usize, strict: Option<bool>) -> Result<ConditionReport> {
    check_coefficients(sigma2, 2)?;
    if n < 4 || n > sigma2.len() {
        return Err(invalid(format!("tuple size n = {n} must satisfy 4 <= n <= N = {}", sigma2.len())));
    }
    let rhs = (n as f64 - 1.0) * min_of(sigma2) / 2.0;
    Ok(ConditionReport::compare(Criterion::NTupleRatio, max_of(sigma2), rhs, strict)
        .with_inputs(sigma2)
        .with_label(format!("n = {n}")))
}

/// Enclosing rank window, 1-based and inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WindowPair {
    pub l_minus: usize,
    pub l_plus: usize,
}

impl WindowPair {
    pub fn new(l_minus: usize, l_plus: usize, n: usize) -> Result<Self> {
        if !(1 <= l_minus && l_minus < l_plus && l_plus <= n) {
            return Err(invalid(format!(
                "window ({l_minus}, {l_plus}) must satisfy 1 <= l_minus < l_plus <= N = {n}"
            )));
        }
        Ok(Self { l_minus, l_plus })
    }

    pub fn len(&self) -> usize {
        self.l_plus - self.l_minus + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn slice<'a>(&self, sigma2: &'a [f64]) -> &'a [f64] {
        &sigma2[self.l_minus - 1..self.l_plus]
    }
}

/// Applies a total-collision criterion to the subsystem of ranks in `w`.
pub fn window_total_check(
    sigma2: &[f64],
    w: WindowPair,
    criterion: TotalCriterion,
    strict: Option<bool>,
) -> Result<ConditionReport> {
    check_coefficients(sigma2, 2)?;
    let w = WindowPair::new(w.l_minus, w.l_plus, sigma2.len())?;
    let mut report = criterion.check(w.slice(sigma2), strict)?;
    report.window = Some((w.l_minus, w.l_plus));
    Ok(report)
}

struct WindowCache<'a> {
    sigma2: &'a [f64],
    criterion: TotalCriterion,
    strict: Option<bool>,
    seen: HashMap<(usize, usize), ConditionReport>,
}

impl WindowCache<'_> {
    fn get(&mut self, l_minus: usize, l_plus: usize) -> Result<ConditionReport> {
        if let Some(r) = self.seen.get(&(l_minus, l_plus)) {
            return Ok(r.clone());
        }
        let w = WindowPair { l_minus, l_plus };
        let r = window_total_check(self.sigma2, w, self.criterion, self.strict)?;
        self.seen.insert((l_minus, l_plus), r.clone());
        Ok(r)
    }

    fn rank_report(&mut self, k_minus: usize, k_plus: usize) -> Result<ConditionReport> {
        let n = self.sigma2.len();
        let mut parts = Vec::with_capacity(k_minus * (n - k_plus + 1));
        for l_minus in 1..=k_minus {
            for l_plus in k_plus..=n {
                parts.push(self.get(l_minus, l_plus)?);
            }
        }
        Ok(ConditionReport::all_of(Criterion::WindowReduction, parts)
            .with_label(format!("ranks {k_minus}..{k_plus} via {}", self.criterion.criterion())))
    }
}

/// No collision of the particles ranked `k_minus..=k_plus` (1-based): every
/// enclosing window `l_minus <= k_minus < k_plus <= l_plus` must be free of
/// total collisions under `criterion`.
pub fn no_rank_collision_check(
    sigma2: &[f64],
    k_minus: usize,
    k_plus: usize,
    criterion: TotalCriterion,
    strict: Option<bool>,
) -> Result<ConditionReport> {
    check_coefficients(sigma2, 2)?;
    WindowPair::new(k_minus, k_plus, sigma2.len())?;
    let mut cache = WindowCache { sigma2, criterion, strict, seen: HashMap::new() };
    Ok(cache.rank_report(k_minus, k_plus)?.with_inputs(sigma2))
}

/// No `n`-tuple collisions: the rank check for every block of `n`
/// consecutive ranks.
pub fn no_ntuple_check(
    sigma2: &[f64],
    n: usize,
    criterion: TotalCriterion,
    strict: Option<bool>,
) -> Result<ConditionReport> {
    check_coefficients(sigma2, 2)?;
    let big_n = sigma2.len();
    if n < 2 || n > big_n {
        return Err(invalid(format!("tuple size n = {n} must satisfy 2 <= n <= N = {big_n}")));
    }
    let mut cache = WindowCache { sigma2, criterion, strict, seen: HashMap::new() };
    let parts = (1..=big_n + 1 - n)
        .map(|k| cache.rank_report(k, k + n - 1))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConditionReport::all_of(Criterion::WindowReduction, parts)
        .with_inputs(sigma2)
        .with_label(format!("n = {n} via {}", criterion.criterion())))
}

/// Reports for the four collision types of a four-particle system: total,
/// triple at ranks 1-3, triple at ranks 2-4, and simultaneous pairs 1=2, 3=4.
pub fn four_particle_report(sigma2: &[f64]) -> Result<Vec<ConditionReport>> {
    let total = four_total_check(sigma2, None)?;
    let low = ConditionReport::all_of(
        Criterion::FourTripleLow,
        vec![total.clone(), interior_concavity(sigma2, 1, None)],
    )
    .with_label("ranks 1-3");
    let high = ConditionReport::all_of(
        Criterion::FourTripleHigh,
        vec![total.clone(), interior_concavity(sigma2, 2, None)],
    )
    .with_label("ranks 2-4");
    let simultaneous =
        ConditionReport::all_of(Criterion::FourSimultaneous, vec![total.clone()]).with_label("ranks 1=2 and 3=4");
    Ok(vec![
        total.with_label("ranks 1-4"),
        low.with_inputs(sigma2),
        high.with_inputs(sigma2),
        simultaneous.with_inputs(sigma2),
    ])
}

/// `sup sigma2 < (n-1)/2 * inf sigma2` for an infinite system whose spec
/// passes every validity gate.
pub fn infinite_ntuple_check(spec: &InfiniteSystemSpec, n: usize, strict: Option<bool>) -> Result<ConditionReport> {
    spec.ensure_valid()?;
    if n < 4 {
        return Err(invalid(format!("tuple size n = {n} must be >= 4")));
    }
    let (sup, inf) = spec.diffusion_bounds();
    let rhs = (n as f64 - 1.0) * inf / 2.0;
    Ok(ConditionReport::compare(Criterion::InfiniteNTuple, sup, rhs, strict)
        .with_inputs(&[sup, inf])
        .with_label(format!("n = {n}")))
}

/// Evaluates any finite-system criterion by id. `n` is the collision order
/// for THM11 and WINDOW_REDUCTION (defaults to N); `window` is the total
/// criterion applied inside each window by WINDOW_REDUCTION.
pub fn check_criterion(
    sigma2: &[f64],
    criterion: Criterion,
    n: Option<usize>,
    window: TotalCriterion,
    strict: Option<bool>,
) -> Result<ConditionReport> {
    let order = n.unwrap_or(sigma2.len());
    match criterion {
        Criterion::Concavity => concavity(sigma2, strict),
        Criterion::SphereTotal => sphere_total_check(sigma2, strict),
        Criterion::SumTotal => sum_total_check(sigma2, strict),
        Criterion::RatioTotal => ratio_total_check(sigma2, strict),
        Criterion::FourTotal => four_total_check(sigma2, strict),
        Criterion::NTupleRatio => ntuple_ratio_check(sigma2, order, strict),
        Criterion::WindowReduction => no_ntuple_check(sigma2, order, window, strict),
        Criterion::FourTripleLow | Criterion::FourTripleHigh | Criterion::FourSimultaneous => Ok(four_particle_report(sigma2)?
            .into_iter()
            .find(|r| r.criterion == criterion)
            .expect("four-particle report covers every type")),
        Criterion::InfiniteNTuple => Err(invalid("criterion THM42 needs an infinite system spec")),
    }
}

/// CSV with columns `criterion,holds,margin`, one line per top-level report.
pub fn reports_to_csv(reports: &[ConditionReport]) -> String {
    let mut out = String::from("criterion,holds,margin\n");
    for r in reports {
        out.push_str(&format!("{},{},{}\n", r.criterion, r.holds, r.margin));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::InitFamily;

    fn full(n: usize) -> WindowPair {
        WindowPair { l_minus: 1, l_plus: n }
    }

    #[test]
    fn concavity_examples() {
        let r = concavity(&[2.0, 1.5, 1.0], None).unwrap();
        assert!(r.holds && r.margin == 0.0 && !r.strict);
        let r = concavity(&[1.0, 0.4, 1.0], None).unwrap();
        assert!(!r.holds);
        assert!((r.margin + 0.6).abs() < 1e-15);
        assert!(concavity(&[1.0; 4], None).unwrap().holds);
        assert!(concavity(&[1.0, 1.0], None).is_err());
        assert!(concavity(&[2.0, 1.5, 1.0], Some(true)).unwrap().note.is_some());
        assert!(!concavity(&[2.0, 1.5, 1.0], Some(true)).unwrap().holds);
    }

    #[test]
    fn sphere_total_examples() {
        let r = sphere_total_check(&[1.0; 4], None).unwrap();
        assert!(r.holds && r.strict);
        assert_eq!(r.margin, 0.5);
        let r = sphere_total_check(&[2.0, 1.0, 1.0, 1.0], None).unwrap();
        assert!(r.holds);
        assert!((r.margin - 0.125).abs() < 1e-12);
        let r = sphere_total_check(&[1.0, 1.0], None).unwrap();
        assert!(!r.holds);
        assert_eq!(r.margin, -0.5);
    }

    #[test]
    fn sum_total_examples() {
        let r = sum_total_check(&[1.0, 0.5, 0.5, 1.0], None).unwrap();
        assert!(r.holds && r.strict && r.note.is_some());
        assert_eq!(r.margin, 0.125);
        let inverse_middle = [1.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 1.0];
        assert!(sum_total_check(&inverse_middle, None).unwrap().holds);
        let r = sum_total_check(&[2.0, 1.0, 1.0, 1.0], None).unwrap();
        assert!(!r.holds);
        assert_eq!(r.margin, -0.125);
        assert!(sum_total_check(&[2.0, 1.0, 1.0, 1.0], Some(false)).unwrap().note.is_none());
    }

    #[test]
    fn four_total_examples() {
        assert!(four_total_check(&[1.0, 0.5, 0.5, 1.0], None).unwrap().holds);
        let r = four_total_check(&[1.0; 4], None).unwrap();
        assert!(r.holds && r.margin == 0.5);
        let r = four_total_check(&[3.0, 1.0, 1.0, 1.0], None).unwrap();
        assert!(!r.holds && r.margin == -0.75);
        assert!(four_total_check(&[1.0; 5], None).is_err());
    }

    #[test]
    fn ratio_total_examples() {
        assert!(ratio_total_check(&[1.0; 4], None).unwrap().holds);
        assert!(!ratio_total_check(&[2.0, 1.0, 1.0, 1.0], None).unwrap().holds);
        let r = ratio_total_check(&[1.5, 1.0, 1.0, 1.0], None).unwrap();
        assert!(r.holds && r.margin == 0.0 && !r.strict);
    }

    #[test]
    fn ntuple_ratio_examples() {
        assert!(ntuple_ratio_check(&[1.0; 5], 4, None).unwrap().holds);
        let r = ntuple_ratio_check(&[2.0, 1.0, 1.0, 1.0], 4, None).unwrap();
        assert!(!r.holds && r.margin == -0.5);
        let r = ntuple_ratio_check(&[2.0, 1.0, 1.0, 1.0, 1.0], 5, None).unwrap();
        assert!(!r.holds && r.margin == 0.0);
        assert!(ntuple_ratio_check(&[1.0; 5], 3, None).is_err());
        assert!(ntuple_ratio_check(&[1.0; 5], 6, None).is_err());
    }

    #[test]
    fn window_examples() {
        let s = [2.0, 1.0, 1.0, 1.0];
        for c in [TotalCriterion::Sphere, TotalCriterion::Sum, TotalCriterion::Ratio] {
            let w = window_total_check(&s, full(4), c, None).unwrap();
            let whole = c.check(&s, None).unwrap();
            assert_eq!((w.holds, w.margin), (whole.holds, whole.margin));
        }
        let w = WindowPair::new(2, 4, 5).unwrap();
        assert!(window_total_check(&[1.0; 5], w, TotalCriterion::Ratio, None).unwrap().holds);
        let w = WindowPair::new(2, 4, 4).unwrap();
        assert!(window_total_check(&s, w, TotalCriterion::Ratio, None).unwrap().holds);
        assert!(!ratio_total_check(&s, None).unwrap().holds);
        assert!(WindowPair::new(3, 3, 4).is_err());
        assert!(WindowPair::new(0, 2, 4).is_err());
        assert!(window_total_check(&s, WindowPair { l_minus: 2, l_plus: 5 }, TotalCriterion::Ratio, None).is_err());
    }

    #[test]
    fn rank_collision_examples() {
        let r = no_rank_collision_check(&[1.0; 4], 1, 4, TotalCriterion::Ratio, None).unwrap();
        assert_eq!(r.details.len(), 1);
        assert_eq!(r.details[0].window, Some((1, 4)));

        let r = no_rank_collision_check(&[1.0; 5], 2, 5, TotalCriterion::Ratio, None).unwrap();
        assert!(r.holds);
        assert_eq!(r.details.len(), 2);

        let r = no_rank_collision_check(&[2.0, 1.0, 1.0, 1.0], 1, 4, TotalCriterion::Sphere, None).unwrap();
        assert!(r.holds);
        assert!((r.margin - 0.125).abs() < 1e-12);
        assert!(no_rank_collision_check(&[1.0; 4], 3, 2, TotalCriterion::Ratio, None).is_err());
    }

    #[test]
    fn ntuple_examples() {
        let s = [1.3, 0.7, 1.1, 0.9, 1.2];
        let a = no_ntuple_check(&s, 5, TotalCriterion::Sphere, None).unwrap();
        let b = no_rank_collision_check(&s, 1, 5, TotalCriterion::Sphere, None).unwrap();
        assert_eq!((a.holds, a.margin), (b.holds, b.margin));
        assert!(no_ntuple_check(&[1.0; 5], 4, TotalCriterion::Ratio, None).unwrap().holds);
        // pairs always collide
        assert!(!no_ntuple_check(&[1.0; 5], 2, TotalCriterion::Sphere, None).unwrap().holds);
        assert!(no_ntuple_check(&[1.0; 5], 1, TotalCriterion::Sphere, None).is_err());
        assert!(no_ntuple_check(&[1.0; 5], 6, TotalCriterion::Sphere, None).is_err());
    }

    #[test]
    fn four_particle_examples() {
        let all = four_particle_report(&[1.0; 4]).unwrap();
        let ids: Vec<_> = all.iter().map(|r| r.criterion.id()).collect();
        assert_eq!(ids, ["EQ_TOTAL4", "LEMMA31A", "LEMMA31B", "LEMMA31C"]);
        assert!(all.iter().all(|r| r.holds));

        let r = four_particle_report(&[1.0, 0.5, 0.5, 1.0]).unwrap();
        assert!(r[0].holds);
        assert!(!r[1].holds);
        assert_eq!(r[1].details[1].margin, -0.25);
        assert!(r[3].holds);

        let r = four_particle_report(&[1.0, 1.0, 0.9, 0.8]).unwrap();
        let extra = &r[2].details[1];
        assert!(extra.holds && extra.margin == 0.0);
        assert!(r[2].holds && r[2].margin == 0.0 && !r[2].strict);
    }

    #[test]
    fn compound_strictness_follows_binding_part() {
        // total margin exactly 0 under a strict comparison: the compound must fail
        let s = [9.0, 5.0, 5.0, 5.0];
        let r = four_particle_report(&s).unwrap();
        assert_eq!(r[0].margin, 0.0);
        assert!(!r[0].holds);
        assert!(!r[3].holds && r[3].strict);
    }

    fn inf_spec(head: Vec<f64>) -> InfiniteSystemSpec {
        InfiniteSystemSpec {
            n0: head.len() + 1,
            g_head: vec![0.0; head.len()],
            sigma2_head: head,
            g_tail: 0.0,
            sigma2_tail: 1.0,
            init: InitFamily::Linear { a: 0.0, b: 1.0 },
        }
    }

    #[test]
    fn infinite_examples() {
        assert!(infinite_ntuple_check(&inf_spec(vec![1.2, 1.4]), 4, None).unwrap().holds);
        assert!(!infinite_ntuple_check(&inf_spec(vec![2.0]), 4, None).unwrap().holds);
        assert!(infinite_ntuple_check(&inf_spec(vec![2.0]), 6, None).unwrap().holds);
        let mut bad = inf_spec(vec![1.0]);
        bad.init = InitFamily::LogPower { c: 1.0, beta: 0.5 };
        assert!(matches!(infinite_ntuple_check(&bad, 4, None), Err(Error::Precondition { .. })));
    }

    #[test]
    fn report_json_shape() {
        let r = sum_total_check(&[1.0, 0.5, 0.5, 1.0], None).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        for key in ["criterion", "holds", "margin", "strict", "details"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["criterion"], "COR22");
        let back: ConditionReport = serde_json::from_value(v).unwrap();
        assert_eq!(back, r);
        assert_eq!(reports_to_csv(&[r]), "criterion,holds,margin\nCOR22,true,0.125\n");
    }

    #[test]
    fn criterion_parsing() {
        assert_eq!("lemma21".parse::<Criterion>().unwrap(), Criterion::SphereTotal);
        assert_eq!("COR24".parse::<TotalCriterion>().unwrap(), TotalCriterion::Ratio);
        assert!("THM11".parse::<TotalCriterion>().is_err());
        assert!("nope".parse::<Criterion>().is_err());
    }
}
