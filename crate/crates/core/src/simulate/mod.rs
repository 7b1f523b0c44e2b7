//! Euler-Maruyama simulation of rank-based competing Brownian particles.
//!
//! Ranks are frozen within a step: every particle moves with the drift and
//! diffusion of the rank it held at the start of the step, then the system
//! is re-ranked. Collision events are observed only through the spread of
//! tracked rank windows at grid times (`Y_{k+n-1} - Y_k < eps`).

mod aggregate;
pub mod rng;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::{FiniteSystemSpec, InfiniteSystemSpec, RankingPermutation};

pub use aggregate::{Aggregate, ComSummary, ConvergenceReport, ConvergenceRow, ProximitySummary, TruncationSummary, WindowSummary};
pub use rng::{derive_stream, standard_normal, PathStream};

pub const DEFAULT_EPSILONS: [f64; 3] = [1e-1, 1e-2, 1e-3];
pub const DEFAULT_DT: f64 = 1e-3;
const DEFAULT_MAX_STEPS: usize = 100_000_000;

/// Ranks `k..=k+n-1` (1-based) whose spread is monitored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TrackedWindow {
    pub k: usize,
    pub n: usize,
}

impl TrackedWindow {
    pub fn top(&self) -> usize {
        self.k + self.n - 1
    }

    /// Every window of width `n` inside ranks `1..=limit`.
    pub fn all_of_width(n: usize, limit: usize) -> Vec<TrackedWindow> {
        if n < 2 || n > limit {
            return Vec::new();
        }
        (1..=limit + 1 - n).map(|k| TrackedWindow { k, n }).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    #[serde(rename = "T")]
    pub horizon: f64,
    pub dt: f64,
    pub paths: usize,
    pub seed: u64,
    pub epsilons: Vec<f64>,
    pub track_windows: Vec<TrackedWindow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation_m: Option<usize>,
    #[serde(default)]
    pub buffer_b: usize,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
}

fn default_max_steps() -> usize {
    DEFAULT_MAX_STEPS
}

impl SimConfig {
    pub fn new(horizon: f64, dt: f64, paths: usize, seed: u64) -> Self {
        Self {
            horizon,
            dt,
            paths,
            seed,
            epsilons: DEFAULT_EPSILONS.to_vec(),
            track_windows: Vec::new(),
            truncation_m: None,
            buffer_b: 0,
            max_steps: DEFAULT_MAX_STEPS,
        }
    }

    pub fn with_windows(mut self, windows: Vec<TrackedWindow>) -> Self {
        self.track_windows = windows;
        self
    }

    pub fn with_epsilons(mut self, eps: Vec<f64>) -> Self {
        self.epsilons = eps;
        self
    }

    pub fn with_truncation(mut self, m: usize, b: usize) -> Self {
        self.truncation_m = Some(m);
        self.buffer_b = b;
        self
    }

    /// Checks the configuration against the highest rank that may be tracked.
    pub fn validate(&self, rank_limit: usize) -> Result<()> {
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(invalid(format!("T must be > 0 (got {})", self.horizon)));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(invalid(format!("dt must be > 0 (got {})", self.dt)));
        }
        if self.dt > self.horizon {
            return Err(invalid(format!("dt = {} exceeds T = {}", self.dt, self.horizon)));
        }
        if self.paths == 0 {
            return Err(invalid("paths must be >= 1"));
        }
        if let Some(e) = self.epsilons.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
            return Err(invalid(format!("epsilon {e} must be > 0")));
        }
        for w in &self.track_windows {
            if w.k < 1 || w.n < 2 || w.top() > rank_limit {
                return Err(invalid(format!(
                    "tracked window k={}, n={} must satisfy k >= 1, n >= 2, k+n-1 <= {rank_limit}",
                    w.k, w.n
                )));
            }
        }
        Ok(())
    }

    /// Number of steps and the length of the final step. All steps but the
    /// last have length `dt`; the last one ends exactly at `T`.
    pub fn grid(&self) -> Result<(usize, f64)> {
        let ratio = self.horizon / self.dt;
        let nearest = ratio.round();
        let steps = if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) { nearest } else { ratio.ceil() };
        if !(steps.is_finite() && steps <= self.max_steps as f64) {
            return Err(Error::Resource(format!(
                "grid of {ratio:.0} steps exceeds the cap of {} steps",
                self.max_steps
            )));
        }
        let steps = (steps as usize).max(1);
        let last = self.horizon - (steps - 1) as f64 * self.dt;
        Ok((steps, last))
    }
}

/// Summary of one simulated path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathStats {
    /// Per tracked window, the smallest spread seen on the grid.
    pub min_spread: Vec<f64>,
    /// `[window][epsilon]`: grid times with spread below epsilon.
    pub proximity_counts: Vec<Vec<u64>>,
    /// `sum X_i(T) - sum X_i(0)`.
    pub com_end: f64,
    pub boundary_contact: bool,
    /// Smallest adjacent ranked gap seen on the grid.
    pub min_gap: f64,
    pub steps: usize,
}

/// One Euler-Maruyama step with ranks frozen at the start of the step:
/// the particle of rank `k` moves by `g[k] dt + sqrt(sigma2[k] dt) z[name]`.
pub fn step(x: &[f64], dt: f64, z: &[f64], g: &[f64], sigma2: &[f64]) -> Result<Vec<f64>> {
    let n = x.len();
    if z.len() != n || g.len() != n || sigma2.len() != n {
        return Err(invalid(format!(
            "length mismatch: x={n}, z={}, g={}, sigma2={}",
            z.len(),
            g.len(),
            sigma2.len()
        )));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(invalid(format!("dt must be > 0 (got {dt})")));
    }
    let perm = RankingPermutation::of(x)?;
    let mut out = x.to_vec();
    for (k, &i) in perm.names().iter().enumerate() {
        out[i] += g[k] * dt + (sigma2[k] * dt).sqrt() * z[i];
        if !out[i].is_finite() {
            return Err(Error::NonFinite { step: 1, name: i + 1 });
        }
    }
    Ok(out)
}

/// Particles that started in the top `B` ranks of a truncated system, and
/// the highest tracked rank they must not reach.
struct BufferZone {
    is_buffer: Vec<bool>,
    watch_ranks: usize,
}

/// Receives `(t, x)` at every grid time, including `t = 0`.
type Observer<'a> = &'a mut dyn FnMut(f64, &[f64]);

struct Engine<'a> {
    spec: &'a FiniteSystemSpec,
    config: &'a SimConfig,
    steps: usize,
    last_dt: f64,
    scale: Vec<f64>,
    scale_last: Vec<f64>,
    buffer: Option<BufferZone>,
}

impl<'a> Engine<'a> {
    fn new(spec: &'a FiniteSystemSpec, config: &'a SimConfig, rank_limit: usize) -> Result<Self> {
        let report = spec.violations(1);
        if !report.is_valid() {
            return Err(invalid(report.violations.join("; ")));
        }
        config.validate(rank_limit)?;
        let (steps, last_dt) = config.grid()?;
        let scale = spec.sigma2.iter().map(|s| (s * config.dt).sqrt()).collect();
        let scale_last = spec.sigma2.iter().map(|s| (s * last_dt).sqrt()).collect();
        Ok(Self { spec, config, steps, last_dt, scale, scale_last, buffer: None })
    }

    fn run(&self, normal: &mut dyn FnMut() -> f64, mut observer: Option<Observer<'_>>) -> Result<PathStats> {
        let spec = self.spec;
        let windows = &self.config.track_windows;
        let eps = &self.config.epsilons;
        let n = spec.n;

        let mut x = spec.x0.clone();
        let mut perm = RankingPermutation::of(&x)?;
        let start: f64 = x.iter().sum();
        let mut z = vec![0.0; n];
        let mut min_spread = vec![f64::INFINITY; windows.len()];
        let mut counts = vec![vec![0u64; eps.len()]; windows.len()];
        let mut min_gap = f64::INFINITY;
        let mut contact = false;

        if let Some(obs) = observer.as_mut() {
            obs(0.0, &x);
        }
        for s in 0..self.steps {
            let last = s + 1 == self.steps;
            let (h, scale) = if last { (self.last_dt, &self.scale_last) } else { (self.config.dt, &self.scale) };
            for zi in z.iter_mut() {
                *zi = normal();
            }
            for (k, &i) in perm.names().iter().enumerate() {
                x[i] += spec.g[k] * h + scale[k] * z[i];
            }
            if let Some(i) = x.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { step: s + 1, name: i + 1 });
            }
            perm.rerank(&x);

            let names = perm.names();
            for pair in names.windows(2) {
                min_gap = min_gap.min(x[pair[1]] - x[pair[0]]);
            }
            for (w, win) in windows.iter().enumerate() {
                let spread = x[names[win.top() - 1]] - x[names[win.k - 1]];
                min_spread[w] = min_spread[w].min(spread);
                for (e, &eps) in eps.iter().enumerate() {
                    if spread < eps {
                        counts[w][e] += 1;
                    }
                }
            }
            if let Some(zone) = &self.buffer {
                contact |= names[..zone.watch_ranks].iter().any(|&i| zone.is_buffer[i]);
            }
            if let Some(obs) = observer.as_mut() {
                let t = if last { self.config.horizon } else { (s + 1) as f64 * self.config.dt };
                obs(t, &x);
            }
        }
        let end: f64 = x.iter().sum();
        Ok(PathStats {
            min_spread,
            proximity_counts: counts,
            com_end: end - start,
            boundary_contact: contact,
            min_gap: if n < 2 { 0.0 } else { min_gap },
            steps: self.steps,
        })
    }

    fn run_path(&self, path_index: u64) -> Result<PathStats> {
        let mut rng = derive_stream(self.config.seed, path_index);
        self.run(&mut || standard_normal(&mut rng), None)
    }

    fn run_all(&self) -> Result<Vec<PathStats>> {
        (0..self.config.paths as u64)
            .into_par_iter()
            .map(|p| self.run_path(p))
            .collect()
    }
}

/// One path driven by the stream `derive_stream(config.seed, path_index)`.
pub fn simulate_path(spec: &FiniteSystemSpec, config: &SimConfig, path_index: u64) -> Result<PathStats> {
    Engine::new(spec, config, spec.n)?.run_path(path_index)
}

/// One path driven by caller-supplied standard normals, drawn in name order
/// at every step.
pub fn simulate_path_with(
    spec: &FiniteSystemSpec,
    config: &SimConfig,
    normals: &mut dyn FnMut() -> f64,
) -> Result<PathStats> {
    Engine::new(spec, config, spec.n)?.run(normals, None)
}

/// Per-path trajectory as CSV with columns `t,X_1,...,X_N`, one row per
/// grid time including `t = 0`.
pub fn trajectory_csv(spec: &FiniteSystemSpec, config: &SimConfig, path_index: u64) -> Result<String> {
    let engine = Engine::new(spec, config, spec.n)?;
    let mut out = String::from("t");
    for i in 1..=spec.n {
        out.push_str(&format!(",X_{i}"));
    }
    out.push('\n');
    let mut rng = derive_stream(config.seed, path_index);
    let mut record = |t: f64, x: &[f64]| {
        out.push_str(&t.to_string());
        for v in x {
            out.push(',');
            out.push_str(&v.to_string());
        }
        out.push('\n');
    };
    engine.run(&mut || standard_normal(&mut rng), Some(&mut record))?;
    Ok(out)
}

/// Runs `config.paths` independent paths on the current rayon pool and
/// aggregates them in path-index order.
pub fn monte_carlo(spec: &FiniteSystemSpec, config: &SimConfig) -> Result<Aggregate> {
    let engine = Engine::new(spec, config, spec.n)?;
    let paths = engine.run_all()?;
    Ok(Aggregate::from_paths(spec, config, &paths, None))
}

/// [`monte_carlo`] on a dedicated pool of `threads` workers.
pub fn monte_carlo_with_threads(spec: &FiniteSystemSpec, config: &SimConfig, threads: usize) -> Result<Aggregate> {
    with_threads(threads, || monte_carlo(spec, config))?
}

/// Runs `f` on a dedicated rayon pool of `threads` workers.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Resource(e.to_string()))?;
    Ok(pool.install(f))
}

/// Simulates the lowest `truncation_m` particles of an infinite system.
///
/// Statistics may only track ranks `1..=M-B`. The top `B` initial ranks form
/// a buffer sharing the tail coefficients; a path is flagged with
/// `boundary_contact` if a buffer particle ever occupies a rank at or below
/// the highest tracked rank.
pub fn simulate_infinite_truncated(spec: &InfiniteSystemSpec, config: &SimConfig) -> Result<Aggregate> {
    spec.ensure_valid()?;
    let m = config
        .truncation_m
        .ok_or_else(|| invalid("infinite systems need a truncation size M"))?;
    let b = config.buffer_b;
    if m < spec.n0 + b {
        return Err(invalid(format!("truncation M = {m} must be >= n0 + B = {}", spec.n0 + b)));
    }
    if m <= b {
        return Err(invalid(format!("truncation M = {m} must exceed the buffer B = {b}")));
    }
    let finite = spec.truncate(m);
    let limit = m - b;
    let mut engine = Engine::new(&finite, config, limit)?;
    if b > 0 {
        let initial = RankingPermutation::of(&finite.x0)?;
        let mut is_buffer = vec![false; m];
        for &i in &initial.names()[limit..] {
            is_buffer[i] = true;
        }
        let watch_ranks = config.track_windows.iter().map(TrackedWindow::top).max().unwrap_or(limit);
        engine.buffer = Some(BufferZone { is_buffer, watch_ranks });
    }
    let paths = engine.run_all()?;
    Ok(Aggregate::from_paths(&finite, config, &paths, Some((m, b))))
}

/// Reruns at `dt/2` and reports how the window statistics moved.
pub fn dt_halving_check(spec: &FiniteSystemSpec, config: &SimConfig) -> Result<ConvergenceReport> {
    let coarse = monte_carlo(spec, config)?;
    let mut half_cfg = config.clone();
    half_cfg.dt = config.dt / 2.0;
    let fine = monte_carlo(spec, &half_cfg)?;
    Ok(ConvergenceReport::compare(&coarse, &fine))
}
