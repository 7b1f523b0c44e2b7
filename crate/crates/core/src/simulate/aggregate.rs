use serde::{Deserialize, Serialize};

use super::{PathStats, SimConfig, TrackedWindow};
use crate::model::FiniteSystemSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProximitySummary {
    pub epsilon: f64,
    /// Fraction of paths with at least one grid time below `epsilon`.
    pub fraction: f64,
    pub stderr: f64,
    /// Mean number of grid times below `epsilon` per path.
    pub mean_count: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowSummary {
    pub k: usize,
    pub n: usize,
    pub min_spread_mean: f64,
    pub min_spread_min: f64,
    pub proximity: Vec<ProximitySummary>,
}

/// Terminal displacement of the particle sum, with the exact values
/// `T sum g` and `T sum sigma2` alongside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComSummary {
    pub mean: f64,
    pub mean_stderr: f64,
    pub expected_mean: f64,
    pub variance: f64,
    pub variance_stderr: f64,
    pub expected_variance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationSummary {
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "B")]
    pub b: usize,
    pub boundary_contact_fraction: f64,
    pub boundary_contacts: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub config: SimConfig,
    #[serde(rename = "N")]
    pub n: usize,
    pub paths: usize,
    pub steps: usize,
    pub windows: Vec<WindowSummary>,
    pub com: ComSummary,
    /// Smallest adjacent ranked gap over all paths and grid times.
    pub min_gap: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<TruncationSummary>,
}

fn proportion_stderr(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

impl Aggregate {
    /// Sequential reduction in path-index order.
    pub(crate) fn from_paths(
        spec: &FiniteSystemSpec,
        config: &SimConfig,
        paths: &[PathStats],
        truncation: Option<(usize, usize)>,
    ) -> Self {
        let count = paths.len();
        let nf = count as f64;
        let windows = config
            .track_windows
            .iter()
            .enumerate()
            .map(|(w, win)| {
                let spreads = paths.iter().map(|p| p.min_spread[w]);
                let min_spread_mean = spreads.clone().sum::<f64>() / nf;
                let min_spread_min = spreads.fold(f64::INFINITY, f64::min);
                let proximity = config
                    .epsilons
                    .iter()
                    .enumerate()
                    .map(|(e, &epsilon)| {
                        let hits = paths.iter().filter(|p| p.proximity_counts[w][e] > 0).count();
                        let fraction = hits as f64 / nf;
                        let mean_count = paths.iter().map(|p| p.proximity_counts[w][e] as f64).sum::<f64>() / nf;
                        ProximitySummary { epsilon, fraction, stderr: proportion_stderr(fraction, count), mean_count }
                    })
                    .collect();
                WindowSummary { k: win.k, n: win.n, min_spread_mean, min_spread_min, proximity }
            })
            .collect();

        let mean = paths.iter().map(|p| p.com_end).sum::<f64>() / nf;
        let (m2, m4) = paths.iter().fold((0.0, 0.0), |(m2, m4), p| {
            let d = p.com_end - mean;
            (m2 + d * d, m4 + d * d * d * d)
        });
        let (variance, variance_stderr) = if count > 1 {
            let s2 = m2 / (nf - 1.0);
            let mu4 = m4 / nf;
            // Var(s^2) = (mu4 - s^4 (n-3)/(n-1)) / n
            let v = (mu4 - s2 * s2 * (nf - 3.0) / (nf - 1.0)) / nf;
            (s2, v.max(0.0).sqrt())
        } else {
            (0.0, f64::NAN)
        };
        let com = ComSummary {
            mean,
            mean_stderr: if count > 1 { (variance / nf).sqrt() } else { f64::NAN },
            expected_mean: config.horizon * spec.g.iter().sum::<f64>(),
            variance,
            variance_stderr,
            expected_variance: config.horizon * spec.sigma2.iter().sum::<f64>(),
        };

        let truncation = truncation.map(|(m, b)| {
            let contacts = paths.iter().filter(|p| p.boundary_contact).count();
            TruncationSummary { m, b, boundary_contact_fraction: contacts as f64 / nf, boundary_contacts: contacts }
        });

        Aggregate {
            config: config.clone(),
            n: spec.n,
            paths: count,
            steps: paths.first().map_or(0, |p| p.steps),
            windows,
            com,
            min_gap: paths.iter().map(|p| p.min_gap).fold(f64::INFINITY, f64::min),
            truncation,
        }
    }

    pub fn window(&self, w: TrackedWindow) -> Option<&WindowSummary> {
        self.windows.iter().find(|s| s.k == w.k && s.n == w.n)
    }

    /// Flat CSV: `window_k,window_n,epsilon,proximity_fraction,stderr,min_spread_mean,min_spread_min`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("window_k,window_n,epsilon,proximity_fraction,stderr,min_spread_mean,min_spread_min\n");
        for w in &self.windows {
            for p in &w.proximity {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    w.k, w.n, p.epsilon, p.fraction, p.stderr, w.min_spread_mean, w.min_spread_min
                ));
            }
        }
        out
    }
}

/// One (window, epsilon) cell of a dt-halving comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub k: usize,
    pub n: usize,
    pub epsilon: f64,
    pub fraction_dt: f64,
    pub fraction_half_dt: f64,
    pub difference: f64,
    pub combined_stderr: f64,
    pub min_spread_mean_difference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub dt: f64,
    pub half_dt: f64,
    pub rows: Vec<ConvergenceRow>,
    pub com_mean_difference: f64,
    pub com_variance_difference: f64,
}

impl ConvergenceReport {
    pub(crate) fn compare(coarse: &Aggregate, fine: &Aggregate) -> Self {
        let mut rows = Vec::new();
        for (a, b) in coarse.windows.iter().zip(&fine.windows) {
            for (p, q) in a.proximity.iter().zip(&b.proximity) {
                rows.push(ConvergenceRow {
                    k: a.k,
                    n: a.n,
                    epsilon: p.epsilon,
                    fraction_dt: p.fraction,
                    fraction_half_dt: q.fraction,
                    difference: q.fraction - p.fraction,
                    combined_stderr: (p.stderr * p.stderr + q.stderr * q.stderr).sqrt(),
                    min_spread_mean_difference: b.min_spread_mean - a.min_spread_mean,
                });
            }
        }
        Self {
            dt: coarse.config.dt,
            half_dt: fine.config.dt,
            rows,
            com_mean_difference: fine.com.mean - coarse.com.mean,
            com_variance_difference: fine.com.variance - coarse.com.variance,
        }
    }
}
