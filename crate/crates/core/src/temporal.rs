//! Time series to TFN through a histogram possibility estimate.
//!
//! The density of the marginal sample `{x(t)}` is estimated with a histogram,
//! then divided by its maximum to give a possibility distribution whose peak
//! is exactly 1. The induced TFN spans the sample range; its peak comes from
//! either the histogram mode or a least-squares triangle fit to the estimate.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fuzzy::Tfn;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TemporalError {
    #[error("series needs at least {needed} values, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("series value at t={0} is not finite")]
    NonFinite(usize),
    #[error("bin count must be at least 2, got {0}")]
    BinCount(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries(Vec<f64>);

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self, TemporalError> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(TemporalError::NonFinite(i + 1));
        }
        Ok(TimeSeries(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> TimeSeries {
        TimeSeries(self.0.iter().map(|v| f(*v)).collect())
    }
}

/// Lag-1 pairs `(x(t), x(t+1))`.
pub fn point_cloud(series: &TimeSeries) -> Result<Vec<(f64, f64)>, TemporalError> {
    if series.len() < 2 {
        return Err(TemporalError::TooShort {
            needed: 2,
            got: series.len(),
        });
    }
    Ok(series.values().windows(2).map(|w| (w[0], w[1])).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Bins {
    /// Freedman–Diaconis width, `ceil(sqrt(N))` when the IQR is zero.
    #[default]
    Auto,
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum TriangleFit {
    /// Peak of the least-squares triangle over the possibility grid.
    #[default]
    Lsq,
    /// Midpoint of the tallest histogram bin.
    Mode,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "camelCase", default)]
pub struct InductionConfig {
    pub bins: Bins,
    pub fit: TriangleFit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PossibilityEstimate {
    /// `(bin midpoint, possibility)` pairs.
    pub grid: Vec<(f64, f64)>,
    pub mode_x: f64,
    pub bin_count: usize,
    /// Zero-variance series: a single spike at the common value.
    pub degenerate: bool,
}

pub fn estimate_possibility(series: &TimeSeries, bins: Bins) -> Result<PossibilityEstimate, TemporalError> {
    if series.len() < 3 {
        return Err(TemporalError::TooShort {
            needed: 3,
            got: series.len(),
        });
    }
    if let Bins::Fixed(k) = bins {
        if k < 2 {
            return Err(TemporalError::BinCount(k));
        }
    }
    let (lo, hi) = (series.min(), series.max());
    if lo == hi {
        return Ok(PossibilityEstimate {
            grid: vec![(lo, 1.0)],
            mode_x: lo,
            bin_count: 1,
            degenerate: true,
        });
    }
    let k = match bins {
        Bins::Fixed(k) => k,
        Bins::Auto => freedman_diaconis(series.values(), lo, hi),
    };
    let counts = histogram(series.values(), lo, hi, k);
    let peak = *counts.iter().max().expect("k >= 2") as f64;
    let width = (hi - lo) / k as f64;
    let grid: Vec<(f64, f64)> = counts
        .iter()
        .enumerate()
        .map(|(i, &n)| (lo + (i as f64 + 0.5) * width, n as f64 / peak))
        .collect();
    let tops: Vec<f64> = grid.iter().filter(|(_, mu)| *mu == 1.0).map(|(x, _)| *x).collect();
    let mode_x = tops.iter().sum::<f64>() / tops.len() as f64;
    Ok(PossibilityEstimate {
        grid,
        mode_x,
        bin_count: k,
        degenerate: false,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Induction {
    pub tfn: Tfn,
    pub estimate: PossibilityEstimate,
    pub warning: Option<String>,
}

/// TFN `(min, peak, max)` of the series.
pub fn induce_tfn(series: &TimeSeries, config: &InductionConfig) -> Result<Induction, TemporalError> {
    let estimate = estimate_possibility(series, config.bins)?;
    let (lo, hi) = (series.min(), series.max());
    if estimate.degenerate {
        log::warn!("constant series at {lo}; inducing a crisp TFN");
        return Ok(Induction {
            tfn: Tfn::crisp(lo),
            estimate,
            warning: Some(format!("zero-variance series, crisp value {lo}")),
        });
    }
    let peak = match config.fit {
        TriangleFit::Mode => estimate.mode_x,
        TriangleFit::Lsq => {
            // bin centres straight from the index, so the fit sees the same
            // points for any affine image of the series
            let k = estimate.bin_count as f64;
            let normalized: Vec<(f64, f64)> = estimate
                .grid
                .iter()
                .enumerate()
                .map(|(i, (_, mu))| ((i as f64 + 0.5) / k, *mu))
                .collect();
            lo + lsq_peak(&normalized) * (hi - lo)
        }
    };
    let tfn = Tfn::new(lo, peak.clamp(lo, hi), hi).expect("ordered by clamp");
    Ok(Induction {
        tfn,
        estimate,
        warning: None,
    })
}

fn freedman_diaconis(values: &[f64], lo: f64, hi: f64) -> usize {
    let n = values.len();
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let iqr = percentile(&sorted, 75.0) - percentile(&sorted, 25.0);
    if iqr <= 0.0 {
        return ((n as f64).sqrt().ceil() as usize).max(2);
    }
    let h = 2.0 * iqr / (n as f64).cbrt();
    (((hi - lo) / h).ceil() as usize).max(2)
}

/// Linear-interpolation percentile of sorted data.
fn percentile(sorted: &[f64], pct: f64) -> f64 {
    let pos = pct / 100.0 * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if i + 1 < sorted.len() {
        sorted[i] + frac * (sorted[i + 1] - sorted[i])
    } else {
        sorted[i]
    }
}

fn histogram(values: &[f64], lo: f64, hi: f64, k: usize) -> Vec<usize> {
    let mut counts = vec![0usize; k];
    let span = hi - lo;
    for v in values {
        let i = (((v - lo) / span) * k as f64).floor() as usize;
        counts[i.min(k - 1)] += 1;
    }
    counts
}

fn triangle(u: f64, t: f64) -> f64 {
    if u < t {
        u / t
    } else if t >= 1.0 {
        1.0
    } else {
        (1.0 - u) / (1.0 - t)
    }
}

fn sse(points: &[(f64, f64)], t: f64) -> f64 {
    points.iter().map(|(u, mu)| (mu - triangle(*u, t)).powi(2)).sum()
}

/// Peak position in `[0, 1]` of the unit-support triangle closest (in squared
/// error) to the normalized possibility grid.
fn lsq_peak(points: &[(f64, f64)]) -> f64 {
    const COARSE: usize = 2000;
    let mut best_i = 0;
    let mut best = f64::INFINITY;
    for i in 0..=COARSE {
        let e = sse(points, i as f64 / COARSE as f64);
        if e < best {
            best = e;
            best_i = i;
        }
    }
    // golden-section polish inside the neighbouring coarse cells
    let (mut a, mut b) = (
        best_i.saturating_sub(1) as f64 / COARSE as f64,
        (best_i + 1).min(COARSE) as f64 / COARSE as f64,
    );
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let x1 = b - g * (b - a);
        let x2 = a + g * (b - a);
        if sse(points, x1) <= sse(points, x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    let polished = 0.5 * (a + b);
    if sse(points, polished) <= best {
        polished
    } else {
        best_i as f64 / COARSE as f64
    }
}
