use serde::{Deserialize, Serialize};

/// Refinement-stability thresholds on consecutive `N -> 2N` ratios.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilityThresholds {
    /// Both of the last two doublings change the value by at most this factor.
    pub stable: f64,
    /// Both of the last two doublings grow the value by at least this factor.
    pub divergent: f64,
}

impl Default for StabilityThresholds {
    fn default() -> Self {
        Self {
            stable: 1.5,
            divergent: 1.8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Stable,
    Divergent,
    Inconclusive,
}

/// Classify a sequence of values computed on successively doubled grids.
/// Only the last two doublings are judged; fewer than three values are
/// always inconclusive.
pub fn classify(values: &[f64], th: StabilityThresholds) -> Verdict {
    if values.len() < 3 || values.iter().any(|v| v.is_nan()) {
        return Verdict::Inconclusive;
    }
    let tail = &values[values.len() - 3..];
    if tail.iter().any(|v| v.is_infinite()) {
        return Verdict::Divergent;
    }
    if tail.iter().all(|&v| v == 0.0) {
        return Verdict::Stable;
    }
    let ratios = [tail[1] / tail[0], tail[2] / tail[1]];
    let factor = |r: f64| if r >= 1.0 { r } else { 1.0 / r };
    if ratios
        .iter()
        .all(|&r| r.is_finite() && factor(r) <= th.stable)
    {
        Verdict::Stable
    } else if ratios.iter().all(|&r| r >= th.divergent) {
        Verdict::Divergent
    } else {
        Verdict::Inconclusive
    }
}

/// Values of one quantity across a refinement ladder, with its verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinementSweep {
    pub cells: Vec<usize>,
    pub values: Vec<f64>,
    pub verdict: Verdict,
}

impl RefinementSweep {
    pub fn new(cells: Vec<usize>, values: Vec<f64>, th: StabilityThresholds) -> Self {
        let verdict = classify(&values, th);
        Self {
            cells,
            values,
            verdict,
        }
    }

    /// Largest ratio between consecutive values, taken in the direction of change.
    pub fn max_step_factor(&self) -> f64 {
        self.values
            .windows(2)
            .map(|w| {
                let r = w[1] / w[0];
                if r >= 1.0 {
                    r
                } else {
                    1.0 / r
                }
            })
            .fold(1.0, f64::max)
    }

    /// Smallest growth ratio between consecutive values.
    pub fn min_growth(&self) -> f64 {
        self.values
            .windows(2)
            .map(|w| w[1] / w[0])
            .fold(f64::INFINITY, f64::min)
    }
}
