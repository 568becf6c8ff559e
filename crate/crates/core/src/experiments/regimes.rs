use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::dynamics::{classify, Regime, RegimeReport};
use crate::error::{Error, Result};
use crate::model::{EffectiveParams, SystemParams};

/// Shape of `|F(m)|` over the sampled levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Monotonicity {
    Constant,
    Increasing,
    Decreasing,
    NonMonotonic,
    /// `Ξ(m) = 0` for some sampled `m`.
    Singular,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeMap {
    pub delta: f64,
    pub reports: Vec<RegimeReport>,
    pub resonant_m: Vec<usize>,
    pub monotonicity: Monotonicity,
    /// Changes of classification between neighbouring non-resonant levels.
    pub crossings: usize,
}

impl RegimeMap {
    /// The common classification over `ms`, if there is one.
    pub fn uniform_over(&self, ms: RangeInclusive<usize>) -> Option<Regime> {
        let mut it = self
            .reports
            .iter()
            .filter(|r| ms.contains(&r.m))
            .map(|r| r.classification);
        let first = it.next()?;
        it.all(|c| c == first).then_some(first)
    }
}

fn shape(reports: &[RegimeReport]) -> Monotonicity {
    if reports.iter().any(|r| r.f.is_none()) {
        return Monotonicity::Singular;
    }
    let vals: Vec<f64> = reports.iter().filter_map(|r| r.f_abs()).collect();
    let scale = vals.iter().cloned().fold(0.0, f64::max);
    let tol = 1e-12 * scale;
    let diffs: Vec<f64> = vals.windows(2).map(|w| w[1] - w[0]).collect();
    if diffs.iter().all(|d| d.abs() <= tol) {
        Monotonicity::Constant
    } else if diffs.iter().all(|&d| d >= -tol) {
        Monotonicity::Increasing
    } else if diffs.iter().all(|&d| d <= tol) {
        Monotonicity::Decreasing
    } else {
        Monotonicity::NonMonotonic
    }
}

/// `|F(m)|` and the regime of each `m ∈ [0, m_max]`, once per detuning.
pub fn regime_map(
    p: &SystemParams,
    eff: &EffectiveParams,
    delta_values: &[f64],
    m_max: usize,
) -> Result<Vec<RegimeMap>> {
    if m_max < 1 {
        return Err(Error::param("m_max", "must be at least 1"));
    }
    Ok(delta_values
        .iter()
        .map(|&delta| {
            let reports: Vec<RegimeReport> =
                (0..=m_max).map(|m| classify(m, eff, p, delta)).collect();
            let resonant_m = reports
                .iter()
                .filter(|r| r.classification == Regime::Resonant)
                .map(|r| r.m)
                .collect();
            let kinds: Vec<Regime> = reports
                .iter()
                .map(|r| r.classification)
                .filter(|c| *c != Regime::Resonant)
                .collect();
            let crossings = kinds.windows(2).filter(|w| w[0] != w[1]).count();
            RegimeMap {
                delta,
                monotonicity: shape(&reports),
                reports,
                resonant_m,
                crossings,
            }
        })
        .collect())
}
