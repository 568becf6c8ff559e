use std::fmt;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::{Factor, SpaceSignature, C64};
use crate::error::{Error, Result};

/// Population allowed in the top band of a bosonic factor before a
/// truncation warning is raised.
pub const TRUNCATION_POPULATION_LIMIT: f64 = 1e-6;

/// Number of levels in the "top 10%" band of a truncation `n`.
pub fn top_band(n: usize) -> usize {
    n.div_ceil(10).max(1)
}

/// A bosonic factor carries noticeable population near its cutoff.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationWarning {
    pub factor: usize,
    pub dim: usize,
    pub top_population: f64,
}

impl fmt::Display for TruncationWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "factor {} (N={}) holds population {:.3e} in its top {} levels",
            self.factor,
            self.dim,
            self.top_population,
            top_band(self.dim)
        )
    }
}

/// Pure state over a tensor-product space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    space: SpaceSignature,
    amps: DVector<C64>,
}

impl StateVector {
    pub fn new(space: SpaceSignature, amps: DVector<C64>) -> Result<Self> {
        if amps.len() != space.dim() {
            return Err(Error::Signature(format!(
                "state has {} amplitudes, space {space} has dimension {}",
                amps.len(),
                space.dim()
            )));
        }
        Ok(Self { space, amps })
    }

    pub(crate) fn from_parts(space: SpaceSignature, amps: DVector<C64>) -> Self {
        debug_assert_eq!(amps.len(), space.dim());
        Self { space, amps }
    }

    /// Product basis state with one level index per factor.
    pub fn basis(space: &SpaceSignature, indices: &[usize]) -> Result<Self> {
        let flat = space.flatten(indices)?;
        let mut amps = DVector::zeros(space.dim());
        amps[flat] = C64::new(1.0, 0.0);
        Ok(Self::from_parts(space.clone(), amps))
    }

    /// All factors in level 0 (vacuum, and `|g>` for atoms).
    pub fn ground(space: &SpaceSignature) -> Self {
        let mut amps = DVector::zeros(space.dim());
        amps[0] = C64::new(1.0, 0.0);
        Self::from_parts(space.clone(), amps)
    }

    /// Tensor product `self ⊗ other`.
    pub fn tensor(&self, other: &StateVector) -> Self {
        let mut factors = self.space.factors().to_vec();
        factors.extend_from_slice(other.space.factors());
        let space = SpaceSignature::new(factors).expect("factors already validated");
        let amps = self.amps.kronecker(&other.amps);
        Self::from_parts(space, amps)
    }

    pub fn space(&self) -> &SpaceSignature {
        &self.space
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::param("state", "cannot normalize a zero vector"));
        }
        self.amps.unscale_mut(n);
        Ok(self)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        self.space.ensure_same(&other.space)?;
        Ok(self.amps.dotc(&other.amps))
    }

    /// `|<self|other>|²`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Marginal level populations of factor `index`.
    pub fn populations(&self, index: usize) -> Result<Vec<f64>> {
        let d = self.space.factor(index)?.dim();
        let (_, right) = self.space.strides(index);
        let mut pops = vec![0.0; d];
        for (flat, z) in self.amps.iter().enumerate() {
            pops[(flat / right) % d] += z.norm_sqr();
        }
        Ok(pops)
    }

    /// Population in the top 10% of levels of the bosonic factor `index`.
    pub fn top_population(&self, index: usize) -> Result<f64> {
        let n = self.space.boson_dim(index)?;
        let pops = self.populations(index)?;
        Ok(pops[n - top_band(n)..].iter().sum())
    }

    pub fn truncation_warnings(&self) -> Vec<TruncationWarning> {
        self.space
            .factors()
            .iter()
            .enumerate()
            .filter_map(|(k, f)| match f {
                Factor::Boson(n) => {
                    let top = self.top_population(k).ok()?;
                    (top >= TRUNCATION_POPULATION_LIMIT).then_some(TruncationWarning {
                        factor: k,
                        dim: *n,
                        top_population: top,
                    })
                }
                Factor::Atom => None,
            })
            .collect()
    }
}

/// ln of the Poisson weights `e^{-x} x^m / m!` for `m = 0..len`.
fn log_poisson(x: f64, len: usize) -> impl Iterator<Item = f64> {
    let lx = x.ln();
    (0..len).scan(0.0, move |acc, m| {
        if m == 0 {
            *acc = -x;
        } else if x == 0.0 {
            *acc = f64::NEG_INFINITY;
        } else {
            *acc += lx - (m as f64).ln();
        }
        Some(*acc)
    })
}

/// `e^{-x} x^m / m!`, evaluated in log space.
pub fn poisson_weight(x: f64, m: usize) -> f64 {
    log_poisson(x, m + 1).last().map_or(0.0, f64::exp)
}

/// Untruncated Poisson mass at or above level `cut`.
fn poisson_tail(x: f64, cut: usize) -> f64 {
    if x == 0.0 {
        return if cut == 0 { 1.0 } else { 0.0 };
    }
    let horizon = cut.max((x + 40.0 * x.sqrt() + 50.0) as usize);
    log_poisson(x, horizon + 1)
        .skip(cut)
        .map(f64::exp)
        .sum::<f64>()
        .min(1.0)
}

/// Untruncated coherent-state population in the top band and beyond for
/// truncation `n`.
pub fn coherent_top_population(mean: f64, n: usize) -> f64 {
    poisson_tail(mean, n - top_band(n))
}

/// Coherent state `|β>` on the bosonic factor `index`, every other factor in
/// level 0. Amplitudes `e^{-|β|²/2} β^m/√m!` are renormalized after
/// truncation.
///
/// Fails when the untruncated state would place at least `1e-6` of its
/// population in the top 10% of levels or beyond; the error names the
/// smallest truncation that passes.
pub fn coherent_state(space: &SpaceSignature, index: usize, beta: C64) -> Result<StateVector> {
    let n = space.boson_dim(index)?;
    let mean = beta.norm_sqr();
    let top = coherent_top_population(mean, n);
    if top >= TRUNCATION_POPULATION_LIMIT {
        let required = (n + 1..)
            .find(|&m| coherent_top_population(mean, m) < TRUNCATION_POPULATION_LIMIT)
            .expect("poisson tail vanishes for large truncation");
        return Err(Error::Truncation {
            message: format!(
                "coherent state |β|²={mean:.4} leaves population {top:.3e} near the cutoff N={n}"
            ),
            required_dim: required,
        });
    }
    let local = coherent_amplitudes(beta, n);
    let mut indices = vec![0; space.factors().len()];
    let mut amps = DVector::zeros(space.dim());
    for (m, c) in local.iter().enumerate() {
        indices[index] = m;
        amps[space.flatten(&indices)?] = *c;
    }
    StateVector::from_parts(space.clone(), amps).normalized()
}

/// Raw (unnormalized) truncated coherent amplitudes.
pub(crate) fn coherent_amplitudes(beta: C64, n: usize) -> Vec<C64> {
    let mean = beta.norm_sqr();
    let phase = beta.arg();
    log_poisson(mean, n)
        .enumerate()
        .map(|(m, lp)| C64::from_polar((0.5 * lp).exp(), phase * m as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coherent_zero_is_vacuum() {
        let s = SpaceSignature::boson(8).unwrap();
        let psi = coherent_state(&s, 0, C64::new(0.0, 0.0)).unwrap();
        assert_eq!(psi, StateVector::ground(&s));
    }

    #[test]
    fn coherent_poisson_weight() {
        // e^{-4} 4^4 / 4!
        let direct = (-4f64).exp() * 256.0 / 24.0;
        let s = SpaceSignature::boson(32).unwrap();
        let psi = coherent_state(&s, 0, C64::new(2.0, 0.0)).unwrap();
        let p4 = psi.amplitudes()[4].norm_sqr();
        assert!((p4 - direct).abs() < 1e-12);
        assert!((p4 - 0.1954).abs() < 1e-4);
    }

    #[test]
    fn coherent_normalized() {
        let s = SpaceSignature::boson(64).unwrap();
        let psi = coherent_state(&s, 0, C64::new(4.0, 0.0)).unwrap();
        assert!((psi.norm() - 1.0).abs() < 1e-10);
        let raw: f64 = coherent_amplitudes(C64::new(4.0, 0.0), 64)
            .iter()
            .map(|c| c.norm_sqr())
            .sum();
        assert!((raw - 1.0).abs() < 1e-10);
    }

    #[test]
    fn coherent_truncation_error_names_dimension() {
        let s = SpaceSignature::boson(16).unwrap();
        let err = coherent_state(&s, 0, C64::new(3.0, 0.0)).unwrap_err();
        match err {
            Error::Truncation { required_dim, .. } => {
                assert!(required_dim > 16);
                let ok = SpaceSignature::boson(required_dim).unwrap();
                assert!(coherent_state(&ok, 0, C64::new(3.0, 0.0)).is_ok());
                let short = SpaceSignature::boson(required_dim - 1).unwrap();
                assert!(coherent_state(&short, 0, C64::new(3.0, 0.0)).is_err());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn coherent_embeds_on_second_factor() {
        let s = SpaceSignature::cavity_motion(3, 20).unwrap();
        let psi = coherent_state(&s, 1, C64::new(0.0, 1.0)).unwrap();
        let cav = psi.populations(0).unwrap();
        assert!((cav[0] - 1.0).abs() < 1e-14);
        let vib = psi.populations(1).unwrap();
        assert!((vib[1] - (-1f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn tensor_and_populations() {
        let a = StateVector::basis(&SpaceSignature::boson(3).unwrap(), &[2]).unwrap();
        let b = StateVector::ground(&SpaceSignature::new(vec![Factor::Atom]).unwrap());
        let ab = a.tensor(&b);
        assert_eq!(ab.space().dim(), 9);
        assert_eq!(ab.populations(0).unwrap(), vec![0.0, 0.0, 1.0]);
        assert_eq!(ab.populations(1).unwrap(), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn warns_when_top_is_populated() {
        let s = SpaceSignature::boson(10).unwrap();
        let top = StateVector::basis(&s, &[9]).unwrap();
        let w = top.truncation_warnings();
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].factor, 0);
        assert!(StateVector::ground(&s).truncation_warnings().is_empty());
    }

    #[test]
    fn mismatched_inner_rejected() {
        let a = StateVector::ground(&SpaceSignature::boson(3).unwrap());
        let b = StateVector::ground(&SpaceSignature::boson(4).unwrap());
        assert!(a.inner(&b).is_err());
    }
}
