use std::f64::consts::PI;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::{OperatorMatrix, SpaceSignature, StateVector, C64};
use crate::error::Result;

/// `<ψ|A|ψ>`.
pub fn expectation(psi: &StateVector, a: &OperatorMatrix) -> Result<C64> {
    psi.space().ensure_same(a.space())?;
    Ok(psi.amplitudes().dotc(&a.apply(psi.amplitudes())))
}

/// `a` on factor `index` applied to `v`, using the ladder structure directly.
fn lower(space: &SpaceSignature, index: usize, d: usize, v: &DVector<C64>) -> DVector<C64> {
    let (left, right) = space.strides(index);
    let mut out = DVector::zeros(v.len());
    for l in 0..left {
        for n in 1..d {
            let s = (n as f64).sqrt();
            let dst = (l * d + n - 1) * right;
            let src = (l * d + n) * right;
            for k in 0..right {
                out[dst + k] = v[src + k] * s;
            }
        }
    }
    out
}

/// First and second moments of one bosonic mode, with truncated `aa†`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureMoments {
    pub a: C64,
    pub a2: C64,
    pub n: f64,
    pub aad: f64,
}

impl QuadratureMoments {
    /// `<a²> - <a>²`.
    pub fn m(&self) -> C64 {
        self.a2 - self.a * self.a
    }

    /// `<a†a> + <aa†> - 2|<a>|²`.
    pub fn big_n(&self) -> f64 {
        self.n + self.aad - 2.0 * self.a.norm_sqr()
    }

    /// Variance of `X_θ = (a e^{-iθ} + a† e^{iθ})/2`.
    pub fn variance(&self, theta: f64) -> f64 {
        (2.0 * (self.m() * C64::from_polar(1.0, -2.0 * theta)).re + self.big_n()) / 4.0
    }

    pub fn extrema(&self) -> QuadratureExtrema {
        let m = self.m();
        let big_n = self.big_n();
        let theta_max = (0.5 * m.arg()).rem_euclid(PI);
        QuadratureExtrema {
            theta_min: (theta_max + 0.5 * PI).rem_euclid(PI),
            var_min: (big_n - 2.0 * m.norm()) / 4.0,
            theta_max,
            var_max: (big_n + 2.0 * m.norm()) / 4.0,
        }
    }
}

pub fn quadrature_moments(psi: &StateVector, index: usize) -> Result<QuadratureMoments> {
    let space = psi.space();
    let d = space.boson_dim(index)?;
    let v = psi.amplitudes();
    let av = lower(space, index, d, v);
    let aav = lower(space, index, d, &av);
    let n = av.norm_squared();
    let pops = psi.populations(index)?;
    let aad = pops[..d - 1]
        .iter()
        .enumerate()
        .map(|(k, p)| (k + 1) as f64 * p)
        .sum();
    Ok(QuadratureMoments {
        a: v.dotc(&av),
        a2: v.dotc(&aav),
        n,
        aad,
    })
}

/// Variance of `X_θ = (a e^{-iθ} + a† e^{iθ})/2` on the bosonic factor `index`.
pub fn quadrature_variance(psi: &StateVector, index: usize, theta: f64) -> Result<f64> {
    Ok(quadrature_moments(psi, index)?.variance(theta))
}

/// Closed-form extremes of the quadrature variance over `θ ∈ [0, π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureExtrema {
    pub theta_min: f64,
    pub var_min: f64,
    pub theta_max: f64,
    pub var_max: f64,
}

pub fn quadrature_extrema(psi: &StateVector, index: usize) -> Result<QuadratureExtrema> {
    Ok(quadrature_moments(psi, index)?.extrema())
}
