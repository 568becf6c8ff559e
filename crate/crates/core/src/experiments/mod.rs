//! End-to-end drivers: cavity squeezing, regime maps, the Fock-state filter
//! and the semiclassical comparison.

mod filter;
mod regimes;
mod semiclassical;
mod squeeze;

pub use filter::{run_fock_filter, FilterConfig, FilterResult};
pub use regimes::{regime_map, Monotonicity, RegimeMap};
pub use semiclassical::{
    run_semiclassical_comparison, squeeze_axis, BetaRun, ComparisonRow, SemiclassicalConfig,
};
pub use squeeze::{
    run_h1_squeezing, CavityInit, Engine, SqueezeConfig, SqueezeResult, SqueezeSample,
};

use crate::error::Result;
use crate::fockalg::{
    ladder, number, Ladder, OperatorMatrix, QuadratureMoments, SpaceSignature, C64,
};
use crate::model::{EffectiveParams, SystemParams};

/// Restriction of the vibration-resolved effective Hamiltonian to motional
/// level `m`: `Ξ(m) a†a + (Γ(m) a†² + h.c.)/2` on `Boson(n_cav)`.
pub fn parametric_block(
    p: &SystemParams,
    eff: &EffectiveParams,
    m: usize,
    delta: f64,
    n_cav: usize,
) -> Result<OperatorMatrix> {
    let space = SpaceSignature::boson(n_cav)?;
    let a = ladder(&space, 0, Ladder::Lowering)?;
    let ad = a.adjoint();
    let pair = ad.mul(&ad)?.scale(eff.gamma_of(p, m) * 0.5);
    number(&space, 0)?
        .scale(C64::new(eff.xi_of(p, m, delta), 0.0))
        .add(&pair.add(&pair.adjoint())?)
}

/// Moments of a mixture with the given weights.
pub(crate) fn mix_moments<'a>(
    parts: impl IntoIterator<Item = (f64, &'a QuadratureMoments)>,
) -> QuadratureMoments {
    let zero = C64::new(0.0, 0.0);
    parts.into_iter().fold(
        QuadratureMoments {
            a: zero,
            a2: zero,
            n: 0.0,
            aad: 0.0,
        },
        |acc, (w, m)| QuadratureMoments {
            a: acc.a + m.a * w,
            a2: acc.a2 + m.a2 * w,
            n: acc.n + m.n * w,
            aad: acc.aad + m.aad * w,
        },
    )
}

/// Evenly spaced samples `0, x/k, ..., x`.
pub(crate) fn grid(x: f64, samples: usize) -> Vec<f64> {
    let k = samples.max(1);
    (0..=k).map(|i| x * i as f64 / k as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_engineered, Engineered};

    #[test]
    fn blocks_match_full_operator() {
        let p = SystemParams {
            nu: 50.0,
            eta: 0.1,
            delta: 0.4,
            ..SystemParams::default()
        };
        let eff = EffectiveParams::manual(6.0, 0.5, C64::new(0.3, -0.4));
        let (nc, nv) = (7, 5);
        let space = SpaceSignature::cavity_motion(nc, nv).unwrap();
        let full = build_engineered(&p, &eff, Engineered::Parametric, &space, 0.0).unwrap();
        for m in 0..nv {
            let block = parametric_block(&p, &eff, m, p.delta, nc).unwrap();
            for i in 0..nc {
                for j in 0..nc {
                    let fi = space.flatten(&[i, m]).unwrap();
                    let fj = space.flatten(&[j, m]).unwrap();
                    let d = full.data()[(fi, fj)] - block.data()[(i, j)];
                    assert!(d.norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn grid_endpoints() {
        let g = grid(2.0, 4);
        assert_eq!(g, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
    }
}
