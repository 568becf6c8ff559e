use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::dynamics::{bogoliubov, evolve_static};
use crate::error::{Error, Result};
use crate::fockalg::{
    coherent_state, quadrature_moments, QuadratureMoments, SpaceSignature, StateVector, C64,
    TRUNCATION_POPULATION_LIMIT,
};
use crate::model::{semiclassical_hamiltonian, EffectiveParams, SystemParams};

use super::{grid, mix_moments, parametric_block, Engine};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemiclassicalConfig {
    pub betas: Vec<C64>,
    pub r_max: f64,
    pub samples: usize,
    pub n_cav: usize,
    pub n_vib: usize,
    /// How each motional block is solved on the quantum side.
    pub engine: Engine,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub r: f64,
    pub t: f64,
    /// `Var(X_θ)` of the cavity with the motion kept quantum.
    pub var_quantum: f64,
    /// Same quadrature under the semiclassical Hamiltonian.
    pub var_semiclassical: f64,
    /// `e^{-2r}/4`.
    pub var_ideal: f64,
    /// `var_quantum - var_semiclassical`.
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaRun {
    pub beta: C64,
    /// `2η²|β|²ω_ii`, the detuning used for this amplitude.
    pub delta: f64,
    /// Quadrature angle squeezed by `ξ_ii a†² + h.c.`.
    pub theta_sq: f64,
    pub rows: Vec<ComparisonRow>,
    pub warnings: Vec<String>,
}

impl BetaRun {
    /// Row whose `r` is closest to `r`.
    pub fn at(&self, r: f64) -> &ComparisonRow {
        self.rows
            .iter()
            .min_by(|a, b| (a.r - r).abs().total_cmp(&(b.r - r).abs()))
            .expect("rows are never empty")
    }
}

/// `(arg ξ + π/2)/2 mod π`: for `ξ = -i|ξ|` this is `X = (a + a†)/2`.
pub fn squeeze_axis(xi: C64) -> f64 {
    ((xi.arg() + FRAC_PI_2) / 2.0).rem_euclid(PI)
}

/// Cavity squeezing with the motion in `|β>` against the classical-pump
/// replacement, sampled at `r = 4η²|β|²|ξ_ii|t` in `[0, r_max]`.
///
/// The motional Fock levels never mix, so the quantum run is a mixture of
/// independent single-mode blocks weighted by `|C_m|²`. The analytic engine
/// solves each block exactly; the numeric engine propagates it on `n_cav`
/// levels, which fails for small `|β|` where high-`m` blocks amplify quickly.
pub fn run_semiclassical_comparison(
    p: &SystemParams,
    eff: &EffectiveParams,
    cfg: &SemiclassicalConfig,
) -> Result<Vec<BetaRun>> {
    if eff.xi_ii.norm() == 0.0 || p.eta == 0.0 {
        return Err(Error::param("xi_ii", "needs ξ_ii ≠ 0 and η ≠ 0"));
    }
    if !(cfg.r_max >= 0.0) {
        return Err(Error::param("r_max", "must be >= 0"));
    }
    cfg.betas
        .iter()
        .map(|&beta| run_one(p, eff, cfg, beta))
        .collect()
}

fn run_one(
    p: &SystemParams,
    eff: &EffectiveParams,
    cfg: &SemiclassicalConfig,
    beta: C64,
) -> Result<BetaRun> {
    let mean = beta.norm_sqr();
    if mean == 0.0 {
        return Err(Error::param("beta", "must be nonzero"));
    }
    let eta2 = p.eta * p.eta;
    let pb = SystemParams {
        delta: 2.0 * eta2 * mean * eff.omega_ii,
        ..*p
    };
    let rs = grid(cfg.r_max, cfg.samples);
    let rate = 4.0 * eta2 * mean * eff.xi_ii.norm();
    let times: Vec<f64> = rs.iter().map(|r| r / rate).collect();
    let theta = squeeze_axis(eff.xi_ii);

    let cav = SpaceSignature::boson(cfg.n_cav)?;
    let vacuum = StateVector::ground(&cav);
    let mut warnings = Vec::new();

    let sc = evolve_static(
        &semiclassical_hamiltonian(&pb, eff, beta, &cav)?,
        &vacuum,
        &times,
    )?;
    if let Some(w) = sc.warnings.first() {
        warnings.push(format!("semiclassical run: {w}"));
    }

    let vib = SpaceSignature::boson(cfg.n_vib)?;
    let weights: Vec<f64> = coherent_state(&vib, 0, beta)?
        .amplitudes()
        .iter()
        .map(|c| c.norm_sqr())
        .collect();
    let quantum: Vec<f64> = match cfg.engine {
        Engine::Analytic => {
            let mut tail = 0.0f64;
            let vars = times
                .iter()
                .map(|&t| {
                    let terms: Vec<f64> = weights
                        .iter()
                        .enumerate()
                        .map(|(m, &w)| {
                            let b =
                                bogoliubov(eff.xi_of(&pb, m, pb.delta), eff.gamma_of(&pb, m), t);
                            w * b.vacuum_variance(theta)
                        })
                        .collect();
                    let total: f64 = terms.iter().sum();
                    tail = tail.max(terms[terms.len() - 1] / total);
                    total
                })
                .collect();
            if tail >= TRUNCATION_POPULATION_LIMIT {
                warnings.push(format!(
                    "quantum run: last motional level carries {tail:.3e} of the variance at N_vib={}",
                    cfg.n_vib
                ));
            }
            vars
        }
        Engine::Numeric => {
            let mut blocks: Vec<Vec<QuadratureMoments>> = Vec::with_capacity(cfg.n_vib);
            let mut top = 0.0;
            for (m, &w) in weights.iter().enumerate() {
                let h = parametric_block(&pb, eff, m, pb.delta, cfg.n_cav)?;
                let tr = evolve_static(&h, &vacuum, &times)?;
                top += w * tr.last().top_population(0)?;
                blocks.push(
                    tr.states
                        .iter()
                        .map(|s| quadrature_moments(s, 0))
                        .collect::<Result<_>>()?,
                );
            }
            if top >= TRUNCATION_POPULATION_LIMIT {
                warnings.push(format!(
                    "quantum run: weighted cavity population {top:.3e} near the cutoff N={}",
                    cfg.n_cav
                ));
            }
            (0..times.len())
                .map(|k| {
                    mix_moments(weights.iter().zip(&blocks).map(|(&w, b)| (w, &b[k])))
                        .variance(theta)
                })
                .collect()
        }
    };

    let rows = rs
        .iter()
        .zip(&times)
        .zip(&quantum)
        .zip(&sc.states)
        .map(|(((&r, &t), &var_quantum), s)| {
            let var_semiclassical = quadrature_moments(s, 0)?.variance(theta);
            Ok(ComparisonRow {
                r,
                t,
                var_quantum,
                var_semiclassical,
                var_ideal: (-2.0 * r).exp() / 4.0,
                deviation: var_quantum - var_semiclassical,
            })
        })
        .collect::<Result<_>>()?;
    Ok(BetaRun {
        beta,
        delta: pb.delta,
        theta_sq: theta,
        rows,
        warnings,
    })
}
