use serde::{Deserialize, Serialize};

use crate::dynamics::evolve_static;
use crate::error::{Error, Result};
use crate::fockalg::{
    coherent_state, quadrature_moments, top_band, SpaceSignature, StateVector, C64,
    TRUNCATION_POPULATION_LIMIT,
};
use crate::model::{EffectiveParams, SystemParams, MUCH_GREATER, TUNING_TOL};

use super::{grid, parametric_block};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterConfig {
    /// Motional level `M` the detuning is tuned to.
    pub m_target: usize,
    pub beta: C64,
    pub t_final: f64,
    pub samples: usize,
    /// The detector fires on photon counts `k >= n_threshold`.
    pub n_threshold: f64,
    pub n_cav: usize,
    pub n_vib: usize,
}

#[derive(Debug, Clone)]
pub struct FilterResult {
    pub m_target: usize,
    /// `|C_M|²`.
    pub success_prob: f64,
    pub times: Vec<f64>,
    /// Photons in the resonant block.
    pub n_rs: Vec<f64>,
    /// `sinh²(|Γ(M)|t)`.
    pub n_rs_closed_form: Vec<f64>,
    /// Weighted photons of all other blocks, normalized by `1 - |C_M|²`.
    pub n_ns: Vec<f64>,
    /// `|ξ_ii|/ω_ii`.
    pub bound_ns: f64,
    /// Largest `|Σ_m |C_m|² ||ψ_m(t)||² - 1|` over the grid.
    pub norm_drift: f64,
    /// Probability that the detector fires at `t_final`.
    pub fire_prob: f64,
    /// `P(vibration in |M> | detector fired)`.
    pub conditional_fidelity: Option<f64>,
    /// Most likely photon count among those that fire the detector.
    pub post_measure_count: Option<usize>,
    /// Motional state after registering `post_measure_count` photons.
    pub post_measure_state: Option<StateVector>,
    /// `η²ω_ii(2M+1)`, the detuning that makes level `M` resonant.
    pub resonance_detuning: f64,
    /// `ω_ii(2M+1)`, the same condition with `η²` absorbed into `ω_ii`.
    pub resonance_detuning_unscaled: f64,
    pub warnings: Vec<String>,
}

fn check(p: &SystemParams, eff: &EffectiveParams, cfg: &FilterConfig) -> Result<()> {
    let target = eff.xi_of(p, cfg.m_target, 0.0);
    if (p.delta - target).abs() > TUNING_TOL * target.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::Regime(format!(
            "filter requires δ = η²ω_ii(2M+1) = {target} for M = {}, got δ = {}",
            cfg.m_target, p.delta
        )));
    }
    if eff.xi_ii.norm() * MUCH_GREATER > eff.omega_ii {
        return Err(Error::Regime(format!(
            "filter requires ω_ii ≥ 10|ξ_ii|, got ω_ii = {} and |ξ_ii| = {}",
            eff.omega_ii,
            eff.xi_ii.norm()
        )));
    }
    if cfg.m_target >= cfg.n_vib {
        return Err(Error::param(
            "M",
            format!("must be below N_vib = {}", cfg.n_vib),
        ));
    }
    if !(cfg.t_final >= 0.0) {
        return Err(Error::param("t_final", "must be >= 0"));
    }
    Ok(())
}

/// Cavity vacuum and motional `|β>` evolved block by block under the
/// vibration-resolved parametric Hamiltonian, followed by an ideal
/// threshold photon counter on the cavity.
pub fn run_fock_filter(
    p: &SystemParams,
    eff: &EffectiveParams,
    cfg: &FilterConfig,
) -> Result<FilterResult> {
    check(p, eff, cfg)?;
    let big_m = cfg.m_target;
    let vib = SpaceSignature::boson(cfg.n_vib)?;
    let coh = coherent_state(&vib, 0, cfg.beta)?;
    let amps: Vec<C64> = coh.amplitudes().iter().cloned().collect();
    let weights: Vec<f64> = amps.iter().map(|c| c.norm_sqr()).collect();

    let cav = SpaceSignature::boson(cfg.n_cav)?;
    let vacuum = StateVector::ground(&cav);
    let times = grid(cfg.t_final, cfg.samples);

    let mut photons = vec![vec![0.0; times.len()]; cfg.n_vib];
    let mut norms = vec![0.0; times.len()];
    let mut finals = Vec::with_capacity(cfg.n_vib);
    let mut top = 0.0;
    for m in 0..cfg.n_vib {
        let h = parametric_block(p, eff, m, p.delta, cfg.n_cav)?;
        let tr = evolve_static(&h, &vacuum, &times)?;
        for (k, s) in tr.states.iter().enumerate() {
            photons[m][k] = quadrature_moments(s, 0)?.n;
            norms[k] += weights[m] * s.norm().powi(2);
        }
        let last = tr.last().clone();
        top += weights[m] * last.top_population(0)?;
        finals.push(last);
    }

    let w_m = weights[big_m];
    let n_ns = (0..times.len())
        .map(|k| {
            if w_m >= 1.0 {
                return 0.0;
            }
            let s: f64 = (0..cfg.n_vib)
                .filter(|&m| m != big_m)
                .map(|m| weights[m] * photons[m][k])
                .sum();
            s / (1.0 - w_m)
        })
        .collect();
    let gamma_m = eff.gamma_of(p, big_m).norm();
    let n_rs_closed_form: Vec<f64> = times.iter().map(|t| (gamma_m * t).sinh().powi(2)).collect();

    let mut warnings = Vec::new();
    if let Some(&peak) = n_rs_closed_form.last() {
        if peak > cfg.n_cav as f64 / 4.0 {
            warnings.push(format!(
                "resonant photon number {peak:.3} exceeds N_cav/4 = {}",
                cfg.n_cav as f64 / 4.0
            ));
        }
    }
    if top >= TRUNCATION_POPULATION_LIMIT {
        warnings.push(format!(
            "cavity population {top:.3e} in the top {} of {} levels",
            top_band(cfg.n_cav),
            cfg.n_cav
        ));
    }

    // threshold counter on the final state
    let first = (cfg.n_threshold.max(0.0).ceil() as usize).min(cfg.n_cav);
    let fire: Vec<f64> = finals
        .iter()
        .map(|s| {
            s.amplitudes()
                .iter()
                .skip(first)
                .map(|c| c.norm_sqr())
                .sum()
        })
        .collect();
    let fire_prob: f64 = weights.iter().zip(&fire).map(|(w, f)| w * f).sum();
    let conditional_fidelity = (fire_prob > 0.0).then(|| w_m * fire[big_m] / fire_prob);
    let post_measure_count = (first..cfg.n_cav)
        .map(|k| {
            let pk: f64 = weights
                .iter()
                .zip(&finals)
                .map(|(w, s)| w * s.amplitudes()[k].norm_sqr())
                .sum();
            (k, pk)
        })
        .filter(|(_, pk)| *pk > 0.0)
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(k, _)| k);
    let post_measure_state = match post_measure_count {
        Some(k) => {
            let v =
                nalgebra::DVector::from_fn(cfg.n_vib, |m, _| amps[m] * finals[m].amplitudes()[k]);
            Some(StateVector::new(vib.clone(), v)?.normalized()?)
        }
        None => None,
    };

    Ok(FilterResult {
        m_target: big_m,
        success_prob: w_m,
        n_rs: photons[big_m].clone(),
        n_rs_closed_form,
        n_ns,
        bound_ns: if eff.omega_ii > 0.0 {
            eff.xi_ii.norm() / eff.omega_ii
        } else {
            f64::INFINITY
        },
        norm_drift: norms.iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max),
        fire_prob,
        conditional_fidelity,
        post_measure_count,
        post_measure_state,
        resonance_detuning: eff.xi_of(p, big_m, 0.0),
        resonance_detuning_unscaled: eff.omega_ii * (2 * big_m + 1) as f64,
        times,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fockalg::poisson_weight;

    fn setup(
        beta: f64,
        big_m: usize,
        ratio: f64,
        gamma_t: f64,
    ) -> (SystemParams, EffectiveParams, FilterConfig) {
        let xi = 1e3;
        let eff = EffectiveParams::manual(ratio * xi, 0.0, C64::new(0.0, -xi));
        let mut p = SystemParams {
            eta: 0.1,
            ..SystemParams::default()
        };
        p.delta = eff.xi_of(&p, big_m, 0.0);
        let t = gamma_t / eff.gamma_of(&p, big_m).norm();
        let cfg = FilterConfig {
            m_target: big_m,
            beta: C64::new(beta, 0.0),
            t_final: t,
            samples: 60,
            n_threshold: 2.0,
            n_cav: 64,
            n_vib: 32,
        };
        (p, eff, cfg)
    }

    #[test]
    fn resonant_block_and_weights() {
        let (p, eff, cfg) = setup(0.5, 0, 10.0, 1.0);
        let out = run_fock_filter(&p, &eff, &cfg).unwrap();
        for (a, b) in out.n_rs.iter().zip(&out.n_rs_closed_form) {
            assert!((a - b).abs() < 1e-7);
        }
        assert!((out.success_prob - poisson_weight(0.25, 0)).abs() < 1e-10);
        assert!(out.n_ns.iter().all(|&n| n <= out.bound_ns));
        assert!(out.norm_drift < 1e-9);
        assert!(out.conditional_fidelity.unwrap() > 0.99);
        let post = out.post_measure_state.unwrap();
        assert!(post.populations(0).unwrap()[0] > 0.99);
    }

    #[test]
    fn poisson_example() {
        let (p, eff, mut cfg) = setup(2.0, 4, 60.0, 0.5);
        cfg.samples = 2;
        let out = run_fock_filter(&p, &eff, &cfg).unwrap();
        assert!((out.success_prob - (-4f64).exp() * 256.0 / 24.0).abs() < 1e-10);
        assert!((out.success_prob - 0.1954).abs() < 1e-4);
    }

    #[test]
    fn no_pairing_no_photons() {
        let (p, mut eff, cfg) = setup(1.0, 1, 10.0, 1.0);
        eff.xi_ii = C64::new(0.0, 0.0);
        let cfg = FilterConfig {
            t_final: 1e-3,
            ..cfg
        };
        let out = run_fock_filter(&p, &eff, &cfg).unwrap();
        assert!(out.n_rs.iter().chain(&out.n_ns).all(|&n| n == 0.0));
        assert_eq!(out.fire_prob, 0.0);
        assert!(out.conditional_fidelity.is_none() && out.post_measure_state.is_none());
    }

    #[test]
    fn preconditions() {
        let (mut p, eff, cfg) = setup(1.0, 1, 10.0, 1.0);
        p.delta *= 1.1;
        assert!(run_fock_filter(&p, &eff, &cfg).is_err());
        let (p, eff, cfg) = setup(1.0, 1, 5.0, 1.0);
        assert!(matches!(
            run_fock_filter(&p, &eff, &cfg),
            Err(Error::Regime(_))
        ));
    }

    #[test]
    fn neighbours_can_exceed_bound() {
        // |F(M±1)| ≈ (|ξ|/ω)(2M+3), so the bound is loose only for small M
        let (p, eff, cfg) = setup(1.0, 1, 10.0, 1.0);
        let out = run_fock_filter(&p, &eff, &cfg).unwrap();
        let peak = out.n_ns.iter().cloned().fold(0.0, f64::max);
        assert!(peak > out.bound_ns && peak < 0.11, "{peak}");
    }

    #[test]
    fn resonance_readings() {
        let (p, eff, cfg) = setup(1.0, 3, 10.0, 0.2);
        let out = run_fock_filter(&p, &eff, &cfg).unwrap();
        assert!((out.resonance_detuning - p.delta).abs() < 1e-9);
        assert!((out.resonance_detuning_unscaled * p.eta * p.eta - p.delta).abs() < 1e-9);
    }
}
