//! Turns a parsed configuration into a result table and a metadata record.

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use ioncav::adiabatic::{
    classify_regime, effective_params, validate_effective_dynamics, Validity, DEFAULT_MARGIN,
};
use ioncav::experiments::{
    regime_map, run_fock_filter, run_h1_squeezing, run_semiclassical_comparison, CavityInit,
    Engine, FilterConfig, SemiclassicalConfig, SqueezeConfig,
};
use ioncav::fockalg::{SpaceSignature, C64};
use ioncav::model::{EffectiveParams, EffectiveRegime, SystemParams};
use ioncav::ErrorClass;

use crate::config::{ConfigError, Experiment, RunConfig};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] ioncav::Error),
    #[error("{0}")]
    Io(String),
}

impl RunError {
    /// Short machine-readable class printed on stderr.
    pub fn class(&self) -> &'static str {
        match self {
            RunError::Config(_) => "config",
            RunError::Model(e) => match e.class() {
                ErrorClass::Input => "config",
                ErrorClass::Precondition => "precondition",
                ErrorClass::Truncation => "truncation",
                ErrorClass::Numerical => "numerical",
            },
            RunError::Io(_) => "io",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.class() {
            "config" => 2,
            "precondition" => 3,
            "truncation" => 4,
            "numerical" => 5,
            _ => 1,
        }
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e.to_string())
    }
}

/// Result rows plus everything needed to reproduce them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub metadata: Value,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    #[serde(skip)]
    pub warnings: Vec<String>,
}

impl Outcome {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

fn columns(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn c64_json(c: C64) -> Value {
    json!([c.re, c.im])
}

/// Effective parameters for `p` as the `[effective]` section asks.
pub fn resolve_effective(cfg: &RunConfig, p: &SystemParams) -> Result<EffectiveParams, RunError> {
    let e = &cfg.effective;
    let eff = match e.regime {
        Some(EffectiveRegime::Manual) => EffectiveParams::manual(
            e.omega_ii.unwrap_or_default(),
            e.chi_ii.unwrap_or_default(),
            e.xi_ii.map(|c| c.value()).unwrap_or_default(),
        ),
        Some(r) => effective_params(p, r, e.allow_override)?,
        None => match classify_regime(p, DEFAULT_MARGIN).regime {
            Validity::Strong => effective_params(p, EffectiveRegime::Strong, false)?,
            // an invalid point fails the weak check with the ratios in the message
            Validity::Weak | Validity::Invalid => {
                effective_params(p, EffectiveRegime::Weak, false)?
            }
        },
    };
    Ok(if e.dressed_xi_sign {
        eff.with_dressed_xi_sign()
    } else {
        eff
    })
}

fn auto_delta(
    cfg: &RunConfig,
    experiment: Experiment,
    eff: &EffectiveParams,
    p: &SystemParams,
) -> Result<f64, RunError> {
    match experiment {
        Experiment::Squeeze => Ok(eff.omega_ii),
        Experiment::Filter => {
            let m = cfg.require(experiment, "run.M", cfg.run.m_target)?;
            Ok(eff.xi_of(p, m, 0.0))
        }
        // replaced per amplitude
        Experiment::Semiclassical => Ok(0.0),
        _ => Err(ConfigError::Invalid {
            key: "system.delta".into(),
            reason: format!("\"auto\" is only meaningful for squeeze, filter and semiclassical, not {experiment}"),
        }
        .into()),
    }
}

fn n_cav(cfg: &RunConfig, experiment: Experiment) -> Result<usize, RunError> {
    Ok(cfg.require(experiment, "truncation.N_cav", cfg.truncation.n_cav)?)
}

fn n_vib(cfg: &RunConfig, experiment: Experiment) -> Result<usize, RunError> {
    Ok(cfg.require(experiment, "truncation.N_vib", cfg.truncation.n_vib)?)
}

/// Run `experiment` on `cfg`.
pub fn execute(cfg: &RunConfig, experiment: Experiment) -> Result<Outcome, RunError> {
    if let Some(file) = cfg.experiment {
        if file != experiment {
            return Err(ConfigError::ExperimentMismatch {
                file,
                cli: experiment,
            }
            .into());
        }
    }
    let mut p = cfg.system_params(0.0);
    let mut eff = resolve_effective(cfg, &p)?;
    if cfg.delta_is_auto() {
        p.delta = auto_delta(cfg, experiment, &eff, &p)?;
        if cfg.effective.regime != Some(EffectiveRegime::Manual) {
            eff = resolve_effective(cfg, &p)?;
        }
    }
    let validity = classify_regime(&p, DEFAULT_MARGIN);
    let mut warnings = Vec::new();
    if eff.overridden {
        warnings.push(format!(
            "effective regime {} forced against validity check ({})",
            eff.regime, validity.regime
        ));
    }

    let (columns, rows, summary, notes) = match experiment {
        Experiment::Params => params(&p, &eff)?,
        Experiment::Evolve => evolve(cfg, &p, &eff, &mut warnings)?,
        Experiment::Regimes => regimes(cfg, &p, &eff)?,
        Experiment::Squeeze => squeeze(cfg, &p, &eff, &mut warnings)?,
        Experiment::Filter => filter(cfg, &p, &eff, &mut warnings)?,
        Experiment::Semiclassical => semiclassical(cfg, &p, &eff, &mut warnings)?,
    };

    let metadata = json!({
        "experiment": experiment,
        "library_version": VERSION,
        "system": p,
        "truncation": cfg.truncation,
        "effective": eff,
        "validity": validity,
        "run": cfg.run,
        "summary": summary,
        "notes": notes,
        "warnings": warnings,
    });
    Ok(Outcome {
        metadata,
        columns,
        rows,
        warnings,
    })
}

type Parts = (Vec<String>, Vec<Vec<f64>>, Value, Vec<&'static str>);

fn params(p: &SystemParams, e: &EffectiveParams) -> Result<Parts, RunError> {
    let rows = vec![vec![
        e.omega_ii,
        e.chi_ii,
        e.xi_ii.re,
        e.xi_ii.im,
        e.phi_shift(p),
        e.xi_of(p, 0, p.delta),
        e.gamma_of(p, 0).norm(),
    ]];
    let cols = columns(&[
        "omega_ii",
        "chi_ii",
        "xi_ii_re",
        "xi_ii_im",
        "Phi",
        "Xi_0",
        "Gamma_0_abs",
    ]);
    let summary = json!({
        "xi_pp_printed": e.xi_pp_printed.map(c64_json),
    });
    Ok((cols, rows, summary, vec![]))
}

fn evolve(
    cfg: &RunConfig,
    p: &SystemParams,
    e: &EffectiveParams,
    warnings: &mut Vec<String>,
) -> Result<Parts, RunError> {
    let x = Experiment::Evolve;
    let t_final = cfg.require(x, "run.t_final", cfg.run.t_final)?;
    let samples = cfg.require(x, "run.samples", cfg.run.samples)?;
    let space = SpaceSignature::cavity_motion_atom(n_cav(cfg, x)?, n_vib(cfg, x)?)?;
    let rep = validate_effective_dynamics(p, e, &space, t_final, samples)?;
    warnings.extend(rep.warnings.iter().map(|w| w.to_string()));
    let rows = (0..rep.times.len())
        .map(|k| {
            vec![
                rep.times[k],
                rep.fidelity[k],
                rep.n_exact[k],
                rep.n_effective[k],
                rep.var_min_exact[k],
                rep.var_min_effective[k],
                rep.leakage[k],
            ]
        })
        .collect();
    let cols = columns(&[
        "t_seconds",
        "fidelity",
        "n_exact",
        "n_effective",
        "var_min_exact",
        "var_min_effective",
        "leakage",
    ]);
    let summary = json!({
        "max_infidelity": rep.max_infidelity(),
        "max_photon_delta": rep.max_photon_delta(),
        "max_variance_delta": rep.max_variance_delta(),
    });
    Ok((
        cols,
        rows,
        summary,
        vec!["fidelity is computed in the frame co-rotating with the cavity and motion"],
    ))
}

fn regimes(cfg: &RunConfig, p: &SystemParams, e: &EffectiveParams) -> Result<Parts, RunError> {
    let x = Experiment::Regimes;
    let deltas = cfg.run.delta_list.clone().unwrap_or_else(|| vec![p.delta]);
    let m_max = cfg.require(x, "run.m_max", cfg.run.m_max)?;
    let maps = regime_map(p, e, &deltas, m_max)?;
    let mut rows = Vec::new();
    for map in &maps {
        for r in &map.reports {
            rows.push(vec![
                map.delta,
                r.m as f64,
                r.xi,
                r.gamma.norm(),
                r.f_abs().unwrap_or(f64::INFINITY),
                r.classification.code() as f64,
            ]);
        }
    }
    let cols = columns(&["delta", "m", "Xi", "Gamma_abs", "F_abs", "regime_code"]);
    let summary: Vec<Value> = maps
        .iter()
        .map(|m| {
            json!({
                "delta": m.delta,
                "monotonicity": m.monotonicity,
                "resonant_m": m.resonant_m,
                "crossings": m.crossings,
            })
        })
        .collect();
    Ok((
        cols,
        rows,
        Value::Array(summary),
        vec!["regime_code: 0 subcritical, 1 critical, 2 supercritical, 3 resonant (F_abs = inf)"],
    ))
}

fn squeeze(
    cfg: &RunConfig,
    p: &SystemParams,
    e: &EffectiveParams,
    warnings: &mut Vec<String>,
) -> Result<Parts, RunError> {
    let x = Experiment::Squeeze;
    let engine = cfg.run.engine.unwrap_or(Engine::Analytic);
    let n_cav = match engine {
        Engine::Numeric => n_cav(cfg, x)?,
        Engine::Analytic => cfg.truncation.n_cav.unwrap_or(2),
    };
    let sc = SqueezeConfig {
        t_final: cfg.require(x, "run.t_final", cfg.run.t_final)?,
        samples: cfg.require(x, "run.samples", cfg.run.samples)?,
        engine,
        initial: match cfg.run.cavity_alpha {
            Some(a) => CavityInit::Coherent(a.value()),
            None => CavityInit::Vacuum,
        },
        n_cav,
    };
    let out = run_h1_squeezing(p, e, &sc)?;
    warnings.extend(out.warnings.iter().cloned());
    let rows = out
        .series
        .iter()
        .map(|s| {
            vec![
                s.t,
                s.r,
                s.rate_percent,
                s.theta_min,
                s.var_min,
                s.var_max,
                s.var_theta_0,
                s.n_mean,
            ]
        })
        .collect();
    let cols = columns(&[
        "t_seconds",
        "r",
        "R_percent",
        "theta_min",
        "var_min",
        "var_max",
        "var_theta_0",
        "n_mean",
    ]);
    let summary = json!({
        "r": out.r,
        "R_percent": out.rate_percent,
        "theta_min": out.theta_min,
        "theta_half_phase": out.theta_half_phase,
        "var_min": out.var_min,
        "var_max": out.var_max,
        "n_mean": out.n_mean,
    });
    Ok((
        cols,
        rows,
        summary,
        vec![
            "theta_min is the quadrature angle of least variance; theta_half_phase is arg(xi_ii)/2",
        ],
    ))
}

fn filter(
    cfg: &RunConfig,
    p: &SystemParams,
    e: &EffectiveParams,
    warnings: &mut Vec<String>,
) -> Result<Parts, RunError> {
    let x = Experiment::Filter;
    let fc = FilterConfig {
        m_target: cfg.require(x, "run.M", cfg.run.m_target)?,
        beta: cfg.require(x, "run.beta", cfg.run.beta)?.value(),
        t_final: cfg.require(x, "run.t_final", cfg.run.t_final)?,
        samples: cfg.require(x, "run.samples", cfg.run.samples)?,
        n_threshold: cfg.require(x, "run.n_threshold", cfg.run.n_threshold)?,
        n_cav: n_cav(cfg, x)?,
        n_vib: n_vib(cfg, x)?,
    };
    let out = run_fock_filter(p, e, &fc)?;
    warnings.extend(out.warnings.iter().cloned());
    let rows = (0..out.times.len())
        .map(|k| {
            vec![
                out.times[k],
                out.n_rs[k],
                out.n_rs_closed_form[k],
                out.n_ns[k],
                out.bound_ns,
            ]
        })
        .collect();
    let cols = columns(&["t_seconds", "n_RS", "n_RS_closed_form", "n_NS", "bound_NS"]);
    let populations = match &out.post_measure_state {
        Some(s) => Some(s.populations(0)?),
        None => None,
    };
    let summary = json!({
        "M": out.m_target,
        "success_prob": out.success_prob,
        "fire_prob": out.fire_prob,
        "conditional_fidelity": out.conditional_fidelity,
        "post_measure_count": out.post_measure_count,
        "post_measure_populations": populations,
        "norm_drift": out.norm_drift,
        "resonance_detuning": out.resonance_detuning,
        "resonance_detuning_unscaled": out.resonance_detuning_unscaled,
    });
    Ok((
        cols,
        rows,
        summary,
        vec![
            "resonant photon number follows sinh^2(|Gamma(M)| t) with Gamma(M) = 2 eta^2 xi_ii (2M+1)",
            "resonance_detuning keeps eta^2 explicit; resonance_detuning_unscaled absorbs it into omega_ii",
        ],
    ))
}

fn semiclassical(
    cfg: &RunConfig,
    p: &SystemParams,
    e: &EffectiveParams,
    warnings: &mut Vec<String>,
) -> Result<Parts, RunError> {
    let x = Experiment::Semiclassical;
    let betas = cfg
        .run
        .betas
        .clone()
        .ok_or(ConfigError::Missing {
            key: "run.betas".into(),
            experiment: x,
        })?
        .into_iter()
        .map(|b| b.value())
        .collect();
    let sc = SemiclassicalConfig {
        betas,
        r_max: cfg.require(x, "run.r_max", cfg.run.r_max)?,
        samples: cfg.require(x, "run.samples", cfg.run.samples)?,
        n_cav: n_cav(cfg, x)?,
        n_vib: n_vib(cfg, x)?,
        engine: cfg.run.engine.unwrap_or(Engine::Analytic),
    };
    let runs = run_semiclassical_comparison(p, e, &sc)?;
    let mut rows = Vec::new();
    for run in &runs {
        warnings.extend(
            run.warnings
                .iter()
                .map(|w| format!("beta = {}: {w}", run.beta)),
        );
        for r in &run.rows {
            rows.push(vec![
                run.beta.re,
                run.beta.im,
                r.r,
                r.t,
                r.var_quantum,
                r.var_semiclassical,
                r.var_ideal,
                r.deviation,
            ]);
        }
    }
    let cols = columns(&[
        "beta_re",
        "beta_im",
        "r",
        "t_seconds",
        "var_quantum",
        "var_semiclassical",
        "var_ideal",
        "deviation",
    ]);
    let summary: Vec<Value> = runs
        .iter()
        .map(|r| json!({ "beta": c64_json(r.beta), "delta": r.delta, "theta_sq": r.theta_sq }))
        .collect();
    Ok((
        cols,
        rows,
        Value::Array(summary),
        vec!["each amplitude runs at delta = 2 eta^2 |beta|^2 omega_ii with r = 4 eta^2 |beta|^2 |xi_ii| t"],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    const BASE: &str = r#"
[system]
omega = 1e15
nu = 2e5
delta = "auto"
Delta = 3e6
lambda1 = 3e5
lambda2 = 3e5
Omega_abs = 3e5
eta = 0.05
varphi = 1.5707963267948966
"#;

    fn run(extra: &str, x: Experiment) -> Result<Outcome, RunError> {
        let cfg = parse_config(&format!("{BASE}{extra}")).unwrap().config;
        execute(&cfg, x)
    }

    #[test]
    fn squeeze_final_record() {
        let out = run("[run]\nt_final = 2e-4\nsamples = 20\n", Experiment::Squeeze).unwrap();
        assert_eq!(out.columns[0], "t_seconds");
        let last = out.rows.last().unwrap();
        assert!((last[1] - 1.2).abs() < 1e-9);
        assert!((last[2] - 90.928).abs() < 1e-3);
    }

    #[test]
    fn auto_detuning_rejected_for_regimes() {
        let err = run("[run]\nm_max = 4\n", Experiment::Regimes).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn missing_run_key() {
        let err = run("[run]\nsamples = 20\n", Experiment::Squeeze).unwrap_err();
        assert!(err.to_string().contains("run.t_final"));
        assert_eq!(err.class(), "config");
    }

    #[test]
    fn invalid_regime_is_precondition() {
        let text = BASE.replace("Delta = 3e6", "Delta = 4e5");
        let cfg = parse_config(&format!("{text}[run]\nt_final = 1e-4\nsamples = 2\n"))
            .unwrap()
            .config;
        let err = execute(&cfg, Experiment::Squeeze).unwrap_err();
        assert_eq!(err.class(), "precondition");
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn experiment_mismatch() {
        let cfg = parse_config(&format!("experiment = \"filter\"\n{BASE}"))
            .unwrap()
            .config;
        assert!(matches!(
            execute(&cfg, Experiment::Squeeze),
            Err(RunError::Config(ConfigError::ExperimentMismatch { .. }))
        ));
    }

    #[test]
    fn params_row() {
        let text = BASE.replace("\"auto\"", "6e4");
        let cfg = parse_config(&text).unwrap().config;
        let out = execute(&cfg, Experiment::Params).unwrap();
        assert_eq!(out.rows.len(), 1);
        assert!(out.column("omega_ii").unwrap()[0] > 0.0);
        assert_eq!(out.metadata["validity"]["regime"], "weak");
    }
}
