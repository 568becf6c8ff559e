//! Effective parameters after eliminating the `|±> ↔ |i>` transitions, the
//! validity gate for the elimination, and a dynamical cross-check.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dynamics::{merge_warnings, StaticPropagator};
use crate::error::{Error, Result};
use crate::fockalg::{
    quadrature_moments, Factor, Level, SpaceSignature, StateVector, TruncationWarning, C64,
};
use crate::model::{
    build_dressed_corotating, build_effective_corotating, EffectiveParams, EffectiveRegime,
    SinSquared, SystemParams,
};

/// Default factor standing in for "≫".
pub const DEFAULT_MARGIN: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Validity {
    Weak,
    Strong,
    Invalid,
}

impl fmt::Display for Validity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Validity::Weak => "weak",
            Validity::Strong => "strong",
            Validity::Invalid => "invalid",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    /// `|Δ + |Ω|| / max(|λ₁|, |λ₂|, |δ|)`.
    pub ratio_plus: f64,
    /// `|Δ - |Ω|| / max(|λ₁|, |λ₂|, |δ|)`.
    pub ratio_minus: f64,
    pub regime: Validity,
    pub margin_threshold: f64,
}

/// Which amplification regime, if any, the parameters sit in.
///
/// Ratios are infinite when every coupling and `δ` vanish.
pub fn classify_regime(p: &SystemParams, margin_threshold: f64) -> ValidityReport {
    let couplings = p.lambda1.norm().max(p.lambda2.norm()).max(p.delta.abs());
    let ratio = |x: f64| {
        if couplings > 0.0 {
            x / couplings
        } else if x > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    };
    let (d, o) = (p.big_delta, p.omega_abs);
    let regime = if d > 0.0 && d >= margin_threshold * o.max(couplings) {
        Validity::Weak
    } else if o > 0.0 && o >= margin_threshold * d.abs().max(couplings) {
        Validity::Strong
    } else {
        Validity::Invalid
    };
    ValidityReport {
        ratio_plus: ratio((d + o).abs()),
        ratio_minus: ratio((d - o).abs()),
        regime,
        margin_threshold,
    }
}

/// Effective parameters from the weak or strong table.
///
/// Without `allow_override` the request must match [`classify_regime`] at
/// [`DEFAULT_MARGIN`]; with it a mismatch is accepted and flagged in
/// `overridden`.
pub fn effective_params(
    p: &SystemParams,
    regime: EffectiveRegime,
    allow_override: bool,
) -> Result<EffectiveParams> {
    let report = classify_regime(p, DEFAULT_MARGIN);
    let matches = matches!(
        (regime, report.regime),
        (EffectiveRegime::Weak, Validity::Weak) | (EffectiveRegime::Strong, Validity::Strong)
    );
    if !matches && !allow_override {
        return Err(Error::Regime(format!(
            "requested {regime} regime but parameters classify as {} (ratios {:.3}, {:.3})",
            report.regime, report.ratio_plus, report.ratio_minus
        )));
    }
    let mut eff = match regime {
        EffectiveRegime::Weak => weak_table(p)?,
        EffectiveRegime::Strong => strong_table(p)?,
        EffectiveRegime::Manual => {
            return Err(Error::param(
                "regime",
                "manual parameters are not derived from the system",
            ))
        }
    };
    eff.overridden = !matches;
    Ok(eff)
}

fn weak_table(p: &SystemParams) -> Result<EffectiveParams> {
    let d = p.big_delta;
    if d == 0.0 {
        return Err(Error::param("Delta", "weak table needs Δ ≠ 0"));
    }
    let (l1, l2) = (p.lambda1.norm_sqr(), p.lambda2.norm_sqr());
    let omega_w = (l1 + l2) / d;
    let chi_w = l1 / d;
    let xi_w = p.lambda1 * p.lambda2 * C64::from_polar(1.0, -p.phi_drive) / d;
    let omega_pp = -omega_w / 2.0;
    let chi_pp = -l2 / (2.0 * d);
    let xi_pp = -xi_w / 2.0;
    Ok(EffectiveParams {
        regime: EffectiveRegime::Weak,
        overridden: false,
        omega_ii: omega_w,
        chi_ii: chi_w,
        xi_ii: -xi_w * (p.omega_abs / d),
        omega_pp,
        chi_pp,
        xi_pp,
        omega_mm: omega_pp,
        chi_mm: chi_pp,
        xi_mm: -xi_pp,
        omega_pm: (l1 - l2) / (2.0 * d),
        chi_pm: chi_pp,
        xi_pm: xi_pp,
        xi_pp_printed: None,
    })
}

fn strong_table(p: &SystemParams) -> Result<EffectiveParams> {
    let o = p.omega_abs;
    if o == 0.0 {
        return Err(Error::param("Omega_abs", "strong table needs |Ω| ≠ 0"));
    }
    let d = p.big_delta;
    let (l1, l2) = (p.lambda1.norm_sqr(), p.lambda2.norm_sqr());
    let omega_s = (l1 + l2) / o;
    let chi_s = l1 / o;
    let xi_s = p.lambda1 * p.lambda2 * C64::from_polar(1.0, -p.phi_drive) / o;
    let zero = C64::new(0.0, 0.0);
    let omega_pp = -omega_s / 2.0;
    let chi_pp = l2 / (2.0 * o);
    let xi_pp = xi_s / 2.0;
    let xi_pp_printed =
        (d != 0.0).then(|| p.lambda1 * p.lambda2 * C64::from_polar(1.0, -p.phi_drive) / (2.0 * d));
    Ok(EffectiveParams {
        regime: EffectiveRegime::Strong,
        overridden: false,
        omega_ii: -(d / o) * omega_s,
        chi_ii: -(d / o) * chi_s,
        xi_ii: -xi_s,
        omega_pp,
        chi_pp,
        xi_pp,
        omega_mm: -omega_pp,
        chi_mm: -chi_pp,
        xi_mm: xi_pp,
        omega_pm: 0.0,
        chi_pm: 0.0,
        xi_pm: zero,
        xi_pp_printed,
    })
}

impl EffectiveParams {
    /// Weak-table values with the sign of `ξ_ii` reversed, matching direct
    /// second-order elimination of the dressed Hamiltonian. Other regimes are
    /// returned unchanged.
    pub fn with_dressed_xi_sign(&self) -> Self {
        let mut out = *self;
        if self.regime == EffectiveRegime::Weak {
            out.xi_ii = -self.xi_ii;
        }
        out
    }
}

/// Exact-versus-effective comparison on a uniform time grid.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub times: Vec<f64>,
    /// `|<ψ_exact|ψ_eff ⊗ i>|²`.
    pub fidelity: Vec<f64>,
    pub n_exact: Vec<f64>,
    pub n_effective: Vec<f64>,
    pub var_min_exact: Vec<f64>,
    pub var_min_effective: Vec<f64>,
    /// Population of the exact run outside `|i>`.
    pub leakage: Vec<f64>,
    #[serde(skip)]
    pub warnings: Vec<TruncationWarning>,
}

impl ValidationReport {
    pub fn max_infidelity(&self) -> f64 {
        self.fidelity.iter().map(|f| 1.0 - f).fold(0.0, f64::max)
    }

    pub fn max_photon_delta(&self) -> f64 {
        max_delta(&self.n_exact, &self.n_effective)
    }

    pub fn max_variance_delta(&self) -> f64 {
        max_delta(&self.var_min_exact, &self.var_min_effective)
    }
}

fn max_delta(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Propagate the exact dressed Hamiltonian and the `|i>`-branch effective
/// Hamiltonian from `|0, 0, i>` on `space` (cavity ⊗ motion ⊗ atom) at
/// `steps + 1` evenly spaced times in `[0, t_max]`.
pub fn validate_effective_dynamics(
    p: &SystemParams,
    eff: &EffectiveParams,
    space: &SpaceSignature,
    t_max: f64,
    steps: usize,
) -> Result<ValidationReport> {
    let nc = space.boson_dim(0)?;
    let nv = space.boson_dim(1)?;
    space.require_atom(2)?;
    let bosons = StateVector::ground(&SpaceSignature::cavity_motion(nc, nv)?);
    validate_effective_dynamics_from(p, eff, &bosons, t_max, steps)
}

/// As [`validate_effective_dynamics`] from an arbitrary cavity ⊗ motion state,
/// with the atom in `|i>`.
pub fn validate_effective_dynamics_from(
    p: &SystemParams,
    eff: &EffectiveParams,
    bosons: &StateVector,
    t_max: f64,
    steps: usize,
) -> Result<ValidationReport> {
    if steps == 0 || !(t_max >= 0.0) {
        return Err(Error::param("steps", "need steps >= 1 and t_max >= 0"));
    }
    let pair = bosons.space().clone();
    let nc = pair.boson_dim(0)?;
    let nv = pair.boson_dim(1)?;
    if pair.factors().len() != 2 {
        return Err(Error::Signature(
            "initial state must live on cavity ⊗ motion".into(),
        ));
    }
    let full = SpaceSignature::cavity_motion_atom(nc, nv)?;
    let atom = SpaceSignature::new(vec![Factor::Atom])?;
    let ket_i = StateVector::basis(&atom, &[Level::I.index()])?;

    let exact = StaticPropagator::new(&build_dressed_corotating(p, &full)?)?;
    let effective = StaticPropagator::new(&build_effective_corotating(
        p,
        eff,
        &pair,
        SinSquared::Exact,
    )?)?;

    let times: Vec<f64> = (0..=steps)
        .map(|k| t_max * k as f64 / steps as f64)
        .collect();
    let ex = exact.trajectory(&bosons.tensor(&ket_i), &times)?;
    let ef = effective.trajectory(bosons, &times)?;

    let mut report = ValidationReport {
        times: times.clone(),
        fidelity: Vec::with_capacity(times.len()),
        n_exact: Vec::with_capacity(times.len()),
        n_effective: Vec::with_capacity(times.len()),
        var_min_exact: Vec::with_capacity(times.len()),
        var_min_effective: Vec::with_capacity(times.len()),
        leakage: Vec::with_capacity(times.len()),
        warnings: merge_warnings(ex.warnings.iter().chain(&ef.warnings).cloned()),
    };
    for (a, b) in ex.states.iter().zip(&ef.states) {
        report.fidelity.push(a.fidelity(&b.tensor(&ket_i))?);
        let (ma, mb) = (quadrature_moments(a, 0)?, quadrature_moments(b, 0)?);
        report.n_exact.push(ma.n);
        report.n_effective.push(mb.n);
        report.var_min_exact.push(ma.extrema().var_min);
        report.var_min_effective.push(mb.extrema().var_min);
        report
            .leakage
            .push(1.0 - a.populations(2)?[Level::I.index()]);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    /// Ion-cavity numbers of the weak-amplification example.
    fn example() -> SystemParams {
        SystemParams {
            omega: 1e15,
            nu: 2e5,
            delta: 6e4,
            big_delta: 3e6,
            lambda1: C64::new(3e5, 0.0),
            lambda2: C64::new(3e5, 0.0),
            omega_abs: 3e5,
            phi_drive: 0.0,
            eta: 0.05,
            eta_l: 0.0,
            varphi: FRAC_PI_2,
        }
    }

    fn strong() -> SystemParams {
        SystemParams {
            big_delta: 2e5,
            omega_abs: 5e6,
            lambda1: C64::from_polar(3e5, 0.3),
            lambda2: C64::from_polar(2e5, -1.1),
            phi_drive: 0.7,
            ..example()
        }
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_regime(&example(), 10.0).regime, Validity::Weak);
        let s = SystemParams {
            big_delta: 0.0,
            omega_abs: 1e7,
            ..example()
        };
        assert_eq!(classify_regime(&s, 10.0).regime, Validity::Strong);
        let bad = SystemParams {
            big_delta: 3e6,
            omega_abs: 3e6,
            ..example()
        };
        let r = classify_regime(&bad, 10.0);
        assert_eq!(r.regime, Validity::Invalid);
        assert_eq!(r.ratio_minus, 0.0);
        assert!((r.ratio_plus - 20.0).abs() < 1e-12);
    }

    #[test]
    fn example_values() {
        let eff = effective_params(&example(), EffectiveRegime::Weak, false).unwrap();
        assert!((eff.omega_ii - 6e4).abs() < 1e-9);
        assert!((eff.xi_ii.norm() - 3e3).abs() < 1e-9);
        assert!(!eff.overridden);
    }

    #[test]
    fn weak_phase() {
        let p = SystemParams {
            lambda1: C64::from_polar(3e5, 0.4),
            lambda2: C64::from_polar(2e5, 1.3),
            phi_drive: 0.25,
            ..example()
        };
        let eff = effective_params(&p, EffectiveRegime::Weak, false).unwrap();
        let want = (0.4 + 1.3 - 0.25 + PI).rem_euclid(2.0 * PI);
        assert!((eff.xi_ii.arg().rem_euclid(2.0 * PI) - want).abs() < 1e-12);
        let flipped = eff.with_dressed_xi_sign();
        assert_eq!(flipped.xi_ii, -eff.xi_ii);
        assert_eq!(flipped.omega_ii, eff.omega_ii);
    }

    #[test]
    fn no_drive_no_pairing() {
        let p = SystemParams {
            omega_abs: 0.0,
            ..example()
        };
        let eff = effective_params(&p, EffectiveRegime::Weak, false).unwrap();
        assert_eq!(eff.xi_ii, C64::new(0.0, 0.0));
    }

    #[test]
    fn branch_symmetries() {
        let w = effective_params(&example(), EffectiveRegime::Weak, false).unwrap();
        assert_eq!(w.omega_mm, w.omega_pp);
        assert_eq!(w.chi_mm, w.chi_pp);
        assert_eq!(w.xi_mm, -w.xi_pp);
        let s = effective_params(&strong(), EffectiveRegime::Strong, false).unwrap();
        assert_eq!((s.omega_pm, s.chi_pm), (0.0, 0.0));
        assert_eq!(s.xi_pm, C64::new(0.0, 0.0));
        assert_eq!(s.omega_mm, -s.omega_pp);
        assert_eq!(s.chi_mm, -s.chi_pp);
        assert_eq!(s.xi_mm, s.xi_pp);
        assert!(s.xi_pp_printed.is_some());
        let at_zero = SystemParams {
            big_delta: 0.0,
            ..strong()
        };
        let z = effective_params(&at_zero, EffectiveRegime::Strong, false).unwrap();
        assert!(z.xi_pp_printed.is_none());
        assert_eq!(z.omega_ii, 0.0);
    }

    #[test]
    fn weak_ratio_formula() {
        let p = SystemParams {
            lambda1: C64::new(2e5, 1e5),
            lambda2: C64::new(-1e5, 2.5e5),
            ..example()
        };
        let eff = effective_params(&p, EffectiveRegime::Weak, false).unwrap();
        let (a, b) = (p.lambda1.norm(), p.lambda2.norm());
        let want = a * b * p.omega_abs / (p.big_delta * (a * a + b * b));
        assert!((eff.xi_ii.norm() / eff.omega_ii - want).abs() < 1e-14);
    }

    #[test]
    fn mismatch_needs_override() {
        let err = effective_params(&example(), EffectiveRegime::Strong, false).unwrap_err();
        assert!(matches!(err, Error::Regime(_)));
        let forced = effective_params(&example(), EffectiveRegime::Strong, true).unwrap();
        assert!(forced.overridden);
        let bad = SystemParams {
            omega_abs: 3e6,
            ..example()
        };
        assert!(effective_params(&bad, EffectiveRegime::Weak, false).is_err());
        assert!(
            effective_params(&bad, EffectiveRegime::Weak, true)
                .unwrap()
                .overridden
        );
        assert!(effective_params(&example(), EffectiveRegime::Manual, true).is_err());
    }

    #[test]
    fn uncoupled_dynamics_are_exact() {
        let p = SystemParams {
            lambda1: C64::new(0.0, 0.0),
            lambda2: C64::new(0.0, 0.0),
            omega_abs: 0.0,
            ..example()
        };
        let eff = effective_params(&p, EffectiveRegime::Weak, false).unwrap();
        let space = SpaceSignature::cavity_motion_atom(6, 4).unwrap();
        let r = validate_effective_dynamics(&p, &eff, &space, 2e-4, 10).unwrap();
        for f in &r.fidelity {
            assert!((f - 1.0).abs() < 1e-12);
        }
        assert!(r.leakage.iter().all(|l| l.abs() < 1e-12));
    }

    #[test]
    fn larger_detuning_is_more_faithful() {
        let space = SpaceSignature::cavity_motion_atom(12, 6).unwrap();
        let infid: Vec<f64> = [3e6, 6e6, 1.2e7]
            .iter()
            .map(|&d| {
                let p = SystemParams {
                    big_delta: d,
                    ..example()
                };
                let eff = effective_params(&p, EffectiveRegime::Weak, false).unwrap();
                validate_effective_dynamics(&p, &eff, &space, 1e-4, 10)
                    .unwrap()
                    .max_infidelity()
            })
            .collect();
        assert!(infid[0] > infid[1] && infid[1] > infid[2], "{infid:?}");
    }

    #[test]
    fn initial_state_must_be_bosonic_pair() {
        let eff = effective_params(&example(), EffectiveRegime::Weak, false).unwrap();
        let one = StateVector::ground(&SpaceSignature::boson(4).unwrap());
        assert!(validate_effective_dynamics_from(&example(), &eff, &one, 1e-5, 2).is_err());
    }
}
