//! Time evolution and the closed-form Heisenberg solutions of the
//! single-mode parametric Hamiltonian `Ξ a†a + (Γ a†² + h.c.)/2`.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fockalg::{OperatorMatrix, Spectral, StateVector, TruncationWarning, C64};
use crate::model::{EffectiveParams, SystemParams};

/// Largest accepted `dt · max|H|` for one midpoint step.
pub const STEP_GUARD: f64 = 0.05;

/// States sampled along a propagation.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    /// Worst truncation warning per factor over the whole trajectory.
    pub warnings: Vec<TruncationWarning>,
}

impl Trajectory {
    fn from_states(times: Vec<f64>, states: Vec<StateVector>) -> Self {
        let warnings = merge_warnings(states.iter().flat_map(|s| s.truncation_warnings()));
        Self {
            times,
            states,
            warnings,
        }
    }

    pub fn last(&self) -> &StateVector {
        self.states.last().expect("trajectories are never empty")
    }
}

/// Keep the largest top-band population seen for each factor.
pub(crate) fn merge_warnings(
    all: impl IntoIterator<Item = TruncationWarning>,
) -> Vec<TruncationWarning> {
    let mut out: Vec<TruncationWarning> = Vec::new();
    for w in all {
        match out.iter_mut().find(|o| o.factor == w.factor) {
            Some(o) if o.top_population < w.top_population => *o = w,
            Some(_) => {}
            None => out.push(w),
        }
    }
    out.sort_by_key(|w| w.factor);
    out
}

/// `e^{-iHt}` for a fixed Hermitian `H`, diagonalized once.
#[derive(Debug, Clone)]
pub struct StaticPropagator {
    space: crate::fockalg::SpaceSignature,
    spectral: Spectral,
}

impl StaticPropagator {
    pub fn new(h: &OperatorMatrix) -> Result<Self> {
        Ok(Self {
            space: h.space().clone(),
            spectral: Spectral::of(h)?,
        })
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.spectral.eigenvalues
    }

    /// Coordinates of `psi0` in the eigenbasis.
    fn coords(&self, psi0: &StateVector) -> Result<DVector<C64>> {
        self.space.ensure_same(psi0.space())?;
        Ok(self.spectral.eigenvectors.ad_mul(psi0.amplitudes()))
    }

    fn at(&self, coords: &DVector<C64>, t: f64) -> StateVector {
        let phased = DVector::from_fn(coords.len(), |k, _| {
            coords[k] * C64::from_polar(1.0, -self.spectral.eigenvalues[k] * t)
        });
        StateVector::from_parts(self.space.clone(), &self.spectral.eigenvectors * phased)
    }

    pub fn evolve(&self, psi0: &StateVector, t: f64) -> Result<StateVector> {
        Ok(self.at(&self.coords(psi0)?, t))
    }

    pub fn trajectory(&self, psi0: &StateVector, times: &[f64]) -> Result<Trajectory> {
        let coords = self.coords(psi0)?;
        let states = times.iter().map(|&t| self.at(&coords, t)).collect();
        Ok(Trajectory::from_states(times.to_vec(), states))
    }
}

/// `ψ(t) = e^{-iHt} ψ₀` at every requested time, from one diagonalization.
pub fn evolve_static(h: &OperatorMatrix, psi0: &StateVector, times: &[f64]) -> Result<Trajectory> {
    StaticPropagator::new(h)?.trajectory(psi0, times)
}

fn midpoint_step<F>(builder: &F, psi: &StateVector, t: f64, dt: f64) -> Result<StateVector>
where
    F: Fn(f64) -> Result<OperatorMatrix>,
{
    let h = builder(t + 0.5 * dt)?;
    h.space().ensure_same(psi.space())?;
    let product = dt * h.max_abs();
    if product > STEP_GUARD {
        return Err(Error::StepGuard {
            product,
            limit: STEP_GUARD,
        });
    }
    let spec = Spectral::of(&h)?;
    let u: DMatrix<C64> = spec.map(|e| C64::from_polar(1.0, -e * dt));
    Ok(StateVector::from_parts(
        psi.space().clone(),
        u * psi.amplitudes(),
    ))
}

/// Time-ordered midpoint propagation recorded at `times` (ascending, starting
/// at or after 0). Each interval is split into equal substeps no longer than
/// `max_dt`.
pub fn evolve_timedep_at<F>(
    builder: F,
    psi0: &StateVector,
    times: &[f64],
    max_dt: f64,
) -> Result<Trajectory>
where
    F: Fn(f64) -> Result<OperatorMatrix>,
{
    if !(max_dt > 0.0) {
        return Err(Error::param(
            "dt",
            format!("must be positive, got {max_dt}"),
        ));
    }
    let mut psi = psi0.clone();
    let mut now = 0.0;
    let mut states = Vec::with_capacity(times.len());
    for &target in times {
        if target < now {
            return Err(Error::param(
                "times",
                "sample times must be ascending and >= 0",
            ));
        }
        let span = target - now;
        let n = (span / max_dt - 1e-9).ceil().max(0.0) as usize;
        if n > 0 {
            let dt = span / n as f64;
            for k in 0..n {
                psi = midpoint_step(&builder, &psi, now + k as f64 * dt, dt)?;
            }
        }
        now = target;
        states.push(psi.clone());
    }
    Ok(Trajectory::from_states(times.to_vec(), states))
}

/// Midpoint propagation on the uniform grid `0, dt, ..., t_max`; the last
/// step is shortened so the grid ends exactly at `t_max`.
pub fn evolve_timedep<F>(builder: F, psi0: &StateVector, t_max: f64, dt: f64) -> Result<Trajectory>
where
    F: Fn(f64) -> Result<OperatorMatrix>,
{
    if !(dt > 0.0) || t_max < 0.0 {
        return Err(Error::param("dt", "need dt > 0 and t_max >= 0"));
    }
    let n = (t_max / dt - 1e-9).ceil().max(0.0) as usize;
    let mut times: Vec<f64> = (0..n).map(|k| k as f64 * dt).collect();
    times.push(t_max);
    evolve_timedep_at(builder, psi0, &times, dt)
}

/// Outcome of [`converge_timedep`].
#[derive(Debug, Clone)]
pub struct Converged {
    pub trajectory: Trajectory,
    pub dt: f64,
    /// Largest observable change between the last two step sizes.
    pub change: f64,
}

/// Halve `dt` until the observable at every sample time changes by less than
/// `tol`, giving up after `max_halvings`.
pub fn converge_timedep<F, O>(
    builder: F,
    psi0: &StateVector,
    times: &[f64],
    dt0: f64,
    observable: O,
    tol: f64,
    max_halvings: usize,
) -> Result<Converged>
where
    F: Fn(f64) -> Result<OperatorMatrix>,
    O: Fn(&StateVector) -> f64,
{
    let mut dt = dt0;
    let mut prev = evolve_timedep_at(&builder, psi0, times, dt)?;
    let mut change = f64::INFINITY;
    for _ in 0..max_halvings {
        dt *= 0.5;
        let next = evolve_timedep_at(&builder, psi0, times, dt)?;
        change = prev
            .states
            .iter()
            .zip(&next.states)
            .map(|(a, b)| (observable(a) - observable(b)).abs())
            .fold(0.0, f64::max);
        if change < tol {
            return Ok(Converged {
                trajectory: next,
                dt,
                change,
            });
        }
        prev = next;
    }
    Err(Error::NotConverged {
        halvings: max_halvings,
        change,
        tolerance: tol,
    })
}

/// Behaviour of the parametric process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
    Resonant,
}

impl Regime {
    /// Stable numeric code: 0 sub, 1 critical, 2 super, 3 resonant.
    pub fn code(self) -> u8 {
        match self {
            Regime::Subcritical => 0,
            Regime::Critical => 1,
            Regime::Supercritical => 2,
            Regime::Resonant => 3,
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Subcritical => "subcritical",
            Regime::Critical => "critical",
            Regime::Supercritical => "supercritical",
            Regime::Resonant => "resonant",
        })
    }
}

/// Classification tolerances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeTolerance {
    /// `|Ξ|` below this fraction of the scale of its terms counts as zero.
    pub resonant_rel: f64,
    /// Half-width of the band `||F| - 1|` treated as critical.
    pub critical_band: f64,
}

impl Default for RegimeTolerance {
    fn default() -> Self {
        Self {
            resonant_rel: 1e-12,
            critical_band: 1e-9,
        }
    }
}

fn classify_values(xi: f64, gamma: C64, scale: f64, tol: RegimeTolerance) -> (Option<C64>, Regime) {
    if xi.abs() <= tol.resonant_rel * scale || xi == 0.0 {
        return (None, Regime::Resonant);
    }
    let f = gamma / xi;
    let r = f.norm();
    let regime = if (r - 1.0).abs() <= tol.critical_band {
        Regime::Critical
    } else if r < 1.0 {
        Regime::Subcritical
    } else {
        Regime::Supercritical
    };
    (Some(f), regime)
}

/// `a(t) = f a - i g a†`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BogoliubovCoefficients {
    pub f: C64,
    pub g: C64,
    pub regime: Regime,
    /// `𝔴 = sqrt(||Γ|² - Ξ²|)`.
    pub w: f64,
}

impl BogoliubovCoefficients {
    /// `⟨a†a⟩` when the mode starts in vacuum.
    pub fn vacuum_photons(&self) -> f64 {
        self.g.norm_sqr()
    }

    /// `Var(X_θ)` from vacuum.
    pub fn vacuum_variance(&self, theta: f64) -> f64 {
        let u = self.f * C64::from_polar(1.0, -theta)
            + C64::i() * self.g.conj() * C64::from_polar(1.0, theta);
        u.norm_sqr() / 4.0
    }

    /// Smallest and largest vacuum quadrature variance, `(|f| ∓ |g|)²/4`.
    pub fn vacuum_extrema(&self) -> (f64, f64) {
        let (a, b) = (self.f.norm(), self.g.norm());
        ((a - b).powi(2) / 4.0, (a + b).powi(2) / 4.0)
    }

    /// `|f|² - |g|²`, equal to one for a canonical transformation.
    pub fn symplectic_defect(&self) -> f64 {
        (self.f.norm_sqr() - self.g.norm_sqr() - 1.0).abs()
    }
}

/// Closed-form coefficients for `Ξ a†a + (Γ a†² + h.c.)/2`.
///
/// All four branches use `f = C - iΞS`, `g = ΓS` with `C, S` the cosine/sine
/// (or hyperbolic) pair of `𝔴t`; near `𝔴t = 0` a series is used so the
/// critical limit `f = 1 - iΞt, g = Γt` is reached continuously.
pub fn bogoliubov(xi: f64, gamma: C64, t: f64) -> BogoliubovCoefficients {
    bogoliubov_with(xi, gamma, t, RegimeTolerance::default())
}

pub fn bogoliubov_with(
    xi: f64,
    gamma: C64,
    t: f64,
    tol: RegimeTolerance,
) -> BogoliubovCoefficients {
    let (_, regime) = classify_values(xi, gamma, gamma.norm(), tol);
    let w2 = gamma.norm_sqr() - xi * xi;
    let q = w2 * t * t;
    let (c, s) = if q.abs() < 1e-4 {
        (
            1.0 + q / 2.0 + q * q / 24.0 + q * q * q / 720.0,
            t * (1.0 + q / 6.0 + q * q / 120.0 + q * q * q / 5040.0),
        )
    } else if w2 > 0.0 {
        let w = w2.sqrt();
        ((w * t).cosh(), (w * t).sinh() / w)
    } else {
        let w = (-w2).sqrt();
        ((w * t).cos(), (w * t).sin() / w)
    };
    BogoliubovCoefficients {
        f: C64::new(c, -xi * s),
        g: gamma * s,
        regime,
        w: w2.abs().sqrt(),
    }
}

/// Per-`m` data of the vibrationally resolved parametric Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub m: usize,
    /// `Ξ(m)`.
    pub xi: f64,
    /// `Γ(m)`.
    pub gamma: C64,
    /// `F(m) = Γ(m)/Ξ(m)`; `None` at resonance.
    pub f: Option<C64>,
    pub classification: Regime,
}

impl RegimeReport {
    pub fn f_abs(&self) -> Option<f64> {
        self.f.map(|f| f.norm())
    }
}

/// Regime of vibrational level `m` at detuning `delta`.
pub fn classify(m: usize, eff: &EffectiveParams, p: &SystemParams, delta: f64) -> RegimeReport {
    classify_with(m, eff, p, delta, RegimeTolerance::default())
}

pub fn classify_with(
    m: usize,
    eff: &EffectiveParams,
    p: &SystemParams,
    delta: f64,
    tol: RegimeTolerance,
) -> RegimeReport {
    let xi = eff.xi_of(p, m, delta);
    let gamma = eff.gamma_of(p, m);
    let scale = (eff.xi_of(p, m, 0.0)).abs().max(delta.abs());
    let (f, classification) = classify_values(xi, gamma, scale, tol);
    RegimeReport {
        m,
        xi,
        gamma,
        f,
        classification,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fockalg::{
        hermitian_function, ladder, number, quadrature_moments, Ladder, MatrixFunction,
        SpaceSignature,
    };

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    /// `Ξ a†a + (Γ a†² + h.c.)/2` on one truncated mode.
    fn block(n: usize, xi: f64, gamma: C64) -> OperatorMatrix {
        let s = SpaceSignature::boson(n).unwrap();
        let a = ladder(&s, 0, Ladder::Lowering).unwrap();
        let ad2 = a.adjoint().mul(&a.adjoint()).unwrap();
        let sq = ad2.scale(gamma * 0.5);
        number(&s, 0)
            .unwrap()
            .scale(c(xi))
            .add(&sq.add(&sq.adjoint()).unwrap())
            .unwrap()
    }

    #[test]
    fn zero_hamiltonian_keeps_state() {
        let s = SpaceSignature::boson(5).unwrap();
        let psi = StateVector::basis(&s, &[3]).unwrap();
        let tr = evolve_static(&OperatorMatrix::zeros(&s), &psi, &[0.0, 1.0, 7.0]).unwrap();
        for st in &tr.states {
            assert_eq!(st, &psi);
        }
    }

    #[test]
    fn number_state_picks_up_phase() {
        let s = SpaceSignature::boson(4).unwrap();
        let h = number(&s, 0).unwrap().scale(c(2.5));
        let psi = StateVector::basis(&s, &[1]).unwrap();
        let tr = evolve_static(&h, &psi, &[0.8]).unwrap();
        let amp = tr.states[0].amplitudes()[1];
        assert!((amp - C64::from_polar(1.0, -2.0)).norm() < 1e-14);
    }

    #[test]
    fn random_hermitian_preserves_norm() {
        let n = 200;
        let s = SpaceSignature::boson(n).unwrap();
        // deterministic pseudo-random entries
        let mut state = 0x2545f491u64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state % 20001) as f64 / 10000.0 - 1.0
        };
        let m = DMatrix::from_fn(n, n, |_, _| C64::new(next(), next()));
        let h = OperatorMatrix::new(s.clone(), &m + m.adjoint()).unwrap();
        let psi = StateVector::new(
            s.clone(),
            DVector::from_fn(n, |k, _| C64::new(1.0 / (k + 1) as f64, 0.0)),
        )
        .unwrap()
        .normalized()
        .unwrap();
        let times: Vec<f64> = (0..1000).map(|k| k as f64 * 0.013).collect();
        let tr = evolve_static(&h, &psi, &times).unwrap();
        for st in &tr.states {
            assert!((st.norm() - 1.0).abs() < 1e-11);
        }
    }

    #[test]
    fn non_hermitian_rejected() {
        let s = SpaceSignature::boson(3).unwrap();
        let a = ladder(&s, 0, Ladder::Lowering).unwrap();
        assert!(matches!(
            evolve_static(&a, &StateVector::ground(&s), &[1.0]),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn timedep_matches_static_for_constant_h() {
        let h = block(24, 0.8, C64::new(0.3, 0.2));
        let s = h.space().clone();
        let psi = StateVector::ground(&s);
        let times = [0.5, 1.0, 2.0];
        let exact = evolve_static(&h, &psi, &times).unwrap();
        let dt = 0.04 / h.max_abs();
        let stepped = evolve_timedep_at(|_| Ok(h.clone()), &psi, &times, dt).unwrap();
        let n = number(&s, 0).unwrap();
        for (a, b) in exact.states.iter().zip(&stepped.states) {
            let na = crate::fockalg::expectation(a, &n).unwrap().re;
            let nb = crate::fockalg::expectation(b, &n).unwrap().re;
            assert!((na - nb).abs() < 1e-8);
        }
    }

    #[test]
    fn step_guard_enforced() {
        let h = block(8, 1.0, c(0.0));
        let psi = StateVector::ground(h.space());
        let err = evolve_timedep(|_| Ok(h.clone()), &psi, 1.0, 0.5).unwrap_err();
        assert!(matches!(err, Error::StepGuard { .. }));
    }

    #[test]
    fn midpoint_is_second_order() {
        // H(t) = cos(t) X on a driven mode; error should drop ~4x per halving
        let s = SpaceSignature::boson(12).unwrap();
        let a = ladder(&s, 0, Ladder::Lowering).unwrap();
        let x = a.add(&a.adjoint()).unwrap();
        let n = number(&s, 0).unwrap();
        let builder = |t: f64| Ok(x.scale(c(0.3 * t.cos())).add(&n).unwrap());
        let psi = StateVector::ground(&s);
        let last = |dt: f64| {
            evolve_timedep(builder, &psi, 2.0, dt)
                .unwrap()
                .last()
                .amplitudes()
                .clone()
        };
        let (p1, p2, p3) = (last(0.004), last(0.002), last(0.001));
        let e1 = (&p1 - &p2).norm();
        let e2 = (&p2 - &p3).norm();
        assert!(e1 / e2 > 3.5 && e1 / e2 < 4.5, "ratio {}", e1 / e2);
    }

    #[test]
    fn convergence_helper_halves() {
        let h = block(10, 0.5, C64::new(0.2, 0.0));
        let psi = StateVector::ground(h.space());
        let n = number(h.space(), 0).unwrap();
        let obs = |s: &StateVector| crate::fockalg::expectation(s, &n).unwrap().re;
        let out =
            converge_timedep(|_| Ok(h.clone()), &psi, &[1.0, 3.0], 0.01, obs, 1e-6, 10).unwrap();
        assert!(out.change < 1e-6);
        assert!(out.dt < 0.01);
    }

    #[test]
    fn identity_at_time_zero() {
        for (xi, g) in [(1.0, c(0.3)), (0.0, c(0.5)), (1.0, c(1.0)), (0.2, c(1.0))] {
            let b = bogoliubov(xi, g, 0.0);
            assert_eq!(b.f, c(1.0));
            assert_eq!(b.g, c(0.0));
        }
    }

    #[test]
    fn branch_labels() {
        assert_eq!(bogoliubov(2.0, c(1.0), 1.0).regime, Regime::Subcritical);
        assert_eq!(bogoliubov(1.0, c(2.0), 1.0).regime, Regime::Supercritical);
        assert_eq!(bogoliubov(1.5, c(-1.5), 1.0).regime, Regime::Critical);
        assert_eq!(bogoliubov(0.0, c(0.5), 1.0).regime, Regime::Resonant);
        let crit = bogoliubov(1.5, C64::new(0.0, 1.5), 0.7);
        assert!((crit.f - C64::new(1.0, -1.05)).norm() < 1e-12);
        assert!((crit.g - C64::new(0.0, 1.05)).norm() < 1e-12);
        let res = bogoliubov(0.0, c(0.5), 2.0);
        assert!((res.f - c(1f64.cosh())).norm() < 1e-12);
        assert!((res.g - c(1f64.sinh())).norm() < 1e-12);
    }

    #[test]
    fn resonant_photons_match_propagation() {
        let gamma = 0.5;
        let h = block(64, 0.0, c(gamma));
        let psi = StateVector::ground(h.space());
        let times: Vec<f64> = (0..=8).map(|k| k as f64 * 0.25).collect();
        let tr = evolve_static(&h, &psi, &times).unwrap();
        for (t, st) in times.iter().zip(&tr.states) {
            let m = quadrature_moments(st, 0).unwrap();
            let want = (gamma * t).sinh().powi(2);
            assert!((m.n - want).abs() < 1e-7);
            assert!((bogoliubov(0.0, c(gamma), *t).vacuum_photons() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn subcritical_photon_maximum() {
        let (xi, gamma): (f64, f64) = (2.0, 1.0);
        let w = (xi * xi - gamma * gamma).sqrt();
        let peak = bogoliubov(xi, c(gamma), std::f64::consts::FRAC_PI_2 / w).vacuum_photons();
        assert!((peak - 1.0 / 3.0).abs() < 1e-12);
        let h = block(40, xi, c(gamma));
        let psi = StateVector::ground(h.space());
        let times: Vec<f64> = (0..=400).map(|k| k as f64 * 0.01).collect();
        let tr = evolve_static(&h, &psi, &times).unwrap();
        let numeric = tr
            .states
            .iter()
            .map(|s| quadrature_moments(s, 0).unwrap().n)
            .fold(0.0, f64::max);
        assert!((numeric - 1.0 / 3.0).abs() < 1e-4);
        assert!(numeric <= 1.0 / 3.0 + 1e-9);
    }

    #[test]
    fn vacuum_variance_matches_moments() {
        let (xi, gamma) = (0.7, C64::new(0.3, -0.5));
        let h = block(48, xi, gamma);
        let psi = StateVector::ground(h.space());
        let tr = evolve_static(&h, &psi, &[1.3]).unwrap();
        let m = quadrature_moments(&tr.states[0], 0).unwrap();
        let b = bogoliubov(xi, gamma, 1.3);
        for th in [0.0, 0.4, 1.1, 2.5] {
            assert!((m.variance(th) - b.vacuum_variance(th)).abs() < 1e-10);
        }
        let (lo, hi) = b.vacuum_extrema();
        let ext = m.extrema();
        assert!((ext.var_min - lo).abs() < 1e-10 && (ext.var_max - hi).abs() < 1e-10);
    }

    #[test]
    fn classify_zero_detuning_ratio() {
        let p = SystemParams {
            eta: 0.1,
            ..SystemParams::default()
        };
        let eff = EffectiveParams::manual(5.0, 0.0, C64::new(0.0, 1.2));
        for m in 0..20 {
            let r = classify(m, &eff, &p, 0.0);
            let f = r.f.unwrap();
            assert!((f - C64::new(0.0, 2.0 * 1.2 / 5.0)).norm() < 1e-14);
            assert_eq!(r.classification, Regime::Subcritical);
        }
    }

    #[test]
    fn classify_resonance_only_at_target() {
        let p = SystemParams {
            eta: 0.1,
            ..SystemParams::default()
        };
        let eff = EffectiveParams::manual(20.0, 0.0, c(1.0));
        let delta = 0.01 * 20.0 * 7.0;
        for m in 0..30 {
            let r = classify(m, &eff, &p, delta);
            if m == 3 {
                assert_eq!(r.classification, Regime::Resonant);
                assert!(r.f.is_none());
            } else {
                assert_eq!(r.classification, Regime::Subcritical, "m={m}");
            }
        }
    }

    #[test]
    fn hermitian_function_used_for_exact_propagator() {
        // e^{-iHt} through the matrix-function path equals the propagator
        let h = block(16, 0.4, C64::new(0.1, 0.1));
        let u = hermitian_function(&h, MatrixFunction::ExpI(-0.9)).unwrap();
        let psi = StateVector::ground(h.space());
        let a = u.apply(psi.amplitudes());
        let b = StaticPropagator::new(&h)
            .unwrap()
            .evolve(&psi, 0.9)
            .unwrap();
        assert!((a - b.amplitudes()).norm() < 1e-12);
    }
}
