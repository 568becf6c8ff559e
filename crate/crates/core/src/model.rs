//! Physical parameters and Hamiltonian builders.
//!
//! Every builder works on the fixed factor layout: cavity boson first, then
//! the vibrational boson, then (when present) the atom with `g → 0, e → 1,
//! i → 2`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};
use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fockalg::operator::{lowering_local, number_local, Spectral};
use crate::fockalg::{Factor, OperatorMatrix, SpaceSignature, C64};

/// Hard upper limit on the Lamb-Dicke parameter `η`.
pub const ETA_MAX: f64 = 0.3;
/// Above this `η` a warning is emitted.
pub const ETA_WARN: f64 = 0.2;
/// Largest `η_L` for which `Σ ≈ 1` is accepted.
pub const ETA_L_MAX: f64 = 0.1;
/// Factor standing in for "much greater than" in every precondition.
pub const MUCH_GREATER: f64 = 10.0;
/// Relative tolerance of a tuned detuning.
pub const TUNING_TOL: f64 = 1e-6;
const PHASE_TOL: f64 = 1e-9;

/// Physical constants of the driven ion-cavity system. Rates in rad/s, phases
/// in rad, Lamb-Dicke parameters dimensionless.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams {
    /// Cavity frequency `ω`.
    pub omega: f64,
    /// Trap frequency `ν`.
    pub nu: f64,
    /// `δ = ω₀/2 - ω`.
    pub delta: f64,
    /// Detuning `Δ` of the intermediate level.
    #[serde(rename = "Delta")]
    pub big_delta: f64,
    pub lambda1: C64,
    pub lambda2: C64,
    /// Drive magnitude `|Ω|`.
    #[serde(rename = "Omega_abs")]
    pub omega_abs: f64,
    /// Drive phase `φ`, with `Ω = |Ω| e^{-iφ}`.
    pub phi_drive: f64,
    pub eta: f64,
    #[serde(rename = "eta_L")]
    pub eta_l: f64,
    /// Standing-wave phase, 0 at a node and `π/2` at an anti-node.
    pub varphi: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            omega: 0.0,
            nu: 0.0,
            delta: 0.0,
            big_delta: 0.0,
            lambda1: C64::new(0.0, 0.0),
            lambda2: C64::new(0.0, 0.0),
            omega_abs: 0.0,
            phi_drive: 0.0,
            eta: 0.0,
            eta_l: 0.0,
            varphi: 0.0,
        }
    }
}

impl SystemParams {
    /// Checks ranges. Returns warnings for values that are legal but suspect.
    pub fn validate(&self) -> Result<Vec<String>> {
        let reals = [
            ("omega", self.omega),
            ("nu", self.nu),
            ("delta", self.delta),
            ("Delta", self.big_delta),
            ("Omega_abs", self.omega_abs),
            ("phi_drive", self.phi_drive),
            ("eta", self.eta),
            ("eta_L", self.eta_l),
            ("varphi", self.varphi),
        ];
        for (name, v) in reals {
            if !v.is_finite() {
                return Err(Error::param(name, format!("must be finite, got {v}")));
            }
        }
        for (name, z) in [("lambda1", self.lambda1), ("lambda2", self.lambda2)] {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::param(name, "must be finite"));
            }
        }
        for (name, v) in [
            ("omega", self.omega),
            ("nu", self.nu),
            ("Omega_abs", self.omega_abs),
            ("eta", self.eta),
            ("eta_L", self.eta_l),
        ] {
            if v < 0.0 {
                return Err(Error::param(name, format!("must be >= 0, got {v}")));
            }
        }
        if self.eta > ETA_MAX {
            return Err(Error::param(
                "eta",
                format!(
                    "Lamb-Dicke limit requires eta <= {ETA_MAX}, got {}",
                    self.eta
                ),
            ));
        }
        let mut warnings = Vec::new();
        if self.eta > ETA_WARN {
            warnings.push(format!(
                "eta = {} exceeds {ETA_WARN}; the second-order Lamb-Dicke expansion is marginal",
                self.eta
            ));
        }
        Ok(warnings)
    }

    /// Atomic transition frequency `ω₀ = 2(ω + δ)`.
    pub fn omega0(&self) -> f64 {
        2.0 * (self.omega + self.delta)
    }

    /// Complex drive `Ω = |Ω| e^{-iφ}`.
    pub fn drive(&self) -> C64 {
        C64::from_polar(self.omega_abs, -self.phi_drive)
    }
}

/// Parameter table an [`EffectiveParams`] value was taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EffectiveRegime {
    Weak,
    Strong,
    /// Set directly by the caller rather than derived from [`SystemParams`].
    Manual,
}

impl fmt::Display for EffectiveRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EffectiveRegime::Weak => "weak",
            EffectiveRegime::Strong => "strong",
            EffectiveRegime::Manual => "manual",
        })
    }
}

/// Effective shifts and couplings after eliminating the `|±> ↔ |i>`
/// transitions. Subscripts `pp`, `mm`, `pm` are the `|+>`, `|->` branches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveParams {
    pub regime: EffectiveRegime,
    /// The regime was forced against the validity check.
    pub overridden: bool,
    pub omega_ii: f64,
    pub chi_ii: f64,
    pub xi_ii: C64,
    pub omega_pp: f64,
    pub chi_pp: f64,
    pub xi_pp: C64,
    pub omega_mm: f64,
    pub chi_mm: f64,
    pub xi_mm: C64,
    pub omega_pm: f64,
    pub chi_pm: f64,
    pub xi_pm: C64,
    /// Strong regime only: the tabulated `ξ_w/2` entry for `ξ₊₊`, kept next to
    /// the `ξ_s/2` used in `xi_pp`. `None` when `Δ = 0` or in other regimes.
    pub xi_pp_printed: Option<C64>,
}

impl EffectiveParams {
    /// `|i>`-branch values chosen by hand; branch entries are zero.
    pub fn manual(omega_ii: f64, chi_ii: f64, xi_ii: C64) -> Self {
        let zero = C64::new(0.0, 0.0);
        Self {
            regime: EffectiveRegime::Manual,
            overridden: false,
            omega_ii,
            chi_ii,
            xi_ii,
            omega_pp: 0.0,
            chi_pp: 0.0,
            xi_pp: zero,
            omega_mm: 0.0,
            chi_mm: 0.0,
            xi_mm: zero,
            omega_pm: 0.0,
            chi_pm: 0.0,
            xi_pm: zero,
            xi_pp_printed: None,
        }
    }

    /// `Φ = ν + 2η²χ_ii`.
    pub fn phi_shift(&self, p: &SystemParams) -> f64 {
        p.nu + 2.0 * p.eta * p.eta * self.chi_ii
    }

    /// `Ξ(m) = η²ω_ii(2m+1) - δ`.
    pub fn xi_of(&self, p: &SystemParams, m: usize, delta: f64) -> f64 {
        p.eta * p.eta * self.omega_ii * (2 * m + 1) as f64 - delta
    }

    /// `Γ(m) = 2η²ξ_ii(2m+1)`.
    pub fn gamma_of(&self, p: &SystemParams, m: usize) -> C64 {
        self.xi_ii * (2.0 * p.eta * p.eta * (2 * m + 1) as f64)
    }
}

/// Picture in which the full Hamiltonian is written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    Lab,
    Interaction,
}

/// Engineered Hamiltonians on `Boson(N_cav) ⊗ Boson(N_vib)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Engineered {
    /// `ξ_ii a†² + h.c.`
    H1,
    /// Two-photon, two-phonon creation.
    H2,
    /// Two-photon creation with two-phonon annihilation.
    H3,
    /// Time-dependent squeezing weighted by `2b†b+1`.
    H4,
    /// Cross-Kerr `η²ω_ii a†a(2b†b+1)`.
    H5,
    /// Node Hamiltonian in the frame rotating at `ω` and `Φ`.
    Sidebands,
    /// `H4` in the frame rotating at `δ`.
    Parametric,
}

impl Engineered {
    pub fn is_time_dependent(self) -> bool {
        matches!(self, Engineered::H4 | Engineered::Sidebands)
    }
}

/// Treatment of `sin²[η(b†+b)+varphi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SinSquared {
    /// Spectral evaluation of the operator function.
    Exact,
    /// Leading Lamb-Dicke term: `1` at the anti-node, `η²(b†+b)²` at the node.
    LambDicke,
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn sigma(r: usize, s: usize) -> DMatrix<C64> {
    let mut m = DMatrix::zeros(3, 3);
    m[(r, s)] = c(1.0);
    m
}

const G: usize = 0;
const E: usize = 1;
const I: usize = 2;

/// `(N_cav, N_vib)` of a `Boson ⊗ Boson ⊗ Atom` space.
fn full_dims(space: &SpaceSignature) -> Result<(usize, usize)> {
    match space.factors() {
        [Factor::Boson(nc), Factor::Boson(nv), Factor::Atom] => Ok((*nc, *nv)),
        _ => Err(Error::Signature(format!(
            "expected Boson ⊗ Boson ⊗ Atom(3), got {space}"
        ))),
    }
}

/// `(N_cav, N_vib)` of a `Boson ⊗ Boson` space.
fn boson_pair_dims(space: &SpaceSignature) -> Result<(usize, usize)> {
    match space.factors() {
        [Factor::Boson(nc), Factor::Boson(nv)] => Ok((*nc, *nv)),
        _ => Err(Error::Signature(format!(
            "expected Boson ⊗ Boson, got {space}"
        ))),
    }
}

/// Position quadrature `b + b†` on a single mode.
pub(crate) fn position_local(n: usize) -> DMatrix<C64> {
    let b = lowering_local(n);
    &b + b.adjoint()
}

/// `f(η(b†+b) + shift)` on one mode.
fn motional_function(
    n: usize,
    eta: f64,
    shift: f64,
    f: impl Fn(f64) -> C64,
) -> Result<DMatrix<C64>> {
    let x = position_local(n) * c(eta);
    let spec = Spectral::of_matrix(&x)?;
    Ok(spec.map(|v| f(v + shift)))
}

/// `sin[η(b†+b) + varphi]` on one mode.
pub fn standing_wave_local(p: &SystemParams, n: usize) -> Result<DMatrix<C64>> {
    motional_function(n, p.eta, p.varphi, |x| c(x.sin()))
}

/// `sin²[η(b†+b) + varphi]` on one mode, exact or in the Lamb-Dicke form.
pub fn sin_squared_local(p: &SystemParams, n: usize, mode: SinSquared) -> Result<DMatrix<C64>> {
    match mode {
        SinSquared::Exact => motional_function(n, p.eta, p.varphi, |x| c(x.sin().powi(2))),
        SinSquared::LambDicke => {
            if (p.varphi - FRAC_PI_2).abs() <= PHASE_TOL {
                Ok(DMatrix::identity(n, n))
            } else if p.varphi.abs() <= PHASE_TOL {
                let x = position_local(n);
                Ok(&x * &x * c(p.eta * p.eta))
            } else {
                Err(Error::Regime(format!(
                    "Lamb-Dicke form of sin² needs varphi = 0 or π/2, got {}",
                    p.varphi
                )))
            }
        }
    }
}

/// `R m R†` with `R = exp(-iνb†bt)`.
fn free_rotation(m: &DMatrix<C64>, nu: f64, t: f64) -> DMatrix<C64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |j, k| {
        m[(j, k)] * C64::from_polar(1.0, -nu * (j as f64 - k as f64) * t)
    })
}

/// `Λ(t) = e^{-iδt} R sin[η(b†+b)+varphi] R†`.
fn lambda_local(p: &SystemParams, nv: usize, t: f64) -> Result<DMatrix<C64>> {
    let s = standing_wave_local(p, nv)?;
    Ok(free_rotation(&s, p.nu, t) * C64::from_polar(1.0, -p.delta * t))
}

/// `Σ(t) = R exp[iη_L(b†+b)] R†`.
fn sigma_local(p: &SystemParams, nv: usize, t: f64) -> Result<DMatrix<C64>> {
    let e = motional_function(nv, p.eta_l, 0.0, |x| C64::from_polar(1.0, x))?;
    Ok(free_rotation(&e, p.nu, t))
}

fn kron3(
    space: &SpaceSignature,
    cav: &DMatrix<C64>,
    vib: &DMatrix<C64>,
    atom: &DMatrix<C64>,
) -> DMatrix<C64> {
    OperatorMatrix::from_factors(space, &[cav, vib, atom])
        .expect("local shapes follow the space")
        .into_data()
}

fn kron2(space: &SpaceSignature, cav: &DMatrix<C64>, vib: &DMatrix<C64>) -> DMatrix<C64> {
    OperatorMatrix::from_factors(space, &[cav, vib])
        .expect("local shapes follow the space")
        .into_data()
}

fn hermitian_part(x: DMatrix<C64>) -> DMatrix<C64> {
    let xd = x.adjoint();
    x + xd
}

/// Full Hamiltonian at time `t`, either `H₀ + V(t)` in the laboratory frame or
/// the rotating-wave interaction-frame form.
pub fn build_full_hamiltonian(
    p: &SystemParams,
    space: &SpaceSignature,
    t: f64,
    frame: Frame,
) -> Result<OperatorMatrix> {
    let (nc, nv) = full_dims(space)?;
    let a = lowering_local(nc);
    let ad = a.adjoint();
    let ic = DMatrix::identity(nc, nc);
    let iv = DMatrix::identity(nv, nv);
    let ia = DMatrix::identity(3, 3);
    let coupling = sigma(G, I) * p.lambda1 + sigma(I, E) * p.lambda2;
    let data = match frame {
        Frame::Lab => {
            let s = standing_wave_local(p, nv)?;
            let el = motional_function(nv, p.eta_l, 0.0, |x| C64::from_polar(1.0, x))?;
            let h0 = kron3(space, &number_local(nc), &iv, &ia) * c(p.omega)
                + kron3(space, &ic, &number_local(nv), &ia) * c(p.nu)
                + kron3(space, &ic, &iv, &(sigma(E, E) - sigma(G, G))) * c(p.omega + p.delta)
                + kron3(space, &ic, &iv, &sigma(I, I)) * c(p.big_delta);
            let drive = p.drive() * C64::from_polar(1.0, -2.0 * (p.omega + p.delta) * t);
            let x = kron3(space, &(&ad + &a), &s, &coupling)
                + kron3(space, &ic, &el, &(sigma(E, G) * drive));
            h0 + hermitian_part(x)
        }
        Frame::Interaction => {
            let lam = lambda_local(p, nv, t)?;
            let sig = sigma_local(p, nv, t)?;
            let x = kron3(space, &ad, &lam, &coupling)
                + kron3(space, &ic, &sig, &(sigma(E, G) * p.drive()));
            hermitian_part(x) + kron3(space, &ic, &iv, &sigma(I, I)) * c(p.big_delta)
        }
    };
    OperatorMatrix::new(space.clone(), data)
}

/// Dressed atomic states `|±> = (|e> ± e^{iφ}|g>)/√2` as vectors in `g, e, i`.
pub fn dressed_vectors(phi_drive: f64) -> (DVector<C64>, DVector<C64>) {
    let ph = C64::from_polar(FRAC_1_SQRT_2, phi_drive);
    let e = c(FRAC_1_SQRT_2);
    let zero = c(0.0);
    (
        DVector::from_vec(vec![ph, e, zero]),
        DVector::from_vec(vec![-ph, e, zero]),
    )
}

/// `|u><v|` on the atom.
fn outer3(u: &DVector<C64>, v: &DVector<C64>) -> DMatrix<C64> {
    u * v.adjoint()
}

fn check_eta_l(p: &SystemParams) -> Result<()> {
    if p.eta_l > ETA_L_MAX {
        return Err(Error::Regime(format!(
            "dressed form assumes Σ ≈ 1, which needs eta_L <= {ETA_L_MAX}; got {}",
            p.eta_l
        )));
    }
    Ok(())
}

/// Interaction-frame Hamiltonian in the dressed basis `{|i>, |+>, |->}` with
/// `Σ → 1`, written on the original `g, e, i` atomic factor.
pub fn build_dressed_hamiltonian(
    p: &SystemParams,
    space: &SpaceSignature,
    t: f64,
) -> Result<OperatorMatrix> {
    check_eta_l(p)?;
    let (_, nv) = full_dims(space)?;
    let lam = lambda_local(p, nv, t)?;
    OperatorMatrix::new(space.clone(), dressed_from_motion(p, space, &lam))
}

/// The dressed Hamiltonian in the frame `exp[-i(νb†b + δa†a)t]`, where it is
/// time independent: `Λ → sin[η(b†+b)+varphi]` and `-νb†b - δa†a` appear.
pub fn build_dressed_corotating(
    p: &SystemParams,
    space: &SpaceSignature,
) -> Result<OperatorMatrix> {
    check_eta_l(p)?;
    let (nc, nv) = full_dims(space)?;
    let s = standing_wave_local(p, nv)?;
    let ic = DMatrix::identity(nc, nc);
    let iv = DMatrix::identity(nv, nv);
    let ia = DMatrix::identity(3, 3);
    let h = dressed_from_motion(p, space, &s)
        - kron3(space, &ic, &number_local(nv), &ia) * c(p.nu)
        - kron3(space, &number_local(nc), &iv, &ia) * c(p.delta);
    OperatorMatrix::new(space.clone(), h)
}

fn dressed_from_motion(
    p: &SystemParams,
    space: &SpaceSignature,
    lam: &DMatrix<C64>,
) -> DMatrix<C64> {
    let (nc, nv) = full_dims(space).expect("checked by caller");
    let a = lowering_local(nc);
    let ad = a.adjoint();
    let ic = DMatrix::identity(nc, nc);
    let iv = DMatrix::identity(nv, nv);
    let (plus, minus) = dressed_vectors(p.phi_drive);
    let ket_i = DVector::from_vec(vec![c(0.0), c(0.0), c(1.0)]);
    let l1 = p.lambda1 * C64::from_polar(FRAC_1_SQRT_2, -p.phi_drive);
    let l2 = p.lambda2.conj() * c(FRAC_1_SQRT_2);
    let lam_d = lam.adjoint();
    let up = kron3(space, &ad, lam, &outer3(&plus, &ket_i)) * l1
        + kron3(space, &a, &lam_d, &outer3(&plus, &ket_i)) * l2;
    let down = kron3(space, &ad, lam, &outer3(&minus, &ket_i)) * l1
        - kron3(space, &a, &lam_d, &outer3(&minus, &ket_i)) * l2;
    let atomic = outer3(&ket_i, &ket_i) * c(p.big_delta)
        + (outer3(&plus, &plus) - outer3(&minus, &minus)) * c(p.omega_abs);
    hermitian_part(up - down) + kron3(space, &ic, &iv, &atomic)
}

/// Effective `|i>`-branch Hamiltonian in the same rotating frame as
/// [`build_dressed_corotating`], on `Boson(N_cav) ⊗ Boson(N_vib)`:
/// `-νb†b - δa†a + [ω_ii a†a + χ_ii + (ξ_ii a†² + h.c.)] sin²[η(b†+b)+varphi]`.
pub fn build_effective_corotating(
    p: &SystemParams,
    eff: &EffectiveParams,
    space: &SpaceSignature,
    mode: SinSquared,
) -> Result<OperatorMatrix> {
    let (nc, nv) = boson_pair_dims(space)?;
    let a = lowering_local(nc);
    let ad = a.adjoint();
    let ic = DMatrix::identity(nc, nc);
    let iv = DMatrix::identity(nv, nv);
    let s2 = sin_squared_local(p, nv, mode)?;
    let na = number_local(nc);
    let cav = &na * c(eff.omega_ii) + &ic * c(eff.chi_ii) + hermitian_part(&ad * &ad * eff.xi_ii);
    let h = kron2(space, &cav, &s2)
        - kron2(space, &ic, &number_local(nv)) * c(p.nu)
        - kron2(space, &na, &iv) * c(p.delta);
    OperatorMatrix::new(space.clone(), h)
}

fn tuned(value: f64, target: f64) -> bool {
    (value - target).abs() <= TUNING_TOL * target.abs().max(f64::MIN_POSITIVE)
}

/// Preconditions of [`build_engineered`] without building anything.
pub fn check_engineered(p: &SystemParams, eff: &EffectiveParams, which: Engineered) -> Result<()> {
    let fail = |msg: String| Err(Error::Regime(format!("{which:?}: {msg}")));
    if which == Engineered::H1 {
        if (p.varphi - FRAC_PI_2).abs() > PHASE_TOL {
            return fail(format!("requires varphi = π/2, got {}", p.varphi));
        }
        if p.eta * p.eta * MUCH_GREATER > 1.0 {
            return fail(format!("requires η² ≪ 1, got η = {}", p.eta));
        }
        if !tuned(p.delta, eff.omega_ii) {
            return fail(format!(
                "requires δ = ω_ii, got δ = {} and ω_ii = {}",
                p.delta, eff.omega_ii
            ));
        }
        return Ok(());
    }
    if p.varphi.abs() > PHASE_TOL {
        return fail(format!("requires varphi = 0, got {}", p.varphi));
    }
    if p.eta.powi(4) * MUCH_GREATER > 1.0 {
        return fail(format!("requires η⁴ ≪ 1, got η = {}", p.eta));
    }
    let phi = eff.phi_shift(p);
    let small_delta = |msg: &str| -> Result<()> {
        if p.delta.abs() * MUCH_GREATER > phi.abs() {
            Err(Error::Regime(format!(
                "{which:?}: requires |δ| ≪ Φ{msg}, got δ = {} and Φ = {phi}",
                p.delta
            )))
        } else {
            Ok(())
        }
    };
    match which {
        Engineered::H2 if !tuned(p.delta, phi) => {
            fail(format!("requires δ = Φ, got δ = {} and Φ = {phi}", p.delta))
        }
        Engineered::H3 if !tuned(p.delta, -phi) => fail(format!(
            "requires δ = -Φ, got δ = {} and Φ = {phi}",
            p.delta
        )),
        Engineered::H4 | Engineered::Parametric => small_delta(""),
        Engineered::H5 => {
            small_delta(" (δ ≈ 0)")?;
            if eff.xi_ii.norm() * MUCH_GREATER > eff.omega_ii.abs() {
                return fail(format!(
                    "requires |ξ_ii| ≪ ω_ii, got |ξ_ii| = {} and ω_ii = {}",
                    eff.xi_ii.norm(),
                    eff.omega_ii
                ));
            }
            Ok(())
        }
        _ => Ok(()),
    }
}

/// Engineered Hamiltonian `which` at time `t` (ignored by the static ones).
///
/// `H1` accepts `Boson(N_cav)` or `Boson(N_cav) ⊗ Boson(N_vib)`; the others
/// need both modes. Preconditions are checked with [`MUCH_GREATER`] for "≪"
/// and [`TUNING_TOL`] for tuned detunings.
pub fn build_engineered(
    p: &SystemParams,
    eff: &EffectiveParams,
    which: Engineered,
    space: &SpaceSignature,
    t: f64,
) -> Result<OperatorMatrix> {
    check_engineered(p, eff, which)?;
    if which == Engineered::H1 {
        let (nc, nv) = match space.factors() {
            [Factor::Boson(nc)] => (*nc, None),
            [Factor::Boson(nc), Factor::Boson(nv)] => (*nc, Some(*nv)),
            _ => {
                return Err(Error::Signature(format!(
                    "H1 expects Boson or Boson ⊗ Boson, got {space}"
                )))
            }
        };
        let ad = lowering_local(nc).adjoint();
        let h = hermitian_part(&ad * &ad * eff.xi_ii);
        let data = match nv {
            None => h,
            Some(nv) => kron2(space, &h, &DMatrix::identity(nv, nv)),
        };
        return OperatorMatrix::new(space.clone(), data);
    }
    let (nc, nv) = boson_pair_dims(space)?;
    let eta2 = p.eta * p.eta;
    let a = lowering_local(nc);
    let ad = a.adjoint();
    let ad2 = &ad * &ad;
    let na = number_local(nc);
    let ic = DMatrix::identity(nc, nc);
    let b = lowering_local(nv);
    let bd = b.adjoint();
    let b2 = &b * &b;
    let bd2 = &bd * &bd;
    let nb = number_local(nv);
    let iv = DMatrix::identity(nv, nv);
    let weight = &nb * c(2.0) + &iv;
    let xi = eff.xi_ii;
    let kerr = kron2(space, &na, &weight) * c(eta2 * eff.omega_ii);
    let squeeze_weighted = |phase: C64| {
        kron2(
            space,
            &(&na * c(eff.omega_ii) + hermitian_part(&ad2 * (xi * phase))),
            &weight,
        ) * c(eta2)
    };
    let data = match which {
        Engineered::H1 => unreachable!(),
        Engineered::H2 => kerr + hermitian_part(kron2(space, &ad2, &bd2) * (xi * eta2)),
        Engineered::H3 => kerr + hermitian_part(kron2(space, &ad2, &b2) * (xi * eta2)),
        Engineered::H4 => squeeze_weighted(C64::from_polar(1.0, -2.0 * p.delta * t)),
        Engineered::H5 => kerr,
        Engineered::Sidebands => {
            let phi = eff.phi_shift(p);
            let rot = |f: f64| C64::from_polar(1.0, f * t);
            squeeze_weighted(rot(-2.0 * p.delta))
                + kron2(
                    space,
                    &(&na * c(eff.omega_ii) + &ic * c(eff.chi_ii)),
                    &hermitian_part(&bd2 * rot(2.0 * phi)),
                ) * c(eta2)
                + hermitian_part(
                    kron2(space, &ad2, &bd2) * (xi * eta2 * rot(-2.0 * (p.delta - phi))),
                )
                + hermitian_part(
                    kron2(space, &ad2, &b2) * (xi * eta2 * rot(-2.0 * (p.delta + phi))),
                )
        }
        Engineered::Parametric => squeeze_weighted(c(1.0)) - kron2(space, &na, &iv) * c(p.delta),
    };
    OperatorMatrix::new(space.clone(), data)
}

/// `H_SC = 2η²|β|²(ξ_ii a†² + h.c.)` on `Boson(N_cav)`; needs the detuning
/// `δ = 2η²|β|²ω_ii`.
pub fn semiclassical_hamiltonian(
    p: &SystemParams,
    eff: &EffectiveParams,
    beta: C64,
    space: &SpaceSignature,
) -> Result<OperatorMatrix> {
    let nc = match space.factors() {
        [Factor::Boson(nc)] => *nc,
        _ => {
            return Err(Error::Signature(format!(
                "semiclassical Hamiltonian acts on Boson(N_cav) only, got {space}"
            )))
        }
    };
    let k = 2.0 * p.eta * p.eta * beta.norm_sqr();
    let target = k * eff.omega_ii;
    let tol = TUNING_TOL * target.abs().max(f64::MIN_POSITIVE);
    if (p.delta - target).abs() > tol && !(target == 0.0 && p.delta == 0.0) {
        return Err(Error::Regime(format!(
            "semiclassical form requires δ = 2η²|β|²ω_ii = {target}, got {}",
            p.delta
        )));
    }
    let ad = lowering_local(nc).adjoint();
    OperatorMatrix::new(space.clone(), hermitian_part(&ad * &ad * (eff.xi_ii * k)))
}
