//! Statistics families entering the steady-state problem through the
//! nonlinearity `R_η`, its defect `S_η = z − R_η`, the entropy density `H_η`
//! (with `H'_η·R_η = 1`) and the pressure closure.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{domain, Error, Result};
use crate::fermi::{fermi_excess, fermi_f_inverse, model_orders, zeta_map};
use crate::numerics::{golden_section_max, integrate_finite, logspace, NumericsConfig};

/// Below this value of `2z/μ` the full Fermi–Dirac nonlinearity is replaced by
/// its classical limit `R = z`.
const FULL_FD_CLASSICAL_W: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StatisticsKind {
    #[serde(rename = "mb")]
    MaxwellBoltzmann,
    #[serde(rename = "sfd")]
    SimplifiedFermiDirac,
    #[serde(rename = "ffd")]
    FermiDirac,
}

impl StatisticsKind {
    pub fn tag(self) -> &'static str {
        match self {
            Self::MaxwellBoltzmann => "mb",
            Self::SimplifiedFermiDirac => "sfd",
            Self::FermiDirac => "ffd",
        }
    }
}

impl fmt::Display for StatisticsKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for StatisticsKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mb" => Ok(Self::MaxwellBoltzmann),
            "sfd" => Ok(Self::SimplifiedFermiDirac),
            "ffd" => Ok(Self::FermiDirac),
            other => Err(Error::Config(format!(
                "unknown statistics kind '{other}' (expected mb, sfd or ffd)"
            ))),
        }
    }
}

/// Serialized model selection, `{"kind": "ffd", "d": 3, "eta": 0.001}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSelection {
    pub kind: StatisticsKind,
    pub d: u32,
    #[serde(default)]
    pub eta: f64,
}

/// A validated statistics model. Immutable once built.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "ModelSelection", try_from = "ModelSelection")]
pub struct ModelSpec {
    kind: StatisticsKind,
    d: u32,
    eta: f64,
    mu: Option<f64>,
}

impl From<ModelSpec> for ModelSelection {
    fn from(m: ModelSpec) -> Self {
        Self {
            kind: m.kind,
            d: m.d,
            eta: m.eta,
        }
    }
}

impl TryFrom<ModelSelection> for ModelSpec {
    type Error = Error;

    fn try_from(sel: ModelSelection) -> Result<Self> {
        ModelSpec::new(sel.kind, sel.d, sel.eta)
    }
}

impl ModelSpec {
    pub fn new(kind: StatisticsKind, d: u32, eta: f64) -> Result<Self> {
        if !(3..=9).contains(&d) {
            return Err(Error::Config(format!(
                "dimension d = {d} is outside the supported range 3..9"
            )));
        }
        if !(eta >= 0.0) || !eta.is_finite() {
            return Err(Error::Config(format!(
                "eta must be finite and >= 0, got {eta}"
            )));
        }
        let mu = match kind {
            StatisticsKind::MaxwellBoltzmann => {
                if eta != 0.0 {
                    return Err(Error::Config(
                        "the Maxwell-Boltzmann model requires eta = 0".into(),
                    ));
                }
                None
            }
            StatisticsKind::SimplifiedFermiDirac => None,
            StatisticsKind::FermiDirac => {
                if eta == 0.0 {
                    return Err(Error::Config(
                        "the Fermi-Dirac model requires eta > 0".into(),
                    ));
                }
                Some(mu_from_eta(d, eta)?)
            }
        };
        Ok(Self { kind, d, eta, mu })
    }

    pub fn maxwell_boltzmann(d: u32) -> Result<Self> {
        Self::new(StatisticsKind::MaxwellBoltzmann, d, 0.0)
    }

    pub fn simplified_fd(d: u32, eta: f64) -> Result<Self> {
        Self::new(StatisticsKind::SimplifiedFermiDirac, d, eta)
    }

    pub fn full_fd(d: u32, eta: f64) -> Result<Self> {
        Self::new(StatisticsKind::FermiDirac, d, eta)
    }

    pub fn kind(&self) -> StatisticsKind {
        self.kind
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn dim(&self) -> f64 {
        f64::from(self.d)
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Degeneracy scale `μ`; present only for the full Fermi–Dirac model.
    pub fn mu(&self) -> Option<f64> {
        self.mu
    }

    /// Same kind and dimension with a different `η`.
    pub fn with_eta(&self, eta: f64) -> Result<Self> {
        Self::new(self.kind, self.d, eta)
    }

    /// True when `R_η` is the identity, i.e. the dynamics are autonomous.
    pub fn is_identity(&self) -> bool {
        self.kind == StatisticsKind::MaxwellBoltzmann
            || (self.kind == StatisticsKind::SimplifiedFermiDirac && self.eta == 0.0)
    }

    pub fn selection(&self) -> ModelSelection {
        (*self).into()
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(d={}, eta={})", self.kind, self.d, self.eta)
    }
}

/// `μ = (2·d^{2/d−1}/η)^{d/2}`, from `η·μ^{2/d} = 2·d^{2/d−1}`.
pub fn mu_from_eta(d: u32, eta: f64) -> Result<f64> {
    if !(eta > 0.0) {
        return domain(format!("mu is defined for eta > 0, got {eta}"));
    }
    let df = f64::from(d);
    Ok((2.0 * df.powf(2.0 / df - 1.0) / eta).powf(df / 2.0))
}

/// Surface measure of the unit sphere in `d` dimensions, `2π^{d/2}/Γ(d/2)`.
pub fn sphere_measure(d: u32) -> f64 {
    let half = f64::from(d) / 2.0;
    2.0 * std::f64::consts::PI.powf(half) / gamma(half)
}

fn check_nonnegative(z: f64) -> Result<()> {
    if z >= 0.0 && z.is_finite() {
        Ok(())
    } else {
        domain(format!("density argument must be finite and >= 0, got {z}"))
    }
}

/// `R_η(z)`.
pub fn r_value(model: &ModelSpec, z: f64, cfg: &NumericsConfig) -> Result<f64> {
    check_nonnegative(z)?;
    match model.kind {
        StatisticsKind::MaxwellBoltzmann => Ok(z),
        StatisticsKind::SimplifiedFermiDirac => {
            if z == 0.0 {
                return Ok(0.0);
            }
            Ok(z / (1.0 + model.eta * z.powf(1.0 - 1.0 / model.dim())))
        }
        StatisticsKind::FermiDirac => {
            let mu = model.mu.expect("full Fermi-Dirac model carries mu");
            let w = 2.0 * z / mu;
            if w < FULL_FD_CLASSICAL_W {
                return Ok(z);
            }
            let alpha = model.dim() / 2.0 - 1.0;
            Ok(0.5 * mu * alpha * zeta_map(model.d, w, cfg)?)
        }
    }
}

/// `S_η(z) = z − R_η(z) ≥ 0`.
///
/// Closed form for the simplified model; for the full model the excess
/// `w − (d−2)/2·ζ(w)` is integrated directly, so no cancellation occurs.
pub fn s_value(model: &ModelSpec, z: f64, cfg: &NumericsConfig) -> Result<f64> {
    check_nonnegative(z)?;
    match model.kind {
        StatisticsKind::MaxwellBoltzmann => Ok(0.0),
        StatisticsKind::SimplifiedFermiDirac => {
            if z == 0.0 {
                return Ok(0.0);
            }
            let q = model.eta * z.powf(1.0 - 1.0 / model.dim());
            Ok(z * q / (1.0 + q))
        }
        StatisticsKind::FermiDirac => {
            if z == 0.0 {
                return Ok(0.0);
            }
            let mu = model.mu.expect("full Fermi-Dirac model carries mu");
            let (inner, _) = model_orders(model.d)?;
            let t = fermi_f_inverse(inner, 2.0 * z / mu, cfg)?;
            Ok(0.5 * mu * fermi_excess(inner, t, cfg)?)
        }
    }
}

/// `H_η(z)`, an antiderivative of `1/R_η` normalised so that `H_η − log z → 0`
/// as `z → 0`.
///
/// For the simplified model this is `log z + d/(d−1)·η·z^{1−1/d}`, the
/// antiderivative that actually satisfies `H'·R = 1`.
pub fn h_value(model: &ModelSpec, z: f64, cfg: &NumericsConfig) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return domain(format!("H needs z > 0, got {z}"));
    }
    let df = model.dim();
    match model.kind {
        StatisticsKind::MaxwellBoltzmann => Ok(z.ln()),
        StatisticsKind::SimplifiedFermiDirac => {
            Ok(z.ln() + df / (df - 1.0) * model.eta * z.powf(1.0 - 1.0 / df))
        }
        StatisticsKind::FermiDirac => {
            // 1/R − 1/t = S / (t·R), bounded as t → 0.
            let failure = std::cell::Cell::new(None);
            let integrand = |t: f64| {
                let s = s_value(model, t, cfg);
                let r = r_value(model, t, cfg);
                match (s, r) {
                    (Ok(s), Ok(r)) => s / (t * r),
                    (Err(e), _) | (_, Err(e)) => {
                        failure.set(Some(e));
                        f64::NAN
                    }
                }
            };
            let result = integrate_finite(integrand, 0.0, z, cfg.quad_rel_tol, 0.0);
            if let Some(e) = failure.take() {
                return Err(e);
            }
            Ok(z.ln() + result?.0)
        }
    }
}

/// Majorant `S_η(z) ≤ C(η)·D(z)` with `D(z) = z^{1+2/d}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Majorant {
    pub c_eta: f64,
    /// Exponent `1 + 2/d` of `D(z) = z^{1+2/d}`.
    pub d_exponent: f64,
    /// Location of the supremum in `z`.
    pub argmax: f64,
}

impl Majorant {
    pub fn d_of(&self, z: f64) -> f64 {
        z.powf(self.d_exponent)
    }

    pub fn bound(&self, z: f64) -> f64 {
        self.c_eta * self.d_of(z)
    }
}

const MAJORANT_Z_MIN: f64 = 1e-8;
const MAJORANT_Z_MAX: f64 = 1e10;
const MAJORANT_POINTS_PER_DECADE: usize = 400;

/// `z^{−1−2/d}·S_η(z)`.
pub fn majorant_ratio(model: &ModelSpec, z: f64, cfg: &NumericsConfig) -> Result<f64> {
    Ok(s_value(model, z, cfg)? / z.powf(1.0 + 2.0 / model.dim()))
}

/// `C(η) = sup_z z^{−1−2/d}·S_η(z)` over log-spaced `z ∈ [1e-8, 1e10]`, refined
/// by golden section around the best grid cell.
pub fn c_eta_majorant(model: &ModelSpec, cfg: &NumericsConfig) -> Result<Majorant> {
    let d_exponent = 1.0 + 2.0 / model.dim();
    if model.kind == StatisticsKind::MaxwellBoltzmann {
        return Ok(Majorant {
            c_eta: 0.0,
            d_exponent,
            argmax: MAJORANT_Z_MIN,
        });
    }
    let decades = (MAJORANT_Z_MAX / MAJORANT_Z_MIN).log10();
    let n = (decades * MAJORANT_POINTS_PER_DECADE as f64).round() as usize + 1;
    let grid = logspace(MAJORANT_Z_MIN, MAJORANT_Z_MAX, n);
    let values = grid
        .par_iter()
        .map(|&z| majorant_ratio(model, z, cfg))
        .collect::<Result<Vec<_>>>()?;
    let (best, best_value) =
        values
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, v)| if v > acc.1 { (i, v) } else { acc },
            );

    let lo = grid[best.saturating_sub(1)].ln();
    let hi = grid[(best + 1).min(n - 1)].ln();
    let (log_arg, refined) = golden_section_max(
        |lz| majorant_ratio(model, lz.exp(), cfg).unwrap_or(f64::NEG_INFINITY),
        lo,
        hi,
        1e-10,
    );
    let (argmax, c_eta) = if refined > best_value {
        (log_arg.exp(), refined)
    } else {
        (grid[best], best_value)
    };
    Ok(Majorant {
        c_eta,
        d_exponent,
        argmax,
    })
}

/// `P(z) = ∫₀^z t·H'(t) dt = ∫₀^z t/R(t) dt`.
pub fn pressure_potential(model: &ModelSpec, z: f64, cfg: &NumericsConfig) -> Result<f64> {
    check_nonnegative(z)?;
    let failure = std::cell::Cell::new(None);
    let integrand = |t: f64| {
        if t == 0.0 {
            return 1.0;
        }
        match r_value(model, t, cfg) {
            Ok(r) => t / r,
            Err(e) => {
                failure.set(Some(e));
                f64::NAN
            }
        }
    };
    let result = integrate_finite(integrand, 0.0, z, cfg.quad_rel_tol, 0.0);
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(result?.0)
}

/// `p(θ, ρ) = θ^{d/2+1}·P(ρ·θ^{−d/2})`.
pub fn pressure(model: &ModelSpec, theta: f64, rho: f64, cfg: &NumericsConfig) -> Result<f64> {
    if !(theta > 0.0) || !(rho > 0.0) {
        return domain(format!(
            "pressure needs theta > 0 and rho > 0, got theta = {theta}, rho = {rho}"
        ));
    }
    let half = model.dim() / 2.0;
    let z = rho * theta.powf(-half);
    Ok(theta.powf(half + 1.0) * pressure_potential(model, z, cfg)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermi::bound_constant_c;
    use std::f64::consts::{E, PI};

    fn cfg() -> NumericsConfig {
        NumericsConfig::default()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn model_validation() {
        assert!(ModelSpec::maxwell_boltzmann(2).is_err());
        assert!(ModelSpec::maxwell_boltzmann(10).is_err());
        assert!(ModelSpec::new(StatisticsKind::MaxwellBoltzmann, 3, 0.1).is_err());
        assert!(ModelSpec::full_fd(3, 0.0).is_err());
        assert!(ModelSpec::simplified_fd(3, -1.0).is_err());
        let m = ModelSpec::full_fd(5, 1e-3).unwrap();
        let mu = m.mu().unwrap();
        let lhs = m.eta() * mu.powf(2.0 / 5.0);
        assert!(rel(lhs, 2.0 * 5f64.powf(2.0 / 5.0 - 1.0)) < 1e-12);
    }

    #[test]
    fn model_json_roundtrip() {
        let m = ModelSpec::full_fd(3, 0.001).unwrap();
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(json, r#"{"kind":"ffd","d":3,"eta":0.001}"#);
        let back: ModelSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
        let bad = serde_json::from_str::<ModelSpec>(r#"{"kind":"mb","d":12,"eta":0}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn mu_examples() {
        for d in 3..=9 {
            let df = f64::from(d);
            let eta = 2.0 * df.powf(2.0 / df - 1.0);
            assert!(rel(mu_from_eta(d, eta).unwrap(), 1.0) < 1e-14);
            let mu = mu_from_eta(d, 1e-3).unwrap();
            let halved = mu_from_eta(d, 5e-4).unwrap();
            assert!(rel(halved / mu, 2f64.powf(df / 2.0)) < 1e-12);
        }
        let eta = 2.0 * 3f64.powf(-1.0 / 3.0) / 4.0;
        assert!(rel(mu_from_eta(3, eta).unwrap(), 8.0) < 1e-14);
        assert!(mu_from_eta(3, 0.0).is_err());
        assert!(mu_from_eta(3, 1e-8).unwrap() > mu_from_eta(3, 1e-4).unwrap());
    }

    #[test]
    fn sphere_measures() {
        assert!(rel(sphere_measure(3), 4.0 * PI) < 1e-14);
        assert!(rel(sphere_measure(4), 2.0 * PI * PI) < 1e-14);
    }

    #[test]
    fn r_and_s_examples() {
        let c = cfg();
        let mb = ModelSpec::maxwell_boltzmann(3).unwrap();
        assert_eq!(r_value(&mb, 5.0, &c).unwrap(), 5.0);
        assert_eq!(s_value(&mb, 5.0, &c).unwrap(), 0.0);

        let sfd = ModelSpec::simplified_fd(3, 1.0).unwrap();
        assert!((r_value(&sfd, 1.0, &c).unwrap() - 0.5).abs() < 1e-15);
        assert!((s_value(&sfd, 1.0, &c).unwrap() - 0.5).abs() < 1e-15);
        for eta in [1e-2, 1e-4, 1e-6] {
            let m = ModelSpec::simplified_fd(3, eta).unwrap();
            assert!(s_value(&m, 1.0, &c).unwrap() <= eta);
        }

        let ffd = ModelSpec::full_fd(3, 1e-4).unwrap();
        assert!((r_value(&ffd, 1.0, &c).unwrap() - 1.0).abs() < 1e-2);

        for m in [mb, sfd, ffd] {
            assert_eq!(r_value(&m, 0.0, &c).unwrap(), 0.0);
            assert_eq!(s_value(&m, 0.0, &c).unwrap(), 0.0);
            assert!(r_value(&m, -1.0, &c).is_err());
        }
    }

    #[test]
    fn full_fd_r_plus_s_is_identity() {
        let c = cfg();
        for d in [3, 4, 7] {
            let m = ModelSpec::full_fd(d, 1e-2).unwrap();
            for z in logspace(1e-3, 1e6, 19) {
                let r = r_value(&m, z, &c).unwrap();
                let s = s_value(&m, z, &c).unwrap();
                assert!(r >= 0.0 && r <= z && s >= 0.0);
                assert!(((r + s) - z).abs() <= 1e-8 * z, "d {d} z {z}");
            }
        }
    }

    #[test]
    fn full_fd_classical_switch_is_continuous() {
        let c = cfg();
        let m = ModelSpec::full_fd(3, 1e-2).unwrap();
        let mu = m.mu().unwrap();
        let z_edge = 0.5 * mu * FULL_FD_CLASSICAL_W;
        let below = r_value(&m, z_edge * (1.0 - 1e-9), &c).unwrap();
        let above = r_value(&m, z_edge * (1.0 + 1e-9), &c).unwrap();
        assert!(rel(below, z_edge) < 1e-8 && rel(above, z_edge) < 1e-8);
    }

    #[test]
    fn h_examples() {
        let c = cfg();
        let mb = ModelSpec::maxwell_boltzmann(3).unwrap();
        assert!((h_value(&mb, E, &c).unwrap() - 1.0).abs() < 1e-15);
        let sfd0 = ModelSpec::simplified_fd(3, 0.0).unwrap();
        assert!((h_value(&sfd0, E, &c).unwrap() - 1.0).abs() < 1e-15);
        let sfd = ModelSpec::simplified_fd(3, 1.0).unwrap();
        assert!((h_value(&sfd, 1.0, &c).unwrap() - 1.5).abs() < 1e-15);
        assert!(h_value(&mb, 0.0, &c).is_err());
    }

    fn five_point_derivative<F: Fn(f64) -> f64>(f: F, z: f64, h: f64) -> f64 {
        (-f(z + 2.0 * h) + 8.0 * f(z + h) - 8.0 * f(z - h) + f(z - 2.0 * h)) / (12.0 * h)
    }

    #[test]
    fn h_prime_times_r_is_one() {
        let c = cfg();
        let models = [
            ModelSpec::maxwell_boltzmann(3).unwrap(),
            ModelSpec::simplified_fd(3, 0.1).unwrap(),
            ModelSpec::simplified_fd(6, 1e-2).unwrap(),
            ModelSpec::full_fd(3, 1e-2).unwrap(),
            ModelSpec::full_fd(5, 1e-1).unwrap(),
        ];
        for m in models {
            for z in logspace(1e-2, 1e4, 7) {
                let h = 1e-2 * z;
                let dh = five_point_derivative(|t| h_value(&m, t, &c).unwrap(), z, h);
                let r = r_value(&m, z, &c).unwrap();
                assert!((dh * r - 1.0).abs() < 1e-6, "{m} z {z}: {}", dh * r);
            }
        }
    }

    #[test]
    fn h_is_increasing() {
        let c = cfg();
        let m = ModelSpec::full_fd(4, 1e-2).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for z in logspace(1e-3, 1e5, 17) {
            let h = h_value(&m, z, &c).unwrap();
            assert!(h > prev);
            prev = h;
        }
    }

    #[test]
    fn majorant_examples() {
        let c = cfg();
        let mb = ModelSpec::maxwell_boltzmann(3).unwrap();
        assert_eq!(c_eta_majorant(&mb, &c).unwrap().c_eta, 0.0);
        for eta in [1e-1, 1e-2, 1e-3] {
            let m = ModelSpec::simplified_fd(3, eta).unwrap();
            let maj = c_eta_majorant(&m, &c).unwrap();
            assert!(rel(maj.c_eta, eta) < 0.2, "eta {eta}: {}", maj.c_eta);
        }
        let ffd = ModelSpec::full_fd(3, 1e-2).unwrap();
        let maj = c_eta_majorant(&ffd, &c).unwrap();
        let limit =
            (2.0 / ffd.mu().unwrap()).powf(2.0 / 3.0) * bound_constant_c(3, &c).unwrap().value;
        assert!(maj.c_eta <= limit * 1.01);
        assert!(maj.c_eta > 0.9 * limit);
    }

    #[test]
    fn majorant_dominates_on_scan_grid() {
        let c = cfg();
        for m in [
            ModelSpec::simplified_fd(3, 1e-2).unwrap(),
            ModelSpec::simplified_fd(7, 1e-3).unwrap(),
            ModelSpec::full_fd(4, 1e-2).unwrap(),
        ] {
            let maj = c_eta_majorant(&m, &c).unwrap();
            for z in logspace(1e-8, 1e10, 181) {
                let s = s_value(&m, z, &c).unwrap();
                assert!(s >= 0.0);
                assert!(s <= maj.bound(z) * (1.0 + 1e-12), "{m} z {z}");
            }
        }
    }

    #[test]
    fn majorant_decreases_with_eta() {
        let c = cfg();
        for d in [3, 5, 9] {
            let mut prev = f64::INFINITY;
            for eta in [1e-1, 1e-2, 1e-3, 1e-4] {
                let m = ModelSpec::simplified_fd(d, eta).unwrap();
                let ce = c_eta_majorant(&m, &c).unwrap().c_eta;
                assert!(ce < prev, "d {d} eta {eta}");
                prev = ce;
            }
        }
    }

    #[test]
    fn simplified_bound_holds_for_eta_up_to_one() {
        let c = cfg();
        for d in 3..=9 {
            for eta in [1.0, 0.5, 1e-1, 1e-3] {
                let m = ModelSpec::simplified_fd(d, eta).unwrap();
                let ce = c_eta_majorant(&m, &c).unwrap().c_eta;
                assert!(ce <= 1.0 + 1e-9, "d {d} eta {eta}: {ce}");
            }
        }
    }

    #[test]
    fn full_fd_approaches_identity() {
        let c = cfg();
        let m = ModelSpec::full_fd(3, 1e-5).unwrap();
        let maj = c_eta_majorant(&m, &c).unwrap();
        for z in logspace(1e-3, 1e3, 13) {
            let gap = z - r_value(&m, z, &c).unwrap();
            assert!(
                gap >= -1e-9 * z && gap <= maj.bound(z) * (1.0 + 1e-6),
                "z {z}"
            );
        }
    }

    #[test]
    fn pressure_examples() {
        let c = cfg();
        let mb = ModelSpec::maxwell_boltzmann(3).unwrap();
        assert!(rel(pressure(&mb, 2.0, 5.0, &c).unwrap(), 10.0) < 1e-12);
        assert!(pressure(&mb, 0.0, 5.0, &c).is_err());
        assert!(pressure(&mb, 1.0, -5.0, &c).is_err());

        for m in [
            ModelSpec::simplified_fd(3, 0.3).unwrap(),
            ModelSpec::full_fd(3, 1e-1).unwrap(),
        ] {
            for (theta, rho) in [(1.0, 1.0), (0.5, 10.0), (3.0, 100.0)] {
                let p = pressure(&m, theta, rho, &c).unwrap();
                assert!(p >= rho * theta * (1.0 - 1e-12), "{m}");
            }
        }

        // Simplified model: P(z) = z + η z^{2−1/d}/(2−1/d).
        let m = ModelSpec::simplified_fd(3, 0.3).unwrap();
        let z: f64 = 7.0;
        let closed = z + 0.3 * z.powf(2.0 - 1.0 / 3.0) / (2.0 - 1.0 / 3.0);
        assert!(rel(pressure_potential(&m, z, &c).unwrap(), closed) < 1e-10);
    }

    #[test]
    fn pressure_approaches_ideal_gas() {
        let c = cfg();
        let (theta, rho) = (1.5, 4.0);
        let ideal = rho * theta;
        let mut prev = f64::INFINITY;
        for eta in [1e-1, 1e-2, 1e-3, 1e-4] {
            let m = ModelSpec::simplified_fd(3, eta).unwrap();
            let gap = pressure(&m, theta, rho, &c).unwrap() - ideal;
            // t/R − 1 = η t^{1−1/d}, integrated against θ^{d/2+1}.
            let z: f64 = rho * theta.powf(-1.5);
            let bound = theta.powf(2.5) * eta * z.powf(2.0 - 1.0 / 3.0);
            assert!(gap >= 0.0 && gap <= bound, "eta {eta}");
            assert!(gap < prev);
            prev = gap;
        }
    }
}
