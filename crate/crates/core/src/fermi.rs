//! Complete Fermi–Dirac integrals `f_α(z) = ∫₀^∞ x^α / (1 + e^{x−z}) dx`,
//! their inverses, the composition `ζ = f_{d/2−2} ∘ f_{d/2−1}^{-1}` and the
//! supremum constant `C(d)` that bounds `w^{−1−2/d}(w − (d−2)/2·ζ(w))`.

use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::error::{domain, Error, Result};
use crate::numerics::{
    find_root_monotone, golden_section_max, integrate_finite, integrate_semi_infinite, logspace,
    NumericsConfig,
};

/// Below this argument the classical branch is exact to better than 1e-13.
const CLASSICAL_CUTOFF: f64 = -30.0;

/// Order `α > −1` of a Fermi integral.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct FermiOrder(f64);

impl FermiOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > -1.0 && alpha.is_finite() {
            Ok(Self(alpha))
        } else {
            domain(format!("Fermi order must exceed -1, got {alpha}"))
        }
    }

    pub fn alpha(self) -> f64 {
        self.0
    }

    /// `Γ(α + 1)`, the classical-branch prefactor.
    pub fn gamma_prefactor(self) -> f64 {
        gamma(self.0 + 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AsymptoticBranch {
    /// `z^{α+1}/(α+1)`, the `z → +∞` regime.
    Degenerate,
    /// `Γ(α+1)·e^z`, the `z → −∞` regime.
    Classical,
}

/// Logistic occupation `1/(1 + e^u)` without overflow.
fn occupation(u: f64) -> f64 {
    if u > 0.0 {
        let e = (-u).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + u.exp())
    }
}

/// Integrates `g(t)` over `[0, ∞)` where `g` has a Fermi edge at `t = √z`.
///
/// The region well below the edge is integrated on its own so that the
/// adaptive rule always samples the edge window `[√(z−m), √(z+m)]`.
fn integrate_across_edge<G: Fn(f64) -> f64>(g: G, z: f64, cfg: &NumericsConfig) -> Result<f64> {
    let margin = cfg.quad_split_margin;
    let below = (z - margin).max(0.0).sqrt();
    let split = (z.max(0.0) + margin).sqrt();
    let (bulk, _) = integrate_finite(&g, 0.0, below, cfg.quad_rel_tol, 0.0)?;
    let (edge, _) = integrate_semi_infinite(|u| g(below + u), split - below, cfg)?;
    Ok(bulk + edge)
}

/// `f_α(z)`.
///
/// Evaluated by quadrature after the substitution `x = t²`, which removes the
/// `x^α` endpoint singularity for half-integer orders. For `z < −30` the
/// classical branch is returned directly.
pub fn fermi_f(order: FermiOrder, z: f64, cfg: &NumericsConfig) -> Result<f64> {
    if z.is_nan() {
        return domain("Fermi integral argument is NaN");
    }
    if z < CLASSICAL_CUTOFF {
        return Ok(fermi_asymptotic(order, z, AsymptoticBranch::Classical));
    }
    let power = 2.0 * order.alpha() + 1.0;
    let integrand = |t: f64| 2.0 * t.powf(power) * occupation(t * t - z);
    integrate_across_edge(integrand, z, cfg)
}

/// `∫₀^∞ x^α n(x − z)² dx` with `n(u) = 1/(1 + e^u)`.
///
/// Equals `f_α(z) − α·f_{α−1}(z)` (because `∂_z f_α = α f_{α−1}`) but is
/// computed without cancellation. It is the exact excess `w − α·ζ(w)` when
/// `w = f_α(z)`.
pub fn fermi_excess(order: FermiOrder, z: f64, cfg: &NumericsConfig) -> Result<f64> {
    if z.is_nan() {
        return domain("Fermi integral argument is NaN");
    }
    let alpha = order.alpha();
    if z < CLASSICAL_CUTOFF {
        return Ok(order.gamma_prefactor() * (2.0 * z).exp() / 2f64.powf(alpha + 1.0));
    }
    let power = 2.0 * alpha + 1.0;
    let integrand = |t: f64| {
        let n = occupation(t * t - z);
        2.0 * t.powf(power) * n * n
    };
    integrate_across_edge(integrand, z, cfg)
}

/// Named asymptotic branch of `f_α`. Used for brackets and validation.
pub fn fermi_asymptotic(order: FermiOrder, z: f64, branch: AsymptoticBranch) -> f64 {
    let alpha = order.alpha();
    match branch {
        AsymptoticBranch::Classical => order.gamma_prefactor() * z.exp(),
        AsymptoticBranch::Degenerate => z.max(0.0).powf(alpha + 1.0) / (alpha + 1.0),
    }
}

/// Solves `f_α(z) = y` for `z`.
pub fn fermi_f_inverse(order: FermiOrder, y: f64, cfg: &NumericsConfig) -> Result<f64> {
    if !(y > 0.0) || !y.is_finite() {
        return domain(format!(
            "Fermi inverse needs a positive finite value, got {y}"
        ));
    }
    let alpha = order.alpha();
    let lower = (y / order.gamma_prefactor()).ln();
    if lower < CLASSICAL_CUTOFF {
        // f_α is the classical branch there, so its inverse is exact.
        return Ok(lower);
    }
    let upper = ((alpha + 1.0) * y).powf(1.0 / (alpha + 1.0)) + 10.0;
    let target = y.ln();
    let failure = std::cell::Cell::new(None);
    let residual = |z: f64| match fermi_f(order, z, cfg) {
        Ok(v) => v.ln() - target,
        Err(e) => {
            failure.set(Some(e));
            f64::NAN
        }
    };
    let root = find_root_monotone(residual, lower, upper.max(lower + 1.0), cfg);
    if let Some(e) = failure.take() {
        return Err(e);
    }
    root
}

fn check_dimension(d: u32) -> Result<()> {
    if (3..=9).contains(&d) {
        Ok(())
    } else {
        domain(format!("dimension must lie in 3..=9, got {d}"))
    }
}

/// The inner and outer orders `(d/2 − 1, d/2 − 2)` used by the Fermi–Dirac model.
pub fn model_orders(d: u32) -> Result<(FermiOrder, FermiOrder)> {
    check_dimension(d)?;
    let half = f64::from(d) / 2.0;
    Ok((FermiOrder::new(half - 1.0)?, FermiOrder::new(half - 2.0)?))
}

/// `ζ(w) = f_{d/2−2}(f_{d/2−1}^{-1}(w))`.
pub fn zeta_map(d: u32, w: f64, cfg: &NumericsConfig) -> Result<f64> {
    let (inner, outer) = model_orders(d)?;
    if !(w > 0.0) {
        return domain(format!("zeta needs w > 0, got {w}"));
    }
    let z = fermi_f_inverse(inner, w, cfg)?;
    fermi_f(outer, z, cfg)
}

/// `w^{−1−2/d}·(w − (d−2)/2·ζ(w))`, the quantity whose supremum is `C(d)`.
pub fn bound_objective(d: u32, w: f64, cfg: &NumericsConfig) -> Result<f64> {
    let (inner, _) = model_orders(d)?;
    if !(w > 0.0) {
        return domain(format!("objective needs w > 0, got {w}"));
    }
    let z = fermi_f_inverse(inner, w, cfg)?;
    let excess = fermi_excess(inner, z, cfg)?;
    Ok(excess / w.powf(1.0 + 2.0 / f64::from(d)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundConstant {
    pub d: u32,
    pub value: f64,
    /// Location of the maximum in `w`.
    pub argmax: f64,
    /// Estimated relative accuracy of `value`.
    pub rel_err_est: f64,
}

const BOUND_W_MIN: f64 = 1e-6;
const BOUND_W_MAX: f64 = 1e8;
const BOUND_GRID_PER_DECADE: usize = 20;

/// `C(d) = sup_w w^{−1−2/d}(w − (d−2)/2·ζ(w))`.
///
/// Grid search over log-spaced `w ∈ [1e-6, 1e8]`, refined by golden section
/// in `log w` around the best grid cell. The accuracy estimate compares the
/// cancellation-free excess with the directly subtracted `w − (d−2)/2·ζ(w)`
/// at the maximiser.
pub fn bound_constant_c(d: u32, cfg: &NumericsConfig) -> Result<BoundConstant> {
    check_dimension(d)?;
    let decades = (BOUND_W_MAX / BOUND_W_MIN).log10();
    let n = (decades * BOUND_GRID_PER_DECADE as f64).round() as usize + 1;
    let grid = logspace(BOUND_W_MIN, BOUND_W_MAX, n);
    let values = grid
        .par_iter()
        .map(|&w| bound_objective(d, w, cfg))
        .collect::<Result<Vec<_>>>()?;

    let (best, &best_value) =
        values
            .iter()
            .enumerate()
            .fold((0, &f64::NEG_INFINITY), |acc, (i, v)| {
                if *v > *acc.1 {
                    (i, v)
                } else {
                    acc
                }
            });
    if !(best_value > 0.0) {
        return Err(Error::Consistency(format!(
            "bound objective is nonpositive on the whole grid for d = {d}"
        )));
    }

    let lo = grid[best.saturating_sub(1)].ln();
    let hi = grid[(best + 1).min(n - 1)].ln();
    let objective = |lw: f64| bound_objective(d, lw.exp(), cfg).unwrap_or(f64::NEG_INFINITY);
    let (log_arg, refined) = golden_section_max(objective, lo, hi, 1e-9);
    let (argmax, value) = if refined >= best_value {
        (log_arg.exp(), refined)
    } else {
        (grid[best], best_value)
    };

    let alpha = f64::from(d) / 2.0 - 1.0;
    let direct =
        (argmax - alpha * zeta_map(d, argmax, cfg)?) / argmax.powf(1.0 + 2.0 / f64::from(d));
    let rel_err_est = ((direct - value) / value).abs() + 10.0 * cfg.quad_rel_tol;

    Ok(BoundConstant {
        d,
        value,
        argmax,
        rel_err_est,
    })
}
