//! The radial steady-state problem as a planar dynamical system in the
//! log-radius `s = log r`:
//!
//! ```text
//! x' = (2 − d)·x + y
//! y' = 2·y − x·e^{2s}·R_η(e^{−2s}·y)
//! ```
//!
//! started from the asymptotic data `y ≈ ρ·e^{2s}`, `x ≈ (ρ/d)·e^{2s}` at
//! `s → −∞`. For `R_η = id` the system is autonomous, `y' = (2 − x)·y`.
//!
//! Trajectories are integrated in the log-density coordinates
//! `u = log(x·e^{−2s})`, `v = log(y·e^{−2s})`, which stay O(log ρ) on the
//! whole range and keep `x, y > 0` by construction:
//!
//! ```text
//! u' = e^{v − u} − d
//! v' = −x·R_η(Y)/Y,   Y = e^v
//! ```

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::models::{r_value, sphere_measure, ModelSpec, StatisticsKind};
use crate::numerics::{integrate_finite, linspace, ode_integrate, NumericsConfig, OdeSolution};

/// Largest `|s|` for which `e^{2s}` style factors are formed directly.
const LOG_SPACE_THRESHOLD: f64 = 300.0;

/// Phase point `(s, x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct State {
    pub s: f64,
    pub x: f64,
    pub y: f64,
}

/// `(r, Q, Q')` for the radial mass function `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialPoint {
    pub r: f64,
    pub q: f64,
    pub q_prime: f64,
}

/// `R_η(Y)/Y`, continuously extended by 1 at `Y = 0`.
fn r_ratio(model: &ModelSpec, density: f64, cfg: &NumericsConfig) -> Result<f64> {
    if model.is_identity() || density == 0.0 {
        return Ok(1.0);
    }
    Ok(r_value(model, density, cfg)? / density)
}

/// Right-hand side of the (possibly nonautonomous) system.
pub fn rhs_nonautonomous(
    model: &ModelSpec,
    s: f64,
    x: f64,
    y: f64,
    cfg: &NumericsConfig,
) -> Result<(f64, f64)> {
    if !(y >= 0.0) {
        return domain(format!("y must be nonnegative, got {y}"));
    }
    let dx = (2.0 - model.dim()) * x + y;
    if model.is_identity() {
        return Ok((dx, (2.0 - x) * y));
    }
    if y == 0.0 {
        return Ok((dx, 0.0));
    }
    let density = if s.abs() > LOG_SPACE_THRESHOLD {
        (y.ln() - 2.0 * s).exp()
    } else {
        y * (-2.0 * s).exp()
    };
    if !density.is_finite() {
        return Err(Error::Overflow { s });
    }
    // x·e^{2s}·R(z) = x·y·R(z)/z since e^{2s}·z = y.
    let sink = x * y * r_ratio(model, density, cfg)?;
    Ok((dx, 2.0 * y - sink))
}

/// Right-hand side of the autonomous (Maxwell–Boltzmann) system.
pub fn rhs_autonomous(d: u32, x: f64, y: f64) -> (f64, f64) {
    ((2.0 - f64::from(d)) * x + y, (2.0 - x) * y)
}

/// Leading-order data at `s_start`: `y = ρ·e^{2s}`, `x = y/d`.
pub fn initial_state(d: u32, rho: f64, s_start: f64) -> Result<State> {
    if !(rho > 0.0) || !rho.is_finite() {
        return domain(format!("central density must be positive, got {rho}"));
    }
    if !(s_start <= -10.0) {
        return Err(Error::Config(format!(
            "s_start = {s_start} is outside the asymptotic regime (need s_start <= -10)"
        )));
    }
    let y = rho * (2.0 * s_start).exp();
    Ok(State {
        s: s_start,
        x: y / f64::from(d),
        y,
    })
}

/// A solution of the system with central density `rho`, sampled at the
/// integrator's accepted steps and evaluable anywhere in range.
#[derive(Debug, Clone)]
pub struct Trajectory {
    model: ModelSpec,
    rho: f64,
    solution: OdeSolution<2>,
}

impl Trajectory {
    pub fn model(&self) -> &ModelSpec {
        &self.model
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn s_start(&self) -> f64 {
        self.solution.t_start()
    }

    pub fn s_end(&self) -> f64 {
        self.solution.t_end()
    }

    /// `(log(x·e^{−2s}), log(y·e^{−2s}))` at `s`.
    pub fn log_scaled_at(&self, s: f64) -> Option<[f64; 2]> {
        self.solution.eval(s)
    }

    /// Mean-density and density variables `(x·e^{−2s}, y·e^{−2s})`.
    pub fn scaled_at(&self, s: f64) -> Option<(f64, f64)> {
        self.log_scaled_at(s).map(|[u, v]| (u.exp(), v.exp()))
    }

    /// Local density `ρ(r) = y·e^{−2s}` at `r = e^s`.
    pub fn density_at(&self, s: f64) -> Option<f64> {
        self.log_scaled_at(s).map(|[_, v]| v.exp())
    }

    pub fn at(&self, s: f64) -> Option<State> {
        self.log_scaled_at(s).map(|uv| to_state(s, uv))
    }

    /// `log y` at `s`, without forming `y`.
    pub fn ln_y_at(&self, s: f64) -> Option<f64> {
        self.log_scaled_at(s).map(|[_, v]| v + 2.0 * s)
    }

    /// States at the accepted integration steps.
    pub fn samples(&self) -> Vec<State> {
        self.solution
            .times()
            .iter()
            .zip(self.solution.states())
            .map(|(&s, &uv)| to_state(s, uv))
            .collect()
    }

    pub fn sample_times(&self) -> &[f64] {
        self.solution.times()
    }

    pub fn final_state(&self) -> State {
        to_state(self.s_end(), self.solution.last())
    }

    /// States on `n` uniformly spaced points of `[lo, hi]`.
    pub fn on_grid(&self, lo: f64, hi: f64, n: usize) -> Result<Vec<State>> {
        linspace(lo, hi, n)
            .into_iter()
            .map(|s| {
                self.at(s).ok_or_else(|| {
                    Error::GridMismatch(format!(
                        "s = {s} outside trajectory range [{}, {}]",
                        self.s_start(),
                        self.s_end()
                    ))
                })
            })
            .collect()
    }
}

fn to_state(s: f64, [u, v]: [f64; 2]) -> State {
    State {
        s,
        x: (u + 2.0 * s).exp(),
        y: (v + 2.0 * s).exp(),
    }
}

/// Field in log-density coordinates; see the module docs.
fn log_field(
    model: &ModelSpec,
    s: f64,
    [u, v]: [f64; 2],
    cfg: &NumericsConfig,
) -> Result<[f64; 2]> {
    let x = (u + 2.0 * s).exp();
    let du = (v - u).exp() - model.dim();
    let dv = -x * r_ratio(model, v.exp(), cfg)?;
    Ok([du, dv])
}

/// Integrates the system from the asymptotic data at `s_start` to `s_end`.
pub fn integrate_trajectory(
    model: &ModelSpec,
    rho: f64,
    s_start: f64,
    s_end: f64,
    cfg: &NumericsConfig,
) -> Result<Trajectory> {
    if !(s_start < s_end) {
        return Err(Error::Config(format!(
            "need s_start < s_end, got [{s_start}, {s_end}]"
        )));
    }
    initial_state(model.d(), rho, s_start)?;
    let u0 = [(rho / model.dim()).ln(), rho.ln()];
    let field = |s: f64, uv: &[f64; 2]| log_field(model, s, *uv, cfg);
    let solution = ode_integrate(field, s_start, u0, s_end, cfg)?;
    Ok(Trajectory {
        model: *model,
        rho,
        solution,
    })
}

/// `L(x, y) = ½(x−2)² + y − 2(d−2) − 2(d−2)·log(y/(2d−4))`.
pub fn lyapunov(d: u32, x: f64, y: f64) -> Result<f64> {
    if !(y > 0.0) {
        return domain(format!("Lyapunov function needs y > 0, got {y}"));
    }
    let c = 2.0 * (f64::from(d) - 2.0);
    Ok(0.5 * (x - 2.0).powi(2) + (y - c) - c * (y / c).ln())
}

/// Same as [`lyapunov`] with `y` given through `log y`.
pub fn lyapunov_log_y(d: u32, x: f64, ln_y: f64) -> f64 {
    let c = 2.0 * (f64::from(d) - 2.0);
    let y = ln_y.exp();
    0.5 * (x - 2.0).powi(2) + (y - c) - c * (ln_y - c.ln())
}

#[derive(Debug, Clone, Serialize)]
pub struct LyapunovReport {
    pub pass: bool,
    /// Largest increase of `L` between consecutive samples.
    pub max_increase: f64,
    /// Sample positions where `L` increased by more than the tolerance.
    pub offending_s: Vec<f64>,
    /// Largest relative gap between the numerical `dL/ds` and `−(d−2)(x−2)²`.
    pub max_rate_residual: f64,
    /// Largest relative gap between the numerical `dL/ds` and `−(x−2)²`.
    /// Zero only for `d = 3`.
    pub max_unit_rate_residual: f64,
    /// Number of points where the rate was compared (`|x − 2| > 0.1`).
    pub rate_points: usize,
}

const LYAPUNOV_STEP_TOL: f64 = 1e-9;
const LYAPUNOV_RATE_TOL: f64 = 1e-3;
const LYAPUNOV_FD_STEP: f64 = 1e-2;

/// Checks that `L` decays along an autonomous trajectory.
///
/// Monotonicity is tested on the accepted steps. The rate is obtained by a
/// five-point centered difference of `L` along the dense output and compared
/// with the exact decay `dL/ds = −(d−2)(x−2)²` wherever `|x − 2| > 0.1`.
pub fn lyapunov_decay_check(traj: &Trajectory) -> Result<LyapunovReport> {
    if !traj.model().is_identity() {
        return domain(format!(
            "Lyapunov decay applies to the autonomous system, got {}",
            traj.model()
        ));
    }
    let d = traj.model().d();
    let df = f64::from(d);
    let l_at = |s: f64| -> f64 {
        let st = traj.at(s).expect("within range");
        lyapunov_log_y(d, st.x, traj.ln_y_at(s).expect("within range"))
    };

    let times = traj.sample_times();
    let values: Vec<f64> = times.iter().map(|&s| l_at(s)).collect();
    let mut max_increase = f64::NEG_INFINITY;
    let mut offending_s = Vec::new();
    for (i, pair) in values.windows(2).enumerate() {
        let inc = pair[1] - pair[0];
        max_increase = max_increase.max(inc);
        if inc > LYAPUNOV_STEP_TOL {
            offending_s.push(times[i + 1]);
        }
    }

    let h = LYAPUNOV_FD_STEP;
    let (lo, hi) = (traj.s_start() + 2.0 * h, traj.s_end() - 2.0 * h);
    let mut max_rate_residual: f64 = 0.0;
    let mut max_unit_rate_residual: f64 = 0.0;
    let mut rate_points = 0;
    for &s in times.iter().filter(|&&s| s >= lo && s <= hi) {
        let x = traj.at(s).expect("within range").x;
        if (x - 2.0).abs() <= 0.1 {
            continue;
        }
        let rate = (-l_at(s + 2.0 * h) + 8.0 * l_at(s + h) - 8.0 * l_at(s - h) + l_at(s - 2.0 * h))
            / (12.0 * h);
        let unit = -(x - 2.0).powi(2);
        let exact = (df - 2.0) * unit;
        max_rate_residual = max_rate_residual.max(((rate - exact) / exact).abs());
        max_unit_rate_residual = max_unit_rate_residual.max(((rate - unit) / unit).abs());
        rate_points += 1;
    }

    Ok(LyapunovReport {
        pass: offending_s.is_empty() && max_rate_residual <= LYAPUNOV_RATE_TOL,
        max_increase: max_increase.max(0.0),
        offending_s,
        max_rate_residual,
        max_unit_rate_residual,
        rate_points,
    })
}

/// `(s, x, y) ↦ (r, Q, Q')` with `Q(e^s) = x·e^{(d−2)s}`, `Q'(e^s) = y·e^{(d−3)s}`.
pub fn to_radial(state: State, d: u32) -> Result<RadialPoint> {
    let df = f64::from(d);
    let r = state.s.exp();
    let q = state.x * ((df - 2.0) * state.s).exp();
    let q_prime = state.y * ((df - 3.0) * state.s).exp();
    if !(r.is_finite() && q.is_finite() && q_prime.is_finite()) {
        return Err(Error::Overflow { s: state.s });
    }
    Ok(RadialPoint { r, q, q_prime })
}

/// Inverse of [`to_radial`].
pub fn from_radial(point: RadialPoint, d: u32) -> Result<State> {
    if !(point.r > 0.0) {
        return domain(format!("radius must be positive, got {}", point.r));
    }
    let df = f64::from(d);
    let s = point.r.ln();
    Ok(State {
        s,
        x: point.q * (-(df - 2.0) * s).exp(),
        y: point.q_prime * (-(df - 3.0) * s).exp(),
    })
}

/// `(r, ρ(r))` at the trajectory's samples, with `ρ(r) = r^{1−d}Q'(r) = y·e^{−2s}`.
pub fn density_profile(traj: &Trajectory) -> Vec<(f64, f64)> {
    traj.sample_times()
        .iter()
        .map(|&s| (s.exp(), traj.density_at(s).expect("sample in range")))
        .collect()
}

/// `∫_{B(0, e^{s_end})} ρ = σ_d ∫_{−∞}^{s_end} e^{ds}·ρ(e^s) ds`, from the
/// density profile. The part below `s_start` uses the constant central density.
pub fn profile_mass(traj: &Trajectory, s_end: f64, cfg: &NumericsConfig) -> Result<f64> {
    if !(s_end <= traj.s_end() && s_end > traj.s_start()) {
        return Err(Error::GridMismatch(format!(
            "s_end = {s_end} outside trajectory range"
        )));
    }
    let d = traj.model().d();
    let df = f64::from(d);
    let s0 = traj.s_start();
    let core = traj.rho() * (df * s0).exp() / df;
    let (shell, _) = integrate_finite(
        |s| (df * s).exp() * traj.density_at(s).unwrap_or(f64::NAN),
        s0,
        s_end,
        cfg.quad_rel_tol,
        0.0,
    )?;
    Ok(sphere_measure(d) * (core + shell))
}

/// Integrates `−Q'' + (d−1)·Q'/r = Q·R_η(r^{1−d}·Q')` directly in `r` from the
/// series data `Q(r0) = ρ·r0^d/d`, `Q'(r0) = ρ·r0^{d−1}` up to `r = 1`.
///
/// Returns `(Q(1), Q'(1))`. This path shares no code with the `(s, x, y)`
/// integration beyond the generic integrator and `R_η`.
pub fn radial_q_integrate(
    model: &ModelSpec,
    rho: f64,
    r0: f64,
    cfg: &NumericsConfig,
) -> Result<(f64, f64)> {
    if !(rho > 0.0) {
        return domain(format!("central density must be positive, got {rho}"));
    }
    if !(r0 > 0.0 && r0 <= 1e-4) {
        return Err(Error::Config(format!("need 0 < r0 <= 1e-4, got {r0}")));
    }
    let df = model.dim();
    let q0 = rho * r0.powf(df) / df;
    let qp0 = rho * r0.powf(df - 1.0);
    // Q spans r^d over [r0, 1]; measure the absolute tolerance in units of Q(r0).
    let local = NumericsConfig {
        ode_abs_tol: cfg.ode_abs_tol * q0.min(1.0),
        ..*cfg
    };
    let field = |r: f64, u: &[f64; 2]| -> Result<[f64; 2]> {
        let [q, qp] = *u;
        let density = (qp * r.powf(1.0 - df)).max(0.0);
        let source = match model.kind() {
            StatisticsKind::MaxwellBoltzmann => density,
            _ => r_value(model, density, cfg)?,
        };
        Ok([qp, (df - 1.0) * qp / r - q * source])
    };
    let sol = ode_integrate(field, r0, [q0, qp0], 1.0, &local)?;
    let [q1, qp1] = sol.last();
    Ok((q1, qp1))
}
