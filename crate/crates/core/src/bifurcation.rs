//! The shooting map `ρ ↦ M(ρ)`, the mass–density curve, multiplicity of
//! solutions for a prescribed mass, and the `η → 0` convergence diagnostics.

use std::cell::Cell;

use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{integrate_trajectory, Trajectory};
use crate::error::{domain, Error, Result};
use crate::models::{s_value, sphere_measure, ModelSpec, StatisticsKind};
use crate::numerics::{find_root_monotone, linspace, logspace, NumericsConfig};

/// `M(ρ) = σ_d·x(0)` for the steady state of central density `rho`.
pub fn mass_of_density(model: &ModelSpec, rho: f64, cfg: &NumericsConfig) -> Result<f64> {
    if !(rho > 0.0) || !rho.is_finite() {
        return domain(format!("central density must be positive, got {rho}"));
    }
    let traj = integrate_trajectory(model, rho, cfg.s_start, 0.0, cfg)?;
    Ok(sphere_measure(model.d()) * traj.final_state().x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPolicy {
    pub rho_min: f64,
    pub rho_max: f64,
    pub points_per_decade: usize,
}

impl GridPolicy {
    pub fn new(rho_min: f64, rho_max: f64, points_per_decade: usize) -> Result<Self> {
        if !(rho_min > 0.0 && rho_min < rho_max && rho_max.is_finite()) {
            return Err(Error::Config(format!(
                "need 0 < rho_min < rho_max, got [{rho_min}, {rho_max}]"
            )));
        }
        if points_per_decade < 4 {
            return Err(Error::Config(format!(
                "points_per_decade must be at least 4, got {points_per_decade}"
            )));
        }
        Ok(Self {
            rho_min,
            rho_max,
            points_per_decade,
        })
    }

    /// Log-spaced densities, both endpoints included.
    pub fn densities(&self) -> Vec<f64> {
        let decades = (self.rho_max / self.rho_min).log10();
        let n = (decades * self.points_per_decade as f64).round() as usize + 1;
        logspace(self.rho_min, self.rho_max, n.max(2))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MassPoint {
    pub rho: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveGap {
    pub rho: f64,
    pub error: String,
}

/// Sampled mass–density curve. Failed points are left out of `points` and
/// listed in `gaps`.
#[derive(Debug, Clone, Serialize)]
pub struct MassCurve {
    pub model: ModelSpec,
    pub grid: GridPolicy,
    pub points: Vec<MassPoint>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub gaps: Vec<CurveGap>,
}

impl MassCurve {
    pub fn is_complete(&self) -> bool {
        self.gaps.is_empty()
    }

    pub fn mass_range(&self) -> Option<(f64, f64)> {
        let masses = self.points.iter().map(|p| p.mass);
        let lo = masses.clone().fold(f64::INFINITY, f64::min);
        let hi = masses.fold(f64::NEG_INFINITY, f64::max);
        (lo <= hi).then_some((lo, hi))
    }

    /// Masses strictly between the first local maximum and the first local
    /// minimum after it; the band where several branches coexist.
    pub fn intermediate_mass_window(&self) -> Option<(f64, f64)> {
        let m: Vec<f64> = self.points.iter().map(|p| p.mass).collect();
        let first_max =
            (1..m.len().saturating_sub(1)).find(|&i| m[i] > m[i - 1] && m[i] >= m[i + 1])?;
        let first_min = (first_max + 1..m.len().saturating_sub(1))
            .find(|&i| m[i] < m[i - 1] && m[i] <= m[i + 1])?;
        Some((m[first_min], m[first_max]))
    }
}

/// Evaluates the mass on a log-spaced grid. Points are independent and are
/// computed in parallel; the result is ordered by `rho`.
pub fn mass_curve(
    model: &ModelSpec,
    rho_min: f64,
    rho_max: f64,
    points_per_decade: usize,
    cfg: &NumericsConfig,
) -> Result<MassCurve> {
    let grid = GridPolicy::new(rho_min, rho_max, points_per_decade)?;
    let results: Vec<(f64, Result<f64>)> = grid
        .densities()
        .into_par_iter()
        .map(|rho| (rho, mass_of_density(model, rho, cfg)))
        .collect();
    let mut points = Vec::with_capacity(results.len());
    let mut gaps = Vec::new();
    for (rho, r) in results {
        match r {
            Ok(mass) if mass.is_finite() && mass > 0.0 => points.push(MassPoint { rho, mass }),
            Ok(mass) => gaps.push(CurveGap {
                rho,
                error: format!("non-positive or non-finite mass {mass}"),
            }),
            Err(e) => gaps.push(CurveGap {
                rho,
                error: e.to_string(),
            }),
        }
    }
    Ok(MassCurve {
        model: *model,
        grid,
        points,
        gaps,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Multiplicity {
    #[serde(rename = "M_target")]
    pub m_target: f64,
    pub multiplicity: usize,
    pub roots: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

/// Relative accuracy in `rho` of the refined roots.
pub const ROOT_RHO_TOL: f64 = 1e-6;

/// Counts the densities whose steady state has mass `m_target`.
///
/// Each sign change of `M − m_target` between neighbouring curve points is
/// refined on the true shooting map in `log ρ`.
pub fn count_solutions(
    curve: &MassCurve,
    m_target: f64,
    cfg: &NumericsConfig,
) -> Result<Multiplicity> {
    if curve.points.is_empty() {
        return domain("mass curve has no points");
    }
    if !(m_target > 0.0) || !m_target.is_finite() {
        return domain(format!("target mass must be positive, got {m_target}"));
    }
    let (lo, hi) = curve.mass_range().expect("nonempty curve");
    if m_target < lo || m_target > hi {
        return Ok(Multiplicity {
            m_target,
            multiplicity: 0,
            roots: Vec::new(),
            diagnostic: Some(format!(
                "target mass {m_target} outside the curve's range [{lo}, {hi}]"
            )),
        });
    }

    let brackets: Vec<(f64, f64)> = curve
        .points
        .windows(2)
        .filter(|w| {
            let (a, b) = (w[0].mass - m_target, w[1].mass - m_target);
            (a < 0.0 && b >= 0.0) || (a > 0.0 && b <= 0.0)
        })
        .map(|w| (w[0].rho, w[1].rho))
        .collect();
    let exact_first = (curve.points[0].mass == m_target).then_some(curve.points[0].rho);

    let model = curve.model;
    let root_cfg = NumericsConfig {
        root_tol: cfg.root_tol.min(0.01 * ROOT_RHO_TOL),
        ..*cfg
    };
    let refined: Vec<Result<f64>> = brackets
        .into_par_iter()
        .map(|(a, b)| {
            let failure = Cell::new(None);
            let g = |t: f64| match mass_of_density(&model, t.exp(), cfg) {
                Ok(m) => m - m_target,
                Err(e) => {
                    failure.set(Some(e));
                    f64::NAN
                }
            };
            let t = find_root_monotone(g, a.ln(), b.ln(), &root_cfg);
            if let Some(e) = failure.take() {
                return Err(e);
            }
            Ok(t?.exp())
        })
        .collect();
    let mut roots: Vec<f64> = exact_first.into_iter().collect();
    for r in refined {
        roots.push(r?);
    }
    Ok(Multiplicity {
        m_target,
        multiplicity: roots.len(),
        roots,
        diagnostic: (!curve.is_complete()).then(|| {
            format!(
                "{} curve points failed; count may be incomplete",
                curve.gaps.len()
            )
        }),
    })
}

/// Weighted and uniform gaps between a Fermi–Dirac trajectory and the
/// Maxwell–Boltzmann one with the same central density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub d: u32,
    pub rho0: f64,
    pub eta: f64,
    /// `sup e^{−2s}|x_η − x_0|` over the comparison grid.
    #[serde(rename = "A_eta")]
    pub a_eta: f64,
    /// `sup e^{−2s}|y_η − y_0|` over the comparison grid.
    #[serde(rename = "B_eta")]
    pub b_eta: f64,
    /// `2·B_η·e^{−ρ0/d}/η`.
    pub kappa_emp: f64,
    /// `sup max(|x_η − x_0|, |y_η − y_0|)` over the comparison grid.
    pub sup_uniform_gap: f64,
}

/// `linspace(s_start, 0, grid_points)`, shared by all trajectory comparisons.
pub fn comparison_grid(cfg: &NumericsConfig) -> Vec<f64> {
    linspace(cfg.s_start, 0.0, cfg.grid_points)
}

fn gaps_on_grid(fd: &Trajectory, mb: &Trajectory, grid: &[f64]) -> Result<(f64, f64, f64)> {
    let (mut a, mut b, mut uniform) = (0.0_f64, 0.0_f64, 0.0_f64);
    for &s in grid {
        let missing = || Error::GridMismatch(format!("s = {s} outside trajectory range"));
        let (xe, ye) = fd.scaled_at(s).ok_or_else(missing)?;
        let (x0, y0) = mb.scaled_at(s).ok_or_else(missing)?;
        let (da, db) = ((xe - x0).abs(), (ye - y0).abs());
        a = a.max(da);
        b = b.max(db);
        uniform = uniform.max((2.0 * s).exp() * da.max(db));
    }
    Ok((a, b, uniform))
}

/// Compares Fermi–Dirac trajectories at each `eta` with the Maxwell–Boltzmann
/// trajectory of the same central density on the shared grid.
pub fn convergence_study(
    d: u32,
    kind: StatisticsKind,
    rho0: f64,
    etas: &[f64],
    cfg: &NumericsConfig,
) -> Result<Vec<ConvergenceReport>> {
    if kind == StatisticsKind::MaxwellBoltzmann {
        return Err(Error::Config(
            "convergence study needs a Fermi–Dirac kind".into(),
        ));
    }
    if etas.is_empty() {
        return Err(Error::Config("eta list is empty".into()));
    }
    if etas.iter().any(|&e| !(e > 0.0 && e <= 1.0)) {
        return Err(Error::Config(format!(
            "every eta must lie in (0, 1], got {etas:?}"
        )));
    }
    if etas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Config(format!(
            "eta list must be strictly decreasing, got {etas:?}"
        )));
    }
    let mb = integrate_trajectory(
        &ModelSpec::maxwell_boltzmann(d)?,
        rho0,
        cfg.s_start,
        0.0,
        cfg,
    )?;
    let grid = comparison_grid(cfg);
    etas.par_iter()
        .map(|&eta| {
            let model = ModelSpec::new(kind, d, eta)?;
            let fd = integrate_trajectory(&model, rho0, cfg.s_start, 0.0, cfg)?;
            let (a_eta, b_eta, sup_uniform_gap) = gaps_on_grid(&fd, &mb, &grid)?;
            Ok(ConvergenceReport {
                d,
                rho0,
                eta,
                a_eta,
                b_eta,
                kappa_emp: 2.0 * b_eta * (-rho0 / f64::from(d)).exp() / eta,
                sup_uniform_gap,
            })
        })
        .collect()
}

/// Least-squares slope of `log B_η` against `log η`.
pub fn convergence_order(reports: &[ConvergenceReport]) -> Option<f64> {
    if reports.len() < 2 {
        return None;
    }
    let pts: Vec<(f64, f64)> = reports.iter().map(|r| (r.eta.ln(), r.b_eta.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

#[derive(Debug, Clone, Serialize)]
pub struct AprioriReport {
    pub pass: bool,
    /// `max_{[0, ρ0]} S_η`.
    pub s_bar: f64,
    /// Largest `(lhs − rhs)/rhs` over the grid; negative when the bound holds
    /// with room to spare, zero when both sides vanish.
    pub max_relative_violation: f64,
    /// Largest `lhs/rhs` over the grid.
    pub max_ratio: f64,
    pub points: usize,
}

const APRIORI_TOL: f64 = 1e-6;
const S_BAR_SAMPLES: usize = 257;

/// `max_{[0, ρ0]} S_η`, sampled on a uniform grid with both endpoints.
pub fn s_bar(model: &ModelSpec, rho0: f64, cfg: &NumericsConfig) -> Result<f64> {
    linspace(0.0, rho0, S_BAR_SAMPLES)
        .into_iter()
        .try_fold(0.0_f64, |acc, z| Ok(acc.max(s_value(model, z, cfg)?)))
}

/// Checks `d·x_η·e^{2s}·S_η(e^{−2s}y_η) ≤ ρ0·e^{4s}·max_{[0,ρ0]} S_η` on the
/// shared grid for the trajectory of central density `rho ≤ rho0`.
pub fn apriori_bound_audit(
    model: &ModelSpec,
    rho0: f64,
    rho: f64,
    cfg: &NumericsConfig,
) -> Result<AprioriReport> {
    if !(rho > 0.0 && rho <= rho0) {
        return domain(format!("need 0 < rho <= rho0, got rho {rho}, rho0 {rho0}"));
    }
    let s_bar = s_bar(model, rho0, cfg)?;
    let traj = integrate_trajectory(model, rho, cfg.s_start, 0.0, cfg)?;
    let grid = comparison_grid(cfg);
    let rhs = rho0 * s_bar;
    let (mut violation, mut ratio) = (f64::NEG_INFINITY, 0.0_f64);
    for &s in &grid {
        let (x_scaled, density) = traj.scaled_at(s).expect("grid inside trajectory");
        // Both sides carry the common factor e^{4s}.
        let lhs = model.dim() * x_scaled * s_value(model, density, cfg)?;
        if rhs == 0.0 {
            violation = violation.max(if lhs == 0.0 { 0.0 } else { f64::INFINITY });
        } else {
            violation = violation.max((lhs - rhs) / rhs);
            ratio = ratio.max(lhs / rhs);
        }
    }
    Ok(AprioriReport {
        pass: violation <= APRIORI_TOL,
        s_bar,
        max_relative_violation: violation,
        max_ratio: ratio,
        points: grid.len(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DifferenceReport {
    pub pass: bool,
    /// Largest relative residual of `w' = (2−d)w + v`.
    pub max_residual_w: f64,
    /// Largest relative residual of `v' = (2−x0)v − y_η·w + x_η·e^{2s}·S_η(e^{−2s}y_η)`.
    pub max_residual_v: f64,
    /// Same as `max_residual_v` with the source term entering with a minus sign.
    pub max_residual_v_negated_source: f64,
    /// `sup |x_η·e^{2s}·S_η(e^{−2s}y_η)|` over the grid.
    pub source_sup: f64,
    /// Grid points where at least one residual was measured.
    pub points: usize,
}

const DIFF_FD_STEP: f64 = 1e-2;
const DIFF_MAGNITUDE_FLOOR: f64 = 1e-10;
const DIFF_TOL: f64 = 1e-3;

/// Checks that `(w, v) = (x_η − x0, y_η − y0)` satisfies the difference system.
///
/// Derivatives come from a five-point stencil on the dense output. Each
/// residual is measured relative to the largest term on its right-hand side
/// and only where that term exceeds `1e-10`.
pub fn difference_residual_audit(
    fd: &Trajectory,
    mb: &Trajectory,
    cfg: &NumericsConfig,
) -> Result<DifferenceReport> {
    if !mb.model().is_identity() {
        return Err(Error::GridMismatch(format!(
            "reference trajectory must be Maxwell–Boltzmann, got {}",
            mb.model()
        )));
    }
    if fd.model().d() != mb.model().d() || fd.rho() != mb.rho() || fd.s_start() != mb.s_start() {
        return Err(Error::GridMismatch(format!(
            "trajectories differ in d, rho or s_start: ({}, {}, {}) vs ({}, {}, {})",
            fd.model().d(),
            fd.rho(),
            fd.s_start(),
            mb.model().d(),
            mb.rho(),
            mb.s_start()
        )));
    }
    let s_hi = fd.s_end().min(mb.s_end()).min(0.0);
    let h = DIFF_FD_STEP;
    let df = fd.model().dim();
    let model = *fd.model();
    let wv = |s: f64| -> [f64; 2] {
        let (a, b) = (fd.at(s).expect("in range"), mb.at(s).expect("in range"));
        [a.x - b.x, a.y - b.y]
    };
    let stencil = |s: f64| -> [f64; 2] {
        let (p2, p1, m1, m2) = (wv(s + 2.0 * h), wv(s + h), wv(s - h), wv(s - 2.0 * h));
        [0, 1].map(|k| (-p2[k] + 8.0 * p1[k] - 8.0 * m1[k] + m2[k]) / (12.0 * h))
    };

    let mut report = DifferenceReport {
        pass: true,
        max_residual_w: 0.0,
        max_residual_v: 0.0,
        max_residual_v_negated_source: 0.0,
        source_sup: 0.0,
        points: 0,
    };
    let grid = linspace(fd.s_start(), s_hi, cfg.grid_points);
    for &s in grid
        .iter()
        .filter(|&&s| s >= fd.s_start() + 2.0 * h && s <= s_hi - 2.0 * h)
    {
        let (e, o) = (fd.at(s).expect("in range"), mb.at(s).expect("in range"));
        let [w, v] = [e.x - o.x, e.y - o.y];
        let density = fd.density_at(s).expect("in range");
        // x_η·e^{2s}·S(z) = x_η·y_η·S(z)/z.
        let source = if density > 0.0 {
            e.x * e.y * s_value(&model, density, cfg)? / density
        } else {
            0.0
        };
        report.source_sup = report.source_sup.max(source.abs());
        let [dw, dv] = stencil(s);
        let mut measured = false;

        let w_terms = [(2.0 - df) * w, v];
        let w_scale = w_terms.iter().fold(0.0_f64, |m, t| m.max(t.abs()));
        if w_scale > DIFF_MAGNITUDE_FLOOR {
            let r = (dw - w_terms.iter().sum::<f64>()).abs() / w_scale;
            report.max_residual_w = report.max_residual_w.max(r);
            measured = true;
        }
        let v_terms = [(2.0 - o.x) * v, -e.y * w, source];
        let v_scale = v_terms.iter().fold(0.0_f64, |m, t| m.max(t.abs()));
        if v_scale > DIFF_MAGNITUDE_FLOOR {
            let r = (dv - v_terms.iter().sum::<f64>()).abs() / v_scale;
            let r_neg = (dv - (v_terms[0] + v_terms[1] - source)).abs() / v_scale;
            report.max_residual_v = report.max_residual_v.max(r);
            report.max_residual_v_negated_source = report.max_residual_v_negated_source.max(r_neg);
            measured = true;
        }
        report.points += usize::from(measured);
    }
    report.pass = report.max_residual_w <= DIFF_TOL && report.max_residual_v <= DIFF_TOL;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::logspace;

    fn cfg() -> NumericsConfig {
        NumericsConfig::default()
    }

    fn mb3() -> ModelSpec {
        ModelSpec::maxwell_boltzmann(3).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn mass_examples() {
        let c = cfg();
        let sigma = sphere_measure(3);
        let m = mass_of_density(&mb3(), 1e-6, &c).unwrap();
        assert!(rel(m, sigma * 1e-6 / 3.0) < 0.01);
        let m = mass_of_density(&mb3(), 1e8, &c).unwrap();
        assert!(rel(m, 2.0 * sigma) < 0.02);
        let masses: Vec<f64> = logspace(1e-6, 1e-2, 17)
            .into_iter()
            .map(|rho| mass_of_density(&mb3(), rho, &c).unwrap())
            .collect();
        assert!(masses.windows(2).all(|w| w[1] > w[0]));
        assert!(mass_of_density(&mb3(), 0.0, &c).is_err());
    }

    #[test]
    fn mb_reference_values() {
        // Independent high-order solve of the same shooting problem.
        let c = cfg();
        let x_at_one = mass_of_density(&mb3(), 1.0, &c).unwrap() / sphere_measure(3);
        assert!(rel(x_at_one, 0.302_901_376_179_798_2) < 1e-8);
        let curve = mass_curve(&mb3(), 1e-2, 1e8, 16, &c).unwrap();
        let sols = count_solutions(&curve, 2.0 * sphere_measure(3), &c).unwrap();
        let log_roots: [f64; 4] = [
            2.808_021_413_707_387,
            7.250_110_621_592_475,
            12.122_506_006_448_624,
            16.837_902_829_742_79,
        ];
        assert_eq!(sols.multiplicity, log_roots.len());
        for (r, t) in sols.roots.iter().zip(log_roots) {
            assert!(rel(*r, t.exp()) < 1e-6, "{r}");
        }
    }

    #[test]
    fn mass_map_continuity() {
        let c = cfg();
        for rho in logspace(1e-2, 1e8, 20) {
            let a = mass_of_density(&mb3(), rho, &c).unwrap();
            let b = mass_of_density(&mb3(), rho * (1.0 + 1e-4), &c).unwrap();
            assert!((a - b).abs() <= 1e-2 * a);
        }
    }

    #[test]
    fn grid_policy() {
        let g = GridPolicy::new(1e-2, 1e8, 16).unwrap();
        let rhos = g.densities();
        assert_eq!(rhos.len(), 161);
        assert_eq!((rhos[0], rhos[160]), (1e-2, 1e8));
        assert!(rhos.windows(2).all(|w| w[1] > w[0]));
        assert!(GridPolicy::new(1.0, 1.0, 16).is_err());
        assert!(GridPolicy::new(1.0, 10.0, 3).is_err());
    }

    #[test]
    fn mb_curve_oscillates_around_twice_sigma() {
        let c = cfg();
        let curve = mass_curve(&mb3(), 1e-2, 1e8, 16, &c).unwrap();
        assert!(curve.is_complete());
        assert!(curve
            .points
            .iter()
            .all(|p| p.mass > 0.0 && p.mass.is_finite()));
        let target = 2.0 * sphere_measure(3);
        let crossings = curve
            .points
            .windows(2)
            .filter(|w| (w[0].mass - target) * (w[1].mass - target) < 0.0)
            .count();
        assert!(crossings >= 3, "{crossings}");
        let (lo, hi) = curve.intermediate_mass_window().unwrap();
        assert!(lo < target && target < hi);

        let sols = count_solutions(&curve, target, &c).unwrap();
        assert_eq!(sols.multiplicity, crossings);
        assert!(sols.roots.windows(2).all(|w| w[1] > w[0]));
        for &r in &sols.roots {
            let m = mass_of_density(&mb3(), r, &c).unwrap();
            assert!(rel(m, target) < 1e-6);
        }

        let none = count_solutions(&curve, 1e9, &c).unwrap();
        assert_eq!(none.multiplicity, 0);
        assert!(none.diagnostic.is_some());
    }

    #[test]
    fn curve_endpoint_linearization() {
        let c = cfg();
        let curve = mass_curve(&mb3(), 1e-6, 1e-2, 4, &c).unwrap();
        let sigma = sphere_measure(3);
        let ratios: Vec<f64> = curve
            .points
            .iter()
            .map(|p| p.mass * 3.0 / (sigma * p.rho))
            .collect();
        assert!(ratios
            .windows(2)
            .all(|w| (w[0] - 1.0).abs() <= (w[1] - 1.0).abs()));
        assert!((ratios[0] - 1.0).abs() < 1e-5);
    }

    #[test]
    fn curve_translation_property() {
        let c = cfg();
        let e2 = 2f64.exp();
        for rho in [0.05, 1.0, 30.0] {
            let m = mass_of_density(&mb3(), rho * e2, &c).unwrap();
            let traj = integrate_trajectory(&mb3(), rho, c.s_start, 1.0, &c).unwrap();
            let shifted = sphere_measure(3) * traj.final_state().x;
            assert!(rel(m, shifted) < 1e-6);
        }
    }

    #[test]
    fn curve_is_deterministic() {
        let c = cfg();
        let model = ModelSpec::simplified_fd(3, 1e-2).unwrap();
        let a = mass_curve(&model, 1e-1, 1e3, 4, &c).unwrap();
        let b = mass_curve(&model, 1e-1, 1e3, 4, &c).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn fd_curve_within_uniform_gap() {
        let c = cfg();
        let sigma = sphere_measure(3);
        let fd = ModelSpec::simplified_fd(3, 1e-3).unwrap();
        for rho in [1e-2, 1.0, 1e2, 1e4] {
            let gap = convergence_study(3, StatisticsKind::SimplifiedFermiDirac, rho, &[1e-3], &c)
                .unwrap()[0]
                .sup_uniform_gap;
            let diff =
                mass_of_density(&fd, rho, &c).unwrap() - mass_of_density(&mb3(), rho, &c).unwrap();
            assert!(diff.abs() <= sigma * gap * (1.0 + 1e-9));
        }
    }

    #[test]
    fn convergence_examples() {
        let c = cfg();
        let etas = [1e-2, 1e-3, 1e-4];
        let reports =
            convergence_study(3, StatisticsKind::SimplifiedFermiDirac, 1.0, &etas, &c).unwrap();
        assert_eq!(reports.iter().map(|r| r.eta).collect::<Vec<_>>(), etas);
        for r in &reports {
            assert!(r.a_eta >= 0.0 && 3.0 * r.a_eta <= r.b_eta * (1.0 + 1e-6));
        }
        assert!(reports.windows(2).all(|w| w[1].b_eta < w[0].b_eta));
        assert!(reports
            .windows(2)
            .all(|w| w[1].sup_uniform_gap < w[0].sup_uniform_gap));
        assert!(reports[2].sup_uniform_gap <= 1e-3);
        let kappas: Vec<f64> = reports.iter().map(|r| r.kappa_emp).collect();
        let spread = kappas.iter().cloned().fold(0.0, f64::max)
            / kappas.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(spread < 4.0);
        let slope = convergence_order(&reports).unwrap();
        assert!((0.8..=1.2).contains(&slope), "{slope}");
    }

    #[test]
    fn convergence_grid_doubling() {
        let c = cfg();
        let fine = NumericsConfig {
            grid_points: 2 * c.grid_points,
            ..c
        };
        let etas = [1e-2, 1e-3];
        let kind = StatisticsKind::SimplifiedFermiDirac;
        let a = convergence_study(3, kind, 1.0, &etas, &c).unwrap();
        let b = convergence_study(3, kind, 1.0, &etas, &fine).unwrap();
        for (r, s) in a.iter().zip(&b) {
            assert!(rel(r.a_eta, s.a_eta) < 0.01);
            assert!(rel(r.b_eta, s.b_eta) < 0.01);
            assert!(rel(r.sup_uniform_gap, s.sup_uniform_gap) < 0.01);
        }
    }

    #[test]
    fn convergence_validation() {
        let c = cfg();
        let kind = StatisticsKind::SimplifiedFermiDirac;
        assert!(convergence_study(3, kind, 1.0, &[1e-3, 1e-2], &c).is_err());
        assert!(convergence_study(3, kind, 1.0, &[2.0], &c).is_err());
        assert!(convergence_study(3, StatisticsKind::MaxwellBoltzmann, 1.0, &[1e-2], &c).is_err());
        let one = convergence_study(3, kind, 1.0, &[1e-2], &c).unwrap();
        assert_eq!(one.len(), 1);
        assert!(convergence_order(&one).is_none());
    }

    #[test]
    fn full_fd_convergence_is_ordered() {
        let c = cfg();
        let reports =
            convergence_study(3, StatisticsKind::FermiDirac, 1.0, &[1e-1, 1e-2], &c).unwrap();
        assert!(reports[1].b_eta < reports[0].b_eta);
        assert!(reports
            .iter()
            .all(|r| 3.0 * r.a_eta <= r.b_eta * (1.0 + 1e-6)));
    }

    #[test]
    fn apriori_examples() {
        let c = cfg();
        let mb = apriori_bound_audit(&mb3(), 1.0, 1.0, &c).unwrap();
        assert!(mb.pass && mb.s_bar == 0.0 && mb.max_relative_violation == 0.0);

        let sfd = ModelSpec::simplified_fd(3, 1e-2).unwrap();
        let r = apriori_bound_audit(&sfd, 1.0, 1.0, &c).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.max_ratio <= 1.0 + 1e-6 && r.max_ratio > 0.9);
        let r = apriori_bound_audit(&sfd, 2.0, 0.5, &c).unwrap();
        assert!(r.pass);

        let ffd = ModelSpec::full_fd(3, 1e-2).unwrap();
        assert!(apriori_bound_audit(&ffd, 1.0, 1.0, &c).unwrap().pass);

        let bars: Vec<f64> = [1e-1, 1e-2, 1e-3]
            .iter()
            .map(|&eta| s_bar(&ModelSpec::simplified_fd(3, eta).unwrap(), 1.0, &c).unwrap())
            .collect();
        assert!(bars.windows(2).all(|w| w[1] < w[0]));
        assert!(apriori_bound_audit(&sfd, 1.0, 2.0, &c).is_err());
    }

    #[test]
    fn difference_system() {
        let c = cfg();
        let mb = integrate_trajectory(&mb3(), 1.0, c.s_start, 0.0, &c).unwrap();
        let same = difference_residual_audit(&mb, &mb, &c).unwrap();
        assert!(same.pass);
        assert_eq!(
            (same.max_residual_w, same.max_residual_v, same.points),
            (0.0, 0.0, 0)
        );

        let mut sources = Vec::new();
        for eta in [1e-2, 1e-3] {
            let sfd = ModelSpec::simplified_fd(3, eta).unwrap();
            let fd = integrate_trajectory(&sfd, 1.0, c.s_start, 0.0, &c).unwrap();
            let r = difference_residual_audit(&fd, &mb, &c).unwrap();
            assert!(r.pass, "eta {eta}: {r:?}");
            assert!(r.points > 100);
            assert!(r.max_residual_v_negated_source > 0.1);
            sources.push(r.source_sup);
        }
        let drop = sources[0] / sources[1];
        assert!((5.0..=20.0).contains(&drop), "{drop}");

        let other = integrate_trajectory(&mb3(), 2.0, c.s_start, 0.0, &c).unwrap();
        assert!(matches!(
            difference_residual_audit(&other, &mb, &c),
            Err(Error::GridMismatch(_))
        ));
    }

    #[test]
    fn multiplicity_transfers_to_simplified_fd() {
        let c = cfg();
        let target = 2.0 * sphere_measure(3);
        let base = count_solutions(&mass_curve(&mb3(), 1e-2, 1e8, 16, &c).unwrap(), target, &c)
            .unwrap()
            .multiplicity;
        let counts: Vec<usize> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&eta| {
                let model = ModelSpec::simplified_fd(3, eta).unwrap();
                let curve = mass_curve(&model, 1e-2, 1e8, 16, &c).unwrap();
                count_solutions(&curve, target, &c).unwrap().multiplicity
            })
            .collect();
        assert!(
            (0..counts.len()).any(|k| counts[k..].iter().all(|&n| n == base)),
            "MB {base}, FD {counts:?}"
        );
    }
}
