use fermicloud::bifurcation::{
    convergence_order, convergence_study, count_solutions, mass_curve, ConvergenceReport,
};
use fermicloud::dynamics::{integrate_trajectory, radial_q_integrate};
use fermicloud::export::{mass_curve_csv, trajectory_csv};
use fermicloud::numerics::linspace;
use serde::Serialize;

use crate::config::{CommandName, Format, RunConfig};
use crate::error::CliError;

/// Artifact text plus a short human-readable summary.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub artifact: String,
    pub summary: String,
}

#[derive(Serialize)]
struct Artifact<'a, T: Serialize> {
    config: &'a RunConfig,
    #[serde(flatten)]
    body: T,
}

fn to_json<T: Serialize>(config: &RunConfig, body: T) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(&Artifact { config, body })
        .map_err(|e| CliError::Config(format!("cannot serialize artifact: {e}")))?;
    text.push('\n');
    Ok(text)
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cfg.command {
        CommandName::MassCurve => cmd_mass_curve(cfg),
        CommandName::Phase => cmd_phase(cfg),
        CommandName::Multiplicity => cmd_multiplicity(cfg),
        CommandName::Converge => cmd_converge(cfg),
        CommandName::Crosscheck => cmd_crosscheck(cfg),
    }
}

fn cmd_mass_curve(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let model = cfg.model_spec()?;
    let curve = mass_curve(
        &model,
        cfg.rho_min,
        cfg.rho_max,
        cfg.points_per_decade,
        &cfg.numerics,
    )?;
    let artifact = match cfg.format {
        Format::Csv => mass_curve_csv(&curve),
        Format::Json => to_json(cfg, &curve)?,
    };
    let mut summary = format!("{model}: {} points", curve.points.len());
    if let Some((lo, hi)) = curve.mass_range() {
        summary += &format!(", mass in [{lo:.6e}, {hi:.6e}]");
    }
    let crossings = curve
        .points
        .windows(2)
        .filter(|w| (w[0].mass - cfg.mass) * (w[1].mass - cfg.mass) < 0.0)
        .count();
    summary += &format!(", {crossings} crossings of M = {:.6e}", cfg.mass);
    if !curve.is_complete() {
        summary += &format!(", {} failed points", curve.gaps.len());
    }
    Ok(Outcome { artifact, summary })
}

fn cmd_phase(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let model = cfg.model_spec()?;
    let s0 = cfg.numerics.s_start;
    let traj = integrate_trajectory(&model, cfg.rho, s0, cfg.s_end, &cfg.numerics)?;
    let artifact = trajectory_csv(&traj, &linspace(s0, cfg.s_end, cfg.numerics.grid_points))?;
    let end = traj.final_state();
    let summary = format!(
        "{model}, rho = {}: (x, y) = ({:.9}, {:.9}) at s = {}",
        cfg.rho, end.x, end.y, end.s
    );
    Ok(Outcome { artifact, summary })
}

fn cmd_multiplicity(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let model = cfg.model_spec()?;
    let curve = mass_curve(
        &model,
        cfg.rho_min,
        cfg.rho_max,
        cfg.points_per_decade,
        &cfg.numerics,
    )?;
    let result = count_solutions(&curve, cfg.mass, &cfg.numerics)?;
    let summary = format!(
        "{model}: {} solutions of mass {:.6e} for rho in [{}, {}]",
        result.multiplicity, cfg.mass, cfg.rho_min, cfg.rho_max
    );
    Ok(Outcome {
        artifact: to_json(cfg, &result)?,
        summary,
    })
}

#[derive(Serialize)]
struct ConvergeBody<'a> {
    reports: &'a [ConvergenceReport],
    /// Slope of log B_η against log η.
    order: Option<f64>,
}

fn cmd_converge(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let reports = convergence_study(
        cfg.model.d,
        cfg.model.kind,
        cfg.rho,
        &cfg.etas,
        &cfg.numerics,
    )?;
    let order = convergence_order(&reports);
    let mut summary = format!("{} reports", reports.len());
    if let Some(p) = order {
        summary += &format!(", log B_eta / log eta slope {p:.4}");
    }
    Ok(Outcome {
        artifact: to_json(
            cfg,
            ConvergeBody {
                reports: &reports,
                order,
            },
        )?,
        summary,
    })
}

#[derive(Serialize)]
#[allow(non_snake_case)]
struct CrosscheckBody {
    x0: f64,
    Q1: f64,
    rel_diff: f64,
    y0: f64,
    Qprime1: f64,
    rel_diff_prime: f64,
}

fn cmd_crosscheck(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let model = cfg.model_spec()?;
    let traj = integrate_trajectory(&model, cfg.rho, cfg.numerics.s_start, 0.0, &cfg.numerics)?;
    let end = traj.final_state();
    let (q1, qp1) = radial_q_integrate(&model, cfg.rho, cfg.r0, &cfg.numerics)?;
    let body = CrosscheckBody {
        x0: end.x,
        Q1: q1,
        rel_diff: ((q1 - end.x) / end.x).abs(),
        y0: end.y,
        Qprime1: qp1,
        rel_diff_prime: ((qp1 - end.y) / end.y).abs(),
    };
    let summary = format!(
        "{model}, rho = {}: x(0) = {:.12}, Q(1) = {:.12}, relative difference {:.3e}",
        cfg.rho, body.x0, body.Q1, body.rel_diff
    );
    Ok(Outcome {
        artifact: to_json(cfg, body)?,
        summary,
    })
}
