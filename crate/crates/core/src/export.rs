//! Flat-file artifacts. Floats are written with 17 significant digits, which
//! round-trips every `f64`.

use crate::bifurcation::MassCurve;
use crate::dynamics::{lyapunov_log_y, to_radial, Trajectory};
use crate::error::{Error, Result};

/// `v` in scientific notation with 17 significant digits.
pub fn float17(v: f64) -> String {
    format!("{v:.16e}")
}

fn push_row(out: &mut String, values: &[f64]) {
    let row: Vec<String> = values.iter().map(|&v| float17(v)).collect();
    out.push_str(&row.join(","));
    out.push('\n');
}

/// `rho,mass` rows in increasing `rho`.
pub fn mass_curve_csv(curve: &MassCurve) -> String {
    let mut out = String::from("rho,mass\n");
    for p in &curve.points {
        push_row(&mut out, &[p.rho, p.mass]);
    }
    out
}

/// One row per grid point: `s,x,y,r,Q,Qprime,density`, plus `lyapunov` for
/// the autonomous model.
pub fn trajectory_csv(traj: &Trajectory, grid: &[f64]) -> Result<String> {
    let d = traj.model().d();
    let with_lyapunov = traj.model().is_identity();
    let mut out = String::from("s,x,y,r,Q,Qprime,density");
    if with_lyapunov {
        out.push_str(",lyapunov");
    }
    out.push('\n');
    for &s in grid {
        let missing = || Error::GridMismatch(format!("s = {s} outside trajectory range"));
        let state = traj.at(s).ok_or_else(missing)?;
        let density = traj.density_at(s).ok_or_else(missing)?;
        let radial = to_radial(state, d)?;
        let mut row = vec![
            s,
            state.x,
            state.y,
            radial.r,
            radial.q,
            radial.q_prime,
            density,
        ];
        if with_lyapunov {
            row.push(lyapunov_log_y(
                d,
                state.x,
                traj.ln_y_at(s).ok_or_else(missing)?,
            ));
        }
        push_row(&mut out, &row);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bifurcation::mass_curve;
    use crate::dynamics::integrate_trajectory;
    use crate::models::ModelSpec;
    use crate::numerics::{linspace, NumericsConfig};

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, 2.0f64.sqrt(), 1e-300, 6.02214076e23, -0.0] {
            let text = float17(v);
            assert_eq!(text.parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
        assert_eq!(float17(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn curve_csv_layout() {
        let c = NumericsConfig::default();
        let curve =
            mass_curve(&ModelSpec::maxwell_boltzmann(3).unwrap(), 1.0, 10.0, 4, &c).unwrap();
        let csv = mass_curve_csv(&curve);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "rho,mass");
        assert_eq!(lines.len(), 6);
        let first: Vec<f64> = lines[1].split(',').map(|t| t.parse().unwrap()).collect();
        assert_eq!(first, vec![curve.points[0].rho, curve.points[0].mass]);
    }

    #[test]
    fn trajectory_csv_layout() {
        let c = NumericsConfig::default();
        let mb = ModelSpec::maxwell_boltzmann(3).unwrap();
        let traj = integrate_trajectory(&mb, 1.0, -20.0, 30.0, &c).unwrap();
        let csv = trajectory_csv(&traj, &linspace(-20.0, 30.0, 11)).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "s,x,y,r,Q,Qprime,density,lyapunov");
        let last: Vec<f64> = lines[11].split(',').map(|t| t.parse().unwrap()).collect();
        assert_eq!(last.len(), 8);
        assert!((last[1] - 2.0).abs() < 1e-3 && (last[2] - 2.0).abs() < 1e-3);

        let sfd = ModelSpec::simplified_fd(3, 1e-2).unwrap();
        let traj = integrate_trajectory(&sfd, 1.0, -20.0, 0.0, &c).unwrap();
        let csv = trajectory_csv(&traj, &linspace(-20.0, 0.0, 3)).unwrap();
        assert!(csv.starts_with("s,x,y,r,Q,Qprime,density\n"));
        assert!(trajectory_csv(&traj, &[1.0]).is_err());
    }
}
