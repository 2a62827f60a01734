//! Deterministic numerical kernels: semi-infinite quadrature, bracketed
//! root-finding and an adaptive Dormand–Prince integrator with dense output.

mod ode;
mod quadrature;
mod roots;

pub use ode::{ode_integrate, OdeSolution};
pub use quadrature::{integrate_finite, integrate_semi_infinite};
pub use roots::{find_root_monotone, golden_section_max};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances and grid policies shared by every computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NumericsConfig {
    pub quad_rel_tol: f64,
    /// Distance past the Fermi edge at which semi-infinite integrals are split.
    pub quad_split_margin: f64,
    pub root_tol: f64,
    pub ode_rel_tol: f64,
    pub ode_abs_tol: f64,
    pub max_steps: usize,
    /// Log-radius at which the asymptotic initial data is imposed.
    pub s_start: f64,
    /// Number of points of the shared uniform comparison grid on `[s_start, 0]`.
    pub grid_points: usize,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        Self {
            quad_rel_tol: 1e-10,
            quad_split_margin: 30.0,
            root_tol: 1e-12,
            ode_rel_tol: 1e-10,
            ode_abs_tol: 1e-14,
            max_steps: 1_000_000,
            s_start: -20.0,
            grid_points: 2000,
        }
    }
}

impl NumericsConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("quad_rel_tol", self.quad_rel_tol),
            ("quad_split_margin", self.quad_split_margin),
            ("root_tol", self.root_tol),
            ("ode_rel_tol", self.ode_rel_tol),
            ("ode_abs_tol", self.ode_abs_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.max_steps < 1 {
            return Err(Error::Config("max_steps must be at least 1".into()));
        }
        if !(self.s_start <= -10.0) {
            return Err(Error::Config(format!(
                "s_start must be <= -10 for the asymptotic initial data, got {}",
                self.s_start
            )));
        }
        if self.grid_points < 2 {
            return Err(Error::Config("grid_points must be at least 2".into()));
        }
        Ok(())
    }
}

/// `n` log-spaced points between `lo` and `hi`; the endpoints are exact.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let mut pts: Vec<f64> = linspace(lo.ln(), hi.ln(), n)
        .into_iter()
        .map(f64::exp)
        .collect();
    if let Some(first) = pts.first_mut() {
        *first = lo;
    }
    if n > 1 {
        pts[n - 1] = hi;
    }
    pts
}

/// `n` uniformly spaced points between `lo` and `hi`; the endpoints are exact.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}
