use crate::error::{Error, Result};
use crate::numerics::NumericsConfig;

// Dormand–Prince 5(4) tableau with Hairer's fourth-order continuous extension.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const BLOW_UP: f64 = 1e300;
const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;

/// Dense-output coefficients for one accepted step.
#[derive(Debug, Clone)]
struct Segment<const N: usize> {
    t0: f64,
    h: f64,
    r: [[f64; N]; 5],
}

impl<const N: usize> Segment<N> {
    fn eval(&self, t: f64) -> [f64; N] {
        let theta = (t - self.t0) / self.h;
        let theta1 = 1.0 - theta;
        let mut out = [0.0; N];
        for (i, o) in out.iter_mut().enumerate() {
            let r = &self.r;
            *o = r[0][i]
                + theta * (r[1][i] + theta1 * (r[2][i] + theta * (r[3][i] + theta1 * r[4][i])));
        }
        out
    }
}

/// Accepted steps of an adaptive integration together with a continuous
/// fourth-order interpolant between them.
#[derive(Debug, Clone)]
pub struct OdeSolution<const N: usize> {
    ts: Vec<f64>,
    ys: Vec<[f64; N]>,
    segments: Vec<Segment<N>>,
}

impl<const N: usize> OdeSolution<N> {
    /// Step times, starting at `t0` and ending exactly at `t1`.
    pub fn times(&self) -> &[f64] {
        &self.ts
    }

    pub fn states(&self) -> &[[f64; N]] {
        &self.ys
    }

    pub fn t_start(&self) -> f64 {
        self.ts[0]
    }

    pub fn t_end(&self) -> f64 {
        *self.ts.last().expect("solution has at least one point")
    }

    pub fn last(&self) -> [f64; N] {
        *self.ys.last().expect("solution has at least one point")
    }

    /// Dense evaluation at `t`; `None` outside the integrated range.
    pub fn eval(&self, t: f64) -> Option<[f64; N]> {
        let (lo, hi) = if self.t_start() <= self.t_end() {
            (self.t_start(), self.t_end())
        } else {
            (self.t_end(), self.t_start())
        };
        if !(t >= lo && t <= hi) {
            return None;
        }
        if self.segments.is_empty() {
            return Some(self.ys[0]);
        }
        let forward = self.t_end() >= self.t_start();
        // Index of the first step time strictly beyond t in the direction of travel.
        let idx = self
            .ts
            .partition_point(|&ti| if forward { ti <= t } else { ti >= t });
        let seg = idx.saturating_sub(1).min(self.segments.len() - 1);
        if t == self.ts[seg] {
            return Some(self.ys[seg]);
        }
        Some(self.segments[seg].eval(t))
    }
}

fn weighted_rms<const N: usize>(
    err: &[f64; N],
    y0: &[f64; N],
    y1: &[f64; N],
    cfg: &NumericsConfig,
) -> f64 {
    let sum: f64 = (0..N)
        .map(|i| {
            let sc = cfg.ode_abs_tol + cfg.ode_rel_tol * y0[i].abs().max(y1[i].abs());
            (err[i] / sc).powi(2)
        })
        .sum();
    (sum / N as f64).sqrt()
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        *o += h * acc;
    }
    out
}

fn check_finite<const N: usize>(t: f64, k: [f64; N]) -> Result<[f64; N]> {
    if k.iter().all(|v| v.is_finite()) {
        Ok(k)
    } else {
        Err(Error::NonFinite { t })
    }
}

/// Integrates `u' = field(t, u)` from `t0` to `t1` (either direction) with an
/// adaptive Dormand–Prince 5(4) scheme.
///
/// Local error is controlled per component by `ode_abs_tol + ode_rel_tol·|u|`.
/// A component exceeding 1e300 in magnitude aborts with [`Error::BlowUp`]
/// carrying the last accepted state.
pub fn ode_integrate<const N: usize, F>(
    field: F,
    t0: f64,
    u0: [f64; N],
    t1: f64,
    cfg: &NumericsConfig,
) -> Result<OdeSolution<N>>
where
    F: Fn(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let mut ts = vec![t0];
    let mut ys = vec![u0];
    let mut segments = Vec::new();
    if t0 == t1 {
        return Ok(OdeSolution { ts, ys, segments });
    }
    let dir = (t1 - t0).signum();
    let span = (t1 - t0).abs();

    let mut t = t0;
    let mut y = u0;
    let mut k1 = check_finite(t, field(t, &y)?)?;
    let mut h = initial_step(&field, t, &y, &k1, dir, span, cfg)?;
    let mut steps = 0usize;
    let mut rejected_last = false;

    loop {
        if steps >= cfg.max_steps {
            return Err(Error::StepOverflow {
                max_steps: cfg.max_steps,
                t,
            });
        }
        let remaining = (t1 - t).abs();
        let last = h.abs() >= remaining;
        if last {
            h = dir * remaining;
        }
        if h.abs() <= 16.0 * f64::EPSILON * t.abs().max(1.0) && !last {
            return Err(Error::StepUnderflow { t });
        }

        let y2 = axpy(&y, h, &[(A21, &k1)]);
        let k2 = check_finite(t, field(t + C2 * h, &y2)?)?;
        let y3 = axpy(&y, h, &[(A31, &k1), (A32, &k2)]);
        let k3 = check_finite(t, field(t + C3 * h, &y3)?)?;
        let y4 = axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
        let k4 = check_finite(t, field(t + C4 * h, &y4)?)?;
        let y5 = axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
        let k5 = check_finite(t, field(t + C5 * h, &y5)?)?;
        let y6 = axpy(
            &y,
            h,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        );
        let k6 = check_finite(t, field(t + h, &y6)?)?;
        let y_new = axpy(
            &y,
            h,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        let t_new = if last { t1 } else { t + h };
        let k7 = check_finite(t, field(t_new, &y_new)?)?;

        let mut err = [0.0; N];
        for i in 0..N {
            err[i] =
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let err_norm = weighted_rms(&err, &y, &y_new, cfg);
        steps += 1;

        if err_norm <= 1.0 {
            if y_new.iter().any(|v| v.abs() > BLOW_UP) {
                return Err(Error::BlowUp {
                    t,
                    state: y.to_vec(),
                });
            }
            let mut r = [[0.0; N]; 5];
            for i in 0..N {
                let diff = y_new[i] - y[i];
                let bspl = h * k1[i] - diff;
                r[0][i] = y[i];
                r[1][i] = diff;
                r[2][i] = bspl;
                r[3][i] = diff - h * k7[i] - bspl;
                r[4][i] = h
                    * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
            }
            segments.push(Segment { t0: t, h, r });
            t = t_new;
            y = y_new;
            k1 = k7;
            ts.push(t);
            ys.push(y);
            if last {
                return Ok(OdeSolution { ts, ys, segments });
            }
            let mut factor = if err_norm == 0.0 {
                MAX_FACTOR
            } else {
                (SAFETY * err_norm.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
            };
            if rejected_last {
                factor = factor.min(1.0);
            }
            rejected_last = false;
            h *= factor;
        } else {
            rejected_last = true;
            h *= (SAFETY * err_norm.powf(-0.2)).clamp(MIN_FACTOR, 1.0);
        }
    }
}

fn initial_step<const N: usize, F>(
    field: &F,
    t: f64,
    y: &[f64; N],
    f0: &[f64; N],
    dir: f64,
    span: f64,
    cfg: &NumericsConfig,
) -> Result<f64>
where
    F: Fn(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let scale = |i: usize| cfg.ode_abs_tol + cfg.ode_rel_tol * y[i].abs();
    let norm = |v: &[f64; N]| -> f64 {
        ((0..N).map(|i| (v[i] / scale(i)).powi(2)).sum::<f64>() / N as f64).sqrt()
    };
    let d0 = norm(y);
    let d1 = norm(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let h0 = h0.min(span);
    let y1 = axpy(y, dir * h0, &[(1.0, f0)]);
    let f1 = check_finite(t, field(t + dir * h0, &y1)?)?;
    let mut diff = [0.0; N];
    for i in 0..N {
        diff[i] = f1[i] - f0[i];
    }
    let d2 = norm(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    Ok(dir * (100.0 * h0).min(h1).min(span))
}
