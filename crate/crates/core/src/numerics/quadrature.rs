#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};
use crate::numerics::NumericsConfig;

// 21-point Gauss–Kronrod rule (QUADPACK qk21). Abscissae are listed from the
// outside in; odd indices are shared with the embedded 10-point Gauss rule.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_931_715_390,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

const MAX_SUBDIVISIONS: usize = 4000;
const MAX_TAIL_PANELS: usize = 400;

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Segment> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |x: f64| -> Result<f64> {
        let v = f(x);
        if v.is_nan() {
            Err(Error::NanIntegrand { x })
        } else {
            Ok(v)
        }
    };

    let fc = eval(center)?;
    let mut res_k = WGK[10] * fc;
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Segment { a, b, value, err })
}

/// Globally adaptive Gauss–Kronrod integration of `f` over `[a, b]`.
///
/// Stops once the summed error estimate is below `max(abs_tol, rel_tol·|value|)`.
/// Returns `(value, err_est)`.
pub fn integrate_finite<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<(f64, f64)> {
    if a == b {
        return Ok((0.0, 0.0));
    }
    let first = gk21(&f, a, b)?;
    let mut segments = vec![first];
    let mut total = first.value;
    let mut total_err = first.err;

    while total_err > abs_tol.max(rel_tol * total.abs()) {
        if segments.len() >= MAX_SUBDIVISIONS {
            return Err(Error::QuadratureNonConvergence {
                value: total,
                err_est: total_err,
            });
        }
        let (worst, _) =
            segments
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |(bi, be), (i, s)| {
                    if s.err > be {
                        (i, s.err)
                    } else {
                        (bi, be)
                    }
                });
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a.min(seg.b) || mid >= seg.a.max(seg.b) {
            // Interval can no longer be bisected in floating point.
            return Err(Error::QuadratureNonConvergence {
                value: total,
                err_est: total_err,
            });
        }
        let left = gk21(&f, seg.a, mid)?;
        let right = gk21(&f, mid, seg.b)?;
        segments.push(left);
        segments.push(right);
        // Re-sum in a fixed order so results do not depend on accumulated drift.
        total = segments.iter().map(|s| s.value).sum();
        total_err = segments.iter().map(|s| s.err).sum();
    }
    Ok((total, total_err))
}

/// Integrates `f` over `[0, ∞)`.
///
/// The finite part `[0, split_point]` is integrated adaptively; the tail is
/// covered by panels of doubling width until a panel's contribution drops
/// below the tolerance. The integrand must be eventually decreasing.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(
    f: F,
    split_point: f64,
    cfg: &NumericsConfig,
) -> Result<(f64, f64)> {
    let split = split_point.max(0.0);
    let rel_tol = cfg.quad_rel_tol;
    let (mut total, mut total_err) = integrate_finite(&f, 0.0, split, rel_tol, 0.0)?;

    let mut start = split;
    let mut width = 1.0_f64.max(0.05 * split);
    let mut previous = f64::INFINITY;
    for _ in 0..MAX_TAIL_PANELS {
        let end = start + width;
        let abs_tol = 0.25 * rel_tol * total.abs();
        let (v, e) = integrate_finite(&f, start, end, rel_tol, abs_tol)?;
        total += v;
        total_err += e;
        let small = v.abs() <= 0.5 * rel_tol * total.abs() || (v == 0.0 && total == 0.0);
        if small && v.abs() <= previous {
            return Ok((total, total_err));
        }
        previous = v.abs();
        start = end;
        width *= 2.0;
        if !start.is_finite() {
            break;
        }
    }
    Err(Error::QuadratureNonConvergence {
        value: total,
        err_est: total_err,
    })
}
