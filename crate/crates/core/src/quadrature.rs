//! Adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Global adaptive bisection: the interval with the largest error estimate is
//! split until the summed error meets `max(abs, rel * |value|)`. Semi-infinite
//! integrals are truncated by interval doubling at the radius where the
//! integrand has fallen below a fixed fraction of its observed peak.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Integrand fraction of the observed peak below which a semi-infinite
/// integral is truncated.
pub const TAIL_PEAK_RATIO: f64 = 1e-16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-15,
            rel: 1e-12,
            max_intervals: 4000,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tolerance {
            abs,
            rel,
            ..Default::default()
        }
    }
}

/// Result of a quadrature: value plus an error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

impl std::ops::Add for Integral {
    type Output = Integral;
    fn add(self, rhs: Integral) -> Integral {
        Integral {
            value: self.value + rhs.value,
            abs_error: self.abs_error + rhs.abs_error,
            evaluations: self.evaluations + rhs.evaluations,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_g = fc * WG[3];
    let mut res_k = fc * WGK[7];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = res_k * 0.5;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let abs_half = half.abs();
    let value = res_k * half;
    let error = rescale_error((res_k - res_g) * half, res_abs * abs_half, res_asc * abs_half);
    Segment { a, b, value, error }
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Integral> {
    integrate_with_breaks(f, &[a, b], tol)
}

/// Integrates `f` over `[points[0], points[last]]`, starting the adaptive
/// refinement from the given breakpoints (kinks, branch changes).
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    tol: Tolerance,
) -> Result<Integral> {
    if points.len() < 2 {
        return Err(Error::invalid("quadrature needs at least two breakpoints"));
    }
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0usize;
    for w in points.windows(2) {
        if w[1] < w[0] {
            return Err(Error::invalid("quadrature breakpoints must be sorted"));
        }
        if w[1] > w[0] {
            heap.push(gk15(&f, w[0], w[1]));
            evaluations += 15;
        }
    }
    loop {
        let value: f64 = heap.iter().map(|s| s.value).sum();
        let error: f64 = heap.iter().map(|s| s.error).sum();
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::Quadrature {
                estimate: value,
                residual: error,
            });
        }
        if error <= tol.abs.max(tol.rel * value.abs()) {
            return Ok(Integral {
                value,
                abs_error: error,
                evaluations,
            });
        }
        if heap.len() >= tol.max_intervals {
            return Err(Error::Quadrature {
                estimate: value,
                residual: error,
            });
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval exhausted at machine precision.
            return Err(Error::Quadrature {
                estimate: value,
                residual: error,
            });
        }
        heap.push(gk15(&f, worst.a, mid));
        heap.push(gk15(&f, mid, worst.b));
        evaluations += 30;
    }
}

/// Smallest radius `R = 2^k >= 1` beyond which `|f|` stays below
/// `ratio * peak` on a sample grid of the last doubling window.
pub fn truncation_radius<F: Fn(f64) -> f64>(f: &F, ratio: f64) -> Result<f64> {
    const SAMPLES: usize = 64;
    let mut peak = 0.0f64;
    for k in 0..=SAMPLES {
        peak = peak.max(f(k as f64 / SAMPLES as f64).abs());
    }
    let mut radius = 1.0f64;
    loop {
        let lo = radius;
        radius *= 2.0;
        let mut window_max = 0.0f64;
        for k in 0..=SAMPLES {
            let v = f(lo + (radius - lo) * k as f64 / SAMPLES as f64).abs();
            window_max = window_max.max(v);
        }
        peak = peak.max(window_max);
        if window_max <= ratio * peak {
            return Ok(radius);
        }
        if radius > 1e9 {
            return Err(Error::Divergent(format!(
                "integrand does not decay: |f| = {window_max:e} near r = {radius:e}"
            )));
        }
    }
}

/// Integrates `f` over `[0, inf)` by truncation at [`truncation_radius`].
/// Returns the integral over the truncated range and the cutoff used.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(f: F, tol: Tolerance) -> Result<(Integral, f64)> {
    let cutoff = truncation_radius(&f, TAIL_PEAK_RATIO)?;
    // Seed with a geometric grid so narrow peaks near the origin are resolved.
    let mut points = vec![0.0];
    let mut x = cutoff;
    let mut rev = Vec::new();
    while x > 1e-3 {
        rev.push(x);
        x *= 0.5;
    }
    points.extend(rev.into_iter().rev());
    let integral = integrate_with_breaks(f, &points, tol)?;
    Ok((integral, cutoff))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x| x * x, 0.0, 3.0, Tolerance::default()).unwrap();
        assert!((r.value - 9.0).abs() < 1e-13);
    }

    #[test]
    fn gaussian_half_line() {
        let (r, cutoff) = integrate_semi_infinite(|x| (-x * x).exp(), Tolerance::default()).unwrap();
        let exact = std::f64::consts::PI.sqrt() / 2.0;
        assert!((r.value - exact).abs() < 1e-12, "{} vs {}", r.value, exact);
        assert!(cutoff >= 4.0);
    }

    #[test]
    fn kink_with_breakpoint() {
        let f = |x: f64| (x - 0.3).abs();
        let r = integrate_with_breaks(f, &[0.0, 0.3, 1.0], Tolerance::default()).unwrap();
        assert!((r.value - (0.045 + 0.245)).abs() < 1e-14);
    }

    #[test]
    fn sqrt_singularity_converges() {
        let r = integrate(|x: f64| x.sqrt(), 0.0, 1.0, Tolerance::new(1e-12, 1e-10)).unwrap();
        assert!((r.value - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn non_decaying_integrand_is_divergent() {
        let err = integrate_semi_infinite(|_| 1.0, Tolerance::default()).unwrap_err();
        assert!(matches!(err, Error::Divergent(_)));
    }

    #[test]
    fn budget_exhaustion_reports_residual() {
        let tol = Tolerance {
            abs: 0.0,
            rel: 1e-15,
            max_intervals: 3,
        };
        let err = integrate(|x: f64| (1.0 / x).sin(), 1e-3, 1.0, tol).unwrap_err();
        assert!(matches!(err, Error::Quadrature { residual, .. } if residual > 0.0));
    }
}
