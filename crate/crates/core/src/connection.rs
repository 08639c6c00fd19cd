//! Connection functions `p(r)`, the sparsity schedule `s(n) = c n^(-beta)`,
//! and numeric checks of the integrability conditions on `p`.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::small_r_sphere_area;
use crate::quadrature::{integrate_semi_infinite, Tolerance};

/// Closed-form connection function families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum ConnectionProfile {
    /// `p(r) = exp(-r^2)`
    Rayleigh,
    /// `p(r) = exp(-r)`
    Exponential,
    /// `p(r) = q exp(-r^2)`, `q in (0, 1]`
    ScaledRayleigh { q: f64 },
}

/// Edge probability at one scaled distance, with accurate logarithms of both
/// outcomes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeProb {
    pub p: f64,
    /// `1 - p`, computed without cancellation.
    pub q: f64,
    /// `ln p` (may be `-inf` only when `p == 0` exactly).
    pub ln_p: f64,
    /// `ln (1 - p)`.
    pub ln_q: f64,
}

impl EdgeProb {
    /// Probability with both logs derived from `p` directly.
    pub fn from_p(p: f64) -> Self {
        let q = 1.0 - p;
        EdgeProb {
            p,
            q,
            ln_p: p.ln(),
            ln_q: (-p).ln_1p(),
        }
    }

    /// Binary entropy in bits, `0 log 0 = 0`.
    pub fn entropy_bits(&self) -> f64 {
        let a = if self.p > 0.0 { -self.p * self.ln_p } else { 0.0 };
        let b = if self.q > 0.0 { -self.q * self.ln_q } else { 0.0 };
        (a + b) / LN_2
    }

    /// `p (1-p) log2^2(p / (1-p))`, the conditional variance of the
    /// information content of one edge.
    pub fn log_odds_variance_bits(&self) -> f64 {
        if self.p <= 0.0 || self.q <= 0.0 {
            return 0.0;
        }
        let lo = (self.ln_p - self.ln_q) / LN_2;
        self.p * self.q * lo * lo
    }

    /// Information content (bits) of observing `edge`.
    pub fn surprisal_bits(&self, edge: bool) -> f64 {
        if edge {
            -self.ln_p / LN_2
        } else {
            -self.ln_q / LN_2
        }
    }
}

impl ConnectionProfile {
    pub fn scaled_rayleigh(q: f64) -> Result<Self> {
        if !(q > 0.0 && q <= 1.0) {
            return Err(Error::invalid(format!("scaled-rayleigh q={q} outside (0, 1]")));
        }
        Ok(ConnectionProfile::ScaledRayleigh { q })
    }

    /// Short identifier used in graph files and CSV output.
    pub fn name(&self) -> String {
        match self {
            ConnectionProfile::Rayleigh => "rayleigh".to_string(),
            ConnectionProfile::Exponential => "exponential".to_string(),
            ConnectionProfile::ScaledRayleigh { q } => format!("scaled-rayleigh:{q}"),
        }
    }

    /// Hölder constants `(L, alpha)` of `p`. Metadata only.
    pub fn holder(&self) -> (f64, f64) {
        let rayleigh_lipschitz = (2.0 / std::f64::consts::E).sqrt();
        match self {
            ConnectionProfile::Rayleigh => (rayleigh_lipschitz, 1.0),
            ConnectionProfile::Exponential => (1.0, 1.0),
            ConnectionProfile::ScaledRayleigh { q } => (q * rayleigh_lipschitz, 1.0),
        }
    }

    /// `-ln p(t)`.
    fn decay(&self, t: f64) -> f64 {
        match self {
            ConnectionProfile::Rayleigh => t * t,
            ConnectionProfile::Exponential => t,
            ConnectionProfile::ScaledRayleigh { q } => t * t - q.ln(),
        }
    }

    /// Edge probability at scaled distance `t = r / s`.
    #[inline]
    pub fn edge_prob(&self, t: f64) -> EdgeProb {
        match *self {
            ConnectionProfile::Rayleigh | ConnectionProfile::Exponential => {
                let g = self.decay(t);
                let q = -(-g).exp_m1();
                EdgeProb {
                    p: (-g).exp(),
                    q,
                    ln_p: -g,
                    ln_q: q.ln(),
                }
            }
            ConnectionProfile::ScaledRayleigh { q: scale } => {
                if scale == 1.0 {
                    return ConnectionProfile::Rayleigh.edge_prob(t);
                }
                let p = scale * (-t * t).exp();
                EdgeProb {
                    p,
                    q: 1.0 - p,
                    ln_p: scale.ln() - t * t,
                    ln_q: (-p).ln_1p(),
                }
            }
        }
    }

    /// `p(r / s)`.
    pub fn eval_p(&self, r: f64, s: f64) -> Result<f64> {
        if r < 0.0 || r.is_nan() {
            return Err(Error::domain(format!("negative distance {r}")));
        }
        if s <= 0.0 || s.is_nan() {
            return Err(Error::domain(format!("sparsity must be positive, got {s}")));
        }
        Ok(self.edge_prob(r / s).p)
    }

    /// Upper bound on `int_R^inf r^k exp(-g(r)) (1 + g(r))^m dr`, where
    /// `g = -ln p`.
    fn tail_bound(&self, k: u32, m: u32, radius: f64) -> f64 {
        let mut total = 0.0;
        match self {
            ConnectionProfile::Exponential => {
                for i in 0..=m {
                    total += binomial(m, i) * upper_gamma_integer(k + i, radius);
                }
            }
            ConnectionProfile::Rayleigh | ConnectionProfile::ScaledRayleigh { .. } => {
                let (scale, c0) = match self {
                    ConnectionProfile::ScaledRayleigh { q } => (*q, 1.0 - q.ln()),
                    _ => (1.0, 1.0),
                };
                for i in 0..=m {
                    let a = (k + 2 * i + 1) as f64 / 2.0;
                    total += binomial(m, i)
                        * c0.powi((m - i) as i32)
                        * 0.5
                        * upper_gamma_bound(a, radius * radius);
                }
                total *= scale;
            }
        }
        total
    }

    /// `int_0^inf r^power F(p(r)) dr` for one of the edge functionals, with a
    /// certified tail bound.
    pub fn radial_moment(&self, power: u32, functional: EdgeFunctional) -> Result<IntegralCheck> {
        let profile = *self;
        let integrand = move |r: f64| {
            let ep = profile.edge_prob(r);
            let v = match functional {
                EdgeFunctional::Entropy => ep.entropy_bits(),
                EdgeFunctional::EntropySquared => ep.entropy_bits().powi(2),
                EdgeFunctional::LogOddsVariance => ep.log_odds_variance_bits(),
            };
            if power == 0 {
                v
            } else {
                r.powi(power as i32) * v
            }
        };
        let (integral, cutoff) = integrate_semi_infinite(integrand, Tolerance::new(1e-300, 1e-11))?;
        let m = match functional {
            EdgeFunctional::Entropy => 1,
            EdgeFunctional::EntropySquared | EdgeFunctional::LogOddsVariance => 2,
        };
        let tail = self.tail_bound(power, m, cutoff) / LN_2.powi(m as i32);
        let finite = integral.value.is_finite() && tail.is_finite();
        Ok(IntegralCheck {
            value: integral.value,
            quadrature_error: integral.abs_error,
            tail_bound: tail,
            cutoff,
            finite,
        })
    }
}

impl fmt::Display for ConnectionProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for ConnectionProfile {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rayleigh" => Ok(ConnectionProfile::Rayleigh),
            "exponential" => Ok(ConnectionProfile::Exponential),
            other => {
                if let Some(q) = other.strip_prefix("scaled-rayleigh:") {
                    let q: f64 = q
                        .parse()
                        .map_err(|_| Error::invalid(format!("bad scaled-rayleigh q in '{other}'")))?;
                    ConnectionProfile::scaled_rayleigh(q)
                } else {
                    Err(Error::invalid(format!("unknown connection profile '{other}'")))
                }
            }
        }
    }
}

/// Functionals of the edge probability integrated against `r^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeFunctional {
    /// `h2(p)`
    Entropy,
    /// `h2(p)^2`
    EntropySquared,
    /// `p (1-p) log2^2(p / (1-p))`
    LogOddsVariance,
}

/// A numerically evaluated improper integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegralCheck {
    pub value: f64,
    pub quadrature_error: f64,
    /// Analytic bound on the neglected tail beyond `cutoff`.
    pub tail_bound: f64,
    pub cutoff: f64,
    pub finite: bool,
}

impl IntegralCheck {
    pub fn error_bound(&self) -> f64 {
        self.quadrature_error + self.tail_bound
    }
}

/// Values of the three integrability integrals for a profile in dimension `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub dimension: usize,
    /// `int r^(2d) h2(p(r)) dr`
    pub entropy_moment: IntegralCheck,
    /// `int r^(d-1) p (1-p) log2^2(p/(1-p)) dr`
    pub log_odds_moment: IntegralCheck,
    /// `omega_d int r^(d-1) h2(p(r)) dr`
    pub h_star: IntegralCheck,
}

impl AssumptionReport {
    pub fn all_finite(&self) -> bool {
        self.entropy_moment.finite && self.log_odds_moment.finite && self.h_star.finite
    }
}

pub fn check_assumptions(profile: &ConnectionProfile, d: usize) -> Result<AssumptionReport> {
    let omega = small_r_sphere_area(d)?;
    let entropy_moment = profile.radial_moment(2 * d as u32, EdgeFunctional::Entropy)?;
    let log_odds_moment = profile.radial_moment(d as u32 - 1, EdgeFunctional::LogOddsVariance)?;
    let base = profile.radial_moment(d as u32 - 1, EdgeFunctional::Entropy)?;
    let h_star = IntegralCheck {
        value: omega * base.value,
        quadrature_error: omega * base.quadrature_error,
        tail_bound: omega * base.tail_bound,
        ..base
    };
    Ok(AssumptionReport {
        dimension: d,
        entropy_moment,
        log_odds_moment,
        h_star,
    })
}

/// `s(n) = c n^(-beta)` in dimension `d`, restricted to the connectivity
/// regime `0 < beta d < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SparsitySchedule {
    c: f64,
    beta: f64,
    d: usize,
}

impl SparsitySchedule {
    pub fn new(c: f64, beta: f64, d: usize) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::invalid(format!("sparsity prefactor c={c} must be positive")));
        }
        if !(1..=3).contains(&d) {
            return Err(Error::UnsupportedDimension(d));
        }
        let exponent = beta * d as f64;
        if !(exponent > 0.0 && exponent < 1.0) {
            return Err(Error::invalid(format!(
                "beta*d = {exponent} outside the connectivity regime (0, 1)"
            )));
        }
        Ok(SparsitySchedule { c, beta, d })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    /// `beta * d`.
    pub fn regime_exponent(&self) -> f64 {
        self.beta * self.d as f64
    }

    pub fn sparsity(&self, n: usize) -> Result<f64> {
        if n < 2 {
            return Err(Error::invalid(format!("sparsity needs n >= 2, got {n}")));
        }
        Ok(self.c * (n as f64).powf(-self.beta))
    }

    /// `lim_n s(fraction * n)^d / s(n)^d = fraction^(-beta d)`.
    pub fn ratio_limit(&self, fraction: f64) -> f64 {
        fraction.powf(-self.regime_exponent())
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `Gamma(k+1, x) = k! e^-x sum_{j<=k} x^j / j!`.
fn upper_gamma_integer(k: u32, x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 1..=k {
        term *= x / j as f64;
        sum += term;
    }
    let factorial: f64 = (1..=k).map(|j| j as f64).product();
    factorial * (-x).exp() * sum
}

/// Upper bound on `Gamma(a, x)` for `x > a - 1`.
fn upper_gamma_bound(a: f64, x: f64) -> f64 {
    let lead = x.powf(a - 1.0) * (-x).exp();
    if a <= 1.0 {
        lead
    } else if x > a - 1.0 {
        lead / (1.0 - (a - 1.0) / x)
    } else {
        f64::INFINITY
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn eval_examples() {
        let r = ConnectionProfile::Rayleigh;
        assert_eq!(r.eval_p(0.0, 1.0).unwrap(), 1.0);
        assert!((r.eval_p(1.0, 1.0).unwrap() - (-1f64).exp()).abs() < 1e-15);
        assert!((r.eval_p(0.1, 0.1).unwrap() - (-1f64).exp()).abs() < 1e-15);
        assert!(matches!(r.eval_p(-1.0, 1.0), Err(Error::Domain(_))));
        assert!(r.eval_p(1.0, 0.0).is_err());
    }

    #[test]
    fn profiles_monotone_and_bounded() {
        for profile in [
            ConnectionProfile::Rayleigh,
            ConnectionProfile::Exponential,
            ConnectionProfile::scaled_rayleigh(0.4).unwrap(),
        ] {
            let mut prev = f64::INFINITY;
            for k in 0..2000 {
                let p = profile.eval_p(k as f64 * 0.005, 1.0).unwrap();
                assert!((0.0..=1.0).contains(&p));
                assert!(p <= prev, "{profile} not monotone at step {k}");
                prev = p;
            }
        }
    }

    #[test]
    fn edge_prob_accurate_near_origin() {
        let ep = ConnectionProfile::Rayleigh.edge_prob(1e-5);
        assert!((ep.q - 1e-10).abs() < 1e-20);
        assert!((ep.ln_q - (1e-10f64).ln()).abs() < 1e-8);
    }

    #[test]
    fn sparsity_examples() {
        let s = SparsitySchedule::new(1.0, 0.25, 2).unwrap();
        assert!((s.sparsity(16).unwrap() - 0.5).abs() < 1e-15);
        assert!((s.sparsity(256).unwrap() - 0.25).abs() < 1e-15);
        let s2 = SparsitySchedule::new(2.0, 0.25, 2).unwrap();
        assert!((s2.sparsity(16).unwrap() - 1.0).abs() < 1e-15);
        assert!(s.sparsity(1).is_err());
        let mut prev = f64::INFINITY;
        for n in 2..500 {
            let v = s.sparsity(n).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn schedule_rejects_out_of_regime() {
        assert!(SparsitySchedule::new(1.0, 0.5, 2).is_err());
        assert!(SparsitySchedule::new(1.0, 0.0, 2).is_err());
        assert!(SparsitySchedule::new(-1.0, 0.25, 2).is_err());
        assert!(SparsitySchedule::new(1.0, 0.3, 3).is_ok());
    }

    #[test]
    fn h_star_closed_forms() {
        let rep = check_assumptions(&ConnectionProfile::Rayleigh, 2).unwrap();
        let exact = PI.powi(3) / (6.0 * LN_2);
        assert!(((rep.h_star.value - exact) / exact).abs() < 1e-10);
        assert!((exact - 7.455434).abs() < 1e-6);
        assert!(rep.all_finite());

        let rep = check_assumptions(&ConnectionProfile::Exponential, 1).unwrap();
        let exact = PI * PI / (3.0 * LN_2);
        assert!(((rep.h_star.value - exact) / exact).abs() < 1e-10);
        assert!((exact - 4.74627).abs() < 1e-5);
    }

    #[test]
    fn tail_bounds_are_negligible() {
        for profile in [ConnectionProfile::Rayleigh, ConnectionProfile::Exponential] {
            for d in 1..=3 {
                let rep = check_assumptions(&profile, d).unwrap();
                for check in [rep.entropy_moment, rep.log_odds_moment, rep.h_star] {
                    assert!(check.tail_bound < 1e-10 * check.value.max(1.0), "{profile} d={d}: {check:?}");
                }
            }
        }
    }

    #[test]
    fn scaled_rayleigh_vanishes() {
        let mut prev = f64::INFINITY;
        for q in [1.0, 0.1, 1e-3, 1e-6] {
            let profile = ConnectionProfile::scaled_rayleigh(q).unwrap();
            let h = check_assumptions(&profile, 2).unwrap().h_star.value;
            assert!(h < prev);
            prev = h;
        }
        assert!(prev < 1e-3);
        assert!(ConnectionProfile::scaled_rayleigh(0.0).is_err());
        assert!(ConnectionProfile::scaled_rayleigh(1.5).is_err());
    }

    #[test]
    fn names_round_trip() {
        for profile in [
            ConnectionProfile::Rayleigh,
            ConnectionProfile::Exponential,
            ConnectionProfile::scaled_rayleigh(0.25).unwrap(),
        ] {
            assert_eq!(profile.name().parse::<ConnectionProfile>().unwrap(), profile);
        }
        assert!("hard-disk".parse::<ConnectionProfile>().is_err());
    }

    #[test]
    fn upper_gamma_integer_matches_definition() {
        // Gamma(3, 2) = 2! e^-2 (1 + 2 + 2)
        let v = upper_gamma_integer(2, 2.0);
        assert!((v - 10.0 * (-2f64).exp()).abs() < 1e-14);
    }
}
