//! Entropy rate, conditional entropy and information density of the SRGG.
//!
//! All entropies are in bits. Information densities are normalized by
//! `C(n, 2) s^d`, the scale on which `-log2 P(G | Z)` concentrates.

use rayon::prelude::*;
use serde::Serialize;

use crate::connection::{check_assumptions, ConnectionProfile, EdgeFunctional, EdgeProb};
use crate::error::{Error, Result};
use crate::geometry::{small_r_sphere_area, DomainSpec};
use crate::rng;
use crate::sampler::{pair_count, Srgg};
use crate::stats::Moments;

/// `-p log2 p - (1-p) log2 (1-p)` with `0 log 0 = 0`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("probability {p} outside [0, 1]")));
    }
    Ok(h2(p))
}

#[inline]
pub(crate) fn h2(p: f64) -> f64 {
    EdgeProb::from_p(p).entropy_bits()
}

/// Normalization `C(n, 2) s^d`.
pub fn normalization(n: usize, s: f64, d: usize) -> f64 {
    pair_count(n) as f64 * s.powi(d as i32)
}

/// `h* = omega_d int_0^inf r^(d-1) h2(p(r)) dr`.
pub fn h_star(profile: &ConnectionProfile, d: usize) -> Result<f64> {
    let report = check_assumptions(profile, d)?;
    if !report.all_finite() {
        return Err(Error::Divergent(format!(
            "h* for {profile} in d={d} is not finite; see check_assumptions"
        )));
    }
    Ok(report.h_star.value)
}

/// Limits of the per-pair moments as `s -> 0`, each divided by `s^d`:
/// `(h*, omega_d int r^(d-1) h2^2, omega_d int r^(d-1) p(1-p) log2^2(p/(1-p)))`.
pub fn small_s_edge_moments(profile: &ConnectionProfile, d: usize) -> Result<(f64, f64, f64)> {
    let omega = small_r_sphere_area(d)?;
    let k = d as u32 - 1;
    let h = profile.radial_moment(k, EdgeFunctional::Entropy)?.value;
    let h_sq = profile.radial_moment(k, EdgeFunctional::EntropySquared)?.value;
    let lo = profile.radial_moment(k, EdgeFunctional::LogOddsVariance)?.value;
    Ok((omega * h, omega * h_sq, omega * lo))
}

/// `H(G_n | Z_n)` and its normalized value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionalEntropy {
    pub n: usize,
    pub s: f64,
    pub bits: f64,
    pub normalized: f64,
    pub abs_error: f64,
}

/// `H(G_n | Z_n) = C(n, 2) int f_K(r) h2(p(r / s)) dr`.
pub fn conditional_entropy(
    domain: &DomainSpec,
    profile: &ConnectionProfile,
    n: usize,
    s: f64,
) -> Result<ConditionalEntropy> {
    if n < 2 {
        return Err(Error::invalid(format!("conditional entropy needs n >= 2, got {n}")));
    }
    if !(s > 0.0) {
        return Err(Error::domain(format!("sparsity must be positive, got {s}")));
    }
    let per_pair = domain.expect_over_distance(|r| profile.edge_prob(r / s).entropy_bits(), s)?;
    let pairs = pair_count(n) as f64;
    let bits = pairs * per_pair.value;
    Ok(ConditionalEntropy {
        n,
        s,
        bits,
        normalized: bits / normalization(n, s, domain.dimension()),
        abs_error: pairs * per_pair.abs_error,
    })
}

/// One realization of `-log2 P(G | Z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InfoDensitySample {
    pub n: usize,
    pub s: f64,
    pub raw: f64,
    pub normalized: f64,
}

/// `-log2 P(G | Z) = sum_{i<j} -log2 P(X_ij | R_ij)`.
pub fn info_density(graph: &Srgg, profile: &ConnectionProfile, s: f64) -> Result<InfoDensitySample> {
    if !(s > 0.0) {
        return Err(Error::domain(format!("sparsity must be positive, got {s}")));
    }
    let n = graph.n();
    let mut raw = 0.0;
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            let ep = profile.edge_prob(graph.distance(i, j) / s);
            raw += surprisal_checked(&ep, graph.has_pair(k), i, j)?;
            k += 1;
        }
    }
    Ok(InfoDensitySample {
        n,
        s,
        raw,
        normalized: raw / normalization(n, s, graph.meta().domain.dimension()),
    })
}

#[inline]
pub(crate) fn surprisal_checked(ep: &EdgeProb, edge: bool, i: usize, j: usize) -> Result<f64> {
    let bits = ep.surprisal_bits(edge);
    if bits.is_infinite() {
        return Err(Error::ImpossibleRealization {
            i,
            j,
            reason: if edge {
                "an edge where p = 0"
            } else {
                "no edge where p = 1"
            },
        });
    }
    Ok(bits)
}

/// Samples a graph from `seed` exactly as [`crate::sampler::sample_srgg`]
/// does and returns its information density without materializing it.
pub fn sample_info_density(
    n: usize,
    domain: &DomainSpec,
    profile: &ConnectionProfile,
    s: f64,
    seed: u64,
) -> Result<InfoDensitySample> {
    use rand::Rng;
    let mut rng = rng::stream(seed);
    let positions = domain.sample_points(n, &mut rng);
    let inv_s = 1.0 / s;
    let mut raw = 0.0;
    for j in 1..n {
        let pj = positions.point(j);
        for i in 0..j {
            let ep = profile.edge_prob(domain.distance_unchecked(positions.point(i), pj) * inv_s);
            let edge = rng.gen::<f64>() < ep.p;
            raw += surprisal_checked(&ep, edge, i, j)?;
        }
    }
    Ok(InfoDensitySample {
        n,
        s,
        raw,
        normalized: raw / normalization(n, s, domain.dimension()),
    })
}

/// Decomposition of `Var(Y_ij)` for one pair by the law of total variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgeTermVariance {
    /// `E[Y] = E[h2(p)]`
    pub mean: f64,
    /// `Var(E[Y | Z]) = E[h2(p)^2] - E[h2(p)]^2`
    pub between: f64,
    /// `E[Var(Y | Z)] = E[p(1-p) log2^2(p/(1-p))]`
    pub within: f64,
    pub total: f64,
}

pub fn edge_term_variance(domain: &DomainSpec, profile: &ConnectionProfile, s: f64) -> Result<EdgeTermVariance> {
    if !(s > 0.0) {
        return Err(Error::domain(format!("sparsity must be positive, got {s}")));
    }
    let mean = domain.expect_over_distance(|r| profile.edge_prob(r / s).entropy_bits(), s)?.value;
    let second = domain
        .expect_over_distance(|r| profile.edge_prob(r / s).entropy_bits().powi(2), s)?
        .value;
    let within = domain
        .expect_over_distance(|r| profile.edge_prob(r / s).log_odds_variance_bits(), s)?
        .value;
    let between = (second - mean * mean).max(0.0);
    Ok(EdgeTermVariance {
        mean,
        between,
        within,
        total: between + within,
    })
}

/// Where a typical set is centred.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum TypicalityCenter {
    /// The asymptotic rate `h*`.
    HStar(f64),
    /// A finite-n normalized entropy.
    FiniteN(f64),
}

impl TypicalityCenter {
    pub fn value(&self) -> f64 {
        match *self {
            TypicalityCenter::HStar(v) | TypicalityCenter::FiniteN(v) => v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TypicalityParams {
    pub epsilon: f64,
    pub center: TypicalityCenter,
}

impl TypicalityParams {
    pub fn new(epsilon: f64, center: TypicalityCenter) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::invalid(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(TypicalityParams { epsilon, center })
    }
}

/// `|normalized - center| <= epsilon`.
pub fn is_typical(sample: &InfoDensitySample, params: &TypicalityParams) -> bool {
    (sample.normalized - params.center.value()).abs() <= params.epsilon
}

/// `log2` bounds on `P(G)` for a typical graph, symmetric form
/// `2^(-C(n,2) s^d (h* +- eps))`.
pub fn typical_probability_log2_bounds(n: usize, s: f64, d: usize, hstar: f64, epsilon: f64) -> (f64, f64) {
    let scale = normalization(n, s, d);
    (-scale * (hstar + epsilon), -scale * (hstar - epsilon))
}

/// Chebyshev lower bound on `P(typical)` for the conditional information
/// density, valid when edge terms are uncorrelated (exact on the torus).
pub fn chebyshev_typical_lower_bound(variance: &EdgeTermVariance, n: usize, s: f64, d: usize, epsilon: f64) -> f64 {
    let scale = normalization(n, s, d);
    let var_normalized = pair_count(n) as f64 * variance.total / (scale * scale);
    (1.0 - var_normalized / (epsilon * epsilon)).max(0.0)
}

/// Monte Carlo summary of the normalized information density at one `(n, s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AepCell {
    pub n: usize,
    pub s: f64,
    pub trials: usize,
    /// `C(n, 2) s^d`
    pub scale: f64,
    pub mean: f64,
    pub std_error: f64,
    pub variance: f64,
    /// `H(G_n | Z_n) / (C(n, 2) s^d)` by quadrature.
    pub conditional_entropy: f64,
}

/// Samples `trials` graphs with seeds `derive_seed(seed, t)` and summarizes
/// their normalized information density. Output is independent of the
/// number of rayon workers.
pub fn aep_cell(
    domain: &DomainSpec,
    profile: &ConnectionProfile,
    n: usize,
    s: f64,
    trials: usize,
    seed: u64,
) -> Result<AepCell> {
    let samples: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| sample_info_density(n, domain, profile, s, rng::derive_seed(seed, t)).map(|x| x.normalized))
        .collect::<Result<_>>()?;
    let moments: Moments = samples.iter().copied().collect();
    let ce = conditional_entropy(domain, profile, n, s)?;
    Ok(AepCell {
        n,
        s,
        trials,
        scale: normalization(n, s, domain.dimension()),
        mean: moments.mean(),
        std_error: moments.std_error(),
        variance: moments.variance(),
        conditional_entropy: ce.normalized,
    })
}
