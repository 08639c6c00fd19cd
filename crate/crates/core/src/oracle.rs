//! Brute-force checks at tiny `n`.
//!
//! For `n <= 5` there are at most `2^10` labelled graphs, so the marginal law
//! `P(G = g) = E_Z[P(g | Z)]` can be tabulated exactly for every position
//! draw and averaged by Monte Carlo. The tables back the unconditional
//! entropy, the neighbourhood identities and the tiny-n AEP.

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::connection::ConnectionProfile;
use crate::error::{Error, Result};
use crate::geometry::DomainSpec;
use crate::infotheory::{conditional_entropy, h2};
use crate::rng;
use crate::sampler::{pair_count, pair_nodes};
use crate::stats::Moments;

/// Largest graph the tables accept.
pub const MAX_TABLE_NODES: usize = 5;
/// Smallest accepted number of position draws.
pub const MIN_TABLE_TRIALS: usize = 10_000;
/// Position draws are accumulated in this many fixed batches. Batch means
/// give the standard errors of nonlinear functionals such as entropies.
const BATCHES: usize = 64;

/// Monte Carlo estimate of `P(G = g)` for all `2^C(n,2)` graphs.
///
/// Index `g` is the bitmask of present pairs in sampler pair order.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphProbabilityTable {
    n: usize,
    probabilities: Vec<f64>,
    se: Vec<f64>,
    trials: usize,
    batch_weights: Vec<f64>,
    batch_means: Vec<Vec<f64>>,
}

impl GraphProbabilityTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pairs(&self) -> usize {
        pair_count(self.n)
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn prob(&self, g: usize) -> f64 {
        self.probabilities[g]
    }

    /// Standard error of each entry.
    pub fn standard_errors(&self) -> &[f64] {
        &self.se
    }

    pub fn se_max(&self) -> f64 {
        self.se.iter().copied().fold(0.0, f64::max)
    }

    pub fn trials(&self) -> usize {
        self.trials
    }

    /// Marginal law of the pairs selected by `mask`, indexed by the full
    /// bitmask restricted to `mask`.
    fn marginal(values: &[f64], mask: usize) -> Vec<(usize, f64)> {
        let mut acc = std::collections::BTreeMap::new();
        for (g, &p) in values.iter().enumerate() {
            *acc.entry(g & mask).or_insert(0.0) += p;
        }
        acc.into_iter().collect()
    }

    /// Entropy of the pairs in `mask` with the batch-means standard error
    /// of the plug-in estimator.
    fn masked_entropy(&self, mask: usize) -> Estimate {
        let full = Self::marginal(&self.probabilities, mask);
        let value = full.iter().map(|&(_, p)| plogp(p)).sum();
        let weight_of: std::collections::BTreeMap<usize, f64> =
            full.iter().map(|&(h, p)| (h, if p > 0.0 { -p.log2() } else { 0.0 })).collect();
        let psi: Vec<f64> = self
            .batch_means
            .iter()
            .map(|b| {
                Self::marginal(b, mask)
                    .iter()
                    .map(|(h, p)| weight_of.get(h).copied().unwrap_or(0.0) * p)
                    .sum()
            })
            .collect();
        Estimate { value, se: 0.0, psi }.with_se(&self.batch_weights)
    }

    /// Writes `graph_index,bitmask,prob,se` rows after the column header.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "graph_index,bitmask,prob,se")?;
        let width = self.pairs().max(1);
        for (g, (p, se)) in self.probabilities.iter().zip(&self.se).enumerate() {
            writeln!(w, "{g},{g:0width$b},{p},{se}")?;
        }
        Ok(())
    }
}

fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

/// Linearized estimate: `value` plus per-batch influence values `psi`.
#[derive(Debug, Clone)]
struct Estimate {
    value: f64,
    se: f64,
    psi: Vec<f64>,
}

impl Estimate {
    fn with_se(mut self, weights: &[f64]) -> Self {
        self.se = weighted_batch_se(&self.psi, weights);
        self
    }

    fn minus(&self, other: &Estimate, weights: &[f64]) -> Estimate {
        let psi: Vec<f64> = self.psi.iter().zip(&other.psi).map(|(a, b)| a - b).collect();
        Estimate { value: self.value - other.value, se: 0.0, psi }.with_se(weights)
    }
}

/// Standard error of a weighted mean of batch statistics.
fn weighted_batch_se(psi: &[f64], weights: &[f64]) -> f64 {
    let k = psi.len();
    if k < 2 {
        return f64::INFINITY;
    }
    let mean: f64 = psi.iter().zip(weights).map(|(x, w)| x * w).sum();
    let ss: f64 = psi.iter().zip(weights).map(|(x, w)| (w * (x - mean)).powi(2)).sum();
    (ss * k as f64 / (k - 1) as f64).sqrt()
}

/// A value with its Monte Carlo standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Measured {
    pub value: f64,
    pub se: f64,
}

impl From<&Estimate> for Measured {
    fn from(e: &Estimate) -> Self {
        Measured { value: e.value, se: e.se }
    }
}

fn check_table_args(n: usize, trials: usize) -> Result<()> {
    if n < 2 || n > MAX_TABLE_NODES {
        return Err(Error::Size(format!(
            "graph tables need 2 <= n <= {MAX_TABLE_NODES}, got {n}"
        )));
    }
    if trials < MIN_TABLE_TRIALS {
        return Err(Error::invalid(format!(
            "graph tables need at least {MIN_TABLE_TRIALS} position draws, got {trials}"
        )));
    }
    Ok(())
}

/// Adds `P(g | Z)` for every graph `g` to `out`, given the pair
/// probabilities `p`.
fn accumulate_conditional_law(p: &[f64], scratch: &mut Vec<f64>, sum: &mut [f64], sum_sq: &mut [f64]) {
    scratch.clear();
    scratch.push(1.0);
    for (k, &pk) in p.iter().enumerate() {
        let half = 1usize << k;
        scratch.resize(2 * half, 0.0);
        for g in 0..half {
            let v = scratch[g];
            scratch[g] = v * (1.0 - pk);
            scratch[g + half] = v * pk;
        }
    }
    for ((s, q), &v) in sum.iter_mut().zip(sum_sq.iter_mut()).zip(scratch.iter()) {
        *s += v;
        *q += v * v;
    }
}

/// Tabulates `P(G = g)` by averaging the exact conditional law over
/// `trials` position draws.
pub fn mc_graph_table(
    n: usize,
    domain: &DomainSpec,
    profile: &ConnectionProfile,
    s: f64,
    trials: usize,
    seed: u64,
) -> Result<GraphProbabilityTable> {
    check_table_args(n, trials)?;
    if !(s > 0.0) {
        return Err(Error::domain(format!("sparsity must be positive, got {s}")));
    }
    let m = pair_count(n);
    let size = 1usize << m;
    let batch = trials.div_ceil(BATCHES);
    let inv_s = 1.0 / s;
    let parts: Vec<(usize, Vec<f64>, Vec<f64>)> = rng::chunks(trials, batch)
        .into_par_iter()
        .map(|(c, _, len)| {
            let mut rng = rng::stream(rng::derive_seed(seed, c));
            let mut sum = vec![0.0; size];
            let mut sum_sq = vec![0.0; size];
            let mut scratch = Vec::with_capacity(size);
            let mut p = vec![0.0; m];
            for _ in 0..len {
                let z = domain.sample_points(n, &mut rng);
                for (k, pk) in p.iter_mut().enumerate() {
                    let (i, j) = pair_nodes(k);
                    *pk = profile.edge_prob(domain.distance_unchecked(z.point(i), z.point(j)) * inv_s).p;
                }
                accumulate_conditional_law(&p, &mut scratch, &mut sum, &mut sum_sq);
            }
            (len, sum, sum_sq)
        })
        .collect();

    let mut total = vec![0.0; size];
    let mut total_sq = vec![0.0; size];
    let mut batch_weights = Vec::with_capacity(parts.len());
    let mut batch_means = Vec::with_capacity(parts.len());
    for (len, sum, sum_sq) in &parts {
        for g in 0..size {
            total[g] += sum[g];
            total_sq[g] += sum_sq[g];
        }
        batch_weights.push(*len as f64 / trials as f64);
        batch_means.push(sum.iter().map(|v| v / *len as f64).collect());
    }
    let t = trials as f64;
    let probabilities: Vec<f64> = total.iter().map(|v| v / t).collect();
    let se = probabilities
        .iter()
        .zip(&total_sq)
        .map(|(&mean, &sq)| ((sq / t - mean * mean).max(0.0) / (t - 1.0)).sqrt())
        .collect();
    Ok(GraphProbabilityTable {
        n,
        probabilities,
        se,
        trials,
        batch_weights,
        batch_means,
    })
}

/// `-sum P log2 P` over the table.
pub fn entropy_of_table(table: &GraphProbabilityTable) -> f64 {
    table.probabilities.iter().map(|&p| plogp(p)).sum()
}

/// Entropy of the table with its standard error.
pub fn entropy_of_table_measured(table: &GraphProbabilityTable) -> Measured {
    Measured::from(&table.masked_entropy(table.len() - 1))
}

/// Pairs incident to at least one node in `nodes` (a node bitmask).
pub fn neighbourhood_mask(n: usize, nodes: usize) -> usize {
    (0..pair_count(n))
        .filter(|&k| {
            let (i, j) = pair_nodes(k);
            nodes >> i & 1 == 1 || nodes >> j & 1 == 1
        })
        .fold(0, |acc, k| acc | 1 << k)
}

/// `H(N_S | N_{S^c})` where `N_i` is the vector of edge indicators at node
/// `i` and `subset` is a node bitmask.
pub fn neighborhood_conditional_entropy(table: &GraphProbabilityTable, subset: usize) -> Result<Measured> {
    let n = table.n();
    let all = (1usize << n) - 1;
    if subset == 0 || subset & !all != 0 {
        return Err(Error::invalid(format!("node subset {subset:#b} is empty or exceeds n = {n}")));
    }
    let joint_mask = neighbourhood_mask(n, subset) | neighbourhood_mask(n, all & !subset);
    let joint = table.masked_entropy(joint_mask);
    let given = table.masked_entropy(neighbourhood_mask(n, all & !subset));
    Ok(Measured::from(&joint.minus(&given, &table.batch_weights)))
}

/// `H(A_S | B_S)` where `A_S` are the pairs with both ends in `S` and
/// `B_S` all other pairs.
pub fn internal_conditional_entropy(table: &GraphProbabilityTable, subset: usize) -> Result<Measured> {
    let n = table.n();
    let all = (1usize << n) - 1;
    if subset == 0 || subset & !all != 0 {
        return Err(Error::invalid(format!("node subset {subset:#b} is empty or exceeds n = {n}")));
    }
    let outside = neighbourhood_mask(n, all & !subset);
    let joint = table.masked_entropy(table.len() - 1);
    let given = table.masked_entropy(outside);
    Ok(Measured::from(&joint.minus(&given, &table.batch_weights)))
}

/// Worst case of `|h2(x) - h2(y)| - h2(|x - y|)` over random pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct H2InequalityReport {
    pub trials: usize,
    pub violations: usize,
    pub max_excess: f64,
    pub worst_pair: (f64, f64),
}

pub const H2_SLACK: f64 = 1e-12;

pub fn check_h2_inequality(trials: usize, seed: u64) -> Result<H2InequalityReport> {
    if trials == 0 {
        return Err(Error::invalid("the binary entropy check needs at least one trial"));
    }
    let mut rng = rng::stream(seed);
    let mut report = H2InequalityReport {
        trials,
        violations: 0,
        max_excess: f64::NEG_INFINITY,
        worst_pair: (0.0, 0.0),
    };
    for _ in 0..trials {
        let x: f64 = rng.gen();
        let y: f64 = rng.gen();
        let excess = (h2(x) - h2(y)).abs() - h2((x - y).abs());
        if excess > H2_SLACK {
            report.violations += 1;
        }
        if excess > report.max_excess {
            report.max_excess = excess;
            report.worst_pair = (x, y);
        }
    }
    Ok(report)
}

/// `H(G_n) - H(G_n | Z_n)` with the standard error of the table entropy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditioningGap {
    pub table_entropy: Measured,
    pub conditional_entropy: f64,
    pub gap: f64,
    pub se: f64,
}

pub fn conditioning_gap(
    n: usize,
    domain: &DomainSpec,
    profile: &ConnectionProfile,
    s: f64,
    trials: usize,
    seed: u64,
) -> Result<ConditioningGap> {
    let table = mc_graph_table(n, domain, profile, s, trials, seed)?;
    gap_from_table(&table, domain, profile, s)
}

pub fn gap_from_table(
    table: &GraphProbabilityTable,
    domain: &DomainSpec,
    profile: &ConnectionProfile,
    s: f64,
) -> Result<ConditioningGap> {
    let h = entropy_of_table_measured(table);
    let c = conditional_entropy(domain, profile, table.n(), s)?.bits;
    Ok(ConditioningGap {
        table_entropy: h,
        conditional_entropy: c,
        gap: h.value - c,
        se: h.se,
    })
}

/// Mean of `-log2 P_hat(G)` over independently sampled graphs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TableAep {
    pub samples: usize,
    pub mean: f64,
    pub se: f64,
}

pub fn table_aep(
    table: &GraphProbabilityTable,
    domain: &DomainSpec,
    profile: &ConnectionProfile,
    s: f64,
    samples: usize,
    seed: u64,
) -> Result<TableAep> {
    let n = table.n();
    let values: Vec<f64> = (0..samples as u64)
        .into_par_iter()
        .map(|t| {
            let g = crate::sampler::sample_srgg(n, *domain, *profile, s, rng::derive_seed(seed, t))?;
            let mask = g.pair_mask().expect("tables hold at most 10 pairs") as usize;
            let p = table.prob(mask);
            if p > 0.0 {
                Ok(-p.log2())
            } else {
                Err(Error::Divergent(format!(
                    "sampled graph {mask:#b} has zero estimated probability"
                )))
            }
        })
        .collect::<Result<_>>()?;
    let m: Moments = values.into_iter().collect();
    Ok(TableAep {
        samples,
        mean: m.mean(),
        se: m.std_error(),
    })
}

/// One pass/fail line of the oracle suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleCheck {
    pub name: String,
    pub statistic: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

impl OracleCheck {
    fn within(name: impl Into<String>, diff: f64, se: f64, sigmas: f64, detail: String) -> Self {
        let tolerance = sigmas * se;
        OracleCheck {
            name: name.into(),
            statistic: diff,
            tolerance,
            passed: diff.abs() <= tolerance,
            detail,
        }
    }
}

/// Parameters of the oracle suite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleSuiteConfig {
    pub n: usize,
    pub domain: DomainSpec,
    pub profile: ConnectionProfile,
    pub s: f64,
    pub trials: usize,
    pub aep_samples: usize,
    pub h2_trials: usize,
    pub seed: u64,
}

/// Checks in a fixed order, plus the `n`-node table they were run on.
#[derive(Debug, Clone)]
pub struct OracleSuiteReport {
    pub checks: Vec<OracleCheck>,
    pub table: GraphProbabilityTable,
}

impl OracleSuiteReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Runs every oracle check.
pub fn run_oracle_suite(cfg: &OracleSuiteConfig) -> Result<OracleSuiteReport> {
    let OracleSuiteConfig { n, domain, profile, s, trials, seed, .. } = *cfg;
    let sub = |tag: u64| rng::derive_seed(seed, tag);
    let mut checks = Vec::new();

    // Two nodes: the table is the marginal edge probability.
    let t2 = mc_graph_table(2, &domain, &profile, s, trials, sub(0))?;
    let p_bar = domain.expect_over_distance(|r| profile.edge_prob(r / s).p, s)?.value;
    checks.push(OracleCheck::within(
        "edge-marginal",
        t2.prob(1) - p_bar,
        t2.standard_errors()[1],
        3.0,
        format!("P(edge) {:.6} vs quadrature {:.6}", t2.prob(1), p_bar),
    ));
    let h2_tab = entropy_of_table_measured(&t2);
    checks.push(OracleCheck::within(
        "two-node-entropy",
        h2_tab.value - h2(p_bar),
        h2_tab.se,
        3.0,
        format!("H {:.6} vs h2(P(edge)) {:.6}", h2_tab.value, h2(p_bar)),
    ));

    // Exchangeability at n = 3: relabelling nodes permutes graphs.
    let t3 = mc_graph_table(3, &domain, &profile, s, trials, sub(1))?;
    let mut worst = (0.0f64, 1.0f64);
    for perm in permutations(3) {
        for g in 0..t3.len() {
            let h = relabel(3, g, &perm);
            let diff = t3.prob(g) - t3.prob(h);
            let se = t3.standard_errors()[g].hypot(t3.standard_errors()[h]);
            if se > 0.0 && diff.abs() / se > worst.0.abs() / worst.1 {
                worst = (diff, se);
            }
        }
    }
    checks.push(OracleCheck::within(
        "exchangeability",
        worst.0,
        worst.1,
        4.0,
        "largest relabelling difference at n = 3".into(),
    ));

    let table = mc_graph_table(n, &domain, &profile, s, trials, sub(2))?;
    let gap = gap_from_table(&table, &domain, &profile, s)?;
    checks.push(OracleCheck {
        name: "conditioning-gap".into(),
        statistic: gap.gap,
        tolerance: 4.0 * gap.se,
        passed: gap.gap >= -4.0 * gap.se,
        detail: format!(
            "H(G) {:.6} - H(G|Z) {:.6} at n = {n}",
            gap.table_entropy.value, gap.conditional_entropy
        ),
    });

    let aep = table_aep(&table, &domain, &profile, s, cfg.aep_samples, sub(3))?;
    let h = gap.table_entropy;
    checks.push(OracleCheck::within(
        "tiny-aep",
        aep.mean - h.value,
        aep.se.hypot(h.se),
        3.0,
        format!("mean -log2 P(G) {:.6} vs H(G) {:.6}", aep.mean, h.value),
    ));

    let whole = neighborhood_conditional_entropy(&table, (1 << n) - 1)?;
    checks.push(OracleCheck::within(
        "neighbourhood-whole",
        whole.value - h.value,
        1e-12f64.max(1e-12 * h.value),
        1.0,
        "S = all nodes gives H(G)".into(),
    ));

    let mut sub_entropy = std::collections::BTreeMap::new();
    for subset in reduction_subsets(n) {
        let k = subset.count_ones() as usize;
        if !sub_entropy.contains_key(&k) {
            let t = mc_graph_table(k, &domain, &profile, s, trials, sub(10 + k as u64))?;
            sub_entropy.insert(k, entropy_of_table_measured(&t));
        }
        let rhs = sub_entropy[&k];
        let lhs = neighborhood_conditional_entropy(&table, subset)?;
        checks.push(OracleCheck::within(
            format!("neighbourhood-reduction S={}", subset_label(subset, n)),
            lhs.value - rhs.value,
            lhs.se.hypot(rhs.se),
            4.0,
            format!("H(N_S|N_Sc) {:.6} vs H(G_{k}) {:.6}", lhs.value, rhs.value),
        ));
    }

    let h2r = check_h2_inequality(cfg.h2_trials, sub(4))?;
    checks.push(OracleCheck {
        name: "binary-entropy-difference".into(),
        statistic: h2r.max_excess,
        tolerance: H2_SLACK,
        passed: h2r.violations == 0,
        detail: format!("{} violations in {} pairs", h2r.violations, h2r.trials),
    });
    Ok(OracleSuiteReport { checks, table })
}

/// Node subsets of size 2 and 3 in increasing bitmask order, excluding `n`
/// itself.
pub fn reduction_subsets(n: usize) -> Vec<usize> {
    (1usize..1 << n)
        .filter(|m| {
            let c = m.count_ones() as usize;
            (c == 2 || c == 3) && c < n
        })
        .collect()
}

/// 1-based node list such as `{1,3}`.
pub fn subset_label(subset: usize, n: usize) -> String {
    let nodes: Vec<String> = (0..n).filter(|i| subset >> i & 1 == 1).map(|i| (i + 1).to_string()).collect();
    format!("{{{}}}", nodes.join(","))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Graph index after mapping node `i` to `perm[i]`.
pub fn relabel(n: usize, g: usize, perm: &[usize]) -> usize {
    let mut h = 0;
    for k in 0..pair_count(n) {
        if g >> k & 1 == 1 {
            let (i, j) = pair_nodes(k);
            let (a, b) = (perm[i].min(perm[j]), perm[i].max(perm[j]));
            h |= 1 << crate::sampler::pair_index(a, b);
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    fn torus() -> DomainSpec {
        DomainSpec::unit_torus(2).unwrap()
    }

    #[test]
    fn size_and_trial_guards() {
        let p = ConnectionProfile::Rayleigh;
        assert!(matches!(mc_graph_table(6, &torus(), &p, 0.3, 10_000, 0), Err(Error::Size(_))));
        assert!(mc_graph_table(3, &torus(), &p, 0.3, 10, 0).is_err());
    }

    #[test]
    fn conditional_law_sums_to_one() {
        let mut scratch = Vec::new();
        let mut sum = vec![0.0; 8];
        let mut sq = vec![0.0; 8];
        accumulate_conditional_law(&[0.2, 0.5, 0.9], &mut scratch, &mut sum, &mut sq);
        assert!((sum.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!((sum[0b101] - 0.2 * 0.5 * 0.9).abs() < 1e-15);
    }

    #[test]
    fn vanishing_range_puts_mass_on_empty_graph() {
        let t = mc_graph_table(4, &torus(), &ConnectionProfile::Rayleigh, 1e-6, 10_000, 1).unwrap();
        assert!(t.prob(0) > 1.0 - 1e-6);
        assert!(entropy_of_table(&t) < 1e-4);
    }

    #[test]
    fn constant_connection_has_no_gap() {
        // q e^{-r^2/s^2} with huge s is q for every pair.
        let p = ConnectionProfile::scaled_rayleigh(0.5).unwrap();
        let g = conditioning_gap(3, &torus(), &p, 1e6, 10_000, 3).unwrap();
        assert!(g.gap.abs() < 1e-9, "{g:?}");
        assert!((g.table_entropy.value - 3.0).abs() < 1e-9);
    }

    #[test]
    fn two_node_entropy_is_binary_entropy() {
        let t = mc_graph_table(2, &torus(), &ConnectionProfile::Rayleigh, 0.3, 20_000, 5).unwrap();
        let h = entropy_of_table_measured(&t);
        assert!((h.value - h2(t.prob(1))).abs() < 1e-12);
        assert!(h.se > 0.0 && h.se < 0.01);
    }

    #[test]
    fn whole_set_recovers_table_entropy() {
        let t = mc_graph_table(4, &torus(), &ConnectionProfile::Rayleigh, 0.3, 10_000, 2).unwrap();
        let all = neighborhood_conditional_entropy(&t, 0b1111).unwrap();
        assert!((all.value - entropy_of_table(&t)).abs() < 1e-12);
        assert!(neighborhood_conditional_entropy(&t, 0).is_err());
    }

    #[test]
    fn relabel_is_permutation() {
        for perm in permutations(4) {
            let mut seen = vec![false; 64];
            for g in 0..64 {
                seen[relabel(4, g, &perm)] = true;
            }
            assert!(seen.iter().all(|&b| b));
        }
        assert_eq!(permutations(3).len(), 6);
    }

    #[test]
    fn h2_inequality_examples() {
        assert!((h2(0.3) - h2(0.7)).abs() <= h2(0.4));
        let r = check_h2_inequality(10_000, 9).unwrap();
        assert_eq!(r.violations, 0);
        assert!(check_h2_inequality(0, 9).is_err());
    }

    #[test]
    fn csv_layout() {
        let t = mc_graph_table(2, &torus(), &ConnectionProfile::Rayleigh, 0.3, 10_000, 2).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "graph_index,bitmask,prob,se");
        assert!(lines[2].starts_with("1,1,"));
        assert_eq!(lines.len(), 3);
    }

    #[test]
    fn reduction_subset_enumeration() {
        assert_eq!(reduction_subsets(4).len(), 10);
        assert_eq!(subset_label(0b101, 4), "{1,3}");
    }
}
