//! Distributed compression of an SRGG by random binning.
//!
//! Nodes are split into `L` consecutive blocks. Encoder `l` sees every edge
//! indicator touching its block and sends a bin index. The decoder searches
//! for the unique jointly typical graph consistent with all indices.
//!
//! Blocks and nodes are 0-based throughout.

use std::hash::Hasher;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;
use siphasher::sip::SipHasher13;

use crate::connection::{ConnectionProfile, SparsitySchedule};
use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, PointSet};
use crate::infotheory::{conditional_entropy, TypicalityCenter};
use crate::oracle::GraphProbabilityTable;
use crate::rng;
use crate::sampler::{pair_count, pair_nodes, sample_srgg, Srgg};
use crate::stats::{wilson_interval, Z95};

/// Widest bin index a codebook may use.
pub const MAX_INDEX_BITS: u32 = 62;
/// Largest graph the genie decoder enumerates (pairs fit one word).
pub const MAX_DECODE_PAIRS: usize = 64;
/// Largest graph for which the union bound enumerates every candidate.
pub const MAX_UNION_BOUND_PAIRS: usize = 24;
/// Largest number of fresh pairs enumerated in one decoder step.
const MAX_GROUP_PAIRS: usize = 26;

/// Nodes `{0..n}` split into `L` equal consecutive blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BlockPartition {
    n: usize,
    blocks: usize,
}

impl BlockPartition {
    pub fn new(n: usize, blocks: usize) -> Result<Self> {
        if blocks == 0 || n == 0 || n % blocks != 0 {
            return Err(Error::invalid(format!(
                "{blocks} blocks must evenly divide {n} nodes"
            )));
        }
        if blocks > 16 {
            return Err(Error::Size(format!("at most 16 blocks are supported, got {blocks}")));
        }
        Ok(BlockPartition { n, blocks })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn block_size(&self) -> usize {
        self.n / self.blocks
    }

    pub fn block_of(&self, node: usize) -> usize {
        node / self.block_size()
    }

    pub fn nodes(&self, l: usize) -> std::ops::Range<usize> {
        let m = self.block_size();
        l * m..(l + 1) * m
    }

    /// Node count of the blocks in `subset` (a block bitmask).
    pub fn subset_nodes(&self, subset: usize) -> usize {
        subset.count_ones() as usize * self.block_size()
    }

    fn check_block(&self, l: usize) -> Result<()> {
        if l >= self.blocks {
            return Err(Error::invalid(format!("block {l} out of range for {} blocks", self.blocks)));
        }
        Ok(())
    }

    /// Pair indices touching block `l`, in pair order.
    pub fn block_pairs(&self, l: usize) -> Result<Vec<usize>> {
        self.check_block(l)?;
        Ok((0..pair_count(self.n))
            .filter(|&k| {
                let (i, j) = pair_nodes(k);
                self.block_of(i) == l || self.block_of(j) == l
            })
            .collect())
    }

    /// Pairs with both ends in the union of the blocks in `subset`.
    pub fn internal_pairs(&self, subset: usize) -> Vec<usize> {
        (0..pair_count(self.n))
            .filter(|&k| {
                let (i, j) = pair_nodes(k);
                subset >> self.block_of(i) & 1 == 1 && subset >> self.block_of(j) & 1 == 1
            })
            .collect()
    }

    /// Bitmask over pairs of [`Self::block_pairs`]; requires `C(n, 2) <= 64`.
    fn block_pair_mask(&self, l: usize) -> u64 {
        self.block_pairs(l).unwrap().iter().fold(0, |m, &k| m | 1 << k)
    }

    fn internal_pair_mask(&self, subset: usize) -> u64 {
        self.internal_pairs(subset).iter().fold(0, |m, &k| m | 1 << k)
    }
}

/// Edge indicators of one block, in pair order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockString {
    len: usize,
    words: Vec<u64>,
}

impl BlockString {
    pub fn from_bits(bits: impl IntoIterator<Item = bool>) -> Self {
        let mut s = BlockString { len: 0, words: Vec::new() };
        for b in bits {
            if s.len % 64 == 0 {
                s.words.push(0);
            }
            if b {
                s.words[s.len / 64] |= 1 << (s.len % 64);
            }
            s.len += 1;
        }
        s
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bit(&self, t: usize) -> bool {
        self.words[t / 64] >> (t % 64) & 1 == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }
}

impl std::fmt::Display for BlockString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for t in 0..self.len {
            f.write_str(if self.bit(t) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Every edge indicator touching block `l`.
pub fn extract_block(graph: &Srgg, partition: &BlockPartition, l: usize) -> Result<BlockString> {
    if graph.n() != partition.n() {
        return Err(Error::invalid(format!(
            "graph has {} nodes but the partition expects {}",
            graph.n(),
            partition.n()
        )));
    }
    Ok(BlockString::from_bits(
        partition.block_pairs(l)?.into_iter().map(|k| graph.has_pair(k)),
    ))
}

fn block_from_mask(mask: u64, pairs: &[usize]) -> BlockString {
    BlockString::from_bits(pairs.iter().map(|&k| mask >> k & 1 == 1))
}

/// Per-block rates in bits per normalized unit `n(n-1) s^d / L`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateTuple(Vec<f64>);

impl RateTuple {
    pub fn new(rates: Vec<f64>) -> Result<Self> {
        if rates.is_empty() {
            return Err(Error::invalid("a rate tuple needs at least one block"));
        }
        if let Some(r) = rates.iter().find(|r| !(**r >= 0.0 && r.is_finite())) {
            return Err(Error::invalid(format!("rates must be finite and nonnegative, got {r}")));
        }
        Ok(RateTuple(rates))
    }

    pub fn uniform(blocks: usize, rate: f64) -> Result<Self> {
        Self::new(vec![rate; blocks])
    }

    pub fn rates(&self) -> &[f64] {
        &self.0
    }

    pub fn blocks(&self) -> usize {
        self.0.len()
    }

    pub fn scaled(&self, gamma: f64) -> Result<Self> {
        Self::new(self.0.iter().map(|r| r * gamma).collect())
    }

    /// Sum of the rates of the blocks in `subset`.
    pub fn subset_sum(&self, subset: usize) -> f64 {
        self.0.iter().enumerate().filter(|(l, _)| subset >> l & 1 == 1).map(|(_, r)| r).sum()
    }
}

/// Lazily realized random binning: block strings are hashed under a shared
/// key, so every block gets an independent uniform index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinningCodebook {
    bits: Vec<u32>,
    key: u64,
    /// Blocks whose index is wide enough to be an injective relabelling.
    injective: Vec<bool>,
}

/// `round-half-up(n (n-1) s^d R / L)`.
pub fn index_bits(n: usize, blocks: usize, s: f64, d: usize, rate: f64) -> Result<u32> {
    let exact = n as f64 * (n as f64 - 1.0) * s.powi(d as i32) * rate / blocks as f64;
    let rounded = (exact + 0.5).floor();
    if !(rounded <= MAX_INDEX_BITS as f64) {
        return Err(Error::Size(format!(
            "codebook needs {exact:.2} index bits, more than {MAX_INDEX_BITS}"
        )));
    }
    Ok(rounded as u32)
}

impl BinningCodebook {
    /// Codebook for `rates` at sparsity `s`. Blocks whose width reaches
    /// their string length switch to an injective map.
    pub fn new(partition: &BlockPartition, rates: &RateTuple, s: f64, d: usize, key: u64) -> Result<Self> {
        if rates.blocks() != partition.blocks() {
            return Err(Error::invalid(format!(
                "{} rates for {} blocks",
                rates.blocks(),
                partition.blocks()
            )));
        }
        let bits = rates
            .rates()
            .iter()
            .map(|&r| index_bits(partition.n(), partition.blocks(), s, d, r))
            .collect::<Result<Vec<_>>>()?;
        Self::with_bits(partition, bits, key)
    }

    pub fn with_bits(partition: &BlockPartition, bits: Vec<u32>, key: u64) -> Result<Self> {
        if bits.len() != partition.blocks() {
            return Err(Error::invalid("one index width per block is required"));
        }
        if let Some(b) = bits.iter().find(|&&b| b > MAX_INDEX_BITS) {
            return Err(Error::Size(format!("index width {b} exceeds {MAX_INDEX_BITS}")));
        }
        let block_len = partition.block_pairs(0)?.len();
        let injective = bits.iter().map(|&b| b as usize >= block_len).collect();
        Ok(BinningCodebook { bits, key, injective })
    }

    pub fn bits(&self) -> &[u32] {
        &self.bits
    }

    pub fn key(&self) -> u64 {
        self.key
    }

    pub fn is_injective(&self, l: usize) -> bool {
        self.injective[l]
    }

    /// Total index width of the blocks in `subset`.
    pub fn subset_bits(&self, subset: usize) -> u32 {
        self.bits.iter().enumerate().filter(|(l, _)| subset >> l & 1 == 1).map(|(_, b)| b).sum()
    }

    fn block_key(&self, l: usize) -> (u64, u64) {
        (self.key, rng::derive_seed(self.key, l as u64))
    }

    /// Bin index of `block` under encoder `l`, in `[0, 2^bits_l)`.
    ///
    /// The hash is truncated to its top bits, so for a fixed key the bins at
    /// a wider index refine those at a narrower one.
    pub fn bin_index(&self, l: usize, block: &BlockString) -> u64 {
        let b = self.bits[l];
        if b == 0 {
            return 0;
        }
        if self.injective[l] {
            let value = block.words().first().copied().unwrap_or(0);
            let mask = rng::derive_seed(self.block_key(l).1, u64::MAX);
            return (value ^ mask) & ((1u64 << b) - 1);
        }
        let (k0, k1) = self.block_key(l);
        let mut h = SipHasher13::new_with_keys(k0, k1);
        h.write_usize(block.len());
        for w in block.words() {
            h.write_u64(*w);
        }
        h.finish() >> (64 - b)
    }
}

/// `(|Lambda| / L)^(1 - beta d) h* / 2` for a nonempty block subset.
pub fn rate_bound(blocks: usize, subset: usize, schedule: &SparsitySchedule, hstar: f64) -> Result<f64> {
    let size = subset.count_ones() as usize;
    if size == 0 || blocks == 0 || subset >> blocks != 0 {
        return Err(Error::invalid(format!(
            "subset {subset:#b} is empty or exceeds {blocks} blocks"
        )));
    }
    let fraction = size as f64 / blocks as f64;
    Ok(fraction * schedule.ratio_limit(fraction) * hstar / 2.0)
}

/// A subset whose rate constraint fails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Violation {
    pub subset: usize,
    pub rate_sum: f64,
    pub bound: f64,
}

impl Violation {
    pub fn deficit(&self) -> f64 {
        self.bound - self.rate_sum
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Achievability {
    pub achievable: bool,
    /// The violated constraint with the largest deficit; ties go to the
    /// smallest subset mask.
    pub tightest: Option<Violation>,
}

/// Checks `sum_{l in Lambda} R_l >= rate_bound(Lambda)` for every nonempty
/// `Lambda`.
pub fn is_achievable(rates: &RateTuple, schedule: &SparsitySchedule, hstar: f64) -> Result<Achievability> {
    let blocks = rates.blocks();
    let mut tightest: Option<Violation> = None;
    for subset in 1..1usize << blocks {
        let bound = rate_bound(blocks, subset, schedule, hstar)?;
        let rate_sum = rates.subset_sum(subset);
        if rate_sum < bound {
            let v = Violation { subset, rate_sum, bound };
            if tightest.map_or(true, |t| v.deficit() > t.deficit()) {
                tightest = Some(v);
            }
        }
    }
    Ok(Achievability { achievable: tightest.is_none(), tightest })
}

/// `(subset_mask, bound_bits)` for every nonempty subset.
pub fn rate_region(blocks: usize, schedule: &SparsitySchedule, hstar: f64) -> Result<Vec<(usize, f64)>> {
    (1..1usize << blocks)
        .map(|m| rate_bound(blocks, m, schedule, hstar).map(|b| (m, b)))
        .collect()
}

pub fn write_rate_region_csv<W: Write>(rows: &[(usize, f64)], mut w: W) -> Result<()> {
    writeln!(w, "subset_mask,bound_bits")?;
    for (m, b) in rows {
        writeln!(w, "{m},{b}")?;
    }
    Ok(())
}

/// What the decoder knows about the source law.
#[derive(Debug, Clone, Copy)]
pub enum DecoderModel<'a> {
    /// Positions are revealed; candidates are scored by `P(g | Z)`.
    Genie {
        positions: &'a PointSet,
        domain: DomainSpec,
        profile: ConnectionProfile,
        s: f64,
    },
    /// Candidates are scored by a tabulated marginal law (`n <= 5`).
    Table { table: &'a GraphProbabilityTable, s: f64, d: usize },
}

/// Typical-set parameters: `|info density - center| <= epsilon` for every
/// nonempty block subset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecodeParams {
    pub epsilon: f64,
    pub center: TypicalityCenter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecodeStatus {
    Decoded,
    AtypicalSource,
    Collision,
    NoCandidate,
}

impl DecodeStatus {
    pub fn label(&self) -> &'static str {
        match self {
            DecodeStatus::Decoded => "decoded",
            DecodeStatus::AtypicalSource => "atypical-source",
            DecodeStatus::Collision => "collision",
            DecodeStatus::NoCandidate => "no-candidate",
        }
    }
}

/// Result of one decoding. The decoder itself only reports `Decoded`,
/// `Collision` or `NoCandidate`; the simulator marks atypical sources.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DecodeOutcome {
    pub status: DecodeStatus,
    /// Pair bitmask of the reconstruction when decoded.
    pub graph: Option<u64>,
    /// Typical candidates matching every bin.
    pub candidates: usize,
}

/// Scores candidate graphs by conditional information densities of block
/// subsets, normalized by `C(v, 2) s^d` with `v` the subset's node count.
struct TypicalityScorer<'a> {
    /// `(subset, internal pair mask, normalization)`; subsets with no
    /// internal pair carry no constraint and are skipped.
    subsets: Vec<(usize, u64, f64)>,
    kind: ScorerKind<'a>,
    params: DecodeParams,
}

enum ScorerKind<'a> {
    /// Surprisal of absence and presence of each pair.
    Genie { absent: Vec<f64>, present: Vec<f64> },
    /// `-log2 P(g)` and marginals of `B_{Lambda^c}` for each subset.
    Table {
        table: &'a GraphProbabilityTable,
        complements: Vec<(u64, std::collections::HashMap<u64, f64>)>,
    },
}

impl<'a> TypicalityScorer<'a> {
    fn new(model: &DecoderModel<'a>, partition: &BlockPartition, params: DecodeParams) -> Result<Self> {
        let n = partition.n();
        let (s, d) = match model {
            DecoderModel::Genie { positions, domain, s, .. } => {
                if positions.len() != n {
                    return Err(Error::invalid("positions do not match the partition"));
                }
                (*s, domain.dimension())
            }
            DecoderModel::Table { table, s, d } => {
                if table.n() != n {
                    return Err(Error::invalid("table size does not match the partition"));
                }
                (*s, *d)
            }
        };
        let subsets: Vec<(usize, u64, f64)> = (1..1usize << partition.blocks())
            .filter_map(|m| {
                let v = partition.subset_nodes(m);
                let pairs = pair_count(v);
                (pairs > 0).then(|| (m, partition.internal_pair_mask(m), pairs as f64 * s.powi(d as i32)))
            })
            .collect();
        let kind = match model {
            DecoderModel::Genie { positions, domain, profile, s } => {
                let mut absent = Vec::with_capacity(pair_count(n));
                let mut present = Vec::with_capacity(pair_count(n));
                for k in 0..pair_count(n) {
                    let (i, j) = pair_nodes(k);
                    let ep = profile.edge_prob(domain.distance_unchecked(positions.point(i), positions.point(j)) / s);
                    absent.push(ep.surprisal_bits(false));
                    present.push(ep.surprisal_bits(true));
                }
                ScorerKind::Genie { absent, present }
            }
            DecoderModel::Table { table, .. } => {
                let all = (1u64 << pair_count(n)) - 1;
                let complements = subsets
                    .iter()
                    .map(|&(_, internal, _)| {
                        let outside = all & !internal;
                        let mut marg = std::collections::HashMap::new();
                        for (g, &p) in table.probabilities().iter().enumerate() {
                            *marg.entry(g as u64 & outside).or_insert(0.0) += p;
                        }
                        (outside, marg)
                    })
                    .collect();
                ScorerKind::Table { table, complements }
            }
        };
        Ok(TypicalityScorer { subsets, kind, params })
    }

    fn typical(&self, g: u64) -> bool {
        let center = self.params.center.value();
        self.subsets.iter().enumerate().all(|(idx, &(_, internal, norm))| {
            let info = match &self.kind {
                ScorerKind::Genie { absent, present } => {
                    let mut bits = 0.0;
                    let mut rest = internal;
                    while rest != 0 {
                        let k = rest.trailing_zeros() as usize;
                        bits += if g >> k & 1 == 1 { present[k] } else { absent[k] };
                        rest &= rest - 1;
                    }
                    bits
                }
                ScorerKind::Table { table, complements } => {
                    let (outside, marg) = &complements[idx];
                    let joint = table.prob(g as usize);
                    let cond = marg.get(&(g & outside)).copied().unwrap_or(0.0);
                    if joint <= 0.0 || cond <= 0.0 {
                        f64::INFINITY
                    } else {
                        cond.log2() - joint.log2()
                    }
                }
            };
            (info / norm - center).abs() <= self.params.epsilon
        })
    }
}

/// Searches for the unique typical graph whose block strings hash to
/// `indices`.
///
/// Pairs are assigned block by block: the pairs first touched by block `l`
/// are enumerated, then the candidate is pruned unless block `l` falls in
/// its bin.
pub fn decode(
    indices: &[u64],
    model: &DecoderModel<'_>,
    codebook: &BinningCodebook,
    partition: &BlockPartition,
    params: &DecodeParams,
) -> Result<DecodeOutcome> {
    let n = partition.n();
    let m = pair_count(n);
    if m > MAX_DECODE_PAIRS {
        return Err(Error::Size(format!("decoding needs C(n, 2) <= {MAX_DECODE_PAIRS}, got {m}")));
    }
    if indices.len() != partition.blocks() || codebook.bits().len() != partition.blocks() {
        return Err(Error::invalid("one index and one index width per block are required"));
    }
    let scorer = TypicalityScorer::new(model, partition, *params)?;
    let plan = DecodePlan::new(partition)?;
    let mut search = Search {
        plan: &plan,
        codebook,
        indices,
        scorer: &scorer,
        found: 0,
        first: None,
    };
    search.run(0, 0);
    Ok(match search.found {
        0 => DecodeOutcome { status: DecodeStatus::NoCandidate, graph: None, candidates: 0 },
        1 => DecodeOutcome { status: DecodeStatus::Decoded, graph: search.first, candidates: 1 },
        c => DecodeOutcome { status: DecodeStatus::Collision, graph: None, candidates: c },
    })
}

/// Pairs grouped by the first block they touch.
struct DecodePlan {
    groups: Vec<Vec<usize>>,
    block_pairs: Vec<Vec<usize>>,
}

impl DecodePlan {
    fn new(partition: &BlockPartition) -> Result<Self> {
        let mut groups = vec![Vec::new(); partition.blocks()];
        for k in 0..pair_count(partition.n()) {
            let (i, _) = pair_nodes(k);
            groups[partition.block_of(i)].push(k);
        }
        if let Some(g) = groups.iter().find(|g| g.len() > MAX_GROUP_PAIRS) {
            return Err(Error::Size(format!(
                "a block introduces {} unknown pairs, more than {MAX_GROUP_PAIRS}",
                g.len()
            )));
        }
        let block_pairs = (0..partition.blocks())
            .map(|l| partition.block_pairs(l))
            .collect::<Result<_>>()?;
        Ok(DecodePlan { groups, block_pairs })
    }
}

struct Search<'a> {
    plan: &'a DecodePlan,
    codebook: &'a BinningCodebook,
    indices: &'a [u64],
    scorer: &'a TypicalityScorer<'a>,
    found: usize,
    first: Option<u64>,
}

impl Search<'_> {
    fn run(&mut self, l: usize, partial: u64) {
        if l == self.plan.groups.len() {
            if self.scorer.typical(partial) {
                self.found += 1;
                self.first.get_or_insert(partial);
            }
            return;
        }
        let group = &self.plan.groups[l];
        for assignment in 0u64..1 << group.len() {
            let mut g = partial;
            for (t, &k) in group.iter().enumerate() {
                g |= (assignment >> t & 1) << k;
            }
            let block = block_from_mask(g, &self.plan.block_pairs[l]);
            if self.codebook.bin_index(l, &block) == self.indices[l] {
                self.run(l + 1, g);
            }
        }
    }
}

/// Encodes `graph` with every block's codebook.
pub fn encode(graph: &Srgg, partition: &BlockPartition, codebook: &BinningCodebook) -> Result<Vec<u64>> {
    (0..partition.blocks())
        .map(|l| extract_block(graph, partition, l).map(|b| codebook.bin_index(l, &b)))
        .collect()
}

/// How the typical-set center is chosen in a simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CenterKind {
    HStar,
    FiniteN,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DscConfig {
    pub n: usize,
    pub blocks: usize,
    pub domain: DomainSpec,
    pub profile: ConnectionProfile,
    pub schedule: SparsitySchedule,
    /// Rates at `gamma = 1`.
    pub rates: RateTuple,
    pub gammas: Vec<f64>,
    pub epsilon: f64,
    pub center: CenterKind,
    pub trials: usize,
    pub seed: u64,
}

/// The smallest uniform rate per block that puts every constraint of the
/// region on its boundary or inside: `max_Lambda rate_bound(Lambda)/|Lambda|`.
pub fn corner_rates(blocks: usize, schedule: &SparsitySchedule, hstar: f64) -> Result<RateTuple> {
    let mut best = 0.0f64;
    for subset in 1..1usize << blocks {
        best = best.max(rate_bound(blocks, subset, schedule, hstar)? / subset.count_ones() as f64);
    }
    RateTuple::uniform(blocks, best)
}

/// The smallest `gamma` at which every block's codebook is injective.
pub fn injective_gamma(partition: &BlockPartition, rates: &RateTuple, s: f64, d: usize) -> Result<f64> {
    let block_len = partition.block_pairs(0)?.len() as f64;
    let unit = partition.n() as f64 * (partition.n() as f64 - 1.0) * s.powi(d as i32) / partition.blocks() as f64;
    let mut gamma = 0.0f64;
    for &r in rates.rates() {
        if r <= 0.0 {
            return Err(Error::invalid("a zero rate can never be injective"));
        }
        // bits = floor(unit r gamma + 1/2) >= len  iff  unit r gamma >= len - 1/2
        gamma = gamma.max((block_len - 0.5) / (unit * r));
    }
    Ok(gamma * (1.0 + 1e-12))
}

/// One trial at one `gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub gamma: f64,
    pub status: DecodeStatus,
    pub atypical: bool,
    pub collision: bool,
    pub seed: u64,
}

impl TrialRecord {
    pub fn is_error(&self) -> bool {
        self.status != DecodeStatus::Decoded
    }
}

/// Error statistics at one `gamma`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DscCell {
    pub gamma: f64,
    pub bits: Vec<u32>,
    pub trials: usize,
    pub errors: usize,
    pub atypical: usize,
    pub collisions: usize,
    pub no_candidate: usize,
    pub p_error: f64,
    pub ci: (f64, f64),
    pub collision_rate: f64,
    pub collision_ci: (f64, f64),
    /// Mean over trials of `sum_{typical g' != g} 2^(-bits(Lambda(g')))`,
    /// where `Lambda(g')` are the blocks on which `g'` differs from `g`.
    pub union_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DscReport {
    pub s: f64,
    pub center: f64,
    pub cells: Vec<DscCell>,
    pub records: Vec<TrialRecord>,
}

/// Monte Carlo error probability of the binning scheme.
///
/// Trial `t` draws its graph and its codebook key from seeds derived from
/// `(seed, t)`; the same pair is reused at every `gamma`, so the sweep is a
/// paired comparison.
pub fn simulate_dsc(cfg: &DscConfig) -> Result<DscReport> {
    let partition = BlockPartition::new(cfg.n, cfg.blocks)?;
    if cfg.rates.blocks() != cfg.blocks {
        return Err(Error::invalid("rate tuple length must equal the block count"));
    }
    if !(cfg.epsilon > 0.0) {
        return Err(Error::invalid(format!("epsilon must be positive, got {}", cfg.epsilon)));
    }
    let d = cfg.domain.dimension();
    if cfg.schedule.dimension() != d {
        return Err(Error::Dimension { expected: d, got: cfg.schedule.dimension() });
    }
    let s = cfg.schedule.sparsity(cfg.n)?;
    let center = match cfg.center {
        CenterKind::HStar => TypicalityCenter::HStar(crate::infotheory::h_star(&cfg.profile, d)?),
        CenterKind::FiniteN => {
            TypicalityCenter::FiniteN(conditional_entropy(&cfg.domain, &cfg.profile, cfg.n.max(2), s)?.normalized)
        }
    };
    let params = DecodeParams { epsilon: cfg.epsilon, center };
    let codebooks_bits = cfg
        .gammas
        .iter()
        .map(|&g| {
            let r = cfg.rates.scaled(g)?;
            BinningCodebook::new(&partition, &r, s, d, 0).map(|c| c.bits().to_vec())
        })
        .collect::<Result<Vec<_>>>()?;
    let m = pair_count(cfg.n);
    let with_union = m <= MAX_UNION_BOUND_PAIRS;

    let per_trial: Vec<(Vec<TrialRecord>, Vec<f64>)> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| -> Result<_> {
            let graph_seed = rng::derive_path(cfg.seed, &[t as u64, 0]);
            let key = rng::derive_path(cfg.seed, &[t as u64, 1]);
            let graph = sample_srgg(cfg.n, cfg.domain, cfg.profile, s, graph_seed)?;
            let truth = graph.pair_mask().expect("decodable graphs fit one word");
            let model = DecoderModel::Genie {
                positions: graph.positions(),
                domain: cfg.domain,
                profile: cfg.profile,
                s,
            };
            let scorer = TypicalityScorer::new(&model, &partition, params)?;
            let atypical = !scorer.typical(truth);
            let differing = if with_union && !atypical {
                Some(typical_neighbours_by_blocks(&scorer, &partition, truth))
            } else {
                None
            };
            let mut records = Vec::with_capacity(cfg.gammas.len());
            let mut bounds = Vec::with_capacity(cfg.gammas.len());
            for (&gamma, bits) in cfg.gammas.iter().zip(&codebooks_bits) {
                let codebook = BinningCodebook::with_bits(&partition, bits.clone(), key)?;
                let indices = encode(&graph, &partition, &codebook)?;
                let out = decode(&indices, &model, &codebook, &partition, &params)?;
                let status = if atypical { DecodeStatus::AtypicalSource } else { out.status };
                records.push(TrialRecord {
                    trial: t,
                    gamma,
                    status,
                    atypical,
                    collision: out.candidates > 1,
                    seed: graph_seed,
                });
                bounds.push(match &differing {
                    Some(counts) => union_bound_term(counts, &codebook),
                    None => 0.0,
                });
            }
            Ok((records, bounds))
        })
        .collect::<Result<_>>()?;

    let mut cells = Vec::with_capacity(cfg.gammas.len());
    for (c, (&gamma, bits)) in cfg.gammas.iter().zip(&codebooks_bits).enumerate() {
        let recs = per_trial.iter().map(|(r, _)| &r[c]);
        let errors = recs.clone().filter(|r| r.is_error()).count();
        let atypical = recs.clone().filter(|r| r.atypical).count();
        let collisions = recs.clone().filter(|r| r.status == DecodeStatus::Collision).count();
        let no_candidate = recs.filter(|r| r.status == DecodeStatus::NoCandidate).count();
        let tr = cfg.trials.max(1) as f64;
        cells.push(DscCell {
            gamma,
            bits: bits.clone(),
            trials: cfg.trials,
            errors,
            atypical,
            collisions,
            no_candidate,
            p_error: errors as f64 / tr,
            ci: wilson_interval(errors as u64, cfg.trials as u64, Z95),
            collision_rate: collisions as f64 / tr,
            collision_ci: wilson_interval(collisions as u64, cfg.trials as u64, Z95),
            union_bound: with_union.then(|| per_trial.iter().map(|(_, b)| b[c]).sum::<f64>() / tr),
        });
    }
    let mut records = Vec::with_capacity(cfg.trials * cfg.gammas.len());
    for c in 0..cfg.gammas.len() {
        records.extend(per_trial.iter().map(|(r, _)| r[c]));
    }
    Ok(DscReport {
        s,
        center: center.value(),
        cells,
        records,
    })
}

/// Counts typical graphs other than `truth`, keyed by the set of blocks on
/// which they differ from it.
fn typical_neighbours_by_blocks(scorer: &TypicalityScorer<'_>, partition: &BlockPartition, truth: u64) -> Vec<u64> {
    let masks: Vec<u64> = (0..partition.blocks()).map(|l| partition.block_pair_mask(l)).collect();
    let mut counts = vec![0u64; 1 << partition.blocks()];
    let m = pair_count(partition.n());
    for g in 0u64..1 << m {
        if g == truth || !scorer.typical(g) {
            continue;
        }
        let diff = g ^ truth;
        let lambda = masks.iter().enumerate().fold(0, |acc, (l, &bm)| acc | ((diff & bm != 0) as usize) << l);
        counts[lambda] += 1;
    }
    counts
}

fn union_bound_term(counts: &[u64], codebook: &BinningCodebook) -> f64 {
    counts
        .iter()
        .enumerate()
        .filter(|(lambda, &c)| c > 0 && *lambda > 0)
        .map(|(lambda, &c)| {
            let injective = (0..codebook.bits().len()).any(|l| lambda >> l & 1 == 1 && codebook.is_injective(l));
            if injective {
                0.0
            } else {
                c as f64 * (-(codebook.subset_bits(lambda) as f64)).exp2()
            }
        })
        .sum()
}

/// Writes `trial,n,L,gamma,epsilon,outcome,atypical,collision,seed` rows
/// after the column header.
pub fn write_dsc_csv<W: Write>(cfg: &DscConfig, report: &DscReport, mut w: W) -> Result<()> {
    writeln!(w, "trial,n,L,gamma,epsilon,outcome,atypical,collision,seed")?;
    for r in &report.records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.trial,
            cfg.n,
            cfg.blocks,
            r.gamma,
            cfg.epsilon,
            r.status.label(),
            r.atypical as u8,
            r.collision as u8,
            r.seed
        )?;
    }
    Ok(())
}
