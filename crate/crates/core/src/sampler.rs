//! SRGG realizations: sampling, pair layout and the text graph format.
//!
//! Pairs `i < j` are stored bit-packed at linear index `k(i, j) = C(j, 2) + i`
//! (0-based nodes). The block encoders in [`crate::dsc`] hash block strings
//! built from this exact ordering, so it must not change.

use std::io::{BufRead, Write};

use rand::Rng;

use crate::connection::ConnectionProfile;
use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, PointSet, Shape};
use crate::rng;

/// Linear index of pair `(i, j)`, `i < j`.
#[inline]
pub fn pair_index(i: usize, j: usize) -> usize {
    debug_assert!(i < j);
    j * (j - 1) / 2 + i
}

/// Inverse of [`pair_index`].
pub fn pair_nodes(k: usize) -> (usize, usize) {
    // Largest j with C(j, 2) <= k.
    let mut j = ((1.0 + (1.0 + 8.0 * k as f64).sqrt()) / 2.0) as usize;
    while j * (j - 1) / 2 > k {
        j -= 1;
    }
    while (j + 1) * j / 2 <= k {
        j += 1;
    }
    (k - j * (j - 1) / 2, j)
}

pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Provenance of a realization.
#[derive(Debug, Clone, PartialEq)]
pub struct SrggMeta {
    pub domain: DomainSpec,
    pub profile: ConnectionProfile,
    pub s: f64,
    pub seed: u64,
}

/// One soft random geometric graph with the positions that generated it.
#[derive(Debug, Clone, PartialEq)]
pub struct Srgg {
    n: usize,
    edges: Vec<u64>,
    positions: PointSet,
    meta: SrggMeta,
}

impl Srgg {
    /// Builds a graph from explicit parts. `edges` lists pairs `(i, j)` with
    /// `i < j < n`.
    pub fn from_parts(positions: PointSet, edges: &[(usize, usize)], meta: SrggMeta) -> Result<Self> {
        let n = positions.len();
        if positions.dimension() != meta.domain.dimension() {
            return Err(Error::Dimension {
                expected: meta.domain.dimension(),
                got: positions.dimension(),
            });
        }
        let mut graph = Srgg {
            n,
            edges: vec![0; pair_count(n).div_ceil(64)],
            positions,
            meta,
        };
        for &(i, j) in edges {
            if i >= j || j >= n {
                return Err(Error::invalid(format!("edge ({i}, {j}) is not a pair i < j < {n}")));
            }
            graph.set(pair_index(i, j));
        }
        Ok(graph)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn positions(&self) -> &PointSet {
        &self.positions
    }

    pub fn meta(&self) -> &SrggMeta {
        &self.meta
    }

    pub fn pair_count(&self) -> usize {
        pair_count(self.n)
    }

    #[inline]
    fn set(&mut self, k: usize) {
        self.edges[k / 64] |= 1 << (k % 64);
    }

    /// Indicator of pair index `k`.
    #[inline]
    pub fn has_pair(&self, k: usize) -> bool {
        self.edges[k / 64] >> (k % 64) & 1 == 1
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.has_pair(pair_index(i, j)),
            std::cmp::Ordering::Greater => self.has_pair(pair_index(j, i)),
            std::cmp::Ordering::Equal => false,
        }
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Edges `(i, j)`, `i < j`, in pair order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.pair_count()).filter(|&k| self.has_pair(k)).map(pair_nodes)
    }

    /// The edge set as a `u64` mask over pair indices; `None` if more than
    /// 64 pairs.
    pub fn pair_mask(&self) -> Option<u64> {
        if self.pair_count() > 64 {
            None
        } else {
            Some(self.edges.first().copied().unwrap_or(0))
        }
    }

    /// Distance between nodes `i` and `j` in the generating domain.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.meta
            .domain
            .distance_unchecked(self.positions.point(i), self.positions.point(j))
    }

    /// Writes the `srgg v1` text format.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "srgg v1 n={} d={} s={} profile={} seed={}",
            self.n,
            self.meta.domain.dimension(),
            self.meta.s,
            self.meta.profile.name(),
            self.meta.seed
        )?;
        for (i, p) in self.positions.iter().enumerate() {
            write!(w, "v {i}")?;
            for x in p {
                write!(w, " {x}")?;
            }
            writeln!(w)?;
        }
        for (i, j) in self.edges() {
            writeln!(w, "e {i} {j}")?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("format is ASCII")
    }

    /// Reads the `srgg v1` text format. The header carries the dimension but
    /// not the boundary type, so the caller supplies `shape`.
    pub fn read_from<R: BufRead>(reader: R, shape: Shape) -> Result<Self> {
        let mut lines = reader.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or(Error::Parse { line: 1, msg: "empty input".into() })?;
        let header = header?;
        let mut fields = header.split_whitespace();
        if fields.next() != Some("srgg") || fields.next() != Some("v1") {
            return Err(Error::Parse {
                line: 1,
                msg: "expected 'srgg v1' header".into(),
            });
        }
        let mut values = [None::<&str>; 5];
        let keys = ["n", "d", "s", "profile", "seed"];
        for (slot, key) in values.iter_mut().zip(keys) {
            let field = fields.next().ok_or_else(|| Error::Parse {
                line: 1,
                msg: format!("missing header field '{key}'"),
            })?;
            *slot = field.strip_prefix(key).and_then(|v| v.strip_prefix('='));
            if slot.is_none() {
                return Err(Error::Parse {
                    line: 1,
                    msg: format!("expected '{key}=', found '{field}'"),
                });
            }
        }
        if fields.next().is_some() {
            return Err(Error::Parse { line: 1, msg: "trailing header fields".into() });
        }
        let bad = |msg: String| Error::Parse { line: 1, msg };
        let n: usize = values[0].unwrap().parse().map_err(|e| bad(format!("n: {e}")))?;
        let d: usize = values[1].unwrap().parse().map_err(|e| bad(format!("d: {e}")))?;
        let s: f64 = values[2].unwrap().parse().map_err(|e| bad(format!("s: {e}")))?;
        let profile: ConnectionProfile = values[3].unwrap().parse()?;
        let seed: u64 = values[4].unwrap().parse().map_err(|e| bad(format!("seed: {e}")))?;
        let domain = DomainSpec::new(d, shape)?;

        let mut coords = Vec::with_capacity(n * d);
        let mut edges = Vec::new();
        for (idx, line) in lines {
            let line_no = idx + 1;
            let line = line?;
            let err = |msg: &str| Error::Parse { line: line_no, msg: msg.to_string() };
            let mut parts = line.split_whitespace();
            match parts.next() {
                Some("v") => {
                    let i: usize = parts.next().and_then(|t| t.parse().ok()).ok_or_else(|| err("bad node index"))?;
                    if i != coords.len() / d.max(1) || !edges.is_empty() {
                        return Err(err("node lines must be in order and precede edges"));
                    }
                    for _ in 0..d {
                        let x: f64 = parts.next().and_then(|t| t.parse().ok()).ok_or_else(|| err("bad coordinate"))?;
                        coords.push(x);
                    }
                    if parts.next().is_some() {
                        return Err(err("too many coordinates"));
                    }
                }
                Some("e") => {
                    let i: usize = parts.next().and_then(|t| t.parse().ok()).ok_or_else(|| err("bad edge endpoint"))?;
                    let j: usize = parts.next().and_then(|t| t.parse().ok()).ok_or_else(|| err("bad edge endpoint"))?;
                    if parts.next().is_some() {
                        return Err(err("trailing tokens on edge line"));
                    }
                    edges.push((i, j));
                }
                None => {}
                Some(_) => return Err(err("unknown record type")),
            }
        }
        if coords.len() != n * d {
            return Err(Error::Parse {
                line: 1,
                msg: format!("header says n={n} but {} nodes were listed", coords.len() / d.max(1)),
            });
        }
        let positions = PointSet::new(d, coords)?;
        Srgg::from_parts(positions, &edges, SrggMeta { domain, profile, s, seed })
    }
}

/// Samples an SRGG from a 64-bit seed: positions first, then one uniform per
/// pair in pair order.
pub fn sample_srgg(
    n: usize,
    domain: DomainSpec,
    profile: ConnectionProfile,
    s: f64,
    seed: u64,
) -> Result<Srgg> {
    if n == 0 {
        return Err(Error::invalid("an SRGG needs at least one node"));
    }
    if !(s > 0.0) {
        return Err(Error::domain(format!("sparsity must be positive, got {s}")));
    }
    let mut rng = rng::stream(seed);
    Ok(sample_with_rng(n, domain, profile, s, seed, &mut rng))
}

pub(crate) fn sample_with_rng<R: Rng + ?Sized>(
    n: usize,
    domain: DomainSpec,
    profile: ConnectionProfile,
    s: f64,
    seed: u64,
    rng: &mut R,
) -> Srgg {
    let positions = domain.sample_points(n, rng);
    let mut graph = Srgg {
        n,
        edges: vec![0; pair_count(n).div_ceil(64)],
        positions,
        meta: SrggMeta { domain, profile, s, seed },
    };
    let inv_s = 1.0 / s;
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            let r = graph.distance(i, j);
            let p = profile.edge_prob(r * inv_s).p;
            if rng.gen::<f64>() < p {
                graph.set(k);
            }
            k += 1;
        }
    }
    graph
}

/// `C(n, 2) E[p(R / s)]`.
pub fn expected_edge_count(domain: &DomainSpec, profile: &ConnectionProfile, n: usize, s: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::invalid(format!("expected edge count needs n >= 2, got {n}")));
    }
    if !(s > 0.0) {
        return Err(Error::domain(format!("sparsity must be positive, got {s}")));
    }
    let per_pair = domain.expect_over_distance(|r| profile.edge_prob(r / s).p, s)?;
    Ok(pair_count(n) as f64 * per_pair.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn torus() -> DomainSpec {
        DomainSpec::unit_torus(2).unwrap()
    }

    #[test]
    fn pair_layout() {
        assert_eq!(pair_index(0, 1), 0);
        assert_eq!(pair_index(0, 2), 1);
        assert_eq!(pair_index(1, 2), 2);
        assert_eq!(pair_index(0, 3), 3);
        for k in 0..5000 {
            let (i, j) = pair_nodes(k);
            assert!(i < j);
            assert_eq!(pair_index(i, j), k);
        }
    }

    #[test]
    fn single_node_has_no_edges() {
        let g = sample_srgg(1, torus(), ConnectionProfile::Rayleigh, 0.1, 1).unwrap();
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.pair_count(), 0);
        assert!(sample_srgg(0, torus(), ConnectionProfile::Rayleigh, 0.1, 1).is_err());
    }

    #[test]
    fn vanishing_range_gives_empty_graph() {
        let g = sample_srgg(50, torus(), ConnectionProfile::Rayleigh, 1e-9, 3).unwrap();
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn expected_edge_count_examples() {
        let dom = torus();
        let e = expected_edge_count(&dom, &ConnectionProfile::Rayleigh, 100, 0.05).unwrap();
        let exact = 4950.0 * std::f64::consts::PI * 0.0025;
        assert!((e - exact).abs() < 1e-9 * exact, "{e} vs {exact}");
        assert!((e - 38.877).abs() < 1e-3);
        let per_pair = expected_edge_count(&dom, &ConnectionProfile::Rayleigh, 2, 0.05).unwrap();
        assert!((per_pair - 0.007854).abs() < 1e-6);
        let tiny = expected_edge_count(&dom, &ConnectionProfile::Rayleigh, 2, 1e-6).unwrap();
        assert!(tiny < 1e-10);
    }

    #[test]
    fn text_format_round_trip() {
        let g = sample_srgg(12, torus(), ConnectionProfile::Rayleigh, 0.3, 99).unwrap();
        let text = g.to_text();
        assert!(text.starts_with("srgg v1 n=12 d=2 s=0.3 profile=rayleigh seed=99\n"));
        let back = Srgg::read_from(text.as_bytes(), Shape::Torus).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn malformed_files_rejected() {
        let bad_header = "graph v1 n=1 d=2 s=0.1 profile=rayleigh seed=0\nv 0 0.1 0.2\n";
        assert!(Srgg::read_from(bad_header.as_bytes(), Shape::Torus).is_err());
        let bad_edge = "srgg v1 n=2 d=1 s=0.1 profile=rayleigh seed=0\nv 0 0.1\nv 1 0.2\ne 1 0\n";
        assert!(Srgg::read_from(bad_edge.as_bytes(), Shape::Cube).is_err());
        let missing_node = "srgg v1 n=3 d=1 s=0.1 profile=rayleigh seed=0\nv 0 0.1\nv 1 0.2\n";
        assert!(Srgg::read_from(missing_node.as_bytes(), Shape::Cube).is_err());
    }

    proptest! {
        #[test]
        fn round_trip_any_graph(n in 1usize..20, seed in any::<u64>(), s in 0.01f64..1.0) {
            let dom = DomainSpec::unit_square();
            let g = sample_srgg(n, dom, ConnectionProfile::Exponential, s, seed).unwrap();
            let text = g.to_text();
            let back = Srgg::read_from(text.as_bytes(), Shape::Cube).unwrap();
            prop_assert_eq!(back.to_text(), text);
            prop_assert_eq!(back, g);
        }

        #[test]
        fn sampling_deterministic(seed in any::<u64>()) {
            let a = sample_srgg(15, torus(), ConnectionProfile::Rayleigh, 0.2, seed).unwrap();
            let b = sample_srgg(15, torus(), ConnectionProfile::Rayleigh, 0.2, seed).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
