//! The k-neighbour rule: a vacant vertex with at least `k` occupied
//! neighbours becomes occupied. Occupied vertices stay occupied.
//!
//! Rounds are synchronous. After the first round only neighbours of the
//! vertices occupied in the previous round are re-examined, so a full run
//! costs O(n + m). Because the rule is monotone, the final configuration is
//! the least fixed point above the start and does not depend on the update
//! order.
//!
//! Boundary vertices of truncated trees get no special treatment here;
//! callers model "occupied beyond the horizon" by pre-occupying them.

use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::graph::Graph;

/// Occupied/vacant state of every vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SiteConfig {
    bits: FixedBitSet,
}

impl SiteConfig {
    pub fn empty(n: usize) -> Self {
        Self { bits: FixedBitSet::with_capacity(n) }
    }

    pub fn full(n: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(n);
        bits.insert_range(..);
        Self { bits }
    }

    pub fn from_vertices(n: usize, occupied: impl IntoIterator<Item = usize>) -> Self {
        let mut c = Self::empty(n);
        for v in occupied {
            c.bits.insert(v);
        }
        c
    }

    /// Number of vertices the configuration is defined on.
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.len() == 0
    }

    #[inline]
    pub fn is_occupied(&self, v: usize) -> bool {
        self.bits.contains(v)
    }

    pub fn occupy(&mut self, v: usize) {
        self.bits.insert(v);
    }

    pub fn occupied_count(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_full(&self) -> bool {
        self.occupied_count() == self.len()
    }

    pub fn occupied(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn vacant(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.zeroes()
    }

    pub fn is_subset(&self, other: &SiteConfig) -> bool {
        self.bits.is_subset(&other.bits)
    }

    /// Hex encoding `"<n>:<hex>"`. Vertex `i` is bit `i % 8` of byte `i / 8`;
    /// bytes are written in order, two lowercase hex digits each.
    pub fn to_hex(&self) -> String {
        let n = self.len();
        let mut bytes = vec![0u8; n.div_ceil(8)];
        for v in self.bits.ones() {
            bytes[v / 8] |= 1 << (v % 8);
        }
        format!("{n}:{}", hex::encode(bytes))
    }

    pub fn from_hex(text: &str) -> Result<Self> {
        let bad = |message: String| Error::Parse { line: 1, message };
        let (n, digits) = text.trim().split_once(':').ok_or_else(|| bad("expected <n>:<hex>".into()))?;
        let n: usize = n.parse().map_err(|_| bad(format!("bad vertex count {n:?}")))?;
        if digits.len() != 2 * n.div_ceil(8) {
            return Err(bad(format!(
                "expected {} hex digits for {n} vertices, found {}",
                2 * n.div_ceil(8),
                digits.len()
            )));
        }
        let bytes = hex::decode(digits).map_err(|e| bad(format!("bad hex: {e}")))?;
        let mut c = Self::empty(n);
        for (i, byte) in bytes.iter().enumerate() {
            for bit in 0..8 {
                if byte & (1 << bit) != 0 {
                    let v = 8 * i + bit;
                    if v >= n {
                        return Err(bad(format!("padding bit {v} set beyond n = {n}")));
                    }
                    c.bits.insert(v);
                }
            }
        }
        Ok(c)
    }
}

impl fmt::Display for SiteConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl FromStr for SiteConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_hex(s)
    }
}

impl Serialize for SiteConfig {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for SiteConfig {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Self::from_hex(&s).map_err(serde::de::Error::custom)
    }
}

/// Outcome of [`run`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunReport {
    pub final_config: SiteConfig,
    /// Number of rounds, including the terminal round that adds nothing.
    pub rounds: usize,
    /// Vertices added in each round; the last entry is always 0.
    pub newly_occupied_per_round: Vec<usize>,
}

/// JSON export record of a [`RunReport`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunSummary {
    pub rounds: usize,
    pub counts: Vec<usize>,
    pub occupied_count: usize,
}

impl RunReport {
    pub fn summary(&self) -> RunSummary {
        RunSummary {
            rounds: self.rounds,
            counts: self.newly_occupied_per_round.clone(),
            occupied_count: self.final_config.occupied_count(),
        }
    }

    pub fn completely_occupied(&self) -> bool {
        self.final_config.is_full()
    }
}

fn check_rule(g: &Graph, c: &SiteConfig, k: usize) -> Result<()> {
    if k < 1 {
        return Err(invalid("threshold k must be at least 1"));
    }
    if c.len() != g.vertex_count() {
        return Err(invalid(format!("configuration has {} sites, graph has {} vertices", c.len(), g.vertex_count())));
    }
    Ok(())
}

fn occupied_neighbours(g: &Graph, c: &SiteConfig, v: usize) -> usize {
    g.neighbors(v).iter().filter(|&&w| c.is_occupied(w)).count()
}

/// One synchronous round of the rule.
pub fn step(g: &Graph, c: &SiteConfig, k: usize) -> Result<SiteConfig> {
    check_rule(g, c, k)?;
    let mut next = c.clone();
    for v in c.vacant() {
        if occupied_neighbours(g, c, v) >= k {
            next.occupy(v);
        }
    }
    Ok(next)
}

/// Iterates the rule to its fixed point.
pub fn run(g: &Graph, c0: &SiteConfig, k: usize) -> Result<RunReport> {
    check_rule(g, c0, k)?;
    Ok(run_masked(g, c0, k, None))
}

/// Core loop. Vertices outside `mask` (when given) are held vacant.
pub(crate) fn run_masked(g: &Graph, c0: &SiteConfig, k: usize, mask: Option<&[bool]>) -> RunReport {
    let n = g.vertex_count();
    let active = |v: usize| mask.is_none_or(|m| m[v]);
    let mut config = c0.clone();
    if let Some(m) = mask {
        for v in c0.occupied() {
            if !m[v] {
                config.bits.set(v, false);
            }
        }
    }
    let mut count = vec![0u32; n];
    for v in config.occupied() {
        for &w in g.neighbors(v) {
            count[w] += 1;
        }
    }
    let threshold = k as u32;
    let mut queued = vec![false; n];
    let mut candidates: Vec<usize> =
        (0..n).filter(|&v| active(v) && !config.is_occupied(v) && count[v] >= threshold).collect();
    for &v in &candidates {
        queued[v] = true;
    }
    let mut per_round = Vec::new();
    loop {
        for &v in &candidates {
            queued[v] = false;
        }
        let fresh = std::mem::take(&mut candidates);
        per_round.push(fresh.len());
        if fresh.is_empty() {
            break;
        }
        for &v in &fresh {
            config.occupy(v);
        }
        for &v in &fresh {
            for &w in g.neighbors(v) {
                count[w] += 1;
                if !queued[w] && active(w) && !config.is_occupied(w) && count[w] >= threshold {
                    queued[w] = true;
                    candidates.push(w);
                }
            }
        }
    }
    RunReport { final_config: config, rounds: per_round.len(), newly_occupied_per_round: per_round }
}

/// Whether `s` fills up when the dynamics is restricted to `s`, i.e. with
/// every vertex outside `s` held vacant.
pub fn internally_spanned(g: &Graph, s: &[usize], c0: &SiteConfig, k: usize) -> Result<bool> {
    check_rule(g, c0, k)?;
    if let Some(&v) = s.iter().find(|&&v| v >= g.vertex_count()) {
        return Err(invalid(format!("vertex {v} not in graph")));
    }
    let mut mask = vec![false; g.vertex_count()];
    for &v in s {
        mask[v] = true;
    }
    let report = run_masked(g, c0, k, Some(&mask));
    Ok(s.iter().all(|&v| report.final_config.is_occupied(v)))
}

/// Strictly increasing chain `V_1 ⊂ V_2 ⊂ ...` of connected internally
/// spanned sets with `o ∈ V_1`.
///
/// `V_1` is an inclusion-minimal set in which `o` becomes occupied;
/// `V_{i+1}` is an inclusion-minimal set in which `V_i` plus its
/// smallest-id eventually-occupied neighbour all become occupied. Returned
/// sets are sorted and have at most `max_size` vertices; the chain stops
/// early once no occupied neighbour is left.
pub fn spanned_sequence(g: &Graph, o: usize, c0: &SiteConfig, k: usize, max_size: usize) -> Result<Vec<Vec<usize>>> {
    check_rule(g, c0, k)?;
    if o >= g.vertex_count() {
        return Err(invalid(format!("vertex {o} not in graph")));
    }
    let fin = run_masked(g, c0, k, None).final_config;
    if !fin.is_occupied(o) {
        return Err(Error::OriginNeverOccupied(o));
    }
    // vertices vacant at the end never contribute, and neither do occupied
    // vertices outside the occupied component of `o`
    let mut pool_mask = vec![false; g.vertex_count()];
    pool_mask[o] = true;
    let mut stack = vec![o];
    while let Some(v) = stack.pop() {
        for &w in g.neighbors(v) {
            if fin.is_occupied(w) && !pool_mask[w] {
                pool_mask[w] = true;
                stack.push(w);
            }
        }
    }
    let pool: Vec<usize> = (0..g.vertex_count()).filter(|&v| pool_mask[v]).collect();

    let minimal_support = |targets: &[usize]| -> Vec<usize> {
        let mut keep = pool_mask.clone();
        let mut is_target = vec![false; g.vertex_count()];
        for &t in targets {
            is_target[t] = true;
        }
        for &v in &pool {
            if is_target[v] {
                continue;
            }
            keep[v] = false;
            let report = run_masked(g, c0, k, Some(&keep));
            if !targets.iter().all(|&t| report.final_config.is_occupied(t)) {
                keep[v] = true;
            }
        }
        (0..g.vertex_count()).filter(|&v| keep[v]).collect()
    };

    let mut chain = Vec::new();
    let mut current = minimal_support(&[o]);
    while current.len() <= max_size {
        let member: Vec<bool> = {
            let mut m = vec![false; g.vertex_count()];
            for &v in &current {
                m[v] = true;
            }
            m
        };
        let next_vertex =
            current.iter().flat_map(|&v| g.neighbors(v).iter().copied()).filter(|&w| pool_mask[w] && !member[w]).min();
        chain.push(current.clone());
        let Some(w) = next_vertex else {
            break;
        };
        let mut targets = current.clone();
        targets.push(w);
        current = minimal_support(&targets);
    }
    Ok(chain)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star(leaves: usize) -> Graph {
        let edges: Vec<_> = (1..=leaves).map(|v| (0, v)).collect();
        Graph::from_edges(leaves + 1, &edges).unwrap()
    }

    fn path(n: usize) -> Graph {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn step_examples() {
        let g = star(5);
        let c = SiteConfig::from_vertices(6, [1, 2]);
        assert!(step(&g, &c, 2).unwrap().is_occupied(0));
        let c = SiteConfig::empty(6);
        assert_eq!(step(&g, &c, 2).unwrap(), c);
        let g = path(3);
        let c = SiteConfig::from_vertices(3, [0, 2]);
        assert!(step(&g, &c, 2).unwrap().is_full());
        assert!(step(&g, &c, 0).is_err());
        assert!(step(&g, &SiteConfig::empty(4), 1).is_err());
    }

    #[test]
    fn full_start_has_a_single_empty_round() {
        let g = path(4);
        let r = run(&g, &SiteConfig::full(4), 2).unwrap();
        assert_eq!(r.newly_occupied_per_round, vec![0]);
        assert_eq!(r.rounds, 1);
        assert!(r.completely_occupied());
    }

    #[test]
    fn path_fills_one_vertex_per_round_with_k1() {
        let g = path(5);
        let r = run(&g, &SiteConfig::from_vertices(5, [0]), 1).unwrap();
        assert_eq!(r.newly_occupied_per_round, vec![1, 1, 1, 1, 0]);
        assert_eq!(r.summary().occupied_count, 5);
    }

    #[test]
    fn hex_round_trip_and_errors() {
        let c = SiteConfig::from_vertices(11, [0, 3, 8, 10]);
        let text = c.to_hex();
        assert_eq!(text, "11:0905");
        assert_eq!(SiteConfig::from_hex(&text).unwrap(), c);
        assert!(SiteConfig::from_hex("11:09").is_err());
        assert!(SiteConfig::from_hex("11:09f5").is_err()); // padding bits
        assert!(SiteConfig::from_hex("0905").is_err());
        assert!(SiteConfig::from_hex("3:zz").is_err());
        assert_eq!(SiteConfig::from_hex("0:").unwrap().len(), 0);
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<SiteConfig>(&json).unwrap(), c);
    }

    #[test]
    fn internally_spanned_basics() {
        let g = path(3);
        let c = SiteConfig::from_vertices(3, [1]);
        assert!(internally_spanned(&g, &[1], &c, 2).unwrap());
        assert!(!internally_spanned(&g, &[0], &c, 2).unwrap());
        // the middle vertex needs both ends; restricting to {0, 1} loses 2
        let c = SiteConfig::from_vertices(3, [0, 2]);
        assert!(internally_spanned(&g, &[0, 1, 2], &c, 2).unwrap());
        assert!(!internally_spanned(&g, &[0, 1], &c, 2).unwrap());
    }

    #[test]
    fn spanned_sequence_from_occupied_origin() {
        let g = path(4);
        let c = SiteConfig::full(4);
        let seq = spanned_sequence(&g, 1, &c, 2, 10).unwrap();
        assert_eq!(seq[0], vec![1]);
        assert_eq!(seq[1], vec![0, 1]);
        assert_eq!(seq.len(), 4);
        assert!(matches!(spanned_sequence(&g, 1, &SiteConfig::empty(4), 2, 10), Err(Error::OriginNeverOccupied(1))));
    }
}
