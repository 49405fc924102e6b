//! Forts: connected sets whose members each have at most `k` neighbours
//! outside the set.
//!
//! Under the k-neighbour rule a vacant (k-1)-fort can never be entered, and
//! on a tree failure of complete occupation leaves one behind. This module
//! checks forts, finds them with the red and blue colourings, and searches
//! for small ones exhaustively.

use serde::{Deserialize, Serialize};

use crate::animals::{smallest_accepted, Budget};
use crate::error::{invalid, Error, Result};
use crate::graph::{Graph, RootedTree};

fn outdegree(g: &Graph, member: &[bool], v: usize) -> usize {
    g.neighbors(v).iter().filter(|&&w| !member[w]).count()
}

/// True iff `f` is connected and no member has more than `k` neighbours
/// outside `f`.
pub fn is_fort(g: &Graph, f: &[usize], k: usize) -> Result<bool> {
    if f.is_empty() {
        return Err(invalid("a fort must be non-empty"));
    }
    let n = g.vertex_count();
    let mut member = vec![false; n];
    for &v in f {
        if v >= n {
            return Err(invalid(format!("vertex {v} not in graph")));
        }
        member[v] = true;
    }
    Ok(f.iter().all(|&v| outdegree(g, &member, v) <= k) && g.is_connected_subset(f))
}

/// A set verified to be a `k`-fort of the graph with fingerprint `host_hash`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FortCertificate {
    pub k: usize,
    /// Sorted, distinct.
    pub vertices: Vec<usize>,
    #[serde(with = "hex_u64")]
    pub host_hash: u64,
}

mod hex_u64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &u64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{v:016x}"))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        let s = String::deserialize(d)?;
        if s.len() != 16 {
            return Err(serde::de::Error::custom("host_hash must be 16 hex digits"));
        }
        u64::from_str_radix(&s, 16).map_err(serde::de::Error::custom)
    }
}

impl FortCertificate {
    /// Verifies `vertices` and packages it. Fails with `Precondition` when
    /// the set is not a `k`-fort of `g`.
    pub fn new(g: &Graph, mut vertices: Vec<usize>, k: usize) -> Result<Self> {
        vertices.sort_unstable();
        vertices.dedup();
        if !is_fort(g, &vertices, k)? {
            return Err(Error::Precondition(format!("set of {} vertices is not a {k}-fort", vertices.len())));
        }
        Ok(Self { k, vertices, host_hash: g.fingerprint() })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Re-checks the certificate against `g`, including the host fingerprint.
    pub fn verify(&self, g: &Graph) -> bool {
        self.host_hash == g.fingerprint()
            && self.vertices.windows(2).all(|w| w[0] < w[1])
            && matches!(is_fort(g, &self.vertices, self.k), Ok(true))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), message: e.to_string() })
    }
}

/// How [`red_coloring`] treats vertices on the truncation boundary.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryMode {
    /// Boundary vertices have unknown children and are never painted.
    #[default]
    Open,
    /// The tree is taken as genuinely finite: boundary leaves have no children.
    Closed,
}

/// Fixed point of "paint red every vertex with at most k-1 non-red children".
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RedColoring {
    /// Round (1-based) in which each vertex was painted; `None` if never.
    pub round_painted: Vec<Option<usize>>,
}

impl RedColoring {
    pub fn is_red(&self, v: usize) -> bool {
        self.round_painted[v].is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RedOutcome {
    /// The root is red: a smallest finite (k-1)-fort containing it.
    Fort(FortCertificate),
    /// The root is not red: a subtree, down to the truncation, in which
    /// every vertex above the boundary keeps exactly `k` children.
    KarySubtree(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RedResult {
    pub coloring: RedColoring,
    pub outcome: RedOutcome,
}

/// Runs the red colouring bottom-up and extracts the witness at the root.
///
/// A vertex is painted in the first round at which at most `k - 1` of its
/// children are still unpainted, so its round is one more than the round of
/// its `(c - k + 1)`-th earliest red child. The witness fort picks, at every
/// vertex, the `c - k + 1` red children with the smallest witnesses.
pub fn red_coloring(t: &RootedTree, k: usize, mode: BoundaryMode) -> Result<RedResult> {
    if k < 1 {
        return Err(invalid("k must be at least 1"));
    }
    let n = t.vertex_count();
    let order = t.bfs_order();
    let mut round: Vec<Option<usize>> = vec![None; n];
    // size of the smallest finite fort hanging from v (v red)
    let mut witness = vec![0usize; n];
    let mut rounds = Vec::new();
    for &v in order.iter().rev() {
        if t.is_boundary(v) && mode == BoundaryMode::Open {
            continue;
        }
        let c = t.child_count(v);
        let need = (c + 1).saturating_sub(k);
        if need == 0 {
            round[v] = Some(1);
            witness[v] = 1;
            continue;
        }
        rounds.clear();
        rounds.extend(t.children(v).filter_map(|w| round[w]));
        if rounds.len() < need {
            continue;
        }
        rounds.sort_unstable();
        round[v] = Some(rounds[need - 1] + 1);
        let mut sizes: Vec<usize> = t.children(v).filter(|&w| round[w].is_some()).map(|w| witness[w]).collect();
        sizes.sort_unstable();
        witness[v] = 1 + sizes[..need].iter().sum::<usize>();
    }
    let coloring = RedColoring { round_painted: round };
    let root = t.root();
    let outcome = if coloring.is_red(root) {
        let mut fort = Vec::with_capacity(witness[root]);
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            fort.push(v);
            let need = (t.child_count(v) + 1).saturating_sub(k);
            let mut red: Vec<usize> = t.children(v).filter(|&w| coloring.is_red(w)).collect();
            red.sort_by_key(|&w| (witness[w], w));
            stack.extend_from_slice(&red[..need]);
        }
        RedOutcome::Fort(FortCertificate::new(t.graph(), fort, k - 1)?)
    } else {
        if t.is_boundary(root) {
            return Err(Error::Inconclusive("the root lies on the truncation boundary".into()));
        }
        let mut sub = Vec::new();
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            sub.push(v);
            if !t.is_boundary(v) {
                let mut kept: Vec<usize> = t.children(v).filter(|&w| !coloring.is_red(w)).collect();
                kept.sort_unstable();
                stack.extend_from_slice(&kept[..k]);
            }
        }
        sub.sort_unstable();
        RedOutcome::KarySubtree(sub)
    };
    Ok(RedResult { coloring, outcome })
}

/// Blue colouring below `x`: a vertex `r` levels below `x` is blue if
/// `r = big_r` and it has at least `k` children, or `r < big_r` and it has at
/// least `k` blue children. Returns the non-blue component of `x` inside
/// levels `0..=big_r`, which is a (k-1)-fort of `t`.
///
/// Requires `|L_R(x)| < (k-1) k^(R-1)`, relaxed to `k^R` when `x` is the root.
pub fn blue_fort(t: &RootedTree, x: usize, big_r: usize, k: usize) -> Result<FortCertificate> {
    if k < 2 {
        return Err(invalid("k must be at least 2"));
    }
    if big_r < 1 {
        return Err(invalid("R must be at least 1"));
    }
    if x >= t.vertex_count() {
        return Err(invalid(format!("vertex {x} not in tree")));
    }
    let level = t.level_set(x, big_r).len() as f64;
    let kf = k as f64;
    let limit = if t.parent(x).is_none() { kf.powi(big_r as i32) } else { (kf - 1.0) * kf.powi(big_r as i32 - 1) };
    if level >= limit {
        return Err(Error::Precondition(format!("|L_{big_r}(x)| = {level} is not below {limit}")));
    }
    // levels[r] = L_r(x)
    let mut levels = vec![vec![x]];
    for r in 0..big_r {
        let next: Vec<usize> = levels[r].iter().flat_map(|&v| t.children(v)).collect();
        levels.push(next);
    }
    let mut blue = vec![false; t.vertex_count()];
    for &v in &levels[big_r] {
        blue[v] = t.child_count(v) >= k;
    }
    for r in (0..big_r).rev() {
        for &v in &levels[r] {
            blue[v] = t.children(v).filter(|&w| blue[w]).count() >= k;
        }
    }
    debug_assert!(!blue[x]);
    let mut fort = Vec::new();
    let mut stack = vec![(x, 0usize)];
    while let Some((v, r)) = stack.pop() {
        fort.push(v);
        if r < big_r {
            stack.extend(t.children(v).filter(|&w| !blue[w]).map(|w| (w, r + 1)));
        }
    }
    FortCertificate::new(t.graph(), fort, k - 1)
}

/// Default cap on the number of connected sets examined by [`find_min_fort`].
pub const DEFAULT_FORT_BUDGET: u64 = 50_000_000;

/// Smallest `k`-fort with at most `max_size` vertices, using only vertices
/// in `restrict` when given (outdegrees still count all of `g`). Ties go to
/// the lexicographically smallest sorted vertex list.
pub fn find_min_fort(
    g: &Graph,
    k: usize,
    max_size: usize,
    restrict: Option<&[usize]>,
    budget: u64,
) -> Result<Option<FortCertificate>> {
    let n = g.vertex_count();
    let allowed = match restrict {
        None => vec![true; n],
        Some(r) => {
            let mut a = vec![false; n];
            for &v in r {
                if v >= n {
                    return Err(invalid(format!("vertex {v} not in graph")));
                }
                a[v] = true;
            }
            a
        }
    };
    let budget = Budget::new(budget);
    let accept = |set: &[usize]| {
        let mut member = vec![false; n];
        for &v in set {
            member[v] = true;
        }
        set.iter().all(|&v| outdegree(g, &member, v) <= k)
    };
    for size in 1..=max_size {
        if let Some(found) = smallest_accepted(g, &allowed, size, &budget, accept)? {
            return FortCertificate::new(g, found, k).map(Some);
        }
    }
    Ok(None)
}
