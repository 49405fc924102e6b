//! Undirected graphs in compressed adjacency form, and rooted trees on top
//! of them.
//!
//! Trees are always finite truncations of the infinite objects studied in
//! bootstrap percolation. Vertices at the truncation depth carry a
//! `boundary` flag; what the boundary means (occupied beyond the horizon,
//! unknown children, genuinely finite) is decided by the caller.
//!
//! # Parent-list format
//!
//! A tree is serialized as plain text, one vertex per line. Line `i`
//! (counting only data lines) holds the parent id of vertex `i`, or `-1`
//! for the root. Blank lines and lines starting with `#` are ignored.
//!
//! ```text
//! # a path of three vertices
//! -1
//! 0
//! 1
//! ```

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::hash::Hasher;

use fnv::FnvHasher;

use crate::error::{Error, Result};

/// Simple undirected graph with sorted adjacency lists (CSR layout).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl Graph {
    /// Builds a graph on `n` vertices from an undirected edge list.
    ///
    /// Rejects self-loops, duplicate edges and out-of-range endpoints.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut degree = vec![0usize; n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::MalformedGraph(format!("edge ({u}, {v}) out of range for {n} vertices")));
            }
            if u == v {
                return Err(Error::MalformedGraph(format!("self-loop at {u}")));
            }
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut targets = vec![0usize; offsets[n]];
        for &(u, v) in edges {
            targets[fill[u]] = v;
            fill[u] += 1;
            targets[fill[v]] = u;
            fill[v] += 1;
        }
        for v in 0..n {
            let adj = &mut targets[offsets[v]..offsets[v + 1]];
            adj.sort_unstable();
            if adj.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::MalformedGraph(format!("duplicate edge at {v}")));
            }
        }
        Ok(Self { offsets, targets })
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn max_degree(&self) -> usize {
        (0..self.vertex_count()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Every undirected edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.vertex_count())
            .flat_map(move |u| self.neighbors(u).iter().copied().filter(move |&v| u < v).map(move |v| (u, v)))
    }

    /// Re-checks symmetry, absence of loops and of duplicate edges.
    pub fn check_invariants(&self) -> Result<()> {
        for u in 0..self.vertex_count() {
            let adj = self.neighbors(u);
            if adj.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::MalformedGraph(format!("adjacency of {u} not strictly sorted")));
            }
            for &v in adj {
                if v == u {
                    return Err(Error::MalformedGraph(format!("self-loop at {u}")));
                }
                if !self.has_edge(v, u) {
                    return Err(Error::MalformedGraph(format!("edge ({u}, {v}) not symmetric")));
                }
            }
        }
        Ok(())
    }

    /// Subgraph induced by `vertices`. Returns the subgraph together with
    /// the map from local ids to the original ids (in the order given).
    pub fn induced(&self, vertices: &[usize]) -> (Graph, Vec<usize>) {
        let mut local = vec![usize::MAX; self.vertex_count()];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        let mut edges = Vec::new();
        for (i, &v) in vertices.iter().enumerate() {
            for &w in self.neighbors(v) {
                let j = local[w];
                if j != usize::MAX && i < j {
                    edges.push((i, j));
                }
            }
        }
        let g = Graph::from_edges(vertices.len(), &edges).expect("induced subgraph is simple");
        (g, vertices.to_vec())
    }

    /// True iff `set` is non-empty and induces a connected subgraph.
    pub fn is_connected_subset(&self, set: &[usize]) -> bool {
        let Some(&start) = set.first() else {
            return false;
        };
        let mut member = vec![false; self.vertex_count()];
        let mut distinct = 0;
        for &v in set {
            if !member[v] {
                member[v] = true;
                distinct += 1;
            }
        }
        let mut seen = vec![false; self.vertex_count()];
        seen[start] = true;
        let mut stack = vec![start];
        let mut reached = 1;
        while let Some(v) = stack.pop() {
            for &w in self.neighbors(v) {
                if member[w] && !seen[w] {
                    seen[w] = true;
                    reached += 1;
                    stack.push(w);
                }
            }
        }
        reached == distinct
    }

    /// Stable 64-bit FNV-1a fingerprint of the adjacency structure.
    pub fn fingerprint(&self) -> u64 {
        let mut h = FnvHasher::default();
        h.write_u64(self.vertex_count() as u64);
        for v in 0..self.vertex_count() {
            h.write_u64(self.degree(v) as u64);
            for &w in self.neighbors(v) {
                h.write_u64(w as u64);
            }
        }
        h.finish()
    }
}

/// A finite rooted tree: a [`Graph`] plus root, parent pointers, depths and
/// truncation-boundary flags.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedTree {
    graph: Graph,
    root: usize,
    parent: Vec<Option<usize>>,
    depth: Vec<usize>,
    boundary: Vec<bool>,
    subdivision: Vec<bool>,
    truncation_depth: usize,
}

impl RootedTree {
    /// Builds a tree from parent pointers. Exactly one entry must be `None`.
    ///
    /// Vertices at depth `truncation_depth` are flagged as boundary; when
    /// `truncation_depth` is `None`, the maximum depth is used.
    pub fn from_parents(parents: &[Option<usize>], truncation_depth: Option<usize>) -> Result<Self> {
        let n = parents.len();
        if n == 0 {
            return Err(Error::MalformedGraph("tree must have at least one vertex".into()));
        }
        let mut root = None;
        let mut edges = Vec::with_capacity(n.saturating_sub(1));
        for (v, p) in parents.iter().enumerate() {
            match *p {
                None => {
                    if root.replace(v).is_some() {
                        return Err(Error::MalformedGraph("more than one root".into()));
                    }
                }
                Some(u) if u >= n => {
                    return Err(Error::MalformedGraph(format!("parent {u} of {v} out of range")));
                }
                Some(u) if u == v => {
                    return Err(Error::MalformedGraph(format!("vertex {v} is its own parent")));
                }
                Some(u) => edges.push((u, v)),
            }
        }
        let root = root.ok_or_else(|| Error::MalformedGraph("no root".into()))?;

        // depths, with cycle detection
        const UNSET: usize = usize::MAX;
        let mut depth = vec![UNSET; n];
        depth[root] = 0;
        let mut path = Vec::new();
        for start in 0..n {
            let mut v = start;
            while depth[v] == UNSET {
                path.push(v);
                if path.len() > n {
                    return Err(Error::MalformedGraph("parent pointers contain a cycle".into()));
                }
                v = parents[v].expect("only the root lacks a parent");
            }
            let mut d = depth[v];
            while let Some(u) = path.pop() {
                d += 1;
                depth[u] = d;
            }
        }
        let graph = Graph::from_edges(n, &edges)?;
        let max_depth = *depth.iter().max().unwrap();
        let truncation_depth = truncation_depth.unwrap_or(max_depth);
        if max_depth > truncation_depth {
            return Err(Error::MalformedGraph(format!(
                "vertex at depth {max_depth} exceeds truncation depth {truncation_depth}"
            )));
        }
        let boundary = depth.iter().map(|&d| d == truncation_depth).collect();
        Ok(Self {
            graph,
            root,
            parent: parents.to_vec(),
            depth,
            boundary,
            subdivision: vec![false; n],
            truncation_depth,
        })
    }

    pub(crate) fn with_subdivision_marks(mut self, marks: Vec<bool>) -> Self {
        assert_eq!(marks.len(), self.vertex_count());
        self.subdivision = marks;
        self
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn depth(&self, v: usize) -> usize {
        self.depth[v]
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.boundary[v]
    }

    /// True for vertices inserted on edges by [`crate::gen_subdivided_tree`].
    pub fn is_subdivision(&self, v: usize) -> bool {
        self.subdivision[v]
    }

    pub fn truncation_depth(&self) -> usize {
        self.truncation_depth
    }

    pub fn children(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let p = self.parent[v];
        self.graph.neighbors(v).iter().copied().filter(move |&w| Some(w) != p)
    }

    pub fn child_count(&self, v: usize) -> usize {
        self.graph.degree(v) - usize::from(self.parent[v].is_some())
    }

    /// Vertices that are not on the truncation boundary.
    pub fn interior(&self) -> Vec<usize> {
        (0..self.vertex_count()).filter(|&v| !self.boundary[v]).collect()
    }

    /// Vertices in breadth-first order from the root, children in id order.
    pub fn bfs_order(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.vertex_count());
        let mut queue = VecDeque::from([self.root]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            queue.extend(self.children(v));
        }
        order
    }

    /// `L_r(x)`: descendants of `x` exactly `r` levels below it.
    pub fn level_set(&self, x: usize, r: usize) -> Vec<usize> {
        let mut level = vec![x];
        for _ in 0..r {
            level = level.iter().flat_map(|&v| self.children(v)).collect();
            if level.is_empty() {
                break;
            }
        }
        level
    }

    /// True iff `a` lies on the root path of `b` (a vertex is its own ancestor).
    pub fn is_ancestor(&self, a: usize, b: usize) -> bool {
        let mut v = b;
        loop {
            if v == a {
                return true;
            }
            if self.depth[v] <= self.depth[a] {
                return false;
            }
            match self.parent[v] {
                Some(p) => v = p,
                None => return false,
            }
        }
    }

    /// Re-checks the tree invariants against the underlying graph.
    pub fn check_invariants(&self) -> Result<()> {
        self.graph.check_invariants()?;
        let n = self.vertex_count();
        if self.graph.edge_count() + 1 != n {
            return Err(Error::MalformedGraph("edge count is not n - 1".into()));
        }
        let roots = self.parent.iter().filter(|p| p.is_none()).count();
        if roots != 1 || self.parent[self.root].is_some() {
            return Err(Error::MalformedGraph("root is not unique".into()));
        }
        for v in 0..n {
            match self.parent[v] {
                None if self.depth[v] != 0 => return Err(Error::MalformedGraph("root depth is not 0".into())),
                Some(p) => {
                    if !self.graph.has_edge(p, v) {
                        return Err(Error::MalformedGraph(format!("parent edge ({p}, {v}) missing")));
                    }
                    if self.depth[v] != self.depth[p] + 1 {
                        return Err(Error::MalformedGraph(format!("bad depth at {v}")));
                    }
                }
                None => {}
            }
            if self.boundary[v] != (self.depth[v] == self.truncation_depth) {
                return Err(Error::MalformedGraph(format!("bad boundary flag at {v}")));
            }
        }
        // n - 1 parent edges that all exist and a consistent depth function
        // imply the graph is a tree
        Ok(())
    }

    /// Serializes to the parent-list format.
    pub fn to_parent_list(&self) -> String {
        let mut out = String::with_capacity(self.vertex_count() * 4);
        for p in &self.parent {
            match p {
                Some(p) => writeln!(out, "{p}").unwrap(),
                None => out.push_str("-1\n"),
            }
        }
        out
    }

    /// Parses the parent-list format. The truncation depth of the result is
    /// its maximum depth.
    pub fn parse_parent_list(text: &str) -> Result<Self> {
        let mut parents = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let value: i64 = line.parse().map_err(|_| Error::Parse {
                line: lineno + 1,
                message: format!("expected an integer, found {line:?}"),
            })?;
            let parent = match value {
                -1 => None,
                v if v >= 0 => Some(v as usize),
                v => return Err(Error::Parse { line: lineno + 1, message: format!("parent id {v} is negative") }),
            };
            parents.push(parent);
        }
        Self::from_parents(&parents, None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_loops_and_duplicates() {
        assert!(Graph::from_edges(2, &[(0, 0)]).is_err());
        assert!(Graph::from_edges(2, &[(0, 1), (1, 0)]).is_err());
        assert!(Graph::from_edges(2, &[(0, 2)]).is_err());
    }

    #[test]
    fn parent_list_round_trip() {
        let t = RootedTree::parse_parent_list("# star\n-1\n0\n0\n\n2\n").unwrap();
        assert_eq!(t.vertex_count(), 4);
        assert_eq!(t.depth(3), 2);
        assert!(t.is_boundary(3));
        assert!(!t.is_boundary(1));
        let again = RootedTree::parse_parent_list(&t.to_parent_list()).unwrap();
        assert_eq!(t, again);
    }

    #[test]
    fn parent_list_errors() {
        assert!(matches!(RootedTree::parse_parent_list("-1\nx\n"), Err(Error::Parse { line: 2, .. })));
        assert!(RootedTree::parse_parent_list("-1\n-1\n").is_err());
        assert!(RootedTree::parse_parent_list("1\n0\n").is_err());
        assert!(RootedTree::parse_parent_list("-1\n2\n1\n").is_err());
        assert!(RootedTree::parse_parent_list("").is_err());
        assert!(RootedTree::parse_parent_list("-1\n-3\n").is_err());
    }

    #[test]
    fn connected_subset() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert!(g.is_connected_subset(&[1, 2]));
        assert!(!g.is_connected_subset(&[0, 2]));
        assert!(!g.is_connected_subset(&[]));
        assert!(!g.is_connected_subset(&[1, 1, 3]));
    }
}
