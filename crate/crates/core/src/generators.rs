//! Deterministic and random generators for the graphs and trees the
//! library works with. Vertex ids are assigned in breadth-first order with
//! the root at 0.

use std::collections::VecDeque;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distribution::OffspringDistribution;
use crate::error::{invalid, Result};
use crate::graph::{Graph, RootedTree};
use crate::rng::RngSeed;

/// Upper bound on the size of any generated tree.
pub const MAX_TREE_VERTICES: usize = 1 << 27;

/// Child count of the root in a regular tree.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arity {
    /// Every internal vertex, the root included, has `d` children.
    DAry,
    /// The root has `d + 1` children, so every internal vertex has degree `d + 1`.
    DPlusOneRegular,
}

/// Truncation of the `d`-ary tree or of the `(d+1)`-regular tree at `depth`.
pub fn gen_regular_tree(d: usize, depth: usize, arity: Arity) -> Result<RootedTree> {
    if d < 2 {
        return Err(invalid(format!("regular tree needs d >= 2, got {d}")));
    }
    let root_children = match arity {
        Arity::DAry => d,
        Arity::DPlusOneRegular => d + 1,
    };
    let mut size: usize = 1;
    let mut level: usize = 1;
    for r in 0..depth {
        level = level.checked_mul(if r == 0 { root_children } else { d }).ok_or_else(|| invalid("tree too large"))?;
        size = size.checked_add(level).ok_or_else(|| invalid("tree too large"))?;
        if size > MAX_TREE_VERTICES {
            return Err(invalid(format!("tree would exceed {MAX_TREE_VERTICES} vertices")));
        }
    }
    let mut parents = Vec::with_capacity(size);
    parents.push(None);
    let mut level_start = 0;
    for r in 0..depth {
        let level_end = parents.len();
        let per_vertex = if r == 0 { root_children } else { d };
        for v in level_start..level_end {
            parents.extend(std::iter::repeat_n(Some(v), per_vertex));
        }
        level_start = level_end;
    }
    RootedTree::from_parents(&parents, Some(depth))
}

/// The `(d+1)`-regular tree truncated at `depth` original levels, with an
/// extra vertex placed on every edge. The result has truncation depth
/// `2 * depth`; [`RootedTree::is_subdivision`] tells the two kinds apart.
pub fn gen_subdivided_tree(d: usize, depth: usize) -> Result<RootedTree> {
    let original = gen_regular_tree(d, depth, Arity::DPlusOneRegular)?;
    enum Node {
        Original(usize),
        Middle(usize),
    }
    let n = 2 * original.vertex_count() - 1;
    let mut parents = Vec::with_capacity(n);
    let mut marks = Vec::with_capacity(n);
    parents.push(None);
    marks.push(false);
    let mut queue = VecDeque::from([(0usize, Node::Original(original.root()))]);
    while let Some((id, node)) = queue.pop_front() {
        match node {
            Node::Original(o) => {
                for c in original.children(o) {
                    parents.push(Some(id));
                    marks.push(true);
                    queue.push_back((parents.len() - 1, Node::Middle(c)));
                }
            }
            Node::Middle(c) => {
                parents.push(Some(id));
                marks.push(false);
                queue.push_back((parents.len() - 1, Node::Original(c)));
            }
        }
    }
    Ok(RootedTree::from_parents(&parents, Some(2 * depth))?.with_subdivision_marks(marks))
}

/// Galton-Watson tree truncated at `depth`.
///
/// Vertices are expanded in breadth-first order and each one above the
/// truncation consumes exactly one `f64` draw from `seed.rng()`, which is
/// mapped to a child count by inverse CDF.
pub fn gen_gw_tree(dist: &OffspringDistribution, depth: usize, seed: RngSeed) -> Result<RootedTree> {
    let mut rng = seed.rng();
    let mut parents: Vec<Option<usize>> = vec![None];
    let mut depths = vec![0usize];
    let mut next = 0;
    while next < parents.len() {
        let v = next;
        next += 1;
        if depths[v] >= depth {
            continue;
        }
        let children = dist.sample_with(rng.gen::<f64>());
        if parents.len() + children > MAX_TREE_VERTICES {
            return Err(invalid(format!("tree would exceed {MAX_TREE_VERTICES} vertices")));
        }
        for _ in 0..children {
            parents.push(Some(v));
            depths.push(depths[v] + 1);
        }
    }
    RootedTree::from_parents(&parents, Some(depth))
}

/// Maximum-degree-3 tree without interior 1-forts of size at most `n`.
///
/// Vertices are expanded breadth-first, left to right. The root gets two
/// children and is the first degree-2 vertex. Every later vertex gets a
/// single child (degree 2) whenever it lies at distance at least `n` from
/// every degree-2 vertex placed so far, and two children otherwise. In a
/// tree whose degrees are 2 or 3, the finite 1-forts are exactly the sets
/// containing a path between two degree-2 vertices, so the distance rule
/// rules out every 1-fort of size `<= n`.
pub fn gen_greedy_fortfree_tree(n: usize, depth: usize) -> Result<RootedTree> {
    if n < 1 {
        return Err(invalid("fort size bound must be at least 1"));
    }
    if depth < 1 {
        return Err(invalid("greedy tree needs depth >= 1"));
    }
    let mut parents: Vec<Option<usize>> = vec![None];
    let mut depths = vec![0usize];
    let mut children: Vec<Vec<usize>> = vec![Vec::new()];
    let mut degree_two: Vec<usize> = Vec::new();
    let mut is_degree_two = vec![false];

    let mut next = 0;
    while next < parents.len() {
        let v = next;
        next += 1;
        if depths[v] >= depth {
            continue;
        }
        let count = if v == 0 {
            is_degree_two[0] = true;
            degree_two.push(0);
            2
        } else if far_from_all(v, n, &parents, &depths, &children, &degree_two, &is_degree_two) {
            is_degree_two[v] = true;
            degree_two.push(v);
            1
        } else {
            2
        };
        for _ in 0..count {
            let c = parents.len();
            parents.push(Some(v));
            depths.push(depths[v] + 1);
            children.push(Vec::new());
            is_degree_two.push(false);
            children[v].push(c);
        }
        if parents.len() > MAX_TREE_VERTICES {
            return Err(invalid(format!("tree would exceed {MAX_TREE_VERTICES} vertices")));
        }
    }
    RootedTree::from_parents(&parents, Some(depth))
}

/// Whether every marked vertex is at distance >= `n` from `v`.
fn far_from_all(
    v: usize,
    n: usize,
    parents: &[Option<usize>],
    depths: &[usize],
    children: &[Vec<usize>],
    marked: &[usize],
    is_marked: &[bool],
) -> bool {
    let radius = n - 1;
    if radius <= 10 {
        // bounded ball search in the partial tree
        let mut frontier = vec![(v, usize::MAX)];
        for _ in 0..radius {
            let mut next = Vec::new();
            for &(u, from) in &frontier {
                let mut step = |w: usize| {
                    if w != from {
                        next.push((w, u));
                    }
                };
                if let Some(p) = parents[u] {
                    step(p);
                }
                for &c in &children[u] {
                    step(c);
                }
            }
            if next.iter().any(|&(w, _)| is_marked[w]) {
                return false;
            }
            frontier = next;
        }
        true
    } else {
        marked.iter().all(|&w| tree_distance(v, w, parents, depths) >= n)
    }
}

fn tree_distance(mut a: usize, mut b: usize, parents: &[Option<usize>], depths: &[usize]) -> usize {
    let mut dist = 0;
    while depths[a] > depths[b] {
        a = parents[a].unwrap();
        dist += 1;
    }
    while depths[b] > depths[a] {
        b = parents[b].unwrap();
        dist += 1;
    }
    while a != b {
        a = parents[a].unwrap();
        b = parents[b].unwrap();
        dist += 2;
    }
    dist
}

/// An `n x n` box of the square lattice.
#[derive(Clone, Debug)]
pub struct Grid {
    pub graph: Graph,
    pub side: usize,
    /// Outer-frame vertices, present when the grid was requested with a
    /// filled boundary; the caller decides whether to pre-occupy them.
    pub boundary: Option<Vec<usize>>,
}

impl Grid {
    pub fn vertex(&self, row: usize, col: usize) -> usize {
        row * self.side + col
    }

    /// A vertex at (or next to) the middle of the box.
    pub fn center(&self) -> usize {
        self.vertex(self.side / 2, self.side / 2)
    }
}

/// Nearest-neighbour `n x n` box; vertex `(r, c)` has id `r * n + c`.
pub fn gen_grid(n: usize, filled_boundary: bool) -> Result<Grid> {
    if n < 2 {
        return Err(invalid(format!("grid side must be >= 2, got {n}")));
    }
    let id = |r: usize, c: usize| r * n + c;
    let mut edges = Vec::with_capacity(2 * n * (n - 1));
    for r in 0..n {
        for c in 0..n {
            if c + 1 < n {
                edges.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < n {
                edges.push((id(r, c), id(r + 1, c)));
            }
        }
    }
    let graph = Graph::from_edges(n * n, &edges)?;
    let boundary = filled_boundary.then(|| {
        (0..n * n)
            .filter(|&v| {
                let (r, c) = (v / n, v % n);
                r == 0 || c == 0 || r == n - 1 || c == n - 1
            })
            .collect()
    });
    Ok(Grid { graph, side: n, boundary })
}
