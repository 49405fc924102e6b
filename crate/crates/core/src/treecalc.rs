//! Cutset contents, branching-number estimates and β-pruning.
//!
//! Depths follow the edge convention: the edge from `u` to its child `v`
//! has length `|e| = depth(v)`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::forts::FortCertificate;
use crate::graph::RootedTree;

/// A set of `(parent, child)` tree edges.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutSet {
    pub edges: Vec<(usize, usize)>,
}

impl CutSet {
    /// Validates that every edge is a tree edge, no edge lies below another,
    /// and every root-to-boundary path crosses the set.
    pub fn new(t: &RootedTree, mut edges: Vec<(usize, usize)>) -> Result<Self> {
        let n = t.vertex_count();
        edges.sort_unstable();
        let mut cut = vec![false; n];
        for &(u, v) in &edges {
            if v >= n || t.parent(v) != Some(u) {
                return Err(invalid(format!("({u}, {v}) is not a parent-child edge")));
            }
            if std::mem::replace(&mut cut[v], true) {
                return Err(invalid(format!("edge ({u}, {v}) listed twice")));
            }
        }
        // walk top-down remembering whether an ancestor edge is cut
        let mut covered = vec![false; n];
        for v in t.bfs_order() {
            let above = t.parent(v).is_some_and(|p| covered[p]);
            if above && cut[v] {
                return Err(invalid(format!("edge into {v} lies below another cut edge")));
            }
            covered[v] = above || cut[v];
            if t.is_boundary(v) && !covered[v] && v != t.root() {
                return Err(invalid(format!("boundary vertex {v} is not separated from the root")));
            }
        }
        Ok(Self { edges })
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContentReport {
    pub lambda: f64,
    pub value: f64,
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("lambda must be positive, got {lambda}")))
    }
}

/// `Σ λ^(-|e|)` over the cutset.
pub fn content(t: &RootedTree, cut: &CutSet, lambda: f64) -> Result<ContentReport> {
    check_lambda(lambda)?;
    let value = cut.edges.iter().map(|&(_, v)| lambda.powi(-(t.depth(v) as i32))).sum();
    Ok(ContentReport { lambda, value })
}

/// Minimal content with the vertices in reverse BFS order precomputed.
fn min_cut_values(t: &RootedTree, reverse_bfs: &[usize], lambda: f64, m: &mut [f64]) {
    for &v in reverse_bfs {
        let below: f64 = t.children(v).map(|w| m[w]).sum();
        m[v] = if t.is_boundary(v) {
            lambda.powi(-(t.depth(v) as i32))
        } else if t.child_count(v) == 0 {
            // a dead end carries no flow and needs no cut
            0.0
        } else {
            lambda.powi(-(t.depth(v) as i32)).min(below)
        };
    }
}

fn min_cut_value(t: &RootedTree, reverse_bfs: &[usize], lambda: f64, m: &mut [f64]) -> f64 {
    min_cut_values(t, reverse_bfs, lambda, m);
    t.children(t.root()).map(|w| m[w]).sum()
}

/// Exact minimum content over cutsets separating the root from the
/// boundary, with a cutset attaining it. Ties prefer the shallower edge.
pub fn min_cut_content(t: &RootedTree, lambda: f64) -> Result<(f64, CutSet)> {
    check_lambda(lambda)?;
    if t.vertex_count() < 2 {
        return Err(invalid("tree has no edges"));
    }
    let mut order = t.bfs_order();
    order.reverse();
    let mut m = vec![0.0; t.vertex_count()];
    let value = min_cut_value(t, &order, lambda, &mut m);
    let mut edges = Vec::new();
    let mut stack: Vec<usize> = t.children(t.root()).collect();
    while let Some(v) = stack.pop() {
        if m[v] == 0.0 && !t.is_boundary(v) {
            continue;
        }
        let own = lambda.powi(-(t.depth(v) as i32));
        if t.is_boundary(v) || own <= m[v] {
            edges.push((t.parent(v).expect("non-root"), v));
        } else {
            stack.extend(t.children(v));
        }
    }
    edges.sort_unstable();
    Ok((value, CutSet { edges }))
}

/// Bracket for the branching number of a tree family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchingEstimate {
    pub lower: f64,
    pub upper: f64,
    /// Depth of the deepest tree consulted.
    pub depth_used: usize,
    /// `(D, lower, upper)` for every depth that gave a conclusive bracket.
    pub per_depth: Vec<(usize, f64, f64)>,
}

/// Ratio above which min-cut content counts as non-vanishing.
pub const NON_VANISHING_RATIO: f64 = 0.9;
/// Ratio below which min-cut content counts as decaying.
pub const DECAYING_RATIO: f64 = 0.5;

struct DepthPair {
    shallow: (RootedTree, Vec<usize>),
    deep: (RootedTree, Vec<usize>),
    depth: usize,
}

impl DepthPair {
    fn ratio(&self, lambda: f64, scratch: &mut Vec<f64>) -> f64 {
        let (t, o) = &self.shallow;
        scratch.resize(t.vertex_count().max(self.deep.0.vertex_count()), 0.0);
        let a = min_cut_value(t, o, lambda, scratch);
        let (t, o) = &self.deep;
        let b = min_cut_value(t, o, lambda, scratch);
        b / a
    }
}

/// Heuristic bracket for the branching number of `family`.
///
/// For each `D` in `depths`, λ is classified by the ratio of min-cut
/// contents at depths `2D` and `D`: above [`NON_VANISHING_RATIO`] the
/// content is non-vanishing, below [`DECAYING_RATIO`] it decays. Bisection
/// locates the largest non-vanishing λ and the smallest decaying λ. If the
/// content behaves like `C (b/λ)^n`, the ratio is `(b/λ)^D`, so those two
/// values are rescaled by `0.9^(1/D)` and `0.5^(1/D)` to land on `b`.
/// This is an estimator for finite data, not a certified bound.
///
/// The bracket of the largest depth is returned.
pub fn estimate_branching<F>(
    family: F,
    lambda_lo: f64,
    lambda_hi: f64,
    depths: &[usize],
    tol: f64,
) -> Result<BranchingEstimate>
where
    F: Fn(usize) -> Result<RootedTree>,
{
    check_lambda(lambda_lo)?;
    if !(lambda_lo < lambda_hi) || !lambda_hi.is_finite() {
        return Err(invalid("need lambda_lo < lambda_hi"));
    }
    if !(tol > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    let mut depths = depths.to_vec();
    depths.sort_unstable();
    depths.dedup();
    if depths.is_empty() || depths[0] == 0 {
        return Err(invalid("depths must be a non-empty list of positive integers"));
    }
    let prepare = |depth: usize| -> Result<(RootedTree, Vec<usize>)> {
        let t = family(depth)?;
        if t.vertex_count() < 2 {
            return Err(Error::Inconclusive(format!("tree at depth {depth} has no edges")));
        }
        let mut o = t.bfs_order();
        o.reverse();
        Ok((t, o))
    };
    let mut per_depth = Vec::new();
    let mut last_error = None;
    for &depth in &depths {
        let pair = DepthPair { shallow: prepare(depth)?, deep: prepare(2 * depth)?, depth };
        match bracket_at(&pair, lambda_lo, lambda_hi, tol) {
            Ok((lo, hi)) => {
                per_depth.push((depth, lo, hi));
                last_error = None;
            }
            Err(e) => last_error = Some(e),
        }
    }
    if let Some(e) = last_error {
        return Err(e);
    }
    let &(depth, lower, upper) = per_depth.last().expect("at least one depth");
    Ok(BranchingEstimate { lower, upper, depth_used: 2 * depth, per_depth })
}

fn bracket_at(pair: &DepthPair, lambda_lo: f64, lambda_hi: f64, tol: f64) -> Result<(f64, f64)> {
    let mut scratch = Vec::new();
    let mut ratio = |l: f64| pair.ratio(l, &mut scratch);
    let d = pair.depth;
    let r_lo = ratio(lambda_lo);
    let r_hi = ratio(lambda_hi);
    if !(r_lo > NON_VANISHING_RATIO) {
        return Err(Error::Inconclusive(format!(
            "content ratio {r_lo:.4} at lambda_lo = {lambda_lo} is not non-vanishing (D = {d})"
        )));
    }
    if !(r_hi < DECAYING_RATIO) {
        return Err(Error::Inconclusive(format!(
            "content ratio {r_hi:.4} at lambda_hi = {lambda_hi} is not decaying (D = {d})"
        )));
    }
    let bisect = |pred: &mut dyn FnMut(f64) -> bool| {
        // pred(lambda_lo) holds, pred(lambda_hi) fails
        let (mut a, mut b) = (lambda_lo, lambda_hi);
        while b - a > tol {
            let mid = 0.5 * (a + b);
            if pred(mid) {
                a = mid;
            } else {
                b = mid;
            }
        }
        (a, b)
    };
    let (nv, _) = bisect(&mut |l| ratio(l) > NON_VANISHING_RATIO);
    let (_, dec) = bisect(&mut |l| ratio(l) >= DECAYING_RATIO);
    let df = d as f64;
    let lower = nv * NON_VANISHING_RATIO.powf(1.0 / df);
    let upper = dec * DECAYING_RATIO.powf(1.0 / df);
    // widen by the bisection tolerance so the bracket stays honest
    Ok((lower.min(upper) - tol, lower.max(upper) + tol))
}

/// Outcome of one round of β-pruning.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PruneReport {
    pub fort: FortCertificate,
    pub beta: f64,
    pub alpha: f64,
    /// `μ_{β-1}` of the leaves of the input tree that survive.
    pub lhs: f64,
    /// `μ_β(leaves of the input tree)^α`.
    pub rhs: f64,
}

impl PruneReport {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs + 1e-9
    }
}

/// Kept vertices of one β-pruning of `t`, as a mask.
///
/// `M(v)` is 1 at a leaf and `Σ M(c) / β` otherwise. At every kept vertex
/// with children, the child of largest `M` (smallest id on ties) is removed
/// with its whole subtree.
fn prune_mask(t: &RootedTree, beta: f64) -> (Vec<bool>, f64) {
    let n = t.vertex_count();
    let order = t.bfs_order();
    let mut big_m = vec![0.0; n];
    for &v in order.iter().rev() {
        big_m[v] = if t.child_count(v) == 0 { 1.0 } else { t.children(v).map(|w| big_m[w]).sum::<f64>() / beta };
    }
    let mut keep = vec![false; n];
    keep[t.root()] = true;
    for &v in &order {
        if !keep[v] {
            continue;
        }
        let drop = t.children(v).max_by(|&a, &b| big_m[a].total_cmp(&big_m[b]).then(b.cmp(&a)));
        for w in t.children(v) {
            keep[w] = Some(w) != drop;
        }
    }
    (keep, big_m[t.root()])
}

fn check_beta(beta: f64) -> Result<()> {
    if beta.is_finite() && beta > 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("beta must exceed 1, got {beta}")))
    }
}

/// One β-pruning of a finite tree. Its leaves play the role of the boundary.
pub fn prune_beta(t: &RootedTree, beta: f64) -> Result<PruneReport> {
    check_beta(beta)?;
    let (keep, root_content) = prune_mask(t, beta);
    let ids: Vec<usize> = (0..t.vertex_count()).collect();
    report_from_mask(t, t, &ids, &keep, beta, root_content, 1)
}

/// Packages a pruning of `sub` (whose vertex `i` is `host` vertex `ids[i]`)
/// as a `level`-fort of `host`.
fn report_from_mask(
    host: &RootedTree,
    sub: &RootedTree,
    ids: &[usize],
    keep: &[bool],
    beta: f64,
    root_content: f64,
    level: usize,
) -> Result<PruneReport> {
    let alpha = beta / (beta - 1.0);
    let lhs = (0..sub.vertex_count())
        .filter(|&v| keep[v] && sub.child_count(v) == 0)
        .map(|v| (beta - 1.0).powi(-(sub.depth(v) as i32)))
        .sum();
    let vertices = (0..sub.vertex_count()).filter(|&v| keep[v]).map(|v| ids[v]).collect();
    Ok(PruneReport {
        fort: FortCertificate::new(host.graph(), vertices, level)?,
        beta,
        alpha,
        lhs,
        rhs: root_content.powf(alpha),
    })
}

/// Applies β-pruning `k` times, the i-th round (1-based) with `betas[i-1]`
/// on the survivor of the previous round. The i-th report certifies an
/// i-fort of `t`; its contents are measured on the tree it pruned.
pub fn prune_k(t: &RootedTree, k: usize, betas: &[f64]) -> Result<Vec<PruneReport>> {
    if k < 1 {
        return Err(invalid("k must be at least 1"));
    }
    if betas.len() != k {
        return Err(invalid(format!("expected {k} beta values, got {}", betas.len())));
    }
    for &b in betas {
        check_beta(b)?;
    }
    let mut reports = Vec::with_capacity(k);
    let mut current = t.clone();
    let mut ids: Vec<usize> = (0..t.vertex_count()).collect();
    for (round, &beta) in betas.iter().enumerate() {
        if current.vertex_count() == 1 && round > 0 {
            return Err(Error::PruneCollapsed { completed: round, requested: k });
        }
        let (keep, root_content) = prune_mask(&current, beta);
        let report = report_from_mask(t, &current, &ids, &keep, beta, root_content, round + 1)?;
        if round + 1 < k {
            let (next, next_ids) = restrict(&current, &keep)?;
            ids = next_ids.iter().map(|&v| ids[v]).collect();
            current = next;
        }
        reports.push(report);
    }
    Ok(reports)
}

/// Subtree on the kept vertices (which must contain the root and be closed
/// under parents), relabelled in increasing id order.
fn restrict(t: &RootedTree, keep: &[bool]) -> Result<(RootedTree, Vec<usize>)> {
    let ids: Vec<usize> = (0..t.vertex_count()).filter(|&v| keep[v]).collect();
    let mut new_id = vec![usize::MAX; t.vertex_count()];
    for (i, &v) in ids.iter().enumerate() {
        new_id[v] = i;
    }
    let parents: Vec<Option<usize>> = ids.iter().map(|&v| t.parent(v).map(|p| new_id[p])).collect();
    Ok((RootedTree::from_parents(&parents, Some(t.truncation_depth()))?, ids))
}

/// Lower bound `k - 2k ln k / ln N` on the branching number of a tree
/// without (k-1)-forts of at most `N` vertices.
pub fn fortfree_br_bound(k: usize, n: f64) -> Result<f64> {
    if k < 2 {
        return Err(invalid("k must be at least 2"));
    }
    if !(n >= 2.0) {
        return Err(invalid("N must be at least 2"));
    }
    let k = k as f64;
    Ok(k - 2.0 * k * k.ln() / n.ln())
}

/// Both sides of the one-step pruning inequality
/// `Σ_{i<ℓ} m_i^α / (β-1) ≤ (Σ m_i / β)^α` with `m` sorted ascending,
/// i.e. the largest term dropped on the left.
pub fn pruning_step_sides(m: &[f64], beta: f64) -> Result<(f64, f64)> {
    check_beta(beta)?;
    if m.is_empty() || m.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(invalid("need a non-empty list of finite non-negative contents"));
    }
    let alpha = beta / (beta - 1.0);
    let mut sorted = m.to_vec();
    sorted.sort_by(f64::total_cmp);
    let lhs = sorted[..sorted.len() - 1].iter().map(|x| x.powf(alpha)).sum::<f64>() / (beta - 1.0);
    let rhs = (sorted.iter().sum::<f64>() / beta).powf(alpha);
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forts::is_fort;
    use crate::generators::{gen_regular_tree, gen_subdivided_tree, Arity};

    fn close(a: f64, b: f64, eps: f64) -> bool {
        (a - b).abs() <= eps
    }

    fn path_tree(n: usize) -> RootedTree {
        let parents: Vec<_> = (0..=n).map(|v| v.checked_sub(1)).collect();
        RootedTree::from_parents(&parents, None).unwrap()
    }

    #[test]
    fn content_examples() {
        let t = gen_regular_tree(3, 3, Arity::DAry).unwrap();
        let root_edges = CutSet::new(&t, t.children(0).map(|v| (0, v)).collect()).unwrap();
        assert!(close(content(&t, &root_edges, 2.5).unwrap().value, 3.0 / 2.5, 1e-15));
        let level3: Vec<_> = t.level_set(0, 3).into_iter().map(|v| (t.parent(v).unwrap(), v)).collect();
        let cut = CutSet::new(&t, level3).unwrap();
        assert!(close(content(&t, &cut, 3.0).unwrap().value, 1.0, 1e-12));
        assert_eq!(content(&t, &cut, 1.0).unwrap().value, 27.0);
        assert!(content(&t, &cut, 0.0).is_err());
    }

    #[test]
    fn cutset_validation() {
        let t = gen_regular_tree(2, 2, Arity::DAry).unwrap();
        assert!(CutSet::new(&t, vec![(0, 1)]).is_err()); // misses the right half
        assert!(CutSet::new(&t, vec![(0, 1), (0, 2), (1, 3)]).is_err()); // not an antichain
        assert!(CutSet::new(&t, vec![(0, 3)]).is_err()); // not an edge
        assert!(CutSet::new(&t, vec![(0, 1), (0, 2)]).is_ok());
    }

    #[test]
    fn min_cut_examples() {
        for n in 1..=8 {
            let t = gen_regular_tree(2, n, Arity::DAry).unwrap();
            let (v, cut) = min_cut_content(&t, 2.0).unwrap();
            assert!(close(v, 1.0, 1e-12));
            let (v3, cut3) = min_cut_content(&t, 3.0).unwrap();
            assert!(close(v3, (2.0f64 / 3.0).powi(n as i32), 1e-12));
            for (c, l) in [(cut, 2.0), (cut3, 3.0)] {
                let c = CutSet::new(&t, c.edges).unwrap();
                let again = content(&t, &c, l).unwrap().value;
                assert!(close(again, min_cut_content(&t, l).unwrap().0, 1e-12));
            }
        }
        let t = path_tree(1);
        let (v, cut) = min_cut_content(&t, 5.0).unwrap();
        assert!(close(v, 0.2, 1e-15));
        assert_eq!(cut.edges, vec![(0, 1)]);
    }

    #[test]
    fn estimator_brackets_known_values() {
        let e = estimate_branching(|d| gen_regular_tree(3, d, Arity::DAry), 1.5, 5.0, &[3, 5], 1e-6).unwrap();
        assert!(e.lower <= 3.0 && 3.0 <= e.upper && e.upper - e.lower <= 0.1, "{e:?}");
        let e = estimate_branching(|d| gen_subdivided_tree(4, d / 2), 1.2, 3.5, &[4, 6], 1e-6).unwrap();
        assert!(e.lower <= 2.0 && 2.0 <= e.upper && e.upper - e.lower <= 0.2, "{e:?}");
        let e = estimate_branching(|d| Ok(path_tree(d)), 0.5, 2.0, &[8], 1e-6).unwrap();
        assert!(e.lower <= 1.0 && 1.0 <= e.upper && e.upper - e.lower <= 0.2, "{e:?}");
        assert!(matches!(
            estimate_branching(|d| gen_regular_tree(3, d, Arity::DAry), 3.5, 5.0, &[3], 1e-6),
            Err(Error::Inconclusive(_))
        ));
    }

    #[test]
    fn star_pruning() {
        for l in 1..=6 {
            let parents: Vec<_> = (0..=l).map(|v| if v == 0 { None } else { Some(0) }).collect();
            let t = RootedTree::from_parents(&parents, None).unwrap();
            for beta in [1.5, 2.0, 3.0, 4.7] {
                let r = prune_beta(&t, beta).unwrap();
                assert_eq!(r.fort.len(), l);
                let alpha = beta / (beta - 1.0);
                assert!(close(r.lhs, (l as f64 - 1.0) / (beta - 1.0), 1e-12));
                assert!(close(r.rhs, (l as f64 / beta).powf(alpha), 1e-12));
                assert!(r.holds());
                // smallest id is dropped among equals
                assert!(!r.fort.vertices.contains(&1));
            }
        }
    }

    #[test]
    fn equality_on_beta_ary_trees() {
        for b in 2..=4 {
            let t = gen_regular_tree(b, 4, Arity::DAry).unwrap();
            let r = prune_beta(&t, b as f64).unwrap();
            assert!(close(r.lhs, r.rhs, 1e-9), "{} vs {}", r.lhs, r.rhs);
        }
    }

    #[test]
    fn prune_k_on_ternary_tree() {
        let t = gen_regular_tree(3, 6, Arity::DAry).unwrap();
        let r = prune_k(&t, 1, &[3.0]).unwrap();
        let kept = &r[0].fort.vertices;
        for &v in kept {
            if !t.is_boundary(v) {
                assert_eq!(t.children(v).filter(|w| kept.contains(w)).count(), 2);
            }
        }
        let all = prune_k(&t, 3, &[3.0, 2.0, 1.5]).unwrap();
        for (i, r) in all.iter().enumerate() {
            assert!(is_fort(t.graph(), &r.fort.vertices, i + 1).unwrap());
        }
        assert_eq!(all[2].fort.vertices, vec![0]);
        assert_eq!(prune_k(&t, 4, &[3.0, 2.0, 1.5, 1.5]), Err(Error::PruneCollapsed { completed: 3, requested: 4 }));
    }

    #[test]
    fn fortfree_bound_values() {
        assert!(close(fortfree_br_bound(2, 2f64.powi(40)).unwrap(), 1.9, 1e-12));
        assert!(fortfree_br_bound(2, 1e300).unwrap() > 1.99);
        assert!(fortfree_br_bound(1, 10.0).is_err());
    }

    #[test]
    fn one_step_inequality() {
        let (l, r) = pruning_step_sides(&[1.0, 1.0, 1.0], 3.0).unwrap();
        assert!(close(l, r, 1e-12));
        let (l, r) = pruning_step_sides(&[0.2, 0.7, 1.5], 2.2).unwrap();
        assert!(l <= r);
    }
}
