//! Enumeration of connected vertex sets ("animals").
//!
//! Uses the extension-set scheme of Wernicke's ESU algorithm: a set grows
//! only by vertices that are not already adjacent to it, which yields every
//! connected set containing the anchor exactly once.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::Graph;

struct Enumerator<'a, A, V> {
    g: &'a Graph,
    allowed: A,
    visit: V,
    max_size: usize,
    mark: Vec<u32>,
    set: Vec<usize>,
}

impl<A, V> Enumerator<'_, A, V>
where
    A: Fn(usize) -> bool,
    V: FnMut(&[usize]) -> bool,
{
    fn add(&mut self, w: usize) {
        self.set.push(w);
        self.mark[w] += 1;
        for &u in self.g.neighbors(w) {
            self.mark[u] += 1;
        }
    }

    fn remove(&mut self, w: usize) {
        self.set.pop();
        self.mark[w] -= 1;
        for &u in self.g.neighbors(w) {
            self.mark[u] -= 1;
        }
    }

    fn grow(&mut self, mut ext: Vec<usize>) -> bool {
        if !(self.visit)(&self.set) {
            return false;
        }
        if self.set.len() == self.max_size {
            return true;
        }
        while let Some(w) = ext.pop() {
            let mut next = ext.clone();
            next.extend(self.g.neighbors(w).iter().copied().filter(|&u| self.mark[u] == 0 && (self.allowed)(u)));
            self.add(w);
            let go_on = self.grow(next);
            self.remove(w);
            if !go_on {
                return false;
            }
        }
        true
    }
}

/// Calls `visit` on every connected set of at most `max_size` vertices that
/// contains `anchor` and otherwise uses only vertices passing `allowed`.
/// The slice handed to `visit` is in insertion order, anchor first.
/// Enumeration stops early when `visit` returns false.
pub fn for_each_connected_set<A, V>(g: &Graph, anchor: usize, max_size: usize, allowed: A, visit: V)
where
    A: Fn(usize) -> bool,
    V: FnMut(&[usize]) -> bool,
{
    if max_size == 0 {
        return;
    }
    let mut e =
        Enumerator { g, allowed, visit, max_size, mark: vec![0; g.vertex_count()], set: Vec::with_capacity(max_size) };
    e.add(anchor);
    let ext: Vec<usize> = g.neighbors(anchor).iter().copied().filter(|&u| u != anchor && (e.allowed)(u)).collect();
    e.grow(ext);
}

/// Counts the connected sets containing `o`, indexed by size `0..=m_max`
/// (entry 0 is always 0). Fails once more than `budget` sets are seen.
pub fn count_animals(g: &Graph, o: usize, m_max: usize, budget: u64) -> Result<Vec<u64>> {
    if o >= g.vertex_count() {
        return Err(invalid(format!("vertex {o} not in graph")));
    }
    let mut counts = vec![0u64; m_max + 1];
    let mut seen = 0u64;
    for_each_connected_set(
        g,
        o,
        m_max,
        |_| true,
        |set| {
            counts[set.len()] += 1;
            seen += 1;
            seen <= budget
        },
    );
    if seen > budget {
        return Err(Error::BudgetExceeded { budget });
    }
    Ok(counts)
}

/// One row of [`animal_bound_check`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnimalRow {
    pub m: usize,
    pub count: u64,
    pub bound: f64,
    pub within_bound: bool,
}

/// Compares the number of connected `m`-sets containing `o` with
/// `((d-1)e)^m` for every `1 <= m <= m_max`.
pub fn animal_bound_check(d: usize, m_max: usize, g: &Graph, o: usize) -> Result<Vec<AnimalRow>> {
    if d < 2 {
        return Err(invalid("degree must be at least 2"));
    }
    if m_max > 10 {
        return Err(invalid("m_max is limited to 10"));
    }
    let counts = count_animals(g, o, m_max, 1 << 32)?;
    let base = (d - 1) as f64 * std::f64::consts::E;
    Ok((1..=m_max)
        .map(|m| {
            let bound = base.powi(m as i32);
            AnimalRow { m, count: counts[m], bound, within_bound: counts[m] as f64 <= bound }
        })
        .collect())
}

/// Shared search state for a parallel scan over anchors.
pub(crate) struct Budget {
    limit: u64,
    used: AtomicU64,
    blown: AtomicBool,
}

impl Budget {
    pub(crate) fn new(limit: u64) -> Self {
        Self { limit, used: AtomicU64::new(0), blown: AtomicBool::new(false) }
    }

    /// Records one enumerated set; false once the limit is passed.
    pub(crate) fn tick(&self) -> bool {
        if self.used.fetch_add(1, Ordering::Relaxed) >= self.limit {
            self.blown.store(true, Ordering::Relaxed);
        }
        !self.blown.load(Ordering::Relaxed)
    }

    pub(crate) fn check(&self) -> Result<()> {
        if self.blown.load(Ordering::Relaxed) {
            Err(Error::BudgetExceeded { budget: self.limit })
        } else {
            Ok(())
        }
    }
}

/// Lexicographically smallest sorted connected set of exactly `size`
/// vertices, drawn from `allowed`, that satisfies `accept`. Each set is
/// enumerated once, from its smallest vertex; anchors run in parallel.
pub(crate) fn smallest_accepted<P>(
    g: &Graph,
    allowed: &[bool],
    size: usize,
    budget: &Budget,
    accept: P,
) -> Result<Option<Vec<usize>>>
where
    P: Fn(&[usize]) -> bool + Sync,
{
    let anchors: Vec<usize> = (0..g.vertex_count()).filter(|&v| allowed[v]).collect();
    let best = anchors
        .par_iter()
        .filter_map(|&root| {
            let mut best: Option<Vec<usize>> = None;
            let mut sorted = Vec::with_capacity(size);
            for_each_connected_set(
                g,
                root,
                size,
                |u| u > root && allowed[u],
                |set| {
                    if set.len() < size {
                        return true;
                    }
                    if !budget.tick() {
                        return false;
                    }
                    if accept(set) {
                        sorted.clear();
                        sorted.extend_from_slice(set);
                        sorted.sort_unstable();
                        if best.as_ref().is_none_or(|b| sorted < *b) {
                            best = Some(sorted.clone());
                        }
                    }
                    true
                },
            );
            best
        })
        .min();
    budget.check()?;
    Ok(best)
}
