//! Seeded Monte Carlo experiments.
//!
//! Every trial draws from its own substream of the run seed, keyed by
//! (grid index, trial index), so results do not depend on thread
//! scheduling.

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distribution::OffspringDistribution;
use crate::dynamics::{run, SiteConfig};
use crate::error::{invalid, Error, Result};
use crate::generators::{
    gen_greedy_fortfree_tree, gen_grid, gen_gw_tree, gen_regular_tree, gen_subdivided_tree, Arity,
};
use crate::graph::Graph;
use crate::output::fmt_sig;
use crate::rng::{RngSeed, SimRng};

/// One point of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub p: f64,
    pub estimate: f64,
    pub std_err: f64,
    pub trials: usize,
    /// Degree parameter of the generator, when it has one.
    pub d: Option<usize>,
    pub k: usize,
    pub depth: usize,
    pub seed: u64,
}

impl SweepRow {
    fn from_count(p: f64, hits: usize, trials: usize, d: Option<usize>, k: usize, depth: usize, seed: RngSeed) -> Self {
        let estimate = hits as f64 / trials as f64;
        Self {
            p,
            estimate,
            std_err: (estimate * (1.0 - estimate) / trials as f64).sqrt(),
            trials,
            d,
            k,
            depth,
            seed: seed.0,
        }
    }
}

/// Column order of [`write_sweep_csv`].
pub const SWEEP_HEADER: [&str; 8] = ["p", "estimate", "std_err", "trials", "d", "k", "depth", "seed"];

/// Writes rows as CSV with a header line; floats at 12 significant digits.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let io = |e: csv::Error| invalid(format!("csv output failed: {e}"));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER).map_err(io)?;
    for r in rows {
        w.write_record([
            fmt_sig(r.p),
            fmt_sig(r.estimate),
            fmt_sig(r.std_err),
            r.trials.to_string(),
            r.d.map(|d| d.to_string()).unwrap_or_default(),
            r.k.to_string(),
            r.depth.to_string(),
            r.seed.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| invalid(format!("csv output failed: {e}")))?;
    Ok(())
}

/// Estimates `y_n`, the probability that a vertex does NOT have at least
/// `m = d+1-k` vacant children each carrying the same structure `n - 1`
/// levels further down (the structure is trivially present at level 0).
///
/// Each trial grows the `d`-ary tree lazily and stops exploring a vertex as
/// soon as its outcome is decided.
pub fn mc_extinction_depth_n(d: usize, k: usize, p: f64, n: usize, trials: usize, seed: RngSeed) -> Result<SweepRow> {
    if k < 2 || k > d {
        return Err(invalid(format!("need 2 <= k <= d, got d = {d}, k = {k}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("p must lie in [0, 1], got {p}")));
    }
    if trials == 0 {
        return Err(invalid("need at least one trial"));
    }
    let m = d + 1 - k;
    let misses = (0..trials)
        .into_par_iter()
        .filter(|&t| {
            let mut rng = seed.substream(n as u64, t as u64);
            !carries(&mut rng, d, m, 1.0 - p, n)
        })
        .count();
    Ok(SweepRow::from_count(p, misses, trials, Some(d), k, n, seed))
}

/// Whether at least `m` of `d` children are vacant and carry the structure
/// to depth `n - 1`.
fn carries(rng: &mut SimRng, d: usize, m: usize, vacancy: f64, n: usize) -> bool {
    if n == 0 {
        return true;
    }
    let (mut good, mut bad) = (0, 0);
    for _ in 0..d {
        let ok = rng.gen::<f64>() < vacancy && carries(rng, d, m, vacancy, n - 1);
        if ok {
            good += 1;
            if good >= m {
                return true;
            }
        } else {
            bad += 1;
            if bad > d - m {
                return false;
            }
        }
    }
    false
}

/// Graph family for occupation experiments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GeneratorSpec {
    Regular {
        d: usize,
        arity: Arity,
    },
    Subdivided {
        d: usize,
    },
    GaltonWatson {
        dist: OffspringDistribution,
    },
    Greedy {
        n: usize,
    },
    /// Square box of side `n`; the depth parameter is ignored.
    Grid {
        n: usize,
    },
}

impl GeneratorSpec {
    pub fn degree_param(&self) -> Option<usize> {
        match self {
            Self::Regular { d, .. } | Self::Subdivided { d } => Some(*d),
            _ => None,
        }
    }

    pub fn is_random(&self) -> bool {
        matches!(self, Self::GaltonWatson { .. })
    }

    /// Builds the graph at `depth`; `seed` is used only by random families.
    pub fn build(&self, depth: usize, seed: RngSeed) -> Result<Instance> {
        let from_tree = |t: crate::graph::RootedTree| Instance {
            boundary: (0..t.vertex_count()).filter(|&v| t.is_boundary(v)).collect(),
            origin: t.root(),
            graph: t.graph().clone(),
        };
        Ok(match self {
            Self::Regular { d, arity } => from_tree(gen_regular_tree(*d, depth, *arity)?),
            Self::Subdivided { d } => from_tree(gen_subdivided_tree(*d, depth)?),
            Self::GaltonWatson { dist } => from_tree(gen_gw_tree(dist, depth, seed)?),
            Self::Greedy { n } => from_tree(gen_greedy_fortfree_tree(*n, depth)?),
            Self::Grid { n } => {
                let g = gen_grid(*n, true)?;
                Instance { origin: g.center(), boundary: g.boundary.clone().unwrap_or_default(), graph: g.graph }
            }
        })
    }
}

/// A generated graph with its boundary and origin (root or grid centre).
#[derive(Clone, Debug)]
pub struct Instance {
    pub graph: Graph,
    pub boundary: Vec<usize>,
    pub origin: usize,
}

/// Initial state of boundary vertices.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryInit {
    /// No pre-occupation: boundary vertices are random like the rest.
    #[default]
    Vacant,
    /// Boundary vertices start occupied.
    Occupied,
}

/// Event whose probability is estimated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OccupationEvent {
    /// Every vertex ends occupied.
    #[default]
    Complete,
    /// The root (grid centre) ends occupied.
    Root,
}

/// Settings shared by [`mc_occupation_sweep`] and [`mc_empirical_pc`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OccupationSetup {
    pub spec: GeneratorSpec,
    pub k: usize,
    pub depth: usize,
    pub boundary: BoundaryInit,
    pub event: OccupationEvent,
}

impl OccupationSetup {
    fn check(&self) -> Result<()> {
        if self.k < 1 {
            return Err(invalid("k must be at least 1"));
        }
        Ok(())
    }

    /// Outcome of one trial with site uniforms `u` (occupied iff `u < p`).
    fn outcome(&self, inst: &Instance, u: &[f64], p: f64) -> Result<bool> {
        let n = inst.graph.vertex_count();
        let mut c0 = SiteConfig::from_vertices(n, (0..n).filter(|&v| u[v] < p));
        if self.boundary == BoundaryInit::Occupied {
            for &v in &inst.boundary {
                c0.occupy(v);
            }
        }
        let fin = run(&inst.graph, &c0, self.k)?.final_config;
        Ok(match self.event {
            OccupationEvent::Complete => fin.is_full(),
            OccupationEvent::Root => fin.is_occupied(inst.origin),
        })
    }

    fn shared_instance(&self, seed: RngSeed) -> Result<Option<Instance>> {
        if self.spec.is_random() {
            Ok(None)
        } else {
            self.spec.build(self.depth, seed).map(Some)
        }
    }

    fn instance_for<'a>(
        &self,
        shared: &'a Option<Instance>,
        owned: &'a mut Option<Instance>,
        seed: RngSeed,
        trial: usize,
    ) -> Result<&'a Instance> {
        match shared {
            Some(i) => Ok(i),
            None => {
                *owned = Some(self.spec.build(self.depth, seed.derive(TREE_STREAM, trial as u64))?);
                Ok(owned.as_ref().expect("just built"))
            }
        }
    }

    fn row(&self, p: f64, hits: usize, trials: usize, seed: RngSeed) -> SweepRow {
        SweepRow::from_count(p, hits, trials, self.spec.degree_param(), self.k, self.depth, seed)
    }
}

/// Substream key of per-trial random trees.
const TREE_STREAM: u64 = u64::MAX;
/// Substream key of the coupled site uniforms.
const COUPLED_STREAM: u64 = u64::MAX - 1;

fn uniforms(rng: &mut SimRng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen::<f64>()).collect()
}

/// Fraction of trials in which the event occurs, for each `p` in the grid.
/// Trial `t` at grid index `i` uses substream `(i, t)`; random trees are
/// drawn once per trial index and shared across the grid.
pub fn mc_occupation_sweep(
    setup: &OccupationSetup,
    p_grid: &[f64],
    trials: usize,
    seed: RngSeed,
) -> Result<Vec<SweepRow>> {
    setup.check()?;
    if trials == 0 {
        return Err(invalid("need at least one trial"));
    }
    if let Some(p) = p_grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(invalid(format!("p = {p} is outside [0, 1]")));
    }
    let shared = setup.shared_instance(seed)?;
    p_grid
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let hits = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let mut owned = None;
                    let inst = setup.instance_for(&shared, &mut owned, seed, t)?;
                    let u = uniforms(&mut seed.substream(i as u64, t as u64), inst.graph.vertex_count());
                    setup.outcome(inst, &u, p).map(usize::from)
                })
                .sum::<Result<usize>>()?;
            Ok(setup.row(p, hits, trials, seed))
        })
        .collect()
}

/// Point where the empirical probability of the event crosses ½.
///
/// Each trial keeps one uniform per vertex for every `p`, so its outcome is
/// monotone in `p` and has a threshold, located by bisection to `tol`. The
/// crossing is the median threshold; the outcomes at that point are then
/// re-simulated and must agree with the thresholds, otherwise the run is
/// reported as non-monotone.
pub fn mc_empirical_pc(setup: &OccupationSetup, trials: usize, tol: f64, seed: RngSeed) -> Result<f64> {
    setup.check()?;
    if trials == 0 {
        return Err(invalid("need at least one trial"));
    }
    if !(tol > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    let shared = setup.shared_instance(seed)?;
    let trial_data = |t: usize| -> Result<(Option<Instance>, Vec<f64>)> {
        let mut owned = None;
        let n = setup.instance_for(&shared, &mut owned, seed, t)?.graph.vertex_count();
        Ok((owned, uniforms(&mut seed.substream(COUPLED_STREAM, t as u64), n)))
    };
    let mut thresholds = (0..trials)
        .into_par_iter()
        .map(|t| {
            let (owned, u) = trial_data(t)?;
            let inst = shared.as_ref().or(owned.as_ref()).expect("instance");
            if setup.outcome(inst, &u, 0.0)? {
                return Ok(0.0);
            }
            let (mut a, mut b) = (0.0f64, 1.0f64);
            if !setup.outcome(inst, &u, 1.0)? {
                return Err(Error::NonMonotone { p: 1.0 });
            }
            while b - a > tol {
                let mid = 0.5 * (a + b);
                if setup.outcome(inst, &u, mid)? {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            Ok(b)
        })
        .collect::<Result<Vec<f64>>>()?;
    thresholds.sort_by(f64::total_cmp);
    let crossing = thresholds[(trials - 1) / 2];
    let expected = thresholds.iter().filter(|&&x| x <= crossing).count();
    let observed = (0..trials)
        .into_par_iter()
        .map(|t| {
            let (owned, u) = trial_data(t)?;
            let inst = shared.as_ref().or(owned.as_ref()).expect("instance");
            setup.outcome(inst, &u, crossing).map(usize::from)
        })
        .sum::<Result<usize>>()?;
    if observed != expected {
        return Err(Error::NonMonotone { p: crossing });
    }
    Ok(crossing)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::iterate_b;

    #[test]
    fn extinction_edge_cases() {
        let r = mc_extinction_depth_n(3, 2, 0.3, 0, 100, RngSeed(1)).unwrap();
        assert_eq!(r.estimate, 0.0);
        let r = mc_extinction_depth_n(3, 2, 1.0, 5, 100, RngSeed(1)).unwrap();
        assert_eq!(r.estimate, 1.0);
        assert!(mc_extinction_depth_n(3, 1, 0.3, 2, 10, RngSeed(1)).is_err());
    }

    #[test]
    fn extinction_matches_exact_iteration() {
        for (d, k, p, n) in [(3, 2, 0.2, 6), (4, 3, 0.3, 5), (5, 2, 0.05, 4)] {
            let r = mc_extinction_depth_n(d, k, p, n, 20_000, RngSeed(9)).unwrap();
            let exact = iterate_b(d, k, p, n).unwrap();
            let sigma = (exact * (1.0 - exact) / 20_000.0).sqrt();
            assert!((r.estimate - exact).abs() <= 4.0 * sigma + 1e-12, "{d} {k} {p} {n}: {} vs {exact}", r.estimate);
        }
    }

    #[test]
    fn sweep_trivial_points_and_reproducibility() {
        let setup = OccupationSetup {
            spec: GeneratorSpec::Regular { d: 2, arity: Arity::DAry },
            k: 2,
            depth: 5,
            boundary: BoundaryInit::Vacant,
            event: OccupationEvent::Complete,
        };
        let rows = mc_occupation_sweep(&setup, &[0.0, 0.5, 1.0], 200, RngSeed(3)).unwrap();
        assert_eq!(rows[0].estimate, 0.0);
        assert_eq!(rows[2].estimate, 1.0);
        let again = mc_occupation_sweep(&setup, &[0.0, 0.5, 1.0], 200, RngSeed(3)).unwrap();
        assert_eq!(rows, again);
        let mut a = Vec::new();
        write_sweep_csv(&rows, &mut a).unwrap();
        let text = String::from_utf8(a).unwrap();
        assert!(text.starts_with("p,estimate,std_err,trials,d,k,depth,seed\n"));
        assert_eq!(text.lines().count(), 4);
    }

    #[test]
    fn root_event_matches_finite_depth_recursion() {
        // the root stays vacant iff it is vacant and at least d-k+1 children
        // stay vacant with a vacant parent; boundary leaves never change
        let (d, k, depth) = (3usize, 2usize, 6usize);
        let setup = OccupationSetup {
            spec: GeneratorSpec::Regular { d, arity: Arity::DAry },
            k,
            depth,
            boundary: BoundaryInit::Vacant,
            event: OccupationEvent::Root,
        };
        let grid = [0.1, 0.15, 0.2, 0.3];
        let rows = mc_occupation_sweep(&setup, &grid, 4000, RngSeed(11)).unwrap();
        for row in rows {
            let mut q = 1.0 - row.p;
            for _ in 0..depth {
                q = (1.0 - row.p) * crate::analytic::binomial::tail_ge(d, q, d - k + 1);
            }
            let exact = 1.0 - q;
            let sigma = (exact * (1.0 - exact) / 4000.0).sqrt();
            assert!((row.estimate - exact).abs() <= 4.0 * sigma + 1e-9, "{row:?} vs {exact}");
        }
    }

    #[test]
    fn coupled_outcomes_are_monotone() {
        let setup = OccupationSetup {
            spec: GeneratorSpec::GaltonWatson { dist: OffspringDistribution::parse("2:0.5,3:0.5").unwrap() },
            k: 2,
            depth: 5,
            boundary: BoundaryInit::Vacant,
            event: OccupationEvent::Root,
        };
        let shared = setup.shared_instance(RngSeed(5)).unwrap();
        for t in 0..30 {
            let mut owned = None;
            let inst = setup.instance_for(&shared, &mut owned, RngSeed(5), t).unwrap();
            let u = uniforms(&mut RngSeed(5).substream(COUPLED_STREAM, t as u64), inst.graph.vertex_count());
            let mut prev = false;
            for i in 0..=20 {
                let now = setup.outcome(inst, &u, i as f64 / 20.0).unwrap();
                assert!(now || !prev);
                prev = now;
            }
        }
        let pc = mc_empirical_pc(&setup, 101, 1e-4, RngSeed(5)).unwrap();
        assert!(pc > 0.0 && pc < 1.0);
    }
}
