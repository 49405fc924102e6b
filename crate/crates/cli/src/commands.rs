//! One function per subcommand. Each returns a JSON artifact whose
//! certificates and brackets have already been re-checked.

use std::fs;
use std::path::Path;

use rand::Rng;
use serde_json::{json, Value};

use bootperc::analytic::gw::gw_ratio_max;
use bootperc::analytic::{
    anchored_bound, asymptotic_gamma_check, closed_form_k2, closed_form_kd, critical_p_regular, gw_critical,
    q_lower_bound,
};
use bootperc::animals::animal_bound_check;
use bootperc::forts::{blue_fort, red_coloring, BoundaryMode, RedOutcome};
use bootperc::montecarlo::{
    mc_empirical_pc, mc_extinction_depth_n, mc_occupation_sweep, BoundaryInit, GeneratorSpec, Instance,
    OccupationEvent, OccupationSetup,
};
use bootperc::treecalc::{estimate_branching, fortfree_br_bound, prune_beta, prune_k};
use bootperc::{
    find_min_fort, gen_greedy_fortfree_tree, gen_regular_tree, gen_subdivided_tree, run, Arity, FortCertificate,
    OffspringDistribution, RngSeed, RootedTree, SiteConfig,
};

use crate::args::*;
use crate::{Artifact, CliError, CliResult};

pub fn dispatch(command: &Command) -> CliResult<Artifact> {
    match command {
        Command::Critical(a) => critical(a),
        Command::GwCritical(a) => gw(a),
        Command::Simulate(a) => simulate(a),
        Command::Sweep(a) => sweep(a),
        Command::Prune(a) => prune(a),
        Command::Forts(a) => forts(a),
        Command::Bound(a) => bound(&a.kind),
        Command::Branching(a) => branching(a),
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

fn need<T: Copy>(v: Option<T>, flag: &str) -> CliResult<T> {
    v.ok_or_else(|| CliError::usage(format!("--{flag} is required here")))
}

fn critical(a: &CriticalArgs) -> CliResult<Artifact> {
    let r = critical_p_regular(a.d, a.k, a.tol)?;
    let mut out = to_json(&r);
    let closed = if a.k == a.d {
        Some(closed_form_kd(a.d)?)
    } else if a.k == 2 {
        Some(closed_form_k2(a.d)?)
    } else {
        None
    };
    out["closed_form"] = to_json(&closed);
    out["upper_bound"] = json!((a.k - 1) as f64 / a.d as f64);
    Ok(Artifact::Json(out))
}

fn gw(a: &GwCriticalArgs) -> CliResult<Artifact> {
    let dist = OffspringDistribution::parse(&a.dist)?;
    let r = gw_critical(&dist, a.k, a.tol)?;
    let (ratio_max, argmax) = gw_ratio_max(&dist, a.k);
    let mut out = to_json(&r);
    out["ratio_max"] = json!(ratio_max);
    out["argmax"] = json!(argmax);
    out["mean_offspring"] = json!(dist.mean());
    Ok(Artifact::Json(out))
}

fn arity(a: ArityArg) -> Arity {
    match a {
        ArityArg::DAry => Arity::DAry,
        ArityArg::DPlusOneRegular => Arity::DPlusOneRegular,
    }
}

fn spec(f: &FamilyArgs) -> CliResult<GeneratorSpec> {
    let family = need(f.family, "family")?;
    Ok(match family {
        Family::Regular => GeneratorSpec::Regular { d: need(f.d, "d")?, arity: arity(f.arity) },
        Family::Subdivided => GeneratorSpec::Subdivided { d: need(f.d, "d")? },
        Family::Gw => {
            let text = f.dist.as_deref().ok_or_else(|| CliError::usage("--dist is required for gw"))?;
            GeneratorSpec::GaltonWatson { dist: OffspringDistribution::parse(text)? }
        }
        Family::Greedy => GeneratorSpec::Greedy { n: need(f.n, "n")? },
        Family::Grid => GeneratorSpec::Grid { n: need(f.n, "n")? },
        Family::Path => return Err(CliError::usage("the path family is only available for branching")),
    })
}

fn depth(f: &FamilyArgs, spec: &GeneratorSpec) -> CliResult<usize> {
    match spec {
        GeneratorSpec::Grid { .. } => Ok(f.depth.unwrap_or(0)),
        _ => need(f.depth, "depth"),
    }
}

fn read_tree(path: &Path) -> CliResult<RootedTree> {
    let text = fs::read_to_string(path).map_err(CliError::io)?;
    Ok(RootedTree::parse_parent_list(&text)?)
}

fn from_tree(t: &RootedTree) -> Instance {
    Instance {
        graph: t.graph().clone(),
        boundary: (0..t.vertex_count()).filter(|&v| t.is_boundary(v)).collect(),
        origin: t.root(),
    }
}

fn instance(src: &TreeSource, seed: Option<u64>) -> CliResult<Instance> {
    if let Some(path) = &src.tree {
        return Ok(from_tree(&read_tree(path)?));
    }
    let s = spec(&src.family)?;
    let seed = if s.is_random() { need(seed, "seed")? } else { seed.unwrap_or(0) };
    Ok(s.build(depth(&src.family, &s)?, RngSeed(seed))?)
}

fn tree(src: &TreeSource, seed: Option<u64>) -> CliResult<RootedTree> {
    if let Some(path) = &src.tree {
        return read_tree(path);
    }
    let f = &src.family;
    let depth = need(f.depth, "depth")?;
    Ok(match need(f.family, "family")? {
        Family::Regular => gen_regular_tree(need(f.d, "d")?, depth, arity(f.arity))?,
        Family::Subdivided => gen_subdivided_tree(need(f.d, "d")?, depth)?,
        Family::Greedy => gen_greedy_fortfree_tree(need(f.n, "n")?, depth)?,
        Family::Gw => {
            let text = f.dist.as_deref().ok_or_else(|| CliError::usage("--dist is required for gw"))?;
            bootperc::gen_gw_tree(&OffspringDistribution::parse(text)?, depth, RngSeed(need(seed, "seed")?))?
        }
        Family::Path => path_tree(depth)?,
        Family::Grid => return Err(CliError::usage("this command needs a tree, not a grid")),
    })
}

fn path_tree(n: usize) -> bootperc::Result<RootedTree> {
    let parents: Vec<Option<usize>> = (0..=n).map(|v| v.checked_sub(1)).collect();
    RootedTree::from_parents(&parents, None)
}

fn simulate(a: &SimulateArgs) -> CliResult<Artifact> {
    if !(0.0..=1.0).contains(&a.p) {
        return Err(CliError::usage(format!("p must lie in [0, 1], got {}", a.p)));
    }
    let inst = instance(&a.source, Some(a.seed))?;
    let n = inst.graph.vertex_count();
    let mut rng = RngSeed(a.seed).rng();
    let mut c0 = SiteConfig::from_vertices(n, (0..n).filter(|_| rng.gen::<f64>() < a.p).collect::<Vec<_>>());
    if a.boundary == BoundaryArg::Occupied {
        inst.boundary.iter().for_each(|&v| c0.occupy(v));
    }
    let report = run(&inst.graph, &c0, a.k)?;
    Ok(Artifact::Json(json!({
        "vertices": n,
        "origin": inst.origin,
        "initial_occupied": c0.occupied_count(),
        "summary": report.summary(),
        "completely_occupied": report.completely_occupied(),
        "origin_occupied": report.final_config.is_occupied(inst.origin),
        "initial_config": c0.to_hex(),
        "final_config": report.final_config.to_hex(),
    })))
}

fn sweep(a: &SweepArgs) -> CliResult<Artifact> {
    let seed = RngSeed(a.seed);
    if a.mode == SweepMode::Extinction {
        if a.find_pc.is_some() {
            return Err(CliError::usage("--find-pc applies to occupation sweeps only"));
        }
        let d = need(a.family.d, "d")?;
        let n = need(a.family.depth, "depth")?;
        let depths = if a.depth_check { vec![n, 2 * n] } else { vec![n] };
        let mut rows = Vec::new();
        for n in depths {
            for &p in &a.p_grid {
                rows.push(mc_extinction_depth_n(d, a.k, p, n, a.trials, seed)?);
            }
        }
        return Ok(Artifact::Sweep(rows));
    }
    let s = spec(&a.family)?;
    let setup = OccupationSetup {
        depth: depth(&a.family, &s)?,
        spec: s,
        k: a.k,
        boundary: match a.boundary {
            BoundaryArg::Vacant => BoundaryInit::Vacant,
            BoundaryArg::Occupied => BoundaryInit::Occupied,
        },
        event: match a.event {
            EventArg::Complete => OccupationEvent::Complete,
            EventArg::Root => OccupationEvent::Root,
        },
    };
    let mut rows = mc_occupation_sweep(&setup, &a.p_grid, a.trials, seed)?;
    if a.depth_check {
        if matches!(setup.spec, GeneratorSpec::Grid { .. }) {
            return Err(CliError::usage("--depth-check needs a tree family"));
        }
        let deeper = OccupationSetup { depth: 2 * setup.depth, ..setup.clone() };
        rows.extend(mc_occupation_sweep(&deeper, &a.p_grid, a.trials, seed)?);
    }
    match a.find_pc {
        None => Ok(Artifact::Sweep(rows)),
        Some(tol) => {
            let pc = mc_empirical_pc(&setup, a.trials, tol, seed)?;
            Ok(Artifact::Json(json!({ "rows": rows, "empirical_pc": pc, "crossing_level": 0.5 })))
        }
    }
}

fn prune(a: &PruneArgs) -> CliResult<Artifact> {
    let t = tree(&a.source, a.seed)?;
    let reports = if a.k == 1 {
        if a.beta.len() != 1 {
            return Err(CliError::usage("one --beta value is needed for k = 1"));
        }
        vec![prune_beta(&t, a.beta[0])?]
    } else {
        let betas = match a.beta.len() {
            1 => vec![a.beta[0]; a.k],
            n if n == a.k => a.beta.clone(),
            n => return Err(CliError::usage(format!("need 1 or {} beta values, got {n}", a.k))),
        };
        prune_k(&t, a.k, &betas)?
    };
    let verified = reports.iter().all(|r| r.fort.verify(t.graph()) && r.holds());
    if !verified {
        return Err(CliError { kind: "verification", message: "a pruning report failed re-verification".into() });
    }
    let mut out = if a.k == 1 { to_json(&reports[0]) } else { json!({ "rounds": reports }) };
    out["verified"] = json!(verified);
    Ok(Artifact::Json(out))
}

fn checked(cert: FortCertificate, t: &RootedTree) -> CliResult<Value> {
    if !cert.verify(t.graph()) {
        return Err(CliError { kind: "verification", message: "certificate failed re-verification".into() });
    }
    let mut v = to_json(&cert);
    v["size"] = json!(cert.len());
    Ok(v)
}

fn forts(a: &FortsArgs) -> CliResult<Artifact> {
    let t = tree(&a.source, a.seed)?;
    let out = match a.mode {
        FortMode::Min => {
            let restrict = a.interior.then(|| t.interior());
            let found = find_min_fort(t.graph(), need(a.k, "k")?, a.max_size, restrict.as_deref(), a.budget)?;
            let cert = found.map(|c| checked(c, &t)).transpose()?;
            json!({ "found": cert.is_some(), "max_size": a.max_size, "certificate": cert })
        }
        FortMode::Red => {
            let mode = if a.closed { BoundaryMode::Closed } else { BoundaryMode::Open };
            let r = red_coloring(&t, need(a.k, "k")?, mode)?;
            let red = (0..t.vertex_count()).filter(|&v| r.coloring.is_red(v)).count();
            let rounds = r.coloring.round_painted.iter().flatten().max().copied().unwrap_or(0);
            match r.outcome {
                RedOutcome::Fort(c) => {
                    json!({ "root_red": true, "red_vertices": red, "rounds": rounds, "certificate": checked(c, &t)? })
                }
                RedOutcome::KarySubtree(s) => {
                    json!({ "root_red": false, "red_vertices": red, "rounds": rounds, "subtree": s })
                }
            }
        }
        FortMode::Blue => {
            let cert = blue_fort(&t, need(a.x, "x")?, need(a.r, "r")?, need(a.k, "k")?)?;
            json!({ "certificate": checked(cert, &t)? })
        }
        FortMode::Verify => {
            let path = a.certificate.as_deref().ok_or_else(|| CliError::usage("--certificate is required"))?;
            let cert = FortCertificate::from_json(&fs::read_to_string(path).map_err(CliError::io)?)?;
            json!({ "valid": cert.verify(t.graph()), "k": cert.k, "size": cert.len() })
        }
    };
    Ok(Artifact::Json(out))
}

fn bound(kind: &BoundKind) -> CliResult<Artifact> {
    Ok(Artifact::Json(match *kind {
        BoundKind::Anchored { d, k, h } => to_json(&anchored_bound(d, k, h)?),
        BoundKind::QLower { d, k, tol } => to_json(&q_lower_bound(d, k, tol)?),
        BoundKind::Fortfree { k, n } => json!({ "k": k, "n": n, "branching_lower_bound": fortfree_br_bound(k, n)? }),
        BoundKind::Gamma { gamma, ref d_list } => {
            json!({ "gamma": gamma, "rows": asymptotic_gamma_check(gamma, d_list)? })
        }
        BoundKind::Animals { d, m_max } => {
            if d < 3 {
                return Err(CliError::usage("animal counts need d >= 3"));
            }
            let t = gen_regular_tree(d - 1, m_max + 1, Arity::DPlusOneRegular)?;
            json!({ "d": d, "rows": animal_bound_check(d, m_max, t.graph(), t.root())? })
        }
    }))
}

fn branching(a: &BranchingArgs) -> CliResult<Artifact> {
    let est = match a.family {
        Family::Regular => {
            let d = need(a.d, "d")?;
            estimate_branching(|n| gen_regular_tree(d, n, Arity::DAry), a.lo, a.hi, &a.depths, a.tol)?
        }
        Family::Subdivided => {
            // one level of the subdivided tree is two edges deep
            let d = need(a.d, "d")?;
            estimate_branching(|n| gen_subdivided_tree(d, n.div_ceil(2)), a.lo, a.hi, &a.depths, a.tol)?
        }
        Family::Greedy => {
            let n = need(a.n, "n")?;
            estimate_branching(|depth| gen_greedy_fortfree_tree(n, depth), a.lo, a.hi, &a.depths, a.tol)?
        }
        Family::Path => estimate_branching(path_tree, a.lo, a.hi, &a.depths, a.tol)?,
        Family::Gw | Family::Grid => {
            return Err(CliError::usage("branching supports the regular, subdivided, greedy and path families"))
        }
    };
    Ok(Artifact::Json(to_json(&est)))
}
