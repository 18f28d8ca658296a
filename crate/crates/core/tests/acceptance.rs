//! Acceptance suite: one PASS/FAIL line per criterion. Exits nonzero if any
//! criterion fails.

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::Rng;

use mapscale_core::complex::{
    are_contiguous, FiniteMetricSpace, PointId, SimplicialComplex, SimplicialMap, VertexFunction,
};
use mapscale_core::cover::{build_net_tower, build_nets, default_probes, verify_goodness, Codomain, Cover, Extent};
use mapscale_core::experiments::{demo_instability, verify_stability, Theorem, VerifyConfig};
use mapscale_core::mapper::{nerve, pullback, pullback_cover_map, ComplexTower, Lens, Mode};
use mapscale_core::persistence::{
    bottleneck, homology_basis, induced_map, oracle_diagram, persistence_module, tower_diagram, tower_diagrams,
    PersistenceDiagram,
};
use mapscale_core::random::{self, random_points, random_tower};

type Outcome = Result<String, String>;

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let stamp = |d: String| format!("{d} [{:.2}s]", elapsed.as_secs_f64());
    match (out, limit) {
        (Ok(d), Some(l)) if elapsed > l => Err(stamp(format!("{d}; over the {:.0}s limit", l.as_secs_f64()))),
        (Ok(d), _) => Ok(stamp(d)),
        (Err(d), _) => Err(stamp(d)),
    }
}

fn instability_demo() -> Outcome {
    let r = demo_instability(1.0, 2.0, 16.0).map_err(|e| e.to_string())?;
    let same = bottleneck(&r.diagram_f, &r.diagram_f, 1);
    check(
        r.pass && r.bottleneck == f64::INFINITY && same == 0.0,
        format!(
            "D1(f) = {:?}, D1(g) = {:?}, bottleneck = {}, |f - g| = {}",
            r.diagram_f.pairs(1),
            r.diagram_g.pairs(1),
            r.bottleneck,
            r.sup_distance
        ),
    )
}

fn experiment(theorem: Theorem, trials: usize, seed: u64) -> Outcome {
    let config = VerifyConfig { trials, seed, ..VerifyConfig::default() };
    let r = verify_stability(theorem, &config).map_err(|e| e.to_string())?;
    let worst = r.trials.iter().map(|t| t.measured - t.bound).fold(f64::NEG_INFINITY, f64::max);
    let largest = r.trials.iter().map(|t| t.params["simplices"]).fold(0.0, f64::max);
    check(
        r.all_passed() && r.total >= trials,
        format!(
            "{}/{} trials pass, {} raw violations, max(measured - bound) = {worst:.4}, largest complex {largest} simplices",
            r.passed, r.total, r.raw_violations
        ),
    )
}

fn net_tower() -> Outcome {
    let rho = 11.0;
    let mut rng = random::rng(70);
    let mut checked = 0;
    for trial in 0..5 {
        let pts = random_points(&mut rng, 50, 0.0, 1.0);
        let space = Arc::new(FiniteMetricSpace::euclidean(&pts));
        let ids: Vec<PointId> = space.ids().to_vec();
        let levels = [-2, -1, 0];
        let nets = build_nets(&space, &ids, rho, &levels).map_err(|e| e.to_string())?;
        for (a, &la) in levels.iter().enumerate() {
            let net = &nets[a];
            for (b, &lb) in levels.iter().enumerate() {
                if lb > la && !nets[b].iter().all(|p| net.contains(p)) {
                    return Err(format!("trial {trial}: N({lb}) not inside N({la})"));
                }
            }
            let sep = rho.powi(la - 1) / 16.0;
            for (i, &p) in net.iter().enumerate() {
                for &q in &net[i + 1..] {
                    if space.dist(p, q).unwrap() < sep {
                        return Err(format!("trial {trial}: level {la} points {p}, {q} closer than {sep}"));
                    }
                }
            }
            for &z in &ids {
                let d = net.iter().map(|&p| space.dist(z, p).unwrap()).fold(f64::INFINITY, f64::min);
                if d > rho.powi(la) {
                    return Err(format!("trial {trial}: point {z} is {d} from N({la})"));
                }
            }
        }
        // A unit-square set and a stretched copy, so that the tower has more
        // than one level and goodness is not vacuous.
        for stretch in [1.0, 2000.0] {
            let scaled: Vec<[f64; 2]> = pts.iter().map(|p| [p[0] * stretch, p[1] * stretch]).collect();
            let space = Arc::new(FiniteMetricSpace::euclidean(&scaled));
            let t = build_net_tower(space.clone(), &ids, rho, 0.0, None).map_err(|e| e.to_string())?;
            for (i, cover) in t.covers().iter().enumerate() {
                for &z in &ids {
                    if !(0..cover.len()).any(|e| cover.contains_point(e, z)) {
                        return Err(format!("stretch {stretch}: point {z} uncovered at level {i}"));
                    }
                }
                if i + 1 < t.len() {
                    let next = t.cover(i + 1);
                    for (e, &img) in t.step_map(i).iter().enumerate() {
                        if !cover.element_within(e, next, img) {
                            return Err(format!("stretch {stretch}: element {e} at level {i} escapes its image"));
                        }
                    }
                }
            }
            let cert = t.certificate().ok_or("net tower has no certificate")?;
            if cert.c != 48.0 || cert.s != 48.0 {
                return Err(format!("certificate {cert:?}"));
            }
            let g = verify_goodness(&t, cert.c, cert.s, &default_probes(&[&t])).map_err(|e| e.to_string())?;
            if !g.passed {
                return Err(format!("stretch {stretch}: goodness fails: {:?}", g.containment_failures.first()));
            }
            checked += 1;
        }
    }
    Ok(format!("5 point sets: nets at levels -2..0 verified; {checked} net towers covering, nested and (48, 48)-good"))
}

/// Minimum number of subsets of diameter at most `eps` covering all points.
fn min_cover(space: &FiniteMetricSpace, eps: f64) -> usize {
    let n = space.len();
    let full = (1usize << n) - 1;
    let ok: Vec<bool> = (0..=full)
        .map(|mask| {
            (0..n).all(|i| mask >> i & 1 == 0 || (0..n).all(|j| mask >> j & 1 == 0 || space.dist_at(i, j) <= eps))
        })
        .collect();
    let mut best = vec![usize::MAX; full + 1];
    best[0] = 0;
    for mask in 1..=full {
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        let mut sub = rest;
        loop {
            let part = sub | low;
            if ok[part] && best[mask ^ part] != usize::MAX {
                best[mask] = best[mask].min(best[mask ^ part] + 1);
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }
    best[full]
}

fn size_sandwich() -> Outcome {
    let rho = 11.0;
    let mut rng = random::rng(80);
    let mut levels = 0;
    for trial in 0..30 {
        let side = [50.0, 200.0, 2000.0][trial % 3];
        let n = rng.gen_range(3..=10);
        let pts = random_points(&mut rng, n, 0.0, side);
        let space = Arc::new(FiniteMetricSpace::euclidean(&pts));
        let ids = space.ids().to_vec();
        let t = build_net_tower(space.clone(), &ids, rho, 0.0, None).map_err(|e| e.to_string())?;
        for (i, &eps) in t.scales().iter().enumerate() {
            let size = t.cover(i).len();
            let (lo, hi) = (min_cover(&space, eps), min_cover(&space, eps / (16.0 * rho)));
            if !(lo <= size && size <= hi) {
                return Err(format!("trial {trial}, scale {eps}: {lo} <= {size} <= {hi} fails"));
            }
            levels += 1;
        }
    }
    Ok(format!("30 point sets, {levels} scales sandwiched"))
}

fn oracle_equivalence() -> Outcome {
    let mut rng = random::rng(90);
    let mut bars = 0;
    for trial in 0..50 {
        let levels = rng.gen_range(1..=4);
        let t = random_tower(&mut rng, levels, 30).map_err(|e| e.to_string())?;
        let fast = tower_diagrams(&t, &[0, 1, 2], 2).map_err(|e| e.to_string())?;
        let mut slow = PersistenceDiagram::default();
        for k in 0..=2 {
            slow = slow.merge(&oracle_diagram(&t, k, 2).map_err(|e| e.to_string())?);
            let betti = persistence_module(&t, k, 2).map_err(|e| e.to_string())?.betti();
            for (i, &eps) in t.scales().iter().enumerate() {
                if fast.alive_at(k, eps) != betti[i] {
                    return Err(format!(
                        "trial {trial}: {} bars alive in dim {k} at {eps}, betti {}",
                        fast.alive_at(k, eps),
                        betti[i]
                    ));
                }
            }
        }
        if fast != slow {
            return Err(format!("trial {trial}: telescope {:?} vs oracle {:?}", fast.bars(), slow.bars()));
        }
        bars += fast.len();
    }
    Ok(format!("50 towers, {bars} bars identical to the oracle; bar counts match Betti numbers"))
}

/// Arcs on a cycle of `n` points: a fine cover with centers every 2 points
/// and radius 1, and a coarse one with centers every 4 points and radius 3.
/// Fine arcs centered halfway between coarse centers lie in two coarse arcs.
fn contiguity() -> Outcome {
    let mut rng = random::rng(100);
    for trial in 0..10 {
        let n = 4 * rng.gen_range(4..=9u32);
        let shift = rng.gen_range(0..4u32);
        let ids: Vec<PointId> = (0..n).collect();
        let matrix: Vec<f64> =
            (0..n).flat_map(|a| (0..n).map(move |b| a.abs_diff(b).min(n - a.abs_diff(b)) as f64)).collect();
        let space = Arc::new(FiniteMetricSpace::new(ids.clone(), matrix).map_err(|e| e.to_string())?);
        let codomain = Codomain::Metric(space.clone());
        let arcs = |step: u32, radius: f64| {
            Cover::new(
                codomain.clone(),
                (0..n / step).map(|j| Extent::Ball { center: (j * step + shift) % n, radius }).collect(),
            )
        };
        let fine = arcs(2, 1.0).map_err(|e| e.to_string())?;
        let coarse = arcs(4, 3.0).map_err(|e| e.to_string())?;
        let choices: Vec<Vec<usize>> = (0..fine.len())
            .map(|e| (0..coarse.len()).filter(|&f| fine.element_within(e, &coarse, f)).collect())
            .collect();
        let zeta: Vec<usize> = choices.iter().map(|c| c[0]).collect();
        let xi: Vec<usize> = choices.iter().map(|c| c[rng.gen_range(0..c.len())]).collect();
        let xi = if xi == zeta { choices.iter().map(|c| *c.last().unwrap()).collect() } else { xi };
        if xi == zeta {
            return Err(format!("trial {trial}: only one cover map"));
        }
        let k = SimplicialComplex::from_maximal((0..n).map(|v| vec![v.min((v + 1) % n), v.max((v + 1) % n)]))
            .map_err(|e| e.to_string())?;
        let lens = Lens::Point(VertexFunction::from_pairs((0..n).map(|v| (v, v))));
        let pf = pullback(&k, &lens, &fine, Mode::Combinatorial).map_err(|e| e.to_string())?;
        let pc = pullback(&k, &lens, &coarse, Mode::Combinatorial).map_err(|e| e.to_string())?;
        let (nf, nc) = (Arc::new(nerve(&pf, 2)), Arc::new(nerve(&pc, 2)));
        let nerve_map = |m: &[usize]| -> Result<SimplicialMap, String> {
            let pm = pullback_cover_map(&pf, &pc, m).map_err(|e| e.to_string())?;
            SimplicialMap::new(
                nf.clone(),
                nc.clone(),
                pm.iter().enumerate().map(|(a, &b)| (a as u32, b as u32)).collect(),
            )
            .map_err(|e| e.to_string())
        };
        let (mz, mx) = (nerve_map(&zeta)?, nerve_map(&xi)?);
        if !are_contiguous(&mz, &mx).map_err(|e| e.to_string())? {
            return Err(format!("trial {trial}: nerve maps are not contiguous"));
        }
        for dim in 0..=1 {
            let (bs, bt) = (
                homology_basis(&nf, dim, 2).map_err(|e| e.to_string())?,
                homology_basis(&nc, dim, 2).map_err(|e| e.to_string())?,
            );
            let (a, b) = (
                induced_map(&mz, &bs, &bt).map_err(|e| e.to_string())?,
                induced_map(&mx, &bs, &bt).map_err(|e| e.to_string())?,
            );
            if a != b {
                return Err(format!("trial {trial}: induced maps differ in dimension {dim}"));
            }
        }
        let tower = |m: SimplicialMap| ComplexTower::new(vec![1.0, 2.0], vec![nf.clone(), nc.clone()], vec![m]);
        let (tz, tx) = (tower(mz).map_err(|e| e.to_string())?, tower(mx).map_err(|e| e.to_string())?);
        for dim in 0..=1 {
            if tower_diagram(&tz, dim, 2).map_err(|e| e.to_string())?
                != tower_diagram(&tx, dim, 2).map_err(|e| e.to_string())?
            {
                return Err(format!("trial {trial}: diagrams differ in dimension {dim}"));
            }
        }
    }
    Ok("10 cover pairs: contiguous nerve maps, equal homology maps and diagrams".into())
}

fn main() {
    // `cargo test` passes harness flags such as `--quiet`; the suite has no
    // filters, so they are ignored.
    let criteria: Vec<(&str, Box<dyn FnOnce() -> Outcome>)> = vec![
        ("instability demo", Box::new(|| timed(Some(Duration::from_secs(1)), instability_demo))),
        (
            "1-skeleton exactness",
            Box::new(|| timed(Some(Duration::from_secs(30)), || experiment(Theorem::SkeletonExact, 20, 1))),
        ),
        ("function-perturbation stability", Box::new(|| timed(None, || experiment(Theorem::FunctionPerturb, 24, 2)))),
        ("general stability", Box::new(|| timed(None, || experiment(Theorem::General, 24, 3)))),
        ("combinatorial approximation", Box::new(|| timed(None, || experiment(Theorem::CombinatorialApprox, 20, 4)))),
        ("multiscale mapper vs Čech", Box::new(|| timed(None, || experiment(Theorem::MmVsCech, 10, 5)))),
        ("net tower correctness", Box::new(|| timed(None, net_tower))),
        ("size sandwich", Box::new(|| timed(Some(Duration::from_secs(10)), size_sandwich))),
        ("persistence oracle equivalence", Box::new(|| timed(None, oracle_equivalence))),
        ("contiguity invariance", Box::new(|| timed(None, contiguity))),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
