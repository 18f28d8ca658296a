//! Small hand-checkable instances run through the public API end to end.

use std::sync::Arc;

use mapscale_core::complex::{FiniteMetricSpace, SimplicialComplex, VertexFunction};
use mapscale_core::cover::{build_ball_tower, build_dyadic_tower, DyadicOptions, Sample};
use mapscale_core::cover::{min_interleaving, Codomain, Cover, CoverTower, Extent, Interval};
use mapscale_core::experiments::demo_instance;
use mapscale_core::mapper::{mapper, multiscale_mapper, nerve, pullback, pullback_cover_map, Lens, Mode};
use mapscale_core::metric::{relaxed_triangle_check, PullbackPseudometric};
use mapscale_core::persistence::{bottleneck, homology_basis, tower_diagrams};
use mapscale_core::random::{self, perturb};

const SCALES: [f64; 4] = [1.0, 2.0, 4.0, 8.0];

/// Intervals of radius `ε/2` around `t + j` on `[0, 10]`, for every `j`
/// whose interval meets the segment.
fn shifted_tower(t: f64) -> CoverTower {
    let codomain = Codomain::Segment { lo: 0.0, hi: 10.0 };
    let centers: Vec<f64> = (-5..=15).map(|j| t + j as f64).collect();
    let covers: Vec<Cover> = SCALES
        .iter()
        .map(|&eps| {
            let r = eps / 2.0;
            let els = centers
                .iter()
                .filter(|&&c| c + r >= 0.0 && c - r <= 10.0)
                .map(|&c| Extent::Interval(Interval::closed(c - r, c + r)))
                .collect();
            Cover::new(codomain.clone(), els).unwrap()
        })
        .collect();
    // Map each interval to the one with the same center at the next scale;
    // intervals only get wider, so the element list of a coarser scale
    // contains every center of a finer one.
    let maps = (0..SCALES.len() - 1)
        .map(|i| {
            let (a, b) = (SCALES[i] / 2.0, SCALES[i + 1] / 2.0);
            let next: Vec<f64> = centers.iter().copied().filter(|&c| c + b >= 0.0 && c - b <= 10.0).collect();
            centers
                .iter()
                .filter(|&&c| c + a >= 0.0 && c - a <= 10.0)
                .map(|&c| next.iter().position(|&n| n == c).unwrap())
                .collect()
        })
        .collect();
    CoverTower::new(SCALES.to_vec(), covers, maps, None).unwrap()
}

/// Smallest η among scale differences such that every interval of one
/// shifted family at scale ε sits inside an interval of the other at the
/// largest grid scale not exceeding ε + η, computed with plain arithmetic
/// on clipped intervals.
fn interleaving_by_hand(t1: f64, t2: f64) -> f64 {
    let clip = |c: f64, r: f64| ((c - r).max(0.0), (c + r).min(10.0));
    let family = |t: f64, r: f64| -> Vec<(f64, f64)> {
        (-5..=15).map(|j| t + j as f64).filter(|&c| c + r >= 0.0 && c - r <= 10.0).map(|c| clip(c, r)).collect()
    };
    let fits = |ta: f64, tb: f64, eta: f64| {
        SCALES.iter().all(|&eps| {
            let Some(&g) = SCALES.iter().rev().find(|&&s| s <= eps + eta) else {
                return false;
            };
            family(ta, eps / 2.0)
                .iter()
                .all(|a| family(tb, g / 2.0).iter().any(|b| b.0 <= a.0 + 1e-12 && a.1 <= b.1 + 1e-12))
        })
    };
    let mut candidates = vec![0.0];
    for a in SCALES {
        for b in SCALES {
            if b > a {
                candidates.push(b - a);
            }
        }
    }
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    candidates.into_iter().find(|&e| fits(t1, t2, e) && fits(t2, t1, e)).unwrap_or(f64::INFINITY)
}

#[test]
fn shifted_interval_towers_interleave_by_grid_offset() {
    for t in [0.0, 0.25, 0.5, 1.5, 3.0] {
        let eta = min_interleaving(&shifted_tower(0.0), &shifted_tower(t)).unwrap();
        assert_eq!(eta, interleaving_by_hand(0.0, t), "shift {t}");
    }
    assert_eq!(min_interleaving(&shifted_tower(0.0), &shifted_tower(0.0)).unwrap(), 0.0);
}

#[test]
fn interleavings_compose() {
    for (t1, t2) in [(0.25, 0.5), (0.5, 1.5), (1.0, 2.0)] {
        let (u, v, w) = (shifted_tower(0.0), shifted_tower(t1), shifted_tower(t1 + t2));
        let e1 = min_interleaving(&u, &v).unwrap();
        let e2 = min_interleaving(&v, &w).unwrap();
        assert!(min_interleaving(&u, &w).unwrap() <= e1 + e2, "({t1}, {t2})");
    }
}

#[test]
fn close_functions_on_the_loop_give_different_mappers() {
    let (k, f, g) = demo_instance(1.0, 2.0, 16.0).unwrap();
    let tower = build_dyadic_tower(16.0, 1.0, &DyadicOptions::default()).unwrap();
    let i = tower.scales().iter().position(|&e| e == 4.0).unwrap();
    let betti1 = |h: &VertexFunction<f64>| {
        let n = mapper(&k, &Lens::Real(h.clone()), tower.cover(i), Mode::Combinatorial, 2).unwrap();
        homology_basis(&n, 1, 2).unwrap().betti()
    };
    assert_eq!(f.sup_distance(&g), 2.0);
    assert_eq!((betti1(&f), betti1(&g)), (0, 1));
}

#[test]
fn coarser_element_merges_both_components() {
    let k = SimplicialComplex::from_maximal([[0, 1], [1, 2], [2, 3], [3, 4], [4, 5]]).unwrap();
    let lens = Lens::Real(VertexFunction::from_pairs(
        [1.2, 1.8, 3.0, 1.5, 1.6, 0.0].into_iter().enumerate().map(|(v, x)| (v as u32, x)),
    ));
    let seg = Codomain::Segment { lo: 0.0, hi: 3.2 };
    let fine = Cover::new(
        seg.clone(),
        vec![
            Extent::Interval(Interval::closed(0.0, 1.1)),
            Extent::Interval(Interval::closed(1.0, 2.0)),
            Extent::Interval(Interval::closed(1.9, 3.2)),
        ],
    )
    .unwrap();
    let coarse = Cover::new(
        seg,
        vec![Extent::Interval(Interval::closed(0.0, 1.1)), Extent::Interval(Interval::closed(1.0, 3.2))],
    )
    .unwrap();
    for mode in [Mode::Exact, Mode::ExactFull, Mode::Combinatorial] {
        let pf = pullback(&k, &lens, &fine, mode).unwrap();
        let pc = pullback(&k, &lens, &coarse, mode).unwrap();
        let w: Vec<usize> = (0..pf.len()).filter(|&e| pf.elements()[e].parent == 1).collect();
        assert_eq!(w.len(), 2, "{mode:?}");
        let m = pullback_cover_map(&pf, &pc, &[0, 1, 1]).unwrap();
        assert_eq!(m[w[0]], m[w[1]], "{mode:?}");
    }
}

#[test]
fn three_arcs_on_a_circle_give_a_hollow_triangle() {
    let n = 6u32;
    let matrix = (0..n).flat_map(|a| (0..n).map(move |b| a.abs_diff(b).min(n - a.abs_diff(b)) as f64)).collect();
    let space = Arc::new(FiniteMetricSpace::new((0..n).collect(), matrix).unwrap());
    let arcs = Cover::new(
        Codomain::Metric(space),
        vec![
            Extent::Set { points: vec![0, 1, 2] },
            Extent::Set { points: vec![2, 3, 4] },
            Extent::Set { points: vec![4, 5, 0] },
        ],
    )
    .unwrap();
    let k = SimplicialComplex::from_maximal((0..n).map(|v| {
        let w = (v + 1) % n;
        [v.min(w), v.max(w)]
    }))
    .unwrap();
    let lens = Lens::Point(VertexFunction::from_pairs((0..n).map(|v| (v, v))));
    let nv = nerve(&pullback(&k, &lens, &arcs, Mode::Combinatorial).unwrap(), 2);
    assert_eq!((nv.count(0), nv.count(1), nv.count(2)), (3, 3, 0));
}

#[test]
fn true_metric_satisfies_plain_triangle_inequality() {
    let pts = [[0.0, 0.0], [3.0, 0.0], [0.0, 4.0], [1.0, 1.0]];
    let m = FiniteMetricSpace::euclidean(&pts);
    let values: Vec<f64> = (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).map(|(i, j)| m.dist_at(i, j)).collect();
    let d = PullbackPseudometric::from_matrix((0..4).collect(), vec![1.0, 8.0], values).unwrap();
    let r = relaxed_triangle_check(&d, 1.0, 0.0);
    assert!(r.passed && r.triples_checked == 64);
}

#[test]
fn circle_stability_bound_grows_with_c() {
    // Height on a 12-cycle, perturbed by δ = 0.5 with a ball tower (c, s) = (3, 1).
    let k = SimplicialComplex::from_maximal((0..12u32).map(|v| {
        let w = (v + 1) % 12;
        [v.min(w), v.max(w)]
    }))
    .unwrap();
    let heights = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 5.0, 4.0, 3.0, 2.0, 1.0];
    let f = VertexFunction::from_pairs(heights.iter().enumerate().map(|(v, &x)| (v as u32, x)));
    let g = perturb(&mut random::rng(4), &f, 0.5);
    let sample = Sample::Line { points: (-1..=7).map(f64::from).collect(), lo: -1.5, hi: 7.5 };
    let tower = build_ball_tower(&sample, 0.5, &[1.0, 2.0, 4.0, 8.0, 16.0, 32.0]).unwrap();
    let diagram = |h: &VertexFunction<f64>| {
        let mm = multiscale_mapper(&tower, &Lens::Real(h.clone()), &k, Mode::ExactFull, 2).unwrap();
        tower_diagrams(&mm.reindex_log().unwrap(), &[0, 1], 2).unwrap()
    };
    let (df, dg) = (diagram(&f), diagram(&g));
    let (s, delta) = (1.0f64, 0.5f64);
    let bound = |c: f64| (2.0 * c * s.max(delta) + c).ln() + (1.0 / s).ln().max(0.0);
    for dim in [0, 1] {
        let measured = bottleneck(&df, &dg, dim);
        assert!(measured <= bound(3.0) + std::f64::consts::LN_2, "dim {dim}: {measured}");
        assert!(measured <= bound(6.0));
    }
    assert!(bound(6.0) > bound(3.0));
    // The loop is visible at fine scales for both functions.
    assert!(df.pairs(1).iter().any(|&(b, _)| b == 0.0));
}
