use super::*;
use crate::covers::{multiplicity, Cover, Family};
use crate::error::Error;
use crate::point::{int_set, Point, PointSet, Window};
use crate::rational::{q, Rational};
use crate::space::{FuzzyMetricSpace, ScaleParams};
use crate::tnorm::TNorm;

fn sp(r: Rational, t: Rational) -> ScaleParams {
    ScaleParams::new(r, t).unwrap()
}

fn one(n: i128) -> Rational {
    Rational::from_int(n)
}

// Linear-search oracles for the ratio recursion.
fn a_first(c: Rational) -> i64 {
    (2..).find(|&a| q(1, a as i128) < c).unwrap()
}

fn m_next(a: i64, c: Rational) -> i64 {
    (0..).find(|&m| q(a as i128 - 1, (a + m + 1) as i128) < c).unwrap()
}

fn a_next(end: i64, c: Rational) -> i64 {
    (end + 1..).find(|&a| q(end as i128, a as i128) < c).unwrap()
}

#[test]
fn ratio_recursion_matches_linear_search() {
    for r in [q(1, 2), q(1, 4), q(9, 10), q(2, 3), q(1, 10)] {
        let p = sp(r, one(1));
        let c = p.threshold();
        let rec = RatioRecursion::for_params(p, 20_000);
        let mut a = a_first(c);
        for (i, &got) in rec.a.iter().enumerate() {
            assert_eq!(got, a, "a at step {i}, r = {r}");
            if i < rec.m.len() {
                let m = m_next(a, c);
                assert_eq!(rec.m[i], m, "m at step {i}, r = {r}");
                a = a_next(a + m, c);
            }
        }
        assert!(*rec.a.last().unwrap() > 20_000);
    }
}

#[test]
fn reciprocal_head_matches_linear_search() {
    for (n, d) in [(1, 2), (1, 4), (9, 10), (2, 3), (99, 100), (1, 100)] {
        let p = sp(q(n, d), one(1));
        let expect = (1..).find(|&k: &i64| q(1, k as i128 + 1) < p.threshold()).unwrap();
        assert_eq!(ReciprocalHead::for_params(p).n, expect);
    }
}

#[test]
fn reciprocal_head_witness_verifies() {
    let space = FuzzyMetricSpace::reciprocal_product();
    for r in [q(1, 2), q(1, 4), q(9, 10)] {
        let w = witness_reciprocal_head(sp(r, one(1)), &Window::range(1, 300)).unwrap();
        let rep = verify_witness(&space, &w).unwrap();
        assert!(rep.passed(), "{}", rep.to_jsonl());
        assert_eq!(w.families.len(), 1);
    }
}

#[test]
fn reciprocal_head_rejects_zero() {
    assert!(matches!(
        witness_reciprocal_head(sp(q(1, 2), one(1)), &Window::range(0, 5)),
        Err(Error::Domain(_))
    ));
}

#[test]
fn ratio_witness_verifies_and_merged_fails() {
    let space = FuzzyMetricSpace::ratio_min_max();
    for r in [q(1, 2), q(1, 4), q(9, 10)] {
        let w = witness_ratio_recursion(sp(r, one(1)), &Window::range(1, 2000)).unwrap();
        let rep = verify_witness(&space, &w).unwrap();
        assert!(rep.passed(), "r = {r}: {}", rep.to_jsonl());
        let merged = verify_witness(&space, &w.merged()).unwrap();
        let bad = merged.find("disjoint[0]").unwrap();
        assert!(bad.is_fail());
        assert_eq!(bad.witness.len(), 2);
    }
}

#[test]
fn ratio_witness_on_partial_window() {
    let space = FuzzyMetricSpace::ratio_min_max();
    let win = Window::from_points([3, 8, 9, 40, 41].map(Point::Int));
    let w = witness_ratio_recursion(sp(q(1, 2), one(1)), &win).unwrap();
    assert!(verify_witness(&space, &w).unwrap().passed());
}

#[test]
fn bounded_witness_uses_fallback_for_pathological() {
    let space = FuzzyMetricSpace::pathological(TNorm::Lukasiewicz);
    let w = witness_bounded(
        &space,
        &Window::range(1, 100),
        sp(q(1, 2), one(1)),
        &BoundSearch::default(),
    )
    .unwrap();
    assert_eq!(w.bound_params.threshold(), q(1, 200));
    assert!(w.notes.iter().any(|n| n.contains("exhausted")));
    assert!(verify_witness(&space, &w).unwrap().passed());
    let strict = witness_bounded(
        &space,
        &Window::range(1, 100),
        sp(q(1, 2), one(1)),
        &BoundSearch::grid_only(),
    );
    assert!(matches!(strict, Err(Error::SearchFailure(_))));
}

#[test]
fn bounded_witness_grid_hit_is_smallest_k() {
    let space = FuzzyMetricSpace::standard_integers();
    // the widest pair of {0..3} is at distance 3: M = t/(t + 3)
    let expect = (2..=64)
        .find_map(|k: i128| {
            (0..=10)
                .map(|j| one(1 << j))
                .find(|&t| t / (t + one(3)) > q(1, k))
                .map(|t| sp(q(k - 1, k), t))
        })
        .unwrap();
    let w = witness_bounded(
        &space,
        &Window::range(0, 3),
        sp(q(1, 2), one(1)),
        &BoundSearch::default(),
    )
    .unwrap();
    assert_eq!(w.bound_params, expect);
    assert_eq!(expect, sp(q(1, 2), one(4)));
}

#[test]
fn non_archimedean_partition() {
    let space = FuzzyMetricSpace::ultrametric_standard();
    let p = sp(q(1, 4), one(10));
    let w = witness_non_archimedean(&space, p, Some(q(1, 4)), &Window::range(1, 200)).unwrap();
    assert_eq!(w.bound_params.r(), q(1, 2));
    assert!(verify_witness(&space, &w).unwrap().passed());
    assert_eq!(multiplicity(&w.cover(), &w.window), 1);

    let product = space.clone().with_tnorm(TNorm::Product);
    assert!(matches!(
        witness_non_archimedean(&product, p, None, &Window::range(1, 20)),
        Err(Error::Precondition(_))
    ));
    let std = FuzzyMetricSpace::standard_integers().with_tnorm(TNorm::Minimum);
    assert!(matches!(
        witness_non_archimedean(&std, p, None, &Window::range(0, 20)),
        Err(Error::NonArchimedean(_))
    ));
}

#[test]
fn integer_blocks_verify() {
    let space = FuzzyMetricSpace::standard_integers();
    for (r, t) in [(q(1, 2), one(1)), (q(1, 4), one(3)), (q(9, 10), one(2))] {
        let w = integer_blocks_witness(&space, sp(r, t), &Window::range(-50, 250)).unwrap();
        assert_eq!(w.n, 1);
        let rep = verify_witness(&space, &w).unwrap();
        assert!(rep.passed(), "{}", rep.to_jsonl());
    }
}

#[test]
fn translate_rejects_small_separation() {
    let space = FuzzyMetricSpace::standard_integers();
    let fam = Family::new("f", [int_set([0]), int_set([2])]);
    // s = 3/4, st/(1-s) = 3
    let err = translate_metric_witness(
        &space,
        vec![fam.clone()],
        one(2),
        sp(q(1, 2), one(1)),
        &Window::range(0, 2),
    );
    assert!(matches!(err, Err(Error::Certification(_))));
    let err = translate_metric_witness(&space, vec![fam], one(3), sp(q(1, 2), one(1)), &Window::range(0, 2));
    assert!(matches!(err, Err(Error::Certification(_))));
    let ok = Family::new("f", [int_set([0]), int_set([4])]);
    let w = translate_metric_witness(&space, vec![ok], one(3), sp(q(1, 2), one(1)), &Window::range(0, 4)).unwrap();
    assert_eq!(w.n, 0);
}

#[test]
fn restriction_keeps_certificate() {
    let space = FuzzyMetricSpace::ratio_min_max();
    let w = witness_ratio_recursion(sp(q(1, 2), one(1)), &Window::range(1, 500)).unwrap();
    let sub: PointSet = (1..=500).filter(|v| v % 7 == 0 || v % 5 == 1).map(Point::Int).collect();
    let rw = restrict_witness(&w, &sub);
    assert_eq!(rw.window.len(), sub.len());
    assert!(verify_witness(&space, &rw).unwrap().passed());
}

#[test]
fn zero_dim_refinement() {
    let ultra = FuzzyMetricSpace::ultrametric_standard();
    let (w, rep) = zero_dim_from_refinement(
        &ultra,
        sp(q(1, 4), one(10)),
        &Window::range(1, 100),
        None,
        &BoundSearch::grid_only(),
    )
    .unwrap();
    assert!(rep.passed(), "{}", rep.to_jsonl());
    assert_eq!(w.n, 0);

    // the reciprocal head partition built one notch coarser is refined by the balls
    let recip = FuzzyMetricSpace::reciprocal_product();
    let p = sp(q(1, 2), one(1));
    let wide = sp(q(3, 4), one(1));
    let cand = witness_reciprocal_head(wide, &Window::range(1, 100)).unwrap().cover();
    let (_, rep) = zero_dim_from_refinement(
        &recip,
        p,
        &Window::range(1, 100),
        Some(&cand),
        &BoundSearch::grid_only(),
    )
    .unwrap();
    assert!(rep.passed());

    let ratio = FuzzyMetricSpace::ratio_min_max();
    let res = zero_dim_from_refinement(&ratio, p, &Window::range(1, 100), None, &BoundSearch::grid_only());
    assert!(matches!(res, Err(Error::SearchFailure(m)) if m.contains("inconclusive")));
}

#[test]
fn scale_graph_components() {
    let ratio = FuzzyMetricSpace::ratio_min_max();
    let g = scale_graph(&ratio, sp(q(1, 2), one(1)), &Window::range(1, 100)).unwrap();
    // 1 and 2 have M = 1/2 >= 1/2; every n >= 2 joins n + 1
    assert!(g.spanning);
    assert_eq!(g.min_internal_m(), q(1, 100));
    assert!(g.single_family_obstruction(&ratio, sp(q(1, 2), one(1))).is_some());

    let std = FuzzyMetricSpace::standard_integers();
    let win = Window::from_points([0, 1, 10, 11, 30].map(Point::Int));
    let g = scale_graph(&std, sp(q(1, 2), one(1)), &win).unwrap();
    assert_eq!(g.components, vec![int_set([0, 1]), int_set([10, 11]), int_set([30])]);
    assert_eq!(g.component_min, vec![q(1, 2), q(1, 2), one(1)]);
    assert_eq!(g.largest, 0);
}

#[test]
fn oracle_on_tiny_windows() {
    let std = FuzzyMetricSpace::standard_integers();
    let p = sp(q(1, 2), one(1));
    // one point: one family
    let res = oracle_min_families(&std, p, p, &Window::range(0, 0)).unwrap();
    assert_eq!(res.k, 1);
    // far-apart points: singletons in one family
    let spread = Window::from_points([0, 5, 10, 15].map(Point::Int));
    assert_eq!(oracle_min_families(&std, p, p, &spread).unwrap().k, 1);
    // consecutive integers at the same bound: every member is a singleton and
    // neighbours conflict, so two families
    let res = oracle_min_families(&std, p, p, &Window::range(0, 6)).unwrap();
    assert_eq!(res.k, 2);
    let w = DimensionWitness::new(res.k - 1, p, p, Window::range(0, 6), res.families);
    assert!(verify_witness(&std, &w).unwrap().passed());
    // a loose bound lets the whole window be one member
    assert_eq!(
        oracle_min_families(&std, p, sp(q(9, 10), one(1)), &Window::range(0, 6))
            .unwrap()
            .k,
        1
    );
    assert!(matches!(
        oracle_min_families(&std, p, p, &Window::range(0, 10)),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn oracle_one_iff_components_bounded() {
    let spaces = [
        FuzzyMetricSpace::standard_integers(),
        FuzzyMetricSpace::ratio_min_max(),
        FuzzyMetricSpace::reciprocal_product(),
    ];
    let windows = [
        Window::from_points([1, 2, 3, 7, 8].map(Point::Int)),
        Window::from_points([1, 4, 9, 16, 25, 36].map(Point::Int)),
        Window::range(1, 6),
    ];
    let grid = [q(1, 4), q(1, 2), q(3, 4)];
    for space in &spaces {
        for win in &windows {
            for &r in &grid {
                for &s in &grid {
                    let (p, b) = (sp(r, one(1)), sp(s, one(2)));
                    let k = oracle_min_families(space, p, b, win).unwrap().k;
                    let g = scale_graph(space, p, win).unwrap();
                    let obstructed = g.single_family_obstruction(space, b).is_some();
                    assert_eq!(k == 1, !obstructed, "{} {} r={r} s={s}", space.kind(), win.label());
                }
            }
        }
    }
}

#[test]
fn oracle_bounds_constructed_witnesses() {
    let p = sp(q(1, 2), one(1));
    let ratio = FuzzyMetricSpace::ratio_min_max();
    let win = Window::range(1, 10);
    let w = witness_ratio_recursion(p, &win).unwrap();
    let k = oracle_min_families(&ratio, p, w.bound_params, &win).unwrap().k;
    assert!(k <= w.n + 1);
}

#[test]
fn derived_params_shrink() {
    let p = sp(q(1, 2), one(1));
    let d = derive_params(TNorm::Product, p).unwrap();
    assert_eq!(d, sp(q(7, 8), one(2)));
    assert!(d.threshold() < p.threshold() * p.threshold());
    assert_eq!(derive_params(TNorm::Minimum, p).unwrap(), sp(q(3, 4), one(2)));
    assert!(matches!(
        derive_params(TNorm::Lukasiewicz, p),
        Err(Error::Derivation(_))
    ));
}

#[test]
fn pipeline_passes_on_builtins() {
    let p = sp(q(1, 2), one(1));
    let ratio = FuzzyMetricSpace::ratio_min_max();
    let win = Window::range(1, 300);
    let out = run_pipeline(&ratio, p, &win, &|pp| witness_ratio_recursion(pp, &win)).unwrap();
    assert!(out.passed(), "{}", out.report.to_jsonl());
    assert_eq!(
        out.witness.params,
        derive_params(TNorm::Product, derive_params(TNorm::Product, p).unwrap()).unwrap()
    );

    let std = FuzzyMetricSpace::standard_integers();
    let win = Window::range(-40, 40);
    let out = run_pipeline(&std, p, &win, &|pp| integer_blocks_witness(&std, pp, &win)).unwrap();
    assert!(out.passed(), "{}", out.report.to_jsonl());
}

#[test]
fn pipeline_steps_reject_bad_inputs() {
    let p = sp(q(1, 2), one(1));
    let ratio = FuzzyMetricSpace::ratio_min_max();
    let win = Window::range(1, 100);
    let w = witness_ratio_recursion(p, &win).unwrap();
    assert!(matches!(
        asdim_to_multiplicity_cover(&ratio, &w, p),
        Err(Error::Precondition(_))
    ));
    // a single spanning member has multiplicity 1 but is not bounded at p
    let whole = Cover::from_sets("all", [win.to_set()]);
    assert!(matches!(
        multiplicity_to_lebesgue_cover(&ratio, &whole, p, p, &win, 0),
        Err(Error::Precondition(_))
    ));
    // singletons at n = 0 have multiplicity well above 1
    let singles = Cover::new(vec![Family::singletons("s", &win)]);
    let err = multiplicity_to_lebesgue_cover(&ratio, &singles, p, p, &win, 0).unwrap_err();
    assert!(err.to_string().contains("multiplicity"));
    assert!(matches!(
        lebesgue_refinement_check(&ratio, &whole, &singles, p, &win),
        Err(Error::Precondition(m)) if m.contains("bounded")
    ));
}

#[test]
fn construct_dispatch() {
    let p = sp(q(1, 2), one(1));
    for (space, win) in [
        (FuzzyMetricSpace::reciprocal_product(), Window::range(1, 50)),
        (FuzzyMetricSpace::ratio_min_max(), Window::range(1, 50)),
        (FuzzyMetricSpace::ultrametric_standard(), Window::range(1, 50)),
        (FuzzyMetricSpace::standard_integers(), Window::range(-20, 20)),
        (FuzzyMetricSpace::standard_reals(), Window::grid(0, 3, 2)),
        (FuzzyMetricSpace::pathological(TNorm::Lukasiewicz), Window::range(1, 30)),
    ] {
        let w = construct_witness(&space, p, &win).unwrap();
        assert!(verify_witness(&space, &w).unwrap().passed(), "{}", space.kind());
    }
}

#[test]
fn witness_json_round_trip() {
    let w = witness_ratio_recursion(sp(q(1, 2), one(1)), &Window::range(1, 40)).unwrap();
    let back: DimensionWitness = serde_json::from_str(&w.to_json()).unwrap();
    assert_eq!(back, w);
}
