use proptest::prelude::*;

use pnmetric::axioms::{validate, CheckOptions, Profile};
use pnmetric::doc;
use pnmetric::engine::{check_nonexpansive, orbit, solve_fixed_point, SelfMap, SolveConfig};
use pnmetric::fixtures;
use pnmetric::sequence::{verify_basic_inequalities, Coverage};
use pnmetric::space::{associated_metric, from_partial_metric, PartialNMetricSpace, Point};
use pnmetric::topology::{basis_check, open_ball, separation_class};

const TOL: f64 = 1e-9;

fn valid_space() -> impl Strategy<Value = PartialNMetricSpace> {
    (2usize..=3, 2usize..=4, any::<u64>(), prop::bool::ANY).prop_map(|(p, n, seed, strong)| {
        let profile = if strong { Profile::Strong } else { Profile::PartialNMetric };
        fixtures::random_valid_space(p, n, profile, seed)
    })
}

fn map_for(points: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0..points, points)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lifted_partial_metrics_are_valid(p in 1usize..=5, n in 2usize..=4, seed in any::<u64>(), strong in prop::bool::ANY) {
        let pm = fixtures::random_partial_metric(p, seed, strong);
        let g = from_partial_metric(&pm, n, true, TOL).unwrap();
        prop_assert!(validate(&g, Profile::PartialNMetric, &CheckOptions::default()).passed());
        if pm.is_strong(TOL) {
            prop_assert!(validate(&g, Profile::Strong, &CheckOptions::default()).passed());
        }
    }

    #[test]
    fn json_round_trip_is_identity(p in 1usize..=4, n in 2usize..=4, seed in any::<u64>()) {
        let g = fixtures::random_table(p, n, seed);
        let back = doc::load_space(&doc::render(&doc::space_json(&g))).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn violations_reevaluate_to_reported_values(p in 2usize..=3, n in 2usize..=3, seed in any::<u64>()) {
        let g = fixtures::random_table(p, n, seed);
        let report = validate(&g, Profile::Strong, &CheckOptions::default());
        for v in &report.violations {
            let (lhs, rhs) = v.reevaluate(&g);
            prop_assert_eq!((lhs, rhs), (v.lhs, v.rhs));
        }
        prop_assert_eq!(report.passed(), report.violations_total == 0);
    }

    #[test]
    fn valid_spaces_have_metric_and_t0_topology(g in valid_space()) {
        let m = associated_metric(&g, TOL).unwrap();
        prop_assert!(m.check_axioms(TOL).is_empty());
        let sep = separation_class(&g);
        prop_assert!(sep.is_t0);
        if g.passes(Profile::Strong, TOL) {
            prop_assert!(sep.is_t1);
        }
        prop_assert!(basis_check(&g, 200, 1).passed());
    }

    #[test]
    fn balls_contain_center_iff_radius_positive(g in valid_space(), eps in -2.0f64..12.0) {
        for x in g.points() {
            prop_assert_eq!(open_ball(&g, x, eps).contains(x), eps > 0.0);
        }
    }

    #[test]
    fn basic_inequalities_hold_on_valid_spaces(g in valid_space(), seed in any::<u64>()) {
        let report = verify_basic_inequalities(&g, Coverage::Sampled { samples: 300, seed }, TOL);
        prop_assert!(report.passed(), "{:?}", report.failures.first());
    }

    #[test]
    fn orbits_match_naive_iteration(g in valid_space(), image in map_for(3), start in 0usize..3) {
        let p = g.len();
        let image: Vec<Point> = image[..p].iter().map(|&i| Point(i % p)).collect();
        let f = SelfMap::new(&g, image).unwrap();
        let x0 = Point(start % p);
        let t = orbit(&g, &f, x0, 10 * p).unwrap();
        let mut x = x0;
        for (k, &term) in t.terms.iter().enumerate() {
            prop_assert_eq!(term, x, "term {}", k);
            prop_assert_eq!(t.step_values[k], g.mixed(x, f.apply(x)));
            x = f.apply(x);
        }
        prop_assert_eq!(Some(x), t.cycle_entry.map(|e| t.terms[e]));
    }

    #[test]
    fn solver_results_are_fixed_points(g in valid_space(), image in map_for(3), start in 0usize..3, strong in prop::bool::ANY) {
        let p = g.len();
        let f = SelfMap::new(&g, image[..p].iter().map(|&i| Point(i % p)).collect()).unwrap();
        let config = SolveConfig { strong_mode: strong && g.passes(Profile::Strong, TOL), ..SolveConfig::default() };
        if let Ok(r) = solve_fixed_point(&g, &f, Point(start % p), &config) {
            prop_assert_eq!(f.apply(r.fixed_point), r.fixed_point);
            prop_assert!((g.self_distance(r.fixed_point) - r.r).abs() <= TOL);
            prop_assert!(r.cases.iter().any(|c| c.case == r.theorem_case && c.holds()));
        }
    }

    #[test]
    fn expansion_witnesses_expand(g in valid_space(), image in map_for(3)) {
        let p = g.len();
        let f = SelfMap::new(&g, image[..p].iter().map(|&i| Point(i % p)).collect()).unwrap();
        if let Some(w) = check_nonexpansive(&g, &f, TOL) {
            prop_assert_eq!(w.lhs, g.value(&w.image));
            prop_assert_eq!(w.rhs, g.value(&w.multiset));
            prop_assert!(w.lhs > w.rhs + TOL);
        }
    }
}
