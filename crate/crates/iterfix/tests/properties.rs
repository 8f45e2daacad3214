//! Randomized invariants. Each property would fail loudly under a broad
//! class of implementation bugs: wrong interpolation order, drifting
//! formatters, samplers that depend on hidden state, or schemes that
//! overshoot their fixed point.

use proptest::prelude::*;

use iterfix::conditions::{check_condition_c, DEFAULT_TOL};
use iterfix::numfmt::{g17, sig6};
use iterfix::space::{convex_combine, distance};
use iterfix::{
    run_scheme, Catalog, Domain, MappingSpec, NormKind, ParamSchedule, Point, SchemeId,
    StopCriteria,
};

const E: NormKind = NormKind::Euclidean;

fn schemes() -> [SchemeId; 4] {
    [SchemeId::Picard, SchemeId::Mann, SchemeId::Noor, SchemeId::Thakur]
}

/// x -> p + l (x - p): an affine contraction on [0, 1] with factor l.
fn contraction(p: f64, l: f64) -> MappingSpec {
    let spec = MappingSpec::from_expr(
        "affine",
        Domain::parse("0,1").unwrap(),
        &format!("{p} + {l} * (x - {p})"),
    )
    .unwrap()
    .with_fixed_points(vec![Point::scalar(p).unwrap()]);
    spec.validate().unwrap();
    spec
}

proptest! {
    // Distances to the fixed point never increase along any scheme, for
    // any admissible schedule, on any of these contractions.
    #[test]
    fn fejer_monotone_on_random_contractions(
        p in 0.05f64..0.95,
        l in 0.05f64..0.95,
        x1 in 0.0f64..1.0,
        a in 0.01f64..0.99,
        b in 0.01f64..0.99,
        c in 0.01f64..0.99,
    ) {
        let t = contraction(p, l);
        let fixed = Point::scalar(p).unwrap();
        let schedule = ParamSchedule::constant(a, b, c);
        for scheme in schemes() {
            let trace = run_scheme(
                scheme,
                &t,
                &Point::scalar(x1).unwrap(),
                &schedule,
                &StopCriteria::max_iterations(20),
                Some(&fixed),
                E,
            ).unwrap();
            let errors = trace.errors.as_ref().unwrap();
            for w in errors.windows(2) {
                prop_assert!(
                    w[1] <= w[0] + 1e-12,
                    "{}: {} -> {}", scheme.name(), w[0], w[1],
                );
            }
        }
    }

    // Interpolating from a toward b scales distance linearly; this pins
    // the (1 - alpha) a + alpha b orientation of convex_combine.
    #[test]
    fn convex_combination_is_collinear(
        a in -100.0f64..100.0,
        b in -100.0f64..100.0,
        alpha in 0.0f64..=1.0,
    ) {
        let pa = Point::scalar(a).unwrap();
        let pb = Point::scalar(b).unwrap();
        let mid = convex_combine(alpha, &pa, &pb).unwrap();
        let lhs = distance(&mid, &pa, E).unwrap();
        let rhs = alpha * distance(&pb, &pa, E).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs), "{lhs} vs {rhs}");
    }

    // Norm axioms on random planar points, all three norms.
    #[test]
    fn norms_are_symmetric_and_triangular(
        ax in -50.0f64..50.0, ay in -50.0f64..50.0,
        bx in -50.0f64..50.0, by in -50.0f64..50.0,
        cx in -50.0f64..50.0, cy in -50.0f64..50.0,
    ) {
        let a = Point::new(vec![ax, ay]).unwrap();
        let b = Point::new(vec![bx, by]).unwrap();
        let c = Point::new(vec![cx, cy]).unwrap();
        for k in [NormKind::Euclidean, NormKind::Max, NormKind::Sum] {
            prop_assert_eq!(distance(&a, &b, k).unwrap(), distance(&b, &a, k).unwrap());
            prop_assert_eq!(distance(&a, &a, k).unwrap(), 0.0);
            let lhs = distance(&a, &c, k).unwrap();
            let rhs = distance(&a, &b, k).unwrap() + distance(&b, &c, k).unwrap();
            prop_assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-12);
        }
    }

    // The 17-significant-digit form reconstructs every f64 exactly; the
    // 6-significant-digit form stays within half a unit in the sixth place.
    #[test]
    fn numeric_renderings_round_trip(v in -1e30f64..1e30) {
        let exact: f64 = g17(v).parse().unwrap();
        prop_assert_eq!(exact.to_bits(), v.to_bits());

        let coarse: f64 = sig6(v).parse().unwrap();
        prop_assert!((coarse - v).abs() <= 5e-6 * v.abs().max(1e-300), "{} vs {v}", sig6(v));
    }

    // A schedule parsed from a rendered constant behaves like the
    // constant at every step; config round trips depend on this.
    #[test]
    fn schedule_constants_survive_rendering(v in 0.001f64..0.999) {
        let parsed = iterfix::schemes::ScheduleRule::parse(&format!("{v}")).unwrap();
        let schedule = ParamSchedule { a: parsed, b: iterfix::schemes::ScheduleRule::constant(v), c: iterfix::schemes::ScheduleRule::constant(v) };
        for n in [1usize, 2, 17, 1000] {
            let (a, b, _) = schedule.values(n).unwrap();
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    // Raising a checker's budget never changes an already-found witness:
    // sampling is a pure function of (seed, stream, index), and bigger
    // budgets only extend the examined prefix.
    #[test]
    fn budget_growth_preserves_witnesses(seed in 0u64..500, extra in 1u64..5000) {
        let t = Catalog::with_builtins().lookup("quadratic").unwrap();
        let base = check_condition_c(&t, E, 2_000, seed, DEFAULT_TOL).unwrap();
        prop_assume!(!base.passed());
        let grown = check_condition_c(&t, E, 2_000 + extra, seed, DEFAULT_TOL).unwrap();
        prop_assert_eq!(base.samples_tested, grown.samples_tested);
        prop_assert_eq!(
            format!("{:?}", base.witness),
            format!("{:?}", grown.witness)
        );
    }
}
