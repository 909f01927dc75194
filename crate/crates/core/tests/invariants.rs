mod common;

use std::f64::consts::PI;

use hypflow_core::flow::recenter::resample_about;
use hypflow_core::geometry::{ChebyshevTerms, CurveFields};
use hypflow_core::{summarize, FlowConfig, FlowEngine, Mode, RadialCurve};
use proptest::prelude::*;

fn curve_strategy(n: usize) -> impl Strategy<Value = RadialCurve> {
    any::<u64>().prop_map(move |seed| common::random_convex_curve(seed, n, 5))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gauss_bonnet_and_isoperimetric(curve in curve_strategy(128)) {
        let s = summarize(&curve);
        prop_assert!((s.total_curvature - (2.0 * PI + s.area)).abs() < 1e-8 * (2.0 * PI + s.area));
        prop_assert!(s.deficit >= -1e-10);
        prop_assert!(s.length > 0.0 && s.area > 0.0);
        prop_assert!(s.rho_minus_lb <= s.rho_max);
    }

    #[test]
    fn chebyshev_ordering(curve in curve_strategy(128), alpha in prop::sample::select(vec![-0.5, -1.0, -2.0])) {
        let fields = CurveFields::new(&curve);
        let terms = ChebyshevTerms::new(&fields, alpha).unwrap();
        prop_assert!(terms.gap() >= -1e-12 * terms.scale());
        if alpha == -1.0 {
            let direct = (2.0 * PI + fields.area()) * fields.integrate_ds(|j| 1.0 / fields.kappa[j])
                - fields.length().powi(2);
            prop_assert!((terms.gap() - direct).abs() < 1e-9 * terms.scale());
        }
    }

    // Area is conserved by the semi-discrete scheme exactly; length only to the spatial
    // accuracy of the grid, hence the finer grid.
    #[test]
    fn one_step_conserves_the_preserved_quantity(
        curve in curve_strategy(128),
        mode in prop::sample::select(vec![Mode::AreaPreserving, Mode::LengthPreserving]),
    ) {
        let engine = FlowEngine::new(FlowConfig::new(-1.0, mode, 128).unwrap()).unwrap();
        let state = engine.state_at(curve.clone(), 0.0, 0).unwrap();
        let dt = engine.adaptive_dt(&state).unwrap();
        let next = engine.step(&state, dt).unwrap();
        let fields = (CurveFields::new(&curve), CurveFields::new(&next.curve));
        let (before, after) = match mode {
            Mode::AreaPreserving => (fields.0.area(), fields.1.area()),
            Mode::LengthPreserving => (fields.0.length(), fields.1.length()),
        };
        prop_assert!(((after - before) / before).abs() < 1e-10);
    }

    #[test]
    fn small_pole_moves_preserve_geometry(
        curve in curve_strategy(256),
        shift in 0.0..0.05f64,
        direction in 0.0..(2.0 * PI),
    ) {
        let before = summarize(&curve);
        let moved = resample_about(&curve, shift * curve.min_rho(), direction).unwrap();
        let after = summarize(&moved);
        let rel = |a: f64, b: f64| ((a - b) / b).abs();
        prop_assert!(rel(after.length, before.length) < 1e-8);
        prop_assert!(rel(after.area, before.area) < 1e-8);
        prop_assert!(rel(after.kappa_min, before.kappa_min) < 1e-8);
        prop_assert!(rel(after.kappa_max, before.kappa_max) < 1e-8);
    }
}

#[test]
fn chebyshev_gap_vanishes_on_circles_only() {
    use hypflow_core::{chebyshev_gap, circle_radial_function, CircleSpec};
    for &alpha in &[-0.5, -1.0, -2.0] {
        let centred = RadialCurve::circle(128, 1.3).unwrap();
        let terms = ChebyshevTerms::new(&CurveFields::new(&centred), alpha).unwrap();
        assert!(terms.gap().abs() < 1e-12 * terms.scale());

        let off = circle_radial_function(&CircleSpec::new(1.3, 0.5).unwrap(), 128).unwrap();
        let terms = ChebyshevTerms::new(&CurveFields::new(&off), alpha).unwrap();
        assert!(terms.gap().abs() < 1e-12 * terms.scale());

        let example = RadialCurve::canonical_example(128).unwrap();
        assert!(chebyshev_gap(&example, alpha).unwrap() > 1e-3);
    }
}
