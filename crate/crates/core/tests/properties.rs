mod common;

use predprey_core::convergence::rate_fit;
use predprey_core::equilibria::{coexistence_equilibrium, jacobian_at_estar};
use predprey_core::model::{reaction_limit, Exchange};
use predprey_core::pde::grid::{laplacian_neumann, Grid};
use predprey_core::turing::{compare_regions, cross_linearization, dp_effective, DiffusionModel, DiffusionVariant};
use predprey_core::{dimensionalize, nondimensionalize, LimitKinetics, ModelParams, NondimParams};
use proptest::prelude::*;

fn model_params() -> impl Strategy<Value = ModelParams> {
    (
        (0.1f64..5.0, 0.05f64..2.0, 0.1f64..5.0, 0.1f64..5.0),
        (0.1f64..5.0, 0.05f64..2.0, 0.05f64..3.0),
        (1e-3f64..1.0, 1e-2f64..5.0, 1e-3f64..5.0),
    )
        .prop_map(|((r0, eta, alpha, gamma_tilde), (big_gamma, mu, xi), (d1, d2, d3))| ModelParams {
            r0,
            eta,
            alpha,
            gamma_tilde,
            big_gamma,
            mu,
            xi,
            d1,
            d2,
            d3,
            epsilon: None,
        })
}

/// Dimensionless sets with a coexistence state and `D2 > D3`.
fn coexisting() -> impl Strategy<Value = NondimParams> {
    (
        (0.05f64..5.0, 0.2f64..100.0, 0.05f64..20.0, 0.05f64..5.0, 1.01f64..20.0),
        (1e-3f64..1.0, 1e-2f64..10.0, 1e-3f64..0.99),
    )
        .prop_map(|((r, nu, gamma, mu, factor), (d1, d2, frac))| {
            let big_gamma = (2.0 * mu + 2.0 * gamma * mu / nu) * factor;
            NondimParams::with_diffusion(r, nu, gamma, big_gamma, mu, d1, d2, d2 * frac).unwrap()
        })
}

proptest! {
    #[test]
    fn split_is_a_partition_on_the_manifold(p in model_params(), n in 0.0f64..10.0, pp in 0.0f64..10.0) {
        let ex = Exchange::dimensional(&p);
        let s = ex.split(n, pp);
        prop_assert!(s.searching >= 0.0 && s.handling >= 0.0);
        prop_assert!((s.searching + s.handling - pp).abs() <= 1e-12 * (1.0 + pp));
        let capture = p.alpha * n * s.searching / (1.0 + p.xi * s.searching);
        prop_assert!((p.gamma_tilde * s.handling - capture).abs() <= 1e-10 * (1.0 + capture));
    }

    #[test]
    fn effective_diffusivity_is_a_convex_combination(p in model_params(), n in 0.0f64..10.0, pp in 0.0f64..10.0) {
        let f = LimitKinetics::dimensional(&p).coefficient(n, pp);
        let (lo, hi) = (p.d2.min(p.d3), p.d2.max(p.d3));
        prop_assert!(f >= lo * (1.0 - 1e-12) && f <= hi * (1.0 + 1e-12));
    }

    #[test]
    fn dimensionless_round_trip(p in model_params()) {
        let (nd, map) = nondimensionalize(&p).unwrap();
        prop_assert!((2.0 * p.alpha * map.pi * map.theta - 1.0).abs() < 1e-12);
        prop_assert!((p.gamma_tilde * p.xi * map.pi - 1.0).abs() < 1e-12);
        let back = dimensionalize(&nd, &map, None).unwrap();
        for (a, b) in [
            (back.r0, p.r0), (back.eta, p.eta), (back.alpha, p.alpha), (back.gamma_tilde, p.gamma_tilde),
            (back.big_gamma, p.big_gamma), (back.mu, p.mu), (back.xi, p.xi),
            (back.d1, p.d1), (back.d2, p.d2), (back.d3, p.d3),
        ] {
            prop_assert!((a - b).abs() <= 1e-12 * b.abs());
        }
    }

    #[test]
    fn coexistence_state_is_a_positive_root(nd in coexisting()) {
        let e = coexistence_equilibrium(&nd).unwrap();
        prop_assert!(e.n > 0.0 && e.n < nd.nu() && e.p > 0.0);
        let (dn, dp) = reaction_limit(e.n, e.p, &nd).unwrap();
        let scale = nd.r() * e.n + nd.mu() * e.p;
        prop_assert!(dn.abs() <= 1e-12 * scale && dp.abs() <= 1e-12 * scale);
        let oracle = common::n_star_quadratic(&nd);
        prop_assert!((e.n - oracle).abs() <= 1e-12 * oracle);
    }

    #[test]
    fn determinant_is_positive(nd in coexisting()) {
        let js = jacobian_at_estar(&nd).unwrap();
        prop_assert!(js.det() > 0.0);
        prop_assert!(js.j12 < 0.0 && js.j21 > 0.0 && js.j22 < 0.0);
    }

    #[test]
    fn effective_rate_between_the_two(nd in coexisting()) {
        let dp = dp_effective(nd.d2(), nd.d3(), &nd).unwrap();
        let cl = cross_linearization(&nd).unwrap();
        prop_assert!(nd.d3() < dp && dp < nd.d2() && dp < cl.jd22);
    }

    #[test]
    fn cross_linearization_is_linear_in_the_rates(nd in coexisting(), k in 0.1f64..10.0) {
        let a = cross_linearization(&nd).unwrap();
        let scaled = nd.diffusion(nd.d1(), k * nd.d2(), k * nd.d3()).unwrap();
        let b = cross_linearization(&scaled).unwrap();
        prop_assert!((b.jd21 - k * a.jd21).abs() <= 1e-12 * (k * a.jd21).abs());
        prop_assert!((b.jd22 - k * a.jd22).abs() <= 1e-12 * k * a.jd22);
    }

    #[test]
    fn cross_band_sits_strictly_inside(nd in coexisting()) {
        let cmp = compare_regions(&nd).unwrap();
        prop_assert!(cmp.ac > cmp.al && cmp.bl > cmp.bc);
        if let Some(c) = cmp.cross {
            prop_assert!(c.strictly_inside(&cmp.linear.unwrap()));
        }
        if let Some(l) = cmp.linear {
            let lin = DiffusionModel::from_nondim(DiffusionVariant::LinearDP, &nd).linearization(cmp.jacobian, &cmp.cl);
            prop_assert!(lin.det_m(l.midpoint()) < 0.0);
            prop_assert!(lin.det_m(0.5 * l.lo) > 0.0 && lin.det_m(2.0 * l.hi) > 0.0);
        }
    }

    #[test]
    fn rationalized_trophic_term_agrees(nd in coexisting(), n in 1e-3f64..100.0, p in 1e-3f64..100.0) {
        let b = nd.gamma() + n + p;
        let direct = 0.25 * nd.gamma() * (b - (b * b - 4.0 * n * p).sqrt());
        let got = predprey_core::model::trophic_bda(n, p, &nd).unwrap();
        // the direct form loses digits when NP << B^2
        let tol = 1e-10 + 4.0 * f64::EPSILON * b * b / (n * p);
        prop_assert!((got - direct).abs() <= tol * got, "{got} vs {direct}");
    }

    #[test]
    fn all_variants_share_det_at_zero_and_stable_traces(nd in coexisting(), lambda in 0.0f64..1e3) {
        let cmp = compare_regions(&nd).unwrap();
        let det = cmp.jacobian.det();
        for v in [DiffusionVariant::LinearD2, DiffusionVariant::LinearDP, DiffusionVariant::Cross] {
            let lin = DiffusionModel::from_nondim(v, &nd).linearization(cmp.jacobian, &cmp.cl);
            prop_assert_eq!(lin.det_m(0.0), det);
            if cmp.jacobian.trace() < 0.0 {
                prop_assert!(lin.trace_m(lambda) < 0.0);
            }
        }
    }

    #[test]
    fn laplacian_sums_to_zero(values in prop::collection::vec(-5.0f64..5.0, 24)) {
        for grid in [Grid::line(24, 1.7).unwrap(), Grid::rect(6, 4, 1.0, 2.0).unwrap()] {
            let lap = laplacian_neumann(&values, &grid).unwrap();
            let norm: f64 = values.iter().map(|v| v.abs()).sum::<f64>() * grid.inverse_h2();
            prop_assert!(lap.iter().sum::<f64>().abs() <= 1e-12 * norm.max(1.0));
        }
    }

    #[test]
    fn power_laws_are_recovered(c in 0.01f64..100.0, slope in -2.0f64..2.0) {
        let xs = [1e-1f64, 1e-2, 1e-3, 1e-4];
        let ys: Vec<f64> = xs.iter().map(|x| c * x.powf(slope)).collect();
        let (s, hw) = rate_fit(&xs, &ys).unwrap();
        prop_assert!((s - slope).abs() < 1e-10 && hw < 1e-8);
    }
}
