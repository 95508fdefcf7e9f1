use proptest::prelude::*;
use ypl_core::algebra::{relation_residuals, yang_relations};
use ypl_core::bracket::{jacobi_residual, poisson_bracket};
use ypl_core::flows::{g_closed, g_series, g_series_term};
use ypl_core::realizations::{born_dual_params, yang_special, DualMode, GenId, GenParams, ProfilePair};
use ypl_core::{ModelCase, ModelParams, PhasePoint, ScalarField};

fn point(n: usize, r: f64) -> impl Strategy<Value = PhasePoint> {
    (prop::collection::vec(-r..r, n), prop::collection::vec(-r..r, n)).prop_map(|(x, p)| PhasePoint::new(x, p).unwrap())
}

fn case() -> impl Strategy<Value = ModelCase> {
    prop::sample::select(ModelCase::ALL.to_vec())
}

fn pick(set: &ypl_core::realizations::GeneratorSet, k: usize) -> ScalarField {
    let f = set.fields();
    f[k % f.len()].1.clone()
}

fn within(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn antisymmetry(pt in point(4, 0.8), al in 0.0..0.5f64, be in 0.0..0.5f64, c in case(), i in 0usize..64, j in 0usize..64) {
        let params = ModelParams { alpha: al, beta: be, case: c, n: 4 };
        let set = yang_special(&params, &ProfilePair::phi2_zero(c.sigma())).unwrap();
        let (f, g) = (pick(&set, i), pick(&set, j));
        if let (Ok(a), Ok(b)) = (poisson_bracket(&f, &g, &pt), poisson_bracket(&g, &f, &pt)) {
            prop_assert_eq!(a, -b);
        }
    }

    #[test]
    fn jacobi_identity(pt in point(4, 0.8), al in 0.0..0.5f64, be in 0.0..0.5f64, c in case(), i in 0usize..64, j in 0usize..64, k in 0usize..64) {
        let params = ModelParams { alpha: al, beta: be, case: c, n: 4 };
        let set = yang_special(&params, &ProfilePair::half(c.sigma())).unwrap();
        if let Ok(r) = jacobi_residual(&pick(&set, i), &pick(&set, j), &pick(&set, k), &pt) {
            prop_assert!(r < 1e-12, "{}", r);
        }
    }

    #[test]
    fn leibniz_rule(pt in point(3, 1.0), k in -2.0..2.0f64) {
        let f = ScalarField::x_dot_p().scale(k);
        let g = &ScalarField::x(1) * &ScalarField::p(2);
        let h = &ScalarField::p_squared() + &ScalarField::x(0);
        let lhs = poisson_bracket(&f, &(&g * &h), &pt).unwrap();
        let rhs = poisson_bracket(&f, &g, &pt).unwrap() * h.eval(&pt).unwrap() + g.eval(&pt).unwrap() * poisson_bracket(&f, &h, &pt).unwrap();
        prop_assert!(within(lhs, rhs, 1e-13), "{} {}", lhs, rhs);
    }

    #[test]
    fn canonical_pairs(pt in point(4, 1.0), mu in 0usize..4, nu in 0usize..4) {
        let eta = if mu == nu { if mu == 0 { -1.0 } else { 1.0 } } else { 0.0 };
        prop_assert_eq!(poisson_bracket(&ScalarField::x(mu), &ScalarField::p(nu), &pt).unwrap(), eta);
        prop_assert_eq!(poisson_bracket(&ScalarField::x(mu), &ScalarField::x(nu), &pt).unwrap(), 0.0);
    }

    #[test]
    fn yang_relations_hold_pointwise(pt in point(4, 1.0), al in 0.0..0.4f64, be in 0.0..0.4f64, c in case()) {
        let params = ModelParams { alpha: al, beta: be, case: c, n: 4 };
        let set = yang_special(&params, &ProfilePair::phi2_zero(c.sigma())).unwrap();
        if let Ok(r) = relation_residuals(&set, &yang_relations(&set), &pt) {
            let worst = r.iter().cloned().fold(0.0, f64::max);
            prop_assert!(worst < 1e-10, "{}", worst);
        }
    }

    #[test]
    fn lorentz_generator_matches_coordinates(pt in point(4, 1.0), al in 0.0..0.4f64, be in 0.0..0.4f64) {
        let params = ModelParams { alpha: al, beta: be, ..Default::default() };
        let set = yang_special(&params, &ProfilePair::phi2_zero(ModelCase::PP.sigma())).unwrap();
        let m = set.get(GenId::M(1, 2)).unwrap().eval(&pt).unwrap();
        prop_assert_eq!(m, pt.x[1] * pt.p[2] - pt.x[2] * pt.p[1]);
    }

    #[test]
    fn g_is_odd(z in -0.9..0.9f64, al in 0.05..1.0f64, be in 0.05..1.0f64) {
        prop_assert_eq!(g_closed(-z, al, be).unwrap(), -g_closed(z, al, be).unwrap());
    }

    #[test]
    fn g_series_remainder(z in -0.5..0.5f64, order in 1usize..9) {
        let gap = (g_closed(z, 1.0, 1.0).unwrap() - g_series(z, 1.0, 1.0, order).unwrap()).abs();
        prop_assert!(gap <= g_series_term(z, order + 1).abs() + 1e-16, "{}", gap);
    }

    #[test]
    fn duality_twice_flips_shifts(al in 0.0..1.0f64, be in 0.0..1.0f64, c in case(), phi in -0.3..0.3f64, psi in -0.3..0.3f64, s in -0.2..0.2f64) {
        let params = ModelParams { alpha: al, beta: be, case: c, n: 4 };
        let gp = GenParams { amp_a: 1.1, amp_b: 0.9, phi, psi, a: vec![s, 0.1, 0.0, -s], b: vec![0.0, s, 0.2, 0.1] };
        let (p1, g1) = born_dual_params(&params, &gp, DualMode::All);
        let (p2, g2) = born_dual_params(&p1, &g1, DualMode::All);
        prop_assert_eq!(p2, params);
        prop_assert_eq!((g2.amp_a, g2.amp_b, g2.phi, g2.psi), (gp.amp_a, gp.amp_b, gp.phi, gp.psi));
        prop_assert_eq!(g2.a, gp.a.iter().map(|v| -v).collect::<Vec<_>>());
        prop_assert_eq!(g2.b, gp.b.iter().map(|v| -v).collect::<Vec<_>>());
    }
}
