use hardy_leray::constants::*;
use proptest::prelude::*;

fn sweep() -> impl Iterator<Item = f64> {
    (0..=160).map(|k| -3.0 + 0.05 * k as f64)
}

#[test]
fn closed_form_matches_numeric_on_sweep() {
    for g in sweep() {
        let m = c_gamma0_numeric(g, DEFAULT_NU_MAX, default_x_max(g), 1e-10).unwrap();
        assert!((m.value - c_gamma0(g)).abs() <= 1e-8, "gamma={g}: {} vs {}", m.value, c_gamma0(g));
        assert_eq!(m.nu, 1, "gamma={g}");
    }
}

#[test]
fn ordering_chain() {
    for g in sweep() {
        let s = SharpConstants::new(g);
        assert!(s.c_leray <= s.c_costin_mazya + 1e-12);
        assert!(s.c_costin_mazya <= s.c_gamma0 + 1e-12, "gamma={g}");
        assert!(s.c_costin_mazya <= s.c_swirl + 1e-12);
        if g > 1.0 {
            assert_eq!(s.c_costin_mazya, s.c_swirl);
        }
        if (g + 0.5).abs() > 1e-9 {
            assert!(s.c_costin_mazya > s.c_leray);
        }
    }
}

#[test]
fn branch_continuity() {
    let h = 1e-12;
    assert!((c_costin_mazya(1.0 + h) - c_costin_mazya(1.0)).abs() <= 1e-9);
    assert!((c_gamma0(1.5 - h) - c_gamma0(1.5)).abs() <= 1e-9);
    let g0 = gamma0();
    assert!((c_gamma0(g0 + h) - c_gamma0(g0)).abs() <= 1e-9);
}

#[test]
fn interior_range_from_roots() {
    for g in sweep().filter(|g| *g > 1.0) {
        let (_, xp) = g_roots(g).unwrap();
        let inside = (1.5 - 1e-12..=gamma0()).contains(&g);
        assert_eq!(xp >= -1e-12, inside, "gamma={g}, x+={xp}");
    }
}

#[test]
fn q_numerator_is_polynomial_in_lambda_squared() {
    // Q·d with d = b + λ² equals α² + (λ² + 4γ - 4 + d) α + d λ², quadratic in s = λ².
    let (g, a) = (0.7, 6.0);
    let bb = (g - 1.5f64).powi(2);
    let val = |s: f64| big_q_form(g, s.sqrt(), a).unwrap() * (bb + s);
    let s: Vec<f64> = (1..=5).map(|k| k as f64).collect();
    let y: Vec<f64> = s.iter().map(|&s| val(s)).collect();
    let d2 = |i: usize| y[i + 2] - 2.0 * y[i + 1] + y[i];
    let third: Vec<f64> = (0..2).map(|i| d2(i + 1) - d2(i)).collect();
    for t in third {
        assert!(t.abs() < 1e-10 * y[4].abs());
    }
}

proptest! {
    #[test]
    fn q_ratio_is_f(g in -3.0f64..5.0, l in -10.0f64..10.0, nu in 1usize..=3) {
        prop_assume!((g - 1.5).abs() > 1e-6 || l.abs() > 1e-6);
        let a = (nu * (nu + 1)) as f64;
        let r = big_q_form(g, l, a).unwrap() / q_form(g, l, a).unwrap();
        let f = f_gamma(g, l * l, a);
        prop_assert!((r - f).abs() <= 1e-12 * (1.0 + f.abs()));
    }

    #[test]
    fn argmin_over_nu_is_one(g in -3.0f64..5.0, x in 0.0f64..60.0, nu in 1usize..=12) {
        let (xs, fmin, _) = min_f_alpha1(g);
        prop_assert!(xs >= 0.0);
        let a = (nu * (nu + 1)) as f64;
        prop_assert!(fmin <= f_gamma(g, x, a) + 1e-12 * (1.0 + fmin.abs()));
    }

    #[test]
    fn swirl_min_never_below_costin_mazya(g in -3.0f64..5.0, extra in 0.0f64..50.0) {
        let v = c_gamma_g(g, c_swirl(g) + extra).unwrap();
        prop_assert!(v >= c_costin_mazya(g) - 1e-12);
    }
}
