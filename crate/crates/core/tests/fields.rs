use hardy_leray::constants::lambda_gamma;
use hardy_leray::fields::*;
use hardy_leray::geometry::{divergence_residual, FieldSample, GridSpec};
use hardy_leray::quotient::{spectral_transform, GridPolicy};
use hardy_leray::spectrum::eigenpair;
use hardy_leray::Error;
use ndarray::Array3;
use proptest::prelude::*;
use rustfft::num_complex::Complex64;
use std::f64::consts::PI;

// (2π)^{-1/2} ∫ ξ(s) e^{-iks} ds by composite Simpson; ξ is even.
fn bump_hat(k: f64) -> f64 {
    let m = 20_000;
    let h = 2.0 / m as f64;
    let mut acc = 0.0;
    for j in 0..=m {
        let s = -1.0 + h * j as f64;
        let w = if j == 0 || j == m { 1.0 } else if j % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * Profile::StandardBump.value(s) * (k * s).cos();
    }
    acc * h / 3.0 / (2.0 * PI).sqrt()
}

#[test]
fn minimizer_spectrum_matches_closed_form() {
    let c1 = eigenpair(1).unwrap().norm_constant;
    for (gamma, n) in [(2.0, 8usize), (0.0, 6), (4.0, 4)] {
        let grid = GridPolicy::default().grid_for(n as f64).unwrap().build().unwrap();
        let v = build_swirlfree_minimizer(n, gamma, &Profile::StandardBump, &grid).unwrap();
        let sf = spectral_transform(&v, gamma, 3).unwrap();
        let lg = lambda_gamma(gamma);
        let nf = n as f64;
        let mut worst: f64 = 0.0;
        let mut peak: f64 = 0.0;
        let mut peak_at = 0.0;
        for (k, &l) in sf.lambda.iter().enumerate() {
            if l.abs() > lg + 12.0 / nf {
                continue;
            }
            let a_hat = 0.5 * nf * (bump_hat(nf * (l - lg)) + bump_hat(nf * (l + lg)));
            let want = Complex64::new(1.5 - gamma, l) * a_hat / c1;
            let got = sf.f[k][0];
            worst = worst.max((got - want).norm());
            if got.norm() > peak {
                peak = got.norm();
                peak_at = l;
            }
            for nu in 1..3 {
                assert!(sf.f[k][nu].norm() < 1e-10);
            }
        }
        assert!(worst / peak < 1e-7, "gamma {gamma}: {worst:e} vs peak {peak:e}");
        assert!((peak_at.abs() - lg).abs() < 2.0 / nf, "peak at {peak_at}, expected near {lg}");
    }
}

#[test]
fn swirl_minimizer_is_sin_bump() {
    let grid = GridSpec::symmetric(6.0, 301, 16).unwrap().build().unwrap();
    let v = build_swirl_minimizer(4, &Profile::StandardBump, &grid).unwrap();
    assert!(v.is_pure_swirl());
    for (j, t) in grid.t.iter().enumerate() {
        for (i, s) in grid.theta.sin_theta.iter().enumerate() {
            let want = Profile::StandardBump.value(t / 4.0) * s;
            assert!((v.u_phi()[[j, i, 0]] - want).abs() < 1e-15);
        }
    }
}

#[test]
fn combine_rejects_inadmissible_parts() {
    let grid = GridSpec::symmetric(8.0, 201, 12).unwrap().build().unwrap();
    let p = Profile::StandardBump;
    let base = build_swirlfree_minimizer(2, 0.0, &p, &grid).unwrap();
    let swirl = build_swirl_minimizer(2, &p, &grid).unwrap();
    assert!(combine(2.0, &base, &swirl).is_ok());
    assert!(matches!(combine(2.0, &swirl, &swirl), Err(Error::BaseNotSwirlFree)));
    assert!(matches!(combine(2.0, &base, &base), Err(Error::SwirlNotPure)));
    let other = GridSpec::symmetric(8.0, 203, 12).unwrap().build().unwrap();
    let swirl2 = build_swirl_minimizer(2, &p, &other).unwrap();
    assert!(matches!(combine(2.0, &base, &swirl2), Err(Error::GridMismatch)));

    let g3 = GridSpec::new(-8.0, 8.0, 201, 12, 4).unwrap().build().unwrap();
    let base3 = build_swirlfree_minimizer(2, 0.0, &p, &g3).unwrap();
    let mut up = Array3::zeros(g3.shape());
    for ((j, i, k), x) in up.indexed_iter_mut() {
        *x = p.value(g3.t[j] / 2.0) * g3.theta.sin_theta[i] * (1.0 + 0.1 * g3.phi[k].cos());
    }
    let z = Array3::zeros(g3.shape());
    let phi_swirl = FieldSample::new(g3.clone(), z.clone(), z, up).unwrap();
    assert!(matches!(combine(2.0, &base3, &phi_swirl), Err(Error::PhiDependentSwirl { .. })));
}

#[test]
fn combined_parts_are_normalized() {
    let grid = GridPolicy::default().grid_for(8.0).unwrap().build().unwrap();
    let u = build_combined(4, 1.0, &Profile::StandardBump, &SwirlProfile::sin_bump(8.0).unwrap(), &grid).unwrap();
    assert!((u.swirl_part().norm_sq() - 1.0).abs() < 1e-12);
    assert!((u.non_swirl_part().norm_sq() - 16.0).abs() < 1e-10);
    assert!(divergence_residual(&u, Some(1.0)).unwrap() < 1e-10);
}

#[test]
fn prescribed_swirl_from_closure() {
    let grid = GridSpec::symmetric(4.0, 201, 16).unwrap().build().unwrap();
    let src = SwirlFn {
        f: |t: f64, th: f64| {
            let [x0, x1, _] = Profile::StandardBump.eval(t / 3.0);
            let s = th.sin();
            [x0 * s * s, x1 / 3.0 * s * s, x0 * 2.0 * s * th.cos()]
        },
        support: (-3.0, 3.0),
    };
    let g = build_swirl_field(&src, &grid).unwrap();
    assert!(g.is_pure_swirl());
    assert!(divergence_residual(&g, Some(0.3)).unwrap() < 1e-14);
}

#[test]
fn tabulated_profile_tracks_bump() {
    let s: Vec<f64> = (0..=64).map(|k| k as f64 / 64.0).collect();
    let vals: Vec<f64> = s.iter().map(|&x| Profile::StandardBump.value(x)).collect();
    let tab = Profile::from_table(&s, &vals).unwrap();
    for x in [0.0, 0.13, 0.5, 0.77, -0.4] {
        assert!((tab.value(x) - Profile::StandardBump.value(x)).abs() < 1e-5);
    }
    let grid = GridPolicy::default().grid_for(4.0).unwrap().build().unwrap();
    let v = build_swirlfree_minimizer(4, 2.0, &tab, &grid).unwrap();
    assert!(divergence_residual(&v, Some(2.0)).unwrap() < 1e-10);
    assert!(Profile::from_table(&[0.0, 0.5, 1.0], &[1.0, 0.5, 0.2]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_fields_are_solenoidal(seed in 0u64..10_000, gamma in -2.0f64..5.0, complexity in 1usize..6) {
        let grid = GridSpec::symmetric(6.0, 257, 20).unwrap().build().unwrap();
        let v = random_admissible_swirlfree(seed, gamma, &grid, complexity).unwrap();
        prop_assert!(v.is_swirl_free());
        prop_assert!(divergence_residual(&v, Some(gamma)).unwrap() <= 1e-8);
        let w = random_axisymmetric_swirl(seed, &grid, complexity).unwrap();
        prop_assert!(w.is_pure_swirl());
        prop_assert!(divergence_residual(&w, Some(gamma)).unwrap() <= 1e-8);
    }

    #[test]
    fn random_fields_are_reproducible(seed in 0u64..10_000) {
        let grid = GridSpec::symmetric(6.0, 129, 12).unwrap().build().unwrap();
        let a = random_admissible_swirlfree(seed, 0.5, &grid, 3).unwrap();
        let b = random_admissible_swirlfree(seed, 0.5, &grid, 3).unwrap();
        prop_assert_eq!(a.components(), b.components());
    }

    #[test]
    fn stream_fields_are_solenoidal(
        amp in -2.0f64..2.0, c in -1.0f64..1.0, w in 1.0f64..3.0,
        l in -2.0f64..2.0, ph in 0.0f64..6.3, nu in 1usize..5, gamma in -1.0f64..4.0,
    ) {
        prop_assume!(amp.abs() > 1e-3);
        let grid = GridSpec::symmetric(5.0, 257, 20).unwrap().build().unwrap();
        let t = StreamTerm { amplitude: amp, center: c, width: w, lambda: l, phase: ph, nu };
        let v = build_from_stream(&[t], gamma, &Profile::StandardBump, &grid).unwrap();
        prop_assert!(divergence_residual(&v, Some(gamma)).unwrap() <= 1e-8);
    }
}
