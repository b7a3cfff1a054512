use hardy_leray::geometry::ThetaGrid;
use hardy_leray::spectrum::{eigen_residual, eigenpair, gram_matrix, ode_residual, project, psi};
use proptest::prelude::*;
use std::f64::consts::PI;

fn gegenbauer_three_halves(n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 3.0 * x);
    if n == 0 {
        return prev;
    }
    for k in 2..=n {
        let kf = k as f64;
        let next = (2.0 * x * (kf + 0.5) * cur - (kf + 1.0) * prev) / kf;
        prev = cur;
        cur = next;
    }
    cur
}

fn zeros(f: impl Fn(f64) -> f64) -> Vec<f64> {
    let n = 20_000;
    let mut out = Vec::new();
    for k in 0..n {
        let (mut a, mut b) = (-1.0 + 2.0 * k as f64 / n as f64, -1.0 + 2.0 * (k + 1) as f64 / n as f64);
        let (fa, fb) = (f(a), f(b));
        if fa == 0.0 {
            out.push(a);
            continue;
        }
        if fb == 0.0 || fa * fb > 0.0 {
            continue;
        }
        for _ in 0..80 {
            let m = 0.5 * (a + b);
            if f(a) * f(m) <= 0.0 {
                b = m;
            } else {
                a = m;
            }
        }
        out.push(0.5 * (a + b));
    }
    out
}

#[test]
fn residuals_up_to_thirty() {
    let th = ThetaGrid::gauss_legendre(2 * 30 + 8).unwrap();
    let xs: Vec<f64> = (1..200).map(|k| -1.0 + k as f64 / 100.0).collect();
    for nu in 1..=30 {
        let e = eigen_residual(nu, &th).unwrap();
        let o = ode_residual(nu, &xs).unwrap();
        assert!(e <= 1e-10, "nu={nu} eigen residual {e:e}");
        assert!(o <= 1e-10, "nu={nu} ode residual {o:e}");
    }
}

#[test]
fn normalization_and_gram_matrix() {
    let th = ThetaGrid::gauss_legendre(2 * 15 + 8).unwrap();
    let g = gram_matrix(15, &th).unwrap();
    for (a, row) in g.iter().enumerate() {
        for (b, v) in row.iter().enumerate() {
            let expect = if a == b { 1.0 } else { 0.0 };
            assert!((v - expect).abs() <= 1e-9, "G[{a}][{b}] = {v}");
        }
    }
    let fine = ThetaGrid::gauss_legendre(80).unwrap();
    for nu in [1, 7, 20, 30] {
        let sq: Vec<f64> = fine.theta.iter().map(|&t| psi(nu, t).unwrap().powi(2)).collect();
        assert!((fine.integrate_sphere(&sq) - 1.0).abs() <= 1e-10);
    }
}

#[test]
fn zeros_match_gegenbauer() {
    for nu in 2..=10 {
        let pair = eigenpair(nu).unwrap();
        let ours = zeros(|x| pair.poly().eval(x));
        let theirs = zeros(|x| gegenbauer_three_halves(nu - 1, x));
        assert_eq!(ours.len(), nu - 1);
        assert_eq!(theirs.len(), nu - 1);
        for (a, b) in ours.iter().zip(&theirs) {
            assert!((a - b).abs() < 1e-12, "nu={nu}: {a} vs {b}");
        }
    }
}

#[test]
fn reconstruction_error_decreases() {
    let th = ThetaGrid::gauss_legendre(64).unwrap();
    let f: Vec<f64> = th.theta.iter().map(|t| t.sin() * (t.cos() * 2.0).exp()).collect();
    let mut last = f64::INFINITY;
    for nu_max in 1..=20 {
        let r = project(&f, nu_max, &th).unwrap().residual_norm;
        assert!(r <= last + 1e-13, "nu_max={nu_max}: {r} > {last}");
        last = r;
    }
    assert!(last < 1e-8);
}

proptest! {
    #[test]
    fn parity(nu in 1usize..=30, theta in 0.0f64..PI) {
        let a = psi(nu, PI - theta).unwrap();
        let b = psi(nu, theta).unwrap();
        let sign = if (nu - 1) % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((a - sign * b).abs() <= 1e-12 * (1.0 + b.abs()) * nu as f64);
    }
}
