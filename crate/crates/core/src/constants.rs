//! Closed-form sharp constants and the one-dimensional minimization behind
//! them.
//!
//! With `b = (γ - 3/2)²` the reduced objective is
//! `F_γ(x, α) = x + (1 - 4(1-γ)/(x + α + b)) α`, where `x = λ²` is the squared
//! log-radial frequency. Its minimum over `x ≥ 0` and `α = α_ν` sits at
//! `ν = 1` and either `x = 0` or the positive root `x_γ⁺` of
//! `G_γ(x) = (x + 2 + b)² - 8(γ - 1)`.

use crate::error::{Error, Result};
use crate::spectrum::MAX_EXACT_DEGREE;

/// Lowest eigenvalue `α₁ = 2`.
pub const ALPHA1: f64 = 2.0;

fn b(gamma: f64) -> f64 {
    (gamma - 1.5) * (gamma - 1.5)
}

/// `F_γ(x, α)`.
pub fn f_gamma(gamma: f64, x: f64, alpha: f64) -> f64 {
    x + (1.0 - 4.0 * (1.0 - gamma) / (x + alpha + b(gamma))) * alpha
}

/// `∂F_γ/∂x`.
pub fn f_gamma_dx(gamma: f64, x: f64, alpha: f64) -> f64 {
    let d = x + alpha + b(gamma);
    1.0 + 4.0 * (1.0 - gamma) * alpha / (d * d)
}

fn radial_denominator(gamma: f64, lambda: f64) -> Result<f64> {
    let d = b(gamma) + lambda * lambda;
    if d == 0.0 {
        Err(Error::SingularParameter)
    } else {
        Ok(d)
    }
}

/// `q(λ, α) = α / ((γ-3/2)² + λ²) + 1`.
pub fn q_form(gamma: f64, lambda: f64, alpha: f64) -> Result<f64> {
    Ok(alpha / radial_denominator(gamma, lambda)? + 1.0)
}

/// `Q(λ, α) = α² / d + ((λ² + 4γ - 4) / d + 1) α + λ²` with
/// `d = (γ-3/2)² + λ²`.
pub fn big_q_form(gamma: f64, lambda: f64, alpha: f64) -> Result<f64> {
    let d = radial_denominator(gamma, lambda)?;
    let l2 = lambda * lambda;
    Ok(alpha * alpha / d + ((l2 + 4.0 * gamma - 4.0) / d + 1.0) * alpha + l2)
}

/// `(γ + 1/2)²`.
pub fn c_leray(gamma: f64) -> f64 {
    (gamma + 0.5) * (gamma + 0.5)
}

/// `(γ + 1/2)² + 2`, the best constant on purely swirling fields.
pub fn c_swirl(gamma: f64) -> f64 {
    c_leray(gamma) + 2.0
}

fn origin_branch(gamma: f64) -> f64 {
    let b = b(gamma);
    c_leray(gamma) * (4.0 + b) / (2.0 + b)
}

/// Sharp constant for all solenoidal fields.
pub fn c_costin_mazya(gamma: f64) -> f64 {
    if gamma <= 1.0 {
        origin_branch(gamma)
    } else {
        c_swirl(gamma)
    }
}

/// Roots `(x⁻, x⁺)` of `G_γ`, real only for `γ > 1`.
pub fn g_roots(gamma: f64) -> Option<(f64, f64)> {
    if gamma <= 1.0 {
        return None;
    }
    let s = 2.0 * std::f64::consts::SQRT_2 * (gamma - 1.0).sqrt();
    let m = -2.0 - b(gamma);
    Some((m - s, m + s))
}

/// Upper end of the interior-minimizer range, `≈ 2.8646556`.
pub fn gamma0() -> f64 {
    let a = 4.0 + 4.0 * 31f64.sqrt() / 3f64.powf(1.5);
    let a3 = a.cbrt();
    1.5 + a3 - 4.0 / (3.0 * a3)
}

/// Where the minimum of `F_γ(·, α₁)` over `x ≥ 0` is attained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// At `x = 0` (`γ < 3/2` or `γ > γ₀`).
    Origin,
    /// At `x = x_γ⁺ ≥ 0` (`3/2 ≤ γ ≤ γ₀`).
    Interior,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::Origin => "origin",
            Regime::Interior => "interior",
        }
    }
}

/// `(x*, F_γ(x*, α₁))` with `x*` read off from `g_roots`.
pub fn min_f_alpha1(gamma: f64) -> (f64, f64, Regime) {
    match g_roots(gamma) {
        Some((_, xp)) if xp >= 0.0 => (xp, f_gamma(gamma, xp, ALPHA1), Regime::Interior),
        _ => (0.0, f_gamma(gamma, 0.0, ALPHA1), Regime::Origin),
    }
}

/// Sharp constant for swirl-free solenoidal fields.
pub fn c_gamma0(gamma: f64) -> f64 {
    let g0 = gamma0();
    if (1.5..=g0).contains(&gamma) {
        let v = 2.0 * (gamma - 1.0).sqrt() + std::f64::consts::SQRT_2;
        v * v
    } else {
        origin_branch(gamma)
    }
}

/// `λ_γ = sqrt(max(x⁺, 0))` for `γ > 1`, else 0.
pub fn lambda_gamma(gamma: f64) -> f64 {
    g_roots(gamma).map_or(0.0, |(_, xp)| xp.max(0.0).sqrt())
}

/// Result of the brute-force minimization of `F_γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericMin {
    /// `(γ + 1/2)² + min F`.
    pub value: f64,
    pub nu: usize,
    pub x: f64,
    pub iterations: usize,
}

pub const DEFAULT_NU_MAX: usize = 8;
pub const GOLDEN_BUDGET: usize = 400;

pub fn default_x_max(gamma: f64) -> f64 {
    10.0 + 8.0 * gamma.abs()
}

/// Golden-section minimization of `F_γ(·, α_ν)` on `[0, x_max]` for every
/// `ν ≤ nu_max`. `tol` bounds the final bracket width in `x`.
pub fn c_gamma0_numeric(gamma: f64, nu_max: usize, x_max: f64, tol: f64) -> Result<NumericMin> {
    if !(3..=MAX_EXACT_DEGREE + 1).contains(&nu_max) {
        return Err(Error::InvalidConfig(format!("nu_max must lie in 3..={}", MAX_EXACT_DEGREE + 1)));
    }
    if !(x_max > 0.0 && x_max.is_finite() && tol > 0.0) {
        return Err(Error::InvalidConfig("need x_max > 0 and tol > 0".into()));
    }
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut best: Option<NumericMin> = None;
    for nu in 1..=nu_max {
        let alpha = (nu * (nu + 1)) as f64;
        let f = |x: f64| f_gamma(gamma, x, alpha);
        let (mut a, mut bb) = (0.0, x_max);
        let mut c = bb - inv_phi * (bb - a);
        let mut d = a + inv_phi * (bb - a);
        let (mut fc, mut fd) = (f(c), f(d));
        let mut iterations = 0;
        while bb - a > tol {
            if iterations == GOLDEN_BUDGET {
                return Err(Error::BudgetExhausted { tol, iterations });
            }
            iterations += 1;
            if fc <= fd {
                bb = d;
                d = c;
                fd = fc;
                c = bb - inv_phi * (bb - a);
                fc = f(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (bb - a);
                fd = f(d);
            }
        }
        let mid = 0.5 * (a + bb);
        let (x, fx) = [(0.0, f(0.0)), (mid, f(mid)), (x_max, f(x_max))]
            .into_iter()
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("three candidates");
        let cand = NumericMin { value: c_leray(gamma) + fx, nu, x, iterations };
        if best.is_none_or(|b| cand.value < b.value) {
            best = Some(cand);
        }
    }
    Ok(best.expect("nu_max >= 3"))
}

/// `min(C_{γ,0}, swirl_quotient)`; the swirl quotient of any admissible
/// swirl must be at least `(γ + 1/2)² + 2`.
pub fn c_gamma_g(gamma: f64, swirl_quotient: f64) -> Result<f64> {
    let bound = c_swirl(gamma);
    if swirl_quotient.is_nan() || swirl_quotient < bound - 1e-9 * (1.0 + bound.abs()) {
        return Err(Error::InconsistentSwirlQuotient { value: swirl_quotient, bound });
    }
    Ok(c_gamma0(gamma).min(swirl_quotient))
}

/// All constants at one weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharpConstants {
    pub gamma: f64,
    pub c_leray: f64,
    pub c_costin_mazya: f64,
    pub c_gamma0: f64,
    pub c_swirl: f64,
    pub x_minus: Option<f64>,
    pub x_plus: Option<f64>,
    pub lambda_gamma: f64,
    pub regime: Regime,
}

impl SharpConstants {
    pub fn new(gamma: f64) -> Self {
        let roots = g_roots(gamma);
        Self {
            gamma,
            c_leray: c_leray(gamma),
            c_costin_mazya: c_costin_mazya(gamma),
            c_gamma0: c_gamma0(gamma),
            c_swirl: c_swirl(gamma),
            x_minus: roots.map(|r| r.0),
            x_plus: roots.map(|r| r.1),
            lambda_gamma: lambda_gamma(gamma),
            regime: min_f_alpha1(gamma).2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::SQRT_2;

    #[test]
    fn f_examples() {
        assert_abs_diff_eq!(f_gamma(0.0, 0.0, 2.0), 2.0 / 17.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f_gamma(1.0, 3.7, 12.0), 15.7, epsilon = 1e-14);
        let (_, xp) = g_roots(2.0).unwrap();
        assert_abs_diff_eq!(f_gamma(2.0, xp, 2.0), 4.0 * SQRT_2 - 0.25, epsilon = 1e-14);
    }

    #[test]
    fn q_examples() {
        assert_abs_diff_eq!(q_form(0.0, 0.0, 2.0).unwrap(), 2.0 / 2.25 + 1.0, epsilon = 1e-15);
        let ratio = big_q_form(0.0, 0.0, 2.0).unwrap() / q_form(0.0, 0.0, 2.0).unwrap();
        assert_abs_diff_eq!(ratio, 2.0 / 17.0, epsilon = 1e-15);
        assert!(matches!(q_form(1.5, 0.0, 2.0), Err(Error::SingularParameter)));
        assert!(matches!(big_q_form(1.5, 0.0, 2.0), Err(Error::SingularParameter)));
    }

    #[test]
    fn costin_mazya_examples() {
        assert_eq!(c_costin_mazya(-0.5), 0.0);
        assert_abs_diff_eq!(origin_branch(1.0), 4.25, epsilon = 1e-15);
        assert_abs_diff_eq!(c_swirl(1.0), 4.25, epsilon = 1e-15);
        assert_abs_diff_eq!(c_costin_mazya(2.0), 8.25, epsilon = 1e-15);
    }

    #[test]
    fn roots() {
        assert_abs_diff_eq!(g_roots(1.5).unwrap().1, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g_roots(2.0).unwrap().1, 2.0 * SQRT_2 - 2.25, epsilon = 1e-15);
        assert!(g_roots(1.2).unwrap().1 < 0.0);
        assert!(g_roots(1.0).is_none());
    }

    #[test]
    fn gamma0_value() {
        let g0 = gamma0();
        assert!((g0 - 2.8646556).abs() < 1e-6);
        assert!((2.0 * SQRT_2 * (g0 - 1.0).sqrt() - 2.0 - b(g0)).abs() < 1e-9);
        assert!(g_roots(g0).unwrap().1.abs() < 1e-9);
    }

    #[test]
    fn c_gamma0_examples() {
        assert_abs_diff_eq!(c_gamma0(2.0), 6.0 + 4.0 * SQRT_2, epsilon = 1e-13);
        assert_abs_diff_eq!(c_gamma0(0.0), 0.25 * 6.25 / 4.25, epsilon = 1e-15);
        assert_abs_diff_eq!(c_gamma0(1.5), 8.0, epsilon = 1e-13);
        assert_abs_diff_eq!(origin_branch(1.5), 8.0, epsilon = 1e-13);
        let g0 = gamma0();
        let v = 2.0 * (g0 - 1.0).sqrt() + SQRT_2;
        assert!((v * v - origin_branch(g0)).abs() < 1e-9);
    }

    #[test]
    fn numeric_examples() {
        let m = c_gamma0_numeric(2.0, 6, default_x_max(2.0), 1e-10).unwrap();
        assert!((m.value - c_gamma0(2.0)).abs() < 1e-8);
        assert_eq!(m.nu, 1);
        let m = c_gamma0_numeric(0.0, 8, default_x_max(0.0), 1e-10).unwrap();
        assert_eq!((m.nu, m.x), (1, 0.0));
        let m = c_gamma0_numeric(5.0, 8, default_x_max(5.0), 1e-10).unwrap();
        assert_eq!((m.nu, m.x), (1, 0.0));
        assert!((m.value - origin_branch(5.0)).abs() < 1e-8);
        assert!(matches!(
            c_gamma0_numeric(2.0, 6, 1e300, 1e-300),
            Err(Error::BudgetExhausted { .. })
        ));
    }

    #[test]
    fn swirl_min() {
        assert_eq!(c_gamma_g(2.0, f64::INFINITY).unwrap(), c_gamma0(2.0));
        assert_abs_diff_eq!(c_gamma_g(2.0, 8.25).unwrap(), 8.25, epsilon = 1e-15);
        assert_abs_diff_eq!(c_gamma_g(0.0, 4.25).unwrap(), c_gamma0(0.0), epsilon = 1e-15);
        assert!(matches!(c_gamma_g(2.0, 8.0), Err(Error::InconsistentSwirlQuotient { .. })));
    }

    #[test]
    fn sharp_constants_struct() {
        let s = SharpConstants::new(2.0);
        assert_eq!(s.regime, Regime::Interior);
        assert_abs_diff_eq!(s.lambda_gamma * s.lambda_gamma, s.x_plus.unwrap(), epsilon = 1e-15);
        let s = SharpConstants::new(0.5);
        assert_eq!((s.regime, s.lambda_gamma, s.x_plus), (Regime::Origin, 0.0, None));
    }
}
