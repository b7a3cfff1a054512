//! Eigenpairs of `-T_θ` on axisymmetric tangential profiles.
//!
//! `-T_θ ψ_ν = α_ν ψ_ν` with `α_ν = ν(ν+1)` and
//! `ψ_ν(θ) = c_ν P_{ν-1}(-cos θ) sin θ`, where
//! `P_n(x) = (1-x²)^{-1} (d/dx)^n (1-x²)^{n+1}` is built with exact integer
//! arithmetic. Floating point only enters when a polynomial is evaluated,
//! and each evaluation is rounded once.

mod poly;

pub use poly::ExactPoly;

use crate::error::{Error, Result};
use crate::geometry::ThetaGrid;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use std::collections::HashMap;
use std::f64::consts::TAU;
use std::sync::{Arc, OnceLock, RwLock};

/// Largest Rodrigues degree `n` (that is, `ν - 1`) supported.
pub const MAX_EXACT_DEGREE: usize = 100;

/// `P_n` from the Rodrigues-type formula.
pub fn legendre5(n: usize) -> Result<ExactPoly> {
    if n > MAX_EXACT_DEGREE {
        return Err(Error::DegreeOutOfRange { degree: n, max: MAX_EXACT_DEGREE });
    }
    let mut p = ExactPoly::one_minus_x2_pow(n + 1);
    for _ in 0..n {
        p = p.derivative();
    }
    // (d/dx)^n (1-x²)^{n+1} keeps a simple factor (1-x²).
    Ok(p.div_one_minus_x2().expect("Rodrigues numerator is divisible by 1 - x²"))
}

/// One normalized eigenpair.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub nu: usize,
    pub alpha: u64,
    /// `c_ν > 0` with `∫_{S²} ψ_ν² dσ = 1`.
    pub norm_constant: f64,
    poly: ExactPoly,
    d1: ExactPoly,
    d2: ExactPoly,
    // D_θ ψ / c = (1-x²) P' - 2x P and its x-derivative
    big_d: ExactPoly,
    big_d1: ExactPoly,
}

fn half_log2(r: &BigRational) -> i64 {
    (r.numer().bits() as i64 - r.denom().bits() as i64) / 2
}

impl EigenPair {
    pub fn new(nu: usize) -> Result<Self> {
        if nu == 0 {
            return Err(Error::InvalidIndex);
        }
        let poly = legendre5(nu - 1)?;
        let d1 = poly.derivative();
        let d2 = d1.derivative();
        let one_minus_x2 = ExactPoly::one_minus_x2_pow(1);
        let two_x = ExactPoly::from_i64(&[0, -2]);
        let big_d = one_minus_x2.mul(&d1).add(&two_x.mul(&poly));
        let big_d1 = big_d.derivative();

        // R = ∫ P² (1-x²) dx can exceed the f64 range, so take its square
        // root as 2^e · sqrt(R / 4^e).
        let r = poly.mul(&poly).mul(&one_minus_x2).integral_pm1();
        let e = half_log2(&r);
        let scale = BigRational::from_integer(BigInt::one() << (2 * e.max(0) as usize));
        let inv_scale = BigRational::from_integer(BigInt::one() << (2 * (-e).max(0) as usize));
        let reduced = (r / scale * inv_scale).to_f64().ok_or(Error::NonFinite("norm integral"))?;
        let norm_constant = 2f64.powi(-(e as i32)) / (TAU * reduced).sqrt();
        if !norm_constant.is_finite() || norm_constant <= 0.0 {
            return Err(Error::NonFinite("norm constant"));
        }
        let alpha = (nu as u64) * (nu as u64 + 1);
        Ok(Self { nu, alpha, norm_constant, poly, d1, d2, big_d, big_d1 })
    }

    /// Exact coefficients of `P_{ν-1}`, lowest degree first.
    pub fn poly_coeffs(&self) -> &[BigInt] {
        self.poly.coeffs()
    }

    pub fn poly(&self) -> &ExactPoly {
        &self.poly
    }

    pub fn alpha_f64(&self) -> f64 {
        self.alpha as f64
    }

    /// `c_ν P_{ν-1}(x)`.
    pub fn phi(&self, x: f64) -> f64 {
        self.norm_constant * self.poly.eval(x)
    }

    pub fn psi(&self, theta: f64) -> f64 {
        self.phi(-theta.cos()) * theta.sin()
    }

    /// `∂_θ ψ_ν = c [sin²θ P' - x P]`.
    pub fn psi_dtheta(&self, theta: f64) -> f64 {
        let x = -theta.cos();
        let s = theta.sin();
        self.norm_constant * (s * s * self.d1.eval(x) - x * self.poly.eval(x))
    }

    /// `D_θ ψ_ν` as a function of `x = -cos θ`.
    pub fn big_d_at(&self, x: f64) -> f64 {
        self.norm_constant * self.big_d.eval(x)
    }

    /// `-T_θ ψ_ν` at `x = -cos θ` with `sin θ` supplied.
    pub fn minus_t_at(&self, x: f64, sin_theta: f64) -> f64 {
        -self.norm_constant * sin_theta * self.big_d1.eval(x)
    }

    /// `ψ_ν`, `∂_θψ_ν` and `D_θψ_ν` at the polar nodes.
    pub fn tabulate(&self, theta: &ThetaGrid) -> PolarTable {
        let c = self.norm_constant;
        let n = theta.len();
        let mut tab = PolarTable {
            alpha: self.alpha_f64(),
            psi: Vec::with_capacity(n),
            psi_dtheta: Vec::with_capacity(n),
            big_d: Vec::with_capacity(n),
        };
        for i in 0..n {
            let (x, s) = (theta.x[i], theta.sin_theta[i]);
            let px = self.poly.eval(x);
            tab.psi.push(c * px * s);
            tab.psi_dtheta.push(c * (s * s * self.d1.eval(x) - x * px));
            tab.big_d.push(c * self.big_d.eval(x));
        }
        tab
    }

    /// Residual of `(1-x²)φ'' - 4xφ' + (α-2)φ` for `φ = c_ν P_{ν-1}`.
    pub fn ode_at(&self, x: f64) -> f64 {
        let c = self.norm_constant;
        let (p, p1, p2) = (c * self.poly.eval(x), c * self.d1.eval(x), c * self.d2.eval(x));
        (1.0 - x) * (1.0 + x) * p2 - 4.0 * x * p1 + (self.alpha_f64() - 2.0) * p
    }
}

/// One eigenfunction tabulated on polar nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarTable {
    pub alpha: f64,
    pub psi: Vec<f64>,
    pub psi_dtheta: Vec<f64>,
    pub big_d: Vec<f64>,
}

impl PolarTable {
    pub fn scaled(mut self, a: f64) -> Self {
        for v in self.psi.iter_mut().chain(&mut self.psi_dtheta).chain(&mut self.big_d) {
            *v *= a;
        }
        self
    }
}

fn cache() -> &'static RwLock<HashMap<usize, Arc<EigenPair>>> {
    static CACHE: OnceLock<RwLock<HashMap<usize, Arc<EigenPair>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Shared, cached eigenpair for index `ν ≥ 1`.
pub fn eigenpair(nu: usize) -> Result<Arc<EigenPair>> {
    if let Some(p) = cache().read().expect("eigenpair cache poisoned").get(&nu) {
        return Ok(p.clone());
    }
    let pair = Arc::new(EigenPair::new(nu)?);
    let mut w = cache().write().expect("eigenpair cache poisoned");
    Ok(w.entry(nu).or_insert(pair).clone())
}

pub fn psi(nu: usize, theta: f64) -> Result<f64> {
    Ok(eigenpair(nu)?.psi(theta))
}

pub fn psi_dtheta(nu: usize, theta: f64) -> Result<f64> {
    Ok(eigenpair(nu)?.psi_dtheta(theta))
}

/// `‖-T_θ ψ_ν - α_ν ψ_ν‖` in `L²(sin θ dθ)` over the polar nodes, with both
/// terms evaluated from the analytic polynomial form.
pub fn eigen_residual(nu: usize, theta: &ThetaGrid) -> Result<f64> {
    let pair = eigenpair(nu)?;
    let alpha = pair.alpha_f64();
    let acc: f64 = (0..theta.len())
        .map(|i| {
            let (x, s) = (theta.x[i], theta.sin_theta[i]);
            let r = pair.minus_t_at(x, s) - alpha * pair.phi(x) * s;
            theta.weights[i] * r * r
        })
        .sum();
    Ok(acc.sqrt())
}

/// Max of `|(1-x²)φ'' - 4xφ' + (α_ν-2)φ|` over `xs`, for the normalized
/// polynomial `φ = c_ν P_{ν-1}`.
pub fn ode_residual(nu: usize, xs: &[f64]) -> Result<f64> {
    let pair = eigenpair(nu)?;
    if let Some(&x) = xs.iter().find(|x| !(x.abs() < 1.0)) {
        return Err(Error::InvalidConfig(format!("ode sample {x} outside (-1, 1)")));
    }
    Ok(xs.iter().map(|&x| pair.ode_at(x).abs()).fold(0.0, f64::max))
}

/// `ψ_ν`, `∂_θψ_ν` and `D_θψ_ν` tabulated on polar nodes for `ν = 1..=nu_max`.
#[derive(Debug, Clone)]
pub struct EigenBasis {
    pub nu_max: usize,
    pub alpha: Vec<f64>,
    /// `psi[ν-1][i]`.
    pub psi: Vec<Vec<f64>>,
    pub psi_dtheta: Vec<Vec<f64>>,
    pub big_d: Vec<Vec<f64>>,
}

impl EigenBasis {
    pub fn new(theta: &ThetaGrid, nu_max: usize) -> Result<Self> {
        if nu_max == 0 {
            return Err(Error::InvalidIndex);
        }
        let mut alpha = Vec::with_capacity(nu_max);
        let mut psi = Vec::with_capacity(nu_max);
        let mut psi_dtheta = Vec::with_capacity(nu_max);
        let mut big_d = Vec::with_capacity(nu_max);
        for nu in 1..=nu_max {
            let pair = eigenpair(nu)?;
            alpha.push(pair.alpha_f64());
            let tab = pair.tabulate(theta);
            psi.push(tab.psi);
            psi_dtheta.push(tab.psi_dtheta);
            big_d.push(tab.big_d);
        }
        Ok(Self { nu_max, alpha, psi, psi_dtheta, big_d })
    }
}

/// Coefficients of a polar profile in the `ψ_ν` basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    /// `coeffs[ν-1] = ∫_{S²} f ψ_ν dσ`.
    pub coeffs: Vec<f64>,
    /// `‖f - Σ a_ν ψ_ν‖_{L²(S²)}` at the nodes.
    pub residual_norm: f64,
    pub profile_norm: f64,
    /// Too few nodes for the requested `nu_max`, or coefficients that have
    /// not decayed by `nu_max`.
    pub under_resolved: bool,
}

/// Minimum polar node count for a projection onto `ν ≤ nu_max`.
pub fn required_nodes(nu_max: usize) -> usize {
    2 * nu_max + 8
}

pub fn project(f: &[f64], nu_max: usize, theta: &ThetaGrid) -> Result<Projection> {
    let basis = EigenBasis::new(theta, nu_max)?;
    project_with(f, &basis, theta)
}

pub fn project_with(f: &[f64], basis: &EigenBasis, theta: &ThetaGrid) -> Result<Projection> {
    if f.len() != theta.len() {
        return Err(Error::ShapeMismatch { expected: [1, theta.len(), 1], got: vec![f.len()] });
    }
    if f.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("polar profile"));
    }
    let coeffs: Vec<f64> = basis
        .psi
        .iter()
        .map(|p| theta.integrate_sphere(&p.iter().zip(f).map(|(a, b)| a * b).collect::<Vec<_>>()))
        .collect();
    let mut rest = f.to_vec();
    for (a, p) in coeffs.iter().zip(&basis.psi) {
        rest.iter_mut().zip(p).for_each(|(r, v)| *r -= a * v);
    }
    let norm = |g: &[f64]| theta.integrate_sphere(&g.iter().map(|v| v * v).collect::<Vec<_>>()).sqrt();
    let residual_norm = norm(&rest);
    let profile_norm = norm(f);

    let peak = coeffs.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let tail = coeffs.iter().rev().take(2).fold(0.0f64, |m, a| m.max(a.abs()));
    let not_decayed = peak > 0.0 && tail > 1e-3 * peak && residual_norm > 1e-8 * profile_norm;
    let under_resolved = theta.len() < required_nodes(basis.nu_max) || not_decayed;
    if under_resolved {
        log::warn!(
            "projection onto nu <= {} may be under-resolved ({} polar nodes, tail/peak {:.2e})",
            basis.nu_max,
            theta.len(),
            if peak > 0.0 { tail / peak } else { 0.0 }
        );
    }
    Ok(Projection { coeffs, residual_norm, profile_norm, under_resolved })
}

/// `Σ a_ν ψ_ν(θ)`.
pub fn reconstruct(coeffs: &[f64], theta: f64) -> Result<f64> {
    coeffs
        .iter()
        .enumerate()
        .try_fold(0.0, |acc, (k, a)| Ok(acc + a * psi(k + 1, theta)?))
}

/// `[∫_{S²} ψ_μ ψ_ν dσ]` for `μ, ν ≤ nu_max` under the grid quadrature.
pub fn gram_matrix(nu_max: usize, theta: &ThetaGrid) -> Result<Vec<Vec<f64>>> {
    let basis = EigenBasis::new(theta, nu_max)?;
    Ok((0..nu_max)
        .map(|a| {
            (0..nu_max)
                .map(|b| {
                    let prod: Vec<f64> =
                        basis.psi[a].iter().zip(&basis.psi[b]).map(|(u, v)| u * v).collect();
                    theta.integrate_sphere(&prod)
                })
                .collect()
        })
        .collect())
}
