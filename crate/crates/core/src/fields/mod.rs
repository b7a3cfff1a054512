//! Solenoidal test fields built from closed-form expressions.
//!
//! Every constructor returns the transformed field `v = ρ^{γ+1/2} u` together
//! with its exact `∂_t` and `∂_θ`; [`to_level`] recovers `u`. Non-swirl parts
//! come from stream generators `S(t, θ) = a ξ((t-c)/w) cos(λt + φ₀) ψ_ν(θ)`
//! through `v = -σ D_θ S + e_θ (∂_t - γ + 3/2) S`, which is solenoidal for
//! every `S`.

mod profile;
mod random;
mod spec;

pub use profile::{Profile, TableProfile};
pub use random::{random_admissible_swirlfree, random_axisymmetric_swirl, random_stream_terms};
pub use spec::{FieldSpec, FieldVariant};

use crate::constants::lambda_gamma;
use crate::error::{Error, Result};
use crate::geometry::{Component, FieldDerivatives, FieldSample, Grid};
use crate::spectrum::{eigenpair, PolarTable};
use ndarray::Array3;
use std::sync::Arc;

/// Which side of `v = ρ^{γ+1/2} u` a sample represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Level {
    /// `v`, quotient taken with weight `-1/2`.
    #[default]
    Transformed,
    /// `u`, quotient taken with weight `γ`.
    Original,
}

impl Level {
    pub fn label(self) -> &'static str {
        match self {
            Level::Transformed => "v",
            Level::Original => "u",
        }
    }
}

/// Converts a transformed sample `v` to the requested level.
pub fn to_level(v: &FieldSample, gamma: f64, level: Level) -> FieldSample {
    match level {
        Level::Transformed => v.clone(),
        Level::Original => v.radially_rescaled(-(gamma + 0.5)),
    }
}

/// One stream generator `a ξ((t-c)/w) cos(λt + φ₀) ψ_ν(θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamTerm {
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
    pub lambda: f64,
    pub phase: f64,
    pub nu: usize,
}

impl StreamTerm {
    /// `ξ(t/w) sin θ`.
    pub fn sin_bump(width: f64) -> Result<Self> {
        Ok(Self {
            amplitude: 1.0 / eigenpair(1)?.norm_constant,
            center: 0.0,
            width,
            lambda: 0.0,
            phase: 0.0,
            nu: 1,
        })
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - self.width, self.center + self.width)
    }

    fn validate(&self) -> Result<()> {
        let ok = [self.amplitude, self.center, self.lambda, self.phase].iter().all(|v| v.is_finite())
            && self.width > 0.0
            && self.width.is_finite()
            && self.nu >= 1;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("bad stream term {self:?}")))
        }
    }

    /// `(A, A', A'')` for `A(t) = ξ((t-c)/w) cos(λt + φ₀)`.
    fn radial(&self, profile: &Profile, t: f64) -> [f64; 3] {
        let s = (t - self.center) / self.width;
        let [x0, x1, x2] = profile.eval(s);
        if x0 == 0.0 && x1 == 0.0 && x2 == 0.0 {
            return [0.0; 3];
        }
        let (x1, x2) = (x1 / self.width, x2 / (self.width * self.width));
        let (sn, cs) = (self.lambda * t + self.phase).sin_cos();
        let l = self.lambda;
        [
            x0 * cs,
            x1 * cs - l * x0 * sn,
            x2 * cs - 2.0 * l * x1 * sn - l * l * x0 * cs,
        ]
    }
}

fn union_support(terms: &[StreamTerm]) -> Option<(f64, f64)> {
    terms.iter().map(StreamTerm::support).reduce(|a, b| (a.0.min(b.0), a.1.max(b.1)))
}

struct Accum {
    comps: [Array3<f64>; 3],
    d_t: [Array3<f64>; 3],
    d_theta: [Array3<f64>; 3],
}

impl Accum {
    fn new(grid: &Grid) -> Self {
        let z = || Array3::zeros(grid.shape());
        Self {
            comps: std::array::from_fn(|_| z()),
            d_t: std::array::from_fn(|_| z()),
            d_theta: std::array::from_fn(|_| z()),
        }
    }

    fn add(&mut self, c: usize, idx: (usize, usize), n_phi: usize, v: [f64; 3]) {
        for k in 0..n_phi {
            let at = [idx.0, idx.1, k];
            self.comps[c][at] += v[0];
            self.d_t[c][at] += v[1];
            self.d_theta[c][at] += v[2];
        }
    }

    fn finish(self, grid: &Arc<Grid>) -> Result<FieldSample> {
        let [r, t, p] = self.comps;
        FieldSample::new(grid.clone(), r, t, p)?.with_derivatives(FieldDerivatives {
            d_t: self.d_t,
            d_theta: self.d_theta,
            d_phi: None,
        })
    }
}

fn polar_table(grid: &Grid, nu: usize) -> Result<PolarTable> {
    Ok(eigenpair(nu)?.tabulate(&grid.theta))
}

fn add_stream(acc: &mut Accum, grid: &Grid, profile: &Profile, term: &StreamTerm, gamma: f64) -> Result<()> {
    let tab = polar_table(grid, term.nu)?;
    let a = term.amplitude;
    let shift = gamma - 1.5;
    let n_phi = grid.phi.len();
    for (j, &t) in grid.t.iter().enumerate() {
        let [r0, r1, r2] = term.radial(profile, t);
        if r0 == 0.0 && r1 == 0.0 && r2 == 0.0 {
            continue;
        }
        let (b0, b1) = (r1 - shift * r0, r2 - shift * r1);
        for i in 0..grid.theta.len() {
            let (psi, dpsi, big_d) = (tab.psi[i], tab.psi_dtheta[i], tab.big_d[i]);
            // ∂_θ D_θ ψ = -α ψ
            acc.add(0, (j, i), n_phi, [-a * r0 * big_d, -a * r1 * big_d, a * tab.alpha * r0 * psi]);
            acc.add(1, (j, i), n_phi, [a * b0 * psi, a * b1 * psi, a * b0 * dpsi]);
        }
    }
    Ok(())
}

fn add_swirl(acc: &mut Accum, grid: &Grid, profile: &Profile, term: &StreamTerm) -> Result<()> {
    let tab = polar_table(grid, term.nu)?;
    let a = term.amplitude;
    let n_phi = grid.phi.len();
    for (j, &t) in grid.t.iter().enumerate() {
        let [r0, r1, _] = term.radial(profile, t);
        if r0 == 0.0 && r1 == 0.0 {
            continue;
        }
        for i in 0..grid.theta.len() {
            let (psi, dpsi) = (tab.psi[i], tab.psi_dtheta[i]);
            acc.add(2, (j, i), n_phi, [a * r0 * psi, a * r1 * psi, a * r0 * dpsi]);
        }
    }
    Ok(())
}

fn check_terms(terms: &[StreamTerm], grid: &Grid) -> Result<()> {
    terms.iter().try_for_each(StreamTerm::validate)?;
    match union_support(terms) {
        Some((lo, hi)) => grid.require_cover(lo, hi),
        None => Err(Error::ZeroField),
    }
}

/// Swirl-free field `(-σ D_θ + e_θ(∂_t - γ + 3/2)) Σ S_k`.
pub fn build_from_stream(
    terms: &[StreamTerm],
    gamma: f64,
    profile: &Profile,
    grid: &Arc<Grid>,
) -> Result<FieldSample> {
    check_terms(terms, grid)?;
    let mut acc = Accum::new(grid);
    for term in terms {
        add_stream(&mut acc, grid, profile, term, gamma)?;
    }
    acc.finish(grid)
}

/// Axisymmetric swirl `e_φ Σ S_k`.
pub fn build_swirl_from_terms(terms: &[StreamTerm], profile: &Profile, grid: &Arc<Grid>) -> Result<FieldSample> {
    check_terms(terms, grid)?;
    let mut acc = Accum::new(grid);
    for term in terms {
        add_swirl(&mut acc, grid, profile, term)?;
    }
    acc.finish(grid)
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidConfig("n must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// `v_n` from the stream `ξ(t/n) cos(λ_γ t) sin θ`:
/// `v_ρ = -2 cos θ ξ(t/n) cos(λ_γ t)`,
/// `v_θ = sin θ [ξ'(t/n)/n cos(λ_γ t) - λ_γ ξ(t/n) sin(λ_γ t) - (γ - 3/2) ξ(t/n) cos(λ_γ t)]`.
pub fn build_swirlfree_minimizer(n: usize, gamma: f64, profile: &Profile, grid: &Arc<Grid>) -> Result<FieldSample> {
    check_n(n)?;
    let term = StreamTerm { lambda: lambda_gamma(gamma), ..StreamTerm::sin_bump(n as f64)? };
    build_from_stream(&[term], gamma, profile, grid)
}

/// `v_n = e_φ ξ(t/n) sin θ`.
pub fn build_swirl_minimizer(n: usize, profile: &Profile, grid: &Arc<Grid>) -> Result<FieldSample> {
    check_n(n)?;
    build_swirl_from_terms(&[StreamTerm::sin_bump(n as f64)?], profile, grid)
}

/// Axisymmetric swirl `g(t, θ) e_φ` with closed-form derivatives.
pub trait SwirlSource {
    /// `(g, ∂_t g, ∂_θ g)`.
    fn eval(&self, t: f64, theta: f64) -> [f64; 3];

    /// Interval in `t` outside which `g` vanishes.
    fn support(&self) -> (f64, f64);

    fn sample(&self, grid: &Arc<Grid>) -> Result<FieldSample> {
        let (lo, hi) = self.support();
        grid.require_cover(lo, hi)?;
        let mut acc = Accum::new(grid);
        let n_phi = grid.phi.len();
        for (j, &t) in grid.t.iter().enumerate() {
            for (i, &th) in grid.theta.theta.iter().enumerate() {
                acc.add(2, (j, i), n_phi, self.eval(t, th));
            }
        }
        acc.finish(grid)
    }
}

/// Swirl given as a sum of stream terms.
#[derive(Debug, Clone, PartialEq)]
pub struct SwirlProfile {
    pub terms: Vec<StreamTerm>,
    pub profile: Profile,
}

impl SwirlProfile {
    /// `ξ(t/w) sin θ`.
    pub fn sin_bump(width: f64) -> Result<Self> {
        Ok(Self { terms: vec![StreamTerm::sin_bump(width)?], profile: Profile::StandardBump })
    }
}

impl SwirlSource for SwirlProfile {
    fn eval(&self, t: f64, theta: f64) -> [f64; 3] {
        let mut out = [0.0; 3];
        for term in &self.terms {
            let [r0, r1, _] = term.radial(&self.profile, t);
            if r0 == 0.0 && r1 == 0.0 {
                continue;
            }
            let pair = eigenpair(term.nu).expect("validated index");
            let (p, dp) = (pair.psi(theta), pair.psi_dtheta(theta));
            let a = term.amplitude;
            out[0] += a * r0 * p;
            out[1] += a * r1 * p;
            out[2] += a * r0 * dp;
        }
        out
    }

    fn support(&self) -> (f64, f64) {
        union_support(&self.terms).unwrap_or((0.0, 0.0))
    }

    fn sample(&self, grid: &Arc<Grid>) -> Result<FieldSample> {
        build_swirl_from_terms(&self.terms, &self.profile, grid)
    }
}

/// Swirl from user closures returning `(g, ∂_t g, ∂_θ g)`.
pub struct SwirlFn<F> {
    pub f: F,
    pub support: (f64, f64),
}

impl<F: Fn(f64, f64) -> [f64; 3]> SwirlSource for SwirlFn<F> {
    fn eval(&self, t: f64, theta: f64) -> [f64; 3] {
        (self.f)(t, theta)
    }

    fn support(&self) -> (f64, f64) {
        self.support
    }
}

pub fn build_swirl_field(source: &dyn SwirlSource, grid: &Arc<Grid>) -> Result<FieldSample> {
    source.sample(grid)
}

const PHI_TOL: f64 = 1e-12;

/// `n · base + swirl`, where `base` is swirl-free and `swirl` is a pure,
/// `φ`-independent swirl.
pub fn combine(n: f64, base: &FieldSample, swirl: &FieldSample) -> Result<FieldSample> {
    if !base.same_grid(swirl) {
        return Err(Error::GridMismatch);
    }
    if !base.is_swirl_free() {
        return Err(Error::BaseNotSwirlFree);
    }
    if !swirl.is_pure_swirl() {
        return Err(Error::SwirlNotPure);
    }
    let variation = swirl.phi_variation(Component::Phi);
    if variation > PHI_TOL * swirl.max_abs().max(f64::MIN_POSITIVE) {
        return Err(Error::PhiDependentSwirl { variation });
    }
    if swirl.derivatives().and_then(|d| d.d_phi.as_ref()).is_some_and(|dp| dp[2].iter().any(|v| *v != 0.0)) {
        return Err(Error::PhiDependentSwirl { variation });
    }
    base.scaled(n).try_add(swirl)
}

/// Scales a field to unit `∫∫ |v|² dt dσ`.
pub fn normalized(field: &FieldSample) -> Result<FieldSample> {
    let norm = field.norm_sq();
    if norm == 0.0 {
        return Err(Error::ZeroField);
    }
    Ok(field.scaled(1.0 / norm.sqrt()))
}

/// `n ũ_n + g` with `ũ_n` the normalized swirl-free minimizer and `g` the
/// normalized swirl.
pub fn build_combined(
    n: usize,
    gamma: f64,
    profile: &Profile,
    swirl: &dyn SwirlSource,
    grid: &Arc<Grid>,
) -> Result<FieldSample> {
    let base = normalized(&build_swirlfree_minimizer(n, gamma, profile, grid)?)?;
    let g = normalized(&build_swirl_field(swirl, grid)?)?;
    combine(n as f64, &base, &g)
}
