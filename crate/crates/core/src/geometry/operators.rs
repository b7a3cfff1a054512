use super::field::{FieldDerivatives, FieldSample};
use super::grid::{Grid, ThetaGrid};
use crate::error::{Error, Result};
use ndarray::{Array3, Axis};
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::TAU;

/// How a polar profile behaves at the poles.
///
/// `Scalar` profiles (e.g. `u_ρ`) are smooth functions of `x = -cos θ` and are
/// interpolated directly. `Tangential` profiles (`u_θ`, `u_φ`) vanish like
/// `sin θ`; they are handled through the interpolant of `f / sin θ`, which
/// keeps `cot θ · f` bounded up to the poles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngularKind {
    Scalar,
    Tangential,
}

/// Discrete `∂_t` on the uniform log-radial grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TDerivative {
    /// Fourth-order central differences with one-sided fourth-order closures.
    #[default]
    FiniteDifference4,
    /// Fourier differentiation of the zero-padded samples; assumes the
    /// profile vanishes at both ends of the window.
    Spectral,
}

fn divide_by_sin(theta: &ThetaGrid, f: &[f64]) -> Vec<f64> {
    f.iter().zip(&theta.sin_theta).map(|(v, s)| v / s).collect()
}

/// `∂_θ f` at the polar nodes.
pub fn d_theta(theta: &ThetaGrid, f: &[f64], kind: AngularKind) -> Result<Vec<f64>> {
    check_len(theta, f)?;
    Ok(match kind {
        AngularKind::Scalar => {
            let dfx = theta.dx(f);
            dfx.iter().zip(&theta.sin_theta).map(|(d, s)| d * s).collect()
        }
        AngularKind::Tangential => {
            // f = g sin θ  ⇒  ∂_θ f = (1 - x²) g' - x g
            let g = divide_by_sin(theta, f);
            let dg = theta.dx(&g);
            (0..f.len())
                .map(|i| {
                    let x = theta.x[i];
                    (1.0 - x * x) * dg[i] - x * g[i]
                })
                .collect()
        }
    })
}

/// `D_θ f = ∂_θ f + cot θ · f` at the polar nodes.
pub fn big_d_theta(theta: &ThetaGrid, f: &[f64], kind: AngularKind) -> Result<Vec<f64>> {
    check_len(theta, f)?;
    Ok(match kind {
        AngularKind::Scalar => {
            let d = d_theta(theta, f, kind)?;
            (0..f.len())
                .map(|i| d[i] + theta.cos_theta[i] / theta.sin_theta[i] * f[i])
                .collect()
        }
        AngularKind::Tangential => {
            // f = g sin θ  ⇒  D_θ f = (1 - x²) g' - 2 x g
            let g = divide_by_sin(theta, f);
            let dg = theta.dx(&g);
            (0..f.len())
                .map(|i| {
                    let x = theta.x[i];
                    (1.0 - x * x) * dg[i] - 2.0 * x * g[i]
                })
                .collect()
        }
    })
}

/// `T_θ f = ∂_θ D_θ f` for a tangential profile.
pub fn t_theta(theta: &ThetaGrid, f: &[f64]) -> Result<Vec<f64>> {
    let d = big_d_theta(theta, f, AngularKind::Tangential)?;
    d_theta(theta, &d, AngularKind::Scalar)
}

/// Limits of `cot θ · f` at `θ = 0` and `θ = π` for a tangential profile,
/// taken from the interpolant of `f / sin θ`.
pub fn pole_cot_limits(theta: &ThetaGrid, f: &[f64]) -> Result<(f64, f64)> {
    check_len(theta, f)?;
    let g = divide_by_sin(theta, f);
    // cos θ = -x: +1 at x = -1 (θ = 0), -1 at x = 1 (θ = π).
    Ok((theta.interpolate(&g, -1.0), -theta.interpolate(&g, 1.0)))
}

fn check_len(theta: &ThetaGrid, f: &[f64]) -> Result<()> {
    if f.len() != theta.len() {
        return Err(Error::ShapeMismatch { expected: [1, theta.len(), 1], got: vec![f.len()] });
    }
    if theta.len() < 2 {
        return Err(Error::GridTooSmall { axis: "theta", need: 2, got: theta.len() });
    }
    Ok(())
}

/// Applies a polar operator to every `(t, φ)` line of a field array.
pub fn theta_field_op<F>(grid: &Grid, a: &Array3<f64>, op: F) -> Result<Array3<f64>>
where
    F: Fn(&ThetaGrid, &[f64]) -> Result<Vec<f64>>,
{
    let mut out = Array3::zeros(a.raw_dim());
    let [nt, _, nph] = grid.shape();
    for j in 0..nt {
        for k in 0..nph {
            let line: Vec<f64> = a.slice(ndarray::s![j, .., k]).to_vec();
            let d = op(&grid.theta, &line)?;
            for (i, v) in d.into_iter().enumerate() {
                out[[j, i, k]] = v;
            }
        }
    }
    Ok(out)
}

const FD4_MIN_NODES: usize = 5;

/// `∂_t f` for one radial line.
pub fn d_t(grid: &Grid, f: &[f64], method: TDerivative) -> Result<Vec<f64>> {
    if f.len() != grid.t.len() {
        return Err(Error::ShapeMismatch { expected: [grid.t.len(), 1, 1], got: vec![f.len()] });
    }
    match method {
        TDerivative::FiniteDifference4 => fd4(f, grid.dt),
        TDerivative::Spectral => {
            let mut sd = SpectralDt::new(f.len(), grid.dt);
            Ok(sd.apply(f))
        }
    }
}

fn fd4(f: &[f64], h: f64) -> Result<Vec<f64>> {
    let n = f.len();
    if n < FD4_MIN_NODES {
        return Err(Error::GridTooSmall { axis: "t", need: FD4_MIN_NODES, got: n });
    }
    let c = 1.0 / (12.0 * h);
    let mut d = vec![0.0; n];
    d[0] = c * (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]);
    d[1] = c * (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]);
    for j in 2..n - 2 {
        d[j] = c * (f[j - 2] - 8.0 * f[j - 1] + 8.0 * f[j + 1] - f[j + 2]);
    }
    d[n - 2] = -c * (-3.0 * f[n - 1] - 10.0 * f[n - 2] + 18.0 * f[n - 3] - 6.0 * f[n - 4] + f[n - 5]);
    d[n - 1] = -c
        * (-25.0 * f[n - 1] + 48.0 * f[n - 2] - 36.0 * f[n - 3] + 16.0 * f[n - 4] - 3.0 * f[n - 5]);
    Ok(d)
}

struct SpectralDt {
    n: usize,
    m: usize,
    dt: f64,
    fwd: std::sync::Arc<dyn rustfft::Fft<f64>>,
    inv: std::sync::Arc<dyn rustfft::Fft<f64>>,
    buf: Vec<Complex64>,
}

impl SpectralDt {
    fn new(n: usize, dt: f64) -> Self {
        let m = (2 * n).next_power_of_two();
        let mut planner = FftPlanner::new();
        Self {
            n,
            m,
            dt,
            fwd: planner.plan_fft_forward(m),
            inv: planner.plan_fft_inverse(m),
            buf: vec![Complex64::new(0.0, 0.0); m],
        }
    }

    fn apply(&mut self, f: &[f64]) -> Vec<f64> {
        let m = self.m;
        self.buf.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        for (z, &v) in self.buf.iter_mut().zip(f) {
            z.re = v;
        }
        self.fwd.process(&mut self.buf);
        let dl = TAU / (m as f64 * self.dt);
        for (k, z) in self.buf.iter_mut().enumerate() {
            let kk = if k < m / 2 {
                k as f64
            } else if k == m / 2 {
                0.0
            } else {
                k as f64 - m as f64
            };
            *z *= Complex64::new(0.0, kk * dl);
        }
        self.inv.process(&mut self.buf);
        self.buf[..self.n].iter().map(|z| z.re / m as f64).collect()
    }
}

/// `∂_t` applied along the radial axis of a field array.
pub fn d_t_field(grid: &Grid, a: &Array3<f64>, method: TDerivative) -> Result<Array3<f64>> {
    let mut out = Array3::zeros(a.raw_dim());
    let mut spectral = match method {
        TDerivative::Spectral => Some(SpectralDt::new(grid.t.len(), grid.dt)),
        TDerivative::FiniteDifference4 => None,
    };
    for (mut o, line) in out.lanes_mut(Axis(0)).into_iter().zip(a.lanes(Axis(0))) {
        let f = line.to_vec();
        let d = match spectral.as_mut() {
            Some(s) => s.apply(&f),
            None => fd4(&f, grid.dt)?,
        };
        o.iter_mut().zip(d).for_each(|(x, v)| *x = v);
    }
    Ok(out)
}

/// `∂_φ` by Fourier differentiation along the periodic azimuthal axis.
pub fn d_phi_field(grid: &Grid, a: &Array3<f64>) -> Array3<f64> {
    let n = grid.phi.len();
    let mut out = Array3::zeros(a.raw_dim());
    if n == 1 {
        return out;
    }
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (mut o, line) in out.lanes_mut(Axis(2)).into_iter().zip(a.lanes(Axis(2))) {
        for (z, &v) in buf.iter_mut().zip(line.iter()) {
            *z = Complex64::new(v, 0.0);
        }
        fwd.process(&mut buf);
        for (k, z) in buf.iter_mut().enumerate() {
            let kk = if 2 * k < n {
                k as f64
            } else if 2 * k == n {
                0.0
            } else {
                k as f64 - n as f64
            };
            *z *= Complex64::new(0.0, kk);
        }
        inv.process(&mut buf);
        o.iter_mut().zip(&buf).for_each(|(x, z)| *x = z.re / n as f64);
    }
    out
}

/// Analytic derivatives when the field carries them, discrete ones otherwise.
/// `u_ρ` is treated as a scalar profile, `u_θ` and `u_φ` as tangential ones.
pub fn resolve_derivatives(field: &FieldSample, method: TDerivative) -> Result<FieldDerivatives> {
    if let Some(d) = field.derivatives() {
        return Ok(d.clone());
    }
    let grid = field.grid();
    let comps = field.components();
    let d_t = [
        d_t_field(grid, &comps[0], method)?,
        d_t_field(grid, &comps[1], method)?,
        d_t_field(grid, &comps[2], method)?,
    ];
    let d_theta = [
        theta_field_op(grid, &comps[0], |th, f| d_theta(th, f, AngularKind::Scalar))?,
        theta_field_op(grid, &comps[1], |th, f| d_theta(th, f, AngularKind::Tangential))?,
        theta_field_op(grid, &comps[2], |th, f| d_theta(th, f, AngularKind::Tangential))?,
    ];
    let d_phi = if grid.phi.len() > 1 {
        Some([
            d_phi_field(grid, &comps[0]),
            d_phi_field(grid, &comps[1]),
            d_phi_field(grid, &comps[2]),
        ])
    } else {
        None
    };
    Ok(FieldDerivatives { d_t, d_theta, d_phi })
}

/// `ρ div u = (∂_t + 2) u_ρ + D_θ u_θ + đ_φ u_φ` at every node.
///
/// With `gamma_weight = Some(γ)` the sample is read as the transformed field
/// `v = ρ^{γ+1/2} u` and the result is `ρ^{γ+1/2} · ρ div u
/// = (∂_t - γ + 3/2) v_ρ + D_θ v_θ + đ_φ v_φ`.
pub fn divergence(field: &FieldSample, gamma_weight: Option<f64>) -> Result<Array3<f64>> {
    divergence_with(field, gamma_weight, TDerivative::default())
}

pub fn divergence_with(
    field: &FieldSample,
    gamma_weight: Option<f64>,
    method: TDerivative,
) -> Result<Array3<f64>> {
    let grid = field.grid();
    let d = resolve_derivatives(field, method)?;
    let [nt, nth, nph] = grid.shape();
    let shift = gamma_weight.map_or(0.0, |g| g + 0.5);
    let (ur, ut) = (field.u_rho(), field.u_theta());
    let mut out = Array3::zeros(grid.shape());
    for j in 0..nt {
        for i in 0..nth {
            let s = grid.theta.sin_theta[i];
            let cot = grid.theta.cos_theta[i] / s;
            for k in 0..nph {
                let idx = [j, i, k];
                let mut v = d.d_t[0][idx] + (2.0 - shift) * ur[idx];
                v += d.d_theta[1][idx] + cot * ut[idx];
                if let Some(dp) = &d.d_phi {
                    v += dp[2][idx] / s;
                }
                out[idx] = v;
            }
        }
    }
    Ok(out)
}

/// `‖ρ div u‖ / ‖u‖` in the unweighted grid `L²(dt dσ)` norm.
pub fn divergence_residual(field: &FieldSample, gamma_weight: Option<f64>) -> Result<f64> {
    divergence_residual_with(field, gamma_weight, TDerivative::default())
}

pub fn divergence_residual_with(
    field: &FieldSample,
    gamma_weight: Option<f64>,
    method: TDerivative,
) -> Result<f64> {
    let div = divergence_with(field, gamma_weight, method)?;
    let norm = field.norm_sq();
    if norm == 0.0 {
        return Err(Error::ZeroField);
    }
    let grid = field.grid();
    let tw = grid.t_weights();
    let mut acc = 0.0;
    for ((j, i, _), v) in div.indexed_iter() {
        acc += tw[j] * grid.sphere_weight(i) * v * v;
    }
    Ok((acc / norm).sqrt())
}
