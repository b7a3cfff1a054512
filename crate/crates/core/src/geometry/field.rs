use super::grid::Grid;
use crate::error::{Error, Result};
use ndarray::{Array3, Zip};
use std::sync::Arc;

/// Frame component index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    Rho = 0,
    Theta = 1,
    Phi = 2,
}

impl Component {
    pub const ALL: [Component; 3] = [Component::Rho, Component::Theta, Component::Phi];
}

/// Derivatives carried by analytically constructed fields.
#[derive(Debug, Clone)]
pub struct FieldDerivatives {
    /// `∂_t` of `(u_ρ, u_θ, u_φ)`.
    pub d_t: [Array3<f64>; 3],
    /// `∂_θ` of `(u_ρ, u_θ, u_φ)`.
    pub d_theta: [Array3<f64>; 3],
    /// `∂_φ` of `(u_ρ, u_θ, u_φ)`; `None` for axisymmetric fields.
    pub d_phi: Option<[Array3<f64>; 3]>,
}

impl FieldDerivatives {
    fn map(&self, f: impl Fn(usize, &Array3<f64>) -> Array3<f64>) -> Self {
        Self {
            d_t: std::array::from_fn(|c| f(c, &self.d_t[c])),
            d_theta: std::array::from_fn(|c| f(c, &self.d_theta[c])),
            d_phi: self
                .d_phi
                .as_ref()
                .map(|d| std::array::from_fn(|c| f(c, &d[c]))),
        }
    }
}

/// Frame components `(u_ρ, u_θ, u_φ)` of a vector field on a `(t, θ, φ)` grid.
///
/// Arrays are indexed `[t, θ, φ]`. Fields built from closed-form expressions
/// also carry their exact first derivatives.
#[derive(Debug, Clone)]
pub struct FieldSample {
    grid: Arc<Grid>,
    components: [Array3<f64>; 3],
    derivatives: Option<FieldDerivatives>,
}

fn check_array(grid: &Grid, a: &Array3<f64>, what: &'static str) -> Result<()> {
    let shape = grid.shape();
    if a.shape() != shape {
        return Err(Error::ShapeMismatch { expected: shape, got: a.shape().to_vec() });
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite(what));
    }
    Ok(())
}

impl FieldSample {
    pub fn new(
        grid: Arc<Grid>,
        u_rho: Array3<f64>,
        u_theta: Array3<f64>,
        u_phi: Array3<f64>,
    ) -> Result<Self> {
        check_array(&grid, &u_rho, "u_rho")?;
        check_array(&grid, &u_theta, "u_theta")?;
        check_array(&grid, &u_phi, "u_phi")?;
        Ok(Self { grid, components: [u_rho, u_theta, u_phi], derivatives: None })
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let z = Array3::zeros(grid.shape());
        let derivatives = Some(FieldDerivatives {
            d_t: [z.clone(), z.clone(), z.clone()],
            d_theta: [z.clone(), z.clone(), z.clone()],
            d_phi: None,
        });
        Self { grid, components: [z.clone(), z.clone(), z], derivatives }
    }

    pub fn with_derivatives(mut self, d: FieldDerivatives) -> Result<Self> {
        for a in d.d_t.iter().chain(d.d_theta.iter()) {
            check_array(&self.grid, a, "derivative")?;
        }
        if let Some(dp) = &d.d_phi {
            for a in dp {
                check_array(&self.grid, a, "phi derivative")?;
            }
        }
        self.derivatives = Some(d);
        Ok(self)
    }

    /// Forgets the analytic derivatives so consumers fall back to discrete operators.
    pub fn without_derivatives(mut self) -> Self {
        self.derivatives = None;
        self
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn component(&self, c: Component) -> &Array3<f64> {
        &self.components[c as usize]
    }

    pub fn components(&self) -> &[Array3<f64>; 3] {
        &self.components
    }

    pub fn u_rho(&self) -> &Array3<f64> {
        &self.components[0]
    }

    pub fn u_theta(&self) -> &Array3<f64> {
        &self.components[1]
    }

    pub fn u_phi(&self) -> &Array3<f64> {
        &self.components[2]
    }

    pub fn derivatives(&self) -> Option<&FieldDerivatives> {
        self.derivatives.as_ref()
    }

    pub fn same_grid(&self, other: &FieldSample) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || self.grid.spec == other.grid.spec
    }

    /// Largest deviation of a component from its `φ = 0` slice.
    pub fn phi_variation(&self, c: Component) -> f64 {
        let a = &self.components[c as usize];
        let [nt, nth, nph] = self.grid.shape();
        let mut worst: f64 = 0.0;
        for j in 0..nt {
            for i in 0..nth {
                let base = a[[j, i, 0]];
                for k in 1..nph {
                    worst = worst.max((a[[j, i, k]] - base).abs());
                }
            }
        }
        worst
    }

    /// Largest absolute entry over all components.
    pub fn max_abs(&self) -> f64 {
        self.components
            .iter()
            .flat_map(|a| a.iter())
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn is_axisymmetric(&self, rel_tol: f64) -> bool {
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        Component::ALL.iter().all(|&c| self.phi_variation(c) <= rel_tol * scale)
    }

    pub fn is_swirl_free(&self) -> bool {
        self.components[2].iter().all(|&v| v == 0.0)
    }

    pub fn is_pure_swirl(&self) -> bool {
        self.components[0].iter().chain(self.components[1].iter()).all(|&v| v == 0.0)
    }

    /// `u_φ e_φ`.
    pub fn swirl_part(&self) -> Self {
        self.masked([false, false, true])
    }

    /// `u - u_φ e_φ`.
    pub fn non_swirl_part(&self) -> Self {
        self.masked([true, true, false])
    }

    fn masked(&self, keep: [bool; 3]) -> Self {
        let zero = || Array3::zeros(self.grid.shape());
        let pick = |c: usize, a: &Array3<f64>| if keep[c] { a.clone() } else { zero() };
        Self {
            grid: self.grid.clone(),
            components: std::array::from_fn(|c| pick(c, &self.components[c])),
            derivatives: self.derivatives.as_ref().map(|d| d.map(pick)),
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            components: std::array::from_fn(|c| &self.components[c] * a),
            derivatives: self.derivatives.as_ref().map(|d| d.map(|_, x| x * a)),
        }
    }

    /// Componentwise sum. Analytic derivatives survive only if both operands carry them.
    pub fn try_add(&self, other: &FieldSample) -> Result<Self> {
        if !self.same_grid(other) {
            return Err(Error::GridMismatch);
        }
        let derivatives = match (&self.derivatives, &other.derivatives) {
            (Some(a), Some(b)) => {
                let zero = Array3::<f64>::zeros(self.grid.shape());
                let d_phi = match (&a.d_phi, &b.d_phi) {
                    (None, None) => None,
                    (pa, pb) => Some(std::array::from_fn(|c| {
                        let x = pa.as_ref().map_or(&zero, |p| &p[c]);
                        let y = pb.as_ref().map_or(&zero, |p| &p[c]);
                        x + y
                    })),
                };
                Some(FieldDerivatives {
                    d_t: std::array::from_fn(|c| &a.d_t[c] + &b.d_t[c]),
                    d_theta: std::array::from_fn(|c| &a.d_theta[c] + &b.d_theta[c]),
                    d_phi,
                })
            }
            _ => None,
        };
        Ok(Self {
            grid: self.grid.clone(),
            components: std::array::from_fn(|c| &self.components[c] + &other.components[c]),
            derivatives,
        })
    }

    /// Multiplies every component by `e^{c t}`, updating `∂_t` by the product rule.
    pub fn radially_rescaled(&self, c: f64) -> Self {
        let factor: Vec<f64> = self.grid.t.iter().map(|t| (c * t).exp()).collect();
        let scale = |a: &Array3<f64>| {
            let mut out = a.clone();
            for (j, mut slab) in out.outer_iter_mut().enumerate() {
                slab *= factor[j];
            }
            out
        };
        let derivatives = self.derivatives.as_ref().map(|d| {
            let mut d_t: [Array3<f64>; 3] = std::array::from_fn(|k| &d.d_t[k] + &(&self.components[k] * c));
            d_t.iter_mut().for_each(|a| *a = scale(a));
            FieldDerivatives {
                d_t,
                d_theta: std::array::from_fn(|k| scale(&d.d_theta[k])),
                d_phi: d.d_phi.as_ref().map(|p| std::array::from_fn(|k| scale(&p[k]))),
            }
        });
        Self {
            grid: self.grid.clone(),
            components: std::array::from_fn(|k| scale(&self.components[k])),
            derivatives,
        }
    }

    /// `∫∫ |u|² e^{w t} dt dσ` by the grid quadrature.
    pub fn weighted_norm_sq(&self, w: f64) -> f64 {
        let tw = self.grid.t_weights();
        let mut total = 0.0;
        for (j, t) in self.grid.t.iter().enumerate() {
            let rw = tw[j] * (w * t).exp();
            for i in 0..self.grid.theta.len() {
                let sw = self.grid.sphere_weight(i);
                let mut s = 0.0;
                for k in 0..self.grid.phi.len() {
                    for a in &self.components {
                        s += a[[j, i, k]] * a[[j, i, k]];
                    }
                }
                total += rw * sw * s;
            }
        }
        total
    }

    /// Unweighted `∫∫ |u|² dt dσ`.
    pub fn norm_sq(&self) -> f64 {
        self.weighted_norm_sq(0.0)
    }

    /// True when every entry of every component is finite.
    pub fn is_finite(&self) -> bool {
        self.components.iter().all(|a| a.iter().all(|v| v.is_finite()))
    }
}

/// `max |a - b|` over matching arrays.
pub fn max_abs_diff(a: &Array3<f64>, b: &Array3<f64>) -> f64 {
    let mut m: f64 = 0.0;
    Zip::from(a).and(b).for_each(|x, y| m = m.max((x - y).abs()));
    m
}
