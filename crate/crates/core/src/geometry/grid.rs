use crate::error::{Error, Result};
use crate::quadrature::{barycentric_eval, barycentric_weights, differentiation_matrix, gauss_legendre};
use std::f64::consts::TAU;
use std::sync::Arc;

/// Polar quadrature family, always posed in `x = -cos θ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThetaRule {
    /// One global Gauss–Legendre rule; derivatives from the global interpolant.
    #[default]
    GaussLegendre,
    /// `panels` equal sub-intervals of [-1, 1], each with its own Gauss–Legendre
    /// rule and local interpolant.
    CompositeGaussLegendre { panels: usize },
}

/// Discretization parameters. `t = log ρ` is sampled uniformly, including
/// both end points; `φ` is sampled uniformly on `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub t_min: f64,
    pub t_max: f64,
    pub n_t: usize,
    pub n_theta: usize,
    pub n_phi: usize,
    pub theta_rule: ThetaRule,
}

impl GridSpec {
    pub fn new(t_min: f64, t_max: f64, n_t: usize, n_theta: usize, n_phi: usize) -> Result<Self> {
        let spec = Self {
            t_min,
            t_max,
            n_t,
            n_theta,
            n_phi,
            theta_rule: ThetaRule::GaussLegendre,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Axisymmetric grid on `[-half_width, half_width]`.
    pub fn symmetric(half_width: f64, n_t: usize, n_theta: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n_t, n_theta, 1)
    }

    pub fn with_theta_rule(mut self, rule: ThetaRule) -> Result<Self> {
        self.theta_rule = rule;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_min.is_finite() && self.t_max.is_finite()) || self.t_min >= self.t_max {
            return Err(Error::InvalidGrid(format!(
                "need finite t_min < t_max, got [{}, {}]",
                self.t_min, self.t_max
            )));
        }
        if self.n_t < 2 {
            return Err(Error::GridTooSmall { axis: "t", need: 2, got: self.n_t });
        }
        if self.n_theta < 2 {
            return Err(Error::GridTooSmall { axis: "theta", need: 2, got: self.n_theta });
        }
        if self.n_phi < 1 {
            return Err(Error::GridTooSmall { axis: "phi", need: 1, got: self.n_phi });
        }
        if let ThetaRule::CompositeGaussLegendre { panels } = self.theta_rule {
            if panels == 0 || self.n_theta % panels != 0 || self.n_theta / panels < 2 {
                return Err(Error::InvalidGrid(format!(
                    "{} theta nodes cannot be split into {panels} panels of at least 2 nodes",
                    self.n_theta
                )));
            }
        }
        Ok(())
    }

    pub fn shape(&self) -> [usize; 3] {
        [self.n_t, self.n_theta, self.n_phi]
    }

    pub fn build(&self) -> Result<Arc<Grid>> {
        Grid::new(*self).map(Arc::new)
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Panel {
    pub start: usize,
    pub nodes: Vec<f64>,
    pub bary: Vec<f64>,
    pub diff: Vec<f64>,
}

/// Polar nodes and weights. Nodes are interior, ascending in `x = -cos θ`
/// (hence in `θ`); `weights` integrate in `dx = sin θ dθ`.
#[derive(Debug, Clone)]
pub struct ThetaGrid {
    pub rule: ThetaRule,
    pub x: Vec<f64>,
    pub weights: Vec<f64>,
    pub theta: Vec<f64>,
    pub sin_theta: Vec<f64>,
    pub cos_theta: Vec<f64>,
    pub(crate) panels: Vec<Panel>,
}

impl ThetaGrid {
    pub fn gauss_legendre(n: usize) -> Result<Self> {
        Self::new(n, ThetaRule::GaussLegendre)
    }

    pub fn new(n: usize, rule: ThetaRule) -> Result<Self> {
        if n < 2 {
            return Err(Error::GridTooSmall { axis: "theta", need: 2, got: n });
        }
        let panel_count = match rule {
            ThetaRule::GaussLegendre => 1,
            ThetaRule::CompositeGaussLegendre { panels } => {
                if panels == 0 || n % panels != 0 || n / panels < 2 {
                    return Err(Error::InvalidGrid(format!(
                        "{n} theta nodes cannot be split into {panels} panels"
                    )));
                }
                panels
            }
        };
        let per = n / panel_count;
        let (ref_x, ref_w) = gauss_legendre(per);
        let mut x = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        let mut panels = Vec::with_capacity(panel_count);
        let h = 2.0 / panel_count as f64;
        for p in 0..panel_count {
            let a = -1.0 + h * p as f64;
            let nodes: Vec<f64> = ref_x.iter().map(|r| a + 0.5 * h * (r + 1.0)).collect();
            panels.push(Panel {
                start: p * per,
                bary: barycentric_weights(&nodes),
                diff: differentiation_matrix(&nodes),
                nodes: nodes.clone(),
            });
            x.extend_from_slice(&nodes);
            weights.extend(ref_w.iter().map(|w| 0.5 * h * w));
        }
        let theta: Vec<f64> = x.iter().map(|x: &f64| (-x).acos()).collect();
        // sin θ = sqrt(1 - x²) is more accurate than sin(acos(-x)) near the poles.
        let sin_theta = x.iter().map(|x| ((1.0 - x) * (1.0 + x)).sqrt()).collect();
        let cos_theta = x.iter().map(|x| -x).collect();
        Ok(Self { rule, x, weights, theta, sin_theta, cos_theta, panels })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// `d/dx` of the (panel-wise) polynomial interpolant of `f`.
    pub fn dx(&self, f: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; f.len()];
        for p in &self.panels {
            let m = p.nodes.len();
            let fp = &f[p.start..p.start + m];
            for i in 0..m {
                let row = &p.diff[i * m..(i + 1) * m];
                out[p.start + i] = row.iter().zip(fp).map(|(d, v)| d * v).sum();
            }
        }
        out
    }

    /// Value of the interpolant of `f` at `x` (which may be an end point ±1).
    pub fn interpolate(&self, f: &[f64], x: f64) -> f64 {
        let count = self.panels.len();
        let h = 2.0 / count as f64;
        let idx = (((x + 1.0) / h).floor() as isize).clamp(0, count as isize - 1) as usize;
        let p = &self.panels[idx];
        let m = p.nodes.len();
        barycentric_eval(&p.nodes, &p.bary, &f[p.start..p.start + m], x)
    }

    /// `∫_{S²} f dσ` for an axisymmetric profile sampled at the nodes.
    pub fn integrate_sphere(&self, f: &[f64]) -> f64 {
        TAU * self.weights.iter().zip(f).map(|(w, v)| w * v).sum::<f64>()
    }
}

/// A built grid: node coordinates, weights and polar operators.
#[derive(Debug, Clone)]
pub struct Grid {
    pub spec: GridSpec,
    pub t: Vec<f64>,
    pub dt: f64,
    pub theta: ThetaGrid,
    pub phi: Vec<f64>,
}

impl Grid {
    pub fn new(spec: GridSpec) -> Result<Self> {
        spec.validate()?;
        let dt = (spec.t_max - spec.t_min) / (spec.n_t - 1) as f64;
        let t = (0..spec.n_t).map(|j| spec.t_min + dt * j as f64).collect();
        let theta = ThetaGrid::new(spec.n_theta, spec.theta_rule)?;
        let phi = (0..spec.n_phi).map(|k| TAU * k as f64 / spec.n_phi as f64).collect();
        Ok(Self { spec, t, dt, theta, phi })
    }

    pub fn shape(&self) -> [usize; 3] {
        self.spec.shape()
    }

    /// Trapezoid weights in `t`.
    pub fn t_weights(&self) -> Vec<f64> {
        let n = self.t.len();
        (0..n)
            .map(|j| if j == 0 || j == n - 1 { 0.5 * self.dt } else { self.dt })
            .collect()
    }

    /// Surface weight of node `(i_theta, ·)` for `dσ = sin θ dθ dφ`.
    pub fn sphere_weight(&self, i_theta: usize) -> f64 {
        self.theta.weights[i_theta] * TAU / self.phi.len() as f64
    }

    /// True when `t_min < lo` and `hi < t_max`.
    pub fn covers(&self, lo: f64, hi: f64) -> bool {
        self.spec.t_min < lo && hi < self.spec.t_max
    }

    pub fn require_cover(&self, lo: f64, hi: f64) -> Result<()> {
        if self.covers(lo, hi) {
            Ok(())
        } else {
            Err(Error::SupportNotCovered {
                lo,
                hi,
                t_min: self.spec.t_min,
                t_max: self.spec.t_max,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_specs() {
        assert!(GridSpec::new(1.0, 1.0, 10, 10, 1).is_err());
        assert!(GridSpec::new(0.0, 1.0, 1, 10, 1).is_err());
        assert!(GridSpec::new(0.0, 1.0, 10, 1, 1).is_err());
        assert!(GridSpec::new(0.0, 1.0, 10, 10, 0).is_err());
        let spec = GridSpec::new(0.0, 1.0, 10, 10, 1).unwrap();
        assert!(spec
            .with_theta_rule(ThetaRule::CompositeGaussLegendre { panels: 3 })
            .is_err());
    }

    #[test]
    fn sphere_area() {
        for rule in [ThetaRule::GaussLegendre, ThetaRule::CompositeGaussLegendre { panels: 4 }] {
            let spec = GridSpec::new(0.0, 1.0, 4, 16, 3).unwrap().with_theta_rule(rule).unwrap();
            let g = spec.build().unwrap();
            let area: f64 = (0..16).map(|i| g.sphere_weight(i) * 3.0).sum();
            assert!((area - 2.0 * TAU).abs() < 1e-13);
        }
    }

    #[test]
    fn composite_derivative_and_interpolation() {
        let tg = ThetaGrid::new(24, ThetaRule::CompositeGaussLegendre { panels: 3 }).unwrap();
        let f: Vec<f64> = tg.x.iter().map(|x| x.powi(5) - x).collect();
        let d = tg.dx(&f);
        for (x, d) in tg.x.iter().zip(d) {
            assert!((d - (5.0 * x.powi(4) - 1.0)).abs() < 1e-11);
        }
        for x in [-1.0, -0.4, 0.2, 1.0] {
            assert!((tg.interpolate(&f, x) - (x.powi(5) - x)).abs() < 1e-12);
        }
    }
}
