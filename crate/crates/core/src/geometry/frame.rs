use crate::error::{Error, Result};
use std::f64::consts::{PI, TAU};

pub type Vec3 = [f64; 3];

pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(a: f64, x: &Vec3, y: &Vec3) -> Vec3 {
    [a * x[0] + y[0], a * x[1] + y[1], a * x[2] + y[2]]
}

/// A point of the unit sphere, `theta ∈ [0, π]`, `phi ∈ [0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalDirection {
    theta: f64,
    phi: f64,
}

impl SphericalDirection {
    /// Validates `theta` and wraps `phi` into `[0, 2π)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::InvalidDirection(format!(
                "non-finite angle (theta = {theta}, phi = {phi})"
            )));
        }
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidDirection(format!(
                "theta = {theta} outside [0, pi]"
            )));
        }
        let mut phi = phi.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        Ok(Self { theta, phi })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    fn at_pole(&self) -> bool {
        self.theta.sin().abs() < 1e-300 || self.theta == 0.0 || self.theta == PI
    }
}

/// Orthonormal, right-handed frame `(σ, e_θ, e_φ)` at a direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub sigma: Vec3,
    pub e_theta: Vec3,
    pub e_phi: Vec3,
}

impl Frame {
    /// Cartesian vector with frame components `(a_ρ, a_θ, a_φ)`.
    pub fn to_cartesian(&self, components: [f64; 3]) -> Vec3 {
        let mut out = [0.0; 3];
        for i in 0..3 {
            out[i] = components[0] * self.sigma[i]
                + components[1] * self.e_theta[i]
                + components[2] * self.e_phi[i];
        }
        out
    }

    /// Frame components of a Cartesian vector.
    pub fn components_of(&self, v: &Vec3) -> [f64; 3] {
        [dot(v, &self.sigma), dot(v, &self.e_theta), dot(v, &self.e_phi)]
    }
}

pub fn frame(dir: SphericalDirection) -> Frame {
    let (st, ct) = dir.theta.sin_cos();
    let (sp, cp) = dir.phi.sin_cos();
    Frame {
        sigma: [ct, st * cp, st * sp],
        e_theta: [-st, ct * cp, ct * sp],
        e_phi: [0.0, -sp, cp],
    }
}

/// Derivatives of the three frame vectors along one coordinate direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameDerivative {
    pub d_sigma: Vec3,
    pub d_e_theta: Vec3,
    pub d_e_phi: Vec3,
}

/// `∂_θ` of the frame: `∂_θ σ = e_θ`, `∂_θ e_θ = -σ`, `∂_θ e_φ = 0`.
pub fn frame_theta_derivative(dir: SphericalDirection) -> FrameDerivative {
    let f = frame(dir);
    FrameDerivative {
        d_sigma: f.e_theta,
        d_e_theta: f.sigma.map(|v| -v),
        d_e_phi: [0.0; 3],
    }
}

/// `(1/sin θ) ∂_φ` of the frame: `σ ↦ e_φ`, `e_θ ↦ e_φ cot θ`,
/// `e_φ ↦ -σ - e_θ cot θ`. Undefined on the polar axis.
pub fn frame_phi_derivative(dir: SphericalDirection) -> Result<FrameDerivative> {
    if dir.at_pole() {
        return Err(Error::PoleEvaluation { theta: dir.theta });
    }
    let f = frame(dir);
    let cot = dir.theta.cos() / dir.theta.sin();
    let neg_sigma = f.sigma.map(|v| -v);
    Ok(FrameDerivative {
        d_sigma: f.e_phi,
        d_e_theta: f.e_phi.map(|v| v * cot),
        d_e_phi: axpy(-cot, &f.e_theta, &neg_sigma),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn close(a: &Vec3, b: &Vec3, tol: f64) -> bool {
        (0..3).all(|i| (a[i] - b[i]).abs() <= tol)
    }

    #[test]
    fn frame_at_reference_directions() {
        let f = frame(SphericalDirection::new(0.0, 0.0).unwrap());
        assert!(close(&f.sigma, &[1.0, 0.0, 0.0], 1e-15));
        assert!(close(&f.e_theta, &[0.0, 1.0, 0.0], 1e-15));
        assert!(close(&f.e_phi, &[0.0, 0.0, 1.0], 1e-15));

        let f = frame(SphericalDirection::new(FRAC_PI_2, 0.0).unwrap());
        assert!(close(&f.sigma, &[0.0, 1.0, 0.0], 1e-15));
        assert!(close(&f.e_theta, &[-1.0, 0.0, 0.0], 1e-15));
        assert!(close(&f.e_phi, &[0.0, 0.0, 1.0], 1e-15));

        let f = frame(SphericalDirection::new(FRAC_PI_2, FRAC_PI_2).unwrap());
        assert!(close(&f.sigma, &[0.0, 0.0, 1.0], 1e-15));
        assert!(close(&f.e_theta, &[-1.0, 0.0, 0.0], 1e-15));
        assert!(close(&f.e_phi, &[0.0, -1.0, 0.0], 1e-15));
    }

    #[test]
    fn theta_derivative_examples() {
        let dir = SphericalDirection::new(0.0, 0.0).unwrap();
        let d = frame_theta_derivative(dir);
        assert_eq!(d.d_e_phi, [0.0; 3]);
        assert!(close(&d.d_e_theta, &[-1.0, 0.0, 0.0], 1e-15));
    }

    #[test]
    fn phi_derivative_at_equator() {
        let dir = SphericalDirection::new(FRAC_PI_2, 0.0).unwrap();
        let d = frame_phi_derivative(dir).unwrap();
        assert!(close(&d.d_e_phi, &[0.0, -1.0, 0.0], 1e-15));
    }

    #[test]
    fn phi_derivative_rejects_poles() {
        for theta in [0.0, PI] {
            let dir = SphericalDirection::new(theta, 1.0).unwrap();
            assert!(matches!(
                frame_phi_derivative(dir),
                Err(Error::PoleEvaluation { .. })
            ));
        }
    }

    #[test]
    fn direction_validation() {
        assert!(SphericalDirection::new(-0.1, 0.0).is_err());
        assert!(SphericalDirection::new(3.2, 0.0).is_err());
        assert!(SphericalDirection::new(f64::NAN, 0.0).is_err());
        let d = SphericalDirection::new(1.0, -FRAC_PI_2).unwrap();
        assert!((d.phi() - 1.5 * PI).abs() < 1e-15);
        let d = SphericalDirection::new(1.0, 2.0 * TAU).unwrap();
        assert!(d.phi() < TAU && d.phi() >= 0.0);
    }
}
