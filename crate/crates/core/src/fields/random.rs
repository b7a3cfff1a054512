use super::{build_from_stream, build_swirl_from_terms, Profile, StreamTerm};
use crate::error::{Error, Result};
use crate::geometry::{FieldSample, Grid};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;
use std::sync::Arc;

const MAX_DRAWS: usize = 16;
const MAX_LAMBDA: f64 = 2.5;
const MAX_NU: usize = 6;

/// Random stream terms whose supports fit strictly inside the grid window.
pub fn random_stream_terms<R: Rng>(rng: &mut R, grid: &Grid, complexity: usize) -> Result<Vec<StreamTerm>> {
    if complexity == 0 {
        return Err(Error::InvalidConfig("complexity must be at least 1".into()));
    }
    let (t_min, t_max) = (grid.spec.t_min, grid.spec.t_max);
    let span = t_max - t_min;
    let margin = 0.05 * span;
    let w_min = (span / 16.0).max(24.0 * grid.dt);
    let w_max = span / 4.0;
    if w_min > w_max {
        return Err(Error::InvalidGrid(format!("t-step {} too coarse for random fields", grid.dt)));
    }
    let nu_max = ((grid.theta.len().saturating_sub(8)) / 2).clamp(1, MAX_NU);
    Ok((0..complexity)
        .map(|_| {
            let width = rng.random_range(w_min..=w_max);
            let lo = t_min + margin + width;
            let hi = t_max - margin - width;
            StreamTerm {
                amplitude: rng.random_range(-1.0..=1.0),
                center: rng.random_range(lo..=hi),
                width,
                lambda: rng.random_range(-MAX_LAMBDA..=MAX_LAMBDA),
                phase: rng.random_range(0.0..TAU),
                nu: rng.random_range(1..=nu_max),
            }
        })
        .collect())
}

fn draw<F>(seed: u64, grid: &Arc<Grid>, complexity: usize, build: F) -> Result<FieldSample>
where
    F: Fn(&[StreamTerm]) -> Result<FieldSample>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_DRAWS {
        let terms = random_stream_terms(&mut rng, grid, complexity)?;
        if terms.iter().all(|t| t.amplitude.abs() < 1e-3) {
            continue;
        }
        let field = build(&terms)?;
        if field.norm_sq() > 0.0 {
            return Ok(field);
        }
    }
    Err(Error::ZeroField)
}

/// Random solenoidal swirl-free field, reproducible from `seed`.
pub fn random_admissible_swirlfree(
    seed: u64,
    gamma: f64,
    grid: &Arc<Grid>,
    complexity: usize,
) -> Result<FieldSample> {
    draw(seed, grid, complexity, |terms| {
        build_from_stream(terms, gamma, &Profile::StandardBump, grid)
    })
}

/// Random axisymmetric swirl field, reproducible from `seed`.
pub fn random_axisymmetric_swirl(seed: u64, grid: &Arc<Grid>, complexity: usize) -> Result<FieldSample> {
    draw(seed, grid, complexity, |terms| {
        build_swirl_from_terms(terms, &Profile::StandardBump, grid)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{divergence_residual, GridSpec};

    #[test]
    fn reproducible_and_solenoidal() {
        let g = GridSpec::symmetric(10.0, 513, 24).unwrap().build().unwrap();
        let a = random_admissible_swirlfree(7, 0.5, &g, 3).unwrap();
        let b = random_admissible_swirlfree(7, 0.5, &g, 3).unwrap();
        assert_eq!(a.u_rho(), b.u_rho());
        assert!(a.is_swirl_free());
        assert!(divergence_residual(&a, Some(0.5)).unwrap() < 1e-12);
        let c = random_admissible_swirlfree(8, 0.5, &g, 3).unwrap();
        assert_ne!(a.u_rho(), c.u_rho());
        let s = random_axisymmetric_swirl(3, &g, 2).unwrap();
        assert!(s.is_pure_swirl());
    }

    #[test]
    fn coarse_grid_rejected() {
        let g = GridSpec::symmetric(10.0, 33, 12).unwrap().build().unwrap();
        assert!(random_admissible_swirlfree(1, 0.0, &g, 2).is_err());
        let g = GridSpec::symmetric(10.0, 513, 12).unwrap().build().unwrap();
        assert!(random_admissible_swirlfree(1, 0.0, &g, 0).is_err());
    }
}
