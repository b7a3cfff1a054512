use super::{
    build_combined, build_from_stream, build_swirl_from_terms, build_swirl_minimizer, build_swirlfree_minimizer,
    random_admissible_swirlfree, random_axisymmetric_swirl, Profile, StreamTerm, SwirlProfile,
};
use crate::error::{Error, Result};
use crate::geometry::{FieldSample, GridSpec};

/// What to build.
#[derive(Debug, Clone)]
pub enum FieldVariant {
    SwirlFreeMinimizer { n: usize },
    SwirlMinimizer { n: usize },
    /// Swirl-free field from explicit stream terms.
    Stream { terms: Vec<StreamTerm> },
    /// Axisymmetric swirl from explicit stream terms.
    AxisymSwirl { terms: Vec<StreamTerm> },
    /// `n ũ_n + g`, both parts normalized, `g` given by stream terms.
    Combined { n: usize, swirl: Vec<StreamTerm> },
    RandomSwirlFree { seed: u64, complexity: usize },
    RandomSwirl { seed: u64, complexity: usize },
    /// A transformed field sampled elsewhere; its grid must match the spec grid.
    UserSampled(FieldSample),
}

impl FieldVariant {
    pub fn label(&self) -> &'static str {
        match self {
            FieldVariant::SwirlFreeMinimizer { .. } => "swirl_free_minimizer",
            FieldVariant::SwirlMinimizer { .. } => "swirl_minimizer",
            FieldVariant::Stream { .. } => "stream",
            FieldVariant::AxisymSwirl { .. } => "axisym_swirl",
            FieldVariant::Combined { .. } => "combined",
            FieldVariant::RandomSwirlFree { .. } => "random_swirl_free",
            FieldVariant::RandomSwirl { .. } => "random_swirl",
            FieldVariant::UserSampled(_) => "user_sampled",
        }
    }

    /// True when the built field has no swirl part.
    pub fn is_swirl_free(&self) -> bool {
        matches!(
            self,
            FieldVariant::SwirlFreeMinimizer { .. } | FieldVariant::Stream { .. } | FieldVariant::RandomSwirlFree { .. }
        )
    }

    /// True when the built field is a pure swirl.
    pub fn is_pure_swirl(&self) -> bool {
        matches!(
            self,
            FieldVariant::SwirlMinimizer { .. } | FieldVariant::AxisymSwirl { .. } | FieldVariant::RandomSwirl { .. }
        )
    }
}

/// A field request: variant, weight, radial profile and grid.
#[derive(Debug, Clone)]
pub struct FieldSpec {
    pub variant: FieldVariant,
    pub gamma: f64,
    pub profile: Profile,
    pub grid: GridSpec,
}

impl FieldSpec {
    pub fn new(variant: FieldVariant, gamma: f64, grid: GridSpec) -> Self {
        Self { variant, gamma, profile: Profile::StandardBump, grid }
    }

    /// Builds the transformed field `v`.
    pub fn build(&self) -> Result<FieldSample> {
        if !self.gamma.is_finite() {
            return Err(Error::InvalidConfig("gamma must be finite".into()));
        }
        if let FieldVariant::UserSampled(f) = &self.variant {
            if f.grid().spec != self.grid {
                return Err(Error::GridMismatch);
            }
            return Ok(f.clone());
        }
        let grid = self.grid.build()?;
        let (g, p) = (self.gamma, &self.profile);
        match &self.variant {
            FieldVariant::SwirlFreeMinimizer { n } => build_swirlfree_minimizer(*n, g, p, &grid),
            FieldVariant::SwirlMinimizer { n } => build_swirl_minimizer(*n, p, &grid),
            FieldVariant::Stream { terms } => build_from_stream(terms, g, p, &grid),
            FieldVariant::AxisymSwirl { terms } => build_swirl_from_terms(terms, p, &grid),
            FieldVariant::Combined { n, swirl } => {
                let source = SwirlProfile { terms: swirl.clone(), profile: p.clone() };
                build_combined(*n, g, p, &source, &grid)
            }
            FieldVariant::RandomSwirlFree { seed, complexity } => {
                random_admissible_swirlfree(*seed, g, &grid, *complexity)
            }
            FieldVariant::RandomSwirl { seed, complexity } => random_axisymmetric_swirl(*seed, &grid, *complexity),
            FieldVariant::UserSampled(_) => unreachable!("handled above"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::divergence_residual;

    #[test]
    fn every_variant_builds_solenoidal() {
        let grid = GridSpec::symmetric(10.0, 257, 20).unwrap();
        let variants = vec![
            FieldVariant::SwirlFreeMinimizer { n: 4 },
            FieldVariant::SwirlMinimizer { n: 4 },
            FieldVariant::Stream { terms: vec![StreamTerm { nu: 3, lambda: 1.0, ..StreamTerm::sin_bump(3.0).unwrap() }] },
            FieldVariant::AxisymSwirl { terms: vec![StreamTerm::sin_bump(5.0).unwrap()] },
            FieldVariant::Combined { n: 4, swirl: vec![StreamTerm::sin_bump(8.0).unwrap()] },
            FieldVariant::RandomSwirlFree { seed: 1, complexity: 2 },
            FieldVariant::RandomSwirl { seed: 1, complexity: 2 },
        ];
        for v in variants {
            let spec = FieldSpec::new(v.clone(), 0.5, grid);
            let f = spec.build().unwrap();
            assert!(divergence_residual(&f, Some(0.5)).unwrap() < 1e-12, "{}", v.label());
            assert_eq!(f.is_swirl_free(), v.is_swirl_free());
            assert_eq!(f.is_pure_swirl(), v.is_pure_swirl());
        }
    }

    #[test]
    fn user_sampled_grid_must_match() {
        let grid = GridSpec::symmetric(10.0, 65, 12).unwrap();
        let f = FieldSample::zeros(grid.build().unwrap());
        let other = GridSpec::symmetric(11.0, 65, 12).unwrap();
        assert!(FieldSpec::new(FieldVariant::UserSampled(f.clone()), 0.0, grid).build().is_ok());
        assert!(matches!(
            FieldSpec::new(FieldVariant::UserSampled(f), 0.0, other).build(),
            Err(Error::GridMismatch)
        ));
    }
}
