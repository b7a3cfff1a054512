//! Weighted Hardy–Leray quotient
//! `∫ |∇u|² |x|^{2γ} dx / ∫ |u|² |x|^{2γ-2} dx`, evaluated by direct
//! quadrature of the componentwise energy densities and by a log-radial
//! Fourier reduction.
//!
//! In `t = log ρ` both integrals carry the radial weight `e^{(2γ+1)t} dt dσ`.
//! For the transformed field `v = ρ^{γ+1/2} u` that weight is 1 and
//! `quotient_γ(u) = (γ + 1/2)² + quotient_{-1/2}(v)`.

mod direct;
mod experiment;
mod spectral;

pub use direct::{
    direct_energies, gradient_energy_pointwise, hl_quotient_direct, hl_quotient_direct_v, hl_quotient_direct_with,
    DirectEnergies, DirectOptions,
};
pub use experiment::{sharpness_experiment, ExperimentKind, GridPolicy, SharpnessRow, SharpnessTable};
pub use spectral::{
    spectral_quotient, spectral_transform, spectral_transform_with, SpectralField, SpectralOptions,
};

use crate::constants::{c_costin_mazya, c_gamma0, c_leray, c_swirl};
use crate::fields::Level;
use crate::geometry::FieldSample;

/// `v = e^{(γ+1/2)t} u`.
pub fn bv_transform(u: &FieldSample, gamma: f64) -> FieldSample {
    u.radially_rescaled(gamma + 0.5)
}

/// `u = e^{-(γ+1/2)t} v`.
pub fn bv_inverse(v: &FieldSample, gamma: f64) -> FieldSample {
    u_from_v(v, gamma)
}

fn u_from_v(v: &FieldSample, gamma: f64) -> FieldSample {
    v.radially_rescaled(-(gamma + 0.5))
}

/// Which evaluation produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Direct,
    Spectral,
}

impl Route {
    pub fn label(self) -> &'static str {
        match self {
            Route::Direct => "direct",
            Route::Spectral => "spectral",
        }
    }
}

/// `quotient_u - constant(γ)` for each reference constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Margins {
    pub c_leray: f64,
    pub c_costin_mazya: f64,
    pub c_gamma0: f64,
    pub c_swirl: f64,
}

impl Margins {
    pub fn at(gamma: f64, quotient_u: f64) -> Self {
        Self {
            c_leray: quotient_u - c_leray(gamma),
            c_costin_mazya: quotient_u - c_costin_mazya(gamma),
            c_gamma0: quotient_u - c_gamma0(gamma),
            c_swirl: quotient_u - c_swirl(gamma),
        }
    }
}

/// Numerator and denominator split into the swirl and non-swirl parts.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergySplit {
    pub numerator_non_swirl: f64,
    pub numerator_swirl: f64,
    pub denominator_non_swirl: f64,
    pub denominator_swirl: f64,
}

/// One evaluated quotient.
///
/// `numerator`, `denominator` and `quotient` refer to the sample as given:
/// at `Level::Original` the weight is `γ`, at `Level::Transformed` it is
/// `-1/2`. Margins are always taken at the original level.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientReport {
    pub gamma: f64,
    pub level: Level,
    pub numerator: f64,
    pub denominator: f64,
    pub quotient: f64,
    pub margins: Margins,
    pub route: Route,
    pub error_estimate: f64,
    pub split: EnergySplit,
}

impl QuotientReport {
    pub(crate) fn new(gamma: f64, level: Level, route: Route, split: EnergySplit, error_estimate: f64) -> Self {
        let numerator = split.numerator_non_swirl + split.numerator_swirl;
        let denominator = split.denominator_non_swirl + split.denominator_swirl;
        let quotient = numerator / denominator;
        let mut report = Self {
            gamma,
            level,
            numerator,
            denominator,
            quotient,
            margins: Margins::at(gamma, 0.0),
            route,
            error_estimate,
            split,
        };
        report.margins = Margins::at(gamma, report.quotient_u());
        report
    }

    /// Quotient of `u` at weight `γ`.
    pub fn quotient_u(&self) -> f64 {
        match self.level {
            Level::Original => self.quotient,
            Level::Transformed => self.quotient + c_leray(self.gamma),
        }
    }

    /// Quotient of `v` at weight `-1/2`.
    pub fn quotient_v(&self) -> f64 {
        match self.level {
            Level::Original => self.quotient - c_leray(self.gamma),
            Level::Transformed => self.quotient,
        }
    }

    /// Quotient of the non-swirl part alone, at the report's level.
    pub fn quotient_non_swirl(&self) -> Option<f64> {
        let d = self.split.denominator_non_swirl;
        (d > 0.0).then(|| self.split.numerator_non_swirl / d)
    }

    /// Quotient of the swirl part alone, at the report's level.
    pub fn quotient_swirl(&self) -> Option<f64> {
        let d = self.split.denominator_swirl;
        (d > 0.0).then(|| self.split.numerator_swirl / d)
    }

    pub const CSV_HEADER: &'static str = "gamma,level,route,numerator,denominator,quotient,quotient_u,\
margin_c_leray,margin_c_costin_mazya,margin_c_gamma0,margin_c_swirl,error_estimate";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            fmt17(self.gamma),
            self.level.label(),
            self.route.label(),
            fmt17(self.numerator),
            fmt17(self.denominator),
            fmt17(self.quotient),
            fmt17(self.quotient_u()),
            fmt17(self.margins.c_leray),
            fmt17(self.margins.c_costin_mazya),
            fmt17(self.margins.c_gamma0),
            fmt17(self.margins.c_swirl),
            fmt17(self.error_estimate),
        )
    }
}

/// 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}
