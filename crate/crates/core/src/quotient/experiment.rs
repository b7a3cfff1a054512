use super::{bv_inverse, fmt17, hl_quotient_direct, hl_quotient_direct_v, spectral_quotient, spectral_transform_with};
use super::SpectralOptions;
use crate::constants::{c_gamma0, c_leray, c_swirl};
use crate::error::{Error, Result};
use crate::fields::{build_combined, build_swirl_minimizer, build_swirlfree_minimizer, Level, Profile, SwirlProfile};
use crate::geometry::{FieldSample, GridSpec};
use rayon::prelude::*;
use std::str::FromStr;

/// Which minimizing sequence to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    SwirlFree,
    Swirl,
    Combined,
}

impl ExperimentKind {
    pub fn label(self) -> &'static str {
        match self {
            ExperimentKind::SwirlFree => "swirl_free",
            ExperimentKind::Swirl => "swirl",
            ExperimentKind::Combined => "combined",
        }
    }

    /// Limit of the quotient along the sequence.
    pub fn target(self, gamma: f64, level: Level) -> f64 {
        let u = match self {
            ExperimentKind::SwirlFree | ExperimentKind::Combined => c_gamma0(gamma),
            ExperimentKind::Swirl => c_swirl(gamma),
        };
        match level {
            Level::Original => u,
            Level::Transformed => u - c_leray(gamma),
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "swirl_free" | "swirl-free" => Ok(ExperimentKind::SwirlFree),
            "swirl" => Ok(ExperimentKind::Swirl),
            "combined" => Ok(ExperimentKind::Combined),
            other => Err(Error::InvalidConfig(format!("unknown experiment kind `{other}`"))),
        }
    }
}

/// How the grid grows with `n`: step `clamp(n / points_per_n, dt_min, dt_max)`,
/// window `[-L, L]` with `L = (1 + margin) · support + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPolicy {
    pub dt_min: f64,
    pub dt_max: f64,
    pub points_per_n: f64,
    pub margin: f64,
    pub n_theta: usize,
    /// Width of the fixed swirl `ξ(t/w) sin θ` in combined runs.
    pub swirl_width: f64,
}

impl Default for GridPolicy {
    fn default() -> Self {
        Self { dt_min: 0.025, dt_max: 0.05, points_per_n: 160.0, margin: 0.05, n_theta: 24, swirl_width: 8.0 }
    }
}

impl GridPolicy {
    pub fn grid_for(&self, support: f64) -> Result<GridSpec> {
        if !(self.dt_min > 0.0 && self.dt_max >= self.dt_min && self.points_per_n > 0.0 && self.margin >= 0.0) {
            return Err(Error::InvalidConfig(format!("bad grid policy {self:?}")));
        }
        let dt = (support / self.points_per_n).clamp(self.dt_min, self.dt_max);
        let half = (1.0 + self.margin) * support + 1.0;
        let n_t = 2 * (half / dt).ceil() as usize + 1;
        GridSpec::symmetric(half, n_t, self.n_theta)
    }
}

/// One `n` of a sharpness run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharpnessRow {
    pub n: usize,
    pub direct: f64,
    pub spectral: f64,
    pub target: f64,
    /// `direct - target`.
    pub gap: f64,
    /// `gap / target`.
    pub rel_gap: f64,
    /// `|direct - spectral| / |direct|`.
    pub route_rel_diff: f64,
    pub error_estimate: f64,
    pub n_t: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SharpnessTable {
    pub kind: ExperimentKind,
    pub gamma: f64,
    pub level: Level,
    pub rows: Vec<SharpnessRow>,
    /// Gaps positive and non-increasing up to the numerical floor.
    pub monotone: bool,
    /// `log(gap_{k}/gap_{k+1}) / log(n_{k+1}/n_k)` over the last two rows.
    pub empirical_order: Option<f64>,
}

impl SharpnessTable {
    pub const CSV_HEADER: &'static str =
        "kind,gamma,level,n,n_t,quotient_direct,quotient_spectral,target,gap,rel_gap,route_rel_diff,error_estimate";

    pub fn csv_rows(&self) -> Vec<String> {
        self.rows
            .iter()
            .map(|r| {
                format!(
                    "{},{},{},{},{},{},{},{},{},{},{},{}",
                    self.kind.label(),
                    fmt17(self.gamma),
                    self.level.label(),
                    r.n,
                    r.n_t,
                    fmt17(r.direct),
                    fmt17(r.spectral),
                    fmt17(r.target),
                    fmt17(r.gap),
                    fmt17(r.rel_gap),
                    fmt17(r.route_rel_diff),
                    fmt17(r.error_estimate),
                )
            })
            .collect()
    }

    pub fn last(&self) -> Option<&SharpnessRow> {
        self.rows.last()
    }
}

fn build(kind: ExperimentKind, n: usize, gamma: f64, policy: &GridPolicy) -> Result<FieldSample> {
    let p = Profile::StandardBump;
    let support = match kind {
        ExperimentKind::Combined => (n as f64).max(policy.swirl_width),
        _ => n as f64,
    };
    let grid = policy.grid_for(support)?.build()?;
    match kind {
        ExperimentKind::SwirlFree => build_swirlfree_minimizer(n, gamma, &p, &grid),
        ExperimentKind::Swirl => build_swirl_minimizer(n, &p, &grid),
        ExperimentKind::Combined => {
            build_combined(n, gamma, &p, &SwirlProfile::sin_bump(policy.swirl_width)?, &grid)
        }
    }
}

fn row(kind: ExperimentKind, n: usize, gamma: f64, level: Level, policy: &GridPolicy) -> Result<SharpnessRow> {
    let v = build(kind, n, gamma, policy)?;
    let (direct, error_estimate) = match level {
        Level::Transformed => {
            let r = hl_quotient_direct_v(&v, gamma)?;
            (r.quotient, r.error_estimate)
        }
        Level::Original => {
            let r = hl_quotient_direct(&bv_inverse(&v, gamma), gamma)?;
            (r.quotient, r.error_estimate)
        }
    };
    let sf = spectral_transform_with(&v, gamma, &SpectralOptions { nu_max: Some(4), ..Default::default() })?;
    let sq = spectral_quotient(&sf, gamma)?;
    let spectral = match level {
        Level::Transformed => sq.quotient_v(),
        Level::Original => sq.quotient_u(),
    };
    let target = kind.target(gamma, level);
    let gap = direct - target;
    Ok(SharpnessRow {
        n,
        direct,
        spectral,
        target,
        gap,
        rel_gap: gap / target.abs(),
        route_rel_diff: (direct - spectral).abs() / direct.abs(),
        error_estimate,
        n_t: v.grid().t.len(),
    })
}

/// Quotients of a minimizing sequence by both routes, with gaps to the limit.
pub fn sharpness_experiment(
    kind: ExperimentKind,
    gamma: f64,
    n_list: &[usize],
    level: Level,
    policy: &GridPolicy,
) -> Result<SharpnessTable> {
    if n_list.is_empty() || n_list.windows(2).any(|w| w[1] <= w[0]) || n_list[0] == 0 {
        return Err(Error::InvalidConfig("n_list must be non-empty, positive and increasing".into()));
    }
    let rows = n_list
        .par_iter()
        .map(|&n| row(kind, n, gamma, level, policy))
        .collect::<Result<Vec<_>>>()?;
    let floor = |r: &SharpnessRow| 1e-9 * r.target.abs().max(1.0) + r.error_estimate;
    let positive = rows.iter().all(|r| r.gap > -floor(r));
    let decreasing = rows.windows(2).all(|w| w[1].gap <= w[0].gap + floor(&w[1]));
    let empirical_order = match rows.as_slice() {
        [.., a, b] if a.gap > 0.0 && b.gap > 0.0 => {
            Some((a.gap / b.gap).ln() / (b.n as f64 / a.n as f64).ln())
        }
        _ => None,
    };
    Ok(SharpnessTable { kind, gamma, level, rows, monotone: positive && decreasing, empirical_order })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policy_grids_cover_support() {
        let p = GridPolicy::default();
        let g = p.grid_for(32.0).unwrap();
        assert!(g.t_max > 32.0 && g.n_t % 2 == 1);
        assert!((g.t_max - g.t_min) / (g.n_t - 1) as f64 <= p.dt_max + 1e-12);
    }

    #[test]
    fn swirl_sequence_small() {
        let t = sharpness_experiment(ExperimentKind::Swirl, 0.0, &[2, 4], Level::Transformed, &GridPolicy::default())
            .unwrap();
        assert!(t.monotone);
        assert!(t.rows.iter().all(|r| r.route_rel_diff < 1e-5));
        assert!(sharpness_experiment(ExperimentKind::Swirl, 0.0, &[4, 2], Level::Transformed, &GridPolicy::default())
            .is_err());
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("combined".parse::<ExperimentKind>().unwrap(), ExperimentKind::Combined);
        assert!("other".parse::<ExperimentKind>().is_err());
    }
}
