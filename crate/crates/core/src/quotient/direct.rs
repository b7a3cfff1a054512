use super::{EnergySplit, QuotientReport, Route};
use crate::error::{Error, Result};
use crate::fields::Level;
use crate::geometry::{resolve_derivatives, Component, FieldSample, TDerivative};

/// Settings for the quadrature route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectOptions {
    /// `∂_t` for samples without analytic derivatives.
    pub t_derivative: TDerivative,
    /// Relative `φ`-variation of `u_φ` tolerated before rejecting the field.
    pub phi_tol: f64,
}

impl Default for DirectOptions {
    fn default() -> Self {
        Self { t_derivative: TDerivative::FiniteDifference4, phi_tol: 1e-12 }
    }
}

/// Weighted energies at grid step `h` and at `2h` (every other `t` node).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectEnergies {
    pub fine: EnergySplit,
    pub coarse: EnergySplit,
}

impl DirectEnergies {
    /// `|Q_h - Q_{2h}|`.
    pub fn error_estimate(&self) -> f64 {
        let q = |s: &EnergySplit| {
            (s.numerator_non_swirl + s.numerator_swirl) / (s.denominator_non_swirl + s.denominator_swirl)
        };
        (q(&self.fine) - q(&self.coarse)).abs()
    }
}

struct NodeValues {
    u: [f64; 3],
    dt: [f64; 3],
    dth: [f64; 3],
    // đ_φ = ∂_φ / sin θ
    dphi: [f64; 3],
    cot: f64,
}

fn node_values(field: &FieldSample, d: &crate::geometry::FieldDerivatives, idx: [usize; 3]) -> NodeValues {
    let th = &field.grid().theta;
    let s = th.sin_theta[idx[1]];
    let c = field.components();
    NodeValues {
        u: std::array::from_fn(|k| c[k][idx]),
        dt: std::array::from_fn(|k| d.d_t[k][idx]),
        dth: std::array::from_fn(|k| d.d_theta[k][idx]),
        dphi: d.d_phi.as_ref().map_or([0.0; 3], |p| std::array::from_fn(|k| p[k][idx] / s)),
        cot: th.cos_theta[idx[1]] / s,
    }
}

/// Energy densities of the non-swirl and swirl parts.
fn densities(n: &NodeValues) -> (f64, f64) {
    let [ur, ut, up] = n.u;
    let [tr, tt, tp] = n.dt;
    let [hr, ht, hp] = n.dth;
    let [fr, ft, _] = n.dphi;
    let big_d_t = ht + n.cot * ut;
    let non_swirl =
        tr * tr + tt * tt + 2.0 * ur * ur + hr * hr + big_d_t * big_d_t - 4.0 * ut * hr + fr * fr + ft * ft;
    let big_d_p = hp + n.cot * up;
    (non_swirl, tp * tp + big_d_p * big_d_p)
}

fn check_field(field: &FieldSample, opts: &DirectOptions) -> Result<()> {
    if !field.is_finite() {
        return Err(Error::NonFinite("field"));
    }
    let scale = field.max_abs();
    if scale == 0.0 {
        return Err(Error::ZeroField);
    }
    let variation = field.phi_variation(Component::Phi);
    if variation > opts.phi_tol * scale {
        return Err(Error::PhiDependentSwirl { variation });
    }
    Ok(())
}

/// Energies with radial weight `e^{(2 weight + 1) t}`.
pub fn direct_energies(field: &FieldSample, weight: f64, opts: &DirectOptions) -> Result<DirectEnergies> {
    check_field(field, opts)?;
    let d = resolve_derivatives(field, opts.t_derivative)?;
    let grid = field.grid();
    let [nt, nth, nph] = grid.shape();
    let exponent = 2.0 * weight + 1.0;
    let last_even = if nt % 2 == 1 { nt - 1 } else { nt - 2 };
    let mut fine = EnergySplit::default();
    let mut coarse = EnergySplit::default();
    for j in 0..nt {
        let radial = (exponent * grid.t[j]).exp();
        let w_fine = if j == 0 || j == nt - 1 { 0.5 * grid.dt } else { grid.dt } * radial;
        let w_coarse = if j % 2 == 1 || j > last_even {
            0.0
        } else if j == 0 || j == last_even {
            grid.dt * radial
        } else {
            2.0 * grid.dt * radial
        };
        let mut slab = EnergySplit::default();
        for i in 0..nth {
            let sw = grid.sphere_weight(i);
            for k in 0..nph {
                let n = node_values(field, &d, [j, i, k]);
                let (ns, sw_density) = densities(&n);
                slab.numerator_non_swirl += sw * ns;
                slab.numerator_swirl += sw * sw_density;
                slab.denominator_non_swirl += sw * (n.u[0] * n.u[0] + n.u[1] * n.u[1]);
                slab.denominator_swirl += sw * n.u[2] * n.u[2];
            }
        }
        for (acc, w) in [(&mut fine, w_fine), (&mut coarse, w_coarse)] {
            acc.numerator_non_swirl += w * slab.numerator_non_swirl;
            acc.numerator_swirl += w * slab.numerator_swirl;
            acc.denominator_non_swirl += w * slab.denominator_non_swirl;
            acc.denominator_swirl += w * slab.denominator_swirl;
        }
    }
    let total = fine.numerator_non_swirl + fine.numerator_swirl + fine.denominator_non_swirl + fine.denominator_swirl;
    if !total.is_finite() {
        return Err(Error::NonFinite("quotient integrand"));
    }
    if fine.denominator_non_swirl + fine.denominator_swirl <= 0.0 {
        return Err(Error::ZeroField);
    }
    Ok(DirectEnergies { fine, coarse })
}

/// `∫∫ ρ²|∇u|² e^{(2 weight + 1)t} dt dσ` from the pointwise gradient in the
/// moving frame, without any angular integration by parts.
pub fn gradient_energy_pointwise(field: &FieldSample, weight: f64, method: TDerivative) -> Result<f64> {
    let d = resolve_derivatives(field, method)?;
    let grid = field.grid();
    let [nt, nth, nph] = grid.shape();
    let tw = grid.t_weights();
    let mut total = 0.0;
    for j in 0..nt {
        let radial = tw[j] * ((2.0 * weight + 1.0) * grid.t[j]).exp();
        for i in 0..nth {
            let sw = grid.sphere_weight(i);
            for k in 0..nph {
                let n = node_values(field, &d, [j, i, k]);
                let [ur, ut, up] = n.u;
                let [hr, ht, hp] = n.dth;
                let [fr, ft, fp] = n.dphi;
                let dt2: f64 = n.dt.iter().map(|v| v * v).sum();
                let terms = [
                    hr - ut,
                    ur + ht,
                    hp,
                    fr - up,
                    ft - up * n.cot,
                    ur + ut * n.cot + fp,
                ];
                let e = dt2 + terms.iter().map(|v| v * v).sum::<f64>();
                total += radial * sw * e;
            }
        }
    }
    Ok(total)
}

pub fn hl_quotient_direct_with(
    field: &FieldSample,
    gamma: f64,
    level: Level,
    opts: &DirectOptions,
) -> Result<QuotientReport> {
    let weight = match level {
        Level::Original => gamma,
        Level::Transformed => -0.5,
    };
    let e = direct_energies(field, weight, opts)?;
    Ok(QuotientReport::new(gamma, level, Route::Direct, e.fine, e.error_estimate()))
}

/// Quotient of `u` at weight `γ`.
pub fn hl_quotient_direct(u: &FieldSample, gamma: f64) -> Result<QuotientReport> {
    hl_quotient_direct_with(u, gamma, Level::Original, &DirectOptions::default())
}

/// Quotient of the transformed field `v` at weight `-1/2`; margins refer to `γ`.
pub fn hl_quotient_direct_v(v: &FieldSample, gamma: f64) -> Result<QuotientReport> {
    hl_quotient_direct_with(v, gamma, Level::Transformed, &DirectOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{build_swirl_minimizer, build_swirlfree_minimizer, Profile};
    use crate::geometry::GridSpec;
    use crate::quotient::bv_inverse;
    use ndarray::Array3;

    #[test]
    fn swirl_minimizer_quotient_near_two() {
        let g = GridSpec::symmetric(17.0, 1025, 16).unwrap().build().unwrap();
        let v = build_swirl_minimizer(16, &Profile::StandardBump, &g).unwrap();
        let r = hl_quotient_direct_v(&v, 0.0).unwrap();
        assert!(r.quotient > 2.0 && r.quotient < 2.0 * 1.02, "{}", r.quotient);
        assert!(r.error_estimate < 1e-8);
    }

    #[test]
    fn lemma_density_matches_pointwise_gradient() {
        let g = GridSpec::symmetric(9.0, 513, 24).unwrap().build().unwrap();
        let p = Profile::StandardBump;
        let v = build_swirlfree_minimizer(8, 2.0, &p, &g).unwrap();
        let s = build_swirl_minimizer(8, &p, &g).unwrap();
        let f = v.try_add(&s).unwrap();
        let e = direct_energies(&f, -0.5, &DirectOptions::default()).unwrap().fine;
        let lemma = e.numerator_non_swirl + e.numerator_swirl;
        let pw = gradient_energy_pointwise(&f, -0.5, TDerivative::FiniteDifference4).unwrap();
        assert!((lemma - pw).abs() < 1e-10 * pw);
    }

    #[test]
    fn transformed_and_original_levels_agree() {
        let g = GridSpec::symmetric(9.0, 513, 16).unwrap().build().unwrap();
        let v = build_swirlfree_minimizer(8, 2.0, &Profile::StandardBump, &g).unwrap();
        let rv = hl_quotient_direct_v(&v, 2.0).unwrap();
        let ru = hl_quotient_direct(&bv_inverse(&v, 2.0), 2.0).unwrap();
        assert!((ru.quotient - rv.quotient - 6.25).abs() < 1e-6);
        assert!((ru.margins.c_gamma0 - rv.margins.c_gamma0).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_fields() {
        let g = GridSpec::new(-3.0, 3.0, 33, 8, 4).unwrap().build().unwrap();
        let zero = FieldSample::zeros(g.clone());
        assert!(matches!(hl_quotient_direct(&zero, 0.0), Err(Error::ZeroField)));
        let mut phi = Array3::zeros(g.shape());
        for ((j, i, k), v) in phi.indexed_iter_mut() {
            *v = (-(g.t[j] * g.t[j])).exp() * g.theta.sin_theta[i] * (1.0 + 0.5 * g.phi[k].sin());
        }
        let z = Array3::zeros(g.shape());
        let f = FieldSample::new(g.clone(), z.clone(), z, phi).unwrap();
        assert!(matches!(hl_quotient_direct(&f, 0.0), Err(Error::PhiDependentSwirl { .. })));
    }
}
