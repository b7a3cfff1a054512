use super::{EnergySplit, QuotientReport, Route};
use crate::constants::{big_q_form, q_form};
use crate::error::{Error, Result};
use crate::fields::Level;
use crate::geometry::{Component, FieldSample};
use crate::spectrum::{required_nodes, EigenBasis};
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::{PI, TAU};

/// Settings for the Fourier route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralOptions {
    /// Angular truncation; `None` picks the largest `ν` the polar grid resolves (at most 24).
    pub nu_max: Option<usize>,
    /// Zero-padding factor in `t` (at least 4).
    pub padding: usize,
    /// Largest energy fraction allowed above 3/4 of the Nyquist frequency.
    pub aliasing_tol: f64,
    /// Largest energy fraction allowed in `f` at the singular bin `λ = 0`, `γ = 3/2`.
    pub singular_tol: f64,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self { nu_max: None, padding: 4, aliasing_tol: 1e-6, singular_tol: 1e-10 }
    }
}

/// Log-radial Fourier coefficients of an axisymmetric transformed field in
/// the polar bases `χ_ν = D_θψ_ν / √α_ν` (for `v_ρ`, with `χ_0 = 1/√(4π)`) and
/// `ψ_ν` (for `v_θ` and `v_φ`). Rows are indexed by `λ`, ascending.
#[derive(Debug, Clone)]
pub struct SpectralField {
    pub gamma: f64,
    pub nu_max: usize,
    pub alpha: Vec<f64>,
    pub lambda: Vec<f64>,
    pub d_lambda: f64,
    pub h0: Vec<Complex64>,
    /// `h[λ][ν-1]`.
    pub h: Vec<Vec<Complex64>>,
    /// `f[λ][ν-1]`.
    pub f: Vec<Vec<Complex64>>,
    /// Swirl channel `w[λ][ν-1]`.
    pub w: Vec<Vec<Complex64>>,
    /// `∫∫ |v|² dt dσ` by grid quadrature, if built from a sample.
    pub grid_energy: Option<f64>,
    pub aliasing_fraction: f64,
}

fn norm2(z: &[Complex64]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum()
}

impl SpectralField {
    /// A synthetic spectrum: `f` and `w` given on `lambda` (uniform spacing
    /// `d_lambda`), `h` filled in from the solenoidal relation
    /// `h_ν (γ - 3/2 - iλ) = √α_ν f_ν`.
    pub fn from_modes(
        gamma: f64,
        lambda: Vec<f64>,
        d_lambda: f64,
        f: Vec<Vec<Complex64>>,
        w: Vec<Vec<Complex64>>,
    ) -> Result<Self> {
        let nu_max = f.first().map_or(0, Vec::len);
        if nu_max == 0 || f.len() != lambda.len() || w.len() != lambda.len() {
            return Err(Error::InvalidConfig("spectrum shape mismatch".into()));
        }
        if f.iter().chain(&w).any(|row| row.len() != nu_max) {
            return Err(Error::InvalidConfig("spectrum rows must share nu_max".into()));
        }
        let alpha: Vec<f64> = (1..=nu_max).map(|n| (n * (n + 1)) as f64).collect();
        let mut h = Vec::with_capacity(lambda.len());
        for (l, row) in lambda.iter().zip(&f) {
            let den = Complex64::new(gamma - 1.5, -l);
            if den.norm_sqr() == 0.0 {
                if norm2(row) > 0.0 {
                    return Err(Error::SingularParameter);
                }
                h.push(vec![Complex64::new(0.0, 0.0); nu_max]);
            } else {
                h.push(row.iter().zip(&alpha).map(|(fv, a)| fv * a.sqrt() / den).collect());
            }
        }
        Ok(Self {
            gamma,
            nu_max,
            alpha,
            h0: vec![Complex64::new(0.0, 0.0); lambda.len()],
            lambda,
            d_lambda,
            h,
            f,
            w,
            grid_energy: None,
            aliasing_fraction: 0.0,
        })
    }

    /// `Σ Δλ (|h_0|² + Σ_ν |h_ν|² + |f_ν|² + |w_ν|²)`.
    pub fn spectral_energy(&self) -> f64 {
        let mut e = 0.0;
        for k in 0..self.lambda.len() {
            e += self.h0[k].norm_sqr() + norm2(&self.h[k]) + norm2(&self.f[k]) + norm2(&self.w[k]);
        }
        e * self.d_lambda
    }

    /// `|spectral energy - grid energy| / grid energy`.
    pub fn parseval_defect(&self) -> Option<f64> {
        self.grid_energy.map(|g| (self.spectral_energy() - g).abs() / g)
    }

    /// Relative size of `h_ν(γ - 3/2 - iλ) - √α_ν f_ν` (and of
    /// `h_0 (γ - 3/2 - iλ)`) over all bins.
    pub fn solenoidal_residual(&self) -> f64 {
        let (mut num, mut den) = (0.0, 0.0);
        for k in 0..self.lambda.len() {
            let m = Complex64::new(self.gamma - 1.5, -self.lambda[k]);
            num += (self.h0[k] * m).norm_sqr();
            for n in 0..self.nu_max {
                let lhs = self.h[k][n] * m;
                let rhs = self.f[k][n] * self.alpha[n].sqrt();
                num += (lhs - rhs).norm_sqr();
                den += lhs.norm_sqr() + rhs.norm_sqr();
            }
        }
        if den == 0.0 {
            0.0
        } else {
            (num / den).sqrt()
        }
    }

    /// Index of the bin closest to `lambda`.
    pub fn nearest_bin(&self, lambda: f64) -> usize {
        let mut best = 0;
        for (k, l) in self.lambda.iter().enumerate() {
            if (l - lambda).abs() < (self.lambda[best] - lambda).abs() {
                best = k;
            }
        }
        best
    }
}

fn support_rows(field: &FieldSample) -> Option<(usize, usize)> {
    let nt = field.grid().t.len();
    let nonzero = |j: usize| {
        field.components().iter().any(|a| a.slice(ndarray::s![j, .., ..]).iter().any(|v| *v != 0.0))
    };
    let first = (0..nt).find(|&j| nonzero(j))?;
    let last = (0..nt).rev().find(|&j| nonzero(j))?;
    Some((first, last))
}

pub fn spectral_transform(v: &FieldSample, gamma: f64, nu_max: usize) -> Result<SpectralField> {
    spectral_transform_with(v, gamma, &SpectralOptions { nu_max: Some(nu_max), ..Default::default() })
}

/// DFT in `t` (zero-padded) followed by projection onto the polar bases.
pub fn spectral_transform_with(v: &FieldSample, gamma: f64, opts: &SpectralOptions) -> Result<SpectralField> {
    if !v.is_finite() {
        return Err(Error::NonFinite("field"));
    }
    let grid = v.grid();
    let scale = v.max_abs();
    let variation = Component::ALL.iter().map(|&c| v.phi_variation(c)).fold(0.0, f64::max);
    if variation > 1e-12 * scale {
        return Err(Error::NotAxisymmetric { variation });
    }
    let (first, last) = support_rows(v).ok_or(Error::ZeroField)?;
    let nt = grid.t.len();
    if first == 0 || last == nt - 1 {
        return Err(Error::SupportNotCovered {
            lo: grid.t[first],
            hi: grid.t[last],
            t_min: grid.spec.t_min,
            t_max: grid.spec.t_max,
        });
    }
    if opts.padding < 4 {
        return Err(Error::InvalidConfig("padding factor must be at least 4".into()));
    }
    let nth = grid.theta.len();
    let nu_max = match opts.nu_max {
        Some(n) => n,
        None => (nth.saturating_sub(8) / 2).clamp(1, 24),
    };
    if nth < required_nodes(nu_max) {
        log::warn!("{nth} polar nodes under-resolve nu_max = {nu_max}");
    }
    let basis = EigenBasis::new(&grid.theta, nu_max)?;

    let m = (opts.padding * nt).next_power_of_two();
    let dt = grid.dt;
    let d_lambda = TAU / (m as f64 * dt);
    let fft = FftPlanner::new().plan_fft_forward(m);
    // spec[c][i][k], FFT ordering in k
    let mut spec = vec![vec![Vec::new(); nth]; 3];
    for (c, comp) in v.components().iter().enumerate() {
        for (i, slot) in spec[c].iter_mut().enumerate() {
            let mut buf = vec![Complex64::new(0.0, 0.0); m];
            for j in 0..nt {
                buf[j].re = comp[[j, i, 0]];
            }
            fft.process(&mut buf);
            *slot = buf;
        }
    }
    let order: Vec<usize> = (m / 2..m).chain(0..m / 2).collect();
    let lambda_of = |k: usize| if k < m / 2 { k as f64 } else { k as f64 - m as f64 } * d_lambda;
    let nyquist = PI / dt;

    let pref = dt / TAU.sqrt();
    let t0 = grid.spec.t_min;
    let chi0 = 1.0 / (2.0 * TAU).sqrt();
    let sqrt_alpha: Vec<f64> = basis.alpha.iter().map(|a| a.sqrt()).collect();
    let mut lambda = Vec::with_capacity(m);
    let (mut h0, mut h, mut f, mut w) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let (mut total, mut high) = (0.0, 0.0);
    for &k in &order {
        let l = lambda_of(k);
        let phase = Complex64::from_polar(pref, -l * t0);
        let col = |c: usize, i: usize| spec[c][i][k] * phase;
        let mut row_h0 = Complex64::new(0.0, 0.0);
        let mut row_h = vec![Complex64::new(0.0, 0.0); nu_max];
        let mut row_f = vec![Complex64::new(0.0, 0.0); nu_max];
        let mut row_w = vec![Complex64::new(0.0, 0.0); nu_max];
        let mut bin_energy = 0.0;
        for i in 0..nth {
            let sw = TAU * grid.theta.weights[i];
            let (vr, vt, vp) = (col(0, i), col(1, i), col(2, i));
            bin_energy += sw * (vr.norm_sqr() + vt.norm_sqr() + vp.norm_sqr());
            row_h0 += vr * (sw * chi0);
            for n in 0..nu_max {
                row_h[n] += vr * (sw * basis.big_d[n][i] / sqrt_alpha[n]);
                row_f[n] += vt * (sw * basis.psi[n][i]);
                row_w[n] += vp * (sw * basis.psi[n][i]);
            }
        }
        total += bin_energy;
        if l.abs() > 0.75 * nyquist {
            high += bin_energy;
        }
        lambda.push(l);
        h0.push(row_h0);
        h.push(row_h);
        f.push(row_f);
        w.push(row_w);
    }
    let aliasing_fraction = if total > 0.0 { high / total } else { 0.0 };
    if aliasing_fraction > opts.aliasing_tol {
        return Err(Error::Aliasing { fraction: aliasing_fraction });
    }
    Ok(SpectralField {
        gamma,
        nu_max,
        alpha: basis.alpha,
        lambda,
        d_lambda,
        h0,
        h,
        f,
        w,
        grid_energy: Some(v.norm_sq()),
        aliasing_fraction,
    })
}

/// `Σ_ν ∫ Q |f_ν|² + (λ² + α_ν)|w_ν|² dλ / Σ_ν ∫ q |f_ν|² + |w_ν|² dλ`, the
/// quotient of `v` at weight `-1/2`.
pub fn spectral_quotient(sf: &SpectralField, gamma: f64) -> Result<QuotientReport> {
    spectral_quotient_with(sf, gamma, &SpectralOptions::default())
}

pub fn spectral_quotient_with(sf: &SpectralField, gamma: f64, opts: &SpectralOptions) -> Result<QuotientReport> {
    if gamma != sf.gamma {
        return Err(Error::InvalidConfig(format!(
            "spectrum was built for gamma = {}, not {gamma}",
            sf.gamma
        )));
    }
    let energy = sf.spectral_energy();
    if energy == 0.0 {
        return Err(Error::ZeroField);
    }
    let mut split = EnergySplit::default();
    for k in 0..sf.lambda.len() {
        let l = sf.lambda[k];
        let l2 = l * l;
        for n in 0..sf.nu_max {
            let a = sf.alpha[n];
            let ww = sf.w[k][n].norm_sqr();
            split.numerator_swirl += (l2 + a) * ww;
            split.denominator_swirl += ww;
        }
        match (q_form(gamma, l, 1.0), big_q_form(gamma, l, 1.0)) {
            (Ok(_), Ok(_)) => {
                for n in 0..sf.nu_max {
                    let a = sf.alpha[n];
                    let ff = sf.f[k][n].norm_sqr();
                    split.numerator_non_swirl += big_q_form(gamma, l, a)? * ff;
                    split.denominator_non_swirl += q_form(gamma, l, a)? * ff;
                }
            }
            _ => {
                // λ = 0 at γ = 3/2: f vanishes there, h is free; use the
                // componentwise energy instead of Q/q.
                let f_energy = norm2(&sf.f[k]) * sf.d_lambda;
                if f_energy > opts.singular_tol * energy {
                    return Err(Error::SingularParameter);
                }
                let h0 = sf.h0[k].norm_sqr();
                split.numerator_non_swirl += (l2 + 2.0) * h0;
                split.denominator_non_swirl += h0;
                for n in 0..sf.nu_max {
                    let a = sf.alpha[n];
                    let (hh, ff) = (sf.h[k][n].norm_sqr(), sf.f[k][n].norm_sqr());
                    let cross = (sf.f[k][n].conj() * sf.h[k][n]).re;
                    split.numerator_non_swirl += (l2 + 2.0 + a) * hh + (l2 + a) * ff + 4.0 * a.sqrt() * cross;
                    split.denominator_non_swirl += hh + ff;
                }
            }
        }
    }
    for v in [
        &mut split.numerator_non_swirl,
        &mut split.numerator_swirl,
        &mut split.denominator_non_swirl,
        &mut split.denominator_swirl,
    ] {
        *v *= sf.d_lambda;
    }
    if split.denominator_non_swirl + split.denominator_swirl <= 0.0 {
        return Err(Error::ZeroField);
    }
    let q = (split.numerator_non_swirl + split.numerator_swirl) / (split.denominator_non_swirl + split.denominator_swirl);
    let defect = sf.parseval_defect().unwrap_or(0.0).max(sf.solenoidal_residual());
    Ok(QuotientReport::new(gamma, Level::Transformed, Route::Spectral, split, defect * q.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{f_gamma, lambda_gamma};
    use crate::fields::{build_swirl_minimizer, build_swirlfree_minimizer, Profile};
    use crate::geometry::GridSpec;
    use crate::quotient::hl_quotient_direct_v;

    fn delta_spectrum(gamma: f64, lambdas: &[f64], weights: &[(usize, usize, f64)]) -> SpectralField {
        let z = Complex64::new(0.0, 0.0);
        let mut f = vec![vec![z; 3]; lambdas.len()];
        for &(k, n, a) in weights {
            f[k][n] = Complex64::new(a, 0.0);
        }
        let w = vec![vec![z; 3]; lambdas.len()];
        SpectralField::from_modes(gamma, lambdas.to_vec(), 0.1, f, w).unwrap()
    }

    #[test]
    fn point_spectra() {
        let g = 2.0;
        let lg = lambda_gamma(g);
        let sf = delta_spectrum(g, &[lg], &[(0, 0, 1.0)]);
        let q = spectral_quotient(&sf, g).unwrap().quotient;
        assert!((q - f_gamma(g, lg * lg, 2.0)).abs() < 1e-9);

        let sf = delta_spectrum(0.0, &[0.0], &[(0, 1, 1.0)]);
        let q = spectral_quotient(&sf, 0.0).unwrap().quotient;
        assert!((q - (1.0 - 4.0 / 8.25) * 6.0).abs() < 1e-12);
    }

    #[test]
    fn two_point_mediant() {
        let g = 0.5;
        let q1 = spectral_quotient(&delta_spectrum(g, &[0.3, 1.7], &[(0, 0, 1.0)]), g).unwrap().quotient;
        let q2 = spectral_quotient(&delta_spectrum(g, &[0.3, 1.7], &[(1, 2, 1.0)]), g).unwrap().quotient;
        let both = spectral_quotient(&delta_spectrum(g, &[0.3, 1.7], &[(0, 0, 1.0), (1, 2, 0.4)]), g).unwrap();
        let q = both.quotient;
        assert!(q > q1.min(q2) && q < q1.max(q2));
        let d1 = q_form(g, 0.3, 2.0).unwrap();
        let d2 = q_form(g, 1.7, 12.0).unwrap() * 0.16;
        assert!((q - (q1 * d1 + q2 * d2) / (d1 + d2)).abs() < 1e-12);
    }

    #[test]
    fn routes_agree_and_spectrum_is_consistent() {
        let grid = GridSpec::symmetric(9.0, 513, 16).unwrap().build().unwrap();
        let p = Profile::StandardBump;
        for gamma in [0.0, 2.0] {
            let v = build_swirlfree_minimizer(8, gamma, &p, &grid).unwrap();
            let sf = spectral_transform(&v, gamma, 4).unwrap();
            assert!(sf.solenoidal_residual() < 1e-10);
            assert!(sf.parseval_defect().unwrap() < 1e-10);
            let s = spectral_quotient(&sf, gamma).unwrap().quotient;
            let d = hl_quotient_direct_v(&v, gamma).unwrap().quotient;
            assert!((s - d).abs() < 1e-5 * d, "{s} vs {d}");
            let n = sf.lambda.len();
            for k in 1..n {
                let mirror = sf.nearest_bin(-sf.lambda[k]);
                if (sf.lambda[mirror] + sf.lambda[k]).abs() < 1e-12 {
                    assert!((sf.h[mirror][0] - sf.h[k][0].conj()).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn swirl_field_lives_in_swirl_channel() {
        let grid = GridSpec::symmetric(2.0, 257, 16).unwrap().build().unwrap();
        let v = build_swirl_minimizer(1, &Profile::StandardBump, &grid).unwrap();
        let sf = spectral_transform(&v, 0.0, 4).unwrap();
        let fh: f64 = sf.f.iter().chain(&sf.h).map(|r| norm2(r)).sum::<f64>() + norm2(&sf.h0);
        assert_eq!(fh, 0.0);
        assert!(sf.w.iter().map(|r| norm2(r)).sum::<f64>() > 0.0);
    }

    #[test]
    fn rejects_uncovered_and_aliased() {
        let grid = GridSpec::symmetric(3.0, 65, 12).unwrap().build().unwrap();
        let p = Profile::StandardBump;
        let v = build_swirl_minimizer(2, &p, &grid).unwrap();
        let coarse = GridSpec::symmetric(2.2, 9, 12).unwrap().build().unwrap();
        let w = build_swirl_minimizer(2, &p, &coarse).unwrap();
        assert!(spectral_transform(&v, 0.0, 2).is_ok());
        assert!(matches!(spectral_transform(&w, 0.0, 2), Err(Error::Aliasing { .. })));
    }
}
