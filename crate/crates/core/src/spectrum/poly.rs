use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, One, ToPrimitive, Zero};

/// Polynomial with exact integer coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExactPoly {
    coeffs: Vec<BigInt>,
}

impl ExactPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// `(1 - x²)^k`.
    pub fn one_minus_x2_pow(k: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); 2 * k + 1];
        let mut binom = BigInt::one();
        for j in 0..=k {
            coeffs[2 * j] = if j % 2 == 0 { binom.clone() } else { -binom.clone() };
            binom = binom * BigInt::from(k - j) / BigInt::from(j + 1);
        }
        Self::new(coeffs)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigInt::from(k))
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = BigInt::zero();
        Self::new(
            (0..n)
                .map(|k| self.coeffs.get(k).unwrap_or(&zero) + other.coeffs.get(k).unwrap_or(&zero))
                .collect(),
        )
    }

    pub fn scale(&self, a: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * a).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::default();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Exact quotient by `1 - x²`, or `None` when the division leaves a remainder.
    pub fn div_one_minus_x2(&self) -> Option<Self> {
        let Some(d) = self.degree() else {
            return Some(Self::default());
        };
        if d < 2 {
            return None;
        }
        // p_k = q_k - q_{k-2}
        let mut q = vec![BigInt::zero(); d - 1];
        for k in 0..=d - 2 {
            q[k] = if k >= 2 { &self.coeffs[k] + &q[k - 2] } else { self.coeffs[k].clone() };
        }
        for k in d - 1..=d {
            let rem = if k >= 2 { &self.coeffs[k] + &q[k - 2] } else { self.coeffs[k].clone() };
            if !rem.is_zero() {
                return None;
            }
        }
        Some(Self::new(q))
    }

    /// Exact value at a rational point.
    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc
    }

    /// Value at `x`, computed exactly from the binary expansion of `x` and
    /// rounded once to `f64`.
    pub fn eval(&self, x: f64) -> f64 {
        let Some(d) = self.degree() else {
            return 0.0;
        };
        let (mantissa, exponent, sign) = Float::integer_decode(x);
        let m = BigInt::from(mantissa) * BigInt::from(sign);
        if mantissa == 0 {
            return self.coeffs[0].to_f64().unwrap_or(f64::NAN);
        }
        if exponent >= 0 {
            let xi = m << (exponent as usize);
            let mut acc = BigInt::zero();
            for c in self.coeffs.iter().rev() {
                acc = acc * &xi + c;
            }
            return acc.to_f64().unwrap_or(f64::NAN);
        }
        // x = m / 2^s;  2^{s d} P(x) = Σ a_k m^k 2^{s (d - k)}
        let s = (-exponent) as usize;
        let mut acc = self.coeffs[d].clone();
        for k in (0..d).rev() {
            acc = acc * &m + (&self.coeffs[k] << (s * (d - k)));
        }
        let den = BigInt::one() << (s * d);
        BigRational::new(acc, den).to_f64().unwrap_or(f64::NAN)
    }

    /// `∫_{-1}^{1} p(x) dx`, exactly.
    pub fn integral_pm1(&self) -> BigRational {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(k, _)| k % 2 == 0)
            .fold(BigRational::zero(), |acc, (k, c)| {
                acc + BigRational::new(c * BigInt::from(2), BigInt::from(k + 1))
            })
    }

    /// `Some(true)` for even, `Some(false)` for odd, `None` for mixed parity.
    pub fn parity(&self) -> Option<bool> {
        let mut even = false;
        let mut odd = false;
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                if k % 2 == 0 {
                    even = true;
                } else {
                    odd = true;
                }
            }
        }
        match (even, odd) {
            (true, false) | (false, false) => Some(true),
            (false, true) => Some(false),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_expansion() {
        assert_eq!(ExactPoly::one_minus_x2_pow(2), ExactPoly::from_i64(&[1, 0, -2, 0, 1]));
        assert_eq!(ExactPoly::one_minus_x2_pow(0), ExactPoly::from_i64(&[1]));
    }

    #[test]
    fn exact_division() {
        let p = ExactPoly::from_i64(&[3, 1, 2]);
        let prod = p.mul(&ExactPoly::from_i64(&[1, 0, -1]));
        assert_eq!(prod.div_one_minus_x2(), Some(p));
        assert_eq!(ExactPoly::from_i64(&[1, 0, 1]).div_one_minus_x2(), None);
    }

    #[test]
    fn eval_matches_horner_for_small_coefficients() {
        let p = ExactPoly::from_i64(&[-6, 0, 30]);
        for x in [-1.0, -0.25, 0.0, 0.125, 0.75, 1.0, 3.5] {
            assert_eq!(p.eval(x), 30.0 * x * x - 6.0);
        }
    }

    #[test]
    fn eval_is_exactly_rounded_under_cancellation() {
        // (x - 1/2)^12 expanded has large alternating coefficients.
        let mut p = ExactPoly::from_i64(&[1]);
        for _ in 0..12 {
            p = p.mul(&ExactPoly::from_i64(&[-1, 2]));
        }
        let x = 0.5 + 2f64.powi(-20);
        let exact = (2.0 * x - 1.0).powi(12);
        assert_eq!(p.eval(x), exact);
    }

    #[test]
    fn integral_of_even_powers() {
        let p = ExactPoly::from_i64(&[1, 5, 3]);
        assert_eq!(p.integral_pm1(), BigRational::from_integer(BigInt::from(4)));
    }
}
