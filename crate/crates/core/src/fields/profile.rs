use crate::error::{Error, Result};

/// Even cut-off `ξ` supported in `[-1, 1]`, with two derivatives.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Profile {
    /// `exp(-1 / (1 - s²))` on `(-1, 1)`.
    #[default]
    StandardBump,
    /// Clamped cubic spline through user samples on `[0, 1]`, mirrored to `[-1, 0]`.
    Table(TableProfile),
}

impl Profile {
    pub fn from_table(s: &[f64], values: &[f64]) -> Result<Self> {
        TableProfile::new(s, values).map(Profile::Table)
    }

    /// `(ξ, ξ', ξ'')` at `s`.
    pub fn eval(&self, s: f64) -> [f64; 3] {
        if !(s.abs() < 1.0) {
            return [0.0; 3];
        }
        match self {
            Profile::StandardBump => {
                let w = (1.0 - s) * (1.0 + s);
                let xi = (-1.0 / w).exp();
                let d1 = xi * (-2.0 * s / (w * w));
                let s2 = s * s;
                let d2 = xi * (6.0 * s2 * s2 - 2.0) / (w * w * w * w);
                [xi, d1, d2]
            }
            Profile::Table(t) => t.eval(s),
        }
    }

    pub fn value(&self, s: f64) -> f64 {
        self.eval(s)[0]
    }

    pub fn derivative(&self, s: f64) -> f64 {
        self.eval(s)[1]
    }

    pub fn name(&self) -> &'static str {
        match self {
            Profile::StandardBump => "standard_bump",
            Profile::Table(_) => "user_table",
        }
    }
}

/// Clamped cubic spline with zero slope at `s = 0` (evenness) and `s = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TableProfile {
    s: Vec<f64>,
    values: Vec<f64>,
    second: Vec<f64>,
}

impl TableProfile {
    pub fn new(s: &[f64], values: &[f64]) -> Result<Self> {
        let bad = |m: &str| Err(Error::InvalidProfile(m.to_string()));
        if s.len() != values.len() || s.len() < 3 {
            return bad("need at least 3 (s, value) pairs of equal length");
        }
        if s[0] != 0.0 || s[s.len() - 1] != 1.0 {
            return bad("table must start at s = 0 and end at s = 1");
        }
        if s.windows(2).any(|w| !(w[1] > w[0])) {
            return bad("s must be strictly increasing");
        }
        if values.iter().any(|v| !v.is_finite()) {
            return bad("non-finite value");
        }
        let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if peak == 0.0 {
            return bad("profile is identically zero");
        }
        if values[values.len() - 1] != 0.0 {
            return bad("profile must vanish at s = 1");
        }
        let second = clamped_second_derivatives(s, values);
        Ok(Self { s: s.to_vec(), values: values.to_vec(), second })
    }

    fn eval(&self, s: f64) -> [f64; 3] {
        let sign = if s < 0.0 { -1.0 } else { 1.0 };
        let x = s.abs();
        let k = match self.s.partition_point(|&v| v <= x) {
            0 => 0,
            p => (p - 1).min(self.s.len() - 2),
        };
        let h = self.s[k + 1] - self.s[k];
        let a = (self.s[k + 1] - x) / h;
        let b = (x - self.s[k]) / h;
        let (y0, y1) = (self.values[k], self.values[k + 1]);
        let (m0, m1) = (self.second[k], self.second[k + 1]);
        let v = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let d = (y1 - y0) / h - (3.0 * a * a - 1.0) * h * m0 / 6.0 + (3.0 * b * b - 1.0) * h * m1 / 6.0;
        let d2 = a * m0 + b * m1;
        [v, sign * d, d2]
    }
}

fn clamped_second_derivatives(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let mut diag = vec![0.0; n];
    let mut upper = vec![0.0; n];
    let mut lower = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    diag[0] = h[0] / 3.0;
    upper[0] = h[0] / 6.0;
    rhs[0] = (y[1] - y[0]) / h[0];
    for i in 1..n - 1 {
        lower[i] = h[i - 1] / 6.0;
        diag[i] = (h[i - 1] + h[i]) / 3.0;
        upper[i] = h[i] / 6.0;
        rhs[i] = (y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1];
    }
    lower[n - 1] = h[n - 2] / 6.0;
    diag[n - 1] = h[n - 2] / 3.0;
    rhs[n - 1] = -(y[n - 1] - y[n - 2]) / h[n - 2];
    // Thomas algorithm
    for i in 1..n {
        let w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    let mut m = vec![0.0; n];
    m[n - 1] = rhs[n - 1] / diag[n - 1];
    for i in (0..n - 1).rev() {
        m[i] = (rhs[i] - upper[i] * m[i + 1]) / diag[i];
    }
    m
}
