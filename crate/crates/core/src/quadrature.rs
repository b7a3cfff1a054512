//! Gauss–Legendre rules and barycentric polynomial differentiation.

use std::f64::consts::PI;

/// Nodes (ascending) and weights of the `n`-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, refined by Newton on the three-term recurrence.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    let d = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Barycentric weights for polynomial interpolation through `nodes`.
pub fn barycentric_weights(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut w = vec![1.0; n];
    for j in 0..n {
        for k in 0..n {
            if k != j {
                w[j] /= nodes[j] - nodes[k];
            }
        }
    }
    // Rescale to avoid under/overflow for large n; barycentric formulas are scale-free.
    let scale = w.iter().fold(0.0_f64, |a, b| a.max(b.abs()));
    w.iter_mut().for_each(|v| *v /= scale);
    w
}

/// Row-major differentiation matrix `D` with `(D f)_i = p'(x_i)` for the
/// interpolant `p` of `f` at `nodes`.
pub fn differentiation_matrix(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let w = barycentric_weights(nodes);
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        let mut diag = 0.0;
        for j in 0..n {
            if i != j {
                let v = (w[j] / w[i]) / (nodes[i] - nodes[j]);
                d[i * n + j] = v;
                diag -= v;
            }
        }
        d[i * n + i] = diag;
    }
    d
}

/// Evaluates the interpolant through `(nodes, values)` at `x` (second barycentric form).
pub fn barycentric_eval(nodes: &[f64], weights: &[f64], values: &[f64], x: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for ((&xj, &wj), &fj) in nodes.iter().zip(weights).zip(values) {
        let diff = x - xj;
        if diff == 0.0 {
            return fj;
        }
        let c = wj / diff;
        num += c * fj;
        den += c;
    }
    num / den
}
