//! Deterministic summation and periodic trapezoid rules.

use std::f64::consts::TAU;

const LEAF: usize = 32;

/// Pairwise summation with a fixed tree, so the result depends only on the
/// order of `values`.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Equispaced nodes `offset + 2 pi j / n`, `j = 0..n`.
pub fn circle_nodes(n: usize, offset: f64) -> Vec<f64> {
    (0..n).map(|j| offset + TAU * j as f64 / n as f64).collect()
}

/// Trapezoid approximation of `(1/2pi) int_0^{2pi} f`.
pub fn circle_mean(n: usize, offset: f64, f: impl Fn(f64) -> f64) -> f64 {
    let values: Vec<f64> = circle_nodes(n, offset).into_iter().map(f).collect();
    pairwise_sum(&values) / n as f64
}

/// Same as [`circle_mean`] for a 2-vector valued integrand.
pub fn circle_mean2(n: usize, offset: f64, f: impl Fn(f64) -> [f64; 2]) -> [f64; 2] {
    let (xs, ys): (Vec<f64>, Vec<f64>) = circle_nodes(n, offset).into_iter().map(|t| {
        let [a, b] = f(t);
        (a, b)
    }).unzip();
    [pairwise_sum(&xs) / n as f64, pairwise_sum(&ys) / n as f64]
}

/// Composite trapezoid rule on `[a, b]` with `n` panels.
pub fn trapezoid(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = (b - a) / n as f64;
    let values: Vec<f64> = (0..=n)
        .map(|j| {
            let w = if j == 0 || j == n { 0.5 } else { 1.0 };
            w * f(a + h * j as f64)
        })
        .collect();
    h * pairwise_sum(&values)
}
