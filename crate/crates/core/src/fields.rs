//! Gradient field vectors of homogeneous kernels `Omega(w/|w|)/|w|^{2-alpha}`
//! integrated against a circle measure, by a closed Fourier formula and by
//! quadrature, and the geometric tests built on them.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::{Complex, Complex64};
use num_traits::{Signed, Zero};

use crate::densities::{coeff_sequence_x, density_measure, riesz_measure, CircleMeasure, ExactComplex, Variant};
use crate::error::{Error, Result};
use crate::exact::{format_rational, int, to_f64, ExactRational};
use crate::quadrature::{circle_mean, pairwise_sum};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A tabulated-by-closure angular symbol with its derivative.
#[derive(Clone)]
pub struct SampledKernel {
    name: String,
    value: ScalarFn,
    derivative: ScalarFn,
}

impl fmt::Debug for SampledKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SampledKernel").field("name", &self.name).finish_non_exhaustive()
    }
}

impl SampledKernel {
    /// Checks the supplied derivative against centered differences at
    /// relative tolerance `1e-6`, and that the symbol has mean zero.
    pub fn new(
        name: impl Into<String>,
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let name = name.into();
        let h = 1e-5;
        for j in 0..97 {
            let t = 2.0 * PI * j as f64 / 97.0 + 0.01;
            let fd = (value(t + h) - value(t - h)) / (2.0 * h);
            let d = derivative(t);
            if (fd - d).abs() > 1e-6 * d.abs().max(1.0) {
                return Err(Error::InconsistentKernel(format!("{name}: derivative {d} vs difference {fd} at {t}")));
            }
        }
        let mean = circle_mean(4096, 0.0, &value);
        if mean.abs() > 1e-10 {
            return Err(Error::InconsistentKernel(format!("{name}: mean {mean:e} is not zero")));
        }
        Ok(SampledKernel { name, value: Arc::new(value), derivative: Arc::new(derivative) })
    }
}

/// Angular part of the kernel.
#[derive(Debug, Clone)]
pub enum KernelSymbol {
    Cos(u32),
    Sin(u32),
    Sampled(SampledKernel),
}

impl KernelSymbol {
    pub fn value(&self, theta: f64) -> f64 {
        match self {
            KernelSymbol::Cos(k) => (*k as f64 * theta).cos(),
            KernelSymbol::Sin(k) => (*k as f64 * theta).sin(),
            KernelSymbol::Sampled(s) => (s.value)(theta),
        }
    }

    pub fn derivative(&self, theta: f64) -> f64 {
        match self {
            KernelSymbol::Cos(k) => -(*k as f64) * (*k as f64 * theta).sin(),
            KernelSymbol::Sin(k) => *k as f64 * (*k as f64 * theta).cos(),
            KernelSymbol::Sampled(s) => (s.derivative)(theta),
        }
    }

    pub fn name(&self) -> String {
        match self {
            KernelSymbol::Cos(k) => format!("cos{k}"),
            KernelSymbol::Sin(k) => format!("sin{k}"),
            KernelSymbol::Sampled(s) => s.name.clone(),
        }
    }

    /// The pair `{cos k, sin k}` for `k = 1..=m`.
    pub fn trig_family(m: u32) -> Vec<KernelSymbol> {
        (1..=m).flat_map(|k| [KernelSymbol::Cos(k), KernelSymbol::Sin(k)]).collect()
    }

    /// Planar Riesz pair `w_1/|w|`, `w_2/|w|`.
    pub fn riesz_pair() -> Vec<KernelSymbol> {
        vec![KernelSymbol::Cos(1), KernelSymbol::Sin(1)]
    }
}

/// A planar vector `re e1 + im e2`, optionally with exact components.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldVector {
    pub re: f64,
    pub im: f64,
    pub exact: Option<ExactComplex>,
}

impl FieldVector {
    pub fn from_floats(re: f64, im: f64) -> Self {
        FieldVector { re, im, exact: None }
    }

    pub fn from_exact(z: ExactComplex) -> Self {
        FieldVector { re: to_f64(&z.re), im: to_f64(&z.im), exact: Some(z) }
    }

    pub fn norm(&self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn distance(&self, other: &FieldVector) -> f64 {
        (self.re - other.re).hypot(self.im - other.im)
    }
}

/// `A = (alpha-2) Omega cos - Omega' sin`, `B = (alpha-2) Omega sin + Omega' cos`.
pub fn ab_coefficients(omega: &KernelSymbol, alpha: f64, theta: f64) -> (f64, f64) {
    let (v, d) = (omega.value(theta), omega.derivative(theta));
    let (s, c) = theta.sin_cos();
    ((alpha - 2.0) * v * c - d * s, (alpha - 2.0) * v * s + d * c)
}

fn mul_i(z: ExactComplex) -> ExactComplex {
    Complex::new(-z.im, z.re)
}

fn trig_order(omega: &KernelSymbol) -> Result<(u32, bool)> {
    match omega {
        KernelSymbol::Cos(k) if *k >= 1 => Ok((*k, true)),
        KernelSymbol::Sin(k) if *k >= 1 => Ok((*k, false)),
        other => Err(Error::Domain(format!("closed Fourier route needs cos k or sin k with k >= 1, got {}", other.name()))),
    }
}

/// Closed Fourier route. With `c1 = (alpha+k-2)/2`, `c2 = (alpha-k-2)/2`:
/// `Z_cos = c1 mu^(k-1) + c2 conj mu^(k+1)` and
/// `Z_sin = i [c1 mu^(k-1) - c2 conj mu^(k+1)]`.
pub fn z_field_fourier(omega: &KernelSymbol, alpha: &ExactRational, measure: &CircleMeasure) -> Result<FieldVector> {
    let (k, is_cos) = trig_order(omega)?;
    let k = k as i64;
    let c1 = (alpha + int(k - 2)) / int(2);
    let c2 = (alpha - int(k + 2)) / int(2);
    if let (Some(lo), Some(hi)) = (measure.exact_fourier_coefficient(k - 1), measure.exact_fourier_coefficient(k + 1)) {
        let p = lo.scale(c1);
        let q = hi.conj().scale(c2);
        let z = if is_cos { p + q } else { mul_i(p - q) };
        return Ok(FieldVector::from_exact(z));
    }
    let p = measure.fourier_coefficient(k - 1) * to_f64(&c1);
    let q = measure.fourier_coefficient(k + 1).conj() * to_f64(&c2);
    let z = if is_cos { p + q } else { Complex64::i() * (p - q) };
    Ok(FieldVector::from_floats(z.re, z.im))
}

fn quadrature_once(omega: &KernelSymbol, alpha: f64, measure: &CircleMeasure, nodes: usize) -> FieldVector {
    let [re, im] = measure.integrate2(nodes, |t| {
        let (a, b) = ab_coefficients(omega, alpha, t);
        [a, b]
    });
    FieldVector::from_floats(re, im)
}

/// `int (A e1 + B e2) d mu` by the trapezoid rule on the smooth part, with
/// atoms added exactly. Returns the field at `nodes` and its distance from
/// the value at `2 nodes`.
pub fn z_field_quadrature(omega: &KernelSymbol, alpha: f64, measure: &CircleMeasure, nodes: usize) -> Result<(FieldVector, f64)> {
    if nodes < 64 {
        return Err(Error::Domain(format!("quadrature needs at least 64 nodes, got {nodes}")));
    }
    let z = quadrature_once(omega, alpha, measure, nodes);
    let refined = quadrature_once(omega, alpha, measure, 2 * nodes);
    let err = z.distance(&refined);
    Ok((z, err))
}

/// Determinant of the pair `(Z_cos k, Z_sin k)` and the coefficient residual
/// `|mu^(k+1)| - |(alpha+k-2)/(alpha-k-2)| |mu^(k-1)|`.
#[derive(Debug, Clone, PartialEq)]
pub struct Parallelism {
    pub det: f64,
    pub exact_det: Option<ExactRational>,
    pub residual: f64,
}

pub fn parallelism_det(k: u32, alpha: &ExactRational, measure: &CircleMeasure) -> Result<Parallelism> {
    if k == 0 {
        return Err(Error::Domain("parallelism needs k >= 1".into()));
    }
    let z1 = z_field_fourier(&KernelSymbol::Cos(k), alpha, measure)?;
    let z2 = z_field_fourier(&KernelSymbol::Sin(k), alpha, measure)?;
    let exact_det = match (&z1.exact, &z2.exact) {
        (Some(a), Some(b)) => Some(&a.re * &b.im - &a.im * &b.re),
        _ => None,
    };
    let det = exact_det.as_ref().map_or(z1.re * z2.im - z1.im * z2.re, to_f64);
    let k = k as i64;
    let factor = to_f64(&((alpha + int(k - 2)) / (alpha - int(k + 2))).abs());
    let residual = measure.fourier_coefficient(k + 1).norm() - factor * measure.fourier_coefficient(k - 1).norm();
    Ok(Parallelism { det, exact_det, residual })
}

/// Explicit form `c1^2 |mu^(k-1)|^2 - c2^2 |mu^(k+1)|^2` of the determinant.
pub fn parallelism_det_formula(k: u32, alpha: &ExactRational, measure: &CircleMeasure) -> Option<ExactRational> {
    let k = k as i64;
    let c1 = (alpha + int(k - 2)) / int(2);
    let c2 = (alpha - int(k + 2)) / int(2);
    let lo = measure.exact_fourier_coefficient(k - 1)?.norm_sqr();
    let hi = measure.exact_fourier_coefficient(k + 1)?.norm_sqr();
    Some(&c1 * &c1 * lo - &c2 * &c2 * hi)
}

/// `|(int cos 2t, int sin 2t)| - (|alpha-1|/|alpha-3|) |mu|`.
pub fn riesz_condition_residual(alpha: &ExactRational, measure: &CircleMeasure) -> f64 {
    let threshold = to_f64(&((alpha - int(1)).abs() / (alpha - int(3)).abs()));
    measure.fourier_coefficient(2).norm() - threshold * to_f64(&measure.total())
}

/// Exact version of the condition, comparing squares; `None` when the
/// measure has no exact Fourier data.
pub fn riesz_condition_exact(alpha: &ExactRational, measure: &CircleMeasure) -> Option<ExactRational> {
    let c = measure.exact_fourier_coefficient(2)?;
    let threshold = (alpha - int(1)).abs() / (alpha - int(3)).abs() * measure.total();
    Some(c.norm_sqr() - &threshold * &threshold)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Closed,
    Quadrature,
}

/// Gradient at the origin of the kernel `cos(theta - t)`-type potential of
/// the Riesz measure: `(alpha-1)(cos t, 0)` for `alpha < 1`,
/// `(alpha-1)(0, sin t)` for `alpha > 1` and zero at `alpha = 1`.
pub fn remark_gradient(alpha: &ExactRational, t: f64, route: Route, nodes: usize) -> Result<FieldVector> {
    let a = to_f64(alpha);
    match route {
        Route::Closed => {
            let one = int(1);
            Ok(if *alpha < one {
                FieldVector::from_floats((a - 1.0) * t.cos(), 0.0)
            } else if *alpha > one {
                FieldVector::from_floats(0.0, (a - 1.0) * t.sin())
            } else {
                FieldVector::from_floats(0.0, 0.0)
            })
        }
        Route::Quadrature => {
            let measure = riesz_measure(alpha)?;
            let (st, ct) = t.sin_cos();
            let [re, im] = measure.integrate2(nodes, |theta| {
                let (s, c) = theta.sin_cos();
                let proj = (3.0 - a) * (c * ct + s * st);
                [ct - proj * c, st - proj * s]
            });
            Ok(FieldVector::from_floats(re, im))
        }
    }
}

/// Numerical rank of the `2 x N` matrix of field vectors: singular values
/// above `tol * max(1, sigma_max)` are counted.
pub fn span_rank(fields: &[FieldVector], tol: f64) -> Result<usize> {
    if fields.is_empty() {
        return Err(Error::Dimension("span_rank of an empty list".into()));
    }
    let g11 = pairwise_sum(&fields.iter().map(|f| f.re * f.re).collect::<Vec<_>>());
    let g22 = pairwise_sum(&fields.iter().map(|f| f.im * f.im).collect::<Vec<_>>());
    let g12 = pairwise_sum(&fields.iter().map(|f| f.re * f.im).collect::<Vec<_>>());
    let mean = 0.5 * (g11 + g22);
    let spread = (0.25 * (g11 - g22).powi(2) + g12 * g12).sqrt();
    let s_max = (mean + spread).max(0.0).sqrt();
    let s_min = (mean - spread).max(0.0).sqrt();
    let cut = tol * s_max.max(1.0);
    Ok([s_max, s_min].iter().filter(|s| **s > cut).count())
}

type VecFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
type SphereFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A symbol on the unit sphere of `R^n`, given by a function on `R^n` and
/// its ambient gradient; only the tangential part of the gradient is used.
#[derive(Clone)]
pub struct SphereSymbol {
    pub name: String,
    value: SphereFn,
    gradient: VecFn,
}

impl fmt::Debug for SphereSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SphereSymbol").field("name", &self.name).finish_non_exhaustive()
    }
}

impl SphereSymbol {
    pub fn new(
        name: impl Into<String>,
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        SphereSymbol { name: name.into(), value: Arc::new(value), gradient: Arc::new(gradient) }
    }

    /// The coordinate function `w_j` (0-based `j`).
    pub fn coordinate(j: usize) -> Self {
        SphereSymbol::new(format!("w{}", j + 1), move |w| w[j], move |w| {
            let mut g = vec![0.0; w.len()];
            g[j] = 1.0;
            g
        })
    }

    pub fn constant(c: f64) -> Self {
        SphereSymbol::new("constant", move |_| c, |w| vec![0.0; w.len()])
    }

    pub fn value(&self, u: &[f64]) -> f64 {
        (self.value)(u)
    }

    /// Tangential gradient at the unit vector `u`.
    pub fn tangential_gradient(&self, u: &[f64]) -> Vec<f64> {
        let g = (self.gradient)(u);
        let radial: f64 = g.iter().zip(u).map(|(a, b)| a * b).sum();
        g.iter().zip(u).map(|(a, b)| a - radial * b).collect()
    }
}

/// Largest `|int_C Omega|` over a fixed family of great circles of `S^{n-1}`.
pub fn great_circle_defect(n: usize, omega: &SphereSymbol, nodes: usize) -> f64 {
    let mut frames: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    let basis = |i: usize| {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        e
    };
    for i in 0..n {
        for j in (i + 1)..n {
            frames.push((basis(i), basis(j)));
        }
    }
    // tilted frames: u = normalized (1, 2, ..., n) rotated against each axis
    let tilt: Vec<f64> = (1..=n).map(|i| i as f64).collect();
    let tn = tilt.iter().map(|v| v * v).sum::<f64>().sqrt();
    let u: Vec<f64> = tilt.iter().map(|v| v / tn).collect();
    for i in 0..n {
        let e = basis(i);
        let dot: f64 = e.iter().zip(&u).map(|(a, b)| a * b).sum();
        let mut v: Vec<f64> = e.iter().zip(&u).map(|(a, b)| a - dot * b).collect();
        let vn = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if vn > 1e-8 {
            v.iter_mut().for_each(|a| *a /= vn);
            frames.push((u.clone(), v));
        }
    }
    frames
        .iter()
        .map(|(p, q)| {
            circle_mean(nodes, 0.0, |t| {
                let (s, c) = t.sin_cos();
                let w: Vec<f64> = p.iter().zip(q).map(|(a, b)| c * a + s * b).collect();
                omega.value(&w)
            })
            .abs()
        })
        .fold(0.0, f64::max)
}

/// Signed-coefficient circle profile at `x = n - alpha`.
pub fn lifted_profile(n: usize, alpha: &ExactRational, terms: usize) -> Result<CircleMeasure> {
    let x = int(n as i64) - alpha;
    if !x.is_positive() || x > int(n as i64) {
        return Err(Error::Domain(format!("x = n - alpha = {} outside (0, n]", format_rational(&x))));
    }
    Ok(density_measure(&coeff_sequence_x(&x, Variant::Signed, terms)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingReport {
    pub field: Vec<f64>,
    pub norm: f64,
    /// `|field . e2| / |field|`, or `|field . e2|` when the field vanishes.
    pub e2_ratio: f64,
    pub degenerate: bool,
}

/// Gradient at the origin of `int K(-y) d mu(y)` for the planar profile
/// placed on the unit circle of `R^2 x {0}` in `R^n`, with
/// `grad K(w) = [grad_S Omega(u) - (n - alpha) Omega(u) u] / |w|^{n-alpha+1}`.
pub fn embed_and_project(
    n: usize,
    alpha: &ExactRational,
    omega: &SphereSymbol,
    profile: &CircleMeasure,
    nodes: usize,
) -> Result<EmbeddingReport> {
    if n < 3 {
        return Err(Error::Domain(format!("embedding dimension must be at least 3, got {n}")));
    }
    let defect = great_circle_defect(n, omega, 512);
    if defect > 1e-10 {
        return Err(Error::InconsistentKernel(format!("{} has great-circle integral {defect:e}", omega.name)));
    }
    let weight = to_f64(&(int(n as i64) - alpha));
    let mut field = vec![0.0; n];
    for i in 0..n {
        field[i] = profile.integrate(nodes, |t| {
            let mut u = vec![0.0; n];
            u[0] = t.cos();
            u[1] = t.sin();
            let g = omega.tangential_gradient(&u);
            g[i] - weight * omega.value(&u) * u[i]
        });
    }
    let norm = field.iter().map(|v| v * v).sum::<f64>().sqrt();
    let degenerate = norm < 1e-12;
    let e2_ratio = if degenerate { field[1].abs() } else { field[1].abs() / norm };
    Ok(EmbeddingReport { field, norm, e2_ratio, degenerate })
}

/// Whether `z` is within `tol` of zero, reading the exact value when present.
pub fn is_zero_field(z: &FieldVector, tol: f64) -> bool {
    match &z.exact {
        Some(e) => e.re.is_zero() && e.im.is_zero(),
        None => z.norm() <= tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::{coeff_sequence, Angle};
    use crate::exact::rat;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    fn signed_measure(alpha: &ExactRational, n: usize) -> CircleMeasure {
        density_measure(&coeff_sequence(alpha, Variant::Signed, n).unwrap())
    }

    fn random_trig_kernel(rng: &mut ChaCha8Rng, name: &str) -> SampledKernel {
        let coeffs: Vec<(f64, f64)> = (1..=6).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let c2 = coeffs.clone();
        SampledKernel::new(
            name,
            move |t| coeffs.iter().enumerate().map(|(i, (a, b))| {
                let k = (i + 1) as f64;
                a * (k * t).cos() + b * (k * t).sin()
            }).sum(),
            move |t| c2.iter().enumerate().map(|(i, (a, b))| {
                let k = (i + 1) as f64;
                k * (b * (k * t).cos() - a * (k * t).sin())
            }).sum(),
        )
        .unwrap()
    }

    #[test]
    fn ab_examples() {
        for alpha in [0.0, 0.5, 1.5] {
            let (a, b) = ab_coefficients(&KernelSymbol::Cos(1), alpha, 0.0);
            assert!((a - (alpha - 2.0)).abs() < 1e-15 && b.abs() < 1e-15);
            let (a, _) = ab_coefficients(&KernelSymbol::Cos(1), alpha, FRAC_PI_2);
            assert!((a - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn ab_product_formula() {
        for k in 1..6u32 {
            for alpha in [0.0, 0.7, 1.3] {
                for j in 0..10 {
                    let t = 0.3 * j as f64;
                    let kf = k as f64;
                    let (a, _) = ab_coefficients(&KernelSymbol::Cos(k), alpha, t);
                    let expected = ((alpha + kf) / 2.0 - 1.0) * ((kf - 1.0) * t).cos()
                        + ((alpha - kf) / 2.0 - 1.0) * ((kf + 1.0) * t).cos();
                    assert!((a - expected).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn fourier_examples() {
        for alpha in [int(0), rat(1, 2), rat(3, 2)] {
            let m = signed_measure(&alpha, 8);
            let z = z_field_fourier(&KernelSymbol::Cos(1), &alpha, &m).unwrap();
            assert_eq!(z.exact.unwrap(), Complex::new(&alpha - int(1), int(0)));
            let z = z_field_fourier(&KernelSymbol::Sin(1), &alpha, &m).unwrap();
            assert!(z.exact.unwrap().is_zero());
            let u = CircleMeasure::uniform(int(1)).unwrap();
            let z = z_field_fourier(&KernelSymbol::Cos(1), &alpha, &u).unwrap();
            assert_eq!(z.exact.unwrap(), Complex::new((&alpha - int(1)) / int(2), int(0)));
        }
        assert!(z_field_fourier(&KernelSymbol::Cos(0), &int(0), &signed_measure(&int(0), 4)).is_err());
    }

    #[test]
    fn routes_agree() {
        for alpha in [int(0), rat(1, 2), int(1), rat(3, 2)] {
            let fleet = [
                riesz_measure(&alpha).unwrap(),
                signed_measure(&alpha, 16),
                riesz_measure(&alpha).unwrap().rotated(Angle::Radians(0.7)),
            ];
            for m in &fleet {
                for k in 1..=16 {
                    for omega in [KernelSymbol::Cos(k), KernelSymbol::Sin(k)] {
                        let closed = z_field_fourier(&omega, &alpha, m).unwrap();
                        let (quad, err) = z_field_quadrature(&omega, to_f64(&alpha), m, 4096).unwrap();
                        assert!(closed.distance(&quad) < 1e-10, "{} alpha={}", omega.name(), format_rational(&alpha));
                        assert!(err < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn perfect_derivatives_at_one() {
        let u = CircleMeasure::uniform(int(1)).unwrap();
        let (z, _) = z_field_quadrature(&KernelSymbol::Cos(1), 1.0, &u, 256).unwrap();
        assert!(z.norm() < 1e-12);
        let s = SampledKernel::new("cos3+2sin5", |t| (3.0 * t).cos() + 2.0 * (5.0 * t).sin(), |t| {
            -3.0 * (3.0 * t).sin() + 10.0 * (5.0 * t).cos()
        })
        .unwrap();
        let (z, _) = z_field_quadrature(&KernelSymbol::Sampled(s), 1.0, &u, 256).unwrap();
        assert!(z.norm() < 1e-10);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for i in 0..5 {
            let s = random_trig_kernel(&mut rng, &format!("random{i}"));
            let omega = KernelSymbol::Sampled(s);
            let a: Vec<f64> = (0..512).map(|j| ab_coefficients(&omega, 1.0, 2.0 * PI * j as f64 / 512.0).0).collect();
            assert!((pairwise_sum(&a) / 512.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sampled_kernel_guards() {
        assert!(matches!(
            SampledKernel::new("bad", |t| t.cos(), |t| t.cos()),
            Err(Error::InconsistentKernel(_))
        ));
        assert!(matches!(
            SampledKernel::new("mean", |t| 1.0 + t.cos(), |t| -t.sin()),
            Err(Error::InconsistentKernel(_))
        ));
    }

    #[test]
    fn parallelism_examples() {
        for alpha in [int(0), rat(1, 4), rat(1, 2), int(1), rat(3, 2), rat(7, 4)] {
            let p = parallelism_det(1, &alpha, &riesz_measure(&alpha).unwrap()).unwrap();
            assert!(p.exact_det.unwrap().is_zero());
            assert!(p.residual.abs() < 1e-15);
            let m = signed_measure(&alpha, 20);
            for k in 1..=19 {
                let p = parallelism_det(k, &alpha, &m).unwrap();
                assert!(p.exact_det.clone().unwrap().is_zero(), "k = {k}");
                assert_eq!(p.exact_det, parallelism_det_formula(k, &alpha, &m));
            }
        }
        let delta = CircleMeasure::atom(Angle::Quarter(0), int(1)).unwrap();
        let p = parallelism_det(1, &int(0), &delta).unwrap();
        assert_eq!(p.exact_det.unwrap(), int(-2));
        assert!(p.residual.abs() > 0.1);
    }

    #[test]
    fn determinant_matches_explicit_display() {
        let m = riesz_measure(&rat(1, 2)).unwrap().scaled(&rat(3, 1));
        let m = CircleMeasure::new(
            m.atoms().iter().cloned().chain([crate::densities::Atom { angle: Angle::Quarter(1), mass: rat(1, 5) }]).collect(),
            m.smooth().cloned(),
        )
        .unwrap();
        let alpha = rat(1, 2);
        let det = parallelism_det(1, &alpha, &m).unwrap();
        let c2 = m.fourier_coefficient(2);
        let total = to_f64(&m.total());
        let a = to_f64(&alpha);
        let display = ((a - 1.0) / 2.0).powi(2) * total * total - ((a - 3.0) / 2.0).powi(2) * c2.norm_sqr();
        assert!((det.det - display).abs() < 1e-12);
    }

    #[test]
    fn riesz_condition_examples() {
        for alpha in [int(0), rat(1, 2), int(1), rat(3, 2)] {
            let m = riesz_measure(&alpha).unwrap();
            assert!(riesz_condition_exact(&alpha, &m).unwrap().is_zero());
            assert!(riesz_condition_residual(&alpha, &m).abs() < 1e-15);
            let r = riesz_condition_residual(&alpha, &m.rotated(Angle::Radians(1.1)));
            assert!(r.abs() < 1e-12);
            let u = CircleMeasure::uniform(int(1)).unwrap();
            let expected = to_f64(&((&alpha - int(1)).abs() / (&alpha - int(3)).abs()));
            assert!((riesz_condition_residual(&alpha, &u) + expected).abs() < 1e-15);
        }
        let delta = CircleMeasure::atom(Angle::Quarter(0), int(1)).unwrap();
        assert!((riesz_condition_residual(&int(0), &delta) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn fourier_bookkeeping_is_imaginary() {
        let m = riesz_measure(&rat(1, 2)).unwrap().rotated(Angle::Radians(0.3));
        for k in 1..8 {
            let (lo, hi) = (m.fourier_coefficient(k - 1), m.fourier_coefficient(k + 1));
            let v = hi * lo - lo.conj() * hi.conj();
            assert!(v.re.abs() < 1e-12);
        }
    }

    #[test]
    fn remark_examples() {
        let z = remark_gradient(&int(0), 0.0, Route::Closed, 0).unwrap();
        assert_eq!((z.re, z.im), (-1.0, 0.0));
        let z = remark_gradient(&rat(3, 2), FRAC_PI_2, Route::Closed, 0).unwrap();
        assert_eq!((z.re, z.im), (0.0, 0.5));
        let z = remark_gradient(&int(1), 0.4, Route::Closed, 0).unwrap();
        assert_eq!((z.re, z.im), (0.0, 0.0));
        for alpha in [int(0), rat(3, 4), int(1), rat(5, 4), rat(7, 4)] {
            for t in [0.0, 0.5, 2.0] {
                let a = remark_gradient(&alpha, t, Route::Closed, 0).unwrap();
                let b = remark_gradient(&alpha, t, Route::Quadrature, 64).unwrap();
                assert!(a.distance(&b) < 1e-12);
            }
        }
    }

    #[test]
    fn remark_matches_field_route() {
        // cos(theta - t) = cos t cos + sin t sin
        for alpha in [rat(1, 2), rat(3, 2)] {
            let m = riesz_measure(&alpha).unwrap();
            let t: f64 = 0.9;
            let zc = z_field_fourier(&KernelSymbol::Cos(1), &alpha, &m).unwrap();
            let zs = z_field_fourier(&KernelSymbol::Sin(1), &alpha, &m).unwrap();
            let re = t.cos() * zc.re + t.sin() * zs.re;
            let im = t.cos() * zc.im + t.sin() * zs.im;
            let r = remark_gradient(&alpha, t, Route::Closed, 0).unwrap();
            assert!((re - r.re).abs() < 1e-14 && (im - r.im).abs() < 1e-14);
        }
    }

    #[test]
    fn span_rank_examples() {
        let m = signed_measure(&rat(1, 2), 20);
        let fields: Vec<FieldVector> = KernelSymbol::trig_family(8)
            .iter()
            .map(|k| z_field_fourier(k, &rat(1, 2), &m).unwrap())
            .collect();
        assert_eq!(span_rank(&fields, 1e-12).unwrap(), 1);
        let delta = CircleMeasure::atom(Angle::Quarter(0), int(1)).unwrap();
        let pair: Vec<FieldVector> =
            KernelSymbol::riesz_pair().iter().map(|k| z_field_fourier(k, &int(0), &delta).unwrap()).collect();
        assert_eq!(span_rank(&pair, 1e-12).unwrap(), 2);
        let u = CircleMeasure::uniform(int(1)).unwrap();
        let zero: Vec<FieldVector> =
            KernelSymbol::riesz_pair().iter().map(|k| z_field_fourier(k, &int(1), &u).unwrap()).collect();
        assert_eq!(span_rank(&zero, 1e-12).unwrap(), 0);
        assert!(span_rank(&[], 1e-12).is_err());
    }

    #[test]
    fn embedding_examples() {
        let profile = lifted_profile(3, &int(1), 64).unwrap();
        let r = embed_and_project(3, &int(1), &SphereSymbol::coordinate(0), &profile, 4096).unwrap();
        assert!(!r.degenerate);
        assert!(r.e2_ratio <= 1e-8);
        // e1 component: int (1 - 3 cos^2) = 1 - 3 (1 + 1/3)/2
        assert!((r.field[0] + 1.0).abs() < 1e-12);
        let r = embed_and_project(3, &int(1), &SphereSymbol::coordinate(1), &profile, 4096).unwrap();
        assert!(r.e2_ratio < 1e-12);
        assert!(matches!(
            embed_and_project(3, &int(1), &SphereSymbol::constant(1.0), &profile, 4096),
            Err(Error::InconsistentKernel(_))
        ));
        assert!(lifted_profile(3, &int(3), 8).is_err());
    }
}
