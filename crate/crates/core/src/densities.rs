//! Coefficient sequences, cosine-series densities on the circle and finite
//! circle measures built from atoms plus a smooth part.
//!
//! Fourier coefficients use `mu^(k) = int e^{-ik theta} d mu(theta)`, and a
//! smooth part of mass `m` means the measure `m rho(theta) d theta / 2 pi`
//! for a density `rho` of mean one.

use std::f64::consts::FRAC_PI_2;

use num_complex::{Complex, Complex64};
use num_traits::{One, Signed, Zero};

use crate::certificate::{summarize_rational, Certificate};
use crate::error::{Error, Result};
use crate::exact::{format_rational, int, to_f64, ExactRational};
use crate::quadrature::{circle_mean, circle_mean2, pairwise_sum};
use crate::toeplitz;

pub type ExactComplex = Complex<ExactRational>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Signed,
    Absolute,
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "signed" => Ok(Variant::Signed),
            "absolute" => Ok(Variant::Absolute),
            other => Err(Error::Parse(other.to_string())),
        }
    }
}

/// Ratio `a_m = -(2m-1-x)/(2m-1+x)` between consecutive signed terms.
pub fn step_ratio(m: u64, x: &ExactRational) -> ExactRational {
    let odd = int(2 * m as i64 - 1);
    -(&odd - x) / (&odd + x)
}

/// Terms `b_1..b_N` of the signed or absolute product sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSequence {
    pub x: ExactRational,
    pub variant: Variant,
    pub terms: Vec<ExactRational>,
}

impl CoefficientSequence {
    /// Planar exponent `2 - x`.
    pub fn alpha(&self) -> ExactRational {
        int(2) - &self.x
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `b_n` with `b_0 = 1`.
    pub fn term(&self, n: usize) -> ExactRational {
        if n == 0 {
            ExactRational::one()
        } else {
            self.terms[n - 1].clone()
        }
    }

    /// The step ratio used by this variant at index `m`.
    pub fn ratio(&self, m: u64) -> ExactRational {
        let a = step_ratio(m, &self.x);
        match self.variant {
            Variant::Signed => a,
            Variant::Absolute => a.abs(),
        }
    }
}

/// Coefficients for the planar exponent `alpha`, `0 <= alpha < 2`.
pub fn coeff_sequence(alpha: &ExactRational, variant: Variant, n: usize) -> Result<CoefficientSequence> {
    if alpha.is_negative() || *alpha >= int(2) {
        return Err(Error::Domain(format!("alpha = {} outside [0, 2)", format_rational(alpha))));
    }
    coeff_sequence_x(&(int(2) - alpha), variant, n)
}

/// Coefficients for a raw parameter `x > 0`.
pub fn coeff_sequence_x(x: &ExactRational, variant: Variant, n: usize) -> Result<CoefficientSequence> {
    if !x.is_positive() {
        return Err(Error::Domain(format!("x = {} must be positive", format_rational(x))));
    }
    if n == 0 {
        return Err(Error::Domain("truncation order must be positive".into()));
    }
    let mut terms = Vec::with_capacity(n);
    let mut b = ExactRational::one();
    for m in 1..=n as u64 {
        let a = step_ratio(m, x);
        b *= match variant {
            Variant::Signed => a,
            Variant::Absolute => a.abs(),
        };
        terms.push(b.clone());
    }
    Ok(CoefficientSequence { x: x.clone(), variant, terms })
}

/// `1 + 2 sum_{n=1}^{N} b_n cos(2 n theta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierDensity {
    terms: Vec<ExactRational>,
    floats: Vec<f64>,
}

impl FourierDensity {
    /// The constant density 1.
    pub fn constant() -> Self {
        FourierDensity { terms: Vec::new(), floats: Vec::new() }
    }

    pub fn from_sequence(seq: &CoefficientSequence) -> Self {
        Self::from_terms(seq.terms.clone())
    }

    pub fn from_terms(terms: Vec<ExactRational>) -> Self {
        let floats = terms.iter().map(to_f64).collect();
        FourierDensity { terms, floats }
    }

    pub fn order(&self) -> usize {
        self.terms.len()
    }

    pub fn mean(&self) -> ExactRational {
        ExactRational::one()
    }

    /// Exact coefficient at frequency `k`: `b_{|k|/2}` for even `k`, 0 for odd.
    pub fn coefficient(&self, k: i64) -> ExactRational {
        let k = k.unsigned_abs() as usize;
        if k == 0 {
            ExactRational::one()
        } else if k % 2 == 1 || k / 2 > self.terms.len() {
            ExactRational::zero()
        } else {
            self.terms[k / 2 - 1].clone()
        }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let parts: Vec<f64> = self
            .floats
            .iter()
            .enumerate()
            .map(|(i, b)| 2.0 * b * (2.0 * (i + 1) as f64 * theta).cos())
            .collect();
        1.0 + pairwise_sum(&parts)
    }

    /// Fejer (Cesaro) mean with weights `1 - n/(N+1)`.
    pub fn fejer_eval(&self, theta: f64) -> f64 {
        let weight_den = (self.floats.len() + 1) as f64;
        let parts: Vec<f64> = self
            .floats
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let n = (i + 1) as f64;
                2.0 * (1.0 - n / weight_den) * b * (2.0 * n * theta).cos()
            })
            .collect();
        1.0 + pairwise_sum(&parts)
    }

    /// Minimum over `grid_size` equispaced angles.
    pub fn grid_min(&self, grid_size: usize, fejer: bool) -> f64 {
        crate::quadrature::circle_nodes(grid_size, 0.0)
            .into_iter()
            .map(|t| if fejer { self.fejer_eval(t) } else { self.eval(t) })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Angle on the circle; multiples of a right angle keep Fourier data exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Angle {
    Quarter(i32),
    Radians(f64),
}

impl Angle {
    pub fn radians(self) -> f64 {
        match self {
            Angle::Quarter(q) => q as f64 * FRAC_PI_2,
            Angle::Radians(t) => t,
        }
    }

    pub fn add(self, other: Angle) -> Angle {
        match (self, other) {
            (Angle::Quarter(a), Angle::Quarter(b)) => Angle::Quarter((a + b).rem_euclid(4)),
            _ => Angle::Radians(self.radians() + other.radians()),
        }
    }

    /// `e^{-ik theta}` exactly, when the angle is a multiple of a right angle.
    fn exact_character(self, k: i64) -> Option<ExactComplex> {
        let Angle::Quarter(q) = self else { return None };
        let (re, im) = match (k * q as i64).rem_euclid(4) {
            0 => (1, 0),
            1 => (0, -1),
            2 => (-1, 0),
            _ => (0, 1),
        };
        Some(Complex::new(int(re), int(im)))
    }

    fn character(self, k: i64) -> Complex64 {
        if let Some(c) = self.exact_character(k) {
            return Complex64::new(to_f64(&c.re), to_f64(&c.im));
        }
        Complex64::from_polar(1.0, -(k as f64) * self.radians())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub angle: Angle,
    pub mass: ExactRational,
}

/// Smooth part `mass * rho(theta - phase) d theta / 2 pi`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothPart {
    pub density: FourierDensity,
    pub mass: ExactRational,
    pub phase: Angle,
}

/// Finite positive measure on the circle: atoms plus an optional smooth part.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleMeasure {
    atoms: Vec<Atom>,
    smooth: Option<SmoothPart>,
}

impl CircleMeasure {
    pub fn new(atoms: Vec<Atom>, smooth: Option<SmoothPart>) -> Result<Self> {
        if atoms.iter().any(|a| a.mass.is_negative()) || smooth.as_ref().is_some_and(|s| s.mass.is_negative()) {
            return Err(Error::Domain("circle measure masses must be nonnegative".into()));
        }
        let m = CircleMeasure { atoms, smooth };
        if m.total().is_zero() {
            return Err(Error::ZeroMass);
        }
        Ok(m)
    }

    pub fn atom(angle: Angle, mass: ExactRational) -> Result<Self> {
        Self::new(vec![Atom { angle, mass }], None)
    }

    /// `mass d theta / 2 pi`.
    pub fn uniform(mass: ExactRational) -> Result<Self> {
        Self::from_density(FourierDensity::constant(), mass)
    }

    pub fn from_density(density: FourierDensity, mass: ExactRational) -> Result<Self> {
        Self::new(Vec::new(), Some(SmoothPart { density, mass, phase: Angle::Quarter(0) }))
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn smooth(&self) -> Option<&SmoothPart> {
        self.smooth.as_ref()
    }

    pub fn total(&self) -> ExactRational {
        let atoms = self.atoms.iter().fold(ExactRational::zero(), |acc, a| acc + &a.mass);
        atoms + self.smooth.as_ref().map_or_else(ExactRational::zero, |s| s.mass.clone())
    }

    /// Every coefficient is exact when all angles are right-angle multiples.
    pub fn exact_fourier_coefficient(&self, k: i64) -> Option<ExactComplex> {
        let mut acc = Complex::new(ExactRational::zero(), ExactRational::zero());
        for a in &self.atoms {
            let c = a.angle.exact_character(k)?;
            acc = acc + c.scale(a.mass.clone());
        }
        if let Some(s) = &self.smooth {
            let c = s.phase.exact_character(k)?;
            acc = acc + c.scale(&s.mass * s.density.coefficient(k));
        }
        Some(acc)
    }

    pub fn fourier_coefficient(&self, k: i64) -> Complex64 {
        if let Some(c) = self.exact_fourier_coefficient(k) {
            return Complex64::new(to_f64(&c.re), to_f64(&c.im));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for a in &self.atoms {
            acc += a.angle.character(k) * to_f64(&a.mass);
        }
        if let Some(s) = &self.smooth {
            acc += s.phase.character(k) * (to_f64(&s.mass) * to_f64(&s.density.coefficient(k)));
        }
        acc
    }

    /// `int f d mu`: atoms exactly, smooth part by the trapezoid rule.
    pub fn integrate(&self, nodes: usize, f: impl Fn(f64) -> f64) -> f64 {
        let atoms: Vec<f64> = self.atoms.iter().map(|a| to_f64(&a.mass) * f(a.angle.radians())).collect();
        let smooth = self.smooth.as_ref().map_or(0.0, |s| {
            let phase = s.phase.radians();
            to_f64(&s.mass) * circle_mean(nodes, phase, |t| f(t) * s.density.eval(t - phase))
        });
        pairwise_sum(&atoms) + smooth
    }

    pub fn integrate2(&self, nodes: usize, f: impl Fn(f64) -> [f64; 2]) -> [f64; 2] {
        let mut xs = Vec::with_capacity(self.atoms.len());
        let mut ys = Vec::with_capacity(self.atoms.len());
        for a in &self.atoms {
            let [u, v] = f(a.angle.radians());
            let m = to_f64(&a.mass);
            xs.push(m * u);
            ys.push(m * v);
        }
        let [su, sv] = self.smooth.as_ref().map_or([0.0, 0.0], |s| {
            let phase = s.phase.radians();
            let m = to_f64(&s.mass);
            let [u, v] = circle_mean2(nodes, phase, |t| {
                let rho = s.density.eval(t - phase);
                let [u, v] = f(t);
                [u * rho, v * rho]
            });
            [m * u, m * v]
        });
        [pairwise_sum(&xs) + su, pairwise_sum(&ys) + sv]
    }

    /// The push-forward under `theta -> theta + phi`.
    pub fn rotated(&self, phi: Angle) -> CircleMeasure {
        CircleMeasure {
            atoms: self.atoms.iter().map(|a| Atom { angle: a.angle.add(phi), mass: a.mass.clone() }).collect(),
            smooth: self.smooth.as_ref().map(|s| SmoothPart { phase: s.phase.add(phi), ..s.clone() }),
        }
    }

    /// Scales every mass by `c > 0`.
    pub fn scaled(&self, c: &ExactRational) -> CircleMeasure {
        CircleMeasure {
            atoms: self.atoms.iter().map(|a| Atom { angle: a.angle, mass: &a.mass * c }).collect(),
            smooth: self.smooth.as_ref().map(|s| SmoothPart { mass: &s.mass * c, ..s.clone() }),
        }
    }
}

/// `(sum_{n<=N} |b_n|, (1/2)(1 - 1/(2N+1)))` for the exponent 0 sequence,
/// asserted equal.
pub fn telescoping_alpha0(n: usize) -> Result<(ExactRational, ExactRational)> {
    let seq = coeff_sequence(&int(0), Variant::Signed, n)?;
    let partial = seq.terms.iter().fold(ExactRational::zero(), |acc, b| acc + b.abs());
    let closed = (int(1) - int(1) / int(2 * n as i64 + 1)) / int(2);
    if partial != closed {
        return Err(Error::IdentityFailed {
            identity: "telescoping".into(),
            n,
            detail: format!("{} != {}", format_rational(&partial), format_rational(&closed)),
        });
    }
    Ok((partial, closed))
}

/// Factor `a_{n+1} a_n + 1 - 2 a_n` in closed form for the absolute ratios.
pub fn convexity_factor_closed_form(n: u64, x: &ExactRational) -> ExactRational {
    if n == 1 && *x > int(1) {
        (int(6) - int(2) * x) / (int(3) + x)
    } else {
        let four_x = int(4) * x;
        (&four_x * x + &four_x) / ((int(2 * n as i64 + 1) + x) * (int(2 * n as i64 - 1) + x))
    }
}

/// Exact convexity and monotonicity of `{1, b_1, ..., b_N}` for the
/// absolute sequence, through the factor test and directly.
pub fn check_convexity(seq: &CoefficientSequence) -> Result<Certificate> {
    const ID: &str = "convexity";
    if seq.variant != Variant::Absolute {
        return Err(Error::VariantMismatch("convexity applies to the absolute sequence".into()));
    }
    if !seq.x.is_positive() || seq.x > int(2) {
        return Err(Error::Domain(format!("convexity requires 0 < x <= 2, got {}", format_rational(&seq.x))));
    }
    let n_max = seq.len();
    let fail = |n: usize, detail: String| Error::IdentityFailed { identity: ID.into(), n, detail };
    let mut non_strict = Vec::new();
    let mut factors = Vec::new();
    for n in 1..n_max {
        let factor = seq.ratio(n as u64 + 1) * seq.ratio(n as u64) + int(1) - int(2) * seq.ratio(n as u64);
        let closed = convexity_factor_closed_form(n as u64, &seq.x);
        if factor != closed {
            return Err(fail(n, format!("factor {} != closed form {}", format_rational(&factor), format_rational(&closed))));
        }
        if !factor.is_positive() {
            return Err(fail(n, format!("factor {} not positive", format_rational(&factor))));
        }
        let second = seq.term(n + 1) + seq.term(n - 1) - int(2) * seq.term(n);
        if second != &factor * seq.term(n - 1) {
            return Err(fail(n, "second difference disagrees with factor test".into()));
        }
        if second.is_negative() {
            return Err(fail(n, format!("second difference {} negative", format_rational(&second))));
        }
        if second.is_zero() {
            non_strict.push(n);
        }
        if factors.len() < 4 {
            factors.push(summarize_rational(&factor));
        }
    }
    let mut flat = Vec::new();
    for n in 0..n_max {
        let (cur, next) = (seq.term(n), seq.term(n + 1));
        if next > cur {
            return Err(fail(n, "sequence increases".into()));
        }
        if next == cur {
            flat.push(n);
        }
    }
    let mut cert = Certificate::pass(ID, n_max, Some(&seq.x), factors);
    if !non_strict.is_empty() {
        cert = cert.with_note(format!("non-strict convexity at {} indices starting n = {}", non_strict.len(), non_strict[0]));
    }
    if !flat.is_empty() {
        cert = cert.with_note(format!("non-strict decrease at {} indices starting n = {}", flat.len(), flat[0]));
    }
    Ok(cert)
}

/// Exact certificate plus a floating-point grid diagnostic.
#[derive(Debug, Clone, PartialEq)]
pub struct PositivityReport {
    pub certificate: Certificate,
    pub grid_min: f64,
    /// Whether `grid_min >= -1e-12` is part of the pass condition.
    pub grid_asserted: bool,
}

impl PositivityReport {
    pub fn passed(&self) -> bool {
        self.certificate.passed() && (!self.grid_asserted || self.grid_min >= -1e-12)
    }
}

/// Absolute route: convexity plus Fejer means on a grid (asserted).
/// Signed route: leading minors of the Gram matrix plus raw partial sums on a
/// grid (reported only).
pub fn positivity_certificate(alpha: &ExactRational, variant: Variant, n: usize, grid_size: usize) -> Result<PositivityReport> {
    let seq = coeff_sequence(alpha, variant, n)?;
    let density = FourierDensity::from_sequence(&seq);
    match variant {
        Variant::Absolute => {
            if *alpha < int(1) {
                return Err(Error::VariantMismatch(format!(
                    "absolute density needs 1 <= alpha < 2, got {}",
                    format_rational(alpha)
                )));
            }
            let grid_min = density.grid_min(grid_size, true);
            let certificate = check_convexity(&seq)?.with_note(format!("fejer grid min {grid_min:.3e}"));
            Ok(PositivityReport { certificate, grid_min, grid_asserted: true })
        }
        Variant::Signed => {
            let grid_min = density.grid_min(grid_size, false);
            let certificate = toeplitz::leading_minors_positive(n, &seq.x)?
                .with_note(format!("partial sum grid min {grid_min:.3e} (not asserted)"));
            Ok(PositivityReport { certificate, grid_min, grid_asserted: false })
        }
    }
}

/// Atom of mass `|alpha-1|/|alpha-3|` at angle 0 plus the remaining unit
/// mass spread uniformly.
pub fn riesz_measure(alpha: &ExactRational) -> Result<CircleMeasure> {
    if alpha.is_negative() || *alpha >= int(2) {
        return Err(Error::Domain(format!("alpha = {} outside [0, 2)", format_rational(alpha))));
    }
    let den = (alpha - int(3)).abs();
    let atom = (alpha - int(1)).abs() / &den;
    let uniform = (&den - (alpha - int(1)).abs()) / &den;
    let atoms = if atom.is_zero() { Vec::new() } else { vec![Atom { angle: Angle::Quarter(0), mass: atom }] };
    CircleMeasure::new(atoms, Some(SmoothPart { density: FourierDensity::constant(), mass: uniform, phase: Angle::Quarter(0) }))
}

/// Unit-mass measure with density `1 + 2 sum b_n cos 2n theta`.
pub fn density_measure(seq: &CoefficientSequence) -> CircleMeasure {
    CircleMeasure::from_density(FourierDensity::from_sequence(seq), int(1)).expect("unit mass is positive")
}
