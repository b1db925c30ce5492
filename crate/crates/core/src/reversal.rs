//! Planar measures on a circle around a square, the transforms
//! `T mu(x) = int K(x - y) d mu(y)` with `K(w) = Omega(w/|w|)/|w|^{2-alpha}`,
//! the Poisson integral, linearization residuals and the energy-reversal
//! ratio.
//!
//! A circle measure `profile` becomes a planar measure of radius `R` around
//! `center` by placing the mass at angle `theta` at `center - R u(theta)`,
//! so `theta` is the direction from the support point to the center. With
//! this convention the gradient of `T mu` at the center is
//! `R^{alpha-3} Z(profile)`.

use num_traits::Zero;
use serde::Serialize;

use crate::densities::{coeff_sequence, density_measure, riesz_measure, CircleMeasure, Variant};
use crate::energies::{coordinate_energy, energy, AtomicMeasure, Cube};
use crate::error::{Error, Result};
use crate::exact::{format_rational, to_f64, ExactRational};
use crate::fields::{z_field_fourier, FieldVector, KernelSymbol};
use crate::quadrature::pairwise_sum;

#[derive(Debug, Clone, PartialEq)]
pub struct PlanarMeasure {
    pub radius: f64,
    pub center: [f64; 2],
    pub profile: CircleMeasure,
}

impl PlanarMeasure {
    pub fn new(radius: f64, center: [f64; 2], profile: CircleMeasure) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::Domain(format!("support radius must be positive, got {radius}")));
        }
        Ok(PlanarMeasure { radius, center, profile })
    }

    /// Support point carrying the profile mass at angle `theta`.
    pub fn point(&self, theta: f64) -> [f64; 2] {
        let (s, c) = theta.sin_cos();
        [self.center[0] - self.radius * c, self.center[1] - self.radius * s]
    }

    /// Requires every support point to be at distance at least
    /// `gamma * side` from the cube center.
    pub fn check_outside(&self, cube: &Cube, gamma: f64) -> Result<()> {
        if self.radius - dist(&self.center, &cube.center) < gamma * cube.side {
            return Err(Error::SupportViolation(format!("circle of radius {} is not outside {gamma} J", self.radius)));
        }
        Ok(())
    }

    pub fn mass(&self) -> f64 {
        to_f64(&self.profile.total())
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
}

/// `P(J, mu) = int side / (side + |y - c_J|)^{3-alpha} d mu(y)`.
pub fn poisson_integral(alpha: f64, cube: &Cube, mu: &PlanarMeasure, nodes: usize) -> f64 {
    let ell = cube.side;
    mu.profile.integrate(nodes, |t| {
        let y = mu.point(t);
        ell / (ell + dist(&y, &cube.center)).powf(3.0 - alpha)
    })
}

/// `K(w)` for the homogeneous kernel with angular part `omega`.
pub fn kernel(omega: &KernelSymbol, alpha: f64, w: [f64; 2]) -> f64 {
    let r = w[0].hypot(w[1]);
    omega.value(w[1].atan2(w[0])) / r.powf(2.0 - alpha)
}

/// `grad K(w) = [(alpha-2) Omega u + Omega' u_perp] / |w|^{3-alpha}`.
pub fn kernel_gradient(omega: &KernelSymbol, alpha: f64, w: [f64; 2]) -> [f64; 2] {
    let r = w[0].hypot(w[1]);
    let t = w[1].atan2(w[0]);
    let (v, d) = (omega.value(t), omega.derivative(t));
    let (u0, u1) = (w[0] / r, w[1] / r);
    let scale = r.powf(alpha - 3.0);
    [((alpha - 2.0) * v * u0 - d * u1) * scale, ((alpha - 2.0) * v * u1 + d * u0) * scale]
}

fn transform_once(omega: &KernelSymbol, alpha: f64, mu: &PlanarMeasure, x: &[f64], nodes: usize) -> f64 {
    mu.profile.integrate(nodes, |t| {
        let y = mu.point(t);
        kernel(omega, alpha, [x[0] - y[0], x[1] - y[1]])
    })
}

/// `T mu(x)` and its node-doubling error estimate. Requires `x` strictly
/// inside the support circle.
pub fn apply_transform(omega: &KernelSymbol, alpha: f64, mu: &PlanarMeasure, x: &[f64], nodes: usize) -> Result<(f64, f64)> {
    if x.len() != 2 {
        return Err(Error::Dimension(format!("planar point expected, got dimension {}", x.len())));
    }
    if dist(x, &mu.center) >= mu.radius {
        return Err(Error::SupportViolation(format!("{x:?} is not inside the support circle")));
    }
    let v = transform_once(omega, alpha, mu, x, nodes);
    let refined = transform_once(omega, alpha, mu, x, 2 * nodes);
    Ok((v, (v - refined).abs()))
}

/// `grad T mu (x) = int grad K(x - y) d mu(y)` by quadrature.
pub fn gradient_at(omega: &KernelSymbol, alpha: f64, mu: &PlanarMeasure, x: &[f64], nodes: usize) -> [f64; 2] {
    mu.profile.integrate2(nodes, |t| {
        let y = mu.point(t);
        kernel_gradient(omega, alpha, [x[0] - y[0], x[1] - y[1]])
    })
}

/// Residual of the first-order Taylor replacement around the cube center,
/// `[T mu(x) - T mu(z)] - (x - z) . grad T mu(c_J)`, and its size relative
/// to `(P/side) |x - z|`.
pub fn linearization_residual(
    omega: &KernelSymbol,
    alpha: f64,
    mu: &PlanarMeasure,
    cube: &Cube,
    x: &[f64],
    z: &[f64],
    nodes: usize,
) -> Result<(f64, f64)> {
    let (tx, _) = apply_transform(omega, alpha, mu, x, nodes)?;
    let (tz, _) = apply_transform(omega, alpha, mu, z, nodes)?;
    let g = gradient_at(omega, alpha, mu, &cube.center, nodes);
    let linear = (x[0] - z[0]) * g[0] + (x[1] - z[1]) * g[1];
    let residual = tx - tz - linear;
    let scale = poisson_integral(alpha, cube, mu, nodes) / cube.side * dist(x, z);
    let ratio = if scale == 0.0 { 0.0 } else { residual.abs() / scale };
    Ok((residual, ratio))
}

/// Coordinate axis along which every field vector points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldAxis {
    E1,
    E2,
}

impl FieldAxis {
    fn index(self) -> usize {
        match self {
            FieldAxis::E1 => 0,
            FieldAxis::E2 => 1,
        }
    }
}

/// `count >= 2` unit atoms equispaced on the midline of `J` perpendicular to
/// `axis`: the vertical midline for `E1`, the horizontal one for `E2`.
pub fn build_counterexample_omega(axis: FieldAxis, cube: &Cube, count: usize) -> Result<AtomicMeasure> {
    if count < 2 {
        return Err(Error::Domain(format!("need at least 2 atoms for positive energy, got {count}")));
    }
    if cube.dimension() != 2 {
        return Err(Error::Dimension("planar cube expected".into()));
    }
    let along = 1 - axis.index();
    let points = (0..count)
        .map(|i| {
            let offset = cube.side * (-0.4 + 0.8 * i as f64 / (count - 1) as f64);
            let mut p = cube.center.clone();
            p[along] += offset;
            p
        })
        .collect();
    AtomicMeasure::unit(points)
}

/// Axis of the Riesz fields for the lifted Riesz measure: `E1` for
/// `alpha <= 1` (the fields vanish at 1) and `E2` above.
pub fn riesz_axis(alpha: &ExactRational) -> FieldAxis {
    if *alpha > ExactRational::from_integer(1.into()) {
        FieldAxis::E2
    } else {
        FieldAxis::E1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    Riesz,
    TrigVector,
}

/// Kernels and angular profile of one demonstration.
#[derive(Debug, Clone)]
pub struct ReversalSetup {
    pub alpha: ExactRational,
    pub construction: Construction,
    pub kernels: Vec<KernelSymbol>,
    pub profile: CircleMeasure,
    /// Truncation order of the signed density, when used.
    pub terms: Option<usize>,
}

impl ReversalSetup {
    /// Riesz pair against the lifted Riesz measure.
    pub fn riesz(alpha: &ExactRational) -> Result<Self> {
        Ok(ReversalSetup {
            alpha: alpha.clone(),
            construction: Construction::Riesz,
            kernels: KernelSymbol::riesz_pair(),
            profile: riesz_measure(alpha)?,
            terms: None,
        })
    }

    /// `{cos k, sin k : k <= m}` against the signed density truncated at `n`.
    pub fn trig_vector(alpha: &ExactRational, m: u32, n: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Domain("trig vector needs M >= 1".into()));
        }
        let seq = coeff_sequence(alpha, Variant::Signed, n)?;
        Ok(ReversalSetup {
            alpha: alpha.clone(),
            construction: Construction::TrigVector,
            kernels: KernelSymbol::trig_family(m),
            profile: density_measure(&seq),
            terms: Some(n),
        })
    }

    /// Exact field vectors of the profile, one per kernel.
    pub fn fields(&self) -> Result<Vec<FieldVector>> {
        self.kernels.iter().map(|k| z_field_fourier(k, &self.alpha, &self.profile)).collect()
    }

    /// The common axis of all field vectors; vanishing fields count as `E1`.
    pub fn field_axis(&self) -> Result<FieldAxis> {
        let fields = self.fields()?;
        let exact: Vec<_> = fields.iter().filter_map(|f| f.exact.clone()).collect();
        if exact.len() != fields.len() {
            return Err(Error::Domain("field axis needs exact field vectors".into()));
        }
        if exact.iter().all(|z| z.im.is_zero()) {
            Ok(FieldAxis::E1)
        } else if exact.iter().all(|z| z.re.is_zero()) {
            Ok(FieldAxis::E2)
        } else {
            Err(Error::Domain(format!(
                "fields at alpha = {} are not parallel to a coordinate axis",
                format_rational(&self.alpha)
            )))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReversalReport {
    pub alpha: String,
    pub construction: Construction,
    pub gamma: f64,
    pub kernels: Vec<String>,
    pub field_axis: FieldAxis,
    /// `E_w E_w sum_l |T_l mu(x) - T_l mu(z)|^2`.
    pub lhs: f64,
    /// Node-doubling error bar propagated to `lhs`.
    pub lhs_error: f64,
    /// `lhs` recomputed from the linearization residuals alone.
    pub lhs_from_residuals: f64,
    pub energy_total: f64,
    pub energy_coordinate_killed: f64,
    pub poisson: f64,
    /// `lhs / (E^2 P^2)`.
    pub ratio: f64,
    pub c0: f64,
    /// `C0 ratio < 1`: the reversal inequality fails for this `C0`.
    pub fails: bool,
    /// `ratio <= C0 / 10`.
    pub below_tenth: bool,
    /// Largest `|(x - z) . Z| / (|x - z| |Z|)` over atom pairs and kernels.
    pub linear_term_max: f64,
    /// RMS and max over atom pairs of `|residual| / ((P/side) |x - z|)`.
    pub residual_ratio_rms: f64,
    pub residual_ratio_max: f64,
    /// Largest gap between the closed-form and quadrature gradients at `c_J`.
    pub gradient_route_gap: f64,
    pub truncation_terms: Option<usize>,
    pub truncation_grid_min: Option<f64>,
}

/// Evaluates the reversal ratio for `mu` on the circle of radius `radius`
/// around the center of `cube`, with `omega` on the midline killing the
/// field axis.
pub fn reversal_report_for(
    setup: &ReversalSetup,
    cube: &Cube,
    radius: f64,
    omega_atoms: usize,
    c0: f64,
    nodes: usize,
) -> Result<ReversalReport> {
    let gamma = radius / cube.side;
    let center = [cube.center[0], cube.center[1]];
    let mu = PlanarMeasure::new(radius, center, setup.profile.clone())?;
    mu.check_outside(cube, gamma)?;
    let alpha = to_f64(&setup.alpha);
    let axis = setup.field_axis()?;
    let omega = build_counterexample_omega(axis, cube, omega_atoms)?;
    let poisson = poisson_integral(alpha, cube, &mu, nodes);
    let energy_total = energy(cube, &omega)?;
    let energy_coordinate_killed = coordinate_energy(axis.index(), cube, &omega)?;
    let scale = radius.powf(alpha - 3.0);
    let fields = setup.fields()?;

    let atoms = &omega.points;
    let masses = &omega.masses;
    let total_mass = omega.total();
    let mut values = Vec::with_capacity(setup.kernels.len());
    let mut gradient_route_gap: f64 = 0.0;
    for (k, field) in setup.kernels.iter().zip(&fields) {
        let tv: Vec<(f64, f64)> = atoms.iter().map(|p| apply_transform(k, alpha, &mu, p, nodes)).collect::<Result<_>>()?;
        let g = gradient_at(k, alpha, &mu, &cube.center, nodes);
        let z = [scale * field.re, scale * field.im];
        gradient_route_gap = gradient_route_gap.max(dist(&g, &z));
        values.push((tv, z));
    }

    let mut lhs_terms = Vec::new();
    let mut err_terms = Vec::new();
    let mut residual_terms = Vec::new();
    let mut ratio_sq = Vec::new();
    let mut ratio_max: f64 = 0.0;
    let mut linear_term_max: f64 = 0.0;
    for i in 0..atoms.len() {
        for j in 0..atoms.len() {
            let w = masses[i] * masses[j];
            let dx = [atoms[i][0] - atoms[j][0], atoms[i][1] - atoms[j][1]];
            let sep = dx[0].hypot(dx[1]);
            let mut pair_sq = 0.0;
            let mut pair_err = 0.0;
            let mut res_sq = 0.0;
            for (tv, z) in &values {
                let diff = tv[i].0 - tv[j].0;
                pair_sq += diff * diff;
                pair_err += 2.0 * diff.abs() * (tv[i].1 + tv[j].1);
                let linear = dx[0] * z[0] + dx[1] * z[1];
                let znorm = z[0].hypot(z[1]);
                if sep > 0.0 && znorm > 0.0 {
                    linear_term_max = linear_term_max.max(linear.abs() / (sep * znorm));
                }
                let res = diff - linear;
                res_sq += res * res;
            }
            lhs_terms.push(w * pair_sq);
            err_terms.push(w * pair_err);
            residual_terms.push(w * res_sq);
            if i != j {
                let r = res_sq.sqrt() / (poisson / cube.side * sep);
                ratio_sq.push(r * r);
                ratio_max = ratio_max.max(r);
            }
        }
    }
    let norm = total_mass * total_mass;
    let lhs = pairwise_sum(&lhs_terms) / norm;
    let lhs_error = pairwise_sum(&err_terms) / norm;
    let lhs_from_residuals = pairwise_sum(&residual_terms) / norm;
    let ratio = lhs / (energy_total * energy_total * poisson * poisson);
    let residual_ratio_rms = (pairwise_sum(&ratio_sq) / ratio_sq.len() as f64).sqrt();
    let truncation_grid_min = setup.profile.smooth().filter(|_| setup.terms.is_some()).map(|s| s.density.grid_min(4096, false));

    Ok(ReversalReport {
        alpha: format_rational(&setup.alpha),
        construction: setup.construction,
        gamma,
        kernels: setup.kernels.iter().map(KernelSymbol::name).collect(),
        field_axis: axis,
        lhs,
        lhs_error,
        lhs_from_residuals,
        energy_total,
        energy_coordinate_killed,
        poisson,
        ratio,
        c0,
        fails: c0 * ratio < 1.0,
        below_tenth: ratio <= c0 / 10.0,
        linear_term_max,
        residual_ratio_rms,
        residual_ratio_max: ratio_max,
        gradient_route_gap,
        truncation_terms: setup.terms,
        truncation_grid_min,
    })
}

/// Unit square at the origin, `mu` on the circle of radius `gamma`.
pub fn reversal_ratio(setup: &ReversalSetup, gamma: f64, c0: f64, nodes: usize) -> Result<ReversalReport> {
    if !(gamma > 2.0) {
        return Err(Error::Domain(format!("gamma must exceed 2, got {gamma}")));
    }
    let cube = Cube::new(vec![0.0, 0.0], 1.0)?;
    reversal_report_for(setup, &cube, gamma, 5, c0, nodes)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReversalSweep {
    pub reports: Vec<ReversalReport>,
    /// `ratio` strictly decreasing along the sweep.
    pub decreasing: bool,
    /// Least-squares decay exponent of the RMS residual ratio in `gamma`;
    /// absent when a residual vanishes.
    pub delta_hat: Option<f64>,
}

pub fn sweep(setup: &ReversalSetup, gammas: &[f64], c0: f64, nodes: usize) -> Result<ReversalSweep> {
    let reports: Vec<ReversalReport> = gammas.iter().map(|g| reversal_ratio(setup, *g, c0, nodes)).collect::<Result<_>>()?;
    let decreasing = reports.windows(2).all(|w| w[1].ratio < w[0].ratio);
    let delta_hat = decay_exponent(
        &reports.iter().map(|r| r.gamma).collect::<Vec<_>>(),
        &reports.iter().map(|r| r.residual_ratio_rms).collect::<Vec<_>>(),
    );
    Ok(ReversalSweep { reports, decreasing, delta_hat })
}

/// `-slope` of the least-squares line through `(log g, log e)`.
pub fn decay_exponent(gammas: &[f64], values: &[f64]) -> Option<f64> {
    if gammas.len() < 2 || values.iter().any(|v| !(*v > 0.0)) {
        return None;
    }
    let xs: Vec<f64> = gammas.iter().map(|g| g.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Some(-sxy / sxx)
}
