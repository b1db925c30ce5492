//! Energies of finite atomic measures on cubes and the partial-energy bound
//! for families of rotations.

use crate::error::{Error, Result};
use crate::quadrature::pairwise_sum;

/// Closed axis-parallel cube.
#[derive(Debug, Clone, PartialEq)]
pub struct Cube {
    pub center: Vec<f64>,
    pub side: f64,
}

impl Cube {
    pub fn new(center: Vec<f64>, side: f64) -> Result<Self> {
        if !(side > 0.0) || center.is_empty() {
            return Err(Error::Domain(format!("cube needs positive side and dimension, got side {side}")));
        }
        Ok(Cube { center, side })
    }

    pub fn dimension(&self) -> usize {
        self.center.len()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dimension() && p.iter().zip(&self.center).all(|(a, c)| (a - c).abs() <= 0.5 * self.side)
    }

    /// Same center, side multiplied by `lambda`.
    pub fn dilate(&self, lambda: f64) -> Cube {
        Cube { center: self.center.clone(), side: self.side * lambda }
    }
}

/// Positive point masses in `R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure {
    pub points: Vec<Vec<f64>>,
    pub masses: Vec<f64>,
}

impl AtomicMeasure {
    pub fn new(points: Vec<Vec<f64>>, masses: Vec<f64>) -> Result<Self> {
        if points.len() != masses.len() || points.is_empty() {
            return Err(Error::Dimension(format!("{} points with {} masses", points.len(), masses.len())));
        }
        let dim = points[0].len();
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::Dimension("points of mixed dimension".into()));
        }
        if masses.iter().any(|m| !(*m > 0.0)) {
            return Err(Error::Domain("atomic masses must be positive".into()));
        }
        Ok(AtomicMeasure { points, masses })
    }

    pub fn unit(points: Vec<Vec<f64>>) -> Result<Self> {
        let masses = vec![1.0; points.len()];
        Self::new(points, masses)
    }

    pub fn total(&self) -> f64 {
        pairwise_sum(&self.masses)
    }
}

fn check_support(cube: &Cube, w: &AtomicMeasure) -> Result<()> {
    for p in &w.points {
        if !cube.contains(p) {
            return Err(Error::SupportViolation(format!("atom {p:?} outside the cube")));
        }
    }
    Ok(())
}

/// `(1/|J|_w^2) sum_ij m_i m_j f(x_i - x_j) / side^2`.
fn double_sum(cube: &Cube, w: &AtomicMeasure, f: impl Fn(&[f64]) -> f64) -> Result<f64> {
    check_support(cube, w)?;
    let mass = w.total();
    if mass <= 0.0 {
        return Err(Error::ZeroMass);
    }
    let mut terms = Vec::with_capacity(w.points.len() * w.points.len());
    let mut diff = vec![0.0; cube.dimension()];
    for (p, mp) in w.points.iter().zip(&w.masses) {
        for (q, mq) in w.points.iter().zip(&w.masses) {
            for (d, (a, b)) in diff.iter_mut().zip(p.iter().zip(q)) {
                *d = a - b;
            }
            terms.push(mp * mq * f(&diff));
        }
    }
    Ok(pairwise_sum(&terms) / (mass * mass * cube.side * cube.side))
}

/// `E(J, w)`; also checks the second-moment form
/// `E^2 = (2/|J|_w) sum m_i |x_i - mean|^2 / side^2`.
pub fn energy(cube: &Cube, w: &AtomicMeasure) -> Result<f64> {
    let e2 = double_sum(cube, w, |d| d.iter().map(|v| v * v).sum())?;
    let mass = w.total();
    let mean: Vec<f64> = (0..cube.dimension())
        .map(|i| pairwise_sum(&w.points.iter().zip(&w.masses).map(|(p, m)| m * p[i]).collect::<Vec<_>>()) / mass)
        .collect();
    let moment: Vec<f64> = w
        .points
        .iter()
        .zip(&w.masses)
        .map(|(p, m)| m * p.iter().zip(&mean).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
        .collect();
    let second = 2.0 * pairwise_sum(&moment) / (mass * cube.side * cube.side);
    if (e2 - second).abs() > 1e-12 * e2.max(1.0) {
        return Err(Error::IdentityFailed {
            identity: "second_moment".into(),
            n: w.points.len(),
            detail: format!("double sum {e2} vs second moment {second}"),
        });
    }
    Ok(e2.sqrt())
}

/// `E^j(J, w)` for the 0-based axis `j`.
pub fn coordinate_energy(j: usize, cube: &Cube, w: &AtomicMeasure) -> Result<f64> {
    if j >= cube.dimension() {
        return Err(Error::Dimension(format!("axis {j} in dimension {}", cube.dimension())));
    }
    Ok(double_sum(cube, w, |d| d[j] * d[j])?.sqrt())
}

/// Square matrix checked to be a rotation: `R^T R = I` within `1e-12` and
/// determinant 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Rotation {
    rows: Vec<Vec<f64>>,
}

impl Rotation {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::NotRotation("not a square matrix".into()));
        }
        for i in 0..n {
            for j in 0..n {
                let dot: f64 = (0..n).map(|k| rows[k][i] * rows[k][j]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                if (dot - target).abs() > 1e-12 {
                    return Err(Error::NotRotation(format!("(R^T R)[{i}][{j}] = {dot}")));
                }
            }
        }
        let det = determinant(&rows);
        if (det - 1.0).abs() > 1e-12 {
            return Err(Error::NotRotation(format!("determinant {det}")));
        }
        Ok(Rotation { rows })
    }

    pub fn identity(n: usize) -> Self {
        Rotation { rows: (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect() }
    }

    /// Counterclockwise rotation of the plane by `phi`.
    pub fn planar(phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        Rotation { rows: vec![vec![c, -s], vec![s, c]] }
    }

    pub fn dimension(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }
}

fn determinant(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut det = 1.0;
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap_or(k);
        if a[p][k] == 0.0 {
            return 0.0;
        }
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        det *= a[k][k];
        for i in (k + 1)..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
        }
    }
    det
}

/// `E_R^j(J, w)`: coordinate `j` of the rotated differences `R(x - z)`.
pub fn rotated_partial_energy(r: &Rotation, j: usize, cube: &Cube, w: &AtomicMeasure) -> Result<f64> {
    if r.dimension() != cube.dimension() || j >= r.dimension() {
        return Err(Error::Dimension(format!("rotation of size {} with axis {j}", r.dimension())));
    }
    let row = &r.rows[j];
    Ok(double_sum(cube, w, |d| {
        let v: f64 = row.iter().zip(d).map(|(a, b)| a * b).sum();
        v * v
    })?
    .sqrt())
}

/// Rotations `R_l` with the matrix `M` whose rows are the first rows of the
/// `R_l`, so that `sum_l E_{R_l}^1 (J, w)^2` is the energy of `|M (x - z)|^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationSet {
    pub rotations: Vec<Rotation>,
}

impl RotationSet {
    pub fn new(rotations: Vec<Rotation>) -> Result<Self> {
        let Some(first) = rotations.first() else {
            return Err(Error::Dimension("empty rotation set".into()));
        };
        let n = first.dimension();
        if rotations.iter().any(|r| r.dimension() != n) {
            return Err(Error::Dimension("rotations of mixed dimension".into()));
        }
        Ok(RotationSet { rotations })
    }

    pub fn matrix_m(&self) -> Vec<Vec<f64>> {
        self.rotations.iter().map(|r| r.rows[0].clone()).collect()
    }

    /// `M^T M`.
    pub fn gram(&self) -> Vec<Vec<f64>> {
        let m = self.matrix_m();
        let n = self.rotations[0].dimension();
        (0..n).map(|i| (0..n).map(|j| m.iter().map(|row| row[i] * row[j]).sum()).collect()).collect()
    }
}

/// Least eigenvalue of a symmetric matrix: closed form for sizes 1 to 3,
/// a symmetric eigensolver otherwise.
pub fn least_eigenvalue(a: &[Vec<f64>]) -> f64 {
    match a.len() {
        1 => a[0][0],
        2 => {
            let mean = 0.5 * (a[0][0] + a[1][1]);
            let spread = (0.25 * (a[0][0] - a[1][1]).powi(2) + a[0][1] * a[0][1]).sqrt();
            mean - spread
        }
        3 => least_eigenvalue_3(a),
        _ => symmetric_eigenvalues(a).into_iter().fold(f64::INFINITY, f64::min),
    }
}

fn least_eigenvalue_3(a: &[Vec<f64>]) -> f64 {
    let p1 = a[0][1].powi(2) + a[0][2].powi(2) + a[1][2].powi(2);
    let q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
    if p1 == 0.0 {
        return a[0][0].min(a[1][1]).min(a[2][2]);
    }
    let p2 = (a[0][0] - q).powi(2) + (a[1][1] - q).powi(2) + (a[2][2] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let b: Vec<Vec<f64>> = (0..3)
        .map(|i| (0..3).map(|j| (a[i][j] - if i == j { q } else { 0.0 }) / p).collect())
        .collect();
    let r = (determinant(&b) / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos()
}

/// All eigenvalues of a symmetric matrix.
pub fn symmetric_eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| a[i][j]);
    m.symmetric_eigenvalues().iter().copied().collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialEnergyBound {
    /// `E(J, w)^2`.
    pub lhs: f64,
    /// `(1/eps) sum_l E_{R_l}^1(J, w)^2`; infinite when `M` is singular.
    pub rhs: f64,
    /// Least eigenvalue of `M^T M`.
    pub eps: f64,
    pub singular: bool,
}

impl PartialEnergyBound {
    pub fn holds(&self) -> bool {
        self.singular || self.lhs <= self.rhs + 1e-12
    }
}

pub fn partial_energy_bound(set: &RotationSet, cube: &Cube, w: &AtomicMeasure) -> Result<PartialEnergyBound> {
    let lhs = energy(cube, w)?.powi(2);
    let partial: Vec<f64> = set
        .rotations
        .iter()
        .map(|r| rotated_partial_energy(r, 0, cube, w).map(|e| e * e))
        .collect::<Result<_>>()?;
    let eps = least_eigenvalue(&set.gram());
    let singular = eps <= 1e-12;
    let rhs = if singular { f64::INFINITY } else { pairwise_sum(&partial) / eps };
    Ok(PartialEnergyBound { lhs, rhs, eps: eps.max(0.0), singular })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_4;

    fn unit_square() -> Cube {
        Cube::new(vec![0.5, 0.5], 1.0).unwrap()
    }

    fn diagonal_pair() -> AtomicMeasure {
        AtomicMeasure::unit(vec![vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap()
    }

    /// Gram-Schmidt on a random matrix, with the sign fixed to determinant 1.
    pub(crate) fn random_rotation(rng: &mut ChaCha8Rng, n: usize) -> Rotation {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        while rows.len() < n {
            let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            for r in &rows {
                let d: f64 = r.iter().zip(&v).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(r).for_each(|(a, b)| *a -= d * b);
            }
            let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            if norm > 1e-3 {
                rows.push(v.into_iter().map(|a| a / norm).collect());
            }
        }
        if determinant(&rows) < 0.0 {
            rows[0].iter_mut().for_each(|a| *a = -*a);
        }
        Rotation::new(rows).unwrap()
    }

    fn random_measure(rng: &mut ChaCha8Rng, cube: &Cube, atoms: usize) -> AtomicMeasure {
        let points = (0..atoms)
            .map(|_| cube.center.iter().map(|c| c + cube.side * rng.gen_range(-0.5..0.5)).collect())
            .collect();
        let masses = (0..atoms).map(|_| rng.gen_range(0.1..2.0)).collect();
        AtomicMeasure::new(points, masses).unwrap()
    }

    #[test]
    fn energy_examples() {
        let single = AtomicMeasure::unit(vec![vec![0.2, 0.3]]).unwrap();
        assert_eq!(energy(&unit_square(), &single).unwrap(), 0.0);
        assert!((energy(&unit_square(), &diagonal_pair()).unwrap() - 1.0).abs() < 1e-15);
        let e1 = coordinate_energy(1, &unit_square(), &diagonal_pair()).unwrap();
        assert!((e1 * e1 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn two_atoms_at_distance() {
        // brute-force double sum: (1/4)(2 d^2)/s^2
        let cube = Cube::new(vec![0.0, 0.0], 3.0).unwrap();
        let d: f64 = 1.3;
        let w = AtomicMeasure::unit(vec![vec![0.0, 0.0], vec![d * 0.6, d * 0.8]]).unwrap();
        let e = energy(&cube, &w).unwrap();
        assert!((e * e - d * d / (2.0 * 9.0)).abs() < 1e-15);
    }

    #[test]
    fn energy_errors() {
        let w = AtomicMeasure::unit(vec![vec![2.0, 0.0]]).unwrap();
        assert!(matches!(energy(&unit_square(), &w), Err(Error::SupportViolation(_))));
        assert!(AtomicMeasure::new(vec![vec![0.0]], vec![0.0]).is_err());
        assert!(Cube::new(vec![0.0], 0.0).is_err());
    }

    #[test]
    fn vertical_segment_kills_first_coordinate() {
        let w = AtomicMeasure::unit((0..5).map(|i| vec![0.5, 0.1 + 0.2 * i as f64]).collect()).unwrap();
        assert_eq!(coordinate_energy(0, &unit_square(), &w).unwrap(), 0.0);
        assert!(energy(&unit_square(), &w).unwrap() > 0.0);
    }

    #[test]
    fn rotated_examples() {
        let cube = unit_square();
        let w = diagonal_pair();
        let id = Rotation::identity(2);
        for j in 0..2 {
            assert_eq!(rotated_partial_energy(&id, j, &cube, &w).unwrap(), coordinate_energy(j, &cube, &w).unwrap());
        }
        let r = Rotation::planar(-FRAC_PI_4);
        assert!((rotated_partial_energy(&r, 0, &cube, &w).unwrap() - 1.0).abs() < 1e-15);
        assert!(rotated_partial_energy(&r, 1, &cube, &w).unwrap() < 1e-15);
        assert!(matches!(Rotation::new(vec![vec![1.0, 0.0], vec![0.0, -1.0]]), Err(Error::NotRotation(_))));
        assert!(matches!(Rotation::new(vec![vec![2.0, 0.0], vec![0.0, 0.5]]), Err(Error::NotRotation(_))));
    }

    #[test]
    fn bound_examples() {
        let cube = unit_square();
        let w = AtomicMeasure::unit(vec![vec![0.1, 0.2], vec![0.9, 0.4], vec![0.3, 0.8]]).unwrap();
        let set = RotationSet::new(vec![Rotation::identity(2), Rotation::planar(std::f64::consts::FRAC_PI_2)]).unwrap();
        let b = partial_energy_bound(&set, &cube, &w).unwrap();
        assert!((b.eps - 1.0).abs() < 1e-15);
        assert!((b.lhs - b.rhs).abs() < 1e-14);
        let set = RotationSet::new(vec![Rotation::identity(2), Rotation::identity(2)]).unwrap();
        let b = partial_energy_bound(&set, &cube, &w).unwrap();
        assert!(b.singular && b.eps.abs() < 1e-15 && b.holds());
    }

    #[test]
    fn eigenvalue_routes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 2..=5 {
            for _ in 0..20 {
                let b: Vec<Vec<f64>> = (0..n + 1).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
                let a: Vec<Vec<f64>> =
                    (0..n).map(|i| (0..n).map(|j| b.iter().map(|r| r[i] * r[j]).sum()).collect()).collect();
                let jac = symmetric_eigenvalues(&a).into_iter().fold(f64::INFINITY, f64::min);
                assert!((least_eigenvalue(&a) - jac).abs() < 1e-10, "n = {n}");
                let trace: f64 = (0..n).map(|i| a[i][i]).sum();
                assert!((symmetric_eigenvalues(&a).iter().sum::<f64>() - trace).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn bound_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cube = unit_square();
        for _ in 0..100 {
            let set = RotationSet::new(vec![random_rotation(&mut rng, 2), random_rotation(&mut rng, 2)]).unwrap();
            let w = random_measure(&mut rng, &cube, 6);
            let b = partial_energy_bound(&set, &cube, &w).unwrap();
            assert!(b.holds(), "{b:?}");
        }
    }

    proptest! {
        #[test]
        fn rotation_invariance(seed in 0u64..10_000, n in 2usize..5, atoms in 2usize..8) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let cube = Cube::new(vec![0.0; n], 2.0).unwrap();
            let w = random_measure(&mut rng, &cube, atoms);
            let r = random_rotation(&mut rng, n);
            let total: f64 = (0..n).map(|j| rotated_partial_energy(&r, j, &cube, &w).unwrap().powi(2)).sum();
            let coords: f64 = (0..n).map(|j| coordinate_energy(j, &cube, &w).unwrap().powi(2)).sum();
            let e2 = energy(&cube, &w).unwrap().powi(2);
            prop_assert!((total - e2).abs() < 1e-12);
            prop_assert!((coords - e2).abs() < 1e-12);
        }

        #[test]
        fn scaling_and_mass_invariance(seed in 0u64..10_000, lambda in 1.0f64..8.0, c in 0.1f64..10.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let cube = Cube::new(vec![0.0, 0.0], 1.0).unwrap();
            let w = random_measure(&mut rng, &cube, 5);
            let e = energy(&cube, &w).unwrap();
            let big = energy(&cube.dilate(lambda), &w).unwrap();
            prop_assert!((big - e / lambda).abs() < 1e-12);
            let heavy = AtomicMeasure::new(w.points.clone(), w.masses.iter().map(|m| m * c).collect()).unwrap();
            prop_assert!((energy(&cube, &heavy).unwrap() - e).abs() < 1e-12);
        }
    }
}
