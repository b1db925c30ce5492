//! The symmetric Toeplitz Gram matrices `B_n(x)` of gamma-ratio entries and
//! exact certificates for their determinant recursion.
//!
//! `B_n(x)` has unit diagonal and entry `b_m(x)` at offset `m`, where
//! `b_m(x) = prod_{j=1}^{m} -(2j-1-x)/(2j-1+x)`. Equivalently, with
//! `z = (x+1)/2`, `b_m = (z-1)...(z-m) / [z(z+1)...(z+m-1)]`.
//!
//! The certificates check, exactly:
//! * the ratio `det B_{n+1} / det B_n` against its two closed forms,
//! * `B_n v^n = c^n` for the explicit vector `v^n`,
//! * the Schur complement `1 - r_n . v^n` and the block determinant formula,
//! * the partial-fraction identity behind the complement and its residues,
//! * positivity of every leading minor.
//!
//! Rational-function identities are certified at enough distinct sample
//! points to exceed the degree of the cleared polynomial identity.

use num_traits::{One, Signed, Zero};

use crate::certificate::{summarize_rational, Certificate};
use crate::error::{Error, Result};
use crate::exact::{
    binomial, checked_div, format_rational, gamma_k_n, gamma_ratio_entry, int, omega_coeff,
    signed_product_entry, ExactRational, PolySample,
};
use crate::exact::finite_difference_n;
use crate::linalg::{self, ExactMatrix};

/// `B_n(x)`, stored by its `n` distinct offsets.
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzGram {
    order: usize,
    x: ExactRational,
    offsets: Vec<ExactRational>,
}

impl ToeplitzGram {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn x(&self) -> &ExactRational {
        &self.x
    }

    /// Entry at offset `m`, `0 <= m < order`.
    pub fn offset(&self, m: usize) -> &ExactRational {
        &self.offsets[m]
    }

    pub fn entry(&self, i: usize, j: usize) -> &ExactRational {
        &self.offsets[i.abs_diff(j)]
    }

    pub fn matrix(&self) -> ExactMatrix {
        ExactMatrix::from_fn(self.order, self.order, |i, j| self.entry(i, j).clone())
    }

    /// Leading `k x k` block, itself `B_k(x)`.
    pub fn truncate(&self, k: usize) -> ToeplitzGram {
        assert!(k >= 1 && k <= self.order);
        ToeplitzGram { order: k, x: self.x.clone(), offsets: self.offsets[..k].to_vec() }
    }
}

/// Off-diagonal border of `B_{n+1}(x)`: `r` is the bottom row without its
/// corner, `c` the rightmost column without its corner. Both equal
/// `(b_n, b_{n-1}, ..., b_1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BorderVectors {
    pub r: Vec<ExactRational>,
    pub c: Vec<ExactRational>,
}

fn half_shift(x: &ExactRational) -> ExactRational {
    (x + int(1)) / int(2)
}

/// Builds `B_n(x)` from the gamma-ratio form of its entries.
pub fn build_gram(n: usize, x: &ExactRational) -> Result<ToeplitzGram> {
    if n == 0 {
        return Err(Error::Domain("Toeplitz order must be positive".into()));
    }
    let z = half_shift(x);
    let offsets = (0..n as u64).map(|m| gamma_ratio_entry(m, &z)).collect::<Result<Vec<_>>>()?;
    Ok(ToeplitzGram { order: n, x: x.clone(), offsets })
}

pub fn border_vectors(n: usize, x: &ExactRational) -> Result<BorderVectors> {
    let bigger = build_gram(n + 1, x)?;
    let m = bigger.matrix();
    let r: Vec<_> = (0..n).map(|j| m.get(n, j).clone()).collect();
    let c: Vec<_> = (0..n).map(|i| m.get(i, n).clone()).collect();
    Ok(BorderVectors { r, c })
}

/// Exact determinant by fraction-free elimination.
pub fn det_exact(gram: &ToeplitzGram) -> ExactRational {
    // A square matrix cannot produce a dimension error.
    linalg::det_bareiss(&gram.matrix()).expect("Toeplitz Gram matrix is square")
}

/// `2^{2n} n! (n-1+x)...(x) / [(2n-1+x)(2n-3+x)...(1+x)]^2`.
pub fn recursion_closed_form(n: usize, x: &ExactRational) -> Result<ExactRational> {
    let mut num = int(4).pow(n as i32);
    let mut den = ExactRational::one();
    for j in 0..n as i64 {
        num *= int(j + 1) * (x + int(j));
        den *= x + int(2 * j + 1);
    }
    checked_div(&num, &(&den * &den)).map_err(|_| Error::Pole(format!("recursion closed form at x = {}", format_rational(x))))
}

/// `Omega_n^n(x-1) / Omega_n^n((x-1)/2)^2`.
pub fn recursion_omega_form(n: usize, x: &ExactRational) -> Result<ExactRational> {
    let a = x - int(1);
    let half = &a / int(2);
    let den = omega_coeff(n as u64, &half);
    checked_div(&omega_coeff(n as u64, &a), &(&den * &den))
        .map_err(|_| Error::Pole(format!("omega form at x = {}", format_rational(x))))
}

fn require_positive_x(x: &ExactRational, what: &str) -> Result<()> {
    if x.is_positive() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} requires x > 0, got x = {}", format_rational(x))))
    }
}

/// Checks `det B_{n+1}/det B_n` against both closed forms for
/// `1 <= n < n_max`, and that every ratio is positive.
pub fn verify_recursion(n_max: usize, x: &ExactRational) -> Result<Certificate> {
    const ID: &str = "recursion";
    let gram = build_gram(n_max.max(1), x)?;
    require_positive_x(x, ID)?;
    let dets: Vec<ExactRational> = (1..=n_max).map(|k| det_exact(&gram.truncate(k))).collect();
    let mut witness = Vec::with_capacity(n_max.saturating_sub(1));
    for n in 1..n_max {
        let fail = |detail: String| Error::IdentityFailed { identity: ID.into(), n, detail };
        let ratio = checked_div(&dets[n], &dets[n - 1]).map_err(|_| fail("det B_n vanished".into()))?;
        let closed = recursion_closed_form(n, x)?;
        let omega = recursion_omega_form(n, x)?;
        if ratio != closed {
            return Err(fail(format!("ratio {} != closed form {}", format_rational(&ratio), format_rational(&closed))));
        }
        if ratio != omega {
            return Err(fail(format!("ratio {} != omega form {}", format_rational(&ratio), format_rational(&omega))));
        }
        if !ratio.is_positive() {
            return Err(fail(format!("ratio {} is not positive", format_rational(&ratio))));
        }
        witness.push(summarize_rational(&ratio));
    }
    Ok(Certificate::pass(ID, n_max, Some(x), witness))
}

/// `v^n(x)_k = (-1)^{n-1} (-1)^k C(n,k) Gamma_k^n((x-1)/2)`, `k = 0..n-1`.
pub fn compute_v(n: usize, x: &ExactRational) -> Result<Vec<ExactRational>> {
    if n == 0 {
        return Err(Error::Domain("compute_v needs n >= 1".into()));
    }
    let a = (x - int(1)) / int(2);
    (0..n as u64)
        .map(|k| {
            let mut v = ExactRational::from_integer(binomial(n as u64, k)) * gamma_k_n(k, n as u64, &a)?;
            if (n as u64 - 1 + k) % 2 == 1 {
                v = -v;
            }
            Ok(v)
        })
        .collect()
}

/// `P_z^n(w) = (z-w+n-1)...(z-w+1)`, degree `n-1` in `w`.
fn shifted_rising(n: usize, z: &ExactRational) -> Result<PolySample> {
    let z = z.clone();
    PolySample::new(n as u64 - 1, move |w| {
        (1..n as i64).fold(ExactRational::one(), |acc, j| acc * (&z - int(w as i64) + int(j)))
    })
}

/// Certifies `B_n(x) v^n(x) = c^n(x)` componentwise, plus the vanishing
/// `n`-th difference that drives it.
pub fn verify_inverse_identity(n: usize, x: &ExactRational) -> Result<Certificate> {
    const ID: &str = "inverse_column";
    let gram = build_gram(n, x)?;
    let border = border_vectors(n, x)?;
    let v = compute_v(n, x)?;
    let bv = gram.matrix().mul_vec(&v)?;
    for (i, (lhs, rhs)) in bv.iter().zip(&border.c).enumerate() {
        if lhs != rhs {
            return Err(Error::IdentityFailed {
                identity: ID.into(),
                n,
                detail: format!("component {i}: (B v) = {} but c = {}", format_rational(lhs), format_rational(rhs)),
            });
        }
    }
    let poly = shifted_rising(n, &half_shift(x))?;
    let diff = finite_difference_n(&poly, n as u64);
    if !diff.is_zero() {
        return Err(Error::IdentityFailed {
            identity: ID.into(),
            n,
            detail: format!("n-th difference of P_z^n is {}", format_rational(&diff)),
        });
    }
    Ok(Certificate::pass(ID, n, Some(x), v.iter().map(summarize_rational).collect()))
}

/// Certifies `1 - r_n . v^n = Omega_n^n(x-1)/Omega_n^n((x-1)/2)^2` and the
/// block determinant formula `det B_{n+1} = det B_n (1 - r_n . v^n)`.
pub fn verify_complement_identity(n: usize, x: &ExactRational) -> Result<Certificate> {
    const ID: &str = "schur_complement";
    let bigger = build_gram(n + 1, x)?;
    let border = border_vectors(n, x)?;
    let v = compute_v(n, x)?;
    let complement = ExactRational::one() - linalg::dot(&border.r, &v);
    let closed = recursion_omega_form(n, x)?;
    let fail = |detail: String| Error::IdentityFailed { identity: ID.into(), n, detail };
    if complement != closed {
        return Err(fail(format!("1 - r.v = {} but closed form is {}", format_rational(&complement), format_rational(&closed))));
    }
    let det_small = det_exact(&bigger.truncate(n));
    let det_big = det_exact(&bigger);
    if det_big != &det_small * &complement {
        return Err(fail(format!(
            "det B_(n+1) = {} but det B_n (1 - r.v) = {}",
            format_rational(&det_big),
            format_rational(&(&det_small * &complement))
        )));
    }
    Ok(Certificate::pass(ID, n, Some(x), vec![summarize_rational(&complement), summarize_rational(&det_big)]))
}

fn residue_pole_check(n: usize, z: &ExactRational) -> Result<()> {
    for j in 0..=n as i64 {
        if *z == int(1 - j) {
            return Err(Error::Pole(format!("z = {} is a pole of the order-{n} residue identity", 1 - j)));
        }
    }
    Ok(())
}

/// `sum_{k=0}^{n} (-1)^k C(n,k) (z+n-k-1)...(z-k) / (z+k-1)`.
pub fn residue_lhs(n: usize, z: &ExactRational) -> Result<ExactRational> {
    residue_pole_check(n, z)?;
    let mut acc = ExactRational::zero();
    for k in 0..=n as i64 {
        let falling = (0..n as i64).fold(ExactRational::one(), |p, j| p * (z - int(k) + int(j)));
        let term = ExactRational::from_integer(binomial(n as u64, k as u64)) * falling / (z + int(k - 1));
        if k % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(acc)
}

/// `n! (2z+n-2)...(2z-1) / [(z+n-1)...(z-1)]`.
pub fn residue_rhs(n: usize, z: &ExactRational) -> Result<ExactRational> {
    residue_pole_check(n, z)?;
    let mut num = (1..=n as i64).fold(ExactRational::one(), |p, j| p * int(j));
    for j in 0..n as i64 {
        num *= int(2) * z - int(1) + int(j);
    }
    let den = (0..=n as i64).fold(ExactRational::one(), |p, j| p * (z - int(1) + int(j)));
    Ok(num / den)
}

/// Closed-form residue `A_k = (-1)^{k+n} C(n,k) (2k-n)...(2k-1)`.
pub fn residue_coefficient(n: usize, k: usize) -> ExactRational {
    let prod = (1..=n as i64).fold(ExactRational::one(), |p, j| p * int(2 * k as i64 - j));
    let v = ExactRational::from_integer(binomial(n as u64, k as u64)) * prod;
    if (k + n) % 2 == 1 {
        -v
    } else {
        v
    }
}

/// Residue of the right-hand side at `z = 1 - k`, computed from its
/// definition by dropping the vanishing factor and evaluating.
pub fn residue_by_definition(n: usize, k: usize) -> ExactRational {
    let z = int(1 - k as i64);
    let mut num = (1..=n as i64).fold(ExactRational::one(), |p, j| p * int(j));
    for j in 0..n as i64 {
        num *= int(2) * &z - int(1) + int(j);
    }
    let den = (0..=n as i64)
        .filter(|&j| j != k as i64)
        .fold(ExactRational::one(), |p, j| p * (&z - int(1) + int(j)));
    num / den
}

/// `sum_k A_k / (z+k-1)` with the closed-form residues.
pub fn residue_sum(n: usize, z: &ExactRational) -> Result<ExactRational> {
    residue_pole_check(n, z)?;
    Ok((0..=n).fold(ExactRational::zero(), |acc, k| acc + residue_coefficient(n, k) / (z + int(k as i64 - 1))))
}

/// Number of distinct samples that certifies the order-`n` identity as an
/// identity of rational functions: after clearing the common denominator
/// `(z-1)z...(z+n-1)` the left side has degree at most `2n`.
pub fn residue_samples_required(n: usize) -> usize {
    2 * n + 1
}

/// `m` pole-free rational samples `z_j = j + 7/3`.
pub fn default_residue_samples(m: usize) -> Vec<ExactRational> {
    (0..m as i64).map(|j| int(j) + ExactRational::new(7.into(), 3.into())).collect()
}

/// Certifies the partial-fraction identity and the closed-form residues.
pub fn verify_residue_identity(n: usize, samples: &[ExactRational]) -> Result<Certificate> {
    const ID: &str = "residue";
    if n == 0 {
        return Err(Error::Domain("residue identity needs n >= 1".into()));
    }
    let fail = |detail: String| Error::IdentityFailed { identity: ID.into(), n, detail };
    for k in 0..=n {
        let by_def = residue_by_definition(n, k);
        let closed = residue_coefficient(n, k);
        if by_def != closed {
            return Err(fail(format!("A_{k}: residue {} != closed form {}", format_rational(&by_def), format_rational(&closed))));
        }
    }
    let mut witness = Vec::with_capacity(samples.len());
    for z in samples {
        let lhs = residue_lhs(n, z)?;
        let rhs = residue_rhs(n, z)?;
        let sum = residue_sum(n, z)?;
        if lhs != rhs {
            return Err(fail(format!("LHS({}) = {} but RHS = {}", format_rational(z), format_rational(&lhs), format_rational(&rhs))));
        }
        if sum != rhs {
            return Err(fail(format!("sum A_k/(z+k-1) at {} = {} but RHS = {}", format_rational(z), format_rational(&sum), format_rational(&rhs))));
        }
        witness.push(format!("{} -> {}", format_rational(z), summarize_rational(&rhs)));
    }
    let mut distinct = samples.to_vec();
    distinct.sort();
    distinct.dedup();
    let needed = residue_samples_required(n);
    let cert = Certificate::pass(ID, n, None, witness);
    Ok(if distinct.len() >= needed {
        cert.with_note(format!("certified as rational functions ({} distinct samples >= {needed})", distinct.len()))
    } else {
        cert.with_note(format!("pointwise only ({} distinct samples < {needed} needed)", distinct.len()))
    })
}

/// Exact positivity of every leading minor of `B_{n_max}(x)`.
pub fn leading_minors_positive(n_max: usize, x: &ExactRational) -> Result<Certificate> {
    const ID: &str = "leading_minors_positive";
    let gram = build_gram(n_max, x)?;
    require_positive_x(x, ID)?;
    let minors = linalg::leading_minors(&gram.matrix())?;
    for (i, minor) in minors.iter().enumerate() {
        if !minor.is_positive() {
            return Err(Error::IdentityFailed {
                identity: ID.into(),
                n: i + 1,
                detail: format!("det B_{} = {}", i + 1, summarize_rational(minor)),
            });
        }
    }
    Ok(Certificate::pass(ID, n_max, Some(x), minors.iter().map(summarize_rational).collect()))
}

/// Checks both entry formulas of `B_n(x)` against each other.
pub fn entry_forms_agree(n: usize, x: &ExactRational) -> Result<bool> {
    let gram = build_gram(n, x)?;
    for m in 0..n {
        if *gram.offset(m) != signed_product_entry(m as u64, x)? {
            return Ok(false);
        }
    }
    Ok(true)
}
