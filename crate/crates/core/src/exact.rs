//! Exact rational scalars and the finite gamma-ratio products behind the
//! Toeplitz identities.
//!
//! Every function here works over reduced big-integer fractions. Poles of a
//! product (a vanishing denominator factor) are reported as [`Error::Pole`];
//! nothing in this module ever produces an infinity or a float.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{CheckedDiv, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision reduced fraction with a positive denominator.
pub type ExactRational = BigRational;

/// `p/q` as an exact rational. Panics if `q == 0`; use [`parse_rational`] for
/// untrusted input.
pub fn rat(p: i64, q: i64) -> ExactRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> ExactRational {
    BigRational::from_integer(BigInt::from(p))
}

/// Parses `"p/q"` or `"p"` (optional sign, surrounding whitespace ignored).
pub fn parse_rational(text: &str) -> Result<ExactRational> {
    let text = text.trim();
    let parse_int =
        |s: &str| -> Result<BigInt> { s.trim().parse::<BigInt>().map_err(|_| Error::Parse(text.to_string())) };
    match text.split_once('/') {
        Some((num, den)) => {
            let num = parse_int(num)?;
            let den = parse_int(den)?;
            if den.is_zero() {
                return Err(Error::DivisionByZero);
            }
            Ok(BigRational::new(num, den))
        }
        None => Ok(BigRational::from_integer(parse_int(text)?)),
    }
}

/// `"p/q"`, or `"p"` for integers.
pub fn format_rational(value: &ExactRational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

pub fn to_f64(value: &ExactRational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// Exact division; a zero divisor is an error.
pub fn checked_div(num: &ExactRational, den: &ExactRational) -> Result<ExactRational> {
    num.checked_div(den).ok_or(Error::DivisionByZero)
}

/// Binomial coefficient by the multiplicative formula.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step.
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

fn product_of<I: IntoIterator<Item = ExactRational>>(factors: I) -> ExactRational {
    factors.into_iter().fold(ExactRational::one(), |acc, f| acc * f)
}

fn pole_check(factor: &ExactRational, what: impl FnOnce() -> String) -> Result<()> {
    if factor.is_zero() {
        Err(Error::Pole(what()))
    } else {
        Ok(())
    }
}

/// `(n+a)(n-1+a)...(1+a) / n!`.
pub fn omega_coeff(n: u64, a: &ExactRational) -> ExactRational {
    assert!(n >= 1, "omega_coeff requires n >= 1");
    let num = product_of((1..=n).map(|j| int(j as i64) + a));
    let fact = product_of((1..=n).map(|j| int(j as i64)));
    num / fact
}

/// Toeplitz entry at offset `m` in gamma-ratio form:
/// `(z-1)(z-2)...(z-m) / [z(z+1)...(z+m-1)]`.
pub fn gamma_ratio_entry(m: u64, z: &ExactRational) -> Result<ExactRational> {
    let mut num = ExactRational::one();
    let mut den = ExactRational::one();
    for j in 0..m {
        let d = z + int(j as i64);
        pole_check(&d, || format!("z + {j} = 0 at z = {}", format_rational(z)))?;
        den *= d;
        num *= z - int(j as i64 + 1);
    }
    Ok(num / den)
}

/// The same Toeplitz entry as the signed product
/// `prod_{j=1}^{m} -(2j-1-x)/(2j-1+x)`.
pub fn signed_product_entry(m: u64, x: &ExactRational) -> Result<ExactRational> {
    let mut acc = ExactRational::one();
    for j in 1..=m {
        let odd = int(2 * j as i64 - 1);
        let den = &odd + x;
        pole_check(&den, || format!("x = -{}", 2 * j - 1))?;
        acc *= -(&odd - x) / den;
    }
    Ok(acc)
}

/// `Gamma_k^n(a) = (k+a)...(a) / [(n+a)...(n-k+a)]`, `0 <= k <= n - 1`.
pub fn gamma_k_n(k: u64, n: u64, a: &ExactRational) -> Result<ExactRational> {
    if k >= n {
        return Err(Error::Domain(format!("gamma_k_n needs k < n, got k = {k}, n = {n}")));
    }
    let num = product_of((0..=k).map(|j| int(j as i64) + a));
    let mut den = ExactRational::one();
    for j in (n - k)..=n {
        let d = int(j as i64) + a;
        pole_check(&d, || format!("{j} + a = 0 at a = {}", format_rational(a)))?;
        den *= d;
    }
    Ok(num / den)
}

type Evaluator = Arc<dyn Fn(u64) -> ExactRational + Send + Sync>;

/// An exact integer-sampled function declared to be a polynomial of a
/// given degree. Construction checks the declaration with one extra
/// finite difference on `0..=degree+1`.
#[derive(Clone)]
pub struct PolySample {
    degree: u64,
    eval: Evaluator,
}

impl fmt::Debug for PolySample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PolySample").field("degree", &self.degree).finish()
    }
}

impl PolySample {
    pub fn new<F>(degree: u64, eval: F) -> Result<Self>
    where
        F: Fn(u64) -> ExactRational + Send + Sync + 'static,
    {
        let sample = PolySample { degree, eval: Arc::new(eval) };
        let check = finite_difference_n(&sample, degree + 1);
        if !check.is_zero() {
            return Err(Error::Domain(format!(
                "evaluator is not a polynomial of degree {degree} (difference {} != 0)",
                format_rational(&check)
            )));
        }
        Ok(sample)
    }

    /// Polynomial from ascending coefficients, evaluated by Horner's rule.
    pub fn from_coefficients(coeffs: Vec<ExactRational>) -> Self {
        let degree = coeffs.len().saturating_sub(1) as u64;
        PolySample {
            degree,
            eval: Arc::new(move |k| {
                let k = int(k as i64);
                coeffs.iter().rev().fold(ExactRational::zero(), |acc, c| acc * &k + c)
            }),
        }
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn eval(&self, k: u64) -> ExactRational {
        (self.eval)(k)
    }
}

/// `sum_{k=0}^{n} (-1)^k C(n,k) f(k)`.
pub fn finite_difference_n(f: &PolySample, n: u64) -> ExactRational {
    (0..=n).fold(ExactRational::zero(), |acc, k| {
        let term = BigRational::from_integer(binomial(n, k)) * f.eval(k);
        if k % 2 == 0 {
            acc + term
        } else {
            acc - term
        }
    })
}

/// True when `value > 0` exactly.
pub fn is_positive(value: &ExactRational) -> bool {
    value.is_positive()
}
