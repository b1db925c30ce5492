use serde::Serialize;

use crate::exact::{format_rational, ExactRational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// Serializable record of one verified (or refuted) identity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub identity: String,
    pub n: usize,
    pub x: Option<String>,
    pub status: Status,
    pub witness: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Certificate {
    pub fn pass(identity: &str, n: usize, x: Option<&ExactRational>, witness: Vec<String>) -> Self {
        Certificate {
            identity: identity.to_string(),
            n,
            x: x.map(format_rational),
            status: Status::Pass,
            witness,
            notes: Vec::new(),
        }
    }

    pub fn fail(identity: &str, n: usize, x: Option<&ExactRational>, detail: String) -> Self {
        Certificate {
            identity: identity.to_string(),
            n,
            x: x.map(format_rational),
            status: Status::Fail,
            witness: Vec::new(),
            notes: vec![detail],
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Exact `p/q` when short, otherwise a sign and base-10 magnitude estimate.
/// Keeps certificates readable for large Toeplitz orders.
pub fn summarize_rational(value: &ExactRational) -> String {
    let text = format_rational(value);
    if text.len() <= 120 {
        return text;
    }
    let num = value.numer().magnitude().to_string();
    let den = value.denom().to_string();
    let lead = |s: &str| s[..s.len().min(15)].parse::<f64>().unwrap_or(1.0) / 10f64.powi(s.len().min(15) as i32 - 1);
    let exponent = num.len() as i64 - den.len() as i64;
    let mut mantissa = lead(&num) / lead(&den);
    let mut exponent = exponent;
    if mantissa < 1.0 {
        mantissa *= 10.0;
        exponent -= 1;
    }
    let sign = if value.numer().sign() == num_bigint::Sign::Minus { "-" } else { "" };
    format!("~{sign}{mantissa:.12}e{exponent}")
}
