use anyhow::Result;
use ervl::certificate::Certificate;
use ervl::densities::{self, CircleMeasure, ExactComplex, FourierDensity, Variant};
use ervl::exact::{format_rational, int, to_f64};
use ervl::fields::{self, FieldVector, KernelSymbol};
use ervl::reversal::{self, ReversalSetup};
use ervl::toeplitz;
use ervl::ExactRational;
use serde::Serialize;
use serde_json::json;

use crate::config::{Format, KernelChoice, MeasureChoice, RunConfig};
use crate::output::{Sink, SCHEMA};

/// Two routes to a field vector must agree to this relative tolerance.
const ROUTE_TOL: f64 = 1e-10;
const SPAN_TOL: f64 = 1e-9;
const FIELDS_DEFAULT_M: u32 = 8;
const REVERSAL_DEFAULT_M: u32 = 4;

/// Certificates whose status decides the exit code.
#[derive(Debug, Default)]
pub struct Outcome {
    pub certificates: Vec<Certificate>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.certificates.iter().all(Certificate::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Certificate> {
        self.certificates.iter().filter(|c| !c.passed())
    }

    fn extend(&mut self, other: Outcome) {
        self.certificates.extend(other.certificates);
    }
}

fn settle(id: &str, n: usize, x: Option<&ExactRational>, r: ervl::Result<Certificate>) -> Certificate {
    r.unwrap_or_else(|e| Certificate::fail(id, n, x, e.to_string()))
}

#[derive(Serialize)]
struct CertificateRow<'a> {
    identity: &'a str,
    n: usize,
    x: &'a str,
    status: &'static str,
    witness_last: &'a str,
}

fn certificate_rows(certs: &[Certificate]) -> Vec<CertificateRow<'_>> {
    certs
        .iter()
        .map(|c| CertificateRow {
            identity: &c.identity,
            n: c.n,
            x: c.x.as_deref().unwrap_or(""),
            status: if c.passed() { "pass" } else { "fail" },
            witness_last: c.witness.last().map(String::as_str).unwrap_or(""),
        })
        .collect()
}

pub fn verify_appendix(cfg: &RunConfig, sink: &mut Sink) -> Result<Outcome> {
    let mut certs = Vec::new();
    for x in &cfg.x_grid {
        certs.push(settle("recursion", cfg.n_max, Some(x), toeplitz::verify_recursion(cfg.n_max, x)));
        for n in 1..cfg.n_max {
            certs.push(settle("inverse", n, Some(x), toeplitz::verify_inverse_identity(n, x)));
            certs.push(settle("complement", n, Some(x), toeplitz::verify_complement_identity(n, x)));
        }
        certs.push(settle("leading_minors_positive", cfg.n_max, Some(x), toeplitz::leading_minors_positive(cfg.n_max, x)));
    }
    for n in 1..=cfg.n_max {
        let samples = toeplitz::default_residue_samples(toeplitz::residue_samples_required(n).max(n + 2));
        certs.push(settle("residue", n, None, toeplitz::verify_residue_identity(n, &samples)));
    }
    let passed = certs.iter().all(Certificate::passed);
    let grid: Vec<String> = cfg.x_grid.iter().map(format_rational).collect();
    sink.json(
        "appendix.json",
        &json!({
            "schema": SCHEMA,
            "command": "verify-appendix",
            "n_max": cfg.n_max,
            "x": grid,
            "passed": passed,
            "certificates": certs,
        }),
    )?;
    if cfg.format == Format::Csv {
        sink.csv("appendix.csv", &certificate_rows(&certs))?;
    }
    Ok(Outcome { certificates: certs })
}

#[derive(Serialize)]
struct CoefficientRow {
    n: usize,
    exact: String,
    value: f64,
}

#[derive(Serialize)]
struct GridRow {
    theta: f64,
    partial_sum: f64,
    fejer: f64,
}

fn variant_name(v: Variant) -> &'static str {
    match v {
        Variant::Signed => "signed",
        Variant::Absolute => "absolute",
    }
}

pub fn density(cfg: &RunConfig, sink: &mut Sink) -> Result<Outcome> {
    let alpha = cfg.planar_alpha()?;
    let seq = densities::coeff_sequence(alpha, cfg.variant, cfg.n_terms)?;
    let rows: Vec<CoefficientRow> = (0..=seq.len())
        .map(|n| {
            let b = seq.term(n);
            CoefficientRow { n, value: to_f64(&b), exact: format_rational(&b) }
        })
        .collect();
    sink.csv("density_coefficients.csv", &rows)?;

    let density = FourierDensity::from_sequence(&seq);
    let grid: Vec<GridRow> = (0..cfg.nodes)
        .map(|i| {
            let theta = std::f64::consts::TAU * i as f64 / cfg.nodes as f64;
            GridRow { theta, partial_sum: density.eval(theta), fejer: density.fejer_eval(theta) }
        })
        .collect();
    sink.csv("density_grid.csv", &grid)?;

    let id = "positivity";
    let (certificate, grid_min, grid_asserted, passed) =
        match densities::positivity_certificate(alpha, cfg.variant, cfg.n_terms, cfg.nodes) {
            Ok(report) => {
                let passed = report.passed();
                let mut cert = report.certificate;
                if !passed && cert.passed() {
                    cert = Certificate::fail(id, cfg.n_terms, Some(&seq.x), format!("fejer grid min {:.3e} < -1e-12", report.grid_min));
                }
                (cert, Some(report.grid_min), report.grid_asserted, passed)
            }
            Err(e) => (Certificate::fail(id, cfg.n_terms, Some(&seq.x), e.to_string()), None, false, false),
        };
    sink.json(
        "density.json",
        &json!({
            "schema": SCHEMA,
            "command": "density",
            "alpha": format_rational(alpha),
            "variant": variant_name(cfg.variant),
            "N": cfg.n_terms,
            "grid": cfg.nodes,
            "grid_min": grid_min,
            "grid_asserted": grid_asserted,
            "passed": passed,
            "certificate": certificate,
        }),
    )?;
    Ok(Outcome { certificates: vec![certificate] })
}

fn exact_text(z: &Option<ExactComplex>) -> Option<String> {
    z.as_ref().map(|z| format!("{} + {}i", format_rational(&z.re), format_rational(&z.im)))
}

#[derive(Serialize)]
struct FieldRow {
    kernel: String,
    fourier_re: f64,
    fourier_im: f64,
    fourier_exact: Option<String>,
    quadrature_re: f64,
    quadrature_im: f64,
    quadrature_error: f64,
    gap: f64,
}

#[derive(Serialize)]
struct ParallelismRow {
    k: u32,
    det: f64,
    exact_det: Option<String>,
    residual: f64,
}

fn fields_measure(cfg: &RunConfig, alpha: &ExactRational) -> Result<CircleMeasure> {
    Ok(match cfg.measure {
        MeasureChoice::Riesz => densities::riesz_measure(alpha)?,
        MeasureChoice::Signed => densities::density_measure(&densities::coeff_sequence(alpha, Variant::Signed, cfg.n_terms)?),
        MeasureChoice::Absolute => {
            densities::density_measure(&densities::coeff_sequence(alpha, Variant::Absolute, cfg.n_terms)?)
        }
        MeasureChoice::Uniform => CircleMeasure::uniform(int(1))?,
    })
}

pub fn fields(cfg: &RunConfig, sink: &mut Sink) -> Result<Outcome> {
    let alpha = cfg.planar_alpha()?;
    let alpha_f = to_f64(alpha);
    let measure = fields_measure(cfg, alpha)?;
    let m = cfg.m.unwrap_or(FIELDS_DEFAULT_M);
    let kernels = KernelSymbol::trig_family(m);

    let mut rows = Vec::with_capacity(kernels.len());
    let mut vectors: Vec<FieldVector> = Vec::with_capacity(kernels.len());
    let mut certs = Vec::new();
    for k in &kernels {
        let name = k.name();
        let routes = fields::z_field_fourier(k, alpha, &measure)
            .and_then(|f| fields::z_field_quadrature(k, alpha_f, &measure, cfg.nodes).map(|q| (f, q)));
        match routes {
            Ok((f, (q, err))) => {
                let gap = f.distance(&q);
                let tol = ROUTE_TOL * f.norm().max(1.0);
                certs.push(if gap <= tol {
                    Certificate::pass("field_routes", 0, Some(alpha), vec![name.clone(), format!("{gap:.3e}")])
                } else {
                    Certificate::fail("field_routes", 0, Some(alpha), format!("{name}: routes differ by {gap:.3e} > {tol:.1e}"))
                });
                rows.push(FieldRow {
                    kernel: name,
                    fourier_re: f.re,
                    fourier_im: f.im,
                    fourier_exact: exact_text(&f.exact),
                    quadrature_re: q.re,
                    quadrature_im: q.im,
                    quadrature_error: err,
                    gap,
                });
                vectors.push(f);
            }
            Err(e) => certs.push(Certificate::fail("field_routes", 0, Some(alpha), format!("{name}: {e}"))),
        }
    }

    let parallelism: Vec<ParallelismRow> = (1..=m)
        .map(|k| {
            fields::parallelism_det(k, alpha, &measure).map(|p| ParallelismRow {
                k,
                det: p.det,
                exact_det: p.exact_det.as_ref().map(format_rational),
                residual: p.residual,
            })
        })
        .collect::<ervl::Result<_>>()?;
    let span_rank = fields::span_rank(&vectors, SPAN_TOL)?;
    let riesz_residual = fields::riesz_condition_residual(alpha, &measure);
    let passed = certs.iter().all(Certificate::passed);

    sink.json(
        "fields.json",
        &json!({
            "schema": SCHEMA,
            "command": "fields",
            "alpha": format_rational(alpha),
            "measure": cfg.measure.name(),
            "M": m,
            "N": cfg.n_terms,
            "nodes": cfg.nodes,
            "fields": rows,
            "parallelism": parallelism,
            "span_rank": span_rank,
            "riesz_condition_residual": riesz_residual,
            "passed": passed,
            "certificates": certs,
        }),
    )?;
    if cfg.format == Format::Csv {
        sink.csv("fields.csv", &rows)?;
        sink.csv("parallelism.csv", &parallelism)?;
    }
    Ok(Outcome { certificates: certs })
}

#[derive(Serialize)]
struct RatioRow {
    gamma: f64,
    ratio: f64,
    lhs: f64,
    lhs_error: f64,
    poisson: f64,
    energy_total: f64,
    residual_ratio_rms: f64,
    fails: bool,
}

/// The counterexample must annihilate the killed coordinate energy and the
/// linear term exactly up to rounding.
const KILLED_TOL: f64 = 1e-14;
const LINEAR_TOL: f64 = 1e-12;

pub fn reversal(cfg: &RunConfig, sink: &mut Sink) -> Result<Outcome> {
    let alpha = cfg.planar_alpha()?;
    let setup = match cfg.kernels {
        KernelChoice::Riesz => ReversalSetup::riesz(alpha)?,
        KernelChoice::Trig => ReversalSetup::trig_vector(alpha, cfg.m.unwrap_or(REVERSAL_DEFAULT_M), cfg.n_terms)?,
    };
    let result = reversal::sweep(&setup, &cfg.gamma, cfg.c0, cfg.nodes)?;
    let mut certs = Vec::new();
    for r in &result.reports {
        let n = r.gamma.round() as usize;
        if r.energy_coordinate_killed > KILLED_TOL {
            certs.push(Certificate::fail("construction", n, Some(alpha), format!("killed energy {:.3e}", r.energy_coordinate_killed)));
        } else if r.linear_term_max > LINEAR_TOL {
            certs.push(Certificate::fail("construction", n, Some(alpha), format!("linear term {:.3e}", r.linear_term_max)));
        } else {
            certs.push(Certificate::pass("construction", n, Some(alpha), vec![format!("ratio {:.6e}", r.ratio)]));
        }
    }
    let passed = certs.iter().all(Certificate::passed);
    sink.json(
        "reversal.json",
        &json!({
            "schema": SCHEMA,
            "command": "reversal",
            "nodes": cfg.nodes,
            "sweep": result,
            "passed": passed,
            "certificates": certs,
        }),
    )?;
    let rows: Vec<RatioRow> = result
        .reports
        .iter()
        .map(|r| RatioRow {
            gamma: r.gamma,
            ratio: r.ratio,
            lhs: r.lhs,
            lhs_error: r.lhs_error,
            poisson: r.poisson,
            energy_total: r.energy_total,
            residual_ratio_rms: r.residual_ratio_rms,
            fails: r.fails,
        })
        .collect();
    sink.csv("reversal.csv", &rows)?;
    Ok(Outcome { certificates: certs })
}

pub fn all(cfg: &RunConfig, sink: &mut Sink) -> Result<Outcome> {
    let mut outcome = verify_appendix(cfg, sink)?;
    outcome.extend(density(cfg, sink)?);
    outcome.extend(fields(cfg, sink)?);
    outcome.extend(reversal(cfg, sink)?);
    Ok(outcome)
}
