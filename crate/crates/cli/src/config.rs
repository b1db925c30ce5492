use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use ervl::densities::Variant;
use ervl::exact::{format_rational, parse_rational};
use ervl::ExactRational;

pub const DEFAULT_X_GRID: &str = "1/10,1/2,1,3/2,2,5/2,3";

#[derive(Debug, Parser)]
#[command(name = "ervl", version, about = "Certificates for the failure of energy reversal for fractional Riesz transforms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Exact Toeplitz determinant, inverse-column, complement and residue certificates.
    VerifyAppendix,
    /// Coefficient table, density grid and positivity certificate.
    Density,
    /// Field vectors by both routes, parallelism determinants and span rank.
    Fields,
    /// Energy-reversal ratio sweep over gamma.
    Reversal,
    /// Every command above with the same configuration.
    All,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::VerifyAppendix => "verify-appendix",
            Command::Density => "density",
            Command::Fields => "fields",
            Command::Reversal => "reversal",
            Command::All => "all",
        }
    }
}

/// Every flag is optional; unset flags fall back to the config file and then
/// to the defaults shown.
#[derive(Debug, Clone, Default, Args)]
pub struct Opts {
    /// Exponent alpha in [0, 2) as "p/q" [default: 0]
    #[arg(long, global = true)]
    pub alpha: Option<String>,
    /// Comma-separated gamma values [default: 8,16,32,64]
    #[arg(long, global = true)]
    pub gamma: Option<String>,
    /// Depth of the exact suites [default: 12]
    #[arg(long = "n-max", global = true)]
    pub n_max: Option<String>,
    /// Truncation order of the densities [default: 64]
    #[arg(long = "N", global = true)]
    pub n_terms: Option<String>,
    /// Quadrature nodes on the circle [default: 4096]
    #[arg(long, global = true)]
    pub nodes: Option<String>,
    /// Output directory [default: ervl-out]
    #[arg(long, global = true)]
    pub out: Option<String>,
    /// Table format: json or csv [default: json]
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// Flat key=value file; keys are the long flag names
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Comma-separated rational x grid for verify-appendix [default: 1/10,1/2,1,3/2,2,5/2,3]
    #[arg(long, global = true)]
    pub x: Option<String>,
    /// Density variant: signed or absolute [default: signed]
    #[arg(long, global = true)]
    pub variant: Option<String>,
    /// Kernel family for reversal: riesz or trig [default: riesz]
    #[arg(long, global = true)]
    pub kernels: Option<String>,
    /// Largest frequency of the trigonometric kernels [default: 4 for reversal, 8 for fields]
    #[arg(long = "M", global = true)]
    pub m: Option<String>,
    /// Circle measure for fields: riesz, signed, absolute or uniform [default: riesz]
    #[arg(long, global = true)]
    pub measure: Option<String>,
    /// Constant of the reversal inequality [default: 1]
    #[arg(long, global = true)]
    pub c0: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelChoice {
    Riesz,
    Trig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureChoice {
    Riesz,
    Signed,
    Absolute,
    Uniform,
}

impl MeasureChoice {
    pub fn name(self) -> &'static str {
        match self {
            MeasureChoice::Riesz => "riesz",
            MeasureChoice::Signed => "signed",
            MeasureChoice::Absolute => "absolute",
            MeasureChoice::Uniform => "uniform",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub alpha: ExactRational,
    pub gamma: Vec<f64>,
    pub n_max: usize,
    pub n_terms: usize,
    pub nodes: usize,
    pub out: PathBuf,
    pub format: Format,
    pub x_grid: Vec<ExactRational>,
    pub variant: Variant,
    pub kernels: KernelChoice,
    pub m: Option<u32>,
    pub measure: MeasureChoice,
    pub c0: f64,
}

/// Parses `key = value` lines; blank lines and `#` comments are skipped.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| anyhow!("config line {}: expected key=value", i + 1))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

const KEYS: &[&str] =
    &["alpha", "gamma", "n-max", "N", "nodes", "out", "format", "x", "variant", "kernels", "M", "measure", "c0"];

fn parse_list<T>(text: &str, what: &str, f: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    let items: Vec<T> = text.split(',').map(|s| f(s.trim())).collect::<Result<_>>().with_context(|| format!("--{what}"))?;
    if items.is_empty() {
        bail!("--{what} is empty");
    }
    Ok(items)
}

fn rational(text: &str) -> Result<ExactRational> {
    parse_rational(text).map_err(|e| anyhow!("{e}"))
}

fn positive<T: std::str::FromStr + PartialOrd + Default>(text: &str, what: &str) -> Result<T> {
    let v: T = text.parse().map_err(|_| anyhow!("--{what}: cannot parse {text:?}"))?;
    if v <= T::default() {
        bail!("--{what} must be positive, got {text}");
    }
    Ok(v)
}

impl RunConfig {
    pub fn resolve(opts: &Opts) -> Result<Self> {
        let file = match &opts.config {
            Some(path) => load(path)?,
            None => BTreeMap::new(),
        };
        for k in file.keys() {
            if !KEYS.contains(&k.as_str()) {
                bail!("unknown config key {k:?}");
            }
        }
        let pick = |flag: &Option<String>, key: &str| flag.clone().or_else(|| file.get(key).cloned());

        let alpha = rational(&pick(&opts.alpha, "alpha").unwrap_or_else(|| "0".into())).context("--alpha")?;
        let gamma = parse_list(&pick(&opts.gamma, "gamma").unwrap_or_else(|| "8,16,32,64".into()), "gamma", |s| {
            positive::<f64>(s, "gamma")
        })?;
        let n_max = positive(&pick(&opts.n_max, "n-max").unwrap_or_else(|| "12".into()), "n-max")?;
        let n_terms = positive(&pick(&opts.n_terms, "N").unwrap_or_else(|| "64".into()), "N")?;
        let nodes = positive(&pick(&opts.nodes, "nodes").unwrap_or_else(|| "4096".into()), "nodes")?;
        let out = PathBuf::from(pick(&opts.out, "out").unwrap_or_else(|| "ervl-out".into()));
        let format = match pick(&opts.format, "format").as_deref().unwrap_or("json") {
            "json" => Format::Json,
            "csv" => Format::Csv,
            other => bail!("--format must be json or csv, got {other:?}"),
        };
        let x_grid = parse_list(&pick(&opts.x, "x").unwrap_or_else(|| DEFAULT_X_GRID.into()), "x", rational)?;
        let variant: Variant = pick(&opts.variant, "variant")
            .as_deref()
            .unwrap_or("signed")
            .parse()
            .map_err(|_| anyhow!("--variant must be signed or absolute"))?;
        let kernels = match pick(&opts.kernels, "kernels").as_deref().unwrap_or("riesz") {
            "riesz" => KernelChoice::Riesz,
            "trig" => KernelChoice::Trig,
            other => bail!("--kernels must be riesz or trig, got {other:?}"),
        };
        let m = pick(&opts.m, "M").map(|s| positive::<u32>(&s, "M")).transpose()?;
        let measure = match pick(&opts.measure, "measure").as_deref().unwrap_or("riesz") {
            "riesz" => MeasureChoice::Riesz,
            "signed" => MeasureChoice::Signed,
            "absolute" => MeasureChoice::Absolute,
            "uniform" => MeasureChoice::Uniform,
            other => bail!("--measure must be riesz, signed, absolute or uniform, got {other:?}"),
        };
        let c0 = positive(&pick(&opts.c0, "c0").unwrap_or_else(|| "1".into()), "c0")?;
        Ok(RunConfig { alpha, gamma, n_max, n_terms, nodes, out, format, x_grid, variant, kernels, m, measure, c0 })
    }

    /// Planar commands need `0 <= alpha < 2`.
    pub fn planar_alpha(&self) -> Result<&ExactRational> {
        let zero = ExactRational::from_integer(0.into());
        let two = ExactRational::from_integer(2.into());
        if self.alpha < zero || self.alpha >= two {
            bail!("--alpha must lie in [0, 2), got {}", format_rational(&self.alpha));
        }
        Ok(&self.alpha)
    }
}

fn load(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    parse_config_file(&text)
}
