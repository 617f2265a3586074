//! Flag and config-file merging. Everything is checked here, before any
//! command runs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "cssball",
    version,
    about = "Boundary-layer solutions of the radial gauged Schrödinger energy on a ball"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// omega0 and omega1 over a range of exponents
    Thresholds,
    /// roots k1 <= k2 of the limit equation
    Roots,
    /// limit soliton constants or profile
    Soliton,
    /// low spectrum of the linearized limit operator
    Spectrum,
    /// reduced energy along the ansatz family
    Scan,
    /// minimize the discrete energy from the best ansatz
    Solve,
    /// scan and solve over a grid of p, omega and radius
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Thresholds => "thresholds",
            Command::Roots => "roots",
            Command::Soliton => "soliton",
            Command::Spectrum => "spectrum",
            Command::Scan => "scan",
            Command::Solve => "solve",
            Command::Sweep => "sweep",
        }
    }

    fn keys(self) -> &'static [&'static str] {
        match self {
            Command::Thresholds => &["p-min", "p-max", "samples", "out", "format", "svg", "seed"],
            Command::Roots => &["p", "omega", "out", "format", "seed"],
            Command::Soliton | Command::Spectrum => {
                &["p", "omega", "branch", "nodes", "out", "format", "seed"]
            }
            Command::Scan => &[
                "p", "omega", "radius", "nodes", "alpha", "beta", "samples", "out", "format",
                "svg", "seed",
            ],
            Command::Solve | Command::Sweep => &[
                "p", "omega", "radius", "nodes", "alpha", "beta", "samples", "tol", "max-iter",
                "out", "format", "seed",
            ],
        }
    }
}

/// Every flag is optional here; requirements depend on the command.
#[derive(Debug, Default, Args)]
pub struct Flags {
    /// nonlinearity exponent in (1, 3); comma list for sweep
    #[arg(long, global = true)]
    pub p: Option<String>,
    /// frequency; comma list for sweep
    #[arg(long, global = true)]
    pub omega: Option<String>,
    /// ball radius; comma list for sweep
    #[arg(long, global = true)]
    pub radius: Option<String>,
    /// interior grid nodes
    #[arg(long, global = true)]
    pub nodes: Option<String>,
    #[arg(long, global = true)]
    pub alpha: Option<String>,
    #[arg(long, global = true)]
    pub beta: Option<String>,
    /// gradient-norm tolerance
    #[arg(long, global = true)]
    pub tol: Option<String>,
    #[arg(long = "max-iter", global = true)]
    pub max_iter: Option<String>,
    /// k1, k2 or k0
    #[arg(long, global = true)]
    pub branch: Option<String>,
    /// output path; stdout when absent
    #[arg(long, global = true)]
    pub out: Option<String>,
    /// csv or json
    #[arg(long, global = true)]
    pub format: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<String>,
    /// flat key=value file; flags win
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long = "p-min", global = true)]
    pub p_min: Option<String>,
    #[arg(long = "p-max", global = true)]
    pub p_max: Option<String>,
    #[arg(long, global = true)]
    pub samples: Option<String>,
    /// also write an SVG line plot here
    #[arg(long, global = true)]
    pub svg: Option<String>,
}

const ALL_KEYS: [&str; 16] = [
    "p", "omega", "radius", "nodes", "alpha", "beta", "tol", "max-iter", "branch", "out", "format",
    "seed", "p-min", "p-max", "samples", "svg",
];

impl Flags {
    fn entries(&self) -> BTreeMap<&'static str, String> {
        let pairs = [
            ("p", &self.p),
            ("omega", &self.omega),
            ("radius", &self.radius),
            ("nodes", &self.nodes),
            ("alpha", &self.alpha),
            ("beta", &self.beta),
            ("tol", &self.tol),
            ("max-iter", &self.max_iter),
            ("branch", &self.branch),
            ("out", &self.out),
            ("format", &self.format),
            ("seed", &self.seed),
            ("p-min", &self.p_min),
            ("p-max", &self.p_max),
            ("samples", &self.samples),
            ("svg", &self.svg),
        ];
        pairs
            .into_iter()
            .filter_map(|(k, v)| v.clone().map(|v| (k, v)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Branch {
    K1,
    K2,
    K0,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub ps: Vec<f64>,
    pub omegas: Vec<f64>,
    pub radii: Vec<f64>,
    pub nodes: Option<usize>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub branch: Branch,
    pub out: Option<PathBuf>,
    pub format: Format,
    /// No command draws random numbers; kept so configs record it.
    pub seed: u64,
    pub p_min: f64,
    pub p_max: f64,
    pub samples: Option<usize>,
    pub svg: Option<PathBuf>,
}

/// Parses a flat `key = value` file. `#` starts a comment.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_config_text(&text)
}

pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (line_no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("config line {}: expected key=value", line_no + 1))
        })?;
        let key = key.trim().replace('_', "-");
        if !ALL_KEYS.contains(&key.as_str()) {
            return Err(CliError::Usage(format!(
                "config line {}: unknown key {key:?}",
                line_no + 1
            )));
        }
        if map.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(CliError::Usage(format!(
                "config line {}: duplicate key {key:?}",
                line_no + 1
            )));
        }
    }
    Ok(map)
}

fn number(key: &str, raw: &str) -> Result<f64, CliError> {
    raw.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| CliError::Usage(format!("--{key}: {raw:?} is not a finite number")))
}

fn count(key: &str, raw: &str) -> Result<usize, CliError> {
    raw.trim()
        .parse::<usize>()
        .map_err(|_| CliError::Usage(format!("--{key}: {raw:?} is not a non-negative integer")))
}

fn list(key: &str, raw: &str, multi: bool) -> Result<Vec<f64>, CliError> {
    let values = raw
        .split(',')
        .map(|s| number(key, s))
        .collect::<Result<Vec<_>, _>>()?;
    if !multi && values.len() != 1 {
        return Err(CliError::Usage(format!(
            "--{key} takes a single value except for sweep"
        )));
    }
    Ok(values)
}

fn choice<T: ValueEnum>(key: &str, raw: &str) -> Result<T, CliError> {
    T::from_str(raw.trim(), true).map_err(|_| {
        let names: Vec<String> = T::value_variants()
            .iter()
            .filter_map(|v| v.to_possible_value().map(|p| p.get_name().to_string()))
            .collect();
        CliError::Usage(format!(
            "--{key}: {raw:?} is not one of {}",
            names.join(", ")
        ))
    })
}

/// Merges flags over the optional config file and type-checks the result.
pub fn parse_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut entries: BTreeMap<String, String> = match &cli.flags.config {
        Some(path) => read_config_file(path)?,
        None => BTreeMap::new(),
    };
    for (k, v) in cli.flags.entries() {
        entries.insert(k.to_string(), v);
    }
    build(cli.command, &entries)
}

pub fn build(command: Command, entries: &BTreeMap<String, String>) -> Result<RunConfig, CliError> {
    let allowed = command.keys();
    if let Some(key) = entries.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(CliError::Usage(format!(
            "--{key} does not apply to {}",
            command.name()
        )));
    }
    let get = |k: &str| entries.get(k).map(String::as_str);
    let multi = command == Command::Sweep;
    let opt_list = |k: &str| get(k).map(|raw| list(k, raw, multi)).transpose();
    let opt_number = |k: &str| get(k).map(|raw| number(k, raw)).transpose();
    let opt_count = |k: &str| get(k).map(|raw| count(k, raw)).transpose();

    let config = RunConfig {
        command,
        ps: opt_list("p")?.unwrap_or_default(),
        omegas: opt_list("omega")?.unwrap_or_default(),
        radii: opt_list("radius")?.unwrap_or_default(),
        nodes: opt_count("nodes")?,
        alpha: opt_number("alpha")?,
        beta: opt_number("beta")?,
        tol: opt_number("tol")?,
        max_iter: opt_count("max-iter")?,
        branch: get("branch")
            .map(|raw| choice("branch", raw))
            .transpose()?
            .unwrap_or(Branch::K2),
        out: get("out").map(PathBuf::from),
        format: get("format")
            .map(|raw| choice("format", raw))
            .transpose()?
            .unwrap_or(match command {
                Command::Thresholds | Command::Scan | Command::Sweep => Format::Csv,
                _ => Format::Json,
            }),
        seed: get("seed")
            .map(|raw| count("seed", raw))
            .transpose()?
            .unwrap_or(0) as u64,
        p_min: opt_number("p-min")?.unwrap_or(1.1),
        p_max: opt_number("p-max")?.unwrap_or(2.9),
        samples: opt_count("samples")?,
        svg: get("svg").map(PathBuf::from),
    };

    // range errors take precedence over missing flags
    if let Some(p) = config.ps.iter().find(|&&p| !(p > 1.0 && p < 3.0)) {
        return Err(CliError::Usage(format!("p = {p} outside (1,3)")));
    }

    let required: &[&str] = match command {
        Command::Thresholds => &[],
        Command::Roots => &["p", "omega"],
        Command::Soliton | Command::Spectrum if config.branch == Branch::K0 => &["p"],
        Command::Soliton | Command::Spectrum => &["p", "omega"],
        Command::Scan | Command::Solve | Command::Sweep => &["p", "omega", "radius"],
    };
    if let Some(key) = required.iter().find(|k| get(k).is_none()) {
        return Err(CliError::Usage(format!(
            "{} requires --{key}",
            command.name()
        )));
    }
    if command == Command::Roots && config.format == Format::Csv {
        return Err(CliError::Usage("roots writes json only".into()));
    }
    if command == Command::Spectrum && config.format == Format::Csv {
        return Err(CliError::Usage("spectrum writes json only".into()));
    }
    if command == Command::Solve && config.format == Format::Csv {
        return Err(CliError::Usage(
            "solve writes json plus a companion field csv; use --format json".into(),
        ));
    }
    Ok(config)
}
