//! Flag and config-file resolution into a [`RunConfig`].

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;
use jcqed::model::{SubsystemParams, SystemParams};

/// Keys accepted in a config file. Each matches a long flag name.
const KNOWN_KEYS: &[&str] = &[
    "e-atom",
    "e-atom-a",
    "e-atom-b",
    "omega-a",
    "omega-b",
    "kappa-a",
    "kappa-b",
    "epsilon",
    "lambda",
    "n-max",
    "t-start",
    "t-end",
    "samples",
    "output",
    "gamma",
    "gamma-a",
    "gamma-b",
    "dt",
    "levels",
    "check",
    "mutate-q-index",
];

/// Options shared by every subcommand.
#[derive(Args, Debug, Clone, Default)]
pub struct CommonArgs {
    /// Flat `key=value` file, one pair per line, `#` starts a comment. Flags override it.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Atomic splitting E for both subsystems.
    #[arg(long)]
    pub e_atom: Option<f64>,
    #[arg(long)]
    pub e_atom_a: Option<f64>,
    #[arg(long)]
    pub e_atom_b: Option<f64>,
    /// Mode photon energy of subsystem A.
    #[arg(long)]
    pub omega_a: Option<f64>,
    #[arg(long)]
    pub omega_b: Option<f64>,
    /// Atom-mode coupling of subsystem A.
    #[arg(long, allow_hyphen_values = true)]
    pub kappa_a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa_b: Option<f64>,
    /// Detuning ω/E − 1 for both subsystems.
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon: Option<f64>,
    /// Coupling κ/E for both subsystems.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,

    /// Photon-number cutoff per mode.
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub t_start: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,

    /// Output file; standard output when omitted.
    #[arg(short, long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct DissipationArgs {
    /// Photon loss rate of both modes.
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub gamma_a: Option<f64>,
    #[arg(long)]
    pub gamma_b: Option<f64>,
    /// RK4 step.
    #[arg(long)]
    pub dt: Option<f64>,
}

/// Parsed `key=value` pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected key=value, got {raw:?}", lineno + 1))?;
            let key = key.trim().replace('_', "-");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                bail!("line {}: unknown key {key:?}", lineno + 1);
            }
            if values
                .insert(key.clone(), value.trim().to_string())
                .is_some()
            {
                bail!("line {}: duplicate key {key:?}", lineno + 1);
            }
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config file {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config file {}", path.display()))
    }

    fn get<T>(&self, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.values
            .get(key)
            .map(|v| v.parse::<T>().map_err(|e| anyhow!("config key {key}: {e}")))
            .transpose()
    }

    /// The flag value if given, otherwise the file value.
    pub fn pick<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }

    /// A switch is on if the flag is set or the file says `true`.
    pub fn switch(&self, flag: bool, key: &str) -> Result<bool> {
        Ok(flag || self.get::<bool>(key)?.unwrap_or(false))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t_start: f64,
    pub t_end: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: SystemParams,
    pub n_max: usize,
    pub grid: TimeGrid,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    /// Resolves the shared options. `default_n_max` depends on the subcommand.
    pub fn resolve(args: &CommonArgs, file: &ConfigFile, default_n_max: usize) -> Result<Self> {
        let params = resolve_params(args, file)?;
        let n_max = file.pick(args.n_max, "n-max")?.unwrap_or(default_n_max);
        let grid = TimeGrid {
            t_start: file.pick(args.t_start, "t-start")?.unwrap_or(0.0),
            t_end: file.pick(args.t_end, "t-end")?.unwrap_or(4.0 * PI),
            samples: file.pick(args.samples, "samples")?.unwrap_or(201),
        };
        if grid.samples < 2 {
            bail!("samples must be at least 2, got {}", grid.samples);
        }
        if !(grid.t_start.is_finite() && grid.t_end.is_finite() && grid.t_end > grid.t_start) {
            bail!(
                "need t_end > t_start, got [{}, {}]",
                grid.t_start,
                grid.t_end
            );
        }
        Ok(Self {
            params,
            n_max,
            grid,
            output: file.pick(args.output.clone(), "output")?,
        })
    }
}

pub fn load_file(args: &CommonArgs) -> Result<ConfigFile> {
    match &args.config {
        Some(path) => ConfigFile::load(path),
        None => Ok(ConfigFile::default()),
    }
}

fn resolve_params(args: &CommonArgs, file: &ConfigFile) -> Result<SystemParams> {
    let e_atom = file.pick(args.e_atom, "e-atom")?;
    let e_a = file
        .pick(args.e_atom_a, "e-atom-a")?
        .or(e_atom)
        .unwrap_or(1.0);
    let e_b = file
        .pick(args.e_atom_b, "e-atom-b")?
        .or(e_atom)
        .unwrap_or(1.0);

    let physical = [
        ("omega-a", file.pick(args.omega_a, "omega-a")?),
        ("omega-b", file.pick(args.omega_b, "omega-b")?),
        ("kappa-a", file.pick(args.kappa_a, "kappa-a")?),
        ("kappa-b", file.pick(args.kappa_b, "kappa-b")?),
    ];
    let epsilon = file.pick(args.epsilon, "epsilon")?;
    let lambda = file.pick(args.lambda, "lambda")?;

    let any_physical = physical.iter().any(|(_, v)| v.is_some());
    if any_physical && (epsilon.is_some() || lambda.is_some()) {
        bail!("give either omega/kappa or epsilon/lambda, not both");
    }
    let (a, b) = if any_physical {
        let missing: Vec<&str> = physical
            .iter()
            .filter(|(_, v)| v.is_none())
            .map(|(k, _)| *k)
            .collect();
        if !missing.is_empty() {
            bail!("missing {}", missing.join(", "));
        }
        let [wa, wb, ka, kb] = physical.map(|(_, v)| v.expect("checked above"));
        (
            SubsystemParams::new(e_a, wa, ka)?,
            SubsystemParams::new(e_b, wb, kb)?,
        )
    } else {
        let (eps, lam) = (epsilon.unwrap_or(0.0), lambda.unwrap_or(1.0));
        (
            SubsystemParams::from_dimensionless(e_a, eps, lam)?,
            SubsystemParams::from_dimensionless(e_b, eps, lam)?,
        )
    };
    Ok(SystemParams::new(a, b)?)
}
