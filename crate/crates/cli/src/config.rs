//! Run configuration. Layers, lowest priority first: built-in defaults, the
//! `--figure` preset, the `--config` JSON file, explicit flags.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use anyon_core::entanglement::OneParticleSubspace;
use anyon_core::{EigenLabel, ModelParams};
use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::grid::{check_grid, linspace, parse_grid, parse_grid_arg, parse_number, Grid};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Spectrum,
    EntropySweep,
    Dynamics,
    Correlators,
    Momentum,
    Verify,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Parser, Debug, Default)]
#[command(name = "anyon-lab", version, about = "Exact two-site anyonic Hubbard model: spectra, entropies, dynamics, correlators")]
pub struct Cli {
    /// Command to run; optional when `--figure` is given.
    #[arg(value_enum)]
    pub command: Option<Command>,

    /// Regenerate a figure dataset (2, 3, 4 or 5) with its preset parameters.
    #[arg(long, value_parser = clap::value_parser!(u8).range(2..=5))]
    pub figure: Option<u8>,

    #[arg(long)]
    pub config: Option<PathBuf>,

    #[arg(long)]
    pub sites: Option<usize>,
    #[arg(long, value_parser = parse_number, allow_hyphen_values = true)]
    pub kappa: Option<f64>,
    #[arg(long, value_parser = parse_number, allow_hyphen_values = true)]
    pub u: Option<f64>,
    #[arg(long, value_parser = parse_number, allow_hyphen_values = true)]
    pub v: Option<f64>,
    #[arg(long, value_parser = parse_number, allow_hyphen_values = true)]
    pub j: Option<f64>,
    #[arg(long, value_parser = parse_number, allow_hyphen_values = true)]
    pub mu: Option<f64>,

    /// Single statistics parameter, e.g. `pi/2`.
    #[arg(long, value_parser = parse_number, allow_hyphen_values = true, conflicts_with = "nu_grid")]
    pub nu: Option<f64>,
    /// `start:stop:count` or a comma list.
    #[arg(long, value_parser = parse_grid_arg, allow_hyphen_values = true)]
    pub nu_grid: Option<Grid>,

    #[arg(long, value_parser = parse_number, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// Field frequency, or a comma list of them for `dynamics`.
    #[arg(long, value_parser = parse_grid_arg, allow_hyphen_values = true)]
    pub omega: Option<Grid>,
    #[arg(long, value_parser = parse_number, allow_hyphen_values = true)]
    pub t_max: Option<f64>,
    /// Number of time points in `[0, t-max]`.
    #[arg(long)]
    pub t_steps: Option<usize>,

    /// Eigenstate label such as `phi_2_5`; repeat for several.
    #[arg(long = "state")]
    pub states: Vec<String>,
    /// `B1`, `B2`, `B12` or a mode list like `1u,2d`.
    #[arg(long)]
    pub subspace: Option<String>,
    #[arg(long, value_parser = parse_grid_arg, allow_hyphen_values = true)]
    pub k_grid: Option<Grid>,

    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Grid in a config file: explicit numbers or a grid expression.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Values(Vec<f64>),
    Expr(String),
}

impl GridSpec {
    fn resolve(&self) -> Result<Vec<f64>> {
        match self {
            GridSpec::Values(v) => {
                check_grid(v)?;
                Ok(v.clone())
            }
            GridSpec::Expr(s) => parse_grid(s),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Label(EigenLabel),
    Text(String),
}

impl StateSpec {
    fn resolve(&self) -> Result<EigenLabel> {
        match self {
            StateSpec::Label(l) => Ok(format!("{l}").parse()?),
            StateSpec::Text(s) => Ok(s.parse()?),
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialParams {
    pub sites: Option<usize>,
    pub kappa: Option<f64>,
    pub u: Option<f64>,
    pub v: Option<f64>,
    pub j: Option<f64>,
    pub mu: Option<f64>,
    pub nu: Option<f64>,
}

/// One configuration layer. The JSON shape matches [`RunConfig`], so an
/// echoed config is a valid config file.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PartialConfig {
    pub command: Option<Command>,
    pub figure: Option<u8>,
    pub params: PartialParams,
    pub beta: Option<f64>,
    pub omega: Option<GridSpec>,
    pub t_max: Option<f64>,
    pub t_steps: Option<usize>,
    pub nu_grid: Option<GridSpec>,
    pub k_grid: Option<GridSpec>,
    pub states: Option<Vec<StateSpec>>,
    pub subspace: Option<String>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

impl PartialConfig {
    /// Accepts a bare config, a dataset metadata object, or a full JSON dataset.
    pub fn from_json(text: &str) -> Result<Self> {
        let mut doc: serde_json::Value = serde_json::from_str(text).context("config is not valid JSON")?;
        if doc.get("meta").is_some() {
            doc = doc["meta"].take();
        }
        if doc.get("config").is_some() {
            doc = doc["config"].take();
        }
        serde_json::from_value(doc).context("unrecognised config")
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn from_cli(cli: &Cli) -> Self {
        PartialConfig {
            command: cli.command,
            figure: cli.figure,
            params: PartialParams {
                sites: cli.sites,
                kappa: cli.kappa,
                u: cli.u,
                v: cli.v,
                j: cli.j,
                mu: cli.mu,
                nu: cli.nu,
            },
            beta: cli.beta,
            omega: cli.omega.clone().map(|g| GridSpec::Values(g.0)),
            t_max: cli.t_max,
            t_steps: cli.t_steps,
            nu_grid: cli.nu_grid.clone().map(|g| GridSpec::Values(g.0)),
            k_grid: cli.k_grid.clone().map(|g| GridSpec::Values(g.0)),
            states: (!cli.states.is_empty()).then(|| cli.states.iter().cloned().map(StateSpec::Text).collect()),
            subspace: cli.subspace.clone(),
            format: cli.format,
            out: cli.out.clone(),
            seed: cli.seed,
        }
    }

    fn apply(&self, cfg: &mut RunConfig) -> Result<()> {
        macro_rules! set {
            ($dst:expr, $src:expr) => {
                if let Some(x) = $src.clone() {
                    $dst = x;
                }
            };
        }
        set!(cfg.command, self.command);
        if self.figure.is_some() {
            cfg.figure = self.figure;
        }
        let p = &self.params;
        set!(cfg.params.sites, p.sites);
        set!(cfg.params.kappa, p.kappa);
        set!(cfg.params.u, p.u);
        set!(cfg.params.v, p.v);
        set!(cfg.params.j, p.j);
        set!(cfg.params.mu, p.mu);
        if let Some(g) = &self.nu_grid {
            cfg.nu_grid = g.resolve().context("nu grid")?;
        } else if let Some(nu) = p.nu {
            cfg.nu_grid = vec![nu];
        }
        set!(cfg.beta, self.beta);
        if let Some(g) = &self.omega {
            cfg.omega = g.resolve().context("omega")?;
        }
        set!(cfg.t_max, self.t_max);
        set!(cfg.t_steps, self.t_steps);
        if let Some(g) = &self.k_grid {
            cfg.k_grid = g.resolve().context("k grid")?;
        }
        if let Some(states) = &self.states {
            cfg.states = states.iter().map(StateSpec::resolve).collect::<Result<_>>()?;
        }
        set!(cfg.subspace, self.subspace);
        set!(cfg.format, self.format);
        if self.out.is_some() {
            cfg.out = self.out.clone();
        }
        set!(cfg.seed, self.seed);
        cfg.params.nu = cfg.nu_grid[0];
        Ok(())
    }
}

/// Fully resolved configuration; echoed into every dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub figure: Option<u8>,
    /// `params.nu` mirrors the first entry of `nu_grid`; sweeps use the grid.
    pub params: ModelParams,
    pub beta: f64,
    pub omega: Vec<f64>,
    pub t_max: f64,
    pub t_steps: usize,
    pub nu_grid: Vec<f64>,
    pub k_grid: Vec<f64>,
    pub states: Vec<EigenLabel>,
    pub subspace: String,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: Command::Spectrum,
            figure: None,
            params: ModelParams::reference(),
            beta: 1.0,
            omega: vec![1.0],
            t_max: 10.0,
            t_steps: 400,
            nu_grid: vec![0.0],
            k_grid: linspace(-PI, PI, 201),
            states: vec![EigenLabel::new(2, 5)],
            subspace: "B12".into(),
            format: Format::Csv,
            out: None,
            seed: 0,
        }
    }
}

/// Preset parameters of each figure.
pub fn figure_preset(figure: u8) -> Result<PartialConfig> {
    let full_turn = || Some(GridSpec::Values(linspace(0.0, 2.0 * PI, 401)));
    let base = PartialConfig {
        figure: Some(figure),
        ..PartialConfig::default()
    };
    Ok(match figure {
        2 => PartialConfig {
            command: Some(Command::EntropySweep),
            nu_grid: full_turn(),
            states: Some(vec![StateSpec::Label(EigenLabel::new(2, 5))]),
            subspace: Some("B12".into()),
            ..base
        },
        3 => PartialConfig {
            command: Some(Command::Dynamics),
            nu_grid: Some(GridSpec::Values(vec![0.0, FRAC_PI_2, PI])),
            omega: Some(GridSpec::Values(vec![1.0])),
            t_max: Some(10.0),
            t_steps: Some(400),
            states: Some(vec![
                StateSpec::Label(EigenLabel::new(2, 2)),
                StateSpec::Label(EigenLabel::new(2, 5)),
            ]),
            subspace: Some("B12".into()),
            ..base
        },
        4 => PartialConfig {
            command: Some(Command::Correlators),
            beta: Some(1.0),
            nu_grid: full_turn(),
            ..base
        },
        5 => PartialConfig {
            command: Some(Command::Momentum),
            beta: Some(1.0),
            params: PartialParams {
                mu: Some(10.0),
                ..PartialParams::default()
            },
            nu_grid: Some(GridSpec::Values(vec![0.0, FRAC_PI_4, FRAC_PI_2, 3.0 * FRAC_PI_4, PI])),
            k_grid: Some(GridSpec::Values(linspace(-PI, PI, 201))),
            ..base
        },
        other => bail!("no figure {other}; choose 2, 3, 4 or 5"),
    })
}

impl RunConfig {
    pub fn resolve(file: Option<PartialConfig>, flags: PartialConfig) -> Result<RunConfig> {
        let figure = flags.figure.or(file.as_ref().and_then(|f| f.figure));
        let has_command = flags.command.is_some() || file.as_ref().is_some_and(|f| f.command.is_some());
        if figure.is_none() && !has_command {
            bail!("no command given; pass a command or `--figure N`");
        }
        let mut cfg = RunConfig::default();
        if let Some(n) = figure {
            figure_preset(n)?.apply(&mut cfg)?;
        }
        if let Some(f) = &file {
            f.apply(&mut cfg)?;
        }
        flags.apply(&mut cfg)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_cli(cli: &Cli) -> Result<RunConfig> {
        let file = cli.config.as_deref().map(PartialConfig::from_file).transpose()?;
        Self::resolve(file, PartialConfig::from_cli(cli))
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        check_grid(&self.nu_grid).context("nu grid")?;
        check_grid(&self.k_grid).context("k grid")?;
        check_grid(&self.omega).context("omega")?;
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            bail!("beta must be positive, got {}", self.beta);
        }
        if !(self.t_max >= 0.0 && self.t_max.is_finite()) {
            bail!("t-max must be a nonnegative number, got {}", self.t_max);
        }
        if self.t_steps == 0 {
            bail!("t-steps must be at least 1");
        }
        if self.states.is_empty() {
            bail!("no eigenstate selected");
        }
        let two_site_only = matches!(self.command, Command::EntropySweep | Command::Dynamics | Command::Momentum);
        if two_site_only && self.params.sites != 2 {
            bail!("`{}` needs a two-site chain", self.command_name());
        }
        self.subspace()?;
        Ok(())
    }

    pub fn subspace(&self) -> Result<OneParticleSubspace> {
        Ok(OneParticleSubspace::parse(&self.subspace, self.params.sites)?)
    }

    pub fn times(&self) -> Vec<f64> {
        linspace(0.0, self.t_max, self.t_steps)
    }

    pub fn command_name(&self) -> &'static str {
        match self.command {
            Command::Spectrum => "spectrum",
            Command::EntropySweep => "entropy-sweep",
            Command::Dynamics => "dynamics",
            Command::Correlators => "correlators",
            Command::Momentum => "momentum",
            Command::Verify => "verify",
        }
    }
}
