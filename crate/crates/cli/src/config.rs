use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context};
use clap::Parser;
use serde::{Deserialize, Serialize};

use hskdv::normal_form::Coupling;
use hskdv::spectral::GridSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Simulate,
    VerifyNormalForm,
    Smoothing,
    ResonanceScan,
    Dissipative,
    Attractor,
    OracleTest,
}

impl FromStr for Mode {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> anyhow::Result<Self> {
        Ok(match s {
            "simulate" => Mode::Simulate,
            "verify-normal-form" => Mode::VerifyNormalForm,
            "smoothing" => Mode::Smoothing,
            "resonance-scan" => Mode::ResonanceScan,
            "dissipative" => Mode::Dissipative,
            "attractor" => Mode::Attractor,
            "oracle-test" => Mode::OracleTest,
            other => bail!("unknown mode '{other}'"),
        })
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Mode::Simulate => "simulate",
            Mode::VerifyNormalForm => "verify-normal-form",
            Mode::Smoothing => "smoothing",
            Mode::ResonanceScan => "resonance-scan",
            Mode::Dissipative => "dissipative",
            Mode::Attractor => "attractor",
            Mode::OracleTest => "oracle-test",
        };
        f.write_str(name)
    }
}

/// Command-line flags. Every run parameter can also come from a JSON config
/// file; flags override file values.
#[derive(Debug, Parser)]
#[command(
    name = "hskdv",
    about = "Pseudospectral runs and resonance analysis for the coupled KdV system on the torus"
)]
pub struct Cli {
    /// JSON config file mirroring the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,

    #[arg(long)]
    pub mode: Option<Mode>,

    /// Coupling a, either an exact fraction "p/q" or a decimal. Fractions
    /// route resonance classification through exact integer arithmetic.
    #[arg(long)]
    pub a: Option<String>,

    #[arg(long)]
    pub beta: Option<f64>,

    #[arg(long)]
    pub gamma: Option<f64>,

    /// Data-regularity index for seeded initial data.
    #[arg(long)]
    pub s: Option<f64>,

    /// Comma-separated target indices for smoothing residual norms.
    #[arg(long = "s1-grid", value_delimiter = ',')]
    pub s1_grid: Option<Vec<f64>>,

    #[arg(long = "n-modes")]
    pub n_modes: Option<usize>,

    /// Physical grid size; defaults to the smallest alias-free FFT size.
    #[arg(long = "m-grid")]
    pub m_grid: Option<usize>,

    #[arg(long)]
    pub dt: Option<f64>,

    #[arg(long = "t-final")]
    pub t_final: Option<f64>,

    #[arg(long)]
    pub seed: Option<u64>,

    /// Irrationality exponent override for floating coupling values.
    #[arg(long)]
    pub mu: Option<f64>,

    /// Upper bound for internal parallelism across seeds/data.
    #[arg(long)]
    pub jobs: Option<usize>,

    #[arg(long = "out-dir")]
    pub out_dir: Option<PathBuf>,

    /// Scan range for resonance-gap tables.
    #[arg(long = "k-max")]
    pub k_max: Option<i64>,

    /// Amplitude of seeded initial data.
    #[arg(long)]
    pub amplitude: Option<f64>,

    /// Regularity offset α for the attractor probe (needs α < 1/2).
    #[arg(long)]
    pub alpha: Option<f64>,

    /// Stability budget for the dt ≤ c_stab/N² guard.
    #[arg(long = "c-stab")]
    pub c_stab: Option<f64>,

    /// Store every n-th step of the trajectory.
    #[arg(long = "sample-every")]
    pub sample_every: Option<usize>,
}

/// Fully resolved run configuration; serialized into the manifest so a run
/// can be reproduced from its own output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub mode: Mode,
    pub a: String,
    pub beta: f64,
    pub gamma: f64,
    pub s: f64,
    pub s1_grid: Vec<f64>,
    pub n_modes: usize,
    pub m_grid: Option<usize>,
    pub dt: f64,
    pub t_final: f64,
    pub seed: u64,
    pub mu: Option<f64>,
    pub jobs: usize,
    pub out_dir: PathBuf,
    pub k_max: i64,
    pub amplitude: f64,
    pub alpha: f64,
    pub c_stab: Option<f64>,
    pub sample_every: Option<usize>,
}

/// File-level view with every field optional, so partial configs are fine.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct PartialConfig {
    pub mode: Option<Mode>,
    pub a: Option<String>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub s: Option<f64>,
    pub s1_grid: Option<Vec<f64>>,
    pub n_modes: Option<usize>,
    pub m_grid: Option<usize>,
    pub dt: Option<f64>,
    pub t_final: Option<f64>,
    pub seed: Option<u64>,
    pub mu: Option<f64>,
    pub jobs: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub k_max: Option<i64>,
    pub amplitude: Option<f64>,
    pub alpha: Option<f64>,
    pub c_stab: Option<f64>,
    pub sample_every: Option<usize>,
}

impl RunConfig {
    /// Merges config file (if any) with flags; flags win.
    pub fn resolve(cli: Cli) -> anyhow::Result<RunConfig> {
        let file: PartialConfig = match &cli.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("cannot read config file {}", path.display()))?;
                serde_json::from_str(&text)
                    .with_context(|| format!("cannot parse config file {}", path.display()))?
            }
            None => PartialConfig::default(),
        };

        let mode = cli
            .mode
            .or(file.mode)
            .context("missing required field: mode")?;
        let config = RunConfig {
            mode,
            a: cli.a.or(file.a).unwrap_or_else(|| "1/2".to_string()),
            beta: cli.beta.or(file.beta).unwrap_or(-1.0),
            gamma: cli.gamma.or(file.gamma).unwrap_or(0.0),
            s: cli.s.or(file.s).unwrap_or(1.0),
            s1_grid: cli
                .s1_grid
                .or(file.s1_grid)
                .unwrap_or_else(|| vec![1.0, 1.25, 1.5]),
            n_modes: cli.n_modes.or(file.n_modes).unwrap_or(32),
            m_grid: cli.m_grid.or(file.m_grid),
            dt: cli.dt.or(file.dt).unwrap_or(1e-4),
            t_final: cli.t_final.or(file.t_final).unwrap_or(1.0),
            seed: cli.seed.or(file.seed).unwrap_or(0),
            mu: cli.mu.or(file.mu),
            jobs: cli.jobs.or(file.jobs).unwrap_or(1),
            out_dir: cli
                .out_dir
                .or(file.out_dir)
                .unwrap_or_else(|| PathBuf::from(".")),
            k_max: cli.k_max.or(file.k_max).unwrap_or(1000),
            amplitude: cli.amplitude.or(file.amplitude).unwrap_or(1.0),
            alpha: cli.alpha.or(file.alpha).unwrap_or(0.4),
            c_stab: cli.c_stab.or(file.c_stab),
            sample_every: cli.sample_every.or(file.sample_every),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        let a = self.coupling()?;
        let av = a.as_f64();
        if !(av > 0.25 && av < 1.0) {
            bail!("field 'a': value {av} outside the admissible interval (1/4, 1)");
        }
        if self.dt <= 0.0 {
            bail!("field 'dt': must be positive, got {}", self.dt);
        }
        if self.n_modes < 8 {
            bail!("field 'n-modes': need N >= 8, got {}", self.n_modes);
        }
        if self.t_final < 0.0 {
            bail!("field 't-final': must be nonnegative, got {}", self.t_final);
        }
        if self.jobs == 0 {
            bail!("field 'jobs': must be at least 1");
        }
        if matches!(self.mode, Mode::Dissipative | Mode::Attractor) {
            if self.gamma <= 0.0 {
                bail!(
                    "field 'gamma': mode {} needs positive damping, got {}",
                    self.mode,
                    self.gamma
                );
            }
            if self.beta >= 0.0 {
                bail!(
                    "field 'beta': mode {} needs beta < 0, got {}",
                    self.mode,
                    self.beta
                );
            }
        }
        if self.mode == Mode::Attractor && self.alpha >= 0.5 {
            bail!("field 'alpha': attractor probes need alpha < 1/2");
        }
        if self.mode == Mode::ResonanceScan && self.k_max < 1 {
            bail!("field 'k-max': need at least 1");
        }
        Ok(())
    }

    pub fn coupling(&self) -> anyhow::Result<Coupling> {
        self.a
            .parse::<Coupling>()
            .map_err(|e| anyhow::anyhow!("field 'a': {e}"))
    }

    pub fn grid(&self) -> anyhow::Result<GridSpec> {
        match self.m_grid {
            Some(m) => {
                GridSpec::new(self.n_modes, m).map_err(|e| anyhow::anyhow!("field 'm-grid': {e}"))
            }
            None => Ok(GridSpec::for_modes(self.n_modes)),
        }
    }
}
