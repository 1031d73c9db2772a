//! Run configuration: a TOML file plus command-line overrides, materialized
//! into concrete model parameters before any computation starts.

use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dynamics::{FitMethod, FitWindow, DEFAULT_FIT_SAMPLES};
use crate::operators::{equidistant_detunings, Boundary, ModelParams};
use crate::{Error, Result};

/// Generator used for gaussian disorder, recorded in every artifact.
pub const RNG_NAME: &str = "ChaCha8Rng (rand_chacha 0.9), standard normal via rand_distr 0.5";

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub n: usize,
    #[serde(default = "one")]
    pub gamma: f64,
    #[serde(default)]
    pub omega: f64,
    #[serde(default)]
    pub delta: f64,
    #[serde(default)]
    pub boundary: Boundary,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Disorder {
    Explicit { values: Vec<f64> },
    Equidistant { delta_omega: f64 },
    Gaussian { scale: f64, seed: u64 },
}

impl Default for Disorder {
    fn default() -> Self {
        Disorder::Equidistant { delta_omega: 0.0 }
    }
}

/// Grid of values: explicit, `linear = [start, stop, count]` or `log = [start, stop, count]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Grid {
    Values(Vec<f64>),
    Linear(f64, f64, usize),
    Log(f64, f64, usize),
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        match *self {
            Grid::Values(ref v) => v.clone(),
            Grid::Linear(a, b, k) => crate::dynamics::linear_grid(a, b, k),
            Grid::Log(a, b, k) => crate::dynamics::log_grid(a, b, k),
        }
    }

    fn validate(&self, name: &str) -> Result<()> {
        let bad = |msg: &str| Err(Error::Config(format!("sweep.{name}: {msg}")));
        match *self {
            Grid::Values(ref v) if v.is_empty() => return bad("empty grid"),
            Grid::Linear(_, _, 0) | Grid::Log(_, _, 0) => return bad("grid size must be > 0"),
            Grid::Log(a, _, _) if a <= 0.0 => return bad("log grid must start above 0"),
            _ => {}
        }
        if self.points().iter().any(|x| !x.is_finite() || *x < 0.0) {
            return bad("values must be finite and >= 0");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub omega: Grid,
    pub delta_omega: Grid,
    /// Eigenvalues kept per point; defaults to the strong-drive count for N.
    pub keep: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum InitialState {
    #[default]
    Ground,
    Excited,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum TimeGrid {
    #[default]
    Log,
    Linear,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Propagator {
    /// Eigenmode expansion; falls back to the ODE solver if the spectrum is defective.
    #[default]
    Spectral,
    Ode,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsSection {
    #[serde(default = "default_t_min")]
    pub t_min: f64,
    pub t_max: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub grid: TimeGrid,
    #[serde(default)]
    pub initial: InitialState,
    #[serde(default)]
    pub propagator: Propagator,
    /// 1-based atom pairs; all `n < m` pairs when absent.
    pub pairs: Option<Vec<(usize, usize)>>,
    #[serde(default)]
    pub fit_window: FitWindow,
    #[serde(default)]
    pub fit_method: FitMethod,
    #[serde(default)]
    pub envelope: bool,
}

fn default_t_min() -> f64 {
    0.01
}

fn default_samples() -> usize {
    DEFAULT_FIT_SAMPLES
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    /// Rates below this (units of gamma) count as subradiant.
    #[serde(default = "default_subradiant")]
    pub subradiant: f64,
    /// Cut below the gamma/2 bulk used to collect long-lived oscillating modes.
    #[serde(default = "default_long_lived")]
    pub long_lived: f64,
    #[serde(default = "default_freq_tol")]
    pub freq_tol: f64,
    /// Drive multiplier for the drive-scaling dark-mode count; skipped when absent.
    pub kappa: Option<f64>,
    #[serde(default = "default_null_tol")]
    pub null_tol: f64,
}

fn default_subradiant() -> f64 {
    0.05
}
fn default_long_lived() -> f64 {
    0.25
}
fn default_freq_tol() -> f64 {
    1e-6
}
fn default_null_tol() -> f64 {
    crate::rateq::NULL_TOL
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            subradiant: default_subradiant(),
            long_lived: default_long_lived(),
            freq_tol: default_freq_tol(),
            kappa: None,
            null_tol: default_null_tol(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Txt,
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_formats() -> Vec<Format> {
    vec![Format::Json, Format::Csv, Format::Txt]
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: default_dir(), formats: default_formats() }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    #[serde(default)]
    pub disorder: Disorder,
    pub sweep: Option<SweepSection>,
    pub dynamics: Option<DynamicsSection>,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub thresholds: Thresholds,
}

/// Flag values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub gamma_label: Option<f64>,
}

/// A config with its disorder drawn and flags applied.
#[derive(Clone, Debug, Serialize)]
pub struct ResolvedConfig {
    pub config: RunConfig,
    pub detunings: Vec<f64>,
    /// Seed used for gaussian disorder, if any.
    pub seed: Option<u64>,
    pub rng: Option<&'static str>,
    /// Physical value of gamma used only to label outputs.
    pub gamma_label: Option<f64>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let m = &self.model;
        if m.n == 0 {
            return Err(Error::Config("model.n must be >= 1".into()));
        }
        match &self.disorder {
            Disorder::Explicit { values } if values.len() != m.n => {
                return Err(Error::Config(format!("disorder.values has {} entries for n={}", values.len(), m.n)))
            }
            Disorder::Explicit { values } if values.iter().any(|v| !v.is_finite()) => {
                return Err(Error::Config("disorder.values must be finite".into()))
            }
            Disorder::Equidistant { delta_omega } if !(*delta_omega >= 0.0) || !delta_omega.is_finite() => {
                return Err(Error::Config("disorder.delta_omega must be finite and >= 0".into()))
            }
            Disorder::Gaussian { scale, .. } if !(*scale >= 0.0) || !scale.is_finite() => {
                return Err(Error::Config("disorder.scale must be finite and >= 0".into()))
            }
            _ => {}
        }
        if let Some(s) = &self.sweep {
            s.omega.validate("omega")?;
            s.delta_omega.validate("delta_omega")?;
            if matches!(self.disorder, Disorder::Explicit { .. }) {
                return Err(Error::Config("a sweep needs equidistant or gaussian disorder to scale".into()));
            }
            if s.keep == Some(0) {
                return Err(Error::Config("sweep.keep must be > 0".into()));
            }
        }
        if let Some(d) = &self.dynamics {
            if !(d.t_max > d.t_min && d.t_min >= 0.0) || !d.t_max.is_finite() {
                return Err(Error::Config("dynamics needs 0 <= t_min < t_max".into()));
            }
            if d.grid == TimeGrid::Log && d.t_min <= 0.0 {
                return Err(Error::Config("dynamics.t_min must be > 0 for a log grid".into()));
            }
            if d.samples < 2 {
                return Err(Error::Config("dynamics.samples must be >= 2".into()));
            }
            for &(a, b) in d.pairs.iter().flatten() {
                if a == 0 || b == 0 || a > m.n || b > m.n {
                    return Err(Error::Config(format!("pair ({a},{b}) outside 1..={}", m.n)));
                }
            }
            if !(d.fit_window.t_min < d.fit_window.t_max) {
                return Err(Error::Config("dynamics.fit_window needs t_min < t_max".into()));
            }
        }
        let t = &self.thresholds;
        if !(t.subradiant > 0.0 && t.long_lived > 0.0 && t.freq_tol > 0.0 && t.null_tol > 0.0) {
            return Err(Error::Config("thresholds must be > 0".into()));
        }
        if t.kappa.is_some_and(|k| !(k > 1.0)) {
            return Err(Error::Config("thresholds.kappa must be > 1".into()));
        }
        // surfaces model-level errors (boundary vs delta, finite values) as config errors
        self.model_params_with(vec![0.0; m.n], m.omega).map(|_| ())
    }

    fn model_params_with(&self, detunings: Vec<f64>, omega: f64) -> Result<ModelParams> {
        let m = &self.model;
        let p = ModelParams {
            n: m.n,
            gamma: m.gamma,
            omega,
            detunings,
            delta: m.delta,
            boundary: m.boundary,
        };
        p.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(p)
    }

    /// Validate, draw disorder and apply overrides.
    pub fn resolve(mut self, ov: &Overrides) -> Result<ResolvedConfig> {
        if let Some(out) = &ov.out {
            self.output.dir = out.clone();
        }
        if let (Some(s), Disorder::Gaussian { seed, .. }) = (ov.seed, &mut self.disorder) {
            *seed = s;
        }
        if ov.gamma_label.is_some_and(|g| !(g > 0.0) || !g.is_finite()) {
            return Err(Error::Config("--gamma must be finite and > 0".into()));
        }
        self.validate()?;
        let n = self.model.n;
        let (detunings, seed, rng) = match self.disorder {
            Disorder::Explicit { ref values } => (values.clone(), None, None),
            Disorder::Equidistant { delta_omega } => (equidistant_detunings(n, delta_omega), None, None),
            Disorder::Gaussian { scale, seed } => (gaussian_detunings(n, scale, seed), Some(seed), Some(RNG_NAME)),
        };
        Ok(ResolvedConfig { config: self, detunings, seed, rng, gamma_label: ov.gamma_label })
    }
}

/// `n` draws from a normal distribution of standard deviation `scale`.
pub fn gaussian_detunings(n: usize, scale: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    (0..n).map(|_| scale * normal.sample(&mut rng)).collect()
}

impl ResolvedConfig {
    pub fn params(&self) -> ModelParams {
        self.config
            .model_params_with(self.detunings.clone(), self.config.model.omega)
            .expect("validated at resolve")
    }

    /// Parameters at a sweep point: drive `omega`, disorder pattern scaled to `delta_omega`.
    pub fn sweep_params(&self, omega: f64, delta_omega: f64) -> Result<ModelParams> {
        let n = self.config.model.n;
        let detunings = match self.config.disorder {
            Disorder::Gaussian { seed, .. } => gaussian_detunings(n, delta_omega, seed),
            _ => equidistant_detunings(n, delta_omega),
        };
        self.config.model_params_with(detunings, omega)
    }

    /// Same model without on-site disorder.
    pub fn clean_params(&self) -> ModelParams {
        let n = self.config.model.n;
        self.config.model_params_with(vec![0.0; n], self.config.model.omega).expect("validated at resolve")
    }

    pub fn out_dir(&self) -> &Path {
        &self.config.output.dir
    }

    pub fn wants(&self, f: Format) -> bool {
        self.config.output.formats.contains(&f)
    }

    /// SHA-256 over the canonical JSON of the resolved config.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&json))
    }
}
