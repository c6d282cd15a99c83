//! Experiment configuration (TOML). Lengths and times are in units where the
//! wave speed is 1. Every field has a default; the resolved configuration is
//! echoed into each output's metadata.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use coupled_wave::born::BornConfig;
use coupled_wave::{
    ClassTag, Field, Interpolation, ParameterKind, Receiver, ScalarProfile, Symmetry,
};

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Forward,
    Invert,
    Identity,
    Geomcheck,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Optional; when present it must agree with the subcommand.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    pub potential: PotentialConfig,
    pub geometry: GeometryConfig,
    pub solver: SolverConfig,
    pub born: BornConfig,
    pub inversion: InversionConfig,
    pub identity: IdentityConfig,
    pub geomcheck: GeomcheckConfig,
    pub output: OutputConfig,
}

/// A scalar profile of the radius (radial symmetry) or of the ellipsoidal
/// sum `|x| + |x − e|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileConfig {
    Constant {
        value: f64,
    },
    /// `amplitude · exp(−rate · (p − shift))`
    Exponential {
        amplitude: f64,
        rate: f64,
        #[serde(default)]
        shift: f64,
    },
    /// `amplitude · exp(−((p − center)/width)²)`
    Gaussian {
        amplitude: f64,
        #[serde(default = "one")]
        width: f64,
        #[serde(default)]
        center: f64,
    },
    Table {
        params: Vec<f64>,
        values: Vec<f64>,
        #[serde(default = "linear")]
        interpolation: Interpolation,
    },
    Csv {
        path: PathBuf,
        #[serde(default = "linear")]
        interpolation: Interpolation,
    },
}

fn one() -> f64 {
    1.0
}

fn linear() -> Interpolation {
    Interpolation::Linear
}

impl Default for ProfileConfig {
    fn default() -> Self {
        ProfileConfig::Constant { value: 0.0 }
    }
}

impl ProfileConfig {
    /// The profile as a plain function, when it has a closed form.
    pub fn closed_form(&self) -> Option<impl Fn(f64) -> f64 + Send + Sync + Clone + 'static> {
        let (kind, a, b, c) = match *self {
            ProfileConfig::Constant { value } => (0, value, 0.0, 0.0),
            ProfileConfig::Exponential {
                amplitude,
                rate,
                shift,
            } => (1, amplitude, rate, shift),
            ProfileConfig::Gaussian {
                amplitude,
                width,
                center,
            } => (2, amplitude, width, center),
            _ => return None,
        };
        Some(move |p: f64| match kind {
            0 => a,
            1 => a * (-b * (p - c)).exp(),
            _ => a * (-((p - c) / b).powi(2)).exp(),
        })
    }

    fn validate(&self, base: &Path) -> Result<(), ConfigError> {
        match self {
            ProfileConfig::Gaussian { width, .. } if !(*width > 0.0) => {
                invalid(format!("gaussian width must be positive, got {width}"))
            }
            ProfileConfig::Table { params, values, .. } if params.len() != values.len() => {
                invalid("table params and values differ in length")
            }
            ProfileConfig::Csv { path, .. } if !base.join(path).is_file() => invalid(format!(
                "profile file {} does not exist",
                base.join(path).display()
            )),
            _ => Ok(()),
        }
    }

    /// Builds the field; `base` resolves relative CSV paths.
    pub fn field(&self, symmetry: Symmetry, base: &Path) -> coupled_wave::Result<Field> {
        let kind = match symmetry {
            Symmetry::Ellipsoidal => ParameterKind::EllipsoidalSum,
            _ => ParameterKind::Radius,
        };
        if let Some(f) = self.closed_form() {
            if let ProfileConfig::Constant { value } = self {
                return Ok(Field::Constant(*value));
            }
            return Ok(match symmetry {
                Symmetry::Ellipsoidal => Field::ellipsoidal(f),
                _ => Field::radial(f),
            });
        }
        let profile = match self {
            ProfileConfig::Table {
                params,
                values,
                interpolation,
            } => ScalarProfile::new(
                kind,
                params.iter().copied().zip(values.iter().copied()).collect(),
                *interpolation,
            )?,
            ProfileConfig::Csv {
                path,
                interpolation,
            } => ScalarProfile::read_csv_path(base.join(path), kind, *interpolation)?,
            _ => unreachable!("closed forms handled above"),
        };
        Ok(Field::Profile(profile))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PotentialConfig {
    pub class: ClassTag,
    pub symmetry: Symmetry,
    pub unknown: ProfileConfig,
    /// `[β12, β21]` for A2, `[β11, β22]` for A3.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prescribed: Option<[ProfileConfig; 2]>,
}

impl Default for PotentialConfig {
    fn default() -> Self {
        Self {
            class: ClassTag::A1,
            symmetry: Symmetry::Radial,
            unknown: ProfileConfig::default(),
            prescribed: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
    pub receiver: Receiver,
    /// Observation horizon `T`.
    pub t_max: f64,
    /// Number of sample times; origin: `k·T/samples`, focus: `1 + k·(T − 1)/samples`.
    pub samples: usize,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            receiver: Receiver::Origin,
            t_max: 2.0,
            samples: 64,
        }
    }
}

impl GeometryConfig {
    pub fn times(&self) -> Vec<f64> {
        let n = self.samples as f64;
        (1..=self.samples)
            .map(|k| match self.receiver {
                Receiver::Origin => k as f64 * self.t_max / n,
                Receiver::Focus => 1.0 + k as f64 * (self.t_max - 1.0) / n,
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Characteristic steps `N`.
    pub n: usize,
    /// Grid extent in `η = t + r`; defaults to `T`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta_max: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            n: 256,
            eta_max: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    LayerStrip,
    GaussNewton,
    BornPicard,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub sigma: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InversionConfig {
    /// Defaults to layer stripping at the origin and Born–Picard at e.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,
    /// Trace CSV to invert; when absent the trace is synthesised from
    /// `[potential]` with the forward settings.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<PathBuf>,
    /// Inversion grid `N` (radial methods); sample times must include `k·T/N`.
    pub n: usize,
    pub lambda: f64,
    /// When non-empty, `λ` is chosen from this list by the discrepancy principle.
    pub lambdas: Vec<f64>,
    pub max_iters: usize,
    pub corrections: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseConfig>,
}

impl Default for InversionConfig {
    fn default() -> Self {
        Self {
            method: None,
            trace: None,
            n: 64,
            lambda: 0.0,
            lambdas: Vec::new(),
            max_iters: 50,
            corrections: 3,
            noise: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IdentityConfig {
    pub tau: f64,
    pub n: usize,
    /// Second potential; the first is `[potential]`. Defaults to zero of the same class.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub second: Option<PotentialConfig>,
    /// Radii for the comparison audit of the difference (skipped when empty).
    pub audit_taus: Vec<f64>,
    pub n_phi: usize,
    pub n_theta: usize,
}

impl Default for IdentityConfig {
    fn default() -> Self {
        Self {
            tau: 0.5,
            n: 512,
            second: None,
            audit_taus: Vec::new(),
            n_phi: 48,
            n_theta: 32,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeomcheckConfig {
    pub two_tau: f64,
    pub n_phi: usize,
    pub n_theta: usize,
    pub n_rho: usize,
}

impl Default for GeomcheckConfig {
    fn default() -> Self {
        Self {
            two_tau: 2.0,
            n_phi: 64,
            n_theta: 128,
            n_rho: 32,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
    }

    pub fn eta_max(&self) -> f64 {
        self.solver.eta_max.unwrap_or(self.geometry.t_max)
    }

    pub fn method(&self) -> Method {
        self.inversion
            .method
            .unwrap_or(match self.geometry.receiver {
                Receiver::Origin => Method::LayerStrip,
                Receiver::Focus => Method::BornPicard,
            })
    }

    /// Checks everything that can be checked without running a solver.
    pub fn validate(&self, mode: Mode, base: &Path) -> Result<(), ConfigError> {
        if let Some(m) = self.mode {
            if m != mode {
                return invalid(format!(
                    "config declares mode {m:?} but {mode:?} was requested"
                ));
            }
        }
        let g = &self.geometry;
        if !(g.t_max > 0.0) || !g.t_max.is_finite() {
            return invalid(format!("geometry.t_max must be positive, got {}", g.t_max));
        }
        if g.samples == 0 {
            return invalid("geometry.samples must be positive");
        }
        if g.receiver == Receiver::Focus && !(g.t_max > 1.0) {
            return invalid(format!("receiver focus needs t_max > 1, got {}", g.t_max));
        }
        if self.solver.n < 2 {
            return invalid("solver.n must be at least 2");
        }
        if g.receiver == Receiver::Origin && !(g.t_max <= self.eta_max()) {
            return invalid(format!(
                "t_max {} exceeds eta_max {}",
                g.t_max,
                self.eta_max()
            ));
        }
        let p = &self.potential;
        p.validate(base)?;
        match mode {
            Mode::Forward => self.check_geometry_symmetry(),
            Mode::Invert => {
                self.check_geometry_symmetry()?;
                if p.class == ClassTag::General {
                    // surfaced by the inversion itself as an underdetermined class
                    return Ok(());
                }
                let inv = &self.inversion;
                if let Some(t) = &inv.trace {
                    if !base.join(t).is_file() {
                        return invalid(format!(
                            "trace file {} does not exist",
                            base.join(t).display()
                        ));
                    }
                }
                match (self.method(), g.receiver) {
                    (Method::BornPicard, Receiver::Focus) => {}
                    (Method::LayerStrip | Method::GaussNewton, Receiver::Origin) => {
                        if inv.n < 2 {
                            return invalid("inversion.n must be at least 2");
                        }
                    }
                    (m, r) => {
                        return invalid(format!("method {m:?} does not apply to receiver {r:?}"))
                    }
                }
                if let Some(noise) = &inv.noise {
                    if !(noise.sigma >= 0.0) {
                        return invalid("inversion.noise.sigma must be >= 0");
                    }
                }
                if !(inv.lambda >= 0.0) || inv.lambdas.iter().any(|l| !(*l >= 0.0)) {
                    return invalid("regularisation weights must be >= 0");
                }
                Ok(())
            }
            Mode::Identity => {
                if p.symmetry != Symmetry::Radial {
                    return invalid("identity mode needs radial symmetry");
                }
                if let Some(q) = &self.identity.second {
                    q.validate(base)?;
                    if q.symmetry != Symmetry::Radial {
                        return invalid("identity.second must be radial");
                    }
                }
                if !(self.identity.tau > 0.0) {
                    return invalid("identity.tau must be positive");
                }
                Ok(())
            }
            Mode::Geomcheck => Ok(()),
        }
    }

    fn check_geometry_symmetry(&self) -> Result<(), ConfigError> {
        match (self.geometry.receiver, self.potential.symmetry) {
            (Receiver::Origin, Symmetry::Radial) | (Receiver::Focus, Symmetry::Ellipsoidal) => {
                Ok(())
            }
            (r, s) => invalid(format!(
                "receiver {r:?} needs the matching symmetry, got {s:?}"
            )),
        }
    }
}

impl PotentialConfig {
    fn validate(&self, base: &Path) -> Result<(), ConfigError> {
        self.unknown.validate(base)?;
        match (&self.prescribed, self.class) {
            (Some(pr), ClassTag::A2 | ClassTag::A3) => {
                pr[0].validate(base)?;
                pr[1].validate(base)
            }
            (None, ClassTag::A2 | ClassTag::A3) => {
                invalid(format!("class {} needs prescribed entries", self.class))
            }
            (Some(_), _) => invalid(format!("class {} takes no prescribed entries", self.class)),
            (None, _) => Ok(()),
        }
    }

    pub fn prescribed_fields(&self, base: &Path) -> coupled_wave::Result<Option<[Field; 2]>> {
        self.prescribed
            .as_ref()
            .map(|[a, b]| Ok([a.field(self.symmetry, base)?, b.field(self.symmetry, base)?]))
            .transpose()
    }

    pub fn build(&self, base: &Path) -> coupled_wave::Result<coupled_wave::MatrixPotential> {
        coupled_wave::build_potential(
            self.class,
            self.unknown.field(self.symmetry, base)?,
            self.prescribed_fields(base)?,
            self.symmetry,
        )
    }
}
