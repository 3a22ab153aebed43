//! Flat `key = value` run configuration with `#` comments.
//!
//! Every key has a default matching the main figure (ε = 0.1, m = 1, r = 1,
//! ρ = 0.6, λ = 0), so a one-line file naming the experiment is a complete
//! configuration. Parse errors carry the line number.

use std::path::{Path, PathBuf};

use dirac_walk::coins::{Lambda, ModelParams, Variant};
use dirac_walk::spectral::ModelTag;
use dirac_walk::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Check,
    Evolve,
    Dispersion,
    Doubling,
    Slope,
    Sweep,
    Figure1,
    FigureSupplemental,
}

impl Experiment {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "check" => Some(Self::Check),
            "evolve" => Some(Self::Evolve),
            "dispersion" => Some(Self::Dispersion),
            "doubling" => Some(Self::Doubling),
            "slope" => Some(Self::Slope),
            "sweep" => Some(Self::Sweep),
            "figure1" => Some(Self::Figure1),
            "figure-supplemental" => Some(Self::FigureSupplemental),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Check => "check",
            Self::Evolve => "evolve",
            Self::Dispersion => "dispersion",
            Self::Doubling => "doubling",
            Self::Slope => "slope",
            Self::Sweep => "sweep",
            Self::Figure1 => "figure1",
            Self::FigureSupplemental => "figure-supplemental",
        }
    }
}

/// Where the Clifford representation comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum RepSource {
    Pauli,
    File(PathBuf),
    /// Pauli triple conjugated by a Haar unitary drawn from the seed.
    RandomConjugated(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialState {
    Packet,
    Delta,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub experiment: Option<Experiment>,
    pub params: ModelParams,
    pub rep_source: RepSource,
    pub sites: usize,
    pub steps: usize,
    pub grid_points: usize,
    pub model: ModelTag,
    pub epsilons: Vec<f64>,
    pub out_dir: PathBuf,
    pub tolerance: f64,
    pub seed: u64,
    pub initial: InitialState,
    /// Packet momentum; default is half the zone edge.
    pub packet_center_k: Option<f64>,
    /// Packet width in units of the lattice momentum spacing 2π/(Nε).
    pub packet_width_momenta: f64,
    pub branch_plus: bool,
    /// For `dispersion`: also solve the frequency relation on the grid and
    /// fail (exit 3) where no real frequency exists.
    pub require_frequencies: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            experiment: None,
            params: ModelParams::wilson(0.1, 1.0, 1.0, 0.6, Lambda::Zero),
            rep_source: RepSource::Pauli,
            sites: 128,
            steps: 200,
            grid_points: 1001,
            model: ModelTag::Dqw(Lambda::Zero),
            epsilons: Vec::new(),
            out_dir: PathBuf::from("out"),
            tolerance: 1e-12,
            seed: 0,
            initial: InitialState::Packet,
            packet_center_k: None,
            packet_width_momenta: 10.0,
            branch_plus: true,
            require_frequencies: false,
        }
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_f64(line: usize, key: &str, value: &str) -> Result<f64> {
    value
        .parse()
        .map_err(|_| parse_err(line, format!("`{key}` expects a number, got `{value}`")))
}

fn parse_usize(line: usize, key: &str, value: &str) -> Result<usize> {
    value.parse().map_err(|_| {
        parse_err(
            line,
            format!("`{key}` expects a nonnegative integer, got `{value}`"),
        )
    })
}

/// Parse and fully validate a configuration file.
pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    let mut config = RunConfig::default();
    let mut lambda_set: Option<(usize, usize)> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| parse_err(line_no, format!("expected `key = value`, got `{line}`")))?;
        let key = key.trim();
        let value = value.trim();
        if value.is_empty() {
            return Err(parse_err(line_no, format!("`{key}` has an empty value")));
        }

        match key {
            "experiment" => {
                config.experiment = Some(Experiment::parse(value).ok_or_else(|| {
                    parse_err(
                        line_no,
                        format!(
                            "unknown experiment `{value}`; expected check, evolve, dispersion, \
                             doubling, slope, sweep, figure1 or figure-supplemental"
                        ),
                    )
                })?);
            }
            "epsilon" => config.params.epsilon = parse_f64(line_no, key, value)?,
            "m" | "mass" => config.params.mass = parse_f64(line_no, key, value)?,
            "r" => config.params.wilson_r = parse_f64(line_no, key, value)?,
            "rho" => config.params.rho = parse_f64(line_no, key, value)?,
            "lambda" => {
                let idx_val = parse_usize(line_no, key, value)?;
                lambda_set = Some((line_no, idx_val));
            }
            "variant" => {
                config.params.variant = match value {
                    "wilson" => Variant::WilsonLambda,
                    "massive-q0" => Variant::MassiveQ0,
                    _ => {
                        return Err(parse_err(
                            line_no,
                            format!("`variant` must be wilson or massive-q0, got `{value}`"),
                        ))
                    }
                };
            }
            "rep" => {
                config.rep_source = if value == "pauli" {
                    RepSource::Pauli
                } else if let Some(path) = value.strip_prefix("file:") {
                    RepSource::File(PathBuf::from(path))
                } else if value == "random" {
                    RepSource::RandomConjugated(config.seed)
                } else if let Some(seed) = value.strip_prefix("random:") {
                    RepSource::RandomConjugated(
                        seed.parse().map_err(|_| {
                            parse_err(line_no, format!("bad seed in `rep = {value}`"))
                        })?,
                    )
                } else {
                    return Err(parse_err(
                        line_no,
                        format!("`rep` must be pauli, file:<path> or random:<seed>, got `{value}`"),
                    ));
                };
            }
            "sites" => config.sites = parse_usize(line_no, key, value)?,
            "steps" => config.steps = parse_usize(line_no, key, value)?,
            "grid_points" => config.grid_points = parse_usize(line_no, key, value)?,
            "model" => {
                config.model = match value {
                    "dirac" => ModelTag::Dirac,
                    "naive" => ModelTag::Naive,
                    "lgt" => ModelTag::Lgt,
                    "dqw" => ModelTag::Dqw(config.params.lambda),
                    _ => {
                        return Err(parse_err(
                            line_no,
                            format!("`model` must be dirac, naive, lgt or dqw, got `{value}`"),
                        ))
                    }
                };
            }
            "epsilons" => {
                config.epsilons = value
                    .split(',')
                    .map(|tok| {
                        tok.trim().parse::<f64>().map_err(|_| {
                            parse_err(line_no, format!("bad epsilon `{}` in list", tok.trim()))
                        })
                    })
                    .collect::<Result<_>>()?;
            }
            "out" => config.out_dir = PathBuf::from(value),
            "tolerance" => config.tolerance = parse_f64(line_no, key, value)?,
            "seed" => {
                config.seed = value.parse().map_err(|_| {
                    parse_err(line_no, format!("`seed` expects an integer, got `{value}`"))
                })?;
            }
            "initial" => {
                config.initial = match value {
                    "packet" => InitialState::Packet,
                    "delta" => InitialState::Delta,
                    _ => {
                        return Err(parse_err(
                            line_no,
                            format!("`initial` must be packet or delta, got `{value}`"),
                        ))
                    }
                };
            }
            "packet_center_k" => config.packet_center_k = Some(parse_f64(line_no, key, value)?),
            "packet_width_momenta" => config.packet_width_momenta = parse_f64(line_no, key, value)?,
            "branch" => {
                config.branch_plus = match value {
                    "plus" => true,
                    "minus" => false,
                    _ => {
                        return Err(parse_err(
                            line_no,
                            format!("`branch` must be plus or minus, got `{value}`"),
                        ))
                    }
                };
            }
            "require_frequencies" => {
                config.require_frequencies = match value {
                    "true" => true,
                    "false" => false,
                    _ => {
                        return Err(parse_err(
                            line_no,
                            format!("`require_frequencies` must be true or false, got `{value}`"),
                        ))
                    }
                };
            }
            other => {
                return Err(parse_err(line_no, format!("unknown key `{other}`")));
            }
        }
    }

    if let Some((line_no, idx_val)) = lambda_set {
        config.params.lambda =
            Lambda::try_from_index(idx_val).map_err(|e| parse_err(line_no, e.to_string()))?;
        if let ModelTag::Dqw(_) = config.model {
            config.model = ModelTag::Dqw(config.params.lambda);
        }
    }

    validate(&config, &text)?;
    Ok(config)
}

fn validate(config: &RunConfig, text: &str) -> Result<()> {
    let last_line = text.lines().count().max(1);
    config
        .params
        .validate()
        .map_err(|e| parse_err(last_line, e.to_string()))?;
    if config.sites < 3 {
        return Err(parse_err(
            last_line,
            format!("sites must be >= 3, got {}", config.sites),
        ));
    }
    if config.grid_points < 3 || config.grid_points.is_multiple_of(2) {
        return Err(parse_err(
            last_line,
            format!(
                "grid_points must be odd and >= 3, got {}",
                config.grid_points
            ),
        ));
    }
    if config.tolerance <= 0.0 || config.tolerance.is_nan() {
        return Err(parse_err(
            last_line,
            "tolerance must be positive".to_string(),
        ));
    }
    if config.packet_width_momenta <= 0.0 || config.packet_width_momenta.is_nan() {
        return Err(parse_err(
            last_line,
            "packet_width_momenta must be positive".to_string(),
        ));
    }
    if let RepSource::File(path) = &config.rep_source {
        if !path.exists() {
            return Err(parse_err(
                last_line,
                format!("representation file `{}` does not exist", path.display()),
            ));
        }
    }
    if !config.epsilons.is_empty() && !config.epsilons.windows(2).all(|w| w[1] < w[0]) {
        return Err(parse_err(
            last_line,
            "epsilons list must be strictly decreasing".to_string(),
        ));
    }
    Ok(())
}
