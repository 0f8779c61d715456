//! Run configuration: command-line flags over a TOML file over defaults.

use std::path::{Path, PathBuf};

use bkvg_core::Family;
use num_complex::Complex64;
use serde::Deserialize;

use crate::error::CliError;
use crate::report::Json;

pub const DEFAULT_GAMMA: f64 = 2.0;
pub const DEFAULT_MESH: usize = 2000;
pub const DEFAULT_THETA_STEPS: usize = 256;
pub const GRADING_RATIO: f64 = 0.85;

/// Keys accepted in the TOML file; all optional.
#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub family: Option<String>,
    pub gamma: Option<f64>,
    pub d_re: Option<f64>,
    pub d_im: Option<f64>,
    pub d1: Option<String>,
    pub d2: Option<String>,
    pub mesh: Option<usize>,
    pub theta_steps: Option<usize>,
    pub level: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::ConfigRead {
            path: path.to_path_buf(),
            source,
        })?;
        toml::from_str(&text).map_err(|e| CliError::ConfigParse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }
}

/// Values supplied on the command line.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FlagConfig {
    pub family: Option<Family>,
    pub gamma: Option<f64>,
    pub d_re: Option<f64>,
    pub d_im: Option<f64>,
    pub d1: Option<String>,
    pub d2: Option<String>,
    pub mesh: Option<usize>,
    pub theta_steps: Option<usize>,
    pub level: Option<String>,
}

/// An extension on the command line: a rank-one parameter `d` or the
/// Friedrichs extension.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtensionArg {
    RankOne(Complex64),
    Friedrichs,
}

impl ExtensionArg {
    /// Parses `"re,im"` or `"F"`.
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("f") {
            return Ok(Self::Friedrichs);
        }
        let bad = || CliError::Input(format!("extension '{s}' is neither \"F\" nor \"re,im\""));
        let (re, im) = t.split_once(',').ok_or_else(bad)?;
        let re: f64 = re.trim().parse().map_err(|_| bad())?;
        let im: f64 = im.trim().parse().map_err(|_| bad())?;
        if !re.is_finite() || !im.is_finite() {
            return Err(bad());
        }
        Ok(Self::RankOne(Complex64::new(re, im)))
    }

    pub fn to_json(self) -> Json {
        match self {
            Self::Friedrichs => Json::str("F"),
            Self::RankOne(d) => Json::complex(d),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub family: Family,
    pub gamma: f64,
    pub d: Complex64,
    pub d1: ExtensionArg,
    pub d2: ExtensionArg,
    pub mesh: usize,
    pub theta_steps: usize,
    pub level: String,
    pub source: Option<PathBuf>,
}

pub fn parse_family(s: &str) -> Result<Family, CliError> {
    match s.trim() {
        "A" | "a" => Ok(Family::HardyImaginary),
        "C" | "c" => Ok(Family::HardyReal),
        other => Err(CliError::Input(format!("unknown family '{other}' (expected A or C)"))),
    }
}

impl Config {
    pub fn resolve(flags: FlagConfig, file: Option<(PathBuf, FileConfig)>) -> Result<Self, CliError> {
        let (source, file) = match file {
            Some((p, f)) => (Some(p), f),
            None => (None, FileConfig::default()),
        };
        let family = match (flags.family, file.family) {
            (Some(f), _) => f,
            (None, Some(s)) => parse_family(&s)?,
            (None, None) => Family::HardyImaginary,
        };
        let d = Complex64::new(
            flags.d_re.or(file.d_re).unwrap_or(0.0),
            flags.d_im.or(file.d_im).unwrap_or(0.0),
        );
        let d1 = match flags.d1.or(file.d1) {
            Some(s) => ExtensionArg::parse(&s)?,
            None => ExtensionArg::RankOne(d),
        };
        let d2 = match flags.d2.or(file.d2) {
            Some(s) => ExtensionArg::parse(&s)?,
            None => ExtensionArg::Friedrichs,
        };
        let level = flags.level.or(file.level).unwrap_or_else(|| "full".into());
        if level != "quick" && level != "full" {
            return Err(CliError::Input(format!("unknown level '{level}' (expected quick or full)")));
        }
        Ok(Self {
            family,
            gamma: flags.gamma.or(file.gamma).unwrap_or(DEFAULT_GAMMA),
            d,
            d1,
            d2,
            mesh: flags.mesh.or(file.mesh).unwrap_or(DEFAULT_MESH),
            theta_steps: flags.theta_steps.or(file.theta_steps).unwrap_or(DEFAULT_THETA_STEPS),
            level,
            source,
        })
    }

    fn source_json(&self) -> Json {
        self.source
            .as_ref()
            .map_or(Json::Null, |p| Json::str(p.display().to_string()))
    }

    fn base(&self) -> crate::report::ObjectBuilder {
        Json::object()
            .field("family", self.family.letter())
            .field("gamma", self.gamma)
    }

    /// The inputs that determine the output of `command`.
    pub fn echo(&self, command: &str) -> Json {
        let b = match command {
            "analyze" => self.base().field("mesh", self.mesh),
            "check" => self
                .base()
                .field("d", Json::complex(self.d))
                .field("mesh", self.mesh),
            "compare" => self
                .base()
                .field("d1", self.d1.to_json())
                .field("d2", self.d2.to_json()),
            "numrange" => self
                .base()
                .field("mesh", self.mesh)
                .field("grading_ratio", GRADING_RATIO)
                .field("theta_steps", self.theta_steps),
            "verify" => Json::object().field("level", self.level.as_str()),
            _ => Json::object(),
        };
        b.field("config_file", self.source_json()).build()
    }
}
