//! TOML run configuration. Every table rejects unknown keys.

use anyhow::{bail, Context, Result};
use poisson_laguerre::densities::DensityKind;
use poisson_laguerre::estimators::SuiteConfig;
use serde::Deserialize;
use std::path::{Path, PathBuf};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub sample: Option<SampleSection>,
    pub tessellate: Option<TessellateSection>,
    pub certify: Option<CertifySection>,
    pub experiment: Option<ExperimentSection>,
    pub render: Option<RenderSection>,
    /// Directory of the config file; relative input paths resolve against it.
    #[serde(skip)]
    pub base: PathBuf,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSection {
    pub density: DensityKind,
    /// `[x0, y0, x1, y1]`.
    pub window: [f64; 4],
    /// Height interval; `-inf` and `inf` are allowed where the mass is finite.
    pub heights: [f64; 2],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TessellateSection {
    pub points: PathBuf,
    /// Clipping frame; defaults to the points' bounding box enlarged by 20%.
    pub frame: Option<[f64; 4]>,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum CertifyKind {
    Dual,
    Laguerre,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifySection {
    pub points: PathBuf,
    pub mode: CertifyKind,
    #[serde(rename = "R")]
    pub big_r: f64,
    pub r: f64,
    #[serde(default)]
    pub t: f64,
}

#[derive(Debug)]
pub struct ExperimentSection {
    pub scenario: String,
    pub suite: SuiteConfig,
}

impl<'de> Deserialize<'de> for ExperimentSection {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let mut table = toml::Table::deserialize(de)?;
        let scenario = match table.remove("scenario") {
            Some(toml::Value::String(s)) => s,
            Some(_) => return Err(D::Error::custom("`scenario` must be a string")),
            None => return Err(D::Error::missing_field("scenario")),
        };
        if table.contains_key("seed") {
            return Err(D::Error::custom("`seed` belongs at the top level of the config"));
        }
        let suite = SuiteConfig::deserialize(toml::Value::Table(table)).map_err(D::Error::custom)?;
        Ok(ExperimentSection { scenario, suite })
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RenderSection {
    pub complex: PathBuf,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg: RunConfig = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        cfg.base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }

    pub fn section<'a, T>(s: &'a Option<T>, name: &str) -> Result<&'a T> {
        match s {
            Some(x) => Ok(x),
            None => bail!("config has no [{name}] table"),
        }
    }
}
