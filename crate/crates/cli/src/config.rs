//! Run configuration: a TOML file plus command-line overrides, resolved
//! into concrete simulation objects. Every auto-chosen value (grid span,
//! window half-width, padding, band) is written back into the config echo
//! so the manifest records exactly what ran.

use crate::error::CliError;
use revival_core::inversion::{FrequencyMap, TimeGrid};
use revival_core::{CatMode, CatParams, PhotonDistribution};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::PathBuf;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub state: StateConfig,
    pub fmap: MapConfig,
    pub grid: GridConfig,
    pub window: WindowConfig,
    pub simulate: SimulateConfig,
    pub decompose: DecomposeConfig,
    pub retrieve: RetrieveConfig,
    pub overlap: OverlapConfig,
    pub output: OutputConfig,
    /// Reserved: the pipeline is fully deterministic today.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            state: StateConfig::default(),
            fmap: MapConfig::default(),
            grid: GridConfig::default(),
            window: WindowConfig::default(),
            simulate: SimulateConfig::default(),
            decompose: DecomposeConfig::default(),
            retrieve: RetrieveConfig::default(),
            overlap: OverlapConfig::default(),
            output: OutputConfig::default(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StateConfig {
    /// One of `coherent`, `fock`, `thermal`, `cat`.
    pub kind: String,
    /// Mean photon number for `coherent` and `thermal`.
    pub nbar: f64,
    /// Photon number for `fock`.
    pub n: usize,
    /// Mean photon number `|alpha|^2` for `cat`.
    pub alpha_sq: f64,
    /// Relative phase of the two components for `cat` (radians).
    pub phi: f64,
    /// `exact` or `large-alpha` interference treatment for `cat`.
    pub cat_mode: String,
    /// Optional truncation; default lets the state pick its own tail.
    pub n_max: Option<usize>,
}

impl Default for StateConfig {
    fn default() -> Self {
        StateConfig {
            kind: "coherent".into(),
            nbar: 20.0,
            n: 0,
            alpha_sq: 20.0,
            phi: PI,
            cat_mode: "exact".into(),
            n_max: None,
        }
    }
}

impl StateConfig {
    pub fn build(&self) -> Result<PhotonDistribution, CliError> {
        let dist = match self.kind.as_str() {
            "coherent" => PhotonDistribution::coherent(self.nbar, self.n_max),
            "thermal" => PhotonDistribution::thermal(self.nbar, self.n_max),
            "fock" => Ok(PhotonDistribution::fock(self.n)),
            "cat" => {
                let mode = match self.cat_mode.as_str() {
                    "exact" => CatMode::Exact,
                    "large-alpha" => CatMode::LargeAlpha,
                    other => {
                        return Err(CliError::config(format!(
                            "state.cat_mode must be `exact` or `large-alpha`, got `{other}`"
                        )))
                    }
                };
                PhotonDistribution::cat(
                    CatParams {
                        alpha: self.alpha_sq.sqrt(),
                        phi: self.phi,
                        mode,
                    },
                    self.n_max,
                )
            }
            other => {
                return Err(CliError::config(format!(
                    "state.kind must be one of coherent, fock, thermal, cat; got `{other}`"
                )))
            }
        };
        dist.map_err(|e| CliError::config(format!("state: {e}")))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MapConfig {
    /// `jcm` (square-root frequency ladder) or `linear`.
    pub kind: String,
    pub g: f64,
}

impl Default for MapConfig {
    fn default() -> Self {
        MapConfig {
            kind: "jcm".into(),
            g: 1.0,
        }
    }
}

impl MapConfig {
    pub fn build(&self) -> Result<FrequencyMap, CliError> {
        let fmap = match self.kind.as_str() {
            "jcm" => FrequencyMap::jcm(self.g),
            "linear" => FrequencyMap::linear(self.g),
            other => {
                return Err(CliError::config(format!(
                    "fmap.kind must be `jcm` or `linear`, got `{other}`"
                )))
            }
        };
        fmap.map_err(|e| CliError::config(format!("fmap: {e}")))
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    /// Sample spacing; default `0.05 / g`.
    pub dt: Option<f64>,
    /// Trace end time; default spans 4.8 revival periods of the state's
    /// mean photon number.
    pub t_end: Option<f64>,
}

impl GridConfig {
    /// Fill the defaults in place and build the grid, so the echoed
    /// config carries the resolved numbers.
    pub fn resolve(&mut self, mean_n: f64, g: f64) -> Result<TimeGrid, CliError> {
        let dt = *self.dt.get_or_insert(0.05 / g);
        let t_end = *self
            .t_end
            .get_or_insert_with(|| 4.8 * 2.0 * PI * (mean_n + 1.0).sqrt() / g);
        TimeGrid::from_zero(dt, t_end).map_err(|e| CliError::config(format!("grid: {e}")))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WindowConfig {
    /// Packet-isolation half-width; auto-detected from the dominant
    /// spectral tone when absent, and always echoed once chosen.
    pub half_width: Option<f64>,
    /// Zero-padding factor for windowed spectra.
    pub pad: usize,
}

impl Default for WindowConfig {
    fn default() -> Self {
        WindowConfig {
            half_width: None,
            pad: 8,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    /// Also write the complex trace next to the real inversion.
    pub emit_complex: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecomposeConfig {
    pub m_lo: i64,
    pub m_hi: i64,
    /// Read the trace from a previous `simulate` run instead of
    /// simulating inline.
    pub trace: Option<PathBuf>,
}

impl Default for DecomposeConfig {
    fn default() -> Self {
        DecomposeConfig {
            m_lo: 0,
            m_hi: 4,
            trace: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RetrieveConfig {
    /// Highest photon number retrieved; default covers the configured
    /// state's support.
    pub n_max: Option<usize>,
    /// Re-simulate from the retrieved distribution and report the
    /// round-trip mismatch (inline pipelines only).
    pub validate: bool,
    /// Read the packet spectrum from a previous `decompose` run instead
    /// of computing it inline.
    pub spectrum: Option<PathBuf>,
}

impl Default for RetrieveConfig {
    fn default() -> Self {
        RetrieveConfig {
            n_max: None,
            validate: true,
            spectrum: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OverlapConfig {
    /// Frequency band half-width for the integral-equation solve;
    /// defaults to the data-driven band of the observed spectrum.
    pub band: Option<f64>,
    /// Zero-padding for the solver grid; defaults to the chirp-sampling
    /// recommendation for the band in use.
    pub pad: Option<usize>,
    /// Ridge added to the diagonal; 0 solves the plain system.
    pub ridge: f64,
    /// Number of neighbor-packet pairs in the kernel (1 or 2).
    pub pairs: u8,
}

impl Default for OverlapConfig {
    fn default() -> Self {
        OverlapConfig {
            band: None,
            pad: None,
            ridge: 0.0,
            pairs: 1,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: "out".into() }
    }
}

/// Command-line overrides, applied after the file is read.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub nbar: Option<f64>,
    pub g: Option<f64>,
    pub window: Option<f64>,
    pub m_range: Option<(i64, i64)>,
    pub pad: Option<usize>,
    pub band: Option<f64>,
    pub ridge: Option<f64>,
}

/// Parse `A..B` (inclusive on both ends) for `--m-range`.
pub fn parse_m_range(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected `LO..HI`, got `{s}`"))?;
    let lo: i64 = a.trim().parse().map_err(|_| format!("bad integer `{a}`"))?;
    let hi: i64 = b.trim().parse().map_err(|_| format!("bad integer `{b}`"))?;
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok((lo, hi))
}

impl RunConfig {
    pub fn load(path: Option<&PathBuf>) -> Result<Self, CliError> {
        match path {
            None => Ok(RunConfig::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| {
                    CliError::config(format!("cannot read config {}: {e}", p.display()))
                })?;
                toml::from_str(&text)
                    .map_err(|e| CliError::config(format!("{}: {e}", p.display())))
            }
        }
    }

    pub fn apply(&mut self, ov: &Overrides) -> Result<(), CliError> {
        if let Some(dir) = &ov.out {
            self.output.dir = dir.clone();
        }
        if let Some(nbar) = ov.nbar {
            match self.state.kind.as_str() {
                "coherent" | "thermal" => self.state.nbar = nbar,
                "cat" => self.state.alpha_sq = nbar,
                other => {
                    return Err(CliError::config(format!(
                        "--nbar does not apply to a `{other}` state; edit the config file"
                    )))
                }
            }
        }
        if let Some(g) = ov.g {
            self.fmap.g = g;
        }
        if let Some(w) = ov.window {
            self.window.half_width = Some(w);
        }
        if let Some((lo, hi)) = ov.m_range {
            self.decompose.m_lo = lo;
            self.decompose.m_hi = hi;
        }
        if let Some(pad) = ov.pad {
            self.window.pad = pad;
            self.overlap.pad = Some(pad);
        }
        if let Some(band) = ov.band {
            self.overlap.band = Some(band);
        }
        if let Some(ridge) = ov.ridge {
            self.overlap.ridge = ridge;
        }
        Ok(())
    }
}
