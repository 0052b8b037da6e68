//! Output artifacts: CSV traces, JSON spectra and retrievals, and the run
//! manifest. Data files are deterministic (17 significant digits, no
//! timestamps); only the manifest carries wall-clock timings, and it is
//! written atomically as the final act of a run.

use crate::config::RunConfig;
use crate::error::CliError;
use revival_core::inversion::{InversionTrace, TimeGrid};
use revival_core::packets::Spectrum;
use revival_core::retrieval::RetrievalResult;
use revival_core::C64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

/// Output directory handle that remembers every file it wrote, so the
/// manifest can list them.
pub struct OutDir {
    root: PathBuf,
    files: Vec<String>,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root).map_err(|e| {
            CliError::config(format!("cannot create output dir {}: {e}", root.display()))
        })?;
        Ok(OutDir {
            root: root.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }

    fn put(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        fs::write(self.path(name), contents)
            .map_err(|e| CliError::config(format!("cannot write {name}: {e}")))?;
        self.files.push(name.to_string());
        Ok(())
    }

    /// Real-valued trace as `t,w` rows.
    pub fn write_real_csv(
        &mut self,
        name: &str,
        times: impl Iterator<Item = f64>,
        values: &[f64],
    ) -> Result<(), CliError> {
        let mut s = String::from("t,w\n");
        for (t, v) in times.zip(values) {
            let _ = writeln!(s, "{t:.16e},{v:.16e}");
        }
        self.put(name, &s)
    }

    /// Complex-valued trace as `t,re,im` rows.
    pub fn write_complex_csv(
        &mut self,
        name: &str,
        times: impl Iterator<Item = f64>,
        values: &[C64],
    ) -> Result<(), CliError> {
        let mut s = String::from("t,re,im\n");
        for (t, v) in times.zip(values) {
            let _ = writeln!(s, "{t:.16e},{:.16e},{:.16e}", v.re, v.im);
        }
        self.put(name, &s)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| CliError::config(format!("cannot serialize {name}: {e}")))?;
        text.push('\n');
        self.put(name, &text)
    }

    /// Write the manifest atomically (temp file, then rename) so a crash
    /// never leaves a half-written manifest next to complete data files.
    pub fn write_manifest(&self, manifest: &Manifest) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(manifest)
            .map_err(|e| CliError::config(format!("cannot serialize manifest: {e}")))?;
        text.push('\n');
        let tmp = self.path("manifest.json.tmp");
        fs::write(&tmp, &text)
            .map_err(|e| CliError::config(format!("cannot write manifest: {e}")))?;
        fs::rename(&tmp, self.path("manifest.json"))
            .map_err(|e| CliError::config(format!("cannot finalize manifest: {e}")))?;
        Ok(())
    }
}

/// Read a `t,w` CSV back into a trace. The time column must be a uniform
/// lattice; the grid is rebuilt from the first two entries.
pub fn read_real_csv(path: &Path) -> Result<InversionTrace, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            continue; // header
        }
        if line.trim().is_empty() {
            continue;
        }
        let mut cols = line.split(',');
        let (t, v) = match (cols.next(), cols.next()) {
            (Some(t), Some(v)) => (t, v),
            _ => {
                return Err(CliError::config(format!(
                    "{}: line {} has fewer than two columns",
                    path.display(),
                    i + 1
                )))
            }
        };
        let parse = |s: &str| -> Result<f64, CliError> {
            s.trim().parse::<f64>().map_err(|_| {
                CliError::config(format!(
                    "{}: line {} has a malformed number `{s}`",
                    path.display(),
                    i + 1
                ))
            })
        };
        times.push(parse(t)?);
        values.push(parse(v)?);
    }
    if times.len() < 2 {
        return Err(CliError::config(format!(
            "{}: need at least two samples",
            path.display()
        )));
    }
    let dt = times[1] - times[0];
    let grid = TimeGrid::new(times[0], dt, times.len())
        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    for (j, &t) in times.iter().enumerate() {
        if (t - grid.t(j)).abs() > 1e-9 * dt.abs().max(1.0) {
            return Err(CliError::config(format!(
                "{}: time column is not a uniform lattice near row {}",
                path.display(),
                j + 2
            )));
        }
    }
    InversionTrace::from_parts(grid, values).map_err(CliError::from)
}

/// JSON form of a frequency-domain packet spectrum.
#[derive(Debug, Serialize, Deserialize)]
pub struct SpectrumFile {
    pub nu0: f64,
    pub dnu: f64,
    pub window_t: f64,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl SpectrumFile {
    pub fn from_spectrum(spec: &Spectrum) -> Self {
        SpectrumFile {
            nu0: spec.nu0(),
            dnu: spec.dnu(),
            window_t: spec.window_t(),
            re: spec.values().iter().map(|v| v.re).collect(),
            im: spec.values().iter().map(|v| v.im).collect(),
        }
    }

    pub fn to_spectrum(&self) -> Result<Spectrum, CliError> {
        if self.re.len() != self.im.len() {
            return Err(CliError::config(
                "spectrum file: re/im arrays differ in length",
            ));
        }
        let values: Vec<C64> = self
            .re
            .iter()
            .zip(&self.im)
            .map(|(&re, &im)| C64::new(re, im))
            .collect();
        Spectrum::from_parts(self.nu0, self.dnu, self.window_t, values).map_err(CliError::from)
    }
}

pub fn read_spectrum_json(path: &Path) -> Result<Spectrum, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    let file: SpectrumFile = serde_json::from_str(&text)
        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    file.to_spectrum()
}

/// JSON form of one retrieval: tone locations, raw and cleaned
/// probabilities, and the numeric health indicators.
#[derive(Debug, Serialize, Deserialize)]
pub struct RetrievalFile {
    pub n_max: usize,
    pub signal: String,
    pub nu: Vec<f64>,
    pub probs_raw: Vec<f64>,
    pub probs_clean: Vec<f64>,
    pub residual_negativity: f64,
    pub max_imag_fraction: f64,
    pub raw_sum: f64,
}

impl RetrievalFile {
    pub fn from_result(result: &RetrievalResult, signal: &str) -> Self {
        RetrievalFile {
            n_max: result.probs_raw().len() - 1,
            signal: signal.to_string(),
            nu: result.nu_samples().to_vec(),
            probs_raw: result.probs_raw().to_vec(),
            probs_clean: result.probs_clean().probs().to_vec(),
            residual_negativity: result.residual_negativity(),
            max_imag_fraction: result.diagnostics().max_imag_fraction,
            raw_sum: result.diagnostics().raw_sum,
        }
    }
}

/// Overlap-mode output: the solved base-packet spectrum plus the naive and
/// corrected retrievals and the solver's health numbers.
#[derive(Debug, Serialize, Deserialize)]
pub struct OverlapFile {
    pub window_t: f64,
    pub band: f64,
    pub pad: usize,
    pub pairs: u8,
    pub ridge: f64,
    pub condition_estimate: f64,
    pub relative_residual: f64,
    pub hermitian_defect: f64,
    pub naive: RetrievalFile,
    pub corrected: RetrievalFile,
    pub w0: SpectrumFile,
}

/// Run manifest: what ran, with what resolved configuration, what it
/// wrote, and how long each stage took. Diagnostics are keyed strings so
/// every command can contribute its own numbers.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    pub cli_version: String,
    pub core_version: String,
    pub resolved: RunConfig,
    /// True when the packet window half-width was auto-detected rather
    /// than configured; the chosen value sits in `resolved.window`.
    pub window_auto: bool,
    pub outputs: Vec<String>,
    pub diagnostics: BTreeMap<String, serde_json::Value>,
    pub timings_ms: BTreeMap<String, f64>,
}

impl Manifest {
    pub fn new(command: &str, resolved: RunConfig) -> Self {
        Manifest {
            command: command.to_string(),
            cli_version: env!("CARGO_PKG_VERSION").to_string(),
            core_version: revival_core::VERSION.to_string(),
            resolved,
            window_auto: false,
            outputs: Vec::new(),
            diagnostics: BTreeMap::new(),
            timings_ms: BTreeMap::new(),
        }
    }

    pub fn diag(&mut self, key: &str, value: impl Into<serde_json::Value>) {
        self.diagnostics.insert(key.to_string(), value.into());
    }
}
