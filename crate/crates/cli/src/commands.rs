//! The five command implementations: simulate, decompose, retrieve,
//! retrieve-overlap, and state. Each file-producing command finishes by
//! writing a manifest listing the resolved configuration, outputs,
//! diagnostics, and stage timings.

use crate::artifacts::{
    read_real_csv, read_spectrum_json, Manifest, OutDir, OverlapFile, RetrievalFile, SpectrumFile,
};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::logger;
use revival_core::inversion::{complex_trace, inversion_trace, FrequencyMap, InversionTrace};
use revival_core::overlap::{
    build_fredholm_system, default_band_limit, recommended_zero_pad, solve_w0, windowed_spectrum,
    MBand, SolverOptions,
};
use revival_core::packets::{
    dominant_photon_number, extract_packet_zero, packet_center_time, packet_time_domain,
    propagate_packet, spectrum_of_real, sum_packets, Spectrum,
};
use revival_core::retrieval::{
    default_n_max, retrieve_distribution, validate_retrieval, SpectrumSignal,
};
use std::collections::BTreeMap;
use std::time::Instant;

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

/// Zero-pad factor used whenever a spectrum is computed only to locate the
/// dominant tone (window auto-detection, retrieval sizing).
const PROBE_PAD: usize = 8;

/// Width, in standard deviations of a Poisson-like peak, kept above the
/// dominant photon number when sizing a retrieval automatically.
const RETRIEVE_WIDTH_SIGMAS: f64 = 8.0;

/// Resolve the packet-isolation window. A configured half-width is used
/// verbatim (it must sit on the trace's sample lattice); otherwise the
/// dominant tone fixes the mean photon number and the half revival period
/// `pi sqrt(n_tilde + 1) / g` is snapped to the lattice. Returns the
/// half-width, the detected photon number, and whether it was auto-chosen.
fn resolve_window(
    cfg: &mut RunConfig,
    trace: &InversionTrace,
    g: f64,
) -> Result<(f64, f64, bool), CliError> {
    let spec = spectrum_of_real(trace, PROBE_PAD)?;
    let n_tilde = dominant_photon_number(&spec, g)?;
    match cfg.window.half_width {
        Some(half) => Ok((half, n_tilde, false)),
        None => {
            let dt = trace.grid().dt();
            let ideal = 0.5 * packet_center_time(1, n_tilde, g)?;
            let mut half = (ideal / dt).round().max(1.0) * dt;
            if half > trace.grid().t_end() {
                half = trace.grid().t_end();
            }
            cfg.window.half_width = Some(half);
            logger::info(&format!(
                "auto window: dominant photon number {n_tilde:.3}, half-width {half:.6}"
            ));
            Ok((half, n_tilde, true))
        }
    }
}

/// Default retrieval size: cover the dominant photon number plus a
/// generous multiple of the peak's Poisson width, capped by the highest
/// tone the spectrum's band can support.
fn auto_n_max(spec: &Spectrum, fmap: &FrequencyMap) -> Result<usize, CliError> {
    let n_tilde = dominant_photon_number(spec, fmap.g())?;
    let target = (n_tilde + RETRIEVE_WIDTH_SIGMAS * (n_tilde + 1.0).sqrt()).ceil() as usize;
    let cap = default_n_max(spec, fmap)?;
    Ok(target.min(cap))
}

fn retrieval_diags(manifest: &mut Manifest, prefix: &str, file: &RetrievalFile) {
    manifest.diag(&format!("{prefix}residual_negativity"), file.residual_negativity);
    manifest.diag(&format!("{prefix}raw_sum"), file.raw_sum);
    manifest.diag(&format!("{prefix}max_imag_fraction"), file.max_imag_fraction);
}

pub fn cmd_simulate(cfg: &mut RunConfig) -> Result<(), CliError> {
    let t_total = Instant::now();
    let dist = cfg.state.build()?;
    let fmap = cfg.fmap.build()?;
    let grid = cfg.grid.resolve(dist.mean(), fmap.g())?;
    let mut out = OutDir::create(&cfg.output.dir)?;
    let mut timings = BTreeMap::new();

    let t0 = Instant::now();
    let trace = inversion_trace(&dist, &fmap, &grid);
    timings.insert("simulate".to_string(), ms(t0));

    let t0 = Instant::now();
    out.write_real_csv("trace.csv", grid.times(), trace.values())?;
    if cfg.simulate.emit_complex {
        let z = complex_trace(&dist, &fmap, &grid);
        out.write_complex_csv("trace_complex.csv", grid.times(), z.values())?;
    }
    timings.insert("io".to_string(), ms(t0));
    timings.insert("total".to_string(), ms(t_total));

    let mut manifest = Manifest::new("simulate", cfg.clone());
    manifest.diag("state_mean", dist.mean());
    manifest.diag("state_n_max", dist.n_max() as u64);
    manifest.diag("grid_count", grid.count() as u64);
    if let Some(period) = fmap.exact_period() {
        manifest.diag("map_exact_period", period);
    }
    manifest.outputs = out.files().to_vec();
    manifest.timings_ms = timings;
    out.write_manifest(&manifest)
}

pub fn cmd_decompose(cfg: &mut RunConfig) -> Result<(), CliError> {
    let t_total = Instant::now();
    let fmap = cfg.fmap.build()?;
    let g = fmap.g();
    let mut out = OutDir::create(&cfg.output.dir)?;
    let mut timings = BTreeMap::new();

    let t0 = Instant::now();
    let trace = match cfg.decompose.trace.clone() {
        Some(path) => {
            let trace = read_real_csv(&path)?;
            // The file's grid is authoritative; echo it.
            cfg.grid.dt = Some(trace.grid().dt());
            cfg.grid.t_end = Some(trace.grid().t_end());
            trace
        }
        None => {
            let dist = cfg.state.build()?;
            let grid = cfg.grid.resolve(dist.mean(), g)?;
            inversion_trace(&dist, &fmap, &grid)
        }
    };
    timings.insert("simulate".to_string(), ms(t0));
    let grid = *trace.grid();

    let t0 = Instant::now();
    let (half, n_tilde, window_auto) = resolve_window(cfg, &trace, g)?;
    let base = extract_packet_zero(&trace, half, cfg.window.pad)?;
    timings.insert("window".to_string(), ms(t0));

    let (m_lo, m_hi) = (cfg.decompose.m_lo, cfg.decompose.m_hi);
    let wrap_period = 1.0 / base.dnu();
    let farthest = m_lo.unsigned_abs().max(m_hi.unsigned_abs()) as i64;
    if packet_center_time(farthest, n_tilde, g)? + 2.0 * half > wrap_period {
        logger::warn(&format!(
            "packet {farthest} reaches the synthesis wrap-around at {wrap_period:.1}; \
             increase window.pad to push it out"
        ));
    }

    let t0 = Instant::now();
    let mut packets = Vec::new();
    for m in m_lo..=m_hi {
        let packet = packet_time_domain(&propagate_packet(&base, m, g)?, &grid)?;
        packets.push((m, packet));
    }
    let sum = sum_packets(&base, m_lo, m_hi, &grid, g)?;
    timings.insert("decompose".to_string(), ms(t0));

    // Reconstruction gap, over the whole grid and over the head span the
    // requested packets fully represent. The head ends half a revival
    // period before the last included center: the next packet's dispersive
    // leading tail reaches back roughly that far, so beyond the midpoint
    // the gap measures the missing packet, not reconstruction quality.
    let period = packet_center_time(1, n_tilde, g)?;
    let head_end = ((m_hi as f64 - 0.5) * period).max(half).min(grid.t_end());
    let mut gap_head: f64 = 0.0;
    let mut gap_full: f64 = 0.0;
    for ((t, a), b) in grid.times().zip(sum.values()).zip(trace.values()) {
        let d = (a - b).abs();
        gap_full = gap_full.max(d);
        if t <= head_end {
            gap_head = gap_head.max(d);
        }
    }

    let t0 = Instant::now();
    out.write_real_csv("trace.csv", grid.times(), trace.values())?;
    out.write_json("spectrum0.json", &SpectrumFile::from_spectrum(&base))?;
    for (m, packet) in &packets {
        out.write_complex_csv(&format!("packet_{m}.csv"), grid.times(), packet.values())?;
    }
    out.write_real_csv("packet_sum.csv", grid.times(), sum.values())?;
    timings.insert("io".to_string(), ms(t0));
    timings.insert("total".to_string(), ms(t_total));

    let mut manifest = Manifest::new("decompose", cfg.clone());
    manifest.window_auto = window_auto;
    manifest.diag("dominant_photon_number", n_tilde);
    manifest.diag("window_half_width", half);
    manifest.diag("spectrum_len", base.len() as u64);
    manifest.diag("sum_gap_linf_head", gap_head);
    manifest.diag("sum_gap_linf_full", gap_full);
    manifest.diag("head_end", head_end);
    manifest.outputs = out.files().to_vec();
    manifest.timings_ms = timings;
    out.write_manifest(&manifest)
}

pub fn cmd_retrieve(cfg: &mut RunConfig) -> Result<(), CliError> {
    let t_total = Instant::now();
    let fmap = cfg.fmap.build()?;
    let g = fmap.g();
    let mut out = OutDir::create(&cfg.output.dir)?;
    let mut timings = BTreeMap::new();

    let t0 = Instant::now();
    let mut window_auto = false;
    let mut n_tilde_diag = None;
    let (base, trace) = match cfg.retrieve.spectrum.clone() {
        Some(path) => (read_spectrum_json(&path)?, None),
        None => {
            let dist = cfg.state.build()?;
            let grid = cfg.grid.resolve(dist.mean(), g)?;
            let trace = inversion_trace(&dist, &fmap, &grid);
            let (half, n_tilde, auto) = resolve_window(cfg, &trace, g)?;
            window_auto = auto;
            n_tilde_diag = Some(n_tilde);
            let base = extract_packet_zero(&trace, half, cfg.window.pad)?;
            (base, Some(trace))
        }
    };
    timings.insert("window".to_string(), ms(t0));

    let t0 = Instant::now();
    let n_max = match cfg.retrieve.n_max {
        Some(n) => n,
        None => auto_n_max(&base, &fmap)?,
    };
    cfg.retrieve.n_max = Some(n_max);
    let result = retrieve_distribution(&base, &fmap, n_max, SpectrumSignal::Inversion)?;
    timings.insert("retrieve".to_string(), ms(t0));

    let file = RetrievalFile::from_result(&result, "inversion");
    let mut manifest = Manifest::new("retrieve", cfg.clone());
    manifest.window_auto = window_auto;
    if let Some(n_tilde) = n_tilde_diag {
        manifest.diag("dominant_photon_number", n_tilde);
    }
    retrieval_diags(&mut manifest, "", &file);
    manifest.diag("clean", result.diagnostics().clean);

    match (&trace, cfg.retrieve.validate) {
        (Some(trace), true) => {
            let t0 = Instant::now();
            let report = validate_retrieval(&result, trace, &fmap);
            timings.insert("validate".to_string(), ms(t0));
            manifest.diag("validation_linf", report.linf);
            manifest.diag("validation_rms", report.rms);
        }
        (Some(_), false) => {
            manifest.diag("validation", "disabled");
        }
        (None, _) => {
            manifest.diag("validation", "skipped: staged spectrum input has no trace");
        }
    }

    let t0 = Instant::now();
    out.write_json("retrieval.json", &file)?;
    timings.insert("io".to_string(), ms(t0));
    timings.insert("total".to_string(), ms(t_total));
    manifest.outputs = out.files().to_vec();
    manifest.timings_ms = timings;
    out.write_manifest(&manifest)
}

pub fn cmd_retrieve_overlap(cfg: &mut RunConfig) -> Result<(), CliError> {
    let t_total = Instant::now();
    let dist = cfg.state.build()?;
    let fmap = cfg.fmap.build()?;
    let g = fmap.g();
    let grid = cfg.grid.resolve(dist.mean(), g)?;
    let mut out = OutDir::create(&cfg.output.dir)?;
    let mut timings = BTreeMap::new();

    let m_band = match cfg.overlap.pairs {
        1 => MBand::One,
        2 => MBand::Two,
        p => {
            return Err(CliError::config(format!(
                "overlap.pairs must be 1 or 2, got {p}"
            )))
        }
    };

    let t0 = Instant::now();
    let trace = inversion_trace(&dist, &fmap, &grid);
    timings.insert("simulate".to_string(), ms(t0));

    // The whole short trace is the window unless one was given.
    let t_win = cfg.window.half_width.unwrap_or(grid.t_end());
    let window_auto = cfg.window.half_width.is_none();
    cfg.window.half_width = Some(t_win);

    let t0 = Instant::now();
    let band = match cfg.overlap.band {
        Some(b) => b,
        None => {
            let probe = windowed_spectrum(&trace, t_win, PROBE_PAD)?;
            let b = default_band_limit(&probe);
            logger::info(&format!("auto band limit {b:.4}"));
            b
        }
    };
    cfg.overlap.band = Some(band);
    let pad = match cfg.overlap.pad {
        Some(p) => p,
        None => recommended_zero_pad(g, t_win, band, m_band)?,
    };
    cfg.overlap.pad = Some(pad);
    let observed = windowed_spectrum(&trace, t_win, pad)?;
    timings.insert("window".to_string(), ms(t0));

    let t0 = Instant::now();
    let system = build_fredholm_system(&observed, g, m_band, Some(band))?;
    let opts = SolverOptions {
        regularization: cfg.overlap.ridge,
        ..SolverOptions::default()
    };
    let (w0, solve_diag) = solve_w0(&system, &opts)?;
    timings.insert("solve".to_string(), ms(t0));

    let t0 = Instant::now();
    let n_max = match cfg.retrieve.n_max {
        Some(n) => n,
        // The corrected retrieval reads the band-limited solution, so its
        // band caps the automatic size for both retrievals.
        None => auto_n_max(&observed, &fmap)?.min(default_n_max(&w0, &fmap)?),
    };
    cfg.retrieve.n_max = Some(n_max);
    let naive = retrieve_distribution(&observed, &fmap, n_max, SpectrumSignal::Inversion)?;
    let corrected = retrieve_distribution(&w0, &fmap, n_max, SpectrumSignal::Inversion)?;
    timings.insert("retrieve".to_string(), ms(t0));

    let file = OverlapFile {
        window_t: t_win,
        band,
        pad,
        pairs: cfg.overlap.pairs,
        ridge: cfg.overlap.ridge,
        condition_estimate: solve_diag.condition_estimate,
        relative_residual: solve_diag.relative_residual,
        hermitian_defect: solve_diag.hermitian_defect,
        naive: RetrievalFile::from_result(&naive, "inversion"),
        corrected: RetrievalFile::from_result(&corrected, "inversion"),
        w0: SpectrumFile::from_spectrum(&w0),
    };

    let t0 = Instant::now();
    out.write_json("overlap.json", &file)?;
    timings.insert("io".to_string(), ms(t0));
    timings.insert("total".to_string(), ms(t_total));

    let mut manifest = Manifest::new("retrieve-overlap", cfg.clone());
    manifest.window_auto = window_auto;
    manifest.diag("system_dim", system.len() as u64);
    manifest.diag("condition_estimate", solve_diag.condition_estimate);
    manifest.diag("relative_residual", solve_diag.relative_residual);
    manifest.diag("hermitian_defect", solve_diag.hermitian_defect);
    retrieval_diags(&mut manifest, "naive_", &file.naive);
    retrieval_diags(&mut manifest, "corrected_", &file.corrected);
    manifest.outputs = out.files().to_vec();
    manifest.timings_ms = timings;
    out.write_manifest(&manifest)
}

pub fn cmd_state(cfg: &RunConfig) -> Result<(), CliError> {
    let dist = cfg.state.build()?;
    let mut s = String::from("n,p\n");
    for (n, p) in dist.probs().iter().enumerate() {
        use std::fmt::Write as _;
        let _ = writeln!(s, "{n},{p:.16e}");
    }
    print!("{s}");
    Ok(())
}
