//! Dispersive-packet decomposition of the inversion signal: windowed
//! spectra, the quadratic-phase propagation law connecting packet `m` to
//! packet 0, and reconstruction of the signal as a packet sum.
//!
//! Transform conventions, fixed crate-wide: analysis uses
//! `S(nu) = int e^{-i 2 pi nu t} s(t) dt`, synthesis uses
//! `s(t) = int e^{+i 2 pi nu t} S(nu) dnu`. With these signs a signal built
//! from `e^{+i 2 pi f(n) t}` tones carries its spectral mass at positive
//! frequencies, and the packet-`m` phase `e^{-i 2 pi m (pi nu/g)^2}`
//! translates packets toward positive times.

use crate::error::{Error, Result};
use crate::inversion::{ComplexTrace, InversionTrace, TimeGrid};
use crate::C64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// Default spectral zero-padding factor: refines the frequency grid enough
/// for local interpolation at off-bin frequencies.
pub const DEFAULT_ZERO_PAD: usize = 8;

/// Uniformly sampled spectrum with the continuum normalization.
///
/// `window_t` is the effective half-width `T` of the time window that
/// produced it (half the sampled span, counting each sample as one `dt`
/// cell); the grid spacing then satisfies `dnu = 1/(2 T pad)` exactly.
#[derive(Debug, Clone)]
pub struct Spectrum {
    nu0: f64,
    dnu: f64,
    window_t: f64,
    values: Vec<C64>,
}

impl Spectrum {
    /// Assemble a spectrum from raw parts (solver outputs, synthetic test
    /// spectra). Pipeline spectra come from [`spectrum_of`] instead.
    pub fn from_parts(nu0: f64, dnu: f64, window_t: f64, values: Vec<C64>) -> Result<Self> {
        if !nu0.is_finite() || !dnu.is_finite() || dnu <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "spectrum needs finite nu0 and dnu > 0, got nu0 = {nu0}, dnu = {dnu}"
            )));
        }
        if !window_t.is_finite() || window_t <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "spectrum needs a positive window half-width, got {window_t}"
            )));
        }
        if values.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "spectrum needs at least two samples, got {}",
                values.len()
            )));
        }
        Ok(Spectrum {
            nu0,
            dnu,
            window_t,
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn nu0(&self) -> f64 {
        self.nu0
    }

    pub fn dnu(&self) -> f64 {
        self.dnu
    }

    pub fn window_t(&self) -> f64 {
        self.window_t
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn nu(&self, i: usize) -> f64 {
        self.nu0 + self.dnu * i as f64
    }

    pub fn nus(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |i| self.nu(i))
    }

    pub fn peak_magnitude(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest deviation from Hermitian symmetry `S(-nu) = conj S(nu)` over
    /// all grid points whose mirror lies on the grid.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.len();
        // Index of nu = 0 on the ascending grid, if it sits on the grid.
        let h = -self.nu0 / self.dnu;
        let h_round = h.round();
        if (h - h_round).abs() > 1e-6 || h_round < 0.0 {
            // No mirror-symmetric pairing exists on this grid.
            return f64::INFINITY;
        }
        let h = h_round as usize;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let Some(j) = (2 * h).checked_sub(i) else {
                continue;
            };
            if j >= n {
                continue;
            }
            worst = worst.max((self.values[j] - self.values[i].conj()).norm());
        }
        worst
    }

    /// Evaluate the spectrum at an arbitrary in-band frequency by 4-point
    /// barycentric interpolation on the uniform grid. The zero-padded grid
    /// is dense enough that the local cubic is accurate to well below the
    /// windowing error.
    pub fn interpolate(&self, nu: f64) -> Result<C64> {
        let n = self.len();
        if n < 4 {
            return Err(Error::InvalidArgument(format!(
                "interpolation needs at least 4 spectral samples, got {n}"
            )));
        }
        let p = (nu - self.nu0) / self.dnu;
        if !(-1e-9..=(n - 1) as f64 + 1e-9).contains(&p) {
            return Err(Error::Coverage(format!(
                "frequency {nu} lies outside the spectral band [{}, {}]",
                self.nu0,
                self.nu(n - 1)
            )));
        }
        let nearest = p.round();
        if (p - nearest).abs() < 1e-9 {
            return Ok(self.values[(nearest as usize).min(n - 1)]);
        }
        let j0 = ((p.floor() as isize) - 1).clamp(0, n as isize - 4) as usize;
        // Barycentric weights for 4 equispaced nodes: binomial with
        // alternating signs.
        const W: [f64; 4] = [1.0, -3.0, 3.0, -1.0];
        let mut num = C64::new(0.0, 0.0);
        let mut den = 0.0;
        for (offset, w) in W.iter().enumerate() {
            let node = (j0 + offset) as f64;
            let c = w / (p - node);
            num += self.values[j0 + offset] * c;
            den += c;
        }
        Ok(num / den)
    }
}

fn spectrum_from_samples(grid: &TimeGrid, samples: &[C64], pad: usize) -> Result<Spectrum> {
    if pad < 1 {
        return Err(Error::InvalidArgument(format!(
            "zero-padding factor must be at least 1, got {pad}"
        )));
    }
    let n0 = grid.count();
    let np = n0 * pad;
    let mut buf = vec![C64::new(0.0, 0.0); np];
    buf[..n0].copy_from_slice(samples);
    FftPlanner::new().plan_fft_forward(np).process(&mut buf);

    let dt = grid.dt();
    let dnu = 1.0 / (np as f64 * dt);
    let half_down = np / 2;
    let half_up = np - half_down;
    let nu0 = -(half_down as f64) * dnu;
    let t0 = grid.t(0);
    let values = (0..np)
        .map(|m| {
            let nu = nu0 + dnu * m as f64;
            let (s, c) = (-2.0 * PI * nu * t0).sin_cos();
            buf[(m + half_up) % np] * C64::new(dt * c, dt * s)
        })
        .collect();
    Spectrum::from_parts(nu0, dnu, n0 as f64 * dt / 2.0, values)
}

/// Spectrum of a complex trace: `S(nu_k) = dt sum_j e^{-i 2 pi nu_k t_j} z_j`
/// on the zero-padded frequency grid spanning the Nyquist band
/// `[-1/(2dt), 1/(2dt))`.
pub fn spectrum_of(trace: &ComplexTrace, zero_pad_factor: usize) -> Result<Spectrum> {
    spectrum_from_samples(trace.grid(), trace.values(), zero_pad_factor)
}

/// Spectrum of a real trace; see [`spectrum_of`].
pub fn spectrum_of_real(trace: &InversionTrace, zero_pad_factor: usize) -> Result<Spectrum> {
    let complex: Vec<C64> = trace.values().iter().map(|&w| C64::new(w, 0.0)).collect();
    spectrum_from_samples(trace.grid(), &complex, zero_pad_factor)
}

/// Isolate packet 0 of a measured inversion: take the trace on
/// `[0, window_half_width]`, extend it evenly to negative times, and
/// transform. The result is the windowed estimate of the packet-0 spectrum
/// of the real signal.
///
/// The window is the caller's choice; it must contain the collapse packet's
/// support (and, for states with intermediate revivals, all structure
/// belonging to packet 0). A window cutting through packet structure is the
/// documented failure mode that downstream validation is designed to catch.
pub fn extract_packet_zero(
    trace: &InversionTrace,
    window_half_width: f64,
    zero_pad_factor: usize,
) -> Result<Spectrum> {
    if !window_half_width.is_finite() || window_half_width <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "window half-width must be positive, got {window_half_width}"
        )));
    }
    if window_half_width > trace.grid().t_end() + 1e-9 * trace.grid().dt() {
        return Err(Error::InvalidArgument(format!(
            "window half-width {window_half_width} exceeds the trace end {}",
            trace.grid().t_end()
        )));
    }
    let windowed = trace.segment(0.0, window_half_width)?;
    spectrum_of_real(&windowed.even_extend()?, zero_pad_factor)
}

/// Apply the dispersion law that maps packet 0 to packet `m`: each sample
/// at `nu > 0` is multiplied by `e^{-i 2 pi m (pi nu/g)^2}`, each sample at
/// `nu < 0` by the conjugate phase, and `nu = 0` is left unchanged, so
/// Hermitian-symmetric (real-signal) spectra stay Hermitian.
pub fn propagate_packet(base: &Spectrum, m: i64, g: f64) -> Result<Spectrum> {
    if !g.is_finite() || g <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "coupling must be positive, got {g}"
        )));
    }
    let mut out = base.clone();
    for (i, v) in out.values.iter_mut().enumerate() {
        let nu = base.nu(i);
        let quad = (PI * nu / g).powi(2);
        let phase = -nu.signum() * 2.0 * PI * m as f64 * quad;
        let (s, c) = phase.sin_cos();
        *v *= C64::new(c, s);
    }
    Ok(out)
}

/// Synthesize the time-domain packet from its spectrum on the requested
/// grid: `z(t) = dnu sum_k S(nu_k) e^{+i 2 pi nu_k t}`.
///
/// The synthesis is periodic with period `1/dnu`; requested times are
/// reduced into that period, so the grid must stay clear of wrap-around
/// (use enough zero-padding for the packets of interest). The grid spacing
/// must match the spectrum's natural spacing `1/(len * dnu)` and every
/// requested time must fall on that sample lattice.
pub fn packet_time_domain(spec: &Spectrum, grid: &TimeGrid) -> Result<ComplexTrace> {
    let n = spec.len();
    let dt_nat = 1.0 / (n as f64 * spec.dnu());
    if (grid.dt() - dt_nat).abs() > 1e-9 * dt_nat {
        return Err(Error::InvalidArgument(format!(
            "grid spacing {} does not match the spectrum's natural spacing {dt_nat}; \
             resample the spectrum (zero-padding) instead of the grid",
            grid.dt()
        )));
    }
    let half_down = n / 2;
    let mut buf = vec![C64::new(0.0, 0.0); n];
    for (k, slot) in buf.iter_mut().enumerate() {
        *slot = spec.values[(k + half_down) % n];
    }
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);

    let mut out = Vec::with_capacity(grid.count());
    for t in grid.times() {
        let j_real = t / dt_nat;
        let j = j_real.round();
        if (j_real - j).abs() > 1e-6 {
            return Err(Error::InvalidArgument(format!(
                "requested time {t} is off the sample lattice (spacing {dt_nat})"
            )));
        }
        let idx = (j as i64).rem_euclid(n as i64) as usize;
        out.push(buf[idx] * spec.dnu());
    }
    ComplexTrace::from_parts(*grid, out)
}

/// Center time of packet `m` when the dominant photon number is `n_tilde`:
/// `t_m = 2 pi m sqrt(n_tilde + 1) / g`.
pub fn packet_center_time(m: i64, n_tilde: f64, g: f64) -> Result<f64> {
    if !n_tilde.is_finite() || n_tilde < 0.0 || !g.is_finite() || g <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "packet center time needs n_tilde >= 0 and g > 0, got n_tilde = {n_tilde}, g = {g}"
        )));
    }
    Ok(2.0 * PI * (n_tilde + 1.0).sqrt() * m as f64 / g)
}

/// Photon number whose tone dominates the spectrum: locate the magnitude
/// peak over `nu > 0` and convert through `n = (pi nu/g)^2 - 1`. Drives the
/// default packet-window choice.
pub fn dominant_photon_number(spec: &Spectrum, g: f64) -> Result<f64> {
    if !g.is_finite() || g <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "coupling must be positive, got {g}"
        )));
    }
    let best = spec
        .nus()
        .zip(spec.values())
        .filter(|(nu, _)| *nu > 0.0)
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()));
    match best {
        Some((nu, _)) => Ok(((PI * nu / g).powi(2) - 1.0).max(0.0)),
        None => Err(Error::Coverage(
            "spectrum has no positive-frequency samples".into(),
        )),
    }
}

/// A family of packets derived from one base spectrum on a shared grid.
#[derive(Debug, Clone)]
pub struct PacketSet {
    m_indices: Vec<i64>,
    packets: Vec<ComplexTrace>,
    base_spectrum: Spectrum,
}

impl PacketSet {
    /// Build packets for every `m` in `m_indices` by propagating the base
    /// spectrum and synthesizing each on `grid`.
    pub fn build(base: &Spectrum, m_indices: &[i64], grid: &TimeGrid, g: f64) -> Result<Self> {
        if m_indices.is_empty() {
            return Err(Error::InvalidArgument("empty packet index list".into()));
        }
        let packets = m_indices
            .iter()
            .map(|&m| packet_time_domain(&propagate_packet(base, m, g)?, grid))
            .collect::<Result<Vec<_>>>()?;
        Ok(PacketSet {
            m_indices: m_indices.to_vec(),
            packets,
            base_spectrum: base.clone(),
        })
    }

    pub fn m_indices(&self) -> &[i64] {
        &self.m_indices
    }

    pub fn packets(&self) -> &[ComplexTrace] {
        &self.packets
    }

    pub fn packet(&self, m: i64) -> Option<&ComplexTrace> {
        self.m_indices
            .iter()
            .position(|&i| i == m)
            .map(|p| &self.packets[p])
    }

    pub fn base_spectrum(&self) -> &Spectrum {
        &self.base_spectrum
    }
}

/// Reconstruct the real inversion as `sum_m Re z_m(t)` over
/// `m in [m_lo, m_hi]`. The range must contain 0 (the base packet).
pub fn sum_packets(
    base: &Spectrum,
    m_lo: i64,
    m_hi: i64,
    grid: &TimeGrid,
    g: f64,
) -> Result<InversionTrace> {
    if m_lo > 0 || m_hi < 0 {
        return Err(Error::InvalidArgument(format!(
            "packet range [{m_lo}, {m_hi}] must contain 0"
        )));
    }
    let set = PacketSet::build(base, &(m_lo..=m_hi).collect::<Vec<_>>(), grid, g)?;
    let mut sum = vec![0.0; grid.count()];
    for packet in set.packets() {
        for (acc, v) in sum.iter_mut().zip(packet.values()) {
            *acc += v.re;
        }
    }
    InversionTrace::from_parts(*grid, sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inversion::{complex_trace, inversion_trace, FrequencyMap};
    use crate::states::PhotonDistribution;

    fn jcm() -> FrequencyMap {
        FrequencyMap::jcm(1.0).unwrap()
    }

    #[test]
    fn spectrum_grid_invariant_holds_exactly() {
        let grid = TimeGrid::new(-3.0, 0.0125, 481).unwrap();
        let trace = complex_trace(&PhotonDistribution::fock(3), &jcm(), &grid);
        let pad = 8;
        let spec = spectrum_of(&trace, pad).unwrap();
        assert_eq!(spec.len(), 481 * pad);
        // dnu = 1/(2 T pad) with T = count*dt/2, both sides exact products.
        let expect = 1.0 / (2.0 * spec.window_t() * pad as f64);
        assert_eq!(spec.dnu(), expect);
    }

    #[test]
    fn pure_tone_peaks_at_its_frequency_with_window_height() {
        // fock(3) under the square-root map is the single tone e^{i 2 pi
        // nu_3 t} with nu_3 = 2/pi.
        let t_half = 6.0;
        let dt = 0.02;
        let count = (2.0 * t_half / dt) as usize + 1;
        let grid = TimeGrid::new(-t_half, dt, count).unwrap();
        let trace = complex_trace(&PhotonDistribution::fock(3), &jcm(), &grid);
        let spec = spectrum_of(&trace, 8).unwrap();
        let (i_peak, peak) = spec
            .values()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .unwrap();
        let nu_3 = 2.0 / PI;
        assert!((spec.nu(i_peak) - nu_3).abs() <= spec.dnu());
        // Finite-window tone: peak magnitude ~ full window width 2T, off by
        // at most the sub-bin offset of nu_3 from the grid.
        let full = 2.0 * spec.window_t();
        assert!(
            (peak.norm() - full).abs() < 0.05 * full,
            "peak {} vs window {}",
            peak.norm(),
            full
        );
    }

    #[test]
    fn real_even_trace_has_real_spectrum() {
        let dist = PhotonDistribution::coherent(5.0, None).unwrap();
        let grid = TimeGrid::from_zero(0.05, 10.0).unwrap();
        let trace = inversion_trace(&dist, &jcm(), &grid).even_extend().unwrap();
        let spec = spectrum_of_real(&trace, 4).unwrap();
        let peak = spec.peak_magnitude();
        let worst_imag = spec.values().iter().map(|v| v.im.abs()).fold(0.0, f64::max);
        assert!(worst_imag < 1e-9 * peak, "imag {worst_imag} vs peak {peak}");
        assert!(spec.hermitian_defect() < 1e-9 * peak);
    }

    #[test]
    fn analytic_signal_mass_sits_at_positive_frequencies() {
        let dist = PhotonDistribution::coherent(20.0, None).unwrap();
        let fmap = jcm();
        let t_half = 14.0;
        let dt = 0.025;
        let count = (2.0 * t_half / dt) as usize + 1;
        let grid = TimeGrid::new(-t_half, dt, count).unwrap();
        let trace = complex_trace(&dist, &fmap, &grid);
        let spec = spectrum_of(&trace, 4).unwrap();
        let peak = spec.peak_magnitude();
        let worst_negative = spec
            .nus()
            .zip(spec.values())
            .filter(|(nu, _)| *nu < 0.0)
            .map(|(_, v)| v.norm())
            .fold(0.0, f64::max);
        assert!(
            worst_negative < 1e-3 * peak,
            "negative-band magnitude {worst_negative} vs peak {peak}"
        );
    }

    #[test]
    fn spectrum_round_trips_to_the_original_grid() {
        let dist = PhotonDistribution::coherent(4.0, None).unwrap();
        let grid = TimeGrid::new(-5.0, 0.04, 251).unwrap();
        let trace = complex_trace(&dist, &jcm(), &grid);
        let spec = spectrum_of(&trace, 8).unwrap();
        let back = packet_time_domain(&spec, &grid).unwrap();
        for (a, b) in back.values().iter().zip(trace.values()) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn propagation_is_a_group_action_preserving_modulus() {
        let dist = PhotonDistribution::coherent(3.0, None).unwrap();
        let grid = TimeGrid::from_zero(0.05, 8.0).unwrap();
        let trace = inversion_trace(&dist, &jcm(), &grid);
        let base = extract_packet_zero(&trace, 8.0, 4).unwrap();
        let g = 1.0;
        let fwd = propagate_packet(&base, 3, g).unwrap();
        for (a, b) in fwd.values().iter().zip(base.values()) {
            assert!((a.norm() - b.norm()).abs() < 1e-12);
        }
        let back = propagate_packet(&fwd, -3, g).unwrap();
        for (a, b) in back.values().iter().zip(base.values()) {
            assert!((a - b).norm() < 1e-12);
        }
        let two_step = propagate_packet(&propagate_packet(&base, 2, g).unwrap(), 1, g).unwrap();
        for (a, b) in two_step.values().iter().zip(fwd.values()) {
            assert!((a - b).norm() < 1e-12);
        }
        let ident = propagate_packet(&base, 0, g).unwrap();
        for (a, b) in ident.values().iter().zip(base.values()) {
            assert!((a - b).norm() == 0.0);
        }
    }

    #[test]
    fn propagated_packet_lands_at_its_center_time() {
        // Packet 1 of coherent(20): centroid of |w_1| near 2 pi sqrt(21).
        let dist = PhotonDistribution::coherent(20.0, None).unwrap();
        let fmap = jcm();
        let dt = 0.05;
        let half = 14.4;
        let sim = inversion_trace(&dist, &fmap, &TimeGrid::from_zero(dt, half).unwrap());
        let base = extract_packet_zero(&sim, half, 8).unwrap();
        let one = propagate_packet(&base, 1, 1.0).unwrap();
        let count = (45.0 / dt) as usize;
        let grid = TimeGrid::new(10.0, dt, count).unwrap();
        let packet = packet_time_domain(&one, &grid).unwrap();
        let (mut num, mut den) = (0.0, 0.0);
        for (t, v) in grid.times().zip(packet.values()) {
            num += t * v.norm();
            den += v.norm();
        }
        let t1 = packet_center_time(1, 20.0, 1.0).unwrap();
        assert!((t1 - 28.793172275584817).abs() < 1e-12);
        assert!(
            (num / den - t1).abs() < 1.0,
            "centroid {} vs t1 {t1}",
            num / den
        );
    }

    #[test]
    fn dispersion_widens_higher_packets() {
        let dist = PhotonDistribution::coherent(20.0, None).unwrap();
        let fmap = jcm();
        let dt = 0.05;
        let half = 14.4;
        let sim = inversion_trace(&dist, &fmap, &TimeGrid::from_zero(dt, half).unwrap());
        let base = extract_packet_zero(&sim, half, 8).unwrap();
        let second_moment = |m: i64| -> f64 {
            let spec = propagate_packet(&base, m, 1.0).unwrap();
            let center = packet_center_time(m, 20.0, 1.0).unwrap();
            let count = (30.0 / dt) as usize;
            let start = ((center - 15.0) / dt).round() * dt;
            let grid = TimeGrid::new(start, dt, count).unwrap();
            let packet = packet_time_domain(&spec, &grid).unwrap();
            let (mut num, mut den) = (0.0, 0.0);
            for (t, v) in grid.times().zip(packet.values()) {
                let w = v.norm_sqr();
                num += (t - center).powi(2) * w;
                den += w;
            }
            num / den
        };
        let (m1, m2) = (second_moment(1), second_moment(2));
        assert!(m2 > m1, "second moments {m1} vs {m2}");
    }

    #[test]
    fn single_packet_of_a_single_tone_reproduces_the_cosine() {
        // fock(0): W = cos(2 g t); its natural half-window is pi.
        let dist = PhotonDistribution::fock(0);
        let grid = TimeGrid::from_zero(0.02, PI).unwrap();
        let trace = inversion_trace(&dist, &jcm(), &grid);
        let base = extract_packet_zero(&trace, grid.t_end(), 8).unwrap();
        let rebuilt = sum_packets(&base, 0, 0, &grid, 1.0).unwrap();
        for (t, (&got, &want)) in grid.times().zip(rebuilt.values().iter().zip(trace.values())) {
            assert!(
                (got - want).abs() < 0.02,
                "t = {t}: rebuilt {got} vs direct {want}"
            );
        }
    }

    #[test]
    fn packet_window_errors() {
        let dist = PhotonDistribution::fock(0);
        let grid = TimeGrid::from_zero(0.02, 2.0).unwrap();
        let trace = inversion_trace(&dist, &jcm(), &grid);
        assert!(matches!(
            extract_packet_zero(&trace, 0.0, 8),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            extract_packet_zero(&trace, 5.0, 8),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            spectrum_of_real(&trace, 0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn packet_center_time_scales_linearly_in_m() {
        assert_eq!(packet_center_time(0, 20.0, 1.0).unwrap(), 0.0);
        let t1 = packet_center_time(1, 20.0, 1.0).unwrap();
        let t3 = packet_center_time(3, 20.0, 1.0).unwrap();
        assert!((t3 - 3.0 * t1).abs() < 1e-12);
        assert!(packet_center_time(1, -0.5, 1.0).is_err());
    }

    #[test]
    fn dominant_photon_number_finds_the_mean_tone() {
        let dist = PhotonDistribution::coherent(20.0, None).unwrap();
        let grid = TimeGrid::from_zero(0.05, 14.4).unwrap();
        let trace = inversion_trace(&dist, &jcm(), &grid);
        let spec = extract_packet_zero(&trace, 14.4, 8).unwrap();
        let n_tilde = dominant_photon_number(&spec, 1.0).unwrap();
        assert!(
            (n_tilde - 20.0).abs() < 2.0,
            "dominant photon number {n_tilde}"
        );
    }

    #[test]
    fn interpolation_matches_exact_tone_values() {
        // Spectrum of a pure tone has the closed form dt * Dirichlet
        // kernel; check interpolation against a direct slow transform at
        // off-grid frequencies.
        let grid = TimeGrid::new(-4.0, 0.025, 321).unwrap();
        let trace = complex_trace(&PhotonDistribution::fock(2), &jcm(), &grid);
        let spec = spectrum_of(&trace, 8).unwrap();
        let spec_fine = spectrum_of(&trace, 16).unwrap();
        let direct_at = |nu: f64| -> C64 {
            grid.times()
                .zip(trace.values())
                .map(|(t, z)| {
                    let (s, c) = (-2.0 * PI * nu * t).sin_cos();
                    z * C64::new(c, s)
                })
                .sum::<C64>()
                * grid.dt()
        };
        for nu in [0.43, 0.551, 0.612] {
            let direct = direct_at(nu);
            let err = (spec.interpolate(nu).unwrap() - direct).norm();
            assert!(
                err < 4e-4 * spec.peak_magnitude(),
                "nu = {nu}: error {err}"
            );
            // Doubling the padding should shrink the local-cubic error
            // roughly sixteenfold; require at least a factor 4.
            let err_fine = (spec_fine.interpolate(nu).unwrap() - direct).norm();
            assert!(
                err_fine < err.max(1e-13) / 4.0,
                "nu = {nu}: pad 8 error {err}, pad 16 error {err_fine}"
            );
        }
        assert!(matches!(
            spec.interpolate(1.0 / (2.0 * 0.025) + 1.0),
            Err(Error::Coverage(_))
        ));
    }
}
