//! Inversion-trace simulation: the measurable atomic inversion of the
//! Jaynes-Cummings model and its complex positive-frequency extension, on
//! uniform time grids.
//!
//! Photon number `n` contributes the tone `cos(2 pi f(n) t)` to the
//! inversion, with `f(n) = g sqrt(n+1) / pi` for the Jaynes-Cummings
//! coupling and `f(n) = g n / pi` for the strictly periodic linear variant.

use crate::error::{Error, Result};
use crate::states::PhotonDistribution;
use crate::C64;
use std::f64::consts::PI;

/// Relative slack on the unit amplitude bound of simulated traces, matching
/// the normalization slack of the distributions driving them.
pub const AMPLITUDE_SLACK: f64 = 1e-9;

/// Photon-number-to-frequency map of the inversion tones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapKind {
    /// `f(n) = g sqrt(n+1) / pi`: the Jaynes-Cummings Rabi spectrum.
    Jcm,
    /// `f(n) = g n / pi`: equidistant tones, strictly periodic inversion.
    Linear,
}

/// Tone-frequency map with coupling strength `g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyMap {
    kind: MapKind,
    g: f64,
}

impl FrequencyMap {
    pub fn new(kind: MapKind, g: f64) -> Result<Self> {
        if !g.is_finite() || g <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "coupling g must be finite and positive, got {g}"
            )));
        }
        Ok(FrequencyMap { kind, g })
    }

    pub fn jcm(g: f64) -> Result<Self> {
        Self::new(MapKind::Jcm, g)
    }

    pub fn linear(g: f64) -> Result<Self> {
        Self::new(MapKind::Linear, g)
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    /// Tone frequency of photon number `n`.
    pub fn freq(&self, n: usize) -> f64 {
        self.freq_x(n as f64)
    }

    /// The map extended to continuous argument `x >= -1` (Jaynes-Cummings)
    /// or any real `x` (linear), as it appears in the packet propagator.
    pub fn freq_x(&self, x: f64) -> f64 {
        match self.kind {
            MapKind::Jcm => self.g * (x + 1.0).max(0.0).sqrt() / PI,
            MapKind::Linear => self.g * x / PI,
        }
    }

    /// Strict period of the linear-map inversion, `pi / g`; the
    /// Jaynes-Cummings map has no exact period.
    pub fn exact_period(&self) -> Option<f64> {
        match self.kind {
            MapKind::Linear => Some(PI / self.g),
            MapKind::Jcm => None,
        }
    }
}

/// Uniform time grid `t_j = t_start + j dt`, `j = 0 .. count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_start: f64,
    dt: f64,
    count: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, dt: f64, count: usize) -> Result<Self> {
        if !t_start.is_finite() || !dt.is_finite() || dt <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "time grid needs finite t_start and dt > 0, got t_start = {t_start}, dt = {dt}"
            )));
        }
        if count == 0 {
            return Err(Error::InvalidArgument(
                "time grid needs at least one sample".into(),
            ));
        }
        Ok(TimeGrid { t_start, dt, count })
    }

    /// Grid on `[0, t_end]` with the given spacing (last sample at or just
    /// below `t_end`).
    pub fn from_zero(dt: f64, t_end: f64) -> Result<Self> {
        if !t_end.is_finite() || t_end <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "t_end must be finite and positive, got {t_end}"
            )));
        }
        let count = (t_end / dt + 1e-9).floor() as usize + 1;
        TimeGrid::new(0.0, dt, count)
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn t(&self, j: usize) -> f64 {
        self.t_start + self.dt * j as f64
    }

    pub fn t_end(&self) -> f64 {
        self.t(self.count - 1)
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(move |j| self.t(j))
    }

    /// Index of the grid point nearest to `t`, if `t` lies on the grid
    /// within a relative tolerance of 1e-6 dt.
    fn aligned_index(&self, t: f64) -> Option<usize> {
        let s = (t - self.t_start) / self.dt;
        let r = s.round();
        if (s - r).abs() > 1e-6 || r < -0.5 || r as usize >= self.count {
            None
        } else {
            Some(r as usize)
        }
    }
}

/// Default sampling interval for a distribution: the fastest tone is
/// oversampled at least eightfold, i.e. `f(n_max) dt <= 1/8`.
pub fn default_dt(dist: &PhotonDistribution, fmap: &FrequencyMap) -> f64 {
    1.0 / (8.0 * fmap.freq(dist.n_max()).max(f64::MIN_POSITIVE))
}

/// Real inversion trace `W(t_j)` on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct InversionTrace {
    grid: TimeGrid,
    values: Vec<f64>,
}

/// Complex positive-frequency trace `Z(t_j)`; its real part is the
/// inversion.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexTrace {
    grid: TimeGrid,
    values: Vec<C64>,
}

macro_rules! trace_common {
    ($ty:ident, $scalar:ty) => {
        impl $ty {
            /// Wrap precomputed samples. No amplitude bound is enforced:
            /// derived data (packet reconstructions, windowed segments) may
            /// legitimately exceed the unit bound of simulated traces by the
            /// approximation error.
            pub fn from_parts(grid: TimeGrid, values: Vec<$scalar>) -> Result<Self> {
                if values.len() != grid.count() {
                    return Err(Error::InvalidArgument(format!(
                        "trace length {} does not match grid count {}",
                        values.len(),
                        grid.count()
                    )));
                }
                Ok($ty { grid, values })
            }

            pub fn grid(&self) -> &TimeGrid {
                &self.grid
            }

            pub fn values(&self) -> &[$scalar] {
                &self.values
            }

            /// Sub-trace covering `[t_lo, t_hi]` (bounds snapped to the
            /// nearest grid points, which must lie on the grid).
            pub fn segment(&self, t_lo: f64, t_hi: f64) -> Result<Self> {
                let (Some(j_lo), Some(j_hi)) =
                    (self.grid.aligned_index(t_lo), self.grid.aligned_index(t_hi))
                else {
                    return Err(Error::InvalidArgument(format!(
                        "segment bounds [{t_lo}, {t_hi}] do not lie on the trace grid \
                         [{:.6}, {:.6}] step {:.6}",
                        self.grid.t_start(),
                        self.grid.t_end(),
                        self.grid.dt()
                    )));
                };
                if j_hi <= j_lo {
                    return Err(Error::InvalidArgument(
                        "segment needs t_hi > t_lo".into(),
                    ));
                }
                let grid = TimeGrid::new(self.grid.t(j_lo), self.grid.dt(), j_hi - j_lo + 1)?;
                Ok($ty {
                    grid,
                    values: self.values[j_lo..=j_hi].to_vec(),
                })
            }
        }
    };
}

trace_common!(InversionTrace, f64);
trace_common!(ComplexTrace, C64);

/// Excited- and ground-state populations of an atom coupled to exactly `n`
/// photons for time `t`: `(cos^2, sin^2)` of `g sqrt(n+1) t`.
pub fn rabi_populations(n: usize, g: f64, t: f64) -> (f64, f64) {
    let half_angle = g * ((n as f64) + 1.0).sqrt() * t;
    let (s, c) = half_angle.sin_cos();
    (c * c, s * s)
}

/// Complex trace `Z(t) = sum_n P_n e^{i 2 pi f(n) t}`.
pub fn complex_trace(
    dist: &PhotonDistribution,
    fmap: &FrequencyMap,
    grid: &TimeGrid,
) -> ComplexTrace {
    let freqs: Vec<f64> = (0..=dist.n_max()).map(|n| 2.0 * PI * fmap.freq(n)).collect();
    let probs = dist.probs();
    let values = (0..grid.count())
        .map(|j| {
            let t = grid.t(j);
            let mut acc = C64::new(0.0, 0.0);
            for (p, w) in probs.iter().zip(&freqs) {
                let (s, c) = (w * t).sin_cos();
                acc += C64::new(p * c, p * s);
            }
            acc
        })
        .collect();
    ComplexTrace {
        grid: *grid,
        values,
    }
}

/// Real inversion trace `W(t) = sum_n P_n cos(2 pi f(n) t)`.
pub fn inversion_trace(
    dist: &PhotonDistribution,
    fmap: &FrequencyMap,
    grid: &TimeGrid,
) -> InversionTrace {
    let freqs: Vec<f64> = (0..=dist.n_max()).map(|n| 2.0 * PI * fmap.freq(n)).collect();
    let probs = dist.probs();
    let values = (0..grid.count())
        .map(|j| {
            let t = grid.t(j);
            probs
                .iter()
                .zip(&freqs)
                .map(|(p, w)| p * (w * t).cos())
                .sum()
        })
        .collect();
    InversionTrace {
        grid: *grid,
        values,
    }
}

fn require_zero_start(grid: &TimeGrid) -> Result<()> {
    if grid.t_start().abs() > 1e-9 * grid.dt() {
        return Err(Error::InvalidArgument(format!(
            "extension needs a trace starting at t = 0, got t_start = {}",
            grid.t_start()
        )));
    }
    if grid.count() < 2 {
        return Err(Error::InvalidArgument(
            "extension needs at least two samples".into(),
        ));
    }
    Ok(())
}

impl InversionTrace {
    /// Mirror a trace measured on `[0, T]` to the symmetric grid `[-T, T]`
    /// using the evenness of the inversion, without duplicating `t = 0`.
    pub fn even_extend(&self) -> Result<InversionTrace> {
        require_zero_start(&self.grid)?;
        let c = self.grid.count();
        let grid = TimeGrid::new(-self.grid.t(c - 1), self.grid.dt(), 2 * c - 1)?;
        let mut values = Vec::with_capacity(2 * c - 1);
        values.extend(self.values.iter().rev());
        values.extend(&self.values[1..]);
        Ok(InversionTrace { grid, values })
    }
}

impl ComplexTrace {
    /// Extend a complex trace from `[0, T]` to `[-T, T]` via the conjugate
    /// symmetry `Z(-t) = conj Z(t)` of positive-frequency signals. The
    /// symmetry pins the value at `t = 0` to its own conjugate, so the
    /// extension exists only when that value is real (any trace of a
    /// normalized distribution starts at exactly 1).
    pub fn conj_even_extend(&self) -> Result<ComplexTrace> {
        require_zero_start(&self.grid)?;
        let v0 = self.values[0];
        if v0.im.abs() > 1e-12 * (1.0 + v0.norm()) {
            return Err(Error::InvalidArgument(format!(
                "conjugate-even extension needs a real value at t = 0, got imaginary part {}",
                v0.im
            )));
        }
        let c = self.grid.count();
        let grid = TimeGrid::new(-self.grid.t(c - 1), self.grid.dt(), 2 * c - 1)?;
        let mut values = Vec::with_capacity(2 * c - 1);
        values.extend(self.values.iter().rev().map(C64::conj));
        values.extend(&self.values[1..]);
        Ok(ComplexTrace { grid, values })
    }

    /// Real part as an inversion trace.
    pub fn real_part(&self) -> InversionTrace {
        InversionTrace {
            grid: self.grid,
            values: self.values.iter().map(|z| z.re).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::PhotonDistribution;

    fn jcm() -> FrequencyMap {
        FrequencyMap::jcm(1.0).unwrap()
    }

    #[test]
    fn frequency_map_values() {
        let f = jcm();
        // nu_0 = g/pi for the Jaynes-Cummings map; frozen 1/pi.
        assert!((f.freq(0) - 0.3183098861837907).abs() < 1e-15);
        let lin = FrequencyMap::linear(1.0).unwrap();
        assert_eq!(lin.freq(0), 0.0);
        assert!((lin.freq(3) - 3.0 / PI).abs() < 1e-15);
        assert!(FrequencyMap::jcm(0.0).is_err());
        assert!(FrequencyMap::jcm(-1.0).is_err());
    }

    #[test]
    fn rabi_populations_conserve_and_cycle() {
        // n = 0, g t = pi/2: the half-angle is pi/2, so the atom is fully
        // in the ground state.
        let (pe, pg) = rabi_populations(0, 1.0, PI / 2.0);
        assert!(pe.abs() < 1e-15);
        assert!((pg - 1.0).abs() < 1e-15);
        for n in [0, 3, 17] {
            for t in [0.0, 0.3, 2.7] {
                let (pe, pg) = rabi_populations(n, 1.3, t);
                assert!((pe + pg - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn fock_trace_is_a_pure_cosine() {
        let d = PhotonDistribution::fock(5);
        let grid = TimeGrid::from_zero(0.01, 3.0).unwrap();
        let w = inversion_trace(&d, &jcm(), &grid);
        for (j, &v) in w.values().iter().enumerate() {
            let expect = (2.0 * 6.0f64.sqrt() * grid.t(j)).cos();
            assert!((v - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn trace_starts_at_unity_and_stays_bounded() {
        let d = PhotonDistribution::coherent(20.0, None).unwrap();
        let grid = TimeGrid::from_zero(0.05, 50.0).unwrap();
        let w = inversion_trace(&d, &jcm(), &grid);
        assert!((w.values()[0] - 1.0).abs() < 1e-12);
        for &v in w.values() {
            assert!(v.abs() <= 1.0 + AMPLITUDE_SLACK);
        }
        let z = complex_trace(&d, &jcm(), &grid);
        assert!((z.values()[0] - C64::new(1.0, 0.0)).norm() < 1e-12);
        for (&v, z) in w.values().iter().zip(z.values()) {
            assert!((z.re - v).abs() < 1e-12);
            assert!(z.norm() <= 1.0 + AMPLITUDE_SLACK);
        }
    }

    #[test]
    fn linear_map_trace_is_periodic() {
        let d = PhotonDistribution::coherent(4.0, None).unwrap();
        let lin = FrequencyMap::linear(1.0).unwrap();
        let period = lin.exact_period().unwrap();
        let steps_per_period = 64usize;
        let grid = TimeGrid::new(0.0, period / steps_per_period as f64, 5 * steps_per_period + 1)
            .unwrap();
        let w = inversion_trace(&d, &lin, &grid);
        for j in 0..w.values().len() - steps_per_period {
            let diff = (w.values()[j] - w.values()[j + steps_per_period]).abs();
            assert!(diff < 1e-12, "j = {j}: period violated by {diff:.3e}");
        }
    }

    #[test]
    fn even_extension_mirrors_without_duplicating_origin() {
        let d = PhotonDistribution::coherent(2.0, None).unwrap();
        let grid = TimeGrid::from_zero(0.1, 1.0).unwrap();
        let w = inversion_trace(&d, &jcm(), &grid);
        let e = w.even_extend().unwrap();
        assert_eq!(e.grid().count(), 2 * grid.count() - 1);
        assert!((e.grid().t_start() + grid.t_end()).abs() < 1e-12);
        let c = grid.count() - 1;
        for j in 0..=c {
            assert_eq!(e.values()[c - j], e.values()[c + j]);
        }
        assert_eq!(e.values()[c], w.values()[0]);
        // A trace that does not start at zero cannot be extended.
        let shifted = w.segment(0.2, 0.8).unwrap();
        assert!(shifted.even_extend().is_err());
    }

    #[test]
    fn conjugate_extension_matches_direct_simulation() {
        let d = PhotonDistribution::coherent(2.0, None).unwrap();
        let grid = TimeGrid::from_zero(0.1, 1.0).unwrap();
        let z = complex_trace(&d, &jcm(), &grid).conj_even_extend().unwrap();
        let full = complex_trace(&d, &jcm(), z.grid());
        for (a, b) in z.values().iter().zip(full.values()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn segment_extracts_aligned_windows() {
        let d = PhotonDistribution::fock(0);
        let grid = TimeGrid::from_zero(0.25, 2.0).unwrap();
        let w = inversion_trace(&d, &jcm(), &grid);
        let s = w.segment(0.5, 1.5).unwrap();
        assert_eq!(s.grid().count(), 5);
        assert!((s.grid().t_start() - 0.5).abs() < 1e-12);
        assert!(w.segment(0.3, 1.0).is_err());
        assert!(w.segment(1.0, 0.5).is_err());
    }

    #[test]
    fn linear_map_equals_characteristic_function_on_the_time_axis() {
        let d = PhotonDistribution::coherent(6.0, None).unwrap();
        let lin = FrequencyMap::linear(1.0).unwrap();
        let grid = TimeGrid::from_zero(0.05, 5.0).unwrap();
        let z = complex_trace(&d, &lin, &grid);
        for (j, zv) in z.values().iter().enumerate() {
            let k = grid.t(j) / PI;
            let chi = crate::charfn::chi_eval(&d, k);
            assert!((zv - chi).norm() < 1e-12, "t = {}", grid.t(j));
        }
    }

    #[test]
    fn default_dt_oversamples_fastest_tone() {
        let d = PhotonDistribution::coherent(20.0, None).unwrap();
        let dt = default_dt(&d, &jcm());
        assert!(jcm().freq(d.n_max()) * dt <= 0.125 + 1e-15);
        assert!(jcm().freq(d.n_max()) * dt > 0.12);
    }
}
