//! The field's characteristic function `chi(k) = sum_n P_n e^{i 2 pi k n}`:
//! evaluation, inversion back to probabilities, the closed coherent-state
//! form and its cat-state decomposition, and the quadrature reference for
//! the packet propagator.
//!
//! `chi` is periodic with unit period, Hermitian (`chi(-k) = conj chi(k)`),
//! and bounded by `|chi| <= 1`; the inversion integral runs over one period
//! `[-1/2, 1/2)`.

use crate::error::{Error, Result};
use crate::inversion::{FrequencyMap, MapKind};
use crate::quadrature::integrate_adaptive;
use crate::states::PhotonDistribution;
use crate::C64;
use std::f64::consts::PI;

/// Absolute accuracy target of the packet-propagator quadrature.
pub const PROPAGATOR_TOL: f64 = 1e-6;

/// Imaginary residue allowed on inverted probabilities before the samples
/// are declared inconsistent.
pub const INVERSION_IMAG_TOL: f64 = 1e-9;

/// Evaluate `chi(k) = sum_n P_n e^{i 2 pi k n}`.
pub fn chi_eval(dist: &PhotonDistribution, k: f64) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for (n, &p) in dist.probs().iter().enumerate() {
        let (s, c) = (2.0 * PI * k * n as f64).sin_cos();
        acc += C64::new(p * c, p * s);
    }
    acc
}

/// A photon-number distribution viewed through its characteristic
/// function: on-demand evaluation at any real `k`, carrying the defining
/// distribution along.
#[derive(Debug, Clone)]
pub struct CharacteristicFunction {
    source: PhotonDistribution,
}

impl CharacteristicFunction {
    pub fn new(source: PhotonDistribution) -> Self {
        CharacteristicFunction { source }
    }

    pub fn source(&self) -> &PhotonDistribution {
        &self.source
    }

    pub fn eval(&self, k: f64) -> C64 {
        chi_eval(&self.source, k)
    }

    /// Samples on a uniform one-period grid, ready for inversion.
    pub fn on_grid(&self, grid: &KGrid) -> Vec<C64> {
        chi_on_grid(&self.source, grid)
    }
}

/// Closed form of the coherent-state characteristic function,
/// `exp(n_bar (e^{i 2 pi k} - 1))`.
pub fn coherent_chi(n_bar: f64, k: f64) -> C64 {
    let phase = C64::new(0.0, 2.0 * PI * k).exp();
    ((phase - 1.0) * n_bar).exp()
}

/// Characteristic function of the unnormalized cat-state weights
/// `c_n^2 (1 + cos(n phi))`: three coherent peaks,
/// `chi_a(k) + chi_a(k - phi/2pi)/2 + chi_a(k + phi/2pi)/2`.
///
/// At `phi = pi` the two shifted peaks coincide modulo the unit period and
/// the sum reduces to `chi_a(k) + chi_a(k - 1/2)`.
pub fn cat_chi_decomposition(alpha: f64, phi: f64, k: f64) -> Result<C64> {
    if !alpha.is_finite() || alpha < 0.0 || !phi.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "cat decomposition needs finite alpha >= 0 and finite phi, got alpha = {alpha}, \
             phi = {phi}"
        )));
    }
    let n_bar = alpha * alpha;
    let shift = phi / (2.0 * PI);
    Ok(coherent_chi(n_bar, k)
        + coherent_chi(n_bar, k - shift) * 0.5
        + coherent_chi(n_bar, k + shift) * 0.5)
}

/// Uniform grid of `count` points covering one period `[-1/2, 1/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KGrid {
    count: usize,
}

impl KGrid {
    pub fn new(count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::InvalidArgument(format!(
                "k grid needs at least two points, got {count}"
            )));
        }
        Ok(KGrid { count })
    }

    /// Default grid for a distribution: sixteenfold oversampling of the
    /// minimal `2 (n_max + 1)` points that resolve the highest coefficient.
    pub fn for_distribution(dist: &PhotonDistribution) -> Self {
        KGrid {
            count: 32 * (dist.n_max() + 1),
        }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn k(&self, j: usize) -> f64 {
        -0.5 + j as f64 / self.count as f64
    }

    pub fn ks(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(move |j| self.k(j))
    }
}

/// Sample `chi` on a grid.
pub fn chi_on_grid(dist: &PhotonDistribution, grid: &KGrid) -> Vec<C64> {
    grid.ks().map(|k| chi_eval(dist, k)).collect()
}

/// Invert characteristic-function samples back to a photon-number
/// distribution via the Riemann sum of `P_n = int chi(k) e^{-i 2 pi k n} dk`
/// over one period, exact for coefficients up to `count/2 - 1`.
///
/// Aliasing (a grid too coarse for the distribution it sampled) shows up as
/// sign-flipped coefficient leakage; it is detected through negative entries
/// or a coefficient sum away from `chi(0)`. Imaginary residues above
/// [`INVERSION_IMAG_TOL`] mean the samples are not a valid characteristic
/// function on this grid.
pub fn chi_invert(samples: &[C64], grid: &KGrid) -> Result<PhotonDistribution> {
    if samples.len() != grid.count() {
        return Err(Error::InvalidArgument(format!(
            "expected {} samples, got {}",
            grid.count(),
            samples.len()
        )));
    }
    let count = grid.count();
    let n_top = count / 2;
    let mut raw = Vec::with_capacity(n_top);
    for n in 0..n_top {
        let mut acc = C64::new(0.0, 0.0);
        for (j, v) in samples.iter().enumerate() {
            let (s, c) = (-2.0 * PI * grid.k(j) * n as f64).sin_cos();
            acc += v * C64::new(c, s);
        }
        acc /= count as f64;
        if acc.im.abs() > INVERSION_IMAG_TOL {
            return Err(Error::InconsistentInput(format!(
                "coefficient {n} has imaginary residue {:.3e} (limit {INVERSION_IMAG_TOL:.0e}); \
                 the samples are not a characteristic function on this grid",
                acc.im
            )));
        }
        raw.push(acc.re);
    }
    let sum: f64 = raw.iter().sum();
    if (sum - 1.0).abs() > 1e-6 {
        return Err(Error::Aliasing(format!(
            "recovered coefficients sum to {sum:.9}, not 1: the k grid is too coarse for the \
             sampled distribution"
        )));
    }
    if let Some((n, &p)) = raw
        .iter()
        .enumerate()
        .find(|(_, &p)| p < crate::states::NEGATIVITY_NOISE_FLOOR)
    {
        return Err(Error::Aliasing(format!(
            "recovered coefficient {n} is negative ({p:.3e}): the k grid is too coarse for the \
             sampled distribution"
        )));
    }
    // Trim trailing numerically-zero coefficients so exact inputs round-trip
    // to their original support.
    let keep = raw
        .iter()
        .rposition(|&p| p > 1e-12)
        .map_or(1, |i| i + 1);
    raw.truncate(keep.max(1));
    PhotonDistribution::from_raw(&raw)
}

/// Reference evaluation of the packet propagator
/// `K(k, t) = int_{-1}^{x_max} e^{i 2 pi (f(x) t - k x)} dx`
/// by adaptive quadrature to [`PROPAGATOR_TOL`] absolute accuracy.
///
/// This is the slow, assumption-free route to the collapse packet (pairing
/// it with `chi` under an outer `k` integral); the production pipeline goes
/// through the FFT instead. For the Jaynes-Cummings map the integral is
/// evaluated in the variable `u = sqrt(x+1)`, which turns the phase into an
/// exact quadratic and keeps the oscillation density bounded.
pub fn propagator_quadrature(fmap: &FrequencyMap, k: f64, t: f64, x_max: f64) -> Result<C64> {
    if !k.is_finite() || !t.is_finite() || !x_max.is_finite() || x_max <= -1.0 {
        return Err(Error::InvalidArgument(format!(
            "propagator quadrature needs finite k, t and x_max > -1, got k = {k}, t = {t}, \
             x_max = {x_max}"
        )));
    }
    let g = fmap.g();
    match fmap.kind() {
        MapKind::Jcm => {
            // x = u^2 - 1, dx = 2 u du, phase 2 g t u - 2 pi k (u^2 - 1).
            let upper = (x_max + 1.0).sqrt();
            let phase_span = (2.0 * g * t.abs()) * upper + 2.0 * PI * k.abs() * (upper * upper + 1.0);
            let panels = (phase_span / 3.0).ceil().max(32.0).min(300_000.0) as usize;
            integrate_adaptive(
                |u| {
                    let phase = 2.0 * g * t * u - 2.0 * PI * k * (u * u - 1.0);
                    let (s, c) = phase.sin_cos();
                    C64::new(2.0 * u * c, 2.0 * u * s)
                },
                0.0,
                upper,
                PROPAGATOR_TOL,
                panels,
            )
        }
        MapKind::Linear => {
            // Uniform oscillation e^{i 2 pi (g t / pi - k) x}.
            let q = g * t / PI - k;
            let phase_span = 2.0 * PI * q.abs() * (x_max + 1.0);
            let panels = (phase_span / 3.0).ceil().max(32.0).min(300_000.0) as usize;
            integrate_adaptive(
                |x| {
                    let (s, c) = (2.0 * PI * q * x).sin_cos();
                    C64::new(c, s)
                },
                -1.0,
                x_max,
                PROPAGATOR_TOL,
                panels,
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inversion::FrequencyMap;

    fn coherent(n_bar: f64) -> PhotonDistribution {
        PhotonDistribution::coherent(n_bar, None).unwrap()
    }

    #[test]
    fn wrapper_agrees_with_free_evaluation() {
        let dist = coherent(4.0);
        let chi = CharacteristicFunction::new(dist.clone());
        for k in [-0.5, -0.21, 0.0, 0.137, 0.49] {
            assert_eq!(chi.eval(k), chi_eval(&dist, k));
        }
        let grid = KGrid::new(32).unwrap();
        assert_eq!(chi.on_grid(&grid), chi_on_grid(&dist, &grid));
        assert_eq!(chi.source().n_max(), dist.n_max());
    }

    #[test]
    fn chi_at_zero_is_unity() {
        for d in [
            coherent(1.0),
            coherent(20.0),
            PhotonDistribution::fock(3),
            PhotonDistribution::thermal(2.0, None).unwrap(),
        ] {
            let v = chi_eval(&d, 0.0);
            assert!((v - C64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn chi_matches_coherent_closed_form() {
        let d = coherent(1.0);
        for k in [-0.5, -0.21, 0.0, 0.1, 0.25, 0.49] {
            let direct = chi_eval(&d, k);
            let closed = coherent_chi(1.0, k);
            assert!((direct - closed).norm() < 1e-12, "k = {k}");
        }
        // Frozen spot value: chi(1/4) = e^{-1+i} for n_bar = 1.
        let v = coherent_chi(1.0, 0.25);
        let expect = C64::new(-1.0, 1.0).exp();
        assert!((v - expect).norm() < 1e-15);
    }

    #[test]
    fn chi_matches_thermal_closed_form() {
        // Geometric series: chi(k) = 1 / (1 + n_bar (1 - e^{i 2 pi k})).
        let n_bar = 1.5;
        let d = PhotonDistribution::thermal(n_bar, None).unwrap();
        for k in [-0.4, -0.1, 0.2, 0.37] {
            let direct = chi_eval(&d, k);
            let phase = C64::new(0.0, 2.0 * PI * k).exp();
            let closed = C64::new(1.0, 0.0) / (C64::new(1.0, 0.0) + n_bar * (1.0 - phase));
            assert!((direct - closed).norm() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn fock_round_trip_is_exact() {
        let d = PhotonDistribution::fock(2);
        let grid = KGrid::new(64).unwrap();
        let samples = chi_on_grid(&d, &grid);
        let back = chi_invert(&samples, &grid).unwrap();
        assert_eq!(back.n_max(), 2);
        for (n, (&got, &want)) in back.probs().iter().zip(d.probs()).enumerate() {
            assert!((got - want).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn coherent_round_trip_on_oversampled_grid() {
        let d = coherent(20.0);
        let grid = KGrid::for_distribution(&d);
        let back = chi_invert(&chi_on_grid(&d, &grid), &grid).unwrap();
        for n in 0..=d.n_max() {
            let got = back.probs().get(n).copied().unwrap_or(0.0);
            assert!((got - d.probs()[n]).abs() < 1e-10, "n = {n}");
        }
    }

    #[test]
    fn inversion_detects_aliasing() {
        // fock(5) on an 8-point grid: the n = 5 coefficient aliases.
        let d = PhotonDistribution::fock(5);
        let grid = KGrid::new(8).unwrap();
        let err = chi_invert(&chi_on_grid(&d, &grid), &grid).unwrap_err();
        assert!(matches!(err, Error::Aliasing(_)), "got {err:?}");
    }

    #[test]
    fn inversion_rejects_inconsistent_samples() {
        // A non-Hermitian spectrum (single off-center spike) is not a
        // characteristic function of a real distribution.
        let grid = KGrid::new(16).unwrap();
        let mut samples = vec![C64::new(0.0, 0.0); 16];
        samples[3] = C64::new(1.0, 0.7);
        let err = chi_invert(&samples, &grid).unwrap_err();
        assert!(
            matches!(err, Error::InconsistentInput(_) | Error::Aliasing(_)),
            "got {err:?}"
        );
    }

    #[test]
    fn cat_decomposition_matches_direct_evaluation() {
        let alpha = 20f64.sqrt();
        for phi in [std::f64::consts::PI, 2.0 * std::f64::consts::PI / 3.0] {
            let d = PhotonDistribution::cat(
                crate::states::CatParams {
                    alpha,
                    phi,
                    mode: crate::states::CatMode::LargeAlpha,
                },
                None,
            )
            .unwrap();
            for k in [-0.45, -0.25, 0.0, 0.125, 0.33] {
                let direct = chi_eval(&d, k);
                let decomposed = cat_chi_decomposition(alpha, phi, k).unwrap();
                assert!(
                    (direct - decomposed).norm() < 1e-8,
                    "phi = {phi}, k = {k}: {direct} vs {decomposed}"
                );
            }
        }
    }

    #[test]
    fn cat_decomposition_limits() {
        // phi = 0 collapses all three peaks onto the coherent one.
        let v = cat_chi_decomposition(2.0, 0.0, 0.2).unwrap();
        assert!((v - coherent_chi(4.0, 0.2) * 2.0).norm() < 1e-14);
        // phi = pi: half-period-shifted peak at full weight.
        let v = cat_chi_decomposition(2.0, std::f64::consts::PI, 0.2).unwrap();
        let expect = coherent_chi(4.0, 0.2) + coherent_chi(4.0, 0.2 - 0.5);
        assert!((v - expect).norm() < 1e-12);
    }

    #[test]
    fn propagator_linear_matches_closed_form() {
        let fmap = FrequencyMap::linear(1.0).unwrap();
        let x_max = 40.0;
        for (k, t) in [(0.3, 0.0), (0.2, 2.0), (-0.4, 1.3)] {
            let got = propagator_quadrature(&fmap, k, t, x_max).unwrap();
            let q = t / PI - k;
            let exact = if q.abs() < 1e-12 {
                C64::new(x_max + 1.0, 0.0)
            } else {
                let up = C64::new(0.0, 2.0 * PI * q * x_max).exp();
                let lo = C64::new(0.0, -2.0 * PI * q).exp();
                (up - lo) / C64::new(0.0, 2.0 * PI * q)
            };
            assert!(
                (got - exact).norm() < 2e-6,
                "k = {k}, t = {t}: {got} vs {exact}"
            );
        }
    }

    #[test]
    fn propagator_jcm_at_zero_time_has_no_stationary_point() {
        // t = 0 leaves a purely oscillatory integrand whose value is just
        // the boundary term, bounded by 1/(pi |k|) per endpoint and exactly
        // computable from the linear closed form.
        let fmap = FrequencyMap::jcm(1.0).unwrap();
        let x_max = 100.0;
        for k in [0.17, -0.31, 0.5] {
            let got = propagator_quadrature(&fmap, k, 0.0, x_max).unwrap();
            let up = C64::new(0.0, -2.0 * PI * k * x_max).exp();
            let lo = C64::new(0.0, 2.0 * PI * k).exp();
            let exact = (up - lo) / C64::new(0.0, -2.0 * PI * k);
            assert!((got - exact).norm() < 2e-6, "k = {k}");
            assert!(got.norm() < 2.0 / (PI * k.abs()) + 1e-3);
        }
    }

    #[test]
    fn propagator_jcm_zero_momentum_integrates_the_chirp() {
        // k = 0: int_{-1}^{x_max} e^{i 2 g t sqrt(x+1)} dx has the closed
        // form via u-substitution: 2 int_0^U u e^{i a u} du with a = 2 g t.
        let fmap = FrequencyMap::jcm(1.0).unwrap();
        let (t, x_max) = (1.7, 60.0);
        let a = 2.0 * t;
        let upper = (x_max + 1.0f64).sqrt();
        let ia = C64::new(0.0, a);
        let exact = 2.0
            * ((C64::new(0.0, a * upper).exp() * C64::new(upper, 0.0) / ia)
                - (C64::new(0.0, a * upper).exp() - 1.0) / (ia * ia));
        let got = propagator_quadrature(&fmap, 0.0, t, x_max).unwrap();
        assert!((got - exact).norm() < 2e-6, "{got} vs {exact}");
    }
}
