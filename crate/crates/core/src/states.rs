//! Photon-number distributions of the field states fed into the inversion
//! simulation: Fock, coherent, thermal, two-component cat, and caller-supplied
//! distributions.
//!
//! All constructors return a [`PhotonDistribution`] whose probabilities are
//! nonnegative, sum to 1 after renormalization over the truncation, and whose
//! truncation tail carries less than [`TAIL_TOLERANCE`] of the total mass.

use crate::error::{Error, Result};
use statrs::function::gamma::ln_gamma;

/// Maximum relative probability mass allowed beyond the truncation index.
pub const TAIL_TOLERANCE: f64 = 1e-12;

/// Negative entries above this level are treated as numerical noise and
/// clamped to zero; anything more negative is rejected.
pub const NEGATIVITY_NOISE_FLOOR: f64 = -1e-12;

/// Hard cap on the truncation search so pathological parameters fail loudly
/// instead of looping.
const N_MAX_CAP: usize = 1 << 20;

/// Normalization mode for two-component cat states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatMode {
    /// Normalize with the analytic coherent-component overlap, then validate
    /// that the truncated sum is consistent with it.
    Exact,
    /// Keep the weights `c_n^2 (1 + cos(n phi))` of the large-amplitude
    /// approximation and normalize them over the truncation.
    LargeAlpha,
}

/// Parameters of the cat state `(|alpha> + |alpha e^{i phi}>)/sqrt(2)`
/// with real nonnegative `alpha`.
#[derive(Debug, Clone, Copy)]
pub struct CatParams {
    pub alpha: f64,
    pub phi: f64,
    pub mode: CatMode,
}

/// A truncated photon-number distribution `P_0 ..= P_{n_max}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonDistribution {
    probs: Vec<f64>,
}

impl PhotonDistribution {
    /// Fock state `|n>`: all mass on a single photon number.
    pub fn fock(n: usize) -> Self {
        let mut probs = vec![0.0; n + 1];
        probs[n] = 1.0;
        PhotonDistribution { probs }
    }

    /// Coherent state with mean photon number `n_bar` (Poisson statistics).
    ///
    /// With `n_max = None` the truncation is the smallest index whose Poisson
    /// tail is below [`TAIL_TOLERANCE`]; an explicit `n_max` must satisfy the
    /// same bound or the call fails with a truncation error.
    pub fn coherent(n_bar: f64, n_max: Option<usize>) -> Result<Self> {
        if !n_bar.is_finite() || n_bar < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "coherent state needs finite n_bar >= 0, got {n_bar}"
            )));
        }
        let weights = |n: usize| poisson_pmf(n_bar, n);
        build_truncated(weights, n_max, "Poisson")
    }

    /// Thermal state with mean photon number `n_bar` (geometric statistics
    /// `P_n = n_bar^n / (1 + n_bar)^{n+1}`).
    pub fn thermal(n_bar: f64, n_max: Option<usize>) -> Result<Self> {
        if !n_bar.is_finite() || n_bar < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "thermal state needs finite n_bar >= 0, got {n_bar}"
            )));
        }
        let ratio = n_bar / (1.0 + n_bar);
        let weights = |n: usize| (1.0 / (1.0 + n_bar)) * ratio.powi(n as i32);
        build_truncated(weights, n_max, "geometric")
    }

    /// Two-component cat state `(|alpha> + |alpha e^{i phi}>)/sqrt(2)`.
    ///
    /// The photon-number weights are `c_n^2 (1 + cos(n phi))` with `c_n^2`
    /// Poisson at mean `alpha^2`. In [`CatMode::Exact`] the analytic
    /// normalization `1 + e^{alpha^2(cos phi - 1)} cos(alpha^2 sin phi)`
    /// (the real part of the coherent-component overlap) is applied first and
    /// the truncated sum is required to agree with it, which validates the
    /// derivation; both modes then renormalize over the truncation.
    pub fn cat(params: CatParams, n_max: Option<usize>) -> Result<Self> {
        let CatParams { alpha, phi, mode } = params;
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "cat state needs finite alpha >= 0, got {alpha}"
            )));
        }
        if !phi.is_finite() {
            return Err(Error::InvalidArgument("cat state needs finite phi".into()));
        }
        let lambda = alpha * alpha;
        let weights = |n: usize| poisson_pmf(lambda, n) * (1.0 + (n as f64 * phi).cos());
        let dist = build_truncated(weights, n_max, "cat")?;
        if mode == CatMode::Exact {
            // Overlap normalization: sum_n c_n^2 (1 + cos(n phi)) equals
            // 1 + Re<alpha|alpha e^{i phi}> in closed form. The truncated
            // weight sum must reproduce it, otherwise the weights are wrong.
            let analytic = 1.0 + (lambda * (phi.cos() - 1.0)).exp() * (lambda * phi.sin()).cos();
            let raw_sum: f64 = (0..dist.probs.len()).map(weights).sum();
            if (raw_sum - analytic).abs() > 1e-9 * analytic.max(1.0) {
                return Err(Error::InconsistentInput(format!(
                    "cat overlap normalization mismatch: truncated sum {raw_sum:.15e} \
                     vs analytic {analytic:.15e}"
                )));
            }
        }
        Ok(dist)
    }

    /// Distribution from raw caller-supplied weights. Negative entries above
    /// the noise floor are clamped to zero, anything more negative is
    /// rejected, and the result is renormalized.
    pub fn from_raw(raw: &[f64]) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::InvalidArgument(
                "custom distribution needs at least one entry".into(),
            ));
        }
        let mut probs = Vec::with_capacity(raw.len());
        for (n, &p) in raw.iter().enumerate() {
            if !p.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "custom distribution entry {n} is not finite"
                )));
            }
            if p < NEGATIVITY_NOISE_FLOOR {
                return Err(Error::InvalidArgument(format!(
                    "custom distribution entry {n} = {p:.3e} is negative beyond \
                     the {NEGATIVITY_NOISE_FLOOR:.0e} noise floor"
                )));
            }
            probs.push(p.max(0.0));
        }
        let sum: f64 = probs.iter().sum();
        if sum <= 0.0 {
            return Err(Error::InvalidArgument(
                "custom distribution has no positive mass".into(),
            ));
        }
        for p in &mut probs {
            *p /= sum;
        }
        Ok(PhotonDistribution { probs })
    }

    /// Probabilities `P_0 ..= P_{n_max}`.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Truncation index (highest retained photon number).
    pub fn n_max(&self) -> usize {
        self.probs.len() - 1
    }

    /// Mean photon number of the truncated distribution.
    pub fn mean(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .sum()
    }
}

/// Poisson probability mass `e^{-lambda} lambda^n / n!`, evaluated in log
/// space so large means and large `n` stay finite.
fn poisson_pmf(lambda: f64, n: usize) -> f64 {
    if lambda == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let nf = n as f64;
    (-lambda + nf * lambda.ln() - ln_gamma(nf + 1.0)).exp()
}

/// Shared truncation logic: find or validate `n_max` against
/// [`TAIL_TOLERANCE`], then renormalize the retained weights.
fn build_truncated<F>(weights: F, n_max: Option<usize>, family: &str) -> Result<PhotonDistribution>
where
    F: Fn(usize) -> f64,
{
    // Scan far enough past any plausible truncation that the unscanned tail
    // is negligible even against TAIL_TOLERANCE: past the weight peak the
    // increments fall off at least geometrically for every family built here,
    // so once the last eight increments together are below 1e-6 of the
    // tolerance budget the remainder cannot matter.
    let mut cumulative = Vec::new();
    let mut total = 0.0;
    let mut n = 0;
    loop {
        total += weights(n);
        cumulative.push(total);
        let target = n_max.unwrap_or(0);
        if n >= target && n >= 8 && total > 0.0 {
            let recent = total - cumulative[n - 8];
            if recent < 1e-6 * TAIL_TOLERANCE * total {
                break;
            }
        }
        n += 1;
        if n > N_MAX_CAP {
            return Err(Error::Truncation(format!(
                "{family} weights still carry mass beyond n = {N_MAX_CAP}"
            )));
        }
    }
    let chosen = match n_max {
        Some(m) => {
            let kept = cumulative[m.min(cumulative.len() - 1)];
            if (total - kept) > TAIL_TOLERANCE * total {
                return Err(Error::Truncation(format!(
                    "{family} tail beyond n_max = {m} is {:.3e} of the total mass \
                     (limit {TAIL_TOLERANCE:.0e})",
                    (total - kept) / total
                )));
            }
            m
        }
        None => {
            let mut m = 0;
            while (total - cumulative[m]) > TAIL_TOLERANCE * total {
                m += 1;
            }
            m
        }
    };
    let mut probs: Vec<f64> = (0..=chosen).map(&weights).collect();
    let sum: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= sum;
    }
    Ok(PhotonDistribution { probs })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent Poisson oracle: upward recurrence from `p_0 = e^{-lambda}`,
    /// a different arithmetic route from the log-gamma evaluation under test.
    fn poisson_recurrence(lambda: f64, n_max: usize) -> Vec<f64> {
        let mut p = vec![0.0; n_max + 1];
        p[0] = (-lambda).exp();
        for n in 0..n_max {
            p[n + 1] = p[n] * lambda / (n as f64 + 1.0);
        }
        p
    }

    #[test]
    fn fock_is_a_point_mass() {
        let d = PhotonDistribution::fock(2);
        assert_eq!(d.probs(), &[0.0, 0.0, 1.0]);
        assert_eq!(d.n_max(), 2);
        assert!((d.mean() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn coherent_matches_frozen_poisson_values() {
        let d = PhotonDistribution::coherent(20.0, None).unwrap();
        // Frozen with 30-digit arithmetic: e^{-20} 20^20 / 20!. Comparisons
        // sit at 1e-12 because renormalizing away the truncated tail shifts
        // every entry by up to that much in relative terms.
        assert!((d.probs()[20] - 0.0888353173920852).abs() < 1e-12);
        // Poisson identity at the mean: P_19 = P_20 for lambda = 20 (exact
        // in real arithmetic; log-space evaluation leaves ~1e-13 slack).
        assert!((d.probs()[19] - d.probs()[20]).abs() < 1e-13);
        let d1 = PhotonDistribution::coherent(1.0, None).unwrap();
        assert!((d1.probs()[0] - 0.3678794411714423).abs() < 1e-12);
    }

    #[test]
    fn coherent_matches_recurrence_oracle() {
        let d = PhotonDistribution::coherent(20.0, None).unwrap();
        let oracle = poisson_recurrence(20.0, d.n_max());
        // The two routes (log-space gamma vs running product) agree to the
        // gamma approximation's accuracy plus the renormalization shift.
        for (n, (&got, &want)) in d.probs().iter().zip(&oracle).enumerate() {
            assert!(
                (got - want).abs() < 1e-12,
                "n = {n}: {got} vs oracle {want}"
            );
        }
    }

    #[test]
    fn coherent_auto_truncation_meets_tail_bound() {
        for n_bar in [0.5, 1.0, 20.0, 100.0] {
            let d = PhotonDistribution::coherent(n_bar, None).unwrap();
            let sum: f64 = d.probs().iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
            // The unnormalized tail beyond n_max must be below tolerance;
            // check via the recurrence oracle extended well past n_max.
            let far = poisson_recurrence(n_bar, d.n_max() + 200);
            let tail: f64 = far[d.n_max() + 1..].iter().sum();
            assert!(tail < TAIL_TOLERANCE, "n_bar = {n_bar}: tail {tail:.3e}");
            // And the truncation is minimal: one index earlier would leak.
            let tail_minus: f64 = far[d.n_max()..].iter().sum();
            assert!(tail_minus >= TAIL_TOLERANCE * 0.99);
        }
    }

    #[test]
    fn coherent_rejects_insufficient_explicit_truncation() {
        let err = PhotonDistribution::coherent(20.0, Some(25)).unwrap_err();
        assert!(matches!(err, Error::Truncation(_)), "got {err:?}");
        // A generous explicit truncation is accepted.
        assert!(PhotonDistribution::coherent(20.0, Some(80)).is_ok());
    }

    #[test]
    fn coherent_mean_is_n_bar() {
        let d = PhotonDistribution::coherent(20.0, None).unwrap();
        assert!((d.mean() - 20.0).abs() < 1e-9);
    }

    #[test]
    fn coherent_zero_is_vacuum() {
        let d = PhotonDistribution::coherent(0.0, None).unwrap();
        assert_eq!(d.n_max(), 0);
        assert_eq!(d.probs()[0], 1.0);
    }

    #[test]
    fn thermal_matches_geometric_form() {
        let d = PhotonDistribution::thermal(1.0, None).unwrap();
        // P_n = (1/2)^{n+1} for n_bar = 1.
        assert!((d.probs()[0] - 0.5).abs() < 1e-12);
        assert!((d.probs()[5] - 0.5f64.powi(6)).abs() < 1e-13);
        assert!((d.mean() - 1.0).abs() < 1e-9);
        let sum: f64 = d.probs().iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn thermal_rejects_negative_mean() {
        assert!(matches!(
            PhotonDistribution::thermal(-0.5, None),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn cat_phase_pi_kills_odd_numbers() {
        let d = PhotonDistribution::cat(
            CatParams {
                alpha: 20f64.sqrt(),
                phi: std::f64::consts::PI,
                mode: CatMode::Exact,
            },
            None,
        )
        .unwrap();
        for n in (1..=d.n_max()).step_by(2) {
            assert!(d.probs()[n].abs() < 1e-15, "odd n = {n} not suppressed");
        }
        // Frozen: 2 P_20(lambda=20) / (1 + e^{-40}).
        assert!((d.probs()[20] - 0.17767063478417044).abs() < 1e-12);
    }

    #[test]
    fn cat_modes_agree_at_large_alpha() {
        let params = |mode| CatParams {
            alpha: 20f64.sqrt(),
            phi: std::f64::consts::PI,
            mode,
        };
        let exact = PhotonDistribution::cat(params(CatMode::Exact), None).unwrap();
        let approx = PhotonDistribution::cat(params(CatMode::LargeAlpha), None).unwrap();
        for n in 0..=exact.n_max().min(approx.n_max()) {
            assert!((exact.probs()[n] - approx.probs()[n]).abs() < 1e-8);
        }
    }

    #[test]
    fn cat_phase_zero_reduces_to_coherent() {
        let d = PhotonDistribution::cat(
            CatParams {
                alpha: 2.0,
                phi: 0.0,
                mode: CatMode::Exact,
            },
            None,
        )
        .unwrap();
        let c = PhotonDistribution::coherent(4.0, None).unwrap();
        for n in 0..=d.n_max().min(c.n_max()) {
            assert!((d.probs()[n] - c.probs()[n]).abs() < 1e-12);
        }
    }

    #[test]
    fn custom_clamps_noise_and_rejects_real_negativity() {
        let d = PhotonDistribution::from_raw(&[0.5, -1e-13, 0.5]).unwrap();
        assert_eq!(d.probs()[1], 0.0);
        assert!((d.probs()[0] - 0.5).abs() < 1e-12);
        assert!(matches!(
            PhotonDistribution::from_raw(&[0.5, -1e-3, 0.5]),
            Err(Error::InvalidArgument(_))
        ));
        assert!(PhotonDistribution::from_raw(&[]).is_err());
        assert!(PhotonDistribution::from_raw(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn custom_renormalizes() {
        let d = PhotonDistribution::from_raw(&[2.0, 6.0]).unwrap();
        assert!((d.probs()[0] - 0.25).abs() < 1e-15);
        assert!((d.probs()[1] - 0.75).abs() < 1e-15);
    }
}
