//! Resonance-fluorescence spectra and the coherent/incoherent split of
//! the emitted light.
//!
//! The emission spectrum is the Fourier transform of the first-order
//! coherence `g1(tau) = <sigma+(tau) sigma-(0)>` in the steady state.
//! In the polaron frame that correlation factorizes into a slow optical
//! part, obtained from the master equation by the quantum regression
//! theorem, and a fast phonon envelope `<B>^2 e^{phi(tau)}` that decays
//! on the bath correlation time. The envelope starts at exactly one, so
//! `g1(0)` equals the excited-state population, and relaxes to `<B>^2`,
//! carving the spectrum into a zero-phonon structure of total weight
//! `<B>^2` (the Mollow triplet under strong driving) and a broad phonon
//! sideband of weight `1 - <B>^2`.
//!
//! The long-lag limit of `g1` is the squared steady coherence: light
//! scattered without any phase diffusion. Its value is split off as a
//! delta function at the laser frequency (the coherent weight) before
//! transforming; the remainder decays and yields the incoherent
//! spectral density. Everything is normalized to the total emission, so
//! incoherent integral plus coherent weight is one.
//!
//! The coherent fraction itself never needs the transform: it is the
//! ratio of the `g1` asymptote to `g1(0)`, available in closed form
//! from the steady state. [`coherent_fraction_sweep`] uses that
//! identity, and a test pins it against the spectral route.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::correlation::{is_uniform, two_time_correlation};
use crate::error::Error;
use crate::integrate::SolverOptions;
use crate::models::{build_cavity_model, build_free_model, LindbladModel, PhysicalConfig};
use crate::operator::{sigma_minus, sigma_plus};
use crate::phonon::PhiTable;
use crate::steady::steady_state;
use crate::surface::{modified_se_rate, Orientation};

/// Residual variation allowed at the end of the correlation window,
/// relative to `g1(0)`.
const TAIL_BOUND_REL: f64 = 1e-6;

/// Peak candidates below this fraction of the spectral maximum are
/// treated as ripple and ignored.
const PEAK_FLOOR_REL: f64 = 1e-6;

/// How often [`emission_spectrum`] doubles the correlation window
/// before giving up on tail convergence.
const MAX_WINDOW_DOUBLINGS: usize = 4;

/// One spectral peak: position and height of the interpolated maximum
/// and the full width at half its height, all in rad/ps on the
/// laser-detuning axis.
#[derive(Debug, Clone, Copy)]
pub struct SpectralPeak {
    pub position: f64,
    pub height: f64,
    pub fwhm: f64,
}

/// Emission spectrum normalized to unit total emission.
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    /// Frequency axis as detuning from the laser line, rad/ps.
    pub omega_grid: Vec<f64>,
    /// Incoherent spectral density per rad/ps.
    pub s_incoherent: Vec<f64>,
    /// Weight of the delta function at the laser line.
    pub coherent_weight: f64,
    /// Emission outside the zero-phonon region, as a fraction of the
    /// total.
    pub sideband_fraction: f64,
    /// Up to three dominant peaks of the incoherent density, ordered by
    /// position.
    pub mollow_peaks: Vec<SpectralPeak>,
}

impl SpectrumResult {
    pub fn validate(&self) -> Result<(), Error> {
        let max = self.s_incoherent.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return Err(Error::InvariantViolation {
                t: 0.0,
                which: "spectral density finite",
                value: max,
            });
        }
        if let Some(&low) = self.s_incoherent.iter().find(|&&s| s < -1e-9 * max) {
            return Err(Error::InvariantViolation {
                t: 0.0,
                which: "spectral positivity",
                value: low,
            });
        }
        if !(0.0..=1.0).contains(&self.coherent_weight) {
            return Err(Error::InvariantViolation {
                t: 0.0,
                which: "coherent weight in [0, 1]",
                value: self.coherent_weight,
            });
        }
        let total = self.incoherent_integral() + self.coherent_weight;
        if (total - 1.0).abs() > 1e-3 {
            return Err(Error::InvariantViolation {
                t: 0.0,
                which: "unit total emission",
                value: total,
            });
        }
        Ok(())
    }

    /// Bin width of the frequency axis, rad/ps.
    pub fn bin_width(&self) -> f64 {
        self.omega_grid[1] - self.omega_grid[0]
    }

    /// `sum s dOmega`; equals `1 - coherent_weight` up to roundoff by
    /// the discrete Fourier sum identity.
    pub fn incoherent_integral(&self) -> f64 {
        self.s_incoherent.iter().sum::<f64>() * self.bin_width()
    }
}

/// The three rates that set the sampling requirements of a spectrum:
/// slowest optical decay, effective Rabi frequency and bath cutoff, all
/// in rad/ps.
#[derive(Debug, Clone, Copy)]
pub struct SpectrumScales {
    pub gamma: f64,
    pub omega_eff: f64,
    pub omega_c: f64,
}

impl SpectrumScales {
    pub fn for_model(model: &LindbladModel) -> Self {
        SpectrumScales {
            gamma: model.meta.gamma_photon,
            omega_eff: model.meta.drive.norm(),
            omega_c: model.meta.env.omega_c,
        }
    }

    /// Sampling interval resolving the phonon kernel, the Rabi
    /// oscillation and the optical decay, ps.
    pub fn sample_interval(&self) -> f64 {
        let mut dtau = (0.05 / self.omega_c).min(0.05 / self.gamma);
        if self.omega_eff > 0.0 {
            dtau = dtau.min(0.02 / self.omega_eff);
        }
        dtau
    }

    /// Baseline correlation horizon covering both the optical and the
    /// phonon timescale, ps.
    pub fn default_tau_max(&self) -> f64 {
        (10.0 / self.gamma).max(100.0 / self.omega_c)
    }
}

fn uniform_grid(dtau: f64, tau_max: f64) -> Vec<f64> {
    let n = (tau_max / dtau).ceil() as usize + 1;
    (0..n).map(|k| k as f64 * dtau).collect()
}

fn tau_grid(scales: &SpectrumScales, tau_max: f64) -> Vec<f64> {
    uniform_grid(scales.sample_interval(), tau_max)
}

/// The uniform lag grid a spectrum of this model would be sampled on.
pub fn default_tau_grid(model: &LindbladModel) -> Vec<f64> {
    let scales = SpectrumScales::for_model(model);
    tau_grid(&scales, scales.default_tau_max())
}

/// Polaron-dressed first-order coherence
/// `g1(tau) = <B>^2 e^{phi(tau)} <sigma+(tau) sigma-(0)>_ss`
/// over `taus` (ps, starting at zero, increasing).
///
/// `g1(0)` equals the steady excited-state population because
/// `<B>^2 e^{phi(0)} = 1`; for long lags the regression factor
/// factorizes and `g1` approaches `<B>^2 |<sigma->_ss|^2`.
pub fn g1_dressed(model: &LindbladModel, taus: &[f64]) -> Result<Vec<Complex64>, Error> {
    if model.dim() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "dressed correlation needs a two-level model of the driven transition, got dim {}",
            model.dim()
        )));
    }
    if taus.is_empty() {
        return Err(Error::InvalidParameter("correlation grid is empty".to_string()));
    }
    let rho_ss = steady_state(&model.liouvillian)?;
    let opts = SolverOptions { atol: 1e-12, rtol: 1e-10, ..Default::default() };
    let bare = two_time_correlation(
        &model.liouvillian,
        &rho_ss,
        &sigma_plus(),
        &sigma_minus(),
        taus,
        opts,
    )?;

    let env = model.meta.env;
    let b2 = model.meta.franck_condon * model.meta.franck_condon;
    let window = env.correlation_window()?;
    let mut out = Vec::with_capacity(taus.len());
    if taus.len() > 1 && is_uniform(taus) {
        let dtau = taus[1] - taus[0];
        let cap = (window / dtau).ceil() as usize + 32;
        let table = PhiTable::build(&env, dtau, cap)?;
        for (k, c) in bare.iter().enumerate() {
            out.push(b2 * table.value(k).exp() * c);
        }
    } else {
        for (&tau, c) in taus.iter().zip(&bare) {
            let phi = if tau <= window { env.phi(tau)? } else { Complex64::ZERO };
            out.push(b2 * phi.exp() * c);
        }
    }
    Ok(out)
}

/// Mean of the final stretch of the series and the largest deviation
/// from it (including any constant imaginary part, which a physical
/// asymptote cannot have).
fn tail_estimate(g1: &[Complex64]) -> (Complex64, f64) {
    let n = g1.len();
    let k = (n / 64).max(16).min(n);
    let tail = &g1[n - k..];
    let mean = tail.iter().sum::<Complex64>() / k as f64;
    let mut dev = mean.im.abs();
    for v in tail {
        dev = dev.max((v - mean).norm());
    }
    (mean, dev)
}

/// Transforms a sampled coherence into the normalized emission
/// spectrum.
///
/// The series must sit on a uniform grid starting at zero lag and must
/// have converged to its asymptote within `1e-6 g1(0)` over the final
/// stretch; otherwise [`Error::CorrelationTail`] reports how much decay
/// is still missing. The asymptote is split off as the coherent weight,
/// the remainder is extended to negative lags by conjugate symmetry and
/// transformed, so the density at detuning `omega` is
/// `Re integral_0^inf (g1 - asymptote) e^{-i omega tau} dtau / pi`.
pub fn rf_spectrum(
    taus: &[f64],
    g1: &[Complex64],
    scales: SpectrumScales,
) -> Result<SpectrumResult, Error> {
    if taus.len() != g1.len() {
        return Err(Error::DimensionMismatch(format!(
            "lag grid has {} points but the series has {}",
            taus.len(),
            g1.len()
        )));
    }
    if taus.len() < 32 {
        return Err(Error::InvalidParameter(format!(
            "correlation series of {} points is too short for a spectrum",
            taus.len()
        )));
    }
    if taus[0] != 0.0 || !is_uniform(taus) {
        return Err(Error::InvalidParameter(
            "spectrum needs a uniform lag grid starting at tau = 0".to_string(),
        ));
    }
    let dtau = taus[1] - taus[0];
    let total = g1[0].re;
    if !(total > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "no emission to normalize: g1(0) = {total:e}"
        )));
    }

    let (mean, tail) = tail_estimate(g1);
    let bound = TAIL_BOUND_REL * total;
    if tail > bound {
        return Err(Error::CorrelationTail { tail, bound, tau_max: *taus.last().unwrap() });
    }
    let weight = mean.re.max(0.0);

    let n = g1.len();
    let n_fft = (2 * n).next_power_of_two();
    let mut buf = vec![Complex64::ZERO; n_fft];
    for (slot, value) in buf.iter_mut().zip(g1) {
        *slot = value - weight;
    }
    FftPlanner::new().plan_fft_forward(n_fft).process(&mut buf);

    // trapezoid end correction: the tau = 0 sample enters with half
    // weight, the far end has decayed below the tail bound
    let h0 = total - weight;
    let scale = dtau / (std::f64::consts::PI * total);
    let d_omega = 2.0 * std::f64::consts::PI / (n_fft as f64 * dtau);
    let half = n_fft / 2;
    let mut omega_grid = Vec::with_capacity(n_fft);
    let mut s_incoherent = Vec::with_capacity(n_fft);
    for j in 0..n_fft {
        let m = (j + half) % n_fft;
        omega_grid.push((j as f64 - half as f64) * d_omega);
        s_incoherent.push(scale * (buf[m].re - 0.5 * h0));
    }

    let split = (5.0 * scales.omega_eff).max(100.0 * scales.gamma).min(0.5 * scales.omega_c);
    let sideband_fraction = omega_grid
        .iter()
        .zip(&s_incoherent)
        .filter(|(&w, _)| w.abs() > split)
        .map(|(_, &s)| s)
        .sum::<f64>()
        * d_omega;

    let result = SpectrumResult {
        mollow_peaks: find_peaks(&omega_grid, &s_incoherent),
        omega_grid,
        s_incoherent,
        coherent_weight: weight / total,
        sideband_fraction,
    };
    result.validate()?;
    Ok(result)
}

/// Local maxima of the incoherent density: up to the three tallest,
/// ordered by position, with parabolic sub-bin interpolation.
pub fn mollow_features(result: &SpectrumResult) -> Vec<SpectralPeak> {
    find_peaks(&result.omega_grid, &result.s_incoherent)
}

fn find_peaks(omega: &[f64], s: &[f64]) -> Vec<SpectralPeak> {
    let n = s.len();
    if n < 3 {
        return Vec::new();
    }
    let max = s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(max > 0.0) {
        return Vec::new();
    }
    let floor = PEAK_FLOOR_REL * max;
    let mut peaks = Vec::new();
    for i in 1..n - 1 {
        if s[i] > floor && s[i] > s[i - 1] && s[i] > s[i + 1] {
            let curvature = s[i - 1] - 2.0 * s[i] + s[i + 1];
            let shift = if curvature < 0.0 { 0.5 * (s[i - 1] - s[i + 1]) / curvature } else { 0.0 };
            let bin = omega[i + 1] - omega[i];
            let height = s[i] - 0.25 * (s[i - 1] - s[i + 1]) * shift;
            peaks.push(SpectralPeak {
                position: omega[i] + shift * bin,
                height,
                fwhm: half_width(omega, s, i, height),
            });
        }
    }
    peaks.sort_by(|a, b| b.height.total_cmp(&a.height));
    peaks.truncate(3);
    peaks.sort_by(|a, b| a.position.total_cmp(&b.position));
    peaks
}

/// Full width at half maximum by linear interpolation of the two
/// half-height crossings around the maximum at index `i`; clipped to
/// the grid edge when a crossing lies outside.
fn half_width(omega: &[f64], s: &[f64], i: usize, height: f64) -> f64 {
    let target = 0.5 * height;
    let n = s.len();
    let mut left = omega[0];
    for j in (1..=i).rev() {
        if s[j - 1] <= target {
            let f = (s[j] - target) / (s[j] - s[j - 1]);
            left = omega[j] - f * (omega[j] - omega[j - 1]);
            break;
        }
    }
    let mut right = omega[n - 1];
    for j in i..n - 1 {
        if s[j + 1] <= target {
            let f = (s[j] - target) / (s[j] - s[j + 1]);
            right = omega[j] + f * (omega[j + 1] - omega[j]);
            break;
        }
    }
    right - left
}

/// Full pipeline: sample `g1` on the model's grid, extending the
/// horizon (up to four doublings) until the tail has converged, then
/// transform.
pub fn emission_spectrum(model: &LindbladModel) -> Result<SpectrumResult, Error> {
    let scales = SpectrumScales::for_model(model);
    let mut tau_max = scales.default_tau_max();
    for attempt in 0..=MAX_WINDOW_DOUBLINGS {
        let taus = tau_grid(&scales, tau_max);
        let g1 = g1_dressed(model, &taus)?;
        let (_, tail) = tail_estimate(&g1);
        if tail <= TAIL_BOUND_REL * g1[0].re || attempt == MAX_WINDOW_DOUBLINGS {
            return rf_spectrum(&taus, &g1, scales);
        }
        tau_max *= 2.0;
    }
    unreachable!("loop returns on the final attempt");
}

/// Spectra of several models on one shared frequency axis.
///
/// The lag spacing is the finest any model asks for and the horizon the
/// longest, extended further (up to four doublings) until every tail
/// has converged, so the returned spectra agree bin for bin in
/// `omega_grid` and can be written side by side.
pub fn emission_spectra_on_common_grid(
    models: &[&LindbladModel],
) -> Result<Vec<SpectrumResult>, Error> {
    if models.is_empty() {
        return Ok(Vec::new());
    }
    let scales: Vec<SpectrumScales> = models.iter().map(|m| SpectrumScales::for_model(m)).collect();
    let dtau = scales.iter().map(SpectrumScales::sample_interval).fold(f64::INFINITY, f64::min);
    let mut tau_max = scales.iter().map(SpectrumScales::default_tau_max).fold(0.0, f64::max);
    for attempt in 0..=MAX_WINDOW_DOUBLINGS {
        let taus = uniform_grid(dtau, tau_max);
        let series: Vec<Vec<Complex64>> =
            models.iter().map(|m| g1_dressed(m, &taus)).collect::<Result<_, _>>()?;
        let converged = series.iter().all(|g1| tail_estimate(g1).1 <= TAIL_BOUND_REL * g1[0].re);
        if converged || attempt == MAX_WINDOW_DOUBLINGS {
            return series.iter().zip(&scales).map(|(g1, s)| rf_spectrum(&taus, g1, *s)).collect();
        }
        tau_max *= 2.0;
    }
    unreachable!("loop returns on the final attempt");
}

/// Coherently scattered fraction of the emission for one drive
/// strength, from the exact identity
/// `fraction = <B>^2 |<sigma->_ss|^2 / rho_XX,ss`
/// (asymptote of `g1` over `g1(0)`).
///
/// `u` is the effective Rabi frequency in units of the saturation scale
/// `Omega_s = gamma / sqrt(2)` of the chosen emitter; the free-space
/// Rabi amplitude is solved for so that mirror and free-space curves
/// can be compared on a common axis.
pub fn coherent_fraction_at(config: &PhysicalConfig, u: f64, mirror: bool) -> Result<f64, Error> {
    if !(u > 0.0) {
        return Err(Error::InvalidParameter(format!("drive ratio must be positive, got {u}")));
    }
    let mut probe = *config;
    probe.drive_amplitude = 1.0;
    probe.validate()?;
    let b = probe.env.franck_condon()?;
    let (gamma_model, drive_per_amplitude) = if mirror {
        (
            modified_se_rate(config.gamma0, &config.geometry, Orientation::Parallel),
            probe.cavity_rabi().norm(),
        )
    } else {
        (config.gamma0, 1.0)
    };
    if drive_per_amplitude < 1e-12 {
        return Err(Error::InvalidParameter(
            "emitter sits at a node of the standing wave; no drive reaches it".to_string(),
        ));
    }
    let omega_s = gamma_model / std::f64::consts::SQRT_2;
    let mut point = *config;
    point.drive_amplitude = u * omega_s / (b * drive_per_amplitude);
    let model = if mirror { build_cavity_model(&point)? } else { build_free_model(&point)? };

    let rho = steady_state(&model.liouvillian)?;
    let excited = rho.population(1);
    if !(excited > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "driven steady state carries no excitation (rho_XX = {excited:e})"
        )));
    }
    let coherence = rho.expectation(&sigma_minus());
    let b2 = model.meta.franck_condon * model.meta.franck_condon;
    Ok(b2 * coherence.norm_sqr() / excited)
}

/// [`coherent_fraction_at`] over a list of drive ratios
/// `u = Omega_eff / Omega_s`, returned as `(u, fraction)` pairs.
pub fn coherent_fraction_sweep(
    config: &PhysicalConfig,
    drive_ratios: &[f64],
    mirror: bool,
) -> Result<Vec<(f64, f64)>, Error> {
    drive_ratios.iter().map(|&u| Ok((u, coherent_fraction_at(config, u, mirror)?))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::RateFrequency;
    use crate::phonon::PhononEnvironment;
    use crate::surface::Geometry;
    use approx::assert_relative_eq;

    fn bath(alpha: f64, temperature_k: f64) -> PhononEnvironment {
        PhononEnvironment { alpha_ps2: alpha, omega_c: 2.2, temperature_k }
    }

    /// Default geometry, laser on the polaron-shifted transition.
    fn config(gamma0: f64, alpha: f64, temperature_k: f64) -> PhysicalConfig {
        let env = bath(alpha, temperature_k);
        PhysicalConfig {
            geometry: Geometry { r_d_nm: 177.0, lambda0_nm: 950.0, n_medium: 3.5 },
            gamma0,
            detuning: env.polaron_shift(),
            drive_amplitude: 0.01,
            env,
            photon_thermal: false,
            rate_frequency: RateFrequency::PolaronDetuning,
        }
    }

    /// Free-space Rabi amplitude that dresses the cavity transition to
    /// the requested effective Rabi frequency.
    fn amplitude_for_cavity_rabi(config: &PhysicalConfig, omega_eff: f64) -> f64 {
        let mut probe = *config;
        probe.drive_amplitude = 1.0;
        let b = probe.env.franck_condon().unwrap();
        omega_eff / (b * probe.cavity_rabi().norm())
    }

    #[test]
    fn test_g1_starts_at_excited_population() {
        let model = build_cavity_model(&config(0.01, 0.03, 10.0)).unwrap();
        let rho = steady_state(&model.liouvillian).unwrap();
        let taus: Vec<f64> = (0..200).map(|k| k as f64 * 0.05).collect();
        let g1 = g1_dressed(&model, &taus).unwrap();
        assert_relative_eq!(g1[0].re, rho.population(1), epsilon = 1e-10);
        assert!(g1[0].im.abs() < 1e-12);
    }

    #[test]
    fn test_g1_long_lag_factorizes() {
        let model = build_cavity_model(&config(0.01, 0.03, 10.0)).unwrap();
        let rho = steady_state(&model.liouvillian).unwrap();
        let b2 = model.meta.franck_condon * model.meta.franck_condon;
        let expected = b2 * rho.expectation(&sigma_minus()).norm_sqr();
        let taus: Vec<f64> = (0..=9000).map(|k| k as f64 * 0.5).collect();
        let g1 = g1_dressed(&model, &taus).unwrap();
        let (mean, tail) = tail_estimate(&g1);
        assert!(tail < 1e-6 * g1[0].re);
        assert_relative_eq!(mean.re, expected, epsilon = 1e-6 * g1[0].re);
    }

    #[test]
    fn test_without_phonons_reduces_to_bare_regression() {
        let model = build_cavity_model(&config(0.01, 0.0, 10.0)).unwrap();
        let rho = steady_state(&model.liouvillian).unwrap();
        let taus: Vec<f64> = (0..500).map(|k| k as f64 * 0.2).collect();
        let opts = SolverOptions { atol: 1e-12, rtol: 1e-10, ..Default::default() };
        let bare = two_time_correlation(
            &model.liouvillian,
            &rho,
            &sigma_plus(),
            &sigma_minus(),
            &taus,
            opts,
        )
        .unwrap();
        let g1 = g1_dressed(&model, &taus).unwrap();
        for (a, b) in g1.iter().zip(&bare) {
            assert!((a - b).norm() <= 1e-14);
        }
    }

    #[test]
    fn test_synthetic_decay_gives_lorentzian() {
        // g1 = e^{-gamma tau / 2} is the coherence of an undriven
        // emitter prepared excited: spectrum is a Lorentzian of FWHM
        // gamma with no coherent line
        let gamma = 0.1;
        let dtau = 0.1;
        let taus: Vec<f64> = (0..=4000).map(|k| k as f64 * dtau).collect();
        let g1: Vec<Complex64> =
            taus.iter().map(|&t| Complex64::new((-0.5 * gamma * t).exp(), 0.0)).collect();
        let scales = SpectrumScales { gamma, omega_eff: 0.0, omega_c: 2.2 };
        let spec = rf_spectrum(&taus, &g1, scales).unwrap();

        assert!(spec.coherent_weight < 1e-6);
        assert!((spec.incoherent_integral() + spec.coherent_weight - 1.0).abs() < 1e-6);

        assert_eq!(spec.mollow_peaks.len(), 1);
        let peak = spec.mollow_peaks[0];
        assert!(peak.position.abs() <= spec.bin_width());
        assert_relative_eq!(peak.fwhm, gamma, max_relative = 0.02);

        let lorentzian =
            |w: f64| (gamma / 2.0) / (std::f64::consts::PI * (gamma * gamma / 4.0 + w * w));
        for (&w, &s) in spec.omega_grid.iter().zip(&spec.s_incoherent) {
            if w.abs() < 3.0 * gamma {
                assert_relative_eq!(s, lorentzian(w), max_relative = 1e-4);
            }
        }
    }

    #[test]
    fn test_unconverged_tail_is_rejected() {
        let gamma = 0.001;
        let dtau = 0.5;
        let taus: Vec<f64> = (0..=2000).map(|k| k as f64 * dtau).collect();
        let g1: Vec<Complex64> =
            taus.iter().map(|&t| Complex64::new((-0.5 * gamma * t).exp(), 0.0)).collect();
        let scales = SpectrumScales { gamma, omega_eff: 0.0, omega_c: 2.2 };
        match rf_spectrum(&taus, &g1, scales) {
            Err(Error::CorrelationTail { tail, bound, .. }) => assert!(tail > bound),
            other => panic!("expected tail rejection, got {other:?}"),
        }
    }

    #[test]
    fn test_mollow_sidebands_sit_at_effective_rabi() {
        let mut cfg = config(0.01, 0.03, 10.0);
        let gamma_cav = modified_se_rate(cfg.gamma0, &cfg.geometry, Orientation::Parallel);
        let omega_eff = 20.0 * gamma_cav;
        cfg.drive_amplitude = amplitude_for_cavity_rabi(&cfg, omega_eff);
        let model = build_cavity_model(&cfg).unwrap();
        assert_relative_eq!(model.meta.drive.norm(), omega_eff, max_relative = 1e-12);

        let spec = emission_spectrum(&model).unwrap();
        assert_eq!(spec.mollow_peaks.len(), 3);
        let bin = spec.bin_width();
        assert!((spec.mollow_peaks[0].position + omega_eff).abs() <= bin);
        assert!(spec.mollow_peaks[1].position.abs() <= bin);
        assert!((spec.mollow_peaks[2].position - omega_eff).abs() <= bin);
    }

    #[test]
    fn test_sideband_positions_scale_with_drive_enhancement() {
        // same laser power on both: the mirror emitter is driven
        // 2 sqrt(2) |sin(q0 r_d)| times harder than the free one, and
        // the Mollow splitting moves accordingly
        let mut cfg = config(0.01, 0.03, 10.0);
        let gamma_cav = modified_se_rate(cfg.gamma0, &cfg.geometry, Orientation::Parallel);
        cfg.drive_amplitude = amplitude_for_cavity_rabi(&cfg, 20.0 * gamma_cav);

        let mirror = build_cavity_model(&cfg).unwrap();
        let free = build_free_model(&cfg).unwrap();
        let expected_ratio = mirror.meta.drive.norm() / free.meta.drive.norm();

        let spec_mirror = emission_spectrum(&mirror).unwrap();
        let spec_free = emission_spectrum(&free).unwrap();
        assert_eq!(spec_mirror.mollow_peaks.len(), 3);
        assert_eq!(spec_free.mollow_peaks.len(), 3);
        let ratio = spec_mirror.mollow_peaks[2].position / spec_free.mollow_peaks[2].position;
        assert_relative_eq!(ratio, expected_ratio, max_relative = 0.02);
    }

    #[test]
    fn test_common_grid_spectra_share_axis() {
        let mut cfg = config(0.05, 0.0, 10.0);
        let gamma_cav = modified_se_rate(cfg.gamma0, &cfg.geometry, Orientation::Parallel);
        cfg.drive_amplitude = amplitude_for_cavity_rabi(&cfg, 20.0 * gamma_cav);
        let mirror = build_cavity_model(&cfg).unwrap();
        let free = build_free_model(&cfg).unwrap();

        let joint = emission_spectra_on_common_grid(&[&mirror, &free]).unwrap();
        assert_eq!(joint.len(), 2);
        assert_eq!(joint[0].omega_grid, joint[1].omega_grid);
        for spec in &joint {
            assert!((spec.incoherent_integral() + spec.coherent_weight - 1.0).abs() < 1e-3);
        }
        // the joint horizon covers both models, so each spectrum keeps
        // its own sideband structure
        assert_eq!(joint[0].mollow_peaks.len(), 3);
        assert_eq!(joint[1].mollow_peaks.len(), 3);
        let ratio = joint[0].mollow_peaks[2].position / joint[1].mollow_peaks[2].position;
        assert_relative_eq!(
            ratio,
            mirror.meta.drive.norm() / free.meta.drive.norm(),
            max_relative = 0.02
        );
    }

    #[test]
    fn test_sideband_fraction_tracks_zero_phonon_weight() {
        let cfg = config(0.001, 0.03, 10.0);
        let b2 = cfg.env.franck_condon().unwrap().powi(2);
        let spec = emission_spectrum(&build_cavity_model(&cfg).unwrap()).unwrap();
        assert!((spec.sideband_fraction - (1.0 - b2)).abs() < 0.02);
    }

    #[test]
    fn test_tuned_coupling_gives_sixteen_percent_sideband() {
        // exponent of <B>^2 is linear in the coupling, so one reference
        // evaluation fixes the alpha that gives <B>^2 = 0.84
        let reference = config(0.001, 0.03, 10.0);
        let b2_ref = reference.env.franck_condon().unwrap().powi(2);
        let alpha = 0.03 * 0.84_f64.ln() / b2_ref.ln();
        let cfg = config(0.001, alpha, 10.0);
        assert_relative_eq!(cfg.env.franck_condon().unwrap().powi(2), 0.84, epsilon = 1e-10);
        let spec = emission_spectrum(&build_cavity_model(&cfg).unwrap()).unwrap();
        assert!((spec.sideband_fraction - 0.16).abs() < 0.02);
    }

    #[test]
    fn test_sideband_fraction_grows_with_temperature() {
        let fractions: Vec<f64> = [4.0, 10.0, 20.0]
            .map(|t| {
                let cfg = config(0.001, 0.03, t);
                emission_spectrum(&build_cavity_model(&cfg).unwrap()).unwrap().sideband_fraction
            })
            .to_vec();
        assert!(fractions[0] < fractions[1] && fractions[1] < fractions[2]);
    }

    #[test]
    fn test_resonant_spectrum_is_symmetric_without_phonons() {
        let mut cfg = config(0.01, 0.0, 10.0);
        cfg.drive_amplitude = 0.1;
        let model = build_free_model(&cfg).unwrap();
        let spec = emission_spectrum(&model).unwrap();
        let n = spec.s_incoherent.len();
        let max = spec.s_incoherent.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for j in 1..n {
            assert!((spec.s_incoherent[j] - spec.s_incoherent[n - j]).abs() <= 1e-6 * max);
        }
    }

    #[test]
    fn test_coherent_fraction_without_phonons_follows_saturation() {
        // the laser stays on the bare line, so the mirror curve keeps
        // its surface shift as a residual detuning; the exact
        // steady-state prediction is
        // (delta^2 + gamma^2/4) / (delta^2 + gamma^2/4 + u^2 gamma^2/4)
        let cfg = config(0.001, 0.0, 10.0);
        for mirror in [false, true] {
            let (gamma, delta) = if mirror {
                (
                    modified_se_rate(cfg.gamma0, &cfg.geometry, Orientation::Parallel),
                    crate::surface::surface_shift(cfg.gamma0, &cfg.geometry, Orientation::Parallel),
                )
            } else {
                (cfg.gamma0, 0.0)
            };
            let sweep =
                coherent_fraction_sweep(&cfg, &[0.1, 0.5, 1.0, 2.0, 5.0, 10.0], mirror).unwrap();
            for &(u, fraction) in &sweep {
                let zpl = delta * delta + gamma * gamma / 4.0;
                let expected = zpl / (zpl + u * u * gamma * gamma / 4.0);
                assert_relative_eq!(fraction, expected, epsilon = 1e-9);
                assert!((fraction - 1.0 / (1.0 + u * u)).abs() < 5e-3);
            }
            assert!(sweep[0].1 >= 0.99);
            assert!(sweep.windows(2).all(|w| w[1].1 < w[0].1));
        }
    }

    #[test]
    fn test_coherent_fraction_phonon_plateau() {
        let cfg = config(0.001, 0.03, 10.0);
        let b2 = cfg.env.franck_condon().unwrap().powi(2);
        let ratios = [0.1, 0.3, 1.0, 3.0, 10.0];
        let mirror = coherent_fraction_sweep(&cfg, &ratios, true).unwrap();
        let free = coherent_fraction_sweep(&cfg, &ratios, false).unwrap();
        assert!((mirror[0].1 - b2).abs() < 0.02);
        assert!((free[0].1 - b2).abs() < 0.02);
        assert!(mirror.windows(2).all(|w| w[1].1 < w[0].1));
        assert!(mirror.last().unwrap().1 < 0.02);
        for (m, f) in mirror.iter().zip(&free) {
            assert!((m.1 - f.1).abs() < 0.05);
        }
    }

    #[test]
    fn test_fraction_identity_matches_spectral_weight() {
        let cfg = config(0.01, 0.03, 10.0);
        let u = 2.0;
        let fraction = coherent_fraction_at(&cfg, u, true).unwrap();

        let gamma_cav = modified_se_rate(cfg.gamma0, &cfg.geometry, Orientation::Parallel);
        let mut driven = cfg;
        driven.drive_amplitude =
            amplitude_for_cavity_rabi(&cfg, u * gamma_cav / std::f64::consts::SQRT_2);
        let spec = emission_spectrum(&build_cavity_model(&driven).unwrap()).unwrap();
        assert_relative_eq!(spec.coherent_weight, fraction, epsilon = 1e-4);
    }

    #[test]
    fn test_grid_recipe_resolves_all_scales() {
        let model = build_cavity_model(&config(0.01, 0.03, 10.0)).unwrap();
        let scales = SpectrumScales::for_model(&model);
        let taus = default_tau_grid(&model);
        assert_eq!(taus[0], 0.0);
        assert!(is_uniform(&taus));
        let dtau = taus[1] - taus[0];
        assert!(dtau <= 0.05 / scales.omega_c);
        assert!(dtau <= 0.02 / scales.omega_eff);
        assert!(dtau <= 0.05 / scales.gamma);
        assert!(*taus.last().unwrap() >= (10.0 / scales.gamma).max(100.0 / scales.omega_c));
    }
}
