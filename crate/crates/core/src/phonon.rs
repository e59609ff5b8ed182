//! Polaron-frame description of the acoustic-phonon bath.
//!
//! Deformation-potential coupling of the exciton to longitudinal
//! acoustic phonons is captured by the superohmic spectral density
//! `J(w) = alpha w^3 exp(-w^2/w_c^2)`. The polaron (Lang-Firsov)
//! transformation displaces the lattice around the occupied exciton and
//! leaves three fingerprints that this module evaluates:
//!
//! * the Franck-Condon factor `<B>`, which renormalizes every coherent
//!   drive amplitude and carries the zero-phonon-line weight `<B>^2`;
//! * the phonon propagator `phi(tau)`, a short-lived complex kernel
//!   whose transforms yield both the scattering rates and the broad
//!   sideband of the emission spectrum;
//! * the polaron shift of the transition frequency, subtracted from the
//!   laser detuning before any rate is evaluated.
//!
//! The scattering rates come in two kinds: ordinary phonon-assisted
//! excitation and decay (`gamma_up`, `gamma_down`, related by detailed
//! balance), and cross-dephasing rates whose prefactors are squared
//! rather than modulus-squared in the drive amplitude.
//!
//! Numerics: for `T > 0` the frequency integrand `w coth(beta w/2)` is
//! even and analytic at `w = 0`, so `phi` decays exponentially in `tau`
//! and adaptive quadrature on `[0, 8 w_c]` converges quickly. At exactly
//! `T = 0` the integrand has a `|w|` kink, the decay becomes an
//! algebraic `-alpha/tau^2` tail, and quadrature is replaced by the
//! closed form through the Dawson function.

use std::cell::RefCell;

use num_complex::Complex64;

use crate::error::Error;
use crate::quad;

/// Tolerances for the frequency-side quadrature behind `phi`.
const PHI_ATOL: f64 = 1e-13;
const PHI_RTOL: f64 = 1e-10;

/// Required smallness of `|e^{phi(tau_max)} - 1|` before the rate
/// integrals accept a truncation point.
const TAIL_BOUND: f64 = 1e-8;

/// Superohmic bath parameters. The inverse thermal energy
/// `beta = hbar/(k_B T)` is derived on demand and becomes infinite at
/// `T = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhononEnvironment {
    /// Deformation coupling strength, ps^2.
    pub alpha_ps2: f64,
    /// Gaussian cutoff frequency, rad/ps.
    pub omega_c: f64,
    /// Lattice temperature, K.
    pub temperature_k: f64,
}

/// Polaron scattering rates for one drive amplitude and one splitting.
///
/// `gamma_down` multiplies the dissipator that de-excites across the
/// splitting `w'` (phonon emission), `gamma_up` the reverse process
/// (phonon absorption); the two obey `gamma_up = e^{-beta w'} gamma_down`.
/// The cross-dephasing pair is complex because its prefactors are the
/// squared drive amplitude, not its squared modulus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhononRates {
    /// Phonon-assisted decay rate, 1/ps.
    pub gamma_down: f64,
    /// Phonon-assisted excitation rate, 1/ps.
    pub gamma_up: f64,
    /// Cross-dephasing weight paired with `gamma_down`, 1/ps.
    pub gamma_cd_down: Complex64,
    /// Cross-dephasing weight paired with `gamma_up`, 1/ps.
    pub gamma_cd_up: Complex64,
    /// Polaron shift of the transition frequency, rad/ps.
    pub polaron_shift: f64,
}

impl PhononRates {
    fn vanishing(polaron_shift: f64) -> Self {
        PhononRates {
            gamma_down: 0.0,
            gamma_up: 0.0,
            gamma_cd_down: Complex64::ZERO,
            gamma_cd_up: Complex64::ZERO,
            polaron_shift,
        }
    }
}

impl PhononEnvironment {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.alpha_ps2 >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "phonon coupling alpha must be >= 0, got {}",
                self.alpha_ps2
            )));
        }
        if !(self.omega_c > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "phonon cutoff omega_c must be positive, got {}",
                self.omega_c
            )));
        }
        if !(self.temperature_k >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "temperature must be >= 0, got {}",
                self.temperature_k
            )));
        }
        Ok(())
    }

    /// Inverse thermal energy `hbar/(k_B T)` in ps; infinite at `T = 0`.
    pub fn beta_ps(&self) -> f64 {
        crate::beta_ps(self.temperature_k)
    }

    /// `J(w) = alpha w^3 exp(-w^2/w_c^2)`, rad/ps for `alpha` in ps^2.
    pub fn spectral_density(&self, omega: f64) -> Result<f64, Error> {
        if omega < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "spectral density is defined for omega >= 0, got {omega}"
            )));
        }
        Ok(self.alpha_ps2 * omega.powi(3) * (-omega * omega / (self.omega_c * self.omega_c)).exp())
    }

    /// `w coth(beta w/2)`, the thermally weighted mode occupation that
    /// multiplies `J/w^2` in every bath integral. Even and analytic in
    /// `w`; the small-argument series avoids the 0/0 at the origin.
    fn thermal_mode_weight(&self, omega: f64) -> f64 {
        let beta = self.beta_ps();
        if beta.is_infinite() {
            return omega;
        }
        let x = beta * omega;
        if x < 1e-4 {
            2.0 / beta + beta * omega * omega / 6.0
        } else {
            omega / (0.5 * x).tanh()
        }
    }

    /// Phonon propagator
    /// `phi(tau) = int_0^inf dw J/w^2 [coth(beta w/2) cos(w tau) - i sin(w tau)]`.
    ///
    /// Obeys `phi(-tau) = phi(tau)*` and decays to zero at large
    /// `|tau|`; `phi(0) = -2 ln<B>` is real.
    pub fn phi(&self, tau: f64) -> Result<Complex64, Error> {
        self.validate()?;
        if !tau.is_finite() {
            return Err(Error::InvalidParameter(format!("phi requires finite tau, got {tau}")));
        }
        if self.alpha_ps2 == 0.0 {
            return Ok(Complex64::ZERO);
        }
        let t = tau.abs();
        let value = if self.temperature_k == 0.0 {
            self.phi_zero_temperature(t)
        } else {
            self.phi_quadrature(t)?
        };
        Ok(if tau < 0.0 { value.conj() } else { value })
    }

    /// `T = 0` closed form. With `u = w_c tau/2`:
    /// `phi = alpha w_c^2 [ (1 - 2 u D(u))/2 - i (sqrt(pi)/2) u e^{-u^2} ]`
    /// where `D` is the Dawson integral. This is the Gaussian-cutoff
    /// moment `int_0^inf w e^{-w^2/w_c^2} e^{-i w tau} dw` evaluated
    /// exactly, bypassing the slowly decaying `-alpha/tau^2` tail that
    /// defeats truncated quadrature.
    fn phi_zero_temperature(&self, tau: f64) -> Complex64 {
        let u = 0.5 * self.omega_c * tau;
        let re = 0.5 * (1.0 - 2.0 * u * dawson(u));
        let im = -0.5 * std::f64::consts::PI.sqrt() * u * (-u * u).exp();
        self.alpha_ps2 * self.omega_c * self.omega_c * Complex64::new(re, im)
    }

    fn phi_quadrature(&self, tau: f64) -> Result<Complex64, Error> {
        let upper = 8.0 * self.omega_c;
        // budget grows with the number of oscillation periods in the window
        let cycles = upper * tau / (2.0 * std::f64::consts::PI);
        let budget = (512 + 6 * cycles as usize).min(60_000);
        let alpha = self.alpha_ps2;
        let wc2 = self.omega_c * self.omega_c;
        quad::integrate(
            |w| {
                let envelope = alpha * (-w * w / wc2).exp();
                let (s, c) = (w * tau).sin_cos();
                Complex64::new(envelope * self.thermal_mode_weight(w) * c, -envelope * w * s)
            },
            0.0,
            upper,
            PHI_ATOL,
            PHI_RTOL,
            budget,
            "phonon propagator",
        )
    }

    /// Franck-Condon factor `<B> = exp[-1/2 int_0^inf J/w^2 coth(beta w/2) dw]`,
    /// the thermal expectation of the phonon displacement; always in
    /// `(0, 1]` and equal to `exp(-alpha w_c^2/4)` at `T = 0`.
    pub fn franck_condon(&self) -> Result<f64, Error> {
        Ok((-0.5 * self.phi(0.0)?.re).exp())
    }

    /// Polaron shift `int_0^inf J(w)/w dw`, rad/ps; equals
    /// `alpha w_c^3 sqrt(pi)/4` for this spectral density.
    pub fn polaron_shift(&self) -> f64 {
        let alpha = self.alpha_ps2;
        let wc2 = self.omega_c * self.omega_c;
        // smooth Gaussian moment: 32 fixed panels reach machine precision
        quad::composite(
            |w| Complex64::new(alpha * w * w * (-w * w / wc2).exp(), 0.0),
            0.0,
            8.0 * self.omega_c,
            32,
        )
        .re
    }

    /// Truncation point for integrals over the propagator: starts at
    /// `60/w_c` and doubles until `e^phi` has relaxed to within
    /// [`TAIL_BOUND`] of one.
    pub fn correlation_window(&self) -> Result<f64, Error> {
        // the zero-temperature tail only falls off as alpha / tau^2, so
        // strong couplings need windows far beyond the thermal guess
        let mut tau_max = 60.0 / self.omega_c;
        let mut tail = f64::INFINITY;
        for _ in 0..14 {
            tail = (self.phi(tau_max)?.exp() - Complex64::ONE).norm();
            if tail < TAIL_BOUND {
                return Ok(tau_max);
            }
            tau_max *= 2.0;
        }
        Err(Error::QuadratureNonConvergence {
            context: "phonon correlation tail".to_string(),
            error: tail,
        })
    }

    /// Polaron scattering rates for drive amplitude `omega_pn`
    /// (already Franck-Condon renormalized) across the splitting
    /// `omega_prime`:
    ///
    /// * `gamma_down/up = (|omega_pn|^2/4) * 2 Re int_0^inf e^{+-i w' tau} (e^{phi} - 1) dtau`
    /// * `gamma_cd_down = (omega_pn*^2/4) * 2 Re int_0^inf cos(w' tau) (1 - e^{-phi}) dtau`
    ///   and `gamma_cd_up` with the conjugate prefactor.
    ///
    /// At `T = 0` phonon absorption is impossible and `gamma_up` is set
    /// to its exact detailed-balance limit of zero rather than left to a
    /// truncated oscillatory integral.
    pub fn phonon_rates(
        &self,
        omega_pn: Complex64,
        omega_prime: f64,
    ) -> Result<PhononRates, Error> {
        self.validate()?;
        if !omega_prime.is_finite() || !omega_pn.is_finite() {
            return Err(Error::InvalidParameter(
                "phonon rates require finite drive and splitting".to_string(),
            ));
        }
        let shift = self.polaron_shift();
        if self.alpha_ps2 == 0.0 || omega_pn == Complex64::ZERO {
            return Ok(PhononRates::vanishing(shift));
        }

        let tau_max = self.correlation_window()?;
        let cycles = omega_prime.abs() * tau_max / std::f64::consts::PI;
        let budget = (2_000 + 8 * cycles as usize).min(40_000);

        // phi() can fail inside the integrand closures, which must
        // return plain values; park the first error and rethrow after.
        let pending: RefCell<Option<Error>> = RefCell::new(None);
        let phi_or_zero = |tau: f64| match self.phi(tau) {
            Ok(p) => p,
            Err(e) => {
                pending.borrow_mut().get_or_insert(e);
                Complex64::ZERO
            }
        };
        let half_line = |f: &dyn Fn(f64) -> Complex64, context| -> Result<f64, Error> {
            let value = quad::integrate(f, 0.0, tau_max, 1e-13, 1e-9, budget, context)?;
            if let Some(e) = pending.borrow_mut().take() {
                return Err(e);
            }
            Ok(2.0 * value.re)
        };

        let (i_down, i_up, i_cd);
        if self.temperature_k == 0.0 {
            // the zero-temperature propagator only decays as 1/tau^2,
            // so truncating the plain integrand leaves an error as
            // large as 2 alpha / tau_max near resonance. Splitting off
            // the part linear in phi, whose half-line transform is the
            // one-phonon result 2 pi J(w') / w'^2 for w' > 0 and zero
            // otherwise, leaves a remainder decaying as 1/tau^4.
            let j_over_w2 =
                |w: f64| self.alpha_ps2 * w * (-w * w / (self.omega_c * self.omega_c)).exp();
            i_down = if omega_prime > 0.0 {
                let remainder = half_line(
                    &|tau| {
                        let phi = phi_or_zero(tau);
                        (Complex64::i() * omega_prime * tau).exp() * (phi.exp() - 1.0 - phi)
                    },
                    "phonon emission rate",
                )?;
                remainder + 2.0 * std::f64::consts::PI * j_over_w2(omega_prime)
            } else {
                // every multi-phonon term carries net emission, so the
                // rate has no spectral weight at or below the resonance
                0.0
            };
            i_up = 0.0;
            let remainder_cd = half_line(
                &|tau| {
                    let phi = phi_or_zero(tau);
                    (omega_prime * tau).cos() * (1.0 - (-phi).exp() - phi)
                },
                "cross-dephasing rate",
            )?;
            i_cd = remainder_cd + std::f64::consts::PI * j_over_w2(omega_prime.abs());
        } else {
            i_down = half_line(
                &|tau| {
                    (Complex64::i() * omega_prime * tau).exp() * ((phi_or_zero(tau)).exp() - 1.0)
                },
                "phonon emission rate",
            )?;
            i_up = half_line(
                &|tau| {
                    (-Complex64::i() * omega_prime * tau).exp() * ((phi_or_zero(tau)).exp() - 1.0)
                },
                "phonon absorption rate",
            )?;
            i_cd = half_line(
                &|tau| (omega_prime * tau).cos() * (1.0 - (-phi_or_zero(tau)).exp()),
                "cross-dephasing rate",
            )?;
        }

        let prefactor = 0.25 * omega_pn.norm_sqr();
        let floor = 1e-9 * prefactor * (i_down.abs() + i_up.abs() + i_cd.abs()).max(1.0);
        let clip = |raw: f64, name: &str| -> Result<f64, Error> {
            if raw >= 0.0 {
                Ok(raw)
            } else if raw > -floor {
                Ok(0.0)
            } else {
                Err(Error::InvalidRate(format!("{name} came out negative: {raw:.3e}")))
            }
        };
        let squared = omega_pn * omega_pn * 0.25;
        Ok(PhononRates {
            gamma_down: clip(prefactor * i_down, "gamma_down")?,
            gamma_up: clip(prefactor * i_up, "gamma_up")?,
            gamma_cd_down: squared.conj() * i_cd,
            gamma_cd_up: squared * i_cd,
            polaron_shift: shift,
        })
    }
}

/// Dawson integral `D(x) = e^{-x^2} int_0^x e^{t^2} dt`.
///
/// Maclaurin series below 0.2; elsewhere the sampling-theorem
/// representation `D(x) = (1/sqrt(pi)) sum_{n odd} e^{-(x - n h)^2}/n`,
/// whose discretization error is `O(e^{-(pi/2h)^2})`, far below double
/// precision at `h = 1/4`.
fn dawson(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 0.2 {
        let x2 = x * x;
        // D = sum_k (-2 x^2)^k x / (2k+1)!!
        let mut term = x;
        let mut sum = x;
        for k in 1..12 {
            term *= -2.0 * x2 / (2 * k + 1) as f64;
            sum += term;
        }
        return sum;
    }
    const H: f64 = 0.25;
    let nc = (ax / H).round() as i64;
    let mut n = nc - 31;
    if n % 2 == 0 {
        n += 1;
    }
    let mut sum = 0.0;
    while n <= nc + 31 {
        if n != 0 {
            let d = ax - n as f64 * H;
            sum += (-d * d).exp() / n as f64;
        }
        n += 2;
    }
    let value = sum / std::f64::consts::PI.sqrt();
    if x < 0.0 {
        -value
    } else {
        value
    }
}

/// Memoized phonon propagator on a uniform grid, for dressing long
/// correlation series without re-running quadrature per sample.
///
/// Values are stored until `|phi|` stays negligible for a stretch of
/// nodes (or `n` values have been stored); lookups past the stored range
/// return zero, which is exact to the truncation tolerance.
#[derive(Debug, Clone)]
pub struct PhiTable {
    dtau: f64,
    values: Vec<Complex64>,
}

impl PhiTable {
    pub fn build(env: &PhononEnvironment, dtau: f64, n: usize) -> Result<Self, Error> {
        if !(dtau > 0.0) {
            return Err(Error::InvalidParameter(format!("PhiTable requires dtau > 0, got {dtau}")));
        }
        let mut values = Vec::new();
        let mut quiet_run = 0usize;
        for k in 0..n {
            let value = env.phi(k as f64 * dtau)?;
            values.push(value);
            quiet_run = if value.norm() < 1e-12 { quiet_run + 1 } else { 0 };
            if quiet_run >= 16 {
                break;
            }
        }
        Ok(PhiTable { dtau, values })
    }

    pub fn dtau(&self) -> f64 {
        self.dtau
    }

    /// Number of explicitly stored nodes.
    pub fn stored_len(&self) -> usize {
        self.values.len()
    }

    /// `phi(k dtau)`; zero beyond the stored range.
    pub fn value(&self, k: usize) -> Complex64 {
        self.values.get(k).copied().unwrap_or(Complex64::ZERO)
    }
}
