//! Steady state of a Lindblad generator via singular-value decomposition.
//!
//! The stationary state spans the kernel of the vectorized generator. An
//! SVD exposes that kernel without iteration: the right singular vector
//! of the smallest singular value is reshaped into a matrix, symmetrized
//! and trace-normalized. A one-dimensional kernel is required; driven
//! dissipative models have one, while purely unitary generators or
//! models with decoupled blocks do not, and are reported as degenerate.

use crate::error::Error;
use crate::operator::{hermitize, CVec, DensityMatrix};
use crate::superop::{unvec, vec_col, Superoperator};

/// Singular values below `max_sv * KERNEL_REL_TOL` count as zero when
/// deciding the kernel dimension.
const KERNEL_REL_TOL: f64 = 1e-9;

/// Residual bound `||L vec(rho_ss)||` the returned state must satisfy.
const RESIDUAL_BOUND: f64 = 1e-12;

/// Compute the unique steady state of `sup`.
pub fn steady_state(sup: &Superoperator) -> Result<DensityMatrix, Error> {
    let svd = sup.matrix().clone().svd(false, true);
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let n = svd.singular_values.len();

    let max_sv = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let tol = max_sv * KERNEL_REL_TOL;
    let kernel_dim = svd.singular_values.iter().filter(|&&s| s <= tol).count();
    if kernel_dim != 1 {
        return Err(Error::DegenerateKernel { dim: kernel_dim });
    }

    let min_idx = (0..n)
        .min_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]))
        .expect("non-empty singular values");
    // right singular vector = conjugated row of V^H
    let kernel_vec: CVec = v_t.row(min_idx).adjoint();

    let rho_raw = unvec(&kernel_vec, sup.dim());
    let rho_herm = hermitize(&rho_raw);
    let trace = rho_herm.trace();
    if trace.norm() < 1e-10 * rho_herm.norm() {
        // a traceless kernel vector cannot be normalized into a state
        return Err(Error::DegenerateKernel { dim: kernel_dim });
    }
    let rho = rho_herm / trace;

    let residual = (sup.matrix() * vec_col(&rho)).norm();
    if residual > RESIDUAL_BOUND {
        return Err(Error::SteadyStateResidual { residual, bound: RESIDUAL_BOUND });
    }
    DensityMatrix::new(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::{evolve, SolverOptions};
    use crate::operator::{sigma_minus, sigma_plus, CMat};
    use crate::superop::{assemble_liouvillian, Channel};
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    fn driven_tls(w: f64, delta: f64, gamma: f64) -> Superoperator {
        let mut h = CMat::zeros(2, 2);
        h[(1, 1)] = Complex64::new(delta, 0.0);
        h[(0, 1)] = Complex64::new(w / 2.0, 0.0);
        h[(1, 0)] = Complex64::new(w / 2.0, 0.0);
        assemble_liouvillian(&h, &[Channel::lindblad(sigma_minus(), gamma, "decay")]).unwrap()
    }

    #[test]
    fn test_resonant_excited_population() {
        let (w, gamma) = (0.02, 0.001);
        let rho = steady_state(&driven_tls(w, 0.0, gamma)).unwrap();
        let expected = (w * w / 4.0) / (w * w / 2.0 + gamma * gamma / 4.0);
        assert_relative_eq!(rho.population(1), expected, max_relative = 1e-10);
    }

    #[test]
    fn test_detuned_excited_population() {
        let (w, delta, gamma) = (0.05, 0.02, 0.004);
        let rho = steady_state(&driven_tls(w, delta, gamma)).unwrap();
        let expected = (w * w / 4.0) / (delta * delta + w * w / 2.0 + gamma * gamma / 4.0);
        assert_relative_eq!(rho.population(1), expected, max_relative = 1e-9);
    }

    #[test]
    fn test_thermal_balance_two_rates() {
        // decay gamma_d and excitation gamma_u without drive settle at
        // populations gamma_u/(gamma_u+gamma_d)
        let (gd, gu) = (0.3, 0.12);
        let sup = assemble_liouvillian(
            &CMat::zeros(2, 2),
            &[
                Channel::lindblad(sigma_minus(), gd, "down"),
                Channel::lindblad(sigma_plus(), gu, "up"),
            ],
        )
        .unwrap();
        let rho = steady_state(&sup).unwrap();
        assert_relative_eq!(rho.population(1), gu / (gu + gd), max_relative = 1e-12);
    }

    #[test]
    fn test_unitary_generator_degenerate() {
        let mut h = CMat::zeros(2, 2);
        h[(1, 1)] = Complex64::new(1.0, 0.0);
        let sup = assemble_liouvillian(&h, &[]).unwrap();
        match steady_state(&sup) {
            Err(Error::DegenerateKernel { dim }) => assert!(dim >= 2, "kernel dim {dim}"),
            other => panic!("expected degenerate kernel, got {other:?}"),
        }
    }

    #[test]
    fn test_agrees_with_long_time_evolution() {
        let (w, gamma) = (0.02, 0.001);
        let sup = driven_tls(w, 0.005, gamma);
        let rho_ss = steady_state(&sup).unwrap();
        let rho0 = DensityMatrix::pure(2, 0);
        let t_end = 50.0 / gamma;
        let tight = SolverOptions { atol: 1e-13, rtol: 1e-11, ..SolverOptions::default() };
        let traj = evolve(&sup, &rho0, &[0.0, t_end], tight).unwrap();
        let dev = (traj.states[1].matrix() - rho_ss.matrix()).norm();
        assert!(dev < 1e-8, "deviation {dev:.3e}");
    }
}
