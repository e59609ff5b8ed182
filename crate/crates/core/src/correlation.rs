//! Two-time correlation functions by the quantum regression theorem.
//!
//! For a stationary state `rho_ss` of the generator `L`,
//! `<A(tau) B(0)> = Tr[A e^{L tau}(B rho_ss)]`. The propagated object
//! `B rho_ss` is not a density matrix, so it runs through the unchecked
//! propagator. Uniform grids use matrix-exponential stepping (one
//! `exp(L dtau)` for the whole series); irregular grids fall back to the
//! adaptive integrator.

use num_complex::Complex64;

use crate::error::Error;
use crate::integrate::{propagate_raw, SolverOptions};
use crate::operator::{CMat, DensityMatrix};
use crate::superop::{unvec, vec_col, Superoperator};

pub(crate) fn is_uniform(times: &[f64]) -> bool {
    if times.len() < 3 {
        return true;
    }
    let dt = times[1] - times[0];
    times.windows(2).all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-9 * dt.abs())
}

/// `<a(tau) b(0)>` over the grid `taus` (which must start at 0 and be
/// strictly increasing).
pub fn two_time_correlation(
    sup: &Superoperator,
    rho_ss: &DensityMatrix,
    a: &CMat,
    b: &CMat,
    taus: &[f64],
    opts: SolverOptions,
) -> Result<Vec<Complex64>, Error> {
    if taus.first().copied() != Some(0.0) {
        return Err(Error::InvalidParameter("correlation grid must start at tau = 0".into()));
    }
    let dim = sup.dim();
    if a.nrows() != dim || b.nrows() != dim {
        return Err(Error::DimensionMismatch(format!(
            "observable dims {}/{} vs generator dim {}",
            a.nrows(),
            b.nrows(),
            dim
        )));
    }

    let x0 = b * rho_ss.matrix();
    if is_uniform(taus) {
        let dt = if taus.len() > 1 { taus[1] - taus[0] } else { 0.0 };
        let prop = (sup.matrix() * Complex64::new(dt, 0.0)).exp();
        let mut y = vec_col(&x0);
        let mut out = Vec::with_capacity(taus.len());
        out.push((a * &x0).trace());
        for _ in 1..taus.len() {
            y = &prop * y;
            out.push((a * unvec(&y, dim)).trace());
        }
        Ok(out)
    } else {
        let (xs, _) = propagate_raw(sup, &x0, taus, opts)?;
        Ok(xs.iter().map(|x| (a * x).trace()).collect())
    }
}
