//! Liouvillian assembly by column-stacking vectorization.
//!
//! With `vec` stacking matrix columns, `vec(A rho B) = (B^T kron A)
//! vec(rho)`, so the master equation `drho/dt = -i[H, rho] + sum_k D_k(rho)`
//! becomes a single dense matrix acting on `vec(rho)`.
//!
//! Two dissipator shapes appear:
//!
//! * the Lindblad form `L[C] rho = C rho C^dag - {C^dag C, rho}/2`, used
//!   for radiative decay and phonon-assisted up/down scattering;
//! * the cross form `L_x[C] rho = C rho C - {C^2, rho}/2`, which carries
//!   the phonon cross-dephasing terms. Its prefactor may be complex, and
//!   such channels must come in adjoint pairs (`C`, weight `w` together
//!   with `C^dag`, weight `conj(w)`) for the generator to preserve
//!   Hermiticity.

use num_complex::Complex64;

use crate::error::Error;
use crate::operator::{identity, CMat, CVec};

/// Dissipator shape of one channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    /// `w (C rho C^dag - {C^dag C, rho}/2)`, `w` real nonnegative.
    Lindblad,
    /// `w (C rho C - {C^2, rho}/2)`, `w` complex.
    CrossDephasing,
}

/// One dissipation channel: operator, prefactor and shape.
#[derive(Debug, Clone)]
pub struct Channel {
    pub operator: CMat,
    pub weight: Complex64,
    pub kind: ChannelKind,
    pub label: String,
}

impl Channel {
    pub fn lindblad(operator: CMat, rate: f64, label: impl Into<String>) -> Self {
        Self {
            operator,
            weight: Complex64::new(rate, 0.0),
            kind: ChannelKind::Lindblad,
            label: label.into(),
        }
    }

    pub fn cross_dephasing(operator: CMat, weight: Complex64, label: impl Into<String>) -> Self {
        Self { operator, weight, kind: ChannelKind::CrossDephasing, label: label.into() }
    }
}

/// Stack the columns of `m` into a vector.
pub fn vec_col(m: &CMat) -> CVec {
    CVec::from_column_slice(m.as_slice())
}

/// Inverse of [`vec_col`] for a `dim x dim` matrix.
pub fn unvec(v: &CVec, dim: usize) -> CMat {
    CMat::from_column_slice(dim, dim, v.as_slice())
}

/// The vectorized generator of a Lindblad master equation.
#[derive(Debug, Clone)]
pub struct Superoperator {
    mat: CMat,
    dim: usize,
}

impl Superoperator {
    pub(crate) fn from_parts(mat: CMat, dim: usize) -> Self {
        Self { mat, dim }
    }

    /// Generator matrix, `dim^2 x dim^2`.
    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    /// Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Apply to a (not necessarily physical) operator.
    pub fn apply(&self, x: &CMat) -> CMat {
        unvec(&(&self.mat * vec_col(x)), self.dim)
    }
}

/// `-i (I kron H - H^T kron I)`.
fn hamiltonian_part(h: &CMat) -> CMat {
    let dim = h.nrows();
    let id = identity(dim);
    let m = id.kronecker(h) - h.transpose().kronecker(&id);
    m * Complex64::new(0.0, -1.0)
}

/// Vectorized `L[C]` (without its rate).
fn lindblad_part(c: &CMat) -> CMat {
    let dim = c.nrows();
    let id = identity(dim);
    let cdc = c.adjoint() * c;
    c.conjugate().kronecker(c)
        - (id.kronecker(&cdc) + cdc.transpose().kronecker(&id)) * Complex64::new(0.5, 0.0)
}

/// Vectorized `L_x[C]` (without its weight).
fn cross_dephasing_part(c: &CMat) -> CMat {
    let dim = c.nrows();
    let id = identity(dim);
    let c2 = c * c;
    c.transpose().kronecker(c)
        - (id.kronecker(&c2) + c2.transpose().kronecker(&id)) * Complex64::new(0.5, 0.0)
}

/// Assemble the full generator `-i[H, .] + sum_k w_k D_k`.
///
/// `H` must be Hermitian and every channel operator must match its
/// dimension. Lindblad weights must be real and nonnegative.
pub fn assemble_liouvillian(h: &CMat, channels: &[Channel]) -> Result<Superoperator, Error> {
    let dim = h.nrows();
    if h.ncols() != dim {
        return Err(Error::DimensionMismatch(format!(
            "Hamiltonian must be square, got {}x{}",
            dim,
            h.ncols()
        )));
    }
    let herm = crate::operator::hermiticity_defect(h);
    if herm > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "Hamiltonian is not Hermitian (defect {herm:.3e})"
        )));
    }

    let mut mat = hamiltonian_part(h);
    for ch in channels {
        if ch.operator.nrows() != dim || ch.operator.ncols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "channel '{}' is {}x{}, expected {dim}x{dim}",
                ch.label,
                ch.operator.nrows(),
                ch.operator.ncols()
            )));
        }
        if !ch.weight.re.is_finite() || !ch.weight.im.is_finite() {
            return Err(Error::InvalidRate(format!("channel '{}' weight is not finite", ch.label)));
        }
        match ch.kind {
            ChannelKind::Lindblad => {
                if ch.weight.im != 0.0 || ch.weight.re < 0.0 {
                    return Err(Error::InvalidRate(format!(
                        "Lindblad channel '{}' needs a real nonnegative rate, got {}",
                        ch.label, ch.weight
                    )));
                }
                mat += lindblad_part(&ch.operator) * ch.weight;
            }
            ChannelKind::CrossDephasing => {
                mat += cross_dephasing_part(&ch.operator) * ch.weight;
            }
        }
    }
    Ok(Superoperator { mat, dim })
}
