//! Dense complex operators and validated density matrices.
//!
//! Systems here are small (two- and four-level), so everything is a dense
//! `nalgebra` matrix. The [`DensityMatrix`] wrapper enforces the state
//! invariants (unit trace, Hermiticity, positivity up to a tolerated
//! numerical floor) at construction time.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::Error;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Deviation from unit trace beyond which a state is rejected.
pub const TRACE_TOL: f64 = 1e-10;
/// Deviation from Hermiticity beyond which a state is rejected.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Eigenvalues above this floor are clean numerical noise.
pub const EIG_CLEAN_FLOOR: f64 = -1e-9;
/// Eigenvalues between [`EIG_CLEAN_FLOOR`] and this are tolerated and
/// clipped in reporting; anything below is a hard error.
pub const EIG_HARD_FLOOR: f64 = -1e-7;

/// `|i><j|` in a `dim`-dimensional space.
pub fn ketbra(dim: usize, i: usize, j: usize) -> CMat {
    let mut m = CMat::zeros(dim, dim);
    m[(i, j)] = Complex64::ONE;
    m
}

/// Identity operator.
pub fn identity(dim: usize) -> CMat {
    CMat::identity(dim, dim)
}

/// Two-level lowering operator `|0><X|` in the basis `{|0>, |X>}`.
pub fn sigma_minus() -> CMat {
    ketbra(2, 0, 1)
}

/// Two-level raising operator `|X><0|`.
pub fn sigma_plus() -> CMat {
    ketbra(2, 1, 0)
}

/// `[a, b]`.
pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

/// `{a, b}`.
pub fn anti_commutator(a: &CMat, b: &CMat) -> CMat {
    a * b + b * a
}

/// Symmetrize away the anti-Hermitian part: `(m + m^dagger)/2`.
pub fn hermitize(m: &CMat) -> CMat {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Largest absolute element of `m - m^dagger`.
pub fn hermiticity_defect(m: &CMat) -> f64 {
    let d = m - m.adjoint();
    d.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigenvalues of a Hermitian (or nearly Hermitian) matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let mut evs: Vec<f64> = hermitize(m).symmetric_eigen().eigenvalues.iter().copied().collect();
    evs.sort_by(f64::total_cmp);
    evs
}

/// A density matrix whose invariants were checked on construction.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    mat: CMat,
}

impl DensityMatrix {
    /// Validate `mat` and wrap it. `t` only labels error diagnostics.
    pub fn new(mat: CMat) -> Result<Self, Error> {
        Self::new_at(mat, 0.0)
    }

    /// As [`DensityMatrix::new`], tagging violations with the time `t` at
    /// which the state was produced.
    pub fn new_at(mat: CMat, t: f64) -> Result<Self, Error> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "density matrix must be square, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let trace_dev = (mat.trace() - Complex64::ONE).norm();
        if trace_dev > TRACE_TOL {
            return Err(Error::InvariantViolation {
                t,
                which: "trace deviation",
                value: trace_dev,
            });
        }
        let herm = hermiticity_defect(&mat);
        if herm > HERMITICITY_TOL {
            return Err(Error::InvariantViolation { t, which: "hermiticity defect", value: herm });
        }
        let min_eig = hermitian_eigenvalues(&mat)[0];
        if min_eig < EIG_HARD_FLOOR {
            return Err(Error::InvariantViolation { t, which: "min eigenvalue", value: min_eig });
        }
        Ok(Self { mat })
    }

    /// Pure state `|i><i|`.
    pub fn pure(dim: usize, i: usize) -> Self {
        Self { mat: ketbra(dim, i, i) }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn into_matrix(self) -> CMat {
        self.mat
    }

    /// Smallest eigenvalue; slightly negative values are solver noise.
    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.mat)[0]
    }

    /// True if the state needed clipping for reporting, i.e. its smallest
    /// eigenvalue sits in the tolerated negative window.
    pub fn needs_clip(&self) -> bool {
        self.min_eigenvalue() < EIG_CLEAN_FLOOR
    }

    /// Diagonal populations with tiny negative noise clipped to zero.
    /// Clipping happens here only; the stored state is untouched.
    pub fn populations_clipped(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.mat[(i, i)].re.max(0.0)).collect()
    }

    pub fn population(&self, i: usize) -> f64 {
        self.mat[(i, i)].re
    }

    /// `<op>` = Tr(op rho).
    pub fn expectation(&self, op: &CMat) -> Complex64 {
        (op * &self.mat).trace()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn test_sigma_algebra() {
        let sm = sigma_minus();
        let sp = sigma_plus();
        assert_eq!(sp, sm.adjoint());
        // sigma_+ sigma_- = |X><X|
        assert_eq!(&sp * &sm, ketbra(2, 1, 1));
        // {sigma_+, sigma_-} = 1
        assert_eq!(anti_commutator(&sp, &sm), identity(2));
    }

    #[test]
    fn test_commutator_antisymmetry() {
        let a = CMat::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.0, 1.0),
                Complex64::new(0.5, 0.0),
                Complex64::new(0.5, 0.0),
                Complex64::new(1.0, 0.0),
            ],
        );
        let b = ketbra(2, 0, 1);
        let c = commutator(&a, &b) + commutator(&b, &a);
        assert!(c.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn test_density_matrix_accepts_mixed_state() {
        let mut m = CMat::zeros(2, 2);
        m[(0, 0)] = Complex64::new(0.25, 0.0);
        m[(1, 1)] = Complex64::new(0.75, 0.0);
        m[(0, 1)] = Complex64::new(0.1, 0.2);
        m[(1, 0)] = Complex64::new(0.1, -0.2);
        let rho = DensityMatrix::new(m).unwrap();
        assert_relative_eq!(rho.population(1), 0.75);
        assert!(!rho.needs_clip());
    }

    #[test]
    fn test_density_matrix_rejects_bad_trace() {
        let m = identity(2);
        match DensityMatrix::new(m) {
            Err(Error::InvariantViolation { which, .. }) => assert_eq!(which, "trace deviation"),
            other => panic!("expected trace violation, got {other:?}"),
        }
    }

    #[test]
    fn test_density_matrix_rejects_non_hermitian() {
        let mut m = CMat::zeros(2, 2);
        m[(0, 0)] = Complex64::ONE;
        m[(0, 1)] = Complex64::new(0.1, 0.0);
        match DensityMatrix::new(m) {
            Err(Error::InvariantViolation { which, .. }) => assert_eq!(which, "hermiticity defect"),
            other => panic!("expected hermiticity violation, got {other:?}"),
        }
    }

    #[test]
    fn test_density_matrix_rejects_negative_eigenvalue() {
        let mut m = CMat::zeros(2, 2);
        m[(0, 0)] = Complex64::new(1.001, 0.0);
        m[(1, 1)] = Complex64::new(-0.001, 0.0);
        match DensityMatrix::new(m) {
            Err(Error::InvariantViolation { which, .. }) => assert_eq!(which, "min eigenvalue"),
            other => panic!("expected eigenvalue violation, got {other:?}"),
        }
    }

    #[test]
    fn test_clip_window_tolerated_and_reported() {
        let mut m = CMat::zeros(2, 2);
        let eps = 5e-8;
        m[(0, 0)] = Complex64::new(1.0 + eps, 0.0);
        m[(1, 1)] = Complex64::new(-eps, 0.0);
        let rho = DensityMatrix::new(m).unwrap();
        assert!(rho.needs_clip());
        assert_eq!(rho.populations_clipped()[1], 0.0);
        // the raw state keeps the tiny negative population
        assert!(rho.population(1) < 0.0);
    }
}
