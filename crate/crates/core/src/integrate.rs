//! Time propagation of the vectorized master equation.
//!
//! The default integrator is an adaptive Dormand-Prince 5(4) pair with
//! the first-same-as-last optimization, controlling a scaled RMS error
//! against `atol`/`rtol`. A matrix-exponential stepper is available as a
//! cross-check and as the fast path for long uniform grids (one `exp(L
//! dt)` reused across the whole grid).

use num_complex::Complex64;

use crate::error::Error;
use crate::operator::{CMat, CVec, DensityMatrix};
use crate::superop::{unvec, vec_col, Superoperator};

/// Integrator tolerances and budget.
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Absolute tolerance per component.
    pub atol: f64,
    /// Relative tolerance per component.
    pub rtol: f64,
    /// Hard cap on accepted + rejected steps per call.
    pub max_steps: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { atol: 1e-10, rtol: 1e-8, max_steps: 20_000_000 }
    }
}

/// Counters from one propagation call.
#[derive(Debug, Clone, Copy, Default)]
pub struct SolverStats {
    pub steps_accepted: usize,
    pub steps_rejected: usize,
    /// Sampled states whose smallest eigenvalue fell in the tolerated
    /// negative window (clipped in reporting only).
    pub clip_events: usize,
}

/// Sampled solution of a master equation.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub stats: SolverStats,
}

impl Trajectory {
    /// Population of basis state `i` over time, unclipped.
    pub fn population_series(&self, i: usize) -> Vec<f64> {
        self.states.iter().map(|s| s.population(i)).collect()
    }

    /// `<op>(t)` over the trajectory.
    pub fn expectation_series(&self, op: &CMat) -> Vec<Complex64> {
        self.states.iter().map(|s| s.expectation(op)).collect()
    }
}

/// Dormand-Prince coefficients.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];

/// Fifth-order solution weights (row 7 of the tableau; FSAL).
const B: [f64; 7] =
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];

/// Error weights `b5 - b4`.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct Rk45<'a> {
    gen: &'a CMat,
    opts: SolverOptions,
    stats: SolverStats,
    k: [CVec; 7],
    h: f64,
}

impl<'a> Rk45<'a> {
    fn new(gen: &'a CMat, y0: &CVec, opts: SolverOptions) -> Self {
        let n = y0.len();
        let f0 = gen * y0;
        // conservative first step from the initial slope
        let scale = |v: &CVec, r: &CVec| -> f64 {
            (v.iter()
                .zip(r.iter())
                .map(|(x, y)| {
                    let sc = opts.atol + opts.rtol * y.norm();
                    (x.norm() / sc).powi(2)
                })
                .sum::<f64>()
                / n as f64)
                .sqrt()
        };
        let d0 = scale(y0, y0);
        let d1 = scale(&f0, y0);
        let h = if d1 > 1e-10 { 0.01 * d0 / d1 } else { 1e-3 }.clamp(1e-8, 1.0);
        let k = [
            f0,
            CVec::zeros(n),
            CVec::zeros(n),
            CVec::zeros(n),
            CVec::zeros(n),
            CVec::zeros(n),
            CVec::zeros(n),
        ];
        Self { gen, opts, stats: SolverStats::default(), k, h }
    }

    /// Advance `y` from `t` to exactly `t_end`.
    fn advance(&mut self, y: &mut CVec, t: &mut f64, t_end: f64) -> Result<(), Error> {
        let n = y.len();
        while *t < t_end {
            if self.stats.steps_accepted + self.stats.steps_rejected > self.opts.max_steps {
                return Err(Error::StepSizeUnderflow { t: *t, h: self.h });
            }
            let h = self.h.min(t_end - *t);
            if h < f64::EPSILON * 16.0 * t_end.abs().max(1.0) {
                return Err(Error::StepSizeUnderflow { t: *t, h });
            }

            for s in 1..7 {
                let mut ys = y.clone();
                for (j, a) in A[s - 1].iter().enumerate().take(s) {
                    if *a != 0.0 {
                        ys.axpy(Complex64::new(h * a, 0.0), &self.k[j], Complex64::ONE);
                    }
                }
                self.k[s] = self.gen * ys;
            }

            let mut ynew = y.clone();
            for (j, b) in B.iter().enumerate() {
                if *b != 0.0 {
                    ynew.axpy(Complex64::new(h * b, 0.0), &self.k[j], Complex64::ONE);
                }
            }
            let mut err_vec = CVec::zeros(n);
            for (j, e) in E.iter().enumerate() {
                if *e != 0.0 {
                    err_vec.axpy(Complex64::new(h * e, 0.0), &self.k[j], Complex64::ONE);
                }
            }
            let err = (err_vec
                .iter()
                .zip(y.iter().zip(ynew.iter()))
                .map(|(e, (a, b))| {
                    let sc = self.opts.atol + self.opts.rtol * a.norm().max(b.norm());
                    (e.norm() / sc).powi(2)
                })
                .sum::<f64>()
                / n as f64)
                .sqrt();

            if err <= 1.0 {
                *t += h;
                *y = ynew;
                self.k[0] = self.k[6].clone(); // first-same-as-last
                self.stats.steps_accepted += 1;
                let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                self.h = h * factor;
            } else {
                self.stats.steps_rejected += 1;
                self.h = h * (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            }
        }
        Ok(())
    }
}

fn check_times(times: &[f64]) -> Result<(), Error> {
    if times.is_empty() {
        return Err(Error::InvalidParameter("empty time grid".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("time grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Propagate an arbitrary operator `x0` (no state invariants enforced)
/// through `exp(L (t - times[0]))`, sampling at `times`.
///
/// This is the workhorse for two-time correlations, where the propagated
/// object `B rho_ss` is not a density matrix.
pub fn propagate_raw(
    sup: &Superoperator,
    x0: &CMat,
    times: &[f64],
    opts: SolverOptions,
) -> Result<(Vec<CMat>, SolverStats), Error> {
    check_times(times)?;
    let mut y = vec_col(x0);
    let mut rk = Rk45::new(sup.matrix(), &y, opts);
    let mut t = times[0];
    let mut out = Vec::with_capacity(times.len());
    out.push(x0.clone());
    for &t_next in &times[1..] {
        rk.advance(&mut y, &mut t, t_next)?;
        out.push(unvec(&y, sup.dim()));
    }
    Ok((out, rk.stats))
}

/// Solve the master equation from `rho0` (taken at `times[0]`), sampling
/// at `times` and validating every sampled state.
pub fn evolve(
    sup: &Superoperator,
    rho0: &DensityMatrix,
    times: &[f64],
    opts: SolverOptions,
) -> Result<Trajectory, Error> {
    if rho0.dim() != sup.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dim {} vs generator dim {}",
            rho0.dim(),
            sup.dim()
        )));
    }
    let (raw, mut stats) = propagate_raw(sup, rho0.matrix(), times, opts)?;
    let mut states = Vec::with_capacity(raw.len());
    for (m, &t) in raw.into_iter().zip(times.iter()) {
        let state = DensityMatrix::new_at(m, t)?;
        if state.needs_clip() {
            stats.clip_events += 1;
        }
        states.push(state);
    }
    Ok(Trajectory { times: times.to_vec(), states, stats })
}

/// As [`evolve`], but stepping with one matrix exponential per grid
/// spacing. The grid must be uniform; `exp(L dt)` is computed once.
pub fn evolve_expm(
    sup: &Superoperator,
    rho0: &DensityMatrix,
    times: &[f64],
) -> Result<Trajectory, Error> {
    check_times(times)?;
    if rho0.dim() != sup.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dim {} vs generator dim {}",
            rho0.dim(),
            sup.dim()
        )));
    }
    let dt = times[1] - times[0];
    if times.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > 1e-9 * dt) {
        return Err(Error::InvalidParameter(
            "matrix-exponential stepping needs a uniform grid".into(),
        ));
    }
    let prop = (sup.matrix() * Complex64::new(dt, 0.0)).exp();

    let mut stats = SolverStats::default();
    let mut y = vec_col(rho0.matrix());
    let mut states = Vec::with_capacity(times.len());
    states.push(rho0.clone());
    for &t in &times[1..] {
        y = &prop * y;
        stats.steps_accepted += 1;
        let state = DensityMatrix::new_at(unvec(&y, sup.dim()), t)?;
        if state.needs_clip() {
            stats.clip_events += 1;
        }
        states.push(state);
    }
    Ok(Trajectory { times: times.to_vec(), states, stats })
}


impl Superoperator {
    /// Construct from a raw generator matrix, bypassing assembly checks.
    /// Only for tests that need a deliberately unphysical generator.
    #[doc(hidden)]
    pub fn test_only_from_matrix(mat: CMat, dim: usize) -> Self {
        Self::from_parts(mat, dim)
    }
}
