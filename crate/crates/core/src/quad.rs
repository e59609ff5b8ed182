//! Adaptive Gauss-Kronrod quadrature for complex-valued integrands of a
//! real variable.
//!
//! A 7-point Gauss / 15-point Kronrod pair is applied per interval; the
//! interval with the largest error estimate is bisected until the summed
//! estimate meets the requested tolerance. Both the bath propagator
//! integrals over frequency and the scattering-rate integrals over time
//! go through this one routine.

use num_complex::Complex64;

use crate::error::Error;

/// Kronrod abscissae on `[-1, 1]` (positive half; the rule is symmetric).
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.000000000000000,
];

/// Kronrod weights matching [`XGK`].
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];

/// Gauss weights for the embedded 7-point rule (odd-index abscissae).
const WG: [f64; 4] = [0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469];

/// One 15-point Kronrod evaluation over `[a, b]`.
///
/// Returns `(integral, error_estimate)` with the usual QUADPACK error
/// rescaling, which sharpens the raw `|K15 - G7|` difference.
fn qk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center);
    let mut resg = WG[3] * fc;
    let mut resk = WGK[7] * fc;
    let mut resabs = WGK[7] * fc.norm();
    let mut fv = [Complex64::ZERO; 15];
    fv[7] = fc;

    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[j] = f1;
        fv[14 - j] = f2;
        let fsum = f1 + f2;
        if j % 2 == 1 {
            resg += WG[j / 2] * fsum;
        }
        resk += WGK[j] * fsum;
        resabs += WGK[j] * (f1.norm() + f2.norm());
    }

    let mean = resk * 0.5;
    let mut resasc = WGK[7] * (fc - mean).norm();
    for j in 0..7 {
        resasc += WGK[j] * ((fv[j] - mean).norm() + (fv[14 - j] - mean).norm());
    }

    let integral = resk * half;
    resabs *= half.abs();
    resasc *= half.abs();
    let mut err = ((resk - resg) * half).norm();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (integral, err)
}

struct Interval {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

/// Integrate `f` over `[a, b]` to absolute tolerance `atol` or relative
/// tolerance `rtol`, whichever is weaker, bisecting at most
/// `max_intervals` times. `context` labels the integral in errors.
pub fn integrate<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    atol: f64,
    rtol: f64,
    max_intervals: usize,
    context: &str,
) -> Result<Complex64, Error> {
    let (value, error) = qk15(&f, a, b);
    let mut intervals = vec![Interval { a, b, value, error }];

    loop {
        let total: Complex64 = intervals.iter().map(|s| s.value).sum();
        let err: f64 = intervals.iter().map(|s| s.error).sum();
        if err <= atol.max(rtol * total.norm()) {
            return Ok(total);
        }
        if intervals.len() >= max_intervals {
            return Err(Error::QuadratureNonConvergence {
                context: context.to_string(),
                error: err,
            });
        }

        let worst = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .expect("non-empty interval list");
        let Interval { a, b, .. } = intervals.swap_remove(worst);
        let mid = 0.5 * (a + b);
        for (lo, hi) in [(a, mid), (mid, b)] {
            let (value, error) = qk15(&f, lo, hi);
            intervals.push(Interval { a: lo, b: hi, value, error });
        }
    }
}

/// Fixed composite rule: `panels` equal Kronrod panels over `[a, b]`,
/// no adaptivity and no error path. Reserved for smooth single-signed
/// integrands where the panel count is chosen with ample margin.
pub(crate) fn composite<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, panels: usize) -> Complex64 {
    let width = (b - a) / panels as f64;
    (0..panels).map(|k| qk15(&f, a + k as f64 * width, a + (k + 1) as f64 * width).0).sum()
}

/// Real-valued convenience wrapper around [`integrate`].
pub fn integrate_real<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    atol: f64,
    rtol: f64,
    max_intervals: usize,
    context: &str,
) -> Result<f64, Error> {
    integrate(|x| Complex64::new(f(x), 0.0), a, b, atol, rtol, max_intervals, context).map(|v| v.re)
}
