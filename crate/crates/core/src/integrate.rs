//! Adaptive integration of the linear amplitude equations i dpsi/dt = H psi.
//!
//! Embedded Dormand-Prince 5(4) pair with step-size control. The local error
//! budget per step is `tol * h / t_end`, so the accumulated error at `t_end`
//! stays near `tol` and the endpoint agrees with the matrix-exponential route
//! well inside the documented `10 * tol` bound. Used as the independent
//! cross-check of `expm`; the dynamics engine itself evolves with `expm`.

use crate::error::{Error, Result};
use crate::operator::{AmplitudeState, Operator, C64};

/// Default local tolerance for the embedded pair.
pub const DEFAULT_TOL: f64 = 1e-10;

const MAX_STEPS: usize = 10_000_000;

// Dormand-Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
// 5th-order weights (also the last stage row; first-same-as-last pair)
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// difference between 5th- and 4th-order weights, for the error estimate
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

type Vec3 = [C64; 3];

#[inline]
fn rhs(h: &Operator, y: &Vec3, dim: usize) -> Vec3 {
    // dpsi/dt = -i H psi
    let mi = C64::new(0.0, -1.0);
    let mut out = [C64::new(0.0, 0.0); 3];
    for (i, slot) in out.iter_mut().enumerate().take(dim) {
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..dim {
            acc += h.get(i, j) * y[j];
        }
        *slot = mi * acc;
    }
    out
}

#[inline]
fn combine(dim: usize, y: &Vec3, h: f64, terms: &[(f64, &Vec3)]) -> Vec3 {
    let mut out = *y;
    for &(w, k) in terms {
        let wh = C64::new(w * h, 0.0);
        for i in 0..dim {
            out[i] += wh * k[i];
        }
    }
    out
}

/// Integrate i dpsi/dt = H psi from 0 to `t_end`, returning every accepted
/// step as `(t, state)`; the first point is `(0, psi0)` and the last lands
/// exactly on `t_end`.
pub fn integrate_linear(
    h: &Operator,
    psi0: &AmplitudeState,
    t_end: f64,
    tol: f64,
) -> Result<Vec<(f64, AmplitudeState)>> {
    if !t_end.is_finite() || t_end < 0.0 {
        return Err(Error::invalid(format!("t_end {t_end} must be finite and >= 0")));
    }
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::invalid(format!("tolerance {tol} must be finite and > 0")));
    }
    if !h.is_finite() {
        return Err(Error::invalid("non-finite Hamiltonian entry".to_string()));
    }
    if h.dim() != psi0.dim() {
        return Err(Error::invalid(format!(
            "dimension mismatch: operator {} vs state {}",
            h.dim(),
            psi0.dim()
        )));
    }

    let dim = h.dim();
    let mut trajectory = vec![(0.0, *psi0)];
    if t_end == 0.0 {
        return Ok(trajectory);
    }

    let h_min = t_end * 1e-14;
    let mut t = 0.0f64;
    let mut y = psi0.raw();
    let mut step = t_end / 1000.0;
    let mut k1 = rhs(h, &y, dim);

    for _ in 0..MAX_STEPS {
        if t >= t_end {
            return Ok(trajectory);
        }
        let mut hs = step.min(t_end - t);
        let last = hs >= t_end - t;

        let k2 = rhs(h, &combine(dim, &y, hs, &[(A21, &k1)]), dim);
        let k3 = rhs(h, &combine(dim, &y, hs, &[(A31, &k1), (A32, &k2)]), dim);
        let k4 = rhs(h, &combine(dim, &y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]), dim);
        let k5 = rhs(
            h,
            &combine(dim, &y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            dim,
        );
        let k6 = rhs(
            h,
            &combine(
                dim,
                &y,
                hs,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ),
            dim,
        );
        let y5 = combine(
            dim,
            &y,
            hs,
            &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
        );
        let k7 = rhs(h, &y5, dim);

        let mut err = 0.0f64;
        for i in 0..dim {
            let e = k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7;
            err = err.max((e * hs).norm());
        }

        let budget = tol * hs / t_end;
        let accepted = err <= budget;
        if accepted {
            t = if last { t_end } else { t + hs };
            y = y5;
            k1 = k7;
            trajectory.push((t, AmplitudeState::from_raw(dim, y)));
        } else if hs <= h_min {
            return Err(Error::IntegrationFailure { last_t: t });
        }

        // err ~ h^5 against a budget ~ h: exponent 1/4
        let factor = if err > 0.0 {
            0.9 * (budget / err).powf(0.25)
        } else {
            5.0
        };
        hs *= factor.clamp(0.2, 5.0);
        step = hs.max(h_min);
    }
    Err(Error::IntegrationFailure { last_t: t })
}
