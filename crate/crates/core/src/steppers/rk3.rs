//! Heun's third-order Runge-Kutta method (nodes 0, 1/3, 2/3; weights 1/4, 0, 3/4)
//! on the full right-hand side. Used for startup values and reference solutions.

use crate::error::{Error, Result};
use crate::steppers::SplitProblem;

/// One step of size `dt` from `(t, u)`, in place.
pub fn heun3_step<P: SplitProblem + ?Sized>(problem: &P, t: f64, dt: f64, u: &mut [f64]) -> Result<()> {
    let n = u.len();
    let mut k1 = vec![0.0; n];
    let mut k = vec![0.0; n];
    let mut stage = vec![0.0; n];
    problem.rhs(t, u, &mut k1)?;
    for i in 0..n {
        stage[i] = u[i] + dt / 3.0 * k1[i];
    }
    problem.rhs(t + dt / 3.0, &stage, &mut k)?;
    for i in 0..n {
        stage[i] = u[i] + 2.0 * dt / 3.0 * k[i];
    }
    problem.rhs(t + 2.0 * dt / 3.0, &stage, &mut k)?;
    for i in 0..n {
        u[i] += dt * (0.25 * k1[i] + 0.75 * k[i]);
    }
    Ok(())
}

/// Integrates from `(t0, u0)` to `t_end` with `steps` equal steps.
pub fn reference_solve<P: SplitProblem + ?Sized>(
    problem: &P,
    u0: &[f64],
    t0: f64,
    t_end: f64,
    steps: usize,
) -> Result<Vec<f64>> {
    if steps == 0 || !(t_end > t0) {
        return Err(Error::InvalidParameter("reference solve needs t_end > t0 and steps > 0".into()));
    }
    let dt = (t_end - t0) / steps as f64;
    let mut u = u0.to_vec();
    for s in 0..steps {
        heun3_step(problem, t0 + s as f64 * dt, dt, &mut u)?;
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { step: s + 1 });
        }
    }
    Ok(u)
}
