//! Leading local error constants `C_{k+1}(p)`:
//! `u(t + dt) - u_* = C_{k+1} dt^{k+1} + O(dt^{k+2})`, where `u_*` is one step
//! taken from exact past values.

use crate::error::{Error, Result};
use crate::problems::ScalarTest;
use crate::scheme::Scheme;
use crate::steppers::Stepper;

/// Solution derivatives and Jacobians at the start of the step (scalar case).
#[derive(Clone, Copy, Debug)]
pub struct Jets {
    pub u1: f64,
    pub u2: f64,
    pub u3: f64,
    /// `F'(u)`.
    pub fprime: f64,
    /// The stabilizing operator `L`.
    pub l: f64,
}

impl Jets {
    /// Jets of `w = w0 e^{lambda_F t}` at `t`.
    pub fn linear(problem: &ScalarTest, w: f64) -> Self {
        let lf = problem.lambda_f[0];
        Jets {
            u1: lf * w,
            u2: lf * lf * w,
            u3: lf * lf * lf * w,
            fprime: lf,
            l: problem.lambda_l[0],
        }
    }
}

/// Tabulated leading constants.
pub fn quoted_error_constant(scheme: Scheme, p: f64, j: &Jets) -> Result<f64> {
    let pl = p * j.l;
    Ok(match scheme {
        Scheme::Sbdf1 => 0.5 * j.u2 - pl * j.u1,
        Scheme::Cnab => 5.0 / 12.0 * j.u3 - pl * j.u2 / 8.0,
        Scheme::Cnlf => j.u3 / 3.0 - pl * j.u2,
        Scheme::Sbdf2 => 4.0 / 9.0 * j.u3 - 2.0 / 3.0 * pl * j.u2,
        Scheme::Ein => {
            0.5 * pl * pl * j.u1 - pl * (j.u2 + 2.0 * j.fprime * j.u1) / 8.0
                + j.u3 / 24.0
                + j.fprime * j.u2 / 8.0
        }
        other => return Err(Error::InvalidParameter(format!("no tabulated constant for {other}"))),
    })
}

/// Constants obtained by Taylor-expanding the schemes as implemented here.
/// They agree with [`quoted_error_constant`] except in the `p` terms of CNAB and EIN.
pub fn derived_error_constant(scheme: Scheme, p: f64, j: &Jets) -> Result<f64> {
    let pl = p * j.l;
    Ok(match scheme {
        Scheme::Cnab => 5.0 / 12.0 * j.u3 - pl * j.u2 / 2.0,
        Scheme::Ein => {
            0.5 * pl * pl * j.u1 - pl * (j.u2 + j.fprime * j.u1) / 4.0
                + j.u3 / 24.0
                + j.fprime * j.u2 / 8.0
        }
        other => quoted_error_constant(other, p, j)?,
    })
}

#[derive(Clone, Debug)]
pub struct ErrorConstantFit {
    pub scheme: Scheme,
    pub constant: f64,
    /// `(dt, error / dt^{k+1})` along the ladder.
    pub ladder: Vec<(f64, f64)>,
    /// Observed local order `k + 1` at the finest pair.
    pub observed_order: f64,
}

/// Fits `C_{k+1}` for a single-mode [`ScalarTest`] starting at `(t0, w(t0) = w0 e^{lambda t0})`.
///
/// One-step errors on a halving ladder are scaled by `dt^{k+1}` and
/// Richardson-extrapolated twice (removing the `dt` and `dt^2` corrections).
pub fn local_error_fit(scheme: Scheme, problem: &ScalarTest, t0: f64, w0: f64) -> Result<ErrorConstantFit> {
    if problem.lambda_f.len() != 1 {
        return Err(Error::InvalidParameter("local error fit needs a single mode".into()));
    }
    if scheme.is_exponential() {
        return Err(Error::InvalidParameter(format!("no tabulated constant for {scheme}")));
    }
    let k = scheme.order();
    let lam = problem.lambda_f[0].abs().max(problem.lambda_l[0].abs()).max(1e-12);
    let dt0 = 0.05 / (lam * (1.0 + problem.p.abs()));
    let rungs = 7;
    let mut ladder = Vec::with_capacity(rungs);
    let mut errors = Vec::with_capacity(rungs);
    for r in 0..rungs {
        let dt = dt0 / (1u64 << r) as f64;
        let levels: Vec<Vec<f64>> = (0..scheme.history_len())
            .map(|j| problem.exact(&[w0], t0 - j as f64 * dt))
            .collect();
        let mut st = Stepper::with_history(problem, scheme, dt, t0, levels)?;
        st.step()?;
        let err = problem.exact(&[w0], t0 + dt)[0] - st.solution()[0];
        errors.push(err);
        ladder.push((dt, err / dt.powi(k as i32 + 1)));
    }
    let observed_order = (errors[rungs - 2] / errors[rungs - 1]).abs().log2();
    if (observed_order - (k as f64 + 1.0)).abs() > 0.25 {
        return Err(Error::Nonconvergent(format!(
            "{scheme}: local order {observed_order:.3}, expected {}",
            k + 1
        )));
    }
    let c: Vec<f64> = ladder.iter().map(|&(_, v)| v).collect();
    let r1: Vec<f64> = c.windows(2).map(|w| 2.0 * w[1] - w[0]).collect();
    let r2: Vec<f64> = r1.windows(2).map(|w| (4.0 * w[1] - w[0]) / 3.0).collect();
    // Early rungs carry truncation, late ones round-off; take the closest consecutive pair.
    let (best, spread) = r2
        .windows(2)
        .map(|w| (w[1], (w[1] - w[0]).abs()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    let scale = c.iter().map(|v| v.abs()).fold(0.0, f64::max).max(lam.powi(k as i32 + 1) * w0.abs());
    if spread > 1e-4 * scale {
        return Err(Error::Nonconvergent(format!(
            "{scheme}: extrapolated constants spread {spread:e}"
        )));
    }
    Ok(ErrorConstantFit {
        scheme,
        constant: best,
        ladder,
        observed_order,
    })
}

/// Least-squares polynomial fit of `values` at `xs`; returns the relative residual.
pub fn poly_fit_residual(xs: &[f64], values: &[f64], degree: usize) -> f64 {
    let m = degree + 1;
    // Normal equations on monomials; adequate for the handful of small nodes used here.
    let mut a = vec![vec![0.0; m]; m];
    let mut b = vec![0.0; m];
    for (&x, &y) in xs.iter().zip(values) {
        for i in 0..m {
            b[i] += x.powi(i as i32) * y;
            for j in 0..m {
                a[i][j] += x.powi((i + j) as i32);
            }
        }
    }
    for col in 0..m {
        let piv = (col..m).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..m {
            let f = a[row][col] / a[col][col];
            for j in col..m {
                a[row][j] -= f * a[col][j];
            }
            b[row] -= f * b[col];
        }
    }
    let mut coef = vec![0.0; m];
    for i in (0..m).rev() {
        let s: f64 = (i + 1..m).map(|j| a[i][j] * coef[j]).sum();
        coef[i] = (b[i] - s) / a[i][i];
    }
    let resid: f64 = xs
        .iter()
        .zip(values)
        .map(|(&x, &y)| {
            let fit: f64 = coef.iter().enumerate().map(|(i, c)| c * x.powi(i as i32)).sum();
            (fit - y).powi(2)
        })
        .sum::<f64>()
        .sqrt();
    let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
    resid / norm.max(f64::MIN_POSITIVE)
}
