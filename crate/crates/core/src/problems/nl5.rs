//! `u_t = Laplacian(u^5)` on the unit square with exact solution
//! `u = (0.8 (2t + x + y))^(1/4)` supplying initial and boundary data.

use crate::error::{Error, Result};
use crate::grid::{BoundaryData, Field, Grid};
use crate::operators::{apply, laplacian};
use crate::problems::{rk3_step_limit, Boundary, ProblemDef, Stabilizer};

pub const FINAL_TIME: f64 = 0.40;
/// Intervals per side; `h = 1/67` is the closest divisor of 1 to `h = 0.015`.
pub const DEFAULT_INTERVALS: usize = 67;
pub const REFERENCE_DT: f64 = 6.25e-6;

pub fn exact(x: f64, y: f64, t: f64) -> f64 {
    (0.8 * (2.0 * t + x + y)).max(0.0).powf(0.25)
}

/// Bounds `[lo, hi]` on the eigenvalues of the linearization of `Laplacian(u^5)`.
pub fn eigenvalue_bounds(h: f64, t: f64) -> (f64, f64) {
    (-64.0 * (1.0 + t) / (h * h), -16.0 * std::f64::consts::PI.powi(2) * (t + h))
}

/// `p = 8 (1 + T) pbar_min`, so that `pbar >= pbar_min` up to time `T`.
pub fn p_rule(pbar_min: f64, t_final: f64) -> f64 {
    8.0 * (1.0 + t_final) * pbar_min
}

pub fn grid(intervals: usize) -> Result<Grid> {
    if intervals < 4 {
        return Err(Error::InvalidGrid(format!("{intervals} intervals")));
    }
    Grid::dirichlet(&[0.0, 0.0], &[1.0, 1.0], &[intervals - 1, intervals - 1])
}

pub fn nl5_problem(intervals: usize, p: f64) -> Result<ProblemDef> {
    let g = grid(intervals)?;
    let h = g.spacing(0);
    let lap = laplacian(&g)?;
    let lap_rhs = lap.clone();
    let rhs_fn = Box::new(move |_t: f64, u: &[f64], bc: Option<&BoundaryData>, out: &mut [f64]| {
        let bc5 = bc.expect("Dirichlet problem receives boundary data").map(|v| v.powi(5));
        let u5 = Field::from_vec(lap_rhs.grid(), u.iter().map(|v| v.powi(5)).collect())?;
        out.copy_from_slice(apply(&lap_rhs, &u5, Some(&bc5))?.values());
        Ok(())
    });
    let bgrid = g;
    let boundary = Boundary::Timed(Box::new(move |t| {
        BoundaryData::from_fn(&bgrid, |x| exact(x[0], x[1], t)).expect("Dirichlet grid")
    }));
    let def = ProblemDef::new(
        "nl5",
        Field::from_fn(&g, |x| exact(x[0], x[1], 0.0)),
        rhs_fn,
        Stabilizer::new(lap, p),
        boundary,
        FINAL_TIME,
    )?;
    let rho = 5.0 * 0.8 * 2.0 * (1.0 + FINAL_TIME) * 8.0 / (h * h);
    Ok(def
        .with_exact(Box::new(|x, t| exact(x[0], x[1], t)))
        .with_explicit_dt(rk3_step_limit(rho)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_values() {
        assert_eq!(exact(0.0, 0.0, 0.0), 0.0);
        assert!((exact(1.0, 1.0, 0.0) - 1.6f64.powf(0.25)).abs() < 1e-15);
    }

    #[test]
    fn rhs_matches_time_derivative_of_exact_solution() {
        // u^5 is (0.8 s)^(5/4) with s = 2t + x + y; Laplacian = 2 * (5/4)(1/4) 0.8^2 (0.8 s)^(-3/4)
        // and u_t = 2 * (1/4) 0.8 (0.8 s)^(-3/4), which coincide.
        let err = |intervals: usize| {
            let p = nl5_problem(intervals, 1.0).unwrap();
            let t = 0.3;
            let u = p.exact(t).unwrap();
            let f = p.eval_rhs(t, &u).unwrap();
            let ut = Field::from_fn(&p.grid, |x| 0.4 * (0.8 * (2.0 * t + x[0] + x[1])).powf(-0.75));
            f.values()
                .iter()
                .zip(ut.values())
                .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
        };
        let (coarse, fine) = (err(80), err(160));
        assert!(fine < 1e-2);
        let ratio = coarse / fine;
        assert!((ratio - 4.0).abs() < 0.3, "error ratio {ratio}");
    }

    #[test]
    fn p_selection() {
        assert!((p_rule(0.75, 0.4) - 8.4).abs() < 1e-12);
        let (lo, hi) = eigenvalue_bounds(0.015, 0.0);
        assert!(lo < hi && hi < 0.0);
    }
}
