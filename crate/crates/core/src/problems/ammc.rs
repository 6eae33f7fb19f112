//! Axisymmetric mean curvature motion on `0 < x < 10`:
//! `u_t = u_xx / (1 + u_x^2) - 1/u`, `u = 1` at both ends,
//! `u(x, 0) = 1 + a sin(pi x / 5)`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::{BoundaryData, Field, Grid};
use crate::operators::{d1_centered, laplacian};
use crate::problems::{rk3_step_limit, Boundary, ProblemDef, Stabilizer};

pub const LENGTH: f64 = 10.0;
/// Grid intervals, `h = 10 / N`.
pub const DEFAULT_INTERVALS: usize = 2048;
pub const DEFAULT_AMPLITUDE: f64 = 0.10;
pub const FINAL_TIME: f64 = 0.35;
/// Reference step: 24000 Heun RK3 steps to the final time.
pub const REFERENCE_STEPS: usize = 24_000;
/// `p` used for EIN runs.
pub const EIN_P: f64 = 0.7;

pub fn grid(intervals: usize) -> Result<Grid> {
    if intervals < 2 {
        return Err(Error::InvalidGrid(format!("{intervals} intervals")));
    }
    Grid::dirichlet(&[0.0], &[LENGTH], &[intervals - 1])
}

pub fn initial(grid: &Grid, amplitude: f64) -> Field {
    Field::from_fn(grid, |x| 1.0 + amplitude * (PI * x[0] / 5.0).sin())
}

/// `u_xx / (1 + u_x^2) - 1/u` with centered differences; the boundary values
/// enter the stencils at the first and last interior nodes.
pub fn rhs(u: &[f64], h: f64, left: f64, right: f64, out: &mut [f64]) -> Result<()> {
    let n = u.len();
    for i in 0..n {
        let ui = u[i];
        if !(ui > 0.0) {
            return Err(Error::Domain {
                node: i,
                reason: format!("u = {ui} <= 0"),
            });
        }
        let um = if i == 0 { left } else { u[i - 1] };
        let up = if i + 1 == n { right } else { u[i + 1] };
        let ux = (up - um) / (2.0 * h);
        let uxx = (up - 2.0 * ui + um) / (h * h);
        out[i] = uxx / (1.0 + ux * ux) - 1.0 / ui;
    }
    Ok(())
}

/// Smallest `p` making the split admissible for a scheme with ratio bound
/// `pbar_min`, judged on the initial slope: `max_j pbar_min / (1 + (D1 u0_j)^2)`.
pub fn p_rule(u0: &Field, pbar_min: f64) -> Result<f64> {
    let bc = BoundaryData::constant(u0.grid(), 1.0)?;
    let ux = d1_centered(u0, 0, Some(&bc))?;
    Ok(ux
        .values()
        .iter()
        .map(|d| pbar_min / (1.0 + d * d))
        .fold(0.0, f64::max))
}

pub fn ammc_problem(intervals: usize, amplitude: f64, p: f64) -> Result<ProblemDef> {
    let g = grid(intervals)?;
    let h = g.spacing(0);
    let rhs_fn = Box::new(move |_t: f64, u: &[f64], bc: Option<&BoundaryData>, out: &mut [f64]| {
        let bc = bc.expect("Dirichlet problem receives boundary data");
        rhs(u, h, bc.at(0, 0, 0), bc.at(u.len() + 1, 0, 0), out)
    });
    let def = ProblemDef::new(
        "ammc",
        initial(&g, amplitude),
        rhs_fn,
        Stabilizer::new(laplacian(&g)?, p),
        Boundary::Fixed(BoundaryData::constant(&g, 1.0)?),
        FINAL_TIME,
    )?;
    Ok(def.with_explicit_dt(rk3_step_limit(4.0 / (h * h) + 2.0)))
}
