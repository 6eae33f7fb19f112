//! Periodic heat equation `u_t = u_xx` stabilized by `p u_xx`, so that every
//! Fourier mode sees the modified test equation with `pbar = p`.

use std::f64::consts::PI;

use crate::error::Result;
use crate::grid::{BoundaryData, Field, Grid};
use crate::operators::{apply, laplacian};
use crate::problems::{rk3_step_limit, Boundary, ProblemDef, Stabilizer};

/// Smooth low-mode data on `[0, length)`.
pub fn smooth_initial(grid: &Grid) -> Field {
    let l = grid.length(0);
    Field::from_fn(grid, |x| (2.0 * PI * x[0] / l).sin() + 0.5 * (4.0 * PI * x[0] / l).cos())
}

pub fn heat_problem(length: f64, nodes: usize, p: f64, t_final: f64) -> Result<ProblemDef> {
    let g = Grid::periodic(&[0.0], &[length], &[nodes])?;
    let lap = laplacian(&g)?;
    let op = lap.clone();
    let rhs_fn = Box::new(move |_t: f64, u: &[f64], _bc: Option<&BoundaryData>, out: &mut [f64]| {
        let f = Field::from_vec(op.grid(), u.to_vec())?;
        out.copy_from_slice(apply(&op, &f, None)?.values());
        Ok(())
    });
    let h = g.spacing(0);
    let def = ProblemDef::new(
        "heat",
        smooth_initial(&g),
        rhs_fn,
        Stabilizer::new(lap, p),
        Boundary::None,
        t_final,
    )?;
    Ok(def.with_explicit_dt(rk3_step_limit(4.0 / (h * h))))
}
