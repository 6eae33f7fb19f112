//! Level-set motion by mean curvature, `u_t = |grad u| div(grad u / |grad u|)`,
//! on periodic 2D and 3D grids, plus the `m`-fold anisotropic variant in 2D.

use crate::error::{Error, Result};
use crate::grid::{BoundaryData, Field, Grid};
use crate::operators::{laplacian, Jet};
use crate::problems::{rk3_step_limit, Boundary, ProblemDef, Stabilizer};

/// Gradient regularization relative to the domain size.
pub const EPS_LS_FACTOR: f64 = 1e-8;

pub fn eps_ls(grid: &Grid) -> f64 {
    let scale = (0..grid.dim()).map(|a| grid.length(a)).fold(0.0, f64::max);
    EPS_LS_FACTOR * scale
}

fn check_grid(grid: &Grid) -> Result<()> {
    if !grid.is_periodic() || !(2..=3).contains(&grid.dim()) {
        return Err(Error::Unsupported("curvature flow needs a periodic 2D or 3D grid".into()));
    }
    Ok(())
}

/// `Laplacian u - (grad u . H grad u) / (|grad u|^2 + eps^2)`, which is
/// `kappa |grad u|` with the regularized gradient magnitude.
fn curvature_term(grad: &[f64; 3], h: &[f64; 6], eps2: f64) -> f64 {
    let [ux, uy, uz] = *grad;
    let [uxx, uyy, uzz, uxy, uxz, uyz] = *h;
    let lap = uxx + uyy + uzz;
    let quad = ux * ux * uxx + uy * uy * uyy + uz * uz * uzz + 2.0 * (ux * uy * uxy + ux * uz * uxz + uy * uz * uyz);
    let g2 = ux * ux + uy * uy + uz * uz;
    lap - quad / (g2 + eps2)
}

pub fn mcm_rhs(u: &Field, eps_ls: f64) -> Result<Field> {
    check_grid(u.grid())?;
    let jet = Jet::compute(u.grid(), u.values(), None)?;
    let e2 = eps_ls * eps_ls;
    let v = jet.grad.iter().zip(&jet.hess).map(|(g, h)| curvature_term(g, h, e2)).collect();
    Field::from_vec(u.grid(), v)
}

/// `gamma + gamma''` for `gamma_m(w) = (m^2 + 1 - sin(m w)) / (m^2 + 1)`.
pub fn aniso_factor(m: u32, omega: f64) -> f64 {
    let m2 = (m * m) as f64;
    let s = (m as f64 * omega).sin();
    (m2 + 1.0 - s + m2 * s) / (m2 + 1.0)
}

/// Largest value of [`aniso_factor`] over all angles.
pub fn aniso_factor_max(m: u32) -> f64 {
    if m == 0 {
        return 1.0;
    }
    let m2 = (m * m) as f64;
    1.0 + (m2 - 1.0) / (m2 + 1.0)
}

/// Stabilization weight for the anisotropic flow.
pub fn aniso_p(m: u32, pbar_min: f64) -> f64 {
    aniso_factor_max(m) * pbar_min
}

pub fn aniso_mcm_rhs(u: &Field, m: u32, eps_ls: f64) -> Result<Field> {
    check_grid(u.grid())?;
    if u.grid().dim() != 2 {
        return Err(Error::Unsupported("anisotropic flow is two-dimensional".into()));
    }
    let jet = Jet::compute(u.grid(), u.values(), None)?;
    let e2 = eps_ls * eps_ls;
    let v = jet
        .grad
        .iter()
        .zip(&jet.hess)
        .map(|(g, h)| {
            let omega = g[1].atan2(g[0]);
            aniso_factor(m, omega) * curvature_term(g, h, e2)
        })
        .collect();
    Field::from_vec(u.grid(), v)
}

fn build(name: &str, initial: Field, p: f64, final_time: f64, aniso: Option<u32>) -> Result<ProblemDef> {
    let grid = *initial.grid();
    check_grid(&grid)?;
    let eps = eps_ls(&grid);
    let rhs_fn = Box::new(move |_t: f64, u: &[f64], _bc: Option<&BoundaryData>, out: &mut [f64]| {
        let f = Field::from_vec(&grid, u.to_vec())?;
        let r = match aniso {
            None => mcm_rhs(&f, eps)?,
            Some(m) => aniso_mcm_rhs(&f, m, eps)?,
        };
        out.copy_from_slice(r.values());
        Ok(())
    });
    let h = (0..grid.dim()).map(|a| grid.spacing(a)).fold(f64::INFINITY, f64::min);
    let radius = 4.0 * grid.dim() as f64 / (h * h) * aniso.map_or(1.0, aniso_factor_max);
    let def = ProblemDef::new(name, initial, rhs_fn, Stabilizer::new(laplacian(&grid)?, p), Boundary::None, final_time)?;
    Ok(def.with_explicit_dt(rk3_step_limit(radius)))
}

pub fn mcm_problem(initial: Field, p: f64, final_time: f64) -> Result<ProblemDef> {
    build("mcm", initial, p, final_time, None)
}

pub fn aniso_mcm_problem(initial: Field, m: u32, p: f64, final_time: f64) -> Result<ProblemDef> {
    build("aniso-mcm", initial, p, final_time, Some(m))
}

/// Signed distance to a circle or sphere, negative inside.
pub fn sphere(grid: &Grid, center: [f64; 3], radius: f64) -> Field {
    let dim = grid.dim();
    Field::from_fn(grid, |x| {
        let r2: f64 = (0..dim).map(|a| (x[a] - center[a]).powi(2)).sum();
        r2.sqrt() - radius
    })
}

/// Two balls of radius `radius` centred at `x = +-offset` on the axis through
/// `center`, joined by a bar of half-width `neck`; the union is the minimum
/// of the three distance functions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dumbbell {
    pub center: [f64; 3],
    pub radius: f64,
    pub offset: f64,
    pub neck: f64,
}

impl Dumbbell {
    pub fn level_set(&self, grid: &Grid) -> Field {
        let dim = grid.dim();
        let c = self.center;
        Field::from_fn(grid, |x| {
            let dx = x[0] - c[0];
            let rest2: f64 = (1..dim).map(|a| (x[a] - c[a]).powi(2)).sum();
            let ball = |s: f64| ((dx - s).powi(2) + rest2).sqrt() - self.radius;
            let bar = (rest2.sqrt() - self.neck).max(dx.abs() - self.offset);
            ball(self.offset).min(ball(-self.offset)).min(bar)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planar_interface_does_not_move() {
        let g = Grid::periodic(&[0.0, 0.0], &[1.0, 1.0], &[32, 32]).unwrap();
        let tau = 2.0 * std::f64::consts::PI;
        // Level sets of sin(2 pi x) are straight lines.
        let u = Field::from_fn(&g, |x| (tau * x[0]).sin());
        let r = mcm_rhs(&u, 1e-8).unwrap();
        // Away from the crests, where the gradient vanishes and level sets degenerate.
        for (v, f) in u.values().iter().zip(r.values()) {
            if v.abs() < 0.9 {
                assert!(f.abs() < 1e-9, "{f}");
            }
        }
    }

    #[test]
    fn circle_curvature() {
        let n = 256;
        let g = Grid::periodic(&[-1.0, -1.0], &[2.0, 2.0], &[n, n]).unwrap();
        let r0 = 0.5;
        // Positive inside, so the curvature term is -1/R on the circle.
        let u = Field::from_vec(&g, sphere(&g, [0.0; 3], r0).values().iter().map(|v| -v).collect()).unwrap();
        let f = mcm_rhs(&u, eps_ls(&g)).unwrap();
        let h = g.spacing(0);
        let mut worst = 0.0_f64;
        for i in 0..g.len() {
            let x = g.coords(i);
            let r = x[0].hypot(x[1]);
            if (r - r0).abs() < h {
                worst = worst.max((f.values()[i] + 1.0 / r).abs() * r);
            }
        }
        assert!(worst < 20.0 * h * h, "{worst}");
    }

    #[test]
    fn sphere_curvature_3d() {
        let g = Grid::periodic(&[-1.0; 3], &[2.0; 3], &[48, 48, 48]).unwrap();
        let u = sphere(&g, [0.0; 3], 0.6);
        let f = mcm_rhs(&u, eps_ls(&g)).unwrap();
        let h = g.spacing(0);
        for i in 0..g.len() {
            let x = g.coords(i);
            let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
            if (r - 0.6).abs() < h {
                assert!((f.values()[i] - 2.0 / r).abs() < 0.02 * 2.0 / r);
            }
        }
    }

    #[test]
    fn isotropic_when_m_is_zero() {
        let g = Grid::periodic(&[-1.0, -1.0], &[2.0, 2.0], &[32, 32]).unwrap();
        let u = Dumbbell { center: [0.0; 3], radius: 0.4, offset: 0.45, neck: 0.1 }.level_set(&g);
        let a = aniso_mcm_rhs(&u, 0, 1e-8).unwrap();
        let b = mcm_rhs(&u, 1e-8).unwrap();
        assert_eq!(a.values(), b.values());
        assert_eq!(aniso_p(0, 0.5), 0.5);
    }

    #[test]
    fn aniso_extremes() {
        for m in [2u32, 4, 8] {
            let m2 = (m * m) as f64;
            let hi = aniso_factor(m, std::f64::consts::FRAC_PI_2 / m as f64);
            let lo = aniso_factor(m, -std::f64::consts::FRAC_PI_2 / m as f64);
            assert!((hi - aniso_factor_max(m)).abs() < 1e-14);
            assert!((lo - 2.0 / (m2 + 1.0)).abs() < 1e-14);
            assert!((aniso_p(m, 1.0) - (1.0 + (m2 - 1.0) / (m2 + 1.0))).abs() < 1e-14);
        }
    }

    #[test]
    fn dumbbell_shape() {
        let g = Grid::periodic(&[-1.0, -1.0], &[2.0, 2.0], &[64, 64]).unwrap();
        let d = Dumbbell { center: [0.0; 3], radius: 0.3, offset: 0.5, neck: 0.08 };
        let u = d.level_set(&g);
        let at = |x: f64, y: f64| {
            let i = ((x + 1.0) / g.spacing(0)).round() as usize;
            let j = ((y + 1.0) / g.spacing(1)).round() as usize;
            u.values()[g.index(i, j, 0)]
        };
        assert!(at(0.5, 0.0) < 0.0 && at(-0.5, 0.0) < 0.0 && at(0.0, 0.0) < 0.0);
        assert!(at(0.0, 0.2) > 0.0 && at(0.9, 0.9) > 0.0);
    }

    #[test]
    fn rejects_dirichlet_grids() {
        let g = Grid::dirichlet(&[0.0, 0.0], &[1.0, 1.0], &[8, 8]).unwrap();
        assert!(mcm_rhs(&Field::zeros(&g), 1e-8).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn factor_is_periodic_in_branch(m in prop::sample::select(vec![0u32, 2, 4, 8]), w in -3.2f64..3.2, k in -3i32..3) {
                let tau = 2.0 * std::f64::consts::PI;
                let a = aniso_factor(m, w);
                let b = aniso_factor(m, w + k as f64 * tau);
                prop_assert!((a - b).abs() < 1e-12);
                prop_assert!(a <= aniso_factor_max(m) + 1e-14);
                prop_assert!(a > 0.0);
            }
        }
    }
}
