//! PDE problems with their stabilizing splits.

pub mod ammc;
pub mod heat;
pub mod inpaint;
pub mod mcm;
pub mod nl5;
pub mod scalar;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{BoundaryData, Field, Grid};
use crate::linsolve::HelmholtzSolver;
use crate::operators::{apply, DiagOperator};
use crate::steppers::{ImplicitSolve, ModeBasis, SpectralForm, SplitProblem};

pub use scalar::ScalarTest;

/// The stabilizing part `g(u) = p (L u + boundary) - shift u`.
#[derive(Clone, Debug)]
pub struct Stabilizer {
    pub op: DiagOperator,
    pub p: f64,
    /// Extra implicit damping (the fidelity term of the inpainting models).
    pub shift: f64,
}

impl Stabilizer {
    pub fn new(op: DiagOperator, p: f64) -> Self {
        Stabilizer { op, p, shift: 0.0 }
    }

    pub fn with_shift(mut self, shift: f64) -> Self {
        self.shift = shift;
        self
    }
}

/// Dirichlet data, fixed or time dependent.
pub enum Boundary {
    None,
    Fixed(BoundaryData),
    Timed(Box<dyn Fn(f64) -> BoundaryData + Send + Sync>),
}

impl Boundary {
    pub fn at(&self, t: f64) -> Option<std::borrow::Cow<'_, BoundaryData>> {
        match self {
            Boundary::None => None,
            Boundary::Fixed(b) => Some(std::borrow::Cow::Borrowed(b)),
            Boundary::Timed(f) => Some(std::borrow::Cow::Owned(f(t))),
        }
    }
}

/// `F(t, u, boundary, out)`.
pub type RhsFn = Box<dyn Fn(f64, &[f64], Option<&BoundaryData>, &mut [f64]) -> Result<()> + Send + Sync>;
pub type ExactFn = Box<dyn Fn([f64; 3], f64) -> f64 + Send + Sync>;

/// A semi-discrete PDE `u_t = F(u)` with stabilizer, data and final time.
pub struct ProblemDef {
    pub name: String,
    pub grid: Grid,
    rhs: RhsFn,
    pub stabilizer: Stabilizer,
    pub initial: Field,
    boundary: Arc<Boundary>,
    pub final_time: f64,
    exact: Option<ExactFn>,
    /// Step size at which Heun RK3 is comfortably stable on `F`.
    pub explicit_dt: Option<f64>,
}

impl ProblemDef {
    pub fn new(
        name: impl Into<String>,
        initial: Field,
        rhs: RhsFn,
        stabilizer: Stabilizer,
        boundary: Boundary,
        final_time: f64,
    ) -> Result<Self> {
        let grid = *initial.grid();
        if stabilizer.op.grid() != &grid {
            return Err(Error::GridMismatch);
        }
        if grid.is_periodic() != matches!(boundary, Boundary::None) {
            return Err(Error::InvalidParameter(
                "boundary data must be given exactly for Dirichlet grids".into(),
            ));
        }
        if !(stabilizer.p >= 0.0) {
            return Err(Error::InvalidParameter(format!("p = {}", stabilizer.p)));
        }
        Ok(ProblemDef {
            name: name.into(),
            grid,
            rhs,
            stabilizer,
            initial,
            boundary: Arc::new(boundary),
            final_time,
            exact: None,
            explicit_dt: None,
        })
    }

    pub fn with_exact(mut self, exact: ExactFn) -> Self {
        self.exact = Some(exact);
        self
    }

    pub fn with_explicit_dt(mut self, dt: f64) -> Self {
        self.explicit_dt = Some(dt);
        self
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.stabilizer.p = p;
        self
    }

    pub fn boundary_at(&self, t: f64) -> Option<std::borrow::Cow<'_, BoundaryData>> {
        self.boundary.at(t)
    }

    pub fn exact(&self, t: f64) -> Option<Field> {
        self.exact
            .as_ref()
            .map(|e| Field::from_fn(&self.grid, |x| e(x, t)))
    }

    pub fn eval_rhs(&self, t: f64, u: &Field) -> Result<Field> {
        u.check_grid(&self.grid)?;
        let mut out = vec![0.0; u.len()];
        SplitProblem::rhs(self, t, u.values(), &mut out)?;
        Field::from_vec(&self.grid, out)
    }

    /// `N(u) = F(u) - g(u)`, the explicitly treated remainder.
    pub fn explicit_remainder(&self, t: f64, u: &Field) -> Result<Field> {
        let f = self.eval_rhs(t, u)?;
        let mut g = vec![0.0; u.len()];
        self.implicit_part(t, u.values(), &mut g)?;
        let v = f.values().iter().zip(&g).map(|(a, b)| a - b).collect();
        Field::from_vec(&self.grid, v)
    }
}

impl SplitProblem for ProblemDef {
    fn len(&self) -> usize {
        self.grid.len()
    }

    fn rhs(&self, t: f64, u: &[f64], out: &mut [f64]) -> Result<()> {
        let bc = self.boundary.at(t);
        (self.rhs)(t, u, bc.as_deref(), out)
    }

    fn implicit_part(&self, t: f64, u: &[f64], out: &mut [f64]) -> Result<()> {
        let st = &self.stabilizer;
        let bc = self.boundary.at(t);
        let field = Field::from_vec(&self.grid, u.to_vec())?;
        let lu = apply(&st.op, &field, bc.as_deref())?;
        for ((o, l), x) in out.iter_mut().zip(lu.values()).zip(u) {
            *o = st.p * l - st.shift * x;
        }
        Ok(())
    }

    fn implicit_solver(&self, a: f64, b: f64) -> Result<Box<dyn ImplicitSolve>> {
        let st = &self.stabilizer;
        let solver = HelmholtzSolver::prepare(&st.op, a + b * st.shift, b * st.p)?;
        Ok(Box::new(StabilizedSolve {
            solver,
            weight: b * st.p,
            boundary: Arc::clone(&self.boundary),
        }))
    }

    fn spectral(&self) -> Option<SpectralForm> {
        let st = &self.stabilizer;
        let sym = st.op.symbol()?;
        let transform = st.op.transform()?.clone();
        Some(SpectralForm {
            symbol: sym.iter().map(|s| st.p * s - st.shift).collect(),
            basis: ModeBasis::Fourier(transform),
        })
    }

    fn explicit_step_limit(&self) -> Option<f64> {
        self.explicit_dt
    }
}

struct StabilizedSolve {
    solver: HelmholtzSolver,
    weight: f64,
    boundary: Arc<Boundary>,
}

impl ImplicitSolve for StabilizedSolve {
    fn solve(&self, t: f64, r: &mut [f64]) -> Result<()> {
        if let Some(bc) = self.boundary.at(t) {
            if self.weight != 0.0 {
                let term = self.solver.operator().boundary_term(&bc)?;
                for (ri, bi) in r.iter_mut().zip(term) {
                    *ri += self.weight * bi;
                }
            }
        }
        self.solver.solve_in_place(r)
    }
}

/// Heun RK3 step bound `2.5 / rho` with a safety factor, for spectral radius `rho`.
pub fn rk3_step_limit(rho: f64) -> f64 {
    0.9 * 2.5 / rho
}
