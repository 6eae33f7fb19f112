//! Time steppers for `u' = N(u) + g(u)`, where `g` is the linear stabilizing
//! part (treated implicitly or exactly) and `N = F - g` is explicit.

pub mod phi;
pub mod rk3;
mod stepper;

use std::sync::atomic::{AtomicUsize, Ordering};

use num_complex::Complex64;

use crate::error::Result;
use crate::fft::PeriodicTransform;

pub use phi::{phi_all, phi_closed, phi_contour, phi_eval, phi_real};
pub use rk3::{heun3_step, reference_solve};
pub use stepper::{PhiCache, Stepper};

/// Solver for `a u - b g(u, t) = r`, prepared once for fixed `(a, b)`.
pub trait ImplicitSolve: Send + Sync {
    /// Overwrites `r` with the solution `u`.
    fn solve(&self, t: f64, r: &mut [f64]) -> Result<()>;
}

/// Basis in which the implicit part is diagonal.
#[derive(Clone, Debug)]
pub enum ModeBasis {
    /// Components are already decoupled modes.
    Identity,
    Fourier(PeriodicTransform),
}

/// Diagonal form of the implicit part: `g(u) = sum_k mu_k u_k e_k` with real `mu_k`.
#[derive(Clone, Debug)]
pub struct SpectralForm {
    pub symbol: Vec<f64>,
    pub basis: ModeBasis,
}

impl SpectralForm {
    pub fn forward(&self, u: &[f64]) -> Vec<Complex64> {
        match &self.basis {
            ModeBasis::Identity => u.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            ModeBasis::Fourier(t) => t.forward(u),
        }
    }

    pub fn inverse(&self, m: &[Complex64]) -> Vec<f64> {
        match &self.basis {
            ModeBasis::Identity => m.iter().map(|c| c.re).collect(),
            ModeBasis::Fourier(t) => t.inverse(m),
        }
    }
}

/// A semi-discrete problem `u' = F(u, t)` together with its stabilizing split.
pub trait SplitProblem: Sync {
    /// Number of unknowns.
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Full right-hand side `F(u, t)`.
    fn rhs(&self, t: f64, u: &[f64], out: &mut [f64]) -> Result<()>;

    /// Stabilizing part `g(u, t)`, affine in `u`.
    fn implicit_part(&self, t: f64, u: &[f64], out: &mut [f64]) -> Result<()>;

    /// Prepares a solver for `a u - b g(u, t) = r`.
    fn implicit_solver(&self, a: f64, b: f64) -> Result<Box<dyn ImplicitSolve>>;

    /// Diagonalization of `g`, required by the exponential integrators.
    fn spectral(&self) -> Option<SpectralForm> {
        None
    }

    /// Largest step the explicit Runge-Kutta startup may take on `F`.
    fn explicit_step_limit(&self) -> Option<f64> {
        None
    }
}

/// Counts calls to the nonlinear right-hand side of a wrapped problem.
pub struct Counted<'a, P: SplitProblem + ?Sized> {
    inner: &'a P,
    calls: AtomicUsize,
}

impl<'a, P: SplitProblem + ?Sized> Counted<'a, P> {
    pub fn new(inner: &'a P) -> Self {
        Counted {
            inner,
            calls: AtomicUsize::new(0),
        }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::Relaxed)
    }
}

impl<P: SplitProblem + ?Sized> SplitProblem for Counted<'_, P> {
    fn len(&self) -> usize {
        self.inner.len()
    }

    fn rhs(&self, t: f64, u: &[f64], out: &mut [f64]) -> Result<()> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.rhs(t, u, out)
    }

    fn implicit_part(&self, t: f64, u: &[f64], out: &mut [f64]) -> Result<()> {
        self.inner.implicit_part(t, u, out)
    }

    fn implicit_solver(&self, a: f64, b: f64) -> Result<Box<dyn ImplicitSolve>> {
        self.inner.implicit_solver(a, b)
    }

    fn spectral(&self) -> Option<SpectralForm> {
        self.inner.spectral()
    }

    fn explicit_step_limit(&self) -> Option<f64> {
        self.inner.explicit_step_limit()
    }
}
