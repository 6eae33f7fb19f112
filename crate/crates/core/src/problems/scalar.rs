//! Decoupled scalar test problems `w_i' = lambda_F,i w_i`, stabilized by
//! `p lambda_L,i w_i`. With `lambda_L = lambda_F` this is the modified test
//! equation with `pbar = p`.

use crate::error::{Error, Result};
use crate::steppers::{ImplicitSolve, ModeBasis, SpectralForm, SplitProblem};

#[derive(Clone, Debug)]
pub struct ScalarTest {
    pub lambda_f: Vec<f64>,
    pub lambda_l: Vec<f64>,
    pub p: f64,
}

impl ScalarTest {
    /// Modified test equation for each `lambda`, with ratio `pbar`.
    pub fn modified(lambdas: &[f64], pbar: f64) -> Self {
        ScalarTest {
            lambda_f: lambdas.to_vec(),
            lambda_l: lambdas.to_vec(),
            p: pbar,
        }
    }

    pub fn exact(&self, w0: &[f64], t: f64) -> Vec<f64> {
        w0.iter().zip(&self.lambda_f).map(|(w, l)| w * (l * t).exp()).collect()
    }
}

struct DiagonalSolve {
    inv: Vec<f64>,
}

impl ImplicitSolve for DiagonalSolve {
    fn solve(&self, _t: f64, r: &mut [f64]) -> Result<()> {
        for (x, d) in r.iter_mut().zip(&self.inv) {
            *x *= d;
        }
        Ok(())
    }
}

impl SplitProblem for ScalarTest {
    fn len(&self) -> usize {
        self.lambda_f.len()
    }

    fn rhs(&self, _t: f64, u: &[f64], out: &mut [f64]) -> Result<()> {
        for ((o, x), l) in out.iter_mut().zip(u).zip(&self.lambda_f) {
            *o = l * x;
        }
        Ok(())
    }

    fn implicit_part(&self, _t: f64, u: &[f64], out: &mut [f64]) -> Result<()> {
        for ((o, x), l) in out.iter_mut().zip(u).zip(&self.lambda_l) {
            *o = self.p * l * x;
        }
        Ok(())
    }

    fn implicit_solver(&self, a: f64, b: f64) -> Result<Box<dyn ImplicitSolve>> {
        let mut inv = Vec::with_capacity(self.len());
        for (mode, l) in self.lambda_l.iter().enumerate() {
            let d = a - b * self.p * l;
            if d == 0.0 {
                return Err(Error::SingularShift { mode, value: d });
            }
            inv.push(1.0 / d);
        }
        Ok(Box::new(DiagonalSolve { inv }))
    }

    fn spectral(&self) -> Option<SpectralForm> {
        Some(SpectralForm {
            symbol: self.lambda_l.iter().map(|l| self.p * l).collect(),
            basis: ModeBasis::Identity,
        })
    }

    fn explicit_step_limit(&self) -> Option<f64> {
        let rho = self.lambda_f.iter().map(|l| l.abs()).fold(0.0, f64::max);
        (rho > 0.0).then(|| 2.0 / rho)
    }
}
