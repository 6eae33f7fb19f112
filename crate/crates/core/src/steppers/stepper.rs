use std::collections::VecDeque;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scheme::{Coefficients, Scheme};
use crate::steppers::phi::{phi_real, PHI_MAX};
use crate::steppers::rk3::heun3_step;
use crate::steppers::{ImplicitSolve, SpectralForm, SplitProblem};

/// One past level with its split right-hand side, filled on first use.
struct Level {
    t: f64,
    u: Vec<f64>,
    f: Option<Vec<f64>>,
    g: Option<Vec<f64>>,
}

/// Per-mode exponential weights for one step size.
#[derive(Clone, Debug)]
pub struct PhiCache {
    pub dt: f64,
    /// `phi_k(dt mu)` for every mode.
    pub phi: [Vec<f64>; PHI_MAX + 1],
    /// `phi_0(dt mu / 2)` and `phi_1(dt mu / 2)`.
    pub half: [Vec<f64>; 2],
}

impl PhiCache {
    pub fn new(symbol: &[f64], dt: f64) -> Self {
        let mut phi: [Vec<f64>; PHI_MAX + 1] = Default::default();
        let mut half: [Vec<f64>; 2] = Default::default();
        for &mu in symbol {
            let full = phi_real(dt * mu);
            let h = phi_real(0.5 * dt * mu);
            for k in 0..=PHI_MAX {
                phi[k].push(full[k]);
            }
            half[0].push(h[0]);
            half[1].push(h[1]);
        }
        PhiCache { dt, phi, half }
    }
}

enum Engine {
    Multistep {
        coeffs: Coefficients,
        solver: Box<dyn ImplicitSolve>,
    },
    Ein {
        full: Box<dyn ImplicitSolve>,
        half: Box<dyn ImplicitSolve>,
    },
    Exponential {
        spectral: SpectralForm,
        cache: PhiCache,
    },
}

/// Fixed-step integrator for one scheme on one problem.
pub struct Stepper<'p> {
    problem: &'p dyn SplitProblem,
    scheme: Scheme,
    dt: f64,
    history: VecDeque<Level>,
    engine: Engine,
    steps: usize,
}

impl<'p> Stepper<'p> {
    /// Starts from `u0` at `t0`, filling multistep history with Heun RK3.
    pub fn new(problem: &'p dyn SplitProblem, scheme: Scheme, dt: f64, t0: f64, u0: &[f64]) -> Result<Self> {
        let mut s = Self::bare(problem, scheme, dt)?;
        if u0.len() != problem.len() {
            return Err(Error::GridMismatch);
        }
        s.history.push_front(Level::new(t0, u0.to_vec()));
        s.startup()?;
        Ok(s)
    }

    /// Starts from given levels, newest first, spaced by `dt` and ending at `t_newest`.
    pub fn with_history(
        problem: &'p dyn SplitProblem,
        scheme: Scheme,
        dt: f64,
        t_newest: f64,
        levels: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let mut s = Self::bare(problem, scheme, dt)?;
        if levels.len() != scheme.history_len() {
            return Err(Error::InvalidParameter(format!(
                "{scheme} needs {} history levels, got {}",
                scheme.history_len(),
                levels.len()
            )));
        }
        for (j, u) in levels.into_iter().enumerate() {
            if u.len() != problem.len() {
                return Err(Error::GridMismatch);
            }
            s.history.push_back(Level::new(t_newest - j as f64 * dt, u));
        }
        Ok(s)
    }

    fn bare(problem: &'p dyn SplitProblem, scheme: Scheme, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidParameter(format!("time step {dt}")));
        }
        Ok(Stepper {
            problem,
            scheme,
            dt,
            history: VecDeque::new(),
            engine: Self::engine(problem, scheme, dt)?,
            steps: 0,
        })
    }

    fn engine(problem: &dyn SplitProblem, scheme: Scheme, dt: f64) -> Result<Engine> {
        Ok(if let Some(coeffs) = scheme.coefficients() {
            let solver = problem.implicit_solver(coeffs.alpha[0], dt * coeffs.gamma[0])?;
            Engine::Multistep { coeffs, solver }
        } else if scheme == Scheme::Ein {
            Engine::Ein {
                full: problem.implicit_solver(1.0, dt)?,
                half: problem.implicit_solver(1.0, 0.5 * dt)?,
            }
        } else {
            let spectral = problem.spectral().ok_or_else(|| {
                Error::Unsupported(format!("{scheme} needs a diagonalizable (periodic) stabilizer"))
            })?;
            let cache = PhiCache::new(&spectral.symbol, dt);
            Engine::Exponential { spectral, cache }
        })
    }

    /// Fills the remaining history levels with Heun RK3, substepping when `dt`
    /// exceeds the problem's explicit step limit.
    fn startup(&mut self) -> Result<()> {
        let need = self.scheme.history_len() - 1;
        let m = match self.problem.explicit_step_limit() {
            Some(lim) if lim > 0.0 => (self.dt / lim).ceil().max(1.0) as usize,
            _ => 1,
        };
        let h = self.dt / m as f64;
        for _ in 0..need {
            let newest = &self.history[0];
            let (t0, mut u) = (newest.t, newest.u.clone());
            for i in 0..m {
                heun3_step(self.problem, t0 + i as f64 * h, h, &mut u)?;
            }
            self.check(&u)?;
            self.history.push_front(Level::new(t0 + self.dt, u));
        }
        Ok(())
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn time(&self) -> f64 {
        self.history[0].t
    }

    pub fn solution(&self) -> &[f64] {
        &self.history[0].u
    }

    /// Stored levels `(t, u)`, oldest first.
    pub fn levels(&self) -> impl Iterator<Item = (f64, &[f64])> {
        self.history.iter().rev().map(|l| (l.t, l.u.as_slice()))
    }

    /// Steps taken after startup.
    pub fn steps_taken(&self) -> usize {
        self.steps
    }

    /// Startup levels count as steps toward the final time.
    pub fn levels_advanced(&self) -> usize {
        self.steps + self.scheme.history_len() - 1
    }

    pub fn phi_cache(&self) -> Option<&PhiCache> {
        match &self.engine {
            Engine::Exponential { cache, .. } => Some(cache),
            _ => None,
        }
    }

    /// Changes the step size: rebuilds solvers and restarts from the newest level.
    pub fn set_dt(&mut self, dt: f64) -> Result<()> {
        if dt == self.dt {
            return Ok(());
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidParameter(format!("time step {dt}")));
        }
        self.engine = Self::engine(self.problem, self.scheme, dt)?;
        self.dt = dt;
        self.history.truncate(1);
        self.history[0].f = None;
        self.history[0].g = None;
        self.startup()
    }

    fn check(&self, u: &[f64]) -> Result<()> {
        if u.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite {
                step: self.levels_advanced() + 1,
            })
        }
    }

    fn ensure_split(&mut self, j: usize) -> Result<()> {
        let lvl = &mut self.history[j];
        if lvl.f.is_none() {
            let n = lvl.u.len();
            let mut f = vec![0.0; n];
            let mut g = vec![0.0; n];
            self.problem.rhs(lvl.t, &lvl.u, &mut f)?;
            self.problem.implicit_part(lvl.t, &lvl.u, &mut g)?;
            for (fi, gi) in f.iter_mut().zip(&g) {
                *fi -= gi;
            }
            lvl.f = Some(f);
            lvl.g = Some(g);
        }
        Ok(())
    }

    /// `N(u) = F(u) - g(u)` at `(t, u)`.
    fn explicit_part(&self, t: f64, u: &[f64]) -> Result<Vec<f64>> {
        let n = u.len();
        let mut f = vec![0.0; n];
        let mut g = vec![0.0; n];
        self.problem.rhs(t, u, &mut f)?;
        self.problem.implicit_part(t, u, &mut g)?;
        for (fi, gi) in f.iter_mut().zip(&g) {
            *fi -= gi;
        }
        Ok(f)
    }

    pub fn step(&mut self) -> Result<()> {
        let t = self.time();
        let dt = self.dt;
        let next = match self.scheme {
            s if s.is_multistep() => self.multistep()?,
            Scheme::Ein => self.ein()?,
            _ => self.exponential()?,
        };
        self.check(&next)?;
        self.history.push_front(Level::new(t + dt, next));
        self.history.truncate(self.scheme.history_len());
        self.steps += 1;
        Ok(())
    }

    pub fn advance(&mut self, n: usize) -> Result<()> {
        for _ in 0..n {
            self.step()?;
        }
        Ok(())
    }

    /// Steps until `t_end` (which must be a whole number of steps away).
    pub fn run_to(&mut self, t_end: f64) -> Result<()> {
        let remaining = (t_end - self.time()) / self.dt;
        let n = remaining.round();
        if n < 0.0 || (remaining - n).abs() > 1e-6 {
            return Err(Error::InvalidParameter(format!(
                "t_end {t_end} is not a whole number of steps of {} from {}",
                self.dt,
                self.time()
            )));
        }
        self.advance(n as usize)
    }

    fn multistep(&mut self) -> Result<Vec<f64>> {
        let s = self.scheme.history_len();
        for j in 0..s {
            self.ensure_split(j)?;
        }
        let Engine::Multistep { coeffs, solver } = &self.engine else {
            unreachable!()
        };
        let dt = self.dt;
        let n = self.problem.len();
        let mut r = vec![0.0; n];
        for j in 1..=s {
            let lvl = &self.history[j - 1];
            let (a, b, c) = (coeffs.alpha[j], dt * coeffs.beta[j - 1], dt * coeffs.gamma[j]);
            let f = lvl.f.as_ref().unwrap();
            let g = lvl.g.as_ref().unwrap();
            for i in 0..n {
                r[i] += -a * lvl.u[i] + b * f[i] + c * g[i];
            }
        }
        solver.solve(self.time() + dt, &mut r)?;
        Ok(r)
    }

    fn ein(&mut self) -> Result<Vec<f64>> {
        let Engine::Ein { full, half } = &self.engine else {
            unreachable!()
        };
        let (t, dt) = (self.time(), self.dt);
        let u = &self.history[0].u;
        // Each SBDF1 substep evaluates its own right-hand side.
        let f = self.explicit_part(t, u)?;
        let mut w: Vec<f64> = u.iter().zip(&f).map(|(x, y)| x + dt * y).collect();
        full.solve(t + dt, &mut w)?;

        let f = self.explicit_part(t, u)?;
        let mut v: Vec<f64> = u.iter().zip(&f).map(|(x, y)| x + 0.5 * dt * y).collect();
        half.solve(t + 0.5 * dt, &mut v)?;
        let f = self.explicit_part(t + 0.5 * dt, &v)?;
        for (vi, fi) in v.iter_mut().zip(&f) {
            *vi += 0.5 * dt * fi;
        }
        half.solve(t + dt, &mut v)?;
        Ok(v.iter().zip(&w).map(|(a, b)| 2.0 * a - b).collect())
    }

    fn exponential(&mut self) -> Result<Vec<f64>> {
        let Engine::Exponential { spectral, cache } = &self.engine else {
            unreachable!()
        };
        let (t, dt) = (self.time(), self.dt);
        let u = self.history[0].u.clone();
        let mu = &spectral.symbol;
        let modes = mu.len();
        // N in mode space: transform of F minus the diagonal part.
        let nhat = |tt: f64, x: &[f64], xhat: &[Complex64]| -> Result<Vec<Complex64>> {
            let mut f = vec![0.0; x.len()];
            self.problem.rhs(tt, x, &mut f)?;
            let mut fh = spectral.forward(&f);
            for k in 0..modes {
                fh[k] -= mu[k] * xhat[k];
            }
            Ok(fh)
        };
        let p = &cache.phi;
        let uh = spectral.forward(&u);
        let nu = nhat(t, &u, &uh)?;
        let mut out = vec![Complex64::new(0.0, 0.0); modes];
        match self.scheme {
            Scheme::Etdrk2 => {
                let a: Vec<Complex64> = (0..modes).map(|k| p[0][k] * uh[k] + dt * p[1][k] * nu[k]).collect();
                let na = nhat(t + dt, &spectral.inverse(&a), &a)?;
                for k in 0..modes {
                    out[k] = p[0][k] * uh[k] + dt * ((p[1][k] - p[2][k]) * nu[k] + p[2][k] * na[k]);
                }
            }
            Scheme::Etdrk4 => {
                let (e2, h1) = (&cache.half[0], &cache.half[1]);
                let a: Vec<Complex64> =
                    (0..modes).map(|k| e2[k] * uh[k] + dt * 0.5 * h1[k] * nu[k]).collect();
                let na = nhat(t + 0.5 * dt, &spectral.inverse(&a), &a)?;
                let b: Vec<Complex64> =
                    (0..modes).map(|k| e2[k] * uh[k] + dt * 0.5 * h1[k] * na[k]).collect();
                let nb = nhat(t + 0.5 * dt, &spectral.inverse(&b), &b)?;
                let c: Vec<Complex64> = (0..modes)
                    .map(|k| {
                        let a41 = 0.5 * h1[k] * (e2[k] - 1.0);
                        p[0][k] * uh[k] + dt * (a41 * nu[k] + h1[k] * nb[k])
                    })
                    .collect();
                let nc = nhat(t + dt, &spectral.inverse(&c), &c)?;
                for k in 0..modes {
                    let b1 = p[1][k] - 3.0 * p[2][k] + 4.0 * p[3][k];
                    let b23 = 2.0 * p[2][k] - 4.0 * p[3][k];
                    let b4 = 4.0 * p[3][k] - p[2][k];
                    out[k] = p[0][k] * uh[k] + dt * (b1 * nu[k] + b23 * (na[k] + nb[k]) + b4 * nc[k]);
                }
            }
            _ => unreachable!(),
        }
        Ok(spectral.inverse(&out))
    }
}

impl Level {
    fn new(t: f64, u: Vec<f64>) -> Self {
        Level { t, u, f: None, g: None }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::ScalarTest;
    use crate::stability::{amp_poly, roots::horner, xi_ein, xi_etdrk, xi_sbdf1};
    use crate::steppers::Counted;

    fn one_step(s: Scheme, z: f64, pbar: f64) -> f64 {
        let prob = ScalarTest::modified(&[z], pbar);
        let mut st = Stepper::with_history(&prob, s, 1.0, 0.0, vec![vec![1.0]]).unwrap();
        st.step().unwrap();
        st.solution()[0]
    }

    #[test]
    fn one_step_ratios_match_analysis() {
        for (z, pb) in [(-0.5, 0.5), (-20.0, 0.9), (-3e4, 2.0), (-1.0, 1.0)] {
            let zc = num_complex::Complex64::new(z, 0.0);
            let r = one_step(Scheme::Sbdf1, z, pb);
            assert!((r - xi_sbdf1(zc, pb).unwrap().re).abs() < 1e-13);
            let r = one_step(Scheme::Ein, z, pb);
            assert!((r - xi_ein(zc, pb).unwrap().re).abs() < 1e-12);
            for s in [Scheme::Etdrk2, Scheme::Etdrk4] {
                let r = one_step(s, z, pb);
                assert!((r - xi_etdrk(s, zc, pb).unwrap().re).abs() < 1e-12, "{s}");
            }
        }
    }

    #[test]
    fn pure_implicit_limit_is_backward_euler() {
        let z = -7.0;
        assert!((one_step(Scheme::Sbdf1, z, 1.0) - 1.0 / (1.0 - z)).abs() < 1e-15);
    }

    #[test]
    fn exponential_exact_on_linear_part() {
        for s in [Scheme::Etdrk2, Scheme::Etdrk4] {
            for z in [-1e-3, -0.3, -5.0, -400.0] {
                let r = one_step(s, z, 1.0);
                assert!((r - z.exp()).abs() <= 1e-13 * z.exp().max(1e-300) + 1e-300, "{s} z={z}");
            }
        }
    }

    #[test]
    fn multistep_sequence_obeys_amp_poly() {
        for s in Scheme::MULTISTEP {
            let (z, pb) = (-3.3, 1.1);
            let prob = ScalarTest::modified(&[z], pb);
            let k = s.history_len();
            let levels: Vec<Vec<f64>> = (0..k).map(|j| vec![1.0 + 0.3 * j as f64]).collect();
            let mut seq: Vec<f64> = levels.iter().rev().map(|v| v[0]).collect();
            let mut st = Stepper::with_history(&prob, s, 1.0, 0.0, levels).unwrap();
            st.step().unwrap();
            seq.push(st.solution()[0]);
            let poly = amp_poly(s, num_complex::Complex64::new(z, 0.0), pb).unwrap();
            // sum_j c_j w^{n+1-j} = 0 with c the polynomial coefficients.
            let resid: f64 = poly.coeffs.iter().zip(seq.iter().rev()).map(|(c, w)| c.re * w).sum();
            let scale: f64 = poly.coeffs.iter().map(|c| c.norm()).sum::<f64>();
            assert!(resid.abs() < 1e-12 * scale, "{s}: {resid}");
            let _ = horner;
        }
    }

    fn global_error(s: Scheme, pbar: f64, n: usize) -> f64 {
        let prob = ScalarTest::modified(&[-1.0], pbar);
        let t = 1.0;
        let mut st = Stepper::new(&prob, s, t / n as f64, 0.0, &[1.0]).unwrap();
        st.run_to(t).unwrap();
        (st.solution()[0] - (-t).exp()).abs()
    }

    #[test]
    fn observed_orders() {
        let cases = [
            (Scheme::Sbdf1, 1.0, 1.0, 0.1),
            (Scheme::Cnab, 1.0, 2.0, 0.1),
            (Scheme::Cnlf, 0.5, 2.0, 0.1),
            (Scheme::Sbdf2, 0.75, 2.0, 0.1),
            (Scheme::Sbdf3, 1.0, 3.0, 0.15),
            (Scheme::Sbdf4, 1.0, 4.0, 0.2),
            (Scheme::Ein, 1.0, 2.0, 0.1),
            (Scheme::Etdrk2, 0.5, 2.0, 0.1),
            (Scheme::Etdrk4, 0.5, 4.0, 0.2),
        ];
        for (s, pb, order, tol) in cases {
            let e1 = global_error(s, pb, 40);
            let e2 = global_error(s, pb, 80);
            let rate = (e1 / e2).log2();
            assert!((rate - order).abs() <= tol, "{s}: rate {rate}");
        }
    }

    #[test]
    fn rhs_evaluation_counts() {
        let prob = ScalarTest::modified(&[-2.0, -50.0], 1.0);
        for s in Scheme::ALL {
            let counted = Counted::new(&prob);
            let mut st = Stepper::new(&counted, s, 0.01, 0.0, &[1.0, 1.0]).unwrap();
            st.advance(2).unwrap();
            let before = counted.calls();
            st.advance(5).unwrap();
            assert_eq!(counted.calls() - before, 5 * s.rhs_evals_per_step(), "{s}");
        }
    }

    #[test]
    fn phi_cache_recurrence() {
        let prob = ScalarTest::modified(&[-1e-6, -0.4, -3.0, -1e5], 1.0);
        let st = Stepper::new(&prob, Scheme::Etdrk4, 0.7, 0.0, &[1.0; 4]).unwrap();
        let c = st.phi_cache().unwrap();
        let fact = [1.0, 1.0, 0.5];
        for (m, l) in prob.lambda_l.iter().enumerate() {
            let z = 0.7 * l;
            for k in 0..3 {
                let r = z * c.phi[k + 1][m] - c.phi[k][m] + fact[k];
                assert!(r.abs() <= 1e-12, "mode {m} k {k}");
            }
        }
    }

    #[test]
    fn set_dt_restarts() {
        let prob = ScalarTest::modified(&[-1.0], 1.0);
        let mut st = Stepper::new(&prob, Scheme::Sbdf2, 0.1, 0.0, &[1.0]).unwrap();
        st.advance(3).unwrap();
        st.set_dt(0.05).unwrap();
        assert_eq!(st.dt(), 0.05);
        st.step().unwrap();
        assert!((st.time() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn exponential_requires_spectral_form() {
        let p = crate::problems::ammc::ammc_problem(16, 0.1, 1.0).unwrap();
        assert!(Stepper::new(&p, Scheme::Etdrk2, 0.01, 0.0, p.initial.values()).is_err());
    }
}
