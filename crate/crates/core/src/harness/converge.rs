//! Convergence ladders against a reference solution.

use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::norm_inf;
use crate::harness::cache;
use crate::harness::csv::{num, Table};
use crate::problems::ProblemDef;
use crate::scheme::Scheme;
use crate::steppers::{reference_solve, Stepper};

/// `nbar = steps x RHS evaluations per step`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WorkEstimate {
    pub steps: usize,
    pub evals_per_step: usize,
}

impl WorkEstimate {
    pub fn new(scheme: Scheme, steps: usize) -> Self {
        WorkEstimate {
            steps,
            evals_per_step: scheme.rhs_evals_per_step(),
        }
    }

    pub fn nbar(&self) -> usize {
        self.steps * self.evals_per_step
    }

    /// Steps giving exactly `nbar`, if it divides.
    pub fn steps_for(scheme: Scheme, nbar: usize) -> Option<usize> {
        let e = scheme.rhs_evals_per_step();
        (nbar % e == 0).then_some(nbar / e)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub dt: f64,
    pub steps: usize,
    /// `None` when the run diverged.
    pub error: Option<f64>,
    /// `log2(e(2 dt) / e(dt))`; undefined on the first row and next to a divergence.
    pub rate: Option<f64>,
    pub work: WorkEstimate,
    pub wall: Duration,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub scheme: Scheme,
    pub p: f64,
    pub reference: String,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    pub fn rates(&self) -> Vec<Option<f64>> {
        self.rows.iter().skip(1).map(|r| r.rate).collect()
    }

    pub fn max_rate(&self) -> Option<f64> {
        self.rows.iter().filter_map(|r| r.rate).reduce(f64::max)
    }

    pub fn diverged(&self) -> bool {
        self.rows.iter().any(|r| r.error.is_none())
    }

    /// Least-squares slope of `log e` against `log dt` over the finite rows.
    pub fn fitted_order(&self) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .rows
            .iter()
            .filter_map(|r| r.error.map(|e| (r.dt.ln(), e.ln())))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        Some(sxy / sxx)
    }

    /// Deterministic table; wall-clock times are left out.
    pub fn table(&self) -> Table {
        let mut t = Table::new(&["scheme", "p", "dt", "steps", "nbar", "error", "rate"]);
        for r in &self.rows {
            t.push(vec![
                self.scheme.name().to_string(),
                num(self.p),
                num(r.dt),
                r.steps.to_string(),
                r.work.nbar().to_string(),
                r.error.map_or("diverge".to_string(), num),
                r.rate.map_or(String::new(), num),
            ]);
        }
        t
    }

    pub fn total_wall(&self) -> Duration {
        self.rows.iter().map(|r| r.wall).sum()
    }
}

/// `base, base/2, ..., base/2^(count-1)`.
pub fn halving_ladder(base: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| base / (1u64 << k) as f64).collect()
}

/// `||u - u_ref||_inf / ||u_ref||_inf`.
pub fn max_rel_error(u: &[f64], reference: &[f64]) -> f64 {
    let diff = u.iter().zip(reference).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
    diff / norm_inf(reference)
}

/// Heun RK3 reference at `steps` uniform steps to the problem's final time,
/// cached on disk under `descriptor`.
pub fn reference(problem: &ProblemDef, steps: usize, descriptor: &str) -> Result<Vec<f64>> {
    let key = format!(
        "{descriptor}|grid {:?} {:?}|T {:e}|steps {steps}",
        problem.grid.extents(),
        (0..problem.grid.dim()).map(|a| problem.grid.length(a)).collect::<Vec<_>>(),
        problem.final_time
    );
    cache::cached(&key, || {
        reference_solve(problem, problem.initial.values(), 0.0, problem.final_time, steps)
    })
}

fn run_one(problem: &ProblemDef, scheme: Scheme, dt: f64) -> Result<Option<(Vec<f64>, usize)>> {
    let steps = (problem.final_time / dt).round() as usize;
    let attempt = Stepper::new(problem, scheme, dt, 0.0, problem.initial.values()).and_then(|mut st| {
        st.run_to(problem.final_time)?;
        Ok(st.solution().to_vec())
    });
    match attempt {
        Ok(u) => Ok(Some((u, steps))),
        Err(Error::NonFinite { .. }) | Err(Error::Domain { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Runs the ladder in parallel and tabulates errors and rates.
pub fn converge(
    problem: &ProblemDef,
    scheme: Scheme,
    ladder: &[f64],
    reference: &[f64],
    descriptor: &str,
) -> Result<ConvergenceReport> {
    let runs: Vec<Result<(Option<f64>, usize, Duration)>> = ladder
        .par_iter()
        .map(|&dt| {
            let start = Instant::now();
            let out = run_one(problem, scheme, dt)?;
            let wall = start.elapsed();
            let steps = (problem.final_time / dt).round() as usize;
            Ok(match out {
                Some((u, n)) => {
                    let e = max_rel_error(&u, reference);
                    (e.is_finite().then_some(e), n, wall)
                }
                None => (None, steps, wall),
            })
        })
        .collect();
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(ladder.len());
    for (i, r) in runs.into_iter().enumerate() {
        let (error, steps, wall) = r?;
        let rate = match (i.checked_sub(1).and_then(|j| rows[j].error), error) {
            (Some(prev), Some(e)) if e > 0.0 => Some((prev / e).log2()),
            _ => None,
        };
        rows.push(ConvergenceRow {
            dt: ladder[i],
            steps,
            error,
            rate,
            work: WorkEstimate::new(scheme, steps),
            wall,
        });
    }
    Ok(ConvergenceReport {
        scheme,
        p: problem.stabilizer.p,
        reference: descriptor.to_string(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::heat::heat_problem;

    #[test]
    fn work_estimates() {
        assert_eq!(WorkEstimate::new(Scheme::Ein, 10).nbar(), 30);
        assert_eq!(WorkEstimate::new(Scheme::Etdrk2, 10).nbar(), 20);
        assert_eq!(WorkEstimate::new(Scheme::Etdrk4, 10).nbar(), 40);
        assert_eq!(WorkEstimate::new(Scheme::Sbdf2, 10).nbar(), 10);
        assert_eq!(WorkEstimate::steps_for(Scheme::Etdrk2, 100), Some(50));
        assert_eq!(WorkEstimate::steps_for(Scheme::Ein, 100), None);
    }

    #[test]
    fn heat_ladder_rates() {
        let prob = heat_problem(2.0 * std::f64::consts::PI, 32, 0.75, 1.0).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let steps = 4000;
        let uref = cache::cached_in(Some(dir.path()), "heat-test", || {
            reference_solve(&prob, prob.initial.values(), 0.0, 1.0, steps)
        })
        .unwrap();
        let ladder = halving_ladder(0.1, 4);
        let rep = converge(&prob, Scheme::Sbdf2, &ladder, &uref, "heat-test").unwrap();
        assert!(rep.rows[0].rate.is_none());
        assert!(rep.rows.iter().all(|r| r.error.unwrap() > 0.0));
        let last = rep.rows.last().unwrap().rate.unwrap();
        assert!((last - 2.0).abs() < 0.2, "{last}");
        assert!((rep.fitted_order().unwrap() - 2.0).abs() < 0.3);
        let csv = rep.table().render();
        assert!(csv.starts_with("scheme,p,dt,steps,nbar,error,rate\nsbdf2,"));
    }

    #[test]
    fn fitted_order_of_exact_power_law() {
        let rows = halving_ladder(1.0, 5)
            .into_iter()
            .map(|dt| ConvergenceRow {
                dt,
                steps: 1,
                error: Some(3.0 * dt.powf(1.5)),
                rate: None,
                work: WorkEstimate::new(Scheme::Sbdf1, 1),
                wall: Duration::ZERO,
            })
            .collect();
        let rep = ConvergenceReport {
            scheme: Scheme::Sbdf1,
            p: 1.0,
            reference: String::new(),
            rows,
        };
        assert!((rep.fitted_order().unwrap() - 1.5).abs() < 1e-12);
    }
}
