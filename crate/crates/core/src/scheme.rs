//! Scheme identifiers and the coefficients the steppers use.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    Sbdf1,
    Cnab,
    Cnlf,
    Sbdf2,
    Sbdf3,
    Sbdf4,
    Ein,
    Etdrk2,
    Etdrk4,
}

impl Scheme {
    pub const ALL: [Scheme; 9] = [
        Scheme::Sbdf1,
        Scheme::Cnab,
        Scheme::Cnlf,
        Scheme::Sbdf2,
        Scheme::Sbdf3,
        Scheme::Sbdf4,
        Scheme::Ein,
        Scheme::Etdrk2,
        Scheme::Etdrk4,
    ];

    pub const MULTISTEP: [Scheme; 6] = [
        Scheme::Sbdf1,
        Scheme::Cnab,
        Scheme::Cnlf,
        Scheme::Sbdf2,
        Scheme::Sbdf3,
        Scheme::Sbdf4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Sbdf1 => "sbdf1",
            Scheme::Cnab => "cnab",
            Scheme::Cnlf => "cnlf",
            Scheme::Sbdf2 => "sbdf2",
            Scheme::Sbdf3 => "sbdf3",
            Scheme::Sbdf4 => "sbdf4",
            Scheme::Ein => "ein",
            Scheme::Etdrk2 => "etdrk2",
            Scheme::Etdrk4 => "etdrk4",
        }
    }

    pub fn order(self) -> usize {
        match self {
            Scheme::Sbdf1 => 1,
            Scheme::Cnab | Scheme::Cnlf | Scheme::Sbdf2 => 2,
            Scheme::Sbdf3 => 3,
            Scheme::Sbdf4 => 4,
            Scheme::Ein | Scheme::Etdrk2 => 2,
            Scheme::Etdrk4 => 4,
        }
    }

    /// Number of past levels a step consumes.
    pub fn history_len(self) -> usize {
        match self {
            Scheme::Sbdf1 => 1,
            Scheme::Cnab | Scheme::Cnlf | Scheme::Sbdf2 => 2,
            Scheme::Sbdf3 => 3,
            Scheme::Sbdf4 => 4,
            Scheme::Ein | Scheme::Etdrk2 | Scheme::Etdrk4 => 1,
        }
    }

    /// Nonlinear right-hand side evaluations per step.
    pub fn rhs_evals_per_step(self) -> usize {
        match self {
            Scheme::Ein => 3,
            Scheme::Etdrk2 => 2,
            Scheme::Etdrk4 => 4,
            _ => 1,
        }
    }

    pub fn is_multistep(self) -> bool {
        self.coefficients().is_some()
    }

    pub fn is_exponential(self) -> bool {
        matches!(self, Scheme::Etdrk2 | Scheme::Etdrk4)
    }

    /// Admissible `pbar` range on the real negative axis; `None` upper means unbounded.
    pub fn pbar_interval(self) -> (f64, Option<f64>) {
        match self {
            Scheme::Sbdf1 | Scheme::Cnlf | Scheme::Etdrk2 | Scheme::Etdrk4 => (0.5, None),
            Scheme::Cnab => (1.0, None),
            Scheme::Sbdf2 => (0.75, None),
            Scheme::Sbdf3 => (0.875, Some(2.0)),
            Scheme::Sbdf4 => (0.9375, Some(1.25)),
            Scheme::Ein => (2.0 / 3.0, None),
        }
    }

    pub fn pbar_min(self) -> f64 {
        self.pbar_interval().0
    }

    /// Linear multistep coefficients, `None` for one-step schemes.
    pub fn coefficients(self) -> Option<Coefficients> {
        let c = |alpha: &[f64], beta: &[f64], gamma: &[f64]| Coefficients {
            alpha: alpha.to_vec(),
            beta: beta.to_vec(),
            gamma: gamma.to_vec(),
        };
        Some(match self {
            Scheme::Sbdf1 => c(&[1.0, -1.0], &[1.0], &[1.0, 0.0]),
            Scheme::Cnab => c(&[1.0, -1.0, 0.0], &[1.5, -0.5], &[0.5, 0.5, 0.0]),
            Scheme::Cnlf => c(&[0.5, 0.0, -0.5], &[1.0, 0.0], &[0.5, 0.0, 0.5]),
            Scheme::Sbdf2 => c(&[1.5, -2.0, 0.5], &[2.0, -1.0], &[1.0, 0.0, 0.0]),
            Scheme::Sbdf3 => c(
                &[11.0 / 6.0, -3.0, 1.5, -1.0 / 3.0],
                &[3.0, -3.0, 1.0],
                &[1.0, 0.0, 0.0, 0.0],
            ),
            Scheme::Sbdf4 => c(
                &[25.0 / 12.0, -4.0, 3.0, -4.0 / 3.0, 0.25],
                &[4.0, -6.0, 4.0, -1.0],
                &[1.0, 0.0, 0.0, 0.0, 0.0],
            ),
            _ => return None,
        })
    }
}

/// `sum_j alpha_j u^{n+1-j} = dt sum_{j>=1} beta_{j-1} f^{n+1-j} + dt sum_j gamma_j g^{n+1-j}`
/// with `f` explicit and `g` implicit.
#[derive(Clone, Debug, PartialEq)]
pub struct Coefficients {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.name() == lower)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown scheme '{s}'")))
    }
}
