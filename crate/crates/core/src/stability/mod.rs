//! Stability of linearly stabilized schemes on the modified test equation
//! `w' = (1 - pbar) lambda w + pbar lambda w`, with `z = lambda dt`.
//!
//! Multistep schemes are judged by the roots of their amplification
//! polynomial (simple von Neumann), one-step schemes by the modulus of their
//! amplification factor. Admissible `pbar` ranges are recovered by scanning.

pub mod local_error;
pub mod roots;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scheme::Scheme;
use crate::steppers::phi::phi_all;

pub use local_error::{local_error_fit, quoted_error_constant, ErrorConstantFit};
pub use roots::{roots, simple_von_neumann, spectral_radius};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Amplification polynomial coefficients, highest degree first.
#[derive(Clone, Debug, PartialEq)]
pub struct AmpPoly {
    pub scheme: Scheme,
    pub coeffs: Vec<Complex64>,
}

impl AmpPoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn roots(&self) -> Result<Vec<Complex64>> {
        roots(&self.coeffs)
    }

    pub fn is_simple_von_neumann(&self) -> Result<bool> {
        simple_von_neumann(&self.coeffs)
    }
}

/// Amplification polynomial of a multistep scheme at `(z, pbar)`.
pub fn amp_poly(scheme: Scheme, z: Complex64, pbar: f64) -> Result<AmpPoly> {
    let q = 1.0 - pbar;
    let zq = z * q;
    let one = c(1.0);
    let coeffs = match scheme {
        Scheme::Sbdf1 => vec![one - z * pbar, -(one + zq)],
        Scheme::Cnab => vec![
            one - z * pbar / 2.0,
            -(one + z * (1.5 - pbar)),
            zq / 2.0,
        ],
        Scheme::Cnlf => vec![one - z * pbar, -2.0 * zq, -(one + z * pbar)],
        Scheme::Sbdf2 => vec![c(1.5) - z * pbar, -2.0 * (one + zq), c(0.5) + zq],
        Scheme::Sbdf3 => vec![
            c(11.0 / 6.0) - z * pbar,
            -3.0 * (one + zq),
            1.5 * (one + 2.0 * zq),
            -(one + 3.0 * zq) / 3.0,
        ],
        Scheme::Sbdf4 => vec![
            c(25.0 / 12.0) - z * pbar,
            -4.0 * (one + zq),
            3.0 * (one + 2.0 * zq),
            -4.0 / 3.0 * (one + 3.0 * zq),
            0.25 * (one + 4.0 * zq),
        ],
        other => {
            return Err(Error::InvalidParameter(format!(
                "{other} has no amplification polynomial"
            )))
        }
    };
    Ok(AmpPoly { scheme, coeffs })
}

/// Polynomial whose roots are the `z -> -infinity` limits of the
/// amplification roots: the coefficients multiplying `z`.
pub fn limit_poly(scheme: Scheme, pbar: f64) -> Result<AmpPoly> {
    // Every coefficient is affine in z.
    let at1 = amp_poly(scheme, c(1.0), pbar)?;
    let at0 = amp_poly(scheme, c(0.0), pbar)?;
    let coeffs = at1.coeffs.iter().zip(&at0.coeffs).map(|(a, b)| a - b).collect();
    Ok(AmpPoly { scheme, coeffs })
}

/// Two-step second-order family, parametrized by `gamma` and the ratio `rho_bar`:
/// `(gamma + 1/2 - rho z) xi^2 - (2 gamma + z (gamma + 1 - 2 rho)) xi + gamma - 1/2 + z (gamma - rho)`.
///
/// `gamma = 1` is SBDF2 (`rho = pbar`), `gamma = 1/2` is CNAB and `gamma = 0`
/// is CNLF halved (both with `rho = pbar / 2`).
pub fn amp_poly_family2(gamma: f64, z: Complex64, rho_bar: f64) -> Result<Vec<Complex64>> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidParameter(format!("gamma {gamma} outside [0, 1]")));
    }
    Ok(vec![
        c(gamma + 0.5) - z * rho_bar,
        -(c(2.0 * gamma) + z * (gamma + 1.0 - 2.0 * rho_bar)),
        c(gamma - 0.5) + z * (gamma - rho_bar),
    ])
}

fn check_pole(d: Complex64) -> Result<()> {
    if d.norm() < 1e-300 {
        return Err(Error::InvalidParameter("amplification factor has a pole here".into()));
    }
    Ok(())
}

/// SBDF1 amplification factor `1 + z / (1 - pbar z)`.
pub fn xi_sbdf1(z: Complex64, pbar: f64) -> Result<Complex64> {
    let d = 1.0 - pbar * z;
    check_pole(d)?;
    Ok(1.0 + z / d)
}

/// Amplification factor of EIN: two half steps of SBDF1, extrapolated against one full step.
pub fn xi_ein(z: Complex64, pbar: f64) -> Result<Complex64> {
    let half = xi_sbdf1(z / 2.0, pbar)?;
    Ok(2.0 * half * half - xi_sbdf1(z, pbar)?)
}

/// The same factor as a single rational function.
pub fn xi_ein_closed(z: Complex64, pbar: f64) -> Result<Complex64> {
    let d1 = 1.0 - pbar * z;
    let d2 = 2.0 - pbar * z;
    check_pole(d1)?;
    check_pole(d2)?;
    let num = pbar * (3.0 * pbar - 2.0) * z * z + 2.0 * (1.0 - 4.0 * pbar) * z + 4.0;
    Ok(1.0 + z * num / (d1 * d2 * d2))
}

/// `z -> -infinity` limit of the EIN factor.
pub fn ein_limit(pbar: f64) -> f64 {
    (pbar * pbar - 3.0 * pbar + 2.0) / (pbar * pbar)
}

/// Amplification factor of ETDRK2/ETDRK4 on the modified test equation:
/// the `pbar` part is integrated exactly, the rest by the exponential tableau.
pub fn xi_etdrk(scheme: Scheme, z: Complex64, pbar: f64) -> Result<Complex64> {
    let zl = z * pbar;
    let zn = z * (1.0 - pbar);
    match scheme {
        Scheme::Etdrk2 => {
            let p = phi_all(zl);
            let u2 = p[0] + zn * p[1];
            Ok(p[0] + zn * ((p[1] - p[2]) + p[2] * u2))
        }
        Scheme::Etdrk4 => {
            let p = phi_all(zl);
            let h = phi_all(zl / 2.0);
            let a21 = 0.5 * h[1];
            let a41 = 0.5 * h[1] * (h[0] - 1.0);
            let ua = h[0] + zn * a21;
            let ub = h[0] + zn * a21 * ua;
            let uc = p[0] + zn * (a41 + h[1] * ub);
            let b1 = p[1] - 3.0 * p[2] + 4.0 * p[3];
            let b23 = 2.0 * p[2] - 4.0 * p[3];
            let b4 = 4.0 * p[3] - p[2];
            Ok(p[0] + zn * (b1 + b23 * (ua + ub) + b4 * uc))
        }
        other => Err(Error::InvalidParameter(format!("{other} is not exponential"))),
    }
}

/// Tolerance-aware stability of one scheme at one `(z, pbar)` sample.
pub fn stable_at(scheme: Scheme, z: Complex64, pbar: f64) -> bool {
    let one_step = |x: Result<Complex64>| {
        x.map(|v| v.norm() <= 1.0 + roots::MODULUS_TOL).unwrap_or(false)
    };
    match scheme {
        Scheme::Ein => one_step(xi_ein(z, pbar)),
        Scheme::Etdrk2 | Scheme::Etdrk4 => one_step(xi_etdrk(scheme, z, pbar)),
        _ => amp_poly(scheme, z, pbar)
            .and_then(|p| p.is_simple_von_neumann())
            .unwrap_or(false),
    }
}

/// Stability of the `z -> -infinity` limit.
fn limit_stable(scheme: Scheme, pbar: f64) -> bool {
    match damping_limit(scheme, pbar) {
        Ok(d) => {
            if scheme.is_multistep() {
                limit_poly(scheme, pbar)
                    .and_then(|p| p.is_simple_von_neumann())
                    .unwrap_or(false)
            } else {
                d <= 1.0 + roots::MODULUS_TOL
            }
        }
        Err(_) => false,
    }
}

/// Number of log-spaced magnitudes in the default real `z` sample.
pub const Z_SAMPLES: usize = 400;

/// `0` and `-10^e` for 400 exponents evenly spaced in `[-6, 12]`.
pub fn real_z_samples() -> Vec<Complex64> {
    let mut z = vec![c(0.0)];
    for i in 0..Z_SAMPLES {
        let e = -6.0 + 18.0 * i as f64 / (Z_SAMPLES - 1) as f64;
        z.push(c(-(10f64.powf(e))));
    }
    z
}

/// Real samples plus eight rays with arguments evenly spaced in `[91, 179]`
/// degrees. Coefficients are real in `pbar`, so the mirrored rays give
/// conjugate roots and need not be sampled.
pub fn complex_z_samples() -> Vec<Complex64> {
    let mut z = real_z_samples();
    let mags: Vec<f64> = z[1..].iter().map(|v| v.norm()).collect();
    for r in 0..8 {
        let deg = 91.0 + 88.0 * r as f64 / 7.0;
        let arg = deg.to_radians();
        z.extend(mags.iter().map(|&m| Complex64::from_polar(m, arg)));
    }
    z
}

/// Resolution of the fine part of the default `pbar` grid.
pub const PBAR_STEP: f64 = 5e-4;
/// Largest `pbar` sampled by the default grid.
pub const PBAR_MAX: f64 = 1e3;

/// `[0, 4]` at [`PBAR_STEP`], then 200 log-spaced points up to [`PBAR_MAX`].
pub fn default_pbar_grid() -> Vec<f64> {
    let fine = (4.0 / PBAR_STEP).round() as usize;
    let mut g: Vec<f64> = (0..=fine).map(|i| i as f64 * PBAR_STEP).collect();
    let coarse = 200;
    for i in 1..=coarse {
        g.push(4.0 * (PBAR_MAX / 4.0).powf(i as f64 / coarse as f64));
    }
    g
}

#[derive(Clone, Debug, PartialEq)]
pub struct PbarInterval {
    pub lower: f64,
    /// `f64::INFINITY` when unbounded.
    pub upper: f64,
    /// Grid spacing at the lower endpoint.
    pub resolution: f64,
}

impl PbarInterval {
    pub fn is_unbounded(&self) -> bool {
        self.upper.is_infinite()
    }
}

/// Stability flag for each grid value of `pbar` (stable at every `z` sample).
pub fn stability_mask(scheme: Scheme, z_samples: &[Complex64], pbar_grid: &[f64]) -> Vec<bool> {
    // Large |z| is where most parameters fail; test it first.
    let mut order: Vec<Complex64> = z_samples.to_vec();
    order.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
    pbar_grid
        .par_iter()
        .map(|&pb| order.iter().all(|&z| stable_at(scheme, z, pb)))
        .collect()
}

/// Largest contiguous run of stable grid points, `None` if there is none.
pub fn pbar_range_scan(
    scheme: Scheme,
    z_samples: &[Complex64],
    pbar_grid: &[f64],
) -> Option<PbarInterval> {
    let mask = stability_mask(scheme, z_samples, pbar_grid);
    interval_from_mask(scheme, pbar_grid, &mask)
}

pub fn interval_from_mask(scheme: Scheme, pbar_grid: &[f64], mask: &[bool]) -> Option<PbarInterval> {
    let mut best: Option<(usize, usize)> = None;
    let mut i = 0;
    while i < mask.len() {
        if mask[i] {
            let start = i;
            while i + 1 < mask.len() && mask[i + 1] {
                i += 1;
            }
            if best.map_or(true, |(s, e)| i - start > e - s) {
                best = Some((start, i));
            }
        }
        i += 1;
    }
    let (s, e) = best?;
    let resolution = if s + 1 < pbar_grid.len() {
        pbar_grid[s + 1] - pbar_grid[s]
    } else {
        0.0
    };
    let reaches_end = e == pbar_grid.len() - 1;
    let upper = if reaches_end && unbounded_beyond(scheme, pbar_grid[e]) {
        f64::INFINITY
    } else {
        pbar_grid[e]
    };
    Some(PbarInterval {
        lower: pbar_grid[s],
        upper,
        resolution,
    })
}

/// Coarse check that the limit stays stable for all larger `pbar`.
fn unbounded_beyond(scheme: Scheme, from: f64) -> bool {
    (0..=30).all(|i| {
        let pb = from.max(1e-3) * 1e3f64.powf(i as f64 / 30.0);
        limit_stable(scheme, pb)
    })
}

/// Raw `z -> -infinity` amplification magnitude, without checking the admissible range.
pub fn damping_limit(scheme: Scheme, pbar: f64) -> Result<f64> {
    match scheme {
        Scheme::Sbdf1 => {
            if pbar == 0.0 {
                return Err(Error::InvalidParameter("pbar = 0 has no finite limit".into()));
            }
            Ok((1.0 - 1.0 / pbar).abs())
        }
        Scheme::Ein => {
            if pbar == 0.0 {
                return Err(Error::InvalidParameter("pbar = 0 has no finite limit".into()));
            }
            Ok(ein_limit(pbar).abs())
        }
        Scheme::Etdrk2 | Scheme::Etdrk4 => Ok(xi_etdrk(scheme, c(-1e12), pbar)?.norm()),
        _ => Ok(limit_poly(scheme, pbar)?
            .roots()?
            .iter()
            .map(|r| r.norm())
            .fold(0.0, f64::max)),
    }
}

/// `z -> -infinity` amplification magnitude (largest root modulus for multistep schemes).
pub fn damping_at_infinity(scheme: Scheme, pbar: f64) -> Result<f64> {
    let (lo, hi) = scheme.pbar_interval();
    if pbar < lo - 1e-12 || hi.is_some_and(|h| pbar > h + 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "pbar = {pbar} outside the admissible range of {scheme}"
        )));
    }
    damping_limit(scheme, pbar)
}
