//! Complex polynomial roots and the simple-von-Neumann test.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Root modulus allowed above one before a root counts as growing.
pub const MODULUS_TOL: f64 = 1e-9;
/// Roots closer than this on the unit circle count as a repeated root.
pub const MULTIPLICITY_TOL: f64 = 1e-7;

/// Strips vanishing leading coefficients (relative to the largest one).
fn trim(coeffs: &[Complex64]) -> Result<&[Complex64]> {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::InvalidParameter("degenerate polynomial".into()));
    }
    let lead = coeffs
        .iter()
        .position(|c| c.norm() > 1e-300_f64.max(1e-15 * scale))
        .unwrap();
    Ok(&coeffs[lead..])
}

/// Evaluates a polynomial given highest degree first.
pub fn horner(coeffs: &[Complex64], x: Complex64) -> Complex64 {
    coeffs.iter().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
}

/// Roots of `c[0] x^d + ... + c[d]`.
///
/// Degree one and two use closed forms (the stable variant of the quadratic
/// formula); higher degrees use simultaneous Aberth-Ehrlich iteration with a
/// Newton polish.
pub fn roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let c = trim(coeffs)?;
    let deg = c.len() - 1;
    match deg {
        0 => Ok(Vec::new()),
        1 => Ok(vec![-c[1] / c[0]]),
        2 => Ok(quadratic(c[0], c[1], c[2]).to_vec()),
        _ => aberth(c),
    }
}

fn quadratic(a: Complex64, b: Complex64, c: Complex64) -> [Complex64; 2] {
    let disc = (b * b - 4.0 * a * c).sqrt();
    // Pick the sign that avoids cancellation.
    let q = if (b.conj() * disc).re >= 0.0 {
        -0.5 * (b + disc)
    } else {
        -0.5 * (b - disc)
    };
    if q.norm() == 0.0 {
        return [Complex64::new(0.0, 0.0); 2];
    }
    [q / a, c / q]
}

fn aberth(c: &[Complex64]) -> Result<Vec<Complex64>> {
    let deg = c.len() - 1;
    let monic: Vec<Complex64> = c.iter().map(|&v| v / c[0]).collect();
    let deriv: Vec<Complex64> = monic[..deg]
        .iter()
        .enumerate()
        .map(|(i, &v)| v * (deg - i) as f64)
        .collect();
    // Cauchy bound for the initial circle.
    let radius = 1.0 + monic[1..].iter().map(|v| v.norm()).fold(0.0, f64::max);
    let r0 = radius.min(1.0 + monic[deg].norm().powf(1.0 / deg as f64));
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| Complex64::from_polar(r0, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / deg as f64))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0_f64;
        for i in 0..deg {
            let p = horner(&monic, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / horner(&deriv, z[i]);
            let repulse: Complex64 = (0..deg)
                .filter(|&j| j != i)
                .map(|j| 1.0 / (z[i] - z[j]))
                .sum();
            let step = ratio / (1.0 - ratio * repulse);
            if step.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm() / (1.0 + z[i].norm()));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..2 {
            let d = horner(&deriv, *zi);
            if d.norm() == 0.0 {
                break;
            }
            let step = horner(&monic, *zi) / d;
            if step.is_finite() && step.norm() < 1e-6 * (1.0 + zi.norm()) {
                *zi -= step;
            }
        }
    }
    if z.iter().any(|v| !v.is_finite()) {
        return Err(Error::Nonconvergent("polynomial root iteration".into()));
    }
    Ok(z)
}

/// True iff every root lies in the closed unit disk and every root on the
/// unit circle is simple.
pub fn simple_von_neumann(coeffs: &[Complex64]) -> Result<bool> {
    let r = roots(coeffs)?;
    Ok(roots_simple_von_neumann(&r))
}

pub fn roots_simple_von_neumann(r: &[Complex64]) -> bool {
    let mut on_circle = Vec::new();
    for &x in r {
        let m = x.norm();
        if !(m <= 1.0 + MODULUS_TOL) {
            return false;
        }
        if m >= 1.0 - MULTIPLICITY_TOL {
            on_circle.push(x);
        }
    }
    for i in 0..on_circle.len() {
        for j in i + 1..on_circle.len() {
            if (on_circle[i] - on_circle[j]).norm() < MULTIPLICITY_TOL {
                return false;
            }
        }
    }
    true
}

/// Largest root modulus.
pub fn spectral_radius(coeffs: &[Complex64]) -> Result<f64> {
    Ok(roots(coeffs)?.iter().map(|x| x.norm()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn re(v: &[f64]) -> Vec<Complex64> {
        v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }

    #[test]
    fn textbook_cases() {
        assert!(simple_von_neumann(&re(&[1.0, 0.0, -1.0])).unwrap());
        assert!(!simple_von_neumann(&re(&[1.0, -2.0, 1.0])).unwrap());
        assert!(!simple_von_neumann(&re(&[1.0, -2.5])).unwrap());
        assert!(simple_von_neumann(&re(&[2.0, 1.0])).unwrap());
        assert!(simple_von_neumann(&re(&[0.0, 0.0])).is_err());
    }

    #[test]
    fn quartic_with_known_roots() {
        // (x - 0.5)(x + 1)(x^2 + 1)
        let c = re(&[1.0, 0.5, 0.5, 0.5, -0.5]);
        let mut r: Vec<f64> = roots(&c).unwrap().iter().map(|z| z.re).collect();
        r.sort_by(f64::total_cmp);
        let expect = [-1.0, 0.0, 0.0, 0.5];
        for (a, b) in r.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(simple_von_neumann(&c).unwrap());
    }

    proptest! {
        #[test]
        fn recovers_planted_roots(
            raw in proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..5)
        ) {
            let planted: Vec<Complex64> = raw.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
            let mut c = vec![Complex64::new(1.0, 0.0)];
            for &r in &planted {
                let mut next = c.clone();
                next.push(Complex64::new(0.0, 0.0));
                for (i, &v) in c.iter().enumerate() {
                    next[i + 1] -= v * r;
                }
                c = next;
            }
            let found = roots(&c).unwrap();
            for x in &found {
                prop_assert!(horner(&c, *x).norm() < 1e-8 * (1.0 + x.norm()).powi(planted.len() as i32));
            }
        }
    }
}
