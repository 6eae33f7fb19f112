//! The functions `phi_0(z) = e^z`, `phi_{k+1}(z) = (phi_k(z) - 1/k!) / z`.
//!
//! The recurrence cancels catastrophically near `z = 0`, so small arguments are
//! averaged over a circle around `z` instead (trapezoidal rule on a contour
//! integral, which converges geometrically for entire functions).

use num_complex::Complex64;

/// Highest index evaluated.
pub const PHI_MAX: usize = 3;
/// Below this modulus the contour average is used.
pub const SWITCH_RADIUS: f64 = 0.5;
pub const CONTOUR_POINTS: usize = 32;
pub const CONTOUR_RADIUS: f64 = 1.0;

const INV_FACTORIAL: [f64; PHI_MAX + 1] = [1.0, 1.0, 0.5, 1.0 / 6.0];

/// `[phi_0, ..., phi_3]` by the recurrence; `z` must be nonzero.
pub fn phi_closed(z: Complex64) -> [Complex64; PHI_MAX + 1] {
    let mut out = [z.exp(); PHI_MAX + 1];
    for k in 0..PHI_MAX {
        out[k + 1] = (out[k] - INV_FACTORIAL[k]) / z;
    }
    out
}

/// `[phi_0, ..., phi_3]` as the mean of [`phi_closed`] over the circle of radius
/// [`CONTOUR_RADIUS`] centered at `z`.
pub fn phi_contour(z: Complex64) -> [Complex64; PHI_MAX + 1] {
    let mut acc = [Complex64::new(0.0, 0.0); PHI_MAX + 1];
    for j in 0..CONTOUR_POINTS {
        let theta = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / CONTOUR_POINTS as f64;
        let vals = phi_closed(z + Complex64::from_polar(CONTOUR_RADIUS, theta));
        for (a, v) in acc.iter_mut().zip(vals) {
            *a += v;
        }
    }
    acc.map(|a| a / CONTOUR_POINTS as f64)
}

pub fn phi_all(z: Complex64) -> [Complex64; PHI_MAX + 1] {
    if z.norm() < SWITCH_RADIUS {
        let mut v = phi_contour(z);
        // The average is a real quantity for real z; drop the round-off imaginary part.
        if z.im == 0.0 {
            for x in v.iter_mut() {
                x.im = 0.0;
            }
        }
        v
    } else {
        phi_closed(z)
    }
}

/// `phi_k(z)` for `k <= 3`.
pub fn phi_eval(z: Complex64, k: usize) -> Complex64 {
    assert!(k <= PHI_MAX, "phi index {k} exceeds {PHI_MAX}");
    phi_all(z)[k]
}

/// Real-argument convenience.
pub fn phi_real(z: f64) -> [f64; PHI_MAX + 1] {
    phi_all(Complex64::new(z, 0.0)).map(|c| c.re)
}
