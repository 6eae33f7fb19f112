//! phi_1 and phi_3 from tiny to large `|z|`. The last column is the gap between
//! the closed recurrence and the contour mean; it blows up near zero, which is
//! why `phi_eval` switches to the contour mean there.

use linstab::steppers::{phi_closed, phi_contour, phi_eval};
use num_complex::Complex64;

fn main() {
    println!("{:>10} {:>24} {:>24} {:>10}", "z", "phi_1", "phi_3", "gap");
    for z in [-100.0, -10.0, -1.0, -0.5, -0.1, -1e-4, -1e-8, 1e-3, 2.0] {
        let zc = Complex64::new(z, 0.0);
        let gap = (0..4)
            .map(|k| (phi_closed(zc)[k] - phi_contour(zc)[k]).norm())
            .fold(0.0, f64::max);
        println!("{:>10.1e} {:>24.16e} {:>24.16e} {:>10.1e}", z, phi_eval(zc, 1).re, phi_eval(zc, 3).re, gap);
    }
}
