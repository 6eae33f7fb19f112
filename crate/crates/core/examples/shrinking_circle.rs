//! A circle under curvature flow against `R(t) = sqrt(R0^2 - 2t)`.

use linstab::harness::experiments::shrinking_circle;
use linstab::Scheme;

fn main() -> linstab::Result<()> {
    let rep = shrinking_circle(256, 0.8, 200, Scheme::Etdrk2)?;
    for (t, r, exact) in rep.samples.iter().step_by(20) {
        println!("t = {t:.4}  radius {r:.5}  exact {exact:.5}");
    }
    println!("max relative error {:.3e} (h = {:.4})", rep.max_rel_error, rep.h);
    Ok(())
}
