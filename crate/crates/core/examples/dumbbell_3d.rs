//! A 3D dumbbell pinching off under curvature flow, far above the explicit step.

use linstab::harness::experiments::{dumbbell_2d_study, dumbbell_3d_pinch};
use linstab::Scheme;

fn main() -> linstab::Result<()> {
    let rep = dumbbell_3d_pinch(64, 80, Scheme::Etdrk2)?;
    println!("dt = {:.3e}, explicit RK3 limit {:.3e}", rep.dt, rep.explicit_dt);
    println!("mid-plane components: {:?}", rep.components);
    println!("pinch at step {:?}", rep.pinch_step);

    let study = dumbbell_2d_study(Scheme::Etdrk2, &[100, 400, 1600], 256)?;
    for (w, d) in study.nbar.windows(2).zip(&study.distances) {
        println!("2D contour distance nbar {} -> {}: {d:.3e}", w[0], w[1]);
    }
    Ok(())
}
