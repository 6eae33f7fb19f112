//! Anisotropic curvature flow of a circle for several symmetry orders `m`.

use linstab::harness::contour::{enclosed_area, extract_zero_contour};
use linstab::harness::experiments::aniso_run;
use linstab::Scheme;

fn main() -> linstab::Result<()> {
    for m in [0, 3, 4, 6] {
        let u = aniso_run(m, 128, 200, 0.08, 0.6, Scheme::Etdrk2)?;
        let c = extract_zero_contour(&u)?;
        // Spread of the contour radius shows how far the shape left the circle.
        let radii: Vec<f64> = c.iter().flat_map(|p| p.points.iter().map(|q| q[0].hypot(q[1]))).collect();
        let (lo, hi) = radii.iter().fold((f64::MAX, 0.0_f64), |(a, b), &r| (a.min(r), b.max(r)));
        println!("m = {m}: area {:.4}, radius in [{lo:.4}, {hi:.4}]", enclosed_area(&c));
    }
    Ok(())
}
