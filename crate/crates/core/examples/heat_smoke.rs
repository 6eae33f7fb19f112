//! `||u||_inf` on the heat equation at very large steps. Schemes whose
//! amplification roots are complex show non-monotone norms.

use linstab::harness::experiments::{heat_smoke, HEAT_STEPS};
use linstab::Scheme;

fn main() -> linstab::Result<()> {
    for dt in [1.0, 10.0, 100.0] {
        for s in Scheme::ALL {
            let h = heat_smoke(s, dt, HEAT_STEPS)?;
            let first: Vec<String> = h.norms.iter().take(5).map(|n| format!("{n:.3e}")).collect();
            println!("dt {dt:>5} {:<7} max increase {:>10.3e}  norms {}", s.name(), h.max_increase, first.join(" "));
        }
    }
    Ok(())
}
