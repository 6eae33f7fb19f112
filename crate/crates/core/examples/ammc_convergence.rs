//! Convergence of SBDF3 on the axisymmetric curvature problem for three `p`.
//! The last value sits outside the stable interval and diverges.

use linstab::harness::experiments::{ammc_ladder, ammc_study};
use linstab::harness::run::report_text;
use linstab::problems::ammc::DEFAULT_INTERVALS;
use linstab::Scheme;

fn main() -> linstab::Result<()> {
    for p in [0.875, 1.475, 1.675] {
        let rep = ammc_study(Scheme::Sbdf3, p, DEFAULT_INTERVALS, &ammc_ladder())?;
        println!("{}", report_text(&rep));
    }
    Ok(())
}
