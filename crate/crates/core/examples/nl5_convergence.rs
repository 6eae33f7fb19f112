//! Second-order IMEX schemes against EIN on `u_t = Laplacian(u^5)`.

use linstab::harness::experiments::{nl5_default_p, nl5_ladder, nl5_study};
use linstab::harness::run::report_text;
use linstab::problems::nl5::DEFAULT_INTERVALS;
use linstab::Scheme;

fn main() -> linstab::Result<()> {
    for s in [Scheme::Sbdf2, Scheme::Cnab, Scheme::Cnlf, Scheme::Ein] {
        let rep = nl5_study(s, nl5_default_p(s), DEFAULT_INTERVALS, &nl5_ladder())?;
        print!("{}", report_text(&rep));
        println!("fitted order {:.3}\n", rep.fitted_order().unwrap_or(f64::NAN));
    }
    Ok(())
}
