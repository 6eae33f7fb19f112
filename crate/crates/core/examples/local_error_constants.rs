//! Measured leading error constants on `w' = lambda w` (lambda = -1) next to the
//! tabulated expressions.

use linstab::problems::ScalarTest;
use linstab::stability::local_error::{derived_error_constant, local_error_fit, quoted_error_constant, Jets};
use linstab::Scheme;

fn main() -> linstab::Result<()> {
    println!("{:<7} {:>4} {:>12} {:>12} {:>12}", "scheme", "p", "measured", "tabulated", "derived");
    for s in [Scheme::Sbdf1, Scheme::Cnab, Scheme::Cnlf, Scheme::Sbdf2, Scheme::Ein] {
        for p in [0.0, 1.0, 4.0] {
            let prob = ScalarTest::modified(&[-1.0], p);
            let jets = Jets::linear(&prob, 1.0);
            let fit = local_error_fit(s, &prob, 0.0, 1.0)?;
            println!(
                "{:<7} {:>4} {:>12.6} {:>12.6} {:>12.6}",
                s.name(),
                p,
                fit.constant,
                quoted_error_constant(s, p, &jets)?,
                derived_error_constant(s, p, &jets)?
            );
        }
    }
    Ok(())
}
