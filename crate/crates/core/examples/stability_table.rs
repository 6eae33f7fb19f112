//! Stable `pbar` intervals for every scheme, as found by the root scan.

use linstab::harness::experiments::stability_interval;
use linstab::Scheme;

fn main() {
    println!("{:<8} {:>10} {:>10}", "scheme", "lower", "upper");
    for s in Scheme::ALL {
        match stability_interval(s) {
            Some(iv) => println!("{:<8} {:>10.4} {:>10.4}", s.name(), iv.lower, iv.upper),
            None => println!("{:<8} {:>10} {:>10}", s.name(), "-", "-"),
        }
    }
}
