//! TV and TV-H^-1 inpainting of a synthetic image; writes PPMs to `inpaint-out/`.

use std::path::Path;

use linstab::harness::experiments::{inpaint_preset_run, synthetic_inpaint_case};
use linstab::harness::pnm;
use linstab::problems::inpaint::Model;
use linstab::Scheme;

fn main() -> linstab::Result<()> {
    let case = synthetic_inpaint_case(128, 2024);
    let dir = Path::new("inpaint-out");
    std::fs::create_dir_all(dir).expect("create output directory");
    pnm::write(&dir.join("corrupted.ppm"), &case.corrupted)?;
    for model in [Model::Tv, Model::TvH1] {
        for s in [Scheme::Sbdf1, Scheme::Sbdf2, Scheme::Cnab] {
            let out = inpaint_preset_run(&case, model, s)?;
            println!("{:<5} {:<6} {:>5} iterations, converged {}", model.to_string(), s.name(), out.iterations, out.converged);
            pnm::write(&dir.join(format!("{model}_{}.ppm", s.name())), &out.image)?;
        }
    }
    Ok(())
}
