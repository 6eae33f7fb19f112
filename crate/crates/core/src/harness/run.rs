//! Config-driven experiments writing CSVs, images, contours and a manifest.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::harness::config::Config;
use crate::harness::contour::{enclosed_area, extract_zero_contour, slice_z, Polyline};
use crate::harness::converge::{halving_ladder, ConvergenceReport};
use crate::harness::csv::{num, Table};
use crate::harness::experiments::{self as ex, InpaintCase};
use crate::harness::pnm;
use crate::problems::inpaint::{key_color_mask, preset, run_inpaint, threshold_mask, Image, InpaintTask, Model, DEFAULT_EPS, DEFAULT_LAMBDA0};
use crate::problems::mcm::{aniso_mcm_problem, aniso_p, mcm_problem, sphere};
use crate::problems::{ammc, nl5, ProblemDef};
use crate::scheme::Scheme;
use crate::steppers::Stepper;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Stability,
    Converge,
    Inpaint,
    Mcm,
    Aniso,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stability" => Ok(Mode::Stability),
            "converge" => Ok(Mode::Converge),
            "inpaint" => Ok(Mode::Inpaint),
            "mcm" => Ok(Mode::Mcm),
            "aniso" => Ok(Mode::Aniso),
            _ => Err(Error::Config { line: 0, msg: format!("unknown mode {s:?}") }),
        }
    }
}

impl Mode {
    fn keys(self) -> &'static [&'static str] {
        match self {
            Mode::Stability => &["mode", "scheme"],
            Mode::Converge => &["mode", "problem", "scheme", "p", "dt", "steps", "grid"],
            Mode::Inpaint => &[
                "mode", "model", "scheme", "dt", "delta", "eps", "lambda0", "image", "mask", "key", "grid", "seed", "steps",
            ],
            Mode::Mcm => &["mode", "shape", "scheme", "p", "dt", "steps", "grid", "t_final", "radius", "frames"],
            Mode::Aniso => &["mode", "m", "scheme", "steps", "grid", "t_final", "radius", "frames"],
        }
    }
}

#[derive(Clone, Debug)]
pub struct Artifacts {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
    /// Human-readable summary for the terminal.
    pub summary: String,
}

struct Out {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Out {
    fn path(&mut self, name: &str) -> PathBuf {
        let p = self.dir.join(name);
        self.files.push(p.clone());
        p
    }
}

pub fn run_experiment_file(config: &Path, out: &Path) -> Result<Artifacts> {
    run_experiment(&Config::from_file(config)?, out)
}

pub fn run_experiment(cfg: &Config, out: &Path) -> Result<Artifacts> {
    let mode: Mode = cfg.require("mode")?.parse()?;
    cfg.check_keys(mode.keys())?;
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let mut o = Out {
        dir: out.to_path_buf(),
        files: Vec::new(),
    };
    let summary = match mode {
        Mode::Stability => stability(cfg, &mut o)?,
        Mode::Converge => converge_mode(cfg, &mut o)?,
        Mode::Inpaint => inpaint(cfg, &mut o)?,
        Mode::Mcm => mcm(cfg, &mut o)?,
        Mode::Aniso => aniso(cfg, &mut o)?,
    };
    let mut manifest = String::from("# linstab experiment manifest\n");
    manifest += &cfg.to_text();
    let names: Vec<String> = o
        .files
        .iter()
        .map(|p| p.file_name().unwrap_or_default().to_string_lossy().into_owned())
        .collect();
    let _ = writeln!(manifest, "# outputs: {}", names.join(" "));
    let mpath = o.path("manifest.txt");
    std::fs::write(&mpath, manifest).map_err(|e| Error::io(&mpath, e))?;
    Ok(Artifacts {
        dir: o.dir,
        files: o.files,
        summary,
    })
}

fn scheme_or(cfg: &Config, default: Scheme) -> Result<Scheme> {
    cfg.parse_or("scheme", default)
}

fn stability(cfg: &Config, o: &mut Out) -> Result<String> {
    let schemes = cfg.list::<Scheme>("scheme")?.unwrap_or_else(|| Scheme::ALL.to_vec());
    let rows: Vec<_> = schemes.iter().map(|&s| (s, ex::stability_interval(s))).collect();
    let t = ex::stability_table(&rows);
    t.write(&o.path("stability.csv"))?;
    let mut s = String::new();
    for (sc, iv) in &rows {
        match iv {
            Some(iv) => {
                let _ = writeln!(s, "{:<7} pbar in [{:.4}, {}]", sc.name(), iv.lower, fmt_upper(iv.upper));
            }
            None => {
                let _ = writeln!(s, "{:<7} no stable pbar found", sc.name());
            }
        }
    }
    Ok(s)
}

fn fmt_upper(u: f64) -> String {
    if u.is_infinite() {
        "inf".into()
    } else {
        format!("{u:.4}")
    }
}

pub fn report_text(rep: &ConvergenceReport) -> String {
    let mut s = format!("{} p = {:.4}  ({})\n", rep.scheme.name(), rep.p, rep.reference);
    let _ = writeln!(s, "{:>12} {:>8} {:>14} {:>7}", "dt", "nbar", "error", "rate");
    for r in &rep.rows {
        let e = r.error.map_or("diverge".to_string(), |e| format!("{e:.4e}"));
        let rate = r.rate.map_or(String::new(), |x| format!("{x:.2}"));
        let _ = writeln!(s, "{:>12.4e} {:>8} {:>14} {:>7}", r.dt, r.work.nbar(), e, rate);
    }
    s
}

fn converge_mode(cfg: &Config, o: &mut Out) -> Result<String> {
    let problem = cfg.get("problem").unwrap_or("ammc");
    let scheme = scheme_or(cfg, Scheme::Sbdf2)?;
    let rep = match problem {
        "ammc" => {
            let p = match cfg.parse_opt("p")? {
                Some(p) => p,
                None => ex::ammc_default_p(scheme)?,
            };
            let n = cfg.parse_or("grid", ammc::DEFAULT_INTERVALS)?;
            let base = cfg.parse_or("dt", ammc::FINAL_TIME / 16.0)?;
            let rungs = cfg.parse_or("steps", ex::AMMC_RUNGS)?;
            ex::ammc_study(scheme, p, n, &halving_ladder(base, rungs))?
        }
        "nl5" => {
            let p = cfg.parse_or("p", ex::nl5_default_p(scheme))?;
            let n = cfg.parse_or("grid", nl5::DEFAULT_INTERVALS)?;
            let base = cfg.parse_or("dt", ex::NL5_BASE_DT)?;
            let rungs = cfg.parse_or("steps", ex::NL5_RUNGS)?;
            ex::nl5_study(scheme, p, n, &halving_ladder(base, rungs))?
        }
        other => return Err(Error::Config { line: 0, msg: format!("unknown problem {other:?}") }),
    };
    rep.table().write(&o.path("convergence.csv"))?;
    Ok(report_text(&rep))
}

fn inpaint(cfg: &Config, o: &mut Out) -> Result<String> {
    let model: Model = cfg.parse_or("model", Model::Tv)?;
    let scheme = scheme_or(cfg, Scheme::Cnab)?;
    let (pdt, pdelta) = preset(model, scheme).unwrap_or((0.1, 1e-3));
    let dt = cfg.parse_or("dt", pdt)?;
    let delta = cfg.parse_or("delta", pdelta)?;
    let eps = cfg.parse_or("eps", DEFAULT_EPS)?;
    let lambda0 = cfg.parse_or("lambda0", DEFAULT_LAMBDA0)?;
    let max_iter = cfg.parse_or("steps", ex::INPAINT_MAX_ITER)?;
    let case = match cfg.get("image") {
        Some(path) => {
            let corrupted = pnm::read(Path::new(path))?;
            let mask = match (cfg.get("mask"), cfg.list::<f64>("key")?) {
                (Some(m), _) => threshold_mask(&pnm::read(Path::new(m))?),
                (None, Some(key)) => key_color_mask(&corrupted, &key)?,
                (None, None) => {
                    return Err(Error::Config { line: 0, msg: "an image needs a mask file or a key colour".into() })
                }
            };
            if mask.len() != corrupted.width * corrupted.height {
                return Err(Error::Image("mask size does not match image".into()));
            }
            InpaintCase {
                clean: corrupted.clone(),
                corrupted,
                mask,
            }
        }
        None => ex::synthetic_inpaint_case(cfg.parse_or("grid", 128)?, cfg.parse_or("seed", 2024)?),
    };
    let task = InpaintTask::with_params(&case.corrupted, &case.mask, model, dt, delta, eps, lambda0)?;
    let out = run_inpaint(&task, scheme, max_iter)?;
    let ext = if out.image.channels.len() == 1 { "pgm" } else { "ppm" };
    pnm::write(&o.path(&format!("corrupted.{ext}")), &case.corrupted)?;
    let mask_img = Image::new(
        case.corrupted.width,
        case.corrupted.height,
        vec![case.mask.iter().map(|&m| if m { 1.0 } else { 0.0 }).collect()],
    )?;
    pnm::write(&o.path("mask.pgm"), &mask_img)?;
    pnm::write(&o.path(&format!("restored.{ext}")), &out.image)?;
    let mut t = Table::new(&["model", "scheme", "dt", "delta", "iterations", "converged"]);
    t.push(vec![
        model.to_string(),
        scheme.name().into(),
        num(dt),
        num(delta),
        out.iterations.to_string(),
        out.converged.to_string(),
    ]);
    t.write(&o.path("inpaint.csv"))?;
    Ok(format!(
        "{model} {}: {} iterations, {} (dt = {dt}, delta = {delta:e})\n",
        scheme.name(),
        out.iterations,
        if out.converged { "converged" } else { "not converged" }
    ))
}

fn contour_table(contours: &[Polyline]) -> Table {
    let mut t = Table::new(&["x", "y", "segment"]);
    for (id, pl) in contours.iter().enumerate() {
        for p in &pl.points {
            t.push(vec![num(p[0]), num(p[1]), id.to_string()]);
        }
        if pl.closed {
            if let Some(p) = pl.points.first() {
                t.push(vec![num(p[0]), num(p[1]), id.to_string()]);
            }
        }
    }
    t
}

/// Steps `problem` and records contours every `frames` steps.
fn evolve_and_record(
    problem: &ProblemDef,
    scheme: Scheme,
    steps: usize,
    frames: usize,
    plane: impl Fn(&Field) -> Result<Field>,
    o: &mut Out,
) -> Result<String> {
    let grid = problem.grid;
    let dt = problem.final_time / steps as f64;
    let mut st = Stepper::new(problem, scheme, dt, 0.0, problem.initial.values())?;
    let mut summary = Table::new(&["step", "time", "components", "area"]);
    let mut record = |level: usize, t: f64, u: &[f64], o: &mut Out| -> Result<usize> {
        let f = plane(&Field::from_vec(&grid, u.to_vec())?)?;
        let c = extract_zero_contour(&f)?;
        summary.push(vec![level.to_string(), num(t), c.len().to_string(), num(enclosed_area(&c))]);
        if frames > 0 && level % frames == 0 || level == steps {
            contour_table(&c).write(&o.path(&format!("contour_{level:05}.csv")))?;
        }
        Ok(c.len())
    };
    record(0, 0.0, problem.initial.values(), o)?;
    let mut last = 0;
    while st.levels_advanced() < steps {
        st.step()?;
        last = record(st.levels_advanced(), st.time(), st.solution(), o)?;
    }
    summary.write(&o.path("summary.csv"))?;
    Ok(format!(
        "{} {}: {steps} steps of {dt:.3e} (nbar = {}), final contour components {last}\n",
        problem.name,
        scheme.name(),
        steps * scheme.rhs_evals_per_step()
    ))
}

fn mcm(cfg: &Config, o: &mut Out) -> Result<String> {
    let shape = cfg.get("shape").unwrap_or("circle");
    let scheme = scheme_or(cfg, Scheme::Etdrk2)?;
    let p = cfg.parse_or("p", scheme.pbar_min())?;
    let frames = cfg.parse_or("frames", 0usize)?;
    let (initial, t_default, steps_default) = match shape {
        "circle" => {
            let n = cfg.parse_or("grid", 256)?;
            let r = cfg.parse_or("radius", 0.8)?;
            let g = Grid::periodic(&[-1.0, -1.0], &[2.0, 2.0], &[n, n])?;
            (sphere(&g, [0.0; 3], r), 0.95 * r * r / 2.0, 200)
        }
        "dumbbell2d" => {
            let g = ex::dumbbell_2d_grid(cfg.parse_or("grid", 512)?)?;
            (ex::DUMBBELL_2D.level_set(&g), ex::DUMBBELL_2D_TIME, 200)
        }
        "dumbbell3d" => {
            let n = cfg.parse_or("grid", 64)?;
            let g = Grid::periodic(&[-1.0; 3], &[2.0; 3], &[n, n, n])?;
            (ex::DUMBBELL_3D.level_set(&g), ex::DUMBBELL_3D_TIME, 80)
        }
        other => return Err(Error::Config { line: 0, msg: format!("unknown shape {other:?}") }),
    };
    let t_final = cfg.parse_or("t_final", t_default)?;
    let steps = match cfg.parse_opt::<f64>("dt")? {
        Some(dt) => (t_final / dt).round().max(1.0) as usize,
        None => cfg.parse_or("steps", steps_default)?,
    };
    let dim = initial.grid().dim();
    let mid = initial.grid().n(2) / 2;
    let prob = mcm_problem(initial, p, t_final)?;
    evolve_and_record(
        &prob,
        scheme,
        steps,
        frames,
        |f| if dim == 3 { slice_z(f, mid) } else { Ok(f.clone()) },
        o,
    )
}

fn aniso(cfg: &Config, o: &mut Out) -> Result<String> {
    let m = cfg.parse_or("m", 4u32)?;
    let scheme = scheme_or(cfg, Scheme::Etdrk2)?;
    let n = cfg.parse_or("grid", 256)?;
    let r = cfg.parse_or("radius", 0.6)?;
    let t_final = cfg.parse_or("t_final", 0.16)?;
    let steps = cfg.parse_or("steps", 500)?;
    let frames = cfg.parse_or("frames", 0usize)?;
    let g = Grid::periodic(&[-1.0, -1.0], &[2.0, 2.0], &[n, n])?;
    let prob = aniso_mcm_problem(sphere(&g, [0.0; 3], r), m, aniso_p(m, scheme.pbar_min()), t_final)?;
    evolve_and_record(&prob, scheme, steps, frames, |f| Ok(f.clone()), o)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = Config::parse("mode = stability\nbogus = 1\n").unwrap();
        assert!(matches!(run_experiment(&cfg, dir.path()), Err(Error::Config { line: 2, .. })));
        let cfg = Config::parse("mode = dance\n").unwrap();
        assert!(run_experiment(&cfg, dir.path()).is_err());
    }

    #[test]
    fn mcm_run_is_reproducible() {
        let text = "mode = mcm\nshape = circle\ngrid = 48\nsteps = 10\nframes = 5\n";
        let cfg = Config::parse(text).unwrap();
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let ra = run_experiment(&cfg, a.path()).unwrap();
        run_experiment(&cfg, b.path()).unwrap();
        assert!(ra.files.iter().any(|f| f.ends_with("contour_00005.csv")));
        for f in &ra.files {
            let name = f.file_name().unwrap();
            assert_eq!(std::fs::read(f).unwrap(), std::fs::read(b.path().join(name)).unwrap());
        }
    }

    #[test]
    fn inpaint_run_writes_images() {
        let cfg = Config::parse("mode = inpaint\ngrid = 24\nscheme = sbdf1\nsteps = 40\n").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let art = run_experiment(&cfg, dir.path()).unwrap();
        let restored = pnm::read(&dir.path().join("restored.ppm")).unwrap();
        assert_eq!((restored.width, restored.height), (24, 24));
        assert!(art.summary.contains("iterations"));
    }
}
