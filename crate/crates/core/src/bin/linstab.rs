use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use linstab::harness::config::Config;
use linstab::harness::run::run_experiment;

#[derive(Parser)]
#[command(name = "linstab", version, about = "Linearly stabilized time stepping experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Key = value config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Scheme name, or a comma-separated list for `stability`.
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    /// Number of steps, or ladder rungs for `converge`.
    #[arg(long)]
    steps: Option<usize>,
    /// Grid size: intervals in 1D, nodes per side otherwise.
    #[arg(long)]
    grid: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Scan stable pbar intervals.
    Stability(Common),
    /// Convergence study on the AMMC or NL5 benchmark.
    Converge {
        #[command(flatten)]
        common: Common,
        /// ammc or nl5.
        #[arg(long)]
        problem: Option<String>,
    },
    /// Run an experiment described entirely by a config file.
    Run(Common),
    /// TV or TV-H^-1 inpainting.
    Inpaint {
        #[command(flatten)]
        common: Common,
        /// tv or tvh1.
        #[arg(long)]
        model: Option<String>,
        /// 8-bit PGM/PPM input; a synthetic case is used when absent.
        #[arg(long)]
        image: Option<PathBuf>,
        /// Mask image, nonzero marks unknown pixels.
        #[arg(long)]
        mask: Option<PathBuf>,
    },
    /// Mean curvature flow of a level set.
    Mcm {
        #[command(flatten)]
        common: Common,
        /// circle, dumbbell2d or dumbbell3d.
        #[arg(long)]
        shape: Option<String>,
        /// Anisotropy order; switches to the anisotropic flow.
        #[arg(long)]
        m: Option<u32>,
    },
}

fn build(mode: Option<&str>, c: &Common, extra: &[(&str, Option<String>)]) -> linstab::Result<Config> {
    let mut cfg = match &c.config {
        Some(path) => Config::from_file(path)?,
        None => Config::default(),
    };
    if let Some(m) = mode {
        cfg.set("mode", m);
    }
    let flags = [
        ("scheme", c.scheme.clone()),
        ("p", c.p.map(|v| v.to_string())),
        ("dt", c.dt.map(|v| v.to_string())),
        ("steps", c.steps.map(|v| v.to_string())),
        ("grid", c.grid.map(|v| v.to_string())),
    ];
    for (k, v) in flags.iter().chain(extra) {
        if let Some(v) = v {
            cfg.set(k, v);
        }
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
    let (cfg, common) = match &cli.command {
        Command::Stability(c) => (build(Some("stability"), c, &[]), c),
        Command::Converge { common, problem } => (build(Some("converge"), common, &[("problem", problem.clone())]), common),
        Command::Run(c) if c.config.is_none() => {
            eprintln!("error: `run` needs --config");
            return ExitCode::from(2);
        }
        Command::Run(c) => (build(None, c, &[]), c),
        Command::Inpaint { common, model, image, mask } => (
            build(
                Some("inpaint"),
                common,
                &[("model", model.clone()), ("image", path(image)), ("mask", path(mask))],
            ),
            common,
        ),
        Command::Mcm { common, shape, m } => match m {
            Some(m) => (build(Some("aniso"), common, &[("m", Some(m.to_string()))]), common),
            None => (build(Some("mcm"), common, &[("shape", shape.clone())]), common),
        },
    };
    let cfg = match cfg {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let mode = cfg.get("mode").unwrap_or("run").to_string();
    let out = common.out.clone().unwrap_or_else(|| PathBuf::from("linstab-out").join(&mode));
    let start = Instant::now();
    match run_experiment(&cfg, &out) {
        Ok(art) => {
            print!("{}", art.summary);
            let wall = start.elapsed().as_secs_f64();
            // Timing goes to its own file so the CSVs stay reproducible.
            let _ = std::fs::write(art.dir.join("timing.txt"), format!("wall_seconds = {wall:.3}\n"));
            println!("wrote {} files to {} in {wall:.2} s", art.files.len(), art.dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
