//! Preset experiments shared by the command-line tool, the examples and the
//! acceptance tests.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{norm_inf, Field, Grid};
use crate::harness::contour::{enclosed_area, extract_zero_contour, hausdorff, slice_z, Polyline};
use crate::harness::converge::{converge, halving_ladder, reference, ConvergenceReport, WorkEstimate};
use crate::harness::csv::{num, Table};
use crate::problems::heat::heat_problem;
use crate::problems::inpaint::{gradient_image, run_inpaint, text_mask, vandalize, Image, InpaintOutcome, InpaintTask, Model};
use crate::problems::mcm::{aniso_mcm_problem, aniso_p, mcm_problem, sphere, Dumbbell};
use crate::problems::{ammc, nl5};
use crate::scheme::Scheme;
use crate::stability::{complex_z_samples, default_pbar_grid, pbar_range_scan, real_z_samples, PbarInterval};
use crate::steppers::Stepper;

// ---- stability ----

/// Complex samples for SBDF1, EIN and the second-order multistep family;
/// the negative real axis for the rest. SBDF3 and SBDF4 have no stable `pbar`
/// once `z` leaves the real axis by a few degrees.
pub fn scan_samples(scheme: Scheme) -> Vec<Complex64> {
    match scheme {
        Scheme::Sbdf1 | Scheme::Cnab | Scheme::Cnlf | Scheme::Sbdf2 | Scheme::Ein => complex_z_samples(),
        _ => real_z_samples(),
    }
}

pub fn stability_interval(scheme: Scheme) -> Option<PbarInterval> {
    pbar_range_scan(scheme, &scan_samples(scheme), &default_pbar_grid())
}

pub fn stability_table(rows: &[(Scheme, Option<PbarInterval>)]) -> Table {
    let mut t = Table::new(&["scheme", "lower", "upper", "resolution"]);
    for (s, iv) in rows {
        match iv {
            Some(iv) => t.push(vec![s.name().into(), num(iv.lower), num(iv.upper), num(iv.resolution)]),
            None => t.push(vec![s.name().into(), "none".into(), "none".into(), String::new()]),
        }
    }
    t
}

// ---- 1D axisymmetric mean curvature ----

pub const AMMC_RUNGS: usize = 7;

/// `T/16` down to `T/1024`.
pub fn ammc_ladder() -> Vec<f64> {
    halving_ladder(ammc::FINAL_TIME / 16.0, AMMC_RUNGS)
}

/// `p` from the slope rule for the multistep schemes; the fixed EIN value.
pub fn ammc_default_p(scheme: Scheme) -> Result<f64> {
    if scheme == Scheme::Ein {
        return Ok(ammc::EIN_P);
    }
    let g = ammc::grid(ammc::DEFAULT_INTERVALS)?;
    ammc::p_rule(&ammc::initial(&g, ammc::DEFAULT_AMPLITUDE), scheme.pbar_min())
}

fn ammc_descriptor(intervals: usize, amplitude: f64) -> String {
    format!("ammc|N {intervals}|a {amplitude:e}")
}

pub fn ammc_reference(intervals: usize, amplitude: f64) -> Result<Vec<f64>> {
    let prob = ammc::ammc_problem(intervals, amplitude, 1.0)?;
    // Finer grids need proportionally more explicit steps (h^2 scaling).
    let ratio = (intervals as f64 / ammc::DEFAULT_INTERVALS as f64).powi(2).max(1.0);
    let steps = (ammc::REFERENCE_STEPS as f64 * ratio).ceil() as usize;
    reference(&prob, steps, &ammc_descriptor(intervals, amplitude))
}

pub fn ammc_study(scheme: Scheme, p: f64, intervals: usize, ladder: &[f64]) -> Result<ConvergenceReport> {
    let a = ammc::DEFAULT_AMPLITUDE;
    let uref = ammc_reference(intervals, a)?;
    let prob = ammc::ammc_problem(intervals, a, p)?;
    converge(&prob, scheme, ladder, &uref, &ammc_descriptor(intervals, a))
}

// ---- Laplacian(u^5) ----

pub const NL5_BASE_DT: f64 = 1.25e-2;
pub const NL5_RUNGS: usize = 7;

pub fn nl5_ladder() -> Vec<f64> {
    halving_ladder(NL5_BASE_DT, NL5_RUNGS)
}

pub fn nl5_default_p(scheme: Scheme) -> f64 {
    nl5::p_rule(scheme.pbar_min(), nl5::FINAL_TIME)
}

pub fn nl5_reference(intervals: usize) -> Result<Vec<f64>> {
    let prob = nl5::nl5_problem(intervals, 1.0)?;
    let h = 1.0 / intervals as f64;
    // Keep the reference step inside the explicit bound as the grid changes.
    let scale = (h / (1.0 / nl5::DEFAULT_INTERVALS as f64)).powi(2).min(1.0);
    let steps = (nl5::FINAL_TIME / (nl5::REFERENCE_DT * scale)).round() as usize;
    reference(&prob, steps, &format!("nl5|intervals {intervals}"))
}

pub fn nl5_study(scheme: Scheme, p: f64, intervals: usize, ladder: &[f64]) -> Result<ConvergenceReport> {
    let uref = nl5_reference(intervals)?;
    let prob = nl5::nl5_problem(intervals, p)?;
    converge(&prob, scheme, ladder, &uref, &format!("nl5|intervals {intervals}"))
}

// ---- heat-equation smoke test ----

pub const HEAT_NODES: usize = 64;
pub const HEAT_STEPS: usize = 50;

#[derive(Clone, Debug)]
pub struct HeatSmoke {
    pub scheme: Scheme,
    pub dt: f64,
    pub pbar: f64,
    /// `||u||_inf` at the initial level and after each step.
    pub norms: Vec<f64>,
    /// Largest step-to-step growth of the norm (zero or negative if monotone).
    pub max_increase: f64,
}

/// Periodic heat equation on `[0, 2 pi)` at `pbar = max(1, pbar_min)`.
pub fn heat_smoke(scheme: Scheme, dt: f64, steps: usize) -> Result<HeatSmoke> {
    let pbar = scheme.pbar_min().max(1.0);
    let prob = heat_problem(2.0 * std::f64::consts::PI, HEAT_NODES, pbar, dt * steps as f64)?;
    let mut st = Stepper::new(&prob, scheme, dt, 0.0, prob.initial.values())?;
    // Startup levels count as steps of the method.
    let mut norms: Vec<f64> = st.levels().map(|(_, u)| norm_inf(u)).collect();
    for _ in 0..steps.saturating_sub(st.levels_advanced()) {
        st.step()?;
        norms.push(norm_inf(st.solution()));
    }
    let max_increase = norms.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    Ok(HeatSmoke {
        scheme,
        dt,
        pbar,
        norms,
        max_increase,
    })
}

// ---- curvature flow ----

/// Area-equivalent radius of the zero contour.
pub fn contour_radius(u: &Field) -> Result<f64> {
    let c = extract_zero_contour(u)?;
    Ok((enclosed_area(&c) / std::f64::consts::PI).sqrt())
}

#[derive(Clone, Debug)]
pub struct CircleReport {
    pub h: f64,
    /// `(t, measured radius, exact radius)` for every step with exact radius at least `5h`.
    pub samples: Vec<(f64, f64, f64)>,
    pub max_rel_error: f64,
}

/// Circle of radius `r0` in `[-1, 1]^2` run to its collapse time `r0^2 / 2`.
pub fn shrinking_circle(n: usize, r0: f64, steps: usize, scheme: Scheme) -> Result<CircleReport> {
    let g = Grid::periodic(&[-1.0, -1.0], &[2.0, 2.0], &[n, n])?;
    let h = g.spacing(0);
    let t_final = r0 * r0 / 2.0;
    let prob = mcm_problem(sphere(&g, [0.0; 3], r0), scheme.pbar_min(), t_final)?;
    let mut st = Stepper::new(&prob, scheme, t_final / steps as f64, 0.0, prob.initial.values())?;
    let mut samples = Vec::new();
    while st.levels_advanced() < steps {
        st.step()?;
        let exact = (r0 * r0 - 2.0 * st.time()).max(0.0).sqrt();
        if exact < 5.0 * h {
            break;
        }
        let r = contour_radius(&Field::from_vec(&g, st.solution().to_vec())?)?;
        samples.push((st.time(), r, exact));
    }
    let max_rel_error = samples.iter().map(|&(_, r, e)| (r - e).abs() / e).fold(0.0, f64::max);
    Ok(CircleReport {
        h,
        samples,
        max_rel_error,
    })
}

/// Two-dimensional dumbbell on `[-3, 3] x [-1.5, 1.5]`.
pub const DUMBBELL_2D: Dumbbell = Dumbbell {
    center: [0.0; 3],
    radius: 1.0,
    offset: 1.5,
    neck: 0.35,
};
pub const DUMBBELL_2D_TIME: f64 = 0.3;

pub fn dumbbell_2d_grid(nx: usize) -> Result<Grid> {
    Grid::periodic(&[-3.0, -1.5], &[6.0, 3.0], &[nx, nx / 2])
}

#[derive(Clone, Debug)]
pub struct DumbbellStudy {
    pub scheme: Scheme,
    pub nbar: Vec<usize>,
    pub contours: Vec<Vec<Polyline>>,
    /// Hausdorff distance between successive work levels.
    pub distances: Vec<f64>,
}

pub fn dumbbell_2d_study(scheme: Scheme, nbars: &[usize], nx: usize) -> Result<DumbbellStudy> {
    let g = dumbbell_2d_grid(nx)?;
    let prob = mcm_problem(DUMBBELL_2D.level_set(&g), scheme.pbar_min(), DUMBBELL_2D_TIME)?;
    let mut contours = Vec::new();
    for &nbar in nbars {
        let steps = WorkEstimate::steps_for(scheme, nbar)
            .ok_or_else(|| Error::InvalidParameter(format!("nbar {nbar} is not a multiple of the stage count")))?;
        let mut st = Stepper::new(&prob, scheme, DUMBBELL_2D_TIME / steps as f64, 0.0, prob.initial.values())?;
        st.run_to(DUMBBELL_2D_TIME)?;
        contours.push(extract_zero_contour(&Field::from_vec(&g, st.solution().to_vec())?)?);
    }
    let distances = contours.windows(2).map(|w| hausdorff(&w[0], &w[1])).collect();
    Ok(DumbbellStudy {
        scheme,
        nbar: nbars.to_vec(),
        contours,
        distances,
    })
}

/// Three-dimensional dumbbell in `[-1, 1]^3`, long enough to pinch before the lobes vanish.
pub const DUMBBELL_3D: Dumbbell = Dumbbell {
    center: [0.0; 3],
    radius: 0.35,
    offset: 0.55,
    neck: 0.12,
};
pub const DUMBBELL_3D_TIME: f64 = 0.03;

#[derive(Clone, Debug)]
pub struct PinchReport {
    /// Zero-contour components on the mid-plane slice after each step.
    pub components: Vec<usize>,
    /// First step at which one component became two.
    pub pinch_step: Option<usize>,
    pub dt: f64,
    pub explicit_dt: f64,
}

pub fn dumbbell_3d_pinch(n: usize, steps: usize, scheme: Scheme) -> Result<PinchReport> {
    let g = Grid::periodic(&[-1.0; 3], &[2.0; 3], &[n, n, n])?;
    let prob = mcm_problem(DUMBBELL_3D.level_set(&g), scheme.pbar_min(), DUMBBELL_3D_TIME)?;
    let dt = DUMBBELL_3D_TIME / steps as f64;
    let mut st = Stepper::new(&prob, scheme, dt, 0.0, prob.initial.values())?;
    let count = |u: &[f64]| -> Result<usize> {
        let f = Field::from_vec(&g, u.to_vec())?;
        Ok(extract_zero_contour(&slice_z(&f, n / 2)?)?.len())
    };
    let mut components = vec![count(prob.initial.values())?];
    while st.levels_advanced() < steps {
        st.step()?;
        components.push(count(st.solution())?);
    }
    let pinch_step = components.windows(2).position(|w| w[0] == 1 && w[1] == 2).map(|i| i + 1);
    Ok(PinchReport {
        components,
        pinch_step,
        dt,
        explicit_dt: prob.explicit_dt.unwrap_or(f64::NAN),
    })
}

/// `m`-fold anisotropic flow of a circle on `[-1, 1]^2`; returns the final level set.
pub fn aniso_run(m: u32, n: usize, steps: usize, t_final: f64, radius: f64, scheme: Scheme) -> Result<Field> {
    let g = Grid::periodic(&[-1.0, -1.0], &[2.0, 2.0], &[n, n])?;
    let prob = aniso_mcm_problem(sphere(&g, [0.0; 3], radius), m, aniso_p(m, scheme.pbar_min()), t_final)?;
    let mut st = Stepper::new(&prob, scheme, t_final / steps as f64, 0.0, prob.initial.values())?;
    st.run_to(t_final)?;
    Field::from_vec(&g, st.solution().to_vec())
}

// ---- inpainting ----

#[derive(Clone, Debug)]
pub struct InpaintCase {
    pub clean: Image,
    pub corrupted: Image,
    pub mask: Vec<bool>,
}

/// Colour gradient overwritten in white by a text-like mask.
pub fn synthetic_inpaint_case(size: usize, seed: u64) -> InpaintCase {
    let clean = gradient_image(size, size);
    let mask = text_mask(size, size, seed);
    let corrupted = vandalize(&clean, &mask, 1.0);
    InpaintCase { clean, corrupted, mask }
}

pub const INPAINT_MAX_ITER: usize = 5000;

/// Runs `scheme` on `case` at its preset `(dt, delta)`.
pub fn inpaint_preset_run(case: &InpaintCase, model: Model, scheme: Scheme) -> Result<InpaintOutcome> {
    let (dt, delta) = crate::problems::inpaint::preset(model, scheme)
        .ok_or_else(|| Error::Unsupported(format!("no preset for {model} with {scheme}")))?;
    let task = InpaintTask::new(&case.corrupted, &case.mask, model, dt, delta)?;
    run_inpaint(&task, scheme, INPAINT_MAX_ITER)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladders() {
        let l = ammc_ladder();
        assert!((l[0] - 2.1875e-2).abs() < 1e-15);
        assert!((l[6] - 0.35 / 1024.0).abs() < 1e-15);
        assert_eq!(nl5_ladder().len(), 7);
        assert!(*nl5_ladder().last().unwrap() >= 1e-4);
    }

    #[test]
    fn heat_smoke_sbdf1_is_monotone() {
        let r = heat_smoke(Scheme::Sbdf1, 10.0, 20).unwrap();
        assert_eq!(r.norms.len(), 21);
        assert!(r.max_increase <= 0.0);
    }

    #[test]
    fn stability_table_rows() {
        let iv = PbarInterval {
            lower: 0.75,
            upper: f64::INFINITY,
            resolution: 5e-4,
        };
        let t = stability_table(&[(Scheme::Sbdf2, Some(iv))]);
        assert!(t.render().contains("sbdf2,7.5000000000000000e-1,inf,"));
    }

    #[test]
    fn sample_sets() {
        let real = real_z_samples().len();
        assert_eq!(scan_samples(Scheme::Sbdf3).len(), real);
        assert_eq!(scan_samples(Scheme::Etdrk4).len(), real);
        assert!(scan_samples(Scheme::Cnlf).len() > real);
    }
}
