//! TV and TV-H^-1 inpainting. Each channel evolves independently on the
//! mirror-extended image, a periodic grid of twice the size in each axis,
//! so centered differences and the FFT solvers see reflecting edges.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{norm2, BoundaryData, Field, Grid};
use crate::operators::{apply, biharmonic, laplacian, Jet};
use crate::problems::{rk3_step_limit, Boundary, ProblemDef, Stabilizer};
use crate::scheme::Scheme;
use crate::steppers::Stepper;

pub const DEFAULT_EPS: f64 = 0.10;
pub const DEFAULT_LAMBDA0: f64 = 100.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    Tv,
    TvH1,
}

impl std::str::FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tv" => Ok(Model::Tv),
            "tvh1" | "tv-h1" | "tvh-1" | "tv-h-1" => Ok(Model::TvH1),
            _ => Err(Error::InvalidParameter(format!("unknown inpainting model {s:?}"))),
        }
    }
}

impl std::fmt::Display for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Model::Tv => "tv",
            Model::TvH1 => "tvh1",
        })
    }
}

/// Row-major image with channel values nominally in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub channels: Vec<Vec<f64>>,
}

impl Image {
    pub fn new(width: usize, height: usize, channels: Vec<Vec<f64>>) -> Result<Self> {
        if width == 0 || height == 0 || channels.is_empty() {
            return Err(Error::Image("empty image".into()));
        }
        if channels.iter().any(|c| c.len() != width * height) {
            return Err(Error::Image("channel size does not match dimensions".into()));
        }
        Ok(Image {
            width,
            height,
            channels,
        })
    }

    pub fn clamped(&self) -> Image {
        let channels = self
            .channels
            .iter()
            .map(|c| c.iter().map(|v| v.clamp(0.0, 1.0)).collect())
            .collect();
        Image { channels, ..*self }
    }
}

/// Preset `(dt, delta)` per model and scheme, from the text-removal runs.
pub fn preset(model: Model, scheme: Scheme) -> Option<(f64, f64)> {
    match (model, scheme) {
        (Model::Tv, Scheme::Sbdf1) => Some((0.88, 20e-4)),
        (Model::Tv, Scheme::Sbdf2) => Some((0.10, 16e-4)),
        (Model::Tv, Scheme::Cnab) => Some((0.12, 24e-4)),
        (Model::TvH1, Scheme::Sbdf1) => Some((0.88, 5.3e-4)),
        (Model::TvH1, Scheme::Sbdf2) => Some((0.08, 19e-4)),
        (Model::TvH1, Scheme::Cnab) => Some((0.08, 25e-4)),
        _ => None,
    }
}

/// Everything needed to restore one corrupted image.
#[derive(Clone, Debug)]
pub struct InpaintTask {
    pub width: usize,
    pub height: usize,
    /// Periodic grid of the mirror-extended image, unit pixel spacing.
    pub grid: Grid,
    /// Corrupted channels, mirror-extended.
    pub u0: Vec<Field>,
    /// `lambda0` off the mask, 0 on it, mirror-extended.
    pub lambda: Field,
    pub lambda0: f64,
    pub eps: f64,
    pub model: Model,
    pub delta: f64,
    pub dt: f64,
}

impl InpaintTask {
    /// `mask[i]` is true where pixel `i` is to be inpainted.
    pub fn new(image: &Image, mask: &[bool], model: Model, dt: f64, delta: f64) -> Result<Self> {
        Self::with_params(image, mask, model, dt, delta, DEFAULT_EPS, DEFAULT_LAMBDA0)
    }

    pub fn with_params(
        image: &Image,
        mask: &[bool],
        model: Model,
        dt: f64,
        delta: f64,
        eps: f64,
        lambda0: f64,
    ) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::InvalidParameter(format!("eps = {eps}")));
        }
        if !(lambda0 > 0.0) || !(dt > 0.0) || !(delta >= 0.0) {
            return Err(Error::InvalidParameter("lambda0, dt must be positive, delta nonnegative".into()));
        }
        let (w, h) = (image.width, image.height);
        if mask.len() != w * h {
            return Err(Error::Image("mask size does not match image".into()));
        }
        let grid = Grid::periodic(&[0.0, 0.0], &[2.0 * w as f64, 2.0 * h as f64], &[2 * w, 2 * h])?;
        let u0 = image
            .channels
            .iter()
            .map(|c| Field::from_vec(&grid, mirror_extend(c, w, h)))
            .collect::<Result<Vec<_>>>()?;
        let lam: Vec<f64> = mask.iter().map(|&m| if m { 0.0 } else { lambda0 }).collect();
        let lambda = Field::from_vec(&grid, mirror_extend(&lam, w, h))?;
        Ok(InpaintTask {
            width: w,
            height: h,
            grid,
            u0,
            lambda,
            lambda0,
            eps,
            model,
            delta,
            dt,
        })
    }

    pub fn channels(&self) -> usize {
        self.u0.len()
    }
}

/// Even reflection about both far edges: `w x h` to `2w x 2h`.
pub fn mirror_extend(values: &[f64], w: usize, h: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(4 * w * h);
    for j in 0..2 * h {
        let sj = if j < h { j } else { 2 * h - 1 - j };
        for i in 0..2 * w {
            let si = if i < w { i } else { 2 * w - 1 - i };
            out.push(values[si + w * sj]);
        }
    }
    out
}

/// The top-left `w x h` block of a mirror-extended field.
pub fn crop(values: &[f64], w: usize, h: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(w * h);
    for j in 0..h {
        out.extend_from_slice(&values[j * 2 * w..j * 2 * w + w]);
    }
    out
}

/// `div(grad u / sqrt(|grad u|^2 + eps^2))` in the expanded second-derivative form.
pub fn tv_curvature(u: &Field, eps: f64) -> Result<Field> {
    let jet = Jet::compute(u.grid(), u.values(), None)?;
    let e2 = eps * eps;
    let v = jet
        .grad
        .iter()
        .zip(&jet.hess)
        .map(|(g, hs)| {
            let (ux, uy) = (g[0], g[1]);
            let (uxx, uyy, uxy) = (hs[0], hs[1], hs[3]);
            let d = ux * ux + uy * uy + e2;
            (uxx * (uy * uy + e2) + uyy * (ux * ux + e2) - 2.0 * ux * uy * uxy) / (d * d.sqrt())
        })
        .collect();
    Field::from_vec(u.grid(), v)
}

fn fidelity(task: &InpaintTask, channel: usize, u: &[f64], out: &mut [f64]) {
    let lam = task.lambda.values();
    let u0 = task.u0[channel].values();
    for i in 0..out.len() {
        out[i] += lam[i] * (u0[i] - u[i]);
    }
}

pub fn tv_rhs(task: &InpaintTask, channel: usize, u: &Field) -> Result<Field> {
    u.check_grid(&task.grid)?;
    let mut out = tv_curvature(u, task.eps)?.into_values();
    fidelity(task, channel, u.values(), &mut out);
    Field::from_vec(&task.grid, out)
}

pub fn tvh1_rhs(task: &InpaintTask, channel: usize, u: &Field) -> Result<Field> {
    u.check_grid(&task.grid)?;
    let k = tv_curvature(u, task.eps)?;
    let mut out: Vec<f64> = apply(&laplacian(&task.grid)?, &k, None)?
        .into_values()
        .into_iter()
        .map(|v| -v)
        .collect();
    fidelity(task, channel, u.values(), &mut out);
    Field::from_vec(&task.grid, out)
}

/// `p1 = pbar_min / eps` on the Laplacian, shift `pbar_min lambda0`.
pub fn tv_stabilizer(task: &InpaintTask, scheme: Scheme) -> Result<Stabilizer> {
    let pm = scheme.pbar_min();
    Ok(Stabilizer::new(laplacian(&task.grid)?, pm / task.eps).with_shift(pm * task.lambda0))
}

/// `p1 = pbar_min / eps` on `-Laplacian^2`, shift `pbar_min lambda0`.
pub fn tvh1_stabilizer(task: &InpaintTask, scheme: Scheme) -> Result<Stabilizer> {
    let pm = scheme.pbar_min();
    let op = biharmonic(&task.grid)?.scaled(-1.0);
    Ok(Stabilizer::new(op, pm / task.eps).with_shift(pm * task.lambda0))
}

/// Spectral radius bound of the unsplit right-hand side.
fn explicit_radius(task: &InpaintTask) -> f64 {
    let tv = 8.0 / task.eps;
    match task.model {
        Model::Tv => tv + task.lambda0,
        Model::TvH1 => 8.0 * tv + task.lambda0,
    }
}

/// The split problem for one channel.
pub fn channel_problem(task: &InpaintTask, scheme: Scheme, channel: usize) -> Result<ProblemDef> {
    if channel >= task.channels() {
        return Err(Error::InvalidParameter(format!("channel {channel}")));
    }
    let stab = match task.model {
        Model::Tv => tv_stabilizer(task, scheme)?,
        Model::TvH1 => tvh1_stabilizer(task, scheme)?,
    };
    let t = task.clone();
    let rhs_fn = Box::new(move |_t: f64, u: &[f64], _bc: Option<&BoundaryData>, out: &mut [f64]| {
        let f = Field::from_vec(&t.grid, u.to_vec())?;
        let r = match t.model {
            Model::Tv => tv_rhs(&t, channel, &f)?,
            Model::TvH1 => tvh1_rhs(&t, channel, &f)?,
        };
        out.copy_from_slice(r.values());
        Ok(())
    });
    let def = ProblemDef::new(
        format!("inpaint-{}", task.model),
        task.u0[channel].clone(),
        rhs_fn,
        stab,
        Boundary::None,
        f64::INFINITY,
    )?;
    Ok(def.with_explicit_dt(rk3_step_limit(explicit_radius(task))))
}

/// Largest channel-wise relative change `||next - prev||_2 / ||next||_2` is below `delta`.
pub fn inpaint_stop(prev: &[&[f64]], next: &[&[f64]], delta: f64) -> Result<bool> {
    if prev.len() != next.len() || prev.is_empty() {
        return Err(Error::GridMismatch);
    }
    let mut worst = 0.0_f64;
    for (p, n) in prev.iter().zip(next) {
        if p.len() != n.len() {
            return Err(Error::GridMismatch);
        }
        let den = norm2(n);
        if den == 0.0 {
            return Ok(false);
        }
        let diff: f64 = p.iter().zip(n.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        worst = worst.max(diff / den);
    }
    Ok(worst < delta)
}

#[derive(Clone, Debug)]
pub struct InpaintOutcome {
    pub scheme: Scheme,
    /// Time levels computed, startup levels included.
    pub iterations: usize,
    pub converged: bool,
    /// Restored image, clamped to `[0, 1]`.
    pub image: Image,
}

/// Steps all channels in lockstep until the stopping test passes or
/// `max_iter` levels have been computed.
pub fn run_inpaint(task: &InpaintTask, scheme: Scheme, max_iter: usize) -> Result<InpaintOutcome> {
    let problems = (0..task.channels())
        .map(|c| channel_problem(task, scheme, c))
        .collect::<Result<Vec<_>>>()?;
    let mut steppers = problems
        .iter()
        .map(|p| Stepper::new(p, scheme, task.dt, 0.0, p.initial.values()))
        .collect::<Result<Vec<_>>>()?;
    let mut converged = false;
    while steppers[0].levels_advanced() < max_iter {
        let prev: Vec<Vec<f64>> = steppers.iter().map(|s| s.solution().to_vec()).collect();
        for s in steppers.iter_mut() {
            s.step()?;
        }
        let p: Vec<&[f64]> = prev.iter().map(|v| v.as_slice()).collect();
        let n: Vec<&[f64]> = steppers.iter().map(|s| s.solution()).collect();
        if inpaint_stop(&p, &n, task.delta)? {
            converged = true;
            break;
        }
    }
    let channels = steppers
        .iter()
        .map(|s| crop(s.solution(), task.width, task.height))
        .collect();
    let image = Image::new(task.width, task.height, channels)?.clamped();
    Ok(InpaintOutcome {
        scheme,
        iterations: steppers[0].levels_advanced(),
        converged,
        image,
    })
}

/// Pixels whose every channel equals `key` exactly.
pub fn key_color_mask(image: &Image, key: &[f64]) -> Result<Vec<bool>> {
    if key.len() != image.channels.len() {
        return Err(Error::Image("key colour has the wrong channel count".into()));
    }
    Ok((0..image.width * image.height)
        .map(|i| image.channels.iter().zip(key).all(|(c, k)| c[i] == *k))
        .collect())
}

/// Pixels where the first channel of a mask image exceeds one half.
pub fn threshold_mask(mask_image: &Image) -> Vec<bool> {
    mask_image.channels[0].iter().map(|&v| v > 0.5).collect()
}

/// Smooth colour gradient test image.
pub fn gradient_image(w: usize, h: usize) -> Image {
    let mut channels = vec![Vec::with_capacity(w * h); 3];
    for j in 0..h {
        for i in 0..w {
            let x = i as f64 / (w - 1).max(1) as f64;
            let y = j as f64 / (h - 1).max(1) as f64;
            channels[0].push(0.15 + 0.7 * x);
            channels[1].push(0.2 + 0.6 * y);
            channels[2].push(0.5 + 0.3 * (std::f64::consts::PI * (x + y)).sin() * 0.5);
        }
    }
    Image {
        width: w,
        height: h,
        channels,
    }
}

/// Text-like mask: lines of glyph cells, each with a few random two-pixel-wide strokes.
pub fn text_mask(w: usize, h: usize, seed: u64) -> Vec<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mask = vec![false; w * h];
    let (cw, ch) = (10usize, 16usize);
    let margin = 6usize;
    let mut y0 = margin;
    while y0 + ch + margin <= h {
        let mut x0 = margin;
        while x0 + cw + margin <= w {
            if rng.gen_bool(0.85) {
                for _ in 0..rng.gen_range(2..=4) {
                    let a = (rng.gen_range(0..cw - 2) as f64, rng.gen_range(0..ch - 2) as f64);
                    let b = (rng.gen_range(0..cw - 2) as f64, rng.gen_range(0..ch - 2) as f64);
                    stroke(&mut mask, w, (x0 as f64 + a.0, y0 as f64 + a.1), (x0 as f64 + b.0, y0 as f64 + b.1));
                }
            }
            x0 += cw + 2;
        }
        y0 += ch + 8;
    }
    mask
}

fn stroke(mask: &mut [bool], w: usize, a: (f64, f64), b: (f64, f64)) {
    let len = ((b.0 - a.0).hypot(b.1 - a.1)).ceil().max(1.0) as usize;
    for s in 0..=2 * len {
        let t = s as f64 / (2 * len) as f64;
        let x = (a.0 + t * (b.0 - a.0)).round() as usize;
        let y = (a.1 + t * (b.1 - a.1)).round() as usize;
        for (dx, dy) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
            let idx = (x + dx) + w * (y + dy);
            if idx < mask.len() && x + dx < w {
                mask[idx] = true;
            }
        }
    }
}

/// Overwrites the masked pixels with `value` in every channel.
pub fn vandalize(image: &Image, mask: &[bool], value: f64) -> Image {
    let channels = image
        .channels
        .iter()
        .map(|c| c.iter().zip(mask).map(|(&v, &m)| if m { value } else { v }).collect())
        .collect();
    Image { channels, ..*image }
}
