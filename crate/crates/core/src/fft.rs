//! Multi-dimensional discrete Fourier transform over a periodic grid.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::grid::Grid;

/// Forward/inverse transforms for one periodic grid, with plans built once.
///
/// Modes are laid out like the nodes: mode `(k0, k1, k2)` sits at
/// `grid.index(k0, k1, k2)` and has wavenumber `2*pi*k/L` per axis.
#[derive(Clone)]
pub struct PeriodicTransform {
    grid: Grid,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
}

impl std::fmt::Debug for PeriodicTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PeriodicTransform")
            .field("grid", &self.grid)
            .finish()
    }
}

impl PeriodicTransform {
    pub fn new(grid: &Grid) -> Self {
        let mut planner = FftPlanner::new();
        let dims = 0..grid.dim();
        PeriodicTransform {
            grid: *grid,
            forward: dims.clone().map(|a| planner.plan_fft_forward(grid.n(a))).collect(),
            inverse: dims.map(|a| planner.plan_fft_inverse(grid.n(a))).collect(),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform(&mut buf, &self.forward);
        buf
    }

    pub fn forward_complex(&self, buf: &mut [Complex64]) {
        self.transform(buf, &self.forward);
    }

    /// Inverse transform, normalized, keeping the real part.
    pub fn inverse(&self, modes: &[Complex64]) -> Vec<f64> {
        let mut buf = modes.to_vec();
        self.inverse_complex(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }

    pub fn inverse_complex(&self, buf: &mut [Complex64]) {
        self.transform(buf, &self.inverse);
        let scale = 1.0 / self.grid.len() as f64;
        for c in buf.iter_mut() {
            *c *= scale;
        }
    }

    fn transform(&self, buf: &mut [Complex64], plans: &[Arc<dyn Fft<f64>>]) {
        let n = self.grid.extents();
        // Axis 0 is contiguous.
        plans[0].process(buf);
        let mut line = Vec::new();
        for (a, plan) in plans.iter().enumerate().skip(1) {
            let stride: usize = n[..a].iter().product();
            let len = n[a];
            let block = stride * len;
            line.resize(len, Complex64::new(0.0, 0.0));
            for outer in 0..buf.len() / block {
                let base = outer * block;
                for inner in 0..stride {
                    for (m, l) in line.iter_mut().enumerate() {
                        *l = buf[base + inner + m * stride];
                    }
                    plan.process(&mut line);
                    for (m, l) in line.iter().enumerate() {
                        buf[base + inner + m * stride] = *l;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Field;

    #[test]
    fn round_trip_3d() {
        let g = Grid::periodic(&[0.0; 3], &[1.0, 2.0, 3.0], &[8, 6, 5]).unwrap();
        let f = Field::from_fn(&g, |x| (3.0 * x[0]).sin() + x[1] * x[2] - 0.3 * x[0] * x[1]);
        let t = PeriodicTransform::new(&g);
        let back = t.inverse(&t.forward(f.values()));
        let err = f
            .values()
            .iter()
            .zip(&back)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err <= 1e-13 * f.norm_inf(), "round trip error {err}");
    }

    #[test]
    fn single_mode_lands_on_its_index() {
        let g = Grid::periodic(&[0.0, 0.0], &[1.0, 1.0], &[8, 4]).unwrap();
        let f = Field::from_fn(&g, |x| {
            (2.0 * std::f64::consts::PI * (2.0 * x[0] + x[1])).cos()
        });
        let m = PeriodicTransform::new(&g).forward(f.values());
        let peak = g.index(2, 1, 0);
        assert!((m[peak].re - 16.0).abs() < 1e-12);
        let mirror = g.index(6, 3, 0);
        assert!((m[mirror].re - 16.0).abs() < 1e-12);
    }
}
