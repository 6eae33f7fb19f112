//! Second-order finite-difference operators on uniform grids.
//!
//! Linear operators that a time stepper may treat implicitly are wrapped in a
//! [`DiagOperator`]: on periodic grids it carries the Fourier symbol (one real
//! eigenvalue per mode), on Dirichlet grids a constant-coefficient stencil
//! that is expanded into a banded matrix on the interior nodes. Boundary values
//! enter only through an affine term at application time, so the matrix itself
//! never changes.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fft::PeriodicTransform;
use crate::grid::{BoundaryData, BoundaryKind, Field, Grid, Padded};

#[derive(Clone, Debug)]
pub enum Representation {
    /// Per-mode eigenvalues in the node layout (periodic grids only).
    FourierSymbol(Vec<f64>),
    /// Constant-coefficient stencil acting on interior nodes (Dirichlet grids).
    Banded(Stencil),
}

/// Stencil entries as (axis offsets, coefficient).
#[derive(Clone, Debug, PartialEq)]
pub struct Stencil {
    pub entries: Vec<([isize; 3], f64)>,
}

/// Banded matrix form of a [`Stencil`]: `diags[d][row]` multiplies
/// `x[row + offsets[d]]`; entries whose neighbor is a boundary node are zero.
#[derive(Clone, Debug)]
pub struct Band {
    pub offsets: Vec<isize>,
    pub diags: Vec<Vec<f64>>,
}

#[derive(Clone, Debug)]
pub struct DiagOperator {
    grid: Grid,
    repr: Representation,
    scale: f64,
    transform: Option<PeriodicTransform>,
}

impl DiagOperator {
    pub fn from_symbol(grid: &Grid, symbol: Vec<f64>) -> Result<Self> {
        if !grid.is_periodic() {
            return Err(Error::Unsupported("Fourier symbol on a Dirichlet grid".into()));
        }
        if symbol.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        Ok(DiagOperator {
            grid: *grid,
            repr: Representation::FourierSymbol(symbol),
            scale: 1.0,
            transform: Some(PeriodicTransform::new(grid)),
        })
    }

    pub fn from_stencil(grid: &Grid, stencil: Stencil) -> Result<Self> {
        if grid.is_periodic() {
            return Err(Error::Unsupported("banded stencil on a periodic grid".into()));
        }
        Ok(DiagOperator {
            grid: *grid,
            repr: Representation::Banded(stencil),
            scale: 1.0,
            transform: None,
        })
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        self.scale *= factor;
        self
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    pub(crate) fn transform(&self) -> Option<&PeriodicTransform> {
        self.transform.as_ref()
    }

    /// Scaled per-mode eigenvalues, if the operator is diagonal in Fourier space.
    pub fn symbol(&self) -> Option<Vec<f64>> {
        match &self.repr {
            Representation::FourierSymbol(s) => Some(s.iter().map(|v| v * self.scale).collect()),
            Representation::Banded(_) => None,
        }
    }

    /// Banded matrix of the (scaled) operator on the interior nodes.
    pub fn band(&self) -> Option<Band> {
        let Representation::Banded(st) = &self.repr else {
            return None;
        };
        let g = &self.grid;
        let n = g.extents();
        let strides = [1isize, n[0] as isize, (n[0] * n[1]) as isize];
        let mut offsets = Vec::new();
        let mut diags = Vec::new();
        for (off, coef) in &st.entries {
            let lin: isize = (0..3).map(|a| off[a] * strides[a]).sum();
            let mut diag = vec![0.0; g.len()];
            for (row, d) in diag.iter_mut().enumerate() {
                let ijk = g.unravel(row);
                let inside = (0..3).all(|a| {
                    let v = ijk[a] as isize + off[a];
                    v >= 0 && v < n[a] as isize
                });
                if inside {
                    *d = coef * self.scale;
                }
            }
            offsets.push(lin);
            diags.push(diag);
        }
        Some(Band { offsets, diags })
    }

    /// Affine contribution of the boundary data: `apply(op, f, bc) = A f + term`.
    pub fn boundary_term(&self, bc: &BoundaryData) -> Result<Vec<f64>> {
        let zero = Field::zeros(&self.grid);
        Ok(apply(self, &zero, Some(bc))?.into_values())
    }
}

/// Second-order centered discrete Laplacian.
pub fn laplacian(grid: &Grid) -> Result<DiagOperator> {
    match grid.bc() {
        BoundaryKind::Periodic => {
            let symbol = (0..grid.len())
                .map(|idx| {
                    let k = grid.unravel(idx);
                    (0..grid.dim()).map(|a| axis_symbol(grid, a, k[a])).sum()
                })
                .collect();
            DiagOperator::from_symbol(grid, symbol)
        }
        BoundaryKind::Dirichlet => {
            if grid.dim() > 2 {
                return Err(Error::Unsupported("3D Dirichlet Laplacian".into()));
            }
            let mut entries = vec![([0, 0, 0], 0.0)];
            for a in 0..grid.dim() {
                let c = 1.0 / (grid.spacing(a) * grid.spacing(a));
                entries[0].1 -= 2.0 * c;
                let mut lo = [0isize; 3];
                let mut hi = [0isize; 3];
                lo[a] = -1;
                hi[a] = 1;
                entries.push((lo, c));
                entries.push((hi, c));
            }
            DiagOperator::from_stencil(grid, Stencil { entries })
        }
    }
}

/// `2 (cos(k h) - 1) / h^2` for mode index `k` on `axis`.
fn axis_symbol(grid: &Grid, axis: usize, k: usize) -> f64 {
    let h = grid.spacing(axis);
    let theta = 2.0 * PI * k as f64 / grid.n(axis) as f64;
    2.0 * (theta.cos() - 1.0) / (h * h)
}

/// Square of the periodic Laplacian; nonnegative symbol.
pub fn biharmonic(grid: &Grid) -> Result<DiagOperator> {
    if !grid.is_periodic() {
        return Err(Error::Unsupported(
            "biharmonic operator requires a periodic (or mirror-extended) grid".into(),
        ));
    }
    let lap = laplacian(grid)?;
    let symbol = lap.symbol().unwrap().into_iter().map(|s| s * s).collect();
    DiagOperator::from_symbol(grid, symbol)
}

/// Applies `op` to `f`. Dirichlet operators need the boundary values.
pub fn apply(op: &DiagOperator, f: &Field, bc: Option<&BoundaryData>) -> Result<Field> {
    f.check_grid(&op.grid)?;
    let grid = &op.grid;
    match &op.repr {
        Representation::FourierSymbol(sym) => {
            let t = op.transform.as_ref().expect("periodic operator carries a transform");
            let mut modes = t.forward(f.values());
            for (m, s) in modes.iter_mut().zip(sym) {
                *m *= s * op.scale;
            }
            Field::from_vec(grid, t.inverse(&modes))
        }
        Representation::Banded(st) => {
            let bc = bc.ok_or_else(|| {
                Error::InvalidParameter("Dirichlet operator needs boundary data".into())
            })?;
            let p = Padded::new(grid, f.values(), Some(bc))?;
            let offs: Vec<(isize, f64)> = st
                .entries
                .iter()
                .map(|(o, c)| ((0..3).map(|a| o[a] * p.stride[a]).sum(), c * op.scale))
                .collect();
            let mut out = Vec::with_capacity(grid.len());
            let n = grid.extents();
            for k in 0..n[2] {
                for j in 0..n[1] {
                    for i in 0..n[0] {
                        let c = p.center(i, j, k);
                        out.push(offs.iter().map(|(o, w)| w * p.get(c, *o)).sum());
                    }
                }
            }
            Field::from_vec(grid, out)
        }
    }
}

fn check_axis(grid: &Grid, axis: usize) -> Result<()> {
    if axis >= grid.dim() {
        return Err(Error::InvalidParameter(format!(
            "axis {axis} out of range for a {}D grid",
            grid.dim()
        )));
    }
    Ok(())
}

/// Centered first difference `(f[j+1] - f[j-1]) / 2h` along `axis`.
///
/// On Dirichlet grids the boundary values are used when given; otherwise the
/// first and last interior nodes fall back to one-sided second-order stencils.
pub fn d1_centered(f: &Field, axis: usize, bc: Option<&BoundaryData>) -> Result<Field> {
    let grid = *f.grid();
    check_axis(&grid, axis)?;
    let h = grid.spacing(axis);
    if grid.bc() == BoundaryKind::Dirichlet && bc.is_none() {
        return d1_one_sided_edges(f, axis);
    }
    let p = Padded::new(&grid, f.values(), bc)?;
    let s = p.stride[axis];
    let out = map_interior(&grid, |i, j, k| {
        let c = p.center(i, j, k);
        (p.get(c, s) - p.get(c, -s)) / (2.0 * h)
    });
    Field::from_vec(&grid, out)
}

fn d1_one_sided_edges(f: &Field, axis: usize) -> Result<Field> {
    let grid = *f.grid();
    let n = grid.extents();
    let h = grid.spacing(axis);
    let stride = [1usize, n[0], n[0] * n[1]][axis];
    let v = f.values();
    let m = n[axis];
    let out = (0..grid.len())
        .map(|idx| {
            let pos = grid.unravel(idx)[axis];
            if pos == 0 {
                (-3.0 * v[idx] + 4.0 * v[idx + stride] - v[idx + 2 * stride]) / (2.0 * h)
            } else if pos == m - 1 {
                (3.0 * v[idx] - 4.0 * v[idx - stride] + v[idx - 2 * stride]) / (2.0 * h)
            } else {
                (v[idx + stride] - v[idx - stride]) / (2.0 * h)
            }
        })
        .collect();
    Field::from_vec(&grid, out)
}

/// Centered second difference along one axis.
pub fn d2_centered(f: &Field, axis: usize, bc: Option<&BoundaryData>) -> Result<Field> {
    let grid = *f.grid();
    check_axis(&grid, axis)?;
    let h2 = grid.spacing(axis).powi(2);
    let p = Padded::new(&grid, f.values(), bc)?;
    let s = p.stride[axis];
    let out = map_interior(&grid, |i, j, k| {
        let c = p.center(i, j, k);
        (p.get(c, s) - 2.0 * p.data[c] + p.get(c, -s)) / h2
    });
    Field::from_vec(&grid, out)
}

/// Centered cross derivative `u_ab` with the four-corner stencil.
pub fn mixed(f: &Field, a: usize, b: usize, bc: Option<&BoundaryData>) -> Result<Field> {
    let grid = *f.grid();
    check_axis(&grid, a)?;
    check_axis(&grid, b)?;
    if a == b {
        return d2_centered(f, a, bc);
    }
    let p = Padded::new(&grid, f.values(), bc)?;
    let (sa, sb) = (p.stride[a], p.stride[b]);
    let denom = 4.0 * grid.spacing(a) * grid.spacing(b);
    let out = map_interior(&grid, |i, j, k| {
        let c = p.center(i, j, k);
        (p.get(c, sa + sb) - p.get(c, sa - sb) - p.get(c, -sa + sb) + p.get(c, -sa - sb)) / denom
    });
    Field::from_vec(&grid, out)
}

/// `u_xy` on a 2D grid.
pub fn mixed_xy(f: &Field, bc: Option<&BoundaryData>) -> Result<Field> {
    if f.grid().dim() != 2 {
        return Err(Error::InvalidParameter("mixed_xy needs a 2D grid".into()));
    }
    mixed(f, 0, 1, bc)
}

fn map_interior(grid: &Grid, mut f: impl FnMut(usize, usize, usize) -> f64) -> Vec<f64> {
    let n = grid.extents();
    let mut out = Vec::with_capacity(grid.len());
    for k in 0..n[2] {
        for j in 0..n[1] {
            for i in 0..n[0] {
                out.push(f(i, j, k));
            }
        }
    }
    out
}

/// Gradient and Hessian of a field by centered differences, computed from a
/// single padded copy. Used by the curvature-type right-hand sides.
#[derive(Clone, Debug)]
pub struct Jet {
    pub grad: Vec<[f64; 3]>,
    /// Upper triangle: xx, yy, zz, xy, xz, yz.
    pub hess: Vec<[f64; 6]>,
}

impl Jet {
    pub fn compute(grid: &Grid, values: &[f64], bc: Option<&BoundaryData>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        let p = Padded::new(grid, values, bc)?;
        let dim = grid.dim();
        let h = [grid.spacing(0), grid.spacing(1), grid.spacing(2)];
        let s = p.stride;
        let pairs = [(0, 1, 3), (0, 2, 4), (1, 2, 5)];
        let n = grid.extents();
        let mut grad = Vec::with_capacity(grid.len());
        let mut hess = Vec::with_capacity(grid.len());
        for k in 0..n[2] {
            for j in 0..n[1] {
                for i in 0..n[0] {
                    let c = p.center(i, j, k);
                    let u0 = p.data[c];
                    let mut g = [0.0; 3];
                    let mut hs = [0.0; 6];
                    for a in 0..dim {
                        let up = p.get(c, s[a]);
                        let dn = p.get(c, -s[a]);
                        g[a] = (up - dn) / (2.0 * h[a]);
                        hs[a] = (up - 2.0 * u0 + dn) / (h[a] * h[a]);
                    }
                    for &(a, b, slot) in &pairs {
                        if b < dim {
                            hs[slot] = (p.get(c, s[a] + s[b]) - p.get(c, s[a] - s[b])
                                - p.get(c, -s[a] + s[b])
                                + p.get(c, -s[a] - s[b]))
                                / (4.0 * h[a] * h[b]);
                        }
                    }
                    grad.push(g);
                    hess.push(hs);
                }
            }
        }
        Ok(Jet { grad, hess })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
    }

    #[test]
    fn periodic_symbol_n4() {
        let g = Grid::periodic(&[0.0], &[4.0], &[4]).unwrap();
        let s = laplacian(&g).unwrap().symbol().unwrap();
        let expect = [0.0, -2.0, -4.0, -2.0];
        assert!(max_abs_diff(&s, &expect) < 1e-15, "{s:?}");
    }

    #[test]
    fn most_negative_symbol_is_minus_four_over_h2() {
        let g = Grid::periodic(&[0.0], &[1.0], &[64]).unwrap();
        let h = g.spacing(0);
        let s = laplacian(&g).unwrap().symbol().unwrap();
        let min = s.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!((min + 4.0 / (h * h)).abs() < 1e-9 / (h * h));
    }

    #[test]
    fn constant_in_kernel() {
        let g = Grid::periodic(&[0.0, 0.0], &[1.0, 2.0], &[8, 6]).unwrap();
        let out = apply(&laplacian(&g).unwrap(), &Field::constant(&g, 3.5), None).unwrap();
        assert!(out.norm_inf() < 1e-12);

        let d = Grid::dirichlet(&[0.0, 0.0], &[1.0, 1.0], &[5, 7]).unwrap();
        let bc = BoundaryData::constant(&d, 3.5).unwrap();
        let out = apply(&laplacian(&d).unwrap(), &Field::constant(&d, 3.5), Some(&bc)).unwrap();
        assert!(out.norm_inf() < 1e-12);
    }

    #[test]
    fn sine_is_eigenfield() {
        let g = Grid::periodic(&[0.0], &[3.0], &[16]).unwrap();
        let f = Field::from_fn(&g, |x| (2.0 * PI * x[0] / 3.0).sin());
        let op = laplacian(&g).unwrap();
        let s1 = op.symbol().unwrap()[1];
        let out = apply(&op, &f, None).unwrap();
        let expect: Vec<f64> = f.values().iter().map(|v| v * s1).collect();
        assert!(max_abs_diff(out.values(), &expect) < 1e-12);
    }

    #[test]
    fn zero_maps_to_zero() {
        let d = Grid::dirichlet(&[0.0], &[1.0], &[9]).unwrap();
        let bc = BoundaryData::constant(&d, 0.0).unwrap();
        let out = apply(&laplacian(&d).unwrap(), &Field::zeros(&d), Some(&bc)).unwrap();
        assert_eq!(out.norm_inf(), 0.0);
    }

    #[test]
    fn quadratic_second_difference_is_exact() {
        let d = Grid::dirichlet(&[0.0], &[1.0], &[17]).unwrap();
        let bc = BoundaryData::from_fn(&d, |x| x[0] * x[0]).unwrap();
        let f = Field::from_fn(&d, |x| x[0] * x[0]);
        let out = apply(&laplacian(&d).unwrap(), &f, Some(&bc)).unwrap();
        assert!(out.values().iter().all(|v| (v - 2.0).abs() < 1e-10));
    }

    #[test]
    fn dirichlet_requires_boundary() {
        let d = Grid::dirichlet(&[0.0], &[1.0], &[5]).unwrap();
        assert!(apply(&laplacian(&d).unwrap(), &Field::zeros(&d), None).is_err());
    }

    #[test]
    fn grid_mismatch_is_rejected() {
        let a = Grid::periodic(&[0.0], &[1.0], &[8]).unwrap();
        let b = Grid::periodic(&[0.0], &[1.0], &[16]).unwrap();
        assert!(matches!(
            apply(&laplacian(&a).unwrap(), &Field::zeros(&b), None),
            Err(Error::GridMismatch)
        ));
    }

    #[test]
    fn d1_exact_for_linear() {
        let d = Grid::dirichlet(&[0.0], &[2.0], &[11]).unwrap();
        let f = Field::from_fn(&d, |x| x[0]);
        let one_sided = d1_centered(&f, 0, None).unwrap();
        assert!(one_sided.values().iter().all(|v| (v - 1.0).abs() < 1e-12));
        let bc = BoundaryData::from_fn(&d, |x| x[0]).unwrap();
        let centered = d1_centered(&f, 0, Some(&bc)).unwrap();
        assert!(centered.values().iter().all(|v| (v - 1.0).abs() < 1e-12));
        let c = d1_centered(&Field::constant(&d, 2.0), 0, None).unwrap();
        assert!(c.norm_inf() < 1e-12);
    }

    #[test]
    fn d1_sine_error_ratio_near_four() {
        let err = |n: usize| {
            let g = Grid::periodic(&[0.0], &[2.0 * PI], &[n]).unwrap();
            let f = Field::from_fn(&g, |x| x[0].sin());
            let d = d1_centered(&f, 0, None).unwrap();
            let exact = Field::from_fn(&g, |x| x[0].cos());
            max_abs_diff(d.values(), exact.values())
        };
        let ratio = err(32) / err(64);
        assert!((ratio - 4.0).abs() < 0.05, "ratio {ratio}");
    }

    #[test]
    fn mixed_xy_cases() {
        let d = Grid::dirichlet(&[0.0, 0.0], &[1.0, 2.0], &[6, 9]).unwrap();
        let bc = BoundaryData::from_fn(&d, |x| x[0] * x[1]).unwrap();
        let f = Field::from_fn(&d, |x| x[0] * x[1]);
        let m = mixed_xy(&f, Some(&bc)).unwrap();
        assert!(m.values().iter().all(|v| (v - 1.0).abs() < 1e-10));

        let bc = BoundaryData::from_fn(&d, |x| x[0] * x[0]).unwrap();
        let f = Field::from_fn(&d, |x| x[0] * x[0]);
        assert!(mixed_xy(&f, Some(&bc)).unwrap().norm_inf() < 1e-10);

        let g1 = Grid::periodic(&[0.0], &[1.0], &[8]).unwrap();
        assert!(mixed_xy(&Field::zeros(&g1), None).is_err());
    }

    #[test]
    fn mixed_xy_sine_converges_second_order() {
        let err = |n: usize| {
            let g = Grid::periodic(&[0.0, 0.0], &[2.0 * PI, 2.0 * PI], &[n, n]).unwrap();
            let f = Field::from_fn(&g, |x| x[0].sin() * x[1].sin());
            let m = mixed_xy(&f, None).unwrap();
            let e = Field::from_fn(&g, |x| x[0].cos() * x[1].cos());
            max_abs_diff(m.values(), e.values())
        };
        let (e1, e2, e3) = (err(16), err(32), err(64));
        for r in [(e1 / e2).log2(), (e2 / e3).log2()] {
            assert!((r - 2.0).abs() < 0.1, "observed order {r}");
        }
    }

    #[test]
    fn biharmonic_symbol() {
        let g = Grid::periodic(&[0.0, 0.0], &[1.0, 1.0], &[16, 16]).unwrap();
        let h = g.spacing(0);
        let b = biharmonic(&g).unwrap().symbol().unwrap();
        assert_eq!(b[0], 0.0);
        assert!(b.iter().all(|&v| v >= 0.0));
        let max = b.iter().cloned().fold(0.0, f64::max);
        assert!((max - (8.0 / (h * h)).powi(2)).abs() < 1e-9 * max);
        let l = laplacian(&g).unwrap().symbol().unwrap();
        let k = g.index(3, 0, 0);
        assert!((b[k] - l[k] * l[k]).abs() < 1e-9);
        let d = Grid::dirichlet(&[0.0], &[1.0], &[8]).unwrap();
        assert!(biharmonic(&d).is_err());
    }

    #[test]
    fn band_matches_apply() {
        let d = Grid::dirichlet(&[0.0, 0.0], &[1.0, 1.0], &[4, 5]).unwrap();
        let op = laplacian(&d).unwrap();
        let f = Field::from_fn(&d, |x| (3.0 * x[0]).sin() + x[1] * x[1]);
        let bc = BoundaryData::constant(&d, 0.0).unwrap();
        let direct = apply(&op, &f, Some(&bc)).unwrap();
        let band = op.band().unwrap();
        let v = f.values();
        let via_band: Vec<f64> = (0..v.len())
            .map(|r| {
                band.offsets
                    .iter()
                    .zip(&band.diags)
                    .map(|(&o, dg)| {
                        let c = r as isize + o;
                        if dg[r] != 0.0 { dg[r] * v[c as usize] } else { 0.0 }
                    })
                    .sum()
            })
            .collect();
        assert!(max_abs_diff(direct.values(), &via_band) < 1e-10);
    }
}
