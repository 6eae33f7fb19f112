//! Uniform structured grids and the discrete fields that live on them.
//!
//! Nodes are stored with the x index fastest. Periodic grids hold `N` nodes
//! per axis at `origin + i*h` with `h = length / N`. Dirichlet grids hold the
//! interior nodes only, at `origin + (i+1)*h` with `h = length / (N+1)`; the
//! boundary values are supplied separately as [`BoundaryData`].

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundaryKind {
    Periodic,
    Dirichlet,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    dim: usize,
    n: [usize; 3],
    h: [f64; 3],
    origin: [f64; 3],
    length: [f64; 3],
    bc: BoundaryKind,
}

impl Grid {
    fn build(origin: &[f64], length: &[f64], n: &[usize], bc: BoundaryKind) -> Result<Self> {
        let dim = n.len();
        if !(1..=3).contains(&dim) || origin.len() != dim || length.len() != dim {
            return Err(Error::InvalidGrid(format!(
                "dimension must be 1..=3 with matching origin/length (got n={n:?})"
            )));
        }
        if bc == BoundaryKind::Dirichlet && dim == 3 {
            return Err(Error::Unsupported("3D Dirichlet grids".into()));
        }
        let mut g = Grid {
            dim,
            n: [1; 3],
            h: [1.0; 3],
            origin: [0.0; 3],
            length: [1.0; 3],
            bc,
        };
        for a in 0..dim {
            if n[a] < 3 {
                return Err(Error::InvalidGrid(format!("axis {a} has {} < 3 nodes", n[a])));
            }
            if !(length[a] > 0.0) || !length[a].is_finite() {
                return Err(Error::InvalidGrid(format!("axis {a} length {}", length[a])));
            }
            let intervals = match bc {
                BoundaryKind::Periodic => n[a],
                BoundaryKind::Dirichlet => n[a] + 1,
            };
            g.n[a] = n[a];
            g.length[a] = length[a];
            g.origin[a] = origin[a];
            g.h[a] = length[a] / intervals as f64;
        }
        Ok(g)
    }

    /// Periodic grid on `[origin, origin + length)` per axis.
    pub fn periodic(origin: &[f64], length: &[f64], n: &[usize]) -> Result<Self> {
        Self::build(origin, length, n, BoundaryKind::Periodic)
    }

    /// Dirichlet grid on `(origin, origin + length)` with `n` interior nodes per axis.
    pub fn dirichlet(origin: &[f64], length: &[f64], n: &[usize]) -> Result<Self> {
        Self::build(origin, length, n, BoundaryKind::Dirichlet)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bc(&self) -> BoundaryKind {
        self.bc
    }

    pub fn is_periodic(&self) -> bool {
        self.bc == BoundaryKind::Periodic
    }

    /// Node counts, padded with 1 beyond `dim`.
    pub fn extents(&self) -> [usize; 3] {
        self.n
    }

    pub fn n(&self, axis: usize) -> usize {
        self.n[axis]
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.h[axis]
    }

    pub fn origin(&self, axis: usize) -> f64 {
        self.origin[axis]
    }

    pub fn length(&self, axis: usize) -> f64 {
        self.length[axis]
    }

    pub fn len(&self) -> usize {
        self.n.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.n[0] * (j + self.n[1] * k)
    }

    #[inline]
    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let i = idx % self.n[0];
        let r = idx / self.n[0];
        [i, r % self.n[1], r / self.n[1]]
    }

    /// Coordinate of node `i` along `axis`.
    #[inline]
    pub fn node(&self, axis: usize, i: usize) -> f64 {
        match self.bc {
            BoundaryKind::Periodic => self.origin[axis] + i as f64 * self.h[axis],
            BoundaryKind::Dirichlet => self.origin[axis] + (i + 1) as f64 * self.h[axis],
        }
    }

    pub fn coords(&self, idx: usize) -> [f64; 3] {
        let ijk = self.unravel(idx);
        let mut x = [0.0; 3];
        for a in 0..self.dim {
            x[a] = self.node(a, ijk[a]);
        }
        x
    }

    /// Extents of the grid with one halo layer on every active axis.
    pub(crate) fn padded_extents(&self) -> [usize; 3] {
        let mut p = [1; 3];
        for a in 0..self.dim {
            p[a] = self.n[a] + 2;
        }
        p
    }

    pub(crate) fn padded_len(&self) -> usize {
        self.padded_extents().iter().product()
    }
}

/// Values of the unknown on every node of a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: &Grid) -> Self {
        Field {
            grid: *grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: &Grid, c: f64) -> Self {
        Field {
            grid: *grid,
            values: vec![c; grid.len()],
        }
    }

    pub fn from_vec(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        Ok(Field {
            grid: *grid,
            values,
        })
    }

    /// Samples `f` at every node; unused coordinates are zero.
    pub fn from_fn(grid: &Grid, f: impl Fn([f64; 3]) -> f64) -> Self {
        let values = (0..grid.len()).map(|idx| f(grid.coords(idx))).collect();
        Field {
            grid: *grid,
            values,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn norm_inf(&self) -> f64 {
        norm_inf(&self.values)
    }

    pub fn norm2(&self) -> f64 {
        norm2(&self.values)
    }

    pub fn dot(&self, other: &Field) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub(crate) fn check_grid(&self, grid: &Grid) -> Result<()> {
        if &self.grid != grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Dirichlet values on the halo surrounding a Dirichlet grid.
///
/// Stored on the padded layout (one extra node on each side of every axis);
/// entries at interior positions are unused and kept at zero.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryData {
    grid: Grid,
    padded: Vec<f64>,
}

impl BoundaryData {
    pub fn from_fn(grid: &Grid, f: impl Fn([f64; 3]) -> f64) -> Result<Self> {
        if grid.bc() != BoundaryKind::Dirichlet {
            return Err(Error::Unsupported("boundary data on a periodic grid".into()));
        }
        let pe = grid.padded_extents();
        let mut padded = vec![0.0; grid.padded_len()];
        for k in 0..pe[2] {
            for j in 0..pe[1] {
                for i in 0..pe[0] {
                    let ijk = [i, j, k];
                    let on_halo = (0..grid.dim()).any(|a| ijk[a] == 0 || ijk[a] == pe[a] - 1);
                    if !on_halo {
                        continue;
                    }
                    let mut x = [0.0; 3];
                    for a in 0..grid.dim() {
                        x[a] = grid.origin(a) + ijk[a] as f64 * grid.spacing(a);
                    }
                    padded[i + pe[0] * (j + pe[1] * k)] = f(x);
                }
            }
        }
        Ok(BoundaryData {
            grid: *grid,
            padded,
        })
    }

    pub fn constant(grid: &Grid, c: f64) -> Result<Self> {
        Self::from_fn(grid, |_| c)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Applies `f` to every halo value.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> BoundaryData {
        BoundaryData {
            grid: self.grid,
            padded: self.padded.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Value at a padded index triple (halo positions only are meaningful).
    pub fn at(&self, i: usize, j: usize, k: usize) -> f64 {
        let pe = self.grid.padded_extents();
        self.padded[i + pe[0] * (j + pe[1] * k)]
    }
}

/// A field copied onto the padded layout with its halo filled, either by
/// periodic wrap or from Dirichlet data. Stencils index it uniformly.
pub(crate) struct Padded {
    pub data: Vec<f64>,
    pub stride: [isize; 3],
    ext: [usize; 3],
    dim: usize,
}

impl Padded {
    pub fn new(grid: &Grid, values: &[f64], bc: Option<&BoundaryData>) -> Result<Self> {
        let pe = grid.padded_extents();
        let n = grid.extents();
        let dim = grid.dim();
        let mut data = match (grid.bc(), bc) {
            (BoundaryKind::Dirichlet, Some(b)) => {
                if b.grid() != grid {
                    return Err(Error::GridMismatch);
                }
                b.padded.clone()
            }
            (BoundaryKind::Dirichlet, None) => {
                return Err(Error::InvalidParameter(
                    "Dirichlet grid requires boundary data".into(),
                ))
            }
            (BoundaryKind::Periodic, _) => vec![0.0; grid.padded_len()],
        };
        let off = |a: usize| usize::from(a < dim);
        let pidx = |i: usize, j: usize, k: usize| i + pe[0] * (j + pe[1] * k);
        for k in 0..n[2] {
            for j in 0..n[1] {
                let src = grid.index(0, j, k);
                let dst = pidx(off(0), j + off(1), k + off(2));
                data[dst..dst + n[0]].copy_from_slice(&values[src..src + n[0]]);
            }
        }
        if grid.bc() == BoundaryKind::Periodic {
            // Fill halos axis by axis so edges and corners pick up wrapped values.
            for a in 0..dim {
                let mut o = [0usize; 3];
                let ranges: Vec<std::ops::Range<usize>> = (0..3)
                    .map(|b| if b == a || b >= dim { 0..1 } else { 0..pe[b] })
                    .collect();
                for r2 in ranges[2].clone() {
                    for r1 in ranges[1].clone() {
                        for r0 in ranges[0].clone() {
                            o[0] = r0;
                            o[1] = r1;
                            o[2] = r2;
                            let mut lo = o;
                            let mut hi = o;
                            let mut src_lo = o;
                            let mut src_hi = o;
                            lo[a] = 0;
                            hi[a] = pe[a] - 1;
                            src_lo[a] = n[a];
                            src_hi[a] = 1;
                            data[pidx(lo[0], lo[1], lo[2])] =
                                data[pidx(src_lo[0], src_lo[1], src_lo[2])];
                            data[pidx(hi[0], hi[1], hi[2])] =
                                data[pidx(src_hi[0], src_hi[1], src_hi[2])];
                        }
                    }
                }
            }
        }
        Ok(Padded {
            data,
            stride: [1, pe[0] as isize, (pe[0] * pe[1]) as isize],
            ext: pe,
            dim,
        })
    }

    /// Padded index of interior node (i, j, k).
    #[inline]
    pub fn center(&self, i: usize, j: usize, k: usize) -> usize {
        let o = |a: usize, v: usize| if a < self.dim { v + 1 } else { v };
        o(0, i) + self.ext[0] * (o(1, j) + self.ext[1] * o(2, k))
    }

    #[inline]
    pub fn get(&self, p: usize, offset: isize) -> f64 {
        self.data[(p as isize + offset) as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_or_degenerate_grids() {
        assert!(Grid::periodic(&[0.0], &[1.0], &[2]).is_err());
        assert!(Grid::periodic(&[0.0], &[0.0], &[8]).is_err());
        assert!(Grid::dirichlet(&[0.0; 3], &[1.0; 3], &[4, 4, 4]).is_err());
        assert!(Grid::periodic(&[0.0; 3], &[1.0; 3], &[4, 4, 4]).is_ok());
    }

    #[test]
    fn spacing_conventions() {
        let p = Grid::periodic(&[0.0], &[1.0], &[4]).unwrap();
        assert_eq!(p.spacing(0), 0.25);
        assert_eq!(p.node(0, 3), 0.75);
        let d = Grid::dirichlet(&[0.0], &[10.0], &[4]).unwrap();
        assert_eq!(d.spacing(0), 2.0);
        assert_eq!(d.node(0, 0), 2.0);
        assert_eq!(d.node(0, 3), 8.0);
    }

    #[test]
    fn padded_periodic_wraps_corners() {
        let g = Grid::periodic(&[0.0, 0.0], &[3.0, 3.0], &[3, 3]).unwrap();
        let f = Field::from_fn(&g, |x| x[0] + 10.0 * x[1]);
        let p = Padded::new(&g, f.values(), None).unwrap();
        let c = p.center(0, 0, 0);
        // (-1, -1) wraps to (2, 2)
        assert_eq!(p.get(c, -p.stride[0] - p.stride[1]), 22.0);
        assert_eq!(p.get(c, p.stride[0]), 1.0);
        let c = p.center(2, 2, 0);
        assert_eq!(p.get(c, p.stride[0] + p.stride[1]), 0.0);
    }

    #[test]
    fn padded_dirichlet_uses_boundary() {
        let g = Grid::dirichlet(&[0.0], &[4.0], &[3]).unwrap();
        let bc = BoundaryData::from_fn(&g, |x| 100.0 + x[0]).unwrap();
        let f = Field::from_fn(&g, |x| x[0]);
        let p = Padded::new(&g, f.values(), Some(&bc)).unwrap();
        assert_eq!(p.data, vec![100.0, 1.0, 2.0, 3.0, 104.0]);
    }
}
