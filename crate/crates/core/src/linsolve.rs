//! Direct solvers for the static implicit systems `(a I - b L) u = rhs`.
//!
//! All work that depends only on `(L, a, b)` happens in [`HelmholtzSolver::prepare`];
//! a solve is then a transform pair and a diagonal scaling (periodic), a
//! tridiagonal sweep (1D Dirichlet) or two banded triangular sweeps (2D Dirichlet).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::operators::{Band, DiagOperator};

#[derive(Clone, Debug)]
enum Prepared {
    /// `1 / (a - b * symbol)` per mode.
    Reciprocal(Vec<f64>),
    /// Thomas algorithm: sub-diagonal, modified super-diagonal, inverse pivots.
    Tridiagonal {
        lower: Vec<f64>,
        upper: Vec<f64>,
        inv_pivot: Vec<f64>,
    },
    /// Cholesky factor stored row-wise in band form: row `i`, column `i - w + k`.
    BandedCholesky { w: usize, factor: Vec<f64> },
}

#[derive(Clone, Debug)]
pub struct HelmholtzSolver {
    op: DiagOperator,
    a: f64,
    b: f64,
    prepared: Prepared,
    prepare_flops: u64,
    solve_flops: u64,
}

impl HelmholtzSolver {
    pub fn prepare(op: &DiagOperator, a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0) || !(b >= 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "need a > 0 and b >= 0, got a = {a}, b = {b}"
            )));
        }
        let grid = *op.grid();
        let n = grid.len() as u64;
        let (prepared, prepare_flops, solve_flops) = if let Some(symbol) = op.symbol() {
            let mut recip = Vec::with_capacity(symbol.len());
            for (mode, s) in symbol.iter().enumerate() {
                let d = a - b * s;
                if d == 0.0 || !d.is_finite() {
                    return Err(Error::SingularShift { mode, value: d });
                }
                recip.push(1.0 / d);
            }
            let log_n = (n as f64).log2().ceil() as u64;
            (Prepared::Reciprocal(recip), 3 * n, 10 * n * log_n + 2 * n)
        } else {
            let band = op.band().expect("non-periodic operator is banded");
            if grid.dim() == 1 {
                tridiagonal(&band, a, b)?
            } else {
                banded_cholesky(&grid, &band, a, b)?
            }
        };
        Ok(HelmholtzSolver {
            op: op.clone(),
            a,
            b,
            prepared,
            prepare_flops,
            solve_flops,
        })
    }

    pub fn operator(&self) -> &DiagOperator {
        &self.op
    }

    pub fn shift(&self) -> f64 {
        self.a
    }

    pub fn weight(&self) -> f64 {
        self.b
    }

    /// Floating-point operations spent in `prepare`.
    pub fn prepare_flops(&self) -> u64 {
        self.prepare_flops
    }

    /// Floating-point operations per `solve`.
    pub fn solve_flops(&self) -> u64 {
        self.solve_flops
    }

    pub fn solve(&self, rhs: &Field) -> Result<Field> {
        rhs.check_grid(self.op.grid())?;
        let mut v = rhs.values().to_vec();
        self.solve_in_place(&mut v)?;
        Field::from_vec(self.op.grid(), v)
    }

    pub fn solve_in_place(&self, v: &mut [f64]) -> Result<()> {
        if v.len() != self.op.grid().len() {
            return Err(Error::GridMismatch);
        }
        match &self.prepared {
            Prepared::Reciprocal(recip) => {
                let t = self.op.transform().expect("periodic operator carries a transform");
                let mut modes = t.forward(v);
                for (m, r) in modes.iter_mut().zip(recip) {
                    *m *= r;
                }
                v.copy_from_slice(&t.inverse(&modes));
            }
            Prepared::Tridiagonal {
                lower,
                upper,
                inv_pivot,
            } => {
                let n = v.len();
                v[0] *= inv_pivot[0];
                for i in 1..n {
                    v[i] = (v[i] - lower[i] * v[i - 1]) * inv_pivot[i];
                }
                for i in (0..n - 1).rev() {
                    v[i] -= upper[i] * v[i + 1];
                }
            }
            Prepared::BandedCholesky { w, factor } => {
                let (w, n) = (*w, v.len());
                let row = |i: usize| &factor[i * (w + 1)..(i + 1) * (w + 1)];
                for i in 0..n {
                    let r = row(i);
                    let j0 = i.saturating_sub(w);
                    let mut s = v[i];
                    for j in j0..i {
                        s -= r[j + w - i] * v[j];
                    }
                    v[i] = s / r[w];
                }
                for i in (0..n).rev() {
                    v[i] /= row(i)[w];
                    let xi = v[i];
                    let r = row(i);
                    for j in i.saturating_sub(w)..i {
                        v[j] -= r[j + w - i] * xi;
                    }
                }
            }
        }
        Ok(())
    }

    /// Solves in Fourier space directly (periodic only); used when the caller
    /// already holds transformed data.
    pub fn solve_modes(&self, modes: &mut [Complex64]) -> Result<()> {
        match &self.prepared {
            Prepared::Reciprocal(recip) => {
                if modes.len() != recip.len() {
                    return Err(Error::GridMismatch);
                }
                for (m, r) in modes.iter_mut().zip(recip) {
                    *m *= r;
                }
                Ok(())
            }
            _ => Err(Error::Unsupported("mode-space solve on a Dirichlet grid".into())),
        }
    }
}

type PrepOut = (Prepared, u64, u64);

/// Matrix entry `(a I - b A)[row][row + offset]` from the band of `A`.
fn entry(band: &Band, a: f64, b: f64, row: usize, offset: isize) -> f64 {
    let mut v = if offset == 0 { a } else { 0.0 };
    for (o, d) in band.offsets.iter().zip(&band.diags) {
        if *o == offset {
            v -= b * d[row];
        }
    }
    v
}

fn tridiagonal(band: &Band, a: f64, b: f64) -> Result<PrepOut> {
    if band.offsets.iter().any(|o| o.abs() > 1) {
        return Err(Error::Unsupported("1D operator wider than tridiagonal".into()));
    }
    let n = band.diags[0].len();
    let sub: Vec<f64> = (0..n).map(|i| entry(band, a, b, i, -1)).collect();
    let diag: Vec<f64> = (0..n).map(|i| entry(band, a, b, i, 0)).collect();
    let sup: Vec<f64> = (0..n).map(|i| entry(band, a, b, i, 1)).collect();
    let mut upper = vec![0.0; n];
    let mut inv_pivot = vec![0.0; n];
    for i in 0..n {
        let pivot = if i == 0 {
            diag[0]
        } else {
            diag[i] - sub[i] * upper[i - 1]
        };
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(Error::Factorization { row: i, pivot });
        }
        inv_pivot[i] = 1.0 / pivot;
        upper[i] = sup[i] * inv_pivot[i];
    }
    let n64 = n as u64;
    Ok((
        Prepared::Tridiagonal {
            lower: sub,
            upper,
            inv_pivot,
        },
        4 * n64,
        5 * n64,
    ))
}

fn banded_cholesky(grid: &Grid, band: &Band, a: f64, b: f64) -> Result<PrepOut> {
    let n = grid.len();
    let w = band.offsets.iter().map(|o| o.unsigned_abs()).max().unwrap_or(0);
    for i in 0..n {
        for off in 1..=w as isize {
            if i + (off as usize) < n {
                let up = entry(band, a, b, i, off);
                let down = entry(band, a, b, i + off as usize, -off);
                if (up - down).abs() > 1e-12 * (up.abs() + down.abs()) {
                    return Err(Error::Unsupported("non-symmetric Dirichlet operator".into()));
                }
            }
        }
    }
    let stride = w + 1;
    let mut factor = vec![0.0; n * stride];
    for i in 0..n {
        for k in 0..=w {
            let j = i as isize - w as isize + k as isize;
            if j >= 0 {
                factor[i * stride + k] = entry(band, a, b, i, j - i as isize);
            }
        }
    }
    let mut flops = 0u64;
    for j in 0..n {
        let j0 = j.saturating_sub(w);
        let mut s = factor[j * stride + w];
        for k in j0..j {
            let l = factor[j * stride + k + w - j];
            s -= l * l;
        }
        flops += 2 * (j - j0) as u64;
        if !(s > 0.0) {
            return Err(Error::Factorization { row: j, pivot: s });
        }
        let d = s.sqrt();
        factor[j * stride + w] = d;
        for i in j + 1..(j + w + 1).min(n) {
            let i0 = i.saturating_sub(w);
            let mut s = factor[i * stride + j + w - i];
            for k in i0.max(j0)..j {
                s -= factor[i * stride + k + w - i] * factor[j * stride + k + w - j];
            }
            flops += 2 * (j - i0.max(j0)) as u64 + 1;
            factor[i * stride + j + w - i] = s / d;
        }
    }
    let solve = 4 * (n as u64) * (w as u64 + 1);
    Ok((Prepared::BandedCholesky { w, factor }, flops, solve))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::BoundaryData;
    use crate::operators::{apply, biharmonic, laplacian};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(g: &Grid, seed: u64) -> Field {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Field::from_vec(g, (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
    }

    /// `(a I - b L) f` with homogeneous boundary data.
    fn forward(op: &DiagOperator, a: f64, b: f64, f: &Field) -> Field {
        let bc = (!op.grid().is_periodic()).then(|| BoundaryData::constant(op.grid(), 0.0).unwrap());
        let lf = apply(op, f, bc.as_ref()).unwrap();
        let v = f.values().iter().zip(lf.values()).map(|(x, l)| a * x - b * l).collect();
        Field::from_vec(op.grid(), v).unwrap()
    }

    fn rel_err(a: &Field, b: &Field) -> f64 {
        let d: Vec<f64> = a.values().iter().zip(b.values()).map(|(x, y)| x - y).collect();
        crate::grid::norm2(&d) / b.norm2()
    }

    fn grids() -> Vec<Grid> {
        vec![
            Grid::periodic(&[0.0], &[1.0], &[64]).unwrap(),
            Grid::periodic(&[0.0, 0.0], &[1.0, 2.0], &[16, 32]).unwrap(),
            Grid::periodic(&[0.0; 3], &[1.0; 3], &[8, 8, 8]).unwrap(),
            Grid::dirichlet(&[0.0], &[10.0], &[200]).unwrap(),
            Grid::dirichlet(&[0.0, 0.0], &[1.0, 1.0], &[20, 17]).unwrap(),
        ]
    }

    #[test]
    fn forward_then_solve_round_trip() {
        for (s, g) in grids().iter().enumerate() {
            let op = laplacian(g).unwrap();
            for (a, b) in [(1.0, 0.0), (1.0, 0.01), (1.5, 3.0), (0.5, 1.0)] {
                let solver = HelmholtzSolver::prepare(&op, a, b).unwrap();
                let known = random_field(g, s as u64);
                let back = solver.solve(&forward(&op, a, b, &known)).unwrap();
                assert!(rel_err(&back, &known) <= 1e-10, "grid {s} a={a} b={b}");
            }
        }
    }

    #[test]
    fn residual_on_random_rhs() {
        for (s, g) in grids().iter().enumerate() {
            let op = laplacian(g).unwrap();
            let solver = HelmholtzSolver::prepare(&op, 1.0, 0.37).unwrap();
            let rhs = random_field(g, 100 + s as u64);
            let x = solver.solve(&rhs).unwrap();
            assert!(rel_err(&forward(&op, 1.0, 0.37, &x), &rhs) <= 1e-10);
        }
    }

    #[test]
    fn division_when_weight_is_zero() {
        let g = Grid::dirichlet(&[0.0], &[1.0], &[9]).unwrap();
        let s = HelmholtzSolver::prepare(&laplacian(&g).unwrap(), 4.0, 0.0).unwrap();
        let x = s.solve(&Field::constant(&g, 2.0)).unwrap();
        assert!(x.values().iter().all(|v| (v - 0.5).abs() < 1e-15));
    }

    #[test]
    fn zero_and_constant_rhs() {
        let g = Grid::periodic(&[0.0, 0.0], &[1.0, 1.0], &[8, 8]).unwrap();
        let s = HelmholtzSolver::prepare(&laplacian(&g).unwrap(), 2.0, 5.0).unwrap();
        assert_eq!(s.solve(&Field::zeros(&g)).unwrap().norm_inf(), 0.0);
        let c = s.solve(&Field::constant(&g, 3.0)).unwrap();
        assert!(c.values().iter().all(|v| (v - 1.5).abs() < 1e-14));
    }

    #[test]
    fn singular_shift_and_bad_parameters() {
        let g = Grid::periodic(&[0.0], &[1.0], &[8]).unwrap();
        let op = laplacian(&g).unwrap();
        assert!(HelmholtzSolver::prepare(&op, 0.0, 1.0).is_err());
        assert!(HelmholtzSolver::prepare(&op, 1.0, -1.0).is_err());
        // A positive-symbol operator can hit a = b * symbol exactly.
        let pos = op.clone().scaled(-1.0);
        let top = pos.symbol().unwrap().iter().cloned().fold(0.0, f64::max);
        assert!(matches!(
            HelmholtzSolver::prepare(&pos, top, 1.0),
            Err(Error::SingularShift { .. })
        ));
    }

    #[test]
    fn biharmonic_stabilizer_round_trip() {
        let g = Grid::periodic(&[0.0, 0.0], &[32.0, 32.0], &[32, 32]).unwrap();
        let op = biharmonic(&g).unwrap().scaled(-1.0);
        let solver = HelmholtzSolver::prepare(&op, 1.0 + 0.88 * 0.5 * 100.0, 0.88 * 5.0).unwrap();
        let known = random_field(&g, 7);
        let back = solver.solve(&forward(&op, 1.0 + 44.0, 4.4, &known)).unwrap();
        assert!(rel_err(&back, &known) <= 1e-10);
    }

    #[test]
    fn solves_are_bit_identical() {
        for g in grids() {
            let s = HelmholtzSolver::prepare(&laplacian(&g).unwrap(), 1.0, 0.2).unwrap();
            let rhs = random_field(&g, 3);
            let x1 = s.solve(&rhs).unwrap();
            let x2 = s.solve(&rhs).unwrap();
            assert_eq!(x1.values(), x2.values());
        }
    }

    #[test]
    fn grid_mismatch() {
        let g = Grid::dirichlet(&[0.0], &[1.0], &[9]).unwrap();
        let other = Grid::dirichlet(&[0.0], &[1.0], &[10]).unwrap();
        let s = HelmholtzSolver::prepare(&laplacian(&g).unwrap(), 1.0, 1.0).unwrap();
        assert!(matches!(s.solve(&Field::zeros(&other)), Err(Error::GridMismatch)));
    }
}
