//! Zero contours of 2D fields by marching squares with linear edge interpolation.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};

#[derive(Clone, Debug, PartialEq)]
pub struct Polyline {
    pub points: Vec<[f64; 2]>,
    pub closed: bool,
}

/// Edge identity: node `(i, j)` and direction (0 = +x, 1 = +y).
type EdgeKey = (usize, usize, u8);

fn crossing(grid: &Grid, a: (usize, usize), b: (usize, usize), va: f64, vb: f64) -> [f64; 2] {
    let t = va / (va - vb);
    let pa = [grid.node(0, a.0), grid.node(1, a.1)];
    let pb = [grid.node(0, b.0), grid.node(1, b.1)];
    [pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])]
}

/// The `u = 0` contour as polylines in domain coordinates. Cells are not
/// wrapped across periodic edges; an empty result means no interface.
pub fn extract_zero_contour(u: &Field) -> Result<Vec<Polyline>> {
    let grid = u.grid();
    if grid.dim() != 2 {
        return Err(Error::Unsupported("contours need a 2D field".into()));
    }
    let (nx, ny) = (grid.n(0), grid.n(1));
    let v = |i: usize, j: usize| u.values()[grid.index(i, j, 0)];
    let mut points: HashMap<EdgeKey, [f64; 2]> = HashMap::new();
    let mut segments: Vec<(EdgeKey, EdgeKey)> = Vec::new();
    for j in 0..ny.saturating_sub(1) {
        for i in 0..nx.saturating_sub(1) {
            let c = [v(i, j), v(i + 1, j), v(i + 1, j + 1), v(i, j + 1)];
            let inside = c.map(|x| x < 0.0);
            // Edges: bottom, right, top, left.
            let edges: [(EdgeKey, (usize, usize), (usize, usize), usize, usize); 4] = [
                ((i, j, 0), (i, j), (i + 1, j), 0, 1),
                ((i + 1, j, 1), (i + 1, j), (i + 1, j + 1), 1, 2),
                ((i, j + 1, 0), (i, j + 1), (i + 1, j + 1), 3, 2),
                ((i, j, 1), (i, j), (i, j + 1), 0, 3),
            ];
            let mut cut = [false; 4];
            for (e, &(key, a, b, ca, cb)) in edges.iter().enumerate() {
                if inside[ca] != inside[cb] {
                    cut[e] = true;
                    points.entry(key).or_insert_with(|| crossing(grid, a, b, c[ca], c[cb]));
                }
            }
            let k = |e: usize| edges[e].0;
            match cut.iter().filter(|&&x| x).count() {
                0 => {}
                2 => {
                    let mut it = (0..4).filter(|&e| cut[e]);
                    let (a, b) = (it.next().unwrap(), it.next().unwrap());
                    segments.push((k(a), k(b)));
                }
                _ => {
                    let centre = 0.25 * (c[0] + c[1] + c[2] + c[3]);
                    if (centre < 0.0) == inside[0] {
                        // Corners 0 and 2 are joined through the centre.
                        segments.push((k(0), k(1)));
                        segments.push((k(2), k(3)));
                    } else {
                        segments.push((k(0), k(3)));
                        segments.push((k(1), k(2)));
                    }
                }
            }
        }
    }
    Ok(link(&segments, &points))
}

fn link(segments: &[(EdgeKey, EdgeKey)], points: &HashMap<EdgeKey, [f64; 2]>) -> Vec<Polyline> {
    let mut adj: HashMap<EdgeKey, Vec<usize>> = HashMap::new();
    for (s, &(a, b)) in segments.iter().enumerate() {
        adj.entry(a).or_default().push(s);
        adj.entry(b).or_default().push(s);
    }
    let mut used = vec![false; segments.len()];
    let mut out = Vec::new();
    let walk = |start_seg: usize, from: EdgeKey, used: &mut Vec<bool>| -> Vec<EdgeKey> {
        let mut chain = vec![from];
        let mut seg = start_seg;
        let mut at = from;
        loop {
            used[seg] = true;
            let (a, b) = segments[seg];
            let next = if a == at { b } else { a };
            chain.push(next);
            at = next;
            match adj[&at].iter().find(|&&s| !used[s]) {
                Some(&s) => seg = s,
                None => break,
            }
        }
        chain
    };
    // Open chains first, starting from their ends, in a deterministic order.
    let mut keys: Vec<&EdgeKey> = adj.keys().collect();
    keys.sort();
    for &key in &keys {
        let segs = &adj[key];
        if segs.len() == 1 && !used[segs[0]] {
            let chain = walk(segs[0], *key, &mut used);
            out.push(Polyline {
                points: chain.iter().map(|k| points[k]).collect(),
                closed: false,
            });
        }
    }
    for s in 0..segments.len() {
        if !used[s] {
            let chain = walk(s, segments[s].0, &mut used);
            let closed = chain.first() == chain.last();
            let mut pts: Vec<[f64; 2]> = chain.iter().map(|k| points[k]).collect();
            if closed {
                pts.pop();
            }
            out.push(Polyline { points: pts, closed });
        }
    }
    out
}

/// The `k`-th `xy` slice of a 3D field, as a 2D field.
pub fn slice_z(u: &Field, k: usize) -> Result<Field> {
    let g = u.grid();
    if g.dim() != 3 || k >= g.n(2) {
        return Err(Error::InvalidParameter("slice of a non-3D field or out of range".into()));
    }
    let plane = if g.is_periodic() {
        Grid::periodic(&[g.origin(0), g.origin(1)], &[g.length(0), g.length(1)], &[g.n(0), g.n(1)])?
    } else {
        Grid::dirichlet(&[g.origin(0), g.origin(1)], &[g.length(0), g.length(1)], &[g.n(0), g.n(1)])?
    };
    let n = g.n(0) * g.n(1);
    Field::from_vec(&plane, u.values()[k * n..(k + 1) * n].to_vec())
}

fn point_segment(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0)
    };
    (p[0] - a[0] - t * d[0]).hypot(p[1] - a[1] - t * d[1])
}

fn directed(a: &[Polyline], b: &[Polyline]) -> f64 {
    let mut segs = Vec::new();
    for pl in b {
        let n = pl.points.len();
        if n == 1 {
            segs.push((pl.points[0], pl.points[0]));
        }
        let m = if pl.closed { n } else { n.saturating_sub(1) };
        for s in 0..m {
            segs.push((pl.points[s], pl.points[(s + 1) % n]));
        }
    }
    a.iter()
        .flat_map(|pl| pl.points.iter())
        .map(|&p| segs.iter().map(|&(s, e)| point_segment(p, s, e)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

/// Symmetric Hausdorff distance between two contour sets, measured from
/// vertices to segments. Infinite if exactly one set is empty.
pub fn hausdorff(a: &[Polyline], b: &[Polyline]) -> f64 {
    let ea = a.iter().all(|p| p.points.is_empty());
    let eb = b.iter().all(|p| p.points.is_empty());
    match (ea, eb) {
        (true, true) => 0.0,
        (true, false) | (false, true) => f64::INFINITY,
        _ => directed(a, b).max(directed(b, a)),
    }
}

/// Area enclosed by the closed polylines (shoelace), summed without sign.
pub fn enclosed_area(contours: &[Polyline]) -> f64 {
    contours
        .iter()
        .filter(|p| p.closed)
        .map(|p| {
            let n = p.points.len();
            let s: f64 = (0..n)
                .map(|i| {
                    let (a, b) = (p.points[i], p.points[(i + 1) % n]);
                    a[0] * b[1] - b[0] * a[1]
                })
                .sum();
            0.5 * s.abs()
        })
        .sum()
}
