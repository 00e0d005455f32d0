//! Hitting times of the simple random walk from Green's functions, with a
//! first-step linear-system oracle.

use nalgebra::{DMatrix, DVector};

use crate::closed_forms::{TorusRow, TorusSpec};
use crate::error::{check_index, Error, Result};
use crate::graph::{RegularGraph, VertexId};
use crate::oracle::GreenTable;

/// Largest state count the dense first-step oracle accepts.
pub const ORACLE_MAX_STATES: usize = 3000;

/// Scaled residual bound for the first-step solve.
pub const ORACLE_RESIDUAL_TOL: f64 = 1e-10;

/// Expected first-passage times `Q(source, target)`.
#[derive(Debug, Clone)]
pub struct HittingTable {
    /// Row `i` is the source `sources[i]`, column `j` the target `targets[j]`.
    pub entries: DMatrix<f64>,
    pub sources: Vec<VertexId>,
    pub targets: Vec<VertexId>,
    /// Grid shape when the targets are every vertex of a torus, row-major.
    pub shape: Option<Vec<usize>>,
}

impl HittingTable {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    pub fn max(&self) -> f64 {
        self.entries.max()
    }

    /// Position of the largest entry as `(source index, target index)`.
    pub fn argmax(&self) -> (usize, usize) {
        self.entries.iamax_full()
    }
}

/// `Q(x,y) = (vol/d_y) G(y,y) - (vol/sqrt(d_x d_y)) G(x,y)`, which on a
/// `d`-regular graph with `n` vertices is `n (G(y,y) - G(x,y))`.
pub fn hitting_time(green: &GreenTable, x: VertexId, y: VertexId) -> Result<f64> {
    if green.alpha.is_some() {
        return Err(Error::Misuse(
            "hitting times need the plain pseudo Green's function, not G_alpha".into(),
        ));
    }
    if green.subset.is_proper() {
        return Err(Error::Misuse(
            "hitting times need the full-graph Green's function, not a Dirichlet one".into(),
        ));
    }
    let host = green.subset.host();
    let n = host.vertex_count();
    check_index(x.0, n)?;
    check_index(y.0, n)?;
    if x == y {
        return Ok(0.0);
    }
    let vol = host.volume();
    let (dx, dy) = (host.degree() as f64, host.degree() as f64);
    Ok(vol / dy * green.get(y.0, y.0) - vol / (dx * dy).sqrt() * green.get(x.0, y.0))
}

/// Every `Q(x, y)` of the graph behind `green`.
pub fn hitting_table(green: &GreenTable) -> Result<HittingTable> {
    let n = green.subset.host().vertex_count();
    let mut entries = DMatrix::zeros(n, n);
    for x in 0..n {
        for y in 0..n {
            entries[(x, y)] = hitting_time(green, VertexId(x), VertexId(y))?;
        }
    }
    let all: Vec<VertexId> = (0..n).map(VertexId).collect();
    Ok(HittingTable {
        entries,
        sources: all.clone(),
        targets: all,
        shape: None,
    })
}

/// `Q(., target)` by solving `(I - P) h = 1` on the non-target states.
pub fn hitting_oracle(g: &RegularGraph, target: VertexId) -> Result<Vec<f64>> {
    let n = g.vertex_count();
    check_index(target.0, n)?;
    if n > ORACLE_MAX_STATES {
        return Err(Error::InvalidSize(format!(
            "first-step oracle handles at most {ORACLE_MAX_STATES} states, got {n}"
        )));
    }
    let index = |v: usize| if v < target.0 { v } else { v - 1 };
    let k = n - 1;
    let p = 1.0 / g.degree() as f64;
    let mut a = DMatrix::<f64>::identity(k, k);
    for v in (0..n).filter(|&v| v != target.0) {
        for &w in g.neighbors(VertexId(v)) {
            if w != target.0 {
                a[(index(v), index(w))] -= p;
            }
        }
    }
    let ones = DVector::from_element(k, 1.0);
    let h = a.clone().lu().solve(&ones).ok_or_else(|| {
        Error::Structural("first-step system is singular; target unreachable".into())
    })?;
    let scale = h.amax().max(1.0);
    let residual = (&a * &h - &ones).amax() / scale;
    if !residual.is_finite() || residual > ORACLE_RESIDUAL_TOL {
        return Err(Error::Structural(format!(
            "first-step residual {residual:e}; target unreachable?"
        )));
    }
    let mut out = Vec::with_capacity(n);
    for v in 0..n {
        out.push(if v == target.0 { 0.0 } else { h[index(v)] });
    }
    Ok(out)
}

/// `Q(source, y)` for every vertex `y` of a 2-torus.
pub fn hitting_grid(spec: &TorusSpec, source: &[usize]) -> Result<HittingTable> {
    hitting_grid_with_threads(spec, source, 1)
}

pub fn hitting_grid_with_threads(
    spec: &TorusSpec,
    source: &[usize],
    threads: usize,
) -> Result<HittingTable> {
    if spec.t() != 2 {
        return Err(Error::InvalidSize(format!(
            "hitting grid needs a 2-torus, got t = {}",
            spec.t()
        )));
    }
    let (m, n) = (spec.dims()[0], spec.dims()[1]);
    if source.len() != 2 {
        return Err(Error::Shape(format!(
            "source needs 2 coordinates, got {}",
            source.len()
        )));
    }
    check_index(source[0], m)?;
    check_index(source[1], n)?;
    let row = TorusRow::compute_with_threads(spec, threads)?;
    let count = (m * n) as f64;
    let g0 = row.get(&[0, 0])?;
    let mut entries = DMatrix::zeros(1, m * n);
    for x in 0..m {
        for y in 0..n {
            let d = [(x + m - source[0]) % m, (y + n - source[1]) % n];
            entries[(0, x * n + y)] = if d == [0, 0] {
                0.0
            } else {
                count * (g0 - row.get(&d)?)
            };
        }
    }
    Ok(HittingTable {
        entries,
        sources: vec![VertexId(source[0] * n + source[1])],
        targets: (0..m * n).map(VertexId).collect(),
        shape: Some(vec![m, n]),
    })
}
