//! Regular graphs, Dirichlet vertex subsets and their Laplacians.
//!
//! Products index their vertices row-major over the factor coordinates with
//! the first factor varying slowest, so the torus `C_{m_1} x ... x C_{m_t}`
//! stores vertex `(x_1, ..., x_t)` at `((x_1 * m_2 + x_2) * m_3 + ...)`.

use std::collections::{HashSet, VecDeque};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{check_index, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId(pub usize);

impl From<usize> for VertexId {
    fn from(index: usize) -> Self {
        VertexId(index)
    }
}

/// A finite, simple, connected graph in which every vertex has the same degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularGraph {
    degree: usize,
    neighbors: Vec<Vec<usize>>,
    shape: Option<Vec<usize>>,
}

impl RegularGraph {
    /// Validates an adjacency list: simple, symmetric, regular and connected.
    pub fn from_neighbors(mut neighbors: Vec<Vec<usize>>) -> Result<Self> {
        let n = neighbors.len();
        if n == 0 {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        for (x, list) in neighbors.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidGraph(format!(
                    "vertex {x} has a repeated edge"
                )));
            }
            for &y in list.iter() {
                check_index(y, n)?;
                if y == x {
                    return Err(Error::InvalidGraph(format!("self-loop at vertex {x}")));
                }
            }
        }
        for x in 0..n {
            for &y in &neighbors[x] {
                if neighbors[y].binary_search(&x).is_err() {
                    return Err(Error::InvalidGraph(format!(
                        "edge {x}-{y} is not symmetric"
                    )));
                }
            }
        }
        let degree = neighbors[0].len();
        if degree == 0 {
            return Err(Error::InvalidGraph("degree must be positive".into()));
        }
        if let Some(x) = neighbors.iter().position(|l| l.len() != degree) {
            return Err(Error::InvalidGraph(format!(
                "vertex {x} has degree {} but vertex 0 has degree {degree}",
                neighbors[x].len()
            )));
        }
        let all: Vec<usize> = (0..n).collect();
        if !induced_connected(&neighbors, &all) {
            return Err(Error::InvalidGraph("graph is disconnected".into()));
        }
        Ok(RegularGraph {
            degree,
            neighbors,
            shape: None,
        })
    }

    /// The cycle `C_m` on vertices `0..m`.
    pub fn cycle(m: usize) -> Result<Self> {
        if m < 3 {
            return Err(Error::InvalidSize(format!("cycle needs m >= 3, got {m}")));
        }
        let neighbors = (0..m).map(|i| vec![(i + m - 1) % m, (i + 1) % m]).collect();
        let mut g = Self::from_neighbors(neighbors)?;
        g.shape = Some(vec![m]);
        Ok(g)
    }

    /// The torus `C_{m_1} x ... x C_{m_t}`.
    pub fn torus(dims: &[usize]) -> Result<Self> {
        let (first, rest) = dims
            .split_first()
            .ok_or_else(|| Error::InvalidSize("torus needs at least one dimension".into()))?;
        rest.iter().try_fold(Self::cycle(*first)?, |acc, &m| {
            Ok(cartesian_product(&acc, &Self::cycle(m)?))
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.neighbors.len()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Cycle lengths when the graph is a product of cycles.
    pub fn shape(&self) -> Option<&[usize]> {
        self.shape.as_deref()
    }

    pub fn neighbors(&self, x: VertexId) -> &[usize] {
        &self.neighbors[x.0]
    }

    pub fn adjacent(&self, x: VertexId, y: VertexId) -> bool {
        self.neighbors[x.0].binary_search(&y.0).is_ok()
    }

    /// `vol(G) = sum of degrees`.
    pub fn volume(&self) -> f64 {
        (self.degree * self.vertex_count()) as f64
    }

    /// Flattens torus coordinates into a vertex index.
    pub fn vertex_at(&self, coords: &[usize]) -> Result<VertexId> {
        let shape = self
            .shape
            .as_ref()
            .ok_or_else(|| Error::Misuse("graph carries no coordinate shape".into()))?;
        if shape.len() != coords.len() {
            return Err(Error::Shape(format!(
                "expected {} coordinates, got {}",
                shape.len(),
                coords.len()
            )));
        }
        let mut index = 0;
        for (&c, &m) in coords.iter().zip(shape) {
            check_index(c, m)?;
            index = index * m + c;
        }
        Ok(VertexId(index))
    }

    /// Inverse of [`RegularGraph::vertex_at`].
    pub fn coords_of(&self, x: VertexId) -> Result<Vec<usize>> {
        let shape = self
            .shape
            .as_ref()
            .ok_or_else(|| Error::Misuse("graph carries no coordinate shape".into()))?;
        check_index(x.0, self.vertex_count())?;
        let mut rest = x.0;
        let mut coords = vec![0; shape.len()];
        for (c, &m) in coords.iter_mut().zip(shape).rev() {
            *c = rest % m;
            rest /= m;
        }
        Ok(coords)
    }
}

/// Cartesian product `g x h`; vertex `(u, v)` gets index `u * |h| + v`.
pub fn cartesian_product(g: &RegularGraph, h: &RegularGraph) -> RegularGraph {
    let nh = h.vertex_count();
    let neighbors = (0..g.vertex_count() * nh)
        .map(|idx| {
            let (u, v) = (idx / nh, idx % nh);
            let mut list: Vec<usize> = g.neighbors[u].iter().map(|&u2| u2 * nh + v).collect();
            list.extend(h.neighbors[v].iter().map(|&v2| u * nh + v2));
            list.sort_unstable();
            list
        })
        .collect();
    let shape = match (&g.shape, &h.shape) {
        (Some(a), Some(b)) => Some(a.iter().chain(b).copied().collect()),
        _ => None,
    };
    RegularGraph {
        degree: g.degree + h.degree,
        neighbors,
        shape,
    }
}

fn induced_connected(neighbors: &[Vec<usize>], members: &[usize]) -> bool {
    let inside: HashSet<usize> = members.iter().copied().collect();
    let Some(&start) = members.first() else {
        return false;
    };
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        for &y in &neighbors[x] {
            if inside.contains(&y) && seen.insert(y) {
                queue.push_back(y);
            }
        }
    }
    seen.len() == inside.len()
}

/// A vertex subset `S` of a host graph whose induced subgraph is connected.
///
/// Degrees always refer to the host graph: restricting to `S` deletes rows and
/// columns, it does not recompute degrees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirichletSubset {
    host: RegularGraph,
    members: Vec<VertexId>,
    proper: bool,
}

impl DirichletSubset {
    pub fn new(host: &RegularGraph, members: Vec<VertexId>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidSubset("subset is empty".into()));
        }
        let n = host.vertex_count();
        let mut seen = HashSet::with_capacity(members.len());
        for v in &members {
            check_index(v.0, n)?;
            if !seen.insert(v.0) {
                return Err(Error::InvalidSubset(format!("vertex {} listed twice", v.0)));
            }
        }
        let raw: Vec<usize> = members.iter().map(|v| v.0).collect();
        if !induced_connected(&host.neighbors, &raw) {
            return Err(Error::InvalidSubset(
                "induced subgraph is disconnected".into(),
            ));
        }
        Ok(DirichletSubset {
            host: host.clone(),
            proper: members.len() < n,
            members,
        })
    }

    /// The whole vertex set, in index order.
    pub fn full(host: &RegularGraph) -> Self {
        DirichletSubset {
            host: host.clone(),
            members: (0..host.vertex_count()).map(VertexId).collect(),
            proper: false,
        }
    }

    /// `S x S'` inside `host(S) x host(S')`, members ordered row-major.
    pub fn product(a: &DirichletSubset, b: &DirichletSubset) -> Self {
        let host = cartesian_product(&a.host, &b.host);
        let nb = b.host.vertex_count();
        let members = a
            .members
            .iter()
            .flat_map(|u| b.members.iter().map(move |v| VertexId(u.0 * nb + v.0)))
            .collect();
        DirichletSubset {
            host,
            members,
            proper: a.proper || b.proper,
        }
    }

    pub fn host(&self) -> &RegularGraph {
        &self.host
    }

    pub fn members(&self) -> &[VertexId] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_proper(&self) -> bool {
        self.proper
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LaplacianKind {
    /// `L = D - A`
    Combinatorial,
    /// `D^{-1/2} L D^{-1/2}`
    Normalized,
    /// `I - P` with `P = D^{-1} A`
    DiscreteLaplace,
}

#[derive(Debug, Clone)]
pub struct LaplacianMatrix {
    pub kind: LaplacianKind,
    pub entries: DMatrix<f64>,
    pub subset: DirichletSubset,
}

/// Laplacian of the host restricted to the rows and columns of `subset`.
pub fn laplacian(subset: &DirichletSubset, kind: LaplacianKind) -> LaplacianMatrix {
    let host = subset.host();
    let d = host.degree() as f64;
    let members = subset.members();
    let entries = DMatrix::from_fn(members.len(), members.len(), |i, j| {
        let (x, y) = (members[i], members[j]);
        if i == j {
            match kind {
                LaplacianKind::Combinatorial => d,
                LaplacianKind::Normalized | LaplacianKind::DiscreteLaplace => 1.0,
            }
        } else if host.adjacent(x, y) {
            match kind {
                LaplacianKind::Combinatorial => -1.0,
                // all degrees are equal, so sqrt(d_x d_y) = d
                LaplacianKind::Normalized => -1.0 / d,
                LaplacianKind::DiscreteLaplace => -1.0 / d,
            }
        } else {
            0.0
        }
    });
    LaplacianMatrix {
        kind,
        entries,
        subset: subset.clone(),
    }
}
