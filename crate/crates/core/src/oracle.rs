//! Brute-force ground truth for every closed form in the crate.
//!
//! Everything here works on dense matrices built from the graph itself:
//! a cyclic Jacobi eigensolver, Green's functions assembled from the
//! eigensystem or by direct inversion, the transient series of an absorbing
//! walk and the fundamental matrix of the full walk.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::{laplacian, DirichletSubset, LaplacianKind, LaplacianMatrix, RegularGraph};

pub const EIGEN_RESIDUAL_TOL: f64 = 1e-10;
pub const SYMMETRY_TOL: f64 = 1e-10;
pub const IMAG_DISCARD_TOL: f64 = 1e-12;
pub const POLE_TOL: f64 = 1e-12;

const JACOBI_OFF_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi rotations on a dense symmetric matrix.
///
/// Returns unsorted eigenvalues and the matrix whose columns are the matching
/// orthonormal eigenvectors.
pub fn jacobi_eigen(matrix: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = matrix.nrows();
    if matrix.ncols() != n {
        return Err(Error::Shape(format!(
            "{}x{} matrix is not square",
            n,
            matrix.ncols()
        )));
    }
    if (matrix - matrix.transpose()).amax() > SYMMETRY_TOL {
        return Err(Error::Shape("matrix is not symmetric".into()));
    }
    // row-major working copies; a[i * n + j]
    let mut a: Vec<f64> = (0..n * n).map(|k| matrix[(k / n, k % n)]).collect();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let scale = matrix.norm().max(1.0);

    let off_norm = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        s.sqrt()
    };

    for _sweep in 0..JACOBI_MAX_SWEEPS {
        if off_norm(&a) <= JACOBI_OFF_TOL * scale {
            return Ok((
                (0..n).map(|i| a[i * n + i]).collect(),
                DMatrix::from_row_slice(n, n, &v),
            ));
        }
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                // negligible against the diagonal: rotating would only add roundoff
                if apq.abs() <= f64::EPSILON * 0.5 * (app.abs() + aqq.abs()) || apq == 0.0 {
                    continue;
                }
                rotated = true;
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
        if !rotated {
            return Ok((
                (0..n).map(|i| a[i * n + i]).collect(),
                DMatrix::from_row_slice(n, n, &v),
            ));
        }
    }
    Err(Error::Numeric(format!(
        "Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps (off-diagonal norm {:e})",
        off_norm(&a)
    )))
}

/// Orthonormal eigensystem of a normalized (Dirichlet) Laplacian, ascending.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    /// Column `j` is the eigenvector of `values[j]`.
    pub vectors: DMatrix<Complex64>,
    /// Label of each pair in the basis it came from (Fourier frequency for
    /// cycles, position before sorting for Jacobi).
    pub labels: Vec<usize>,
    pub subset: DirichletSubset,
}

impl Eigensystem {
    /// Sorts the pairs by eigenvalue and pins `values[0] = 0` on full graphs.
    pub fn new(
        values: Vec<f64>,
        vectors: DMatrix<Complex64>,
        labels: Vec<usize>,
        subset: DirichletSubset,
    ) -> Result<Self> {
        let n = values.len();
        if vectors.nrows() != n || vectors.ncols() != n || labels.len() != n || subset.len() != n {
            return Err(Error::Shape("eigensystem parts disagree on size".into()));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        let mut sorted: Vec<f64> = order.iter().map(|&i| values[i]).collect();
        let vectors = DMatrix::from_fn(n, n, |r, c| vectors[(r, order[c])]);
        let labels = order.iter().map(|&i| labels[i]).collect();
        if !subset.is_proper() {
            if sorted[0].abs() > EIGEN_RESIDUAL_TOL {
                return Err(Error::Numeric(format!(
                    "full-graph spectrum starts at {:e}, expected 0",
                    sorted[0]
                )));
            }
            sorted[0] = 0.0;
        }
        for v in sorted.iter_mut() {
            if *v < 0.0 && *v > -EIGEN_RESIDUAL_TOL {
                *v = 0.0;
            } else if *v > 2.0 && *v < 2.0 + EIGEN_RESIDUAL_TOL {
                *v = 2.0;
            }
        }
        Ok(Eigensystem {
            values: sorted,
            vectors,
            labels,
            subset,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// True when the Laplacian is singular, i.e. the subset is the whole graph.
    pub fn is_singular(&self) -> bool {
        !self.subset.is_proper()
    }

    /// `max |V* V - I|`.
    pub fn gram_residual(&self) -> f64 {
        let gram = self.vectors.adjoint() * &self.vectors;
        let n = self.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram[(i, j)] - Complex64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    /// Largest `||M v - lambda v||` over all pairs.
    pub fn residual(&self, matrix: &DMatrix<f64>) -> f64 {
        let m = matrix.map(|x| Complex64::new(x, 0.0));
        (0..self.len())
            .map(|j| {
                let v = self.vectors.column(j);
                (&m * v - v * Complex64::new(self.values[j], 0.0)).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Replaces the basis of every repeated eigenspace by `basis * Q`, where
    /// `Q` is the orthogonal factor of `mix(k)` for a `k`-fold eigenvalue.
    pub fn rotate_within_eigenspaces(
        &self,
        mut mix: impl FnMut(usize) -> DMatrix<f64>,
    ) -> Result<Eigensystem> {
        let mut out = self.clone();
        let n = self.len();
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n && (self.values[end] - self.values[start]).abs() < EIGEN_RESIDUAL_TOL {
                end += 1;
            }
            let k = end - start;
            if k > 1 {
                let m = mix(k);
                if m.nrows() != k || m.ncols() != k {
                    return Err(Error::Shape(format!(
                        "rotation for a {k}-fold eigenvalue must be {k}x{k}"
                    )));
                }
                let q = m.qr().q().map(|x| Complex64::new(x, 0.0));
                let block = self.vectors.columns(start, k) * q;
                out.vectors.columns_mut(start, k).copy_from(&block);
            }
            start = end;
        }
        Ok(out)
    }

    /// `sum_j w(lambda_j) v_j v_j^*` over the pairs `j >= first`, imaginary part checked.
    fn spectral_sum(&self, first: usize, weight: impl Fn(f64) -> f64) -> Result<DMatrix<f64>> {
        let n = self.len();
        let mut re = DMatrix::<f64>::zeros(n, n);
        let mut im = DMatrix::<f64>::zeros(n, n);
        for j in first..n {
            let w = weight(self.values[j]);
            let v = self.vectors.column(j);
            for x in 0..n {
                let vx = v[x] * w;
                for y in 0..n {
                    let t = vx * v[y].conj();
                    re[(x, y)] += t.re;
                    im[(x, y)] += t.im;
                }
            }
        }
        let worst = im.amax();
        if worst > IMAG_DISCARD_TOL {
            return Err(Error::Numeric(format!(
                "imaginary residue {worst:e} in a real Green table"
            )));
        }
        Ok(re)
    }
}

/// Jacobi eigensystem of a normalized Laplacian.
pub fn eigensystem(lap: &LaplacianMatrix) -> Result<Eigensystem> {
    if lap.kind != LaplacianKind::Normalized {
        return Err(Error::Misuse(format!(
            "eigensystem needs the normalized Laplacian, got {:?}",
            lap.kind
        )));
    }
    let (values, vectors) = jacobi_eigen(&lap.entries)?;
    let n = values.len();
    let es = Eigensystem::new(
        values,
        vectors.map(|x| Complex64::new(x, 0.0)),
        (0..n).collect(),
        lap.subset.clone(),
    )?;
    let res = es.residual(&lap.entries);
    if res > EIGEN_RESIDUAL_TOL {
        return Err(Error::Numeric(format!(
            "eigen residual {res:e} exceeds tolerance"
        )));
    }
    Ok(es)
}

/// Dense Green's function table indexed by subset positions.
#[derive(Debug, Clone)]
pub struct GreenTable {
    pub entries: DMatrix<f64>,
    pub subset: DirichletSubset,
    pub alpha: Option<f64>,
}

impl GreenTable {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    pub fn asymmetry(&self) -> f64 {
        (&self.entries - self.entries.transpose()).amax()
    }
}

/// `G = sum_{lambda_j > 0} lambda_j^{-1} phi_j phi_j^*` of a full graph.
pub fn greens_pseudo(es: &Eigensystem) -> Result<GreenTable> {
    if !es.is_singular() {
        return Err(Error::Misuse(
            "Dirichlet eigensystem: use greens_dirichlet".into(),
        ));
    }
    Ok(GreenTable {
        entries: es.spectral_sum(1, |l| 1.0 / l)?,
        subset: es.subset.clone(),
        alpha: None,
    })
}

/// Inverse of a Dirichlet Laplacian, any kind.
pub fn greens_dirichlet(lap: &LaplacianMatrix) -> Result<GreenTable> {
    if !lap.subset.is_proper() {
        return Err(Error::Singular(
            "full-graph Laplacian has a zero eigenvalue".into(),
        ));
    }
    let inv = lap
        .entries
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Singular("LU factorization failed".into()))?;
    let n = inv.nrows();
    let res = (&lap.entries * &inv - DMatrix::<f64>::identity(n, n)).amax();
    if res > EIGEN_RESIDUAL_TOL {
        return Err(Error::Numeric(format!("inverse residual {res:e}")));
    }
    Ok(GreenTable {
        entries: inv,
        subset: lap.subset.clone(),
        alpha: None,
    })
}

/// `G_alpha = sum 1/(lambda_j + alpha) phi_j phi_j^*`, skipping `lambda_0 = 0`
/// on full graphs.
pub fn greens_alpha_oracle(es: &Eigensystem, alpha: f64) -> Result<GreenTable> {
    let first = usize::from(es.is_singular());
    if let Some(&eigenvalue) = es.values[first..]
        .iter()
        .find(|&&l| (l + alpha).abs() < POLE_TOL)
    {
        return Err(Error::Pole { alpha, eigenvalue });
    }
    Ok(GreenTable {
        entries: es.spectral_sum(first, |l| 1.0 / (l + alpha))?,
        subset: es.subset.clone(),
        alpha: Some(alpha),
    })
}

/// Pseudo-inverse of the normalized Laplacian of `g` via Jacobi.
pub fn pseudo_green_of(g: &RegularGraph) -> Result<GreenTable> {
    let lap = laplacian(&DirichletSubset::full(g), LaplacianKind::Normalized);
    greens_pseudo(&eigensystem(&lap)?)
}

/// Simple random walk restricted to a subset; walks leaving it are absorbed.
#[derive(Debug, Clone)]
pub struct TransitionMatrix {
    pub entries: DMatrix<f64>,
    pub absorbing: bool,
    pub subset: DirichletSubset,
}

pub fn transition_matrix(subset: &DirichletSubset) -> TransitionMatrix {
    let host = subset.host();
    let p = 1.0 / host.degree() as f64;
    let m = subset.members();
    TransitionMatrix {
        entries: DMatrix::from_fn(m.len(), m.len(), |i, j| {
            if host.adjacent(m[i], m[j]) {
                p
            } else {
                0.0
            }
        }),
        absorbing: subset.is_proper(),
        subset: subset.clone(),
    }
}

/// `pi_x = d_x / vol`.
pub fn stationary(g: &RegularGraph) -> Vec<f64> {
    let d = g.degree() as f64;
    vec![d / g.volume(); g.vertex_count()]
}

const SERIES_MAX_TERMS: usize = 10_000_000;

/// `G = sum_n P^n` for an absorbing walk, truncated once a term drops below `tol`.
pub fn transient_series(p: &TransitionMatrix, tol: f64) -> Result<GreenTable> {
    if !p.absorbing {
        return Err(Error::Divergence(
            "walk on the full graph is recurrent".into(),
        ));
    }
    let n = p.entries.nrows();
    let mut sum = DMatrix::<f64>::identity(n, n);
    let mut term = DMatrix::<f64>::identity(n, n);
    for _ in 0..SERIES_MAX_TERMS {
        term = &term * &p.entries;
        sum += &term;
        if term.amax() < tol {
            return Ok(GreenTable {
                entries: sum,
                subset: p.subset.clone(),
                alpha: None,
            });
        }
    }
    Err(Error::Numeric(format!(
        "series did not reach {tol:e} in {SERIES_MAX_TERMS} terms"
    )))
}

/// Abel-summed fundamental matrix `Z = (I - P + Pi)^{-1} - Pi`.
pub fn fundamental_matrix(g: &RegularGraph) -> Result<DMatrix<f64>> {
    let n = g.vertex_count();
    let p = transition_matrix(&DirichletSubset::full(g)).entries;
    let pi = stationary(g);
    let big_pi = DMatrix::from_fn(n, n, |_, y| pi[y]);
    let inv = (DMatrix::<f64>::identity(n, n) - p + &big_pi)
        .try_inverse()
        .ok_or_else(|| Error::Singular("I - P + Pi is singular".into()))?;
    Ok(inv - big_pi)
}
