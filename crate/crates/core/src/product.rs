//! Green's functions of Cartesian products `S x S'` from one factor's
//! generalized Green's function and the other factor's eigensystem.
//!
//! The provider factor `S` (degree `d`) supplies `G_alpha`; the spectrum
//! factor `S'` (degree `d'`) supplies `{(lambda'_k, phi'_k)}`. Each product
//! entry is a finite residue sum
//!
//! ```text
//! G((x,x'),(y,y')) = (d+d')/d * sum_k phi'_k(x') conj(phi'_k(y')) G_{d' lambda'_k / d}(x, y)
//! ```
//!
//! over all `k` when `S` has a boundary, and over `lambda'_k > 0` plus the
//! two pseudo-inverse corrections when neither factor has one. Vertex
//! `(x, x')` of the product table sits at `x * |S'| + x'`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::closed_forms::{cycle_eigensystem, cycle_green, cycle_green_alpha};
use crate::error::{Error, Result};
use crate::graph::{laplacian, DirichletSubset, LaplacianKind, RegularGraph};
use crate::oracle::{eigensystem, greens_alpha_oracle, greens_pseudo, Eigensystem, GreenTable};

/// Supplies `G_alpha` of one factor. Implementations must be pure.
pub trait GAlphaProvider: Sync {
    fn subset(&self) -> &DirichletSubset;

    /// `(L_S + alpha)^{-1}` for a proper subset; the `lambda_0`-free
    /// resolvent for a full graph.
    fn galpha(&self, alpha: f64) -> Result<DMatrix<f64>>;

    /// Pseudo-inverse Green's function; full graphs only.
    fn pseudo(&self) -> Result<DMatrix<f64>>;

    fn degree(&self) -> usize {
        self.subset().host().degree()
    }

    fn has_boundary(&self) -> bool {
        self.subset().is_proper()
    }
}

/// `G_alpha` from an explicit eigensystem (works for any regular factor).
#[derive(Debug, Clone)]
pub struct SpectralProvider {
    es: Eigensystem,
}

impl SpectralProvider {
    pub fn new(es: Eigensystem) -> Self {
        SpectralProvider { es }
    }

    /// Jacobi eigensystem of the normalized Laplacian of `subset`.
    pub fn from_subset(subset: &DirichletSubset) -> Result<Self> {
        Ok(Self::new(eigensystem(&laplacian(
            subset,
            LaplacianKind::Normalized,
        ))?))
    }
}

impl GAlphaProvider for SpectralProvider {
    fn subset(&self) -> &DirichletSubset {
        &self.es.subset
    }

    fn galpha(&self, alpha: f64) -> Result<DMatrix<f64>> {
        Ok(greens_alpha_oracle(&self.es, alpha)?.entries)
    }

    fn pseudo(&self) -> Result<DMatrix<f64>> {
        Ok(greens_pseudo(&self.es)?.entries)
    }
}

/// `G_alpha` of the full cycle `C_m` by its Chebyshev closed form.
#[derive(Debug, Clone)]
pub struct CycleProvider {
    m: usize,
    subset: DirichletSubset,
}

impl CycleProvider {
    pub fn new(m: usize) -> Result<Self> {
        Ok(CycleProvider {
            m,
            subset: DirichletSubset::full(&RegularGraph::cycle(m)?),
        })
    }

    fn circulant(&self, f: impl Fn(usize) -> Result<f64>) -> Result<DMatrix<f64>> {
        let row = (0..self.m).map(f).collect::<Result<Vec<f64>>>()?;
        let m = self.m;
        Ok(DMatrix::from_fn(m, m, |x, y| row[(y + m - x) % m]))
    }
}

impl GAlphaProvider for CycleProvider {
    fn subset(&self) -> &DirichletSubset {
        &self.subset
    }

    fn galpha(&self, alpha: f64) -> Result<DMatrix<f64>> {
        self.circulant(|a| cycle_green_alpha(self.m, alpha, a))
    }

    fn pseudo(&self) -> Result<DMatrix<f64>> {
        self.circulant(|a| cycle_green(self.m, a))
    }
}

/// Eigendata of the spectrum-side factor.
#[derive(Debug, Clone)]
pub struct FactorSpectrum {
    pub eigensystem: Eigensystem,
    pub degree: usize,
}

impl FactorSpectrum {
    pub fn new(eigensystem: Eigensystem) -> Self {
        let degree = eigensystem.subset.host().degree();
        FactorSpectrum {
            eigensystem,
            degree,
        }
    }

    pub fn from_subset(subset: &DirichletSubset) -> Result<Self> {
        Ok(Self::new(eigensystem(&laplacian(
            subset,
            LaplacianKind::Normalized,
        ))?))
    }

    /// Fourier eigensystem of `C_m`.
    pub fn cycle(m: usize) -> Result<Self> {
        Ok(Self::new(cycle_eigensystem(m)?))
    }

    pub fn size(&self) -> usize {
        self.eigensystem.len()
    }

    pub fn has_boundary(&self) -> bool {
        self.eigensystem.subset.is_proper()
    }
}

/// `prefactor * sum_{k >= first} phi'_k(x') conj(phi'_k(y')) G_{scale * lambda'_k}(x, y)`.
fn residue_sum(
    g: &dyn GAlphaProvider,
    s: &FactorSpectrum,
    prefactor: f64,
    scale: f64,
    first: usize,
) -> Result<DMatrix<Complex64>> {
    let (ns, np) = (g.subset().len(), s.size());
    let es = &s.eigensystem;
    let mut table = DMatrix::<Complex64>::zeros(ns * np, ns * np);
    for k in first..np {
        let ga = g.galpha(scale * es.values[k])?;
        let phi = es.vectors.column(k);
        for x2 in 0..np {
            for y2 in 0..np {
                let w = phi[x2] * phi[y2].conj() * prefactor;
                for x in 0..ns {
                    for y in 0..ns {
                        table[(x * np + x2, y * np + y2)] += w * ga[(x, y)];
                    }
                }
            }
        }
    }
    Ok(table)
}

fn into_table(
    table: DMatrix<Complex64>,
    g: &dyn GAlphaProvider,
    s: &FactorSpectrum,
) -> Result<GreenTable> {
    let worst = table.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if worst > 1e-9 {
        return Err(Error::Numeric(format!(
            "product table has imaginary residue {worst:e}"
        )));
    }
    Ok(GreenTable {
        entries: table.map(|z| z.re),
        subset: DirichletSubset::product(g.subset(), &s.eigensystem.subset),
        alpha: None,
    })
}

fn require_boundary(g: &dyn GAlphaProvider) -> Result<()> {
    if !g.has_boundary() {
        return Err(Error::Misuse(
            "boundary form needs the G_alpha factor to have a boundary; orient the factors so the provider side is proper".into(),
        ));
    }
    Ok(())
}

fn require_no_boundary(g: &dyn GAlphaProvider, s: &FactorSpectrum) -> Result<()> {
    if g.has_boundary() || s.has_boundary() {
        return Err(Error::Misuse(
            "boundaryless form needs both factors to be full graphs".into(),
        ));
    }
    Ok(())
}

fn require_equal_degree(g: &dyn GAlphaProvider, s: &FactorSpectrum) -> Result<()> {
    if g.degree() != s.degree {
        return Err(Error::Misuse(format!(
            "degrees {} and {} differ; use the general-degree form",
            g.degree(),
            s.degree
        )));
    }
    Ok(())
}

/// Dirichlet product, equal degrees: `2 sum_k phi'_k phi'_k^* G_{lambda'_k}`.
pub fn product_green_boundary_equal(
    g: &dyn GAlphaProvider,
    s: &FactorSpectrum,
) -> Result<GreenTable> {
    require_boundary(g)?;
    require_equal_degree(g, s)?;
    into_table(residue_sum(g, s, 2.0, 1.0, 0)?, g, s)
}

/// Dirichlet product, degrees `d` and `d'`:
/// `(d+d')/d sum_k phi'_k phi'_k^* G_{d' lambda'_k / d}`.
pub fn product_green_boundary_general(
    g: &dyn GAlphaProvider,
    s: &FactorSpectrum,
) -> Result<GreenTable> {
    require_boundary(g)?;
    let (d, d2) = (g.degree() as f64, s.degree as f64);
    into_table(residue_sum(g, s, (d + d2) / d, d2 / d, 0)?, g, s)
}

/// Neither factor has a boundary, equal degrees:
/// `2 sum_{k>=1} phi'_k phi'_k^* G_{lambda'_k} + (2/n) G + (2/m) G'`
/// with `m = |V|` (provider) and `n = |V'|` (spectrum).
pub fn product_green_noboundary_equal(
    g: &dyn GAlphaProvider,
    s: &FactorSpectrum,
) -> Result<GreenTable> {
    require_no_boundary(g, s)?;
    require_equal_degree(g, s)?;
    noboundary(g, s)
}

/// Neither factor has a boundary, degrees `d` and `d'`:
/// `(d+d')/d sum_{k>=1} phi'_k phi'_k^* G_{d' lambda'_k/d} + (d+d')/(d n) G + (d+d')/(d' m) G'`.
pub fn product_green_noboundary_general(
    g: &dyn GAlphaProvider,
    s: &FactorSpectrum,
) -> Result<GreenTable> {
    require_no_boundary(g, s)?;
    noboundary(g, s)
}

fn noboundary(g: &dyn GAlphaProvider, s: &FactorSpectrum) -> Result<GreenTable> {
    let (d, d2) = (g.degree() as f64, s.degree as f64);
    let (m, n) = (g.subset().len(), s.size());
    let mut table = residue_sum(g, s, (d + d2) / d, d2 / d, 1)?;
    let own = g.pseudo()?;
    let other = greens_pseudo(&s.eigensystem)?.entries;
    let (c_own, c_other) = ((d + d2) / (d * n as f64), (d + d2) / (d2 * m as f64));
    for x in 0..m {
        for y in 0..m {
            for x2 in 0..n {
                for y2 in 0..n {
                    table[(x * n + x2, y * n + y2)] +=
                        Complex64::new(c_own * own[(x, y)] + c_other * other[(x2, y2)], 0.0);
                }
            }
        }
    }
    into_table(table, g, s)
}
