//! Explicit Green's functions of cycles and tori.
//!
//! All tori here are vertex-transitive, so a Green's function value depends
//! only on the coordinate-wise displacement `a_s = y_s - x_s (mod m_s)`.
//! Displacements are passed as integers in `0..m_s`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chebyshev::{param_from_alpha, t_over_u};
use crate::error::{check_index, Error, Result};
use crate::graph::{DirichletSubset, RegularGraph};
use crate::oracle::Eigensystem;

/// Tolerated imaginary residue of a sum that must come out real.
pub const REAL_OUTPUT_TOL: f64 = 1e-9;

/// Dimensions `m_1, ..., m_t` of the torus `C_{m_1} x ... x C_{m_t}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TorusSpec {
    dims: Vec<usize>,
}

impl TorusSpec {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidSize(
                "torus needs at least one dimension".into(),
            ));
        }
        if let Some(&m) = dims.iter().find(|&&m| m < 3) {
            return Err(Error::InvalidSize(format!("cycle length {m} < 3")));
        }
        Ok(TorusSpec { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn t(&self) -> usize {
        self.dims.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn degree(&self) -> usize {
        2 * self.t()
    }

    pub fn graph(&self) -> Result<RegularGraph> {
        RegularGraph::torus(&self.dims)
    }

    fn check_displacement(&self, displacement: &[usize]) -> Result<()> {
        if displacement.len() != self.t() {
            return Err(Error::Shape(format!(
                "{}-torus needs {} displacements, got {}",
                self.t(),
                self.t(),
                displacement.len()
            )));
        }
        for (&a, &m) in displacement.iter().zip(&self.dims) {
            check_index(a, m)?;
        }
        Ok(())
    }
}

/// `lambda_j = 1 - cos(2 pi j / m)`, written without cancellation.
pub fn cycle_eigenvalue(m: usize, j: usize) -> f64 {
    let s = (PI * j as f64 / m as f64).sin();
    2.0 * s * s
}

/// `exp(2 pi i j a / m)` with the product reduced mod `m` first.
fn twiddle(j: usize, a: i64, m: usize) -> Complex64 {
    let r = (j as i64 * a).rem_euclid(m as i64);
    Complex64::from_polar(1.0, 2.0 * PI * r as f64 / m as f64)
}

fn check_cycle(m: usize) -> Result<()> {
    if m < 3 {
        Err(Error::InvalidSize(format!("cycle needs m >= 3, got {m}")))
    } else {
        Ok(())
    }
}

/// `-a + a^2/m` is evaluated as `-a(m-a)/m` on the reduced distance so that
/// `a` and `m - a` give bit-identical values.
fn cycle_poly(m: usize, d: i64) -> f64 {
    let mf = m as f64;
    let a = d.unsigned_abs() as usize % m;
    let a = a.min(m - a);
    (mf + 1.0) * (mf - 1.0) / (6.0 * mf) - (a * (m - a)) as f64 / mf
}

/// Pseudo-inverse Green's function of `C_m` at distance `a`:
/// `(m+1)(m-1)/(6m) - a + a^2/m`.
pub fn cycle_green(m: usize, a: usize) -> Result<f64> {
    check_cycle(m)?;
    check_index(a, m)?;
    Ok(cycle_poly(m, a as i64))
}

/// Discrete Fourier eigensystem of the normalized Laplacian of `C_m`:
/// `phi_j(x) = exp(-2 pi i j x / m) / sqrt(m)`, `lambda_j = 1 - cos(2 pi j / m)`.
///
/// Pairs are sorted by eigenvalue; `labels` keeps each frequency `j`.
pub fn cycle_eigensystem(m: usize) -> Result<Eigensystem> {
    let graph = RegularGraph::cycle(m)?;
    let scale = 1.0 / (m as f64).sqrt();
    let vectors = DMatrix::from_fn(m, m, |x, j| twiddle(j, -(x as i64), m) * scale);
    let values = (0..m).map(|j| cycle_eigenvalue(m, j)).collect();
    Eigensystem::new(
        values,
        vectors,
        (0..m).collect(),
        DirichletSubset::full(&graph),
    )
}

/// Generalized Green's function of `C_m` at distance `a`:
///
/// ```text
/// G_alpha(a) = -1/(m alpha) + T_{m/2-a}(1+alpha) / (alpha (2+alpha) U_{m/2-1}(1+alpha))
/// ```
///
/// Half-integer Chebyshev orders (odd `m`) are evaluated by the hyperbolic
/// continuation; the ratio `T/U` is formed with exponents combined first.
pub fn cycle_green_alpha(m: usize, alpha: f64, a: usize) -> Result<f64> {
    check_cycle(m)?;
    check_index(a, m)?;
    if alpha.is_nan() || alpha < 0.0 {
        return Err(Error::Domain(format!("alpha = {alpha} must be positive")));
    }
    if alpha == 0.0 {
        return Err(Error::Pole {
            alpha,
            eigenvalue: 0.0,
        });
    }
    let p = param_from_alpha(alpha)?;
    let half = m as f64 / 2.0;
    let ratio = t_over_u(half - a as f64, half - 1.0, &p)?;
    Ok(-1.0 / (m as f64 * alpha) + ratio / (alpha * (2.0 + alpha)))
}

/// The same function through the `r`-parametrization, kept as a second route.
pub fn cycle_green_alpha_r(m: usize, alpha: f64, a: usize) -> Result<f64> {
    check_cycle(m)?;
    check_index(a, m)?;
    let p = param_from_alpha(alpha)?;
    let (r, mf, af) = (p.r, m as f64, a as f64);
    let num = 2.0 * (r.powf(mf / 2.0 - af) + r.powf(-mf / 2.0 + af));
    let den = (r - 1.0 / r) * (r.powf(mf / 2.0) - r.powf(-mf / 2.0));
    Ok(-2.0 / (mf * (r + 1.0 / r - 2.0)) + num / den)
}

fn ensure_real(z: Complex64, what: &str) -> Result<f64> {
    if z.im.abs() > REAL_OUTPUT_TOL * z.re.abs().max(1.0) {
        return Err(Error::Numeric(format!(
            "{what}: imaginary residue {:e}",
            z.im
        )));
    }
    Ok(z.re)
}

fn torus_green_signed(m: usize, n: usize, dx: i64, dy: i64) -> Result<f64> {
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 1..n {
        let g = cycle_green_alpha(m, cycle_eigenvalue(n, k), dx.unsigned_abs() as usize)?;
        sum += twiddle(k, dy, n) * g;
    }
    let sum = ensure_real(sum, "torus Green's function")?;
    let (mf, nf) = (m as f64, n as f64);
    Ok(2.0 / nf * sum + 2.0 / nf * cycle_poly(m, dx) + 2.0 / mf * cycle_poly(n, dy))
}

/// Green's function of the torus `C_m x C_n` at displacement `(da, db)`.
pub fn torus_green(m: usize, n: usize, da: usize, db: usize) -> Result<f64> {
    check_cycle(m)?;
    check_cycle(n)?;
    check_index(da, m)?;
    check_index(db, n)?;
    torus_green_signed(m, n, da as i64, db as i64)
}

/// Green's function of the `t`-torus by induction on `t`.
///
/// With `Gamma = C_{m_1}` and `Gamma' = C_{m_2} x ... x C_{m_t}`,
///
/// ```text
/// G = t sum_{K != 0} Phi_K(x') conj(Phi_K(y')) G_{alpha_K}(x_1, y_1)
///   + t/((t-1) m_1) G'(x', y') + t/(m_2 ... m_t) G_cycle(x_1, y_1)
/// ```
///
/// where `alpha_K = lambda_{j_2} + ... + lambda_{j_t}` is `(t-1)` times the
/// eigenvalue of `Gamma'` (its degree is `t-1` times that of `C_{m_1}`).
/// Dimensions are sorted descending first so the largest cycle hosts
/// `G_alpha` and the sum has at most `n^{1-1/t}` terms.
pub fn t_torus_green(spec: &TorusSpec, displacement: &[usize]) -> Result<f64> {
    spec.check_displacement(displacement)?;
    let mut order: Vec<usize> = (0..spec.t()).collect();
    order.sort_by(|&i, &j| spec.dims[j].cmp(&spec.dims[i]));
    let dims: Vec<usize> = order.iter().map(|&i| spec.dims[i]).collect();
    let disp: Vec<usize> = order.iter().map(|&i| displacement[i]).collect();
    t_torus_sorted(&dims, &disp)
}

fn t_torus_sorted(dims: &[usize], disp: &[usize]) -> Result<f64> {
    let t = dims.len();
    if t == 1 {
        return cycle_green(dims[0], disp[0]);
    }
    let (m1, a1) = (dims[0], disp[0]);
    let (rest, rest_disp) = (&dims[1..], &disp[1..]);
    let rest_size: usize = rest.iter().product();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut js = vec![0usize; t - 1];
    // lexicographic odometer over K = (j_2, ..., j_t), skipping K = 0
    while advance(&mut js, rest) {
        let mut alpha = 0.0;
        let mut phase = Complex64::new(1.0, 0.0);
        for s in 0..t - 1 {
            alpha += cycle_eigenvalue(rest[s], js[s]);
            phase *= twiddle(js[s], rest_disp[s] as i64, rest[s]);
        }
        sum += phase * cycle_green_alpha(m1, alpha, a1)?;
    }
    let sum = ensure_real(sum, "t-torus Green's function")? / rest_size as f64;
    let tf = t as f64;
    Ok(tf * sum
        + tf / ((tf - 1.0) * m1 as f64) * t_torus_sorted(rest, rest_disp)?
        + tf / rest_size as f64 * cycle_green(m1, a1)?)
}

/// Steps a mixed-radix counter; false once it wraps back to zero.
fn advance(js: &mut [usize], radix: &[usize]) -> bool {
    for s in (0..js.len()).rev() {
        js[s] += 1;
        if js[s] < radix[s] {
            return true;
        }
        js[s] = 0;
    }
    false
}

/// Green's function of `C_m x C_m x C_m`, the two-level recursion unrolled.
pub fn torus3_green(m: usize, displacement: [usize; 3]) -> Result<f64> {
    check_cycle(m)?;
    for a in displacement {
        check_index(a, m)?;
    }
    let [a1, a2, a3] = displacement;
    let mut double = Complex64::new(0.0, 0.0);
    for j in 0..m {
        for k in 0..m {
            if j == 0 && k == 0 {
                continue;
            }
            let alpha = cycle_eigenvalue(m, j) + cycle_eigenvalue(m, k);
            let phase = twiddle(j, a2 as i64, m) * twiddle(k, a3 as i64, m);
            double += phase * cycle_green_alpha(m, alpha, a1)?;
        }
    }
    let mut single = Complex64::new(0.0, 0.0);
    for k in 1..m {
        single += twiddle(k, a3 as i64, m) * cycle_green_alpha(m, cycle_eigenvalue(m, k), a2)?;
    }
    let c = 3.0 / (m * m) as f64;
    let total = ensure_real(double + single, "3-torus Green's function")?;
    Ok(c * (total + cycle_green(m, a1)? + cycle_green(m, a2)? + cycle_green(m, a3)?))
}

/// `|LHS - RHS|` of the cycle identity: the Fourier sum over the eigenbasis
/// against the closed polynomial at the signed difference `y - x`.
pub fn identity_residual_cycle(m: usize, x: usize, y: usize) -> Result<f64> {
    check_index(x, m)?;
    check_index(y, m)?;
    let es = cycle_eigensystem(m)?;
    let lhs = fourier_green(&es, x, y);
    Ok((lhs - Complex64::new(cycle_poly(m, y as i64 - x as i64), 0.0)).norm())
}

fn fourier_green(es: &Eigensystem, x: usize, y: usize) -> Complex64 {
    (1..es.len())
        .map(|j| es.vectors[(x, j)] * es.vectors[(y, j)].conj() / es.values[j])
        .sum()
}

/// `|LHS - RHS|` of the torus identity at `((x, x'), (y, y'))`: the double
/// Fourier sum over both cycle eigenbases against the torus closed form at
/// the signed differences.
pub fn identity_residual_torus(
    m: usize,
    n: usize,
    x: usize,
    x2: usize,
    y: usize,
    y2: usize,
) -> Result<f64> {
    check_index(x, m)?;
    check_index(y, m)?;
    check_index(x2, n)?;
    check_index(y2, n)?;
    let (em, en) = (cycle_eigensystem(m)?, cycle_eigensystem(n)?);
    let mut lhs = Complex64::new(0.0, 0.0);
    for j in 0..m {
        for k in 0..n {
            if j == 0 && k == 0 {
                continue;
            }
            let lambda = (em.values[j] + en.values[k]) / 2.0;
            let num = em.vectors[(x, j)]
                * em.vectors[(y, j)].conj()
                * en.vectors[(x2, k)]
                * en.vectors[(y2, k)].conj();
            lhs += num / lambda;
        }
    }
    let rhs = torus_green_signed(m, n, y as i64 - x as i64, y2 as i64 - x2 as i64)?;
    Ok((lhs - Complex64::new(rhs, 0.0)).norm())
}

/// One row of a torus Green's function, stored only at the representative
/// displacements `0..=floor(m_s/2)` per axis (`G` is invariant under
/// `a_s -> m_s - a_s`).
#[derive(Debug, Clone)]
pub struct TorusRow {
    spec: TorusSpec,
    extents: Vec<usize>,
    values: Vec<f64>,
}

impl TorusRow {
    pub fn compute(spec: &TorusSpec) -> Result<Self> {
        Self::compute_with_threads(spec, 1)
    }

    /// Evaluates every representative entry; `threads > 1` fans entries out.
    pub fn compute_with_threads(spec: &TorusSpec, threads: usize) -> Result<Self> {
        let eval = RowEvaluator::new(spec)?;
        let extents: Vec<usize> = spec.dims.iter().map(|m| m / 2 + 1).collect();
        let reps = all_tuples(&extents);
        let values = run_pool(threads, || {
            reps.par_iter()
                .map(|d| eval.eval(d))
                .collect::<Result<Vec<f64>>>()
        })??;
        Ok(TorusRow {
            spec: spec.clone(),
            extents,
            values,
        })
    }

    pub fn spec(&self) -> &TorusSpec {
        &self.spec
    }

    /// Number of distinct entries actually evaluated.
    pub fn entries_computed(&self) -> usize {
        self.values.len()
    }

    /// `G(0, a)` for any displacement `a_s in 0..m_s`.
    pub fn get(&self, displacement: &[usize]) -> Result<f64> {
        self.spec.check_displacement(displacement)?;
        let mut idx = 0;
        for ((&a, &m), &e) in displacement.iter().zip(&self.spec.dims).zip(&self.extents) {
            idx = idx * e + a.min(m - a);
        }
        Ok(self.values[idx])
    }

    /// The full row, row-major over displacements.
    pub fn expand(&self) -> Vec<f64> {
        all_tuples(&self.spec.dims)
            .iter()
            .map(|d| self.get(d).expect("in range"))
            .collect()
    }
}

/// Evaluates the whole row directly, one sum per entry, with no
/// `a -> m - a` reduction.
pub fn full_torus_row(spec: &TorusSpec, threads: usize) -> Result<Vec<f64>> {
    let eval = RowEvaluator::new(spec)?;
    let all = all_tuples(&spec.dims);
    run_pool(threads, || {
        all.par_iter()
            .map(|d| eval.eval(d))
            .collect::<Result<Vec<f64>>>()
    })?
}

pub(crate) fn run_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Numeric(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

pub(crate) fn all_tuples(extents: &[usize]) -> Vec<Vec<usize>> {
    let total: usize = extents.iter().product();
    let mut out = Vec::with_capacity(total);
    let mut cur = vec![0; extents.len()];
    if total == 0 {
        return out;
    }
    loop {
        out.push(cur.clone());
        if !advance(&mut cur, extents) {
            return out;
        }
    }
}

/// Table-driven evaluation of the t-torus recursion for many entries of
/// one row. `G_alpha` of the first cycle is tabulated once per `K` and the
/// lower-dimensional row once per level, so each entry costs one pass over
/// the `n / m_1 - 1` indices `K`.
struct RowEvaluator {
    /// axis permutation: sorted position -> original axis
    order: Vec<usize>,
    dims: Vec<usize>,
    /// `G_{alpha_K}(a_1)` for `a_1 in 0..=m_1/2`, row per `K` (empty when t = 1)
    galpha: Vec<Vec<f64>>,
    /// frequencies `K`, flattened `(t-1)` per entry
    ks: Vec<usize>,
    /// `exp(2 pi i r / m_s)` for each remaining axis
    twiddles: Vec<Vec<Complex64>>,
    sub: Option<TorusRow>,
}

impl RowEvaluator {
    fn new(spec: &TorusSpec) -> Result<Self> {
        let mut order: Vec<usize> = (0..spec.t()).collect();
        order.sort_by(|&i, &j| spec.dims[j].cmp(&spec.dims[i]));
        let dims: Vec<usize> = order.iter().map(|&i| spec.dims[i]).collect();
        let t = dims.len();
        if t == 1 {
            return Ok(RowEvaluator {
                order,
                dims,
                galpha: vec![],
                ks: vec![],
                twiddles: vec![],
                sub: None,
            });
        }
        let m1 = dims[0];
        let rest = &dims[1..];
        let mut galpha = Vec::new();
        let mut ks = Vec::new();
        let mut js = vec![0usize; t - 1];
        while advance(&mut js, rest) {
            let alpha: f64 = js
                .iter()
                .zip(rest)
                .map(|(&j, &m)| cycle_eigenvalue(m, j))
                .sum();
            let row = (0..=m1 / 2)
                .map(|a| cycle_green_alpha(m1, alpha, a))
                .collect::<Result<Vec<f64>>>()?;
            galpha.push(row);
            ks.extend_from_slice(&js);
        }
        let twiddles = rest
            .iter()
            .map(|&m| (0..m).map(|r| twiddle(r, 1, m)).collect())
            .collect();
        let sub = Some(TorusRow::compute(&TorusSpec::new(rest.to_vec())?)?);
        Ok(RowEvaluator {
            order,
            dims,
            galpha,
            ks,
            twiddles,
            sub,
        })
    }

    fn eval(&self, displacement: &[usize]) -> Result<f64> {
        let disp: Vec<usize> = self.order.iter().map(|&i| displacement[i]).collect();
        let t = self.dims.len();
        let (m1, a1) = (self.dims[0], disp[0]);
        if t == 1 {
            return cycle_green(m1, a1);
        }
        let rest = &self.dims[1..];
        let rest_disp = &disp[1..];
        let rest_size: usize = rest.iter().product();
        let a1r = a1.min(m1 - a1);
        let mut sum = Complex64::new(0.0, 0.0);
        for (k, g) in self.galpha.iter().enumerate() {
            let js = &self.ks[k * (t - 1)..(k + 1) * (t - 1)];
            let mut phase = Complex64::new(1.0, 0.0);
            for s in 0..t - 1 {
                phase *= self.twiddles[s][(js[s] * rest_disp[s]) % rest[s]];
            }
            sum += phase * g[a1r];
        }
        let sum = ensure_real(sum, "t-torus row")? / rest_size as f64;
        let sub = self.sub.as_ref().expect("t > 1").get(rest_disp)?;
        let tf = t as f64;
        Ok(tf * sum
            + tf / ((tf - 1.0) * m1 as f64) * sub
            + tf / rest_size as f64 * cycle_green(m1, a1)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::LaplacianKind;
    use crate::oracle::{greens_alpha_oracle, pseudo_green_of};
    use approx::assert_abs_diff_eq;

    #[test]
    fn cycle_green_examples() {
        assert_abs_diff_eq!(cycle_green(3, 0).unwrap(), 4.0 / 9.0, epsilon = 1e-15);
        assert_abs_diff_eq!(cycle_green(3, 1).unwrap(), -2.0 / 9.0, epsilon = 1e-15);
        assert_abs_diff_eq!(cycle_green(4, 2).unwrap(), -0.375, epsilon = 1e-15);
        for m in 3..=30 {
            let s: f64 = (0..m).map(|a| cycle_green(m, a).unwrap()).sum();
            assert!(s.abs() < 1e-12);
            for a in 1..m {
                assert_abs_diff_eq!(
                    cycle_green(m, a).unwrap(),
                    cycle_green(m, m - a).unwrap(),
                    epsilon = 1e-12
                );
            }
        }
        assert!(matches!(cycle_green(5, 5), Err(Error::Index { .. })));
        assert!(matches!(cycle_green(2, 0), Err(Error::InvalidSize(_))));
    }

    #[test]
    fn cycle_green_matches_jacobi_pseudo_inverse() {
        for m in 3..=30 {
            let oracle = pseudo_green_of(&RegularGraph::cycle(m).unwrap()).unwrap();
            for x in 0..m {
                for y in 0..m {
                    let a = (y + m - x) % m;
                    assert_abs_diff_eq!(
                        oracle.get(x, y),
                        cycle_green(m, a).unwrap(),
                        epsilon = 1e-9
                    );
                }
            }
        }
    }

    #[test]
    fn cycle_eigensystem_examples() {
        let es = cycle_eigensystem(4).unwrap();
        for (g, w) in es.values.iter().zip([0.0, 1.0, 1.0, 2.0]) {
            assert_abs_diff_eq!(*g, w, epsilon = 1e-15);
        }
        let es = cycle_eigensystem(6).unwrap();
        let pos = es.labels.iter().position(|&j| j == 3).unwrap();
        assert_eq!(es.values[pos], 2.0);
        for m in 3..=16 {
            let es = cycle_eigensystem(m).unwrap();
            assert!(es.gram_residual() < 1e-12);
            let lap = crate::graph::laplacian(&es.subset, LaplacianKind::Normalized);
            assert!(es.residual(&lap.entries) < 1e-12);
        }
    }

    #[test]
    fn galpha_examples() {
        assert_abs_diff_eq!(
            cycle_green_alpha(4, 1.0, 0).unwrap(),
            1.0 / 3.0,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            cycle_green_alpha(4, 1.0, 1).unwrap(),
            -1.0 / 12.0,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            cycle_green_alpha(3, 1.5, 0).unwrap(),
            2.0 / 9.0,
            epsilon = 1e-14
        );
        assert!(matches!(
            cycle_green_alpha(4, 0.0, 0),
            Err(Error::Pole { .. })
        ));
        assert!(matches!(
            cycle_green_alpha(4, -1.0, 0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn galpha_routes_agree() {
        for m in 3..=20 {
            for alpha in [0.05, 0.5, 1.0, 3.0] {
                for a in 0..m {
                    let x = cycle_green_alpha(m, alpha, a).unwrap();
                    let y = cycle_green_alpha_r(m, alpha, a).unwrap();
                    assert_abs_diff_eq!(x, y, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn galpha_matches_fourier_oracle() {
        for m in 3..=20 {
            let es = cycle_eigensystem(m).unwrap();
            for alpha in [0.1, 0.5, 1.0, 1.5, 2.0, 5.0] {
                let oracle = greens_alpha_oracle(&es, alpha).unwrap();
                for a in 0..m {
                    let got = cycle_green_alpha(m, alpha, a).unwrap();
                    assert_abs_diff_eq!(got, oracle.get(0, a), epsilon = 1e-9);
                }
            }
        }
    }

    #[test]
    fn galpha_difference_tends_to_cycle_green() {
        for m in [3, 4, 7, 10] {
            let alpha = 1e-8;
            let g0 = cycle_green_alpha(m, alpha, 0).unwrap();
            for a in 0..m {
                let lhs = cycle_green_alpha(m, alpha, a).unwrap() - g0;
                let rhs = cycle_green(m, a).unwrap() - cycle_green(m, 0).unwrap();
                assert!((lhs - rhs).abs() <= 1e-6, "m={m} a={a}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn galpha_survives_long_cycles() {
        // r^{m/2} overflows here; the ratio form must not
        let v = cycle_green_alpha(4000, 2.0, 3).unwrap();
        assert!(v.is_finite());
        let w = cycle_green_alpha(4000, 2.0, 2000).unwrap();
        assert!(w.is_finite());
    }

    #[test]
    fn torus_examples() {
        assert_abs_diff_eq!(torus_green(3, 3, 0, 0).unwrap(), 8.0 / 9.0, epsilon = 1e-14);
        let mut s = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                s += torus_green(3, 3, a, b).unwrap();
            }
        }
        assert!(s.abs() < 1e-13);
        // distance symmetry in both axes
        for (a, b) in [(1, 2), (2, 5), (4, 6)] {
            let v = torus_green(5, 7, a, b).unwrap();
            assert_abs_diff_eq!(v, torus_green(5, 7, 5 - a, b).unwrap(), epsilon = 1e-12);
            assert_abs_diff_eq!(v, torus_green(5, 7, a, 7 - b).unwrap(), epsilon = 1e-12);
        }
    }

    #[test]
    fn torus_matches_oracle() {
        for (m, n) in [(5, 7), (4, 6), (3, 8)] {
            let oracle = pseudo_green_of(&RegularGraph::torus(&[m, n]).unwrap()).unwrap();
            for y in 0..m * n {
                let (a, b) = (y / n, y % n);
                assert_abs_diff_eq!(
                    oracle.get(0, y),
                    torus_green(m, n, a, b).unwrap(),
                    epsilon = 1e-8
                );
            }
        }
    }

    #[test]
    fn t_torus_reduces_to_lower_cases() {
        for m in 3..10 {
            for a in 0..m {
                let spec = TorusSpec::new(vec![m]).unwrap();
                assert_eq!(
                    t_torus_green(&spec, &[a]).unwrap(),
                    cycle_green(m, a).unwrap()
                );
            }
        }
        let spec = TorusSpec::new(vec![3, 3]).unwrap();
        assert_abs_diff_eq!(
            t_torus_green(&spec, &[0, 0]).unwrap(),
            8.0 / 9.0,
            epsilon = 1e-13
        );
        let spec = TorusSpec::new(vec![5, 7]).unwrap();
        for a in 0..5 {
            for b in 0..7 {
                assert_abs_diff_eq!(
                    t_torus_green(&spec, &[a, b]).unwrap(),
                    torus_green(5, 7, a, b).unwrap(),
                    epsilon = 1e-12
                );
            }
        }
        assert!(matches!(
            TorusSpec::new(vec![3, 2]),
            Err(Error::InvalidSize(_))
        ));
        assert!(matches!(t_torus_green(&spec, &[0]), Err(Error::Shape(_))));
        assert!(matches!(
            t_torus_green(&spec, &[5, 0]),
            Err(Error::Index { .. })
        ));
    }

    #[test]
    fn t_torus_matches_oracle() {
        for dims in [vec![3, 3, 3], vec![3, 4, 5], vec![5, 3, 4]] {
            let spec = TorusSpec::new(dims.clone()).unwrap();
            let g = spec.graph().unwrap();
            let oracle = pseudo_green_of(&g).unwrap();
            for y in 0..g.vertex_count() {
                let d = g.coords_of(crate::graph::VertexId(y)).unwrap();
                assert_abs_diff_eq!(
                    oracle.get(0, y),
                    t_torus_green(&spec, &d).unwrap(),
                    epsilon = 1e-8
                );
            }
        }
    }

    #[test]
    fn torus3_is_unrolled_recursion() {
        for m in 3..=6 {
            let spec = TorusSpec::new(vec![m; 3]).unwrap();
            for d in all_tuples(&[m, m, m]) {
                let a = torus3_green(m, [d[0], d[1], d[2]]).unwrap();
                let b = t_torus_green(&spec, &d).unwrap();
                assert_abs_diff_eq!(a, b, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn torus3_is_translation_invariant() {
        let m = 3;
        let g = RegularGraph::torus(&[m, m, m]).unwrap();
        let oracle = pseudo_green_of(&g).unwrap();
        for x in 0..27 {
            let cx = g.coords_of(crate::graph::VertexId(x)).unwrap();
            for y in 0..27 {
                let cy = g.coords_of(crate::graph::VertexId(y)).unwrap();
                let d = [0, 1, 2].map(|s| (cy[s] + m - cx[s]) % m);
                assert_abs_diff_eq!(
                    oracle.get(x, y),
                    torus3_green(m, d).unwrap(),
                    epsilon = 1e-9
                );
            }
        }
    }

    #[test]
    fn identities() {
        for m in [3, 4, 5, 6] {
            for x in 0..m {
                for y in 0..m {
                    assert!(identity_residual_cycle(m, x, y).unwrap() <= 1e-10);
                }
            }
        }
        assert!(identity_residual_torus(3, 3, 0, 0, 0, 0).unwrap() <= 1e-10);
        assert!(identity_residual_torus(4, 5, 1, 3, 3, 0).unwrap() <= 1e-10);
    }

    #[test]
    fn row_evaluator_matches_direct_recursion() {
        for dims in [vec![7], vec![6, 5], vec![3, 4, 5], vec![4, 3, 3, 3]] {
            let spec = TorusSpec::new(dims.clone()).unwrap();
            let row = TorusRow::compute(&spec).unwrap();
            let expected: usize = dims.iter().map(|m| m / 2 + 1).product();
            assert_eq!(row.entries_computed(), expected);
            let full = full_torus_row(&spec, 2).unwrap();
            for (i, d) in all_tuples(&dims).iter().enumerate() {
                let direct = t_torus_green(&spec, d).unwrap();
                assert_abs_diff_eq!(row.get(d).unwrap(), direct, epsilon = 1e-11);
                assert_abs_diff_eq!(full[i], direct, epsilon = 1e-11);
            }
            assert_eq!(row.expand().len(), spec.vertex_count());
        }
    }

    #[test]
    fn parallel_row_is_identical() {
        let spec = TorusSpec::new(vec![9, 8]).unwrap();
        let a = TorusRow::compute(&spec).unwrap();
        let b = TorusRow::compute_with_threads(&spec, 4).unwrap();
        assert_eq!(a.values, b.values);
    }
}
