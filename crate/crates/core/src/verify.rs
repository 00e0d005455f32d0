//! Verification suites: every closed form against an independent oracle.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::closed_forms::{
    cycle_green, cycle_green_alpha, identity_residual_cycle, identity_residual_torus,
    t_torus_green, torus3_green, torus_green, TorusRow, TorusSpec,
};
use crate::error::{Error, Result};
use crate::graph::{laplacian, DirichletSubset, LaplacianKind, RegularGraph, VertexId};
use crate::oracle::{
    eigensystem, fundamental_matrix, greens_alpha_oracle, greens_dirichlet, pseudo_green_of,
    transient_series, transition_matrix, GreenTable,
};
use crate::product::{
    product_green_boundary_equal, product_green_boundary_general, product_green_noboundary_equal,
    product_green_noboundary_general, CycleProvider, FactorSpectrum, GAlphaProvider,
    SpectralProvider,
};
use crate::walk::{hitting_grid, hitting_oracle, hitting_table};

/// Bounds for the largest hitting time on `C_49 x C_49` from the origin,
/// taken from the plateau height of the published hitting-time surface.
pub const EXPECTED_MAX_WINDOW: (f64, f64) = (5900.0, 6600.0);

pub const ALPHAS: [f64; 6] = [0.1, 0.5, 1.0, 1.5, 2.0, 5.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    Cycle,
    Galpha,
    Torus,
    Ttorus,
    Product,
    Walk,
    Identities,
}

impl Suite {
    pub const EACH: [Suite; 7] = [
        Suite::Cycle,
        Suite::Galpha,
        Suite::Torus,
        Suite::Ttorus,
        Suite::Product,
        Suite::Identities,
        Suite::Walk,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Cycle => "cycle",
            Suite::Galpha => "galpha",
            Suite::Torus => "torus",
            Suite::Ttorus => "ttorus",
            Suite::Product => "product",
            Suite::Walk => "walk",
            Suite::Identities => "identities",
        }
    }

    pub fn default_tol(self) -> f64 {
        match self {
            Suite::Torus | Suite::Ttorus => 1e-8,
            Suite::Identities => 1e-10,
            Suite::Walk => 1e-7,
            _ => 1e-9,
        }
    }

    pub fn default_max_size(self) -> usize {
        match self {
            Suite::Cycle => 50,
            Suite::Galpha => 20,
            Suite::Torus => 10,
            Suite::Identities => 12,
            _ => 50,
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        std::iter::once(Suite::All)
            .chain(Suite::EACH)
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Misuse(format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    /// Lowers the largest cycle length a suite uses (never raises it).
    pub max_size: Option<usize>,
    /// Overrides the suite's comparison tolerance.
    pub tol: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Worst deviation observed, for numeric comparisons.
    pub residual: Option<f64>,
    pub tol: Option<f64>,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name
        )?;
        if let (Some(r), Some(t)) = (self.residual, self.tol) {
            write!(f, " residual={r:.3e} tol={t:.0e}")?;
        }
        if !self.detail.is_empty() {
            write!(f, " {}", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub suite: String,
    pub checks: Vec<Check>,
    pub wall: Duration,
}

impl RunReport {
    pub fn attempted(&self) -> usize {
        self.checks.len()
    }

    pub fn passed(&self) -> usize {
        self.checks.iter().filter(|c| c.passed).count()
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks
            .iter()
            .filter_map(|c| c.residual)
            .fold(0.0, f64::max)
    }

    pub fn summary(&self) -> String {
        format!(
            "suite={} checks={} passed={} max_residual={:.3e} wall={:.3}s",
            self.suite,
            self.attempted(),
            self.passed(),
            self.max_residual(),
            self.wall.as_secs_f64()
        )
    }
}

/// Collects checks; errors from the code under test become failed checks.
#[derive(Default)]
struct Recorder {
    checks: Vec<Check>,
}

impl Recorder {
    fn within(&mut self, name: impl Into<String>, residual: Result<f64>, tol: f64) {
        let name = name.into();
        match residual {
            Ok(r) => self.checks.push(Check {
                name,
                passed: r <= tol,
                residual: Some(r),
                tol: Some(tol),
                detail: String::new(),
            }),
            Err(e) => self.fail(name, e.to_string()),
        }
    }

    fn holds(&mut self, name: impl Into<String>, outcome: Result<bool>, detail: String) {
        match outcome {
            Ok(passed) => self.checks.push(Check {
                name: name.into(),
                passed,
                residual: None,
                tol: None,
                detail,
            }),
            Err(e) => self.fail(name.into(), e.to_string()),
        }
    }

    fn fail(&mut self, name: String, why: String) {
        self.checks.push(Check {
            name,
            passed: false,
            residual: None,
            tol: None,
            detail: format!("error: {why}"),
        });
    }
}

/// Checks of one suite at an explicit size cap and tolerance.
pub fn suite_checks(suite: Suite, max: usize, tol: f64) -> Vec<Check> {
    let mut rec = Recorder::default();
    match suite {
        Suite::Cycle => cycle_suite(&mut rec, max, tol),
        Suite::Galpha => galpha_suite(&mut rec, max, tol),
        Suite::Torus => torus_suite(&mut rec, max, tol),
        Suite::Ttorus => ttorus_suite(&mut rec, max, tol),
        Suite::Product => product_suite(&mut rec, max, tol),
        Suite::Identities => identities_suite(&mut rec, max, tol),
        Suite::Walk => walk_suite(&mut rec, max, tol),
        Suite::All => {
            for s in Suite::EACH {
                rec.checks
                    .extend(suite_checks(s, max.min(s.default_max_size()), tol));
            }
        }
    }
    rec.checks
}

/// Walk-series and fundamental-matrix relations (part of the identities suite).
pub fn relation_checks() -> Vec<Check> {
    let mut rec = Recorder::default();
    relations(&mut rec);
    rec.checks
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> RunReport {
    let start = Instant::now();
    let suites: Vec<Suite> = if suite == Suite::All {
        Suite::EACH.to_vec()
    } else {
        vec![suite]
    };
    let mut checks = Vec::new();
    for s in suites {
        let tol = opts.tol.unwrap_or(s.default_tol());
        let max = opts
            .max_size
            .unwrap_or(s.default_max_size())
            .min(s.default_max_size());
        checks.extend(suite_checks(s, max, tol));
    }
    RunReport {
        suite: suite.name().to_string(),
        checks,
        wall: start.elapsed(),
    }
}

fn max_abs(values: impl IntoIterator<Item = Result<f64>>) -> Result<f64> {
    values
        .into_iter()
        .try_fold(0.0, |acc, v| Ok(f64::max(acc, v?)))
}

fn cycle_suite(rec: &mut Recorder, max: usize, tol: f64) {
    for m in 3..=max {
        let outcome = pseudo_green_of(&RegularGraph::cycle(m).unwrap()).and_then(|oracle| {
            max_abs((0..m).map(|a| Ok((cycle_green(m, a)? - oracle.get(0, a)).abs())))
        });
        rec.within(
            format!("cycle m={m} closed form vs eigen-expansion"),
            outcome,
            tol,
        );
    }
    for m in [3, 10, max] {
        let want = (m as f64 + 1.0) * (m as f64 - 1.0) / (6.0 * m as f64);
        rec.within(
            format!("cycle m={m} diagonal value"),
            cycle_green(m, 0).map(|v| (v - want).abs()),
            tol,
        );
    }
}

fn galpha_suite(rec: &mut Recorder, max: usize, tol: f64) {
    for m in 3..=max {
        let lap = laplacian(
            &DirichletSubset::full(&RegularGraph::cycle(m).unwrap()),
            LaplacianKind::Normalized,
        );
        let outcome = eigensystem(&lap).and_then(|es| {
            max_abs(ALPHAS.iter().map(|&alpha| {
                let oracle = greens_alpha_oracle(&es, alpha)?;
                max_abs(
                    (0..m).map(|a| Ok((cycle_green_alpha(m, alpha, a)? - oracle.get(0, a)).abs())),
                )
            }))
        });
        rec.within(
            format!("G_alpha m={m} all alphas vs resolvent expansion"),
            outcome,
            tol,
        );
    }
}

fn torus_suite(rec: &mut Recorder, max: usize, tol: f64) {
    for m in 3..=max {
        for n in 3..=max {
            let outcome =
                pseudo_green_of(&RegularGraph::torus(&[m, n]).unwrap()).and_then(|oracle| {
                    max_abs(
                        (0..m * n).map(|y| {
                            Ok((torus_green(m, n, y / n, y % n)? - oracle.get(0, y)).abs())
                        }),
                    )
                });
            rec.within(
                format!("torus {m}x{n} closed form vs eigen-expansion"),
                outcome,
                tol,
            );
        }
    }
    rec.within(
        "torus 3x3 origin value",
        torus_green(3, 3, 0, 0).map(|v| (v - 8.0 / 9.0).abs()),
        tol,
    );
}

fn ttorus_suite(rec: &mut Recorder, max: usize, tol: f64) {
    let specs: [&[usize]; 5] = [
        &[3, 3, 3],
        &[3, 4, 5],
        &[5, 3, 4],
        &[4, 4, 4],
        &[3, 3, 3, 3],
    ];
    for dims in specs.iter().filter(|d| d.iter().all(|&m| m <= max)) {
        let spec = TorusSpec::new(dims.to_vec()).unwrap();
        let outcome = (|| {
            let oracle = pseudo_green_of(&spec.graph()?)?;
            let g = spec.graph()?;
            let row = TorusRow::compute(&spec)?;
            max_abs((0..spec.vertex_count()).map(|y| {
                let d = g.coords_of(VertexId(y))?;
                let direct = t_torus_green(&spec, &d)?;
                Ok((direct - oracle.get(0, y))
                    .abs()
                    .max((row.get(&d)? - oracle.get(0, y)).abs()))
            }))
        })();
        rec.within(
            format!("t-torus {dims:?} recursion vs eigen-expansion"),
            outcome,
            tol,
        );
    }
    for m in 3..=max.min(8) {
        let spec = TorusSpec::new(vec![m; 3]).unwrap();
        let mut disps = Vec::new();
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    disps.push([a, b, c]);
                }
            }
        }
        let outcome = max_abs(
            disps
                .iter()
                .map(|d| Ok((torus3_green(m, *d)? - t_torus_green(&spec, d)?).abs())),
        );
        rec.within(
            format!("3-torus m={m} unrolled form vs recursion"),
            outcome,
            tol.min(1e-10),
        );
    }
}

/// `max |L G - (I - P0)|` and `max |G phi_0|` for a full graph, `max |L G - I|` otherwise.
pub fn defining_residual(table: &GreenTable) -> f64 {
    let lap = laplacian(&table.subset, LaplacianKind::Normalized).entries;
    let n = lap.nrows();
    let lg = &lap * &table.entries;
    if table.subset.is_proper() {
        (lg - DMatrix::<f64>::identity(n, n)).amax()
    } else {
        let p0 = DMatrix::from_element(n, n, 1.0 / n as f64);
        let kernel = (&table.entries * DMatrix::from_element(n, 1, 1.0)).amax();
        (lg - (DMatrix::<f64>::identity(n, n) - p0))
            .amax()
            .max(kernel)
    }
}

fn dirichlet_gap(table: &GreenTable) -> Result<f64> {
    let direct = greens_dirichlet(&laplacian(&table.subset, LaplacianKind::Normalized))?;
    Ok((&table.entries - &direct.entries).amax())
}

fn pseudo_gap(table: &GreenTable, graph: &RegularGraph) -> Result<f64> {
    Ok((&table.entries - &pseudo_green_of(graph)?.entries).amax())
}

fn subset(host: &RegularGraph, members: &[usize]) -> Result<DirichletSubset> {
    DirichletSubset::new(host, members.iter().map(|&v| VertexId(v)).collect())
}

fn spectral(host: &RegularGraph, members: &[usize]) -> Result<SpectralProvider> {
    SpectralProvider::from_subset(&subset(host, members)?)
}

fn full_spectrum(dims: &[usize]) -> Result<FactorSpectrum> {
    FactorSpectrum::from_subset(&DirichletSubset::full(&RegularGraph::torus(dims)?))
}

fn product_suite(rec: &mut Recorder, max: usize, tol: f64) {
    let c = |m: usize| RegularGraph::cycle(m).unwrap();

    let t =
        (|| product_green_boundary_equal(&spectral(&c(3), &[0, 1])?, &FactorSpectrum::cycle(3)?))();
    rec.within(
        "boundary equal-degree S={0,1} in C3 x C3 corner value",
        t.map(|t| (t.get(0, 0) - 13.0 / 9.0).abs()),
        tol,
    );

    let boundary_equal: [(usize, &[usize], usize); 3] =
        [(3, &[0, 1], 3), (4, &[0], 4), (5, &[0, 1, 2], 4)];
    for (m, members, n) in boundary_equal {
        let out = (|| {
            let t = product_green_boundary_equal(
                &spectral(&c(m), members)?,
                &FactorSpectrum::cycle(n)?,
            )?;
            Ok(dirichlet_gap(&t)?.max(defining_residual(&t)))
        })();
        rec.within(
            format!("boundary equal-degree S={members:?} in C{m} x C{n} vs direct inverse"),
            out,
            tol,
        );
    }

    let boundary_general: [(usize, &[usize], &[usize]); 2] =
        [(3, &[0, 1], &[3, 3]), (4, &[0, 1], &[3, 3])];
    for (m, members, dims) in boundary_general {
        let out = (|| {
            let t =
                product_green_boundary_general(&spectral(&c(m), members)?, &full_spectrum(dims)?)?;
            Ok(dirichlet_gap(&t)?.max(defining_residual(&t)))
        })();
        rec.within(
            format!(
                "boundary general-degree S={members:?} in C{m} x torus{dims:?} vs direct inverse"
            ),
            out,
            tol,
        );
    }

    for (m, n) in [(3, 3), (3, 4), (5, 7), (6, 6)]
        .into_iter()
        .filter(|&(m, n)| m.max(n) <= max)
    {
        let out = (|| {
            let t = product_green_noboundary_equal(
                &CycleProvider::new(m)?,
                &FactorSpectrum::cycle(n)?,
            )?;
            Ok(pseudo_gap(&t, &RegularGraph::torus(&[m, n])?)?.max(defining_residual(&t)))
        })();
        rec.within(
            format!("boundaryless equal-degree C{m} x C{n} vs eigen-expansion"),
            out,
            tol,
        );
    }
    let t =
        (|| product_green_noboundary_equal(&CycleProvider::new(3)?, &FactorSpectrum::cycle(3)?))();
    rec.within(
        "boundaryless C3 x C3 origin value",
        t.map(|t| (t.get(0, 0) - 8.0 / 9.0).abs()),
        tol,
    );

    let noboundary_general: [(usize, &[usize]); 3] = [(3, &[3, 3]), (4, &[3, 3]), (5, &[3, 4])];
    for (m, dims) in noboundary_general {
        let out = (|| {
            let t =
                product_green_noboundary_general(&CycleProvider::new(m)?, &full_spectrum(dims)?)?;
            let mut all = vec![m];
            all.extend_from_slice(dims);
            Ok(pseudo_gap(&t, &RegularGraph::torus(&all)?)?.max(defining_residual(&t)))
        })();
        rec.within(
            format!("boundaryless general-degree C{m} x torus{dims:?} vs eigen-expansion"),
            out,
            tol,
        );
    }

    // Jacobi eigenbasis of C4 x C4 has several multi-dimensional eigenspaces.
    let out = (|| {
        let provider = spectral(&c(5), &[0, 1, 2])?;
        let spectrum = full_spectrum(&[4, 4])?;
        let base = product_green_boundary_general(&provider, &spectrum)?;
        let cycle_side = CycleProvider::new(3)?;
        let base_free = product_green_noboundary_general(&cycle_side, &spectrum)?;
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut worst: f64 = 0.0;
        for _ in 0..4 {
            let rotated =
                FactorSpectrum::new(spectrum.eigensystem.rotate_within_eigenspaces(|k| {
                    DMatrix::from_fn(k, k, |_, _| rng.gen_range(-1.0..1.0))
                })?);
            let t = product_green_boundary_general(&provider, &rotated)?;
            worst = worst.max((&t.entries - &base.entries).amax());
            let t = product_green_noboundary_general(&cycle_side as &dyn GAlphaProvider, &rotated)?;
            worst = worst.max((&t.entries - &base_free.entries).amax());
        }
        Ok(worst)
    })();
    rec.within(
        "eigenbasis rotation leaves product tables unchanged",
        out,
        tol,
    );
}

fn identities_suite(rec: &mut Recorder, max: usize, tol: f64) {
    for m in 3..=max {
        let out =
            max_abs((0..m).flat_map(|x| (0..m).map(move |y| identity_residual_cycle(m, x, y))));
        rec.within(format!("cycle identity m={m}"), out, tol);
    }
    for m in 3..=max.min(6) {
        for n in 3..=max.min(6) {
            let out = max_abs((0..m).flat_map(|x| {
                (0..n).flat_map(move |x2| {
                    (0..m).flat_map(move |y| {
                        (0..n).map(move |y2| identity_residual_torus(m, n, x, x2, y, y2))
                    })
                })
            }));
            rec.within(format!("torus identity {m}x{n}"), out, tol);
        }
    }
    relations(rec);
}

fn relations(rec: &mut Recorder) {
    let series_tol = 1e-12;
    let cases: [(&[usize], &[usize]); 3] = [
        (&[3], &[0, 1]),
        (&[5], &[0, 1, 2]),
        (&[3, 3], &[0, 1, 3, 4]),
    ];
    for (dims, members) in cases {
        let out = (|| {
            let s = subset(&RegularGraph::torus(dims)?, members)?;
            let series = transient_series(&transition_matrix(&s), series_tol)?;
            dirichlet_gap(&series)
        })();
        rec.within(
            format!("walk series equals Dirichlet inverse on {members:?} in torus{dims:?}"),
            out,
            10.0 * series_tol,
        );
    }
    for dims in [vec![3], vec![6], vec![7], vec![3, 4], vec![4, 4]] {
        let out = (|| {
            let g = RegularGraph::torus(&dims)?;
            let z = fundamental_matrix(&g)?;
            let rows = (&z * DMatrix::from_element(z.ncols(), 1, 1.0)).amax();
            Ok((&z - &pseudo_green_of(&g)?.entries).amax().max(rows))
        })();
        rec.within(
            format!("fundamental matrix matches Green's function on torus{dims:?}"),
            out,
            1e-10,
        );
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn walk_suite(rec: &mut Recorder, max: usize, tol: f64) {
    let mut graphs: Vec<Vec<usize>> = (3..=max.min(12)).map(|m| vec![m]).collect();
    for m in 3..=max.min(6) {
        for n in 3..=max.min(6) {
            graphs.push(vec![m, n]);
        }
    }
    for dims in graphs {
        let out = (|| {
            let g = RegularGraph::torus(&dims)?;
            let table = hitting_table(&pseudo_green_of(&g)?)?;
            max_abs((0..g.vertex_count()).map(|y| {
                let col = hitting_oracle(&g, VertexId(y))?;
                max_abs(
                    col.iter()
                        .enumerate()
                        .map(|(x, &want)| Ok(rel(table.get(x, y), want))),
                )
            }))
        })();
        rec.within(
            format!("hitting times on torus{dims:?} vs first-step solve (relative)"),
            out,
            tol,
        );
    }

    let out = max_abs((3..=max.max(3)).map(|m| {
        let spec = TorusSpec::new(vec![m])?;
        let grid = TorusRow::compute(&spec)?;
        let g0 = grid.get(&[0])?;
        max_abs(
            (0..m).map(|a| Ok((m as f64 * (g0 - grid.get(&[a])?) - (a * (m - a)) as f64).abs())),
        )
    }));
    rec.within(
        format!("cycle hitting law a(m-a) for m<={}", max.max(3)),
        out,
        1e-8,
    );

    if max < 49 {
        return;
    }
    let spec = TorusSpec::new(vec![49, 49]).unwrap();
    let grid = match hitting_grid(&spec, &[0, 0]) {
        Ok(g) => g,
        Err(e) => return rec.fail("C49 x C49 hitting grid".into(), e.to_string()),
    };
    let monotone = (1..=24).all(|a| {
        grid.get(0, a) >= grid.get(0, a - 1) && grid.get(0, a * 49) >= grid.get(0, (a - 1) * 49)
    });
    rec.holds(
        "C49 x C49 axis hitting times nondecreasing to distance 24",
        Ok(monotone),
        String::new(),
    );

    let top = grid.max();
    let (lo, hi) = EXPECTED_MAX_WINDOW;
    let at = grid.argmax().1;
    rec.holds(
        "C49 x C49 maximum hitting time from origin within expected window",
        Ok((lo..=hi).contains(&top)),
        format!(
            "max={top:.6} at ({}, {}) window=[{lo}, {hi}]",
            at / 49,
            at % 49
        ),
    );

    let out = (|| {
        let g = spec.graph()?;
        let mut rng = ChaCha8Rng::seed_from_u64(49);
        let targets: Vec<usize> = (0..5).map(|_| rng.gen_range(1..g.vertex_count())).collect();
        max_abs(
            targets
                .iter()
                .map(|&y| Ok(rel(grid.get(0, y), hitting_oracle(&g, VertexId(y))?[0]))),
        )
    })();
    rec.within(
        "C49 x C49 grid vs first-step solve at 5 random targets (relative)",
        out,
        1e-6,
    );
}
