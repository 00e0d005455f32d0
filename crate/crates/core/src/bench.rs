//! Timing harness for torus pseudo-inverse rows.

use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::closed_forms::{
    all_tuples, cycle_eigenvalue, full_torus_row, run_pool, TorusRow, TorusSpec,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BenchMode {
    /// Closed form at the representative displacements only.
    Row,
    /// Closed form at every displacement of the row.
    FullRep,
    /// Direct eigen-expansion at the representative displacements, `O(n)` per entry.
    Oracle,
}

impl FromStr for BenchMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "row" => Ok(BenchMode::Row),
            "full-rep" => Ok(BenchMode::FullRep),
            "oracle" => Ok(BenchMode::Oracle),
            other => Err(Error::Misuse(format!(
                "unknown bench mode {other:?}; expected row, full-rep or oracle"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRecord {
    pub mode: BenchMode,
    pub dims: Vec<usize>,
    pub n: usize,
    pub t: usize,
    pub threads: usize,
    pub entries_computed: usize,
    pub nanos_total: u128,
    pub nanos_per_entry: f64,
}

/// Runs one timed evaluation; the computed values are returned alongside.
pub fn bench_once(
    spec: &TorusSpec,
    mode: BenchMode,
    threads: usize,
) -> Result<(BenchRecord, Vec<f64>)> {
    let start = Instant::now();
    let values = match mode {
        BenchMode::Row => {
            let row = TorusRow::compute_with_threads(spec, threads)?;
            representatives(spec)
                .iter()
                .map(|d| row.get(d))
                .collect::<Result<Vec<f64>>>()?
        }
        BenchMode::FullRep => full_torus_row(spec, threads)?,
        BenchMode::Oracle => expansion_row(spec, &representatives(spec), threads)?,
    };
    let nanos_total = start.elapsed().as_nanos();
    let entries = values.len();
    let record = BenchRecord {
        mode,
        dims: spec.dims().to_vec(),
        n: spec.vertex_count(),
        t: spec.t(),
        threads,
        entries_computed: entries,
        nanos_total,
        nanos_per_entry: nanos_total as f64 / entries.max(1) as f64,
    };
    Ok((record, values))
}

pub fn bench(
    spec: &TorusSpec,
    mode: BenchMode,
    repeat: usize,
    threads: usize,
) -> Result<Vec<BenchRecord>> {
    (0..repeat.max(1))
        .map(|_| bench_once(spec, mode, threads).map(|(r, _)| r))
        .collect()
}

/// Displacements `0..=m_s/2` per axis, row-major.
pub fn representatives(spec: &TorusSpec) -> Vec<Vec<usize>> {
    all_tuples(&spec.dims().iter().map(|m| m / 2 + 1).collect::<Vec<_>>())
}

/// `G(0, a) = (1/n) sum_{K != 0} exp(2 pi i K.a / m) / lambda_K` with
/// `lambda_K` the mean of the per-axis cycle eigenvalues, summed term by term.
pub fn expansion_row(
    spec: &TorusSpec,
    displacements: &[Vec<usize>],
    threads: usize,
) -> Result<Vec<f64>> {
    let dims = spec.dims();
    let t = dims.len() as f64;
    let n = spec.vertex_count() as f64;
    let freqs = all_tuples(dims);
    let inv_lambda: Vec<f64> = freqs
        .iter()
        .map(|k| {
            let l: f64 = k
                .iter()
                .zip(dims)
                .map(|(&j, &m)| cycle_eigenvalue(m, j))
                .sum::<f64>()
                / t;
            if l > 0.0 {
                1.0 / l
            } else {
                0.0
            }
        })
        .collect();
    let twiddles: Vec<Vec<Complex64>> = dims
        .iter()
        .map(|&m| {
            (0..m)
                .map(|r| {
                    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * r as f64 / m as f64)
                })
                .collect()
        })
        .collect();
    run_pool(threads, || {
        displacements
            .par_iter()
            .map(|a| {
                let mut sum = Complex64::new(0.0, 0.0);
                for (k, &w) in freqs.iter().zip(&inv_lambda) {
                    let mut phase = Complex64::new(w, 0.0);
                    for s in 0..dims.len() {
                        phase *= twiddles[s][(k[s] * a[s]) % dims[s]];
                    }
                    sum += phase;
                }
                sum.re / n
            })
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let spec = TorusSpec::new(vec![6, 5]).unwrap();
        let (row, a) = bench_once(&spec, BenchMode::Row, 1).unwrap();
        let (_, b) = bench_once(&spec, BenchMode::Oracle, 2).unwrap();
        let (full, c) = bench_once(&spec, BenchMode::FullRep, 1).unwrap();
        assert_eq!(row.entries_computed, 4 * 3);
        assert_eq!(full.entries_computed, 30);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-10);
        }
        assert!((a[0] - c[0]).abs() < 1e-12);
    }

    #[test]
    fn parses_modes() {
        assert_eq!("full-rep".parse::<BenchMode>().unwrap(), BenchMode::FullRep);
        assert!("fast".parse::<BenchMode>().is_err());
    }
}
