use nalgebra::DMatrix;
use proptest::prelude::*;

use torgreen::closed_forms::{
    cycle_green, cycle_green_alpha, t_torus_green, torus_green, TorusRow, TorusSpec,
};
use torgreen::graph::{
    cartesian_product, laplacian, DirichletSubset, LaplacianKind, RegularGraph, VertexId,
};
use torgreen::oracle::GreenTable;
use torgreen::oracle::{fundamental_matrix, transient_series, transition_matrix};
use torgreen::verify::defining_residual;

fn dims_strategy(max_t: usize, max_m: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(3..=max_m, 1..=max_t)
}

/// Full `G` table of a torus assembled from one closed-form row.
fn assembled(spec: &TorusSpec) -> GreenTable {
    let g = spec.graph().unwrap();
    let row = TorusRow::compute(spec).unwrap();
    let n = spec.vertex_count();
    let coords: Vec<Vec<usize>> = (0..n).map(|v| g.coords_of(VertexId(v)).unwrap()).collect();
    let entries = DMatrix::from_fn(n, n, |x, y| {
        let d: Vec<usize> = coords[x]
            .iter()
            .zip(&coords[y])
            .zip(spec.dims())
            .map(|((&a, &b), &m)| (b + m - a) % m)
            .collect();
        row.get(&d).unwrap()
    });
    GreenTable {
        entries,
        subset: DirichletSubset::full(&g),
        alpha: None,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn laplacian_rows_and_scaling(dims in dims_strategy(3, 6)) {
        let g = RegularGraph::torus(&dims).unwrap();
        let full = DirichletSubset::full(&g);
        let comb = laplacian(&full, LaplacianKind::Combinatorial).entries;
        let norm = laplacian(&full, LaplacianKind::Normalized).entries;
        let walk = laplacian(&full, LaplacianKind::DiscreteLaplace).entries;
        let d = g.degree() as f64;
        for i in 0..g.vertex_count() {
            prop_assert_eq!(comb.row(i).sum(), 0.0);
            prop_assert!(walk.row(i).sum().abs() < 1e-15);
        }
        prop_assert!((comb / d - norm).amax() < 1e-15);
    }

    #[test]
    fn product_order_is_a_transposition(m in 3usize..6, n in 3usize..6, k in 3usize..5) {
        let a = RegularGraph::cycle(m).unwrap();
        let b = RegularGraph::torus(&[n, k]).unwrap();
        let ab = cartesian_product(&a, &b);
        let ba = cartesian_product(&b, &a);
        let (na, nb) = (a.vertex_count(), b.vertex_count());
        let swap = |v: usize| (v % nb) * na + v / nb;
        for x in 0..na * nb {
            for y in 0..na * nb {
                prop_assert_eq!(ab.adjacent(VertexId(x), VertexId(y)), ba.adjacent(VertexId(swap(x)), VertexId(swap(y))));
            }
        }
    }

    #[test]
    fn cycle_green_is_even_and_centered(m in 3usize..200) {
        let mut sum = 0.0;
        for a in 0..m {
            let v = cycle_green(m, a).unwrap();
            sum += v;
            if a > 0 {
                prop_assert_eq!(v, cycle_green(m, m - a).unwrap());
            }
        }
        prop_assert!(sum.abs() < 1e-9);
    }

    #[test]
    fn galpha_is_even_centered_and_decreasing(m in 3usize..60, alpha in 0.01f64..10.0, bump in 0.01f64..1.0) {
        let mut sum = 0.0;
        for a in 0..m {
            let v = cycle_green_alpha(m, alpha, a).unwrap();
            sum += v;
            prop_assert!((v - cycle_green_alpha(m, alpha, (m - a) % m).unwrap()).abs() <= 1e-12 * v.abs().max(1.0));
        }
        prop_assert!(sum.abs() < 1e-9 * m as f64);
        prop_assert!(cycle_green_alpha(m, alpha, 0).unwrap() > cycle_green_alpha(m, alpha + bump, 0).unwrap());
    }

    #[test]
    fn one_dimensional_torus_is_the_cycle(m in 3usize..80, a in 0usize..80) {
        let a = a % m;
        let spec = TorusSpec::new(vec![m]).unwrap();
        prop_assert_eq!(t_torus_green(&spec, &[a]).unwrap(), cycle_green(m, a).unwrap());
    }

    #[test]
    fn torus_green_symmetries(m in 3usize..12, n in 3usize..12, a in 0usize..12, b in 0usize..12) {
        let (a, b) = (a % m, b % n);
        let v = torus_green(m, n, a, b).unwrap();
        prop_assert!((v - torus_green(n, m, b, a).unwrap()).abs() < 1e-12);
        prop_assert!((v - torus_green(m, n, (m - a) % m, b).unwrap()).abs() < 1e-12);
        prop_assert!((v - torus_green(m, n, a, (n - b) % n).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn t_torus_ignores_axis_order(dims in dims_strategy(3, 7), seed in 0usize..1000) {
        let t = dims.len();
        let disp: Vec<usize> = dims.iter().enumerate().map(|(i, &m)| (seed * (i + 3)) % m).collect();
        let spec = TorusSpec::new(dims.clone()).unwrap();
        let v = t_torus_green(&spec, &disp).unwrap();
        let perm: Vec<usize> = (0..t).map(|i| (i + seed) % t).collect();
        let pd: Vec<usize> = perm.iter().map(|&i| dims[i]).collect();
        let pa: Vec<usize> = perm.iter().map(|&i| disp[i]).collect();
        let w = t_torus_green(&TorusSpec::new(pd).unwrap(), &pa).unwrap();
        prop_assert!((v - w).abs() < 1e-10);
    }

    #[test]
    fn cycle_hitting_law(m in 3usize..=50, a in 0usize..50) {
        let a = a % m;
        let q = m as f64 * (cycle_green(m, 0).unwrap() - cycle_green(m, a).unwrap());
        prop_assert!((q - (a * (m - a)) as f64).abs() < 1e-8);
    }
}

#[test]
fn assembled_torus_tables_satisfy_defining_relations() {
    for dims in [
        vec![8, 8],
        vec![5, 8],
        vec![3, 7],
        vec![4, 4, 4],
        vec![3, 4, 5],
        vec![3, 3, 3, 3],
    ] {
        let table = assembled(&TorusSpec::new(dims.clone()).unwrap());
        assert!(defining_residual(&table) < 1e-8, "{dims:?}");
        assert!(table.asymmetry() < 1e-10, "{dims:?}");
    }
}

#[test]
fn walk_series_inverts_the_laplace_operator() {
    let g = RegularGraph::torus(&[4, 4]).unwrap();
    let s =
        DirichletSubset::new(&g, [0, 1, 2, 4, 5, 8].into_iter().map(VertexId).collect()).unwrap();
    let p = transition_matrix(&s);
    let tol = 1e-12;
    let series = transient_series(&p, tol).unwrap();
    let n = p.entries.nrows();
    let i = DMatrix::<f64>::identity(n, n);
    assert!((&series.entries * (&i - &p.entries) - &i).amax() < 10.0 * tol);
}

#[test]
fn fundamental_matrix_relations() {
    for dims in [vec![3], vec![8], vec![3, 5], vec![4, 4]] {
        let g = RegularGraph::torus(&dims).unwrap();
        let n = g.vertex_count();
        let z = fundamental_matrix(&g).unwrap();
        let p = transition_matrix(&DirichletSubset::full(&g)).entries;
        let i = DMatrix::<f64>::identity(n, n);
        let pi = DMatrix::from_element(n, n, 1.0 / n as f64);
        assert!(((&i - &p) * &z - (&i - &pi)).amax() < 1e-10);
        assert!((&z * DMatrix::from_element(n, 1, 1.0)).amax() < 1e-10);
    }
}
