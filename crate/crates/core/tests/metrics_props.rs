mod common;

use common::{check_toy_metrics, oracle, Toy};
use modquality::facts::class_dependency_graph;
use modquality::metrics::{metrics_for_graph, module_metrics_table, system_summary};
use modquality::{Exact, Metric};
use proptest::prelude::*;

fn toy(max_classes: usize) -> impl Strategy<Value = Toy> {
    (1..=max_classes).prop_flat_map(|n| {
        (
            prop::collection::vec(0..n, n),
            prop::collection::vec(
                prop::collection::vec(prop_oneof![3 => Just(0u64), 1 => 1..5u64], n),
                n,
            ),
        )
            .prop_map(|(assignment, inv)| Toy::from_raw(assignment, inv))
    })
}

fn exact_rows(t: &Toy) -> Vec<modquality::ExactMetricsRow> {
    module_metrics_table(&t.to_snapshot(), "package").unwrap()
}

fn zero() -> Exact {
    Exact::from_integer(0.into())
}

proptest! {
    #[test]
    fn matches_enumerator(t in toy(8)) {
        if let Err(e) = check_toy_metrics(&t, 1e-12) {
            return Err(TestCaseError::fail(e));
        }
    }

    #[test]
    fn f32_rows_agree_with_exact(t in toy(8)) {
        let s = t.to_snapshot();
        let exact: Vec<modquality::ExactMetricsRow> = module_metrics_table(&s, "package").unwrap();
        let single = module_metrics_table::<f32>(&s, "package").unwrap();
        for (e, f) in exact.iter().zip(&single) {
            let want_a: f64 = num_traits::ToPrimitive::to_f64(&e.cohesion).unwrap();
            let want_e: f64 = num_traits::ToPrimitive::to_f64(&e.coupling).unwrap();
            prop_assert!((f.cohesion as f64 - want_a).abs() < 1e-5);
            prop_assert!((f.coupling as f64 - want_e).abs() < 1e-5);
        }
    }

    #[test]
    fn cohesion_within_bounds(t in toy(8)) {
        for row in exact_rows(&t) {
            let n = row.class_count as i64;
            prop_assert!(row.cohesion >= zero());
            prop_assert!(row.cohesion <= Exact::new((n - 1).into(), n.into()));
        }
    }

    #[test]
    fn adding_intra_edge_raises_cohesion_by_inverse_square(t in toy(8), pick in any::<prop::sample::Index>()) {
        let missing: Vec<(usize, usize)> = (0..t.class_count())
            .flat_map(|a| (0..t.class_count()).map(move |b| (a, b)))
            .filter(|&(a, b)| a != b && t.module_of[a] == t.module_of[b] && !t.depends(a, b))
            .collect();
        prop_assume!(!missing.is_empty());
        let (a, b) = missing[pick.index(missing.len())];
        let mut grown = t.clone();
        grown.invocations[a][b] = 1;
        let m = t.module_of[a];
        let n = t.members(m).len() as i64;
        let (before, after) = (exact_rows(&t), exact_rows(&grown));
        prop_assert_eq!(after[m].cohesion.clone() - before[m].cohesion.clone(), Exact::new(1.into(), (n * n).into()));
        for k in (0..t.module_count).filter(|&k| k != m) {
            prop_assert_eq!(&after[k].cohesion, &before[k].cohesion);
        }
    }

    #[test]
    fn cross_edge_leaves_cohesion_and_raises_coupling(t in toy(8), pick in any::<prop::sample::Index>()) {
        let missing: Vec<(usize, usize)> = (0..t.class_count())
            .flat_map(|a| (0..t.class_count()).map(move |b| (a, b)))
            .filter(|&(a, b)| t.module_of[a] != t.module_of[b] && !t.depends(a, b))
            .collect();
        prop_assume!(!missing.is_empty());
        let (a, b) = missing[pick.index(missing.len())];
        let mut grown = t.clone();
        grown.invocations[a][b] = 2;
        let (before, after) = (exact_rows(&t), exact_rows(&grown));
        for (x, y) in before.iter().zip(&after) {
            prop_assert_eq!(&x.cohesion, &y.cohesion);
        }
        let (ma, mb) = (t.module_of[a], t.module_of[b]);
        prop_assert!(after[ma].coupling > before[ma].coupling);
        prop_assert!(after[mb].coupling > before[mb].coupling);
        prop_assert_eq!(after[ma].ce, oracle::ce(&grown, ma));
        prop_assert_eq!(after[mb].ca, oracle::ca(&grown, mb));
    }

    #[test]
    fn single_module_has_no_coupling(t in toy(8)) {
        let merged = Toy { module_of: vec![0; t.class_count()], module_count: 1, invocations: t.invocations.clone() };
        let rows = exact_rows(&merged);
        prop_assert_eq!(rows.len(), 1);
        prop_assert_eq!(&rows[0].coupling, &zero());
        prop_assert_eq!((rows[0].ca, rows[0].ce), (0, 0));
        let deps = (0..t.class_count())
            .flat_map(|a| (0..t.class_count()).map(move |b| (a, b)))
            .filter(|&(a, b)| t.depends(a, b))
            .count();
        prop_assert_eq!(rows[0].intra_edges, deps);
    }

    #[test]
    fn class_renaming_does_not_change_metrics(t in toy(8), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let n = t.class_count();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let mut module_of = vec![0; n];
        let mut inv = vec![vec![0; n]; n];
        for a in 0..n {
            module_of[perm[a]] = t.module_of[a];
            for b in 0..n {
                inv[perm[a]][perm[b]] = t.invocations[a][b];
            }
        }
        let shuffled = Toy { module_of, module_count: t.module_count, invocations: inv };
        prop_assert_eq!(exact_rows(&t), exact_rows(&shuffled));
    }

    #[test]
    fn summary_is_mean_of_rows(t in toy(8)) {
        let rows = exact_rows(&t);
        let summary = system_summary(&rows).unwrap();
        let k = Exact::from_integer((rows.len() as i64).into());
        let sum_a = rows.iter().fold(zero(), |acc, r| acc + r.cohesion.clone());
        let sum_e = rows.iter().fold(zero(), |acc, r| acc + r.coupling.clone());
        prop_assert_eq!(summary.avg_cohesion, sum_a / k.clone());
        prop_assert_eq!(summary.avg_coupling, sum_e / k);
        prop_assert_eq!(summary.module_count, rows.len());
    }

    #[test]
    fn coupling_sum_counts_each_cross_edge_twice(t in toy(8)) {
        // Σ_i Σ_{j≠i} ε_ij counts every cross-module dependency twice.
        let cross = (0..t.class_count())
            .flat_map(|a| (0..t.class_count()).map(move |b| (a, b)))
            .filter(|&(a, b)| t.depends(a, b) && t.module_of[a] != t.module_of[b])
            .count();
        let total: usize = (0..t.module_count)
            .flat_map(|i| (0..t.module_count).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| oracle::eps(&t, i, j))
            .sum();
        prop_assert_eq!(total, 2 * cross);
        let g = class_dependency_graph(&t.to_snapshot());
        prop_assert!(g.edge_count() >= cross);
    }
}

#[test]
fn metric_names_round_trip() {
    for m in Metric::ALL {
        assert_eq!(m.name().parse::<Metric>().unwrap(), m);
    }
    assert!("entropy".parse::<Metric>().is_err());
}

#[test]
fn empty_invocations_give_zero_metrics() {
    let t = Toy::from_raw(vec![0, 0, 1, 2], vec![vec![0; 4]; 4]);
    let s = t.to_snapshot();
    let g = class_dependency_graph(&s);
    assert_eq!(g.vertex_count(), 4);
    for row in metrics_for_graph::<f64>(&g, s.scheme("package").unwrap()).unwrap() {
        assert_eq!(
            (row.cohesion, row.coupling, row.ca, row.ce),
            (0.0, 0.0, 0, 0)
        );
    }
}
