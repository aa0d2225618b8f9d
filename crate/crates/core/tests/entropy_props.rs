use proptest::prelude::*;
use unispec::entropy::{
    closeness_relation, closeness_sequence, count_chain, greedy_dominating, greedy_independent, max_separated,
    metric_equivalence_check, min_spanning, ClosenessRelation, SolveMode, DEFAULT_NODE_BUDGET,
};
use unispec::exact::{q_frac, q_int, Q};
use unispec::group::{Family, GroupSpec};
use unispec::space::{Action, Carrier, CarrierMap, FiniteMetric, MetricTransform, Point};

fn compose(p: &[usize], q: &[usize]) -> Vec<usize> {
    // apply q, then p
    q.iter().map(|&i| p[i]).collect()
}

fn invert(p: &[usize]) -> Vec<usize> {
    let mut out = vec![0; p.len()];
    for (i, &j) in p.iter().enumerate() {
        out[j] = i;
    }
    out
}

fn power(p: &[usize], k: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (0..p.len()).collect();
    for _ in 0..k {
        out = compose(p, &out);
    }
    out
}

/// A permutation action of ℤ² (commuting generators) or F₂ on points of
/// the line.
fn perm_action(values: &[i64], a: Vec<usize>, b: Vec<usize>, free: bool, k: usize) -> Action {
    let carrier =
        Carrier::Finite(FiniteMetric::on_line(&values.iter().map(|&v| q_int(v)).collect::<Vec<_>>()).unwrap());
    let (group, b) = if free {
        (GroupSpec::standard(Family::Free(2)).unwrap(), b)
    } else {
        (GroupSpec::lattice(2), power(&a, k))
    };
    let maps = vec![
        CarrierMap::Permutation(a.clone()),
        CarrierMap::Permutation(invert(&a)),
        CarrierMap::Permutation(b.clone()),
        CarrierMap::Permutation(invert(&b)),
    ];
    Action::build("perm", group, carrier, maps).unwrap()
}

fn instance() -> impl Strategy<Value = (Action, Vec<Point>)> {
    (2usize..=10)
        .prop_flat_map(|n| {
            (
                proptest::collection::vec(0i64..40, n),
                Just((0..n).collect::<Vec<usize>>()).prop_shuffle(),
                Just((0..n).collect::<Vec<usize>>()).prop_shuffle(),
                any::<bool>(),
                0usize..4,
            )
        })
        .prop_map(|(mut vals, a, b, free, k)| {
            vals.sort_unstable();
            vals.dedup();
            // keep distinct points; pad with fresh values
            let n = a.len();
            let mut next = 100;
            while vals.len() < n {
                vals.push(next);
                next += 7;
            }
            let action = perm_action(&vals, a, b, free, k);
            let pts = (0..n).map(Point::Index).collect();
            (action, pts)
        })
}

fn brute_max_separated(rel: &ClosenessRelation) -> usize {
    let n = rel.len();
    (0u32..1 << n)
        .filter(|m| rel.is_separated(&(0..n).filter(|i| m >> i & 1 == 1).collect::<Vec<_>>()))
        .map(|m| m.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

fn brute_min_spanning(rel: &ClosenessRelation) -> usize {
    let n = rel.len();
    (0u32..1 << n)
        .filter(|m| rel.is_spanning(&(0..n).filter(|i| m >> i & 1 == 1).collect::<Vec<_>>()))
        .map(|m| m.count_ones() as usize)
        .min()
        .unwrap_or(0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spanning_separated_chain((action, k) in instance(), n in 0usize..4, num in 1i64..20) {
        let eps_u = q_frac(num, 2);
        let eps_v = q_frac(num, 4);
        let chain = count_chain(&action, &k, n, &eps_u, &eps_v, DEFAULT_NODE_BUDGET).unwrap();
        prop_assert!(chain.holds(), "{:?}", chain.values());
    }

    #[test]
    fn exact_counts_match_enumeration((action, k) in instance(), n in 0usize..3, num in 1i64..20) {
        let rel = closeness_relation(&action, &k, n, &q_int(num)).unwrap();
        let s = max_separated(&rel, SolveMode::Exact, DEFAULT_NODE_BUDGET);
        let r = min_spanning(&rel, SolveMode::Exact, DEFAULT_NODE_BUDGET);
        prop_assert!(s.exact && r.exact);
        prop_assert_eq!(s.value, brute_max_separated(&rel));
        prop_assert_eq!(r.value, brute_min_spanning(&rel));
        prop_assert!(rel.is_separated(&s.witness));
        prop_assert!(rel.is_spanning(&r.witness));
        prop_assert!(greedy_independent(&rel).len() <= s.value);
        prop_assert!(greedy_dominating(&rel).len() >= r.value);
    }

    #[test]
    fn counts_grow_with_n_and_shrink_with_eps((action, k) in instance(), num in 2i64..20) {
        let coarse = closeness_sequence(&action, &k, 3, &q_int(num)).unwrap();
        let fine = closeness_sequence(&action, &k, 3, &q_int(num - 1)).unwrap();
        let s = |rel: &ClosenessRelation| max_separated(rel, SolveMode::Exact, DEFAULT_NODE_BUDGET).value;
        for n in 0..3 {
            prop_assert!(s(&coarse[n]) <= s(&coarse[n + 1]));
            prop_assert!(coarse[n + 1].is_subrelation_of(&coarse[n]));
        }
        for n in 0..=3 {
            prop_assert!(s(&coarse[n]) <= s(&fine[n]));
        }
    }

    #[test]
    fn isometric_conjugacy_preserves_counts((action, k) in instance(), num in 1i64..20, n in 0usize..3) {
        let len = k.len();
        let t: Vec<usize> = (0..len).map(|i| (i + 1) % len).collect();
        let conj = action.conjugate(&CarrierMap::Permutation(t.clone())).unwrap();
        let k2: Vec<Point> = (0..len).map(|i| Point::Index(t[i])).collect();
        let eps = q_int(num);
        let a = closeness_relation(&action, &k, n, &eps).unwrap();
        let b = closeness_relation(&conj, &k2, n, &eps).unwrap();
        let count = |r: &ClosenessRelation| (
            max_separated(r, SolveMode::Exact, DEFAULT_NODE_BUDGET).value,
            min_spanning(r, SolveMode::Exact, DEFAULT_NODE_BUDGET).value,
        );
        prop_assert_eq!(count(&a), count(&b));
    }
}

#[test]
fn rescaled_metrics_are_bracketed_by_the_schedule() {
    let vals: Vec<i64> = vec![0, 1, 3, 4, 8, 9];
    let a = vec![1, 0, 3, 2, 5, 4];
    let b = vec![2, 3, 0, 1, 4, 5];
    let action = perm_action(&vals, a, b, true, 0);
    let k: Vec<Point> = (0..6).map(Point::Index).collect();
    let schedule: Vec<Q> = [8, 4, 2, 1].iter().map(|&v| q_int(v)).chain([q_frac(1, 2)]).collect();
    let cases = [
        (MetricTransform::Scale(q_int(2)), q_int(4)),
        (MetricTransform::Truncate, q_frac(1, 2)),
        (MetricTransform::Bounded, q_frac(2, 3)),
    ];
    for (t, eps) in cases {
        let r = metric_equivalence_check(&action, &k, 2, &eps, &t, &schedule, DEFAULT_NODE_BUDGET).unwrap();
        assert!(r.exhibited, "{r:?}");
        assert!(r.r_coarse.unwrap() <= r.r_transformed && r.r_transformed <= r.r_fine.unwrap());
    }
}
