use proptest::prelude::*;
use unispec::exact::{q_frac, q_int};
use unispec::group::{Family, GroupElement, GroupSpec, GroupSubset};
use unispec::space::{Action, Carrier, CarrierMap, FiniteMetric, Point, ShiftPoint};
use unispec::spec::{
    agreement_radius, conjugacy_spec_transfer, cyclic_restriction_instance, product_spec_transfer,
    search_tracing_point, verify_trace, OrbitSegment, SearchScope, SeparationMode, SpecificationInstance,
};

fn shift() -> Action {
    Action::build(
        "shift",
        GroupSpec::integers(),
        Carrier::shift(2).unwrap(),
        vec![CarrierMap::shift_by(1, 2), CarrierMap::shift_by(-1, 2)],
    )
    .unwrap()
}

fn interval(a: i64, b: i64) -> GroupSubset {
    GroupSubset::finite((a..=b).map(|k| GroupElement::Vector(vec![k])).collect())
}

fn word() -> impl Strategy<Value = Vec<u8>> {
    proptest::collection::vec(0u8..2, 1..4)
}

/// Intervals of length 1..=3 placed left to right with gaps above `c`.
fn separated_family(c: u64) -> impl Strategy<Value = Vec<(GroupSubset, Point)>> {
    proptest::collection::vec((0i64..3, 0i64..4, word()), 2..4).prop_map(move |parts| {
        let mut start = -4;
        parts
            .into_iter()
            .map(|(len, extra, w)| {
                let set = interval(start, start + len);
                start += len + c as i64 + 1 + extra;
                (set, Point::Seq(ShiftPoint::periodic(&w).unwrap()))
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn well_separated_shift_demands_are_traced(fam in separated_family(6)) {
        let eps = q_frac(1, 2);
        prop_assert_eq!(agreement_radius(&eps), 3);
        let segs = fam.into_iter().map(|(l, t)| OrbitSegment::new(l, t)).collect();
        let inst = SpecificationInstance::new(shift(), eps, 6, segs, SeparationMode::MinDistance, None).unwrap();
        let r = search_tracing_point(&inst, &SearchScope::default()).unwrap();
        prop_assert!(r.found);
        let w = r.witness.unwrap();
        prop_assert!(verify_trace(&inst, &w).unwrap().found);
        let p = search_tracing_point(&inst, &SearchScope::default().periodic()).unwrap();
        prop_assert!(p.found && p.periodic);
    }

    #[test]
    fn cyclic_blocks_round_trip(a in word(), b in word(), n1 in 0u64..3, n2 in 0u64..3, extra in 0u64..3) {
        let action = shift();
        let pts = [Point::Seq(ShiftPoint::periodic(&a).unwrap()), Point::Seq(ShiftPoint::periodic(&b).unwrap())];
        let blocks = cyclic_restriction_instance(
            &action,
            &GroupElement::Vector(vec![1]),
            &pts,
            &[n1, n2],
            &[7 + extra],
            6,
            q_frac(1, 2),
            SeparationMode::MinDistance,
        )
        .unwrap();
        let rt = blocks.round_trip(&SearchScope::default()).unwrap();
        prop_assert!(rt.trace.found);
        prop_assert_eq!(rt.classical, Some(true));
    }

    #[test]
    fn product_demands_project_and_combine(fa in separated_family(6), words in proptest::collection::vec(word(), 3)) {
        let fb: Vec<(GroupSubset, Point)> = fa
            .iter()
            .zip(&words)
            .map(|((l, _), w)| (l.clone(), Point::Seq(ShiftPoint::periodic(w).unwrap())))
            .collect();
        let mk = |fam: Vec<(GroupSubset, Point)>| {
            let segs = fam.into_iter().map(|(l, t)| OrbitSegment::new(l, t)).collect();
            SpecificationInstance::new(shift(), q_frac(1, 2), 6, segs, SeparationMode::MinDistance, None).unwrap()
        };
        let r = product_spec_transfer(&mk(fa), &mk(fb), &SearchScope::default().with_period_bound(2)).unwrap();
        prop_assert!(r.consistent());
        prop_assert!(r.product.found);
    }

    #[test]
    fn relabelled_finite_instances_are_equivalent(
        perm in Just((0..6usize).collect::<Vec<_>>()).prop_shuffle(),
        t in Just((0..6usize).collect::<Vec<_>>()).prop_shuffle(),
        i in 0usize..6,
        j in 0usize..6,
        num in 1i64..8,
    ) {
        let carrier = Carrier::Finite(FiniteMetric::on_line(&[0, 1, 3, 4, 8, 9].map(q_int)).unwrap());
        let mut inv = vec![0; 6];
        for (a, &b) in perm.iter().enumerate() {
            inv[b] = a;
        }
        let action = Action::build(
            "perm",
            GroupSpec::standard(Family::FreeAbelian(1)).unwrap(),
            carrier,
            vec![CarrierMap::Permutation(perm), CarrierMap::Permutation(inv)],
        )
        .unwrap();
        let segs = vec![
            OrbitSegment::new(interval(0, 1), Point::Index(i)),
            OrbitSegment::new(interval(4, 5), Point::Index(j)),
        ];
        let inst = SpecificationInstance::new(action, q_frac(num, 2), 2, segs, SeparationMode::MinDistance, None).unwrap();
        let r = conjugacy_spec_transfer(&inst, &CarrierMap::Permutation(t), &SearchScope::default()).unwrap();
        prop_assert!(r.equivalent());
        prop_assert_eq!(r.scanned, 6);
    }
}
