use unispec::chaos::{devaney_report, example_gallery, GALLERY};
use unispec::entropy::{closeness_relation, estimate_entropy, max_separated, SolveMode, DEFAULT_NODE_BUDGET};
use unispec::exact::{q_to_f64, Q};
use unispec::spec::{search_tracing_point, SearchScope};

#[test]
fn doubling_restriction_is_near_log_two() {
    let e = example_gallery("doubling").unwrap();
    let est = estimate_entropy(&e.entropy_action, &e.k, &e.entropy).unwrap();
    let ln2 = std::f64::consts::LN_2;
    assert!(
        (est.estimate - ln2).abs() <= 0.1 * ln2,
        "estimate {} rates {:?}",
        est.estimate,
        est.rates
            .iter()
            .map(|r| (r.raw_rate, r.rate, r.censored.clone()))
            .collect::<Vec<_>>()
    );
    // envelope rates never decrease as ε shrinks
    assert!(est.rates.windows(2).all(|w| w[0].rate <= w[1].rate));
}

#[test]
fn trivial_and_isometric_systems_have_zero_entropy() {
    for name in ["finite-trivial", "lattice-trivial", "translation", "equicontinuous"] {
        let e = example_gallery(name).unwrap();
        let est = estimate_entropy(&e.entropy_action, &e.k, &e.entropy).unwrap();
        assert!(est.separated_counts_constant(), "{name}");
        assert_eq!(est.estimate, 0.0, "{name}");
        assert!(est.rates.iter().all(|r| r.rate == 0.0), "{name}");
    }
}

#[test]
fn isometric_separated_sets_stay_below_the_diameter_bound() {
    let e = example_gallery("equicontinuous").unwrap();
    let diam = e.action.carrier().diameter_of(&e.k).unwrap();
    for eps in &e.entropy.epsilons {
        let rel = closeness_relation(&e.action, &e.k, 6, eps).unwrap();
        let s = max_separated(&rel, SolveMode::Exact, DEFAULT_NODE_BUDGET);
        let bound: Q = &diam / eps + Q::from_integer(1.into());
        assert!(
            (s.value as f64) <= q_to_f64(&bound),
            "ε = {eps}: {} > {}",
            s.value,
            bound
        );
    }
}

#[test]
fn full_shift_entropy_is_positive() {
    let e = example_gallery("full-shift").unwrap();
    let est = estimate_entropy(&e.entropy_action, &e.k, &e.entropy).unwrap();
    assert!(est.estimate > 0.0);
}

#[test]
fn overlapping_windows_admit_no_trace() {
    let e = example_gallery("shift-counterexample").unwrap();
    assert_eq!(e.instances.len(), 5);
    for inst in &e.instances {
        let r = search_tracing_point(inst, &SearchScope::default()).unwrap();
        assert!(!r.found, "{}", inst.describe());
    }
}

#[test]
fn implication_chain_holds_on_every_entry() {
    for name in GALLERY {
        let e = example_gallery(name).unwrap();
        let report = devaney_report(&e.action, &e.chaos, None).unwrap();
        assert!(report.implications_hold(), "{name}");
        for blocks in &e.cyclic {
            let rt = blocks.round_trip(&SearchScope::default()).unwrap();
            assert!(rt.consistent(), "{name}");
        }
    }
}

/// Points of a sorted line list pairwise at least `delta` apart, greedily.
fn line_packing(xs: &[f64], delta: f64) -> usize {
    let (mut last, mut count) = (f64::NEG_INFINITY, 0);
    for &x in xs {
        if x - last >= delta {
            last = x;
            count += 1;
        }
    }
    count
}

/// Fewest centers with every point strictly within `delta` of one, greedily.
fn line_cover(xs: &[f64], delta: f64) -> usize {
    let (mut i, mut centers) = (0, 0);
    while i < xs.len() {
        let left = xs[i];
        let mut c = i;
        while c + 1 < xs.len() && xs[c + 1] - left < delta {
            c += 1;
        }
        centers += 1;
        while i < xs.len() && xs[i] - xs[c] < delta {
            i += 1;
        }
    }
    centers
}

#[test]
fn doubling_counts_at_n4_match_line_oracles() {
    let e = example_gallery("doubling").unwrap();
    let eps = Q::new(1.into(), 10.into());
    let rel = closeness_relation(&e.entropy_action, &e.k, 4, &eps).unwrap();
    // x ~ y iff |2^k (x - y)| < ε for |k| <= 4, i.e. |x - y| < ε / 16
    let xs: Vec<f64> = (0..=4096).map(|i| i as f64 / 4096.0).collect();
    let delta = 0.1 / 16.0;
    let (s_oracle, r_oracle) = (line_packing(&xs, delta), line_cover(&xs, delta));
    assert_eq!((s_oracle, r_oracle), (158, 81));
    let s = max_separated(&rel, SolveMode::Exact, DEFAULT_NODE_BUDGET);
    let r = unispec::entropy::min_spanning(&rel, SolveMode::Exact, DEFAULT_NODE_BUDGET);
    assert_eq!(s.value, s_oracle);
    assert_eq!(r.value, r_oracle);
    assert!(s.exact && r.exact);
}
