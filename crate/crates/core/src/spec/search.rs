//! Tracing-point search: constructive candidates on shifts, then an
//! exhaustive scan of a declared candidate pool.

use rayon::prelude::*;
use serde::Serialize;

use super::instance::{SpecificationInstance, TracingResult};
use crate::error::{Error, Result};
use crate::exact::Q;
use crate::space::{periodic_candidates, tail_mass, Carrier, CarrierMap, Point, ShiftPoint};

/// Which candidates a search may try.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchScope {
    /// shift points of least period up to this bound are enumerated
    pub period_bound: usize,
    /// only candidates with a finite orbit are accepted
    pub periodic_only: bool,
    pub candidate_cap: usize,
}

impl Default for SearchScope {
    fn default() -> Self {
        SearchScope {
            period_bound: 8,
            periodic_only: false,
            candidate_cap: 1_000_000,
        }
    }
}

impl SearchScope {
    pub fn periodic(mut self) -> Self {
        self.periodic_only = true;
        self
    }

    pub fn with_period_bound(mut self, p: usize) -> Self {
        self.period_bound = p;
        self
    }
}

/// Smallest `w` such that two shift points agreeing on `[-w, w]` are
/// closer than `eps`.
pub fn agreement_radius(eps: &Q) -> u64 {
    let mut w = 0;
    while tail_mass(w + 1) >= *eps {
        w += 1;
    }
    w
}

/// A shift point agreeing with every `(start, symbols)` segment, zero
/// elsewhere; with `periodic`, the periodic extension of the spanned block.
pub fn shift_trace_construct(alphabet: u8, segments: &[(i64, Vec<u8>)], periodic: bool) -> Result<ShiftPoint> {
    let used: Vec<&(i64, Vec<u8>)> = segments.iter().filter(|s| !s.1.is_empty()).collect();
    if used.is_empty() {
        return Err(Error::domain("no segments to realize"));
    }
    let lo = used.iter().map(|s| s.0).min().expect("nonempty");
    let hi = used.iter().map(|s| s.0 + s.1.len() as i64 - 1).max().expect("nonempty");
    let mut block: Vec<Option<u8>> = vec![None; (hi - lo + 1) as usize];
    for (start, symbols) in used {
        for (k, &s) in symbols.iter().enumerate() {
            if s >= alphabet {
                return Err(Error::domain(format!("symbol {s} outside alphabet of size {alphabet}")));
            }
            let index = start + k as i64;
            let slot = &mut block[(index - lo) as usize];
            match slot {
                Some(t) if *t != s => return Err(Error::Conflict { index }),
                _ => *slot = Some(s),
            }
        }
    }
    let block: Vec<u8> = block.into_iter().map(|s| s.unwrap_or(0)).collect();
    if periodic {
        let identity: Vec<u8> = (0..alphabet).collect();
        Ok(ShiftPoint::periodic(&block)?.shifted(-lo, &identity))
    } else {
        Ok(ShiftPoint::block(&block, lo, 0))
    }
}

/// The point that copies each target on the window around each demanded
/// shift. `Ok(Err(reason))` when no such point exists or the carrier has
/// no constructive rule.
fn constructive(
    carrier: &Carrier,
    items: &[(CarrierMap, Point)],
    w: i64,
    periodic: bool,
) -> Result<std::result::Result<Point, String>> {
    match carrier {
        Carrier::Shift { alphabet } => {
            let mut segments = Vec::with_capacity(items.len());
            for (map, target) in items {
                let by = match map {
                    CarrierMap::Identity => 0,
                    CarrierMap::Shift { by, .. } => *by,
                    m => return Ok(Err(format!("map {m} is not a shift"))),
                };
                let Point::Seq(t) = target else {
                    return Ok(Err(format!("target {target} is not a sequence")));
                };
                segments.push((by - w, t.window(by - w, by + w)));
            }
            match shift_trace_construct(*alphabet, &segments, periodic) {
                Ok(p) => Ok(Ok(Point::Seq(p))),
                Err(Error::Conflict { index }) => Ok(Err(format!("conflicting demands at index {index}"))),
                Err(e) => Err(e),
            }
        }
        Carrier::Product(ca, cb) => {
            let mut left = Vec::with_capacity(items.len());
            let mut right = Vec::with_capacity(items.len());
            for (map, target) in items {
                let (f, g) = match map {
                    CarrierMap::Identity => (CarrierMap::Identity, CarrierMap::Identity),
                    CarrierMap::Pair(f, g) => ((**f).clone(), (**g).clone()),
                    m => return Ok(Err(format!("map {m} is not a pair"))),
                };
                let Point::Pair(x, y) = target else {
                    return Ok(Err(format!("target {target} is not a pair")));
                };
                left.push((f, (**x).clone()));
                right.push((g, (**y).clone()));
            }
            let a = constructive(ca, &left, w, periodic)?;
            let b = constructive(cb, &right, w, periodic)?;
            Ok(match (a, b) {
                (Ok(x), Ok(y)) => Ok(Point::pair(x, y)),
                (Err(r), _) | (_, Err(r)) => Err(r),
            })
        }
        c => Ok(Err(format!("no constructive rule for {} carriers", c.kind()))),
    }
}

fn has_shift(carrier: &Carrier) -> bool {
    match carrier {
        Carrier::Shift { .. } => true,
        Carrier::Product(a, b) => has_shift(a) || has_shift(b),
        Carrier::Rescaled { inner, .. } => has_shift(inner),
        _ => false,
    }
}

/// First candidate, in a fixed order, whose orbit follows every segment:
/// constructive candidates first, then the enumerated pool.
pub fn search_tracing_point(inst: &SpecificationInstance, scope: &SearchScope) -> Result<TracingResult> {
    let prepared = inst.prepare()?;
    let carrier = inst.action.carrier();
    let items: Vec<(CarrierMap, Point)> = prepared
        .constraints
        .iter()
        .map(|c| (c.map.clone(), inst.families[c.family].target.clone()))
        .collect();
    let w = agreement_radius(&inst.epsilon) as i64;
    let mut candidates = Vec::new();
    let mut parts = Vec::new();
    for periodic in [false, true] {
        if scope.periodic_only && !periodic {
            continue;
        }
        match constructive(carrier, &items, w, periodic)? {
            Ok(p) => {
                parts.push(if periodic {
                    "periodic constructive candidate".to_string()
                } else {
                    "constructive candidate".to_string()
                });
                candidates.push(p);
            }
            Err(reason) => {
                if has_shift(carrier) {
                    parts.push(format!("no constructive candidate ({reason})"));
                }
                break;
            }
        }
    }
    let mut pool = periodic_candidates(carrier, scope.period_bound.max(1));
    let partial = pool.len() > scope.candidate_cap;
    pool.truncate(scope.candidate_cap);
    let what = if has_shift(carrier) {
        format!("points of least period <= {}", scope.period_bound)
    } else {
        "carrier points".to_string()
    };
    parts.push(format!(
        "{}{} {what}",
        if partial { "first " } else { "all " },
        pool.len()
    ));
    candidates.extend(pool);
    if scope.periodic_only {
        let keep: Vec<bool> = candidates
            .par_iter()
            .map(|x| inst.action.is_periodic(x, inst.orbit_bound))
            .collect::<Result<_>>()?;
        candidates = candidates
            .into_iter()
            .zip(keep)
            .filter(|(_, k)| *k)
            .map(|(x, _)| x)
            .collect();
        parts.push(format!("filtered to orbit size <= {}", inst.orbit_bound));
    }
    let hit = candidates
        .par_iter()
        .find_map_first(|x| match prepared.first_failure(x) {
            Ok(None) => Some(Ok(x.clone())),
            Ok(Some(_)) => None,
            Err(e) => Some(Err(e)),
        })
        .transpose()?;
    let periodic = match &hit {
        Some(x) => inst.action.is_periodic(x, inst.orbit_bound)?,
        None => false,
    };
    Ok(TracingResult {
        found: hit.is_some(),
        verified_constraints: if hit.is_some() { prepared.constraints.len() } else { 0 },
        witness: hit,
        periodic,
        failure: None,
        search_scope: parts.join(", "),
        truncated_at: inst.is_truncated().then_some(inst.truncation),
        partial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q_frac, q_pow2};
    use crate::group::{GroupElement, GroupSpec, GroupSubset};
    use crate::space::Action;
    use crate::spec::instance::{verify_trace, OrbitSegment, SeparationMode};

    fn shift_action() -> Action {
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

    #[test]
    fn construct_single_segment() {
        let p = shift_trace_construct(2, &[(0, vec![0, 1, 1])], false).unwrap();
        assert_eq!(p, ShiftPoint::block(&[0, 1, 1], 0, 0));
        assert_eq!(p.window(-2, 4), vec![0, 0, 0, 1, 1, 0, 0]);
    }

    #[test]
    fn construct_periodic_extension() {
        let p = shift_trace_construct(2, &[(0, vec![1]), (5, vec![0])], true).unwrap();
        assert_eq!(p.period(), Some(6));
        assert_eq!(p.symbol(0), 1);
        assert_eq!(p.symbol(6), 1);
        assert_eq!(p.symbol(-6), 1);
        let action = shift_action();
        let orbit = action.orbit(&Point::Seq(p), 6).unwrap().unwrap();
        assert_eq!(orbit.len(), 6);
    }

    #[test]
    fn construct_reports_conflict_index() {
        let e = shift_trace_construct(2, &[(3, vec![0]), (2, vec![1, 1])], false).unwrap_err();
        assert!(matches!(e, Error::Conflict { index: 3 }));
        assert!(shift_trace_construct(2, &[], false).is_err());
    }

    /// Brute force over all agreement patterns on `[-R, R]` with constant
    /// tails of the differing kind, the worst case for the distance.
    #[test]
    fn agreement_radius_is_sufficient_and_tight() {
        for k in 1..=3 {
            let eps = q_pow2(-k);
            let w = agreement_radius(&eps) as i64;
            let zero = ShiftPoint::constant(0);
            // agreeing on [-w, w] and differing everywhere else
            let far = ShiftPoint::new(vec![1], vec![0; (2 * w + 1) as usize], vec![1], -w).unwrap();
            assert!(zero.distance(&far) < eps);
            // one index less is not enough
            let near = ShiftPoint::new(vec![1], vec![0; (2 * w - 1).max(0) as usize], vec![1], -(w - 1)).unwrap();
            assert!(w == 0 || zero.distance(&near) >= eps);
        }
        assert_eq!(agreement_radius(&q_frac(1, 2)), 3);
    }

    #[test]
    fn far_apart_windows_trace_constructively() {
        let zero = Point::Seq(ShiftPoint::constant(0));
        let one = Point::Seq(ShiftPoint::constant(1));
        let inst = SpecificationInstance::new(
            shift_action(),
            q_frac(1, 2),
            6,
            vec![
                OrbitSegment::new(interval(0, 2), zero),
                OrbitSegment::new(interval(9, 11), one),
            ],
            SeparationMode::MinDistance,
            None,
        )
        .unwrap();
        let r = search_tracing_point(&inst, &SearchScope::default()).unwrap();
        assert!(r.found);
        assert!(r.search_scope.starts_with("constructive candidate"));
        let again = verify_trace(&inst, r.witness.as_ref().unwrap()).unwrap();
        assert!(again.found);
        let p = search_tracing_point(&inst, &SearchScope::default().periodic()).unwrap();
        assert!(p.found && p.periodic);
    }

    #[test]
    fn trivial_action_with_equal_targets_returns_first_point() {
        let action = Action::trivial(
            "trivial",
            GroupSpec::integers(),
            Carrier::Finite(crate::space::FiniteMetric::discrete(3).unwrap()),
        )
        .unwrap();
        let inst = SpecificationInstance::new(
            action,
            q_frac(1, 2),
            1,
            vec![
                OrbitSegment::new(interval(0, 0), Point::Index(2)),
                OrbitSegment::new(interval(5, 6), Point::Index(2)),
            ],
            SeparationMode::Hausdorff,
            None,
        )
        .unwrap();
        let r = search_tracing_point(&inst, &SearchScope::default()).unwrap();
        assert_eq!(r.witness, Some(Point::Index(2)));
    }
}
