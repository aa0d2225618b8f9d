//! Separated sets built from two specification points: one tracing point
//! per binary target tuple.

use serde::Serialize;

use crate::entropy::{closeness_relation, max_separated, SolveMode};
use crate::error::{Error, Result};
use crate::exact::{q_int, q_serde, Q};
use crate::group::{Dist, GroupElement, GroupSubset};
use crate::space::{Action, Point};
use crate::spec::{search_tracing_point, OrbitSegment, SearchScope, SeparationMode, SpecificationInstance};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoPointBound {
    pub n: usize,
    /// `M = max(c_x, c_y)`
    pub m: u64,
    #[serde(with = "q_serde")]
    pub epsilon: Q,
    pub generator: GroupElement,
    /// word distance between consecutive index sets `{s^{M(i-1)}}`
    pub spacing: Dist,
    pub tuples: usize,
    pub traced: usize,
    /// first tuple (bit `i` set means target `y` at position `i`) without a trace
    pub failing_tuple: Option<Vec<u8>>,
    pub witnesses: Vec<Point>,
    /// the witnesses form an `(nM, U_ε)`-separated set
    pub pairwise_separated: bool,
    /// maximum separated subset of the witnesses, from the exact solver
    pub exact_count: usize,
    pub exact: bool,
    /// `log 2 / M`
    pub rate_bound: f64,
    /// `log(exact_count) / (nM)`
    pub implied_rate: f64,
}

impl TwoPointBound {
    /// `2^n` traced, pairwise separated witnesses and an exact count of at least `2^n`.
    pub fn confirmed(&self) -> bool {
        self.traced == self.tuples && self.pairwise_separated && self.exact && self.exact_count >= self.tuples
    }
}

/// For every tuple `τ ∈ {x, y}^n` finds a point tracing `τ_i` along
/// `Λ_i = {s^{M(i-1)}}`, anchored at `τ_1`, and checks that the tracing
/// points are pairwise `(nM, U_ε)`-separated.
#[allow(clippy::too_many_arguments)]
pub fn two_point_entropy_bound(
    action: &Action,
    x: &Point,
    y: &Point,
    epsilon: &Q,
    c_x: u64,
    c_y: u64,
    n: usize,
    s: &GroupElement,
    scope: &SearchScope,
) -> Result<TwoPointBound> {
    let group = action.group();
    let carrier = action.carrier();
    if !group.generators().contains(s) {
        return Err(Error::domain(format!("{s} is not a listed generator")));
    }
    if let Some(k) = group.element_order(s)? {
        return Err(Error::domain(format!("{s} has finite order {k}")));
    }
    if carrier.distance(x, y)? < q_int(2) * epsilon {
        return Err(Error::domain("the two points must be at least 2ε apart"));
    }
    if n > 20 {
        return Err(Error::ResourceLimit {
            what: "target tuples".into(),
            cap: 1 << 20,
        });
    }
    let m = c_x.max(c_y);
    let lambdas: Vec<GroupSubset> = (0..n)
        .map(|i| Ok(GroupSubset::finite(vec![group.pow(s, (m * i as u64) as i64)?])))
        .collect::<Result<_>>()?;
    let spacing = if n >= 2 {
        group.hausdorff_distance(&lambdas[0], &lambdas[1])?
    } else {
        Dist::Infinite
    };
    let tuples = if n == 0 { 1 } else { 1usize << n };
    let mut witnesses = Vec::new();
    let mut failing_tuple = None;
    if n == 0 {
        witnesses.push(x.clone());
    }
    for code in 0..(if n == 0 { 0 } else { tuples }) {
        let bits: Vec<u8> = (0..n).map(|i| (code >> i & 1) as u8).collect();
        let families: Vec<OrbitSegment> = lambdas
            .iter()
            .zip(&bits)
            .map(|(l, &b)| OrbitSegment::new(l.clone(), if b == 0 { x.clone() } else { y.clone() }))
            .collect();
        let anchor = families[0].target.clone();
        // consecutive index sets sit at distance |s^M|, which may equal M
        let inst = SpecificationInstance::unchecked(
            action.clone(),
            epsilon.clone(),
            m,
            families,
            SeparationMode::Hausdorff,
            Some(anchor),
        );
        let r = search_tracing_point(&inst, scope)?;
        match r.witness {
            Some(w) => witnesses.push(w),
            None => {
                if failing_tuple.is_none() {
                    failing_tuple = Some(bits);
                }
            }
        }
    }
    let traced = if n == 0 { 1 } else { witnesses.len() };
    let radius = n * m as usize;
    let (pairwise_separated, exact_count, exact) = if witnesses.is_empty() {
        (false, 0, true)
    } else {
        let rel = closeness_relation(action, &witnesses, radius, epsilon)?;
        let all: Vec<usize> = (0..witnesses.len()).collect();
        let count = max_separated(&rel, SolveMode::Exact, crate::entropy::DEFAULT_NODE_BUDGET);
        (rel.is_separated(&all), count.value, count.exact)
    };
    let rate_bound = if m == 0 {
        f64::INFINITY
    } else {
        std::f64::consts::LN_2 / m as f64
    };
    let implied_rate = if radius == 0 {
        0.0
    } else {
        (exact_count.max(1) as f64).ln() / radius as f64
    };
    Ok(TwoPointBound {
        n,
        m,
        epsilon: epsilon.clone(),
        generator: s.clone(),
        spacing,
        tuples,
        traced,
        failing_tuple,
        witnesses,
        pairwise_separated,
        exact_count,
        exact,
        rate_bound,
        implied_rate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q_frac;
    use crate::group::{Family, GroupSpec};
    use crate::space::{Carrier, CarrierMap, ShiftPoint};

    fn shift_with(gens: &[i64]) -> Action {
        let group = GroupSpec::new(
            Family::FreeAbelian(1),
            gens.iter().map(|&k| GroupElement::Vector(vec![k])).collect(),
        )
        .unwrap();
        let maps = gens.iter().map(|&k| CarrierMap::shift_by(k, 2)).collect();
        Action::build("shift", group, Carrier::shift(2).unwrap(), maps).unwrap()
    }

    fn zero_one() -> (Point, Point) {
        (Point::Seq(ShiftPoint::constant(0)), Point::Seq(ShiftPoint::constant(1)))
    }

    #[test]
    fn wide_generator_gives_all_tuples() {
        let (x, y) = zero_one();
        let a = shift_with(&[1, -1, 2, -2]);
        let s = GroupElement::Vector(vec![2]);
        let r = two_point_entropy_bound(&a, &x, &y, &q_frac(1, 2), 4, 4, 3, &s, &SearchScope::default()).unwrap();
        assert!(r.confirmed());
        assert_eq!(r.exact_count, 8);
        assert_eq!(r.spacing, Dist::Finite(4));
        assert!(r.implied_rate >= r.rate_bound - 1e-12);
    }

    #[test]
    fn unit_shift_with_spacing_four_leaves_a_failing_tuple() {
        let (x, y) = zero_one();
        let a = shift_with(&[1, -1]);
        let s = GroupElement::Vector(vec![1]);
        let scope = SearchScope::default().with_period_bound(4);
        let r = two_point_entropy_bound(&a, &x, &y, &q_frac(1, 2), 4, 4, 3, &s, &scope).unwrap();
        assert!(!r.confirmed());
        // different targets four steps apart need overlapping agreement windows
        assert_eq!(r.failing_tuple, Some(vec![1, 0, 0]));
    }

    #[test]
    fn zero_tuples_is_one_witness() {
        let (x, y) = zero_one();
        let a = shift_with(&[1, -1]);
        let r = two_point_entropy_bound(
            &a,
            &x,
            &y,
            &q_frac(1, 2),
            4,
            4,
            0,
            &GroupElement::Vector(vec![1]),
            &SearchScope::default(),
        )
        .unwrap();
        assert_eq!(r.traced, 1);
        assert_eq!(r.witnesses.len(), 1);
    }

    #[test]
    fn close_points_are_rejected() {
        let a = shift_with(&[1, -1]);
        let x = Point::Seq(ShiftPoint::constant(0));
        let y = Point::Seq(ShiftPoint::block(&[1], 6, 0));
        assert!(two_point_entropy_bound(
            &a,
            &x,
            &y,
            &q_frac(1, 2),
            1,
            1,
            2,
            &GroupElement::Vector(vec![1]),
            &SearchScope::default()
        )
        .is_err());
    }
}
