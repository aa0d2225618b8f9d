//! Moving specification instances along cyclic restrictions, diagonal
//! products and isometric conjugacies.

use serde::Serialize;

use super::instance::{verify_trace, OrbitSegment, SeparationMode, SpecificationInstance, TracingResult};
use super::search::{search_tracing_point, SearchScope};
use crate::error::{Error, Result};
use crate::exact::Q;
use crate::group::{GroupElement, GroupSubset};
use crate::space::{Action, Carrier, CarrierMap, Point};

/// Blocks `Λ_i = { g^j : o_i <= j <= o_i + n_i }` with offsets
/// `o_i = Σ_{m<i} (p_m + n_m)`, and the targets shifted back by `g^{-o_i}`.
#[derive(Debug, Clone, Serialize)]
pub struct CyclicBlocks {
    pub generator: GroupElement,
    pub lengths: Vec<u64>,
    pub offsets: Vec<u64>,
    /// the classical orbit-segment starting points `y_i`
    pub points: Vec<Point>,
    pub instance: SpecificationInstance,
}

#[allow(clippy::too_many_arguments)]
pub fn cyclic_restriction_instance(
    action: &Action,
    g: &GroupElement,
    points: &[Point],
    lengths: &[u64],
    gaps: &[u64],
    c: u64,
    epsilon: Q,
    mode: SeparationMode,
) -> Result<CyclicBlocks> {
    let group = action.group();
    if let Some(k) = group.element_order(g)? {
        return Err(Error::domain(format!("{g} has finite order {k}")));
    }
    if points.len() != lengths.len() || points.is_empty() {
        return Err(Error::domain("one block length per point is required"));
    }
    if gaps.len() + 1 < lengths.len() {
        return Err(Error::domain("a gap is required between consecutive blocks"));
    }
    if let Some(p) = gaps[..lengths.len() - 1].iter().find(|&&p| p < c + 1) {
        return Err(Error::domain(format!("gap {p} is below c + 1 = {}", c + 1)));
    }
    let mut offsets = Vec::with_capacity(lengths.len());
    let mut o = 0u64;
    for (i, &n) in lengths.iter().enumerate() {
        offsets.push(o);
        if i + 1 < lengths.len() {
            o += gaps[i] + n;
        }
    }
    let mut families = Vec::with_capacity(points.len());
    for ((&n, &o), y) in lengths.iter().zip(&offsets).zip(points) {
        let lambda = (o..=o + n)
            .map(|j| group.pow(g, j as i64))
            .collect::<Result<Vec<_>>>()?;
        let back = group.pow(g, -(o as i64))?;
        let target = action.apply(&back, y)?;
        families.push(OrbitSegment::new(GroupSubset::finite(lambda), target));
    }
    let instance = SpecificationInstance::new(action.clone(), epsilon, c, families, mode, None)?;
    Ok(CyclicBlocks {
        generator: g.clone(),
        lengths: lengths.to_vec(),
        offsets,
        points: points.to_vec(),
        instance,
    })
}

impl CyclicBlocks {
    /// `d(f^{o_i + t}(x), f^t(y_i)) < ε` for `0 <= t <= n_i`, by iterating
    /// `f = Φ_g` one step at a time.
    pub fn classical_check(&self, x: &Point) -> Result<bool> {
        let action = &self.instance.action;
        let carrier = action.carrier();
        let f = action.map_for(&self.generator)?;
        for ((&n, &o), y) in self.lengths.iter().zip(&self.offsets).zip(&self.points) {
            let mut a = x.clone();
            for _ in 0..o {
                a = f.apply_in(carrier, &a)?;
            }
            let mut b = y.clone();
            for t in 0..=n {
                if !carrier.within(&a, &b, &self.instance.epsilon)? {
                    return Ok(false);
                }
                if t < n {
                    a = f.apply_in(carrier, &a)?;
                    b = f.apply_in(carrier, &b)?;
                }
            }
        }
        Ok(true)
    }

    /// Searches the group-action instance and re-checks any trace by
    /// direct iteration.
    pub fn round_trip(&self, scope: &SearchScope) -> Result<CyclicRoundTrip> {
        let trace = search_tracing_point(&self.instance, scope)?;
        let classical = trace.witness.as_ref().map(|x| self.classical_check(x)).transpose()?;
        Ok(CyclicRoundTrip { trace, classical })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CyclicRoundTrip {
    pub trace: TracingResult,
    /// `None` when no trace was found
    pub classical: Option<bool>,
}

impl CyclicRoundTrip {
    pub fn consistent(&self) -> bool {
        self.classical != Some(false)
    }
}

fn finite_len(c: &Carrier) -> Option<usize> {
    match c {
        Carrier::Finite(f) => Some(f.len()),
        _ => None,
    }
}

/// Point of the product carrier built by `Carrier::product`.
pub fn combine(ca: &Carrier, cb: &Carrier, x: &Point, y: &Point) -> Result<Point> {
    match (finite_len(ca), finite_len(cb), x, y) {
        (Some(_), Some(m), Point::Index(i), Point::Index(j)) => Ok(Point::Index(i * m + j)),
        (Some(_), Some(_), _, _) => Err(Error::mismatch(format!("{x} and {y} are not finite-carrier points"))),
        _ => Ok(Point::pair(x.clone(), y.clone())),
    }
}

pub fn project(ca: &Carrier, cb: &Carrier, p: &Point) -> Result<(Point, Point)> {
    match (finite_len(ca), finite_len(cb), p) {
        (Some(_), Some(m), Point::Index(k)) => Ok((Point::Index(k / m), Point::Index(k % m))),
        (_, _, Point::Pair(x, y)) => Ok(((**x).clone(), (**y).clone())),
        _ => Err(Error::mismatch(format!("{p} is not a product point"))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductTransfer {
    pub product: TracingResult,
    /// factor searches at the product's ε
    pub left: TracingResult,
    pub right: TracingResult,
    /// the product witness projects to traces of both original instances
    pub projections_verified: Option<bool>,
    /// the factor witnesses combine to a trace of the product instance
    pub combination_verified: Option<bool>,
    /// combined witness of two periodic factor witnesses is periodic
    pub periodic_combination: Option<bool>,
}

impl ProductTransfer {
    /// product traced iff both factors traced, and every check that ran passed
    pub fn consistent(&self) -> bool {
        self.product.found == (self.left.found && self.right.found)
            && self.projections_verified != Some(false)
            && self.combination_verified != Some(false)
            && self.periodic_combination != Some(false)
    }
}

/// Instance for the diagonal action at `ε = min(ε_U, ε_V)` and
/// `c = max(c_U, c_V)`, searched alongside both factors.
pub fn product_spec_transfer(
    a: &SpecificationInstance,
    b: &SpecificationInstance,
    scope: &SearchScope,
) -> Result<ProductTransfer> {
    if a.action.group() != b.action.group() {
        return Err(Error::mismatch("factor instances use different groups"));
    }
    if a.lambdas() != b.lambdas() {
        return Err(Error::mismatch("factor instances use different index sets"));
    }
    if a.mode != b.mode {
        return Err(Error::mismatch("factor instances use different separation modes"));
    }
    let (ca, cb) = (a.action.carrier(), b.action.carrier());
    let action = a.action.diagonal_product(&b.action)?;
    let epsilon = a.epsilon.clone().min(b.epsilon.clone());
    let families = a
        .families
        .iter()
        .zip(&b.families)
        .map(|(fa, fb)| {
            Ok(OrbitSegment::new(
                fa.lambda.clone(),
                combine(ca, cb, &fa.target, &fb.target)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let anchor = match (&a.anchor, &b.anchor) {
        (Some(x), Some(y)) => Some(combine(ca, cb, x, y)?),
        _ => None,
    };
    let inst = SpecificationInstance::new(
        action,
        epsilon.clone(),
        a.constant_c.max(b.constant_c),
        families,
        a.mode,
        anchor,
    )?
    .with_truncation(a.truncation.max(b.truncation))
    .with_orbit_bound(a.orbit_bound.saturating_mul(b.orbit_bound));
    let mut fa = a.clone();
    fa.epsilon = epsilon.clone();
    let mut fb = b.clone();
    fb.epsilon = epsilon;
    let product = search_tracing_point(&inst, scope)?;
    let left = search_tracing_point(&fa, scope)?;
    let right = search_tracing_point(&fb, scope)?;
    let projections_verified = match &product.witness {
        Some(w) => {
            let (x, y) = project(ca, cb, w)?;
            Some(verify_trace(a, &x)?.found && verify_trace(b, &y)?.found)
        }
        None => None,
    };
    let (combination_verified, periodic_combination) = match (&left.witness, &right.witness) {
        (Some(x), Some(y)) => {
            let w = combine(ca, cb, x, y)?;
            let r = verify_trace(&inst, &w)?;
            let periodic = (left.periodic && right.periodic).then_some(r.periodic);
            (Some(r.found), periodic)
        }
        _ => (None, None),
    };
    Ok(ProductTransfer {
        product,
        left,
        right,
        projections_verified,
        combination_verified,
        periodic_combination,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjugacyTransfer {
    pub original: TracingResult,
    pub transformed: TracingResult,
    /// `T(x)` traces the transformed instance for the original witness `x`
    pub forward: Option<bool>,
    /// `T⁻¹(x')` traces the original instance for the transformed witness `x'`
    pub backward: Option<bool>,
    /// carrier points compared one by one (finite carriers only)
    pub scanned: usize,
    pub mismatches: usize,
}

impl ConjugacyTransfer {
    pub fn equivalent(&self) -> bool {
        self.original.found == self.transformed.found
            && self.forward != Some(false)
            && self.backward != Some(false)
            && self.mismatches == 0
    }
}

/// Moves the instance along an isometry `T` and checks that tracing is
/// preserved in both directions. Permutations of finite carriers qualify
/// since the conjugate action carries the metric along.
pub fn conjugacy_spec_transfer(
    inst: &SpecificationInstance,
    t: &CarrierMap,
    scope: &SearchScope,
) -> Result<ConjugacyTransfer> {
    let carrier = inst.action.carrier();
    let transported = matches!((t, carrier), (CarrierMap::Permutation(_), Carrier::Finite(_)));
    if !transported && !t.is_isometry(carrier)? {
        return Err(Error::NotIsometric(format!(
            "{t} changes distances; a general uniform equivalence needs an ε adjustment"
        )));
    }
    let conj = inst.action.conjugate(t)?;
    let t_inv = t.inverse()?;
    let families = inst
        .families
        .iter()
        .map(|f| Ok(OrbitSegment::new(f.lambda.clone(), t.apply(&f.target)?)))
        .collect::<Result<Vec<_>>>()?;
    let anchor = inst.anchor.as_ref().map(|z| t.apply(z)).transpose()?;
    let image = SpecificationInstance::new(conj, inst.epsilon.clone(), inst.constant_c, families, inst.mode, anchor)?
        .with_truncation(inst.truncation)
        .with_orbit_bound(inst.orbit_bound);
    let original = search_tracing_point(inst, scope)?;
    let transformed = search_tracing_point(&image, scope)?;
    let forward = original
        .witness
        .as_ref()
        .map(|x| Ok::<_, Error>(verify_trace(&image, &t.apply(x)?)?.found))
        .transpose()?;
    let backward = transformed
        .witness
        .as_ref()
        .map(|x| Ok::<_, Error>(verify_trace(inst, &t_inv.apply(x)?)?.found))
        .transpose()?;
    let (mut scanned, mut mismatches) = (0, 0);
    if let Some(points) = carrier.points() {
        if points.len() <= scope.candidate_cap {
            let pa = inst.prepare()?;
            let pb = image.prepare()?;
            for x in &points {
                scanned += 1;
                let lhs = pa.first_failure(x)?.is_none();
                let rhs = pb.first_failure(&t.apply(x)?)?.is_none();
                if lhs != rhs {
                    mismatches += 1;
                }
            }
        }
    }
    Ok(ConjugacyTransfer {
        original,
        transformed,
        forward,
        backward,
        scanned,
        mismatches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q_frac, Dyadic};
    use crate::group::{Dist, GroupSpec};
    use crate::space::{FiniteMetric, IntervalGrid, ShiftPoint};

    fn shift_action() -> Action {
        Action::build(
            "shift",
            GroupSpec::integers(),
            Carrier::shift(2).unwrap(),
            vec![CarrierMap::shift_by(1, 2), CarrierMap::shift_by(-1, 2)],
        )
        .unwrap()
    }

    fn v(k: i64) -> GroupElement {
        GroupElement::Vector(vec![k])
    }

    #[test]
    fn blocks_follow_the_offset_formula() {
        let pts = vec![Point::Seq(ShiftPoint::constant(0)), Point::Seq(ShiftPoint::constant(1))];
        let cb = cyclic_restriction_instance(
            &shift_action(),
            &v(1),
            &pts,
            &[2, 1],
            &[3, 3],
            2,
            q_frac(1, 2),
            SeparationMode::MinDistance,
        )
        .unwrap();
        assert_eq!(cb.offsets, vec![0, 5]);
        assert_eq!(
            cb.instance.families[0].lambda,
            GroupSubset::finite(vec![v(0), v(1), v(2)])
        );
        assert_eq!(cb.instance.families[1].lambda, GroupSubset::finite(vec![v(5), v(6)]));
        let sep = cb.instance.separation().unwrap();
        assert_eq!(sep.distances[0].distance, Dist::Finite(3));
    }

    #[test]
    fn finite_order_and_short_gaps_are_rejected() {
        let c4 = Action::trivial(
            "c4",
            GroupSpec::from_name("C4").unwrap(),
            Carrier::Finite(FiniteMetric::discrete(2).unwrap()),
        )
        .unwrap();
        let pts = vec![Point::Index(0)];
        assert!(cyclic_restriction_instance(
            &c4,
            &GroupElement::Index(1),
            &pts,
            &[1],
            &[],
            0,
            q_frac(1, 2),
            SeparationMode::Hausdorff
        )
        .is_err());
        let pts = vec![Point::Seq(ShiftPoint::constant(0)), Point::Seq(ShiftPoint::constant(1))];
        assert!(cyclic_restriction_instance(
            &shift_action(),
            &v(1),
            &pts,
            &[2, 1],
            &[2],
            2,
            q_frac(1, 2),
            SeparationMode::MinDistance
        )
        .is_err());
    }

    #[test]
    fn cyclic_round_trip_on_the_shift() {
        let pts = vec![
            Point::Seq(ShiftPoint::block(&[1, 1, 0, 1], 0, 0)),
            Point::Seq(ShiftPoint::constant(1)),
        ];
        let cb = cyclic_restriction_instance(
            &shift_action(),
            &v(1),
            &pts,
            &[3, 2],
            &[8],
            7,
            q_frac(1, 2),
            SeparationMode::MinDistance,
        )
        .unwrap();
        let rt = cb.round_trip(&SearchScope::default()).unwrap();
        assert!(rt.trace.found);
        assert_eq!(rt.classical, Some(true));
    }

    #[test]
    fn shift_products_combine_and_project() {
        let zero = Point::Seq(ShiftPoint::constant(0));
        let one = Point::Seq(ShiftPoint::constant(1));
        let lam = |a: i64, b: i64| GroupSubset::finite((a..=b).map(v).collect());
        let mk = |x: &Point, y: &Point| {
            SpecificationInstance::new(
                shift_action(),
                q_frac(1, 2),
                6,
                vec![
                    OrbitSegment::new(lam(0, 1), x.clone()),
                    OrbitSegment::new(lam(9, 10), y.clone()),
                ],
                SeparationMode::MinDistance,
                None,
            )
            .unwrap()
        };
        let scope = SearchScope::default().with_period_bound(2);
        let r = product_spec_transfer(&mk(&zero, &one), &mk(&one, &zero), &scope).unwrap();
        assert!(r.product.found && r.left.found && r.right.found);
        assert_eq!(r.projections_verified, Some(true));
        assert_eq!(r.combination_verified, Some(true));
        assert!(r.consistent());
    }

    #[test]
    fn reflection_preserves_tracing_on_the_translation_grid() {
        let d = |s: &str| s.parse::<Dyadic>().unwrap();
        let grid = Carrier::Grid(IntervalGrid::new(d("0"), d("1"), d("1/8"), d("-64"), d("64")).unwrap());
        let action = Action::build(
            "translation",
            GroupSpec::integers(),
            grid,
            vec![CarrierMap::translation(d("2")), CarrierMap::translation(d("-2"))],
        )
        .unwrap();
        let inst = SpecificationInstance::new(
            action,
            q_frac(1, 4),
            2,
            vec![
                OrbitSegment::new(GroupSubset::finite(vec![v(0)]), Point::Real(d("1/4"))),
                OrbitSegment::new(GroupSubset::finite(vec![v(3)]), Point::Real(d("3/8"))),
            ],
            SeparationMode::Hausdorff,
            None,
        )
        .unwrap();
        let t = CarrierMap::affine(d("-1"), d("1"));
        let r = conjugacy_spec_transfer(&inst, &t, &SearchScope::default()).unwrap();
        assert!(r.original.found);
        assert_eq!(r.scanned, 9);
        assert!(r.equivalent());
        let stretch = CarrierMap::affine(d("2"), d("0"));
        assert!(matches!(
            conjugacy_spec_transfer(&inst, &stretch, &SearchScope::default()),
            Err(Error::NotIsometric(_))
        ));
    }
}
