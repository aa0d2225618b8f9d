//! Validated group actions on carriers.

use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use super::carrier::{Carrier, FiniteMetric, IntervalGrid, Point};
use super::maps::CarrierMap;
use super::shift::ShiftPoint;
use crate::error::{Error, Result};
use crate::exact::Q;
use crate::group::{Family, GroupElement, GroupSpec, WordBall};

/// Default radius of the ball on which relations are checked for infinite
/// groups. Radius 2 covers every commutator of two generators.
pub const DEFAULT_RELATION_RADIUS: usize = 2;

/// A homomorphism from a finitely generated group into the closed-form
/// bijections of a carrier.
#[derive(Debug, Clone, Serialize)]
pub struct Action {
    name: String,
    group: GroupSpec,
    carrier: Carrier,
    maps: Vec<CarrierMap>,
    conjugacy: Option<CarrierMap>,
}

impl Action {
    pub fn build(name: impl Into<String>, group: GroupSpec, carrier: Carrier, maps: Vec<CarrierMap>) -> Result<Action> {
        Self::build_with_radius(name, group, carrier, maps, DEFAULT_RELATION_RADIUS)
    }

    /// Builds and validates: bijectivity, inverse generators mapping to
    /// inverse maps, and consistency along every Cayley-graph edge inside
    /// the ball of the given radius (the whole group when finite).
    pub fn build_with_radius(
        name: impl Into<String>,
        group: GroupSpec,
        carrier: Carrier,
        maps: Vec<CarrierMap>,
        radius: usize,
    ) -> Result<Action> {
        if maps.len() != group.generators().len() {
            return Err(Error::domain(format!(
                "{} generator maps given for {} generators",
                maps.len(),
                group.generators().len()
            )));
        }
        for m in &maps {
            m.validate(&carrier)?;
        }
        for (i, m) in maps.iter().enumerate() {
            let j = group.inverse_generator(i);
            let round_trip = m.compose(&maps[j])?;
            if !round_trip.is_identity() {
                return Err(Error::InverseMismatch {
                    generator: i,
                    detail: format!("{} ∘ {} = {round_trip}, expected the identity", m, maps[j]),
                });
            }
        }
        let action = Action {
            name: name.into(),
            group,
            carrier,
            maps,
            conjugacy: None,
        };
        action.check_relations(radius)?;
        Ok(action)
    }

    /// Every generator acts as the identity.
    pub fn trivial(name: impl Into<String>, group: GroupSpec, carrier: Carrier) -> Result<Action> {
        let maps = vec![CarrierMap::Identity; group.generators().len()];
        Self::build(name, group, carrier, maps)
    }

    fn check_relations(&self, radius: usize) -> Result<()> {
        let ball = if self.group.is_finite() {
            let mut b = self.group.word_ball(0)?;
            while b.radius() < radius.max(1) || !b.frontier().is_empty() {
                let before = b.len();
                b = self.group.word_ball(b.radius() + 1)?;
                if b.len() == before {
                    break;
                }
            }
            b
        } else {
            self.group.word_ball(radius)?
        };
        let ball_maps = self.ball_maps(&ball)?;
        for (i, g) in ball.elements().iter().enumerate() {
            for (j, s) in self.group.generators().iter().enumerate() {
                let h = self.group.op(g, s)?;
                let Some(k) = ball.position(&h) else { continue };
                let via_edge = ball_maps[i].compose(&self.maps[j])?;
                if let Some(w) = via_edge.disagreement(&ball_maps[k], &self.carrier)? {
                    return Err(Error::RelationViolation {
                        relation: format!("Φ_{g} ∘ Φ_{s} = Φ_{h}"),
                        witness: w.to_string(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn generator_maps(&self) -> &[CarrierMap] {
        &self.maps
    }

    /// The conjugating map, when this action was produced by `conjugate`.
    pub fn conjugacy(&self) -> Option<&CarrierMap> {
        self.conjugacy.as_ref()
    }

    /// Closed-form map of every element of the ball, in ball order.
    pub fn ball_maps(&self, ball: &WordBall) -> Result<Vec<CarrierMap>> {
        let mut out: Vec<CarrierMap> = Vec::with_capacity(ball.len());
        for i in 0..ball.len() {
            let m = match ball.parent(i) {
                None => CarrierMap::Identity,
                Some((p, s)) => out[p].compose(&self.maps[s])?,
            };
            out.push(m);
        }
        Ok(out)
    }

    fn generator_position(&self, g: &GroupElement) -> Option<usize> {
        self.group.generators().iter().position(|h| h == g)
    }

    /// Closed-form `Φ_g`.
    pub fn map_for(&self, g: &GroupElement) -> Result<CarrierMap> {
        self.group.check_element(g)?;
        if self.group.is_standard() {
            match (self.group.family(), g) {
                (Family::FreeAbelian(d), GroupElement::Vector(v)) => {
                    let mut acc = CarrierMap::Identity;
                    for (i, &c) in v.iter().enumerate() {
                        if c == 0 {
                            continue;
                        }
                        let mut unit = vec![0; *d];
                        unit[i] = c.signum();
                        let pos = self
                            .generator_position(&GroupElement::Vector(unit))
                            .expect("standard generators present");
                        acc = acc.compose(&power(&self.maps[pos], c.unsigned_abs())?)?;
                    }
                    return Ok(acc);
                }
                (Family::Free(_), GroupElement::Word(w)) => {
                    let mut acc = CarrierMap::Identity;
                    for &l in w {
                        let pos = self
                            .generator_position(&GroupElement::Word(vec![l]))
                            .expect("standard generators present");
                        acc = acc.compose(&self.maps[pos])?;
                    }
                    return Ok(acc);
                }
                (Family::CyclicFinite(_), GroupElement::Index(k)) => {
                    if let Some(pos) = self.generator_position(&GroupElement::Index(1)) {
                        return power(&self.maps[pos], *k as u64);
                    }
                }
                _ => {}
            }
        }
        let mut ball = self.group.word_ball(0)?;
        while !ball.contains(g) {
            let next = self.group.word_ball(ball.radius() + 1)?;
            if next.len() == ball.len() {
                return Err(Error::domain(format!("{g} is not generated")));
            }
            ball = next;
        }
        let mut acc = CarrierMap::Identity;
        for j in ball.word(g).expect("element in ball") {
            acc = acc.compose(&self.maps[j])?;
        }
        Ok(acc)
    }

    /// `Φ_g(x)`, with ambient-range checking on grids.
    pub fn apply(&self, g: &GroupElement, x: &Point) -> Result<Point> {
        self.carrier.check_point(x)?;
        self.map_for(g)?.apply_in(&self.carrier, x)
    }

    /// `Φ × Ψ` acting diagonally on the max-metric product.
    pub fn diagonal_product(&self, other: &Action) -> Result<Action> {
        if self.group != other.group {
            return Err(Error::mismatch(format!(
                "product of actions of {} and {}",
                self.group.family_name(),
                other.group.family_name()
            )));
        }
        let carrier = Carrier::product(&self.carrier, &other.carrier)?;
        let maps = match (&self.carrier, &other.carrier) {
            (Carrier::Finite(a), Carrier::Finite(b)) => {
                let (n, m) = (a.len(), b.len());
                self.maps
                    .iter()
                    .zip(&other.maps)
                    .map(|(f, g)| {
                        let pf = as_permutation(f, n);
                        let pg = as_permutation(g, m);
                        CarrierMap::Permutation((0..n * m).map(|k| pf[k / m] * m + pg[k % m]).collect())
                    })
                    .collect()
            }
            _ => self
                .maps
                .iter()
                .zip(&other.maps)
                .map(|(f, g)| CarrierMap::pair(f.clone(), g.clone()))
                .collect(),
        };
        Action::build(
            format!("{}×{}", self.name, other.name),
            self.group.clone(),
            carrier,
            maps,
        )
    }

    /// `Ψ_g = T ∘ Φ_g ∘ T⁻¹` on the image carrier `T(X)`. A permutation of a
    /// finite carrier carries the metric along, so `T` is an isometry.
    pub fn conjugate(&self, t: &CarrierMap) -> Result<Action> {
        t.validate(&self.carrier)?;
        let t_inv = t.inverse()?;
        let carrier = image_carrier(t, &self.carrier)?;
        let maps = self
            .maps
            .iter()
            .map(|m| t.compose(m)?.compose(&t_inv))
            .collect::<Result<Vec<_>>>()?;
        let mut out = Action::build(format!("T·{}·T⁻¹", self.name), self.group.clone(), carrier, maps)?;
        out.conjugacy = Some(t.clone());
        Ok(out)
    }

    /// The ℤ-action `j ↦ Φ_{s^j}` of the cyclic subgroup generated by `s`.
    pub fn cyclic_restriction(&self, s: &GroupElement) -> Result<Action> {
        let m = self.map_for(s)?;
        let inv = m.inverse()?;
        Action::build(
            format!("{}|<{s}>", self.name),
            GroupSpec::integers(),
            self.carrier.clone(),
            vec![m, inv],
        )
    }

    /// Orbit of `x` by closure under the generator maps; `None` once more
    /// than `cap` points have been found or the orbit leaves the ambient range.
    pub fn orbit(&self, x: &Point, cap: usize) -> Result<Option<Vec<Point>>> {
        if escapes(&self.maps.iter().collect::<Vec<_>>(), x) {
            return Ok(None);
        }
        let mut seen: HashSet<Point> = HashSet::new();
        let mut order = vec![x.clone()];
        let mut queue = VecDeque::from([x.clone()]);
        seen.insert(x.clone());
        while let Some(p) = queue.pop_front() {
            for m in &self.maps {
                let q = match m.apply_in(&self.carrier, &p) {
                    Ok(q) => q,
                    Err(Error::AmbientOverflow { .. }) => return Ok(None),
                    Err(e) => return Err(e),
                };
                if seen.insert(q.clone()) {
                    if seen.len() > cap {
                        return Ok(None);
                    }
                    order.push(q.clone());
                    queue.push_back(q);
                }
            }
        }
        Ok(Some(order))
    }

    /// Points whose orbit has at most `bound` elements: exhaustive on finite
    /// and grid carriers, all points of least period `<= bound` on shifts.
    pub fn periodic_points(&self, bound: usize) -> Result<Vec<Point>> {
        if bound == 0 {
            return Err(Error::domain("periodic-point bound must be at least 1"));
        }
        let mut out = Vec::new();
        for x in periodic_candidates(&self.carrier, bound) {
            if self.orbit(&x, bound)?.is_some() {
                out.push(x);
            }
        }
        Ok(out)
    }

    pub fn is_periodic(&self, x: &Point, bound: usize) -> Result<bool> {
        Ok(self.orbit(x, bound)?.is_some())
    }
}

/// A sequence that is not purely periodic has an infinite orbit as soon as
/// some map shifts by a nonzero amount; likewise for any coordinate of a pair.
fn escapes(maps: &[&CarrierMap], x: &Point) -> bool {
    match x {
        Point::Seq(s) => {
            s.period().is_none()
                && maps
                    .iter()
                    .any(|m| matches!(m, CarrierMap::Shift { by, .. } if *by != 0))
        }
        Point::Pair(a, b) => {
            let (mut fa, mut fb) = (Vec::new(), Vec::new());
            for m in maps {
                if let CarrierMap::Pair(f, g) = m {
                    fa.push(&**f);
                    fb.push(&**g);
                }
            }
            escapes(&fa, a) || escapes(&fb, b)
        }
        _ => false,
    }
}

fn power(m: &CarrierMap, k: u64) -> Result<CarrierMap> {
    let mut acc = CarrierMap::Identity;
    let mut sq = m.clone();
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.compose(&sq)?;
        }
        e >>= 1;
        if e > 0 {
            sq = sq.compose(&sq)?;
        }
    }
    Ok(acc)
}

fn as_permutation(m: &CarrierMap, n: usize) -> Vec<usize> {
    match m {
        CarrierMap::Permutation(p) => p.clone(),
        _ => (0..n).collect(),
    }
}

fn image_carrier(t: &CarrierMap, carrier: &Carrier) -> Result<Carrier> {
    Ok(match (t, carrier) {
        (CarrierMap::Affine { scale, offset }, Carrier::Grid(g)) => {
            let f = |x: crate::exact::Dyadic| -> Result<crate::exact::Dyadic> {
                scale.checked_mul(x)?.checked_add(*offset)
            };
            let (a, b) = (f(g.lo)?, f(g.hi)?);
            let (c, d) = (f(g.ambient_lo)?, f(g.ambient_hi)?);
            Carrier::Grid(IntervalGrid::new(
                a.min(b),
                a.max(b),
                g.step.checked_mul(scale.abs())?,
                c.min(d),
                c.max(d),
            )?)
        }
        (CarrierMap::Permutation(p), Carrier::Finite(f)) => {
            let n = f.len();
            let mut labels = vec![String::new(); n];
            let mut metric = vec![vec![Q::default(); n]; n];
            for i in 0..n {
                labels[p[i]] = f.labels()[i].clone();
                for j in 0..n {
                    metric[p[i]][p[j]] = f.d(i, j).clone();
                }
            }
            Carrier::Finite(FiniteMetric::new(labels, metric)?)
        }
        (CarrierMap::Pair(ta, tb), Carrier::Product(a, b)) => {
            Carrier::Product(Box::new(image_carrier(ta, a)?), Box::new(image_carrier(tb, b)?))
        }
        (_, c) => c.clone(),
    })
}

pub(crate) fn periodic_candidates(carrier: &Carrier, bound: usize) -> Vec<Point> {
    match carrier {
        Carrier::Shift { alphabet } => ShiftPoint::all_periodic(*alphabet, bound)
            .into_iter()
            .map(Point::Seq)
            .collect(),
        Carrier::Product(a, b) => {
            let pa = periodic_candidates(a, bound);
            let pb = periodic_candidates(b, bound);
            pa.iter()
                .flat_map(|x| pb.iter().map(move |y| Point::pair(x.clone(), y.clone())))
                .collect()
        }
        Carrier::Rescaled { inner, .. } => periodic_candidates(inner, bound),
        c => c.points().unwrap_or_default(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Dyadic;
    use crate::space::carrier::FiniteMetric;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    fn grid() -> Carrier {
        Carrier::Grid(IntervalGrid::new(d("0"), d("1"), d("1/8"), d("-64"), d("64")).unwrap())
    }

    fn lattice_action(e1: CarrierMap, e2: CarrierMap) -> Result<Action> {
        let maps = vec![e1.clone(), e1.inverse().unwrap(), e2.clone(), e2.inverse().unwrap()];
        Action::build("test", GroupSpec::lattice(2), grid(), maps)
    }

    fn v(x: &[i64]) -> GroupElement {
        GroupElement::Vector(x.to_vec())
    }

    #[test]
    fn commuting_affine_maps_validate() {
        let a = lattice_action(CarrierMap::translation(d("2")), CarrierMap::translation(d("-2"))).unwrap();
        assert_eq!(a.apply(&v(&[2, 0]), &Point::Real(d("0"))).unwrap(), Point::Real(d("4")));
        let b = lattice_action(CarrierMap::affine(d("2"), d("0")), CarrierMap::affine(d("0.5"), d("0"))).unwrap();
        assert_eq!(
            b.apply(&v(&[1, 1]), &Point::Real(d("0.5"))).unwrap(),
            Point::Real(d("0.5"))
        );
    }

    #[test]
    fn non_commuting_maps_are_rejected() {
        let err = lattice_action(CarrierMap::translation(d("1")), CarrierMap::affine(d("2"), d("0"))).unwrap_err();
        assert!(matches!(err, Error::RelationViolation { .. }), "{err}");
    }

    #[test]
    fn inverse_mismatch_is_reported() {
        let maps = vec![CarrierMap::translation(d("1")), CarrierMap::translation(d("1"))];
        let err = Action::build("bad", GroupSpec::integers(), grid(), maps).unwrap_err();
        assert!(matches!(err, Error::InverseMismatch { generator: 0, .. }));
    }

    #[test]
    fn ambient_overflow() {
        let a = lattice_action(CarrierMap::affine(d("2"), d("0")), CarrierMap::affine(d("0.5"), d("0"))).unwrap();
        let err = a.apply(&v(&[10, 0]), &Point::Real(d("1"))).unwrap_err();
        assert!(matches!(err, Error::AmbientOverflow { .. }));
    }

    #[test]
    fn cyclic_relation_checked() {
        let c3 = GroupSpec::standard(Family::CyclicFinite(3)).unwrap();
        let carrier = Carrier::Finite(FiniteMetric::discrete(3).unwrap());
        let ok = Action::build(
            "rot",
            c3.clone(),
            carrier.clone(),
            vec![
                CarrierMap::Permutation(vec![1, 2, 0]),
                CarrierMap::Permutation(vec![2, 0, 1]),
            ],
        );
        assert!(ok.is_ok());
        // a transposition has order 2, so its cube is not the identity
        let bad = Action::build(
            "swap",
            c3,
            carrier,
            vec![
                CarrierMap::Permutation(vec![1, 0, 2]),
                CarrierMap::Permutation(vec![1, 0, 2]),
            ],
        );
        assert!(matches!(bad, Err(Error::RelationViolation { .. })));
    }

    #[test]
    fn shift_points_reindex() {
        let sh = Action::build(
            "shift",
            GroupSpec::integers(),
            Carrier::shift(2).unwrap(),
            vec![CarrierMap::shift_by(1, 2), CarrierMap::shift_by(-1, 2)],
        )
        .unwrap();
        let x = Point::Seq(ShiftPoint::block(&[1], 0, 0));
        let Point::Seq(y) = sh.apply(&v(&[3]), &x).unwrap() else {
            panic!()
        };
        assert_eq!(y.symbol(-3), 1);
        assert_eq!(sh.periodic_points(2).unwrap().len(), 4);
        let p = Point::Seq(ShiftPoint::periodic(&[0, 1]).unwrap());
        assert_eq!(sh.apply(&v(&[3]), &p).unwrap(), sh.apply(&v(&[1]), &p).unwrap());
    }

    #[test]
    fn periodic_points_of_translation_and_trivial() {
        let a = lattice_action(CarrierMap::translation(d("2")), CarrierMap::translation(d("-2"))).unwrap();
        assert!(a.periodic_points(10).unwrap().is_empty());
        let t = Action::trivial("id", GroupSpec::lattice(2), grid()).unwrap();
        assert_eq!(t.periodic_points(1).unwrap().len(), 9);
    }

    #[test]
    fn conjugation() {
        let a = Action::build(
            "t2",
            GroupSpec::integers(),
            grid(),
            vec![CarrierMap::translation(d("2")), CarrierMap::translation(d("-2"))],
        )
        .unwrap();
        let c = a.conjugate(&CarrierMap::affine(d("2"), d("0"))).unwrap();
        assert_eq!(c.generator_maps()[0], CarrierMap::translation(d("4")));
        let same = a.conjugate(&CarrierMap::Identity).unwrap();
        assert_eq!(same.generator_maps(), a.generator_maps());
    }

    #[test]
    fn products() {
        let carrier = Carrier::Finite(FiniteMetric::discrete(2).unwrap());
        let t = Action::trivial("a", GroupSpec::integers(), carrier.clone()).unwrap();
        let p = t.diagonal_product(&t).unwrap();
        let Carrier::Finite(f) = p.carrier() else { panic!() };
        assert_eq!(f.len(), 4);
        assert!(p.generator_maps().iter().all(|m| m.is_identity()));
        assert!(t
            .diagonal_product(&Action::trivial("b", GroupSpec::lattice(2), carrier).unwrap())
            .is_err());
    }

    #[test]
    fn homomorphism_on_random_triples() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let f2 = GroupSpec::standard(Family::Free(2)).unwrap();
        let carrier = Carrier::Finite(FiniteMetric::discrete(5).unwrap());
        let a = CarrierMap::Permutation(vec![1, 2, 3, 4, 0]);
        let b = CarrierMap::Permutation(vec![1, 0, 2, 4, 3]);
        let act = Action::build(
            "f2",
            f2.clone(),
            carrier,
            vec![a.clone(), a.inverse().unwrap(), b.clone(), b.inverse().unwrap()],
        )
        .unwrap();
        let ball = f2.word_ball(3).unwrap();
        for _ in 0..200 {
            let g = &ball.elements()[rng.gen_range(0..ball.len())];
            let h = &ball.elements()[rng.gen_range(0..ball.len())];
            let x = Point::Index(rng.gen_range(0..5));
            let gh = f2.op(g, h).unwrap();
            let lhs = act.apply(&gh, &x).unwrap();
            let rhs = act.apply(g, &act.apply(h, &x).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
            assert_eq!(act.apply(&f2.identity(), &x).unwrap(), x);
        }
    }
}
