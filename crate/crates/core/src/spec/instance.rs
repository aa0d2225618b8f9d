//! Specification instances: families of index sets with targets, their
//! separation test and trace verification.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{q_serde, q_to_string, Q};
use crate::group::{Dist, GroupElement, GroupSpec, GroupSubset};
use crate::space::{Action, CarrierMap, Point};

/// How the distance between two index sets is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeparationMode {
    #[default]
    Hausdorff,
    MinDistance,
}

impl SeparationMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            SeparationMode::Hausdorff => "hausdorff",
            SeparationMode::MinDistance => "min_distance",
        }
    }
}

/// Demand that the orbit of the tracing point follow `target` along `lambda`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitSegment {
    pub lambda: GroupSubset,
    pub target: Point,
}

impl OrbitSegment {
    pub fn new(lambda: GroupSubset, target: Point) -> Self {
        OrbitSegment { lambda, target }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairDistance {
    pub i: usize,
    pub j: usize,
    pub distance: Dist,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilySeparation {
    pub mode: SeparationMode,
    pub c: u64,
    pub separated: bool,
    pub distances: Vec<PairDistance>,
}

/// Pairwise distances of the index sets and whether all exceed `c`.
pub fn family_separation(
    group: &GroupSpec,
    lambdas: &[GroupSubset],
    c: u64,
    mode: SeparationMode,
) -> Result<FamilySeparation> {
    for (i, l) in lambdas.iter().enumerate() {
        if matches!(l, GroupSubset::Finite(v) if v.is_empty()) {
            return Err(Error::domain(format!("index set {} is empty", i + 1)));
        }
    }
    let mut distances = Vec::new();
    for i in 0..lambdas.len() {
        for j in i + 1..lambdas.len() {
            let distance = match mode {
                SeparationMode::Hausdorff => group.hausdorff_distance(&lambdas[i], &lambdas[j])?,
                SeparationMode::MinDistance => group.set_min_distance(&lambdas[i], &lambdas[j])?,
            };
            distances.push(PairDistance { i, j, distance });
        }
    }
    Ok(FamilySeparation {
        mode,
        c,
        separated: distances.iter().all(|p| p.distance.exceeds(c)),
        distances,
    })
}

/// Default radius to which symbolic index sets are truncated.
pub const DEFAULT_TRUNCATION: u64 = 8;
/// Default orbit-size bound for the periodicity flag.
pub const DEFAULT_ORBIT_BOUND: usize = 256;

/// One desk-scale instance of the tracing problem.
#[derive(Debug, Clone, Serialize)]
pub struct SpecificationInstance {
    pub action: Action,
    #[serde(with = "q_serde")]
    pub epsilon: Q,
    pub constant_c: u64,
    pub families: Vec<OrbitSegment>,
    pub mode: SeparationMode,
    pub anchor: Option<Point>,
    /// word-length radius at which symbolic index sets are cut off
    pub truncation: u64,
    pub orbit_bound: usize,
}

impl SpecificationInstance {
    /// Validated instance: targets lie in the carrier, the families are
    /// separated by more than `c`, and the anchor (if any) is the first target.
    pub fn new(
        action: Action,
        epsilon: Q,
        constant_c: u64,
        families: Vec<OrbitSegment>,
        mode: SeparationMode,
        anchor: Option<Point>,
    ) -> Result<Self> {
        let inst = Self::unchecked(action, epsilon, constant_c, families, mode, anchor);
        inst.validate()?;
        Ok(inst)
    }

    pub(crate) fn unchecked(
        action: Action,
        epsilon: Q,
        constant_c: u64,
        families: Vec<OrbitSegment>,
        mode: SeparationMode,
        anchor: Option<Point>,
    ) -> Self {
        SpecificationInstance {
            action,
            epsilon,
            constant_c,
            families,
            mode,
            anchor,
            truncation: DEFAULT_TRUNCATION,
            orbit_bound: DEFAULT_ORBIT_BOUND,
        }
    }

    pub fn with_truncation(mut self, radius: u64) -> Self {
        self.truncation = radius;
        self
    }

    pub fn with_orbit_bound(mut self, bound: usize) -> Self {
        self.orbit_bound = bound;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.epsilon <= Q::from_integer(0.into()) {
            return Err(Error::domain("ε must be positive"));
        }
        if self.families.is_empty() {
            return Err(Error::domain("an instance needs at least one family"));
        }
        for f in &self.families {
            self.action.carrier().check_point(&f.target)?;
        }
        if let Some(z) = &self.anchor {
            if &self.families[0].target != z {
                return Err(Error::domain(format!(
                    "the first target must be the anchor {z}, got {}",
                    self.families[0].target
                )));
            }
        }
        let sep = self.separation()?;
        if let Some(p) = sep.distances.iter().find(|p| !p.distance.exceeds(self.constant_c)) {
            return Err(Error::domain(format!(
                "index sets {} and {} are at {} distance {}, not more than c = {}",
                p.i + 1,
                p.j + 1,
                self.mode.as_str(),
                p.distance,
                self.constant_c
            )));
        }
        Ok(())
    }

    pub fn lambdas(&self) -> Vec<GroupSubset> {
        self.families.iter().map(|f| f.lambda.clone()).collect()
    }

    pub fn targets(&self) -> Vec<Point> {
        self.families.iter().map(|f| f.target.clone()).collect()
    }

    pub fn separation(&self) -> Result<FamilySeparation> {
        family_separation(self.action.group(), &self.lambdas(), self.constant_c, self.mode)
    }

    /// Whether any index set had to be truncated.
    pub fn is_truncated(&self) -> bool {
        self.families
            .iter()
            .any(|f| matches!(f.lambda, GroupSubset::BallComplement(_)))
    }

    pub(crate) fn prepare(&self) -> Result<Prepared> {
        let mut constraints = Vec::new();
        for (i, f) in self.families.iter().enumerate() {
            for g in f.lambda.truncated(self.action.group(), self.truncation)? {
                let map = self.action.map_for(&g)?;
                let image = map.apply_in(self.action.carrier(), &f.target)?;
                constraints.push(Constraint {
                    family: i,
                    element: g,
                    map,
                    image,
                });
            }
        }
        Ok(Prepared {
            action: self.action.clone(),
            epsilon: self.epsilon.clone(),
            constraints,
        })
    }

    pub fn describe(&self) -> String {
        let fams: Vec<String> = self
            .families
            .iter()
            .map(|f| format!("{} -> {}", f.lambda, f.target))
            .collect();
        format!(
            "ε = {}, c = {}, {} mode, families [{}]",
            q_to_string(&self.epsilon),
            self.constant_c,
            self.mode.as_str(),
            fams.join("; ")
        )
    }
}

pub(crate) struct Constraint {
    pub family: usize,
    pub element: GroupElement,
    pub map: CarrierMap,
    /// `Φ_g(x_i)`
    pub image: Point,
}

/// Constraints with the maps and target images precomputed.
pub(crate) struct Prepared {
    pub action: Action,
    pub epsilon: Q,
    pub constraints: Vec<Constraint>,
}

impl Prepared {
    /// Index of the first violated constraint, or `None` if `x` traces.
    pub fn first_failure(&self, x: &Point) -> Result<Option<usize>> {
        let carrier = self.action.carrier();
        for (k, c) in self.constraints.iter().enumerate() {
            let y = c.map.apply_in(carrier, x)?;
            if !carrier.within(&y, &c.image, &self.epsilon)? {
                return Ok(Some(k));
            }
        }
        Ok(None)
    }
}

/// Outcome of checking or searching for a tracing point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TracingResult {
    pub found: bool,
    pub witness: Option<Point>,
    pub periodic: bool,
    pub verified_constraints: usize,
    /// `(family index, group element)` of the first violated constraint
    pub failure: Option<(usize, GroupElement)>,
    pub search_scope: String,
    /// radius used to cut off symbolic index sets, when any were present
    pub truncated_at: Option<u64>,
    /// the candidate list was capped before exhaustion
    pub partial: bool,
}

/// Checks every constraint of `inst` against `x`.
pub fn verify_trace(inst: &SpecificationInstance, x: &Point) -> Result<TracingResult> {
    inst.action.carrier().check_point(x)?;
    let prepared = inst.prepare()?;
    let fail = prepared.first_failure(x)?;
    let found = fail.is_none();
    Ok(TracingResult {
        found,
        witness: Some(x.clone()),
        periodic: found && inst.action.is_periodic(x, inst.orbit_bound)?,
        verified_constraints: fail.unwrap_or(prepared.constraints.len()),
        failure: fail.map(|k| {
            let c = &prepared.constraints[k];
            (c.family, c.element.clone())
        }),
        search_scope: format!("single point {x}"),
        truncated_at: inst.is_truncated().then_some(inst.truncation),
        partial: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q_frac;
    use crate::space::{Carrier, ShiftPoint};

    fn z(v: &[i64]) -> GroupSubset {
        GroupSubset::finite(v.iter().map(|&k| GroupElement::Vector(vec![k])).collect())
    }

    fn shift_action() -> Action {
        Action::build(
            "shift",
            GroupSpec::integers(),
            Carrier::shift(2).unwrap(),
            vec![CarrierMap::shift_by(1, 2), CarrierMap::shift_by(-1, 2)],
        )
        .unwrap()
    }

    #[test]
    fn overlapping_windows_separate_only_under_hausdorff() {
        let g = GroupSpec::integers();
        let sets = [z(&[1, 2, 3]), z(&[3, 4, 5])];
        let h = family_separation(&g, &sets, 1, SeparationMode::Hausdorff).unwrap();
        assert!(h.separated);
        assert_eq!(h.distances[0].distance, Dist::Finite(2));
        let m = family_separation(&g, &sets, 1, SeparationMode::MinDistance).unwrap();
        assert!(!m.separated);
        assert_eq!(m.distances[0].distance, Dist::Finite(0));
    }

    #[test]
    fn symbolic_complement_is_infinitely_far() {
        let g = GroupSpec::integers();
        let sets = [z(&[0]), GroupSubset::BallComplement(4)];
        let h = family_separation(&g, &sets, 3, SeparationMode::Hausdorff).unwrap();
        assert!(h.separated);
        assert_eq!(h.distances[0].distance, Dist::Infinite);
    }

    #[test]
    fn empty_member_is_rejected() {
        let g = GroupSpec::integers();
        assert!(family_separation(&g, &[z(&[0]), z(&[])], 0, SeparationMode::Hausdorff).is_err());
    }

    #[test]
    fn identity_family_is_traced_by_its_target() {
        let x = Point::Seq(ShiftPoint::block(&[1, 0, 1], -1, 0));
        let inst = SpecificationInstance::new(
            shift_action(),
            q_frac(1, 2),
            0,
            vec![OrbitSegment::new(z(&[0]), x.clone())],
            SeparationMode::Hausdorff,
            Some(x.clone()),
        )
        .unwrap();
        let r = verify_trace(&inst, &x).unwrap();
        assert!(r.found);
        assert_eq!(r.verified_constraints, 1);
        assert!(!r.periodic);
    }

    #[test]
    fn violated_constraint_is_reported() {
        let zero = Point::Seq(ShiftPoint::constant(0));
        let one = Point::Seq(ShiftPoint::constant(1));
        let inst = SpecificationInstance::new(
            shift_action(),
            q_frac(1, 2),
            2,
            vec![
                OrbitSegment::new(z(&[0]), zero.clone()),
                OrbitSegment::new(z(&[10, 11]), one),
            ],
            SeparationMode::Hausdorff,
            None,
        )
        .unwrap();
        let r = verify_trace(&inst, &zero).unwrap();
        assert!(!r.found);
        assert_eq!(r.failure, Some((1, GroupElement::Vector(vec![10]))));
        assert_eq!(r.verified_constraints, 1);
    }

    #[test]
    fn instance_rejects_close_families_and_wrong_anchor() {
        let zero = Point::Seq(ShiftPoint::constant(0));
        let one = Point::Seq(ShiftPoint::constant(1));
        let fams = vec![
            OrbitSegment::new(z(&[0]), zero.clone()),
            OrbitSegment::new(z(&[2]), one.clone()),
        ];
        assert!(SpecificationInstance::new(
            shift_action(),
            q_frac(1, 2),
            2,
            fams.clone(),
            SeparationMode::Hausdorff,
            None
        )
        .is_err());
        assert!(SpecificationInstance::new(
            shift_action(),
            q_frac(1, 2),
            1,
            fams,
            SeparationMode::Hausdorff,
            Some(one)
        )
        .is_err());
    }
}
