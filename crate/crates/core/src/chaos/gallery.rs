//! Fully configured example systems.

use crate::entropy::EntropyOptions;
use crate::error::{Error, Result};
use crate::exact::{q_frac, q_int, q_pow2, Dyadic, Q};
use crate::group::{GroupElement, GroupSpec, GroupSubset};
use crate::space::{Action, Carrier, CarrierMap, FiniteMetric, IntervalGrid, Point, ShiftPoint};
use crate::spec::{
    cyclic_restriction_instance, shift_target_pool, CyclicBlocks, OrbitSegment, SearchScope, SeparationMode,
    SpecPointOptions, SpecificationInstance,
};

use super::checks::ChaosConfig;
use super::open::OpenSetSpec;

/// Catalogue names accepted by [`example_gallery`].
pub const GALLERY: [&str; 7] = [
    "finite-trivial",
    "translation",
    "lattice-trivial",
    "doubling",
    "equicontinuous",
    "shift-counterexample",
    "full-shift",
];

/// An action together with every schedule needed to reproduce its reports.
#[derive(Debug, Clone)]
pub struct GalleryExperiment {
    pub name: String,
    pub description: String,
    pub action: Action,
    /// action whose entropy table is computed
    pub entropy_action: Action,
    pub k: Vec<Point>,
    pub entropy: EntropyOptions,
    pub chaos: ChaosConfig,
    /// candidate specification points and the parameters to test them with
    pub anchors: Vec<Point>,
    pub spec_epsilon: Q,
    pub spec_c: u64,
    pub spec_options: SpecPointOptions,
    /// fixed instances, e.g. the family with overlapping index windows
    pub instances: Vec<SpecificationInstance>,
    pub cyclic: Vec<CyclicBlocks>,
}

fn d(s: &str) -> Dyadic {
    s.parse().expect("literal dyadic")
}

fn v(k: &[i64]) -> GroupElement {
    GroupElement::Vector(k.to_vec())
}

fn default_eps() -> Vec<Q> {
    vec![q_frac(1, 5), q_frac(1, 10), q_frac(1, 20)]
}

fn grid(step: &str, ambient: &str) -> Result<Carrier> {
    Ok(Carrier::Grid(IntervalGrid::new(
        d("0"),
        d("1"),
        d(step),
        -d(ambient),
        d(ambient),
    )?))
}

fn lattice_maps(e1: CarrierMap, e2: CarrierMap) -> Result<Vec<CarrierMap>> {
    Ok(vec![e1.clone(), e1.inverse()?, e2.clone(), e2.inverse()?])
}

fn ball(center: Point, r: Q) -> OpenSetSpec {
    OpenSetSpec::ball(center, r).expect("positive radius")
}

fn full_shift_action() -> Result<Action> {
    Action::build(
        "full 2-shift",
        GroupSpec::integers(),
        Carrier::shift(2)?,
        vec![CarrierMap::shift_by(1, 2), CarrierMap::shift_by(-1, 2)],
    )
}

/// Blocks of length 7 on `[-3, 3]` over a zero background.
fn shift_blocks() -> Vec<Point> {
    (0..128u32)
        .map(|c| {
            let w: Vec<u8> = (0..7).map(|i| (c >> (6 - i) & 1) as u8).collect();
            Point::Seq(ShiftPoint::block(&w, -3, 0))
        })
        .collect()
}

fn shift_chaos() -> ChaosConfig {
    let opens = (0..8u8)
        .map(|c| OpenSetSpec::cylinder(-1, vec![c >> 2 & 1, c >> 1 & 1, c & 1]).expect("nonempty"))
        .collect();
    ChaosConfig {
        opens,
        horizon: 6,
        orbit_bound: 16,
        sample: vec![
            Point::Seq(ShiftPoint::constant(0)),
            Point::Seq(ShiftPoint::periodic(&[0, 1]).expect("nonempty")),
            Point::Seq(ShiftPoint::block(&[1, 1, 0, 1], -2, 0)),
        ],
        deltas: vec![q_int(1), q_frac(1, 2)],
        radii: (1..=4).map(|k| q_pow2(-k)).collect(),
    }
}

fn harmonic_chaos() -> ChaosConfig {
    ChaosConfig {
        opens: [0, 2, 5]
            .iter()
            .map(|&i| ball(Point::Index(i), q_frac(1, 20)))
            .collect(),
        horizon: 3,
        orbit_bound: 16,
        sample: vec![Point::Index(0), Point::Index(3)],
        deltas: vec![q_frac(1, 10), q_frac(1, 100)],
        radii: vec![q_int(1), q_frac(1, 10), q_frac(1, 100)],
    }
}

fn line_chaos(horizon: usize) -> ChaosConfig {
    ChaosConfig {
        opens: vec![
            ball(Point::Real(d("0.5")), q_frac(1, 2)),
            ball(Point::Real(d("3.5")), q_frac(1, 2)),
            ball(Point::Real(d("0.25")), q_frac(1, 8)),
        ],
        horizon,
        orbit_bound: 64,
        sample: vec![Point::Real(d("0.5")), Point::Real(d("0.125"))],
        deltas: vec![q_frac(1, 4), q_frac(1, 8)],
        radii: vec![q_frac(1, 2), q_frac(1, 8), q_frac(1, 32)],
    }
}

fn spec_options(mode: SeparationMode, horizon: usize, targets: Option<Vec<Point>>) -> SpecPointOptions {
    SpecPointOptions {
        horizon,
        mode,
        targets,
        ..SpecPointOptions::default()
    }
}

/// Two blocks with `n = (2, 1)` and a gap of `c + 1` along the first
/// generator; the second block starts its orbit segment at `points[1]`
/// after `2 + c + 1` steps.
fn cyclic_pair(action: &Action, points: [Point; 2], c: u64, eps: Q, mode: SeparationMode) -> Result<Vec<CyclicBlocks>> {
    let g = action.group().generators()[0].clone();
    if action.group().element_order(&g)?.is_some() {
        return Ok(Vec::new());
    }
    Ok(vec![cyclic_restriction_instance(
        action,
        &g,
        &points,
        &[2, 1],
        &[c + 1],
        c,
        eps,
        mode,
    )?])
}

/// Instances with `Λ_1 = {1, …, j+2}`, `Λ_2 = {j+2, …, 2j+3}` and targets
/// that differ at index `j + 2`, with `c = j`.
pub(crate) fn overlapping_family(action: &Action, j: u64) -> Result<SpecificationInstance> {
    let j = j as i64;
    let l1 = GroupSubset::finite((1..=j + 2).map(|k| v(&[k])).collect());
    let l2 = GroupSubset::finite((j + 2..=2 * j + 3).map(|k| v(&[k])).collect());
    let x1 = Point::Seq(ShiftPoint::constant(0));
    let x2 = Point::Seq(ShiftPoint::block(&[1], j + 2, 0));
    SpecificationInstance::new(
        action.clone(),
        q_frac(1, 2),
        j as u64,
        vec![OrbitSegment::new(l1, x1), OrbitSegment::new(l2, x2)],
        SeparationMode::Hausdorff,
        None,
    )
}

/// The configured experiment of the given catalogue name.
pub fn example_gallery(name: &str) -> Result<GalleryExperiment> {
    match name {
        "finite-trivial" | "lattice-trivial" => {
            let (group, label, description) = if name == "finite-trivial" {
                (
                    GroupSpec::from_name("C2")?,
                    "trivial C2 action",
                    "trivial action of a finite group on the harmonic-sum points x_n = 1 + 1/2 + ... + 1/n",
                )
            } else {
                (
                    GroupSpec::lattice(2),
                    "trivial Z^2 action",
                    "trivial action of Z^2 on the harmonic-sum points x_n = 1 + 1/2 + ... + 1/n",
                )
            };
            let carrier = Carrier::Finite(FiniteMetric::harmonic(8)?);
            let action = Action::trivial(label, group, carrier)?;
            let k: Vec<Point> = (0..8).map(Point::Index).collect();
            let cyclic = cyclic_pair(
                &action,
                [Point::Index(6), Point::Index(7)],
                2,
                q_frac(1, 5),
                SeparationMode::Hausdorff,
            )?;
            Ok(GalleryExperiment {
                name: name.into(),
                description: description.into(),
                entropy_action: action.clone(),
                action,
                k,
                entropy: EntropyOptions::new(10, default_eps()),
                chaos: harmonic_chaos(),
                anchors: vec![Point::Index(0), Point::Index(1)],
                spec_epsilon: q_frac(1, 20),
                spec_c: 1,
                spec_options: spec_options(SeparationMode::Hausdorff, 3, None),
                instances: Vec::new(),
                cyclic,
            })
        }
        "translation" => {
            let carrier = grid("1/256", "64")?;
            let maps = lattice_maps(CarrierMap::translation(d("2")), CarrierMap::translation(d("-2")))?;
            let action = Action::build(
                "Z^2 translations x+2, x-2",
                GroupSpec::lattice(2),
                carrier.clone(),
                maps,
            )?;
            let k = carrier.points().expect("grid");
            let cyclic = cyclic_pair(
                &action,
                [Point::Real(d("0")), Point::Real(d("10"))],
                2,
                q_frac(1, 5),
                SeparationMode::Hausdorff,
            )?;
            Ok(GalleryExperiment {
                name: name.into(),
                description: "Z^2 acting on the line by e1: x -> x+2 and e2: x -> x-2, K = [0,1]".into(),
                entropy_action: action.clone(),
                action,
                k,
                entropy: EntropyOptions::new(10, default_eps()),
                chaos: line_chaos(4),
                anchors: vec![Point::Real(d("0")), Point::Real(d("1"))],
                spec_epsilon: q_frac(1, 8),
                spec_c: 1,
                spec_options: spec_options(SeparationMode::Hausdorff, 3, None),
                instances: Vec::new(),
                cyclic,
            })
        }
        "doubling" => {
            let carrier = grid("1/4096", "4096")?;
            let maps = lattice_maps(CarrierMap::affine(d("2"), d("0")), CarrierMap::affine(d("0.5"), d("0")))?;
            let action = Action::build("Z^2 doubling/halving", GroupSpec::lattice(2), carrier.clone(), maps)?;
            let entropy_action = action.cyclic_restriction(&v(&[1, 0]))?;
            let k = carrier.points().expect("grid");
            let mut chaos = line_chaos(3);
            chaos.opens = vec![
                ball(Point::Real(d("-0.5")), q_frac(1, 4)),
                ball(Point::Real(d("0.5")), q_frac(1, 4)),
            ];
            chaos.sample = vec![Point::Real(d("0.5"))];
            let cyclic = cyclic_pair(
                &action,
                [Point::Real(d("0")), Point::Real(d("0.5"))],
                2,
                q_frac(1, 5),
                SeparationMode::Hausdorff,
            )?;
            Ok(GalleryExperiment {
                name: name.into(),
                description: "Z^2 acting on the line by e1: x -> 2x and e2: x -> x/2; entropy of the cyclic restriction to e1 on K = [0,1]".into(),
                action,
                entropy_action,
                k,
                entropy: EntropyOptions::new(10, default_eps()),
                chaos,
                anchors: vec![Point::Real(d("0")), Point::Real(d("0.5"))],
                spec_epsilon: q_frac(1, 8),
                spec_c: 1,
                spec_options: spec_options(SeparationMode::Hausdorff, 2, None),
                instances: Vec::new(),
                cyclic,
            })
        }
        "equicontinuous" => {
            let carrier = grid("1/256", "64")?;
            let t = CarrierMap::translation(d("0.25"));
            let action = Action::build(
                "Z translation x+1/4",
                GroupSpec::integers(),
                carrier.clone(),
                vec![t.clone(), t.inverse()?],
            )?;
            let k = carrier.points().expect("grid");
            let cyclic = cyclic_pair(
                &action,
                [Point::Real(d("0.5")), Point::Real(d("1.75"))],
                2,
                q_frac(1, 5),
                SeparationMode::Hausdorff,
            )?;
            Ok(GalleryExperiment {
                name: name.into(),
                description: "isometric Z action x -> x + 1/4 on K = [0,1]; separated sets stay below diam(K)/ε + 1"
                    .into(),
                entropy_action: action.clone(),
                action,
                k,
                entropy: EntropyOptions::new(10, default_eps()),
                chaos: line_chaos(4),
                anchors: vec![Point::Real(d("0")), Point::Real(d("1"))],
                spec_epsilon: q_frac(1, 8),
                spec_c: 1,
                spec_options: spec_options(SeparationMode::Hausdorff, 3, None),
                instances: Vec::new(),
                cyclic,
            })
        }
        "shift-counterexample" | "full-shift" => {
            let action = full_shift_action()?;
            let zero = Point::Seq(ShiftPoint::constant(0));
            let one = Point::Seq(ShiftPoint::constant(1));
            let (instances, description) = if name == "shift-counterexample" {
                (
                    (1..=5).map(|j| overlapping_family(&action, j)).collect::<Result<Vec<_>>>()?,
                    "full 2-shift with overlapping index windows at Hausdorff distance j + 1 > j = c and targets that disagree on the shared index",
                )
            } else {
                (
                    Vec::new(),
                    "full 2-shift under the left shift, metric D(x,y) = sum over i of [x_i != y_i] / 2^|i|",
                )
            };
            let block = Point::Seq(ShiftPoint::block(&[1, 0, 1], 0, 0));
            let cyclic = cyclic_pair(
                &action,
                [block, one.clone()],
                6,
                q_frac(1, 2),
                SeparationMode::MinDistance,
            )?;
            let mut opts = spec_options(SeparationMode::MinDistance, 8, Some(shift_target_pool(2, 2)));
            opts.scope = SearchScope::default().periodic();
            Ok(GalleryExperiment {
                name: name.into(),
                description: description.into(),
                entropy_action: action.clone(),
                action,
                k: shift_blocks(),
                entropy: EntropyOptions::new(4, vec![q_frac(1, 2)]),
                chaos: shift_chaos(),
                anchors: vec![zero, one],
                spec_epsilon: q_frac(1, 2),
                spec_c: 6,
                spec_options: opts,
                instances,
                cyclic,
            })
        }
        other => Err(Error::domain(format!(
            "unknown gallery entry {other:?}; known: {}",
            GALLERY.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Dist;
    use crate::spec::{search_tracing_point, SearchScope};

    #[test]
    fn every_entry_builds() {
        for name in GALLERY {
            let e = example_gallery(name).unwrap();
            assert_eq!(e.name, name);
            assert!(!e.k.is_empty());
        }
        assert!(example_gallery("nope").is_err());
    }

    #[test]
    fn overlapping_family_has_hausdorff_distance_j_plus_one() {
        let action = full_shift_action().unwrap();
        for j in 1..=5 {
            let inst = overlapping_family(&action, j).unwrap();
            let sep = inst.separation().unwrap();
            assert_eq!(sep.distances[0].distance, Dist::Finite(j + 1));
            let min = crate::spec::family_separation(action.group(), &inst.lambdas(), j, SeparationMode::MinDistance)
                .unwrap();
            assert!(!min.separated);
        }
    }

    #[test]
    fn overlapping_family_has_no_trace() {
        let action = full_shift_action().unwrap();
        let inst = overlapping_family(&action, 2).unwrap();
        let r = search_tracing_point(&inst, &SearchScope::default().with_period_bound(4)).unwrap();
        assert!(!r.found);
        assert!(r.search_scope.contains("conflicting demands at index 4"));
    }
}
