//! Horizon-bounded checks for transitivity, strong mixing, dense periodic
//! points and sensitivity, and their Devaney conjunction.

use serde::Serialize;

use super::open::{flip, image_meets, OpenSetSpec};
use crate::error::{Error, Result};
use crate::exact::{q_pow2, q_serde, q_to_string, Q};
use crate::group::GroupElement;
use crate::space::{periodic_candidates, Action, Carrier, CarrierMap, Point};
use crate::spec::{shift_trace_construct, SpecPointReport, Verdict};

/// Pass if all pass, fail if any fails, inconclusive otherwise.
pub fn conjoin(vs: &[Verdict]) -> Verdict {
    if vs.contains(&Verdict::Fail) {
        Verdict::Fail
    } else if vs.iter().all(|v| *v == Verdict::Pass) {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairWitness {
    pub from: usize,
    pub to: usize,
    /// `g` with `Φ_g(U) ∩ V ≠ ∅`, and `x ∈ U` with `Φ_g(x) ∈ V`
    pub element: Option<GroupElement>,
    pub point: Option<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitivityReport {
    pub verdict: Verdict,
    pub horizon: usize,
    pub opens: Vec<OpenSetSpec>,
    pub pairs: Vec<PairWitness>,
}

fn ball_with_maps(action: &Action, horizon: usize) -> Result<(Vec<GroupElement>, Vec<CarrierMap>, Vec<usize>)> {
    let ball = action.group().word_ball(horizon)?;
    let maps = action.ball_maps(&ball)?;
    let lengths = ball
        .elements()
        .iter()
        .map(|g| ball.length_of(g).expect("ball member"))
        .collect();
    Ok((ball.elements().to_vec(), maps, lengths))
}

fn all_members(action: &Action, opens: &[OpenSetSpec]) -> Result<Vec<Option<Vec<Point>>>> {
    opens.iter().map(|o| o.members(action.carrier())).collect()
}

/// For each ordered pair of distinct opens, the first `g` of the word ball
/// (in ball order) with `Φ_g(U) ∩ V ≠ ∅`.
pub fn transitivity_check(action: &Action, opens: &[OpenSetSpec], horizon: usize) -> Result<TransitivityReport> {
    let (elements, maps, _) = ball_with_maps(action, horizon)?;
    let members = all_members(action, opens)?;
    let mut pairs = Vec::new();
    for i in 0..opens.len() {
        for j in 0..opens.len() {
            if i == j {
                continue;
            }
            let mut w = PairWitness {
                from: i,
                to: j,
                element: None,
                point: None,
            };
            for (g, m) in elements.iter().zip(&maps) {
                if let Some(x) = image_meets(action.carrier(), m, &opens[i], &members[i], &opens[j])? {
                    w.element = Some(g.clone());
                    w.point = Some(x);
                    break;
                }
            }
            pairs.push(w);
        }
    }
    let verdict = if pairs.iter().all(|p| p.element.is_some()) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(TransitivityReport {
        verdict,
        horizon,
        opens: opens.to_vec(),
        pairs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixingPair {
    pub from: usize,
    pub to: usize,
    /// `{ g ∈ G_horizon : Φ_g(U) ∩ V = ∅ }`
    pub exceptional: Vec<GroupElement>,
    /// word length of the outermost nonempty layer of the ball
    pub outer_layer: usize,
    /// exceptional elements on the outermost layer
    pub counterexamples: Vec<GroupElement>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixingReport {
    pub verdict: Verdict,
    pub horizon: usize,
    pub pairs: Vec<MixingPair>,
}

/// The exceptional set of every ordered pair inside the word ball. A pair
/// is mixing-consistent when the outermost nonempty layer of the ball is
/// free of exceptional elements, so the exceptional set sits in a smaller ball.
pub fn strong_mixing_check(action: &Action, opens: &[OpenSetSpec], horizon: usize) -> Result<MixingReport> {
    let (elements, maps, lengths) = ball_with_maps(action, horizon)?;
    let outer = lengths.iter().copied().max().unwrap_or(0);
    let members = all_members(action, opens)?;
    let mut pairs = Vec::new();
    for i in 0..opens.len() {
        for j in 0..opens.len() {
            if i == j {
                continue;
            }
            let mut exceptional = Vec::new();
            let mut counterexamples = Vec::new();
            for ((g, m), &len) in elements.iter().zip(&maps).zip(&lengths) {
                if image_meets(action.carrier(), m, &opens[i], &members[i], &opens[j])?.is_none() {
                    exceptional.push(g.clone());
                    if len == outer {
                        counterexamples.push(g.clone());
                    }
                }
            }
            let verdict = if counterexamples.is_empty() {
                Verdict::Pass
            } else {
                Verdict::Fail
            };
            pairs.push(MixingPair {
                from: i,
                to: j,
                exceptional,
                outer_layer: outer,
                counterexamples,
                verdict,
            });
        }
    }
    let verdict = conjoin(&pairs.iter().map(|p| p.verdict).collect::<Vec<_>>());
    Ok(MixingReport {
        verdict,
        horizon,
        pairs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodicWitness {
    pub open: usize,
    pub point: Option<Point>,
    pub orbit_size: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensePeriodicReport {
    pub verdict: Verdict,
    pub orbit_bound: usize,
    pub witnesses: Vec<PeriodicWitness>,
}

fn orbit_size(action: &Action, x: &Point, bound: usize) -> Result<Option<usize>> {
    Ok(action.orbit(x, bound)?.map(|o| o.len()))
}

/// A point with orbit size at most `orbit_bound` inside every open set.
pub fn dense_periodic_check(action: &Action, opens: &[OpenSetSpec], orbit_bound: usize) -> Result<DensePeriodicReport> {
    let carrier = action.carrier();
    let mut witnesses = Vec::new();
    for (k, open) in opens.iter().enumerate() {
        let mut candidates = Vec::new();
        match open.members(carrier)? {
            Some(m) => candidates = m,
            None => {
                if let (Carrier::Shift { alphabet }, Some(cyl)) = (carrier, open.as_cylinder()) {
                    candidates.push(Point::Seq(shift_trace_construct(*alphabet, &[cyl], true)?));
                }
                candidates.extend(periodic_candidates(carrier, 8));
            }
        }
        let mut w = PeriodicWitness {
            open: k,
            point: None,
            orbit_size: None,
        };
        for x in candidates {
            if !open.contains(carrier, &x)? {
                continue;
            }
            if let Some(n) = orbit_size(action, &x, orbit_bound)? {
                w.point = Some(x);
                w.orbit_size = Some(n);
                break;
            }
        }
        witnesses.push(w);
    }
    let verdict = if witnesses.iter().all(|w| w.point.is_some()) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(DensePeriodicReport {
        verdict,
        orbit_bound,
        witnesses,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityWitness {
    pub x: Point,
    #[serde(with = "q_serde")]
    pub radius: Q,
    pub y: Point,
    pub element: GroupElement,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityReport {
    pub verdict: Verdict,
    /// largest tested δ that passed
    pub constant: Option<String>,
    pub horizon: usize,
    pub radii: Vec<String>,
    /// `(δ, passed)` in the order tried
    pub tried: Vec<(String, bool)>,
    pub witnesses: Vec<SensitivityWitness>,
    pub definition: String,
}

fn neighbours(carrier: &Carrier, x: &Point, r: &Q, horizon: usize) -> Result<Vec<Point>> {
    match (carrier, x) {
        (Carrier::Shift { alphabet }, Point::Seq(s)) => {
            // D(x, flip_i x) = 2^-|i|
            let mut k0 = 0i64;
            while q_pow2(-k0) >= *r {
                k0 += 1;
            }
            let mut out = Vec::new();
            for k in k0..=k0 + horizon as i64 {
                out.push(Point::Seq(flip(s, k, *alphabet)));
                out.push(Point::Seq(flip(s, -k, *alphabet)));
            }
            Ok(out)
        }
        _ => {
            let Some(points) = carrier.points() else {
                return Err(Error::mismatch(format!(
                    "no neighbour rule on the {} carrier",
                    carrier.kind()
                )));
            };
            let mut out = Vec::new();
            for y in points {
                if &y != x && carrier.within(x, &y, r)? {
                    out.push(y);
                }
            }
            Ok(out)
        }
    }
}

/// Classical sensitivity over a finite sample: some `δ` such that every
/// sampled `x` and every radius `r` admit `y` with `d(x, y) < r` and
/// `g ∈ G_horizon` with `d(Φ_g x, Φ_g y) >= δ`.
pub fn sensitivity_check(
    action: &Action,
    sample: &[Point],
    deltas: &[Q],
    radii: &[Q],
    horizon: usize,
) -> Result<SensitivityReport> {
    let carrier = action.carrier();
    let (elements, maps, _) = ball_with_maps(action, horizon)?;
    let mut deltas = deltas.to_vec();
    deltas.sort_by(|a, b| b.cmp(a));
    let mut nbrs = Vec::with_capacity(sample.len());
    for x in sample {
        let mut per_r = Vec::with_capacity(radii.len());
        for r in radii {
            per_r.push(neighbours(carrier, x, r, horizon)?);
        }
        nbrs.push(per_r);
    }
    let mut tried = Vec::new();
    let mut constant = None;
    let mut witnesses = Vec::new();
    'delta: for delta in &deltas {
        let mut found = Vec::new();
        for (x, per_r) in sample.iter().zip(&nbrs) {
            for (r, ys) in radii.iter().zip(per_r) {
                let mut hit = None;
                'y: for y in ys {
                    for (g, m) in elements.iter().zip(&maps) {
                        let (gx, gy) = match (m.apply_in(carrier, x), m.apply_in(carrier, y)) {
                            (Ok(a), Ok(b)) => (a, b),
                            (Err(Error::AmbientOverflow { .. }), _) | (_, Err(Error::AmbientOverflow { .. })) => {
                                continue
                            }
                            (Err(e), _) | (_, Err(e)) => return Err(e),
                        };
                        if !carrier.within(&gx, &gy, delta)? {
                            hit = Some(SensitivityWitness {
                                x: x.clone(),
                                radius: r.clone(),
                                y: y.clone(),
                                element: g.clone(),
                            });
                            break 'y;
                        }
                    }
                }
                match hit {
                    Some(w) => found.push(w),
                    None => {
                        tried.push((q_to_string(delta), false));
                        continue 'delta;
                    }
                }
            }
        }
        tried.push((q_to_string(delta), true));
        constant = Some(q_to_string(delta));
        witnesses = found;
        break;
    }
    Ok(SensitivityReport {
        verdict: if constant.is_some() { Verdict::Pass } else { Verdict::Fail },
        constant,
        horizon,
        radii: radii.iter().map(q_to_string).collect(),
        tried,
        witnesses,
        definition: "classical: exists δ > 0 such that every x and every neighbourhood radius admit y and g with d(Φ_g x, Φ_g y) >= δ".into(),
    })
}

/// Inputs of a Devaney report.
#[derive(Debug, Clone)]
pub struct ChaosConfig {
    pub opens: Vec<OpenSetSpec>,
    pub horizon: usize,
    pub orbit_bound: usize,
    pub sample: Vec<Point>,
    pub deltas: Vec<Q>,
    pub radii: Vec<Q>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChaosReport {
    pub action: String,
    pub transitive: TransitivityReport,
    pub mixing: MixingReport,
    pub dense_periodic: DensePeriodicReport,
    pub sensitive: SensitivityReport,
    pub devaney: Verdict,
    /// periodic-specification check at an anchor, when requested
    pub premise: Option<SpecPointReport>,
    pub scope: String,
}

impl ChaosReport {
    /// mixing-consistent pairs are transitive pairs, and the Devaney verdict
    /// is the conjunction of its three components
    pub fn implications_hold(&self) -> bool {
        let mixing_ok = self.mixing.pairs.iter().all(|m| {
            m.verdict != Verdict::Pass
                || self
                    .transitive
                    .pairs
                    .iter()
                    .any(|t| t.from == m.from && t.to == m.to && t.element.is_some())
        });
        let whole = self.mixing.verdict != Verdict::Pass || self.transitive.verdict == Verdict::Pass;
        let devaney = self.devaney
            == conjoin(&[
                self.transitive.verdict,
                self.dense_periodic.verdict,
                self.sensitive.verdict,
            ]);
        mixing_ok && whole && devaney
    }
}

pub fn devaney_report(action: &Action, config: &ChaosConfig, premise: Option<SpecPointReport>) -> Result<ChaosReport> {
    let transitive = transitivity_check(action, &config.opens, config.horizon)?;
    let mixing = strong_mixing_check(action, &config.opens, config.horizon)?;
    let dense_periodic = dense_periodic_check(action, &config.opens, config.orbit_bound)?;
    let sensitive = sensitivity_check(action, &config.sample, &config.deltas, &config.radii, config.horizon)?;
    let devaney = conjoin(&[transitive.verdict, dense_periodic.verdict, sensitive.verdict]);
    let scope = format!(
        "{} open sets, word ball radius {}, orbit bound {}, {} sample points, {} radii",
        config.opens.len(),
        config.horizon,
        config.orbit_bound,
        config.sample.len(),
        config.radii.len()
    );
    Ok(ChaosReport {
        action: action.name().to_string(),
        transitive,
        mixing,
        dense_periodic,
        sensitive,
        devaney,
        premise,
        scope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q_frac, q_int, Dyadic};
    use crate::group::GroupSpec;
    use crate::space::{FiniteMetric, IntervalGrid, ShiftPoint};

    fn shift() -> Action {
        Action::build(
            "shift",
            GroupSpec::integers(),
            Carrier::shift(2).unwrap(),
            vec![CarrierMap::shift_by(1, 2), CarrierMap::shift_by(-1, 2)],
        )
        .unwrap()
    }

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    fn translation() -> Action {
        let grid = Carrier::Grid(IntervalGrid::new(d("0"), d("1"), d("1/8"), d("-64"), d("64")).unwrap());
        Action::build(
            "translation",
            GroupSpec::lattice(2),
            grid,
            vec![
                CarrierMap::translation(d("2")),
                CarrierMap::translation(d("-2")),
                CarrierMap::translation(d("-2")),
                CarrierMap::translation(d("2")),
            ],
        )
        .unwrap()
    }

    fn cyl(start: i64, w: &[u8]) -> OpenSetSpec {
        OpenSetSpec::cylinder(start, w.to_vec()).unwrap()
    }

    #[test]
    fn shift_is_transitive_and_mixing() {
        let opens = vec![cyl(0, &[1]), cyl(0, &[0])];
        let t = transitivity_check(&shift(), &opens, 3).unwrap();
        assert_eq!(t.verdict, Verdict::Pass);
        let m = strong_mixing_check(&shift(), &opens, 3).unwrap();
        assert_eq!(m.verdict, Verdict::Pass);
        assert_eq!(m.pairs[0].exceptional, vec![GroupElement::Vector(vec![0])]);
    }

    #[test]
    fn translation_grid_is_not_transitive() {
        let u = OpenSetSpec::ball(Point::Real(d("0.5")), q_frac(1, 2)).unwrap();
        let v = OpenSetSpec::ball(Point::Real(d("3.5")), q_frac(1, 2)).unwrap();
        let t = transitivity_check(&translation(), &[u.clone(), v.clone()], 4).unwrap();
        assert_eq!(t.verdict, Verdict::Fail);
        let m = strong_mixing_check(&translation(), &[u, v], 4).unwrap();
        assert_eq!(m.verdict, Verdict::Fail);
        assert_eq!(m.pairs[0].exceptional.len(), 41);
    }

    #[test]
    fn trivial_action_on_two_points() {
        let action = Action::trivial(
            "trivial",
            GroupSpec::integers(),
            Carrier::Finite(FiniteMetric::discrete(2).unwrap()),
        )
        .unwrap();
        let opens = vec![
            OpenSetSpec::ball(Point::Index(0), q_frac(1, 2)).unwrap(),
            OpenSetSpec::ball(Point::Index(1), q_frac(1, 2)).unwrap(),
        ];
        assert_eq!(transitivity_check(&action, &opens, 3).unwrap().verdict, Verdict::Fail);
        let m = strong_mixing_check(&action, &opens, 3).unwrap();
        assert_eq!(m.verdict, Verdict::Fail);
        assert_eq!(m.pairs[0].exceptional.len(), 7);
        assert_eq!(dense_periodic_check(&action, &opens, 4).unwrap().verdict, Verdict::Pass);
        let s = sensitivity_check(
            &action,
            &[Point::Index(0)],
            &[q_frac(1, 2)],
            &[q_int(2), q_frac(1, 2)],
            3,
        )
        .unwrap();
        assert_eq!(s.verdict, Verdict::Fail);
    }

    #[test]
    fn shift_has_periodic_points_in_all_short_cylinders() {
        let opens: Vec<OpenSetSpec> = (0..8u8).map(|c| cyl(-1, &[c >> 2 & 1, c >> 1 & 1, c & 1])).collect();
        let r = dense_periodic_check(&shift(), &opens, 16).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.witnesses.iter().all(|w| w.orbit_size.unwrap() <= 3));
    }

    #[test]
    fn shift_is_sensitive_with_constant_one() {
        let sample = vec![
            Point::Seq(ShiftPoint::constant(0)),
            Point::Seq(ShiftPoint::periodic(&[0, 1]).unwrap()),
        ];
        let radii: Vec<Q> = (1..=4).map(|k| q_pow2(-k)).collect();
        let s = sensitivity_check(&shift(), &sample, &[q_int(1), q_frac(1, 2)], &radii, 6).unwrap();
        assert_eq!(s.verdict, Verdict::Pass);
        assert_eq!(s.constant.as_deref(), Some("1"));
        for w in &s.witnesses {
            let c = shift().carrier().clone();
            assert!(c.within(&w.x, &w.y, &w.radius).unwrap());
            let gx = shift().apply(&w.element, &w.x).unwrap();
            let gy = shift().apply(&w.element, &w.y).unwrap();
            assert!(c.distance(&gx, &gy).unwrap() >= q_int(1));
        }
    }

    #[test]
    fn translation_is_not_sensitive() {
        let radii = vec![q_frac(1, 2), q_frac(1, 4), q_frac(1, 8)];
        let s = sensitivity_check(
            &translation(),
            &[Point::Real(d("0.5"))],
            &[q_frac(1, 4), q_frac(1, 8)],
            &radii,
            3,
        )
        .unwrap();
        assert_eq!(s.verdict, Verdict::Fail);
    }
}
