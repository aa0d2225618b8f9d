//! Verdict records. Points, group elements and exact rationals are kept in
//! their text forms so a bundle can be re-checked after a rebuild; floats
//! are rendered to 12 significant digits.

use serde::{Deserialize, Serialize};

use unispec::chaos::{ChaosReport, TwoPointBound};
use unispec::entropy::{CountResult, EpsilonRate};
use unispec::exact::{format_sig, q_to_string, Q};
use unispec::spec::{
    family_separation, CyclicBlocks, CyclicRoundTrip, SearchScope, SeparationMode, SpecPointReport,
    SpecificationInstance, TracingResult,
};

pub fn sig(v: f64) -> String {
    format_sig(v, 12)
}

pub fn scope_text(s: &SearchScope) -> String {
    format!(
        "shift points of period <= {}, constructive candidates, candidate cap {}{}",
        s.period_bound,
        s.candidate_cap,
        if s.periodic_only { ", periodic points only" } else { "" }
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "kebab-case")]
pub enum Record {
    Separated(CountRecord),
    Spanning(CountRecord),
    Rate(RateRecord),
    Estimate(EstimateRecord),
    Tracing(TracingRecord),
    SpecPoint(SpecPointRecord),
    CyclicRoundTrip(CyclicRecord),
    Chaos(ChaosRecord),
    TwoPoint(TwoPointRecord),
    WordMetric(WordMetricRecord),
}

impl Record {
    pub fn kind(&self) -> &'static str {
        match self {
            Record::Separated(_) => "separated",
            Record::Spanning(_) => "spanning",
            Record::Rate(_) => "rate",
            Record::Estimate(_) => "estimate",
            Record::Tracing(_) => "tracing",
            Record::SpecPoint(_) => "spec-point",
            Record::CyclicRoundTrip(_) => "cyclic-round-trip",
            Record::Chaos(_) => "chaos",
            Record::TwoPoint(_) => "two-point",
            Record::WordMetric(_) => "word-metric",
        }
    }
}

/// A separated or spanning set realizing one table cell; `indices` point
/// into the entropy set K.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountRecord {
    pub action: String,
    pub n: usize,
    pub epsilon: String,
    pub count: usize,
    pub exact: bool,
    pub method: String,
    pub indices: Vec<usize>,
    pub scope: String,
}

impl CountRecord {
    pub fn new(action: &str, n: usize, eps: &Q, c: &CountResult, k_size: usize, budget: u64) -> Self {
        CountRecord {
            action: action.to_string(),
            n,
            epsilon: q_to_string(eps),
            count: c.value,
            exact: c.exact,
            method: c.method.as_str().to_string(),
            indices: c.witness.clone(),
            scope: format!("{k_size} points of K, node budget {budget}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRecord {
    pub action: String,
    pub epsilon: String,
    pub raw_rate: String,
    pub rate: String,
    pub slope: String,
    pub limsup_proxy: String,
    pub caveat: bool,
    pub censored: Vec<usize>,
}

impl RateRecord {
    pub fn new(action: &str, r: &EpsilonRate) -> Self {
        RateRecord {
            action: action.to_string(),
            epsilon: q_to_string(&r.epsilon),
            raw_rate: sig(r.raw_rate),
            rate: sig(r.rate),
            slope: sig(r.fit.slope),
            limsup_proxy: sig(r.fit.limsup_proxy),
            caveat: r.fit.caveat,
            censored: r.censored.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub action: String,
    pub k_size: usize,
    pub estimate: String,
    pub counts_constant: bool,
    pub notes: Vec<String>,
    pub scope: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyText {
    pub lambda: String,
    pub target: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracingRecord {
    /// position among the run's fixed instances
    pub instance: usize,
    pub instance_digest: String,
    pub description: String,
    pub mode: String,
    pub epsilon: String,
    pub c: u64,
    pub families: Vec<FamilyText>,
    pub anchor: Option<String>,
    /// pairwise index-set distances `(i, j, d)` under each mode
    pub hausdorff: Vec<(usize, usize, String)>,
    pub min_distance: Vec<(usize, usize, String)>,
    pub found: bool,
    pub witness: Option<String>,
    pub periodic: bool,
    pub verified_constraints: usize,
    pub first_failure: Option<String>,
    pub partial: bool,
    pub scope: String,
}

pub fn instance_digest(inst: &SpecificationInstance) -> String {
    use sha2::{Digest, Sha256};
    let h = Sha256::digest(inst.describe().as_bytes());
    h.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

impl TracingRecord {
    pub fn new(index: usize, inst: &SpecificationInstance, r: &TracingResult) -> unispec::Result<Self> {
        let pairs = |mode| -> unispec::Result<Vec<(usize, usize, String)>> {
            let s = family_separation(inst.action.group(), &inst.lambdas(), inst.constant_c, mode)?;
            Ok(s.distances.iter().map(|p| (p.i, p.j, p.distance.to_string())).collect())
        };
        Ok(TracingRecord {
            instance: index,
            instance_digest: instance_digest(inst),
            description: inst.describe(),
            mode: inst.mode.as_str().to_string(),
            epsilon: q_to_string(&inst.epsilon),
            c: inst.constant_c,
            families: inst
                .families
                .iter()
                .map(|f| FamilyText {
                    lambda: f.lambda.to_string(),
                    target: f.target.to_string(),
                })
                .collect(),
            anchor: inst.anchor.as_ref().map(|a| a.to_string()),
            hausdorff: pairs(SeparationMode::Hausdorff)?,
            min_distance: pairs(SeparationMode::MinDistance)?,
            found: r.found,
            witness: r.witness.as_ref().filter(|_| r.found).map(|w| w.to_string()),
            periodic: r.periodic,
            verified_constraints: r.verified_constraints,
            first_failure: r.failure.as_ref().map(|(i, g)| format!("family {i} at {g}")),
            partial: r.partial,
            scope: r.search_scope.clone(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecPointRecord {
    pub anchor: String,
    pub epsilon: String,
    pub c: u64,
    pub verdict: String,
    pub instances_checked: usize,
    pub counterexample: Option<Vec<FamilyText>>,
    pub scope: String,
}

impl SpecPointRecord {
    pub fn new(r: &SpecPointReport) -> Self {
        SpecPointRecord {
            anchor: r.anchor.to_string(),
            epsilon: q_to_string(&r.epsilon),
            c: r.c,
            verdict: r.verdict.as_str().to_string(),
            instances_checked: r.instances_checked,
            counterexample: r.counterexample.as_ref().map(|c| {
                c.lambdas
                    .iter()
                    .zip(&c.targets)
                    .map(|(l, t)| FamilyText {
                        lambda: l.to_string(),
                        target: t.to_string(),
                    })
                    .collect()
            }),
            scope: r.scope.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CyclicRecord {
    pub block: usize,
    pub generator: String,
    pub points: Vec<String>,
    pub lengths: Vec<u64>,
    pub offsets: Vec<u64>,
    pub epsilon: String,
    pub found: bool,
    pub witness: Option<String>,
    pub classical: Option<bool>,
    pub consistent: bool,
    pub scope: String,
}

impl CyclicRecord {
    pub fn new(index: usize, b: &CyclicBlocks, rt: &CyclicRoundTrip) -> Self {
        CyclicRecord {
            block: index,
            generator: b.generator.to_string(),
            points: b.points.iter().map(|p| p.to_string()).collect(),
            lengths: b.lengths.clone(),
            offsets: b.offsets.clone(),
            epsilon: q_to_string(&b.instance.epsilon),
            found: rt.trace.found,
            witness: rt
                .trace
                .witness
                .as_ref()
                .filter(|_| rt.trace.found)
                .map(|w| w.to_string()),
            classical: rt.classical,
            consistent: rt.consistent(),
            scope: rt.trace.search_scope.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairText {
    pub from: usize,
    pub to: usize,
    pub element: Option<String>,
    pub point: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingText {
    pub from: usize,
    pub to: usize,
    pub exceptional: usize,
    pub counterexamples: Vec<String>,
    pub verdict: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicText {
    pub open: usize,
    pub point: Option<String>,
    pub orbit_size: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityText {
    pub x: String,
    pub radius: String,
    pub y: String,
    pub element: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChaosRecord {
    pub action: String,
    pub opens: Vec<String>,
    pub transitive: String,
    pub mixing: String,
    pub dense_periodic: String,
    pub sensitive: String,
    pub devaney: String,
    pub implications_hold: bool,
    pub sensitivity_constant: Option<String>,
    pub sensitivity_tried: Vec<(String, bool)>,
    pub sensitivity_definition: String,
    pub pairs: Vec<PairText>,
    pub mixing_pairs: Vec<MixingText>,
    pub periodic: Vec<PeriodicText>,
    pub sensitivity: Vec<SensitivityText>,
    pub premise: Option<SpecPointRecord>,
    pub horizon: usize,
    pub orbit_bound: usize,
    pub scope: String,
}

impl ChaosRecord {
    pub fn new(r: &ChaosReport) -> Self {
        ChaosRecord {
            action: r.action.clone(),
            opens: r.transitive.opens.iter().map(|o| o.to_string()).collect(),
            transitive: r.transitive.verdict.as_str().into(),
            mixing: r.mixing.verdict.as_str().into(),
            dense_periodic: r.dense_periodic.verdict.as_str().into(),
            sensitive: r.sensitive.verdict.as_str().into(),
            devaney: r.devaney.as_str().into(),
            implications_hold: r.implications_hold(),
            sensitivity_constant: r.sensitive.constant.clone(),
            sensitivity_tried: r.sensitive.tried.clone(),
            sensitivity_definition: r.sensitive.definition.clone(),
            pairs: r
                .transitive
                .pairs
                .iter()
                .map(|p| PairText {
                    from: p.from,
                    to: p.to,
                    element: p.element.as_ref().map(|g| g.to_string()),
                    point: p.point.as_ref().map(|x| x.to_string()),
                })
                .collect(),
            mixing_pairs: r
                .mixing
                .pairs
                .iter()
                .map(|m| MixingText {
                    from: m.from,
                    to: m.to,
                    exceptional: m.exceptional.len(),
                    counterexamples: m.counterexamples.iter().map(|g| g.to_string()).collect(),
                    verdict: m.verdict.as_str().into(),
                })
                .collect(),
            periodic: r
                .dense_periodic
                .witnesses
                .iter()
                .map(|w| PeriodicText {
                    open: w.open,
                    point: w.point.as_ref().map(|x| x.to_string()),
                    orbit_size: w.orbit_size,
                })
                .collect(),
            sensitivity: r
                .sensitive
                .witnesses
                .iter()
                .map(|w| SensitivityText {
                    x: w.x.to_string(),
                    radius: q_to_string(&w.radius),
                    y: w.y.to_string(),
                    element: w.element.to_string(),
                })
                .collect(),
            premise: r.premise.as_ref().map(SpecPointRecord::new),
            horizon: r.transitive.horizon,
            orbit_bound: r.dense_periodic.orbit_bound,
            scope: r.scope.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoPointRecord {
    pub action: String,
    pub x: String,
    pub y: String,
    pub epsilon: String,
    pub m: u64,
    pub n: usize,
    /// `n·M`, the table's `n`
    pub radius: usize,
    pub generator: String,
    pub spacing: String,
    pub tuples: usize,
    pub traced: usize,
    pub failing_tuple: Option<Vec<u8>>,
    pub witnesses: Vec<String>,
    pub pairwise_separated: bool,
    pub exact_count: usize,
    pub exact: bool,
    pub rate_bound: String,
    pub implied_rate: String,
    pub confirmed: bool,
    pub scope: String,
}

impl TwoPointRecord {
    pub fn new(action: &str, x: &str, y: &str, b: &TwoPointBound, scope: &SearchScope) -> Self {
        TwoPointRecord {
            action: action.to_string(),
            x: x.to_string(),
            y: y.to_string(),
            epsilon: q_to_string(&b.epsilon),
            m: b.m,
            n: b.n,
            radius: b.n * b.m as usize,
            generator: b.generator.to_string(),
            spacing: b.spacing.to_string(),
            tuples: b.tuples,
            traced: b.traced,
            failing_tuple: b.failing_tuple.clone(),
            witnesses: b.witnesses.iter().map(|w| w.to_string()).collect(),
            pairwise_separated: b.pairwise_separated,
            exact_count: b.exact_count,
            exact: b.exact,
            rate_bound: sig(b.rate_bound),
            implied_rate: sig(b.implied_rate),
            confirmed: b.confirmed(),
            scope: scope_text(scope),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordMetricRecord {
    pub group: String,
    pub generators: Vec<String>,
    pub a: String,
    pub b: String,
    pub distance: u64,
    /// a geodesic from `a` to `b` as generator texts, when the ball was small enough to build
    pub word: Option<Vec<String>>,
}
