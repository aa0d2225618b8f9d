//! Experiment documents: TOML, one section per engine.

use serde::{Deserialize, Serialize};

use unispec::exact::{parse_q, q_int};
use unispec::spec::SeparationMode;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Entropy,
    Specification,
    Chaos,
    Gallery,
    WordMetric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub carrier: Option<CarrierConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<ActionConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entropy: Option<EntropyConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub specification: Option<SpecConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chaos: Option<ChaosSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gallery: Option<GallerySection>,
    #[serde(default, rename = "word-metric", skip_serializing_if = "Option::is_none")]
    pub word_metric: Option<WordMetricSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupConfig {
    /// `Z`, `Z^2`, `F2`, `C4`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// multiplication table of a finite group, identity at index 0
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<Vec<usize>>>,
    /// explicit symmetric generating set; the standard one when absent
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CarrierConfig {
    Finite {
        /// points on the line
        #[serde(default, skip_serializing_if = "Option::is_none")]
        values: Option<Vec<String>>,
        /// the partial sums `1 + 1/2 + ... + 1/n`, `n = 1..=harmonic`
        #[serde(default, skip_serializing_if = "Option::is_none")]
        harmonic: Option<usize>,
        /// that many points at mutual distance 1
        #[serde(default, skip_serializing_if = "Option::is_none")]
        discrete: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        labels: Option<Vec<String>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        metric: Option<Vec<Vec<String>>>,
    },
    Grid {
        lo: String,
        hi: String,
        step: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        ambient_lo: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        ambient_hi: Option<String>,
    },
    Shift {
        alphabet: u8,
    },
    Product {
        left: Box<CarrierConfig>,
        right: Box<CarrierConfig>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// one map per generator, in generator order: `id`, `perm 1 0 2`,
    /// `affine 2 0`, `translate 1/4`, `shift 1`, `shift 0 relabel 1 0`,
    /// `pair <map> | <map>`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub maps: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub trivial: bool,
}

fn is_false(b: &bool) -> bool {
    !*b
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Solver {
    #[default]
    Exact,
    Greedy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntropyConfig {
    /// strictly decreasing
    pub epsilons: Vec<String>,
    #[serde(default = "one")]
    pub n_min: usize,
    pub n_max: usize,
    /// explicit points of K; all carrier points when absent
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<Vec<String>>,
    /// on shifts: every word on `[lo, hi]` over a zero background
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_blocks: Option<[i64; 2]>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub spanning: bool,
    #[serde(default)]
    pub solver: Solver,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget_nodes: Option<u64>,
    /// generator whose cyclic restriction is measured instead
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restrict_to: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyConfig {
    pub lambda: Vec<String>,
    pub target: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceConfig {
    pub families: Vec<FamilyConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointCheckConfig {
    pub anchors: Vec<String>,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    #[serde(default = "default_set_size")]
    pub max_set_size: usize,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    #[serde(default = "default_instance_cap")]
    pub instance_cap: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub targets: Option<Vec<String>>,
}

fn default_horizon() -> usize {
    3
}
fn default_set_size() -> usize {
    2
}
fn default_k_max() -> usize {
    2
}
fn default_instance_cap() -> usize {
    10_000
}
fn default_period_bound() -> usize {
    8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoPointConfig {
    pub x: String,
    pub y: String,
    pub c_x: u64,
    pub c_y: u64,
    pub n: Vec<usize>,
    pub generator: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecConfig {
    pub epsilon: String,
    pub c: u64,
    #[serde(default)]
    pub mode: SeparationMode,
    #[serde(default = "default_period_bound")]
    pub period_bound: usize,
    #[serde(default, skip_serializing_if = "is_false")]
    pub periodic_only: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub instance: Vec<InstanceConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<PointCheckConfig>,
    #[serde(default, rename = "two-point", skip_serializing_if = "Option::is_none")]
    pub two_point: Option<TwoPointConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum OpenConfig {
    Ball { center: String, radius: String },
    Cylinder { start: i64, word: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PremiseConfig {
    pub anchor: String,
    pub epsilon: String,
    pub c: u64,
    #[serde(default)]
    pub mode: SeparationMode,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    #[serde(default = "default_period_bound")]
    pub period_bound: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChaosSection {
    pub opens: Vec<OpenConfig>,
    pub horizon: usize,
    pub orbit_bound: usize,
    /// sensitivity sample; drawn from the carrier points with the seed when absent
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample: Option<Vec<String>>,
    #[serde(default = "default_sample_count")]
    pub sample_count: usize,
    pub deltas: Vec<String>,
    pub radii: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub premise: Option<PremiseConfig>,
}

fn default_sample_count() -> usize {
    4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GallerySection {
    pub entry: String,
    /// also run the specification-point checks at the entry's anchors
    #[serde(default = "yes")]
    pub point_checks: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget_nodes: Option<u64>,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WordMetricSection {
    pub a: String,
    pub b: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: String,
}

fn field(path: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{path}: {msg}"))
}

fn require<'a, T>(v: &'a Option<T>, path: &str) -> Result<&'a T, CliError> {
    v.as_ref()
        .ok_or_else(|| field(path, "section is required for this kind"))
}

fn positive_list(path: &str, values: &[String]) -> Result<(), CliError> {
    if values.is_empty() {
        return Err(field(path, "must not be empty"));
    }
    let mut prev = None;
    for v in values {
        let q = parse_q(v).map_err(|e| field(path, e))?;
        if q <= q_int(0) {
            return Err(field(path, format!("{v} is not positive")));
        }
        if let Some(p) = prev {
            if q >= p {
                return Err(field(path, "must be strictly decreasing"));
            }
        }
        prev = Some(q);
    }
    Ok(())
}

impl ExperimentConfig {
    /// A gallery run of the named entry with point checks on.
    pub fn gallery(entry: &str) -> Self {
        ExperimentConfig {
            kind: Kind::Gallery,
            name: entry.to_string(),
            seed: 0,
            group: None,
            carrier: None,
            action: None,
            entropy: None,
            specification: None,
            chaos: None,
            gallery: Some(GallerySection {
                entry: entry.to_string(),
                point_checks: true,
                budget_nodes: None,
            }),
            word_metric: None,
            output: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Canonical text of the semantic content; the output section is left out.
    pub fn canonical(&self) -> String {
        let mut c = self.clone();
        c.output = None;
        toml::to_string(&c).expect("config serializes")
    }

    /// Schedules nonempty, ε lists strictly decreasing, caps positive, and
    /// the sections each kind needs.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.name.trim().is_empty() {
            return Err(field("name", "must not be empty"));
        }
        let needs_system = !matches!(self.kind, Kind::Gallery);
        if needs_system {
            require(&self.group, "group")?;
        }
        if needs_system && self.kind != Kind::WordMetric {
            require(&self.carrier, "carrier")?;
            require(&self.action, "action")?;
        }
        match self.kind {
            Kind::Entropy => {
                let e = require(&self.entropy, "entropy")?;
                positive_list("entropy.epsilons", &e.epsilons)?;
                if e.n_max < e.n_min {
                    return Err(field("entropy.n_max", "must be at least n_min"));
                }
                if e.budget_nodes == Some(0) {
                    return Err(field("entropy.budget_nodes", "must be positive"));
                }
                if e.k.is_some() && e.k_blocks.is_some() {
                    return Err(field("entropy.k", "give either k or k_blocks"));
                }
                if let Some([lo, hi]) = e.k_blocks {
                    if hi < lo || hi - lo >= 20 {
                        return Err(field("entropy.k_blocks", "window must hold 1 to 20 indices"));
                    }
                }
            }
            Kind::Specification => {
                let s = require(&self.specification, "specification")?;
                positive_list("specification.epsilon", std::slice::from_ref(&s.epsilon))?;
                if s.period_bound == 0 {
                    return Err(field("specification.period_bound", "must be positive"));
                }
                if s.instance.is_empty() && s.point.is_none() && s.two_point.is_none() {
                    return Err(field(
                        "specification",
                        "nothing to run: add instance, point or two-point",
                    ));
                }
                for (i, inst) in s.instance.iter().enumerate() {
                    if inst.families.is_empty() {
                        return Err(field(
                            &format!("specification.instance[{i}].families"),
                            "must not be empty",
                        ));
                    }
                }
                if let Some(p) = &s.point {
                    if p.anchors.is_empty() {
                        return Err(field("specification.point.anchors", "must not be empty"));
                    }
                    if p.instance_cap == 0 {
                        return Err(field("specification.point.instance_cap", "must be positive"));
                    }
                }
                if let Some(t) = &s.two_point {
                    if t.n.is_empty() {
                        return Err(field("specification.two-point.n", "must not be empty"));
                    }
                }
            }
            Kind::Chaos => {
                let c = require(&self.chaos, "chaos")?;
                if c.opens.is_empty() {
                    return Err(field("chaos.opens", "must not be empty"));
                }
                if c.orbit_bound == 0 {
                    return Err(field("chaos.orbit_bound", "must be positive"));
                }
                positive_list("chaos.deltas", &c.deltas)?;
                positive_list("chaos.radii", &c.radii)?;
                if c.sample.as_ref().is_some_and(|s| s.is_empty()) || (c.sample.is_none() && c.sample_count == 0) {
                    return Err(field("chaos.sample", "must not be empty"));
                }
            }
            Kind::Gallery => {
                let g = require(&self.gallery, "gallery")?;
                if !unispec::chaos::GALLERY.contains(&g.entry.as_str()) {
                    return Err(field(
                        "gallery.entry",
                        format!(
                            "unknown entry {:?}; known: {}",
                            g.entry,
                            unispec::chaos::GALLERY.join(", ")
                        ),
                    ));
                }
            }
            Kind::WordMetric => {
                require(&self.word_metric, "word-metric")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ENTROPY: &str = r#"
kind = "entropy"
name = "doubling"

[group]
name = "Z"

[carrier]
type = "grid"
lo = "0"
hi = "1"
step = "1/64"
ambient_lo = "-64"
ambient_hi = "64"

[action]
maps = ["affine 2 0", "affine 1/2 0"]

[entropy]
epsilons = ["1/5", "1/10"]
n_max = 4
"#;

    #[test]
    fn parses_and_round_trips() {
        let c = ExperimentConfig::parse(ENTROPY).unwrap();
        assert_eq!(c.kind, Kind::Entropy);
        let again = ExperimentConfig::parse(&c.canonical()).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn increasing_epsilons_name_the_field() {
        let bad = ENTROPY.replace(r#"["1/5", "1/10"]"#, r#"["1/10", "1/5"]"#);
        let err = ExperimentConfig::parse(&bad).unwrap_err().to_string();
        assert!(err.contains("entropy.epsilons"), "{err}");
    }

    #[test]
    fn unknown_fields_report_a_line() {
        let bad = ENTROPY.replace("n_max = 4", "n_max = 4\nbogus = 1");
        let err = ExperimentConfig::parse(&bad).unwrap_err().to_string();
        assert!(err.contains("bogus") && err.contains("line"), "{err}");
    }

    #[test]
    fn missing_section_is_reported() {
        let bad = ENTROPY.split("[entropy]").next().unwrap().to_string();
        let err = ExperimentConfig::parse(&bad).unwrap_err().to_string();
        assert!(err.contains("entropy"), "{err}");
    }
}
