//! Re-checks a bundle: the digest, then every witness against objects
//! rebuilt from the bundled config.

use std::collections::HashMap;
use std::path::Path;

use unispec::chaos::conjoin;
use unispec::entropy::{
    closeness_relation, closeness_sequence, epsilon_rates, max_separated, ClosenessRelation, SolveMode,
};
use unispec::exact::{parse_q, Q};
use unispec::space::{Action, Point};
use unispec::spec::{verify_trace, Verdict};

use crate::bundle::{sha256_hex, BundleFiles, Header};
use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::report::{sig, ChaosRecord, CountRecord, Record, TwoPointRecord};
use crate::run::eps_text;
use crate::setup::{EntropySetup, Setup};
use crate::table::{parse_table, Row};

#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    /// line of `verdicts.jsonl` (0-based); `None` for bundle-level checks
    pub record: Option<usize>,
    pub kind: String,
    pub detail: String,
    /// the offending record as written
    pub text: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerifyReport {
    pub checked: usize,
    pub failures: Vec<Failure>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn eng<T>(r: unispec::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn parse_point(action: &Action, text: &str) -> Result<Point, String> {
    action
        .carrier()
        .parse_point(text)
        .map_err(|e| format!("point {text:?}: {e}"))
}

fn q(text: &str) -> Result<Q, String> {
    parse_q(text).map_err(|e| e.to_string())
}

fn verdict(s: &str) -> Result<Verdict, String> {
    match s {
        "pass" => Ok(Verdict::Pass),
        "fail" => Ok(Verdict::Fail),
        "inconclusive" => Ok(Verdict::Inconclusive),
        _ => Err(format!("unknown verdict {s:?}")),
    }
}

struct Checker<'a> {
    setup: &'a Setup,
    rows: &'a [Row],
    relations: HashMap<String, Vec<ClosenessRelation>>,
}

impl Checker<'_> {
    fn entropy(&self) -> Result<&EntropySetup, String> {
        self.setup
            .entropy
            .as_ref()
            .ok_or_else(|| "bundle has no entropy setup".to_string())
    }

    fn action(&self) -> Result<&Action, String> {
        self.setup
            .action
            .as_ref()
            .ok_or_else(|| "bundle has no action".to_string())
    }

    fn row(&self, n: usize, eps: &str) -> Result<&Row, String> {
        self.rows
            .iter()
            .find(|r| r.n == n && r.epsilon == eps)
            .ok_or_else(|| format!("no table row for n = {n}, ε = {eps}"))
    }

    fn relation(&mut self, n: usize, eps_text: &str) -> Result<&ClosenessRelation, String> {
        if !self.relations.contains_key(eps_text) {
            let e = self.entropy()?;
            let eps = q(eps_text)?;
            let seq = eng(closeness_sequence(&e.action, &e.k, e.opts.n_max, &eps))?;
            self.relations.insert(eps_text.to_string(), seq);
        }
        self.relations[eps_text]
            .get(n)
            .ok_or_else(|| format!("n = {n} is outside the schedule"))
    }

    fn count(&mut self, c: &CountRecord, spanning: bool) -> Check {
        let k_len = self.entropy()?.k.len();
        ensure(c.indices.len() == c.count, || {
            format!("{} indices for a count of {}", c.indices.len(), c.count)
        })?;
        ensure(c.indices.iter().all(|&i| i < k_len), || "index outside K".into())?;
        let row_eps = eps_text(&q(&c.epsilon)?);
        let row = self.row(c.n, &row_eps)?.clone();
        let rel = self.relation(c.n, &c.epsilon)?;
        if spanning {
            ensure(rel.is_spanning(&c.indices), || "witness is not spanning".into())?;
            ensure(row.r_n == Some(c.count), || format!("table has r_n = {:?}", row.r_n))
        } else {
            ensure(rel.is_separated(&c.indices), || "witness is not separated".into())?;
            ensure(row.s_n == c.count, || format!("table has s_n = {}", row.s_n))
        }
    }

    /// Rates recomputed from the table alone.
    fn rates(&self) -> Result<Vec<(String, String, String)>, String> {
        let e = self.entropy()?;
        let table: Vec<(Q, Vec<(usize, u64)>)> = e
            .opts
            .epsilons
            .iter()
            .map(|eps| {
                let t = eps_text(eps);
                let rows = self
                    .rows
                    .iter()
                    .filter(|r| r.epsilon == t)
                    .map(|r| (r.n, r.s_n as u64))
                    .collect();
                (eps.clone(), rows)
            })
            .collect();
        Ok(epsilon_rates(&table, e.k.len(), e.action.carrier().is_discretized())
            .iter()
            .map(|r| (unispec::exact::q_to_string(&r.epsilon), sig(r.raw_rate), sig(r.rate)))
            .collect())
    }

    fn chaos(&self, c: &ChaosRecord) -> Check {
        let action = self.action()?;
        let cfg = self.setup.chaos.as_ref().ok_or("bundle has no chaos setup")?;
        let carrier = action.carrier();
        let group = action.group();
        let opens = &cfg.opens;
        ensure(
            c.opens == opens.iter().map(|o| o.to_string()).collect::<Vec<_>>(),
            || "open sets differ".into(),
        )?;
        for p in &c.pairs {
            if let (Some(g), Some(x)) = (&p.element, &p.point) {
                let g = eng(group.parse_element(g))?;
                let x = parse_point(action, x)?;
                ensure(eng(opens[p.from].contains(carrier, &x))?, || {
                    format!("{x} is not in open set {}", p.from)
                })?;
                let gx = eng(action.apply(&g, &x))?;
                ensure(eng(opens[p.to].contains(carrier, &gx))?, || {
                    format!("Φ_{g}({x}) = {gx} misses open set {}", p.to)
                })?;
            }
        }
        let transitive = if c.pairs.iter().all(|p| p.element.is_some()) {
            "pass"
        } else {
            "fail"
        };
        ensure(c.transitive == transitive, || {
            "transitivity verdict disagrees with its pairs".into()
        })?;
        for w in &c.periodic {
            if let Some(x) = &w.point {
                let x = parse_point(action, x)?;
                ensure(eng(opens[w.open].contains(carrier, &x))?, || {
                    format!("{x} is not in open set {}", w.open)
                })?;
                let orbit = eng(action.orbit(&x, c.orbit_bound))?;
                ensure(orbit.as_ref().map(|o| o.len()) == w.orbit_size, || {
                    format!("orbit of {x} does not have size {:?}", w.orbit_size)
                })?;
            }
        }
        if let Some(delta) = &c.sensitivity_constant {
            let delta = q(delta)?;
            for w in &c.sensitivity {
                let (x, y) = (parse_point(action, &w.x)?, parse_point(action, &w.y)?);
                let g = eng(group.parse_element(&w.element))?;
                ensure(eng(carrier.within(&x, &y, &q(&w.radius)?))?, || {
                    format!("{y} is not within {} of {x}", w.radius)
                })?;
                let (gx, gy) = (eng(action.apply(&g, &x))?, eng(action.apply(&g, &y))?);
                ensure(!eng(carrier.within(&gx, &gy, &delta))?, || {
                    format!("images under {g} stay closer than δ")
                })?;
            }
        }
        let devaney = conjoin(&[
            verdict(&c.transitive)?,
            verdict(&c.dense_periodic)?,
            verdict(&c.sensitive)?,
        ]);
        ensure(c.devaney == devaney.as_str(), || {
            "Devaney verdict is not the conjunction".into()
        })
    }

    fn two_point(&self, t: &TwoPointRecord) -> Check {
        let action = self.action()?;
        let ws = t
            .witnesses
            .iter()
            .map(|w| parse_point(action, w))
            .collect::<Result<Vec<_>, _>>()?;
        ensure(ws.len() == t.traced, || {
            format!("{} witnesses for {} traced tuples", ws.len(), t.traced)
        })?;
        if ws.is_empty() {
            return Ok(());
        }
        let rel = eng(closeness_relation(action, &ws, t.radius, &q(&t.epsilon)?))?;
        let all: Vec<usize> = (0..ws.len()).collect();
        ensure(rel.is_separated(&all) == t.pairwise_separated, || {
            "pairwise separation flag is wrong".into()
        })?;
        let count = max_separated(&rel, SolveMode::Exact, unispec::entropy::DEFAULT_NODE_BUDGET);
        ensure(count.exact && count.value == t.exact_count, || {
            format!("exact count is {}, record says {}", count.value, t.exact_count)
        })?;
        let row = self.row(t.radius, &eps_text(&q(&t.epsilon)?))?;
        ensure(row.s_n == t.exact_count, || format!("table has s_n = {}", row.s_n))
    }

    fn check(&mut self, rec: &Record) -> Check {
        match rec {
            Record::Separated(c) => self.count(c, false),
            Record::Spanning(c) => self.count(c, true),
            Record::Rate(r) => {
                let rates = self.rates()?;
                let mine = rates.iter().find(|x| x.0 == r.epsilon).ok_or("ε not in the schedule")?;
                ensure(mine.1 == r.raw_rate && mine.2 == r.rate, || {
                    format!("table gives rates {} / {}", mine.1, mine.2)
                })
            }
            Record::Estimate(e) => {
                let rates = self.rates()?;
                let last = rates.last().map(|r| r.2.clone()).unwrap_or_else(|| sig(0.0));
                ensure(e.estimate == last, || format!("table gives estimate {last}"))
            }
            Record::Tracing(t) => {
                let inst = self
                    .setup
                    .instances
                    .get(t.instance)
                    .ok_or("instance index out of range")?;
                ensure(crate::report::instance_digest(inst) == t.instance_digest, || {
                    "instance digest differs".into()
                })?;
                if let Some(w) = &t.witness {
                    let x = parse_point(&inst.action, w)?;
                    let r = eng(verify_trace(inst, &x))?;
                    ensure(r.found, || format!("{w} violates {:?}", r.failure))?;
                }
                ensure(t.found == t.witness.is_some(), || "found flag without witness".into())
            }
            Record::SpecPoint(p) => {
                let pts = self.setup.points.as_ref().ok_or("bundle has no point checks")?;
                ensure(pts.anchors.iter().any(|a| a.to_string() == p.anchor), || {
                    "anchor not in the config".into()
                })
            }
            Record::CyclicRoundTrip(c) => {
                let b = self.setup.cyclic.get(c.block).ok_or("block index out of range")?;
                if let Some(w) = &c.witness {
                    let x = parse_point(&b.instance.action, w)?;
                    ensure(eng(verify_trace(&b.instance, &x))?.found, || {
                        format!("{w} does not trace the blocks")
                    })?;
                    let classical = eng(b.classical_check(&x))?;
                    ensure(c.classical == Some(classical), || "classical check disagrees".into())?;
                }
                Ok(())
            }
            Record::Chaos(c) => self.chaos(c),
            Record::TwoPoint(t) => self.two_point(t),
            Record::WordMetric(w) => {
                let s = self
                    .setup
                    .word_metric
                    .as_ref()
                    .ok_or("bundle has no word-metric setup")?;
                let d = eng(s.group.word_metric(&s.a, &s.b))?;
                ensure(d == w.distance, || format!("distance is {d}"))?;
                if let Some(word) = &w.word {
                    let mut g = s.a.clone();
                    for letter in word {
                        g = eng(s.group.op(&g, &eng(s.group.parse_element(letter))?))?;
                    }
                    ensure(g == s.b && word.len() as u64 == d, || {
                        "word is not a geodesic to b".into()
                    })?;
                }
                Ok(())
            }
        }
    }
}

/// Verifies the bundle in `dir`. Missing files are errors; failed checks
/// are listed in the report.
pub fn verify_bundle(dir: &Path) -> Result<VerifyReport, CliError> {
    let files = BundleFiles::read(dir)?;
    let mut report = VerifyReport::default();
    let fail = |report: &mut VerifyReport, record: Option<usize>, kind: &str, detail: String, text: Option<String>| {
        report.failures.push(Failure {
            record,
            kind: kind.to_string(),
            detail,
            text,
        })
    };
    match serde_json::from_str::<Header>(&files.header) {
        Ok(h) => {
            if h.digest != files.digest() {
                fail(
                    &mut report,
                    None,
                    "digest",
                    "content digest does not match the header".into(),
                    None,
                );
            }
            if h.config_digest != sha256_hex(&files.config) {
                fail(
                    &mut report,
                    None,
                    "digest",
                    "config digest does not match the header".into(),
                    None,
                );
            }
        }
        Err(e) => fail(&mut report, None, "header", e.to_string(), None),
    }
    let cfg = ExperimentConfig::parse(&files.config)?;
    let setup = Setup::from_config(&cfg)?;
    let rows = match parse_table(&files.table) {
        Ok(r) => r,
        Err(e) => {
            fail(&mut report, None, "table", e.to_string(), None);
            Vec::new()
        }
    };
    let mut checker = Checker {
        setup: &setup,
        rows: &rows,
        relations: HashMap::new(),
    };
    for (i, line) in files.verdicts.lines().enumerate() {
        let rec: Record = match serde_json::from_str(line) {
            Ok(r) => r,
            Err(e) => {
                fail(
                    &mut report,
                    Some(i),
                    "unparsable",
                    e.to_string(),
                    Some(line.to_string()),
                );
                continue;
            }
        };
        report.checked += 1;
        if let Err(detail) = checker.check(&rec) {
            fail(&mut report, Some(i), rec.kind(), detail, Some(line.to_string()));
        }
    }
    Ok(report)
}
