//! Count tables over `(n, ε)`, growth-rate fitting and the inequality
//! checks built on them.

use num_traits::Signed;
use rayon::prelude::*;
use serde::Serialize;

use super::relation::{closeness_over_ball, closeness_relation};
use super::solver::{max_separated, min_spanning, CountResult, SolveMode, DEFAULT_NODE_BUDGET};
use crate::error::{Error, Result};
use crate::exact::{q_int, q_serde, q_to_string, Q};
use crate::group::GroupElement;
use crate::space::{Action, Carrier, MetricTransform, Point};

/// Finite-data stand-ins for `limsup (1/n) log v_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthRate {
    /// max of `ln(v_n)/n` over the tail window
    pub limsup_proxy: f64,
    /// least-squares slope of `ln v_n` against `n`
    pub slope: f64,
    /// `max(slope, 0)`
    pub rate: f64,
    /// first and last `n` of the tail window
    pub window: (usize, usize),
    /// set when the two statistics disagree noticeably
    pub caveat: bool,
}

fn least_squares_slope(rows: &[(usize, u64)]) -> f64 {
    let base = (rows[0].1 as f64).ln();
    let m = rows.len() as f64;
    let xbar = rows.iter().map(|r| r.0 as f64).sum::<f64>() / m;
    let ys: Vec<f64> = rows
        .iter()
        .map(|r| {
            if r.1 == rows[0].1 {
                0.0
            } else {
                (r.1 as f64).ln() - base
            }
        })
        .collect();
    let ybar = ys.iter().sum::<f64>() / m;
    let mut num = 0.0;
    let mut den = 0.0;
    for (r, y) in rows.iter().zip(&ys) {
        let dx = r.0 as f64 - xbar;
        num += dx * (y - ybar);
        den += dx * dx;
    }
    if den == 0.0 || num == 0.0 {
        0.0
    } else {
        num / den
    }
}

fn fit(rows: &[(usize, u64)]) -> GrowthRate {
    let tail = &rows[rows.len() / 2..];
    let limsup_proxy = tail
        .iter()
        .filter(|r| r.0 > 0)
        .map(|r| (r.1 as f64).ln() / r.0 as f64)
        .fold(f64::NEG_INFINITY, f64::max);
    let limsup_proxy = if limsup_proxy.is_finite() { limsup_proxy } else { 0.0 };
    let slope = if rows.len() >= 2 {
        least_squares_slope(rows)
    } else {
        0.0
    };
    GrowthRate {
        limsup_proxy,
        slope,
        rate: slope.max(0.0),
        window: (tail[0].0, tail[tail.len() - 1].0),
        caveat: (limsup_proxy - slope).abs() > 0.05 + 0.1 * slope.abs(),
    }
}

/// Growth statistics of `(n, v_n)` rows, sorted by `n`.
pub fn growth_rate(counts: &[(usize, u64)]) -> Result<GrowthRate> {
    if counts.len() < 3 {
        return Err(Error::domain("growth rate needs at least 3 rows"));
    }
    if counts.iter().any(|r| r.1 == 0) {
        return Err(Error::domain("counts must be at least 1"));
    }
    let mut rows = counts.to_vec();
    rows.sort_by_key(|r| r.0);
    Ok(fit(&rows))
}

/// Schedule and solver settings for an entropy table.
#[derive(Debug, Clone)]
pub struct EntropyOptions {
    pub n_min: usize,
    pub n_max: usize,
    /// strictly decreasing
    pub epsilons: Vec<Q>,
    pub spanning: bool,
    pub mode: SolveMode,
    pub budget: u64,
}

impl EntropyOptions {
    pub fn new(n_max: usize, epsilons: Vec<Q>) -> Self {
        EntropyOptions {
            n_min: 1,
            n_max,
            epsilons,
            spanning: false,
            mode: SolveMode::Exact,
            budget: DEFAULT_NODE_BUDGET,
        }
    }

    pub fn with_spanning(mut self, on: bool) -> Self {
        self.spanning = on;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.epsilons.is_empty() {
            return Err(Error::domain("ε schedule is empty"));
        }
        if self.epsilons.iter().any(|e| !e.is_positive()) {
            return Err(Error::domain("ε values must be positive"));
        }
        if self.epsilons.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::domain("ε schedule must be strictly decreasing"));
        }
        if self.n_min > self.n_max {
            return Err(Error::domain("empty n range"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyRow {
    pub n: usize,
    #[serde(with = "q_serde")]
    pub epsilon: Q,
    pub s: CountResult,
    pub r: Option<CountResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsilonRate {
    #[serde(with = "q_serde")]
    pub epsilon: Q,
    pub fit: GrowthRate,
    /// `n` values excluded because `s_n` hit `|K|`
    pub censored: Vec<usize>,
    /// slope fitted at this ε alone
    pub raw_rate: f64,
    /// running maximum over coarser ε, so the rate never decreases as ε shrinks
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyEstimate {
    pub action: String,
    pub k_size: usize,
    pub rows: Vec<EntropyRow>,
    pub rates: Vec<EpsilonRate>,
    /// rate at the smallest ε
    pub estimate: f64,
    pub notes: Vec<String>,
}

impl EntropyEstimate {
    pub fn rows_for(&self, eps: &Q) -> impl Iterator<Item = &EntropyRow> + '_ {
        let eps = eps.clone();
        self.rows.iter().filter(move |r| r.epsilon == eps)
    }

    /// `s_n` is the same for every `n` at every ε.
    pub fn separated_counts_constant(&self) -> bool {
        self.rates.iter().all(|er| {
            let mut vals = self.rows_for(&er.epsilon).map(|r| r.s.value);
            let first = vals.next();
            vals.all(|v| Some(v) == first)
        })
    }
}

fn rate_rows(rows: &[(usize, u64)], k_size: usize, discretized: bool) -> (GrowthRate, Vec<usize>) {
    let mut keep = rows.len();
    if discretized {
        while keep > 0 && rows[keep - 1].1 as usize == k_size {
            keep -= 1;
        }
        // nothing grew before saturating: keep everything
        if keep == 0 {
            keep = rows.len();
        }
    }
    let keep = if keep < 2 { rows.len() } else { keep };
    let censored = rows[keep..].iter().map(|r| r.0).collect();
    (fit(&rows[..keep]), censored)
}

/// Fits every ε of a separated-count table, given from coarse to fine ε,
/// and takes the running maximum across ε. Trailing rows where the count
/// equals `|K|` are censored on discretized carriers.
pub fn epsilon_rates(table: &[(Q, Vec<(usize, u64)>)], k_size: usize, discretized: bool) -> Vec<EpsilonRate> {
    let mut envelope = 0.0f64;
    table
        .iter()
        .map(|(eps, counts)| {
            let (fit, censored) = rate_rows(counts, k_size, discretized);
            envelope = envelope.max(fit.rate);
            EpsilonRate {
                epsilon: eps.clone(),
                raw_rate: fit.rate,
                rate: envelope,
                fit,
                censored,
            }
        })
        .collect()
}

/// Fills the `(n, ε)` table of separated (and optionally spanning) counts
/// on `K` and fits a growth rate per ε.
pub fn estimate_entropy(action: &Action, k: &[Point], opts: &EntropyOptions) -> Result<EntropyEstimate> {
    opts.validate()?;
    let ball = action.group().word_ball(opts.n_max)?;
    let per_eps: Vec<Vec<EntropyRow>> = opts
        .epsilons
        .par_iter()
        .map(|eps| -> Result<Vec<EntropyRow>> {
            let rels = closeness_over_ball(action, &ball, k, opts.n_max, eps)?;
            Ok(rels[opts.n_min..]
                .par_iter()
                .map(|rel| EntropyRow {
                    n: rel.n(),
                    epsilon: eps.clone(),
                    s: max_separated(rel, opts.mode, opts.budget),
                    r: opts.spanning.then(|| min_spanning(rel, opts.mode, opts.budget)),
                })
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;
    let table: Vec<(Q, Vec<(usize, u64)>)> = opts
        .epsilons
        .iter()
        .zip(&per_eps)
        .map(|(eps, rows)| (eps.clone(), rows.iter().map(|r| (r.n, r.s.value as u64)).collect()))
        .collect();
    let rates = epsilon_rates(&table, k.len(), action.carrier().is_discretized());
    let estimate = rates.last().map_or(0.0, |r| r.rate);
    let schedule: Vec<String> = opts.epsilons.iter().map(q_to_string).collect();
    let notes = vec![
        format!(
            "counts are taken inside the configured K ({} points of a {} carrier); no supremum over compact sets is claimed",
            k.len(),
            action.carrier().kind()
        ),
        format!(
            "the limit over entourages is approximated by the ε schedule [{}]",
            schedule.join(", ")
        ),
    ];
    Ok(EntropyEstimate {
        action: action.name().to_string(),
        k_size: k.len(),
        rows: per_eps.into_iter().flatten().collect(),
        rates,
        estimate,
        notes,
    })
}

/// `(r_n(U), s_n(U), r_n(V), s_n(V))` for `2·ε_V ≤ ε_U`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountChain {
    pub r_u: CountResult,
    pub s_u: CountResult,
    pub r_v: CountResult,
    pub s_v: CountResult,
}

impl CountChain {
    pub fn values(&self) -> [usize; 4] {
        [self.r_u.value, self.s_u.value, self.r_v.value, self.s_v.value]
    }

    /// `r_n(U) ≤ s_n(U) ≤ r_n(V) ≤ s_n(V)`.
    pub fn holds(&self) -> bool {
        self.values().windows(2).all(|w| w[0] <= w[1])
    }
}

pub fn count_chain(action: &Action, k: &[Point], n: usize, eps_u: &Q, eps_v: &Q, budget: u64) -> Result<CountChain> {
    if q_int(2) * eps_v > *eps_u {
        return Err(Error::domain(format!(
            "need 2·ε_V ≤ ε_U, got ε_U = {}, ε_V = {}",
            q_to_string(eps_u),
            q_to_string(eps_v)
        )));
    }
    let rel_u = closeness_relation(action, k, n, eps_u)?;
    let rel_v = closeness_relation(action, k, n, eps_v)?;
    Ok(CountChain {
        r_u: min_spanning(&rel_u, SolveMode::Exact, budget),
        s_u: max_separated(&rel_u, SolveMode::Exact, budget),
        r_v: min_spanning(&rel_v, SolveMode::Exact, budget),
        s_v: max_separated(&rel_v, SolveMode::Exact, budget),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestrictionCheck {
    pub cyclic: EntropyEstimate,
    pub full: EntropyEstimate,
    /// `(n, ε)` cells where the cyclic count exceeded the full count
    pub violations: Vec<(usize, String)>,
    /// cells skipped because a count was not exact
    pub skipped: usize,
}

impl RestrictionCheck {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Compares the table of the cyclic action generated by `Φ_s` with the
/// table of the whole action, cell by cell.
pub fn restriction_entropy_check(
    action: &Action,
    s: &GroupElement,
    k: &[Point],
    opts: &EntropyOptions,
) -> Result<RestrictionCheck> {
    if !action.group().generators().contains(s) {
        return Err(Error::domain(format!("{s} is not a listed generator")));
    }
    let cyclic = estimate_entropy(&action.cyclic_restriction(s)?, k, opts)?;
    let full = estimate_entropy(action, k, opts)?;
    let mut violations = Vec::new();
    let mut skipped = 0;
    for (a, b) in cyclic.rows.iter().zip(&full.rows) {
        if !(a.s.exact && b.s.exact) {
            skipped += 1;
        } else if a.s.value > b.s.value {
            violations.push((a.n, q_to_string(&a.epsilon)));
        }
    }
    Ok(RestrictionCheck {
        cyclic,
        full,
        violations,
        skipped,
    })
}

/// Spanning counts under a rescaled metric bracketed by counts under the
/// original metric at neighboring schedule values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricEquivalence {
    pub transform: String,
    #[serde(with = "q_serde")]
    pub epsilon: Q,
    /// radius in the original metric matching `ε` in the rescaled one
    pub pulled_back: Option<String>,
    pub eps_coarse: Option<String>,
    pub eps_fine: Option<String>,
    pub r_coarse: Option<usize>,
    pub r_transformed: usize,
    pub r_fine: Option<usize>,
    pub exhibited: bool,
}

pub fn metric_equivalence_check(
    action: &Action,
    k: &[Point],
    n: usize,
    epsilon: &Q,
    transform: &MetricTransform,
    schedule: &[Q],
    budget: u64,
) -> Result<MetricEquivalence> {
    let rescaled = Carrier::rescaled(action.carrier().clone(), transform.clone())?;
    let transformed = Action::build(
        format!("{} [{}]", action.name(), transform.name()),
        action.group().clone(),
        rescaled,
        action.generator_maps().to_vec(),
    )?;
    let r_transformed = min_spanning(
        &closeness_relation(&transformed, k, n, epsilon)?,
        SolveMode::Exact,
        budget,
    );
    let rho = transform.pull_back(epsilon);
    let count = |eps: &Q| -> Result<CountResult> {
        Ok(min_spanning(
            &closeness_relation(action, k, n, eps)?,
            SolveMode::Exact,
            budget,
        ))
    };
    let (coarse, fine) = match &rho {
        Some(rho) => (
            schedule.iter().filter(|e| *e >= rho).min().cloned(),
            schedule.iter().filter(|e| *e <= rho).max().cloned(),
        ),
        None => (None, schedule.iter().max().cloned()),
    };
    let r_coarse = coarse.as_ref().map(count).transpose()?;
    let r_fine = fine.as_ref().map(count).transpose()?;
    let all_exact =
        r_transformed.exact && r_coarse.as_ref().is_none_or(|r| r.exact) && r_fine.as_ref().is_none_or(|r| r.exact);
    let lower_ok = match (&rho, &r_coarse) {
        (None, _) => true,
        (Some(_), Some(c)) => c.value <= r_transformed.value,
        (Some(_), None) => false,
    };
    let upper_ok = r_fine.as_ref().is_some_and(|f| r_transformed.value <= f.value);
    Ok(MetricEquivalence {
        transform: transform.name(),
        epsilon: epsilon.clone(),
        pulled_back: rho.as_ref().map(q_to_string),
        eps_coarse: coarse.as_ref().map(q_to_string),
        eps_fine: fine.as_ref().map(q_to_string),
        r_coarse: r_coarse.map(|r| r.value),
        r_transformed: r_transformed.value,
        r_fine: r_fine.map(|r| r.value),
        exhibited: all_exact && lower_ok && upper_ok,
    })
}
