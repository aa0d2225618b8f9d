//! Bounded search for counterexamples to a point being a specification point.

use serde::{Deserialize, Serialize};

use super::instance::{family_separation, OrbitSegment, SeparationMode, SpecificationInstance};
use super::search::{search_tracing_point, SearchScope};
use crate::error::Result;
use crate::exact::{q_serde, Q};
use crate::group::{Family, GroupElement, GroupSubset};
use crate::space::{Action, Carrier, Point, ShiftPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Budgets for the family enumeration.
#[derive(Debug, Clone)]
pub struct SpecPointOptions {
    /// families per instance, at least 2
    pub k_max: usize,
    /// index sets are drawn from the word ball of this radius
    pub horizon: usize,
    pub max_set_size: usize,
    pub instance_cap: usize,
    /// targets for the non-anchored families; a default pool when `None`
    pub targets: Option<Vec<Point>>,
    pub mode: SeparationMode,
    pub scope: SearchScope,
}

impl Default for SpecPointOptions {
    fn default() -> Self {
        SpecPointOptions {
            k_max: 2,
            horizon: 3,
            max_set_size: 2,
            instance_cap: 10_000,
            targets: None,
            mode: SeparationMode::Hausdorff,
            scope: SearchScope::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub lambdas: Vec<GroupSubset>,
    pub targets: Vec<Point>,
    pub search_scope: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpecPointReport {
    pub anchor: Point,
    #[serde(with = "q_serde")]
    pub epsilon: Q,
    pub c: u64,
    pub verdict: Verdict,
    pub instances_checked: usize,
    pub counterexample: Option<Counterexample>,
    /// what was enumerated; a pass means no counterexample inside this scope
    pub scope: String,
}

fn default_targets(carrier: &Carrier) -> Vec<Point> {
    match carrier.points() {
        Some(p) if p.len() <= 64 => p,
        Some(p) => {
            let step = (p.len() - 1) as f64 / 8.0;
            let mut picks: Vec<usize> = (0..=8).map(|k| (k as f64 * step).round() as usize).collect();
            picks.dedup();
            picks.into_iter().map(|k| p[k].clone()).collect()
        }
        None => crate::space::periodic_candidates(carrier, 2),
    }
}

fn is_shift_over_integers(action: &Action) -> bool {
    matches!(action.carrier().base(), Carrier::Shift { .. })
        && matches!(action.group().family(), Family::FreeAbelian(1))
}

/// Candidate index sets: intervals `{a..b}` for shifts over ℤ, otherwise
/// all subsets up to the size bound, in a fixed order.
fn index_sets(action: &Action, opts: &SpecPointOptions) -> Result<Vec<GroupSubset>> {
    let ball = action.group().word_ball(opts.horizon)?;
    let mut out = Vec::new();
    if is_shift_over_integers(action) {
        let mut ks: Vec<i64> = ball
            .elements()
            .iter()
            .filter_map(|g| match g {
                GroupElement::Vector(v) => Some(v[0]),
                _ => None,
            })
            .collect();
        ks.sort_unstable();
        for (i, &a) in ks.iter().enumerate() {
            for &b in &ks[i..] {
                if (b - a + 1) as usize <= opts.max_set_size {
                    out.push(GroupSubset::finite(
                        (a..=b).map(|k| GroupElement::Vector(vec![k])).collect(),
                    ));
                }
            }
        }
        return Ok(out);
    }
    let elems = ball.elements();
    let mut stack: Vec<(usize, Vec<GroupElement>)> = vec![(0, Vec::new())];
    while let Some((next, cur)) = stack.pop() {
        if !cur.is_empty() {
            out.push(GroupSubset::finite(cur.clone()));
        }
        if cur.len() < opts.max_set_size {
            for i in (next..elems.len()).rev() {
                let mut c = cur.clone();
                c.push(elems[i].clone());
                stack.push((i + 1, c));
            }
        }
    }
    Ok(out)
}

/// Enumerates instances anchored at `z`: first index set with target `z`,
/// up to `k_max - 1` further index sets (in increasing order) with targets
/// from the pool, all pairwise separated by more than `c`. Stops at the
/// first instance without a tracing point in scope.
pub fn check_specification_point(
    action: &Action,
    z: &Point,
    epsilon: &Q,
    c: u64,
    opts: &SpecPointOptions,
) -> Result<SpecPointReport> {
    action.carrier().check_point(z)?;
    let sets = index_sets(action, opts)?;
    let targets = opts
        .targets
        .clone()
        .unwrap_or_else(|| default_targets(action.carrier()));
    let group = action.group();
    let mut checked = 0usize;
    let scope = format!(
        "up to {} families from {} index sets (size <= {}, word ball radius {}), {} targets, candidates: period <= {}{}",
        opts.k_max.max(2),
        sets.len(),
        opts.max_set_size,
        opts.horizon,
        targets.len(),
        opts.scope.period_bound,
        if opts.scope.periodic_only { ", periodic only" } else { "" }
    );
    let report = |verdict, checked, counterexample| SpecPointReport {
        anchor: z.clone(),
        epsilon: epsilon.clone(),
        c,
        verdict,
        instances_checked: checked,
        counterexample,
        scope: scope.clone(),
    };

    // depth-first over (first set, further sets ascending)
    let mut families: Vec<Vec<usize>> = Vec::new();
    for first in 0..sets.len() {
        let mut stack = vec![vec![first]];
        while let Some(fam) = stack.pop() {
            if fam.len() >= 2 {
                families.push(fam.clone());
            }
            if fam.len() < opts.k_max.max(2) {
                let start = if fam.len() == 1 { 0 } else { fam[fam.len() - 1] + 1 };
                for j in (start..sets.len()).rev() {
                    if fam.contains(&j) {
                        continue;
                    }
                    let sep = family_separation(
                        group,
                        &[sets[fam[fam.len() - 1]].clone(), sets[j].clone()],
                        c,
                        opts.mode,
                    )?;
                    if !sep.separated {
                        continue;
                    }
                    let mut ok = true;
                    for &i in &fam[..fam.len() - 1] {
                        if !family_separation(group, &[sets[i].clone(), sets[j].clone()], c, opts.mode)?.separated {
                            ok = false;
                            break;
                        }
                    }
                    if ok {
                        let mut f = fam.clone();
                        f.push(j);
                        stack.push(f);
                    }
                }
            }
            if families.len() > opts.instance_cap {
                break;
            }
        }
    }

    for fam in &families {
        let extra = fam.len() - 1;
        let total = targets.len().pow(extra as u32);
        for code in 0..total {
            if checked >= opts.instance_cap {
                return Ok(report(Verdict::Inconclusive, checked, None));
            }
            let mut picks = Vec::with_capacity(fam.len());
            picks.push(z.clone());
            let mut rest = code;
            for _ in 0..extra {
                picks.push(targets[rest % targets.len()].clone());
                rest /= targets.len();
            }
            let segs: Vec<OrbitSegment> = fam
                .iter()
                .zip(&picks)
                .map(|(&i, t)| OrbitSegment::new(sets[i].clone(), t.clone()))
                .collect();
            let inst =
                SpecificationInstance::new(action.clone(), epsilon.clone(), c, segs, opts.mode, Some(z.clone()))?;
            checked += 1;
            let r = search_tracing_point(&inst, &opts.scope)?;
            if !r.found {
                let cx = Counterexample {
                    lambdas: inst.lambdas(),
                    targets: picks,
                    search_scope: r.search_scope,
                };
                return Ok(report(Verdict::Fail, checked, Some(cx)));
            }
        }
    }
    Ok(report(Verdict::Pass, checked, None))
}

/// Points of the shift's default target pool.
pub fn shift_target_pool(alphabet: u8, period: usize) -> Vec<Point> {
    ShiftPoint::all_periodic(alphabet, period)
        .into_iter()
        .map(Point::Seq)
        .collect()
}
