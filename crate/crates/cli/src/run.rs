//! Dispatch by experiment kind.

use unispec::chaos::devaney_report;
use unispec::chaos::two_point_entropy_bound;
use unispec::entropy::{estimate_entropy, SolveMode};
use unispec::exact::{q_to_f64, q_to_string};
use unispec::spec::{check_specification_point, search_tracing_point};

use crate::bundle::Bundle;
use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::report::{
    sig, ChaosRecord, CountRecord, CyclicRecord, EstimateRecord, RateRecord, Record, SpecPointRecord, TracingRecord,
    TwoPointRecord, WordMetricRecord,
};
use crate::setup::{EntropySetup, Setup};
use crate::table::{emit_table, Row};

/// Largest distance for which a geodesic word is reported.
const WORD_RADIUS: u64 = 10;

#[derive(Default)]
struct Outcome {
    rows: Vec<Row>,
    records: Vec<Record>,
    log: Vec<String>,
}

pub fn eps_text(eps: &unispec::exact::Q) -> String {
    sig(q_to_f64(eps))
}

fn entropy(e: &EntropySetup, out: &mut Outcome) -> Result<(), CliError> {
    let est = estimate_entropy(&e.action, &e.k, &e.opts)?;
    let name = est.action.clone();
    for r in &est.rows {
        let method = match &r.r {
            Some(sp) if sp.method != r.s.method => format!("{}/{}", r.s.method.as_str(), sp.method.as_str()),
            _ => r.s.method.as_str().to_string(),
        };
        out.rows.push(Row {
            action: name.clone(),
            n: r.n,
            epsilon: eps_text(&r.epsilon),
            s_n: r.s.value,
            s_exact: r.s.exact,
            r_n: r.r.as_ref().map(|c| c.value),
            r_exact: r.r.as_ref().map(|c| c.exact),
            method,
        });
        out.records.push(Record::Separated(CountRecord::new(
            &name,
            r.n,
            &r.epsilon,
            &r.s,
            e.k.len(),
            e.opts.budget,
        )));
        if let Some(sp) = &r.r {
            out.records.push(Record::Spanning(CountRecord::new(
                &name,
                r.n,
                &r.epsilon,
                sp,
                e.k.len(),
                e.opts.budget,
            )));
        }
    }
    for rate in &est.rates {
        out.log.push(format!(
            "entropy ε = {}: rate {} (raw {}), censored n {:?}",
            q_to_string(&rate.epsilon),
            sig(rate.rate),
            sig(rate.raw_rate),
            rate.censored
        ));
        out.records.push(Record::Rate(RateRecord::new(&name, rate)));
    }
    let schedule: Vec<String> = e.opts.epsilons.iter().map(q_to_string).collect();
    out.records.push(Record::Estimate(EstimateRecord {
        action: name.clone(),
        k_size: est.k_size,
        estimate: sig(est.estimate),
        counts_constant: est.separated_counts_constant(),
        notes: est.notes.clone(),
        scope: format!(
            "n = {}..{}, ε in [{}], |K| = {}, {} solver, node budget {}",
            e.opts.n_min,
            e.opts.n_max,
            schedule.join(", "),
            e.k.len(),
            if e.opts.mode == SolveMode::Exact {
                "exact"
            } else {
                "greedy"
            },
            e.opts.budget
        ),
    }));
    out.log
        .push(format!("entropy estimate for {name}: {}", sig(est.estimate)));
    Ok(())
}

fn execute(cfg: &ExperimentConfig, setup: &Setup) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    out.log.push(format!("experiment {} ({:?})", cfg.name, cfg.kind));
    if let Some(e) = &setup.entropy {
        entropy(e, &mut out)?;
    }
    for (i, inst) in setup.instances.iter().enumerate() {
        let r = search_tracing_point(inst, &setup.scope)?;
        out.log.push(format!(
            "instance {i}: {} -> {}",
            inst.describe(),
            if r.found { "traced" } else { "no tracing point" }
        ));
        out.records.push(Record::Tracing(TracingRecord::new(i, inst, &r)?));
    }
    if let (Some(p), Some(action)) = (&setup.points, &setup.action) {
        for z in &p.anchors {
            let r = check_specification_point(action, z, &p.epsilon, p.c, &p.opts)?;
            out.log.push(format!(
                "specification point {z}: {} after {} instances",
                r.verdict.as_str(),
                r.instances_checked
            ));
            out.records.push(Record::SpecPoint(SpecPointRecord::new(&r)));
        }
    }
    for (i, b) in setup.cyclic.iter().enumerate() {
        let rt = b.round_trip(&setup.scope)?;
        out.log.push(format!(
            "cyclic blocks {i} along {}: trace {}, classical {:?}",
            b.generator, rt.trace.found, rt.classical
        ));
        out.records.push(Record::CyclicRoundTrip(CyclicRecord::new(i, b, &rt)));
    }
    if let (Some(t), Some(action)) = (&setup.two_point, &setup.action) {
        for &n in &t.ns {
            let b = two_point_entropy_bound(
                action,
                &t.x,
                &t.y,
                &t.epsilon,
                t.c_x,
                t.c_y,
                n,
                &t.generator,
                &setup.scope,
            )?;
            out.log.push(format!(
                "two-point n = {n}: {}/{} traced, exact count {}, confirmed {}",
                b.traced,
                b.tuples,
                b.exact_count,
                b.confirmed()
            ));
            out.rows.push(Row {
                action: action.name().to_string(),
                n: n * b.m as usize,
                epsilon: eps_text(&b.epsilon),
                s_n: b.exact_count,
                s_exact: b.exact,
                r_n: None,
                r_exact: None,
                method: "two_point".into(),
            });
            out.records.push(Record::TwoPoint(TwoPointRecord::new(
                action.name(),
                &t.x.to_string(),
                &t.y.to_string(),
                &b,
                &setup.scope,
            )));
        }
    }
    if let (Some(c), Some(action)) = (&setup.chaos, &setup.action) {
        let premise = match &setup.premise {
            Some(p) => Some(check_specification_point(
                action,
                &p.anchors[0],
                &p.epsilon,
                p.c,
                &p.opts,
            )?),
            None => None,
        };
        let r = devaney_report(action, c, premise)?;
        out.log.push(format!(
            "chaos: transitive {}, mixing {}, dense periodic {}, sensitive {}, devaney {}",
            r.transitive.verdict.as_str(),
            r.mixing.verdict.as_str(),
            r.dense_periodic.verdict.as_str(),
            r.sensitive.verdict.as_str(),
            r.devaney.as_str()
        ));
        out.records.push(Record::Chaos(ChaosRecord::new(&r)));
    }
    if let Some(w) = &setup.word_metric {
        let distance = w.group.word_metric(&w.a, &w.b)?;
        let word = if distance <= WORD_RADIUS {
            let diff = w.group.op(&w.group.inverse(&w.a)?, &w.b)?;
            let ball = w.group.word_ball(distance as usize)?;
            ball.word(&diff)
                .map(|idx| idx.iter().map(|&i| w.group.generators()[i].to_string()).collect())
        } else {
            None
        };
        out.log.push(format!("word metric d({}, {}) = {distance}", w.a, w.b));
        out.records.push(Record::WordMetric(WordMetricRecord {
            group: w.group.family_name(),
            generators: w.group.generators().iter().map(|g| g.to_string()).collect(),
            a: w.a.to_string(),
            b: w.b.to_string(),
            distance,
            word,
        }));
    }
    Ok(out)
}

/// Runs a validated config and assembles its bundle.
pub fn run(cfg: &ExperimentConfig) -> Result<Bundle, CliError> {
    let setup = Setup::from_config(cfg)?;
    let out = execute(cfg, &setup)?;
    Ok(Bundle {
        config: cfg.clone(),
        table: emit_table(&out.rows)?,
        records: out.records,
        log: out.log,
    })
}

/// [`run`] on a dedicated pool of `threads` workers, or the global pool.
pub fn run_with_threads(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<Bundle, CliError> {
    match threads {
        None => run(cfg),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Run(e.to_string()))?
            .install(|| run(cfg)),
    }
}
