//! Everything a run needs, rebuilt from a config alone. `run` and `verify`
//! both start here, so a bundle is checked against freshly built objects.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use unispec::chaos::{example_gallery, ChaosConfig};
use unispec::entropy::{EntropyOptions, SolveMode, DEFAULT_NODE_BUDGET};
use unispec::exact::Q;
use unispec::group::{GroupElement, GroupSpec};
use unispec::space::{Action, Carrier, Point, ShiftPoint};
use unispec::spec::{CyclicBlocks, SearchScope, SpecPointOptions, SpecificationInstance};

use crate::build;
use crate::config::{ExperimentConfig, Kind, Solver};
use crate::error::CliError;

pub struct EntropySetup {
    pub action: Action,
    pub k: Vec<Point>,
    pub opts: EntropyOptions,
}

pub struct PointSetup {
    pub anchors: Vec<Point>,
    pub epsilon: Q,
    pub c: u64,
    pub opts: SpecPointOptions,
}

pub struct TwoPointSetup {
    pub x: Point,
    pub y: Point,
    pub epsilon: Q,
    pub c_x: u64,
    pub c_y: u64,
    pub ns: Vec<usize>,
    pub generator: GroupElement,
}

pub struct WordMetricSetup {
    pub group: GroupSpec,
    pub a: GroupElement,
    pub b: GroupElement,
}

#[derive(Default)]
pub struct Setup {
    pub action: Option<Action>,
    pub entropy: Option<EntropySetup>,
    pub chaos: Option<ChaosConfig>,
    /// periodic-specification premise reported with the chaos verdicts
    pub premise: Option<PointSetup>,
    pub instances: Vec<SpecificationInstance>,
    pub scope: SearchScope,
    pub points: Option<PointSetup>,
    pub cyclic: Vec<CyclicBlocks>,
    pub two_point: Option<TwoPointSetup>,
    pub word_metric: Option<WordMetricSetup>,
}

fn solve_mode(s: Solver) -> SolveMode {
    match s {
        Solver::Exact => SolveMode::Exact,
        Solver::Greedy => SolveMode::Greedy,
    }
}

fn q_list(path: &str, texts: &[String]) -> Result<Vec<Q>, CliError> {
    texts.iter().map(|t| build::q_field(path, t)).collect()
}

/// Sensitivity sample: explicit points, or `count` carrier points drawn
/// with the seed (periodic points of period <= 4 on shifts).
fn sample(carrier: &Carrier, explicit: &Option<Vec<String>>, count: usize, seed: u64) -> Result<Vec<Point>, CliError> {
    if let Some(texts) = explicit {
        return build::points(carrier, "chaos.sample", texts);
    }
    let pool = match (carrier.points(), carrier.base()) {
        (Some(p), _) => p,
        (None, Carrier::Shift { alphabet }) => ShiftPoint::all_periodic(*alphabet, 4)
            .into_iter()
            .map(Point::Seq)
            .collect(),
        _ => {
            return Err(CliError::Config(
                "chaos.sample: this carrier needs an explicit sample".into(),
            ))
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked: Vec<Point> = pool.choose_multiple(&mut rng, count.min(pool.len())).cloned().collect();
    picked.sort();
    Ok(picked)
}

impl Setup {
    pub fn from_config(cfg: &ExperimentConfig) -> Result<Setup, CliError> {
        match cfg.kind {
            Kind::Gallery => Self::gallery(cfg),
            Kind::WordMetric => {
                let w = cfg.word_metric.as_ref().expect("validated");
                let group = build::group(cfg.group.as_ref().expect("validated"))?;
                Ok(Setup {
                    word_metric: Some(WordMetricSetup {
                        a: build::element(&group, "word-metric.a", &w.a)?,
                        b: build::element(&group, "word-metric.b", &w.b)?,
                        group,
                    }),
                    ..Default::default()
                })
            }
            _ => Self::system(cfg),
        }
    }

    fn gallery(cfg: &ExperimentConfig) -> Result<Setup, CliError> {
        let sec = cfg.gallery.as_ref().expect("validated");
        let g = example_gallery(&sec.entry).map_err(CliError::building)?;
        let mut opts = g.entropy.clone();
        if let Some(b) = sec.budget_nodes {
            opts.budget = b;
        }
        Ok(Setup {
            entropy: Some(EntropySetup {
                action: g.entropy_action.clone(),
                k: g.k.clone(),
                opts,
            }),
            chaos: Some(g.chaos.clone()),
            premise: None,
            instances: g.instances.clone(),
            scope: SearchScope::default(),
            points: sec.point_checks.then(|| PointSetup {
                anchors: g.anchors.clone(),
                epsilon: g.spec_epsilon.clone(),
                c: g.spec_c,
                opts: g.spec_options.clone(),
            }),
            cyclic: g.cyclic.clone(),
            action: Some(g.action),
            two_point: None,
            word_metric: None,
        })
    }

    fn system(cfg: &ExperimentConfig) -> Result<Setup, CliError> {
        let action = build::system(cfg)?;
        let carrier = action.carrier().clone();
        let mut setup = Setup::default();
        if let Some(e) = &cfg.entropy {
            let ent_action = match &e.restrict_to {
                Some(s) => {
                    let g = build::element(action.group(), "entropy.restrict_to", s)?;
                    action.cyclic_restriction(&g).map_err(CliError::building)?
                }
                None => action.clone(),
            };
            let mut opts = EntropyOptions::new(e.n_max, q_list("entropy.epsilons", &e.epsilons)?);
            opts.n_min = e.n_min;
            opts.spanning = e.spanning;
            opts.mode = solve_mode(e.solver);
            opts.budget = e.budget_nodes.unwrap_or(DEFAULT_NODE_BUDGET);
            setup.entropy = Some(EntropySetup {
                action: ent_action,
                k: build::k_set(&carrier, &e.k, &e.k_blocks)?,
                opts,
            });
        }
        if let Some(s) = &cfg.specification {
            let eps = build::q_field("specification.epsilon", &s.epsilon)?;
            let mut scope = SearchScope::default().with_period_bound(s.period_bound);
            scope.periodic_only = s.periodic_only;
            setup.scope = scope.clone();
            for (i, inst) in s.instance.iter().enumerate() {
                setup.instances.push(build::instance(
                    &action,
                    &format!("specification.instance[{i}]"),
                    &inst.families,
                    &inst.anchor,
                    eps.clone(),
                    s.c,
                    s.mode,
                )?);
            }
            if let Some(p) = &s.point {
                setup.points = Some(PointSetup {
                    anchors: build::points(&carrier, "specification.point.anchors", &p.anchors)?,
                    epsilon: eps.clone(),
                    c: s.c,
                    opts: SpecPointOptions {
                        k_max: p.k_max,
                        horizon: p.horizon,
                        max_set_size: p.max_set_size,
                        instance_cap: p.instance_cap,
                        targets: p
                            .targets
                            .as_ref()
                            .map(|t| build::points(&carrier, "specification.point.targets", t))
                            .transpose()?,
                        mode: s.mode,
                        scope: scope.clone(),
                    },
                });
            }
            if let Some(t) = &s.two_point {
                setup.two_point = Some(TwoPointSetup {
                    x: build::point(&carrier, "specification.two-point.x", &t.x)?,
                    y: build::point(&carrier, "specification.two-point.y", &t.y)?,
                    epsilon: eps.clone(),
                    c_x: t.c_x,
                    c_y: t.c_y,
                    ns: t.n.clone(),
                    generator: build::element(action.group(), "specification.two-point.generator", &t.generator)?,
                });
            }
        }
        if let Some(c) = &cfg.chaos {
            let opens = c
                .opens
                .iter()
                .enumerate()
                .map(|(i, o)| build::open(&carrier, &format!("chaos.opens[{i}]"), o))
                .collect::<Result<Vec<_>, _>>()?;
            setup.chaos = Some(ChaosConfig {
                opens,
                horizon: c.horizon,
                orbit_bound: c.orbit_bound,
                sample: sample(&carrier, &c.sample, c.sample_count, cfg.seed)?,
                deltas: q_list("chaos.deltas", &c.deltas)?,
                radii: q_list("chaos.radii", &c.radii)?,
            });
            if let Some(p) = &c.premise {
                let scope = SearchScope::default().with_period_bound(p.period_bound).periodic();
                setup.premise = Some(PointSetup {
                    anchors: vec![build::point(&carrier, "chaos.premise.anchor", &p.anchor)?],
                    epsilon: build::q_field("chaos.premise.epsilon", &p.epsilon)?,
                    c: p.c,
                    opts: SpecPointOptions {
                        horizon: p.horizon,
                        mode: p.mode,
                        scope,
                        ..Default::default()
                    },
                });
            }
        }
        setup.action = Some(action);
        Ok(setup)
    }
}
