//! Turns config sections into engine objects.

use unispec::chaos::OpenSetSpec;
use unispec::exact::{parse_q, Dyadic, Q};
use unispec::group::{Family, GroupElement, GroupSpec, GroupSubset};
use unispec::space::{Action, Carrier, CarrierMap, FiniteMetric, IntervalGrid, Point, ShiftPoint};
use unispec::spec::{OrbitSegment, SpecificationInstance};

use crate::config::{ActionConfig, CarrierConfig, ExperimentConfig, FamilyConfig, GroupConfig, OpenConfig};
use crate::error::CliError;

fn bad(path: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{path}: {msg}"))
}

pub fn q_field(path: &str, text: &str) -> Result<Q, CliError> {
    parse_q(text).map_err(|e| bad(path, e))
}

fn dyadic_field(path: &str, text: &str) -> Result<Dyadic, CliError> {
    text.trim().parse().map_err(|e| bad(path, e))
}

pub fn group(cfg: &GroupConfig) -> Result<GroupSpec, CliError> {
    let base = match (&cfg.name, &cfg.table) {
        (Some(_), Some(_)) => return Err(bad("group", "give either name or table")),
        (Some(n), None) => GroupSpec::from_name(n).map_err(|e| bad("group.name", e))?,
        (None, Some(t)) => GroupSpec::standard(Family::FiniteTable(t.clone())).map_err(|e| bad("group.table", e))?,
        (None, None) => return Err(bad("group", "name or table is required")),
    };
    match &cfg.generators {
        None => Ok(base),
        Some(gens) => {
            let elems = gens
                .iter()
                .map(|g| base.parse_element(g))
                .collect::<unispec::Result<Vec<_>>>()
                .map_err(|e| bad("group.generators", e))?;
            GroupSpec::new(base.family().clone(), elems).map_err(|e| bad("group.generators", e))
        }
    }
}

pub fn carrier(cfg: &CarrierConfig) -> Result<Carrier, CliError> {
    carrier_at("carrier", cfg)
}

fn carrier_at(path: &str, cfg: &CarrierConfig) -> Result<Carrier, CliError> {
    match cfg {
        CarrierConfig::Finite {
            values,
            harmonic,
            discrete,
            labels,
            metric,
        } => {
            let given = [
                values.is_some(),
                harmonic.is_some(),
                discrete.is_some(),
                metric.is_some(),
            ];
            if given.iter().filter(|&&b| b).count() != 1 {
                return Err(bad(path, "give exactly one of values, harmonic, discrete, metric"));
            }
            let f = if let Some(v) = values {
                let qs = v
                    .iter()
                    .map(|s| q_field(&format!("{path}.values"), s))
                    .collect::<Result<Vec<_>, _>>()?;
                FiniteMetric::on_line(&qs)
            } else if let Some(n) = harmonic {
                FiniteMetric::harmonic(*n)
            } else if let Some(n) = discrete {
                FiniteMetric::discrete(*n)
            } else {
                let rows = metric.as_ref().expect("checked above");
                let m = rows
                    .iter()
                    .map(|r| r.iter().map(|s| q_field(&format!("{path}.metric"), s)).collect())
                    .collect::<Result<Vec<Vec<Q>>, _>>()?;
                let labels = labels
                    .clone()
                    .unwrap_or_else(|| (0..m.len()).map(|i| i.to_string()).collect());
                FiniteMetric::new(labels, m)
            }
            .map_err(|e| bad(path, e))?;
            if labels.is_some() && metric.is_none() {
                return Err(bad(&format!("{path}.labels"), "labels go with an explicit metric"));
            }
            Ok(Carrier::Finite(f))
        }
        CarrierConfig::Grid {
            lo,
            hi,
            step,
            ambient_lo,
            ambient_hi,
        } => {
            let lo_d = dyadic_field(&format!("{path}.lo"), lo)?;
            let hi_d = dyadic_field(&format!("{path}.hi"), hi)?;
            let alo = match ambient_lo {
                Some(s) => dyadic_field(&format!("{path}.ambient_lo"), s)?,
                None => lo_d,
            };
            let ahi = match ambient_hi {
                Some(s) => dyadic_field(&format!("{path}.ambient_hi"), s)?,
                None => hi_d,
            };
            let step = dyadic_field(&format!("{path}.step"), step)?;
            Ok(Carrier::Grid(
                IntervalGrid::new(lo_d, hi_d, step, alo, ahi).map_err(|e| bad(path, e))?,
            ))
        }
        CarrierConfig::Shift { alphabet } => {
            if *alphabet > 10 {
                return Err(bad(&format!("{path}.alphabet"), "at most 10 symbols in text form"));
            }
            Carrier::shift(*alphabet).map_err(|e| bad(path, e))
        }
        CarrierConfig::Product { left, right } => {
            let a = carrier_at(&format!("{path}.left"), left)?;
            let b = carrier_at(&format!("{path}.right"), right)?;
            Carrier::product(&a, &b).map_err(|e| bad(path, e))
        }
    }
}

fn factors(cfg: &CarrierConfig) -> Option<(Carrier, Carrier)> {
    match cfg {
        CarrierConfig::Product { left, right } => Some((carrier(left).ok()?, carrier(right).ok()?)),
        _ => None,
    }
}

fn as_perm(m: &CarrierMap, n: usize) -> Option<Vec<usize>> {
    match m {
        CarrierMap::Identity => Some((0..n).collect()),
        CarrierMap::Permutation(p) => Some(p.clone()),
        _ => None,
    }
}

/// Parses one generator map. `cfg` is the carrier's config, needed to
/// split `pair` maps over the factors.
pub fn parse_map(text: &str, carrier: &Carrier, cfg: &CarrierConfig) -> Result<CarrierMap, unispec::Error> {
    use unispec::Error;
    let t = text.trim();
    if let Some(rest) = t.strip_prefix("pair") {
        let (a, b) = rest
            .split_once('|')
            .ok_or_else(|| Error::Parse(format!("expected `pair <map> | <map>`, got {t:?}")))?;
        let Some((lc, rc)) = factors(cfg) else {
            return Err(Error::mismatch("pair maps need a product carrier"));
        };
        let CarrierConfig::Product { left, right } = cfg else {
            unreachable!()
        };
        let fa = parse_map(a, &lc, left)?;
        let fb = parse_map(b, &rc, right)?;
        if let (Carrier::Finite(x), Carrier::Finite(y)) = (&lc, &rc) {
            let (n, m) = (x.len(), y.len());
            let (Some(pa), Some(pb)) = (as_perm(&fa, n), as_perm(&fb, m)) else {
                return Err(Error::mismatch("finite factors take perm or id maps"));
            };
            return Ok(CarrierMap::Permutation(
                (0..n * m).map(|k| pa[k / m] * m + pb[k % m]).collect(),
            ));
        }
        return Ok(CarrierMap::pair(fa, fb));
    }
    let mut words = t.split_whitespace();
    let head = words.next().unwrap_or("");
    let rest: Vec<&str> = words.collect();
    let dy = |s: &str| -> Result<Dyadic, Error> { s.parse() };
    let m = match (head, rest.as_slice()) {
        ("id", []) => CarrierMap::Identity,
        ("perm", p) => CarrierMap::Permutation(
            p.iter()
                .map(|s| s.parse::<usize>().map_err(|_| Error::Parse(format!("bad index {s:?}"))))
                .collect::<Result<_, _>>()?,
        ),
        ("affine", [s, o]) => CarrierMap::affine(dy(s)?, dy(o)?),
        ("translate", [o]) => CarrierMap::translation(dy(o)?),
        ("shift", [k, tail @ ..]) => {
            let by: i64 = k.parse().map_err(|_| Error::Parse(format!("bad shift amount {k:?}")))?;
            let Carrier::Shift { alphabet } = carrier.base() else {
                return Err(Error::mismatch("shift maps need a shift carrier"));
            };
            match tail {
                [] => CarrierMap::shift_by(by, *alphabet),
                ["relabel", r @ ..] => CarrierMap::Shift {
                    by,
                    relabel: r
                        .iter()
                        .map(|s| s.parse::<u8>().map_err(|_| Error::Parse(format!("bad symbol {s:?}"))))
                        .collect::<Result<_, _>>()?,
                },
                _ => return Err(Error::Parse(format!("unexpected {tail:?} after shift"))),
            }
        }
        _ => return Err(Error::Parse(format!("unknown map {t:?}"))),
    };
    m.validate(carrier)?;
    Ok(m)
}

pub fn action(
    group: GroupSpec,
    carrier: Carrier,
    carrier_cfg: &CarrierConfig,
    cfg: &ActionConfig,
    fallback: &str,
) -> Result<Action, CliError> {
    let name = cfg.name.clone().unwrap_or_else(|| fallback.to_string());
    match (&cfg.maps, cfg.trivial) {
        (Some(_), true) => Err(bad("action", "give either maps or trivial = true")),
        (None, true) => Action::trivial(name, group, carrier).map_err(CliError::building),
        (None, false) => Err(bad("action.maps", "maps are required unless trivial = true")),
        (Some(texts), false) => {
            if texts.len() != group.generators().len() {
                return Err(bad(
                    "action.maps",
                    format!(
                        "{} maps for {} generators (inverses included)",
                        texts.len(),
                        group.generators().len()
                    ),
                ));
            }
            let maps = texts
                .iter()
                .enumerate()
                .map(|(i, t)| parse_map(t, &carrier, carrier_cfg).map_err(|e| bad(&format!("action.maps[{i}]"), e)))
                .collect::<Result<Vec<_>, _>>()?;
            Action::build(name, group, carrier, maps).map_err(CliError::building)
        }
    }
}

/// The action a config describes, built from its group, carrier and action sections.
pub fn system(cfg: &ExperimentConfig) -> Result<Action, CliError> {
    let g = group(cfg.group.as_ref().ok_or_else(|| bad("group", "section is required"))?)?;
    let ccfg = cfg
        .carrier
        .as_ref()
        .ok_or_else(|| bad("carrier", "section is required"))?;
    let c = carrier(ccfg)?;
    let acfg = cfg
        .action
        .as_ref()
        .ok_or_else(|| bad("action", "section is required"))?;
    action(g, c, ccfg, acfg, &cfg.name)
}

pub fn point(carrier: &Carrier, path: &str, text: &str) -> Result<Point, CliError> {
    carrier.parse_point(text).map_err(|e| bad(path, e))
}

pub fn points(carrier: &Carrier, path: &str, texts: &[String]) -> Result<Vec<Point>, CliError> {
    texts
        .iter()
        .enumerate()
        .map(|(i, t)| point(carrier, &format!("{path}[{i}]"), t))
        .collect()
}

/// Every word on `[lo, hi]` over a zero background, in lexicographic order.
pub fn block_points(alphabet: u8, lo: i64, hi: i64) -> Vec<Point> {
    let len = (hi - lo + 1) as u32;
    let total = (alphabet as u64).pow(len);
    (0..total)
        .map(|mut code| {
            let mut w = vec![0u8; len as usize];
            for s in w.iter_mut().rev() {
                *s = (code % alphabet as u64) as u8;
                code /= alphabet as u64;
            }
            Point::Seq(ShiftPoint::block(&w, lo, 0))
        })
        .collect()
}

/// The entropy compact set: explicit points, shift blocks or the whole carrier.
pub fn k_set(carrier: &Carrier, k: &Option<Vec<String>>, blocks: &Option<[i64; 2]>) -> Result<Vec<Point>, CliError> {
    if let Some(texts) = k {
        return points(carrier, "entropy.k", texts);
    }
    if let Some([lo, hi]) = blocks {
        let Carrier::Shift { alphabet } = carrier.base() else {
            return Err(bad("entropy.k_blocks", "needs a shift carrier"));
        };
        return Ok(block_points(*alphabet, *lo, *hi));
    }
    carrier
        .points()
        .ok_or_else(|| bad("entropy.k", "this carrier has no finite point list; give k or k_blocks"))
}

pub fn element(group: &GroupSpec, path: &str, text: &str) -> Result<GroupElement, CliError> {
    group.parse_element(text).map_err(|e| bad(path, e))
}

pub fn subset(group: &GroupSpec, path: &str, texts: &[String]) -> Result<GroupSubset, CliError> {
    let elems = texts
        .iter()
        .map(|t| element(group, path, t))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GroupSubset::finite(elems))
}

pub fn open(carrier: &Carrier, path: &str, cfg: &OpenConfig) -> Result<OpenSetSpec, CliError> {
    match cfg {
        OpenConfig::Ball { center, radius } => {
            let c = point(carrier, &format!("{path}.center"), center)?;
            let r = q_field(&format!("{path}.radius"), radius)?;
            OpenSetSpec::ball(c, r).map_err(|e| bad(path, e))
        }
        OpenConfig::Cylinder { start, word } => {
            let symbols = word
                .chars()
                .map(|c| c.to_digit(10).map(|d| d as u8))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| bad(&format!("{path}.word"), "symbols are single digits"))?;
            OpenSetSpec::cylinder(*start, symbols).map_err(|e| bad(path, e))
        }
    }
}

/// A specification instance; validation failures (e.g. index sets too
/// close) are config errors.
pub fn instance(
    action: &Action,
    path: &str,
    families: &[FamilyConfig],
    anchor: &Option<String>,
    epsilon: Q,
    c: u64,
    mode: unispec::spec::SeparationMode,
) -> Result<SpecificationInstance, CliError> {
    let carrier = action.carrier();
    let segs = families
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let p = format!("{path}.families[{i}]");
            Ok(OrbitSegment::new(
                subset(action.group(), &format!("{p}.lambda"), &f.lambda)?,
                point(carrier, &format!("{p}.target"), &f.target)?,
            ))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let anchor = anchor
        .as_ref()
        .map(|a| point(carrier, &format!("{path}.anchor"), a))
        .transpose()?;
    SpecificationInstance::new(action.clone(), epsilon, c, segs, mode, anchor).map_err(|e| bad(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shift_cfg() -> CarrierConfig {
        CarrierConfig::Shift { alphabet: 2 }
    }

    #[test]
    fn map_texts_parse() {
        let c = carrier(&shift_cfg()).unwrap();
        assert_eq!(
            parse_map("shift 1", &c, &shift_cfg()).unwrap(),
            CarrierMap::shift_by(1, 2)
        );
        assert_eq!(
            parse_map("shift 0 relabel 1 0", &c, &shift_cfg()).unwrap(),
            CarrierMap::relabel(vec![1, 0])
        );
        assert!(parse_map("affine 2 0", &c, &shift_cfg()).is_err());
        assert!(parse_map("bogus", &c, &shift_cfg()).is_err());
    }

    #[test]
    fn finite_pair_maps_flatten() {
        let f = CarrierConfig::Finite {
            values: None,
            harmonic: None,
            discrete: Some(2),
            labels: None,
            metric: None,
        };
        let cfg = CarrierConfig::Product {
            left: Box::new(f.clone()),
            right: Box::new(f),
        };
        let c = carrier(&cfg).unwrap();
        let m = parse_map("pair perm 1 0 | id", &c, &cfg).unwrap();
        assert_eq!(m, CarrierMap::Permutation(vec![2, 3, 0, 1]));
    }

    #[test]
    fn blocks_enumerate_every_word() {
        let k = block_points(2, -1, 1);
        assert_eq!(k.len(), 8);
        let mut sorted = k.clone();
        sorted.dedup();
        assert_eq!(sorted.len(), 8);
    }
}
