//! Closed-form bijections of carriers.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::carrier::{Carrier, IntervalGrid, Point};
use super::shift::ShiftPoint;
use crate::error::{Error, Result};
use crate::exact::Dyadic;

/// A bijective self-map of a carrier given in closed form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CarrierMap {
    Identity,
    /// point `i` goes to `perm[i]`
    Permutation(Vec<usize>),
    /// `x ↦ scale·x + offset`; `scale` must be `±2^k`
    Affine {
        scale: Dyadic,
        offset: Dyadic,
    },
    /// `(Φx)_i = relabel[x_{i+by}]`
    Shift {
        by: i64,
        relabel: Vec<u8>,
    },
    Pair(Box<CarrierMap>, Box<CarrierMap>),
}

impl CarrierMap {
    pub fn affine(scale: Dyadic, offset: Dyadic) -> Self {
        CarrierMap::Affine { scale, offset }
    }

    pub fn translation(offset: Dyadic) -> Self {
        CarrierMap::Affine {
            scale: Dyadic::ONE,
            offset,
        }
    }

    /// The left shift `(σx)_n = x_{n+1}` composed `by` times.
    pub fn shift_by(by: i64, alphabet: u8) -> Self {
        CarrierMap::Shift {
            by,
            relabel: (0..alphabet).collect(),
        }
    }

    pub fn relabel(perm: Vec<u8>) -> Self {
        CarrierMap::Shift { by: 0, relabel: perm }
    }

    pub fn pair(a: CarrierMap, b: CarrierMap) -> Self {
        CarrierMap::Pair(Box::new(a), Box::new(b))
    }

    /// Checks that the map is a bijection of the given carrier.
    pub fn validate(&self, carrier: &Carrier) -> Result<()> {
        match (self, carrier.base()) {
            (CarrierMap::Identity, _) => Ok(()),
            (CarrierMap::Permutation(p), Carrier::Finite(f)) => {
                if p.len() != f.len() {
                    return Err(Error::NonBijective(format!(
                        "permutation has {} entries for {} points",
                        p.len(),
                        f.len()
                    )));
                }
                let mut seen = vec![false; p.len()];
                for &v in p {
                    if v >= p.len() || std::mem::replace(&mut seen[v], true) {
                        return Err(Error::NonBijective(format!("{p:?} is not a permutation")));
                    }
                }
                Ok(())
            }
            (CarrierMap::Affine { scale, .. }, Carrier::Grid(_)) => {
                if scale.is_zero() {
                    Err(Error::NonBijective("affine map with zero scale".into()))
                } else if !scale.is_unit_scale() {
                    Err(Error::NonBijective(format!(
                        "scale {scale} is not ±2^k, so the inverse leaves the dyadic grid"
                    )))
                } else {
                    Ok(())
                }
            }
            (CarrierMap::Shift { relabel, .. }, Carrier::Shift { alphabet }) => {
                if relabel.len() != *alphabet as usize {
                    return Err(Error::NonBijective(format!(
                        "relabeling has {} entries for alphabet {alphabet}",
                        relabel.len()
                    )));
                }
                let mut seen = vec![false; relabel.len()];
                for &v in relabel {
                    if v >= *alphabet || std::mem::replace(&mut seen[v as usize], true) {
                        return Err(Error::NonBijective(format!("{relabel:?} is not a symbol permutation")));
                    }
                }
                Ok(())
            }
            (CarrierMap::Pair(a, b), Carrier::Product(ca, cb)) => {
                a.validate(ca)?;
                b.validate(cb)
            }
            _ => Err(Error::mismatch(format!(
                "map {self} does not act on the {} carrier",
                carrier.kind()
            ))),
        }
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &CarrierMap) -> Result<CarrierMap> {
        use CarrierMap::*;
        Ok(match (self, other) {
            (Identity, g) => g.clone(),
            (f, Identity) => f.clone(),
            (Permutation(f), Permutation(g)) if f.len() == g.len() => Permutation(g.iter().map(|&i| f[i]).collect()),
            (Affine { scale: a, offset: b }, Affine { scale: c, offset: d }) => Affine {
                scale: a.checked_mul(*c)?,
                offset: a.checked_mul(*d)?.checked_add(*b)?,
            },
            (Shift { by: m1, relabel: p1 }, Shift { by: m2, relabel: p2 }) if p1.len() == p2.len() => Shift {
                by: m1
                    .checked_add(*m2)
                    .ok_or_else(|| Error::Overflow("shift amount".into()))?,
                relabel: p2.iter().map(|&s| p1[s as usize]).collect(),
            },
            (Pair(a1, b1), Pair(a2, b2)) => Pair(Box::new(a1.compose(a2)?), Box::new(b1.compose(b2)?)),
            _ => return Err(Error::mismatch(format!("cannot compose {self} with {other}"))),
        })
    }

    pub fn inverse(&self) -> Result<CarrierMap> {
        use CarrierMap::*;
        Ok(match self {
            Identity => Identity,
            Permutation(p) => {
                let mut inv = vec![0; p.len()];
                for (i, &v) in p.iter().enumerate() {
                    inv[v] = i;
                }
                Permutation(inv)
            }
            Affine { scale, offset } => {
                let r = scale.recip()?;
                Affine {
                    scale: r,
                    offset: -r.checked_mul(*offset)?,
                }
            }
            Shift { by, relabel } => {
                let mut inv = vec![0; relabel.len()];
                for (i, &v) in relabel.iter().enumerate() {
                    inv[v as usize] = i as u8;
                }
                Shift { by: -by, relabel: inv }
            }
            Pair(a, b) => Pair(Box::new(a.inverse()?), Box::new(b.inverse()?)),
        })
    }

    /// Whether the closed form is the identity.
    pub fn is_identity(&self) -> bool {
        match self {
            CarrierMap::Identity => true,
            CarrierMap::Permutation(p) => p.iter().enumerate().all(|(i, &v)| i == v),
            CarrierMap::Affine { scale, offset } => *scale == Dyadic::ONE && offset.is_zero(),
            CarrierMap::Shift { by, relabel } => *by == 0 && relabel.iter().enumerate().all(|(i, &v)| i == v as usize),
            CarrierMap::Pair(a, b) => a.is_identity() && b.is_identity(),
        }
    }

    /// Exact functional equality of closed forms.
    pub fn same_function(&self, other: &CarrierMap) -> bool {
        match (self, other) {
            (CarrierMap::Identity, g) | (g, CarrierMap::Identity) => g.is_identity(),
            (CarrierMap::Pair(a1, b1), CarrierMap::Pair(a2, b2)) => a1.same_function(a2) && b1.same_function(b2),
            _ => self == other,
        }
    }

    /// Image of a point; grid images are not range-checked here.
    pub fn apply(&self, x: &Point) -> Result<Point> {
        match (self, x) {
            (CarrierMap::Identity, _) => Ok(x.clone()),
            (CarrierMap::Permutation(p), Point::Index(i)) if *i < p.len() => Ok(Point::Index(p[*i])),
            (CarrierMap::Affine { scale, offset }, Point::Real(v)) => {
                Ok(Point::Real(scale.checked_mul(*v)?.checked_add(*offset)?))
            }
            (CarrierMap::Shift { by, relabel }, Point::Seq(s)) => Ok(Point::Seq(s.shifted(*by, relabel))),
            (CarrierMap::Pair(a, b), Point::Pair(x, y)) => Ok(Point::pair(a.apply(x)?, b.apply(y)?)),
            _ => Err(Error::mismatch(format!("map {self} cannot act on {x}"))),
        }
    }

    /// Applies the map and checks the result lies in the carrier (ambient
    /// interval for grids).
    pub fn apply_in(&self, carrier: &Carrier, x: &Point) -> Result<Point> {
        let y = self.apply(x)?;
        check_ambient(carrier, &y)?;
        Ok(y)
    }

    /// Whether the map preserves distances on the carrier.
    pub fn is_isometry(&self, carrier: &Carrier) -> Result<bool> {
        Ok(match (self, carrier.base()) {
            (CarrierMap::Identity, _) => true,
            (CarrierMap::Permutation(p), Carrier::Finite(f)) => {
                (0..p.len()).all(|i| (0..p.len()).all(|j| f.d(p[i], p[j]) == f.d(i, j)))
            }
            (CarrierMap::Affine { scale, .. }, Carrier::Grid(_)) => scale.abs() == Dyadic::ONE,
            (CarrierMap::Shift { by, .. }, Carrier::Shift { .. }) => *by == 0,
            (CarrierMap::Pair(a, b), Carrier::Product(ca, cb)) => a.is_isometry(ca)? && b.is_isometry(cb)?,
            _ => {
                return Err(Error::mismatch(format!(
                    "map {self} does not act on the {} carrier",
                    carrier.kind()
                )))
            }
        })
    }

    /// A point where two maps disagree, searched among simple test points.
    pub fn disagreement(&self, other: &CarrierMap, carrier: &Carrier) -> Result<Option<Point>> {
        if self.same_function(other) {
            return Ok(None);
        }
        for x in probe_points(carrier) {
            if self.apply(&x)? != other.apply(&x)? {
                return Ok(Some(x));
            }
        }
        Ok(probe_points(carrier).into_iter().next())
    }
}

fn check_ambient(carrier: &Carrier, y: &Point) -> Result<()> {
    match (carrier.base(), y) {
        (
            Carrier::Grid(IntervalGrid {
                ambient_lo, ambient_hi, ..
            }),
            Point::Real(v),
        ) => {
            if v < ambient_lo || v > ambient_hi {
                return Err(Error::AmbientOverflow {
                    value: v.to_string(),
                    lo: ambient_lo.to_string(),
                    hi: ambient_hi.to_string(),
                });
            }
            Ok(())
        }
        (Carrier::Product(a, b), Point::Pair(x, y)) => {
            check_ambient(a, x)?;
            check_ambient(b, y)
        }
        _ => Ok(()),
    }
}

/// Small set of points that separates distinct closed-form maps.
fn probe_points(carrier: &Carrier) -> Vec<Point> {
    match carrier.base() {
        Carrier::Finite(f) => (0..f.len()).map(Point::Index).collect(),
        Carrier::Grid(g) => vec![Point::Real(g.lo), Point::Real(g.hi)],
        Carrier::Shift { alphabet } => {
            let mut out = Vec::new();
            for s in 0..*alphabet {
                out.push(Point::Seq(ShiftPoint::block(&[s], 0, (s + 1) % alphabet)));
                out.push(Point::Seq(ShiftPoint::constant(s)));
            }
            out
        }
        Carrier::Product(a, b) => {
            let pa = probe_points(a);
            let pb = probe_points(b);
            pa.iter()
                .flat_map(|x| pb.iter().map(move |y| Point::pair(x.clone(), y.clone())))
                .collect()
        }
        Carrier::Rescaled { inner, .. } => probe_points(inner),
    }
}

impl fmt::Display for CarrierMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CarrierMap::Identity => write!(f, "id"),
            CarrierMap::Permutation(p) => write!(f, "perm{p:?}"),
            CarrierMap::Affine { scale, offset } => write!(f, "x ↦ {scale}·x + {offset}"),
            CarrierMap::Shift { by, relabel } => write!(f, "shift({by}, {relabel:?})"),
            CarrierMap::Pair(a, b) => write!(f, "({a}) × ({b})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::carrier::FiniteMetric;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    #[test]
    fn affine_composition_and_inverse() {
        let double = CarrierMap::affine(d("2"), d("0"));
        let half = double.inverse().unwrap();
        assert!(double.compose(&half).unwrap().is_identity());
        let t = CarrierMap::affine(d("2"), d("0"));
        let conj = t
            .compose(&CarrierMap::translation(d("2")))
            .unwrap()
            .compose(&t.inverse().unwrap())
            .unwrap();
        assert_eq!(conj, CarrierMap::translation(d("4")));
        assert!(CarrierMap::affine(d("3"), d("0"))
            .validate(&Carrier::Grid(
                IntervalGrid::new(d("0"), d("1"), d("0.5"), d("0"), d("1")).unwrap()
            ))
            .is_err());
    }

    #[test]
    fn shift_composition_follows_semantics() {
        let x = ShiftPoint::block(&[1, 0, 1, 1], -1, 0);
        let f = CarrierMap::Shift {
            by: 2,
            relabel: vec![1, 0],
        };
        let g = CarrierMap::Shift {
            by: -1,
            relabel: vec![0, 1],
        };
        let px = Point::Seq(x);
        let direct = f.apply(&g.apply(&px).unwrap()).unwrap();
        assert_eq!(f.compose(&g).unwrap().apply(&px).unwrap(), direct);
        assert!(f.compose(&f.inverse().unwrap()).unwrap().is_identity());
    }

    #[test]
    fn permutations_validate() {
        let c = Carrier::Finite(FiniteMetric::discrete(3).unwrap());
        assert!(CarrierMap::Permutation(vec![2, 0, 1]).validate(&c).is_ok());
        assert!(matches!(
            CarrierMap::Permutation(vec![0, 0, 1]).validate(&c),
            Err(Error::NonBijective(_))
        ));
    }

    #[test]
    fn symbol_swap_commutes_with_shift() {
        let swap = CarrierMap::relabel(vec![1, 0]);
        let s = CarrierMap::shift_by(1, 2);
        assert_eq!(swap.compose(&s).unwrap(), s.compose(&swap).unwrap());
        assert!(swap.is_isometry(&Carrier::shift(2).unwrap()).unwrap());
        assert!(!s.is_isometry(&Carrier::shift(2).unwrap()).unwrap());
    }
}
