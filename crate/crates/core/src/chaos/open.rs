//! Open sets of a carrier: metric balls and shift cylinders.

use std::fmt;

use num_integer::Integer;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{ceil_to_i128, q_serde, q_to_string, Dyadic, Q};
use crate::space::{Carrier, CarrierMap, Point, ShiftPoint};
use crate::spec::{agreement_radius, shift_trace_construct};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OpenSetSpec {
    /// `{ x : d(center, x) < radius }`
    Ball {
        center: Point,
        #[serde(with = "q_serde")]
        radius: Q,
    },
    /// `{ x : x_{start + k} = symbols[k] }`
    Cylinder { start: i64, symbols: Vec<u8> },
}

impl fmt::Display for OpenSetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpenSetSpec::Ball { center, radius } => write!(f, "B({center}, {})", q_to_string(radius)),
            OpenSetSpec::Cylinder { start, symbols } => {
                let w: String = symbols.iter().map(|s| s.to_string()).collect();
                write!(f, "[{w}]@{start}")
            }
        }
    }
}

impl OpenSetSpec {
    pub fn ball(center: Point, radius: Q) -> Result<Self> {
        if !radius.is_positive() {
            return Err(Error::domain("ball radius must be positive"));
        }
        Ok(OpenSetSpec::Ball { center, radius })
    }

    pub fn cylinder(start: i64, symbols: Vec<u8>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::domain("cylinder window is empty"));
        }
        Ok(OpenSetSpec::Cylinder { start, symbols })
    }

    pub fn contains(&self, carrier: &Carrier, x: &Point) -> Result<bool> {
        match self {
            OpenSetSpec::Ball { center, radius } => carrier.within(center, x, radius),
            OpenSetSpec::Cylinder { start, symbols } => match x {
                Point::Seq(s) => Ok(s.window(*start, start + symbols.len() as i64 - 1) == *symbols),
                _ => Err(Error::mismatch(format!("cylinder {self} applied to {x}"))),
            },
        }
    }

    /// Cylinder form on a shift carrier. A ball is replaced by the cylinder
    /// of its center on `[-w, w]`, which lies inside the ball.
    pub fn as_cylinder(&self) -> Option<(i64, Vec<u8>)> {
        match self {
            OpenSetSpec::Cylinder { start, symbols } => Some((*start, symbols.clone())),
            OpenSetSpec::Ball {
                center: Point::Seq(c),
                radius,
            } => {
                let w = agreement_radius(radius) as i64;
                Some((-w, c.window(-w, w)))
            }
            OpenSetSpec::Ball { .. } => None,
        }
    }

    /// Points of the set on finite carriers, and on grids the lattice
    /// `lo + k·step` inside the ambient range.
    pub fn members(&self, carrier: &Carrier) -> Result<Option<Vec<Point>>> {
        match (carrier, self) {
            (Carrier::Finite(f), OpenSetSpec::Ball { .. }) => {
                let mut out = Vec::new();
                for i in 0..f.len() {
                    let p = Point::Index(i);
                    if self.contains(carrier, &p)? {
                        out.push(p);
                    }
                }
                Ok(Some(out))
            }
            (
                Carrier::Grid(g),
                OpenSetSpec::Ball {
                    center: Point::Real(c),
                    radius,
                },
            ) => {
                let (lo, step) = (g.lo.to_q(), g.step.to_q());
                let a = (c.to_q() - radius).max(g.ambient_lo.to_q());
                let b = (c.to_q() + radius).min(g.ambient_hi.to_q());
                let k0 = ceil_to_i128(&((a - &lo) / &step));
                let k1 = ((b - &lo) / &step).floor().to_integer();
                let k1: i128 = k1.try_into().map_err(|_| Error::Overflow("grid index".into()))?;
                let mut out = Vec::new();
                for k in k0..=k1 {
                    let k64 = i64::try_from(k).map_err(|_| Error::Overflow("grid index".into()))?;
                    let x = Dyadic::from_int(k64).checked_mul(g.step)?.checked_add(g.lo)?;
                    let p = Point::Real(x);
                    if self.contains(carrier, &p)? {
                        out.push(p);
                    }
                }
                Ok(Some(out))
            }
            (Carrier::Shift { .. }, _) => Ok(None),
            _ => Err(Error::mismatch(format!(
                "open set {self} is not supported on the {} carrier",
                carrier.kind()
            ))),
        }
    }
}

/// A point `x ∈ U` with `Φ(x) ∈ V`, if one exists among the members of `U`
/// (finite and grid carriers) or by cylinder arithmetic (shifts).
pub(crate) fn image_meets(
    carrier: &Carrier,
    map: &CarrierMap,
    u: &OpenSetSpec,
    u_members: &Option<Vec<Point>>,
    v: &OpenSetSpec,
) -> Result<Option<Point>> {
    if let Some(members) = u_members {
        for x in members {
            let y = match map.apply_in(carrier, x) {
                Ok(y) => y,
                Err(Error::AmbientOverflow { .. }) => continue,
                Err(e) => return Err(e),
            };
            if v.contains(carrier, &y)? {
                return Ok(Some(x.clone()));
            }
        }
        return Ok(None);
    }
    let Carrier::Shift { alphabet } = carrier else {
        return Err(Error::mismatch(format!(
            "no image rule on the {} carrier",
            carrier.kind()
        )));
    };
    let (Some((su, wu)), Some((sv, wv))) = (u.as_cylinder(), v.as_cylinder()) else {
        return Err(Error::mismatch("shift open sets must be cylinders or sequence balls"));
    };
    let (by, relabel) = match map {
        CarrierMap::Identity => (0, (0..*alphabet).collect::<Vec<u8>>()),
        CarrierMap::Shift { by, relabel } => (*by, relabel.clone()),
        m => return Err(Error::mismatch(format!("map {m} does not act on shifts"))),
    };
    // Φ(U) is the cylinder of relabel(wu) at su - by
    let image: Vec<u8> = wu.iter().map(|&s| relabel[s as usize]).collect();
    let y = match shift_trace_construct(*alphabet, &[(su - by, image), (sv, wv)], false) {
        Ok(y) => y,
        Err(Error::Conflict { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let x = map.inverse()?.apply(&Point::Seq(y))?;
    Ok(Some(x))
}

/// The point agreeing with `x` except at index `i`, where the symbol is
/// advanced by one.
pub(crate) fn flip(x: &ShiftPoint, i: i64, alphabet: u8) -> ShiftPoint {
    x.with_symbol(i, (x.symbol(i) + 1).mod_floor(&alphabet))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q_frac;
    use crate::space::IntervalGrid;

    #[test]
    fn grid_ball_members_cover_the_ambient_lattice() {
        let d = |s: &str| s.parse::<Dyadic>().unwrap();
        let grid = Carrier::Grid(IntervalGrid::new(d("0"), d("1"), d("1/4"), d("-8"), d("8")).unwrap());
        let v = OpenSetSpec::ball(Point::Real(d("3.5")), q_frac(1, 2)).unwrap();
        let m = v.members(&grid).unwrap().unwrap();
        assert_eq!(
            m,
            vec![Point::Real(d("3.25")), Point::Real(d("3.5")), Point::Real(d("3.75"))]
        );
    }

    #[test]
    fn cylinders_meet_after_shifting() {
        let carrier = Carrier::shift(2).unwrap();
        let u = OpenSetSpec::cylinder(0, vec![1]).unwrap();
        let v = OpenSetSpec::cylinder(0, vec![0]).unwrap();
        let same = image_meets(&carrier, &CarrierMap::Identity, &u, &None, &v).unwrap();
        assert!(same.is_none());
        let m = CarrierMap::shift_by(3, 2);
        let x = image_meets(&carrier, &m, &u, &None, &v).unwrap().unwrap();
        assert!(u.contains(&carrier, &x).unwrap());
        assert!(v.contains(&carrier, &m.apply(&x).unwrap()).unwrap());
    }
}
