//! Finite stand-ins for metric spaces and their points.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::shift::ShiftPoint;
use crate::error::{Error, Result};
use crate::exact::{q_to_string, Dyadic, Q};

/// A point of some carrier.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Point {
    Index(usize),
    Real(Dyadic),
    Seq(ShiftPoint),
    Pair(Box<Point>, Box<Point>),
}

impl PartialOrd for ShiftPoint {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ShiftPoint {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.left(), self.core(), self.right(), self.offset()).cmp(&(
            other.left(),
            other.core(),
            other.right(),
            other.offset(),
        ))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Index(i) => write!(f, "#{i}"),
            Point::Real(x) => write!(f, "{x}"),
            Point::Seq(s) => write!(f, "{s}"),
            Point::Pair(a, b) => write!(f, "({a}, {b})"),
        }
    }
}

impl Point {
    pub fn pair(a: Point, b: Point) -> Point {
        Point::Pair(Box::new(a), Box::new(b))
    }
}

/// Monotone rescalings of a metric that induce the same uniformity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricTransform {
    /// `d ↦ c·d`
    Scale(#[serde(with = "crate::exact::q_serde")] Q),
    /// `d ↦ min(d, 1)`
    Truncate,
    /// `d ↦ d / (1 + d)`
    Bounded,
}

impl MetricTransform {
    pub fn apply(&self, d: &Q) -> Q {
        match self {
            MetricTransform::Scale(c) => c * d,
            MetricTransform::Truncate => d.clone().min(Q::one()),
            MetricTransform::Bounded => d / (Q::one() + d),
        }
    }

    /// Radius `r` such that `t(d) < eps ⇔ d < r`; `None` when every
    /// distance qualifies.
    pub fn pull_back(&self, eps: &Q) -> Option<Q> {
        match self {
            MetricTransform::Scale(c) => Some(eps / c),
            MetricTransform::Truncate => (*eps <= Q::one()).then(|| eps.clone()),
            MetricTransform::Bounded => (*eps < Q::one()).then(|| eps / (Q::one() - eps)),
        }
    }

    pub fn name(&self) -> String {
        match self {
            MetricTransform::Scale(c) => format!("scale({})", q_to_string(c)),
            MetricTransform::Truncate => "min(d,1)".into(),
            MetricTransform::Bounded => "d/(1+d)".into(),
        }
    }
}

/// Finite metric space with exact rational distances.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteMetric {
    labels: Vec<String>,
    #[serde(with = "crate::exact::q_matrix_serde")]
    metric: Vec<Vec<Q>>,
}

impl FiniteMetric {
    pub fn new(labels: Vec<String>, metric: Vec<Vec<Q>>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::domain("finite carrier has no points"));
        }
        if metric.len() != n || metric.iter().any(|r| r.len() != n) {
            return Err(Error::domain(format!("metric matrix must be {n}×{n}")));
        }
        for (i, row) in metric.iter().enumerate() {
            if !row[i].is_zero() {
                return Err(Error::domain(format!("d({i},{i}) ≠ 0")));
            }
            for (j, d) in row.iter().enumerate() {
                if *d != metric[j][i] {
                    return Err(Error::domain(format!("metric not symmetric at ({i},{j})")));
                }
                if i != j && !d.is_positive() {
                    return Err(Error::domain(format!("d({i},{j}) must be positive")));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if metric[i][k] > &metric[i][j] + &metric[j][k] {
                        return Err(Error::domain(format!("triangle inequality fails for ({i},{j},{k})")));
                    }
                }
            }
        }
        Ok(FiniteMetric { labels, metric })
    }

    /// Points of the real line with the induced metric.
    pub fn on_line(values: &[Q]) -> Result<Self> {
        let labels = values.iter().map(q_to_string).collect();
        let metric = values
            .iter()
            .map(|a| values.iter().map(|b| (a - b).abs()).collect())
            .collect();
        Self::new(labels, metric)
    }

    /// `{ Σ_{i=1}^k 1/i : k = 1..=n }` as a subset of the line.
    pub fn harmonic(n: usize) -> Result<Self> {
        let mut acc = Q::zero();
        let mut values = Vec::with_capacity(n);
        for i in 1..=n {
            acc += Q::new(One::one(), (i as i64).into());
            values.push(acc.clone());
        }
        Self::on_line(&values)
    }

    /// Discrete metric with every off-diagonal distance 1.
    pub fn discrete(n: usize) -> Result<Self> {
        let labels = (0..n).map(|i| i.to_string()).collect();
        let metric = (0..n)
            .map(|i| (0..n).map(|j| if i == j { Q::zero() } else { Q::one() }).collect())
            .collect();
        Self::new(labels, metric)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn d(&self, i: usize, j: usize) -> &Q {
        &self.metric[i][j]
    }

    pub fn diameter(&self) -> Q {
        self.metric
            .iter()
            .flat_map(|r| r.iter())
            .max()
            .cloned()
            .unwrap_or_else(Q::zero)
    }
}

/// Grid `lo + k·step` inside `[lo, hi]`, embedded in a larger ambient
/// interval where images of the grid are evaluated.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntervalGrid {
    pub lo: Dyadic,
    pub hi: Dyadic,
    pub step: Dyadic,
    pub ambient_lo: Dyadic,
    pub ambient_hi: Dyadic,
}

impl IntervalGrid {
    pub fn new(lo: Dyadic, hi: Dyadic, step: Dyadic, ambient_lo: Dyadic, ambient_hi: Dyadic) -> Result<Self> {
        if lo >= hi {
            return Err(Error::domain("grid needs lo < hi"));
        }
        if step <= Dyadic::ZERO {
            return Err(Error::domain("grid step must be positive"));
        }
        if ambient_lo > lo || ambient_hi < hi {
            return Err(Error::domain("ambient interval must contain [lo, hi]"));
        }
        let width = hi.checked_sub(lo)?;
        let count = width.to_q() / step.to_q();
        if !count.is_integer() {
            return Err(Error::domain("step must divide hi - lo"));
        }
        Ok(IntervalGrid {
            lo,
            hi,
            step,
            ambient_lo,
            ambient_hi,
        })
    }

    pub fn len(&self) -> usize {
        let count = (self.hi.checked_sub(self.lo).expect("validated").to_q() / self.step.to_q()).to_integer();
        usize::try_from(count).expect("grid size fits usize") + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, k: usize) -> Dyadic {
        let offset = Dyadic::new(k as i128, 0)
            .checked_mul(self.step)
            .expect("grid offsets fit");
        self.lo.checked_add(offset).expect("grid points fit")
    }

    pub fn points(&self) -> Vec<Dyadic> {
        (0..self.len()).map(|k| self.point(k)).collect()
    }

    pub fn in_ambient(&self, x: &Dyadic) -> bool {
        *x >= self.ambient_lo && *x <= self.ambient_hi
    }
}

/// A desk-scale uniform space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Carrier {
    Finite(FiniteMetric),
    Grid(IntervalGrid),
    Shift {
        alphabet: u8,
    },
    /// product with the max metric
    Product(Box<Carrier>, Box<Carrier>),
    /// same points, metric passed through a uniform equivalence
    Rescaled {
        inner: Box<Carrier>,
        transform: MetricTransform,
    },
}

impl Carrier {
    pub fn shift(alphabet: u8) -> Result<Self> {
        if alphabet < 2 {
            return Err(Error::domain("shift alphabet needs at least 2 symbols"));
        }
        Ok(Carrier::Shift { alphabet })
    }

    /// Max-metric product; two finite factors give a finite carrier whose
    /// point `i·m + j` is the pair `(i, j)`.
    pub fn product(a: &Carrier, b: &Carrier) -> Result<Self> {
        if let (Carrier::Finite(x), Carrier::Finite(y)) = (a, b) {
            let (n, m) = (x.len(), y.len());
            let labels = (0..n * m)
                .map(|k| format!("({},{})", x.labels()[k / m], y.labels()[k % m]))
                .collect();
            let metric = (0..n * m)
                .map(|p| {
                    (0..n * m)
                        .map(|q| x.d(p / m, q / m).clone().max(y.d(p % m, q % m).clone()))
                        .collect()
                })
                .collect();
            return Ok(Carrier::Finite(FiniteMetric::new(labels, metric)?));
        }
        Ok(Carrier::Product(Box::new(a.clone()), Box::new(b.clone())))
    }

    pub fn rescaled(inner: Carrier, transform: MetricTransform) -> Result<Self> {
        if let MetricTransform::Scale(c) = &transform {
            if !c.is_positive() {
                return Err(Error::domain("metric scale must be positive"));
            }
        }
        Ok(Carrier::Rescaled {
            inner: Box::new(inner),
            transform,
        })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Carrier::Finite(_) => "finite",
            Carrier::Grid(_) => "grid",
            Carrier::Shift { .. } => "shift",
            Carrier::Product(..) => "product",
            Carrier::Rescaled { .. } => "rescaled",
        }
    }

    /// Carrier with the rescaling stripped off.
    pub fn base(&self) -> &Carrier {
        match self {
            Carrier::Rescaled { inner, .. } => inner.base(),
            c => c,
        }
    }

    /// True when `K` is a discretization of a continuum, so counts
    /// saturating at `|K|` reflect resolution rather than dynamics.
    pub fn is_discretized(&self) -> bool {
        match self {
            Carrier::Finite(_) => false,
            Carrier::Grid(_) | Carrier::Shift { .. } => true,
            Carrier::Product(a, b) => a.is_discretized() || b.is_discretized(),
            Carrier::Rescaled { inner, .. } => inner.is_discretized(),
        }
    }

    /// Errors unless `x` is a point of this carrier.
    pub fn check_point(&self, x: &Point) -> Result<()> {
        let ok = match (self, x) {
            (Carrier::Finite(f), Point::Index(i)) => *i < f.len(),
            (Carrier::Grid(g), Point::Real(v)) => g.in_ambient(v),
            (Carrier::Shift { alphabet }, Point::Seq(s)) => s.max_symbol() < *alphabet,
            (Carrier::Product(a, b), Point::Pair(x, y)) => {
                a.check_point(x)?;
                b.check_point(y)?;
                true
            }
            (Carrier::Rescaled { inner, .. }, p) => {
                inner.check_point(p)?;
                true
            }
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::mismatch(format!(
                "{x} is not a point of the {} carrier",
                self.kind()
            )))
        }
    }

    /// Parses a point in display form: `#3` (or `3`) on finite carriers, a
    /// decimal or fraction on grids, a sequence on shifts, `(a, b)` on
    /// products.
    pub fn parse_point(&self, text: &str) -> Result<Point> {
        let t = text.trim();
        let p = match self {
            Carrier::Finite(_) => Point::Index(
                t.trim_start_matches('#')
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad point index {t:?}")))?,
            ),
            Carrier::Grid(_) => Point::Real(t.parse()?),
            Carrier::Shift { .. } => Point::Seq(t.parse()?),
            Carrier::Product(a, b) => {
                let inner = t
                    .strip_prefix('(')
                    .and_then(|t| t.strip_suffix(')'))
                    .ok_or_else(|| Error::Parse(format!("expected (a, b), got {t:?}")))?;
                let mut depth = 0i32;
                let mut split = None;
                for (i, c) in inner.char_indices() {
                    match c {
                        '(' | '[' => depth += 1,
                        ')' | ']' => depth -= 1,
                        ',' if depth == 0 => {
                            split = Some(i);
                            break;
                        }
                        _ => {}
                    }
                }
                let i = split.ok_or_else(|| Error::Parse(format!("expected (a, b), got {t:?}")))?;
                Point::pair(a.parse_point(&inner[..i])?, b.parse_point(&inner[i + 1..])?)
            }
            Carrier::Rescaled { inner, .. } => inner.parse_point(t)?,
        };
        self.check_point(&p)?;
        Ok(p)
    }

    /// Exact distance.
    pub fn distance(&self, x: &Point, y: &Point) -> Result<Q> {
        match (self, x, y) {
            (Carrier::Finite(f), Point::Index(i), Point::Index(j)) if *i < f.len() && *j < f.len() => {
                Ok(f.d(*i, *j).clone())
            }
            (Carrier::Grid(_), Point::Real(a), Point::Real(b)) => Ok((a.to_q() - b.to_q()).abs()),
            (Carrier::Shift { .. }, Point::Seq(a), Point::Seq(b)) => Ok(a.distance(b)),
            (Carrier::Product(ca, cb), Point::Pair(a1, b1), Point::Pair(a2, b2)) => {
                Ok(ca.distance(a1, a2)?.max(cb.distance(b1, b2)?))
            }
            (Carrier::Rescaled { inner, transform }, _, _) => Ok(transform.apply(&inner.distance(x, y)?)),
            _ => Err(Error::mismatch(format!(
                "cannot measure {x} and {y} in the {} carrier",
                self.kind()
            ))),
        }
    }

    /// Membership in the entourage `U_eps = { d < eps }`.
    pub fn within(&self, x: &Point, y: &Point, eps: &Q) -> Result<bool> {
        match (self, x, y) {
            (Carrier::Shift { .. }, Point::Seq(a), Point::Seq(b)) => Ok(a.within(b, eps)),
            (Carrier::Product(ca, cb), Point::Pair(a1, b1), Point::Pair(a2, b2)) => {
                Ok(ca.within(a1, a2, eps)? && cb.within(b1, b2, eps)?)
            }
            _ => Ok(self.distance(x, y)? < *eps),
        }
    }

    /// Finite point list of the carrier itself, when it has one.
    pub fn points(&self) -> Option<Vec<Point>> {
        match self {
            Carrier::Finite(f) => Some((0..f.len()).map(Point::Index).collect()),
            Carrier::Grid(g) => Some(g.points().into_iter().map(Point::Real).collect()),
            Carrier::Shift { .. } => None,
            Carrier::Product(a, b) => {
                let (pa, pb) = (a.points()?, b.points()?);
                Some(
                    pa.iter()
                        .flat_map(|x| pb.iter().map(move |y| Point::pair(x.clone(), y.clone())))
                        .collect(),
                )
            }
            Carrier::Rescaled { inner, .. } => inner.points(),
        }
    }

    /// Largest distance between points of `K`.
    pub fn diameter_of(&self, k: &[Point]) -> Result<Q> {
        let mut best = Q::zero();
        for (i, x) in k.iter().enumerate() {
            for y in &k[i + 1..] {
                best = best.max(self.distance(x, y)?);
            }
        }
        Ok(best)
    }
}

/// Convenience: an integer-valued point on the line.
pub fn real(v: i64) -> Point {
    Point::Real(Dyadic::from_int(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{parse_q, q_frac, q_int};

    #[test]
    fn rejects_non_metrics() {
        let labels = vec!["a".into(), "b".into(), "c".into()];
        let bad = vec![
            vec![q_int(0), q_int(1), q_int(5)],
            vec![q_int(1), q_int(0), q_int(1)],
            vec![q_int(5), q_int(1), q_int(0)],
        ];
        assert!(FiniteMetric::new(labels, bad).is_err());
    }

    #[test]
    fn points_parse_from_display_form() {
        let d = |s: &str| s.parse::<Dyadic>().unwrap();
        let grid = Carrier::Grid(IntervalGrid::new(d("0"), d("1"), d("1/8"), d("-4"), d("4")).unwrap());
        let shift = Carrier::shift(2).unwrap();
        let pts = [
            Point::Real(d("-3.125")),
            Point::Seq(ShiftPoint::block(&[1, 0, 1], -1, 1)),
            Point::pair(Point::Real(d("0.5")), Point::Seq(ShiftPoint::constant(1))),
        ];
        let prod = Carrier::Product(Box::new(grid.clone()), Box::new(shift.clone()));
        for (c, p) in [&grid, &shift, &prod].into_iter().zip(pts) {
            assert_eq!(c.parse_point(&p.to_string()).unwrap(), p);
        }
        let f = Carrier::Finite(FiniteMetric::harmonic(3).unwrap());
        assert_eq!(f.parse_point("#2").unwrap(), Point::Index(2));
        assert!(f.parse_point("#3").is_err());
        assert!(grid.parse_point("9").is_err());
    }

    #[test]
    fn harmonic_points() {
        let h = FiniteMetric::harmonic(4).unwrap();
        assert_eq!(h.d(0, 1), &q_frac(1, 2));
        assert_eq!(h.d(0, 3), &(q_frac(1, 2) + q_frac(1, 3) + q_frac(1, 4)));
    }

    #[test]
    fn product_is_max_metric() {
        let a = Carrier::Finite(FiniteMetric::on_line(&[q_int(0), q_int(1)]).unwrap());
        let b = Carrier::Finite(FiniteMetric::on_line(&[q_int(0), q_int(3)]).unwrap());
        let p = Carrier::product(&a, &b).unwrap();
        let Carrier::Finite(f) = &p else { panic!() };
        assert_eq!(f.len(), 4);
        let eps = q_int(2);
        // componentwise oracle
        for i in 0..4 {
            for j in 0..4 {
                let both = a.within(&Point::Index(i / 2), &Point::Index(j / 2), &eps).unwrap()
                    && b.within(&Point::Index(i % 2), &Point::Index(j % 2), &eps).unwrap();
                assert_eq!(p.within(&Point::Index(i), &Point::Index(j), &eps).unwrap(), both);
            }
        }
    }

    #[test]
    fn grid_validation() {
        let d = |s: &str| s.parse::<Dyadic>().unwrap();
        assert!(IntervalGrid::new(d("0"), d("1"), d("0.25"), d("-1"), d("2")).is_ok());
        assert!(IntervalGrid::new(d("0"), d("1"), d("0.375"), d("-1"), d("2")).is_err());
        assert!(IntervalGrid::new(d("0"), d("1"), d("0.25"), d("0.5"), d("2")).is_err());
        let g = IntervalGrid::new(d("0"), d("1"), d("1/4096"), d("0"), d("1")).unwrap();
        assert_eq!(g.len(), 4097);
    }

    #[test]
    fn transforms_pull_back_exactly() {
        let ts = [
            MetricTransform::Scale(q_int(2)),
            MetricTransform::Truncate,
            MetricTransform::Bounded,
        ];
        let ds: Vec<Q> = ["0", "1/3", "1/2", "1", "3/2", "4"]
            .iter()
            .map(|s| parse_q(s).unwrap())
            .collect();
        let es: Vec<Q> = ["1/10", "1/2", "2/3", "1", "2"]
            .iter()
            .map(|s| parse_q(s).unwrap())
            .collect();
        for t in &ts {
            for d in &ds {
                for e in &es {
                    let direct = t.apply(d) < *e;
                    let pulled = t.pull_back(e).is_none_or(|r| *d < r);
                    assert_eq!(direct, pulled, "{} d={d} eps={e}", t.name());
                }
            }
        }
    }
}
