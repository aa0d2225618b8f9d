//! The closeness graph: `x ~ y` iff `(Φ_g x, Φ_g y) ∈ U_ε` for every `g ∈ G_n`.

use std::collections::HashSet;

use num_traits::Signed;
use rayon::prelude::*;

use super::bits::Bits;
use crate::error::{Error, Result};
use crate::exact::{ceil_to_i128, q_pow2, Q};
use crate::group::WordBall;
use crate::space::{Action, Carrier, CarrierMap, Point};

/// Symmetric, reflexive closeness relation on a finite point list.
/// Adjacency rows omit the diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosenessRelation {
    n: usize,
    epsilon: Q,
    points: Vec<Point>,
    adj: Vec<Bits>,
}

impl ClosenessRelation {
    /// Relation from an explicit symmetric boolean matrix (diagonal ignored).
    pub fn from_matrix(points: Vec<Point>, n: usize, epsilon: Q, close: &[Vec<bool>]) -> Result<Self> {
        let len = points.len();
        if close.len() != len || close.iter().any(|r| r.len() != len) {
            return Err(Error::domain("closeness matrix has the wrong shape"));
        }
        let mut adj = vec![Bits::new(len); len];
        for (i, row) in close.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if c != close[j][i] {
                    return Err(Error::domain(format!("closeness not symmetric at ({i},{j})")));
                }
                if i != j && c {
                    adj[i].insert(j);
                }
            }
        }
        Ok(ClosenessRelation {
            n,
            epsilon,
            points,
            adj,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn epsilon(&self) -> &Q {
        &self.epsilon
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_close(&self, i: usize, j: usize) -> bool {
        i == j || self.adj[i].contains(j)
    }

    pub(crate) fn row(&self, i: usize) -> &Bits {
        &self.adj[i]
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[i].iter()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].count()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Bits::count).sum::<usize>() / 2
    }

    /// Every close pair of `self` is close in `other`.
    pub fn is_subrelation_of(&self, other: &ClosenessRelation) -> bool {
        self.len() == other.len() && self.adj.iter().zip(&other.adj).all(|(a, b)| a.subset_of(b))
    }

    /// Indices pairwise not close: an `(n, U)`-separated set.
    pub fn is_separated(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(a, &i)| i < self.len() && set[a + 1..].iter().all(|&j| i != j && !self.is_close(i, j)))
    }

    /// Every point is close to some member: an `(n, U)`-spanning set.
    pub fn is_spanning(&self, set: &[usize]) -> bool {
        if set.iter().any(|&i| i >= self.len()) {
            return false;
        }
        (0..self.len()).all(|x| set.iter().any(|&s| self.is_close(x, s)))
    }
}

enum Images {
    Index(Vec<usize>),
    Scaled(Vec<i128>),
    General(Vec<Point>),
}

struct Evaluator<'a> {
    carrier: &'a Carrier,
    epsilon: &'a Q,
    /// finite carriers: `close[a]` holds every `b` with `d(a, b) < ε`
    finite_close: Option<Vec<Bits>>,
}

impl<'a> Evaluator<'a> {
    fn new(carrier: &'a Carrier, epsilon: &'a Q) -> Self {
        let finite_close = match carrier {
            Carrier::Finite(f) => Some(
                (0..f.len())
                    .map(|a| {
                        let mut row = Bits::new(f.len());
                        for b in 0..f.len() {
                            if f.d(a, b) < epsilon {
                                row.insert(b);
                            }
                        }
                        row
                    })
                    .collect(),
            ),
            _ => None,
        };
        Evaluator {
            carrier,
            epsilon,
            finite_close,
        }
    }

    fn images(&self, map: &CarrierMap, points: &[Point]) -> Result<Images> {
        let imgs = points
            .iter()
            .map(|x| map.apply_in(self.carrier, x))
            .collect::<Result<Vec<_>>>()?;
        match self.carrier {
            Carrier::Finite(_) => Ok(Images::Index(
                imgs.iter()
                    .map(|p| match p {
                        Point::Index(i) => *i,
                        _ => unreachable!("finite carrier images are indices"),
                    })
                    .collect(),
            )),
            Carrier::Grid(_) => {
                let reals: Vec<_> = imgs
                    .iter()
                    .map(|p| match p {
                        Point::Real(v) => *v,
                        _ => unreachable!("grid images are reals"),
                    })
                    .collect();
                let e = reals.iter().map(|v| v.exponent()).min().unwrap_or(0);
                let scaled: Option<Vec<i128>> = reals.iter().map(|v| v.scaled_to(e)).collect();
                match scaled {
                    Some(s) if s.iter().all(|v| v.unsigned_abs() < (1u128 << 120)) => {
                        // |A - B|·2^e < ε  ⇔  |A - B| < ⌈ε·2^-e⌉
                        let threshold = ceil_to_i128(&(self.epsilon * q_pow2(-(e as i64))));
                        Ok(Images::Scaled(std::iter::once(threshold).chain(s).collect()))
                    }
                    _ => Ok(Images::General(imgs)),
                }
            }
            _ => Ok(Images::General(imgs)),
        }
    }

    fn close(&self, images: &Images, i: usize, j: usize) -> bool {
        match images {
            Images::Index(v) => self.finite_close.as_ref().expect("finite carrier")[v[i]].contains(v[j]),
            Images::Scaled(v) => (v[i + 1] - v[j + 1]).abs() < v[0],
            Images::General(v) => self
                .carrier
                .within(&v[i], &v[j], self.epsilon)
                .expect("images lie in the carrier"),
        }
    }
}

fn check_inputs(action: &Action, k: &[Point], epsilon: &Q) -> Result<()> {
    if !epsilon.is_positive() {
        return Err(Error::domain("ε must be positive"));
    }
    if k.is_empty() {
        return Err(Error::domain("point set K is empty"));
    }
    for x in k {
        action.carrier().check_point(x)?;
    }
    Ok(())
}

/// Closeness relations for `n = 0..=n_max`, refined layer by layer.
pub fn closeness_sequence(action: &Action, k: &[Point], n_max: usize, epsilon: &Q) -> Result<Vec<ClosenessRelation>> {
    check_inputs(action, k, epsilon)?;
    let ball = action.group().word_ball(n_max)?;
    closeness_over_ball(action, &ball, k, n_max, epsilon)
}

pub(crate) fn closeness_over_ball(
    action: &Action,
    ball: &WordBall,
    k: &[Point],
    n_max: usize,
    epsilon: &Q,
) -> Result<Vec<ClosenessRelation>> {
    let maps = action.ball_maps(ball)?;
    let eval = Evaluator::new(action.carrier(), epsilon);
    let len = k.len();
    let mut adj: Vec<Bits> = (0..len)
        .map(|i| {
            let mut r = Bits::full(len);
            r.remove(i);
            r
        })
        .collect();
    let mut seen: HashSet<CarrierMap> = HashSet::new();
    let mut out = Vec::with_capacity(n_max + 1);
    let mut idx = 0;
    for n in 0..=n_max {
        let layer_len = ball.layer(n).len();
        for m in &maps[idx..idx + layer_len] {
            if !seen.insert(m.clone()) {
                continue;
            }
            let images = eval.images(m, k)?;
            adj = adj
                .par_iter()
                .enumerate()
                .map(|(i, row)| {
                    let mut next = Bits::new(len);
                    for j in row.iter() {
                        if eval.close(&images, i, j) {
                            next.insert(j);
                        }
                    }
                    next
                })
                .collect();
        }
        idx += layer_len;
        out.push(ClosenessRelation {
            n,
            epsilon: epsilon.clone(),
            points: k.to_vec(),
            adj: adj.clone(),
        });
    }
    Ok(out)
}

/// The closeness relation at a single `n`.
pub fn closeness_relation(action: &Action, k: &[Point], n: usize, epsilon: &Q) -> Result<ClosenessRelation> {
    Ok(closeness_sequence(action, k, n, epsilon)?
        .pop()
        .expect("sequence has n + 1 entries"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q_frac, Dyadic};
    use crate::group::GroupSpec;
    use crate::space::{real, IntervalGrid, ShiftPoint};

    fn line() -> Carrier {
        let d = |s: &str| s.parse::<Dyadic>().unwrap();
        Carrier::Grid(IntervalGrid::new(d("0"), d("2"), d("1"), d("-8"), d("8")).unwrap())
    }

    #[test]
    fn trivial_action_on_three_points() {
        let act = Action::trivial("id", GroupSpec::integers(), line()).unwrap();
        let k = vec![real(0), real(1), real(2)];
        for n in 0..4 {
            let rel = closeness_relation(&act, &k, n, &q_frac(3, 2)).unwrap();
            assert!(rel.is_close(0, 1) && rel.is_close(1, 2) && !rel.is_close(0, 2));
            assert_eq!(rel.edge_count(), 2);
        }
    }

    #[test]
    fn shift_relation_matches_brute_force() {
        let act = Action::build(
            "shift",
            GroupSpec::integers(),
            Carrier::shift(2).unwrap(),
            vec![CarrierMap::shift_by(1, 2), CarrierMap::shift_by(-1, 2)],
        )
        .unwrap();
        let k: Vec<Point> = ShiftPoint::all_periodic(2, 3)
            .into_iter()
            .filter(|p| p.period() == Some(3))
            .map(Point::Seq)
            .collect();
        let eps = q_frac(1, 2);
        let rel = closeness_relation(&act, &k, 1, &eps).unwrap();
        for (i, x) in k.iter().enumerate() {
            for (j, y) in k.iter().enumerate() {
                let (Point::Seq(a), Point::Seq(b)) = (x, y) else {
                    panic!()
                };
                let oracle = [-1i64, 0, 1]
                    .iter()
                    .all(|&m| a.shifted(m, &[0, 1]).distance(&b.shifted(m, &[0, 1])) < eps);
                assert_eq!(rel.is_close(i, j), oracle);
            }
        }
    }

    #[test]
    fn relation_shrinks_with_n() {
        let d = |s: &str| s.parse::<Dyadic>().unwrap();
        let grid = Carrier::Grid(IntervalGrid::new(d("0"), d("1"), d("1/64"), d("-16"), d("16")).unwrap());
        let e1 = CarrierMap::affine(d("2"), d("0"));
        let e2 = CarrierMap::affine(d("0.5"), d("0"));
        let act = Action::build(
            "doubling",
            GroupSpec::lattice(2),
            grid.clone(),
            vec![e1.clone(), e2.clone(), e2, e1],
        )
        .unwrap();
        let k = grid.points().unwrap();
        let seq = closeness_sequence(&act, &k, 3, &q_frac(1, 10)).unwrap();
        assert!(seq[3].is_subrelation_of(&seq[0]));
        for w in seq.windows(2) {
            assert!(w[1].is_subrelation_of(&w[0]));
        }
    }

    #[test]
    fn finite_fast_path_agrees_with_distance() {
        use crate::space::FiniteMetric;
        let carrier = Carrier::Finite(FiniteMetric::harmonic(6).unwrap());
        let act = Action::build(
            "rot",
            GroupSpec::integers(),
            carrier.clone(),
            vec![
                CarrierMap::Permutation(vec![1, 2, 3, 4, 5, 0]),
                CarrierMap::Permutation(vec![5, 0, 1, 2, 3, 4]),
            ],
        )
        .unwrap();
        let k = carrier.points().unwrap();
        let eps = q_frac(1, 3);
        let rel = closeness_relation(&act, &k, 2, &eps).unwrap();
        let ball = GroupSpec::integers().word_ball(2).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let oracle = ball.elements().iter().all(|g| {
                    let a = act.apply(g, &k[i]).unwrap();
                    let b = act.apply(g, &k[j]).unwrap();
                    carrier.distance(&a, &b).unwrap() < eps
                });
                assert_eq!(rel.is_close(i, j), oracle);
            }
        }
    }
}
