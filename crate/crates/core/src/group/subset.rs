use std::fmt;

use serde::{Deserialize, Serialize};

use super::{GroupElement, GroupSpec, WordBall};
use crate::error::{Error, Result};

/// A word distance that may be unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dist {
    Finite(u64),
    Infinite,
}

impl Dist {
    pub fn exceeds(&self, c: u64) -> bool {
        match self {
            Dist::Finite(d) => *d > c,
            Dist::Infinite => true,
        }
    }
}

impl fmt::Display for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dist::Finite(d) => write!(f, "{d}"),
            Dist::Infinite => write!(f, "inf"),
        }
    }
}

/// A subset of the group: an explicit finite list or the symbolic
/// complement `G \ G_k` of a word ball.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupSubset {
    Finite(Vec<GroupElement>),
    BallComplement(u64),
}

impl GroupSubset {
    /// Explicit set, sorted and deduplicated.
    pub fn finite(mut elements: Vec<GroupElement>) -> Self {
        elements.sort();
        elements.dedup();
        GroupSubset::Finite(elements)
    }

    pub fn contains(&self, spec: &GroupSpec, g: &GroupElement) -> Result<bool> {
        match self {
            GroupSubset::Finite(v) => Ok(v.contains(g)),
            GroupSubset::BallComplement(k) => Ok(spec.word_length(g)? > *k),
        }
    }

    /// Members of word length at most `radius`: the whole set when finite,
    /// the annulus `G_radius \ G_k` for a complement.
    pub fn truncated(&self, spec: &GroupSpec, radius: u64) -> Result<Vec<GroupElement>> {
        match self {
            GroupSubset::Finite(v) => Ok(v.clone()),
            GroupSubset::BallComplement(k) => {
                if radius <= *k {
                    return Ok(Vec::new());
                }
                let ball = spec.word_ball(radius as usize)?;
                Ok(((*k as usize + 1)..=radius as usize)
                    .flat_map(|r| ball.layer(r).iter().cloned())
                    .collect())
            }
        }
    }

    fn explicit(&self, spec: &GroupSpec) -> Result<Option<Vec<GroupElement>>> {
        match self {
            GroupSubset::Finite(v) => {
                for g in v {
                    spec.check_element(g)?;
                }
                Ok(Some(v.clone()))
            }
            GroupSubset::BallComplement(k) if spec.is_finite() => {
                let full = saturated_ball(spec)?;
                Ok(Some(
                    ((*k as usize + 1)..=full.radius())
                        .flat_map(|r| full.layer(r).iter().cloned())
                        .collect(),
                ))
            }
            GroupSubset::BallComplement(_) => Ok(None),
        }
    }
}

impl fmt::Display for GroupSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSubset::Finite(v) => {
                write!(f, "{{")?;
                for (i, g) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{g}")?;
                }
                write!(f, "}}")
            }
            GroupSubset::BallComplement(k) => write!(f, "G \\ G_{k}"),
        }
    }
}

fn saturated_ball(spec: &GroupSpec) -> Result<WordBall> {
    let mut ball = WordBall::seed(spec);
    while ball.grow(spec)? > 0 {}
    Ok(ball)
}

fn nonempty(v: &Option<Vec<GroupElement>>, which: &str) -> Result<()> {
    if matches!(v, Some(x) if x.is_empty()) {
        Err(Error::domain(format!("{which} set is empty")))
    } else {
        Ok(())
    }
}

impl GroupSpec {
    /// `inf { d(a, b) : a ∈ A, b ∈ B }`.
    pub fn set_min_distance(&self, a: &GroupSubset, b: &GroupSubset) -> Result<Dist> {
        let ea = a.explicit(self)?;
        let eb = b.explicit(self)?;
        nonempty(&ea, "first")?;
        nonempty(&eb, "second")?;
        match (ea, eb, a, b) {
            (Some(xs), Some(ys), _, _) => {
                let mut best = u64::MAX;
                for x in &xs {
                    for y in &ys {
                        best = best.min(self.word_metric(x, y)?);
                        if best == 0 {
                            return Ok(Dist::Finite(0));
                        }
                    }
                }
                Ok(Dist::Finite(best))
            }
            (Some(xs), None, _, GroupSubset::BallComplement(k))
            | (None, Some(xs), GroupSubset::BallComplement(k), _) => {
                let mut best = u64::MAX;
                for x in &xs {
                    best = best.min(self.distance_to_complement(x, *k)?);
                }
                Ok(Dist::Finite(best))
            }
            // two complements in an infinite group share elements
            _ => Ok(Dist::Finite(0)),
        }
    }

    /// `max { sup_a d(a, B), sup_b d(A, b) }`.
    pub fn hausdorff_distance(&self, a: &GroupSubset, b: &GroupSubset) -> Result<Dist> {
        Ok(self.directed_distance(a, b)?.max(self.directed_distance(b, a)?))
    }

    /// `sup_{a ∈ A} d(a, B)`.
    pub fn directed_distance(&self, a: &GroupSubset, b: &GroupSubset) -> Result<Dist> {
        let ea = a.explicit(self)?;
        let eb = b.explicit(self)?;
        nonempty(&ea, "first")?;
        nonempty(&eb, "second")?;
        match (ea, eb) {
            (Some(xs), Some(ys)) => {
                let mut worst = 0;
                for x in &xs {
                    let mut best = u64::MAX;
                    for y in &ys {
                        best = best.min(self.word_metric(x, y)?);
                        if best == 0 {
                            break;
                        }
                    }
                    worst = worst.max(best);
                }
                Ok(Dist::Finite(worst))
            }
            (Some(xs), None) => {
                let GroupSubset::BallComplement(k) = b else {
                    unreachable!()
                };
                let mut worst = 0;
                for x in &xs {
                    worst = worst.max(self.distance_to_complement(x, *k)?);
                }
                Ok(Dist::Finite(worst))
            }
            (None, Some(_)) => Ok(Dist::Infinite),
            (None, None) => {
                let (GroupSubset::BallComplement(k1), GroupSubset::BallComplement(k2)) = (a, b) else {
                    unreachable!()
                };
                if k1 >= k2 {
                    return Ok(Dist::Finite(0));
                }
                // only points of length in (k1, k2] are outside B
                let annulus = GroupSubset::BallComplement(*k1).truncated(self, *k2)?;
                let mut worst = 0;
                for x in &annulus {
                    worst = worst.max(self.distance_to_complement(x, *k2)?);
                }
                Ok(Dist::Finite(worst))
            }
        }
    }

    /// Distance from `x` to `G \ G_k` in an infinite group.
    fn distance_to_complement(&self, x: &GroupElement, k: u64) -> Result<u64> {
        let len = self.word_length(x)?;
        if len > k {
            return Ok(0);
        }
        if self.is_standard() {
            // geodesics can always be extended away from the identity
            return Ok(k + 1 - len);
        }
        let mut ball = self.word_ball(k as usize)?;
        let within_k = |ball: &WordBall, g: &GroupElement| ball.length_of(g).is_some_and(|l| l as u64 <= k);
        let mut r = 1;
        loop {
            while ball.radius() < r + k as usize {
                ball.grow(self)?;
            }
            let escapes = ball.layer(r).iter().any(|w| !within_k(&ball, &self.op_unchecked(x, w)));
            if escapes {
                return Ok(r as u64);
            }
            r += 1;
        }
    }
}

/// Largest `H`-length of a `G`-generator, where both specs describe the
/// same group with different generating sets.
pub fn generator_change_bound(from: &GroupSpec, to: &GroupSpec) -> Result<u64> {
    if from.family() != to.family() {
        return Err(Error::mismatch(format!(
            "{} vs {}",
            from.family_name(),
            to.family_name()
        )));
    }
    let mut n = 0;
    for g in from.generators() {
        n = n.max(to.word_length(g)?);
    }
    Ok(n)
}

/// Separation constant valid after changing generators: `N · c`.
pub fn generator_change_constant(c: u64, n: u64) -> u64 {
    n * c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Family;

    fn ints(xs: &[i64]) -> GroupSubset {
        GroupSubset::finite(xs.iter().map(|&x| GroupElement::Vector(vec![x])).collect())
    }

    #[test]
    fn integer_set_distances() {
        let z = GroupSpec::integers();
        assert_eq!(z.set_min_distance(&ints(&[0]), &ints(&[0])).unwrap(), Dist::Finite(0));
        assert_eq!(
            z.set_min_distance(&ints(&[1, 2, 3]), &ints(&[3, 4, 5])).unwrap(),
            Dist::Finite(0)
        );
        assert_eq!(
            z.hausdorff_distance(&ints(&[1, 2, 3]), &ints(&[3, 4, 5])).unwrap(),
            Dist::Finite(2)
        );
        assert_eq!(
            z.hausdorff_distance(&ints(&[0]), &ints(&[0, 5])).unwrap(),
            Dist::Finite(5)
        );
    }

    #[test]
    fn complement_distances() {
        let z = GroupSpec::integers();
        let c3 = GroupSubset::BallComplement(3);
        assert_eq!(z.set_min_distance(&ints(&[0]), &c3).unwrap(), Dist::Finite(4));
        assert_eq!(z.hausdorff_distance(&ints(&[0]), &c3).unwrap(), Dist::Infinite);
        // oracle: scan a window for the nearest |y| > 3
        let nearest = (-50i64..=50).filter(|y| y.abs() > 3).map(|y| y.unsigned_abs()).min();
        assert_eq!(nearest, Some(4));
        assert_eq!(
            z.directed_distance(&GroupSubset::BallComplement(1), &GroupSubset::BallComplement(4))
                .unwrap(),
            Dist::Finite(3)
        );
    }

    #[test]
    fn complement_with_nonstandard_generators() {
        let z = GroupSpec::new(
            Family::FreeAbelian(1),
            [2, -2, 3, -3].iter().map(|&x| GroupElement::Vector(vec![x])).collect(),
        )
        .unwrap();
        // brute force: nearest y with length > 1 from 0 is ±1 (length 2) at distance 2
        let d = z
            .set_min_distance(&ints(&[0]), &GroupSubset::BallComplement(1))
            .unwrap();
        let oracle = (-30i64..=30)
            .filter(|&y| z.word_length(&GroupElement::Vector(vec![y])).unwrap() > 1)
            .map(|y| z.word_length(&GroupElement::Vector(vec![y])).unwrap())
            .min()
            .unwrap();
        assert_eq!(d, Dist::Finite(oracle));
    }

    #[test]
    fn finite_group_complements_are_explicit() {
        let c6 = GroupSpec::standard(Family::CyclicFinite(6)).unwrap();
        let zero = GroupSubset::finite(vec![GroupElement::Index(0)]);
        assert_eq!(
            c6.hausdorff_distance(&zero, &GroupSubset::BallComplement(2)).unwrap(),
            Dist::Finite(3)
        );
        assert!(c6.set_min_distance(&zero, &GroupSubset::BallComplement(3)).is_err());
    }

    #[test]
    fn empty_sets_are_rejected() {
        let z = GroupSpec::integers();
        assert!(z.hausdorff_distance(&ints(&[]), &ints(&[1])).is_err());
    }

    #[test]
    fn generator_change() {
        let g1 = GroupSpec::integers();
        let h1 = GroupSpec::new(
            Family::FreeAbelian(1),
            [2, -2, 3, -3].iter().map(|&x| GroupElement::Vector(vec![x])).collect(),
        )
        .unwrap();
        let n = generator_change_bound(&g1, &h1).unwrap();
        assert_eq!(n, 2);
        assert_eq!(generator_change_constant(3, n), 6);
        assert_eq!(generator_change_constant(3, 1), 3);
        assert_eq!(generator_change_constant(0, n), 0);
    }
}
