use std::collections::HashMap;

use super::{GroupElement, GroupSpec};
use crate::error::{Error, Result};

pub const DEFAULT_BALL_CAP: usize = 1_000_000;

/// The word ball `G_n`, stored layer by layer in breadth-first order with
/// each layer sorted canonically.
#[derive(Debug, Clone)]
pub struct WordBall {
    radius: usize,
    elements: Vec<GroupElement>,
    layer_start: Vec<usize>,
    index: HashMap<GroupElement, usize>,
    /// element `i` equals `elements[parent] · generator` for `Some((parent, generator))`
    parent: Vec<Option<(usize, usize)>>,
}

impl WordBall {
    pub(crate) fn seed(spec: &GroupSpec) -> Self {
        let e = spec.identity();
        let mut index = HashMap::new();
        index.insert(e.clone(), 0);
        WordBall {
            radius: 0,
            elements: vec![e],
            layer_start: vec![0, 1],
            index,
            parent: vec![None],
        }
    }

    pub(crate) fn build(spec: &GroupSpec, n: usize) -> Result<Self> {
        let mut ball = Self::seed(spec);
        while ball.radius < n {
            ball.grow(spec)?;
        }
        Ok(ball)
    }

    /// Adds the next layer. Returns the number of new elements.
    pub(crate) fn grow(&mut self, spec: &GroupSpec) -> Result<usize> {
        let last = self.layer(self.radius).to_vec();
        let base = self.layer_start[self.radius];
        let mut fresh: HashMap<GroupElement, (usize, usize)> = HashMap::new();
        for (offset, g) in last.iter().enumerate() {
            for (gi, s) in spec.generators().iter().enumerate() {
                let h = spec.op_unchecked(g, s);
                if !self.index.contains_key(&h) {
                    fresh.entry(h).or_insert((base + offset, gi));
                }
            }
        }
        if self.elements.len() + fresh.len() > spec.ball_cap() {
            return Err(Error::ResourceLimit {
                what: format!("word ball of radius {} in {}", self.radius + 1, spec.family_name()),
                cap: spec.ball_cap(),
            });
        }
        let mut layer: Vec<(GroupElement, (usize, usize))> = fresh.into_iter().collect();
        layer.sort_by(|a, b| a.0.cmp(&b.0));
        let added = layer.len();
        for (g, p) in layer {
            self.index.insert(g.clone(), self.elements.len());
            self.elements.push(g);
            self.parent.push(Some(p));
        }
        self.radius += 1;
        self.layer_start.push(self.elements.len());
        Ok(added)
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// All elements, identity first, then by length and canonical order.
    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    /// Elements of length exactly `k`.
    pub fn layer(&self, k: usize) -> &[GroupElement] {
        if k > self.radius {
            return &[];
        }
        &self.elements[self.layer_start[k]..self.layer_start[k + 1]]
    }

    pub fn frontier(&self) -> &[GroupElement] {
        self.layer(self.radius)
    }

    /// Elements of length at most `k` (a prefix of `elements`).
    pub fn within(&self, k: usize) -> &[GroupElement] {
        &self.elements[..self.layer_start[k.min(self.radius) + 1]]
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.index.contains_key(g)
    }

    pub fn position(&self, g: &GroupElement) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn length_of(&self, g: &GroupElement) -> Option<usize> {
        let i = self.position(g)?;
        Some(self.layer_start.partition_point(|&s| s <= i) - 1)
    }

    /// Parent pointer of element `i`: `elements[i] = elements[p] · s_j`.
    pub fn parent(&self, i: usize) -> Option<(usize, usize)> {
        self.parent[i]
    }

    /// Generator indices `j_1..j_m` with `g = s_{j_1} ⋯ s_{j_m}`, a geodesic.
    pub fn word(&self, g: &GroupElement) -> Option<Vec<usize>> {
        let mut i = self.position(g)?;
        let mut out = Vec::new();
        while let Some((p, s)) = self.parent[i] {
            out.push(s);
            i = p;
        }
        out.reverse();
        Some(out)
    }
}

pub(crate) fn bfs_length(spec: &GroupSpec, g: &GroupElement) -> Result<u64> {
    let mut ball = WordBall::seed(spec);
    loop {
        if let Some(k) = ball.length_of(g) {
            return Ok(k as u64);
        }
        if ball.grow(spec)? == 0 {
            return Err(Error::domain(format!("{g} is not generated by the listed generators")));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Family;

    #[test]
    fn lattice_ball_sizes() {
        let z2 = GroupSpec::lattice(2);
        assert_eq!(z2.word_ball(1).unwrap().len(), 5);
        assert_eq!(z2.word_ball(2).unwrap().len(), 13);
        for n in 0..6 {
            assert_eq!(z2.word_ball(n).unwrap().len(), 2 * n * n + 2 * n + 1);
        }
    }

    #[test]
    fn free_ball_matches_word_enumeration() {
        let f2 = GroupSpec::standard(Family::Free(2)).unwrap();
        let ball = f2.word_ball(2).unwrap();
        // oracle: all words of length <= 2 over {a,A,b,B}, freely reduced
        let letters = ["a", "A", "b", "B"];
        let mut words = std::collections::BTreeSet::new();
        words.insert(f2.identity());
        for x in letters {
            words.insert(f2.parse_element(x).unwrap());
            for y in letters {
                words.insert(f2.parse_element(&format!("{x}{y}")).unwrap());
            }
        }
        assert_eq!(ball.len(), 17);
        assert_eq!(ball.len(), words.len());
        assert!(words.iter().all(|w| ball.contains(w)));
    }

    #[test]
    fn nonstandard_generators_use_bfs() {
        let z = GroupSpec::new(
            Family::FreeAbelian(1),
            vec![
                GroupElement::Vector(vec![2]),
                GroupElement::Vector(vec![-2]),
                GroupElement::Vector(vec![3]),
                GroupElement::Vector(vec![-3]),
            ],
        )
        .unwrap();
        assert_eq!(z.word_length(&GroupElement::Vector(vec![1])).unwrap(), 2);
        assert_eq!(z.word_length(&GroupElement::Vector(vec![5])).unwrap(), 2);
        assert_eq!(z.word_length(&GroupElement::Vector(vec![7])).unwrap(), 3);
    }

    #[test]
    fn ball_cap_is_reported() {
        let z3 = GroupSpec::lattice(3).with_ball_cap(100);
        let err = z3.word_ball(10).unwrap_err();
        assert!(matches!(err, Error::ResourceLimit { cap: 100, .. }));
    }

    #[test]
    fn geodesic_words_multiply_back() {
        let f2 = GroupSpec::standard(Family::Free(2)).unwrap();
        let ball = f2.word_ball(3).unwrap();
        for g in ball.elements() {
            let w = ball.word(g).unwrap();
            let mut acc = f2.identity();
            for j in &w {
                acc = f2.op(&acc, &f2.generators()[*j]).unwrap();
            }
            assert_eq!(&acc, g);
            assert_eq!(w.len(), ball.length_of(g).unwrap());
        }
    }

    #[test]
    fn finite_group_ball_saturates() {
        let c5 = GroupSpec::standard(Family::CyclicFinite(5)).unwrap();
        let ball = c5.word_ball(7).unwrap();
        assert_eq!(ball.len(), 5);
        assert!(ball.frontier().is_empty());
        assert_eq!(ball.layer(2).len(), 2);
    }
}
