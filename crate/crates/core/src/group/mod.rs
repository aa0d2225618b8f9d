//! Finitely generated groups with a symmetric generating set.

mod ball;
mod subset;

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use ball::{WordBall, DEFAULT_BALL_CAP};
pub use subset::{generator_change_bound, generator_change_constant, Dist, GroupSubset};

/// Supported group families. Each has exact canonical forms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// ℤ^d
    FreeAbelian(usize),
    /// free group on k letters
    Free(usize),
    /// ℤ/m
    CyclicFinite(u64),
    /// arbitrary finite group given by its multiplication table; index 0 is
    /// the identity
    FiniteTable(Vec<Vec<usize>>),
}

/// Canonical group element.
///
/// Free-group words store letters as `±(i+1)` for generator `i`, always
/// freely reduced.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupElement {
    Vector(Vec<i64>),
    Word(Vec<i32>),
    Index(usize),
}

fn letter_key(l: i32) -> u32 {
    (l.unsigned_abs() - 1) * 2 + u32::from(l < 0)
}

impl Ord for GroupElement {
    fn cmp(&self, other: &Self) -> Ordering {
        use GroupElement::*;
        match (self, other) {
            (Vector(a), Vector(b)) => a.cmp(b),
            (Word(a), Word(b)) => a
                .len()
                .cmp(&b.len())
                .then_with(|| a.iter().map(|&l| letter_key(l)).cmp(b.iter().map(|&l| letter_key(l)))),
            (Index(a), Index(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for GroupElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl GroupElement {
    fn rank(&self) -> u8 {
        match self {
            GroupElement::Vector(_) => 0,
            GroupElement::Word(_) => 1,
            GroupElement::Index(_) => 2,
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Vector(v) => {
                write!(f, "(")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
            GroupElement::Word(w) if w.is_empty() => write!(f, "e"),
            GroupElement::Word(w) => {
                for &l in w {
                    let c = (b'a' + (l.unsigned_abs() - 1) as u8) as char;
                    if l < 0 {
                        write!(f, "{}", c.to_ascii_uppercase())?;
                    } else {
                        write!(f, "{c}")?;
                    }
                }
                Ok(())
            }
            GroupElement::Index(i) => write!(f, "{i}"),
        }
    }
}

/// A group together with an ordered, inverse-closed generating list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSpec {
    family: Family,
    generators: Vec<GroupElement>,
    /// `inverse_of[i]` is the position of the inverse of generator `i`
    inverse_of: Vec<usize>,
    standard: bool,
    ball_cap: usize,
}

impl GroupSpec {
    /// Builds a spec from explicit generators, validating the family and
    /// inverse-closure.
    pub fn new(family: Family, generators: Vec<GroupElement>) -> Result<Self> {
        validate_family(&family)?;
        if generators.is_empty() {
            return Err(Error::InvalidGroup("generating set is empty".into()));
        }
        let mut spec = GroupSpec {
            family,
            generators: Vec::new(),
            inverse_of: Vec::new(),
            standard: false,
            ball_cap: DEFAULT_BALL_CAP,
        };
        for g in &generators {
            spec.check_element(g)?;
        }
        let mut inverse_of = Vec::with_capacity(generators.len());
        for g in &generators {
            let inv = spec.inverse(g)?;
            let pos = generators
                .iter()
                .position(|h| *h == inv)
                .ok_or_else(|| Error::InvalidGroup(format!("generator {g} has no listed inverse")))?;
            inverse_of.push(pos);
        }
        let standard = {
            let std_gens = standard_generators(&spec.family);
            let mut a = generators.clone();
            let mut b = std_gens;
            a.sort();
            a.dedup();
            b.sort();
            a == b
        };
        spec.generators = generators;
        spec.inverse_of = inverse_of;
        spec.standard = standard;
        Ok(spec)
    }

    /// The family with its standard generating set: unit vectors and their
    /// negatives, free letters and inverses, `±1` mod m, or every
    /// non-identity element of a table group.
    pub fn standard(family: Family) -> Result<Self> {
        validate_family(&family)?;
        let gens = standard_generators(&family);
        Self::new(family, gens)
    }

    pub fn integers() -> Self {
        Self::standard(Family::FreeAbelian(1)).expect("ℤ is valid")
    }

    pub fn lattice(d: usize) -> Self {
        Self::standard(Family::FreeAbelian(d)).expect("ℤ^d is valid")
    }

    /// Parses a short group name: `Z`, `Z2`, `Z^3`, `F2`, `C4`.
    pub fn from_name(name: &str) -> Result<Self> {
        let s = name.trim();
        let (head, rest) = s.split_at(s.chars().next().map_or(0, |c| c.len_utf8()));
        let rest = rest.trim_start_matches(['^', '_']);
        let number = |default: Option<u64>| -> Result<u64> {
            if rest.is_empty() {
                default.ok_or_else(|| Error::Parse(format!("group {s:?} needs a size")))
            } else {
                rest.parse().map_err(|_| Error::Parse(format!("bad group name {s:?}")))
            }
        };
        let family = match head {
            "Z" | "ℤ" => Family::FreeAbelian(number(Some(1))? as usize),
            "F" => Family::Free(number(None)? as usize),
            "C" => Family::CyclicFinite(number(None)?),
            _ => return Err(Error::Parse(format!("unknown group name {s:?}"))),
        };
        Self::standard(family)
    }

    pub fn with_ball_cap(mut self, cap: usize) -> Self {
        self.ball_cap = cap.max(1);
        self
    }

    pub fn ball_cap(&self) -> usize {
        self.ball_cap
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    pub fn inverse_generator(&self, i: usize) -> usize {
        self.inverse_of[i]
    }

    pub fn is_standard(&self) -> bool {
        self.standard
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.family, Family::CyclicFinite(_) | Family::FiniteTable(_))
    }

    /// Number of elements for finite groups.
    pub fn order(&self) -> Option<usize> {
        match &self.family {
            Family::CyclicFinite(m) => Some(*m as usize),
            Family::FiniteTable(t) => Some(t.len()),
            _ => None,
        }
    }

    pub fn identity(&self) -> GroupElement {
        match &self.family {
            Family::FreeAbelian(d) => GroupElement::Vector(vec![0; *d]),
            Family::Free(_) => GroupElement::Word(Vec::new()),
            _ => GroupElement::Index(0),
        }
    }

    pub fn is_identity(&self, g: &GroupElement) -> bool {
        *g == self.identity()
    }

    /// Errors unless `g` is a well-formed canonical element of this family.
    pub fn check_element(&self, g: &GroupElement) -> Result<()> {
        let ok = match (&self.family, g) {
            (Family::FreeAbelian(d), GroupElement::Vector(v)) => v.len() == *d,
            (Family::Free(k), GroupElement::Word(w)) => {
                w.iter().all(|&l| l != 0 && l.unsigned_abs() as usize <= *k) && w.windows(2).all(|p| p[0] != -p[1])
            }
            (Family::CyclicFinite(m), GroupElement::Index(i)) => (*i as u64) < *m,
            (Family::FiniteTable(t), GroupElement::Index(i)) => *i < t.len(),
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::mismatch(format!(
                "element {g} does not belong to {:?}",
                self.family_name()
            )))
        }
    }

    pub fn family_name(&self) -> String {
        match &self.family {
            Family::FreeAbelian(d) => format!("Z^{d}"),
            Family::Free(k) => format!("F{k}"),
            Family::CyclicFinite(m) => format!("C{m}"),
            Family::FiniteTable(t) => format!("table group of order {}", t.len()),
        }
    }

    pub fn op(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.check_element(a)?;
        self.check_element(b)?;
        Ok(self.op_unchecked(a, b))
    }

    pub(crate) fn op_unchecked(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        match (&self.family, a, b) {
            (Family::FreeAbelian(_), GroupElement::Vector(x), GroupElement::Vector(y)) => {
                GroupElement::Vector(x.iter().zip(y).map(|(p, q)| p + q).collect())
            }
            (Family::Free(_), GroupElement::Word(x), GroupElement::Word(y)) => {
                let mut out = x.clone();
                for &l in y {
                    if out.last() == Some(&-l) {
                        out.pop();
                    } else {
                        out.push(l);
                    }
                }
                GroupElement::Word(out)
            }
            (Family::CyclicFinite(m), GroupElement::Index(x), GroupElement::Index(y)) => {
                GroupElement::Index(((*x as u64 + *y as u64) % m) as usize)
            }
            (Family::FiniteTable(t), GroupElement::Index(x), GroupElement::Index(y)) => GroupElement::Index(t[*x][*y]),
            _ => unreachable!("operands checked against family"),
        }
    }

    pub fn inverse(&self, a: &GroupElement) -> Result<GroupElement> {
        self.check_element(a)?;
        Ok(match (&self.family, a) {
            (_, GroupElement::Vector(x)) => GroupElement::Vector(x.iter().map(|v| -v).collect()),
            (_, GroupElement::Word(w)) => GroupElement::Word(w.iter().rev().map(|l| -l).collect()),
            (Family::CyclicFinite(m), GroupElement::Index(x)) => GroupElement::Index(((m - *x as u64) % m) as usize),
            (Family::FiniteTable(t), GroupElement::Index(x)) => {
                GroupElement::Index(t[*x].iter().position(|&p| p == 0).expect("validated table"))
            }
            _ => unreachable!(),
        })
    }

    /// `g^k` for any integer k.
    pub fn pow(&self, g: &GroupElement, k: i64) -> Result<GroupElement> {
        let base = if k < 0 { self.inverse(g)? } else { g.clone() };
        let mut acc = self.identity();
        let mut sq = base;
        let mut e = k.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.op_unchecked(&acc, &sq);
            }
            sq = self.op_unchecked(&sq, &sq);
            e >>= 1;
        }
        Ok(acc)
    }

    /// Order of `g`, or `None` when it is infinite.
    pub fn element_order(&self, g: &GroupElement) -> Result<Option<u64>> {
        self.check_element(g)?;
        if self.is_identity(g) {
            return Ok(Some(1));
        }
        if !self.is_finite() {
            return Ok(None);
        }
        let mut acc = g.clone();
        let mut k = 1;
        while !self.is_identity(&acc) {
            acc = self.op_unchecked(&acc, g);
            k += 1;
        }
        Ok(Some(k))
    }

    /// Parses an element: `(1,-2)` or `3` for ℤ^d, `abA` / `e` for free
    /// groups, an index for finite groups.
    pub fn parse_element(&self, text: &str) -> Result<GroupElement> {
        let s = text.trim();
        let g = match &self.family {
            Family::FreeAbelian(_) => {
                let inner = s.trim_start_matches('(').trim_end_matches(')');
                let v = inner
                    .split(',')
                    .map(|p| p.trim().parse::<i64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| Error::Parse(format!("bad lattice element {s:?}")))?;
                GroupElement::Vector(v)
            }
            Family::Free(_) => {
                if s == "e" || s.is_empty() {
                    GroupElement::Word(Vec::new())
                } else {
                    let mut w = GroupElement::Word(Vec::new());
                    for c in s.chars() {
                        if !c.is_ascii_alphabetic() {
                            return Err(Error::Parse(format!("bad word {s:?}")));
                        }
                        let idx = (c.to_ascii_lowercase() as u8 - b'a') as i32 + 1;
                        let l = if c.is_ascii_uppercase() { -idx } else { idx };
                        w = self.op_unchecked(&w, &GroupElement::Word(vec![l]));
                    }
                    w
                }
            }
            _ => GroupElement::Index(
                s.parse()
                    .map_err(|_| Error::Parse(format!("bad element index {s:?}")))?,
            ),
        };
        self.check_element(&g)?;
        Ok(g)
    }

    pub fn word_ball(&self, n: usize) -> Result<WordBall> {
        WordBall::build(self, n)
    }

    /// Length of `g` with respect to the listed generators.
    pub fn word_length(&self, g: &GroupElement) -> Result<u64> {
        self.check_element(g)?;
        if self.standard {
            match (&self.family, g) {
                (Family::FreeAbelian(_), GroupElement::Vector(v)) => {
                    return Ok(v.iter().map(|x| x.unsigned_abs()).sum())
                }
                (Family::Free(_), GroupElement::Word(w)) => return Ok(w.len() as u64),
                (Family::CyclicFinite(m), GroupElement::Index(i)) => {
                    let i = *i as u64;
                    return Ok(i.min(m - i));
                }
                _ => {}
            }
        }
        ball::bfs_length(self, g)
    }

    /// `d^G(h, g) = |h⁻¹g|`.
    pub fn word_metric(&self, h: &GroupElement, g: &GroupElement) -> Result<u64> {
        let diff = self.op(&self.inverse(h)?, g)?;
        self.word_length(&diff)
    }
}

fn validate_family(family: &Family) -> Result<()> {
    match family {
        Family::FreeAbelian(d) if *d == 0 => Err(Error::InvalidGroup("ℤ^0 has no generators".into())),
        Family::Free(k) if *k == 0 || *k > 26 => Err(Error::InvalidGroup(format!("free rank {k} outside 1..=26"))),
        Family::CyclicFinite(0) => Err(Error::InvalidGroup("cyclic group of order 0".into())),
        Family::FiniteTable(t) => validate_table(t),
        _ => Ok(()),
    }
}

fn validate_table(t: &[Vec<usize>]) -> Result<()> {
    let n = t.len();
    if n == 0 {
        return Err(Error::InvalidGroup("empty table".into()));
    }
    for (i, row) in t.iter().enumerate() {
        if row.len() != n {
            return Err(Error::InvalidGroup(format!("row {i} has length {}", row.len())));
        }
        if row.iter().any(|&v| v >= n) {
            return Err(Error::InvalidGroup(format!("row {i} has an out-of-range entry")));
        }
        if row[0] != i || t[0][i] != i {
            return Err(Error::InvalidGroup(format!("index 0 is not an identity for {i}")));
        }
        if row.iter().filter(|&&v| v == 0).count() != 1 {
            return Err(Error::InvalidGroup(format!("element {i} has no unique inverse")));
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if t[t[a][b]][c] != t[a][t[b][c]] {
                    return Err(Error::InvalidGroup(format!("associativity fails at ({a},{b},{c})")));
                }
            }
        }
    }
    Ok(())
}

fn standard_generators(family: &Family) -> Vec<GroupElement> {
    match family {
        Family::FreeAbelian(d) => (0..*d)
            .flat_map(|i| {
                let mut p = vec![0; *d];
                p[i] = 1;
                let mut q = vec![0; *d];
                q[i] = -1;
                [GroupElement::Vector(p), GroupElement::Vector(q)]
            })
            .collect(),
        Family::Free(k) => (1..=*k as i32)
            .flat_map(|i| [GroupElement::Word(vec![i]), GroupElement::Word(vec![-i])])
            .collect(),
        Family::CyclicFinite(1) => vec![GroupElement::Index(0)],
        Family::CyclicFinite(2) => vec![GroupElement::Index(1)],
        Family::CyclicFinite(m) => vec![GroupElement::Index(1), GroupElement::Index((*m - 1) as usize)],
        Family::FiniteTable(t) if t.len() == 1 => vec![GroupElement::Index(0)],
        Family::FiniteTable(t) => (1..t.len()).map(GroupElement::Index).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[i64]) -> GroupElement {
        GroupElement::Vector(x.to_vec())
    }

    #[test]
    fn lattice_operations() {
        let z2 = GroupSpec::lattice(2);
        assert_eq!(z2.op(&v(&[1, 0]), &v(&[0, 1])).unwrap(), v(&[1, 1]));
        assert_eq!(z2.word_metric(&v(&[0, 0]), &v(&[2, 3])).unwrap(), 5);
        assert!(z2
            .op(&v(&[1, 0]), &GroupElement::Index(1))
            .unwrap_err()
            .to_string()
            .contains("mismatch"));
    }

    #[test]
    fn free_reduction() {
        let f2 = GroupSpec::standard(Family::Free(2)).unwrap();
        let a = f2.parse_element("a").unwrap();
        let ai = f2.parse_element("A").unwrap();
        assert_eq!(f2.op(&a, &ai).unwrap(), f2.identity());
        assert_eq!(f2.parse_element("abBa").unwrap(), f2.parse_element("aa").unwrap());
        assert_eq!(f2.parse_element("abaB").unwrap().to_string(), "abaB");
    }

    #[test]
    fn cyclic_inverse() {
        let c4 = GroupSpec::standard(Family::CyclicFinite(4)).unwrap();
        assert_eq!(c4.inverse(&GroupElement::Index(3)).unwrap(), GroupElement::Index(1));
        assert_eq!(c4.element_order(&GroupElement::Index(1)).unwrap(), Some(4));
    }

    #[test]
    fn rejects_bad_generators() {
        let err = GroupSpec::new(Family::FreeAbelian(1), vec![v(&[2])]).unwrap_err();
        assert!(matches!(err, Error::InvalidGroup(_)));
        assert!(GroupSpec::new(Family::FreeAbelian(1), vec![]).is_err());
    }

    #[test]
    fn rejects_non_group_tables() {
        let bad = vec![vec![0, 1, 2], vec![1, 1, 0], vec![2, 0, 1]];
        assert!(GroupSpec::standard(Family::FiniteTable(bad)).is_err());
        let klein = vec![vec![0, 1, 2, 3], vec![1, 0, 3, 2], vec![2, 3, 0, 1], vec![3, 2, 1, 0]];
        let g = GroupSpec::standard(Family::FiniteTable(klein)).unwrap();
        assert_eq!(g.inverse(&GroupElement::Index(2)).unwrap(), GroupElement::Index(2));
    }

    #[test]
    fn names_parse() {
        assert_eq!(GroupSpec::from_name("Z2").unwrap(), GroupSpec::lattice(2));
        assert_eq!(GroupSpec::from_name("Z").unwrap(), GroupSpec::integers());
        assert!(GroupSpec::from_name("F2").unwrap().family() == &Family::Free(2));
        assert!(GroupSpec::from_name("Q8").is_err());
    }

    #[test]
    fn powers() {
        let f2 = GroupSpec::standard(Family::Free(2)).unwrap();
        let ab = f2.parse_element("ab").unwrap();
        assert_eq!(f2.pow(&ab, 2).unwrap().to_string(), "abab");
        assert_eq!(f2.pow(&ab, -1).unwrap().to_string(), "BA");
    }
}
