//! Eventually periodic points of the two-sided full shift and the exact
//! metric `D(x, y) = Σ_i [x_i ≠ y_i] / 2^|i|`.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{q_int, q_pow2, Q};

/// The bi-infinite sequence `⋯ L L [core] R R ⋯` where `core[0]` sits at
/// index `offset`, position `i < offset` reads `left[(i - offset) mod |L|]`
/// and position `i >= offset + |core|` reads `right[(i - end) mod |R|]`.
///
/// Values are always canonical, so `==` is equality of sequences.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawShiftPoint")]
pub struct ShiftPoint {
    left: Vec<u8>,
    core: Vec<u8>,
    right: Vec<u8>,
    offset: i64,
}

#[derive(Deserialize)]
struct RawShiftPoint {
    left: Vec<u8>,
    core: Vec<u8>,
    right: Vec<u8>,
    offset: i64,
}

impl TryFrom<RawShiftPoint> for ShiftPoint {
    type Error = Error;

    fn try_from(r: RawShiftPoint) -> Result<Self> {
        ShiftPoint::new(r.left, r.core, r.right, r.offset)
    }
}

fn primitive_root(w: &[u8]) -> Vec<u8> {
    let n = w.len();
    for d in 1..=n {
        if n.is_multiple_of(d) && (d..n).all(|i| w[i] == w[i - d]) {
            return w[..d].to_vec();
        }
    }
    w.to_vec()
}

fn rotate_left(w: &mut [u8], k: usize) {
    let n = w.len();
    w.rotate_left(k % n);
}

fn is_primitive(w: &[u8]) -> bool {
    primitive_root(w).len() == w.len()
}

impl ShiftPoint {
    pub fn new(left: Vec<u8>, core: Vec<u8>, right: Vec<u8>, offset: i64) -> Result<Self> {
        if left.is_empty() || right.is_empty() {
            return Err(Error::domain("shift point periods must be nonempty"));
        }
        let mut p = ShiftPoint {
            left,
            core,
            right,
            offset,
        };
        p.canonicalize();
        Ok(p)
    }

    /// Constant sequence `s^∞`.
    pub fn constant(s: u8) -> Self {
        ShiftPoint {
            left: vec![s],
            core: Vec::new(),
            right: vec![s],
            offset: 0,
        }
    }

    /// Purely periodic point with `x_i = word[i mod |word|]`.
    pub fn periodic(word: &[u8]) -> Result<Self> {
        Self::new(word.to_vec(), Vec::new(), word.to_vec(), 0)
    }

    /// `block` placed at `start` on a constant background.
    pub fn block(block: &[u8], start: i64, background: u8) -> Self {
        Self::new(vec![background], block.to_vec(), vec![background], start).expect("periods are nonempty")
    }

    fn end(&self) -> i64 {
        self.offset + self.core.len() as i64
    }

    pub fn left(&self) -> &[u8] {
        &self.left
    }

    pub fn core(&self) -> &[u8] {
        &self.core
    }

    pub fn right(&self) -> &[u8] {
        &self.right
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn max_symbol(&self) -> u8 {
        self.left
            .iter()
            .chain(&self.core)
            .chain(&self.right)
            .copied()
            .max()
            .unwrap_or(0)
    }

    /// Orbit size under the shift if purely periodic.
    pub fn period(&self) -> Option<usize> {
        (self.core.is_empty() && self.left == self.right && self.offset == 0).then_some(self.left.len())
    }

    pub fn symbol(&self, i: i64) -> u8 {
        if i < self.offset {
            let p = self.left.len() as i64;
            self.left[(i - self.offset).rem_euclid(p) as usize]
        } else if i < self.end() {
            self.core[(i - self.offset) as usize]
        } else {
            let q = self.right.len() as i64;
            self.right[(i - self.end()).rem_euclid(q) as usize]
        }
    }

    /// Symbols at indices `lo..=hi`.
    pub fn window(&self, lo: i64, hi: i64) -> Vec<u8> {
        (lo..=hi).map(|i| self.symbol(i)).collect()
    }

    /// The same sequence with index `i` set to `s`.
    pub fn with_symbol(&self, i: i64, s: u8) -> Self {
        let p = self.left.len() as i64;
        let q = self.right.len() as i64;
        let end = self.end();
        let lo = if i < self.offset {
            self.offset - p * ((self.offset - i + p - 1) / p)
        } else {
            self.offset
        };
        let hi = if i >= end { end + q * ((i - end) / q + 1) } else { end };
        let mut core = self.window(lo, hi - 1);
        core[(i - lo) as usize] = s;
        Self::new(self.left.clone(), core, self.right.clone(), lo).expect("periods are nonempty")
    }

    /// `(σ^m x)_i = π(x_{i+m})`.
    pub fn shifted(&self, by: i64, relabel: &[u8]) -> Self {
        let map = |w: &[u8]| w.iter().map(|&s| relabel[s as usize]).collect::<Vec<_>>();
        let mut p = ShiftPoint {
            left: map(&self.left),
            core: map(&self.core),
            right: map(&self.right),
            offset: self.offset - by,
        };
        p.canonicalize();
        p
    }

    fn canonicalize(&mut self) {
        self.left = primitive_root(&self.left);
        self.right = primitive_root(&self.right);
        // absorb the core tail into the right period
        while let Some(&last) = self.core.last() {
            let q = self.right.len();
            if last != self.right[q - 1] {
                break;
            }
            self.core.pop();
            self.right.rotate_right(1);
        }
        // absorb the core head into the left period
        while let Some(&first) = self.core.first() {
            if first != self.left[0] {
                break;
            }
            self.core.remove(0);
            rotate_left(&mut self.left, 1);
            self.offset += 1;
        }
        if !self.core.is_empty() {
            return;
        }
        if self.left == self.right {
            let p = self.left.len() as i64;
            let shift = (-self.offset).rem_euclid(p) as usize;
            // x_i = w[(i - offset) mod p] = w'[i mod p]
            let mut w = self.left.clone();
            w.rotate_left(shift);
            self.left = w.clone();
            self.right = w;
            self.offset = 0;
            return;
        }
        // both rules agree on a stretch: move the seam as far right as possible
        while self.right[0] == self.left[0] {
            rotate_left(&mut self.left, 1);
            rotate_left(&mut self.right, 1);
            self.offset += 1;
        }
    }

    /// Smallest `|i|` with `x_i ≠ y_i`, or `None` if equal.
    pub fn first_difference(&self, other: &ShiftPoint) -> Option<u64> {
        if self == other {
            return None;
        }
        let lo = self.offset.min(other.offset);
        let hi = self.end().max(other.end());
        let tail = lcm(self.right.len(), other.right.len()).max(lcm(self.left.len(), other.left.len()));
        let reach = lo.unsigned_abs().max(hi.unsigned_abs()) + tail as u64 + 1;
        for m in 0..=reach {
            let m = m as i64;
            if self.symbol(m) != other.symbol(m) || self.symbol(-m) != other.symbol(-m) {
                return Some(m as u64);
            }
        }
        // unequal canonical forms differ somewhere inside the scanned range
        unreachable!("canonical forms differ but sequences agree on [-{reach}, {reach}]")
    }

    /// Exact `D(x, y)`.
    pub fn distance(&self, other: &ShiftPoint) -> Q {
        if self == other {
            return Q::zero();
        }
        let lo = self.offset.min(other.offset).min(0);
        let hi = self.end().max(other.end()).max(1);
        let mut total = Q::zero();
        // middle block: weights 2^-|i|, accumulated over a common denominator
        let span = lo.unsigned_abs().max(hi.unsigned_abs());
        let mut acc = num_bigint::BigInt::zero();
        for i in lo..hi {
            if self.symbol(i) != other.symbol(i) {
                acc += num_bigint::BigInt::one() << (span - i.unsigned_abs()) as usize;
            }
        }
        total += Q::new(acc, num_bigint::BigInt::one() << span as usize);
        // right tail from hi >= 1, periodic with period L
        let l = lcm(self.right.len(), other.right.len());
        let mut tail = Q::zero();
        for j in 0..l as i64 {
            if self.symbol(hi + j) != other.symbol(hi + j) {
                tail += q_pow2(-(hi + j));
            }
        }
        total += tail / (Q::one() - q_pow2(-(l as i64)));
        // left tail ending at lo - 1 <= -1, weights 2^i
        let l = lcm(self.left.len(), other.left.len());
        let mut tail = Q::zero();
        for j in 0..l as i64 {
            let i = lo - 1 - j;
            if self.symbol(i) != other.symbol(i) {
                tail += q_pow2(i);
            }
        }
        total += tail / (Q::one() - q_pow2(-(l as i64)));
        total
    }

    /// `D(x, y) < eps` using the bounds `2^-m <= D <= 2^(2-m)` from the
    /// first difference `m` before falling back to the exact sum.
    pub fn within(&self, other: &ShiftPoint, eps: &Q) -> bool {
        match self.first_difference(other) {
            None => eps > &Q::zero(),
            Some(m) => {
                let m = m as i64;
                if q_pow2(-m) >= *eps {
                    false
                } else if q_pow2(2 - m) < *eps {
                    true
                } else {
                    self.distance(other) < *eps
                }
            }
        }
    }

    /// All purely periodic points with least period `<= bound` over the
    /// alphabet, ordered by period then word.
    pub fn all_periodic(alphabet: u8, bound: usize) -> Vec<ShiftPoint> {
        let mut out = Vec::new();
        for p in 1..=bound {
            let total = (alphabet as u64).checked_pow(p as u32).unwrap_or(u64::MAX);
            for code in 0..total {
                let mut w = vec![0u8; p];
                let mut c = code;
                for k in (0..p).rev() {
                    w[k] = (c % alphabet as u64) as u8;
                    c /= alphabet as u64;
                }
                if is_primitive(&w) {
                    out.push(ShiftPoint {
                        left: w.clone(),
                        core: Vec::new(),
                        right: w,
                        offset: 0,
                    });
                }
            }
        }
        out
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a.lcm(&b)
}

impl fmt::Display for ShiftPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = |v: &[u8]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>().join("");
        if self.period().is_some() {
            return write!(f, "({})^∞", w(&self.left));
        }
        write!(
            f,
            "({})^∞ [{}]@{} ({})^∞",
            w(&self.left),
            w(&self.core),
            self.offset,
            w(&self.right)
        )
    }
}

fn digits(w: &str) -> Result<Vec<u8>> {
    w.chars()
        .map(|c| {
            c.to_digit(10)
                .map(|d| d as u8)
                .ok_or_else(|| Error::Parse(format!("bad symbol {c:?} in {w:?}")))
        })
        .collect()
}

fn periodic_part(t: &str) -> Result<Vec<u8>> {
    let inner = ["^∞", "^inf", "^"]
        .iter()
        .find_map(|suf| t.strip_suffix(suf))
        .and_then(|t| t.strip_prefix('('))
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| Error::Parse(format!("expected (word)^∞, got {t:?}")))?;
    let w = digits(inner)?;
    if w.is_empty() {
        return Err(Error::Parse("empty periodic word".into()));
    }
    Ok(w)
}

fn core_part(t: &str) -> Result<(Vec<u8>, i64)> {
    let (word, off) = t
        .strip_prefix('[')
        .and_then(|t| t.split_once("]@"))
        .ok_or_else(|| Error::Parse(format!("expected [word]@offset, got {t:?}")))?;
    let off = off.parse().map_err(|_| Error::Parse(format!("bad offset in {t:?}")))?;
    Ok((digits(word)?, off))
}

/// Parses the display form: `(01)^∞`, `(L)^∞ [core]@offset (R)^∞`, or the
/// shorthand `[core]@offset` on a zero background. Symbols are single digits.
impl std::str::FromStr for ShiftPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        match parts.as_slice() {
            [p] if p.starts_with('[') => {
                let (core, off) = core_part(p)?;
                Ok(ShiftPoint::block(&core, off, 0))
            }
            [p] => ShiftPoint::periodic(&periodic_part(p)?),
            [l, c, r] => {
                let (core, off) = core_part(c)?;
                ShiftPoint::new(periodic_part(l)?, core, periodic_part(r)?, off)
            }
            _ => Err(Error::Parse(format!("bad sequence {s:?}"))),
        }
    }
}

impl fmt::Debug for ShiftPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ShiftPoint({self})")
    }
}

/// Upper bound on `D` restricted to `|i| >= m`.
pub fn tail_mass(m: u64) -> Q {
    if m == 0 {
        q_int(3)
    } else {
        q_pow2(2 - m as i64)
    }
}
