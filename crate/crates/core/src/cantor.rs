//! The clopen algebra of X = {0,1}^w, the dyadic (1/2,1/2) measure, and the
//! 2^-i ultrametric.
//!
//! A clopen set is a union of cylinders of one common depth n, stored as the
//! set of length-n binary words. Words are indexed little-endian: the word
//! w corresponds to the prefix integer sum w_j 2^j, so the odometer's
//! "+1 with carry" becomes integer addition on prefix integers.

use crate::rat::{pow2_inv, Rat};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum CantorError {
    #[error("the empty set has no diameter")]
    EmptySet,
    #[error("bad binary word {0:?}")]
    BadWord(String),
}

const MAX_DEPTH: u32 = 60;

/// A clopen subset of {0,1}^w in canonical (minimal-depth) form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClopenSet {
    depth: u32,
    /// sorted prefix integers, each < 2^depth
    leaves: Vec<u64>,
}

impl ClopenSet {
    pub fn empty() -> Self {
        ClopenSet {
            depth: 0,
            leaves: vec![],
        }
    }

    /// The whole space, at depth 0.
    pub fn full() -> Self {
        ClopenSet {
            depth: 0,
            leaves: vec![0],
        }
    }

    /// The cylinder of the length-`depth` word with prefix integer `u`.
    pub fn cylinder(u: u64, depth: u32) -> Self {
        assert!(depth <= MAX_DEPTH && (depth == 64 || u < (1u64 << depth)));
        ClopenSet {
            depth,
            leaves: vec![u],
        }
        .canonicalized()
    }

    pub fn from_leaves(depth: u32, leaves: impl IntoIterator<Item = u64>) -> Self {
        assert!(depth <= MAX_DEPTH);
        let mut leaves: Vec<u64> = leaves.into_iter().collect();
        leaves.sort_unstable();
        leaves.dedup();
        if let Some(&max) = leaves.last() {
            assert!(depth == 64 || max < (1u64 << depth), "leaf out of range");
        }
        ClopenSet { depth, leaves }.canonicalized()
    }

    /// Parse cylinder words like "010", index 0 first.
    pub fn from_words(words: &[&str]) -> Result<Self, CantorError> {
        let depth = words.first().map(|w| w.len()).unwrap_or(0) as u32;
        let mut leaves = Vec::with_capacity(words.len());
        for w in words {
            if w.len() as u32 != depth {
                return Err(CantorError::BadWord((*w).to_string()));
            }
            leaves.push(parse_word(w)?.1);
        }
        Ok(ClopenSet::from_leaves(depth, leaves))
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn leaves(&self) -> &[u64] {
        &self.leaves
    }

    pub fn leaf_words(&self) -> Vec<String> {
        self.leaves
            .iter()
            .map(|&u| format_word(u, self.depth))
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.depth == 0 && self.leaves.len() == 1
    }

    fn canonicalized(mut self) -> Self {
        if self.leaves.is_empty() {
            self.depth = 0;
            return self;
        }
        while self.depth > 0 {
            let top = 1u64 << (self.depth - 1);
            let can_merge = self.leaves.iter().all(|&u| {
                let sib = u ^ top;
                self.leaves.binary_search(&sib).is_ok()
            });
            if !can_merge {
                break;
            }
            self.leaves.retain(|&u| u & top == 0);
            self.depth -= 1;
        }
        self
    }

    /// Same set, re-expressed at a (weakly) larger depth.
    pub fn refined_to(&self, depth: u32) -> ClopenSet {
        assert!(depth >= self.depth && depth <= MAX_DEPTH);
        let extra = depth - self.depth;
        let mut leaves = Vec::with_capacity(self.leaves.len() << extra);
        for &u in &self.leaves {
            for t in 0u64..(1 << extra) {
                leaves.push(u | (t << self.depth));
            }
        }
        leaves.sort_unstable();
        ClopenSet { depth, leaves }
    }

    fn common_depth(a: &ClopenSet, b: &ClopenSet) -> (ClopenSet, ClopenSet, u32) {
        let d = a.depth.max(b.depth);
        (a.refined_to(d), b.refined_to(d), d)
    }

    pub fn union(&self, other: &ClopenSet) -> ClopenSet {
        let (a, b, d) = Self::common_depth(self, other);
        let mut leaves = a.leaves;
        leaves.extend(&b.leaves);
        leaves.sort_unstable();
        leaves.dedup();
        ClopenSet { depth: d, leaves }.canonicalized()
    }

    pub fn intersection(&self, other: &ClopenSet) -> ClopenSet {
        let (a, b, d) = Self::common_depth(self, other);
        let leaves = a
            .leaves
            .iter()
            .copied()
            .filter(|u| b.leaves.binary_search(u).is_ok())
            .collect();
        ClopenSet { depth: d, leaves }.canonicalized()
    }

    pub fn difference(&self, other: &ClopenSet) -> ClopenSet {
        let (a, b, d) = Self::common_depth(self, other);
        let leaves = a
            .leaves
            .iter()
            .copied()
            .filter(|u| b.leaves.binary_search(u).is_err())
            .collect();
        ClopenSet { depth: d, leaves }.canonicalized()
    }

    pub fn complement(&self) -> ClopenSet {
        ClopenSet::full().difference(self)
    }

    pub fn is_subset_of(&self, other: &ClopenSet) -> bool {
        self.difference(other).is_empty()
    }

    pub fn is_disjoint_from(&self, other: &ClopenSet) -> bool {
        self.intersection(other).is_empty()
    }

    /// Dyadic measure |leaves| / 2^depth; depth-invariant.
    pub fn measure(&self) -> Rat {
        Rat::new(
            BigInt::from(self.leaves.len()),
            BigInt::one() << self.depth,
        )
    }

    /// Max pairwise 2^-i distance: 2^-(longest common prefix of the leaves).
    pub fn diameter(&self) -> Result<Rat, CantorError> {
        if self.leaves.is_empty() {
            return Err(CantorError::EmptySet);
        }
        if self.depth == 0 {
            // the whole space: points differing at index 0 exist
            return Ok(Rat::one());
        }
        let first = self.leaves[0];
        let mut common = self.depth;
        for &u in &self.leaves[1..] {
            let diff = u ^ first;
            common = common.min(diff.trailing_zeros());
        }
        Ok(pow2_inv(common))
    }

    pub fn contains(&self, x: &CantorPoint) -> bool {
        self.leaves.binary_search(&x.prefix_int(self.depth)).is_ok()
    }
}

impl fmt::Display for ClopenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_full() {
            return write!(f, "X");
        }
        if self.is_empty() {
            return write!(f, "{{}}");
        }
        write!(f, "{{{}}}", self.leaf_words().join(", "))
    }
}

fn parse_word(w: &str) -> Result<(u32, u64), CantorError> {
    if w.len() > MAX_DEPTH as usize {
        return Err(CantorError::BadWord(w.to_string()));
    }
    let mut u = 0u64;
    for (j, c) in w.chars().enumerate() {
        match c {
            '0' => {}
            '1' => u |= 1 << j,
            _ => return Err(CantorError::BadWord(w.to_string())),
        }
    }
    Ok((w.len() as u32, u))
}

fn format_word(u: u64, depth: u32) -> String {
    (0..depth)
        .map(|j| if u & (1 << j) != 0 { '1' } else { '0' })
        .collect()
}

/// An eventually constant point of {0,1}^w: head followed by tail-bit forever.
///
/// Canonical form: the head never ends in the tail bit. Under the
/// little-endian reading these points are exactly the 2-adic integers that
/// are ordinary integers: tail 0 encodes n >= 0, tail 1 encodes n < 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CantorPoint {
    head: Vec<bool>,
    tail: bool,
}

impl CantorPoint {
    pub fn new(head: Vec<bool>, tail: bool) -> Self {
        let mut p = CantorPoint { head, tail };
        while p.head.last() == Some(&p.tail) {
            p.head.pop();
        }
        p
    }

    pub fn zeros() -> Self {
        CantorPoint::new(vec![], false)
    }

    pub fn ones() -> Self {
        CantorPoint::new(vec![], true)
    }

    pub fn parse(head: &str, tail: u8) -> Result<Self, CantorError> {
        let (_, _) = parse_word(head)?; // validates characters
        Ok(CantorPoint::new(
            head.chars().map(|c| c == '1').collect(),
            tail == 1,
        ))
    }

    pub fn head_word(&self) -> String {
        self.head
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }

    pub fn tail_bit(&self) -> u8 {
        self.tail as u8
    }

    pub fn bit(&self, i: usize) -> bool {
        self.head.get(i).copied().unwrap_or(self.tail)
    }

    /// The integer this point encodes 2-adically.
    pub fn to_int(&self) -> BigInt {
        let mut n = BigInt::zero();
        for (j, &b) in self.head.iter().enumerate() {
            if b {
                n += BigInt::one() << j;
            }
        }
        if self.tail {
            n -= BigInt::one() << self.head.len();
        }
        n
    }

    pub fn from_int(n: &BigInt) -> Self {
        if n.sign() != num_bigint::Sign::Minus {
            let head = (0..n.bits()).map(|j| n.bit(j)).collect();
            CantorPoint::new(head, false)
        } else {
            // n = h - 2^len with 0 <= h < 2^len
            let len = (-n).bits(); // smallest len with n + 2^len >= 0
            let h = n + (BigInt::one() << len);
            let head = (0..len).map(|j| h.bit(j)).collect();
            CantorPoint::new(head, true)
        }
    }

    /// First `depth` bits as a prefix integer.
    pub fn prefix_int(&self, depth: u32) -> u64 {
        let mut u = 0u64;
        for j in 0..depth as usize {
            if self.bit(j) {
                u |= 1 << j;
            }
        }
        u
    }
}

impl fmt::Display for CantorPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}({})^w",
            self.head_word(),
            if self.tail { '1' } else { '0' }
        )
    }
}

/// d(x,y) = 2^-i at the least differing index; an ultrametric with diam 1.
pub fn distance(x: &CantorPoint, y: &CantorPoint) -> Rat {
    if x == y {
        return Rat::zero();
    }
    let horizon = x.head.len().max(y.head.len()) + 1;
    for i in 0..horizon {
        if x.bit(i) != y.bit(i) {
            return pow2_inv(i as u32);
        }
    }
    unreachable!("distinct canonical points differ within the horizon")
}

// ---------------------------------------------------------------------------
// wire format

#[derive(Serialize, Deserialize)]
struct ClopenWire {
    depth: u32,
    leaves: Vec<String>,
}

impl Serialize for ClopenSet {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ClopenWire {
            depth: self.depth,
            leaves: self.leaf_words(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for ClopenSet {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let w = ClopenWire::deserialize(de)?;
        if w.depth > MAX_DEPTH {
            return Err(D::Error::custom(format!("depth {} too large", w.depth)));
        }
        let mut leaves = Vec::with_capacity(w.leaves.len());
        for word in &w.leaves {
            let (len, u) = parse_word(word).map_err(D::Error::custom)?;
            if len != w.depth {
                return Err(D::Error::custom(format!(
                    "leaf {word:?} does not have depth {}",
                    w.depth
                )));
            }
            leaves.push(u);
        }
        Ok(ClopenSet::from_leaves(w.depth, leaves))
    }
}

#[derive(Serialize, Deserialize)]
struct PointWire {
    head: String,
    tail: u8,
}

impl Serialize for CantorPoint {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        PointWire {
            head: self.head_word(),
            tail: self.tail_bit(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for CantorPoint {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let w = PointWire::deserialize(de)?;
        if w.tail > 1 {
            return Err(D::Error::custom("tail bit must be 0 or 1"));
        }
        CantorPoint::parse(&w.head, w.tail).map_err(D::Error::custom)
    }
}
