//! The dyadic odometer and its topological full group.
//!
//! The odometer phi is "+1 with binary carry" on {0,1}^w; under the
//! little-endian prefix encoding it adds 1 to prefix integers modulo 2^n at
//! every depth n, and acts on eventually constant points as +1 on the
//! integers they encode 2-adically. An element of the topological full group
//! is a piecewise power of phi on a finite clopen partition; we keep it in
//! the canonical form that stores, for each occurring power k, the level set
//! D_k on which the map is phi^k.

use crate::cantor::{CantorPoint, ClopenSet};
use crate::rat::{pow2_inv, Rat};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum OdometerError {
    #[error("not a piecewise odometer power: {0}")]
    InvariantViolation(String),
    #[error("transport needs measure(A) < measure(B)")]
    MeasureNotDominated,
    #[error("equivalence needs measure(A) = measure(B)")]
    MeasureMismatch,
    #[error("delta must be 2^-d for some d >= 0, got {0}")]
    InvalidDelta(String),
}

/// phi^k of a clopen set: prefix integers translate by k at fixed depth.
///
/// Carries past the depth horizon permute tails bijectively, so this is a
/// set-level identity, not an approximation.
pub fn odometer_image_set(a: &ClopenSet, k: i64) -> ClopenSet {
    let depth = a.depth();
    let modulus = 1i128 << depth;
    ClopenSet::from_leaves(
        depth,
        a.leaves()
            .iter()
            .map(|&u| (u as i128 + k as i128).rem_euclid(modulus) as u64),
    )
}

/// phi^k on an eventually constant point: +k on the encoded integer.
pub fn odometer_eval_point(x: &CantorPoint, k: i64) -> CantorPoint {
    CantorPoint::from_int(&(x.to_int() + k))
}

/// An element of the topological full group of the odometer.
///
/// Canonical form: one piece per power, pieces sorted by power, domains a
/// clopen partition of X whose images also partition X.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseMap {
    pieces: Vec<(i64, ClopenSet)>,
}

impl PiecewiseMap {
    pub fn identity() -> Self {
        PiecewiseMap {
            pieces: vec![(0, ClopenSet::full())],
        }
    }

    /// The odometer itself, or any fixed power of it, as a one-piece map.
    pub fn phi_power(k: i64) -> Self {
        PiecewiseMap {
            pieces: vec![(k, ClopenSet::full())],
        }
    }

    /// Build from (domain, power) pieces, checking both partition invariants.
    pub fn new(pieces: Vec<(ClopenSet, i64)>) -> Result<Self, OdometerError> {
        let mut by_power: BTreeMap<i64, ClopenSet> = BTreeMap::new();
        for (dom, k) in pieces {
            if dom.is_empty() {
                continue;
            }
            let entry = by_power.entry(k).or_insert_with(ClopenSet::empty);
            *entry = entry.union(&dom);
        }
        let map = PiecewiseMap {
            pieces: by_power.into_iter().collect(),
        };
        map.check_partitions()?;
        Ok(map)
    }

    fn check_partitions(&self) -> Result<(), OdometerError> {
        let depth = self.depth();
        let size = 1u64 << depth;
        let mut dom_seen = vec![false; size as usize];
        let mut img_seen = vec![false; size as usize];
        let mut count = 0u64;
        for (k, dom) in &self.pieces {
            for &u in dom.refined_to(depth).leaves() {
                if dom_seen[u as usize] {
                    return Err(OdometerError::InvariantViolation(
                        "domains overlap".into(),
                    ));
                }
                dom_seen[u as usize] = true;
                let v = (u as i128 + *k as i128).rem_euclid(1 << depth) as u64;
                if img_seen[v as usize] {
                    return Err(OdometerError::InvariantViolation(
                        "images overlap, the pieces do not define a bijection".into(),
                    ));
                }
                img_seen[v as usize] = true;
                count += 1;
            }
        }
        if count != size {
            return Err(OdometerError::InvariantViolation(
                "domains do not cover X".into(),
            ));
        }
        Ok(())
    }

    /// Level sets D_k = { x : g(x) = phi^k(x) }, nonempty only.
    pub fn level_sets(&self) -> &[(i64, ClopenSet)] {
        &self.pieces
    }

    /// Least depth at which every piece is a union of cylinders.
    pub fn depth(&self) -> u32 {
        self.pieces.iter().map(|(_, d)| d.depth()).max().unwrap_or(0)
    }

    pub fn is_identity(&self) -> bool {
        self.pieces.len() == 1 && self.pieces[0].0 == 0
    }

    /// K = max |k| over nonempty level sets; 0 exactly for the identity.
    pub fn cocycle_bound(&self) -> u64 {
        self.pieces
            .iter()
            .map(|(k, _)| k.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    /// Rank of the well-founded tree of shrinking clopen sets avoiding the
    /// level sets: 0 for the identity, cocycle bound + 1 otherwise.
    pub fn tree_rank(&self) -> u64 {
        if self.is_identity() {
            0
        } else {
            self.cocycle_bound() + 1
        }
    }

    pub fn eval(&self, x: &CantorPoint) -> CantorPoint {
        for (k, dom) in &self.pieces {
            if dom.contains(x) {
                return odometer_eval_point(x, *k);
            }
        }
        unreachable!("domains cover X")
    }

    /// Set-level image g(A).
    pub fn apply_set(&self, a: &ClopenSet) -> ClopenSet {
        let mut out = ClopenSet::empty();
        for (k, dom) in &self.pieces {
            let part = dom.intersection(a);
            if !part.is_empty() {
                out = out.union(&odometer_image_set(&part, *k));
            }
        }
        out
    }

    pub fn inverse(&self) -> PiecewiseMap {
        PiecewiseMap::new(
            self.pieces
                .iter()
                .map(|(k, dom)| (odometer_image_set(dom, *k), -k))
                .collect(),
        )
        .expect("inverse of a valid map is valid")
    }

    /// g.compose(h) is the map x -> g(h(x)).
    pub fn compose(&self, h: &PiecewiseMap) -> PiecewiseMap {
        let mut pieces = Vec::new();
        for (b, dom_h) in &h.pieces {
            for (a, dom_g) in &self.pieces {
                // x with h(x) = phi^b(x) landing in dom_g
                let dom = dom_h.intersection(&odometer_image_set(dom_g, -b));
                if !dom.is_empty() {
                    pieces.push((dom, a + b));
                }
            }
        }
        PiecewiseMap::new(pieces).expect("composite of valid maps is valid")
    }

    /// Exact sup-metric distance max_x d(g(x), h(x)).
    ///
    /// On a common piece where the powers are a and b, phi^a(x) and phi^b(x)
    /// first differ at exactly the 2-adic valuation of a - b, independent of
    /// x; the sup is the max of 2^-v over pieces with differing powers.
    pub fn sup_distance(&self, other: &PiecewiseMap) -> Rat {
        let mut best: Option<u32> = None;
        for (a, dom_g) in &self.pieces {
            for (b, dom_h) in &other.pieces {
                if a == b || dom_g.is_disjoint_from(dom_h) {
                    continue;
                }
                let v = (a - b).unsigned_abs().trailing_zeros();
                best = Some(best.map_or(v, |w| w.min(v)));
            }
        }
        match best {
            None => Rat::zero(),
            Some(v) => pow2_inv(v),
        }
    }

    /// Least m >= 1 with g^m = id, or None if not found within max_iter.
    pub fn order(&self, max_iter: u64) -> Option<u64> {
        let mut acc = self.clone();
        for m in 1..=max_iter {
            if acc.is_identity() {
                return Some(m);
            }
            acc = self.compose(&acc);
        }
        None
    }
}

impl fmt::Display for PiecewiseMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .pieces
            .iter()
            .map(|(k, d)| format!("phi^{k} on {d}"))
            .collect();
        write!(f, "[{}]", parts.join("; "))
    }
}

/// Single-tower Kakutani-Rokhlin partition: base [0^n], height 2^n, level i
/// the cylinder with prefix integer i. phi maps the top back to the base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KRPartition {
    base_depth: u32,
}

impl KRPartition {
    pub fn new(n: u32) -> Self {
        assert!((1..=30).contains(&n), "tower depth out of range");
        KRPartition { base_depth: n }
    }

    pub fn base_depth(&self) -> u32 {
        self.base_depth
    }

    pub fn height(&self) -> u64 {
        1 << self.base_depth
    }

    pub fn base(&self) -> ClopenSet {
        self.level(0)
    }

    pub fn top(&self) -> ClopenSet {
        self.level(self.height() - 1)
    }

    /// Level i = phi^i(base), a single cylinder of length n.
    pub fn level(&self, i: u64) -> ClopenSet {
        assert!(i < self.height());
        ClopenSet::cylinder(i, self.base_depth)
    }

    pub fn levels(&self) -> impl Iterator<Item = ClopenSet> + '_ {
        (0..self.height()).map(|i| self.level(i))
    }
}

/// Involution in the topological full group with g(A) contained in B,
/// existing whenever measure(A) < measure(B).
///
/// Cylinders of A cap B stay fixed; the depth-n cylinders of A \ B are
/// matched to cylinders of B \ A in ascending prefix order and each matched
/// pair is swapped by the powers of phi that exchange them.
pub fn gw_transport(a: &ClopenSet, b: &ClopenSet) -> Result<PiecewiseMap, OdometerError> {
    if a.measure() >= b.measure() {
        return Err(OdometerError::MeasureNotDominated);
    }
    Ok(matched_involution(a, b))
}

/// Involution in the topological full group with g(A) = B, existing whenever
/// measure(A) = measure(B). For the dyadic odometer the same cylinder
/// matching that proves the transport statement realizes the equivalence
/// inside the topological full group.
pub fn gw_equivalence(a: &ClopenSet, b: &ClopenSet) -> Result<PiecewiseMap, OdometerError> {
    if a.measure() != b.measure() {
        return Err(OdometerError::MeasureMismatch);
    }
    Ok(matched_involution(a, b))
}

fn matched_involution(a: &ClopenSet, b: &ClopenSet) -> PiecewiseMap {
    let depth = a.depth().max(b.depth());
    let af = a.refined_to(depth);
    let bf = b.refined_to(depth);
    let a_only: Vec<u64> = af
        .leaves()
        .iter()
        .copied()
        .filter(|u| bf.leaves().binary_search(u).is_err())
        .collect();
    let b_only: Vec<u64> = bf
        .leaves()
        .iter()
        .copied()
        .filter(|u| af.leaves().binary_search(u).is_err())
        .collect();
    let mut pieces = Vec::new();
    let mut moved = ClopenSet::empty();
    for (&u, &w) in a_only.iter().zip(&b_only) {
        let k = w as i64 - u as i64;
        let cu = ClopenSet::cylinder(u, depth);
        let cw = ClopenSet::cylinder(w, depth);
        moved = moved.union(&cu).union(&cw);
        pieces.push((cu, k));
        pieces.push((cw, -k));
    }
    let fixed = moved.complement();
    if !fixed.is_empty() {
        pieces.push((fixed, 0));
    }
    PiecewiseMap::new(pieces).expect("matched swaps form a bijection")
}

/// Finite-order approximation of gamma within sup distance delta = 2^-d,
/// for both the map and its inverse.
///
/// A Kakutani-Rokhlin tower of height 2^n is chosen fine enough that the
/// cocycles of gamma and its inverse are constant on levels, with
/// 2^n >= 2K + 2 and 2^-n < delta. On each level the approximation keeps
/// gamma where gamma stays inside the tower and otherwise replaces the power
/// by the one that wraps around the tower, which moves points a distance of
/// only 2^-n.
pub fn gm_finite_order_approx(
    gamma: &PiecewiseMap,
    delta: &Rat,
) -> Result<PiecewiseMap, OdometerError> {
    let d = delta.denom().trailing_zeros().unwrap_or(0) as u32;
    if !delta.numer().is_one()
        || delta <= &Rat::zero()
        || delta > &Rat::one()
        || delta.denom() != &(num_bigint::BigInt::one() << d)
    {
        return Err(OdometerError::InvalidDelta(delta.to_string()));
    }
    let bound = gamma.cocycle_bound();
    let mut n = (d + 1).max(gamma.depth()).max(gamma.inverse().depth()).max(1);
    while (1u64 << n) < 2 * bound + 2 {
        n += 1;
    }
    let tower = KRPartition::new(n);
    let height = tower.height() as i64;
    let mut pieces = Vec::new();
    for i in 0..height {
        let level = tower.level(i as u64);
        let j = gamma
            .level_sets()
            .iter()
            .find(|(_, dom)| level.is_subset_of(dom))
            .map(|(k, _)| *k)
            .expect("cocycle constant on levels at this depth");
        let p = if j + i < 0 {
            j + height
        } else if j + i >= height {
            j - height
        } else {
            j
        };
        pieces.push((level, p));
    }
    PiecewiseMap::new(pieces)
}

// ---------------------------------------------------------------------------
// wire format

#[derive(Serialize, Deserialize)]
struct PieceWire {
    domain: ClopenSet,
    power: i64,
}

#[derive(Serialize, Deserialize)]
struct MapWire {
    pieces: Vec<PieceWire>,
}

impl Serialize for PiecewiseMap {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        MapWire {
            pieces: self
                .pieces
                .iter()
                .map(|(k, d)| PieceWire {
                    domain: d.clone(),
                    power: *k,
                })
                .collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for PiecewiseMap {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let w = MapWire::deserialize(de)?;
        PiecewiseMap::new(
            w.pieces
                .into_iter()
                .map(|p| (p.domain, p.power))
                .collect(),
        )
        .map_err(D::Error::custom)
    }
}
