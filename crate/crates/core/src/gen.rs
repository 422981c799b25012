//! Deterministic random generators for property runs and the CLI.
//!
//! Everything is seeded and reproducible across platforms: a SplitMix64
//! stream is the only entropy source.

use crate::cantor::ClopenSet;
use crate::finalg::{Automorphism, BlockPartition, EmbeddingMap, JepInstance, MeasuredAlgebra};
use crate::odometer::PiecewiseMap;
use crate::rat::{rat, Rat};
use crate::valueset::{Ring, Value, ValueGroup};
use num_bigint::BigInt;
use std::collections::BTreeMap;

/// SplitMix64; deterministic, platform-independent.
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        self.next_u64() % n
    }

    pub fn pick<'a, T>(&mut self, xs: &'a [T]) -> &'a T {
        &xs[self.below(xs.len() as u64) as usize]
    }

    pub fn chance(&mut self, num: u64, den: u64) -> bool {
        self.below(den) < num
    }
}

/// A random element of the topological full group with pieces at the given
/// depth and powers bounded by `cocycle_bound`, by rejection sampling of
/// power assignments until the induced prefix map is a bijection. Cells are
/// filled in order, drawing uniformly among the powers whose target is still
/// free; a dead end rejects the partial assignment and restarts.
pub fn random_map(rng: &mut Rng, depth: u32, cocycle_bound: u64) -> PiecewiseMap {
    assert!((1..=12).contains(&depth));
    let size = 1u64 << depth;
    let k = cocycle_bound as i64;
    'attempt: loop {
        let mut taken = vec![false; size as usize];
        let mut powers = Vec::with_capacity(size as usize);
        for u in 0..size {
            let free: Vec<i64> = (-k..=k)
                .filter(|p| {
                    let target = (u as i64 + p).rem_euclid(size as i64) as usize;
                    !taken[target]
                })
                .collect();
            if free.is_empty() {
                continue 'attempt;
            }
            let p = *rng.pick(&free);
            taken[(u as i64 + p).rem_euclid(size as i64) as usize] = true;
            powers.push(p);
        }
        let pieces = (0..size)
            .map(|u| (ClopenSet::cylinder(u, depth), powers[u as usize]))
            .collect();
        return PiecewiseMap::new(pieces).expect("sampled permutation is a bijection");
    }
}

/// A random value w with 0 < w < bound, representable in V, or None.
///
/// Draws from ring-appropriate candidates: rational multiples for Q-like
/// rings, powers of the inverted base for localizations, small generator
/// combinations over the integers.
pub fn random_split_part(rng: &mut Rng, v: &ValueGroup, bound: &Value) -> Option<Value> {
    for _ in 0..32 {
        let candidate = match &v.ring {
            Ring::Rationals => {
                let den = 2 + rng.below(3) as i64;
                let num = 1 + rng.below(den as u64 - 1) as i64;
                bound.scale(&rat(num, den))
            }
            Ring::IntegersInverting(m) => {
                let t = 1 + rng.below(2);
                let den = (*m as i64).pow(t as u32);
                let num = 1 + rng.below(den as u64 - 1) as i64;
                bound.scale(&rat(num, den))
            }
            Ring::Integers => {
                // span of the generators and the unit with small coefficients
                let mut w = Value::zero();
                for g in &v.generators {
                    let c = rng.below(5) as i64 - 2;
                    w = w.add(&g.scale(&Rat::from_integer(BigInt::from(c))));
                }
                w = w.add(&Value::from_rat(Rat::from_integer(BigInt::from(
                    rng.below(3) as i64 - 1,
                ))));
                w
            }
        };
        let pos = v.is_positive(&candidate).unwrap_or(false);
        let below = v
            .compare(&candidate, bound)
            .map(|o| o == std::cmp::Ordering::Less)
            .unwrap_or(false);
        if pos && below {
            return Some(candidate);
        }
    }
    None
}

/// A random measured algebra over V with at most `max_atoms` atoms, built by
/// repeatedly splitting the unit.
pub fn random_algebra(rng: &mut Rng, v: &ValueGroup, max_atoms: usize) -> MeasuredAlgebra {
    assert!(max_atoms >= 1);
    let mut measures = vec![Value::one()];
    while measures.len() < max_atoms {
        let idx = rng.below(measures.len() as u64) as usize;
        let Some(w) = random_split_part(rng, v, &measures[idx]) else {
            break;
        };
        let rest = measures[idx].sub(&w);
        measures[idx] = w;
        measures.push(rest);
    }
    let atoms = measures
        .into_iter()
        .enumerate()
        .map(|(i, m)| (format!("a{i}"), m))
        .collect();
    MeasuredAlgebra::new(v.clone(), atoms).expect("split parts stay positive members")
}

/// A random extension instance: an algebra plus two block partitions with
/// pairwise equal measures. Built from a symmetric block-by-block matrix of
/// atoms (mirror pairs off the diagonal), so the marginals agree by
/// construction.
pub fn random_block_pairing(
    rng: &mut Rng,
    v: &ValueGroup,
    block_count: usize,
    max_atoms: usize,
) -> (MeasuredAlgebra, BlockPartition, BlockPartition) {
    assert!(block_count >= 1 && max_atoms >= block_count);
    loop {
        // cells[(i, j)] = measures of the atoms in U_i cap W_j
        let mut cells: BTreeMap<(usize, usize), Vec<Value>> = BTreeMap::new();
        let mut pool = Value::one();
        let mut atom_count = 0usize;

        // ensure every diagonal cell is nonempty, so both partitions cover
        let mut ok = true;
        for i in 0..block_count {
            let w = if i + 1 == block_count {
                std::mem::replace(&mut pool, Value::zero())
            } else {
                match random_split_part(rng, v, &pool) {
                    Some(w) => {
                        pool = pool.sub(&w);
                        w
                    }
                    None => {
                        ok = false;
                        break;
                    }
                }
            };
            if w.is_zero() {
                ok = false;
                break;
            }
            cells.entry((i, i)).or_default().push(w);
            atom_count += 1;
        }
        if !ok {
            continue;
        }

        // optional extras: split a diagonal atom into a mirror pair or a
        // further diagonal atom
        while atom_count + 2 <= max_atoms && rng.chance(2, 3) {
            let i = rng.below(block_count as u64) as usize;
            let j = rng.below(block_count as u64) as usize;
            let host = cells.get_mut(&(i.max(j), i.max(j))).unwrap();
            let idx = rng.below(host.len() as u64) as usize;
            if i == j {
                let Some(w) = random_split_part(rng, v, &host[idx]) else {
                    break;
                };
                let rest = host[idx].sub(&w);
                host[idx] = rest;
                host.push(w);
                atom_count += 1;
            } else {
                // carve two equal parts w for the mirror cells (i,j), (j,i)
                let two_w = match random_split_part(rng, v, &host[idx]) {
                    Some(x) => x,
                    None => break,
                };
                let w = two_w.div_int(2);
                if !v.member(&w) || !v.is_positive(&w).unwrap_or(false) {
                    continue;
                }
                host[idx] = host[idx].sub(&two_w);
                cells.entry((i.min(j), i.max(j))).or_default().push(w.clone());
                cells.entry((i.max(j), i.min(j))).or_default().push(w);
                atom_count += 2;
            }
        }

        let mut atoms = Vec::new();
        let mut u_blocks = vec![Vec::new(); block_count];
        let mut w_blocks = vec![Vec::new(); block_count];
        for ((i, j), measures) in &cells {
            for m in measures {
                let label = format!("a{}", atoms.len());
                atoms.push((label.clone(), m.clone()));
                u_blocks[*i].push(label.clone());
                w_blocks[*j].push(label);
            }
        }
        match MeasuredAlgebra::new(v.clone(), atoms) {
            Ok(alg) => {
                return (
                    alg,
                    BlockPartition::new(u_blocks),
                    BlockPartition::new(w_blocks),
                )
            }
            Err(_) => continue,
        }
    }
}

/// Random Q-like joint-embedding instance with small denominators: integer
/// compositions sum n_i k_i = denom on each side, a_i = k_i / denom.
pub fn random_qlike_instance(
    rng: &mut Rng,
    p_max: usize,
    q_max: usize,
    denom: u64,
) -> JepInstance {
    let side = |rng: &mut Rng, len_max: usize| -> Vec<(Value, u64)> {
        loop {
            let len = 1 + rng.below(len_max as u64) as usize;
            let mults: Vec<u64> = (0..len).map(|_| 1 + rng.below(4)).collect();
            // random composition: sum mults[i] * k_i = denom with k_i >= 1
            let base: u64 = mults.iter().sum();
            if base > denom {
                continue;
            }
            let mut ks = vec![1u64; len];
            let mut rest = denom - base;
            while rest > 0 {
                let i = rng.below(len as u64) as usize;
                if mults[i] <= rest {
                    ks[i] += 1;
                    rest -= mults[i];
                } else if mults.iter().all(|&m| m > rest) {
                    break;
                }
            }
            if rest != 0 {
                continue;
            }
            return ks
                .iter()
                .zip(&mults)
                .map(|(&k, &m)| {
                    (
                        Value::from_rat(Rat::new(BigInt::from(k), BigInt::from(denom))),
                        m,
                    )
                })
                .collect();
        }
    };
    JepInstance {
        rows: side(rng, p_max),
        cols: side(rng, q_max),
    }
}

/// Random declared-ring instance over a rational ring (dyadics or Q):
/// both sides are splits of 1 with multiplicities folded in.
pub fn random_ring_instance(
    rng: &mut Rng,
    v: &ValueGroup,
    p_max: usize,
    q_max: usize,
) -> JepInstance {
    let side = |rng: &mut Rng, len_max: usize| -> Vec<(Value, u64)> {
        let len = 1 + rng.below(len_max as u64) as usize;
        let mut parts = vec![Value::one()];
        while parts.len() < len {
            let idx = rng.below(parts.len() as u64) as usize;
            match random_split_part(rng, v, &parts[idx]) {
                Some(w) => {
                    let rest = parts[idx].sub(&w);
                    parts[idx] = w;
                    parts.push(rest);
                }
                None => break,
            }
        }
        parts
            .into_iter()
            .map(|total| {
                // fold a multiplicity into the part when it divides exactly
                for n in [4u64, 3, 2] {
                    let a = total.div_int(n);
                    if v.member(&a) && rng.chance(1, 2) {
                        return (a, n);
                    }
                }
                (total, 1)
            })
            .collect()
    };
    JepInstance {
        rows: side(rng, p_max),
        cols: side(rng, q_max),
    }
}

/// One side of an amalgamation triple: a refinement of (A, phi) into a
/// larger algebra with an equivariant extension of phi, plus the embedding.
///
/// Each phi-orbit's representative atom is split, the split is translated
/// along the orbit, and the extension permutes child slots cyclically with a
/// measure-preserving twist at the wrap.
pub fn random_equivariant_extension(
    rng: &mut Rng,
    a_alg: &MeasuredAlgebra,
    phi: &Automorphism,
    label_prefix: &str,
    max_children_per_atom: usize,
) -> (MeasuredAlgebra, Automorphism, EmbeddingMap) {
    let v = a_alg.value_group();
    let mut atoms: Vec<(String, Value)> = Vec::new();
    let mut perm: BTreeMap<String, String> = BTreeMap::new();
    let mut embedding: EmbeddingMap = BTreeMap::new();
    let mut counter = 0usize;

    for orbit in phi.orbits(a_alg) {
        let rep_measure = a_alg.measure_of(&orbit[0]).unwrap().clone();
        // split the representative
        let mut split = vec![rep_measure];
        while split.len() < max_children_per_atom && rng.chance(1, 2) {
            let idx = rng.below(split.len() as u64) as usize;
            match random_split_part(rng, v, &split[idx]) {
                Some(w) => {
                    let rest = split[idx].sub(&w);
                    split[idx] = w;
                    split.push(rest);
                }
                None => break,
            }
        }
        let s = split.len();
        // a twist permuting equal-measure slots, applied at the orbit wrap
        let mut twist: Vec<usize> = (0..s).collect();
        for t in 0..s {
            let others: Vec<usize> = (0..s)
                .filter(|&o| split[o] == split[t])
                .collect();
            let target = *rng.pick(&others);
            let old = twist.iter().position(|&x| x == target).unwrap();
            twist.swap(t, old);
        }

        // lay out children for every orbit element, same measures
        let mut labels: Vec<Vec<String>> = Vec::new();
        for elt in &orbit {
            let mut these = Vec::new();
            for m in &split {
                let label = format!("{label_prefix}{counter}");
                counter += 1;
                atoms.push((label.clone(), m.clone()));
                these.push(label);
            }
            embedding.insert(elt.clone(), these.clone());
            labels.push(these);
        }
        let p = orbit.len();
        for (u, these) in labels.iter().enumerate() {
            for (t, label) in these.iter().enumerate() {
                let target = if u + 1 < p {
                    labels[u + 1][t].clone()
                } else {
                    labels[0][twist[t]].clone()
                };
                perm.insert(label.clone(), target);
            }
        }
    }
    let algebra = MeasuredAlgebra::new(v.clone(), atoms).expect("orbit splits sum to 1");
    let automorphism = Automorphism::new(&algebra, perm).expect("twist preserves measures");
    (algebra, automorphism, embedding)
}

/// A random algebra automorphism assembled from cycles: the unit is split
/// into orbit masses, each divided evenly over a random cycle length.
/// Requires a Q-like V (even division must stay in V).
pub fn random_cyclic_automorphism(
    rng: &mut Rng,
    v: &ValueGroup,
    max_atoms: usize,
    label_prefix: &str,
) -> (MeasuredAlgebra, Automorphism) {
    assert!(v.is_q_like());
    let mut masses = vec![Value::one()];
    while masses.len() < 3 && rng.chance(1, 2) {
        let idx = rng.below(masses.len() as u64) as usize;
        match random_split_part(rng, v, &masses[idx]) {
            Some(w) => {
                let rest = masses[idx].sub(&w);
                masses[idx] = w;
                masses.push(rest);
            }
            None => break,
        }
    }
    let mut atoms = Vec::new();
    let mut perm = BTreeMap::new();
    let mut counter = 0usize;
    for (g, mass) in masses.iter().enumerate() {
        let groups_left = masses.len() - g - 1;
        let budget = (max_atoms - atoms.len())
            .saturating_sub(groups_left)
            .clamp(1, 4);
        let len = 1 + rng.below(budget as u64) as usize;
        let each = mass.div_int(len as u64);
        let labels: Vec<String> = (0..len)
            .map(|_| {
                let l = format!("{label_prefix}{counter}");
                counter += 1;
                l
            })
            .collect();
        for (t, l) in labels.iter().enumerate() {
            atoms.push((l.clone(), each.clone()));
            perm.insert(l.clone(), labels[(t + 1) % len].clone());
        }
    }
    let algebra = MeasuredAlgebra::new(v.clone(), atoms).expect("cycle masses sum to 1");
    let auto = Automorphism::new(&algebra, perm).expect("even cycles preserve measure");
    (algebra, auto)
}
