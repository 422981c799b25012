//! Finite Boolean algebras with atom measures in a value group: embeddings,
//! automorphisms, partial-automorphism extension, joint embedding and
//! amalgamation.
//!
//! Atoms are labeled and kept in declared order; every construction in this
//! module is deterministic in that order.

mod amalgam;
mod extend;
mod jep;

pub use amalgam::{amalgamate, Amalgam, OrbitTransport};
pub use extend::{extend_partial, extend_partial_automorphism, ExtensionResult};
pub use jep::{
    build_joint_cycle, jep_instance, joint_embed_automorphisms, verify_witness, JepInstance,
    JepOptions, JepOutcome, JointCycle, JointEmbedding, JointOutcome,
};

use crate::valueset::{Value, ValueGroup, ValueSetError};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum FinAlgError {
    #[error(transparent)]
    Value(#[from] ValueSetError),
    #[error("invalid measured algebra: {0}")]
    InvalidAlgebra(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),
    #[error("not a cycle: {0}")]
    NotACycle(String),
    #[error("the value group is not group-like")]
    NotGroupLike,
    #[error("the value group is not Q-like")]
    NotQLike,
    #[error("total measure is not divisible into the cycle inside V")]
    MeasureNotDivisible,
}

/// A finite Boolean algebra with strictly positive atom measures in V,
/// summing to 1.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasuredAlgebra {
    value_group: ValueGroup,
    atoms: Vec<AtomWire>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct AtomWire {
    label: String,
    measure: Value,
}

#[derive(Serialize, Deserialize)]
struct AlgebraWire {
    #[serde(rename = "V")]
    value_group: ValueGroup,
    atoms: Vec<AtomWire>,
}

impl Serialize for MeasuredAlgebra {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        AlgebraWire {
            value_group: self.value_group.clone(),
            atoms: self.atoms.clone(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for MeasuredAlgebra {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let w = AlgebraWire::deserialize(de)?;
        MeasuredAlgebra::new(
            w.value_group,
            w.atoms.into_iter().map(|a| (a.label, a.measure)).collect(),
        )
        .map_err(D::Error::custom)
    }
}

impl MeasuredAlgebra {
    pub fn new(
        value_group: ValueGroup,
        atoms: Vec<(String, Value)>,
    ) -> Result<Self, FinAlgError> {
        if atoms.is_empty() {
            return Err(FinAlgError::InvalidAlgebra("no atoms".into()));
        }
        let mut seen = BTreeSet::new();
        let mut total = Value::zero();
        for (label, measure) in &atoms {
            if !seen.insert(label.clone()) {
                return Err(FinAlgError::InvalidAlgebra(format!(
                    "duplicate atom label {label:?}"
                )));
            }
            if !value_group.member(measure) {
                return Err(FinAlgError::InvalidAlgebra(format!(
                    "measure {measure} of atom {label:?} is not in V"
                )));
            }
            if !value_group.is_positive(measure)? {
                return Err(FinAlgError::InvalidAlgebra(format!(
                    "measure {measure} of atom {label:?} is not positive"
                )));
            }
            total = total.add(measure);
        }
        if total != Value::one() {
            return Err(FinAlgError::InvalidAlgebra(format!(
                "atom measures sum to {total}, not 1"
            )));
        }
        Ok(MeasuredAlgebra {
            value_group,
            atoms: atoms
                .into_iter()
                .map(|(label, measure)| AtomWire { label, measure })
                .collect(),
        })
    }

    pub fn value_group(&self) -> &ValueGroup {
        &self.value_group
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.atoms.iter().map(|a| a.label.as_str())
    }

    pub fn atom_index(&self, label: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a.label == label)
    }

    pub fn label_of(&self, index: usize) -> &str {
        &self.atoms[index].label
    }

    pub fn measure_by_index(&self, index: usize) -> &Value {
        &self.atoms[index].measure
    }

    pub fn measure_of(&self, label: &str) -> Option<&Value> {
        self.atoms
            .iter()
            .find(|a| a.label == label)
            .map(|a| &a.measure)
    }

    pub fn measure_of_set<'a>(&self, labels: impl IntoIterator<Item = &'a str>) -> Value {
        labels
            .into_iter()
            .fold(Value::zero(), |acc, l| match self.measure_of(l) {
                Some(m) => acc.add(m),
                None => acc,
            })
    }

}

/// A partition of the atom labels into named blocks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BlockPartition {
    pub blocks: Vec<Vec<String>>,
}

impl BlockPartition {
    pub fn new(blocks: Vec<Vec<String>>) -> Self {
        BlockPartition { blocks }
    }

    pub fn validate(&self, alg: &MeasuredAlgebra) -> Result<(), FinAlgError> {
        let mut seen = BTreeSet::new();
        for block in &self.blocks {
            for label in block {
                if alg.atom_index(label).is_none() {
                    return Err(FinAlgError::InvalidInput(format!(
                        "block mentions unknown atom {label:?}"
                    )));
                }
                if !seen.insert(label.clone()) {
                    return Err(FinAlgError::InvalidInput(format!(
                        "atom {label:?} appears in two blocks"
                    )));
                }
            }
        }
        if seen.len() != alg.len() {
            return Err(FinAlgError::InvalidInput(
                "blocks do not cover all atoms".into(),
            ));
        }
        Ok(())
    }

    pub fn block_of(&self, label: &str) -> Option<usize> {
        self.blocks
            .iter()
            .position(|b| b.iter().any(|l| l == label))
    }
}

/// An isomorphism between two sub-collections of blocks: dom block i is
/// carried onto ran block i. Block measures must match pairwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartialAutomorphism {
    pub dom: Vec<Vec<String>>,
    pub ran: Vec<Vec<String>>,
}

impl PartialAutomorphism {
    pub fn validate(&self, alg: &MeasuredAlgebra) -> Result<(), FinAlgError> {
        if self.dom.len() != self.ran.len() {
            return Err(FinAlgError::InvalidInput(
                "dom and ran block counts differ".into(),
            ));
        }
        let mut seen_dom = BTreeSet::new();
        let mut seen_ran = BTreeSet::new();
        for (d, r) in self.dom.iter().zip(&self.ran) {
            for label in d.iter().chain(r) {
                if alg.atom_index(label).is_none() {
                    return Err(FinAlgError::InvalidInput(format!(
                        "unknown atom {label:?}"
                    )));
                }
            }
            for label in d {
                if !seen_dom.insert(label.clone()) {
                    return Err(FinAlgError::InvalidInput(format!(
                        "atom {label:?} repeated in dom"
                    )));
                }
            }
            for label in r {
                if !seen_ran.insert(label.clone()) {
                    return Err(FinAlgError::InvalidInput(format!(
                        "atom {label:?} repeated in ran"
                    )));
                }
            }
            let md = alg.measure_of_set(d.iter().map(String::as_str));
            let mr = alg.measure_of_set(r.iter().map(String::as_str));
            if md != mr {
                return Err(FinAlgError::InvalidInput(format!(
                    "paired blocks have measures {md} and {mr}"
                )));
            }
        }
        Ok(())
    }

    /// Complete to a full block pairing by adding the leftover atoms as one
    /// final paired block (their total measures agree automatically).
    pub fn completed(&self, alg: &MeasuredAlgebra) -> (BlockPartition, BlockPartition) {
        let in_dom: BTreeSet<&str> = self
            .dom
            .iter()
            .flatten()
            .map(String::as_str)
            .collect();
        let in_ran: BTreeSet<&str> = self
            .ran
            .iter()
            .flatten()
            .map(String::as_str)
            .collect();
        let rest_dom: Vec<String> = alg
            .labels()
            .filter(|l| !in_dom.contains(l))
            .map(str::to_string)
            .collect();
        let rest_ran: Vec<String> = alg
            .labels()
            .filter(|l| !in_ran.contains(l))
            .map(str::to_string)
            .collect();
        let mut dom = self.dom.clone();
        let mut ran = self.ran.clone();
        if !rest_dom.is_empty() || !rest_ran.is_empty() {
            dom.push(rest_dom);
            ran.push(rest_ran);
        }
        (BlockPartition::new(dom), BlockPartition::new(ran))
    }
}

/// A measure-preserving permutation of the atoms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Automorphism {
    pub perm: BTreeMap<String, String>,
}

impl Automorphism {
    pub fn identity(alg: &MeasuredAlgebra) -> Self {
        Automorphism {
            perm: alg
                .labels()
                .map(|l| (l.to_string(), l.to_string()))
                .collect(),
        }
    }

    pub fn new(
        alg: &MeasuredAlgebra,
        perm: BTreeMap<String, String>,
    ) -> Result<Self, FinAlgError> {
        let auto = Automorphism { perm };
        auto.validate(alg)?;
        Ok(auto)
    }

    pub fn validate(&self, alg: &MeasuredAlgebra) -> Result<(), FinAlgError> {
        let mut hit = BTreeSet::new();
        for label in alg.labels() {
            let Some(image) = self.perm.get(label) else {
                return Err(FinAlgError::InvalidInput(format!(
                    "no image for atom {label:?}"
                )));
            };
            if alg.atom_index(image).is_none() {
                return Err(FinAlgError::InvalidInput(format!(
                    "image {image:?} is not an atom"
                )));
            }
            if !hit.insert(image.clone()) {
                return Err(FinAlgError::InvalidInput(format!(
                    "two atoms map to {image:?}"
                )));
            }
            if alg.measure_of(label) != alg.measure_of(image) {
                return Err(FinAlgError::InvalidInput(format!(
                    "measure not preserved at {label:?}"
                )));
            }
        }
        if self.perm.len() != alg.len() {
            return Err(FinAlgError::InvalidInput(
                "permutation mentions labels outside the algebra".into(),
            ));
        }
        Ok(())
    }

    pub fn apply<'a>(&'a self, label: &str) -> &'a str {
        &self.perm[label]
    }

    /// g^t (t may be negative) applied to one label.
    pub fn apply_pow<'a>(&'a self, label: &'a str, t: i64) -> &'a str {
        let mut cur = label;
        if t >= 0 {
            for _ in 0..t {
                cur = self.apply(cur);
            }
        } else {
            for _ in 0..(-t) {
                cur = self
                    .perm
                    .iter()
                    .find(|(_, v)| v.as_str() == cur)
                    .map(|(k, _)| k.as_str())
                    .expect("permutation is invertible");
            }
        }
        cur
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().all(|(k, v)| k == v)
    }

    /// Orbits in deterministic order: each starts at its first atom in
    /// algebra order that has not yet appeared.
    pub fn orbits(&self, alg: &MeasuredAlgebra) -> Vec<Vec<String>> {
        let mut seen = BTreeSet::new();
        let mut orbits = Vec::new();
        for label in alg.labels() {
            if seen.contains(label) {
                continue;
            }
            let mut orbit = Vec::new();
            let mut cur = label.to_string();
            while seen.insert(cur.clone()) {
                orbit.push(cur.clone());
                cur = self.apply(&cur).to_string();
            }
            orbits.push(orbit);
        }
        orbits
    }

    pub fn order(&self, alg: &MeasuredAlgebra) -> u64 {
        use num_integer::Integer;
        self.orbits(alg)
            .iter()
            .map(|o| o.len() as u64)
            .fold(1, |acc, l| acc.lcm(&l))
    }

    pub fn compose(&self, other: &Automorphism) -> Automorphism {
        Automorphism {
            perm: other
                .perm
                .iter()
                .map(|(k, mid)| (k.clone(), self.perm[mid].clone()))
                .collect(),
        }
    }
}

/// A subdivision of every atom into children with positive V-measures that
/// sum to the parent's measure; goodness of the measure in finite form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Refinement {
    pub children: BTreeMap<String, Vec<(String, Value)>>,
}

impl Refinement {
    pub fn validate(&self, parent: &MeasuredAlgebra) -> Result<(), FinAlgError> {
        let v = parent.value_group();
        let mut labels = BTreeSet::new();
        for label in parent.labels() {
            let Some(children) = self.children.get(label) else {
                return Err(FinAlgError::InvalidInput(format!(
                    "no children for atom {label:?}"
                )));
            };
            let mut total = Value::zero();
            for (child, measure) in children {
                if !labels.insert(child.clone()) {
                    return Err(FinAlgError::InvalidInput(format!(
                        "duplicate child label {child:?}"
                    )));
                }
                if !v.member(measure) || !v.is_positive(measure)? {
                    return Err(FinAlgError::InvalidInput(format!(
                        "child {child:?} has bad measure {measure}"
                    )));
                }
                total = total.add(measure);
            }
            if &total != parent.measure_of(label).unwrap() {
                return Err(FinAlgError::InvalidInput(format!(
                    "children of {label:?} sum to {total}, not the atom measure"
                )));
            }
        }
        if self.children.len() != parent.len() {
            return Err(FinAlgError::InvalidInput(
                "refinement mentions unknown parents".into(),
            ));
        }
        Ok(())
    }

    /// The refined algebra, children in parent order then declared order.
    pub fn to_algebra(&self, parent: &MeasuredAlgebra) -> Result<MeasuredAlgebra, FinAlgError> {
        let mut atoms = Vec::new();
        for label in parent.labels() {
            for (child, measure) in &self.children[label] {
                atoms.push((child.clone(), measure.clone()));
            }
        }
        MeasuredAlgebra::new(parent.value_group().clone(), atoms)
    }

    /// Which parent a child label came from.
    pub fn parent_of(&self, child: &str) -> Option<&str> {
        for (parent, children) in &self.children {
            if children.iter().any(|(c, _)| c == child) {
                return Some(parent);
            }
        }
        None
    }
}

/// Why an embedding map fails to be one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EmbeddingDefect {
    UnknownLabel(String),
    MissingAtom(String),
    EmptyImage(String),
    Overlap(String),
    Measure(String),
    Equivariance(String),
}

impl std::fmt::Display for EmbeddingDefect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (tag, detail) = match self {
            EmbeddingDefect::UnknownLabel(d) => ("UNKNOWN_LABEL", d),
            EmbeddingDefect::MissingAtom(d) => ("MISSING_ATOM", d),
            EmbeddingDefect::EmptyImage(d) => ("EMPTY_IMAGE", d),
            EmbeddingDefect::Overlap(d) => ("OVERLAP", d),
            EmbeddingDefect::Measure(d) => ("MEASURE", d),
            EmbeddingDefect::Equivariance(d) => ("EQUIVARIANCE", d),
        };
        write!(f, "{tag}: {detail}")
    }
}

pub type EmbeddingMap = BTreeMap<String, Vec<String>>;

/// Check that `e` embeds A into B: atoms go to disjoint nonempty sets of
/// B-atoms of the same measure.
pub fn validate_embedding(
    a: &MeasuredAlgebra,
    b: &MeasuredAlgebra,
    e: &EmbeddingMap,
) -> Result<(), EmbeddingDefect> {
    let mut used = BTreeSet::new();
    for label in a.labels() {
        let Some(image) = e.get(label) else {
            return Err(EmbeddingDefect::MissingAtom(format!(
                "atom {label:?} has no image"
            )));
        };
        if image.is_empty() {
            return Err(EmbeddingDefect::EmptyImage(format!(
                "atom {label:?} maps to the empty set"
            )));
        }
        for target in image {
            if b.atom_index(target).is_none() {
                return Err(EmbeddingDefect::UnknownLabel(format!(
                    "image atom {target:?} is not in the codomain"
                )));
            }
            if !used.insert(target.clone()) {
                return Err(EmbeddingDefect::Overlap(format!(
                    "image atom {target:?} used twice"
                )));
            }
        }
        let ma = a.measure_of(label).unwrap();
        let mb = b.measure_of_set(image.iter().map(String::as_str));
        if *ma != mb {
            return Err(EmbeddingDefect::Measure(format!(
                "atom {label:?} has measure {ma} but its image has measure {mb}"
            )));
        }
    }
    for label in e.keys() {
        if a.atom_index(label).is_none() {
            return Err(EmbeddingDefect::UnknownLabel(format!(
                "domain label {label:?} is not an atom"
            )));
        }
    }
    Ok(())
}

/// Embedding of (A, phi) into (B, psi): additionally psi(e(a)) = e(phi(a))
/// as sets, for every atom a.
pub fn validate_equivariant_embedding(
    a: &MeasuredAlgebra,
    phi: &Automorphism,
    b: &MeasuredAlgebra,
    psi: &Automorphism,
    e: &EmbeddingMap,
) -> Result<(), EmbeddingDefect> {
    validate_embedding(a, b, e)?;
    for label in a.labels() {
        let lhs: BTreeSet<&str> = e[label].iter().map(|t| psi.apply(t)).collect();
        let rhs: BTreeSet<&str> = e[phi.apply(label)].iter().map(String::as_str).collect();
        if lhs != rhs {
            return Err(EmbeddingDefect::Equivariance(format!(
                "psi(image of {label:?}) differs from image of phi({label:?})"
            )));
        }
    }
    Ok(())
}

/// The action of a permutation sigma on a p-cycle g: on the i-th block of
/// the support, g_sigma is g^(sigma(i) - i); identity off the support.
///
/// The support blocks are derived canonically: the base block collects the
/// first atom (in algebra order) of every length-p orbit.
pub fn cycle_action(
    alg: &MeasuredAlgebra,
    g: &Automorphism,
    sigma: &[usize],
) -> Result<Automorphism, FinAlgError> {
    let p = sigma.len();
    if p == 0 {
        return Err(FinAlgError::NotACycle("sigma is empty".into()));
    }
    {
        let mut seen = vec![false; p];
        for &s in sigma {
            if s >= p || seen[s] {
                return Err(FinAlgError::NotACycle(
                    "sigma is not a permutation of 0..p".into(),
                ));
            }
            seen[s] = true;
        }
    }
    let mut perm: BTreeMap<String, String> = BTreeMap::new();
    for orbit in g.orbits(alg) {
        if orbit.len() == 1 {
            perm.insert(orbit[0].clone(), orbit[0].clone());
            continue;
        }
        if orbit.len() != p {
            return Err(FinAlgError::NotACycle(format!(
                "support orbit of length {} in a {p}-cycle",
                orbit.len()
            )));
        }
        // orbit[i] sits in block g^i(A); g^(sigma(i) - i) carries it to
        // block sigma(i), landing on the orbit element there
        for (i, label) in orbit.iter().enumerate() {
            perm.insert(label.clone(), orbit[sigma[i]].clone());
        }
    }
    Automorphism::new(alg, perm)
}

/// Semi-decision for the existence of a dense conjugacy class in the
/// automorphism group of the good measure with clopen value set V.
#[derive(Debug, Clone, PartialEq)]
pub enum DenseHint {
    Yes(String),
    No(JepInstance),
    Unknown,
}

pub fn dense_class_hint(v: &ValueGroup) -> Result<DenseHint, FinAlgError> {
    if !v.is_group_like() {
        return Err(FinAlgError::NotGroupLike);
    }
    if v.is_q_like() {
        return Ok(DenseHint::Yes("V + Z is a Q-vector space".into()));
    }
    if v.declared_ring {
        return Ok(DenseHint::Yes("V + Z is a ring".into()));
    }
    // counterexample schema: an n-cycle of measure-1/n atoms forces every
    // joint embedding with a split of measure r to cut r into n equal
    // V-values, so r/n outside V kills the joint embedding property
    for n in 2u64..=16 {
        let one_nth = Value::one().div_int(n);
        if !v.member(&one_nth) {
            continue;
        }
        for r in &v.generators {
            let complement = Value::one().sub(r);
            if !v.is_positive(&complement)? || !v.is_positive(r)? {
                continue;
            }
            if !v.member(&r.div_int(n)) {
                let instance = JepInstance {
                    rows: vec![(one_nth, n)],
                    cols: vec![(r.clone(), 1), (complement, 1)],
                };
                return Ok(DenseHint::No(instance));
            }
        }
    }
    Ok(DenseHint::Unknown)
}

#[cfg(test)]
mod tests;
