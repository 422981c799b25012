//! Extension of a block pairing to a global automorphism of a refinement.
//!
//! Input: a measured algebra, two block partitions U and W of its atoms with
//! pairwise equal measures under the positional pairing. Output: a
//! refinement of every atom and a measure-preserving permutation h of the
//! refined atoms such that children of atoms inside U_i land inside W_i.
//!
//! The construction runs in rounds. A round grows a tree of pieces: the
//! remainder of the round's base W-block forms the first level, and each
//! piece hosted outside the base U-block is split off an equal-measure chunk
//! of the W-block its U-block is paired with, filling that block's atoms in
//! declared order ("initial fragments"), so each chunk straddles atoms only
//! when it crosses into a fresh one. Pieces hosted inside the base U-block
//! terminate. The measure bookkeeping forces termination: a node can have
//! two nonempty children only when a new atom is touched, so eventually
//! every chain descends through single equal-measure children, which
//! disjointness kills off. The leaves exhaust the base U-block; cycling the
//! permutation down each leaf's ancestor chain and back to the top realizes
//! the pairing on this part, and the next round handles the rest with the
//! next block as base. After one round per block nothing remains.

use super::{
    Automorphism, BlockPartition, FinAlgError, MeasuredAlgebra, PartialAutomorphism, Refinement,
};
use crate::valueset::Value;
use std::cmp::Ordering;
use std::collections::BTreeMap;

#[derive(Clone, Debug)]
pub struct ExtensionResult {
    pub refinement: Refinement,
    pub refined: MeasuredAlgebra,
    pub automorphism: Automorphism,
}

struct Node {
    atom: usize,
    measure: Value,
    parent: Option<usize>,
}

/// (atom index, piece index) of a refined child.
type PieceId = (usize, usize);

pub fn extend_partial(
    alg: &MeasuredAlgebra,
    u: &BlockPartition,
    w: &BlockPartition,
) -> Result<ExtensionResult, FinAlgError> {
    u.validate(alg)?;
    w.validate(alg)?;
    if u.blocks.len() != w.blocks.len() {
        return Err(FinAlgError::InvalidInput(
            "U and W have different block counts".into(),
        ));
    }
    let v = alg.value_group();
    if !v.is_group_like() {
        return Err(FinAlgError::InvalidInput(
            "the value group must be group-like".into(),
        ));
    }
    for (i, (ub, wb)) in u.blocks.iter().zip(&w.blocks).enumerate() {
        let mu = alg.measure_of_set(ub.iter().map(String::as_str));
        let mw = alg.measure_of_set(wb.iter().map(String::as_str));
        if mu != mw {
            return Err(FinAlgError::InvalidInput(format!(
                "paired blocks {i} have measures {mu} and {mw}"
            )));
        }
    }

    let atom_count = alg.len();
    let u_block_of: Vec<usize> = (0..atom_count)
        .map(|a| u.block_of(alg.label_of(a)).unwrap())
        .collect();
    let w_block_of: Vec<usize> = (0..atom_count)
        .map(|a| w.block_of(alg.label_of(a)).unwrap())
        .collect();
    let w_atoms_of_block: Vec<Vec<usize>> = (0..u.blocks.len())
        .map(|i| {
            (0..atom_count)
                .filter(|&a| w_block_of[a] == i)
                .collect()
        })
        .collect();

    let mut remaining: Vec<Value> = (0..atom_count)
        .map(|a| alg.measure_by_index(a).clone())
        .collect();
    // per atom: refined children as (measure); labels assigned at the end
    let mut pieces_of_atom: Vec<Vec<Value>> = vec![Vec::new(); atom_count];
    // h edges between pieces, as (atom, piece index) pairs
    let mut edges: Vec<(PieceId, PieceId)> = Vec::new();

    for base in 0..u.blocks.len() {
        round(
            alg,
            base,
            &u_block_of,
            &w_atoms_of_block,
            &mut remaining,
            &mut pieces_of_atom,
            &mut edges,
        )?;
    }
    for (a, rem) in remaining.iter().enumerate() {
        if !rem.is_zero() {
            return Err(FinAlgError::InvalidInput(format!(
                "internal: atom {:?} retains measure {rem} after all rounds",
                alg.label_of(a)
            )));
        }
    }

    let label_of_piece =
        |atom: usize, k: usize| -> String { format!("{}#{k}", alg.label_of(atom)) };
    let mut children = BTreeMap::new();
    for a in 0..atom_count {
        children.insert(
            alg.label_of(a).to_string(),
            pieces_of_atom[a]
                .iter()
                .enumerate()
                .map(|(k, m)| (label_of_piece(a, k), m.clone()))
                .collect::<Vec<_>>(),
        );
    }
    let refinement = Refinement { children };
    refinement.validate(alg)?;
    let refined = refinement.to_algebra(alg)?;
    let perm: BTreeMap<String, String> = edges
        .iter()
        .map(|&((a1, k1), (a2, k2))| (label_of_piece(a1, k1), label_of_piece(a2, k2)))
        .collect();
    let automorphism = Automorphism::new(&refined, perm)?;
    Ok(ExtensionResult {
        refinement,
        refined,
        automorphism,
    })
}

#[allow(clippy::too_many_arguments)]
fn round(
    alg: &MeasuredAlgebra,
    base: usize,
    u_block_of: &[usize],
    w_atoms_of_block: &[Vec<usize>],
    remaining: &mut [Value],
    pieces_of_atom: &mut [Vec<Value>],
    edges: &mut Vec<(PieceId, PieceId)>,
) -> Result<(), FinAlgError> {
    let v = alg.value_group();
    // capacity left in each atom for this round's allocations
    let mut avail: Vec<Value> = remaining.to_vec();
    // per W-block, the fill pointer into its atom list
    let mut fill: Vec<usize> = vec![0; w_atoms_of_block.len()];

    let mut nodes: Vec<Node> = Vec::new();
    let mut leaves: Vec<usize> = Vec::new();

    // level 1: the whole remainder of the base W-block
    let mut level: Vec<usize> = Vec::new();
    for &a in &w_atoms_of_block[base] {
        if avail[a].is_zero() {
            continue;
        }
        nodes.push(Node {
            atom: a,
            measure: std::mem::replace(&mut avail[a], Value::zero()),
            parent: None,
        });
        level.push(nodes.len() - 1);
    }
    fill[base] = w_atoms_of_block[base].len();

    let mut guard = 0usize;
    while !level.is_empty() {
        guard += 1;
        if guard > 100_000 {
            return Err(FinAlgError::InvalidInput(
                "internal: extension tree failed to terminate".into(),
            ));
        }
        let mut next = Vec::new();
        for &id in &level {
            let host_block = u_block_of[nodes[id].atom];
            if host_block == base {
                leaves.push(id);
                continue;
            }
            // carve a chunk of measure(node) out of the paired W-block,
            // filling its atoms in declared order
            let mut need = nodes[id].measure.clone();
            while !need.is_zero() {
                let block_atoms = &w_atoms_of_block[host_block];
                let Some(&target) = block_atoms.get(fill[host_block]) else {
                    return Err(FinAlgError::InvalidInput(
                        "internal: allocation overran the paired block".into(),
                    ));
                };
                if avail[target].is_zero() {
                    fill[host_block] += 1;
                    continue;
                }
                let take = match v.compare(&need, &avail[target])? {
                    Ordering::Less => need.clone(),
                    _ => avail[target].clone(),
                };
                avail[target] = avail[target].sub(&take);
                need = need.sub(&take);
                if avail[target].is_zero() {
                    fill[host_block] += 1;
                }
                nodes.push(Node {
                    atom: target,
                    measure: take,
                    parent: Some(id),
                });
                next.push(nodes.len() - 1);
            }
        }
        level = next;
    }

    // each leaf spawns one piece inside every node on its root path; the
    // permutation walks the path downward and wraps back to the top
    for &leaf in &leaves {
        let mut path = vec![leaf];
        let mut cur = leaf;
        while let Some(p) = nodes[cur].parent {
            path.push(p);
            cur = p;
        }
        path.reverse(); // root (level 1) first
        let measure = nodes[leaf].measure.clone();
        let piece_ids: Vec<PieceId> = path
            .iter()
            .map(|&nid| {
                let atom = nodes[nid].atom;
                pieces_of_atom[atom].push(measure.clone());
                (atom, pieces_of_atom[atom].len() - 1)
            })
            .collect();
        for t in 0..piece_ids.len() {
            edges.push((piece_ids[t], piece_ids[(t + 1) % piece_ids.len()]));
        }
    }

    // whatever was not drawn into the tree carries over to later rounds
    for (a, rem) in remaining.iter_mut().enumerate() {
        *rem = avail[a].clone();
    }
    Ok(())
}

/// Extend a partial automorphism: complete its block pairing with the
/// leftover atoms and run the extension.
pub fn extend_partial_automorphism(
    alg: &MeasuredAlgebra,
    pa: &PartialAutomorphism,
) -> Result<ExtensionResult, FinAlgError> {
    pa.validate(alg)?;
    let (u, w) = pa.completed(alg);
    extend_partial(alg, &u, &w)
}
