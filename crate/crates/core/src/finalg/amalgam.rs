//! Amalgamation of equivariant embeddings over a Q-like value group.
//!
//! Given embeddings of (A, phi) into (B, psi) and into (C, theta), the
//! Boolean amalgam has atoms b (x) c for B- and C-atoms below the same
//! A-atom, and the only work is choosing the measures. Per phi-orbit of A:
//! group the B-atoms below the orbit representative by psi-return-orbits
//! (sizes n_k) and the C-atoms by theta-return-orbits (sizes m_l), solve the
//! orbit-level transportation system with row sums n_k mu(b^k_0) and column
//! sums m_l mu(c^l_0) by the northwest corner rule, and give the product
//! atom measure x^kl = y^kl / (n_k m_l), which Q-likeness keeps inside V.
//! Zero-measure products are dropped; the northwest corner keeps every row
//! and column positive somewhere, so the embeddings stay total.

use super::{Automorphism, EmbeddingMap, FinAlgError, MeasuredAlgebra};
use super::{validate_equivariant_embedding, jep::JepInstance};
use crate::rat::Rat;
use crate::valueset::Value;
use num_bigint::BigInt;
use std::cmp::Ordering;
use std::collections::BTreeMap;

/// Per-orbit transportation data, exposed for inspection and testing.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitTransport {
    /// Representative A-atom of the phi-orbit.
    pub rep: String,
    /// psi-return-orbit representatives below `rep` and their sizes.
    pub row_reps: Vec<(String, usize)>,
    pub col_reps: Vec<(String, usize)>,
    /// The transported masses y, indexed row-class then column-class,
    /// before division by n_k m_l.
    pub y: Vec<Vec<Value>>,
}

#[derive(Clone, Debug)]
pub struct Amalgam {
    pub algebra: MeasuredAlgebra,
    pub automorphism: Automorphism,
    pub embed_left: EmbeddingMap,
    pub embed_right: EmbeddingMap,
    pub transports: Vec<OrbitTransport>,
}

fn product_label(b: &str, c: &str) -> String {
    format!("{b}&{c}")
}

#[allow(clippy::too_many_arguments)]
pub fn amalgamate(
    a_alg: &MeasuredAlgebra,
    phi: &Automorphism,
    b_alg: &MeasuredAlgebra,
    psi: &Automorphism,
    embed_b: &EmbeddingMap,
    c_alg: &MeasuredAlgebra,
    theta: &Automorphism,
    embed_c: &EmbeddingMap,
) -> Result<Amalgam, FinAlgError> {
    let v = a_alg.value_group();
    if !v.is_q_like() {
        return Err(FinAlgError::NotQLike);
    }
    if b_alg.value_group() != v || c_alg.value_group() != v {
        return Err(FinAlgError::InvalidInput(
            "all three algebras must share one value group".into(),
        ));
    }
    phi.validate(a_alg)?;
    psi.validate(b_alg)?;
    theta.validate(c_alg)?;
    validate_equivariant_embedding(a_alg, phi, b_alg, psi, embed_b)
        .map_err(|d| FinAlgError::InvalidEmbedding(format!("A into B: {d}")))?;
    validate_equivariant_embedding(a_alg, phi, c_alg, theta, embed_c)
        .map_err(|d| FinAlgError::InvalidEmbedding(format!("A into C: {d}")))?;

    // measures of product atoms, filled orbit by orbit
    let mut product_measure: BTreeMap<(String, String), Value> = BTreeMap::new();
    let mut transports = Vec::new();

    for orbit in phi.orbits(a_alg) {
        let rep = &orbit[0];
        let period = orbit.len() as i64;

        let rows = return_orbits(&embed_b[rep], psi, period);
        let cols = return_orbits(&embed_c[rep], theta, period);

        // transportation system on the class masses
        let row_sums: Vec<Value> = rows
            .iter()
            .map(|class| {
                b_alg
                    .measure_of(&class[0])
                    .unwrap()
                    .scale(&Rat::from_integer(BigInt::from(class.len() as u64)))
            })
            .collect();
        let col_sums: Vec<Value> = cols
            .iter()
            .map(|class| {
                c_alg
                    .measure_of(&class[0])
                    .unwrap()
                    .scale(&Rat::from_integer(BigInt::from(class.len() as u64)))
            })
            .collect();
        let y = northwest(v, &row_sums, &col_sums)?;

        for (k, row_class) in rows.iter().enumerate() {
            for (l, col_class) in cols.iter().enumerate() {
                if y[k][l].is_zero() {
                    continue;
                }
                let x = y[k][l].div_int((row_class.len() * col_class.len()) as u64);
                // all pairs (b, c) in the two classes, translated along the
                // whole phi-orbit, share the measure x
                for b0 in row_class {
                    for c0 in col_class {
                        let mut b = b0.clone();
                        let mut c = c0.clone();
                        for _ in 0..period {
                            product_measure
                                .insert((b.clone(), c.clone()), x.clone());
                            b = psi.apply(&b).to_string();
                            c = theta.apply(&c).to_string();
                        }
                    }
                }
            }
        }
        transports.push(OrbitTransport {
            rep: rep.clone(),
            row_reps: rows.iter().map(|c| (c[0].clone(), c.len())).collect(),
            col_reps: cols.iter().map(|c| (c[0].clone(), c.len())).collect(),
            y,
        });
    }

    // assemble D in A-order, then B-order, then C-order
    let mut atoms: Vec<(String, Value)> = Vec::new();
    let mut embed_left: EmbeddingMap =
        b_alg.labels().map(|l| (l.to_string(), vec![])).collect();
    let mut embed_right: EmbeddingMap =
        c_alg.labels().map(|l| (l.to_string(), vec![])).collect();
    for a in a_alg.labels() {
        for b in &embed_b[a] {
            for c in &embed_c[a] {
                let Some(x) = product_measure.get(&(b.clone(), c.clone())) else {
                    continue;
                };
                let label = product_label(b, c);
                atoms.push((label.clone(), x.clone()));
                embed_left.get_mut(b).unwrap().push(label.clone());
                embed_right.get_mut(c).unwrap().push(label);
            }
        }
    }
    let algebra = MeasuredAlgebra::new(v.clone(), atoms)?;
    let perm: BTreeMap<String, String> = product_measure
        .keys()
        .map(|(b, c)| {
            (
                product_label(b, c),
                product_label(psi.apply(b), theta.apply(c)),
            )
        })
        .collect();
    let automorphism = Automorphism::new(&algebra, perm)?;
    Ok(Amalgam {
        algebra,
        automorphism,
        embed_left,
        embed_right,
        transports,
    })
}

/// Group the atoms of one fiber by orbits of the p-th power return map,
/// each class listed from its first atom in fiber order.
fn return_orbits(fiber: &[String], map: &Automorphism, period: i64) -> Vec<Vec<String>> {
    let mut seen: Vec<String> = Vec::new();
    let mut classes = Vec::new();
    for start in fiber {
        if seen.contains(start) {
            continue;
        }
        let mut class = Vec::new();
        let mut cur = start.clone();
        loop {
            if seen.contains(&cur) {
                break;
            }
            seen.push(cur.clone());
            class.push(cur.clone());
            cur = map.apply_pow(&cur, period).to_string();
        }
        classes.push(class);
    }
    classes
}

/// Northwest corner rule over exact values; stays in the module generated by
/// the marginals.
fn northwest(
    v: &crate::valueset::ValueGroup,
    row_sums: &[Value],
    col_sums: &[Value],
) -> Result<Vec<Vec<Value>>, FinAlgError> {
    let p = row_sums.len();
    let q = col_sums.len();
    let mut row_rem = row_sums.to_vec();
    let mut col_rem = col_sums.to_vec();
    let mut y = vec![vec![Value::zero(); q]; p];
    let (mut i, mut j) = (0usize, 0usize);
    while i < p && j < q {
        let take = match v.compare(&row_rem[i], &col_rem[j])? {
            Ordering::Less | Ordering::Equal => row_rem[i].clone(),
            Ordering::Greater => col_rem[j].clone(),
        };
        y[i][j] = take.clone();
        row_rem[i] = row_rem[i].sub(&take);
        col_rem[j] = col_rem[j].sub(&take);
        if row_rem[i].is_zero() {
            i += 1;
        }
        if col_rem[j].is_zero() {
            j += 1;
        }
    }
    Ok(y)
}

impl Amalgam {
    /// The instance the orbit-level system of one transport corresponds to,
    /// for external re-checking of the marginal equations.
    pub fn orbit_instance(&self, t: &OrbitTransport, b_alg: &MeasuredAlgebra, c_alg: &MeasuredAlgebra) -> JepInstance {
        JepInstance {
            rows: t
                .row_reps
                .iter()
                .map(|(l, n)| (b_alg.measure_of(l).unwrap().clone(), *n as u64))
                .collect(),
            cols: t
                .col_reps
                .iter()
                .map(|(l, m)| (c_alg.measure_of(l).unwrap().clone(), *m as u64))
                .collect(),
        }
    }
}
