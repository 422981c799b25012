//! Joint embedding of finite measured algebras with automorphisms.
//!
//! An instance is the cycle data of two automorphisms: rows (a_i, n_i) with
//! sum n_i a_i = 1 and columns (b_j, m_j) likewise. A witness is a matrix
//! c_{i,j} of nonnegative V-values satisfying, for every i and j,
//!
//!   m_j b_j = sum_i lcm(n_i, m_j) c_{i,j}
//!   n_i a_i = sum_j lcm(n_i, m_j) c_{i,j}
//!
//! Decision ladder: a closed-form witness when V is a declared ring, a
//! northwest-corner transportation witness when V is Q-like, and otherwise
//! an exact split into per-coordinate linear systems with bounded lattice
//! enumeration, honest about exhaustion via Unknown. Every witness returned
//! is re-verified against the marginal systems independently of how it was
//! found.

use super::{Automorphism, EmbeddingMap, FinAlgError, MeasuredAlgebra};
use crate::lattice::{self, SolveRing};
use crate::rat::Rat;
use crate::valueset::{Ring, Value, ValueGroup};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

#[derive(Clone, Debug, PartialEq)]
pub struct JepInstance {
    pub rows: Vec<(Value, u64)>,
    pub cols: Vec<(Value, u64)>,
}

#[derive(Clone, Debug)]
pub struct JepOptions {
    /// Box half-width for kernel coefficients in the general case.
    pub coeff_bound: u64,
    /// Hard cap on candidates inspected before answering Unknown.
    pub step_budget: u64,
    /// Over Z[1/m], denominators up to m^this are tried.
    pub power_budget: u32,
}

impl Default for JepOptions {
    fn default() -> Self {
        JepOptions {
            coeff_bound: 32,
            step_budget: 200_000,
            power_budget: 6,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum JepOutcome {
    Sat(Vec<Vec<Value>>),
    Unsat(String),
    Unknown(String),
}

impl JepInstance {
    pub fn validate(&self, v: &ValueGroup) -> Result<(), FinAlgError> {
        for (side, data) in [("row", &self.rows), ("column", &self.cols)] {
            if data.is_empty() {
                return Err(FinAlgError::InvalidInput(format!("no {side}s")));
            }
            let mut total = Value::zero();
            for (val, mult) in data {
                if *mult == 0 {
                    return Err(FinAlgError::InvalidInput(format!(
                        "{side} multiplicity must be >= 1"
                    )));
                }
                if !v.member(val) {
                    return Err(FinAlgError::InvalidInput(format!(
                        "{side} value {val} is not in V"
                    )));
                }
                if !v.is_positive(val)? {
                    return Err(FinAlgError::InvalidInput(format!(
                        "{side} value {val} is not positive"
                    )));
                }
                total = total.add(&val.scale(&Rat::from_integer(BigInt::from(*mult))));
            }
            if total != Value::one() {
                return Err(FinAlgError::InvalidInput(format!(
                    "{side} sums to {total}, not 1"
                )));
            }
        }
        Ok(())
    }

    fn lcm(&self, i: usize, j: usize) -> u64 {
        self.rows[i].1.lcm(&self.cols[j].1)
    }
}

/// Check a witness against both marginal systems, membership and sign.
pub fn verify_witness(
    v: &ValueGroup,
    inst: &JepInstance,
    c: &[Vec<Value>],
) -> Result<(), String> {
    let p = inst.rows.len();
    let q = inst.cols.len();
    if c.len() != p || c.iter().any(|row| row.len() != q) {
        return Err("witness has the wrong shape".into());
    }
    for (i, row) in c.iter().enumerate() {
        for (j, cij) in row.iter().enumerate() {
            if !v.member(cij) {
                return Err(format!("c[{i}][{j}] = {cij} is not in V"));
            }
            match v.compare(cij, &Value::zero()) {
                Ok(Ordering::Less) => return Err(format!("c[{i}][{j}] = {cij} is negative")),
                Ok(_) => {}
                Err(e) => return Err(e.to_string()),
            }
        }
    }
    for j in 0..q {
        let mut sum = Value::zero();
        for (i, row) in c.iter().enumerate() {
            sum = sum.add(&row[j].scale(&Rat::from_integer(BigInt::from(inst.lcm(i, j)))));
        }
        let rhs = inst.cols[j]
            .0
            .scale(&Rat::from_integer(BigInt::from(inst.cols[j].1)));
        if sum != rhs {
            return Err(format!("column {j} marginal is {sum}, expected {rhs}"));
        }
    }
    for (i, row) in c.iter().enumerate() {
        let mut sum = Value::zero();
        for (j, cij) in row.iter().enumerate() {
            sum = sum.add(&cij.scale(&Rat::from_integer(BigInt::from(inst.lcm(i, j)))));
        }
        let rhs = inst.rows[i]
            .0
            .scale(&Rat::from_integer(BigInt::from(inst.rows[i].1)));
        if sum != rhs {
            return Err(format!("row {i} marginal is {sum}, expected {rhs}"));
        }
    }
    Ok(())
}

pub fn jep_instance(
    v: &ValueGroup,
    inst: &JepInstance,
    opts: &JepOptions,
) -> Result<JepOutcome, FinAlgError> {
    inst.validate(v)?;

    // ring case: c_{i,j} = a_i b_j gcd(n_i, m_j) whenever the products are
    // representable; the multiplicities cancel through gcd * lcm = n * m
    if v.declared_ring {
        if let Some(c) = ring_witness(inst) {
            if verify_witness(v, inst, &c).is_ok() {
                return Ok(JepOutcome::Sat(c));
            }
        }
    }

    // Q-like case: solve the transportation system on y = lcm * c by the
    // northwest corner rule; mins and differences stay inside the module and
    // division by lcm stays inside V
    if v.is_q_like() {
        let c = northwest_witness(v, inst)?;
        match verify_witness(v, inst, &c) {
            Ok(()) => return Ok(JepOutcome::Sat(c)),
            Err(e) => {
                return Err(FinAlgError::InvalidInput(format!(
                    "northwest witness failed verification: {e}"
                )))
            }
        }
    }

    general_case(v, inst, opts)
}

fn ring_witness(inst: &JepInstance) -> Option<Vec<Vec<Value>>> {
    let mut c = Vec::with_capacity(inst.rows.len());
    for (a, n) in &inst.rows {
        let mut row = Vec::with_capacity(inst.cols.len());
        for (b, m) in &inst.cols {
            let g = n.gcd(m);
            row.push(a.try_mul(b)?.scale(&Rat::from_integer(BigInt::from(g))));
        }
        c.push(row);
    }
    Some(c)
}

fn northwest_witness(
    v: &ValueGroup,
    inst: &JepInstance,
) -> Result<Vec<Vec<Value>>, FinAlgError> {
    let p = inst.rows.len();
    let q = inst.cols.len();
    let mut row_rem: Vec<Value> = inst
        .rows
        .iter()
        .map(|(a, n)| a.scale(&Rat::from_integer(BigInt::from(*n))))
        .collect();
    let mut col_rem: Vec<Value> = inst
        .cols
        .iter()
        .map(|(b, m)| b.scale(&Rat::from_integer(BigInt::from(*m))))
        .collect();
    let mut y = vec![vec![Value::zero(); q]; p];
    let (mut i, mut j) = (0usize, 0usize);
    while i < p && j < q {
        // take the smaller remainder; at least one of the two hits zero
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
    Ok((0..p)
        .map(|i| {
            (0..q)
                .map(|j| y[i][j].div_int(inst.lcm(i, j)))
                .collect()
        })
        .collect())
}

/// Basis coordinates of a value over the unit and V's declared symbols.
fn coords(v: &ValueGroup, val: &Value) -> Vec<Rat> {
    let mut out = vec![val.rational_part().clone()];
    for s in &v.symbols {
        out.push(
            val.symbol_coeffs()
                .get(&s.name)
                .cloned()
                .unwrap_or_else(Rat::zero),
        );
    }
    out
}

fn general_case(
    v: &ValueGroup,
    inst: &JepInstance,
    opts: &JepOptions,
) -> Result<JepOutcome, FinAlgError> {
    let p = inst.rows.len();
    let q = inst.cols.len();
    let dims = v.symbols.len() + 1;

    // marginal matrix over the pq cell variables; identical per coordinate
    let mut rows_a: Vec<Vec<Rat>> = Vec::new();
    for j in 0..q {
        let mut row = vec![Rat::zero(); p * q];
        for i in 0..p {
            row[i * q + j] = Rat::from_integer(BigInt::from(inst.lcm(i, j)));
        }
        rows_a.push(row);
    }
    for i in 0..p {
        let mut row = vec![Rat::zero(); p * q];
        for j in 0..q {
            row[i * q + j] = Rat::from_integer(BigInt::from(inst.lcm(i, j)));
        }
        rows_a.push(row);
    }

    // per-coordinate rational solves; the unique-solution case is decided
    let mut per_coord: Vec<Vec<Rat>> = Vec::new();
    let mut kernel_dim = 0;
    for d in 0..dims {
        let mut rhs = Vec::with_capacity(p + q);
        for j in 0..q {
            let full = inst.cols[j]
                .0
                .scale(&Rat::from_integer(BigInt::from(inst.cols[j].1)));
            rhs.push(coords(v, &full)[d].clone());
        }
        for i in 0..p {
            let full = inst.rows[i]
                .0
                .scale(&Rat::from_integer(BigInt::from(inst.rows[i].1)));
            rhs.push(coords(v, &full)[d].clone());
        }
        let (ai, bi) = lattice::clear_denominators(&rows_a, &rhs);
        match lattice::solve(&ai, &bi, &SolveRing::Rationals) {
            None => {
                return Ok(JepOutcome::Unsat(format!(
                    "marginal system has no real solution in coordinate {d}"
                )))
            }
            Some(sol) => {
                kernel_dim = sol.kernel.len();
                per_coord.push(sol.particular);
            }
        }
    }

    if kernel_dim == 0 {
        // combined solution is forced; membership and sign decide
        let mut c = vec![vec![Value::zero(); q]; p];
        for i in 0..p {
            for j in 0..q {
                let cell = i * q + j;
                let mut val = Value::from_rat(per_coord[0][cell].clone());
                for (s, coord) in v.symbols.iter().zip(per_coord[1..].iter()) {
                    val = val.add(&Value::with_coeff(&s.name, coord[cell].clone()));
                }
                c[i][j] = val;
            }
        }
        return Ok(match verify_witness(v, inst, &c) {
            Ok(()) => JepOutcome::Sat(c),
            Err(e) => JepOutcome::Unsat(format!("the unique solution fails: {e}")),
        });
    }

    // underdetermined: search the lattice of V-valued solutions, writing
    // each cell as a ring combination of the unit and the generators
    lattice_enumeration(v, inst, opts)
}

fn lattice_enumeration(
    v: &ValueGroup,
    inst: &JepInstance,
    opts: &JepOptions,
) -> Result<JepOutcome, FinAlgError> {
    let p = inst.rows.len();
    let q = inst.cols.len();
    let dims = v.symbols.len() + 1;
    let mut gens: Vec<Value> = vec![Value::one()];
    gens.extend(v.generators.iter().cloned());
    let ng = gens.len();

    // equations over t_{cell,g}: for each coordinate, each marginal
    let mut mat: Vec<Vec<Rat>> = Vec::new();
    let mut rhs: Vec<Rat> = Vec::new();
    let gen_coords: Vec<Vec<Rat>> = gens.iter().map(|g| coords(v, g)).collect();
    for d in 0..dims {
        for j in 0..q {
            let mut row = vec![Rat::zero(); p * q * ng];
            for i in 0..p {
                let l = Rat::from_integer(BigInt::from(inst.lcm(i, j)));
                for g in 0..ng {
                    row[(i * q + j) * ng + g] = &l * &gen_coords[g][d];
                }
            }
            mat.push(row);
            let full = inst.cols[j]
                .0
                .scale(&Rat::from_integer(BigInt::from(inst.cols[j].1)));
            rhs.push(coords(v, &full)[d].clone());
        }
        for i in 0..p {
            let mut row = vec![Rat::zero(); p * q * ng];
            for j in 0..q {
                let l = Rat::from_integer(BigInt::from(inst.lcm(i, j)));
                for g in 0..ng {
                    row[(i * q + j) * ng + g] = &l * &gen_coords[g][d];
                }
            }
            mat.push(row);
            let full = inst.rows[i]
                .0
                .scale(&Rat::from_integer(BigInt::from(inst.rows[i].1)));
            rhs.push(coords(v, &full)[d].clone());
        }
    }
    let (ai, bi) = lattice::clear_denominators(&mat, &rhs);

    let (ring, powers): (SolveRing, Vec<BigInt>) = match &v.ring {
        Ring::Integers => (SolveRing::Integers, vec![BigInt::from(1)]),
        Ring::IntegersInverting(m) => {
            let m = BigInt::from(*m);
            let mut powers = Vec::new();
            let mut acc = BigInt::from(1);
            for _ in 0..=opts.power_budget {
                powers.push(acc.clone());
                acc *= &m;
            }
            (SolveRing::IntegersInverting(m), powers)
        }
        Ring::Rationals => unreachable!("Q-like instances are settled earlier"),
    };

    // feasibility of the equalities over the ring, ignoring signs
    if lattice::solve(&ai, &bi, &ring).is_none() {
        return Ok(JepOutcome::Unsat(
            "the marginal systems have no solution over V at all".into(),
        ));
    }

    let mut budget = opts.step_budget;
    let over_integers = matches!(v.ring, Ring::Integers);
    for scale in &powers {
        let scaled: Vec<BigInt> = bi.iter().map(|x| x * scale).collect();
        let Some(sol) = lattice::solve(&ai, &scaled, &SolveRing::Integers) else {
            continue;
        };
        let dim = sol.kernel.len();
        if dim == 0 && over_integers {
            // the coefficients are forced; only the signs can fail, and
            // that failure is then definitive
            return Ok(
                match candidate_from(
                    v, inst, &gens, &sol.particular, &sol.kernel, &[], scale,
                )? {
                    Some(c) if verify_witness(v, inst, &c).is_ok() => JepOutcome::Sat(c),
                    _ => JepOutcome::Unsat(
                        "the unique solution over V is negative somewhere".into(),
                    ),
                },
            );
        }
        let mut lambda = vec![0i64; dim];
        let bound = opts.coeff_bound as i64;
        loop {
            if budget == 0 {
                return Ok(JepOutcome::Unknown(format!(
                    "step budget exhausted with {dim} free lattice directions"
                )));
            }
            budget -= 1;
            if let Some(c) = candidate_from(
                v, inst, &gens, &sol.particular, &sol.kernel, &lambda, scale,
            )? {
                if verify_witness(v, inst, &c).is_ok() {
                    return Ok(JepOutcome::Sat(c));
                }
            }
            // odometer step through the box [-bound, bound]^dim
            let mut k = 0;
            loop {
                if k == dim {
                    break;
                }
                if lambda[k] < bound {
                    lambda[k] += 1;
                    break;
                }
                lambda[k] = -bound;
                k += 1;
            }
            if k == dim {
                break;
            }
        }
    }
    Ok(JepOutcome::Unknown(format!(
        "no witness inside the coefficient box of half-width {}",
        opts.coeff_bound
    )))
}

#[allow(clippy::too_many_arguments)]
fn candidate_from(
    v: &ValueGroup,
    inst: &JepInstance,
    gens: &[Value],
    particular: &[Rat],
    kernel: &[Vec<BigInt>],
    lambda: &[i64],
    scale: &BigInt,
) -> Result<Option<Vec<Vec<Value>>>, FinAlgError> {
    let p = inst.rows.len();
    let q = inst.cols.len();
    let ng = gens.len();
    let scale_rat = Rat::from_integer(scale.clone());
    let mut c = vec![vec![Value::zero(); q]; p];
    for i in 0..p {
        for j in 0..q {
            let mut val = Value::zero();
            for (g, gen) in gens.iter().enumerate() {
                let idx = (i * q + j) * ng + g;
                let mut t = particular[idx].clone();
                for (r, k) in kernel.iter().enumerate() {
                    t += Rat::from_integer(&k[idx] * BigInt::from(lambda[r]));
                }
                val = val.add(&gen.scale(&(t / &scale_rat)));
            }
            match v.compare(&val, &Value::zero()) {
                Ok(Ordering::Less) => return Ok(None),
                Ok(_) => {}
                Err(e) => return Err(e.into()),
            }
            c[i][j] = val;
        }
    }
    Ok(Some(c))
}

/// A cycle of order lcm(n, m) on equal-measure atoms, with the canonical
/// equivariant embeddings of an n-cycle and an m-cycle of total measure
/// `total`: the i-th n-cycle atom is identified with the union of the
/// cycle atoms congruent to i mod n, and likewise for m.
#[derive(Clone, Debug, PartialEq)]
pub struct JointCycle {
    pub labels: Vec<String>,
    pub atom_measure: Value,
    pub row_images: Vec<Vec<String>>,
    pub col_images: Vec<Vec<String>>,
}

pub fn build_joint_cycle(
    n: u64,
    m: u64,
    total: &Value,
    v: &ValueGroup,
    label_prefix: &str,
) -> Result<JointCycle, FinAlgError> {
    if n == 0 || m == 0 {
        return Err(FinAlgError::InvalidInput("cycle orders must be >= 1".into()));
    }
    let big_n = n.lcm(&m);
    let atom_measure = total.div_int(big_n);
    if !v.member(&atom_measure) {
        return Err(FinAlgError::MeasureNotDivisible);
    }
    if !v.is_positive(&atom_measure)? {
        return Err(FinAlgError::InvalidInput("total must be positive".into()));
    }
    let labels: Vec<String> = (0..big_n).map(|t| format!("{label_prefix}{t}")).collect();
    let row_images = (0..n)
        .map(|i| {
            (0..big_n / n)
                .map(|k| labels[(n * k + i) as usize].clone())
                .collect()
        })
        .collect();
    let col_images = (0..m)
        .map(|j| {
            (0..big_n / m)
                .map(|k| labels[(m * k + j) as usize].clone())
                .collect()
        })
        .collect();
    Ok(JointCycle {
        labels,
        atom_measure,
        row_images,
        col_images,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct JointEmbedding {
    pub algebra: MeasuredAlgebra,
    pub automorphism: Automorphism,
    pub embed_left: EmbeddingMap,
    pub embed_right: EmbeddingMap,
}

#[derive(Clone, Debug, PartialEq)]
pub enum JointOutcome {
    Sat(Box<JointEmbedding>),
    Unsat(String),
    Unknown(String),
}

/// Joint embedding of two algebra automorphisms over the same V: decompose
/// both into cycles, solve the induced instance, and on success assemble the
/// product of joint cycles over the cells with positive mass.
pub fn joint_embed_automorphisms(
    a_alg: &MeasuredAlgebra,
    alpha: &Automorphism,
    b_alg: &MeasuredAlgebra,
    beta: &Automorphism,
    opts: &JepOptions,
) -> Result<JointOutcome, FinAlgError> {
    if a_alg.value_group() != b_alg.value_group() {
        return Err(FinAlgError::InvalidInput(
            "the two algebras live over different value groups".into(),
        ));
    }
    let v = a_alg.value_group();
    alpha.validate(a_alg)?;
    beta.validate(b_alg)?;

    let row_orbits = alpha.orbits(a_alg);
    let col_orbits = beta.orbits(b_alg);
    let inst = JepInstance {
        rows: row_orbits
            .iter()
            .map(|o| (a_alg.measure_of(&o[0]).unwrap().clone(), o.len() as u64))
            .collect(),
        cols: col_orbits
            .iter()
            .map(|o| (b_alg.measure_of(&o[0]).unwrap().clone(), o.len() as u64))
            .collect(),
    };
    let c = match jep_instance(v, &inst, opts)? {
        JepOutcome::Sat(c) => c,
        JepOutcome::Unsat(why) => return Ok(JointOutcome::Unsat(why)),
        JepOutcome::Unknown(why) => return Ok(JointOutcome::Unknown(why)),
    };

    let mut atoms: Vec<(String, Value)> = Vec::new();
    let mut perm = std::collections::BTreeMap::new();
    let mut embed_left: EmbeddingMap = row_orbits
        .iter()
        .flatten()
        .map(|l| (l.clone(), Vec::new()))
        .collect();
    let mut embed_right: EmbeddingMap = col_orbits
        .iter()
        .flatten()
        .map(|l| (l.clone(), Vec::new()))
        .collect();
    for (i, row_orbit) in row_orbits.iter().enumerate() {
        for (j, col_orbit) in col_orbits.iter().enumerate() {
            if c[i][j].is_zero() {
                continue;
            }
            let n = row_orbit.len() as u64;
            let m = col_orbit.len() as u64;
            let total = c[i][j].scale(&Rat::from_integer(BigInt::from(n.lcm(&m))));
            let cycle = build_joint_cycle(n, m, &total, v, &format!("c[{i},{j}]."))?;
            let big_n = cycle.labels.len();
            for (t, label) in cycle.labels.iter().enumerate() {
                atoms.push((label.clone(), cycle.atom_measure.clone()));
                perm.insert(label.clone(), cycle.labels[(t + 1) % big_n].clone());
            }
            for (s, source) in row_orbit.iter().enumerate() {
                embed_left
                    .get_mut(source)
                    .unwrap()
                    .extend(cycle.row_images[s].iter().cloned());
            }
            for (s, source) in col_orbit.iter().enumerate() {
                embed_right
                    .get_mut(source)
                    .unwrap()
                    .extend(cycle.col_images[s].iter().cloned());
            }
        }
    }
    let algebra = MeasuredAlgebra::new(v.clone(), atoms)?;
    let automorphism = Automorphism::new(&algebra, perm)?;
    Ok(JointOutcome::Sat(Box::new(JointEmbedding {
        algebra,
        automorphism,
        embed_left,
        embed_right,
    })))
}

// ---------------------------------------------------------------------------
// wire format

#[derive(Serialize, Deserialize)]
struct RowWire {
    a: Value,
    n: u64,
}

#[derive(Serialize, Deserialize)]
struct ColWire {
    b: Value,
    m: u64,
}

#[derive(Serialize, Deserialize)]
struct InstanceWire {
    rows: Vec<RowWire>,
    cols: Vec<ColWire>,
}

impl Serialize for JepInstance {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        InstanceWire {
            rows: self
                .rows
                .iter()
                .map(|(a, n)| RowWire { a: a.clone(), n: *n })
                .collect(),
            cols: self
                .cols
                .iter()
                .map(|(b, m)| ColWire { b: b.clone(), m: *m })
                .collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for JepInstance {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let w = InstanceWire::deserialize(de)?;
        Ok(JepInstance {
            rows: w.rows.into_iter().map(|r| (r.a, r.n)).collect(),
            cols: w.cols.into_iter().map(|c| (c.b, c.m)).collect(),
        })
    }
}
