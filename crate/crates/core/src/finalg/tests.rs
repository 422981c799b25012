use super::*;
use crate::rat::rat;
use crate::valueset::{Ring, Value, ValueGroup};

fn val(r: (i64, i64)) -> Value {
    Value::from_rat(rat(r.0, r.1))
}

fn inv_pi() -> Value {
    Value::symbol("inv_pi")
}

fn dyadic_quarters() -> MeasuredAlgebra {
    MeasuredAlgebra::new(
        ValueGroup::dyadic(),
        (0..4).map(|i| (format!("a{i}"), val((1, 4)))).collect(),
    )
    .unwrap()
}

#[test]
fn algebra_invariants_enforced() {
    let v = ValueGroup::dyadic();
    // sums to 3/4
    assert!(matches!(
        MeasuredAlgebra::new(v.clone(), vec![("x".into(), val((3, 4)))]),
        Err(FinAlgError::InvalidAlgebra(_))
    ));
    // 1/3 is not dyadic
    assert!(matches!(
        MeasuredAlgebra::new(
            v.clone(),
            vec![("x".into(), val((1, 3))), ("y".into(), val((2, 3)))]
        ),
        Err(FinAlgError::InvalidAlgebra(_))
    ));
    // zero measure atom
    assert!(matches!(
        MeasuredAlgebra::new(
            v,
            vec![("x".into(), val((0, 1))), ("y".into(), val((1, 1)))]
        ),
        Err(FinAlgError::InvalidAlgebra(_))
    ));
    // measures with symbols work when positivity is certified
    let alg = MeasuredAlgebra::new(
        ValueGroup::span_half_inv_pi(),
        vec![
            ("p".into(), inv_pi()),
            ("q".into(), val((1, 2)).sub(&inv_pi())),
            ("r".into(), val((1, 2))),
        ],
    )
    .unwrap();
    assert_eq!(alg.len(), 3);
}

#[test]
fn embedding_validation() {
    let a = MeasuredAlgebra::new(
        ValueGroup::dyadic(),
        vec![("x".into(), val((1, 2))), ("y".into(), val((1, 2)))],
    )
    .unwrap();
    let b = dyadic_quarters();

    // identity embedding of an algebra into itself
    let id: EmbeddingMap = a
        .labels()
        .map(|l| (l.to_string(), vec![l.to_string()]))
        .collect();
    assert!(validate_embedding(&a, &a, &id).is_ok());

    // refinement embedding: split each half into two quarters
    let e: EmbeddingMap = [
        ("x".to_string(), vec!["a0".to_string(), "a1".to_string()]),
        ("y".to_string(), vec!["a2".to_string(), "a3".to_string()]),
    ]
    .into();
    assert!(validate_embedding(&a, &b, &e).is_ok());

    // a measure-breaking image is reported as a measure defect
    let bad: EmbeddingMap = [
        ("x".to_string(), vec!["a0".to_string()]),
        ("y".to_string(), vec!["a2".to_string(), "a3".to_string()]),
    ]
    .into();
    assert!(matches!(
        validate_embedding(&a, &b, &bad),
        Err(EmbeddingDefect::Measure(_))
    ));

    // equivariance: swapping halves embeds into the quarter 4-cycle wrongly
    let phi = Automorphism::new(
        &a,
        [("x", "y"), ("y", "x")]
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .into(),
    )
    .unwrap();
    let psi = Automorphism::new(
        &b,
        [("a0", "a1"), ("a1", "a2"), ("a2", "a3"), ("a3", "a0")]
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .into(),
    )
    .unwrap();
    assert!(matches!(
        validate_equivariant_embedding(&a, &phi, &b, &psi, &e),
        Err(EmbeddingDefect::Equivariance(_))
    ));
    // but the block swap against psi^2-compatible layout works
    let e2: EmbeddingMap = [
        ("x".to_string(), vec!["a0".to_string(), "a2".to_string()]),
        ("y".to_string(), vec!["a1".to_string(), "a3".to_string()]),
    ]
    .into();
    assert!(validate_equivariant_embedding(&a, &phi, &b, &psi, &e2).is_ok());
}

/// Postconditions of the extension: permutation on a valid refinement,
/// measure preserved, children of U_i-atoms carried into W_i.
fn check_extension(
    alg: &MeasuredAlgebra,
    u: &BlockPartition,
    w: &BlockPartition,
    out: &ExtensionResult,
) {
    out.refinement.validate(alg).unwrap();
    out.automorphism.validate(&out.refined).unwrap();
    for (parent, children) in &out.refinement.children {
        let block = u.block_of(parent).unwrap();
        for (child, _) in children {
            let image = out.automorphism.apply(child);
            let image_parent = out.refinement.parent_of(image).unwrap();
            assert_eq!(
                w.block_of(image_parent),
                Some(block),
                "child {child} of {parent} (U_{block}) lands outside W_{block}"
            );
        }
    }
}

#[test]
fn extension_trivial_pairing_is_identity() {
    let alg = dyadic_quarters();
    let u = BlockPartition::new(vec![
        vec!["a0".into(), "a1".into()],
        vec!["a2".into(), "a3".into()],
    ]);
    let out = extend_partial(&alg, &u, &u).unwrap();
    check_extension(&alg, &u, &u, &out);
    assert!(out.automorphism.is_identity());
    for children in out.refinement.children.values() {
        assert_eq!(children.len(), 1);
    }
}

#[test]
fn extension_dyadic_crossing_blocks() {
    let alg = dyadic_quarters();
    let u = BlockPartition::new(vec![
        vec!["a0".into(), "a1".into()],
        vec!["a2".into(), "a3".into()],
    ]);
    let w = BlockPartition::new(vec![
        vec!["a0".into(), "a2".into()],
        vec!["a1".into(), "a3".into()],
    ]);
    let out = extend_partial(&alg, &u, &w).unwrap();
    check_extension(&alg, &u, &w, &out);
    assert!(!out.automorphism.is_identity());
}

#[test]
fn extension_with_irrational_measures() {
    let v = ValueGroup::span_half_inv_pi();
    let alg = MeasuredAlgebra::new(
        v,
        vec![
            ("p".into(), inv_pi()),
            ("q".into(), val((1, 2)).sub(&inv_pi())),
            ("r".into(), val((1, 2))),
        ],
    )
    .unwrap();
    let u = BlockPartition::new(vec![vec!["p".into(), "q".into()], vec!["r".into()]]);
    let w = BlockPartition::new(vec![vec!["r".into()], vec!["p".into(), "q".into()]]);
    let out = extend_partial(&alg, &u, &w).unwrap();
    check_extension(&alg, &u, &w, &out);
}

#[test]
fn extension_surfaces_precision_exhaustion() {
    use crate::valueset::{IrrationalSymbol, ValueSetError};
    // a symbol enclosed in [0.24, 0.26] cannot be ordered against 1/4, and
    // the allocation inside the extension needs exactly that comparison
    let sym = IrrationalSymbol::new("t", rat(24, 100), rat(26, 100)).unwrap();
    let v = ValueGroup::new(
        Ring::Integers,
        vec![Value::from_rat(rat(1, 4)), Value::symbol("t")],
        vec![sym],
        false,
    )
    .unwrap();
    let t = Value::symbol("t");
    let alg = MeasuredAlgebra::new(
        v,
        vec![
            ("a0".into(), t.clone()),
            ("a1".into(), val((1, 2)).sub(&t)),
            ("a2".into(), val((1, 4))),
            ("a3".into(), val((1, 4))),
        ],
    )
    .unwrap();
    let u = BlockPartition::new(vec![
        vec!["a0".into(), "a1".into()],
        vec!["a2".into(), "a3".into()],
    ]);
    let w = BlockPartition::new(vec![
        vec!["a2".into(), "a3".into()],
        vec!["a0".into(), "a1".into()],
    ]);
    assert!(matches!(
        extend_partial(&alg, &u, &w),
        Err(FinAlgError::Value(ValueSetError::PrecisionExhausted { .. }))
    ));
}

#[test]
fn extension_rejects_mismatched_blocks() {
    let alg = dyadic_quarters();
    let u = BlockPartition::new(vec![
        vec!["a0".into()],
        vec!["a1".into(), "a2".into(), "a3".into()],
    ]);
    let w = BlockPartition::new(vec![
        vec!["a0".into(), "a1".into()],
        vec!["a2".into(), "a3".into()],
    ]);
    assert!(matches!(
        extend_partial(&alg, &u, &w),
        Err(FinAlgError::InvalidInput(_))
    ));
}

#[test]
fn partial_automorphism_completion() {
    let alg = dyadic_quarters();
    let pa = PartialAutomorphism {
        dom: vec![vec!["a0".into()]],
        ran: vec![vec!["a3".into()]],
    };
    let out = extend_partial_automorphism(&alg, &pa).unwrap();
    let (u, w) = pa.completed(&alg);
    check_extension(&alg, &u, &w, &out);
    // children of a0 all land below a3
    for (child, _) in &out.refinement.children["a0"] {
        let image = out.automorphism.apply(child);
        assert_eq!(out.refinement.parent_of(image), Some("a3"));
    }
}

#[test]
fn jep_counterexample_is_unsat() {
    let v = ValueGroup::span_half_inv_pi();
    let inst = JepInstance {
        rows: vec![(val((1, 2)), 2)],
        cols: vec![(inv_pi(), 1), (Value::one().sub(&inv_pi()), 1)],
    };
    match jep_instance(&v, &inst, &JepOptions::default()).unwrap() {
        JepOutcome::Unsat(_) => {}
        other => panic!("expected Unsat, got {other:?}"),
    }
}

#[test]
fn jep_ring_closed_form() {
    let v = ValueGroup::dyadic();
    let inst = JepInstance {
        rows: vec![(val((1, 2)), 2)],
        cols: vec![(val((1, 4)), 2), (val((1, 2)), 1)],
    };
    match jep_instance(&v, &inst, &JepOptions::default()).unwrap() {
        JepOutcome::Sat(c) => {
            verify_witness(&v, &inst, &c).unwrap();
            // the closed form: c_ij = a_i b_j gcd(n_i, m_j)
            assert_eq!(c[0][0], val((1, 4))); // 1/2 * 1/4 * gcd(2,2)
            assert_eq!(c[0][1], val((1, 4))); // 1/2 * 1/2 * gcd(2,1)
        }
        other => panic!("expected Sat, got {other:?}"),
    }
}

#[test]
fn jep_single_atom() {
    let v = ValueGroup::dyadic();
    let inst = JepInstance {
        rows: vec![(Value::one(), 1)],
        cols: vec![(Value::one(), 1)],
    };
    match jep_instance(&v, &inst, &JepOptions::default()).unwrap() {
        JepOutcome::Sat(c) => assert_eq!(c, vec![vec![Value::one()]]),
        other => panic!("expected Sat, got {other:?}"),
    }
}

#[test]
fn jep_qlike_northwest() {
    let v = ValueGroup::rational_module();
    let inst = JepInstance {
        rows: vec![(val((1, 3)), 2), (val((1, 6)), 2)],
        cols: vec![(val((1, 5)), 3), (val((2, 5)), 1)],
    };
    // force the transportation route: undeclare the ring structure
    let v2 = ValueGroup::new(Ring::Rationals, v.generators.clone(), vec![], false).unwrap();
    match jep_instance(&v2, &inst, &JepOptions::default()).unwrap() {
        JepOutcome::Sat(c) => verify_witness(&v2, &inst, &c).unwrap(),
        other => panic!("expected Sat, got {other:?}"),
    }
}

#[test]
fn jep_rejects_bad_instance() {
    let v = ValueGroup::dyadic();
    let inst = JepInstance {
        rows: vec![(val((1, 2)), 1)],
        cols: vec![(Value::one(), 1)],
    };
    assert!(matches!(
        jep_instance(&v, &inst, &JepOptions::default()),
        Err(FinAlgError::InvalidInput(_))
    ));
}

#[test]
fn jep_general_lattice_route() {
    // over Z with generators 1/2 and 1/pi but declared_ring = false and not
    // Q-like, a 2x2 instance goes through the lattice search
    let v = ValueGroup::span_half_inv_pi();
    let inst = JepInstance {
        rows: vec![(val((1, 2)), 1), (val((1, 2)), 1)],
        cols: vec![(val((1, 2)), 1), (val((1, 2)), 1)],
    };
    match jep_instance(&v, &inst, &JepOptions::default()).unwrap() {
        JepOutcome::Sat(c) => verify_witness(&v, &inst, &c).unwrap(),
        other => panic!("expected Sat, got {other:?}"),
    }
}

#[test]
fn jep_localized_lattice_route() {
    // dyadics without the ring declaration: not Q-like either, so the 2x2
    // instance runs through the Z[1/2] lattice search
    let v = ValueGroup::new(
        Ring::IntegersInverting(2),
        vec![Value::one()],
        vec![],
        false,
    )
    .unwrap();
    let inst = JepInstance {
        rows: vec![(val((1, 4)), 2), (val((1, 2)), 1)],
        cols: vec![(val((1, 4)), 2), (val((1, 2)), 1)],
    };
    match jep_instance(&v, &inst, &JepOptions::default()).unwrap() {
        JepOutcome::Sat(c) => verify_witness(&v, &inst, &c).unwrap(),
        other => panic!("expected Sat, got {other:?}"),
    }
}

#[test]
fn joint_cycle_identifications() {
    let v = ValueGroup::rational_module();
    let c = build_joint_cycle(2, 3, &Value::one(), &v, "C").unwrap();
    assert_eq!(c.labels.len(), 6);
    assert_eq!(c.atom_measure, val((1, 6)));
    // A_0 -> C_0 u C_2 u C_4, A_1 -> C_1 u C_3 u C_5
    assert_eq!(c.row_images[0], vec!["C0", "C2", "C4"]);
    assert_eq!(c.row_images[1], vec!["C1", "C3", "C5"]);
    assert_eq!(c.col_images[0], vec!["C0", "C3"]);

    // 1/pi does not split in two over the half/inv-pi module
    let hp = ValueGroup::span_half_inv_pi();
    assert!(matches!(
        build_joint_cycle(2, 1, &inv_pi(), &hp, "C"),
        Err(FinAlgError::MeasureNotDivisible)
    ));

    let trivial = build_joint_cycle(1, 1, &Value::one(), &v, "C").unwrap();
    assert_eq!(trivial.labels.len(), 1);
}

#[test]
fn joint_embed_two_cycle_with_identity() {
    let v = ValueGroup::dyadic();
    let a = MeasuredAlgebra::new(
        v.clone(),
        vec![("x".into(), val((1, 2))), ("y".into(), val((1, 2)))],
    )
    .unwrap();
    let alpha = Automorphism::new(
        &a,
        [("x", "y"), ("y", "x")]
            .map(|(k, q)| (k.to_string(), q.to_string()))
            .into(),
    )
    .unwrap();
    let b = MeasuredAlgebra::new(v, vec![("whole".into(), Value::one())]).unwrap();
    let beta = Automorphism::identity(&b);
    match joint_embed_automorphisms(&a, &alpha, &b, &beta, &JepOptions::default()).unwrap() {
        JointOutcome::Sat(j) => {
            assert_eq!(j.algebra.len(), 2);
            assert_eq!(j.automorphism.order(&j.algebra), 2);
            // beta's single atom embeds as the whole space
            let image = &j.embed_right["whole"];
            assert_eq!(image.len(), 2);
            validate_equivariant_embedding(&a, &alpha, &j.algebra, &j.automorphism, &j.embed_left)
                .unwrap();
            validate_equivariant_embedding(&b, &beta, &j.algebra, &j.automorphism, &j.embed_right)
                .unwrap();
        }
        other => panic!("expected Sat, got {other:?}"),
    }
}

#[test]
fn joint_embed_identities_on_a_point() {
    let v = ValueGroup::dyadic();
    let a = MeasuredAlgebra::new(v, vec![("u".into(), Value::one())]).unwrap();
    let id = Automorphism::identity(&a);
    match joint_embed_automorphisms(&a, &id, &a, &id, &JepOptions::default()).unwrap() {
        JointOutcome::Sat(j) => {
            assert_eq!(j.algebra.len(), 1);
            assert!(j.automorphism.is_identity());
        }
        other => panic!("expected Sat, got {other:?}"),
    }
}

#[test]
fn joint_embed_seeded_embeddings_validate() {
    // on SAT, both returned embeddings must pass the equivariant check
    let v = ValueGroup::rational_module();
    for seed in 0..15u64 {
        let mut rng = crate::gen::Rng::new(900 + seed);
        let (a, alpha) = crate::gen::random_cyclic_automorphism(&mut rng, &v, 4, "x");
        let (b, beta) = crate::gen::random_cyclic_automorphism(&mut rng, &v, 4, "y");
        match joint_embed_automorphisms(&a, &alpha, &b, &beta, &JepOptions::default()).unwrap()
        {
            JointOutcome::Sat(j) => {
                validate_equivariant_embedding(
                    &a,
                    &alpha,
                    &j.algebra,
                    &j.automorphism,
                    &j.embed_left,
                )
                .unwrap();
                validate_equivariant_embedding(
                    &b,
                    &beta,
                    &j.algebra,
                    &j.automorphism,
                    &j.embed_right,
                )
                .unwrap();
            }
            other => panic!("Q-like joint embed failed at seed {seed}: {other:?}"),
        }
    }
}

#[test]
fn joint_embed_counterexample_pair() {
    let v = ValueGroup::span_half_inv_pi();
    let a = MeasuredAlgebra::new(
        v.clone(),
        vec![("x".into(), val((1, 2))), ("y".into(), val((1, 2)))],
    )
    .unwrap();
    let alpha = Automorphism::new(
        &a,
        [("x", "y"), ("y", "x")]
            .map(|(k, q)| (k.to_string(), q.to_string()))
            .into(),
    )
    .unwrap();
    let b = MeasuredAlgebra::new(
        v,
        vec![
            ("p".into(), inv_pi()),
            ("q".into(), Value::one().sub(&inv_pi())),
        ],
    )
    .unwrap();
    let beta = Automorphism::identity(&b);
    match joint_embed_automorphisms(&a, &alpha, &b, &beta, &JepOptions::default()).unwrap() {
        JointOutcome::Unsat(_) => {}
        other => panic!("expected Unsat, got {other:?}"),
    }
}

#[test]
fn amalgamate_identity_embeddings() {
    let v = ValueGroup::rational_module();
    let a = MeasuredAlgebra::new(
        v.clone(),
        vec![("x".into(), val((1, 2))), ("y".into(), val((1, 2)))],
    )
    .unwrap();
    let phi = Automorphism::new(
        &a,
        [("x", "y"), ("y", "x")]
            .map(|(k, q)| (k.to_string(), q.to_string()))
            .into(),
    )
    .unwrap();
    let id_embed: EmbeddingMap = a
        .labels()
        .map(|l| (l.to_string(), vec![l.to_string()]))
        .collect();
    let out = amalgamate(&a, &phi, &a, &phi, &id_embed, &a, &phi, &id_embed).unwrap();
    assert_eq!(out.algebra.len(), 2);
    assert_eq!(out.automorphism.order(&out.algebra), 2);
}

#[test]
fn amalgamate_two_swaps_over_point() {
    let v = ValueGroup::rational_module();
    let a = MeasuredAlgebra::new(v.clone(), vec![("u".into(), Value::one())]).unwrap();
    let phi = Automorphism::identity(&a);
    let half_pair = |p: &str| {
        MeasuredAlgebra::new(
            v.clone(),
            vec![
                (format!("{p}0"), val((1, 2))),
                (format!("{p}1"), val((1, 2))),
            ],
        )
        .unwrap()
    };
    let b = half_pair("b");
    let psi = Automorphism::new(
        &b,
        [("b0", "b1"), ("b1", "b0")]
            .map(|(k, q)| (k.to_string(), q.to_string()))
            .into(),
    )
    .unwrap();
    let c = half_pair("c");
    let theta = Automorphism::new(
        &c,
        [("c0", "c1"), ("c1", "c0")]
            .map(|(k, q)| (k.to_string(), q.to_string()))
            .into(),
    )
    .unwrap();
    let embed_b: EmbeddingMap = [("u".to_string(), vec!["b0".to_string(), "b1".to_string()])].into();
    let embed_c: EmbeddingMap = [("u".to_string(), vec!["c0".to_string(), "c1".to_string()])].into();
    let out = amalgamate(&a, &phi, &b, &psi, &embed_b, &c, &theta, &embed_c).unwrap();

    // marginals: each B- and C-atom gets back its measure
    for atom in b.labels() {
        assert_eq!(
            out.algebra.measure_of_set(
                out.embed_left[atom].iter().map(String::as_str)
            ),
            *b.measure_of(atom).unwrap(),
        );
    }
    for atom in c.labels() {
        assert_eq!(
            out.algebra.measure_of_set(
                out.embed_right[atom].iter().map(String::as_str)
            ),
            *c.measure_of(atom).unwrap(),
        );
    }
    // equivariance of both embeddings, and the commuting square over A
    validate_equivariant_embedding(&b, &psi, &out.algebra, &out.automorphism, &out.embed_left)
        .unwrap();
    validate_equivariant_embedding(&c, &theta, &out.algebra, &out.automorphism, &out.embed_right)
        .unwrap();
    let via_b: std::collections::BTreeSet<&String> = embed_b["u"]
        .iter()
        .flat_map(|bb| out.embed_left[bb].iter())
        .collect();
    let via_c: std::collections::BTreeSet<&String> = embed_c["u"]
        .iter()
        .flat_map(|cc| out.embed_right[cc].iter())
        .collect();
    assert_eq!(via_b, via_c);
    // order of the product divides lcm of the factor orders
    assert_eq!(out.automorphism.order(&out.algebra), 2);
}

#[test]
fn amalgamate_with_twisted_return_orbits() {
    // A: two atoms swapped by phi. B: each atom split in two, with psi
    // twisting the children at the wrap, so the return map psi^2 has one
    // orbit of size 2 below the representative (n_0 = 2).
    let v = ValueGroup::rational_module();
    let a = MeasuredAlgebra::new(
        v.clone(),
        vec![("x".into(), val((1, 2))), ("y".into(), val((1, 2)))],
    )
    .unwrap();
    let phi = Automorphism::new(
        &a,
        [("x", "y"), ("y", "x")]
            .map(|(k, q)| (k.to_string(), q.to_string()))
            .into(),
    )
    .unwrap();
    let b = MeasuredAlgebra::new(
        v.clone(),
        ["b0", "b1", "b2", "b3"]
            .iter()
            .map(|l| (l.to_string(), val((1, 4))))
            .collect(),
    )
    .unwrap();
    // psi: b0 -> b2 -> b1 -> b3 -> b0, a single 4-cycle over the 2-cycle phi
    let psi = Automorphism::new(
        &b,
        [("b0", "b2"), ("b2", "b1"), ("b1", "b3"), ("b3", "b0")]
            .map(|(k, q)| (k.to_string(), q.to_string()))
            .into(),
    )
    .unwrap();
    let embed_b: EmbeddingMap = [
        ("x".to_string(), vec!["b0".to_string(), "b1".to_string()]),
        ("y".to_string(), vec!["b2".to_string(), "b3".to_string()]),
    ]
    .into();
    validate_equivariant_embedding(&a, &phi, &b, &psi, &embed_b).unwrap();

    // C: plain untwisted split
    let c = MeasuredAlgebra::new(
        v,
        ["c0", "c1", "c2", "c3"]
            .iter()
            .map(|l| (l.to_string(), val((1, 4))))
            .collect(),
    )
    .unwrap();
    let theta = Automorphism::new(
        &c,
        [("c0", "c2"), ("c2", "c0"), ("c1", "c3"), ("c3", "c1")]
            .map(|(k, q)| (k.to_string(), q.to_string()))
            .into(),
    )
    .unwrap();
    let embed_c: EmbeddingMap = [
        ("x".to_string(), vec!["c0".to_string(), "c1".to_string()]),
        ("y".to_string(), vec!["c2".to_string(), "c3".to_string()]),
    ]
    .into();
    let out = amalgamate(&a, &phi, &b, &psi, &embed_b, &c, &theta, &embed_c).unwrap();

    // the twisted side collapses to a single size-2 return class
    assert_eq!(out.transports.len(), 1);
    assert_eq!(out.transports[0].row_reps, vec![("b0".to_string(), 2)]);
    assert_eq!(
        out.transports[0].col_reps,
        vec![("c0".to_string(), 1), ("c1".to_string(), 1)]
    );
    // order of psi x theta divides lcm(4, 2) = 4
    assert_eq!(4 % out.automorphism.order(&out.algebra), 0);
    validate_equivariant_embedding(&b, &psi, &out.algebra, &out.automorphism, &out.embed_left)
        .unwrap();
    validate_equivariant_embedding(&c, &theta, &out.algebra, &out.automorphism, &out.embed_right)
        .unwrap();
    for atom in b.labels() {
        assert_eq!(
            out.algebra
                .measure_of_set(out.embed_left[atom].iter().map(String::as_str)),
            val((1, 4))
        );
    }
}

#[test]
fn joint_embed_drops_zero_cells_but_stays_total() {
    // the northwest witness for two half/half identity-free swaps zeroes the
    // off-diagonal cells; the assembled embedding must still cover every atom
    let v = ValueGroup::new(Ring::Rationals, vec![Value::one()], vec![], false).unwrap();
    let alg = MeasuredAlgebra::new(
        v.clone(),
        vec![("x".into(), val((1, 2))), ("y".into(), val((1, 2)))],
    )
    .unwrap();
    let id = Automorphism::identity(&alg);
    match joint_embed_automorphisms(&alg, &id, &alg, &id, &JepOptions::default()).unwrap() {
        JointOutcome::Sat(j) => {
            for label in alg.labels() {
                assert!(!j.embed_left[label].is_empty());
                assert!(!j.embed_right[label].is_empty());
            }
            validate_equivariant_embedding(&alg, &id, &j.algebra, &j.automorphism, &j.embed_left)
                .unwrap();
            validate_equivariant_embedding(&alg, &id, &j.algebra, &j.automorphism, &j.embed_right)
                .unwrap();
        }
        other => panic!("expected Sat, got {other:?}"),
    }
}

#[test]
fn amalgamate_requires_q_like() {
    let v = ValueGroup::dyadic();
    let a = MeasuredAlgebra::new(v, vec![("u".into(), Value::one())]).unwrap();
    let phi = Automorphism::identity(&a);
    let e: EmbeddingMap = [("u".to_string(), vec!["u".to_string()])].into();
    assert!(matches!(
        amalgamate(&a, &phi, &a, &phi, &e, &a, &phi, &e),
        Err(FinAlgError::NotQLike)
    ));
}

#[test]
fn cycle_action_examples() {
    let alg = dyadic_quarters();
    // a 3-cycle on a0, a1, a2 fixing a3
    let g = Automorphism::new(
        &alg,
        [("a0", "a1"), ("a1", "a2"), ("a2", "a0"), ("a3", "a3")]
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .into(),
    )
    .unwrap();
    // sigma identity gives the identity
    let id = cycle_action(&alg, &g, &[0, 1, 2]).unwrap();
    assert!(id.is_identity());
    // the full cycle gives g back
    let full = cycle_action(&alg, &g, &[1, 2, 0]).unwrap();
    assert_eq!(full, g);
    // wrong p
    assert!(matches!(
        cycle_action(&alg, &g, &[1, 0]),
        Err(FinAlgError::NotACycle(_))
    ));
    // sigma must be a permutation
    assert!(matches!(
        cycle_action(&alg, &g, &[0, 0, 1]),
        Err(FinAlgError::NotACycle(_))
    ));

    // homomorphism property over all of S_3
    let perms3: Vec<Vec<usize>> = vec![
        vec![0, 1, 2],
        vec![0, 2, 1],
        vec![1, 0, 2],
        vec![1, 2, 0],
        vec![2, 0, 1],
        vec![2, 1, 0],
    ];
    for s in &perms3 {
        for t in &perms3 {
            let gs = cycle_action(&alg, &g, s).unwrap();
            let gt = cycle_action(&alg, &g, t).unwrap();
            let st: Vec<usize> = (0..3).map(|i| s[t[i]]).collect();
            let gst = cycle_action(&alg, &g, &st).unwrap();
            assert_eq!(gs.compose(&gt), gst, "sigma={s:?} tau={t:?}");
            // support stays inside the support of g
            assert_eq!(gs.apply("a3"), "a3");
        }
    }
}

#[test]
fn dense_hint_named_examples() {
    assert_eq!(
        dense_class_hint(&ValueGroup::rational_module()).unwrap(),
        DenseHint::Yes("V + Z is a Q-vector space".into())
    );
    assert_eq!(
        dense_class_hint(&ValueGroup::dyadic()).unwrap(),
        DenseHint::Yes("V + Z is a ring".into())
    );
    match dense_class_hint(&ValueGroup::span_half_inv_pi()).unwrap() {
        DenseHint::No(inst) => {
            // the witness instance must itself be unsatisfiable
            match jep_instance(
                &ValueGroup::span_half_inv_pi(),
                &inst,
                &JepOptions::default(),
            )
            .unwrap()
            {
                JepOutcome::Unsat(_) => {}
                other => panic!("witness not UNSAT: {other:?}"),
            }
        }
        other => panic!("expected No, got {other:?}"),
    }
    // not group-like: cyclic module over Z
    let cyclic = ValueGroup::new(
        Ring::Integers,
        vec![Value::from_rat(rat(1, 2))],
        vec![],
        false,
    )
    .unwrap();
    assert!(matches!(
        dense_class_hint(&cyclic),
        Err(FinAlgError::NotGroupLike)
    ));
}

#[test]
fn algebra_json_round_trip() {
    let alg = MeasuredAlgebra::new(
        ValueGroup::span_half_inv_pi(),
        vec![
            ("p".into(), inv_pi()),
            ("q".into(), Value::one().sub(&inv_pi())),
        ],
    )
    .unwrap();
    let js = serde_json::to_string(&alg).unwrap();
    let back: MeasuredAlgebra = serde_json::from_str(&js).unwrap();
    assert_eq!(back, alg);
    // invalid sums are rejected at parse time
    let bad = js.replace("\"q\"", "\"q2\"").replace("1\"", "2\"");
    assert!(serde_json::from_str::<MeasuredAlgebra>(&bad).is_err());

    let inst = JepInstance {
        rows: vec![(val((1, 2)), 2)],
        cols: vec![(Value::one(), 1)],
    };
    let js = serde_json::to_string(&inst).unwrap();
    assert_eq!(
        js,
        r#"{"rows":[{"a":{"rational":"1/2"},"n":2}],"cols":[{"b":{"rational":"1"},"m":1}]}"#
    );
    let back: JepInstance = serde_json::from_str(&js).unwrap();
    assert_eq!(back, inst);
}
