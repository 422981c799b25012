//! Exact computation around the dyadic odometer and its topological full
//! group, together with the combinatorics of finite measured Boolean
//! algebras over finitely generated clopen value sets.
//!
//! Everything is exact: rationals for dyadic measures and metric values,
//! formal Q-linear combinations with certified enclosures for irrational
//! measure values. No floating point appears anywhere.

pub mod cantor;
pub mod finalg;
pub mod gen;
pub mod lattice;
pub mod odometer;
pub mod rat;
pub mod valueset;

pub use cantor::{distance, CantorError, CantorPoint, ClopenSet};
pub use finalg::{
    amalgamate, build_joint_cycle, cycle_action, dense_class_hint, extend_partial,
    extend_partial_automorphism, jep_instance, joint_embed_automorphisms,
    validate_embedding, validate_equivariant_embedding, Amalgam, Automorphism, BlockPartition,
    DenseHint, EmbeddingDefect, EmbeddingMap, ExtensionResult, FinAlgError, JepInstance,
    JepOptions, JepOutcome, JointOutcome, MeasuredAlgebra, PartialAutomorphism, Refinement,
};
pub use odometer::{
    gm_finite_order_approx, gw_equivalence, gw_transport, odometer_eval_point,
    odometer_image_set, KRPartition, OdometerError, PiecewiseMap,
};
pub use rat::Rat;
pub use valueset::{IrrationalSymbol, Ring, Value, ValueGroup, ValueSetError};
