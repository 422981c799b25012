//! Batch front end: JSON in, JSON out, one verb per library operation.
//!
//! Exit codes: 0 result on stdout, 1 I/O or parse failure, 2 precondition
//! violation (with a machine-readable error object), 3 honest "unknown"
//! outcomes. Diagnostics go to stderr, results only to stdout.

use clap::{Parser, Subcommand, ValueEnum};
use fullgroup::finalg::{self, JepOptions, JepOutcome, JointOutcome};
use fullgroup::gen::{self, Rng};
use fullgroup::rat::{format_rat, parse_rat};
use fullgroup::{
    odometer, Automorphism, BlockPartition, CantorPoint, ClopenSet, DenseHint,
    EmbeddingMap, JepInstance, KRPartition, MeasuredAlgebra, PiecewiseMap, Value, ValueGroup,
};
use serde::de::DeserializeOwned;
use serde_json::{json, Value as Json};
use std::fmt::Display;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "fullgroup", version, about = "Exact computation in the topological full group of the dyadic odometer and in finite measured algebras")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoolOp {
    Union,
    Intersection,
    Difference,
    Complement,
}

#[derive(Clone, Copy, ValueEnum)]
enum GwMode {
    Transport,
    Equivalence,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Map,
    Algebra,
    Instance,
}

#[derive(Clone, Copy, ValueEnum)]
enum InstanceKind {
    RingCase,
    QLike,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact membership of a value in the module V
    ValueMember {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        value: PathBuf,
    },
    /// Group-like / Q-like / ring classification of V
    ValueClassify {
        #[arg(long)]
        group: PathBuf,
    },
    /// Boolean operations on clopen sets
    ClopenOp {
        #[arg(long)]
        op: BoolOp,
        #[arg(long)]
        lhs: PathBuf,
        #[arg(long)]
        rhs: Option<PathBuf>,
    },
    /// Apply a map (or a plain odometer power) to a set or a point
    OdoApply {
        #[arg(long, conflicts_with = "power")]
        map: Option<PathBuf>,
        #[arg(long)]
        power: Option<i64>,
        #[arg(long, conflicts_with = "point")]
        set: Option<PathBuf>,
        #[arg(long)]
        point: Option<PathBuf>,
    },
    /// Compose two maps, or invert one
    OdoCompose {
        #[arg(long)]
        lhs: PathBuf,
        #[arg(long, conflicts_with = "inverse")]
        rhs: Option<PathBuf>,
        #[arg(long)]
        inverse: bool,
    },
    /// Least power with g^m = id, within a bound
    OdoOrder {
        #[arg(long)]
        map: PathBuf,
        #[arg(long, default_value_t = 4096)]
        max: u64,
    },
    /// Rank of the avoidance tree, with the cocycle bound
    OdoRank {
        #[arg(long)]
        map: PathBuf,
    },
    /// The single-tower Kakutani-Rokhlin partition of given depth
    OdoKr {
        #[arg(long)]
        depth: u32,
    },
    /// Transport g(A) inside B, or carry A exactly onto B
    OdoGw {
        #[arg(long)]
        mode: GwMode,
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Finite-order approximation within sup distance delta
    OdoApprox {
        #[arg(long)]
        gamma: PathBuf,
        #[arg(long)]
        delta: String,
    },
    /// Exact sup distance between two maps
    OdoDist {
        #[arg(long)]
        lhs: PathBuf,
        #[arg(long)]
        rhs: PathBuf,
    },
    /// Validate an embedding (optionally equivariant) between algebras
    AlgValidate {
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        into: PathBuf,
        #[arg(long)]
        embedding: PathBuf,
        #[arg(long, requires = "psi")]
        phi: Option<PathBuf>,
        #[arg(long, requires = "phi")]
        psi: Option<PathBuf>,
    },
    /// Extend a block pairing to an automorphism of a refinement
    AlgExtend {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        u: PathBuf,
        #[arg(long)]
        w: PathBuf,
    },
    /// Decide a joint-embedding instance over V
    AlgJep {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = 32)]
        coeff_bound: u64,
        #[arg(long, default_value_t = 200_000)]
        step_budget: u64,
    },
    /// Jointly embed two algebra automorphisms
    AlgJoint {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        alpha: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        beta: PathBuf,
        #[arg(long, default_value_t = 32)]
        coeff_bound: u64,
        #[arg(long, default_value_t = 200_000)]
        step_budget: u64,
    },
    /// Amalgamate two equivariant embeddings over a Q-like V
    AlgAmalgamate {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        psi: PathBuf,
        #[arg(long)]
        embed_b: PathBuf,
        #[arg(long)]
        c: PathBuf,
        #[arg(long)]
        theta: PathBuf,
        #[arg(long)]
        embed_c: PathBuf,
    },
    /// Act on a p-cycle by a permutation of its blocks
    AlgCycle {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        automorphism: PathBuf,
        /// comma-separated images, e.g. 1,2,0
        #[arg(long)]
        sigma: String,
    },
    /// Semi-decision for a dense conjugacy class over V
    AlgDenseHint {
        #[arg(long)]
        group: PathBuf,
    },
    /// Seeded random artifacts: maps, algebras, instances
    Gen {
        #[arg(value_enum)]
        kind: GenKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        depth: u32,
        #[arg(long, default_value_t = 3)]
        cocycle_bound: u64,
        /// value group file for algebra generation (defaults to dyadics)
        #[arg(long)]
        group: Option<PathBuf>,
        #[arg(long, default_value_t = 6)]
        max_atoms: usize,
        #[arg(long, value_enum, default_value_t = InstanceKind::RingCase)]
        instance_kind: InstanceKind,
        /// shorthand for --instance-kind ring-case
        #[arg(long)]
        ring_case: bool,
        /// shorthand for --instance-kind q-like
        #[arg(long, conflicts_with = "ring_case")]
        q_like: bool,
        #[arg(long, default_value_t = 4)]
        p_max: usize,
        #[arg(long, default_value_t = 4)]
        q_max: usize,
        #[arg(long, default_value_t = 64)]
        denom: u64,
    },
}

enum Failure {
    /// exit 1: I/O trouble or malformed input
    Io(String),
    /// exit 2: precondition violation, machine-readable
    Contract { code: &'static str, detail: String },
}

impl Failure {
    fn contract(code: &'static str, err: impl Display) -> Self {
        Failure::Contract {
            code,
            detail: err.to_string(),
        }
    }
}

fn load<T: DeserializeOwned>(path: &PathBuf) -> Result<T, Failure> {
    let text = if path.as_os_str() == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Failure::Io(format!("reading stdin: {e}")))?;
        buf
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| Failure::Io(format!("reading {}: {e}", path.display())))?
    };
    serde_json::from_str(&text)
        .map_err(|e| Failure::Io(format!("parsing {}: {e}", path.display())))
}

fn value_err(e: fullgroup::ValueSetError) -> Failure {
    use fullgroup::ValueSetError::*;
    match &e {
        PrecisionExhausted { .. } => Failure::contract("precision_exhausted", e),
        UnknownSymbol(_) => Failure::contract("unknown_symbol", e),
        InvalidGroup(_) => Failure::contract("invalid_group", e),
    }
}

fn odo_err(e: odometer::OdometerError) -> Failure {
    use odometer::OdometerError::*;
    match &e {
        InvariantViolation(_) => Failure::contract("invariant_violation", e),
        MeasureNotDominated => Failure::contract("measure_not_dominated", e),
        MeasureMismatch => Failure::contract("measure_mismatch", e),
        InvalidDelta(_) => Failure::contract("invalid_delta", e),
    }
}

fn alg_err(e: finalg::FinAlgError) -> Failure {
    use finalg::FinAlgError::*;
    match &e {
        Value(inner) => value_err(inner.clone()),
        InvalidAlgebra(_) => Failure::contract("invalid_algebra", e),
        InvalidInput(_) => Failure::contract("invalid_input", e),
        InvalidEmbedding(_) => Failure::contract("invalid_embedding", e),
        NotACycle(_) => Failure::contract("not_a_cycle", e),
        NotGroupLike => Failure::contract("not_group_like", e),
        NotQLike => Failure::contract("not_q_like", e),
        MeasureNotDivisible => Failure::contract("measure_not_divisible", e),
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> Json {
    serde_json::to_value(value).expect("library types serialize")
}

/// Runs the verb; Ok carries the stdout JSON and the exit code (0 or 3).
fn run(cmd: Cmd) -> Result<(Json, u8), Failure> {
    match cmd {
        Cmd::ValueMember { group, value } => {
            let v: ValueGroup = load(&group)?;
            let x: Value = load(&value)?;
            Ok((json!({ "member": v.member(&x) }), 0))
        }
        Cmd::ValueClassify { group } => {
            let v: ValueGroup = load(&group)?;
            Ok((
                json!({
                    "group_like": v.is_group_like(),
                    "q_like": v.is_q_like(),
                    "declared_ring": v.declared_ring,
                }),
                0,
            ))
        }
        Cmd::ClopenOp { op, lhs, rhs } => {
            let a: ClopenSet = load(&lhs)?;
            let result = match op {
                BoolOp::Complement => a.complement(),
                _ => {
                    let b: ClopenSet = load(&rhs.ok_or_else(|| {
                        Failure::Io("this operation needs --rhs".into())
                    })?)?;
                    match op {
                        BoolOp::Union => a.union(&b),
                        BoolOp::Intersection => a.intersection(&b),
                        BoolOp::Difference => a.difference(&b),
                        BoolOp::Complement => unreachable!(),
                    }
                }
            };
            let diameter = result.diameter().ok().map(|d| format_rat(&d));
            Ok((
                json!({
                    "result": to_json(&result),
                    "measure": format_rat(&result.measure()),
                    "diameter": diameter,
                }),
                0,
            ))
        }
        Cmd::OdoApply {
            map,
            power,
            set,
            point,
        } => {
            let g = match (map, power) {
                (Some(path), None) => load::<PiecewiseMap>(&path)?,
                (None, k) => PiecewiseMap::phi_power(k.unwrap_or(1)),
                _ => unreachable!("clap forbids both"),
            };
            match (set, point) {
                (Some(path), None) => {
                    let a: ClopenSet = load(&path)?;
                    Ok((json!({ "set": to_json(&g.apply_set(&a)) }), 0))
                }
                (None, Some(path)) => {
                    let x: CantorPoint = load(&path)?;
                    Ok((json!({ "point": to_json(&g.eval(&x)) }), 0))
                }
                _ => Err(Failure::Io("need exactly one of --set or --point".into())),
            }
        }
        Cmd::OdoCompose { lhs, rhs, inverse } => {
            let g: PiecewiseMap = load(&lhs)?;
            let result = if inverse {
                g.inverse()
            } else {
                let h: PiecewiseMap = load(&rhs.ok_or_else(|| {
                    Failure::Io("need --rhs unless --inverse is given".into())
                })?)?;
                g.compose(&h)
            };
            Ok((
                json!({
                    "map": to_json(&result),
                    "identity": result.is_identity(),
                }),
                0,
            ))
        }
        Cmd::OdoOrder { map, max } => {
            let g: PiecewiseMap = load(&map)?;
            match g.order(max) {
                Some(m) => Ok((json!({ "order": m }), 0)),
                None => Ok((
                    json!({ "result": "not_found_within", "max_iter": max }),
                    3,
                )),
            }
        }
        Cmd::OdoRank { map } => {
            let g: PiecewiseMap = load(&map)?;
            Ok((
                json!({
                    "rank": g.tree_rank(),
                    "cocycle_bound": g.cocycle_bound(),
                }),
                0,
            ))
        }
        Cmd::OdoKr { depth } => {
            if !(1..=20).contains(&depth) {
                return Err(Failure::contract(
                    "invalid_input",
                    "tower depth must be between 1 and 20",
                ));
            }
            let t = KRPartition::new(depth);
            Ok((
                json!({
                    "base_depth": t.base_depth(),
                    "height": t.height(),
                    "levels": t.levels().map(|l| to_json(&l)).collect::<Vec<_>>(),
                }),
                0,
            ))
        }
        Cmd::OdoGw { mode, a, b } => {
            let sa: ClopenSet = load(&a)?;
            let sb: ClopenSet = load(&b)?;
            let g = match mode {
                GwMode::Transport => odometer::gw_transport(&sa, &sb),
                GwMode::Equivalence => odometer::gw_equivalence(&sa, &sb),
            }
            .map_err(odo_err)?;
            Ok((json!({ "map": to_json(&g) }), 0))
        }
        Cmd::OdoApprox { gamma, delta } => {
            let g: PiecewiseMap = load(&gamma)?;
            let d = parse_rat(&delta).map_err(Failure::Io)?;
            let p = odometer::gm_finite_order_approx(&g, &d).map_err(odo_err)?;
            Ok((json!({ "map": to_json(&p) }), 0))
        }
        Cmd::OdoDist { lhs, rhs } => {
            let g: PiecewiseMap = load(&lhs)?;
            let h: PiecewiseMap = load(&rhs)?;
            Ok((json!({ "distance": format_rat(&g.sup_distance(&h)) }), 0))
        }
        Cmd::AlgValidate {
            from,
            into,
            embedding,
            phi,
            psi,
        } => {
            let a: MeasuredAlgebra = load(&from)?;
            let b: MeasuredAlgebra = load(&into)?;
            let e: EmbeddingMap = load(&embedding)?;
            let verdict = match (phi, psi) {
                (Some(p), Some(q)) => {
                    let phi: Automorphism = load(&p)?;
                    let psi: Automorphism = load(&q)?;
                    phi.validate(&a).map_err(alg_err)?;
                    psi.validate(&b).map_err(alg_err)?;
                    finalg::validate_equivariant_embedding(&a, &phi, &b, &psi, &e)
                }
                _ => finalg::validate_embedding(&a, &b, &e),
            };
            Ok((
                match verdict {
                    Ok(()) => json!({ "ok": true }),
                    Err(defect) => json!({ "ok": false, "reason": defect.to_string() }),
                },
                0,
            ))
        }
        Cmd::AlgExtend { algebra, u, w } => {
            let alg: MeasuredAlgebra = load(&algebra)?;
            let u: BlockPartition = load(&u)?;
            let w: BlockPartition = load(&w)?;
            let out = finalg::extend_partial(&alg, &u, &w).map_err(alg_err)?;
            Ok((
                json!({
                    "refinement": to_json(&out.refinement),
                    "refined": to_json(&out.refined),
                    "automorphism": to_json(&out.automorphism),
                }),
                0,
            ))
        }
        Cmd::AlgJep {
            group,
            instance,
            coeff_bound,
            step_budget,
        } => {
            let v: ValueGroup = load(&group)?;
            let inst: JepInstance = load(&instance)?;
            let opts = JepOptions {
                coeff_bound,
                step_budget,
                ..JepOptions::default()
            };
            let out = finalg::jep_instance(&v, &inst, &opts).map_err(alg_err)?;
            Ok(jep_json(out))
        }
        Cmd::AlgJoint {
            a,
            alpha,
            b,
            beta,
            coeff_bound,
            step_budget,
        } => {
            let a_alg: MeasuredAlgebra = load(&a)?;
            let alpha: Automorphism = load(&alpha)?;
            let b_alg: MeasuredAlgebra = load(&b)?;
            let beta: Automorphism = load(&beta)?;
            let opts = JepOptions {
                coeff_bound,
                step_budget,
                ..JepOptions::default()
            };
            let out = finalg::joint_embed_automorphisms(&a_alg, &alpha, &b_alg, &beta, &opts)
                .map_err(alg_err)?;
            Ok(match out {
                JointOutcome::Sat(j) => (
                    json!({
                        "result": "SAT",
                        "algebra": to_json(&j.algebra),
                        "automorphism": to_json(&j.automorphism),
                        "embed_left": to_json(&j.embed_left),
                        "embed_right": to_json(&j.embed_right),
                    }),
                    0,
                ),
                JointOutcome::Unsat(reason) => {
                    (json!({ "result": "UNSAT", "reason": reason }), 0)
                }
                JointOutcome::Unknown(reason) => {
                    (json!({ "result": "UNKNOWN", "reason": reason }), 3)
                }
            })
        }
        Cmd::AlgAmalgamate {
            a,
            phi,
            b,
            psi,
            embed_b,
            c,
            theta,
            embed_c,
        } => {
            let a_alg: MeasuredAlgebra = load(&a)?;
            let phi: Automorphism = load(&phi)?;
            let b_alg: MeasuredAlgebra = load(&b)?;
            let psi: Automorphism = load(&psi)?;
            let eb: EmbeddingMap = load(&embed_b)?;
            let c_alg: MeasuredAlgebra = load(&c)?;
            let theta: Automorphism = load(&theta)?;
            let ec: EmbeddingMap = load(&embed_c)?;
            let out =
                finalg::amalgamate(&a_alg, &phi, &b_alg, &psi, &eb, &c_alg, &theta, &ec)
                    .map_err(alg_err)?;
            Ok((
                json!({
                    "algebra": to_json(&out.algebra),
                    "automorphism": to_json(&out.automorphism),
                    "embed_left": to_json(&out.embed_left),
                    "embed_right": to_json(&out.embed_right),
                }),
                0,
            ))
        }
        Cmd::AlgCycle {
            algebra,
            automorphism,
            sigma,
        } => {
            let alg: MeasuredAlgebra = load(&algebra)?;
            let g: Automorphism = load(&automorphism)?;
            g.validate(&alg).map_err(alg_err)?;
            let sigma: Vec<usize> = sigma
                .split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|e| Failure::Io(format!("bad --sigma: {e}")))?;
            let out = finalg::cycle_action(&alg, &g, &sigma).map_err(alg_err)?;
            Ok((json!({ "automorphism": to_json(&out) }), 0))
        }
        Cmd::AlgDenseHint { group } => {
            let v: ValueGroup = load(&group)?;
            match finalg::dense_class_hint(&v).map_err(alg_err)? {
                DenseHint::Yes(reason) => {
                    Ok((json!({ "result": "YES", "reason": reason }), 0))
                }
                DenseHint::No(witness) => Ok((
                    json!({ "result": "NO", "witness": to_json(&witness) }),
                    0,
                )),
                DenseHint::Unknown => Ok((json!({ "result": "UNKNOWN" }), 3)),
            }
        }
        Cmd::Gen {
            kind,
            seed,
            depth,
            cocycle_bound,
            group,
            max_atoms,
            instance_kind,
            ring_case,
            q_like,
            p_max,
            q_max,
            denom,
        } => {
            let instance_kind = if ring_case {
                InstanceKind::RingCase
            } else if q_like {
                InstanceKind::QLike
            } else {
                instance_kind
            };
            let mut rng = Rng::new(seed);
            match kind {
                GenKind::Map => {
                    if !(1..=8).contains(&depth) || cocycle_bound > 6 {
                        return Err(Failure::contract(
                            "invalid_input",
                            "gen map needs depth in 1..=8 and cocycle bound <= 6",
                        ));
                    }
                    let g = gen::random_map(&mut rng, depth, cocycle_bound);
                    Ok((to_json(&g), 0))
                }
                GenKind::Algebra => {
                    let v = match group {
                        Some(path) => load::<ValueGroup>(&path)?,
                        None => ValueGroup::dyadic(),
                    };
                    if max_atoms == 0 || max_atoms > 64 {
                        return Err(Failure::contract(
                            "invalid_input",
                            "gen algebra needs max atoms in 1..=64",
                        ));
                    }
                    let alg = gen::random_algebra(&mut rng, &v, max_atoms);
                    Ok((to_json(&alg), 0))
                }
                GenKind::Instance => {
                    if p_max == 0 || q_max == 0 || p_max > 8 || q_max > 8 {
                        return Err(Failure::contract(
                            "invalid_input",
                            "gen instance needs side sizes in 1..=8",
                        ));
                    }
                    let inst = match instance_kind {
                        InstanceKind::RingCase => {
                            let v = match group {
                                Some(path) => load::<ValueGroup>(&path)?,
                                None => ValueGroup::dyadic(),
                            };
                            if !v.declared_ring {
                                return Err(Failure::contract(
                                    "invalid_input",
                                    "ring-case generation needs a declared ring",
                                ));
                            }
                            gen::random_ring_instance(&mut rng, &v, p_max, q_max)
                        }
                        InstanceKind::QLike => {
                            if denom == 0 || denom > 1 << 20 {
                                return Err(Failure::contract(
                                    "invalid_input",
                                    "gen instance needs a positive denominator bound",
                                ));
                            }
                            gen::random_qlike_instance(&mut rng, p_max, q_max, denom)
                        }
                    };
                    Ok((to_json(&inst), 0))
                }
            }
        }
    }
}

fn jep_json(out: JepOutcome) -> (Json, u8) {
    match out {
        JepOutcome::Sat(c) => (
            json!({
                "result": "SAT",
                "witness": c.iter().map(|row| row.iter().map(to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
            }),
            0,
        ),
        JepOutcome::Unsat(reason) => (json!({ "result": "UNSAT", "reason": reason }), 0),
        JepOutcome::Unknown(reason) => (json!({ "result": "UNKNOWN", "reason": reason }), 3),
    }
}

/// Print a result without panicking when the consumer closes the pipe.
fn emit(out: &Json) {
    use std::io::Write;
    let _ = writeln!(
        std::io::stdout(),
        "{}",
        serde_json::to_string_pretty(out).expect("valid json")
    );
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok((out, code)) => {
            emit(&out);
            ExitCode::from(code)
        }
        Err(Failure::Io(detail)) => {
            eprintln!("error: {detail}");
            ExitCode::from(1)
        }
        Err(Failure::Contract { code, detail }) => {
            emit(&json!({ "error": code, "detail": detail }));
            eprintln!("precondition violation: {detail}");
            ExitCode::from(2)
        }
    }
}
