//! Finitely generated value sets V in the unit interval, with exact
//! membership and order.
//!
//! A [`Value`] is a formal Q-linear combination of the rational unit and a
//! finite set of named irrational symbols. Symbols are declared Q-linearly
//! independent from 1 and from each other; all correctness claims are
//! conditional on that declaration. Each symbol carries a rational
//! enclosure, which is the only bridge to the real line: ordering is decided
//! by interval arithmetic over enclosures and fails loudly (never guesses)
//! when the enclosures are too wide.

use crate::lattice::{self, SolveRing};
use crate::rat::{format_rat, parse_rat, rat, strip_m_part, Rat};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ValueSetError {
    /// Enclosures too wide to determine a nonzero sign; supply tighter ones.
    #[error("precision exhausted comparing {lhs} and {rhs}")]
    PrecisionExhausted { lhs: String, rhs: String },
    #[error("unknown symbol {0:?}")]
    UnknownSymbol(String),
    #[error("invalid value group: {0}")]
    InvalidGroup(String),
}

/// A named positive irrational in (0,1), known only through an enclosure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IrrationalSymbol {
    pub name: String,
    pub lo: Rat,
    pub hi: Rat,
}

impl IrrationalSymbol {
    pub fn new(name: &str, lo: Rat, hi: Rat) -> Result<Self, ValueSetError> {
        if !(lo.is_positive() && lo < hi && hi <= Rat::one()) {
            return Err(ValueSetError::InvalidGroup(format!(
                "symbol {name:?} needs 0 < lo < hi <= 1, got [{}, {}]",
                format_rat(&lo),
                format_rat(&hi)
            )));
        }
        Ok(IrrationalSymbol {
            name: name.to_string(),
            lo,
            hi,
        })
    }

    /// 1/pi with a 20-digit enclosure.
    pub fn inv_pi() -> Self {
        IrrationalSymbol {
            name: "inv_pi".to_string(),
            lo: Rat::new(
                "31830988618379067153".parse::<BigInt>().unwrap(),
                BigInt::from(10u8).pow(20),
            ),
            hi: Rat::new(
                "31830988618379067154".parse::<BigInt>().unwrap(),
                BigInt::from(10u8).pow(20),
            ),
        }
    }
}

/// Exact element of the Q-span of {1} and the declared symbols.
///
/// Canonical form: the symbol map carries no zero coefficients, so equality
/// is coordinate-wise (sound by the declared independence).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Value {
    rational: Rat,
    symbols: BTreeMap<String, Rat>,
}

impl Value {
    pub fn from_rat(r: Rat) -> Self {
        Value {
            rational: r,
            symbols: BTreeMap::new(),
        }
    }

    pub fn zero() -> Self {
        Value::default()
    }

    pub fn one() -> Self {
        Value::from_rat(Rat::one())
    }

    pub fn symbol(name: &str) -> Self {
        let mut symbols = BTreeMap::new();
        symbols.insert(name.to_string(), Rat::one());
        Value {
            rational: Rat::zero(),
            symbols,
        }
    }

    pub fn with_coeff(name: &str, c: Rat) -> Self {
        let mut v = Value::zero();
        v.add_symbol(name, c);
        v
    }

    fn add_symbol(&mut self, name: &str, c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.symbols.entry(name.to_string()).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.symbols.remove(name);
        }
    }

    pub fn rational_part(&self) -> &Rat {
        &self.rational
    }

    pub fn symbol_coeffs(&self) -> &BTreeMap<String, Rat> {
        &self.symbols
    }

    pub fn is_rational(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.symbols.is_empty()
    }

    pub fn add(&self, other: &Value) -> Value {
        let mut out = self.clone();
        out.rational += &other.rational;
        for (name, c) in &other.symbols {
            out.add_symbol(name, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Value) -> Value {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Value {
        Value {
            rational: -self.rational.clone(),
            symbols: self
                .symbols
                .iter()
                .map(|(n, c)| (n.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, r: &Rat) -> Value {
        if r.is_zero() {
            return Value::zero();
        }
        Value {
            rational: &self.rational * r,
            symbols: self
                .symbols
                .iter()
                .map(|(n, c)| (n.clone(), c * r))
                .collect(),
        }
    }

    pub fn div_int(&self, n: u64) -> Value {
        self.scale(&rat(1, n as i64))
    }

    /// Product, when representable: at most one factor may carry symbols.
    pub fn try_mul(&self, other: &Value) -> Option<Value> {
        if !self.symbols.is_empty() && !other.symbols.is_empty() {
            return None;
        }
        if self.symbols.is_empty() {
            Some(other.scale(&self.rational))
        } else {
            Some(self.scale(&other.rational))
        }
    }

    pub fn sum<'a>(vals: impl IntoIterator<Item = &'a Value>) -> Value {
        vals.into_iter().fold(Value::zero(), |acc, v| acc.add(v))
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.rational.is_zero() || self.symbols.is_empty() {
            parts.push(format_rat(&self.rational));
        }
        for (name, c) in &self.symbols {
            if c.is_one() {
                parts.push(name.clone());
            } else {
                parts.push(format!("{}*{}", format_rat(c), name));
            }
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Scalar ring of a value group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ring {
    Integers,
    IntegersInverting(u64),
    Rationals,
}

/// A finitely generated module of reals, presented by generators in (0,1].
#[derive(Clone, Debug, PartialEq)]
pub struct ValueGroup {
    pub ring: Ring,
    pub generators: Vec<Value>,
    pub symbols: Vec<IrrationalSymbol>,
    pub declared_ring: bool,
}

impl ValueGroup {
    pub fn new(
        ring: Ring,
        generators: Vec<Value>,
        symbols: Vec<IrrationalSymbol>,
        declared_ring: bool,
    ) -> Result<Self, ValueSetError> {
        if let Ring::IntegersInverting(m) = ring {
            if m < 2 {
                return Err(ValueSetError::InvalidGroup(
                    "inverted base must be >= 2".into(),
                ));
            }
        }
        let mut names = std::collections::BTreeSet::new();
        for s in &symbols {
            IrrationalSymbol::new(&s.name, s.lo.clone(), s.hi.clone())?;
            if !names.insert(s.name.clone()) {
                return Err(ValueSetError::InvalidGroup(format!(
                    "duplicate symbol {:?}",
                    s.name
                )));
            }
        }
        let vg = ValueGroup {
            ring,
            generators,
            symbols,
            declared_ring,
        };
        for g in &vg.generators {
            for name in g.symbols.keys() {
                if !names.contains(name) {
                    return Err(ValueSetError::UnknownSymbol(name.clone()));
                }
            }
            let (lo, hi) = vg.enclosure(g)?;
            if !(lo.is_positive() && hi <= Rat::one()) {
                return Err(ValueSetError::InvalidGroup(format!(
                    "generator {g} not certified inside (0, 1]"
                )));
            }
        }
        if vg.declared_ring {
            for (i, a) in vg.generators.iter().enumerate() {
                for b in &vg.generators[i..] {
                    let Some(p) = a.try_mul(b) else {
                        return Err(ValueSetError::InvalidGroup(format!(
                            "declared ring, but the product {a} * {b} is not representable"
                        )));
                    };
                    if !vg.member(&p) {
                        return Err(ValueSetError::InvalidGroup(format!(
                            "declared ring, but {a} * {b} is not a member"
                        )));
                    }
                }
            }
        }
        Ok(vg)
    }

    /// The dyadic rationals: Z[1/2], generated by the unit, a ring.
    pub fn dyadic() -> Self {
        ValueGroup::new(
            Ring::IntegersInverting(2),
            vec![Value::one()],
            vec![],
            true,
        )
        .unwrap()
    }

    /// All rationals of the unit interval: the module over Q, a ring.
    pub fn rational_module() -> Self {
        ValueGroup::new(Ring::Rationals, vec![Value::one()], vec![], true).unwrap()
    }

    /// Q-like module containing 1/pi: the Q-span of {1, 1/pi}.
    pub fn q_like_inv_pi() -> Self {
        ValueGroup::new(
            Ring::Rationals,
            vec![Value::symbol("inv_pi")],
            vec![IrrationalSymbol::inv_pi()],
            false,
        )
        .unwrap()
    }

    /// The Z-module generated by 1/2 and 1/pi (and the unit).
    pub fn span_half_inv_pi() -> Self {
        ValueGroup::new(
            Ring::Integers,
            vec![Value::from_rat(rat(1, 2)), Value::symbol("inv_pi")],
            vec![IrrationalSymbol::inv_pi()],
            false,
        )
        .unwrap()
    }

    fn symbol_named(&self, name: &str) -> Result<&IrrationalSymbol, ValueSetError> {
        self.symbols
            .iter()
            .find(|s| s.name == name)
            .ok_or_else(|| ValueSetError::UnknownSymbol(name.to_string()))
    }

    /// Certified rational enclosure of a value, via the symbol enclosures.
    pub fn enclosure(&self, v: &Value) -> Result<(Rat, Rat), ValueSetError> {
        let mut lo = v.rational.clone();
        let mut hi = v.rational.clone();
        for (name, c) in &v.symbols {
            let s = self.symbol_named(name)?;
            if c.is_positive() {
                lo += c * &s.lo;
                hi += c * &s.hi;
            } else {
                lo += c * &s.hi;
                hi += c * &s.lo;
            }
        }
        Ok((lo, hi))
    }

    /// Exact membership in the module spanned by the generators and the unit.
    pub fn member(&self, v: &Value) -> bool {
        // scalar fast path: a rational value against rational generators is
        // a one-row system, and its Smith form is a gcd
        if v.is_rational() && self.generators.iter().all(Value::is_rational) {
            return self.member_rational(&v.rational);
        }
        // basis coordinates: unit first, then every declared symbol
        let mut basis: Vec<Option<&str>> = vec![None];
        basis.extend(self.symbols.iter().map(|s| Some(s.name.as_str())));
        let coord = |val: &Value, b: &Option<&str>| -> Rat {
            match b {
                None => val.rational.clone(),
                Some(name) => val.symbols.get(*name).cloned().unwrap_or_else(Rat::zero),
            }
        };
        // a symbol outside the declared list can never be matched
        for name in v.symbols.keys() {
            if self.symbols.iter().all(|s| &s.name != name) {
                return false;
            }
        }
        let mut cols: Vec<Value> = vec![Value::one()];
        cols.extend(self.generators.iter().cloned());
        let a: Vec<Vec<Rat>> = basis
            .iter()
            .map(|b| cols.iter().map(|g| coord(g, b)).collect())
            .collect();
        let b: Vec<Rat> = basis.iter().map(|bb| coord(v, bb)).collect();
        let (ai, bi) = lattice::clear_denominators(&a, &b);
        let ring = match &self.ring {
            Ring::Integers => SolveRing::Integers,
            Ring::IntegersInverting(m) => SolveRing::IntegersInverting(BigInt::from(*m)),
            Ring::Rationals => SolveRing::Rationals,
        };
        lattice::solve(&ai, &bi, &ring).is_some()
    }

    fn member_rational(&self, b: &Rat) -> bool {
        use num_integer::Integer as _;
        if self.ring == Ring::Rationals {
            return true; // the unit spans everything rational over Q
        }
        let mut denom_lcm = b.denom().clone();
        for g in &self.generators {
            denom_lcm = denom_lcm.lcm(g.rational.denom());
        }
        let mut d = &denom_lcm / b.denom() * b.numer();
        d = d.abs();
        let mut g_all = denom_lcm.clone(); // the unit's cleared coordinate
        for g in &self.generators {
            g_all = g_all.gcd(&(&denom_lcm / g.rational.denom() * g.rational.numer()));
        }
        if d.is_zero() {
            return true;
        }
        match &self.ring {
            Ring::Integers => (d % g_all).is_zero(),
            Ring::IntegersInverting(m) => {
                let core = strip_m_part(&g_all, &BigInt::from(*m));
                (d % core).is_zero()
            }
            Ring::Rationals => unreachable!(),
        }
    }

    /// Exact order on values; errors if the enclosures cannot separate them.
    pub fn compare(&self, v: &Value, w: &Value) -> Result<Ordering, ValueSetError> {
        if v == w {
            return Ok(Ordering::Equal);
        }
        let d = v.sub(w);
        if d.is_rational() {
            return Ok(d.rational.cmp(&Rat::zero()));
        }
        let (lo, hi) = self.enclosure(&d)?;
        if lo.is_positive() {
            Ok(Ordering::Greater)
        } else if hi.is_negative() {
            Ok(Ordering::Less)
        } else {
            Err(ValueSetError::PrecisionExhausted {
                lhs: v.to_string(),
                rhs: w.to_string(),
            })
        }
    }

    pub fn is_positive(&self, v: &Value) -> Result<bool, ValueSetError> {
        Ok(self.compare(v, &Value::zero())? == Ordering::Greater)
    }

    /// Dense in R? Closed form: a non-integer scalar ring, or an irrational
    /// generator, makes the module dense; otherwise it is cyclic inside Q.
    pub fn is_group_like(&self) -> bool {
        match self.ring {
            Ring::Integers => self.generators.iter().any(|g| !g.symbols.is_empty()),
            _ => true,
        }
    }

    /// Closed under division by every positive integer, by representation.
    pub fn is_q_like(&self) -> bool {
        self.ring == Ring::Rationals
    }
}

// ---------------------------------------------------------------------------
// wire format

#[derive(Serialize, Deserialize)]
struct ValueWire {
    rational: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    symbols: BTreeMap<String, String>,
}

impl Serialize for Value {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ValueWire {
            rational: format_rat(&self.rational),
            symbols: self
                .symbols
                .iter()
                .map(|(n, c)| (n.clone(), format_rat(c)))
                .collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let w = ValueWire::deserialize(de)?;
        let mut v = Value::from_rat(parse_rat(&w.rational).map_err(D::Error::custom)?);
        for (name, c) in &w.symbols {
            v.add_symbol(name, parse_rat(c).map_err(D::Error::custom)?);
        }
        Ok(v)
    }
}

#[derive(Serialize, Deserialize)]
struct SymbolWire {
    name: String,
    lo: String,
    hi: String,
}

#[derive(Serialize, Deserialize)]
struct ValueGroupWire {
    ring: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    m: Option<u64>,
    generators: Vec<Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    symbols: Vec<SymbolWire>,
    declared_ring: bool,
}

impl Serialize for ValueGroup {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let (ring, m) = match &self.ring {
            Ring::Integers => ("Z".to_string(), None),
            Ring::IntegersInverting(m) => (format!("Z[1/{m}]"), Some(*m)),
            Ring::Rationals => ("Q".to_string(), None),
        };
        ValueGroupWire {
            ring,
            m,
            generators: self.generators.clone(),
            symbols: self
                .symbols
                .iter()
                .map(|s| SymbolWire {
                    name: s.name.clone(),
                    lo: format_rat(&s.lo),
                    hi: format_rat(&s.hi),
                })
                .collect(),
            declared_ring: self.declared_ring,
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for ValueGroup {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let w = ValueGroupWire::deserialize(de)?;
        let ring = if w.ring == "Z" {
            Ring::Integers
        } else if w.ring == "Q" {
            Ring::Rationals
        } else if w.ring.starts_with("Z[1/") && w.ring.ends_with(']') {
            let m: u64 = w.ring[4..w.ring.len() - 1]
                .parse()
                .map_err(|_| D::Error::custom(format!("bad ring tag {:?}", w.ring)))?;
            if let Some(decl) = w.m {
                if decl != m {
                    return Err(D::Error::custom("ring tag and m field disagree"));
                }
            }
            Ring::IntegersInverting(m)
        } else {
            return Err(D::Error::custom(format!("bad ring tag {:?}", w.ring)));
        };
        let mut symbols = Vec::new();
        for s in &w.symbols {
            symbols.push(
                IrrationalSymbol::new(
                    &s.name,
                    parse_rat(&s.lo).map_err(D::Error::custom)?,
                    parse_rat(&s.hi).map_err(D::Error::custom)?,
                )
                .map_err(D::Error::custom)?,
            );
        }
        ValueGroup::new(ring, w.generators, symbols, w.declared_ring).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat_int;

    fn inv_pi() -> Value {
        Value::symbol("inv_pi")
    }

    #[test]
    fn unit_is_always_member() {
        for v in [
            ValueGroup::dyadic(),
            ValueGroup::rational_module(),
            ValueGroup::q_like_inv_pi(),
            ValueGroup::span_half_inv_pi(),
        ] {
            assert!(v.member(&Value::one()));
        }
    }

    #[test]
    fn half_inv_pi_rejects_half_of_inv_pi() {
        let v = ValueGroup::span_half_inv_pi();
        let candidate = inv_pi().div_int(2); // 1/(2 pi)
        assert!(!v.member(&candidate));
        assert!(v.member(&inv_pi()));
        assert!(v.member(&Value::one().sub(&inv_pi())));
    }

    /// Brute-force oracle for the dyadics: k/2^n with n <= 8.
    fn dyadic_oracle(r: &Rat) -> bool {
        for n in 0..=8u32 {
            let scaled = r * Rat::from_integer(BigInt::one() << n);
            if scaled.denom().is_one() {
                return true;
            }
        }
        false
    }

    #[test]
    fn dyadic_membership_matches_oracle() {
        let v = ValueGroup::dyadic();
        for p in -40i64..=40 {
            for q in 1i64..=40 {
                let r = rat(p, q);
                assert_eq!(
                    v.member(&Value::from_rat(r.clone())),
                    dyadic_oracle(&r),
                    "at {p}/{q}"
                );
            }
        }
        assert!(v.member(&Value::from_rat(rat(3, 8))));
        assert!(!v.member(&Value::from_rat(rat(1, 3))));
    }

    #[test]
    fn membership_closed_under_module_ops() {
        let vg = ValueGroup::span_half_inv_pi();
        let members = [
            Value::one(),
            Value::from_rat(rat(1, 2)),
            inv_pi(),
            Value::from_rat(rat(3, 2)).sub(&inv_pi()),
        ];
        for a in &members {
            assert!(vg.member(a));
            assert!(vg.member(&a.neg()));
            for b in &members {
                assert!(vg.member(&a.add(b)));
                assert!(vg.member(&a.sub(b)));
            }
            // integer scalars act on the Z-module
            assert!(vg.member(&a.scale(&rat_int(7))));
            assert!(!matches!(vg.ring, Ring::Rationals));
        }
    }

    #[test]
    fn rational_ring_membership_divides() {
        let vg = ValueGroup::rational_module();
        let v = Value::from_rat(rat(5, 7));
        for n in 1..=20u64 {
            assert!(vg.member(&v.div_int(n)));
        }
    }

    #[test]
    fn compare_examples() {
        let vg = ValueGroup::span_half_inv_pi();
        let half = Value::from_rat(rat(1, 2));
        assert_eq!(vg.compare(&half, &half).unwrap(), Ordering::Equal);
        // 1/pi < 1/3
        assert_eq!(
            vg.compare(&inv_pi(), &Value::from_rat(rat(1, 3))).unwrap(),
            Ordering::Less
        );
        // 1/2 + 1/pi < 1
        assert_eq!(
            vg.compare(&half.add(&inv_pi()), &Value::one()).unwrap(),
            Ordering::Less
        );
    }

    #[test]
    fn compare_with_coarse_enclosure() {
        // enclosure [0.31830, 0.31831] still separates 1/pi from 1/3
        let sym = IrrationalSymbol::new("inv_pi", rat(31830, 100000), rat(31831, 100000)).unwrap();
        let vg = ValueGroup::new(
            Ring::Integers,
            vec![Value::from_rat(rat(1, 2)), Value::symbol("inv_pi")],
            vec![sym],
            false,
        )
        .unwrap();
        assert_eq!(
            vg.compare(&inv_pi(), &Value::from_rat(rat(1, 3))).unwrap(),
            Ordering::Less
        );
        // but cannot separate 1/pi from a point inside the enclosure
        let inside = Value::from_rat(rat(318305, 1000000));
        assert!(matches!(
            vg.compare(&inv_pi(), &inside),
            Err(ValueSetError::PrecisionExhausted { .. })
        ));
    }

    #[test]
    fn compare_is_total_order_on_samples() {
        let vg = ValueGroup::span_half_inv_pi();
        let mut vals = Vec::new();
        for a in -2i64..=2 {
            for b in -2i64..=2 {
                for c in -1i64..=1 {
                    vals.push(
                        Value::from_rat(rat(a, 2))
                            .add(&inv_pi().scale(&rat_int(c)))
                            .add(&Value::from_rat(rat_int(b))),
                    );
                }
            }
        }
        let n = vals.len();
        let mut ord = vec![Ordering::Equal; n * n];
        for (i, x) in vals.iter().enumerate() {
            for (j, y) in vals.iter().enumerate() {
                ord[i * n + j] = vg.compare(x, y).unwrap();
            }
        }
        for i in 0..n {
            for j in 0..n {
                assert_eq!(ord[i * n + j], ord[j * n + i].reverse());
                for k in 0..n {
                    if ord[i * n + j] != Ordering::Greater && ord[j * n + k] != Ordering::Greater
                    {
                        assert_ne!(ord[i * n + k], Ordering::Greater);
                    }
                }
            }
        }
    }

    #[test]
    fn classification_of_named_modules() {
        let dy = ValueGroup::dyadic();
        assert!(dy.is_group_like() && !dy.is_q_like());

        let q = ValueGroup::rational_module();
        assert!(q.is_group_like() && q.is_q_like());

        let qpi = ValueGroup::q_like_inv_pi();
        assert!(qpi.is_group_like() && qpi.is_q_like());

        let hp = ValueGroup::span_half_inv_pi();
        assert!(hp.is_group_like() && !hp.is_q_like());

        // the cyclic module (1/2)Z over the integers is not dense
        let cyclic = ValueGroup::new(
            Ring::Integers,
            vec![Value::from_rat(rat(1, 2))],
            vec![],
            false,
        )
        .unwrap();
        assert!(!cyclic.is_group_like());
    }

    #[test]
    fn declared_ring_rejects_symbol_products() {
        let err = ValueGroup::new(
            Ring::Integers,
            vec![Value::from_rat(rat(1, 2)), Value::symbol("inv_pi")],
            vec![IrrationalSymbol::inv_pi()],
            true,
        );
        assert!(matches!(err, Err(ValueSetError::InvalidGroup(_))));
    }

    #[test]
    fn generators_must_sit_inside_unit_interval() {
        let err = ValueGroup::new(
            Ring::Integers,
            vec![Value::from_rat(rat(3, 2))],
            vec![],
            false,
        );
        assert!(err.is_err());
        let err = ValueGroup::new(
            Ring::Integers,
            vec![Value::from_rat(rat(-1, 2))],
            vec![],
            false,
        );
        assert!(err.is_err());
    }

    #[test]
    fn value_json_round_trip() {
        let v = Value::from_rat(rat(1, 2)).add(&inv_pi().scale(&rat(-2, 3)));
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"{"rational":"1/2","symbols":{"inv_pi":"-2/3"}}"#);
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);

        let vg = ValueGroup::dyadic();
        let s = serde_json::to_string(&vg).unwrap();
        let back: ValueGroup = serde_json::from_str(&s).unwrap();
        assert_eq!(back, vg);
        let vg = ValueGroup::span_half_inv_pi();
        let back: ValueGroup =
            serde_json::from_str(&serde_json::to_string(&vg).unwrap()).unwrap();
        assert_eq!(back, vg);
    }
}
