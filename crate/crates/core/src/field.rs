//! Base-field descriptors, places of ℚ, square classes and Hilbert symbols.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::arith::{self, gcd};
use crate::error::{Error, Result};

/// The supported base fields.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FieldDescriptor {
    Rational,
    Real,
    PAdic(u64),
    Finite(u64),
    AbstractTorsion(Arc<AbstractTorsion>),
}

impl FieldDescriptor {
    pub fn padic(p: u64) -> Result<Self> {
        if !arith::is_prime(p) {
            return Err(Error::domain(format!("Qp requires a prime, got {p}")));
        }
        Ok(FieldDescriptor::PAdic(p))
    }

    pub fn finite(q: u64) -> Result<Self> {
        if arith::prime_power(q).is_none() {
            return Err(Error::domain(format!("Fq requires a prime power, got {q}")));
        }
        Ok(FieldDescriptor::Finite(q))
    }

    pub fn abstract_torsion(group: AbstractTorsion) -> Self {
        FieldDescriptor::AbstractTorsion(Arc::new(group))
    }

    /// Whether square classes (and hence diagonal quadratic forms) are available.
    pub fn supports_square_classes(&self) -> bool {
        matches!(self, FieldDescriptor::Rational | FieldDescriptor::Real)
    }

    pub(crate) fn require_square_classes(&self, what: &str) -> Result<()> {
        if self.supports_square_classes() {
            Ok(())
        } else {
            Err(Error::capability(self, format!("{what} needs square classes")))
        }
    }
}

impl fmt::Display for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldDescriptor::Rational => write!(f, "Q"),
            FieldDescriptor::Real => write!(f, "R"),
            FieldDescriptor::PAdic(p) => write!(f, "Qp:{p}"),
            FieldDescriptor::Finite(q) => write!(f, "Fq:{q}"),
            FieldDescriptor::AbstractTorsion(_) => write!(f, "abstract"),
        }
    }
}

impl FromStr for FieldDescriptor {
    type Err = Error;

    /// Parses `Q`, `R`, `Qp:<p>` and `Fq:<q>`. Abstract fields are built from a declaration.
    fn from_str(s: &str) -> Result<Self> {
        let num = |t: &str| -> Result<u64> {
            t.parse()
                .map_err(|_| Error::Parse(format!("invalid field descriptor '{s}'")))
        };
        match s {
            "Q" => Ok(FieldDescriptor::Rational),
            "R" => Ok(FieldDescriptor::Real),
            _ => {
                if let Some(p) = s.strip_prefix("Qp:") {
                    FieldDescriptor::padic(num(p)?)
                } else if let Some(q) = s.strip_prefix("Fq:") {
                    FieldDescriptor::finite(num(q)?)
                } else {
                    Err(Error::Parse(format!("invalid field descriptor '{s}'")))
                }
            }
        }
    }
}

/// A user-declared finite abelian Brauer group `⊕ ℤ/order_i`, standing in for fields
/// whose Brauer group is not computable here.
///
/// Relations are recorded for documentation and must already vanish modulo the
/// declared orders. Indexes default to the period unless declared per element.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AbstractTorsion {
    generators: Vec<String>,
    orders: Vec<u64>,
    relations: Vec<Vec<i64>>,
    indexes: BTreeMap<Vec<u64>, u64>,
}

impl AbstractTorsion {
    pub fn new(
        generators: Vec<(String, u64)>,
        relations: Vec<Vec<i64>>,
        declared_indexes: Vec<(Vec<i64>, u64)>,
    ) -> Result<Self> {
        let (names, orders): (Vec<String>, Vec<u64>) = generators.into_iter().unzip();
        if let Some(o) = orders.iter().find(|&&o| o == 0) {
            return Err(Error::domain(format!("generator order must be >= 1, got {o}")));
        }
        for rel in &relations {
            if rel.len() != orders.len() {
                return Err(Error::domain("relation length differs from generator count"));
            }
            let trivial = rel
                .iter()
                .zip(&orders)
                .all(|(&c, &o)| (c as i128).rem_euclid(o as i128) == 0);
            if !trivial {
                return Err(Error::domain(format!(
                    "relation {rel:?} is not the identity under the declared orders"
                )));
            }
        }
        let mut group = AbstractTorsion {
            generators: names,
            orders,
            relations,
            indexes: BTreeMap::new(),
        };
        for (exps, index) in declared_indexes {
            let exps = group.reduce(&exps)?;
            let period = group.period(&exps);
            if index == 0 || index % period != 0 {
                return Err(Error::domain(format!(
                    "declared index {index} of {exps:?} is not a multiple of its period {period}"
                )));
            }
            if arith::prime_divisors(index) != arith::prime_divisors(period) {
                return Err(Error::domain(format!(
                    "declared index {index} of {exps:?} has prime factors other than those of its period {period}"
                )));
            }
            group.indexes.insert(exps, index);
        }
        Ok(group)
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    /// Reduces an integer exponent vector modulo the generator orders.
    pub fn reduce(&self, exps: &[i64]) -> Result<Vec<u64>> {
        if exps.len() != self.orders.len() {
            return Err(Error::domain(format!(
                "exponent vector has length {} but the group has {} generators",
                exps.len(),
                self.orders.len()
            )));
        }
        Ok(exps
            .iter()
            .zip(&self.orders)
            .map(|(&e, &o)| (e as i128).rem_euclid(o as i128) as u64)
            .collect())
    }

    pub(crate) fn period(&self, exps: &[u64]) -> u64 {
        exps.iter()
            .zip(&self.orders)
            .map(|(&e, &o)| o / gcd(e, o))
            .fold(1, |acc, x| acc / gcd(acc, x) * x)
    }

    pub(crate) fn index(&self, exps: &[u64]) -> u64 {
        self.indexes
            .get(exps)
            .copied()
            .unwrap_or_else(|| self.period(exps))
    }

    /// Parses the declaration file format:
    /// `{"generators":[{"name":"x","order":2}],"relations":[[2]],"indexes":[{"exps":[1],"index":2}]}`.
    pub fn from_json(value: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("abstract field declaration: {m}"));
        let gens = value
            .get("generators")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing 'generators' array"))?;
        let mut generators = Vec::with_capacity(gens.len());
        for (i, g) in gens.iter().enumerate() {
            let name = g
                .get("name")
                .and_then(Value::as_str)
                .map(str::to_owned)
                .unwrap_or_else(|| format!("g{i}"));
            let order = g
                .get("order")
                .and_then(Value::as_u64)
                .ok_or_else(|| bad("generator without integer 'order'"))?;
            generators.push((name, order));
        }
        let int_vec = |v: &Value| -> Result<Vec<i64>> {
            v.as_array()
                .ok_or_else(|| bad("expected an integer array"))?
                .iter()
                .map(|x| x.as_i64().ok_or_else(|| bad("expected an integer")))
                .collect()
        };
        let relations = match value.get("relations") {
            None => Vec::new(),
            Some(rs) => rs
                .as_array()
                .ok_or_else(|| bad("'relations' must be an array"))?
                .iter()
                .map(int_vec)
                .collect::<Result<_>>()?,
        };
        let mut indexes = Vec::new();
        if let Some(ix) = value.get("indexes") {
            for entry in ix.as_array().ok_or_else(|| bad("'indexes' must be an array"))? {
                let exps = int_vec(entry.get("exps").ok_or_else(|| bad("index entry without 'exps'"))?)?;
                let index = entry
                    .get("index")
                    .and_then(Value::as_u64)
                    .ok_or_else(|| bad("index entry without integer 'index'"))?;
                indexes.push((exps, index));
            }
        }
        AbstractTorsion::new(generators, relations, indexes)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "generators": self.generators.iter().zip(&self.orders)
                .map(|(n, o)| json!({"name": n, "order": o})).collect::<Vec<_>>(),
            "relations": self.relations,
            "indexes": self.indexes.iter()
                .map(|(e, i)| json!({"exps": e, "index": i})).collect::<Vec<_>>(),
        })
    }
}

/// A place of ℚ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    RealPlace,
    FinitePrime(u64),
}

impl Place {
    pub fn prime(p: u64) -> Result<Self> {
        if arith::is_prime(p) {
            Ok(Place::FinitePrime(p))
        } else {
            Err(Error::domain(format!("place {p} is not a prime")))
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::RealPlace => write!(f, "oo"),
            Place::FinitePrime(p) => write!(f, "{p}"),
        }
    }
}

impl FromStr for Place {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "oo" || s == "inf" {
            return Ok(Place::RealPlace);
        }
        let p: u64 = s
            .parse()
            .map_err(|_| Error::Parse(format!("invalid place '{s}'")))?;
        Place::prime(p)
    }
}

/// A nonzero square class: a sign together with the set of primes of odd valuation.
///
/// Over ℝ only the sign is retained. The class of `x` is represented by the unique
/// square-free integer `±p1⋯pk` in `x·(k^×)²`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SquareClass {
    negative: bool,
    primes: Vec<u64>,
}

impl SquareClass {
    pub const ONE: SquareClass = SquareClass {
        negative: false,
        primes: Vec::new(),
    };

    pub fn minus_one() -> Self {
        SquareClass {
            negative: true,
            primes: Vec::new(),
        }
    }

    /// Square class of the integer `n` over `field`.
    pub fn from_int(n: i64, field: &FieldDescriptor) -> Result<Self> {
        squareclass_normalize(n as i128, 1, field)
    }

    pub fn is_one(&self) -> bool {
        !self.negative && self.primes.is_empty()
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn mul(&self, other: &SquareClass) -> SquareClass {
        let a: BTreeSet<u64> = self.primes.iter().copied().collect();
        let b: BTreeSet<u64> = other.primes.iter().copied().collect();
        SquareClass {
            negative: self.negative != other.negative,
            primes: a.symmetric_difference(&b).copied().collect(),
        }
    }

    pub fn neg(&self) -> SquareClass {
        SquareClass {
            negative: !self.negative,
            primes: self.primes.clone(),
        }
    }

    /// The square-free integer representative.
    pub fn representative(&self) -> BigInt {
        let mag = self
            .primes
            .iter()
            .fold(BigInt::from(1u8), |acc, &p| acc * BigInt::from(p));
        if self.negative {
            -mag
        } else {
            mag
        }
    }

    /// Representative modulo `m` (nonnegative residue).
    fn residue(&self, m: u64) -> u64 {
        let mag = self
            .primes
            .iter()
            .fold(1u64 % m, |acc, &p| arith::mul_mod(acc, p % m, m));
        if self.negative {
            (m - mag) % m
        } else {
            mag
        }
    }

    /// Splits off `p`: returns `(valuation, unit part)`.
    fn split_at(&self, p: u64) -> (bool, SquareClass) {
        match self.primes.binary_search(&p) {
            Ok(i) => {
                let mut primes = self.primes.clone();
                primes.remove(i);
                (
                    true,
                    SquareClass {
                        negative: self.negative,
                        primes,
                    },
                )
            }
            Err(_) => (false, self.clone()),
        }
    }

    /// Whether this class is a square in the completion at `v`.
    pub fn is_local_square(&self, v: Place) -> bool {
        match v {
            Place::RealPlace => !self.negative,
            Place::FinitePrime(2) => !self.primes.contains(&2) && self.residue(8) == 1,
            Place::FinitePrime(p) => {
                !self.primes.contains(&p) && arith::legendre(self.residue(p) as i64, p) == 1
            }
        }
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.representative())
    }
}

/// Square-free representative of `num/den · (k^×)²`.
pub fn squareclass_normalize(num: i128, den: u64, field: &FieldDescriptor) -> Result<SquareClass> {
    field.require_square_classes("square class normalization")?;
    if num == 0 || den == 0 {
        return Err(Error::domain("square class of zero is undefined"));
    }
    let negative = num < 0;
    if *field == FieldDescriptor::Real {
        return Ok(SquareClass {
            negative,
            primes: Vec::new(),
        });
    }
    let mag = num.unsigned_abs();
    if mag > u64::MAX as u128 {
        return Err(Error::Overflow("square class normalization"));
    }
    let mut odd = BTreeSet::new();
    for (p, e) in arith::factor(mag as u64).into_iter().chain(arith::factor(den)) {
        if e % 2 == 1 && !odd.remove(&p) {
            odd.insert(p);
        }
    }
    Ok(SquareClass {
        negative,
        primes: odd.into_iter().collect(),
    })
}

/// Parses `"n"` or `"n/d"` into a square class.
pub fn parse_square_class(s: &str, field: &FieldDescriptor) -> Result<SquareClass> {
    let bad = || Error::Parse(format!("invalid nonzero rational '{s}'"));
    let (n, d) = match s.trim().split_once('/') {
        Some((n, d)) => (
            n.trim().parse::<i128>().map_err(|_| bad())?,
            d.trim().parse::<u64>().map_err(|_| bad())?,
        ),
        None => (s.trim().parse::<i128>().map_err(|_| bad())?, 1),
    };
    squareclass_normalize(n, d, field)
}

/// The places at which the symbol `(a, b)` can be nontrivial.
pub fn relevant_places(a: &SquareClass, b: &SquareClass) -> Vec<Place> {
    let mut primes: BTreeSet<u64> = a.primes.iter().chain(&b.primes).copied().collect();
    primes.insert(2);
    std::iter::once(Place::RealPlace)
        .chain(primes.into_iter().map(Place::FinitePrime))
        .collect()
}

/// The local Hilbert symbol `(a, b)_v` over ℚ.
pub fn hilbert_symbol(field: &FieldDescriptor, a: &SquareClass, b: &SquareClass, v: Place) -> Result<i8> {
    if *field != FieldDescriptor::Rational {
        return Err(Error::capability(field, "Hilbert symbols are computed over Q only"));
    }
    if let Place::FinitePrime(p) = v {
        if !arith::is_prime(p) {
            return Err(Error::domain(format!("place {p} is not a prime")));
        }
    }
    Ok(hilbert_local(a, b, v))
}

pub(crate) fn hilbert_local(a: &SquareClass, b: &SquareClass, v: Place) -> i8 {
    match v {
        Place::RealPlace => {
            if a.negative && b.negative {
                -1
            } else {
                1
            }
        }
        Place::FinitePrime(2) => {
            let (alpha, u) = a.split_at(2);
            let (beta, w) = b.split_at(2);
            let (u, w) = (u.residue(8), w.residue(8));
            let eps = |x: u64| ((x + 8 - 1) / 2) % 2;
            let omega = |x: u64| ((x * x - 1) / 8) % 2;
            let mut e = eps(u) * eps(w);
            if alpha {
                e += omega(w);
            }
            if beta {
                e += omega(u);
            }
            if e % 2 == 0 {
                1
            } else {
                -1
            }
        }
        Place::FinitePrime(p) => {
            let (alpha, u) = a.split_at(p);
            let (beta, w) = b.split_at(p);
            let mut s: i8 = 1;
            if alpha && beta && ((p - 1) / 2) % 2 == 1 {
                s = -s;
            }
            if beta {
                s *= arith::legendre(u.residue(p) as i64, p);
            }
            if alpha {
                s *= arith::legendre(w.residue(p) as i64, p);
            }
            s
        }
    }
}
