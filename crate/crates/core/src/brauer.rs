//! Exact Brauer classes for each supported base field.
//!
//! Over ℚ a class is its finite family of local invariants (Hasse invariants),
//! kept sparse with zero entries dropped and the places in ascending order
//! (the real place first). The invariants always sum to zero in ℚ/ℤ and the
//! real invariant lies in `{0, 1/2}`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::arith::{self, checked_lcm, QmodZ};
use crate::error::{Error, Result};
use crate::field::{AbstractTorsion, FieldDescriptor, Place};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BrauerClass {
    Rational(BTreeMap<Place, QmodZ>),
    Real(bool),
    PAdic { p: u64, inv: QmodZ },
    Finite { q: u64 },
    AbstractTorsion { group: Arc<AbstractTorsion>, exps: Vec<u64> },
}

impl BrauerClass {
    /// The neutral class `[k]`.
    pub fn zero(field: &FieldDescriptor) -> Self {
        match field {
            FieldDescriptor::Rational => BrauerClass::Rational(BTreeMap::new()),
            FieldDescriptor::Real => BrauerClass::Real(false),
            FieldDescriptor::PAdic(p) => BrauerClass::PAdic {
                p: *p,
                inv: QmodZ::ZERO,
            },
            FieldDescriptor::Finite(q) => BrauerClass::Finite { q: *q },
            FieldDescriptor::AbstractTorsion(g) => BrauerClass::AbstractTorsion {
                group: g.clone(),
                exps: vec![0; g.rank()],
            },
        }
    }

    /// Builds a class over ℚ from local invariants, validating the reciprocity law.
    pub fn rational<I>(invariants: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Place, QmodZ)>,
    {
        let mut map: BTreeMap<Place, QmodZ> = BTreeMap::new();
        for (place, inv) in invariants {
            if let Place::FinitePrime(p) = place {
                if !arith::is_prime(p) {
                    return Err(Error::domain(format!("place {p} is not a prime")));
                }
            }
            let slot = map.entry(place).or_insert(QmodZ::ZERO);
            *slot = slot
                .checked_add(&inv)
                .ok_or(Error::Overflow("Brauer class construction"))?;
        }
        map.retain(|_, v| !v.is_zero());
        if let Some(r) = map.get(&Place::RealPlace) {
            if *r != QmodZ::HALF {
                return Err(Error::domain(format!(
                    "real invariant must be 0 or 1/2, got {r}"
                )));
            }
        }
        let mut total = QmodZ::ZERO;
        for v in map.values() {
            total = total
                .checked_add(v)
                .ok_or(Error::Overflow("Brauer class construction"))?;
        }
        if !total.is_zero() {
            return Err(Error::domain(format!(
                "local invariants sum to {total}, not 0 in Q/Z"
            )));
        }
        let class = BrauerClass::Rational(map);
        class.checked_order()?;
        Ok(class)
    }

    pub fn real(nontrivial: bool) -> Self {
        BrauerClass::Real(nontrivial)
    }

    pub fn padic(p: u64, inv: QmodZ) -> Result<Self> {
        FieldDescriptor::padic(p)?;
        Ok(BrauerClass::PAdic { p, inv })
    }

    pub fn abstract_torsion(group: &Arc<AbstractTorsion>, exps: &[i64]) -> Result<Self> {
        Ok(BrauerClass::AbstractTorsion {
            exps: group.reduce(exps)?,
            group: group.clone(),
        })
    }

    pub fn field(&self) -> FieldDescriptor {
        match self {
            BrauerClass::Rational(_) => FieldDescriptor::Rational,
            BrauerClass::Real(_) => FieldDescriptor::Real,
            BrauerClass::PAdic { p, .. } => FieldDescriptor::PAdic(*p),
            BrauerClass::Finite { q } => FieldDescriptor::Finite(*q),
            BrauerClass::AbstractTorsion { group, .. } => {
                FieldDescriptor::AbstractTorsion(group.clone())
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            BrauerClass::Rational(m) => m.is_empty(),
            BrauerClass::Real(x) => !x,
            BrauerClass::PAdic { inv, .. } => inv.is_zero(),
            BrauerClass::Finite { .. } => true,
            BrauerClass::AbstractTorsion { exps, .. } => exps.iter().all(|&e| e == 0),
        }
    }

    /// Local invariant at `v` (only meaningful over ℚ).
    pub fn invariant_at(&self, v: Place) -> QmodZ {
        match self {
            BrauerClass::Rational(m) => m.get(&v).copied().unwrap_or(QmodZ::ZERO),
            _ => QmodZ::ZERO,
        }
    }

    pub fn invariants(&self) -> Option<&BTreeMap<Place, QmodZ>> {
        match self {
            BrauerClass::Rational(m) => Some(m),
            _ => None,
        }
    }

    fn check_same_backend(&self, other: &BrauerClass) -> Result<()> {
        let (a, b) = (self.field(), other.field());
        if a == b {
            Ok(())
        } else {
            Err(Error::BackendMismatch(a.to_string(), b.to_string()))
        }
    }

    /// The group law of Br(k), realizing the tensor product of algebras.
    pub fn add(&self, other: &BrauerClass) -> Result<BrauerClass> {
        self.check_same_backend(other)?;
        let out = match (self, other) {
            (BrauerClass::Rational(a), BrauerClass::Rational(b)) => {
                let mut map = a.clone();
                for (place, inv) in b {
                    let slot = map.entry(*place).or_insert(QmodZ::ZERO);
                    *slot = slot
                        .checked_add(inv)
                        .ok_or(Error::Overflow("Brauer addition"))?;
                }
                map.retain(|_, v| !v.is_zero());
                BrauerClass::Rational(map)
            }
            (BrauerClass::Real(a), BrauerClass::Real(b)) => BrauerClass::Real(a != b),
            (BrauerClass::PAdic { p, inv: a }, BrauerClass::PAdic { inv: b, .. }) => {
                BrauerClass::PAdic {
                    p: *p,
                    inv: a.checked_add(b).ok_or(Error::Overflow("Brauer addition"))?,
                }
            }
            (BrauerClass::Finite { q }, BrauerClass::Finite { .. }) => BrauerClass::Finite { q: *q },
            (
                BrauerClass::AbstractTorsion { group, exps: a },
                BrauerClass::AbstractTorsion { exps: b, .. },
            ) => BrauerClass::AbstractTorsion {
                group: group.clone(),
                exps: a
                    .iter()
                    .zip(b)
                    .zip(group.orders())
                    .map(|((&x, &y), &o)| ((x as u128 + y as u128) % o as u128) as u64)
                    .collect(),
            },
            _ => unreachable!("backends checked above"),
        };
        out.checked_order()?;
        Ok(out)
    }

    pub fn neg(&self) -> BrauerClass {
        self.scale(-1)
    }

    /// The multiple `k·c`.
    pub fn scale(&self, k: i64) -> BrauerClass {
        match self {
            BrauerClass::Rational(m) => {
                let mut map: BTreeMap<Place, QmodZ> =
                    m.iter().map(|(pl, v)| (*pl, v.scale(k))).collect();
                map.retain(|_, v| !v.is_zero());
                BrauerClass::Rational(map)
            }
            BrauerClass::Real(x) => BrauerClass::Real(*x && k.rem_euclid(2) == 1),
            BrauerClass::PAdic { p, inv } => BrauerClass::PAdic {
                p: *p,
                inv: inv.scale(k),
            },
            BrauerClass::Finite { q } => BrauerClass::Finite { q: *q },
            BrauerClass::AbstractTorsion { group, exps } => BrauerClass::AbstractTorsion {
                group: group.clone(),
                exps: exps
                    .iter()
                    .zip(group.orders())
                    .map(|(&e, &o)| {
                        let m = (k as i128).rem_euclid(o as i128) as u128;
                        ((e as u128 * m) % o as u128) as u64
                    })
                    .collect(),
            },
        }
    }

    fn checked_order(&self) -> Result<u64> {
        match self {
            BrauerClass::Rational(m) => m.values().try_fold(1u64, |acc, v| {
                checked_lcm(acc, v.order()).ok_or(Error::Overflow("Brauer class order"))
            }),
            BrauerClass::Real(x) => Ok(if *x { 2 } else { 1 }),
            BrauerClass::PAdic { inv, .. } => Ok(inv.order()),
            BrauerClass::Finite { .. } => Ok(1),
            BrauerClass::AbstractTorsion { group, exps } => Ok(group.period(exps)),
        }
    }

    /// Order of the class in Br(k) (its period).
    pub fn order(&self) -> u64 {
        self.checked_order()
            .expect("class orders are validated on construction")
    }

    /// The component of the class in the `p`-primary part Br(k){p}.
    ///
    /// With `n = p^e·m` the order and `m` prime to `p`, the idempotent
    /// `m·(m⁻¹ mod p^e)` of ℤ/n projects onto the `p`-part; over ℚ this is the
    /// CRT split of every local invariant.
    pub fn p_primary_part(&self, p: u64) -> BrauerClass {
        let n = self.order();
        let pe = arith::p_part(n, p);
        if pe == 1 {
            return BrauerClass::zero(&self.field());
        }
        let m = n / pe;
        let t = arith::inv_mod(m % pe, pe).expect("m is prime to p");
        let e = ((m as u128 * t as u128) % n as u128) as i64;
        self.scale(e)
    }

    /// `(p, p-primary part)` for every prime dividing the order.
    pub fn primary_decomposition(&self) -> Vec<(u64, BrauerClass)> {
        arith::prime_divisors(self.order())
            .into_iter()
            .map(|p| (p, self.p_primary_part(p)))
            .collect()
    }

    /// Canonical JSON, e.g. `{"backend":"Q","inv":[["oo","1/2"],["3","1/2"]]}`.
    pub fn to_json(&self) -> Value {
        match self {
            BrauerClass::Rational(m) => json!({
                "backend": "Q",
                "inv": m.iter().map(|(pl, v)| json!([pl.to_string(), v.to_string()])).collect::<Vec<_>>(),
            }),
            BrauerClass::Real(x) => json!({
                "backend": "R",
                "inv": if *x { "1/2" } else { "0" },
            }),
            BrauerClass::PAdic { p, inv } => json!({
                "backend": format!("Qp:{p}"),
                "inv": inv.to_string(),
            }),
            BrauerClass::Finite { q } => json!({ "backend": format!("Fq:{q}") }),
            BrauerClass::AbstractTorsion { exps, .. } => json!({
                "backend": "abstract",
                "exps": exps,
            }),
        }
    }

    /// Parses the canonical JSON in the context of `field`. The `backend` tag, when
    /// present, must agree with the field.
    pub fn from_json(value: &Value, field: &FieldDescriptor) -> Result<Self> {
        let bad = |m: String| Error::Parse(format!("Brauer class: {m}"));
        if let Some(tag) = value.get("backend") {
            let tag = tag
                .as_str()
                .ok_or_else(|| bad("'backend' must be a string".into()))?;
            if tag != field.to_string() {
                return Err(Error::BackendMismatch(tag.to_owned(), field.to_string()));
            }
        }
        let frac = |v: &Value| -> Result<QmodZ> {
            match v {
                Value::String(s) => s.parse(),
                Value::Number(n) => n
                    .as_i64()
                    .map(|n| QmodZ::new(n as i128, 1))
                    .ok_or_else(|| bad(format!("invalid invariant {n}")))?,
                other => Err(bad(format!("invalid invariant {other}"))),
            }
        };
        match field {
            FieldDescriptor::Rational => {
                let inv = value
                    .get("inv")
                    .and_then(Value::as_array)
                    .ok_or_else(|| bad("expected an 'inv' array of [place, fraction] pairs".into()))?;
                let mut entries = Vec::with_capacity(inv.len());
                for pair in inv {
                    let (pl, fr) = match pair.as_array().map(Vec::as_slice) {
                        Some([pl, fr]) => (pl, fr),
                        _ => return Err(bad(format!("invalid entry {pair}"))),
                    };
                    let place: Place = match pl {
                        Value::String(s) => s.parse()?,
                        Value::Number(n) => n
                            .as_u64()
                            .ok_or_else(|| bad(format!("invalid place {n}")))?
                            .to_string()
                            .parse()?,
                        other => return Err(bad(format!("invalid place {other}"))),
                    };
                    entries.push((place, frac(fr)?));
                }
                BrauerClass::rational(entries)
            }
            FieldDescriptor::Real => {
                let inv = frac(value.get("inv").unwrap_or(&json!("0")))?;
                if inv.is_zero() {
                    Ok(BrauerClass::Real(false))
                } else if inv == QmodZ::HALF {
                    Ok(BrauerClass::Real(true))
                } else {
                    Err(Error::domain(format!("Br(R) has no element {inv}")))
                }
            }
            FieldDescriptor::PAdic(p) => Ok(BrauerClass::PAdic {
                p: *p,
                inv: frac(value.get("inv").unwrap_or(&json!("0")))?,
            }),
            FieldDescriptor::Finite(q) => Ok(BrauerClass::Finite { q: *q }),
            FieldDescriptor::AbstractTorsion(g) => {
                let exps: Vec<i64> = value
                    .get("exps")
                    .and_then(Value::as_array)
                    .ok_or_else(|| bad("expected an 'exps' array".into()))?
                    .iter()
                    .map(|x| x.as_i64().ok_or_else(|| bad(format!("invalid exponent {x}"))))
                    .collect::<Result<_>>()?;
                BrauerClass::abstract_torsion(g, &exps)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(entries: &[(u64, &str)]) -> BrauerClass {
        BrauerClass::rational(entries.iter().map(|(p, f)| {
            let place = if *p == 0 { Place::RealPlace } else { Place::FinitePrime(*p) };
            (place, f.parse().unwrap())
        }))
        .unwrap()
    }

    #[test]
    fn rational_classes_validate_reciprocity() {
        assert!(BrauerClass::rational([(Place::FinitePrime(3), QmodZ::HALF)]).is_err());
        assert!(BrauerClass::rational([
            (Place::RealPlace, "1/3".parse().unwrap()),
            (Place::FinitePrime(3), "2/3".parse().unwrap()),
        ])
        .is_err());
        assert!(BrauerClass::rational([(Place::FinitePrime(4), QmodZ::HALF), (Place::FinitePrime(3), QmodZ::HALF)]).is_err());
        let zero = q(&[(3, "1/2"), (3, "1/2")]);
        assert!(zero.is_zero());
    }

    #[test]
    fn addition_examples() {
        let c = q(&[(2, "1/2"), (3, "1/2")]);
        let zero = BrauerClass::zero(&FieldDescriptor::Rational);
        assert_eq!(c.add(&zero).unwrap(), c);
        assert!(c.add(&c).unwrap().is_zero());
        let d = q(&[(3, "1/2"), (5, "1/2")]);
        assert_eq!(c.add(&d).unwrap(), q(&[(2, "1/2"), (5, "1/2")]));
        let real = BrauerClass::real(true);
        assert!(matches!(c.add(&real), Err(Error::BackendMismatch(..))));
    }

    #[test]
    fn order_examples() {
        assert_eq!(BrauerClass::zero(&FieldDescriptor::Rational).order(), 1);
        assert_eq!(q(&[(2, "1/2"), (3, "1/2")]).order(), 2);
        assert_eq!(q(&[(3, "1/6"), (5, "5/6")]).order(), 6);
        assert_eq!(BrauerClass::padic(5, "3/8".parse().unwrap()).unwrap().order(), 8);
        assert_eq!(BrauerClass::Finite { q: 9 }.order(), 1);
    }

    #[test]
    fn primary_parts() {
        let c = q(&[(2, "1/2"), (3, "1/2")]);
        assert_eq!(c.p_primary_part(2), c);
        assert!(c.p_primary_part(3).is_zero());
        let b = q(&[(3, "1/6"), (5, "5/6")]);
        assert_eq!(b.p_primary_part(2), q(&[(3, "1/2"), (5, "1/2")]));
        assert_eq!(b.p_primary_part(3), q(&[(3, "2/3"), (5, "1/3")]));
        let back = b.p_primary_part(2).add(&b.p_primary_part(3)).unwrap();
        assert_eq!(back, b);
    }

    #[test]
    fn json_is_canonical() {
        let c = q(&[(3, "1/2"), (0, "1/2")]);
        let s = serde_json::to_string(&c.to_json()).unwrap();
        assert_eq!(s, r#"{"backend":"Q","inv":[["oo","1/2"],["3","1/2"]]}"#);
        let back = BrauerClass::from_json(&serde_json::from_str(&s).unwrap(), &FieldDescriptor::Rational).unwrap();
        assert_eq!(back, c);
        let err = BrauerClass::from_json(&c.to_json(), &FieldDescriptor::Real).unwrap_err();
        assert!(matches!(err, Error::BackendMismatch(..)));
    }

    #[test]
    fn abstract_arithmetic() {
        let g = Arc::new(
            AbstractTorsion::new(vec![("x".into(), 2), ("y".into(), 3)], vec![], vec![]).unwrap(),
        );
        let x = BrauerClass::abstract_torsion(&g, &[1, 0]).unwrap();
        let y = BrauerClass::abstract_torsion(&g, &[0, 1]).unwrap();
        let xy = x.add(&y).unwrap();
        assert_eq!(xy.order(), 6);
        assert_eq!(xy.p_primary_part(2), x);
        assert_eq!(xy.p_primary_part(3), y);
        assert_eq!(y.scale(2), BrauerClass::abstract_torsion(&g, &[0, -1]).unwrap());
    }
}
