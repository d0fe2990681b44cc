//! The ring `R_T(k)`: the group ring ℤ[Br(k)] modulo
//! `[k] + [B⊗C] − [B] − [C]` for classes with coprime indexes.
//!
//! Equality is decided on a canonical form. Every nontrivial class `[B]` is
//! rewritten as `Σ_p [B^p] − (ω(B) − 1)[k]`, where `B^p` runs over the nontrivial
//! primary components and `ω(B)` is their number. The result is the augmentation
//! together with the multiplicities of the nontrivial primary classes, one prime
//! at a time.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::brauer::BrauerClass;
use crate::csa::{subgroup_generated, BrauerSubgroup};
use crate::error::{Error, Result};
use crate::field::FieldDescriptor;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RtElement {
    field: FieldDescriptor,
    terms: BTreeMap<BrauerClass, i64>,
}

fn checked(a: i64, b: i64) -> Result<i64> {
    a.checked_add(b).ok_or(Error::Overflow("R_T multiplicities"))
}

impl RtElement {
    pub fn zero(field: &FieldDescriptor) -> Self {
        RtElement {
            field: field.clone(),
            terms: BTreeMap::new(),
        }
    }

    /// The unit `[k]`.
    pub fn one(field: &FieldDescriptor) -> Self {
        RtElement::class(&BrauerClass::zero(field))
    }

    /// The basis element `[c]`.
    pub fn class(c: &BrauerClass) -> Self {
        RtElement {
            field: c.field(),
            terms: BTreeMap::from([(c.clone(), 1)]),
        }
    }

    pub fn from_terms<I>(field: &FieldDescriptor, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, BrauerClass)>,
    {
        let mut e = RtElement::zero(field);
        for (m, c) in terms {
            e.add_term(m, &c)?;
        }
        Ok(e)
    }

    pub fn field(&self) -> &FieldDescriptor {
        &self.field
    }

    pub fn terms(&self) -> &BTreeMap<BrauerClass, i64> {
        &self.terms
    }

    pub fn multiplicity(&self, c: &BrauerClass) -> i64 {
        self.terms.get(c).copied().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: i64, c: &BrauerClass) -> Result<()> {
        if c.field() != self.field {
            return Err(Error::BackendMismatch(c.field().to_string(), self.field.to_string()));
        }
        if m == 0 {
            return Ok(());
        }
        let slot = self.terms.entry(c.clone()).or_insert(0);
        *slot = checked(*slot, m)?;
        if *slot == 0 {
            self.terms.remove(c);
        }
        Ok(())
    }

    fn same_backend(&self, other: &RtElement) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::BackendMismatch(self.field.to_string(), other.field.to_string()))
        }
    }

    pub fn is_positive(&self) -> bool {
        self.terms.values().all(|&m| m >= 0)
    }

    /// List of `[multiplicity, class]` pairs in class order.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(c, m)| json!([m, c.to_json()]))
                .collect(),
        )
    }

    pub fn from_json(value: &Value, field: &FieldDescriptor) -> Result<Self> {
        let arr = value
            .as_array()
            .ok_or_else(|| Error::Parse("R_T element: expected a list of [multiplicity, class]".into()))?;
        let mut e = RtElement::zero(field);
        for entry in arr {
            match entry.as_array().map(Vec::as_slice) {
                Some([m, c]) => {
                    let m = m
                        .as_i64()
                        .ok_or_else(|| Error::Parse(format!("R_T element: invalid multiplicity {m}")))?;
                    e.add_term(m, &BrauerClass::from_json(c, field)?)?;
                }
                _ => return Err(Error::Parse(format!("R_T element: invalid entry {entry}"))),
            }
        }
        Ok(e)
    }
}

pub fn rt_add(e1: &RtElement, e2: &RtElement) -> Result<RtElement> {
    e1.same_backend(e2)?;
    let mut out = e1.clone();
    for (c, &m) in &e2.terms {
        out.add_term(m, c)?;
    }
    Ok(out)
}

pub fn rt_neg(e: &RtElement) -> RtElement {
    RtElement {
        field: e.field.clone(),
        terms: e.terms.iter().map(|(c, &m)| (c.clone(), -m)).collect(),
    }
}

pub fn rt_sub(e1: &RtElement, e2: &RtElement) -> Result<RtElement> {
    rt_add(e1, &rt_neg(e2))
}

/// Bilinear extension of `[B]·[C] = [B⊗C]`.
pub fn rt_mul(e1: &RtElement, e2: &RtElement) -> Result<RtElement> {
    e1.same_backend(e2)?;
    let mut out = RtElement::zero(&e1.field);
    for (b, &m) in &e1.terms {
        for (c, &n) in &e2.terms {
            let mn = m.checked_mul(n).ok_or(Error::Overflow("R_T multiplication"))?;
            out.add_term(mn, &b.add(c)?)?;
        }
    }
    Ok(out)
}

/// Integer multiple `n·e`.
pub fn rt_scale(e: &RtElement, n: i64) -> Result<RtElement> {
    let mut out = RtElement::zero(&e.field);
    for (c, &m) in &e.terms {
        out.add_term(m.checked_mul(n).ok_or(Error::Overflow("R_T scaling"))?, c)?;
    }
    Ok(out)
}

pub fn augmentation(e: &RtElement) -> Result<i64> {
    e.terms.values().try_fold(0i64, |acc, &m| checked(acc, m))
}

/// Complete invariant for equality in `R_T(k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RtCanonical {
    pub augmentation: i64,
    pub primary: BTreeMap<(u64, BrauerClass), i64>,
}

impl RtCanonical {
    /// `{"aug": n, "primary": [[p, multiplicity, class], …]}` sorted by prime and
    /// then by the serialized class.
    pub fn to_json(&self) -> Value {
        let mut rows: Vec<(u64, String, Value)> = self
            .primary
            .iter()
            .map(|((p, c), m)| {
                let cj = c.to_json();
                (*p, cj.to_string(), json!([p, m, cj]))
            })
            .collect();
        rows.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
        json!({
            "aug": self.augmentation,
            "primary": rows.into_iter().map(|r| r.2).collect::<Vec<_>>(),
        })
    }

    /// Accepts exactly what [`RtCanonical::to_json`] emits; every class must be a
    /// nontrivial class of order a power of its listed prime.
    pub fn from_json(value: &Value, field: &FieldDescriptor) -> Result<Self> {
        let bad = |m: String| Error::Parse(format!("R_T canonical form: {m}"));
        let augmentation = value
            .get("aug")
            .and_then(Value::as_i64)
            .ok_or_else(|| bad("missing integer 'aug'".into()))?;
        let rows = value
            .get("primary")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing 'primary' list".into()))?;
        let mut primary = BTreeMap::new();
        for row in rows {
            let Some([p, m, c]) = row.as_array().map(Vec::as_slice) else {
                return Err(bad(format!("expected [prime, multiplicity, class], got {row}")));
            };
            let (Some(p), Some(m)) = (p.as_u64(), m.as_i64()) else {
                return Err(bad(format!("invalid row {row}")));
            };
            let c = BrauerClass::from_json(c, field)?;
            if c.is_zero() || c.primary_decomposition().iter().map(|x| x.0).ne([p]) {
                return Err(bad(format!("class in row {row} is not {p}-primary")));
            }
            if m != 0 && primary.insert((p, c), m).is_some() {
                return Err(bad(format!("repeated row {row}")));
            }
        }
        Ok(RtCanonical { augmentation, primary })
    }

    /// An element whose canonical form is `self`.
    pub fn lift(&self, field: &FieldDescriptor) -> Result<RtElement> {
        let mut e = RtElement::zero(field);
        let mut rest = self.augmentation;
        for ((_, c), &m) in &self.primary {
            e.add_term(m, c)?;
            rest = rest.checked_sub(m).ok_or(Error::Overflow("R_T multiplicities"))?;
        }
        e.add_term(rest, &BrauerClass::zero(field))?;
        Ok(e)
    }
}

pub fn normalize(e: &RtElement) -> Result<RtCanonical> {
    let mut primary: BTreeMap<(u64, BrauerClass), i64> = BTreeMap::new();
    for (c, &m) in &e.terms {
        for (p, part) in c.primary_decomposition() {
            let slot = primary.entry((p, part)).or_insert(0);
            *slot = checked(*slot, m)?;
        }
    }
    primary.retain(|_, m| *m != 0);
    Ok(RtCanonical {
        augmentation: augmentation(e)?,
        primary,
    })
}

pub fn rt_equal(e1: &RtElement, e2: &RtElement) -> Result<bool> {
    e1.same_backend(e2)?;
    Ok(normalize(e1)? == normalize(e2)?)
}

/// The subgroup generated by the support of a positive element.
pub fn subgroup_of_positive(e: &RtElement) -> Result<BrauerSubgroup> {
    if !e.is_positive() {
        return Err(Error::domain(
            "subgroup map is only defined on the positive cone (negative multiplicity present)",
        ));
    }
    let support: Vec<BrauerClass> = e.terms.keys().cloned().collect();
    subgroup_generated(&e.field, &support)
}
