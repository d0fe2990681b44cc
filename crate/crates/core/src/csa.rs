//! Central simple algebras up to isomorphism, identified with (Brauer class, degree).

use std::collections::BTreeSet;

use serde_json::{json, Value};

use crate::arith::{gcd, QmodZ};
use crate::brauer::BrauerClass;
use crate::error::{Error, Result};
use crate::field::{hilbert_local, relevant_places, FieldDescriptor, SquareClass};

/// Default cap on enumerated subgroup sizes.
pub const DEFAULT_SUBGROUP_CAP: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Csa {
    class: BrauerClass,
    degree: u64,
}

impl Csa {
    /// Checks `period | index | degree`.
    pub fn new(class: BrauerClass, degree: u64) -> Result<Self> {
        if degree == 0 {
            return Err(Error::domain("degree must be positive"));
        }
        let csa = Csa { class, degree };
        let index = csa.index();
        if !degree.is_multiple_of(index) {
            return Err(Error::domain(format!(
                "index {index} does not divide degree {degree}"
            )));
        }
        Ok(csa)
    }

    /// The matrix algebra `M_n(k)`.
    pub fn split(field: &FieldDescriptor, degree: u64) -> Result<Self> {
        Csa::new(BrauerClass::zero(field), degree)
    }

    pub fn class(&self) -> &BrauerClass {
        &self.class
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn period(&self) -> u64 {
        self.class.order()
    }

    /// Index equals period over ℚ, ℝ, ℚ_p and finite fields; over a declared
    /// torsion group it is the declared value.
    pub fn index(&self) -> u64 {
        match &self.class {
            BrauerClass::AbstractTorsion { group, exps } => group.index(exps),
            _ => self.period(),
        }
    }

    pub fn field(&self) -> FieldDescriptor {
        self.class.field()
    }

    pub fn is_division(&self) -> bool {
        self.index() == self.degree
    }

    pub fn to_json(&self) -> Value {
        json!({ "class": self.class.to_json(), "deg": self.degree })
    }

    pub fn from_json(value: &Value, field: &FieldDescriptor) -> Result<Self> {
        let class = value
            .get("class")
            .ok_or_else(|| Error::Parse("CSA: missing 'class'".into()))?;
        let deg = value
            .get("deg")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("CSA: missing integer 'deg'".into()))?;
        Csa::new(BrauerClass::from_json(class, field)?, deg)
    }
}

/// Brauer class of the quaternion algebra `(a, b)`.
pub fn quaternion_class(a: &SquareClass, b: &SquareClass, field: &FieldDescriptor) -> Result<BrauerClass> {
    match field {
        FieldDescriptor::Rational => BrauerClass::rational(
            relevant_places(a, b)
                .into_iter()
                .filter(|&v| hilbert_local(a, b, v) == -1)
                .map(|v| (v, QmodZ::HALF)),
        ),
        FieldDescriptor::Real => Ok(BrauerClass::real(a.is_negative() && b.is_negative())),
        other => Err(Error::capability(other, "quaternion algebras from square classes")),
    }
}

/// The quaternion algebra `(a, b)`, of degree 2.
pub fn quaternion(a: &SquareClass, b: &SquareClass, field: &FieldDescriptor) -> Result<Csa> {
    Csa::new(quaternion_class(a, b, field)?, 2)
}

pub fn tensor(a: &Csa, b: &Csa) -> Result<Csa> {
    let degree = a
        .degree
        .checked_mul(b.degree)
        .ok_or(Error::Overflow("tensor degree"))?;
    Csa::new(a.class.add(&b.class)?, degree)
}

/// `[A^{⊗i}] = i·[A]`.
pub fn tensor_power(a: &Csa, i: u64) -> BrauerClass {
    let i = (i % a.period()) as i64;
    a.class.scale(i)
}

pub fn coprime_indexes(a: &Csa, b: &Csa) -> bool {
    gcd(a.index(), b.index()) == 1
}

/// A finite subgroup of Br(k), stored as its sorted element set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BrauerSubgroup {
    elements: BTreeSet<BrauerClass>,
}

impl BrauerSubgroup {
    pub fn trivial(field: &FieldDescriptor) -> Self {
        BrauerSubgroup {
            elements: BTreeSet::from([BrauerClass::zero(field)]),
        }
    }

    pub fn elements(&self) -> &BTreeSet<BrauerClass> {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, c: &BrauerClass) -> bool {
        self.elements.contains(c)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.elements.iter().map(BrauerClass::to_json).collect())
    }
}

/// The subgroup generated by `classes`, enumerated by closure under addition.
pub fn subgroup_generated(field: &FieldDescriptor, classes: &[BrauerClass]) -> Result<BrauerSubgroup> {
    subgroup_generated_capped(field, classes, DEFAULT_SUBGROUP_CAP)
}

pub fn subgroup_generated_capped(
    field: &FieldDescriptor,
    classes: &[BrauerClass],
    cap: usize,
) -> Result<BrauerSubgroup> {
    let mut group = BrauerSubgroup::trivial(field);
    for g in classes {
        if g.field() != *field {
            return Err(Error::BackendMismatch(g.field().to_string(), field.to_string()));
        }
        if group.contains(g) {
            continue;
        }
        // ⟨H, g⟩ = ⋃_{i < n} (H + i·g) where n is the order of g modulo H.
        let base: Vec<BrauerClass> = group.elements.iter().cloned().collect();
        let mut step = g.clone();
        while !group.contains(&step) {
            for h in &base {
                group.elements.insert(h.add(&step)?);
            }
            if group.order() > cap {
                return Err(Error::SubgroupTooLarge(cap));
            }
            step = step.add(g)?;
        }
    }
    Ok(group)
}

/// Whether `⟨[A]⟩ = ⟨[A']⟩`, i.e. `[A'] = m[A]` for some `m` prime to `per(A)`.
pub fn same_cyclic_subgroup(a: &Csa, b: &Csa) -> Result<bool> {
    if a.field() != b.field() {
        return Err(Error::BackendMismatch(a.field().to_string(), b.field().to_string()));
    }
    let n = a.period();
    if n != b.period() {
        return Ok(false);
    }
    Ok((1..=n)
        .filter(|&m| gcd(m, n) == 1)
        .any(|m| a.class.scale(m as i64) == b.class))
}
