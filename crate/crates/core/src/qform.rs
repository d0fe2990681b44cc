//! Diagonal quadratic forms over fields with square classes (ℚ and ℝ).

use std::collections::BTreeSet;

use serde_json::{json, Value};

use crate::brauer::BrauerClass;
use crate::csa::quaternion_class;
use crate::error::{Error, Result};
use crate::field::{hilbert_local, parse_square_class, FieldDescriptor, Place, SquareClass};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticForm {
    coeffs: Vec<SquareClass>,
    field: FieldDescriptor,
}

impl QuadraticForm {
    pub fn new(coeffs: Vec<SquareClass>, field: &FieldDescriptor) -> Result<Self> {
        field.require_square_classes("quadratic forms")?;
        if coeffs.is_empty() {
            return Err(Error::domain("a quadratic form needs at least one coefficient"));
        }
        let coeffs = if *field == FieldDescriptor::Real {
            coeffs
                .into_iter()
                .map(|c| if c.is_negative() { SquareClass::minus_one() } else { SquareClass::ONE })
                .collect()
        } else {
            coeffs
        };
        Ok(QuadraticForm {
            coeffs,
            field: field.clone(),
        })
    }

    /// `⟨a₁, …, a_n⟩` from integer coefficients.
    pub fn from_ints(coeffs: &[i64], field: &FieldDescriptor) -> Result<Self> {
        let coeffs = coeffs
            .iter()
            .map(|&a| SquareClass::from_int(a, field))
            .collect::<Result<_>>()?;
        QuadraticForm::new(coeffs, field)
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[SquareClass] {
        &self.coeffs
    }

    pub fn field(&self) -> &FieldDescriptor {
        &self.field
    }

    /// The similar form `c·q`.
    pub fn scale(&self, c: &SquareClass) -> QuadraticForm {
        QuadraticForm {
            coeffs: self.coeffs.iter().map(|a| a.mul(c)).collect(),
            field: self.field.clone(),
        }
    }

    pub fn orthogonal_sum(&self, other: &QuadraticForm) -> Result<QuadraticForm> {
        if self.field != other.field {
            return Err(Error::BackendMismatch(self.field.to_string(), other.field.to_string()));
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.extend(other.coeffs.iter().cloned());
        Ok(QuadraticForm {
            coeffs,
            field: self.field.clone(),
        })
    }

    /// Product of the coefficients.
    pub fn determinant(&self) -> SquareClass {
        self.coeffs.iter().fold(SquareClass::ONE, |acc, a| acc.mul(a))
    }

    /// Signed discriminant `(−1)^{n(n−1)/2}·det`.
    pub fn discriminant(&self) -> SquareClass {
        let n = self.dim();
        let det = self.determinant();
        if (n * (n - 1) / 2) % 2 == 1 {
            det.neg()
        } else {
            det
        }
    }

    pub fn has_trivial_discriminant(&self) -> bool {
        self.discriminant().is_one()
    }

    /// Number of negative coefficients.
    pub fn negative_index(&self) -> usize {
        self.coeffs.iter().filter(|a| a.is_negative()).count()
    }

    pub fn is_definite(&self) -> bool {
        let neg = self.negative_index();
        neg == 0 || neg == self.dim()
    }

    pub fn to_json(&self) -> Value {
        json!({ "coeffs": self.coeffs.iter().map(|a| a.to_string()).collect::<Vec<_>>() })
    }

    pub fn from_json(value: &Value, field: &FieldDescriptor) -> Result<Self> {
        let arr = value
            .get("coeffs")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("form: expected a 'coeffs' array".into()))?;
        let coeffs = arr
            .iter()
            .map(|c| match c {
                Value::String(s) => parse_square_class(s, field),
                Value::Number(n) => parse_square_class(&n.to_string(), field),
                other => Err(Error::Parse(format!("form: invalid coefficient {other}"))),
            })
            .collect::<Result<_>>()?;
        QuadraticForm::new(coeffs, field)
    }
}

/// Class of the full Clifford algebra of an even-dimensional diagonal form.
///
/// `C(⟨u,v⟩ ⊥ r) ≃ (u,v) ⊗ C(−uv·r)`.
fn clifford_full(coeffs: &[SquareClass], field: &FieldDescriptor) -> Result<BrauerClass> {
    debug_assert!(coeffs.len().is_multiple_of(2));
    let mut acc = BrauerClass::zero(field);
    let mut rest: Vec<SquareClass> = coeffs.to_vec();
    while rest.len() >= 2 {
        let (u, v) = (rest[0].clone(), rest[1].clone());
        acc = acc.add(&quaternion_class(&u, &v, field)?)?;
        let c = u.mul(&v).neg();
        rest = rest[2..].iter().map(|a| a.mul(&c)).collect();
    }
    Ok(acc)
}

/// Class of the even Clifford algebra `C₀(q)` for odd `dim q`.
///
/// `C₀(⟨a⟩ ⊥ r) ≃ C(−a·r)`.
pub fn clifford_odd(q: &QuadraticForm) -> Result<BrauerClass> {
    if q.dim().is_multiple_of(2) {
        return Err(Error::domain(format!(
            "clifford_odd needs odd dimension, got {}",
            q.dim()
        )));
    }
    let c = q.coeffs[0].neg();
    let rest: Vec<SquareClass> = q.coeffs[1..].iter().map(|a| a.mul(&c)).collect();
    clifford_full(&rest, &q.field)
}

/// The common class of the two factors `C₀^±(q)` of an even-dimensional form with
/// trivial discriminant.
pub fn clifford_even_half(q: &QuadraticForm) -> Result<BrauerClass> {
    if q.dim() % 2 == 1 {
        return Err(Error::domain(format!(
            "clifford_even_half needs even dimension, got {}",
            q.dim()
        )));
    }
    if !q.has_trivial_discriminant() {
        return Err(Error::domain(format!(
            "clifford_even_half needs trivial discriminant, got {}",
            q.discriminant()
        )));
    }
    if q.dim() == 2 {
        return Ok(BrauerClass::zero(&q.field));
    }
    let c = q.coeffs[0].neg();
    let rest = QuadraticForm {
        coeffs: q.coeffs[1..].iter().map(|a| a.mul(&c)).collect(),
        field: q.field.clone(),
    };
    clifford_odd(&rest)
}

/// The Albert form `⟨a₁, b₁, −a₁b₁, −a₂, −b₂, a₂b₂⟩` of `(a₁,b₁) ⊗ (a₂,b₂)`.
pub fn albert(
    a1: &SquareClass,
    b1: &SquareClass,
    a2: &SquareClass,
    b2: &SquareClass,
    field: &FieldDescriptor,
) -> Result<QuadraticForm> {
    QuadraticForm::new(
        vec![
            a1.clone(),
            b1.clone(),
            a1.mul(b1).neg(),
            a2.neg(),
            b2.neg(),
            a2.mul(b2),
        ],
        field,
    )
}

/// A form of dimension `2r+1` with trivial discriminant whose even Clifford
/// algebra has class `Σ [(aᵢ, bᵢ)]`.
///
/// Built as `q₁ ⊥ ⋯ ⊥ q_r` with `q₁ = ⟨a₁,b₁,−a₁b₁⟩` and
/// `q_j = (−1)^{j−1}(a₂b₂⋯a_{j−1}b_{j−1})⟨a_j,b_j⟩`, then rescaled by its
/// discriminant.
pub fn quaternion_sum_form(pairs: &[(SquareClass, SquareClass)], field: &FieldDescriptor) -> Result<QuadraticForm> {
    let Some(((a1, b1), rest)) = pairs.split_first() else {
        return Err(Error::domain("at least one quaternion pair is required"));
    };
    field.require_square_classes("quadratic forms")?;
    let mut coeffs = vec![a1.clone(), b1.clone(), a1.mul(b1).neg()];
    let mut prefix = SquareClass::ONE;
    for (idx, (a, b)) in rest.iter().enumerate() {
        // idx = j − 2
        let c = if idx % 2 == 0 { prefix.neg() } else { prefix.clone() };
        coeffs.push(a.mul(&c));
        coeffs.push(b.mul(&c));
        prefix = prefix.mul(a).mul(b);
    }
    let q = QuadraticForm::new(coeffs, field)?;
    let d = q.discriminant();
    Ok(q.scale(&d))
}

fn require_dim(q: &QuadraticForm, n: usize) -> Result<()> {
    if q.dim() != n {
        return Err(Error::domain(format!("expected a form of dimension {n}, got {}", q.dim())));
    }
    Ok(())
}

/// Similarity of ternary forms, decided by the class of `C₀`.
pub fn similar_dim3(q: &QuadraticForm, q2: &QuadraticForm) -> Result<bool> {
    require_dim(q, 3)?;
    require_dim(q2, 3)?;
    Ok(clifford_odd(q)? == clifford_odd(q2)?)
}

/// Similarity of 6-dimensional forms with trivial discriminant, decided by `[C₀⁺]`.
pub fn similar_dim6(q: &QuadraticForm, q2: &QuadraticForm) -> Result<bool> {
    require_dim(q, 6)?;
    require_dim(q2, 6)?;
    Ok(clifford_even_half(q)? == clifford_even_half(q2)?)
}

fn require_rational(q: &QuadraticForm, what: &str) -> Result<()> {
    if q.field != FieldDescriptor::Rational {
        return Err(Error::capability(&q.field, what));
    }
    Ok(())
}

/// The real place, 2, and every prime dividing a coefficient.
pub fn bad_places(forms: &[&QuadraticForm]) -> Vec<Place> {
    let mut primes: BTreeSet<u64> = BTreeSet::from([2]);
    for q in forms {
        for a in &q.coeffs {
            primes.extend(a.primes());
        }
    }
    std::iter::once(Place::RealPlace)
        .chain(primes.into_iter().map(Place::FinitePrime))
        .collect()
}

/// Local Hasse invariant `Π_{i<j} (aᵢ, aⱼ)_v`.
pub fn hasse_invariant(q: &QuadraticForm, v: Place) -> Result<i8> {
    require_rational(q, "local Hasse invariants")?;
    Ok(hasse_local(&q.coeffs, v))
}

fn hasse_local(coeffs: &[SquareClass], v: Place) -> i8 {
    let mut s = 1;
    for i in 0..coeffs.len() {
        for j in i + 1..coeffs.len() {
            s *= hilbert_local(&coeffs[i], &coeffs[j], v);
        }
    }
    s
}

/// Isometry over ℚ by Hasse-Minkowski.
pub fn isometric_over_q(q: &QuadraticForm, q2: &QuadraticForm) -> Result<bool> {
    require_rational(q, "isometry over Q")?;
    require_rational(q2, "isometry over Q")?;
    if q.dim() != q2.dim()
        || q.determinant() != q2.determinant()
        || q.negative_index() != q2.negative_index()
    {
        return Ok(false);
    }
    Ok(bad_places(&[q, q2])
        .into_iter()
        .all(|v| hasse_local(&q.coeffs, v) == hasse_local(&q2.coeffs, v)))
}

/// Local isotropy at a finite place `v`.
fn isotropic_at(q: &QuadraticForm, v: Place) -> bool {
    let d = q.determinant();
    let eps = hasse_local(&q.coeffs, v);
    let m1 = SquareClass::minus_one();
    match q.dim() {
        1 => false,
        2 => d.neg().is_local_square(v),
        3 => hilbert_local(&m1, &d.neg(), v) == eps,
        4 => !d.is_local_square(v) || eps == hilbert_local(&m1, &m1, v),
        _ => true,
    }
}

/// Whether `q` has no nontrivial zero over ℚ.
pub fn anisotropic_over_q(q: &QuadraticForm) -> Result<bool> {
    require_rational(q, "anisotropy over Q")?;
    if q.dim() == 1 || q.is_definite() {
        return Ok(true);
    }
    if q.dim() == 2 {
        return Ok(!q.determinant().neg().is_one());
    }
    Ok(!bad_places(&[q])
        .into_iter()
        .filter(|v| *v != Place::RealPlace)
        .all(|v| isotropic_at(q, v)))
}
