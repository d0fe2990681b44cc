//! The Tits motivic measure `μ_T` and the counting measure `n(F)` on twisted
//! flag varieties.

use serde_json::{json, Value};

use crate::brauer::BrauerClass;
use crate::csa::{quaternion_class, Csa};
use crate::error::{Error, Result};
use crate::field::{FieldDescriptor, SquareClass};
use crate::qform::{clifford_even_half, clifford_odd, QuadraticForm};
use crate::rt::{rt_mul, RtElement};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TwistedVariety {
    SeveriBrauer(Csa),
    Grassmannian { d: u64, algebra: Csa },
    Quadric(QuadraticForm),
    QuaternionProjective(Csa),
    Involution {
        algebra: Csa,
        c_plus: BrauerClass,
        c_minus: BrauerClass,
    },
    Product(Vec<TwistedVariety>),
}

fn dom(msg: String) -> Error {
    Error::Domain(msg)
}

impl TwistedVariety {
    pub fn grassmannian(d: u64, algebra: Csa) -> Result<Self> {
        let v = TwistedVariety::Grassmannian { d, algebra };
        v.validate()?;
        Ok(v)
    }

    pub fn quadric(q: QuadraticForm) -> Result<Self> {
        let v = TwistedVariety::Quadric(q);
        v.validate()?;
        Ok(v)
    }

    pub fn quaternion_projective(algebra: Csa) -> Result<Self> {
        let v = TwistedVariety::QuaternionProjective(algebra);
        v.validate()?;
        Ok(v)
    }

    /// Raw involution data, checked against the Clifford relations for its degree.
    pub fn involution(algebra: Csa, c_plus: BrauerClass, c_minus: BrauerClass) -> Result<Self> {
        let v = TwistedVariety::Involution {
            algebra,
            c_plus,
            c_minus,
        };
        v.validate()?;
        Ok(v)
    }

    pub fn product(factors: Vec<TwistedVariety>) -> Result<Self> {
        let v = TwistedVariety::Product(factors);
        v.validate()?;
        Ok(v)
    }

    pub fn field(&self) -> FieldDescriptor {
        match self {
            TwistedVariety::SeveriBrauer(a)
            | TwistedVariety::Grassmannian { algebra: a, .. }
            | TwistedVariety::QuaternionProjective(a)
            | TwistedVariety::Involution { algebra: a, .. } => a.field(),
            TwistedVariety::Quadric(q) => q.field().clone(),
            TwistedVariety::Product(f) => f
                .first()
                .map(TwistedVariety::field)
                .unwrap_or(FieldDescriptor::Rational),
        }
    }

    /// Checks the structural hypotheses of each family.
    pub fn validate(&self) -> Result<()> {
        match self {
            TwistedVariety::SeveriBrauer(_) => Ok(()),
            TwistedVariety::Grassmannian { d, algebra } => {
                if *d < 1 || *d >= algebra.degree() {
                    return Err(dom(format!(
                        "Grassmannian needs 1 <= d < deg(A), got d={d}, deg={}",
                        algebra.degree()
                    )));
                }
                Ok(())
            }
            TwistedVariety::Quadric(q) => {
                if q.dim() < 3 {
                    return Err(dom(format!("quadric needs dim(q) >= 3, got {}", q.dim())));
                }
                if q.dim() % 2 == 0 && !q.has_trivial_discriminant() {
                    return Err(dom(format!(
                        "even-dimensional quadric needs trivial discriminant, got {}",
                        q.discriminant()
                    )));
                }
                Ok(())
            }
            TwistedVariety::QuaternionProjective(a) => {
                if a.degree() % 2 != 0 || a.period() > 2 {
                    return Err(dom(format!(
                        "quaternion projective space needs even degree and period <= 2 (symplectic involution), got deg={} per={}",
                        a.degree(),
                        a.period()
                    )));
                }
                Ok(())
            }
            TwistedVariety::Involution {
                algebra,
                c_plus,
                c_minus,
            } => validate_involution(algebra, c_plus, c_minus),
            TwistedVariety::Product(factors) => {
                let Some(first) = factors.first() else {
                    return Err(dom("product needs at least one factor".into()));
                };
                let field = first.field();
                for f in factors {
                    f.validate()?;
                    if f.field() != field {
                        return Err(Error::BackendMismatch(f.field().to_string(), field.to_string()));
                    }
                }
                Ok(())
            }
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            TwistedVariety::SeveriBrauer(a) => json!({ "sb": a.to_json() }),
            TwistedVariety::Grassmannian { d, algebra } => {
                json!({ "gr": { "d": d, "csa": algebra.to_json() } })
            }
            TwistedVariety::Quadric(q) => json!({ "quadric": q.to_json() }),
            TwistedVariety::QuaternionProjective(a) => json!({ "hp": a.to_json() }),
            TwistedVariety::Involution {
                algebra,
                c_plus,
                c_minus,
            } => json!({ "iv": {
                "csa": algebra.to_json(),
                "c_plus": c_plus.to_json(),
                "c_minus": c_minus.to_json(),
            }}),
            TwistedVariety::Product(f) => {
                json!({ "product": f.iter().map(TwistedVariety::to_json).collect::<Vec<_>>() })
            }
        }
    }
}

fn validate_involution(a: &Csa, cp: &BrauerClass, cm: &BrauerClass) -> Result<()> {
    let n = a.degree();
    if !n.is_multiple_of(2) || a.period() > 2 {
        return Err(dom(format!(
            "involution variety needs even degree and period <= 2 (orthogonal involution), got deg={n} per={}",
            a.period()
        )));
    }
    let class = a.class();
    let holds = |lhs: BrauerClass, rhs: &BrauerClass| lhs == *rhs;
    let ok = if n % 4 == 2 {
        holds(cp.scale(2), class) && holds(cp.scale(3), cm) && cp.scale(4).is_zero()
    } else {
        cp.scale(2).is_zero() && cm.scale(2).is_zero() && holds(cp.add(cm)?, class)
    };
    if !ok {
        let rel = if n % 4 == 2 {
            "2[c+]=[A], 3[c+]=[c-], 4[c+]=0 (degree 2 mod 4)"
        } else {
            "2[c+]=0, 2[c-]=0, [c+]+[c-]=[A] (degree 0 mod 4)"
        };
        return Err(dom(format!("involution data violates the Clifford relations {rel}")));
    }
    Ok(())
}

/// Coefficients of the Gaussian binomial `(n choose d)_t`, lowest degree first.
pub fn gauss_coeffs(n: u64, d: u64) -> Result<Vec<u64>> {
    if d > n {
        return Ok(vec![]);
    }
    // rows[k] holds (m choose k)_t for the current m.
    let mut rows: Vec<Vec<u64>> = vec![vec![1]];
    for m in 1..=n {
        let mut next: Vec<Vec<u64>> = Vec::with_capacity(rows.len() + 1);
        for k in 0..=m.min(d) {
            // (m choose k) = (m-1 choose k-1) + t^k (m-1 choose k)
            let len = (k * (m - k) + 1) as usize;
            let mut poly = vec![0u64; len];
            if k >= 1 {
                for (i, &c) in rows[(k - 1) as usize].iter().enumerate() {
                    poly[i] = c;
                }
            }
            if k < m {
                for (i, &c) in rows[k as usize].iter().enumerate() {
                    let slot = &mut poly[i + k as usize];
                    *slot = slot.checked_add(c).ok_or(Error::Overflow("Gaussian binomial"))?;
                }
            }
            next.push(poly);
        }
        rows = next;
    }
    Ok(rows.swap_remove(d as usize))
}

/// `μ_T` of the variety, as an element of `R_T(k)`.
pub fn measure(v: &TwistedVariety) -> Result<RtElement> {
    v.validate()?;
    let field = v.field();
    let k = BrauerClass::zero(&field);
    let mut e = RtElement::zero(&field);
    let to_i64 = |x: u64| i64::try_from(x).map_err(|_| Error::Overflow("measure multiplicity"));
    match v {
        TwistedVariety::SeveriBrauer(a) => {
            for i in 0..a.degree().min(a.period()) {
                let copies = (a.degree() - i).div_ceil(a.period());
                e.add_term(to_i64(copies)?, &a.class().scale(i as i64))?;
            }
        }
        TwistedVariety::Grassmannian { d, algebra } => {
            let per = algebra.period();
            for (j, c) in gauss_coeffs(algebra.degree(), *d)?.into_iter().enumerate() {
                e.add_term(to_i64(c)?, &algebra.class().scale((j as u64 % per) as i64))?;
            }
        }
        TwistedVariety::Quadric(q) => {
            let n = q.dim() as i64;
            e.add_term(n - 2, &k)?;
            if n % 2 == 1 {
                e.add_term(1, &clifford_odd(q)?)?;
            } else {
                e.add_term(2, &clifford_even_half(q)?)?;
            }
        }
        TwistedVariety::QuaternionProjective(a) => {
            let n = to_i64(a.degree())?;
            e.add_term((n + 3) / 4, &k)?;
            e.add_term(n / 4, a.class())?;
        }
        TwistedVariety::Involution {
            algebra,
            c_plus,
            c_minus,
        } => {
            let half = to_i64(algebra.degree() / 2)?;
            e.add_term(half - 1, &k)?;
            e.add_term(half - 1, algebra.class())?;
            e.add_term(1, c_plus)?;
            e.add_term(1, c_minus)?;
        }
        TwistedVariety::Product(factors) => {
            e = RtElement::one(&field);
            for f in factors {
                e = rt_mul(&e, &measure(f)?)?;
            }
        }
    }
    Ok(e)
}

/// The counting measure `n(F)`.
pub fn count_measure(v: &TwistedVariety) -> Result<i64> {
    v.validate()?;
    let to_i64 = |x: u64| i64::try_from(x).map_err(|_| Error::Overflow("count measure"));
    match v {
        TwistedVariety::SeveriBrauer(a) => to_i64(a.degree()),
        TwistedVariety::Grassmannian { d, algebra } => to_i64(
            crate::arith::binomial(algebra.degree(), *d).ok_or(Error::Overflow("binomial"))?,
        ),
        TwistedVariety::Quadric(q) => {
            let n = q.dim() as i64;
            Ok(if n % 2 == 1 { n - 1 } else { n })
        }
        TwistedVariety::QuaternionProjective(a) => to_i64(a.degree() / 2),
        TwistedVariety::Involution { algebra, .. } => to_i64(algebra.degree()),
        TwistedVariety::Product(factors) => factors.iter().try_fold(1i64, |acc, f| {
            acc.checked_mul(count_measure(f)?)
                .ok_or(Error::Overflow("count measure"))
        }),
    }
}

/// The split-algebra involution variety attached to an even-dimensional form
/// with trivial discriminant; it is the quadric of the form.
pub fn involution_from_form(q: &QuadraticForm) -> Result<TwistedVariety> {
    if !q.dim().is_multiple_of(2) {
        return Err(dom(format!("involution_from_form needs even dimension, got {}", q.dim())));
    }
    let c = clifford_even_half(q)?;
    let algebra = Csa::split(q.field(), q.dim() as u64)?;
    TwistedVariety::involution(algebra, c.clone(), c)
}

/// The degree-4 involution variety `C(a₁,b₁) × C(a₂,b₂)` of `(a₁,b₁) ⊗ (a₂,b₂)`.
pub fn involution_from_biquaternion(
    a1: &SquareClass,
    b1: &SquareClass,
    a2: &SquareClass,
    b2: &SquareClass,
    field: &FieldDescriptor,
) -> Result<TwistedVariety> {
    let c1 = quaternion_class(a1, b1, field)?;
    let c2 = quaternion_class(a2, b2, field)?;
    involution_from_quaternion_classes(&c1, &c2)
}

/// Degree-4 involution data from two quaternion classes, for backends where
/// the classes are declared rather than computed.
pub fn involution_from_quaternion_classes(c1: &BrauerClass, c2: &BrauerClass) -> Result<TwistedVariety> {
    for c in [c1, c2] {
        if c.order() > 2 {
            return Err(dom(format!("quaternion classes have period <= 2, got {}", c.order())));
        }
    }
    let algebra = Csa::new(c1.add(c2)?, 4)?;
    TwistedVariety::involution(algebra, c1.clone(), c2.clone())
}
