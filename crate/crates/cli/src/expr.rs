//! JSON descriptor language for classes, algebras, forms, varieties and `R_T` elements.
//!
//! Every canonical serialization produced by the engine is accepted back, so
//! output can be fed straight into another invocation.

use serde_json::Value;
use tits_core::csa::{quaternion, quaternion_class, tensor};
use tits_core::field::parse_square_class;
use tits_core::measure::{
    involution_from_biquaternion, involution_from_form, involution_from_quaternion_classes, measure,
};
use tits_core::qform::{albert, quaternion_sum_form};
use tits_core::rt::{rt_add, rt_mul, RtCanonical};
use tits_core::{
    BrauerClass, Csa, Error, FieldDescriptor, QuadraticForm, Result, RtElement, SquareClass,
    TwistedVariety,
};

fn schema(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// The single `(key, value)` of a one-key object.
fn tagged(v: &Value) -> Option<(&str, &Value)> {
    match v.as_object() {
        Some(m) if m.len() == 1 => m.iter().next().map(|(k, v)| (k.as_str(), v)),
        _ => None,
    }
}

fn array<'a>(v: &'a Value, what: &str, len: Option<usize>) -> Result<&'a [Value]> {
    let arr = v
        .as_array()
        .ok_or_else(|| schema(format!("{what}: expected an array, got {v}")))?;
    if let Some(n) = len {
        if arr.len() != n {
            return Err(schema(format!("{what}: expected {n} entries, got {}", arr.len())));
        }
    }
    Ok(arr)
}

fn uint(v: &Value, what: &str) -> Result<u64> {
    v.as_u64()
        .ok_or_else(|| schema(format!("{what}: expected a non-negative integer, got {v}")))
}

fn int(v: &Value, what: &str) -> Result<i64> {
    v.as_i64()
        .ok_or_else(|| schema(format!("{what}: expected an integer, got {v}")))
}

pub fn square_class(v: &Value, field: &FieldDescriptor) -> Result<SquareClass> {
    match v {
        Value::Number(n) => parse_square_class(&n.to_string(), field),
        Value::String(s) => parse_square_class(s, field),
        other => Err(schema(format!("scalar: expected a number or \"a/b\" string, got {other}"))),
    }
}

fn square_classes<const N: usize>(v: &Value, field: &FieldDescriptor, what: &str) -> Result<[SquareClass; N]> {
    let arr = array(v, what, Some(N))?;
    let parsed: Vec<SquareClass> = arr.iter().map(|x| square_class(x, field)).collect::<Result<_>>()?;
    Ok(parsed.try_into().expect("length checked"))
}

/// Class expressions: `"k"`, `{"quat":[a,b]}`, `{"biquat":[a1,b1,a2,b2]}`,
/// `{"sum":[c,…]}`, `{"scale":[n,c]}`, `{"neg":c}`, or a canonical class.
pub fn class(v: &Value, field: &FieldDescriptor) -> Result<BrauerClass> {
    if v.as_str() == Some("k") {
        return Ok(BrauerClass::zero(field));
    }
    match tagged(v) {
        Some(("quat", x)) => {
            let [a, b] = square_classes(x, field, "quat")?;
            quaternion_class(&a, &b, field)
        }
        Some(("biquat", x)) => {
            let [a1, b1, a2, b2] = square_classes(x, field, "biquat")?;
            quaternion_class(&a1, &b1, field)?.add(&quaternion_class(&a2, &b2, field)?)
        }
        Some(("sum", x)) => array(x, "sum", None)?
            .iter()
            .try_fold(BrauerClass::zero(field), |acc, c| acc.add(&class(c, field)?)),
        Some(("scale", x)) => {
            let arr = array(x, "scale", Some(2))?;
            Ok(class(&arr[1], field)?.scale(int(&arr[0], "scale factor")?))
        }
        Some(("neg", x)) => Ok(class(x, field)?.neg()),
        _ if v.is_object() => BrauerClass::from_json(v, field),
        _ => Err(schema(format!("class: unrecognised expression {v}"))),
    }
}

/// Algebra expressions: `{"quat":[a,b]}`, `{"biquat":[…]}`, `{"split":n}`,
/// `{"tensor":[A,…]}`, or `{"class":c,"deg":n}`.
pub fn csa(v: &Value, field: &FieldDescriptor) -> Result<Csa> {
    match tagged(v) {
        Some(("quat", x)) => {
            let [a, b] = square_classes(x, field, "quat")?;
            quaternion(&a, &b, field)
        }
        Some(("biquat", x)) => {
            let [a1, b1, a2, b2] = square_classes(x, field, "biquat")?;
            tensor(&quaternion(&a1, &b1, field)?, &quaternion(&a2, &b2, field)?)
        }
        Some(("split", x)) => Csa::split(field, uint(x, "split degree")?),
        Some(("tensor", x)) => {
            let mut acc = Csa::split(field, 1)?;
            for a in array(x, "tensor", None)? {
                acc = tensor(&acc, &csa(a, field)?)?;
            }
            Ok(acc)
        }
        _ => {
            let c = v
                .get("class")
                .ok_or_else(|| schema(format!("algebra: unrecognised expression {v}")))?;
            let deg = uint(
                v.get("deg").ok_or_else(|| schema("algebra: missing 'deg'"))?,
                "deg",
            )?;
            Csa::new(class(c, field)?, deg)
        }
    }
}

/// Form expressions: a coefficient array, `{"coeffs":[…]}`,
/// `{"albert":[a1,b1,a2,b2]}` or `{"quaternion_sum":[[a,b],…]}`.
pub fn form(v: &Value, field: &FieldDescriptor) -> Result<QuadraticForm> {
    if v.is_array() {
        let coeffs = array(v, "form", None)?
            .iter()
            .map(|c| square_class(c, field))
            .collect::<Result<_>>()?;
        return QuadraticForm::new(coeffs, field);
    }
    match tagged(v) {
        Some(("coeffs", x)) => form(x, field),
        Some(("albert", x)) => {
            let [a1, b1, a2, b2] = square_classes(x, field, "albert")?;
            albert(&a1, &b1, &a2, &b2, field)
        }
        Some(("quaternion_sum", x)) => {
            let pairs = array(x, "quaternion_sum", None)?
                .iter()
                .map(|p| square_classes::<2>(p, field, "quaternion_sum pair").map(|[a, b]| (a, b)))
                .collect::<Result<Vec<_>>>()?;
            quaternion_sum_form(&pairs, field)
        }
        _ => Err(schema(format!("form: unrecognised expression {v}"))),
    }
}

/// Variety expressions: `{"sb":A}`, `{"gr":{"d":n,"csa":A}}`, `{"quadric":q}`,
/// `{"hp":A}`, `{"iv":…}` and `{"product":[X,…]}`.
pub fn variety(v: &Value, field: &FieldDescriptor) -> Result<TwistedVariety> {
    let (tag, x) = tagged(v).ok_or_else(|| schema(format!("variety: unrecognised expression {v}")))?;
    match tag {
        "sb" => Ok(TwistedVariety::SeveriBrauer(csa(x, field)?)),
        "gr" => {
            let d = uint(x.get("d").ok_or_else(|| schema("gr: missing 'd'"))?, "d")?;
            let a = x.get("csa").ok_or_else(|| schema("gr: missing 'csa'"))?;
            TwistedVariety::grassmannian(d, csa(a, field)?)
        }
        "quadric" => TwistedVariety::quadric(form(x, field)?),
        "hp" => TwistedVariety::quaternion_projective(csa(x, field)?),
        "iv" => involution(x, field),
        "product" => TwistedVariety::product(
            array(x, "product", None)?
                .iter()
                .map(|f| variety(f, field))
                .collect::<Result<_>>()?,
        ),
        other => Err(schema(format!("variety: unknown family '{other}'"))),
    }
}

/// `{"csa":A,"c_plus":c,"c_minus":c}`, `{"form":q}`, `{"biquat":[a1,b1,a2,b2]}`
/// or `{"quats":[c1,c2]}`.
pub fn involution(x: &Value, field: &FieldDescriptor) -> Result<TwistedVariety> {
    match tagged(x) {
        Some(("form", q)) => involution_from_form(&form(q, field)?),
        Some(("biquat", s)) => {
            let [a1, b1, a2, b2] = square_classes(s, field, "iv biquat")?;
            involution_from_biquaternion(&a1, &b1, &a2, &b2, field)
        }
        Some(("quats", s)) => {
            let arr = array(s, "iv quats", Some(2))?;
            involution_from_quaternion_classes(&class(&arr[0], field)?, &class(&arr[1], field)?)
        }
        _ => {
            let get = |k: &str| x.get(k).ok_or_else(|| schema(format!("iv: missing '{k}'")));
            TwistedVariety::involution(
                csa(get("csa")?, field)?,
                class(get("c_plus")?, field)?,
                class(get("c_minus")?, field)?,
            )
        }
    }
}

/// `R_T` expressions: a list of `[m, class]`, `{"measure":X}`, `{"sum":[e,…]}`,
/// `{"mul":[e,…]}` or a canonical `{"aug":n,"primary":[…]}`.
pub fn rt(v: &Value, field: &FieldDescriptor) -> Result<RtElement> {
    if let Some(entries) = v.as_array() {
        let mut e = RtElement::zero(field);
        for entry in entries {
            let pair = array(entry, "R_T term", Some(2))?;
            e.add_term(int(&pair[0], "multiplicity")?, &class(&pair[1], field)?)?;
        }
        return Ok(e);
    }
    match tagged(v) {
        Some(("measure", x)) => measure(&variety(x, field)?),
        Some(("sum", x)) => array(x, "sum", None)?
            .iter()
            .try_fold(RtElement::zero(field), |acc, e| rt_add(&acc, &rt(e, field)?)),
        Some(("mul", x)) => array(x, "mul", None)?
            .iter()
            .try_fold(RtElement::one(field), |acc, e| rt_mul(&acc, &rt(e, field)?)),
        _ if v.get("aug").is_some() => RtCanonical::from_json(v, field)?.lift(field),
        _ => Err(schema(format!("R_T element: unrecognised expression {v}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    const Q: FieldDescriptor = FieldDescriptor::Rational;

    #[test]
    fn canonical_forms_parse_back() {
        let a = csa(&json!({"biquat":[-1,3,-1,7]}), &Q).unwrap();
        assert_eq!(csa(&a.to_json(), &Q).unwrap(), a);
        let q = form(&json!({"albert":[1,1,-1,3]}), &Q).unwrap();
        assert_eq!(form(&q.to_json(), &Q).unwrap(), q);
        let v = variety(&json!({"product":[{"sb":{"quat":[-1,3]}},{"iv":{"biquat":[-1,3,-1,7]}}]}), &Q).unwrap();
        assert_eq!(variety(&v.to_json(), &Q).unwrap(), v);
        let e = rt(&json!({"measure":{"gr":{"d":2,"csa":{"class":{"quat":[-1,3]},"deg":4}}}}), &Q).unwrap();
        assert_eq!(rt(&e.to_json(), &Q).unwrap(), e);
        let n = tits_core::rt::normalize(&e).unwrap();
        let lifted = rt(&n.to_json(), &Q).unwrap();
        assert!(tits_core::rt::rt_equal(&lifted, &e).unwrap());
    }

    #[test]
    fn class_arithmetic() {
        let c = class(&json!({"sum":[{"quat":[-1,3]},{"quat":[-1,3]}]}), &Q).unwrap();
        assert!(c.is_zero());
        let d = class(&json!({"scale":[3, {"quat":[-1,7]}]}), &Q).unwrap();
        assert_eq!(d, class(&json!({"quat":[-1,7]}), &Q).unwrap());
        assert!(matches!(class(&json!(5), &Q), Err(Error::Parse(_))));
    }
}
