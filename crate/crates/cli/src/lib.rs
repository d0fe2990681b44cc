//! Library side of the `tits` command-line tool.
//!
//! [`run`] executes a parsed [`Request`] and never touches the process
//! environment beyond reading an `abstract:<file>` declaration, which keeps the
//! whole front end testable in-process.

pub mod corpus;
pub mod expr;

use std::ffi::OsString;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use tits_core::classify::{
    compare, compare_gr, compare_hp, compare_involution, compare_product_gr,
    compare_product_quadrics, compare_product_sb, compare_quadrics, compare_sb, kollar_products,
    ConicPair, Verdict,
};
use tits_core::measure::{count_measure, measure};
use tits_core::qform::{anisotropic_over_q, clifford_even_half, clifford_odd};
use tits_core::rt::{augmentation, normalize, rt_equal, rt_mul, subgroup_of_positive};
use tits_core::{AbstractTorsion, Error, FieldDescriptor, RtElement};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_SCHEMA: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_CAPABILITY: i32 = 4;

#[derive(Parser, Debug, Clone)]
#[command(name = "tits", version, about = "Tits motivic measure of twisted flag varieties")]
pub struct Request {
    /// Base field: Q | R | Qp:<p> | Fq:<q> | abstract:<file>
    #[arg(long, global = true, default_value = "Q")]
    pub field: String,

    #[arg(long, global = true, value_enum, default_value_t = OutputMode::Json)]
    pub output: OutputMode,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputMode {
    Json,
    Table,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Period, index and primary parts of a central simple algebra.
    Csa { algebra: String },
    /// Invariants of a diagonal quadratic form.
    Qform {
        form: Option<String>,
        /// Albert form of (a1,b1)⊗(a2,b2), given as a JSON array of four scalars.
        #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["form", "quaternion_sum"])]
        albert: Option<String>,
        /// Odd form with prescribed Clifford class, given as [[a,b],…].
        #[arg(long = "quaternion-sum", allow_hyphen_values = true, conflicts_with = "form")]
        quaternion_sum: Option<String>,
    },
    /// The measure μ_T of a variety together with its count.
    Measure { variety: String },
    /// Arithmetic in R_T(k).
    Rt {
        #[command(subcommand)]
        op: RtOp,
    },
    /// Compare two varieties of one family.
    Compare {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(required = true, allow_hyphen_values = true)]
        args: Vec<String>,
    },
    /// Run the golden corpus.
    Corpus {
        /// Only run cases whose id contains this string.
        #[arg(long)]
        filter: Option<String>,
        /// Corrupt the expectation of the named case.
        #[arg(long)]
        perturb: Option<String>,
    },
}

#[derive(Subcommand, Debug, Clone)]
pub enum RtOp {
    /// Canonical form.
    Normalize { element: String },
    /// Equality in R_T(k).
    Equal { left: String, right: String },
    /// Product in R_T(k).
    Mul { left: String, right: String },
    /// Terms, canonical form, augmentation and generated subgroup.
    Eval { element: String },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Two algebras.
    Sb,
    /// Two {"d":n,"csa":A} objects.
    Gr,
    /// Two forms.
    Quadric,
    /// Two algebras.
    Hp,
    /// Two involution descriptors.
    Iv,
    /// Four Albert-type forms.
    ProductQuadrics,
    /// Four algebras.
    ProductSb,
    /// Two {"d":n,"csa":[A,A']} objects.
    ProductGr,
    /// Two conic pairs [[a1,b1],[a2,b2]] or {"classes":[c1,c2]}.
    Kollar,
    /// Two variety descriptors of the same family.
    Variety,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Response {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Response {
    fn ok(stdout: String) -> Self {
        Response {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn error(e: &Error) -> Self {
        let (code, kind) = exit_code(e);
        Response {
            code,
            stdout: String::new(),
            stderr: format!("error[{kind}]: {e}\n"),
        }
    }
}

pub fn exit_code(e: &Error) -> (i32, &'static str) {
    match e {
        Error::Parse(_) => (EXIT_SCHEMA, "schema"),
        Error::Capability { .. } => (EXIT_CAPABILITY, "capability"),
        _ => (EXIT_DOMAIN, "domain"),
    }
}

/// Parses command-line arguments (including the program name) and runs them.
pub fn run_args<I, T>(args: I) -> Response
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Request::try_parse_from(args) {
        Ok(req) => run(&req),
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                Response {
                    code: EXIT_SCHEMA,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Response::ok(text)
            }
        }
    }
}

pub fn run(req: &Request) -> Response {
    if let Command::Corpus { filter, perturb } = &req.command {
        return corpus::run(filter.as_deref(), perturb.as_deref(), req.output);
    }
    match resolve_field(&req.field).and_then(|f| execute(&req.command, &f)) {
        Ok(v) => Response::ok(render(&v, req.output)),
        Err(e) => Response::error(&e),
    }
}

/// Parses `--field`, reading the declaration file for `abstract:<file>`.
pub fn resolve_field(s: &str) -> tits_core::Result<FieldDescriptor> {
    match s.strip_prefix("abstract:") {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Parse(format!("cannot read {path}: {e}")))?;
            let decl: Value = parse_json(&text)?;
            Ok(FieldDescriptor::abstract_torsion(AbstractTorsion::from_json(&decl)?))
        }
        None => s.parse(),
    }
}

fn parse_json(s: &str) -> tits_core::Result<Value> {
    serde_json::from_str(s).map_err(|e| Error::Parse(format!("invalid JSON {s:?}: {e}")))
}

pub fn render(v: &Value, mode: OutputMode) -> String {
    match mode {
        OutputMode::Json => format!("{}\n", serde_json::to_string_pretty(v).expect("serializable")),
        OutputMode::Table => {
            let mut rows = Vec::new();
            flatten("", v, &mut rows);
            let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            rows.iter()
                .map(|(k, v)| format!("{k:<width$}  {v}\n"))
                .collect()
        }
    }
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) if !m.is_empty() => {
            for (k, x) in m {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, x, rows);
            }
        }
        Value::String(s) => rows.push((prefix.to_owned(), s.clone())),
        other => rows.push((prefix.to_owned(), other.to_string())),
    }
}

/// Runs one command against a resolved field.
pub fn execute(cmd: &Command, field: &FieldDescriptor) -> tits_core::Result<Value> {
    match cmd {
        Command::Csa { algebra } => {
            let a = expr::csa(&parse_json(algebra)?, field)?;
            Ok(json!({
                "algebra": a.to_json(),
                "period": a.period(),
                "index": a.index(),
                "division": a.is_division(),
                "primary": a.class().primary_decomposition().iter()
                    .map(|(p, c)| json!([p, c.to_json()])).collect::<Vec<_>>(),
            }))
        }
        Command::Qform {
            form,
            albert,
            quaternion_sum,
        } => {
            let q = match (form, albert, quaternion_sum) {
                (Some(f), None, None) => expr::form(&parse_json(f)?, field)?,
                (None, Some(a), None) => expr::form(&json!({ "albert": parse_json(a)? }), field)?,
                (None, None, Some(p)) => expr::form(&json!({ "quaternion_sum": parse_json(p)? }), field)?,
                _ => return Err(Error::Parse("qform: give exactly one of FORM, --albert, --quaternion-sum".into())),
            };
            let clifford = if q.dim() % 2 == 1 {
                Some(clifford_odd(&q)?)
            } else if q.has_trivial_discriminant() {
                Some(clifford_even_half(&q)?)
            } else {
                None
            };
            let anisotropic = match field {
                FieldDescriptor::Rational => Some(anisotropic_over_q(&q)?),
                FieldDescriptor::Real => {
                    let neg = q.coeffs().iter().filter(|c| c.is_negative()).count();
                    Some(neg == 0 || neg == q.dim())
                }
                _ => None,
            };
            Ok(json!({
                "form": q.to_json(),
                "dim": q.dim(),
                "discriminant": q.discriminant().to_string(),
                "trivial_discriminant": q.has_trivial_discriminant(),
                "clifford": clifford.map(|c| c.to_json()),
                "anisotropic": anisotropic,
            }))
        }
        Command::Measure { variety } => {
            let v = expr::variety(&parse_json(variety)?, field)?;
            let m = measure(&v)?;
            Ok(json!({
                "variety": v.to_json(),
                "measure": normalize(&m)?.to_json(),
                "terms": m.to_json(),
                "count": count_measure(&v)?,
            }))
        }
        Command::Rt { op } => rt_op(op, field),
        Command::Compare { family, args } => Ok(compare_family(*family, args, field)?.to_json()),
        Command::Corpus { .. } => Err(Error::Parse("corpus cannot be nested".into())),
    }
}

fn rt_element(s: &str, field: &FieldDescriptor) -> tits_core::Result<RtElement> {
    expr::rt(&parse_json(s)?, field)
}

fn rt_op(op: &RtOp, field: &FieldDescriptor) -> tits_core::Result<Value> {
    match op {
        RtOp::Normalize { element } => Ok(normalize(&rt_element(element, field)?)?.to_json()),
        RtOp::Equal { left, right } => {
            let (l, r) = (rt_element(left, field)?, rt_element(right, field)?);
            Ok(json!({
                "equal": rt_equal(&l, &r)?,
                "left": normalize(&l)?.to_json(),
                "right": normalize(&r)?.to_json(),
            }))
        }
        RtOp::Mul { left, right } => {
            let p = rt_mul(&rt_element(left, field)?, &rt_element(right, field)?)?;
            Ok(json!({ "terms": p.to_json(), "canonical": normalize(&p)?.to_json() }))
        }
        RtOp::Eval { element } => {
            let e = rt_element(element, field)?;
            let subgroup = if e.is_positive() {
                Some(subgroup_of_positive(&e)?.to_json())
            } else {
                None
            };
            Ok(json!({
                "terms": e.to_json(),
                "canonical": normalize(&e)?.to_json(),
                "augmentation": augmentation(&e)?,
                "subgroup": subgroup,
            }))
        }
    }
}

fn arity(args: &[String], n: usize, family: &str) -> tits_core::Result<Vec<Value>> {
    if args.len() != n {
        return Err(Error::Parse(format!(
            "compare --family {family} takes {n} descriptors, got {}",
            args.len()
        )));
    }
    args.iter().map(|a| parse_json(a)).collect()
}

fn field_of<'a>(v: &'a Value, key: &str, family: &str) -> tits_core::Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| Error::Parse(format!("compare --family {family}: missing '{key}'")))
}

fn degree_arg(v: &Value, family: &str) -> tits_core::Result<u64> {
    field_of(v, "d", family)?
        .as_u64()
        .ok_or_else(|| Error::Parse(format!("compare --family {family}: 'd' must be a non-negative integer")))
}

fn conic_pair(v: &Value, field: &FieldDescriptor) -> tits_core::Result<ConicPair> {
    if let Some(classes) = v.get("classes") {
        let arr = classes
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or_else(|| Error::Parse("conic pair: 'classes' needs two entries".into()))?;
        return ConicPair::from_classes(expr::class(&arr[0], field)?, expr::class(&arr[1], field)?);
    }
    let pairs = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| Error::Parse(format!("conic pair: expected [[a1,b1],[a2,b2]], got {v}")))?;
    let mut s = Vec::new();
    for p in pairs {
        let ab = p
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or_else(|| Error::Parse(format!("conic pair: expected [a,b], got {p}")))?;
        for x in ab {
            s.push(expr::square_class(x, field)?);
        }
    }
    ConicPair::from_square_classes(&s[0], &s[1], &s[2], &s[3], field)
}

pub fn compare_family(family: Family, args: &[String], field: &FieldDescriptor) -> tits_core::Result<Verdict> {
    let name = family.to_possible_value().expect("no skipped variants").get_name().to_owned();
    let name = name.as_str();
    match family {
        Family::Sb | Family::Hp => {
            let v = arity(args, 2, name)?;
            let (a, b) = (expr::csa(&v[0], field)?, expr::csa(&v[1], field)?);
            if family == Family::Sb {
                compare_sb(&a, &b)
            } else {
                compare_hp(&a, &b)
            }
        }
        Family::Gr => {
            let v = arity(args, 2, name)?;
            compare_gr(
                degree_arg(&v[0], name)?,
                &expr::csa(field_of(&v[0], "csa", name)?, field)?,
                degree_arg(&v[1], name)?,
                &expr::csa(field_of(&v[1], "csa", name)?, field)?,
            )
        }
        Family::Quadric => {
            let v = arity(args, 2, name)?;
            compare_quadrics(&expr::form(&v[0], field)?, &expr::form(&v[1], field)?)
        }
        Family::Iv => {
            let v = arity(args, 2, name)?;
            compare_involution(&expr::involution(&v[0], field)?, &expr::involution(&v[1], field)?)
        }
        Family::ProductQuadrics => {
            let v = arity(args, 4, name)?;
            let f: Vec<_> = v.iter().map(|x| expr::form(x, field)).collect::<tits_core::Result<_>>()?;
            compare_product_quadrics(&f[0], &f[1], &f[2], &f[3])
        }
        Family::ProductSb => {
            let v = arity(args, 4, name)?;
            let a: Vec<_> = v.iter().map(|x| expr::csa(x, field)).collect::<tits_core::Result<_>>()?;
            compare_product_sb(&a[0], &a[1], &a[2], &a[3])
        }
        Family::ProductGr => {
            let v = arity(args, 2, name)?;
            let side = |x: &Value| -> tits_core::Result<(u64, tits_core::Csa, tits_core::Csa)> {
                let arr = field_of(x, "csa", name)?
                    .as_array()
                    .filter(|a| a.len() == 2)
                    .ok_or_else(|| Error::Parse("compare --family product-gr: 'csa' needs two algebras".into()))?;
                Ok((degree_arg(x, name)?, expr::csa(&arr[0], field)?, expr::csa(&arr[1], field)?))
            };
            let ((d, a, a1), (d2, a2, a3)) = (side(&v[0])?, side(&v[1])?);
            compare_product_gr(d, &a, &a1, d2, &a2, &a3)
        }
        Family::Kollar => {
            let v = arity(args, 2, name)?;
            kollar_products(&conic_pair(&v[0], field)?, &conic_pair(&v[1], field)?)
        }
        Family::Variety => {
            let v = arity(args, 2, name)?;
            compare(&expr::variety(&v[0], field)?, &expr::variety(&v[1], field)?)
        }
    }
}
