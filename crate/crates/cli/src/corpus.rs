//! Golden regression corpus, embedded at build time.

use serde_json::{json, Value};
use tits_core::{AbstractTorsion, Error, FieldDescriptor};

use crate::{execute, exit_code, render, OutputMode, Request, Response, EXIT_MISMATCH, EXIT_OK, EXIT_SCHEMA};
use clap::Parser;

pub const GOLDEN: &str = include_str!("../corpus/golden.json");

#[derive(Debug, Clone, PartialEq)]
pub struct Case {
    pub id: String,
    pub about: String,
    field: Value,
    args: Vec<String>,
    exit: i32,
    /// JSON pointer → expected value.
    expect: Vec<(String, Value)>,
}

pub fn load() -> Result<Vec<Case>, String> {
    let doc: Value = serde_json::from_str(GOLDEN).map_err(|e| format!("golden corpus: {e}"))?;
    let cases = doc
        .get("cases")
        .and_then(Value::as_array)
        .ok_or("golden corpus: missing 'cases'")?;
    cases.iter().map(parse_case).collect()
}

fn parse_case(v: &Value) -> Result<Case, String> {
    let text = |k: &str| {
        v.get(k)
            .and_then(Value::as_str)
            .map(str::to_owned)
            .ok_or_else(|| format!("golden case without '{k}': {v}"))
    };
    let args = v
        .get("args")
        .and_then(Value::as_array)
        .ok_or_else(|| format!("golden case without 'args': {v}"))?
        .iter()
        .map(|a| match a {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        })
        .collect();
    let expect = match v.get("expect") {
        None => Vec::new(),
        Some(Value::Object(m)) => m.iter().map(|(k, x)| (k.clone(), x.clone())).collect(),
        Some(other) => return Err(format!("'expect' must be an object, got {other}")),
    };
    Ok(Case {
        id: text("id")?,
        about: text("about")?,
        field: v.get("field").cloned().unwrap_or_else(|| json!("Q")),
        args,
        exit: v.get("exit").and_then(Value::as_i64).unwrap_or(0) as i32,
        expect,
    })
}

fn perturb(case: &mut Case) {
    match case.expect.first_mut() {
        Some((_, v)) => {
            *v = match v {
                Value::Bool(b) => Value::Bool(!*b),
                Value::Number(n) => json!(n.as_i64().unwrap_or(0) + 1),
                Value::String(s) => json!(format!("{s}~")),
                _ => json!("perturbed"),
            }
        }
        None => case.exit += 1,
    }
}

fn field_of(case: &Case) -> tits_core::Result<FieldDescriptor> {
    match &case.field {
        Value::String(s) => s.parse(),
        decl @ Value::Object(_) => Ok(FieldDescriptor::abstract_torsion(AbstractTorsion::from_json(decl)?)),
        other => Err(Error::Parse(format!("golden case field {other}"))),
    }
}

/// Runs one case, returning a mismatch description on failure.
pub fn check(case: &Case) -> Result<(), String> {
    let argv = std::iter::once("tits".to_owned()).chain(case.args.iter().cloned());
    let req = Request::try_parse_from(argv).map_err(|e| format!("arguments rejected: {e}"))?;
    let outcome = field_of(case).and_then(|f| execute(&req.command, &f));
    let (code, value) = match outcome {
        Ok(v) => (EXIT_OK, Some(v)),
        Err(e) => (exit_code(&e).0, None),
    };
    if code != case.exit {
        return Err(format!("exit code {code}, expected {}", case.exit));
    }
    let Some(value) = value else { return Ok(()) };
    for (ptr, want) in &case.expect {
        match value.pointer(ptr) {
            Some(got) if got == want => {}
            Some(got) => return Err(format!("{ptr}: got {got}, expected {want}")),
            None => return Err(format!("{ptr}: missing from output")),
        }
    }
    Ok(())
}

pub fn run(filter: Option<&str>, perturbed: Option<&str>, mode: OutputMode) -> Response {
    let mut cases = match load() {
        Ok(c) => c,
        Err(e) => {
            return Response {
                code: EXIT_SCHEMA,
                stdout: String::new(),
                stderr: format!("error[schema]: {e}\n"),
            }
        }
    };
    if let Some(id) = perturbed {
        match cases.iter_mut().find(|c| c.id == id) {
            Some(c) => perturb(c),
            None => {
                return Response {
                    code: EXIT_SCHEMA,
                    stdout: String::new(),
                    stderr: format!("error[schema]: no corpus case named '{id}'\n"),
                }
            }
        }
    }
    let selected: Vec<&Case> = cases
        .iter()
        .filter(|c| filter.is_none_or(|f| c.id.contains(f)))
        .collect();
    let mut rows = Vec::new();
    let mut failed = Vec::new();
    for case in &selected {
        match check(case) {
            Ok(()) => rows.push(json!({ "id": case.id, "status": "pass" })),
            Err(why) => {
                rows.push(json!({ "id": case.id, "status": "fail", "about": case.about, "reason": why }));
                failed.push(case.id.clone());
            }
        }
    }
    let report = json!({
        "total": selected.len(),
        "passed": selected.len() - failed.len(),
        "failed": failed,
        "cases": rows,
    });
    Response {
        code: if failed.is_empty() { EXIT_OK } else { EXIT_MISMATCH },
        stdout: render(&report, mode),
        stderr: failed
            .iter()
            .map(|id| format!("corpus case '{id}' failed\n"))
            .collect(),
    }
}
