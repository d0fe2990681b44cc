use std::process::{Command, Output};

use serde_json::{json, Value};
use tits_cli::{run_args, EXIT_CAPABILITY, EXIT_DOMAIN, EXIT_MISMATCH, EXIT_OK, EXIT_SCHEMA};

fn tits(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tits")).args(args).output().unwrap()
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn run(args: &[&str]) -> tits_cli::Response {
    run_args(std::iter::once("tits").chain(args.iter().copied()))
}

const C3: &str = r#"{"backend":"Q","inv":[["3","1/3"],["7","2/3"]]}"#;

#[test]
fn measure_of_conic_has_augmentation_two() {
    let v = json_of(&tits(&["measure", "--field", "Q", r#"{"sb":{"quat":[-1,3]}}"#]));
    assert_eq!(v["measure"]["aug"], 2);
    assert_eq!(v["count"], 2);
}

#[test]
fn quadric_family_instances_differ() {
    let v = json_of(&tits(&[
        "compare",
        "--family",
        "quadric",
        "[1,1,-1,1,-3,-3]",
        "[1,1,-1,1,-7,-7]",
    ]));
    assert_eq!(v["measure_equal"], false);
    assert_eq!(v["isomorphic"], "no");
}

#[test]
fn defining_relation_holds() {
    let lhs = format!(r#"[[1,{{"quat":[-1,3]}}],[1,{C3}]]"#);
    let rhs = format!(r#"[[1,"k"],[1,{{"sum":[{{"quat":[-1,3]}},{C3}]}}]]"#);
    let v = json_of(&tits(&["rt", "equal", &lhs, &rhs]));
    assert_eq!(v["equal"], true);
}

#[test]
fn repeated_invocations_are_byte_identical() {
    let cases: [&[&str]; 4] = [
        &["measure", r#"{"product":[{"quadric":{"albert":[1,1,-1,3]}},{"quadric":{"albert":[1,1,-1,7]}}]}"#],
        &["compare", "--family", "kollar", "[[-1,3],[-1,7]]", "[[-1,7],[-1,3]]"],
        &["qform", "--albert", "[-1,3,-1,7]"],
        &["--output", "table", "rt", "eval", r#"[[2,"k"],[1,{"quat":[-1,11]}]]"#],
    ];
    for args in cases {
        let a = tits(args);
        let b = tits(args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn object_keys_are_sorted() {
    fn sorted(v: &Value) -> bool {
        match v {
            Value::Object(m) => {
                let keys: Vec<_> = m.keys().collect();
                keys.windows(2).all(|w| w[0] < w[1]) && m.values().all(sorted)
            }
            Value::Array(a) => a.iter().all(sorted),
            _ => true,
        }
    }
    let out = tits(&["compare", "--family", "sb", r#"{"quat":[-1,3]}"#, r#"{"quat":[-1,7]}"#]);
    let text = String::from_utf8(out.stdout).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    assert!(sorted(&v));
    let keys: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("  \""))
        .map(|l| l.trim().split('"').nth(1).unwrap())
        .collect();
    let mut expected = keys.clone();
    expected.sort();
    assert_eq!(keys, expected);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["csa", r#"{"quat":[-1,3]}"#]).code, EXIT_OK);
    assert_eq!(run(&["csa", r#"{"quat":"#]).code, EXIT_SCHEMA);
    assert_eq!(run(&["csa", r#"{"octonion":[1,2]}"#]).code, EXIT_SCHEMA);
    assert_eq!(run(&["frobnicate"]).code, EXIT_SCHEMA);
    assert_eq!(run(&["--field", "Z/7", "csa", r#"{"split":2}"#]).code, EXIT_SCHEMA);

    let bad_degree = run(&["csa", r#"{"class":{"quat":[-1,3]},"deg":3}"#]);
    assert_eq!(bad_degree.code, EXIT_DOMAIN);
    assert!(bad_degree.stderr.contains("degree"), "{}", bad_degree.stderr);
    assert!(bad_degree.stdout.is_empty());

    assert_eq!(run(&["qform", "--albert", "[1,1,0,3]"]).code, EXIT_DOMAIN);
    assert_eq!(run(&["--field", "Qp:3", "csa", r#"{"quat":[1,1]}"#]).code, EXIT_CAPABILITY);

    let bin = tits(&["csa", r#"{"class":{"quat":[-1,3]},"deg":3}"#]);
    assert_eq!(bin.status.code(), Some(EXIT_DOMAIN));
    let help = tits(&["--help"]);
    assert_eq!(help.status.code(), Some(EXIT_OK));
}

#[test]
fn canonical_output_feeds_back_in() {
    let a = json_of(&tits(&["csa", r#"{"biquat":[-1,3,-1,7]}"#]));
    let again = json_of(&tits(&["csa", &a["algebra"].to_string()]));
    assert_eq!(a, again);

    let m = json_of(&tits(&["measure", r#"{"gr":{"d":2,"csa":{"class":{"quat":[-1,3]},"deg":4}}}"#]));
    let e = json_of(&tits(&["rt", "equal", &m["measure"].to_string(), &m["terms"].to_string()]));
    assert_eq!(e["equal"], true);
    let v = json_of(&tits(&["measure", &m["variety"].to_string()]));
    assert_eq!(v, m);

    let q = json_of(&tits(&["qform", "--quaternion-sum", "[[-1,3],[2,5]]"]));
    let q2 = json_of(&tits(&["qform", &q["form"].to_string()]));
    assert_eq!(q, q2);
}

#[test]
fn rt_mul_matches_product_measure() {
    let conic3 = r#"{"measure":{"sb":{"quat":[-1,3]}}}"#;
    let conic7 = r#"{"measure":{"sb":{"quat":[-1,7]}}}"#;
    let prod = json_of(&tits(&["rt", "mul", conic3, conic7]));
    let direct = r#"{"measure":{"product":[{"sb":{"quat":[-1,3]}},{"sb":{"quat":[-1,7]}}]}}"#;
    let e = json_of(&tits(&["rt", "equal", &prod["canonical"].to_string(), direct]));
    assert_eq!(e["equal"], true);
    let want = r#"[[1,"k"],[1,{"quat":[-1,3]}],[1,{"quat":[-1,7]}],[1,{"biquat":[-1,3,-1,7]}]]"#;
    let e = json_of(&tits(&["rt", "equal", direct, want]));
    assert_eq!(e["equal"], true);
}

#[test]
fn real_and_finite_fields() {
    let v = json_of(&tits(&["--field", "R", "qform", "[1,1,1]"]));
    assert_eq!(v["anisotropic"], true);
    let v = json_of(&tits(&["--field", "R", "qform", "[1,-1,1]"]));
    assert_eq!(v["anisotropic"], false);
    let v = json_of(&tits(&["--field", "Fq:9", "csa", r#"{"split":3}"#]));
    assert_eq!(v["period"], 1);
    let out = tits(&["--field", "Fq:9", "csa", r#"{"quat":[1,2]}"#]);
    assert_eq!(out.status.code(), Some(EXIT_CAPABILITY));
}

#[test]
fn abstract_field_from_file() {
    let decl = json!({
        "generators": [{"name": "x", "order": 2}, {"name": "y", "order": 2}],
        "indexes": [{"exps": [1, 1], "index": 4}]
    });
    let path = std::env::temp_dir().join(format!("tits-abstract-{}.json", std::process::id()));
    std::fs::write(&path, decl.to_string()).unwrap();
    let field = format!("abstract:{}", path.display());
    let v = json_of(&tits(&[
        "--field",
        &field,
        "compare",
        "--family",
        "kollar",
        r#"{"classes":[{"exps":[1,0]},{"exps":[0,1]}]}"#,
        r#"{"classes":[{"exps":[1,0]},{"exps":[1,0]}]}"#,
    ]));
    assert_eq!(v["subgroup_equal"], false);
    assert_eq!(v["birational"], "no");
    let missing = tits(&["--field", "abstract:/nonexistent/decl.json", "csa", r#"{"split":2}"#]);
    assert_ne!(missing.status.code(), Some(EXIT_OK));
    std::fs::remove_file(path).ok();
}

#[test]
fn full_corpus_passes() {
    let r = run(&["corpus"]);
    assert_eq!(r.code, EXIT_OK, "{}{}", r.stdout, r.stderr);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["passed"], v["total"]);
    assert!(v["total"].as_u64().unwrap() >= 20);
}

#[test]
fn perturbed_case_is_named() {
    let r = run(&["corpus", "--perturb", "conics-3-vs-7"]);
    assert_eq!(r.code, EXIT_MISMATCH);
    assert!(r.stderr.contains("conics-3-vs-7"));
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["failed"], json!(["conics-3-vs-7"]));

    let r = run(&["corpus", "--perturb", "error-malformed-descriptor"]);
    assert_eq!(r.code, EXIT_MISMATCH);

    assert_eq!(run(&["corpus", "--perturb", "no-such-case"]).code, EXIT_SCHEMA);
}

#[test]
fn empty_filter_is_a_noop() {
    let r = run(&["corpus", "--filter", "matches-nothing-at-all"]);
    assert_eq!(r.code, EXIT_OK);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["total"], 0);
    let r = run(&["corpus", "--filter", "conics"]);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["total"], 2);
}
