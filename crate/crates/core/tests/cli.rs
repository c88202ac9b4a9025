use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_umemura"))
        .args(args)
        .env_remove("UMEMURA_PRECISION_CAP")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

/// Checks `v` against the subset of JSON Schema used by the shipped schema:
/// `type`, `enum`, `properties`, `required`, `additionalProperties: false`,
/// `items`, `anyOf` and local `$ref`s.
fn check(v: &Value, schema: &Value, root: &Value, path: &str) -> Result<(), String> {
    if let Some(r) = schema.get("$ref").and_then(Value::as_str) {
        let target = r
            .trim_start_matches("#/")
            .split('/')
            .try_fold(root, |s, key| s.get(key))
            .ok_or_else(|| format!("dangling $ref {r}"))?;
        return check(v, target, root, path);
    }
    if let Some(options) = schema.get("anyOf").and_then(Value::as_array) {
        if !options.iter().any(|s| check(v, s, root, path).is_ok()) {
            return Err(format!("{path}: no alternative matches"));
        }
    }
    if let Some(allowed) = schema.get("enum").and_then(Value::as_array) {
        if !allowed.contains(v) {
            return Err(format!("{path}: {v} not in enum"));
        }
    }
    if let Some(t) = schema.get("type") {
        let types: Vec<&str> = match t {
            Value::String(s) => vec![s.as_str()],
            Value::Array(a) => a.iter().filter_map(Value::as_str).collect(),
            _ => return Err("bad type keyword".into()),
        };
        let ok = types.iter().any(|t| match *t {
            "object" => v.is_object(),
            "array" => v.is_array(),
            "string" => v.is_string(),
            "integer" => v.is_i64() || v.is_u64(),
            "boolean" => v.is_boolean(),
            "null" => v.is_null(),
            _ => false,
        });
        if !ok {
            return Err(format!("{path}: expected {types:?}, got {v}"));
        }
    }
    if let Some(obj) = v.as_object() {
        let props = schema.get("properties").and_then(Value::as_object);
        for key in schema
            .get("required")
            .and_then(Value::as_array)
            .into_iter()
            .flatten()
        {
            let key = key.as_str().unwrap();
            if !obj.contains_key(key) {
                return Err(format!("{path}: missing {key}"));
            }
        }
        for (key, value) in obj {
            match props.and_then(|p| p.get(key)) {
                Some(s) => check(value, s, root, &format!("{path}.{key}"))?,
                None if schema.get("additionalProperties") == Some(&Value::Bool(false)) => {
                    return Err(format!("{path}: unexpected key {key}"))
                }
                None => {}
            }
        }
    }
    if let (Some(items), Some(arr)) = (schema.get("items"), v.as_array()) {
        for (i, x) in arr.iter().enumerate() {
            check(x, items, root, &format!("{path}[{i}]"))?;
        }
    }
    Ok(())
}

fn schema() -> Value {
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/schema/report.schema.json"
    ))
    .unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn analyze_reports_match_the_schema() {
    let s = schema();
    for form in [
        "t0^2*t1^2",
        "1",
        "t0*t1",
        "t0*t1*(t0-t1)*(t0-2*t1)",
        "(t0^2+t1^2)^2*t0*t1",
        "t0^5*t1*(t0-t1)^2",
        "(t0^3-2*t1^3)^2*t0*t1",
    ] {
        let out = run(&["analyze", "--n", "4", "--form", form]);
        assert!(out.status.success(), "{form}");
        check(&json(&out), &s, &s, "$").unwrap_or_else(|e| panic!("{form}: {e}"));
    }
}

#[test]
fn schema_checker_rejects_wrong_shapes() {
    let s = schema();
    let mut v = json(&run(&["analyze", "--n", "3", "--form", "t0*t1"]));
    v["maximality"]["verdict"] = Value::String("Perhaps".into());
    assert!(check(&v, &s, &s, "$").is_err());
    let mut v = json(&run(&["analyze", "--n", "3", "--form", "t0*t1"]));
    v.as_object_mut().unwrap().remove("links");
    assert!(check(&v, &s, &s, "$").is_err());
}

#[test]
fn two_double_roots() {
    let v = json(&run(&["analyze", "--n", "3", "--form", "t0^2*t1^2"]));
    assert_eq!(v["singularLocus"].as_array().unwrap().len(), 2);
    let ledgers = v["resolutionLedgers"].as_array().unwrap();
    assert_eq!(ledgers.len(), 2);
    for l in ledgers {
        assert_eq!((l["k"].as_u64(), l["m"].as_u64()), (Some(2), Some(1)));
    }
    assert_eq!(v["maximality"]["verdict"], "NotMaximal");
}

#[test]
fn conjugate_and_maximality_commands() {
    let out = run(&[
        "conjugate",
        "--n",
        "3",
        "--form",
        "t0*t1*(t0-t1)*(t0-2*t1)",
        "--form2",
        "t0*t1*(t0-t1)*(t0-3*t1)",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["equivalence"]["result"], "Inequivalent");
    let out = run(&["maximality", "--n", "4", "--form", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["verdict"], "Maximal");
}

#[test]
fn exit_codes() {
    let bad = [
        vec!["analyze", "--n", "3", "--form", "t0^2 + t1"],
        vec!["analyze", "--n", "2", "--form", "t0*t1"],
        vec!["analyze", "--n", "3", "--form", "t0*(t1"],
        vec!["analyze", "--n", "3", "--form", "t0"],
        vec!["conjugate", "--n", "3", "--form", "t0*t1"],
        vec!["frobnicate"],
    ];
    for args in bad {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err: Value = serde_json::from_slice(&out.stderr).expect("stderr is JSON");
        assert!(err["error"]["kind"].is_string());
        assert!(out.stdout.is_empty());
    }
    let out = run(&[
        "analyze",
        "--n",
        "3",
        "--form",
        "t0*t1*(t0^3-2*t1^3)*(t0-t1)",
        "--precision-cap",
        "16",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn precision_cap_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_umemura"))
        .args([
            "analyze",
            "--n",
            "3",
            "--form",
            "t0*t1*(t0^3-2*t1^3)*(t0-t1)",
        ])
        .env("UMEMURA_PRECISION_CAP", "16")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn out_file_and_pretty() {
    let dir = std::env::temp_dir().join(format!("umemura-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("r.json");
    let out = run(&[
        "census",
        "--n",
        "3",
        "--form",
        "t0*t1",
        "--pretty",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["autProfile"]["horizontal"], "OneParameter");
    std::fs::remove_dir_all(dir).unwrap();
}
