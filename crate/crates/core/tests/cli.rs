use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

struct Run {
    stdout: String,
    stderr: String,
    code: i32,
}

fn rescong(args: &[&str]) -> Run {
    rescong_env(args, &[])
}

fn rescong_env(args: &[&str], env: &[(&str, &str)]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_rescong"))
        .args(args)
        .envs(env.iter().copied())
        .output()
        .unwrap();
    Run {
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
        code: out.status.code().unwrap(),
    }
}

fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("schema")
}

fn load_schema(name: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(schema_dir().join(name)).unwrap()).unwrap()
}

/// Enough of JSON Schema for the documents shipped with the crate: `type`,
/// `enum`, `required`, `properties`, `additionalProperties`, `items`,
/// `minItems`, `minimum`, `maximum`, `oneOf` and `$ref` to sibling files or
/// local `$defs`.
fn validate(value: &Value, schema: &Value, root: &Value, path: &str) -> Result<(), String> {
    let fail = |msg: String| Err(format!("{path}: {msg}"));
    if let Some(r) = schema.get("$ref").and_then(Value::as_str) {
        return match r.strip_prefix("#/$defs/") {
            Some(def) => validate(value, &root["$defs"][def], root, path),
            None => {
                let other = load_schema(r);
                validate(value, &other, &other, path)
            }
        };
    }
    if let Some(options) = schema.get("oneOf").and_then(Value::as_array) {
        let matching = options
            .iter()
            .filter(|o| validate(value, o, root, path).is_ok())
            .count();
        if matching != 1 {
            return fail(format!("{matching} oneOf branches match"));
        }
    }
    if let Some(allowed) = schema.get("enum").and_then(Value::as_array) {
        if !allowed.contains(value) {
            return fail(format!("{value} not in {allowed:?}"));
        }
    }
    if let Some(ty) = schema.get("type").and_then(Value::as_str) {
        let ok = match ty {
            "object" => value.is_object(),
            "array" => value.is_array(),
            "string" => value.is_string(),
            "boolean" => value.is_boolean(),
            "number" => value.is_number(),
            "integer" => value.as_number().map_or(false, |n| {
                n.to_string()
                    .chars()
                    .all(|c| c.is_ascii_digit() || c == '-')
            }),
            other => panic!("unsupported type {other}"),
        };
        if !ok {
            return fail(format!("expected {ty}, got {value}"));
        }
    }
    if let Some(n) = value.as_number() {
        let x: f64 = n.to_string().parse().unwrap();
        if let Some(min) = schema.get("minimum").and_then(Value::as_f64) {
            if x < min {
                return fail(format!("{n} below {min}"));
            }
        }
        if let Some(max) = schema.get("maximum").and_then(Value::as_f64) {
            if x > max {
                return fail(format!("{n} above {max}"));
            }
        }
    }
    if let Some(obj) = value.as_object() {
        for key in schema
            .get("required")
            .and_then(Value::as_array)
            .into_iter()
            .flatten()
        {
            let key = key.as_str().unwrap();
            if !obj.contains_key(key) {
                return fail(format!("missing {key}"));
            }
        }
        let props = schema.get("properties").and_then(Value::as_object);
        for (key, v) in obj {
            let sub = format!("{path}.{key}");
            match props.and_then(|p| p.get(key)) {
                Some(s) => validate(v, s, root, &sub)?,
                None => match schema.get("additionalProperties") {
                    Some(Value::Bool(false)) => return fail(format!("unexpected key {key}")),
                    Some(s @ Value::Object(_)) => validate(v, s, root, &sub)?,
                    _ => {}
                },
            }
        }
    }
    if let Some(items) = value.as_array() {
        if let Some(min) = schema.get("minItems").and_then(Value::as_u64) {
            if (items.len() as u64) < min {
                return fail(format!("fewer than {min} items"));
            }
        }
        if let Some(s) = schema.get("items") {
            for (i, v) in items.iter().enumerate() {
                validate(v, s, root, &format!("{path}[{i}]"))?;
            }
        }
    }
    Ok(())
}

fn assert_conforms(text: &str, schema: &str) {
    let schema = load_schema(schema);
    for line in text.lines() {
        let value: Value = serde_json::from_str(line).unwrap();
        if let Err(e) = validate(&value, &schema, &schema, "$") {
            panic!("{line}\n{e}");
        }
    }
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli");
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path
}

#[test]
fn human_output() {
    let run = rescong(&[
        "count", "--a", "2", "--b", "4", "--n", "6", "--s", "1", "--t", "1",
    ]);
    assert_eq!(run.code, 0);
    assert_eq!(
        run.stdout,
        "count 1\nsolvable true\nreason OK\nderived_d 2\nconvention power\nverified true\n"
    );
}

#[test]
fn json_reports_follow_the_schema() {
    let cases: &[&[&str]] = &[
        &[
            "count", "--a", "2", "--b", "4", "--n", "6", "--s", "1", "--t", "1",
        ],
        &[
            "count", "--a", "1,1", "--b", "3", "--n", "4", "--s", "1", "--t", "1,2", "--check",
        ],
        &[
            "count", "--a", "2", "--b", "1", "--n", "4", "--s", "1", "--t", "1",
        ],
        &[
            "count",
            "--a",
            "3,5,7",
            "--b",
            "-1",
            "--n",
            "12",
            "--s",
            "2",
            "--t",
            "1,2,3",
            "--convention",
            "linear",
        ],
        &[
            "count",
            "--a",
            "123456789012345678901234567890",
            "--b",
            "98765432109876543210987654321",
            "--n",
            "720720",
            "--s",
            "3",
            "--t",
            "1",
        ],
    ];
    for args in cases {
        let mut args = args.to_vec();
        args.extend(["--format", "json"]);
        let run = rescong(&args);
        assert_eq!(run.code, 0, "{args:?}: {}", run.stderr);
        assert_conforms(&run.stdout, "report.schema.json");
    }
}

#[test]
fn reports_round_trip_as_instance_files() {
    let run = rescong(&[
        "count", "--a", "3,5", "--b", "-7", "--n", "12", "--s", "2", "--t", "2,3", "--format",
        "json",
    ]);
    let report: Value = serde_json::from_str(run.stdout.trim()).unwrap();
    // b is echoed reduced modulo n^s
    assert_eq!(report["instance"]["b"].to_string(), "137");
    let path = temp_file("echo.json", &report["instance"].to_string());
    let again = rescong(&[
        "count",
        "--file",
        path.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(again.stdout, run.stdout);
}

#[test]
fn file_with_several_instances() {
    let path = temp_file(
        "batch.json",
        r#"[{"a":[1,1],"b":3,"n":4,"s":1,"t":[1,2]},{"a":[2],"b":4,"n":6,"s":1,"t":[1]}]"#,
    );
    let run = rescong(&[
        "count",
        "--file",
        path.to_str().unwrap(),
        "--format",
        "csv",
        "--check",
    ]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert_eq!(
        run.stdout,
        "a,b,n,s,t,count,solvable,reason,derived_d,convention,verified,oracle_count\n\
         \"1,1\",3,4,1,\"1,2\",1,true,OK,\"1,1\",power,true,1\n\
         2,4,6,1,1,1,true,OK,2,power,true,1\n"
    );
}

#[test]
fn field_level_diagnostics() {
    let path = temp_file(
        "bad.json",
        r#"[{"a":[1],"b":0,"n":6,"s":1,"t":[1]},{"a":[1],"b":0,"n":6,"s":0,"t":[1]}]"#,
    );
    let run = rescong(&["count", "--file", path.to_str().unwrap()]);
    assert_eq!(run.code, 2);
    assert_eq!(run.stderr, "error: [1].s: must be at least 1\n");
    assert!(run.stdout.is_empty());

    let run = rescong(&[
        "count", "--a", "1,2", "--b", "0", "--n", "6", "--s", "1", "--t", "1",
    ]);
    assert_eq!(run.code, 2);
    assert_eq!(
        run.stderr,
        "error: t: 1 restrictions given for 2 coefficients\n"
    );

    let run = rescong(&["count", "--file", "/nonexistent/instances.json"]);
    assert_eq!(run.code, 2);

    let run = rescong(&[
        "count", "--a", "x", "--b", "0", "--n", "6", "--s", "1", "--t", "1",
    ]);
    assert_eq!(run.code, 2);
}

#[test]
fn exit_code_contract() {
    let mismatch = rescong(&[
        "count",
        "--a",
        "0,1",
        "--b",
        "1",
        "--n",
        "2",
        "--s",
        "2",
        "--t",
        "1,1",
        "--convention",
        "linear",
        "--check",
        "--format",
        "json",
    ]);
    assert_eq!(mismatch.code, 3);
    assert!(mismatch.stderr.contains("oracle counts"));
    // the report is still printed, flagged as unverified
    let report: Value = serde_json::from_str(mismatch.stdout.trim()).unwrap();
    assert_eq!(report["verified"], Value::Bool(false));

    let capacity = rescong_env(
        &[
            "count", "--a", "1", "--b", "1", "--n", "400", "--s", "2", "--t", "1", "--check",
        ],
        &[],
    );
    assert_eq!(capacity.code, 4);
    let raised = rescong_env(
        &[
            "count", "--a", "1", "--b", "1", "--n", "400", "--s", "2", "--t", "1", "--check",
        ],
        &[("RESCONG_ORACLE_MAX_MODULUS", "200000")],
    );
    assert_eq!(raised.code, 0, "{}", raised.stderr);
    let bad_env = rescong_env(
        &["fuzz", "--n-max", "2", "--exhaustive"],
        &[("RESCONG_ORACLE_MAX_WORK", "lots")],
    );
    assert_eq!(bad_env.code, 2);
}

#[test]
fn enumerate() {
    let run = rescong(&[
        "enumerate",
        "--a",
        "2",
        "--b",
        "4",
        "--n",
        "6",
        "--s",
        "1",
        "--t",
        "1",
    ]);
    assert_eq!(run.stdout, "(5)\n");
    let run = rescong(&[
        "enumerate",
        "--a",
        "1,1",
        "--b",
        "3",
        "--n",
        "4",
        "--s",
        "1",
        "--t",
        "1,2",
        "--format",
        "json",
    ]);
    assert_conforms(&run.stdout, "enumeration.schema.json");
    let v: Value = serde_json::from_str(run.stdout.trim()).unwrap();
    assert_eq!(v["solutions"].to_string(), "[[1,2]]");
    let run = rescong(&[
        "enumerate",
        "--a",
        "1,1",
        "--b",
        "3",
        "--n",
        "4",
        "--s",
        "1",
        "--t",
        "1,1",
        "--format",
        "csv",
    ]);
    assert_eq!(run.stdout, "x1,x2\n");
}

#[test]
fn grs_and_tables() {
    assert_eq!(
        rescong(&["grs", "--r", "2", "--s", "2", "--m", "4"]).stdout,
        "3\n"
    );
    assert_eq!(
        rescong(&["grs", "--r", "12", "--s", "1", "--m", "-8"]).stdout,
        "-2\n"
    );
    let jordan = rescong(&["table", "jordan", "--s", "2", "--max", "6"]);
    assert_eq!(jordan.stdout.lines().next(), Some("n,jordan"));
    assert_eq!(jordan.stdout.lines().last(), Some("6,24"));
    let grs = rescong(&["table", "grs", "--s", "2", "--max", "2"]);
    assert_eq!(
        grs.stdout,
        "r,m,value\n1,0,1\n2,0,3\n2,1,-1\n2,2,-1\n2,3,-1\n"
    );
    let ram = rescong(&[
        "table",
        "ramanujan",
        "--max",
        "3",
        "--m-min",
        "1",
        "--m-max",
        "2",
    ]);
    assert_eq!(
        ram.stdout,
        "r,m,value\n1,1,1\n1,2,1\n2,1,-1\n2,2,1\n3,1,-1\n3,2,-1\n"
    );
    assert_eq!(rescong(&["grs", "--r", "0", "--m", "1"]).code, 2);
}

#[test]
fn fuzz_command() {
    let out = Path::new(env!("CARGO_TARGET_TMPDIR")).join("fuzz-reports.jsonl");
    let run = rescong(&[
        "fuzz",
        "--n-max",
        "8",
        "--s-max",
        "2",
        "--k-max",
        "2",
        "--exhaustive",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert_conforms(&run.stdout, "fuzz-summary.schema.json");
    let summary: Value = serde_json::from_str(run.stdout.trim()).unwrap();
    assert_eq!(summary["all_agree"], Value::Bool(true));
    let reports = fs::read_to_string(&out).unwrap();
    assert_eq!(
        reports.lines().count().to_string(),
        summary["instances"].to_string()
    );
    assert_conforms(&reports, "fuzz-report.schema.json");
}

#[test]
fn seeded_fuzz_is_reproducible() {
    let args = [
        "fuzz", "--n-max", "6", "--s-max", "2", "--k-min", "3", "--k-max", "3", "--draws", "200",
        "--seed", "11",
    ];
    let first = rescong(&args);
    assert_eq!(first.code, 0, "{}", first.stderr);
    assert_eq!(first.stdout, rescong(&args).stdout);
}

#[test]
fn instance_schema_accepts_documented_examples() {
    let schema = load_schema("instance.schema.json");
    let good: Value = serde_json::from_str(r#"{"a":[1,1],"b":3,"n":4,"s":1,"t":[1,2]}"#).unwrap();
    assert!(validate(&good, &schema, &schema, "$").is_ok());
    let bad: Value = serde_json::from_str(r#"{"a":[1],"b":3,"n":4,"s":0,"t":[1]}"#).unwrap();
    assert!(validate(&bad, &schema, &schema, "$").is_err());
}
