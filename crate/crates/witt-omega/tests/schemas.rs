//! The shipped JSON schemas accept what the binary reads and writes.

use std::path::PathBuf;
use std::process::Command;

use serde_json::{json, Value};

fn repo(parts: &[&str]) -> PathBuf {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.pop();
    p.pop();
    p.extend(parts);
    p
}

fn load(path: PathBuf) -> Value {
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    serde_json::from_str(&text).unwrap()
}

fn validator(name: &str) -> jsonschema::Validator {
    let schema = load(repo(&["schemas", name]));
    jsonschema::validator_for(&schema).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn assert_valid(schema: &str, instance: &Value) {
    let v = validator(schema);
    let errors: Vec<String> = v.iter_errors(instance).map(|e| format!("{} at {}", e, e.instance_path())).collect();
    assert!(errors.is_empty(), "{schema}: {errors:?}\n{instance}");
}

fn data(name: &str) -> Value {
    load(repo(&["crates", "witt-omega", "examples", "data", name]))
}

fn run(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_witt-omega")).args(args).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn run_json(args: &[&str]) -> Value {
    serde_json::from_slice(&run(args)).unwrap()
}

fn data_path(name: &str) -> String {
    repo(&["crates", "witt-omega", "examples", "data", name]).to_string_lossy().into_owned()
}

#[test]
fn every_schema_compiles() {
    let dir = repo(&["schemas"]);
    let mut count = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        validator(&name);
        count += 1;
    }
    assert!(count >= 10);
}

#[test]
fn input_files_match_their_schemas() {
    assert_valid("gamma-element.schema.json", &data("symbol_x.json"));
    assert_valid("gamma-element.schema.json", &data("symbol_y.json"));
    assert_valid("module.schema.json", &data("symbol_x.json")["module"]);
    assert_valid("algebra.schema.json", &data("f4.json"));
    assert_valid("algebra.schema.json", &data("dual_numbers_z4.json"));
    assert_valid("transfer-request.schema.json", &data("transfer_line.json"));
    assert_valid("rho-request.schema.json", &data("rho_f2xf4.json"));
}

#[test]
fn schemas_reject_what_the_reader_rejects() {
    let v = validator("gamma-element.schema.json");
    let mut both = data("symbol_x.json");
    both["vector"] = json!({"degree": 2, "coeffs": []});
    assert!(!v.is_valid(&both));
    let mut neither = data("symbol_x.json");
    neither.as_object_mut().unwrap().remove("point");
    assert!(!v.is_valid(&neither));
    let mut negative = data("symbol_x.json");
    negative["module"]["weights"] = json!([0, -1]);
    assert!(!v.is_valid(&negative));

    let mut extra = data("f4.json");
    extra["colour"] = json!("red");
    assert!(!validator("algebra.schema.json").is_valid(&extra));
}

#[test]
fn outputs_match_their_schemas() {
    let pairing = run_json(&["eval", "pairing", &data_path("symbol_x.json"), &data_path("symbol_y.json")]);
    assert_valid("ring-element.schema.json", &pairing["pairing"]);

    let symbol = run_json(&["eval", "symbol", &data_path("symbol_y.json")]);
    assert_valid("gamma-vector.schema.json", &symbol["element"]);
    // The symbol can be fed back in as an explicit vector.
    let round = json!({"module": data("symbol_y.json")["module"], "degree": 2, "vector": symbol["element"]});
    assert_valid("gamma-element.schema.json", &round);

    let transfer = run_json(&["eval", "transfer", &data_path("transfer_line.json")]);
    assert_valid("polylaw.schema.json", &transfer["law"]);

    let lift = run_json(&["eval", "lift", &data_path("f4.json")]);
    assert_valid("algebra.schema.json", &lift["algebra"]);

    for functor in ["gamma", "omega", "big-omega", "small-omega", "tense", "chern"] {
        let report = run_json(&["structure", "--functor", functor, "--p", "2", "--m", "2", "--weights", "0,1", "--n", "1"]);
        assert_valid("structure-report.schema.json", &report);
    }
}

#[test]
fn report_lines_match_the_schema() {
    let text = String::from_utf8(run(&["verify", "witt"])).unwrap();
    for line in text.lines() {
        assert_valid("suite-line.schema.json", &serde_json::from_str(line).unwrap());
    }
}
