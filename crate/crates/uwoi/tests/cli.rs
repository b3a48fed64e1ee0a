use std::process::Command;

use serde_json::Value;

fn uwoi(args: &[&str]) -> (i32, Value, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_uwoi")).args(args).output().expect("binary runs");
    let text = String::from_utf8(out.stdout).unwrap();
    let json = serde_json::from_str(&text).unwrap_or(Value::Null);
    (out.status.code().unwrap(), json, text)
}

#[test]
fn coefficients_of_the_subregular_orbit() {
    let (code, json, _) = uwoi(&["coefficients", "--partition", "2,1", "--S", "inf,2", "--cutoff", "1000"]);
    assert_eq!(code, 0);
    assert_eq!(json["schema"], uwoi::cli::SCHEMA);
    assert_eq!(json["result"]["terms"].as_array().unwrap().len(), 2);
    assert_eq!(json["failures"], Value::Array(vec![]));
}

#[test]
fn output_file_is_identical_to_stdout() {
    let path = std::env::temp_dir().join(format!("uwoi-cli-{}.json", std::process::id()));
    let args = ["richardson", "--partition", "3,1,1"];
    let (code, _, stdout) = uwoi(&args);
    assert_eq!(code, 0);
    let mut with_file = args.to_vec();
    let p = path.to_str().unwrap();
    with_file.extend(["--output", p]);
    let (code, _, empty) = uwoi(&with_file);
    assert_eq!(code, 0);
    assert!(empty.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), stdout);
    std::fs::remove_file(path).unwrap();
}

#[test]
fn runs_are_deterministic() {
    let args = ["solve-conjugator", "--n", "3", "--trials", "10", "--seed", "9"];
    assert_eq!(uwoi(&args).2, uwoi(&args).2);
    let args = ["weights", "--g", "2,1,0;0,1,0;1/3,0,1", "--place", "p3", "--partition", "2,1"];
    let (code, json, text) = uwoi(&args);
    assert_eq!(code, 0, "{text}");
    assert_eq!(json["result"]["orthogonality"]["exact"], true);
    assert_eq!(text, uwoi(&args).2);
}

#[test]
fn library_errors_exit_with_two() {
    let (code, json, _) = uwoi(&["coefficients", "--partition", "2,2", "--S", "inf", "--cutoff", "100"]);
    assert_eq!(code, 2);
    assert_eq!(json["ok"], false);
    assert_eq!(json["error"]["code"], "divergence");
    let (code, json, _) = uwoi(&["weights", "--g", "1,2;2,4", "--place", "p2", "--partition", "2"]);
    assert_eq!(code, 2);
    assert_eq!(json["error"]["code"], "singular");
}

#[test]
fn usage_errors_exit_with_two() {
    let (code, _, _) = uwoi(&["local-j", "--r", "2"]);
    assert_eq!(code, 2);
    let (code, _, _) = uwoi(&["--help"]);
    assert_eq!(code, 0);
}

#[test]
fn local_integrals_of_gl2() {
    let (code, json, text) = uwoi(&["local-j", "--r", "2", "--d", "1", "--place", "p3"]);
    assert_eq!(code, 0, "{text}");
    assert!(json["result"]["gl2"]["difference"].as_f64().unwrap() < 1e-12);
}
