use std::fs;

use valence_cli::run;
use valence_core::emotionml::{parse_and_validate, Vocabularies};

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["valence"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn analyze_prints_valid_emotionml() {
    let (code, out, _) = cli(&["analyze", "it's not good"]);
    assert_eq!(code, 0);
    let doc = parse_and_validate(&out, &Vocabularies::default()).unwrap();
    assert_eq!(doc.dimensions[0].value, 0.0);
}

#[test]
fn emotion_engine_emits_categories() {
    let (code, out, _) = cli(&["analyze", "--engine", "emotion", "--text", "I am so happy"]);
    assert_eq!(code, 0);
    let doc = parse_and_validate(&out, &Vocabularies::default()).unwrap();
    assert_eq!(doc.categories[0].name, "joy");
}

#[test]
fn json_format() {
    let (code, out, _) = cli(&["analyze", "--format", "json", "--engine", "lexical", "good"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["valence"]["label"], "positive");
}

#[test]
fn exit_codes() {
    assert_eq!(cli(&["--help"]).0, 0);
    assert_eq!(cli(&["--version"]).0, 0);
    assert_eq!(cli(&[]).0, 1);
    assert_eq!(cli(&["frobnicate"]).0, 1);
    let (code, _, err) = cli(&["analyze", "--engine", "bogus", "x"]);
    assert_eq!(code, 1);
    assert!(err.contains("bogus"));
    let (code, _, err) = cli(&["analyze", "--rules", "/no/such/rules.tsv", "x"]);
    assert_eq!(code, 2);
    assert!(err.contains("/no/such/rules.tsv"));
    assert_eq!(cli(&["analyze", "--engine", "statistical", "x"]).0, 2);
    assert_eq!(cli(&["analyze", "--lang", "fr", "bon"]).0, 2);
    assert_eq!(cli(&["cv", "--synthetic", "--k", "1"]).0, 1);
}

#[test]
fn malformed_lexicon_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let rules = dir.path().join("rules.tsv");
    fs::write(&rules, "R9\tnowhere\tsomething\tflip\n").unwrap();
    let (code, _, err) = cli(&["analyze", "--rules", rules.to_str().unwrap(), "x"]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn train_then_predict_and_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("train.tsv");
    let mut rows = String::new();
    for i in 0..30 {
        let (label, word) = [("positive", "splendid"), ("negative", "dreadful"), ("neutral", "scheduled")][i % 3];
        rows.push_str(&format!("r{i}\t{label}\tthe {word} thing number {i}\n"));
    }
    fs::write(&data, rows).unwrap();
    let model = dir.path().join("model.json");
    let m = model.to_str().unwrap();
    let (code, out, err) = cli(&["train", "--input", data.to_str().unwrap(), "--model", m, "--trees", "15"]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("15 trees"));

    let (code, out, _) = cli(&["predict", "--model", m, "what a dreadful day"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("negative\t"));

    let (code, out, _) = cli(&["analyze", "--engine", "statistical", "--model", m, "a splendid day"]);
    assert_eq!(code, 0);
    let doc = parse_and_validate(&out, &Vocabularies::default()).unwrap();
    assert!(doc.dimensions[0].value > 0.5);

    let (code, out, _) = cli(&["cv", "--input", data.to_str().unwrap(), "--k", "3", "--trees", "10"]);
    assert_eq!(code, 0);
    assert!(out.contains("3 folds"));
}

#[test]
fn config_file_is_read() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("valence.toml");
    fs::write(&config, "translator = \"mock\"\n[mock_translations.fr]\nbon = \"good\"\n").unwrap();
    let (code, out, err) = cli(&["--config", config.to_str().unwrap(), "analyze", "--lang", "fr", "bon"]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains(r#"value="1""#));

    fs::write(&config, "colour = 3\n").unwrap();
    assert_eq!(cli(&["--config", config.to_str().unwrap(), "analyze", "x"]).0, 2);
}

#[test]
fn phenomenon_evaluation_reports_delta() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.txt");
    let (code, out, _) = cli(&["evaluate", "--dataset", "phenomenon", "--report", report.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("delta vs lexical"));
    assert_eq!(fs::read_to_string(report).unwrap(), out);
}

#[test]
fn gauge_demo_runs() {
    let (code, out, _) = cli(&["gauge-demo"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 9);
}
