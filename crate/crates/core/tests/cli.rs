use kmot::cli::{ResultDocument, EXIT_INVALID};
use kmot::inference::Decision;
use serde_json::Value;
use std::path::Path;
use std::process::Command;

fn kmot(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_kmot")).args(args).output().unwrap();
    let text = if out.stdout.is_empty() { out.stderr } else { out.stdout };
    (out.status.code().unwrap(), String::from_utf8(text).unwrap())
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn samples_without_support_file() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "s.csv", "group,x1\nA,5\nA,5\nA,10\nB,10\n");
    let (code, text) = kmot(&["mot", "--samples", &s]);
    assert_eq!(code, 0, "{text}");
    let doc = ResultDocument::from_json(&text).unwrap();
    assert_eq!(doc.support_size, Some(2));
    assert_eq!(doc.groups.iter().map(|g| g.n).collect::<Vec<_>>(), vec![3, 1]);
    // W2^2 = (2/3) * 25, MOT = W2^2 / 4
    assert!((doc.mot.unwrap().value - 25.0 / 6.0).abs() < 1e-12);
}

#[test]
fn three_d_samples_have_twelve_support_points() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("group,x,y,z\n");
    for g in ["a", "b"] {
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..3 {
                    text.push_str(&format!("{g},{x},{y},{z}\n"));
                }
            }
        }
    }
    let s = write(dir.path(), "s.csv", &text);
    let (code, out) = kmot(&["mot", "--samples", &s]);
    assert_eq!(code, 0);
    assert_eq!(ResultDocument::from_json(&out).unwrap().support_size, Some(12));
}

#[test]
fn bad_weight_sum_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(
        dir.path(),
        "m.json",
        "{\"support\": [[5], [10]],\n \"groups\": [\n  {\"name\": \"a\", \"weights\": [0.5, 0.4], \"n\": 3}]}\n",
    );
    let (code, text) = kmot(&["test", "--measures", &m]);
    assert_eq!(code, EXIT_INVALID);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["error"]["kind"], "ParseError");
    assert!(v["error"]["message"].as_str().unwrap().contains("line 3"));
}

#[test]
fn invalid_configuration_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "s.csv", "group,x1\nA,1\nB,2\n");
    let m = write(dir.path(), "m.json", "{\"support\": [[1]], \"groups\": []}");
    assert_eq!(kmot(&["test", "--samples", &s, "--alpha", "1.5"]).0, EXIT_INVALID);
    assert_eq!(kmot(&["test", "--samples", &s, "--measures", &m]).0, EXIT_INVALID);
    assert_eq!(kmot(&["test"]).0, EXIT_INVALID);
    assert_eq!(kmot(&["test", "--samples", &s, "--replicates", "0"]).0, EXIT_INVALID);
}

#[test]
fn identical_groups_are_retained() {
    let dir = tempfile::tempdir().unwrap();
    let rows = "1,0\n2,0\n2,1\n3,1\n";
    let text = format!(
        "group,x1,x2\n{}{}",
        rows.lines().map(|r| format!("a,{r}\n")).collect::<String>(),
        rows.lines().map(|r| format!("b,{r}\n")).collect::<String>()
    );
    let s = write(dir.path(), "s.csv", &text);
    for method in ["derivative", "ub0", "mn", "permutation"] {
        let (code, out) = kmot(&["test", "--samples", &s, "--method", method, "--replicates", "50"]);
        assert_eq!(code, 0, "{out}");
        let t = ResultDocument::from_json(&out).unwrap().test.unwrap();
        assert_eq!(t.statistic, 0.0, "{method}");
        assert_eq!(t.decision, Decision::Retain, "{method}");
    }
}

#[test]
fn power_grid_matches_the_bound() {
    let (code, out) = kmot(&["power", "--dual-constant", "25", "--delta-grid", "25", "--n-grid", "50,800"]);
    assert_eq!(code, 0, "{out}");
    let p = ResultDocument::from_json(&out).unwrap().power.unwrap();
    assert!(p.points[0].bound < 1e-3);
    assert!(p.points[1].bound > 1.0 - 1e-12);
}

#[test]
fn sparse_simulation_reports_the_reference_value() {
    let (code, out) = kmot(&[
        "simulate", "--family", "sparse", "--k", "3", "--n-grid", "30", "--trials", "2", "--replicates", "20",
    ]);
    assert_eq!(code, 0, "{out}");
    let sim = ResultDocument::from_json(&out).unwrap().simulation.unwrap();
    // the built-in pair has W2^2 = 0.8
    let expected = 2.0 / 9.0 * 0.8;
    for row in &sim.rows {
        assert!((row.truth - expected).abs() < 1e-12);
        assert!((row.truth_lp - expected).abs() < 1e-9);
    }
}

#[test]
fn documents_round_trip_and_tables_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(
        dir.path(),
        "m.json",
        r#"{"support": [[0, 0], [1, 0], [0, 2]], "groups": [
            {"name": "a", "weights": [0.2, 0.3, 0.5], "n": 80},
            {"name": "b", "weights": [0.5, 0.3, 0.2], "n": 90},
            {"name": "c", "weights": [0.3, 0.4, 0.3], "n": 70}]}"#,
    );
    let tables = dir.path().join("tables");
    let out_path = dir.path().join("doc.json");
    let (code, _) = kmot(&[
        "cr",
        "--measures",
        &m,
        "--replicates",
        "60",
        "--tables",
        tables.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&out_path).unwrap();
    let doc = ResultDocument::from_json(&text).unwrap();
    assert_eq!(doc.to_json().unwrap(), text.trim_end());
    let ci = doc.confidence_region.unwrap();
    assert!(ci.lower <= ci.upper);
    assert!(tables.join("quantiles.csv").exists());
    assert!(tables.join("histogram.csv").exists());

    let (code, out) = kmot(&["mot", "--measures", &m, "--timing"]);
    assert_eq!(code, 0);
    let doc = ResultDocument::from_json(&out).unwrap();
    assert!(doc.timing.is_some());
    let mot = doc.mot.as_ref().unwrap();
    let mass: f64 = mot.coupling.iter().map(|c| c.mass).sum();
    assert!((mass - 1.0).abs() < 1e-9);
    assert_eq!(ResultDocument::from_json(&doc.to_json().unwrap()).unwrap(), doc);
}

#[test]
fn lazy_and_dense_modes_agree_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(
        dir.path(),
        "m.json",
        r#"{"support": [[0], [1], [3], [4]], "groups": [
            {"name": "a", "weights": [0.1, 0.2, 0.3, 0.4], "n": 10},
            {"name": "b", "weights": [0.4, 0.3, 0.2, 0.1], "n": 10},
            {"name": "c", "weights": [0.25, 0.25, 0.25, 0.25], "n": 10}]}"#,
    );
    let value = |mode: &str| {
        let (code, out) = kmot(&["mot", "--measures", &m, "--solve-mode", mode]);
        assert_eq!(code, 0, "{out}");
        ResultDocument::from_json(&out).unwrap().mot.unwrap().value
    };
    assert!((value("dense") - value("lazy")).abs() < 1e-9);
}
