//! End-to-end tests driving the compiled binary.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use darkdetect::corpus::write_csv;
use darkdetect::fixture::{synthetic_corpus, FixtureSpec};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_darkdetect"))
}

fn run(args: &[&str], cwd: &Path) -> Output {
    bin()
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn write_fixture(path: &Path, n_docs: usize, seed: u64) {
    let corpus = synthetic_corpus(&FixtureSpec {
        n_docs,
        fidelity: 0.95,
        seed,
    });
    let mut buffer = Vec::new();
    write_csv(&corpus, &mut buffer).unwrap();
    std::fs::write(path, buffer).unwrap();
}

/// Tiny hand-written separable dataset: positives say `hurry`.
fn write_separable(path: &Path, rows_per_class: usize) {
    let mut csv = String::from("text,label\n");
    for i in 0..rows_per_class {
        csv.push_str(&format!("Hurry! Only {} left in stock,1\n", i % 7 + 1));
        csv.push_str("Read our shipping information page,0\n");
    }
    std::fs::write(path, csv).unwrap();
}

#[test]
fn train_on_separable_fixture_reports_low_loss() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    write_separable(&data, 20);

    let output = run(
        &[
            "train",
            "--data",
            "data.csv",
            "--output",
            "model.json",
            "--lambda",
            "0.01",
            "--max-iters",
            "3000",
            "--seed",
            "1",
        ],
        dir.path(),
    );
    assert!(output.status.success(), "stderr: {}", stderr_of(&output));
    assert!(dir.path().join("model.json").exists());
    assert!(dir.path().join("model.json.manifest.json").exists());

    let stdout = stdout_of(&output);
    let loss_line = stdout
        .lines()
        .find(|l| l.starts_with("final_loss="))
        .expect("final loss line printed");
    let loss: f64 = loss_line
        .split('=')
        .nth(1)
        .unwrap()
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!(loss < 0.1, "final loss {loss}");
    assert!(stdout.contains("iterations="));
}

#[test]
fn train_unreadable_dataset_exits_2_naming_path() {
    let dir = tempfile::tempdir().unwrap();
    let output = run(
        &[
            "train",
            "--data",
            "missing-file.csv",
            "--output",
            "model.json",
        ],
        dir.path(),
    );
    assert_eq!(output.status.code(), Some(2));
    let stderr = stderr_of(&output);
    assert!(stderr.contains("missing-file.csv"), "stderr: {stderr}");
    assert!(stderr.contains("\"kind\":\"io\""), "stderr: {stderr}");
}

#[test]
fn train_bad_label_exits_1_with_row() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    std::fs::write(&data, "text,label\nfine,1\nfine,0\nbroken,maybe\n").unwrap();
    let output = run(
        &["train", "--data", "data.csv", "--output", "model.json"],
        dir.path(),
    );
    assert_eq!(output.status.code(), Some(1));
    let stderr = stderr_of(&output);
    assert!(stderr.contains("\"kind\":\"unknown_label\""), "stderr: {stderr}");
    assert!(stderr.contains('3'), "row number missing: {stderr}");
}

#[test]
fn evaluate_perfect_fixture_writes_consistent_reports() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    write_separable(&data, 25);

    let train = run(
        &[
            "train",
            "--data",
            "data.csv",
            "--output",
            "model.json",
            "--lambda",
            "0.01",
            "--max-iters",
            "2000",
        ],
        dir.path(),
    );
    assert!(train.status.success(), "stderr: {}", stderr_of(&train));

    let eval = run(
        &[
            "evaluate",
            "--model",
            "model.json",
            "--data",
            "data.csv",
            "--outdir",
            "report",
            "--split",
            "test",
        ],
        dir.path(),
    );
    assert!(eval.status.success(), "stderr: {}", stderr_of(&eval));

    let metrics = std::fs::read_to_string(dir.path().join("report/metrics.csv")).unwrap();
    let mut lines = metrics.lines();
    assert_eq!(lines.next(), Some("accuracy,precision,recall,f1,auc"));
    let values: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(values[0], 1.0, "accuracy on separable data");

    for file in [
        "metrics.txt",
        "confusion_matrix.csv",
        "roc_curve.csv",
        "predictions.csv",
        "manifest.json",
    ] {
        assert!(dir.path().join("report").join(file).exists(), "{file} missing");
    }

    // manifest checksums match emitted artifacts
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report/manifest.json")).unwrap())
            .unwrap();
    for artifact in manifest["outputs"].as_array().unwrap() {
        let path = dir.path().join(artifact["path"].as_str().unwrap());
        let recorded = artifact["sha256"].as_str().unwrap();
        let actual = darkdetect_cli::manifest::sha256_file(&path).unwrap();
        assert_eq!(recorded, actual, "checksum mismatch for {}", path.display());
    }
}

#[test]
fn evaluate_unwritable_outdir_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    write_separable(&data, 20);
    let train = run(
        &["train", "--data", "data.csv", "--output", "model.json"],
        dir.path(),
    );
    assert!(train.status.success());

    // a regular file in the parent position makes the report dir
    // uncreatable for any user, root included
    std::fs::write(dir.path().join("blocked"), b"file, not dir").unwrap();
    let eval = run(
        &[
            "evaluate",
            "--model",
            "model.json",
            "--data",
            "data.csv",
            "--outdir",
            "blocked/report",
        ],
        dir.path(),
    );
    assert_eq!(eval.status.code(), Some(2), "stderr: {}", stderr_of(&eval));
    assert!(stderr_of(&eval).contains("\"kind\":\"io\""));
}

#[test]
fn predict_streams_in_order() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    write_separable(&data, 25);
    let train = run(
        &[
            "train",
            "--data",
            "data.csv",
            "--output",
            "model.json",
            "--lambda",
            "0.01",
            "--max-iters",
            "2000",
        ],
        dir.path(),
    );
    assert!(train.status.success());

    let mut child = bin()
        .args(["predict", "--model", "model.json"])
        .current_dir(dir.path())
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"Hurry! Only 3 left!\n\nplain shipping information\n")
        .unwrap();
    let output = child.wait_with_output().unwrap();
    assert!(output.status.success());

    let stdout = stdout_of(&output);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines.len(), 3, "one output line per input line");

    // line 1: the dark-marked text scores positive
    let (score, label) = lines[0].split_once('\t').unwrap();
    assert!(score.parse::<f64>().unwrap() > 0.5);
    assert_eq!(label, "dark");

    // line 2: empty input → sigmoid(bias), thresholded
    let (score, _) = lines[1].split_once('\t').unwrap();
    let empty_score: f64 = score.parse().unwrap();
    let model = darkdetect::model::TrainedModel::load(&dir.path().join("model.json")).unwrap();
    let expected = darkdetect::model::sigmoid(model.bias());
    assert_eq!(empty_score.to_bits(), expected.to_bits());

    // line 3: benign text scores negative
    let (_, label) = lines[2].split_once('\t').unwrap();
    assert_eq!(label, "not_dark");

    // the predict manifest lands on stderr as JSON
    let stderr = stderr_of(&output);
    let manifest: serde_json::Value = serde_json::from_str(stderr.trim()).unwrap();
    assert_eq!(manifest["command"], "predict");
}

#[test]
fn predict_rejects_invalid_model_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("model.json"), b"{ not json").unwrap();
    let output = run(
        &["predict", "--model", "model.json", "some text"],
        dir.path(),
    );
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr_of(&output).contains("model_format"));
}

#[test]
fn cv_runs_twice_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    write_fixture(&data, 120, 5);

    for out in ["cv1", "cv2"] {
        let output = run(
            &[
                "cv",
                "--data",
                "data.csv",
                "--outdir",
                out,
                "--folds",
                "5",
                "--seed",
                "11",
                "--max-iters",
                "300",
            ],
            dir.path(),
        );
        assert!(output.status.success(), "stderr: {}", stderr_of(&output));
    }
    let a = std::fs::read(dir.path().join("cv1/cv_results.csv")).unwrap();
    let b = std::fs::read(dir.path().join("cv2/cv_results.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn gridsearch_emits_cell_rows_plus_best() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    write_fixture(&data, 80, 6);

    let output = run(
        &[
            "gridsearch",
            "--data",
            "data.csv",
            "--outdir",
            "grid",
            "--folds",
            "3",
            "--lambdas",
            "0.1,1,10",
            "--ngram-ranges",
            "1-1,1-2",
            "--weightings",
            "counts,tfidf",
            "--max-iters",
            "200",
        ],
        dir.path(),
    );
    assert!(output.status.success(), "stderr: {}", stderr_of(&output));

    let csv = std::fs::read_to_string(dir.path().join("grid/grid_results.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 1 + 12 + 1, "header + 12 cells + best line");
    assert!(lines[1].starts_with("grid,0,"));
    assert!(lines[13].starts_with("best,"));
    assert!(stdout_of(&output).contains("cells=12"));
}

#[test]
fn report_clamps_top_k_to_vocabulary() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    write_fixture(&data, 60, 8);

    let train = run(
        &[
            "train",
            "--data",
            "data.csv",
            "--output",
            "model.json",
            "--max-features",
            "10",
            "--ngram-max",
            "1",
            "--max-iters",
            "300",
        ],
        dir.path(),
    );
    assert!(train.status.success(), "stderr: {}", stderr_of(&train));

    let report = run(
        &[
            "report",
            "--model",
            "model.json",
            "--data",
            "data.csv",
            "--outdir",
            "rep",
            "--top-k",
            "20",
            "--folds",
            "3",
            "--lambdas",
            "0.1",
            "--ngram-ranges",
            "1-1",
            "--max-features-options",
            "10",
            "--weightings",
            "counts",
            "--max-iters", // not a report flag; ensure it is rejected
        ],
        dir.path(),
    );
    // unknown flag → clap usage error → exit 2
    assert_eq!(report.status.code(), Some(2));

    let report = run(
        &[
            "report",
            "--model",
            "model.json",
            "--data",
            "data.csv",
            "--outdir",
            "rep",
            "--top-k",
            "20",
            "--folds",
            "3",
            "--lambdas",
            "0.1",
            "--ngram-ranges",
            "1-1",
            "--max-features-options",
            "10",
            "--weightings",
            "counts",
        ],
        dir.path(),
    );
    assert!(report.status.success(), "stderr: {}", stderr_of(&report));

    let importance =
        std::fs::read_to_string(dir.path().join("rep/feature_importance.csv")).unwrap();
    // 10-term vocabulary → exactly 10 data rows despite top-k 20
    assert_eq!(importance.lines().count(), 1 + 10);
    for file in ["vocabulary.csv", "misclassifications.csv", "sensitivity.csv"] {
        assert!(dir.path().join("rep").join(file).exists());
    }
}

#[test]
fn manifest_note_flag_lands_in_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    write_separable(&data, 20);
    let output = run(
        &[
            "train",
            "--data",
            "data.csv",
            "--output",
            "model.json",
            "--note",
            "smoke run",
        ],
        dir.path(),
    );
    assert!(output.status.success());
    let manifest: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("model.json.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["notes"][0], "smoke run");
    assert_eq!(manifest["command"], "train");
    assert!(manifest["duration_ms"].is_u64());
}

#[test]
fn predict_single_argument_mode() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    write_separable(&data, 25);
    let train = run(
        &[
            "train",
            "--data",
            "data.csv",
            "--output",
            "model.json",
            "--lambda",
            "0.01",
        ],
        dir.path(),
    );
    assert!(train.status.success());

    let output = run(
        &["predict", "--model", "model.json", "HURRY only 2 left!!"],
        dir.path(),
    );
    assert!(output.status.success());
    let stdout = stdout_of(&output);
    assert_eq!(stdout.lines().count(), 1);
    assert!(stdout.trim_end().ends_with("dark"));
}

fn helper_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

#[test]
fn evaluate_split_sides_partition_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let data = helper_path(dir.path(), "data.csv");
    write_fixture(&data, 100, 9);
    let train = run(
        &[
            "train",
            "--data",
            "data.csv",
            "--output",
            "model.json",
            "--max-iters",
            "300",
            "--seed",
            "33",
        ],
        dir.path(),
    );
    assert!(train.status.success());

    let mut counts = Vec::new();
    for (side, out) in [("train", "e_train"), ("test", "e_test"), ("all", "e_all")] {
        let output = run(
            &[
                "evaluate",
                "--model",
                "model.json",
                "--data",
                "data.csv",
                "--outdir",
                out,
                "--split",
                side,
                "--seed",
                "33",
            ],
            dir.path(),
        );
        assert!(output.status.success(), "stderr: {}", stderr_of(&output));
        let predictions =
            std::fs::read_to_string(dir.path().join(out).join("predictions.csv")).unwrap();
        counts.push(predictions.lines().count() - 1);
    }
    assert_eq!(counts[0] + counts[1], counts[2]);
    assert_eq!(counts[0], 80);
    assert_eq!(counts[1], 20);
}
