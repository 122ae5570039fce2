use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn tim(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tim"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("spawn tim")
}

fn demo_copy(dir: &Path) -> PathBuf {
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/demo");
    let dst = dir.join("demo");
    fs::create_dir_all(&dst).unwrap();
    for entry in fs::read_dir(src).unwrap() {
        let entry = entry.unwrap();
        if entry.file_type().unwrap().is_file() {
            fs::copy(entry.path(), dst.join(entry.file_name())).unwrap();
        }
    }
    dst
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn version_and_usage_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = tim(&["--version"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("tim "));
    assert_eq!(tim(&["frobnicate"], dir.path()).status.code(), Some(1));
    assert_eq!(tim(&["classify", "--model"], dir.path()).status.code(), Some(1));
}

#[test]
fn input_errors_exit_with_code_1_and_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let out = tim(&["lines", "--posts", "missing.jsonl", "--registry", "lines.csv"], dir.path());
    assert_eq!(out.status.code(), Some(1));

    fs::write(dir.path().join("lines.csv"), "line_id,mode\n4,tram\n").unwrap();
    fs::write(
        dir.path().join("posts.jsonl"),
        "{\"id\":\"a\",\"platform\":\"twitter\",\"published_at\":\"2024-03-01T08:00:00Z\",\"text\":\"linia 4\"}\n{not json\n",
    )
    .unwrap();
    let out = tim(&["lines", "--posts", "posts.jsonl", "--registry", "lines.csv"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("posts.jsonl:2:"), "{}", stderr(&out));

    fs::write(dir.path().join("bad.toml"), "posts = \"nope.jsonl\"\n").unwrap();
    let out = tim(&["run", "--config", "bad.toml"], dir.path());
    assert_eq!(out.status.code(), Some(1));

    let out = tim(&["--tz", "Mars/Base", "impact", "--incidents", "x", "--regions", "y", "--flows", "z"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("Mars/Base"));
}

#[test]
fn stage_commands_reproduce_the_run_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let demo = demo_copy(dir.path());
    let ok = |args: &[&str]| {
        let out = tim(args, &demo);
        assert!(out.status.success(), "{args:?}: {}", stderr(&out));
    };

    ok(&["--seed", "42", "run", "--config", "run.toml"]);
    ok(&["--seed", "42", "train", "--labels", "incident", "--in", "incident_corpus.jsonl", "--model", "stages/incident.model.json"]);
    ok(&["--seed", "42", "train", "--labels", "sentiment", "--in", "sentiment_corpus.jsonl", "--model", "stages/sentiment.model.json"]);
    ok(&["classify", "--model", "stages/incident.model.json", "--in", "posts.jsonl", "--hashtag", "AlertMPK", "--out", "stages/labeled.jsonl"]);
    ok(&[
        "geoparse", "--posts", "stages/labeled.jsonl", "--gazetteer", "gazetteer.csv", "--stops", "stops.txt",
        "--triggers", "triggers.txt", "--threshold", "0.3", "--registry", "lines.csv", "--out", "stages/incidents.jsonl",
    ]);
    ok(&["lines", "--posts", "stages/labeled.jsonl", "--registry", "lines.csv", "--out", "stages/line_counts.csv"]);
    ok(&[
        "--tz", "Europe/Warsaw", "impact", "--incidents", "stages/incidents.jsonl", "--regions", "regions.geojson",
        "--flows", "flows.csv", "--out", "stages/impact.json",
    ]);
    ok(&["sentiment", "--model", "stages/sentiment.model.json", "--posts", "stages/labeled.jsonl", "--out", "stages/sentiment.csv"]);

    let read = |p: &str| fs::read_to_string(demo.join(p)).unwrap();
    for file in ["incident.model.json", "sentiment.model.json", "labeled.jsonl", "line_counts.csv", "impact.json"] {
        assert_eq!(read(&format!("out/{file}")), read(&format!("stages/{file}")), "{file}");
    }
    // the run keeps sentiment for analysis-set posts only, so its rows are a subset
    let all_rows = read("stages/sentiment.csv");
    for row in read("out/comment_sentiment.csv").lines() {
        assert!(all_rows.lines().any(|r| r == row), "{row}");
    }
    for line in read("out/incidents.jsonl").lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(!["event", "renovation", "fix"].contains(&v["label"].as_str().unwrap()));
    }
}

#[test]
fn agreement_writes_pairwise_kappa() {
    let dir = tempfile::tempdir().unwrap();
    let mut body = String::from("item_id,annotator_id,label\n");
    // [[20,5],[10,15]] between annotators a and b
    let cells = [(20, "pos", "pos"), (5, "pos", "neg"), (10, "neg", "pos"), (15, "neg", "neg")];
    let mut item = 0;
    for (n, la, lb) in cells {
        for _ in 0..n {
            body.push_str(&format!("{item},a,{la}\n{item},b,{lb}\n"));
            item += 1;
        }
    }
    fs::write(dir.path().join("annotations.csv"), body).unwrap();
    let out = tim(&["agreement", "--in", "annotations.csv", "--out", "kappa.json"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("kappa.json")).unwrap()).unwrap();
    let kappa = v["pairs"][0]["kappa"].as_f64().unwrap();
    assert!((kappa - 0.4).abs() < 1e-12);
    assert_eq!(v["pairs"][0]["items"], 50);
}
