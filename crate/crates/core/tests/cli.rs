use std::path::Path;
use std::process::{Command, Output};

const PAYLOAD: &str = "a5a5a5a5a5a5a5a5a5a5a5a5a5a5a5a5a5a5a5a5a5a5a5a5a5a5a5a5a5a5a5a5";

fn clash(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clash"))
        .args(args)
        .output()
        .expect("spawn clash")
}

fn ok(args: &[&str]) -> String {
    let out = clash(args);
    assert!(
        out.status.success(),
        "clash {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn end_to_end_cli_workflow() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let corpus = d.join("corpus");
    let assets = d.join("assets");
    std::fs::create_dir(&assets).unwrap();

    ok(&[
        "gen-corpus",
        "--seed",
        "3",
        "--count",
        "2",
        "--size",
        "256",
        "--out",
        p(&corpus),
    ]);
    assert!(corpus.join("corpus.json").exists());
    ok(&[
        "gen-chain",
        "--out",
        p(&d.join("chain.pem")),
        "--root-out",
        p(&d.join("roots.pem")),
    ]);

    let src = corpus.join("img_0000.png");
    let marked = d.join("marked.png");
    let mark = ["--payload", PAYLOAD, "--key", "17"];
    ok(&[&["embed", "--in", p(&src), "--out", p(&marked)][..], &mark].concat());

    let detect: serde_json::Value =
        serde_json::from_str(&ok(&[&["detect", "--in", p(&marked)][..], &mark].concat())).unwrap();
    assert_eq!(detect["detected"], true);
    assert_eq!(detect["bit_accuracy"], 1.0);

    let honest = assets.join("honest.png");
    let fake = assets.join("fake.png");
    for (template, out) in [("honest", &honest), ("misleading", &fake)] {
        ok(&[
            "sign",
            "--in",
            p(&marked),
            "--out",
            p(out),
            "--template",
            template,
            "--cert",
            p(&d.join("chain.pem")),
        ]);
    }
    ok(&[
        "perturb",
        "--kind",
        "jpeg_q80",
        "--in",
        p(&marked),
        "--out",
        p(&assets.join("plain.png")),
    ]);

    let report = d.join("audit.json");
    let out = clash(
        &[
            &[
                "audit",
                "--in",
                p(&assets),
                "--trust",
                p(&d.join("roots.pem")),
                "--out",
                p(&report),
            ][..],
            &mark,
        ]
        .concat(),
    );
    assert_eq!(out.status.code(), Some(2), "a Q4b asset sets exit code 2");
    let lines: Vec<serde_json::Value> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let quadrants: Vec<&str> = lines
        .iter()
        .map(|l| l["quadrant"].as_str().unwrap())
        .collect();
    // sorted by file name: fake, honest, plain
    assert_eq!(quadrants, ["Q4b", "Q4a", "Q2"]);
    let saved: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
    assert_eq!(saved.as_array().unwrap().len(), 3);

    let out = clash(&[&["audit", "--in", p(&honest)][..], &mark].concat());
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn run_matrix_and_report_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let cfg = d.join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"master_seed": 11, "n": 2, "size": 192, "parallelism": 1}"#,
    )
    .unwrap();
    let results = d.join("results");
    let tables = ok(&[
        "run-matrix",
        "--config",
        p(&cfg),
        "--output-dir",
        p(&results),
    ]);
    assert!(tables.contains("Cross-layer audit"));
    let rerendered = d.join("again");
    ok(&[
        "report",
        "--in",
        p(&results.join("report.json")),
        "--out-dir",
        p(&rerendered),
    ]);
    assert_eq!(
        std::fs::read(results.join("tables.md")).unwrap(),
        std::fs::read(rerendered.join("tables.md")).unwrap()
    );
}

#[test]
fn bad_input_fails_cleanly() {
    let out = clash(&[
        "detect",
        "--in",
        "/nonexistent.png",
        "--payload",
        PAYLOAD,
        "--key",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    let out = clash(&[
        "detect",
        "--in",
        "/nonexistent.png",
        "--payload",
        "zz",
        "--key",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(1));

    let out = clash(&["perturb", "--kind", "blur", "--in", "a", "--out", "b"]);
    assert!(!out.status.success());
}
