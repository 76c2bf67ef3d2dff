// Every example under examples/ runs to completion with small inputs.

macro_rules! example {
    ($name:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }
    };
}

example!(corpus_gallery, "corpus_gallery.rs");
example!(watermark_roundtrip, "watermark_roundtrip.rs");
example!(sign_and_verify, "sign_and_verify.rs");
example!(container_surgery, "container_surgery.rs");
example!(perturbation_survival, "perturbation_survival.rs");
example!(metadata_washing, "metadata_washing.rs");
example!(run_matrix, "run_matrix.rs");

#[test]
fn corpus_gallery_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    corpus_gallery::run_example(Some(dir.path().to_path_buf()), 5, 64).unwrap();
    assert!(dir.path().join("img_0004.png").exists());
    assert!(dir.path().join("corpus.json").exists());
}

#[test]
fn watermark_roundtrip_runs() {
    watermark_roundtrip::run_example(256).unwrap();
}

#[test]
fn sign_and_verify_runs() {
    sign_and_verify::run_example().unwrap();
}

#[test]
fn container_surgery_runs() {
    container_surgery::run_example().unwrap();
}

#[test]
fn perturbation_survival_runs() {
    perturbation_survival::run_example(2, 256).unwrap();
}

#[test]
fn metadata_washing_runs() {
    metadata_washing::run_example().unwrap();
}

#[test]
fn run_matrix_runs() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_matrix::run_example(2, 256, Some(dir.path().to_path_buf())).unwrap();
    assert_eq!(report.reports.len(), 14);
    for f in [
        "report.json",
        "summary.csv",
        "tables.md",
        "bit_accuracy.csv",
    ] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}
