// Statistical properties of the corpus and the watermark over small samples.

use clash_core::container::{sign_and_attach, strip_manifest};
use clash_core::corpus::{corpus_records, generate_corpus, GeneratorKind};
use clash_core::harness::MatrixConfig;
use clash_core::manifest::{generate_cert_chain, now_rfc3339};
use clash_core::perturb::jpeg_round_trip;
use clash_core::{AssetFile, EmbedConfig, Image, Payload, Template, WatermarkCodec, WatermarkKey};

fn codec(seed: u64) -> WatermarkCodec {
    WatermarkCodec::new(WatermarkKey::new(seed), EmbedConfig::default()).unwrap()
}

fn images(count: usize) -> Vec<Image> {
    generate_corpus(31, count, 512)
        .unwrap()
        .into_iter()
        .map(|(img, _)| img)
        .collect()
}

#[test]
fn corpus_has_texture() {
    let corpus = generate_corpus(2026, 50, 256).unwrap();
    let textured = corpus
        .iter()
        .filter(|(img, _)| img.sample_std() > 10.0)
        .count();
    assert!(textured >= 45, "{textured}/50 above std 10");
}

#[test]
fn generator_assignment_is_fair() {
    let records = corpus_records(5, 5000);
    for kind in GeneratorKind::ALL {
        let n = records.iter().filter(|r| r.generator_kind == kind).count();
        assert_eq!(n, 1000, "{kind:?}");
    }
}

#[test]
fn corpus_is_reproducible() {
    let a = generate_corpus(77, 5, 128).unwrap();
    let b = generate_corpus(77, 5, 128).unwrap();
    assert_eq!(a, b);
    let c = generate_corpus(78, 5, 128).unwrap();
    assert_ne!(a[0].0, c[0].0);
}

#[test]
fn wrong_key_stays_near_chance() {
    let payload = Payload::random(3);
    let (right, wrong) = (codec(100), codec(101));
    for img in images(10) {
        let marked = right.embed(&img, &payload).unwrap();
        let res = wrong.detect(&marked, &payload);
        assert!(res.bit_accuracy < 0.65, "{}", res.bit_accuracy);
        assert!(!res.detected);
    }
}

// Evaluated over the full desk corpus: on a handful of images all three
// qualities sit at the ceiling and a single flipped bit can invert the order.
#[test]
fn accuracy_falls_with_jpeg_quality() {
    let cfg = MatrixConfig::desk(2026);
    let c = WatermarkCodec::new(cfg.key(), cfg.embed_config()).unwrap();
    let payload = cfg.payload();
    let marked: Vec<Image> = generate_corpus(cfg.master_seed, cfg.n, cfg.size)
        .unwrap()
        .iter()
        .map(|(img, _)| c.embed(img, &payload).unwrap())
        .collect();
    let mean_at = |q: u8| {
        marked
            .iter()
            .map(|m| {
                c.detect(&jpeg_round_trip(m, q).unwrap(), &payload)
                    .bit_accuracy
            })
            .sum::<f64>()
            / marked.len() as f64
    };
    let (q95, q80, q60) = (mean_at(95), mean_at(80), mean_at(60));
    assert!(q95 >= q80 && q80 >= q60, "{q95} {q80} {q60}");
}

#[test]
fn manifest_strip_leaves_watermark_untouched() {
    let payload = Payload::random(6);
    let c = codec(300);
    let chain = generate_cert_chain("Strip Test").unwrap();
    let at = now_rfc3339();
    for img in images(3) {
        let file =
            AssetFile::from_bytes(c.embed(&img, &payload).unwrap().encode_png().unwrap()).unwrap();
        let signed = sign_and_attach(&file, Template::Misleading, &chain, &at).unwrap();
        let stripped = strip_manifest(&signed).unwrap();
        let before = c.detect(&Image::decode(signed.bytes()).unwrap(), &payload);
        let after = c.detect(&Image::decode(stripped.bytes()).unwrap(), &payload);
        assert_eq!(before, after);
    }
}
