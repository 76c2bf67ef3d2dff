// Embeds a 256-bit payload, reports PSNR, then detects it with the right key,
// the wrong key, and on the untouched original.

use clash_core::corpus::{generate_image, GeneratorKind};
use clash_core::watermark::psnr;
use clash_core::{EmbedConfig, Payload, WatermarkCodec, WatermarkKey};

pub fn run_example(size: u32) -> clash_core::Result<()> {
    let payload = Payload::random(7);
    let codec = WatermarkCodec::new(WatermarkKey::new(42), EmbedConfig::default())?;
    let original = generate_image(GeneratorKind::Mixed, 11, size)?;
    let marked = codec.embed(&original, &payload)?;
    println!("payload  {}", payload.to_hex());
    println!("psnr     {:.2} dB", psnr(&original, &marked)?);

    let hit = codec.detect(&marked, &payload);
    println!(
        "right key: accuracy {:.4} detected {} scale {:.2}",
        hit.bit_accuracy, hit.detected, hit.best_sync_scale
    );
    assert!(hit.detected);

    let other = WatermarkCodec::new(WatermarkKey::new(43), EmbedConfig::default())?;
    let miss = other.detect(&marked, &payload);
    println!(
        "wrong key: accuracy {:.4} detected {}",
        miss.bit_accuracy, miss.detected
    );

    let clean = codec.detect(&original, &payload);
    println!(
        "original:  accuracy {:.4} detected {}",
        clean.bit_accuracy, clean.detected
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> clash_core::Result<()> {
    let size = std::env::args()
        .nth(1)
        .map_or(512, |s| s.parse().expect("size"));
    run_example(size)
}
