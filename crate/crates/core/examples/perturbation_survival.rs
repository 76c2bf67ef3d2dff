// Bit accuracy of the watermark after each perturbation, over a few images.

use clash_core::corpus::generate_corpus;
use clash_core::perturb::apply;
use clash_core::{EmbedConfig, Payload, Perturbation, WatermarkCodec, WatermarkKey};

pub fn run_example(count: usize, size: u32) -> clash_core::Result<()> {
    let codec = WatermarkCodec::new(WatermarkKey::new(9), EmbedConfig::default())?;
    let payload = Payload::random(99);
    let corpus = generate_corpus(1, count, size)?;
    println!(
        "{:<16} {:>8} {:>8} {:>9}",
        "perturbation", "mean", "min", "detected"
    );
    for p in Perturbation::ALL {
        let mut accs = Vec::new();
        let mut hits = 0;
        for (img, _) in &corpus {
            let res = codec.detect(&apply(&codec.embed(img, &payload)?, p)?, &payload);
            hits += res.detected as usize;
            accs.push(res.bit_accuracy);
        }
        let mean = accs.iter().sum::<f64>() / accs.len() as f64;
        let min = accs.iter().copied().fold(1.0, f64::min);
        println!(
            "{:<16} {mean:>8.4} {min:>8.4} {hits:>6}/{}",
            p.as_str(),
            accs.len()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> clash_core::Result<()> {
    let mut args = std::env::args().skip(1);
    let count = args.next().map_or(5, |s| s.parse().expect("count"));
    let size = args.next().map_or(512, |s| s.parse().expect("size"));
    run_example(count, size)
}
