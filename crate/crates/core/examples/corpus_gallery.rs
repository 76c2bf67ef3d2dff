// Generates a small procedural corpus and writes it to disk.
//
//     cargo run --example corpus_gallery -- [out_dir] [count] [size]

use std::path::PathBuf;

use clash_core::corpus::{generate_corpus, write_corpus};

pub fn run_example(out: Option<PathBuf>, count: usize, size: u32) -> clash_core::Result<()> {
    let corpus = generate_corpus(2026, count, size)?;
    for (img, rec) in &corpus {
        println!(
            "#{:<3} {:<12} seed={:016x} std={:.1}",
            rec.index,
            format!("{:?}", rec.generator_kind),
            rec.seed,
            img.sample_std()
        );
    }
    if let Some(dir) = out {
        write_corpus(&dir, &corpus)?;
        println!("wrote {} images to {}", corpus.len(), dir.display());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> clash_core::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = args.next().map(PathBuf::from);
    let count = args.next().map_or(10, |s| s.parse().expect("count"));
    let size = args.next().map_or(256, |s| s.parse().expect("size"));
    run_example(out, count, size)
}
