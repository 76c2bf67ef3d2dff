use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use clash_core::audit::{AuditReport, Auditor};
use clash_core::container::{sign_and_attach, AssetFile};
use clash_core::corpus::{generate_corpus, write_corpus};
use clash_core::harness::{
    render_tables, run_matrix, write_outputs, ExperimentReport, MatrixConfig,
};
use clash_core::manifest::{generate_cert_chain, now_rfc3339, CertChain, Template, TrustStore};
use clash_core::perturb::{apply, Perturbation};
use clash_core::watermark::{DetectionSummary, EmbedConfig, Payload, WatermarkCodec, WatermarkKey};
use clash_core::{Image, Result};

#[derive(Parser)]
#[command(
    name = "clash",
    version,
    about = "Cross-layer provenance audit toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct MarkArgs {
    /// 64 hex characters
    #[arg(long)]
    payload: String,
    #[arg(long)]
    key: u64,
    #[arg(long, default_value_t = 3.0)]
    alpha: f32,
    #[arg(long, default_value_t = 0.75)]
    threshold: f64,
}

impl MarkArgs {
    fn codec(&self) -> Result<(WatermarkCodec, Payload)> {
        let cfg = EmbedConfig {
            strength_alpha: self.alpha,
            detection_threshold: self.threshold,
            ..EmbedConfig::default()
        };
        Ok((
            WatermarkCodec::new(WatermarkKey::new(self.key), cfg)?,
            Payload::from_hex(&self.payload)?,
        ))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write a procedural corpus as PNG files plus corpus.json
    GenCorpus {
        #[arg(long, default_value_t = 2026)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, default_value_t = 512)]
        size: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Create a root + leaf P-256 chain (chain PEM holds the leaf key)
    GenChain {
        #[arg(long, default_value = "Research Signer")]
        subject: String,
        #[arg(long)]
        out: PathBuf,
        /// Also write the root certificate as a trust store PEM
        #[arg(long)]
        root_out: Option<PathBuf>,
    },
    /// Embed the watermark payload
    Embed {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        mark: MarkArgs,
    },
    /// Detect the watermark and print {bit_accuracy, detected, best_sync_scale}
    Detect {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        mark: MarkArgs,
    },
    /// Sign and attach a manifest
    Sign {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        template: Template,
        /// Chain PEM with leaf, root and leaf private key
        #[arg(long)]
        cert: PathBuf,
        #[arg(long)]
        signed_at: Option<String>,
    },
    /// Apply a perturbation; output is always PNG
    Perturb {
        /// jpeg_q80 | crop10 | screenshot
        #[arg(long)]
        kind: Perturbation,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Audit a file or every PNG/JPEG in a directory. Exits 2 if any asset is Q4b.
    Audit {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        mark: MarkArgs,
        /// PEM file of trusted root certificates
        #[arg(long)]
        trust: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run all pipelines and write report.json, summary.csv, tables.md, bit_accuracy.csv
    RunMatrix {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        output_dir: Option<PathBuf>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        size: Option<u32>,
        #[arg(long)]
        parallelism: Option<usize>,
        /// Use the 500 × 1024² configuration
        #[arg(long)]
        full_scale: bool,
    },
    /// Re-render tables from a report.json
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn read_image(path: &Path) -> Result<Image> {
    Image::decode(&fs::read(path)?)
}

fn asset_paths(input: &Path) -> Result<Vec<PathBuf>> {
    if input.is_file() {
        return Ok(vec![input.to_path_buf()]);
    }
    let mut paths: Vec<PathBuf> = fs::read_dir(input)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| matches!(e.to_ascii_lowercase().as_str(), "png" | "jpg" | "jpeg"))
        })
        .collect();
    paths.sort();
    Ok(paths)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::GenCorpus {
            seed,
            count,
            size,
            out,
        } => {
            write_corpus(&out, &generate_corpus(seed, count, size)?)?;
        }
        Command::GenChain {
            subject,
            out,
            root_out,
        } => {
            let chain = generate_cert_chain(&subject)?;
            fs::write(&out, chain.to_pem()?)?;
            if let Some(p) = root_out {
                fs::write(p, chain.root_pem())?;
            }
        }
        Command::Embed { input, out, mark } => {
            let (codec, payload) = mark.codec()?;
            let marked = codec.embed(&read_image(&input)?, &payload)?;
            fs::write(out, marked.encode_png()?)?;
        }
        Command::Detect { input, mark } => {
            let (codec, payload) = mark.codec()?;
            let res = codec.detect(&read_image(&input)?, &payload);
            println!("{}", serde_json::to_string(&DetectionSummary::from(&res))?);
        }
        Command::Sign {
            input,
            out,
            template,
            cert,
            signed_at,
        } => {
            let chain = CertChain::from_pem(&fs::read_to_string(cert)?)?;
            let file = AssetFile::from_bytes(fs::read(input)?)?;
            let at = signed_at.unwrap_or_else(now_rfc3339);
            fs::write(out, sign_and_attach(&file, template, &chain, &at)?.bytes())?;
        }
        Command::Perturb { kind, input, out } => {
            fs::write(out, apply(&read_image(&input)?, kind)?.encode_png()?)?;
        }
        Command::Audit {
            input,
            mark,
            trust,
            out,
        } => {
            let (codec, payload) = mark.codec()?;
            let store = match trust {
                Some(p) => TrustStore::from_pem(&fs::read_to_string(p)?)?,
                None => TrustStore::empty(),
            };
            let auditor = Auditor::new(codec, payload, store);
            let mut reports: Vec<AuditReport> = Vec::new();
            for path in asset_paths(&input)? {
                let id = path
                    .file_name()
                    .unwrap_or_default()
                    .to_string_lossy()
                    .into_owned();
                let report = auditor.audit_bytes(&id, fs::read(&path)?)?;
                println!("{}", serde_json::to_string(&report)?);
                reports.push(report);
            }
            if let Some(p) = out {
                fs::write(p, serde_json::to_vec_pretty(&reports)?)?;
            }
            if reports.iter().any(|r| r.clash) {
                return Ok(ExitCode::from(2));
            }
        }
        Command::RunMatrix {
            config,
            output_dir,
            n,
            size,
            parallelism,
            full_scale,
        } => {
            let mut cfg = match config {
                Some(p) => MatrixConfig::from_json(&fs::read(p)?)?,
                None if full_scale => MatrixConfig::full_scale(2026),
                None => MatrixConfig::desk(2026),
            };
            if let Some(v) = n {
                cfg.n = v;
            }
            if let Some(v) = size {
                cfg.size = v;
            }
            if let Some(v) = parallelism {
                cfg.parallelism = v;
            }
            if output_dir.is_some() {
                cfg.output_dir = output_dir;
            }
            if cfg.output_dir.is_none() {
                cfg.output_dir = Some(PathBuf::from("results"));
            }
            let report = run_matrix(&cfg)?;
            print!("{}", render_tables(&report)?.markdown);
            for d in &report.deviations {
                eprintln!("deviation: {d}");
            }
        }
        Command::Report { input, out_dir } => {
            let report: ExperimentReport = serde_json::from_slice(&fs::read(input)?)?;
            match out_dir {
                Some(dir) => write_outputs(&report, &dir)?,
                None => print!("{}", render_tables(&report)?.markdown),
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
