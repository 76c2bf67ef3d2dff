//! Pipeline matrix: builds every asset variant from the corpus, audits each
//! one against its expected quadrant and aggregates the results.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::audit::{metrics_from_quadrants, AuditReport, Auditor, Metrics, Quadrant};
use crate::container::{sign_and_attach, AssetFile};
use crate::corpus::{self, corpus_records, splitmix64, CorpusRecord};
use crate::error::{Error, Result};
use crate::manifest::{self, generate_cert_chain, CertChain, Template, TrustStore};
use crate::perturb::{self, Perturbation};
use crate::raster::Image;
use crate::watermark::{default_sync_scales, EmbedConfig, Payload, WatermarkCodec, WatermarkKey};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PipelineId {
    Baseline,
    Watermarked,
    Honest,
    Misleading,
    MisleadingJpeg,
    MisleadingCrop,
    MisleadingScreenshot,
    /// Unwatermarked pixels under the misleading manifest; off by default.
    UnmarkedMisleading,
}

impl PipelineId {
    pub fn as_str(&self) -> &'static str {
        match self {
            PipelineId::Baseline => "baseline",
            PipelineId::Watermarked => "watermarked",
            PipelineId::Honest => "honest",
            PipelineId::Misleading => "misleading",
            PipelineId::MisleadingJpeg => "misleading_jpeg",
            PipelineId::MisleadingCrop => "misleading_crop",
            PipelineId::MisleadingScreenshot => "misleading_screenshot",
            PipelineId::UnmarkedMisleading => "unmarked_misleading",
        }
    }

    /// Row label in the rendered tables.
    pub fn title(&self) -> &'static str {
        match self {
            PipelineId::Baseline => "Baseline",
            PipelineId::Watermarked => "Watermarked",
            PipelineId::Honest => "Honest Manifest",
            PipelineId::Misleading => "Misleading Manifest",
            PipelineId::MisleadingJpeg => "Misleading + JPEG Q80",
            PipelineId::MisleadingCrop => "Misleading + Crop 10% + resize",
            PipelineId::MisleadingScreenshot => "Misleading + Screenshot simulation",
            PipelineId::UnmarkedMisleading => "Unwatermarked + Misleading Manifest",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineSpec {
    pub id: PipelineId,
    pub watermark: bool,
    pub template: Option<Template>,
    pub perturbation: Perturbation,
    pub expected_quadrant: Quadrant,
}

impl PipelineSpec {
    const fn new(
        id: PipelineId,
        watermark: bool,
        template: Option<Template>,
        perturbation: Perturbation,
        expected_quadrant: Quadrant,
    ) -> Self {
        PipelineSpec {
            id,
            watermark,
            template,
            perturbation,
            expected_quadrant,
        }
    }

    /// The seven standard pipelines, plus the Q3 pipeline when requested.
    pub fn matrix(include_q3: bool) -> Vec<PipelineSpec> {
        use Perturbation as P;
        use PipelineId as Id;
        use Quadrant as Q;
        let mis = Some(Template::Misleading);
        let mut specs = vec![
            PipelineSpec::new(Id::Baseline, false, None, P::None, Q::Q1),
            PipelineSpec::new(Id::Watermarked, true, None, P::None, Q::Q2),
            PipelineSpec::new(Id::Honest, true, Some(Template::Honest), P::None, Q::Q4a),
            PipelineSpec::new(Id::Misleading, true, mis, P::None, Q::Q4b),
            PipelineSpec::new(Id::MisleadingJpeg, true, mis, P::JpegQ80, Q::Q4b),
            PipelineSpec::new(Id::MisleadingCrop, true, mis, P::Crop10Resize, Q::Q4b),
            PipelineSpec::new(
                Id::MisleadingScreenshot,
                true,
                mis,
                P::ScreenshotSim,
                Q::Q4b,
            ),
        ];
        if include_q3 {
            specs.push(PipelineSpec::new(
                Id::UnmarkedMisleading,
                false,
                mis,
                P::None,
                Q::Q3,
            ));
        }
        specs
    }
}

/// Everything that is fixed for one experiment: payload, key, signer.
#[derive(Clone, Debug)]
pub struct RunContext {
    pub codec: WatermarkCodec,
    pub payload: Payload,
    pub chain: CertChain,
    pub signed_at: String,
}

/// Builds one pipeline output from an original image and (when the pipeline
/// needs it) its watermarked version.
///
/// Order: embed, perturb, PNG encode, sign and attach. Signing must follow
/// encoding because the manifest binds the file bytes.
pub fn build_asset(
    spec: &PipelineSpec,
    original: &Image,
    watermarked: Option<&Image>,
    ctx: &RunContext,
) -> Result<AssetFile> {
    let marked;
    let pixels = if spec.watermark {
        match watermarked {
            Some(w) => w,
            None => {
                marked = ctx.codec.embed(original, &ctx.payload)?;
                &marked
            }
        }
    } else {
        original
    };
    let perturbed = perturb::apply(pixels, spec.perturbation)?;
    let file = AssetFile::from_bytes(perturbed.encode_png()?)?;
    match spec.template {
        Some(t) => sign_and_attach(&file, t, &ctx.chain, &ctx.signed_at),
        None => Ok(file),
    }
}

pub fn asset_id(pipeline: PipelineId, index: usize) -> String {
    format!("{}/{}", pipeline.as_str(), corpus::image_file_name(index))
}

/// Runs one pipeline over a corpus; every output gets the spec's quadrant as
/// ground truth.
pub fn run_pipeline(
    spec: &PipelineSpec,
    corpus: &[(Image, CorpusRecord)],
    ctx: &RunContext,
) -> Result<Vec<(String, AssetFile, Quadrant)>> {
    if corpus.is_empty() {
        return Err(Error::invalid("corpus is empty"));
    }
    corpus
        .par_iter()
        .map(|(img, rec)| {
            let file = build_asset(spec, img, None, ctx)?;
            Ok((asset_id(spec.id, rec.index), file, spec.expected_quadrant))
        })
        .collect()
}

fn default_alpha() -> f32 {
    EmbedConfig::default().strength_alpha
}

fn default_threshold() -> f64 {
    EmbedConfig::default().detection_threshold
}

/// Experiment configuration, loadable from JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixConfig {
    pub master_seed: u64,
    pub n: usize,
    pub size: u32,
    #[serde(default = "default_alpha")]
    pub alpha: f32,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default = "default_sync_scales")]
    pub sync_scales: Vec<f32>,
    /// Worker threads; 0 means one per available core.
    #[serde(default)]
    pub parallelism: usize,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub enable_q3_pipeline: bool,
    /// Also write every pipeline output file under `output_dir/assets`.
    #[serde(default)]
    pub write_assets: bool,
    /// RFC 3339 signing time; defaults to now.
    #[serde(default)]
    pub signed_at: Option<String>,
}

impl MatrixConfig {
    /// 50 images at 512×512.
    pub fn desk(master_seed: u64) -> Self {
        MatrixConfig {
            master_seed,
            n: 50,
            size: 512,
            alpha: default_alpha(),
            threshold: default_threshold(),
            sync_scales: default_sync_scales(),
            parallelism: 0,
            output_dir: None,
            enable_q3_pipeline: false,
            write_assets: false,
            signed_at: None,
        }
    }

    /// 500 images at 1024×1024.
    pub fn full_scale(master_seed: u64) -> Self {
        MatrixConfig {
            n: 500,
            size: 1024,
            ..MatrixConfig::desk(master_seed)
        }
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        Ok(serde_json::from_slice(bytes)?)
    }

    pub fn embed_config(&self) -> EmbedConfig {
        EmbedConfig {
            strength_alpha: self.alpha,
            detection_threshold: self.threshold,
            sync_scales: self.sync_scales.clone(),
            ..EmbedConfig::default()
        }
    }

    /// Fixed payload for the run.
    pub fn payload(&self) -> Payload {
        Payload::random(splitmix64(self.master_seed ^ 0x7061_796C_6F61_6400))
    }

    pub fn key(&self) -> WatermarkKey {
        WatermarkKey::new(splitmix64(self.master_seed ^ 0x6B65_7900_0000_0000))
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("n must be at least 1"));
        }
        if self.size < corpus::MIN_SIZE {
            return Err(Error::invalid(format!(
                "size must be at least {}",
                corpus::MIN_SIZE
            )));
        }
        self.embed_config().validate()
    }
}

/// Config fields that shape the results. Parallelism and paths are left out
/// so that the report is identical however it was produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub master_seed: u64,
    pub n: usize,
    pub size: u32,
    pub alpha: f32,
    pub threshold: f64,
    pub sync_scales: Vec<f32>,
    pub enable_q3_pipeline: bool,
    pub payload: String,
    pub key: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineStats {
    pub pipeline: PipelineId,
    pub expected_quadrant: Quadrant,
    pub n: usize,
    pub c2pa_valid_pct: f64,
    pub detected_pct: f64,
    pub mean_bit_accuracy: f64,
    pub min_bit_accuracy: f64,
    pub max_bit_accuracy: f64,
    pub classified_correct_pct: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionSamples {
    pub pipeline: PipelineId,
    pub bit_accuracy: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ReportConfig,
    pub pipelines: Vec<PipelineStats>,
    pub metrics: Metrics,
    pub bit_accuracy_samples: Vec<ConditionSamples>,
    /// Assets whose audited quadrant differs from ground truth.
    pub deviations: Vec<String>,
    pub reports: Vec<AuditReport>,
}

impl ExperimentReport {
    pub fn pipeline(&self, id: PipelineId) -> Option<&PipelineStats> {
        self.pipelines.iter().find(|p| p.pipeline == id)
    }

    pub fn samples(&self, id: PipelineId) -> Option<&[f64]> {
        self.bit_accuracy_samples
            .iter()
            .find(|s| s.pipeline == id)
            .map(|s| s.bit_accuracy.as_slice())
    }

    pub fn to_json(&self) -> Result<Vec<u8>> {
        let mut out = serde_json::to_vec_pretty(self)?;
        out.push(b'\n');
        Ok(out)
    }
}

fn pct(num: usize, den: usize) -> f64 {
    100.0 * num as f64 / den as f64
}

fn thread_pool(parallelism: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .map_err(|e| Error::invalid(format!("thread pool: {e}")))
}

/// Runs the whole matrix with a freshly generated signing chain whose root
/// is the only trusted root.
pub fn run_matrix(config: &MatrixConfig) -> Result<ExperimentReport> {
    let chain = generate_cert_chain("Provenance Audit Signer")?;
    let trust = TrustStore::new([chain.root.clone()]);
    run_matrix_with(config, chain, trust)
}

pub fn run_matrix_with(
    config: &MatrixConfig,
    chain: CertChain,
    trust: TrustStore,
) -> Result<ExperimentReport> {
    config.validate()?;
    let codec = WatermarkCodec::new(config.key(), config.embed_config())?;
    let payload = config.payload();
    let ctx = RunContext {
        codec: codec.clone(),
        payload,
        chain,
        signed_at: config
            .signed_at
            .clone()
            .unwrap_or_else(manifest::now_rfc3339),
    };
    let auditor = Auditor::new(codec, payload, trust);
    let specs = PipelineSpec::matrix(config.enable_q3_pipeline);
    let records = corpus_records(config.master_seed, config.n);
    let asset_dir = config
        .output_dir
        .as_ref()
        .filter(|_| config.write_assets)
        .map(|d| d.join("assets"));
    if let Some(dir) = &asset_dir {
        for spec in &specs {
            fs::create_dir_all(dir.join(spec.id.as_str()))?;
        }
    }

    let per_image: Vec<Vec<AuditReport>> = thread_pool(config.parallelism)?.install(|| {
        records
            .par_iter()
            .map(|rec| {
                let original = rec.regenerate(config.size)?;
                let marked = ctx.codec.embed(&original, &ctx.payload)?;
                specs
                    .iter()
                    .map(|spec| {
                        let file = build_asset(spec, &original, Some(&marked), &ctx)?;
                        let id = asset_id(spec.id, rec.index);
                        if let Some(dir) = &asset_dir {
                            fs::write(dir.join(&id), file.bytes())?;
                        }
                        auditor.audit(&id, &file)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()
    })?;

    // pipeline-major order
    let mut reports = Vec::with_capacity(specs.len() * config.n);
    let mut truth = Vec::with_capacity(specs.len() * config.n);
    for (k, spec) in specs.iter().enumerate() {
        for image_reports in &per_image {
            reports.push(image_reports[k].clone());
            truth.push(spec.expected_quadrant);
        }
    }

    let mut pipelines = Vec::new();
    let mut samples = Vec::new();
    for (k, spec) in specs.iter().enumerate() {
        let rs: Vec<&AuditReport> = per_image.iter().map(|r| &r[k]).collect();
        let acc: Vec<f64> = rs.iter().map(|r| r.signals.bit_accuracy).collect();
        let n = rs.len();
        pipelines.push(PipelineStats {
            pipeline: spec.id,
            expected_quadrant: spec.expected_quadrant,
            n,
            c2pa_valid_pct: pct(rs.iter().filter(|r| r.signals.manifest_valid).count(), n),
            detected_pct: pct(
                rs.iter().filter(|r| r.signals.watermark_detected).count(),
                n,
            ),
            mean_bit_accuracy: acc.iter().sum::<f64>() / n as f64,
            min_bit_accuracy: acc.iter().copied().fold(f64::INFINITY, f64::min),
            max_bit_accuracy: acc.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            classified_correct_pct: pct(
                rs.iter()
                    .filter(|r| r.quadrant == spec.expected_quadrant)
                    .count(),
                n,
            ),
        });
        samples.push(ConditionSamples {
            pipeline: spec.id,
            bit_accuracy: acc,
        });
    }

    let predicted: Vec<Quadrant> = reports.iter().map(|r| r.quadrant).collect();
    let metrics = metrics_from_quadrants(&predicted, &truth)?;
    let deviations = reports
        .iter()
        .zip(&truth)
        .filter(|(r, t)| r.quadrant != **t)
        .map(|(r, t)| format!("{}: expected {}, audited {}", r.asset_id, t, r.quadrant))
        .collect();

    let report = ExperimentReport {
        config: ReportConfig {
            master_seed: config.master_seed,
            n: config.n,
            size: config.size,
            alpha: config.alpha,
            threshold: config.threshold,
            sync_scales: config.sync_scales.clone(),
            enable_q3_pipeline: config.enable_q3_pipeline,
            payload: payload.to_hex(),
            key: config.key().seed,
        },
        pipelines,
        metrics,
        bit_accuracy_samples: samples,
        deviations,
        reports,
    };
    if let Some(dir) = &config.output_dir {
        write_outputs(&report, dir)?;
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RenderedTables {
    pub markdown: String,
    pub summary_csv: String,
    pub bit_accuracy_csv: String,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.3}"))
}

/// Markdown tables (core pipelines, audit accuracy), a per-pipeline CSV and
/// the long-format bit accuracy CSV. Numbers are rounded to 3 decimals.
pub fn render_tables(report: &ExperimentReport) -> Result<RenderedTables> {
    if report.pipelines.is_empty() {
        return Err(Error::Render("report has no pipelines".into()));
    }
    for p in &report.pipelines {
        let empty = report.samples(p.pipeline).is_none_or(|s| s.is_empty());
        if p.n == 0 || empty {
            return Err(Error::Render(format!(
                "pipeline {} has no samples",
                p.pipeline.as_str()
            )));
        }
    }

    let mut md = String::new();
    writeln!(md, "## Core pipelines\n").unwrap();
    writeln!(
        md,
        "| Pipeline | N | C2PA Valid (%) | Avg. Bit Acc. | Min. Bit Acc. | Classified Correctly (%) |"
    )
    .unwrap();
    writeln!(md, "|---|---:|---:|---:|---:|---:|").unwrap();
    for p in &report.pipelines {
        writeln!(
            md,
            "| {} | {} | {:.1} | {:.3} | {:.3} | {:.1} |",
            p.pipeline.title(),
            p.n,
            p.c2pa_valid_pct,
            p.mean_bit_accuracy,
            p.min_bit_accuracy,
            p.classified_correct_pct
        )
        .unwrap();
    }

    writeln!(md, "\n## Cross-layer audit\n").unwrap();
    writeln!(md, "| State / Condition | Correctly Classified (%) |").unwrap();
    writeln!(md, "|---|---:|").unwrap();
    for p in report
        .pipelines
        .iter()
        .filter(|p| p.expected_quadrant != Quadrant::Q4b)
    {
        writeln!(
            md,
            "| {} ({}) | {:.1} |",
            p.expected_quadrant,
            p.expected_quadrant.label(),
            p.classified_correct_pct
        )
        .unwrap();
    }
    writeln!(md, "| Q4b (Authenticated Fake) | |").unwrap();
    for p in report
        .pipelines
        .iter()
        .filter(|p| p.expected_quadrant == Quadrant::Q4b)
    {
        let cond = match p.pipeline {
            PipelineId::Misleading => "No perturbation",
            PipelineId::MisleadingJpeg => "JPEG Q80",
            PipelineId::MisleadingCrop => "Crop 10% + resize",
            PipelineId::MisleadingScreenshot => "Screenshot sim",
            other => other.title(),
        };
        writeln!(
            md,
            "| &nbsp;&nbsp;{} | {:.1} |",
            cond, p.classified_correct_pct
        )
        .unwrap();
    }
    let m = &report.metrics;
    writeln!(
        md,
        "\nPositive class Q4b: TPR = {}, FPR = {}, Accuracy = {:.3}",
        fmt_opt(m.tpr),
        fmt_opt(m.fpr),
        m.accuracy
    )
    .unwrap();

    let mut summary = String::from(
        "pipeline,expected_quadrant,n,c2pa_valid_pct,detected_pct,mean_bit_accuracy,min_bit_accuracy,max_bit_accuracy,classified_correct_pct\n",
    );
    for p in &report.pipelines {
        writeln!(
            summary,
            "{},{},{},{:.3},{:.3},{:.3},{:.3},{:.3},{:.3}",
            p.pipeline.as_str(),
            p.expected_quadrant,
            p.n,
            p.c2pa_valid_pct,
            p.detected_pct,
            p.mean_bit_accuracy,
            p.min_bit_accuracy,
            p.max_bit_accuracy,
            p.classified_correct_pct
        )
        .unwrap();
    }

    let mut samples = String::from("condition,index,bit_accuracy\n");
    for s in &report.bit_accuracy_samples {
        for (i, v) in s.bit_accuracy.iter().enumerate() {
            writeln!(samples, "{},{},{:.3}", s.pipeline.as_str(), i, v).unwrap();
        }
    }

    Ok(RenderedTables {
        markdown: md,
        summary_csv: summary,
        bit_accuracy_csv: samples,
    })
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("partial");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Writes `report.json`, `summary.csv`, `tables.md` and `bit_accuracy.csv`.
/// Rendering happens before any file is touched.
pub fn write_outputs(report: &ExperimentReport, dir: &Path) -> Result<()> {
    let tables = render_tables(report)?;
    let json = report.to_json()?;
    fs::create_dir_all(dir)?;
    write_atomic(&dir.join("summary.csv"), tables.summary_csv.as_bytes())?;
    write_atomic(&dir.join("tables.md"), tables.markdown.as_bytes())?;
    write_atomic(
        &dir.join("bit_accuracy.csv"),
        tables.bit_accuracy_csv.as_bytes(),
    )?;
    write_atomic(&dir.join("report.json"), &json)?;
    Ok(())
}

/// Quadrant counts over a set of reports.
pub fn quadrant_histogram(reports: &[AuditReport]) -> BTreeMap<Quadrant, usize> {
    let mut h = BTreeMap::new();
    for r in reports {
        *h.entry(r.quadrant).or_default() += 1;
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_matches_pipeline_table() {
        let specs = PipelineSpec::matrix(false);
        let q: Vec<_> = specs.iter().map(|s| (s.id, s.expected_quadrant)).collect();
        assert_eq!(
            q,
            vec![
                (PipelineId::Baseline, Quadrant::Q1),
                (PipelineId::Watermarked, Quadrant::Q2),
                (PipelineId::Honest, Quadrant::Q4a),
                (PipelineId::Misleading, Quadrant::Q4b),
                (PipelineId::MisleadingJpeg, Quadrant::Q4b),
                (PipelineId::MisleadingCrop, Quadrant::Q4b),
                (PipelineId::MisleadingScreenshot, Quadrant::Q4b),
            ]
        );
        assert!(specs
            .iter()
            .filter(|s| s.expected_quadrant == Quadrant::Q4b)
            .all(|s| s.watermark && s.template == Some(Template::Misleading)));
        assert_eq!(PipelineSpec::matrix(true).len(), 8);
    }

    #[test]
    fn config_json_defaults() {
        let cfg = MatrixConfig::from_json(br#"{"master_seed": 1, "n": 3, "size": 64}"#).unwrap();
        assert_eq!(cfg.alpha, 3.0);
        assert_eq!(cfg.threshold, 0.75);
        assert_eq!(cfg.sync_scales.len(), 9);
        assert!(!cfg.enable_q3_pipeline);
        assert!(MatrixConfig::from_json(br#"{"n": 3}"#).is_err());
    }

    #[test]
    fn invalid_config_rejected() {
        let mut cfg = MatrixConfig::desk(1);
        cfg.n = 0;
        assert!(run_matrix(&cfg).is_err());
        let mut cfg = MatrixConfig::desk(1);
        cfg.size = 32;
        assert!(run_matrix(&cfg).is_err());
    }

    fn empty_report() -> ExperimentReport {
        ExperimentReport {
            config: ReportConfig {
                master_seed: 0,
                n: 0,
                size: 64,
                alpha: 3.0,
                threshold: 0.75,
                sync_scales: vec![1.0],
                enable_q3_pipeline: false,
                payload: String::new(),
                key: 0,
            },
            pipelines: vec![],
            metrics: metrics_from_quadrants(&[Quadrant::Q1], &[Quadrant::Q1]).unwrap(),
            bit_accuracy_samples: vec![],
            deviations: vec![],
            reports: vec![],
        }
    }

    #[test]
    fn rendering_refuses_empty_conditions() {
        let mut r = empty_report();
        assert!(matches!(render_tables(&r), Err(Error::Render(_))));
        r.pipelines.push(PipelineStats {
            pipeline: PipelineId::Baseline,
            expected_quadrant: Quadrant::Q1,
            n: 1,
            c2pa_valid_pct: 0.0,
            detected_pct: 0.0,
            mean_bit_accuracy: 0.502,
            min_bit_accuracy: 0.41,
            max_bit_accuracy: 0.6,
            classified_correct_pct: 100.0,
        });
        r.bit_accuracy_samples.push(ConditionSamples {
            pipeline: PipelineId::Baseline,
            bit_accuracy: vec![],
        });
        assert!(matches!(render_tables(&r), Err(Error::Render(_))));
        r.bit_accuracy_samples[0].bit_accuracy.push(0.502);
        let t = render_tables(&r).unwrap();
        assert!(t
            .markdown
            .contains("| Baseline | 1 | 0.0 | 0.502 | 0.410 | 100.0 |"));
        assert_eq!(t, render_tables(&r).unwrap());
        assert!(t.bit_accuracy_csv.ends_with("baseline,0,0.502\n"));
    }
}
