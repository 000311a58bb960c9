//! Configuration and end-to-end pipeline runs.
//!
//! A run is: load corpus, apply applicant/year filters, build the
//! co-occurrence graph at the configured level, derive the thresholded
//! modularity network and the minimum-spanning forest of the unthresholded
//! inverse-Jaccard distances, compute metrics and layouts, and write the
//! requested files plus a `manifest.json` of SHA-256 digests. Every byte
//! written is a pure function of the input file and the configuration, so
//! two identical runs produce identical manifests.
//!
//! Configuration defaults reproduce the published study setup (applicant
//! name patterns, the 2008-2023 window, subclass level, minimum occurrence
//! 2, Jaccard threshold 0.05); a TOML file overrides the defaults and CLI
//! flags override the file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use ipcmap_core::corpus::Corpus;
use ipcmap_core::graph::{CooccurrenceGraph, DistanceGraph};
use ipcmap_core::ipc::IpcLevel;
use ipcmap_core::layout::{force_atlas2, LayoutParams, LayoutPositions};
use ipcmap_core::metrics::{
    connected_components, metrics_table, minimum_spanning_forest, MetricsTable, SpanningForest,
};
use serde::Deserialize;

use crate::export::{
    self, ColorBy, EdgeThickness, ExportFormat, ExportGraph, MetricSource, RenderStyle,
};
use crate::ingest::{load_corpus, CorpusFormat, IngestError, IngestReport, PatentscopeColumns};

/// Applicant name fragments used by the published study; the default
/// applicant filter matches any of them case-insensitively.
pub const STUDY_APPLICANT_PATTERNS: [&str; 19] = [
    "activision blizzard",
    "activision publishing",
    "activision shanghai",
    "beenox",
    "blizzard albany",
    "blizzard entertainment",
    "demonware",
    "digital legends entertainment",
    "high moon studios",
    "infinity ward",
    "king.com",
    "neversoft entertainment",
    "raven software",
    "redoctane",
    "sledgehammer games",
    "solid state studios",
    "toys for bob",
    "treyarch",
    "vicarious visions",
];

/// Fully resolved run settings.
#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub input: PathBuf,
    pub format: CorpusFormat,
    pub output_dir: PathBuf,
    pub level: IpcLevel,
    /// Codes below this corpus-wide occurrence are dropped before any edge
    /// is formed.
    pub min_occurrence: u32,
    /// Inclusive Jaccard cutoff for the modularity network.
    pub jaccard_threshold: f64,
    pub resolution: f64,
    pub louvain_seed: u64,
    pub weighted_betweenness: bool,
    pub from_year: i32,
    pub to_year: i32,
    /// Case-insensitive substrings; a record survives if any applicant
    /// matches any pattern. Empty disables the filter.
    pub applicant_patterns: Vec<String>,
    /// Labeled pattern groups for the per-applicant stats table
    /// (first matching group wins).
    pub applicant_groups: Vec<(String, Vec<String>)>,
    pub export_formats: Vec<ExportFormat>,
    /// How many edges each summary ranking lists.
    pub top_edges: usize,
    pub layout: LayoutParams,
    pub render: RenderStyle,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            input: PathBuf::new(),
            format: CorpusFormat::CanonicalCsv,
            output_dir: PathBuf::from("out"),
            level: IpcLevel::Subclass,
            min_occurrence: 2,
            jaccard_threshold: 0.05,
            resolution: 1.0,
            louvain_seed: 1,
            weighted_betweenness: false,
            from_year: 2008,
            to_year: 2023,
            applicant_patterns: STUDY_APPLICANT_PATTERNS
                .iter()
                .map(|s| s.to_string())
                .collect(),
            applicant_groups: Vec::new(),
            export_formats: vec![
                ExportFormat::CsvEdgeList,
                ExportFormat::GraphMl,
                ExportFormat::Gexf,
                ExportFormat::Dot,
                ExportFormat::Svg,
            ],
            top_edges: 10,
            layout: LayoutParams::default(),
            render: RenderStyle::default(),
        }
    }
}

/// CLI-level settings; `None` means "keep whatever the config file says".
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub input: Option<PathBuf>,
    pub format: Option<String>,
    pub output_dir: Option<PathBuf>,
    pub level: Option<String>,
    pub min_occurrence: Option<u32>,
    pub jaccard_threshold: Option<f64>,
    pub resolution: Option<f64>,
    pub louvain_seed: Option<u64>,
    pub weighted_betweenness: Option<bool>,
    pub from_year: Option<i32>,
    pub to_year: Option<i32>,
    pub layout_iterations: Option<u32>,
    pub layout_seed: Option<u64>,
    /// Drop the applicant filter entirely (process the whole corpus).
    pub no_applicant_filter: bool,
    pub export_formats: Option<Vec<String>>,
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error("i/o on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("empty result: {0}")]
    EmptyResult(String),
}

impl PipelineError {
    /// Process exit code: 2 for configuration problems, 3 for I/O problems,
    /// 4 for runs whose filters left nothing to analyze.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => 2,
            PipelineError::Ingest(IngestError::UnreadableFile { .. }) => 3,
            PipelineError::Ingest(IngestError::UnknownFormat { .. }) => 2,
            PipelineError::Ingest(IngestError::SchemaMismatch { .. }) => 2,
            PipelineError::Ingest(IngestError::EmptyCorpus { .. }) => 4,
            PipelineError::Io { .. } => 3,
            PipelineError::EmptyResult(_) => 4,
        }
    }
}

/// TOML file shape. Everything is optional; omitted keys keep defaults.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawConfig {
    input: Option<PathBuf>,
    format: Option<String>,
    output_dir: Option<PathBuf>,
    level: Option<String>,
    min_occurrence: Option<u32>,
    jaccard_threshold: Option<f64>,
    resolution: Option<f64>,
    louvain_seed: Option<u64>,
    weighted_betweenness: Option<bool>,
    from_year: Option<i32>,
    to_year: Option<i32>,
    applicant_patterns: Option<Vec<String>>,
    applicant_groups: Option<Vec<RawGroup>>,
    export_formats: Option<Vec<String>>,
    top_edges: Option<usize>,
    layout: Option<RawLayout>,
    render: Option<RawRender>,
    patentscope: Option<PatentscopeColumns>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGroup {
    label: String,
    patterns: Vec<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawLayout {
    iterations: Option<u32>,
    scaling: Option<f64>,
    gravity: Option<f64>,
    linlog: Option<bool>,
    prevent_overlap: Option<bool>,
    edge_weight_influence: Option<f64>,
    seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawRender {
    color_by: Option<String>,
    label_min_occurrence: Option<u32>,
    prolific_threshold: Option<u32>,
    edge_thickness: Option<String>,
}

fn parse_level(name: &str) -> Result<IpcLevel, PipelineError> {
    match name {
        "section" => Ok(IpcLevel::Section),
        "class" => Ok(IpcLevel::Class),
        "subclass" => Ok(IpcLevel::Subclass),
        "group" => Ok(IpcLevel::Group),
        other => Err(PipelineError::Config(format!(
            "unknown level {other:?} (expected section, class, subclass, or group)"
        ))),
    }
}

fn parse_formats(names: &[String]) -> Result<Vec<ExportFormat>, PipelineError> {
    if names.is_empty() {
        return Err(PipelineError::Config(
            "export_formats must not be empty".to_string(),
        ));
    }
    names
        .iter()
        .map(|name| {
            ExportFormat::from_name(name).map_err(|e| PipelineError::Config(e.to_string()))
        })
        .collect()
}

impl PipelineConfig {
    /// Resolve the effective configuration: defaults, then the TOML file (if
    /// any), then CLI overrides; validate the result.
    pub fn load(config_path: Option<&Path>, overrides: &Overrides) -> Result<PipelineConfig, PipelineError> {
        let mut config = PipelineConfig::default();
        let mut format_name: Option<String> = None;
        let mut patentscope = PatentscopeColumns::default();

        if let Some(path) = config_path {
            let text = std::fs::read_to_string(path).map_err(|source| PipelineError::Io {
                path: path.to_path_buf(),
                source,
            })?;
            let raw: RawConfig = toml::from_str(&text)
                .map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
            if let Some(input) = raw.input {
                config.input = input;
            }
            format_name = raw.format;
            if let Some(dir) = raw.output_dir {
                config.output_dir = dir;
            }
            if let Some(level) = raw.level.as_deref() {
                config.level = parse_level(level)?;
            }
            if let Some(v) = raw.min_occurrence {
                config.min_occurrence = v;
            }
            if let Some(v) = raw.jaccard_threshold {
                config.jaccard_threshold = v;
            }
            if let Some(v) = raw.resolution {
                config.resolution = v;
            }
            if let Some(v) = raw.louvain_seed {
                config.louvain_seed = v;
            }
            if let Some(v) = raw.weighted_betweenness {
                config.weighted_betweenness = v;
            }
            if let Some(v) = raw.from_year {
                config.from_year = v;
            }
            if let Some(v) = raw.to_year {
                config.to_year = v;
            }
            if let Some(v) = raw.applicant_patterns {
                config.applicant_patterns = v;
            }
            if let Some(groups) = raw.applicant_groups {
                config.applicant_groups = groups
                    .into_iter()
                    .map(|g| (g.label, g.patterns))
                    .collect();
            }
            if let Some(names) = raw.export_formats {
                config.export_formats = parse_formats(&names)?;
            }
            if let Some(v) = raw.top_edges {
                config.top_edges = v;
            }
            if let Some(layout) = raw.layout {
                if let Some(v) = layout.iterations {
                    config.layout.iterations = v;
                }
                if let Some(v) = layout.scaling {
                    config.layout.scaling = v;
                }
                if let Some(v) = layout.gravity {
                    config.layout.gravity = v;
                }
                if let Some(v) = layout.linlog {
                    config.layout.linlog_mode = v;
                }
                if let Some(v) = layout.prevent_overlap {
                    config.layout.prevent_overlap = v;
                }
                if let Some(v) = layout.edge_weight_influence {
                    config.layout.edge_weight_influence = v;
                }
                if let Some(v) = layout.seed {
                    config.layout.seed = v;
                }
            }
            if let Some(render) = raw.render {
                if let Some(name) = render.color_by.as_deref() {
                    config.render.color_by = match name {
                        "modularity_class" => ColorBy::ModularityClass,
                        "fixed" => ColorBy::Fixed,
                        "prolific" => ColorBy::ProlificFlag,
                        other => {
                            return Err(PipelineError::Config(format!(
                                "unknown color_by {other:?} (expected modularity_class, fixed, or prolific)"
                            )))
                        }
                    };
                }
                if let Some(v) = render.label_min_occurrence {
                    config.render.label_min_occurrence = v;
                }
                if let Some(v) = render.prolific_threshold {
                    config.render.prolific_threshold = v;
                }
                if let Some(name) = render.edge_thickness.as_deref() {
                    config.render.edge_thickness = match name {
                        "jaccard" => EdgeThickness::Jaccard,
                        "fixed" => EdgeThickness::Fixed,
                        other => {
                            return Err(PipelineError::Config(format!(
                                "unknown edge_thickness {other:?} (expected jaccard or fixed)"
                            )))
                        }
                    };
                }
            }
            if let Some(columns) = raw.patentscope {
                patentscope = columns;
            }
        }

        if let Some(input) = &overrides.input {
            config.input = input.clone();
        }
        if overrides.format.is_some() {
            format_name = overrides.format.clone();
        }
        if let Some(dir) = &overrides.output_dir {
            config.output_dir = dir.clone();
        }
        if let Some(level) = overrides.level.as_deref() {
            config.level = parse_level(level)?;
        }
        if let Some(v) = overrides.min_occurrence {
            config.min_occurrence = v;
        }
        if let Some(v) = overrides.jaccard_threshold {
            config.jaccard_threshold = v;
        }
        if let Some(v) = overrides.resolution {
            config.resolution = v;
        }
        if let Some(v) = overrides.louvain_seed {
            config.louvain_seed = v;
        }
        if let Some(v) = overrides.weighted_betweenness {
            config.weighted_betweenness = v;
        }
        if let Some(v) = overrides.from_year {
            config.from_year = v;
        }
        if let Some(v) = overrides.to_year {
            config.to_year = v;
        }
        if let Some(v) = overrides.layout_iterations {
            config.layout.iterations = v;
        }
        if let Some(v) = overrides.layout_seed {
            config.layout.seed = v;
        }
        if overrides.no_applicant_filter {
            config.applicant_patterns.clear();
        }
        if let Some(names) = &overrides.export_formats {
            config.export_formats = parse_formats(names)?;
        }

        if let Some(name) = format_name.as_deref() {
            config.format = match CorpusFormat::from_name(name)? {
                CorpusFormat::PatentscopeCsv(_) => CorpusFormat::PatentscopeCsv(patentscope),
                other => other,
            };
        } else if let CorpusFormat::PatentscopeCsv(_) = config.format {
            config.format = CorpusFormat::PatentscopeCsv(patentscope);
        }

        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let fail = |msg: String| Err(PipelineError::Config(msg));
        if self.input.as_os_str().is_empty() {
            return fail("input is required (set it in the config file or with --input)".into());
        }
        if self.min_occurrence < 1 {
            return fail("min_occurrence must be at least 1".into());
        }
        if !self.jaccard_threshold.is_finite()
            || !(0.0..=1.0).contains(&self.jaccard_threshold)
        {
            return fail(format!(
                "jaccard_threshold must lie in [0, 1], got {}",
                self.jaccard_threshold
            ));
        }
        if !self.resolution.is_finite() || self.resolution <= 0.0 {
            return fail(format!(
                "resolution must be a positive number, got {}",
                self.resolution
            ));
        }
        if self.from_year > self.to_year {
            return fail(format!(
                "from_year {} exceeds to_year {}",
                self.from_year, self.to_year
            ));
        }
        if self.top_edges == 0 {
            return fail("top_edges must be at least 1".into());
        }
        if self.export_formats.is_empty() {
            return fail("export_formats must not be empty".into());
        }
        self.layout
            .validate()
            .map_err(|e| PipelineError::Config(e.to_string()))?;
        Ok(())
    }

    fn wants(&self, format: ExportFormat) -> bool {
        self.export_formats.contains(&format)
    }
}

/// Load the corpus and apply the applicant and year filters.  An empty
/// result is not an error here; the stats command reports zero-row tables
/// for it, while the graph-building commands reject it via
/// [`prepare_corpus`].
pub fn filtered_corpus(
    config: &PipelineConfig,
) -> Result<(Corpus, IngestReport), PipelineError> {
    let (corpus, report) = load_corpus(&config.input, &config.format)?;
    let corpus = if config.applicant_patterns.is_empty() {
        corpus
    } else {
        corpus.filter_by_applicant(&config.applicant_patterns)
    };
    let corpus = corpus
        .filter_by_publication_year(config.from_year, config.to_year)
        .map_err(|e| PipelineError::Config(e.to_string()))?;
    Ok((corpus, report))
}

/// Like [`filtered_corpus`], but an empty filter result is an error.
pub fn prepare_corpus(config: &PipelineConfig) -> Result<(Corpus, IngestReport), PipelineError> {
    let (corpus, report) = filtered_corpus(config)?;
    if corpus.is_empty() {
        return Err(PipelineError::EmptyResult(format!(
            "no records match the configured filters ({} applicant patterns, years {}-{})",
            config.applicant_patterns.len(),
            config.from_year,
            config.to_year
        )));
    }
    Ok((corpus, report))
}

/// Everything the network-level commands derive from a prepared corpus.
pub struct NetworkArtifacts {
    /// Unthresholded co-occurrence graph (all edges with at least one
    /// shared patent).
    pub full: CooccurrenceGraph,
    /// Jaccard-thresholded modularity network (same node set).
    pub network: CooccurrenceGraph,
    pub forest: SpanningForest,
    /// The forest as a distance graph over the full node set.
    pub forest_graph: DistanceGraph,
    pub metrics: MetricsTable,
}

/// Build graphs and metrics at the configured level.
pub fn build_artifacts(
    corpus: &Corpus,
    config: &PipelineConfig,
) -> Result<NetworkArtifacts, PipelineError> {
    let full = CooccurrenceGraph::build(corpus, config.level, config.min_occurrence);
    if full.node_count() == 0 {
        return Err(PipelineError::EmptyResult(format!(
            "no {} codes occur in at least {} patents",
            config.level, config.min_occurrence
        )));
    }
    let network = full.thresholded(config.jaccard_threshold);
    let distances = full.to_distance_graph();
    let forest = minimum_spanning_forest(&distances);
    let forest_graph = forest.as_graph(&distances);
    let metrics = metrics_table(
        &network,
        Some(&forest_graph),
        config.resolution,
        config.louvain_seed,
        config.weighted_betweenness,
    );
    Ok(NetworkArtifacts {
        full,
        network,
        forest,
        forest_graph,
        metrics,
    })
}

fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let mut out = String::with_capacity(64);
    for byte in hasher.finalize() {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

/// Collects output files under one directory and finishes with a
/// `manifest.json` mapping file names to SHA-256 digests.
struct OutputDir {
    root: PathBuf,
    digests: BTreeMap<String, String>,
}

impl OutputDir {
    fn create(root: &Path) -> Result<OutputDir, PipelineError> {
        std::fs::create_dir_all(root).map_err(|source| PipelineError::Io {
            path: root.to_path_buf(),
            source,
        })?;
        Ok(OutputDir {
            root: root.to_path_buf(),
            digests: BTreeMap::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<(), PipelineError> {
        let path = self.root.join(name);
        std::fs::write(&path, contents).map_err(|source| PipelineError::Io { path, source })?;
        self.digests
            .insert(name.to_string(), sha256_hex(contents.as_bytes()));
        Ok(())
    }

    fn finish(self) -> Result<Vec<String>, PipelineError> {
        #[derive(serde::Serialize)]
        struct Manifest<'a> {
            files: &'a BTreeMap<String, String>,
        }
        let mut text = serde_json::to_string_pretty(&Manifest {
            files: &self.digests,
        })
        .expect("manifest serialization cannot fail");
        text.push('\n');
        let path = self.root.join("manifest.json");
        std::fs::write(&path, &text).map_err(|source| PipelineError::Io { path, source })?;
        let mut names: Vec<String> = self.digests.into_keys().collect();
        names.push("manifest.json".to_string());
        Ok(names)
    }
}

/// Files written by a run, in the order they appear in the manifest.
pub struct RunReport {
    pub output_dir: PathBuf,
    pub files: Vec<String>,
}

fn ingest_report_json(report: &IngestReport) -> String {
    let mut text =
        serde_json::to_string_pretty(report).expect("report serialization cannot fail");
    text.push('\n');
    text
}

fn ingest_report_name(config: &PipelineConfig) -> String {
    let stem = config
        .input
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| "corpus".to_string());
    format!("{stem}.ingest-report.json")
}

/// Write per-year, per-office, and per-applicant-group tables plus a short
/// corpus summary.
pub fn run_stats(config: &PipelineConfig) -> Result<RunReport, PipelineError> {
    // Filters that match nothing still produce a report: the tables are
    // simply empty.  Only the graph commands treat that as an error.
    let (corpus, report) = filtered_corpus(config)?;
    let mut out = OutputDir::create(&config.output_dir)?;

    let years = corpus.annual_counts();
    let annual: Vec<(String, usize)> = years
        .iter()
        .map(|(year, &count)| (year.to_string(), count))
        .collect();
    out.write("annual_counts.csv", &export::counts_csv("year", "patents", &annual))?;

    let offices: Vec<(String, usize)> = corpus.office_counts().into_iter().collect();
    out.write(
        "office_counts.csv",
        &export::counts_csv("office", "patents", &offices),
    )?;

    if !config.applicant_groups.is_empty() {
        let counts = corpus.applicant_rule_counts(&config.applicant_groups);
        // Rows follow the configured group order, with "unmatched" last.
        let mut rows: Vec<(String, usize)> = config
            .applicant_groups
            .iter()
            .map(|(label, _)| (label.clone(), counts.get(label).copied().unwrap_or(0)))
            .collect();
        rows.push((
            "unmatched".to_string(),
            counts.get("unmatched").copied().unwrap_or(0),
        ));
        out.write(
            "applicant_counts.csv",
            &export::counts_csv("label", "patents", &rows),
        )?;
    }

    let span = match (years.keys().next(), years.keys().next_back()) {
        (Some(first), Some(last)) => format!("{first}-{last}"),
        _ => "none".to_string(),
    };
    let summary = format!(
        concat!(
            "input: {}\n",
            "format: {}\n",
            "records: {}\n",
            "years: {}\n",
            "offices: {}\n",
        ),
        config.input.display(),
        report.format,
        corpus.len(),
        span,
        corpus.office_counts().len(),
    );
    out.write("corpus_summary.txt", &summary)?;
    out.write(&ingest_report_name(config), &ingest_report_json(&report))?;

    Ok(RunReport {
        output_dir: config.output_dir.clone(),
        files: out.finish()?,
    })
}

struct StagedNetworks {
    modularity_name: String,
    mst_name: String,
    /// Modularity network with metrics attached (no positions).
    modularity_plain: ExportGraph,
    /// Modularity network with metrics and positions.
    modularity_placed: ExportGraph,
    forest_plain: ExportGraph,
    forest_placed: ExportGraph,
    network_positions: LayoutPositions,
    forest_positions: LayoutPositions,
}

fn stage_networks(
    artifacts: &NetworkArtifacts,
    config: &PipelineConfig,
) -> Result<StagedNetworks, PipelineError> {
    let level = config.level.name();
    let modularity_name = format!("modularity_{level}");
    let mst_name = format!("mst_{level}");
    let stage_err = |e: export::ExportError| PipelineError::Config(e.to_string());

    let network_positions = force_atlas2(&artifacts.network, &config.layout);
    let forest_positions = force_atlas2(&artifacts.forest_graph, &config.layout);

    let modularity_plain = ExportGraph::from_network(&modularity_name, &artifacts.network)
        .with_metrics(&artifacts.metrics, MetricSource::Network)
        .map_err(stage_err)?;
    let modularity_placed = modularity_plain
        .clone()
        .with_positions(&network_positions)
        .map_err(stage_err)?;

    let forest_components = connected_components(&artifacts.forest_graph);
    let forest_plain = ExportGraph::from_distances(&mst_name, &artifacts.forest_graph)
        .with_metrics(&artifacts.metrics, MetricSource::Forest)
        .map_err(stage_err)?
        .with_components(&forest_components)
        .map_err(stage_err)?;
    let forest_placed = forest_plain
        .clone()
        .with_positions(&forest_positions)
        .map_err(stage_err)?;

    Ok(StagedNetworks {
        modularity_name,
        mst_name,
        modularity_plain,
        modularity_placed,
        forest_plain,
        forest_placed,
        network_positions,
        forest_positions,
    })
}

/// Write the format-gated graph files for one staged network. GraphML, DOT,
/// and the CSV pair stay layout-free; GEXF and SVG carry positions.
fn write_graph_files(
    out: &mut OutputDir,
    config: &PipelineConfig,
    name: &str,
    plain: &ExportGraph,
    placed: &ExportGraph,
    with_nodes_csv: bool,
) -> Result<(), PipelineError> {
    let render = |g: &ExportGraph, f: ExportFormat| {
        export::export_graph(g, f).map_err(|e| PipelineError::Config(e.to_string()))
    };
    if config.wants(ExportFormat::CsvEdgeList) {
        out.write(&format!("{name}.edges.csv"), &export::edges_csv(plain))?;
        if with_nodes_csv {
            out.write(&format!("{name}.nodes.csv"), &export::nodes_csv(plain))?;
        }
    }
    if config.wants(ExportFormat::GraphMl) {
        out.write(&format!("{name}.graphml"), &render(plain, ExportFormat::GraphMl)?)?;
    }
    if config.wants(ExportFormat::Gexf) {
        out.write(&format!("{name}.gexf"), &render(placed, ExportFormat::Gexf)?)?;
    }
    if config.wants(ExportFormat::Dot) {
        out.write(&format!("{name}.dot"), &render(plain, ExportFormat::Dot)?)?;
    }
    if config.wants(ExportFormat::Svg) {
        let svg = export::render_svg(placed, &config.render)
            .map_err(|e| PipelineError::Config(e.to_string()))?;
        out.write(&format!("{name}.svg"), &svg)?;
    }
    Ok(())
}

/// Full run: both networks, metrics, layouts, summaries, exports, manifest.
pub fn run_network(config: &PipelineConfig) -> Result<RunReport, PipelineError> {
    let (corpus, report) = prepare_corpus(config)?;
    let artifacts = build_artifacts(&corpus, config)?;
    let staged = stage_networks(&artifacts, config)?;
    let level = config.level.name();
    let mut out = OutputDir::create(&config.output_dir)?;

    write_graph_files(
        &mut out,
        config,
        &staged.modularity_name,
        &staged.modularity_plain,
        &staged.modularity_placed,
        true,
    )?;
    write_graph_files(
        &mut out,
        config,
        &staged.mst_name,
        &staged.forest_plain,
        &staged.forest_placed,
        false,
    )?;

    out.write(
        &format!("metrics_{level}.csv"),
        &export::metrics_csv(&artifacts.metrics),
    )?;
    out.write(
        &format!("layout_modularity_{level}.csv"),
        &export::positions_csv(&staged.network_positions),
    )?;
    out.write(
        &format!("layout_mst_{level}.csv"),
        &export::positions_csv(&staged.forest_positions),
    )?;

    let summary = export::network_summary(
        &staged.modularity_name,
        &artifacts.network,
        &artifacts.metrics,
        config.top_edges,
    );
    out.write(
        &format!("{}.summary.txt", staged.modularity_name),
        &export::render_network_summary(&summary),
    )?;
    let forest = export::forest_summary(&staged.mst_name, &artifacts.forest_graph, config.top_edges);
    out.write(
        &format!("{}.summary.txt", staged.mst_name),
        &export::render_forest_summary(&forest),
    )?;

    out.write(&ingest_report_name(config), &ingest_report_json(&report))?;
    Ok(RunReport {
        output_dir: config.output_dir.clone(),
        files: out.finish()?,
    })
}

/// Spanning-forest slice of the full run.
pub fn run_mst(config: &PipelineConfig) -> Result<RunReport, PipelineError> {
    let (corpus, report) = prepare_corpus(config)?;
    let artifacts = build_artifacts(&corpus, config)?;
    let staged = stage_networks(&artifacts, config)?;
    let level = config.level.name();
    let mut out = OutputDir::create(&config.output_dir)?;

    write_graph_files(
        &mut out,
        config,
        &staged.mst_name,
        &staged.forest_plain,
        &staged.forest_placed,
        false,
    )?;
    out.write(
        &format!("layout_mst_{level}.csv"),
        &export::positions_csv(&staged.forest_positions),
    )?;
    let forest = export::forest_summary(&staged.mst_name, &artifacts.forest_graph, config.top_edges);
    out.write(
        &format!("{}.summary.txt", staged.mst_name),
        &export::render_forest_summary(&forest),
    )?;
    out.write(&ingest_report_name(config), &ingest_report_json(&report))?;
    Ok(RunReport {
        output_dir: config.output_dir.clone(),
        files: out.finish()?,
    })
}

/// Layout-only run: positions tables for both networks.
pub fn run_layout(config: &PipelineConfig) -> Result<RunReport, PipelineError> {
    let (corpus, _report) = prepare_corpus(config)?;
    let artifacts = build_artifacts(&corpus, config)?;
    let level = config.level.name();
    let network_positions = force_atlas2(&artifacts.network, &config.layout);
    let forest_positions = force_atlas2(&artifacts.forest_graph, &config.layout);
    let mut out = OutputDir::create(&config.output_dir)?;
    out.write(
        &format!("layout_modularity_{level}.csv"),
        &export::positions_csv(&network_positions),
    )?;
    out.write(
        &format!("layout_mst_{level}.csv"),
        &export::positions_csv(&forest_positions),
    )?;
    Ok(RunReport {
        output_dir: config.output_dir.clone(),
        files: out.finish()?,
    })
}

/// Graph-file exports only (no metrics table, layouts table, or summaries).
pub fn run_export(config: &PipelineConfig) -> Result<RunReport, PipelineError> {
    let (corpus, _report) = prepare_corpus(config)?;
    let artifacts = build_artifacts(&corpus, config)?;
    let staged = stage_networks(&artifacts, config)?;
    let mut out = OutputDir::create(&config.output_dir)?;
    write_graph_files(
        &mut out,
        config,
        &staged.modularity_name,
        &staged.modularity_plain,
        &staged.modularity_placed,
        true,
    )?;
    write_graph_files(
        &mut out,
        config,
        &staged.mst_name,
        &staged.forest_plain,
        &staged.forest_placed,
        false,
    )?;
    Ok(RunReport {
        output_dir: config.output_dir.clone(),
        files: out.finish()?,
    })
}

/// Occurrence counts per code at a level, over an already-filtered corpus.
/// Used by the replication checks.
pub fn occurrence_counts(corpus: &Corpus, level: IpcLevel) -> BTreeMap<String, u32> {
    let mut counts: BTreeMap<String, u32> = BTreeMap::new();
    for record in corpus.records() {
        for code in record.codes_at_level(level) {
            *counts.entry(code.as_str().to_string()).or_insert(0) += 1;
        }
    }
    counts
}
