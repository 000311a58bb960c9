//! Comparison harness: run the pipeline and diff the results against an
//! expected-values manifest.
//!
//! The embedded manifest carries the published reference figures for the
//! Activision Blizzard study (corpus totals, annual counts, office split,
//! per-filer counts, network/forest shapes at subclass and group level,
//! prolific-code occurrences, and the strongest edges with their Jaccard
//! values at three decimals). `--expected` swaps in another manifest, which
//! is how the fixture tests drive this module.
//!
//! Every comparison becomes one pass/fail line. Counts are compared exactly;
//! Jaccard values are compared after the same three-decimal rounding used in
//! the exports. Community labels are never compared, only their number.

use std::collections::BTreeMap;
use std::path::Path;

use ipcmap_core::graph::jaccard_thousandths;
use ipcmap_core::ipc::{IpcCode, IpcLevel};
use ipcmap_core::metrics::connected_components;
use serde::Deserialize;

use crate::export::format_jaccard;
use crate::pipeline::{
    build_artifacts, prepare_corpus, PipelineConfig, PipelineError,
};

/// Reference figures to check a run against. Every field is optional;
/// absent entries are simply not checked.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExpectedManifest {
    /// Total records after filtering.
    pub records: Option<usize>,
    /// Publication-year counts, keyed by year.
    pub annual: BTreeMap<String, usize>,
    /// Records per office code.
    pub offices: BTreeMap<String, usize>,
    /// Records per applicant group. When the pipeline config defines no
    /// groups, each label doubles as its own case-insensitive pattern.
    pub applicant_groups: BTreeMap<String, usize>,
    /// Network shapes keyed by level name (`subclass`, `group`, ...).
    pub networks: BTreeMap<String, ExpectedNetwork>,
    /// Occurrence counts of individual codes, keyed by level then code.
    pub occurrences: BTreeMap<String, BTreeMap<String, u32>>,
    /// Strongest edges, keyed by level.
    pub edges: BTreeMap<String, Vec<ExpectedEdge>>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExpectedNetwork {
    pub nodes: Option<usize>,
    pub edges: Option<usize>,
    pub components: Option<usize>,
    pub communities: Option<usize>,
    /// Spanning-forest component sizes, largest first.
    pub mst_component_sizes: Option<Vec<usize>>,
    /// Total spanning-forest edge count.
    pub mst_edges: Option<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedEdge {
    pub source: String,
    pub target: String,
    pub n_ij: Option<u32>,
    /// Three-decimal Jaccard as printed, e.g. "0.210".
    pub jaccard: Option<String>,
}

/// Published reference figures, kept as JSON so the file format documents
/// itself.
const EMBEDDED_MANIFEST: &str = r#"{
  "records": 612,
  "annual": { "2008": 3, "2014": 73, "2023": 42 },
  "offices": { "US": 544, "WO": 63, "EP": 3, "JP": 1, "BR": 1 },
  "applicant_groups": {
    "Activision Publishing": 317,
    "King.com": 269,
    "Blizzard Entertainment": 26
  },
  "networks": {
    "subclass": {
      "nodes": 20, "edges": 26, "components": 3, "communities": 5,
      "mst_component_sizes": [20], "mst_edges": 19
    },
    "group": {
      "nodes": 224, "edges": 1312, "components": 4, "communities": 16,
      "mst_component_sizes": [220, 3, 1], "mst_edges": 221
    }
  },
  "occurrences": {
    "subclass": {
      "A63F": 485, "G06F": 177, "G07F": 65, "G06T": 52, "G06Q": 35,
      "H04L": 33, "A63B": 20, "G06N": 18, "G06K": 17, "H04N": 16
    },
    "group": {
      "A63F 13/00": 121, "A63F 9/24": 79, "A63F 13/30": 78, "A63F 13/69": 78,
      "A63F 13/537": 72, "G07F 17/32": 65, "A63F 13/35": 64, "A63F 13/52": 53,
      "A63F 13/40": 48, "A63F 13/79": 45, "A63F 13/795": 43, "A63F 13/25": 39,
      "A63F 13/80": 38, "A63F 13/2145": 37, "G06F 17/00": 35, "A63F 13/60": 32,
      "A63F 13/335": 31, "A63F 13/46": 30, "A63F 13/67": 29, "G06F 9/44": 28
    }
  },
  "edges": {
    "subclass": [
      { "source": "A63F", "target": "G06F", "n_ij": 115, "jaccard": "0.210" },
      { "source": "A63B", "target": "G07F", "n_ij": 19, "jaccard": "0.288" },
      { "source": "G06K", "target": "G06T", "n_ij": 11, "jaccard": "0.190" }
    ],
    "group": [
      { "source": "A63F 13/00", "target": "A63F 9/24", "n_ij": 36, "jaccard": "0.220" },
      { "source": "A63F 13/30", "target": "G07F 17/32", "n_ij": 35, "jaccard": "0.324" },
      { "source": "A63F 13/00", "target": "A63F 13/30", "n_ij": 35, "jaccard": "0.213" }
    ]
  }
}"#;

impl ExpectedManifest {
    /// The reference figures shipped with the binary.
    pub fn embedded() -> ExpectedManifest {
        serde_json::from_str(EMBEDDED_MANIFEST).expect("embedded manifest is valid")
    }

    pub fn from_file(path: &Path) -> Result<ExpectedManifest, PipelineError> {
        let text = std::fs::read_to_string(path).map_err(|source| PipelineError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text)
            .map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))
    }
}

/// One comparison outcome.
#[derive(Clone, Debug)]
pub struct CheckLine {
    pub label: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

/// All comparison outcomes of one replication run.
#[derive(Clone, Debug, Default)]
pub struct ReplicationReport {
    pub lines: Vec<CheckLine>,
}

impl ReplicationReport {
    fn check(&mut self, label: impl Into<String>, expected: impl ToString, actual: impl ToString) {
        let expected = expected.to_string();
        let actual = actual.to_string();
        self.lines.push(CheckLine {
            label: label.into(),
            pass: expected == actual,
            expected,
            actual,
        });
    }

    pub fn all_pass(&self) -> bool {
        self.lines.iter().all(|line| line.pass)
    }

    pub fn passed(&self) -> usize {
        self.lines.iter().filter(|line| line.pass).count()
    }

    /// One line per check: `PASS <label>: expected X, got X`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for line in &self.lines {
            out.push_str(&format!(
                "{} {}: expected {}, got {}\n",
                if line.pass { "PASS" } else { "FAIL" },
                line.label,
                line.expected,
                line.actual
            ));
        }
        out.push_str(&format!(
            "{}: {} of {} checks passed\n",
            if self.all_pass() { "PASS" } else { "FAIL" },
            self.passed(),
            self.lines.len()
        ));
        out
    }
}

fn parse_level_name(name: &str) -> Result<IpcLevel, PipelineError> {
    match name {
        "section" => Ok(IpcLevel::Section),
        "class" => Ok(IpcLevel::Class),
        "subclass" => Ok(IpcLevel::Subclass),
        "group" => Ok(IpcLevel::Group),
        other => Err(PipelineError::Config(format!(
            "expected-values manifest names unknown level {other:?}"
        ))),
    }
}

fn parse_code(text: &str) -> Result<IpcCode, PipelineError> {
    IpcCode::parse(text).map_err(|e| {
        PipelineError::Config(format!("expected-values manifest has a bad code: {e}"))
    })
}

/// Run the pipeline per the config and compare against the manifest.
/// A failed check is a result, not an error; inspect
/// [`ReplicationReport::all_pass`].
pub fn run_replicate(
    config: &PipelineConfig,
    expected: &ExpectedManifest,
) -> Result<ReplicationReport, PipelineError> {
    let (corpus, _ingest) = prepare_corpus(config)?;
    let mut report = ReplicationReport::default();

    if let Some(records) = expected.records {
        report.check("corpus records", records, corpus.len());
    }
    if !expected.annual.is_empty() {
        let annual = corpus.annual_counts();
        for (year, &count) in &expected.annual {
            let actual = year
                .parse::<i32>()
                .ok()
                .and_then(|y| annual.get(&y).copied())
                .unwrap_or(0);
            report.check(format!("patents in {year}"), count, actual);
        }
    }
    if !expected.offices.is_empty() {
        let offices = corpus.office_counts();
        for (office, &count) in &expected.offices {
            report.check(
                format!("patents at office {office}"),
                count,
                offices.get(office).copied().unwrap_or(0),
            );
        }
    }
    if !expected.applicant_groups.is_empty() {
        // Use configured groups when present; otherwise each expected label
        // is its own pattern.
        let rules: Vec<(String, Vec<String>)> = if config.applicant_groups.is_empty() {
            expected
                .applicant_groups
                .keys()
                .map(|label| (label.clone(), vec![label.to_lowercase()]))
                .collect()
        } else {
            config.applicant_groups.clone()
        };
        let counts = corpus.applicant_rule_counts(&rules);
        for (label, &count) in &expected.applicant_groups {
            report.check(
                format!("patents by {label}"),
                count,
                counts.get(label).copied().unwrap_or(0),
            );
        }
    }

    for (level_name, shape) in &expected.networks {
        let level = parse_level_name(level_name)?;
        let level_config = PipelineConfig {
            level,
            ..config.clone()
        };
        let artifacts = build_artifacts(&corpus, &level_config)?;

        if let Some(nodes) = shape.nodes {
            report.check(
                format!("{level_name} network nodes"),
                nodes,
                artifacts.network.node_count(),
            );
        }
        if let Some(edges) = shape.edges {
            report.check(
                format!("{level_name} network edges"),
                edges,
                artifacts.network.edge_count(),
            );
        }
        if let Some(components) = shape.components {
            report.check(
                format!("{level_name} network components"),
                components,
                artifacts.metrics.component_count(),
            );
        }
        if let Some(communities) = shape.communities {
            report.check(
                format!("{level_name} network communities"),
                communities,
                artifacts.metrics.community_count(),
            );
        }
        if let Some(mst_edges) = shape.mst_edges {
            report.check(
                format!("{level_name} forest edges"),
                mst_edges,
                artifacts.forest.edge_count(),
            );
        }
        if let Some(sizes) = &shape.mst_component_sizes {
            let actual = connected_components(&artifacts.forest_graph).sizes();
            report.check(
                format!("{level_name} forest component sizes"),
                format!("{sizes:?}"),
                format!("{actual:?}"),
            );
        }

        if let Some(counts) = expected.occurrences.get(level_name) {
            for (code_text, &count) in counts {
                let code = parse_code(code_text)?;
                let actual = artifacts
                    .full
                    .occurrence(&code)
                    .map(|n| n.to_string())
                    .unwrap_or_else(|| "absent".to_string());
                report.check(format!("occurrence of {code_text}"), count, actual);
            }
        }
        if let Some(edges) = expected.edges.get(level_name) {
            for edge in edges {
                let source = parse_code(&edge.source)?;
                let target = parse_code(&edge.target)?;
                let label = format!("edge {} -- {}", edge.source, edge.target);
                let found = artifacts.full.edges().iter().find(|(pair, _)| {
                    (pair.source() == &source && pair.target() == &target)
                        || (pair.source() == &target && pair.target() == &source)
                });
                match found {
                    None => {
                        if edge.n_ij.is_some() || edge.jaccard.is_some() {
                            report.check(format!("{label} present"), "yes", "no");
                        }
                    }
                    Some((pair, data)) => {
                        if let Some(n_ij) = edge.n_ij {
                            report.check(format!("{label} n_ij"), n_ij, data.count);
                        }
                        if let Some(jaccard) = &edge.jaccard {
                            let n_i = artifacts
                                .full
                                .occurrence(pair.source())
                                .expect("edge endpoint is a node");
                            let n_j = artifacts
                                .full
                                .occurrence(pair.target())
                                .expect("edge endpoint is a node");
                            let thousandths = jaccard_thousandths(n_i, n_j, data.count)
                                .expect("counts were validated when the graph was built");
                            report.check(
                                format!("{label} jaccard"),
                                jaccard,
                                format_jaccard(thousandths),
                            );
                        }
                    }
                }
            }
        }
    }

    Ok(report)
}
