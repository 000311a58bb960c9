//! Serialization of networks, metrics, layouts, and summaries.
//!
//! Every writer here is deterministic down to the byte: nodes are emitted in
//! code order, edges in canonical pair order, and floats through pinned
//! format strings (Jaccard at three decimals, everything else at six). That
//! makes output files directly comparable across runs and suitable for
//! golden-file tests.
//!
//! Layout coordinates travel in GEXF, SVG, and the positions CSV. GraphML
//! and DOT stay layout-free on purpose, so topology exports do not change
//! when only layout parameters do.

use std::borrow::Cow;
use std::collections::BTreeMap;

use ipcmap_core::graph::{jaccard_thousandths, CooccurrenceGraph, DistanceGraph};
use ipcmap_core::ipc::{IpcCode, IpcLevel};
use ipcmap_core::layout::LayoutPositions;
use ipcmap_core::metrics::{connected_components, MetricsTable, Partition};

/// Output file formats `export_graph` can produce.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    /// Edge list CSV (`source,target,...`).
    CsvEdgeList,
    GraphMl,
    Gexf,
    Dot,
    Svg,
}

impl ExportFormat {
    pub fn from_name(name: &str) -> Result<ExportFormat, ExportError> {
        match name {
            "csv" | "csv-edgelist" => Ok(ExportFormat::CsvEdgeList),
            "graphml" => Ok(ExportFormat::GraphMl),
            "gexf" => Ok(ExportFormat::Gexf),
            "dot" => Ok(ExportFormat::Dot),
            "svg" => Ok(ExportFormat::Svg),
            other => Err(ExportError::UnsupportedFormat {
                name: other.to_string(),
            }),
        }
    }

    /// File extension, without the dot.
    pub fn extension(&self) -> &'static str {
        match self {
            ExportFormat::CsvEdgeList => "edges.csv",
            ExportFormat::GraphMl => "graphml",
            ExportFormat::Gexf => "gexf",
            ExportFormat::Dot => "dot",
            ExportFormat::Svg => "svg",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ExportError {
    #[error("unsupported export format {name:?} (expected csv, graphml, gexf, dot, or svg)")]
    UnsupportedFormat { name: String },
    #[error("no position for node {code}; compute a layout first")]
    MissingPositions { code: String },
    #[error("no {what} for node {code}")]
    MissingMetrics { code: String, what: &'static str },
    #[error("svg output requires positions on every node")]
    SvgWithoutPositions,
}

/// Which columns of a metrics table to project onto a graph being exported.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetricSource {
    /// Degree, betweenness, community, and component of the modularity network.
    Network,
    /// Degree and betweenness within the spanning forest.
    Forest,
}

#[derive(Clone, Debug)]
struct NodeRow {
    code: IpcCode,
    occurrence: u32,
    degree: Option<usize>,
    betweenness: Option<f64>,
    modularity_class: Option<usize>,
    component: Option<usize>,
    position: Option<(f64, f64)>,
}

#[derive(Clone, Debug)]
struct EdgeRow {
    source: usize,
    target: usize,
    count: Option<u32>,
    /// Jaccard in half-up-rounded thousandths, kept as an integer so the
    /// three-decimal rendering is exact.
    jaccard_thousandths: Option<u32>,
    jaccard: Option<f64>,
    distance: Option<f64>,
}

/// A network staged for serialization: nodes in code order, edges in
/// canonical pair order, with whatever attributes have been attached.
#[derive(Clone, Debug)]
pub struct ExportGraph {
    name: String,
    nodes: Vec<NodeRow>,
    edges: Vec<EdgeRow>,
    index: BTreeMap<IpcCode, usize>,
}

impl ExportGraph {
    /// Stage a co-occurrence network. Edges carry counts and Jaccard.
    pub fn from_network(name: impl Into<String>, graph: &CooccurrenceGraph) -> ExportGraph {
        let mut staged = ExportGraph::bare(name, graph.nodes());
        for (pair, edge) in graph.edges() {
            let n_i = graph.occurrence(pair.source()).expect("edge endpoint is a node");
            let n_j = graph.occurrence(pair.target()).expect("edge endpoint is a node");
            let thousandths = jaccard_thousandths(n_i, n_j, edge.count)
                .expect("counts were validated when the graph was built");
            staged.edges.push(EdgeRow {
                source: staged.index[pair.source()],
                target: staged.index[pair.target()],
                count: Some(edge.count),
                jaccard_thousandths: Some(thousandths),
                jaccard: Some(edge.jaccard),
                distance: None,
            });
        }
        staged
    }

    /// Stage a distance graph (typically a spanning forest). Edges carry
    /// distances.
    pub fn from_distances(name: impl Into<String>, graph: &DistanceGraph) -> ExportGraph {
        let mut staged = ExportGraph::bare(name, graph.nodes());
        for (pair, &distance) in graph.edges() {
            staged.edges.push(EdgeRow {
                source: staged.index[pair.source()],
                target: staged.index[pair.target()],
                count: None,
                jaccard_thousandths: None,
                jaccard: None,
                distance: Some(distance),
            });
        }
        staged
    }

    fn bare(name: impl Into<String>, nodes: &BTreeMap<IpcCode, u32>) -> ExportGraph {
        let mut staged = ExportGraph {
            name: name.into(),
            nodes: Vec::with_capacity(nodes.len()),
            edges: Vec::new(),
            index: BTreeMap::new(),
        };
        for (code, &occurrence) in nodes {
            staged.index.insert(code.clone(), staged.nodes.len());
            staged.nodes.push(NodeRow {
                code: code.clone(),
                occurrence,
                degree: None,
                betweenness: None,
                modularity_class: None,
                component: None,
                position: None,
            });
        }
        staged
    }

    /// Attach degree/betweenness (and, for the network flavor, community and
    /// component labels) from a metrics table.
    pub fn with_metrics(
        mut self,
        table: &MetricsTable,
        source: MetricSource,
    ) -> Result<ExportGraph, ExportError> {
        let by_code: BTreeMap<&IpcCode, &ipcmap_core::metrics::MetricsRow> =
            table.rows().iter().map(|row| (&row.code, row)).collect();
        for node in &mut self.nodes {
            let row = by_code
                .get(&node.code)
                .ok_or_else(|| ExportError::MissingMetrics {
                    code: node.code.as_str().to_string(),
                    what: "metrics row",
                })?;
            match source {
                MetricSource::Network => {
                    node.degree = Some(row.degree);
                    node.betweenness = Some(row.betweenness);
                    node.modularity_class = Some(row.modularity_class);
                    node.component = Some(row.component);
                }
                MetricSource::Forest => {
                    node.degree = Some(row.mst_degree.ok_or(ExportError::MissingMetrics {
                        code: node.code.as_str().to_string(),
                        what: "forest degree",
                    })?);
                    node.betweenness =
                        Some(row.mst_betweenness.ok_or(ExportError::MissingMetrics {
                            code: node.code.as_str().to_string(),
                            what: "forest betweenness",
                        })?);
                }
            }
        }
        Ok(self)
    }

    /// Attach component labels from a partition (used for forests, whose
    /// components differ from the thresholded network's).
    pub fn with_components(mut self, components: &Partition) -> Result<ExportGraph, ExportError> {
        for node in &mut self.nodes {
            node.component =
                Some(
                    components
                        .label_of(&node.code)
                        .ok_or(ExportError::MissingMetrics {
                            code: node.code.as_str().to_string(),
                            what: "component label",
                        })?,
                );
        }
        Ok(self)
    }

    /// Attach layout coordinates. Every node must be covered.
    pub fn with_positions(mut self, positions: &LayoutPositions) -> Result<ExportGraph, ExportError> {
        for node in &mut self.nodes {
            node.position = Some(positions.get(&node.code).ok_or(
                ExportError::MissingPositions {
                    code: node.code.as_str().to_string(),
                },
            )?);
        }
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    fn has_network_metrics(&self) -> bool {
        self.nodes.first().map_or(false, |n| n.degree.is_some())
    }

    fn has_communities(&self) -> bool {
        self.nodes
            .first()
            .map_or(false, |n| n.modularity_class.is_some())
    }

    fn has_components(&self) -> bool {
        self.nodes.first().map_or(false, |n| n.component.is_some())
    }

    fn has_counts(&self) -> bool {
        self.edges.first().map_or(false, |e| e.count.is_some())
    }

    fn has_distances(&self) -> bool {
        self.edges.first().map_or(false, |e| e.distance.is_some())
    }
}

/// Render a staged graph in one of the text formats. SVG needs a style, so
/// it lives in [`render_svg`]; requesting it here points there.
pub fn export_graph(graph: &ExportGraph, format: ExportFormat) -> Result<String, ExportError> {
    match format {
        ExportFormat::CsvEdgeList => Ok(edges_csv(graph)),
        ExportFormat::GraphMl => Ok(graphml(graph)),
        ExportFormat::Gexf => Ok(gexf(graph)),
        ExportFormat::Dot => Ok(dot(graph)),
        ExportFormat::Svg => render_svg(graph, &RenderStyle::default()),
    }
}

/// Three-decimal Jaccard from half-up-rounded thousandths.
pub fn format_jaccard(thousandths: u32) -> String {
    format!("{}.{:03}", thousandths / 1000, thousandths % 1000)
}

fn fmt6(value: f64) -> String {
    format!("{value:.6}")
}

/// RFC 4180 quoting for a single CSV field.
fn csv_field(text: &str) -> Cow<'_, str> {
    if text.contains(',') || text.contains('"') || text.contains('\n') {
        Cow::Owned(format!("\"{}\"", text.replace('"', "\"\"")))
    } else {
        Cow::Borrowed(text)
    }
}

fn xml_escape(text: &str) -> Cow<'_, str> {
    if text.contains(['&', '<', '>', '"', '\'']) {
        Cow::Owned(
            text.replace('&', "&amp;")
                .replace('<', "&lt;")
                .replace('>', "&gt;")
                .replace('"', "&quot;")
                .replace('\'', "&apos;"),
        )
    } else {
        Cow::Borrowed(text)
    }
}

/// `code,occurrence` node list, one row per node in code order.
pub fn nodes_csv(graph: &ExportGraph) -> String {
    let mut out = String::from("code,occurrence\n");
    for node in &graph.nodes {
        out.push_str(&format!(
            "{},{}\n",
            csv_field(node.code.as_str()),
            node.occurrence
        ));
    }
    out
}

/// Edge list CSV. Co-occurrence edges render as
/// `source,target,n_ij,jaccard`; distance edges as `source,target,distance`.
pub fn edges_csv(graph: &ExportGraph) -> String {
    let mut out = String::new();
    if graph.has_distances() {
        out.push_str("source,target,distance\n");
        for edge in &graph.edges {
            out.push_str(&format!(
                "{},{},{}\n",
                csv_field(graph.nodes[edge.source].code.as_str()),
                csv_field(graph.nodes[edge.target].code.as_str()),
                fmt6(edge.distance.unwrap_or(0.0)),
            ));
        }
    } else {
        out.push_str("source,target,n_ij,jaccard\n");
        for edge in &graph.edges {
            out.push_str(&format!(
                "{},{},{},{}\n",
                csv_field(graph.nodes[edge.source].code.as_str()),
                csv_field(graph.nodes[edge.target].code.as_str()),
                edge.count.unwrap_or(0),
                format_jaccard(edge.jaccard_thousandths.unwrap_or(0)),
            ));
        }
    }
    out
}

/// Metrics CSV with the pinned seven-column header. Forest columns are left
/// empty when the table was built without a forest.
pub fn metrics_csv(table: &MetricsTable) -> String {
    let mut out =
        String::from("code,patents,modularity_class,degree,betweenness,mst_degree,mst_betweenness\n");
    for row in table.rows() {
        let mst_degree = row
            .mst_degree
            .map(|d| d.to_string())
            .unwrap_or_default();
        let mst_betweenness = row.mst_betweenness.map(fmt6).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            csv_field(row.code.as_str()),
            row.occurrence,
            row.modularity_class,
            row.degree,
            fmt6(row.betweenness),
            mst_degree,
            mst_betweenness,
        ));
    }
    out
}

/// `code,x,y` layout table in code order.
pub fn positions_csv(positions: &LayoutPositions) -> String {
    let mut out = String::from("code,x,y\n");
    for (code, &(x, y)) in positions.positions() {
        out.push_str(&format!(
            "{},{},{}\n",
            csv_field(code.as_str()),
            fmt6(x),
            fmt6(y)
        ));
    }
    out
}

/// Generic two-column counts CSV (used for annual, office, and applicant
/// tables). Rows are emitted in the order given.
pub fn counts_csv(key_header: &str, value_header: &str, rows: &[(String, usize)]) -> String {
    let mut out = format!("{key_header},{value_header}\n");
    for (key, value) in rows {
        out.push_str(&format!("{},{}\n", csv_field(key), value));
    }
    out
}

fn graphml(graph: &ExportGraph) -> String {
    let mut out = String::from(concat!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n",
        "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\"",
        " xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\"",
        " xsi:schemaLocation=\"http://graphml.graphdrawing.org/xmlns",
        " http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd\">\n",
    ));
    let key = |id: &str, target: &str, ty: &str, out: &mut String| {
        out.push_str(&format!(
            "  <key id=\"{id}\" for=\"{target}\" attr.name=\"{id}\" attr.type=\"{ty}\"/>\n"
        ));
    };
    key("code", "node", "string", &mut out);
    key("occurrence", "node", "int", &mut out);
    if graph.has_network_metrics() {
        key("degree", "node", "int", &mut out);
        key("betweenness", "node", "double", &mut out);
    }
    if graph.has_communities() {
        key("modularity_class", "node", "int", &mut out);
    }
    if graph.has_components() {
        key("component", "node", "int", &mut out);
    }
    if graph.has_counts() {
        key("n_ij", "edge", "int", &mut out);
        key("jaccard", "edge", "double", &mut out);
    }
    if graph.has_distances() {
        key("distance", "edge", "double", &mut out);
    }
    out.push_str(&format!(
        "  <graph id=\"{}\" edgedefault=\"undirected\">\n",
        xml_escape(graph.name())
    ));
    for (i, node) in graph.nodes.iter().enumerate() {
        out.push_str(&format!("    <node id=\"n{i}\">\n"));
        out.push_str(&format!(
            "      <data key=\"code\">{}</data>\n",
            xml_escape(node.code.as_str())
        ));
        out.push_str(&format!(
            "      <data key=\"occurrence\">{}</data>\n",
            node.occurrence
        ));
        if let Some(degree) = node.degree {
            out.push_str(&format!("      <data key=\"degree\">{degree}</data>\n"));
        }
        if let Some(betweenness) = node.betweenness {
            out.push_str(&format!(
                "      <data key=\"betweenness\">{}</data>\n",
                fmt6(betweenness)
            ));
        }
        if let Some(class) = node.modularity_class {
            out.push_str(&format!(
                "      <data key=\"modularity_class\">{class}</data>\n"
            ));
        }
        if let Some(component) = node.component {
            out.push_str(&format!(
                "      <data key=\"component\">{component}</data>\n"
            ));
        }
        out.push_str("    </node>\n");
    }
    for (i, edge) in graph.edges.iter().enumerate() {
        out.push_str(&format!(
            "    <edge id=\"e{i}\" source=\"n{}\" target=\"n{}\">\n",
            edge.source, edge.target
        ));
        if let Some(count) = edge.count {
            out.push_str(&format!("      <data key=\"n_ij\">{count}</data>\n"));
        }
        if let Some(thousandths) = edge.jaccard_thousandths {
            out.push_str(&format!(
                "      <data key=\"jaccard\">{}</data>\n",
                format_jaccard(thousandths)
            ));
        }
        if let Some(distance) = edge.distance {
            out.push_str(&format!(
                "      <data key=\"distance\">{}</data>\n",
                fmt6(distance)
            ));
        }
        out.push_str("    </edge>\n");
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

fn gexf(graph: &ExportGraph) -> String {
    let mut out = String::from(concat!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n",
        "<gexf xmlns=\"http://gexf.net/1.3\"",
        " xmlns:viz=\"http://gexf.net/1.3/viz\" version=\"1.3\">\n",
    ));
    out.push_str("  <meta>\n    <creator>ipcmap</creator>\n");
    out.push_str(&format!(
        "    <description>{}</description>\n  </meta>\n",
        xml_escape(graph.name())
    ));
    out.push_str("  <graph defaultedgetype=\"undirected\" mode=\"static\">\n");

    out.push_str("    <attributes class=\"node\">\n");
    let node_attr = |id: &str, ty: &str, out: &mut String| {
        out.push_str(&format!(
            "      <attribute id=\"{id}\" title=\"{id}\" type=\"{ty}\"/>\n"
        ));
    };
    node_attr("occurrence", "integer", &mut out);
    if graph.has_network_metrics() {
        node_attr("degree", "integer", &mut out);
        node_attr("betweenness", "double", &mut out);
    }
    if graph.has_communities() {
        node_attr("modularity_class", "integer", &mut out);
    }
    if graph.has_components() {
        node_attr("component", "integer", &mut out);
    }
    out.push_str("    </attributes>\n");

    if graph.has_counts() || graph.has_distances() {
        out.push_str("    <attributes class=\"edge\">\n");
        if graph.has_counts() {
            out.push_str("      <attribute id=\"n_ij\" title=\"n_ij\" type=\"integer\"/>\n");
        }
        if graph.has_distances() {
            out.push_str("      <attribute id=\"distance\" title=\"distance\" type=\"double\"/>\n");
        }
        out.push_str("    </attributes>\n");
    }

    out.push_str("    <nodes>\n");
    for (i, node) in graph.nodes.iter().enumerate() {
        out.push_str(&format!(
            "      <node id=\"n{i}\" label=\"{}\">\n",
            xml_escape(node.code.as_str())
        ));
        out.push_str("        <attvalues>\n");
        let attvalue = |id: &str, value: String, out: &mut String| {
            out.push_str(&format!(
                "          <attvalue for=\"{id}\" value=\"{value}\"/>\n"
            ));
        };
        attvalue("occurrence", node.occurrence.to_string(), &mut out);
        if let Some(degree) = node.degree {
            attvalue("degree", degree.to_string(), &mut out);
        }
        if let Some(betweenness) = node.betweenness {
            attvalue("betweenness", fmt6(betweenness), &mut out);
        }
        if let Some(class) = node.modularity_class {
            attvalue("modularity_class", class.to_string(), &mut out);
        }
        if let Some(component) = node.component {
            attvalue("component", component.to_string(), &mut out);
        }
        out.push_str("        </attvalues>\n");
        if let Some((x, y)) = node.position {
            out.push_str(&format!(
                "        <viz:position x=\"{}\" y=\"{}\"/>\n",
                fmt6(x),
                fmt6(y)
            ));
            out.push_str(&format!(
                "        <viz:size value=\"{}\"/>\n",
                fmt6(node_display_size(node.occurrence))
            ));
        }
        out.push_str("      </node>\n");
    }
    out.push_str("    </nodes>\n    <edges>\n");
    for (i, edge) in graph.edges.iter().enumerate() {
        let weight = edge
            .jaccard_thousandths
            .map(format_jaccard)
            .or_else(|| edge.distance.map(fmt6));
        out.push_str(&format!(
            "      <edge id=\"e{i}\" source=\"n{}\" target=\"n{}\"",
            edge.source, edge.target
        ));
        if let Some(weight) = &weight {
            out.push_str(&format!(" weight=\"{weight}\""));
        }
        out.push_str(">\n");
        if edge.count.is_some() || edge.distance.is_some() {
            out.push_str("        <attvalues>\n");
            if let Some(count) = edge.count {
                out.push_str(&format!(
                    "          <attvalue for=\"n_ij\" value=\"{count}\"/>\n"
                ));
            }
            if let Some(distance) = edge.distance {
                out.push_str(&format!(
                    "          <attvalue for=\"distance\" value=\"{}\"/>\n",
                    fmt6(distance)
                ));
            }
            out.push_str("        </attvalues>\n");
        }
        out.push_str("      </edge>\n");
    }
    out.push_str("    </edges>\n  </graph>\n</gexf>\n");
    out
}

fn dot(graph: &ExportGraph) -> String {
    let mut out = format!("graph \"{}\" {{\n", graph.name());
    for node in &graph.nodes {
        out.push_str(&format!(
            "  \"{}\" [occurrence={}];\n",
            node.code.as_str(),
            node.occurrence
        ));
    }
    for edge in &graph.edges {
        let mut attrs = Vec::new();
        if let Some(count) = edge.count {
            attrs.push(format!("n_ij={count}"));
        }
        if let Some(thousandths) = edge.jaccard_thousandths {
            attrs.push(format!("jaccard=\"{}\"", format_jaccard(thousandths)));
        }
        if let Some(distance) = edge.distance {
            attrs.push(format!("distance=\"{}\"", fmt6(distance)));
        }
        out.push_str(&format!(
            "  \"{}\" -- \"{}\" [{}];\n",
            graph.nodes[edge.source].code.as_str(),
            graph.nodes[edge.target].code.as_str(),
            attrs.join(", ")
        ));
    }
    out.push_str("}\n");
    out
}

/// Node radius shared by the SVG renderer and the GEXF viz size; this is
/// also the collision size the layout uses, so rendered circles respect the
/// overlap-prevention phase.
fn node_display_size(occurrence: u32) -> f64 {
    1.0 + (occurrence as f64).sqrt()
}

/// How nodes are colored in rendered maps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColorBy {
    /// Palette color per community label (cycling through 16 colors).
    ModularityClass,
    /// Single fixed color.
    Fixed,
    /// Highlight nodes at or above the prolific threshold.
    ProlificFlag,
}

/// How edge stroke widths are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeThickness {
    /// Width grows with the Jaccard weight.
    Jaccard,
    /// Uniform width.
    Fixed,
}

/// Styling knobs for [`render_svg`].
#[derive(Clone, Debug)]
pub struct RenderStyle {
    pub color_by: ColorBy,
    /// Only nodes with at least this many patents get a text label.
    pub label_min_occurrence: u32,
    /// Occurrence count at which `ProlificFlag` highlights a node.
    pub prolific_threshold: u32,
    pub edge_thickness: EdgeThickness,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle {
            color_by: ColorBy::ModularityClass,
            label_min_occurrence: 0,
            prolific_threshold: 50,
            edge_thickness: EdgeThickness::Jaccard,
        }
    }
}

/// Fixed categorical palette; community labels cycle through it.
pub const PALETTE: [&str; 16] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf", "#aec7e8", "#ffbb78", "#98df8a", "#ff9896", "#c5b0d5", "#c49c94",
];

const FIXED_COLOR: &str = "#4e79a7";
const PROLIFIC_COLOR: &str = "#d62728";
const ORDINARY_COLOR: &str = "#9e9e9e";

fn fmt3(value: f64) -> String {
    format!("{value:.3}")
}

/// Render the staged graph as a standalone SVG. Edges are drawn beneath
/// nodes, labels above; node area scales with the square root of occurrence.
/// Every node must carry a position.
pub fn render_svg(graph: &ExportGraph, style: &RenderStyle) -> Result<String, ExportError> {
    if graph.nodes.iter().any(|n| n.position.is_none()) {
        return match graph.nodes.iter().find(|n| n.position.is_none()) {
            Some(node) => Err(ExportError::MissingPositions {
                code: node.code.as_str().to_string(),
            }),
            None => Err(ExportError::SvgWithoutPositions),
        };
    }

    let mut min_x = f64::INFINITY;
    let mut min_y = f64::INFINITY;
    let mut max_x = f64::NEG_INFINITY;
    let mut max_y = f64::NEG_INFINITY;
    for node in &graph.nodes {
        let (x, y) = node.position.expect("checked above");
        let r = node_display_size(node.occurrence);
        min_x = min_x.min(x - r);
        min_y = min_y.min(y - r);
        max_x = max_x.max(x + r);
        max_y = max_y.max(y + r);
    }
    if graph.nodes.is_empty() {
        min_x = -50.0;
        min_y = -50.0;
        max_x = 50.0;
        max_y = 50.0;
    }
    let pad = 0.05 * (max_x - min_x).max(max_y - min_y) + 20.0;
    let view_x = min_x - pad;
    let view_y = min_y - pad;
    let view_w = (max_x - min_x) + 2.0 * pad;
    let view_h = (max_y - min_y) + 2.0 * pad;
    let width = 1000.0;
    let height = (1000.0 * view_h / view_w).round().max(1.0);

    let mut out = format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\"",
            " viewBox=\"{} {} {} {}\">\n"
        ),
        width,
        height,
        fmt3(view_x),
        fmt3(view_y),
        fmt3(view_w),
        fmt3(view_h)
    );
    out.push_str(&format!("  <title>{}</title>\n", xml_escape(graph.name())));
    out.push_str(&format!(
        "  <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>\n",
        fmt3(view_x),
        fmt3(view_y),
        fmt3(view_w),
        fmt3(view_h)
    ));

    out.push_str("  <g stroke=\"#999999\" stroke-opacity=\"0.6\">\n");
    for edge in &graph.edges {
        let (x1, y1) = graph.nodes[edge.source].position.expect("checked above");
        let (x2, y2) = graph.nodes[edge.target].position.expect("checked above");
        let stroke = match style.edge_thickness {
            EdgeThickness::Jaccard => {
                let jaccard = edge
                    .jaccard
                    .or_else(|| edge.distance.map(|d| 1.0 / d))
                    .unwrap_or(0.0);
                0.5 + 2.0 * jaccard
            }
            EdgeThickness::Fixed => 1.0,
        };
        out.push_str(&format!(
            "    <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke-width=\"{}\"/>\n",
            fmt3(x1),
            fmt3(y1),
            fmt3(x2),
            fmt3(y2),
            fmt3(stroke)
        ));
    }
    out.push_str("  </g>\n  <g stroke=\"#333333\" stroke-width=\"0.3\">\n");
    for node in &graph.nodes {
        let (x, y) = node.position.expect("checked above");
        let fill = match style.color_by {
            ColorBy::ModularityClass => {
                PALETTE[node.modularity_class.unwrap_or(0) % PALETTE.len()]
            }
            ColorBy::Fixed => FIXED_COLOR,
            ColorBy::ProlificFlag => {
                if node.occurrence >= style.prolific_threshold {
                    PROLIFIC_COLOR
                } else {
                    ORDINARY_COLOR
                }
            }
        };
        out.push_str(&format!(
            "    <circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{fill}\"/>\n",
            fmt3(x),
            fmt3(y),
            fmt3(node_display_size(node.occurrence))
        ));
    }
    out.push_str("  </g>\n  <g font-family=\"sans-serif\" text-anchor=\"middle\" fill=\"#111111\">\n");
    for node in &graph.nodes {
        if node.occurrence < style.label_min_occurrence {
            continue;
        }
        let (x, y) = node.position.expect("checked above");
        let r = node_display_size(node.occurrence);
        out.push_str(&format!(
            "    <text x=\"{}\" y=\"{}\" font-size=\"{}\">{}</text>\n",
            fmt3(x),
            fmt3(y - r - 2.0),
            fmt3(4.0 + r / 2.0),
            xml_escape(node.code.as_str())
        ));
    }
    out.push_str("  </g>\n</svg>\n");
    Ok(out)
}

/// Headline numbers and strongest edges of a co-occurrence network.
#[derive(Clone, Debug)]
pub struct NetworkSummary {
    pub name: String,
    pub level: IpcLevel,
    pub node_count: usize,
    pub edge_count: usize,
    pub component_count: usize,
    pub community_count: usize,
    pub modularity: f64,
    pub top_by_count: Vec<SummaryEdge>,
    pub top_by_jaccard: Vec<SummaryEdge>,
}

#[derive(Clone, Debug)]
pub struct SummaryEdge {
    pub source: String,
    pub target: String,
    pub count: u32,
    pub jaccard_text: String,
}

/// Collect the summary for a network whose metrics table has been computed.
/// `top_k` bounds both edge rankings.
pub fn network_summary(
    name: impl Into<String>,
    graph: &CooccurrenceGraph,
    metrics: &MetricsTable,
    top_k: usize,
) -> NetworkSummary {
    let mut ranked: Vec<SummaryEdge> = Vec::with_capacity(graph.edge_count());
    let mut by_jaccard: Vec<(f64, usize)> = Vec::with_capacity(graph.edge_count());
    let mut by_count: Vec<(u32, usize)> = Vec::with_capacity(graph.edge_count());
    for (idx, (pair, edge)) in graph.edges().iter().enumerate() {
        let n_i = graph.occurrence(pair.source()).expect("edge endpoint is a node");
        let n_j = graph.occurrence(pair.target()).expect("edge endpoint is a node");
        let thousandths = jaccard_thousandths(n_i, n_j, edge.count)
            .expect("counts were validated when the graph was built");
        ranked.push(SummaryEdge {
            source: pair.source().as_str().to_string(),
            target: pair.target().as_str().to_string(),
            count: edge.count,
            jaccard_text: format_jaccard(thousandths),
        });
        by_count.push((edge.count, idx));
        by_jaccard.push((edge.jaccard, idx));
    }
    // Stable sorts keep canonical pair order inside each tie class.
    by_count.sort_by(|a, b| b.0.cmp(&a.0));
    by_jaccard.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("jaccard weights are finite"));
    NetworkSummary {
        name: name.into(),
        level: graph.level(),
        node_count: graph.node_count(),
        edge_count: graph.edge_count(),
        component_count: metrics.component_count(),
        community_count: metrics.community_count(),
        modularity: metrics.modularity(),
        top_by_count: by_count
            .iter()
            .take(top_k)
            .map(|&(_, i)| ranked[i].clone())
            .collect(),
        top_by_jaccard: by_jaccard
            .iter()
            .take(top_k)
            .map(|&(_, i)| ranked[i].clone())
            .collect(),
    }
}

/// Pinned plain-text rendering of a network summary.
pub fn render_network_summary(summary: &NetworkSummary) -> String {
    let mut out = format!(
        concat!(
            "network: {}\n",
            "level: {}\n",
            "nodes: {}\n",
            "edges: {}\n",
            "components: {}\n",
            "communities: {}\n",
            "modularity: {}\n",
        ),
        summary.name,
        summary.level,
        summary.node_count,
        summary.edge_count,
        summary.component_count,
        summary.community_count,
        fmt6(summary.modularity),
    );
    out.push_str("top edges by co-occurrence:\n");
    for (i, edge) in summary.top_by_count.iter().enumerate() {
        out.push_str(&format!(
            "  {}. {} -- {}  n_ij={}  jaccard={}\n",
            i + 1,
            edge.source,
            edge.target,
            edge.count,
            edge.jaccard_text
        ));
    }
    out.push_str("top edges by jaccard:\n");
    for (i, edge) in summary.top_by_jaccard.iter().enumerate() {
        out.push_str(&format!(
            "  {}. {} -- {}  jaccard={}  n_ij={}\n",
            i + 1,
            edge.source,
            edge.target,
            edge.jaccard_text,
            edge.count
        ));
    }
    out
}

/// Headline numbers of a spanning forest.
#[derive(Clone, Debug)]
pub struct ForestSummary {
    pub name: String,
    pub level: IpcLevel,
    pub node_count: usize,
    pub edge_count: usize,
    pub component_count: usize,
    pub total_distance: f64,
    pub top_by_distance: Vec<(String, String, f64)>,
}

/// Collect the summary for a spanning forest held as a distance graph.
pub fn forest_summary(
    name: impl Into<String>,
    forest: &DistanceGraph,
    top_k: usize,
) -> ForestSummary {
    let components = connected_components(forest);
    let mut edges: Vec<(f64, String, String)> = forest
        .edges()
        .iter()
        .map(|(pair, &d)| {
            (
                d,
                pair.source().as_str().to_string(),
                pair.target().as_str().to_string(),
            )
        })
        .collect();
    let total_distance = edges.iter().map(|e| e.0).sum();
    edges.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("distances are finite"));
    ForestSummary {
        name: name.into(),
        level: forest.level(),
        node_count: forest.node_count(),
        edge_count: forest.edge_count(),
        component_count: components.community_count(),
        total_distance,
        top_by_distance: edges
            .into_iter()
            .take(top_k)
            .map(|(d, a, b)| (a, b, d))
            .collect(),
    }
}

/// Pinned plain-text rendering of a forest summary.
pub fn render_forest_summary(summary: &ForestSummary) -> String {
    let mut out = format!(
        concat!(
            "network: {}\n",
            "level: {}\n",
            "nodes: {}\n",
            "edges: {}\n",
            "components: {}\n",
            "total distance: {}\n",
        ),
        summary.name,
        summary.level,
        summary.node_count,
        summary.edge_count,
        summary.component_count,
        fmt6(summary.total_distance),
    );
    out.push_str("longest edges by distance:\n");
    for (i, (source, target, distance)) in summary.top_by_distance.iter().enumerate() {
        out.push_str(&format!(
            "  {}. {} -- {}  distance={}\n",
            i + 1,
            source,
            target,
            fmt6(*distance)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use ipcmap_core::layout::{force_atlas2, LayoutParams};
    use ipcmap_core::metrics::metrics_table;

    fn code(text: &str) -> IpcCode {
        IpcCode::parse(text).unwrap()
    }

    fn sample_graph() -> CooccurrenceGraph {
        let nodes: BTreeMap<IpcCode, u32> = [
            (code("A63F"), 6),
            (code("G06F"), 3),
            (code("G07F"), 2),
        ]
        .into_iter()
        .collect();
        CooccurrenceGraph::from_counts(
            IpcLevel::Subclass,
            nodes,
            [
                (code("A63F"), code("G06F"), 3),
                (code("A63F"), code("G07F"), 2),
            ],
        )
        .unwrap()
    }

    #[test]
    fn node_and_edge_csv_are_pinned() {
        let staged = ExportGraph::from_network("net", &sample_graph());
        assert_eq!(nodes_csv(&staged), "code,occurrence\nA63F,6\nG06F,3\nG07F,2\n");
        assert_eq!(
            edges_csv(&staged),
            "source,target,n_ij,jaccard\nA63F,G06F,3,0.500\nA63F,G07F,2,0.333\n"
        );
    }

    #[test]
    fn forest_edges_render_distances() {
        let graph = sample_graph();
        let distances = graph.to_distance_graph();
        let staged = ExportGraph::from_distances("mst", &distances);
        assert_eq!(
            edges_csv(&staged),
            "source,target,distance\nA63F,G06F,2.000000\nA63F,G07F,3.000000\n"
        );
    }

    #[test]
    fn metrics_csv_has_the_pinned_header_and_empty_forest_cells() {
        let graph = sample_graph();
        let table = metrics_table(&graph, None, 1.0, 7, false);
        let text = metrics_csv(&table);
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "code,patents,modularity_class,degree,betweenness,mst_degree,mst_betweenness"
        );
        let first = lines.next().unwrap();
        assert!(first.starts_with("A63F,6,0,2,"));
        assert!(first.ends_with(",,"), "forest cells should be empty: {first}");
    }

    #[test]
    fn graphml_is_well_formed_and_deterministic() {
        let graph = sample_graph();
        let table = metrics_table(&graph, None, 1.0, 7, false);
        let staged = ExportGraph::from_network("net", &graph)
            .with_metrics(&table, MetricSource::Network)
            .unwrap();
        let a = export_graph(&staged, ExportFormat::GraphMl).unwrap();
        let b = export_graph(&staged, ExportFormat::GraphMl).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("<data key=\"code\">A63F</data>"));
        assert!(a.contains("<edge id=\"e0\" source=\"n0\" target=\"n1\">"));
        assert!(a.contains("<data key=\"jaccard\">0.500</data>"));

        let mut reader = quick_xml::Reader::from_str(&a);
        let mut depth = 0i32;
        loop {
            match reader.read_event().unwrap() {
                quick_xml::events::Event::Start(_) => depth += 1,
                quick_xml::events::Event::End(_) => depth -= 1,
                quick_xml::events::Event::Eof => break,
                _ => {}
            }
        }
        assert_eq!(depth, 0);
    }

    #[test]
    fn gexf_carries_positions_and_is_well_formed() {
        let graph = sample_graph();
        let positions = force_atlas2(&graph, &LayoutParams {
            iterations: 5,
            ..LayoutParams::default()
        });
        let staged = ExportGraph::from_network("net", &graph)
            .with_positions(&positions)
            .unwrap();
        let text = export_graph(&staged, ExportFormat::Gexf).unwrap();
        assert!(text.contains("<viz:position x="));
        assert!(text.contains("weight=\"0.500\""));
        let mut reader = quick_xml::Reader::from_str(&text);
        loop {
            match reader.read_event() {
                Ok(quick_xml::events::Event::Eof) => break,
                Ok(_) => {}
                Err(e) => panic!("gexf not well formed: {e}"),
            }
        }
    }

    #[test]
    fn dot_quotes_codes() {
        let staged = ExportGraph::from_network("net", &sample_graph());
        let text = export_graph(&staged, ExportFormat::Dot).unwrap();
        assert!(text.starts_with("graph \"net\" {\n"));
        assert!(text.contains("\"A63F\" -- \"G06F\" [n_ij=3, jaccard=\"0.500\"];"));
    }

    #[test]
    fn svg_needs_positions_and_orders_edges_beneath_nodes() {
        let graph = sample_graph();
        let staged = ExportGraph::from_network("net", &graph);
        let err = render_svg(&staged, &RenderStyle::default()).unwrap_err();
        assert!(matches!(err, ExportError::MissingPositions { .. }));

        let positions = force_atlas2(&graph, &LayoutParams {
            iterations: 5,
            ..LayoutParams::default()
        });
        let staged = staged.with_positions(&positions).unwrap();
        let svg = render_svg(&staged, &RenderStyle::default()).unwrap();
        let first_line = svg.find("<line").unwrap();
        let first_circle = svg.find("<circle").unwrap();
        assert!(first_line < first_circle);
        assert_eq!(svg.matches("<circle").count(), 3);
        assert_eq!(svg.matches("<line").count(), 2);
        assert_eq!(svg.matches("<text").count(), 3);
    }

    #[test]
    fn svg_label_threshold_and_prolific_colors_apply() {
        let graph = sample_graph();
        let positions = force_atlas2(&graph, &LayoutParams {
            iterations: 0,
            ..LayoutParams::default()
        });
        let staged = ExportGraph::from_network("net", &graph)
            .with_positions(&positions)
            .unwrap();
        let style = RenderStyle {
            color_by: ColorBy::ProlificFlag,
            label_min_occurrence: 4,
            prolific_threshold: 5,
            edge_thickness: EdgeThickness::Fixed,
        };
        let svg = render_svg(&staged, &style).unwrap();
        assert_eq!(svg.matches("<text").count(), 1, "only A63F is labeled");
        assert_eq!(svg.matches(PROLIFIC_COLOR).count(), 1);
        assert_eq!(svg.matches(ORDINARY_COLOR).count(), 2);
    }

    #[test]
    fn summaries_render_with_pinned_templates() {
        let graph = sample_graph();
        let table = metrics_table(&graph, None, 1.0, 7, false);
        let summary = network_summary("net", &graph, &table, 10);
        let text = render_network_summary(&summary);
        assert!(text.starts_with("network: net\nlevel: subclass\nnodes: 3\nedges: 2\n"));
        assert!(text.contains("top edges by co-occurrence:\n  1. A63F -- G06F  n_ij=3  jaccard=0.500\n"));
        assert!(text.contains("top edges by jaccard:\n  1. A63F -- G06F  jaccard=0.500  n_ij=3\n"));

        let forest = graph.to_distance_graph();
        let fs = forest_summary("mst", &forest, 10);
        let text = render_forest_summary(&fs);
        assert!(text.contains("total distance: 5.000000\n"));
        assert!(text.contains("  1. A63F -- G07F  distance=3.000000\n"));
    }

    #[test]
    fn csv_fields_with_commas_are_quoted() {
        let rows = vec![
            ("Activision Publishing, Inc.".to_string(), 10usize),
            ("plain".to_string(), 2),
        ];
        let text = counts_csv("label", "patents", &rows);
        assert_eq!(
            text,
            "label,patents\n\"Activision Publishing, Inc.\",10\nplain,2\n"
        );
    }

    #[test]
    fn format_names_parse_and_reject() {
        assert_eq!(
            ExportFormat::from_name("csv-edgelist").unwrap(),
            ExportFormat::CsvEdgeList
        );
        assert!(matches!(
            ExportFormat::from_name("xlsx"),
            Err(ExportError::UnsupportedFormat { .. })
        ));
    }

    #[test]
    fn jaccard_rendering_rounds_half_up() {
        assert_eq!(format_jaccard(210), "0.210");
        assert_eq!(format_jaccard(1000), "1.000");
        assert_eq!(format_jaccard(5), "0.005");
    }
}
