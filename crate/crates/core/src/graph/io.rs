use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize};

use super::{GraphBuilder, GraphError, WeightedGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    /// `<u> <v> [weight]` per line, `#` comments.
    EdgeList,
    GraphJson,
}

impl GraphFormat {
    /// Guesses the format from the first non-whitespace byte.
    pub fn detect(input: &[u8]) -> GraphFormat {
        match input.iter().find(|b| !b.is_ascii_whitespace()) {
            Some(b'{') => GraphFormat::GraphJson,
            _ => GraphFormat::EdgeList,
        }
    }
}

impl FromStr for GraphFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "edge-list" | "edgelist" | "txt" => Ok(GraphFormat::EdgeList),
            "graph-json" | "json" => Ok(GraphFormat::GraphJson),
            other => Err(format!(
                "unknown graph format `{other}` (expected edge-list or graph-json)"
            )),
        }
    }
}

impl fmt::Display for GraphFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GraphFormat::EdgeList => "edge-list",
            GraphFormat::GraphJson => "graph-json",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphJson {
    pub nodes: Vec<GraphJsonNode>,
    pub edges: Vec<GraphJsonEdge>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphJsonNode {
    #[serde(deserialize_with = "label")]
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphJsonEdge {
    #[serde(deserialize_with = "label")]
    pub source: String,
    #[serde(deserialize_with = "label")]
    pub target: String,
    #[serde(default)]
    pub weight: Option<f64>,
}

/// Node ids may be written as strings or integers.
fn label<'de, D: Deserializer<'de>>(d: D) -> Result<String, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Label {
        Str(String),
        Int(i64),
    }
    Ok(match Label::deserialize(d)? {
        Label::Str(s) => s,
        Label::Int(i) => i.to_string(),
    })
}

pub fn parse_graph(input: &[u8], format: GraphFormat) -> Result<WeightedGraph, GraphError> {
    match format {
        GraphFormat::EdgeList => parse_edge_list(input),
        GraphFormat::GraphJson => parse_graph_json(input),
    }
}

fn parse_edge_list(input: &[u8]) -> Result<WeightedGraph, GraphError> {
    let text = std::str::from_utf8(input).map_err(|e| GraphError::Parse {
        line: 1 + input[..e.valid_up_to()]
            .iter()
            .filter(|&&b| b == b'\n')
            .count(),
        message: "input is not valid UTF-8".into(),
    })?;
    let mut builder = GraphBuilder::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let weight = match fields.len() {
            2 => 1.0,
            3 => fields[2].parse::<f64>().map_err(|_| GraphError::Parse {
                line,
                message: format!("weight `{}` is not a number", fields[2]),
            })?,
            k => {
                return Err(GraphError::Parse {
                    line,
                    message: format!("expected `<u> <v> [weight]`, found {k} fields"),
                })
            }
        };
        let u = builder.intern(fields[0]);
        let v = builder.intern(fields[1]);
        builder.add_indexed_edge(u, v, weight, Some(line))?;
    }
    Ok(builder.build())
}

fn parse_graph_json(input: &[u8]) -> Result<WeightedGraph, GraphError> {
    let doc: GraphJson = serde_json::from_slice(input).map_err(|e| GraphError::Parse {
        line: e.line(),
        message: e.to_string(),
    })?;
    WeightedGraph::from_graph_json(&doc)
}

impl WeightedGraph {
    /// Builds a graph from its JSON document; edges must reference declared nodes.
    pub fn from_graph_json(doc: &GraphJson) -> Result<WeightedGraph, GraphError> {
        let mut builder = GraphBuilder::default();
        for node in &doc.nodes {
            builder.add_node(&node.id)?;
        }
        for edge in &doc.edges {
            let lookup = |id: &str| {
                builder
                    .index_of(id)
                    .ok_or_else(|| GraphError::UnknownNode(id.to_owned()))
            };
            let u = lookup(&edge.source)?;
            let v = lookup(&edge.target)?;
            builder.add_indexed_edge(u, v, edge.weight.unwrap_or(1.0), None)?;
        }
        Ok(builder.build())
    }

    /// The graph-json document, optionally with per-node positions.
    pub fn to_graph_json(&self, positions: Option<&[[f64; 2]]>) -> GraphJson {
        let nodes = self
            .labels()
            .iter()
            .enumerate()
            .map(|(i, id)| GraphJsonNode {
                id: id.clone(),
                x: positions.map(|p| p[i][0]),
                y: positions.map(|p| p[i][1]),
            })
            .collect();
        let edges = self
            .edges()
            .iter()
            .map(|e| GraphJsonEdge {
                source: self.label(e.u).to_owned(),
                target: self.label(e.v).to_owned(),
                weight: Some(e.weight),
            })
            .collect();
        GraphJson { nodes, edges }
    }

    /// Edge-list text. Isolated nodes cannot be represented in this format.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for e in self.edges() {
            out.push_str(&format!(
                "{} {} {}\n",
                self.label(e.u),
                self.label(e.v),
                e.weight
            ));
        }
        out
    }
}
