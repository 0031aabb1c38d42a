// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! Graph interchange: a small JSON document and DIMACS `.col`.
//!
//! JSON: `{"vertices": N, "edges": [[u, v], ...], "labels": [...]}` with
//! 0-based vertex ids; `labels` is optional.
//!
//! DIMACS: `c` comment lines, one `p edge N M` header, then `e u v` lines
//! with 1-based ids.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::{FiniteGraph, Label};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphJson {
    pub vertices: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<Label>>,
}

impl GraphJson {
    pub fn from_graph(g: &FiniteGraph) -> Self {
        GraphJson {
            vertices: g.vertex_count(),
            edges: g.edges().map(|(u, v)| [u, v]).collect(),
            labels: g.labels().map(<[Label]>::to_vec),
        }
    }

    pub fn into_graph(self) -> Result<FiniteGraph> {
        let g = FiniteGraph::from_edges(self.vertices, self.edges.iter().map(|e| (e[0], e[1])))?;
        match self.labels {
            Some(l) => g.with_labels(l),
            None => Ok(g),
        }
    }
}

pub fn to_json(g: &FiniteGraph) -> String {
    serde_json::to_string_pretty(&GraphJson::from_graph(g)).expect("graph json")
}

pub fn from_json(text: &str) -> Result<FiniteGraph> {
    let doc: GraphJson =
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("graph json: {e}")))?;
    doc.into_graph()
}

pub fn to_dimacs(g: &FiniteGraph) -> String {
    let mut out = String::new();
    writeln!(out, "p edge {} {}", g.vertex_count(), g.edge_count()).unwrap();
    for (u, v) in g.edges() {
        writeln!(out, "e {} {}", u + 1, v + 1).unwrap();
    }
    out
}

pub fn from_dimacs(text: &str) -> Result<FiniteGraph> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let mut tok = line.split_whitespace();
        let bad = |what: &str| Error::InvalidInput(format!("dimacs line {}: {what}", lineno + 1));
        match tok.next() {
            None | Some("c") => {}
            Some("p") => {
                if header.is_some() {
                    return Err(bad("duplicate problem line"));
                }
                if !matches!(tok.next(), Some("edge" | "col")) {
                    return Err(bad("expected `p edge N M`"));
                }
                let n = tok
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| bad("vertex count"))?;
                let m = tok
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| bad("edge count"))?;
                header = Some((n, m));
            }
            Some("e") => {
                if header.is_none() {
                    return Err(bad("edge before problem line"));
                }
                let mut id = || -> Result<usize> {
                    let v: usize = tok
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| bad("vertex id"))?;
                    v.checked_sub(1)
                        .ok_or_else(|| bad("vertex ids are 1-based"))
                };
                let u = id()?;
                let v = id()?;
                edges.push((u, v));
            }
            Some(other) => return Err(bad(&format!("unknown line type `{other}`"))),
        }
    }
    let Some((n, _)) = header else {
        return invalid("dimacs: missing `p edge N M` line");
    };
    FiniteGraph::from_edges(n, edges)
}

/// Parses either format: a leading `{` selects JSON.
pub fn parse_graph(text: &str) -> Result<FiniteGraph> {
    if text.trim_start().starts_with('{') {
        from_json(text)
    } else {
        from_dimacs(text)
    }
}
