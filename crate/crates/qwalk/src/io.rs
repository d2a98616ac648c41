//! Graph files.
//!
//! ```json
//! {"n": 3, "potentials": [4, 0, 4], "edges": [[0, 1], [1, 2]], "involution": [2, 1, 0], "well": 0}
//! ```
//!
//! `involution` and `well` are optional. Edges may be listed in either
//! orientation but only once.

use std::fs;
use std::path::Path;

use qwalk_core::graph::{Graph, Involution};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub n: usize,
    pub potentials: Vec<f64>,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub involution: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub well: Option<usize>,
}

/// A graph file that passed structural validation. The involution has not
/// been checked against the graph yet.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    pub involution: Option<Involution>,
    pub well: Option<usize>,
}

impl LoadedGraph {
    pub fn require_involution(&self) -> Result<&Involution, CliError> {
        self.involution
            .as_ref()
            .ok_or_else(|| CliError::Invalid("graph file has no \"involution\"".into()))
    }

    pub fn require_well(&self) -> Result<usize, CliError> {
        self.well.ok_or_else(|| CliError::Invalid("graph file has no \"well\"".into()))
    }
}

impl GraphFile {
    pub fn from_graph(g: &Graph, involution: Option<&Involution>, well: Option<usize>) -> Self {
        GraphFile {
            n: g.n(),
            potentials: g.potentials().to_vec(),
            edges: g.edges().iter().map(|&(a, b)| [a, b]).collect(),
            involution: involution.map(|i| i.map().to_vec()),
            well,
        }
    }

    pub fn into_loaded(self) -> Result<LoadedGraph, CliError> {
        if self.potentials.len() != self.n {
            return Err(CliError::Invalid(format!(
                "\"potentials\" has {} entries but n = {}",
                self.potentials.len(),
                self.n
            )));
        }
        if let Some(map) = &self.involution {
            if map.len() != self.n {
                return Err(CliError::Invalid(format!("\"involution\" has {} entries but n = {}", map.len(), self.n)));
            }
            if let Some(&bad) = map.iter().find(|&&x| x >= self.n) {
                return Err(CliError::Invalid(format!("\"involution\" maps to vertex {bad} out of range")));
            }
        }
        if let Some(w) = self.well {
            if w >= self.n {
                return Err(CliError::Invalid(format!("\"well\" {w} out of range")));
            }
        }
        let graph = Graph::new(self.n, self.edges.iter().map(|&[a, b]| (a, b)), self.potentials)?;
        Ok(LoadedGraph { graph, involution: self.involution.map(Involution::new), well: self.well })
    }
}

pub fn parse_graph(text: &str) -> Result<LoadedGraph, CliError> {
    let file: GraphFile = serde_json::from_str(text)?;
    file.into_loaded()
}

pub fn load_graph(path: &Path) -> Result<LoadedGraph, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), source: e })?;
    parse_graph(&text)
}

pub fn write_graph(path: &Path, file: &GraphFile) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(file)?;
    fs::write(path, text + "\n").map_err(|e| CliError::Io { path: path.display().to_string(), source: e })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let g = Graph::new(3, [(0, 1), (1, 2)], vec![4.0, 0.0, 4.0]).unwrap();
        let file = GraphFile::from_graph(&g, Some(&Involution::reversal(3)), Some(0));
        let text = serde_json::to_string(&file).unwrap();
        let back = parse_graph(&text).unwrap();
        assert_eq!(back.graph, g);
        assert_eq!(back.involution, Some(Involution::reversal(3)));
        assert_eq!(back.well, Some(0));
    }

    #[test]
    fn reversed_edges_are_normalized() {
        let g = parse_graph(r#"{"n":2,"potentials":[1,1],"edges":[[1,0]]}"#).unwrap();
        assert_eq!(g.graph.edges(), &[(0, 1)]);
        assert!(g.involution.is_none());
    }

    #[test]
    fn structural_problems_are_validation_errors() {
        for text in [
            r#"{"n":2,"potentials":[1],"edges":[[0,1]]}"#,
            r#"{"n":3,"potentials":[0,0,0],"edges":[[0,1]]}"#,
            r#"{"n":2,"potentials":[0,0],"edges":[[0,1]],"involution":[1]}"#,
            r#"{"n":2,"potentials":[0,0],"edges":[[0,0]]}"#,
            r#"{"n":2,"potentials":[0,0],"edges":[[0,1]],"well":5}"#,
        ] {
            assert!(matches!(parse_graph(text), Err(CliError::Invalid(_) | CliError::Core(_))), "{text}");
        }
    }

    #[test]
    fn malformed_json_is_a_parse_error() {
        assert!(matches!(parse_graph("{\"n\": 2,"), Err(CliError::Parse(_))));
        assert!(matches!(parse_graph(r#"{"n":1,"potentials":[0],"edges":[],"extra":1}"#), Err(CliError::Parse(_))));
    }
}
