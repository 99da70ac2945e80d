//! Machine-readable run statistics emitted by the CLI.

use serde::{Deserialize, Serialize};

/// Extraction strategy selected on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Algo {
    /// Forest walk, no optimization.
    Unopt,
    /// Unoptimized proof shrunk by greedy axiom deletion.
    Reduce,
    /// Fuel-bounded shortest-path extraction over estimated edge costs.
    Greedy,
    /// Exact minimum tree size by fixed-point iteration.
    Treeopt,
    /// Exhaustive minimum DAG size (oracle; no certificate).
    BruteDag,
    /// Exhaustive minimum tree size (oracle; no certificate).
    BruteTree,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Unopt => "unopt",
            Algo::Reduce => "reduce",
            Algo::Greedy => "greedy",
            Algo::Treeopt => "treeopt",
            Algo::BruteDag => "brute-dag",
            Algo::BruteTree => "brute-tree",
        }
    }
}

/// One prove run, as a single JSON object on standard output.
///
/// Sizes are recomputed from the emitted certificate, not taken from the
/// extractor's bookkeeping; the oracle algorithms produce no certificate
/// and fill only the size they compute (plus `witness` for brute-dag).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub algo: Algo,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tree_size: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dag_size: Option<u64>,
    /// Extraction only; parsing and closure construction excluded.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub passes_used: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fuel_spent: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fell_back: Option<bool>,
    /// Axiom ids of a minimum witness (brute-dag only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<u32>>,
    /// Axiom ids deleted from the baseline support (reduce only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub removed_axioms: Option<Vec<u32>>,
    pub vertices: usize,
    pub axiom_edges: usize,
    pub congruence_edges: usize,
}

impl RunReport {
    pub fn new(algo: Algo, vertices: usize, axiom_edges: usize, congruence_edges: usize) -> RunReport {
        RunReport {
            algo,
            tree_size: None,
            dag_size: None,
            wall_ms: None,
            passes_used: None,
            fuel_spent: None,
            fell_back: None,
            witness: None,
            removed_axioms: None,
            vertices,
            axiom_edges,
            congruence_edges,
        }
    }
}
