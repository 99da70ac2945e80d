//! Desk-scale benchmark harness.
//!
//! Generates seeded random instances, runs every extractor on each (plus
//! the exhaustive oracles when an instance is small enough for them), and
//! prints one JSON line per trial followed by an aggregate table per size.
//! The output is a pure function of the flags: trial seeds come from a
//! splitmix64 stream, rows are computed in parallel but emitted in trial
//! order, and wall-clock times never appear in it.

use rayon::prelude::*;
use serde::Serialize;

use crate::cert::{cert_dag_size, cert_tree_size};
use crate::extract::{basic, greedy, treeopt};
use crate::instance::{gen_random_instance, InstanceError};
use crate::optdag::{self, OptdagError, OracleLimits};

/// Term depth for generated instances.
pub const BENCH_DEPTH: u32 = 3;
/// Regeneration attempts when a seed yields no provable goal.
const GEN_ATTEMPTS: u32 = 100;

/// Oracle caps used by bench rows; tighter on axiom edges than the CLI
/// default so subset enumeration stays cheap per trial.
const BENCH_ORACLE_LIMITS: OracleLimits =
    OracleLimits { max_axiom_edges: 10, max_vertices: 14, max_congruence_edges: 4 };

#[derive(Debug, Clone, Copy)]
pub struct BenchConfig {
    /// Inclusive axiom-count range.
    pub n_lo: usize,
    pub n_hi: usize,
    /// Trials per axiom count.
    pub trials: usize,
    pub seed: u64,
    pub fuel: u64,
}

#[derive(Debug, Clone, Serialize)]
struct BenchRow {
    n: usize,
    trial: usize,
    seed: u64,
    vertices: usize,
    axiom_edges: usize,
    congruence_edges: usize,
    unopt_tree: u64,
    unopt_dag: u64,
    reduce_dag: u64,
    greedy_tree: u64,
    greedy_dag: u64,
    greedy_fuel_spent: u64,
    treeopt_tree: u64,
    treeopt_dag: u64,
    treeopt_passes: usize,
    brute_tree: Option<u64>,
    brute_dag: Option<u64>,
}

pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn run_trial(n: usize, trial: usize, seed: u64, fuel: u64) -> BenchRow {
    let mut attempt_seed = seed;
    let mut inst = None;
    for _ in 0..GEN_ATTEMPTS {
        match gen_random_instance(n, BENCH_DEPTH, attempt_seed) {
            Ok(found) => {
                inst = Some(found);
                break;
            }
            Err(InstanceError::GenerationFailed(_)) => {
                attempt_seed = splitmix64(&mut attempt_seed);
            }
            Err(other) => panic!("generator failed: {other}"),
        }
    }
    let inst = inst.unwrap_or_else(|| {
        panic!("no provable instance for n={n} after {GEN_ATTEMPTS} seeds")
    });
    let (eng, (gl, gr)) = inst.build_engine().expect("generated arities are consistent");
    let snap = eng.snapshot().expect("rebuilt");
    let s = snap.vertex_of(gl).expect("goal term added");
    let t = snap.vertex_of(gr).expect("goal term added");

    let unopt = basic::unoptimized_proof(&snap, s, t).expect("goal provable by construction");
    let reduced = basic::reduce_proof(snap.bank(), snap.axioms(), (gl, gr), &unopt)
        .expect("reduction of a valid proof");
    let greedy = greedy::greedy_proof(&snap, s, t, fuel).expect("goal provable");
    let tree = treeopt::treeopt_proof(&snap, s, t).expect("goal provable");

    let oracle = |r: Result<u64, OptdagError>| match r {
        Ok(v) => Some(v),
        Err(OptdagError::TooLarge) => None,
        Err(e) => panic!("oracle failed: {e}"),
    };
    let brute_tree = oracle(optdag::brute_min_tree(&snap, s, t, &BENCH_ORACLE_LIMITS));
    let brute_dag = oracle(
        optdag::brute_min_dag(&snap, s, t, &BENCH_ORACLE_LIMITS).map(|d| d.size),
    );

    BenchRow {
        n,
        trial,
        seed,
        vertices: snap.vertex_count(),
        axiom_edges: snap.edge_count() - snap.congruence_edges().len(),
        congruence_edges: snap.congruence_edges().len(),
        unopt_tree: cert_tree_size(&unopt),
        unopt_dag: cert_dag_size(&unopt),
        reduce_dag: cert_dag_size(&reduced.cert),
        greedy_tree: cert_tree_size(&greedy.cert),
        greedy_dag: cert_dag_size(&greedy.cert),
        greedy_fuel_spent: greedy.fuel_spent,
        treeopt_tree: cert_tree_size(&tree.cert),
        treeopt_dag: cert_dag_size(&tree.cert),
        treeopt_passes: tree.passes_used,
        brute_tree,
        brute_dag,
    }
}

/// Run the whole benchmark and return its textual output.
pub fn run_bench(cfg: &BenchConfig) -> String {
    let mut stream = cfg.seed;
    let mut descriptors = Vec::new();
    for n in cfg.n_lo..=cfg.n_hi {
        for trial in 0..cfg.trials {
            descriptors.push((n, trial, splitmix64(&mut stream)));
        }
    }

    let threads = std::env::var("CCPROOF_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool");
    let rows: Vec<BenchRow> = pool.install(|| {
        descriptors
            .par_iter()
            .map(|&(n, trial, seed)| run_trial(n, trial, seed, cfg.fuel))
            .collect()
    });

    let mut out = String::new();
    for row in &rows {
        out.push_str(&serde_json::to_string(row).expect("row serializes"));
        out.push('\n');
    }
    out.push('\n');
    out.push_str(&format!(
        "{:<6} {:<7} {:<15} {:<16} {:<15}\n",
        "n", "trials", "unopt/treeopt", "greedy/treeopt", "greedy==treeopt"
    ));
    for n in cfg.n_lo..=cfg.n_hi {
        let group: Vec<&BenchRow> = rows.iter().filter(|r| r.n == n).collect();
        if group.is_empty() {
            continue;
        }
        let count = group.len() as f64;
        let mean = |f: &dyn Fn(&BenchRow) -> f64| {
            group.iter().map(|r| f(r)).sum::<f64>() / count
        };
        let unopt_ratio = mean(&|r| r.unopt_tree as f64 / r.treeopt_tree as f64);
        let greedy_ratio = mean(&|r| r.greedy_tree as f64 / r.treeopt_tree as f64);
        let matched = mean(&|r| if r.greedy_tree == r.treeopt_tree { 1.0 } else { 0.0 });
        out.push_str(&format!(
            "{:<6} {:<7} {:<15.4} {:<16.4} {:<15.4}\n",
            n,
            group.len(),
            unopt_ratio,
            greedy_ratio,
            matched
        ));
    }
    out
}
