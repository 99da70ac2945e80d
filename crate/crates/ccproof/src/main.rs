//! Command-line front end.
//!
//! Exit codes: 0 success, 1 unreadable or malformed input, 2 unprovable
//! goal or failed certificate check, 3 instance too large for an oracle or
//! for ILP emission, 64 usage.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Parser, Subcommand};

use ccproof::bench::{run_bench, BenchConfig};
use ccproof::cert::{cert_dag_size, cert_tree_size, check_cert, parse_cert, render_cert, ProofCert};
use ccproof::engine::{EngineError, Snapshot};
use ccproof::extract::{basic, greedy, treeopt};
use ccproof::instance::Instance;
use ccproof::optdag::{self, OptdagError, OracleLimits};
use ccproof::report::{Algo, RunReport};
use ccproof::term::{TermBank, TermId};

#[derive(Parser)]
#[command(name = "ccproof", version, about = "Congruence closure with small proof certificates")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Prove the instance goal; prints one JSON report line.
    Prove {
        /// Instance file: (assert (= L R)) lines, then one (prove (= S T)).
        file: PathBuf,
        /// Extraction strategy.
        #[arg(long, value_enum)]
        algo: Algo,
        /// Congruence expansions the greedy extractor may pay for.
        #[arg(long, default_value_t = greedy::DEFAULT_FUEL)]
        fuel: u64,
        /// Write the certificate here (not available for oracle algorithms).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a certificate against an instance.
    Check {
        file: PathBuf,
        cert: PathBuf,
    },
    /// Emit the minimum-DAG integer program in CPLEX LP format.
    Ilp {
        file: PathBuf,
        /// Where to write the model.
        #[arg(long)]
        out: PathBuf,
    },
    /// Seeded random-instance benchmark; JSON rows, then a summary table.
    Bench {
        /// Inclusive axiom-count range, e.g. 8..12.
        #[arg(long)]
        n: NRange,
        /// Trials per axiom count.
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = greedy::DEFAULT_FUEL)]
        fuel: u64,
    },
}

#[derive(Debug, Clone, Copy)]
struct NRange {
    lo: usize,
    hi: usize,
}

impl FromStr for NRange {
    type Err = String;

    fn from_str(s: &str) -> Result<NRange, String> {
        let (lo, hi) = s.split_once("..").ok_or("expected LO..HI")?;
        let lo: usize = lo.trim().parse().map_err(|_| "range start is not a number")?;
        let hi: usize = hi.trim().parse().map_err(|_| "range end is not a number")?;
        if lo < 1 {
            return Err("range start must be at least 1".into());
        }
        if lo > hi {
            return Err("range start exceeds range end".into());
        }
        Ok(NRange { lo, hi })
    }
}

struct Failure {
    code: u8,
    msg: String,
}

fn fail(code: u8, msg: impl Into<String>) -> Failure {
    Failure { code, msg: msg.into() }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.cmd {
        Cmd::Prove { file, algo, fuel, out } => cmd_prove(&file, algo, fuel, out.as_deref()),
        Cmd::Check { file, cert } => cmd_check(&file, &cert),
        Cmd::Ilp { file, out } => cmd_ilp(&file, &out),
        Cmd::Bench { n, trials, seed, fuel } => {
            let cfg = BenchConfig { n_lo: n.lo, n_hi: n.hi, trials, seed, fuel };
            print!("{}", run_bench(&cfg));
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| fail(1, format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| fail(1, format!("{}: {e}", path.display())))
}

/// Parse an instance file and replay it into a rebuilt engine snapshot.
fn load_snapshot(path: &Path) -> Result<(Snapshot, (TermId, TermId)), Failure> {
    let text = read_file(path)?;
    let inst = Instance::parse(&text).map_err(|e| fail(1, format!("{}: {e}", path.display())))?;
    let (eng, goal) = inst
        .build_engine()
        .map_err(|e| fail(1, format!("{}: {e}", path.display())))?;
    let snap = eng.snapshot().expect("engine was rebuilt");
    Ok((snap, goal))
}

fn cmd_prove(file: &Path, algo: Algo, fuel: u64, out: Option<&Path>) -> Result<(), Failure> {
    if out.is_some() && matches!(algo, Algo::BruteDag | Algo::BruteTree) {
        return Err(fail(64, "--out is not available for oracle algorithms"));
    }
    let (snap, (gl, gr)) = load_snapshot(file)?;
    let s = snap.vertex_of(gl).expect("goal term added");
    let t = snap.vertex_of(gr).expect("goal term added");
    let congruences = snap.congruence_edges().len();
    let mut report = RunReport::new(
        algo,
        snap.vertex_count(),
        snap.edge_count() - congruences,
        congruences,
    );

    let unprovable = |e: EngineError| match e {
        EngineError::NotEquivalent => {
            fail(2, "goal is not provable from the asserted equalities")
        }
        other => fail(1, other.to_string()),
    };
    let oracle_err = |e: OptdagError| match e {
        OptdagError::Engine(e) => unprovable(e),
        other => fail(3, other.to_string()),
    };

    // Every emitted certificate cites the input instance's axiom numbering
    // (reduce maps its trimmed engine's ids back), so one check covers all.
    let started = Instant::now();
    let emitted: Option<ProofCert> = match algo {
        Algo::Unopt => {
            Some(basic::unoptimized_proof(&snap, s, t).map_err(unprovable)?)
        }
        Algo::Reduce => {
            let base = basic::unoptimized_proof(&snap, s, t).map_err(unprovable)?;
            let reduced = basic::reduce_proof(snap.bank(), snap.axioms(), (gl, gr), &base)
                .map_err(unprovable)?;
            report.removed_axioms =
                Some(reduced.removed.iter().map(|a| a.0).collect());
            Some(reduced.cert)
        }
        Algo::Greedy => {
            let run = greedy::greedy_proof(&snap, s, t, fuel).map_err(unprovable)?;
            report.fuel_spent = Some(run.fuel_spent);
            report.fell_back = Some(run.fell_back);
            Some(run.cert)
        }
        Algo::Treeopt => {
            let run = treeopt::treeopt_proof(&snap, s, t).map_err(unprovable)?;
            report.passes_used = Some(run.passes_used);
            Some(run.cert)
        }
        Algo::BruteDag => {
            let found = optdag::brute_min_dag(&snap, s, t, &OracleLimits::default())
                .map_err(oracle_err)?;
            report.dag_size = Some(found.size);
            report.witness = Some(found.axioms.iter().map(|a| a.0).collect());
            None
        }
        Algo::BruteTree => {
            let size = optdag::brute_min_tree(&snap, s, t, &OracleLimits::default())
                .map_err(oracle_err)?;
            report.tree_size = Some(size);
            None
        }
    };
    report.wall_ms = Some(started.elapsed().as_secs_f64() * 1e3);

    if let Some(cert) = &emitted {
        check_cert(snap.bank(), cert, snap.axioms(), (gl, gr))
            .expect("emitted certificate checks against its instance");
        report.tree_size = Some(cert_tree_size(cert));
        report.dag_size = Some(cert_dag_size(cert));
        if let Some(path) = out {
            write_file(path, &render_cert(snap.bank(), cert))?;
        }
    }

    println!("{}", serde_json::to_string(&report).expect("report serializes"));
    Ok(())
}

fn cmd_check(file: &Path, cert_path: &Path) -> Result<(), Failure> {
    let text = read_file(file)?;
    let inst = Instance::parse(&text).map_err(|e| fail(1, format!("{}: {e}", file.display())))?;
    let mut bank = TermBank::new();
    let loaded = inst
        .intern(&mut bank)
        .map_err(|e| fail(1, format!("{}: {e}", file.display())))?;
    let cert_text = read_file(cert_path)?;
    let cert = parse_cert(&mut bank, &cert_text)
        .map_err(|e| fail(1, format!("{}: {e}", cert_path.display())))?;
    match check_cert(&bank, &cert, &loaded.axioms, loaded.goal) {
        Ok(()) => {
            println!("ok");
            Ok(())
        }
        Err(e) => Err(fail(2, format!("check failed: {} ({e})", e.name()))),
    }
}

fn cmd_ilp(file: &Path, out: &Path) -> Result<(), Failure> {
    let (snap, (gl, gr)) = load_snapshot(file)?;
    let s = snap.vertex_of(gl).expect("goal term added");
    let t = snap.vertex_of(gr).expect("goal term added");
    let (model, summary) = optdag::emit_ilp(&snap, s, t).map_err(|e| match e {
        OptdagError::Engine(e) => fail(1, e.to_string()),
        other => fail(3, other.to_string()),
    })?;
    write_file(out, &model)?;
    println!(
        "wrote {}: {} variables ({} congruence), {} constraints, ell={}",
        out.display(),
        summary.variables,
        summary.m_variables,
        summary.constraints,
        summary.ell
    );
    Ok(())
}
