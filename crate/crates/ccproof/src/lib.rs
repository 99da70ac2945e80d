//! Congruence closure that remembers every equality it was given — including
//! redundant ones — and mines the resulting graph for small proof
//! certificates. The pipeline: build an [`engine::Engine`] from asserted
//! equalities, freeze an [`engine::Snapshot`], then extract a
//! [`cert::ProofCert`] with one of the strategies in [`extract`], measured
//! by tree size (axiom applications with repetition) or DAG size (distinct
//! axioms used).

pub mod bench;
pub mod cert;
pub mod engine;
pub mod extract;
pub mod instance;
pub mod optdag;
pub mod report;
pub mod sexp;
pub mod term;
