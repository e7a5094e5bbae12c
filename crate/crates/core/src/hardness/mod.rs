//! Lower-bound constructions at desk scale: the sparse instance that encodes
//! k-CNF satisfiability, and the reduction from Hamiltonian path to kSUM with
//! preprocessing. Each comes with a brute-force oracle.

pub mod cnf;
pub mod graph;
pub mod hardest;
pub mod ksum;

pub use cnf::{sat_oracle, Cnf};
pub use graph::{hampath_oracle, simple_paths_dp, Digraph, PathTable};
pub use hardest::{build_hardest_instance, encode_cnf_query, find_orthogonal, Delta, HardInstance};
pub use ksum::{
    hampath_reduction_build, hampath_reduction_queries, hampath_via_ksum, ksum_query_solve,
    HamPathKSum, KSumInstance, KSumQuery,
};
