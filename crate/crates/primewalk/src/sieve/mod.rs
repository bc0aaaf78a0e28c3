//! Sieves over arithmetic progressions with square-free moduli, the
//! premature-revenant family `Y_ℓ`, and sieve graphs.

mod composite;
mod graphs;
mod progression;
mod yell;

pub use composite::{
    abstract_sieve_identity, build_fd, build_with_ideal, cross_cut_sum, intersection_closure, sieve_error_bound,
    SieveApprox, SieveError, SieveIdentity,
};
pub use graphs::{
    enumerate_sieve_graphs, summarize, thread_sum_bound, EnumerationSummary, SieveGraph, Thread, ThreadKind, ThreadSum,
};
pub use progression::{format_family, parse_family, Progression};
pub use yell::{build_yell_conditions, is_in_yell, is_in_yell_with, yell_chains, Closure, YellChain};
