//! The fusion method: semi-filters over the zero set of f, pair covers,
//! closures, circuit extraction, anticheckers and the constant-depth
//! variant with d-semifilters.

mod antichecker;
mod closure;
mod cover;
mod depth;
mod semifilter;

pub use antichecker::{anticheckers, is_antichecker_set, small_tables, Anticheckers};
pub use closure::{
    closure_filters, extract_circuit, fz_closure, fz_family, relevant_family, ClosureTrace, Extraction,
};
pub use cover::{
    candidate_pairs, check_pair_cover, rho_f0, rho_s_f0, small_brackets, PairCover, PairUniverse, RhoF0,
};
pub use depth::{
    candidate_tuples, depth_family, enumerate_dsemifilters, extract_depth_circuit, fz_depth_closure, k_preserves,
    rho_f0_d_t, DSemiFilter, DSemiFilterSet, DepthClosureTrace, DepthExtraction, RhoDepth, TupleCover,
    MAX_DEPTH_UNIVERSE,
};
pub use semifilter::{
    enumerate_semifilters, monotone_families, preserves, SemiFilter, SemiFilterSet, Subset, Universe, MAX_UNIVERSE,
};
