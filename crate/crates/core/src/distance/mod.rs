//! Distances between a function and a model: exact ρ with certificates,
//! depth-bounded ρ_d and the probabilistic relaxation.

mod cert;
mod depth;
mod prob;
mod rho;

pub(crate) use cert::gate_keys;
pub use cert::{
    cert_from_circuit, to_asymmetric, verify_cover, verify_depth_cover, CertMode, CertTuple, CoverCertificate,
    CoverCheck, DepthCoverCertificate, Side,
};
pub use depth::{depth_witnesses, rho_d_exact, DepthBudget, RhoDOutcome};
pub use prob::{rho_probabilistic, InputDistribution, ProbRho, Q};
pub use rho::{build_pool, reachable_members, rho_exact, rho_greedy, tuples_over, Pool, RhoBudget, RhoOutcome, RhoValue};
