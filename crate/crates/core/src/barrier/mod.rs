//! Branching circuits C_h and D_g, the exact distributions of h = D̄_g and
//! of the typed error sets, the position walk, and the covers built from
//! them.

mod construct;
mod cover;
mod distr;
mod positions;

pub use construct::{
    build_c_h, build_c_h_frame, build_d_g, build_d_g_frame, cofactor, Arm, Branch, BranchingDecomposition, CNode,
    DgCircuit, Frame, Level, TypeIndex,
};
pub use cover::{
    barrier_cover, barrier_cover_0proj, barrier_cover_depth, cover_instance, majority_cap, majority_circuit,
    BarrierReport, CaseOptions, Combiner, DepthReport, InstanceCover, ProjReport,
};
pub use distr::{
    check_lemma, distr_h_delta, instance_distributions, lemma_instance, recipe_inputs, verify_distr_lemma,
    DeltaEntry, Distributions, ExactDistribution, Instance, LemmaReport, LemmaRow, Recipe,
};
pub use positions::{positions_cover_check, PositionWitness};
