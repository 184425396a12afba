//! Toolkit for Label Cover (projection games) in its Max-Rep and Min-Rep
//! variants: instance generators, a randomized degree-sparsification
//! pipeline, exact and approximate solvers, and a Monte Carlo harness that
//! checks the pipeline's statistical behavior against exact oracles.
//!
//! An instance is a bipartite constraint graph `(A, B, E)` over a shared
//! alphabet `Σ`; each edge carries a projection table `π: Σ → Σ` and is
//! satisfied by `(σ_a, σ_b)` when `π(σ_a) = σ_b`. Max-Rep maximizes the
//! fraction of satisfied edges over labelings; Min-Rep minimizes the total
//! label count over multilabelings that satisfy every edge.
//!
//! Everything randomized draws from a pinned, seeded PRNG (see [`seed`]),
//! so identical inputs produce bit-identical outputs.

pub mod cli;
pub mod generate;
pub mod harness;
pub mod instance;
pub mod reduce;
pub mod report;
pub mod seed;
pub mod solve;
pub mod stats;
pub mod textio;

pub use instance::{
    degree_profile, eval_labeling, eval_multilabeling, DegreeProfile, EvalReport, Instance,
    InstanceError, Labeling, Multilabeling, Side, Symbol,
};
