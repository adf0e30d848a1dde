//! Lagged Metropolis-Hastings walk: one-step kernel, exact pair chain,
//! equilibrium traces and ties.

mod chain;
pub mod flows;
mod kernel;
mod trace;

pub use chain::{build_pair_chain, closed_form_node_law, ChainOptions, PairChain, PairState};
pub use flows::{flow_residuals, FlowResiduals};
pub use kernel::{step, transition_probability, Kernel, WalkConfig};
pub use trace::{default_burn_in, extract_ties, run_walk, ties_in, StartMode, Tie, WalkTrace};
