use rand::Rng;

use super::chain::PairChain;
use super::kernel::{Kernel, WalkConfig};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// How the walk reaches equilibrium before the recorded window.
#[derive(Debug, Clone, Copy)]
pub enum StartMode<'a> {
    /// Initial pair drawn from the exact stationary pair law.
    Stationary(&'a PairChain),
    /// Start at pair `(0, 0)` and discard this many steps.
    BurnIn(usize),
}

/// Default burn-in length: `50 N` steps.
pub fn default_burn_in(n_nodes: usize) -> usize {
    50 * n_nodes
}

/// An `m`-state window of the walk plus the states just outside it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkTrace {
    /// State immediately before the window.
    pub lead: NodeId,
    pub states: Vec<NodeId>,
    /// State immediately after the window.
    pub trail: NodeId,
    pub config_fingerprint: u64,
    pub seed: Option<u64>,
}

impl WalkTrace {
    pub fn m(&self) -> usize {
        self.states.len()
    }

    /// Distinct units in the window, in first-visit order.
    pub fn distinct_units(&self) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = Vec::with_capacity(self.states.len());
        for &s in &self.states {
            if !out.contains(&s) {
                out.push(s);
            }
        }
        out
    }
}

/// Maximal constant run of the walk at `node`, bounded on both sides by
/// other states inside the window. Positions are 0-based window indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Tie {
    pub node: NodeId,
    pub start: usize,
    pub end: usize,
}

impl Tie {
    pub fn order(&self) -> usize {
        self.end - self.start + 1
    }
}

/// Runs the walk and records `m` consecutive states at equilibrium.
pub fn run_walk<R: Rng + ?Sized>(
    g: &Graph,
    cfg: &WalkConfig,
    m: usize,
    start: StartMode<'_>,
    rng: &mut R,
) -> Result<WalkTrace> {
    if m == 0 {
        return Err(Error::Invalid("walk window length m must be at least 1".into()));
    }
    let kernel = Kernel::new(g, cfg)?;
    let (mut prev, mut cur) = match start {
        StartMode::Stationary(chain) => {
            if chain.graph() != g || chain.config() != cfg {
                return Err(Error::Invalid("pair chain was built for another graph or configuration".into()));
            }
            let s = chain.sample_state(rng);
            (s.prev, s.cur)
        }
        StartMode::BurnIn(steps) => {
            let (mut p, mut c) = (0, 0);
            for _ in 0..steps {
                let next = kernel.step(p, c, rng);
                p = c;
                c = next;
            }
            (p, c)
        }
    };
    let lead = cur;
    let mut states = Vec::with_capacity(m);
    for _ in 0..=m {
        let next = kernel.step(prev, cur, rng);
        prev = cur;
        cur = next;
        states.push(cur);
    }
    let trail = states.pop().expect("m + 1 steps taken");
    Ok(WalkTrace { lead, states, trail, config_fingerprint: cfg.fingerprint(), seed: None })
}

/// Ties of a window: maximal runs lying within positions `1..=m-2` whose
/// neighboring positions hold different states. Runs touching the first or
/// last position are dropped, so `n_m <= m - 2`.
pub fn extract_ties(trace: &WalkTrace) -> Vec<Tie> {
    ties_in(&trace.states)
}

/// [`extract_ties`] on a bare state sequence.
pub fn ties_in(states: &[NodeId]) -> Vec<Tie> {
    let m = states.len();
    let mut ties = Vec::new();
    if m < 3 {
        return ties;
    }
    let mut start = 0;
    for t in 1..=m {
        if t == m || states[t] != states[start] {
            let end = t - 1;
            if start >= 1 && end + 1 < m {
                ties.push(Tie { node: states[start], start, end });
            }
            start = t;
        }
    }
    ties
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::pinned;
    use crate::walker::chain::build_pair_chain;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn all_distinct_window() {
        let ties = ties_in(&[0, 1, 2, 3, 4]);
        assert_eq!(ties.len(), 3);
        assert!(ties.iter().all(|t| t.order() == 1));
        assert_eq!(ties.iter().map(|t| t.start).collect::<Vec<_>>(), vec![1, 2, 3]);
    }

    #[test]
    fn runs_merge() {
        let ties = ties_in(&[0, 1, 1, 2, 3]);
        assert_eq!(ties, vec![Tie { node: 1, start: 1, end: 2 }, Tie { node: 2, start: 3, end: 3 }]);
    }

    #[test]
    fn edge_runs_are_dropped() {
        assert!(ties_in(&[0, 0, 0, 0]).is_empty());
        assert_eq!(ties_in(&[0, 0, 1, 2, 2]), vec![Tie { node: 1, start: 2, end: 2 }]);
        assert!(ties_in(&[0, 1]).is_empty());
    }

    #[test]
    fn full_cycle_window_visits_everything_once() {
        let g = pinned::g4();
        let cfg = WalkConfig::uniform(9, 0.0, 0.0);
        let chain = build_pair_chain(&g, &cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let t = run_walk(&g, &cfg, 9, StartMode::Stationary(&chain), &mut rng).unwrap();
            let mut s = t.states.clone();
            s.sort();
            assert_eq!(s, (0..9).collect::<Vec<_>>());
            assert_eq!(t.trail, t.states[0]);
            assert_eq!(t.lead, t.states[8]);
        }
    }

    #[test]
    fn burn_in_mode_runs() {
        let g = pinned::g1();
        let cfg = WalkConfig::uniform(9, 0.0, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = run_walk(&g, &cfg, 4, StartMode::BurnIn(default_burn_in(9)), &mut rng).unwrap();
        assert_eq!(t.m(), 4);
        for w in t.states.windows(2) {
            assert!(g.has_edge(w[0], w[1]) || w[0] == w[1]);
        }
        assert!(run_walk(&g, &cfg, 0, StartMode::BurnIn(1), &mut rng).is_err());
    }

    #[test]
    fn mismatched_chain_is_rejected() {
        let g = pinned::g4();
        let chain = build_pair_chain(&g, &WalkConfig::uniform(9, 0.0, 0.0)).unwrap();
        let other = WalkConfig::uniform(9, 0.1, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(run_walk(&g, &other, 2, StartMode::Stationary(&chain), &mut rng).is_err());
    }
}
