//! Balance identities of the stationary pair law.
//!
//! Each residual is the largest absolute gap between the two sides of one
//! identity, evaluated with the iterated stationary law of a [`PairChain`].

use super::chain::PairChain;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FlowResiduals {
    /// `p_h = p_(hh) + Σ_{i∈ν_h} p_(ih) + Σ_{i∉ν_h, i≠h} p_i r u_h / (d_i + r)`.
    pub mixed: f64,
    /// Forward flows through `h` between two of its neighbors, summed in
    /// both directions.
    pub forward_through: f64,
    /// Jump-only flows across three distinct, mutually non-adjacent nodes.
    pub jump_triples: f64,
    /// `p_h Δ_h = Σ_{i∈ν_h} p_(ih)`.
    pub edge_inflow: f64,
}

impl FlowResiduals {
    pub fn max(&self) -> f64 {
        self.mixed.max(self.forward_through).max(self.jump_triples).max(self.edge_inflow)
    }
}

pub fn mixed_equation_residual(chain: &PairChain) -> f64 {
    let g = chain.graph();
    let cfg = chain.config();
    let p = chain.stationary_node();
    let n = g.n_nodes();
    (0..n)
        .map(|h| {
            let nb = g.neighbors(h);
            let from_edges: f64 = nb.iter().map(|&i| chain.pair_prob(i, h)).sum();
            let from_jumps: f64 = (0..n)
                .filter(|&i| i != h && !g.has_edge(i, h))
                .map(|i| p[i] * cfg.r * cfg.u[h] / (g.degree(i) as f64 + cfg.r))
                .sum();
            (p[h] - chain.pair_prob(h, h) - from_edges - from_jumps).abs()
        })
        .fold(0.0, f64::max)
}

/// Forward flows `(i, h, j)` against `(j, h, i)` for neighbors `i ≠ j` of `h`.
pub fn forward_through_residual(chain: &PairChain) -> f64 {
    let g = chain.graph();
    let cfg = chain.config();
    let u = &cfg.u;
    (0..g.n_nodes())
        .map(|h| {
            let nb = g.neighbors(h);
            let d = nb.len() as f64;
            let scale = (d - cfg.w) / (d - 1.0) / ((d + cfg.r) * u[h]);
            let mut lhs = 0.0;
            for &i in nb {
                for &j in nb.iter().filter(|&&j| j != i) {
                    lhs += chain.pair_prob(i, h) * scale * u[j].min(u[h]);
                }
            }
            let mut rhs = 0.0;
            for &j in nb {
                for &i in nb.iter().filter(|&&i| i != j) {
                    rhs += chain.pair_prob(j, h) * scale * u[i].min(u[h]);
                }
            }
            (lhs - rhs).abs()
        })
        .fold(0.0, f64::max)
}

/// `p_i (r/(d_i+r)) u_h (r/(d_h+r)) u_j` against the reversed triple, over
/// distinct `i, h, j` with neither `i` nor `j` adjacent to `h`.
pub fn jump_triple_residual(chain: &PairChain) -> f64 {
    let g = chain.graph();
    let cfg = chain.config();
    let (r, u) = (cfg.r, &cfg.u);
    let p = chain.stationary_node();
    let n = g.n_nodes();
    let jump = |a: usize| r / (g.degree(a) as f64 + r);
    let mut worst = 0.0f64;
    for h in 0..n {
        let far: Vec<usize> = (0..n).filter(|&i| i != h && !g.has_edge(i, h)).collect();
        for (a, &i) in far.iter().enumerate() {
            for &j in &far[a + 1..] {
                let fwd = p[i] * jump(i) * u[h] * jump(h) * u[j];
                let bwd = p[j] * jump(j) * u[h] * jump(h) * u[i];
                worst = worst.max((fwd - bwd).abs());
            }
        }
    }
    worst
}

/// `p_h Δ_h` against the stationary inflow along edges, where
/// `Δ_h = r/(d_h+r) Σ_{i∈ν_h} u_i + Σ_{i∈ν_h} min(u_i, u_h) / ((d_h+r) u_h)`.
pub fn edge_inflow_residual(chain: &PairChain) -> f64 {
    let g = chain.graph();
    let cfg = chain.config();
    let (r, u) = (cfg.r, &cfg.u);
    let p = chain.stationary_node();
    (0..g.n_nodes())
        .map(|h| {
            let nb = g.neighbors(h);
            let d = nb.len() as f64;
            let delta = r / (d + r) * nb.iter().map(|&i| u[i]).sum::<f64>()
                + nb.iter().map(|&i| u[i].min(u[h])).sum::<f64>() / ((d + r) * u[h]);
            let inflow: f64 = nb.iter().map(|&i| chain.pair_prob(i, h)).sum();
            (p[h] * delta - inflow).abs()
        })
        .fold(0.0, f64::max)
}

pub fn flow_residuals(chain: &PairChain) -> FlowResiduals {
    FlowResiduals {
        mixed: mixed_equation_residual(chain),
        forward_through: forward_through_residual(chain),
        jump_triples: jump_triple_residual(chain),
        edge_inflow: edge_inflow_residual(chain),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{pinned, Graph};
    use crate::walker::{build_pair_chain, WalkConfig};

    #[test]
    fn uniform_preference_balances_everything() {
        let g = Graph::new(6, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3), (0, 4)]).unwrap();
        for (r, w) in [(0.0, 0.0), (0.4, 0.3), (1.5, 1.0)] {
            let chain = build_pair_chain(&g, &WalkConfig::uniform(6, r, w)).unwrap();
            let res = flow_residuals(&chain);
            assert!(res.max() < 1e-10, "{res:?}");
            assert!(chain.closed_form_deviation() < 1e-10);
        }
    }

    #[test]
    fn full_backtracking_balances_any_preference() {
        let g = pinned::g1();
        let u: Vec<f64> = (1..=9).map(|x| x as f64 / 45.0).collect();
        let chain = build_pair_chain(&g, &WalkConfig::new(0.3, 1.0, u).unwrap()).unwrap();
        assert!(flow_residuals(&chain).max() < 1e-10);
        assert!(chain.closed_form_deviation() < 1e-10);
    }

    #[test]
    fn mixed_equation_holds_even_when_closed_form_fails() {
        let g = pinned::g1();
        let u: Vec<f64> = (1..=9).map(|x| x as f64 / 45.0).collect();
        let chain = build_pair_chain(&g, &WalkConfig::new(0.3, 0.0, u).unwrap()).unwrap();
        assert!(mixed_equation_residual(&chain) < 1e-10);
        assert!(forward_through_residual(&chain) < 1e-10);
        assert!(chain.closed_form_deviation() > 1e-4);
        assert!(edge_inflow_residual(&chain) > 1e-4);
    }
}
