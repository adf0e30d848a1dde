use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// Jump weight `r`, backtrack weight `w` and preference vector `u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkConfig {
    pub r: f64,
    pub w: f64,
    pub u: Vec<f64>,
}

impl WalkConfig {
    pub fn new(r: f64, w: f64, u: Vec<f64>) -> Result<Self> {
        let cfg = WalkConfig { r, w, u };
        cfg.validate(cfg.u.len())?;
        Ok(cfg)
    }

    /// Uniform preference over `n` nodes.
    pub fn uniform(n: usize, r: f64, w: f64) -> Self {
        WalkConfig { r, w, u: vec![1.0 / n as f64; n] }
    }

    pub fn validate(&self, n_nodes: usize) -> Result<()> {
        if !(self.r >= 0.0 && self.r.is_finite()) {
            return Err(Error::InvalidConfig(format!("r = {} must be finite and >= 0", self.r)));
        }
        if !(0.0..=1.0).contains(&self.w) {
            return Err(Error::InvalidConfig(format!("w = {} must lie in [0, 1]", self.w)));
        }
        if self.u.len() != n_nodes {
            return Err(Error::InvalidConfig(format!(
                "preference vector has {} entries for {} nodes",
                self.u.len(),
                n_nodes
            )));
        }
        if let Some(i) = self.u.iter().position(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(Error::InvalidConfig(format!("u[{i}] = {} must be positive", self.u[i])));
        }
        let sum: f64 = self.u.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidConfig(format!("u sums to {sum}, not 1")));
        }
        Ok(())
    }

    /// Hash of the bit patterns of `(r, w, u)`.
    pub fn fingerprint(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.r.to_bits().hash(&mut h);
        self.w.to_bits().hash(&mut h);
        for x in &self.u {
            x.to_bits().hash(&mut h);
        }
        h.finish()
    }
}

/// Validated pairing of a graph and a walk configuration.
#[derive(Debug, Clone)]
pub struct Kernel<'a> {
    graph: &'a Graph,
    cfg: &'a WalkConfig,
    u_cumulative: Vec<f64>,
}

impl<'a> Kernel<'a> {
    pub fn new(graph: &'a Graph, cfg: &'a WalkConfig) -> Result<Self> {
        graph.check_walkable()?;
        cfg.validate(graph.n_nodes())?;
        let mut acc = 0.0;
        let u_cumulative = cfg
            .u
            .iter()
            .map(|&x| {
                acc += x;
                acc
            })
            .collect();
        Ok(Kernel { graph, cfg, u_cumulative })
    }

    pub fn graph(&self) -> &'a Graph {
        self.graph
    }

    pub fn config(&self) -> &'a WalkConfig {
        self.cfg
    }

    fn acceptance(&self, cur: NodeId, next: NodeId) -> f64 {
        (self.cfg.u[next] / self.cfg.u[cur]).min(1.0)
    }

    /// Proposal probability of moving along the edge `cur -> next`, given
    /// that the walk does not jump. Zero unless `next` is a neighbor.
    fn edge_proposal(&self, prev: NodeId, cur: NodeId, next: NodeId) -> f64 {
        if !self.graph.has_edge(cur, next) {
            return 0.0;
        }
        let d = self.graph.degree(cur) as f64;
        let back = prev != cur && self.graph.has_edge(prev, cur);
        match (back, next == prev) {
            (true, true) => self.cfg.w / d,
            (true, false) => (d - self.cfg.w) / (d * (d - 1.0)),
            (false, _) => 1.0 / d,
        }
    }

    /// `Pr(X_{t+1} = next | X_{t-1} = prev, X_t = cur)`.
    ///
    /// Staying at `cur` collects the self-jump mass and every rejected edge
    /// proposal.
    pub fn prob(&self, prev: NodeId, cur: NodeId, next: NodeId) -> f64 {
        let d = self.graph.degree(cur) as f64;
        let r = self.cfg.r;
        let move_weight = d / (d + r);
        let jump = r * self.cfg.u[next] / (d + r);
        if next == cur {
            let rejected: f64 = self
                .graph
                .neighbors(cur)
                .iter()
                .map(|&j| self.edge_proposal(prev, cur, j) * (1.0 - self.acceptance(cur, j)))
                .sum();
            jump + move_weight * rejected
        } else {
            jump + move_weight * self.edge_proposal(prev, cur, next) * self.acceptance(cur, next)
        }
    }

    /// Sparse next-node distribution from `(prev, cur)`, sorted by node.
    pub fn row(&self, prev: NodeId, cur: NodeId) -> Vec<(NodeId, f64)> {
        if self.cfg.r > 0.0 {
            (0..self.graph.n_nodes()).map(|j| (j, self.prob(prev, cur, j))).collect()
        } else {
            let mut out: Vec<(NodeId, f64)> = self
                .graph
                .neighbors(cur)
                .iter()
                .map(|&j| (j, self.prob(prev, cur, j)))
                .collect();
            let stay = self.prob(prev, cur, cur);
            let pos = out.partition_point(|&(j, _)| j < cur);
            out.insert(pos, (cur, stay));
            out.retain(|&(_, p)| p > 0.0);
            out
        }
    }

    /// Draws the next node: jump with probability `r/(d+r)` to `j ~ u`,
    /// otherwise propose a neighbor (backtracking with probability `w/d`
    /// when the previous node is adjacent) and accept with
    /// `min(u_j/u_cur, 1)`.
    pub fn step<R: Rng + ?Sized>(&self, prev: NodeId, cur: NodeId, rng: &mut R) -> NodeId {
        let nb = self.graph.neighbors(cur);
        let d = nb.len() as f64;
        let r = self.cfg.r;
        if r > 0.0 && rng.gen::<f64>() * (d + r) < r {
            let x = rng.gen::<f64>() * self.u_cumulative[self.u_cumulative.len() - 1];
            let j = self.u_cumulative.partition_point(|&c| c <= x);
            return j.min(self.graph.n_nodes() - 1);
        }
        let back = prev != cur && self.graph.has_edge(prev, cur);
        let proposal = if back {
            if rng.gen::<f64>() * d < self.cfg.w {
                prev
            } else {
                let k = rng.gen_range(0..nb.len() - 1);
                let j = nb[k];
                if j >= prev { nb[k + 1] } else { j }
            }
        } else {
            nb[rng.gen_range(0..nb.len())]
        };
        let acc = self.acceptance(cur, proposal);
        if acc >= 1.0 || rng.gen::<f64>() < acc {
            proposal
        } else {
            cur
        }
    }
}

/// Validates inputs and evaluates the one-step kernel.
pub fn transition_probability(
    g: &Graph,
    cfg: &WalkConfig,
    prev: NodeId,
    cur: NodeId,
    next: NodeId,
) -> Result<f64> {
    let n = g.n_nodes();
    for node in [prev, cur, next] {
        if node >= n {
            return Err(Error::NodeOutOfRange { node, n_nodes: n });
        }
    }
    Ok(Kernel::new(g, cfg)?.prob(prev, cur, next))
}

/// Samples one step of the walk.
pub fn step<R: Rng + ?Sized>(g: &Graph, cfg: &WalkConfig, prev: NodeId, cur: NodeId, rng: &mut R) -> Result<NodeId> {
    Ok(Kernel::new(g, cfg)?.step(prev, cur, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cycle_from_order, pinned};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn approx(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-14
    }

    fn g1_config() -> WalkConfig {
        let g = pinned::g1();
        let u = g.degrees().iter().map(|&d| 12.0 / (43.0 * d as f64)).collect();
        WalkConfig::new(0.0, 0.0, u).unwrap()
    }

    #[test]
    fn triangle_full_backtrack() {
        let g = cycle_from_order(&[0, 1, 2]).unwrap();
        let cfg = WalkConfig::uniform(3, 1.0, 1.0);
        let k = Kernel::new(&g, &cfg).unwrap();
        assert!(approx(k.prob(0, 1, 0), 4.0 / 9.0));
        assert!(approx(k.prob(0, 1, 2), 4.0 / 9.0));
        assert!(approx(k.prob(0, 1, 1), 1.0 / 9.0));
    }

    #[test]
    fn cycle_without_backtracking_is_deterministic() {
        let g = pinned::g4();
        let cfg = WalkConfig::uniform(9, 0.0, 0.0);
        let k = Kernel::new(&g, &cfg).unwrap();
        let order = pinned::ids(&pinned::G4_ORDER);
        assert_eq!(k.prob(order[0], order[1], order[2]), 1.0);
        assert_eq!(k.prob(order[0], order[1], order[0]), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            assert_eq!(k.step(order[0], order[1], &mut rng), order[2]);
        }
    }

    #[test]
    fn g1_rejection_mass() {
        let g = pinned::g1();
        let cfg = g1_config();
        let k = Kernel::new(&g, &cfg).unwrap();
        // prev = unit 1 (corner), cur = unit 2
        assert!(approx(k.prob(0, 1, 2), 0.5));
        assert!(approx(k.prob(0, 1, 4), 3.0 / 8.0));
        assert!(approx(k.prob(0, 1, 1), 1.0 / 8.0));
        assert_eq!(k.prob(0, 1, 0), 0.0);
    }

    #[test]
    fn rows_sum_to_one() {
        let g = pinned::g1();
        let u: Vec<f64> = (1..=9).map(|x| x as f64 / 45.0).collect();
        for (r, w) in [(0.0, 0.0), (0.3, 0.5), (2.0, 1.0)] {
            let cfg = WalkConfig::new(r, w, u.clone()).unwrap();
            let k = Kernel::new(&g, &cfg).unwrap();
            for prev in 0..9 {
                for cur in 0..9 {
                    let s: f64 = k.row(prev, cur).iter().map(|x| x.1).sum();
                    assert!((s - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn config_validation() {
        assert!(WalkConfig::new(-0.1, 0.0, vec![0.5, 0.5]).is_err());
        assert!(WalkConfig::new(0.0, 1.5, vec![0.5, 0.5]).is_err());
        assert!(WalkConfig::new(0.0, 0.0, vec![1.0, 0.0]).is_err());
        assert!(WalkConfig::new(0.0, 0.0, vec![0.6, 0.6]).is_err());
        let g = pinned::g1();
        let bad = WalkConfig::uniform(4, 0.0, 0.0);
        assert!(transition_probability(&g, &bad, 0, 1, 2).is_err());
        let deg1 = Graph::new(2, [(0, 1)]).unwrap();
        let cfg = WalkConfig::uniform(2, 0.0, 0.0);
        assert!(matches!(transition_probability(&deg1, &cfg, 0, 1, 0), Err(Error::DegreeTooSmall { .. })));
    }

    #[test]
    fn step_matches_kernel_frequencies() {
        let g = pinned::g1();
        let u: Vec<f64> = (1..=9).map(|x| x as f64 / 45.0).collect();
        let cfg = WalkConfig::new(0.7, 0.4, u).unwrap();
        let k = Kernel::new(&g, &cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let draws = 1_000_000;
        for (prev, cur) in [(0, 1), (4, 4), (8, 4)] {
            let mut counts = [0usize; 9];
            for _ in 0..draws {
                counts[k.step(prev, cur, &mut rng)] += 1;
            }
            for j in 0..9 {
                let p = k.prob(prev, cur, j);
                let sd = (draws as f64 * p * (1.0 - p)).sqrt();
                let diff = (counts[j] as f64 - draws as f64 * p).abs();
                assert!(diff <= 4.0 * sd + 1e-9, "({prev},{cur})->{j}: {} vs {}", counts[j], p);
            }
        }
    }
}
