//! Exact Markov chain over ordered pairs `(X_{t-1}, X_t)`.

use std::collections::HashMap;
use std::io::Write;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use rand::Rng;

use super::kernel::{Kernel, WalkConfig};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairState {
    pub prev: NodeId,
    pub cur: NodeId,
}

impl PairState {
    pub fn new(prev: NodeId, cur: NodeId) -> Self {
        PairState { prev, cur }
    }
}

/// Power-iteration settings.
#[derive(Debug, Clone, Copy)]
pub struct ChainOptions {
    /// Stop once successive iterates differ by less than this in L1.
    pub tol: f64,
    pub max_iter: usize,
    /// Largest pair-state count accepted.
    pub max_states: usize,
}

impl Default for ChainOptions {
    fn default() -> Self {
        ChainOptions { tol: 1e-13, max_iter: 1_000_000, max_states: 200_000 }
    }
}

/// Pair chain restricted to its recurrent states, with the stationary law.
#[derive(Debug, Clone)]
pub struct PairChain {
    graph: Graph,
    cfg: WalkConfig,
    states: Vec<PairState>,
    index: HashMap<PairState, usize>,
    rows: Vec<Vec<(usize, f64)>>,
    stationary_pair: Vec<f64>,
    stationary_node: Vec<f64>,
    cumulative: Vec<f64>,
    iterations: usize,
}

/// Closed-form node law `(d_h + r) u_h / Σ_i (d_i + r) u_i`.
pub fn closed_form_node_law(g: &Graph, cfg: &WalkConfig) -> Vec<f64> {
    let raw: Vec<f64> = (0..g.n_nodes()).map(|h| (g.degree(h) as f64 + cfg.r) * cfg.u[h]).collect();
    let z: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / z).collect()
}

/// Builds the pair chain with default options.
pub fn build_pair_chain(g: &Graph, cfg: &WalkConfig) -> Result<PairChain> {
    PairChain::build(g, cfg, ChainOptions::default())
}

impl PairChain {
    pub fn build(g: &Graph, cfg: &WalkConfig, opts: ChainOptions) -> Result<Self> {
        let kernel = Kernel::new(g, cfg)?;
        if cfg.r == 0.0 && !g.is_connected() {
            return Err(Error::Reducible);
        }
        let n = g.n_nodes();

        // Every state reachable from the diagonal pairs.
        let mut states: Vec<PairState> = (0..n).map(|h| PairState::new(h, h)).collect();
        let mut index: HashMap<PairState, usize> = states.iter().enumerate().map(|(k, &s)| (s, k)).collect();
        let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
        let mut k = 0;
        while k < states.len() {
            let s = states[k];
            let row = kernel
                .row(s.prev, s.cur)
                .into_iter()
                .filter(|&(_, p)| p > 0.0)
                .map(|(j, p)| {
                    let t = PairState::new(s.cur, j);
                    let id = *index.entry(t).or_insert_with(|| {
                        states.push(t);
                        states.len() - 1
                    });
                    (id, p)
                })
                .collect();
            rows.push(row);
            if states.len() > opts.max_states {
                return Err(Error::ChainTooLarge { states: states.len(), cap: opts.max_states });
            }
            k += 1;
        }

        // Keep the closed communicating classes.
        let mut dg = DiGraph::<(), ()>::with_capacity(states.len(), 0);
        let nodes: Vec<_> = (0..states.len()).map(|_| dg.add_node(())).collect();
        for (a, row) in rows.iter().enumerate() {
            for &(b, _) in row {
                dg.add_edge(nodes[a], nodes[b], ());
            }
        }
        let sccs = tarjan_scc(&dg);
        let mut comp = vec![0usize; states.len()];
        for (c, members) in sccs.iter().enumerate() {
            for m in members {
                comp[m.index()] = c;
            }
        }
        let mut closed = vec![true; sccs.len()];
        for (a, row) in rows.iter().enumerate() {
            if row.iter().any(|&(b, _)| comp[b] != comp[a]) {
                closed[comp[a]] = false;
            }
        }
        let keep: Vec<usize> = (0..states.len()).filter(|&a| closed[comp[a]]).collect();
        let mut remap = vec![usize::MAX; states.len()];
        for (new, &old) in keep.iter().enumerate() {
            remap[old] = new;
        }
        let states: Vec<PairState> = keep.iter().map(|&a| states[a]).collect();
        let rows: Vec<Vec<(usize, f64)>> = keep
            .iter()
            .map(|&a| rows[a].iter().map(|&(b, p)| (remap[b], p)).collect())
            .collect();
        let index: HashMap<PairState, usize> = states.iter().enumerate().map(|(k, &s)| (s, k)).collect();

        let (stationary_pair, iterations) = lazy_power_iteration(&rows, opts);
        let mut stationary_node = vec![0.0; n];
        for (s, &p) in states.iter().zip(&stationary_pair) {
            stationary_node[s.cur] += p;
        }
        let mut acc = 0.0;
        let cumulative = stationary_pair
            .iter()
            .map(|&p| {
                acc += p;
                acc
            })
            .collect();
        Ok(PairChain {
            graph: g.clone(),
            cfg: cfg.clone(),
            states,
            index,
            rows,
            stationary_pair,
            stationary_node,
            cumulative,
            iterations,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn config(&self) -> &WalkConfig {
        &self.cfg
    }

    pub fn kernel(&self) -> Kernel<'_> {
        Kernel::new(&self.graph, &self.cfg).expect("validated at build")
    }

    pub fn states(&self) -> &[PairState] {
        &self.states
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Sparse transition rows over state indices.
    pub fn transitions(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }

    pub fn state_index(&self, s: PairState) -> Option<usize> {
        self.index.get(&s).copied()
    }

    pub fn stationary_pair(&self) -> &[f64] {
        &self.stationary_pair
    }

    pub fn stationary_node(&self) -> &[f64] {
        &self.stationary_node
    }

    /// Stationary probability of `(X_{t-1}, X_t) = (prev, cur)`.
    pub fn pair_prob(&self, prev: NodeId, cur: NodeId) -> f64 {
        self.state_index(PairState::new(prev, cur)).map_or(0.0, |k| self.stationary_pair[k])
    }

    pub fn closed_form_node(&self) -> Vec<f64> {
        closed_form_node_law(&self.graph, &self.cfg)
    }

    /// Largest absolute gap between the iterated and closed-form node laws.
    pub fn closed_form_deviation(&self) -> f64 {
        self.closed_form_node()
            .iter()
            .zip(&self.stationary_node)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `max_s |(pP)_s - p_s|`.
    pub fn stationarity_residual(&self) -> f64 {
        let next = apply(&self.rows, &self.stationary_pair);
        next.iter().zip(&self.stationary_pair).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// `Pr(X_t = X_{t-1})` at equilibrium, the chance that two successive
    /// states give a single distinct unit.
    pub fn prob_single_distinct(&self) -> f64 {
        (0..self.graph.n_nodes()).map(|h| self.pair_prob(h, h)).sum()
    }

    /// Stationary law of `len` consecutive states `(X_t, ..., X_{t+len-1})`,
    /// by exhaustive enumeration. Grows like `N · d^len`; meant for small
    /// chains.
    pub fn windows(&self, len: usize) -> Vec<(Vec<NodeId>, f64)> {
        fn extend(chain: &PairChain, k: usize, prob: f64, left: usize, path: &mut Vec<NodeId>, out: &mut Vec<(Vec<NodeId>, f64)>) {
            if left == 0 {
                out.push((path.clone(), prob));
                return;
            }
            for &(t, p) in &chain.rows[k] {
                if p > 0.0 {
                    path.push(chain.states[t].cur);
                    extend(chain, t, prob * p, left - 1, path, out);
                    path.pop();
                }
            }
        }
        let mut out = Vec::new();
        if len == 0 {
            return out;
        }
        let mut path = Vec::with_capacity(len);
        for (k, s) in self.states.iter().enumerate() {
            let p = self.stationary_pair[k];
            if p > 0.0 {
                path.push(s.cur);
                extend(self, k, p, len - 1, &mut path, &mut out);
                path.pop();
            }
        }
        out
    }

    /// Draws a pair state from the stationary law.
    pub fn sample_state<R: Rng + ?Sized>(&self, rng: &mut R) -> PairState {
        let total = self.cumulative[self.cumulative.len() - 1];
        let x = rng.gen::<f64>() * total;
        let k = self.cumulative.partition_point(|&c| c <= x).min(self.states.len() - 1);
        self.states[k]
    }

    /// Dense CSV dump: one row per pair state, one column per next node.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let n = self.graph.n_nodes();
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["prev".to_string(), "cur".to_string(), "stationary".to_string()];
        header.extend((1..=n).map(|j| j.to_string()));
        out.write_record(&header)?;
        for (k, s) in self.states.iter().enumerate() {
            let mut dense = vec![0.0; n];
            for &(t, p) in &self.rows[k] {
                dense[self.states[t].cur] += p;
            }
            let mut rec = vec![(s.prev + 1).to_string(), (s.cur + 1).to_string(), self.stationary_pair[k].to_string()];
            rec.extend(dense.iter().map(|p| p.to_string()));
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }
}

fn apply(rows: &[Vec<(usize, f64)>], x: &[f64]) -> Vec<f64> {
    let mut next = vec![0.0; x.len()];
    for (a, row) in rows.iter().enumerate() {
        let xa = x[a];
        if xa == 0.0 {
            continue;
        }
        for &(b, p) in row {
            next[b] += xa * p;
        }
    }
    next
}

/// Iterates `x <- (x + xP) / 2` from the uniform vector. The lazy step
/// removes periodicity without moving the fixed point.
fn lazy_power_iteration(rows: &[Vec<(usize, f64)>], opts: ChainOptions) -> (Vec<f64>, usize) {
    let m = rows.len();
    let mut x = vec![1.0 / m as f64; m];
    for it in 1..=opts.max_iter {
        let px = apply(rows, &x);
        let mut diff = 0.0;
        let mut total = 0.0;
        for (xa, pa) in x.iter_mut().zip(&px) {
            let v = 0.5 * (*xa + pa);
            diff += (v - *xa).abs();
            *xa = v;
            total += v;
        }
        for xa in x.iter_mut() {
            *xa /= total;
        }
        if diff < opts.tol {
            return (x, it);
        }
    }
    (x, opts.max_iter)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cycle_from_order, pinned, GridLayout};
    use crate::graph::rook_contiguity;

    #[test]
    fn regular_uniform_is_uniform() {
        let g = pinned::g4();
        let chain = build_pair_chain(&g, &WalkConfig::uniform(9, 0.0, 0.0)).unwrap();
        for p in chain.stationary_node() {
            assert!((p - 1.0 / 9.0).abs() < 1e-12);
        }
        // both directions of travel survive
        assert_eq!(chain.n_states(), 18);
        assert_eq!(chain.prob_single_distinct(), 0.0);
    }

    #[test]
    fn triangle_uniform() {
        let g = cycle_from_order(&[0, 1, 2]).unwrap();
        let chain = build_pair_chain(&g, &WalkConfig::uniform(3, 0.5, 0.3)).unwrap();
        for p in chain.stationary_node() {
            assert!((p - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn doubled_centre_preference_on_a_cycle() {
        // any 2-regular 9-cycle, π_5 = 0.4, others 0.2
        for g in [pinned::g2(), pinned::g4(), pinned::g5()] {
            let mut u = vec![1.0 / 10.0; 9];
            u[4] = 2.0 / 10.0;
            let chain = build_pair_chain(&g, &WalkConfig::new(0.0, 0.0, u).unwrap()).unwrap();
            assert!((chain.prob_single_distinct() - 0.1).abs() < 1e-12);
            assert!((chain.stationary_node()[4] - 0.2).abs() < 1e-12);
            assert!(chain.closed_form_deviation() < 1e-12);
        }
    }

    #[test]
    fn g1_equal_inclusion_deviates_from_closed_form() {
        // u_i = 12/(43 d_i): closed form is uniform but the chain is not
        let g = pinned::g1();
        let u = g.degrees().iter().map(|&d| 12.0 / (43.0 * d as f64)).collect();
        let chain = build_pair_chain(&g, &WalkConfig::new(0.0, 0.0, u).unwrap()).unwrap();
        for p in chain.closed_form_node() {
            assert!((p - 1.0 / 9.0).abs() < 1e-15);
        }
        assert!(chain.stationarity_residual() < 1e-14);
        // centre 0.236842 / 2 = 9/76
        assert!((chain.stationary_node()[4] - 9.0 / 76.0).abs() < 1e-10);
        assert!(chain.closed_form_deviation() > 1e-3);
        assert!((chain.prob_single_distinct() - 0.184_210_526_3).abs() < 1e-9);
    }

    #[test]
    fn disconnected_without_jumps_is_reducible() {
        let g = Graph::new(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        assert!(matches!(build_pair_chain(&g, &WalkConfig::uniform(6, 0.0, 0.0)), Err(Error::Reducible)));
        let chain = build_pair_chain(&g, &WalkConfig::uniform(6, 0.5, 0.0)).unwrap();
        for p in chain.stationary_node() {
            assert!((p - 1.0 / 6.0).abs() < 1e-12);
        }
    }

    #[test]
    fn state_cap() {
        let g = rook_contiguity(GridLayout::square(4));
        let opts = ChainOptions { max_states: 10, ..Default::default() };
        assert!(matches!(
            PairChain::build(&g, &WalkConfig::uniform(16, 0.0, 0.0), opts),
            Err(Error::ChainTooLarge { .. })
        ));
    }

    #[test]
    fn csv_export_rows_sum_to_one() {
        let g = pinned::g4();
        let chain = build_pair_chain(&g, &WalkConfig::uniform(9, 0.1, 0.0)).unwrap();
        let mut buf = Vec::new();
        chain.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("prev,cur,stationary,1,2"));
        for line in lines {
            let s: f64 = line.split(',').skip(3).map(|x| x.parse::<f64>().unwrap()).sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn window_law_has_stationary_marginals() {
        let g = pinned::g1();
        let u: Vec<f64> = (1..=9).map(|x| x as f64 / 45.0).collect();
        let chain = build_pair_chain(&g, &WalkConfig::new(0.0, 0.0, u).unwrap()).unwrap();
        let law = chain.windows(3);
        assert!((law.iter().map(|(_, p)| p).sum::<f64>() - 1.0).abs() < 1e-12);
        for pos in 0..3 {
            let mut marg = [0.0; 9];
            for (w, p) in &law {
                marg[w[pos]] += p;
            }
            for h in 0..9 {
                assert!((marg[h] - chain.stationary_node()[h]).abs() < 1e-12);
            }
        }
    }
}
