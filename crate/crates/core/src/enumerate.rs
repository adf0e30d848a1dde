//! Hamiltonian cycles that avoid a contiguity relation.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{cycle_from_order, Graph, NodeId};

/// Largest population for exhaustive enumeration.
pub const EXHAUSTIVE_MAX_NODES: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleSearch {
    /// Every qualifying cycle exactly once, in DFS order from node 0.
    Exhaustive,
    /// Uniformly drawn qualifying cycles (rejection sampling of random
    /// permutations), duplicates removed.
    Sampled { seed: u64, max_attempts: usize },
}

/// Rotation/reflection canonical form: starts at node 0 and heads to the
/// smaller of its two cycle neighbors.
pub fn canonical_cycle(order: &[NodeId]) -> Vec<NodeId> {
    let n = order.len();
    let Some(z) = order.iter().position(|&v| v == 0) else {
        return order.to_vec();
    };
    let fwd: Vec<_> = (0..n).map(|k| order[(z + k) % n]).collect();
    if n >= 3 && fwd[1] > fwd[n - 1] {
        let mut rev = Vec::with_capacity(n);
        rev.push(0);
        rev.extend(fwd[1..].iter().rev());
        rev
    } else {
        fwd
    }
}

/// Stream of distinct 2-regular Hamiltonian cycles sharing no edge with
/// `contiguity`, stopping after `limit` cycles.
pub fn enumerate_noncontiguous_cycles(
    contiguity: &Graph,
    limit: usize,
    mode: CycleSearch,
) -> Result<CycleStream> {
    let n = contiguity.n_nodes();
    let allowed: Vec<Vec<NodeId>> = (0..n)
        .map(|i| (0..n).filter(|&j| j != i && !contiguity.has_edge(i, j)).collect())
        .collect();
    let inner = match mode {
        CycleSearch::Exhaustive => {
            if n > EXHAUSTIVE_MAX_NODES {
                return Err(Error::Invalid(format!(
                    "exhaustive cycle enumeration is limited to {EXHAUSTIVE_MAX_NODES} nodes, got {n}"
                )));
            }
            Inner::Exhaustive(Dfs::new(allowed))
        }
        CycleSearch::Sampled { seed, max_attempts } => Inner::Sampled(Sampler {
            contiguity: contiguity.clone(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            attempts_left: max_attempts,
            seen: HashSet::new(),
        }),
    };
    Ok(CycleStream { inner, remaining: limit })
}

/// Iterator over cycle orders; see [`enumerate_noncontiguous_cycles`].
pub struct CycleStream {
    inner: Inner,
    remaining: usize,
}

enum Inner {
    Exhaustive(Dfs),
    Sampled(Sampler),
}

impl CycleStream {
    /// Yields node orders instead of graphs.
    pub fn orders(self) -> impl Iterator<Item = Vec<NodeId>> {
        OrderIter(self)
    }

    fn next_order(&mut self) -> Option<Vec<NodeId>> {
        if self.remaining == 0 {
            return None;
        }
        let next = match &mut self.inner {
            Inner::Exhaustive(dfs) => dfs.next_cycle(),
            Inner::Sampled(s) => s.next_cycle(),
        };
        if next.is_some() {
            self.remaining -= 1;
        }
        next
    }
}

struct OrderIter(CycleStream);

impl Iterator for OrderIter {
    type Item = Vec<NodeId>;
    fn next(&mut self) -> Option<Vec<NodeId>> {
        self.0.next_order()
    }
}

impl Iterator for CycleStream {
    type Item = Graph;
    fn next(&mut self) -> Option<Graph> {
        self.next_order().map(|o| cycle_from_order(&o).expect("valid cycle order"))
    }
}

struct Dfs {
    allowed: Vec<Vec<NodeId>>,
    path: Vec<NodeId>,
    cursor: Vec<usize>,
    visited: Vec<bool>,
    done: bool,
}

impl Dfs {
    fn new(allowed: Vec<Vec<NodeId>>) -> Self {
        let n = allowed.len();
        let mut visited = vec![false; n];
        if n > 0 {
            visited[0] = true;
        }
        Dfs { allowed, path: vec![0], cursor: vec![0], visited, done: n < 3 }
    }

    fn pop(&mut self) {
        if let Some(v) = self.path.pop() {
            self.visited[v] = false;
            self.cursor.pop();
        }
    }

    fn next_cycle(&mut self) -> Option<Vec<NodeId>> {
        let n = self.allowed.len();
        while !self.done {
            let depth = self.path.len();
            if depth == n {
                let last = self.path[n - 1];
                let closes = self.allowed[last].binary_search(&0).is_ok() && self.path[1] < last;
                let found = closes.then(|| self.path.clone());
                self.pop();
                if found.is_some() {
                    return found;
                }
                continue;
            }
            let cur = self.path[depth - 1];
            let start = self.cursor[depth - 1];
            let cand = self.allowed[cur][start..]
                .iter()
                .position(|&v| !self.visited[v])
                .map(|off| start + off);
            match cand {
                Some(idx) => {
                    self.cursor[depth - 1] = idx + 1;
                    let v = self.allowed[cur][idx];
                    self.visited[v] = true;
                    self.path.push(v);
                    self.cursor.push(0);
                }
                None if depth == 1 => self.done = true,
                None => self.pop(),
            }
        }
        None
    }
}

struct Sampler {
    contiguity: Graph,
    rng: ChaCha8Rng,
    attempts_left: usize,
    seen: HashSet<Vec<NodeId>>,
}

impl Sampler {
    fn next_cycle(&mut self) -> Option<Vec<NodeId>> {
        let n = self.contiguity.n_nodes();
        if n < 3 {
            return None;
        }
        let mut order: Vec<NodeId> = (0..n).collect();
        while self.attempts_left > 0 {
            self.attempts_left -= 1;
            order.shuffle(&mut self.rng);
            if (0..n).any(|k| self.contiguity.has_edge(order[k], order[(k + 1) % n])) {
                continue;
            }
            let canon = canonical_cycle(&order);
            if self.seen.insert(canon.clone()) {
                return Some(canon);
            }
        }
        None
    }
}
