//! Simple undirected graphs over spatial units.
//!
//! Node ids are `0..n` in the API. The plain-text edge-list format used on
//! disk is 1-based: the first line holds `N`, then one `i j` pair per line
//! with `i < j`.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Node identifier, `0..n_nodes`.
pub type NodeId = usize;

/// Simple undirected graph stored as sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    adj: Vec<Vec<NodeId>>,
}

impl Graph {
    /// Builds a validated graph. Duplicate edges are collapsed.
    pub fn new(n_nodes: usize, edges: impl IntoIterator<Item = (NodeId, NodeId)>) -> Result<Self> {
        let mut sets = vec![BTreeSet::new(); n_nodes];
        for (i, j) in edges {
            for node in [i, j] {
                if node >= n_nodes {
                    return Err(Error::NodeOutOfRange { node, n_nodes });
                }
            }
            if i == j {
                return Err(Error::LoopEdge(i));
            }
            sets[i].insert(j);
            sets[j].insert(i);
        }
        Ok(Graph {
            adj: sets.into_iter().map(|s| s.into_iter().collect()).collect(),
        })
    }

    /// Graph with no edges.
    pub fn empty(n_nodes: usize) -> Self {
        Graph { adj: vec![Vec::new(); n_nodes] }
    }

    pub fn n_nodes(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, node: NodeId) -> &[NodeId] {
        &self.adj[node]
    }

    pub fn degree(&self, node: NodeId) -> usize {
        self.adj[node].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, i: NodeId, j: NodeId) -> bool {
        self.adj[i].binary_search(&j).is_ok()
    }

    /// Edges as `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(i, nb)| nb.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn min_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn is_connected(&self) -> bool {
        let n = self.n_nodes();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &self.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == n
    }

    /// True when every node has degree 2 and the graph is one cycle.
    pub fn is_single_cycle(&self) -> bool {
        self.n_nodes() >= 3 && self.adj.iter().all(|nb| nb.len() == 2) && self.is_connected()
    }

    /// Rejects graphs with a node of degree below 2.
    pub fn check_walkable(&self) -> Result<()> {
        match self.adj.iter().position(|nb| nb.len() < 2) {
            Some(node) => Err(Error::DegreeTooSmall { node, degree: self.degree(node) }),
            None => Ok(()),
        }
    }

    /// Node order along a single cycle, starting at node 0 and heading to its
    /// smaller neighbor.
    pub fn cycle_order(&self) -> Result<Vec<NodeId>> {
        if !self.is_single_cycle() {
            return Err(Error::NotACycle);
        }
        let mut order = Vec::with_capacity(self.n_nodes());
        order.push(0);
        let (mut prev, mut cur) = (0, self.adj[0][0]);
        while cur != 0 {
            order.push(cur);
            let nb = &self.adj[cur];
            let next = if nb[0] == prev { nb[1] } else { nb[0] };
            prev = cur;
            cur = next;
        }
        Ok(order)
    }

    /// Writes the 1-based edge-list exchange format.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{}\n", self.n_nodes());
        for (i, j) in self.edges() {
            let _ = writeln!(out, "{} {}", i + 1, j + 1);
        }
        out
    }

    pub fn write_edge_list<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(self.to_edge_list().as_bytes())?;
        Ok(())
    }

    /// Parses the 1-based edge-list exchange format. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn read_edge_list<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r
            .lines()
            .map(|l| l.map(|s| s.trim().to_owned()))
            .filter(|l| !matches!(l, Ok(s) if s.is_empty() || s.starts_with('#')));
        let header = lines
            .next()
            .ok_or_else(|| Error::Invalid("edge list is empty".into()))??;
        let n: usize = header
            .parse()
            .map_err(|_| Error::Invalid(format!("bad node count line `{header}`")))?;
        let mut edges = Vec::new();
        for line in lines {
            let line = line?;
            let mut it = line.split_whitespace().map(str::parse::<usize>);
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(i)), Some(Ok(j)), None) if i >= 1 && j >= 1 => edges.push((i - 1, j - 1)),
                _ => return Err(Error::Invalid(format!("bad edge line `{line}`"))),
            }
        }
        Graph::new(n, edges)
    }
}

/// Row-major grid numbering: node `row * cols + col`, rows and columns from 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridLayout {
    pub rows: usize,
    pub cols: usize,
}

impl GridLayout {
    pub fn new(rows: usize, cols: usize) -> Self {
        GridLayout { rows, cols }
    }

    pub fn square(side: usize) -> Self {
        GridLayout { rows: side, cols: side }
    }

    pub fn n_nodes(&self) -> usize {
        self.rows * self.cols
    }

    pub fn id_of(&self, row: usize, col: usize) -> NodeId {
        debug_assert!(row < self.rows && col < self.cols);
        row * self.cols + col
    }

    pub fn row_col(&self, node: NodeId) -> (usize, usize) {
        (node / self.cols, node % self.cols)
    }

    /// Cell-center coordinates `(x1, x2)` in the unit square, `x1` along
    /// columns and `x2` along rows.
    pub fn unit_square_coords(&self) -> Vec<[f64; 2]> {
        (0..self.n_nodes())
            .map(|v| {
                let (r, c) = self.row_col(v);
                [(c as f64 + 0.5) / self.cols as f64, (r as f64 + 0.5) / self.rows as f64]
            })
            .collect()
    }

    /// Grid-index coordinates `(col, row)`.
    pub fn index_coords(&self) -> Vec<[f64; 2]> {
        (0..self.n_nodes())
            .map(|v| {
                let (r, c) = self.row_col(v);
                [c as f64, r as f64]
            })
            .collect()
    }
}

/// Rook contiguity: units sharing a grid edge are adjacent.
pub fn rook_contiguity(layout: GridLayout) -> Graph {
    let mut edges = Vec::with_capacity(2 * layout.n_nodes());
    for r in 0..layout.rows {
        for c in 0..layout.cols {
            let v = layout.id_of(r, c);
            if c + 1 < layout.cols {
                edges.push((v, layout.id_of(r, c + 1)));
            }
            if r + 1 < layout.rows {
                edges.push((v, layout.id_of(r + 1, c)));
            }
        }
    }
    Graph::new(layout.n_nodes(), edges).expect("grid edges are valid")
}

/// 2-regular graph whose single cycle visits `order` in sequence.
pub fn cycle_from_order(order: &[NodeId]) -> Result<Graph> {
    let n = order.len();
    if n < 3 || !is_permutation(order) {
        return Err(Error::NotAPermutation(n));
    }
    let edges = (0..n).map(|k| (order[k], order[(k + 1) % n]));
    Graph::new(n, edges)
}

/// Path graph visiting `order` in sequence (cycle without the closing edge).
pub fn path_from_order(order: &[NodeId]) -> Result<Graph> {
    let n = order.len();
    if n < 2 || !is_permutation(order) {
        return Err(Error::NotAPermutation(n));
    }
    Graph::new(n, order.windows(2).map(|w| (w[0], w[1])))
}

pub(crate) fn is_permutation(order: &[NodeId]) -> bool {
    let mut seen = vec![false; order.len()];
    for &v in order {
        if v >= order.len() || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    true
}

/// Complement graph: `(i, j)` present iff absent in `g`.
pub fn complement_graph(g: &Graph) -> Graph {
    let n = g.n_nodes();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if !g.has_edge(i, j) {
                edges.push((i, j));
            }
        }
    }
    Graph::new(n, edges).expect("complement edges are valid")
}

/// True iff `g` shares no edge with `contiguity`.
pub fn is_noncontiguous_wrt(g: &Graph, contiguity: &Graph) -> Result<bool> {
    if g.n_nodes() != contiguity.n_nodes() {
        return Err(Error::NodeCountMismatch(g.n_nodes(), contiguity.n_nodes()));
    }
    Ok(g.edges().all(|(i, j)| !contiguity.has_edge(i, j)))
}

/// The 3×3 graphs used in the small-population illustrations, with the
/// original 1-based unit labels under row-major numbering.
pub mod pinned {
    use super::*;

    /// Converts 1-based labels to node ids.
    pub fn ids(labels: &[usize]) -> Vec<NodeId> {
        labels.iter().map(|&l| l - 1).collect()
    }

    pub const G2_ORDER: [usize; 9] = [1, 4, 7, 8, 9, 6, 3, 2, 5];
    pub const G4_ORDER: [usize; 9] = [3, 9, 2, 8, 4, 6, 7, 5, 1];
    pub const G5_ORDER: [usize; 9] = [1, 3, 8, 4, 6, 2, 9, 7, 5];
    /// The GRTS path: G2 with the edge {1, 5} removed.
    pub const GRTS_PATH_ORDER: [usize; 9] = G2_ORDER;

    pub fn layout() -> GridLayout {
        GridLayout::square(3)
    }

    /// Rook contiguity on the 3×3 grid.
    pub fn g1() -> Graph {
        rook_contiguity(layout())
    }

    /// Circle mostly along contiguous units.
    pub fn g2() -> Graph {
        cycle_from_order(&ids(&G2_ORDER)).unwrap()
    }

    /// Contiguity complement: no contiguous units are adjacent.
    pub fn g3() -> Graph {
        complement_graph(&g1())
    }

    pub fn g4() -> Graph {
        cycle_from_order(&ids(&G4_ORDER)).unwrap()
    }

    pub fn g5() -> Graph {
        cycle_from_order(&ids(&G5_ORDER)).unwrap()
    }

    pub fn grts_path() -> Graph {
        path_from_order(&ids(&GRTS_PATH_ORDER)).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_is_smallest_walkable_graph() {
        let g = Graph::new(3, [(0, 1), (1, 2), (0, 2), (2, 1)]).unwrap();
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.degrees(), vec![2, 2, 2]);
        assert!(g.check_walkable().is_ok());
    }

    #[test]
    fn rejects_loops_and_out_of_range() {
        assert!(matches!(Graph::new(3, [(1, 1)]), Err(Error::LoopEdge(1))));
        assert!(matches!(Graph::new(3, [(0, 3)]), Err(Error::NodeOutOfRange { node: 3, .. })));
    }

    #[test]
    fn single_edge_graph_is_not_walkable() {
        let g = Graph::new(2, [(0, 1)]).unwrap();
        assert!(matches!(g.check_walkable(), Err(Error::DegreeTooSmall { degree: 1, .. })));
    }

    #[test]
    fn rook_3x3() {
        let g = pinned::g1();
        assert_eq!(g.edge_count(), 12);
        assert_eq!(g.degrees(), vec![2, 3, 2, 3, 4, 3, 2, 3, 2]);
        // 12 of 36 pairs are contiguous
        assert_eq!(g.edge_count() * 3, 9 * 8 / 2);
    }

    #[test]
    fn rook_edge_count_formula() {
        for (r, c) in [(2, 2), (3, 5), (20, 20)] {
            let g = rook_contiguity(GridLayout::new(r, c));
            assert_eq!(g.edge_count(), r * (c - 1) + c * (r - 1));
        }
        let g = rook_contiguity(GridLayout::square(2));
        assert_eq!(g.degrees(), vec![2; 4]);
        // explicit enumeration
        let lay = GridLayout::square(20);
        let mut count = 0;
        for a in 0..400 {
            for b in a + 1..400 {
                let (ra, ca) = lay.row_col(a);
                let (rb, cb) = lay.row_col(b);
                if ra.abs_diff(rb) + ca.abs_diff(cb) == 1 {
                    count += 1;
                }
            }
        }
        assert_eq!(count, 760);
        assert_eq!(rook_contiguity(lay).edge_count(), 760);
    }

    #[test]
    fn g4_has_no_contiguous_edge() {
        let g4 = pinned::g4();
        assert!(g4.is_single_cycle());
        let rook = pinned::g1();
        for (i, j) in g4.edges() {
            assert!(!rook.has_edge(i, j), "edge {}-{} is contiguous", i + 1, j + 1);
        }
        assert!(is_noncontiguous_wrt(&g4, &rook).unwrap());
        assert!(!is_noncontiguous_wrt(&rook, &rook).unwrap());
        assert!(is_noncontiguous_wrt(&Graph::empty(9), &rook).unwrap());
        assert!(is_noncontiguous_wrt(&Graph::empty(4), &rook).is_err());
    }

    #[test]
    fn grts_path_drops_one_cycle_edge() {
        let path = pinned::grts_path();
        assert_eq!(path.edge_count(), 8);
        assert!(!path.has_edge(0, 4));
        assert!(pinned::g2().has_edge(0, 4));
    }

    #[test]
    fn cycle_from_order_rejects_non_permutation() {
        assert!(cycle_from_order(&[0, 1, 1]).is_err());
        assert!(cycle_from_order(&[0, 1]).is_err());
        let tri = cycle_from_order(&[0, 1, 2]).unwrap();
        assert_eq!(tri.edge_count(), 3);
    }

    #[test]
    fn complement_of_rook_3x3() {
        let c = complement_graph(&pinned::g1());
        assert_eq!(c.edge_count(), 24);
        assert_eq!(c.degree(0), 6);
        assert_eq!(c.degree(4), 4);
        let k4 = Graph::new(4, (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j)))).unwrap();
        assert_eq!(complement_graph(&k4).edge_count(), 0);
        assert_eq!(complement_graph(&cycle_from_order(&[0, 1, 2]).unwrap()).edge_count(), 0);
    }

    #[test]
    fn cycle_order_walks_the_cycle() {
        let g = pinned::g4();
        let order = g.cycle_order().unwrap();
        assert_eq!(order.len(), 9);
        let back = cycle_from_order(&order).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn edge_list_roundtrip() {
        let g = pinned::g1();
        let text = g.to_edge_list();
        assert!(text.starts_with("9\n1 2\n1 4\n"));
        let back = Graph::read_edge_list(text.as_bytes()).unwrap();
        assert_eq!(back, g);
        assert!(Graph::read_edge_list("3\n1 x\n".as_bytes()).is_err());
        assert!(Graph::read_edge_list("3\n0 1\n".as_bytes()).is_err());
    }
}
