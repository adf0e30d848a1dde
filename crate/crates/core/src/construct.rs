//! Designed 2-regular graphs for large grids.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{cycle_from_order, Graph, GridLayout, NodeId};

const MAX_RETRIES: usize = 10_000;

/// Square partition of a grid into `parts_per_side²` equal rectangular parts.
///
/// Parts are numbered by recursive quadrants (Z order) when `parts_per_side`
/// is a power of two and row-major otherwise. Each unit also carries a
/// label: its position inside its part, numbered the same way.
#[derive(Debug, Clone)]
pub struct Partition {
    pub layout: GridLayout,
    pub parts_per_side: usize,
    pub part_rows: usize,
    pub part_cols: usize,
    part_of: Vec<usize>,
    label_of: Vec<usize>,
}

fn quadrant_index(row: usize, col: usize, rows: usize, cols: usize) -> usize {
    if rows == cols && rows.is_power_of_two() {
        let mut idx = 0;
        let bits = rows.trailing_zeros();
        for b in (0..bits).rev() {
            idx = idx * 4 + ((row >> b) & 1) * 2 + ((col >> b) & 1);
        }
        idx
    } else {
        row * cols + col
    }
}

impl Partition {
    pub fn new(layout: GridLayout, parts_per_side: usize) -> Result<Self> {
        if parts_per_side == 0
            || !layout.rows.is_multiple_of(parts_per_side)
            || !layout.cols.is_multiple_of(parts_per_side)
        {
            return Err(Error::Invalid(format!(
                "{}x{} grid is not divisible into {p}x{p} parts",
                layout.rows,
                layout.cols,
                p = parts_per_side
            )));
        }
        let part_rows = layout.rows / parts_per_side;
        let part_cols = layout.cols / parts_per_side;
        let mut part_of = Vec::with_capacity(layout.n_nodes());
        let mut label_of = Vec::with_capacity(layout.n_nodes());
        for v in 0..layout.n_nodes() {
            let (r, c) = layout.row_col(v);
            part_of.push(quadrant_index(r / part_rows, c / part_cols, parts_per_side, parts_per_side));
            label_of.push(quadrant_index(r % part_rows, c % part_cols, part_rows, part_cols));
        }
        Ok(Partition { layout, parts_per_side, part_rows, part_cols, part_of, label_of })
    }

    pub fn n_parts(&self) -> usize {
        self.parts_per_side * self.parts_per_side
    }

    pub fn part_size(&self) -> usize {
        self.part_rows * self.part_cols
    }

    pub fn part_of(&self, node: NodeId) -> usize {
        self.part_of[node]
    }

    pub fn label_of(&self, node: NodeId) -> usize {
        self.label_of[node]
    }

    /// Units of each part, indexed by part number, each list ordered by label.
    pub fn groups_by_part(&self) -> Vec<Vec<NodeId>> {
        self.group(|v| (self.part_of[v], self.label_of[v]), self.n_parts(), self.part_size())
    }

    /// Units sharing each within-part label, indexed by label, each list
    /// ordered by part number. Every group holds one unit per part.
    pub fn groups_by_label(&self) -> Vec<Vec<NodeId>> {
        self.group(|v| (self.label_of[v], self.part_of[v]), self.part_size(), self.n_parts())
    }

    fn group(&self, key: impl Fn(NodeId) -> (usize, usize), outer: usize, inner: usize) -> Vec<Vec<NodeId>> {
        let mut groups = vec![vec![usize::MAX; inner]; outer];
        for v in 0..self.layout.n_nodes() {
            let (a, b) = key(v);
            groups[a][b] = v;
        }
        groups
    }

    /// Grid position `(row, col)` of a part.
    fn part_position(&self, part: usize) -> (usize, usize) {
        let v = self.groups_by_part()[part][0];
        let (r, c) = self.layout.row_col(v);
        (r / self.part_rows, c / self.part_cols)
    }
}

/// Node ids grouped by within-part label; see [`Partition::groups_by_label`].
pub fn recursive_partition_order(layout: GridLayout, parts_per_side: usize) -> Result<Vec<Vec<NodeId>>> {
    Ok(Partition::new(layout, parts_per_side)?.groups_by_label())
}

/// Builds a Hamiltonian cycle whose edges avoid `contiguity`, by chaining
/// same-label units across parts.
///
/// A single random part order is shared by every label class and the label
/// classes are visited in label order. Any run of `n_parts` consecutive
/// cycle nodes therefore holds exactly one unit from every part.
pub fn build_2regular_recursive<R: Rng + ?Sized>(
    layout: GridLayout,
    parts_per_side: usize,
    contiguity: &Graph,
    rng: &mut R,
) -> Result<Graph> {
    let partition = Partition::new(layout, parts_per_side)?;
    if contiguity.n_nodes() != layout.n_nodes() {
        return Err(Error::NodeCountMismatch(contiguity.n_nodes(), layout.n_nodes()));
    }
    if parts_per_side < 2 || partition.part_rows < 2 || partition.part_cols < 2 {
        return Err(Error::ConstructionFailed {
            retries: 0,
            reason: format!(
                "parts of {}x{} units cannot separate same-label units",
                partition.part_rows, partition.part_cols
            ),
        });
    }
    let by_label = partition.groups_by_label();
    let positions: Vec<_> = (0..partition.n_parts()).map(|p| partition.part_position(p)).collect();
    let mut parts: Vec<usize> = (0..partition.n_parts()).collect();

    for _ in 0..MAX_RETRIES {
        parts.shuffle(rng);
        let (first, last) = (positions[parts[0]], positions[*parts.last().unwrap()]);
        if first.0.abs_diff(last.0) + first.1.abs_diff(last.1) == 1 {
            continue;
        }
        let order: Vec<NodeId> = (0..partition.part_size())
            .flat_map(|l| parts.iter().map(move |&p| (l, p)))
            .map(|(l, p)| by_label[l][p])
            .collect();
        let n = order.len();
        if (0..n).all(|k| !contiguity.has_edge(order[k], order[(k + 1) % n])) {
            return cycle_from_order(&order);
        }
    }
    Err(Error::ConstructionFailed {
        retries: MAX_RETRIES,
        reason: "no non-contiguous chaining found".into(),
    })
}

/// Point-reflection graph on an even square grid.
///
/// Each unit `(r, c)` is joined to `(L-1-r, L-1-c)`. Units of the top-left
/// quadrant are matched with the bottom-left quadrant and top-right with
/// bottom-right. The matchings are drawn uniformly among those that close the
/// graph into a single cycle.
pub fn build_g7<R: Rng + ?Sized>(layout: GridLayout, rng: &mut R) -> Result<Graph> {
    let side = layout.rows;
    if layout.rows != layout.cols || !side.is_multiple_of(2) || side == 0 {
        return Err(Error::Invalid(format!(
            "point-reflection graph needs an even square grid, got {}x{}",
            layout.rows, layout.cols
        )));
    }
    let half = side / 2;
    let reflect = |v: NodeId| {
        let (r, c) = layout.row_col(v);
        layout.id_of(side - 1 - r, side - 1 - c)
    };
    let quadrant = |r0: usize, c0: usize| -> Vec<NodeId> {
        (r0..r0 + half)
            .flat_map(|r| (c0..c0 + half).map(move |c| (r, c)))
            .map(|(r, c)| layout.id_of(r, c))
            .collect()
    };
    let top_left = quadrant(0, 0);
    let bottom_left = quadrant(half, 0);
    let top_right = quadrant(0, half);
    let mut bottom_right = quadrant(half, half);

    // Right halves: uniform random matching.
    bottom_right.shuffle(rng);
    let mut right_match = vec![usize::MAX; layout.n_nodes()];
    for (&a, &b) in top_right.iter().zip(&bottom_right) {
        right_match[a] = b;
        right_match[b] = a;
    }

    // Left halves: pick a uniformly random cyclic order of the top-left units
    // and solve for the matching that realises it. Going TL -> BR -> TR -> BL
    // lands on `land(x)`, which must be matched to the successor of `x`.
    let mut cyc = top_left.clone();
    cyc.shuffle(rng);
    let mut edges: Vec<(NodeId, NodeId)> = Vec::with_capacity(layout.n_nodes());
    for k in 0..cyc.len() {
        let x = cyc[k];
        let land = reflect(right_match[reflect(x)]);
        debug_assert!(bottom_left.contains(&land));
        edges.push((land, cyc[(k + 1) % cyc.len()]));
    }
    for &a in &top_right {
        edges.push((a, right_match[a]));
    }
    for v in 0..layout.n_nodes() {
        let w = reflect(v);
        if v < w {
            edges.push((v, w));
        }
    }
    let g = Graph::new(layout.n_nodes(), edges)?;
    debug_assert!(g.is_single_cycle());
    Ok(g)
}
