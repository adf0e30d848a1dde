//! Exhaustive search over the Hamiltonian cycles of the 3×3 grid that
//! avoid rook contiguity, minimizing the contiguous-pair probability.
//!
//! cargo run --release --example design_search -- [n]

use gss::enumerate::{enumerate_noncontiguous_cycles, CycleSearch};
use gss::graph::{rook_contiguity, GridLayout};
use gss::measures::{design_search, SearchMeasure};

fn main() -> gss::Result<()> {
    let n: usize = std::env::args().nth(1).map_or(3, |a| a.parse().expect("sample size"));
    let rook = rook_contiguity(GridLayout::square(3));
    let candidates = enumerate_noncontiguous_cycles(&rook, usize::MAX, CycleSearch::Exhaustive)?;
    let measure = SearchMeasure::Xi { n, contiguity: &rook };
    let out = design_search(candidates, &measure, usize::MAX)?;

    let hits = out.values.iter().filter(|&&v| (v - out.value).abs() < 1e-12).count();
    println!("{} cycles evaluated, best xi = {:.4} ({hits} attain it)", out.evaluated(), out.value);
    let order: Vec<String> = out.best.cycle_order()?.iter().map(|v| (v + 1).to_string()).collect();
    println!("first best cycle: ({})", order.join(","));
    print!("{}", out.best.to_edge_list());
    Ok(())
}
