//! Several independent walks on one graph give a variance estimate from
//! the spread of their per-walk estimates.
//!
//! cargo run --release --example multi_walk -- [walks] [m]

use gss::designs::preference_vector;
use gss::estimators::multi_walk;
use gss::graph::{rook_contiguity, GridLayout};
use gss::population::stylized_population;
use gss::rng::stream;
use gss::walker::{build_pair_chain, run_walk, StartMode, WalkConfig};
use gss::population::Stylized;

fn main() -> gss::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).map(|a| a.parse().expect("integer argument")).collect();
    let walks = *args.first().unwrap_or(&8);
    let m = *args.get(1).unwrap_or(&25);

    let pop = stylized_population(Stylized::Corner, 10, 0.5, 5.0, 10)?;
    let g = rook_contiguity(GridLayout::square(10));
    let (u, _) = preference_vector(&g, &pop.pi, pop.expected_size())?;
    let cfg = WalkConfig::new(0.5, 1.0, u)?;
    let chain = build_pair_chain(&g, &cfg)?;
    let traces = (0..walks as u64)
        .map(|k| run_walk(&g, &cfg, m, StartMode::Stationary(&chain), &mut stream(9, 0, k)))
        .collect::<gss::Result<Vec<_>>>()?;
    let est = multi_walk(&traces, &pop.y, &pop.pi, pop.expected_size())?;
    let se = est.variance_estimate.unwrap_or(0.0).sqrt();
    println!("Y = {:.2}", pop.total());
    println!("{} walks of m = {}: estimate {:.2}, se {:.2}", est.walks, est.m, est.estimate, se);
    Ok(())
}
