//! Stationary node law of the walk on the 3×3 rook grid, closed form
//! against power iteration, with the balance-identity residuals.
//!
//! cargo run --example stationary -- [r] [w]

use gss::graph::pinned;
use gss::walker::{build_pair_chain, flow_residuals, WalkConfig};

fn main() -> gss::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).map(|a| a.parse().expect("numeric argument")).collect();
    let r = *args.first().unwrap_or(&0.0);
    let w = *args.get(1).unwrap_or(&0.0);

    let g = pinned::g1();
    // u_h ∝ 1/(d_h + r) makes the closed form uniform.
    let raw: Vec<f64> = (0..9).map(|h| 1.0 / (g.degree(h) as f64 + r)).collect();
    let z: f64 = raw.iter().sum();
    let cfg = WalkConfig::new(r, w, raw.iter().map(|x| x / z).collect())?;
    let chain = build_pair_chain(&g, &cfg)?;

    println!("node  closed-form   iterated");
    for (h, (a, b)) in chain.closed_form_node().iter().zip(chain.stationary_node()).enumerate() {
        println!("{:>4}  {a:>11.6}  {b:>9.6}", h + 1);
    }
    let f = flow_residuals(&chain);
    println!("max deviation {:.2e}", chain.closed_form_deviation());
    println!("residuals: mixed {:.2e}, forward {:.2e}, triples {:.2e}, inflow {:.2e}", f.mixed, f.forward_through, f.jump_triples, f.edge_inflow);
    println!("Pr(n=1) for m=2: {:.4}", chain.prob_single_distinct());
    Ok(())
}
