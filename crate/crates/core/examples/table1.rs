//! Relative efficiency of LPM1 and walk sampling on five graphs over the
//! 3×3 stylized populations, plus the chance of a single distinct unit.
//!
//! cargo run --release --example table1 -- [reps]

use gss::harness::commands::{bundled_config, simulate, Overrides};

fn main() -> gss::Result<()> {
    let reps = std::env::args().nth(1).map(|a| a.parse().expect("replicate count"));
    let cfg = bundled_config("t1")?;
    let report = simulate(cfg, &Overrides { reps, ..Default::default() })?;
    println!("{}", report.table("re"));
    println!("{}", report.table("pr_n1"));
    Ok(())
}
