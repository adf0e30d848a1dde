//! Relative efficiency and spatial balance of LPM1 and two designed cycles
//! on a 20×20 grid.
//!
//! cargo run --release --example table2 -- [n] [reps] [graph-seed]

use gss::construct::{build_2regular_recursive, build_g7};
use gss::designs::Design;
use gss::estimators::Estimator;
use gss::graph::{rook_contiguity, GridLayout};
use gss::measures::{expected_ssb, relative_efficiency, Mode};
use gss::population::{sintrend, stylized_grid, Stylized};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gss::Result<()> {
    let args: Vec<u64> = std::env::args().skip(1).map(|a| a.parse().expect("numeric argument")).collect();
    let n = *args.first().unwrap_or(&16) as usize;
    let reps = *args.get(1).unwrap_or(&10_000) as usize;
    let graph_seed = *args.get(2).unwrap_or(&1);

    let layout = GridLayout::square(20);
    let rook = rook_contiguity(layout);
    let mut rng = ChaCha8Rng::seed_from_u64(graph_seed);
    let g6 = build_2regular_recursive(layout, 4, &rook, &mut rng)?;
    let g7 = build_g7(layout, &mut rng)?;

    let base = sintrend(20, n)?;
    let mut columns = vec![("sinTrend".to_string(), base.y.clone())];
    for kind in Stylized::ALL {
        columns.push((kind.to_string(), stylized_grid(kind, 20, 0.5, 5.0)?));
    }

    let designs = [
        ("LPM1", Design::lpm1(&base.coords, &base.pi)?),
        ("G6SS", Design::epsswor(&g6, n)?),
        ("G7SS", Design::epsswor(&g7, n)?),
    ];
    print!("{:<6}", "n=".to_string() + &n.to_string());
    for (name, _) in &columns {
        print!("{name:>10}");
    }
    println!("{:>10}", "ESSB");
    for (k, (name, design)) in designs.iter().enumerate() {
        let est = Estimator::default_for(design)?;
        print!("{name:<6}");
        for (c, (_, y)) in columns.iter().enumerate() {
            let mode = Mode::MonteCarlo { reps, seed: 100 * k as u64 + c as u64 };
            print!("{:>10.3}", relative_efficiency(design, &est, y, mode)?.value);
        }
        let essb = expected_ssb(design, &base.coords, Mode::MonteCarlo { reps: reps.min(2000), seed: 7 })?;
        println!("{:>10.3}", essb.value);
    }
    Ok(())
}
