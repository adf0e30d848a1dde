//! Local pivotal sampling on a 20×20 grid: inclusion frequencies and
//! spatial balance against simple random sampling.

use gss::designs::Design;
use gss::measures::{expected_ssb, Mode};
use gss::population::sintrend;
use gss::rng::stream;

fn main() -> gss::Result<()> {
    let pop = sintrend(20, 16)?;
    let lpm = Design::lpm1(&pop.coords, &pop.pi)?;
    let reps = 2000;
    let mut hits = vec![0usize; pop.n_units()];
    for k in 0..reps {
        for u in lpm.draw(&mut stream(3, 0, k))?.units {
            hits[u] += 1;
        }
    }
    let freq: Vec<f64> = hits.iter().map(|&h| h as f64 / reps as f64).collect();
    let (lo, hi) = freq.iter().fold((1.0f64, 0.0f64), |(a, b), &f| (a.min(f), b.max(f)));
    println!("target pi {:.3}, empirical range [{lo:.3}, {hi:.3}] over {reps} draws", pop.pi[0]);

    let mode = Mode::MonteCarlo { reps: 1000, seed: 5 };
    let srs = Design::srswor(pop.n_units(), 16)?;
    println!("ESSB lpm1   {:.3}", expected_ssb(&lpm, &pop.coords, mode)?.value);
    println!("ESSB srswor {:.3}", expected_ssb(&srs, &pop.coords, mode)?.value);
    Ok(())
}
