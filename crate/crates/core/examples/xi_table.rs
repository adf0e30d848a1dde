//! Probability of selecting at least one contiguous pair on the 3×3 grid.

use gss::designs::Design;
use gss::graph::{pinned, GridLayout};
use gss::measures::{xi, Mode};
use gss::population::equal_probs;

fn main() -> gss::Result<()> {
    let rook = pinned::g1();
    let path = pinned::ids(&pinned::GRTS_PATH_ORDER);
    let coords = GridLayout::square(3).index_coords();

    println!("{:<22}{:>8}{:>8}", "design", "n=2", "n=3");
    let row = |name: &str, f: &dyn Fn(usize) -> gss::Result<Design>| -> gss::Result<()> {
        let exact = |n| -> gss::Result<String> {
            Ok(match f(n) {
                Ok(d) => format!("{:.4}", xi(&d, &rook, Mode::Exact)?.value),
                Err(_) => "-".into(),
            })
        };
        println!("{name:<22}{:>8}{:>8}", exact(2)?, exact(3)?);
        Ok(())
    };
    row("SRSWoR", &|n| Design::srswor(9, n))?;
    for (name, g) in [("G4 EpSSWoR", pinned::g4()), ("G5 EpSSWoR", pinned::g5())] {
        row(name, &|n| Design::epsswor(&g, n))?;
    }
    row("systematic on path", &|n| Design::systematic_path(&path, n))?;

    for n in [2, 3] {
        let d = Design::lpm1(&coords, &equal_probs(9, n as f64))?;
        let v = xi(&d, &rook, Mode::MonteCarlo { reps: 10_000, seed: 1 })?;
        println!("LPM1 n={n}: {:.3} (se {:.3})", v.value, v.se);
    }
    Ok(())
}
