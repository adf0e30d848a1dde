//! Horvitz-Thompson, walk-average and tie-based estimates of a total on a
//! small cycle, compared with their exact expectations.

use gss::designs::{sample_space, Design, WalkOverrides};
use gss::estimators::{horvitz_thompson, tie_probability, yhat_w, Estimator, EstimatorKind};
use gss::graph::cycle_from_order;
use gss::measures::{exact_support, moments, Mode};
use gss::walker::ties_in;

fn main() -> gss::Result<()> {
    let g = cycle_from_order(&[0, 1, 2, 3, 4])?;
    let y = [1.0, 4.0, 2.0, 5.0, 2.5];
    let pi = [0.3, 0.4, 0.5, 0.4, 0.4];
    println!("Y = {}", y.iter().sum::<f64>());

    let eps = Design::epsswor(&g, 2)?;
    let ht: f64 = sample_space(&eps)?
        .iter()
        .map(|(s, p)| p * horvitz_thompson(&s.units, &y, &eps.inclusion_probs()).unwrap())
        .sum();
    println!("EpSSWoR n=2, E[HT] = {ht:.6}");

    let gss = Design::unequal_gss(&g, &pi, 6, WalkOverrides { r: 0.2, w: 0.0 })?;
    let Design::UnequalGss(inner) = &gss else { unreachable!() };
    let w = moments(&gss, Mode::Exact, |s| Ok(yhat_w(&s.units, &y, &pi, 2.0)))?;
    println!("walk m=6, E[Y_W] = {:.6}, sd {:.4}", w.mean, w.variance.sqrt());

    // Y_H needs at least one tie in the window; condition on that.
    let h = Estimator::new(EstimatorKind::YhatH, &gss)?;
    let (mut mass, mut sum) = (0.0, 0.0);
    for (s, p) in exact_support(&gss).expect("small chain") {
        if !ties_in(&s.units).is_empty() {
            mass += p;
            sum += p * h.estimate(&s, &y)?;
        }
    }
    println!("walk m=6, Pr(ties) = {mass:.4}, E[Y_H | ties] = {:.6}", sum / mass);
    for order in 1..=3 {
        let p: Vec<String> = (0..5).map(|v| format!("{:.4}", tie_probability(inner.chain(), v, order).unwrap())).collect();
        println!("tie order {order}: [{}]", p.join(", "));
    }
    Ok(())
}
