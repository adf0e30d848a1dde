//! Design measures: contiguity probability, spatial balance, relative
//! efficiency and searches over candidate graphs.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::designs::{sample_space, Design, Sample};
use crate::error::{Error, Result};
use crate::estimators::Estimator;
use crate::graph::{Graph, NodeId};
use crate::rng::stream;

/// Largest exhaustive window law enumerated for GSS sequences.
pub const WINDOW_ENUMERATION_LIMIT: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Mode {
    Exact,
    MonteCarlo { reps: usize, seed: u64 },
}

impl Mode {
    pub fn reps(&self) -> Option<usize> {
        match self {
            Mode::Exact => None,
            Mode::MonteCarlo { reps, .. } => Some(*reps),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => f.write_str("exact"),
            Mode::MonteCarlo { .. } => f.write_str("monte-carlo"),
        }
    }
}

/// A measure value with its standard error (zero when exact).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Measured {
    pub value: f64,
    pub se: f64,
    pub mode: Mode,
}

/// Mean and variance of a statistic under a design.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
    pub se_mean: f64,
    pub se_variance: f64,
    pub mode: Mode,
}

impl Moments {
    pub fn mean(&self) -> Measured {
        Measured { value: self.mean, se: self.se_mean, mode: self.mode }
    }

    pub fn variance(&self) -> Measured {
        Measured { value: self.variance, se: self.se_variance, mode: self.mode }
    }
}

/// Whether [`exact_support`] will enumerate `design`.
pub fn has_exact_support(design: &Design) -> bool {
    match design {
        Design::UnequalGss(g) => {
            let chain = g.chain();
            let branching = if chain.config().r > 0.0 {
                chain.graph().n_nodes()
            } else {
                chain.graph().degrees().into_iter().max().unwrap_or(0) + 1
            };
            let size = (chain.n_states() as f64) * (branching as f64).powi(g.m() as i32 - 1);
            size <= WINDOW_ENUMERATION_LIMIT as f64
        }
        d => d.is_enumerable(),
    }
}

/// Exhaustive law of the samples of `design`, if small enough.
pub fn exact_support(design: &Design) -> Option<Vec<(Sample, f64)>> {
    if !has_exact_support(design) {
        return None;
    }
    match design {
        Design::UnequalGss(g) => Some(
            g.chain().windows(g.m()).into_iter().map(|(w, p)| (Sample::new(w, design.kind()), p)).collect(),
        ),
        d => sample_space(d).ok(),
    }
}

/// Moments of `stat(sample)` exactly or by Monte Carlo. Replicate `k` reads
/// stream `(seed, 0, k)`.
pub fn moments<F>(design: &Design, mode: Mode, stat: F) -> Result<Moments>
where
    F: Fn(&Sample) -> Result<f64> + Sync,
{
    match mode {
        Mode::Exact => {
            let support = exact_support(design).ok_or(Error::NotEnumerable("design has no exact support here"))?;
            let mut mean = 0.0;
            let mut second = 0.0;
            for (s, p) in &support {
                let v = stat(s)?;
                mean += p * v;
                second += p * v * v;
            }
            let total: f64 = support.iter().map(|(_, p)| p).sum();
            mean /= total;
            let variance = (second / total - mean * mean).max(0.0);
            Ok(Moments { mean, variance, se_mean: 0.0, se_variance: 0.0, mode })
        }
        Mode::MonteCarlo { reps, seed } => {
            if reps == 0 {
                return Err(Error::Invalid("Monte Carlo needs at least one replicate".into()));
            }
            let values = (0..reps as u64)
                .into_par_iter()
                .map(|k| {
                    let mut rng = stream(seed, 0, k);
                    let mut s = design.draw(&mut rng)?;
                    s.seed = Some(seed);
                    stat(&s)
                })
                .collect::<Result<Vec<f64>>>()?;
            Ok(monte_carlo_moments(&values, mode))
        }
    }
}

fn monte_carlo_moments(values: &[f64], mode: Mode) -> Moments {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    let m2 = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / k;
    let m4 = values.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / k;
    let variance = if values.len() > 1 { m2 * k / (k - 1.0) } else { 0.0 };
    Moments {
        mean,
        variance,
        se_mean: (variance / k).sqrt(),
        se_variance: ((m4 - m2 * m2).max(0.0) / k).sqrt(),
        mode,
    }
}

/// Whether any two distinct units of `units` are contiguous.
pub fn has_contiguous_pair(units: &[NodeId], contiguity: &Graph) -> bool {
    units.iter().enumerate().any(|(a, &i)| units[a + 1..].iter().any(|&j| i != j && contiguity.has_edge(i, j)))
}

/// Probability that a sample holds at least one contiguous pair of
/// distinct units.
pub fn xi(design: &Design, contiguity: &Graph, mode: Mode) -> Result<Measured> {
    if contiguity.n_nodes() != design.n_units() {
        return Err(Error::NodeCountMismatch(contiguity.n_nodes(), design.n_units()));
    }
    Ok(moments(design, mode, |s| Ok(has_contiguous_pair(&s.distinct(), contiguity) as u8 as f64))?.mean())
}

/// Probability that a sample holds a single distinct unit.
pub fn pr_single_unit(design: &Design, mode: Mode) -> Result<Measured> {
    Ok(moments(design, mode, |s| Ok((s.distinct().len() == 1) as u8 as f64))?.mean())
}

/// Voronoi balance `(1/|s|) Σ_k (v_k - 1)²`, where `v_k` sums `π` over the
/// units nearest to sampled unit `k`; equidistant units split their `π`.
pub fn spatial_balance(units: &[NodeId], pi: &[f64], coords: &[[f64; 2]]) -> Result<f64> {
    if units.is_empty() {
        return Err(Error::Invalid("spatial balance of an empty sample".into()));
    }
    let mut v = vec![0.0; units.len()];
    let mut nearest = Vec::with_capacity(units.len());
    for (i, c) in coords.iter().enumerate() {
        let dist: Vec<f64> = units
            .iter()
            .map(|&k| {
                let dx = c[0] - coords[k][0];
                let dy = c[1] - coords[k][1];
                dx * dx + dy * dy
            })
            .collect();
        let best = dist.iter().copied().fold(f64::INFINITY, f64::min);
        let limit = best * (1.0 + 1e-9) + 1e-300;
        nearest.clear();
        nearest.extend((0..units.len()).filter(|&k| dist[k] <= limit));
        let share = pi[i] / nearest.len() as f64;
        for &k in &nearest {
            v[k] += share;
        }
    }
    Ok(v.iter().map(|x| (x - 1.0).powi(2)).sum::<f64>() / units.len() as f64)
}

/// Expected spatial balance over the distinct units of each sample, using
/// the design's inclusion probabilities.
pub fn expected_ssb(design: &Design, coords: &[[f64; 2]], mode: Mode) -> Result<Measured> {
    let pi = design.inclusion_probs();
    Ok(moments(design, mode, |s| spatial_balance(&s.distinct(), &pi, coords))?.mean())
}

/// `N² (1 - n/N) S² / n`, the variance of the HT total under SRSWoR.
pub fn srswor_ht_variance(y: &[f64], n: usize) -> f64 {
    let big_n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / big_n;
    let s2 = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (big_n - 1.0);
    big_n * big_n * (1.0 - n as f64 / big_n) * s2 / n as f64
}

/// SRSWoR sample size matched to a design: `m` for GSS sequences and `n`
/// otherwise.
pub fn matched_srswor_size(design: &Design) -> usize {
    match design {
        Design::UnequalGss(g) => g.m(),
        d => d.sample_size().round() as usize,
    }
}

/// Variance of the estimator under `design` over the exact SRSWoR HT
/// variance at the matched sample size.
pub fn relative_efficiency(design: &Design, estimator: &Estimator, y: &[f64], mode: Mode) -> Result<Measured> {
    if y.len() != design.n_units() {
        return Err(Error::NodeCountMismatch(y.len(), design.n_units()));
    }
    let reference = srswor_ht_variance(y, matched_srswor_size(design));
    if !(reference > 0.0) {
        return Err(Error::Invalid("SRSWoR variance is zero; relative efficiency undefined".into()));
    }
    let v = moments(design, mode, |s| estimator.estimate(s, y))?.variance();
    Ok(Measured { value: v.value / reference, se: v.se / reference, mode })
}

/// Measures reported for one design.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DesignMeasureReport {
    pub xi: Option<Measured>,
    pub essb: Option<Measured>,
    /// Relative efficiency per named population.
    pub re: Vec<(String, Measured)>,
    pub pr_n1: Option<Measured>,
}

/// Design measure `τ` minimized by [`design_search`]. Each candidate graph
/// is evaluated exactly under EpSSWoR with sample size `n`.
#[derive(Debug, Clone, Copy)]
pub enum SearchMeasure<'a> {
    Xi { n: usize, contiguity: &'a Graph },
    Re { n: usize, y: &'a [f64] },
    Essb { n: usize, coords: &'a [[f64; 2]] },
}

impl SearchMeasure<'_> {
    pub fn name(&self) -> &'static str {
        match self {
            SearchMeasure::Xi { .. } => "xi",
            SearchMeasure::Re { .. } => "re",
            SearchMeasure::Essb { .. } => "essb",
        }
    }

    pub fn evaluate(&self, cycle: &Graph) -> Result<f64> {
        let n = match *self {
            SearchMeasure::Xi { n, .. } | SearchMeasure::Re { n, .. } | SearchMeasure::Essb { n, .. } => n,
        };
        let design = Design::epsswor(cycle, n)?;
        Ok(match *self {
            SearchMeasure::Xi { contiguity, .. } => xi(&design, contiguity, Mode::Exact)?.value,
            SearchMeasure::Re { y, .. } => {
                relative_efficiency(&design, &Estimator::default_for(&design)?, y, Mode::Exact)?.value
            }
            SearchMeasure::Essb { coords, .. } => expected_ssb(&design, coords, Mode::Exact)?.value,
        })
    }
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub best: Graph,
    /// Position of `best` in the candidate stream.
    pub best_index: usize,
    pub value: f64,
    /// Measure of every evaluated candidate, in stream order.
    pub values: Vec<f64>,
}

impl SearchOutcome {
    pub fn evaluated(&self) -> usize {
        self.values.len()
    }
}

/// Evaluates up to `budget` candidates and returns the first minimizer.
pub fn design_search<I>(candidates: I, measure: &SearchMeasure<'_>, budget: usize) -> Result<SearchOutcome>
where
    I: IntoIterator<Item = Graph>,
{
    let pool: Vec<Graph> = candidates.into_iter().take(budget).collect();
    if pool.is_empty() {
        return Err(Error::EmptySearch);
    }
    let values = pool.par_iter().map(|g| measure.evaluate(g)).collect::<Result<Vec<f64>>>()?;
    let mut best_index = 0;
    for (k, &v) in values.iter().enumerate() {
        if v < values[best_index] {
            best_index = k;
        }
    }
    Ok(SearchOutcome { best: pool[best_index].clone(), best_index, value: values[best_index], values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::{enumerate_noncontiguous_cycles, CycleSearch};
    use crate::graph::{pinned, GridLayout};

    #[test]
    fn exact_xi_values() {
        let rook = pinned::g1();
        let v = |d: Design| xi(&d, &rook, Mode::Exact).unwrap().value;
        assert!((v(Design::srswor(9, 2).unwrap()) - 1.0 / 3.0).abs() < 1e-12);
        assert!((v(Design::srswor(9, 3).unwrap()) - 62.0 / 84.0).abs() < 1e-12);
        assert_eq!(v(Design::epsswor(&pinned::g4(), 2).unwrap()), 0.0);
        assert!((v(Design::epsswor(&pinned::g4(), 3).unwrap()) - 4.0 / 9.0).abs() < 1e-12);
        assert!((v(Design::epsswor(&pinned::g5(), 3).unwrap()) - 1.0 / 9.0).abs() < 1e-12);
        let path = pinned::ids(&pinned::GRTS_PATH_ORDER);
        assert!((v(Design::systematic_path(&path, 3).unwrap()) - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn monte_carlo_xi_is_reproducible() {
        let rook = pinned::g1();
        let d = Design::srswor(9, 2).unwrap();
        let mode = Mode::MonteCarlo { reps: 20_000, seed: 7 };
        let a = xi(&d, &rook, mode).unwrap();
        let b = xi(&d, &rook, mode).unwrap();
        assert_eq!(a, b);
        assert!((a.value - 1.0 / 3.0).abs() < 4.0 * a.se);
    }

    #[test]
    fn balance_edge_cases() {
        let coords = GridLayout::square(3).index_coords();
        let all: Vec<usize> = (0..9).collect();
        assert_eq!(spatial_balance(&all, &[1.0; 9], &coords).unwrap(), 0.0);
        assert!((spatial_balance(&[4], &[2.0 / 9.0; 9], &coords).unwrap() - 1.0).abs() < 1e-12);
        assert!(spatial_balance(&[], &[1.0; 9], &coords).is_err());
        // Corner pair: the centre and two edge midpoints sit on the bisector.
        let b = spatial_balance(&[0, 8], &[2.0 / 9.0; 9], &coords).unwrap();
        assert!(b.abs() < 1e-12);
    }

    #[test]
    fn exact_gss_relative_efficiency() {
        let y = [1.0, 2.0, 1.0, 2.0, 3.0, 2.0, 1.0, 2.0, 1.0];
        let d = Design::unequal_gss(&pinned::g4(), &[2.0 / 9.0; 9], 2, Default::default()).unwrap();
        let re = relative_efficiency(&d, &Estimator::default_for(&d).unwrap(), &y, Mode::Exact).unwrap();
        assert!((re.value - 0.857142857).abs() < 1e-6);
        let pr = pr_single_unit(&d, Mode::Exact).unwrap();
        assert_eq!(pr.value, 0.0);
        let d = Design::srswor(9, 2).unwrap();
        let re = relative_efficiency(&d, &Estimator::default_for(&d).unwrap(), &y, Mode::Exact).unwrap();
        assert!((re.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn search_finds_a_ninth() {
        let rook = pinned::g1();
        let stream = enumerate_noncontiguous_cycles(&rook, usize::MAX, CycleSearch::Exhaustive).unwrap();
        let out = design_search(stream, &SearchMeasure::Xi { n: 3, contiguity: &rook }, usize::MAX).unwrap();
        assert_eq!(out.evaluated(), 420);
        assert!(out.value <= 1.0 / 9.0 + 1e-12);
        assert!(matches!(
            design_search(Vec::<Graph>::new(), &SearchMeasure::Xi { n: 3, contiguity: &rook }, 5),
            Err(Error::EmptySearch)
        ));
    }
}
