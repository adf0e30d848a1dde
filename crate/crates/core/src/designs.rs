//! Sampling designs over a finite population of nodes.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{is_permutation, Graph, NodeId};
use crate::walker::{run_walk, ChainOptions, PairChain, StartMode, WalkConfig};

/// Largest support `sample_space` enumerates for SRSWoR.
pub const SRSWOR_ENUMERATION_LIMIT: u128 = 2_000_000;

const PIVOT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DesignKind {
    Srswor,
    SystematicCircular,
    SystematicPath,
    EpsSwor,
    UnequalGss,
    Lpm1,
}

impl DesignKind {
    pub fn name(self) -> &'static str {
        match self {
            DesignKind::Srswor => "srswor",
            DesignKind::SystematicCircular => "systematic_circular",
            DesignKind::SystematicPath => "systematic_path",
            DesignKind::EpsSwor => "epsswor_gss",
            DesignKind::UnequalGss => "unequal_gss",
            DesignKind::Lpm1 => "lpm1",
        }
    }

    /// Whether samples may repeat a unit.
    pub fn with_replacement(self) -> bool {
        self == DesignKind::UnequalGss
    }
}

impl fmt::Display for DesignKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A drawn sample. GSS sequences keep visit order and repeats.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    pub units: Vec<NodeId>,
    pub kind: DesignKind,
    pub seed: Option<u64>,
}

impl Sample {
    pub fn new(units: Vec<NodeId>, kind: DesignKind) -> Self {
        Sample { units, kind, seed: None }
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    /// Sorted distinct units.
    pub fn distinct(&self) -> Vec<NodeId> {
        let mut s = self.units.clone();
        s.sort_unstable();
        s.dedup();
        s
    }
}

/// Unequal-probability GSS: the stationary walk with a calibrated preference
/// vector and exact stationary start.
#[derive(Debug, Clone)]
pub struct GssDesign {
    chain: PairChain,
    pi: Vec<f64>,
    n: f64,
    eta: f64,
    m: usize,
}

impl GssDesign {
    pub fn new(g: &Graph, pi: &[f64], m: usize, overrides: WalkOverrides) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidDesign("GSS sequence length m must be at least 1".into()));
        }
        let n: f64 = pi.iter().sum();
        let (u, eta) = preference_vector(g, pi, n)?;
        let cfg = WalkConfig::new(overrides.r, overrides.w, u)?;
        let chain = PairChain::build(g, &cfg, ChainOptions::default())?;
        Ok(GssDesign { chain, pi: pi.to_vec(), n, eta, m })
    }

    pub fn chain(&self) -> &PairChain {
        &self.chain
    }

    pub fn config(&self) -> &WalkConfig {
        self.chain.config()
    }

    pub fn graph(&self) -> &Graph {
        self.chain.graph()
    }

    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    /// `Σ π`.
    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Sample> {
        let trace = run_walk(self.graph(), self.config(), self.m, StartMode::Stationary(&self.chain), rng)?;
        Ok(Sample::new(trace.states, DesignKind::UnequalGss))
    }
}

/// Walk parameters of [`gss_sequence`]; both default to zero.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct WalkOverrides {
    pub r: f64,
    pub w: f64,
}

/// Local pivotal method with precomputed neighbor orderings.
#[derive(Debug, Clone)]
pub struct Lpm1Design {
    pi: Vec<f64>,
    /// For each unit, the other units with squared distances, nearest first.
    neighbors: Vec<Vec<(NodeId, f64)>>,
}

impl Lpm1Design {
    pub fn new(coords: &[[f64; 2]], pi: &[f64]) -> Result<Self> {
        let n_units = coords.len();
        if pi.len() != n_units {
            return Err(Error::InvalidDesign(format!("{} coordinates for {} probabilities", n_units, pi.len())));
        }
        check_pi(pi)?;
        let total: f64 = pi.iter().sum();
        if (total - total.round()).abs() > 1e-9 {
            return Err(Error::InvalidInclusion(format!("Σπ = {total} is not an integer")));
        }
        let neighbors: Vec<Vec<(NodeId, f64)>> = (0..n_units)
            .map(|i| {
                let mut row: Vec<(NodeId, f64)> = (0..n_units)
                    .filter(|&j| j != i)
                    .map(|j| {
                        let dx = coords[i][0] - coords[j][0];
                        let dy = coords[i][1] - coords[j][1];
                        (j, dx * dx + dy * dy)
                    })
                    .collect();
                row.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
                row
            })
            .collect();
        if neighbors.iter().any(|row| row.first().is_some_and(|&(_, d)| d == 0.0)) {
            return Err(Error::InvalidDesign("LPM1 needs distinct coordinates".into()));
        }
        Ok(Lpm1Design { pi: pi.to_vec(), neighbors })
    }

    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Sample {
        let n_units = self.pi.len();
        let mut p = self.pi.clone();
        let mut undecided: Vec<NodeId> = Vec::with_capacity(n_units);
        let mut slot = vec![usize::MAX; n_units];
        for k in 0..n_units {
            if p[k] > PIVOT_EPS && p[k] < 1.0 - PIVOT_EPS {
                slot[k] = undecided.len();
                undecided.push(k);
            } else {
                p[k] = p[k].round();
            }
        }
        // First position in each neighbor list that may still be undecided.
        let mut cursor = vec![0usize; n_units];
        let mut near_i = Vec::new();
        let mut near_j = Vec::new();

        while undecided.len() > 1 {
            let i = undecided[rng.gen_range(0..undecided.len())];
            self.nearest_undecided(i, &slot, &mut cursor, &mut near_i);
            let j = near_i[rng.gen_range(0..near_i.len())];
            self.nearest_undecided(j, &slot, &mut cursor, &mut near_j);
            if !near_j.contains(&i) {
                continue;
            }
            let (a, b) = pivot(p[i], p[j], rng);
            p[i] = a;
            p[j] = b;
            for k in [i, j] {
                if p[k] <= PIVOT_EPS || p[k] >= 1.0 - PIVOT_EPS {
                    p[k] = p[k].round();
                    let s = slot[k];
                    undecided.swap_remove(s);
                    if s < undecided.len() {
                        slot[undecided[s]] = s;
                    }
                    slot[k] = usize::MAX;
                }
            }
        }
        if let Some(&k) = undecided.first() {
            // Only reachable through rounding; Σπ integral leaves p[k] ∈ {0, 1}.
            p[k] = if rng.gen::<f64>() < p[k] { 1.0 } else { 0.0 };
        }
        let units = (0..n_units).filter(|&k| p[k] == 1.0).collect();
        Sample::new(units, DesignKind::Lpm1)
    }

    fn nearest_undecided(&self, i: NodeId, slot: &[usize], cursor: &mut [usize], out: &mut Vec<NodeId>) {
        out.clear();
        let row = &self.neighbors[i];
        let mut c = cursor[i];
        while slot[row[c].0] == usize::MAX {
            c += 1;
        }
        cursor[i] = c;
        let best = row[c].1;
        let limit = best * (1.0 + 1e-9) + 1e-300;
        for &(j, d) in &row[c..] {
            if d > limit {
                break;
            }
            if slot[j] != usize::MAX {
                out.push(j);
            }
        }
    }
}

/// Pivotal update of a pair; preserves `a + b`.
fn pivot<R: Rng + ?Sized>(a: f64, b: f64, rng: &mut R) -> (f64, f64) {
    let s = a + b;
    if s < 1.0 {
        if rng.gen::<f64>() < b / s {
            (0.0, s)
        } else {
            (s, 0.0)
        }
    } else if rng.gen::<f64>() < (1.0 - b) / (2.0 - s) {
        (1.0, s - 1.0)
    } else {
        (s - 1.0, 1.0)
    }
}

/// A sampling design with validated parameters.
#[derive(Debug, Clone)]
pub enum Design {
    Srswor { n_units: usize, n: usize },
    /// Systematic sampling along `order`; circular with a fractional
    /// interval, or along a path with an integer interval.
    Systematic { order: Vec<NodeId>, n: usize, circular: bool },
    /// `n` consecutive nodes of a Hamiltonian cycle, given as its node order.
    EpsSwor { order: Vec<NodeId>, n: usize },
    UnequalGss(Box<GssDesign>),
    Lpm1(Box<Lpm1Design>),
}

impl Design {
    pub fn srswor(n_units: usize, n: usize) -> Result<Self> {
        if n == 0 || n > n_units {
            return Err(Error::InvalidDesign(format!("SRSWoR needs 1 <= n <= N, got n = {n}, N = {n_units}")));
        }
        Ok(Design::Srswor { n_units, n })
    }

    pub fn systematic_circular(order: &[NodeId], n: usize) -> Result<Self> {
        check_order(order, n)?;
        Ok(Design::Systematic { order: order.to_vec(), n, circular: true })
    }

    pub fn systematic_path(order: &[NodeId], n: usize) -> Result<Self> {
        check_order(order, n)?;
        if !order.len().is_multiple_of(n) {
            return Err(Error::InvalidDesign(format!(
                "a path of {} units cannot always yield systematic samples of size {n}",
                order.len()
            )));
        }
        Ok(Design::Systematic { order: order.to_vec(), n, circular: false })
    }

    pub fn epsswor(cycle: &Graph, n: usize) -> Result<Self> {
        if !cycle.is_single_cycle() {
            return Err(Error::NotACycle);
        }
        let order = cycle.cycle_order()?;
        if n == 0 || n > order.len() {
            return Err(Error::InvalidDesign(format!("need 1 <= n <= N, got n = {n}, N = {}", order.len())));
        }
        Ok(Design::EpsSwor { order, n })
    }

    pub fn unequal_gss(g: &Graph, pi: &[f64], m: usize, overrides: WalkOverrides) -> Result<Self> {
        Ok(Design::UnequalGss(Box::new(GssDesign::new(g, pi, m, overrides)?)))
    }

    pub fn lpm1(coords: &[[f64; 2]], pi: &[f64]) -> Result<Self> {
        Ok(Design::Lpm1(Box::new(Lpm1Design::new(coords, pi)?)))
    }

    pub fn kind(&self) -> DesignKind {
        match self {
            Design::Srswor { .. } => DesignKind::Srswor,
            Design::Systematic { circular: true, .. } => DesignKind::SystematicCircular,
            Design::Systematic { circular: false, .. } => DesignKind::SystematicPath,
            Design::EpsSwor { .. } => DesignKind::EpsSwor,
            Design::UnequalGss(_) => DesignKind::UnequalGss,
            Design::Lpm1(_) => DesignKind::Lpm1,
        }
    }

    pub fn n_units(&self) -> usize {
        match self {
            Design::Srswor { n_units, .. } => *n_units,
            Design::Systematic { order, .. } | Design::EpsSwor { order, .. } => order.len(),
            Design::UnequalGss(d) => d.pi.len(),
            Design::Lpm1(d) => d.pi.len(),
        }
    }

    /// Fixed or expected sample size: `n` for without-replacement designs
    /// and `Σπ` for GSS sequences.
    pub fn sample_size(&self) -> f64 {
        match self {
            Design::Srswor { n, .. } | Design::Systematic { n, .. } | Design::EpsSwor { n, .. } => *n as f64,
            Design::UnequalGss(d) => d.n,
            Design::Lpm1(d) => d.pi.iter().sum::<f64>().round(),
        }
    }

    /// First-order inclusion probabilities the design targets.
    pub fn inclusion_probs(&self) -> Vec<f64> {
        match self {
            Design::UnequalGss(d) => d.pi.clone(),
            Design::Lpm1(d) => d.pi.clone(),
            _ => vec![self.sample_size() / self.n_units() as f64; self.n_units()],
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Sample> {
        Ok(match self {
            Design::Srswor { n_units, n } => srswor(*n_units, *n, rng)?,
            Design::Systematic { order, n, circular: true } => systematic_circular(order, *n, rng)?,
            Design::Systematic { order, n, circular: false } => systematic_path(order, *n, rng)?,
            Design::EpsSwor { order, n } => consecutive_block(order, *n, rng),
            Design::UnequalGss(d) => d.draw(rng)?,
            Design::Lpm1(d) => d.draw(rng),
        })
    }

    pub fn is_enumerable(&self) -> bool {
        match self {
            Design::Srswor { n_units, n } => binomial(*n_units, *n) <= SRSWOR_ENUMERATION_LIMIT,
            Design::Systematic { .. } | Design::EpsSwor { .. } => true,
            Design::UnequalGss(_) | Design::Lpm1(_) => false,
        }
    }
}

fn check_order(order: &[NodeId], n: usize) -> Result<()> {
    if !is_permutation(order) {
        return Err(Error::NotAPermutation(order.len()));
    }
    if n == 0 || n > order.len() {
        return Err(Error::InvalidDesign(format!("need 1 <= n <= N, got n = {n}, N = {}", order.len())));
    }
    Ok(())
}

fn check_pi(pi: &[f64]) -> Result<()> {
    if let Some(k) = pi.iter().position(|&p| !(p > 0.0 && p <= 1.0)) {
        return Err(Error::InvalidInclusion(format!("π[{k}] = {} is outside (0, 1]", pi[k])));
    }
    Ok(())
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i as u128 + 1);
        if acc > u64::MAX as u128 {
            return u128::MAX;
        }
    }
    acc
}

/// Uniform `n`-subset of `0..N`.
pub fn srswor<R: Rng + ?Sized>(n_units: usize, n: usize, rng: &mut R) -> Result<Sample> {
    if n == 0 || n > n_units {
        return Err(Error::InvalidDesign(format!("SRSWoR needs 1 <= n <= N, got n = {n}, N = {n_units}")));
    }
    Ok(Sample::new(index::sample(rng, n_units, n).into_vec(), DesignKind::Srswor))
}

fn circular_positions(n_units: usize, n: usize, v: f64) -> Vec<usize> {
    let step = n_units as f64 / n as f64;
    (0..n).map(|k| ((v + k as f64 * step).floor() as usize) % n_units).collect()
}

/// Fractional-interval systematic sampling around a circle: positions
/// `⌊v + k N/n⌋ mod N` with `v` uniform on `[0, N)`.
pub fn systematic_circular<R: Rng + ?Sized>(order: &[NodeId], n: usize, rng: &mut R) -> Result<Sample> {
    check_order(order, n)?;
    let v = rng.gen_range(0.0..order.len() as f64);
    let units = circular_positions(order.len(), n, v).into_iter().map(|k| order[k]).collect();
    Ok(Sample::new(units, DesignKind::SystematicCircular))
}

/// Systematic sampling along a path with integer interval `N/n`.
pub fn systematic_path<R: Rng + ?Sized>(order: &[NodeId], n: usize, rng: &mut R) -> Result<Sample> {
    if let Design::Systematic { order, n, .. } = Design::systematic_path(order, n)? {
        let step = order.len() / n;
        let start = rng.gen_range(0..step);
        let units = (0..n).map(|k| order[start + k * step]).collect();
        return Ok(Sample::new(units, DesignKind::SystematicPath));
    }
    unreachable!()
}

fn consecutive_block<R: Rng + ?Sized>(order: &[NodeId], n: usize, rng: &mut R) -> Sample {
    let n_units = order.len();
    let start = rng.gen_range(0..n_units);
    let forward = rng.gen_bool(0.5);
    let units = (0..n)
        .map(|k| if forward { order[(start + k) % n_units] } else { order[(start + n_units - k) % n_units] })
        .collect();
    Sample::new(units, DesignKind::EpsSwor)
}

/// EpSSWoR: `n` consecutive nodes of a connected 2-regular graph from a
/// uniform start in a uniform direction.
pub fn epsswor_gss<R: Rng + ?Sized>(cycle: &Graph, n: usize, rng: &mut R) -> Result<Sample> {
    match Design::epsswor(cycle, n)? {
        Design::EpsSwor { order, n } => Ok(consecutive_block(&order, n, rng)),
        _ => unreachable!(),
    }
}

/// Preference vector `u_i = π_i / (n d_i η)` with `η = (1/n) Σ π_i / d_i`.
pub fn preference_vector(g: &Graph, pi: &[f64], n: f64) -> Result<(Vec<f64>, f64)> {
    if pi.len() != g.n_nodes() {
        return Err(Error::NodeCountMismatch(pi.len(), g.n_nodes()));
    }
    check_pi(pi)?;
    let total: f64 = pi.iter().sum();
    if (total - n).abs() > 1e-9 {
        return Err(Error::InvalidInclusion(format!("Σπ = {total} differs from n = {n}")));
    }
    if let Some(k) = (0..g.n_nodes()).find(|&k| g.degree(k) == 0) {
        return Err(Error::DegreeTooSmall { node: k, degree: 0 });
    }
    let eta = pi.iter().enumerate().map(|(k, &p)| p / g.degree(k) as f64).sum::<f64>() / n;
    let mut u: Vec<f64> = pi.iter().enumerate().map(|(k, &p)| p / (n * g.degree(k) as f64 * eta)).collect();
    let s: f64 = u.iter().sum();
    u.iter_mut().for_each(|x| *x /= s);
    Ok((u, eta))
}

/// Ordered `m`-sequence from the stationary walk targeting `π / n`.
pub fn gss_sequence<R: Rng + ?Sized>(
    g: &Graph,
    pi: &[f64],
    m: usize,
    overrides: WalkOverrides,
    rng: &mut R,
) -> Result<Sample> {
    GssDesign::new(g, pi, m, overrides)?.draw(rng)
}

/// LPM1 over the given coordinates.
pub fn lpm1<R: Rng + ?Sized>(coords: &[[f64; 2]], pi: &[f64], rng: &mut R) -> Result<Sample> {
    Ok(Lpm1Design::new(coords, pi)?.draw(rng))
}

/// Exhaustive support of an enumerable design as sorted unit sets with
/// their probabilities.
pub fn sample_space(design: &Design) -> Result<Vec<(Sample, f64)>> {
    let kind = design.kind();
    let mut support: BTreeMap<Vec<NodeId>, f64> = BTreeMap::new();
    let mut add = |mut units: Vec<NodeId>, p: f64| {
        units.sort_unstable();
        *support.entry(units).or_insert(0.0) += p;
    };
    match design {
        Design::Srswor { n_units, n } => {
            let count = binomial(*n_units, *n);
            if count > SRSWOR_ENUMERATION_LIMIT {
                return Err(Error::NotEnumerable("SRSWoR support too large"));
            }
            let p = 1.0 / count as f64;
            let mut comb: Vec<usize> = (0..*n).collect();
            loop {
                add(comb.clone(), p);
                let Some(k) = (0..*n).rev().find(|&k| comb[k] < n_units - n + k) else { break };
                comb[k] += 1;
                for t in k + 1..*n {
                    comb[t] = comb[t - 1] + 1;
                }
            }
        }
        Design::Systematic { order, n, circular: true } => {
            // Breakpoints of v lie on the grid 1/n, so the midpoint of each
            // cell of that grid determines the sample.
            let cells = order.len() * n;
            let p = 1.0 / cells as f64;
            for a in 0..cells {
                let v = (a as f64 + 0.5) / *n as f64;
                add(circular_positions(order.len(), *n, v).into_iter().map(|k| order[k]).collect(), p);
            }
        }
        Design::Systematic { order, n, circular: false } => {
            let step = order.len() / n;
            for start in 0..step {
                add((0..*n).map(|k| order[start + k * step]).collect(), 1.0 / step as f64);
            }
        }
        Design::EpsSwor { order, n } => {
            let n_units = order.len();
            let p = 0.5 / n_units as f64;
            for start in 0..n_units {
                add((0..*n).map(|k| order[(start + k) % n_units]).collect(), p);
                add((0..*n).map(|k| order[(start + n_units - k) % n_units]).collect(), p);
            }
        }
        Design::UnequalGss(_) => return Err(Error::NotEnumerable("GSS sequence")),
        Design::Lpm1(_) => return Err(Error::NotEnumerable("LPM1")),
    }
    Ok(support.into_iter().map(|(units, p)| (Sample::new(units, kind), p)).collect())
}
