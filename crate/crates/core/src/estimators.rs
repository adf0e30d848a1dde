//! Estimators of the population total.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::designs::{Design, Sample};
use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::walker::{ties_in, PairChain, Tie, WalkTrace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    HorvitzThompson,
    YhatW,
    YhatH,
}

impl EstimatorKind {
    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::HorvitzThompson => "ht",
            EstimatorKind::YhatW => "yhat_w",
            EstimatorKind::YhatH => "yhat_h",
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    pub estimate: f64,
    pub estimator: EstimatorKind,
    /// Between-walk variance of the mean; multi-walk mode only.
    pub variance_estimate: Option<f64>,
    pub walks: usize,
    pub m: usize,
}

/// `Σ_{i∈s} y_i / π_i` over distinct units.
pub fn horvitz_thompson(units: &[NodeId], y: &[f64], pi: &[f64]) -> Result<f64> {
    units.iter().try_fold(0.0, |acc, &k| {
        let p = pi[k];
        if !(p > 0.0) {
            return Err(Error::InvalidInclusion(format!("sampled unit {k} has π = {p}")));
        }
        Ok(acc + y[k] / p)
    })
}

/// `(n/m) Σ_j y_{X_j} / π_{X_j}`, counting repeated visits.
pub fn yhat_w(states: &[NodeId], y: &[f64], pi: &[f64], n: f64) -> f64 {
    let m = states.len() as f64;
    n / m * states.iter().map(|&k| y[k] / pi[k]).sum::<f64>()
}

/// The three printed forms of `Ŷ_W`: with `p = π/n`, `(1/m) Σ y/p`;
/// `(n/m) Σ y/π`; and the indicator expansion over all units.
pub fn yhat_w_forms(states: &[NodeId], y: &[f64], pi: &[f64], n: f64) -> [f64; 3] {
    let m = states.len() as f64;
    let p: Vec<f64> = pi.iter().map(|&x| x / n).collect();
    let first = states.iter().map(|&k| y[k] / p[k]).sum::<f64>() / m;
    let second = yhat_w(states, y, pi, n);
    let third = states
        .iter()
        .map(|&x| (0..y.len()).filter(|&i| i == x).map(|i| y[i] / p[i]).sum::<f64>())
        .sum::<f64>()
        / m;
    [first, second, third]
}

/// Closed-form transition quantities around node `h` for a walk with
/// `w = 0`. Entries involving `h` itself in `move_prob` are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TieQuantities {
    pub node: NodeId,
    /// `A_h = Σ_{j∈ν_h} min(u_j / u_h, 1)`.
    pub a_h: f64,
    /// `p_(hh)h`.
    pub stay_again: f64,
    /// `p_(ih)h` indexed by `i`; entry `h` is `p_(hh)h`.
    pub stay_from: Vec<f64>,
    /// `p_(ih)j` indexed `[i][j]` for `i, j ≠ h`.
    pub move_prob: Vec<Vec<f64>>,
}

pub fn tie_transition_quantities(chain: &PairChain, h: NodeId) -> Result<TieQuantities> {
    let g = chain.graph();
    let cfg = chain.config();
    if cfg.w != 0.0 {
        return Err(Error::InvalidConfig(format!("tie formulas assume w = 0, got w = {}", cfg.w)));
    }
    let n = g.n_nodes();
    if h >= n {
        return Err(Error::NodeOutOfRange { node: h, n_nodes: n });
    }
    let (r, u) = (cfg.r, &cfg.u);
    let d = g.degree(h) as f64;
    let acc = |j: NodeId| (u[j] / u[h]).min(1.0);
    let a_h: f64 = g.neighbors(h).iter().map(|&j| acc(j)).sum();
    let jump_home = r * u[h] / (d + r);
    let stay_again = (r * u[h] + d - a_h) / (d + r);
    let stay_from = (0..n)
        .map(|i| {
            if i == h {
                stay_again
            } else if g.has_edge(i, h) {
                jump_home + d / (d + r) * (1.0 - (a_h - acc(i)) / (d - 1.0))
            } else {
                jump_home + (d - a_h) / (d + r)
            }
        })
        .collect();
    let move_prob = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == h || j == h {
                        return 0.0;
                    }
                    let jump = r * u[j] / (d + r);
                    let walk = if !g.has_edge(h, j) || i == j {
                        0.0
                    } else if !g.has_edge(h, i) {
                        acc(j) / (d + r)
                    } else {
                        d / (d - 1.0) * acc(j) / (d + r)
                    };
                    jump + walk
                })
                .collect()
        })
        .collect();
    Ok(TieQuantities { node: h, a_h, stay_again, stay_from, move_prob })
}

/// Stationary probability that a given window stretch is a tie of
/// `order` at `h`.
pub fn tie_probability(chain: &PairChain, h: NodeId, order: usize) -> Result<f64> {
    if order == 0 {
        return Err(Error::Invalid("tie order must be at least 1".into()));
    }
    let q = tie_transition_quantities(chain, h)?;
    let n = chain.graph().n_nodes();
    let others = (0..n).filter(|&i| i != h);
    Ok(if order == 1 {
        others
            .map(|i| chain.pair_prob(i, h) * (0..n).filter(|&j| j != h).map(|j| q.move_prob[i][j]).sum::<f64>())
            .sum()
    } else {
        let tail = q.stay_again.powi(order as i32 - 2) * (1.0 - q.stay_again);
        others.map(|i| chain.pair_prob(i, h) * q.stay_from[i]).sum::<f64>() * tail
    })
}

/// Tie probabilities normalized over nodes, per order.
#[derive(Debug, Clone)]
pub struct TieTable {
    /// `pbar[order - 1][h]`; a row of zeros where no tie of that order can occur.
    pbar: Vec<Vec<f64>>,
}

impl TieTable {
    pub fn new(chain: &PairChain, max_order: usize) -> Result<Self> {
        let n = chain.graph().n_nodes();
        let pbar = (1..=max_order)
            .map(|order| {
                let raw = (0..n).map(|h| tie_probability(chain, h, order)).collect::<Result<Vec<f64>>>()?;
                let z: f64 = raw.iter().sum();
                Ok(if z > 0.0 { raw.into_iter().map(|p| p / z).collect() } else { vec![0.0; n] })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TieTable { pbar })
    }

    pub fn max_order(&self) -> usize {
        self.pbar.len()
    }

    pub fn pbar(&self, h: NodeId, order: usize) -> f64 {
        self.pbar[order - 1][h]
    }
}

/// `Ŷ_H = (1/n_m) Σ_{ties} y_h / p̄`, with `p̄` normalized among ties of
/// the same order.
pub fn yhat_h(ties: &[Tie], y: &[f64], table: &TieTable) -> Result<f64> {
    if ties.is_empty() {
        return Err(Error::Invalid("no ties in the window".into()));
    }
    let mut sum = 0.0;
    for t in ties {
        let order = t.order();
        if order > table.max_order() {
            return Err(Error::Invalid(format!("tie of order {order} exceeds table order {}", table.max_order())));
        }
        let row = &table.pbar[order - 1];
        if let Some(node) = row.iter().position(|&p| p <= 0.0) {
            return Err(Error::ZeroTieProbability { node, order });
        }
        sum += y[t.node] / row[t.node];
    }
    Ok(sum / ties.len() as f64)
}

/// Mean of per-walk `Ŷ_W` with the between-walk variance of that mean.
pub fn multi_walk(traces: &[WalkTrace], y: &[f64], pi: &[f64], n: f64) -> Result<EstimateReport> {
    if traces.len() < 2 {
        return Err(Error::Invalid(format!("multi-walk estimation needs at least 2 walks, got {}", traces.len())));
    }
    let values: Vec<f64> = traces.iter().map(|t| yhat_w(&t.states, y, pi, n)).collect();
    let (mean, var) = mean_and_variance(&values);
    Ok(EstimateReport {
        estimate: mean,
        estimator: EstimatorKind::YhatW,
        variance_estimate: Some(var / values.len() as f64),
        walks: traces.len(),
        m: traces[0].m(),
    })
}

/// Mean and unbiased sample variance.
pub fn mean_and_variance(values: &[f64]) -> (f64, f64) {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    let var = if values.len() > 1 { values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0) } else { 0.0 };
    (mean, var)
}

/// An estimator ready to apply to samples of one design.
#[derive(Debug, Clone)]
pub enum Estimator {
    HorvitzThompson { pi: Vec<f64> },
    YhatW { pi: Vec<f64>, n: f64 },
    YhatH { table: TieTable },
}

impl Estimator {
    /// HT for without-replacement designs, `Ŷ_W` for GSS sequences.
    pub fn default_for(design: &Design) -> Result<Self> {
        let kind = if design.kind().with_replacement() { EstimatorKind::YhatW } else { EstimatorKind::HorvitzThompson };
        Estimator::new(kind, design)
    }

    pub fn new(kind: EstimatorKind, design: &Design) -> Result<Self> {
        match (kind, design) {
            (EstimatorKind::HorvitzThompson, d) if !d.kind().with_replacement() => {
                Ok(Estimator::HorvitzThompson { pi: d.inclusion_probs() })
            }
            (EstimatorKind::YhatW, Design::UnequalGss(g)) => Ok(Estimator::YhatW { pi: g.pi().to_vec(), n: g.n() }),
            (EstimatorKind::YhatH, Design::UnequalGss(g)) => {
                Ok(Estimator::YhatH { table: TieTable::new(g.chain(), g.m().saturating_sub(2).max(1))? })
            }
            (kind, d) => Err(Error::InvalidDesign(format!("estimator {kind} does not apply to {}", d.kind()))),
        }
    }

    pub fn kind(&self) -> EstimatorKind {
        match self {
            Estimator::HorvitzThompson { .. } => EstimatorKind::HorvitzThompson,
            Estimator::YhatW { .. } => EstimatorKind::YhatW,
            Estimator::YhatH { .. } => EstimatorKind::YhatH,
        }
    }

    pub fn estimate(&self, sample: &Sample, y: &[f64]) -> Result<f64> {
        match self {
            Estimator::HorvitzThompson { pi } => horvitz_thompson(&sample.distinct(), y, pi),
            Estimator::YhatW { pi, n } => Ok(yhat_w(&sample.units, y, pi, *n)),
            Estimator::YhatH { table } => yhat_h(&ties_in(&sample.units), y, table),
        }
    }
}
