//! The four command-line operations, callable from code.

use std::fmt::Write as _;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, GraphSpec, PopulationSpec};
use super::report::RunReport;
use super::run::{check_targets, run_experiment, CheckOutcome};
use crate::construct::build_2regular_recursive;
use crate::enumerate::{enumerate_noncontiguous_cycles, CycleSearch};
use crate::error::{Error, Result};
use crate::graph::{rook_contiguity, Graph, GridLayout};
use crate::measures::{design_search, SearchMeasure, SearchOutcome};
use crate::rng::{cell_id, stream};
use crate::walker::{build_pair_chain, flow_residuals, FlowResiduals, PairChain, WalkConfig};

/// Command-line values that replace the corresponding config fields.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub reps: Option<usize>,
    pub out: Option<PathBuf>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(s) = self.seed {
            cfg.run.seed = s;
        }
        if let Some(r) = self.reps {
            cfg.run.reps = r;
        }
        if self.out.is_some() {
            cfg.run.out = self.out.clone();
        }
    }
}

// ---- stationary ----

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationaryConfig {
    pub graph: GraphSpec,
    #[serde(default)]
    pub r: f64,
    #[serde(default)]
    pub w: f64,
    /// Preference vector; uniform when absent.
    #[serde(default)]
    pub u: Option<Vec<f64>>,
    /// Use `u_h ∝ 1 / (d_h + r)`, which makes the closed-form law uniform.
    #[serde(default)]
    pub calibrate: bool,
}

impl StationaryConfig {
    pub fn walk_config(&self, g: &Graph) -> Result<WalkConfig> {
        let n = g.n_nodes();
        let raw: Vec<f64> = match (&self.u, self.calibrate) {
            (Some(_), true) => return Err(Error::InvalidConfig("give either u or calibrate, not both".into())),
            (Some(u), false) => u.clone(),
            (None, true) => (0..n).map(|h| 1.0 / (g.degree(h) as f64 + self.r)).collect(),
            (None, false) => vec![1.0; n],
        };
        let z: f64 = raw.iter().sum();
        WalkConfig::new(self.r, self.w, raw.into_iter().map(|x| x / z).collect())
    }
}

#[derive(Debug, Clone)]
pub struct StationarySummary {
    pub chain: PairChain,
    pub closed_form: Vec<f64>,
    pub iterated: Vec<f64>,
    pub max_deviation: f64,
    pub stationarity_residual: f64,
    pub flows: FlowResiduals,
}

pub fn stationary(cfg: &StationaryConfig) -> Result<StationarySummary> {
    let g = cfg.graph.build()?;
    let wc = cfg.walk_config(&g)?;
    let chain = build_pair_chain(&g, &wc)?;
    Ok(StationarySummary {
        closed_form: chain.closed_form_node(),
        iterated: chain.stationary_node().to_vec(),
        max_deviation: chain.closed_form_deviation(),
        stationarity_residual: chain.stationarity_residual(),
        flows: flow_residuals(&chain),
        chain,
    })
}

impl StationarySummary {
    pub fn render(&self) -> String {
        let g = self.chain.graph();
        let cfg = self.chain.config();
        let mut s = format!(
            "nodes {}  edges {}  r {}  w {}  pair states {}  iterations {}\n",
            g.n_nodes(),
            g.edge_count(),
            cfg.r,
            cfg.w,
            self.chain.n_states(),
            self.chain.iterations()
        );
        let _ = writeln!(s, "{:>5} {:>6} {:>12} {:>14} {:>14}", "node", "degree", "u", "closed_form", "iterated");
        for h in 0..g.n_nodes() {
            let _ = writeln!(
                s,
                "{:>5} {:>6} {:>12.6} {:>14.10} {:>14.10}",
                h + 1,
                g.degree(h),
                cfg.u[h],
                self.closed_form[h],
                self.iterated[h]
            );
        }
        let _ = writeln!(s, "max |closed_form - iterated|  {:.3e}", self.max_deviation);
        let _ = writeln!(s, "stationarity residual         {:.3e}", self.stationarity_residual);
        let _ = writeln!(s, "mixed equation residual       {:.3e}", self.flows.mixed);
        let _ = writeln!(s, "forward-through residual      {:.3e}", self.flows.forward_through);
        let _ = writeln!(s, "jump-triple residual          {:.3e}", self.flows.jump_triples);
        let _ = writeln!(s, "edge inflow residual          {:.3e}", self.flows.edge_inflow);
        let _ = writeln!(s, "Pr(X_t = X_t-1)               {:.10}", self.chain.prob_single_distinct());
        s
    }

    /// One row per node: `node,degree,u,closed_form,iterated` (1-based nodes).
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let g = self.chain.graph();
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["node", "degree", "u", "closed_form", "iterated"])?;
        for h in 0..g.n_nodes() {
            out.write_record([
                (h + 1).to_string(),
                g.degree(h).to_string(),
                self.chain.config().u[h].to_string(),
                self.closed_form[h].to_string(),
                self.iterated[h].to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

// ---- simulate / reproduce ----

pub fn simulate(mut cfg: ExperimentConfig, overrides: &Overrides) -> Result<RunReport> {
    overrides.apply(&mut cfg);
    run_experiment(&cfg)
}

const T1: &str = include_str!("../../configs/t1.json");
const T2: &str = include_str!("../../configs/t2.json");

/// Bundled reproduction configuration `t1` or `t2`.
pub fn bundled_config(table: &str) -> Result<ExperimentConfig> {
    match table {
        "t1" => ExperimentConfig::from_json(T1),
        "t2" => ExperimentConfig::from_json(T2),
        other => Err(Error::Config { path: "table".into(), message: format!("unknown table `{other}`; expected t1 or t2") }),
    }
}

pub fn reproduce(table: &str, overrides: &Overrides) -> Result<(RunReport, Vec<CheckOutcome>)> {
    let mut cfg = bundled_config(table)?;
    overrides.apply(&mut cfg);
    let report = run_experiment(&cfg)?;
    let checks = check_targets(&report, &cfg.targets);
    Ok((report, checks))
}

/// `Err(ReproductionFailed)` when a strict check failed.
pub fn reproduction_status(checks: &[CheckOutcome]) -> Result<()> {
    match checks.iter().filter(|c| c.strict && !c.pass).count() {
        0 => Ok(()),
        k => Err(Error::ReproductionFailed(k)),
    }
}

// ---- design search ----

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchConfig {
    /// Side of the square grid; contiguity is rook adjacency on it.
    pub side: usize,
    pub measure: SearchMeasureSpec,
    pub candidates: CandidateSpec,
    pub budget: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SearchMeasureSpec {
    Xi { n: usize },
    /// Relative efficiency for the response of `population`.
    Re { n: usize, population: PopulationSpec },
    Essb { n: usize },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CandidateSpec {
    /// Every non-contiguous Hamiltonian cycle.
    Exhaustive,
    /// Random non-contiguous Hamiltonian cycles.
    Sampled { seed: u64, max_attempts: usize },
    /// Recursive-partition cycles, one random construction per candidate.
    Recursive { parts_per_side: usize, seed: u64 },
}

impl CandidateSpec {
    fn with_seed(&self, seed: Option<u64>) -> CandidateSpec {
        match (self, seed) {
            (CandidateSpec::Sampled { max_attempts, .. }, Some(s)) => {
                CandidateSpec::Sampled { seed: s, max_attempts: *max_attempts }
            }
            (CandidateSpec::Recursive { parts_per_side, .. }, Some(s)) => {
                CandidateSpec::Recursive { parts_per_side: *parts_per_side, seed: s }
            }
            (c, _) => c.clone(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub measure: &'static str,
    pub outcome: SearchOutcome,
    pub median: f64,
}

impl SearchResult {
    pub fn render(&self) -> String {
        format!(
            "measure {}\nevaluated {}\nbest index {}\nbest value {:.10}\nmedian value {:.10}\n",
            self.measure,
            self.outcome.evaluated(),
            self.outcome.best_index,
            self.outcome.value,
            self.median
        )
    }
}

impl SearchConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de)
            .map_err(|e| Error::Config { path: e.path().to_string(), message: e.inner().to_string() })
    }
}

pub fn search(cfg: &SearchConfig, seed: Option<u64>) -> Result<SearchResult> {
    let layout = GridLayout::square(cfg.side);
    let rook = rook_contiguity(layout);
    let coords = layout.unit_square_coords();
    let y = match &cfg.measure {
        SearchMeasureSpec::Re { population, .. } => {
            let pop = population.build()?;
            if pop.n_units() != layout.n_nodes() {
                return Err(Error::NodeCountMismatch(pop.n_units(), layout.n_nodes()));
            }
            pop.y
        }
        _ => Vec::new(),
    };
    let measure = match &cfg.measure {
        SearchMeasureSpec::Xi { n } => SearchMeasure::Xi { n: *n, contiguity: &rook },
        SearchMeasureSpec::Re { n, .. } => SearchMeasure::Re { n: *n, y: &y },
        SearchMeasureSpec::Essb { n } => SearchMeasure::Essb { n: *n, coords: &coords },
    };
    let outcome = match cfg.candidates.with_seed(seed) {
        CandidateSpec::Exhaustive => {
            design_search(enumerate_noncontiguous_cycles(&rook, cfg.budget, CycleSearch::Exhaustive)?, &measure, cfg.budget)?
        }
        CandidateSpec::Sampled { seed, max_attempts } => design_search(
            enumerate_noncontiguous_cycles(&rook, cfg.budget, CycleSearch::Sampled { seed, max_attempts })?,
            &measure,
            cfg.budget,
        )?,
        CandidateSpec::Recursive { parts_per_side, seed } => {
            let family = cell_id("recursive");
            let pool = (0..cfg.budget as u64)
                .map(|k| build_2regular_recursive(layout, parts_per_side, &rook, &mut stream(seed, family, k)))
                .collect::<Result<Vec<Graph>>>()?;
            design_search(pool, &measure, cfg.budget)?
        }
    };
    let mut sorted = outcome.values.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    Ok(SearchResult { measure: measure.name(), outcome, median })
}
