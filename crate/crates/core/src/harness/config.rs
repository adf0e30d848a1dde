//! JSON experiment configuration.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::construct::{build_2regular_recursive, build_g7};
use crate::designs::{Design, WalkOverrides};
use crate::error::{Error, Result};
use crate::estimators::EstimatorKind;
use crate::graph::{complement_graph, cycle_from_order, pinned, rook_contiguity, Graph, GridLayout, NodeId};
use crate::population::{sintrend, stylized_3x3_population, stylized_population, SpatialPopulation, Stylized};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: String,
    pub populations: Vec<PopulationSpec>,
    pub designs: Vec<DesignSpec>,
    #[serde(default)]
    pub estimator: EstimatorChoice,
    pub measures: Vec<MeasureSpec>,
    #[serde(default)]
    pub run: RunSpec,
    #[serde(default)]
    pub targets: Vec<Target>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    #[serde(default = "default_reps")]
    pub reps: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub mode: ModeChoice,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

fn default_reps() -> usize {
    10_000
}

fn default_seed() -> u64 {
    1
}

impl Default for RunSpec {
    fn default() -> Self {
        RunSpec { reps: default_reps(), seed: default_seed(), mode: ModeChoice::default(), out: None }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeChoice {
    /// Exact where the design is enumerable, Monte Carlo otherwise.
    Auto,
    Exact,
    #[default]
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorChoice {
    /// HT for without-replacement designs, `Ŷ_W` for GSS sequences.
    #[default]
    Default,
    Ht,
    YhatW,
    YhatH,
}

impl EstimatorChoice {
    pub fn kind(self, design: &Design) -> EstimatorKind {
        match self {
            EstimatorChoice::Default if design.kind().with_replacement() => EstimatorKind::YhatW,
            EstimatorChoice::Default | EstimatorChoice::Ht => EstimatorKind::HorvitzThompson,
            EstimatorChoice::YhatW => EstimatorKind::YhatW,
            EstimatorChoice::YhatH => EstimatorKind::YhatH,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    Re,
    Xi,
    PrN1,
    Essb,
}

impl MeasureKind {
    pub fn name(self) -> &'static str {
        match self {
            MeasureKind::Re => "re",
            MeasureKind::Xi => "xi",
            MeasureKind::PrN1 => "pr_n1",
            MeasureKind::Essb => "essb",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    pub kind: MeasureKind,
    #[serde(default)]
    pub mode: Option<ModeChoice>,
    /// Restrict to these design names.
    #[serde(default)]
    pub designs: Option<Vec<String>>,
    /// Restrict to these population names.
    #[serde(default)]
    pub populations: Option<Vec<String>>,
}

impl MeasureSpec {
    pub fn applies(&self, design: &str, population: &str) -> bool {
        self.designs.as_ref().is_none_or(|d| d.iter().any(|x| x == design))
            && self.populations.as_ref().is_none_or(|p| p.iter().any(|x| x == population))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PopulationSpec {
    /// One of the printed 3×3 surfaces, with the centre unit's inclusion
    /// probability `center_ratio` times the others'.
    Stylized3x3 {
        #[serde(default)]
        name: Option<String>,
        shape: Stylized,
        #[serde(default = "one")]
        center_ratio: f64,
        n: f64,
    },
    StylizedGrid {
        #[serde(default)]
        name: Option<String>,
        shape: Stylized,
        side: usize,
        range: [f64; 2],
        n: usize,
    },
    Sintrend {
        #[serde(default)]
        name: Option<String>,
        side: usize,
        n: usize,
    },
}

fn one() -> f64 {
    1.0
}

impl PopulationSpec {
    pub fn name(&self) -> String {
        match self {
            PopulationSpec::Stylized3x3 { name: Some(n), .. }
            | PopulationSpec::StylizedGrid { name: Some(n), .. }
            | PopulationSpec::Sintrend { name: Some(n), .. } => n.clone(),
            PopulationSpec::Stylized3x3 { shape, center_ratio, .. } => format!("{shape}-{center_ratio}"),
            PopulationSpec::StylizedGrid { shape, side, .. } => format!("{shape}-{side}"),
            PopulationSpec::Sintrend { side, .. } => format!("sintrend-{side}"),
        }
    }

    pub fn build(&self) -> Result<SpatialPopulation> {
        let mut pop = match self {
            PopulationSpec::Stylized3x3 { shape, center_ratio, n, .. } => {
                stylized_3x3_population(*shape, *n, *center_ratio)?
            }
            PopulationSpec::StylizedGrid { shape, side, range, n, .. } => {
                stylized_population(*shape, *side, range[0], range[1], *n)?
            }
            PopulationSpec::Sintrend { side, n, .. } => sintrend(*side, *n)?,
        };
        pop.name = self.name();
        Ok(pop)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphSpec {
    /// `g1` to `g5` on the 3×3 grid.
    Pinned { name: String },
    /// Hamiltonian cycle through 1-based labels.
    Cycle { order: Vec<usize> },
    /// 1-based edge-list file.
    EdgeList { path: PathBuf },
    Rook { side: usize },
    RookComplement { side: usize },
    /// Recursive-partition cycle on a square grid.
    Recursive { side: usize, parts_per_side: usize, seed: u64 },
    /// Point-reflection cycle on an even square grid.
    Reflection { side: usize, seed: u64 },
}

impl GraphSpec {
    pub fn build(&self) -> Result<Graph> {
        match self {
            GraphSpec::Pinned { name } => match name.as_str() {
                "g1" => Ok(pinned::g1()),
                "g2" => Ok(pinned::g2()),
                "g3" => Ok(pinned::g3()),
                "g4" => Ok(pinned::g4()),
                "g5" => Ok(pinned::g5()),
                other => Err(Error::Invalid(format!("unknown pinned graph `{other}`; expected g1 to g5"))),
            },
            GraphSpec::Cycle { order } => cycle_from_order(&to_ids(order)?),
            GraphSpec::EdgeList { path } => Graph::read_edge_list(BufReader::new(File::open(path)?)),
            GraphSpec::Rook { side } => Ok(rook_contiguity(GridLayout::square(*side))),
            GraphSpec::RookComplement { side } => Ok(complement_graph(&rook_contiguity(GridLayout::square(*side)))),
            GraphSpec::Recursive { side, parts_per_side, seed } => {
                let layout = GridLayout::square(*side);
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                build_2regular_recursive(layout, *parts_per_side, &rook_contiguity(layout), &mut rng)
            }
            GraphSpec::Reflection { side, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                build_g7(GridLayout::square(*side), &mut rng)
            }
        }
    }
}

fn to_ids(labels: &[usize]) -> Result<Vec<NodeId>> {
    labels
        .iter()
        .map(|&l| l.checked_sub(1).ok_or_else(|| Error::Invalid("node labels are 1-based".into())))
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DesignSpec {
    Srswor {
        #[serde(default)]
        name: Option<String>,
    },
    SystematicCircular {
        #[serde(default)]
        name: Option<String>,
        order: Vec<usize>,
    },
    SystematicPath {
        #[serde(default)]
        name: Option<String>,
        order: Vec<usize>,
    },
    EpssworGss {
        #[serde(default)]
        name: Option<String>,
        graph: GraphSpec,
    },
    UnequalGss {
        #[serde(default)]
        name: Option<String>,
        graph: GraphSpec,
        m: usize,
        #[serde(default)]
        r: f64,
        #[serde(default)]
        w: f64,
    },
    Lpm1 {
        #[serde(default)]
        name: Option<String>,
    },
}

impl DesignSpec {
    pub fn name(&self) -> String {
        let (name, fallback) = match self {
            DesignSpec::Srswor { name } => (name, "srswor"),
            DesignSpec::SystematicCircular { name, .. } => (name, "systematic_circular"),
            DesignSpec::SystematicPath { name, .. } => (name, "systematic_path"),
            DesignSpec::EpssworGss { name, .. } => (name, "epsswor_gss"),
            DesignSpec::UnequalGss { name, .. } => (name, "unequal_gss"),
            DesignSpec::Lpm1 { name } => (name, "lpm1"),
        };
        name.clone().unwrap_or_else(|| fallback.to_string())
    }

    /// The design for one population; sizes and probabilities come from it.
    pub fn build(&self, pop: &SpatialPopulation) -> Result<Design> {
        let n = pop.sample_size();
        let design = match self {
            DesignSpec::Srswor { .. } => Design::srswor(pop.n_units(), n)?,
            DesignSpec::SystematicCircular { order, .. } => Design::systematic_circular(&to_ids(order)?, n)?,
            DesignSpec::SystematicPath { order, .. } => Design::systematic_path(&to_ids(order)?, n)?,
            DesignSpec::EpssworGss { graph, .. } => Design::epsswor(&graph.build()?, n)?,
            DesignSpec::UnequalGss { graph, m, r, w, .. } => {
                Design::unequal_gss(&graph.build()?, &pop.pi, *m, WalkOverrides { r: *r, w: *w })?
            }
            DesignSpec::Lpm1 { .. } => Design::lpm1(&pop.coords, &pop.pi)?,
        };
        if design.n_units() != pop.n_units() {
            return Err(Error::NodeCountMismatch(design.n_units(), pop.n_units()));
        }
        Ok(design)
    }
}

/// Reference to one report cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellRef {
    pub design: String,
    pub population: String,
    pub measure: MeasureKind,
}

/// A reproduction check. Strict checks decide the exit status; the rest
/// are reported only.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum Target {
    /// `|value - target| <= tol`.
    Within {
        #[serde(flatten)]
        cell: CellRef,
        target: f64,
        tol: f64,
        #[serde(default)]
        strict: bool,
    },
    /// `value < bound`.
    Below {
        #[serde(flatten)]
        cell: CellRef,
        bound: f64,
        #[serde(default)]
        strict: bool,
    },
    /// `target / factor <= value <= target * factor`.
    Factor {
        #[serde(flatten)]
        cell: CellRef,
        target: f64,
        factor: f64,
        #[serde(default)]
        strict: bool,
    },
    /// `lhs < rhs`.
    Less {
        lhs: CellRef,
        rhs: CellRef,
        #[serde(default)]
        strict: bool,
    },
}

impl Target {
    pub fn strict(&self) -> bool {
        match self {
            Target::Within { strict, .. }
            | Target::Below { strict, .. }
            | Target::Factor { strict, .. }
            | Target::Less { strict, .. } => *strict,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| Error::Config {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |path: &str, message: &str| Err(Error::Config { path: path.into(), message: message.into() });
        if self.run.reps == 0 {
            return fail("run.reps", "must be at least 1");
        }
        if self.populations.is_empty() {
            return fail("populations", "at least one population is required");
        }
        if self.designs.is_empty() {
            return fail("designs", "at least one design is required");
        }
        let pops: Vec<String> = self.populations.iter().map(|p| p.name()).collect();
        let designs: Vec<String> = self.designs.iter().map(|d| d.name()).collect();
        for (k, name) in pops.iter().enumerate() {
            if pops[..k].contains(name) {
                return fail(&format!("populations[{k}].name"), &format!("duplicate population name `{name}`"));
            }
        }
        for (k, name) in designs.iter().enumerate() {
            if designs[..k].contains(name) {
                return fail(&format!("designs[{k}].name"), &format!("duplicate design name `{name}`"));
            }
        }
        for (k, m) in self.measures.iter().enumerate() {
            for d in m.designs.iter().flatten() {
                if !designs.contains(d) {
                    return fail(&format!("measures[{k}].designs"), &format!("unknown design `{d}`"));
                }
            }
            for p in m.populations.iter().flatten() {
                if !pops.contains(p) {
                    return fail(&format!("measures[{k}].populations"), &format!("unknown population `{p}`"));
                }
            }
        }
        let check_cell = |path: String, c: &CellRef| {
            if !designs.contains(&c.design) {
                return fail(&path, &format!("unknown design `{}`", c.design));
            }
            if !pops.contains(&c.population) {
                return fail(&path, &format!("unknown population `{}`", c.population));
            }
            Ok(())
        };
        for (k, t) in self.targets.iter().enumerate() {
            match t {
                Target::Within { cell, .. } | Target::Below { cell, .. } | Target::Factor { cell, .. } => {
                    check_cell(format!("targets[{k}]"), cell)?
                }
                Target::Less { lhs, rhs, .. } => {
                    check_cell(format!("targets[{k}].lhs"), lhs)?;
                    check_cell(format!("targets[{k}].rhs"), rhs)?;
                }
            }
        }
        Ok(())
    }
}
