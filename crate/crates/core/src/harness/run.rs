//! Executes an experiment configuration and checks its targets.

use std::time::Instant;

use rand::RngCore;

use super::config::{CellRef, ExperimentConfig, MeasureKind, ModeChoice, Target};
use super::report::{ReportRow, RunReport};
use crate::designs::Design;
use crate::error::{Error, Result};
use crate::estimators::Estimator;
use crate::measures::{expected_ssb, has_exact_support, pr_single_unit, relative_efficiency, xi, Mode};
use crate::rng::{cell_id, stream};

/// Seed of the Monte Carlo stream of one cell.
pub fn cell_seed(master: u64, design: &str, population: &str, measure: &str) -> u64 {
    stream(master, cell_id(&format!("{design}/{population}/{measure}")), 0).next_u64()
}

fn resolve_mode(choice: ModeChoice, design: &Design, reps: usize, seed: u64) -> Result<Mode> {
    match choice {
        ModeChoice::Exact if !has_exact_support(design) => {
            Err(Error::NotEnumerable("exact mode requested for a design without exact support"))
        }
        ModeChoice::Exact => Ok(Mode::Exact),
        ModeChoice::Auto if has_exact_support(design) => Ok(Mode::Exact),
        ModeChoice::Auto | ModeChoice::MonteCarlo => Ok(Mode::MonteCarlo { reps, seed }),
    }
}

/// Runs every design × population × applicable measure cell.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.validate()?;
    let pops = cfg.populations.iter().map(|p| p.build()).collect::<Result<Vec<_>>>()?;
    let mut report = RunReport { name: cfg.name.clone(), rows: Vec::new() };
    for spec in &cfg.designs {
        let dname = spec.name();
        for pop in &pops {
            let measures: Vec<_> = cfg.measures.iter().filter(|m| m.applies(&dname, &pop.name)).collect();
            if measures.is_empty() {
                continue;
            }
            let design = spec.build(pop)?;
            for m in measures {
                let start = Instant::now();
                let seed = cell_seed(cfg.run.seed, &dname, &pop.name, m.kind.name());
                let mode = resolve_mode(m.mode.unwrap_or(cfg.run.mode), &design, cfg.run.reps, seed)?;
                let value = match m.kind {
                    MeasureKind::Re => {
                        let est = Estimator::new(cfg.estimator.kind(&design), &design)?;
                        relative_efficiency(&design, &est, &pop.y, mode)?
                    }
                    MeasureKind::Xi => xi(&design, &pop.contiguity, mode)?,
                    MeasureKind::PrN1 => pr_single_unit(&design, mode)?,
                    MeasureKind::Essb => expected_ssb(&design, &pop.coords, mode)?,
                };
                let mut row = ReportRow::new(&dname, &pop.name, m.kind.name(), value, cfg.run.seed);
                row.elapsed_ms = start.elapsed().as_millis();
                report.rows.push(row);
            }
        }
    }
    Ok(report)
}

/// Result of one target check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub description: String,
    pub pass: bool,
    pub strict: bool,
}

impl CheckOutcome {
    pub fn line(&self) -> String {
        let status = if self.pass { "PASS" } else { "FAIL" };
        let kind = if self.strict { "strict" } else { "loose" };
        format!("{status} [{kind}] {}", self.description)
    }
}

fn lookup(report: &RunReport, c: &CellRef) -> Option<f64> {
    report.get(&c.design, &c.population, c.measure.name()).map(|r| r.value)
}

fn label(c: &CellRef) -> String {
    format!("{}/{}/{}", c.design, c.population, c.measure.name())
}

/// Checks every target against `report`. Missing cells fail.
pub fn check_targets(report: &RunReport, targets: &[Target]) -> Vec<CheckOutcome> {
    targets
        .iter()
        .map(|t| {
            let (description, pass) = match t {
                Target::Within { cell, target, tol, .. } => match lookup(report, cell) {
                    Some(v) => (
                        format!("{} = {v:.4}, target {target} ± {tol}", label(cell)),
                        (v - target).abs() <= *tol,
                    ),
                    None => (format!("{} missing", label(cell)), false),
                },
                Target::Below { cell, bound, .. } => match lookup(report, cell) {
                    Some(v) => (format!("{} = {v:.4} < {bound}", label(cell)), v < *bound),
                    None => (format!("{} missing", label(cell)), false),
                },
                Target::Factor { cell, target, factor, .. } => match lookup(report, cell) {
                    Some(v) => (
                        format!("{} = {v:.4}, within factor {factor} of {target}", label(cell)),
                        v >= target / factor && v <= target * factor,
                    ),
                    None => (format!("{} missing", label(cell)), false),
                },
                Target::Less { lhs, rhs, .. } => match (lookup(report, lhs), lookup(report, rhs)) {
                    (Some(a), Some(b)) => (format!("{} = {a:.4} < {} = {b:.4}", label(lhs), label(rhs)), a < b),
                    _ => (format!("{} < {} missing", label(lhs), label(rhs)), false),
                },
            };
            CheckOutcome { description, pass, strict: t.strict() }
        })
        .collect()
}
