//! Run reports and their CSV form.

use std::io::Write;

use serde::Serialize;

use crate::error::Result;
use crate::measures::Measured;

pub const CSV_HEADER: [&str; 8] = ["design", "population", "measure", "value", "se", "reps", "seed", "mode"];

/// One measured cell. `reps` is `None` for exact values; `seed` is the
/// master seed of the run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub design: String,
    pub population: String,
    pub measure: String,
    pub value: f64,
    pub se: f64,
    pub reps: Option<usize>,
    pub seed: u64,
    pub mode: String,
    #[serde(skip)]
    pub elapsed_ms: u128,
}

impl ReportRow {
    pub fn new(design: &str, population: &str, measure: &str, m: Measured, seed: u64) -> Self {
        ReportRow {
            design: design.to_string(),
            population: population.to_string(),
            measure: measure.to_string(),
            value: m.value,
            se: m.se,
            reps: m.mode.reps(),
            seed,
            mode: m.mode.to_string(),
            elapsed_ms: 0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RunReport {
    pub name: String,
    pub rows: Vec<ReportRow>,
}

impl RunReport {
    pub fn get(&self, design: &str, population: &str, measure: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.design == design && r.population == population && r.measure == measure)
    }

    /// Writes the rows; the runtime column is left out so reruns compare
    /// byte for byte.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(CSV_HEADER)?;
        for r in &self.rows {
            out.write_record([
                r.design.clone(),
                r.population.clone(),
                r.measure.clone(),
                format!("{:.10}", r.value),
                format!("{:.10}", r.se),
                r.reps.map(|k| k.to_string()).unwrap_or_default(),
                r.seed.to_string(),
                r.mode.clone(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    /// Plain-text grid of one measure, designs across and populations down.
    pub fn table(&self, measure: &str) -> String {
        let mut designs: Vec<&str> = Vec::new();
        let mut pops: Vec<&str> = Vec::new();
        for r in self.rows.iter().filter(|r| r.measure == measure) {
            if !designs.contains(&r.design.as_str()) {
                designs.push(&r.design);
            }
            if !pops.contains(&r.population.as_str()) {
                pops.push(&r.population);
            }
        }
        let mut s = format!("{:<18}", measure);
        for d in &designs {
            s += &format!("{d:>14}");
        }
        s.push('\n');
        for p in &pops {
            s += &format!("{p:<18}");
            for d in &designs {
                match self.get(d, p, measure) {
                    Some(r) => s += &format!("{:>14.3}", r.value),
                    None => s += &format!("{:>14}", "-"),
                }
            }
            s.push('\n');
        }
        s
    }
}
