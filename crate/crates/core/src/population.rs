//! Synthetic spatial populations and inclusion-probability patterns.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{rook_contiguity, Graph, GridLayout, NodeId};

/// The four stylized trend surfaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stylized {
    #[serde(alias = "center")]
    Centre,
    Corner,
    Polar,
    Vortex,
}

impl Stylized {
    pub const ALL: [Stylized; 4] = [Stylized::Centre, Stylized::Corner, Stylized::Polar, Stylized::Vortex];

    pub fn name(self) -> &'static str {
        match self {
            Stylized::Centre => "centre",
            Stylized::Corner => "corner",
            Stylized::Polar => "polar",
            Stylized::Vortex => "vortex",
        }
    }
}

impl fmt::Display for Stylized {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stylized {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "centre" | "center" => Ok(Stylized::Centre),
            "corner" => Ok(Stylized::Corner),
            "polar" => Ok(Stylized::Polar),
            "vortex" => Ok(Stylized::Vortex),
            other => Err(Error::Invalid(format!("unknown stylized population `{other}`"))),
        }
    }
}

/// The printed 3×3 matrices, row-major.
pub fn stylized_3x3(kind: Stylized) -> [f64; 9] {
    match kind {
        Stylized::Centre => [1.0, 2.0, 1.0, 2.0, 3.0, 2.0, 1.0, 2.0, 1.0],
        Stylized::Corner => [3.0, 2.5, 2.0, 2.5, 2.0, 1.5, 2.0, 1.5, 1.0],
        Stylized::Polar => [3.0, 2.0, 1.0, 2.0, 1.0, 2.0, 1.0, 2.0, 3.0],
        Stylized::Vortex => [3.0, 2.0, 3.0, 2.0, 1.0, 2.0, 3.0, 2.0, 3.0],
    }
}

/// Stylized surface on an `side × side` grid, rescaled linearly onto
/// `[lo, hi]`.
///
/// With rows and columns numbered `1..=L` and center `c = (L+1)/2`:
/// centre falls with the Manhattan distance to `c`, corner falls with
/// `row + col`, polar rises with `|row + col - (L+1)|` and vortex rises with
/// the Manhattan distance to `c`.
pub fn stylized_grid(kind: Stylized, side: usize, lo: f64, hi: f64) -> Result<Vec<f64>> {
    if side < 3 {
        return Err(Error::Invalid(format!("stylized grid needs side >= 3, got {side}")));
    }
    if !(lo < hi) {
        return Err(Error::Invalid(format!("empty value range [{lo}, {hi}]")));
    }
    let c = (side as f64 + 1.0) / 2.0;
    let raw: Vec<f64> = (0..side * side)
        .map(|v| {
            let row = (v / side) as f64 + 1.0;
            let col = (v % side) as f64 + 1.0;
            let manhattan = (row - c).abs() + (col - c).abs();
            match kind {
                Stylized::Centre => -manhattan,
                Stylized::Corner => -(row + col),
                Stylized::Polar => (row + col - (side as f64 + 1.0)).abs(),
                Stylized::Vortex => manhattan,
            }
        })
        .collect();
    let min = raw.iter().copied().fold(f64::INFINITY, f64::min);
    let max = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(raw.into_iter().map(|x| lo + (x - min) / (max - min) * (hi - lo)).collect())
}

/// `3 (x1 + x2) + sin(6 (x1 + x2))`.
pub fn sintrend_value(x1: f64, x2: f64) -> f64 {
    let s = x1 + x2;
    3.0 * s + (6.0 * s).sin()
}

/// Inclusion probabilities with `π_center = ratio · π_other` and total `n`.
pub fn inclusion_probs(n_units: usize, n: f64, center_ratio: f64, center: NodeId) -> Result<Vec<f64>> {
    if center >= n_units {
        return Err(Error::NodeOutOfRange { node: center, n_nodes: n_units });
    }
    if !(center_ratio > 0.0) || !(n > 0.0) {
        return Err(Error::InvalidInclusion(format!("ratio {center_ratio} and n {n} must be positive")));
    }
    let other = n / (n_units as f64 - 1.0 + center_ratio);
    let mut pi = vec![other; n_units];
    pi[center] = center_ratio * other;
    if pi.iter().any(|&p| p > 1.0) {
        return Err(Error::InvalidInclusion(format!(
            "ratio {center_ratio} with n = {n} over {n_units} units gives a probability above 1"
        )));
    }
    Ok(pi)
}

/// Equal inclusion probabilities `n / N`.
pub fn equal_probs(n_units: usize, n: f64) -> Vec<f64> {
    vec![n / n_units as f64; n_units]
}

/// Units in space with a study variable and inclusion probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialPopulation {
    pub name: String,
    pub coords: Vec<[f64; 2]>,
    pub y: Vec<f64>,
    pub pi: Vec<f64>,
    pub contiguity: Graph,
}

impl SpatialPopulation {
    pub fn new(name: impl Into<String>, coords: Vec<[f64; 2]>, y: Vec<f64>, pi: Vec<f64>, contiguity: Graph) -> Result<Self> {
        let pop = SpatialPopulation { name: name.into(), coords, y, pi, contiguity };
        pop.validate()?;
        Ok(pop)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.coords.len();
        if self.y.len() != n || self.pi.len() != n || self.contiguity.n_nodes() != n {
            return Err(Error::Invalid(format!("population `{}` has inconsistent lengths", self.name)));
        }
        if self.y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid(format!("population `{}` has non-finite y", self.name)));
        }
        if self.pi.iter().any(|&p| !(p > 0.0 && p <= 1.0)) {
            return Err(Error::InvalidInclusion(format!("population `{}` has π outside (0, 1]", self.name)));
        }
        let total = self.expected_size();
        if (total - total.round()).abs() > 1e-9 {
            return Err(Error::InvalidInclusion(format!("Σπ = {total} is not an integer")));
        }
        Ok(())
    }

    pub fn n_units(&self) -> usize {
        self.y.len()
    }

    /// `Σ π`, the expected sample size.
    pub fn expected_size(&self) -> f64 {
        self.pi.iter().sum()
    }

    pub fn sample_size(&self) -> usize {
        self.expected_size().round() as usize
    }

    /// Population total `Y`.
    pub fn total(&self) -> f64 {
        self.y.iter().sum()
    }

    /// Same units and values with new inclusion probabilities.
    pub fn with_pi(&self, pi: Vec<f64>) -> Result<Self> {
        SpatialPopulation::new(self.name.clone(), self.coords.clone(), self.y.clone(), pi, self.contiguity.clone())
    }

    /// CSV with columns `unit,x1,x2,y,pi`, units 1-based.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["unit", "x1", "x2", "y", "pi"])?;
        for k in 0..self.n_units() {
            out.write_record(&[
                (k + 1).to_string(),
                self.coords[k][0].to_string(),
                self.coords[k][1].to_string(),
                self.y[k].to_string(),
                self.pi[k].to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// 3×3 stylized population on grid-index coordinates with rook contiguity.
pub fn stylized_3x3_population(kind: Stylized, n: f64, center_ratio: f64) -> Result<SpatialPopulation> {
    let layout = GridLayout::square(3);
    let pi = inclusion_probs(9, n, center_ratio, 4)?;
    SpatialPopulation::new(
        format!("{kind}-3x3-ratio{center_ratio}"),
        layout.index_coords(),
        stylized_3x3(kind).to_vec(),
        pi,
        rook_contiguity(layout),
    )
}

/// Stylized surface over units evenly spread on the unit square.
pub fn stylized_population(kind: Stylized, side: usize, lo: f64, hi: f64, n: usize) -> Result<SpatialPopulation> {
    let layout = GridLayout::square(side);
    SpatialPopulation::new(
        format!("{kind}-{side}x{side}"),
        layout.unit_square_coords(),
        stylized_grid(kind, side, lo, hi)?,
        equal_probs(layout.n_nodes(), n as f64),
        rook_contiguity(layout),
    )
}

/// `side²` units at the cell centers of the unit square with
/// `y = 3(x1 + x2) + sin(6(x1 + x2))` and equal inclusion probabilities.
pub fn sintrend(side: usize, n: usize) -> Result<SpatialPopulation> {
    let layout = GridLayout::square(side);
    let coords = layout.unit_square_coords();
    let y = coords.iter().map(|c| sintrend_value(c[0], c[1])).collect();
    SpatialPopulation::new(
        format!("sintrend-{side}x{side}"),
        coords,
        y,
        equal_probs(layout.n_nodes(), n as f64),
        rook_contiguity(layout),
    )
}
