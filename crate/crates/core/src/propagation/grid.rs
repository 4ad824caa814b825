use rayon::prelude::*;

use crate::antenna::{AntennaArray, AntennaSelection};
use crate::error::{invalid, Result};
use crate::geometry::{relative_bearing, Angle, Position};
use crate::linkbudget::LinkBudget;

use super::{dominant_path_loss, Environment};

/// Rectangular raster of cells; `origin` is the south-west corner and its
/// height is used for every receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRegion {
    pub origin: Position,
    pub cell_size: f64,
    pub width: usize,
    pub height: usize,
}

impl GridRegion {
    pub fn validate(&self) -> Result<()> {
        self.origin.validate()?;
        if !(self.cell_size > 0.0 && self.cell_size.is_finite()) {
            return Err(invalid(format!("cell_size {} must be positive", self.cell_size)));
        }
        if self.width == 0 || self.height == 0 {
            return Err(invalid("coverage region must contain at least one cell"));
        }
        Ok(())
    }

    /// Center of cell (`col`, `row`); row 0 is the southernmost row.
    pub fn cell_center(&self, col: usize, row: usize) -> Position {
        Position::with_height(
            self.origin.east + (col as f64 + 0.5) * self.cell_size,
            self.origin.north + (row as f64 + 0.5) * self.cell_size,
            self.origin.height,
        )
    }

    /// Cell whose half-open extent contains `p`, if any.
    pub fn cell_of(&self, p: &Position) -> Option<(usize, usize)> {
        let col = ((p.east - self.origin.east) / self.cell_size).floor();
        let row = ((p.north - self.origin.north) / self.cell_size).floor();
        let inside = col >= 0.0 && row >= 0.0 && col < self.width as f64 && row < self.height as f64;
        inside.then_some((col as usize, row as usize))
    }
}

/// Everything needed to rasterize received power around one transmitter.
#[derive(Debug, Clone)]
pub struct CoverageSetup<'a> {
    pub environment: &'a Environment,
    pub tx: Position,
    pub array: &'a AntennaArray,
    pub selection: AntennaSelection,
    pub heading: Angle,
    /// Supplies P_T, C_T, G_R and C_R; gain and path terms are filled per cell.
    pub budget_template: LinkBudget,
    pub frequency: f64,
    pub region: GridRegion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

/// Received power per cell in dBm, row-major from the south-west corner.
/// Cells that cannot be evaluated (the one holding the transmitter) are NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageGrid {
    pub region: GridRegion,
    pub values: Vec<f64>,
}

impl CoverageGrid {
    pub fn value(&self, col: usize, row: usize) -> f64 {
        self.values[row * self.region.width + col]
    }

    /// (center, value) for every cell in storage order.
    pub fn cells(&self) -> impl Iterator<Item = (Position, f64)> + '_ {
        let w = self.region.width;
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.region.cell_center(i % w, i / w), v))
    }
}

fn cell_power(setup: &CoverageSetup<'_>, rx: &Position) -> f64 {
    let Ok(theta) = relative_bearing(&setup.tx, setup.heading, rx) else {
        return f64::NAN;
    };
    let Ok(path) = dominant_path_loss(setup.environment, &setup.tx, rx, setup.frequency) else {
        return f64::NAN;
    };
    LinkBudget {
        tx_gain: setup.array.gain(setup.selection, theta),
        path_loss_fs: path.free_space_loss(),
        path_loss_div: path.excess_loss,
        ..setup.budget_template
    }
    .received_power()
}

pub fn coverage_grid(setup: &CoverageSetup<'_>, execution: Execution) -> Result<CoverageGrid> {
    let region = setup.region;
    region.validate()?;
    setup.tx.validate()?;
    if !(setup.frequency > 0.0 && setup.frequency.is_finite()) {
        return Err(invalid(format!("frequency {} must be positive", setup.frequency)));
    }
    let tx_cell = region.cell_of(&setup.tx);
    let eval = |i: usize| {
        let (col, row) = (i % region.width, i / region.width);
        if tx_cell == Some((col, row)) {
            return f64::NAN;
        }
        cell_power(setup, &region.cell_center(col, row))
    };
    let n = region.width * region.height;
    let values = match execution {
        Execution::Parallel => (0..n).into_par_iter().map(eval).collect(),
        Execution::Sequential => (0..n).map(eval).collect(),
    };
    Ok(CoverageGrid { region, values })
}
