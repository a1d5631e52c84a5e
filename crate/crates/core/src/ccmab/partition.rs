//! Uniform hypercube partition of `[0, 1]^D` with lazily created cells.

use std::collections::HashMap;
use std::fmt;
use std::io;

use super::{CcmabError, LearnerConfig};

/// A context in `[0, 1]^D`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContextVector(Box<[f64]>);

impl ContextVector {
    pub fn new(coords: impl Into<Vec<f64>>) -> Result<Self, CcmabError> {
        let coords: Vec<f64> = coords.into();
        if let Some((axis, &value)) = coords
            .iter()
            .enumerate()
            .find(|(_, c)| !(0.0..=1.0).contains(*c))
        {
            return Err(CcmabError::InvalidContext { axis, value });
        }
        Ok(Self(coords.into_boxed_slice()))
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// Per-dimension cell coordinates in `{0, .., h-1}^D`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellIndex(pub Box<[u32]>);

impl CellIndex {
    pub fn new(index: impl Into<Vec<u32>>) -> Self {
        Self(index.into().into_boxed_slice())
    }

    pub fn coords(&self) -> &[u32] {
        &self.0
    }
}

impl fmt::Display for CellIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// Counters of one hypercube.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Cell {
    /// Replications selected with a context in this cell.
    pub selected: u64,
    /// Realized qualities received so far.
    pub observed: u64,
    pub quality_sum: f64,
}

impl Cell {
    /// Sample mean of the observed qualities, 0 before the first observation.
    pub fn estimate(&self) -> f64 {
        if self.observed == 0 {
            0.0
        } else {
            self.quality_sum / self.observed as f64
        }
    }
}

/// Maps a context to its cell. Intervals are `[i/h, (i+1)/h)` except the
/// last, which is closed.
pub fn cell_of(phi: &ContextVector, h: u32) -> CellIndex {
    let index: Vec<u32> = phi
        .coords()
        .iter()
        .map(|&c| ((c * h as f64).floor() as u32).min(h - 1))
        .collect();
    CellIndex::new(index)
}

#[derive(Clone, Debug)]
pub struct Partition {
    h: u32,
    dim: usize,
    cells: HashMap<CellIndex, Cell>,
}

impl Partition {
    /// Empty partition with `h_T` cells per dimension.
    pub fn new(config: &LearnerConfig) -> Self {
        Self::with_resolution(config.cells_per_dim(), config.dim)
    }

    pub fn with_resolution(h: u32, dim: usize) -> Self {
        assert!(h >= 1 && dim >= 1);
        Self {
            h,
            dim,
            cells: HashMap::new(),
        }
    }

    pub fn cells_per_dim(&self) -> u32 {
        self.h
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn locate(&self, phi: &ContextVector) -> Result<CellIndex, CcmabError> {
        if phi.dim() != self.dim {
            return Err(CcmabError::DimensionMismatch {
                expected: self.dim,
                actual: phi.dim(),
            });
        }
        Ok(cell_of(phi, self.h))
    }

    /// Counters of `index`; untouched cells read as all zero.
    pub fn cell(&self, index: &CellIndex) -> Cell {
        self.cells.get(index).copied().unwrap_or_default()
    }

    pub fn estimate(&self, index: &CellIndex) -> f64 {
        self.cell(index).estimate()
    }

    pub(crate) fn cell_mut(&mut self, index: &CellIndex) -> &mut Cell {
        self.cells.entry(index.clone()).or_default()
    }

    pub(crate) fn get_mut(&mut self, index: &CellIndex) -> Option<&mut Cell> {
        self.cells.get_mut(index)
    }

    /// Number of materialized cells.
    pub fn touched(&self) -> usize {
        self.cells.len()
    }

    /// Materialized cells in index order.
    pub fn iter(&self) -> impl Iterator<Item = (&CellIndex, &Cell)> {
        let mut all: Vec<_> = self.cells.iter().collect();
        all.sort_by(|a, b| a.0.cmp(b.0));
        all.into_iter()
    }

    pub fn total_selected(&self) -> u64 {
        self.cells.values().map(|c| c.selected).sum()
    }

    pub fn total_observed(&self) -> u64 {
        self.cells.values().map(|c| c.observed).sum()
    }

    /// Writes `i0,..,i{D-1},selected,observed,quality_sum` rows, one per
    /// materialized cell, in index order.
    pub fn write_snapshot<W: io::Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = (0..self.dim).map(|i| format!("i{i}")).collect();
        header.extend(["selected", "observed", "quality_sum"].map(String::from));
        w.write_record(&header)?;
        for (index, cell) in self.iter() {
            let mut row: Vec<String> = index.coords().iter().map(u32::to_string).collect();
            row.push(cell.selected.to_string());
            row.push(cell.observed.to_string());
            row.push(format!("{}", cell.quality_sum));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Inverse of [`Partition::write_snapshot`].
    pub fn read_snapshot<R: io::Read>(input: R, h: u32) -> Result<Self, CcmabError> {
        let mut r = csv::Reader::from_reader(input);
        let dim = r
            .headers()
            .map_err(|e| CcmabError::Snapshot(e.to_string()))?
            .len()
            .checked_sub(3)
            .filter(|&d| d > 0)
            .ok_or_else(|| CcmabError::Snapshot("snapshot needs index and counter columns".into()))?;
        let mut partition = Self::with_resolution(h, dim);
        for (line, record) in r.records().enumerate() {
            let record = record.map_err(|e| CcmabError::Snapshot(e.to_string()))?;
            let bad = |what: &str| CcmabError::Snapshot(format!("row {}: bad {what}", line + 2));
            let index: Vec<u32> = (0..dim)
                .map(|i| record[i].parse::<u32>().ok().filter(|&c| c < h).ok_or_else(|| bad("index")))
                .collect::<Result<_, _>>()?;
            let cell = Cell {
                selected: record[dim].parse().map_err(|_| bad("selected count"))?,
                observed: record[dim + 1].parse().map_err(|_| bad("observed count"))?,
                quality_sum: record[dim + 2].parse().map_err(|_| bad("quality sum"))?,
            };
            if cell.observed > cell.selected {
                return Err(bad("counters (observed > selected)"));
            }
            partition.cells.insert(CellIndex::new(index), cell);
        }
        Ok(partition)
    }
}
