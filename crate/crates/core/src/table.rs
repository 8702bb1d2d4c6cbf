//! Frequency grid with named real-valued columns.

use alloc::string::String;
use alloc::vec::Vec;

use crate::{CoreError, Result};
#[allow(unused_imports)] // only unused when a dependency links std
use num_traits::Float;

/// Column-oriented table indexed by a strictly increasing frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTable {
    grid: Vec<f64>,
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
}

impl SpectrumTable {
    pub fn new(grid: Vec<f64>) -> Result<Self> {
        if grid.len() < 2 || grid.windows(2).any(|w| !(w[1] > w[0])) || grid.iter().any(|x| !x.is_finite()) {
            return Err(CoreError::Domain("grid must be finite, strictly increasing, with at least two points"));
        }
        Ok(Self { grid, names: Vec::new(), columns: Vec::new() })
    }

    pub fn push_column(&mut self, name: &str, values: Vec<f64>) -> Result<()> {
        if values.len() != self.grid.len() {
            return Err(CoreError::Domain("column length must match the grid"));
        }
        self.names.push(String::from(name));
        self.columns.push(values);
        Ok(())
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.names.iter().position(|n| n == name).map(|i| self.columns[i].as_slice())
    }

    pub fn columns(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.names.iter().map(String::as_str).zip(self.columns.iter().map(Vec::as_slice))
    }

    /// True when the grid is symmetric about zero to relative `tol`.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        let n = self.grid.len();
        let scale = self.grid[n - 1].abs().max(self.grid[0].abs());
        (0..n).all(|i| (self.grid[i] + self.grid[n - 1 - i]).abs() <= tol * scale)
    }
}

/// `n` equally spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return alloc::vec![lo];
    }
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| if i == n - 1 { hi } else { lo + step * i as f64 }).collect()
}

/// `n` logarithmically spaced points from `lo` to `hi` inclusive (both positive).
pub fn geomspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    linspace(a, b, n)
        .into_iter()
        .enumerate()
        .map(|(i, x)| {
            if i == 0 {
                lo
            } else if i == n - 1 {
                hi
            } else {
                x.exp()
            }
        })
        .collect()
}
