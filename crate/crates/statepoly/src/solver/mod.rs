//! Block-diagonal semidefinite programming.
//!
//! The embedded solver handles desk-scale problems in the standard primal
//! form
//!
//! ```text
//! min <C, X>   s.t.   <A_i, X> = b_i  (i = 1..m),   X >= 0 (block diagonal)
//! ```
//!
//! with the dual `max b'y s.t. C - sum_i y_i A_i >= 0`. Larger instances can
//! be exported to the SDPA sparse format and solved externally.

mod ipm;
mod sdpa;

pub use ipm::solve;
pub use sdpa::{export_sdpa, export_sdpa_string, import_sdpa, import_sdpa_str, SdpaError};

use crate::linalg::Mat;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SdpError {
    #[error("entry ({i},{j}) out of range for block {block} of size {dim}")]
    EntryOutOfRange {
        block: usize,
        i: usize,
        j: usize,
        dim: usize,
    },
    #[error("duplicate entry (block {block}, {i}, {j}) in matrix {mat}")]
    DuplicateEntry {
        mat: usize,
        block: usize,
        i: usize,
        j: usize,
    },
    #[error("matrix index {0} out of range")]
    MatOutOfRange(usize),
}

/// One nonzero of a symmetric matrix: upper-triangle position `i <= j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entry {
    pub block: usize,
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

/// A block-diagonal SDP in standard primal form. Matrix 0 is the objective
/// `C`; matrices `1..=m` are the constraint matrices with right-hand sides
/// `b`.
#[derive(Debug, Clone, Default)]
pub struct SdpInstance {
    pub block_dims: Vec<usize>,
    pub b: Vec<f64>,
    pub objective: Vec<Entry>,
    pub constraints: Vec<Vec<Entry>>,
}

impl SdpInstance {
    pub fn m(&self) -> usize {
        self.b.len()
    }

    pub fn n_blocks(&self) -> usize {
        self.block_dims.len()
    }

    /// Validates all index ranges, `i <= j`, and rejects duplicate entries
    /// within one matrix.
    pub fn validate(&self) -> Result<(), SdpError> {
        if self.constraints.len() != self.b.len() {
            return Err(SdpError::MatOutOfRange(self.constraints.len()));
        }
        for (mat, entries) in std::iter::once(&self.objective)
            .chain(self.constraints.iter())
            .enumerate()
        {
            let mut seen = std::collections::HashSet::new();
            for e in entries {
                let dim = *self
                    .block_dims
                    .get(e.block)
                    .ok_or(SdpError::EntryOutOfRange {
                        block: e.block,
                        i: e.i,
                        j: e.j,
                        dim: 0,
                    })?;
                if e.i > e.j || e.j >= dim {
                    return Err(SdpError::EntryOutOfRange {
                        block: e.block,
                        i: e.i,
                        j: e.j,
                        dim,
                    });
                }
                if !seen.insert((e.block, e.i, e.j)) {
                    return Err(SdpError::DuplicateEntry {
                        mat,
                        block: e.block,
                        i: e.i,
                        j: e.j,
                    });
                }
            }
        }
        Ok(())
    }

    /// Densifies matrix `mat` (0 = objective, `1..=m` = constraints) as a
    /// list of symmetric blocks.
    pub fn dense_blocks(&self, mat: usize) -> Vec<Mat<f64>> {
        let entries = if mat == 0 {
            &self.objective
        } else {
            &self.constraints[mat - 1]
        };
        let mut blocks: Vec<Mat<f64>> = self.block_dims.iter().map(|&d| Mat::zeros(d)).collect();
        for e in entries {
            blocks[e.block].set(e.i, e.j, e.value);
            blocks[e.block].set(e.j, e.i, e.value);
        }
        blocks
    }
}

/// Solver options; defaults match the documented tolerances.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub gap_tol: f64,
    pub feas_tol: f64,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            gap_tol: 1e-8,
            feas_tol: 1e-8,
            max_iter: 200,
        }
    }
}

/// Termination status of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpStatus {
    /// Duality gap and feasibility tolerances met.
    Optimal,
    /// Numerical failure or iteration limit; best iterate returned.
    Stalled,
    /// The dual objective diverged; the primal is deemed infeasible.
    Infeasible,
}

impl std::fmt::Display for SdpStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SdpStatus::Optimal => write!(f, "optimal"),
            SdpStatus::Stalled => write!(f, "stalled"),
            SdpStatus::Infeasible => write!(f, "infeasible"),
        }
    }
}

/// Output of [`solve`].
#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub status: SdpStatus,
    pub x: Vec<Mat<f64>>,
    pub y: Vec<f64>,
    pub s: Vec<Mat<f64>>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub iterations: usize,
}

impl SdpSolution {
    pub fn relative_gap(&self) -> f64 {
        (self.primal_objective - self.dual_objective).abs()
            / (1.0 + self.primal_objective.abs() + self.dual_objective.abs())
    }
}
