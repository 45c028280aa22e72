//! Nyström discretization of kernel restrictions.
//!
//! Grids live in edge-scaled coordinates. The underlying measure on line `u`
//! is `dy = dỹ / (√2 u^{1/6})`, so that Jacobian enters the weights here and
//! nowhere else. Entries are stored in the symmetrized form
//! `√w_i K(x_i, x_j) √w_j`, which leaves `det(I − ·)` unchanged.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::kernel::minor::balanced_block;
use crate::kernel::{airy_kernel_matrix, edge_stretch, unscale_y};
use crate::par::Parallelism;

use super::quadrature::QuadratureGrid;

/// Which two-line kernel to assemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineCoupling {
    /// The minor-process kernel `K`.
    Coupled,
    /// `Kᴰ = 1[u₁ ≤ u₂] K`: each line its own GUE, lines independent.
    Decorrelated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretizedOperator {
    pub grid_row: QuadratureGrid,
    pub grid_col: QuadratureGrid,
    /// Row-major `rows × cols` table.
    pub entries: Vec<f64>,
}

impl DiscretizedOperator {
    pub fn rows(&self) -> usize {
        self.grid_row.len()
    }

    pub fn cols(&self) -> usize {
        self.grid_col.len()
    }

    /// Minor kernel from line `u_row` to line `u_col`, in balanced
    /// conjugation, on the given scaled grids.
    pub fn minor(
        u_row: u32,
        grid_row: &QuadratureGrid,
        u_col: u32,
        grid_col: &QuadratureGrid,
        par: Parallelism,
    ) -> Self {
        let xs: Vec<f64> = grid_row.nodes.iter().map(|&t| unscale_y(u_row, t)).collect();
        let ys: Vec<f64> = grid_col.nodes.iter().map(|&t| unscale_y(u_col, t)).collect();
        let mut entries = balanced_block(u_row, &xs, u_col, &ys, par);
        let sr: Vec<f64> = grid_row
            .weights
            .iter()
            .map(|w| (w / edge_stretch(u_row)).sqrt())
            .collect();
        let sc: Vec<f64> = grid_col
            .weights
            .iter()
            .map(|w| (w / edge_stretch(u_col)).sqrt())
            .collect();
        let cols = ys.len();
        for (i, a) in sr.iter().enumerate() {
            for (j, b) in sc.iter().enumerate() {
                entries[i * cols + j] *= a * b;
            }
        }
        Self {
            grid_row: grid_row.clone(),
            grid_col: grid_col.clone(),
            entries,
        }
    }

    /// Airy kernel on one grid.
    pub fn airy(grid: &QuadratureGrid) -> Result<Self> {
        let mut entries = airy_kernel_matrix(&grid.nodes)?;
        let n = grid.len();
        let s: Vec<f64> = grid.weights.iter().map(|w| w.sqrt()).collect();
        for i in 0..n {
            for j in 0..n {
                entries[i * n + j] *= s[i] * s[j];
            }
        }
        Ok(Self {
            grid_row: grid.clone(),
            grid_col: grid.clone(),
            entries,
        })
    }

    fn zero(grid_row: &QuadratureGrid, grid_col: &QuadratureGrid) -> Self {
        Self {
            grid_row: grid_row.clone(),
            grid_col: grid_col.clone(),
            entries: vec![0.0; grid_row.len() * grid_col.len()],
        }
    }

    /// `Σ_i entries[i,i]`, the discretized trace.
    pub fn trace(&self) -> f64 {
        let n = self.rows().min(self.cols());
        (0..n).map(|i| self.entries[i * self.cols() + i]).sum()
    }

    /// `I − entries` as a square row-major table.
    pub fn identity_minus(&self) -> Vec<f64> {
        assert_eq!(self.rows(), self.cols());
        let n = self.rows();
        let mut out: Vec<f64> = self.entries.iter().map(|v| -v).collect();
        for i in 0..n {
            out[i * n + i] += 1.0;
        }
        out
    }
}

/// The 2×2 block discretization of `I − K` restricted to
/// `{u₁} × [t₁, ∞) ∪ {u₂} × [t₂, ∞)`.
///
/// Diagonal blocks are the single-line kernels; the off-diagonal blocks are
/// the cross-line kernels, transition term included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockOperator {
    pub blocks: [[DiscretizedOperator; 2]; 2],
}

impl BlockOperator {
    pub fn minor(
        lines: [u32; 2],
        grids: [&QuadratureGrid; 2],
        coupling: LineCoupling,
        par: Parallelism,
    ) -> Self {
        let block = |a: usize, b: usize| {
            if coupling == LineCoupling::Decorrelated && lines[a] > lines[b] {
                DiscretizedOperator::zero(grids[a], grids[b])
            } else {
                DiscretizedOperator::minor(lines[a], grids[a], lines[b], grids[b], par)
            }
        };
        Self {
            blocks: [[block(0, 0), block(0, 1)], [block(1, 0), block(1, 1)]],
        }
    }

    pub fn size(&self) -> usize {
        self.blocks[0][0].rows() + self.blocks[1][1].rows()
    }

    /// The assembled square table `I − [K_ab]`, row-major.
    pub fn identity_minus(&self) -> Vec<f64> {
        let m = [self.blocks[0][0].rows(), self.blocks[1][1].rows()];
        let n = m[0] + m[1];
        let mut out = vec![0.0; n * n];
        for a in 0..2 {
            for b in 0..2 {
                let blk = &self.blocks[a][b];
                assert_eq!((blk.rows(), blk.cols()), (m[a], m[b]), "non-conformable blocks");
                let (r0, c0) = (a * m[0], b * m[0]);
                for i in 0..m[a] {
                    for j in 0..m[b] {
                        out[(r0 + i) * n + c0 + j] = -blk.entries[i * m[b] + j];
                    }
                }
            }
        }
        for i in 0..n {
            out[i * n + i] += 1.0;
        }
        out
    }
}
