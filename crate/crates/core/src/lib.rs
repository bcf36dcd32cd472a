//! Spectral computations for random tridiagonal (Jacobi) operators over
//! finite alphabets: symbol ellipses and their plane partition, banded
//! solves and norms of finite sections, the finite section method with
//! index cancellation, and pseudospectra on complex grids.

pub mod ellipse;
pub mod error;
pub mod export;
pub mod fsm;
pub mod grid;
pub mod pseudospec;
pub mod regions;
pub mod symbols;
pub mod tridiag;

pub use error::{Error, Result};
pub use grid::{ComplexGrid, GridMask};
pub use symbols::{DiagonalStream, FiniteJacobi, SymbolTriple, C64};
pub use tridiag::{NormEstimate, NormKind};
