//! Spectral analysis of one-dimensional homogeneous discrete-time quantum
//! walks given as banded unitaries.

pub mod cli;
pub mod decompose;
pub mod dynamics;
pub mod error;
pub mod fixtures;
pub mod fourier;
pub mod intertwine;
pub mod linalg;
pub mod realize;
pub mod report;
pub mod spectral;
pub mod walkspec;

pub use decompose::{decompose, Decomposition};
pub use dynamics::State;
pub use error::{Error, Result};
pub use spectral::{sample_bands, Band, BandSet};
pub use walkspec::{SymbolMatrix, WalkSpec};
