//! Numerical toolkit for Gibbs measures of Markov interval maps.
//!
//! The crate models the full pipeline from symbolic dynamics to harmonic
//! analysis, at desk scale:
//!
//! * [`word`] / [`markov`] — digit words, cylinders, and the inverse-branch
//!   families of the Gauss and Lüroth maps;
//! * [`continuants`] — exact arbitrary-precision continued-fraction
//!   arithmetic (determinant, mirroring, interval lengths,
//!   quasi-multiplicativity);
//! * [`measure`] / [`thermo`] — discrete measures, Birkhoff sums, the
//!   transfer operator, pressure/dimension/Lyapunov estimation,
//!   large-deviation scans, and multiscale regular word trees;
//! * [`nonconc`] — distortion-set statistics: the nonlinearity counter,
//!   triple counts, and well-distributed blocks;
//! * [`fourier`] — Fourier transforms of atomic measures, multiplicative
//!   convolutions, dyadic decomposition, decay-exponent scans, and the
//!   blocked exponential sums;
//! * [`equidist`] — Weyl sums along integer sequences (including continuant
//!   denominators) and the averaged-square convergence surrogate.
//!
//! Everything is deterministic: randomized scans take explicit seeds and all
//! reductions run in a fixed order, so repeated runs are bit-identical.

pub mod config;
pub mod continuants;
pub mod equidist;
pub mod error;
pub mod fit;
pub mod fourier;
pub mod markov;
pub mod measure;
pub mod nonconc;
pub mod thermo;
pub mod word;

pub use config::RunConfig;
pub use error::{GfError, Result};
pub use markov::{MapKind, MarkovSystem};
pub use measure::{CylinderMeasure, DiscreteMeasure};
pub use thermo::{GibbsSpec, RegularTree, ZetaSystem};
pub use word::{Block, Word};
