//! Numerical toolkit for quantum Fisher information and its upper bounds.
//!
//! The crate is organized around dense complex matrices ([`CMatrix`]) and a
//! validated density-matrix type ([`DensityMatrix`]). On top of that it
//! provides:
//!
//! - [`fisher`]: classical Fisher information, the symmetric logarithmic
//!   derivative (SLD) and exact QFI, measurement-specific Fisher information,
//!   and the non-Hermitian-SLD (nSLD) family of upper bounds.
//! - [`convexity`]: the extended-convexity bound for ensembles, the ensemble
//!   induced by a Kraus decomposition, and the eta-minimized channel bound.
//! - [`lindblad`]: dynamical-semigroup evolution and the commuting-model
//!   closed forms for nSLDs and extended QFI.
//! - [`experiments`]: closed forms and sweeps for GHZ dephasing estimation
//!   and dephasing-rate estimation, with exact reference values.
//! - [`io`]: the JSON matrix and Lindblad-model file formats used by the CLI.

pub mod channel;
pub mod convexity;
pub mod error;
pub mod experiments;
pub mod family;
pub mod fisher;
pub mod io;
pub mod linalg;
pub mod lindblad;
pub mod measurement;
pub mod state;

pub use channel::KrausChannel;
pub use convexity::{ChannelBound, ChannelBoundTerms, Ensemble, FconvSplit};
pub use error::{Error, Result};
pub use family::ParamFamily;
pub use lindblad::{CommutationReport, Jump, LindbladModel};
pub use measurement::Measurement;
pub use state::{DensityMatrix, GeneralOperator, HermitianOperator, Spectral, SupportProjection};

/// Complex scalar used throughout.
pub type C64 = nalgebra::Complex<f64>;
/// Dense dynamically-sized complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense dynamically-sized complex vector.
pub type CVector = nalgebra::DVector<C64>;

/// Default step for central finite differences of parameter families.
///
/// Central differences have error O(h^2) ~ 1e-10 at this step, balancing
/// truncation against double-precision roundoff.
pub const DEFAULT_FD_STEP: f64 = 1e-5;
