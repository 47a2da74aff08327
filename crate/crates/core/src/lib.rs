//! Numerical toolkit for multimode continuous-variable quantum optics.
//!
//! States are Gaussian (mean and covariance in xxpp quadrature order, vacuum
//! variance 1). Mode bases change through unitary [`modal::ModeMap`]s, which
//! lift to orthogonal symplectic maps on quadratures. Decompositions, source
//! and channel models, detection, photon addition/subtraction and
//! Cramer-Rao bounds build on those two representations.

pub mod channels;
pub mod decomp;
pub mod detection;
pub mod error;
pub mod gaussian;
pub mod io;
pub mod linalg;
pub mod metrology;
pub mod modal;
pub mod nongauss;
pub mod random;
pub mod sources;

pub use error::{Error, Result};
pub use gaussian::{CoherencyMatrix, GaussianState, SymplecticMap};
pub use linalg::Tolerances;
pub use modal::{ModeFunction, ModeMap, QuadratureBasisMap};
