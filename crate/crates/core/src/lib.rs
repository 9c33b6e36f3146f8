//! Nonnegative Z- and H-eigenpairs of nonnegative tensors.
//!
//! The solvers deform a rank-1 symmetric tensor `x₁∘⋯∘x₁`, whose positive
//! eigenpair is known in closed form, into the target tensor and follow the
//! eigenpair along the way. [`multi_eigen::find_odd_z`] pairs several such
//! homotopies to collect an odd number of positive Z-eigenpairs.
//!
//! ```
//! use teneig::{generators, homotopy::{EigenKind, HomotopyProblem}, tracker};
//!
//! let a = generators::signless_laplacian(3, 6).unwrap();
//! let p = HomotopyProblem::new(&a, vec![0.5; 6], EigenKind::H).unwrap();
//! let (pair, _) = tracker::track_h(&p, &Default::default()).unwrap();
//! assert!(pair.residual < 1e-10);
//! ```

// `!(a > b)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod cli;
pub mod error;
pub mod generators;
pub mod homotopy;
pub mod io;
mod linalg;
pub mod multi_eigen;
pub mod tensor;
pub mod tracker;

pub use error::{Error, Result};
pub use homotopy::{EigenKind, HomotopyProblem};
pub use multi_eigen::{find_odd_z, EigenSet, OddSearchConfig};
pub use tensor::{DenseTensor, Symmetry};
pub use tracker::{track_h, track_z, Direction, EigenPair, TrackerConfig};
