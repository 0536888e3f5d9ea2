//! Envelope operators, subdifferentiability oracles, maximal-minorant
//! construction and global-extremum certificates for extended-real-valued
//! functions sampled on boxes in R^1 and R^2, with supports drawn from the
//! Lipschitz continuous concave functions.
//!
//! Everything operates on finite uniform grids: sups and infs over the space
//! become exact maxima and minima over grid nodes, every envelope is
//! computable, and every claim ships with a machine-checkable certificate.

pub mod cli;
pub mod conjugate;
pub mod ekeland;
pub mod envelope;
pub mod error;
pub mod ext_real;
pub mod extremum;
pub mod family;
pub mod gallery;
pub mod grid;
pub mod jsonio;
pub mod maximal;
pub mod minorant;
pub mod probes;
pub mod randfn;
pub mod sampled;
pub mod serde_util;
pub mod simplex;
pub mod subdiff;

pub use error::{Error, Result};
pub use ext_real::ExtReal;
pub use gallery::{GalleryFunction, PointFunction};
pub use grid::{Grid, NodeIndex, Norm, Point};
pub use sampled::{eval_on_box, eval_sampled, norm_dist, sample, SampledFunction};
