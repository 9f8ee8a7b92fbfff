//! Data-label alignment through data-dependent complexity (DDC).
//!
//! A representation of a labeled dataset is turned into the Gram matrix of the
//! infinite-width two-layer ReLU kernel. The DDC of the real labeling,
//! `sqrt(2 yᵀ H⁻¹ y / n)`, is then compared to the DDC distribution of random
//! labelings of the same examples. A representation that fits the task gives
//! the real labeling a much lower DDC than random labelings.
//!
//! Pipeline:
//!
//! 1. [`ingest`]: build unit-norm representations, deduplicate, subsample.
//! 2. [`gram`]: construct the kernel matrix.
//! 3. [`spectral`]: eigendecompose and compute DDC.
//! 4. [`baseline`]: sample random labelings, calibrate, and bound the estimates.
//! 5. [`pipeline`]: run all of the above over representations and replicates
//!    and write the report and plot tables.

pub mod baseline;
pub mod error;
pub mod gram;
pub mod ingest;
pub mod io;
pub mod pipeline;
pub mod report;
pub mod spectral;

pub use error::{Error, Result};
