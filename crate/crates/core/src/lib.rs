//! Walsh-Paley summability on the dyadic group.
//!
//! Grid functions live on `2^K` dyadic cells of `[0,1)` (or `2^K × 2^K` cells of
//! the unit square). Means of partial sums are built from triangular weight
//! matrices and evaluated either spectrally or by dyadic convolution with their
//! kernels. Exact dyadic-rational arithmetic is available for sparse step
//! functions whose scales are far beyond any grid.

pub mod dyadic;
pub mod error;
pub mod exact;
pub mod io;
pub mod lebesgue;
pub mod maximal;
pub mod sampling;
pub mod summability;
pub mod tensor;
pub mod walsh;

pub use dyadic::{dyadic_add, interval_of, BinaryIndex, DyadicInterval, DyadicPoint, DyadicRational, GridSpec};
pub use error::{Error, Result};
pub use summability::{MatrixFamily, TransformationMatrix};
pub use tensor::GridFunction2D;
pub use walsh::{GridFunction1D, WalshSpectrum};
