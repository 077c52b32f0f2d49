//! Probabilistic Stirling numbers of the second kind `S_Y(j,m)` for
//! distributions given by truncated moment sequences, and the quantities they
//! generate: exact moments of i.i.d. sums, cumulants, moments of centered Lévy
//! processes and subordinators, and explicit Edgeworth expansions.
//!
//! Every quantity is computed in exact complex-rational arithmetic unless it
//! is inherently transcendental (normal density, Hermite polynomials at real
//! points), and every production formula has at least one independent route
//! it is tested against.

pub mod cli;
pub mod combinat;
pub mod edgeworth;
pub mod error;
pub mod json;
pub mod levy;
pub mod moments;
pub mod oracle;
pub mod randomvars;
pub mod scalar;
pub mod series;
pub mod stirling;

pub use error::{Error, Result};
pub use randomvars::{DistSpec, MomentSeq};
pub use scalar::{Cq, Field, Mode, Scalar};
pub use series::{Egf, EgfSeries};
pub use stirling::StirlingTable;

