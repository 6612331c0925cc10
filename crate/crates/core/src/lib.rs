//! Bloch-tensor detection of genuine multipartite entanglement in
//! tripartite qudit states.
//!
//! The pipeline is: build a [`DensityMatrix`], expand it in a
//! [`GeneratorBasis`] to get a [`CorrelationTensor`], then run the
//! criteria in [`criteria`]. Parameter sweeps and threshold searches live
//! in [`sweep`].

// `!(x > 0.0)` is used on purpose so NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bloch;
pub mod criteria;
pub mod error;
pub mod families;
pub mod random;
pub mod reproduce;
pub mod states;
pub mod su_basis;
pub mod sweep;
pub mod tensor_ops;

pub use bloch::{correlation_tensor, matricize, CorrelationTensor, Matricization, Pivot};
pub use criteria::{Criterion, CriterionReport};
pub use error::{Error, Result};
pub use states::DensityMatrix;
pub use su_basis::{generators, GeneratorBasis};
pub use tensor_ops::{ComplexMatrix, SubsystemShape, C64};
