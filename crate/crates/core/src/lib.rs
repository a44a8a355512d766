// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod ext;
pub mod hyp;
pub mod length;
pub mod mat2;
pub mod constructions;
pub mod metrics;
pub mod scalar;
pub mod surface;

pub use error::{FnsError, Result};
pub use scalar::Real;

pub type Ext = ext::ExtScalar<f64>;
pub type SExt = ext::SignedExt<f64>;
pub type Mat = mat2::Mat2<SExt>;
