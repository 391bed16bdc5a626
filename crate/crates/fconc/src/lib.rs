pub mod checker;
pub mod classify;
pub mod error;
pub mod fconcavity;
pub mod grid;
pub mod heatflow;
pub mod initialdata;
pub mod ext;
pub mod quadrature;
pub mod scalar;
pub mod special;

pub use error::{Error, Result};
pub use ext::Ext;
pub use scalar::Scalar;

pub type Function = fconcavity::AdmissibleFunction<f64>;
pub type Transform = fconcavity::DerivedTransform<f64>;
pub type Datum = initialdata::InitialDatum<f64>;
pub type Field = heatflow::HeatFlowField<f64>;
