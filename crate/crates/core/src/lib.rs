pub mod boosting;
pub mod error;
pub mod features;
pub mod lexing;
pub mod ranking;
pub mod shap;
pub mod stats;
pub mod synthetic;
mod table;

pub use error::{Error, Result};
