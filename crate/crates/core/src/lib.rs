pub mod data;
pub mod error;
pub mod experiments;
pub mod metrics;
pub mod optimizer;
pub mod oracle;
pub mod penalties;
pub mod selection;
pub mod synthetic;

pub use error::{Error, Result};
