pub mod clifford;
pub mod edgeops;
pub mod error;
pub mod export;
pub mod features;
pub mod field;
pub mod fixtures;
pub mod local;
pub mod scalespace;
pub mod verify;

pub use error::{Error, Result};
