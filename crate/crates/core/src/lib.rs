pub mod asymptotics;
pub mod cli;
pub mod coherent;
pub mod error;
pub mod frames;
pub mod numerics;
pub mod output;
pub mod params;
pub mod phase_space;
pub mod quantization;
pub mod report;
pub mod sgp;
pub mod susy;

pub use error::{Error, Result};
