pub mod bimodule;
pub mod checks;
pub mod chain;
pub mod cli;
mod exact;
pub mod fusion_core;
pub mod scalar;
pub mod spectra;
pub mod tube;
