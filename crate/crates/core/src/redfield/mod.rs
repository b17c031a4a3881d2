//! Microscopic master equations: jump operators, bath rates, secular pair
//! selection and Liouvillian assembly.

mod assembly;
mod bath;
mod conditions;
mod jumps;
mod models;
mod psa;

pub use assembly::{
    assemble_liouvillian, assemble_with_model, decompose_channels, Channel, CoefficientModel, DecomposedChannel,
    KeptTerm, Liouvillian, PairKey, Provenance, ThermalMeanRule,
};
pub use bath::{bath_rate, BathSpec, LambShift, SpectralForm};
pub use conditions::{check_conditions, ConditionReport};
pub use jumps::{grading, jump_decompose, JumpComponent, JumpDecomposition};
pub use models::{squeezed_single_mode, TwoSpinSystem};
pub use psa::{psa_pairs, PsaPolicy, SecularMode, DEFAULT_CHI, DEFAULT_FREQ_TOL};
