//! Selection of frequency pairs under the secular approximations.

use crate::{Error, Result};

/// Default ratio between the retained frequency gap and `1/τ_R`.
pub const DEFAULT_CHI: f64 = 100.0;
/// Default absolute tolerance for treating two Bohr frequencies as equal.
pub const DEFAULT_FREQ_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SecularMode {
    /// Keep `(ω, ω′)` iff `|ω − ω′| ≤ χ/τ_R`.
    Partial,
    /// Keep only `ω = ω′`.
    FullSecular,
    /// Keep every pair (raw Redfield; not guaranteed positive).
    None,
}

impl SecularMode {
    pub fn name(self) -> &'static str {
        match self {
            SecularMode::Partial => "partial",
            SecularMode::FullSecular => "full_secular",
            SecularMode::None => "none",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PsaPolicy {
    /// Relaxation time scale.
    pub tau_r: f64,
    pub chi: f64,
    pub mode: SecularMode,
    pub freq_tol: f64,
}

impl PsaPolicy {
    pub fn new(tau_r: f64, chi: f64, mode: SecularMode, freq_tol: f64) -> Result<Self> {
        let policy = PsaPolicy {
            tau_r,
            chi,
            mode,
            freq_tol,
        };
        policy.validate()?;
        Ok(policy)
    }

    /// Partial secular policy with `τ_R = μ⁻²`.
    pub fn from_coupling(mu: f64) -> Result<Self> {
        if !(mu > 0.0) {
            return Err(Error::Domain(format!("coupling μ must be positive, got {mu}")));
        }
        PsaPolicy::new(1.0 / (mu * mu), DEFAULT_CHI, SecularMode::Partial, DEFAULT_FREQ_TOL)
    }

    pub fn with_mode(mut self, mode: SecularMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_chi(mut self, chi: f64) -> Result<Self> {
        self.chi = chi;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau_r > 0.0 && self.tau_r.is_finite()) {
            return Err(Error::Domain(format!("τ_R must be positive, got {}", self.tau_r)));
        }
        if !(self.chi > 1.0 && self.chi.is_finite()) {
            return Err(Error::Domain(format!("χ must exceed 1, got {}", self.chi)));
        }
        if !(self.freq_tol >= 0.0) {
            return Err(Error::Domain(format!(
                "frequency tolerance must be non-negative, got {}",
                self.freq_tol
            )));
        }
        Ok(())
    }

    /// Largest retained gap `χ/τ_R` (partial mode).
    pub fn threshold(&self) -> f64 {
        self.chi / self.tau_r
    }

    pub fn keeps(&self, omega: f64, omega_p: f64) -> bool {
        let gap = (omega - omega_p).abs();
        match self.mode {
            SecularMode::Partial => gap <= self.threshold(),
            SecularMode::FullSecular => gap <= self.freq_tol,
            SecularMode::None => true,
        }
    }
}

/// All ordered pairs of `frequencies` retained by `policy`.
pub fn psa_pairs(frequencies: &[f64], policy: &PsaPolicy) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for &w in frequencies {
        for &wp in frequencies {
            if policy.keeps(w, wp) {
                out.push((w, wp));
            }
        }
    }
    out
}
