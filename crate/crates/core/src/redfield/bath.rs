//! Thermal bath model: Ohmic spectral density with exponential cutoff.

use std::f64::consts::PI;

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectralForm {
    /// `J(ω) = ω e^{−ω/ω_c}`.
    OhmicExponential,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LambShift {
    Off,
    /// Principal-value quadrature of the half-sided Fourier transform.
    Numeric,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BathSpec {
    /// Coupling constant `μ` (energy).
    pub mu: f64,
    pub temperature: f64,
    pub cutoff: f64,
    pub spectral_form: SpectralForm,
    pub lamb_shift: LambShift,
}

impl BathSpec {
    pub fn ohmic(mu: f64, temperature: f64, cutoff: f64) -> Result<Self> {
        let spec = BathSpec {
            mu,
            temperature,
            cutoff,
            spectral_form: SpectralForm::OhmicExponential,
            lamb_shift: LambShift::Off,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_lamb_shift(mut self, lamb_shift: LambShift) -> Self {
        self.lamb_shift = lamb_shift;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::Domain(format!("bath coupling μ must be positive, got {}", self.mu)));
        }
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return Err(Error::Domain(format!(
                "bath temperature must be non-negative, got {}",
                self.temperature
            )));
        }
        if !(self.cutoff > 0.0 && self.cutoff.is_finite()) {
            return Err(Error::Domain(format!("bath cutoff must be positive, got {}", self.cutoff)));
        }
        Ok(())
    }

    pub fn spectral_density(&self, omega: f64) -> f64 {
        match self.spectral_form {
            SpectralForm::OhmicExponential => {
                if omega <= 0.0 {
                    0.0
                } else {
                    omega * (-omega / self.cutoff).exp()
                }
            }
        }
    }

    /// Bose-Einstein occupation at `ω > 0`.
    pub fn occupation(&self, omega: f64) -> f64 {
        if self.temperature == 0.0 {
            return 0.0;
        }
        1.0 / (omega / self.temperature).exp_m1()
    }

    /// Emission (`ω > 0`) or absorption (`ω < 0`) rate.
    pub fn rate(&self, omega: f64) -> f64 {
        let prefactor = 2.0 * PI * self.mu * self.mu;
        if omega == 0.0 {
            // lim ω→0 of ω·N_th(ω) for the Ohmic density.
            return prefactor * self.temperature;
        }
        let w = omega.abs();
        let j = self.spectral_density(w);
        let n = self.occupation(w);
        if omega > 0.0 {
            prefactor * j * (n + 1.0)
        } else {
            prefactor * j * n
        }
    }

    /// Lamb-shift function `S(ω) = (1/2π) P∫ γ(ω′)/(ω − ω′) dω′`.
    pub fn lamb(&self, omega: f64) -> f64 {
        match self.lamb_shift {
            LambShift::Off => 0.0,
            LambShift::Numeric => self.lamb_numeric(omega),
        }
    }

    fn lamb_numeric(&self, omega: f64) -> f64 {
        // Folding the principal value about ω gives a regular integrand on
        // u ∈ (0, ∞). γ has a kink at ω − u = 0, so split there.
        let integrand = |u: f64| (self.rate(omega - u) - self.rate(omega + u)) / u;
        let tail = omega.abs() + 80.0 * self.cutoff;
        let mut total = 0.0;
        let mut lo = 0.0;
        for hi in [omega.abs(), tail] {
            if hi > lo {
                total += quadrature::double_exponential::integrate(integrand, lo, hi, 1e-12).integral;
                lo = hi;
            }
        }
        total / (2.0 * PI)
    }
}

/// `(γ(ω), S(ω))` for a single bath.
pub fn bath_rate(spec: &BathSpec, omega: f64) -> (f64, f64) {
    (spec.rate(omega), spec.lamb(omega))
}
