//! Physical constants, device parameter records and the SI formulas for
//! junction arrays.
//!
//! This is the only module that works in SI units. Everything downstream is
//! dimensionless with ħ = 1 and energies measured in units of a reference
//! angular frequency (the plasma frequency ω_p for arrays, or the phonon
//! frequency ω for Holstein runs).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Magnetic flux quantum h/2e in Wb.
pub const FLUX_QUANTUM: f64 = 2.067833848e-15;
/// Reduced Planck constant in J·s.
pub const REDUCED_PLANCK: f64 = 1.054571817e-34;

/// Largest value of 2πLI_c/Φ₀ for which the quartic expansion of a shunted
/// dc-SQUID is accepted.
pub const SHUNTED_SQUID_VALIDITY: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub flux_quantum: f64,
    pub reduced_planck: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            flux_quantum: FLUX_QUANTUM,
            reduced_planck: REDUCED_PLANCK,
        }
    }
}

/// Parameters shared by every vertical (grounding) junction of an array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JunctionParams {
    /// I_c in A.
    pub critical_current: f64,
    /// C in F.
    pub capacitance: f64,
    /// i_b = I_b / I_c.
    pub bias_ratio: f64,
    /// Coupling junctions have critical current K² I_c.
    pub k_ratio: f64,
}

impl JunctionParams {
    pub fn new(critical_current: f64, capacitance: f64, bias_ratio: f64, k_ratio: f64) -> Result<Self> {
        let p = Self {
            critical_current,
            capacitance,
            bias_ratio,
            k_ratio,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.critical_current > 0.0 && self.critical_current.is_finite()) {
            return Err(Error::Config(format!(
                "critical current must be positive, got {}",
                self.critical_current
            )));
        }
        if !(self.capacitance > 0.0 && self.capacitance.is_finite()) {
            return Err(Error::Config(format!(
                "capacitance must be positive, got {}",
                self.capacitance
            )));
        }
        if !(self.k_ratio >= 1.0 && self.k_ratio.is_finite()) {
            return Err(Error::Config(format!("K must be at least 1, got {}", self.k_ratio)));
        }
        equilibrium_phase(self.bias_ratio).map(|_| ())
    }

    /// Josephson energy E_J = I_c Φ₀ / 2π in J.
    pub fn josephson_energy(&self) -> f64 {
        self.critical_current * FLUX_QUANTUM / (2.0 * PI)
    }

    /// Effective mass C(Φ₀/2π)² of one phase coordinate.
    pub fn phase_mass(&self) -> f64 {
        let flux = FLUX_QUANTUM / (2.0 * PI);
        self.capacitance * flux * flux
    }

    /// cos θ⁽⁰⁾ of the clean equilibrium.
    pub fn equilibrium_cos(&self) -> f64 {
        (1.0 - self.bias_ratio * self.bias_ratio).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QedCouplingParams {
    /// M in H.
    pub mutual_inductance: f64,
    /// I_c^Q of the qubit's dc-SQUID junctions, in A.
    pub qubit_critical_current: f64,
    pub array_size: usize,
}

impl QedCouplingParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.mutual_inductance > 0.0) {
            return Err(Error::Config("mutual inductance must be positive".into()));
        }
        if !(self.qubit_critical_current > 0.0) {
            return Err(Error::Config("qubit critical current must be positive".into()));
        }
        if self.array_size == 0 {
            return Err(Error::Config("array size must be at least 1".into()));
        }
        Ok(())
    }
}

/// Inductor-shunted dc-SQUID used as an anharmonic phonon mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShuntedSquidParams {
    /// L in H.
    pub inductance: f64,
    /// I_c of the SQUID in A.
    pub critical_current: f64,
}

impl ShuntedSquidParams {
    /// The screening parameter 2πLI_c/Φ₀.
    pub fn screening(&self) -> f64 {
        2.0 * PI * self.inductance * self.critical_current / FLUX_QUANTUM
    }
}

/// Result of expanding the shunted-SQUID potential to quartic order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShuntedSquidExpansion {
    /// L' = L(1 − 2πLI_c/Φ₀) in H.
    pub effective_inductance: f64,
    /// λ = (I_c/24)(2π/Φ₀)³, the coefficient of −Φ⁴, in J/Wb⁴.
    pub quartic_coefficient: f64,
    pub screening: f64,
}

/// Equilibrium phase θ⁽⁰⁾ = arcsin(i_b) of a current-biased junction.
pub fn equilibrium_phase(bias_ratio: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&bias_ratio) {
        return Err(Error::Domain(format!(
            "bias ratio must satisfy 0 <= i_b < 1, got {bias_ratio}"
        )));
    }
    Ok(bias_ratio.asin())
}

/// ω_p = √(2πI_c/Φ₀C)·(1 − i_b²)^{1/4} in rad/s.
pub fn plasma_frequency(p: &JunctionParams) -> f64 {
    let bare = (2.0 * PI * p.critical_current / (FLUX_QUANTUM * p.capacitance)).sqrt();
    bare * (1.0 - p.bias_ratio * p.bias_ratio).powf(0.25)
}

/// Qubit/center-of-mass-mode coupling g/ħ in rad/s for a charge qubit whose
/// dc-SQUID is biased at Φ₀/2:
///
/// g = (M/2)(I_c cos θ⁽⁰⁾) I_c^Q (2π/Φ₀) √(ħ / 2Cω_p N).
pub fn qed_coupling_g(j: &JunctionParams, q: &QedCouplingParams) -> Result<f64> {
    j.validate()?;
    q.validate()?;
    let omega_p = plasma_frequency(j);
    let cos0 = j.equilibrium_cos();
    let zero_point = (REDUCED_PLANCK / (2.0 * j.capacitance * omega_p * q.array_size as f64)).sqrt();
    let g = 0.5
        * q.mutual_inductance
        * (j.critical_current * cos0)
        * q.qubit_critical_current
        * (2.0 * PI / FLUX_QUANTUM)
        * zero_point;
    Ok(g / REDUCED_PLANCK)
}

/// Effective inductance and quartic coefficient of an inductor-shunted
/// dc-SQUID. Fails when 2πLI_c/Φ₀ ≥ [`SHUNTED_SQUID_VALIDITY`].
pub fn effective_inductance(s: &ShuntedSquidParams) -> Result<ShuntedSquidExpansion> {
    if !(s.inductance > 0.0) || s.critical_current < 0.0 {
        return Err(Error::Config(
            "shunt inductance must be positive and critical current non-negative".into(),
        ));
    }
    let beta = s.screening();
    if beta >= SHUNTED_SQUID_VALIDITY {
        return Err(Error::Precondition(format!(
            "2*pi*L*I_c/Phi0 = {beta:.4} is not small (limit {SHUNTED_SQUID_VALIDITY}); quartic expansion invalid"
        )));
    }
    Ok(ShuntedSquidExpansion {
        effective_inductance: s.inductance * (1.0 - beta),
        quartic_coefficient: s.critical_current / 24.0 * (2.0 * PI / FLUX_QUANTUM).powi(3),
        screening: beta,
    })
}

/// Dimensionless oscillator parameters for an anharmonic phonon mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnharmonicMode {
    /// ω = 1/√(L'C_J) in rad/s.
    pub frequency: f64,
    /// Zero-point flux Φ_zp = √(ħZ/2), Z = √(L'/C_J), in Wb.
    pub zero_point_flux: f64,
    /// λΦ_zp⁴ / ħω: the coefficient of −(a + a†)⁴ in units of ω.
    pub lambda_scaled: f64,
}

/// Combines the shunted-SQUID expansion with the junction capacitance C_J to
/// give the model-unit quartic coefficient used by the oscillator builder.
pub fn anharmonic_mode(s: &ShuntedSquidParams, junction_capacitance: f64) -> Result<AnharmonicMode> {
    if !(junction_capacitance > 0.0) {
        return Err(Error::Config("junction capacitance must be positive".into()));
    }
    let exp = effective_inductance(s)?;
    let l = exp.effective_inductance;
    let frequency = 1.0 / (l * junction_capacitance).sqrt();
    let impedance = (l / junction_capacitance).sqrt();
    let zero_point_flux = (REDUCED_PLANCK * impedance / 2.0).sqrt();
    let lambda_scaled = exp.quartic_coefficient * zero_point_flux.powi(4) / (REDUCED_PLANCK * frequency);
    Ok(AnharmonicMode {
        frequency,
        zero_point_flux,
        lambda_scaled,
    })
}
