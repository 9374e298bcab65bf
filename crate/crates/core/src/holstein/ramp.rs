//! Adiabatic preparation: start from a staggered product state and switch
//! on hopping and coupling along a path s ∈ [0, 1].
//!
//! H(s) = f(s)(t·hopping + g·coupling) + ω·phonon + λ·quartic + B^z·field_z
//!        + B^x·field_x + h(1 − s)·staggered
//!
//! The staggered pinning field h is an addition to the bare protocol: with
//! h = 0 the start point is degenerate inside the half-filling sector and
//! the product state spreads over several branches.

use nalgebra::DVector;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{ground_state, normalized_expectation, HolsteinSpec, HolsteinTerms};
use crate::eigen::{expm_krylov, lowest_eigenpairs, LanczosOptions, LinearCombination};
use crate::error::{Error, Result};
use crate::hilbert::{HilbertSpec, StateVector, DOWN, UP};
use crate::operator::ConservedQuantity;

/// Top-Fock-level weight above which a ramp reports a cutoff warning.
pub const CUTOFF_WARNING_WEIGHT: f64 = 1e-4;
const STEP_TOLERANCE: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RampPath {
    /// f(s) = s
    #[default]
    Linear,
    /// f(s) = 3s² − 2s³
    Smoothstep,
}

impl RampPath {
    pub fn profile(&self, s: f64) -> f64 {
        match self {
            RampPath::Linear => s,
            RampPath::Smoothstep => s * s * (3.0 - 2.0 * s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RampSchedule {
    pub total_time: f64,
    pub steps: usize,
    #[serde(default)]
    pub path: RampPath,
    /// Staggered pinning field at s = 0, switched off linearly.
    #[serde(default)]
    pub preparation_field: f64,
}

impl RampSchedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.total_time >= 0.0 && self.total_time.is_finite()) {
            return Err(Error::Config(format!("total_time must be finite and >= 0, got {}", self.total_time)));
        }
        if self.steps < 1 {
            return Err(Error::Config("ramp needs at least one step".into()));
        }
        if !self.preparation_field.is_finite() {
            return Err(Error::Config("preparation_field must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct RampOutcome {
    pub final_state: StateVector,
    /// |⟨E₀(target)|ψ(T)⟩|² within the target's filling sector.
    pub fidelity: f64,
    /// max over steps of |⟨N_f⟩(τ) − N_f(0)|
    pub number_drift: f64,
    /// Largest top-Fock-level population seen along the ramp.
    pub max_top_weight: f64,
    pub cutoff_warning: bool,
    /// ⟨N_f⟩ after every step, starting with the initial state.
    pub number_history: Vec<f64>,
}

/// |↑↓↑↓…⟩ ⊗ |0…0⟩: even sites occupied, phonon vacuum.
pub fn staggered_product_state(space: &HilbertSpec, n_sites: usize) -> Result<StateVector> {
    let mut digits: Vec<usize> = (0..n_sites).map(|i| if i % 2 == 0 { UP } else { DOWN }).collect();
    digits.extend(std::iter::repeat(0).take(space.n_sites() - n_sites));
    StateVector::basis(space.clone(), &digits)
}

/// Runs the ramp with midpoint Hamiltonians on `schedule.steps` equal
/// intervals, each propagated exactly up to the Krylov tolerance.
pub fn adiabatic_ramp(spec: &HolsteinSpec, schedule: &RampSchedule) -> Result<RampOutcome> {
    schedule.validate()?;
    let terms = HolsteinTerms::build(spec)?;
    let space = terms.space.clone();
    let n = spec.n_sites;
    let staggered_filling = n.div_ceil(2);
    if spec.filling() != staggered_filling {
        return Err(Error::Config(format!(
            "the staggered initial state has {staggered_filling} fermions, spec asks for filling {}",
            spec.filling()
        )));
    }
    let psi0 = staggered_product_state(&space, n)?;
    let number = ConservedQuantity::FermionNumber.operator(&space);
    let n0 = number.expectation(&psi0);
    let top_weight = |psi: &DVector<C64>| -> f64 {
        let norm = psi.norm_squared();
        space
            .oscillator_sites()
            .into_iter()
            .map(|s| {
                let top = space.site(s).dim() - 1;
                psi.iter()
                    .enumerate()
                    .filter(|(i, _)| space.digit(*i, s) == top)
                    .map(|(_, a)| a.norm_sqr())
                    .sum::<f64>()
                    / norm
            })
            .fold(0.0, f64::max)
    };

    let mut psi = psi0.amplitudes().clone();
    let mut drift: f64 = 0.0;
    let mut max_top = top_weight(&psi);
    let mut history = vec![n0];
    if schedule.total_time > 0.0 {
        let dt = schedule.total_time / schedule.steps as f64;
        for k in 0..schedule.steps {
            let s = (k as f64 + 0.5) / schedule.steps as f64;
            let f = schedule.path.profile(s);
            let generator = LinearCombination {
                terms: vec![
                    (f * spec.hopping, terms.hopping.matrix()),
                    (f * spec.coupling, terms.coupling.matrix()),
                    (spec.phonon_freq, terms.phonon.matrix()),
                    (spec.anharmonic, terms.quartic.matrix()),
                    (spec.chemical_bz, terms.field_z.matrix()),
                    (spec.leakage_bx, terms.field_x.matrix()),
                    (schedule.preparation_field * (1.0 - s), terms.staggered.matrix()),
                ],
            };
            psi = expm_krylov(&generator, &psi, dt, STEP_TOLERANCE);
            let nf = normalized_expectation(&number, &psi);
            drift = drift.max((nf - n0).abs());
            history.push(nf);
            max_top = max_top.max(top_weight(&psi));
        }
    }
    let final_state = StateVector::normalized(space.clone(), psi)?;

    let target = terms.assemble(spec)?;
    let reference = if spec.leakage_bx == 0.0 {
        ground_state(&target, &spec.sector()?, 1)?.states.remove(0)
    } else {
        let pairs = lowest_eigenpairs(target.matrix(), 1, &LanczosOptions::default())?;
        StateVector::normalized(space.clone(), pairs.vectors[0].clone())?
    };
    Ok(RampOutcome {
        fidelity: reference.overlap(&final_state),
        final_state,
        number_drift: drift,
        max_top_weight: max_top,
        cutoff_warning: max_top > CUTOFF_WARNING_WEIGHT,
        number_history: history,
    })
}
