//! Ground-state diagnostics over a grid of (t/ω, g/ω).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{cdw_structure_factor, density_profile, ground_state, holstein_hamiltonian, HolsteinSpec};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub t_over_omega: f64,
    pub g_over_omega: f64,
    /// E₀/ω in the filling sector.
    pub ground_energy: f64,
    /// (E₁ − E₀)/ω in the filling sector.
    pub excitation_gap: f64,
    /// S_π of the ground state.
    pub cdw_order: f64,
    pub density_profile: Vec<f64>,
    /// Largest top-phonon-level population of the ground state.
    pub top_level_weight: f64,
    /// Set when this grid point failed; the numeric fields are then NaN.
    pub error: Option<String>,
}

impl PhasePoint {
    fn failed(t: f64, g: f64, err: Error) -> Self {
        Self {
            t_over_omega: t,
            g_over_omega: g,
            ground_energy: f64::NAN,
            excitation_gap: f64::NAN,
            cdw_order: f64::NAN,
            density_profile: Vec::new(),
            top_level_weight: f64::NAN,
            error: Some(err.to_string()),
        }
    }
}

fn solve_point(spec: &HolsteinSpec) -> Result<PhasePoint> {
    if !(spec.phonon_freq > 0.0) {
        return Err(Error::Config(format!("phonon_freq must be positive, got {}", spec.phonon_freq)));
    }
    let h = holstein_hamiltonian(spec)?;
    let sector = spec.sector()?;
    let k = if sector.dim() > 1 { 2 } else { 1 };
    let gs = ground_state(&h, &sector, k)?;
    let omega = spec.phonon_freq;
    let psi = &gs.states[0];
    Ok(PhasePoint {
        t_over_omega: spec.hopping / omega,
        g_over_omega: spec.coupling / omega,
        ground_energy: gs.energies[0] / omega,
        excitation_gap: gs.gap().unwrap_or(0.0) / omega,
        cdw_order: cdw_structure_factor(psi),
        density_profile: density_profile(psi),
        top_level_weight: psi.max_top_level_population(),
        error: None,
    })
}

/// Ground-state diagnostics of one spec; failures are reported in the row.
pub fn phase_point(spec: &HolsteinSpec) -> PhasePoint {
    let omega = spec.phonon_freq;
    solve_point(spec).unwrap_or_else(|e| PhasePoint::failed(spec.hopping / omega, spec.coupling / omega, e))
}

/// One [`PhasePoint`] per (t, g) cell, ordered with t outer and g inner.
/// Hopping and coupling are set to the grid ratios times the template ω.
/// `workers = 0` uses the default thread count.
pub fn phase_scan(template: &HolsteinSpec, g_grid: &[f64], t_grid: &[f64], workers: usize) -> Result<Vec<PhasePoint>> {
    template.validate()?;
    if let Some(v) = g_grid.iter().chain(t_grid).find(|v| !v.is_finite()) {
        return Err(Error::Config(format!("scan grid contains non-finite value {v}")));
    }
    let omega = template.phonon_freq;
    let cells: Vec<HolsteinSpec> = t_grid
        .iter()
        .flat_map(|&t| {
            g_grid.iter().map(move |&g| HolsteinSpec {
                hopping: t * omega,
                coupling: g * omega,
                ..*template
            })
        })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(|| cells.par_iter().map(phase_point).collect()))
}
