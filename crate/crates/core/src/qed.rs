//! One qubit coupled to one cavity mode in the rotating-wave approximation.
//!
//! H = −B^z σ^z/2 − B^x σ^x/2 + ν₀ a†a − g(a σ⁺ + a† σ⁻)
//!
//! The qubit is site 0 of the two-level basis. Its excited state |e⟩ is the
//! higher-energy eigenstate of −B^z σ^z/2 for B^z > 0, i.e. |↓⟩, so the
//! raising operator σ⁺ = |e⟩⟨g| is S⁻ on that site. Resonance is B^z = ν₀.

use nalgebra::DVector;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{evolve, Trajectory};
use crate::eigen::dense_hermitian_eigen;
use crate::error::{Error, Result};
use crate::hilbert::{HilbertSpec, SiteKind, StateVector, DOWN};
use crate::operator::{site_operator, ConservedQuantity, Operator, SectorProjector, SiteOp};

pub const DEFAULT_FOCK_CUTOFF: usize = 8;
/// Largest acceptable top-Fock-level population for a trustworthy run.
pub const CUTOFF_OCCUPATION_LIMIT: f64 = 1e-8;

const QUBIT: usize = 0;
const CAVITY: usize = 1;

fn default_cutoff() -> usize {
    DEFAULT_FOCK_CUTOFF
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QedSpec {
    pub qubit_bz: f64,
    #[serde(default)]
    pub qubit_bx: f64,
    /// ν₀, the cavity (array COM mode) frequency.
    pub resonator_freq: f64,
    pub coupling_g: f64,
    #[serde(default = "default_cutoff")]
    pub fock_cutoff: usize,
}

impl QedSpec {
    /// Qubit on resonance with the cavity, B^x = 0.
    pub fn resonant(resonator_freq: f64, coupling_g: f64) -> Self {
        Self {
            qubit_bz: resonator_freq,
            qubit_bx: 0.0,
            resonator_freq,
            coupling_g,
            fock_cutoff: DEFAULT_FOCK_CUTOFF,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.fock_cutoff < 1 {
            return Err(Error::Config("fock_cutoff must be at least 1".into()));
        }
        for (name, v) in [
            ("qubit_bz", self.qubit_bz),
            ("qubit_bx", self.qubit_bx),
            ("resonator_freq", self.resonator_freq),
            ("coupling_g", self.coupling_g),
        ] {
            if !v.is_finite() {
                return Err(Error::Config(format!("{name} must be finite, got {v}")));
            }
        }
        Ok(())
    }

    /// Δ = B^z − ν₀
    pub fn detuning(&self) -> f64 {
        self.qubit_bz - self.resonator_freq
    }

    pub fn space(&self) -> Result<HilbertSpec> {
        HilbertSpec::new(vec![SiteKind::TwoLevel, SiteKind::Oscillator { n_max: self.fock_cutoff }])
    }
}

fn op(space: &HilbertSpec, site: usize, kind: SiteOp) -> Operator {
    site_operator(space, site, kind).expect("qubit/cavity layout is fixed")
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn jc_hamiltonian(spec: &QedSpec) -> Result<Operator> {
    spec.validate()?;
    let space = spec.space()?;
    let qubit = &op(&space, QUBIT, SiteOp::Sz).scale(real(-spec.qubit_bz))
        - &op(&space, QUBIT, SiteOp::Sx).scale(real(spec.qubit_bx));
    let cavity = op(&space, CAVITY, SiteOp::NumOp).scale(real(spec.resonator_freq));
    // σ⁺ = S⁻, σ⁻ = S⁺ on the qubit
    let absorb = &op(&space, CAVITY, SiteOp::A) * &op(&space, QUBIT, SiteOp::Sminus);
    let emit = &op(&space, CAVITY, SiteOp::Adag) * &op(&space, QUBIT, SiteOp::Splus);
    let coupling = (&absorb + &emit).scale(real(-spec.coupling_g));
    (&(&qubit + &cavity) + &coupling).into_hermitian()
}

/// a†a + σ⁺σ⁻
pub fn excitation_number(space: &HilbertSpec) -> Operator {
    ConservedQuantity::ExcitationNumber.operator(space)
}

/// σ⁺σ⁻ = 1/2 − S^z, the excited-state population.
pub fn excited_population(space: &HilbertSpec) -> Operator {
    &Operator::identity(space).scale(real(0.5)) - &op(space, QUBIT, SiteOp::Sz)
}

pub fn photon_number(space: &HilbertSpec) -> Operator {
    op(space, CAVITY, SiteOp::NumOp)
}

/// |e⟩ ⊗ |0⟩
pub fn excited_vacuum(spec: &QedSpec) -> Result<StateVector> {
    StateVector::basis(spec.space()?, &[DOWN, 0])
}

/// Evolves `psi0` under the JC Hamiltonian and records P_e, n_phot, N_exc
/// and the top Fock level population p_top.
pub fn rabi_trajectory(spec: &QedSpec, psi0: &StateVector, times: &[f64]) -> Result<Trajectory> {
    let h = jc_hamiltonian(spec)?;
    let space = h.space().clone();
    let mut traj = evolve(&h, psi0, times)?;
    traj.record("P_e", &excited_population(&space))?;
    traj.record("n_phot", &photon_number(&space))?;
    traj.record("N_exc", &excitation_number(&space))?;
    let top = spec.fock_cutoff;
    traj.record_with("p_top", |s| s.level_population(CAVITY, top));
    Ok(traj)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DressedRow {
    pub detuning: f64,
    /// Four lowest eigenvalues, ascending.
    pub energies: [f64; 4],
    /// Gap of the single-excitation doublet.
    pub splitting: f64,
}

/// Lowest levels of the JC Hamiltonian for B^z = ν₀ + Δ over a detuning grid.
///
/// With B^x = 0 the splitting is taken from the exact 2×2 single-excitation
/// block; otherwise it is E₂ − E₁ of the full spectrum.
pub fn dressed_spectrum(template: &QedSpec, detunings: &[f64]) -> Result<Vec<DressedRow>> {
    template.validate()?;
    if let Some(d) = detunings.iter().find(|d| !d.is_finite()) {
        return Err(Error::Config(format!("detuning grid contains non-finite value {d}")));
    }
    detunings
        .par_iter()
        .map(|&detuning| {
            let spec = QedSpec {
                qubit_bz: template.resonator_freq + detuning,
                ..*template
            };
            let h = jc_hamiltonian(&spec)?;
            let (all, _) = dense_hermitian_eigen(&h.to_dense()?);
            let energies = [all[0], all[1], all[2], all[3]];
            let splitting = if spec.qubit_bx == 0.0 {
                let sector = SectorProjector::new(h.space(), ConservedQuantity::ExcitationNumber, 1.0)?;
                let (e, _) = dense_hermitian_eigen(&sector.restrict_operator(&h)?.to_dense());
                e[1] - e[0]
            } else {
                all[2] - all[1]
            };
            Ok(DressedRow {
                detuning,
                energies,
                splitting,
            })
        })
        .collect()
}

/// Populations of the two bare single-excitation states in a state vector:
/// (|e,0⟩, |g,1⟩).
pub fn single_excitation_weights(psi: &StateVector) -> (f64, f64) {
    let space = psi.space();
    let amps: &DVector<C64> = psi.amplitudes();
    let e0 = space.index_of(&[DOWN, 0]).map_or(0.0, |i| amps[i].norm_sqr());
    let g1 = space.index_of(&[1 - DOWN, 1]).map_or(0.0, |i| amps[i].norm_sqr());
    (e0, g1)
}
