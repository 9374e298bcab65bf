//! The 1D spinless Holstein chain on a qubit array with one oscillator per qubit.
//!
//! H = −t Σ (c_i†c_{i+1} + h.c.) + ω Σ a_i†a_i − g Σ (n_i − 1/2)(a_i + a_i†)
//!
//! is built in its spin form through the Jordan–Wigner identities
//! c_i†c_{i+1} = S_i⁺S_{i+1}⁻ and n_i = S_i^z + 1/2:
//!
//! H = −t Σ (S_i⁺S_{i+1}⁻ + h.c.) + ω Σ a_i†a_i − λ Σ (a_i + a_i†)⁴
//!     − g Σ S_i^z (a_i + a_i†) − B^z Σ S_i^z − B^x Σ S_i^x
//!
//! The space holds N qubits followed by N oscillators. A periodic chain
//! gets the plain spin ring bond S_{N−1}⁺S_0⁻ + h.c., which is the hardware
//! ring and differs from the periodic fermion chain by a parity-dependent
//! boundary sign.

mod ramp;
mod scan;

pub use ramp::{adiabatic_ramp, staggered_product_state, RampOutcome, RampPath, RampSchedule, CUTOFF_WARNING_WEIGHT};
pub use scan::{phase_point, phase_scan, PhasePoint};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::eigen::{lowest_eigenpairs, LanczosOptions};
use crate::error::{Error, Result};
use crate::hilbert::{HilbertSpec, StateVector, UP};
use crate::models::{chain_bonds, Boundary};
use crate::operator::{embed_local, jw_fermion, jw_string, site_operator, ConservedQuantity, Operator, SectorProjector, SiteOp};

/// Largest full Hilbert-space dimension the Holstein builders accept.
pub const HOLSTEIN_DIMENSION_LIMIT: usize = 2_000_000;
/// Required ‖Hψ − Eψ‖ of every returned eigenpair.
pub const GROUND_STATE_RESIDUAL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolsteinSpec {
    #[serde(rename = "N")]
    pub n_sites: usize,
    pub hopping: f64,
    pub phonon_freq: f64,
    pub coupling: f64,
    #[serde(default)]
    pub boundary: Boundary,
    pub phonon_cutoff: usize,
    /// λ in −λ (a + a†)⁴.
    #[serde(default)]
    pub anharmonic: f64,
    #[serde(default)]
    pub chemical_bz: f64,
    #[serde(default)]
    pub leakage_bx: f64,
    /// Fermion count; `None` means N/2.
    #[serde(default)]
    pub filling: Option<usize>,
}

impl HolsteinSpec {
    pub fn new(n_sites: usize, hopping: f64, phonon_freq: f64, coupling: f64, phonon_cutoff: usize) -> Self {
        Self {
            n_sites,
            hopping,
            phonon_freq,
            coupling,
            boundary: Boundary::Open,
            phonon_cutoff,
            anharmonic: 0.0,
            chemical_bz: 0.0,
            leakage_bx: 0.0,
            filling: None,
        }
    }

    /// From qubit-array parameters: t = J/4, ω = ω_p.
    pub fn from_hardware(n_sites: usize, exchange_j: f64, plasma_freq: f64, coupling: f64, phonon_cutoff: usize) -> Self {
        Self::new(n_sites, exchange_j / 4.0, plasma_freq, coupling, phonon_cutoff)
    }

    pub fn filling(&self) -> usize {
        self.filling.unwrap_or(self.n_sites / 2)
    }

    pub fn dimension(&self) -> Option<usize> {
        let qubits = 1usize.checked_shl(self.n_sites as u32)?;
        let phonons = (self.phonon_cutoff + 1).checked_pow(self.n_sites as u32)?;
        qubits.checked_mul(phonons)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 2 {
            return Err(Error::Config(format!("Holstein chain needs N >= 2, got {}", self.n_sites)));
        }
        if self.phonon_cutoff < 1 {
            return Err(Error::Config("phonon_cutoff must be at least 1".into()));
        }
        if self.filling() > self.n_sites {
            return Err(Error::Config(format!(
                "filling {} exceeds the number of sites {}",
                self.filling(),
                self.n_sites
            )));
        }
        for (name, v) in [
            ("hopping", self.hopping),
            ("phonon_freq", self.phonon_freq),
            ("coupling", self.coupling),
            ("anharmonic", self.anharmonic),
            ("chemical_bz", self.chemical_bz),
            ("leakage_bx", self.leakage_bx),
        ] {
            if !v.is_finite() {
                return Err(Error::Config(format!("{name} must be finite, got {v}")));
            }
        }
        if self.anharmonic != 0.0 && self.phonon_cutoff < 2 {
            return Err(Error::Config("anharmonic phonons need phonon_cutoff >= 2".into()));
        }
        match self.dimension() {
            Some(d) if d <= HOLSTEIN_DIMENSION_LIMIT => Ok(()),
            other => Err(Error::Resource {
                dimension: other.unwrap_or(usize::MAX),
                limit: HOLSTEIN_DIMENSION_LIMIT,
            }),
        }
    }

    pub fn space(&self) -> Result<HilbertSpec> {
        self.validate()?;
        HilbertSpec::qubits_with_oscillators(self.n_sites, self.phonon_cutoff)
    }

    pub fn sector(&self) -> Result<SectorProjector> {
        SectorProjector::new(&self.space()?, ConservedQuantity::FermionNumber, self.filling() as f64)
    }
}

/// Coefficient-free pieces of the Hamiltonian, so that H = t·hopping +
/// ω·phonon + g·coupling + λ·quartic + B^z·field_z + B^x·field_x.
#[derive(Debug, Clone)]
pub struct HolsteinTerms {
    pub space: HilbertSpec,
    /// −Σ (S_i⁺S_j⁻ + h.c.)
    pub hopping: Operator,
    /// Σ a†a
    pub phonon: Operator,
    /// −Σ S^z(a + a†)
    pub coupling: Operator,
    /// −Σ (a + a†)⁴
    pub quartic: Operator,
    /// −Σ S^z
    pub field_z: Operator,
    /// −Σ S^x
    pub field_x: Operator,
    /// −Σ (−1)^i S_i^z, pinning the pattern |↑↓↑↓…⟩.
    pub staggered: Operator,
}

fn op(space: &HilbertSpec, site: usize, kind: SiteOp) -> Operator {
    site_operator(space, site, kind).expect("qubit/oscillator layout is fixed")
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

impl HolsteinTerms {
    pub fn build(spec: &HolsteinSpec) -> Result<Self> {
        let space = spec.space()?;
        let n = spec.n_sites;
        let osc = |i: usize| n + i;

        let mut hopping = Operator::zero(&space);
        for (i, j) in chain_bonds(n, spec.boundary) {
            let hop = &op(&space, i, SiteOp::Splus) * &op(&space, j, SiteOp::Sminus);
            hopping = &hopping - &(&hop + &hop.adjoint());
        }

        let mut phonon = Operator::zero(&space);
        let mut coupling = Operator::zero(&space);
        let mut quartic = Operator::zero(&space);
        let mut field_z = Operator::zero(&space);
        let mut field_x = Operator::zero(&space);
        let mut staggered = Operator::zero(&space);
        let x_local = SiteOp::Phi(1.0).local_matrix(space.site(osc(0)))?;
        let x2 = &x_local * &x_local;
        let x4: DMatrix<C64> = &x2 * &x2;
        for i in 0..n {
            let sz = op(&space, i, SiteOp::Sz);
            phonon = &phonon + &op(&space, osc(i), SiteOp::NumOp);
            coupling = &coupling - &(&sz * &op(&space, osc(i), SiteOp::Phi(1.0)));
            let q = Operator::new(space.clone(), embed_local(&space, osc(i), &x4)?)?;
            quartic = &quartic - &q;
            field_z = &field_z - &sz;
            field_x = &field_x - &op(&space, i, SiteOp::Sx);
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            staggered = &staggered - &sz.scale(real(sign));
        }
        Ok(Self {
            space,
            hopping: hopping.into_hermitian()?,
            phonon: phonon.into_hermitian()?,
            coupling: coupling.into_hermitian()?,
            quartic: quartic.into_hermitian()?,
            field_z,
            field_x,
            staggered,
        })
    }

    /// Sum of the terms with the coefficients of `spec`.
    pub fn assemble(&self, spec: &HolsteinSpec) -> Result<Operator> {
        let parts = [
            (spec.hopping, &self.hopping),
            (spec.phonon_freq, &self.phonon),
            (spec.coupling, &self.coupling),
            (spec.anharmonic, &self.quartic),
            (spec.chemical_bz, &self.field_z),
            (spec.leakage_bx, &self.field_x),
        ];
        let mut h = Operator::zero(&self.space);
        for (c, term) in parts {
            if c != 0.0 {
                h = &h + &term.scale(real(c));
            }
        }
        h.into_hermitian()
    }
}

pub fn holstein_hamiltonian(spec: &HolsteinSpec) -> Result<Operator> {
    HolsteinTerms::build(spec)?.assemble(spec)
}

/// The same Hamiltonian composed directly from Jordan–Wigner fermion
/// operators, as an independent construction. Open chains only.
pub fn holstein_hamiltonian_fermionic(spec: &HolsteinSpec) -> Result<Operator> {
    if spec.boundary == Boundary::Periodic {
        return Err(Error::Unsupported(
            "periodic fermionic Holstein chain: the ring bond carries a fermion-parity dependent sign; \
             use the spin form"
                .into(),
        ));
    }
    let space = spec.space()?;
    let n = spec.n_sites;
    let f: Vec<Operator> = (0..n).map(|i| jw_fermion(&space, i)).collect::<Result<_>>()?;
    let fd: Vec<Operator> = f.iter().map(Operator::adjoint).collect();
    let half = Operator::identity(&space).scale(real(0.5));
    let mut h = Operator::zero(&space);
    for i in 0..n - 1 {
        let hop = &(&fd[i] * &f[i + 1]) + &(&fd[i + 1] * &f[i]);
        h = &h - &hop.scale(real(spec.hopping));
    }
    for i in 0..n {
        let a = op(&space, n + i, SiteOp::A);
        let ad = op(&space, n + i, SiteOp::Adag);
        let x = &a + &ad;
        let density = &(&fd[i] * &f[i]) - &half;
        h = &h + &(&ad * &a).scale(real(spec.phonon_freq));
        h = &h - &(&density * &x).scale(real(spec.coupling));
        if spec.anharmonic != 0.0 {
            let x2 = &x * &x;
            h = &h - &(&x2 * &x2).scale(real(spec.anharmonic));
        }
        h = &h - &density.scale(real(spec.chemical_bz));
        if spec.leakage_bx != 0.0 {
            // S⁻ = f K(i) and S⁺ = K(i) f†, since K(i)² = 1
            let string = jw_string(&space, i)?;
            let sx = &(&f[i] * &string) + &(&string * &fd[i]);
            h = &h - &sx.scale(real(0.5 * spec.leakage_bx));
        }
    }
    h.into_hermitian()
}

#[derive(Debug, Clone)]
pub struct GroundStates {
    /// Ascending.
    pub energies: Vec<f64>,
    pub states: Vec<StateVector>,
    pub residuals: Vec<f64>,
}

impl GroundStates {
    /// E₁ − E₀, or `None` with a single state.
    pub fn gap(&self) -> Option<f64> {
        (self.energies.len() > 1).then(|| self.energies[1] - self.energies[0])
    }
}

/// Lowest `k` eigenpairs of `h` inside a conserved sector.
pub fn ground_state(h: &Operator, sector: &SectorProjector, k: usize) -> Result<GroundStates> {
    let block = sector.restrict_operator(h)?;
    let pairs = lowest_eigenpairs(&block, k, &LanczosOptions::default())?;
    if let Some((i, r)) = pairs.residuals.iter().enumerate().find(|(_, &r)| !(r < GROUND_STATE_RESIDUAL)) {
        return Err(Error::Solver(format!(
            "eigenpair {i} of the {}-dimensional sector has residual {r:e}",
            sector.dim()
        )));
    }
    let states = pairs.vectors.iter().map(|v| sector.embed(v)).collect::<Result<_>>()?;
    Ok(GroundStates {
        energies: pairs.values,
        states,
        residuals: pairs.residuals,
    })
}

fn occupation(psi: &StateVector) -> (Vec<usize>, impl Fn(usize, usize) -> bool + '_) {
    let space = psi.space();
    let qubits = space.two_level_sites();
    (qubits, move |index: usize, site: usize| space.digit(index, site) == UP)
}

/// ⟨n_i⟩ = ⟨S_i^z⟩ + 1/2 for every two-level site.
pub fn density_profile(psi: &StateVector) -> Vec<f64> {
    let (qubits, occupied) = occupation(psi);
    let mut n = vec![0.0; qubits.len()];
    for (idx, amp) in psi.amplitudes().iter().enumerate() {
        let w = amp.norm_sqr();
        if w == 0.0 {
            continue;
        }
        for (k, &site) in qubits.iter().enumerate() {
            if occupied(idx, site) {
                n[k] += w;
            }
        }
    }
    n
}

/// S_π = (4/N²) Σ_{ij} (−1)^{i−j} ⟨(n_i − 1/2)(n_j − 1/2)⟩, diagonal in the basis.
pub fn cdw_structure_factor(psi: &StateVector) -> f64 {
    let (qubits, occupied) = occupation(psi);
    let n = qubits.len() as f64;
    let mut s = 0.0;
    for (idx, amp) in psi.amplitudes().iter().enumerate() {
        let w = amp.norm_sqr();
        if w == 0.0 {
            continue;
        }
        let m: f64 = qubits
            .iter()
            .enumerate()
            .map(|(k, &site)| {
                let d = if occupied(idx, site) { 0.5 } else { -0.5 };
                if k % 2 == 0 {
                    d
                } else {
                    -d
                }
            })
            .sum();
        s += w * m * m;
    }
    4.0 * s / (n * n)
}

/// Σ_i ⟨n_i⟩
pub fn total_fermion_number(psi: &StateVector) -> f64 {
    density_profile(psi).iter().sum()
}

/// Expectation of a diagonal weight, used for number drift checks on raw vectors.
pub(crate) fn normalized_expectation(op: &Operator, psi: &DVector<C64>) -> f64 {
    let norm = psi.norm_squared();
    psi.dotc(&op.apply(psi)).re / norm
}
