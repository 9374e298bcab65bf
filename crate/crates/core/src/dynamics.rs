//! Unitary time evolution under a time-independent Hamiltonian.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::eigen::{dense_hermitian_eigen, expm_krylov, DENSE_EIGEN_LIMIT};
use crate::error::{Error, Result};
use crate::hilbert::StateVector;
use crate::operator::Operator;

/// Local error target of one Krylov substep.
pub const KRYLOV_STEP_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    /// Named expectation-value series, one entry per time.
    pub observables: BTreeMap<String, Vec<f64>>,
}

impl Trajectory {
    /// Adds ⟨ψ(t)|op|ψ(t)⟩ as a named series.
    pub fn record(&mut self, name: &str, op: &Operator) -> Result<()> {
        if op.space() != self.states.first().map_or(op.space(), |s| s.space()) {
            return Err(Error::Contract(format!("observable `{name}` lives on a different space")));
        }
        let series = self.states.iter().map(|s| op.expectation(s)).collect();
        self.observables.insert(name.to_string(), series);
        Ok(())
    }

    /// Adds a series computed by an arbitrary function of the state.
    pub fn record_with(&mut self, name: &str, f: impl Fn(&StateVector) -> f64) {
        let series = self.states.iter().map(f).collect();
        self.observables.insert(name.to_string(), series);
    }

    pub fn observable(&self, name: &str) -> Option<&[f64]> {
        self.observables.get(name).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// max_k |‖ψ(t_k)‖ − 1|
    pub fn max_norm_drift(&self) -> f64 {
        self.states.iter().map(|s| (s.norm() - 1.0).abs()).fold(0.0, f64::max)
    }
}

/// Propagates `psi0`, taken as the state at t = 0, to every time in the
/// ascending grid `times`.
///
/// Spaces up to [`DENSE_EIGEN_LIMIT`] use the exact spectral decomposition;
/// larger ones chain Krylov steps between consecutive grid points.
pub fn evolve(h: &Operator, psi0: &StateVector, times: &[f64]) -> Result<Trajectory> {
    if !h.is_hermitian() {
        return Err(Error::Contract(format!(
            "evolution requires a Hermitian generator (defect {:e})",
            h.hermiticity_defect()
        )));
    }
    if h.space() != psi0.space() {
        return Err(Error::Contract("initial state and Hamiltonian live on different spaces".into()));
    }
    if let Some(t) = times.iter().find(|t| !t.is_finite()) {
        return Err(Error::Config(format!("time grid contains non-finite value {t}")));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Config("time grid must be ascending".into()));
    }
    let space = psi0.space().clone();
    let amplitudes: Vec<DVector<C64>> = if h.dim() <= DENSE_EIGEN_LIMIT {
        let (energies, vectors) = dense_hermitian_eigen(&h.to_dense()?);
        let coeffs = vectors.adjoint() * psi0.amplitudes();
        times
            .iter()
            .map(|&t| {
                let phased = DVector::from_fn(energies.len(), |k, _| coeffs[k] * C64::from_polar(1.0, -energies[k] * t));
                &vectors * phased
            })
            .collect()
    } else {
        let mut out = Vec::with_capacity(times.len());
        let mut state = psi0.amplitudes().clone();
        let mut now = 0.0;
        for &t in times {
            if t != now {
                state = expm_krylov(h.matrix(), &state, t - now, KRYLOV_STEP_TOLERANCE);
                now = t;
            }
            out.push(state.clone());
        }
        out
    };
    let states = amplitudes
        .into_iter()
        .map(|a| StateVector::new(space.clone(), a))
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory {
        times: times.to_vec(),
        states,
        observables: BTreeMap::new(),
    })
}

/// exp(−iHt) as a dense matrix, for small spaces.
pub fn propagator(h: &Operator, t: f64) -> Result<DMatrix<C64>> {
    let (energies, vectors) = dense_hermitian_eigen(&h.to_dense()?);
    let phases = DVector::from_iterator(energies.len(), energies.iter().map(|e| C64::from_polar(1.0, -e * t)));
    Ok(&vectors * DMatrix::from_diagonal(&phases) * vectors.adjoint())
}
