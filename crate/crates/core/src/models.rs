//! Spin-chain, free-fermion and single-oscillator Hamiltonians.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::eigen::dense_hermitian_eigen;
use crate::error::{Error, Result};
use crate::hilbert::{HilbertSpec, SiteKind};
use crate::operator::{jw_fermion, site_operator, Operator, SiteOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Open,
    /// Adds the (N−1, 0) bond. For N = 2 the ring bond would duplicate the
    /// open bond and is omitted.
    Periodic,
}

/// Nearest-neighbour bonds of an `n`-site chain.
pub fn chain_bonds(n: usize, boundary: Boundary) -> Vec<(usize, usize)> {
    let mut bonds: Vec<(usize, usize)> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
    if boundary == Boundary::Periodic && n > 2 {
        bonds.push((n - 1, 0));
    }
    bonds
}

fn op(space: &HilbertSpec, site: usize, kind: SiteOp) -> Operator {
    site_operator(space, site, kind).expect("site kinds checked by caller")
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// H = −J_xy Σ (S^x_i S^x_{i+1} + S^y_i S^y_{i+1}) + J_z Σ S^z_i S^z_{i+1} − B_z Σ S^z_i
pub fn xxz_hamiltonian(n: usize, j_xy: f64, j_z: f64, b_z: f64, boundary: Boundary) -> Result<Operator> {
    if n < 2 {
        return Err(Error::Config(format!("XXZ chain needs at least 2 sites, got {n}")));
    }
    let space = HilbertSpec::qubits(n)?;
    let mut h = Operator::zero(&space);
    for (i, j) in chain_bonds(n, boundary) {
        let xx = &op(&space, i, SiteOp::Sx) * &op(&space, j, SiteOp::Sx);
        let yy = &op(&space, i, SiteOp::Sy) * &op(&space, j, SiteOp::Sy);
        let zz = &op(&space, i, SiteOp::Sz) * &op(&space, j, SiteOp::Sz);
        h = &h - &(&xx + &yy).scale(real(j_xy));
        h = &h + &zz.scale(real(j_z));
    }
    for i in 0..n {
        h = &h - &op(&space, i, SiteOp::Sz).scale(real(b_z));
    }
    h.into_hermitian()
}

/// H = −(J_xy/2) Σ (f_n† f_{n+1} + f_{n+1}† f_n) + J_z Σ (f_n†f_n − 1/2)(f_{n+1}†f_{n+1} − 1/2),
/// assembled from Jordan–Wigner fermion operators.
///
/// Only open chains are supported: the Jordan–Wigner image of the ring bond
/// carries a fermion-parity-dependent sign that this form does not contain.
pub fn free_fermion_hamiltonian(n: usize, j_xy: f64, j_z: f64, boundary: Boundary) -> Result<Operator> {
    if boundary == Boundary::Periodic {
        return Err(Error::Unsupported(
            "periodic free-fermion chain: the Jordan-Wigner ring bond picks up a fermion-parity \
             dependent sign; use the spin (XXZ) form for rings"
                .into(),
        ));
    }
    if n < 2 {
        return Err(Error::Config(format!("chain needs at least 2 sites, got {n}")));
    }
    let space = HilbertSpec::qubits(n)?;
    let f: Vec<Operator> = (0..n).map(|i| jw_fermion(&space, i)).collect::<Result<_>>()?;
    let fd: Vec<Operator> = f.iter().map(Operator::adjoint).collect();
    let half = Operator::identity(&space).scale(real(0.5));
    let density: Vec<Operator> = (0..n).map(|i| &(&fd[i] * &f[i]) - &half).collect();
    let mut h = Operator::zero(&space);
    for (i, j) in chain_bonds(n, boundary) {
        let hop = &(&fd[i] * &f[j]) + &(&fd[j] * &f[i]);
        h = &h - &hop.scale(real(j_xy / 2.0));
        h = &h + &(&density[i] * &density[j]).scale(real(j_z));
    }
    h.into_hermitian()
}

#[derive(Debug, Clone)]
pub struct OscillatorModel {
    pub hamiltonian: Operator,
    /// Set when the quartic term is strong enough that the lowest eigenstate
    /// is no longer predominantly |0⟩ (truncation-driven level reordering).
    pub level_reordering: bool,
}

/// ω(a†a + 1/2) − λ_scaled (a + a†)⁴ on a single truncated oscillator.
pub fn oscillator_hamiltonian(n_max: usize, omega: f64, anharmonic: Option<f64>) -> Result<OscillatorModel> {
    if anharmonic.is_some() && n_max < 2 {
        return Err(Error::Config("anharmonic oscillator needs n_max >= 2".into()));
    }
    let space = HilbertSpec::new(vec![SiteKind::Oscillator { n_max }])?;
    let num = op(&space, 0, SiteOp::NumOp);
    let mut h = &num.scale(real(omega)) + &Operator::identity(&space).scale(real(0.5 * omega));
    let mut level_reordering = false;
    if let Some(lambda) = anharmonic {
        let x = op(&space, 0, SiteOp::Phi(1.0));
        let x2 = &x * &x;
        let x4 = &x2 * &x2;
        h = &h - &x4.scale(real(lambda));
        let (_, vecs) = dense_hermitian_eigen(&h.to_dense()?);
        level_reordering = vecs[(0, 0)].norm_sqr() < 0.5;
    }
    Ok(OscillatorModel {
        hamiltonian: h.into_hermitian()?,
        level_reordering,
    })
}
