//! Sparse operators on labeled tensor-product spaces, Jordan–Wigner fermions
//! and conserved-quantity sectors.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{HilbertSpec, SiteKind, StateVector, DOWN, UP};
use crate::sparse::SparseMatrix;

/// Threshold on max |A − A†| for an operator to count as Hermitian.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Operators are converted to dense form only up to this dimension.
pub const DENSE_DIMENSION_LIMIT: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    space: HilbertSpec,
    matrix: SparseMatrix,
    hermitian: bool,
}

impl Operator {
    pub fn new(space: HilbertSpec, matrix: SparseMatrix) -> Result<Self> {
        if matrix.nrows() != space.dim() || matrix.ncols() != space.dim() {
            return Err(Error::Contract(format!(
                "{}x{} matrix does not act on a space of dimension {}",
                matrix.nrows(),
                matrix.ncols(),
                space.dim()
            )));
        }
        Ok(Self {
            space,
            matrix,
            hermitian: false,
        })
    }

    pub fn identity(space: &HilbertSpec) -> Self {
        Self {
            matrix: SparseMatrix::identity(space.dim()),
            space: space.clone(),
            hermitian: true,
        }
    }

    pub fn zero(space: &HilbertSpec) -> Self {
        Self {
            matrix: SparseMatrix::zeros(space.dim(), space.dim()),
            space: space.clone(),
            hermitian: true,
        }
    }

    /// Diagonal operator with the given real diagonal.
    pub fn diagonal(space: &HilbertSpec, diag: impl Fn(usize) -> f64) -> Self {
        let d: Vec<C64> = (0..space.dim()).map(|i| C64::new(diag(i), 0.0)).collect();
        Self {
            matrix: SparseMatrix::diagonal(&d),
            space: space.clone(),
            hermitian: true,
        }
    }

    pub fn space(&self) -> &HilbertSpec {
        &self.space
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.matrix.hermiticity_defect()
    }

    /// True when the operator was verified Hermitian or passes the check now.
    pub fn is_hermitian(&self) -> bool {
        self.hermitian || self.hermiticity_defect() < HERMITIAN_TOLERANCE
    }

    /// Verifies hermiticity and records it.
    pub fn into_hermitian(mut self) -> Result<Self> {
        let defect = self.hermiticity_defect();
        if defect >= HERMITIAN_TOLERANCE {
            return Err(Error::Contract(format!("operator is not Hermitian (max |A - A^dag| = {defect:e})")));
        }
        self.hermitian = true;
        Ok(self)
    }

    pub fn adjoint(&self) -> Self {
        Self {
            space: self.space.clone(),
            matrix: self.matrix.adjoint(),
            hermitian: self.hermitian,
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            space: self.space.clone(),
            matrix: self.matrix.scale(s),
            hermitian: self.hermitian && s.im == 0.0,
        }
    }

    /// [A, B] = AB − BA
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// {A, B} = AB + BA
    pub fn anticommutator(&self, other: &Self) -> Self {
        &(self * other) + &(other * self)
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.max_abs()
    }

    pub fn apply(&self, psi: &DVector<C64>) -> DVector<C64> {
        self.matrix.mul_vec(psi)
    }

    /// Real part of ⟨ψ|A|ψ⟩.
    pub fn expectation(&self, psi: &StateVector) -> f64 {
        psi.amplitudes().dotc(&self.apply(psi.amplitudes())).re
    }

    pub fn to_dense(&self) -> Result<DMatrix<C64>> {
        if self.dim() > DENSE_DIMENSION_LIMIT {
            return Err(Error::Resource {
                dimension: self.dim(),
                limit: DENSE_DIMENSION_LIMIT,
            });
        }
        Ok(self.matrix.to_dense())
    }

    fn check_same_space(&self, other: &Self) {
        assert!(self.space == other.space, "operators act on different Hilbert spaces");
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        self.check_same_space(rhs);
        Operator {
            space: self.space.clone(),
            matrix: self.matrix.add(&rhs.matrix),
            hermitian: self.hermitian && rhs.hermitian,
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        self.check_same_space(rhs);
        Operator {
            space: self.space.clone(),
            matrix: self.matrix.sub(&rhs.matrix),
            hermitian: self.hermitian && rhs.hermitian,
        }
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        self.check_same_space(rhs);
        Operator {
            space: self.space.clone(),
            matrix: self.matrix.matmul(&rhs.matrix),
            hermitian: false,
        }
    }
}

impl Mul<&Operator> for f64 {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        rhs.scale(C64::new(self, 0.0))
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        self.scale(C64::new(-1.0, 0.0))
    }
}

/// Single-site operator kinds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SiteOp {
    Sx,
    Sy,
    Sz,
    /// S⁺ = S^x + iS^y
    Splus,
    /// S⁻ = S^x − iS^y
    Sminus,
    /// Annihilation operator a.
    A,
    Adag,
    NumOp,
    /// Φ = scale·(a + a†); the scale is the zero-point amplitude.
    Phi(f64),
}

impl SiteOp {
    fn is_spin(&self) -> bool {
        matches!(self, SiteOp::Sx | SiteOp::Sy | SiteOp::Sz | SiteOp::Splus | SiteOp::Sminus)
    }

    /// Local matrix on a site of the given kind.
    pub fn local_matrix(&self, site: SiteKind) -> Result<DMatrix<C64>> {
        let c = |re: f64, im: f64| C64::new(re, im);
        match (site, self.is_spin()) {
            (SiteKind::TwoLevel, true) => {
                let m = match self {
                    SiteOp::Sx => [[c(0.0, 0.0), c(0.5, 0.0)], [c(0.5, 0.0), c(0.0, 0.0)]],
                    SiteOp::Sy => [[c(0.0, 0.0), c(0.0, -0.5)], [c(0.0, 0.5), c(0.0, 0.0)]],
                    SiteOp::Sz => [[c(0.5, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-0.5, 0.0)]],
                    SiteOp::Splus => [[c(0.0, 0.0), c(1.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]],
                    _ => [[c(0.0, 0.0), c(0.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
                };
                Ok(DMatrix::from_fn(2, 2, |r, col| m[r][col]))
            }
            (SiteKind::Oscillator { n_max }, false) => {
                let d = n_max + 1;
                let a = DMatrix::from_fn(d, d, |r, col| {
                    if col == r + 1 {
                        c((col as f64).sqrt(), 0.0)
                    } else {
                        c(0.0, 0.0)
                    }
                });
                Ok(match *self {
                    SiteOp::A => a,
                    SiteOp::Adag => a.adjoint(),
                    SiteOp::NumOp => DMatrix::from_fn(d, d, |r, col| if r == col { c(r as f64, 0.0) } else { c(0.0, 0.0) }),
                    SiteOp::Phi(scale) => (&a + a.adjoint()) * c(scale, 0.0),
                    _ => unreachable!(),
                })
            }
            _ => Err(Error::Contract(format!("{self:?} cannot act on a {site:?} site"))),
        }
    }
}

/// Embeds a local matrix acting on `site` into the full space.
pub fn embed_local(space: &HilbertSpec, site: usize, local: &DMatrix<C64>) -> Result<SparseMatrix> {
    if site >= space.n_sites() {
        return Err(Error::Contract(format!("site {site} out of range ({} sites)", space.n_sites())));
    }
    let d = space.site(site).dim();
    if local.nrows() != d || local.ncols() != d {
        return Err(Error::Contract(format!("local matrix must be {d}x{d}")));
    }
    let mut triplets = Vec::new();
    for col in 0..space.dim() {
        let from = space.digit(col, site);
        for to in 0..d {
            let v = local[(to, from)];
            if v != C64::new(0.0, 0.0) {
                triplets.push((space.with_digit(col, site, to), col, v));
            }
        }
    }
    Ok(SparseMatrix::from_triplets(space.dim(), space.dim(), triplets))
}

/// Single-site operator embedded with identities on every other site.
pub fn site_operator(space: &HilbertSpec, site: usize, kind: SiteOp) -> Result<Operator> {
    if site >= space.n_sites() {
        return Err(Error::Contract(format!("site {site} out of range ({} sites)", space.n_sites())));
    }
    let local = kind.local_matrix(space.site(site))?;
    let matrix = embed_local(space, site, &local)?;
    let hermitian = matches!(kind, SiteOp::Sx | SiteOp::Sy | SiteOp::Sz | SiteOp::NumOp | SiteOp::Phi(_));
    Ok(Operator {
        space: space.clone(),
        matrix,
        hermitian,
    })
}

/// The Jordan–Wigner string K(n) = exp[iπ Σ_{m<n} (S_m^z + 1/2)] = Π_{m<n} (−2S_m^z).
pub fn jw_string(space: &HilbertSpec, n: usize) -> Result<Operator> {
    if n >= space.n_sites() {
        return Err(Error::Contract(format!("site {n} out of range")));
    }
    let mut k = Operator::identity(space);
    for m in 0..n {
        if space.site(m) != SiteKind::TwoLevel {
            return Err(Error::Contract(format!(
                "Jordan-Wigner string crosses oscillator site {m}"
            )));
        }
        let factor = site_operator(space, m, SiteOp::Sz)?.scale(C64::new(-2.0, 0.0));
        k = &k * &factor;
    }
    k.hermitian = true;
    Ok(k)
}

/// Fermion annihilation operator f_n = S_n^− K(n).
///
/// Occupied means |↑⟩, so f_n†f_n = S_n^z + 1/2. Sites 0..=n must all be
/// two-level; oscillator sites may follow.
pub fn jw_fermion(space: &HilbertSpec, n: usize) -> Result<Operator> {
    if n >= space.n_sites() || space.site(n) != SiteKind::TwoLevel {
        return Err(Error::Contract(format!("site {n} is not a two-level site")));
    }
    let string = jw_string(space, n)?;
    let lower = site_operator(space, n, SiteOp::Sminus)?;
    Ok(&lower * &string)
}

/// Largest entrywise deviation of the canonical anticommutation relations
/// {f_m, f_n} = {f_m†, f_n†} = 0, {f_m, f_n†} = δ_mn over an `n`-site chain.
pub fn verify_fermion_algebra(n: usize) -> Result<f64> {
    if !(1..=8).contains(&n) {
        return Err(Error::Resource {
            dimension: 1usize.checked_shl(n as u32).unwrap_or(usize::MAX),
            limit: 1 << 8,
        });
    }
    let space = HilbertSpec::qubits(n)?;
    let f: Vec<Operator> = (0..n).map(|i| jw_fermion(&space, i)).collect::<Result<_>>()?;
    let fd: Vec<Operator> = f.iter().map(Operator::adjoint).collect();
    let id = Operator::identity(&space);
    let mut worst = 0.0f64;
    for m in 0..n {
        for k in 0..n {
            worst = worst.max(f[m].anticommutator(&f[k]).max_abs());
            worst = worst.max(fd[m].anticommutator(&fd[k]).max_abs());
            let mut mixed = f[m].anticommutator(&fd[k]);
            if m == k {
                mixed = &mixed - &id;
            }
            worst = worst.max(mixed.max_abs());
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConservedQuantity {
    /// Σ S^z over two-level sites.
    TotalSz,
    /// Σ (S^z + 1/2): the number of |↑⟩ sites.
    FermionNumber,
    /// Oscillator quanta plus two-level sites in |↓⟩, the state raised in
    /// energy by a positive field term −B S^z.
    ExcitationNumber,
}

impl ConservedQuantity {
    pub fn value(&self, space: &HilbertSpec, index: usize) -> f64 {
        let mut q = 0.0;
        for (s, kind) in space.sites().iter().enumerate() {
            let d = space.digit(index, s);
            q += match (self, kind) {
                (ConservedQuantity::TotalSz, SiteKind::TwoLevel) => {
                    if d == UP {
                        0.5
                    } else {
                        -0.5
                    }
                }
                (ConservedQuantity::FermionNumber, SiteKind::TwoLevel) => (d == UP) as u8 as f64,
                (ConservedQuantity::ExcitationNumber, SiteKind::TwoLevel) => (d == DOWN) as u8 as f64,
                (ConservedQuantity::ExcitationNumber, SiteKind::Oscillator { .. }) => d as f64,
                _ => 0.0,
            };
        }
        q
    }

    /// The quantity as a diagonal operator.
    pub fn operator(&self, space: &HilbertSpec) -> Operator {
        Operator::diagonal(space, |i| self.value(space, i))
    }
}

/// Basis states sharing one eigenvalue of a conserved quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorProjector {
    space: HilbertSpec,
    quantity: ConservedQuantity,
    eigenvalue: f64,
    basis: Vec<usize>,
}

impl SectorProjector {
    pub fn new(space: &HilbertSpec, quantity: ConservedQuantity, eigenvalue: f64) -> Result<Self> {
        let basis: Vec<usize> = (0..space.dim())
            .filter(|&i| (quantity.value(space, i) - eigenvalue).abs() < 1e-9)
            .collect();
        if basis.is_empty() {
            return Err(Error::Config(format!("{quantity:?} = {eigenvalue} sector is empty")));
        }
        Ok(Self {
            space: space.clone(),
            quantity,
            eigenvalue,
            basis,
        })
    }

    pub fn space(&self) -> &HilbertSpec {
        &self.space
    }

    pub fn quantity(&self) -> ConservedQuantity {
        self.quantity
    }

    pub fn eigenvalue(&self) -> f64 {
        self.eigenvalue
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_indices(&self) -> &[usize] {
        &self.basis
    }

    pub fn contains(&self, index: usize) -> bool {
        self.basis.binary_search(&index).is_ok()
    }

    /// P as a diagonal 0/1 operator.
    pub fn projector(&self) -> Operator {
        Operator::diagonal(&self.space, |i| if self.contains(i) { 1.0 } else { 0.0 })
    }

    /// The block of `op` inside the sector. Fails if `op` connects the sector
    /// to its complement.
    pub fn restrict_operator(&self, op: &Operator) -> Result<SparseMatrix> {
        if op.space() != &self.space {
            return Err(Error::Contract("operator and sector live on different spaces".into()));
        }
        let mut inside = vec![false; self.space.dim()];
        for &i in &self.basis {
            inside[i] = true;
        }
        let leak = op
            .matrix()
            .triplets()
            .filter(|&(r, c, _)| inside[r] != inside[c])
            .map(|(_, _, v)| v.norm())
            .fold(0.0, f64::max);
        if leak > 0.0 {
            return Err(Error::Contract(format!(
                "operator does not conserve {:?} (max leaking element {leak:e})",
                self.quantity
            )));
        }
        Ok(op.matrix().submatrix(&self.basis))
    }

    /// Lifts a sector vector back to the full space.
    pub fn embed(&self, sector_vector: &DVector<C64>) -> Result<StateVector> {
        if sector_vector.len() != self.dim() {
            return Err(Error::Contract("vector length does not match sector dimension".into()));
        }
        let mut full = DVector::zeros(self.space.dim());
        for (k, &i) in self.basis.iter().enumerate() {
            full[i] = sector_vector[k];
        }
        StateVector::normalized(self.space.clone(), full)
    }

    pub fn restrict_state(&self, psi: &StateVector) -> DVector<C64> {
        DVector::from_iterator(self.dim(), self.basis.iter().map(|&i| psi.amplitudes()[i]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn spin_matrices() {
        let h = HilbertSpec::qubits(1).unwrap();
        let sz = site_operator(&h, 0, SiteOp::Sz).unwrap();
        assert_eq!(sz.matrix().get(0, 0), c(0.5));
        assert_eq!(sz.matrix().get(1, 1), c(-0.5));
        let sx = site_operator(&h, 0, SiteOp::Sx).unwrap();
        let sy = site_operator(&h, 0, SiteOp::Sy).unwrap();
        // [Sx, Sy] = i Sz
        let comm = sx.commutator(&sy);
        let diff = &comm - &sz.scale(C64::new(0.0, 1.0));
        assert!(diff.max_abs() < 1e-15);
        let sp = site_operator(&h, 0, SiteOp::Splus).unwrap();
        let built = &sx + &sy.scale(C64::new(0.0, 1.0));
        assert!((&sp - &built).max_abs() < 1e-15);
    }

    #[test]
    fn ladder_action() {
        let h = HilbertSpec::new(vec![SiteKind::Oscillator { n_max: 3 }]).unwrap();
        let a = site_operator(&h, 0, SiteOp::A).unwrap();
        assert!((a.matrix().get(2, 3) - c(3f64.sqrt())).norm() < 1e-15);
        assert_eq!(a.matrix().nnz(), 3);
    }

    #[test]
    fn truncated_commutator() {
        // [a, a†] = 1 except the last diagonal entry which is −n_max
        let h = HilbertSpec::new(vec![SiteKind::Oscillator { n_max: 4 }]).unwrap();
        let a = site_operator(&h, 0, SiteOp::A).unwrap();
        let ad = site_operator(&h, 0, SiteOp::Adag).unwrap();
        let m = a.commutator(&ad).to_dense().unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let expected = match (i == j, i) {
                    (true, 4) => -4.0,
                    (true, _) => 1.0,
                    _ => 0.0,
                };
                assert!((m[(i, j)] - c(expected)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn kind_site_mismatch_is_contract_violation() {
        let h = HilbertSpec::new(vec![SiteKind::TwoLevel, SiteKind::Oscillator { n_max: 2 }]).unwrap();
        assert!(matches!(site_operator(&h, 0, SiteOp::A), Err(Error::Contract(_))));
        assert!(matches!(site_operator(&h, 1, SiteOp::Sz), Err(Error::Contract(_))));
        assert!(matches!(site_operator(&h, 2, SiteOp::Sz), Err(Error::Contract(_))));
    }

    #[test]
    fn phi_is_scaled_quadrature() {
        let h = HilbertSpec::new(vec![SiteKind::Oscillator { n_max: 3 }]).unwrap();
        let phi = site_operator(&h, 0, SiteOp::Phi(0.25)).unwrap();
        assert!((phi.matrix().get(0, 1) - c(0.25)).norm() < 1e-15);
        assert!(phi.is_hermitian());
    }

    #[test]
    fn first_fermion_is_bare_lowering() {
        let h = HilbertSpec::qubits(3).unwrap();
        let f0 = jw_fermion(&h, 0).unwrap();
        let sm = site_operator(&h, 0, SiteOp::Sminus).unwrap();
        assert_eq!((&f0 - &sm).max_abs(), 0.0);
    }

    #[test]
    fn two_site_anticommutator_vanishes() {
        let h = HilbertSpec::qubits(2).unwrap();
        let f0 = jw_fermion(&h, 0).unwrap();
        let f1 = jw_fermion(&h, 1).unwrap();
        assert!(f0.anticommutator(&f1.adjoint()).max_abs() < 1e-12);
    }

    #[test]
    fn number_operator_identity() {
        let h = HilbertSpec::qubits(4).unwrap();
        for n in 0..4 {
            let f = jw_fermion(&h, n).unwrap();
            let num = &f.adjoint() * &f;
            let sz = site_operator(&h, n, SiteOp::Sz).unwrap();
            let target = &sz + &Operator::identity(&h).scale(c(0.5));
            assert!((&num - &target).max_abs() < 1e-12);
        }
    }

    #[test]
    fn fermion_algebra_small_chains() {
        assert_eq!(verify_fermion_algebra(1).unwrap(), 0.0);
        assert!(verify_fermion_algebra(4).unwrap() < 1e-12);
        assert!(verify_fermion_algebra(6).unwrap() < 1e-12);
        assert!(matches!(verify_fermion_algebra(0), Err(Error::Resource { .. })));
        assert!(matches!(verify_fermion_algebra(9), Err(Error::Resource { .. })));
    }

    #[test]
    fn string_through_oscillator_rejected() {
        let h = HilbertSpec::new(vec![SiteKind::Oscillator { n_max: 1 }, SiteKind::TwoLevel]).unwrap();
        assert!(matches!(jw_fermion(&h, 1), Err(Error::Contract(_))));
        assert!(matches!(jw_fermion(&h, 0), Err(Error::Contract(_))));
    }

    #[test]
    fn disjoint_sites_commute() {
        let h = HilbertSpec::qubits(3).unwrap();
        let kinds = [SiteOp::Sx, SiteOp::Sy, SiteOp::Sz, SiteOp::Splus, SiteOp::Sminus];
        for &a in &kinds {
            for &b in &kinds {
                let oa = site_operator(&h, 0, a).unwrap();
                let ob = site_operator(&h, 2, b).unwrap();
                assert!(oa.commutator(&ob).max_abs() < 1e-15);
            }
        }
    }

    #[test]
    fn sector_bookkeeping() {
        let h = HilbertSpec::qubits_with_oscillators(4, 3).unwrap();
        let p = SectorProjector::new(&h, ConservedQuantity::FermionNumber, 2.0).unwrap();
        assert_eq!(p.dim(), 6 * 256);
        let proj = p.projector();
        assert!((&(&proj * &proj) - &proj).max_abs() < 1e-15);
        for &i in p.basis_indices() {
            assert_eq!(ConservedQuantity::FermionNumber.value(&h, i), 2.0);
        }
        assert!(SectorProjector::new(&h, ConservedQuantity::FermionNumber, 5.0).is_err());
    }

    #[test]
    fn restriction_rejects_leaking_operator() {
        let h = HilbertSpec::qubits(2).unwrap();
        let p = SectorProjector::new(&h, ConservedQuantity::TotalSz, 0.0).unwrap();
        let sx = site_operator(&h, 0, SiteOp::Sx).unwrap();
        assert!(matches!(p.restrict_operator(&sx), Err(Error::Contract(_))));
        let sz = site_operator(&h, 0, SiteOp::Sz).unwrap();
        assert_eq!(p.restrict_operator(&sz).unwrap().nrows(), 2);
    }
}
