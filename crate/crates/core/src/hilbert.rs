//! Tensor-product Hilbert spaces of two-level sites and truncated oscillators.
//!
//! Site 0 is the most significant factor of the product basis. A two-level
//! site has basis (|↑⟩, |↓⟩) = (S^z = +1/2, S^z = −1/2); an oscillator site
//! with cutoff `n_max` has Fock states |0⟩ … |n_max⟩.

use nalgebra::DVector;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const UP: usize = 0;
pub const DOWN: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SiteKind {
    TwoLevel,
    Oscillator { n_max: usize },
}

impl SiteKind {
    pub fn dim(&self) -> usize {
        match *self {
            SiteKind::TwoLevel => 2,
            SiteKind::Oscillator { n_max } => n_max + 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertSpec {
    sites: Vec<SiteKind>,
    strides: Vec<usize>,
    dim: usize,
}

impl HilbertSpec {
    pub fn new(sites: Vec<SiteKind>) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::Config("a Hilbert space needs at least one site".into()));
        }
        if sites.iter().any(|s| matches!(s, SiteKind::Oscillator { n_max: 0 })) {
            return Err(Error::Config("oscillator cutoff n_max must be at least 1".into()));
        }
        let mut strides = vec![1usize; sites.len()];
        let mut dim = 1usize;
        for (i, s) in sites.iter().enumerate().rev() {
            strides[i] = dim;
            dim = dim
                .checked_mul(s.dim())
                .ok_or(Error::Resource { dimension: usize::MAX, limit: usize::MAX })?;
        }
        Ok(Self { sites, strides, dim })
    }

    /// `n` two-level sites.
    pub fn qubits(n: usize) -> Result<Self> {
        Self::new(vec![SiteKind::TwoLevel; n])
    }

    /// `n` two-level sites followed by `n` oscillators with the same cutoff.
    pub fn qubits_with_oscillators(n: usize, n_max: usize) -> Result<Self> {
        let mut sites = vec![SiteKind::TwoLevel; n];
        sites.extend(std::iter::repeat(SiteKind::Oscillator { n_max }).take(n));
        Self::new(sites)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sites(&self) -> &[SiteKind] {
        &self.sites
    }

    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn site(&self, i: usize) -> SiteKind {
        self.sites[i]
    }

    /// Indices of all two-level sites, in order.
    pub fn two_level_sites(&self) -> Vec<usize> {
        (0..self.sites.len()).filter(|&i| self.sites[i] == SiteKind::TwoLevel).collect()
    }

    pub fn oscillator_sites(&self) -> Vec<usize> {
        (0..self.sites.len())
            .filter(|&i| matches!(self.sites[i], SiteKind::Oscillator { .. }))
            .collect()
    }

    /// Local state of `site` in basis state `index`.
    #[inline]
    pub fn digit(&self, index: usize, site: usize) -> usize {
        (index / self.strides[site]) % self.sites[site].dim()
    }

    /// Basis index obtained by replacing the local state of `site`.
    #[inline]
    pub fn with_digit(&self, index: usize, site: usize, value: usize) -> usize {
        let old = self.digit(index, site);
        index - old * self.strides[site] + value * self.strides[site]
    }

    pub fn index_of(&self, digits: &[usize]) -> Result<usize> {
        if digits.len() != self.sites.len() {
            return Err(Error::Contract(format!(
                "expected {} local states, got {}",
                self.sites.len(),
                digits.len()
            )));
        }
        let mut idx = 0;
        for (i, (&d, s)) in digits.iter().zip(&self.sites).enumerate() {
            if d >= s.dim() {
                return Err(Error::Contract(format!("local state {d} out of range on site {i}")));
            }
            idx += d * self.strides[i];
        }
        Ok(idx)
    }
}

/// Normalized state vector on a [`HilbertSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    space: HilbertSpec,
    amplitudes: DVector<C64>,
}

pub const NORM_TOLERANCE: f64 = 1e-10;

impl StateVector {
    pub fn new(space: HilbertSpec, amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(Error::Contract(format!(
                "state has {} amplitudes, space dimension is {}",
                amplitudes.len(),
                space.dim()
            )));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Contract(format!("state norm is {norm}, expected 1")));
        }
        Ok(Self { space, amplitudes })
    }

    /// Rescales a non-zero vector to unit norm.
    pub fn normalized(space: HilbertSpec, amplitudes: DVector<C64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 {
            return Err(Error::Contract("cannot normalize the zero vector".into()));
        }
        Self::new(space, amplitudes * C64::new(1.0 / norm, 0.0))
    }

    pub fn basis(space: HilbertSpec, digits: &[usize]) -> Result<Self> {
        let idx = space.index_of(digits)?;
        let mut amps = DVector::zeros(space.dim());
        amps[idx] = C64::new(1.0, 0.0);
        Ok(Self { space, amplitudes: amps })
    }

    pub fn space(&self) -> &HilbertSpec {
        &self.space
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> DVector<C64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// |⟨self|other⟩|²
    pub fn overlap(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Probability that `site` is in local state `level`.
    pub fn level_population(&self, site: usize, level: usize) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| self.space.digit(*i, site) == level)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Largest population of the top Fock level over all oscillator sites.
    pub fn max_top_level_population(&self) -> f64 {
        self.space
            .oscillator_sites()
            .into_iter()
            .map(|s| self.level_population(s, self.space.site(s).dim() - 1))
            .fold(0.0, f64::max)
    }
}
