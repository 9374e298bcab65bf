//! Small-oscillation normal modes of current-biased junction networks.
//!
//! A network of N grounded islands has phase coordinates θ_i. Every island
//! is grounded by a vertical junction (Josephson energy m_i E_J, bias
//! current I_b) and pairs of islands are joined by coupling junctions of
//! energy h_e K² E_J. The potential is
//!
//! V = −E_J Σ_i (i_b θ_i + m_i cos θ_i) − K² E_J Σ_e h_e cos(θ_i − θ_j)
//!
//! and only the vertical junctions carry kinetic energy, so the mass matrix
//! is diagonal with entries C(Φ₀/2π). Stiffness is reported in units of E_J
//! and mass in units of C(Φ₀/2π)², which makes √(V/M) come out in units of
//! the unbiased plasma frequency √(2πI_c/Φ₀C).

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{equilibrium_phase, plasma_frequency, JunctionParams, FLUX_QUANTUM, REDUCED_PLANCK};

pub const EQUILIBRIUM_TOLERANCE: f64 = 1e-12;
pub const MAX_NEWTON_ITERATIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    /// Open 1D chain with N − 1 coupling junctions.
    Chain,
    /// Every pair of islands coupled: N(N − 1)/2 coupling junctions.
    Complete,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArraySpec {
    pub topology: Topology,
    pub n: usize,
    pub junction: JunctionParams,
    /// Per-site multipliers of the grounding junction E_J.
    pub vertical_multipliers: Vec<f64>,
    /// Per-edge multipliers of the coupling junction E_J, in [`ArraySpec::edges`] order.
    pub horizontal_multipliers: Vec<f64>,
}

impl ArraySpec {
    /// Identical junctions everywhere.
    pub fn clean(topology: Topology, n: usize, junction: JunctionParams) -> Result<Self> {
        let edges = edge_count(topology, n);
        let spec = Self {
            topology,
            n,
            junction,
            vertical_multipliers: vec![1.0; n],
            horizontal_multipliers: vec![1.0; edges],
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_vertical_multipliers(mut self, m: Vec<f64>) -> Result<Self> {
        self.vertical_multipliers = m;
        self.validate()?;
        Ok(self)
    }

    pub fn with_horizontal_multipliers(mut self, m: Vec<f64>) -> Result<Self> {
        self.horizontal_multipliers = m;
        self.validate()?;
        Ok(self)
    }

    /// Vertical multipliers drawn uniformly from [1 − amplitude, 1 + amplitude].
    pub fn with_vertical_disorder(self, amplitude: f64, seed: u64) -> Result<Self> {
        if !(0.0..1.0).contains(&amplitude) {
            return Err(Error::Config(format!("disorder amplitude must be in [0, 1), got {amplitude}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = (0..self.n).map(|_| 1.0 + amplitude * (2.0 * rng.gen::<f64>() - 1.0)).collect();
        self.with_vertical_multipliers(m)
    }

    pub fn validate(&self) -> Result<()> {
        self.junction.validate()?;
        if self.n == 0 {
            return Err(Error::Config("array needs at least one site".into()));
        }
        if self.vertical_multipliers.len() != self.n {
            return Err(Error::Config(format!(
                "expected {} vertical multipliers, got {}",
                self.n,
                self.vertical_multipliers.len()
            )));
        }
        let edges = edge_count(self.topology, self.n);
        if self.horizontal_multipliers.len() != edges {
            return Err(Error::Config(format!(
                "expected {edges} horizontal multipliers, got {}",
                self.horizontal_multipliers.len()
            )));
        }
        let all = self.vertical_multipliers.iter().chain(&self.horizontal_multipliers);
        if let Some(bad) = all.clone().find(|&&m| !(m > 0.0 && m.is_finite())) {
            return Err(Error::Config(format!("junction multipliers must be positive, got {bad}")));
        }
        Ok(())
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        match self.topology {
            Topology::Chain => (0..self.n.saturating_sub(1)).map(|i| (i, i + 1)).collect(),
            Topology::Complete => (0..self.n)
                .flat_map(|i| (i + 1..self.n).map(move |j| (i, j)))
                .collect(),
        }
    }

    pub fn is_clean(&self) -> bool {
        self.vertical_multipliers.iter().chain(&self.horizontal_multipliers).all(|&m| m == 1.0)
    }

    /// Number of junctions in the network (grounding plus coupling).
    pub fn junction_count(&self) -> usize {
        self.n + edge_count(self.topology, self.n)
    }

    fn coupling(&self) -> f64 {
        self.junction.k_ratio * self.junction.k_ratio
    }
}

fn edge_count(topology: Topology, n: usize) -> usize {
    match topology {
        Topology::Chain => n.saturating_sub(1),
        Topology::Complete => n * n.saturating_sub(1) / 2,
    }
}

/// Net current into each node, in units of I_c:
/// i_b − m_i sin θ_i − K² Σ_j h_ij sin(θ_i − θ_j).
pub fn node_currents(spec: &ArraySpec, theta: &[f64]) -> Vec<f64> {
    let k2 = spec.coupling();
    let mut f: Vec<f64> = (0..spec.n)
        .map(|i| spec.junction.bias_ratio - spec.vertical_multipliers[i] * theta[i].sin())
        .collect();
    for ((i, j), h) in spec.edges().into_iter().zip(&spec.horizontal_multipliers) {
        let s = k2 * h * (theta[i] - theta[j]).sin();
        f[i] -= s;
        f[j] += s;
    }
    f
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Static phases satisfying current conservation at every node, by damped
/// Newton iteration from the uniform guess arcsin(i_b).
pub fn solve_equilibrium(spec: &ArraySpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let start = equilibrium_phase(spec.junction.bias_ratio)?;
    let mut theta = vec![start; spec.n];
    let mut f = node_currents(spec, &theta);
    let mut residual = max_abs(&f);
    for _ in 0..MAX_NEWTON_ITERATIONS {
        if residual < EQUILIBRIUM_TOLERANCE {
            return Ok(theta);
        }
        // F = −∂V/∂θ / E_J, so the Newton step solves Hess·δ = F.
        let hess = stiffness(spec, &theta);
        let rhs = DVector::from_column_slice(&f);
        let step = match hess.clone().lu().solve(&rhs) {
            Some(s) => s,
            None => break,
        };
        let mut alpha = 1.0;
        loop {
            let trial: Vec<f64> = theta.iter().zip(step.iter()).map(|(t, d)| t + alpha * d).collect();
            let ft = node_currents(spec, &trial);
            let rt = max_abs(&ft);
            if rt < residual || alpha < 1e-6 {
                theta = trial;
                f = ft;
                residual = rt;
                break;
            }
            alpha *= 0.5;
        }
    }
    if residual < EQUILIBRIUM_TOLERANCE {
        return Ok(theta);
    }
    Err(Error::NoEquilibrium {
        iterations: MAX_NEWTON_ITERATIONS,
        residual,
    })
}

/// Hessian of V/E_J at the given phases.
fn stiffness(spec: &ArraySpec, theta: &[f64]) -> DMatrix<f64> {
    let k2 = spec.coupling();
    let mut v = DMatrix::zeros(spec.n, spec.n);
    for i in 0..spec.n {
        v[(i, i)] = spec.vertical_multipliers[i] * theta[i].cos();
    }
    for ((i, j), h) in spec.edges().into_iter().zip(&spec.horizontal_multipliers) {
        let c = k2 * h * (theta[i] - theta[j]).cos();
        v[(i, i)] += c;
        v[(j, j)] += c;
        v[(i, j)] -= c;
        v[(j, i)] -= c;
    }
    v
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemMatrices {
    /// Second derivatives of V, in units of E_J.
    pub stiffness: DMatrix<f64>,
    /// Diagonal mass, in units of C(Φ₀/2π)².
    pub mass: Vec<f64>,
}

/// Quadratic expansion of the potential around `equilibrium`.
pub fn build_system_matrices(spec: &ArraySpec, equilibrium: &[f64]) -> Result<SystemMatrices> {
    spec.validate()?;
    if equilibrium.len() != spec.n {
        return Err(Error::Config(format!(
            "{} equilibrium phases supplied for {} sites",
            equilibrium.len(),
            spec.n
        )));
    }
    Ok(SystemMatrices {
        stiffness: stiffness(spec, equilibrium),
        mass: vec![1.0; spec.n],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrequencyUnit {
    /// √(stiffness unit / mass unit) of the input matrices.
    Natural,
    /// Multiples of the biased plasma frequency ω_p.
    PlasmaFrequency,
    RadPerSecond,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpectrum {
    /// Ascending, non-negative.
    pub frequencies: Vec<f64>,
    /// Column s is b^s, normalized so that Bᵀ M B = I.
    pub eigenvectors: DMatrix<f64>,
    pub mass_diagonal: Vec<f64>,
    pub unit: FrequencyUnit,
}

impl ModeSpectrum {
    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    pub fn mode(&self, s: usize) -> DVector<f64> {
        self.eigenvectors.column(s).into_owned()
    }

    /// Multiplies every frequency by `factor` and relabels the unit.
    pub fn rescaled(mut self, factor: f64, unit: FrequencyUnit) -> Self {
        self.frequencies.iter_mut().for_each(|f| *f *= factor);
        self.unit = unit;
        self
    }

    /// Largest entry of |BᵀMB − I|.
    pub fn orthonormality_defect(&self) -> f64 {
        let m = DMatrix::from_diagonal(&DVector::from_column_slice(&self.mass_diagonal));
        let g = self.eigenvectors.transpose() * m * &self.eigenvectors;
        let n = g.nrows();
        (g - DMatrix::identity(n, n)).amax()
    }
}

/// Solves ν² M b = V b for a symmetric stiffness V and positive diagonal M.
///
/// The problem is reduced to the symmetric matrix M^{-1/2} V M^{-1/2}.
/// Eigenvectors are signed so their largest-magnitude entry is positive;
/// inside a degenerate cluster the basis is arbitrary.
pub fn normal_modes(stiffness: &DMatrix<f64>, mass: &[f64]) -> Result<ModeSpectrum> {
    let n = stiffness.nrows();
    if stiffness.ncols() != n || mass.len() != n {
        return Err(Error::Config("stiffness and mass dimensions disagree".into()));
    }
    let scale = stiffness.amax().max(f64::MIN_POSITIVE);
    let asym = (stiffness - stiffness.transpose()).amax();
    if asym > 1e-12 * scale {
        return Err(Error::Contract(format!("stiffness matrix is not symmetric (defect {asym:e})")));
    }
    if let Some(bad) = mass.iter().find(|&&m| !(m > 0.0)) {
        return Err(Error::Contract(format!("mass entries must be positive, got {bad}")));
    }
    let inv_sqrt: Vec<f64> = mass.iter().map(|m| 1.0 / m.sqrt()).collect();
    let reduced = DMatrix::from_fn(n, n, |i, j| stiffness[(i, j)] * inv_sqrt[i] * inv_sqrt[j]);
    let reduced = (&reduced + reduced.transpose()) * 0.5;
    let eig = SymmetricEigen::new(reduced);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut frequencies = Vec::with_capacity(n);
    let mut vectors = DMatrix::zeros(n, n);
    for (s, &k) in order.iter().enumerate() {
        let lambda = eig.eigenvalues[k];
        if lambda < -1e-12 * scale {
            return Err(Error::Instability { mode: s, eigenvalue: lambda });
        }
        frequencies.push(lambda.max(0.0).sqrt());
        let mut b = DVector::from_fn(n, |i, _| eig.eigenvectors[(i, k)] * inv_sqrt[i]);
        let pivot = b.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
        if pivot < 0.0 {
            b.neg_mut();
        }
        vectors.set_column(s, &b);
    }
    Ok(ModeSpectrum {
        frequencies,
        eigenvectors: vectors,
        mass_diagonal: mass.to_vec(),
        unit: FrequencyUnit::Natural,
    })
}

/// Equilibrium, quadratic expansion and normal modes, with frequencies in
/// units of the clean plasma frequency ω_p.
pub fn array_modes(spec: &ArraySpec) -> Result<ModeSpectrum> {
    let eq = solve_equilibrium(spec)?;
    let sys = build_system_matrices(spec, &eq)?;
    let modes = normal_modes(&sys.stiffness, &sys.mass)?;
    let to_plasma = 1.0 / spec.junction.equilibrium_cos().sqrt();
    Ok(modes.rescaled(to_plasma, FrequencyUnit::PlasmaFrequency))
}

/// Closed-form spectrum of a clean network, ascending, in units of ω_p.
///
/// Chain: ν_s = √(1 + (4K²/cos θ⁽⁰⁾) sin²(sπ/2N)), s = 0..N−1.
/// Complete: ν = 1 once and √(1 + NK²/cos θ⁽⁰⁾) with multiplicity N − 1.
pub fn analytic_spectrum(spec: &ArraySpec) -> Result<Vec<f64>> {
    spec.validate()?;
    if !spec.is_clean() {
        return Err(Error::Unsupported(
            "closed-form spectrum requires identical junctions; use normal_modes".into(),
        ));
    }
    let k2 = spec.coupling();
    let cos0 = spec.junction.equilibrium_cos();
    let n = spec.n;
    let mut nu: Vec<f64> = match spec.topology {
        Topology::Chain => (0..n)
            .map(|s| {
                let sin = (s as f64 * PI / (2.0 * n as f64)).sin();
                (1.0 + 4.0 * k2 / cos0 * sin * sin).sqrt()
            })
            .collect(),
        Topology::Complete => {
            let upper = (1.0 + n as f64 * k2 / cos0).sqrt();
            std::iter::once(1.0).chain(std::iter::repeat(upper).take(n - 1)).collect()
        }
    };
    nu.sort_by(f64::total_cmp);
    Ok(nu)
}

/// Large-N gap between the two lowest chain modes, π²K²/(2N² cos θ⁽⁰⁾), in units of ω_p.
pub fn asymptotic_chain_gap(n: usize, k_ratio: f64, cos0: f64) -> f64 {
    PI * PI * k_ratio * k_ratio / (2.0 * (n * n) as f64 * cos0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComQualityReport {
    /// ν₁ − ν₀ in units of ω_p (0 for a single site).
    pub gap: f64,
    /// |⟨b⁰, (1,…,1)/√N⟩|² with b⁰ normalized.
    pub com_overlap: f64,
    /// Largest chain length whose asymptotic gap still exceeds margin·g.
    /// `None` when the gap does not close with N (complete network).
    pub n_max_for_margin: Option<usize>,
}

/// How well the lowest mode serves as a uniform cavity mode for couplings
/// of strength `g` (units of ω_p), with safety factor `margin`.
pub fn com_quality(spec: &ArraySpec, g: f64, margin: f64) -> Result<ComQualityReport> {
    if !(g > 0.0) {
        return Err(Error::Config(format!("coupling g must be positive, got {g}")));
    }
    if !(margin >= 1.0) {
        return Err(Error::Config(format!("margin must be at least 1, got {margin}")));
    }
    let modes = array_modes(spec)?;
    let gap = if modes.len() > 1 {
        modes.frequencies[1] - modes.frequencies[0]
    } else {
        0.0
    };
    let b0 = modes.mode(0);
    let uniform_proj = b0.sum() / (spec.n as f64).sqrt();
    let com_overlap = (uniform_proj * uniform_proj / b0.norm_squared()).min(1.0);
    let n_max_for_margin = match spec.topology {
        Topology::Chain => {
            let cos0 = spec.junction.equilibrium_cos();
            let k = spec.junction.k_ratio;
            let bound = (PI * PI * k * k / (2.0 * cos0 * margin * g)).sqrt();
            let mut n = bound.floor() as usize;
            // guard against rounding at the boundary
            while n > 0 && asymptotic_chain_gap(n, k, cos0) < margin * g {
                n -= 1;
            }
            while asymptotic_chain_gap(n + 1, k, cos0) >= margin * g {
                n += 1;
            }
            Some(n)
        }
        Topology::Complete => None,
    };
    Ok(ComQualityReport {
        gap,
        com_overlap,
        n_max_for_margin,
    })
}

/// Coefficients of (a_s + a_s†) in the phase operators: entry (i, s) is
/// (2π/Φ₀)√(ħ/2Cν_s)·b_i^s, dimensionless.
pub fn zero_point_amplitudes(spectrum: &ModeSpectrum, junction: &JunctionParams) -> Result<DMatrix<f64>> {
    let to_si = match spectrum.unit {
        FrequencyUnit::RadPerSecond => 1.0,
        FrequencyUnit::PlasmaFrequency => plasma_frequency(junction),
        FrequencyUnit::Natural => {
            (2.0 * PI * junction.critical_current / (FLUX_QUANTUM * junction.capacitance)).sqrt()
        }
    };
    let n = spectrum.eigenvectors.nrows();
    let mut amps = DMatrix::zeros(n, spectrum.len());
    for (s, &nu) in spectrum.frequencies.iter().enumerate() {
        let nu_si = nu * to_si;
        if !(nu_si > 0.0) {
            return Err(Error::SingularAmplitude { mode: s });
        }
        let scale = 2.0 * PI / FLUX_QUANTUM * (REDUCED_PLANCK / (2.0 * junction.capacitance * nu_si)).sqrt();
        for i in 0..n {
            amps[(i, s)] = scale * spectrum.eigenvectors[(i, s)];
        }
    }
    Ok(amps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn junction(bias: f64, k: f64) -> JunctionParams {
        JunctionParams::new(0.5e-6, 1e-12, bias, k).unwrap()
    }

    #[test]
    fn clean_equilibrium_is_uniform() {
        for n in [1, 2, 7] {
            let spec = ArraySpec::clean(Topology::Chain, n, junction(0.5, 3.0)).unwrap();
            let th = solve_equilibrium(&spec).unwrap();
            assert!(th.iter().all(|&t| (t - PI / 6.0).abs() < 1e-12));
        }
        let spec = ArraySpec::clean(Topology::Complete, 4, junction(0.0, 2.0)).unwrap();
        assert!(solve_equilibrium(&spec).unwrap().iter().all(|&t| t == 0.0));
    }

    #[test]
    fn disordered_equilibrium_balances_currents() {
        let spec = ArraySpec::clean(Topology::Chain, 3, junction(0.5, 1.0))
            .unwrap()
            .with_vertical_multipliers(vec![1.0, 0.9, 1.0])
            .unwrap();
        let th = solve_equilibrium(&spec).unwrap();
        assert!(th[1] > th[0]);
        assert!((th[0] - th[2]).abs() < 1e-12);
        // direct substitution into the node equations, written out by hand
        let k2 = 1.0;
        let r0 = 0.5 - th[0].sin() - k2 * (th[0] - th[1]).sin();
        let r1 = 0.5 - 0.9 * th[1].sin() - k2 * (th[1] - th[0]).sin() - k2 * (th[1] - th[2]).sin();
        let r2 = 0.5 - th[2].sin() - k2 * (th[2] - th[1]).sin();
        assert!(r0.abs() < 1e-12 && r1.abs() < 1e-12 && r2.abs() < 1e-12);
    }

    #[test]
    fn equilibrium_failure_is_reported() {
        // grounding junctions too weak to carry the bias anywhere
        let spec = ArraySpec::clean(Topology::Chain, 3, junction(0.9, 1.0))
            .unwrap()
            .with_vertical_multipliers(vec![0.5, 0.5, 0.5])
            .unwrap();
        assert!(matches!(solve_equilibrium(&spec), Err(Error::NoEquilibrium { .. })));
    }

    #[test]
    fn two_site_chain_matrices_and_modes() {
        let spec = ArraySpec::clean(Topology::Chain, 2, junction(0.0, 1.0)).unwrap();
        let eq = solve_equilibrium(&spec).unwrap();
        let sys = build_system_matrices(&spec, &eq).unwrap();
        assert_eq!(sys.stiffness, DMatrix::from_row_slice(2, 2, &[2.0, -1.0, -1.0, 2.0]));
        let m = array_modes(&spec).unwrap();
        assert!((m.frequencies[0] - 1.0).abs() < 1e-14);
        assert!((m.frequencies[1] - 3f64.sqrt()).abs() < 1e-14);
        let b0 = m.mode(0);
        assert!((b0[0] - 0.5f64.sqrt()).abs() < 1e-14 && (b0[1] - 0.5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn complete_network_three_sites() {
        let spec = ArraySpec::clean(Topology::Complete, 3, junction(0.0, 1.0)).unwrap();
        let sys = build_system_matrices(&spec, &solve_equilibrium(&spec).unwrap()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { 3.0 } else { -1.0 };
                assert_eq!(sys.stiffness[(i, j)], expected);
            }
        }
        let m = array_modes(&spec).unwrap();
        let expected = [1.0, 2.0, 2.0];
        for (a, b) in m.frequencies.iter().zip(expected) {
            assert!((a - b).abs() < 1e-13);
        }
        assert_eq!(analytic_spectrum(&spec).unwrap(), vec![1.0, 2.0, 2.0]);
        assert_eq!(spec.junction_count(), 6);
    }

    #[test]
    fn clean_chain_matches_displayed_stiffness() {
        let (n, k, bias) = (6, 4.0, 0.3);
        let spec = ArraySpec::clean(Topology::Chain, n, junction(bias, k)).unwrap();
        let sys = build_system_matrices(&spec, &solve_equilibrium(&spec).unwrap()).unwrap();
        let cos0 = (1.0f64 - bias * bias).sqrt();
        for i in 0..n {
            for j in 0..n {
                let d = |a: usize, b: usize| (a == b) as u8 as f64;
                let formula = k * k
                    * (d(i, j) * (2.0 + cos0 / (k * k) - d(i, 0) - d(i, n - 1)) - d(i + 1, j) - d(i, j + 1));
                assert!((sys.stiffness[(i, j)] - formula).abs() < 1e-12);
            }
            let row: f64 = sys.stiffness.row(i).sum();
            assert!((row - cos0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_site_and_first_analytic_mode() {
        let spec = ArraySpec::clean(Topology::Chain, 1, junction(0.7, 5.0)).unwrap();
        let m = array_modes(&spec).unwrap();
        assert_eq!(m.len(), 1);
        assert!((m.frequencies[0] - 1.0).abs() < 1e-14);
        let spec = ArraySpec::clean(Topology::Chain, 2, junction(0.0, 1.0)).unwrap();
        let nu = analytic_spectrum(&spec).unwrap();
        assert_eq!(nu[0], 1.0);
        assert!((nu[1] - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn analytic_rejects_disorder() {
        let spec = ArraySpec::clean(Topology::Chain, 4, junction(0.5, 2.0))
            .unwrap()
            .with_vertical_disorder(0.01, 7)
            .unwrap();
        assert!(matches!(analytic_spectrum(&spec), Err(Error::Unsupported(_))));
    }

    #[test]
    fn normal_modes_contract_errors() {
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(matches!(normal_modes(&asym, &[1.0, 1.0]), Err(Error::Contract(_))));
        let unstable = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(
            normal_modes(&unstable, &[1.0, 1.0]),
            Err(Error::Instability { mode: 0, .. })
        ));
        assert!(matches!(
            normal_modes(&DMatrix::identity(2, 2), &[1.0]),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn mass_weighted_problem_is_orthonormal_in_mass_metric() {
        let v = DMatrix::from_row_slice(3, 3, &[4.0, -1.0, 0.0, -1.0, 3.0, -0.5, 0.0, -0.5, 2.0]);
        let m = normal_modes(&v, &[1.0, 2.0, 0.5]).unwrap();
        assert!(m.orthonormality_defect() < 1e-12);
        for s in 0..3 {
            let b = m.mode(s);
            let lhs = &v * &b;
            let rhs = DVector::from_fn(3, |i, _| [1.0, 2.0, 0.5][i] * b[i]) * m.frequencies[s].powi(2);
            assert!((lhs - rhs).amax() < 1e-12);
        }
    }

    #[test]
    fn com_quality_reference() {
        let spec = ArraySpec::clean(Topology::Chain, 100, junction(0.97, 20.0)).unwrap();
        // ω_p/2π = 10 GHz, g/2π = 50 MHz → g = 0.005 ω_p; √(π²K²/(2 cos θ⁽⁰⁾ · 10 · 0.005)) = 402.98
        let r = com_quality(&spec, 0.005, 10.0).unwrap();
        assert_eq!(r.n_max_for_margin, Some(402));
        assert!((r.com_overlap - 1.0).abs() < 1e-12);
        assert!(r.gap > 0.0);

        let complete = ArraySpec::clean(Topology::Complete, 5, junction(0.97, 20.0)).unwrap();
        assert_eq!(com_quality(&complete, 0.005, 10.0).unwrap().n_max_for_margin, None);
        assert!(com_quality(&spec, 0.0, 10.0).is_err());
        assert!(com_quality(&spec, 0.005, 0.5).is_err());
    }

    #[test]
    fn disorder_keeps_com_mode() {
        let spec = ArraySpec::clean(Topology::Chain, 50, junction(0.97, 20.0))
            .unwrap()
            .with_vertical_disorder(0.01, 2024)
            .unwrap();
        let r = com_quality(&spec, 0.005, 10.0).unwrap();
        assert!(r.com_overlap > 0.99, "overlap {}", r.com_overlap);
    }

    #[test]
    fn zero_point_amplitudes_reference() {
        let j = junction(0.0, 1.0);
        let spec = ArraySpec::clean(Topology::Chain, 1, j).unwrap();
        let amps = zero_point_amplitudes(&array_modes(&spec).unwrap(), &j).unwrap();
        // independent SI evaluation of (2π/Φ₀)√(ħ/2Cω_p)
        assert!((amps[(0, 0)] - 0.11175803388564011).abs() < 1e-12);

        let j = junction(0.5, 3.0);
        let spec = ArraySpec::clean(Topology::Chain, 5, j).unwrap();
        let modes = array_modes(&spec).unwrap();
        let amps = zero_point_amplitudes(&modes, &j).unwrap();
        let omega_p = plasma_frequency(&j);
        let com = 2.0 * PI / FLUX_QUANTUM * (REDUCED_PLANCK / (2.0 * j.capacitance * omega_p)).sqrt() / 5f64.sqrt();
        for i in 0..5 {
            assert!((amps[(i, 0)] - com).abs() < 1e-12 * com);
            // Σ_s amp² · ν_s · 2C(Φ₀/2π)²/ħ = Σ_s (b_i^s)² = 1
            let sum: f64 = (0..5)
                .map(|s| amps[(i, s)].powi(2) * modes.frequencies[s] * omega_p * 2.0 * j.phase_mass() / REDUCED_PLANCK)
                .sum();
            assert!((sum - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_frequency_mode_is_singular() {
        let spec = ModeSpectrum {
            frequencies: vec![0.0],
            eigenvectors: DMatrix::identity(1, 1),
            mass_diagonal: vec![1.0],
            unit: FrequencyUnit::PlasmaFrequency,
        };
        assert!(matches!(
            zero_point_amplitudes(&spec, &junction(0.0, 1.0)),
            Err(Error::SingularAmplitude { mode: 0 })
        ));
    }
}
