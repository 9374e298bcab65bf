//! Hermitian eigensolvers and Krylov time propagation.
//!
//! Small problems go through a dense `SymmetricEigen`; larger ones use a
//! thick-restart Lanczos iteration with full reorthogonalization. The short
//! time propagator exp(−iHτ)ψ uses a Lanczos basis of at most
//! [`KRYLOV_PROPAGATOR_DIM`] vectors with adaptive substeps.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

/// Largest dimension handled by dense diagonalization.
pub const DENSE_EIGEN_LIMIT: usize = 1024;
pub const KRYLOV_PROPAGATOR_DIM: usize = 30;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Anything that can apply a Hermitian matrix to a vector.
pub trait LinearMap {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[C64], y: &mut [C64]);
}

impl LinearMap for SparseMatrix {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        self.mul_vec_into(x, y)
    }
}

/// Σ_k c_k A_k without assembling the sum.
pub struct LinearCombination<'a> {
    pub terms: Vec<(f64, &'a SparseMatrix)>,
}

impl LinearMap for LinearCombination<'_> {
    fn dim(&self) -> usize {
        self.terms.first().map_or(0, |(_, m)| m.nrows())
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        y.iter_mut().for_each(|v| *v = ZERO);
        let mut tmp = vec![ZERO; y.len()];
        for &(c, m) in &self.terms {
            if c == 0.0 {
                continue;
            }
            m.mul_vec_into(x, &mut tmp);
            for (yi, ti) in y.iter_mut().zip(&tmp) {
                *yi += *ti * c;
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct EigenPairs {
    /// Ascending.
    pub values: Vec<f64>,
    pub vectors: Vec<DVector<C64>>,
    /// ‖Ax − λx‖ for each pair.
    pub residuals: Vec<f64>,
}

/// Full spectrum of a Hermitian matrix, ascending, with eigenvectors as columns.
pub fn dense_hermitian_eigen(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let n = m.nrows();
    let real = m.iter().all(|z| z.im == 0.0);
    let (values, vectors): (Vec<f64>, DMatrix<C64>) = if real {
        let re = m.map(|z| z.re);
        let eig = SymmetricEigen::new(re);
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors.map(|x| C64::new(x, 0.0)))
    } else {
        let eig = SymmetricEigen::new(m.clone());
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let sorted_values = order.iter().map(|&i| values[i]).collect();
    let sorted_vectors = DMatrix::from_fn(n, n, |r, c| vectors[(r, order[c])]);
    (sorted_values, sorted_vectors)
}

fn residual_norm<A: LinearMap + ?Sized>(a: &A, x: &DVector<C64>, lambda: f64) -> f64 {
    let mut ax = vec![ZERO; x.len()];
    a.apply(x.as_slice(), &mut ax);
    ax.iter()
        .zip(x.iter())
        .map(|(ai, xi)| (*ai - *xi * lambda).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

#[derive(Debug, Clone, Copy)]
pub struct LanczosOptions {
    /// Convergence threshold on ‖Ax − θx‖.
    pub tolerance: f64,
    pub max_restarts: usize,
    /// Basis size before a restart; raised to at least 2k + 20.
    pub basis_size: usize,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_restarts: 500,
            basis_size: 60,
            seed: 0x5eed_1a2c,
        }
    }
}

fn orthogonalize(q: &mut DVector<C64>, basis: &[DVector<C64>]) {
    for _ in 0..2 {
        for v in basis {
            let c = v.dotc(q);
            q.axpy(-c, v, C64::new(1.0, 0.0));
        }
    }
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> DVector<C64> {
    DVector::from_fn(n, |_, _| C64::new(rng.gen::<f64>() - 0.5, 0.0))
}

/// Lowest `k` eigenpairs of a Hermitian operator.
///
/// Dense diagonalization below [`DENSE_EIGEN_LIMIT`], otherwise thick-restart
/// Lanczos: Rayleigh–Ritz on an explicitly reorthogonalized Krylov basis,
/// keeping the lowest Ritz vectors at each restart. After the first
/// convergence one fresh random direction is injected so that a degenerate
/// partner missed by the single starting vector can still be found.
pub fn lowest_eigenpairs(a: &SparseMatrix, k: usize, opts: &LanczosOptions) -> Result<EigenPairs> {
    let n = a.nrows();
    if k == 0 || k > n {
        return Err(Error::Contract(format!("requested {k} eigenpairs of a {n}-dimensional operator")));
    }
    if n <= DENSE_EIGEN_LIMIT {
        let (values, vectors) = dense_hermitian_eigen(&a.to_dense());
        let vecs: Vec<DVector<C64>> = (0..k).map(|i| vectors.column(i).into_owned()).collect();
        let residuals = vecs.iter().zip(&values).map(|(v, &l)| residual_norm(a, v, l)).collect();
        return Ok(EigenPairs {
            values: values[..k].to_vec(),
            vectors: vecs,
            residuals,
        });
    }
    lanczos(a, k, opts)
}

pub fn lanczos<A: LinearMap + ?Sized>(a: &A, k: usize, opts: &LanczosOptions) -> Result<EigenPairs> {
    let n = a.dim();
    let m = opts.basis_size.max(2 * k + 20).min(n);
    let keep = (k + (m - k) / 3).min(m - 1).max(k);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let scale = 1.0;

    let mut basis: Vec<DVector<C64>> = Vec::with_capacity(m);
    let mut images: Vec<DVector<C64>> = Vec::with_capacity(m);
    let mut projected = DMatrix::<C64>::zeros(m, m);
    let mut next = random_vector(&mut rng, n);
    let mut injected = false;
    let mut last_residuals = Vec::new();

    for _restart in 0..opts.max_restarts {
        while basis.len() < m {
            orthogonalize(&mut next, &basis);
            let mut norm = next.norm();
            if norm < 1e-10 * scale {
                // invariant subspace: continue with a fresh direction
                next = random_vector(&mut rng, n);
                orthogonalize(&mut next, &basis);
                norm = next.norm();
                if norm < 1e-10 {
                    break;
                }
            }
            let q = next.unscale(norm);
            let mut aq = DVector::<C64>::zeros(n);
            a.apply(q.as_slice(), aq.as_mut_slice());
            let j = basis.len();
            for (i, v) in basis.iter().enumerate() {
                let t = v.dotc(&aq);
                projected[(i, j)] = t;
                projected[(j, i)] = t.conj();
            }
            projected[(j, j)] = C64::new(q.dotc(&aq).re, 0.0);
            next = aq.clone();
            basis.push(q);
            images.push(aq);
        }

        let size = basis.len();
        // Krylov residual direction, orthogonal to the whole current basis
        orthogonalize(&mut next, &basis);
        let t = projected.view((0, 0), (size, size)).into_owned();
        let (theta, y) = dense_hermitian_eigen(&t);
        let wanted = keep.min(size);
        let mut ritz = Vec::with_capacity(wanted);
        let mut ritz_images = Vec::with_capacity(wanted);
        let mut residuals = Vec::with_capacity(wanted);
        for c in 0..wanted {
            let mut x = DVector::<C64>::zeros(n);
            let mut ax = DVector::<C64>::zeros(n);
            for r in 0..size {
                let w = y[(r, c)];
                if w != ZERO {
                    x.axpy(w, &basis[r], C64::new(1.0, 0.0));
                    ax.axpy(w, &images[r], C64::new(1.0, 0.0));
                }
            }
            let res = (&ax - &x * C64::new(theta[c], 0.0)).norm();
            residuals.push(res);
            ritz.push(x);
            ritz_images.push(ax);
        }

        let converged = residuals.iter().take(k).all(|&r| r < opts.tolerance);
        if converged && (injected || size == n) {
            let vectors: Vec<DVector<C64>> = ritz.into_iter().take(k).collect();
            let values = theta[..k].to_vec();
            let residuals = vectors.iter().zip(&values).map(|(v, &l)| residual_norm(a, v, l)).collect();
            return Ok(EigenPairs {
                values,
                vectors,
                residuals,
            });
        }
        if converged {
            injected = true;
            next = random_vector(&mut rng, n);
        }
        last_residuals = residuals.iter().take(k).copied().collect();

        // thick restart: Ritz vectors become the new basis, T becomes diagonal
        basis = ritz;
        images = ritz_images;
        projected.fill(ZERO);
        for (i, &th) in theta.iter().take(wanted).enumerate() {
            projected[(i, i)] = C64::new(th, 0.0);
        }
    }
    Err(Error::Solver(format!(
        "Lanczos did not converge after {} restarts (dimension {n}, residuals {:?})",
        opts.max_restarts, last_residuals
    )))
}

/// Applies exp(−iAτ) to `psi` with an adaptive Krylov subspace method.
pub fn expm_krylov<A: LinearMap + ?Sized>(a: &A, psi: &DVector<C64>, tau: f64, tol: f64) -> DVector<C64> {
    let n = a.dim();
    let mut state = psi.clone();
    let mut remaining = tau;
    let mut h = tau;
    while remaining.abs() > 0.0 {
        let beta0 = state.norm();
        if beta0 == 0.0 {
            return state;
        }
        let m_max = KRYLOV_PROPAGATOR_DIM.min(n);
        let mut basis: Vec<DVector<C64>> = vec![state.unscale(beta0)];
        let mut alpha = Vec::with_capacity(m_max);
        let mut beta: Vec<f64> = Vec::with_capacity(m_max);
        let mut breakdown = false;
        let mut w = DVector::<C64>::zeros(n);
        for j in 0..m_max {
            a.apply(basis[j].as_slice(), w.as_mut_slice());
            let aj = basis[j].dotc(&w).re;
            alpha.push(aj);
            let mut r = w.clone();
            orthogonalize(&mut r, &basis);
            let b = r.norm();
            beta.push(b);
            if b < 1e-13 * (aj.abs() + 1.0) {
                breakdown = true;
                break;
            }
            if j + 1 < m_max {
                basis.push(r.unscale(b));
            }
        }
        let m = alpha.len();
        let mut t = DMatrix::<f64>::zeros(m, m);
        for j in 0..m {
            t[(j, j)] = alpha[j];
            if j + 1 < m {
                t[(j, j + 1)] = beta[j];
                t[(j + 1, j)] = beta[j];
            }
        }
        let eig = SymmetricEigen::new(t);
        let coeffs = |step: f64| -> DVector<C64> {
            DVector::from_fn(m, |r, _| {
                (0..m)
                    .map(|c| {
                        let v = eig.eigenvectors[(r, c)] * eig.eigenvectors[(0, c)];
                        C64::from_polar(v, -eig.eigenvalues[c] * step)
                    })
                    .sum()
            })
        };
        let step = h.abs().min(remaining.abs()).copysign(remaining);
        let mut step = step;
        let mut c = coeffs(step);
        if !breakdown {
            loop {
                let err = beta[m - 1] * c[m - 1].norm();
                if err <= tol || step.abs() < 1e-14 * tau.abs() {
                    break;
                }
                step *= 0.5;
                c = coeffs(step);
            }
        }
        let mut next = DVector::<C64>::zeros(n);
        for (j, v) in basis.iter().enumerate().take(m) {
            next.axpy(c[j] * beta0, v, C64::new(1.0, 0.0));
        }
        state = next;
        remaining -= step;
        if remaining.abs() < 1e-15 * tau.abs() {
            break;
        }
        h = step * 2.0;
    }
    state
}
