//! Spectra, ground states and real-time propagation.
//!
//! Two independent propagators are provided. [`evolve_spectral`] expands the
//! initial state in the full eigenbasis,
//! `|ψ(t)> = Σ_α c_α e^{-i E_α t} |α>` with `c_α = <α|ψ(0)>`, and
//! [`evolve_krylov`] applies `exp(-iHt)` through short Lanczos recurrences
//! that only touch the operator through matrix-vector products.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::hamiltonian::SparseOperator;
use crate::linalg::{symmetric_eigen, tridiagonal_eigen, tridiagonal_exp_first_column};

/// Largest dimension handed to the dense eigensolver.
pub const DENSE_DIMENSION_CAP: usize = 5000;

/// Relative gap below which the ground level counts as degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-10;

const NORM_TOLERANCE: f64 = 1e-6;

/// Complete eigen-decomposition of a real symmetric operator.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    dim: usize,
    energies: Vec<f64>,
    vectors: Vec<f64>,
    overlaps: Option<Vec<Complex64>>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Eigenvalues in ascending order.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Real, normalized eigenvector belonging to `energies()[k]`.
    pub fn eigenvector(&self, k: usize) -> &[f64] {
        &self.vectors[k * self.dim..(k + 1) * self.dim]
    }

    pub fn overlaps(&self) -> Option<&[Complex64]> {
        self.overlaps.as_deref()
    }

    /// Spectral norm, `max |E_α|`.
    pub fn norm(&self) -> f64 {
        self.energies.iter().fold(0.0, |m, e| m.max(e.abs()))
    }

    /// Expansion coefficients `c_α = <α|ψ>`.
    pub fn coefficients(&self, psi: &[Complex64]) -> Result<Vec<Complex64>> {
        if psi.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                found: psi.len(),
            });
        }
        Ok((0..self.dim)
            .map(|k| {
                self.eigenvector(k)
                    .iter()
                    .zip(psi)
                    .fold(Complex64::new(0.0, 0.0), |acc, (&v, &p)| acc + p * v)
            })
            .collect())
    }

    /// Attach the overlaps of a normalized initial state.
    pub fn with_initial_state(mut self, psi0: &[Complex64]) -> Result<Self> {
        check_normalized(psi0)?;
        self.overlaps = Some(self.coefficients(psi0)?);
        Ok(self)
    }

    /// `Σ_α c_α e^{-i E_α t} |α>` for given coefficients.
    pub fn state_at(&self, coefficients: &[Complex64], t: f64) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        for (k, &c) in coefficients.iter().enumerate() {
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            let w = c * Complex64::from_polar(1.0, -self.energies[k] * t);
            for (o, &v) in out.iter_mut().zip(self.eigenvector(k)) {
                *o += w * v;
            }
        }
        out
    }

    /// `max_ij |(V^T V - I)_ij|`.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..self.dim {
            for b in a..self.dim {
                let dot: f64 = self.eigenvector(a).iter().zip(self.eigenvector(b)).map(|(x, y)| x * y).sum();
                let expect = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - expect).abs());
            }
        }
        worst
    }

    /// `max_α ||H v_α - E_α v_α||_2`.
    pub fn max_residual(&self, op: &SparseOperator) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for k in 0..self.dim {
            let v = self.eigenvector(k);
            let hv = op.apply_real(v)?;
            let r: f64 = hv.iter().zip(v).map(|(a, b)| (a - self.energies[k] * b).powi(2)).sum();
            worst = worst.max(r.sqrt());
        }
        Ok(worst)
    }
}

/// Wavefunction at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolvedState {
    pub time: f64,
    pub amplitudes: Vec<Complex64>,
}

impl EvolvedState {
    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }
}

/// Lowest eigenpair with a degeneracy diagnostic.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundState {
    pub energy: f64,
    pub vector: Vec<f64>,
    /// Distance to the next level that is not degenerate with the ground
    /// level, if the solver saw one.
    pub gap: Option<f64>,
    /// Indices of levels within the degeneracy threshold of the ground
    /// level (including 0); empty when the ground level is isolated.
    pub degenerate_levels: Vec<usize>,
}

impl GroundState {
    pub fn is_degenerate(&self) -> bool {
        !self.degenerate_levels.is_empty()
    }

    pub fn complex_vector(&self) -> Vec<Complex64> {
        self.vector.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }
}

/// All eigenpairs of `op`, energies ascending.
pub fn full_diagonalize(op: &SparseOperator) -> Result<SpectralDecomposition> {
    if op.dim() > DENSE_DIMENSION_CAP {
        return Err(Error::Sizing {
            what: "dense diagonalization (use the Krylov propagator and iterative ground state)",
            dimension: op.dim() as u128,
            cap: DENSE_DIMENSION_CAP,
        });
    }
    let eig = symmetric_eigen(&op.to_dense(), op.dim())?;
    Ok(SpectralDecomposition {
        dim: eig.dim,
        energies: eig.values,
        vectors: eig.vectors,
        overlaps: None,
    })
}

/// Ground state from a complete decomposition.
pub fn ground_state_of(sd: &SpectralDecomposition) -> GroundState {
    let e = sd.energies();
    let threshold = DEGENERACY_THRESHOLD * sd.norm();
    let partners = (1..e.len()).take_while(|&k| e[k] - e[0] <= threshold).count();
    GroundState {
        energy: e[0],
        vector: sd.eigenvector(0).to_vec(),
        gap: e.get(partners + 1).map(|x| x - e[0]),
        degenerate_levels: if partners > 0 { (0..=partners).collect() } else { Vec::new() },
    }
}

/// Lowest eigenpair: dense solver up to [`DENSE_DIMENSION_CAP`], restarted
/// Lanczos beyond.
pub fn ground_state(op: &SparseOperator) -> Result<GroundState> {
    if op.dim() == 0 {
        return Err(Error::Input("empty operator"));
    }
    if op.dim() <= DENSE_DIMENSION_CAP {
        Ok(ground_state_of(&full_diagonalize(op)?))
    } else {
        lanczos_ground_state(op, 1e-10)
    }
}

/// Restarted Lanczos with full reorthogonalization. Only degeneracies that
/// show up as distinct Ritz values can be detected on this path.
pub fn lanczos_ground_state(op: &SparseOperator, tol: f64) -> Result<GroundState> {
    const SUBSPACE: usize = 120;
    const RESTARTS: usize = 200;
    let dim = op.dim();
    let scale = op.norm_bound().max(f64::MIN_POSITIVE);

    let mut rng = ChaCha8Rng::seed_from_u64(0x0b05_e0c4);
    let mut start: Vec<f64> = (0..dim)
        .map(|_| (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 - 0.5)
        .collect();
    normalize_real(&mut start);

    let mut residual = f64::INFINITY;
    for _ in 0..RESTARTS {
        let m_cap = SUBSPACE.min(dim);
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m_cap);
        let mut alphas = Vec::with_capacity(m_cap);
        let mut betas: Vec<f64> = Vec::with_capacity(m_cap);
        basis.push(start.clone());
        loop {
            let j = basis.len() - 1;
            let mut w = op.apply_real(&basis[j])?;
            let alpha: f64 = w.iter().zip(&basis[j]).map(|(a, b)| a * b).sum();
            alphas.push(alpha);
            for _ in 0..2 {
                for b in &basis {
                    let c: f64 = w.iter().zip(b).map(|(a, x)| a * x).sum();
                    for (wi, bi) in w.iter_mut().zip(b) {
                        *wi -= c * bi;
                    }
                }
            }
            let beta = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if basis.len() == m_cap || beta <= 1e-14 * scale {
                break;
            }
            betas.push(beta);
            for x in &mut w {
                *x /= beta;
            }
            basis.push(w);
        }
        let eig = tridiagonal_eigen(&alphas, &betas)?;
        let y = eig.vector(0);
        let mut ritz = vec![0.0; dim];
        for (coef, b) in y.iter().zip(&basis) {
            for (r, x) in ritz.iter_mut().zip(b) {
                *r += coef * x;
            }
        }
        normalize_real(&mut ritz);
        let theta = eig.values[0];
        let hx = op.apply_real(&ritz)?;
        residual = hx.iter().zip(&ritz).map(|(a, b)| (a - theta * b).powi(2)).sum::<f64>().sqrt();
        if residual <= tol * scale {
            let threshold = DEGENERACY_THRESHOLD * scale;
            let next = eig.values.iter().skip(1).copied().find(|&e| e - theta > threshold);
            let degenerate: Vec<usize> = (1..eig.values.len())
                .take_while(|&k| eig.values[k] - theta <= threshold)
                .collect();
            let mut degenerate_levels = Vec::new();
            if !degenerate.is_empty() {
                degenerate_levels.push(0);
                degenerate_levels.extend(degenerate);
            }
            return Ok(GroundState {
                energy: theta,
                vector: ritz,
                gap: next.map(|e| e - theta),
                degenerate_levels,
            });
        }
        start = ritz;
    }
    Err(Error::Convergence {
        residual: residual / scale,
        tolerance: tol,
    })
}

/// Spectral propagation of `psi0` to every time in `times`.
pub fn evolve_spectral(sd: &SpectralDecomposition, psi0: &[Complex64], times: &[f64]) -> Result<Vec<EvolvedState>> {
    check_normalized(psi0)?;
    let coefficients = sd.coefficients(psi0)?;
    Ok(times
        .iter()
        .map(|&t| EvolvedState {
            time: t,
            amplitudes: if t == 0.0 { psi0.to_vec() } else { sd.state_at(&coefficients, t) },
        })
        .collect())
}

/// Settings for [`evolve_krylov`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrylovOptions {
    /// Target 2-norm error of each reported state.
    pub tolerance: f64,
    /// Largest Krylov subspace built per step.
    pub max_subspace: usize,
    /// How often a step may be halved before giving up.
    pub max_halvings: usize,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        KrylovOptions {
            tolerance: 1e-10,
            max_subspace: 64,
            max_halvings: 40,
        }
    }
}

impl KrylovOptions {
    pub fn with_tolerance(tolerance: f64) -> Self {
        KrylovOptions {
            tolerance,
            ..Self::default()
        }
    }
}

/// Krylov propagation of `psi0` through the (possibly unsorted) list of
/// times, starting from `t = 0`. Each segment is split adaptively so that
/// the accumulated error estimate stays below `options.tolerance`.
pub fn evolve_krylov(
    op: &SparseOperator,
    psi0: &[Complex64],
    times: &[f64],
    options: KrylovOptions,
) -> Result<Vec<EvolvedState>> {
    if !(options.tolerance > 0.0) {
        return Err(Error::Domain("Krylov tolerance must be positive"));
    }
    if options.max_subspace == 0 {
        return Err(Error::Domain("Krylov subspace must hold at least one vector"));
    }
    if psi0.len() != op.dim() {
        return Err(Error::Dimension {
            expected: op.dim(),
            found: psi0.len(),
        });
    }
    check_normalized(psi0)?;

    let mut path_length = 0.0;
    let mut previous = 0.0;
    for &t in times {
        path_length += (t - previous).abs();
        previous = t;
    }
    // error budget per unit time
    let rate = if path_length > 0.0 { options.tolerance / path_length } else { 0.0 };

    let mut out = Vec::with_capacity(times.len());
    let mut state = psi0.to_vec();
    let mut now = 0.0;
    for &t in times {
        let mut remaining = t - now;
        while remaining != 0.0 {
            let taken = krylov_step(op, &mut state, remaining, rate, &options)?;
            remaining -= taken;
            if remaining.abs() <= 1e-15 * t.abs().max(1.0) {
                remaining = 0.0;
            }
        }
        now = t;
        out.push(EvolvedState {
            time: t,
            amplitudes: state.clone(),
        });
    }
    Ok(out)
}

/// Advance `state` by at most `step`; returns the time actually covered.
fn krylov_step(
    op: &SparseOperator,
    state: &mut Vec<Complex64>,
    step: f64,
    error_rate: f64,
    options: &KrylovOptions,
) -> Result<f64> {
    let dim = op.dim();
    let beta0 = norm(state);
    if beta0 == 0.0 {
        return Ok(step);
    }
    let scale = op.norm_bound().max(f64::MIN_POSITIVE);
    let m_cap = options.max_subspace.min(dim);

    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(m_cap);
    let mut alphas: Vec<f64> = Vec::with_capacity(m_cap);
    let mut betas: Vec<f64> = Vec::with_capacity(m_cap);
    basis.push(state.iter().map(|z| z / beta0).collect());
    let mut w = vec![Complex64::new(0.0, 0.0); dim];

    let budget = |h: f64| error_rate * h.abs();
    let mut accepted: Option<f64> = None;
    let mut last_estimate = f64::INFINITY;
    loop {
        let j = basis.len() - 1;
        op.apply_into(&basis[j], &mut w)?;
        let alpha = inner(&basis[j], &w).re;
        alphas.push(alpha);
        for _ in 0..2 {
            for b in &basis {
                let c = inner(b, &w);
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= c * bi;
                }
            }
        }
        let beta = norm(&w);
        let eig = tridiagonal_eigen(&alphas, &betas)?;
        if beta <= 1e-13 * scale {
            // invariant subspace: the projection is exact for any step
            accepted = Some(step);
            let coeffs = tridiagonal_exp_first_column(&eig, step);
            assemble(state, &basis, &coeffs, beta0);
            break;
        }
        let estimate = |h: f64| {
            let coeffs = tridiagonal_exp_first_column(&eig, h);
            beta * coeffs[coeffs.len() - 1].norm() * beta0
        };
        last_estimate = estimate(step);
        if last_estimate <= budget(step) {
            accepted = Some(step);
            let coeffs = tridiagonal_exp_first_column(&eig, step);
            assemble(state, &basis, &coeffs, beta0);
            break;
        }
        if basis.len() == m_cap {
            let mut h = step;
            for _ in 0..options.max_halvings {
                h *= 0.5;
                last_estimate = estimate(h);
                if last_estimate <= budget(h) {
                    accepted = Some(h);
                    let coeffs = tridiagonal_exp_first_column(&eig, h);
                    assemble(state, &basis, &coeffs, beta0);
                    break;
                }
            }
            break;
        }
        betas.push(beta);
        basis.push(w.iter().map(|z| z / beta).collect());
    }
    accepted.ok_or(Error::Convergence {
        residual: last_estimate,
        tolerance: options.tolerance,
    })
}

fn assemble(state: &mut [Complex64], basis: &[Vec<Complex64>], coeffs: &[Complex64], scale: f64) {
    for s in state.iter_mut() {
        *s = Complex64::new(0.0, 0.0);
    }
    for (c, b) in coeffs.iter().zip(basis) {
        let c = c * scale;
        for (s, x) in state.iter_mut().zip(b) {
            *s += c * x;
        }
    }
}

/// `<a|b>` with the conjugate on `a`.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).fold(Complex64::new(0.0, 0.0), |acc, (x, y)| acc + x.conj() * y)
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `<ψ|H|ψ>` (real part).
pub fn expectation(op: &SparseOperator, psi: &[Complex64]) -> Result<f64> {
    Ok(inner(psi, &op.apply(psi)?).re)
}

fn check_normalized(psi: &[Complex64]) -> Result<()> {
    let n = norm(psi);
    if (n - 1.0).abs() > NORM_TOLERANCE || !n.is_finite() {
        return Err(Error::Unnormalized { norm: n });
    }
    Ok(())
}

fn normalize_real(v: &mut [f64]) {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        for x in v {
            *x /= n;
        }
    }
}
