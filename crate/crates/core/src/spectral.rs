//! Eigendecomposition and quantum-walk evolution.
//!
//! For `H = Σ λ_j φ_j φ_jᵀ` the walk started at `u` has amplitude
//! `⟨v|e^{itH}|u⟩ = Σ_j φ_j(u) φ_j(v) e^{itλ_j}` at vertex `v`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::complex::Complex;
use crate::error::{Error, Result};
use crate::hamiltonian::{lift_eigenpair, BlockReduction, Sector};
use crate::jacobi;
use crate::matrix::{self, Matrix};
use crate::math;

/// Smallest `λ₁ − λ₂` accepted by [`optimal_time`].
pub const MIN_GAP: f64 = 1e-12;

/// Eigenvalues `λ₁ ≥ … ≥ λ_n` and orthonormal eigenvectors stored as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
    vectors: Matrix,
    sectors: Option<Vec<Sector>>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, j: usize) -> f64 {
        self.values[j]
    }

    pub fn vectors(&self) -> &Matrix {
        &self.vectors
    }

    pub fn vector(&self, j: usize) -> Vec<f64> {
        self.vectors.column(j)
    }

    /// `φ_j(v)`
    #[inline]
    pub fn component(&self, j: usize, v: usize) -> f64 {
        self.vectors[(v, j)]
    }

    pub fn sectors(&self) -> Option<&[Sector]> {
        self.sectors.as_deref()
    }

    pub fn is_tagged(&self) -> bool {
        self.sectors.is_some()
    }

    /// Index of the largest eigenvalue coming from `sector`.
    pub fn top_of(&self, sector: Sector) -> Option<usize> {
        self.sectors.as_ref()?.iter().position(|&s| s == sector)
    }

    /// Largest `‖Hφ_j − λ_jφ_j‖` over all pairs.
    pub fn max_residual(&self, h: &Matrix) -> f64 {
        (0..self.len())
            .map(|j| {
                let phi = self.vector(j);
                let hphi = h.mul_vec(&phi);
                let r: Vec<f64> = hphi.iter().zip(&phi).map(|(a, b)| a - self.values[j] * b).collect();
                matrix::norm(&r)
            })
            .fold(0.0, f64::max)
    }

    /// Largest entry of `|ΦᵀΦ − I|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let gram = self.vectors.transpose().matmul(&self.vectors);
        gram.max_abs_diff(&Matrix::identity(self.len()))
    }
}

/// Jacobi eigendecomposition of a real symmetric matrix; the result is untagged.
pub fn eig_symmetric(m: &Matrix) -> Result<Spectrum> {
    let d = jacobi::decompose(m)?;
    Ok(Spectrum { values: d.values, vectors: d.vectors, sectors: None })
}

/// Spectrum of `H` assembled from the two reduced blocks, each eigenvalue tagged
/// with the block it came from.
///
/// Eigenvectors are exactly σ-symmetric (plus) or antisymmetric (minus).
/// Equal eigenvalues from different blocks keep their own tags; the plus
/// block is listed first on ties. The top plus eigenvalue always comes first.
pub fn tagged_spectrum(red: &BlockReduction) -> Result<Spectrum> {
    let n = red.partition.n();
    let mut pairs: Vec<(f64, Sector, Vec<f64>)> = Vec::with_capacity(n);
    for sector in [Sector::Plus, Sector::Minus] {
        let block = eig_symmetric(red.block(sector))?;
        for j in 0..block.len() {
            let lifted = lift_eigenpair(red, sector, &block.vector(j))?;
            // keep the block eigenvalue, which the Rayleigh quotient reproduces
            pairs.push((block.value(j), sector, lifted.vector));
        }
    }
    pairs.sort_by(|a, b| {
        b.0.total_cmp(&a.0).then_with(|| match (a.1, b.1) {
            (Sector::Plus, Sector::Minus) => core::cmp::Ordering::Less,
            (Sector::Minus, Sector::Plus) => core::cmp::Ordering::Greater,
            _ => core::cmp::Ordering::Equal,
        })
    });
    // The Perron root is simple and largest; a minus eigenvalue above it can
    // only be rounding, so it is clamped and listed after.
    if let Some(top) = pairs.iter().position(|p| p.1 == Sector::Plus) {
        let perron = pairs[top].0;
        let slack = 8.0 * n as f64 * f64::EPSILON * red.hamiltonian().matrix().norm_inf().max(1.0);
        if top > 0 && pairs[0].0 - perron <= slack {
            let p = pairs.remove(top);
            pairs.insert(0, p);
            for pair in pairs.iter_mut().skip(1) {
                pair.0 = pair.0.min(perron);
            }
        }
    }
    let mut vectors = Matrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    let mut sectors = Vec::with_capacity(n);
    for (col, (value, sector, vec)) in pairs.into_iter().enumerate() {
        for (r, x) in vec.into_iter().enumerate() {
            vectors[(r, col)] = x;
        }
        values.push(value);
        sectors.push(sector);
    }
    Ok(Spectrum { values, vectors, sectors: Some(sectors) })
}

/// Amplitude and probability of the walk from `u` reaching `v` at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TransferResult {
    pub t: f64,
    pub probability: f64,
    pub amplitude: Complex,
}

fn check_vertex(spec: &Spectrum, v: usize) -> Result<()> {
    if v >= spec.len() {
        return Err(Error::Structure(alloc::format!("vertex {v} out of range for n = {}", spec.len())));
    }
    Ok(())
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(alloc::format!("time must be finite and non-negative, got {t}")));
    }
    Ok(())
}

fn pair_weights(spec: &Spectrum, u: usize, v: usize) -> Vec<f64> {
    (0..spec.len()).map(|j| spec.component(j, u) * spec.component(j, v)).collect()
}

fn amplitude_from_weights(values: &[f64], weights: &[f64], t: f64) -> Complex {
    let mut amp = Complex::ZERO;
    for (&w, &lambda) in weights.iter().zip(values) {
        if w != 0.0 {
            amp += Complex::cis(t * lambda).scale(w);
        }
    }
    amp
}

pub fn transfer_probability(spec: &Spectrum, u: usize, v: usize, t: f64) -> Result<TransferResult> {
    check_vertex(spec, u)?;
    check_vertex(spec, v)?;
    check_time(t)?;
    let amplitude = amplitude_from_weights(&spec.values, &pair_weights(spec, u, v), t);
    Ok(TransferResult { t, probability: amplitude.norm_sqr(), amplitude })
}

/// The state `e^{itH} e_u`.
pub fn evolve(spec: &Spectrum, u: usize, t: f64) -> Result<Vec<Complex>> {
    check_vertex(spec, u)?;
    check_time(t)?;
    let phases: Vec<Complex> = (0..spec.len()).map(|j| Complex::cis(t * spec.value(j)).scale(spec.component(j, u))).collect();
    Ok((0..spec.len())
        .map(|x| {
            let mut z = Complex::ZERO;
            for (j, &p) in phases.iter().enumerate() {
                z += p.scale(spec.component(j, x));
            }
            z
        })
        .collect())
}

/// `Σ φ_j(u)² e^{itλ_j}` over each sector separately.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeSplit {
    pub plus: Complex,
    pub minus: Complex,
}

impl AmplitudeSplit {
    /// `|S⁺ − S⁻|²`, the probability of reaching `σ(u)`.
    pub fn transfer_probability(&self) -> f64 {
        (self.plus - self.minus).norm_sqr()
    }
}

pub fn amplitude_split(spec: &Spectrum, u: usize, t: f64) -> Result<AmplitudeSplit> {
    check_vertex(spec, u)?;
    check_time(t)?;
    let sectors = spec
        .sectors()
        .ok_or_else(|| Error::Domain("amplitude split needs a sector-tagged spectrum".into()))?;
    let mut split = AmplitudeSplit { plus: Complex::ZERO, minus: Complex::ZERO };
    for (j, &sector) in sectors.iter().enumerate() {
        let phi = spec.component(j, u);
        let term = Complex::cis(t * spec.value(j)).scale(phi * phi);
        match sector {
            Sector::Plus => split.plus += term,
            Sector::Minus => split.minus += term,
        }
    }
    Ok(split)
}

/// `π / (λ₁ − λ₂)`
pub fn optimal_time(spec: &Spectrum) -> Result<f64> {
    if spec.len() < 2 {
        return Err(Error::Domain("optimal time needs at least two eigenvalues".into()));
    }
    let gap = spec.value(0) - spec.value(1);
    if gap <= MIN_GAP {
        return Err(Error::Numeric { what: "spectral gap", residual: gap });
    }
    Ok(PI / gap)
}

/// Largest phase uncertainty (radians) reported as resolved.
pub const PHASE_TOLERANCE: f64 = 1e-6;
/// Relative accuracy assumed for the gap passed to [`optimal_transfer`].
pub const GAP_RELATIVE_ACCURACY: f64 = 1e-9;

/// Transfer at `t = π/gap` between the two leading eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct OptimalTransfer {
    pub t: f64,
    /// `|A|²` when the phases are resolved, otherwise `(|A| − err)²` with `err`
    /// bounding the amplitude error caused by eigenvalue error.
    pub probability: f64,
    /// Amplitude in the frame rotating with `λ₁`, i.e. `e^{−itλ₁}⟨v|e^{itH}|u⟩`.
    pub amplitude: Complex,
    /// Largest phase error of any term at time `t`, capped at `π`.
    pub phase_uncertainty: f64,
    pub phase_resolved: bool,
}

/// Evaluates `p(π/gap)` with the two leading terms exactly in antiphase.
///
/// `gap` may come from a more accurate source than `λ_{i1} − λ_{i2}`; the other
/// phases are taken relative to `λ_{i1}`. The error of each eigenvalue is
/// bounded by its residual on `h` plus rounding, which turns into a phase
/// error growing linearly in `t`.
pub fn optimal_transfer(
    spec: &Spectrum,
    h: &Matrix,
    u: usize,
    v: usize,
    i1: usize,
    i2: usize,
    gap: f64,
) -> Result<OptimalTransfer> {
    check_vertex(spec, u)?;
    check_vertex(spec, v)?;
    if i1 >= spec.len() || i2 >= spec.len() || i1 == i2 {
        return Err(Error::Structure(alloc::format!("invalid eigenvalue indices {i1}, {i2}")));
    }
    if h.rows() != spec.len() || !h.is_square() {
        return Err(Error::Structure("Hamiltonian does not match the spectrum".into()));
    }
    if !(gap > 0.0) || !gap.is_finite() {
        return Err(Error::Numeric { what: "spectral gap", residual: gap });
    }
    let n = spec.len();
    let t = PI / gap;
    let weights = pair_weights(spec, u, v);
    let rounding = 2.0 * n as f64 * f64::EPSILON * h.norm_inf().max(1.0);
    let error_of = |j: usize| {
        let phi = spec.vector(j);
        let r: Vec<f64> = h.mul_vec(&phi).iter().zip(&phi).map(|(a, b)| a - spec.values[j] * b).collect();
        matrix::norm(&r) + rounding
    };
    let e1 = error_of(i1);

    let mut amplitude = Complex::new(weights[i1] - weights[i2], 0.0);
    let lead_phase = PI * GAP_RELATIVE_ACCURACY;
    let mut err = weights[i2].abs() * lead_phase;
    let mut phase_uncertainty = lead_phase;
    for (j, &w) in weights.iter().enumerate() {
        if j == i1 || j == i2 || w == 0.0 {
            continue;
        }
        let dtheta = (t * (error_of(j) + e1)).min(PI);
        phase_uncertainty = phase_uncertainty.max(dtheta);
        err += w.abs() * (2.0 * math::sin_cos(0.5 * dtheta).0);
        amplitude += Complex::cis(t * (spec.values[j] - spec.values[i1])).scale(w);
    }
    let phase_resolved = phase_uncertainty <= PHASE_TOLERANCE;
    let probability = if phase_resolved {
        amplitude.norm_sqr()
    } else {
        let low = (amplitude.abs() - err).max(0.0);
        low * low
    };
    Ok(OptimalTransfer { t, probability, amplitude, phase_uncertainty, phase_resolved })
}

/// Number of grid points `{0, step, 2 step, …} ∩ [0, horizon]`.
pub fn grid_len(horizon: f64, step: f64) -> Result<usize> {
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::Domain(alloc::format!("horizon must be positive, got {horizon}")));
    }
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::Domain(alloc::format!("step must be positive, got {step}")));
    }
    if step > horizon {
        return Err(Error::Domain(alloc::format!("step {step} exceeds horizon {horizon}")));
    }
    // tolerate rounding so that horizon = k * step includes its last point
    Ok(math::floor(horizon / step * (1.0 + 1e-12)) as usize + 1)
}

/// Default grid: horizon `2π/(λ₁ − λ₂)`, step `0.05/(λ₁ − λ_n)`.
pub fn default_search_grid(spec: &Spectrum) -> Result<(f64, f64)> {
    let t_star = optimal_time(spec)?;
    let spread = spec.value(0) - spec.value(spec.len() - 1);
    Ok((2.0 * t_star, 0.05 / spread))
}

/// Best point of a time grid.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct FidelityPeak {
    pub t: f64,
    pub probability: f64,
}

/// Maximizes `p(t)` over the grid of [`grid_len`]; ties go to the earlier time.
pub fn fidelity_search(spec: &Spectrum, u: usize, v: usize, horizon: f64, step: f64) -> Result<FidelityPeak> {
    check_vertex(spec, u)?;
    check_vertex(spec, v)?;
    let points = grid_len(horizon, step)?;
    let weights = pair_weights(spec, u, v);
    let mut best = FidelityPeak { t: 0.0, probability: f64::NEG_INFINITY };
    for i in 0..points {
        let t = i as f64 * step;
        let p = amplitude_from_weights(&spec.values, &weights, t).norm_sqr();
        if p > best.probability {
            best = FidelityPeak { t, probability: p };
        }
    }
    Ok(best)
}
