//! Certified lower bounds for state transfer between the wells `v` and `v' = σ(v)`.
//!
//! All bounds assume potential `Q` on the two wells and zero elsewhere, with
//! `m` the maximum degree and `d = d(v, v')`:
//!
//! * `λ₁ ≥ Q + Q⁻¹ (1 + Σ_{i≥2} (deg_{N∪S}(v_i) − 1) y_i²) / Σ y_i²`
//! * `λ₂ ≥ Q − (1 + Σ_{i≥2} (deg_{N∪σN}(v_i) − 1) ỹ_i²) / Σ ỹ_i²`
//! * `φ₁(v) ≥ √(½ − m/2Q²) − √(m/(Q−m))`, `φ₂(v) ≥ √(½ − m/2Q²) − √((m+1)/(Q−m−1))` for `Q > 2m`
//! * `p(t*) ≥ (4L² − 1)²` with `L` the second of the two eigenvector bounds
//! * `λ₁ − λ₂ > 2/(Q + m)^{d−1}` and hence `t* = π/(λ₁ − λ₂) < (π/2)(Q + m)^{d−1}`

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::graph::{Graph, Involution};
use crate::hamiltonian::Sector;
use crate::math;
use crate::matrix::{self, Matrix};
use crate::hamiltonian::BlockReduction;
use crate::spectral::{optimal_transfer, tagged_spectrum, OptimalTransfer, Spectrum};
use crate::walks::{refined_gap, GAP_TOLERANCE};
use crate::well::DoubleWell;

/// Additive slack on every bound comparison, absorbing eigensolver error.
pub const BOUND_TOLERANCE: f64 = 1e-9;

/// Trial vector for a Rayleigh quotient on `H⁺` (plus) or `H⁻` (minus).
#[derive(Debug, Clone, PartialEq)]
pub struct TestVector {
    pub kind: Sector,
    /// Reduced vertex order: `N` then `S` for plus, `N` for minus.
    pub vertices: Vec<usize>,
    pub entries: Vec<f64>,
}

impl TestVector {
    /// The vector on all `n` vertices: `[y, y, y_S]` for plus, `[ỹ, −ỹ, 0]` for minus.
    pub fn duplicated(&self, dw: &DoubleWell) -> Vec<f64> {
        let part = &dw.partition;
        let mut full = alloc::vec![0.0; part.n()];
        let sign = match self.kind {
            Sector::Plus => 1.0,
            Sector::Minus => -1.0,
        };
        for (j, (&v, &y)) in self.vertices.iter().zip(&self.entries).enumerate() {
            full[v] = y;
            if j < part.k() {
                full[part.mirror[j]] = sign * y;
            }
        }
        full
    }
}

fn check_q(q: f64) -> Result<()> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::Domain(alloc::format!("potential must be positive, got {q}")));
    }
    Ok(())
}

/// `y_i = Q^{−min(d(v, v_i), d(v, v_i'))}` on `N ∪ S` (plus), or on `N` with
/// zeros at vertices equidistant from both wells (minus).
pub fn test_vector_for(dw: &DoubleWell, kind: Sector) -> Result<TestVector> {
    check_q(dw.q)?;
    let part = &dw.partition;
    let vertices = match kind {
        Sector::Plus => part.reduced_vertices(),
        Sector::Minus => part.primary.clone(),
    };
    let entries = vertices
        .iter()
        .map(|&v| {
            if kind == Sector::Minus && dw.is_equidistant(v) {
                0.0
            } else {
                math::powi(dw.q, -(dw.min_distance(v) as i32))
            }
        })
        .collect();
    Ok(TestVector { kind, vertices, entries })
}

pub fn build_test_vector(g: &Graph, inv: &Involution, well: usize, kind: Sector, q: f64) -> Result<TestVector> {
    check_q(q)?;
    test_vector_for(&DoubleWell::new(g, inv, well, q)?, kind)
}

/// `(xᵀ M x) / (xᵀ x)`
pub fn rayleigh_quotient(m: &Matrix, x: &[f64]) -> Result<f64> {
    if x.len() != m.cols() || !m.is_square() {
        return Err(Error::Structure(alloc::format!(
            "vector of length {} against a {}x{} matrix",
            x.len(),
            m.rows(),
            m.cols()
        )));
    }
    let norm_sq = matrix::dot(x, x);
    if norm_sq == 0.0 {
        return Err(Error::Domain("Rayleigh quotient of the zero vector".into()));
    }
    Ok(matrix::dot(x, &m.mul_vec(x)) / norm_sq)
}

fn degree_within(g: &Graph, v: usize, inside: &[bool]) -> usize {
    g.neighbors(v).iter().filter(|&&w| inside[w]).count()
}

/// Closed-form `λ₁` bound next to the Rayleigh quotient it under-approximates.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Lambda1Lower {
    pub value: f64,
    /// Rayleigh quotient of the duplicated test vector on `H`.
    pub rayleigh: f64,
}

pub fn lambda1_lower_for(dw: &DoubleWell) -> Result<Lambda1Lower> {
    let y = test_vector_for(dw, Sector::Plus)?;
    let part = &dw.partition;
    let mut inside = alloc::vec![false; part.n()];
    for &v in &y.vertices {
        inside[v] = true;
    }
    let mut numerator = 1.0;
    for (&v, &yi) in y.vertices.iter().zip(&y.entries).skip(1) {
        numerator += (degree_within(&dw.graph, v, &inside) as f64 - 1.0) * yi * yi;
    }
    let denominator: f64 = y.entries.iter().map(|e| e * e).sum();
    let q = dw.q;
    let full = y.duplicated(dw);
    let h = crate::hamiltonian::assemble_hamiltonian(&dw.graph);
    Ok(Lambda1Lower { value: q + numerator / (q * denominator), rayleigh: rayleigh_quotient(h.matrix(), &full)? })
}

pub fn lambda1_lower(g: &Graph, inv: &Involution, well: usize, q: f64) -> Result<Lambda1Lower> {
    check_q(q)?;
    lambda1_lower_for(&DoubleWell::new(g, inv, well, q)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Lambda2Lower {
    pub value: f64,
    /// The weaker `Q − m`.
    pub degree_floor: f64,
    /// Rayleigh quotient of the minus test vector on `H⁻`.
    pub rayleigh: f64,
}

pub fn lambda2_lower_for(dw: &DoubleWell) -> Result<Lambda2Lower> {
    let y = test_vector_for(dw, Sector::Minus)?;
    let part = &dw.partition;
    let mut inside = alloc::vec![false; part.n()];
    for &v in part.primary.iter().chain(&part.mirror) {
        inside[v] = true;
    }
    let mut numerator = 1.0;
    for (&v, &yi) in y.vertices.iter().zip(&y.entries).skip(1) {
        numerator += (degree_within(&dw.graph, v, &inside) as f64 - 1.0) * yi * yi;
    }
    let denominator: f64 = y.entries.iter().map(|e| e * e).sum();
    let red = dw.reduce()?;
    Ok(Lambda2Lower {
        value: dw.q - numerator / denominator,
        degree_floor: dw.q - dw.max_degree as f64,
        rayleigh: rayleigh_quotient(&red.minus, &y.entries)?,
    })
}

pub fn lambda2_lower(g: &Graph, inv: &Involution, well: usize, q: f64) -> Result<Lambda2Lower> {
    check_q(q)?;
    lambda2_lower_for(&DoubleWell::new(g, inv, well, q)?)
}

/// Which of the two leading eigenvectors a bound refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Leading {
    First,
    Second,
}

fn check_above_twice_degree(q: f64, m: usize) -> Result<()> {
    if !(q > 2.0 * m as f64) {
        return Err(Error::Precondition(alloc::format!("Q = {q} must exceed 2m = {}", 2 * m)));
    }
    Ok(())
}

/// Lower bound on `|φ(v)|` at the well for the leading symmetric or
/// antisymmetric eigenvector; may be negative for small `q`.
pub fn phi_lower(q: f64, m: usize, which: Leading) -> Result<f64> {
    check_above_twice_degree(q, m)?;
    let mf = m as f64;
    let base = math::sqrt(0.5 - mf / (2.0 * q * q));
    let loss = match which {
        Leading::First => math::sqrt(mf / (q - mf)),
        Leading::Second => math::sqrt((mf + 1.0) / (q - mf - 1.0)),
    };
    Ok(base - loss)
}

/// `(4L² − 1)²` for `L = phi_lower(q, m, Second)`; `None` when `L < ½`, where
/// the bound carries no information.
pub fn fidelity_lower(q: f64, m: usize) -> Result<Option<f64>> {
    let l = phi_lower(q, m, Leading::Second)?;
    if l < 0.5 {
        return Ok(None);
    }
    let inner = 4.0 * l * l - 1.0;
    Ok(Some(inner * inner))
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MinPotential {
    pub c: f64,
    /// `(m + 1)(c + 1)/c`
    pub q_formula: f64,
    /// `256 (m + 1)/ε²`
    pub q_sufficient_256: f64,
}

/// Potential sufficient for transfer fidelity `1 − ε`.
pub fn min_potential(epsilon: f64, m: usize) -> Result<MinPotential> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Domain(alloc::format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    let shift = 0.5 - (1.0 + math::sqrt(1.0 - epsilon)) / 4.0;
    let c = 0.5 * shift * shift;
    let mf = m as f64 + 1.0;
    Ok(MinPotential { c, q_formula: mf * (c + 1.0) / c, q_sufficient_256: 256.0 * mf / (epsilon * epsilon) })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct GapLower {
    /// `2/(Q + m)^{d−1}`
    pub gap: f64,
    /// `(π/2)(Q + m)^{d−1}`, the matching bound on `t*`.
    pub time_bound: f64,
}

pub fn gap_lower(q: f64, m: usize, d: usize) -> Result<GapLower> {
    if d == 0 {
        return Err(Error::Domain("well distance must be at least 1".into()));
    }
    let scale = math::powi(q + m as f64, d as i32 - 1);
    Ok(GapLower { gap: 2.0 / scale, time_bound: 0.5 * PI * scale })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct NormBound {
    /// `2/(1 − m/Q²)`
    pub bound: f64,
    /// `2 Σ_{l=0..dmax} m^l Q^{−2l}`, never above `bound`.
    pub truncated: f64,
}

/// Upper bound on the squared norm of the duplicated plus test vector.
pub fn norm_bound_d(q: f64, m: usize, dmax: usize) -> Result<NormBound> {
    let mf = m as f64;
    if !(q > math::sqrt(mf)) {
        return Err(Error::Divergence(alloc::format!("Q = {q} must exceed sqrt(m) = {}", math::sqrt(mf))));
    }
    let ratio = mf / (q * q);
    let mut truncated = 0.0;
    let mut term = 2.0;
    for _ in 0..=dmax {
        truncated += term;
        term *= ratio;
    }
    Ok(NormBound { bound: 2.0 / (1.0 - ratio), truncated })
}

/// `2 Σ_l |F_l| Q^{−2l}` where `F_l` holds the vertices of `N ∪ S` at
/// distance `l` from the nearer well.
pub fn shell_norm_d(dw: &DoubleWell) -> f64 {
    let q2 = dw.q * dw.q;
    2.0 * dw
        .partition
        .reduced_vertices()
        .iter()
        .map(|&v| math::powi(q2, -(dw.min_distance(v) as i32)))
        .sum::<f64>()
}

/// One bound next to the value it should not exceed.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BoundCheck {
    pub value: Option<f64>,
    pub computed: f64,
    pub holds: bool,
    pub applicable: bool,
}

impl BoundCheck {
    fn lower(value: f64, computed: f64) -> Self {
        BoundCheck { value: Some(value), computed, holds: value <= computed + BOUND_TOLERANCE, applicable: true }
    }

    fn not_applicable(computed: f64) -> Self {
        BoundCheck { value: None, computed, holds: true, applicable: false }
    }
}

/// Ground truth the bounds are checked against.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ComputedValues {
    pub lambda1: f64,
    pub lambda2: f64,
    pub gap: f64,
    /// `"walk_series"` or `"eigenvalues"`.
    pub gap_method: &'static str,
    pub phi1: f64,
    pub phi2: f64,
    pub t_star: f64,
    pub p_t_star: f64,
    /// False when eigenvalue error leaves the phases at `t*` uncertain by more
    /// than [`crate::spectral::PHASE_TOLERANCE`]; `p_t_star` is then a lower estimate.
    pub phase_resolved: bool,
    pub phase_uncertainty: f64,
    /// Whether `λ₂` is the top of the antisymmetric block.
    pub lambda2_in_minus: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BoundReport {
    pub q: f64,
    pub m: usize,
    pub d: usize,
    pub well: usize,
    pub partner: usize,
    pub lambda1_lower: BoundCheck,
    /// Closed-form `λ₁` bound against the exact Rayleigh quotient.
    pub lambda1_rayleigh: BoundCheck,
    pub lambda2_lower: BoundCheck,
    pub gap_lower: BoundCheck,
    /// Set for adjacent wells when the gap meets its bound with equality.
    pub gap_equality: bool,
    /// `t*` against `(π/2)(Q + m)^{d−1}`; `holds` means `t*` is below it.
    pub time_upper: BoundCheck,
    pub phi1_lower: BoundCheck,
    pub phi2_lower: BoundCheck,
    pub fidelity_lower: BoundCheck,
    /// `1 − 16 √(m+1)/√Q` against `p(t*)`, applicable for `Q ≥ m`.
    pub main_theorem: BoundCheck,
    pub computed: ComputedValues,
    pub all_hold: bool,
}

pub fn certify(g: &Graph, inv: &Involution, well: usize, q: f64) -> Result<BoundReport> {
    check_q(q)?;
    certify_double_well(&DoubleWell::new(g, inv, well, q)?)
}

/// The two leading eigenvalues of a double well and the gap between them.
#[derive(Debug, Clone)]
pub struct LeadingPair {
    pub reduction: BlockReduction,
    pub spectrum: Spectrum,
    /// Index of `λ₁`, the Perron root.
    pub i1: usize,
    /// Index of `λ₂`, the largest remaining eigenvalue.
    pub i2: usize,
    pub gap: f64,
    /// `"walk_series"` or `"eigenvalues"`.
    pub gap_method: &'static str,
}

impl LeadingPair {
    pub fn lambda1(&self) -> f64 {
        self.spectrum.value(self.i1)
    }

    pub fn lambda2(&self) -> f64 {
        self.spectrum.value(self.i2)
    }

    pub fn lambda2_in_minus(&self) -> bool {
        self.spectrum.sectors().map(|s| s[self.i2]) == Some(Sector::Minus)
    }

    /// Transfer from the well to its partner at `t* = π/(λ₁ − λ₂)`.
    pub fn transfer(&self) -> Result<OptimalTransfer> {
        let part = &self.reduction.partition;
        optimal_transfer(
            &self.spectrum,
            self.reduction.hamiltonian().matrix(),
            part.well(),
            part.partner(),
            self.i1,
            self.i2,
            self.gap,
        )
    }
}

/// Tagged spectrum with `λ₁ − λ₂` taken from the walk series when the
/// eigenvalues alone cannot resolve it.
pub fn leading_pair(dw: &DoubleWell) -> Result<LeadingPair> {
    let reduction = dw.reduce()?;
    let spectrum = tagged_spectrum(&reduction)?;
    // λ₁ is the Perron root and always symmetric; λ₂ is the next eigenvalue
    let i1 = spectrum.top_of(Sector::Plus).expect("plus block is never empty");
    let i2 = (0..spectrum.len()).find(|&j| j != i1).ok_or_else(|| Error::Domain("graph has a single vertex".into()))?;
    let (l1, l2) = (spectrum.value(i1), spectrum.value(i2));
    let in_minus = spectrum.sectors().map(|s| s[i2]) == Some(Sector::Minus);
    let (gap, gap_method) = match in_minus.then(|| refined_gap(dw, l1, l2)).flatten() {
        Some(g) => (g, "walk_series"),
        None => (l1 - l2, "eigenvalues"),
    };
    Ok(LeadingPair { reduction, spectrum, i1, i2, gap, gap_method })
}

pub fn certify_double_well(dw: &DoubleWell) -> Result<BoundReport> {
    let (q, m, d) = (dw.q, dw.max_degree, dw.well_distance());
    let (v, vp) = (dw.well(), dw.partner());
    let lead = leading_pair(dw)?;
    let spec = &lead.spectrum;
    let (i1, i2) = (lead.i1, lead.i2);
    let (l1, l2) = (lead.lambda1(), lead.lambda2());
    let lambda2_in_minus = lead.lambda2_in_minus();
    let (gap, gap_method) = (lead.gap, lead.gap_method);
    let phi1 = spec.component(i1, v).abs();
    let phi2 = spec.component(i2, v).abs();
    let transfer = lead.transfer()?;
    let p = transfer.probability;

    let l1_bound = lambda1_lower_for(dw)?;
    let l2_bound = lambda2_lower_for(dw)?;
    let gl = gap_lower(q, m, d)?;
    let gap_check = if d >= 2 {
        BoundCheck { value: Some(gl.gap), computed: gap, holds: gl.gap < gap, applicable: true }
    } else {
        BoundCheck { value: Some(gl.gap), computed: gap, holds: gl.gap <= gap + GAP_TOLERANCE, applicable: true }
    };
    let gap_equality = d == 1 && (gap - gl.gap).abs() <= GAP_TOLERANCE;
    let time_upper = BoundCheck {
        value: Some(gl.time_bound),
        computed: transfer.t,
        holds: transfer.t < gl.time_bound || (d == 1 && gap_equality),
        applicable: true,
    };

    let above = q > 2.0 * m as f64;
    let (phi1_lower, phi2_lower, fid) = if above {
        let f = match fidelity_lower(q, m)? {
            Some(f) => BoundCheck::lower(f, p),
            None => BoundCheck::not_applicable(p),
        };
        (
            BoundCheck::lower(phi_lower(q, m, Leading::First)?, phi1),
            BoundCheck::lower(phi_lower(q, m, Leading::Second)?, phi2),
            f,
        )
    } else {
        (BoundCheck::not_applicable(phi1), BoundCheck::not_applicable(phi2), BoundCheck::not_applicable(p))
    };
    let main_theorem = if q >= m as f64 {
        BoundCheck::lower(1.0 - 16.0 * math::sqrt(m as f64 + 1.0) / math::sqrt(q), p)
    } else {
        BoundCheck::not_applicable(p)
    };

    let mut report = BoundReport {
        q,
        m,
        d,
        well: v,
        partner: vp,
        lambda1_lower: BoundCheck::lower(l1_bound.value, l1),
        lambda1_rayleigh: BoundCheck::lower(l1_bound.value, l1_bound.rayleigh),
        lambda2_lower: BoundCheck::lower(l2_bound.value, l2),
        gap_lower: gap_check,
        gap_equality,
        time_upper,
        phi1_lower,
        phi2_lower,
        fidelity_lower: fid,
        main_theorem,
        computed: ComputedValues {
            lambda1: l1,
            lambda2: l2,
            gap,
            gap_method,
            phi1,
            phi2,
            t_star: transfer.t,
            p_t_star: p,
            phase_resolved: transfer.phase_resolved,
            phase_uncertainty: transfer.phase_uncertainty,
            lambda2_in_minus,
        },
        all_hold: false,
    };
    report.all_hold = report.checks().iter().all(|(_, c)| c.holds);
    Ok(report)
}

impl BoundReport {
    /// Every comparison with its name, in report order.
    pub fn checks(&self) -> [(&'static str, BoundCheck); 10] {
        [
            ("lambda1_lower", self.lambda1_lower),
            ("lambda1_rayleigh", self.lambda1_rayleigh),
            ("lambda2_lower", self.lambda2_lower),
            ("gap_lower", self.gap_lower),
            ("time_upper", self.time_upper),
            ("phi1_lower", self.phi1_lower),
            ("phi2_lower", self.phi2_lower),
            ("fidelity_lower", self.fidelity_lower),
            ("main_theorem", self.main_theorem),
            ("lambda2_in_minus", self.ordering_check()),
        ]
    }

    fn ordering_check(&self) -> BoundCheck {
        // only asserted where the Gershgorin intervals separate
        let applicable = self.q >= 2.0 * self.m as f64 + 1.0;
        BoundCheck {
            value: None,
            computed: self.computed.lambda2,
            holds: !applicable || self.computed.lambda2_in_minus,
            applicable,
        }
    }
}
