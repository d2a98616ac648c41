//! Walk generating functions between the two wells.
//!
//! `Z_xy(λ) = Σ_P λ^{-|P|}` runs over walks `P` of length at least one from
//! `x` to `y` whose intermediate vertices avoid both wells. With potential `Q`
//! on the wells and zero elsewhere, an eigenpair `(λ, φ)` with `|λ| > m`
//! satisfies `λ (Z_vv ± Z_vv') = λ − Q` for σ-symmetric (+) and
//! antisymmetric (−) `φ`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{Graph, Involution};
use crate::hamiltonian::Sector;
use crate::math;
use crate::spectral::tagged_spectrum;
use crate::well::DoubleWell;

/// Truncation target used by [`default_truncation`].
pub const DEFAULT_TAIL: f64 = 1e-10;
/// Upper limit on the walk length chosen by [`default_truncation`].
pub const MAX_DEFAULT_LENGTH: usize = 200;

const EXACT_LIMIT: f64 = 9_007_199_254_740_992.0; // 2^53

/// Walk counts `counts[k]` for lengths `0..=max_len`.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkSum {
    pub source: usize,
    pub target: usize,
    pub forbidden_interior: Vec<usize>,
    pub counts: Vec<f64>,
    pub max_degree: usize,
    /// Set when some count exceeds 2^53 and is no longer an exact integer.
    pub precision_warning: bool,
}

impl WalkSum {
    pub fn max_len(&self) -> usize {
        self.counts.len() - 1
    }
}

/// Counts walks by propagating through the adjacency matrix and zeroing the
/// forbidden vertices after every step, so they can only appear as endpoints.
pub fn count_walks_avoiding(
    g: &Graph,
    source: usize,
    target: usize,
    forbidden_interior: &[usize],
    max_len: usize,
) -> Result<WalkSum> {
    let n = g.n();
    if source >= n || target >= n || forbidden_interior.iter().any(|&f| f >= n) {
        return Err(Error::Structure("walk endpoint or forbidden vertex out of range".into()));
    }
    let mut blocked = vec![false; n];
    for &f in forbidden_interior {
        blocked[f] = true;
    }
    let mut counts = Vec::with_capacity(max_len + 1);
    counts.push(if source == target { 1.0 } else { 0.0 });
    let mut current = vec![0.0; n];
    current[source] = 1.0;
    let mut precision_warning = false;
    for _ in 1..=max_len {
        let mut next = vec![0.0; n];
        for (x, &c) in current.iter().enumerate() {
            if c != 0.0 {
                for &y in g.neighbors(x) {
                    next[y] += c;
                }
            }
        }
        counts.push(next[target]);
        if next.iter().any(|&c| c > EXACT_LIMIT) {
            precision_warning = true;
        }
        for (c, &b) in next.iter_mut().zip(&blocked) {
            if b {
                *c = 0.0;
            }
        }
        current = next;
    }
    Ok(WalkSum {
        source,
        target,
        forbidden_interior: forbidden_interior.to_vec(),
        counts,
        max_degree: g.max_degree(),
        precision_warning,
    })
}

/// Truncated `Z` with a bound on the omitted tail.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ZValue {
    pub value: f64,
    pub tail_bound: f64,
}

fn tail_bound(m: usize, lambda: f64, max_len: usize) -> f64 {
    let r = m as f64 / lambda.abs();
    math::powi(r, (max_len + 1) as i32) / (1.0 - r)
}

fn check_convergent(m: usize, lambda: f64) -> Result<()> {
    if !(lambda.abs() > m as f64) {
        return Err(Error::Divergence(alloc::format!(
            "|lambda| = {} must exceed the maximum degree {m}",
            lambda.abs()
        )));
    }
    Ok(())
}

/// `Σ_{k=1..L} counts[k] λ^{-k}`.
pub fn z_truncated(walks: &WalkSum, lambda: f64) -> Result<ZValue> {
    check_convergent(walks.max_degree, lambda)?;
    let inv = 1.0 / lambda;
    let mut power = 1.0;
    let mut value = 0.0;
    for &c in &walks.counts[1..] {
        power *= inv;
        value += c * power;
    }
    Ok(ZValue { value, tail_bound: tail_bound(walks.max_degree, lambda, walks.max_len()) })
}

/// Smallest `L` with `(m/λ)^{L+1} / (1 − m/λ)` below [`DEFAULT_TAIL`], capped at
/// [`MAX_DEFAULT_LENGTH`].
pub fn default_truncation(m: usize, lambda: f64) -> Result<usize> {
    check_convergent(m, lambda)?;
    let r = m as f64 / lambda.abs();
    if r == 0.0 {
        return Ok(1);
    }
    // (L + 1) ln r < ln(tail (1 − r))
    let needed = math::ln(DEFAULT_TAIL * (1.0 - r)) / math::ln(r) - 1.0;
    let len = math::ceil(needed).max(1.0) as usize;
    Ok(len.min(MAX_DEFAULT_LENGTH))
}

/// Residuals of `λ (Z_vv ± Z_vv') = λ − Q`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct WellResidual {
    pub lambda: f64,
    pub z_self: f64,
    pub z_cross: f64,
    pub symmetric: f64,
    pub antisymmetric: f64,
    /// Bound on `λ` times the omitted tail of either series.
    pub truncation: f64,
}

pub fn well_system_residual(
    g: &Graph,
    inv: &Involution,
    well: usize,
    lambda: f64,
    q: f64,
    max_len: usize,
) -> Result<WellResidual> {
    let dw = DoubleWell::new(g, inv, well, q)?;
    well_residual_for(&dw, lambda, max_len)
}

pub(crate) fn well_residual_for(dw: &DoubleWell, lambda: f64, max_len: usize) -> Result<WellResidual> {
    let (v, vp) = (dw.well(), dw.partner());
    check_convergent(dw.max_degree, lambda)?;
    let self_walks = count_walks_avoiding(&dw.graph, v, v, &[v, vp], max_len)?;
    let cross_walks = count_walks_avoiding(&dw.graph, v, vp, &[v, vp], max_len)?;
    let zs = z_truncated(&self_walks, lambda)?;
    let zc = z_truncated(&cross_walks, lambda)?;
    let rhs = lambda - dw.q;
    Ok(WellResidual {
        lambda,
        z_self: zs.value,
        z_cross: zc.value,
        symmetric: (lambda * (zs.value + zc.value) - rhs).abs(),
        antisymmetric: (lambda * (zs.value - zc.value) - rhs).abs(),
        truncation: lambda.abs() * zs.tail_bound.max(zc.tail_bound),
    })
}

/// Walk-series terms scaled by `λ^{-k}` and accumulated until the tail is
/// negligible relative to the partial sums.
struct ScaledSeries {
    /// `λ Z_vv'(λ) = Σ c'_k λ^{1-k}`
    cross: f64,
    /// `1 + Σ (k − 1) c_k λ^{-k}`, the derivative of `λ − Q − λ Z_vv(λ)`.
    slope: f64,
    converged: bool,
}

const SERIES_CAP: usize = 20_000;

fn scaled_series(dw: &DoubleWell, lambda: f64) -> Option<ScaledSeries> {
    let m = dw.max_degree as f64;
    let r = m / lambda;
    if !(lambda > 0.0) || r >= 1.0 {
        return None;
    }
    let (v, vp) = (dw.well(), dw.partner());
    let g = &dw.graph;
    let n = g.n();
    let mut current = vec![0.0; n];
    current[v] = 1.0;
    let mut cross = 0.0;
    let mut slope = 1.0;
    // every scaled entry after k steps is at most r^k
    let mut envelope = 1.0;
    for k in 1..=SERIES_CAP {
        let mut next = vec![0.0; n];
        for (x, &c) in current.iter().enumerate() {
            if c != 0.0 {
                for &y in g.neighbors(x) {
                    next[y] += c;
                }
            }
        }
        next.iter_mut().for_each(|c| *c /= lambda);
        envelope *= r;
        cross += lambda * next[vp];
        slope += (k as f64 - 1.0) * next[v];
        next[v] = 0.0;
        next[vp] = 0.0;
        current = next;
        // tails: Σ_{j>k} λ r^j and Σ_{j>k} j r^j
        let kf = k as f64;
        let cross_tail = lambda * envelope * r / (1.0 - r);
        let slope_tail = envelope * r * (kf + 1.0) / ((1.0 - r) * (1.0 - r));
        let quiet = current.iter().all(|&c| c == 0.0);
        if quiet || (cross > 0.0 && cross_tail <= 1e-16 * cross && slope_tail <= 1e-16) {
            return Some(ScaledSeries { cross, slope, converged: true });
        }
    }
    Some(ScaledSeries { cross, slope, converged: false })
}

/// Largest `(λ₁ − λ₂)/λ₁` for which [`refined_gap`] is used.
pub const REFINE_RATIO: f64 = 1e-3;

/// `λ₁ − λ₂` from the walk series, accurate in relative terms even when the
/// gap is far below the resolution of the eigenvalues themselves.
///
/// Subtracting the two well equations gives
/// `h(λ₁) − h(λ₂) = w(λ₁) + w(λ₂)` with `h(λ) = λ − Q − λ Z_vv(λ)` and
/// `w(λ) = λ Z_vv'(λ)`. The left side is the gap times the mean of `h'`,
/// taken by Simpson's rule; all terms of `w` and `h'` are positive, so the
/// quotient keeps full relative precision.
/// Returns `None` when the eigenvalues are well separated (the direct
/// difference is then accurate), either lies at or below `m`, or a series
/// fails to converge.
pub fn refined_gap(dw: &DoubleWell, lambda1: f64, lambda2: f64) -> Option<f64> {
    if !(lambda1 - lambda2 <= REFINE_RATIO * lambda1.abs()) {
        return None;
    }
    let a = scaled_series(dw, lambda1)?;
    let b = scaled_series(dw, lambda2)?;
    let mid = scaled_series(dw, 0.5 * (lambda1 + lambda2))?;
    if !(a.converged && b.converged && mid.converged) {
        return None;
    }
    Some((a.cross + b.cross) / ((a.slope + 4.0 * mid.slope + b.slope) / 6.0))
}

/// Numbers behind the gap lower bound `λ₁ − λ₂ > 2/(Q + m)^{d−1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct GapCertificate {
    pub lambda1: f64,
    pub lambda2: f64,
    pub d: usize,
    pub m: usize,
    /// `λ₁ − λ₂`, from the walk series when available.
    pub gap: f64,
    /// Right-hand side of the walk-sum identity for `λ₁ − λ₂`, truncated at `L`.
    pub walk_identity: f64,
    pub identity_residual: f64,
    /// `λ₁^{1−d} + λ₂^{1−d}`
    pub intermediate: f64,
    /// Whether `gap ≥ intermediate − tolerance`. Reported, not required.
    pub intermediate_holds: bool,
    /// `2/(Q + m)^{d−1}`
    pub final_bound: f64,
    pub final_holds: bool,
}

/// Tolerance for the adjacent-well (d = 1) equality case.
pub const GAP_TOLERANCE: f64 = 1e-9;

pub fn gap_certificate_check(g: &Graph, inv: &Involution, well: usize, q: f64, max_len: usize) -> Result<GapCertificate> {
    let dw = DoubleWell::new(g, inv, well, q)?;
    let spec = tagged_spectrum(&dw.reduce()?)?;
    let i1 = spec.top_of(Sector::Plus).expect("plus block is never empty");
    let i2 = spec.top_of(Sector::Minus).expect("minus block is never empty");
    let (l1, l2) = (spec.value(i1), spec.value(i2));
    let m = dw.max_degree;
    if !(l1 > m as f64 && l2 > m as f64) {
        return Err(Error::Precondition(alloc::format!(
            "gap certificate needs both top eigenvalues above m = {m} (got {l1}, {l2})"
        )));
    }
    let d = dw.well_distance();
    let gap = refined_gap(&dw, l1, l2).unwrap_or(l1 - l2);

    let (v, vp) = (dw.well(), dw.partner());
    let self_walks = count_walks_avoiding(&dw.graph, v, v, &[v, vp], max_len)?;
    let cross_walks = count_walks_avoiding(&dw.graph, v, vp, &[v, vp], max_len)?;
    let mut walk_identity = 0.0;
    for k in 1..=max_len {
        let e = 1 - k as i32;
        let (p1, p2) = (math::powi(l1, e), math::powi(l2, e));
        walk_identity += self_walks.counts[k] * (p1 - p2) + cross_walks.counts[k] * (p1 + p2);
    }
    let exponent = 1 - d as i32;
    let intermediate = math::powi(l1, exponent) + math::powi(l2, exponent);
    let final_bound = 2.0 / math::powi(q + m as f64, d as i32 - 1);
    let final_holds = if d >= 2 { gap > final_bound } else { gap >= final_bound - GAP_TOLERANCE };
    Ok(GapCertificate {
        lambda1: l1,
        lambda2: l2,
        d,
        m,
        gap,
        walk_identity,
        identity_residual: (walk_identity - (l1 - l2)).abs(),
        intermediate,
        intermediate_holds: gap >= intermediate - GAP_TOLERANCE,
        final_bound,
        final_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize) -> (Graph, Involution) {
        (Graph::path(n).unwrap(), Involution::reversal(n))
    }

    #[test]
    fn p2_cross_walks() {
        let (g, _) = p(2);
        let w = count_walks_avoiding(&g, 0, 1, &[0, 1], 3).unwrap();
        assert_eq!(w.counts, vec![0.0, 1.0, 0.0, 0.0]);
        let w = count_walks_avoiding(&g, 0, 0, &[0, 1], 3).unwrap();
        assert_eq!(w.counts, vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn p3_walks() {
        let (g, _) = p(3);
        let w = count_walks_avoiding(&g, 0, 0, &[0, 2], 4).unwrap();
        assert_eq!(w.counts, vec![1.0, 0.0, 1.0, 0.0, 0.0]);
        let w = count_walks_avoiding(&g, 0, 2, &[0, 2], 2).unwrap();
        assert_eq!(w.counts, vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn z_examples() {
        let (g, _) = p(2);
        let q = 4.0;
        let cross = count_walks_avoiding(&g, 0, 1, &[0, 1], 1).unwrap();
        assert_eq!(z_truncated(&cross, q + 1.0).unwrap().value, 1.0 / 5.0);
        let closed = count_walks_avoiding(&g, 0, 0, &[0, 1], 5).unwrap();
        assert_eq!(z_truncated(&closed, q + 1.0).unwrap().value, 0.0);

        let (g, _) = p(3);
        let l1 = (4.0 + libm::sqrt(24.0)) / 2.0;
        let closed = count_walks_avoiding(&g, 0, 0, &[0, 2], 20).unwrap();
        let z = z_truncated(&closed, l1).unwrap();
        assert!((z.value - 1.0 / (l1 * l1)).abs() < 1e-15);
    }

    #[test]
    fn z_diverges_at_small_lambda() {
        let (g, _) = p(3);
        let w = count_walks_avoiding(&g, 0, 0, &[0, 2], 4).unwrap();
        assert!(matches!(z_truncated(&w, 2.0), Err(Error::Divergence(_))));
        assert!(matches!(z_truncated(&w, -1.5), Err(Error::Divergence(_))));
    }

    #[test]
    fn default_truncation_meets_target() {
        let len = default_truncation(2, 10.0).unwrap();
        assert!(tail_bound(2, 10.0, len) < DEFAULT_TAIL);
        assert!(tail_bound(2, 10.0, len - 1) >= DEFAULT_TAIL);
        assert_eq!(default_truncation(6, 6.01).unwrap(), MAX_DEFAULT_LENGTH);
    }

    #[test]
    fn p2_well_identities_are_exact() {
        let (g, inv) = p(2);
        let r = well_system_residual(&g, &inv, 0, 5.0, 4.0, 1).unwrap();
        assert_eq!(r.symmetric, 0.0);
        let r = well_system_residual(&g, &inv, 0, 3.0, 4.0, 1).unwrap();
        assert_eq!(r.antisymmetric, 0.0);
    }

    #[test]
    fn p3_symmetric_identity() {
        let (g, inv) = p(3);
        let l1 = (4.0 + libm::sqrt(24.0)) / 2.0;
        let r = well_system_residual(&g, &inv, 0, l1, 4.0, 40).unwrap();
        assert!(r.symmetric < 1e-6);
    }

    #[test]
    fn p3_gap_certificate() {
        let (g, inv) = p(3);
        let c = gap_certificate_check(&g, &inv, 0, 4.0, 60).unwrap();
        let l1 = (4.0 + libm::sqrt(24.0)) / 2.0;
        assert!((c.gap - (l1 - 4.0)).abs() < 1e-12, "{} {}", c.gap, l1 - 4.0);
        assert!((c.intermediate - (1.0 / l1 + 0.25)).abs() < 1e-14);
        // the gap sits below 1/λ₁ + 1/λ₂ here; only the final bound is certified
        assert!(!c.intermediate_holds);
        assert!((c.final_bound - 1.0 / 3.0).abs() < 1e-15);
        assert!(c.final_holds);
        assert!(c.identity_residual < 1e-10);
    }

    #[test]
    fn p2_gap_certificate_is_an_equality() {
        let (g, inv) = p(2);
        let c = gap_certificate_check(&g, &inv, 0, 4.0, 10).unwrap();
        assert!((c.gap - 2.0).abs() < 1e-12);
        assert_eq!(c.intermediate, 2.0);
        assert_eq!(c.final_bound, 2.0);
        assert!(c.final_holds);
    }

    #[test]
    fn p4_gap_certificate() {
        let (g, inv) = p(4);
        let c = gap_certificate_check(&g, &inv, 0, 10.0, 80).unwrap();
        assert!((c.final_bound - 2.0 / 144.0).abs() < 1e-15);
        assert!(c.final_holds && c.gap > c.final_bound);
    }

    #[test]
    fn refined_gap_matches_eigenvalues_when_resolvable() {
        let (g, inv) = p(5);
        let dw = DoubleWell::new(&g, &inv, 0, 20.0).unwrap();
        let spec = tagged_spectrum(&dw.reduce().unwrap()).unwrap();
        let (l1, l2) = (spec.value(0), spec.value(1));
        let refined = refined_gap(&dw, l1, l2).unwrap();
        assert!(((l1 - l2) - refined).abs() < 1e-9 * refined.max(1e-3), "{refined} vs {}", l1 - l2);
    }
}
