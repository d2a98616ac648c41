//! Slow, independent reference implementations used to cross-check the main
//! routines. Nothing here calls the eigensolver or the walk propagator.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{Graph, Involution};
use crate::hamiltonian::Hamiltonian;
use crate::math;
use crate::matrix::Matrix;

pub const MAX_INVOLUTION_VERTICES: usize = 12;
pub const MAX_DFS_VERTICES: usize = 8;
pub const MAX_DFS_LENGTH: usize = 10;

/// Dense complex matrix as separate real and imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl ComplexMatrix {
    fn identity(n: usize) -> Self {
        let mut re = vec![vec![0.0; n]; n];
        for (i, row) in re.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        ComplexMatrix { re, im: vec![vec![0.0; n]; n] }
    }

    pub fn n(&self) -> usize {
        self.re.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> (f64, f64) {
        (self.re[i][j], self.im[i][j])
    }

    fn square(&self) -> Self {
        let (rr, ii) = (product(&self.re, &self.re), product(&self.im, &self.im));
        let (ri, ir) = (product(&self.re, &self.im), product(&self.im, &self.re));
        ComplexMatrix { re: combine(&rr, &ii, -1.0), im: combine(&ri, &ir, 1.0) }
    }
}

fn product(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik != 0.0 {
                for j in 0..n {
                    out[i][j] += aik * b[k][j];
                }
            }
        }
    }
    out
}

fn combine(a: &[Vec<f64>], b: &[Vec<f64>], sign: f64) -> Vec<Vec<f64>> {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p + sign * q).collect()).collect()
}

fn max_abs(a: &[Vec<f64>]) -> f64 {
    a.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn dense(h: &Matrix) -> Vec<Vec<f64>> {
    (0..h.rows()).map(|i| h.row(i).to_vec()).collect()
}

/// `e^{itH}` by a Taylor series on `itH/2^s` with `‖tH‖₁/2^s ≤ ½`, squared `s` times.
pub fn matexp_i(h: &Matrix, t: f64) -> ComplexMatrix {
    let n = h.rows();
    let x = dense(h);
    let norm1 = (0..n).map(|j| (0..n).map(|i| x[i][j].abs()).sum::<f64>()).fold(0.0, f64::max) * t.abs();
    let mut s = 0u32;
    while norm1 / (1u64 << s.min(62)) as f64 > 0.5 && s < 1000 {
        s += 1;
    }
    let scale = t / math::powi(2.0, s as i32);
    let x: Vec<Vec<f64>> = x.iter().map(|row| row.iter().map(|v| v * scale).collect()).collect();

    // term_{k+1} = term_k · iX/(k+1), i.e. (a + ib)·iX = −bX + i aX
    let mut sum = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..100 {
        let re = product(&term.im, &x).into_iter().map(|r| r.into_iter().map(|v| -v / k as f64).collect()).collect();
        let im = product(&term.re, &x).into_iter().map(|r| r.into_iter().map(|v| v / k as f64).collect()).collect();
        term = ComplexMatrix { re, im };
        sum.re = combine(&sum.re, &term.re, 1.0);
        sum.im = combine(&sum.im, &term.im, 1.0);
        if max_abs(&term.re).max(max_abs(&term.im)) < 1e-17 {
            break;
        }
    }
    for _ in 0..s {
        sum = sum.square();
    }
    sum
}

/// `|⟨v|e^{itH}|u⟩|²` from the matrix exponential.
pub fn matexp_probability(h: &Hamiltonian, u: usize, v: usize, t: f64) -> Result<f64> {
    let n = h.n();
    if u >= n || v >= n {
        return Err(Error::Structure(alloc::format!("vertex out of range for n = {n}")));
    }
    let e = matexp_i(h.matrix(), t);
    let (re, im) = e.entry(v, u);
    Ok(re * re + im * im)
}

/// Grid maximum of `p(t)` found by repeatedly applying `e^{i·step·H}`.
pub fn exhaustive_fidelity(h: &Hamiltonian, u: usize, v: usize, horizon: f64, step: f64) -> Result<(f64, f64)> {
    let n = h.n();
    if u >= n || v >= n {
        return Err(Error::Structure(alloc::format!("vertex out of range for n = {n}")));
    }
    if !(horizon > 0.0 && step > 0.0 && step <= horizon) || !horizon.is_finite() {
        return Err(Error::Domain(alloc::format!("invalid grid: horizon {horizon}, step {step}")));
    }
    let points = (horizon / step * (1.0 + 1e-12)) as usize + 1;
    let u_step = matexp_i(h.matrix(), step);
    let mut re = vec![0.0; n];
    let mut im = vec![0.0; n];
    re[u] = 1.0;
    let mut best = (0.0, re[v] * re[v]);
    for i in 1..points {
        let mut nre = vec![0.0; n];
        let mut nim = vec![0.0; n];
        for r in 0..n {
            for c in 0..n {
                let (a, b) = u_step.entry(r, c);
                nre[r] += a * re[c] - b * im[c];
                nim[r] += a * im[c] + b * re[c];
            }
        }
        re = nre;
        im = nim;
        let p = re[v] * re[v] + im[v] * im[v];
        if p > best.1 {
            best = (i as f64 * step, p);
        }
    }
    Ok(best)
}

/// Eigenvalues in descending order from Householder tridiagonalization and
/// Sturm-sequence bisection.
pub fn eigenvalues_bisection(m: &Matrix) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::Structure("matrix must be square".into()));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut a = dense(m);
    for k in 0..n.saturating_sub(2) {
        let alpha_sq: f64 = (k + 1..n).map(|i| a[i][k] * a[i][k]).sum();
        if alpha_sq == 0.0 {
            continue;
        }
        let alpha = if a[k + 1][k] > 0.0 { -math::sqrt(alpha_sq) } else { math::sqrt(alpha_sq) };
        let mut v = vec![0.0; n];
        for i in k + 1..n {
            v[i] = a[i][k];
        }
        v[k + 1] -= alpha;
        let vn = math::sqrt(v.iter().map(|x| x * x).sum());
        if vn == 0.0 {
            continue;
        }
        for x in v.iter_mut() {
            *x /= vn;
        }
        // P A P = A − 2 v wᵀ − 2 w vᵀ with p = A v, w = p − (vᵀp) v
        let p: Vec<f64> = (0..n).map(|i| (0..n).map(|j| a[i][j] * v[j]).sum()).collect();
        let kv: f64 = v.iter().zip(&p).map(|(x, y)| x * y).sum();
        let w: Vec<f64> = p.iter().zip(&v).map(|(pi, vi)| pi - kv * vi).collect();
        for i in 0..n {
            for j in 0..n {
                a[i][j] -= 2.0 * (v[i] * w[j] + w[i] * v[j]);
            }
        }
    }
    let d: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    let e: Vec<f64> = (0..n - 1).map(|i| a[i + 1][i]).collect();

    let radius = |i: usize| {
        let mut r = 0.0;
        if i > 0 {
            r += e[i - 1].abs();
        }
        if i + 1 < n {
            r += e[i].abs();
        }
        r
    };
    let lo0 = (0..n).map(|i| d[i] - radius(i)).fold(f64::INFINITY, f64::min);
    let hi0 = (0..n).map(|i| d[i] + radius(i)).fold(f64::NEG_INFINITY, f64::max);
    let scale = lo0.abs().max(hi0.abs()).max(1e-300);

    // number of eigenvalues strictly below x
    let below = |x: f64| {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..n {
            let off = if i == 0 { 0.0 } else { e[i - 1] * e[i - 1] / q };
            q = d[i] - x - off;
            if q == 0.0 {
                q = -1e-300;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    };

    let mut values = Vec::with_capacity(n);
    for k in 0..n {
        // k-th smallest eigenvalue
        let (mut lo, mut hi) = (lo0 - 1e-12 * scale, hi0 + 1e-12 * scale);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        values.push(0.5 * (lo + hi));
    }
    values.reverse();
    Ok(values)
}

/// An involution found by exhaustive search.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct FoundInvolution {
    pub map: Vec<usize>,
    pub is_identity: bool,
}

impl FoundInvolution {
    pub fn involution(&self) -> Involution {
        Involution::new(self.map.clone())
    }
}

/// Every self-inverse automorphism of `g` that preserves the potentials.
pub fn enumerate_involutions(g: &Graph) -> Result<Vec<FoundInvolution>> {
    let n = g.n();
    if n > MAX_INVOLUTION_VERTICES {
        return Err(Error::TooLarge { what: "involution search", limit: MAX_INVOLUTION_VERTICES, got: n });
    }
    let mut adj = vec![vec![false; n]; n];
    for &(a, b) in g.edges() {
        adj[a][b] = true;
        adj[b][a] = true;
    }
    let degree: Vec<usize> = (0..n).map(|i| adj[i].iter().filter(|&&x| x).count()).collect();
    let mut map = vec![usize::MAX; n];
    let mut found = Vec::new();
    search(0, &mut map, &adj, &degree, g.potentials(), &mut found);
    found.sort();
    Ok(found
        .into_iter()
        .map(|map| {
            let is_identity = map.iter().enumerate().all(|(i, &j)| i == j);
            FoundInvolution { map, is_identity }
        })
        .collect())
}

fn consistent(map: &[usize], adj: &[Vec<bool>], a: usize) -> bool {
    let fa = map[a];
    map.iter().enumerate().all(|(b, &fb)| fb == usize::MAX || adj[a][b] == adj[fa][fb])
}

fn search(
    i: usize,
    map: &mut Vec<usize>,
    adj: &[Vec<bool>],
    degree: &[usize],
    potential: &[f64],
    found: &mut Vec<Vec<usize>>,
) {
    let n = map.len();
    if i == n {
        found.push(map.clone());
        return;
    }
    if map[i] != usize::MAX {
        search(i + 1, map, adj, degree, potential, found);
        return;
    }
    for j in i..n {
        if map[j] != usize::MAX || degree[i] != degree[j] || potential[i] != potential[j] {
            continue;
        }
        map[i] = j;
        map[j] = i;
        if consistent(map, adj, i) && consistent(map, adj, j) {
            search(i + 1, map, adj, degree, potential, found);
        }
        map[i] = usize::MAX;
        map[j] = usize::MAX;
    }
}

/// Walk counts by depth-first enumeration; a walk of length `k` may visit the
/// forbidden vertices only at positions `0` and `k`.
pub fn enumerate_walks_dfs(
    g: &Graph,
    source: usize,
    target: usize,
    forbidden_interior: &[usize],
    max_len: usize,
) -> Result<Vec<u64>> {
    let n = g.n();
    if n > MAX_DFS_VERTICES {
        return Err(Error::TooLarge { what: "walk enumeration vertices", limit: MAX_DFS_VERTICES, got: n });
    }
    if max_len > MAX_DFS_LENGTH {
        return Err(Error::TooLarge { what: "walk enumeration length", limit: MAX_DFS_LENGTH, got: max_len });
    }
    if source >= n || target >= n || forbidden_interior.iter().any(|&f| f >= n) {
        return Err(Error::Structure("walk endpoint or forbidden vertex out of range".into()));
    }
    let mut counts = vec![0u64; max_len + 1];
    let mut path = vec![source];
    dfs(g, target, forbidden_interior, max_len, &mut path, &mut counts);
    Ok(counts)
}

fn dfs(g: &Graph, target: usize, forbidden: &[usize], max_len: usize, path: &mut Vec<usize>, counts: &mut [u64]) {
    let len = path.len() - 1;
    let last = path[len];
    if last == target {
        counts[len] += 1;
    }
    if len == max_len {
        return;
    }
    // the current vertex becomes interior if the walk continues
    if len > 0 && forbidden.contains(&last) {
        return;
    }
    for &next in g.neighbors(last) {
        path.push(next);
        dfs(g, target, forbidden, max_len, path, counts);
        path.pop();
    }
}
