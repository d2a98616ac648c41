//! `H = A + diag(Q)` and its reduction under an involution.
//!
//! With the vertices ordered as `N, σN, S` the Hamiltonian has the block form
//!
//! ```text
//!     [ H'   Aσ   A_S ]
//! H = [ Aσ   H'   A_S ]
//!     [ A_Sᵀ A_Sᵀ H_S ]
//! ```
//!
//! and its spectrum splits into the spectra of
//! `H⁺ = [[H' + Aσ, A_S], [2 A_Sᵀ, H_S]]` (σ-symmetric eigenvectors `[a, a, b]`)
//! and `H⁻ = H' − Aσ` (antisymmetric eigenvectors `[c, −c, 0]`).
//! `H⁺` is used through its symmetric conjugate
//! `[[H' + Aσ, √2 A_S], [√2 A_Sᵀ, H_S]]`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexPartition};
use crate::matrix::{self, Matrix};

/// Relative residual accepted when lifting a reduced eigenvector.
pub const LIFT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    matrix: Matrix,
}

impl Hamiltonian {
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.matrix.rows()
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }
}

pub fn assemble_hamiltonian(g: &Graph) -> Hamiltonian {
    let n = g.n();
    let mut m = Matrix::zeros(n, n);
    for v in 0..n {
        m[(v, v)] = g.potential(v);
    }
    for &(a, b) in g.edges() {
        m[(a, b)] = 1.0;
        m[(b, a)] = 1.0;
    }
    Hamiltonian { matrix: m }
}

/// Which reduced block an eigenpair comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Sector {
    /// Eigenvalues of `H⁺`; eigenvectors symmetric under σ.
    Plus,
    /// Eigenvalues of `H⁻`; eigenvectors antisymmetric under σ and zero on S.
    Minus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockReduction {
    pub plus_asym: Matrix,
    pub plus_sym: Matrix,
    pub minus: Matrix,
    pub partition: VertexPartition,
    hamiltonian: Hamiltonian,
}

impl BlockReduction {
    pub fn hamiltonian(&self) -> &Hamiltonian {
        &self.hamiltonian
    }

    pub fn block(&self, sector: Sector) -> &Matrix {
        match sector {
            Sector::Plus => &self.plus_sym,
            Sector::Minus => &self.minus,
        }
    }
}

pub fn block_reduce(h: &Hamiltonian, part: &VertexPartition) -> Result<BlockReduction> {
    if part.n() != h.n() {
        return Err(Error::Structure(format!(
            "partition covers {} vertices, Hamiltonian has {}",
            part.n(),
            h.n()
        )));
    }
    let (k, s) = (part.k(), part.s());
    let m = h.matrix();
    let inner = m.select(&part.primary, &part.primary);
    let cross = m.select(&part.primary, &part.mirror);
    let to_fixed = m.select(&part.primary, &part.fixed);
    let fixed = m.select(&part.fixed, &part.fixed);

    let mut plus_asym = Matrix::zeros(k + s, k + s);
    let mut plus_sym = Matrix::zeros(k + s, k + s);
    let mut minus = Matrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            plus_asym[(i, j)] = inner[(i, j)] + cross[(i, j)];
            plus_sym[(i, j)] = plus_asym[(i, j)];
            minus[(i, j)] = inner[(i, j)] - cross[(i, j)];
        }
        for j in 0..s {
            plus_asym[(i, k + j)] = to_fixed[(i, j)];
            plus_asym[(k + j, i)] = 2.0 * to_fixed[(i, j)];
            plus_sym[(i, k + j)] = SQRT_2 * to_fixed[(i, j)];
            plus_sym[(k + j, i)] = SQRT_2 * to_fixed[(i, j)];
        }
    }
    for i in 0..s {
        for j in 0..s {
            plus_asym[(k + i, k + j)] = fixed[(i, j)];
            plus_sym[(k + i, k + j)] = fixed[(i, j)];
        }
    }
    Ok(BlockReduction { plus_asym, plus_sym, minus, partition: part.clone(), hamiltonian: h.clone() })
}

/// Converts an eigenvector of the asymmetric `H⁺` into one of the symmetric form.
pub fn plus_asym_to_sym(part: &VertexPartition, a: &[f64]) -> Vec<f64> {
    let k = part.k();
    a.iter().enumerate().map(|(i, &x)| if i < k { x } else { x / SQRT_2 }).collect()
}

/// Inverse of [`plus_asym_to_sym`].
pub fn plus_sym_to_asym(part: &VertexPartition, w: &[f64]) -> Vec<f64> {
    let k = part.k();
    w.iter().enumerate().map(|(i, &x)| if i < k { x } else { x * SQRT_2 }).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiftedPair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub sector: Sector,
}

/// Lifts an eigenvector of `H⁺` (symmetric form) or `H⁻` to a unit eigenvector of `H`.
///
/// The eigenvalue is taken as the Rayleigh quotient of the reduced vector.
/// Both the reduced and the lifted residuals must be within
/// [`LIFT_TOLERANCE`] times `max(1, ‖·‖∞)` of the respective matrix.
pub fn lift_eigenpair(red: &BlockReduction, sector: Sector, reduced: &[f64]) -> Result<LiftedPair> {
    let block = red.block(sector);
    if reduced.len() != block.rows() {
        return Err(Error::Structure(format!(
            "reduced vector has length {}, block has size {}",
            reduced.len(),
            block.rows()
        )));
    }
    let norm = matrix::norm(reduced);
    if norm == 0.0 {
        return Err(Error::Domain("reduced eigenvector is zero".into()));
    }
    let x: Vec<f64> = reduced.iter().map(|v| v / norm).collect();
    let mx = block.mul_vec(&x);
    let value = matrix::dot(&x, &mx);
    let residual = residual_norm(&mx, &x, value);
    if residual > LIFT_TOLERANCE * block.norm_inf().max(1.0) {
        return Err(Error::Numeric { what: "reduced eigenpair", residual });
    }

    let part = &red.partition;
    let k = part.k();
    let mut full = vec![0.0; part.n()];
    match sector {
        Sector::Plus => {
            for (j, &v) in part.primary.iter().enumerate() {
                full[v] = x[j];
                full[part.mirror[j]] = x[j];
            }
            for (j, &v) in part.fixed.iter().enumerate() {
                full[v] = SQRT_2 * x[k + j];
            }
        }
        Sector::Minus => {
            for (j, &v) in part.primary.iter().enumerate() {
                full[v] = x[j];
                full[part.mirror[j]] = -x[j];
            }
        }
    }
    let scale = 1.0 / matrix::norm(&full);
    full.iter_mut().for_each(|v| *v *= scale);

    let h = red.hamiltonian.matrix();
    let hx = h.mul_vec(&full);
    let residual = residual_norm(&hx, &full, value);
    if residual > LIFT_TOLERANCE * h.norm_inf().max(1.0) {
        return Err(Error::Numeric { what: "lifted eigenpair", residual });
    }
    Ok(LiftedPair { value, vector: full, sector })
}

fn residual_norm(mx: &[f64], x: &[f64], value: f64) -> f64 {
    let r: Vec<f64> = mx.iter().zip(x).map(|(a, b)| a - value * b).collect();
    matrix::norm(&r)
}

/// A Gershgorin disc, reduced to a real interval for symmetric matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Disc {
    pub center: f64,
    pub radius: f64,
}

impl Disc {
    pub fn contains(&self, x: f64, tol: f64) -> bool {
        (x - self.center).abs() <= self.radius + tol
    }
}

/// One disc per vertex: centre at the potential, radius the vertex degree.
pub fn gershgorin_intervals(h: &Hamiltonian) -> Vec<Disc> {
    let m = h.matrix();
    (0..m.rows())
        .map(|i| Disc {
            center: m[(i, i)],
            radius: m.row(i).iter().enumerate().filter(|&(j, _)| j != i).map(|(_, x)| x.abs()).sum(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{partition_vertices, Involution};

    fn p3(q: f64) -> (Graph, Involution) {
        (Graph::new(3, [(0, 1), (1, 2)], vec![q, 0.0, q]).unwrap(), Involution::reversal(3))
    }

    fn reduce(g: &Graph, inv: &Involution, well: usize) -> BlockReduction {
        let part = partition_vertices(g, inv, well).unwrap();
        block_reduce(&assemble_hamiltonian(g), &part).unwrap()
    }

    #[test]
    fn assemble_examples() {
        let p2 = Graph::new(2, [(0, 1)], vec![4.0, 4.0]).unwrap();
        assert_eq!(assemble_hamiltonian(&p2).matrix().to_rows(), vec![vec![4.0, 1.0], vec![1.0, 4.0]]);
        let (g, _) = p3(4.0);
        assert_eq!(
            assemble_hamiltonian(&g).matrix().to_rows(),
            vec![vec![4.0, 1.0, 0.0], vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 4.0]]
        );
        let c4 = Graph::cycle(4).unwrap();
        let h = assemble_hamiltonian(&c4);
        assert_eq!(h.matrix().diagonal(), vec![0.0; 4]);
        assert_eq!(h.matrix()[(0, 3)], 1.0);
        assert_eq!(h.matrix()[(0, 2)], 0.0);
    }

    #[test]
    fn p3_blocks() {
        let (g, inv) = p3(4.0);
        let red = reduce(&g, &inv, 0);
        assert_eq!(red.plus_asym.to_rows(), vec![vec![4.0, 1.0], vec![2.0, 0.0]]);
        assert_eq!(red.plus_sym.to_rows(), vec![vec![4.0, SQRT_2], vec![SQRT_2, 0.0]]);
        assert_eq!(red.minus.to_rows(), vec![vec![4.0]]);
    }

    #[test]
    fn p2_blocks_are_scalars() {
        let g = Graph::new(2, [(0, 1)], vec![4.0, 4.0]).unwrap();
        let red = reduce(&g, &Involution::reversal(2), 0);
        assert_eq!(red.plus_asym.to_rows(), vec![vec![5.0]]);
        assert_eq!(red.minus.to_rows(), vec![vec![3.0]]);
    }

    #[test]
    fn c4_blocks_from_cross_edges() {
        // wells 0 and 2; N = {0, 1}, σN = {2, 3}; 0~1, 0~3, 1~2 so Aσ = [[0,1],[1,0]]
        let g = Graph::cycle(4).unwrap().with_double_well(0, 2, 4.0).unwrap();
        let red = reduce(&g, &Involution::half_turn(4), 0);
        assert_eq!(red.plus_asym.to_rows(), vec![vec![4.0, 2.0], vec![2.0, 0.0]]);
        assert_eq!(red.minus.to_rows(), vec![vec![4.0, 0.0], vec![0.0, 0.0]]);
    }

    #[test]
    fn symmetric_form_is_a_conjugate_of_the_asymmetric_one() {
        let (g, inv) = p3(4.0);
        let red = reduce(&g, &inv, 0);
        // D⁻¹ H⁺ D with D = diag(1, √2)
        let d = Matrix::from_diagonal(&[1.0, SQRT_2]);
        let d_inv = Matrix::from_diagonal(&[1.0, 1.0 / SQRT_2]);
        let conj = d_inv.matmul(&red.plus_asym).matmul(&d);
        assert!(conj.max_abs_diff(&red.plus_sym) < 1e-15);
    }

    #[test]
    fn minus_lift_of_p2() {
        let g = Graph::new(2, [(0, 1)], vec![4.0, 4.0]).unwrap();
        let red = reduce(&g, &Involution::reversal(2), 0);
        let lifted = lift_eigenpair(&red, Sector::Minus, &[1.0]).unwrap();
        let h = 1.0 / SQRT_2;
        assert!((lifted.vector[0] - h).abs() < 1e-15 && (lifted.vector[1] + h).abs() < 1e-15);
        assert_eq!(lifted.value, 3.0);
    }

    #[test]
    fn minus_lift_of_p3_vanishes_on_the_midpoint() {
        let (g, inv) = p3(4.0);
        let red = reduce(&g, &inv, 0);
        let lifted = lift_eigenpair(&red, Sector::Minus, &[1.0]).unwrap();
        let h = 1.0 / SQRT_2;
        assert_eq!(lifted.vector[1], 0.0);
        assert!((lifted.vector[0] - h).abs() < 1e-15 && (lifted.vector[2] + h).abs() < 1e-15);
    }

    #[test]
    fn plus_lift_of_p3_from_the_asymmetric_block() {
        let (g, inv) = p3(4.0);
        let red = reduce(&g, &inv, 0);
        let l1 = (4.0 + libm::sqrt(24.0)) / 2.0;
        // H⁺ [a, b] = λ [a, b] with b = (λ − 4) a
        let a = [1.0, l1 - 4.0];
        let w = plus_asym_to_sym(&red.partition, &a);
        let lifted = lift_eigenpair(&red, Sector::Plus, &w).unwrap();
        assert!((lifted.value - l1).abs() < 1e-12);
        let x = &lifted.vector;
        assert!((x[0] - x[2]).abs() < 1e-15);
        assert!((x[1] / x[0] - (l1 - 4.0)).abs() < 1e-12);
        assert!((matrix::norm(x) - 1.0).abs() < 1e-15);
        let back = plus_sym_to_asym(&red.partition, &w);
        assert!(back.iter().zip(&a).all(|(x, y)| (x - y).abs() < 1e-15));
    }

    #[test]
    fn lift_rejects_non_eigenvectors() {
        let (g, inv) = p3(4.0);
        let red = reduce(&g, &inv, 0);
        let err = lift_eigenpair(&red, Sector::Plus, &[1.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::Numeric { .. }));
    }

    #[test]
    fn gershgorin_examples() {
        let p2 = Graph::new(2, [(0, 1)], vec![4.0, 4.0]).unwrap();
        let d = gershgorin_intervals(&assemble_hamiltonian(&p2));
        assert_eq!(d, vec![Disc { center: 4.0, radius: 1.0 }; 2]);
        let (g, _) = p3(4.0);
        let d = gershgorin_intervals(&assemble_hamiltonian(&g));
        let pairs: Vec<(f64, f64)> = d.iter().map(|d| (d.center, d.radius)).collect();
        assert_eq!(pairs, vec![(4.0, 1.0), (0.0, 2.0), (4.0, 1.0)]);
        let star = Graph::star(3).unwrap();
        let pairs: Vec<(f64, f64)> =
            gershgorin_intervals(&assemble_hamiltonian(&star)).iter().map(|d| (d.center, d.radius)).collect();
        assert_eq!(pairs, vec![(0.0, 3.0), (0.0, 1.0), (0.0, 1.0), (0.0, 1.0)]);
    }
}
