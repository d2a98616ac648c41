//! A graph with an involution and equal potential on one well pair.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{partition_vertices, Graph, Involution, VertexPartition};
use crate::hamiltonian::{assemble_hamiltonian, block_reduce, BlockReduction};

/// Potential `q` on `well` and `σ(well)`, zero elsewhere, with the partition
/// and distances every bound needs.
#[derive(Debug, Clone)]
pub struct DoubleWell {
    pub graph: Graph,
    pub involution: Involution,
    pub partition: VertexPartition,
    pub q: f64,
    /// Hop distance from the well to every vertex.
    pub from_well: Vec<usize>,
    /// Hop distance from the partner well to every vertex.
    pub from_partner: Vec<usize>,
    /// Maximum degree `m`.
    pub max_degree: usize,
}

impl DoubleWell {
    /// The potentials of `g` are replaced; only its edges are used.
    pub fn new(g: &Graph, inv: &Involution, well: usize, q: f64) -> Result<Self> {
        if !q.is_finite() {
            return Err(Error::Domain(format!("potential must be finite, got {q}")));
        }
        if inv.len() != g.n() {
            return Err(Error::Structure(format!(
                "involution has length {} but graph has {} vertices",
                inv.len(),
                g.n()
            )));
        }
        if well >= g.n() {
            return Err(Error::Structure(format!("well {well} out of range")));
        }
        let partner = inv.apply(well);
        if partner >= g.n() {
            return Err(Error::Structure(format!("involution maps {well} out of range")));
        }
        let graph = g.with_double_well(well, partner, q)?;
        let partition = partition_vertices(&graph, inv, well)?;
        let from_well = graph.bfs_distances(well);
        let from_partner = graph.bfs_distances(partner);
        let max_degree = graph.max_degree();
        Ok(DoubleWell { graph, involution: inv.clone(), partition, q, from_well, from_partner, max_degree })
    }

    pub fn well(&self) -> usize {
        self.partition.well()
    }

    pub fn partner(&self) -> usize {
        self.partition.partner()
    }

    /// `d(v, v')`
    pub fn well_distance(&self) -> usize {
        self.from_well[self.partner()]
    }

    /// `min(d(v, x), d(v, x'))`, which equals `min(d(v, x), d(v', x))`.
    pub fn min_distance(&self, x: usize) -> usize {
        self.from_well[x].min(self.from_partner[x])
    }

    /// Whether `x` is as far from the well as from its partner.
    pub fn is_equidistant(&self, x: usize) -> bool {
        self.from_well[x] == self.from_partner[x]
    }

    pub fn reduce(&self) -> Result<BlockReduction> {
        block_reduce(&assemble_hamiltonian(&self.graph), &self.partition)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replaces_potentials() {
        let g = Graph::new(3, [(0, 1), (1, 2)], alloc::vec![1.0, 2.0, 3.0]).unwrap();
        let dw = DoubleWell::new(&g, &Involution::reversal(3), 2, 7.0).unwrap();
        assert_eq!(dw.graph.potentials(), &[7.0, 0.0, 7.0]);
        assert_eq!(dw.well(), 2);
        assert_eq!(dw.partner(), 0);
        assert_eq!(dw.well_distance(), 2);
        assert!(dw.is_equidistant(1));
    }

    #[test]
    fn rejects_fixed_well() {
        let g = Graph::path(3).unwrap();
        assert!(matches!(DoubleWell::new(&g, &Involution::reversal(3), 1, 1.0), Err(Error::Domain(_))));
    }
}
