//! Potentialed simple graphs, involutions and the induced vertex partition.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// A simple connected undirected graph with a real potential on every vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    edges: Vec<(usize, usize)>,
    potential: Vec<f64>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Normalizes each edge to `(min, max)` and validates the result.
    ///
    /// Rejects out-of-range endpoints, self-loops, repeated edges, non-finite
    /// potentials and disconnected graphs.
    pub fn new<I>(n: usize, edges: I, potential: Vec<f64>) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n == 0 {
            return Err(Error::Structure("graph must have at least one vertex".into()));
        }
        if potential.len() != n {
            return Err(Error::Structure(format!(
                "{} potentials given for {n} vertices",
                potential.len()
            )));
        }
        if let Some(v) = potential.iter().position(|q| !q.is_finite()) {
            return Err(Error::Structure(format!("potential of vertex {v} is not finite")));
        }
        let mut list = Vec::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::Structure(format!("edge ({a}, {b}) out of range for n = {n}")));
            }
            if a == b {
                return Err(Error::Structure(format!("self-loop at vertex {a}")));
            }
            list.push((a.min(b), a.max(b)));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Structure(format!("repeated edge {:?}", w[0])));
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in &list {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        let g = Graph { edges: list, potential, adjacency };
        let dist = g.reachability(0);
        if let Some(v) = dist.iter().position(Option::is_none) {
            return Err(Error::Disconnected { unreachable: v });
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.potential.len()
    }

    /// Edges as `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn potentials(&self) -> &[f64] {
        &self.potential
    }

    pub fn potential(&self, v: usize) -> f64 {
        self.potential[v]
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.n() && self.adjacency[a].binary_search(&b).is_ok()
    }

    /// Largest number of edges incident to a single vertex.
    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Hop distances from `source` to every vertex.
    pub fn bfs_distances(&self, source: usize) -> Vec<usize> {
        // connectivity is checked at construction
        self.reachability(source)
            .into_iter()
            .map(|d| d.expect("graph is connected"))
            .collect()
    }

    fn reachability(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(x) = queue.pop_front() {
            let next = dist[x].unwrap() + 1;
            for &y in &self.adjacency[x] {
                if dist[y].is_none() {
                    dist[y] = Some(next);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Same edge set with a new potential vector.
    pub fn with_potentials(&self, potential: Vec<f64>) -> Result<Graph> {
        if potential.len() != self.n() {
            return Err(Error::Structure(format!(
                "{} potentials given for {} vertices",
                potential.len(),
                self.n()
            )));
        }
        if let Some(v) = potential.iter().position(|q| !q.is_finite()) {
            return Err(Error::Structure(format!("potential of vertex {v} is not finite")));
        }
        Ok(Graph { edges: self.edges.clone(), potential, adjacency: self.adjacency.clone() })
    }

    /// Potential `q` on the two wells and zero everywhere else.
    pub fn with_double_well(&self, well: usize, partner: usize, q: f64) -> Result<Graph> {
        if well >= self.n() || partner >= self.n() {
            return Err(Error::Structure(format!("well pair ({well}, {partner}) out of range")));
        }
        let mut potential = vec![0.0; self.n()];
        potential[well] = q;
        potential[partner] = q;
        self.with_potentials(potential)
    }

    /// Path `0 - 1 - ... - (n-1)` with zero potential.
    pub fn path(n: usize) -> Result<Graph> {
        Graph::new(n, (1..n).map(|i| (i - 1, i)), vec![0.0; n])
    }

    /// Cycle on `n >= 3` vertices with zero potential.
    pub fn cycle(n: usize) -> Result<Graph> {
        if n < 3 {
            return Err(Error::Structure(format!("cycle needs at least 3 vertices, got {n}")));
        }
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n)), vec![0.0; n])
    }

    /// Hypercube on `2^dim` vertices; vertices adjacent iff labels differ in one bit.
    pub fn hypercube(dim: u32) -> Result<Graph> {
        let n = 1usize << dim;
        let edges = (0..n).flat_map(|x| {
            (0..dim).filter_map(move |b| {
                let y = x ^ (1 << b);
                (x < y).then_some((x, y))
            })
        });
        Graph::new(n, edges, vec![0.0; n])
    }

    /// Star with centre 0 and `leaves` leaves.
    pub fn star(leaves: usize) -> Result<Graph> {
        Graph::new(leaves + 1, (1..=leaves).map(|i| (0, i)), vec![0.0; leaves + 1])
    }
}

/// A vertex map `map[i] = sigma(i)`; see [`validate_involution`] for the conditions it must meet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Involution {
    map: Vec<usize>,
}

impl Involution {
    pub fn new(map: Vec<usize>) -> Self {
        Involution { map }
    }

    pub fn identity(n: usize) -> Self {
        Involution { map: (0..n).collect() }
    }

    /// `i -> n - 1 - i`, the mirror symmetry of a path.
    pub fn reversal(n: usize) -> Self {
        Involution { map: (0..n).map(|i| n - 1 - i).collect() }
    }

    /// `i -> i + n/2 mod n`, the antipodal map of an even cycle.
    pub fn half_turn(n: usize) -> Self {
        Involution { map: (0..n).map(|i| (i + n / 2) % n).collect() }
    }

    /// Complement of every bit, the antipodal map of a hypercube.
    pub fn antipodal_hypercube(dim: u32) -> Self {
        let n = 1usize << dim;
        Involution { map: (0..n).map(|x| x ^ (n - 1)).collect() }
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    #[inline]
    pub fn apply(&self, v: usize) -> usize {
        self.map[v]
    }

    pub fn is_fixed(&self, v: usize) -> bool {
        self.map[v] == v
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn fixed_points(&self) -> Vec<usize> {
        (0..self.map.len()).filter(|&v| self.is_fixed(v)).collect()
    }
}

/// A single failed involution condition with its witness.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum Violation {
    NotSelfInverse { vertex: usize, image: usize, image_of_image: usize },
    EdgeNotPreserved { edge: (usize, usize), image: (usize, usize) },
    PotentialNotPreserved { vertex: usize, image: usize, potential: f64, image_potential: f64 },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct InvolutionVerdict {
    pub violations: Vec<Violation>,
}

impl InvolutionVerdict {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that `inv` is self-inverse, maps edges to edges and preserves the potential.
///
/// Every failing vertex or edge is reported. Potentials are compared exactly.
pub fn validate_involution(g: &Graph, inv: &Involution) -> Result<InvolutionVerdict> {
    let n = g.n();
    if inv.len() != n {
        return Err(Error::Structure(format!(
            "involution has length {} but graph has {n} vertices",
            inv.len()
        )));
    }
    if let Some((i, &j)) = inv.map.iter().enumerate().find(|(_, &j)| j >= n) {
        return Err(Error::Structure(format!("involution maps {i} to out-of-range {j}")));
    }
    let mut violations = Vec::new();
    for v in 0..n {
        let image = inv.apply(v);
        let back = inv.apply(image);
        if back != v {
            violations.push(Violation::NotSelfInverse { vertex: v, image, image_of_image: back });
        }
    }
    for &(a, b) in g.edges() {
        let (x, y) = (inv.apply(a), inv.apply(b));
        if !g.has_edge(x, y) {
            violations.push(Violation::EdgeNotPreserved { edge: (a, b), image: (x, y) });
        }
    }
    for v in 0..n {
        let image = inv.apply(v);
        if v < image || (image < v && inv.apply(image) != v) {
            let (p, pi) = (g.potential(v), g.potential(image));
            if p != pi {
                violations.push(Violation::PotentialNotPreserved {
                    vertex: v,
                    image,
                    potential: p,
                    image_potential: pi,
                });
            }
        }
    }
    Ok(InvolutionVerdict { violations })
}

/// Where a vertex sits in a [`VertexPartition`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    /// Index into `primary` (the set N).
    Primary(usize),
    /// Index into `mirror` (the set sigma N).
    Mirror(usize),
    /// Index into `fixed` (the set S).
    Fixed(usize),
}

/// `V = N ∪ σN ∪ S` with `mirror[j] = σ(primary[j])` and the well at `primary[0]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexPartition {
    pub primary: Vec<usize>,
    pub mirror: Vec<usize>,
    pub fixed: Vec<usize>,
    slots: Vec<Slot>,
}

impl VertexPartition {
    pub fn k(&self) -> usize {
        self.primary.len()
    }

    pub fn s(&self) -> usize {
        self.fixed.len()
    }

    pub fn n(&self) -> usize {
        self.slots.len()
    }

    pub fn well(&self) -> usize {
        self.primary[0]
    }

    pub fn partner(&self) -> usize {
        self.mirror[0]
    }

    pub fn slot(&self, v: usize) -> Slot {
        self.slots[v]
    }

    /// The reduced vertex order `N` followed by `S`.
    pub fn reduced_vertices(&self) -> Vec<usize> {
        self.primary.iter().chain(&self.fixed).copied().collect()
    }
}

/// Splits the vertices around the well pair `(well, σ(well))`.
///
/// A vertex strictly closer to `well` than to its partner goes to N. For a
/// pair `{x, σ(x)}` equidistant from both wells the smaller index goes to N.
/// N is ordered with the well first and the rest by ascending index.
pub fn partition_vertices(g: &Graph, inv: &Involution, well: usize) -> Result<VertexPartition> {
    let verdict = validate_involution(g, inv)?;
    if !verdict.is_ok() {
        return Err(Error::Domain(format!(
            "involution is not valid ({} violations)",
            verdict.violations.len()
        )));
    }
    if well >= g.n() {
        return Err(Error::Structure(format!("well {well} out of range")));
    }
    let partner = inv.apply(well);
    if partner == well {
        return Err(Error::Domain(format!("well {well} is fixed by the involution")));
    }
    let from_well = g.bfs_distances(well);
    let from_partner = g.bfs_distances(partner);

    let mut primary = vec![well];
    let mut fixed = Vec::new();
    for x in 0..g.n() {
        let sx = inv.apply(x);
        if x == well || x == partner {
            continue;
        }
        if sx == x {
            fixed.push(x);
            continue;
        }
        // visit each pair once, from its smaller member
        if sx < x {
            continue;
        }
        let chosen = match from_well[x].cmp(&from_partner[x]) {
            core::cmp::Ordering::Less => x,
            core::cmp::Ordering::Greater => sx,
            core::cmp::Ordering::Equal => x,
        };
        primary.push(chosen);
    }
    primary[1..].sort_unstable();
    let mirror: Vec<usize> = primary.iter().map(|&v| inv.apply(v)).collect();

    let mut slots = vec![Slot::Fixed(0); g.n()];
    for (j, &v) in primary.iter().enumerate() {
        slots[v] = Slot::Primary(j);
    }
    for (j, &v) in mirror.iter().enumerate() {
        slots[v] = Slot::Mirror(j);
    }
    for (j, &v) in fixed.iter().enumerate() {
        slots[v] = Slot::Fixed(j);
    }
    Ok(VertexPartition { primary, mirror, fixed, slots })
}

/// A graph doubled from one half, together with its mirror involution.
#[derive(Debug, Clone, PartialEq)]
pub struct MirrorGraph {
    pub graph: Graph,
    pub involution: Involution,
    pub well: usize,
}

/// Glues `half` to a copy of itself.
///
/// Vertex `i` of the half keeps index `i`; its copy `i'` gets index
/// `i + half.n()`. A cross pair `(i, j)` adds the edges `i - j'` and `j - i'`
/// (a single edge `i - i'` when `i == j`). Potentials are copied to the mirror.
pub fn mirror_build(half: &Graph, cross_edges: &[(usize, usize)], well: usize) -> Result<MirrorGraph> {
    let h = half.n();
    if well >= h {
        return Err(Error::Structure(format!("well {well} not in the half graph")));
    }
    let mut edges = Vec::with_capacity(2 * half.edges().len() + 2 * cross_edges.len());
    for &(a, b) in half.edges() {
        edges.push((a, b));
        edges.push((a + h, b + h));
    }
    let mut cross: Vec<(usize, usize)> = Vec::with_capacity(cross_edges.len());
    for &(i, j) in cross_edges {
        if i >= h || j >= h {
            return Err(Error::Structure(format!("cross pair ({i}, {j}) out of range")));
        }
        cross.push((i.min(j), i.max(j)));
    }
    cross.sort_unstable();
    cross.dedup();
    for (i, j) in cross {
        edges.push((i, j + h));
        if i != j {
            edges.push((j, i + h));
        }
    }
    let mut potential = half.potentials().to_vec();
    potential.extend_from_slice(half.potentials());
    let graph = Graph::new(2 * h, edges, potential)?;
    let involution = Involution::new((0..2 * h).map(|v| (v + h) % (2 * h)).collect());
    Ok(MirrorGraph { graph, involution, well })
}
