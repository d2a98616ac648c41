#![allow(dead_code)]

use qwalk_core::graph::{mirror_build, Graph, Involution};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CORPUS_SEED: u64 = 0x5eed_2024;
pub const RANDOM_GRAPHS: usize = 50;
pub const MAX_RANDOM_N: usize = 60;
pub const MAX_RANDOM_DEGREE: usize = 6;

#[derive(Debug, Clone)]
pub struct Case {
    pub name: String,
    pub graph: Graph,
    pub involution: Involution,
    pub well: usize,
}

pub fn paths() -> Vec<Case> {
    (2..=8)
        .map(|n| Case {
            name: format!("P{n}"),
            graph: Graph::path(n).unwrap(),
            involution: Involution::reversal(n),
            well: 0,
        })
        .collect()
}

pub fn cycles() -> Vec<Case> {
    (4..=10)
        .step_by(2)
        .map(|n| Case {
            name: format!("C{n}"),
            graph: Graph::cycle(n).unwrap(),
            involution: Involution::half_turn(n),
            well: 0,
        })
        .collect()
}

pub fn hypercubes() -> Vec<Case> {
    (2..=4)
        .map(|d| Case {
            name: format!("Q{d}"),
            graph: Graph::hypercube(d).unwrap(),
            involution: Involution::antipodal_hypercube(d),
            well: 0,
        })
        .collect()
}

/// A connected graph glued to its mirror image, with the well at the vertex
/// farthest from its own image (smallest index on ties).
pub fn random_mirrored(rng: &mut impl Rng, max_n: usize, max_degree: usize) -> Case {
    let h = rng.gen_range(2..=max_n / 2);
    let mut degree = vec![0usize; h];
    let mut edges = Vec::new();
    // random spanning tree, leaving room for at least one cross edge per vertex
    for i in 1..h {
        let candidates: Vec<usize> = (0..i).filter(|&j| degree[j] + 2 <= max_degree).collect();
        let j = *candidates.choose(rng).unwrap_or(&(i - 1));
        edges.push((j, i));
        degree[i] += 1;
        degree[j] += 1;
    }
    let extra = rng.gen_range(0..=h);
    for _ in 0..extra {
        let (a, b) = (rng.gen_range(0..h), rng.gen_range(0..h));
        let (a, b) = (a.min(b), a.max(b));
        if a != b && !edges.contains(&(a, b)) && degree[a] + 2 <= max_degree && degree[b] + 2 <= max_degree {
            edges.push((a, b));
            degree[a] += 1;
            degree[b] += 1;
        }
    }
    let mut cross = Vec::new();
    let wanted = rng.gen_range(1..=3);
    // every degree is at most max_degree - 1 here, so the first pair always fits
    for _ in 0..50 {
        if cross.len() == wanted {
            break;
        }
        let (i, j) = (rng.gen_range(0..h), rng.gen_range(0..h));
        let (i, j) = (i.min(j), i.max(j));
        if degree[i] < max_degree && degree[j] < max_degree && !cross.contains(&(i, j)) {
            cross.push((i, j));
            degree[i] += 1;
            if i != j {
                degree[j] += 1;
            }
        }
    }
    let half = Graph::new(h, edges, vec![0.0; h]).unwrap();
    let mirrored = mirror_build(&half, &cross, 0).unwrap();
    let well = (0..h)
        .max_by_key(|&v| (mirrored.graph.bfs_distances(v)[v + h], std::cmp::Reverse(v)))
        .unwrap();
    Case {
        name: format!("R{h}x2"),
        graph: mirrored.graph,
        involution: mirrored.involution,
        well,
    }
}

pub fn random_corpus() -> Vec<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    (0..RANDOM_GRAPHS)
        .map(|i| {
            let mut c = random_mirrored(&mut rng, MAX_RANDOM_N, MAX_RANDOM_DEGREE);
            c.name = format!("{}#{i}", c.name);
            c
        })
        .collect()
}

pub fn corpus() -> Vec<Case> {
    let mut all = paths();
    all.extend(cycles());
    all.extend(hypercubes());
    all.extend(random_corpus());
    all
}

/// `2m + 1`, `10(m + 1)`, `100(m + 1)`.
pub fn q_grid(m: usize) -> [f64; 3] {
    let m = m as f64;
    [2.0 * m + 1.0, 10.0 * (m + 1.0), 100.0 * (m + 1.0)]
}
