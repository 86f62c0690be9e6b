use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A `k`-partite graph. Vertices are numbered so that every part is a
/// contiguous range; edges are stored as ascending pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartiteGraph {
    pub parts: Vec<Vec<usize>>,
    pub edges: Vec<(usize, usize)>,
}

impl PartiteGraph {
    /// Validates the partition and edge list, then normalizes: every part
    /// gets a vertex adjacent to all vertices outside it, and parts are
    /// padded to equal size. Padding vertices are such universal vertices,
    /// so they never join an independent transversal.
    pub fn new(parts: Vec<Vec<usize>>, edges: Vec<(usize, usize)>) -> Result<Self> {
        if parts.is_empty() || parts.iter().any(Vec::is_empty) {
            return Err(Error::Graph("every part needs at least one vertex".into()));
        }
        let mut owner = std::collections::BTreeMap::new();
        for (i, part) in parts.iter().enumerate() {
            for &v in part {
                if owner.insert(v, i).is_some() {
                    return Err(Error::Graph(format!("vertex {v} appears twice")));
                }
            }
        }
        // Renumber part by part.
        let mut id = std::collections::BTreeMap::new();
        let mut next = 0;
        for part in &parts {
            for &v in part {
                id.insert(v, next);
                next += 1;
            }
        }
        let mut renamed_parts: Vec<Vec<usize>> = parts
            .iter()
            .map(|p| p.iter().map(|v| id[v]).collect())
            .collect();
        let mut part_of: Vec<usize> = vec![0; next];
        for (i, p) in renamed_parts.iter().enumerate() {
            for &v in p {
                part_of[v] = i;
            }
        }
        let mut edge_set = BTreeSet::new();
        for &(a, b) in &edges {
            let (Some(&ia), Some(&ib)) = (owner.get(&a), owner.get(&b)) else {
                return Err(Error::Graph(format!(
                    "edge ({a}, {b}) names an unknown vertex"
                )));
            };
            if ia == ib {
                return Err(Error::Graph(format!(
                    "edge ({a}, {b}) lies inside part {ia}"
                )));
            }
            let (x, y) = (id[&a], id[&b]);
            edge_set.insert((x.min(y), x.max(y)));
        }

        let n = next;
        let adjacent = |set: &BTreeSet<(usize, usize)>, a: usize, b: usize| {
            set.contains(&(a.min(b), a.max(b)))
        };
        let has_universal = |i: usize| {
            renamed_parts[i].iter().any(|&v| {
                (0..n)
                    .filter(|&u| part_of[u] != i)
                    .all(|u| adjacent(&edge_set, u, v))
            })
        };
        let mut padding: Vec<(usize, usize)> = Vec::new();
        let mut total = n;
        let needs: Vec<bool> = (0..parts.len()).map(|i| !has_universal(i)).collect();
        let target = renamed_parts
            .iter()
            .zip(&needs)
            .map(|(p, &need)| p.len() + usize::from(need))
            .max()
            .expect("at least one part");
        for (i, p) in renamed_parts.iter_mut().enumerate() {
            while p.len() < target || (needs[i] && !padding.iter().any(|&(_, j)| j == i)) {
                p.push(total);
                padding.push((total, i));
                total += 1;
            }
        }
        part_of.resize(total, 0);
        for &(v, i) in &padding {
            part_of[v] = i;
        }
        for &(v, i) in &padding {
            for u in (0..total).filter(|&u| part_of[u] != i) {
                edge_set.insert((u.min(v), u.max(v)));
            }
        }
        // Restore contiguous numbering after padding.
        let order: Vec<usize> = renamed_parts.iter().flatten().copied().collect();
        let mut pos = vec![0; total];
        for (new, &old) in order.iter().enumerate() {
            pos[old] = new;
        }
        let parts = renamed_parts
            .iter()
            .map(|p| p.iter().map(|&v| pos[v]).collect())
            .collect();
        let mut edges: Vec<(usize, usize)> = edge_set
            .into_iter()
            .map(|(a, b)| (pos[a].min(pos[b]), pos[a].max(pos[b])))
            .collect();
        edges.sort_unstable();
        Ok(Self { parts, edges })
    }

    /// `k` parts of `size` vertices. The first vertex of each part is
    /// adjacent to every vertex outside its part; every other cross pair is
    /// an edge with probability `p`.
    pub fn random(k: usize, size: usize, p: f64, seed: u64) -> Result<Self> {
        if k < 2 || size == 0 {
            return Err(Error::Graph("need at least two nonempty parts".into()));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Graph(format!(
                "edge probability must lie in [0, 1], got {p}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let parts: Vec<Vec<usize>> = (0..k)
            .map(|i| (i * size..(i + 1) * size).collect())
            .collect();
        let mut edges = Vec::new();
        for a in 0..k * size {
            for b in (a + 1)..k * size {
                if a / size == b / size {
                    continue;
                }
                let universal = a % size == 0 || b % size == 0;
                // Draw for every pair so the stream does not depend on p.
                let draw: f64 = rng.random();
                if universal || draw < p {
                    edges.push((a, b));
                }
            }
        }
        Ok(Self { parts, edges })
    }

    pub fn k(&self) -> usize {
        self.parts.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.parts.iter().map(Vec::len).sum()
    }

    pub fn part_of(&self, v: usize) -> usize {
        self.parts
            .iter()
            .position(|p| p.contains(&v))
            .expect("vertex belongs to a part")
    }

    fn adjacency(&self) -> Vec<Vec<bool>> {
        let n = self.num_vertices();
        let mut adj = vec![vec![false; n]; n];
        for &(a, b) in &self.edges {
            adj[a][b] = true;
            adj[b][a] = true;
        }
        adj
    }
}

/// First independent transversal in lexicographic order over
/// `V_1 × … × V_k`, if any.
pub fn find_mcis(g: &PartiteGraph) -> Option<Vec<usize>> {
    let adj = g.adjacency();
    fn extend(g: &PartiteGraph, adj: &[Vec<bool>], chosen: &mut Vec<usize>) -> bool {
        let i = chosen.len();
        if i == g.k() {
            return true;
        }
        for &v in &g.parts[i] {
            if chosen.iter().all(|&u| !adj[u][v]) {
                chosen.push(v);
                if extend(g, adj, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    let found: Vec<Option<Vec<usize>>> = g.parts[0]
        .par_iter()
        .map(|&v| {
            let mut chosen = vec![v];
            extend(g, &adj, &mut chosen).then_some(chosen)
        })
        .collect();
    found.into_iter().flatten().next()
}
