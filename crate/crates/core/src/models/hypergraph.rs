use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeKind {
    Ordinary,
    /// Weight-(ℓ-1) edge between cyclically adjacent vertices of `Ŵ`.
    Helper,
}

/// A hyperedge with demand `weight`. The vertex list is a multiset.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub kind: EdgeKind,
    pub vertices: Vec<u32>,
    pub weight: u32,
}

impl Edge {
    pub fn ordinary(vertices: Vec<u32>) -> Self {
        Edge { kind: EdgeKind::Ordinary, vertices, weight: 1 }
    }

    pub fn helper(left: u32, right: u32, weight: u32) -> Self {
        Edge { kind: EdgeKind::Helper, vertices: vec![left, right], weight }
    }

    /// Distinct vertices in first-occurrence order.
    pub fn distinct_vertices(&self) -> Vec<u32> {
        let mut out: Vec<u32> = Vec::with_capacity(self.vertices.len());
        for &v in &self.vertices {
            if !out.contains(&v) {
                out.push(v);
            }
        }
        out
    }

    pub fn contains(&self, v: u32) -> bool {
        self.vertices.contains(&v)
    }
}

/// Vertices `0..n`, all with capacity `vertex_weight`, and weighted edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedHypergraph {
    pub n: usize,
    pub vertex_weight: u32,
    pub edges: Vec<Edge>,
}

impl WeightedHypergraph {
    pub fn new(n: usize, vertex_weight: u32) -> Self {
        WeightedHypergraph { n, vertex_weight, edges: Vec::new() }
    }

    pub fn total_demand(&self) -> u64 {
        self.edges.iter().map(|e| e.weight as u64).sum()
    }

    pub fn total_capacity(&self) -> u64 {
        self.n as u64 * self.vertex_weight as u64
    }

    pub fn helper_count(&self) -> usize {
        self.edges.iter().filter(|e| e.kind == EdgeKind::Helper).count()
    }

    pub fn ordinary_count(&self) -> usize {
        self.edges.len() - self.helper_count()
    }

    pub fn validate(&self) -> Result<()> {
        for (i, e) in self.edges.iter().enumerate() {
            if e.vertices.is_empty() {
                return Err(Error::InvalidInstance(format!("edge {i} has no vertices")));
            }
            if let Some(v) = e.vertices.iter().find(|&&v| v as usize >= self.n) {
                return Err(Error::InvalidInstance(format!("edge {i} has vertex {v} ≥ n = {}", self.n)));
            }
            if e.kind == EdgeKind::Helper && e.vertices.len() != 2 {
                return Err(Error::InvalidInstance(format!("helper edge {i} must have two vertices")));
            }
        }
        Ok(())
    }
}

/// `mu[e]` lists `(vertex, amount)` pairs with distinct vertices and
/// positive amounts; an edge absent from a vertex's list has amount 0 there.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Orientation {
    pub mu: Vec<Vec<(u32, u32)>>,
}

impl Orientation {
    pub fn with_edges(m: usize) -> Self {
        Orientation { mu: vec![Vec::new(); m] }
    }

    pub fn get(&self, edge: usize, vertex: u32) -> u32 {
        self.mu[edge].iter().find(|(v, _)| *v == vertex).map_or(0, |&(_, a)| a)
    }

    /// Adds `amount` to `μ(edge, vertex)`.
    pub fn add(&mut self, edge: usize, vertex: u32, amount: u32) {
        if amount == 0 {
            return;
        }
        match self.mu[edge].iter_mut().find(|(v, _)| *v == vertex) {
            Some(slot) => slot.1 += amount,
            None => self.mu[edge].push((vertex, amount)),
        }
    }

    /// Total amount assigned to each vertex.
    pub fn loads(&self, n: usize) -> Vec<u64> {
        let mut load = vec![0u64; n];
        for list in &self.mu {
            for &(v, a) in list {
                if let Some(slot) = load.get_mut(v as usize) {
                    *slot += a as u64;
                }
            }
        }
        load
    }

    /// Checks the orientation conditions: every edge sends exactly its demand
    /// to its own vertices and no vertex receives more than its capacity.
    pub fn check(&self, h: &WeightedHypergraph) -> Result<()> {
        self.check_with(h, true)
    }

    /// Like [`check`](Self::check) but only requires `Σ μ(e, ·) ≤ η(e)`.
    pub fn check_allocation(&self, h: &WeightedHypergraph) -> Result<()> {
        self.check_with(h, false)
    }

    fn check_with(&self, h: &WeightedHypergraph, saturated: bool) -> Result<()> {
        if self.mu.len() != h.edges.len() {
            return Err(Error::InvalidOrientation(format!(
                "{} edge entries for {} edges",
                self.mu.len(),
                h.edges.len()
            )));
        }
        for (i, (list, e)) in self.mu.iter().zip(&h.edges).enumerate() {
            let mut sum = 0u64;
            for (j, &(v, a)) in list.iter().enumerate() {
                if !e.contains(v) {
                    return Err(Error::InvalidOrientation(format!("edge {i} oriented to non-member {v}")));
                }
                if list[..j].iter().any(|&(w, _)| w == v) {
                    return Err(Error::InvalidOrientation(format!("edge {i} lists vertex {v} twice")));
                }
                sum += a as u64;
            }
            let ok = if saturated { sum == e.weight as u64 } else { sum <= e.weight as u64 };
            if !ok {
                return Err(Error::InvalidOrientation(format!(
                    "edge {i} assigns {sum} of demand {}",
                    e.weight
                )));
            }
        }
        for (v, load) in self.loads(h.n).into_iter().enumerate() {
            if load > h.vertex_weight as u64 {
                return Err(Error::InvalidOrientation(format!(
                    "vertex {v} receives {load} > capacity {}",
                    h.vertex_weight
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> WeightedHypergraph {
        let mut h = WeightedHypergraph::new(3, 1);
        h.edges.push(Edge::ordinary(vec![0, 1]));
        h.edges.push(Edge::ordinary(vec![1, 2]));
        h
    }

    #[test]
    fn checker_accepts_valid_and_rejects_broken() {
        let h = triangle();
        let mut mu = Orientation::with_edges(2);
        mu.add(0, 0, 1);
        mu.add(1, 1, 1);
        assert!(mu.check(&h).is_ok());

        let mut over = Orientation::with_edges(2);
        over.add(0, 1, 1);
        over.add(1, 1, 1);
        assert!(over.check(&h).is_err());

        let mut foreign = Orientation::with_edges(2);
        foreign.add(0, 2, 1);
        foreign.add(1, 1, 1);
        assert!(foreign.check(&h).is_err());

        let partial = Orientation::with_edges(2);
        assert!(partial.check(&h).is_err());
        assert!(partial.check_allocation(&h).is_ok());
    }

    #[test]
    fn multiset_edges() {
        let e = Edge::ordinary(vec![4, 1, 4]);
        assert_eq!(e.distinct_vertices(), vec![4, 1]);
        let mut h = WeightedHypergraph::new(5, 1);
        h.edges.push(e);
        h.validate().unwrap();
        h.edges.push(Edge::ordinary(vec![5]));
        assert!(h.validate().is_err());
    }
}
