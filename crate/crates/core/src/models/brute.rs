use std::collections::HashMap;

use super::hypergraph::{Orientation, WeightedHypergraph};
use crate::error::{Error, Result};

pub const BRUTE_MAX_VERTICES: usize = 16;
pub const BRUTE_MAX_DEMAND: u64 = 64;
const MAX_CAPACITY: u32 = 15;

/// Exhaustive search over demand assignments, edge by edge.
///
/// Edges are processed in order of their largest vertex, and the memo key
/// keeps only the residuals of vertices that later edges still touch, so
/// the state space stays small on the near-linear instances used here.
struct Search {
    /// `(original edge id, distinct vertices, demand)`.
    edges: Vec<(usize, Vec<u32>, u32)>,
    /// `live[i]`: vertices touched by some edge at position ≥ `i`.
    live: Vec<u64>,
    memo: HashMap<(usize, u64), u64>,
}

impl Search {
    fn new(h: &WeightedHypergraph) -> Result<Self> {
        h.validate()?;
        if h.n > BRUTE_MAX_VERTICES || h.total_demand() > BRUTE_MAX_DEMAND || h.vertex_weight > MAX_CAPACITY {
            return Err(Error::TooLarge(format!(
                "brute force needs n ≤ {BRUTE_MAX_VERTICES}, demand ≤ {BRUTE_MAX_DEMAND}, capacity ≤ {MAX_CAPACITY}; got n = {}, demand = {}, capacity = {}",
                h.n,
                h.total_demand(),
                h.vertex_weight
            )));
        }
        let mut edges: Vec<(usize, Vec<u32>, u32)> = h
            .edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.weight > 0)
            .map(|(i, e)| (i, e.distinct_vertices(), e.weight))
            .collect();
        edges.sort_by_key(|(i, vs, _)| (vs.iter().copied().max(), *i));
        let mut live = vec![0u64; edges.len() + 1];
        for i in (0..edges.len()).rev() {
            live[i] = live[i + 1] | edges[i].1.iter().fold(0u64, |m, &v| m | 1 << v);
        }
        Ok(Search { edges, live, memo: HashMap::new() })
    }

    fn key(&self, i: usize, res: &[u32]) -> u64 {
        let mut key = 0u64;
        let mut mask = self.live[i];
        while mask != 0 {
            let v = mask.trailing_zeros() as usize;
            key |= (res[v] as u64) << (4 * v);
            mask &= mask - 1;
        }
        key
    }

    /// Largest demand assignable to edges `i..` given residuals `res`.
    fn best(&mut self, i: usize, res: &mut [u32]) -> u64 {
        if i == self.edges.len() {
            return 0;
        }
        let key = (i, self.key(i, res));
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let (_, vs, demand) = self.edges[i].clone();
        let mut best = 0;
        let mut amounts = vec![0u32; vs.len()];
        self.spread(i, &vs, 0, demand, 0, &mut amounts, res, &mut best);
        self.memo.insert(key, best);
        best
    }

    #[allow(clippy::too_many_arguments)]
    fn spread(
        &mut self,
        i: usize,
        vs: &[u32],
        j: usize,
        left: u32,
        placed: u32,
        amounts: &mut [u32],
        res: &mut [u32],
        best: &mut u64,
    ) {
        if j == vs.len() {
            let total = placed as u64 + self.best(i + 1, res);
            *best = (*best).max(total);
            return;
        }
        let v = vs[j] as usize;
        let top = left.min(res[v]);
        for a in (0..=top).rev() {
            amounts[j] = a;
            res[v] -= a;
            self.spread(i, vs, j + 1, left - a, placed + a, amounts, res, best);
            res[v] += a;
        }
        amounts[j] = 0;
    }

    /// Rebuilds an assignment achieving `best(0, res)`.
    fn witness(&mut self, h: &WeightedHypergraph, res: &mut [u32]) -> Orientation {
        let mut out = Orientation::with_edges(h.edges.len());
        let mut target = self.best(0, res);
        for i in 0..self.edges.len() {
            let (id, vs, demand) = self.edges[i].clone();
            let mut amounts = vec![0u32; vs.len()];
            let found = self.pick(i, &vs, 0, demand, 0, &mut amounts, res, target);
            let placed: u32 = found.iter().sum();
            for (&v, &a) in vs.iter().zip(&found) {
                res[v as usize] -= a;
                out.add(id, v, a);
            }
            target -= placed as u64;
        }
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn pick(
        &mut self,
        i: usize,
        vs: &[u32],
        j: usize,
        left: u32,
        placed: u32,
        amounts: &mut [u32],
        res: &mut [u32],
        target: u64,
    ) -> Vec<u32> {
        if j == vs.len() {
            if placed as u64 + self.best(i + 1, res) == target {
                return amounts.to_vec();
            }
            return Vec::new();
        }
        let v = vs[j] as usize;
        for a in (0..=left.min(res[v])).rev() {
            amounts[j] = a;
            res[v] -= a;
            let found = self.pick(i, vs, j + 1, left - a, placed + a, amounts, res, target);
            res[v] += a;
            if !found.is_empty() {
                return found;
            }
        }
        amounts[j] = 0;
        Vec::new()
    }
}

/// Maximum total demand that fits, `M(H)`, by exhaustive search.
pub fn brute_force_max_allocation(h: &WeightedHypergraph) -> Result<u64> {
    let mut search = Search::new(h)?;
    let mut res = vec![h.vertex_weight; h.n];
    Ok(search.best(0, &mut res))
}

/// Whether `H` admits an orientation, by exhaustive search.
pub fn brute_force_orientable(h: &WeightedHypergraph) -> Result<bool> {
    Ok(brute_force_max_allocation(h)? == h.total_demand())
}

/// An orientation of `H` if one exists, by exhaustive search.
pub fn brute_force_orientation(h: &WeightedHypergraph) -> Result<Option<Orientation>> {
    let mut search = Search::new(h)?;
    let mut res = vec![h.vertex_weight; h.n];
    if search.best(0, &mut res) != h.total_demand() {
        return Ok(None);
    }
    Ok(Some(search.witness(h, &mut res)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{gen_blocks, gen_windows, Edge, InstanceSpec, Scheme};

    #[test]
    fn helper_cycle_alone_is_orientable() {
        for ell in 2..=4 {
            let pair = gen_windows(InstanceSpec::new(Scheme::Windows, 2 * ell as usize + 1, 0, 2, ell, 0).unwrap())
                .unwrap();
            assert!(brute_force_orientable(&pair.w_hat).unwrap());
        }
    }

    #[test]
    fn over_capacity_instances_fail() {
        let pair = gen_windows(InstanceSpec::new(Scheme::Windows, 4, 5, 2, 2, 3).unwrap()).unwrap();
        assert!(!brute_force_orientable(&pair.w_hat).unwrap());
        assert_eq!(brute_force_max_allocation(&pair.w_hat).unwrap(), 8);
        let b = gen_blocks(InstanceSpec::new(Scheme::Blocks, 6, 7, 2, 2, 3).unwrap()).unwrap();
        assert!(!brute_force_orientable(&b).unwrap());
    }

    #[test]
    fn small_hand_cases() {
        let mut h = WeightedHypergraph::new(3, 1);
        for e in [vec![0, 1], vec![0, 1], vec![0, 1], vec![2, 2]] {
            h.edges.push(Edge::ordinary(e));
        }
        assert_eq!(brute_force_max_allocation(&h).unwrap(), 3);
        h.edges.remove(0);
        let mu = brute_force_orientation(&h).unwrap().unwrap();
        mu.check(&h).unwrap();
    }

    #[test]
    fn witness_is_valid_when_orientable() {
        for seed in 0..30 {
            let pair = gen_windows(InstanceSpec::new(Scheme::Windows, 8, 6, 2, 2, seed).unwrap()).unwrap();
            let found = brute_force_orientation(&pair.w_hat).unwrap();
            assert_eq!(found.is_some(), brute_force_orientable(&pair.w_hat).unwrap());
            if let Some(mu) = found {
                mu.check(&pair.w_hat).unwrap();
            }
        }
    }

    #[test]
    fn rejects_large_instances() {
        let h = WeightedHypergraph::new(17, 1);
        assert!(matches!(brute_force_orientable(&h), Err(Error::TooLarge(_))));
        let mut h = WeightedHypergraph::new(4, 1);
        h.edges = (0..65).map(|_| Edge::ordinary(vec![0])).collect();
        assert!(brute_force_max_allocation(&h).is_err());
    }
}
