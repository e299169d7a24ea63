use serde::{Deserialize, Serialize};

use super::hypergraph::{Edge, Orientation, WeightedHypergraph};
use crate::error::{Error, Result};

/// The coupled pair built from one list of window starts.
///
/// `W` has one edge per object, covering the union of its windows. `Ŵ` has
/// the helper cycle as edges `0..n` (edge `i` joins `i` and `i+1`) followed
/// by one ordinary edge per object at id `n + i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowsPair {
    pub n: usize,
    pub ell: u32,
    pub starts: Vec<Vec<u32>>,
    pub w: WeightedHypergraph,
    pub w_hat: WeightedHypergraph,
}

impl WindowsPair {
    pub(crate) fn build(n: usize, ell: u32, starts: &[Vec<u32>]) -> Self {
        let mut w = WeightedHypergraph::new(n, 1);
        for e in starts {
            let mut cells: Vec<u32> = e
                .iter()
                .flat_map(|&j| (0..ell).map(move |d| ((j as usize + d as usize) % n) as u32))
                .collect();
            cells.sort_unstable();
            cells.dedup();
            w.edges.push(Edge::ordinary(cells));
        }
        let mut w_hat = WeightedHypergraph::new(n, ell);
        for i in 0..n {
            w_hat.edges.push(Edge::helper(i as u32, ((i + 1) % n) as u32, ell - 1));
        }
        w_hat.edges.extend(starts.iter().map(|e| Edge::ordinary(e.clone())));
        WindowsPair { n, ell, starts: starts.to_vec(), w, w_hat }
    }

    pub fn m(&self) -> usize {
        self.starts.len()
    }

    fn offset(&self, from: u32, to: u32) -> usize {
        (to as usize + self.n - from as usize) % self.n
    }
}

fn placed_vertex(list: &[(u32, u32)]) -> Option<u32> {
    list.iter().find(|&&(_, a)| a > 0).map(|&(v, _)| v)
}

/// Lifts a placement of the objects into cells to an orientation of `Ŵ`.
///
/// Each object is charged to the window containing its cell that starts
/// closest before it (smallest start on ties). Helper `c_i` then sends to
/// `i` one unit per cell shared by windows `i` and `i+1` that is charged to
/// a window starting strictly right of `i`, and the rest to `i+1`.
pub fn translate_up(pair: &WindowsPair, mu: &Orientation) -> Result<Orientation> {
    mu.check(&pair.w)?;
    let n = pair.n;
    let ell = pair.ell as usize;
    let mut label: Vec<Option<u32>> = vec![None; n];
    let mut out = Orientation::with_edges(n + pair.m());
    for (i, starts) in pair.starts.iter().enumerate() {
        let cell = placed_vertex(&mu.mu[i])
            .ok_or_else(|| Error::InvalidOrientation(format!("object {i} is not placed")))?;
        let window = starts
            .iter()
            .copied()
            .filter(|&j| pair.offset(j, cell) < ell)
            .min_by_key(|&j| (pair.offset(j, cell), j))
            .ok_or_else(|| Error::InvalidOrientation(format!("object {i} sits outside its windows")))?;
        label[cell as usize] = Some(window);
        out.add(n + i, window, 1);
    }
    for i in 0..n {
        let shared = (1..ell).map(|d| (i + d) % n);
        let right = shared
            .filter(|&x| matches!(label[x], Some(j) if (1..ell).contains(&pair.offset(i as u32, j))))
            .count() as u32;
        out.add(i, i as u32, right);
        out.add(i, ((i + 1) % n) as u32, pair.ell - 1 - right);
    }
    out.check(&pair.w_hat)
        .map_err(|e| Error::Numerical(format!("lifted orientation is invalid: {e}")))?;
    Ok(out)
}

/// The intervals `[i + s_i, i + ℓ - t_i)` as `(start, len)`, where `s_i` is
/// what helper `c_{i-1}` sends to `i` and `t_i` what `c_i` sends to `i`.
pub fn window_partition(pair: &WindowsPair, mu_hat: &Orientation) -> Result<Vec<(u32, u32)>> {
    mu_hat.check(&pair.w_hat)?;
    let n = pair.n;
    Ok((0..n)
        .map(|i| {
            let from_left = mu_hat.get((i + n - 1) % n, i as u32);
            let from_own = mu_hat.get(i, i as u32);
            (((i as u32 + from_left) as usize % n) as u32, pair.ell - from_left - from_own)
        })
        .collect())
}

/// Places the objects oriented to vertex `i` into consecutive cells of its
/// interval, in object order.
pub fn translate_down(pair: &WindowsPair, mu_hat: &Orientation) -> Result<Orientation> {
    let parts = window_partition(pair, mu_hat)?;
    let n = pair.n;
    let mut used = vec![0u32; n];
    let mut out = Orientation::with_edges(pair.m());
    for i in 0..pair.m() {
        let v = placed_vertex(&mu_hat.mu[n + i])
            .ok_or_else(|| Error::InvalidOrientation(format!("object {i} is not oriented")))?;
        let (start, len) = parts[v as usize];
        let slot = &mut used[v as usize];
        if *slot >= len {
            return Err(Error::InvalidOrientation(format!("interval of vertex {v} overflows")));
        }
        out.add(i, ((start + *slot) as usize % n) as u32, 1);
        *slot += 1;
    }
    out.check(&pair.w)
        .map_err(|e| Error::Numerical(format!("placement is invalid: {e}")))?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{brute_force_orientable, gen_windows, InstanceSpec, Scheme};

    fn all_left(pair: &WindowsPair) -> Orientation {
        let mut mu = Orientation::with_edges(pair.n + pair.m());
        for i in 0..pair.n {
            mu.add(i, i as u32, pair.ell - 1);
        }
        mu
    }

    #[test]
    fn empty_placement_lifts_with_zero_counts() {
        let pair = gen_windows(InstanceSpec::new(Scheme::Windows, 8, 0, 2, 3, 1).unwrap()).unwrap();
        let up = translate_up(&pair, &Orientation::with_edges(0)).unwrap();
        for i in 0..8 {
            assert_eq!(up.get(i, i as u32), 0);
            assert_eq!(up.get(i, ((i + 1) % 8) as u32), 2);
        }
    }

    #[test]
    fn all_left_gives_singletons() {
        let pair = gen_windows(InstanceSpec::new(Scheme::Windows, 8, 0, 2, 3, 1).unwrap()).unwrap();
        let parts = window_partition(&pair, &all_left(&pair)).unwrap();
        assert_eq!(parts, (0..8).map(|i| (i, 1)).collect::<Vec<_>>());
        assert_eq!(translate_down(&pair, &all_left(&pair)).unwrap(), Orientation::with_edges(0));
    }

    #[test]
    fn hand_example_round_trip() {
        // n = 6, ℓ = 2; objects choose windows {0, 3}, {0, 1}, {1, 4}.
        let pair = WindowsPair::build(6, 2, &[vec![0, 3], vec![0, 1], vec![1, 4]]);
        let mut mu = Orientation::with_edges(3);
        mu.add(0, 0, 1);
        mu.add(1, 1, 1);
        mu.add(2, 2, 1);
        let up = translate_up(&pair, &mu).unwrap();
        // Cell 1 is charged to window 1 (distance 0), cell 2 to window 1.
        assert_eq!(up.get(6 + 1, 1), 1);
        assert_eq!(up.get(6 + 2, 1), 1);
        assert_eq!(up.get(0, 0), 1);
        let down = translate_down(&pair, &up).unwrap();
        down.check(&pair.w).unwrap();
    }

    #[test]
    fn rejects_invalid_input() {
        let pair = WindowsPair::build(6, 2, &[vec![0, 3]]);
        let mut mu = Orientation::with_edges(1);
        mu.add(0, 2, 1);
        assert!(translate_up(&pair, &mu).is_err());
        assert!(translate_down(&pair, &Orientation::with_edges(7)).is_err());
    }

    #[test]
    fn orientable_pairs_agree_on_small_instances() {
        for seed in 0..40 {
            let spec = InstanceSpec::new(Scheme::Windows, 6, 4, 2, 2, seed).unwrap();
            let pair = gen_windows(spec).unwrap();
            assert_eq!(
                brute_force_orientable(&pair.w).unwrap(),
                brute_force_orientable(&pair.w_hat).unwrap(),
                "seed {seed}"
            );
        }
    }
}
