use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mix::mix64;
use crate::params::ModelParams;

pub const DEFAULT_TOUCH_CAP: u64 = 10_000;

const EMPTY: u32 = u32::MAX;
/// Helper ball whose other bin is the left neighbour.
const HELPER_LEFT: u32 = u32::MAX - 2;
/// Helper ball whose other bin is the right neighbour.
const HELPER_RIGHT: u32 = u32::MAX - 1;
const INF: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InsertStats {
    /// One plus the number of evictions.
    pub touches: u64,
    pub success: bool,
}

#[derive(Debug, Clone)]
struct Ball<V> {
    key: u64,
    value: V,
    bin: u32,
}

/// Bin state saved before the first change in an insertion.
#[derive(Debug, Clone, Copy)]
struct Saved {
    bin: u32,
    label: u32,
    fill: u8,
}

#[derive(Debug, Clone)]
pub struct LsaTable<V = u64> {
    n: usize,
    params: ModelParams,
    ell: usize,
    hash_seeds: Vec<u64>,
    /// `ℓ + 1` occupant slots per bin, in arrival order.
    slots: Vec<u32>,
    fill: Vec<u8>,
    labels: Vec<u32>,
    cells: Vec<u32>,
    /// Cell interval each bin currently occupies, as `(start, len)`.
    spans: Vec<(u32, u32)>,
    balls: Vec<Option<Ball<V>>>,
    choices: Vec<u32>,
    free_ids: Vec<u32>,
    count: usize,
    touch_cap: u64,
    saved: Vec<Saved>,
    saved_slots: Vec<u32>,
    touched: Vec<u32>,
    epoch: u32,
}

impl<V> LsaTable<V> {
    /// Empty table with every helper in its left bin.
    pub fn new(n: usize, params: ModelParams, master_seed: u64) -> Result<Self> {
        let ell = params.ell() as usize;
        if n < 2 * ell {
            return Err(Error::InvalidParams(format!("n = {n} must be at least 2ℓ = {}", 2 * ell)));
        }
        if n >= HELPER_LEFT as usize {
            return Err(Error::InvalidParams(format!("n = {n} is too large")));
        }
        let mut slots = vec![EMPTY; n * (ell + 1)];
        for b in 0..n {
            slots[b * (ell + 1)..b * (ell + 1) + ell - 1].fill(HELPER_RIGHT);
        }
        Ok(LsaTable {
            n,
            params,
            ell,
            hash_seeds: (0..params.k() as u64).map(|i| mix64(master_seed, i)).collect(),
            slots,
            fill: vec![(ell - 1) as u8; n],
            labels: vec![0; n],
            cells: vec![EMPTY; n],
            spans: (0..n as u32).map(|b| (b, 1)).collect(),
            balls: Vec::new(),
            choices: Vec::new(),
            free_ids: Vec::new(),
            count: 0,
            touch_cap: DEFAULT_TOUCH_CAP,
            saved: Vec::new(),
            saved_slots: Vec::new(),
            touched: vec![0; n],
            epoch: 0,
        })
    }

    /// Sets the largest number of touches an insertion may use before it is
    /// declared failed.
    pub fn with_touch_cap(mut self, cap: u64) -> Self {
        self.touch_cap = cap.max(1);
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn params(&self) -> ModelParams {
        self.params
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn load(&self) -> f64 {
        self.count as f64 / self.n as f64
    }

    pub fn label(&self, bin: usize) -> u32 {
        self.labels[bin]
    }

    /// Number of balls (helpers included) in `bin`.
    pub fn occupancy(&self, bin: usize) -> usize {
        self.fill[bin] as usize
    }

    /// Helpers in `bin` from its left and right separator, `(s_i, t_i)`.
    pub fn helper_split(&self, bin: usize) -> (u32, u32) {
        let occ = self.occupants(bin);
        let left = occ.iter().filter(|&&x| x == HELPER_LEFT).count() as u32;
        let right = occ.iter().filter(|&&x| x == HELPER_RIGHT).count() as u32;
        (left, right)
    }

    /// The `k` hashed bins of `key`.
    pub fn bins_of(&self, key: u64) -> Vec<u32> {
        self.hash_seeds.iter().map(|&s| (mix64(s, key) % self.n as u64) as u32).collect()
    }

    fn k(&self) -> usize {
        self.hash_seeds.len()
    }

    fn occupants(&self, bin: usize) -> &[u32] {
        let base = bin * (self.ell + 1);
        &self.slots[base..base + self.fill[bin] as usize]
    }

    fn ball_choices(&self, id: u32) -> &[u32] {
        let k = self.k();
        &self.choices[id as usize * k..(id as usize + 1) * k]
    }

    fn ball(&self, id: u32) -> &Ball<V> {
        self.balls[id as usize].as_ref().expect("live ball id")
    }

    fn left(&self, bin: usize) -> usize {
        (bin + self.n - 1) % self.n
    }

    fn right(&self, bin: usize) -> usize {
        (bin + 1) % self.n
    }

    /// Least-label other bin of an occupant of `bin`, ties to the smallest
    /// index. `None` if the occupant has no other bin.
    fn best_alternative(&self, bin: usize, occupant: u32) -> Option<(u32, usize)> {
        match occupant {
            HELPER_LEFT => Some((self.labels[self.left(bin)], self.left(bin))),
            HELPER_RIGHT => Some((self.labels[self.right(bin)], self.right(bin))),
            id => self
                .ball_choices(id)
                .iter()
                .map(|&c| c as usize)
                .filter(|&c| c != bin)
                .map(|c| (self.labels[c], c))
                .min(),
        }
    }

    fn fresh_label(&self, bin: usize) -> u32 {
        if (self.fill[bin] as usize) < self.ell {
            return 0;
        }
        self.occupants(bin)
            .iter()
            .filter_map(|&x| self.best_alternative(bin, x))
            .map(|(l, _)| l)
            .min()
            .map_or(INF, |l| l.saturating_add(1))
    }

    fn save(&mut self, bin: usize) {
        if self.touched[bin] == self.epoch {
            return;
        }
        self.touched[bin] = self.epoch;
        self.saved.push(Saved { bin: bin as u32, label: self.labels[bin], fill: self.fill[bin] });
        let base = bin * (self.ell + 1);
        self.saved_slots.extend_from_slice(&self.slots[base..base + self.ell + 1]);
    }

    fn push(&mut self, bin: usize, occupant: u32) {
        self.save(bin);
        let base = bin * (self.ell + 1);
        self.slots[base + self.fill[bin] as usize] = occupant;
        self.fill[bin] += 1;
        if occupant < HELPER_LEFT {
            self.balls[occupant as usize].as_mut().expect("live ball id").bin = bin as u32;
        }
    }

    fn remove_at(&mut self, bin: usize, pos: usize) -> u32 {
        self.save(bin);
        let base = bin * (self.ell + 1);
        let end = base + self.fill[bin] as usize;
        let out = self.slots[base + pos];
        self.slots.copy_within(base + pos + 1..end, base + pos);
        self.slots[end - 1] = EMPTY;
        self.fill[bin] -= 1;
        out
    }

    fn begin(&mut self) {
        self.saved.clear();
        self.saved_slots.clear();
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.touched.fill(0);
            self.epoch = 1;
        }
    }

    fn rollback(&mut self) {
        let width = self.ell + 1;
        for (i, s) in self.saved.iter().enumerate() {
            let bin = s.bin as usize;
            self.labels[bin] = s.label;
            self.fill[bin] = s.fill;
            self.slots[bin * width..(bin + 1) * width].copy_from_slice(&self.saved_slots[i * width..(i + 1) * width]);
        }
        for i in 0..self.saved.len() {
            let bin = self.saved[i].bin as usize;
            for j in 0..self.fill[bin] as usize {
                let x = self.slots[bin * width + j];
                if x < HELPER_LEFT {
                    self.balls[x as usize].as_mut().expect("live ball id").bin = bin as u32;
                }
            }
        }
    }

    /// Rewrites the cells of every bin changed in the current operation.
    fn materialize(&mut self) {
        for i in 0..self.saved.len() {
            let bin = self.saved[i].bin as usize;
            let (start, len) = self.spans[bin];
            for d in 0..len {
                self.cells[(start as usize + d as usize) % self.n] = EMPTY;
            }
        }
        for i in 0..self.saved.len() {
            let bin = self.saved[i].bin as usize;
            self.write_bin(bin);
        }
    }

    fn write_bin(&mut self, bin: usize) {
        let (left, right) = self.helper_split(bin);
        let start = ((bin + left as usize) % self.n) as u32;
        let len = self.ell as u32 - left - right;
        self.spans[bin] = (start, len);
        let base = bin * (self.ell + 1);
        let mut cell = start as usize;
        for j in 0..self.fill[bin] as usize {
            let x = self.slots[base + j];
            if x < HELPER_LEFT {
                debug_assert_eq!(self.cells[cell], EMPTY);
                self.cells[cell] = x;
                cell = (cell + 1) % self.n;
            }
        }
    }

    fn find(&self, key: u64, choices: &[u32]) -> Option<u32> {
        for &j in choices {
            for d in 0..self.ell {
                let id = self.cells[(j as usize + d) % self.n];
                if id != EMPTY && self.ball(id).key == key {
                    return Some(id);
                }
            }
        }
        None
    }

    /// Value stored under `key`, probing at most `kℓ` cells.
    pub fn lookup(&self, key: u64) -> Option<&V> {
        self.find(key, &self.bins_of(key)).map(|id| &self.ball(id).value)
    }

    /// Like [`lookup`](Self::lookup) for a key inserted with explicit choices.
    pub fn lookup_with_choices(&self, key: u64, choices: &[u32]) -> Option<&V> {
        self.find(key, choices).map(|id| &self.ball(id).value)
    }

    pub fn insert(&mut self, key: u64, value: V) -> Result<InsertStats> {
        let choices = self.bins_of(key);
        self.insert_with_choices(key, value, &choices)
    }

    /// Inserts `key` with the given bin choices instead of its hashes. A
    /// table should use either this or [`insert`](Self::insert) throughout.
    pub fn insert_with_choices(&mut self, key: u64, value: V, choices: &[u32]) -> Result<InsertStats> {
        if choices.len() != self.k() || choices.iter().any(|&c| c as usize >= self.n) {
            return Err(Error::InvalidParams(format!("need {} bin choices below {}", self.k(), self.n)));
        }
        if self.find(key, choices).is_some() {
            return Err(Error::DuplicateKey(key));
        }
        if self.count == self.n {
            return Err(Error::TableFull(self.count));
        }
        let id = match self.free_ids.pop() {
            Some(id) => {
                let k = self.k();
                self.choices[id as usize * k..(id as usize + 1) * k].copy_from_slice(choices);
                id
            }
            None => {
                self.choices.extend_from_slice(choices);
                self.balls.push(None);
                (self.balls.len() - 1) as u32
            }
        };
        let first = choices.iter().map(|&c| (self.labels[c as usize], c as usize)).min().expect("k ≥ 1").1;
        self.balls[id as usize] = Some(Ball { key, value, bin: first as u32 });

        self.begin();
        let mut bin = first;
        let mut touches = 1u64;
        let success = self.labels[bin] as usize <= self.n && {
            self.push(bin, id);
            self.settle(&mut bin, &mut touches)
        };

        if success {
            self.materialize();
            self.count += 1;
        } else {
            self.rollback();
            self.balls[id as usize] = None;
            self.free_ids.push(id);
        }
        Ok(InsertStats { touches, success })
    }

    /// Evicts from overfull bins until every bin fits. Fails when a ball
    /// would have to enter a bin whose label exceeds `n`, when nothing in an
    /// overfull bin can move, or when the touch cap is hit.
    fn settle(&mut self, bin: &mut usize, touches: &mut u64) -> bool {
        loop {
            if self.fill[*bin] as usize <= self.ell {
                self.labels[*bin] = self.fresh_label(*bin);
                return true;
            }
            let mut pick: Option<(u32, usize, usize)> = None;
            for (pos, &x) in self.occupants(*bin).iter().enumerate() {
                if let Some((label, dest)) = self.best_alternative(*bin, x) {
                    if pick.is_none_or(|(l, _, _)| label < l) {
                        pick = Some((label, pos, dest));
                    }
                }
            }
            let Some((label, pos, dest)) = pick else { return false };
            if label as usize > self.n || *touches >= self.touch_cap {
                return false;
            }
            let x = self.remove_at(*bin, pos);
            self.labels[*bin] = self.fresh_label(*bin);
            let moved = match x {
                HELPER_LEFT => HELPER_RIGHT,
                HELPER_RIGHT => HELPER_LEFT,
                id => id,
            };
            self.push(dest, moved);
            *touches += 1;
            *bin = dest;
        }
    }

    /// Removes `key`; its bin's label drops to 0.
    pub fn delete(&mut self, key: u64) -> bool {
        let choices = self.bins_of(key);
        self.delete_with_choices(key, &choices)
    }

    pub fn delete_with_choices(&mut self, key: u64, choices: &[u32]) -> bool {
        let Some(id) = self.find(key, choices) else { return false };
        let bin = self.ball(id).bin as usize;
        let pos = self.occupants(bin).iter().position(|&x| x == id).expect("ball is in its bin");
        self.begin();
        self.remove_at(bin, pos);
        self.labels[bin] = 0;
        self.materialize();
        self.balls[id as usize] = None;
        self.free_ids.push(id);
        self.count -= 1;
        true
    }

    /// Audits capacities, separators, labels of non-full bins and the cell
    /// array against the bins.
    pub fn check_invariants(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidOrientation(msg));
        let mut stored = 0;
        for bin in 0..self.n {
            if self.fill[bin] as usize > self.ell {
                return bad(format!("bin {bin} holds {} > ℓ balls", self.fill[bin]));
            }
            let (_, right) = self.helper_split(bin);
            let (next_left, _) = self.helper_split(self.right(bin));
            if right + next_left != self.ell as u32 - 1 {
                return bad(format!("separator after bin {bin} holds {} helpers", right + next_left));
            }
            if (self.fill[bin] as usize) < self.ell && self.labels[bin] != 0 {
                return bad(format!("bin {bin} has room but label {}", self.labels[bin]));
            }
            let (left, right) = self.helper_split(bin);
            if self.spans[bin] != (((bin + left as usize) % self.n) as u32, self.ell as u32 - left - right) {
                return bad(format!("bin {bin} has a stale cell interval"));
            }
            for &x in self.occupants(bin) {
                if x < HELPER_LEFT {
                    stored += 1;
                    let ball = self.ball(x);
                    if ball.bin as usize != bin || !self.ball_choices(x).contains(&(bin as u32)) {
                        return bad(format!("ball {x} misfiled in bin {bin}"));
                    }
                }
            }
        }
        if stored != self.count {
            return bad(format!("{stored} stored balls but count {}", self.count));
        }
        let mut in_cells = 0;
        for (cell, &id) in self.cells.iter().enumerate() {
            if id == EMPTY {
                continue;
            }
            in_cells += 1;
            let bin = self.ball(id).bin as usize;
            let (start, len) = self.spans[bin];
            if (cell + self.n - start as usize) % self.n >= len as usize {
                return bad(format!("cell {cell} lies outside the interval of bin {bin}"));
            }
        }
        if in_cells != self.count {
            return bad(format!("{in_cells} occupied cells for {} keys", self.count));
        }
        Ok(())
    }

    /// Moves needed from each bin to reach a bin with room, following the
    /// "some occupant may move there" relation. `u32::MAX` if unreachable.
    pub fn distances(&self) -> Vec<u32> {
        let mut reverse: Vec<Vec<u32>> = vec![Vec::new(); self.n];
        for bin in 0..self.n {
            for &x in self.occupants(bin) {
                let targets: Vec<usize> = match x {
                    HELPER_LEFT => vec![self.left(bin)],
                    HELPER_RIGHT => vec![self.right(bin)],
                    id => self.ball_choices(id).iter().map(|&c| c as usize).filter(|&c| c != bin).collect(),
                };
                for t in targets {
                    reverse[t].push(bin as u32);
                }
            }
        }
        let mut dist = vec![INF; self.n];
        let mut queue = VecDeque::new();
        for (bin, d) in dist.iter_mut().enumerate() {
            if (self.fill[bin] as usize) < self.ell {
                *d = 0;
                queue.push_back(bin);
            }
        }
        while let Some(b) = queue.pop_front() {
            for &p in &reverse[b] {
                if dist[p as usize] == INF {
                    dist[p as usize] = dist[b] + 1;
                    queue.push_back(p as usize);
                }
            }
        }
        dist
    }

    /// Checks that no label exceeds the true distance to a bin with room.
    pub fn check_label_soundness(&self) -> Result<()> {
        for (bin, &d) in self.distances().iter().enumerate() {
            if self.labels[bin] > d {
                return Err(Error::InvalidOrientation(format!(
                    "bin {bin} has label {} above its distance {d}",
                    self.labels[bin]
                )));
            }
        }
        Ok(())
    }

    /// Line-based dump: a header, one `bin` line per bin and one `cell` line
    /// per occupied cell. Helpers print as `<` (from the left separator) and
    /// `>` (from the right one), keys as their value.
    pub fn snapshot(&self) -> String {
        let mut out = format!(
            "lsa n={} k={} ell={} count={}\n",
            self.n,
            self.params.k(),
            self.ell,
            self.count
        );
        for bin in 0..self.n {
            let (left, right) = self.helper_split(bin);
            let (start, len) = self.spans[bin];
            let _ = write!(out, "bin {bin} label={} s={left} t={right} cells={start}+{len} :", self.labels[bin]);
            for &x in self.occupants(bin) {
                match x {
                    HELPER_LEFT => out.push_str(" <"),
                    HELPER_RIGHT => out.push_str(" >"),
                    id => {
                        let _ = write!(out, " {}", self.ball(id).key);
                    }
                }
            }
            out.push('\n');
        }
        for (cell, &id) in self.cells.iter().enumerate() {
            if id != EMPTY {
                let _ = writeln!(out, "cell {cell} {}", self.ball(id).key);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(n: usize, k: u32, ell: u32) -> LsaTable<u64> {
        LsaTable::new(n, ModelParams::new(k, ell).unwrap(), 42).unwrap()
    }

    #[test]
    fn fresh_table_layout() {
        for ell in [2u32, 4] {
            let t = table(8, 2, ell);
            for b in 0..8 {
                assert_eq!(t.occupancy(b), ell as usize - 1);
                assert_eq!(t.helper_split(b), (0, ell - 1));
                assert_eq!(t.label(b), 0);
                assert_eq!(t.spans[b], (b as u32, 1));
            }
            t.check_invariants().unwrap();
        }
        assert!(LsaTable::<u64>::new(3, ModelParams::new(2, 2).unwrap(), 0).is_err());
    }

    #[test]
    fn first_insert_takes_smallest_choice() {
        let mut t = table(16, 2, 2);
        let stats = t.insert_with_choices(5, 50, &[9, 3]).unwrap();
        assert_eq!(stats, InsertStats { touches: 1, success: true });
        assert_eq!(t.ball(0).bin, 3);
        assert_eq!(t.lookup_with_choices(5, &[9, 3]), Some(&50));
        t.check_invariants().unwrap();
    }

    #[test]
    fn eviction_moves_a_helper() {
        let mut t = table(8, 2, 2);
        t.insert_with_choices(1, 1, &[2, 2]).unwrap();
        // Bin 2 is full; the second key must push its helper to bin 3.
        let stats = t.insert_with_choices(2, 2, &[2, 2]).unwrap();
        assert!(stats.success);
        assert_eq!(stats.touches, 2);
        assert_eq!(t.helper_split(2), (0, 0));
        assert_eq!(t.helper_split(3), (1, 1));
        assert_eq!(t.spans[2], (2, 2));
        t.check_invariants().unwrap();
        t.check_label_soundness().unwrap();
        assert_eq!(t.lookup_with_choices(1, &[2, 2]), Some(&1));
        assert_eq!(t.lookup_with_choices(2, &[2, 2]), Some(&2));
    }

    #[test]
    fn failure_restores_the_table() {
        // Bins 0 and 1 have room for four balls, one of them the helper
        // between them, so a fourth key choosing only these bins cannot fit.
        let mut t = table(6, 2, 2);
        for key in 0..3u64 {
            assert!(t.insert_with_choices(key, key, &[0, 1]).unwrap().success);
        }
        let before = t.snapshot();
        let stats = t.insert_with_choices(9, 9, &[1, 0]).unwrap();
        assert!(!stats.success);
        assert!(stats.touches > 1);
        assert_eq!(t.snapshot(), before);
        assert_eq!(t.len(), 3);
        t.check_invariants().unwrap();
        assert!(matches!(t.insert_with_choices(1, 1, &[0, 1]), Err(Error::DuplicateKey(1))));
        assert!(t.insert_with_choices(10, 10, &[0, 4]).unwrap().success);
    }

    #[test]
    fn hashed_insert_lookup_delete() {
        let mut t = table(1000, 2, 2);
        for key in 0..800u64 {
            assert!(t.insert(key, key * 3).unwrap().success, "key {key}");
        }
        t.check_invariants().unwrap();
        t.check_label_soundness().unwrap();
        for key in 0..800u64 {
            assert_eq!(t.lookup(key), Some(&(key * 3)));
        }
        assert_eq!(t.lookup(5000), None);
        assert!(t.delete(17));
        assert!(!t.delete(17));
        assert_eq!(t.lookup(17), None);
        t.check_invariants().unwrap();
        assert!(t.insert(17, 1).unwrap().success);
        assert_eq!(t.lookup(17), Some(&1));
        assert!(matches!(t.insert(17, 2), Err(Error::DuplicateKey(17))));
    }

    #[test]
    fn snapshot_format() {
        let mut t = table(4, 2, 2);
        t.insert_with_choices(7, 0, &[1, 1]).unwrap();
        let snap = t.snapshot();
        assert!(snap.starts_with("lsa n=4 k=2 ell=2 count=1\n"));
        assert!(snap.contains("bin 1 label=1 s=0 t=1 cells=1+1 : > 7\n"));
        assert!(snap.contains("cell 1 7\n"));
    }
}
