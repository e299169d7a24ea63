use crate::error::{Error, Result};
use crate::models::{EdgeKind, Orientation, WeightedHypergraph};

const NONE: u32 = u32::MAX;
const HELPER_BIT: u32 = 1 << 31;

#[derive(Debug, Clone, Copy, Default)]
struct Visit {
    stamp: u32,
    from: u32,
    via: u32,
}

#[derive(Debug, Clone, Copy)]
enum Slot {
    Helper(u32),
    Ordinary(u32),
}

/// A maximum allocation of the edges inserted so far.
///
/// Helper edges are fixed at construction and start fully at their first
/// vertex. Ordinary edges arrive through [`add_edge`](Self::add_edge); each
/// is either assigned to one of its vertices or left pending.
#[derive(Debug, Clone)]
pub struct AllocationState {
    n: usize,
    capacity: u32,
    load: Vec<u32>,
    helper_ends: Vec<[u32; 2]>,
    helper_amount: Vec<[u32; 2]>,
    /// CSR list of `(helper id << 1) | side` per vertex.
    helper_adj_start: Vec<u32>,
    helper_adj: Vec<u32>,
    choice_start: Vec<u32>,
    choices: Vec<u32>,
    assigned: Vec<u32>,
    /// Position of each assigned ordinary edge inside its vertex's slots.
    position: Vec<u32>,
    /// `capacity` slots per vertex; the first `occupied[v]` are in use.
    occupants: Vec<u32>,
    occupied: Vec<u32>,
    slots: Vec<Slot>,
    assigned_demand: u64,
    total_demand: u64,
    scratch: Vec<Visit>,
    epoch: u32,
    queue: Vec<u32>,
    work: u64,
}

impl AllocationState {
    /// State holding the helper edges of `h`, each routed to its first
    /// vertex. Ordinary edges of `h` are ignored.
    pub fn init_state(h: &WeightedHypergraph) -> Result<Self> {
        h.validate()?;
        let n = h.n;
        let mut load = vec![0u32; n];
        let mut helper_ends = Vec::new();
        let mut helper_amount = Vec::new();
        let mut slots = Vec::new();
        let mut total_demand = 0u64;
        for e in h.edges.iter().filter(|e| e.kind == EdgeKind::Helper) {
            let (a, b) = (e.vertices[0], e.vertices[1]);
            load[a as usize] += e.weight;
            if load[a as usize] > h.vertex_weight {
                return Err(Error::InvalidInstance(format!("helpers overload vertex {a}")));
            }
            slots.push(Slot::Helper(helper_ends.len() as u32));
            helper_ends.push([a, b]);
            helper_amount.push([e.weight, 0]);
            total_demand += e.weight as u64;
        }
        let mut degree = vec![0u32; n + 1];
        for &[a, b] in &helper_ends {
            degree[a as usize + 1] += 1;
            if b != a {
                degree[b as usize + 1] += 1;
            }
        }
        for v in 0..n {
            degree[v + 1] += degree[v];
        }
        let mut fill = degree.clone();
        let mut helper_adj = vec![0u32; degree[n] as usize];
        for (id, &[a, b]) in helper_ends.iter().enumerate() {
            helper_adj[fill[a as usize] as usize] = (id as u32) << 1;
            fill[a as usize] += 1;
            if b != a {
                helper_adj[fill[b as usize] as usize] = ((id as u32) << 1) | 1;
                fill[b as usize] += 1;
            }
        }
        Ok(AllocationState {
            n,
            capacity: h.vertex_weight,
            assigned_demand: total_demand,
            load,
            helper_ends,
            helper_amount,
            helper_adj_start: degree,
            helper_adj,
            choice_start: vec![0],
            choices: Vec::new(),
            assigned: Vec::new(),
            position: Vec::new(),
            occupants: vec![NONE; n * h.vertex_weight as usize],
            occupied: vec![0; n],
            slots,
            total_demand,
            scratch: vec![Visit::default(); n],
            epoch: 0,
            queue: Vec::new(),
            work: 0,
        })
    }

    /// Builds the state for the whole of `h`, inserting its ordinary edges in
    /// order. Slot order follows `h`, so extracted orientations line up.
    pub fn from_graph(h: &WeightedHypergraph) -> Result<Self> {
        let mut state = Self::init_state(h)?;
        state.slots.clear();
        let mut helper = 0u32;
        for e in &h.edges {
            match e.kind {
                EdgeKind::Helper => {
                    state.slots.push(Slot::Helper(helper));
                    helper += 1;
                }
                EdgeKind::Ordinary => {
                    if e.weight != 1 {
                        return Err(Error::InvalidInstance("ordinary edges must have demand 1".into()));
                    }
                    state.insert(&e.vertices);
                }
            }
        }
        Ok(state)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn assigned_demand(&self) -> u64 {
        self.assigned_demand
    }

    pub fn total_demand(&self) -> u64 {
        self.total_demand
    }

    pub fn gap(&self) -> u64 {
        self.total_demand - self.assigned_demand
    }

    pub fn is_saturated(&self) -> bool {
        self.gap() == 0
    }

    pub fn residual(&self, v: usize) -> u32 {
        self.capacity - self.load[v]
    }

    /// Vertices expanded by all searches so far.
    pub fn search_work(&self) -> u64 {
        self.work
    }

    pub fn ordinary_count(&self) -> usize {
        self.assigned.len()
    }

    /// Vertex the `i`-th inserted ordinary edge is assigned to, if any.
    pub fn assignment(&self, i: usize) -> Option<u32> {
        Some(self.assigned[i]).filter(|&v| v != NONE)
    }

    /// Inserts an ordinary edge with the given choices and tries to assign
    /// it; returns whether it was assigned. A pending edge stays part of the
    /// instance and counts toward the gap.
    ///
    /// # Panics
    /// If the edge is empty or a choice is out of range.
    pub fn add_edge(&mut self, vertices: &[u32]) -> bool {
        self.insert(vertices)
    }

    fn insert(&mut self, vertices: &[u32]) -> bool {
        assert!(!vertices.is_empty(), "edge needs at least one vertex");
        assert!(
            vertices.iter().all(|&v| (v as usize) < self.n),
            "edge vertex out of range 0..{}",
            self.n
        );
        let id = self.assigned.len() as u32;
        self.choices.extend_from_slice(vertices);
        self.choice_start.push(self.choices.len() as u32);
        self.assigned.push(NONE);
        self.position.push(NONE);
        self.total_demand += 1;
        self.slots.push(Slot::Ordinary(id));
        match self.find_path(id) {
            Some(end) => {
                let start = self.augment(end);
                self.place(id, start);
                self.assigned_demand += 1;
                true
            }
            None => false,
        }
    }

    fn choices_of(&self, e: u32) -> &[u32] {
        &self.choices[self.choice_start[e as usize] as usize..self.choice_start[e as usize + 1] as usize]
    }

    fn next_epoch(&mut self) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.scratch.fill(Visit::default());
            self.epoch = 1;
        }
    }

    /// Breadth-first search from the choices of `e` to a vertex with spare
    /// capacity. Returns that vertex; predecessors are left in scratch.
    fn find_path(&mut self, e: u32) -> Option<u32> {
        self.next_epoch();
        self.queue.clear();
        let epoch = self.epoch;
        let range = self.choice_start[e as usize] as usize..self.choice_start[e as usize + 1] as usize;
        for i in range {
            let v = self.choices[i];
            if self.scratch[v as usize].stamp == epoch {
                continue;
            }
            self.scratch[v as usize] = Visit { stamp: epoch, from: NONE, via: 0 };
            if self.load[v as usize] < self.capacity {
                return Some(v);
            }
            self.queue.push(v);
        }
        let mut head = 0;
        while head < self.queue.len() {
            let v = self.queue[head];
            head += 1;
            self.work += 1;
            let base = v as usize * self.capacity as usize;
            for slot in base..base + self.occupied[v as usize] as usize {
                let o = self.occupants[slot];
                let range = self.choice_start[o as usize] as usize..self.choice_start[o as usize + 1] as usize;
                for i in range {
                    let u = self.choices[i];
                    if let Some(end) = self.visit(u, v, o) {
                        return Some(end);
                    }
                }
            }
            let adj = self.helper_adj_start[v as usize] as usize..self.helper_adj_start[v as usize + 1] as usize;
            for i in adj {
                let entry = self.helper_adj[i];
                let (h, side) = ((entry >> 1) as usize, (entry & 1) as usize);
                if self.helper_amount[h][side] == 0 {
                    continue;
                }
                let u = self.helper_ends[h][1 - side];
                if let Some(end) = self.visit(u, v, HELPER_BIT | h as u32) {
                    return Some(end);
                }
            }
        }
        None
    }

    fn visit(&mut self, u: u32, from: u32, mv: u32) -> Option<u32> {
        let ui = u as usize;
        if self.scratch[ui].stamp == self.epoch {
            return None;
        }
        self.scratch[ui] = Visit { stamp: self.epoch, from, via: mv };
        if self.load[ui] < self.capacity {
            return Some(u);
        }
        self.queue.push(u);
        None
    }

    /// Shifts one unit along the predecessor chain ending at `end`; returns
    /// the chain's first vertex, which now has one unit of spare capacity.
    fn augment(&mut self, end: u32) -> u32 {
        let mut u = end;
        loop {
            let Visit { from, via: mv, .. } = self.scratch[u as usize];
            if from == NONE {
                return u;
            }
            if mv & HELPER_BIT != 0 {
                let h = (mv & !HELPER_BIT) as usize;
                let side = if self.helper_ends[h][0] == from { 0 } else { 1 };
                self.helper_amount[h][side] -= 1;
                self.helper_amount[h][1 - side] += 1;
                self.load[from as usize] -= 1;
                self.load[u as usize] += 1;
            } else {
                self.unplace(mv);
                self.place(mv, u);
            }
            u = from;
        }
    }

    fn place(&mut self, e: u32, v: u32) {
        let vi = v as usize;
        let pos = self.occupied[vi];
        self.assigned[e as usize] = v;
        self.position[e as usize] = pos;
        self.occupants[vi * self.capacity as usize + pos as usize] = e;
        self.occupied[vi] += 1;
        self.load[vi] += 1;
    }

    fn unplace(&mut self, e: u32) {
        let v = self.assigned[e as usize] as usize;
        let base = v * self.capacity as usize;
        let pos = self.position[e as usize] as usize;
        let last = self.occupied[v] as usize - 1;
        let moved = self.occupants[base + last];
        self.occupants[base + pos] = moved;
        self.occupants[base + last] = NONE;
        self.position[moved as usize] = pos as u32;
        self.occupied[v] -= 1;
        self.assigned[e as usize] = NONE;
        self.position[e as usize] = NONE;
        self.load[v] -= 1;
    }

    /// The current allocation, indexed like the graph the state was built
    /// from (helpers and ordinary edges in their original order, followed by
    /// edges added later).
    pub fn allocation(&self) -> Orientation {
        let mut out = Orientation::with_edges(self.slots.len());
        for (i, slot) in self.slots.iter().enumerate() {
            match *slot {
                Slot::Helper(h) => {
                    let [a, b] = self.helper_ends[h as usize];
                    let [x, y] = self.helper_amount[h as usize];
                    out.add(i, a, x);
                    out.add(i, b, y);
                }
                Slot::Ordinary(o) => {
                    if let Some(v) = self.assignment(o as usize) {
                        out.add(i, v, 1);
                    }
                }
            }
        }
        out
    }

    /// The orientation of a saturated state.
    pub fn extract_orientation(&self) -> Result<Orientation> {
        match self.gap() {
            0 => Ok(self.allocation()),
            gap => Err(Error::Unsaturated { gap }),
        }
    }

    /// Checks internal bookkeeping: loads match assignments and respect
    /// capacities, helper amounts sum to their demand.
    pub fn check_invariants(&self) -> Result<()> {
        let mut load = vec![0u32; self.n];
        for (h, &[a, b]) in self.helper_ends.iter().enumerate() {
            load[a as usize] += self.helper_amount[h][0];
            load[b as usize] += self.helper_amount[h][1];
        }
        let mut assigned = 0u64;
        for (e, &v) in self.assigned.iter().enumerate() {
            if v != NONE {
                if !self.choices_of(e as u32).contains(&v) {
                    return Err(Error::InvalidOrientation(format!("edge {e} assigned outside its choices")));
                }
                load[v as usize] += 1;
                assigned += 1;
            }
        }
        let helper_total: u64 = self.helper_amount.iter().map(|a| (a[0] + a[1]) as u64).sum();
        if load != self.load {
            return Err(Error::InvalidOrientation("load bookkeeping drifted".into()));
        }
        if load.iter().any(|&l| l > self.capacity) {
            return Err(Error::InvalidOrientation("capacity exceeded".into()));
        }
        if assigned + helper_total != self.assigned_demand {
            return Err(Error::InvalidOrientation("assigned demand drifted".into()));
        }
        Ok(())
    }
}

/// `M(H)`: the largest total demand that fits.
pub fn max_allocation(h: &WeightedHypergraph) -> Result<u64> {
    Ok(AllocationState::from_graph(h)?.assigned_demand())
}

/// Total demand minus `M(H)`.
pub fn gap(h: &WeightedHypergraph) -> Result<u64> {
    Ok(AllocationState::from_graph(h)?.gap())
}

pub fn is_orientable(h: &WeightedHypergraph) -> Result<bool> {
    Ok(gap(h)? == 0)
}
