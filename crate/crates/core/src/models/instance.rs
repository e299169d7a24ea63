use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::hypergraph::{Edge, WeightedHypergraph};
use super::translate::WindowsPair;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Windows,
    Blocks,
    Plain,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Windows => "windows",
            Scheme::Blocks => "blocks",
            Scheme::Plain => "plain",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "windows" => Ok(Scheme::Windows),
            "blocks" => Ok(Scheme::Blocks),
            "plain" => Ok(Scheme::Plain),
            other => Err(Error::InvalidParams(format!("unknown scheme `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub scheme: Scheme,
    pub n: usize,
    pub m: usize,
    pub k: u32,
    pub ell: u32,
    pub seed: u64,
}

impl InstanceSpec {
    pub fn new(scheme: Scheme, n: usize, m: usize, k: u32, ell: u32, seed: u64) -> Result<Self> {
        let spec = InstanceSpec { scheme, n, m, k, ell, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.ell == 0 {
            return Err(Error::InvalidParams(format!("k = {} and ℓ = {} must be positive", self.k, self.ell)));
        }
        if self.k > 64 || self.ell > 64 {
            return Err(Error::InvalidParams(format!("k = {} or ℓ = {} exceeds 64", self.k, self.ell)));
        }
        if self.n < 2 * self.ell as usize {
            return Err(Error::InvalidParams(format!("n = {} must be at least 2ℓ = {}", self.n, 2 * self.ell)));
        }
        if self.n > u32::MAX as usize / 2 {
            return Err(Error::InvalidParams(format!("n = {} is too large", self.n)));
        }
        if self.scheme == Scheme::Blocks && self.n % self.ell as usize != 0 {
            return Err(Error::InvalidParams(format!("blocks need ℓ = {} to divide n = {}", self.ell, self.n)));
        }
        Ok(())
    }

    /// Number of values a single choice ranges over.
    pub fn choice_range(&self) -> usize {
        match self.scheme {
            Scheme::Blocks => self.n / self.ell as usize,
            Scheme::Windows | Scheme::Plain => self.n,
        }
    }

    pub fn load(&self) -> f64 {
        self.m as f64 / self.n as f64
    }

    /// Unbounded stream of edges; the first `m` items are the instance's edges.
    pub fn edge_stream(&self) -> EdgeStream {
        EdgeStream::new(self.seed, self.choice_range() as u32, self.k)
    }
}

/// Infinite seeded source of `k`-tuples of uniform choices in `0..range`.
#[derive(Debug, Clone)]
pub struct EdgeStream {
    rng: ChaCha8Rng,
    range: u32,
    k: u32,
}

impl EdgeStream {
    pub fn new(seed: u64, range: u32, k: u32) -> Self {
        assert!(range > 0, "choice range must be positive");
        EdgeStream { rng: ChaCha8Rng::seed_from_u64(seed), range, k }
    }

    /// Writes the next edge's choices into `out`, replacing its contents.
    pub fn next_into(&mut self, out: &mut Vec<u32>) {
        out.clear();
        for _ in 0..self.k {
            out.push(self.rng.random_range(0..self.range));
        }
    }
}

impl Iterator for EdgeStream {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let mut e = Vec::with_capacity(self.k as usize);
        self.next_into(&mut e);
        Some(e)
    }
}

/// A generated instance: the spec and the `m` drawn choice tuples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub spec: InstanceSpec,
    pub edges: Vec<Vec<u32>>,
}

impl Instance {
    pub fn generate(spec: InstanceSpec) -> Result<Self> {
        spec.validate()?;
        let edges = spec.edge_stream().take(spec.m).collect();
        Ok(Instance { spec, edges })
    }

    /// Builds an instance from explicit choices, checking them against the spec.
    pub fn from_edges(spec: InstanceSpec, edges: Vec<Vec<u32>>) -> Result<Self> {
        spec.validate()?;
        let range = spec.choice_range();
        if edges.len() != spec.m {
            return Err(Error::InvalidInstance(format!("{} edges but m = {}", edges.len(), spec.m)));
        }
        for (i, e) in edges.iter().enumerate() {
            if e.len() != spec.k as usize {
                return Err(Error::InvalidInstance(format!("edge {i} has {} choices, k = {}", e.len(), spec.k)));
            }
            if let Some(v) = e.iter().find(|&&v| v as usize >= range) {
                return Err(Error::InvalidInstance(format!("edge {i} choice {v} out of range {range}")));
            }
        }
        Ok(Instance { spec, edges })
    }

    /// `(W, Ŵ)` for the windows scheme.
    pub fn windows(&self) -> Result<WindowsPair> {
        if self.spec.scheme != Scheme::Windows {
            return Err(Error::InvalidParams(format!("scheme is {}, not windows", self.spec.scheme)));
        }
        Ok(WindowsPair::build(self.spec.n, self.spec.ell, &self.edges))
    }

    /// `B̂`: `n/ℓ` vertices of capacity `ℓ`, one unit-demand edge per tuple.
    pub fn blocks(&self) -> Result<WeightedHypergraph> {
        if self.spec.scheme != Scheme::Blocks {
            return Err(Error::InvalidParams(format!("scheme is {}, not blocks", self.spec.scheme)));
        }
        Ok(self.unit_graph(self.spec.n / self.spec.ell as usize, self.spec.ell))
    }

    /// The plain k-ary instance: `n` vertices of capacity 1.
    pub fn plain(&self) -> Result<WeightedHypergraph> {
        if self.spec.scheme != Scheme::Plain {
            return Err(Error::InvalidParams(format!("scheme is {}, not plain", self.spec.scheme)));
        }
        Ok(self.unit_graph(self.spec.n, 1))
    }

    /// The hypergraph the flow engine works on for this scheme.
    pub fn flow_graph(&self) -> Result<WeightedHypergraph> {
        match self.spec.scheme {
            Scheme::Windows => Ok(self.windows()?.w_hat),
            Scheme::Blocks => self.blocks(),
            Scheme::Plain => self.plain(),
        }
    }

    fn unit_graph(&self, vertices: usize, capacity: u32) -> WeightedHypergraph {
        let mut h = WeightedHypergraph::new(vertices, capacity);
        h.edges = self.edges.iter().map(|e| Edge::ordinary(e.clone())).collect();
        h
    }

    pub fn to_text(&self) -> String {
        let s = &self.spec;
        let mut out = format!(
            "instance scheme={} n={} m={} k={} ell={} seed={}\n",
            s.scheme, s.n, s.m, s.k, s.ell, s.seed
        );
        for e in &self.edges {
            out.push('e');
            for v in e {
                out.push(' ');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing header".into() })?;
        let spec = parse_header(hline, header)?;
        let mut edges = Vec::with_capacity(spec.m);
        for (line, l) in lines {
            let mut parts = l.split_whitespace();
            if parts.next() != Some("e") {
                return Err(Error::Parse { line, msg: "expected an `e` line".into() });
            }
            let e = parts
                .map(|t| t.parse::<u32>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|err| Error::Parse { line, msg: err.to_string() })?;
            edges.push(e);
        }
        Instance::from_edges(spec, edges)
    }
}

fn parse_header(line: usize, header: &str) -> Result<InstanceSpec> {
    let err = |msg: String| Error::Parse { line, msg };
    let mut parts = header.split_whitespace();
    if parts.next() != Some("instance") {
        return Err(err("header must start with `instance`".into()));
    }
    let (mut scheme, mut n, mut m, mut k, mut ell, mut seed) = (None, None, None, None, None, None);
    for part in parts {
        let (key, value) = part.split_once('=').ok_or_else(|| err(format!("bad field `{part}`")))?;
        let num = || value.parse::<u64>().map_err(|e| err(format!("{key}: {e}")));
        match key {
            "scheme" => scheme = Some(value.parse::<Scheme>().map_err(|e| err(e.to_string()))?),
            "n" => n = Some(num()? as usize),
            "m" => m = Some(num()? as usize),
            "k" => k = Some(num()? as u32),
            "ell" => ell = Some(num()? as u32),
            "seed" => seed = Some(num()?),
            other => return Err(err(format!("unknown field `{other}`"))),
        }
    }
    let missing = |name: &str| err(format!("missing field `{name}`"));
    Ok(InstanceSpec {
        scheme: scheme.ok_or_else(|| missing("scheme"))?,
        n: n.ok_or_else(|| missing("n"))?,
        m: m.ok_or_else(|| missing("m"))?,
        k: k.ok_or_else(|| missing("k"))?,
        ell: ell.ok_or_else(|| missing("ell"))?,
        seed: seed.ok_or_else(|| missing("seed"))?,
    })
}

/// Generates the coupled pair `(W, Ŵ)`.
pub fn gen_windows(spec: InstanceSpec) -> Result<WindowsPair> {
    Instance::generate(spec)?.windows()
}

/// Generates `B̂`.
pub fn gen_blocks(spec: InstanceSpec) -> Result<WeightedHypergraph> {
    Instance::generate(spec)?.blocks()
}
