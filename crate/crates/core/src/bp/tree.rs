//! Sampler for the random rooted tree that `G_n` converges to locally.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::params::ModelParams;

/// Node classes of the incidence graph: helper edges, ordinary edges and
/// table vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    Helper,
    Ordinary,
    Vertex,
}

impl NodeKind {
    pub const ALL: [NodeKind; 3] = [NodeKind::Helper, NodeKind::Ordinary, NodeKind::Vertex];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn weight(self, ell: u32) -> u32 {
        match self {
            NodeKind::Helper => ell - 1,
            NodeKind::Ordinary => 1,
            NodeKind::Vertex => ell,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeNode {
    pub kind: NodeKind,
    pub weight: u32,
    pub depth: u32,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

/// A sampled tree truncated at some depth; node 0 is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitTree {
    pub nodes: Vec<TreeNode>,
}

impl LimitTree {
    pub fn root(&self) -> &TreeNode {
        &self.nodes[0]
    }

    /// `profile[d][kind]` = number of nodes of `kind` at distance `d`.
    pub fn depth_profile(&self, depth: u32) -> Vec<[u64; 3]> {
        let mut out = vec![[0u64; 3]; depth as usize + 1];
        for node in &self.nodes {
            out[node.depth as usize][node.kind.index()] += 1;
        }
        out
    }
}

/// Draws one tree truncated at `depth` (at most 8).
pub fn sample_limit_tree(params: ModelParams, c: f64, depth: u32, seed: u64) -> LimitTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_with(params, c, depth, None, &mut rng)
}

/// Draws a tree using `rng`; `root` fixes the root class instead of drawing
/// it with probabilities `(1, c, 1) / (2 + c)`.
pub fn sample_with<R: Rng + ?Sized>(
    params: ModelParams,
    c: f64,
    depth: u32,
    root: Option<NodeKind>,
    rng: &mut R,
) -> LimitTree {
    assert!(depth <= 8, "trees deeper than 8 are not supported");
    assert!(c > 0.0, "load must be positive");
    let ell = params.ell();
    let k = params.k() as usize;
    let degree = Poisson::new(params.k() as f64 * c).expect("positive rate");

    let root_kind = root.unwrap_or_else(|| {
        let u = rng.random::<f64>() * (2.0 + c);
        if u < 1.0 {
            NodeKind::Helper
        } else if u < 1.0 + c {
            NodeKind::Ordinary
        } else {
            NodeKind::Vertex
        }
    });
    let mut nodes = vec![TreeNode {
        kind: root_kind,
        weight: root_kind.weight(ell),
        depth: 0,
        parent: None,
        children: Vec::new(),
    }];

    let mut frontier = 0;
    while frontier < nodes.len() {
        let (kind, d, parent) = {
            let n = &nodes[frontier];
            (n.kind, n.depth, n.parent)
        };
        if d < depth {
            let is_root = parent.is_none();
            let parent_kind = parent.map(|p| nodes[p].kind);
            let mut kinds = Vec::new();
            match kind {
                NodeKind::Helper => kinds.extend(std::iter::repeat_n(NodeKind::Vertex, if is_root { 2 } else { 1 })),
                NodeKind::Ordinary => {
                    kinds.extend(std::iter::repeat_n(NodeKind::Vertex, if is_root { k } else { k - 1 }))
                }
                NodeKind::Vertex => {
                    let helpers = if parent_kind == Some(NodeKind::Helper) { 1 } else { 2 };
                    kinds.extend(std::iter::repeat_n(NodeKind::Helper, helpers));
                    let x = degree.sample(rng) as usize;
                    kinds.extend(std::iter::repeat_n(NodeKind::Ordinary, x));
                }
            }
            for ck in kinds {
                let id = nodes.len();
                nodes.push(TreeNode {
                    kind: ck,
                    weight: ck.weight(ell),
                    depth: d + 1,
                    parent: Some(frontier),
                    children: Vec::new(),
                });
                nodes[frontier].children.push(id);
            }
        }
        frontier += 1;
    }
    LimitTree { nodes }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn helper_root_has_two_vertex_children() {
        let p = ModelParams::new(3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let t = sample_with(p, 0.9, 1, Some(NodeKind::Helper), &mut rng);
            assert_eq!(t.root().children.len(), 2);
            assert!(t.nodes[1..].iter().all(|n| n.kind == NodeKind::Vertex && n.weight == 2));
            assert_eq!(t.root().weight, 1);
        }
    }

    #[test]
    fn child_rules_hold_at_depth_four() {
        let p = ModelParams::new(3, 3).unwrap();
        for seed in 0..50 {
            let t = sample_limit_tree(p, 0.8, 4, seed);
            for (i, n) in t.nodes.iter().enumerate() {
                if n.depth == 4 {
                    assert!(n.children.is_empty());
                    continue;
                }
                let kinds: Vec<_> = n.children.iter().map(|&c| t.nodes[c].kind).collect();
                let count = |k: NodeKind| kinds.iter().filter(|&&x| x == k).count();
                match (n.kind, i == 0) {
                    (NodeKind::Helper, true) => assert_eq!(kinds, vec![NodeKind::Vertex; 2]),
                    (NodeKind::Helper, false) => assert_eq!(kinds, vec![NodeKind::Vertex]),
                    (NodeKind::Ordinary, true) => assert_eq!(kinds, vec![NodeKind::Vertex; 3]),
                    (NodeKind::Ordinary, false) => assert_eq!(kinds, vec![NodeKind::Vertex; 2]),
                    (NodeKind::Vertex, root) => {
                        let from_helper = !root && t.nodes[n.parent.unwrap()].kind == NodeKind::Helper;
                        assert_eq!(count(NodeKind::Helper), if from_helper { 1 } else { 2 });
                        assert_eq!(count(NodeKind::Vertex), 0);
                    }
                }
            }
        }
    }

    #[test]
    fn root_type_frequencies() {
        let p = ModelParams::new(2, 2).unwrap();
        let c = 0.9;
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let trials = 1_000_000;
        let mut counts = [0u64; 3];
        for _ in 0..trials {
            counts[sample_with(p, c, 0, None, &mut rng).root().kind.index()] += 1;
        }
        for (kind, weight) in [(NodeKind::Helper, 1.0), (NodeKind::Ordinary, c), (NodeKind::Vertex, 1.0)] {
            let pr = weight / (2.0 + c);
            let se = (pr * (1.0 - pr) / trials as f64).sqrt();
            let freq = counts[kind.index()] as f64 / trials as f64;
            assert!((freq - pr).abs() < 3.0 * se, "{kind:?}: {freq} vs {pr}");
        }
    }
}
