//! Deletion cascades after interdiction and follower sets.

use serde_json::json;

use crate::error::{Error, Result};
use crate::graph::{induced_subgraph, kcore, Graph, NodeSet};

/// A Collapsed k-Core instance: a graph, the degree threshold `k`, and the
/// interdiction budget `b`.
#[derive(Debug, Clone)]
pub struct Instance {
    pub graph: Graph,
    pub k: u32,
    pub b: usize,
}

impl Instance {
    pub fn new(graph: Graph, k: u32, b: usize) -> Result<Instance> {
        if b > graph.n() {
            return Err(Error::BudgetTooLarge { b, n: graph.n() });
        }
        Ok(Instance { graph, k, b })
    }

    /// True when the graph equals its own k-core.
    pub fn is_preprocessed(&self) -> bool {
        kcore(&self.graph, self.k).card() == self.graph.n()
    }

    /// Replace the graph by its k-core (the paper's pre-processing step).
    /// Fails if the budget exceeds the surviving node count.
    pub fn preprocess(&self) -> Result<Instance> {
        let core = kcore(&self.graph, self.k);
        let g = induced_subgraph(&self.graph, &core)?;
        Instance::new(g, self.k, self.b)
    }
}

/// Per-round record of a cascade: which round each node left in
/// (0 = interdicted, t >= 1 = left at round t, `None` = survives).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CascadeTrace {
    pub removed_at: Vec<Option<u32>>,
    pub rounds: u32,
    pub survivors: NodeSet,
}

impl CascadeTrace {
    /// Nodes leaving at round `t >= 1`, ascending.
    pub fn leavers_at(&self, t: u32) -> Vec<u32> {
        (0..self.removed_at.len() as u32)
            .filter(|&v| self.removed_at[v as usize] == Some(t))
            .collect()
    }

    pub fn interdicted(&self) -> Vec<u32> {
        self.leavers_at(0)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rounds: Vec<Vec<u32>> = (1..=self.rounds).map(|t| self.leavers_at(t)).collect();
        json!({
            "interdicted": self.interdicted(),
            "rounds": rounds,
            "survivors": self.survivors.to_vec(),
        })
    }
}

/// Reusable scratch buffers for repeated peeling passes.
#[derive(Debug)]
pub(crate) struct Peeler {
    deg: Vec<i64>,
    removed: Vec<bool>,
    stack: Vec<u32>,
}

impl Peeler {
    pub(crate) fn new(n: usize) -> Peeler {
        Peeler {
            deg: vec![0; n],
            removed: vec![false; n],
            stack: Vec::with_capacity(n),
        }
    }

    /// Peel `g` down to its k-core after removing `seeds`; `self.removed`
    /// afterwards flags every node outside the surviving core. Returns the
    /// survivor count.
    pub(crate) fn survivors_after<I>(&mut self, g: &Graph, k: u32, seeds: I) -> usize
    where
        I: IntoIterator<Item = u32>,
    {
        let n = g.n();
        self.stack.clear();
        for v in 0..n as u32 {
            self.deg[v as usize] = g.degree(v) as i64;
            self.removed[v as usize] = false;
        }
        for s in seeds {
            if !self.removed[s as usize] {
                self.removed[s as usize] = true;
                self.stack.push(s);
            }
        }
        let mut alive = n - self.stack.len();
        // seed removals first, then threshold peeling
        let mut i = 0;
        while i < self.stack.len() {
            let v = self.stack[i];
            i += 1;
            for &u in g.neighbors(v) {
                if !self.removed[u as usize] {
                    self.deg[u as usize] -= 1;
                    if self.deg[u as usize] < k as i64 {
                        self.removed[u as usize] = true;
                        self.stack.push(u);
                        alive -= 1;
                    }
                }
            }
        }
        // initial peel of nodes already below k (non-preprocessed graphs)
        for v in 0..n as u32 {
            if !self.removed[v as usize] && self.deg[v as usize] < k as i64 {
                self.removed[v as usize] = true;
                self.stack.push(v);
                alive -= 1;
                let mut j = self.stack.len() - 1;
                while j < self.stack.len() {
                    let x = self.stack[j];
                    j += 1;
                    for &u in g.neighbors(x) {
                        if !self.removed[u as usize] {
                            self.deg[u as usize] -= 1;
                            if self.deg[u as usize] < k as i64 {
                                self.removed[u as usize] = true;
                                self.stack.push(u);
                                alive -= 1;
                            }
                        }
                    }
                }
            }
        }
        alive
    }

    pub(crate) fn removed(&self) -> &[bool] {
        &self.removed
    }
}

/// Simulate the cascade after interdicting `w`. Rounds are synchronous: all
/// nodes whose degree among round-(t-1) survivors is below k leave together
/// at round t. The survivor set equals `kcore(G \ w, k)` regardless of order.
pub fn collapse(inst: &Instance, w: &NodeSet) -> CascadeTrace {
    let g = &inst.graph;
    let k = inst.k as i64;
    let n = g.n();
    let mut removed_at: Vec<Option<u32>> = vec![None; n];
    let mut deg: Vec<i64> = (0..n as u32).map(|v| g.degree(v) as i64).collect();

    let mut frontier: Vec<u32> = Vec::new();
    for v in w.iter() {
        removed_at[v as usize] = Some(0);
        frontier.push(v);
    }
    for &v in &frontier {
        for &u in g.neighbors(v) {
            if removed_at[u as usize].is_none() {
                deg[u as usize] -= 1;
            }
        }
    }

    let mut round = 0u32;
    loop {
        let next: Vec<u32> = (0..n as u32)
            .filter(|&v| removed_at[v as usize].is_none() && deg[v as usize] < k)
            .collect();
        if next.is_empty() {
            break;
        }
        round += 1;
        for &v in &next {
            removed_at[v as usize] = Some(round);
        }
        for &v in &next {
            for &u in g.neighbors(v) {
                if removed_at[u as usize].is_none() {
                    deg[u as usize] -= 1;
                }
            }
        }
    }

    let survivors = NodeSet::from_iter(
        n,
        (0..n as u32).filter(|&v| removed_at[v as usize].is_none()),
    );
    CascadeTrace {
        removed_at,
        rounds: round,
        survivors,
    }
}

/// The follower set J_u: all nodes outside the k-core once `u` is removed
/// (including `u` itself on preprocessed instances).
pub fn followers(inst: &Instance, u: u32) -> NodeSet {
    let mut peeler = Peeler::new(inst.graph.n());
    followers_with(&mut peeler, inst, [u])
}

/// The follower set J_S of a whole set.
pub fn followers_set(inst: &Instance, s: &NodeSet) -> NodeSet {
    let mut peeler = Peeler::new(inst.graph.n());
    followers_with(&mut peeler, inst, s.iter())
}

fn followers_with<I>(peeler: &mut Peeler, inst: &Instance, seeds: I) -> NodeSet
where
    I: IntoIterator<Item = u32>,
{
    peeler.survivors_after(&inst.graph, inst.k, seeds);
    NodeSet::from_iter(
        inst.graph.n(),
        (0..inst.graph.n() as u32).filter(|&v| peeler.removed()[v as usize]),
    )
}

/// J_u for every node, one peeling pass each. Requires a preprocessed
/// instance; the inequalities of the cut machinery are stated on the k-core.
pub fn followers_table(inst: &Instance) -> Result<Vec<NodeSet>> {
    if !inst.is_preprocessed() {
        return Err(Error::NotPreprocessed(inst.k));
    }
    let n = inst.graph.n();
    let mut peeler = Peeler::new(n);
    let mut table = Vec::with_capacity(n);
    for u in 0..n as u32 {
        table.push(followers_with(&mut peeler, inst, [u]));
    }
    Ok(table)
}
