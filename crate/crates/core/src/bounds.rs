//! Combinatorial lower bound from the (k+b)-core and the greedy incumbent.

use crate::cascade::{collapse, Instance};
use crate::error::{Error, Result};
use crate::graph::{kcore, Graph, NodeSet};

/// Lower-bound data derived from the (k+b)-core.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundInfo {
    /// Valid lower bound on the optimal surviving-core size: max(0, |(k+b)-core| - b).
    pub m: usize,
    /// h = k + b.
    pub h: u32,
    pub hcore_size: usize,
    /// Tightened deletion-round horizon n - b - m.
    pub tightened_t: usize,
}

/// Even after removing any b nodes from the (k+b)-core, the remainder is a
/// k-subcore, so its size less b bounds the optimum from below (clamped at 0).
pub fn lower_bound_m(inst: &Instance) -> Result<BoundInfo> {
    if !inst.is_preprocessed() {
        return Err(Error::NotPreprocessed(inst.k));
    }
    let h = inst.k + inst.b as u32;
    let hcore_size = kcore(&inst.graph, h).card();
    let m = hcore_size.saturating_sub(inst.b);
    Ok(BoundInfo {
        m,
        h,
        hcore_size,
        tightened_t: inst.graph.n() - inst.b - m,
    })
}

/// Greedy incumbent: b rounds of removing the node with the largest current
/// follower set (ties to the lowest id), re-peeling the residual core after
/// each pick. Returns the picked set and its cascade value.
pub fn greedy_upper_bound(inst: &Instance) -> Result<(NodeSet, usize)> {
    if !inst.is_preprocessed() {
        return Err(Error::NotPreprocessed(inst.k));
    }
    let g = &inst.graph;
    let n = g.n();
    let mut picked = NodeSet::new(n);
    let mut alive = NodeSet::full(n);

    for _ in 0..inst.b {
        if alive.is_empty() {
            break;
        }
        let mut best: Option<(usize, u32)> = None;
        for u in alive.iter() {
            let ju = followers_within(g, inst.k, &alive, u);
            let cand = (ju, u);
            best = Some(match best {
                None => cand,
                Some(cur) => {
                    if cand.0 > cur.0 || (cand.0 == cur.0 && cand.1 < cur.1) {
                        cand
                    } else {
                        cur
                    }
                }
            });
        }
        let (_, pick) = best.unwrap();
        picked.insert(pick);
        alive = residual_core(g, inst.k, &alive, pick);
    }
    // pad deterministically if the core emptied before the budget ran out
    let mut v = 0u32;
    while picked.card() < inst.b {
        if !picked.contains(v) {
            picked.insert(v);
        }
        v += 1;
    }
    let value = collapse(inst, &picked).survivors.card();
    Ok((picked, value))
}

/// |J_u| measured inside the subgraph induced by `alive`.
fn followers_within(g: &Graph, k: u32, alive: &NodeSet, u: u32) -> usize {
    alive.card() - residual_core(g, k, alive, u).card()
}

/// k-core of the subgraph induced by `alive` minus `u`, as original-id set.
fn residual_core(g: &Graph, k: u32, alive: &NodeSet, u: u32) -> NodeSet {
    let n = g.n();
    let mut removed: Vec<bool> = (0..n as u32).map(|v| !alive.contains(v)).collect();
    let mut deg = vec![0i64; n];
    for v in alive.iter() {
        deg[v as usize] = g.neighbors(v).iter().filter(|&&x| alive.contains(x)).count() as i64;
    }
    let mut stack = vec![u];
    removed[u as usize] = true;
    let mut i = 0;
    while i < stack.len() {
        let v = stack[i];
        i += 1;
        for &x in g.neighbors(v) {
            if !removed[x as usize] {
                deg[x as usize] -= 1;
                if deg[x as usize] < k as i64 {
                    removed[x as usize] = true;
                    stack.push(x);
                }
            }
        }
    }
    NodeSet::from_iter(n, (0..n as u32).filter(|&v| !removed[v as usize]))
}
