//! The six families of valid inequalities over the master variables (w, z),
//! kept in a canonical form `z_coeff*z + sum(coeffs_i * w_i) {>=,<=} rhs`
//! with exact rational coefficients.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_rational::Rational64;
use num_traits::Zero;
use serde_json::json;

use crate::cascade::{collapse, Instance};
use crate::error::{Error, Result};
use crate::graph::{min_degree_within, Graph, NodeSet};

pub type Rat = Rational64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CutKind {
    Dominance,
    Symmetry,
    Follower,
    GeneralFollower,
    BigM,
    NoGood,
    HCore,
}

impl CutKind {
    pub fn name(self) -> &'static str {
        match self {
            CutKind::Dominance => "dominance",
            CutKind::Symmetry => "symmetry",
            CutKind::Follower => "follower",
            CutKind::GeneralFollower => "general_follower",
            CutKind::BigM => "bigm",
            CutKind::NoGood => "nogood",
            CutKind::HCore => "hcore",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutSense {
    Ge,
    Le,
}

/// Originating object of a cut; `nodes` keeps the builder's order (pairs are
/// directional, sets are sorted), `aux` carries h for h-subcore cuts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Provenance {
    pub nodes: Vec<u32>,
    pub aux: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cut {
    pub kind: CutKind,
    /// Sparse w coefficients, sorted by node id.
    pub coeffs: Vec<(u32, Rat)>,
    /// 1 for z-bounding cuts (BigM, NoGood, HCore), 0 otherwise.
    pub z_coeff: i64,
    pub rhs: Rat,
    pub sense: CutSense,
    pub provenance: Provenance,
}

impl Cut {
    /// Exact satisfaction test at a binary w-vector and integer z.
    pub fn evaluate(&self, w: &[bool], z: i64) -> bool {
        let mut lhs = Rat::from_integer(self.z_coeff * z);
        for &(v, c) in &self.coeffs {
            if w[v as usize] {
                lhs += c;
            }
        }
        match self.sense {
            CutSense::Ge => lhs >= self.rhs,
            CutSense::Le => lhs <= self.rhs,
        }
    }

    /// For a z-cut, the implied lower bound on z at the given w (exact).
    /// `z + sum(c_i w_i) >= rhs`  =>  `z >= rhs - sum(c_i w_i)`.
    pub fn implied_z_bound(&self, w: &[bool]) -> Option<Rat> {
        if self.z_coeff != 1 || self.sense != CutSense::Ge {
            return None;
        }
        let mut s = Rat::zero();
        for &(v, c) in &self.coeffs {
            if w[v as usize] {
                s += c;
            }
        }
        Some(self.rhs - s)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "kind": self.kind.name(),
            "nodes": self.provenance.nodes,
            "coeffs": self.coeffs.iter()
                .map(|(v, c)| json!([v, *c.numer(), *c.denom()]))
                .collect::<Vec<_>>(),
            "z_coeff": self.z_coeff,
            "rhs": [*self.rhs.numer(), *self.rhs.denom()],
            "sense": match self.sense { CutSense::Ge => ">=", CutSense::Le => "<=" },
        })
    }
}

/// Append-only pool with (kind, provenance) deduplication.
#[derive(Debug, Default)]
pub struct CutPool {
    cuts: Vec<Cut>,
    seen: HashSet<(CutKind, Vec<u32>, Option<u32>)>,
}

impl CutPool {
    pub fn new() -> CutPool {
        CutPool::default()
    }

    /// Returns false (and drops the cut) when the same (kind, provenance)
    /// was already pooled.
    pub fn add(&mut self, cut: Cut) -> bool {
        let key = (cut.kind, cut.provenance.nodes.clone(), cut.provenance.aux);
        if self.seen.insert(key) {
            self.cuts.push(cut);
            true
        } else {
            false
        }
    }

    pub fn cuts(&self) -> &[Cut] {
        &self.cuts
    }

    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }

    pub fn counts_by_kind(&self) -> BTreeMap<&'static str, usize> {
        let mut counts = BTreeMap::new();
        for c in &self.cuts {
            *counts.entry(c.kind.name()).or_insert(0) += 1;
        }
        counts
    }
}

/// Dominance inequalities w_j >= w_i for J_i strictly contained in J_j,
/// generated for i in J_j only (the paper's heuristic restriction).
pub fn dominance_cuts(table: &[NodeSet]) -> Vec<Cut> {
    let mut cuts = Vec::new();
    for j in 0..table.len() as u32 {
        for i in table[j as usize].iter() {
            if i == j {
                continue;
            }
            let ji = &table[i as usize];
            let jj = &table[j as usize];
            if ji.card() < jj.card() && ji.is_subset_of(jj) {
                let mut coeffs = vec![(i, -Rat::from_integer(1)), (j, Rat::from_integer(1))];
                coeffs.sort_by_key(|&(v, _)| v);
                cuts.push(Cut {
                    kind: CutKind::Dominance,
                    coeffs,
                    z_coeff: 0,
                    rhs: Rat::zero(),
                    sense: CutSense::Ge,
                    provenance: Provenance {
                        nodes: vec![i, j],
                        aux: None,
                    },
                });
            }
        }
    }
    cuts
}

/// Symmetry-breaking chains over classes of nodes with identical follower
/// sets: within a class ordered ascending, w_{i_r} >= w_{i_{r+1}}.
pub fn symmetry_cuts(table: &[NodeSet]) -> Vec<Cut> {
    let mut classes: HashMap<&NodeSet, Vec<u32>> = HashMap::new();
    for (i, j) in table.iter().enumerate() {
        classes.entry(j).or_default().push(i as u32);
    }
    let mut groups: Vec<Vec<u32>> = classes.into_values().filter(|g| g.len() > 1).collect();
    for g in &mut groups {
        g.sort_unstable();
    }
    groups.sort_by_key(|g| g[0]);

    let mut cuts = Vec::new();
    for group in groups {
        for pair in group.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            cuts.push(Cut {
                kind: CutKind::Symmetry,
                coeffs: vec![(a, Rat::from_integer(1)), (b, -Rat::from_integer(1))],
                z_coeff: 0,
                rhs: Rat::zero(),
                sense: CutSense::Ge,
                provenance: Provenance {
                    nodes: vec![a, b],
                    aux: None,
                },
            });
        }
    }
    cuts
}

/// Result of the single-node follower family: either the n cuts, or a
/// suppression flag when the validity precondition fails.
#[derive(Debug)]
pub struct FollowerCuts {
    pub cuts: Vec<Cut>,
    /// Set when removing fewer than b nodes can empty the network, which
    /// invalidates the whole family.
    pub suppressed: bool,
}

/// sum_{j in J_u} w_j <= 1 for every node u. Valid only while no removal of
/// fewer than b nodes empties the network; the check greedily removes b-1
/// nodes by largest follower set and watches for an empty survivor set.
pub fn follower_cuts(inst: &Instance, table: &[NodeSet]) -> FollowerCuts {
    if !follower_precondition(inst, table) {
        return FollowerCuts {
            cuts: Vec::new(),
            suppressed: true,
        };
    }
    let cuts = (0..table.len() as u32)
        .map(|u| follower_cut_from_set(CutKind::Follower, &table[u as usize], vec![u], 1))
        .collect();
    FollowerCuts {
        cuts,
        suppressed: false,
    }
}

fn follower_precondition(inst: &Instance, table: &[NodeSet]) -> bool {
    let n = inst.graph.n();
    if n == 0 {
        return false;
    }
    let mut alive = NodeSet::full(n);
    for step in 0..inst.b.saturating_sub(1) {
        // max current follower set, ties to lowest id
        let mut best: Option<(usize, u32)> = None;
        for u in alive.iter() {
            let ju = if step == 0 {
                table[u as usize].card()
            } else {
                let mut seed = alive.complement();
                seed.insert(u);
                alive.card() - collapse(inst, &seed).survivors.card()
            };
            if best.map_or(true, |(bj, bu)| ju > bj || (ju == bj && u < bu)) {
                best = Some((ju, u));
            }
        }
        let Some((_, pick)) = best else { return false };
        let mut seed = alive.complement();
        seed.insert(pick);
        alive = collapse(inst, &seed).survivors;
        if alive.is_empty() {
            return false;
        }
    }
    true
}

fn follower_cut_from_set(kind: CutKind, j_set: &NodeSet, prov: Vec<u32>, rhs: i64) -> Cut {
    Cut {
        kind,
        coeffs: j_set.iter().map(|v| (v, Rat::from_integer(1))).collect(),
        z_coeff: 0,
        rhs: Rat::from_integer(rhs),
        sense: CutSense::Le,
        provenance: Provenance {
            nodes: prov,
            aux: None,
        },
    }
}

/// Generalized follower inequality sum_{j in J_S} w_j <= |S| for |S| < b,
/// guarded by |C_k(G\S)| >= b - |S| (enough core nodes left for the budget).
pub fn general_follower_cut(inst: &Instance, s: &NodeSet) -> Result<Cut> {
    if s.card() >= inst.b {
        return Err(Error::CutRefused(format!(
            "|S| = {} must be smaller than the budget {}",
            s.card(),
            inst.b
        )));
    }
    let trace = collapse(inst, s);
    if trace.survivors.card() < inst.b - s.card() {
        return Err(Error::CutRefused(format!(
            "guard failed: only {} core nodes remain for residual budget {}",
            trace.survivors.card(),
            inst.b - s.card()
        )));
    }
    let j_set = trace.survivors.complement();
    if j_set.is_empty() {
        return Err(Error::CutRefused(
            "degenerate: follower set of S is empty".into(),
        ));
    }
    Ok(follower_cut_from_set(
        CutKind::GeneralFollower,
        &j_set,
        s.to_vec(),
        s.card() as i64,
    ))
}

/// Tightened Benders-like cut z >= m + (|K| - m)(1 - sum_{i in K} w_i) for a
/// k-subcore K, canonicalized to z + (|K|-m) * sum w_i >= |K|.
pub fn bigm_cut(g: &Graph, k: u32, k_set: &NodeSet, m: usize) -> Result<Cut> {
    let delta = min_degree_within(g, k_set).map_err(|_| Error::NotASubcore { k, found: 0 })?;
    if delta < k as usize {
        return Err(Error::NotASubcore { k, found: delta });
    }
    if k_set.card() <= m {
        return Err(Error::CutRefused(format!(
            "|K| = {} must exceed the lower bound m = {}",
            k_set.card(),
            m
        )));
    }
    let size = k_set.card() as i64;
    let slope = Rat::from_integer(size - m as i64);
    Ok(Cut {
        kind: CutKind::BigM,
        coeffs: k_set.iter().map(|v| (v, slope)).collect(),
        z_coeff: 1,
        rhs: Rat::from_integer(size),
        sense: CutSense::Ge,
        provenance: Provenance {
            nodes: k_set.to_vec(),
            aux: None,
        },
    })
}

/// No-good cut z >= m + (|C_k(G\W)| - m)(sum_{i in W} w_i - b + 1), active
/// exactly when w reproduces W.
pub fn nogood_cut(inst: &Instance, w_set: &NodeSet, m: usize) -> Result<Cut> {
    if w_set.card() != inst.b {
        return Err(Error::BudgetMismatch {
            expected: inst.b,
            got: w_set.card(),
        });
    }
    let c = collapse(inst, w_set).survivors.card() as i64;
    let slope = Rat::from_integer(c - m as i64);
    let b = inst.b as i64;
    Ok(Cut {
        kind: CutKind::NoGood,
        coeffs: w_set.iter().map(|v| (v, -slope)).collect(),
        z_coeff: 1,
        rhs: Rat::from_integer(m as i64) + slope * Rat::from_integer(1 - b),
        sense: CutSense::Ge,
        provenance: Provenance {
            nodes: w_set.to_vec(),
            aux: None,
        },
    })
}

/// h-subcore cut z >= m + (|K|-h+k-m)(1 - sum_{i in K} w_i / (h-k+1)) for a
/// set K inducing minimum degree exactly h >= k+1 in `g`.
pub fn hcore_cut(g: &Graph, k_set: &NodeSet, h: u32, k: u32, m: usize) -> Result<Cut> {
    if h < k + 1 {
        return Err(Error::CutRefused(format!("h = {h} must be at least k+1 = {}", k + 1)));
    }
    let delta = min_degree_within(g, k_set).map_err(|_| Error::MinDegreeMismatch {
        expected: h,
        found: 0,
    })?;
    if delta != h as usize {
        return Err(Error::MinDegreeMismatch {
            expected: h,
            found: delta,
        });
    }
    if k_set.card() < m {
        return Err(Error::CutRefused(format!(
            "|K| = {} is below the lower bound m = {}",
            k_set.card(),
            m
        )));
    }
    let q = k_set.card() as i64 - h as i64 + k as i64;
    let slope = Rat::new(q - m as i64, (h - k + 1) as i64);
    Ok(Cut {
        kind: CutKind::HCore,
        coeffs: k_set.iter().map(|v| (v, slope)).collect(),
        z_coeff: 1,
        rhs: Rat::from_integer(q),
        sense: CutSense::Ge,
        provenance: Provenance {
            nodes: k_set.to_vec(),
            aux: Some(h),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cascade::followers_table;
    use crate::graph::Graph;

    fn clique_instance(n: usize, k: u32, b: usize) -> Instance {
        Instance::new(Graph::complete(n), k, b).unwrap()
    }

    fn w_vec(n: usize, set: &[u32]) -> Vec<bool> {
        let mut w = vec![false; n];
        for &v in set {
            w[v as usize] = true;
        }
        w
    }

    #[test]
    fn dominance_none_on_clique() {
        let inst = clique_instance(5, 3, 1);
        let table = followers_table(&inst).unwrap();
        assert!(dominance_cuts(&table).is_empty());
    }

    #[test]
    fn dominance_strictness() {
        // 4 and 5 are mutual followers: J_4 = J_5 = {4,5}, equal sets, so no
        // dominance cut between them (strict containment required)
        let k = 2u32;
        let g = Graph::from_edges(
            6,
            &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (4, 5), (4, 0), (5, 0)],
        );
        let inst = Instance::new(g, k, 1).unwrap();
        assert!(inst.is_preprocessed());
        let table = followers_table(&inst).unwrap();
        assert_eq!(table[4 as usize], table[5 as usize]);
        for c in dominance_cuts(&table) {
            assert!(!(c.provenance.nodes == vec![4, 5] || c.provenance.nodes == vec![5, 4]));
        }
    }

    #[test]
    fn dominance_found_on_kite() {
        // K4 core with a 2-path hanging off node 0: removing 0 collapses the
        // path tail, so the tail's followers are strictly inside J_0.
        let g = Graph::from_edges(
            6,
            &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (0, 4), (4, 5), (5, 0)],
        );
        let inst = Instance::new(g, 2, 1).unwrap();
        assert!(inst.is_preprocessed());
        let table = followers_table(&inst).unwrap();
        let cuts = dominance_cuts(&table);
        assert!(!cuts.is_empty());
        // J_4 = {4,5} strictly inside J_0 which contains 0,4,5
        assert!(table[4].is_subset_of(&table[0]) && table[4].card() < table[0].card());
        let c = cuts
            .iter()
            .find(|c| c.provenance.nodes == vec![4, 0])
            .expect("expected dominance cut (i=4, j=0)");
        // w_0 - w_4 >= 0: violated by w_4=1, w_0=0
        assert!(!c.evaluate(&w_vec(6, &[4]), 0));
        assert!(c.evaluate(&w_vec(6, &[0]), 0));
    }

    #[test]
    fn symmetry_on_twins() {
        let g = Graph::from_edges(
            6,
            &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (4, 5), (4, 0), (5, 0)],
        );
        let inst = Instance::new(g, 2, 1).unwrap();
        let table = followers_table(&inst).unwrap();
        let cuts = symmetry_cuts(&table);
        assert_eq!(cuts.len(), 1);
        assert_eq!(cuts[0].provenance.nodes, vec![4, 5]);
        // w_4 >= w_5
        assert!(!cuts[0].evaluate(&w_vec(6, &[5]), 0));
        assert!(cuts[0].evaluate(&w_vec(6, &[4]), 0));
    }

    #[test]
    fn symmetry_none_when_distinct() {
        let inst = clique_instance(5, 3, 1);
        let table = followers_table(&inst).unwrap();
        assert!(symmetry_cuts(&table).is_empty());
    }

    #[test]
    fn follower_cuts_suppressed_on_small_clique() {
        let k = 3u32;
        let inst = clique_instance(k as usize + 1, k, 2);
        let table = followers_table(&inst).unwrap();
        let fc = follower_cuts(&inst, &table);
        assert!(fc.suppressed);
        assert!(fc.cuts.is_empty());
    }

    #[test]
    fn follower_cuts_emitted_on_larger_clique() {
        let k = 3u32;
        let inst = clique_instance(k as usize + 3, k, 2);
        let table = followers_table(&inst).unwrap();
        let fc = follower_cuts(&inst, &table);
        assert!(!fc.suppressed);
        assert_eq!(fc.cuts.len(), k as usize + 3);
        for c in &fc.cuts {
            assert_eq!(c.coeffs.len(), 1);
            assert_eq!(c.rhs, Rat::from_integer(1));
        }
    }

    #[test]
    fn general_follower_consistency_and_refusals() {
        let k = 3u32;
        let inst = clique_instance(k as usize + 3, k, 2);
        let table = followers_table(&inst).unwrap();
        let s = NodeSet::from_iter(inst.graph.n(), [1]);
        let cut = general_follower_cut(&inst, &s).unwrap();
        let single = &follower_cuts(&inst, &table).cuts[1];
        assert_eq!(cut.coeffs, single.coeffs);
        assert_eq!(cut.rhs, single.rhs);

        // empty S on a preprocessed instance is degenerate
        assert!(general_follower_cut(&inst, &NodeSet::new(inst.graph.n())).is_err());

        // |S| >= b refused
        let s2 = NodeSet::from_iter(inst.graph.n(), [0, 1]);
        assert!(general_follower_cut(&inst, &s2).is_err());
    }

    #[test]
    fn bigm_substitution() {
        let inst = clique_instance(6, 3, 1);
        let core = NodeSet::full(6);
        let cut = bigm_cut(&inst.graph, 3, &core, 2).unwrap();
        // nothing interdicted in K: z must be at least |K|
        assert!(cut.evaluate(&w_vec(6, &[]), 6));
        assert!(!cut.evaluate(&w_vec(6, &[]), 5));
        // one interdicted node deactivates the cut down to the floor m,
        // a second pushes the bound to 2m - |K| below it
        assert!(cut.evaluate(&w_vec(6, &[0]), 2));
        assert_eq!(
            cut.implied_z_bound(&w_vec(6, &[0])).unwrap(),
            Rat::from_integer(2)
        );
        assert_eq!(
            cut.implied_z_bound(&w_vec(6, &[0, 1])).unwrap(),
            Rat::from_integer(2 * 2 - 6)
        );
        // not a 3-subcore
        let bad = NodeSet::from_iter(6, [0, 1]);
        assert!(bigm_cut(&inst.graph, 3, &bad, 0).is_err());
    }

    #[test]
    fn nogood_substitution() {
        let k = 3u32;
        let inst = clique_instance(k as usize + 2, k, 1);
        let w_set = NodeSet::from_iter(inst.graph.n(), [0]);
        let m = 0;
        let cut = nogood_cut(&inst, &w_set, m).unwrap();
        let c = k as i64 + 1;
        // at w = W the bound is exactly |C_k(G\W)|
        assert_eq!(
            cut.implied_z_bound(&w_vec(inst.graph.n(), &[0])).unwrap(),
            Rat::from_integer(c)
        );
        // any other w is redundant (bound <= m)
        assert!(
            cut.implied_z_bound(&w_vec(inst.graph.n(), &[1])).unwrap()
                <= Rat::from_integer(m as i64)
        );
        // wrong cardinality
        let too_big = NodeSet::from_iter(inst.graph.n(), [0, 1]);
        assert!(nogood_cut(&inst, &too_big, m).is_err());
    }

    #[test]
    fn hcore_substitution() {
        // K6 with k=3: the whole set induces min degree 5 = h
        let g = Graph::complete(6);
        let full = NodeSet::full(6);
        let k = 3u32;
        let h = 5u32;
        let m = 1usize;
        let cut = hcore_cut(&g, &full, h, k, m).unwrap();
        let q = 6 - h as i64 + k as i64; // |K|-h+k = 4
        assert_eq!(cut.rhs, Rat::from_integer(q));
        // no interdiction: z >= q
        assert_eq!(cut.implied_z_bound(&w_vec(6, &[])).unwrap(), Rat::from_integer(q));
        // h-k = 2 nodes interdicted: bound m + (q-m)/(h-k+1) > m
        let bound = cut.implied_z_bound(&w_vec(6, &[0, 1])).unwrap();
        assert_eq!(bound, Rat::from_integer(q) - Rat::new(2 * (q - m as i64), 3));
        assert!(bound > Rat::from_integer(m as i64));

        // wrong min degree
        assert!(hcore_cut(&g, &full, 4, k, m).is_err());
        // h below k+1
        assert!(hcore_cut(&g, &full, 3, k, m).is_err());
    }

    #[test]
    fn hcore_special_case_h_eq_k_plus_one() {
        // cycle of 5: min degree 2, take k=1, h=2 = k+1
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        let full = NodeSet::full(5);
        let cut = hcore_cut(&g, &full, 2, 1, 0).unwrap();
        // z >= m + (|K|-1-m)(1 - sum w_i / 2), so untouched K forces z >= |K|-1
        assert_eq!(
            cut.implied_z_bound(&vec![false; 5]).unwrap(),
            Rat::from_integer(4)
        );
        assert_eq!(cut.coeffs[0].1, Rat::new(4, 2));
    }

    #[test]
    fn pool_dedup() {
        let inst = clique_instance(6, 3, 1);
        let core = NodeSet::full(6);
        let mut pool = CutPool::new();
        assert!(pool.add(bigm_cut(&inst.graph, 3, &core, 2).unwrap()));
        assert!(!pool.add(bigm_cut(&inst.graph, 3, &core, 2).unwrap()));
        assert_eq!(pool.len(), 1);
        assert_eq!(pool.counts_by_kind().get("bigm"), Some(&1));
    }

    #[test]
    fn evaluate_dominance_zero_vector() {
        let g = Graph::from_edges(
            6,
            &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (0, 4), (4, 5), (5, 0)],
        );
        let inst = Instance::new(g, 2, 1).unwrap();
        let table = followers_table(&inst).unwrap();
        for c in dominance_cuts(&table) {
            assert!(c.evaluate(&vec![false; 6], 0));
        }
    }
}
