//! Undirected simple graphs with contiguous node ids, edge-list ingestion,
//! and bucket-based k-core / coreness decomposition.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Immutable undirected simple graph. Node ids are `0..n-1`; original labels
/// from the input file are kept for reporting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<u32>>,
    m: usize,
    labels: Vec<String>,
    self_loops_dropped: usize,
    duplicates_dropped: usize,
}

impl Graph {
    /// Build from an explicit node count and edge list. Self-loops and
    /// duplicate edges are dropped and counted.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Graph {
        let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
        let mut self_loops = 0usize;
        let mut duplicates = 0usize;
        let mut seen = std::collections::HashSet::new();
        for &(a, b) in edges {
            assert!((a as usize) < n && (b as usize) < n, "edge endpoint out of range");
            if a == b {
                self_loops += 1;
                continue;
            }
            let key = (a.min(b), a.max(b));
            if !seen.insert(key) {
                duplicates += 1;
                continue;
            }
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let m = seen.len();
        Graph {
            adj,
            m,
            labels: (0..n).map(|i| i.to_string()).collect(),
            self_loops_dropped: self_loops,
            duplicates_dropped: duplicates,
        }
    }

    /// Complete graph on `n` nodes.
    pub fn complete(n: usize) -> Graph {
        let mut edges = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n as u32 {
            for j in (i + 1)..n as u32 {
                edges.push((i, j));
            }
        }
        Graph::from_edges(n, &edges)
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    pub fn label(&self, v: u32) -> &str {
        &self.labels[v as usize]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn self_loops_dropped(&self) -> usize {
        self.self_loops_dropped
    }

    pub fn duplicates_dropped(&self) -> usize {
        self.duplicates_dropped
    }

    pub fn has_edge(&self, a: u32, b: u32) -> bool {
        self.adj[a as usize].binary_search(&b).is_ok()
    }
}

/// Dense bitset over `0..universe-1` with a cached cardinality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NodeSet {
    blocks: Vec<u64>,
    universe: usize,
    card: usize,
}

impl NodeSet {
    pub fn new(universe: usize) -> NodeSet {
        NodeSet {
            blocks: vec![0; universe.div_ceil(64)],
            universe,
            card: 0,
        }
    }

    pub fn full(universe: usize) -> NodeSet {
        let mut s = NodeSet::new(universe);
        for v in 0..universe as u32 {
            s.insert(v);
        }
        s
    }

    pub fn from_iter<I: IntoIterator<Item = u32>>(universe: usize, iter: I) -> NodeSet {
        let mut s = NodeSet::new(universe);
        for v in iter {
            s.insert(v);
        }
        s
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn card(&self) -> usize {
        self.card
    }

    pub fn is_empty(&self) -> bool {
        self.card == 0
    }

    pub fn contains(&self, v: u32) -> bool {
        let v = v as usize;
        v < self.universe && self.blocks[v / 64] >> (v % 64) & 1 == 1
    }

    pub fn insert(&mut self, v: u32) -> bool {
        let i = v as usize;
        assert!(i < self.universe, "node {v} outside universe {}", self.universe);
        let mask = 1u64 << (i % 64);
        if self.blocks[i / 64] & mask == 0 {
            self.blocks[i / 64] |= mask;
            self.card += 1;
            true
        } else {
            false
        }
    }

    pub fn remove(&mut self, v: u32) -> bool {
        let i = v as usize;
        assert!(i < self.universe);
        let mask = 1u64 << (i % 64);
        if self.blocks[i / 64] & mask != 0 {
            self.blocks[i / 64] &= !mask;
            self.card -= 1;
            true
        } else {
            false
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.universe as u32).filter(|&v| self.contains(v))
    }

    pub fn to_vec(&self) -> Vec<u32> {
        self.iter().collect()
    }

    pub fn is_subset_of(&self, other: &NodeSet) -> bool {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .all(|(a, b)| a & !b == 0)
    }

    /// Complement within the universe.
    pub fn complement(&self) -> NodeSet {
        let mut s = NodeSet::new(self.universe);
        for v in 0..self.universe as u32 {
            if !self.contains(v) {
                s.insert(v);
            }
        }
        s
    }
}

/// Full coreness decomposition: per-node core numbers plus the layers
/// `L_i` of nodes with coreness exactly `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreDecomposition {
    pub coreness: Vec<u32>,
    pub max_coreness: u32,
    pub layers: Vec<Vec<u32>>,
}

impl CoreDecomposition {
    /// Nodes with coreness at least `k`, i.e. the union of layers `L_k..L_ell`.
    pub fn core_at_least(&self, k: u32, universe: usize) -> NodeSet {
        NodeSet::from_iter(
            universe,
            (0..self.coreness.len() as u32).filter(|&v| self.coreness[v as usize] >= k),
        )
    }
}

/// Options for [`parse_edge_list`].
#[derive(Debug, Clone)]
pub struct ParseOptions {
    /// Lines starting with any of these characters are ignored.
    pub comment_prefixes: Vec<char>,
    /// Field separator; `None` splits on any whitespace.
    pub separator: Option<char>,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            comment_prefixes: vec!['#', '%'],
            separator: None,
        }
    }
}

/// Parse a whitespace- or separator-delimited edge list. Labels may be
/// arbitrary strings; they are remapped to `0..n-1` in order of first
/// appearance. Self-loops and duplicate edges are dropped with counters.
pub fn parse_edge_list(text: &str, options: &ParseOptions) -> Result<Graph> {
    let mut ids: HashMap<String, u32> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut edges: Vec<(u32, u32)> = Vec::new();

    let intern = |tok: &str, labels: &mut Vec<String>, ids: &mut HashMap<String, u32>| -> u32 {
        if let Some(&id) = ids.get(tok) {
            id
        } else {
            let id = labels.len() as u32;
            ids.insert(tok.to_string(), id);
            labels.push(tok.to_string());
            id
        }
    };

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if options
            .comment_prefixes
            .iter()
            .any(|&c| line.starts_with(c))
        {
            continue;
        }
        let tokens: Vec<&str> = match options.separator {
            Some(sep) => line.split(sep).map(str::trim).filter(|t| !t.is_empty()).collect(),
            None => line.split_whitespace().collect(),
        };
        if tokens.len() != 2 {
            return Err(Error::Parse {
                line: lineno + 1,
                msg: format!("expected two node labels, found {}", tokens.len()),
            });
        }
        let a = intern(tokens[0], &mut labels, &mut ids);
        let b = intern(tokens[1], &mut labels, &mut ids);
        edges.push((a, b));
    }

    if edges.is_empty() {
        return Err(Error::EmptyInput);
    }

    let mut g = Graph::from_edges(labels.len(), &edges);
    g.labels = labels;
    Ok(g)
}

/// Subgraph induced by `s`; kept nodes are relabeled to `0..|s|-1` in
/// ascending id order and carry their original labels.
pub fn induced_subgraph(g: &Graph, s: &NodeSet) -> Result<Graph> {
    if s.universe() != g.n() {
        return Err(Error::UniverseMismatch {
            expected: g.n(),
            got: s.universe(),
        });
    }
    let kept: Vec<u32> = s.to_vec();
    let mut new_id = vec![u32::MAX; g.n()];
    for (new, &old) in kept.iter().enumerate() {
        new_id[old as usize] = new as u32;
    }
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); kept.len()];
    let mut m = 0usize;
    for (new, &old) in kept.iter().enumerate() {
        for &nbr in g.neighbors(old) {
            let mapped = new_id[nbr as usize];
            if mapped != u32::MAX {
                adj[new].push(mapped);
                if mapped > new as u32 {
                    m += 1;
                }
            }
        }
    }
    // neighbor lists inherit sorted order because kept ids are ascending
    Ok(Graph {
        adj,
        m,
        labels: kept.iter().map(|&v| g.label(v).to_string()).collect(),
        self_loops_dropped: 0,
        duplicates_dropped: 0,
    })
}

/// The k-core: the unique maximal node set whose induced subgraph has
/// minimum degree >= k. Iterated peeling with a worklist, O(n + m).
pub fn kcore(g: &Graph, k: u32) -> NodeSet {
    let n = g.n();
    let mut deg: Vec<usize> = (0..n as u32).map(|v| g.degree(v)).collect();
    let mut removed = vec![false; n];
    let mut queue: Vec<u32> = (0..n as u32).filter(|&v| deg[v as usize] < k as usize).collect();
    for &v in &queue {
        removed[v as usize] = true;
    }
    while let Some(v) = queue.pop() {
        for &u in g.neighbors(v) {
            if !removed[u as usize] {
                deg[u as usize] -= 1;
                if deg[u as usize] < k as usize {
                    removed[u as usize] = true;
                    queue.push(u);
                }
            }
        }
    }
    NodeSet::from_iter(n, (0..n as u32).filter(|&v| !removed[v as usize]))
}

/// Coreness of every node via the standard bucket-queue peeling
/// (Batagelj-Zavrsnik), O(n + m).
pub fn core_decomposition(g: &Graph) -> CoreDecomposition {
    let n = g.n();
    if n == 0 {
        return CoreDecomposition {
            coreness: Vec::new(),
            max_coreness: 0,
            layers: Vec::new(),
        };
    }
    let mut deg: Vec<usize> = (0..n as u32).map(|v| g.degree(v)).collect();
    let max_deg = deg.iter().copied().max().unwrap_or(0);

    // degree-indexed buckets with position tracking for O(1) moves
    let mut bin_start = vec![0usize; max_deg + 2];
    for &d in &deg {
        bin_start[d + 1] += 1;
    }
    for i in 1..bin_start.len() {
        bin_start[i] += bin_start[i - 1];
    }
    let mut order = vec![0u32; n];
    let mut pos = vec![0usize; n];
    {
        let mut next = bin_start.clone();
        for v in 0..n as u32 {
            let d = deg[v as usize];
            order[next[d]] = v;
            pos[v as usize] = next[d];
            next[d] += 1;
        }
    }

    let mut coreness = vec![0u32; n];
    for i in 0..n {
        let v = order[i];
        coreness[v as usize] = deg[v as usize] as u32;
        for &u in g.neighbors(v) {
            if deg[u as usize] > deg[v as usize] {
                let du = deg[u as usize];
                let pu = pos[u as usize];
                let pw = bin_start[du];
                let w = order[pw];
                if u != w {
                    order.swap(pu, pw);
                    pos[u as usize] = pw;
                    pos[w as usize] = pu;
                }
                bin_start[du] += 1;
                deg[u as usize] -= 1;
            }
        }
    }

    let max_coreness = coreness.iter().copied().max().unwrap_or(0);
    let mut layers: Vec<Vec<u32>> = vec![Vec::new(); max_coreness as usize + 1];
    for v in 0..n as u32 {
        layers[coreness[v as usize] as usize].push(v);
    }
    CoreDecomposition {
        coreness,
        max_coreness,
        layers,
    }
}

/// k-core of the subgraph induced by `alive`, reported in original ids.
pub fn kcore_within(g: &Graph, alive: &NodeSet, k: u32) -> NodeSet {
    let n = g.n();
    let mut removed: Vec<bool> = (0..n as u32).map(|v| !alive.contains(v)).collect();
    let mut deg = vec![0i64; n];
    for v in alive.iter() {
        deg[v as usize] = g.neighbors(v).iter().filter(|&&x| alive.contains(x)).count() as i64;
    }
    let mut stack: Vec<u32> = alive.iter().filter(|&v| deg[v as usize] < k as i64).collect();
    for &v in &stack {
        removed[v as usize] = true;
    }
    let mut i = 0;
    while i < stack.len() {
        let v = stack[i];
        i += 1;
        for &u in g.neighbors(v) {
            if !removed[u as usize] {
                deg[u as usize] -= 1;
                if deg[u as usize] < k as i64 {
                    removed[u as usize] = true;
                    stack.push(u);
                }
            }
        }
    }
    NodeSet::from_iter(n, (0..n as u32).filter(|&v| !removed[v as usize]))
}

/// Coreness of every node of the subgraph induced by `alive` (original ids;
/// dead nodes report 0). Simple repeated peeling, adequate at solver scale.
pub fn coreness_within(g: &Graph, alive: &NodeSet) -> Vec<u32> {
    let n = g.n();
    let mut coreness = vec![0u32; n];
    let mut current = alive.clone();
    let mut k = 1u32;
    while !current.is_empty() {
        let next = kcore_within(g, &current, k);
        for v in current.iter() {
            if !next.contains(v) {
                coreness[v as usize] = k - 1;
            }
        }
        current = next;
        k += 1;
    }
    coreness
}

/// Minimum degree of the graph. Errors on the empty graph.
pub fn min_degree(g: &Graph) -> Result<usize> {
    if g.n() == 0 {
        return Err(Error::EmptyGraph);
    }
    Ok((0..g.n() as u32).map(|v| g.degree(v)).min().unwrap())
}

/// Minimum degree within the subgraph induced by `s` without materializing it.
pub fn min_degree_within(g: &Graph, s: &NodeSet) -> Result<usize> {
    if s.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let mut best = usize::MAX;
    for v in s.iter() {
        let d = g.neighbors(v).iter().filter(|&&u| s.contains(u)).count();
        best = best.min(d);
    }
    Ok(best)
}
