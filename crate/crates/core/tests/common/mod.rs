//! Shared fixtures and independent oracles for the integration tests.
//! Everything here must stay independent of the implementation paths it
//! cross-checks.

#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use collapse_core::graph::{Graph, NodeSet};
use collapse_core::lp::{LpProblem, LpStatus, ObjSense, RowSense};

/// Seed honoring COLLAPSE_CORE_SEED so randomized fixtures are replayable.
pub fn seed_from_env(default: u64) -> u64 {
    std::env::var("COLLAPSE_CORE_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(default)
}

pub fn rng(default_seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed_from_env(default_seed))
}

/// Erdos-Renyi G(n, p).
pub fn gnp(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for i in 0..n as u32 {
        for j in (i + 1)..n as u32 {
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, &edges)
}

pub fn load_data_graph(name: &str) -> Option<Graph> {
    let path = format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(path).ok()?;
    collapse_core::graph::parse_edge_list(&text, &collapse_core::graph::ParseOptions::default()).ok()
}

pub fn data_path(name: &str) -> String {
    format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"))
}

/// Exhaustive k-core oracle for tiny graphs: the maximum-cardinality subset
/// whose induced subgraph has minimum degree >= k, found by scanning all
/// 2^n subsets.
pub fn kcore_by_enumeration(g: &Graph, k: u32) -> NodeSet {
    let n = g.n();
    assert!(n <= 20, "enumeration oracle is for tiny graphs");
    let mut best: u64 = 0;
    let mut best_card = 0usize;
    for mask in 0u64..(1u64 << n) {
        let card = mask.count_ones() as usize;
        if card <= best_card {
            continue;
        }
        let mut ok = true;
        for v in 0..n as u32 {
            if mask >> v & 1 == 1 {
                let deg = g
                    .neighbors(v)
                    .iter()
                    .filter(|&&u| mask >> u & 1 == 1)
                    .count();
                if deg < k as usize {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            best = mask;
            best_card = card;
        }
    }
    NodeSet::from_iter(n, (0..n as u32).filter(|&v| best >> v & 1 == 1))
}

/// Peel nodes below degree k one at a time in a random order; the survivor
/// set must be order-independent.
pub fn kcore_random_order(g: &Graph, k: u32, rng: &mut ChaCha8Rng) -> NodeSet {
    let n = g.n();
    let mut alive: Vec<bool> = vec![true; n];
    let mut deg: Vec<usize> = (0..n as u32).map(|v| g.degree(v)).collect();
    loop {
        let deficient: Vec<u32> = (0..n as u32)
            .filter(|&v| alive[v as usize] && deg[v as usize] < k as usize)
            .collect();
        if deficient.is_empty() {
            break;
        }
        let pick = deficient[rng.random_range(0..deficient.len())];
        alive[pick as usize] = false;
        for &u in g.neighbors(pick) {
            if alive[u as usize] {
                deg[u as usize] -= 1;
            }
        }
    }
    NodeSet::from_iter(n, (0..n as u32).filter(|&v| alive[v as usize]))
}

/// Visit every b-subset of 0..n-1 in lexicographic order.
pub fn for_each_subset<F: FnMut(&[u32])>(n: usize, b: usize, mut f: F) {
    if b > n {
        return;
    }
    let mut idx: Vec<u32> = (0..b as u32).collect();
    loop {
        f(&idx);
        let mut i = b;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < (n - b + i) as u32 {
                idx[i] += 1;
                for j in i + 1..b {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Independent exact evaluator for cuts: clears denominators into i128 and
/// compares scaled integers.
pub fn cut_satisfied_i128(cut: &collapse_core::cuts::Cut, w: &[bool], z: i64) -> bool {
    fn gcd(a: i128, b: i128) -> i128 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }
    let mut den: i128 = *cut.rhs.denom() as i128;
    for &(_, c) in &cut.coeffs {
        let d = *c.denom() as i128;
        den = den / gcd(den, d) * d;
    }
    let mut lhs: i128 = cut.z_coeff as i128 * z as i128 * den;
    for &(v, c) in &cut.coeffs {
        if w[v as usize] {
            lhs += *c.numer() as i128 * (den / *c.denom() as i128);
        }
    }
    let rhs = *cut.rhs.numer() as i128 * (den / *cut.rhs.denom() as i128);
    match cut.sense {
        collapse_core::cuts::CutSense::Ge => lhs >= rhs,
        collapse_core::cuts::CutSense::Le => lhs <= rhs,
    }
}

/// Textbook two-phase dense tableau simplex with Bland's rule and every
/// bound expressed as an explicit row. Slow and simple; used as the
/// duplicate-implementation oracle for the production solver.
pub fn textbook_simplex(p: &LpProblem) -> (LpStatus, f64) {
    let n = p.num_vars();
    let minimize = p.sense == ObjSense::Min;
    let cost: Vec<f64> = if minimize {
        p.objective.clone()
    } else {
        p.objective.iter().map(|c| -c).collect()
    };

    // all variables shifted to lb 0; finite upper bounds become rows
    let mut shift = 0.0;
    let mut rows: Vec<(Vec<f64>, RowSense, f64)> = Vec::new();
    for row in &p.rows {
        let mut dense = vec![0.0; n];
        let mut rhs = row.rhs;
        for &(j, c) in &row.coeffs {
            dense[j] += c;
            rhs -= c * p.var_lb[j];
        }
        rows.push((dense, row.sense, rhs));
    }
    for j in 0..n {
        assert!(p.var_lb[j].is_finite());
        shift += cost[j] * p.var_lb[j];
        if p.var_ub[j].is_finite() {
            let mut dense = vec![0.0; n];
            dense[j] = 1.0;
            rows.push((dense, RowSense::Le, p.var_ub[j] - p.var_lb[j]));
        }
    }
    let m = rows.len();

    // columns: structural, slack per row, artificial per row, rhs
    let width = n + 2 * m + 1;
    let mut t = vec![vec![0.0f64; width]; m];
    for (r, (dense, sense, rhs)) in rows.iter().enumerate() {
        let flip = if *rhs < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[r][j] = flip * dense[j];
        }
        match sense {
            RowSense::Le => t[r][n + r] = flip,
            RowSense::Ge => t[r][n + r] = -flip,
            RowSense::Eq => {}
        }
        t[r][n + m + r] = 1.0;
        t[r][width - 1] = flip * rhs;
    }
    let mut basis: Vec<usize> = (0..m).map(|r| n + m + r).collect();

    let objective = |t: &Vec<Vec<f64>>, basis: &Vec<usize>, cost: &[f64]| -> f64 {
        (0..m)
            .map(|r| cost.get(basis[r]).copied().unwrap_or(0.0) * t[r][width - 1])
            .sum()
    };

    let run = |t: &mut Vec<Vec<f64>>,
                   basis: &mut Vec<usize>,
                   cost: &[f64],
                   allowed: usize|
     -> Option<f64> {
        let mut d = vec![0.0; width - 1];
        for (j, slot) in d.iter_mut().enumerate() {
            *slot = cost.get(j).copied().unwrap_or(0.0);
        }
        for r in 0..m {
            let cb = cost.get(basis[r]).copied().unwrap_or(0.0);
            if cb != 0.0 {
                for c in 0..width - 1 {
                    d[c] -= cb * t[r][c];
                }
            }
        }
        loop {
            // Bland: first eligible column enters
            let enter = (0..allowed).find(|&j| !basis.contains(&j) && d[j] < -1e-9);
            let Some(enter) = enter else {
                return Some(objective(t, basis, cost));
            };
            let mut leave: Option<usize> = None;
            let mut best = f64::INFINITY;
            for r in 0..m {
                if t[r][enter] > 1e-10 {
                    let ratio = t[r][width - 1] / t[r][enter];
                    if ratio < best - 1e-12
                        || (ratio < best + 1e-12 && leave.map_or(true, |lr| basis[r] < basis[lr]))
                    {
                        best = ratio;
                        leave = Some(r);
                    }
                }
            }
            let leave = leave?;
            let piv = t[leave][enter];
            for c in 0..width {
                t[leave][c] /= piv;
            }
            for r in 0..m {
                if r != leave {
                    let f = t[r][enter];
                    if f != 0.0 {
                        for c in 0..width {
                            t[r][c] -= f * t[leave][c];
                        }
                    }
                }
            }
            let f = d[enter];
            if f != 0.0 {
                for c in 0..width - 1 {
                    d[c] -= f * t[leave][c];
                }
            }
            basis[leave] = enter;
        }
    };

    // phase 1: minimize the sum of artificials
    let mut phase1 = vec![0.0; width - 1];
    for slot in phase1.iter_mut().skip(n + m).take(m) {
        *slot = 1.0;
    }
    let Some(p1) = run(&mut t, &mut basis, &phase1, n + m + m) else {
        return (LpStatus::Unbounded, 0.0);
    };
    if p1 > 1e-7 {
        return (LpStatus::Infeasible, 0.0);
    }
    // phase 2: artificials barred from entering
    let mut phase2 = vec![0.0; width - 1];
    phase2[..n].copy_from_slice(&cost[..n]);
    let Some(obj) = run(&mut t, &mut basis, &phase2, n + m) else {
        return (LpStatus::Unbounded, 0.0);
    };
    let total = obj + shift;
    (LpStatus::Optimal, if minimize { total } else { -total })
}
