//! LP formulation of k-core detection with interdiction, Theorem-1 style
//! integrality verification, and the dual program used by the single-level
//! nonlinear reformulation.

use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjSense {
    Min,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct LpRow {
    pub name: String,
    pub coeffs: Vec<(usize, f64)>,
    pub sense: RowSense,
    pub rhs: f64,
}

#[derive(Debug, Clone)]
pub struct LpProblem {
    pub sense: ObjSense,
    pub objective: Vec<f64>,
    pub var_names: Vec<String>,
    pub var_lb: Vec<f64>,
    pub var_ub: Vec<f64>,
    pub rows: Vec<LpRow>,
}

impl LpProblem {
    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.var_names.iter().position(|n| n == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub primal: Vec<f64>,
    /// Row multipliers in the problem's own orientation.
    pub duals: Vec<f64>,
    pub objective: f64,
    pub status: LpStatus,
    pub iterations: u64,
    /// Reduced costs of the structural variables at the final basis.
    pub reduced_costs: Vec<f64>,
}

/// Detection LP: minimize the number of nodes outside the k-core. Variables
/// u_i in [0,1] flag nodes outside the core; x_e >= 0 (one per undirected
/// edge) are the McCormick products over the outside subgraph. Passing an
/// interdiction vector adds u_i >= w_i rows; its optimal value is
/// n - |C_k(G \ W)| and the optimum is integral.
pub fn build_detection_lp(g: &Graph, k: u32, w: Option<&[bool]>) -> LpProblem {
    let n = g.n();
    let edges = edge_list(g);
    let num_vars = n + edges.len();

    let mut objective = vec![0.0; num_vars];
    let mut var_names = Vec::with_capacity(num_vars);
    let var_lb = vec![0.0; num_vars];
    let mut var_ub = vec![f64::INFINITY; num_vars];
    for i in 0..n {
        objective[i] = 1.0;
        var_names.push(format!("u_{i}"));
        var_ub[i] = 1.0;
    }
    for &(i, j) in &edges {
        var_names.push(format!("x_{i}_{j}"));
    }
    let edge_var = |a: u32, b: u32| -> usize {
        let key = (a.min(b), a.max(b));
        n + edges.binary_search(&key).unwrap()
    };

    let mut rows = Vec::new();
    for i in 0..n as u32 {
        // sum_j u_j - sum_j x_ij + (|N(i)|-k) u_i <= |N(i)| - k
        let deg = g.degree(i) as f64;
        let mut coeffs: Vec<(usize, f64)> = Vec::with_capacity(2 * g.degree(i) + 1);
        coeffs.push((i as usize, deg - k as f64));
        for &j in g.neighbors(i) {
            coeffs.push((j as usize, 1.0));
            coeffs.push((edge_var(i, j), -1.0));
        }
        coeffs.sort_by_key(|&(v, _)| v);
        rows.push(LpRow {
            name: format!("core_{i}"),
            coeffs,
            sense: RowSense::Le,
            rhs: deg - k as f64,
        });
    }
    for &(i, j) in &edges {
        let e = edge_var(i, j);
        rows.push(LpRow {
            name: format!("cap_{i}_{j}"),
            coeffs: vec![(i as usize, -1.0), (e, 1.0)],
            sense: RowSense::Le,
            rhs: 0.0,
        });
        rows.push(LpRow {
            name: format!("cap_{j}_{i}"),
            coeffs: vec![(j as usize, -1.0), (e, 1.0)],
            sense: RowSense::Le,
            rhs: 0.0,
        });
    }
    if let Some(w) = w {
        assert_eq!(w.len(), n);
        for i in 0..n {
            rows.push(LpRow {
                name: format!("fix_{i}"),
                coeffs: vec![(i, 1.0)],
                sense: RowSense::Ge,
                rhs: if w[i] { 1.0 } else { 0.0 },
            });
        }
    }

    LpProblem {
        sense: ObjSense::Min,
        objective,
        var_names,
        var_lb,
        var_ub,
        rows,
    }
}

/// True when every u variable of a solved detection LP lies within `tol`
/// of 0 or 1.
pub fn verify_integrality(p: &LpProblem, s: &LpSolution, tol: f64) -> bool {
    p.var_names
        .iter()
        .zip(&s.primal)
        .filter(|(name, _)| name.starts_with("u_"))
        .all(|(_, &v)| (v - v.round()).abs() <= tol && (v.round() == 0.0 || v.round() == 1.0))
}

/// Dual of the detection LP, in the paper's directed-copy indexing: one
/// beta_ij and one gamma_ij per ordered pair. Row conventions: beta_ij
/// multiplies x_ij <= u_i and gamma_ij multiplies x_ij <= u_j, so gamma_ji
/// lands in node i's degree row. The lambda variables are capped at n, the
/// McCormick constant used downstream; some optimal solution satisfies it.
pub fn build_dual(g: &Graph, k: u32, w: &[bool]) -> LpProblem {
    let n = g.n();
    assert_eq!(w.len(), n);
    // ordered pairs (i, j in N(i)) in adjacency order
    let mut pair_index = vec![Vec::new(); n];
    let mut num_pairs = 0usize;
    for i in 0..n as u32 {
        for &j in g.neighbors(i) {
            pair_index[i as usize].push((j, num_pairs));
            num_pairs += 1;
        }
    }
    let pair_var = |i: u32, j: u32| -> usize {
        let pos = g.neighbors(i).binary_search(&j).unwrap();
        pair_index[i as usize][pos].1
    };

    let alpha = |i: usize| i;
    let lambda = |i: usize| n + i;
    let tau = |i: usize| 2 * n + i;
    let beta = |p: usize| 3 * n + p;
    let gamma = |p: usize| 3 * n + num_pairs + p;
    let num_vars = 3 * n + 2 * num_pairs;

    let mut objective = vec![0.0; num_vars];
    let mut var_names = vec![String::new(); num_vars];
    let var_lb = vec![0.0; num_vars];
    let mut var_ub = vec![f64::INFINITY; num_vars];
    for i in 0..n {
        objective[alpha(i)] = k as f64 - g.degree(i as u32) as f64;
        objective[lambda(i)] = if w[i] { 1.0 } else { 0.0 };
        objective[tau(i)] = -1.0;
        var_names[alpha(i)] = format!("alpha_{i}");
        var_names[lambda(i)] = format!("lambda_{i}");
        var_names[tau(i)] = format!("tau_{i}");
        var_ub[lambda(i)] = n as f64;
    }
    for i in 0..n as u32 {
        for &(j, p) in &pair_index[i as usize] {
            var_names[beta(p)] = format!("beta_{i}_{j}");
            var_names[gamma(p)] = format!("gamma_{i}_{j}");
        }
    }

    let mut rows = Vec::new();
    for i in 0..n as u32 {
        // (k-|N(i)|) alpha_i + lambda_i - tau_i
        //   + sum_{j in N(i)} (-alpha_j + beta_ij + gamma_ji) <= 1
        let iu = i as usize;
        let mut coeffs = vec![
            (alpha(iu), k as f64 - g.degree(i) as f64),
            (lambda(iu), 1.0),
            (tau(iu), -1.0),
        ];
        for &j in g.neighbors(i) {
            coeffs.push((alpha(j as usize), -1.0));
            coeffs.push((beta(pair_var(i, j)), 1.0));
            coeffs.push((gamma(pair_var(j, i)), 1.0));
        }
        coeffs.sort_by_key(|&(v, _)| v);
        rows.push(LpRow {
            name: format!("node_{i}"),
            coeffs,
            sense: RowSense::Le,
            rhs: 1.0,
        });
    }
    for i in 0..n as u32 {
        for &j in g.neighbors(i) {
            let p = pair_var(i, j);
            rows.push(LpRow {
                name: format!("edge_{i}_{j}"),
                coeffs: vec![
                    (alpha(i as usize), 1.0),
                    (beta(p), -1.0),
                    (gamma(p), -1.0),
                ],
                sense: RowSense::Le,
                rhs: 0.0,
            });
        }
    }

    LpProblem {
        sense: ObjSense::Max,
        objective,
        var_names,
        var_lb,
        var_ub,
        rows,
    }
}

pub(crate) fn edge_list(g: &Graph) -> Vec<(u32, u32)> {
    let mut edges = Vec::with_capacity(g.m());
    for i in 0..g.n() as u32 {
        for &j in g.neighbors(i) {
            if i < j {
                edges.push((i, j));
            }
        }
    }
    edges.sort_unstable();
    edges
}
