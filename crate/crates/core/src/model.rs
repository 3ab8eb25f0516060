//! Solver-agnostic model IR for the optimization formulations, plus an
//! assignment checker and the cascade-to-assignment bridge.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::bounds::lower_bound_m;
use crate::cascade::{collapse, followers_table, Instance};
use crate::cuts::{dominance_cuts, follower_cuts, symmetry_cuts, CutPool, CutSense};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeSet};
use crate::lp::edge_list;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarKind {
    Binary,
    Integer,
    Continuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Goal {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelVar {
    pub name: String,
    pub kind: VarKind,
    pub lb: f64,
    pub ub: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelRow {
    pub name: String,
    /// Sparse linear part: (variable index, coefficient).
    pub terms: Vec<(usize, f64)>,
    /// Bilinear part: (coefficient, var a, var b); empty in linear models.
    pub bilinear: Vec<(f64, usize, usize)>,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelObjective {
    pub goal: Goal,
    pub constant: f64,
    pub linear: Vec<(usize, f64)>,
    pub bilinear: Vec<(f64, usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelIr {
    pub name: String,
    pub vars: Vec<ModelVar>,
    pub rows: Vec<ModelRow>,
    pub objective: ModelObjective,
}

impl ModelIr {
    pub fn is_linear(&self) -> bool {
        self.objective.bilinear.is_empty() && self.rows.iter().all(|r| r.bilinear.is_empty())
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("model serializes")
    }
}

fn binary_var(name: String) -> ModelVar {
    ModelVar {
        name,
        kind: VarKind::Binary,
        lb: 0.0,
        ub: 1.0,
    }
}

fn nonneg_var(name: String) -> ModelVar {
    ModelVar {
        name,
        kind: VarKind::Continuous,
        lb: 0.0,
        ub: f64::INFINITY,
    }
}

/// Deletion-round-indexed ILP. Binary a_i_t says node i is still present at
/// round t; the horizon is the tightened T = n - b - m. With `with_cuts` the
/// dominance, symmetry and follower inequalities plus the round-T lower
/// bound row are appended.
pub fn emit_time_dependent(inst: &Instance, with_cuts: bool) -> Result<ModelIr> {
    if !inst.is_preprocessed() {
        return Err(Error::NotPreprocessed(inst.k));
    }
    let n = inst.graph.n();
    let b = inst.b;
    let k = inst.k;
    let info = lower_bound_m(inst)?;
    let horizon = info.tightened_t;

    let var = |i: usize, t: usize| i * (horizon + 1) + t;
    let mut vars = Vec::with_capacity(n * (horizon + 1));
    for i in 0..n {
        for t in 0..=horizon {
            vars.push(binary_var(format!("a_{i}_{t}")));
        }
    }

    let mut rows = Vec::new();
    rows.push(ModelRow {
        name: "budget".into(),
        terms: (0..n).map(|i| (var(i, 0), 1.0)).collect(),
        bilinear: vec![],
        sense: Sense::Eq,
        rhs: (n - b) as f64,
    });
    for i in 0..n {
        for t in 1..=horizon {
            rows.push(ModelRow {
                name: format!("onlyremoval_{i}_{t}"),
                terms: vec![(var(i, t), 1.0), (var(i, t - 1), -1.0)],
                bilinear: vec![],
                sense: Sense::Le,
                rhs: 0.0,
            });
        }
    }
    for i in 0..n as u32 {
        let d = inst.graph.degree(i) as f64 - k as f64 + 1.0;
        for t in 1..=horizon {
            // sum_j a_j^{t-1} - d(i) a_i^t + d(i) a_i^0 <= k - 1 + d(i)
            let mut terms = vec![(var(i as usize, t), -d), (var(i as usize, 0), d)];
            for &j in inst.graph.neighbors(i) {
                terms.push((var(j as usize, t - 1), 1.0));
            }
            terms.sort_by_key(|&(v, _)| v);
            rows.push(ModelRow {
                name: format!("survive_{i}_{t}"),
                terms,
                bilinear: vec![],
                sense: Sense::Le,
                rhs: k as f64 - 1.0 + d,
            });
        }
    }

    if with_cuts {
        let table = followers_table(inst)?;
        for c in dominance_cuts(&table) {
            let (i, j) = (c.provenance.nodes[0], c.provenance.nodes[1]);
            rows.push(ModelRow {
                name: format!("dominance_{i}_{j}"),
                terms: vec![(var(j as usize, 0), 1.0), (var(i as usize, 0), -1.0)],
                bilinear: vec![],
                sense: Sense::Le,
                rhs: 0.0,
            });
        }
        for c in symmetry_cuts(&table) {
            let (a, bnode) = (c.provenance.nodes[0], c.provenance.nodes[1]);
            rows.push(ModelRow {
                name: format!("symmetry_{a}_{bnode}"),
                terms: vec![(var(a as usize, 0), 1.0), (var(bnode as usize, 0), -1.0)],
                bilinear: vec![],
                sense: Sense::Le,
                rhs: 0.0,
            });
        }
        let fc = follower_cuts(inst, &table);
        if !fc.suppressed {
            for (u, j_set) in table.iter().enumerate() {
                rows.push(ModelRow {
                    name: format!("followers_{u}"),
                    terms: j_set.iter().map(|v| (var(v as usize, 0), 1.0)).collect(),
                    bilinear: vec![],
                    sense: Sense::Ge,
                    rhs: j_set.card() as f64 - 1.0,
                });
            }
        }
        rows.push(ModelRow {
            name: "lower_bound".into(),
            terms: (0..n).map(|i| (var(i, horizon), 1.0)).collect(),
            bilinear: vec![],
            sense: Sense::Ge,
            rhs: info.m as f64,
        });
    }

    Ok(ModelIr {
        name: "time_dependent".into(),
        vars,
        rows,
        objective: ModelObjective {
            goal: Goal::Minimize,
            constant: 0.0,
            linear: (0..n).map(|i| (var(i, horizon), 1.0)).collect(),
            bilinear: vec![],
        },
    })
}

/// Sparse master over (w, z): budget row, the z >= m floor, and one row per
/// pooled inequality.
pub fn emit_sparse_master(inst: &Instance, pool: &CutPool) -> Result<ModelIr> {
    if !inst.is_preprocessed() {
        return Err(Error::NotPreprocessed(inst.k));
    }
    let n = inst.graph.n();
    let info = lower_bound_m(inst)?;

    let mut vars: Vec<ModelVar> = (0..n).map(|i| binary_var(format!("w_{i}"))).collect();
    let z = vars.len();
    vars.push(ModelVar {
        name: "z".into(),
        kind: VarKind::Integer,
        lb: info.m as f64,
        ub: f64::INFINITY,
    });

    let mut rows = vec![
        ModelRow {
            name: "budget".into(),
            terms: (0..n).map(|i| (i, 1.0)).collect(),
            bilinear: vec![],
            sense: Sense::Eq,
            rhs: inst.b as f64,
        },
        ModelRow {
            name: "lower_bound".into(),
            terms: vec![(z, 1.0)],
            bilinear: vec![],
            sense: Sense::Ge,
            rhs: info.m as f64,
        },
    ];
    for (idx, cut) in pool.cuts().iter().enumerate() {
        let mut terms: Vec<(usize, f64)> = Vec::with_capacity(cut.coeffs.len() + 1);
        if cut.z_coeff != 0 {
            terms.push((z, cut.z_coeff as f64));
        }
        for &(v, c) in &cut.coeffs {
            terms.push((v as usize, rat_to_f64(c)));
        }
        terms.sort_by_key(|&(v, _)| v);
        rows.push(ModelRow {
            name: format!("{}_{idx}", cut.kind.name()),
            terms,
            bilinear: vec![],
            sense: match cut.sense {
                CutSense::Ge => Sense::Ge,
                CutSense::Le => Sense::Le,
            },
            rhs: rat_to_f64(cut.rhs),
        });
    }

    Ok(ModelIr {
        name: "sparse_master".into(),
        vars,
        rows,
        objective: ModelObjective {
            goal: Goal::Minimize,
            constant: 0.0,
            linear: vec![(z, 1.0)],
            bilinear: vec![],
        },
    })
}

fn rat_to_f64(r: crate::cuts::Rat) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Single-level reformulation through the dual of the lower-level LP:
/// min n - v with v bounded by the dual objective. The w_i * lambda_i
/// products stay bilinear unless `linearize` replaces them by McCormick
/// auxiliaries p_i with the constant fixed at n.
pub fn emit_nonlinear_dual(inst: &Instance, linearize: bool) -> Result<ModelIr> {
    if !inst.is_preprocessed() {
        return Err(Error::NotPreprocessed(inst.k));
    }
    let g = &inst.graph;
    let n = g.n();
    let k = inst.k;
    let cap = n as f64;

    let mut vars = Vec::new();
    let v_idx = 0usize;
    vars.push(ModelVar {
        name: "v".into(),
        kind: VarKind::Integer,
        lb: f64::NEG_INFINITY,
        ub: f64::INFINITY,
    });
    let w = |i: usize| 1 + i;
    for i in 0..n {
        vars.push(binary_var(format!("w_{i}")));
    }
    let alpha = |i: usize| 1 + n + i;
    for i in 0..n {
        vars.push(nonneg_var(format!("alpha_{i}")));
    }
    let lambda = |i: usize| 1 + 2 * n + i;
    for i in 0..n {
        vars.push(ModelVar {
            name: format!("lambda_{i}"),
            kind: VarKind::Continuous,
            lb: 0.0,
            ub: cap,
        });
    }
    let tau = |i: usize| 1 + 3 * n + i;
    for i in 0..n {
        vars.push(nonneg_var(format!("tau_{i}")));
    }
    // ordered pairs in adjacency order
    let mut pair_pos: Vec<Vec<(u32, usize)>> = vec![Vec::new(); n];
    let mut num_pairs = 0usize;
    for i in 0..n as u32 {
        for &j in g.neighbors(i) {
            pair_pos[i as usize].push((j, num_pairs));
            num_pairs += 1;
        }
    }
    let beta0 = 1 + 4 * n;
    let gamma0 = beta0 + num_pairs;
    for i in 0..n as u32 {
        for &j in g.neighbors(i) {
            vars.push(nonneg_var(format!("beta_{i}_{j}")));
        }
    }
    for i in 0..n as u32 {
        for &j in g.neighbors(i) {
            vars.push(nonneg_var(format!("gamma_{i}_{j}")));
        }
    }
    let pair = |i: u32, j: u32| -> usize {
        let pos = g.neighbors(i).binary_search(&j).unwrap();
        pair_pos[i as usize][pos].1
    };
    let p0 = gamma0 + num_pairs;
    if linearize {
        for i in 0..n {
            vars.push(nonneg_var(format!("p_{i}")));
        }
    }

    let mut rows = Vec::new();
    // v <= sum_i [(k - |N(i)|) alpha_i + w_i lambda_i - tau_i]
    let mut terms = vec![(v_idx, 1.0)];
    let mut bilinear = Vec::new();
    for i in 0..n {
        terms.push((alpha(i), (g.degree(i as u32) as f64) - k as f64));
        terms.push((tau(i), 1.0));
        if linearize {
            terms.push((p0 + i, -1.0));
        } else {
            bilinear.push((-1.0, w(i), lambda(i)));
        }
    }
    terms.sort_by_key(|&(v, _)| v);
    rows.push(ModelRow {
        name: "dual_objective_link".into(),
        terms,
        bilinear,
        sense: Sense::Le,
        rhs: 0.0,
    });
    rows.push(ModelRow {
        name: "budget".into(),
        terms: (0..n).map(|i| (w(i), 1.0)).collect(),
        bilinear: vec![],
        sense: Sense::Eq,
        rhs: inst.b as f64,
    });
    for i in 0..n as u32 {
        let iu = i as usize;
        let mut terms = vec![
            (alpha(iu), k as f64 - g.degree(i) as f64),
            (lambda(iu), 1.0),
            (tau(iu), -1.0),
        ];
        for &j in g.neighbors(i) {
            terms.push((alpha(j as usize), -1.0));
            terms.push((beta0 + pair(i, j), 1.0));
            terms.push((gamma0 + pair(j, i), 1.0));
        }
        terms.sort_by_key(|&(v, _)| v);
        rows.push(ModelRow {
            name: format!("dual_node_{i}"),
            terms,
            bilinear: vec![],
            sense: Sense::Le,
            rhs: 1.0,
        });
    }
    for i in 0..n as u32 {
        for &j in g.neighbors(i) {
            let p = pair(i, j);
            rows.push(ModelRow {
                name: format!("dual_edge_{i}_{j}"),
                terms: vec![
                    (alpha(i as usize), 1.0),
                    (beta0 + p, -1.0),
                    (gamma0 + p, -1.0),
                ],
                bilinear: vec![],
                sense: Sense::Le,
                rhs: 0.0,
            });
        }
    }
    if linearize {
        for i in 0..n {
            rows.push(ModelRow {
                name: format!("mccormick_cap_{i}"),
                terms: vec![(p0 + i, 1.0), (w(i), -cap)],
                bilinear: vec![],
                sense: Sense::Le,
                rhs: 0.0,
            });
            rows.push(ModelRow {
                name: format!("mccormick_lambda_{i}"),
                terms: vec![(p0 + i, 1.0), (lambda(i), -1.0)],
                bilinear: vec![],
                sense: Sense::Le,
                rhs: 0.0,
            });
            rows.push(ModelRow {
                name: format!("mccormick_floor_{i}"),
                terms: vec![(p0 + i, 1.0), (lambda(i), -1.0), (w(i), -cap)],
                bilinear: vec![],
                sense: Sense::Ge,
                rhs: -cap,
            });
        }
    }

    Ok(ModelIr {
        name: if linearize {
            "dual_single_level_mccormick".into()
        } else {
            "dual_single_level".into()
        },
        vars,
        rows,
        objective: ModelObjective {
            goal: Goal::Minimize,
            constant: n as f64,
            linear: vec![(v_idx, -1.0)],
            bilinear: vec![],
        },
    })
}

/// Detection LP in IR form (shared shape with `lp::build_detection_lp`).
pub fn emit_detection_lp(g: &Graph, k: u32, w: Option<&[bool]>) -> ModelIr {
    let n = g.n();
    let edges = edge_list(g);
    let mut vars: Vec<ModelVar> = (0..n)
        .map(|i| ModelVar {
            name: format!("u_{i}"),
            kind: VarKind::Continuous,
            lb: 0.0,
            ub: 1.0,
        })
        .collect();
    for &(i, j) in &edges {
        vars.push(nonneg_var(format!("x_{i}_{j}")));
    }
    let edge_var = |a: u32, b: u32| -> usize {
        let key = (a.min(b), a.max(b));
        n + edges.binary_search(&key).unwrap()
    };

    let mut rows = Vec::new();
    for i in 0..n as u32 {
        let deg = g.degree(i) as f64;
        let mut terms: Vec<(usize, f64)> = vec![(i as usize, deg - k as f64)];
        for &j in g.neighbors(i) {
            terms.push((j as usize, 1.0));
            terms.push((edge_var(i, j), -1.0));
        }
        terms.sort_by_key(|&(v, _)| v);
        rows.push(ModelRow {
            name: format!("core_{i}"),
            terms,
            bilinear: vec![],
            sense: Sense::Le,
            rhs: deg - k as f64,
        });
    }
    for &(i, j) in &edges {
        let e = edge_var(i, j);
        rows.push(ModelRow {
            name: format!("cap_{i}_{j}"),
            terms: vec![(i as usize, -1.0), (e, 1.0)],
            bilinear: vec![],
            sense: Sense::Le,
            rhs: 0.0,
        });
        rows.push(ModelRow {
            name: format!("cap_{j}_{i}"),
            terms: vec![(j as usize, -1.0), (e, 1.0)],
            bilinear: vec![],
            sense: Sense::Le,
            rhs: 0.0,
        });
    }
    if let Some(w) = w {
        for i in 0..n {
            rows.push(ModelRow {
                name: format!("fix_{i}"),
                terms: vec![(i, 1.0)],
                bilinear: vec![],
                sense: Sense::Ge,
                rhs: if w[i] { 1.0 } else { 0.0 },
            });
        }
    }

    ModelIr {
        name: "detection_lp".into(),
        vars,
        rows,
        objective: ModelObjective {
            goal: Goal::Minimize,
            constant: 0.0,
            linear: (0..n).map(|i| (i, 1.0)).collect(),
            bilinear: vec![],
        },
    }
}

/// Outcome of checking an assignment against a model.
#[derive(Debug, Clone)]
pub struct EvalReport {
    pub feasible: bool,
    pub violations: Vec<String>,
    pub objective: f64,
}

fn is_integral(x: f64) -> bool {
    x.fract() == 0.0
}

/// Row-by-row feasibility check: exact on all-integer rows, 1e-9 tolerance
/// elsewhere. The assignment must cover every variable.
pub fn evaluate_model(m: &ModelIr, assignment: &HashMap<String, f64>) -> Result<EvalReport> {
    let mut missing: Vec<String> = m
        .vars
        .iter()
        .filter(|v| !assignment.contains_key(&v.name))
        .map(|v| v.name.clone())
        .collect();
    if !missing.is_empty() {
        missing.sort();
        return Err(Error::MissingVariables(missing));
    }
    let values: Vec<f64> = m.vars.iter().map(|v| assignment[&v.name]).collect();

    let mut violations = Vec::new();
    for (var, &x) in m.vars.iter().zip(&values) {
        if x < var.lb - 1e-9 || x > var.ub + 1e-9 {
            violations.push(format!("var {}: value {} outside [{}, {}]", var.name, x, var.lb, var.ub));
        }
        if matches!(var.kind, VarKind::Binary | VarKind::Integer) && (x - x.round()).abs() > 1e-9 {
            violations.push(format!("var {}: value {} not integral", var.name, x));
        }
    }

    for row in &m.rows {
        let mut lhs = 0.0;
        let mut exact = is_integral(row.rhs);
        for &(v, c) in &row.terms {
            lhs += c * values[v];
            exact = exact && is_integral(c) && is_integral(values[v]);
        }
        for &(c, a, b) in &row.bilinear {
            lhs += c * values[a] * values[b];
            exact = exact && is_integral(c) && is_integral(values[a]) && is_integral(values[b]);
        }
        let tol = if exact { 0.0 } else { 1e-9 };
        let ok = match row.sense {
            Sense::Le => lhs <= row.rhs + tol,
            Sense::Ge => lhs >= row.rhs - tol,
            Sense::Eq => (lhs - row.rhs).abs() <= tol,
        };
        if !ok {
            let op = match row.sense {
                Sense::Le => "<=",
                Sense::Ge => ">=",
                Sense::Eq => "=",
            };
            violations.push(format!("row {}: {} {} {} violated", row.name, lhs, op, row.rhs));
        }
    }

    let mut objective = m.objective.constant;
    for &(v, c) in &m.objective.linear {
        objective += c * values[v];
    }
    for &(c, a, b) in &m.objective.bilinear {
        objective += c * values[a] * values[b];
    }

    Ok(EvalReport {
        feasible: violations.is_empty(),
        violations,
        objective,
    })
}

/// Translate a cascade into a_i_t values for the time-dependent model:
/// collapsers are 0 from round 0, followers drop to 0 at their removal
/// round, survivors stay 1 through the horizon.
pub fn cascade_to_assignment(
    inst: &Instance,
    w: &NodeSet,
    horizon: usize,
) -> Result<HashMap<String, f64>> {
    if w.card() != inst.b {
        return Err(Error::BudgetMismatch {
            expected: inst.b,
            got: w.card(),
        });
    }
    let trace = collapse(inst, w);
    if trace.rounds as usize > horizon {
        return Err(Error::HorizonExceeded {
            needed: trace.rounds,
            horizon: horizon as u32,
        });
    }
    let mut assignment = HashMap::new();
    for i in 0..inst.graph.n() {
        for t in 0..=horizon {
            let present = match trace.removed_at[i] {
                Some(0) => false,
                Some(r) => (t as u32) < r,
                None => true,
            };
            assignment.insert(format!("a_{i}_{t}"), if present { 1.0 } else { 0.0 });
        }
    }
    Ok(assignment)
}
