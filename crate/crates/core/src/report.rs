//! Run reports and the benchmark harness shared by the CLI and the tests.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bounds::lower_bound_m;
use crate::cascade::Instance;
use crate::error::{Error, Result};
use crate::graph::{parse_edge_list, Graph, ParseOptions};
use crate::solver::{solve, Method, SolverConfig, SolverStatus};

/// One solver run over one instance, serializable to JSON and to a frozen
/// CSV column set.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub instance: String,
    pub n_before: usize,
    pub m_before: usize,
    pub n_after: usize,
    pub m_after: usize,
    pub k: u32,
    pub b: usize,
    pub method: String,
    pub status: String,
    pub value: usize,
    pub lb: usize,
    pub gap_pct: f64,
    pub time_s: f64,
    pub nodes: u64,
    pub cuts: BTreeMap<String, usize>,
    /// Interdicted nodes reported by their original input labels.
    pub set: Vec<String>,
    pub bound_m: usize,
    pub bound_h: u32,
    pub greedy_value: usize,
    pub greedy_set: Vec<String>,
}

/// The paper's gap definition, 100 (UB - LB) / UB, with gap 0 at UB = 0.
pub fn gap_pct(ub: usize, lb: usize) -> f64 {
    if ub == 0 {
        0.0
    } else {
        100.0 * (ub.saturating_sub(lb)) as f64 / ub as f64
    }
}

/// CSV columns, frozen: see README.
pub const CSV_HEADER: &str = "instance,k,b,method,value,lb,gap_pct,time_s,nodes";

pub fn csv_row(r: &RunReport) -> String {
    format!(
        "{},{},{},{},{},{},{:.4},{:.4},{}",
        r.instance, r.k, r.b, r.method, r.value, r.lb, r.gap_pct, r.time_s, r.nodes
    )
}

pub fn method_from_name(name: &str) -> Option<Method> {
    match name {
        "brute" => Some(Method::Brute),
        "bnb" => Some(Method::BranchAndBound),
        "cutting-plane" => Some(Method::CuttingPlane),
        _ => None,
    }
}

/// Preprocess, compute bounds and run the configured method. An instance
/// whose budget exceeds the preprocessed node count reports `infeasible`.
pub fn solve_instance(
    name: &str,
    graph: &Graph,
    k: u32,
    b: usize,
    cfg: &SolverConfig,
) -> Result<RunReport> {
    let n_before = graph.n();
    let m_before = graph.m();
    let raw = Instance {
        graph: graph.clone(),
        k,
        b: 0,
    };
    let core = raw.preprocess()?;
    let n_after = core.graph.n();
    let m_after = core.graph.m();

    if b > n_after {
        return Ok(RunReport {
            instance: name.into(),
            n_before,
            m_before,
            n_after,
            m_after,
            k,
            b,
            method: cfg.method.name().into(),
            status: SolverStatus::Infeasible.name().into(),
            value: 0,
            lb: 0,
            gap_pct: 0.0,
            time_s: 0.0,
            nodes: 0,
            cuts: BTreeMap::new(),
            set: vec![],
            bound_m: 0,
            bound_h: k + b as u32,
            greedy_value: 0,
            greedy_set: vec![],
        });
    }

    let inst = Instance {
        graph: core.graph,
        k,
        b,
    };
    let binfo = lower_bound_m(&inst)?;
    let (greedy_w, greedy_value) = crate::bounds::greedy_upper_bound(&inst)?;
    let result = solve(&inst, cfg)?;

    let labels = |s: &crate::graph::NodeSet| -> Vec<String> {
        s.iter().map(|v| inst.graph.label(v).to_string()).collect()
    };
    Ok(RunReport {
        instance: name.into(),
        n_before,
        m_before,
        n_after,
        m_after,
        k,
        b,
        method: cfg.method.name().into(),
        status: result.status.name().into(),
        value: result.best_value,
        lb: result.proven_lb,
        gap_pct: gap_pct(result.best_value, result.proven_lb),
        time_s: result.wall_time,
        nodes: result.nodes_explored,
        cuts: result
            .cuts_added
            .iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect(),
        set: labels(&result.best_w),
        bound_m: binfo.m,
        bound_h: binfo.h,
        greedy_value,
        greedy_set: labels(&greedy_w),
    })
}

#[derive(Debug, Clone, Deserialize)]
pub struct ManifestEntry {
    pub graph_path: String,
    pub k: u32,
    pub b: usize,
    pub name: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Manifest {
    pub instances: Vec<ManifestEntry>,
    pub methods: Vec<String>,
    pub time_limit: Option<f64>,
}

#[derive(Debug)]
pub struct BenchOutcome {
    pub reports: Vec<RunReport>,
    pub errors: Vec<String>,
    pub csv: String,
}

/// Run every (instance, method) pair of a manifest; failures are recorded
/// and the run continues. The CSV carries one row per report plus a footer
/// with #opt, mean gap and mean time.
pub fn run_bench(manifest: &Manifest, base_dir: &Path) -> BenchOutcome {
    let mut reports = Vec::new();
    let mut errors = Vec::new();

    for entry in &manifest.instances {
        let path = base_dir.join(&entry.graph_path);
        let default_name = Path::new(&entry.graph_path)
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| entry.graph_path.clone());
        let name = entry.name.clone().unwrap_or(default_name);
        let graph = match std::fs::read_to_string(&path)
            .map_err(Error::from)
            .and_then(|text| parse_edge_list(&text, &ParseOptions::default()))
        {
            Ok(g) => g,
            Err(e) => {
                errors.push(format!("{name}: {e}"));
                continue;
            }
        };
        for method_name in &manifest.methods {
            let Some(method) = method_from_name(method_name) else {
                errors.push(format!("{name}: unknown method '{method_name}'"));
                continue;
            };
            let cfg = SolverConfig {
                method,
                time_limit: manifest.time_limit,
                ..SolverConfig::default()
            };
            match solve_instance(&name, &graph, entry.k, entry.b, &cfg) {
                Ok(report) => reports.push(report),
                Err(e) => errors.push(format!("{name}/{method_name}: {e}")),
            }
        }
    }

    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    for r in &reports {
        csv.push_str(&csv_row(r));
        csv.push('\n');
    }
    let opt = reports.iter().filter(|r| r.gap_pct == 0.0).count();
    let mean =
        |f: fn(&RunReport) -> f64| -> f64 {
            if reports.is_empty() {
                0.0
            } else {
                reports.iter().map(f).sum::<f64>() / reports.len() as f64
            }
        };
    csv.push_str(&format!(
        "# summary: opt={} mean_gap_pct={:.4} mean_time_s={:.4}\n",
        opt,
        mean(|r| r.gap_pct),
        mean(|r| r.time_s)
    ));
    for e in &errors {
        csv.push_str(&format!("# error: {e}\n"));
    }

    BenchOutcome {
        reports,
        errors,
        csv,
    }
}
