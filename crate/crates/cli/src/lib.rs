//! Command implementations for the `collapse` binary. Kept as a library so
//! integration tests can drive the commands without spawning processes.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use collapse_core::cascade::{followers_table, Instance};
use collapse_core::cuts::{dominance_cuts, follower_cuts, symmetry_cuts, CutPool};
use collapse_core::error::Error;
use collapse_core::graph::{core_decomposition, parse_edge_list, Graph, ParseOptions};
use collapse_core::lp_format::write_lp_text;
use collapse_core::model::{emit_detection_lp, emit_nonlinear_dual, emit_sparse_master, emit_time_dependent};
use collapse_core::report::{csv_row, method_from_name, run_bench, solve_instance, Manifest, CSV_HEADER};
use collapse_core::solver::SolverConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_TIME_LIMIT: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "collapse", about = "Collapsed k-Core solvers, bounds, cuts and model emitters")]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print k-core size and edge count plus the coreness histogram.
    Decompose {
        graph: PathBuf,
        #[arg(long)]
        k: u32,
    },
    /// Solve the Collapsed k-Core Problem and print a run report.
    Solve {
        graph: PathBuf,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        b: usize,
        /// brute | bnb | cutting-plane
        #[arg(long, default_value = "bnb")]
        method: String,
        #[arg(long)]
        time_limit: Option<f64>,
        #[arg(long)]
        no_dominance: bool,
        #[arg(long)]
        no_symmetry: bool,
        #[arg(long)]
        no_followers: bool,
        #[arg(long, default_value_t = 10)]
        u_threshold: usize,
        #[arg(long, default_value_t = 2)]
        ell_offset: u32,
        /// json | csv
        #[arg(long, default_value = "json")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write an optimization model as an .lp file.
    Emit {
        graph: PathBuf,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 1)]
        b: usize,
        /// td | sparse | dual | detect
        #[arg(long)]
        model: String,
        #[arg(long)]
        out: PathBuf,
        /// Append the inequality families to the time-dependent model.
        #[arg(long)]
        with_cuts: bool,
        /// Keep the w*lambda products bilinear in the dual model (the IR can
        /// then only be dumped as JSON, not LP text).
        #[arg(long)]
        no_linearize: bool,
        #[arg(long)]
        no_dominance: bool,
        #[arg(long)]
        no_symmetry: bool,
        #[arg(long)]
        no_followers: bool,
    },
    /// Run every (instance, method) pair of a manifest and emit CSV.
    Bench {
        manifest: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug)]
pub struct CmdOutput {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

fn ok(stdout: String) -> CmdOutput {
    CmdOutput {
        stdout,
        stderr: String::new(),
        code: EXIT_OK,
    }
}

fn fail(code: i32, msg: String) -> CmdOutput {
    CmdOutput {
        stdout: String::new(),
        stderr: msg,
        code,
    }
}

fn load_graph(path: &Path) -> Result<Graph, CmdOutput> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| fail(EXIT_PARSE, format!("cannot read {}: {e}", path.display())))?;
    parse_edge_list(&text, &ParseOptions::default())
        .map_err(|e| fail(EXIT_PARSE, format!("{}: {e}", path.display())))
}

fn write_or_print(out: &Option<PathBuf>, content: &str) -> Result<String, CmdOutput> {
    match out {
        Some(path) => {
            std::fs::write(path, content)
                .map_err(|e| fail(EXIT_PARSE, format!("cannot write {}: {e}", path.display())))?;
            Ok(format!("wrote {}\n", path.display()))
        }
        None => Ok(content.to_string()),
    }
}

pub fn run(cli: Cli) -> CmdOutput {
    match cli.cmd {
        Command::Decompose { graph, k } => {
            let g = match load_graph(&graph) {
                Ok(g) => g,
                Err(e) => return e,
            };
            let core = collapse_core::graph::kcore(&g, k);
            let sub = match collapse_core::graph::induced_subgraph(&g, &core) {
                Ok(s) => s,
                Err(e) => return fail(EXIT_PARSE, e.to_string()),
            };
            let mut out = format!("{} {}\n", sub.n(), sub.m());
            let decomp = core_decomposition(&g);
            let mut hist: BTreeMap<u32, usize> = BTreeMap::new();
            for &c in &decomp.coreness {
                *hist.entry(c).or_insert(0) += 1;
            }
            for (c, count) in hist {
                out.push_str(&format!("coreness {c}: {count}\n"));
            }
            ok(out)
        }

        Command::Solve {
            graph,
            k,
            b,
            method,
            time_limit,
            no_dominance,
            no_symmetry,
            no_followers,
            u_threshold,
            ell_offset,
            format,
            out,
        } => {
            let g = match load_graph(&graph) {
                Ok(g) => g,
                Err(e) => return e,
            };
            let Some(method) = method_from_name(&method) else {
                return fail(EXIT_PARSE, format!("unknown method '{method}'"));
            };
            let cfg = SolverConfig {
                method,
                time_limit,
                use_dominance: !no_dominance,
                use_symmetry: !no_symmetry,
                use_followers: !no_followers,
                u_threshold,
                ell_offset,
                ..SolverConfig::default()
            };
            let name = graph
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "instance".into());
            let report = match solve_instance(&name, &g, k, b, &cfg) {
                Ok(r) => r,
                Err(e) => return fail(EXIT_PARSE, e.to_string()),
            };
            let rendered = match format.as_str() {
                "json" => match serde_json::to_string_pretty(&report) {
                    Ok(s) => s + "\n",
                    Err(e) => return fail(EXIT_PARSE, e.to_string()),
                },
                "csv" => format!("{CSV_HEADER}\n{}\n", csv_row(&report)),
                other => return fail(EXIT_PARSE, format!("unknown format '{other}'")),
            };
            let stdout = match write_or_print(&out, &rendered) {
                Ok(s) => s,
                Err(e) => return e,
            };
            let code = match report.status.as_str() {
                "optimal" => EXIT_OK,
                "feasible" => EXIT_TIME_LIMIT,
                _ => EXIT_INFEASIBLE,
            };
            CmdOutput {
                stdout,
                stderr: String::new(),
                code,
            }
        }

        Command::Emit {
            graph,
            k,
            b,
            model,
            out,
            with_cuts,
            no_linearize,
            no_dominance,
            no_symmetry,
            no_followers,
        } => {
            let g = match load_graph(&graph) {
                Ok(g) => g,
                Err(e) => return e,
            };
            let build = || -> Result<collapse_core::model::ModelIr, Error> {
                match model.as_str() {
                    "detect" => Ok(emit_detection_lp(&g, k, None)),
                    "td" | "sparse" | "dual" => {
                        let inst = Instance::new(g.clone(), k, b)?.preprocess()?;
                        match model.as_str() {
                            "td" => emit_time_dependent(&inst, with_cuts),
                            "dual" => emit_nonlinear_dual(&inst, !no_linearize),
                            _ => {
                                let mut pool = CutPool::new();
                                let table = followers_table(&inst)?;
                                if !no_dominance {
                                    for c in dominance_cuts(&table) {
                                        pool.add(c);
                                    }
                                }
                                if !no_symmetry {
                                    for c in symmetry_cuts(&table) {
                                        pool.add(c);
                                    }
                                }
                                if !no_followers {
                                    let fc = follower_cuts(&inst, &table);
                                    for c in fc.cuts {
                                        pool.add(c);
                                    }
                                }
                                emit_sparse_master(&inst, &pool)
                            }
                        }
                    }
                    other => Err(Error::CutRefused(format!("unknown model '{other}'"))),
                }
            };
            let ir = match build() {
                Ok(ir) => ir,
                Err(e) => return fail(EXIT_PARSE, e.to_string()),
            };
            let text = match write_lp_text(&ir) {
                Ok(t) => t,
                Err(e) => return fail(EXIT_PARSE, e.to_string()),
            };
            if let Err(e) = std::fs::write(&out, &text) {
                return fail(EXIT_PARSE, format!("cannot write {}: {e}", out.display()));
            }
            ok(format!("wrote {}\n", out.display()))
        }

        Command::Bench { manifest, out } => {
            let text = match std::fs::read_to_string(&manifest) {
                Ok(t) => t,
                Err(e) => return fail(EXIT_PARSE, format!("cannot read {}: {e}", manifest.display())),
            };
            let parsed: Manifest = match serde_json::from_str(&text) {
                Ok(m) => m,
                Err(e) => return fail(EXIT_PARSE, format!("{}: {e}", manifest.display())),
            };
            let base = manifest
                .parent()
                .map(Path::to_path_buf)
                .unwrap_or_else(|| PathBuf::from("."));
            let outcome = run_bench(&parsed, &base);
            let stdout = match write_or_print(&out, &outcome.csv) {
                Ok(s) => s,
                Err(e) => return e,
            };
            CmdOutput {
                stdout,
                stderr: outcome.errors.join("\n"),
                code: EXIT_OK,
            }
        }
    }
}
