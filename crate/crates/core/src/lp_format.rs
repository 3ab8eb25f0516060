//! Writer and parser for the standard LP text format. Emission is
//! deterministic (fixed section order, every variable listed in the Bounds
//! section in declaration order) so files round-trip byte-identically.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{Goal, ModelIr, ModelObjective, ModelRow, ModelVar, Sense, VarKind};

fn fmt_num(x: f64) -> String {
    // shortest representation that parses back to the same f64
    format!("{x}")
}

fn push_terms(out: &mut String, terms: &[(usize, f64)], vars: &[ModelVar], lead_written: bool) {
    let mut first = !lead_written;
    for &(v, c) in terms {
        let c = if c == 0.0 { 0.0 } else { c };
        let sign = if c < 0.0 { "-" } else { "+" };
        let mag = fmt_num(c.abs());
        if first {
            first = false;
            let _ = write!(out, "{sign} {mag} {}", vars[v].name);
        } else {
            let _ = write!(out, " {sign} {mag} {}", vars[v].name);
        }
    }
}

/// Write a linear model as LP format text. Bilinear models are refused;
/// linearize first.
pub fn write_lp_text(m: &ModelIr) -> Result<String> {
    if !m.is_linear() {
        return Err(Error::BilinearUnsupported);
    }
    let mut out = String::new();
    let _ = writeln!(out, "\\ Problem: {}", m.name);
    out.push_str(match m.objective.goal {
        Goal::Minimize => "Minimize\n",
        Goal::Maximize => "Maximize\n",
    });
    out.push_str(" obj:");
    if m.objective.linear.is_empty() && m.objective.constant == 0.0 {
        out.push_str(" + 0");
    } else {
        out.push(' ');
        push_terms(&mut out, &m.objective.linear, &m.vars, false);
        if m.objective.constant != 0.0 {
            let sign = if m.objective.constant < 0.0 { "-" } else { "+" };
            let sep = if m.objective.linear.is_empty() { "" } else { " " };
            let _ = write!(out, "{sep}{sign} {}", fmt_num(m.objective.constant.abs()));
        }
    }
    out.push('\n');

    out.push_str("Subject To\n");
    for row in &m.rows {
        let _ = write!(out, " {}: ", row.name);
        push_terms(&mut out, &row.terms, &m.vars, false);
        let op = match row.sense {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        };
        let _ = writeln!(out, " {op} {}", fmt_num(row.rhs));
    }

    out.push_str("Bounds\n");
    for v in &m.vars {
        let line = match (v.lb.is_finite(), v.ub.is_finite()) {
            (true, true) => format!(" {} <= {} <= {}", fmt_num(v.lb), v.name, fmt_num(v.ub)),
            (true, false) => format!(" {} >= {}", v.name, fmt_num(v.lb)),
            (false, true) => format!(" {} <= {}", v.name, fmt_num(v.ub)),
            (false, false) => format!(" {} free", v.name),
        };
        out.push_str(&line);
        out.push('\n');
    }

    let binaries: Vec<&str> = m
        .vars
        .iter()
        .filter(|v| v.kind == VarKind::Binary)
        .map(|v| v.name.as_str())
        .collect();
    if !binaries.is_empty() {
        out.push_str("Binaries\n");
        for name in binaries {
            let _ = writeln!(out, " {name}");
        }
    }
    let generals: Vec<&str> = m
        .vars
        .iter()
        .filter(|v| v.kind == VarKind::Integer)
        .map(|v| v.name.as_str())
        .collect();
    if !generals.is_empty() {
        out.push_str("Generals\n");
        for name in generals {
            let _ = writeln!(out, " {name}");
        }
    }
    out.push_str("End\n");
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Preamble,
    Objective,
    Rows,
    Bounds,
    Binaries,
    Generals,
    End,
}

/// Parse LP text produced by [`write_lp_text`] back into a model. Variable
/// order is recovered from the Bounds section, which the writer emits for
/// every variable.
pub fn parse_lp_text(text: &str) -> Result<ModelIr> {
    let mut name = String::from("model");
    let mut goal = Goal::Minimize;
    let mut objective_tokens: Vec<String> = Vec::new();
    let mut row_lines: Vec<String> = Vec::new();
    let mut bound_lines: Vec<String> = Vec::new();
    let mut binaries: Vec<String> = Vec::new();
    let mut generals: Vec<String> = Vec::new();

    let mut section = Section::Preamble;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('\\') {
            if let Some(n) = rest.trim().strip_prefix("Problem:") {
                name = n.trim().to_string();
            }
            continue;
        }
        let lowered = line.to_ascii_lowercase();
        section = match lowered.as_str() {
            "minimize" => {
                goal = Goal::Minimize;
                Section::Objective
            }
            "maximize" => {
                goal = Goal::Maximize;
                Section::Objective
            }
            "subject to" | "st" | "s.t." => Section::Rows,
            "bounds" => Section::Bounds,
            "binaries" | "binary" => Section::Binaries,
            "generals" | "general" => Section::Generals,
            "end" => Section::End,
            _ => {
                match section {
                    Section::Objective => objective_tokens
                        .extend(line.split_whitespace().map(str::to_string)),
                    Section::Rows => row_lines.push(line.to_string()),
                    Section::Bounds => bound_lines.push(line.to_string()),
                    Section::Binaries => binaries.extend(line.split_whitespace().map(str::to_string)),
                    Section::Generals => generals.extend(line.split_whitespace().map(str::to_string)),
                    Section::Preamble | Section::End => {
                        return Err(Error::Parse {
                            line: lineno + 1,
                            msg: format!("unexpected content outside sections: {line}"),
                        })
                    }
                }
                section
            }
        };
    }

    // variables in Bounds order
    let mut vars: Vec<ModelVar> = Vec::new();
    for (i, line) in bound_lines.iter().enumerate() {
        let toks: Vec<&str> = line.split_whitespace().collect();
        let parse_err = |msg: &str| Error::Parse {
            line: i + 1,
            msg: format!("bounds line '{line}': {msg}"),
        };
        let (name, lb, ub) = match toks.as_slice() {
            [lb, "<=", name, "<=", ub] => (
                name.to_string(),
                lb.parse::<f64>().map_err(|_| parse_err("bad lower bound"))?,
                ub.parse::<f64>().map_err(|_| parse_err("bad upper bound"))?,
            ),
            [name, ">=", lb] => (
                name.to_string(),
                lb.parse::<f64>().map_err(|_| parse_err("bad lower bound"))?,
                f64::INFINITY,
            ),
            [name, "<=", ub] => (
                name.to_string(),
                f64::NEG_INFINITY,
                ub.parse::<f64>().map_err(|_| parse_err("bad upper bound"))?,
            ),
            [name, "free"] => (name.to_string(), f64::NEG_INFINITY, f64::INFINITY),
            _ => return Err(parse_err("unrecognized shape")),
        };
        vars.push(ModelVar {
            name,
            kind: VarKind::Continuous,
            lb,
            ub,
        });
    }
    for b in &binaries {
        if let Some(ix) = vars.iter().position(|v| &v.name == b) {
            vars[ix].kind = VarKind::Binary;
        }
    }
    for g in &generals {
        if let Some(ix) = vars.iter().position(|v| &v.name == g) {
            vars[ix].kind = VarKind::Integer;
        }
    }
    let index_of = |nm: &str| vars.iter().position(|v| v.name == nm);

    // objective: drop the leading "obj:" label
    let mut obj_tokens = objective_tokens;
    if let Some(first) = obj_tokens.first() {
        if first.ends_with(':') {
            obj_tokens.remove(0);
        }
    }
    let (linear, constant) = parse_terms(&obj_tokens, &index_of)?;

    let mut rows = Vec::new();
    for (i, line) in row_lines.iter().enumerate() {
        let (rname, rest) = line.split_once(':').ok_or_else(|| Error::Parse {
            line: i + 1,
            msg: format!("row without name: {line}"),
        })?;
        let tokens: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
        let op_pos = tokens
            .iter()
            .position(|t| t == "<=" || t == ">=" || t == "=")
            .ok_or_else(|| Error::Parse {
                line: i + 1,
                msg: format!("row without comparison: {line}"),
            })?;
        let sense = match tokens[op_pos].as_str() {
            "<=" => Sense::Le,
            ">=" => Sense::Ge,
            _ => Sense::Eq,
        };
        let rhs: f64 = tokens[op_pos + 1].parse().map_err(|_| Error::Parse {
            line: i + 1,
            msg: format!("bad rhs in {line}"),
        })?;
        let (terms, constant) = parse_terms(&tokens[..op_pos], &index_of)?;
        rows.push(ModelRow {
            name: rname.trim().to_string(),
            terms,
            bilinear: vec![],
            sense,
            rhs: rhs - constant,
        });
    }

    Ok(ModelIr {
        name,
        vars,
        rows,
        objective: ModelObjective {
            goal,
            constant,
            linear,
            bilinear: vec![],
        },
    })
}

/// Parse "+ c name - c name + c" token runs; bare numbers fold into the
/// returned constant.
fn parse_terms<F>(tokens: &[String], index_of: &F) -> Result<(Vec<(usize, f64)>, f64)>
where
    F: Fn(&str) -> Option<usize>,
{
    let mut terms = Vec::new();
    let mut constant = 0.0;
    let mut i = 0;
    let mut sign = 1.0;
    let mut pending: Option<f64> = None;
    while i < tokens.len() {
        let tok = &tokens[i];
        match tok.as_str() {
            "+" => {
                if let Some(c) = pending.take() {
                    constant += c;
                }
                sign = 1.0;
            }
            "-" => {
                if let Some(c) = pending.take() {
                    constant += c;
                }
                sign = -1.0;
            }
            _ => {
                if let Ok(num) = tok.parse::<f64>() {
                    if let Some(c) = pending.take() {
                        constant += c;
                    }
                    pending = Some(sign * num);
                } else {
                    let ix = index_of(tok).ok_or_else(|| Error::Parse {
                        line: 0,
                        msg: format!("unknown variable '{tok}'"),
                    })?;
                    let coeff = pending.take().unwrap_or(sign);
                    terms.push((ix, coeff));
                }
            }
        }
        i += 1;
    }
    if let Some(c) = pending.take() {
        constant += c;
    }
    Ok((terms, constant))
}
