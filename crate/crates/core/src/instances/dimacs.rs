//! DIMACS CNF: `c` comment lines, one `p cnf <vars> <clauses>` header,
//! then whitespace-separated literals with each clause ended by `0`.
//! Clauses may span lines; a trailing `%` line (common in benchmark
//! files) ends the input.

use super::types::CnfInstance;
use crate::error::{Error, Result};

fn err(line: usize, field: &str, msg: impl Into<String>) -> Error {
    Error::Format { line, field: field.into(), msg: msg.into() }
}

pub fn parse_dimacs(text: &str) -> Result<CnfInstance> {
    let mut header: Option<(u32, usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<i32> = Vec::new();
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        last_line = ln;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(err(ln, "p", "second problem line"));
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let [_, "cnf", vars, count] = parts[..] else {
                return Err(err(ln, "p", "expected `p cnf <vars> <clauses>`"));
            };
            let vars = vars.parse().map_err(|_| err(ln, "p", format!("bad variable count {vars:?}")))?;
            let count = count.parse().map_err(|_| err(ln, "p", format!("bad clause count {count:?}")))?;
            header = Some((vars, count, ln));
            continue;
        }
        let Some((vars, ..)) = header else {
            return Err(err(ln, "p", "clause before the problem line"));
        };
        for tok in line.split_whitespace() {
            let lit: i32 = tok.parse().map_err(|_| err(ln, "literal", format!("not an integer: {tok:?}")))?;
            if lit == 0 {
                if current.is_empty() {
                    return Err(err(ln, "literal", "empty clause"));
                }
                clauses.push(std::mem::take(&mut current));
            } else if lit.unsigned_abs() > vars {
                return Err(err(ln, "literal", format!("variable {} outside 1..={vars}", lit.unsigned_abs())));
            } else {
                current.push(lit);
            }
        }
    }
    let Some((vars, count, hln)) = header else {
        return Err(err(last_line.max(1), "p", "missing problem line"));
    };
    // Tolerate a final clause without its terminating 0.
    if !current.is_empty() {
        clauses.push(current);
    }
    if clauses.len() != count {
        return Err(err(hln, "p", format!("header declares {count} clauses, found {}", clauses.len())));
    }
    CnfInstance::new(vars, clauses)
}

pub fn to_dimacs(inst: &CnfInstance) -> String {
    let mut out = format!("p cnf {} {}\n", inst.num_vars, inst.clauses.len());
    for c in &inst.clauses {
        for l in c {
            out += &format!("{l} ");
        }
        out += "0\n";
    }
    out
}
