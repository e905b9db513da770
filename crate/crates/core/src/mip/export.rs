//! CPLEX-LP and free-MPS writers.
//!
//! Output is a pure function of the model: variables and constraints appear
//! in insertion order and every variable gets an explicit bound line.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::{ConstraintSense, MipError, MipModel, VarKind};

const OBJECTIVE_ROW: &str = "obj";
const TERMS_PER_LINE: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    Lp,
    Mps,
}

impl ExportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ExportFormat::Lp => "lp",
            ExportFormat::Mps => "mps",
        }
    }

    fn label(self) -> &'static str {
        match self {
            ExportFormat::Lp => "LP",
            ExportFormat::Mps => "MPS",
        }
    }
}

pub fn export_model(model: &MipModel, format: ExportFormat) -> Result<String, MipError> {
    model.validate()?;
    check_names(model, format)?;
    Ok(match format {
        ExportFormat::Lp => write_lp(model),
        ExportFormat::Mps => write_mps(model),
    })
}

fn legal_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    name.len() <= 255 && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.')
}

fn check_names(model: &MipModel, format: ExportFormat) -> Result<(), MipError> {
    let names = model
        .variables()
        .iter()
        .map(|v| &v.name)
        .chain(model.constraints().iter().map(|c| &c.name));
    for name in names {
        if !legal_name(name) {
            return Err(MipError::IllegalName {
                name: name.clone(),
                format: format.label(),
            });
        }
    }
    if model.constraint_by_name(OBJECTIVE_ROW).is_some() {
        return Err(MipError::IllegalName {
            name: OBJECTIVE_ROW.into(),
            format: format.label(),
        });
    }
    if !model.name.is_empty() && !legal_name(&model.name) {
        return Err(MipError::IllegalName {
            name: model.name.clone(),
            format: format.label(),
        });
    }
    Ok(())
}

/// Shortest representation that parses back to the same `f64`.
fn num(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x:?}")
    }
}

fn write_linear(out: &mut String, model: &MipModel, terms: &[(super::VarId, f64)]) {
    if terms.is_empty() {
        if let Some(first) = model.variables().first() {
            let _ = write!(out, " 0 {}", first.name);
        }
        return;
    }
    for (i, &(v, c)) in terms.iter().enumerate() {
        if i > 0 && i % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let sign = if c < 0.0 { '-' } else { '+' };
        let name = &model.variable(v).name;
        if i == 0 && c >= 0.0 {
            let _ = write!(out, " {} {}", num(c), name);
        } else {
            let _ = write!(out, " {sign} {} {}", num(c.abs()), name);
        }
    }
}

fn write_lp(model: &MipModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "\\ Problem: {}", model.name);
    out.push_str("Minimize\n");
    let _ = write!(out, " {OBJECTIVE_ROW}:");
    write_linear(&mut out, model, &model.objective());
    out.push('\n');

    out.push_str("Subject To\n");
    for c in model.constraints() {
        let _ = write!(out, " {}:", c.name);
        write_linear(&mut out, model, &c.terms);
        let _ = writeln!(out, " {} {}", c.sense, num(c.rhs));
    }

    out.push_str("Bounds\n");
    for v in model.variables() {
        let line = match (v.lower.is_finite(), v.upper.is_finite()) {
            _ if v.lower == v.upper => format!(" {} = {}", v.name, num(v.lower)),
            (false, false) => format!(" {} free", v.name),
            (false, true) => format!(" -inf <= {} <= {}", v.name, num(v.upper)),
            (true, false) => format!(" {} >= {}", v.name, num(v.lower)),
            (true, true) => format!(" {} <= {} <= {}", num(v.lower), v.name, num(v.upper)),
        };
        out.push_str(&line);
        out.push('\n');
    }

    let integers: Vec<&str> = model
        .variables()
        .iter()
        .filter(|v| v.kind == VarKind::Integer)
        .map(|v| v.name.as_str())
        .collect();
    if !integers.is_empty() {
        out.push_str("General\n");
        for chunk in integers.chunks(TERMS_PER_LINE) {
            let _ = writeln!(out, " {}", chunk.join(" "));
        }
    }
    out.push_str("End\n");
    out
}

fn write_mps(model: &MipModel) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "NAME {}",
        if model.name.is_empty() {
            "model"
        } else {
            &model.name
        }
    );
    out.push_str("ROWS\n");
    let _ = writeln!(out, " N {OBJECTIVE_ROW}");
    for c in model.constraints() {
        let kind = match c.sense {
            ConstraintSense::Le => 'L',
            ConstraintSense::Ge => 'G',
            ConstraintSense::Eq => 'E',
        };
        let _ = writeln!(out, " {kind} {}", c.name);
    }

    // column-major view of the rows
    let mut columns: Vec<Vec<(usize, f64)>> = vec![Vec::new(); model.num_vars()];
    for (r, c) in model.constraints().iter().enumerate() {
        for &(v, a) in &c.terms {
            columns[v.0].push((r, a));
        }
    }

    out.push_str("COLUMNS\n");
    let mut in_marker = false;
    let mut marker = 0usize;
    for (j, v) in model.variables().iter().enumerate() {
        let is_int = v.kind == VarKind::Integer;
        if is_int != in_marker {
            let tag = if is_int { "INTORG" } else { "INTEND" };
            let _ = writeln!(out, " MARKER{marker} 'MARKER' '{tag}'");
            marker += 1;
            in_marker = is_int;
        }
        let cost = model.objective_coef(super::VarId(j));
        if cost != 0.0 || columns[j].is_empty() {
            let _ = writeln!(out, " {} {OBJECTIVE_ROW} {}", v.name, num(cost));
        }
        for &(r, a) in &columns[j] {
            let _ = writeln!(
                out,
                " {} {} {}",
                v.name,
                model.constraints()[r].name,
                num(a)
            );
        }
    }
    if in_marker {
        let _ = writeln!(out, " MARKER{marker} 'MARKER' 'INTEND'");
    }

    out.push_str("RHS\n");
    for c in model.constraints() {
        if c.rhs != 0.0 {
            let _ = writeln!(out, " RHS {} {}", c.name, num(c.rhs));
        }
    }

    out.push_str("BOUNDS\n");
    for v in model.variables() {
        let n = &v.name;
        if v.lower == v.upper {
            let _ = writeln!(out, " FX BND {n} {}", num(v.lower));
            continue;
        }
        match (v.lower.is_finite(), v.upper.is_finite()) {
            (false, false) => {
                let _ = writeln!(out, " FR BND {n}");
            }
            (false, true) => {
                let _ = writeln!(out, " MI BND {n}");
                let _ = writeln!(out, " UP BND {n} {}", num(v.upper));
            }
            (true, upper_finite) => {
                if v.lower != 0.0 || v.kind == VarKind::Integer {
                    let _ = writeln!(out, " LO BND {n} {}", num(v.lower));
                }
                if upper_finite {
                    let _ = writeln!(out, " UP BND {n} {}", num(v.upper));
                } else if v.kind == VarKind::Integer {
                    let _ = writeln!(out, " PL BND {n}");
                }
            }
        }
    }
    out.push_str("ENDATA\n");
    out
}
