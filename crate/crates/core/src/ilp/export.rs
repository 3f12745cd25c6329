//! LP text export (CPLEX LP format): minimize section, subject-to rows,
//! binary section. Output is byte-stable for a fixed model.

use super::{IlpModel, RowSense};
use std::fmt::Write as _;
use std::path::Path;

/// Render the model as LP text.
pub fn export_lp_string(model: &IlpModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "\\ Problem: {}", model.name);
    let _ = writeln!(
        out,
        "\\ {} binary variables, {} constraints",
        model.vars.len(),
        model.rows.len()
    );
    out.push_str("Minimize\n");
    if model.vars.is_empty() {
        out.push_str(" obj: 0\n");
    } else {
        out.push_str(" obj:");
        for (i, v) in model.vars.iter().enumerate() {
            push_term(
                &mut out,
                i == 0,
                false,
                &micro_to_text(v.energy_micro),
                &v.name,
            );
        }
        out.push('\n');
    }
    out.push_str("Subject To\n");
    for row in &model.rows {
        let _ = write!(out, " {}:", row.name);
        for (i, &(var, coeff_milli)) in row.terms.iter().enumerate() {
            push_term(
                &mut out,
                i == 0,
                coeff_milli < 0,
                &milli_to_text(coeff_milli.abs()),
                &model.vars[var].name,
            );
        }
        let sense = match row.sense {
            RowSense::Le => "<=",
            RowSense::Eq => "=",
        };
        let _ = writeln!(out, " {} {}", sense, milli_to_text(row.rhs_milli));
    }
    out.push_str("Binary\n");
    for v in &model.vars {
        let _ = writeln!(out, " {}", v.name);
    }
    out.push_str("End\n");
    out
}

/// Write the LP text to a file.
pub fn export_lp(model: &IlpModel, path: &Path) -> std::io::Result<()> {
    std::fs::write(path, export_lp_string(model))
}

fn push_term(out: &mut String, first: bool, negative: bool, coeff: &str, name: &str) {
    match (first, negative) {
        (true, false) => {}
        (true, true) => out.push_str(" -"),
        (false, false) => out.push_str(" +"),
        (false, true) => out.push_str(" -"),
    }
    out.push(' ');
    if coeff != "1" {
        out.push_str(coeff);
        out.push(' ');
    }
    out.push_str(name);
}

/// Milli-unit integer as decimal text without trailing zeros.
fn milli_to_text(milli: i64) -> String {
    scaled_to_text(milli, 1000)
}

/// Micro-unit integer as decimal text without trailing zeros.
fn micro_to_text(micro: i64) -> String {
    scaled_to_text(micro, 1_000_000)
}

fn scaled_to_text(value: i64, scale: i64) -> String {
    let sign = if value < 0 { "-" } else { "" };
    let value = value.abs();
    let whole = value / scale;
    let frac = value % scale;
    if frac == 0 {
        return format!("{sign}{whole}");
    }
    let width = (scale as f64).log10().round() as usize;
    let mut text = format!("{sign}{whole}.{frac:0width$}");
    while text.ends_with('0') {
        text.pop();
    }
    text
}
