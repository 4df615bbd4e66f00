//! Subcommand implementations. Each returns rendered text and the overall verdict.

pub mod dual;
pub mod eval;
pub mod riesz;
pub mod verify;

use crate::config::Format;
use crate::report::Report;
use crate::Failure;

pub struct Output {
    pub text: String,
    pub pass: bool,
}

pub fn render(report: &Report, format: Format) -> Output {
    let text = match format {
        Format::Table => report.to_table(),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.to_json()).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Csv => report.to_csv(),
    };
    Output { text, pass: report.pass() }
}

/// "a,b,c" as three finite reals.
pub fn parse_triple(s: &str, what: &str) -> Result<[f64; 3], Failure> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(Failure::usage(format!("{what} needs three comma-separated values, got {s:?}")));
    }
    let mut out = [0.0; 3];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p.parse::<f64>().map_err(|_| Failure::usage(format!("{what}: {p:?} is not a number")))?;
        if !o.is_finite() {
            return Err(Failure::usage(format!("{what}: {p:?} is not finite")));
        }
    }
    Ok(out)
}

/// "B3" (or "b3", "3") as the order 3.
pub fn parse_bspline(s: &str) -> Result<usize, Failure> {
    let digits = s.trim().trim_start_matches(['B', 'b']);
    match digits.parse::<usize>() {
        Ok(k) if k >= 1 => Ok(k),
        _ => Err(Failure::usage(format!("unknown separable generator {s:?}; expected B1, B2, B3, ..."))),
    }
}
