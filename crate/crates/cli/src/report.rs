//! Reports shared by all subcommands and their three renderings.

use serde_json::{json, Map, Number, Value};
use std::fmt::Write as _;
use std::str::FromStr;

/// How a check compares `measured` against `expected`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// |measured − expected| ≤ tolerance.
    Within,
    /// measured > expected.
    Above,
    /// measured ≤ expected.
    AtMost,
}

impl Relation {
    pub fn as_str(self) -> &'static str {
        match self {
            Relation::Within => "within",
            Relation::Above => "above",
            Relation::AtMost => "at_most",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub expected: f64,
    pub measured: f64,
    pub tolerance: Option<f64>,
    pub relation: Relation,
    pub pass: bool,
}

impl Check {
    pub fn within(name: impl Into<String>, expected: f64, measured: f64, tolerance: f64) -> Self {
        let pass = (measured - expected).abs() <= tolerance;
        Check { name: name.into(), expected, measured, tolerance: Some(tolerance), relation: Relation::Within, pass }
    }

    pub fn above(name: impl Into<String>, threshold: f64, measured: f64) -> Self {
        Check { name: name.into(), expected: threshold, measured, tolerance: None, relation: Relation::Above, pass: measured > threshold }
    }

    pub fn at_most(name: impl Into<String>, bound: f64, measured: f64) -> Self {
        Check { name: name.into(), expected: bound, measured, tolerance: None, relation: Relation::AtMost, pass: measured <= bound }
    }
}

/// Columnar data, e.g. (λ, S(λ)) or (t, φ̃(t)) pairs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Series {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub target: String,
    pub checks: Vec<Check>,
    pub values: Vec<(String, f64)>,
    pub series: Option<Series>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(command: &str, target: impl Into<String>) -> Self {
        Report { command: command.into(), target: target.into(), checks: Vec::new(), values: Vec::new(), series: None, notes: Vec::new() }
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn value(&mut self, name: impl Into<String>, v: f64) {
        self.values.push((name.into(), v));
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> Value {
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| {
                json!({
                    "name": c.name,
                    "expected": num17(c.expected),
                    "measured": num17(c.measured),
                    "tolerance": c.tolerance.map_or(Value::Null, num17),
                    "relation": c.relation.as_str(),
                    "pass": c.pass,
                })
            })
            .collect();
        let mut values = Map::new();
        for (k, v) in &self.values {
            values.insert(k.clone(), num17(*v));
        }
        let series = match &self.series {
            None => Value::Null,
            Some(s) => json!({
                "columns": s.columns,
                "rows": s.rows.iter().map(|r| Value::Array(r.iter().map(|&x| num17(x)).collect())).collect::<Vec<_>>(),
            }),
        };
        json!({
            "command": self.command,
            "target": self.target,
            "pass": self.pass(),
            "checks": checks,
            "values": values,
            "series": series,
            "notes": self.notes,
        })
    }

    /// Series rows when present, otherwise one row per check.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match &self.series {
            Some(s) => {
                out.push_str(&s.columns.join(","));
                out.push('\n');
                for r in &s.rows {
                    let cells: Vec<String> = r.iter().map(|&x| sig17(x)).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
            }
            None => {
                out.push_str("name,expected,measured,tolerance,relation,pass\n");
                for c in &self.checks {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{}",
                        csv_field(&c.name),
                        sig17(c.expected),
                        sig17(c.measured),
                        c.tolerance.map_or(String::new(), sig17),
                        c.relation.as_str(),
                        if c.pass { "PASS" } else { "FAIL" }
                    );
                }
                for (k, v) in &self.values {
                    let _ = writeln!(out, "{},,{},,value,", csv_field(k), sig17(*v));
                }
            }
        }
        out
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.command, self.target);
        if !self.values.is_empty() {
            let w = self.values.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
            for (k, v) in &self.values {
                let _ = writeln!(out, "  {k:<w$}  {}", sig10(*v));
            }
        }
        if let Some(s) = &self.series {
            let _ = writeln!(out, "  {}", s.columns.iter().map(|c| format!("{c:>17}")).collect::<String>());
            for r in &s.rows {
                let _ = writeln!(out, "  {}", r.iter().map(|&x| format!("{:>17}", sig10(x))).collect::<String>());
            }
        }
        if !self.checks.is_empty() {
            let w = self.checks.iter().map(|c| c.name.chars().count()).max().unwrap_or(0);
            for c in &self.checks {
                let cmp = match c.relation {
                    Relation::Within => format!("expected {} ± {}", sig10(c.expected), sig10(c.tolerance.unwrap_or(0.0))),
                    Relation::Above => format!("required > {}", sig10(c.expected)),
                    Relation::AtMost => format!("required ≤ {}", sig10(c.expected)),
                };
                let _ = writeln!(
                    out,
                    "  {} {:<w$}  measured {}  {cmp}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    sig10(c.measured)
                );
            }
            let _ = writeln!(out, "{}", if self.pass() { "PASS" } else { "FAIL" });
        }
        for n in &self.notes {
            let _ = writeln!(out, "  note: {n}");
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// 17 significant digits, scientific notation; "NaN"/"inf" for non-finite.
pub fn sig17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// 10 significant digits, positional for moderate magnitudes.
pub fn sig10(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x.fract() == 0.0 && x.abs() < 1e15 {
        return format!("{}", x as i64);
    }
    let e = x.abs().log10().floor() as i32;
    if (-4..10).contains(&e) {
        let decimals = (9 - e).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.9e}")
    }
}

/// JSON number carrying exactly 17 significant digits; null when not finite.
pub fn num17(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    Number::from_str(&sig17(x)).map(Value::Number).unwrap_or(Value::Null)
}
