//! MIP instances: MPS parsing, known-optimum sidecars and CSV round reports.

use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{Rational, Scalar};
use crate::simplex::{LpModel, LpRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Eq,
    Ge,
}

/// A mixed-integer program `min c x + c0` over rows `a_i x (sense) b_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub name: String,
    pub num_vars: usize,
    pub num_rows: usize,
    pub objective: Vec<f64>,
    pub obj_constant: f64,
    pub row_names: Vec<String>,
    pub row_senses: Vec<RowSense>,
    pub rhs: Vec<f64>,
    pub var_names: Vec<String>,
    /// Sparse column lists `(row, coefficient)`.
    pub columns: Vec<Vec<(usize, f64)>>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub is_integer: Vec<bool>,
}

#[derive(Debug, Error, PartialEq)]
pub enum InstanceError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("missing ENDATA (line {line})")]
    MissingEndata { line: usize },
    #[error("instance invalid: {0}")]
    Invalid(String),
}

fn perr(line: usize, msg: impl Into<String>) -> InstanceError {
    InstanceError::Parse {
        line,
        msg: msg.into(),
    }
}

impl Instance {
    /// Checks index ranges and bound ordering.
    pub fn validate(&self) -> Result<(), InstanceError> {
        let bad = |m: String| Err(InstanceError::Invalid(m));
        if self.columns.len() != self.num_vars
            || self.lower.len() != self.num_vars
            || self.upper.len() != self.num_vars
            || self.is_integer.len() != self.num_vars
            || self.objective.len() != self.num_vars
        {
            return bad("column arrays disagree with num_vars".into());
        }
        if self.row_senses.len() != self.num_rows || self.rhs.len() != self.num_rows {
            return bad("row arrays disagree with num_rows".into());
        }
        for (j, col) in self.columns.iter().enumerate() {
            if let Some((i, _)) = col.iter().find(|(i, _)| *i >= self.num_rows) {
                return bad(format!("column {} references row {}", j, i));
            }
            if self.lower[j] > self.upper[j] {
                return bad(format!("column {} has lower > upper", j));
            }
        }
        Ok(())
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.var_names.iter().position(|v| v == name)
    }

    pub fn row_coefficients(&self) -> Vec<Vec<(usize, f64)>> {
        let mut rows = vec![Vec::new(); self.num_rows];
        for (j, col) in self.columns.iter().enumerate() {
            for (i, a) in col {
                rows[*i].push((j, *a));
            }
        }
        rows
    }

    /// The LP relaxation as a solver model.
    pub fn to_lp(&self) -> LpModel<f64> {
        let mut m = LpModel::new(self.num_vars);
        m.cost = self.objective.clone();
        m.obj_constant = self.obj_constant;
        let fin = |x: f64| if x.is_finite() { Some(x) } else { None };
        m.col_lower = self.lower.iter().map(|&x| fin(x)).collect();
        m.col_upper = self.upper.iter().map(|&x| fin(x)).collect();
        for (i, coeffs) in self.row_coefficients().into_iter().enumerate() {
            let b = self.rhs[i];
            let (lo, up) = match self.row_senses[i] {
                RowSense::Le => (None, Some(b)),
                RowSense::Ge => (Some(b), None),
                RowSense::Eq => (Some(b), Some(b)),
            };
            m.add_row(coeffs, lo, up);
        }
        m
    }

    /// The LP relaxation in exact arithmetic. Each datum becomes the
    /// simplest fraction within float precision, so `0.1` maps to `1/10`.
    pub fn to_lp_exact(&self) -> LpModel<Rational> {
        let lp = self.to_lp();
        let conv = |x: &f64| decimal_to_rational(*x);
        LpModel {
            num_cols: lp.num_cols,
            cost: lp.cost.iter().map(conv).collect(),
            obj_constant: conv(&lp.obj_constant),
            col_lower: lp.col_lower.iter().map(|b| b.as_ref().map(conv)).collect(),
            col_upper: lp.col_upper.iter().map(|b| b.as_ref().map(conv)).collect(),
            rows: lp
                .rows
                .iter()
                .map(|r| LpRow {
                    coeffs: r.coeffs.iter().map(|(j, a)| (*j, conv(a))).collect(),
                    lower: r.lower.as_ref().map(conv),
                    upper: r.upper.as_ref().map(conv),
                })
                .collect(),
        }
    }

    /// Whether `x` satisfies all rows, bounds and integrality within `tol`.
    pub fn is_feasible(&self, x: &[f64], tol: f64) -> bool {
        if x.len() != self.num_vars {
            return false;
        }
        for j in 0..self.num_vars {
            if x[j] < self.lower[j] - tol || x[j] > self.upper[j] + tol {
                return false;
            }
            if self.is_integer[j] && (x[j] - x[j].round()).abs() > tol {
                return false;
            }
        }
        let mut act = vec![0.0; self.num_rows];
        for (j, col) in self.columns.iter().enumerate() {
            for (i, a) in col {
                act[*i] += a * x[j];
            }
        }
        act.iter()
            .zip(&self.rhs)
            .zip(&self.row_senses)
            .all(|((a, b), s)| match s {
                RowSense::Le => *a <= b + tol,
                RowSense::Ge => *a >= b - tol,
                RowSense::Eq => (a - b).abs() <= tol,
            })
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.obj_constant
            + self
                .objective
                .iter()
                .zip(x)
                .map(|(c, v)| c * v)
                .sum::<f64>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Section {
    Start,
    Name,
    ObjSense,
    Rows,
    Columns,
    Rhs,
    Ranges,
    Bounds,
    End,
}

fn parse_num(tok: &str, line: usize) -> Result<f64, InstanceError> {
    tok.parse::<f64>()
        .map_err(|_| perr(line, format!("invalid number '{}'", tok)))
}

/// Parses the supported MPS subset. Tokens are whitespace separated, so
/// fixed-format files work as long as names contain no blanks.
pub fn parse_mps(text: &str) -> Result<Instance, InstanceError> {
    let mut section = Section::Start;
    let mut name = String::new();
    let mut obj_row: Option<String> = None;
    let mut row_index: HashMap<String, usize> = HashMap::new();
    let mut row_names = Vec::new();
    let mut senses = Vec::new();
    let mut col_index: HashMap<String, usize> = HashMap::new();
    let mut var_names: Vec<String> = Vec::new();
    let mut columns: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut objective: Vec<f64> = Vec::new();
    let mut is_integer: Vec<bool> = Vec::new();
    let mut seen_entries: HashMap<(usize, usize), usize> = HashMap::new();
    let mut seen_obj: HashMap<usize, usize> = HashMap::new();
    let mut in_int = false;
    let mut rhs: Vec<f64> = Vec::new();
    let mut obj_constant = 0.0;
    let mut ranges: Vec<Option<f64>> = Vec::new();
    let mut lower: Vec<f64> = Vec::new();
    let mut upper: Vec<f64> = Vec::new();
    let mut last_line = 0;

    let enter = |cur: Section, next: Section, line: usize| -> Result<Section, InstanceError> {
        if next <= cur {
            return Err(perr(
                line,
                format!("section {:?} out of order after {:?}", next, cur),
            ));
        }
        Ok(next)
    };

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        if raw.trim().is_empty() || raw.starts_with('*') {
            continue;
        }
        let toks: Vec<&str> = raw.split_whitespace().collect();
        let header = !raw.starts_with(' ') && !raw.starts_with('\t');
        if header {
            let kw = toks[0].to_ascii_uppercase();
            section = match kw.as_str() {
                "NAME" => {
                    name = toks.get(1).map(|s| s.to_string()).unwrap_or_default();
                    enter(section, Section::Name, line)?
                }
                "OBJSENSE" => {
                    if let Some(s) = toks.get(1) {
                        check_sense(s, line)?;
                    }
                    enter(section, Section::ObjSense, line)?
                }
                "ROWS" => enter(section, Section::Rows, line)?,
                "COLUMNS" => enter(section, Section::Columns, line)?,
                "RHS" => enter(section, Section::Rhs, line)?,
                "RANGES" => enter(section, Section::Ranges, line)?,
                "BOUNDS" => enter(section, Section::Bounds, line)?,
                "ENDATA" => {
                    section = enter(section, Section::End, line)?;
                    break;
                }
                other => return Err(perr(line, format!("unknown section '{}'", other))),
            };
            continue;
        }
        match section {
            Section::Start | Section::Name => {
                return Err(perr(line, "data line before ROWS"));
            }
            Section::ObjSense => check_sense(toks[0], line)?,
            Section::Rows => {
                if toks.len() != 2 {
                    return Err(perr(line, "ROWS entry needs a type and a name"));
                }
                let rname = toks[1].to_string();
                if row_index.contains_key(&rname) || obj_row.as_deref() == Some(&rname) {
                    return Err(perr(line, format!("duplicate row '{}'", rname)));
                }
                let sense = match toks[0].to_ascii_uppercase().as_str() {
                    "N" => {
                        if obj_row.is_none() {
                            obj_row = Some(rname);
                        }
                        // Further free rows are ignored.
                        continue;
                    }
                    "L" => RowSense::Le,
                    "G" => RowSense::Ge,
                    "E" => RowSense::Eq,
                    t => return Err(perr(line, format!("unknown row type '{}'", t))),
                };
                row_index.insert(rname.clone(), row_names.len());
                row_names.push(rname);
                senses.push(sense);
            }
            Section::Columns => {
                if toks.len() >= 3 && toks[1].eq_ignore_ascii_case("'MARKER'") {
                    let marker = toks[2].to_ascii_uppercase();
                    match marker.as_str() {
                        "'INTORG'" => in_int = true,
                        "'INTEND'" => in_int = false,
                        _ => return Err(perr(line, format!("unknown marker {}", toks[2]))),
                    }
                    continue;
                }
                if toks.len() != 3 && toks.len() != 5 {
                    return Err(perr(line, "COLUMNS entry needs 3 or 5 fields"));
                }
                let cname = toks[0];
                let j = match col_index.get(cname) {
                    Some(&j) => {
                        if j + 1 != var_names.len() {
                            return Err(perr(
                                line,
                                format!("column '{}' is not contiguous", cname),
                            ));
                        }
                        j
                    }
                    None => {
                        let j = var_names.len();
                        col_index.insert(cname.to_string(), j);
                        var_names.push(cname.to_string());
                        columns.push(Vec::new());
                        objective.push(0.0);
                        is_integer.push(in_int);
                        j
                    }
                };
                for pair in toks[1..].chunks(2) {
                    let v = parse_num(pair[1], line)?;
                    if obj_row.as_deref() == Some(pair[0]) {
                        if seen_obj.insert(j, line).is_some() {
                            return Err(perr(
                                line,
                                format!("duplicate entry for column '{}' in objective", cname),
                            ));
                        }
                        objective[j] = v;
                        continue;
                    }
                    let i = *row_index
                        .get(pair[0])
                        .ok_or_else(|| perr(line, format!("unknown row '{}'", pair[0])))?;
                    if seen_entries.insert((i, j), line).is_some() {
                        return Err(perr(
                            line,
                            format!("duplicate entry for column '{}' row '{}'", cname, pair[0]),
                        ));
                    }
                    if v != 0.0 {
                        columns[j].push((i, v));
                    }
                }
            }
            Section::Rhs | Section::Ranges => {
                if rhs.is_empty() {
                    rhs = vec![0.0; row_names.len()];
                    ranges = vec![None; row_names.len()];
                }
                // An odd token count carries a leading set name.
                let body = if toks.len() % 2 == 1 {
                    &toks[1..]
                } else {
                    &toks[..]
                };
                if body.is_empty() || body.len() > 4 {
                    return Err(perr(line, "malformed RHS/RANGES entry"));
                }
                for pair in body.chunks(2) {
                    let v = parse_num(pair[1], line)?;
                    if section == Section::Rhs && obj_row.as_deref() == Some(pair[0]) {
                        // Objective RHS is the negated constant term.
                        obj_constant = -v;
                        continue;
                    }
                    let i = *row_index
                        .get(pair[0])
                        .ok_or_else(|| perr(line, format!("unknown row '{}'", pair[0])))?;
                    if section == Section::Rhs {
                        rhs[i] = v;
                    } else {
                        ranges[i] = Some(v);
                    }
                }
            }
            Section::Bounds => {
                if lower.is_empty() {
                    lower = vec![0.0; var_names.len()];
                    upper = vec![f64::INFINITY; var_names.len()];
                }
                let kind = toks[0].to_ascii_uppercase();
                let needs_value = matches!(kind.as_str(), "UP" | "LO" | "FX" | "LI" | "UI");
                let no_value = matches!(kind.as_str(), "FR" | "MI" | "PL");
                let (cname, value) = match (toks.len(), needs_value, no_value) {
                    (4, true, _) => (toks[2], Some(parse_num(toks[3], line)?)),
                    (3, true, _) => (toks[1], Some(parse_num(toks[2], line)?)),
                    (3, _, true) => (toks[2], None),
                    (2, _, true) => (toks[1], None),
                    (4, false, false) => (toks[2], Some(parse_num(toks[3], line)?)),
                    (3, false, false) => {
                        if col_index.contains_key(toks[1]) && toks[2].parse::<f64>().is_ok() {
                            (toks[1], Some(parse_num(toks[2], line)?))
                        } else {
                            (toks[2], None)
                        }
                    }
                    (2, false, false) => (toks[1], None),
                    _ => return Err(perr(line, "malformed BOUNDS entry")),
                };
                let j = *col_index
                    .get(cname)
                    .ok_or_else(|| perr(line, format!("unknown column '{}'", cname)))?;
                let v = value.unwrap_or(0.0);
                match kind.as_str() {
                    "UP" | "UI" => {
                        upper[j] = v;
                        if kind == "UI" {
                            is_integer[j] = true;
                        }
                        if v < 0.0 && lower[j] == 0.0 {
                            log::warn!(
                                "line {}: negative upper bound on '{}' frees its lower bound",
                                line,
                                cname
                            );
                            lower[j] = f64::NEG_INFINITY;
                        }
                    }
                    "LO" | "LI" => {
                        lower[j] = v;
                        if kind == "LI" {
                            is_integer[j] = true;
                        }
                    }
                    "FX" => {
                        lower[j] = v;
                        upper[j] = v;
                    }
                    "FR" => {
                        lower[j] = f64::NEG_INFINITY;
                        upper[j] = f64::INFINITY;
                    }
                    "MI" => lower[j] = f64::NEG_INFINITY,
                    "PL" => upper[j] = f64::INFINITY,
                    "BV" => {
                        lower[j] = 0.0;
                        upper[j] = 1.0;
                        is_integer[j] = true;
                    }
                    other => return Err(perr(line, format!("unsupported bound type '{}'", other))),
                }
            }
            Section::End => unreachable!(),
        }
    }
    if section != Section::End {
        return Err(InstanceError::MissingEndata { line: last_line });
    }
    let n = var_names.len();
    if lower.is_empty() {
        lower = vec![0.0; n];
        upper = vec![f64::INFINITY; n];
    }
    if rhs.is_empty() {
        rhs = vec![0.0; row_names.len()];
        ranges = vec![None; row_names.len()];
    }

    // Ranged rows become a pair of one-sided rows.
    let mut extra: Vec<(String, RowSense, f64, usize)> = Vec::new();
    for (i, r) in ranges.iter().enumerate() {
        let r = match r {
            Some(r) => *r,
            None => continue,
        };
        let b = rhs[i];
        let (lo, up) = match senses[i] {
            RowSense::Le => (b - r.abs(), b),
            RowSense::Ge => (b, b + r.abs()),
            RowSense::Eq if r >= 0.0 => (b, b + r),
            RowSense::Eq => (b + r, b),
        };
        senses[i] = RowSense::Ge;
        rhs[i] = lo;
        extra.push((format!("{}_rng", row_names[i]), RowSense::Le, up, i));
    }
    let mut rows_for: Vec<Vec<usize>> = vec![Vec::new(); row_names.len()];
    for (rn, s, b, orig) in extra {
        let idx = row_names.len();
        row_names.push(rn);
        senses.push(s);
        rhs.push(b);
        rows_for[orig].push(idx);
    }
    for col in columns.iter_mut() {
        let mut add = Vec::new();
        for (i, a) in col.iter() {
            if *i < rows_for.len() {
                for &r in &rows_for[*i] {
                    add.push((r, *a));
                }
            }
        }
        col.extend(add);
    }

    let inst = Instance {
        name,
        num_vars: n,
        num_rows: row_names.len(),
        objective,
        obj_constant,
        row_names,
        row_senses: senses,
        rhs,
        var_names,
        columns,
        lower,
        upper,
        is_integer,
    };
    inst.validate()?;
    Ok(inst)
}

fn check_sense(tok: &str, line: usize) -> Result<(), InstanceError> {
    let t = tok.to_ascii_uppercase();
    if t.contains("MAX") {
        Err(perr(line, "OBJSENSE MAX is not supported; only MIN"))
    } else if t.contains("MIN") {
        Ok(())
    } else {
        Err(perr(line, format!("unknown objective sense '{}'", tok)))
    }
}

/// Simplest fraction that rounds to `x`, falling back to its exact value.
pub fn decimal_to_rational(x: f64) -> Rational {
    match num_rational::Ratio::<i64>::approximate_float(x) {
        Some(r) if (*r.numer() as f64 / *r.denom() as f64) == x => {
            Rational::new((*r.numer()).into(), (*r.denom()).into())
        }
        _ => Rational::of_f64(x),
    }
}

pub fn read_mps(path: &Path) -> Result<Instance, InstanceError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| InstanceError::Invalid(format!("{}: {}", path.display(), e)))?;
    parse_mps(&text)
}

/// Known integer optima by instance name.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OptimaSidecar {
    pub values: BTreeMap<String, f64>,
}

impl OptimaSidecar {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }
}

/// Parses `name = value` lines; `#` starts a comment.
pub fn parse_optima(text: &str) -> Result<OptimaSidecar, InstanceError> {
    let mut values = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (k, v) = body
            .split_once('=')
            .ok_or_else(|| perr(line, "expected 'name = value'"))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| perr(line, format!("invalid value '{}'", v.trim())))?;
        if !v.is_finite() {
            return Err(perr(line, "optimum must be finite"));
        }
        values.insert(k.trim().to_string(), v);
    }
    Ok(OptimaSidecar { values })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundReport {
    pub instance: String,
    pub round: usize,
    pub gap_closed_pct: f64,
    pub cuts_added: usize,
    pub cuts_deleted: usize,
    #[serde(rename = "time_generate_s")]
    pub t_generate: f64,
    #[serde(rename = "time_resolve_s")]
    pub t_resolve: f64,
}

pub const REPORT_HEADER: [&str; 7] = [
    "instance",
    "round",
    "gap_closed_pct",
    "cuts_added",
    "cuts_deleted",
    "time_generate_s",
    "time_resolve_s",
];

pub fn write_report_to<W: Write>(rows: &[RoundReport], out: W) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(REPORT_HEADER)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_report(rows: &[RoundReport], path: &Path) -> Result<(), csv::Error> {
    let f = std::fs::File::create(path)?;
    write_report_to(rows, f)
}

pub fn read_report<R: Read>(input: R) -> Result<Vec<RoundReport>, csv::Error> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize().collect()
}
