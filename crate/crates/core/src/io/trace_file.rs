//! CSV and JSON trace files.
//!
//! CSV: a header row `step,<column>...` then one row per step, LF line
//! endings. JSON: an object with `kind`, `p`, `d`, `t0`, `tolerances`,
//! `saturated_at`, `columns` and `steps`, each step `{"step": m,
//! "values": [...]}`. Numbers use the shortest decimal that reads back to
//! the same `f64`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::fmt_num;
use crate::barypolygonal::PolygonTrace;
use crate::derived::{ConjugateTrace, DerivedTrace, Tolerances};
use crate::dual::DualTrace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceKind {
    Polygon,
    Derived,
    Conjugate,
    Dual,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub step: usize,
    pub values: Vec<f64>,
}

/// Format-neutral table behind both file formats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceTable {
    pub kind: TraceKind,
    pub p: usize,
    pub d: Option<usize>,
    pub t0: Vec<f64>,
    pub tolerances: Option<Tolerances>,
    pub saturated_at: Option<usize>,
    pub columns: Vec<String>,
    pub steps: Vec<TraceStep>,
}

#[derive(Debug, thiserror::Error)]
pub enum TraceIoError {
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv line {line}: {message}")]
    Csv { line: usize, message: String },
}

fn numbered(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|k| format!("{prefix}{k}")).collect()
}

fn rows_to_steps(rows: impl Iterator<Item = Vec<f64>>) -> Vec<TraceStep> {
    rows.enumerate().map(|(step, values)| TraceStep { step, values }).collect()
}

impl TraceTable {
    pub fn from_polygon(trace: &PolygonTrace) -> Self {
        let p = trace.params.len();
        let d = trace.iterates[0].dim();
        let columns = (1..=p).flat_map(|k| (1..=d).map(move |j| format!("b{k}_x{j}"))).collect();
        let rows = trace.iterates.iter().map(|fam| fam.iter().flat_map(|pt| pt.coords().iter().copied()).collect());
        Self {
            kind: TraceKind::Polygon,
            p,
            d: Some(d),
            t0: trace.params.as_slice().to_vec(),
            tolerances: None,
            saturated_at: None,
            columns,
            steps: rows_to_steps(rows),
        }
    }

    pub fn from_derived(trace: &DerivedTrace, tolerances: Option<Tolerances>) -> Self {
        let p = trace.params[0].len();
        Self {
            kind: TraceKind::Derived,
            p,
            d: None,
            t0: trace.params[0].as_slice().to_vec(),
            tolerances,
            saturated_at: trace.saturated_at,
            columns: numbered("t", p),
            steps: rows_to_steps(trace.params.iter().map(|t| t.as_slice().to_vec())),
        }
    }

    pub fn from_conjugate(trace: &ConjugateTrace) -> Self {
        let p = trace.states[0].len();
        Self {
            kind: TraceKind::Conjugate,
            p,
            d: None,
            t0: trace.states[0].as_slice().iter().map(|u| 1.0 - u).collect(),
            tolerances: None,
            saturated_at: trace.saturated_at,
            columns: numbered("u", p),
            steps: rows_to_steps(trace.states.iter().map(|s| s.as_slice().to_vec())),
        }
    }

    pub fn from_dual(trace: &DualTrace, tolerances: Option<Tolerances>) -> Self {
        let d = trace.centroid.dim();
        let mut columns = numbered("g_x", d);
        columns.push("distance".into());
        let rows = trace.points.iter().zip(&trace.distances).map(|(g, &dist)| {
            let mut row = g.coords().to_vec();
            row.push(dist);
            row
        });
        Self {
            kind: TraceKind::Dual,
            p: trace.params_used.params[0].len(),
            d: Some(d),
            t0: trace.params_used.params[0].as_slice().to_vec(),
            tolerances,
            saturated_at: trace.params_used.saturated_at,
            columns,
            steps: rows_to_steps(rows),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("step");
        for c in &self.columns {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for s in &self.steps {
            out.push_str(&s.step.to_string());
            for &v in &s.values {
                out.push(',');
                out.push_str(&fmt_num(v));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("trace tables always serialize");
        s.push('\n');
        s
    }
}

/// Header and rows of a CSV trace. CSV carries no metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTrace {
    pub columns: Vec<String>,
    pub steps: Vec<TraceStep>,
}

impl From<&TraceTable> for CsvTrace {
    fn from(t: &TraceTable) -> Self {
        Self { columns: t.columns.clone(), steps: t.steps.clone() }
    }
}

pub fn parse_csv(text: &str) -> Result<CsvTrace, TraceIoError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(TraceIoError::Csv { line: 1, message: "missing header".into() })?;
    let mut cols = header.split(',');
    if cols.next() != Some("step") {
        return Err(TraceIoError::Csv { line: 1, message: "first column must be `step`".into() });
    }
    let columns: Vec<String> = cols.map(str::to_owned).collect();
    let mut steps = Vec::new();
    for (i, line) in lines {
        if line.is_empty() {
            continue;
        }
        let bad = |message: String| TraceIoError::Csv { line: i + 1, message };
        let mut cells = line.split(',');
        let step = cells.next().and_then(|c| c.parse::<usize>().ok()).ok_or_else(|| bad("bad step index".into()))?;
        let values = cells
            .map(|c| c.parse::<f64>().map_err(|_| bad(format!("bad number {c:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        if values.len() != columns.len() {
            return Err(bad(format!("expected {} values, got {}", columns.len(), values.len())));
        }
        steps.push(TraceStep { step, values });
    }
    Ok(CsvTrace { columns, steps })
}

pub fn parse_json(text: &str) -> Result<TraceTable, TraceIoError> {
    Ok(serde_json::from_str(text)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceFormat {
    Csv,
    Json,
}

/// Writes the table to `dest`.
pub fn write_trace<W: Write>(table: &TraceTable, format: TraceFormat, dest: &mut W) -> Result<(), TraceIoError> {
    let text = match format {
        TraceFormat::Csv => table.to_csv(),
        TraceFormat::Json => table.to_json(),
    };
    dest.write_all(text.as_bytes())?;
    dest.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barypolygonal::{iterate_sequence, ParamVector};
    use crate::derived::derived_trace;
    use crate::PointFamily;

    #[test]
    fn single_step_csv() {
        let fam = PointFamily::from_rows(&[[0.0, 0.0], [1.0, 0.0]]).unwrap();
        let tr = iterate_sequence(&fam, &ParamVector::regular(2, 0.5).unwrap(), 0).unwrap();
        let csv = TraceTable::from_polygon(&tr).to_csv();
        assert_eq!(csv, "step,b1_x1,b1_x2,b2_x1,b2_x2\n0,0.0,0.0,1.0,0.0\n");
    }

    #[test]
    fn derived_shape() {
        let tr = derived_trace(&ParamVector::new(vec![0.2, 0.3, 0.4]).unwrap(), 3);
        let csv = TraceTable::from_derived(&tr, None).to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], "step,t1,t2,t3");
        assert!(lines[1..].iter().all(|l| l.split(',').count() == 4));
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn json_round_trip() {
        let tr = derived_trace(&ParamVector::new(vec![0.2, 0.3, 0.4]).unwrap(), 60);
        let table = TraceTable::from_derived(&tr, Some(Tolerances::default()));
        assert_eq!(parse_json(&table.to_json()).unwrap(), table);
        assert_eq!(parse_csv(&table.to_csv()).unwrap(), CsvTrace::from(&table));
    }

    #[test]
    fn csv_errors() {
        assert!(parse_csv("").is_err());
        assert!(parse_csv("x,a\n").is_err());
        assert!(matches!(parse_csv("step,a\n0,1,2\n"), Err(TraceIoError::Csv { line: 2, .. })));
    }
}
