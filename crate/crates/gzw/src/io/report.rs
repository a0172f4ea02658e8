//! CSV evaluation reports and per-frame feature dumps.

use super::IoError;
use std::fs;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellStatus {
    Ok,
    Skipped,
    Failed,
}

impl CellStatus {
    fn as_str(&self) -> &'static str {
        match self {
            CellStatus::Ok => "ok",
            CellStatus::Skipped => "skipped",
            CellStatus::Failed => "failed",
        }
    }
}

/// One (clip, attack) evaluation outcome.
#[derive(Debug, Clone)]
pub struct EvalCell {
    pub clip: String,
    pub attack: String,
    pub params: String,
    pub status: CellStatus,
    pub ber: Option<f64>,
    pub nc: Option<f64>,
    /// Failure detail for logs; never written into the CSV.
    pub message: Option<String>,
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

/// Write data rows in the given order, then one mean row per attack
/// (first-seen attack order). Means cover ok rows only; an attack with no ok
/// rows gets an empty mean row marked skipped.
pub fn write_report(cells: &[EvalCell], path: &Path) -> Result<(), IoError> {
    if cells.is_empty() {
        return Err(IoError::EmptyReport);
    }
    let mut out = String::from("clip,attack,parameters,ber,nc,status\n");
    for cell in cells {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            csv_field(&cell.clip),
            csv_field(&cell.attack),
            csv_field(&cell.params),
            fmt_opt(cell.ber),
            fmt_opt(cell.nc),
            cell.status.as_str()
        ));
    }

    let mut attack_order: Vec<&str> = Vec::new();
    for cell in cells {
        if !attack_order.contains(&cell.attack.as_str()) {
            attack_order.push(&cell.attack);
        }
    }
    for attack in attack_order {
        let ok: Vec<&EvalCell> = cells
            .iter()
            .filter(|c| c.attack == attack && c.status == CellStatus::Ok)
            .collect();
        let params = cells
            .iter()
            .find(|c| c.attack == attack)
            .map(|c| c.params.as_str())
            .unwrap_or_default();
        if ok.is_empty() {
            out.push_str(&format!(
                "mean,{},{},,,skipped\n",
                csv_field(attack),
                csv_field(params)
            ));
            continue;
        }
        let n = ok.len() as f64;
        let mean_ber = ok.iter().filter_map(|c| c.ber).sum::<f64>() / n;
        let mean_nc = ok.iter().filter_map(|c| c.nc).sum::<f64>() / n;
        out.push_str(&format!(
            "mean,{},{},{mean_ber:.6},{mean_nc:.6},mean\n",
            csv_field(attack),
            csv_field(params)
        ));
    }
    fs::write(path, out).map_err(|e| IoError::file(path, e))
}

/// Per-frame feature traces for one clip: a `frame` column followed by one
/// column per attack label, in the order given.
pub fn write_feature_dump(
    traces: &[(String, Vec<f64>)],
    path: &Path,
) -> Result<(), IoError> {
    if traces.is_empty() {
        return Err(IoError::EmptyReport);
    }
    let frames = traces.iter().map(|(_, v)| v.len()).max().unwrap_or(0);
    let mut out = String::from("frame");
    for (label, _) in traces {
        out.push(',');
        out.push_str(&csv_field(label));
    }
    out.push('\n');
    for i in 0..frames {
        out.push_str(&i.to_string());
        for (_, values) in traces {
            out.push(',');
            if let Some(v) = values.get(i) {
                out.push_str(&format!("{v:.9}"));
            }
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| IoError::file(path, e))
}
