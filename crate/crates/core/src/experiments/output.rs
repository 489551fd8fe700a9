//! Plot-ready comma-separated outputs.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::corpus::InstanceId;
use crate::error::{Error, Result};

use super::evaluation::{CurveRow, Metrics, Scatter};
use super::ranking::RankedFeature;

pub fn curve_csv(rows: &[CurveRow]) -> String {
    let mut out = String::from("k,train_f1,eval_f1\n");
    for r in rows {
        out.push_str(&format!("{},{},{}\n", r.k, r.train_f1, r.eval_f1));
    }
    out
}

pub fn metrics_csv(m: &Metrics) -> String {
    format!(
        "tp,fp,fn,tn,precision,recall,f1\n{},{},{},{},{},{},{}\n",
        m.tp, m.fp, m.fn_, m.tn, m.precision, m.recall, m.f1
    )
}

/// Separator parameters on the first line, then one row per point.
pub fn scatter_csv(s: &Scatter) -> String {
    let mut out = format!("#separator,{},{},{}\nx,y,label,predicted\n", s.w_a, s.w_b, s.b);
    for r in &s.rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.x,
            r.y,
            u8::from(r.label),
            u8::from(r.predicted)
        ));
    }
    out
}

pub fn ranking_csv(ranking: &[RankedFeature]) -> String {
    let mut out = String::from("ft_id,mean_abs_pearson,rank\n");
    for r in ranking {
        out.push_str(&format!("{},{},{}\n", r.feature, r.mean_abs_pearson, r.rank));
    }
    out
}

pub fn scores_csv(scores: &[(InstanceId, f64)]) -> String {
    let mut out = String::from("instance_id,probability\n");
    for (id, p) in scores {
        out.push_str(&format!("{id},{p}\n"));
    }
    out
}

/// One id per line.
pub fn ids_text(ids: impl IntoIterator<Item = InstanceId>) -> String {
    ids.into_iter().map(|id| format!("{id}\n")).collect()
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(text.as_bytes())
        .and_then(|()| w.flush())
        .map_err(|e| Error::io(path, e))
}
