use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::pipeline::MetricsRow;

pub const METRICS_VERSION: u32 = 1;
const COLUMNS: &str = "iteration,L_a,L_u,L_string,L_total,dev_acc";

/// Writes the training log as CSV under a `# exptree-metrics v1` comment.
/// Floats use the shortest representation that round-trips; an iteration
/// without a dev evaluation leaves `dev_acc` empty.
pub fn write_metrics_csv(mut w: impl Write, rows: &[MetricsRow]) -> Result<()> {
    writeln!(w, "# exptree-metrics v{METRICS_VERSION}")?;
    writeln!(w, "{COLUMNS}")?;
    for r in rows {
        let acc = r.dev_acc.map(|a| a.to_string()).unwrap_or_default();
        writeln!(w, "{},{},{},{},{},{}", r.iteration, r.l_a, r.l_u, r.l_string, r.l_total, acc)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_metrics_csv(r: impl BufRead, path: &str) -> Result<Vec<MetricsRow>> {
    let err = |line: usize, msg: String| Error::Format { path: path.to_string(), line, msg };
    let mut rows = Vec::new();
    let mut header_seen = false;
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let n = i + 1;
        if let Some(c) = line.strip_prefix('#') {
            if c.trim() != format!("exptree-metrics v{METRICS_VERSION}") {
                return Err(err(n, format!("unsupported metrics header {line:?}")));
            }
            continue;
        }
        if !header_seen {
            if line != COLUMNS {
                return Err(err(n, format!("expected column header {COLUMNS:?}")));
            }
            header_seen = true;
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 6 {
            return Err(err(n, format!("expected 6 fields, found {}", f.len())));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| err(n, format!("{s:?}: {e}")));
        rows.push(MetricsRow {
            iteration: f[0].parse().map_err(|e| err(n, format!("{:?}: {e}", f[0])))?,
            l_a: num(f[1])?,
            l_u: num(f[2])?,
            l_string: num(f[3])?,
            l_total: num(f[4])?,
            dev_acc: if f[5].is_empty() { None } else { Some(num(f[5])?) },
        });
    }
    Ok(rows)
}
