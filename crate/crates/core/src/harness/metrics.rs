use std::path::Path;

use serde::{Deserialize, Serialize};

pub const METRICS_HEADER: [&str; 5] = ["steps", "seed", "overall_success", "correction_success", "mean_ep_len"];

/// One evaluation point of one seed. `correction_success` is `None` when
/// no evaluation episode received a correction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub steps: u64,
    pub seed: u64,
    pub overall_success: f64,
    pub correction_success: Option<f64>,
    pub mean_ep_len: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsTable {
    pub rows: Vec<MetricsRow>,
}

/// Mean and population standard deviation across seeds at one point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub point: usize,
    pub mean_steps: f64,
    pub overall_mean: f64,
    pub overall_std: f64,
    pub correction_mean: Option<f64>,
    pub correction_std: Option<f64>,
    pub mean_ep_len: f64,
}

pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

impl MetricsTable {
    /// Rows ordered by seed, then steps.
    pub fn sort(&mut self) {
        self.rows.sort_by_key(|a| (a.seed, a.steps));
    }

    pub fn seeds(&self) -> Vec<u64> {
        let mut s: Vec<u64> = self.rows.iter().map(|r| r.seed).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    /// Rows of one seed in step order.
    pub fn curve(&self, seed: u64) -> Vec<&MetricsRow> {
        let mut rows: Vec<&MetricsRow> = self.rows.iter().filter(|r| r.seed == seed).collect();
        rows.sort_by_key(|r| r.steps);
        rows
    }

    /// Aggregates the k-th evaluation point of every seed.
    pub fn aggregate(&self) -> Vec<AggregateRow> {
        let curves: Vec<Vec<&MetricsRow>> = self.seeds().into_iter().map(|s| self.curve(s)).collect();
        let points = curves.iter().map(Vec::len).min().unwrap_or(0);
        (0..points)
            .map(|k| {
                let at: Vec<&MetricsRow> = curves.iter().map(|c| c[k]).collect();
                let (overall_mean, overall_std) = mean_std(&at.iter().map(|r| r.overall_success).collect::<Vec<_>>());
                let corr: Vec<f64> = at.iter().filter_map(|r| r.correction_success).collect();
                let (cm, cs) = if corr.is_empty() {
                    (None, None)
                } else {
                    let (m, s) = mean_std(&corr);
                    (Some(m), Some(s))
                };
                AggregateRow {
                    point: k,
                    mean_steps: mean_std(&at.iter().map(|r| r.steps as f64).collect::<Vec<_>>()).0,
                    overall_mean,
                    overall_std,
                    correction_mean: cm,
                    correction_std: cs,
                    mean_ep_len: mean_std(&at.iter().map(|r| r.mean_ep_len).collect::<Vec<_>>()).0,
                }
            })
            .collect()
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = Vec::new();
        self.write_csv(&mut out).expect("writing to memory");
        String::from_utf8(out).expect("csv is utf-8")
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(METRICS_HEADER)?;
        for r in &self.rows {
            w.write_record([
                r.steps.to_string(),
                r.seed.to_string(),
                r.overall_success.to_string(),
                r.correction_success.map(|c| c.to_string()).unwrap_or_default(),
                r.mean_ep_len.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: std::io::Read>(input: R) -> Result<Self, csv::Error> {
        let mut r = csv::Reader::from_reader(input);
        let mut rows = Vec::new();
        for rec in r.deserialize() {
            rows.push(rec?);
        }
        Ok(MetricsTable { rows })
    }
}

pub fn write_metrics(table: &MetricsTable, path: &Path) -> Result<(), csv::Error> {
    let file = std::fs::File::create(path)?;
    table.write_csv(std::io::BufWriter::new(file))
}

pub fn read_metrics(path: &Path) -> Result<MetricsTable, csv::Error> {
    MetricsTable::read_csv(std::fs::File::open(path)?)
}

/// Aggregate table as CSV; empty cells where no correction was issued.
pub fn write_aggregate(rows: &[AggregateRow], path: &Path) -> Result<(), csv::Error> {
    let file = std::fs::File::create(path)?;
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(file);
    w.write_record([
        "point",
        "mean_steps",
        "overall_mean",
        "overall_std",
        "correction_mean",
        "correction_std",
        "mean_ep_len",
    ])?;
    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    for r in rows {
        w.write_record([
            r.point.to_string(),
            r.mean_steps.to_string(),
            r.overall_mean.to_string(),
            r.overall_std.to_string(),
            opt(r.correction_mean),
            opt(r.correction_std),
            r.mean_ep_len.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(steps: u64, seed: u64, c: Option<f64>) -> MetricsRow {
        MetricsRow {
            steps,
            seed,
            overall_success: 0.1 * steps as f64,
            correction_success: c,
            mean_ep_len: 12.5,
        }
    }

    #[test]
    fn empty_table_is_header_only() {
        assert_eq!(MetricsTable::default().to_csv_string(), "steps,seed,overall_success,correction_success,mean_ep_len\n");
    }

    #[test]
    fn round_trip_with_empty_correction_cell() {
        let mut t = MetricsTable::default();
        for seed in 0..2 {
            for steps in 0..3 {
                t.rows.push(row(steps, seed, if steps == 0 { None } else { Some(1.0 / 3.0) }));
            }
        }
        let text = t.to_csv_string();
        assert_eq!(text.lines().count(), 7);
        assert!(text.contains("0,0,0,,12.5\n"));
        assert_eq!(MetricsTable::read_csv(text.as_bytes()).unwrap(), t);
    }

    #[test]
    fn aggregate_mean_and_std() {
        let mut t = MetricsTable::default();
        t.rows.push(MetricsRow { overall_success: 0.5, ..row(10, 0, Some(0.0)) });
        t.rows.push(MetricsRow { overall_success: 1.0, ..row(12, 1, None) });
        let a = t.aggregate();
        assert_eq!(a.len(), 1);
        assert_eq!(a[0].overall_mean, 0.75);
        assert_eq!(a[0].overall_std, 0.25);
        assert_eq!(a[0].correction_mean, Some(0.0));
        assert_eq!(a[0].mean_steps, 11.0);
    }
}
