//! Human-readable and comma-separated report emission. Metric values are
//! printed to 4 decimals.

use std::fmt::Write;

use bsac::eval::{CVReport, FoldSweepRow, MetricSummary, SweepRow};

fn gammas(g: &[f64]) -> String {
    g.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(";")
}

fn summary_cells(m: &MetricSummary) -> [f64; 6] {
    [m.recall, m.f1, m.g_mean, m.specificity, m.accuracy, m.precision]
}

const METRIC_HEADERS: [&str; 6] = ["recall", "f1", "g_mean", "specificity", "accuracy", "precision"];

/// Fixed-width table with one row per fold plus mean and std rows.
pub fn cv_table(report: &CVReport) -> String {
    let mut s = String::new();
    let _ = write!(s, "{:<6}{:>6}", "fold", "val");
    for h in METRIC_HEADERS {
        let _ = write!(s, "{h:>13}");
    }
    let _ = writeln!(s, "  gammas");
    for f in &report.folds {
        let m = &f.metrics;
        let _ = write!(s, "{:<6}{:>6}", f.fold, f.validation_fold);
        for v in [m.recall, m.f1, m.g_mean, m.specificity, m.accuracy, m.precision] {
            let _ = write!(s, "{v:>13.4}");
        }
        let flag = if m.is_degenerate() { format!("  (undefined: {})", m.undefined.join(", ")) } else { String::new() };
        let _ = writeln!(s, "  {}{flag}", gammas(&f.gammas));
    }
    for (label, row) in [("mean", &report.mean), ("std", &report.std)] {
        let _ = write!(s, "{label:<6}{:>6}", "");
        for v in summary_cells(row) {
            let _ = write!(s, "{v:>13.4}");
        }
        let _ = writeln!(s);
    }
    s
}

pub fn cv_csv(report: &CVReport) -> String {
    let mut s = String::from("fold,validation_fold,train_rows,validation_rows,test_rows,tp,fp,tn,fn,");
    s.push_str(&METRIC_HEADERS.join(","));
    s.push_str(",gammas,undefined\n");
    for f in &report.folds {
        let c = &f.confusion;
        let m = &f.metrics;
        let _ = write!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            f.fold, f.validation_fold, f.train_rows, f.validation_rows, f.test_rows, c.tp, c.fp, c.tn, c.fn_
        );
        for v in [m.recall, m.f1, m.g_mean, m.specificity, m.accuracy, m.precision] {
            let _ = write!(s, ",{v:.4}");
        }
        let _ = writeln!(s, ",{},{}", gammas(&f.gammas), m.undefined.join(";"));
    }
    for (label, row) in [("mean", &report.mean), ("std", &report.std)] {
        s.push_str(label);
        s.push_str(",,,,,,,,");
        for v in summary_cells(row) {
            let _ = write!(s, ",{v:.4}");
        }
        s.push_str(",,\n");
    }
    s
}

pub fn fold_sweep_csv(rows: &[FoldSweepRow]) -> String {
    let mut s = String::from("fold,subset_id,gamma,f1\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{},{:.4}", r.fold, r.subset_id, r.gamma, r.f1);
    }
    s
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("subset_id,gamma,f1\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{:.4}", r.subset_id, r.gamma, r.f1);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use bsac::eval::{metrics, ConfusionMatrix, FoldResult};

    fn report() -> CVReport {
        let folds = (0..3)
            .map(|i| {
                let cm = ConfusionMatrix {
                    tp: 5 + i,
                    fp: 3,
                    tn: 40,
                    fn_: 4,
                };
                FoldResult {
                    fold: i,
                    validation_fold: (i + 1) % 3,
                    train_rows: 52,
                    validation_rows: 52,
                    test_rows: cm.total(),
                    confusion: cm,
                    metrics: metrics(&cm).unwrap(),
                    gammas: vec![0.1, 0.9],
                }
            })
            .collect();
        CVReport::from_folds(folds).unwrap()
    }

    #[test]
    fn csv_has_fold_mean_and_std_rows() {
        let csv = cv_csv(&report());
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 1 + 3 + 2);
        let width = lines[0].split(',').count();
        assert!(lines.iter().all(|l| l.split(',').count() == width));
        assert!(lines[1].starts_with("0,1,52,52,52,5,3,40,4,0.5556,"));
        assert!(lines[4].starts_with("mean,"));
    }

    #[test]
    fn table_rows_align() {
        let t = cv_table(&report());
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines.len(), 6);
        assert!(lines[5].starts_with("std"));
        assert!(lines[1].contains("0.1;0.9"));
    }
}
