//! Tab-separated evaluation reports.
//!
//! Rates are truncated, not rounded, to three decimals: 12/19 = 0.6316
//! prints as `0.631`.

use std::fmt::Write as _;

use selpref_core::{EvalReport, Metrics, Protocol, RandomBaseline};

pub const HEADER: &str = "model\trelation\tscope\tprecision\tcoverage\trecall\tanswered\tcorrect\ttotal";

/// `num / den` truncated to three decimals; `den` must be positive.
pub fn truncate3(num: f64, den: f64) -> String {
    let milli = if num.fract() == 0.0 && den.fract() == 0.0 {
        // exact integer path for counts
        (num as u128 * 1000) / den as u128
    } else {
        (num * 1000.0 / den + 1e-9).floor() as u128
    };
    format!("{}.{:03}", milli / 1000, milli % 1000)
}

fn correct_column(m: &Metrics) -> String {
    if m.correct.fract() == 0.0 {
        format!("{}", m.correct as u64)
    } else {
        format!("{:.3}", m.correct)
    }
}

/// `(precision, coverage, recall)` as printed; precision is `-` when nothing
/// was answered.
pub fn format_rates(m: &Metrics) -> (String, String, String) {
    let precision = if m.answered == 0 {
        "-".to_string()
    } else {
        truncate3(m.correct, m.answered as f64)
    };
    let (coverage, recall) = if m.total == 0 {
        ("0.000".to_string(), "0.000".to_string())
    } else {
        (truncate3(m.answered as f64, m.total as f64), truncate3(m.correct, m.total as f64))
    };
    (precision, coverage, recall)
}

pub fn format_row(system: &str, rel: &str, scope: &str, m: &Metrics) -> String {
    let (p, c, r) = format_rates(m);
    format!("{system}\t{rel}\t{scope}\t{p}\t{c}\t{r}\t{}\t{}\t{}", m.answered, correct_column(m), m.total)
}

/// Header comment describing the run, then the column header and one row
/// per (system, relation, scope). `seed` is the run seed; it is recorded
/// even when nothing random happened.
pub fn write_report(report: &EvalReport, seed: u64) -> String {
    let mut s = String::new();
    let protocol = match report.protocol {
        Protocol::CrossValidation { k, .. } => {
            format!("protocol=xval\tk={k}\tfolds=per-target-stratified")
        }
        Protocol::DocumentHoldout => "protocol=docs".to_string(),
    };
    let random = match report.random {
        RandomBaseline::Analytic => "analytic",
        RandomBaseline::Sampled { .. } => "sampled",
    };
    let rels: Vec<&str> = report.relations.iter().map(|r| r.as_token()).collect();
    let _ = writeln!(s, "# {protocol}\tseed={seed}\trandom={random}\trelations={}", rels.join(","));
    let _ = writeln!(s, "{HEADER}");
    for row in &report.rows {
        let _ = writeln!(
            s,
            "{}",
            format_row(row.system.as_token(), row.rel.as_token(), &row.scope.to_string(), &row.metrics)
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rates_truncate_to_three_decimals() {
        assert_eq!(truncate3(12.0, 19.0), "0.631");
        assert_eq!(truncate3(17.0, 19.0), "0.894");
        assert_eq!(truncate3(12.0, 17.0), "0.705");
        assert_eq!(truncate3(4.0, 19.0), "0.210");
        assert_eq!(truncate3(19.0, 19.0), "1.000");
        assert_eq!(truncate3(7.0, 10.0), "0.700");
        assert_eq!(truncate3(13.0 / 36.0 * 3.0, 3.0), "0.361");
    }

    #[test]
    fn church_object_class_to_class_row() {
        let m = Metrics::new(12, 19, 19);
        assert_eq!(format_row("c2c", "obj", "noun:church", &m), "c2c\tobj\tnoun:church\t0.631\t1.000\t0.631\t19\t12\t19");
    }

    #[test]
    fn undefined_precision_prints_dash() {
        let m = Metrics::new(0, 0, 10);
        assert_eq!(format_rates(&m), ("-".into(), "0.000".into(), "0.000".into()));
        let random = Metrics { answered: 2, correct: 0.75, total: 2 };
        assert_eq!(format_row("random", "obj", "overall", &random), "random\tobj\toverall\t0.375\t1.000\t0.375\t2\t0.750\t2");
    }
}
