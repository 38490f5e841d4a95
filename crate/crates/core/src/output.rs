//! CSV rendering of estimator and checker results.
//!
//! Floats are written with 17 significant digits in scientific notation
//! (`{:.16e}`), which round-trips every `f64`. Rate fits follow the level rows as
//! a `slope,intercept,r_squared` label row and a value row.

use crate::checker::CheckReport;
use crate::estimators::{DivergenceReport, ErrorCurve, InverseMomentCurve, RateFit, StoppingCurve};

pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn render(rows: Vec<Vec<String>>) -> String {
    let mut writer = csv::WriterBuilder::new()
        .flexible(true)
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    for row in rows {
        writer
            .write_record(&row)
            .expect("writing to memory cannot fail");
    }
    let bytes = writer.into_inner().expect("flushing to memory cannot fail");
    String::from_utf8(bytes).expect("csv output is utf-8")
}

fn header(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

pub fn error_curve_csv(curve: &ErrorCurve, fit: Option<&RateFit>) -> String {
    let mut rows = vec![header(&[
        "n",
        "p",
        "mean_sup_error_p",
        "root_error",
        "std_error",
        "samples",
        "discarded",
    ])];
    for e in &curve.estimates {
        rows.push(vec![
            e.steps.to_string(),
            format_float(e.p_order),
            format_float(e.mean_sup_error_p),
            format_float(e.root_error),
            format_float(e.std_error),
            e.samples.to_string(),
            e.discarded.to_string(),
        ]);
    }
    if let Some(fit) = fit {
        rows.push(header(&["slope", "intercept", "r_squared"]));
        rows.push(vec![
            format_float(fit.slope),
            format_float(fit.intercept),
            format_float(fit.r_squared),
        ]);
    }
    render(rows)
}

pub fn inverse_moment_csv(curve: &InverseMomentCurve) -> String {
    let mut rows = vec![header(&[
        "n",
        "p",
        "mean_sup_inv_rho_p",
        "std_error",
        "samples",
    ])];
    for l in &curve.levels {
        rows.push(vec![
            l.steps.to_string(),
            format_float(l.p_order),
            format_float(l.mean),
            format_float(l.std_error),
            l.samples.to_string(),
        ]);
    }
    render(rows)
}

pub fn stopping_csv(curve: &StoppingCurve) -> String {
    let mut rows = vec![header(&["n", "hit_fraction", "std_error", "samples"])];
    for l in &curve.levels {
        rows.push(vec![
            l.steps.to_string(),
            format_float(l.hit_fraction),
            format_float(l.std_error),
            l.samples.to_string(),
        ]);
    }
    render(rows)
}

pub fn divergence_csv(reports: &[(&str, DivergenceReport)]) -> String {
    let mut rows = vec![header(&[
        "scheme",
        "n",
        "samples",
        "fraction_left_domain",
        "fraction_non_finite",
        "max_observed_norm",
    ])];
    for (label, r) in reports {
        rows.push(vec![
            label.to_string(),
            r.steps.to_string(),
            r.samples.to_string(),
            format_float(r.fraction_left_domain),
            format_float(r.fraction_non_finite),
            format_float(r.max_observed_norm),
        ]);
    }
    render(rows)
}

/// One row per report; the witness coordinates are space-separated in one field.
pub fn check_reports_csv(reports: &[CheckReport]) -> String {
    let mut rows = vec![header(&[
        "assumption_id",
        "passed",
        "worst_margin",
        "witness",
        "implied_constant",
        "implied_exponent",
        "samples",
    ])];
    let opt = |v: Option<f64>| v.map(format_float).unwrap_or_default();
    for r in reports {
        rows.push(vec![
            r.assumption.to_string(),
            r.passed.to_string(),
            format_float(r.worst_margin),
            r.witness
                .iter()
                .map(|w| format_float(*w))
                .collect::<Vec<_>>()
                .join(" "),
            opt(r.implied_constant),
            opt(r.implied_exponent),
            r.samples.to_string(),
        ]);
    }
    render(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::ErrorEstimate;
    use crate::schemes::TamingAudit;

    #[test]
    fn floats_round_trip_with_17_digits() {
        for x in [0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 0.0] {
            let s = format_float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17);
        }
        assert_eq!(format_float(f64::INFINITY), "inf");
    }

    #[test]
    fn error_curve_layout() {
        let curve = ErrorCurve {
            estimates: vec![ErrorEstimate {
                steps: 64,
                p_order: 2.0,
                mean_sup_error_p: 0.25,
                root_error: 0.5,
                std_error: 0.01,
                samples: 10,
                discarded: 0,
            }],
            reference_steps: 1024,
            audit: TamingAudit::default(),
        };
        let fit = RateFit {
            slope: -0.5,
            intercept: 0.0,
            r_squared: 1.0,
            levels_used: vec![64],
        };
        let text = error_curve_csv(&curve, Some(&fit));
        let lines: Vec<&str> = text.split("\r\n").collect();
        assert_eq!(
            lines[0],
            "n,p,mean_sup_error_p,root_error,std_error,samples,discarded"
        );
        assert!(lines[1].starts_with("64,2.0000000000000000e0,2.5000000000000000e-1,"));
        assert!(lines[1].ends_with(",10,0"));
        assert_eq!(lines[2], "slope,intercept,r_squared");
        assert_eq!(
            lines[3],
            "-5.0000000000000000e-1,0.0000000000000000e0,1.0000000000000000e0"
        );
    }
}
