//! CSV / JSON emission. Computed values use `{:.12e}`; inputs such as θ and
//! h use the shortest exact representation.

use std::io::Write;

use serde::Serialize;

use crate::config::Format;
use crate::error::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct CoverageRow {
    pub theta_db: f64,
    pub closed_form: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radial_integral: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_estimate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_ci_halfwidth: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PdfRow {
    pub h: f64,
    pub pdf_ghq: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pdf_exact: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abs_err: Option<f64>,
}

fn sci(x: f64) -> String {
    format!("{x:.12e}")
}

fn csv_line(first: f64, rest: &[Option<f64>]) -> String {
    let mut line = first.to_string();
    for v in rest.iter().flatten() {
        line.push(',');
        line.push_str(&sci(*v));
    }
    line.push('\n');
    line
}

pub fn coverage_csv(rows: &[CoverageRow]) -> String {
    let mut header = vec!["theta_db", "closed_form"];
    if let Some(r) = rows.first() {
        if r.radial_integral.is_some() {
            header.push("radial_integral");
        }
        if r.mc_estimate.is_some() {
            header.extend(["mc_estimate", "mc_ci_halfwidth"]);
        }
    }
    let mut out = header.join(",") + "\n";
    for r in rows {
        out += &csv_line(
            r.theta_db,
            &[
                Some(r.closed_form),
                r.radial_integral,
                r.mc_estimate,
                r.mc_ci_halfwidth,
            ],
        );
    }
    out
}

pub fn pdf_csv(rows: &[PdfRow]) -> String {
    let mut header = vec!["h", "pdf_ghq"];
    if rows.first().is_some_and(|r| r.pdf_exact.is_some()) {
        header.extend(["pdf_exact", "abs_err"]);
    }
    let mut out = header.join(",") + "\n";
    for r in rows {
        out += &csv_line(r.h, &[Some(r.pdf_ghq), r.pdf_exact, r.abs_err]);
    }
    out
}

pub fn render<T: Serialize>(
    rows: &[T],
    format: Format,
    csv: fn(&[T]) -> String,
) -> Result<String, CliError> {
    match format {
        Format::Csv => Ok(csv(rows)),
        Format::Json => serde_json::to_string_pretty(rows)
            .map(|s| s + "\n")
            .map_err(|e| CliError::Io(format!("cannot encode JSON: {e}"))),
    }
}

/// Writes to `path`, or standard output when there is none.
pub fn emit(text: &str, path: Option<&std::path::Path>) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_columns_follow_options() {
        let row = CoverageRow {
            theta_db: -2.5,
            closed_form: 0.5,
            radial_integral: None,
            mc_estimate: Some(0.25),
            mc_ci_halfwidth: Some(0.001),
        };
        assert_eq!(
            coverage_csv(&[row]),
            "theta_db,closed_form,mc_estimate,mc_ci_halfwidth\n-2.5,5.000000000000e-1,2.500000000000e-1,1.000000000000e-3\n"
        );
        let p = PdfRow {
            h: 1.0,
            pdf_ghq: 0.3,
            pdf_exact: None,
            abs_err: None,
        };
        assert_eq!(pdf_csv(&[p]), "h,pdf_ghq\n1,3.000000000000e-1\n");
    }

    #[test]
    fn json_omits_absent_columns() {
        let p = PdfRow {
            h: 1.0,
            pdf_ghq: 0.3,
            pdf_exact: None,
            abs_err: None,
        };
        let text = render(&[p], Format::Json, pdf_csv).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v[0]["pdf_ghq"], 0.3);
        assert!(v[0].get("pdf_exact").is_none());
    }
}
