use std::time::Instant;

use pppcov_core::coverage::{coverage_radial_integral, coverage_sweep, CoverageQuery};
use pppcov_core::db_to_linear;
use pppcov_core::fading::{build_ghq_mixture, double_shadowed_pdf_exact};
use pppcov_core::simulator::simulate_coverage;
use pppcov_core::validation::{run_all, ValidationOptions};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{coverage_csv, emit, pdf_csv, render, CoverageRow, PdfRow};

const RADIAL_TOLERANCE: f64 = 1e-10;
const EXACT_PDF_TOLERANCE: f64 = 1e-12;

pub fn cmd_coverage(cfg: &RunConfig) -> Result<(), CliError> {
    let thetas: Vec<f64> = cfg.thetas_db.iter().map(|&t| db_to_linear(t)).collect();
    let query = CoverageQuery::new(
        thetas[0],
        cfg.desired,
        cfg.interferer.clone(),
        cfg.ghq_order,
    )?;
    let closed = coverage_sweep(&cfg.net, &query, &thetas)?;

    let mut rows = Vec::with_capacity(thetas.len());
    for ((&theta_db, &theta), &pc) in cfg.thetas_db.iter().zip(&thetas).zip(&closed) {
        let q = query.with_theta(theta)?;
        let radial = if cfg.check {
            Some(coverage_radial_integral(&cfg.net, &q, RADIAL_TOLERANCE)?)
        } else {
            None
        };
        let mc = if cfg.mc {
            Some(simulate_coverage(&cfg.net, &q, &cfg.sim)?)
        } else {
            None
        };
        rows.push(CoverageRow {
            theta_db,
            closed_form: pc,
            radial_integral: radial,
            mc_estimate: mc.map(|e| e.p_hat),
            mc_ci_halfwidth: mc.map(|e| e.half_width_95),
        });
    }
    emit(
        &render(&rows, cfg.format, coverage_csv)?,
        cfg.output.as_deref(),
    )?;

    eprintln!(
        "coverage: {} thresholds, desired {}, interferer {}",
        rows.len(),
        describe_desired(cfg),
        cfg.interferer.name()
    );
    if cfg.check {
        let max = rows
            .iter()
            .map(|r| (r.closed_form - r.radial_integral.unwrap_or(r.closed_form)).abs())
            .fold(0.0, f64::max);
        eprintln!("check: max |closed_form - radial_integral| = {max:.3e}");
    }
    if cfg.mc {
        let max = rows
            .iter()
            .map(|r| (r.closed_form - r.mc_estimate.unwrap_or(r.closed_form)).abs())
            .fold(0.0, f64::max);
        eprintln!(
            "mc: {} realizations per threshold, seed {}, max |closed_form - mc_estimate| = {max:.3e}",
            cfg.sim.realizations(),
            cfg.sim.seed()
        );
    }
    Ok(())
}

fn describe_desired(cfg: &RunConfig) -> String {
    let b = cfg.desired.base();
    format!(
        "kms:kappa={},mu={},m={},sigma_db={}",
        b.kappa(),
        b.mu(),
        b.m(),
        cfg.desired.sigma_s_db()
    )
}

pub fn cmd_pdf(cfg: &RunConfig) -> Result<(), CliError> {
    let (h_min, h_max, points) = cfg.h_grid;
    let mixture = build_ghq_mixture(&cfg.desired, cfg.ghq_order)?;
    let mut rows = Vec::with_capacity(points);
    for k in 0..points {
        let h = h_min + (h_max - h_min) * k as f64 / (points - 1) as f64;
        let pdf_ghq = mixture.pdf(h)?;
        let pdf_exact = if cfg.exact {
            Some(double_shadowed_pdf_exact(
                &cfg.desired,
                h,
                EXACT_PDF_TOLERANCE,
            )?)
        } else {
            None
        };
        rows.push(PdfRow {
            h,
            pdf_ghq,
            pdf_exact,
            abs_err: pdf_exact.map(|e| (pdf_ghq - e).abs()),
        });
    }
    emit(&render(&rows, cfg.format, pdf_csv)?, cfg.output.as_deref())?;

    eprintln!(
        "pdf: {points} points on [{h_min}, {h_max}], desired {}, order {}",
        describe_desired(cfg),
        cfg.ghq_order
    );
    if cfg.exact {
        let max = rows.iter().filter_map(|r| r.abs_err).fold(0.0, f64::max);
        eprintln!("exact: max abs_err = {max:.3e}");
    }
    Ok(())
}

pub fn cmd_validate(cfg: &RunConfig) -> Result<(), CliError> {
    let opts = ValidationOptions {
        quick: cfg.quick,
        seed: cfg.sim.seed(),
        workers: cfg.sim.workers(),
        mc_realizations: cfg.sim.realizations(),
    };
    let start = Instant::now();
    let outcomes = run_all(&opts);
    let mut report = String::new();
    for o in &outcomes {
        report.push_str(&o.line());
        report.push('\n');
    }
    emit(&report, cfg.output.as_deref())?;

    let failed = outcomes.iter().filter(|o| !o.passed).count();
    eprintln!(
        "validate: {} of {} criteria passed{} in {:.1} s",
        outcomes.len() - failed,
        outcomes.len(),
        if cfg.quick {
            " (quick: Monte Carlo skipped)"
        } else {
            ""
        },
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        return Err(CliError::ValidationFailed { failed });
    }
    Ok(())
}
