//! Subcommand implementations: audit, bound, optimize, constants.

use std::path::{Path, PathBuf};

use serde_json::json;

use qspec_core::{
    audit_exactness, bound_curve, default_audit_tol, default_time_window, exactness_ceiling,
    exactness_constant, optimize_points, simplified_energy, weyl_lambda, AuditReport, KernelConfig,
    ManifoldSpec, OptimizerConfig, QuadratureRule,
};

use crate::errors::{CliError, CliResult};
use crate::rulefile::{read_rule_file, write_rule_file};

/// Write to stdout, swallowing broken-pipe errors so that piping into
/// `head` and friends terminates cleanly.
fn emit(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

/// Scan cutoff when the user gives none: comfortably past the count ceiling
/// c_d·n translated into an eigenvalue through the Weyl law.
fn default_lambda_max(rule: &QuadratureRule) -> f64 {
    let m = rule.manifold();
    let c = exactness_constant(m.dim()).unwrap_or(4.0);
    let k = (4.0 * c * rule.len() as f64).ceil() as u64;
    (2.0 * weyl_lambda(m.dim(), k.max(8), m.volume()).unwrap_or(25.0)).max(4.5)
}

fn render_audit_text(report: &AuditReport, rule: &QuadratureRule, full_table: bool) -> String {
    let mut out = String::new();
    out.push_str(&format!("manifold      {}\n", rule.manifold().name()));
    out.push_str(&format!("nodes         {}\n", rule.len()));
    out.push_str(&format!(
        "weight sum    {:.12} ({}resolved volume {:.12})\n",
        report.weight_sum,
        if report.normalized {
            "normalized, "
        } else {
            "NOT normalized, "
        },
        rule.manifold().volume()
    ));
    out.push_str(&format!(
        "scan          eigenvalues <= {} ({} eigenfunctions), tol {:.3e}\n",
        report.lambda_max,
        report.residuals.len(),
        report.tol
    ));
    match report.k_star {
        Some(k) => out.push_str(&format!("k*            {k}\n")),
        None => out.push_str("k*            none (constant not integrated)\n"),
    }
    match report.lambda_star {
        Some(l) => out.push_str(&format!("lambda*       {l}\n")),
        None => out.push_str("lambda*       none\n"),
    }
    out.push_str(&format!("exact count   {}\n", report.exact_count));
    match &report.first_failure {
        Some(d) => out.push_str(&format!(
            "first failure ordinal {}, eigenvalue {}, {}\n",
            d.ordinal, d.eigenvalue, d.label
        )),
        None => out.push_str("first failure none within scan\n"),
    }
    if full_table {
        out.push_str("residuals:\n");
        out.push_str("  ordinal  eigenvalue      residual      label\n");
        for (d, r) in &report.residuals {
            out.push_str(&format!(
                "  {:>7}  {:>10}  {:>12.5e}  {}\n",
                d.ordinal, d.eigenvalue, r, d.label
            ));
        }
    }
    out
}

pub fn cmd_audit(
    rule_file: &Path,
    lambda_max: Option<f64>,
    tol: Option<f64>,
    json: bool,
) -> CliResult<()> {
    let rule = read_rule_file(rule_file)?;
    let lambda_max = lambda_max.unwrap_or_else(|| default_lambda_max(&rule));
    let tol = tol.unwrap_or_else(|| default_audit_tol(rule.manifold()));
    let report = audit_exactness(&rule, lambda_max, tol)?;
    if json {
        let payload = json!({
            "manifold": rule.manifold().name(),
            "nodes": rule.len(),
            "report": report,
        });
        emit(&serde_json::to_string_pretty(&payload).unwrap());
        emit("\n");
    } else {
        emit(&render_audit_text(&report, &rule, true));
    }
    Ok(())
}

pub fn cmd_bound(
    rule_file: &Path,
    t_min: Option<f64>,
    t_max: Option<f64>,
    t_num: usize,
    lambda_max: Option<f64>,
    out: Option<&Path>,
    json: bool,
) -> CliResult<()> {
    let rule = read_rule_file(rule_file)?;
    let vol = rule.manifold().volume();
    if !rule.is_normalized() {
        return Err(CliError::Precondition(format!(
            "bound requires a normalized rule: sum of weights = {:.12}, volume = {vol:.12}",
            rule.weight_sum()
        )));
    }
    let (win_min, win_max) = default_time_window(rule.manifold());
    let t_min = t_min.unwrap_or(win_min);
    let t_max = t_max.unwrap_or(win_max);
    let cfg = KernelConfig::default();
    let curve = bound_curve(&rule, t_min, t_max, t_num, &cfg)?;

    let lambda_max = lambda_max.unwrap_or_else(|| default_lambda_max(&rule));
    let report = audit_exactness(&rule, lambda_max, default_audit_tol(rule.manifold()))?;
    let lambda_star = report.lambda_star;

    if let Some(path) = out {
        let mut csv = String::from("t,bound\n");
        for s in &curve.samples {
            if s.bound.is_finite() {
                csv.push_str(&format!("{:.16e},{:.16e}\n", s.t, s.bound));
            } else {
                csv.push_str(&format!("{:.16e},inf\n", s.t));
            }
        }
        std::fs::write(path, csv)
            .map_err(|e| CliError::Other(format!("{}: {e}", path.display())))?;
    }

    if json {
        let samples: Vec<serde_json::Value> = curve
            .samples
            .iter()
            .map(|s| {
                json!({
                    "t": s.t,
                    "bound": if s.bound.is_finite() { json!(s.bound) } else { json!(null) },
                })
            })
            .collect();
        let payload = json!({
            "manifold": rule.manifold().name(),
            "nodes": rule.len(),
            "samples": samples,
            "best": curve.best.map(|b| json!({"t": b.t, "bound": b.bound})),
            "lambda_star": lambda_star,
        });
        emit(&serde_json::to_string_pretty(&payload).unwrap());
        emit("\n");
        return Ok(());
    }

    let mut text = String::new();
    text.push_str(&format!("manifold      {}\n", rule.manifold().name()));
    text.push_str(&format!("nodes         {}\n", rule.len()));
    text.push_str(&format!(
        "t grid        [{t_min:.6e}, {t_max:.6e}] x {t_num} (geometric)\n"
    ));
    match curve.best {
        Some(best) => {
            text.push_str(&format!("best t        {:.6e}\n", best.t));
            text.push_str(&format!("best bound    {:.12}\n", best.bound));
        }
        None => text.push_str("best bound    no finite bound on this grid\n"),
    }
    match lambda_star {
        Some(l) => text.push_str(&format!("audit lambda* {l} (scan <= {lambda_max})\n")),
        None => text.push_str("audit lambda* none (constant not integrated)\n"),
    }
    if let (Some(best), Some(l)) = (curve.best, lambda_star) {
        if best.bound < (1.0 - 1e-9) * l {
            text.push_str(&format!(
                "WARNING: bound {} undercuts audited lambda* {l}; this indicates a bug\n",
                best.bound
            ));
        }
    }
    emit(&text);
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_optimize(
    manifold: &str,
    n: usize,
    t: Option<f64>,
    seed: u64,
    max_iters: Option<usize>,
    out: &Path,
    json: bool,
) -> CliResult<()> {
    let m = ManifoldSpec::parse(manifold)?;
    let mut cfg = OptimizerConfig::for_problem(&m, n);
    if let Some(t) = t {
        cfg.t = t;
        cfg.step0 = t;
    }
    if let Some(iters) = max_iters {
        cfg.max_iters = iters;
    }
    cfg.seed = seed;
    let (rule, trace) = optimize_points(&m, n, None, &cfg)?;

    write_rule_file(out, &rule)?;
    let trace_path = PathBuf::from(format!("{}.trace.csv", out.display()));
    let mut csv = String::from("iter,energy\n");
    for (i, e) in trace.iter().enumerate() {
        csv.push_str(&format!("{i},{e:.16e}\n"));
    }
    std::fs::write(&trace_path, csv)
        .map_err(|e| CliError::Other(format!("{}: {e}", trace_path.display())))?;

    let final_energy = simplified_energy(&rule, cfg.t)?;
    let report = audit_exactness(&rule, default_lambda_max(&rule), default_audit_tol(&m))?;

    if json {
        let payload = json!({
            "manifold": m.name(),
            "nodes": n,
            "t": cfg.t,
            "seed": seed,
            "iterations": trace.len() - 1,
            "final_energy": final_energy,
            "rule_file": out.display().to_string(),
            "trace_file": trace_path.display().to_string(),
            "audit": { "k_star": report.k_star, "lambda_star": report.lambda_star },
        });
        emit(&serde_json::to_string_pretty(&payload).unwrap());
        emit("\n");
    } else {
        let mut text = String::new();
        text.push_str(&format!("manifold      {}\n", m.name()));
        text.push_str(&format!("nodes         {n}\n"));
        text.push_str(&format!("t             {:.6e}\n", cfg.t));
        text.push_str(&format!("seed          {seed}\n"));
        text.push_str(&format!("iterations    {}\n", trace.len() - 1));
        text.push_str(&format!("final energy  {final_energy:.12}\n"));
        text.push_str(&format!("rule written  {}\n", out.display()));
        text.push_str(&format!("trace written {}\n", trace_path.display()));
        text.push_str(&render_audit_text(&report, &rule, false));
        emit(&text);
    }
    Ok(())
}

pub fn cmd_constants(d_max: u32, json: bool) -> CliResult<()> {
    if d_max == 0 {
        return Err(CliError::Input("d-max must be at least 1".into()));
    }
    let mut rows = Vec::new();
    for d in 1..=d_max {
        let c = exactness_constant(d)?;
        // eigenvalue-ceiling coefficient at unit volume (the n = 1 value of
        // the n^{2/d} ceiling) and the sharp Weyl constant (2π)^d / ω_d
        let lambda_coeff = exactness_ceiling(d, 1)?.lambda;
        let weyl_coeff =
            (2.0 * std::f64::consts::PI).powi(d as i32) / qspec_core::unit_ball_volume(d);
        rows.push((d, c, lambda_coeff, weyl_coeff));
    }
    if json {
        let payload: Vec<serde_json::Value> = rows
            .iter()
            .map(|(d, c, lam, weyl)| {
                json!({
                    "d": d,
                    "c_d": c,
                    "lambda_ceiling_coeff": lam,
                    "weyl_coeff": weyl,
                })
            })
            .collect();
        emit(&serde_json::to_string_pretty(&payload).unwrap());
        emit("\n");
    } else {
        let mut text = format!(
            "{:>3}  {:>12}  {:>18}  {:>14}\n",
            "d", "c_d", "lambda_coeff", "weyl_coeff"
        );
        for (d, c, lam, weyl) in rows {
            text.push_str(&format!("{d:>3}  {c:>12.6}  {lam:>18.6}  {weyl:>14.6}\n"));
        }
        emit(&text);
    }
    Ok(())
}
