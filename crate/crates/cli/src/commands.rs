use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use todashape_core::curve::{solve_4d, CurveData, SolveOptions};
use todashape_core::dtoda::{lax_flow_residual, verify_identification};
use todashape_core::limitshape::{density_profile, verify_rh, GridSpec};
use todashape_core::model::partition_function;
use todashape_core::prepotential::{
    de_dtk_contour_complex, de_dtk_density, de_dtk_fd, energy_critical, gradient_report, hessian_symmetry,
    period_check, ContourSpec,
};
use todashape_core::sampler::{compare_limit_shape, sample_batch};
use todashape_core::Theory;

use crate::config::RunConfig;
use crate::output::{csv, emit, fmt_f64, to_json};
use crate::CliError;

const FD_STEP: f64 = 1e-4;
const HESSIAN_STEP: f64 = 1e-3;
const LAX_DELTA: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Target {
    Rh,
    Gse,
    Lax,
    Prepotential,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::Rh => "rh",
            Target::Gse => "gse",
            Target::Lax => "lax",
            Target::Prepotential => "prepotential",
        }
    }

    /// Comma-separated list; empty entries are dropped, an empty list is an
    /// error.
    pub fn parse_list(list: &str) -> Result<Vec<Target>, CliError> {
        let mut out = Vec::new();
        for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let t = match name {
                "rh" => Target::Rh,
                "gse" => Target::Gse,
                "lax" => Target::Lax,
                "prepotential" => Target::Prepotential,
                other => return Err(CliError::Config(format!("unknown verify target {other:?}"))),
            };
            if !out.contains(&t) {
                out.push(t);
            }
        }
        if out.is_empty() {
            return Err(CliError::Config("empty verify target list".into()));
        }
        out.sort();
        Ok(out)
    }
}

fn solve(cfg: &RunConfig) -> Result<CurveData, CliError> {
    Ok(cfg.background().solve(SolveOptions::default())?)
}

#[derive(Serialize)]
struct PartfunOut {
    #[serde(rename = "Z")]
    z: f64,
    last_shell: f64,
    cutoff: usize,
}

pub fn partfun(cfg: &RunConfig, out: Option<&Path>) -> Result<(), CliError> {
    let params = cfg.model_params()?;
    let zs = partition_function(&params, cfg.cutoffs.partition_sum)?;
    emit(out, &to_json(&PartfunOut { z: zs.z, last_shell: zs.last_shell, cutoff: zs.cutoff })?)?;
    eprintln!("Z = {} (cutoff {}, last shell {:e})", fmt_f64(zs.z), zs.cutoff, zs.last_shell);
    Ok(())
}

pub fn limitshape(cfg: &RunConfig, out: Option<&Path>) -> Result<(), CliError> {
    let curve = solve(cfg)?;
    let prof = density_profile(&curve, cfg.cutoffs.n_grid)?;
    let rows = prof.u_grid.iter().zip(&prof.rho).map(|(u, r)| vec![fmt_f64(*u), fmt_f64(*r)]);
    emit(out, &csv(&["u", "rho"], rows))?;
    eprintln!(
        "cut [{:.6}, {:.6}], beta = {:.12}, lambda = {:.12}, {} points",
        curve.u0,
        curve.u1,
        curve.beta,
        curve.lambda,
        prof.u_grid.len()
    );
    Ok(())
}

fn check(value: f64, tol: f64) -> Value {
    json!({ "value": value, "tolerance": tol, "passed": value <= tol })
}

fn all_passed(v: &Value) -> bool {
    match v {
        Value::Object(m) => m.iter().all(|(k, x)| if k == "passed" { x.as_bool() == Some(true) } else { all_passed(x) }),
        Value::Array(a) => a.iter().all(all_passed),
        _ => true,
    }
}

fn verify_rh_target(cfg: &RunConfig, curve: &CurveData) -> Result<Value, CliError> {
    let grid = GridSpec { n_interior: cfg.cutoffs.n_grid, ..GridSpec::default() };
    let rep = verify_rh(curve, grid)?;
    let mut v = json!({
        "interior": check(rep.max_interior_residual, cfg.tolerance("rh_interior")),
        "jump": check(rep.max_jump_residual, cfg.tolerance("rh_jump")),
        "asymptotic": check(rep.max_asymptotic(), cfg.tolerance("rh_asymptotic")),
        "asymptotic_detail": rep.asymptotic_residuals,
    });
    if let Some(p) = rep.periodicity_residual {
        v["periodicity"] = check(p, cfg.tolerance("rh_periodicity"));
    }
    Ok(v)
}

fn verify_gse_target(cfg: &RunConfig, curve: &CurveData) -> Result<Value, CliError> {
    let rep = verify_identification(curve)?;
    let string = rep.eq1_residual.max(rep.eq2_residual.unwrap_or(0.0));
    Ok(json!({
        "string_equations": check(string, cfg.tolerance("gse_string")),
        "eq1_residual": rep.eq1_residual,
        "eq2_residual": rep.eq2_residual,
        "eq2_status": rep.eq2_status,
        "w_m": check(rep.w_m_residual, cfg.tolerance("gse_w_m")),
    }))
}

fn verify_lax_target(cfg: &RunConfig) -> Result<Value, CliError> {
    let bg = cfg.background();
    let tol = cfg.tolerance("lax_flow");
    let mut flows = Vec::new();
    for k in 1..=cfg.k_max() as u32 {
        let r = lax_flow_residual(k, &bg, LAX_DELTA)?;
        flows.push(json!({ "k": k, "delta": LAX_DELTA, "residual": check(r, tol) }));
    }
    Ok(json!({ "flows": flows }))
}

fn verify_prepotential_target(cfg: &RunConfig, curve: &CurveData) -> Result<Value, CliError> {
    let bg = cfg.background();
    let k_max = cfg.k_max();
    let mut gradients = Vec::new();
    for k in 1..=k_max {
        let g = gradient_report(&bg, k, cfg.cutoffs.n_quad, FD_STEP)?;
        gradients.push(json!({
            "k": k,
            "density_route": g.density_route,
            "contour_route": g.contour_route,
            "fd_route": g.fd_route,
            "density_vs_contour": check(g.density_vs_contour, cfg.tolerance("prep_density_contour")),
            "contour_vs_fd": check(g.contour_vs_fd, cfg.tolerance("prep_contour_fd")),
            "radius_spread": check(g.radius_spread, cfg.tolerance("prep_radius")),
        }));
    }
    let mut hessian = Vec::new();
    for j in 1..=k_max {
        for k in j + 1..=k_max {
            let h = hessian_symmetry(&bg, j, k, HESSIAN_STEP)?;
            hessian.push(json!({ "j": j, "k": k, "asymmetry": check(h, cfg.tolerance("prep_hessian")) }));
        }
    }
    let contour = ContourSpec { n_nodes: cfg.cutoffs.contour_nodes, ..ContourSpec::default_for(curve) };
    let pc = period_check(curve, &contour)?;
    Ok(json!({
        "gradients": gradients,
        "hessian": hessian,
        "period": check(pc.residual(), cfg.tolerance("prep_period")),
    }))
}

/// Runs the selected checks and returns whether all of them passed.
///
/// `beta_shift` moves `β` of the solved curve before the `rh` check only,
/// leaving every other field as solved.
pub fn verify(cfg: &RunConfig, targets: &[Target], beta_shift: f64, out: Option<&Path>) -> Result<bool, CliError> {
    if targets.is_empty() {
        return Err(CliError::Config("empty verify target list".into()));
    }
    if !beta_shift.is_finite() {
        return Err(CliError::Config("beta shift must be finite".into()));
    }
    let curve = solve(cfg)?;
    let mut report = serde_json::Map::new();
    for &t in targets {
        let v = match t {
            Target::Rh => {
                let mut probed = curve.clone();
                probed.beta += beta_shift;
                let mut v = verify_rh_target(cfg, &probed)?;
                v["beta_shift"] = json!(beta_shift);
                v
            }
            Target::Gse => verify_gse_target(cfg, &curve)?,
            Target::Lax => verify_lax_target(cfg)?,
            Target::Prepotential => verify_prepotential_target(cfg, &curve)?,
        };
        let ok = all_passed(&v);
        let mut v = v;
        v["passed"] = json!(ok);
        eprintln!("{:<13} {}", t.name(), if ok { "PASS" } else { "FAIL" });
        report.insert(t.name().to_string(), v);
    }
    let passed = report.values().all(all_passed);
    let doc = json!({
        "theory": cfg.theory,
        "beta": curve.beta,
        "lambda": curve.lambda,
        "targets": Value::Object(report),
        "passed": passed,
    });
    emit(out, &to_json(&doc)?)?;
    Ok(passed)
}

pub fn sample(cfg: &RunConfig, out: Option<&Path>) -> Result<(), CliError> {
    let sm = cfg.sampler.as_ref().ok_or_else(|| CliError::Config("sample needs a sampler section".into()))?;
    if cfg.theory != Theory::FourD {
        return Err(CliError::Config("sample draws the 4d Plancherel measure; theory must be 4d".into()));
    }
    if cfg.t.iter().any(|&x| x != 0.0) {
        return Err(CliError::Config("sample draws the undeformed measure; t must vanish".into()));
    }
    let hbar = cfg.lambda0 / sm.xi.sqrt();
    let charge = cfg.charge(hbar)?;
    let s = charge as f64 * hbar;
    let reference = density_profile(&solve_4d(s, &[], cfg.lambda0, SolveOptions::default())?, 512)?;
    let edges: Vec<f64> = (0..=50).map(|j| s + cfg.lambda0 * (-2.5 + 0.1 * j as f64)).collect();
    let batch = sample_batch(sm.xi, sm.n_samples, sm.seed)?.with_lambda0(cfg.lambda0);
    let cmp = compare_limit_shape(&batch, charge, &reference, &edges)?;
    let rows = batch.shapes.iter().zip(&cmp.sample_sup).enumerate().map(|(i, (mu, d))| {
        let parts: Vec<String> = mu.parts().iter().map(|p| p.to_string()).collect();
        vec![i.to_string(), mu.size().to_string(), parts.join(";"), fmt_f64(*d)]
    });
    emit(out, &csv(&["sample_index", "n", "rows", "sup_dist"], rows))?;
    let tol = cfg.tolerance("sample_sup");
    eprintln!(
        "{} samples at xi = {}: batch sup distance {:.5} (tolerance {}: {}), L2 {:.5}",
        sm.n_samples,
        sm.xi,
        cmp.sup_dist,
        tol,
        if cmp.sup_dist <= tol { "within" } else { "exceeded" },
        cmp.l2_dist
    );
    Ok(())
}

#[derive(Serialize)]
struct GradientOut {
    k: usize,
    density_route: f64,
    contour_route: f64,
    contour_imag: f64,
    fd_route: f64,
}

#[derive(Serialize)]
struct PrepotentialOut {
    theory: Theory,
    energy: f64,
    gradients: Vec<GradientOut>,
    period_lhs: [f64; 2],
    period_rhs: [f64; 2],
}

pub fn prepotential(cfg: &RunConfig, out: Option<&Path>) -> Result<(), CliError> {
    let bg = cfg.background();
    let curve = solve(cfg)?;
    let n_quad = cfg.cutoffs.n_quad;
    let energy = energy_critical(&curve, n_quad)?;
    let contour = ContourSpec { n_nodes: cfg.cutoffs.contour_nodes, ..ContourSpec::default_for(&curve) };
    let mut gradients = Vec::new();
    for k in 1..=cfg.k_max() {
        let c = de_dtk_contour_complex(k, &curve, &contour)?;
        gradients.push(GradientOut {
            k,
            density_route: de_dtk_density(k, &curve, n_quad)?,
            contour_route: c.re,
            contour_imag: c.im,
            fd_route: de_dtk_fd(k, &bg, FD_STEP, n_quad)?,
        });
    }
    let pc = period_check(&curve, &contour)?;
    let doc = PrepotentialOut {
        theory: cfg.theory,
        energy,
        gradients,
        period_lhs: [pc.lhs.re, pc.lhs.im],
        period_rhs: [pc.rhs.re, pc.rhs.im],
    };
    emit(out, &to_json(&doc)?)?;
    eprintln!("critical energy {}", fmt_f64(energy));
    Ok(())
}
