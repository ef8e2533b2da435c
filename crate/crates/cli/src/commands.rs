//! One function per subcommand. Each returns its CSV (if any), a JSON report
//! and the process exit status.

use riesz_core::reduced::{applicable_reduction, cross_validate};
use riesz_core::riesz::{self, basis_check, completeness_defect, gram_section, gram_trend};
use riesz_core::spectrum::asymptotic_diagnostics;
use riesz_core::{propagator, Problem, Spectrum, ThetaSet, Verdict};
use serde_json::{json, Value};

use crate::config::Config;
use crate::table::{float, optional, Table};
use crate::CliError;

pub struct Output {
    /// File stem and contents of the CSV artifact.
    pub csv: Option<(&'static str, String)>,
    pub report: Value,
    pub exit: u8,
}

impl Output {
    fn data(name: &'static str, csv: String, report: Value) -> Self {
        Self { csv: Some((name, csv)), report, exit: 0 }
    }
}

fn spectrum_with(cfg: &Config, p: &Problem, n_max: usize) -> Result<Spectrum, CliError> {
    Ok(Spectrum::compute(p, n_max, &cfg.tolerances.solver())?)
}

/// Enough eigenpairs for every requested Gram section after removing `Θ`.
fn n_max_for_sections(cfg: &Config, p: &Problem) -> usize {
    let largest = cfg.sizes().into_iter().max().unwrap_or(0);
    cfg.n_max.max((largest + p.n()).saturating_sub(1))
}

fn verdict_exit(v: Verdict) -> u8 {
    match v {
        Verdict::Basis => 0,
        Verdict::NotBasis => 3,
        Verdict::Borderline => 4,
    }
}

pub fn spectrum(cfg: &Config) -> Result<Output, CliError> {
    let p = cfg.problem()?;
    let sp = spectrum_with(cfg, &p, cfg.n_max)?;
    let mut header: Vec<String> = ["n", "lambda", "beta", "psi0", "psiPi"].map(String::from).to_vec();
    header.extend((0..sp.n_boundary()).map(|k| format!("psihat_{k}")));
    let mut t = Table::new(&header)?;
    for pair in &sp.pairs {
        let mut row = vec![
            pair.n.to_string(),
            float(pair.lambda),
            float(pair.beta),
            float(pair.psi_at_zero()),
            float(pair.psi_at_pi()),
        ];
        row.extend(pair.psi_hat.iter().map(|&x| float(x)));
        t.row(row)?;
    }
    let report = json!({
        "eigenpairs": sp.len(),
        "n_boundary": sp.n_boundary(),
        "index_f": sp.index_f(),
        "index_F": sp.index_big_f(),
        "lowest": sp.pairs.first().map(|x| x.lambda),
        "highest": sp.pairs.last().map(|x| x.lambda),
    });
    Ok(Output::data("spectrum", t.finish()?, report))
}

pub fn basis_check_cmd(cfg: &Config) -> Result<Output, CliError> {
    let p = cfg.problem()?;
    let theta = cfg.theta_set(&p)?;
    let sp = spectrum_with(cfg, &p, n_max_for_sections(cfg, &p))?;
    let report = basis_check(&p, &sp, &theta, &cfg.sizes(), &cfg.tolerances.thresholds())?;
    let exit = verdict_exit(report.verdict);
    Ok(Output { csv: None, report: serde_json::to_value(&report)?, exit })
}

pub fn gram(cfg: &Config) -> Result<Output, CliError> {
    let p = cfg.problem()?;
    let theta = cfg.theta_set(&p)?;
    let sp = spectrum_with(cfg, &p, n_max_for_sections(cfg, &p))?;
    let sections = gram_section(&sp, &theta, &cfg.sizes())?;
    let mut t = Table::new(&["size", "min_eig", "max_eig"])?;
    for s in &sections {
        t.row(vec![s.size.to_string(), float(s.min_eig), float(s.max_eig)])?;
    }
    let report = json!({ "theta": theta, "trend": gram_trend(&sections) });
    Ok(Output::data("gram", t.finish()?, report))
}

pub fn sweep_pairs(cfg: &Config) -> Result<Output, CliError> {
    let p = cfg.problem()?;
    if p.n() != 2 {
        return Err(CliError::Config(format!("sweep over pairs needs N = 2, problem has N = {}", p.n())));
    }
    let sp = spectrum_with(cfg, &p, cfg.n_max)?;
    let thresholds = cfg.tolerances.thresholds();
    let reduction = applicable_reduction(&p);
    let mut t = Table::new(&["n1", "n2", "sigma_min_full", "verdict_full", "verdict_reduced", "agree"])?;
    let (mut rows, mut disagreements, mut refine) = (0usize, 0usize, 0usize);
    for n1 in 0..=cfg.n_max {
        for n2 in n1 + 1..=cfg.n_max {
            let theta = ThetaSet::new(vec![n1, n2], 2)?;
            let m = riesz::build_m(&sp, &theta)?;
            let sigma = riesz::singular_values(&m).last().copied().unwrap_or(f64::INFINITY);
            let full = riesz::verdict_with(&m, riesz::row_scale(&m), &thresholds);
            let (reduced, agree) = match reduction {
                Some(_) => {
                    let c = cross_validate(&p, &sp, &theta, &thresholds)?;
                    disagreements += usize::from(!c.agree);
                    refine += usize::from(c.needs_refinement);
                    (c.reduced_verdict.as_str().to_string(), c.agree.to_string())
                }
                None => (String::new(), String::new()),
            };
            t.row(vec![n1.to_string(), n2.to_string(), float(sigma), full.as_str().into(), reduced, agree])?;
            rows += 1;
        }
    }
    let report = json!({
        "mode": "pairs",
        "pairs": rows,
        "reduction": reduction,
        "disagreements": reduction.map(|_| disagreements),
        "needs_refinement": reduction.map(|_| refine),
    });
    Ok(Output::data("sweep", t.finish()?, report))
}

pub fn beta(cfg: &Config) -> Result<Output, CliError> {
    let p = cfg.problem()?;
    let sp = spectrum_with(cfg, &p, cfg.n_max)?;
    let diag = asymptotic_diagnostics(&sp)?;
    let mut t = Table::new(&["n", "lambda", "beta", "xi", "offset"])?;
    for r in &diag.rows {
        t.row(vec![r.n.to_string(), float(r.lambda), float(r.beta), optional(r.xi), float(r.offset)])?;
    }
    let report = json!({
        "xi_partial_sum": diag.xi_partial_sums.last(),
        "xi_tail_not_decaying": diag.xi_tail_not_decaying,
        "offset_tail_not_decaying": diag.offset_tail_not_decaying,
    });
    Ok(Output::data("beta", t.finish()?, report))
}

pub fn defect(cfg: &Config) -> Result<Output, CliError> {
    let p = cfg.problem()?;
    let theta = cfg.theta_set(&p)?;
    let sp = spectrum_with(cfg, &p, cfg.n_max)?;
    let d = completeness_defect(&sp, &theta, cfg.n_max)?;
    let mut t = Table::new(&["n", "residual"])?;
    for &(n, r) in &d.residuals {
        t.row(vec![n.to_string(), float(r)])?;
    }
    let worst = d.residuals.iter().fold(0.0f64, |m, r| m.max(r.1.abs()));
    let report = json!({ "theta": theta, "alpha": d.alpha, "l2_norm": d.l2_norm, "max_abs_residual": worst });
    Ok(Output::data("defect", t.finish()?, report))
}

pub fn dump_omega(cfg: &Config, lo: f64, hi: f64, points: usize) -> Result<Output, CliError> {
    if points < 2 || !lo.is_finite() || !hi.is_finite() || hi <= lo {
        return Err(CliError::Config(format!(
            "dump-omega needs lambda_min < lambda_max and at least 2 points, got [{lo}, {hi}] with {points}"
        )));
    }
    let p = cfg.problem()?;
    let mut t = Table::new(&["lambda", "omega", "sign", "log10_abs"])?;
    let (mut changes, mut last_sign) = (0usize, 0.0);
    for i in 0..points {
        let lambda = lo + (hi - lo) * i as f64 / (points - 1) as f64;
        let w = propagator::characteristic_scaled(&p, lambda);
        let sign = w.signum();
        if sign != 0.0 && last_sign != 0.0 && sign != last_sign {
            changes += 1;
        }
        if sign != 0.0 {
            last_sign = sign;
        }
        let log10 = w.log2_abs() * std::f64::consts::LOG10_2;
        t.row(vec![float(lambda), float(w.value()), format!("{sign:.0}"), float(log10)])?;
    }
    let report = json!({ "lambda_min": lo, "lambda_max": hi, "points": points, "sign_changes": changes });
    Ok(Output::data("omega", t.finish()?, report))
}

pub fn dump_trajectory(cfg: &Config, lambda: f64) -> Result<Output, CliError> {
    if !lambda.is_finite() {
        return Err(CliError::Config(format!("lambda must be finite, got {lambda}")));
    }
    let p = cfg.problem()?;
    let traj = propagator::solve_left(&p, lambda);
    let mut t = Table::new(&["x", "u", "v"])?;
    for (x, st) in traj.grid.iter().zip(&traj.states) {
        t.row(vec![float(*x), float(st.u), float(st.v)])?;
    }
    let report = json!({ "lambda": lambda, "points": traj.len() });
    Ok(Output::data("trajectory", t.finish()?, report))
}
