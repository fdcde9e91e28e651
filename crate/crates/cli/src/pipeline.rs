//! The four commands behind the CLI surface.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use exprk_core::{
    integrate_observed, phi_quadrature_oracle, phi_scalar, run_convergence_study,
    split_defect_study, Error,
};

use crate::config::{validate_text, Resolved};
use crate::emit;
use crate::CliError;

/// Tabulate phi_k alongside the quadrature oracle on stdout.
pub fn run_phi(
    k: usize,
    z: Option<f64>,
    z_min: f64,
    z_max: f64,
    count: usize,
) -> Result<i32, CliError> {
    let args: Vec<f64> = match z {
        Some(z) => vec![z],
        None => {
            if count < 2 {
                return Err(CliError::Config(format!(
                    "sweep needs at least 2 points, got {count}"
                )));
            }
            if !(z_min < z_max) {
                return Err(CliError::Config(format!(
                    "sweep needs z_min < z_max, got {z_min} and {z_max}"
                )));
            }
            let h = (z_max - z_min) / (count - 1) as f64;
            (0..count).map(|j| z_min + h * j as f64).collect()
        }
    };
    let mut rows = Vec::with_capacity(args.len());
    for &z in &args {
        let phi = phi_scalar(k, z)?;
        let oracle = phi_quadrature_oracle(k, z, 1e-14)?;
        let scale = phi.abs().max(oracle.abs()).max(f64::MIN_POSITIVE);
        let rel = (phi - oracle).abs() / scale;
        rows.push((z, phi, oracle, rel));
    }
    println!("z, phi, oracle, rel_diff");
    for (z, phi, oracle, rel) in rows {
        println!("{z}, {phi}, {oracle}, {rel}");
    }
    Ok(0)
}

/// Serialize the defaults-filled config, check it still parses, write it.
fn write_echo(resolved: &Resolved, dir: &Path) -> Result<(), CliError> {
    let body = toml::to_string_pretty(&resolved.echo)
        .map_err(|e| CliError::Config(format!("config echo serialization: {e}")))?;
    // the echo must itself be a valid config
    validate_text(&body)?;
    let contents = format!("# config_sha256={}\n{body}", resolved.hash);
    emit::write_atomic(dir, "config_echo.toml", &contents)
}

pub fn run_converge(resolved: &Resolved, dir: &Path) -> Result<i32, CliError> {
    let study = resolved.study.as_ref().expect("resolve checked the study block");
    let scheme = resolved.scheme.expect("resolve checked the scheme block");
    emit::ensure_dir(dir)?;
    write_echo(resolved, dir)?;

    let report = run_convergence_study(
        &resolved.problem,
        scheme,
        &study.taus,
        study.t_end,
        &study.norms,
        study.reference,
    )?;

    emit::write_atomic(dir, "report.csv", &emit::report_csv(&report, &resolved.hash))?;
    let timing: Vec<(String, f64)> = report
        .points
        .iter()
        .map(|p| (format!("{}", p.tau), p.wall_ms))
        .collect();
    emit::write_atomic(dir, "timing.csv", &emit::timing_csv(&timing, &resolved.hash))?;
    emit::write_atomic(dir, "report.meta", &emit::report_meta(&report, &resolved.hash))?;

    for (kind, fit) in report.norms.iter().zip(&report.fits) {
        match fit {
            Some(f) => println!(
                "fit {}: p={:.4} r2={:.6} points={}{}",
                kind.label(),
                f.p,
                f.r2,
                f.points_used,
                if f.noise_floor { " (noise floor)" } else { "" }
            ),
            None => println!("fit {}: not available", kind.label()),
        }
    }
    if report.any_diverged() {
        let taus: Vec<String> = report
            .points
            .iter()
            .filter(|p| p.diverged)
            .map(|p| format!("{}", p.tau))
            .collect();
        eprintln!("diverged at tau = {}", taus.join(", "));
        return Ok(3);
    }
    println!("wrote {}", dir.display());
    Ok(0)
}

pub fn run_defect(resolved: &Resolved, dir: &Path) -> Result<i32, CliError> {
    let defect = resolved.defect.as_ref().expect("resolve checked the defect block");
    let split = resolved
        .problem
        .split()
        .expect("resolve checked the split structure");
    emit::ensure_dir(dir)?;
    write_echo(resolved, dir)?;

    let start = Instant::now();
    let report = split_defect_study(
        defect.k,
        split,
        resolved.problem.initial(),
        defect.beta1,
        &defect.times,
    )?;
    let wall = start.elapsed().as_secs_f64() * 1e3;

    emit::write_atomic(dir, "defect.csv", &emit::defect_csv(&report, &resolved.hash))?;
    emit::write_atomic(
        dir,
        "defect.meta",
        &emit::defect_meta(&report, resolved.problem.label(), &resolved.hash),
    )?;
    emit::write_atomic(
        dir,
        "timing.csv",
        &emit::timing_csv(&[("total".to_string(), wall)], &resolved.hash),
    )?;

    match &report.fit {
        Some(f) => println!("defect k={} slope={:.4} r2={:.6}", report.k, f.p, f.r2),
        None => println!("defect k={}: no slope fit", report.k),
    }
    println!("wrote {}", dir.display());
    Ok(0)
}

pub fn run_solve(resolved: &Resolved, dir: &Path) -> Result<i32, CliError> {
    let solve = resolved.solve.as_ref().expect("resolve checked the solve block");
    let scheme = resolved.scheme.expect("resolve checked the scheme block");
    emit::ensure_dir(dir)?;
    write_echo(resolved, dir)?;

    let n_steps = (solve.t_end / solve.tau).round().max(1.0) as usize;
    // interior snapshot targets, evenly spread over the step range
    let mut targets: BTreeMap<usize, usize> = BTreeMap::new();
    for i in 1..=solve.snapshots {
        let step = ((i * n_steps) as f64 / (solve.snapshots + 1) as f64).round() as usize;
        if step >= 1 && step < n_steps {
            let next = targets.len() + 1;
            targets.entry(step).or_insert(next);
        }
    }

    let mut captured: Vec<(usize, f64, Vec<f64>)> = Vec::new();
    let start = Instant::now();
    let result = integrate_observed(
        scheme,
        &resolved.problem,
        solve.tau,
        solve.t_end,
        &mut |step, t, u| {
            if let Some(&index) = targets.get(&step) {
                captured.push((index, t, u.to_vec()));
            }
        },
    );
    let wall = start.elapsed().as_secs_f64() * 1e3;
    let final_state = match result {
        Ok(u) => u,
        Err(Error::Divergence { t }) => {
            let step = (t / solve.tau).round() as usize;
            return Err(CliError::Diverged { t, step });
        }
        Err(e) => return Err(e.into()),
    };

    let grid = *resolved.problem.grid();
    for (index, t, state) in &captured {
        emit::write_atomic(
            dir,
            &format!("state_{index:04}.csv"),
            &emit::state_csv(&grid, *t, state, &resolved.hash),
        )?;
    }
    emit::write_atomic(
        dir,
        "state_final.csv",
        &emit::state_csv(&grid, solve.t_end, &final_state, &resolved.hash),
    )?;
    emit::write_atomic(
        dir,
        "solve.meta",
        &emit::solve_meta(
            resolved.problem.label(),
            &scheme.label(),
            solve.t_end,
            solve.tau,
            n_steps,
            captured.len(),
            &resolved.hash,
        ),
    )?;
    emit::write_atomic(
        dir,
        "timing.csv",
        &emit::timing_csv(&[("total".to_string(), wall)], &resolved.hash),
    )?;

    println!("{} steps, final sup = {}", n_steps, sup(&final_state));
    println!("wrote {}", dir.display());
    Ok(0)
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}
