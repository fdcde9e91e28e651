//! Output files. Every emitted file embeds the config hash; everything but
//! `timing.csv` is written deterministically so repeat runs of one config
//! produce byte-identical payloads.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use exprk_core::{ConvergenceReport, DefectReport, Grid, NormKind};

use crate::config::SCHEMA_VERSION;
use crate::CliError;

pub const LIBRARY_VERSION: &str = env!("CARGO_PKG_VERSION");

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

/// Resolve the output directory: flag beats environment beats `./exprk_out`,
/// with a config-file `output.dir` slotting between environment and default.
pub fn resolve_out_dir(flag: Option<&Path>, config_dir: Option<&str>) -> PathBuf {
    if let Some(dir) = flag {
        return dir.to_path_buf();
    }
    if let Ok(dir) = std::env::var("EXPRK_OUT_DIR") {
        if !dir.is_empty() {
            return PathBuf::from(dir);
        }
    }
    if let Some(dir) = config_dir {
        return PathBuf::from(dir);
    }
    PathBuf::from("exprk_out")
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))
}

/// Write-then-rename so readers never observe a half-written file.
pub fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let tmp = dir.join(format!(".tmp-{name}"));
    let dst = dir.join(name);
    std::fs::write(&tmp, contents).map_err(io_err(&tmp))?;
    std::fs::rename(&tmp, &dst).map_err(io_err(&dst))
}

/// Shortest round-trip decimal; diverged entries become a literal "nan".
fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x}")
    }
}

fn norm_column(kind: &NormKind) -> &'static str {
    match kind {
        NormKind::Max => "error_max",
        NormKind::C1Discrete => "error_c1",
        NormKind::Holder { .. } => "error_holder",
    }
}

pub fn report_csv(report: &ConvergenceReport<f64>, hash: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# config_sha256={hash}");
    let mut header = String::from("tau");
    for kind in &report.norms {
        header.push(',');
        header.push_str(norm_column(kind));
    }
    let _ = writeln!(out, "{header}");
    for point in &report.points {
        let mut row = num(point.tau);
        for err in &point.errors {
            row.push(',');
            row.push_str(&match err {
                Some(e) => num(*e),
                None => "nan".to_string(),
            });
        }
        let _ = writeln!(out, "{row}");
    }
    out
}

pub fn timing_csv(rows: &[(String, f64)], hash: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# config_sha256={hash}");
    let _ = writeln!(out, "label,wall_ms");
    for (label, ms) in rows {
        let _ = writeln!(out, "{label},{ms:.3}");
    }
    out
}

pub fn report_meta(report: &ConvergenceReport<f64>, hash: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "schema_version={SCHEMA_VERSION}");
    let _ = writeln!(out, "config_sha256={hash}");
    let _ = writeln!(out, "library_version={LIBRARY_VERSION}");
    let _ = writeln!(out, "command=converge");
    let _ = writeln!(out, "problem={}", report.problem);
    let _ = writeln!(out, "scheme={}", report.scheme);
    let _ = writeln!(out, "reference={}", report.reference);
    let _ = writeln!(out, "t_end={}", num(report.t_end));
    for kind in &report.norms {
        if let NormKind::Holder { exponent, pairs, seed } = kind {
            let _ = writeln!(out, "holder_exponent={}", num(*exponent));
            let _ = writeln!(out, "holder_pairs={pairs}");
            let _ = writeln!(out, "holder_seed={seed}");
        }
    }
    let taus: Vec<String> = report.points.iter().map(|p| num(p.tau)).collect();
    let _ = writeln!(out, "taus={}", taus.join(" "));
    let diverged: Vec<String> = report
        .points
        .iter()
        .filter(|p| p.diverged)
        .map(|p| num(p.tau))
        .collect();
    let _ = writeln!(
        out,
        "diverged={}",
        if diverged.is_empty() { "none".to_string() } else { diverged.join(" ") }
    );
    for (kind, fit) in report.norms.iter().zip(&report.fits) {
        let key = norm_column(kind).trim_start_matches("error_").to_string();
        match fit {
            Some(f) => {
                let _ = writeln!(out, "fit_{key}_p={}", num(f.p));
                let _ = writeln!(out, "fit_{key}_r2={}", num(f.r2));
                let _ = writeln!(out, "fit_{key}_points={}", f.points_used);
                let _ = writeln!(out, "fit_{key}_noise_floor={}", f.noise_floor);
            }
            None => {
                let _ = writeln!(out, "fit_{key}_p=nan");
                let _ = writeln!(out, "fit_{key}_r2=nan");
                let _ = writeln!(out, "fit_{key}_points=0");
                let _ = writeln!(out, "fit_{key}_noise_floor=false");
            }
        }
    }
    out
}

pub fn defect_csv(report: &DefectReport<f64>, hash: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# config_sha256={hash}");
    let _ = writeln!(out, "t,defect_norm,k,beta1");
    let beta1 = report.beta1.map(num).unwrap_or_default();
    for (t, d) in report.ts.iter().zip(&report.defects) {
        let _ = writeln!(out, "{},{},{},{beta1}", num(*t), num(*d), report.k);
    }
    out
}

pub fn defect_meta(report: &DefectReport<f64>, problem: &str, hash: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "schema_version={SCHEMA_VERSION}");
    let _ = writeln!(out, "config_sha256={hash}");
    let _ = writeln!(out, "library_version={LIBRARY_VERSION}");
    let _ = writeln!(out, "command=defect");
    let _ = writeln!(out, "problem={problem}");
    let _ = writeln!(out, "k={}", report.k);
    let _ = writeln!(
        out,
        "beta1={}",
        report.beta1.map(num).unwrap_or_else(|| "none".to_string())
    );
    match &report.fit {
        Some(f) => {
            let _ = writeln!(out, "slope={}", num(f.p));
            let _ = writeln!(out, "r2={}", num(f.r2));
            let _ = writeln!(out, "points={}", f.points_used);
            let _ = writeln!(out, "noise_floor={}", f.noise_floor);
        }
        None => {
            let _ = writeln!(out, "slope=nan");
            let _ = writeln!(out, "r2=nan");
            let _ = writeln!(out, "points=0");
            let _ = writeln!(out, "noise_floor=false");
        }
    }
    out
}

/// Grid state: 2D as one row of x-values per y index, 1D as a single row.
pub fn state_csv(grid: &Grid, t: f64, state: &[f64], hash: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# t={} N={}", num(t), grid.n_sub());
    let _ = writeln!(out, "# config_sha256={hash}");
    let nx = grid.interior();
    let ny = if grid.dims() == 2 { grid.interior() } else { 1 };
    for row in 0..ny {
        let line: Vec<String> = (0..nx).map(|col| num(state[row * nx + col])).collect();
        let _ = writeln!(out, "{}", line.join(","));
    }
    out
}

pub fn solve_meta(
    problem: &str,
    scheme: &str,
    t_end: f64,
    tau: f64,
    steps: usize,
    snapshots: usize,
    hash: &str,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "schema_version={SCHEMA_VERSION}");
    let _ = writeln!(out, "config_sha256={hash}");
    let _ = writeln!(out, "library_version={LIBRARY_VERSION}");
    let _ = writeln!(out, "command=solve");
    let _ = writeln!(out, "problem={problem}");
    let _ = writeln!(out, "scheme={scheme}");
    let _ = writeln!(out, "t_end={}", num(t_end));
    let _ = writeln!(out, "tau={}", num(tau));
    let _ = writeln!(out, "steps={steps}");
    let _ = writeln!(out, "snapshots={snapshots}");
    out
}
