//! Experiment configuration: a TOML schema with strict unknown-key
//! rejection, plus resolution into live problem/scheme/study objects.
//!
//! A config file describes one experiment. `[problem]` is always required;
//! `converge` additionally needs `[scheme]` and `[study]`, `defect` needs
//! `[defect]`, `solve` needs `[scheme]` and `[solve]`. Defaults are filled
//! during resolution and the filled form is what `config_echo.toml` records.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

use exprk_core::{
    make_initial_data, Grid, InitialData, NormKind, Problem, Reference, Scheme, SpectralOperator,
    SplitOperator, K_MAX,
};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// Default second abscissa of the two-stage schemes.
pub const DEFAULT_C2: f64 = 0.5;
/// Default sampled pair count of the difference-quotient norm.
pub const DEFAULT_HOLDER_PAIRS: usize = 2000;
/// Default quotient exponent.
pub const DEFAULT_HOLDER_EXPONENT: f64 = 0.5;
/// Default fine-step refinement factor.
pub const DEFAULT_REFINE: usize = 32;

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub schema_version: u32,
    pub problem: ProblemBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<SchemeBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub study: Option<StudyBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub defect: Option<DefectBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solve: Option<SolveBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputBlock>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemBlock {
    /// heat | allen_cahn | burgers | scalar_ode | scalar_split
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda2: Option<f64>,
    /// Scalar problems: starting value and affine forcing g0 + t g1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialBlock>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct InitialBlock {
    /// hat | pyramid | fourier_decay | smooth_compatible
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smoothness: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeBlock {
    /// expeuler | erk2 | split_euler | erk2l
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c2: Option<f64>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct StudyBlock {
    pub t_end: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub taus: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norms: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holder_exponent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holder_pairs: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holder_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferenceBlock>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceBlock {
    /// exact | fine_step
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refine: Option<usize>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DefectBlock {
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<u32>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SolveBlock {
    pub t_end: f64,
    pub tau: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshots: Option<usize>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formats: Option<Vec<String>>,
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Read and parse a config file; returns the parsed tree plus the sha256 of
/// the raw bytes (the hash every emitted file embeds).
pub fn load(path: &Path) -> Result<(ConfigFile, String), CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Io { path: path.to_path_buf(), source: e })?;
    let hash = hex_digest(&bytes);
    let text = String::from_utf8(bytes)
        .map_err(|_| bad(format!("config {} is not valid UTF-8", path.display())))?;
    let file: ConfigFile = toml::from_str(&text)
        .map_err(|e| bad(format!("config {}: {e}", path.display())))?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(bad(format!(
            "config {}: schema_version {} is not supported (expected {SCHEMA_VERSION})",
            path.display(),
            file.schema_version
        )));
    }
    Ok((file, hash))
}

/// Validate an already-parsed config tree (the echo round-trip path).
pub fn validate_text(text: &str) -> Result<ConfigFile, CliError> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| bad(format!("config echo: {e}")))?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(bad(format!(
            "config echo: schema_version {} is not supported",
            file.schema_version
        )));
    }
    Ok(file)
}

pub fn hex_digest(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Which blocks a command needs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Need {
    Converge,
    Defect,
    Solve,
}

/// A config with defaults filled and every object built.
pub struct Resolved {
    /// The tree with defaults made explicit; serialized into the echo file.
    pub echo: ConfigFile,
    pub hash: String,
    pub problem: Problem<f64>,
    pub scheme: Option<Scheme>,
    pub study: Option<ResolvedStudy>,
    pub defect: Option<ResolvedDefect>,
    pub solve: Option<ResolvedSolve>,
}

pub struct ResolvedStudy {
    pub t_end: f64,
    pub taus: Vec<f64>,
    pub norms: Vec<NormKind>,
    pub reference: Reference,
}

pub struct ResolvedDefect {
    pub k: usize,
    pub beta1: Option<f64>,
    pub times: Vec<f64>,
}

pub struct ResolvedSolve {
    pub t_end: f64,
    pub tau: f64,
    pub snapshots: usize,
}

fn require<T: Copy>(field: Option<T>, what: &str, name: &str) -> Result<T, CliError> {
    field.ok_or_else(|| bad(format!("problem '{name}' requires `{what}`")))
}

fn forbid<T>(field: &Option<T>, what: &str, name: &str) -> Result<(), CliError> {
    if field.is_some() {
        return Err(bad(format!("problem '{name}' does not take `{what}`")));
    }
    Ok(())
}

fn parse_scheme(name: &str, c2: Option<f64>) -> Result<Scheme, CliError> {
    match name {
        "expeuler" => {
            if c2.is_some() {
                return Err(bad("scheme 'expeuler' does not take `c2`"));
            }
            Ok(Scheme::ExpEuler)
        }
        "split_euler" => {
            if c2.is_some() {
                return Err(bad("scheme 'split_euler' does not take `c2`"));
            }
            Ok(Scheme::SplitEuler)
        }
        "erk2" => Ok(Scheme::Erk2 { c2: c2.unwrap_or(DEFAULT_C2) }),
        "erk2l" => Ok(Scheme::Erk2L { c2: c2.unwrap_or(DEFAULT_C2) }),
        other => Err(bad(format!(
            "unknown scheme '{other}' (expected expeuler, erk2, split_euler, or erk2l)"
        ))),
    }
}

fn parse_initial(block: &InitialBlock, base_seed: u64) -> Result<(InitialData, InitialBlock), CliError> {
    let mut echo = block.clone();
    let data = match block.kind.as_str() {
        "hat" => {
            forbid(&block.smoothness, "smoothness", "initial 'hat'")?;
            forbid(&block.seed, "seed", "initial 'hat'")?;
            InitialData::Hat
        }
        "pyramid" => {
            forbid(&block.smoothness, "smoothness", "initial 'pyramid'")?;
            forbid(&block.seed, "seed", "initial 'pyramid'")?;
            InitialData::Pyramid
        }
        "smooth_compatible" => {
            forbid(&block.smoothness, "smoothness", "initial 'smooth_compatible'")?;
            forbid(&block.seed, "seed", "initial 'smooth_compatible'")?;
            InitialData::SmoothCompatible
        }
        "fourier_decay" => {
            let smoothness = block
                .smoothness
                .ok_or_else(|| bad("initial 'fourier_decay' requires `smoothness`"))?;
            let seed = block.seed.unwrap_or(base_seed);
            echo.seed = Some(seed);
            InitialData::FourierDecay { smoothness, seed }
        }
        other => {
            return Err(bad(format!(
                "unknown initial data '{other}' (expected hat, pyramid, fourier_decay, or smooth_compatible)"
            )))
        }
    };
    Ok((data, echo))
}

fn grid_for(block: &ProblemBlock) -> Result<Grid, CliError> {
    let n = require(block.n, "n", &block.name)?;
    let dims = block.dims.unwrap_or(2);
    let grid = match dims {
        1 => Grid::line(n),
        2 => Grid::square(n),
        other => return Err(bad(format!("dims must be 1 or 2, got {other}"))),
    };
    grid.map_err(CliError::from)
}

fn build_problem(
    block: &ProblemBlock,
    base_seed: u64,
) -> Result<(Problem<f64>, ProblemBlock), CliError> {
    let name = block.name.as_str();
    let mut echo = block.clone();
    echo.dims = Some(block.dims.unwrap_or(2));
    let scalar_fields_absent = |b: &ProblemBlock| -> Result<(), CliError> {
        forbid(&b.lambda, "lambda", name)?;
        forbid(&b.lambda1, "lambda1", name)?;
        forbid(&b.lambda2, "lambda2", name)?;
        forbid(&b.u0, "u0", name)?;
        forbid(&b.g0, "g0", name)?;
        forbid(&b.g1, "g1", name)?;
        Ok(())
    };
    match name {
        "heat" | "allen_cahn" | "burgers" => {
            scalar_fields_absent(block)?;
            let grid = grid_for(block)?;
            let initial_block = block
                .initial
                .as_ref()
                .ok_or_else(|| bad(format!("problem '{name}' requires an [problem.initial] block")))?;
            let (spec, initial_echo) = parse_initial(initial_block, base_seed)?;
            echo.initial = Some(initial_echo);
            let u0 = make_initial_data(spec, &grid)?;
            let problem = match name {
                "heat" => {
                    forbid(&block.epsilon, "epsilon", name)?;
                    let nu = require(block.nu, "nu", name)?;
                    Problem::heat(grid, nu, u0)?
                }
                "allen_cahn" => {
                    forbid(&block.nu, "nu", name)?;
                    let eps = require(block.epsilon, "epsilon", name)?;
                    Problem::allen_cahn(grid, eps, u0)?
                }
                _ => {
                    forbid(&block.epsilon, "epsilon", name)?;
                    if grid.dims() != 2 {
                        return Err(bad("problem 'burgers' requires dims = 2"));
                    }
                    let nu = require(block.nu, "nu", name)?;
                    Problem::burgers(grid, nu, u0)?
                }
            };
            Ok((problem, echo))
        }
        "scalar_ode" | "scalar_split" => {
            forbid(&block.n, "n", name)?;
            forbid(&block.dims, "dims", name)?;
            forbid(&block.epsilon, "epsilon", name)?;
            forbid(&block.nu, "nu", name)?;
            forbid(&block.initial, "initial", name)?;
            echo.dims = None;
            let u0 = block.u0.unwrap_or(0.0);
            let g0 = block.g0.unwrap_or(0.0);
            let g1 = block.g1.unwrap_or(0.0);
            echo.u0 = Some(u0);
            echo.g0 = Some(g0);
            echo.g1 = Some(g1);
            let problem = if name == "scalar_ode" {
                forbid(&block.lambda1, "lambda1", name)?;
                forbid(&block.lambda2, "lambda2", name)?;
                let lambda = require(block.lambda, "lambda", name)?;
                let op = SpectralOperator::diagonal(vec![lambda])?;
                Problem::linear_forced(op, vec![u0], vec![g0], vec![g1])?
                    .with_label("scalar_ode")
            } else {
                forbid(&block.lambda, "lambda", name)?;
                let l1 = require(block.lambda1, "lambda1", name)?;
                let l2 = require(block.lambda2, "lambda2", name)?;
                let op = SplitOperator::diagonal(vec![l1], vec![l2])?;
                Problem::linear_forced(op, vec![u0], vec![g0], vec![g1])?
                    .with_label("scalar_split")
            };
            Ok((problem, echo))
        }
        other => Err(bad(format!(
            "unknown problem '{other}' (expected heat, allen_cahn, burgers, scalar_ode, or scalar_split)"
        ))),
    }
}

fn dyadic(base: f64, levels: u32, what: &str) -> Result<Vec<f64>, CliError> {
    if !(base > 0.0 && base.is_finite()) {
        return Err(bad(format!("{what} must be positive, got {base}")));
    }
    if levels == 0 || levels > 40 {
        return Err(bad(format!("levels must be 1..=40, got {levels}")));
    }
    Ok((0..levels).map(|j| base * f64::powi(2.0, -(j as i32))).collect())
}

fn parse_norms(
    study: &StudyBlock,
    base_seed: u64,
) -> Result<(Vec<NormKind>, StudyBlock), CliError> {
    let mut echo = study.clone();
    let names = study
        .norms
        .clone()
        .unwrap_or_else(|| vec!["max".into(), "c1".into(), "holder".into()]);
    if names.is_empty() {
        return Err(bad("norms must not be empty"));
    }
    echo.norms = Some(names.clone());
    let mut kinds = Vec::with_capacity(names.len());
    let mut holder_used = false;
    for name in &names {
        match name.as_str() {
            "max" => kinds.push(NormKind::Max),
            "c1" => kinds.push(NormKind::C1Discrete),
            "holder" => {
                if holder_used {
                    return Err(bad("at most one holder norm per study"));
                }
                holder_used = true;
                let exponent = study.holder_exponent.unwrap_or(DEFAULT_HOLDER_EXPONENT);
                let pairs = study.holder_pairs.unwrap_or(DEFAULT_HOLDER_PAIRS);
                let seed = study.holder_seed.unwrap_or(base_seed);
                echo.holder_exponent = Some(exponent);
                echo.holder_pairs = Some(pairs);
                echo.holder_seed = Some(seed);
                kinds.push(NormKind::Holder { exponent, pairs, seed });
            }
            other => {
                return Err(bad(format!(
                    "unknown norm '{other}' (expected max, c1, or holder)"
                )))
            }
        }
    }
    if !holder_used
        && (study.holder_exponent.is_some()
            || study.holder_pairs.is_some()
            || study.holder_seed.is_some())
    {
        return Err(bad("holder_* settings given but 'holder' is not among the norms"));
    }
    Ok((kinds, echo))
}

fn parse_reference(
    study: &StudyBlock,
    problem: &Problem<f64>,
) -> Result<(Reference, ReferenceBlock), CliError> {
    match &study.reference {
        None => {
            // exact when the problem affords it, otherwise the second-order
            // scheme of the matching family at the default refinement
            if problem.has_exact() {
                Ok((Reference::Exact, ReferenceBlock {
                    kind: "exact".into(),
                    scheme: None,
                    c2: None,
                    refine: None,
                }))
            } else {
                let scheme = if problem.split().is_some() {
                    Scheme::Erk2L { c2: DEFAULT_C2 }
                } else {
                    Scheme::Erk2 { c2: DEFAULT_C2 }
                };
                let name = if problem.split().is_some() { "erk2l" } else { "erk2" };
                Ok((
                    Reference::FineStep { scheme, refine: DEFAULT_REFINE },
                    ReferenceBlock {
                        kind: "fine_step".into(),
                        scheme: Some(name.into()),
                        c2: Some(DEFAULT_C2),
                        refine: Some(DEFAULT_REFINE),
                    },
                ))
            }
        }
        Some(block) => match block.kind.as_str() {
            "exact" => {
                if block.scheme.is_some() || block.c2.is_some() || block.refine.is_some() {
                    return Err(bad("reference 'exact' takes no further settings"));
                }
                if !problem.has_exact() {
                    return Err(bad(format!(
                        "problem '{}' has no closed-form solution; use kind = \"fine_step\"",
                        problem.label()
                    )));
                }
                Ok((Reference::Exact, block.clone()))
            }
            "fine_step" => {
                let name = block.scheme.clone().unwrap_or_else(|| "erk2".into());
                let scheme = parse_scheme(&name, block.c2)?;
                let refine = block.refine.unwrap_or(DEFAULT_REFINE);
                if refine < 2 {
                    return Err(bad(format!("refine must be at least 2, got {refine}")));
                }
                let mut echo = block.clone();
                echo.scheme = Some(name);
                echo.c2 = match scheme {
                    Scheme::Erk2 { c2 } | Scheme::Erk2L { c2 } => Some(c2),
                    _ => None,
                };
                echo.refine = Some(refine);
                Ok((Reference::FineStep { scheme, refine }, echo))
            }
            other => Err(bad(format!(
                "unknown reference '{other}' (expected exact or fine_step)"
            ))),
        },
    }
}

/// Build everything the given command needs, rejecting inconsistent or
/// incomplete configs.
pub fn resolve(file: &ConfigFile, hash: &str, base_seed: u64, need: Need) -> Result<Resolved, CliError> {
    let mut echo = file.clone();
    let (problem, problem_echo) = build_problem(&file.problem, base_seed)?;
    echo.problem = problem_echo;

    if let Some(output) = &file.output {
        if let Some(formats) = &output.formats {
            for f in formats {
                if f != "csv" {
                    return Err(bad(format!("unsupported output format '{f}' (only csv)")));
                }
            }
        }
        let mut output_echo = output.clone();
        output_echo.formats = Some(vec!["csv".into()]);
        echo.output = Some(output_echo);
    }

    let scheme = match (&file.scheme, need) {
        (Some(block), _) => {
            let scheme = parse_scheme(&block.name, block.c2)?;
            if scheme.is_split() && problem.split().is_none() {
                return Err(bad(format!(
                    "scheme '{}' needs a problem with a split linear part",
                    block.name
                )));
            }
            echo.scheme = Some(SchemeBlock {
                name: block.name.clone(),
                c2: match scheme {
                    Scheme::Erk2 { c2 } | Scheme::Erk2L { c2 } => Some(c2),
                    _ => None,
                },
            });
            Some(scheme)
        }
        (None, Need::Converge) => return Err(bad("converge requires a [scheme] block")),
        (None, Need::Solve) => return Err(bad("solve requires a [scheme] block")),
        (None, Need::Defect) => None,
    };

    let study = match (&file.study, need) {
        (Some(block), _) => {
            if !(block.t_end > 0.0 && block.t_end.is_finite()) {
                return Err(bad(format!("t_end must be positive, got {}", block.t_end)));
            }
            let taus = match (&block.taus, block.tau_max, block.levels) {
                (Some(ts), None, None) => {
                    if ts.is_empty() {
                        return Err(bad("taus must not be empty"));
                    }
                    ts.clone()
                }
                (None, Some(tau_max), Some(levels)) => dyadic(tau_max, levels, "tau_max")?,
                _ => {
                    return Err(bad(
                        "study needs either `taus` or the pair `tau_max` + `levels`",
                    ))
                }
            };
            let (norms, mut study_echo) = parse_norms(block, base_seed)?;
            let (reference, reference_echo) = parse_reference(block, &problem)?;
            if let Reference::FineStep { scheme, .. } = reference {
                if scheme.is_split() && problem.split().is_none() {
                    return Err(bad(
                        "fine_step reference scheme needs a problem with a split linear part",
                    ));
                }
            }
            study_echo.reference = Some(reference_echo);
            echo.study = Some(study_echo);
            Some(ResolvedStudy { t_end: block.t_end, taus, norms, reference })
        }
        (None, Need::Converge) => return Err(bad("converge requires a [study] block")),
        _ => None,
    };

    let defect = match (&file.defect, need) {
        (Some(block), _) => {
            if block.k == 0 || block.k > K_MAX {
                return Err(bad(format!("defect k must be 1..={K_MAX}, got {}", block.k)));
            }
            if problem.split().is_none() {
                return Err(bad(format!(
                    "defect study needs a problem with a split linear part; '{}' has none",
                    problem.label()
                )));
            }
            let times = match (&block.times, block.t_max, block.levels) {
                (Some(ts), None, None) => {
                    if ts.is_empty() {
                        return Err(bad("times must not be empty"));
                    }
                    ts.clone()
                }
                (None, Some(t_max), Some(levels)) => dyadic(t_max, levels, "t_max")?,
                _ => {
                    return Err(bad(
                        "defect needs either `times` or the pair `t_max` + `levels`",
                    ))
                }
            };
            // regularity label: explicit, else inherited from rough data
            let beta1 = block.beta1.or(match &file.problem.initial {
                Some(init) if init.kind == "fourier_decay" => init.smoothness,
                _ => None,
            });
            let mut defect_echo = block.clone();
            defect_echo.beta1 = beta1;
            echo.defect = Some(defect_echo);
            Some(ResolvedDefect { k: block.k, beta1, times })
        }
        (None, Need::Defect) => return Err(bad("defect requires a [defect] block")),
        _ => None,
    };

    let solve = match (&file.solve, need) {
        (Some(block), _) => {
            if !(block.t_end > 0.0 && block.t_end.is_finite()) {
                return Err(bad(format!("t_end must be positive, got {}", block.t_end)));
            }
            if !(block.tau > 0.0 && block.tau.is_finite()) {
                return Err(bad(format!("tau must be positive, got {}", block.tau)));
            }
            let snapshots = block.snapshots.unwrap_or(0);
            echo.solve = Some(SolveBlock {
                t_end: block.t_end,
                tau: block.tau,
                snapshots: Some(snapshots),
            });
            Some(ResolvedSolve { t_end: block.t_end, tau: block.tau, snapshots })
        }
        (None, Need::Solve) => return Err(bad("solve requires a [solve] block")),
        _ => None,
    };

    Ok(Resolved {
        echo,
        hash: hash.to_string(),
        problem,
        scheme,
        study,
        defect,
        solve,
    })
}
