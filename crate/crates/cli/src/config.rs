//! Run configuration, read from a small TOML file:
//!
//! ```toml
//! modes = 2
//! hamiltonian = "lambda*(c(2)*c'(1) + c(1)*c'(2))"
//! initial = [1, 0]        # mode 1 first; "1,0" also accepted
//! t_end = 10.0
//! samples = 1001
//! verify = false          # optional
//! csv = "out.csv"         # optional, relative to this file
//! svg = "out.svg"         # optional
//!
//! [param]
//! lambda = 1.0
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use fermidyn_core::fermion::MAX_MODES;
use serde::Deserialize;
use toml::Spanned;

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub n_modes: usize,
    pub hamiltonian: String,
    pub parameters: BTreeMap<String, f64>,
    /// Mode 1 first.
    pub initial: Vec<u8>,
    pub t_end: f64,
    pub samples: usize,
    pub verify: bool,
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Occupations {
    List(Vec<i64>),
    Text(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    modes: Spanned<i64>,
    hamiltonian: String,
    #[serde(default)]
    param: BTreeMap<String, f64>,
    initial: Spanned<Occupations>,
    t_end: Spanned<f64>,
    samples: Spanned<i64>,
    #[serde(default)]
    verify: bool,
    csv: Option<PathBuf>,
    svg: Option<PathBuf>,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Parses configuration text; `origin` names the source in error messages.
pub fn parse_config(text: &str, origin: &str) -> Result<RunConfig, CliError> {
    let fail = |span: Option<std::ops::Range<usize>>, message: String| CliError::Config {
        path: origin.to_string(),
        message: match span {
            Some(s) => format!("line {}: {message}", line_of(text, s.start)),
            None => message,
        },
    };
    let raw: RawConfig =
        toml::from_str(text).map_err(|e| fail(e.span(), e.message().to_string()))?;

    let n_modes = *raw.modes.get_ref();
    if n_modes < 1 || n_modes > MAX_MODES as i64 {
        return Err(fail(
            Some(raw.modes.span()),
            format!("modes must be between 1 and {MAX_MODES}, got {n_modes}"),
        ));
    }
    let n_modes = n_modes as usize;

    let initial_span = raw.initial.span();
    let values: Vec<i64> = match raw.initial.into_inner() {
        Occupations::List(v) => v,
        Occupations::Text(s) => s
            .split(',')
            .map(|part| part.trim().parse::<i64>())
            .collect::<Result<_, _>>()
            .map_err(|_| {
                fail(
                    Some(initial_span.clone()),
                    format!("initial must list 0/1 values, got {s:?}"),
                )
            })?,
    };
    if let Some(bad) = values.iter().find(|&&v| v != 0 && v != 1) {
        return Err(fail(
            Some(initial_span),
            format!("occupations must be 0 or 1, got {bad}"),
        ));
    }
    if values.len() != n_modes {
        return Err(fail(
            Some(initial_span),
            format!(
                "initial lists {} occupations for {n_modes} modes",
                values.len()
            ),
        ));
    }

    let t_end = *raw.t_end.get_ref();
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(fail(
            Some(raw.t_end.span()),
            format!("t_end must be positive, got {t_end}"),
        ));
    }
    let samples = *raw.samples.get_ref();
    if samples < 2 {
        return Err(fail(
            Some(raw.samples.span()),
            format!("samples must be at least 2, got {samples}"),
        ));
    }

    Ok(RunConfig {
        n_modes,
        hamiltonian: raw.hamiltonian,
        parameters: raw.param,
        initial: values.into_iter().map(|v| v as u8).collect(),
        t_end,
        samples: samples as usize,
        verify: raw.verify,
        csv: raw.csv,
        svg: raw.svg,
    })
}

/// Reads and validates a config file. Relative output paths are resolved
/// against the file's directory.
pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config {
        path: path.display().to_string(),
        message: format!("cannot read config: {e}"),
    })?;
    let mut config = parse_config(&text, &path.display().to_string())?;
    let base = path.parent().unwrap_or(Path::new(""));
    for target in [&mut config.csv, &mut config.svg].into_iter().flatten() {
        if target.is_relative() {
            *target = base.join(&*target);
        }
    }
    Ok(config)
}
