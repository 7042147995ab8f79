//! Parsing of `--body`, `--measure` and `--check` arguments.
//!
//! Each accepts inline JSON, a path to a JSON file, or a short form such as
//! `ball`, `box:1,0.5,2` or `gaussian:2`.

use std::path::Path;

use geomtomo::linalg::basis_vector;
use geomtomo::{BodySpec, MeasureSpec};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Reads `arg` as JSON when it looks like JSON or names an existing file.
/// Returns `None` for anything else so the caller can try the short form.
pub fn json_arg<T: DeserializeOwned>(arg: &str, what: &str) -> Result<Option<T>, CliError> {
    let trimmed = arg.trim_start();
    let (text, origin) = if trimmed.starts_with('{') || trimmed.starts_with('[') {
        (arg.to_string(), "inline".to_string())
    } else if Path::new(arg).is_file() {
        let text = std::fs::read_to_string(arg).map_err(|e| CliError::Config(format!("cannot read {arg}: {e}")))?;
        (text, arg.to_string())
    } else {
        return Ok(None);
    };
    serde_json::from_str(&text).map(Some).map_err(|e| {
        CliError::Config(format!(
            "malformed {what} JSON ({origin}) at line {}, column {}: {e}",
            e.line(),
            e.column()
        ))
    })
}

fn numbers(args: &str, what: &str) -> Result<Vec<f64>, CliError> {
    if args.is_empty() {
        return Ok(Vec::new());
    }
    args.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Config(format!("{what}: '{s}' is not a number")))
        })
        .collect()
}

fn split(arg: &str) -> (&str, &str) {
    arg.split_once(':').unwrap_or((arg, ""))
}

fn one(p: &[f64], default: f64, what: &str) -> Result<f64, CliError> {
    match p {
        [] => Ok(default),
        [x] => Ok(*x),
        _ => Err(CliError::Config(format!("{what} takes one parameter"))),
    }
}

fn per_axis(p: Vec<f64>, dim: usize, what: &str) -> Result<Vec<f64>, CliError> {
    match p.len() {
        0 => Ok(vec![1.0; dim]),
        1 => Ok(vec![p[0]; dim]),
        m if m == dim => Ok(p),
        m => Err(CliError::Config(format!("{what} needs 1 or {dim} parameters, got {m}"))),
    }
}

/// Short forms: `ball[:r]`, `cube[:h]`, `box[:h1,..,hn]`, `ellipsoid[:a1,..,an]`,
/// `cross_polytope[:s]`, `lp_ball:p[,s]`. Missing parameters default to 1.
pub fn parse_body(arg: &str, dim: usize) -> Result<BodySpec, CliError> {
    if let Some(b) = json_arg::<BodySpec>(arg, "body")? {
        return Ok(b);
    }
    let (name, rest) = split(arg);
    let p = numbers(rest, name)?;
    let body = match name {
        "ball" => BodySpec::ball(dim, one(&p, 1.0, name)?),
        "cube" => BodySpec::cube(dim, one(&p, 1.0, name)?),
        "box" => BodySpec::cuboid(per_axis(p, dim, name)?),
        "ellipsoid" => BodySpec::ellipsoid(per_axis(p, dim, name)?),
        "cross_polytope" | "cross" => BodySpec::cross_polytope(dim, one(&p, 1.0, name)?),
        "lp_ball" | "lp" => match p.as_slice() {
            [q] => BodySpec::lp_ball(dim, *q, 1.0),
            [q, s] => BodySpec::lp_ball(dim, *q, *s),
            _ => return Err(CliError::Config("lp_ball takes p and an optional scale".into())),
        },
        other => return Err(CliError::Config(format!("unknown body '{other}'"))),
    };
    Ok(body?)
}

/// Short forms: `lebesgue`, `radial_power:p`, `cone_power:a` (cone axis
/// `e₁`), `gaussian[:s]`, `truncated_gaussian:s,R`.
pub fn parse_measure(arg: &str, dim: usize) -> Result<MeasureSpec, CliError> {
    if let Some(m) = json_arg::<MeasureSpec>(arg, "measure")? {
        return Ok(m);
    }
    let (name, rest) = split(arg);
    let p = numbers(rest, name)?;
    let m = match name {
        "lebesgue" => return Ok(MeasureSpec::lebesgue(dim)),
        "radial_power" => MeasureSpec::radial_power(dim, one(&p, 1.0, name)?),
        "cone_power" => MeasureSpec::cone_power(basis_vector(dim, 0), one(&p, 1.0, name)?),
        "gaussian" => MeasureSpec::gaussian(dim, one(&p, 1.0, name)?),
        "truncated_gaussian" => match p.as_slice() {
            [s, r] => MeasureSpec::truncated_gaussian(dim, *s, *r),
            _ => return Err(CliError::Config("truncated_gaussian takes scale,radius".into())),
        },
        other => return Err(CliError::Config(format!("unknown measure '{other}'"))),
    };
    Ok(m?)
}

/// One entry of a check manifest. Omitted fields fall back to the command
/// line flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSpec {
    pub check: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<BodySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<BodySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasureSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sub_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enforce: Option<bool>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Manifest {
    Many(Vec<CheckSpec>),
    One(Box<CheckSpec>),
}

/// A check id, one check spec, or a manifest (JSON array of specs).
pub fn parse_checks(arg: &str) -> Result<Vec<CheckSpec>, CliError> {
    // untagged enums swallow positions, so syntax is checked first
    if let Some(v) = json_arg::<serde_json::Value>(arg, "check")? {
        let m: Manifest = serde_json::from_value(v)
            .map_err(|e| CliError::Config(format!("check spec does not match the schema: {e}")))?;
        return Ok(match m {
            Manifest::Many(v) => v,
            Manifest::One(c) => vec![*c],
        });
    }
    Ok(arg
        .split(',')
        .map(|id| CheckSpec {
            check: id.trim().to_string(),
            k: None,
            l: None,
            measure: None,
            r: None,
            epsilon: None,
            sub_dim: None,
            enforce: None,
        })
        .collect())
}
