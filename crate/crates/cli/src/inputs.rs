//! Parsing of grid inputs, points and depth ranges.

use std::path::Path;

use walsh_summability::io::{load_grid_1d, load_grid_2d};
use walsh_summability::sampling::{named_function_1d, named_function_2d};
use walsh_summability::{GridFunction1D, GridFunction2D, GridSpec};

use crate::args::{Input1D, Input2D};
use crate::error::{CliError, CliResult};

/// Largest resolution accepted for one-dimensional work.
pub const MAX_RESOLUTION_1D: u32 = 14;
/// Largest resolution accepted for planar work.
pub const MAX_RESOLUTION_2D: u32 = 8;

pub fn guard_1d(k: u32) -> CliResult<GridSpec> {
    if k > MAX_RESOLUTION_1D {
        return Err(CliError::GuardRail(format!(
            "resolution {k} exceeds the 1D limit {MAX_RESOLUTION_1D}"
        )));
    }
    Ok(GridSpec::new(k)?)
}

pub fn guard_2d(k: u32) -> CliResult<GridSpec> {
    if k > MAX_RESOLUTION_2D {
        return Err(CliError::GuardRail(format!(
            "resolution {k} exceeds the 2D limit {MAX_RESOLUTION_2D}"
        )));
    }
    Ok(GridSpec::new(k)?)
}

fn parse_num<T: std::str::FromStr>(token: &str, what: &str) -> CliResult<T> {
    token
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("bad {what} '{token}'")))
}

fn resolution_of(path: &Path, dims: u32) -> CliResult<u32> {
    let text = std::fs::read_to_string(path)?;
    let header = text.lines().next().unwrap_or_default();
    let k = header
        .split_whitespace()
        .find_map(|f| f.strip_prefix("resolution="))
        .ok_or_else(|| CliError::Config(format!("{}: missing resolution header", path.display())))?;
    let k = parse_num(k, "resolution")?;
    if dims == 1 {
        guard_1d(k)?;
    } else {
        guard_2d(k)?;
    }
    Ok(k)
}

fn required_resolution(resolution: Option<u32>) -> CliResult<u32> {
    resolution.ok_or_else(|| CliError::Config("--function needs --resolution".into()))
}

pub fn load_1d(input: &Input1D) -> CliResult<GridFunction1D> {
    if let Some(path) = &input.input {
        resolution_of(path, 1)?;
        return Ok(load_grid_1d(path)?);
    }
    let text = input
        .function
        .as_deref()
        .ok_or_else(|| CliError::Config("give --input or --function".into()))?;
    let spec = guard_1d(required_resolution(input.resolution)?)?;
    Ok(named_function_1d(text, spec)?)
}

pub fn load_2d(input: &Input2D) -> CliResult<GridFunction2D> {
    if let Some(path) = &input.input {
        resolution_of(path, 2)?;
        return Ok(load_grid_2d(path)?);
    }
    let text = input
        .function
        .as_deref()
        .ok_or_else(|| CliError::Config("give --input or --function".into()))?;
    let spec = guard_2d(required_resolution(input.resolution)?)?;
    Ok(named_function_2d(text, spec)?)
}

fn coordinate(token: &str, spec: GridSpec) -> CliResult<usize> {
    let token = token.trim();
    let index = if token.contains('.') {
        let x: f64 = parse_num(token, "coordinate")?;
        let scaled = x * spec.size() as f64;
        if !(0.0..spec.size() as f64).contains(&scaled) || scaled.fract() != 0.0 {
            return Err(CliError::Config(format!(
                "coordinate {token} is not a grid point at resolution {}",
                spec.resolution()
            )));
        }
        scaled as usize
    } else {
        parse_num(token, "index")?
    };
    spec.check_index(index)?;
    Ok(index)
}

/// `i,j` grid indices or `x,y` dyadic coordinates.
pub fn parse_point(text: &str, spec: GridSpec) -> CliResult<(usize, usize)> {
    let (a, b) = text
        .split_once(',')
        .ok_or_else(|| CliError::Config(format!("point '{text}' needs two coordinates")))?;
    Ok((coordinate(a, spec)?, coordinate(b, spec)?))
}

pub fn parse_points(text: &str, spec: GridSpec) -> CliResult<Vec<(usize, usize)>> {
    text.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| parse_point(p, spec))
        .collect()
}

/// Inclusive `a..b`, defaulting to `1..K`.
pub fn parse_depths(text: Option<&str>, spec: GridSpec) -> CliResult<Vec<u32>> {
    let Some(text) = text else {
        return Ok((1..=spec.resolution()).collect());
    };
    let (a, b) = text
        .split_once("..")
        .ok_or_else(|| CliError::Config(format!("depth range '{text}' must look like a..b")))?;
    let (a, b): (u32, u32) = (parse_num(a, "depth")?, parse_num(b, "depth")?);
    if a > b || b > spec.resolution() {
        return Err(CliError::Config(format!(
            "depth range {a}..{b} must be increasing and at most {}",
            spec.resolution()
        )));
    }
    Ok((a..=b).collect())
}
