//! Axis syntax: a single value `1.5`, a list `0.5,1,1.5`, or a range
//! `start:stop:points` with an optional `:log` suffix.

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

fn number(s: &str) -> CliResult<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| CliError::usage(format!("not a number: '{s}'")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::usage(format!("axis values must be finite, got '{s}'")))
    }
}

pub fn range(start: f64, stop: f64, points: usize, spacing: Spacing) -> CliResult<Vec<f64>> {
    if points < 2 {
        return Err(CliError::usage("a range needs at least 2 points"));
    }
    let n = (points - 1) as f64;
    match spacing {
        Spacing::Linear => Ok((0..points)
            .map(|i| if i == points - 1 { stop } else { start + (stop - start) * i as f64 / n })
            .collect()),
        Spacing::Log => {
            if !(start > 0.0 && stop > 0.0) {
                return Err(CliError::usage("log ranges need positive endpoints"));
            }
            let (a, b) = (start.ln(), stop.ln());
            Ok((0..points)
                .map(|i| if i == points - 1 { stop } else { (a + (b - a) * i as f64 / n).exp() })
                .collect())
        }
    }
}

pub fn parse_axis(name: &str, spec: &str) -> CliResult<Axis> {
    let spec = spec.trim();
    let values = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        let spacing = match parts.get(3).map(|s| s.trim()) {
            None | Some("lin") => Spacing::Linear,
            Some("log") => Spacing::Log,
            Some(other) => return Err(CliError::usage(format!("unknown spacing '{other}' for --{name}"))),
        };
        if parts.len() < 3 || parts.len() > 4 {
            return Err(CliError::usage(format!("--{name}: expected start:stop:points, got '{spec}'")));
        }
        let points: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("--{name}: bad point count '{}'", parts[2])))?;
        range(number(parts[0])?, number(parts[1])?, points, spacing)?
    } else {
        spec.split(',').map(number).collect::<CliResult<Vec<_>>>()?
    };
    if values.is_empty() {
        return Err(CliError::usage(format!("--{name} is empty")));
    }
    Ok(Axis {
        name: name.to_string(),
        values,
    })
}

/// Cartesian product in row-major order (last axis fastest).
pub fn product(axes: &[Axis]) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for axis in axes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                axis.values.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    out
}
