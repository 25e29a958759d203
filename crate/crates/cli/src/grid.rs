//! Numeric grids from the command line: `start:stop:count` or `a,b,c`, where
//! every number may be written in multiples of pi (`pi/2`, `-3pi/4`, `2pi`).

use anyhow::{bail, Context, Result};
use std::f64::consts::PI;

pub fn parse_number(s: &str) -> Result<f64> {
    let s = s.trim().to_ascii_lowercase();
    if let Some(at) = s.find("pi") {
        let coef = match &s[..at] {
            "" | "+" => 1.0,
            "-" => -1.0,
            c => c.trim_end_matches('*').parse::<f64>().with_context(|| format!("bad coefficient in `{s}`"))?,
        };
        let rest = &s[at + 2..];
        let div = if rest.is_empty() {
            1.0
        } else {
            let d = rest.strip_prefix('/').with_context(|| format!("cannot parse `{s}`"))?;
            d.parse::<f64>().with_context(|| format!("bad divisor in `{s}`"))?
        };
        return Ok(coef * PI / div);
    }
    s.parse::<f64>().with_context(|| format!("`{s}` is not a number"))
}

/// Inclusive linspace.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        n => (0..n)
            .map(|i| {
                if i == n - 1 {
                    stop
                } else {
                    start + (stop - start) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let grid = match parts.as_slice() {
        [a, b, n] => {
            let n: usize = n.trim().parse().with_context(|| format!("bad point count in `{s}`"))?;
            linspace(parse_number(a)?, parse_number(b)?, n)
        }
        [_] => s.split(',').map(parse_number).collect::<Result<Vec<_>>>()?,
        _ => bail!("grid `{s}` must be `start:stop:count` or a comma-separated list"),
    };
    check_grid(&grid).with_context(|| format!("in grid `{s}`"))?;
    Ok(grid)
}

/// A parsed grid argument.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid(pub Vec<f64>);

pub fn parse_grid_arg(s: &str) -> Result<Grid> {
    parse_grid(s).map(Grid)
}

/// Grids must be nonempty, finite and strictly increasing.
pub fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        bail!("grid is empty");
    }
    if let Some(x) = grid.iter().find(|x| !x.is_finite()) {
        bail!("grid contains non-finite value {x}");
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        bail!("grid is not strictly increasing");
    }
    Ok(())
}
