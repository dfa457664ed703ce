//! Periodic finite differences and interpolation on a uniform grid.

use crate::error::{Error, Result};

pub const MIN_POINTS: usize = 5;

/// Fourth-order central difference with periodic wrap,
/// `f'_j = (-f_{j+2} + 8 f_{j+1} - 8 f_{j-1} + f_{j-2}) / (12 ds)`,
/// applied componentwise to a field of `dim`-vectors stored point-major.
pub fn spatial_derivative(field: &[f64], dim: usize, ds: f64) -> Result<Vec<f64>> {
    let mut out = vec![0.0; field.len()];
    spatial_derivative_into(field, dim, ds, &mut out)?;
    Ok(out)
}

pub fn spatial_derivative_into(field: &[f64], dim: usize, ds: f64, out: &mut [f64]) -> Result<()> {
    if dim == 0 || field.len() % dim != 0 {
        return Err(Error::InvalidArgument(format!(
            "field length {} is not a multiple of {dim}",
            field.len()
        )));
    }
    let n = field.len() / dim;
    if n < MIN_POINTS {
        return Err(Error::GridTooSmall {
            found: n,
            min: MIN_POINTS,
        });
    }
    let inv = 1.0 / (12.0 * ds);
    for j in 0..n {
        let jp1 = (j + 1) % n;
        let jp2 = (j + 2) % n;
        let jm1 = (j + n - 1) % n;
        let jm2 = (j + n - 2) % n;
        for k in 0..dim {
            out[j * dim + k] = (-field[jp2 * dim + k] + 8.0 * field[jp1 * dim + k]
                - 8.0 * field[jm1 * dim + k]
                + field[jm2 * dim + k])
                * inv;
        }
    }
    Ok(())
}

/// Cubic Lagrange interpolation of periodic samples `f_j = f(j ds)` at `s`.
pub fn periodic_cubic(samples: &[f64], ds: f64, s: f64) -> f64 {
    let n = samples.len() as i64;
    let x = s / ds;
    let base = x.floor();
    let frac = x - base;
    let i0 = base as i64;
    let at = |off: i64| samples[(i0 + off).rem_euclid(n) as usize];
    let (fm, f0, f1, f2) = (at(-1), at(0), at(1), at(2));
    let t = frac;
    -t * (t - 1.0) * (t - 2.0) / 6.0 * fm + (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0 * f0
        - (t + 1.0) * t * (t - 2.0) / 2.0 * f1
        + (t + 1.0) * t * (t - 1.0) / 6.0 * f2
}
