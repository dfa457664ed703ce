//! Right-hand sides of the three evolution systems.

use rayon::prelude::*;

use crate::error::{Error, Result};

use super::fd::spatial_derivative_into;
use super::model::{ModelSpec, System};
use super::state::StrandState;

/// `(d mu / dt, d gamma / dt)` for the normal-form Hamiltonian system.
pub fn rhs_normal(state: &StrandState, model: &ModelSpec) -> Result<(Vec<f64>, Vec<f64>)> {
    model.require(System::Normal)?;
    rhs(state, model)
}

/// `(d mu / dt, d gamma / dt)` for the compact-form Hamiltonian system.
pub fn rhs_compact(state: &StrandState, model: &ModelSpec) -> Result<(Vec<f64>, Vec<f64>)> {
    model.require(System::Compact)?;
    rhs(state, model)
}

/// `(d xi / dt, d gamma / dt)` for the chiral model; `state.mu` holds `xi`.
pub fn rhs_chiral(state: &StrandState, model: &ModelSpec) -> Result<(Vec<f64>, Vec<f64>)> {
    model.require(System::Chiral)?;
    rhs(state, model)
}

/// Dispatch on `model.system`.
pub fn rhs(state: &StrandState, model: &ModelSpec) -> Result<(Vec<f64>, Vec<f64>)> {
    check_compatible(state, model)?;
    let mut dmu = vec![0.0; state.mu.len()];
    let mut dgamma = vec![0.0; state.gamma.len()];
    eval_into(model, state.ds, &state.mu, &state.gamma, &mut dmu, &mut dgamma)?;
    Ok((dmu, dgamma))
}

pub(crate) fn check_compatible(state: &StrandState, model: &ModelSpec) -> Result<()> {
    if state.algebra != model.algebra() {
        return Err(Error::AlgebraMismatch {
            expected: model.algebra(),
            found: state.algebra,
        });
    }
    if state.dim != model.dim() {
        return Err(Error::DimensionMismatch {
            algebra: state.algebra,
            expected: model.dim(),
            found: state.dim,
        });
    }
    if state.mu.len() != state.n * state.dim || state.gamma.len() != state.n * state.dim {
        return Err(Error::InvalidArgument("field arrays do not match the grid".into()));
    }
    model.check_form()
}

pub(crate) fn eval_into(
    model: &ModelSpec,
    ds: f64,
    mu: &[f64],
    gamma: &[f64],
    dmu: &mut [f64],
    dgamma: &mut [f64],
) -> Result<()> {
    let dim = model.dim();
    let tbl = &*model.table;
    let len = mu.len();
    let mut mu_s = vec![0.0; len];
    let mut gamma_s = vec![0.0; len];
    spatial_derivative_into(mu, dim, ds, &mut mu_s)?;
    spatial_derivative_into(gamma, dim, ds, &mut gamma_s)?;

    if model.system == System::Chiral {
        // d_t xi = d_s gamma, d_t gamma = d_s xi - [xi, gamma]
        let kernel = |j: usize, dx: &mut [f64], dg: &mut [f64]| {
            let p = j * dim..(j + 1) * dim;
            dx.copy_from_slice(&gamma_s[p.clone()]);
            dg.copy_from_slice(&mu_s[p.clone()]);
            for v in dg.iter_mut() {
                *v = -*v;
            }
            tbl.bracket_acc(&mu[p.clone()], &gamma[p], dg);
            for v in dg.iter_mut() {
                *v = -*v;
            }
        };
        for_each_point(model.parallel, dim, dmu, dgamma, kernel);
        return Ok(());
    }

    let op = model.sectional_op()?;
    let mut phi = vec![0.0; len];
    for (x, out) in mu.chunks(dim).zip(phi.chunks_mut(dim)) {
        op.apply_into(x, out);
    }
    let mut phi_s = vec![0.0; len];
    spatial_derivative_into(&phi, dim, ds, &mut phi_s)?;
    let r = model.r;
    let c = &model.c.coeffs;
    let kernel = |j: usize, dm: &mut [f64], dg: &mut [f64]| {
        let p = j * dim..(j + 1) * dim;
        let (m, g, f) = (&mu[p.clone()], &gamma[p.clone()], &phi[p.clone()]);
        for k in 0..dim {
            dm[k] = r * mu_s[p.start + k];
            dg[k] = r * gamma_s[p.start + k] - phi_s[p.start + k];
        }
        tbl.bracket_acc(f, m, dm);
        tbl.bracket_acc(g, c, dm);
        tbl.bracket_acc(f, g, dg);
    };
    for_each_point(model.parallel, dim, dmu, dgamma, kernel);
    Ok(())
}

/// Run `kernel(j, a_j, b_j)` over every grid point. The arithmetic per point
/// is the same in both branches, so results do not depend on `parallel`.
fn for_each_point<F>(parallel: bool, dim: usize, a: &mut [f64], b: &mut [f64], kernel: F)
where
    F: Fn(usize, &mut [f64], &mut [f64]) + Sync,
{
    if parallel {
        a.par_chunks_mut(dim)
            .zip(b.par_chunks_mut(dim))
            .enumerate()
            .for_each(|(j, (x, y))| kernel(j, x, y));
    } else {
        for (j, (x, y)) in a.chunks_mut(dim).zip(b.chunks_mut(dim)).enumerate() {
            kernel(j, x, y);
        }
    }
}
