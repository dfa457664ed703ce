use crate::error::{Error, Result};

use super::model::{ModelSpec, System};
use super::rhs::{check_compatible, eval_into};
use super::state::StrandState;

const DT_EPS: f64 = 1e-12;

/// Classical four-stage Runge-Kutta step.
pub fn step_rk4(state: &StrandState, model: &ModelSpec, dt: f64) -> Result<StrandState> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    check_compatible(state, model)?;
    let len = state.mu.len();
    let ds = state.ds;
    let mut k = [
        (vec![0.0; len], vec![0.0; len]),
        (vec![0.0; len], vec![0.0; len]),
        (vec![0.0; len], vec![0.0; len]),
        (vec![0.0; len], vec![0.0; len]),
    ];
    let mut mu = vec![0.0; len];
    let mut gamma = vec![0.0; len];
    let weights = [0.5 * dt, 0.5 * dt, dt];
    {
        let (dm, dg) = &mut k[0];
        eval_into(model, ds, &state.mu, &state.gamma, dm, dg)?;
    }
    for stage in 0..3 {
        let h = weights[stage];
        {
            let (dm, dg) = &k[stage];
            for i in 0..len {
                mu[i] = state.mu[i] + h * dm[i];
                gamma[i] = state.gamma[i] + h * dg[i];
            }
        }
        let (dm, dg) = &mut k[stage + 1];
        eval_into(model, ds, &mu, &gamma, dm, dg)?;
    }
    let sixth = dt / 6.0;
    let mut next = state.clone();
    for i in 0..len {
        next.mu[i] += sixth * (k[0].0[i] + 2.0 * k[1].0[i] + 2.0 * k[2].0[i] + k[3].0[i]);
        next.gamma[i] += sixth * (k[0].1[i] + 2.0 * k[1].1[i] + 2.0 * k[2].1[i] + k[3].1[i]);
    }
    next.t = state.t + dt;
    if !next.is_finite() {
        return Err(Error::BlowUp {
            t: next.t,
            max_norm: state.max_norm(),
        });
    }
    Ok(next)
}

/// Time step from the advective/bracket bound
/// `cfl * ds / (|r| + rho * (max|mu| + max|gamma| + 1) + eps)`,
/// with `rho` the largest sectional ratio (1 for the chiral model).
pub fn cfl_dt(state: &StrandState, model: &ModelSpec, cfl: f64) -> Result<f64> {
    if !(cfl.is_finite() && cfl > 0.0) {
        return Err(Error::InvalidArgument(format!("CFL must be positive, got {cfl}")));
    }
    let rho = match model.system {
        System::Chiral => 1.0,
        _ => model.sectional_op()?.max_ratio(),
    };
    let speed = model.r.abs() + rho * (state.max_mu_norm() + state.max_gamma_norm() + 1.0) + DT_EPS;
    Ok(cfl * state.ds / speed)
}

/// Advance `steps` steps of size `dt`, keeping the initial state and every
/// `every`-th state after it.
pub fn integrate(
    state: &StrandState,
    model: &ModelSpec,
    dt: f64,
    steps: usize,
    every: usize,
) -> Result<Vec<StrandState>> {
    if every == 0 {
        return Err(Error::InvalidArgument("snapshot cadence must be positive".into()));
    }
    let mut out = vec![state.clone()];
    let mut cur = state.clone();
    for i in 1..=steps {
        cur = step_rk4(&cur, model, dt)?;
        if i % every == 0 {
            out.push(cur.clone());
        }
    }
    Ok(out)
}
