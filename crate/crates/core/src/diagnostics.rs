//! Conserved quantities, energy and characteristic relations.

use crate::dynamics::{periodic_cubic, spatial_derivative, ModelSpec, So3Params, StrandState, System};
use crate::error::{Error, Result};

/// Periodic rectangle rule `sum_j f_j ds`.
pub fn quadrature(values: &[f64], ds: f64) -> f64 {
    values.iter().sum::<f64>() * ds
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    /// `(C1, C2, C3)`, so(3) runs only.
    pub conserved: Option<[f64; 3]>,
    pub energy: Option<f64>,
    pub mu_par_err: Option<f64>,
    /// Curvature residuals, one per spectral sample, when available.
    pub zcr_residuals: Vec<f64>,
}

fn so3(model: &ModelSpec) -> Result<So3Params> {
    model.so3_params().ok_or_else(|| {
        Error::Unsupported(format!(
            "so(3) diagnostics need a compact so3 model, got {} {}",
            model.system.tag(),
            model.algebra()
        ))
    })
}

fn check_state(state: &StrandState, model: &ModelSpec) -> Result<()> {
    if state.algebra != model.algebra() {
        return Err(Error::AlgebraMismatch {
            expected: model.algebra(),
            found: state.algebra,
        });
    }
    Ok(())
}

#[inline]
fn dot3(x: &[f64], y: &[f64]) -> f64 {
    x[0] * y[0] + x[1] * y[1] + x[2] * y[2]
}

#[inline]
fn perp(x: &[f64], axis: &[f64; 3]) -> [f64; 3] {
    let p = dot3(x, axis);
    [x[0] - p * axis[0], x[1] - p * axis[1], x[2] - p * axis[2]]
}

#[inline]
fn cross(x: &[f64], y: &[f64]) -> [f64; 3] {
    [
        x[1] * y[2] - x[2] * y[1],
        x[2] * y[0] - x[0] * y[2],
        x[0] * y[1] - x[1] * y[0],
    ]
}

/// Pointwise integrand of `C1`: `(c/a)|mu_perp|^2 - 2c A.gamma`.
fn c1_density(p: &So3Params, mu: &[f64], gamma: &[f64]) -> f64 {
    let mp = perp(mu, &p.axis);
    p.c / p.a * dot3(&mp, &mp) - 2.0 * p.c * dot3(&p.axis, gamma)
}

/// `(C1, C2, C3)` for a compact so(3) state.
pub fn conserved_so3(state: &StrandState, model: &ModelSpec) -> Result<[f64; 3]> {
    check_state(state, model)?;
    let p = so3(model)?;
    let (mut c1, mut c2, mut c3) = (0.0, 0.0, 0.0);
    for j in 0..state.n {
        let (m, g) = (state.mu_at(j), state.gamma_at(j));
        c1 += c1_density(&p, m, g);
        c2 += dot3(m, g);
        c3 += dot3(m, &p.axis);
    }
    Ok([c1 * state.ds, c2 * state.ds, c3 * state.ds])
}

/// Hamiltonian `int (-1/2 K(phi(mu), mu) + K(r mu + c, gamma)) ds`.
pub fn energy(state: &StrandState, model: &ModelSpec) -> Result<f64> {
    check_state(state, model)?;
    if model.system == System::Chiral {
        return Err(Error::Unsupported("energy of the chiral model".into()));
    }
    let tbl = &*model.table;
    let d = model.dim();
    let mut phi = vec![0.0; d];
    let mut lin = vec![0.0; d];
    let mut total = 0.0;
    for j in 0..state.n {
        let (m, g) = (state.mu_at(j), state.gamma_at(j));
        model.sectional_op()?.apply_into(m, &mut phi);
        for k in 0..d {
            lin[k] = model.r * m[k] + model.c.coeffs[k];
        }
        total += -0.5 * tbl.pairing_slice(&phi, m) + tbl.pairing_slice(&lin, g);
    }
    Ok(total * state.ds)
}

/// Value at `(t, s_j)` of a field transported from `initial` at speed `-r`,
/// i.e. `f(0, s_j + r t)`.
fn transported(initial: &[f64], ds: f64, r: f64, t: f64, j: usize) -> f64 {
    periodic_cubic(initial, ds, j as f64 * ds + r * t)
}

fn mu_par(state: &StrandState, axis: &[f64; 3]) -> Vec<f64> {
    (0..state.n).map(|j| dot3(state.mu_at(j), axis)).collect()
}

/// Grid-max deviation of `mu . A` from its initial profile carried along
/// the characteristics `s + r t = const`.
pub fn mu_par_advect_err(
    initial: &StrandState,
    current: &StrandState,
    model: &ModelSpec,
) -> Result<f64> {
    check_state(current, model)?;
    let p = so3(model)?;
    if initial.n != current.n {
        return Err(Error::InvalidArgument("states live on different grids".into()));
    }
    let init = mu_par(initial, &p.axis);
    let now = mu_par(current, &p.axis);
    let dt = current.t - initial.t;
    Ok((0..current.n)
        .map(|j| (now[j] - transported(&init, initial.ds, model.r, dt, j)).abs())
        .fold(0.0, f64::max))
}

/// Residuals of the characteristic-derivative relations of compact so(3).
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicReport {
    /// (i) transport of `(c/a)|mu_perp|^2 - 2c A.gamma`.
    pub c1_density_transport: f64,
    /// (ii) `(d_t - r d_s)(mu.gamma) + (c/2a) d_s |mu_perp|^2`.
    pub mu_gamma_balance: f64,
    /// (iii) transport of `mu.A`.
    pub mu_par_transport: f64,
    /// (iv) left minus right side of the `gamma.A` relation.
    pub gamma_par_balance: f64,
    /// Size of the right side of (iv), which is not expected to vanish.
    pub gamma_par_rhs: f64,
    /// (v) left minus right side of the `|gamma|^2` relation.
    pub gamma_sq_balance: f64,
    /// Size of the right side of (v).
    pub gamma_sq_rhs: f64,
}

/// Check the characteristic relations along equally spaced snapshots.
///
/// Transport residuals compare each snapshot with the first one carried along
/// characteristics. Balance residuals use centered differences along
/// characteristics at the interior snapshots, with cubic interpolation off grid.
pub fn characteristic_checks(
    trajectory: &[StrandState],
    model: &ModelSpec,
) -> Result<CharacteristicReport> {
    if trajectory.len() < 3 {
        return Err(Error::InsufficientSnapshots {
            found: trajectory.len(),
            min: 3,
        });
    }
    let p = so3(model)?;
    for st in trajectory {
        check_state(st, model)?;
    }
    let first = &trajectory[0];
    let (n, ds, r) = (first.n, first.ds, model.r);
    let q = p.c / p.a;
    let scalar = |st: &StrandState, f: &dyn Fn(&[f64], &[f64]) -> f64| -> Vec<f64> {
        (0..n).map(|j| f(st.mu_at(j), st.gamma_at(j))).collect()
    };
    let c1d = |m: &[f64], g: &[f64]| c1_density(&p, m, g);
    let mpar = |m: &[f64], _: &[f64]| dot3(m, &p.axis);
    let mg = |m: &[f64], g: &[f64]| dot3(m, g);
    let gpar = |_: &[f64], g: &[f64]| dot3(g, &p.axis);
    let gsq = |_: &[f64], g: &[f64]| dot3(g, g);

    let c1_0 = scalar(first, &c1d);
    let mp_0 = scalar(first, &mpar);
    let mut rep = CharacteristicReport {
        c1_density_transport: 0.0,
        mu_gamma_balance: 0.0,
        mu_par_transport: 0.0,
        gamma_par_balance: 0.0,
        gamma_par_rhs: 0.0,
        gamma_sq_balance: 0.0,
        gamma_sq_rhs: 0.0,
    };
    for st in &trajectory[1..] {
        let dt = st.t - first.t;
        let c1 = scalar(st, &c1d);
        let mp = scalar(st, &mpar);
        for j in 0..n {
            let e1 = (c1[j] - transported(&c1_0, ds, r, dt, j)).abs();
            let e3 = (mp[j] - transported(&mp_0, ds, r, dt, j)).abs();
            rep.c1_density_transport = rep.c1_density_transport.max(e1);
            rep.mu_par_transport = rep.mu_par_transport.max(e3);
        }
    }

    for w in trajectory.windows(3) {
        let (prev, mid, next) = (&w[0], &w[1], &w[2]);
        let h = 0.5 * (next.t - prev.t);
        // (d_t - r d_s) f at (t_mid, s_j) along s = s_j - r (t - t_mid)
        let char_dt = |f: &dyn Fn(&[f64], &[f64]) -> f64, j: usize| {
            let fp = scalar(prev, f);
            let fnx = scalar(next, f);
            let s = j as f64 * ds;
            (periodic_cubic(&fnx, ds, s - r * h) - periodic_cubic(&fp, ds, s + r * h)) / (2.0 * h)
        };
        let perp_mu: Vec<f64> = (0..n).flat_map(|j| perp(mid.mu_at(j), &p.axis)).collect();
        let perp_sq: Vec<f64> = perp_mu.chunks(3).map(|v| dot3(v, v)).collect();
        let perp_sq_s = spatial_derivative(&perp_sq, 1, ds)?;
        let perp_mu_s = spatial_derivative(&perp_mu, 3, ds)?;
        let d_mg: Vec<f64> = (0..n).map(|j| char_dt(&mg, j)).collect();
        let d_gpar: Vec<f64> = (0..n).map(|j| char_dt(&gpar, j)).collect();
        let d_gsq: Vec<f64> = (0..n).map(|j| char_dt(&gsq, j)).collect();
        for j in 0..n {
            let g = mid.gamma_at(j);
            let mperp = &perp_mu[3 * j..3 * j + 3];
            let bal2 = d_mg[j] + 0.5 * q * perp_sq_s[j];
            let rhs4 = q * dot3(&cross(mperp, g), &p.axis);
            let gperp = perp(g, &p.axis);
            let rhs5 = -2.0 * q * dot3(&gperp, &perp_mu_s[3 * j..3 * j + 3]);
            rep.mu_gamma_balance = rep.mu_gamma_balance.max(bal2.abs());
            rep.gamma_par_balance = rep.gamma_par_balance.max((d_gpar[j] - rhs4).abs());
            rep.gamma_par_rhs = rep.gamma_par_rhs.max(rhs4.abs());
            rep.gamma_sq_balance = rep.gamma_sq_balance.max((d_gsq[j] - rhs5).abs());
            rep.gamma_sq_rhs = rep.gamma_sq_rhs.max(rhs5.abs());
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_algebra, AlgebraId};
    use crate::dynamics::{equilibrium_state, integrate, perturb, Field};
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn model(r: f64) -> ModelSpec {
        ModelSpec::so3(Arc::new(build_algebra(AlgebraId::So3)), r, 1.5, 0.6, [0.0, 0.0, 1.0]).unwrap()
    }

    fn wavy(n: usize) -> StrandState {
        let mut st = StrandState::zeros(AlgebraId::So3, 3, n, 2.0 * PI).unwrap();
        for j in 0..n {
            let s = st.position(j);
            st.mu[3 * j..3 * j + 3].copy_from_slice(&[0.3 * s.sin(), 0.2 * (2.0 * s).cos(), 1.0 + 0.1 * s.cos()]);
            st.gamma[3 * j..3 * j + 3].copy_from_slice(&[0.1 * s.cos(), -0.2 * s.sin(), 0.5 + 0.2 * (3.0 * s).sin()]);
        }
        st
    }

    #[test]
    fn quadrature_of_sin_squared() {
        let n = 16;
        let len = 3.0;
        let ds = len / n as f64;
        let v: Vec<f64> = (0..n)
            .map(|j| (2.0 * PI * 3.0 * j as f64 * ds / len).sin().powi(2))
            .collect();
        assert!((quadrature(&v, ds) - len / 2.0).abs() < 1e-14);
    }

    #[test]
    fn equilibrium_values() {
        let m = model(0.4);
        let st = equilibrium_state(&m, 2.0, -0.5, 16, 4.0).unwrap();
        let [c1, c2, c3] = conserved_so3(&st, &m).unwrap();
        assert!((c1 - (-2.0 * 0.6 * -0.5 * 4.0)).abs() < 1e-13);
        assert!((c2 - 2.0 * -0.5 * 4.0).abs() < 1e-13);
        assert!((c3 - 8.0).abs() < 1e-13);
        let zero = StrandState::zeros(AlgebraId::So3, 3, 16, 4.0).unwrap();
        assert_eq!(conserved_so3(&zero, &m).unwrap(), [0.0; 3]);
        assert_eq!(energy(&zero, &m).unwrap(), 0.0);
    }

    #[test]
    fn energy_is_c1_minus_2r_c2() {
        let m = model(0.7);
        let st = wavy(32);
        let [c1, c2, _] = conserved_so3(&st, &m).unwrap();
        let h = energy(&st, &m).unwrap();
        assert!((h - (c1 - 2.0 * 0.7 * c2)).abs() <= 1e-12 * h.abs().max(1.0));
    }

    #[test]
    fn rotation_about_axis_preserves_invariants() {
        let m = model(0.3);
        let st = wavy(32);
        let before = conserved_so3(&st, &m).unwrap();
        let h0 = energy(&st, &m).unwrap();
        let (sn, cs) = 1.234f64.sin_cos();
        let mut rot = st.clone();
        for v in rot.mu.chunks_mut(3).chain(rot.gamma.chunks_mut(3)) {
            let (x, y) = (v[0], v[1]);
            v[0] = cs * x - sn * y;
            v[1] = sn * x + cs * y;
        }
        let after = conserved_so3(&rot, &m).unwrap();
        for k in 0..3 {
            assert!((before[k] - after[k]).abs() < 1e-12);
        }
        assert!((h0 - energy(&rot, &m).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn translation_preserves_invariants_exactly() {
        let m = model(0.3);
        let st = wavy(32);
        let sh = st.cyclic_shift(1);
        let (a, b) = (conserved_so3(&st, &m).unwrap(), conserved_so3(&sh, &m).unwrap());
        for k in 0..3 {
            assert!((a[k] - b[k]).abs() <= 1e-14 * a[k].abs().max(1.0));
        }
        assert!((energy(&st, &m).unwrap() - energy(&sh, &m).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn chiral_energy_is_unsupported() {
        let m = ModelSpec::chiral(Arc::new(build_algebra(AlgebraId::So3)));
        assert!(matches!(energy(&wavy(16), &m), Err(Error::Unsupported(_))));
        assert!(conserved_so3(&wavy(16), &m).is_err());
    }

    #[test]
    fn equilibrium_characteristics_vanish() {
        let m = model(0.5);
        let st = equilibrium_state(&m, 1.0, 2.0, 32, 2.0 * PI).unwrap();
        let traj = integrate(&st, &m, 0.01, 20, 5).unwrap();
        let rep = characteristic_checks(&traj, &m).unwrap();
        for v in [
            rep.c1_density_transport,
            rep.mu_gamma_balance,
            rep.mu_par_transport,
            rep.gamma_par_balance,
            rep.gamma_sq_balance,
        ] {
            assert!(v <= 1e-12, "{rep:?}");
        }
        assert!(mu_par_advect_err(&traj[0], traj.last().unwrap(), &m).unwrap() <= 1e-12);
        assert!(characteristic_checks(&traj[..2], &m).is_err());
    }

    #[test]
    fn perturbed_run_keeps_relations() {
        let m = model(0.5);
        let st = equilibrium_state(&m, 1.0, 0.5, 64, 2.0 * PI).unwrap();
        let st = perturb(&st, Field::Both, 1.0, 0.05, &[1.0, 0.5, 0.2]).unwrap();
        let traj = integrate(&st, &m, 0.005, 100, 10).unwrap();
        let rep = characteristic_checks(&traj, &m).unwrap();
        assert!(rep.mu_par_transport < 1e-5, "{rep:?}");
        assert!(rep.c1_density_transport < 1e-5, "{rep:?}");
        assert!(rep.gamma_par_balance < 1e-3 * rep.gamma_par_rhs.max(1e-3), "{rep:?}");
        assert!(rep.gamma_sq_rhs > 1e-4, "{rep:?}");
    }
}
