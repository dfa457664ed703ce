//! The quadratic pair `L = l^2 a + l mu - gamma`, `M = l^2 b - l pi - xi` and
//! the residuals of `d_t L - d_s M + [L, M] = 0`.
//!
//! Grading by powers of `l`, the identity splits into five rows:
//!
//! | power | row |
//! |---|---|
//! | 4 | `[a, b]` |
//! | 3 | `[a, pi] + [b, mu]` |
//! | 2 | `[a, xi] + [mu, pi] + [gamma, b]` |
//! | 1 | `d_t mu + d_s pi + [xi, mu] + [gamma, pi]` |
//! | 0 | `d_t gamma - d_s xi + [xi, gamma]` |
//!
//! Rows 4, 3 and 2 involve no derivatives and vanish identically once
//! `b = r a`, `xi = -phi(mu) + r gamma` and `pi = -r mu - c`.
//! Residual norms are Euclidean on basis coefficients, maximized over the grid.

use crate::algebra::norm;
use crate::dynamics::{spatial_derivative, ModelSpec, StrandState, System};
use crate::error::{Error, Result};

pub const DEFAULT_LAMBDAS: [f64; 5] = [-2.0, -1.0, 0.5, 1.0, 2.0];

/// Coefficients of `L` and `M`, highest power first: `[l^2, l^1, l^0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZcrPair {
    pub l: [Vec<f64>; 3],
    pub m: [Vec<f64>; 3],
    pub lambda_samples: Vec<f64>,
}

impl ZcrPair {
    pub fn l_at(&self, lambda: f64) -> Vec<f64> {
        eval_poly(&self.l, lambda)
    }

    pub fn m_at(&self, lambda: f64) -> Vec<f64> {
        eval_poly(&self.m, lambda)
    }
}

fn eval_poly(c: &[Vec<f64>; 3], lambda: f64) -> Vec<f64> {
    let l2 = lambda * lambda;
    (0..c[0].len())
        .map(|k| l2 * c[0][k] + lambda * c[1][k] + c[2][k])
        .collect()
}

fn require_quadratic(model: &ModelSpec) -> Result<()> {
    if model.system == System::Chiral {
        return Err(Error::Unsupported(
            "quadratic ZCR not applicable to the chiral model".into(),
        ));
    }
    Ok(())
}

/// Build `(L, M)` at one point using `b = r a`.
pub fn build_lm(mu: &[f64], gamma: &[f64], model: &ModelSpec) -> Result<ZcrPair> {
    build_lm_with_b(mu, gamma, model, model.r)
}

/// Build `(L, M)` with `b = r_b a`. Any `r_b != r` breaks the construction;
/// this exists to exercise the failure path.
pub fn build_lm_with_b(mu: &[f64], gamma: &[f64], model: &ModelSpec, r_b: f64) -> Result<ZcrPair> {
    require_quadratic(model)?;
    let d = model.dim();
    if mu.len() != d || gamma.len() != d {
        return Err(Error::DimensionMismatch {
            algebra: model.algebra(),
            expected: d,
            found: if mu.len() != d { mu.len() } else { gamma.len() },
        });
    }
    let xi = model.xi(mu, gamma)?;
    let pi = model.pi(mu);
    let neg = |v: &[f64]| v.iter().map(|x| -x).collect::<Vec<_>>();
    Ok(ZcrPair {
        l: [model.a.coeffs.clone(), mu.to_vec(), neg(gamma)],
        m: [model.a.scaled(r_b).coeffs, neg(&pi), neg(&xi)],
        lambda_samples: DEFAULT_LAMBDAS.to_vec(),
    })
}

/// Norms of the three derivative-free rows and the scale they are judged against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaticResiduals {
    pub row2: f64,
    pub row3: f64,
    pub row4: f64,
    /// Bracket scale `(|a| + |b| + |c| + |mu| + |gamma| + |xi| + |pi|)^2`.
    pub scale: f64,
}

impl StaticResiduals {
    pub fn max(&self) -> f64 {
        self.row2.max(self.row3).max(self.row4)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max() <= tol * (1.0 + self.scale)
    }

    fn merge(self, other: StaticResiduals) -> StaticResiduals {
        StaticResiduals {
            row2: self.row2.max(other.row2),
            row3: self.row3.max(other.row3),
            row4: self.row4.max(other.row4),
            scale: self.scale.max(other.scale),
        }
    }
}

pub fn check_static_conditions(mu: &[f64], gamma: &[f64], model: &ModelSpec) -> Result<StaticResiduals> {
    static_rows(&build_lm(mu, gamma, model)?, model)
}

/// Static rows computed from an assembled pair.
pub fn static_rows(pair: &ZcrPair, model: &ModelSpec) -> Result<StaticResiduals> {
    require_quadratic(model)?;
    let tbl = &*model.table;
    let a = &pair.l[0];
    let mu = &pair.l[1];
    let gamma: Vec<f64> = pair.l[2].iter().map(|v| -v).collect();
    let b = &pair.m[0];
    let pi: Vec<f64> = pair.m[1].iter().map(|v| -v).collect();
    let xi: Vec<f64> = pair.m[2].iter().map(|v| -v).collect();
    let mut r2 = tbl.bracket_slice(a, &xi);
    tbl.bracket_acc(mu, &pi, &mut r2);
    tbl.bracket_acc(&gamma, b, &mut r2);
    let mut r3 = tbl.bracket_slice(a, &pi);
    tbl.bracket_acc(b, mu, &mut r3);
    let r4 = tbl.bracket_slice(a, b);
    let size = norm(a) + norm(b) + norm(&model.c.coeffs) + norm(mu) + norm(&gamma) + norm(&xi) + norm(&pi);
    Ok(StaticResiduals {
        row2: norm(&r2),
        row3: norm(&r3),
        row4: norm(&r4),
        scale: size * size,
    })
}

/// Worst static residuals over every grid point of a state.
pub fn static_state(state: &StrandState, model: &ModelSpec, r_b: f64) -> Result<StaticResiduals> {
    let mut worst = StaticResiduals {
        row2: 0.0,
        row3: 0.0,
        row4: 0.0,
        scale: 0.0,
    };
    for j in 0..state.n {
        let pair = build_lm_with_b(state.mu_at(j), state.gamma_at(j), model, r_b)?;
        worst = worst.merge(static_rows(&pair, model)?);
    }
    Ok(worst)
}

/// Coefficients of the curvature polynomial at one point, lowest power first,
/// given the time derivatives of `mu` and `gamma` and the space derivatives of
/// `pi` and `xi`. Coefficients 1 and 4 equal the rows of the module table;
/// coefficients 0, 2 and 3 are their negatives.
pub fn graded_rows(
    pair: &ZcrPair,
    model: &ModelSpec,
    mu_t: &[f64],
    gamma_t: &[f64],
    pi_s: &[f64],
    xi_s: &[f64],
) -> [Vec<f64>; 5] {
    let tbl = &*model.table;
    let d = model.dim();
    let a = &pair.l[0];
    let mu = &pair.l[1];
    let gamma: Vec<f64> = pair.l[2].iter().map(|v| -v).collect();
    let b = &pair.m[0];
    let pi: Vec<f64> = pair.m[1].iter().map(|v| -v).collect();
    let xi: Vec<f64> = pair.m[2].iter().map(|v| -v).collect();
    let mut r0: Vec<f64> = (0..d).map(|k| gamma_t[k] - xi_s[k]).collect();
    tbl.bracket_acc(&xi, &gamma, &mut r0);
    let mut r1: Vec<f64> = (0..d).map(|k| mu_t[k] + pi_s[k]).collect();
    tbl.bracket_acc(&xi, mu, &mut r1);
    tbl.bracket_acc(&gamma, &pi, &mut r1);
    let mut r2 = tbl.bracket_slice(a, &xi);
    tbl.bracket_acc(mu, &pi, &mut r2);
    tbl.bracket_acc(&gamma, b, &mut r2);
    let mut r3 = tbl.bracket_slice(a, &pi);
    tbl.bracket_acc(b, mu, &mut r3);
    let r4 = tbl.bracket_slice(a, b);
    let neg = |v: Vec<f64>| v.into_iter().map(|x| -x).collect::<Vec<_>>();
    [neg(r0), r1, neg(r2), neg(r3), r4]
}

/// `d_t L - d_s M + [L, M]` at one point and one `lambda`, evaluated directly.
pub fn curvature_at(
    pair: &ZcrPair,
    model: &ModelSpec,
    lambda: f64,
    mu_t: &[f64],
    gamma_t: &[f64],
    pi_s: &[f64],
    xi_s: &[f64],
) -> Vec<f64> {
    let l = pair.l_at(lambda);
    let m = pair.m_at(lambda);
    // d_t L = l mu_t - gamma_t, d_s M = -l pi_s - xi_s
    let mut out: Vec<f64> = (0..l.len())
        .map(|k| lambda * mu_t[k] - gamma_t[k] + lambda * pi_s[k] + xi_s[k])
        .collect();
    model.table.bracket_acc(&l, &m, &mut out);
    out
}

/// `sum_k coeffs[k] l^k`.
pub fn rows_as_polynomial(rows: &[Vec<f64>; 5], lambda: f64) -> Vec<f64> {
    let d = rows[0].len();
    (0..d)
        .map(|k| {
            rows
                .iter()
                .rev()
                .fold(0.0, |acc, row| acc * lambda + row[k])
        })
        .collect()
}

/// Curvature residual norms at interior snapshots.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureResidual {
    pub lambdas: Vec<f64>,
    pub times: Vec<f64>,
    /// `residuals[i][l]`: grid max at `times[i]` and `lambdas[l]`.
    pub residuals: Vec<Vec<f64>>,
}

impl CurvatureResidual {
    /// Max over time for each `lambda`.
    pub fn max_per_lambda(&self) -> Vec<f64> {
        (0..self.lambdas.len())
            .map(|l| self.residuals.iter().map(|r| r[l]).fold(0.0, f64::max))
            .collect()
    }
}

/// Evaluate `d_t L - d_s M + [L, M]` along a trajectory of equally spaced
/// snapshots with centered time differences and the periodic spatial stencil.
pub fn curvature_residual(
    trajectory: &[StrandState],
    model: &ModelSpec,
    lambdas: &[f64],
) -> Result<CurvatureResidual> {
    require_quadratic(model)?;
    if trajectory.len() < 3 {
        return Err(Error::InsufficientSnapshots {
            found: trajectory.len(),
            min: 3,
        });
    }
    let step = trajectory[1].t - trajectory[0].t;
    if !(step > 0.0) {
        return Err(Error::InvalidArgument("snapshot times must increase".into()));
    }
    for w in trajectory.windows(2) {
        if ((w[1].t - w[0].t) - step).abs() > 1e-9 * step.max(w[1].t.abs()) {
            return Err(Error::InvalidArgument("snapshots are not equally spaced".into()));
        }
        if w[1].n != w[0].n || w[1].algebra != model.algebra() {
            return Err(Error::InvalidArgument("snapshots live on different grids".into()));
        }
    }
    let d = model.dim();
    let mut out = CurvatureResidual {
        lambdas: lambdas.to_vec(),
        times: Vec::new(),
        residuals: Vec::new(),
    };
    for w in trajectory.windows(3) {
        let (prev, mid, next) = (&w[0], &w[1], &w[2]);
        let h2 = next.t - prev.t;
        let n = mid.n;
        let mut xi = vec![0.0; n * d];
        let mut pi = vec![0.0; n * d];
        for j in 0..n {
            let x = model.xi(mid.mu_at(j), mid.gamma_at(j))?;
            xi[j * d..(j + 1) * d].copy_from_slice(&x);
            pi[j * d..(j + 1) * d].copy_from_slice(&model.pi(mid.mu_at(j)));
        }
        let xi_s = spatial_derivative(&xi, d, mid.ds)?;
        let pi_s = spatial_derivative(&pi, d, mid.ds)?;
        let mut worst = vec![0.0f64; lambdas.len()];
        for j in 0..n {
            let p = j * d..(j + 1) * d;
            let mu_t: Vec<f64> = p.clone().map(|i| (next.mu[i] - prev.mu[i]) / h2).collect();
            let gamma_t: Vec<f64> = p.clone().map(|i| (next.gamma[i] - prev.gamma[i]) / h2).collect();
            let pair = build_lm(mid.mu_at(j), mid.gamma_at(j), model)?;
            for (l, &lambda) in lambdas.iter().enumerate() {
                let res = curvature_at(&pair, model, lambda, &mu_t, &gamma_t, &pi_s[p.clone()], &xi_s[p.clone()]);
                worst[l] = worst[l].max(norm(&res));
            }
        }
        out.times.push(mid.t);
        out.residuals.push(worst);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_algebra, AlgebraId};
    use crate::dynamics::{equilibrium_state, integrate};
    use std::sync::Arc;

    fn sl2r() -> ModelSpec {
        ModelSpec::hamiltonian(Arc::new(build_algebra(AlgebraId::Sl2r)), System::Normal, 0.6, &[1.1], &[-0.4])
            .unwrap()
    }

    fn so3() -> ModelSpec {
        ModelSpec::so3(Arc::new(build_algebra(AlgebraId::So3)), 0.8, 1.0, 0.5, [1.0, -1.0, 0.5]).unwrap()
    }

    #[test]
    fn zero_fields_give_commuting_pair() {
        let m = sl2r();
        let pair = build_lm(&[0.0; 3], &[0.0; 3], &m).unwrap();
        assert_eq!(pair.l[0], m.a.coeffs);
        assert_eq!(pair.m[0], m.b().coeffs);
        let lm = m.table.bracket_slice(&pair.l_at(1.7), &pair.m_at(1.7));
        assert!(norm(&lm) < 1e-15);
    }

    #[test]
    fn coefficient_layout() {
        let m = so3();
        let (mu, gamma) = ([0.1, 0.2, 0.3], [-0.5, 0.4, 1.0]);
        let pair = build_lm(&mu, &gamma, &m).unwrap();
        assert_eq!(pair.l[2], vec![0.5, -0.4, -1.0]);
        let xi = m.xi(&mu, &gamma).unwrap();
        assert_eq!(pair.m[2], xi.iter().map(|v| -v).collect::<Vec<_>>());
        assert_eq!(pair.lambda_samples, DEFAULT_LAMBDAS.to_vec());
    }

    #[test]
    fn static_rows_vanish() {
        let m = sl2r();
        let res = check_static_conditions(&[0.3, -1.2, 0.8], &[2.0, 0.1, -0.7], &m).unwrap();
        assert_eq!(res.row4, 0.0);
        assert!(res.passes(1e-13), "{res:?}");
        let m = so3();
        let res = check_static_conditions(&[0.3, -1.2, 0.8], &[2.0, 0.1, -0.7], &m).unwrap();
        assert!(res.row3 <= 1e-14, "{res:?}");
    }

    #[test]
    fn cartan_fields_give_exact_zero() {
        let m = sl2r();
        let res = check_static_conditions(&[0.7, 0.0, 0.0], &[-1.3, 0.0, 0.0], &m).unwrap();
        assert_eq!(res.max(), 0.0);
    }

    #[test]
    fn tampered_pi_only_breaks_row_two() {
        let m = sl2r();
        let (mu, gamma) = ([0.3, -1.2, 0.8], [2.0, 0.1, -0.7]);
        let mut pair = build_lm(&mu, &gamma, &m).unwrap();
        // pi -> pi - c, stored as -pi in M
        for (v, c) in pair.m[1].iter_mut().zip(&m.c.coeffs) {
            *v += c;
        }
        let res = static_rows(&pair, &m).unwrap();
        assert!(res.row2 > 1e-3, "{res:?}");
        assert!(res.row3 < 1e-14 && res.row4 == 0.0, "{res:?}");
    }

    #[test]
    fn tampered_b_breaks_row_three() {
        let m = so3();
        let pair = build_lm_with_b(&[0.3, -1.2, 0.8], &[2.0, 0.1, -0.7], &m, 1.3).unwrap();
        let res = static_rows(&pair, &m).unwrap();
        assert!(res.row3 > 1e-3 && res.row4 < 1e-15, "{res:?}");
    }

    #[test]
    fn chiral_is_rejected() {
        let m = ModelSpec::chiral(Arc::new(build_algebra(AlgebraId::So3)));
        assert!(matches!(build_lm(&[0.0; 3], &[0.0; 3], &m), Err(Error::Unsupported(_))));
    }

    #[test]
    fn graded_rows_match_sampled_polynomial() {
        let m = sl2r();
        let (mu, gamma) = ([0.3, -1.2, 0.8], [2.0, 0.1, -0.7]);
        let (mt, gt, ps, xs) = ([0.5, 0.2, -0.1], [1.0, -2.0, 0.3], [0.0, 0.4, 0.9], [-0.6, 0.2, 0.1]);
        let pair = build_lm(&mu, &gamma, &m).unwrap();
        let rows = graded_rows(&pair, &m, &mt, &gt, &ps, &xs);
        for lambda in DEFAULT_LAMBDAS {
            let direct = curvature_at(&pair, &m, lambda, &mt, &gt, &ps, &xs);
            let poly = rows_as_polynomial(&rows, lambda);
            let diff: Vec<f64> = direct.iter().zip(&poly).map(|(a, b)| a - b).collect();
            assert!(norm(&diff) < 1e-12);
        }
        // l = 0 isolates the kinematic row
        let at0 = curvature_at(&pair, &m, 0.0, &mt, &gt, &ps, &xs);
        assert_eq!(at0, rows[0]);
    }

    #[test]
    fn equilibrium_trajectory_has_zero_curvature() {
        let m = so3();
        let st = equilibrium_state(&m, 1.0, -0.5, 16, 3.0).unwrap();
        let traj = integrate(&st, &m, 0.01, 10, 2).unwrap();
        let res = curvature_residual(&traj, &m, &DEFAULT_LAMBDAS).unwrap();
        assert_eq!(res.times.len(), traj.len() - 2);
        assert!(res.max_per_lambda().iter().all(|v| *v <= 1e-12), "{res:?}");
        assert!(curvature_residual(&traj[..2], &m, &DEFAULT_LAMBDAS).is_err());
    }
}
