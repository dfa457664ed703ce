//! Independent oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::Arc;

use gstrand_core::algebra::{build_algebra, AlgebraId, AlgebraTable};
use gstrand_core::dynamics::{spatial_derivative, StrandState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use nalgebra::DMatrix;
use num_complex::Complex64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn table(id: AlgebraId) -> Arc<AlgebraTable> {
    Arc::new(build_algebra(id))
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-scale..scale)).collect()
}

pub fn cross(x: &[f64], y: &[f64]) -> [f64; 3] {
    [
        x[1] * y[2] - x[2] * y[1],
        x[2] * y[0] - x[0] * y[2],
        x[0] * y[1] - x[1] * y[0],
    ]
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn max_abs_diff(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

/// Smooth random state built from a few low Fourier modes per coefficient.
pub fn smooth_state(
    id: AlgebraId,
    dim: usize,
    n: usize,
    length: f64,
    amp: f64,
    seed: u64,
) -> StrandState {
    let mut r = rng(seed);
    let mut st = StrandState::zeros(id, dim, n, length).unwrap();
    for field in 0..2 {
        for k in 0..dim {
            let c0 = r.gen_range(-amp..amp);
            let modes: Vec<(f64, f64, f64)> = (1..=3)
                .map(|m| (m as f64, r.gen_range(-amp..amp) / m as f64, r.gen_range(0.0..2.0 * PI)))
                .collect();
            for j in 0..n {
                let s = st.position(j);
                let v = c0
                    + modes
                        .iter()
                        .map(|(m, a, ph)| a * (2.0 * PI * m * s / length + ph).sin())
                        .sum::<f64>();
                if field == 0 {
                    st.mu[j * dim + k] = v;
                } else {
                    st.gamma[j * dim + k] = v;
                }
            }
        }
    }
    st
}

/// Compact so(3) right-hand side written directly with cross products:
/// `(d_t - r d_s) mu = (c/a) mu_perp x mu + c gamma x A`,
/// `(d_t - r d_s) gamma = -(c/a) d_s mu_perp + (c/a) mu_perp x gamma`.
pub fn so3_closed_form_rhs(
    st: &StrandState,
    r: f64,
    a: f64,
    c: f64,
    axis: [f64; 3],
) -> (Vec<f64>, Vec<f64>) {
    let n = st.n;
    let perp: Vec<f64> = (0..n)
        .flat_map(|j| {
            let m = st.mu_at(j);
            let p = dot(m, &axis);
            [m[0] - p * axis[0], m[1] - p * axis[1], m[2] - p * axis[2]]
        })
        .collect();
    let mu_s = spatial_derivative(&st.mu, 3, st.ds).unwrap();
    let gamma_s = spatial_derivative(&st.gamma, 3, st.ds).unwrap();
    let perp_s = spatial_derivative(&perp, 3, st.ds).unwrap();
    let q = c / a;
    let mut dm = vec![0.0; 3 * n];
    let mut dg = vec![0.0; 3 * n];
    for j in 0..n {
        let (m, g, p) = (st.mu_at(j), st.gamma_at(j), &perp[3 * j..3 * j + 3]);
        let pm = cross(p, m);
        let ga = cross(g, &axis);
        let pg = cross(p, g);
        for k in 0..3 {
            let i = 3 * j + k;
            dm[i] = r * mu_s[i] + q * pm[k] + c * ga[k];
            dg[i] = r * gamma_s[i] - q * perp_s[i] + q * pg[k];
        }
    }
    (dm, dg)
}

/// Result of a seeded linear-growth run.
pub struct GrowthRun {
    pub spectrum: gstrand_core::stability::JacobianSpectrum,
    pub fit: gstrand_core::stability::GrowthFit,
}

/// Seed the most unstable Jacobian eigenvector of grid mode `k` on the
/// equilibrium `(m A, n A)` and fit the growth of that mode. The domain is
/// `2 pi` long so the grid mode equals the wavenumber. The run stops once
/// the mode leaves the linear regime or at `t_max`.
pub fn seeded_growth(
    model: &gstrand_core::dynamics::ModelSpec,
    m: f64,
    n: f64,
    k: usize,
    seed: f64,
    points: usize,
    t_max: f64,
) -> GrowthRun {
    use gstrand_core::dynamics::{equilibrium_state, step_rk4};
    use gstrand_core::stability::{dominant_mode, jacobian_spectrum, measured_growth_rate, seed_mode, transverse_amplitude};

    let kf = k as f64;
    let spectrum = jacobian_spectrum(m, n, model, kf).unwrap();
    let (sigma, v) = dominant_mode(m, n, model, kf).unwrap();
    let background = m.abs().max(n.abs());
    let base = equilibrium_state(model, m, n, points, 2.0 * PI).unwrap();
    let mut st = seed_mode(&base, k, seed, &v).unwrap();
    let dt = (0.05 / sigma.norm().max(1e-12)).min(0.01);
    let stop = 1e-2 * background.max(1.0);
    let mut traj = vec![st.clone()];
    while st.t < t_max && transverse_amplitude(&st, model, k) < stop {
        st = step_rk4(&st, model, dt).unwrap();
        traj.push(st.clone());
    }
    let fit = measured_growth_rate(&traj, model, k, seed, background).unwrap();
    GrowthRun { spectrum, fit }
}

// Matrix realizations used as bracket oracles.

pub type CMat = DMatrix<Complex64>;

pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn hat3(w: &[f64]) -> [[f64; 3]; 3] {
    [[0.0, -w[2], w[1]], [w[2], 0.0, -w[0]], [-w[1], w[0], 0.0]]
}

/// 7x7 realization of a g2 element `(A, u, v)` in the 14-coefficient layout
/// `(a11, a22, a12, a13, a21, a23, a31, a32, u, v)`.
pub fn g2_matrix(c: &[f64]) -> CMat {
    let a = [
        [c[0], c[2], c[3]],
        [c[4], c[1], c[5]],
        [c[6], c[7], -c[0] - c[1]],
    ];
    let (u, v) = (&c[8..11], &c[11..14]);
    let (uh, vh) = (hat3(u), hat3(v));
    let i = Complex64::i();
    let mut m = CMat::zeros(7, 7);
    for r in 0..3 {
        for k in 0..3 {
            let sym = 0.5 * (a[r][k] + a[k][r]);
            let skew = 0.5 * (a[r][k] - a[k][r]);
            m[(r, k)] = re(skew - 0.5 * uh[r][k]);
            m[(r, 4 + k)] = -i * (sym + 0.5 * vh[r][k]);
            m[(4 + r, k)] = i * (sym - 0.5 * vh[r][k]);
            m[(4 + r, 4 + k)] = re(skew + 0.5 * uh[r][k]);
        }
        m[(r, 3)] = i * v[r];
        m[(3, r)] = -i * v[r];
        m[(3, 4 + r)] = re(-u[r]);
        m[(4 + r, 3)] = re(u[r]);
    }
    m
}

/// 2x2 realization with `h = diag(1, -1)`, `e_a = E12`, `e_-a = E21`.
pub fn sl2_matrix(c: &[f64]) -> CMat {
    CMat::from_row_slice(2, 2, &[re(c[0]), re(c[1]), re(c[2]), re(-c[0])])
}

/// 4x4 realization `1/2 [[hat(x) + hat(y), x - y], [-(x - y)^T, 0]]`.
pub fn so4_matrix(c: &[f64]) -> CMat {
    let (x, y) = (&c[..3], &c[3..]);
    let (hx, hy) = (hat3(x), hat3(y));
    let mut m = CMat::zeros(4, 4);
    for r in 0..3 {
        for k in 0..3 {
            m[(r, k)] = re(0.5 * (hx[r][k] + hy[r][k]));
        }
        m[(r, 3)] = re(0.5 * (x[r] - y[r]));
        m[(3, r)] = re(-0.5 * (x[r] - y[r]));
    }
    m
}

pub fn so3_matrix(c: &[f64]) -> CMat {
    let h = hat3(c);
    CMat::from_fn(3, 3, |r, k| re(h[r][k]))
}

pub fn commutator(x: &CMat, y: &CMat) -> CMat {
    x * y - y * x
}

pub fn max_entry(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

