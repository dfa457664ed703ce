//! Linear stability of constant equilibria `mu = m A`, `gamma = n A`.
//!
//! Perturbations are taken proportional to `exp(i(k s - w t))`, so a root
//! `w` grows when `Im w > 0`. The Jacobian route works with `sigma = -i w`,
//! whose real part is the same growth rate.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::algebra::AlgebraId;
use crate::dynamics::{ModelSpec, StrandState, System};
use crate::error::{Error, Result};

/// `max_growth <= STABLE_TOL` counts as stable.
pub const STABLE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct DispersionResult {
    pub k: f64,
    pub omega_roots: [Complex64; 6],
    pub max_growth: f64,
    pub stable: bool,
}

impl DispersionResult {
    fn from_shifted(k: f64, r: f64, omega_shift: [Complex64; 6]) -> Self {
        let omega_roots = omega_shift.map(|z| z - r * k);
        let max_growth = omega_roots.iter().map(|z| z.im).fold(f64::NEG_INFINITY, f64::max);
        DispersionResult {
            k,
            omega_roots,
            max_growth,
            stable: max_growth <= STABLE_TOL,
        }
    }
}

/// Roots of `z^2 + b z + c = 0` by the cancellation-free `q` form.
fn quadratic_roots(b: Complex64, c: Complex64) -> (Complex64, Complex64) {
    let disc = (b * b - 4.0 * c).sqrt();
    let sign = if (b.conj() * disc).re >= 0.0 { 1.0 } else { -1.0 };
    let q = -0.5 * (b + sign * disc);
    if q == Complex64::new(0.0, 0.0) {
        return (q, q);
    }
    (q, c / q)
}

fn biquadratic_roots(b: f64, c: f64) -> [Complex64; 4] {
    // W^4 - b W^2 - c = 0 with z = W^2
    let (z1, z2) = quadratic_roots(Complex64::new(-b, 0.0), Complex64::new(-c, 0.0));
    let (w1, w2) = (z1.sqrt(), z2.sqrt());
    [w1, -w1, w2, -w2]
}

/// Roots in `w` of `(w + r k)^2 ((w + r k)^4 - (m^2 - 2 a n)(w + r k)^2 - a^2 (k^2 - n^2)) = 0`.
pub fn dispersion_roots_so3(m: f64, n: f64, a: f64, r: f64, k: f64) -> DispersionResult {
    let (b, c) = so3_coefficients(m, n, a, k);
    let q = biquadratic_roots(b, c);
    let zero = Complex64::new(0.0, 0.0);
    DispersionResult::from_shifted(k, r, [zero, zero, q[0], q[1], q[2], q[3]])
}

fn so3_coefficients(m: f64, n: f64, a: f64, k: f64) -> (f64, f64) {
    (m * m - 2.0 * a * n, a * a * (k * k - n * n))
}

/// Roots in `w` of `(w + r k)^2 ((w + r k)^4 + a^2 k^2) = 0`, the `m = n = 0`
/// sl(2,R) relation.
pub fn dispersion_roots_sl2r(a: f64, r: f64, k: f64) -> DispersionResult {
    let rho = (a * k).abs().sqrt();
    let zero = Complex64::new(0.0, 0.0);
    let mut roots = [zero; 6];
    for j in 0..4 {
        let angle = std::f64::consts::PI * (2 * j + 1) as f64 / 4.0;
        roots[2 + j] = Complex64::from_polar(rho, angle);
    }
    DispersionResult::from_shifted(k, r, roots)
}

/// Relative residual of a root `w` in the so(3) dispersion polynomial:
/// `|P(W)| / sum_i |p_i| |W|^i` with `W = w + r k`.
pub fn dispersion_residual_so3(m: f64, n: f64, a: f64, r: f64, k: f64, omega: Complex64) -> f64 {
    let (b, c) = so3_coefficients(m, n, a, k);
    let w = omega + r * k;
    let w2 = w * w;
    let p = w2 * (w2 * w2 - b * w2 - c);
    let x = w.norm();
    let scale = x.powi(6) + b.abs() * x.powi(4) + c.abs() * x.powi(2);
    if scale == 0.0 {
        p.norm()
    } else {
        p.norm() / scale
    }
}

/// Distance between a root set and its complex conjugate, after pairing.
pub fn conjugate_mismatch(roots: &[Complex64]) -> f64 {
    let conj: Vec<Complex64> = roots.iter().map(|z| z.conj()).collect();
    match_roots(roots, &conj)
}

/// Greedy nearest-neighbour pairing; returns the largest paired distance.
pub fn match_roots(x: &[Complex64], y: &[Complex64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let mut used = vec![false; y.len()];
    let mut worst: f64 = 0.0;
    for zx in x {
        let (best, dist) = y
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, zy)| (i, (zx - zy).norm()))
            .fold((usize::MAX, f64::INFINITY), |acc, v| if v.1 < acc.1 { v } else { acc });
        used[best] = true;
        worst = worst.max(dist);
    }
    worst
}

/// Fourier-space Jacobian of the Hamiltonian right-hand side about the
/// equilibrium `(m A, n A)` with `A` the unit vector along `a`, in the
/// variables `(delta mu, delta gamma)`.
///
/// At a Cartan-valued base point `phi(mu_e) = 0`, so
/// `d/dt dmu = i r k dmu + [phi dmu, mu_e] + [dgamma, c]` and
/// `d/dt dgamma = i r k dgamma - i k phi dmu + [phi dmu, gamma_e]`.
pub fn linearization_matrix(m: f64, n: f64, model: &ModelSpec, k: f64) -> Result<DMatrix<Complex64>> {
    if model.system == System::Chiral {
        return Err(Error::Unsupported("linearization of the chiral model".into()));
    }
    let d = model.dim();
    let axis: Vec<f64> = match model.so3_params() {
        Some(p) => p.axis.to_vec(),
        None => {
            let len = model.a.norm();
            if len == 0.0 {
                return Err(Error::InvalidArgument("a must be nonzero".into()));
            }
            model.a.coeffs.iter().map(|v| v / len).collect()
        }
    };
    let mu_e: Vec<f64> = axis.iter().map(|v| m * v).collect();
    let gamma_e: Vec<f64> = axis.iter().map(|v| n * v).collect();
    let tbl = &*model.table;
    let ik = Complex64::new(0.0, k);
    let irk = Complex64::new(0.0, model.r * k);
    let mut jac = DMatrix::<Complex64>::zeros(2 * d, 2 * d);
    let mut e = vec![0.0; d];
    for i in 0..d {
        e.iter_mut().for_each(|v| *v = 0.0);
        e[i] = 1.0;
        let phi_e = model.phi(&e)?;
        // column for dmu = e_i
        let top = tbl.bracket_slice(&phi_e, &mu_e);
        let bottom = tbl.bracket_slice(&phi_e, &gamma_e);
        for row in 0..d {
            jac[(row, i)] = Complex64::new(top[row], 0.0);
            jac[(d + row, i)] = Complex64::new(bottom[row], 0.0) - ik * phi_e[row];
        }
        jac[(i, i)] += irk;
        // column for dgamma = e_i
        let top = tbl.bracket_slice(&e, &model.c.coeffs);
        for row in 0..d {
            jac[(row, d + i)] = Complex64::new(top[row], 0.0);
        }
        jac[(d + i, d + i)] += irk;
    }
    Ok(jac)
}

/// Eigenvalues `sigma` of a complex matrix.
pub fn eigenvalues(mat: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    mat.clone()
        .try_schur(1e-14, 10_000)
        .and_then(|s| s.eigenvalues())
        .map(|v| v.iter().copied().collect())
        .ok_or_else(|| Error::InvalidArgument("eigenvalue iteration did not converge".into()))
}

/// Jacobian spectrum expressed as dispersion roots `w = i sigma`, and the growth rate.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobianSpectrum {
    pub sigma: Vec<Complex64>,
    pub omega: Vec<Complex64>,
    pub max_growth: f64,
}

pub fn jacobian_spectrum(m: f64, n: f64, model: &ModelSpec, k: f64) -> Result<JacobianSpectrum> {
    let sigma = eigenvalues(&linearization_matrix(m, n, model, k)?)?;
    let omega = sigma.iter().map(|s| Complex64::new(0.0, 1.0) * s).collect();
    let max_growth = sigma.iter().map(|s| s.re).fold(f64::NEG_INFINITY, f64::max);
    Ok(JacobianSpectrum {
        sigma,
        omega,
        max_growth,
    })
}

/// Side-by-side comparison of the so(3) dispersion formula (which has no
/// `c`) with the Jacobian of a compact so(3) model.
#[derive(Debug, Clone, PartialEq)]
pub struct FormulaComparison {
    pub k: f64,
    pub formula: DispersionResult,
    pub jacobian: JacobianSpectrum,
    /// Largest distance between paired roots.
    pub root_distance: f64,
    pub growth_difference: f64,
}

pub fn compare_formula_so3(m: f64, n: f64, model: &ModelSpec, k: f64) -> Result<FormulaComparison> {
    let p = model.so3_params().ok_or_else(|| {
        Error::Unsupported("formula comparison needs a compact so3 model".into())
    })?;
    let formula = dispersion_roots_so3(m, n, p.a, model.r, k);
    let jacobian = jacobian_spectrum(m, n, model, k)?;
    let root_distance = match_roots(&formula.omega_roots, &jacobian.omega);
    let growth_difference = (formula.max_growth.max(0.0) - jacobian.max_growth.max(0.0)).abs();
    Ok(FormulaComparison {
        k,
        formula,
        jacobian,
        root_distance,
        growth_difference,
    })
}

/// Most unstable Jacobian eigenvalue and a unit eigenvector over
/// `(delta mu, delta gamma)`, taken as the null vector of `J - sigma I`.
pub fn dominant_mode(m: f64, n: f64, model: &ModelSpec, k: f64) -> Result<(Complex64, Vec<Complex64>)> {
    let jac = linearization_matrix(m, n, model, k)?;
    let sigma = eigenvalues(&jac)?
        .into_iter()
        .fold(None, |best: Option<Complex64>, z| match best {
            Some(b) if b.re >= z.re => Some(b),
            _ => Some(z),
        })
        .ok_or_else(|| Error::InvalidArgument("empty spectrum".into()))?;
    let size = jac.nrows();
    let shifted = jac - DMatrix::<Complex64>::identity(size, size) * sigma;
    let svd = shifted.svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::InvalidArgument("singular vectors unavailable".into()))?;
    let (idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
    let v: Vec<Complex64> = v_t.row(idx).iter().map(|z| z.conj()).collect();
    Ok((sigma, v))
}

/// Add `amplitude * Re(v exp(i 2 pi k s / Ls))` to `(mu, gamma)`, where `v`
/// stacks the `mu` and `gamma` parts.
pub fn seed_mode(state: &StrandState, k_mode: usize, amplitude: f64, v: &[Complex64]) -> Result<StrandState> {
    let d = state.dim;
    if v.len() != 2 * d {
        return Err(Error::DimensionMismatch {
            algebra: state.algebra,
            expected: 2 * d,
            found: v.len(),
        });
    }
    if k_mode > state.n / 2 {
        return Err(Error::InvalidArgument(format!(
            "mode {k_mode} exceeds the Nyquist mode {}",
            state.n / 2
        )));
    }
    let mut out = state.clone();
    for j in 0..state.n {
        let phase = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (k_mode * j) as f64 / state.n as f64);
        for i in 0..d {
            out.mu[j * d + i] += amplitude * (v[i] * phase).re;
            out.gamma[j * d + i] += amplitude * (v[d + i] * phase).re;
        }
    }
    Ok(out)
}

/// Lower edge `k^2 = n^2 - (m^2 - 2an)^2 / (4 a^2)` of the stable band predicted
/// by the so(3) formula; `None` when it is not real and positive.
pub fn band_edge_so3(m: f64, n: f64, a: f64) -> Option<f64> {
    let b = m * m - 2.0 * a * n;
    let k2 = n * n - b * b / (4.0 * a * a);
    (k2 > 0.0).then(|| k2.sqrt())
}

/// Amplitude `2 |f_hat_k|` of the transverse part of `mu` in grid mode `k_mode`.
/// For so(3) "transverse" is orthogonal to the axis; otherwise the Cartan
/// coordinates are dropped.
pub fn transverse_amplitude(state: &StrandState, model: &ModelSpec, k_mode: usize) -> f64 {
    let d = state.dim;
    let n = state.n;
    let axis = model.so3_params().map(|p| p.axis);
    let mut acc = vec![Complex64::new(0.0, 0.0); d];
    for j in 0..n {
        let v = state.mu_at(j);
        let mut t = v.to_vec();
        match axis {
            Some(ax) => {
                let p: f64 = (0..3).map(|i| v[i] * ax[i]).sum();
                for i in 0..3 {
                    t[i] -= p * ax[i];
                }
            }
            None => {
                for &i in &model.table.cartan_indices {
                    t[i] = 0.0;
                }
            }
        }
        let phase = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * (k_mode * j) as f64 / n as f64);
        for i in 0..d {
            acc[i] += phase * t[i];
        }
    }
    2.0 * acc.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() / n as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthFit {
    pub rate: f64,
    /// No exponential window was found; the mode stayed near its seed level.
    pub oscillation: bool,
    pub window: Option<(f64, f64)>,
    pub points: usize,
}

/// Fit the log-amplitude slope of grid mode `k_mode` over the samples whose
/// amplitude lies in `[10 seed, 1e-3 max(background, 1)]`.
pub fn measured_growth_rate(
    trajectory: &[StrandState],
    model: &ModelSpec,
    k_mode: usize,
    seed: f64,
    background: f64,
) -> Result<GrowthFit> {
    if !(seed > 0.0 && seed.is_finite()) {
        return Err(Error::InvalidArgument("seed amplitude must be positive".into()));
    }
    let lo = 10.0 * seed;
    let hi = 1e-3 * background.max(1.0);
    let mut ts = Vec::new();
    let mut ys = Vec::new();
    for st in trajectory {
        let amp = transverse_amplitude(st, model, k_mode);
        if amp >= lo && amp <= hi {
            ts.push(st.t);
            ys.push(amp.ln());
        } else if amp > hi && !ts.is_empty() {
            break;
        }
    }
    if ts.len() < 3 {
        return Ok(GrowthFit {
            rate: 0.0,
            oscillation: true,
            window: None,
            points: ts.len(),
        });
    }
    let np = ts.len() as f64;
    let tm = ts.iter().sum::<f64>() / np;
    let ym = ys.iter().sum::<f64>() / np;
    let sxy: f64 = ts.iter().zip(&ys).map(|(t, y)| (t - tm) * (y - ym)).sum();
    let sxx: f64 = ts.iter().map(|t| (t - tm) * (t - tm)).sum();
    Ok(GrowthFit {
        rate: sxy / sxx,
        oscillation: false,
        window: Some((ts[0], ts[ts.len() - 1])),
        points: ts.len(),
    })
}

/// Convenience: the `a` scalar of sl(2,R) models is `<alpha, a>`.
pub fn sl2r_root_value(model: &ModelSpec) -> Option<f64> {
    (model.algebra() == AlgebraId::Sl2r).then(|| model.table.roots[0].eval(&model.table.cartan_coefficients(&model.a.coeffs)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::build_algebra;
    use std::sync::Arc;

    fn so3(r: f64, a: f64, c: f64) -> ModelSpec {
        ModelSpec::so3(Arc::new(build_algebra(AlgebraId::So3)), r, a, c, [0.0, 0.0, 1.0]).unwrap()
    }

    #[test]
    fn at_k_equal_n_the_biquadratic_collapses() {
        let (m, n, a) = (3.0, 1.5, 1.0);
        let res = dispersion_roots_so3(m, n, a, 0.0, n);
        let b = (m * m - 2.0 * a * n).sqrt();
        let mut re: Vec<f64> = res.omega_roots.iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        assert!((re[0] + b).abs() < 1e-12 && (re[5] - b).abs() < 1e-12);
        assert!(res.stable);
        // imaginary pair when m^2 - 2an < 0
        let res = dispersion_roots_so3(0.5, 2.0, 1.0, 0.0, 2.0);
        assert!((res.max_growth - (4.0f64 - 0.25).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn parallel_branch_is_a_double_root() {
        let res = dispersion_roots_so3(1.0, 0.3, 0.7, 0.9, 2.0);
        let count = res
            .omega_roots
            .iter()
            .filter(|z| (**z - Complex64::new(-1.8, 0.0)).norm() < 1e-14)
            .count();
        assert!(count >= 2);
    }

    #[test]
    fn roots_satisfy_polynomial_and_conjugation() {
        for &(m, n, a, r, k) in &[
            (3.0, 3.0, 1.0, 0.0, 2.59),
            (0.1, -2.0, 0.5, 1.0, 7.0),
            (2.0, 1.0, 1.0, -0.4, 0.0),
            (1e-3, 1e3, 2.0, 0.0, 1e3),
        ] {
            let res = dispersion_roots_so3(m, n, a, r, k);
            for z in res.omega_roots {
                assert!(dispersion_residual_so3(m, n, a, r, k, z) < 1e-9, "{m} {n} {a} {k} {z}");
            }
            assert!(conjugate_mismatch(&res.omega_roots) < 1e-9);
        }
    }

    #[test]
    fn r_shift_covariance() {
        let base = dispersion_roots_so3(2.0, 0.5, 1.0, 0.0, 1.3);
        let moved = dispersion_roots_so3(2.0, 0.5, 1.0, 0.75, 1.3);
        for (x, y) in base.omega_roots.iter().zip(&moved.omega_roots) {
            assert_eq!(*y, x - 0.75 * 1.3);
        }
    }

    #[test]
    fn sl2r_closed_form() {
        let res = dispersion_roots_sl2r(1.0, 0.0, 2.0);
        assert!((res.max_growth - 1.0).abs() < 1e-15);
        assert!(!res.stable);
        let zero = dispersion_roots_sl2r(1.0, 0.3, 0.0);
        assert!(zero.omega_roots.iter().all(|z| z.norm() == 0.0));
        for k in [0.1, 1.0, 5.0, -3.0] {
            let res = dispersion_roots_sl2r(0.7, 0.0, k);
            assert!(!res.stable);
            assert!((res.max_growth - (0.7 * k.abs() / 2.0).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_background_zero_k_is_nilpotent() {
        let jac = linearization_matrix(0.0, 0.0, &so3(0.0, 1.0, 1.0), 0.0).unwrap();
        assert!(eigenvalues(&jac).unwrap().iter().all(|z| z.norm() < 1e-7));
    }

    #[test]
    fn jacobian_parallel_block() {
        let r = 0.6;
        let spec = jacobian_spectrum(1.2, 0.4, &so3(r, 1.0, 1.0), 1.5).unwrap();
        let count = spec
            .omega
            .iter()
            .filter(|z| (**z - Complex64::new(-r * 1.5, 0.0)).norm() < 1e-10)
            .count();
        assert_eq!(count, 2, "{:?}", spec.omega);
    }

    #[test]
    fn jacobian_sl2r_matches_closed_form() {
        // a = A h, c = C h with <alpha, a> = 2A and C = A
        let model = ModelSpec::hamiltonian(Arc::new(build_algebra(AlgebraId::Sl2r)), System::Normal, 0.0, &[0.5], &[0.5])
            .unwrap();
        let a = sl2r_root_value(&model).unwrap();
        assert_eq!(a, 1.0);
        for k in [0.5, 2.0, 4.0] {
            let spec = jacobian_spectrum(0.0, 0.0, &model, k).unwrap();
            let res = dispersion_roots_sl2r(a, 0.0, k);
            assert!((spec.max_growth - res.max_growth).abs() < 1e-10);
            assert!(match_roots(&spec.omega, &res.omega_roots) < 1e-6);
        }
    }

    #[test]
    fn dominant_mode_is_an_eigenvector() {
        let model = so3(0.3, 1.0, 1.0);
        let (sigma, v) = dominant_mode(2.0, -1.0, &model, 2.0).unwrap();
        let jac = linearization_matrix(2.0, -1.0, &model, 2.0).unwrap();
        let vec = nalgebra::DVector::from_vec(v);
        assert!(((&jac * &vec) - &vec * sigma).norm() < 1e-10);
        assert!((vec.norm() - 1.0).abs() < 1e-12);
        assert!((sigma.re - 2.0f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn band_edge() {
        let edge = band_edge_so3(3.0, 3.0, 1.0).unwrap();
        assert!((edge * edge - 6.75).abs() < 1e-12);
        assert!(!dispersion_roots_so3(3.0, 3.0, 1.0, 0.0, edge - 1e-6).stable);
        assert!(dispersion_roots_so3(3.0, 3.0, 1.0, 0.0, edge + 1e-6).stable);
        assert!(band_edge_so3(0.0, 0.0, 1.0).is_none());
    }
}
