use crate::algebra::{norm, AlgebraElement, AlgebraId};
use crate::error::{Error, Result};

use super::model::ModelSpec;

pub const MIN_GRID: usize = 8;

/// Fields `mu` and `gamma` on a periodic uniform grid, stored point-major:
/// coefficient `k` at point `j` is `mu[j * dim + k]`.
///
/// For the chiral system `mu` holds `xi`.
#[derive(Debug, Clone, PartialEq)]
pub struct StrandState {
    pub algebra: AlgebraId,
    pub dim: usize,
    pub n: usize,
    pub ds: f64,
    pub t: f64,
    pub mu: Vec<f64>,
    pub gamma: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Mu,
    Gamma,
    Both,
}

impl StrandState {
    pub fn zeros(algebra: AlgebraId, dim: usize, n: usize, length: f64) -> Result<Self> {
        if n < MIN_GRID {
            return Err(Error::GridTooSmall {
                found: n,
                min: MIN_GRID,
            });
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "domain length must be positive, got {length}"
            )));
        }
        Ok(StrandState {
            algebra,
            dim,
            n,
            ds: length / n as f64,
            t: 0.0,
            mu: vec![0.0; n * dim],
            gamma: vec![0.0; n * dim],
        })
    }

    /// Build from per-point element arrays.
    pub fn from_elements(
        mu: &[AlgebraElement],
        gamma: &[AlgebraElement],
        length: f64,
    ) -> Result<Self> {
        if mu.len() != gamma.len() {
            return Err(Error::InvalidArgument(format!(
                "mu has {} points, gamma has {}",
                mu.len(),
                gamma.len()
            )));
        }
        let first = mu
            .first()
            .ok_or(Error::GridTooSmall { found: 0, min: MIN_GRID })?;
        let mut st = StrandState::zeros(first.algebra, first.dim(), mu.len(), length)?;
        for (j, (m, g)) in mu.iter().zip(gamma).enumerate() {
            for e in [m, g] {
                if e.algebra != st.algebra {
                    return Err(Error::AlgebraMismatch {
                        expected: st.algebra,
                        found: e.algebra,
                    });
                }
                if e.dim() != st.dim {
                    return Err(Error::DimensionMismatch {
                        algebra: st.algebra,
                        expected: st.dim,
                        found: e.dim(),
                    });
                }
            }
            st.mu[j * st.dim..(j + 1) * st.dim].copy_from_slice(&m.coeffs);
            st.gamma[j * st.dim..(j + 1) * st.dim].copy_from_slice(&g.coeffs);
        }
        Ok(st)
    }

    pub fn length(&self) -> f64 {
        self.ds * self.n as f64
    }

    pub fn position(&self, j: usize) -> f64 {
        j as f64 * self.ds
    }

    pub fn mu_at(&self, j: usize) -> &[f64] {
        &self.mu[j * self.dim..(j + 1) * self.dim]
    }

    pub fn gamma_at(&self, j: usize) -> &[f64] {
        &self.gamma[j * self.dim..(j + 1) * self.dim]
    }

    pub fn mu_element(&self, j: usize) -> AlgebraElement {
        AlgebraElement::new(self.algebra, self.mu_at(j).to_vec())
    }

    pub fn gamma_element(&self, j: usize) -> AlgebraElement {
        AlgebraElement::new(self.algebra, self.gamma_at(j).to_vec())
    }

    pub fn max_mu_norm(&self) -> f64 {
        max_point_norm(&self.mu, self.dim)
    }

    pub fn max_gamma_norm(&self) -> f64 {
        max_point_norm(&self.gamma, self.dim)
    }

    pub fn max_norm(&self) -> f64 {
        self.max_mu_norm().max(self.max_gamma_norm())
    }

    pub fn is_finite(&self) -> bool {
        self.mu.iter().chain(&self.gamma).all(|v| v.is_finite())
    }

    /// Shift the grid by `cells` points: the new value at `j` is the old one at `j - cells`.
    pub fn cyclic_shift(&self, cells: isize) -> StrandState {
        let n = self.n as isize;
        let mut out = self.clone();
        for j in 0..self.n {
            let src = (j as isize - cells).rem_euclid(n) as usize;
            out.mu[j * self.dim..(j + 1) * self.dim].copy_from_slice(self.mu_at(src));
            out.gamma[j * self.dim..(j + 1) * self.dim].copy_from_slice(self.gamma_at(src));
        }
        out
    }
}

pub(crate) fn max_point_norm(field: &[f64], dim: usize) -> f64 {
    field.chunks(dim).map(norm).fold(0.0, f64::max)
}

/// Constant state `mu = m A`, `gamma = n A`, where `A` is the unit vector along `a`.
pub fn equilibrium_state(
    model: &ModelSpec,
    m: f64,
    n_val: f64,
    points: usize,
    length: f64,
) -> Result<StrandState> {
    let axis = match model.so3_params() {
        Some(p) => p.axis.to_vec(),
        None => {
            let len = model.a.norm();
            if len == 0.0 {
                return Err(Error::InvalidArgument(
                    "equilibrium needs a nonzero Cartan element a".into(),
                ));
            }
            model.a.coeffs.iter().map(|v| v / len).collect()
        }
    };
    let dim = model.dim();
    let mut st = StrandState::zeros(model.algebra(), dim, points, length)?;
    for j in 0..points {
        for k in 0..dim {
            st.mu[j * dim + k] = m * axis[k];
            st.gamma[j * dim + k] = n_val * axis[k];
        }
    }
    Ok(st)
}

/// Add `amplitude * cos(2 pi k s / Ls) * direction` to the chosen field(s).
pub fn perturb(
    state: &StrandState,
    field: Field,
    k_mode: f64,
    amplitude: f64,
    direction: &[f64],
) -> Result<StrandState> {
    if !(k_mode.is_finite() && k_mode.fract() == 0.0) {
        return Err(Error::InvalidArgument(format!(
            "mode {k_mode} is not an integer grid mode"
        )));
    }
    if k_mode.abs() > (state.n / 2) as f64 {
        return Err(Error::InvalidArgument(format!(
            "mode {k_mode} exceeds the Nyquist mode {}",
            state.n / 2
        )));
    }
    if direction.len() != state.dim {
        return Err(Error::DimensionMismatch {
            algebra: state.algebra,
            expected: state.dim,
            found: direction.len(),
        });
    }
    if !amplitude.is_finite() || direction.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("perturbation must be finite".into()));
    }
    let mut out = state.clone();
    let wave = 2.0 * std::f64::consts::PI * k_mode / state.length();
    for j in 0..state.n {
        let w = amplitude * (wave * state.position(j)).cos();
        for (k, d) in direction.iter().enumerate() {
            let idx = j * state.dim + k;
            if matches!(field, Field::Mu | Field::Both) {
                out.mu[idx] += w * d;
            }
            if matches!(field, Field::Gamma | Field::Both) {
                out.gamma[idx] += w * d;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_algebra, AlgebraId};
    use std::sync::Arc;

    fn model() -> ModelSpec {
        let t = Arc::new(build_algebra(AlgebraId::So3));
        ModelSpec::so3(t, 0.3, 1.0, 0.5, [1.0, 1.0, 0.0]).unwrap()
    }

    #[test]
    fn equilibrium_lies_on_axis() {
        let st = equilibrium_state(&model(), 2.0, -1.0, 16, 6.0).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(st.n, 16);
        assert!((st.ds - 0.375).abs() < 1e-15);
        for j in 0..16 {
            assert!((st.mu_at(j)[0] - 2.0 * s).abs() < 1e-15);
            assert!((st.gamma_at(j)[1] + s).abs() < 1e-15);
            assert_eq!(st.mu_at(j)[2], 0.0);
        }
    }

    #[test]
    fn zero_amplitude_is_identity() {
        let st = equilibrium_state(&model(), 1.0, 1.0, 16, 6.0).unwrap();
        let p = perturb(&st, Field::Both, 3.0, 0.0, &[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(p, st);
    }

    #[test]
    fn perturbation_is_a_cosine_mode() {
        let st = equilibrium_state(&model(), 0.0, 0.0, 16, 2.0).unwrap();
        let p = perturb(&st, Field::Gamma, 2.0, 0.1, &[0.0, 0.0, 1.0]).unwrap();
        assert!(p.mu.iter().all(|v| *v == 0.0));
        assert!((p.gamma_at(0)[2] - 0.1).abs() < 1e-15);
        assert!(p.gamma_at(2)[2].abs() < 1e-15);
        assert!((p.gamma_at(4)[2] + 0.1).abs() < 1e-15);
    }

    #[test]
    fn non_integer_mode_is_rejected() {
        let st = equilibrium_state(&model(), 0.0, 0.0, 16, 2.0).unwrap();
        assert!(perturb(&st, Field::Mu, 1.5, 0.1, &[0.0, 0.0, 1.0]).is_err());
        assert!(perturb(&st, Field::Mu, 9.0, 0.1, &[0.0, 0.0, 1.0]).is_err());
        assert!(perturb(&st, Field::Mu, 1.0, 0.1, &[0.0, 1.0]).is_err());
    }

    #[test]
    fn small_grids_are_rejected() {
        assert!(StrandState::zeros(AlgebraId::So3, 3, 7, 1.0).is_err());
        assert!(StrandState::zeros(AlgebraId::So3, 3, 8, 0.0).is_err());
    }

    #[test]
    fn cyclic_shift_moves_points() {
        let mut st = StrandState::zeros(AlgebraId::So3, 3, 8, 1.0).unwrap();
        st.mu[0] = 1.0;
        let sh = st.cyclic_shift(-1);
        assert_eq!(sh.mu_at(7)[0], 1.0);
        assert_eq!(sh.cyclic_shift(1), st);
    }
}
