//! Sectional operators `ad_c^{-1} ad_a` restricted to Cartan-valued `a, c`.
//!
//! On each root plane the operator is a scalar, `<alpha, a> / <alpha, c>`,
//! and it annihilates the Cartan subalgebra. For the compact form the same
//! ratio multiplies both the `u_alpha` and `v_alpha` coordinates.

use crate::algebra::{norm, AlgebraElement, AlgebraId, AlgebraTable, RealForm};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    Normal,
    Compact,
}

impl Form {
    fn real_form(self) -> RealForm {
        match self {
            Form::Normal => RealForm::Normal,
            Form::Compact => RealForm::Compact,
        }
    }
}

/// Diagonal realization of `phi_{c,a}` over the basis coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionalSpec {
    pub algebra: AlgebraId,
    pub form: Form,
    /// Cartan coefficients of the numerator element `a`.
    pub a_cartan: Vec<f64>,
    /// Cartan coefficients of the (regular) denominator element `c`.
    pub c_cartan: Vec<f64>,
    /// Per-coordinate scaling; zero on Cartan coordinates.
    pub diag: Vec<f64>,
}

/// Relative threshold below which `<alpha, c>` counts as vanishing.
pub const REGULARITY_TOL: f64 = 1e-12;

/// Build `phi_{c,a} = ad_c^{-1} ad_a`, i.e. `diag = <alpha, a> / <alpha, c>`.
pub fn make_sectional(
    tbl: &AlgebraTable,
    form: Form,
    a_cartan: &[f64],
    c_cartan: &[f64],
) -> Result<SectionalSpec> {
    if !tbl.has_root_data() {
        return Err(Error::NoRootData { algebra: tbl.id });
    }
    if tbl.real_form != form.real_form() {
        return Err(Error::InvalidArgument(format!(
            "{} is realized in {:?} form, not {:?}",
            tbl.id, tbl.real_form, form
        )));
    }
    let rank = tbl.cartan_indices.len();
    for (name, v) in [("a", a_cartan), ("c", c_cartan)] {
        if v.len() != rank {
            return Err(Error::InvalidArgument(format!(
                "{name} has {} Cartan coefficients, {} has rank {rank}",
                v.len(),
                tbl.id
            )));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(format!("{name} is not finite")));
        }
    }
    let c_scale = norm(c_cartan);
    let mut diag = vec![0.0; tbl.dim];
    for root in &tbl.roots {
        let den = root.eval(c_cartan);
        if !(den.abs() > REGULARITY_TOL * c_scale) {
            return Err(Error::NotRegular {
                root: root.name.clone(),
                value: den,
            });
        }
        let ratio = root.eval(a_cartan) / den;
        diag[root.plus] = ratio;
        diag[root.minus] = ratio;
    }
    Ok(SectionalSpec {
        algebra: tbl.id,
        form,
        a_cartan: a_cartan.to_vec(),
        c_cartan: c_cartan.to_vec(),
        diag,
    })
}

impl SectionalSpec {
    #[inline]
    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        for ((o, &d), &v) in out.iter_mut().zip(&self.diag).zip(x) {
            *o = d * v;
        }
    }

    /// Largest ratio magnitude over the root planes.
    pub fn max_ratio(&self) -> f64 {
        self.diag.iter().fold(0.0, |m, d| m.max(d.abs()))
    }
}

pub fn apply_sectional(spec: &SectionalSpec, x: &AlgebraElement) -> Result<AlgebraElement> {
    if x.algebra != spec.algebra {
        return Err(Error::AlgebraMismatch {
            expected: spec.algebra,
            found: x.algebra,
        });
    }
    if x.coeffs.len() != spec.diag.len() {
        return Err(Error::DimensionMismatch {
            algebra: spec.algebra,
            expected: spec.diag.len(),
            found: x.coeffs.len(),
        });
    }
    let mut out = vec![0.0; x.coeffs.len()];
    spec.apply_into(&x.coeffs, &mut out);
    Ok(AlgebraElement::new(x.algebra, out))
}

/// Closed form on so(3) = (R^3, x): `(c / a) (zeta - (zeta . A^) A^)`.
pub fn sectional_so3(a_scalar: f64, c_scalar: f64, axis: [f64; 3], zeta: [f64; 3]) -> Result<[f64; 3]> {
    if a_scalar == 0.0 {
        return Err(Error::InvalidArgument("a_scalar must be nonzero".into()));
    }
    let n = norm(&axis);
    if !(n > 0.0) {
        return Err(Error::InvalidArgument("axis must be nonzero".into()));
    }
    let unit = axis.map(|v| v / n);
    let along: f64 = zeta.iter().zip(&unit).map(|(z, u)| z * u).sum();
    let ratio = c_scalar / a_scalar;
    Ok([0, 1, 2].map(|i| ratio * (zeta[i] - along * unit[i])))
}

/// `|| [den, phi(x)] - [num, x - x_cartan] ||` where `phi = ad_den^{-1} ad_num`
/// and `num`, `den` are the `a`, `c` Cartan elements held by `spec`.
pub fn check_intertwining(spec: &SectionalSpec, tbl: &AlgebraTable, x: &AlgebraElement) -> Result<f64> {
    let num = tbl.cartan_element(&spec.a_cartan)?;
    let den = tbl.cartan_element(&spec.c_cartan)?;
    let phi = apply_sectional(spec, x)?;
    let mut root_part = x.coeffs.clone();
    for &i in &tbl.cartan_indices {
        root_part[i] = 0.0;
    }
    let lhs = tbl.bracket_slice(&den.coeffs, &phi.coeffs);
    let rhs = tbl.bracket_slice(&num.coeffs, &root_part);
    let diff: Vec<f64> = lhs.iter().zip(&rhs).map(|(l, r)| l - r).collect();
    Ok(norm(&diff))
}
