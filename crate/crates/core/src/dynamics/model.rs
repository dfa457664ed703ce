use std::sync::Arc;

use crate::algebra::{norm, AlgebraElement, AlgebraId, AlgebraTable, RealForm};
use crate::error::{Error, Result};
use crate::sectional::{make_sectional, Form, SectionalSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum System {
    Normal,
    Compact,
    Chiral,
}

impl System {
    pub fn tag(self) -> &'static str {
        match self {
            System::Normal => "normal",
            System::Compact => "compact",
            System::Chiral => "chiral",
        }
    }
}

impl std::str::FromStr for System {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "normal" => Ok(System::Normal),
            "compact" => Ok(System::Compact),
            "chiral" => Ok(System::Chiral),
            other => Err(Error::InvalidArgument(format!(
                "unknown system `{other}` (expected normal, compact or chiral)"
            ))),
        }
    }
}

/// The operator `phi = ad_a^{-1} ad_c` used by the Hamiltonian systems.
#[derive(Debug, Clone, PartialEq)]
pub enum SectionalOp {
    /// Root-space diagonal form over the basis coordinates.
    Diagonal(SectionalSpec),
    /// so(3) with Cartan axis `A` in a general direction: `x -> ratio * x_perp`.
    Axis { ratio: f64, axis: [f64; 3] },
}

impl SectionalOp {
    #[inline]
    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        match self {
            SectionalOp::Diagonal(spec) => spec.apply_into(x, out),
            SectionalOp::Axis { ratio, axis } => {
                let par = x[0] * axis[0] + x[1] * axis[1] + x[2] * axis[2];
                for k in 0..3 {
                    out[k] = ratio * (x[k] - par * axis[k]);
                }
            }
        }
    }

    pub fn max_ratio(&self) -> f64 {
        match self {
            SectionalOp::Diagonal(spec) => spec.max_ratio(),
            SectionalOp::Axis { ratio, .. } => ratio.abs(),
        }
    }
}

/// Scalar description of a compact so(3) model: `a = a A`, `c = c A`, `|A| = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct So3Params {
    pub a: f64,
    pub c: f64,
    pub axis: [f64; 3],
}

/// Everything the right-hand sides need besides the fields themselves.
///
/// `b = r a` is never stored; use [`ModelSpec::b`].
#[derive(Debug, Clone)]
pub struct ModelSpec {
    pub table: Arc<AlgebraTable>,
    pub system: System,
    pub r: f64,
    pub a: AlgebraElement,
    pub c: AlgebraElement,
    pub sectional: Option<SectionalOp>,
    /// Evaluate the pointwise part of the RHS on the rayon pool.
    pub parallel: bool,
}

impl ModelSpec {
    /// Normal or compact Hamiltonian model with Cartan-valued `a` (regular) and `c`.
    pub fn hamiltonian(
        table: Arc<AlgebraTable>,
        system: System,
        r: f64,
        a_cartan: &[f64],
        c_cartan: &[f64],
    ) -> Result<Self> {
        let form = match system {
            System::Normal => Form::Normal,
            System::Compact => Form::Compact,
            System::Chiral => {
                return Err(Error::InvalidArgument(
                    "the chiral model takes no a, c parameters".into(),
                ))
            }
        };
        if !r.is_finite() {
            return Err(Error::InvalidArgument("r is not finite".into()));
        }
        // phi_{a,c}: numerator c, regular denominator a
        let spec = make_sectional(&table, form, c_cartan, a_cartan)?;
        let a = table.cartan_element(a_cartan)?;
        let c = table.cartan_element(c_cartan)?;
        Ok(ModelSpec {
            table,
            system,
            r,
            a,
            c,
            sectional: Some(SectionalOp::Diagonal(spec)),
            parallel: false,
        })
    }

    /// Compact so(3) model on an arbitrary axis. The axis is normalized.
    pub fn so3(table: Arc<AlgebraTable>, r: f64, a: f64, c: f64, axis: [f64; 3]) -> Result<Self> {
        if table.id != AlgebraId::So3 {
            return Err(Error::AlgebraMismatch {
                expected: AlgebraId::So3,
                found: table.id,
            });
        }
        if ![r, a, c].iter().chain(&axis).all(|v| v.is_finite()) {
            return Err(Error::InvalidArgument("so3 parameters must be finite".into()));
        }
        let len = norm(&axis);
        if len == 0.0 {
            return Err(Error::InvalidArgument("axis must be nonzero".into()));
        }
        if a == 0.0 {
            return Err(Error::NotRegular {
                root: "alpha".into(),
                value: 0.0,
            });
        }
        let axis = [axis[0] / len, axis[1] / len, axis[2] / len];
        let a_elem = AlgebraElement::new(AlgebraId::So3, axis.iter().map(|v| a * v).collect());
        let c_elem = AlgebraElement::new(AlgebraId::So3, axis.iter().map(|v| c * v).collect());
        Ok(ModelSpec {
            table,
            system: System::Compact,
            r,
            a: a_elem,
            c: c_elem,
            sectional: Some(SectionalOp::Axis { ratio: c / a, axis }),
            parallel: false,
        })
    }

    pub fn chiral(table: Arc<AlgebraTable>) -> Self {
        let zero = table.zero();
        ModelSpec {
            table,
            system: System::Chiral,
            r: 0.0,
            a: zero.clone(),
            c: zero,
            sectional: None,
            parallel: false,
        }
    }

    pub fn with_parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    pub fn algebra(&self) -> AlgebraId {
        self.table.id
    }

    pub fn dim(&self) -> usize {
        self.table.dim
    }

    pub fn b(&self) -> AlgebraElement {
        self.a.scaled(self.r)
    }

    pub(crate) fn sectional_op(&self) -> Result<&SectionalOp> {
        self.sectional.as_ref().ok_or_else(|| {
            Error::InvalidArgument(format!("{} model has no sectional operator", self.system.tag()))
        })
    }

    pub(crate) fn require(&self, system: System) -> Result<()> {
        if self.system != system {
            return Err(Error::InvalidArgument(format!(
                "expected a {} model, got {}",
                system.tag(),
                self.system.tag()
            )));
        }
        Ok(())
    }

    /// `phi_{a,c}(x)`.
    pub fn phi(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; x.len()];
        self.sectional_op()?.apply_into(x, &mut out);
        Ok(out)
    }

    /// `xi = -phi(mu) + r gamma`.
    pub fn xi(&self, mu: &[f64], gamma: &[f64]) -> Result<Vec<f64>> {
        let mut xi = self.phi(mu)?;
        for (x, g) in xi.iter_mut().zip(gamma) {
            *x = -*x + self.r * g;
        }
        Ok(xi)
    }

    /// `pi = -r mu - c`, with `c` already holding the Cartan realization of `ic`
    /// in the compact case.
    pub fn pi(&self, mu: &[f64]) -> Vec<f64> {
        mu.iter()
            .zip(&self.c.coeffs)
            .map(|(m, c)| -self.r * m - c)
            .collect()
    }

    /// Unit Cartan axis and scalars for compact so(3) models.
    pub fn so3_params(&self) -> Option<So3Params> {
        if self.table.id != AlgebraId::So3 || self.system != System::Compact {
            return None;
        }
        let axis = match self.sectional.as_ref()? {
            SectionalOp::Axis { axis, .. } => *axis,
            SectionalOp::Diagonal(_) => {
                let mut e = [0.0; 3];
                e[self.table.cartan_indices[0]] = 1.0;
                e
            }
        };
        let dot = |v: &[f64]| v.iter().zip(&axis).map(|(x, y)| x * y).sum::<f64>();
        Some(So3Params {
            a: dot(&self.a.coeffs),
            c: dot(&self.c.coeffs),
            axis,
        })
    }

    pub(crate) fn check_form(&self) -> Result<()> {
        let expected = match self.system {
            System::Normal => RealForm::Normal,
            System::Compact => RealForm::Compact,
            System::Chiral => return Ok(()),
        };
        if self.table.real_form != expected {
            return Err(Error::InvalidArgument(format!(
                "{} is not realized in {} form",
                self.table.id,
                self.system.tag()
            )));
        }
        Ok(())
    }
}
