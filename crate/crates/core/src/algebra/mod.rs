//! Basis-indexed Lie algebras with exact structure constants.
//!
//! Every catalog algebra is stored as a dense rational tensor `c[i][j][k]`
//! with `[e_i, e_j] = sum_k c[i][j][k] e_k`, a rational pairing matrix and
//! (for the semisimple members) Cartan and root data. Runtime arithmetic on
//! elements is done in `f64` from a cached list of nonzero constants.

mod catalog;
pub mod g2;
mod so4;
mod validate;

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

pub use catalog::build_algebra;
pub use so4::{so4_join, so4_split};
pub use validate::{validate_algebra, CheckResult, ValidationReport};

/// Exact scalar used for structure constants and pairings.
pub type Rational = Rational64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AlgebraId {
    So3,
    Sl2r,
    So4,
    Se3,
    G2r,
}

impl AlgebraId {
    pub const ALL: [AlgebraId; 5] = [
        AlgebraId::So3,
        AlgebraId::Sl2r,
        AlgebraId::So4,
        AlgebraId::Se3,
        AlgebraId::G2r,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            AlgebraId::So3 => "so3",
            AlgebraId::Sl2r => "sl2r",
            AlgebraId::So4 => "so4",
            AlgebraId::Se3 => "se3",
            AlgebraId::G2r => "g2r",
        }
    }

    fn valid_tags() -> String {
        Self::ALL.iter().map(|id| id.tag()).collect::<Vec<_>>().join(", ")
    }
}

impl fmt::Display for AlgebraId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for AlgebraId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|id| id.tag() == s.trim())
            .ok_or_else(|| Error::UnknownAlgebra {
                tag: s.to_string(),
                valid: Self::valid_tags(),
            })
    }
}

/// Which real form the basis realizes. Decides how root coordinates pair up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RealForm {
    /// Split form: root pairs are `(e_alpha, e_-alpha)`.
    Normal,
    /// Compact form: root pairs are the `(u_alpha, v_alpha)` coordinates.
    Compact,
    /// Not semisimple (se(3)); no Cartan or root data.
    NonSemisimple,
}

/// A positive root together with the two basis coordinates of its root plane.
///
/// `functional` evaluates the root on the coefficients of the Cartan basis
/// elements listed in [`AlgebraTable::cartan_indices`]. On the plane spanned
/// by `plus` and `minus`, `ad_h` acts as `<alpha, h>` times a fixed 2x2 matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RootPair {
    pub name: String,
    pub functional: Vec<Rational>,
    pub plus: usize,
    pub minus: usize,
}

impl RootPair {
    pub fn eval(&self, cartan: &[f64]) -> f64 {
        self.functional
            .iter()
            .zip(cartan)
            .map(|(w, x)| w.to_f64().unwrap_or(f64::NAN) * x)
            .sum()
    }
}

#[derive(Debug, Clone)]
pub struct AlgebraTable {
    pub id: AlgebraId,
    pub dim: usize,
    pub basis_labels: Vec<String>,
    pub real_form: RealForm,
    pub cartan_indices: Vec<usize>,
    pub roots: Vec<RootPair>,
    structure: Vec<Rational>,
    pairing: Vec<Rational>,
    terms: Vec<(usize, usize, usize, f64)>,
    pairing_f64: Vec<f64>,
}

impl AlgebraTable {
    /// Assemble a table from dense rational data. No validation is done here;
    /// see [`validate_algebra`].
    pub fn from_parts(
        id: AlgebraId,
        basis_labels: Vec<String>,
        real_form: RealForm,
        structure: Vec<Rational>,
        pairing: Vec<Rational>,
        cartan_indices: Vec<usize>,
        roots: Vec<RootPair>,
    ) -> Self {
        let dim = basis_labels.len();
        assert_eq!(structure.len(), dim * dim * dim, "structure tensor shape");
        assert_eq!(pairing.len(), dim * dim, "pairing matrix shape");
        let mut table = AlgebraTable {
            id,
            dim,
            basis_labels,
            real_form,
            cartan_indices,
            roots,
            structure,
            pairing,
            terms: Vec::new(),
            pairing_f64: Vec::new(),
        };
        table.refresh_cache();
        table
    }

    fn refresh_cache(&mut self) {
        let d = self.dim;
        self.terms.clear();
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let v = self.structure[(i * d + j) * d + k];
                    if !v.is_zero() {
                        self.terms.push((i, j, k, to_f64(v)));
                    }
                }
            }
        }
        self.pairing_f64 = self.pairing.iter().map(|&v| to_f64(v)).collect();
    }

    /// `c[i][j][k]`.
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> Rational {
        self.structure[(i * self.dim + j) * self.dim + k]
    }

    /// Overwrite one structure constant. Intended for building counterexamples.
    pub fn set_structure_constant(&mut self, i: usize, j: usize, k: usize, value: Rational) {
        let d = self.dim;
        self.structure[(i * d + j) * d + k] = value;
        self.refresh_cache();
    }

    /// `K[i][j]`.
    pub fn pairing_entry(&self, i: usize, j: usize) -> Rational {
        self.pairing[i * self.dim + j]
    }

    pub fn has_root_data(&self) -> bool {
        !self.roots.is_empty()
    }

    pub fn is_cartan_index(&self, i: usize) -> bool {
        self.cartan_indices.contains(&i)
    }

    pub fn zero(&self) -> AlgebraElement {
        AlgebraElement::zero(self.id, self.dim)
    }

    pub fn basis(&self, i: usize) -> AlgebraElement {
        let mut e = self.zero();
        e.coeffs[i] = 1.0;
        e
    }

    /// Element whose Cartan-basis coefficients are `cartan` and all others zero.
    pub fn cartan_element(&self, cartan: &[f64]) -> Result<AlgebraElement> {
        if cartan.len() != self.cartan_indices.len() {
            return Err(Error::InvalidArgument(format!(
                "{} has rank {}, got {} Cartan coefficients",
                self.id,
                self.cartan_indices.len(),
                cartan.len()
            )));
        }
        let mut e = self.zero();
        for (&idx, &v) in self.cartan_indices.iter().zip(cartan) {
            e.coeffs[idx] = v;
        }
        Ok(e)
    }

    pub fn cartan_coefficients(&self, x: &[f64]) -> Vec<f64> {
        self.cartan_indices.iter().map(|&i| x[i]).collect()
    }

    /// `out += [x, y]` on raw coefficient slices.
    #[inline]
    pub fn bracket_acc(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        for &(i, j, k, c) in &self.terms {
            out[k] += c * x[i] * y[j];
        }
    }

    /// `out = [x, y]` on raw coefficient slices.
    #[inline]
    pub fn bracket_into(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        self.bracket_acc(x, y, out);
    }

    pub fn bracket_slice(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.bracket_acc(x, y, &mut out);
        out
    }

    pub fn pairing_slice(&self, x: &[f64], y: &[f64]) -> f64 {
        let d = self.dim;
        let mut acc = 0.0;
        for i in 0..d {
            if x[i] == 0.0 {
                continue;
            }
            let row = &self.pairing_f64[i * d..(i + 1) * d];
            let s: f64 = row.iter().zip(y).map(|(k, v)| k * v).sum();
            acc += x[i] * s;
        }
        acc
    }

    fn check(&self, x: &AlgebraElement) -> Result<()> {
        if x.algebra != self.id {
            return Err(Error::AlgebraMismatch {
                expected: self.id,
                found: x.algebra,
            });
        }
        if x.coeffs.len() != self.dim {
            return Err(Error::DimensionMismatch {
                algebra: self.id,
                expected: self.dim,
                found: x.coeffs.len(),
            });
        }
        Ok(())
    }
}

fn to_f64(v: Rational) -> f64 {
    *v.numer() as f64 / *v.denom() as f64
}

/// Real coefficient vector over the fixed basis of one catalog algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    pub algebra: AlgebraId,
    pub coeffs: Vec<f64>,
}

impl AlgebraElement {
    pub fn new(algebra: AlgebraId, coeffs: Vec<f64>) -> Self {
        AlgebraElement { algebra, coeffs }
    }

    pub fn zero(algebra: AlgebraId, dim: usize) -> Self {
        AlgebraElement {
            algebra,
            coeffs: vec![0.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    /// Euclidean norm of the coefficient vector.
    pub fn norm(&self) -> f64 {
        norm(&self.coeffs)
    }

    pub fn scaled(&self, s: f64) -> Self {
        AlgebraElement {
            algebra: self.algebra,
            coeffs: self.coeffs.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.algebra, other.algebra);
        AlgebraElement {
            algebra: self.algebra,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scaled(-1.0))
    }
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Lie bracket `[x, y]` by structure-constant contraction.
pub fn bracket(x: &AlgebraElement, y: &AlgebraElement, tbl: &AlgebraTable) -> Result<AlgebraElement> {
    tbl.check(x)?;
    tbl.check(y)?;
    Ok(AlgebraElement::new(tbl.id, tbl.bracket_slice(&x.coeffs, &y.coeffs)))
}

/// Invariant pairing `x^T K y`.
pub fn pairing(x: &AlgebraElement, y: &AlgebraElement, tbl: &AlgebraTable) -> Result<f64> {
    tbl.check(x)?;
    tbl.check(y)?;
    Ok(tbl.pairing_slice(&x.coeffs, &y.coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tags_round_trip() {
        for id in AlgebraId::ALL {
            assert_eq!(id.tag().parse::<AlgebraId>().unwrap(), id);
        }
    }

    #[test]
    fn unknown_tag_lists_valid_tags() {
        let err = "su3".parse::<AlgebraId>().unwrap_err();
        let msg = err.to_string();
        for id in AlgebraId::ALL {
            assert!(msg.contains(id.tag()), "{msg}");
        }
    }

    #[test]
    fn so3_cross_product() {
        let t = build_algebra(AlgebraId::So3);
        let z = bracket(&t.basis(0), &t.basis(1), &t).unwrap();
        assert_eq!(z.coeffs, vec![0.0, 0.0, 1.0]);
        assert_eq!(pairing(&t.basis(0), &t.basis(0), &t).unwrap(), -2.0);
        assert_eq!(pairing(&t.basis(0), &t.basis(1), &t).unwrap(), 0.0);
    }

    #[test]
    fn sl2r_chevalley_relation() {
        let t = build_algebra(AlgebraId::Sl2r);
        // [e_a, e_-a] = h
        assert_eq!(t.structure_constant(1, 2, 0), Rational::from_integer(1));
        let h = t.basis(0);
        assert_eq!(pairing(&h, &h, &t).unwrap(), 8.0);
    }

    #[test]
    fn se3_pairing_couples_rotation_and_translation() {
        let t = build_algebra(AlgebraId::Se3);
        let omega = [0.3, -1.2, 2.0];
        let gamma = [1.5, 0.25, -0.5];
        let x = AlgebraElement::new(AlgebraId::Se3, [&omega[..], &[0.0; 3]].concat());
        let y = AlgebraElement::new(AlgebraId::Se3, [&[0.0; 3][..], &gamma[..]].concat());
        let dot: f64 = omega.iter().zip(&gamma).map(|(a, b)| a * b).sum();
        assert!((pairing(&x, &y, &t).unwrap() - dot).abs() < 1e-15);
    }

    #[test]
    fn mismatched_algebras_are_rejected() {
        let t = build_algebra(AlgebraId::So3);
        let x = build_algebra(AlgebraId::Sl2r).basis(0);
        assert!(matches!(
            bracket(&x, &t.basis(0), &t),
            Err(Error::AlgebraMismatch { .. })
        ));
        assert!(pairing(&t.basis(0), &x, &t).is_err());
        let short = AlgebraElement::new(AlgebraId::So3, vec![1.0]);
        assert!(matches!(
            bracket(&short, &t.basis(0), &t),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn bracket_of_element_with_itself_vanishes() {
        for id in AlgebraId::ALL {
            let t = build_algebra(id);
            let x: Vec<f64> = (0..t.dim).map(|i| (i as f64 * 0.7).sin() + 0.1).collect();
            let z = t.bracket_slice(&x, &x);
            assert!(norm(&z) < 1e-13, "{id}: {z:?}");
        }
    }
}
