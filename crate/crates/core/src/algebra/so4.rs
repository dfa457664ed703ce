//! The decomposition so(4) = so(3) + so(3).
//!
//! The so(4) basis is chosen as the image of the two so(3) factors under
//! `(x, y) -> 1/2 [[hat(x) + hat(y), x - y], [-(x - y)^T, 0]]`, so splitting
//! is a coordinate split.

use super::{AlgebraElement, AlgebraId};
use crate::error::{Error, Result};

pub fn so4_split(x: &AlgebraElement) -> Result<(AlgebraElement, AlgebraElement)> {
    if x.algebra != AlgebraId::So4 {
        return Err(Error::AlgebraMismatch {
            expected: AlgebraId::So4,
            found: x.algebra,
        });
    }
    if x.coeffs.len() != 6 {
        return Err(Error::DimensionMismatch {
            algebra: AlgebraId::So4,
            expected: 6,
            found: x.coeffs.len(),
        });
    }
    Ok((
        AlgebraElement::new(AlgebraId::So3, x.coeffs[..3].to_vec()),
        AlgebraElement::new(AlgebraId::So3, x.coeffs[3..].to_vec()),
    ))
}

pub fn so4_join(x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
    for e in [x, y] {
        if e.algebra != AlgebraId::So3 {
            return Err(Error::AlgebraMismatch {
                expected: AlgebraId::So3,
                found: e.algebra,
            });
        }
        if e.coeffs.len() != 3 {
            return Err(Error::DimensionMismatch {
                algebra: AlgebraId::So3,
                expected: 3,
                found: e.coeffs.len(),
            });
        }
    }
    Ok(AlgebraElement::new(
        AlgebraId::So4,
        [&x.coeffs[..], &y.coeffs[..]].concat(),
    ))
}
