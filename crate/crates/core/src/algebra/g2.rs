//! Closed-form bracket and trace form of the split real form of g2.
//!
//! An element is a triple `(A, u, v)` with `A` in sl(3) and `u, v` in R^3,
//! stored as 14 coefficients
//! `(a11, a22, a12, a13, a21, a23, a31, a32, u1, u2, u3, v1, v2, v3)`;
//! `a33 = -a11 - a22` is implicit. The 7x7 realization inside so(7, C) is
//!
//! ```text
//! [ A_skew - u^/2        i v      -i (A_sym + v^/2) ]
//! [ -i v^T               0        -u^T              ]
//! [ i (A_sym - v^/2)     u        A_skew + u^/2     ]
//! ```
//!
//! The functions here are generic over the scalar so the same code produces
//! the exact rational structure constants and the `f64` cross-check.

use std::ops::Neg;

use num_traits::Num;

pub const DIM: usize = 14;

/// Basis labels in storage order.
pub const LABELS: [&str; DIM] = [
    "a11", "a22", "a12", "a13", "a21", "a23", "a31", "a32", "u1", "u2", "u3", "v1", "v2", "v3",
];

/// Coefficient index of each off-diagonal entry `A[r][c]`.
const OFF_DIAG: [((usize, usize), usize); 6] = [
    ((0, 1), 2),
    ((0, 2), 3),
    ((1, 0), 4),
    ((1, 2), 5),
    ((2, 0), 6),
    ((2, 1), 7),
];

pub trait Scalar: Num + Copy + Neg<Output = Self> {}
impl<T: Num + Copy + Neg<Output = T>> Scalar for T {}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct G2Parts<T> {
    pub a: [[T; 3]; 3],
    pub u: [T; 3],
    pub v: [T; 3],
}

impl<T: Scalar> G2Parts<T> {
    pub fn from_coeffs(c: &[T]) -> Self {
        assert_eq!(c.len(), DIM);
        let z = T::zero();
        let mut a = [[z; 3]; 3];
        a[0][0] = c[0];
        a[1][1] = c[1];
        a[2][2] = -(c[0] + c[1]);
        for ((r, col), idx) in OFF_DIAG {
            a[r][col] = c[idx];
        }
        G2Parts {
            a,
            u: [c[8], c[9], c[10]],
            v: [c[11], c[12], c[13]],
        }
    }

    /// Coefficients of a triple whose `A` block is trace free.
    pub fn to_coeffs(&self) -> Vec<T> {
        let mut c = vec![T::zero(); DIM];
        c[0] = self.a[0][0];
        c[1] = self.a[1][1];
        for ((r, col), idx) in OFF_DIAG {
            c[idx] = self.a[r][col];
        }
        c[8..11].copy_from_slice(&self.u);
        c[11..14].copy_from_slice(&self.v);
        c
    }
}

fn small<T: Scalar>(n: i32) -> T {
    let mut acc = T::zero();
    for _ in 0..n.abs() {
        acc = acc + T::one();
    }
    if n < 0 {
        -acc
    } else {
        acc
    }
}

fn cross<T: Scalar>(x: &[T; 3], y: &[T; 3]) -> [T; 3] {
    [
        x[1] * y[2] - x[2] * y[1],
        x[2] * y[0] - x[0] * y[2],
        x[0] * y[1] - x[1] * y[0],
    ]
}

fn dot<T: Scalar>(x: &[T; 3], y: &[T; 3]) -> T {
    x[0] * y[0] + x[1] * y[1] + x[2] * y[2]
}

/// Matrix with `hat(w) x = w x x`.
fn hat<T: Scalar>(w: &[T; 3]) -> [[T; 3]; 3] {
    let z = T::zero();
    [[z, -w[2], w[1]], [w[2], z, -w[0]], [-w[1], w[0], z]]
}

fn matmul<T: Scalar>(x: &[[T; 3]; 3], y: &[[T; 3]; 3]) -> [[T; 3]; 3] {
    let mut out = [[T::zero(); 3]; 3];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, entry) in row.iter_mut().enumerate() {
            *entry = x[r][0] * y[0][c] + x[r][1] * y[1][c] + x[r][2] * y[2][c];
        }
    }
    out
}

fn matvec<T: Scalar>(m: &[[T; 3]; 3], x: &[T; 3]) -> [T; 3] {
    [dot(&m[0], x), dot(&m[1], x), dot(&m[2], x)]
}

fn outer<T: Scalar>(x: &[T; 3], y: &[T; 3]) -> [[T; 3]; 3] {
    let mut out = [[T::zero(); 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            out[r][c] = x[r] * y[c];
        }
    }
    out
}

fn sym_skew<T: Scalar>(a: &[[T; 3]; 3]) -> ([[T; 3]; 3], [[T; 3]; 3]) {
    let two = small::<T>(2);
    let mut s = [[T::zero(); 3]; 3];
    let mut k = [[T::zero(); 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            s[r][c] = (a[r][c] + a[c][r]) / two;
            k[r][c] = (a[r][c] - a[c][r]) / two;
        }
    }
    (s, k)
}

fn add3<T: Scalar>(terms: &[[T; 3]]) -> [T; 3] {
    let mut out = [T::zero(); 3];
    for t in terms {
        for i in 0..3 {
            out[i] = out[i] + t[i];
        }
    }
    out
}

/// Bracket of two triples by the closed form.
pub fn bracket_parts<T: Scalar>(x: &G2Parts<T>, y: &G2Parts<T>) -> G2Parts<T> {
    let three_quarters = small::<T>(3) / small::<T>(4);
    let half = T::one() / small::<T>(2);
    let (s1, k1) = sym_skew(&x.a);
    let (s2, k2) = sym_skew(&y.a);
    let (u1, v1, u2, v2) = (&x.u, &x.v, &y.u, &y.v);

    let ab = matmul(&x.a, &y.a);
    let ba = matmul(&y.a, &x.a);
    let sym_mix = [outer(u2, v1), outer(v1, u2), outer(v2, u1), outer(u1, v2)];
    let hat_u = hat(&cross(u1, u2));
    let hat_v = hat(&cross(v1, v2));
    let trace_term = half * (dot(v2, u1) - dot(v1, u2));

    let mut a = [[T::zero(); 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            let mix = sym_mix[0][r][c] + sym_mix[1][r][c] - sym_mix[2][r][c] - sym_mix[3][r][c];
            let mut e = ab[r][c] - ba[r][c]
                + three_quarters * mix
                + three_quarters * hat_u[r][c]
                - three_quarters * hat_v[r][c];
            if r == c {
                e = e + trace_term;
            }
            a[r][c] = e;
        }
    }

    let neg = |w: [T; 3]| [-w[0], -w[1], -w[2]];
    let u = add3(&[
        cross(u1, u2),
        cross(v1, v2),
        neg(matvec(&s1, v2)),
        matvec(&k1, u2),
        matvec(&s2, v1),
        neg(matvec(&k2, u1)),
    ]);
    let v = add3(&[
        cross(u2, v1),
        cross(v2, u1),
        matvec(&k1, v2),
        neg(matvec(&s1, u2)),
        neg(matvec(&k2, v1)),
        matvec(&s2, u1),
    ]);
    G2Parts { a, u, v }
}

/// Bracket on the 14-coefficient layout.
pub fn bracket_coeffs<T: Scalar>(x: &[T], y: &[T]) -> Vec<T> {
    bracket_parts(&G2Parts::from_coeffs(x), &G2Parts::from_coeffs(y)).to_coeffs()
}

/// Trace of the product of the 7x7 realizations:
/// `-3 u1.u2 + 3 v1.v2 + 2 Tr(A1 A2)`.
pub fn trace_form<T: Scalar>(x: &[T], y: &[T]) -> T {
    let p = G2Parts::from_coeffs(x);
    let q = G2Parts::from_coeffs(y);
    let prod = matmul(&p.a, &q.a);
    let tr = prod[0][0] + prod[1][1] + prod[2][2];
    small::<T>(-3) * dot(&p.u, &q.u) + small::<T>(3) * dot(&p.v, &q.v) + small::<T>(2) * tr
}

/// Coefficients `(a11, a22)` of the Cartan element `A = diag(a1, a2 - a1, -a2)`.
pub fn cartan_from_weights(a1: f64, a2: f64) -> [f64; 2] {
    [a1, a2 - a1]
}
