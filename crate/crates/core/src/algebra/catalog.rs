use super::g2;
use super::{AlgebraId, AlgebraTable, Rational, RealForm, RootPair};

fn r(n: i64) -> Rational {
    Rational::from_integer(n)
}

fn labels(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn root(name: &str, functional: &[i64], plus: usize, minus: usize) -> RootPair {
    RootPair {
        name: name.to_string(),
        functional: functional.iter().map(|&v| r(v)).collect(),
        plus,
        minus,
    }
}

struct Tensor {
    dim: usize,
    c: Vec<Rational>,
}

impl Tensor {
    fn new(dim: usize) -> Self {
        Tensor {
            dim,
            c: vec![r(0); dim * dim * dim],
        }
    }

    /// Set `[e_i, e_j] = v e_k` and the antisymmetric partner.
    fn set(&mut self, i: usize, j: usize, k: usize, v: Rational) {
        let d = self.dim;
        self.c[(i * d + j) * d + k] = v;
        self.c[(j * d + i) * d + k] = -v;
    }

    /// Cross-product brackets on three consecutive basis vectors starting at `o`.
    fn cross_block(&mut self, o: usize) {
        for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            self.set(o + i, o + j, o + k, r(1));
        }
    }
}

fn diagonal(dim: usize, entries: &[i64]) -> Vec<Rational> {
    let mut k = vec![r(0); dim * dim];
    for (i, &v) in entries.iter().enumerate() {
        k[i * dim + i] = r(v);
    }
    k
}

fn so3() -> AlgebraTable {
    let mut t = Tensor::new(3);
    t.cross_block(0);
    AlgebraTable::from_parts(
        AlgebraId::So3,
        labels(&["e1", "e2", "e3"]),
        RealForm::Compact,
        t.c,
        diagonal(3, &[-2, -2, -2]),
        vec![2],
        vec![root("alpha", &[1], 0, 1)],
    )
}

fn sl2r() -> AlgebraTable {
    // h = diag(1, -1), e_a = E12, e_-a = E21.
    let mut t = Tensor::new(3);
    t.set(0, 1, 1, r(2));
    t.set(0, 2, 2, r(-2));
    t.set(1, 2, 0, r(1));
    // kappa = 4 Tr(xy): Tr(hh) = 2, Tr(e_a e_-a) = 1.
    let mut k = vec![r(0); 9];
    k[0] = r(8);
    k[1 * 3 + 2] = r(4);
    k[2 * 3 + 1] = r(4);
    AlgebraTable::from_parts(
        AlgebraId::Sl2r,
        labels(&["h", "e_a", "e_-a"]),
        RealForm::Normal,
        t.c,
        k,
        vec![0],
        vec![root("alpha", &[2], 1, 2)],
    )
}

/// so(4) in the basis `X_i = J(e_i, 0)`, `Y_i = J(0, e_i)` where
/// `J(x, y) = 1/2 [[hat(x) + hat(y), x - y], [-(x - y)^T, 0]]`.
fn so4() -> AlgebraTable {
    let mut t = Tensor::new(6);
    t.cross_block(0);
    t.cross_block(3);
    AlgebraTable::from_parts(
        AlgebraId::So4,
        labels(&["X1", "X2", "X3", "Y1", "Y2", "Y3"]),
        RealForm::Compact,
        t.c,
        diagonal(6, &[-2; 6]),
        vec![2, 5],
        vec![root("alpha_x", &[1, 0], 0, 1), root("alpha_y", &[0, 1], 3, 4)],
    )
}

/// se(3) as pairs `(Omega, Gamma)` with
/// `[(O1, G1), (O2, G2)] = (O1 x O2, O1 x G2 + G1 x O2)`.
fn se3() -> AlgebraTable {
    let mut t = Tensor::new(6);
    t.cross_block(0);
    for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        t.set(i, 3 + j, 3 + k, r(1));
        t.set(3 + i, j, 3 + k, r(1));
    }
    let mut k = vec![r(0); 36];
    for i in 0..3 {
        k[i * 6 + 3 + i] = r(1);
        k[(3 + i) * 6 + i] = r(1);
    }
    AlgebraTable::from_parts(
        AlgebraId::Se3,
        labels(&["O1", "O2", "O3", "G1", "G2", "G3"]),
        RealForm::NonSemisimple,
        t.c,
        k,
        Vec::new(),
        Vec::new(),
    )
}

fn g2r() -> AlgebraTable {
    let d = g2::DIM;
    let unit = |i: usize| {
        let mut v = vec![r(0); d];
        v[i] = r(1);
        v
    };
    let mut c = vec![r(0); d * d * d];
    let mut k = vec![r(0); d * d];
    for i in 0..d {
        for j in 0..d {
            let z = g2::bracket_coeffs(&unit(i), &unit(j));
            c[(i * d + j) * d..(i * d + j + 1) * d].copy_from_slice(&z);
            k[i * d + j] = g2::trace_form(&unit(i), &unit(j));
        }
    }
    AlgebraTable::from_parts(
        AlgebraId::G2r,
        labels(&g2::LABELS),
        RealForm::Normal,
        c,
        k,
        vec![0, 1],
        vec![
            root("a12", &[1, -1], 2, 4),
            root("a13", &[2, 1], 3, 6),
            root("a23", &[1, 2], 5, 7),
            root("uv1", &[1, 0], 8, 11),
            root("uv2", &[0, 1], 9, 12),
            root("uv3", &[1, 1], 10, 13),
        ],
    )
}

/// Build the table for one catalog algebra.
pub fn build_algebra(id: AlgebraId) -> AlgebraTable {
    match id {
        AlgebraId::So3 => so3(),
        AlgebraId::Sl2r => sl2r(),
        AlgebraId::So4 => so4(),
        AlgebraId::Se3 => se3(),
        AlgebraId::G2r => g2r(),
    }
}
