//! Exact structural checks on an [`AlgebraTable`].

use std::fmt;

use num_traits::{Signed, Zero};

use super::{to_f64, AlgebraTable, Rational};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Largest absolute residual found (exact rational, shown as `f64`).
    pub max_residual: f64,
    /// Basis triple, pair or root where the largest residual occurred.
    pub worst: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub algebra: String,
    pub dim: usize,
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "algebra {} (dim {})", self.algebra, self.dim)?;
        for c in &self.checks {
            write!(
                f,
                "  {:<22} {}  max residual {:e}",
                c.name,
                if c.passed { "pass" } else { "FAIL" },
                c.max_residual
            )?;
            if let (false, Some(w)) = (c.passed, &c.worst) {
                write!(f, "  at {w}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

struct Worst {
    value: Rational,
    at: Option<String>,
}

impl Worst {
    fn new() -> Self {
        Worst {
            value: Rational::zero(),
            at: None,
        }
    }

    fn offer(&mut self, r: Rational, at: impl FnOnce() -> String) {
        let a = r.abs();
        if a > self.value {
            self.value = a;
            self.at = Some(at());
        }
    }

    fn finish(self, name: &'static str) -> CheckResult {
        CheckResult {
            name,
            passed: self.value.is_zero(),
            max_residual: to_f64(self.value),
            worst: self.at,
        }
    }
}

/// Sparse rows of the structure tensor: `rows[i * d + j]` lists `(k, c_ijk)`.
fn sparse_rows(t: &AlgebraTable) -> Vec<Vec<(usize, Rational)>> {
    let d = t.dim;
    let mut rows = vec![Vec::new(); d * d];
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                let v = t.structure_constant(i, j, k);
                if !v.is_zero() {
                    rows[i * d + j].push((k, v));
                }
            }
        }
    }
    rows
}

fn ad_on(rows: &[Vec<(usize, Rational)>], d: usize, i: usize, y: &[Rational], out: &mut [Rational]) {
    for (l, &yl) in y.iter().enumerate() {
        if yl.is_zero() {
            continue;
        }
        for &(m, c) in &rows[i * d + l] {
            out[m] += c * yl;
        }
    }
}

fn triple(t: &AlgebraTable, i: usize, j: usize, k: usize) -> String {
    format!("({}, {}, {})", t.basis_labels[i], t.basis_labels[j], t.basis_labels[k])
}

fn antisymmetry(t: &AlgebraTable) -> CheckResult {
    let d = t.dim;
    let mut w = Worst::new();
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                let r = t.structure_constant(i, j, k) + t.structure_constant(j, i, k);
                w.offer(r, || triple(t, i, j, k));
            }
        }
    }
    w.finish("antisymmetry")
}

fn jacobi(t: &AlgebraTable, rows: &[Vec<(usize, Rational)>]) -> CheckResult {
    let d = t.dim;
    let mut w = Worst::new();
    let unit_bracket = |a: usize, b: usize| {
        let mut v = vec![Rational::zero(); d];
        for &(k, c) in &rows[a * d + b] {
            v[k] = c;
        }
        v
    };
    let inner: Vec<Vec<Rational>> = (0..d * d).map(|ij| unit_bracket(ij / d, ij % d)).collect();
    let mut acc = vec![Rational::zero(); d];
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                acc.iter_mut().for_each(|v| *v = Rational::zero());
                ad_on(rows, d, i, &inner[j * d + k], &mut acc);
                ad_on(rows, d, j, &inner[k * d + i], &mut acc);
                ad_on(rows, d, k, &inner[i * d + j], &mut acc);
                for &v in &acc {
                    w.offer(v, || triple(t, i, j, k));
                }
            }
        }
    }
    w.finish("jacobi")
}

fn pairing_symmetry(t: &AlgebraTable) -> CheckResult {
    let d = t.dim;
    let mut w = Worst::new();
    for i in 0..d {
        for j in 0..d {
            let r = t.pairing_entry(i, j) - t.pairing_entry(j, i);
            w.offer(r, || format!("({}, {})", t.basis_labels[i], t.basis_labels[j]));
        }
    }
    w.finish("pairing symmetry")
}

/// Exact determinant by Gaussian elimination over the rationals.
pub(crate) fn determinant(t: &AlgebraTable) -> Rational {
    let d = t.dim;
    let mut m: Vec<Vec<Rational>> = (0..d)
        .map(|i| (0..d).map(|j| t.pairing_entry(i, j)).collect())
        .collect();
    let mut det = Rational::from_integer(1);
    for col in 0..d {
        let Some(p) = (col..d).find(|&r| !m[r][col].is_zero()) else {
            return Rational::zero();
        };
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        let pivot = m[col][col];
        det *= pivot;
        for r in col + 1..d {
            let f = m[r][col] / pivot;
            if f.is_zero() {
                continue;
            }
            for c in col..d {
                let v = m[col][c];
                m[r][c] -= f * v;
            }
        }
    }
    det
}

fn nondegeneracy(t: &AlgebraTable) -> CheckResult {
    let det = determinant(t);
    CheckResult {
        name: "pairing nondegenerate",
        passed: !det.is_zero(),
        max_residual: if det.is_zero() { 1.0 } else { 0.0 },
        worst: Some(format!("det K = {det}")),
    }
}

fn invariance(t: &AlgebraTable, rows: &[Vec<(usize, Rational)>]) -> CheckResult {
    let d = t.dim;
    let mut w = Worst::new();
    // K([e_i, e_j], e_k) + K(e_j, [e_i, e_k])
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                let mut r = Rational::zero();
                for &(l, c) in &rows[i * d + j] {
                    r += c * t.pairing_entry(l, k);
                }
                for &(l, c) in &rows[i * d + k] {
                    r += c * t.pairing_entry(j, l);
                }
                w.offer(r, || triple(t, i, j, k));
            }
        }
    }
    w.finish("pairing invariance")
}

fn cartan_commutativity(t: &AlgebraTable) -> CheckResult {
    let d = t.dim;
    let mut w = Worst::new();
    for &a in &t.cartan_indices {
        for &b in &t.cartan_indices {
            for k in 0..d {
                w.offer(t.structure_constant(a, b, k), || triple(t, a, b, k));
            }
        }
    }
    w.finish("cartan commutativity")
}

/// On every root plane `span{plus, minus}`, `ad_h` must stay inside the plane
/// and equal `<alpha, h>` times one fixed invertible 2x2 matrix.
fn root_decomposition(t: &AlgebraTable) -> CheckResult {
    let d = t.dim;
    let mut w = Worst::new();
    for root in &t.roots {
        let (p, q) = (root.plus, root.minus);
        let block = |h: usize| {
            [
                [t.structure_constant(h, p, p), t.structure_constant(h, q, p)],
                [t.structure_constant(h, p, q), t.structure_constant(h, q, q)],
            ]
        };
        for &h in &t.cartan_indices {
            for m in (0..d).filter(|&m| m != p && m != q) {
                w.offer(t.structure_constant(h, p, m), || format!("root {} leaks into {}", root.name, t.basis_labels[m]));
                w.offer(t.structure_constant(h, q, m), || format!("root {} leaks into {}", root.name, t.basis_labels[m]));
            }
        }
        let Some(t0) = root.functional.iter().position(|f| !f.is_zero()) else {
            w.offer(Rational::from_integer(1), || format!("root {} has zero functional", root.name));
            continue;
        };
        let b0 = block(t.cartan_indices[t0]);
        let f0 = root.functional[t0];
        let j = [[b0[0][0] / f0, b0[0][1] / f0], [b0[1][0] / f0, b0[1][1] / f0]];
        if (j[0][0] * j[1][1] - j[0][1] * j[1][0]).is_zero() {
            w.offer(Rational::from_integer(1), || format!("root {} plane is degenerate", root.name));
        }
        for (ti, &h) in t.cartan_indices.iter().enumerate() {
            let b = block(h);
            let f = root.functional[ti];
            for r in 0..2 {
                for c in 0..2 {
                    w.offer(b[r][c] - f * j[r][c], || {
                        format!("root {} against {}", root.name, t.basis_labels[h])
                    });
                }
            }
        }
    }
    w.finish("root decomposition")
}

/// Run every structural check in exact arithmetic.
pub fn validate_algebra(tbl: &AlgebraTable) -> ValidationReport {
    let rows = sparse_rows(tbl);
    ValidationReport {
        algebra: tbl.id.tag().to_string(),
        dim: tbl.dim,
        checks: vec![
            antisymmetry(tbl),
            jacobi(tbl, &rows),
            pairing_symmetry(tbl),
            nondegeneracy(tbl),
            invariance(tbl, &rows),
            cartan_commutativity(tbl),
            root_decomposition(tbl),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_algebra, AlgebraId};

    #[test]
    fn catalog_passes_exactly() {
        for id in AlgebraId::ALL {
            let report = validate_algebra(&build_algebra(id));
            assert!(report.passed(), "{report}");
            for c in &report.checks {
                assert_eq!(c.max_residual, 0.0, "{id} {}", c.name);
            }
        }
    }

    #[test]
    fn tampered_constant_breaks_jacobi() {
        let mut t = build_algebra(AlgebraId::So3);
        t.set_structure_constant(0, 1, 2, Rational::from_integer(2));
        let report = validate_algebra(&t);
        assert!(!report.passed());
        let jac = report.check("jacobi").unwrap();
        assert!(!jac.passed);
        assert!(jac.worst.is_some());
        assert!(!report.check("antisymmetry").unwrap().passed);
    }

    #[test]
    fn singular_pairing_is_flagged() {
        let t = build_algebra(AlgebraId::So3);
        let mut k = vec![Rational::zero(); 9];
        k[0] = Rational::from_integer(-2);
        let broken = AlgebraTable::from_parts(
            t.id,
            t.basis_labels.clone(),
            t.real_form,
            (0..27).map(|n| t.structure_constant(n / 9, (n / 3) % 3, n % 3)).collect(),
            k,
            t.cartan_indices.clone(),
            t.roots.clone(),
        );
        let report = validate_algebra(&broken);
        assert!(!report.check("pairing nondegenerate").unwrap().passed);
        assert!(!report.check("pairing invariance").unwrap().passed);
    }

    #[test]
    fn killing_determinants() {
        assert_eq!(determinant(&build_algebra(AlgebraId::So3)), Rational::from_integer(-8));
        assert_eq!(determinant(&build_algebra(AlgebraId::Sl2r)), Rational::from_integer(-128));
    }
}
