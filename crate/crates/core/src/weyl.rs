//! Weyl operators (the principal basis) for a `d`-level system.
//!
//! `A_ij = Σ_m ω^{i·m} E_{m, m+j}` with `ω = e^{2πi/d}` and all indices taken
//! modulo `d`. The `d² − 1` nonidentity operators are ordered lexicographically
//! on `(i, j)` with `(0, 0)` skipped, so for `d = 2` the basis is
//! `[A_01, A_10, A_11] = [X, Z, iY]`.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use crate::{CMatrix, Error, Result, C64};

/// Index pair `(i, j)` of a Weyl operator, both reduced modulo `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeylIndex {
    pub i: usize,
    pub j: usize,
}

impl WeylIndex {
    pub const IDENTITY: WeylIndex = WeylIndex { i: 0, j: 0 };

    pub fn new(i: usize, j: usize) -> Self {
        WeylIndex { i, j }
    }

    /// Position of this operator in the canonical nonidentity ordering, or
    /// `None` for the identity.
    pub fn position(self, d: usize) -> Option<usize> {
        (self.i * d + self.j).checked_sub(1)
    }

    /// Inverse of [`WeylIndex::position`].
    pub fn from_position(d: usize, pos: usize) -> Self {
        let flat = pos + 1;
        WeylIndex {
            i: flat / d,
            j: flat % d,
        }
    }

    /// Label used in coefficient dumps: `"01"`, `"10"`, … (`"i:j"` when `d > 10`).
    pub fn label(self, d: usize) -> String {
        if d > 10 {
            format!("{}:{}", self.i, self.j)
        } else {
            format!("{}{}", self.i, self.j)
        }
    }

    fn check(self, d: usize) -> Result<()> {
        if self.i >= d || self.j >= d {
            return Err(Error::WeylIndexOutOfRange {
                i: self.i,
                j: self.j,
                d,
            });
        }
        Ok(())
    }
}

impl fmt::Display for WeylIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.i, self.j)
    }
}

/// `ω^k` for `ω = e^{2πi/d}`. Quarter turns are returned exactly so that the
/// qubit operators carry no round-off.
pub fn omega_pow(d: usize, k: i64) -> C64 {
    let k = k.rem_euclid(d as i64) as usize;
    if (4 * k).is_multiple_of(d) {
        return match 4 * k / d {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        };
    }
    C64::from_polar(1.0, TAU * k as f64 / d as f64)
}

pub(crate) fn check_dimension(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    Ok(())
}

/// Dense `d × d` matrix of `A_ij`.
pub fn weyl_operator(d: usize, idx: WeylIndex) -> Result<CMatrix> {
    check_dimension(d)?;
    idx.check(d)?;
    let mut a = CMatrix::zeros(d, d);
    for m in 0..d {
        a[(m, (m + idx.j) % d)] = omega_pow(d, (idx.i * m) as i64);
    }
    Ok(a)
}

/// The ordered nonidentity Weyl operators for one local dimension.
#[derive(Clone, Debug)]
pub struct WeylBasis {
    d: usize,
    ops: Vec<CMatrix>,
}

impl WeylBasis {
    pub fn new(d: usize) -> Result<Self> {
        check_dimension(d)?;
        let ops = (0..d * d - 1)
            .map(|pos| weyl_operator(d, WeylIndex::from_position(d, pos)))
            .collect::<Result<Vec<_>>>()?;
        Ok(WeylBasis { d, ops })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn omega(&self) -> C64 {
        omega_pow(self.d, 1)
    }

    /// Number of nonidentity operators, `d² − 1`.
    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    pub fn indices(&self) -> impl Iterator<Item = WeylIndex> + '_ {
        (0..self.ops.len()).map(|p| WeylIndex::from_position(self.d, p))
    }

    pub fn identity(&self) -> CMatrix {
        CMatrix::identity(self.d, self.d)
    }

    /// Operator for any index, including the identity `A_00`.
    pub fn get(&self, idx: WeylIndex) -> Result<CMatrix> {
        idx.check(self.d)?;
        Ok(match idx.position(self.d) {
            Some(p) => self.ops[p].clone(),
            None => self.identity(),
        })
    }
}

/// Shared, lazily built basis for dimension `d`.
pub fn basis(d: usize) -> Result<Arc<WeylBasis>> {
    static CACHE: OnceLock<RwLock<HashMap<usize, Arc<WeylBasis>>>> = OnceLock::new();
    check_dimension(d)?;
    let cache = CACHE.get_or_init(Default::default);
    if let Some(b) = cache.read().expect("weyl cache poisoned").get(&d) {
        return Ok(Arc::clone(b));
    }
    let built = Arc::new(WeylBasis::new(d)?);
    let mut guard = cache.write().expect("weyl cache poisoned");
    Ok(Arc::clone(guard.entry(d).or_insert(built)))
}

/// Maximum elementwise deviations of the Weyl algebra identities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlgebraReport {
    pub dim: usize,
    /// `A_ij A_kl = ω^{jk} A_{i+k, j+l}`
    pub product_rule: f64,
    /// `A_ij† = ω^{ij} A_{−i,−j}`
    pub dagger_rule: f64,
    /// `tr(A_ij A_kl†) = d δ_ik δ_jl`
    pub orthogonality: f64,
    /// `A A† = I`
    pub unitarity: f64,
}

impl AlgebraReport {
    pub fn max_deviation(&self) -> f64 {
        self.product_rule
            .max(self.dagger_rule)
            .max(self.orthogonality)
            .max(self.unitarity)
    }
}

fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Exhaustively checks the algebra over all `d⁴` index combinations.
pub fn algebra_check(d: usize) -> Result<AlgebraReport> {
    check_dimension(d)?;
    let all: Vec<CMatrix> = (0..d * d)
        .map(|f| weyl_operator(d, WeylIndex::new(f / d, f % d)))
        .collect::<Result<_>>()?;
    let op = |i: usize, j: usize| &all[(i % d) * d + (j % d)];
    let eye = CMatrix::identity(d, d);

    let mut report = AlgebraReport {
        dim: d,
        product_rule: 0.0,
        dagger_rule: 0.0,
        orthogonality: 0.0,
        unitarity: 0.0,
    };
    for i in 0..d {
        for j in 0..d {
            let a = op(i, j);
            let a_dag = a.adjoint();

            let expected = op(d - i, d - j) * omega_pow(d, (i * j) as i64);
            report.dagger_rule = report.dagger_rule.max(max_abs_diff(&a_dag, &expected));
            report.unitarity = report.unitarity.max(max_abs_diff(&(a * &a_dag), &eye));

            for k in 0..d {
                for l in 0..d {
                    let b = op(k, l);
                    let prod = a * b;
                    let rhs = op(i + k, j + l) * omega_pow(d, (j * k) as i64);
                    report.product_rule = report.product_rule.max(max_abs_diff(&prod, &rhs));

                    let tr = (a * b.adjoint()).trace();
                    let want = if i == k && j == l { d as f64 } else { 0.0 };
                    report.orthogonality = report.orthogonality.max((tr - want).norm());
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn mat(d: usize, rows: &[&[C64]]) -> CMatrix {
        CMatrix::from_fn(d, d, |r, col| rows[r][col])
    }

    #[test]
    fn qubit_operators_are_paulis() {
        let x = weyl_operator(2, WeylIndex::new(0, 1)).unwrap();
        let z = weyl_operator(2, WeylIndex::new(1, 0)).unwrap();
        let iy = weyl_operator(2, WeylIndex::new(1, 1)).unwrap();
        let (o, l) = (c(0.0, 0.0), c(1.0, 0.0));
        assert_eq!(x, mat(2, &[&[o, l], &[l, o]]));
        assert_eq!(z, mat(2, &[&[l, o], &[o, -l]]));
        assert_eq!(iy, mat(2, &[&[o, l], &[-l, o]]));
    }

    #[test]
    fn identity_index() {
        let a = weyl_operator(3, WeylIndex::IDENTITY).unwrap();
        assert_eq!(a, CMatrix::identity(3, 3));
    }

    #[test]
    fn rejects_small_dimension() {
        assert!(matches!(
            weyl_operator(1, WeylIndex::IDENTITY),
            Err(Error::InvalidDimension(1))
        ));
        assert!(WeylBasis::new(0).is_err());
        assert!(weyl_operator(3, WeylIndex::new(3, 0)).is_err());
    }

    #[test]
    fn canonical_ordering() {
        let b = WeylBasis::new(2).unwrap();
        let labels: Vec<_> = b.indices().map(|w| w.to_string()).collect();
        assert_eq!(labels, ["01", "10", "11"]);

        let b = WeylBasis::new(3).unwrap();
        let labels: Vec<_> = b.indices().map(|w| w.to_string()).collect();
        assert_eq!(labels, ["01", "02", "10", "11", "12", "20", "21", "22"]);
        for (p, w) in b.indices().enumerate() {
            assert_eq!(w.position(3), Some(p));
        }
    }

    #[test]
    fn hilbert_schmidt_norms() {
        let b = WeylBasis::new(2).unwrap();
        for op in b.ops() {
            let n = (op * op.adjoint()).trace();
            assert!((n - c(2.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn each_operator_has_d_unit_entries() {
        for d in 2..=5 {
            let b = WeylBasis::new(d).unwrap();
            for op in b.ops() {
                let nz: Vec<_> = op.iter().filter(|z| z.norm() > 0.0).collect();
                assert_eq!(nz.len(), d);
                assert!(nz.iter().all(|z| (z.norm() - 1.0).abs() < 1e-15));
            }
        }
    }

    #[test]
    fn algebra_holds_small_dims() {
        for d in [2, 3, 5] {
            let r = algebra_check(d).unwrap();
            assert!(r.max_deviation() <= 1e-12, "{r:?}");
        }
    }

    #[test]
    fn cache_returns_shared_basis() {
        let a = basis(4).unwrap();
        let b = basis(4).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(a.len(), 15);
    }

    #[test]
    fn omega_quarter_turns_exact() {
        assert_eq!(omega_pow(2, 1), c(-1.0, 0.0));
        assert_eq!(omega_pow(4, 1), c(0.0, 1.0));
        assert_eq!(omega_pow(4, -1), c(0.0, -1.0));
        assert!((omega_pow(3, 1) - c(-0.5, 3f64.sqrt() / 2.0)).norm() < 1e-15);
    }
}
