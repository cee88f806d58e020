//! Density matrices on multipartite systems.
//!
//! Computational basis indices are little-endian in party order: party 0 is
//! the slowest-varying digit of a flat index, matching the written order of a
//! ket such as `|10⟩|0⟩`.

mod descriptor;
mod ket;
mod random;

pub use descriptor::{NamedSpec, StateDescriptor};
pub use ket::{named_state, KetExpression, NamedState};
pub use random::{random_biseparable, random_mixed, random_pure, BiseparableSample};

use nalgebra::SymmetricEigen;
use serde::Serialize;

use crate::weyl::check_dimension;
use crate::{CMatrix, Error, Result, C64};

pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
/// Smallest eigenvalue still accepted as positive semidefinite.
pub const PSD_TOL: f64 = -1e-9;
/// `tr ρ² ≥ 1 − PURITY_TOL` counts as pure.
pub const PURITY_TOL: f64 = 1e-8;

/// Local dimensions `(d_1, …, d_n)` of an `n`-party system.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartySystem {
    dims: Vec<usize>,
}

impl PartySystem {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::EmptyPartySet);
        }
        for &d in &dims {
            check_dimension(d)?;
        }
        Ok(PartySystem { dims })
    }

    /// `n` copies of a `d`-level system.
    pub fn uniform(n: usize, d: usize) -> Result<Self> {
        Self::new(vec![d; n])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    /// Total dimension `D = Π d_i`.
    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    /// Flat-index stride of each party.
    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.dims.len()];
        for k in (0..self.dims.len().saturating_sub(1)).rev() {
            s[k] = s[k + 1] * self.dims[k + 1];
        }
        s
    }

    pub fn is_uniform(&self) -> bool {
        self.dims.windows(2).all(|w| w[0] == w[1])
    }

    /// Subsystem formed by the listed parties, in the listed order.
    pub fn subsystem(&self, parties: &[usize]) -> Result<PartySystem> {
        for &p in parties {
            self.check_party(p)?;
        }
        PartySystem::new(parties.iter().map(|&p| self.dims[p]).collect())
    }

    pub fn check_party(&self, p: usize) -> Result<()> {
        if p >= self.dims.len() {
            return Err(Error::PartyOutOfRange {
                party: p,
                n: self.dims.len(),
            });
        }
        Ok(())
    }

    /// Flat index of a multi-index; digits are assumed in range.
    pub fn flat_index(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&x, &d)| acc * d + x)
    }

    pub fn digits(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for k in (0..self.dims.len()).rev() {
            out[k] = flat % self.dims[k];
            flat /= self.dims[k];
        }
        out
    }
}

/// A density matrix together with the party structure it lives on.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    system: PartySystem,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Wraps a matrix without checking physicality; see [`DensityMatrix::validate`].
    pub fn from_matrix(system: PartySystem, matrix: CMatrix) -> Result<Self> {
        let dim = system.total();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{} but dims {:?} need {dim}x{dim}",
                matrix.nrows(),
                matrix.ncols(),
                system.dims()
            )));
        }
        Ok(DensityMatrix { system, matrix })
    }

    pub fn maximally_mixed(system: PartySystem) -> Self {
        let dim = system.total();
        let matrix = CMatrix::identity(dim, dim) / C64::from(dim as f64);
        DensityMatrix { system, matrix }
    }

    pub fn system(&self) -> &PartySystem {
        &self.system
    }

    pub fn dims(&self) -> &[usize] {
        self.system.dims()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// `tr(ρρ†)`, equal to `tr ρ²` for Hermitian ρ.
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn is_pure(&self) -> bool {
        self.purity() >= 1.0 - PURITY_TOL
    }

    /// `x ρ + (1 − x) I/D`.
    pub fn with_white_noise(&self, x: f64) -> Result<DensityMatrix> {
        check_unit_interval("x", x)?;
        let dim = self.system.total();
        let mut matrix = &self.matrix * C64::from(x);
        let diag = C64::from((1.0 - x) / dim as f64);
        for k in 0..dim {
            matrix[(k, k)] += diag;
        }
        Ok(DensityMatrix {
            system: self.system.clone(),
            matrix,
        })
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        self.matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn validate(&self) -> ValidationReport {
        validate(self)
    }

    /// Reorders the parties so that new party `q` is old party `order[q]`.
    pub fn permute_parties(&self, order: &[usize]) -> Result<DensityMatrix> {
        let n = self.system.parties();
        let mut seen = vec![false; n];
        if order.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "permutation of length {} for {n} parties",
                order.len()
            )));
        }
        for &p in order {
            self.system.check_party(p)?;
            if std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidBipartition(format!(
                    "party {} repeated in permutation",
                    p + 1
                )));
            }
        }
        let target = self.system.subsystem(order)?;
        // Party order[q] of the source lands at position q of the target.
        let mut inverse = vec![0; n];
        for (q, &p) in order.iter().enumerate() {
            inverse[p] = q;
        }
        let map = relabel_map(&self.system, &target, &inverse);
        Ok(DensityMatrix {
            matrix: apply_relabel(&self.matrix, &map),
            system: target,
        })
    }
}

/// For each flat index of `source`, its flat index in `target` after moving
/// source party `p` to target position `dest[p]`.
pub(crate) fn relabel_map(source: &PartySystem, target: &PartySystem, dest: &[usize]) -> Vec<usize> {
    let strides = target.strides();
    (0..source.total())
        .map(|flat| {
            source
                .digits(flat)
                .iter()
                .enumerate()
                .map(|(p, &x)| x * strides[dest[p]])
                .sum()
        })
        .collect()
}

pub(crate) fn apply_relabel(m: &CMatrix, map: &[usize]) -> CMatrix {
    let dim = map.len();
    let mut out = CMatrix::zeros(dim, dim);
    for (r, &mr) in map.iter().enumerate() {
        for (c, &mc) in map.iter().enumerate() {
            out[(mr, mc)] = m[(r, c)];
        }
    }
    out
}

pub(crate) fn check_unit_interval(name: &'static str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange {
            name,
            value: x,
            lo: 0.0,
            hi: 1.0,
        });
    }
    Ok(())
}

/// `x |ψ⟩⟨ψ| + (1 − x) I/D`.
pub fn white_noise_mix(psi: &KetExpression, x: f64) -> Result<DensityMatrix> {
    check_unit_interval("x", x)?;
    from_ket(psi)?.with_white_noise(x)
}

/// `|ψ⟩⟨ψ|`, normalizing the ket first.
pub fn from_ket(ket: &KetExpression) -> Result<DensityMatrix> {
    let v = ket.normalized()?.to_vector();
    let matrix = &v * v.adjoint();
    DensityMatrix::from_matrix(ket.system().clone(), matrix)
}

/// Kronecker product; the party lists are concatenated.
pub fn kron(a: &DensityMatrix, b: &DensityMatrix) -> DensityMatrix {
    let mut dims = a.dims().to_vec();
    dims.extend_from_slice(b.dims());
    DensityMatrix {
        system: PartySystem { dims },
        matrix: a.matrix.kronecker(&b.matrix),
    }
}

/// Reduced state on `keep`. The kept parties appear in ascending order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    if keep.is_empty() {
        return Err(Error::EmptyPartySet);
    }
    let system = rho.system();
    let n = system.parties();
    let mut kept = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    for &p in &kept {
        system.check_party(p)?;
    }
    let traced: Vec<usize> = (0..n).filter(|p| !kept.contains(p)).collect();
    let strides = system.strides();

    // Offset of each kept (resp. traced) multi-index inside the full flat index.
    let offsets = |parties: &[usize]| -> Vec<usize> {
        let mut out = vec![0usize];
        for &p in parties {
            let (len, stride) = (system.dims()[p], strides[p]);
            out = out
                .iter()
                .flat_map(|&o| (0..len).map(move |x| o + x * stride))
                .collect();
        }
        out
    };
    let keep_off = offsets(&kept);
    let trace_off = offsets(&traced);

    let dim = keep_off.len();
    let m = rho.matrix();
    let reduced = CMatrix::from_fn(dim, dim, |r, c| {
        trace_off
            .iter()
            .map(|&t| m[(keep_off[r] + t, keep_off[c] + t)])
            .sum()
    });
    DensityMatrix::from_matrix(system.subsystem(&kept)?, reduced)
}

/// Outcome of checking the density-matrix invariants.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub hermiticity_deviation: f64,
    pub trace_deviation: f64,
    pub min_eigenvalue: f64,
}

impl ValidationReport {
    pub fn hermitian(&self) -> bool {
        self.hermiticity_deviation <= HERMITICITY_TOL
    }

    pub fn unit_trace(&self) -> bool {
        self.trace_deviation <= TRACE_TOL
    }

    pub fn positive(&self) -> bool {
        self.min_eigenvalue >= PSD_TOL
    }

    pub fn passed(&self) -> bool {
        self.first_violation().is_none()
    }

    /// Message naming the first failed invariant, checked in the order
    /// Hermiticity, trace, positivity.
    pub fn first_violation(&self) -> Option<String> {
        if !self.hermitian() {
            Some(format!(
                "not Hermitian: max |ρ − ρ†| = {:e} > {HERMITICITY_TOL:e}",
                self.hermiticity_deviation
            ))
        } else if !self.unit_trace() {
            Some(format!(
                "trace is not 1: |tr ρ − 1| = {:e} > {TRACE_TOL:e}",
                self.trace_deviation
            ))
        } else if !self.positive() {
            Some(format!(
                "not positive semidefinite: min eigenvalue {:e} < {PSD_TOL:e}",
                self.min_eigenvalue
            ))
        } else {
            None
        }
    }

    pub fn into_result(self) -> Result<()> {
        match self.first_violation() {
            Some(msg) => Err(Error::InvalidState(msg)),
            None => Ok(()),
        }
    }
}

pub fn validate(rho: &DensityMatrix) -> ValidationReport {
    let m = rho.matrix();
    let adj = m.adjoint();
    let hermiticity_deviation = m
        .iter()
        .zip(adj.iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let trace_deviation = (m.trace() - C64::from(1.0)).norm();
    let hermitian_part = (m + adj) * C64::from(0.5);
    let min_eigenvalue = SymmetricEigen::new(hermitian_part)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    ValidationReport {
        hermiticity_deviation,
        trace_deviation,
        min_eigenvalue,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn qubits(n: usize) -> PartySystem {
        PartySystem::uniform(n, 2).unwrap()
    }

    fn diag(system: PartySystem, entries: &[f64]) -> DensityMatrix {
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            entries.len(),
            entries.iter().map(|&x| C64::from(x)),
        ));
        DensityMatrix::from_matrix(system, m).unwrap()
    }

    #[test]
    fn party_system_rejects_bad_dims() {
        assert!(PartySystem::new(vec![]).is_err());
        assert!(PartySystem::new(vec![2, 1]).is_err());
        let s = PartySystem::new(vec![3, 3, 2]).unwrap();
        assert_eq!(s.total(), 18);
        assert_eq!(s.strides(), vec![6, 2, 1]);
        assert_eq!(s.digits(13), vec![2, 0, 1]);
        assert_eq!(s.flat_index(&[2, 0, 1]), 13);
    }

    #[test]
    fn from_matrix_checks_shape() {
        let err = DensityMatrix::from_matrix(qubits(2), CMatrix::zeros(3, 3));
        assert!(matches!(err, Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn kron_examples() {
        let mixed = DensityMatrix::maximally_mixed(qubits(1));
        let k = kron(&mixed, &mixed);
        assert_abs_diff_eq!(
            k.max_abs_diff(&DensityMatrix::maximally_mixed(qubits(2))),
            0.0
        );

        let k = kron(&diag(qubits(1), &[1.0, 0.0]), &diag(qubits(1), &[0.0, 1.0]));
        assert_eq!(k, diag(qubits(2), &[0.0, 1.0, 0.0, 0.0]));
    }

    #[test]
    fn kron_purity_multiplies() {
        let a = random_mixed(&qubits(1), 2, 3);
        let b = random_mixed(&PartySystem::new(vec![3]).unwrap(), 3, 4);
        let k = kron(&a, &b);
        assert_abs_diff_eq!(k.purity(), a.purity() * b.purity(), epsilon = 1e-12);
        assert_abs_diff_eq!(k.trace().re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn partial_trace_examples() {
        let a = random_pure(&qubits(1), 1);
        let b = random_pure(&PartySystem::new(vec![3]).unwrap(), 2);
        let ab = kron(&a, &b);
        assert!(partial_trace(&ab, &[0]).unwrap().max_abs_diff(&a) < 1e-12);
        assert!(partial_trace(&ab, &[1]).unwrap().max_abs_diff(&b) < 1e-12);

        let ghz = from_ket(&named_state(NamedState::Ghz { n: 2, d: 2 }).unwrap()).unwrap();
        let r = partial_trace(&ghz, &[0]).unwrap();
        assert!(r.max_abs_diff(&DensityMatrix::maximally_mixed(qubits(1))) < 1e-15);

        assert!(matches!(partial_trace(&ghz, &[]), Err(Error::EmptyPartySet)));
        assert!(partial_trace(&ghz, &[2]).is_err());
    }

    #[test]
    fn schmidt_symmetry_of_marginal_purities() {
        for seed in 0..20 {
            let rho = random_pure(&qubits(3), seed);
            let p1 = partial_trace(&rho, &[0]).unwrap().purity();
            let p23 = partial_trace(&rho, &[1, 2]).unwrap().purity();
            assert_abs_diff_eq!(p1, p23, epsilon = 1e-12);
        }
    }

    #[test]
    fn partial_trace_middle_party() {
        // ρ = a ⊗ b ⊗ c, trace out the middle.
        let s2 = qubits(1);
        let s3 = PartySystem::new(vec![3]).unwrap();
        let a = random_mixed(&s2, 2, 10);
        let b = random_mixed(&s3, 2, 11);
        let c = random_mixed(&s2, 2, 12);
        let abc = kron(&kron(&a, &b), &c);
        let ac = partial_trace(&abc, &[2, 0]).unwrap();
        assert!(ac.max_abs_diff(&kron(&a, &c)) < 1e-12);
        assert_eq!(ac.dims(), &[2, 2]);
    }

    #[test]
    fn permute_parties_matches_kron_order() {
        let a = random_mixed(&qubits(1), 2, 5);
        let b = random_mixed(&PartySystem::new(vec![3]).unwrap(), 2, 6);
        let ab = kron(&a, &b);
        let ba = ab.permute_parties(&[1, 0]).unwrap();
        assert_eq!(ba.dims(), &[3, 2]);
        assert!(ba.max_abs_diff(&kron(&b, &a)) < 1e-15);
        assert!(ab.permute_parties(&[0, 0]).is_err());
    }

    #[test]
    fn white_noise_endpoints() {
        let ghz = named_state(NamedState::Ghz { n: 4, d: 2 }).unwrap();
        let sys = ghz.system().clone();
        let r0 = white_noise_mix(&ghz, 0.0).unwrap();
        assert!(r0.max_abs_diff(&DensityMatrix::maximally_mixed(sys)) < 1e-16);
        let r1 = white_noise_mix(&ghz, 1.0).unwrap();
        assert!(r1.max_abs_diff(&from_ket(&ghz).unwrap()) < 1e-16);
        assert!(matches!(
            white_noise_mix(&ghz, 1.5),
            Err(Error::OutOfRange { .. })
        ));
        assert!(white_noise_mix(&ghz, -0.1).is_err());
    }

    #[test]
    fn white_noise_spectrum() {
        // Rank-one update of a scaled identity.
        let ghz = named_state(NamedState::Ghz { n: 4, d: 2 }).unwrap();
        let rho = white_noise_mix(&ghz, 0.5).unwrap();
        let mut ev: Vec<f64> = SymmetricEigen::new(rho.matrix().clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        for &e in &ev[..15] {
            assert_abs_diff_eq!(e, 0.5 / 16.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(ev[15], 0.5 + 0.5 / 16.0, epsilon = 1e-12);
    }

    #[test]
    fn validate_examples() {
        assert!(DensityMatrix::maximally_mixed(qubits(2)).validate().passed());

        let entries = [1.0, -1e-8, 1e-9, 0.0];
        let s: f64 = entries.iter().sum();
        let scaled: Vec<f64> = entries.iter().map(|x| x / s).collect();
        let report = diag(qubits(2), &scaled).validate();
        assert!(report.hermitian() && report.unit_trace());
        assert!(!report.positive());
        assert!(report.first_violation().unwrap().contains("positive"));

        let ghz = named_state(NamedState::Ghz { n: 4, d: 2 }).unwrap();
        assert!(white_noise_mix(&ghz, 0.3).unwrap().validate().passed());

        let bad_trace = diag(qubits(1), &[0.5, 0.4]).validate();
        assert!(bad_trace.first_violation().unwrap().contains("trace"));

        let mut m = CMatrix::identity(2, 2) * C64::from(0.5);
        m[(0, 1)] = C64::new(0.0, 0.1);
        let non_herm = DensityMatrix::from_matrix(qubits(1), m).unwrap().validate();
        assert!(non_herm.first_violation().unwrap().contains("Hermitian"));
    }
}
