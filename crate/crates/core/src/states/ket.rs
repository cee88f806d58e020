use std::collections::BTreeMap;

use nalgebra::DVector;

use super::PartySystem;
use crate::{Error, Result, C64};

/// Sparse pure state: basis multi-index → amplitude.
#[derive(Clone, Debug, PartialEq)]
pub struct KetExpression {
    system: PartySystem,
    amplitudes: BTreeMap<Vec<usize>, C64>,
}

impl KetExpression {
    pub fn new(system: PartySystem) -> Self {
        KetExpression {
            system,
            amplitudes: BTreeMap::new(),
        }
    }

    /// Adds `amp` to the amplitude of the basis state `digits`.
    pub fn with(mut self, digits: &[usize], amp: C64) -> Result<Self> {
        if digits.len() != self.system.parties() {
            return Err(Error::DimensionMismatch(format!(
                "basis label {digits:?} has {} digits for {} parties",
                digits.len(),
                self.system.parties()
            )));
        }
        for (p, (&x, &d)) in digits.iter().zip(self.system.dims()).enumerate() {
            if x >= d {
                return Err(Error::DimensionMismatch(format!(
                    "digit {x} of party {} exceeds local dimension {d}",
                    p + 1
                )));
            }
        }
        *self.amplitudes.entry(digits.to_vec()).or_default() += amp;
        Ok(self)
    }

    pub fn from_vector(system: PartySystem, v: &DVector<C64>) -> Result<Self> {
        if v.len() != system.total() {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for total dimension {}",
                v.len(),
                system.total()
            )));
        }
        let amplitudes = v
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() > 0.0)
            .map(|(k, &a)| (system.digits(k), a))
            .collect();
        Ok(KetExpression { system, amplitudes })
    }

    pub fn system(&self) -> &PartySystem {
        &self.system
    }

    pub fn amplitudes(&self) -> &BTreeMap<Vec<usize>, C64> {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if !(n2 > 0.0 && n2.is_finite()) {
            return Err(Error::DegenerateKet);
        }
        let scale = C64::from(n2.sqrt().recip());
        Ok(KetExpression {
            system: self.system.clone(),
            amplitudes: self
                .amplitudes
                .iter()
                .map(|(k, &a)| (k.clone(), a * scale))
                .collect(),
        })
    }

    /// Dense amplitude vector in the computational basis.
    pub fn to_vector(&self) -> DVector<C64> {
        let mut v = DVector::zeros(self.system.total());
        for (digits, &a) in &self.amplitudes {
            v[self.system.flat_index(digits)] += a;
        }
        v
    }
}

/// Named pure states available to the CLI and the scans.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NamedState {
    /// `(|0…0⟩ + |1…1⟩ + … + |d−1…d−1⟩)/√d` on `n` qudits.
    Ghz { n: usize, d: usize },
    /// Equal superposition of all single excitations on `n` qubits.
    W { n: usize },
    /// The qutrit-qutrit-qubit state
    /// `(1/√5)[(|10⟩ + |21⟩)|0⟩ + (|00⟩ + |11⟩ + |22⟩)|1⟩]`.
    Example332,
}

impl NamedState {
    pub fn system(&self) -> Result<PartySystem> {
        match *self {
            NamedState::Ghz { n, d } => PartySystem::uniform(n, d),
            NamedState::W { n } => PartySystem::uniform(n, 2),
            NamedState::Example332 => PartySystem::new(vec![3, 3, 2]),
        }
    }
}

pub fn named_state(name: NamedState) -> Result<KetExpression> {
    let one = C64::from(1.0);
    let ket = match name {
        NamedState::Ghz { n, d } => {
            if n < 2 || d < 2 {
                return Err(Error::UnsupportedState(format!(
                    "GHZ needs n >= 2 parties and d >= 2 (got n = {n}, d = {d})"
                )));
            }
            (0..d).try_fold(KetExpression::new(name.system()?), |k, level| {
                k.with(&vec![level; n], one)
            })?
        }
        NamedState::W { n } => {
            if n < 3 {
                return Err(Error::UnsupportedState(format!(
                    "W needs n >= 3 qubits (got n = {n})"
                )));
            }
            (0..n).try_fold(KetExpression::new(name.system()?), |k, p| {
                let mut digits = vec![0; n];
                digits[p] = 1;
                k.with(&digits, one)
            })?
        }
        NamedState::Example332 => [[1, 0, 0], [2, 1, 0], [0, 0, 1], [1, 1, 1], [2, 2, 1]]
            .iter()
            .try_fold(KetExpression::new(name.system()?), |k, digits| {
                k.with(digits, one)
            })?,
    };
    ket.normalized()
}
