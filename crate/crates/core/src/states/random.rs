use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use super::{apply_relabel, kron, relabel_map, DensityMatrix, PartySystem};
use crate::criteria::Bipartition;
use crate::{CMatrix, Result, C64};

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Normalized vector of i.i.d. complex Gaussians (Haar distributed).
fn haar_vector<R: Rng>(dim: usize, rng: &mut R) -> DVector<C64> {
    loop {
        let v = DVector::from_fn(dim, |_, _| {
            C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let norm = v.norm();
        if norm > 1e-12 {
            return v / C64::from(norm);
        }
    }
}

fn projector(v: &DVector<C64>) -> CMatrix {
    v * v.adjoint()
}

/// Uniform point on the probability simplex via normalized exponentials.
fn simplex_weights<R: Rng>(terms: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..terms).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

fn pure_with<R: Rng>(system: &PartySystem, rng: &mut R) -> DensityMatrix {
    DensityMatrix {
        system: system.clone(),
        matrix: projector(&haar_vector(system.total(), rng)),
    }
}

/// Haar-random pure state, deterministic in `seed`.
pub fn random_pure(system: &PartySystem, seed: u64) -> DensityMatrix {
    pure_with(system, &mut rng_for(seed))
}

/// Mixture of `terms` Haar-random pure states with simplex-uniform weights.
pub fn random_mixed(system: &PartySystem, terms: usize, seed: u64) -> DensityMatrix {
    let mut rng = rng_for(seed);
    let terms = terms.max(1);
    let weights = simplex_weights(terms, &mut rng);
    let dim = system.total();
    let mut matrix = CMatrix::zeros(dim, dim);
    for w in weights {
        matrix += projector(&haar_vector(dim, &mut rng)) * C64::from(w);
    }
    DensityMatrix {
        system: system.clone(),
        matrix,
    }
}

/// Explicit decomposition `Σ_s p_s ρ_s^L ⊗ ρ_s^R` of a biseparable state.
#[derive(Clone, Debug)]
pub struct BiseparableSample {
    pub bipartition: Bipartition,
    pub weights: Vec<f64>,
    /// `(left, right)` factor states, each on its side's parties in ascending order.
    pub factors: Vec<(DensityMatrix, DensityMatrix)>,
}

impl BiseparableSample {
    /// Rebuilds the full state, with parties back in their natural order.
    pub fn compose(&self, system: &PartySystem) -> Result<DensityMatrix> {
        let order: Vec<usize> = self
            .bipartition
            .left()
            .iter()
            .chain(self.bipartition.right())
            .copied()
            .collect();
        let source = system.subsystem(&order)?;
        let map = relabel_map(&source, system, &order);
        let dim = system.total();
        let mut matrix = CMatrix::zeros(dim, dim);
        for (w, (l, r)) in self.weights.iter().zip(&self.factors) {
            matrix += kron(l, r).matrix * C64::from(*w);
        }
        Ok(DensityMatrix {
            system: system.clone(),
            matrix: apply_relabel(&matrix, &map),
        })
    }
}

/// Random state separable across `bipartition`: a simplex-weighted mixture of
/// `terms` products of Haar-random pure states on either side.
pub fn random_biseparable(
    system: &PartySystem,
    bipartition: &Bipartition,
    terms: usize,
    seed: u64,
) -> Result<(DensityMatrix, BiseparableSample)> {
    bipartition.check_system(system)?;
    let mut rng = rng_for(seed);
    let terms = terms.max(1);
    let left_sys = system.subsystem(bipartition.left())?;
    let right_sys = system.subsystem(bipartition.right())?;
    let weights = simplex_weights(terms, &mut rng);
    let factors = (0..terms)
        .map(|_| (pure_with(&left_sys, &mut rng), pure_with(&right_sys, &mut rng)))
        .collect();
    let sample = BiseparableSample {
        bipartition: bipartition.clone(),
        weights,
        factors,
    };
    let rho = sample.compose(system)?;
    Ok((rho, sample))
}
