use rayon::prelude::*;
use serde::Serialize;

use super::bounds::{
    bipartition_bound, tripartite_bipartition_bound, tripartite_bound, tripartite_roles,
    tripartite_threshold, BoundValue,
};
use super::matrices::{block_matrix, trace_norm};
use super::{Bipartition, CriterionParams};
use crate::bloch::{decompose, BlochTensor};
use crate::states::{random_biseparable, DensityMatrix, PartySystem};
use crate::{Error, Result};

/// Caveat attached to every report: detection assumes the state
/// is symmetrically coherent, which cannot be decided from `ρ` alone.
pub const STANDING_ASSUMPTION: &str = "detection assumes the state is symmetrically coherent \
(biseparable decompositions obey N(rho_i) <= N(rho)); this is not checkable from rho alone";

const ONE_SIDED: &str =
    "the criterion is one-sided: a negative result does not certify biseparability";

const SYMMETRY_TOL: f64 = 1e-10;
const SAMPLE_TOL: f64 = 1e-8;

fn check_party_count(n: usize) -> Result<()> {
    if (3..=6).contains(&n) {
        Ok(())
    } else {
        Err(Error::PartyCount {
            n,
            reason: "the criterion is implemented for 3 to 6 parties",
        })
    }
}

/// `params` with a column-party override dropped for bipartitions whose right
/// side does not contain it.
fn params_for(bip: &Bipartition, p: &CriterionParams) -> CriterionParams {
    match p.column_party {
        Some(c) if !bip.right().contains(&c) => CriterionParams {
            column_party: None,
            ..*p
        },
        _ => *p,
    }
}

fn bound_for(bip: &Bipartition, dims: &[usize], p: &CriterionParams) -> Result<BoundValue> {
    if dims.len() == 3 {
        Ok(BoundValue {
            value: tripartite_bipartition_bound(bip, dims, p)?,
            hypothesis_ok: true,
        })
    } else {
        bipartition_bound(bip, dims, p)
    }
}

/// One row of a report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BipartitionRecord {
    #[serde(flatten)]
    pub bipartition: Bipartition,
    pub trace_norm: f64,
    #[serde(flatten)]
    pub bound: BoundValue,
}

/// `T(ρ)` (the smallest block-matrix trace norm over canonical bipartitions)
/// together with every bipartition's norm and bound, in enumeration order.
pub fn t_score_from_tensor(t: &BlochTensor, p: &CriterionParams) -> Result<(f64, Vec<BipartitionRecord>)> {
    let dims = t.system().dims();
    check_party_count(dims.len())?;
    let records = Bipartition::all_canonical(dims.len())
        .into_par_iter()
        .map(|bip| {
            let q = params_for(&bip, p);
            let norm = trace_norm(&block_matrix(t, &bip, &q)?);
            let bound = bound_for(&bip, dims, &q)?;
            Ok(BipartitionRecord {
                bipartition: bip,
                trace_norm: norm,
                bound,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let score = records
        .iter()
        .map(|r| r.trace_norm)
        .fold(f64::INFINITY, f64::min);
    Ok((score, records))
}

pub fn t_score(rho: &DensityMatrix, p: &CriterionParams) -> Result<(f64, Vec<BipartitionRecord>)> {
    t_score_from_tensor(&decompose(rho), p)
}

/// Outcome of the GME test.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionReport {
    #[serde(rename = "bipartitions")]
    pub records: Vec<BipartitionRecord>,
    #[serde(rename = "T")]
    pub t_score: f64,
    #[serde(rename = "K")]
    pub k_threshold: f64,
    pub detected: bool,
    /// Some bound's dimensional hypothesis failed, so a negative result says
    /// nothing and a positive one is withheld.
    pub inconclusive: bool,
    pub caveats: Vec<String>,
}

fn permutation_symmetric(rho: &DensityMatrix) -> Result<bool> {
    let n = rho.system().parties();
    for a in 0..n - 1 {
        let mut order: Vec<usize> = (0..n).collect();
        order.swap(a, a + 1);
        if rho.permute_parties(&order)?.max_abs_diff(rho) > SYMMETRY_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

fn report(
    t: &BlochTensor,
    p: &CriterionParams,
    symmetric: Option<bool>,
) -> Result<CriterionReport> {
    let dims = t.system().dims();
    let (score, records) = t_score_from_tensor(t, p)?;
    let k = if dims.len() == 3 {
        tripartite_threshold(dims, p)?
    } else {
        records.iter().map(|r| r.bound.value).fold(0.0, f64::max)
    };
    let inapplicable: Vec<String> = records
        .iter()
        .filter(|r| !r.bound.hypothesis_ok)
        .map(|r| r.bipartition.to_string())
        .collect();
    let inconclusive = !inapplicable.is_empty();

    let mut caveats = vec![STANDING_ASSUMPTION.to_string(), ONE_SIDED.to_string()];
    match symmetric {
        Some(true) => caveats.push(
            "permutation-symmetry proxy: state is invariant under all party permutations".into(),
        ),
        Some(false) => caveats.push(
            "permutation-symmetry proxy: state is not invariant under party permutations".into(),
        ),
        None => {}
    }
    if inconclusive {
        caveats.push(format!(
            "bound hypothesis fails for {}; verdict is inconclusive",
            inapplicable.join(", ")
        ));
    }
    Ok(CriterionReport {
        records,
        t_score: score,
        k_threshold: k,
        detected: !inconclusive && score > k,
        inconclusive,
        caveats,
    })
}

/// Runs the test on an already decomposed state. The permutation-symmetry
/// proxy needs the density matrix and is omitted here.
pub fn gme_verdict_from_tensor(t: &BlochTensor, p: &CriterionParams) -> Result<CriterionReport> {
    report(t, p, None)
}

/// GME test: detected when `T(ρ)` strictly exceeds the threshold (the
/// six-ordering tripartite maximum for three parties, the largest
/// bipartition bound otherwise).
pub fn gme_verdict(rho: &DensityMatrix, p: &CriterionParams) -> Result<CriterionReport> {
    check_party_count(rho.system().parties())?;
    let symmetric = if rho.system().is_uniform() {
        Some(permutation_symmetric(rho)?)
    } else {
        None
    };
    report(&decompose(rho), p, symmetric)
}

/// Result of sampling biseparable states against one bipartition's bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundCheck {
    pub bipartition: Bipartition,
    pub samples: usize,
    pub violations: usize,
    /// Largest `‖N‖_tr − bound` seen (negative when every sample is inside).
    pub max_excess: f64,
    pub max_norm: f64,
    pub bound: f64,
    /// Set when the bound's hypothesis fails; nothing is sampled.
    pub skipped: bool,
}

/// Draws `samples` random states separable across `bip` and counts those
/// whose block-matrix trace norm exceeds the bound by more than `1e-8`.
///
/// Three parties use the exact orientation `(i, j, k)` of `bip = i|jk`;
/// more parties use [`bipartition_bound`].
pub fn biseparable_bound_check(
    system: &PartySystem,
    bip: &Bipartition,
    p: &CriterionParams,
    samples: usize,
    seed: u64,
) -> Result<BoundCheck> {
    let dims = system.dims();
    check_party_count(dims.len())?;
    bip.check_system(system)?;
    let bound = if dims.len() == 3 {
        let (i, j, k) = tripartite_roles(bip)?;
        BoundValue {
            value: tripartite_bound([dims[i], dims[j], dims[k]], p)?,
            hypothesis_ok: true,
        }
    } else {
        bipartition_bound(bip, dims, p)?
    };
    let mut out = BoundCheck {
        bipartition: bip.clone(),
        samples,
        violations: 0,
        max_excess: f64::NEG_INFINITY,
        max_norm: 0.0,
        bound: bound.value,
        skipped: !bound.hypothesis_ok,
    };
    if out.skipped {
        out.samples = 0;
        return Ok(out);
    }
    let norms = (0..samples)
        .into_par_iter()
        .map(|s| {
            let terms = 1 + s % 4;
            let sample_seed = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(s as u64);
            let (rho, _) = random_biseparable(system, bip, terms, sample_seed)?;
            Ok(trace_norm(&block_matrix(&decompose(&rho), bip, p)?))
        })
        .collect::<Result<Vec<f64>>>()?;
    for norm in norms {
        out.max_norm = out.max_norm.max(norm);
        out.max_excess = out.max_excess.max(norm - bound.value);
        if norm > bound.value + SAMPLE_TOL {
            out.violations += 1;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{from_ket, named_state, white_noise_mix, NamedState};
    use approx::assert_abs_diff_eq;

    fn ghz4(x: f64) -> DensityMatrix {
        white_noise_mix(&named_state(NamedState::Ghz { n: 4, d: 2 }).unwrap(), x).unwrap()
    }

    #[test]
    fn maximally_mixed_is_not_detected() {
        for dims in [vec![2, 2, 2], vec![3, 3, 2], vec![2, 2, 2, 2]] {
            let rho = DensityMatrix::maximally_mixed(PartySystem::new(dims).unwrap());
            let r = gme_verdict(&rho, &CriterionParams::default()).unwrap();
            assert!(r.t_score < 1e-14);
            assert!(!r.detected);
        }
    }

    #[test]
    fn ghz4_scores() {
        let p = CriterionParams::new(1.0, 1.0, 0.0);
        for x in [0.3, 0.7, 1.0] {
            let (score, records) = t_score(&ghz4(x), &p).unwrap();
            assert_eq!(records.len(), 7);
            assert_abs_diff_eq!(score, 5.0 * x, epsilon = 1e-9);
            assert_abs_diff_eq!(records[0].trace_norm, (4.0 + 2f64.sqrt()) * x, epsilon = 1e-9);
            assert_abs_diff_eq!(records[0].bound.value, 3.0, epsilon = 1e-12);
        }
        let r = gme_verdict(&ghz4(0.95), &p).unwrap();
        assert!(r.detected && !r.inconclusive);
        assert_abs_diff_eq!(r.k_threshold, 3f64.sqrt() * (1.0 + 3f64.sqrt()), epsilon = 1e-12);
        assert!(r.caveats[2].contains("is invariant"));
        assert!(!gme_verdict(&ghz4(0.94), &p).unwrap().detected);
    }

    #[test]
    fn example_332_detected_above_threshold() {
        let psi = named_state(NamedState::Example332).unwrap();
        let p = CriterionParams::new(0.0, 0.0, 1.0);
        let at = |x| gme_verdict(&white_noise_mix(&psi, x).unwrap(), &p).unwrap();
        assert!(at(0.52).detected);
        assert!(!at(0.5).detected);
        assert_eq!(at(0.52).k_threshold, 3.0);
        assert_eq!(at(0.52).caveats.len(), 2);
    }

    #[test]
    fn inapplicable_bound_makes_report_inconclusive() {
        // Side (3,2) of 12|34 has D = 6 < 9.
        let sys = PartySystem::new(vec![3, 2, 2, 2]).unwrap();
        let rho = DensityMatrix::maximally_mixed(sys);
        let r = gme_verdict(&rho, &CriterionParams::new(1.0, 1.0, 0.0)).unwrap();
        assert!(r.inconclusive && !r.detected);
        assert!(r.caveats.iter().any(|c| c.contains("12|34")));
    }

    #[test]
    fn column_override_only_where_valid() {
        let rho = from_ket(&named_state(NamedState::W { n: 4 }).unwrap()).unwrap();
        let p = CriterionParams::new(1.0, 1.0, 0.0).with_column_party(3);
        assert_eq!(gme_verdict(&rho, &p).unwrap().records.len(), 7);
    }

    #[test]
    fn party_count_limits() {
        let rho = DensityMatrix::maximally_mixed(PartySystem::uniform(2, 2).unwrap());
        assert!(gme_verdict(&rho, &CriterionParams::default()).is_err());
        let rho = DensityMatrix::maximally_mixed(PartySystem::uniform(7, 2).unwrap());
        assert!(t_score(&rho, &CriterionParams::default()).is_err());
    }

    #[test]
    fn report_json_shape() {
        let r = gme_verdict(&ghz4(1.0), &CriterionParams::new(1.0, 1.0, 0.0)).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        let first = &v["bipartitions"][0];
        assert_eq!(first["left"], serde_json::json!([1]));
        assert_eq!(first["right"], serde_json::json!([2, 3, 4]));
        assert_eq!(first["applicable"], true);
        assert!(first["bound"].is_number() && first["trace_norm"].is_number());
        assert!(v["T"].is_number() && v["K"].is_number());
        assert_eq!(v["detected"], true);
    }

    #[test]
    fn bound_check_small_run() {
        let sys = PartySystem::uniform(3, 2).unwrap();
        let bip = Bipartition::parse("1|23", 3).unwrap();
        let c = biseparable_bound_check(&sys, &bip, &CriterionParams::default(), 50, 3).unwrap();
        assert_eq!(c.violations, 0);
        assert!(!c.skipped && c.max_norm > 0.0 && c.max_excess <= 0.0);
    }
}
