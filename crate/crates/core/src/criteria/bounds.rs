//! Closed-form upper bounds on correlation-tensor norms of product states, and
//! the detection thresholds built from them.

use serde::Serialize;

use super::{Bipartition, CriterionParams};
use crate::weyl::check_dimension;
use crate::{Error, Result};

/// A bound together with whether its dimensional hypothesis holds. The value
/// is always evaluated; it is only trustworthy when `hypothesis_ok`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundValue {
    #[serde(rename = "bound")]
    pub value: f64,
    #[serde(rename = "applicable")]
    pub hypothesis_ok: bool,
}

impl BoundValue {
    fn applicable(value: f64) -> Self {
        BoundValue {
            value,
            hypothesis_ok: true,
        }
    }
}

/// Largest `‖T^(fg)‖²` of any state on `d_f ⊗ d_g`:
/// `min{d_f d_g − d_f/d_g, d_f d_g − d_g/d_f}`.
pub fn pair_norm_bound(df: usize, dg: usize) -> Result<f64> {
    check_dimension(df)?;
    check_dimension(dg)?;
    let (f, g) = (df as f64, dg as f64);
    Ok((f * g - f / g).min(f * g - g / f))
}

/// `Π dims ≥ max(dims)²`, required by the bound on the full correlation
/// tensor of three or more parties.
pub fn product_dominates_square(dims: &[usize]) -> bool {
    let max = dims.iter().copied().max().unwrap_or(0);
    dims.iter().product::<usize>() >= max * max
}

/// Bound on `‖T^(S)‖²` for the full tensor of a `k`-party group with local
/// dimensions `dims`:
///
/// - `k = 1`: `d − 1`
/// - `k = 2`: [`pair_norm_bound`]
/// - `k ≥ 3`: `(D − D Σ/(k−1) + 1/(k−1)) + (k/(k−1) − D Σ/(k−1))/(k−2)` with
///   `Σ = Σ_s 1/d_s²`, valid when `D ≥ max(d)²`.
pub fn correlation_norm_bound(dims: &[usize]) -> Result<BoundValue> {
    for &d in dims {
        check_dimension(d)?;
    }
    match *dims {
        [] => Err(Error::EmptyPartySet),
        [d] => Ok(BoundValue::applicable(d as f64 - 1.0)),
        [f, g] => Ok(BoundValue::applicable(pair_norm_bound(f, g)?)),
        _ => {
            let k = dims.len() as f64;
            let total = dims.iter().product::<usize>() as f64;
            let inv_sq: f64 = dims.iter().map(|&d| 1.0 / (d * d) as f64).sum();
            let first = total - total * inv_sq / (k - 1.0) + 1.0 / (k - 1.0);
            let second = (k / (k - 1.0) - total * inv_sq / (k - 1.0)) / (k - 2.0);
            Ok(BoundValue {
                value: (first + second).max(0.0),
                hypothesis_ok: product_dominates_square(dims),
            })
        }
    }
}

/// Bound on `‖N^{i|jk}‖_tr` for states separable across `i|jk`, with
/// `dims = (d_i, d_j, d_k)`:
/// `√(d_i−1) (|α|√(d_j−1) + |β|√(d_k−1) + |γ|√𝔪_jk)`.
pub fn tripartite_bound(dims: [usize; 3], p: &CriterionParams) -> Result<f64> {
    let [di, dj, dk] = dims;
    let m = pair_norm_bound(dj, dk)?;
    let sq = |d: usize| (d as f64 - 1.0).sqrt();
    Ok(sq(di) * (p.alpha.abs() * sq(dj) + p.beta.abs() * sq(dk) + p.gamma.abs() * m.sqrt()))
}

const PERMUTATIONS_3: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

fn three(dims: &[usize]) -> Result<[usize; 3]> {
    dims.try_into().map_err(|_| Error::PartyCount {
        n: dims.len(),
        reason: "tripartite bounds need exactly three parties",
    })
}

/// Tripartite detection threshold: [`tripartite_bound`] maximized over all
/// six orderings of the parties.
pub fn tripartite_threshold(dims: &[usize], p: &CriterionParams) -> Result<f64> {
    let d = three(dims)?;
    PERMUTATIONS_3
        .iter()
        .map(|perm| tripartite_bound([d[perm[0]], d[perm[1]], d[perm[2]]], p))
        .try_fold(0.0f64, |acc, b| Ok(acc.max(b?)))
}

/// Bound for one tripartite bipartition `i|jk`, taken as the larger of the
/// two orientations `(i, j, k)` and `(i, k, j)` so that the bipartition bounds
/// of a report peak exactly at [`tripartite_threshold`].
pub fn tripartite_bipartition_bound(
    bip: &Bipartition,
    dims: &[usize],
    p: &CriterionParams,
) -> Result<f64> {
    let d = three(dims)?;
    let (i, j, k) = tripartite_roles(bip)?;
    Ok(tripartite_bound([d[i], d[j], d[k]], p)?.max(tripartite_bound([d[i], d[k], d[j]], p)?))
}

pub(crate) fn tripartite_roles(bip: &Bipartition) -> Result<(usize, usize, usize)> {
    match (bip.left(), bip.right()) {
        (&[i], &[j, k]) => Ok((i, j, k)),
        _ => Err(Error::InvalidBipartition(format!(
            "tripartite block matrices need a single party on the left, got {bip}"
        ))),
    }
}

fn side_hypothesis(dims: &[usize]) -> bool {
    dims.len() == 1 || product_dominates_square(dims)
}

/// Bound on `‖N^{L|R}‖_tr` for states separable across `L|R` (three or more
/// parties): `√𝔫_L (|α|√(d_c − 1) + |β|√𝔫_R)` where `c` is the column party of
/// the `α` block. Multi-party sides must satisfy `Π d ≥ max(d)²`.
pub fn bipartition_bound(bip: &Bipartition, dims: &[usize], p: &CriterionParams) -> Result<BoundValue> {
    if dims.len() < 3 || bip.parties() != dims.len() {
        return Err(Error::PartyCount {
            n: dims.len(),
            reason: "bipartition bounds need at least three parties matching the split",
        });
    }
    let side = |parties: &[usize]| parties.iter().map(|&q| dims[q]).collect::<Vec<_>>();
    let (left, right) = (side(bip.left()), side(bip.right()));
    let col = p.column_party_for(bip)?;
    let n_left = correlation_norm_bound(&left)?;
    let n_right = correlation_norm_bound(&right)?;
    let value = n_left.value.sqrt()
        * (p.alpha.abs() * (dims[col] as f64 - 1.0).sqrt() + p.beta.abs() * n_right.value.sqrt());
    Ok(BoundValue {
        value,
        hypothesis_ok: side_hypothesis(&left) && side_hypothesis(&right),
    })
}

/// Multipartite detection threshold: the largest [`bipartition_bound`] over
/// all canonical bipartitions. Inapplicable if any contributing bound is.
pub fn multipartite_threshold(dims: &[usize], p: &CriterionParams) -> Result<BoundValue> {
    let mut out = BoundValue::applicable(0.0);
    for bip in Bipartition::all_canonical(dims.len()) {
        let b = bipartition_bound(&bip, dims, p)?;
        out.value = out.value.max(b.value);
        out.hypothesis_ok &= b.hypothesis_ok;
    }
    Ok(out)
}

/// Full-tensor bound for `k` parties of equal dimension `d`, in the closed
/// form `d^k − (k/(k−2)) d^{k−2} + 2/(k−2)` for `k ≥ 3`.
fn uniform_norm_bound(d: usize, k: usize) -> f64 {
    let df = d as f64;
    match k {
        1 => df - 1.0,
        2 => df * df - 1.0,
        _ => {
            let kf = k as f64;
            df.powi(k as i32) - kf / (kf - 2.0) * df.powi(k as i32 - 2) + 2.0 / (kf - 2.0)
        }
    }
}

/// Threshold for `n ≥ 4` parties of equal dimension `d`: the largest of
/// `√𝔫_k (|α|√(d−1) + |β|√𝔫_{n−k})` over `k = 1..⌊n/2⌋`.
pub fn uniform_threshold(d: usize, n: usize, p: &CriterionParams) -> Result<f64> {
    check_dimension(d)?;
    if n < 4 {
        return Err(Error::PartyCount {
            n,
            reason: "the equal-dimension threshold needs at least four parties",
        });
    }
    let sq = |x: f64| x.sqrt();
    Ok((1..=n / 2)
        .map(|k| {
            sq(uniform_norm_bound(d, k))
                * (p.alpha.abs() * sq(d as f64 - 1.0) + p.beta.abs() * sq(uniform_norm_bound(d, n - k)))
        })
        .fold(0.0, f64::max))
}

/// [`uniform_threshold`] for a dimension list, which must be homogeneous.
pub fn uniform_threshold_for(dims: &[usize], p: &CriterionParams) -> Result<f64> {
    match dims.first() {
        Some(&d) if dims.iter().all(|&x| x == d) => uniform_threshold(d, dims.len(), p),
        Some(_) => Err(Error::DimensionMismatch(format!(
            "equal-dimension threshold needs uniform dims, got {dims:?}"
        ))),
        None => Err(Error::EmptyPartySet),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn params(alpha: f64, beta: f64, gamma: f64) -> CriterionParams {
        CriterionParams::new(alpha, beta, gamma)
    }

    #[test]
    fn pair_bound_examples() {
        assert_eq!(pair_norm_bound(2, 2).unwrap(), 3.0);
        assert_eq!(pair_norm_bound(3, 2).unwrap(), 4.5);
        assert_eq!(pair_norm_bound(2, 3).unwrap(), 4.5);
        assert_eq!(pair_norm_bound(3, 3).unwrap(), 8.0);
        assert!(pair_norm_bound(1, 3).is_err());
    }

    #[test]
    fn correlation_bound_examples() {
        let b = correlation_norm_bound(&[2, 2, 2]).unwrap();
        assert_abs_diff_eq!(b.value, 4.0, epsilon = 1e-12);
        assert!(b.hypothesis_ok);
        assert_abs_diff_eq!(correlation_norm_bound(&[2, 2, 2, 2]).unwrap().value, 9.0, epsilon = 1e-12);
        assert_eq!(correlation_norm_bound(&[3, 2]).unwrap().value, 4.5);
        assert_eq!(correlation_norm_bound(&[2]).unwrap().value, 1.0);
        assert!(matches!(correlation_norm_bound(&[]), Err(Error::EmptyPartySet)));
        // 2·2·5 < 25
        assert!(!correlation_norm_bound(&[2, 2, 5]).unwrap().hypothesis_ok);
        assert!(correlation_norm_bound(&[2, 2, 3]).unwrap().hypothesis_ok);
    }

    #[test]
    fn correlation_bound_matches_uniform_closed_form() {
        for d in 2..=5 {
            for k in 3..=7 {
                let general = correlation_norm_bound(&vec![d; k]).unwrap().value;
                assert!(
                    (general - uniform_norm_bound(d, k)).abs() <= 1e-12 * general.max(1.0),
                    "d={d} k={k}"
                );
            }
        }
    }

    #[test]
    fn tripartite_bound_examples() {
        assert_abs_diff_eq!(
            tripartite_bound([2, 2, 2], &params(1.0, 1.0, 1.0)).unwrap(),
            2.0 + 3f64.sqrt(),
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            tripartite_bound([3, 3, 2], &params(0.0, 0.0, 1.0)).unwrap(),
            3.0,
            epsilon = 1e-14
        );
        assert_eq!(tripartite_bound([3, 3, 2], &params(0.0, 0.0, 0.0)).unwrap(), 0.0);
    }

    #[test]
    fn tripartite_threshold_examples() {
        let p = params(0.7, 0.2, 1.3);
        assert_abs_diff_eq!(
            tripartite_threshold(&[2, 2, 2], &p).unwrap(),
            tripartite_bound([2, 2, 2], &p).unwrap(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            tripartite_threshold(&[3, 3, 2], &params(0.0, 0.0, 1.0)).unwrap(),
            3.0,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            tripartite_threshold(&[3, 3, 2], &params(1.0, 0.0, 0.0)).unwrap(),
            2.0,
            epsilon = 1e-14
        );
        assert!(tripartite_threshold(&[2, 2], &p).is_err());
    }

    #[test]
    fn tripartite_bipartition_bounds_peak_at_threshold() {
        let p = params(0.5, 2.0, 1.0);
        let dims = [3, 3, 2];
        let max = Bipartition::all_canonical(3)
            .iter()
            .map(|b| tripartite_bipartition_bound(b, &dims, &p).unwrap())
            .fold(0.0, f64::max);
        assert_abs_diff_eq!(max, tripartite_threshold(&dims, &p).unwrap(), epsilon = 1e-15);
    }

    #[test]
    fn bipartition_bound_examples() {
        let dims = [2, 2, 2, 2];
        let p = params(1.0, 1.0, 0.0);
        let b = bipartition_bound(&Bipartition::parse("1|234", 4).unwrap(), &dims, &p).unwrap();
        assert_abs_diff_eq!(b.value, 3.0, epsilon = 1e-14);
        assert!(b.hypothesis_ok);
        let b = bipartition_bound(&Bipartition::parse("12|34", 4).unwrap(), &dims, &p).unwrap();
        assert_abs_diff_eq!(b.value, 3f64.sqrt() * (1.0 + 3f64.sqrt()), epsilon = 1e-14);
        let b = bipartition_bound(
            &Bipartition::parse("12|34", 4).unwrap(),
            &dims,
            &params(0.0, 1.0, 0.0),
        )
        .unwrap();
        assert_abs_diff_eq!(b.value, 3.0, epsilon = 1e-14);
    }

    #[test]
    fn bipartition_bound_hypothesis() {
        // {2,3} as a two-party side: 6 < 9.
        let dims = [3, 2, 2, 2];
        let p = params(1.0, 1.0, 0.0);
        let b = bipartition_bound(&Bipartition::parse("12|34", 4).unwrap(), &dims, &p).unwrap();
        assert!(!b.hypothesis_ok);
        let b = bipartition_bound(&Bipartition::parse("1|234", 4).unwrap(), &dims, &p).unwrap();
        assert!(b.hypothesis_ok);
        assert!(!multipartite_threshold(&dims, &p).unwrap().hypothesis_ok);
    }

    #[test]
    fn uniform_threshold_examples() {
        let p = params(1.0, 1.0, 0.0);
        let j2 = uniform_threshold(2, 4, &p).unwrap();
        assert_abs_diff_eq!(j2, 3f64.sqrt() * (1.0 + 3f64.sqrt()), epsilon = 1e-12);
        assert_abs_diff_eq!(j2, 4.7321, epsilon = 1e-4);
        assert_abs_diff_eq!(
            uniform_threshold(2, 4, &params(0.0, 1.0, 0.0)).unwrap(),
            3.0,
            epsilon = 1e-12
        );
        assert!(uniform_threshold(2, 3, &p).is_err());
        assert!(uniform_threshold_for(&[2, 2, 3, 2], &p).is_err());
    }

    #[test]
    fn uniform_threshold_agrees_with_enumeration() {
        for (d, n) in [(2, 4), (2, 5), (2, 6), (3, 4), (3, 5)] {
            for p in [params(1.0, 1.0, 0.0), params(0.0, 1.0, 0.0), params(0.4, 1.7, 0.0)] {
                let dims = vec![d; n];
                let k2 = multipartite_threshold(&dims, &p).unwrap();
                let j2 = uniform_threshold(d, n, &p).unwrap();
                assert!((k2.value - j2).abs() <= 1e-10 * j2, "d={d} n={n}");
                assert!(k2.hypothesis_ok);
            }
        }
    }
}
