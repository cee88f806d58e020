//! Correlation-tensor (generalized Bloch) decomposition in the Weyl basis.
//!
//! Every state on `d_1 ⊗ … ⊗ d_n` expands as
//!
//! ```text
//! ρ = (1/D) (I + Σ_S Σ_a T^(S)_a · ⊗_{k∈S} A_{a_k})
//! ```
//!
//! over nonempty party subsets `S`, where `T^(S)_a = tr(ρ · ⊗_{k∈S} A_{a_k}†)`.
//! Weyl operators are not Hermitian, so the coefficients are complex and all
//! norms are `Σ |t|²`.
//!
//! Both directions are computed by contracting one party at a time. Party `k`
//! pairs its row and column digits `(r, c)` into one axis of length `d_k²`;
//! since `A_ij` is supported on `c = r + j`, the pair maps to Weyl index
//! `(i, j)` through a length-`d` discrete Fourier transform, with `(0, 0)`
//! standing for the identity.

use serde::Serialize;

use crate::states::{DensityMatrix, PartySystem};
use crate::weyl::{omega_pow, WeylIndex};
use crate::{CMatrix, Error, Result, C64};

/// Bitmask of parties; bit `k` set means party `k` belongs to the subset.
pub type SubsetMask = usize;

pub(crate) fn mask_of(system: &PartySystem, parties: &[usize]) -> Result<SubsetMask> {
    if parties.is_empty() {
        return Err(Error::EmptyPartySet);
    }
    let mut mask = 0;
    for &p in parties {
        system.check_party(p)?;
        mask |= 1 << p;
    }
    Ok(mask)
}

pub(crate) fn parties_of(mask: SubsetMask, n: usize) -> Vec<usize> {
    (0..n).filter(|k| mask & (1 << k) != 0).collect()
}

/// Coefficient tensors `T^(S)` for every nonempty party subset `S`.
///
/// The tensor of `S` is stored flat with parties in ascending order, the last
/// party fastest, each party ranging over its `d² − 1` nonidentity Weyl
/// indices in canonical order.
#[derive(Clone, Debug, PartialEq)]
pub struct BlochTensor {
    system: PartySystem,
    /// Indexed by subset mask; entry 0 (the identity component) is empty.
    coeffs: Vec<Vec<C64>>,
}

fn subset_len(system: &PartySystem, mask: SubsetMask) -> usize {
    parties_of(mask, system.parties())
        .iter()
        .map(|&p| system.dims()[p].pow(2) - 1)
        .product()
}

impl BlochTensor {
    /// All-zero coefficients: the tensor of `I/D`.
    pub fn zeros(system: PartySystem) -> Self {
        let n = system.parties();
        let coeffs = (0..1usize << n)
            .map(|mask| match mask {
                0 => Vec::new(),
                m => vec![C64::default(); subset_len(&system, m)],
            })
            .collect();
        BlochTensor { system, coeffs }
    }

    /// Assembles a tensor from explicit `(subset, flat coefficients)` pairs;
    /// unlisted subsets are zero.
    pub fn from_parts(system: PartySystem, parts: Vec<(Vec<usize>, Vec<C64>)>) -> Result<Self> {
        let mut t = BlochTensor::zeros(system);
        for (parties, values) in parts {
            let mask = mask_of(&t.system, &parties)?;
            let want = t.coeffs[mask].len();
            if values.len() != want {
                return Err(Error::DimensionMismatch(format!(
                    "subset {:?} needs {want} coefficients, got {}",
                    one_based(&parties),
                    values.len()
                )));
            }
            t.coeffs[mask] = values;
        }
        Ok(t)
    }

    pub fn system(&self) -> &PartySystem {
        &self.system
    }

    /// Flat coefficient tensor of the subset (order of `parties` is ignored).
    pub fn coeffs(&self, parties: &[usize]) -> Result<&[C64]> {
        Ok(&self.coeffs[mask_of(&self.system, parties)?])
    }

    pub(crate) fn coeffs_by_mask(&self, mask: SubsetMask) -> &[C64] {
        &self.coeffs[mask]
    }

    fn offset(&self, mask: SubsetMask, indices: &[(usize, WeylIndex)]) -> Result<usize> {
        let dims = self.system.dims();
        let parties = parties_of(mask, dims.len());
        let mut flat = 0;
        for p in parties {
            let d = dims[p];
            let idx = indices
                .iter()
                .find(|(q, _)| *q == p)
                .map(|(_, w)| *w)
                .ok_or_else(|| Error::DimensionMismatch(format!("no index for party {}", p + 1)))?;
            let pos = match idx.position(d) {
                Some(pos) if idx.i < d && idx.j < d => pos,
                _ => {
                    return Err(Error::WeylIndexOutOfRange {
                        i: idx.i,
                        j: idx.j,
                        d,
                    })
                }
            };
            flat = flat * (d * d - 1) + pos;
        }
        Ok(flat)
    }

    /// Coefficient for the given `(party, Weyl index)` assignments.
    pub fn get(&self, indices: &[(usize, WeylIndex)]) -> Result<C64> {
        let parties: Vec<usize> = indices.iter().map(|(p, _)| *p).collect();
        let mask = mask_of(&self.system, &parties)?;
        Ok(self.coeffs[mask][self.offset(mask, indices)?])
    }

    pub fn set(&mut self, indices: &[(usize, WeylIndex)], value: C64) -> Result<()> {
        let parties: Vec<usize> = indices.iter().map(|(p, _)| *p).collect();
        let mask = mask_of(&self.system, &parties)?;
        let off = self.offset(mask, indices)?;
        self.coeffs[mask][off] = value;
        Ok(())
    }

    /// `‖T^(S)‖² = Σ |t|²` over the subset's tensor.
    pub fn subset_norm_sq(&self, parties: &[usize]) -> Result<f64> {
        Ok(norm_sq(self.coeffs(parties)?))
    }

    pub(crate) fn norm_sq_by_mask(&self, mask: SubsetMask) -> f64 {
        norm_sq(&self.coeffs[mask])
    }

    /// Sector sums `A_s = Σ_{|S| = s} ‖T^(S)‖²` for `s = 1..n`.
    pub fn sector_norms(&self) -> SectorNorms {
        let n = self.system.parties();
        let mut values = vec![0.0; n];
        for mask in 1..self.coeffs.len() {
            values[mask.count_ones() as usize - 1] += self.norm_sq_by_mask(mask);
        }
        SectorNorms { values }
    }

    /// Every coefficient with modulus above `cutoff`, subsets in mask order.
    pub fn records(&self, cutoff: f64) -> Vec<CoefficientRecord> {
        let dims = self.system.dims();
        let n = dims.len();
        let mut out = Vec::new();
        for mask in 1..self.coeffs.len() {
            let parties = parties_of(mask, n);
            let shape: Vec<usize> = parties.iter().map(|&p| dims[p] * dims[p] - 1).collect();
            for (flat, &value) in self.coeffs[mask].iter().enumerate() {
                if value.norm() <= cutoff {
                    continue;
                }
                let mut rem = flat;
                let mut labels = vec![String::new(); parties.len()];
                for k in (0..parties.len()).rev() {
                    let d = dims[parties[k]];
                    labels[k] = WeylIndex::from_position(d, rem % shape[k]).label(d);
                    rem /= shape[k];
                }
                out.push(CoefficientRecord {
                    subset: one_based(&parties),
                    indices: labels.join(","),
                    re: value.re,
                    im: value.im,
                });
            }
        }
        out
    }
}

fn norm_sq(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

fn one_based(parties: &[usize]) -> Vec<usize> {
    parties.iter().map(|p| p + 1).collect()
}

/// One nonzero coefficient, as emitted by the `tensor` command.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoefficientRecord {
    /// 1-based party labels.
    pub subset: Vec<usize>,
    /// Comma-separated Weyl labels, one per party in `subset`.
    pub indices: String,
    pub re: f64,
    pub im: f64,
}

/// `A_1, …, A_n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SectorNorms {
    pub values: Vec<f64>,
}

impl SectorNorms {
    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// Applies `f` to every fiber along `axis` of a row-major tensor.
fn map_axis<F>(data: &mut [C64], shape: &[usize], axis: usize, mut f: F)
where
    F: FnMut(&[C64], &mut [C64]),
{
    let len = shape[axis];
    let inner: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let mut fiber = vec![C64::default(); len];
    let mut out = vec![C64::default(); len];
    for o in 0..outer {
        let base = o * len * inner;
        for t in 0..inner {
            for (l, x) in fiber.iter_mut().enumerate() {
                *x = data[base + l * inner + t];
            }
            f(&fiber, &mut out);
            for (l, x) in out.iter().enumerate() {
                data[base + l * inner + t] = *x;
            }
        }
    }
}

/// Phase table `ω^{sign·i·r}` indexed `[i * d + r]`.
fn phases(d: usize, sign: i64) -> Vec<C64> {
    (0..d * d)
        .map(|k| omega_pow(d, sign * ((k / d) * (k % d)) as i64))
        .collect()
}

/// Full extended tensor `E[a_1, …, a_n]` with `a_k ∈ 0..d_k²` and `0` the
/// identity, so `E[0, …, 0] = tr ρ`.
fn extended_coefficients(rho: &DensityMatrix) -> Vec<C64> {
    let system = rho.system();
    let dims = system.dims();
    let shape: Vec<usize> = dims.iter().map(|d| d * d).collect();
    let dim = system.total();
    let m = rho.matrix();

    // Interleave row and column digits party by party.
    let mut data = vec![C64::default(); dim * dim];
    let row_digits: Vec<Vec<usize>> = (0..dim).map(|k| system.digits(k)).collect();
    for r in 0..dim {
        for c in 0..dim {
            let flat = row_digits[r]
                .iter()
                .zip(&row_digits[c])
                .zip(dims)
                .fold(0, |acc, ((&x, &y), &d)| acc * d * d + x * d + y);
            data[flat] = m[(r, c)];
        }
    }

    for (axis, &d) in dims.iter().enumerate() {
        let ph = phases(d, -1);
        map_axis(&mut data, &shape, axis, |pairs, out| {
            for i in 0..d {
                for j in 0..d {
                    out[i * d + j] = (0..d)
                        .map(|r| ph[i * d + r] * pairs[r * d + (r + j) % d])
                        .sum();
                }
            }
        });
    }
    data
}

/// Correlation tensor of `rho`.
pub fn decompose(rho: &DensityMatrix) -> BlochTensor {
    let system = rho.system().clone();
    let dims = system.dims().to_vec();
    let n = dims.len();
    let ext = extended_coefficients(rho);
    let shape: Vec<usize> = dims.iter().map(|d| d * d).collect();
    let mut strides = vec![1; n];
    for k in (0..n.saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * shape[k + 1];
    }

    let mut coeffs = vec![Vec::new(); 1 << n];
    for (mask, slot) in coeffs.iter_mut().enumerate().skip(1) {
        let parties = parties_of(mask, n);
        // Extended offsets of each subset coefficient, parties in order.
        let mut offsets = vec![0usize];
        for &p in &parties {
            let (len, stride) = (shape[p], strides[p]);
            offsets = offsets
                .iter()
                .flat_map(|&o| (1..len).map(move |a| o + a * stride))
                .collect();
        }
        *slot = offsets.into_iter().map(|o| ext[o]).collect();
    }
    BlochTensor { system, coeffs }
}

/// Inverse of [`decompose`]: `ρ = (1/D)(I + Σ_S T^(S)·A^(S))`.
pub fn reconstruct(t: &BlochTensor) -> DensityMatrix {
    let system = t.system();
    let dims = system.dims();
    let n = dims.len();
    let shape: Vec<usize> = dims.iter().map(|d| d * d).collect();
    let mut strides = vec![1; n];
    for k in (0..n.saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * shape[k + 1];
    }
    let dim = system.total();
    let mut data = vec![C64::default(); dim * dim];
    data[0] = C64::from(1.0);
    for mask in 1..t.coeffs.len() {
        let parties = parties_of(mask, n);
        let mut offsets = vec![0usize];
        for &p in &parties {
            let (len, stride) = (shape[p], strides[p]);
            offsets = offsets
                .iter()
                .flat_map(|&o| (1..len).map(move |a| o + a * stride))
                .collect();
        }
        for (o, &v) in offsets.into_iter().zip(&t.coeffs[mask]) {
            data[o] = v;
        }
    }

    for (axis, &d) in dims.iter().enumerate() {
        let ph = phases(d, 1);
        map_axis(&mut data, &shape, axis, |weyl, out| {
            for r in 0..d {
                for j in 0..d {
                    out[r * d + (r + j) % d] = (0..d).map(|i| ph[i * d + r] * weyl[i * d + j]).sum();
                }
            }
        });
    }

    let scale = 1.0 / dim as f64;
    let digits: Vec<Vec<usize>> = (0..dim).map(|k| system.digits(k)).collect();
    let m = CMatrix::from_fn(dim, dim, |r, c| {
        let flat = digits[r]
            .iter()
            .zip(&digits[c])
            .zip(dims)
            .fold(0, |acc, ((&x, &y), &d)| acc * d * d + x * d + y);
        data[flat] * scale
    });
    DensityMatrix::from_matrix(system.clone(), m).expect("reconstructed shape matches system")
}

/// `|tr ρ² − (1 + Σ_s A_s)/D|`; vanishes for every state by orthogonality.
pub fn purity_identity_residual(rho: &DensityMatrix) -> f64 {
    let sectors = decompose(rho).sector_norms();
    let predicted = (1.0 + sectors.total()) / rho.system().total() as f64;
    (rho.purity() - predicted).abs()
}

/// For a pure state, the purity of the marginal on `party` equals that of its
/// complement. Returns the difference of the two Bloch-side expressions
/// `(1/d_p)(1 + ‖T^(p)‖²)` and `(d_p/D)(1 + Σ_{S ⊆ rest} ‖T^(S)‖²)`.
pub fn marginal_identity_residual(rho: &DensityMatrix, party: usize) -> Result<f64> {
    let system = rho.system();
    system.check_party(party)?;
    if system.parties() < 2 {
        return Err(Error::PartyCount {
            n: 1,
            reason: "marginal identity needs at least two parties",
        });
    }
    let purity = rho.purity();
    if !rho.is_pure() {
        return Err(Error::NotPure(purity));
    }
    let t = decompose(rho);
    let n = system.parties();
    let dp = system.dims()[party] as f64;
    let dim = system.total() as f64;
    let single = (1.0 + t.norm_sq_by_mask(1 << party)) / dp;
    let rest_mask = ((1 << n) - 1) & !(1 << party);
    let rest: f64 = (1..1usize << n)
        .filter(|m| m & !rest_mask == 0)
        .map(|m| t.norm_sq_by_mask(m))
        .sum();
    let complement = (1.0 + rest) * dp / dim;
    Ok((single - complement).abs())
}
