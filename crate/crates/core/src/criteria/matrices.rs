use nalgebra::SVD;

use super::bounds::tripartite_roles;
use super::{Bipartition, CriterionParams, Placement};
use crate::bloch::{mask_of, parties_of, BlochTensor};
use crate::{CMatrix, Error, Result, C64};

/// Offsets into a subset's flat tensor for every multi-index over `group`,
/// enumerated with the last-listed party fastest.
fn group_offsets(t: &BlochTensor, mask: usize, group: &[usize]) -> Vec<usize> {
    let dims = t.system().dims();
    let members = parties_of(mask, dims.len());
    let stride = |p: usize| -> usize {
        members
            .iter()
            .filter(|&&q| q > p)
            .map(|&q| dims[q] * dims[q] - 1)
            .product()
    };
    let mut offsets = vec![0usize];
    for &p in group {
        let s = stride(p);
        offsets = offsets
            .iter()
            .flat_map(|&o| (0..dims[p] * dims[p] - 1).map(move |a| o + a * s))
            .collect();
    }
    offsets
}

/// Flattens `T^(rows ∪ cols)` into a matrix with rows indexed by the Weyl
/// multi-indices of `rows` and columns by those of `cols`, each group
/// enumerated with its last-listed party fastest.
pub fn matricize(t: &BlochTensor, rows: &[usize], cols: &[usize]) -> Result<CMatrix> {
    if let Some(p) = rows.iter().find(|p| cols.contains(p)) {
        return Err(Error::InvalidBipartition(format!(
            "party {} is both a row and a column party",
            p + 1
        )));
    }
    let row_mask = mask_of(t.system(), rows)?;
    let col_mask = mask_of(t.system(), cols)?;
    if row_mask.count_ones() as usize != rows.len() || col_mask.count_ones() as usize != cols.len() {
        return Err(Error::InvalidBipartition("repeated party in matricization".into()));
    }
    let mask = row_mask | col_mask;
    let data = t.coeffs_by_mask(mask);
    let r_off = group_offsets(t, mask, rows);
    let c_off = group_offsets(t, mask, cols);
    Ok(CMatrix::from_fn(r_off.len(), c_off.len(), |r, c| data[r_off[r] + c_off[c]]))
}

fn add_block(target: &mut CMatrix, block: &CMatrix, col_start: usize, weight: f64) {
    if weight == 0.0 {
        return;
    }
    let w = C64::from(weight);
    let mut view = target.view_mut((0, col_start), (block.nrows(), block.ncols()));
    view += block * w;
}

/// `N^{i|jk} = α [S^{i|j} 0] + β S^{i|k} + γ S^{i|jk}` for a three-party
/// system and a bipartition `i|jk` (with `j < k`).
pub fn tripartite_block(t: &BlochTensor, bip: &Bipartition, p: &CriterionParams) -> Result<CMatrix> {
    let n = t.system().parties();
    if n != 3 {
        return Err(Error::PartyCount {
            n,
            reason: "tripartite block matrices need exactly three parties",
        });
    }
    bip.check_system(t.system())?;
    let (i, j, k) = tripartite_roles(bip)?;
    let mut out = matricize(t, &[i], &[j, k])?;
    if p.gamma != 1.0 {
        out *= C64::from(p.gamma);
    }
    let s_ij = matricize(t, &[i], &[j])?;
    let s_ik = matricize(t, &[i], &[k])?;
    add_block(&mut out, &s_ij, 0, p.alpha);
    let beta_start = match p.placement {
        Placement::Disjoint => s_ij.ncols(),
        Placement::LeadingOverlap => 0,
    };
    add_block(&mut out, &s_ik, beta_start, p.beta);
    Ok(out)
}

/// `N^{L|R} = α [S^{L|c} 0] + β S^{L|R}` for `n ≥ 3` parties and
/// `1 ≤ |L| ≤ ⌊n/2⌋`, where `c` is the column party (see
/// [`CriterionParams::column_party`]).
pub fn multipartite_block(t: &BlochTensor, bip: &Bipartition, p: &CriterionParams) -> Result<CMatrix> {
    let n = t.system().parties();
    if n < 3 {
        return Err(Error::PartyCount {
            n,
            reason: "block matrices need at least three parties",
        });
    }
    bip.check_system(t.system())?;
    if bip.left().len() > n / 2 {
        return Err(Error::InvalidBipartition(format!(
            "left side of {bip} has more than {} parties",
            n / 2
        )));
    }
    let col = p.column_party_for(bip)?;
    let mut out = matricize(t, bip.left(), bip.right())?;
    if p.beta != 1.0 {
        out *= C64::from(p.beta);
    }
    let s_lc = matricize(t, bip.left(), &[col])?;
    add_block(&mut out, &s_lc, 0, p.alpha);
    Ok(out)
}

/// The block matrix used by the verdict: tripartite form for three parties,
/// multipartite form otherwise.
pub fn block_matrix(t: &BlochTensor, bip: &Bipartition, p: &CriterionParams) -> Result<CMatrix> {
    if t.system().parties() == 3 {
        tripartite_block(t, bip, p)
    } else {
        multipartite_block(t, bip, p)
    }
}

/// Sum of singular values.
pub fn trace_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    SVD::new(m.clone(), false, false).singular_values.iter().sum()
}
