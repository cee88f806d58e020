//! Independent reference implementations used as test oracles. Nothing here
//! calls into the library's linear algebra beyond matrix storage.
#![allow(dead_code)]

use std::f64::consts::PI;

use gme_core::states::DensityMatrix;
use gme_core::{CMatrix, C64};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// `A_ij = Σ_m ω^{im} |m⟩⟨m + j|` straight from the definition.
pub fn weyl(d: usize, i: usize, j: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |r, c| {
        if c == (r + j) % d {
            C64::from_polar(1.0, 2.0 * PI * ((i * r) % d) as f64 / d as f64)
        } else {
            C64::default()
        }
    })
}

/// Weyl index pairs in lexicographic order without `(0, 0)`.
pub fn weyl_pairs(d: usize) -> Vec<(usize, usize)> {
    (0..d * d).skip(1).map(|f| (f / d, f % d)).collect()
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    CMatrix::from_fn(a.nrows() * b.nrows(), a.ncols() * b.ncols(), |r, c| {
        a[(r / b.nrows(), c / b.ncols())] * b[(r % b.nrows(), c % b.ncols())]
    })
}

/// `tr(ρ W†)` for the Kronecker word `W` with `word[p]` on party `p`
/// (`None` meaning identity).
pub fn word_coefficient(rho: &DensityMatrix, word: &[Option<(usize, usize)>]) -> C64 {
    let dims = rho.dims();
    let mut w = CMatrix::identity(1, 1);
    for (p, &d) in dims.iter().enumerate() {
        let factor = match word[p] {
            Some((i, j)) => weyl(d, i, j),
            None => CMatrix::identity(d, d),
        };
        w = kron(&w, &factor);
    }
    (rho.matrix() * w.adjoint()).trace()
}

/// All coefficients of the tensor on `parties` (ascending), last party fastest.
pub fn brute_tensor(rho: &DensityMatrix, parties: &[usize]) -> Vec<C64> {
    let dims = rho.dims();
    let mut words: Vec<Vec<Option<(usize, usize)>>> = vec![vec![None; dims.len()]];
    for &p in parties {
        words = words
            .into_iter()
            .flat_map(|w| {
                weyl_pairs(dims[p]).into_iter().map(move |ij| {
                    let mut w = w.clone();
                    w[p] = Some(ij);
                    w
                })
            })
            .collect();
    }
    words.iter().map(|w| word_coefficient(rho, w)).collect()
}

/// Matricization computed from brute-force coefficients: rows enumerate
/// `rows` (last fastest), columns enumerate `cols` (last fastest).
pub fn brute_matricize(rho: &DensityMatrix, rows: &[usize], cols: &[usize]) -> CMatrix {
    let dims = rho.dims();
    let enumerate = |group: &[usize]| -> Vec<Vec<(usize, (usize, usize))>> {
        let mut out = vec![vec![]];
        for &p in group {
            out = out
                .into_iter()
                .flat_map(|v: Vec<(usize, (usize, usize))>| {
                    weyl_pairs(dims[p]).into_iter().map(move |ij| {
                        let mut v = v.clone();
                        v.push((p, ij));
                        v
                    })
                })
                .collect();
        }
        out
    };
    let (r_idx, c_idx) = (enumerate(rows), enumerate(cols));
    CMatrix::from_fn(r_idx.len(), c_idx.len(), |r, c| {
        let mut word = vec![None; dims.len()];
        for &(p, ij) in r_idx[r].iter().chain(&c_idx[c]) {
            word[p] = Some(ij);
        }
        word_coefficient(rho, &word)
    })
}

/// Cyclic Jacobi eigenvalues of a real symmetric matrix.
pub fn jacobi_eigenvalues(mut a: DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)] * a[(p, q)])
            .sum();
        if off.sqrt() < 1e-14 * (1.0 + a.norm()) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|k| a[(k, k)]).collect()
}

/// `tr √(M M†)` through the real embedding `[[Re H, −Im H], [Im H, Re H]]` of
/// the smaller Gram matrix `H`, whose spectrum is that of `H` doubled.
pub fn trace_norm_oracle(m: &CMatrix) -> f64 {
    let h = if m.nrows() <= m.ncols() {
        m * m.adjoint()
    } else {
        m.adjoint() * m
    };
    let k = h.nrows();
    let emb = DMatrix::from_fn(2 * k, 2 * k, |r, c| {
        let z = h[(r % k, c % k)];
        match (r < k, c < k) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let eig = jacobi_eigenvalues(emb);
    eig.iter().map(|&l| l.max(0.0).sqrt()).sum::<f64>() / 2.0
}

pub fn random_complex_matrix(rows: usize, cols: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        C64::new(re, im)
    })
}

/// `√(d_i−1)(|α|√(d_j−1) + |β|√(d_k−1) + |γ|√𝔪)` written out directly.
pub fn tripartite_bound_oracle(di: f64, dj: f64, dk: f64, a: f64, b: f64, g: f64) -> f64 {
    let m = (dj * dk - dj / dk).min(dj * dk - dk / dj);
    (di - 1.0).sqrt() * (a.abs() * (dj - 1.0).sqrt() + b.abs() * (dk - 1.0).sqrt() + g.abs() * m.sqrt())
}

/// Largest tripartite bound over the six orderings.
pub fn tripartite_threshold_oracle(dims: [f64; 3], a: f64, b: f64, g: f64) -> f64 {
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    perms
        .iter()
        .map(|p| tripartite_bound_oracle(dims[p[0]], dims[p[1]], dims[p[2]], a, b, g))
        .fold(0.0, f64::max)
}

/// `N^{i|jk} = α[S^{i|j} 0] + β[0 S^{i|k} 0] + γ S^{i|jk}` (disjoint placement)
/// from brute-force coefficients.
pub fn tripartite_block_oracle(rho: &DensityMatrix, i: usize, j: usize, k: usize, a: f64, b: f64, g: f64) -> CMatrix {
    let mut n = brute_matricize(rho, &[i], &[j, k]) * C64::from(g);
    let sij = brute_matricize(rho, &[i], &[j]);
    let sik = brute_matricize(rho, &[i], &[k]);
    let w = sij.ncols();
    for r in 0..n.nrows() {
        for c in 0..w {
            n[(r, c)] += sij[(r, c)] * a;
        }
        for c in 0..sik.ncols() {
            n[(r, w + c)] += sik[(r, c)] * b;
        }
    }
    n
}
