#![allow(dead_code)]

use nalgebra::ComplexField;
use num_complex::Complex64;
use qchan_core::choi::KrausChannel;
use qchan_core::linalg::{eig_hermitian, CMatrix, CVector, DensityMatrix, Dims, Hermitian};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn ginibre(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

pub fn unit_vector(d: usize, rng: &mut ChaCha8Rng) -> CVector {
    let v: CVector = ginibre(d, 1, rng).column(0).into();
    let norm = v.norm();
    v / Complex64::from_real(norm)
}

pub fn hermitian(d: usize, rng: &mut ChaCha8Rng) -> Hermitian {
    let g = ginibre(d, d, rng);
    Hermitian::symmetrized((&g + g.adjoint()) * Complex64::new(0.5, 0.0))
}

pub fn density(d: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let g = ginibre(d, d, rng);
    let p = &g * g.adjoint();
    let tr = p.trace().re;
    DensityMatrix::from_matrix(p / Complex64::from_real(tr)).expect("Ginibre state is valid")
}

/// Haar-distributed unitary via QR with the phases of `R` divided out.
pub fn unitary(d: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let qr = ginibre(d, d, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..d {
        let phase = r[(j, j)] / Complex64::from_real(r[(j, j)].norm());
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

/// `G (G†G)^{-1/2}`: an isometry with orthonormal columns.
pub fn isometry(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let g = ginibre(rows, cols, rng);
    let gram = Hermitian::symmetrized(g.adjoint() * &g);
    let eig = eig_hermitian(&gram);
    let mut inv_sqrt = CMatrix::zeros(cols, cols);
    for (i, &l) in eig.values.iter().enumerate() {
        let v = eig.vector(i);
        inv_sqrt += (&v * v.adjoint()) * Complex64::from_real(1.0 / l.sqrt());
    }
    g * inv_sqrt
}

/// Random channel from a Stinespring isometry `C^m → C^n ⊗ C^r`, with `r`
/// raised to `⌈m/n⌉` when needed.
pub fn channel(dims: Dims, kraus_rank: usize, rng: &mut ChaCha8Rng) -> KrausChannel {
    let kraus_rank = kraus_rank.max(dims.m.div_ceil(dims.n));
    let v = isometry(dims.n * kraus_rank, dims.m, rng);
    let ops = (0..kraus_rank)
        .map(|k| v.rows(k * dims.n, dims.n).into_owned())
        .collect();
    KrausChannel::new(dims, ops).expect("isometry blocks are complete")
}

/// Unit vector of Schmidt rank at most `rank`.
pub fn vector_with_schmidt_rank(dims: Dims, rank: usize, rng: &mut ChaCha8Rng) -> CVector {
    let mut v = CVector::zeros(dims.total());
    for _ in 0..rank {
        let a = unit_vector(dims.m, rng);
        let b = unit_vector(dims.n, rng);
        v += a.kronecker(&b);
    }
    let norm = v.norm();
    v / Complex64::from_real(norm)
}

/// `(1/√m) Σ_i |i⟩ ⊗ W|i⟩` for an isometry `W: C^m → C^n`, `m ≤ n`.
pub fn maximally_entangled(dims: Dims, rng: &mut ChaCha8Rng) -> CVector {
    let w = isometry(dims.n, dims.m, rng);
    let mut v = CVector::zeros(dims.total());
    let s = Complex64::from_real(1.0 / (dims.m as f64).sqrt());
    for i in 0..dims.m {
        for b in 0..dims.n {
            v[i * dims.n + b] = w[(b, i)] * s;
        }
    }
    v
}

/// `m (⟨j| ⊗ I) κ^{PT} (|i⟩ ⊗ I)` summed against the entries of `x`, with
/// the partial transpose written out index by index.
pub fn sandwich_apply(dims: Dims, kappa: &CMatrix, x: &CMatrix) -> CMatrix {
    let (m, n) = (dims.m, dims.n);
    let mut pt = CMatrix::zeros(m * n, m * n);
    for i in 0..m {
        for j in 0..m {
            for a in 0..n {
                for b in 0..n {
                    pt[(j * n + a, i * n + b)] = kappa[(i * n + a, j * n + b)];
                }
            }
        }
    }
    let mut out = CMatrix::zeros(n, n);
    for i in 0..m {
        for j in 0..m {
            let block = pt.view((j * n, i * n), (n, n));
            out += block * x[(i, j)] * Complex64::from_real(m as f64);
        }
    }
    out
}
