//! Seeded random unitaries, isometries, block-structured algebras and
//! channels for experiments and tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linops::{c, identity, tensor, zeros, ComplexMatrix, OperatorSubspace, Tolerance};
use crate::linops::{matrix_unit, span};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Matrix of independent standard complex Gaussians.
pub fn ginibre(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Haar-random unitary from the phase-corrected QR of a Ginibre matrix.
pub fn random_unitary(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let qr = ginibre(n, n, rng).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

/// Random isometry `C^cols → C^rows`.
pub fn random_isometry(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    assert!(cols <= rows, "isometry needs cols <= rows");
    random_unitary(rows, rng).columns(0, cols).into_owned()
}

pub fn random_hermitian(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = ginibre(n, n, rng);
    (&g + g.adjoint()) * c(0.5, 0.0)
}

pub fn random_density(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = ginibre(n, n, rng);
    let rho = &g * g.adjoint();
    let t = rho.trace();
    rho / t
}

/// Random list of blocks `(d_left, d_right)` with `Σ d_left·d_right = n`.
pub fn random_blocks(n: usize, rng: &mut impl Rng) -> Vec<(usize, usize)> {
    let mut left = n;
    let mut blocks = Vec::new();
    while left > 0 {
        let size = rng.random_range(1..=left.min(6));
        let divisors: Vec<usize> = (1..=size).filter(|d| size % d == 0).collect();
        let dl = divisors[rng.random_range(0..divisors.len())];
        blocks.push((dl, size / dl));
        left -= size;
    }
    blocks
}

/// `⊕_i X_i ⊗ 1_{d_R^i}` for the given left blocks.
pub fn block_operator(blocks: &[(usize, usize)], left_ops: &[ComplexMatrix]) -> ComplexMatrix {
    let parts: Vec<_> = blocks
        .iter()
        .zip(left_ops)
        .map(|(&(_, dr), x)| tensor(x, &identity(dr)))
        .collect();
    crate::linops::direct_sum_all(&parts)
}

/// `⊕_i 1_{d_L^i} ⊗ Y_i` for the given right blocks.
pub fn block_operator_right(blocks: &[(usize, usize)], right_ops: &[ComplexMatrix]) -> ComplexMatrix {
    let parts: Vec<_> = blocks
        .iter()
        .zip(right_ops)
        .map(|(&(dl, _), y)| tensor(&identity(dl), y))
        .collect();
    crate::linops::direct_sum_all(&parts)
}

/// Orthonormal basis of `u† (⊕ L(C^{d_L}) ⊗ 1) u`.
pub fn block_algebra_space(blocks: &[(usize, usize)], u: &ComplexMatrix, tol: &Tolerance) -> OperatorSubspace {
    let n = u.nrows();
    let mut elements = Vec::new();
    for (i, &(dl, _)) in blocks.iter().enumerate() {
        for a in 0..dl {
            for b in 0..dl {
                let ops: Vec<_> = blocks
                    .iter()
                    .enumerate()
                    .map(|(j, &(dj, _))| if i == j { matrix_unit(dj, a, b) } else { zeros(dj, dj) })
                    .collect();
                elements.push(u.adjoint() * block_operator(blocks, &ops) * u);
            }
        }
    }
    span(n, &elements, tol)
}

/// Two random elements generating `u† (⊕ L(C^{d_L}) ⊗ 1) u`.
pub fn block_algebra_generators(
    blocks: &[(usize, usize)],
    u: &ComplexMatrix,
    rng: &mut impl Rng,
) -> Vec<ComplexMatrix> {
    (0..2)
        .map(|_| {
            let ops: Vec<_> = blocks.iter().map(|&(dl, _)| ginibre(dl, dl, rng)).collect();
            u.adjoint() * block_operator(blocks, &ops) * u
        })
        .collect()
}

/// Kraus operators `K_k = (1 ⊗ ⟨k|) V` of a random Stinespring isometry.
pub fn random_kraus(d_in: usize, d_out: usize, n_kraus: usize, rng: &mut impl Rng) -> Vec<ComplexMatrix> {
    let v = random_isometry(d_out * n_kraus, d_in, rng);
    (0..n_kraus)
        .map(|k| ComplexMatrix::from_fn(d_out, d_in, |o, i| v[(o * n_kraus + k, i)]))
        .collect()
}
