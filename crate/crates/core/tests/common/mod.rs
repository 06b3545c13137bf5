//! Seeded generators shared by the integration suites.
#![allow(dead_code)]

use rand::Rng;
use vnsplit::channels::Channel;
use vnsplit::linops::{c, identity, isometry_defect, tensor, zeros};
use vnsplit::sampling::{block_algebra_generators, random_blocks, random_isometry, random_kraus, random_unitary};
use vnsplit::splitmap::{canonical_splitting_map, make_splitting_map, SplittingMap};
use vnsplit::vnalg::{generate_algebra, VnAlgebra};
use vnsplit::{ComplexMatrix, Settings, Tolerance};

pub fn split(v: ComplexMatrix, d_l: usize, d_r: usize) -> SplittingMap {
    make_splitting_map(v, d_l, d_r, &Tolerance::default()).expect("isometry")
}

pub struct RandomAlgebra {
    pub blocks: Vec<(usize, usize)>,
    pub unitary: ComplexMatrix,
    pub algebra: VnAlgebra,
}

/// `u† (⊕ L(C^{d_L}) ⊗ 1) u` on `C^n`, closed from two random generators.
pub fn random_algebra(n: usize, rng: &mut impl Rng) -> RandomAlgebra {
    let blocks = random_blocks(n, rng);
    let unitary = random_unitary(n, rng);
    let gens = block_algebra_generators(&blocks, &unitary, rng);
    let algebra = generate_algebra(&gens, n, &Tolerance::default()).expect("block generators close");
    RandomAlgebra {
        blocks,
        unitary,
        algebra,
    }
}

/// `(V_L ⊗ V_R)χ` with random isometries adding up to `extra` dimensions per leg.
pub fn with_local_isometries(chi: &SplittingMap, extra: usize, rng: &mut impl Rng) -> SplittingMap {
    let (dl, dr) = (chi.d_l(), chi.d_r());
    let (el, er) = (rng.random_range(0..=extra), rng.random_range(0..=extra));
    let vl = random_isometry(dl + el, dl, rng);
    let vr = random_isometry(dr + er, dr, rng);
    let v = tensor(&vl, &vr) * chi.isometry();
    split(v, dl + el, dr + er)
}

pub fn random_lean_map(n: usize, local: bool, rng: &mut impl Rng) -> (RandomAlgebra, SplittingMap) {
    let a = random_algebra(n, rng);
    let chi = canonical_splitting_map(&a.algebra, &Settings::default()).expect("canonical map");
    let chi = if local { with_local_isometries(&chi, 1, rng) } else { chi };
    (a, chi)
}

/// Descending positive weights with unit 2-norm.
pub fn random_schmidt(k: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut w: Vec<f64> = (0..k).map(|_| rng.random_range(0.2..1.0)).collect();
    w.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    w.iter().map(|x| x / norm).collect()
}

/// Balanced map in block Schmidt form
/// `χ|i l r⟩ = Σ_m λ^i_m |i; l m⟩ ⊗ |i; m r⟩`, rotated by a random unitary
/// on the domain and random local isometries on the legs.
pub fn forward_balanced(n: usize, max_rank: usize, rng: &mut impl Rng) -> SplittingMap {
    let blocks = random_blocks(n, rng);
    let ranks: Vec<usize> = blocks.iter().map(|_| rng.random_range(1..=max_rank)).collect();
    let d_l: usize = blocks.iter().zip(&ranks).map(|(&(dl, _), k)| dl * k).sum();
    let d_r: usize = blocks.iter().zip(&ranks).map(|(&(_, dr), k)| dr * k).sum();
    let mut m = zeros(d_l * d_r, n);
    let (mut col, mut ol, mut or) = (0, 0, 0);
    for (&(dl, dr), &k) in blocks.iter().zip(&ranks) {
        let lam = random_schmidt(k, rng);
        for l in 0..dl {
            for r in 0..dr {
                for (mi, &w) in lam.iter().enumerate() {
                    let row = (ol + l * k + mi) * d_r + or + mi * dr + r;
                    m[(row, col + l * dr + r)] = c(w, 0.0);
                }
            }
        }
        col += dl * dr;
        ol += dl * k;
        or += dr * k;
    }
    let chi = split(m * random_unitary(n, rng), d_l, d_r);
    with_local_isometries(&chi, 1, rng)
}

/// Embedding of random distinct product basis states, possibly entangled
/// in pairs.
pub fn random_embedding(rng: &mut impl Rng) -> SplittingMap {
    let (dl, dr) = (rng.random_range(2..=4), rng.random_range(2..=4));
    let n = rng.random_range(2..=(dl * dr).min(6));
    let mut rows: Vec<usize> = (0..dl * dr).collect();
    for i in (1..rows.len()).rev() {
        rows.swap(i, rng.random_range(0..=i));
    }
    let mut m = zeros(dl * dr, n);
    let mut next = 0;
    for col in 0..n {
        let pair = next + 1 < rows.len() && rng.random_bool(0.3) && rows.len() - next - 2 >= n - col - 1;
        if pair {
            m[(rows[next], col)] = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            m[(rows[next + 1], col)] = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            next += 2;
        } else {
            m[(rows[next], col)] = c(1.0, 0.0);
            next += 1;
        }
    }
    split(m, dl, dr)
}

/// One of several families, chosen by `kind`.
pub fn random_splitting_map(kind: usize, rng: &mut impl Rng) -> SplittingMap {
    let map = match kind % 4 {
        0 => {
            let (dl, dr) = (rng.random_range(2..=3), rng.random_range(2..=3));
            let n = rng.random_range(1..=(dl * dr).min(5));
            split(random_isometry(dl * dr, n, rng), dl, dr)
        }
        1 => {
            let n = rng.random_range(2..=5);
            random_lean_map(n, true, rng).1
        }
        2 => {
            let n = rng.random_range(2..=4);
            forward_balanced(n, 2, rng)
        }
        _ => random_embedding(rng),
    };
    assert!(isometry_defect(map.isometry()) < 1e-12);
    map
}

/// Kraus family of length drawn from `1..=max_kraus`, raised to the minimum
/// `⌈d_in/d_out⌉` a trace-preserving family needs.
pub fn kraus(d_in: usize, d_out: usize, max_kraus: usize, rng: &mut impl Rng) -> Vec<ComplexMatrix> {
    let least = d_in.div_ceil(d_out);
    let k = rng.random_range(1..=max_kraus).max(least);
    random_kraus(d_in, d_out, k, rng)
}

pub fn random_channel(d_in: usize, d_out: usize, max_kraus: usize, rng: &mut impl Rng) -> Channel {
    Channel::new(d_in, d_out, kraus(d_in, d_out, max_kraus, rng), &Tolerance::default()).expect("random channel")
}

/// `L(C^a) ⊗ 1_b` on `C^a ⊗ C^b`.
pub fn left_factor(a: usize, b: usize) -> VnAlgebra {
    let mut gens = Vec::new();
    for i in 0..a {
        for j in 0..a {
            gens.push(tensor(&vnsplit::linops::matrix_unit(a, i, j), &identity(b)));
        }
    }
    generate_algebra(&gens, a * b, &Tolerance::default()).expect("left factor")
}
