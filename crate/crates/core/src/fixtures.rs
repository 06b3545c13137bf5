//! Named example objects shared by tests, the CLI and the FFI layer.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::channels::Channel;
use crate::error::{Error, Result};
use crate::linops::{c, direct_sum, identity, matrix_unit, tensor, zeros, ComplexMatrix, Tolerance};
use crate::splitmap::SplittingMap;
use crate::vnalg::{generate_algebra, VnAlgebra};

pub const NAMES: &[&str] = &[
    "chi-tensor",
    "chi-oplus",
    "fg-counterexample",
    "unbalanced-00-10",
    "entangled-balanced",
    "algebra-otimes",
    "algebra-oplus",
    "swap-unitary",
    "product-channel",
];

/// A fixture in its serialisable form.
#[derive(Clone, Debug)]
pub enum Fixture {
    Algebra { dim: usize, generators: Vec<ComplexMatrix> },
    Split(SplittingMap),
    Channel(Channel),
}

pub fn lookup(name: &str) -> Result<Fixture> {
    Ok(match name {
        "chi-tensor" => Fixture::Split(chi_tensor()),
        "chi-oplus" => Fixture::Split(chi_oplus()),
        "fg-counterexample" => Fixture::Split(fg_counterexample()),
        "unbalanced-00-10" => Fixture::Split(unbalanced_00_10()),
        "entangled-balanced" => Fixture::Split(entangled_balanced()),
        "algebra-otimes" => Fixture::Algebra {
            dim: 4,
            generators: otimes_generators(),
        },
        "algebra-oplus" => Fixture::Algebra {
            dim: 4,
            generators: oplus_generators(),
        },
        "swap-unitary" => Fixture::Channel(swap_channel()),
        "product-channel" => Fixture::Channel(product_channel()),
        other => return Err(Error::UnknownFixture(other.to_string())),
    })
}

fn pauli_x() -> ComplexMatrix {
    &matrix_unit(2, 0, 1) + &matrix_unit(2, 1, 0)
}

fn pauli_z() -> ComplexMatrix {
    &matrix_unit(2, 0, 0) - &matrix_unit(2, 1, 1)
}

fn embedding(rows: usize, targets: &[usize]) -> ComplexMatrix {
    let mut m = zeros(rows, targets.len());
    for (col, &row) in targets.iter().enumerate() {
        m[(row, col)] = c(1.0, 0.0);
    }
    m
}

/// Identity on `C^2 ⊗ C^3`.
pub fn chi_tensor() -> SplittingMap {
    SplittingMap::new_unchecked(identity(6), 2, 3)
}

/// `C^4 → C^3 ⊗ C^3` sending `e0, e1, e2, e3` to `|00⟩, |10⟩, |21⟩, |22⟩`.
pub fn chi_oplus() -> SplittingMap {
    SplittingMap::new_unchecked(embedding(9, &[0, 3, 7, 8]), 3, 3)
}

/// `C^2 → C^4 ⊗ C^4` whose local operators do not form an algebra.
///
/// `|0⟩ ↦ (|00⟩ + |11⟩)/√2`, `|1⟩ ↦ (|20⟩ + |33⟩)/√2`.
pub fn fg_counterexample() -> SplittingMap {
    let mut m = zeros(16, 2);
    for (row, col) in [(0, 0), (5, 0), (8, 1), (15, 1)] {
        m[(row, col)] = c(FRAC_1_SQRT_2, 0.0);
    }
    SplittingMap::new_unchecked(m, 4, 4)
}

/// `C^2 → C^2 ⊗ C^2` with `|0⟩ ↦ |00⟩`, `|1⟩ ↦ |10⟩`.
pub fn unbalanced_00_10() -> SplittingMap {
    SplittingMap::new_unchecked(embedding(4, &[0, 2]), 2, 2)
}

/// `C^2 ⊗ C^2 → C^4 ⊗ C^4`, `|lr⟩ ↦ Σ_m |2l+m⟩|2m+r⟩/√2`.
pub fn entangled_balanced() -> SplittingMap {
    let mut m = zeros(16, 4);
    for l in 0..2 {
        for r in 0..2 {
            for k in 0..2 {
                m[((2 * l + k) * 4 + 2 * k + r, 2 * l + r)] = c(FRAC_1_SQRT_2, 0.0);
            }
        }
    }
    SplittingMap::new_unchecked(m, 4, 4)
}

pub fn otimes_generators() -> Vec<ComplexMatrix> {
    vec![tensor(&pauli_x(), &identity(2)), tensor(&pauli_z(), &identity(2))]
}

pub fn oplus_generators() -> Vec<ComplexMatrix> {
    vec![
        direct_sum(&pauli_x(), &zeros(2, 2)),
        direct_sum(&pauli_z(), &zeros(2, 2)),
        direct_sum(&identity(2), &zeros(2, 2)),
    ]
}

/// `L(C^2) ⊗ 1` on `C^4`.
pub fn algebra_otimes() -> VnAlgebra {
    generate_algebra(&otimes_generators(), 4, &Tolerance::default()).expect("fixture generates an algebra")
}

/// `L(C^2) ⊕ C1` on `C^4`.
pub fn algebra_oplus() -> VnAlgebra {
    generate_algebra(&oplus_generators(), 4, &Tolerance::default()).expect("fixture generates an algebra")
}

/// Swap of two qubits.
pub fn swap_unitary() -> ComplexMatrix {
    let mut m = zeros(4, 4);
    for a in 0..2 {
        for b in 0..2 {
            m[(b * 2 + a, a * 2 + b)] = c(1.0, 0.0);
        }
    }
    m
}

pub fn swap_channel() -> Channel {
    Channel::from_unitary(&swap_unitary(), &Tolerance::default()).expect("swap is unitary")
}

/// Amplitude damping (γ = 0.3) on the first qubit, dephasing (p = 0.2) on the second.
pub fn product_channel() -> Channel {
    let tol = Tolerance::default();
    let g: f64 = 0.3;
    let damp = Channel::new(
        2,
        2,
        vec![
            &matrix_unit(2, 0, 0) + &(matrix_unit(2, 1, 1) * c((1.0 - g).sqrt(), 0.0)),
            matrix_unit(2, 0, 1) * c(g.sqrt(), 0.0),
        ],
        &tol,
    )
    .expect("amplitude damping");
    let p: f64 = 0.2;
    let dephase = Channel::new(
        2,
        2,
        vec![identity(2) * c((1.0 - p).sqrt(), 0.0), pauli_z() * c(p.sqrt(), 0.0)],
        &tol,
    )
    .expect("dephasing");
    damp.tensor(&dephase, &tol).expect("product of channels")
}
