//! Dense complex linear algebra: tensor and direct-sum constructions, partial
//! traces, Hilbert–Schmidt geometry on operator spaces, nullspaces and
//! seeded sampling of Hermitian elements.
//!
//! Matrices are `nalgebra::DMatrix<Complex64>`. Operators are vectorised
//! row-major, so `vec(A X B) = (A ⊗ Bᵀ) vec(X)`. Kronecker products index
//! rows and columns as `i * b.rows + j`.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{mismatch, Error, Result};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Thresholds used for every rank and equality decision.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub absolute: f64,
    pub relative_rank: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            absolute: 1e-10,
            relative_rank: 1e-9,
        }
    }
}

impl Tolerance {
    pub fn with_absolute(absolute: f64) -> Self {
        Self {
            absolute,
            ..Self::default()
        }
    }

    /// Singular values at or below this are treated as zero.
    pub fn rank_cutoff(&self, sigma_max: f64) -> f64 {
        (self.relative_rank * sigma_max).max(self.absolute)
    }

    /// Acceptance threshold for a residual of an object with norm `norm`.
    pub fn scaled(&self, norm: f64) -> f64 {
        self.absolute * norm.max(1.0)
    }
}

/// Tolerance plus the seed for every randomised step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub tol: Tolerance,
    pub seed: u64,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            tol: Tolerance::default(),
            seed: 0x5eed,
        }
    }
}

impl Settings {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub(crate) fn reseeded(&self, salt: u64) -> Self {
        Self {
            tol: self.tol,
            seed: self
                .seed
                .wrapping_mul(0x9e37_79b9_7f4a_7c15)
                .wrapping_add(salt.wrapping_add(1)),
        }
    }
}

/// Which tensor leg of `H_L ⊗ H_R` an operation refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(rows, cols)
}

/// `|i⟩⟨j|` on `C^n`.
pub fn matrix_unit(n: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut m = zeros(n, n);
    m[(i, j)] = ONE;
    m
}

pub fn basis_vector(n: usize, i: usize) -> ComplexVector {
    let mut v = ComplexVector::zeros(n);
    v[i] = ONE;
    v
}

pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn tensor_vec(a: &ComplexVector, b: &ComplexVector) -> ComplexVector {
    a.kronecker(b)
}

pub fn direct_sum(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut m = zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    m.view_mut((0, 0), a.shape()).copy_from(a);
    m.view_mut((a.nrows(), a.ncols()), b.shape()).copy_from(b);
    m
}

pub fn direct_sum_all(blocks: &[ComplexMatrix]) -> ComplexMatrix {
    let rows = blocks.iter().map(|b| b.nrows()).sum();
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut m = zeros(rows, cols);
    let (mut r, mut c) = (0, 0);
    for b in blocks {
        m.view_mut((r, c), b.shape()).copy_from(b);
        r += b.nrows();
        c += b.ncols();
    }
    m
}

/// Trace out the `traced` factor of an operator on `C^dl ⊗ C^dr`.
pub fn partial_trace(
    m: &ComplexMatrix,
    dl: usize,
    dr: usize,
    traced: Side,
) -> Result<ComplexMatrix> {
    let n = dl * dr;
    if m.nrows() != n || m.ncols() != n {
        return Err(mismatch(format!(
            "partial trace of {}x{} over {dl}x{dr}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(match traced {
        Side::Right => ComplexMatrix::from_fn(dl, dl, |i, j| {
            (0..dr).map(|k| m[(i * dr + k, j * dr + k)]).sum()
        }),
        Side::Left => ComplexMatrix::from_fn(dr, dr, |i, j| {
            (0..dl).map(|k| m[(k * dr + i, k * dr + j)]).sum()
        }),
    })
}

/// `Tr(X† Y)`.
pub fn hs_inner(x: &ComplexMatrix, y: &ComplexMatrix) -> C64 {
    x.iter().zip(y.iter()).map(|(a, b)| a.conj() * b).sum()
}

pub fn hs_norm(x: &ComplexMatrix) -> f64 {
    x.norm()
}

pub fn dist(x: &ComplexMatrix, y: &ComplexMatrix) -> f64 {
    (x - y).norm()
}

pub fn commutator(x: &ComplexMatrix, y: &ComplexMatrix) -> ComplexMatrix {
    x * y - y * x
}

pub fn vectorize(m: &ComplexMatrix) -> ComplexVector {
    let (r, c) = m.shape();
    ComplexVector::from_fn(r * c, |k, _| m[(k / c, k % c)])
}

pub fn unvectorize(v: &ComplexVector, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |i, j| v[i * cols + j])
}

/// Singular values in descending order with matching thin factors.
pub struct Svd {
    pub u: ComplexMatrix,
    pub singular: Vec<f64>,
    pub v_t: ComplexMatrix,
}

pub fn svd(m: &ComplexMatrix) -> Svd {
    // The implicit-shift iteration can converge to wrong factors on
    // rank-deficient complex input, so each attempt is checked. Structured
    // inputs that defeat every threshold are retried in random coordinates.
    if let Some(d) = checked_svd(m) {
        return d;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5bd);
    for _ in 0..4 {
        let p = crate::sampling::random_unitary(m.nrows(), &mut rng);
        let q = crate::sampling::random_unitary(m.ncols(), &mut rng);
        if let Some(d) = checked_svd(&(&p * m * &q)) {
            return Svd {
                u: p.adjoint() * d.u,
                singular: d.singular,
                v_t: d.v_t * q.adjoint(),
            };
        }
    }
    sorted_svd(SVD::new(m.clone(), true, true))
}

fn checked_svd(m: &ComplexMatrix) -> Option<Svd> {
    let scale = m.norm().max(1.0) * (m.nrows().max(m.ncols()) as f64).sqrt();
    for eps in [5.0, 16.0, 64.0, 256.0] {
        let Some(raw) = SVD::try_new(m.clone(), true, true, eps * f64::EPSILON, 0) else {
            continue;
        };
        let d = sorted_svd(raw);
        let k = d.singular.len();
        let mut recomposed = d.u.clone();
        for (j, s) in d.singular.iter().enumerate() {
            recomposed.column_mut(j).scale_mut(*s);
        }
        let ok = (recomposed * &d.v_t - m).norm() <= 1e-12 * scale
            && (d.u.adjoint() * &d.u - identity(k)).norm() <= 1e-12 * (k as f64).sqrt().max(1.0) * 10.0
            && (&d.v_t * d.v_t.adjoint() - identity(k)).norm() <= 1e-12 * (k as f64).sqrt().max(1.0) * 10.0;
        if ok {
            return Some(d);
        }
    }
    None
}

fn sorted_svd(raw: SVD<C64, nalgebra::Dyn, nalgebra::Dyn>) -> Svd {
    let u = raw.u.expect("u requested");
    let v_t = raw.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..raw.singular_values.len()).collect();
    order.sort_by(|&a, &b| raw.singular_values[b].total_cmp(&raw.singular_values[a]));
    let singular = order.iter().map(|&k| raw.singular_values[k]).collect();
    let u = ComplexMatrix::from_fn(u.nrows(), order.len(), |i, j| u[(i, order[j])]);
    let v_t = ComplexMatrix::from_fn(order.len(), v_t.ncols(), |i, j| v_t[(order[i], j)]);
    Svd { u, singular, v_t }
}

pub fn numerical_rank(singular: &[f64], tol: &Tolerance) -> usize {
    let smax = singular.first().copied().unwrap_or(0.0);
    let cut = tol.rank_cutoff(smax);
    singular.iter().filter(|&&s| s > cut).count()
}

/// Eigenvalues (ascending) and eigenvectors (columns) of a Hermitian matrix.
pub fn hermitian_eigen(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let h = (m + m.adjoint()) * c(0.5, 0.0);
    let eig = SymmetricEigen::try_new(h.clone(), f64::EPSILON, 0)
        .unwrap_or_else(|| SymmetricEigen::new(h));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(m.nrows(), order.len(), |i, j| {
        eig.eigenvectors[(i, order[j])]
    });
    (values, vectors)
}

/// Orthonormal basis of the null space of `m` as unit vectors.
pub fn nullspace(m: &ComplexMatrix, tol: &Tolerance) -> Vec<ComplexVector> {
    let n = m.ncols();
    if n == 0 {
        return Vec::new();
    }
    let square = if m.nrows() > n {
        m.clone().qr().r()
    } else if m.nrows() < n {
        let mut p = zeros(n, n);
        p.view_mut((0, 0), m.shape()).copy_from(m);
        p
    } else {
        m.clone()
    };
    let d = svd(&square);
    let rank = numerical_rank(&d.singular, tol);
    (rank..n).map(|k| d.v_t.row(k).adjoint()).collect()
}

/// Orthonormal basis (as columns) of the column space of `m`.
pub fn range_basis(m: &ComplexMatrix, tol: &Tolerance) -> ComplexMatrix {
    if m.ncols() == 0 {
        return zeros(m.nrows(), 0);
    }
    let d = svd(m);
    let rank = numerical_rank(&d.singular, tol);
    d.u.columns(0, rank).into_owned()
}

/// Orthonormal columns spanning `Im(p)` chosen by column-pivoted
/// Gram–Schmidt on the columns of `p`.
pub fn pivoted_range_basis(p: &ComplexMatrix, tol: &Tolerance) -> ComplexMatrix {
    let mut residual = p.clone();
    let mut picked: Vec<ComplexVector> = Vec::new();
    loop {
        let (mut best, mut best_norm) = (0, 0.0);
        for j in 0..residual.ncols() {
            let nrm = residual.column(j).norm();
            if nrm > best_norm {
                best = j;
                best_norm = nrm;
            }
        }
        // Remaining columns of a projector have norm at least 1/sqrt(n).
        if best_norm <= tol.rank_cutoff(1.0).sqrt() || picked.len() == p.nrows() {
            break;
        }
        let q: ComplexVector = residual.column(best) / c(best_norm, 0.0);
        for j in 0..residual.ncols() {
            let proj = q.dotc(&residual.column(j));
            let mut col = residual.column_mut(j);
            col -= &q * proj;
        }
        picked.push(q);
    }
    if picked.is_empty() {
        return zeros(p.nrows(), 0);
    }
    ComplexMatrix::from_columns(&picked)
}

/// Orthonormal columns spanning the orthogonal complement of the columns
/// of `q`, which must already be orthonormal.
pub fn orthonormal_complement(q: &ComplexMatrix, tol: &Tolerance) -> ComplexMatrix {
    let n = q.nrows();
    let proj = identity(n) - q * q.adjoint();
    let b = range_basis(&proj, tol);
    let want = n - q.ncols();
    if b.ncols() > want {
        b.columns(0, want).into_owned()
    } else {
        b
    }
}

pub fn isometry_defect(v: &ComplexMatrix) -> f64 {
    (v.adjoint() * v - identity(v.ncols())).norm()
}

/// Minimum-norm least-squares solver for a fixed matrix.
pub struct PseudoInverse {
    a: ComplexMatrix,
    u: ComplexMatrix,
    singular: Vec<f64>,
    v_t: ComplexMatrix,
}

impl PseudoInverse {
    pub fn new(a: &ComplexMatrix, tol: &Tolerance) -> Self {
        if a.ncols() == 0 || a.nrows() == 0 {
            return Self {
                a: a.clone(),
                u: zeros(a.nrows(), 0),
                singular: Vec::new(),
                v_t: zeros(0, a.ncols()),
            };
        }
        let d = svd(a);
        let rank = numerical_rank(&d.singular, tol);
        Self {
            a: a.clone(),
            u: d.u.columns(0, rank).into_owned(),
            singular: d.singular[..rank].to_vec(),
            v_t: d.v_t.rows(0, rank).into_owned(),
        }
    }

    /// Solution and residual norm `‖a x − b‖`.
    pub fn solve(&self, b: &ComplexVector) -> (ComplexVector, f64) {
        let mut x = ComplexVector::zeros(self.a.ncols());
        for (k, s) in self.singular.iter().enumerate() {
            let coeff = self.u.column(k).dotc(b) / c(*s, 0.0);
            x += self.v_t.row(k).adjoint() * coeff;
        }
        let residual = (&self.a * &x - b).norm();
        (x, residual)
    }
}

/// Minimum-norm least-squares solution of `a x = b` with its residual norm.
pub fn lstsq(a: &ComplexMatrix, b: &ComplexVector, tol: &Tolerance) -> (ComplexVector, f64) {
    PseudoInverse::new(a, tol).solve(b)
}

/// Isometry `W` with `W d = i`, extended isometrically from the span of the
/// orthonormal columns `d` to the whole domain.
pub fn complete_isometry(
    domain: &ComplexMatrix,
    image: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<ComplexMatrix> {
    let (n_dom, k) = domain.shape();
    let n_img = image.nrows();
    if image.ncols() != k || n_img < n_dom {
        return Err(mismatch(format!(
            "cannot extend a map on {k} vectors from dimension {n_dom} into {n_img}"
        )));
    }
    let mut w = image * domain.adjoint();
    let rest = n_dom - k;
    if rest > 0 {
        let d_perp = orthonormal_complement(domain, tol);
        let i_perp = orthonormal_complement(image, tol);
        if d_perp.ncols() != rest || i_perp.ncols() < rest {
            return Err(mismatch("frames are not orthonormal"));
        }
        w += i_perp.columns(0, rest) * d_perp.adjoint();
    }
    Ok(w)
}

/// A subspace of operators on `C^n` with a Hilbert–Schmidt orthonormal basis.
#[derive(Clone, Debug)]
pub struct OperatorSubspace {
    dim_space: usize,
    basis: Vec<ComplexMatrix>,
}

impl OperatorSubspace {
    pub fn zero(dim_space: usize) -> Self {
        Self {
            dim_space,
            basis: Vec::new(),
        }
    }

    /// Wrap a basis that is already HS-orthonormal.
    pub fn from_orthonormal(dim_space: usize, basis: Vec<ComplexMatrix>) -> Self {
        Self { dim_space, basis }
    }

    pub fn full(n: usize) -> Self {
        let basis = (0..n)
            .flat_map(|i| (0..n).map(move |j| matrix_unit(n, i, j)))
            .collect();
        Self::from_orthonormal(n, basis)
    }

    pub fn dim_space(&self) -> usize {
        self.dim_space
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        &self.basis
    }

    pub fn coefficients(&self, v: &ComplexMatrix) -> Vec<C64> {
        self.basis.iter().map(|b| hs_inner(b, v)).collect()
    }

    pub fn combine(&self, coeffs: &[C64]) -> ComplexMatrix {
        let mut m = zeros(self.dim_space, self.dim_space);
        for (b, &k) in self.basis.iter().zip(coeffs) {
            m += b * k;
        }
        m
    }

    pub fn project(&self, v: &ComplexMatrix) -> ComplexMatrix {
        self.combine(&self.coefficients(v))
    }

    pub fn residual(&self, v: &ComplexMatrix) -> f64 {
        (v - self.project(v)).norm()
    }

    pub fn contains(&self, v: &ComplexMatrix, tol: &Tolerance) -> bool {
        v.shape() == (self.dim_space, self.dim_space) && self.residual(v) <= tol.scaled(v.norm())
    }

    /// Add `v` if it is not already contained; returns whether it was added.
    pub fn extend_with(&mut self, v: &ComplexMatrix, tol: &Tolerance) -> bool {
        let mut r = v.clone();
        for _ in 0..2 {
            for b in &self.basis {
                let k = hs_inner(b, &r);
                r -= b * k;
            }
        }
        let nrm = r.norm();
        if nrm <= tol.scaled(v.norm()) || self.basis.len() == self.dim_space * self.dim_space {
            return false;
        }
        self.basis.push(r / c(nrm, 0.0));
        true
    }

    pub fn is_adjoint_closed(&self, tol: &Tolerance) -> bool {
        self.basis.iter().all(|b| self.contains(&b.adjoint(), tol))
    }

    /// Image of the subspace under `X ↦ q† X q` on a smaller space.
    pub fn compress(&self, q: &ComplexMatrix, tol: &Tolerance) -> OperatorSubspace {
        let images: Vec<_> = self.basis.iter().map(|b| q.adjoint() * b * q).collect();
        span(q.ncols(), &images, tol)
    }

    /// Columns are the vectorised basis elements.
    pub fn basis_matrix(&self) -> ComplexMatrix {
        let cols: Vec<_> = self.basis.iter().map(vectorize).collect();
        let n2 = self.dim_space * self.dim_space;
        ComplexMatrix::from_fn(n2, cols.len(), |i, j| cols[j][i])
    }
}

/// Orthonormal basis for the span; the result may be the zero subspace.
pub fn span(dim_space: usize, vectors: &[ComplexMatrix], tol: &Tolerance) -> OperatorSubspace {
    if vectors.is_empty() {
        return OperatorSubspace::zero(dim_space);
    }
    let cols: Vec<_> = vectors.iter().map(vectorize).collect();
    let n2 = dim_space * dim_space;
    let m = ComplexMatrix::from_fn(n2, cols.len(), |i, j| cols[j][i]);
    let q = range_basis(&m, tol);
    let basis = q
        .column_iter()
        .map(|col| unvectorize(&col.into_owned(), dim_space, dim_space))
        .collect();
    OperatorSubspace::from_orthonormal(dim_space, basis)
}

pub fn orthonormalize(
    dim_space: usize,
    vectors: &[ComplexMatrix],
    tol: &Tolerance,
) -> Result<OperatorSubspace> {
    for v in vectors {
        if v.shape() != (dim_space, dim_space) {
            return Err(mismatch(format!(
                "operator of shape {:?} in a space of dimension {dim_space}",
                v.shape()
            )));
        }
    }
    let s = span(dim_space, vectors, tol);
    if s.dim() == 0 {
        Err(Error::EmptySpan)
    } else {
        Ok(s)
    }
}

pub fn subspace_subset(s1: &OperatorSubspace, s2: &OperatorSubspace, tol: &Tolerance) -> bool {
    s1.dim_space == s2.dim_space && s1.basis.iter().all(|b| s2.contains(b, tol))
}

pub fn subspace_equal(s1: &OperatorSubspace, s2: &OperatorSubspace, tol: &Tolerance) -> bool {
    s1.dim() == s2.dim() && subspace_subset(s1, s2, tol) && subspace_subset(s2, s1, tol)
}

/// Intersection from the null space of `[Q1, -Q2]`.
pub fn intersect(s1: &OperatorSubspace, s2: &OperatorSubspace, tol: &Tolerance) -> OperatorSubspace {
    let n = s1.dim_space;
    if s1.dim() == 0 || s2.dim() == 0 {
        return OperatorSubspace::zero(n);
    }
    let q1 = s1.basis_matrix();
    let q2 = s2.basis_matrix();
    let k1 = q1.ncols();
    let mut stacked = zeros(q1.nrows(), k1 + q2.ncols());
    stacked.view_mut((0, 0), q1.shape()).copy_from(&q1);
    stacked
        .view_mut((0, k1), q2.shape())
        .copy_from(&(-q2.clone()));
    let null = nullspace(&stacked, tol);
    let vectors: Vec<_> = null
        .iter()
        .map(|v| unvectorize(&(&q1 * v.rows(0, k1)), n, n))
        .collect();
    span(n, &vectors, tol)
}

/// Uniformly random Hermitian element of an adjoint-closed subspace.
pub fn random_hermitian_in(s: &OperatorSubspace, seed: u64, tol: &Tolerance) -> Result<ComplexMatrix> {
    if !s.is_adjoint_closed(tol) {
        return Err(Error::NotAdjointClosed);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = s.dim_space;
    let mut x = zeros(n, n);
    for b in &s.basis {
        let re: f64 = rng.random_range(-1.0..1.0);
        let im: f64 = rng.random_range(-1.0..1.0);
        let herm = (b + b.adjoint()) * c(0.5, 0.0);
        let anti = (b - b.adjoint()) * c(0.0, 0.5);
        x += herm * c(re, 0.0) + anti * c(im, 0.0);
    }
    Ok((&x + x.adjoint()) * c(0.5, 0.0))
}

/// Random complex combination of the basis (not Hermitian).
pub(crate) fn random_element_in(s: &OperatorSubspace, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let mut x = zeros(s.dim_space, s.dim_space);
    for b in &s.basis {
        let k = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        x += b * k;
    }
    x
}
