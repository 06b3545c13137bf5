//! Splitting maps `χ: H → H_L ⊗ H_R`.
//!
//! An operator `B` on a leg is χ-consistent when `B ⊗ 1` commutes with the
//! image projector `χχ†`. Pushing consistent operators through
//! `σ(B) = χ†(B ⊗ 1)χ` gives the strictly local algebra of each leg. This
//! module decides balance and leanness, builds canonical maps from
//! Artin–Wedderburn data, constructs comprehension witnesses between maps
//! and decomposes balanced maps into per-block Schmidt form.

use crate::error::{mismatch, Error, Result};
use crate::linops::{
    basis_vector, c, complete_isometry, identity, isometry_defect, pivoted_range_basis, span,
    subspace_subset, svd, tensor, tensor_vec, unvectorize, vectorize, zeros, ComplexMatrix,
    ComplexVector, OperatorSubspace, PseudoInverse, Settings, Side, Tolerance,
};
use crate::vnalg::{
    assemble_aw, aw_decomposition, center, classes_of, commutant, connect_class, largest_compression,
    leading_index, minimal_projector_family, polar_part, refine_projectors, significant,
    AwDecomposition, ClassFrame, VnAlgebra,
};

/// An isometry `H → H_L ⊗ H_R`.
#[derive(Clone, Debug, PartialEq)]
pub struct SplittingMap {
    isometry: ComplexMatrix,
    d_l: usize,
    d_r: usize,
}

impl SplittingMap {
    pub(crate) fn new_unchecked(isometry: ComplexMatrix, d_l: usize, d_r: usize) -> Self {
        Self { isometry, d_l, d_r }
    }

    pub fn isometry(&self) -> &ComplexMatrix {
        &self.isometry
    }

    pub fn d_h(&self) -> usize {
        self.isometry.ncols()
    }

    pub fn d_l(&self) -> usize {
        self.d_l
    }

    pub fn d_r(&self) -> usize {
        self.d_r
    }

    pub fn d_leg(&self, side: Side) -> usize {
        match side {
            Side::Left => self.d_l,
            Side::Right => self.d_r,
        }
    }

    /// `π = χχ†`.
    pub fn image_projector(&self) -> ComplexMatrix {
        &self.isometry * self.isometry.adjoint()
    }

    /// `B ⊗ 1` or `1 ⊗ B`.
    pub fn lift(&self, b: &ComplexMatrix, side: Side) -> ComplexMatrix {
        match side {
            Side::Left => tensor(b, &identity(self.d_r)),
            Side::Right => tensor(&identity(self.d_l), b),
        }
    }

    /// `σ(B) = χ†(lift B)χ`.
    pub fn sigma(&self, b: &ComplexMatrix, side: Side) -> ComplexMatrix {
        self.isometry.adjoint() * self.lift(b, side) * &self.isometry
    }

    fn check_leg(&self, b: &ComplexMatrix, side: Side) -> Result<()> {
        let d = self.d_leg(side);
        if b.shape() != (d, d) {
            return Err(mismatch(format!("operator {:?} on a leg of dimension {d}", b.shape())));
        }
        Ok(())
    }

    fn check_domain(&self, a: &ComplexMatrix) -> Result<()> {
        let n = self.d_h();
        if a.shape() != (n, n) {
            return Err(mismatch(format!("operator {:?} on a domain of dimension {n}", a.shape())));
        }
        Ok(())
    }
}

pub fn make_splitting_map(v: ComplexMatrix, d_l: usize, d_r: usize, tol: &Tolerance) -> Result<SplittingMap> {
    if v.nrows() != d_l * d_r || v.ncols() == 0 {
        return Err(mismatch(format!("isometry with {} rows for legs {d_l} x {d_r}", v.nrows())));
    }
    let defect = isometry_defect(&v);
    if defect > tol.scaled(v.ncols() as f64) {
        return Err(Error::NotIsometry(defect));
    }
    Ok(SplittingMap::new_unchecked(v, d_l, d_r))
}

pub fn is_consistent(chi: &SplittingMap, b: &ComplexMatrix, side: Side, tol: &Tolerance) -> Result<bool> {
    chi.check_leg(b, side)?;
    let pi = chi.image_projector();
    let lifted = chi.lift(b, side);
    Ok((&pi * &lifted - &lifted * &pi).norm() <= tol.scaled(b.norm()))
}

/// Consistency checked as invariance of `Im χ` and its complement under
/// the lifted operator.
pub fn is_consistent_invariant(chi: &SplittingMap, b: &ComplexMatrix, side: Side, tol: &Tolerance) -> Result<bool> {
    chi.check_leg(b, side)?;
    let pi = chi.image_projector();
    let perp = identity(pi.nrows()) - &pi;
    let lifted = chi.lift(b, side);
    let out = (&perp * &lifted * &pi).norm();
    let back = (&pi * &lifted * &perp).norm();
    Ok(out.max(back) <= tol.scaled(b.norm()))
}

/// Stack the images of the leg's matrix units under `f` as columns.
fn leg_operator_matrix(
    chi: &SplittingMap,
    side: Side,
    f: impl Fn(&ComplexMatrix) -> ComplexVector,
) -> ComplexMatrix {
    let d = chi.d_leg(side);
    let cols: Vec<ComplexVector> = (0..d * d)
        .map(|k| f(&chi.lift(&crate::linops::matrix_unit(d, k / d, k % d), side)))
        .collect();
    ComplexMatrix::from_columns(&cols)
}

/// `cons(χ)` on the given leg: the null space of
/// `B ↦ ((1−π)(B⊗1)χ, χ†(B⊗1)(1−π))`.
pub fn consistent_algebra(chi: &SplittingMap, side: Side, tol: &Tolerance) -> VnAlgebra {
    let d = chi.d_leg(side);
    let v = chi.isometry();
    let perp = identity(v.nrows()) - chi.image_projector();
    let m = leg_operator_matrix(chi, side, |lifted| {
        let a = vectorize(&(&perp * lifted * v));
        let b = vectorize(&(v.adjoint() * lifted * &perp));
        let mut out = ComplexVector::zeros(a.len() + b.len());
        out.rows_mut(0, a.len()).copy_from(&a);
        out.rows_mut(a.len(), b.len()).copy_from(&b);
        out
    });
    let basis = crate::linops::nullspace(&m, tol)
        .iter()
        .map(|x| unvectorize(x, d, d))
        .collect();
    VnAlgebra::from_subspace_unchecked(OperatorSubspace::from_orthonormal(d, basis))
}

/// `loc(χ) = σ(L(H_side))`.
pub fn local_operators(chi: &SplittingMap, side: Side, tol: &Tolerance) -> OperatorSubspace {
    let d = chi.d_leg(side);
    let images: Vec<_> = (0..d * d)
        .map(|k| chi.sigma(&crate::linops::matrix_unit(d, k / d, k % d), side))
        .collect();
    span(chi.d_h(), &images, tol)
}

/// Least-squares solver for `σ(Ã) = A`.
pub struct LocalSolver<'a> {
    chi: &'a SplittingMap,
    side: Side,
    pinv: PseudoInverse,
    tol: Tolerance,
}

impl<'a> LocalSolver<'a> {
    pub fn new(chi: &'a SplittingMap, side: Side, tol: &Tolerance) -> Self {
        let m = leg_operator_matrix(chi, side, |lifted| {
            vectorize(&(chi.isometry().adjoint() * lifted * chi.isometry()))
        });
        Self {
            chi,
            side,
            pinv: PseudoInverse::new(&m, tol),
            tol: *tol,
        }
    }

    pub fn solve(&self, a: &ComplexMatrix) -> Result<Option<ComplexMatrix>> {
        self.chi.check_domain(a)?;
        let d = self.chi.d_leg(self.side);
        let (x, res) = self.pinv.solve(&vectorize(a));
        Ok((res <= self.tol.scaled(a.norm())).then(|| unvectorize(&x, d, d)))
    }
}

pub fn local_representative(
    chi: &SplittingMap,
    a: &ComplexMatrix,
    side: Side,
    tol: &Tolerance,
) -> Result<Option<ComplexMatrix>> {
    LocalSolver::new(chi, side, tol).solve(a)
}

/// Least-squares solver for the joint system `Aχ† = χ†(Ã⊗1)`,
/// `χA = (Ã⊗1)χ`. The minimum-norm solution is the representative
/// supported where `σ` is faithful.
pub struct StrictSolver<'a> {
    chi: &'a SplittingMap,
    side: Side,
    pinv: PseudoInverse,
    tol: Tolerance,
}

impl<'a> StrictSolver<'a> {
    pub fn new(chi: &'a SplittingMap, side: Side, tol: &Tolerance) -> Self {
        let v = chi.isometry();
        let m = leg_operator_matrix(chi, side, |lifted| {
            let a = vectorize(&(v.adjoint() * lifted));
            let b = vectorize(&(lifted * v));
            stack(&a, &b)
        });
        Self {
            chi,
            side,
            pinv: PseudoInverse::new(&m, tol),
            tol: *tol,
        }
    }

    pub fn solve(&self, a: &ComplexMatrix) -> Result<Option<ComplexMatrix>> {
        self.chi.check_domain(a)?;
        let v = self.chi.isometry();
        let rhs = stack(&vectorize(&(a * v.adjoint())), &vectorize(&(v * a)));
        let d = self.chi.d_leg(self.side);
        let (x, res) = self.pinv.solve(&rhs);
        Ok((res <= self.tol.scaled(a.norm())).then(|| unvectorize(&x, d, d)))
    }
}

fn stack(a: &ComplexVector, b: &ComplexVector) -> ComplexVector {
    let mut out = ComplexVector::zeros(a.len() + b.len());
    out.rows_mut(0, a.len()).copy_from(a);
    out.rows_mut(a.len(), b.len()).copy_from(b);
    out
}

pub fn strictly_local_representative(
    chi: &SplittingMap,
    a: &ComplexMatrix,
    side: Side,
    tol: &Tolerance,
) -> Result<Option<ComplexMatrix>> {
    StrictSolver::new(chi, side, tol).solve(a)
}

/// `stloc(χ) = σ(cons(χ))`.
pub fn strictly_local_algebra(chi: &SplittingMap, side: Side, tol: &Tolerance) -> VnAlgebra {
    let cons = consistent_algebra(chi, side, tol);
    let images: Vec<_> = cons.basis().iter().map(|b| chi.sigma(b, side)).collect();
    VnAlgebra::from_subspace_unchecked(span(chi.d_h(), &images, tol))
}

/// Canonical map `(⊕ H_L^i) ⊗ (⊕ H_R^i)` built from an AW decomposition.
pub fn canonical_from_aw(aw: &AwDecomposition) -> SplittingMap {
    let n = aw.dim_space();
    let (dl, dr) = (aw.total_left(), aw.total_right());
    let mut v = zeros(dl * dr, n);
    for (b, (ol, or)) in aw.blocks.iter().zip(aw.leg_offsets()) {
        for l in 0..b.d_left {
            for r in 0..b.d_right {
                let row = (ol + l) * dr + or + r;
                v.row_mut(row).copy_from(&aw.unitary.row(b.offset + l * b.d_right + r));
            }
        }
    }
    SplittingMap::new_unchecked(v, dl, dr)
}

pub fn canonical_splitting_map(a: &VnAlgebra, settings: &Settings) -> Result<SplittingMap> {
    Ok(canonical_from_aw(&aw_decomposition(a, settings)?))
}

pub fn is_balanced(chi: &SplittingMap, settings: &Settings) -> bool {
    let tol = &settings.tol;
    let left = strictly_local_algebra(chi, Side::Left, tol);
    let right = strictly_local_algebra(chi, Side::Right, tol);
    right.equals(&commutant(&left, settings), tol)
}

/// Balanced, and on both legs the commutant of `cons` is its center.
pub fn is_lean(chi: &SplittingMap, settings: &Settings) -> bool {
    if !is_balanced(chi, settings) {
        return false;
    }
    [Side::Left, Side::Right].iter().all(|&side| {
        let cons = consistent_algebra(chi, side, &settings.tol);
        commutant(&cons, settings).dim() == center(&cons, settings).dim()
    })
}

/// Witness `(1 ⊗ ●)ζ = (○ ⊗ 1)χ` for `ζ ⊑ χ`.
///
/// `black_dot: H_R^ζ → M ⊗ H_R^χ` and `white_dot: H_L^χ → H_L^ζ ⊗ M`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComprehensionWitness {
    pub d_m: usize,
    pub black_dot: ComplexMatrix,
    pub white_dot: ComplexMatrix,
}

/// `‖(1 ⊗ ●)ζ − (○ ⊗ 1)χ‖`, or an error if the shapes do not fit.
pub fn comprehension_residual(zeta: &SplittingMap, chi: &SplittingMap, w: &ComprehensionWitness) -> Result<f64> {
    if zeta.d_h() != chi.d_h()
        || w.black_dot.shape() != (w.d_m * chi.d_r(), zeta.d_r())
        || w.white_dot.shape() != (zeta.d_l() * w.d_m, chi.d_l())
    {
        return Err(mismatch("witness shapes do not match the maps"));
    }
    let lhs = tensor(&identity(zeta.d_l()), &w.black_dot) * zeta.isometry();
    let rhs = tensor(&w.white_dot, &identity(chi.d_r())) * chi.isometry();
    Ok((lhs - rhs).norm())
}

pub fn verify_comprehension(
    zeta: &SplittingMap,
    chi: &SplittingMap,
    w: &ComprehensionWitness,
    tol: &Tolerance,
) -> Result<bool> {
    let res = comprehension_residual(zeta, chi, w)?;
    let bound = tol.scaled((zeta.d_h() as f64).sqrt());
    Ok(res <= bound
        && isometry_defect(&w.black_dot) <= tol.scaled(1.0)
        && isometry_defect(&w.white_dot) <= tol.scaled(1.0))
}

/// Canonical maps `ζ` for `small` and `χ` for `big` with a witness of
/// `ζ ⊑ χ`.
///
/// Minimal projectors of `small` are refined inside `big` and transported
/// along the connectors of `small`, so both maps share compatible frames.
/// The mediating space is indexed by pairs (class of `small`, refinement
/// index).
pub fn comprehension_nested_canonical(
    small: &VnAlgebra,
    big: &VnAlgebra,
    settings: &Settings,
) -> Result<(SplittingMap, SplittingMap, ComprehensionWitness)> {
    let tol = &settings.tol;
    let n = small.dim_space();
    if big.dim_space() != n {
        return Err(mismatch("algebras act on different spaces"));
    }
    if !subspace_subset(small.space(), big.space(), tol) {
        return Err(Error::NotNested);
    }

    let family = minimal_projector_family(small, settings)?;
    let mut small_frames = Vec::new();
    for class in &family.classes {
        let members = class.iter().map(|&k| family.projectors[k].clone()).collect();
        small_frames.push(connect_class(small, members, tol)?);
    }
    small_frames.sort_by_key(|f| (f.leading(), f.projectors.len(), f.rep_basis.ncols()));
    let small_aw = assemble_aw(&small_frames, n, tol)?;
    let zeta = canonical_from_aw(&small_aw);

    // Big projectors labelled (small class J, member j, refinement k).
    struct Piece {
        class: usize,
        member: usize,
        k: usize,
        proj: ComplexMatrix,
    }
    let mut pieces: Vec<Piece> = Vec::new();
    let mut n_refine = Vec::new();
    for (jc, f) in small_frames.iter().enumerate() {
        let refined = refine_projectors(big, vec![f.projectors[0].clone()], &settings.reseeded(jc as u64))?;
        n_refine.push(refined.len());
        for (j, s) in f.connectors.iter().enumerate() {
            for (k, p) in refined.iter().enumerate() {
                let proj = if j == 0 { p.clone() } else { s.adjoint() * p * s };
                pieces.push(Piece {
                    class: jc,
                    member: j,
                    k,
                    proj,
                });
            }
        }
    }
    let all: Vec<ComplexMatrix> = pieces.iter().map(|p| p.proj.clone()).collect();
    let big_classes = classes_of(big, &all, tol);

    let find = |class: usize, member: usize, k: usize| {
        pieces
            .iter()
            .position(|p| p.class == class && p.member == member && p.k == k)
            .expect("piece exists")
    };
    let mut big_frames: Vec<(ClassFrame, Vec<usize>)> = Vec::new();
    for members in &big_classes {
        let rep = *members
            .iter()
            .filter(|&&m| pieces[m].member == 0)
            .min_by_key(|&&m| leading_index(&pieces[m].proj))
            .ok_or_else(|| Error::RefinementStall("class without a representative refinement".into()))?;
        let mut order = vec![rep];
        order.extend(members.iter().copied().filter(|&m| m != rep));
        let rep_proj = &pieces[rep].proj;
        // Connectors for refinements of representatives first, then
        // transported ones.
        let mut connectors = Vec::with_capacity(order.len());
        for &m in &order {
            let p = &pieces[m];
            let t = if m == rep {
                rep_proj.clone()
            } else if p.member == 0 {
                let (nrm, comp) = largest_compression(big, rep_proj, &p.proj);
                if nrm <= significant(tol) {
                    return Err(Error::RefinementStall("class members are not connected".into()));
                }
                polar_part(&comp, tol)
            } else {
                let base = find(p.class, 0, p.k);
                let t_base = if base == rep {
                    rep_proj.clone()
                } else {
                    let (_, comp) = largest_compression(big, rep_proj, &pieces[base].proj);
                    polar_part(&comp, tol)
                };
                t_base * &small_frames[p.class].connectors[p.member] * &p.proj
            };
            connectors.push(t);
        }
        let frame = ClassFrame {
            projectors: order.iter().map(|&m| pieces[m].proj.clone()).collect(),
            connectors,
            rep_basis: pivoted_range_basis(rep_proj, tol),
        };
        big_frames.push((frame, order));
    }
    big_frames.sort_by_key(|(f, _)| (f.leading(), f.projectors.len(), f.rep_basis.ncols()));
    let (frames, orders): (Vec<_>, Vec<_>) = big_frames.into_iter().unzip();
    let big_aw = assemble_aw(&frames, n, tol)?;
    let chi = canonical_from_aw(&big_aw);

    let mediator_offsets: Vec<usize> = n_refine
        .iter()
        .scan(0, |acc, &x| {
            let o = *acc;
            *acc += x;
            Some(o)
        })
        .collect();
    let d_m: usize = n_refine.iter().sum();
    let small_left = small_aw.leg_offsets();
    let small_right = small_aw.leg_offsets();
    let big_left = big_aw.leg_offsets();

    // ○ sends the left label of each big projector to (small label, mediator).
    let mut white = zeros(zeta.d_l() * d_m, chi.d_l());
    let mut left_label = vec![0usize; pieces.len()];
    for (b, order) in orders.iter().enumerate() {
        for (pos, &m) in order.iter().enumerate() {
            let p = &pieces[m];
            left_label[m] = big_left[b].0 + pos;
            let zl = small_left[p.class].0 + p.member;
            white[(zl * d_m + mediator_offsets[p.class] + p.k, big_left[b].0 + pos)] = c(1.0, 0.0);
        }
    }

    // ● reads the right leg of χ on each refinement of the representative.
    let mut black = zeros(d_m * chi.d_r(), zeta.d_r());
    for (jc, f) in small_frames.iter().enumerate() {
        for z in 0..f.rep_basis.ncols() {
            let col = small_right[jc].1 + z;
            let row = (small_left[jc].0) * zeta.d_r() + col;
            let x: ComplexVector = zeta.isometry().row(row).adjoint();
            for k in 0..n_refine[jc] {
                let m = find(jc, 0, k);
                let y = chi.isometry() * (&pieces[m].proj * &x);
                let l = left_label[m];
                let w = y.rows(l * chi.d_r(), chi.d_r());
                let target = mediator_offsets[jc] + k;
                black
                    .view_mut((target * chi.d_r(), col), (chi.d_r(), 1))
                    .copy_from(&w);
            }
        }
    }
    Ok((
        zeta,
        chi,
        ComprehensionWitness {
            d_m,
            black_dot: black,
            white_dot: white,
        },
    ))
}

/// One block of a balanced map in Schmidt form:
/// `χ|l r⟩ = Σ_m λ_m |l+m⟩ ⊗ |r+m⟩`.
#[derive(Clone, Debug)]
pub struct BlockShape {
    pub d_left: usize,
    pub d_right: usize,
    /// Atomic projector `π_i` of the strictly local algebra.
    pub projector: ComplexMatrix,
    /// Columns `|l r⟩` in `H`, index `l·d_right + r`.
    pub basis: ComplexMatrix,
    /// Schmidt coefficients in descending order.
    pub schmidt: Vec<f64>,
    /// Columns `|l+m⟩` in `H_L^χ`, index `l·k + m`.
    pub left_frames: ComplexMatrix,
    /// Columns `|r+m⟩` in `H_R^χ`, index `m·d_right + r`.
    pub right_frames: ComplexMatrix,
}

impl BlockShape {
    pub fn rank(&self) -> usize {
        self.schmidt.len()
    }

    /// `χ π_i` rebuilt from the frames.
    pub fn reconstruct(&self, d_l: usize, d_r: usize) -> ComplexMatrix {
        let k = self.rank();
        let n = self.basis.nrows();
        let mut out = zeros(d_l * d_r, n);
        for l in 0..self.d_left {
            for r in 0..self.d_right {
                let mut img = ComplexVector::zeros(d_l * d_r);
                for (m, &lam) in self.schmidt.iter().enumerate() {
                    let a: ComplexVector = self.left_frames.column(l * k + m).into_owned();
                    let b: ComplexVector = self.right_frames.column(m * self.d_right + r).into_owned();
                    img += tensor_vec(&a, &b) * c(lam, 0.0);
                }
                let v = self.basis.column(l * self.d_right + r);
                out += img * v.adjoint();
            }
        }
        out
    }
}

/// Schmidt form of every block of a balanced map relative to an AW
/// decomposition of its left strictly local algebra.
pub(crate) fn block_shapes(chi: &SplittingMap, aw: &AwDecomposition, tol: &Tolerance) -> Result<Vec<BlockShape>> {
    let left = StrictSolver::new(chi, Side::Left, tol);
    let right = StrictSolver::new(chi, Side::Right, tol);
    let (dl_tot, dr_tot) = (chi.d_l(), chi.d_r());
    let mut shapes = Vec::new();
    for (i, b) in aw.blocks.iter().enumerate() {
        let phi = chi.isometry() * aw.block_vector(i, 0, 0);
        let mat = ComplexMatrix::from_fn(dl_tot, dr_tot, |x, y| phi[x * dr_tot + y]);
        let d = svd(&mat);
        let k = d.singular.iter().filter(|&&s| s > significant(tol) * 1e-2).count();
        let mut u0 = Vec::new();
        let mut w0 = Vec::new();
        for m in 0..k {
            let mut u: ComplexVector = d.u.column(m).into_owned();
            let mut w: ComplexVector = d.v_t.row(m).transpose().into_owned();
            if let Some(first) = u.iter().find(|z| z.norm() > 1e-12).copied() {
                let phase = first / first.norm();
                u *= phase.conj();
                w *= phase;
            }
            u0.push(u);
            w0.push(w);
        }
        let mut left_cols = Vec::new();
        for l in 0..b.d_left {
            let rep = left.solve(&aw.left_unit(i, l, 0))?.ok_or(Error::NotBalanced)?;
            for u in &u0 {
                left_cols.push(&rep * u);
            }
        }
        let mut right_reps = Vec::new();
        for r in 0..b.d_right {
            right_reps.push(right.solve(&aw.right_unit(i, r, 0))?.ok_or(Error::NotBalanced)?);
        }
        let mut right_cols = Vec::new();
        for w in &w0 {
            for rep in &right_reps {
                right_cols.push(rep * w);
            }
        }
        let basis = ComplexMatrix::from_fn(aw.dim_space(), b.size(), |x, y| {
            aw.unitary[(b.offset + y, x)].conj()
        });
        shapes.push(BlockShape {
            d_left: b.d_left,
            d_right: b.d_right,
            projector: aw.atomic[i].clone(),
            basis,
            schmidt: d.singular[..k].to_vec(),
            left_frames: ComplexMatrix::from_columns(&left_cols),
            right_frames: ComplexMatrix::from_columns(&right_cols),
        });
    }
    Ok(shapes)
}

/// A piece `χ π_i` of a splitting map on `Im π_i`.
#[derive(Clone, Debug)]
pub struct SplitComponent {
    /// Atomic projector `π_i` of the center of `stloc_L(χ)`.
    pub projector: ComplexMatrix,
    /// Orthonormal columns spanning `Im π_i`.
    pub embedding: ComplexMatrix,
    /// Consistent preimage of `π_i`; `(π̃_i ⊗ 1)χ = χπ_i`.
    pub left_support: ComplexMatrix,
    /// The component as a map on `Im π_i`.
    pub map: SplittingMap,
}

pub fn split_by_atomic_projectors(chi: &SplittingMap, settings: &Settings) -> Result<Vec<SplitComponent>> {
    let tol = &settings.tol;
    let a = strictly_local_algebra(chi, Side::Left, tol);
    let atoms = crate::vnalg::atomic_projectors(&center(&a, settings), settings)?;
    let solver = StrictSolver::new(chi, Side::Left, tol);
    atoms
        .into_iter()
        .map(|p| {
            let embedding = pivoted_range_basis(&p, tol);
            let left_support = solver
                .solve(&p)?
                .ok_or_else(|| Error::RefinementStall("atomic projector is not strictly local".into()))?;
            let map = SplittingMap::new_unchecked(chi.isometry() * &embedding, chi.d_l(), chi.d_r());
            Ok(SplitComponent {
                projector: p,
                embedding,
                left_support,
                map,
            })
        })
        .collect()
}

/// Schmidt form of a balanced map whose strictly local algebra is a factor.
pub fn factor_shape(chi: &SplittingMap, settings: &Settings) -> Result<BlockShape> {
    let tol = &settings.tol;
    let a = strictly_local_algebra(chi, Side::Left, tol);
    if center(&a, settings).dim() != 1 {
        return Err(Error::NotFactor);
    }
    if !is_balanced(chi, settings) {
        return Err(Error::NotBalanced);
    }
    let aw = aw_decomposition(&a, settings)?;
    Ok(block_shapes(chi, &aw, tol)?.remove(0))
}

/// A balanced map as `Σ_i (U_L^i ⊗ U_R^i)(1 ⊗ φ_i ⊗ 1)ζ_i`.
#[derive(Clone, Debug)]
pub struct BalancedDecomposition {
    /// AW decomposition of `stloc_L(χ)`.
    pub aw: AwDecomposition,
    /// Canonical map for `stloc_L(χ)` built from `aw`.
    pub zeta: SplittingMap,
    pub blocks: Vec<BlockShape>,
}

impl BalancedDecomposition {
    pub fn reconstruct(&self, d_l: usize, d_r: usize) -> ComplexMatrix {
        let n = self.aw.dim_space();
        self.blocks
            .iter()
            .fold(zeros(d_l * d_r, n), |acc, b| acc + b.reconstruct(d_l, d_r))
    }
}

pub fn balanced_decomposition(chi: &SplittingMap, settings: &Settings) -> Result<BalancedDecomposition> {
    if !is_balanced(chi, settings) {
        return Err(Error::NotBalanced);
    }
    let a = strictly_local_algebra(chi, Side::Left, &settings.tol);
    let aw = aw_decomposition(&a, settings)?;
    let blocks = block_shapes(chi, &aw, &settings.tol)?;
    Ok(BalancedDecomposition {
        zeta: canonical_from_aw(&aw),
        aw,
        blocks,
    })
}

/// `χ = (U_L ⊗ U_R)ζ` with `ζ` canonical for `stloc_L(χ)`.
#[derive(Clone, Debug)]
pub struct LeanDecomposition {
    pub aw: AwDecomposition,
    pub zeta: SplittingMap,
    pub u_left: ComplexMatrix,
    pub u_right: ComplexMatrix,
    pub blocks: Vec<BlockShape>,
}

pub(crate) fn lean_decomposition_with(chi: &SplittingMap, aw: AwDecomposition, tol: &Tolerance) -> Result<LeanDecomposition> {
    let blocks = block_shapes(chi, &aw, tol)?;
    if blocks.iter().any(|b| b.rank() != 1) {
        return Err(Error::NotLean);
    }
    let mut u_left = zeros(chi.d_l(), aw.total_left());
    let mut u_right = zeros(chi.d_r(), aw.total_right());
    for (b, (ol, or)) in blocks.iter().zip(aw.leg_offsets()) {
        let lam = c(b.schmidt[0], 0.0);
        for l in 0..b.d_left {
            u_left.set_column(ol + l, &(b.left_frames.column(l) * lam));
        }
        for r in 0..b.d_right {
            u_right.set_column(or + r, &b.right_frames.column(r));
        }
    }
    Ok(LeanDecomposition {
        zeta: canonical_from_aw(&aw),
        aw,
        u_left,
        u_right,
        blocks,
    })
}

pub fn lean_decomposition(chi: &SplittingMap, settings: &Settings) -> Result<LeanDecomposition> {
    if !is_lean(chi, settings) {
        return Err(Error::NotLean);
    }
    let a = strictly_local_algebra(chi, Side::Left, &settings.tol);
    lean_decomposition_with(chi, aw_decomposition(&a, settings)?, &settings.tol)
}

/// Canonical `ζ` for `stloc_L(χ)` with witnesses of `ζ ⊑ χ` and `χ ⊑ ζ`.
pub fn comprehension_balanced_canonical(
    chi: &SplittingMap,
    settings: &Settings,
) -> Result<(SplittingMap, ComprehensionWitness, ComprehensionWitness)> {
    let tol = &settings.tol;
    let dec = balanced_decomposition(chi, settings)?;
    let zeta = dec.zeta.clone();
    let (zl, zr) = (zeta.d_l(), zeta.d_r());
    let (xl, xr) = (chi.d_l(), chi.d_r());
    let k_max = dec.blocks.iter().map(|b| b.rank()).max().unwrap_or(1);
    let offsets = dec.aw.leg_offsets();

    // ζ ⊑ χ: ○|l+m⟩ = |l⟩|m⟩, ●|r⟩ = Σ λ_m |m⟩|r+m⟩.
    let d_m = k_max.max(xl.div_ceil(zl));
    let mut frames = Vec::new();
    let mut targets = Vec::new();
    let mut black = zeros(d_m * xr, zr);
    for (b, &(ol, or)) in dec.blocks.iter().zip(&offsets) {
        let k = b.rank();
        for l in 0..b.d_left {
            for m in 0..k {
                frames.push(b.left_frames.column(l * k + m).into_owned());
                targets.push(tensor_vec(&basis_vector(zl, ol + l), &basis_vector(d_m, m)));
            }
        }
        for r in 0..b.d_right {
            let mut col = ComplexVector::zeros(d_m * xr);
            for (m, &lam) in b.schmidt.iter().enumerate() {
                let f: ComplexVector = b.right_frames.column(m * b.d_right + r).into_owned();
                col += tensor_vec(&basis_vector(d_m, m), &f) * c(lam, 0.0);
            }
            black.set_column(or + r, &col);
        }
    }
    let white = complete_isometry(
        &ComplexMatrix::from_columns(&frames),
        &ComplexMatrix::from_columns(&targets),
        tol,
    )?;
    let forward = ComprehensionWitness {
        d_m,
        black_dot: black,
        white_dot: white,
    };

    // χ ⊑ ζ: ○'|l⟩ = Σ λ_m |l+m⟩|m⟩, ●'|r+m⟩ = |m⟩|r⟩.
    let d_m2 = k_max.max(xr.div_ceil(zr));
    let mut white2 = zeros(xl * d_m2, zl);
    let mut frames = Vec::new();
    let mut targets = Vec::new();
    for (b, &(ol, or)) in dec.blocks.iter().zip(&offsets) {
        let k = b.rank();
        for l in 0..b.d_left {
            let mut col = ComplexVector::zeros(xl * d_m2);
            for (m, &lam) in b.schmidt.iter().enumerate() {
                let f: ComplexVector = b.left_frames.column(l * k + m).into_owned();
                col += tensor_vec(&f, &basis_vector(d_m2, m)) * c(lam, 0.0);
            }
            white2.set_column(ol + l, &col);
        }
        for m in 0..k {
            for r in 0..b.d_right {
                frames.push(b.right_frames.column(m * b.d_right + r).into_owned());
                targets.push(tensor_vec(&basis_vector(d_m2, m), &basis_vector(zr, or + r)));
            }
        }
    }
    let black2 = complete_isometry(
        &ComplexMatrix::from_columns(&frames),
        &ComplexMatrix::from_columns(&targets),
        tol,
    )?;
    let backward = ComprehensionWitness {
        d_m: d_m2,
        black_dot: black2,
        white_dot: white2,
    };
    Ok((zeta, forward, backward))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::linops::{dist, matrix_unit, nullspace, OperatorSubspace};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    /// Brute-force oracle for `stloc`: solve the strict-locality equations
    /// for every operator in a spanning set of `L(H)` and keep those with a
    /// solution.
    fn stloc_oracle(chi: &SplittingMap, side: Side) -> OperatorSubspace {
        let n = chi.d_h();
        let d = chi.d_leg(side);
        let v = chi.isometry();
        // Unknowns: (A, Ã) jointly; equations Aχ† − χ†(lift Ã) = 0 and
        // χA − (lift Ã)χ = 0.
        let unknowns = n * n + d * d;
        let mut cols = Vec::new();
        for k in 0..unknowns {
            let (a, at) = if k < n * n {
                (matrix_unit(n, k / n, k % n), zeros(d, d))
            } else {
                let j = k - n * n;
                (zeros(n, n), matrix_unit(d, j / d, j % d))
            };
            let lifted = chi.lift(&at, side);
            let e1 = &a * v.adjoint() - v.adjoint() * &lifted;
            let e2 = v * &a - &lifted * v;
            cols.push(stack(&vectorize(&e1), &vectorize(&e2)));
        }
        let m = ComplexMatrix::from_columns(&cols);
        let sols: Vec<_> = nullspace(&m, &tol())
            .iter()
            .map(|x| unvectorize(&x.rows(0, n * n).into_owned(), n, n))
            .collect();
        span(n, &sols, &tol())
    }

    fn diag_algebra(n: usize) -> OperatorSubspace {
        let units: Vec<_> = (0..n).map(|i| matrix_unit(n, i, i)).collect();
        span(n, &units, &tol())
    }

    #[test]
    fn rejects_non_isometries() {
        let v = identity(4) * c(2.0, 0.0);
        assert!(matches!(make_splitting_map(v, 2, 2, &tol()), Err(Error::NotIsometry(_))));
        assert!(matches!(make_splitting_map(identity(4), 2, 3, &tol()), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn identity_map_is_full_on_both_legs() {
        let chi = fixtures::chi_tensor();
        let s = Settings::default();
        let l = strictly_local_algebra(&chi, Side::Left, &s.tol);
        let r = strictly_local_algebra(&chi, Side::Right, &s.tol);
        assert_eq!((l.dim(), r.dim()), (4, 9));
        assert!(is_balanced(&chi, &s));
        assert!(is_lean(&chi, &s));
    }

    #[test]
    fn fg_map_stloc_matches_oracle() {
        let chi = fixtures::fg_counterexample();
        let left = strictly_local_algebra(&chi, Side::Left, &tol());
        assert!(crate::linops::subspace_equal(left.space(), &stloc_oracle(&chi, Side::Left), &tol()));
        assert!(crate::linops::subspace_equal(left.space(), &diag_algebra(2), &tol()));
        let right = strictly_local_algebra(&chi, Side::Right, &tol());
        assert_eq!(right.dim(), 1);
        assert!(crate::linops::subspace_equal(right.space(), &stloc_oracle(&chi, Side::Right), &tol()));
        assert!(!is_balanced(&chi, &Settings::default()));
    }

    #[test]
    fn fg_strict_representatives() {
        let chi = fixtures::fg_counterexample();
        let mut d = matrix_unit(2, 0, 0) * c(0.3, 0.0);
        d[(1, 1)] = c(-1.7, 0.0);
        assert!(strictly_local_representative(&chi, &d, Side::Left, &tol()).unwrap().is_some());
        let x = &matrix_unit(2, 0, 1) + &matrix_unit(2, 1, 0);
        assert!(strictly_local_representative(&chi, &x, Side::Left, &tol()).unwrap().is_none());
    }

    #[test]
    fn product_with_fixed_right_vector_is_a_factor_split() {
        // χ|0⟩ = |00⟩, χ|1⟩ = |10⟩ is (1 ⊗ |0⟩): every operator on H is
        // strictly local on the left and only scalars on the right.
        let chi = fixtures::unbalanced_00_10();
        let left = strictly_local_algebra(&chi, Side::Left, &tol());
        let right = strictly_local_algebra(&chi, Side::Right, &tol());
        assert!(crate::linops::subspace_equal(left.space(), &stloc_oracle(&chi, Side::Left), &tol()));
        assert!(crate::linops::subspace_equal(right.space(), &stloc_oracle(&chi, Side::Right), &tol()));
        assert_eq!(left.dim(), 4);
        assert_eq!(right.dim(), 1);
        let s = Settings::default();
        assert!(is_balanced(&chi, &s));
        assert!(is_lean(&chi, &s));
        let p0 = matrix_unit(2, 0, 0);
        assert!(local_representative(&chi, &p0, Side::Right, &tol()).unwrap().is_none());
    }

    #[test]
    fn oplus_map_consistent_and_stloc() {
        let chi = fixtures::chi_oplus();
        let s = Settings::default();
        let cons = consistent_algebra(&chi, Side::Left, &s.tol);
        assert_eq!(cons.dim(), 5);
        let st = strictly_local_algebra(&chi, Side::Left, &s.tol);
        assert_eq!(st.dim(), 5);
        assert!(st.equals(&fixtures::algebra_oplus(), &s.tol));
        assert!(is_balanced(&chi, &s));
        assert!(is_lean(&chi, &s));
    }

    #[test]
    fn consistency_agrees_with_invariance() {
        let chi = fixtures::fg_counterexample();
        for i in 0..4 {
            for j in 0..4 {
                let b = matrix_unit(4, i, j);
                assert_eq!(
                    is_consistent(&chi, &b, Side::Left, &tol()).unwrap(),
                    is_consistent_invariant(&chi, &b, Side::Left, &tol()).unwrap()
                );
            }
        }
        assert!(is_consistent(&chi, &identity(3), Side::Left, &tol()).is_err());
    }

    #[test]
    fn sigma_is_multiplicative_on_cons() {
        let chi = fixtures::fg_counterexample();
        let cons = consistent_algebra(&chi, Side::Left, &tol());
        for x in cons.basis() {
            for y in cons.basis() {
                let lhs = chi.sigma(&(x * y), Side::Left);
                let rhs = chi.sigma(x, Side::Left) * chi.sigma(y, Side::Left);
                assert!(dist(&lhs, &rhs) < 1e-12);
            }
        }
    }

    #[test]
    fn canonical_map_for_oplus_has_expected_legs() {
        let s = Settings::default();
        let chi = canonical_splitting_map(&fixtures::algebra_oplus(), &s).unwrap();
        assert_eq!((chi.d_l(), chi.d_r()), (3, 3));
        let st = strictly_local_algebra(&chi, Side::Left, &s.tol);
        assert!(st.equals(&fixtures::algebra_oplus(), &s.tol));
        assert!(is_lean(&chi, &s));
    }

    #[test]
    fn entangled_map_is_balanced_not_lean() {
        let s = Settings::default();
        let chi = fixtures::entangled_balanced();
        assert!(is_balanced(&chi, &s));
        assert!(!is_lean(&chi, &s));
        assert_eq!(lean_decomposition(&chi, &s).unwrap_err(), Error::NotLean);
        let shape = factor_shape(&chi, &s).unwrap();
        assert_eq!(shape.rank(), 2);
        for l in &shape.schmidt {
            assert!((l - 0.5f64.sqrt()).abs() < 1e-12);
        }
        assert!(dist(&shape.reconstruct(chi.d_l(), chi.d_r()), chi.isometry()) < 1e-10);
    }

    #[test]
    fn ancilla_padding_keeps_leanness() {
        // (V ⊗ 1)χ with V|l⟩ = |l⟩|0⟩: cons_L splits into two full blocks
        // whose commutant is the center.
        let s = Settings::default();
        let base = fixtures::chi_tensor();
        let mut v = zeros(4, 2);
        v[(0, 0)] = c(1.0, 0.0);
        v[(2, 1)] = c(1.0, 0.0);
        let w = tensor(&v, &identity(3)) * base.isometry();
        let chi = make_splitting_map(w, 4, 3, &s.tol).unwrap();
        assert!(is_balanced(&chi, &s));
        assert!(is_lean(&chi, &s));
        let dec = lean_decomposition(&chi, &s).unwrap();
        let rebuilt = tensor(&dec.u_left, &dec.u_right) * dec.zeta.isometry();
        assert!(dist(&rebuilt, chi.isometry()) < 1e-10);
    }

    #[test]
    fn fg_map_cannot_be_decomposed() {
        let s = Settings::default();
        let chi = fixtures::fg_counterexample();
        assert_eq!(balanced_decomposition(&chi, &s).unwrap_err(), Error::NotBalanced);
    }

    #[test]
    fn oplus_components() {
        let s = Settings::default();
        let chi = fixtures::chi_oplus();
        let comps = split_by_atomic_projectors(&chi, &s).unwrap();
        assert_eq!(comps.len(), 2);
        let mut sum = zeros(9, 4);
        for comp in &comps {
            sum += chi.isometry() * &comp.projector;
            let lhs = tensor(&comp.left_support, &identity(3)) * chi.isometry();
            assert!(dist(&lhs, &(chi.isometry() * &comp.projector)) < 1e-10);
        }
        assert!(dist(&sum, chi.isometry()) < 1e-12);
        assert!((&comps[0].left_support * &comps[1].left_support).norm() < 1e-10);
    }

    #[test]
    fn reflexive_nested_witness() {
        let s = Settings::default();
        let a = fixtures::algebra_oplus();
        let (zeta, chi, w) = comprehension_nested_canonical(&a, &a, &s).unwrap();
        assert!(verify_comprehension(&zeta, &chi, &w, &s.tol).unwrap());
        assert_eq!(w.d_m, 2);
    }

    #[test]
    fn scalars_inside_full_algebra() {
        let s = Settings::default();
        let (zeta, chi, w) =
            comprehension_nested_canonical(&VnAlgebra::scalars(3), &VnAlgebra::full(3), &s).unwrap();
        assert_eq!((zeta.d_l(), zeta.d_r()), (1, 3));
        assert_eq!((chi.d_l(), chi.d_r()), (3, 1));
        assert!(verify_comprehension(&zeta, &chi, &w, &s.tol).unwrap());
    }

    #[test]
    fn non_nested_pair_is_rejected() {
        let s = Settings::default();
        let err = comprehension_nested_canonical(&VnAlgebra::full(2), &VnAlgebra::scalars(2), &s).unwrap_err();
        assert_eq!(err, Error::NotNested);
    }

    #[test]
    fn balanced_witnesses_for_entangled_map() {
        let s = Settings::default();
        let chi = fixtures::entangled_balanced();
        let (zeta, fwd, bwd) = comprehension_balanced_canonical(&chi, &s).unwrap();
        assert!(verify_comprehension(&zeta, &chi, &fwd, &s.tol).unwrap());
        assert!(verify_comprehension(&chi, &zeta, &bwd, &s.tol).unwrap());
    }

    #[test]
    fn witness_shape_errors() {
        let chi = fixtures::chi_tensor();
        let w = ComprehensionWitness {
            d_m: 1,
            black_dot: identity(2),
            white_dot: identity(2),
        };
        assert!(comprehension_residual(&chi, &chi, &w).is_err());
        let w = ComprehensionWitness {
            d_m: 1,
            black_dot: identity(3),
            white_dot: identity(2),
        };
        assert!(verify_comprehension(&chi, &chi, &w, &tol()).unwrap());
    }
}
