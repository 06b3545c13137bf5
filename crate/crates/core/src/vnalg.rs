//! Unital *-subalgebras of `L(H)`: generation, commutant and center, atomic
//! and minimal projectors, the constructive Artin–Wedderburn decomposition,
//! the trace over an algebra and supports of homomorphisms.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{mismatch, Error, Result};
use crate::linops::{
    c, commutator, hermitian_eigen, identity, intersect, nullspace, partial_trace,
    pivoted_range_basis, random_element_in, random_hermitian_in, subspace_equal, svd, tensor,
    unvectorize, zeros, ComplexMatrix, OperatorSubspace, Settings, Side, Tolerance,
};

const COMMUTANT_SALT: u64 = 0xc0_77a7;
const REFINE_SALT: u64 = 0x2e_f10e;
const RESEEDS: u64 = 3;

/// A unital *-subalgebra of `L(C^n)` stored through an orthonormal basis.
#[derive(Clone, Debug)]
pub struct VnAlgebra {
    space: OperatorSubspace,
}

impl VnAlgebra {
    /// Validate that `space` is unital, adjoint-closed and product-closed.
    pub fn from_subspace(space: OperatorSubspace, tol: &Tolerance) -> Result<Self> {
        let n = space.dim_space();
        if !space.contains(&identity(n), tol) {
            return Err(Error::NotAnAlgebra("identity missing".into()));
        }
        if !space.is_adjoint_closed(tol) {
            return Err(Error::NotAnAlgebra("not closed under adjoint".into()));
        }
        for x in space.basis() {
            for y in space.basis() {
                if !space.contains(&(x * y), tol) {
                    return Err(Error::NotAnAlgebra("not closed under products".into()));
                }
            }
        }
        Ok(Self { space })
    }

    pub(crate) fn from_subspace_unchecked(space: OperatorSubspace) -> Self {
        Self { space }
    }

    pub fn full(n: usize) -> Self {
        Self::from_subspace_unchecked(OperatorSubspace::full(n))
    }

    pub fn scalars(n: usize) -> Self {
        let unit = identity(n) / c((n as f64).sqrt(), 0.0);
        Self::from_subspace_unchecked(OperatorSubspace::from_orthonormal(n, vec![unit]))
    }

    pub fn dim_space(&self) -> usize {
        self.space.dim_space()
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn space(&self) -> &OperatorSubspace {
        &self.space
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        self.space.basis()
    }

    pub fn contains(&self, x: &ComplexMatrix, tol: &Tolerance) -> bool {
        self.space.contains(x, tol)
    }

    pub fn is_commutative(&self, tol: &Tolerance) -> bool {
        let b = self.basis();
        (0..b.len()).all(|i| {
            (i + 1..b.len()).all(|j| commutator(&b[i], &b[j]).norm() <= tol.scaled(1.0))
        })
    }

    pub fn equals(&self, other: &VnAlgebra, tol: &Tolerance) -> bool {
        subspace_equal(&self.space, &other.space, tol)
    }
}

/// Smallest unital *-algebra containing the generators.
pub fn generate_algebra(generators: &[ComplexMatrix], dim: usize, tol: &Tolerance) -> Result<VnAlgebra> {
    for g in generators {
        if g.shape() != (dim, dim) {
            return Err(mismatch(format!(
                "generator of shape {:?} for dimension {dim}",
                g.shape()
            )));
        }
    }
    let mut letters: Vec<ComplexMatrix> = Vec::new();
    for g in generators {
        letters.push(g.clone());
        letters.push(g.adjoint());
    }
    let mut space = OperatorSubspace::zero(dim);
    space.extend_with(&identity(dim), tol);
    for l in &letters {
        space.extend_with(l, tol);
    }
    let cap = (dim * dim).max(1);
    for _ in 0..cap {
        let snapshot = space.basis().to_vec();
        let mut grew = false;
        for l in &letters {
            for b in &snapshot {
                grew |= space.extend_with(&(l * b), tol);
            }
        }
        if !grew {
            return Ok(VnAlgebra::from_subspace_unchecked(space));
        }
    }
    Err(Error::ClosureStall(cap))
}

/// Operators commuting with every operator in `ops`, as a subspace.
pub(crate) fn commutant_of(ops: &[ComplexMatrix], n: usize, tol: &Tolerance) -> OperatorSubspace {
    let n2 = n * n;
    let id = identity(n);
    let mut stacked = zeros(n2 * ops.len(), n2);
    for (k, b) in ops.iter().enumerate() {
        let sup = tensor(b, &id) - tensor(&id, &b.transpose());
        stacked.view_mut((k * n2, 0), (n2, n2)).copy_from(&sup);
    }
    let basis = nullspace(&stacked, tol)
        .iter()
        .map(|v| unvectorize(v, n, n))
        .collect();
    OperatorSubspace::from_orthonormal(n, basis)
}

fn commutes_with_all(candidate: &OperatorSubspace, ops: &[ComplexMatrix], tol: &Tolerance) -> bool {
    candidate
        .basis()
        .iter()
        .all(|x| ops.iter().all(|b| commutator(x, b).norm() <= tol.scaled(b.norm())))
}

/// `{X : XB = BX for all B ∈ a}`.
///
/// Two random elements of `a` and their adjoints generate `a` almost surely,
/// so their commutant is computed first and then checked against the whole
/// basis; the full stacked system is the fallback.
pub fn commutant(a: &VnAlgebra, settings: &Settings) -> VnAlgebra {
    let n = a.dim_space();
    let tol = &settings.tol;
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed ^ COMMUTANT_SALT);
    let mut probes = Vec::new();
    for _ in 0..2 {
        let x = random_element_in(a.space(), &mut rng);
        probes.push(x.adjoint());
        probes.push(x);
    }
    let candidate = commutant_of(&probes, n, tol);
    let space = if commutes_with_all(&candidate, a.basis(), tol) {
        candidate
    } else {
        commutant_of(a.basis(), n, tol)
    };
    VnAlgebra::from_subspace_unchecked(space)
}

pub fn center(a: &VnAlgebra, settings: &Settings) -> VnAlgebra {
    let comm = commutant(a, settings);
    VnAlgebra::from_subspace_unchecked(intersect(a.space(), comm.space(), &settings.tol))
}

/// Group sorted eigenvalues whose neighbours are closer than the gap.
fn cluster_eigenvalues(values: &[f64]) -> Vec<Vec<usize>> {
    let rho = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let gap = 1e-7 * rho.max(1.0);
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for (k, &v) in values.iter().enumerate() {
        match clusters.last_mut() {
            Some(last) if (v - values[*last.last().unwrap()]).abs() < gap => last.push(k),
            _ => clusters.push(vec![k]),
        }
    }
    clusters
}

fn cluster_projector(vectors: &ComplexMatrix, cluster: &[usize]) -> ComplexMatrix {
    let cols: Vec<_> = cluster.iter().map(|&k| vectors.column(k).into_owned()).collect();
    let v = ComplexMatrix::from_columns(&cols);
    &v * v.adjoint()
}

/// First basis index on which the projector has non-negligible weight.
pub(crate) fn leading_index(p: &ComplexMatrix) -> usize {
    (0..p.nrows()).find(|&i| p[(i, i)].re > 1e-8).unwrap_or(p.nrows())
}

/// Minimal projectors of a commutative algebra, read off the spectrum of a
/// random Hermitian element.
pub fn atomic_projectors(z: &VnAlgebra, settings: &Settings) -> Result<Vec<ComplexMatrix>> {
    let tol = &settings.tol;
    if !z.is_commutative(tol) {
        return Err(Error::NotCommutative);
    }
    for attempt in 0..=RESEEDS {
        let x = random_hermitian_in(z.space(), settings.reseeded(attempt).seed, tol)?;
        let (values, vectors) = hermitian_eigen(&x);
        let clusters = cluster_eigenvalues(&values);
        if clusters.len() != z.dim() {
            continue;
        }
        let mut projectors: Vec<_> = clusters.iter().map(|cl| cluster_projector(&vectors, cl)).collect();
        if projectors.iter().all(|p| z.contains(p, tol)) {
            projectors.sort_by_key(leading_index);
            return Ok(projectors);
        }
    }
    Err(Error::DegenerateSampling)
}

/// Maximal family of mutually orthogonal minimal projectors, grouped into
/// classes of projectors connected through the algebra.
#[derive(Clone, Debug)]
pub struct MinimalProjectorFamily {
    pub projectors: Vec<ComplexMatrix>,
    /// Indices into `projectors`; classes and members are ordered by
    /// leading index.
    pub classes: Vec<Vec<usize>>,
}

/// Threshold for deciding that a structural quantity is nonzero. Genuine
/// values scale like `1/dim`, far above numerical noise.
pub(crate) fn significant(tol: &Tolerance) -> f64 {
    tol.rank_cutoff(1.0).sqrt()
}

/// Split every projector of `start` until each compression `PaP` is `CP`.
pub(crate) fn refine_projectors(
    a: &VnAlgebra,
    start: Vec<ComplexMatrix>,
    settings: &Settings,
) -> Result<Vec<ComplexMatrix>> {
    let tol = &settings.tol;
    let mut queue = start;
    let mut done = Vec::new();
    let mut draws = 0u64;
    while let Some(p) = queue.pop() {
        let q = pivoted_range_basis(&p, tol);
        let compressed = a.space().compress(&q, tol);
        if compressed.dim() <= 1 {
            done.push(p);
            continue;
        }
        let mut split = None;
        for _ in 0..=RESEEDS {
            draws += 1;
            let seed = settings.reseeded(REFINE_SALT.wrapping_add(draws)).seed;
            let x = random_hermitian_in(&compressed, seed, tol)?;
            let (values, vectors) = hermitian_eigen(&x);
            let clusters = cluster_eigenvalues(&values);
            if clusters.len() >= 2 {
                split = Some(
                    clusters
                        .iter()
                        .map(|cl| &q * cluster_projector(&vectors, cl) * q.adjoint())
                        .collect::<Vec<_>>(),
                );
                break;
            }
        }
        let pieces = split.ok_or_else(|| {
            Error::RefinementStall(format!("compression of dimension {} did not split", compressed.dim()))
        })?;
        for piece in pieces {
            if !a.contains(&piece, tol) {
                return Err(Error::RefinementStall("spectral projector left the algebra".into()));
            }
            queue.push(piece);
        }
    }
    done.sort_by_key(leading_index);
    Ok(done)
}

/// The compression `P_i a P_j` with the largest norm over the basis.
pub(crate) fn largest_compression(a: &VnAlgebra, pi: &ComplexMatrix, pj: &ComplexMatrix) -> (f64, ComplexMatrix) {
    a.basis()
        .iter()
        .map(|b| {
            let m = pi * b * pj;
            (m.norm(), m)
        })
        .fold((0.0, zeros(pi.nrows(), pi.ncols())), |best, cur| if cur.0 > best.0 { cur } else { best })
}

pub(crate) fn classes_of(a: &VnAlgebra, projectors: &[ComplexMatrix], tol: &Tolerance) -> Vec<Vec<usize>> {
    let k = projectors.len();
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        parent[i] = r;
        r
    }
    for i in 0..k {
        for j in i + 1..k {
            let (nrm, _) = largest_compression(a, &projectors[i], &projectors[j]);
            if nrm > significant(tol) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..k {
        let r = find(&mut parent, i);
        match classes.iter_mut().find(|cl| find(&mut parent, cl[0]) == r) {
            Some(cl) => cl.push(i),
            None => classes.push(vec![i]),
        }
    }
    classes
}

pub fn minimal_projector_family(a: &VnAlgebra, settings: &Settings) -> Result<MinimalProjectorFamily> {
    let projectors = refine_projectors(a, vec![identity(a.dim_space())], settings)?;
    let classes = classes_of(a, &projectors, &settings.tol);
    Ok(MinimalProjectorFamily { projectors, classes })
}

/// Isometric part of the polar decomposition, restricted to the support.
pub(crate) fn polar_part(m: &ComplexMatrix, tol: &Tolerance) -> ComplexMatrix {
    let d = svd(m);
    let smax = d.singular.first().copied().unwrap_or(0.0);
    let rank = d.singular.iter().filter(|&&s| s > tol.relative_rank.max(1e-12) * smax.max(1e-300)).count();
    d.u.columns(0, rank) * d.v_t.rows(0, rank)
}

/// One simple summand `L(C^d_left) ⊗ 1_{d_right}` in AW coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AwBlock {
    pub d_left: usize,
    pub d_right: usize,
    /// First row of the block in the coordinates of `unitary`.
    pub offset: usize,
}

impl AwBlock {
    pub fn size(&self) -> usize {
        self.d_left * self.d_right
    }
}

/// `U a U† = ⊕_i L(C^{d_L^i}) ⊗ 1_{d_R^i}` with the atomic projectors of
/// the center in original coordinates.
#[derive(Clone, Debug)]
pub struct AwDecomposition {
    pub unitary: ComplexMatrix,
    pub blocks: Vec<AwBlock>,
    pub atomic: Vec<ComplexMatrix>,
}

impl AwDecomposition {
    pub fn dim_space(&self) -> usize {
        self.unitary.nrows()
    }

    pub fn total_left(&self) -> usize {
        self.blocks.iter().map(|b| b.d_left).sum()
    }

    pub fn total_right(&self) -> usize {
        self.blocks.iter().map(|b| b.d_right).sum()
    }

    pub fn shape(&self) -> Vec<(usize, usize)> {
        self.blocks.iter().map(|b| (b.d_left, b.d_right)).collect()
    }

    /// Offsets of each block inside `⊕ C^{d_L^i}` and `⊕ C^{d_R^i}`.
    pub fn leg_offsets(&self) -> Vec<(usize, usize)> {
        let (mut l, mut r) = (0, 0);
        self.blocks
            .iter()
            .map(|b| {
                let out = (l, r);
                l += b.d_left;
                r += b.d_right;
                out
            })
            .collect()
    }

    /// Column of `U†` for the basis vector `|l, r⟩` of block `i`.
    pub fn block_vector(&self, i: usize, l: usize, r: usize) -> nalgebra::DVector<crate::C64> {
        let b = self.blocks[i];
        self.unitary.row(b.offset + l * b.d_right + r).adjoint()
    }

    /// `U† (E_{l l'} ⊗ 1) U` restricted to block `i`.
    pub fn left_unit(&self, i: usize, l: usize, lp: usize) -> ComplexMatrix {
        let b = self.blocks[i];
        let mut m = zeros(self.dim_space(), self.dim_space());
        for r in 0..b.d_right {
            m[(b.offset + l * b.d_right + r, b.offset + lp * b.d_right + r)] = c(1.0, 0.0);
        }
        self.unitary.adjoint() * m * &self.unitary
    }

    /// `U† (1 ⊗ E_{r r'}) U` restricted to block `i`.
    pub fn right_unit(&self, i: usize, r: usize, rp: usize) -> ComplexMatrix {
        let b = self.blocks[i];
        let mut m = zeros(self.dim_space(), self.dim_space());
        for l in 0..b.d_left {
            m[(b.offset + l * b.d_right + r, b.offset + l * b.d_right + rp)] = c(1.0, 0.0);
        }
        self.unitary.adjoint() * m * &self.unitary
    }
}

/// A class of minimal projectors together with connecting partial
/// isometries `S_i` (`S_i S_i† = P_rep`, `S_i† S_i = P_i`).
pub(crate) struct ClassFrame {
    pub projectors: Vec<ComplexMatrix>,
    pub connectors: Vec<ComplexMatrix>,
    pub rep_basis: ComplexMatrix,
}

impl ClassFrame {
    pub fn leading(&self) -> usize {
        self.projectors.iter().map(leading_index).min().unwrap_or(usize::MAX)
    }
}

/// Connectors from every member to the first member of the class.
pub(crate) fn connect_class(
    a: &VnAlgebra,
    projectors: Vec<ComplexMatrix>,
    tol: &Tolerance,
) -> Result<ClassFrame> {
    let rep = projectors[0].clone();
    let rep_basis = pivoted_range_basis(&rep, tol);
    let mut connectors = vec![rep.clone()];
    for p in &projectors[1..] {
        let (nrm, m) = largest_compression(a, &rep, p);
        if nrm <= significant(tol) {
            return Err(Error::RefinementStall("class members are not connected".into()));
        }
        connectors.push(polar_part(&m, tol));
    }
    Ok(ClassFrame {
        projectors,
        connectors,
        rep_basis,
    })
}

/// `W_I = Σ_i |i⟩ ⊗ E† S_i` stacked over the classes in the given order.
pub(crate) fn assemble_aw(frames: &[ClassFrame], n: usize, tol: &Tolerance) -> Result<AwDecomposition> {
    let mut unitary = zeros(n, n);
    let mut blocks = Vec::new();
    let mut atomic = Vec::new();
    let mut offset = 0;
    for f in frames {
        let q = f.rep_basis.ncols();
        let d_left = f.projectors.len();
        if offset + d_left * q > n {
            return Err(Error::RefinementStall("block sizes exceed the space".into()));
        }
        for (i, s) in f.connectors.iter().enumerate() {
            let rows = f.rep_basis.adjoint() * s;
            unitary.view_mut((offset + i * q, 0), (q, n)).copy_from(&rows);
        }
        blocks.push(AwBlock {
            d_left,
            d_right: q,
            offset,
        });
        let mut pi = zeros(n, n);
        for p in &f.projectors {
            pi += p;
        }
        atomic.push(pi);
        offset += d_left * q;
    }
    let defect = (&unitary * unitary.adjoint() - identity(n)).norm();
    if offset != n || defect > tol.scaled(n as f64).max(1e-8) {
        return Err(Error::RefinementStall(format!("assembled unitary has defect {defect:.3e}")));
    }
    Ok(AwDecomposition {
        unitary,
        blocks,
        atomic,
    })
}

/// Constructive Artin–Wedderburn decomposition.
///
/// Blocks are ordered by the leading basis index of their projectors, then
/// by `(d_left, d_right)`.
pub fn aw_decomposition(a: &VnAlgebra, settings: &Settings) -> Result<AwDecomposition> {
    let tol = &settings.tol;
    let family = minimal_projector_family(a, settings)?;
    let mut frames = Vec::new();
    for class in &family.classes {
        let members = class.iter().map(|&k| family.projectors[k].clone()).collect();
        frames.push(connect_class(a, members, tol)?);
    }
    frames.sort_by_key(|f| (f.leading(), f.projectors.len(), f.rep_basis.ncols()));
    assemble_aw(&frames, a.dim_space(), tol)
}

/// `Tr_b(m) = ⊕_i Tr_{H_R^i}(π_i m π_i)` where the AW decomposition is of
/// the commutant of `b`.
pub fn trace_over_algebra(
    m: &ComplexMatrix,
    b: &VnAlgebra,
    aw_of_commutant: &AwDecomposition,
) -> Result<ComplexMatrix> {
    let n = aw_of_commutant.dim_space();
    if m.shape() != (n, n) || b.dim_space() != n {
        return Err(mismatch(format!(
            "operator {:?}, algebra on {}, decomposition on {n}",
            m.shape(),
            b.dim_space()
        )));
    }
    let right_dim: usize = aw_of_commutant.blocks.iter().map(|bl| bl.d_right * bl.d_right).sum();
    if right_dim != b.dim() {
        return Err(Error::AlgebraMismatch);
    }
    let u = &aw_of_commutant.unitary;
    let rotated = u * m * u.adjoint();
    let mut out = zeros(aw_of_commutant.total_left(), aw_of_commutant.total_left());
    let mut at = 0;
    for bl in &aw_of_commutant.blocks {
        let sub = rotated.view((bl.offset, bl.offset), (bl.size(), bl.size())).into_owned();
        let reduced = partial_trace(&sub, bl.d_left, bl.d_right, Side::Right)?;
        out.view_mut((at, at), (bl.d_left, bl.d_left)).copy_from(&reduced);
        at += bl.d_left;
    }
    Ok(out)
}

/// Sum of the atomic projectors of the center that the linear map with the
/// given basis images does not annihilate. The map must be a
/// *-homomorphism.
pub fn homomorphism_support(
    a: &VnAlgebra,
    images: &[ComplexMatrix],
    settings: &Settings,
) -> Result<ComplexMatrix> {
    let tol = &settings.tol;
    if images.len() != a.dim() {
        return Err(mismatch(format!("{} images for an algebra of dimension {}", images.len(), a.dim())));
    }
    let shape = images.first().map(|m| m.shape()).unwrap_or((0, 0));
    if images.iter().any(|m| m.shape() != shape) {
        return Err(mismatch("images of differing shapes"));
    }
    let apply = |x: &ComplexMatrix| -> ComplexMatrix {
        let mut out = DMatrix::zeros(shape.0, shape.1);
        for (coef, img) in a.space().coefficients(x).iter().zip(images) {
            out += img * *coef;
        }
        out
    };
    let basis = a.basis();
    for (i, bi) in basis.iter().enumerate() {
        if (apply(&bi.adjoint()) - images[i].adjoint()).norm() > tol.scaled(1.0) * 10.0 {
            return Err(Error::NotHomomorphism("adjoints are not preserved".into()));
        }
        for (j, bj) in basis.iter().enumerate() {
            let lhs = apply(&(bi * bj));
            let rhs = &images[i] * &images[j];
            if (lhs - rhs).norm() > tol.scaled(images[i].norm() * images[j].norm()) * 10.0 {
                return Err(Error::NotHomomorphism("products are not preserved".into()));
            }
        }
    }
    let z = center(a, settings);
    let n = a.dim_space();
    let mut mu = zeros(n, n);
    for p in atomic_projectors(&z, settings)? {
        if apply(&p).norm() > significant(tol) {
            mu += p;
        }
    }
    Ok(mu)
}
