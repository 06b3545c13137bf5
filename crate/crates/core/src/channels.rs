//! Quantum channels in Kraus form, Stinespring dilations and their
//! relation, traces along lean splitting maps, and semi-causality tests
//! with the matching semi-localisation.

use crate::error::{mismatch, Error, Result};
use crate::linops::{
    complete_isometry, hermitian_eigen, identity, isometry_defect, matrix_unit,
    orthonormal_complement, partial_trace, tensor, zeros, ComplexMatrix, ComplexVector,
    PseudoInverse, Settings, Side, Tolerance,
};
use crate::splitmap::{is_lean, lean_decomposition, lean_decomposition_with, strictly_local_algebra, SplittingMap};
use crate::vnalg::{aw_decomposition, commutant, VnAlgebra};

/// A completely positive trace-preserving map `L(C^d_in) → L(C^d_out)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    d_in: usize,
    d_out: usize,
    kraus: Vec<ComplexMatrix>,
    choi: ComplexMatrix,
}

/// `Σ_ij |i⟩⟨j| ⊗ ℰ(|i⟩⟨j|)` from Kraus operators.
fn choi_of(d_in: usize, d_out: usize, kraus: &[ComplexMatrix]) -> ComplexMatrix {
    let n = d_in * d_out;
    let mut choi = zeros(n, n);
    for k in kraus {
        let w = ComplexVector::from_fn(n, |idx, _| k[(idx % d_out, idx / d_out)]);
        choi += &w * w.adjoint();
    }
    choi
}

impl Channel {
    pub fn new(d_in: usize, d_out: usize, kraus: Vec<ComplexMatrix>, tol: &Tolerance) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::InvalidChannel("no Kraus operators".into()));
        }
        if let Some(k) = kraus.iter().find(|k| k.shape() != (d_out, d_in)) {
            return Err(mismatch(format!("Kraus operator {:?} for a {d_in} -> {d_out} channel", k.shape())));
        }
        if kraus.iter().any(|k| k.iter().any(|z| !z.re.is_finite() || !z.im.is_finite())) {
            return Err(Error::InvalidChannel("non-finite entry".into()));
        }
        let mut sum = zeros(d_in, d_in);
        for k in &kraus {
            sum += k.adjoint() * k;
        }
        let defect = (sum - identity(d_in)).norm();
        if defect > tol.scaled((d_in as f64).sqrt()) {
            return Err(Error::NotTracePreserving(defect));
        }
        let choi = choi_of(d_in, d_out, &kraus);
        let (eig, _) = hermitian_eigen(&choi);
        let trace = choi.trace().re;
        let lowest = eig.first().copied().unwrap_or(0.0);
        if lowest < -1e-9 * trace {
            return Err(Error::NotCompletelyPositive(lowest));
        }
        Ok(Self {
            d_in,
            d_out,
            kraus,
            choi,
        })
    }

    pub fn from_unitary(u: &ComplexMatrix, tol: &Tolerance) -> Result<Self> {
        Self::new(u.ncols(), u.nrows(), vec![u.clone()], tol)
    }

    /// Channel with the minimal number of Kraus operators for a Choi matrix.
    pub fn from_choi(choi: &ComplexMatrix, d_in: usize, d_out: usize, tol: &Tolerance) -> Result<Self> {
        Self::new(d_in, d_out, minimal_kraus(choi, d_in, d_out, tol), tol)
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn choi(&self) -> &ComplexMatrix {
        &self.choi
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.shape() != (self.d_in, self.d_in) {
            return Err(mismatch(format!("input {:?} for channel on {}", rho.shape(), self.d_in)));
        }
        Ok(self
            .kraus
            .iter()
            .fold(zeros(self.d_out, self.d_out), |acc, k| acc + k * rho * k.adjoint()))
    }

    /// `self ∘ first`, compressed to a minimal Kraus form.
    pub fn after(&self, first: &Channel, tol: &Tolerance) -> Result<Channel> {
        if first.d_out != self.d_in {
            return Err(mismatch("channels do not compose"));
        }
        let mut kraus = Vec::new();
        for a in &self.kraus {
            for b in &first.kraus {
                kraus.push(a * b);
            }
        }
        let choi = choi_of(first.d_in, self.d_out, &kraus);
        Channel::from_choi(&choi, first.d_in, self.d_out, tol)
    }

    pub fn tensor(&self, other: &Channel, tol: &Tolerance) -> Result<Channel> {
        let mut kraus = Vec::new();
        for a in &self.kraus {
            for b in &other.kraus {
                kraus.push(tensor(a, b));
            }
        }
        Channel::new(self.d_in * other.d_in, self.d_out * other.d_out, kraus, tol)
    }
}

pub fn channel_from_kraus(kraus: Vec<ComplexMatrix>, d_in: usize, d_out: usize, tol: &Tolerance) -> Result<Channel> {
    Channel::new(d_in, d_out, kraus, tol)
}

fn minimal_kraus(choi: &ComplexMatrix, d_in: usize, d_out: usize, tol: &Tolerance) -> Vec<ComplexMatrix> {
    let (values, vectors) = hermitian_eigen(choi);
    let top = values.iter().fold(0.0f64, |m, v| m.max(*v));
    let cut = tol.rank_cutoff(top);
    let mut kraus = Vec::new();
    for k in (0..values.len()).rev() {
        if values[k] <= cut {
            continue;
        }
        let s = values[k].sqrt();
        kraus.push(ComplexMatrix::from_fn(d_out, d_in, |o, i| vectors[(i * d_out + o, k)] * s));
    }
    if kraus.is_empty() {
        kraus.push(zeros(d_out, d_in));
    }
    kraus
}

/// Isometry `V: C^d_in → C^d_out ⊗ C^d_env` with `ℰ(ρ) = Tr_env(VρV†)`.
#[derive(Clone, Debug, PartialEq)]
pub struct StinespringDilation {
    pub isometry: ComplexMatrix,
    pub d_out: usize,
    pub d_env: usize,
    /// Environment dimension equals the Choi rank.
    pub minimal: bool,
}

impl StinespringDilation {
    pub fn from_kraus(kraus: &[ComplexMatrix]) -> Self {
        let (d_out, d_in) = kraus[0].shape();
        let d_env = kraus.len();
        let isometry = ComplexMatrix::from_fn(d_out * d_env, d_in, |row, i| kraus[row % d_env][(row / d_env, i)]);
        Self {
            isometry,
            d_out,
            d_env,
            minimal: false,
        }
    }

    pub fn d_in(&self) -> usize {
        self.isometry.ncols()
    }

    pub fn kraus(&self) -> Vec<ComplexMatrix> {
        (0..self.d_env)
            .map(|k| ComplexMatrix::from_fn(self.d_out, self.d_in(), |o, i| self.isometry[(o * self.d_env + k, i)]))
            .collect()
    }

    pub fn channel(&self, tol: &Tolerance) -> Result<Channel> {
        Channel::new(self.d_in(), self.d_out, self.kraus(), tol)
    }

    /// `(1 ⊗ W)V` for an isometry `W` on the environment.
    pub fn padded(&self, w: &ComplexMatrix) -> Result<Self> {
        if w.ncols() != self.d_env {
            return Err(mismatch("environment isometry has the wrong input dimension"));
        }
        Ok(Self {
            isometry: tensor(&identity(self.d_out), w) * &self.isometry,
            d_out: self.d_out,
            d_env: w.nrows(),
            minimal: self.minimal && w.nrows() == self.d_env,
        })
    }
}

/// Minimal dilation from the Choi eigendecomposition, or the dilation given
/// by the stored Kraus operators.
pub fn stinespring(e: &Channel, minimal: bool, tol: &Tolerance) -> StinespringDilation {
    if minimal {
        StinespringDilation {
            minimal: true,
            ..StinespringDilation::from_kraus(&minimal_kraus(e.choi(), e.d_in, e.d_out, tol))
        }
    } else {
        StinespringDilation::from_kraus(&e.kraus)
    }
}

/// Environment map `X` with `X T_mat = U_mat` for a minimal `T`.
fn environment_map(t: &StinespringDilation, u: &StinespringDilation, tol: &Tolerance) -> ComplexMatrix {
    let flat = |d: &StinespringDilation| {
        ComplexMatrix::from_fn(d.d_env, d.d_out * d.d_in(), |e, idx| {
            d.isometry[((idx / d.d_in()) * d.d_env + e, idx % d.d_in())]
        })
    };
    let (tm, um) = (flat(t), flat(u));
    let pinv = PseudoInverse::new(&tm.adjoint(), tol);
    let mut x = zeros(u.d_env, t.d_env);
    for j in 0..u.d_env {
        let rhs: ComplexVector = um.row(j).adjoint();
        let (col, _) = pinv.solve(&rhs);
        x.set_row(j, &col.adjoint());
    }
    x
}

/// Isometry `W` with `V = (1 ⊗ W)U` for two dilations of one channel,
/// `U` having the smaller environment.
pub fn relate_dilations(u: &StinespringDilation, v: &StinespringDilation, tol: &Tolerance) -> Result<ComplexMatrix> {
    if u.d_in() != v.d_in() || u.d_out != v.d_out {
        return Err(mismatch("dilations of channels with different dimensions"));
    }
    if u.d_env > v.d_env {
        return Err(Error::DimensionOrder);
    }
    let dev = (choi_of(u.d_in(), u.d_out, &u.kraus()) - choi_of(v.d_in(), v.d_out, &v.kraus())).norm();
    if dev > tol.scaled(u.d_in() as f64).max(1e-8) {
        return Err(Error::NotSameChannel(dev));
    }
    let t = StinespringDilation::from_kraus(&minimal_kraus(
        &choi_of(u.d_in(), u.d_out, &u.kraus()),
        u.d_in(),
        u.d_out,
        tol,
    ));
    let wu = environment_map(&t, u, tol);
    let wv = environment_map(&t, v, tol);
    complete_isometry(&wu, &wv, tol)
}

/// `Tr_χ(ρ) = Tr_R(χρχ†)`.
pub fn chi_trace(chi: &SplittingMap, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    if rho.shape() != (chi.d_h(), chi.d_h()) {
        return Err(mismatch(format!("operator {:?} on a domain of dimension {}", rho.shape(), chi.d_h())));
    }
    let v = chi.isometry();
    partial_trace(&(v * rho * v.adjoint()), chi.d_l(), chi.d_r(), Side::Right)
}

/// Isometry `U` with `Tr_χ(ρ) = U Tr_b(ρ) U†` for a lean `χ` whose right
/// strictly local algebra is `b`.
///
/// `Tr_b` is taken relative to `aw_decomposition(commutant(b))` computed
/// with the same settings.
pub fn trace_equivalence_isometry(chi: &SplittingMap, b: &VnAlgebra, settings: &Settings) -> Result<ComplexMatrix> {
    let tol = &settings.tol;
    if b.dim_space() != chi.d_h() {
        return Err(mismatch("algebra and map act on different spaces"));
    }
    if !is_lean(chi, settings) {
        return Err(Error::NotLean);
    }
    if !strictly_local_algebra(chi, Side::Right, tol).equals(b, tol) {
        return Err(Error::AlgebraMismatch);
    }
    let aw = aw_decomposition(&commutant(b, settings), settings)?;
    Ok(lean_decomposition_with(chi, aw, tol)?.u_left)
}

/// Recovery channel `L(H_L^χ) → L(H)` inverting `Tr_χ` on its image.
pub fn recovery_channel(chi: &SplittingMap, settings: &Settings) -> Result<Channel> {
    let tol = &settings.tol;
    let dec = lean_decomposition(chi, settings)?;
    let n = chi.d_h();
    let mut v = zeros(n, chi.d_l());
    for (b, (ol, or)) in dec.blocks.iter().zip(dec.aw.leg_offsets()) {
        let anchor: ComplexVector = dec.u_right.column(or).into_owned();
        for l in 0..b.d_left {
            let psi: ComplexVector = dec.u_left.column(ol + l).into_owned();
            let back = chi.isometry().adjoint() * crate::linops::tensor_vec(&psi, &anchor);
            v += back * psi.adjoint();
        }
    }
    let mut kraus = vec![v];
    let rest = orthonormal_complement(&dec.u_left, tol);
    for k in rest.column_iter() {
        let mut m = zeros(n, chi.d_l());
        m.set_row(0, &k.adjoint());
        kraus.push(m);
    }
    Channel::new(chi.d_l(), n, kraus, tol)
}

/// `[U† B U, A] = 0` for all basis elements of `a` and `b`.
pub fn heisenberg_semicausal(u: &ComplexMatrix, a: &VnAlgebra, b: &VnAlgebra, tol: &Tolerance) -> Result<bool> {
    if u.nrows() != u.ncols() {
        return Err(Error::NotUnitary(f64::INFINITY));
    }
    let defect = isometry_defect(u);
    if defect > tol.scaled((u.nrows() as f64).sqrt()) {
        return Err(Error::NotUnitary(defect));
    }
    if a.dim_space() != u.ncols() || b.dim_space() != u.nrows() {
        return Err(mismatch("algebras do not match the unitary"));
    }
    for y in b.basis() {
        let pulled = u.adjoint() * y * u;
        for x in a.basis() {
            if (&pulled * x - x * &pulled).norm() > tol.scaled(1.0) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Channel `L(H_L^χ) → L(H_L^ζ)` given by Kraus operators `(1 ⊗ ⟨r|)ζ`.
fn chi_trace_kraus(chi: &SplittingMap) -> Vec<ComplexMatrix> {
    (0..chi.d_r())
        .map(|r| {
            let sel = tensor(&identity(chi.d_l()), &matrix_unit(chi.d_r(), 0, r).rows(0, 1).into_owned());
            sel * chi.isometry()
        })
        .collect()
}

fn check_channel_maps(e: &Channel, chi_a_prime: &SplittingMap, chi_b: &SplittingMap) -> Result<()> {
    if chi_a_prime.d_h() != e.d_in || chi_b.d_h() != e.d_out {
        return Err(mismatch("splitting maps do not match the channel"));
    }
    Ok(())
}

/// Candidate `ℰ̃ = Tr_{χ_B} ∘ ℰ ∘ ℱ`, returned when
/// `Tr_{χ_B}(ℰ(ρ)) = ℰ̃(Tr_{χ_A'}(ρ))` holds on all matrix units.
pub fn schroedinger_semicausal(
    e: &Channel,
    chi_a_prime: &SplittingMap,
    chi_b: &SplittingMap,
    settings: &Settings,
) -> Result<Option<Channel>> {
    let tol = &settings.tol;
    check_channel_maps(e, chi_a_prime, chi_b)?;
    if !is_lean(chi_b, settings) {
        return Err(Error::NotLean);
    }
    let recovery = recovery_channel(chi_a_prime, settings)?;
    let trace_b = Channel::new(chi_b.d_h(), chi_b.d_l(), chi_trace_kraus(chi_b), tol)?;
    let candidate = trace_b.after(&e.after(&recovery, tol)?, tol)?;
    let n = e.d_in;
    for i in 0..n {
        for j in 0..n {
            let unit = matrix_unit(n, i, j);
            let lhs = candidate.apply(&chi_trace(chi_a_prime, &unit)?)?;
            let rhs = chi_trace(chi_b, &e.apply(&unit)?)?;
            if (lhs - rhs).norm() > tol.scaled(1.0) {
                return Ok(None);
            }
        }
    }
    Ok(Some(candidate))
}

/// `ℰ(ρ) = Tr_U[(ζ_B† ⊗ 1) Z ρ Z† (ζ_B ⊗ 1)]` with
/// `Z = (1 ⊗ T)(V ⊗ 1)χ_A'`.
#[derive(Clone, Debug)]
pub struct SemiLocalisation {
    /// `ζ_B = (1 ⊗ W)χ_B` with `W` appending an ancilla to the right leg.
    pub zeta_b: SplittingMap,
    /// Stinespring isometry `V: H_L^{A'} → H_L^B ⊗ H_V` of the left-leg map.
    pub e1: ComplexMatrix,
    pub d_v: usize,
    /// Isometry `T: H_V ⊗ H_R^{A'} → H_R^ζ ⊗ H_U` bridging to the right leg.
    pub e2: ComplexMatrix,
    pub d_u: usize,
}

impl SemiLocalisation {
    /// `Z = (1 ⊗ T)(V ⊗ 1)χ_A'`.
    pub fn composite(&self, chi_a_prime: &SplittingMap) -> Result<ComplexMatrix> {
        let d_lb = self.zeta_b.d_l();
        if self.e1.shape() != (d_lb * self.d_v, chi_a_prime.d_l())
            || self.e2.shape() != (self.zeta_b.d_r() * self.d_u, self.d_v * chi_a_prime.d_r())
        {
            return Err(mismatch("decomposition does not match the splitting map"));
        }
        let first = tensor(&self.e1, &identity(chi_a_prime.d_r())) * chi_a_prime.isometry();
        Ok(tensor(&identity(d_lb), &self.e2) * first)
    }
}

pub fn semi_localise(
    e: &Channel,
    chi_a_prime: &SplittingMap,
    chi_b: &SplittingMap,
    settings: &Settings,
) -> Result<SemiLocalisation> {
    let tol = &settings.tol;
    let reduced = schroedinger_semicausal(e, chi_a_prime, chi_b, settings)?.ok_or(Error::NotSemiCausal)?;
    let v = stinespring(&reduced, true, tol);
    let u = stinespring(e, true, tol);
    let (d_ra, d_rb) = (chi_a_prime.d_r(), chi_b.d_r());
    let pad = (v.d_env * d_ra).div_ceil(d_rb * u.d_env).max(1);
    let w = tensor(&identity(d_rb), &matrix_unit(pad, 0, 0).columns(0, 1).into_owned());
    let zeta_b = SplittingMap::new_unchecked(tensor(&identity(chi_b.d_l()), &w) * chi_b.isometry(), chi_b.d_l(), d_rb * pad);

    let d1 = StinespringDilation {
        isometry: tensor(zeta_b.isometry(), &identity(u.d_env)) * &u.isometry,
        d_out: zeta_b.d_l(),
        d_env: zeta_b.d_r() * u.d_env,
        minimal: false,
    };
    let d2 = StinespringDilation {
        isometry: tensor(&v.isometry, &identity(d_ra)) * chi_a_prime.isometry(),
        d_out: zeta_b.d_l(),
        d_env: v.d_env * d_ra,
        minimal: false,
    };
    let t = relate_dilations(&d2, &d1, tol)?;
    Ok(SemiLocalisation {
        zeta_b,
        e1: v.isometry,
        d_v: v.d_env,
        e2: t,
        d_u: u.d_env,
    })
}

/// Checks reconstruction of `ℰ` on all matrix units and that the composite
/// lands in `Im ζ_B ⊗ H_U`.
pub fn verify_semi_localisation(
    e: &Channel,
    s: &SemiLocalisation,
    chi_a_prime: &SplittingMap,
    tol: &Tolerance,
) -> Result<bool> {
    if chi_a_prime.d_h() != e.d_in || s.zeta_b.d_h() != e.d_out {
        return Err(mismatch("decomposition does not match the channel"));
    }
    let z = s.composite(chi_a_prime)?;
    let zeta_u = tensor(s.zeta_b.isometry(), &identity(s.d_u));
    let image = &zeta_u * zeta_u.adjoint();
    if (&image * &z - &z).norm() > tol.scaled((e.d_in as f64).sqrt()) {
        return Ok(false);
    }
    let y = zeta_u.adjoint() * &z;
    let n = e.d_in;
    for i in 0..n {
        for j in 0..n {
            let unit = matrix_unit(n, i, j);
            let out = partial_trace(&(&y * &unit * y.adjoint()), e.d_out, s.d_u, Side::Right)?;
            if (out - e.apply(&unit)?).norm() > tol.scaled(1.0) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::linops::{c, dist};
    use crate::splitmap::canonical_splitting_map;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn depolarizing() -> Channel {
        let x = &matrix_unit(2, 0, 1) + &matrix_unit(2, 1, 0);
        let z = &matrix_unit(2, 0, 0) - &matrix_unit(2, 1, 1);
        let y = &z * &x * c(0.0, 1.0);
        let kraus = vec![identity(2) * c(0.5, 0.0), x * c(0.5, 0.0), y * c(0.5, 0.0), z * c(0.5, 0.0)];
        Channel::new(2, 2, kraus, &tol()).unwrap()
    }

    #[test]
    fn rejects_non_trace_preserving() {
        let doubled: Vec<_> = depolarizing().kraus().iter().map(|k| k * c(2.0, 0.0)).collect();
        let err = channel_from_kraus(doubled, 2, 2, &tol()).unwrap_err();
        assert!(matches!(err, Error::NotTracePreserving(_)));
    }

    #[test]
    fn depolarizing_sends_everything_to_maximally_mixed() {
        let e = depolarizing();
        let out = e.apply(&matrix_unit(2, 0, 0)).unwrap();
        assert!(dist(&out, &(identity(2) * c(0.5, 0.0))) < 1e-15);
    }

    #[test]
    fn minimal_dilation_sizes() {
        let id = Channel::from_unitary(&identity(3), &tol()).unwrap();
        assert_eq!(stinespring(&id, true, &tol()).d_env, 1);
        assert_eq!(stinespring(&depolarizing(), true, &tol()).d_env, 4);
    }

    #[test]
    fn dilation_reproduces_channel() {
        let e = depolarizing();
        let d = stinespring(&e, true, &tol());
        let back = d.channel(&tol()).unwrap();
        assert!(dist(back.choi(), e.choi()) < 1e-12);
        assert!(isometry_defect(&d.isometry) < 1e-12);
    }

    #[test]
    fn related_dilations() {
        let e = depolarizing();
        let u = stinespring(&e, true, &tol());
        let mut r = crate::sampling::rng(2);
        let w0 = crate::sampling::random_isometry(6, 4, &mut r);
        let v = u.padded(&w0).unwrap();
        let w = relate_dilations(&u, &v, &tol()).unwrap();
        let rebuilt = tensor(&identity(2), &w) * &u.isometry;
        assert!(dist(&rebuilt, &v.isometry) < 1e-10);
        assert_eq!(relate_dilations(&v, &u, &tol()).unwrap_err(), Error::DimensionOrder);
        let other = stinespring(&Channel::from_unitary(&identity(2), &tol()).unwrap(), true, &tol());
        assert!(matches!(relate_dilations(&other, &v, &tol()), Err(Error::NotSameChannel(_))));
    }

    #[test]
    fn chi_trace_of_identity_split_is_partial_trace() {
        let chi = fixtures::chi_tensor();
        let mut r = crate::sampling::rng(4);
        let rho = crate::sampling::random_density(6, &mut r);
        let lhs = chi_trace(&chi, &rho).unwrap();
        let rhs = partial_trace(&rho, 2, 3, Side::Right).unwrap();
        assert!(dist(&lhs, &rhs) < 1e-14);
    }

    #[test]
    fn trace_equivalence_on_oplus() {
        let s = Settings::default();
        let chi = fixtures::chi_oplus();
        let b = strictly_local_algebra(&chi, Side::Right, &s.tol);
        let u = trace_equivalence_isometry(&chi, &b, &s).unwrap();
        let aw = aw_decomposition(&commutant(&b, &s), &s).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let unit = matrix_unit(4, i, j);
                let lhs = chi_trace(&chi, &unit).unwrap();
                let tb = crate::vnalg::trace_over_algebra(&unit, &b, &aw).unwrap();
                assert!(dist(&lhs, &(&u * tb * u.adjoint())) < 1e-10);
            }
        }
    }

    #[test]
    fn trace_equivalence_needs_leanness() {
        let s = Settings::default();
        let chi = fixtures::entangled_balanced();
        let b = strictly_local_algebra(&chi, Side::Right, &s.tol);
        assert_eq!(trace_equivalence_isometry(&chi, &b, &s).unwrap_err(), Error::NotLean);
    }

    #[test]
    fn recovery_inverts_chi_trace() {
        let s = Settings::default();
        let chi = fixtures::chi_oplus();
        let f = recovery_channel(&chi, &s).unwrap();
        let mut r = crate::sampling::rng(9);
        let rho = crate::sampling::random_density(4, &mut r);
        let t = chi_trace(&chi, &rho).unwrap();
        let back = chi_trace(&chi, &f.apply(&t).unwrap()).unwrap();
        assert!(dist(&back, &t) < 1e-12);
    }

    #[test]
    fn swap_signals_left_to_right_only() {
        let swap = fixtures::swap_unitary();
        let left = fixtures::algebra_otimes();
        let right = commutant(&left, &Settings::default());
        assert!(!heisenberg_semicausal(&swap, &left, &right, &tol()).unwrap());
        assert!(heisenberg_semicausal(&swap, &left, &left, &tol()).unwrap());
        assert!(heisenberg_semicausal(&identity(4), &left, &right, &tol()).unwrap());
        assert!(matches!(
            heisenberg_semicausal(&(identity(4) * c(2.0, 0.0)), &left, &left, &tol()),
            Err(Error::NotUnitary(_))
        ));
    }

    #[test]
    fn product_channel_is_semicausal_and_localises() {
        let s = Settings::default();
        let e = fixtures::product_channel();
        let chi = canonical_splitting_map(&fixtures::algebra_otimes(), &s).unwrap();
        let reduced = schroedinger_semicausal(&e, &chi, &chi, &s).unwrap();
        assert!(reduced.is_some());
        let sl = semi_localise(&e, &chi, &chi, &s).unwrap();
        assert!(verify_semi_localisation(&e, &sl, &chi, &s.tol).unwrap());
        let mut broken = sl.clone();
        broken.e2[(0, 0)] += c(1e-3, 0.0);
        assert!(!verify_semi_localisation(&e, &broken, &chi, &s.tol).unwrap());
    }

    #[test]
    fn swap_channel_is_not_semicausal_on_one_leg() {
        let s = Settings::default();
        let e = Channel::from_unitary(&fixtures::swap_unitary(), &s.tol).unwrap();
        let chi = canonical_splitting_map(&fixtures::algebra_otimes(), &s).unwrap();
        assert!(schroedinger_semicausal(&e, &chi, &chi, &s).unwrap().is_none());
        assert_eq!(semi_localise(&e, &chi, &chi, &s).unwrap_err(), Error::NotSemiCausal);
    }
}
