//! C ABI for `vnsplit`.
//!
//! Objects cross the boundary as opaque handles owned by the caller and
//! released with the matching `*_free`. Every fallible call returns a
//! [`VnStatus`]; the message of the last failure on the calling thread is
//! available from [`vn_last_error_message`]. Matrices are exchanged as
//! row-major interleaved `(re, im)` doubles.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use vnsplit::channels::{self, Channel};
use vnsplit::fixtures::{self, Fixture};
use vnsplit::splitmap::{self, SplittingMap};
use vnsplit::vnalg::{self, VnAlgebra as Algebra};
use vnsplit::{ComplexMatrix, Error, Settings, Side, Tolerance};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VnStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    NotIsometry = 4,
    PreconditionFailed = 5,
    InvalidChannel = 6,
    UnknownFixture = 7,
    Numerical = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VnSide {
    Left = 0,
    Right = 1,
}

/// Tolerances and seed; pass NULL wherever accepted for the defaults.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct VnSettings {
    pub absolute: f64,
    pub relative_rank: f64,
    pub seed: u64,
}

pub struct VnMatrix(ComplexMatrix);
pub struct VnAlgebra(Algebra);
pub struct VnSplit(SplittingMap);
pub struct VnChannel(Channel);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nuls removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> VnStatus {
    match e {
        Error::DimensionMismatch(_) => VnStatus::DimensionMismatch,
        Error::NotIsometry(_) | Error::NotUnitary(_) => VnStatus::NotIsometry,
        Error::NotBalanced
        | Error::NotLean
        | Error::NotFactor
        | Error::NotNested
        | Error::AlgebraMismatch
        | Error::NotSemiCausal
        | Error::DimensionOrder => VnStatus::PreconditionFailed,
        Error::InvalidChannel(_)
        | Error::NotTracePreserving(_)
        | Error::NotCompletelyPositive(_)
        | Error::NotSameChannel(_) => VnStatus::InvalidChannel,
        Error::UnknownFixture(_) => VnStatus::UnknownFixture,
        Error::Parse { .. } | Error::Io(_) => VnStatus::InvalidArgument,
        _ => VnStatus::Numerical,
    }
}

struct Fail(VnStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> VnStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => VnStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            VnStatus::Panic
        }
    }
}

unsafe fn obj<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref()
        .ok_or_else(|| Fail(VnStatus::NullPointer, format!("{what} is NULL")))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(VnStatus::NullPointer, "output pointer is NULL".into()));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn put_value<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(VnStatus::NullPointer, "output pointer is NULL".into()));
    }
    *out = value;
    Ok(())
}

unsafe fn settings(p: *const VnSettings) -> Settings {
    match p.as_ref() {
        None => Settings::default(),
        Some(s) => Settings {
            tol: Tolerance {
                absolute: s.absolute,
                relative_rank: s.relative_rank,
            },
            seed: s.seed,
        },
    }
}

unsafe fn matrices(list: *const *const VnMatrix, n: usize) -> Result<Vec<ComplexMatrix>, Fail> {
    if n == 0 {
        return Ok(Vec::new());
    }
    if list.is_null() {
        return Err(Fail(VnStatus::NullPointer, "matrix list is NULL".into()));
    }
    std::slice::from_raw_parts(list, n)
        .iter()
        .map(|&m| obj(m, "matrix").map(|m| m.0.clone()))
        .collect()
}

fn side(s: VnSide) -> Side {
    match s {
        VnSide::Left => Side::Left,
        VnSide::Right => Side::Right,
    }
}

/// Message of the last failure on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn vn_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub extern "C" fn vn_settings_default() -> VnSettings {
    let s = Settings::default();
    VnSettings {
        absolute: s.tol.absolute,
        relative_rank: s.tol.relative_rank,
        seed: s.seed,
    }
}

/// Matrix from `2 * rows * cols` interleaved doubles.
///
/// # Safety
/// `data` must point to `2 * rows * cols` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn vn_matrix_new(rows: usize, cols: usize, data: *const f64, out: *mut *mut VnMatrix) -> VnStatus {
    guard(|| {
        if data.is_null() && rows * cols > 0 {
            return Err(Fail(VnStatus::NullPointer, "data is NULL".into()));
        }
        let raw = if rows * cols == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(data, 2 * rows * cols)
        };
        if raw.iter().any(|x| !x.is_finite()) {
            return Err(Fail(VnStatus::InvalidArgument, "non-finite entry".into()));
        }
        let m = ComplexMatrix::from_fn(rows, cols, |i, j| {
            let k = 2 * (i * cols + j);
            Complex64::new(raw[k], raw[k + 1])
        });
        put(out, VnMatrix(m))
    })
}

/// # Safety
/// `m` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn vn_matrix_rows(m: *const VnMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.0.nrows())
}

/// # Safety
/// `m` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn vn_matrix_cols(m: *const VnMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.0.ncols())
}

/// Copies the entries into `out`, which holds `len` doubles.
///
/// # Safety
/// `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn vn_matrix_copy_data(m: *const VnMatrix, out: *mut f64, len: usize) -> VnStatus {
    guard(|| {
        let m = &obj(m, "matrix")?.0;
        let need = 2 * m.len();
        if len < need {
            return Err(Fail(VnStatus::DimensionMismatch, format!("buffer holds {len} doubles, need {need}")));
        }
        if need == 0 {
            return Ok(());
        }
        if out.is_null() {
            return Err(Fail(VnStatus::NullPointer, "output buffer is NULL".into()));
        }
        let buf = std::slice::from_raw_parts_mut(out, need);
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let k = 2 * (i * m.ncols() + j);
                buf[k] = m[(i, j)].re;
                buf[k + 1] = m[(i, j)].im;
            }
        }
        Ok(())
    })
}

/// # Safety
/// `m` must be a handle from this library, freed at most once, or NULL.
#[no_mangle]
pub unsafe extern "C" fn vn_matrix_free(m: *mut VnMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Smallest unital *-algebra containing the generators.
///
/// # Safety
/// `generators` must point to `n` live matrix handles.
#[no_mangle]
pub unsafe extern "C" fn vn_algebra_generate(
    generators: *const *const VnMatrix,
    n: usize,
    dim: usize,
    s: *const VnSettings,
    out: *mut *mut VnAlgebra,
) -> VnStatus {
    guard(|| {
        let gens = matrices(generators, n)?;
        let a = vnalg::generate_algebra(&gens, dim, &settings(s).tol)?;
        put(out, VnAlgebra(a))
    })
}

/// # Safety
/// `a` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn vn_algebra_dim(a: *const VnAlgebra) -> usize {
    a.as_ref().map_or(0, |a| a.0.dim())
}

/// # Safety
/// `a` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn vn_algebra_dim_space(a: *const VnAlgebra) -> usize {
    a.as_ref().map_or(0, |a| a.0.dim_space())
}

/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vn_algebra_commutant(a: *const VnAlgebra, s: *const VnSettings, out: *mut *mut VnAlgebra) -> VnStatus {
    guard(|| {
        let c = vnalg::commutant(&obj(a, "algebra")?.0, &settings(s));
        put(out, VnAlgebra(c))
    })
}

/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vn_algebra_center(a: *const VnAlgebra, s: *const VnSettings, out: *mut *mut VnAlgebra) -> VnStatus {
    guard(|| {
        let z = vnalg::center(&obj(a, "algebra")?.0, &settings(s));
        put(out, VnAlgebra(z))
    })
}

/// Block shape of the Artin-Wedderburn decomposition. Writes up to
/// `capacity` pairs into `d_left`/`d_right` and the block count into
/// `count`; fails with `DimensionMismatch` if `capacity` is too small.
///
/// # Safety
/// `d_left` and `d_right` must hold `capacity` writable entries.
#[no_mangle]
pub unsafe extern "C" fn vn_algebra_aw_blocks(
    a: *const VnAlgebra,
    s: *const VnSettings,
    d_left: *mut usize,
    d_right: *mut usize,
    capacity: usize,
    count: *mut usize,
) -> VnStatus {
    guard(|| {
        let aw = vnalg::aw_decomposition(&obj(a, "algebra")?.0, &settings(s))?;
        put_value(count, aw.blocks.len())?;
        if aw.blocks.len() > capacity {
            return Err(Fail(VnStatus::DimensionMismatch, format!("{} blocks, capacity {capacity}", aw.blocks.len())));
        }
        if d_left.is_null() || d_right.is_null() {
            return Err(Fail(VnStatus::NullPointer, "block buffers are NULL".into()));
        }
        for (i, b) in aw.blocks.iter().enumerate() {
            *d_left.add(i) = b.d_left;
            *d_right.add(i) = b.d_right;
        }
        Ok(())
    })
}

/// # Safety
/// `a` must be a handle from this library, freed at most once, or NULL.
#[no_mangle]
pub unsafe extern "C" fn vn_algebra_free(a: *mut VnAlgebra) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// Validated splitting map `C^{cols(v)} → C^{d_left} ⊗ C^{d_right}`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vn_split_new(
    v: *const VnMatrix,
    d_left: usize,
    d_right: usize,
    s: *const VnSettings,
    out: *mut *mut VnSplit,
) -> VnStatus {
    guard(|| {
        let v = obj(v, "isometry")?.0.clone();
        let chi = splitmap::make_splitting_map(v, d_left, d_right, &settings(s).tol)?;
        put(out, VnSplit(chi))
    })
}

/// Named splitting-map fixture, e.g. "chi-oplus".
///
/// # Safety
/// `name` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn vn_split_fixture(name: *const c_char, out: *mut *mut VnSplit) -> VnStatus {
    guard(|| {
        if name.is_null() {
            return Err(Fail(VnStatus::NullPointer, "name is NULL".into()));
        }
        let name = CStr::from_ptr(name)
            .to_str()
            .map_err(|_| Fail(VnStatus::InvalidArgument, "name is not UTF-8".into()))?;
        match fixtures::lookup(name)? {
            Fixture::Split(chi) => put(out, VnSplit(chi)),
            _ => Err(Fail(VnStatus::InvalidArgument, format!("`{name}` is not a splitting map"))),
        }
    })
}

/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vn_split_isometry(chi: *const VnSplit, out: *mut *mut VnMatrix) -> VnStatus {
    guard(|| {
        let v = obj(chi, "splitting map")?.0.isometry().clone();
        put(out, VnMatrix(v))
    })
}

/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vn_split_is_balanced(chi: *const VnSplit, s: *const VnSettings, out: *mut bool) -> VnStatus {
    guard(|| put_value(out, splitmap::is_balanced(&obj(chi, "splitting map")?.0, &settings(s))))
}

/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vn_split_is_lean(chi: *const VnSplit, s: *const VnSettings, out: *mut bool) -> VnStatus {
    guard(|| put_value(out, splitmap::is_lean(&obj(chi, "splitting map")?.0, &settings(s))))
}

/// Strictly local algebra on one leg.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vn_split_stloc(
    chi: *const VnSplit,
    leg: VnSide,
    s: *const VnSettings,
    out: *mut *mut VnAlgebra,
) -> VnStatus {
    guard(|| {
        let a = splitmap::strictly_local_algebra(&obj(chi, "splitting map")?.0, side(leg), &settings(s).tol);
        put(out, VnAlgebra(a))
    })
}

/// Canonical splitting map of an algebra.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vn_split_canonical(a: *const VnAlgebra, s: *const VnSettings, out: *mut *mut VnSplit) -> VnStatus {
    guard(|| {
        let chi = splitmap::canonical_splitting_map(&obj(a, "algebra")?.0, &settings(s))?;
        put(out, VnSplit(chi))
    })
}

/// # Safety
/// `chi` must be a handle from this library, freed at most once, or NULL.
#[no_mangle]
pub unsafe extern "C" fn vn_split_free(chi: *mut VnSplit) {
    if !chi.is_null() {
        drop(Box::from_raw(chi));
    }
}

/// Validated channel from `n` Kraus operators of shape `d_out × d_in`.
///
/// # Safety
/// `kraus` must point to `n` live matrix handles.
#[no_mangle]
pub unsafe extern "C" fn vn_channel_new(
    kraus: *const *const VnMatrix,
    n: usize,
    d_in: usize,
    d_out: usize,
    s: *const VnSettings,
    out: *mut *mut VnChannel,
) -> VnStatus {
    guard(|| {
        let ks = matrices(kraus, n)?;
        let e = channels::channel_from_kraus(ks, d_in, d_out, &settings(s).tol)?;
        put(out, VnChannel(e))
    })
}

/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vn_channel_apply(e: *const VnChannel, rho: *const VnMatrix, out: *mut *mut VnMatrix) -> VnStatus {
    guard(|| {
        let r = obj(e, "channel")?.0.apply(&obj(rho, "matrix")?.0)?;
        put(out, VnMatrix(r))
    })
}

/// Schroedinger semi-causality from the commutant side `chi_a` to `chi_b`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vn_channel_semicausal(
    e: *const VnChannel,
    chi_a: *const VnSplit,
    chi_b: *const VnSplit,
    s: *const VnSettings,
    out: *mut bool,
) -> VnStatus {
    guard(|| {
        let r = channels::schroedinger_semicausal(
            &obj(e, "channel")?.0,
            &obj(chi_a, "splitting map")?.0,
            &obj(chi_b, "splitting map")?.0,
            &settings(s),
        )?;
        put_value(out, r.is_some())
    })
}

/// Builds a semi-localisation and reports whether it verifies.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vn_channel_semilocalise(
    e: *const VnChannel,
    chi_a: *const VnSplit,
    chi_b: *const VnSplit,
    s: *const VnSettings,
    verified: *mut bool,
) -> VnStatus {
    guard(|| {
        let st = settings(s);
        let (e, chi_a) = (&obj(e, "channel")?.0, &obj(chi_a, "splitting map")?.0);
        let sl = channels::semi_localise(e, chi_a, &obj(chi_b, "splitting map")?.0, &st)?;
        put_value(verified, channels::verify_semi_localisation(e, &sl, chi_a, &st.tol)?)
    })
}

/// # Safety
/// `e` must be a handle from this library, freed at most once, or NULL.
#[no_mangle]
pub unsafe extern "C" fn vn_channel_free(e: *mut VnChannel) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}
