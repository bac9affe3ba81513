//! C ABI over `aligncmp`.
//!
//! Every fallible function returns an [`AcStatus`]. On failure a readable
//! message is kept per thread and can be fetched with [`ac_last_error`].
//! Matrices and comparisons are opaque handles released with their `_free`
//! function; strings handed out by a comparison stay valid until it is freed.
//!
//! Enumerations crossing the boundary are plain `uint32_t` values with named
//! constants, so an out-of-range value from C is reported as
//! `AC_ERR_INVALID_ARGUMENT` instead of being undefined behaviour.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use aligncmp::fwer::{adjust_with_cap, Hypothesis, HypothesisSet};
use aligncmp::matcher::{similarity, MetricKind};
use aligncmp::mcnemar::run_test;
use aligncmp::model::DEFAULT_BERGMANN_CAP;
use aligncmp::report::to_json;
use aligncmp::{
    compare, emit_dot, rank_systems, Comparison, ComparisonConfig, Correction, DiscordantMatrix, Error, Mode,
    Perspective, TestKind,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcStatus {
    AcOk = 0,
    AcErrNullPointer = 1,
    AcErrInvalidUtf8 = 2,
    AcErrInvalidArgument = 3,
    AcErrParse = 4,
    AcErrUndefinedStatistic = 5,
    AcErrModeMismatch = 6,
    AcErrTooManySystems = 7,
    AcErrOutOfRange = 8,
    AcErrPanic = 9,
}

pub type AcPerspective = u32;
pub const AC_PERSPECTIVE_IFP: AcPerspective = 0;
pub const AC_PERSPECTIVE_CFP: AcPerspective = 1;

pub type AcTest = u32;
pub const AC_TEST_ASYMPTOTIC: AcTest = 0;
pub const AC_TEST_EXACT: AcTest = 1;
pub const AC_TEST_CC: AcTest = 2;
pub const AC_TEST_MIDP: AcTest = 3;

pub type AcCorrection = u32;
pub const AC_CORRECTION_NONE: AcCorrection = 0;
pub const AC_CORRECTION_BONFERRONI: AcCorrection = 1;
pub const AC_CORRECTION_HOLM: AcCorrection = 2;
pub const AC_CORRECTION_HOLLAND: AcCorrection = 3;
pub const AC_CORRECTION_FINNER: AcCorrection = 4;
pub const AC_CORRECTION_HOCHBERG: AcCorrection = 5;
pub const AC_CORRECTION_NEMENYI: AcCorrection = 6;
pub const AC_CORRECTION_SHAFFER: AcCorrection = 7;
pub const AC_CORRECTION_BERGMANN: AcCorrection = 8;

pub type AcMetric = u32;
pub const AC_METRIC_EQUAL: AcMetric = 0;
pub const AC_METRIC_HAMMING: AcMetric = 1;
pub const AC_METRIC_JARO: AcMetric = 2;
pub const AC_METRIC_JARO_WINKLER: AcMetric = 3;
pub const AC_METRIC_LEVENSHTEIN: AcMetric = 4;
pub const AC_METRIC_NGRAM: AcMetric = 5;
pub const AC_METRIC_NEEDLEMAN_WUNSCH: AcMetric = 6;
pub const AC_METRIC_SMOA: AcMetric = 7;
pub const AC_METRIC_SUBSTRING: AcMetric = 8;

/// Settings for [`ac_compare`]. Fill with [`ac_config_default`] first.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct AcConfig {
    pub test: AcTest,
    pub correction: AcCorrection,
    pub alpha: f64,
    pub bergmann_cap: usize,
    /// NUL-terminated baseline name for N×1 mode; NULL compares all pairs.
    pub baseline: *const c_char,
}

/// Square matrix of discordant counts between named systems.
pub struct AcMatrix {
    inner: DiscordantMatrix,
    names: Vec<CString>,
}

impl AcMatrix {
    fn boxed(inner: DiscordantMatrix) -> *mut AcMatrix {
        let names = inner.systems().iter().map(|s| c_string(s.clone())).collect();
        Box::into_raw(Box::new(AcMatrix { inner, names }))
    }
}

struct EdgeText {
    winner: CString,
    loser: CString,
    apv: f64,
}

/// Finished comparison with its rendered outputs.
pub struct AcComparison {
    dot: CString,
    json: CString,
    ranking: CString,
    edges: Vec<EdgeText>,
}

struct Failure {
    status: AcStatus,
    message: String,
}

impl Failure {
    fn new(status: AcStatus, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::UndefinedStatistic => AcStatus::AcErrUndefinedStatistic,
            Error::ModeMismatch { .. } => AcStatus::AcErrModeMismatch,
            Error::TooManySystems { .. } => AcStatus::AcErrTooManySystems,
            Error::MalformedLine { .. }
            | Error::ConfidenceOutOfRange(_)
            | Error::XmlSyntax { .. }
            | Error::MissingEntity(_)
            | Error::DuplicateId(_)
            | Error::MalformedMatrix(_)
            | Error::MalformedReport(_) => AcStatus::AcErrParse,
            Error::EmptySystemName
            | Error::NonEquivalenceRelation(..)
            | Error::EmptyEntity
            | Error::InvalidConfidence(_)
            | Error::UniverseTooSmall { .. }
            | Error::DuplicateSystemName(_)
            | Error::TooFewSystems(_)
            | Error::InvalidHypotheses(_)
            | Error::InvalidAlpha(_)
            | Error::UnknownBaseline(_)
            | Error::EmptyTable
            | Error::InvalidThreshold(_) => AcStatus::AcErrInvalidArgument,
        };
        Failure::new(status, e.to_string())
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(text));
}

/// Runs `f`, converting failures and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> AcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AcStatus::AcOk,
        Ok(Err(failure)) => {
            set_last_error(&failure.message);
            failure.status
        }
        Err(panic) => {
            let what = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("internal error: {what}"));
            AcStatus::AcErrPanic
        }
    }
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        Err(Failure::new(AcStatus::AcErrNullPointer, format!("{what} is NULL")))
    } else {
        Ok(())
    }
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    non_null(p, what)?;
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::new(AcStatus::AcErrInvalidUtf8, format!("{what} is not valid UTF-8")))
}

fn c_string(text: String) -> CString {
    CString::new(text.replace('\0', " ")).unwrap_or_default()
}

fn invalid(what: &str, value: u32) -> Failure {
    Failure::new(AcStatus::AcErrInvalidArgument, format!("unknown {what} value {value}"))
}

fn perspective(v: AcPerspective) -> Result<Perspective, Failure> {
    match v {
        AC_PERSPECTIVE_IFP => Ok(Perspective::Ifp),
        AC_PERSPECTIVE_CFP => Ok(Perspective::Cfp),
        _ => Err(invalid("perspective", v)),
    }
}

fn test_kind(v: AcTest) -> Result<TestKind, Failure> {
    match v {
        AC_TEST_ASYMPTOTIC => Ok(TestKind::Asymptotic),
        AC_TEST_EXACT => Ok(TestKind::Exact),
        AC_TEST_CC => Ok(TestKind::ContinuityCorrected),
        AC_TEST_MIDP => Ok(TestKind::MidP),
        _ => Err(invalid("test", v)),
    }
}

fn correction(v: AcCorrection) -> Result<Correction, Failure> {
    Correction::ALL
        .get(v as usize)
        .copied()
        .ok_or_else(|| invalid("correction", v))
}

fn metric(v: AcMetric) -> Result<MetricKind, Failure> {
    MetricKind::ALL.get(v as usize).copied().ok_or_else(|| invalid("metric", v))
}

/// Static description of a status code. Never NULL.
#[no_mangle]
pub extern "C" fn ac_status_message(status: AcStatus) -> *const c_char {
    let text: &'static CStr = match status {
        AcStatus::AcOk => c"ok",
        AcStatus::AcErrNullPointer => c"null pointer argument",
        AcStatus::AcErrInvalidUtf8 => c"string is not valid UTF-8",
        AcStatus::AcErrInvalidArgument => c"invalid argument",
        AcStatus::AcErrParse => c"malformed input",
        AcStatus::AcErrUndefinedStatistic => c"statistic undefined without discordant pairs",
        AcStatus::AcErrModeMismatch => c"correction not available in this mode",
        AcStatus::AcErrTooManySystems => c"too many systems for exhaustive sets",
        AcStatus::AcErrOutOfRange => c"index out of range",
        AcStatus::AcErrPanic => c"internal error",
    };
    text.as_ptr()
}

/// Message of the last failure on the calling thread, or NULL. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ac_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

#[no_mangle]
pub extern "C" fn ac_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => c"unknown",
    };
    VERSION.as_ptr()
}

/// Mid-p test, Bergmann correction, α = 0.05, all pairs.
///
/// # Safety
/// `out` must point to writable memory for one `AcConfig`.
#[no_mangle]
pub unsafe extern "C" fn ac_config_default(out: *mut AcConfig) -> AcStatus {
    guard(|| {
        non_null(out, "out")?;
        out.write(AcConfig {
            test: AC_TEST_MIDP,
            correction: AC_CORRECTION_BERGMANN,
            alpha: 0.05,
            bergmann_cap: DEFAULT_BERGMANN_CAP,
            baseline: ptr::null(),
        });
        Ok(())
    })
}

/// Parses a matrix in TSV layout: a header of system names, then one row per
/// system with its name and integer counts.
///
/// # Safety
/// `tsv` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ac_matrix_from_tsv(
    tsv: *const c_char,
    perspective_value: AcPerspective,
    out: *mut *mut AcMatrix,
) -> AcStatus {
    guard(|| {
        non_null(out, "out")?;
        out.write(ptr::null_mut());
        let text = c_str(tsv, "tsv")?;
        let inner = DiscordantMatrix::from_tsv(text.as_bytes(), perspective(perspective_value)?)?;
        out.write(AcMatrix::boxed(inner));
        Ok(())
    })
}

/// Builds a matrix from `n` names and `n × n` row-major counts, where
/// `counts[i * n + j]` is the number of correspondences in favour of system
/// `i` against system `j`.
///
/// # Safety
/// `names` must hold `n` NUL-terminated strings, `counts` must hold `n * n`
/// values and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ac_matrix_from_counts(
    names: *const *const c_char,
    n: usize,
    counts: *const u64,
    perspective_value: AcPerspective,
    out: *mut *mut AcMatrix,
) -> AcStatus {
    guard(|| {
        non_null(out, "out")?;
        out.write(ptr::null_mut());
        non_null(names, "names")?;
        non_null(counts, "counts")?;
        let cells = n
            .checked_mul(n)
            .ok_or_else(|| Failure::new(AcStatus::AcErrInvalidArgument, "matrix size overflows"))?;
        let systems = std::slice::from_raw_parts(names, n)
            .iter()
            .map(|&p| c_str(p, "system name").map(str::to_string))
            .collect::<Result<Vec<_>, _>>()?;
        let flat = std::slice::from_raw_parts(counts, cells);
        let rows = flat.chunks(n.max(1)).map(<[u64]>::to_vec).collect();
        let inner = DiscordantMatrix::new(systems, rows, perspective(perspective_value)?)?;
        out.write(AcMatrix::boxed(inner));
        Ok(())
    })
}

/// Number of systems; 0 for NULL.
///
/// # Safety
/// `m` must be NULL or a live matrix handle.
#[no_mangle]
pub unsafe extern "C" fn ac_matrix_size(m: *const AcMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.inner.len())
}

/// Count in favour of system `i` against system `j`, indexed in the order
/// the systems were given.
///
/// # Safety
/// `m` must be a live matrix handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ac_matrix_count(m: *const AcMatrix, i: usize, j: usize, out: *mut u64) -> AcStatus {
    guard(|| {
        non_null(m, "matrix")?;
        non_null(out, "out")?;
        let m = &(*m).inner;
        if i >= m.len() || j >= m.len() {
            return Err(Failure::new(
                AcStatus::AcErrOutOfRange,
                format!("({i}, {j}) outside a {0}×{0} matrix", m.len()),
            ));
        }
        out.write(m.get(i, j));
        Ok(())
    })
}

/// Name of system `i`, owned by `m`; NULL when out of range.
///
/// # Safety
/// `m` must be NULL or a live matrix handle.
#[no_mangle]
pub unsafe extern "C" fn ac_matrix_system(m: *const AcMatrix, i: usize) -> *const c_char {
    m.as_ref()
        .and_then(|m| m.names.get(i))
        .map_or(ptr::null(), |s| s.as_ptr())
}

/// # Safety
/// `m` must be NULL or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn ac_matrix_free(m: *mut AcMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

fn render(c: &Comparison) -> AcComparison {
    AcComparison {
        dot: c_string(emit_dot(&c.graph)),
        json: c_string(to_json(c)),
        ranking: c_string(rank_systems(&c.graph).rows().join("\n")),
        edges: c
            .graph
            .edges
            .iter()
            .map(|e| EdgeText {
                winner: c_string(e.winner.clone()),
                loser: c_string(e.loser.clone()),
                apv: e.apv,
            })
            .collect(),
    }
}

/// Runs every pairwise test, applies the correction and builds the
/// significance graph.
///
/// # Safety
/// `m` must be a live matrix handle, `config` must point to an `AcConfig`
/// whose `baseline` is NULL or NUL-terminated, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ac_compare(
    m: *const AcMatrix,
    config: *const AcConfig,
    out: *mut *mut AcComparison,
) -> AcStatus {
    guard(|| {
        non_null(out, "out")?;
        out.write(ptr::null_mut());
        non_null(m, "matrix")?;
        non_null(config, "config")?;
        let matrix = &(*m).inner;
        let raw = &*config;
        let mode = if raw.baseline.is_null() {
            Mode::NxN
        } else {
            Mode::Nx1 {
                baseline: c_str(raw.baseline, "baseline")?.to_string(),
            }
        };
        let cfg = ComparisonConfig {
            perspective: matrix.perspective(),
            test: test_kind(raw.test)?,
            correction: correction(raw.correction)?,
            mode,
            alpha: raw.alpha,
            bergmann_cap: raw.bergmann_cap,
        };
        let comparison = compare(matrix, &cfg)?;
        out.write(Box::into_raw(Box::new(render(&comparison))));
        Ok(())
    })
}

/// Significance graph in DOT. Owned by `c`; NULL for NULL.
///
/// # Safety
/// `c` must be NULL or a live comparison handle.
#[no_mangle]
pub unsafe extern "C" fn ac_comparison_dot(c: *const AcComparison) -> *const c_char {
    c.as_ref().map_or(ptr::null(), |c| c.dot.as_ptr())
}

/// JSON report. Owned by `c`; NULL for NULL.
///
/// # Safety
/// `c` must be NULL or a live comparison handle.
#[no_mangle]
pub unsafe extern "C" fn ac_comparison_json(c: *const AcComparison) -> *const c_char {
    c.as_ref().map_or(ptr::null(), |c| c.json.as_ptr())
}

/// Rank groups, one per line, members joined by " & ". Owned by `c`.
///
/// # Safety
/// `c` must be NULL or a live comparison handle.
#[no_mangle]
pub unsafe extern "C" fn ac_comparison_ranking(c: *const AcComparison) -> *const c_char {
    c.as_ref().map_or(ptr::null(), |c| c.ranking.as_ptr())
}

/// # Safety
/// `c` must be NULL or a live comparison handle.
#[no_mangle]
pub unsafe extern "C" fn ac_comparison_edge_count(c: *const AcComparison) -> usize {
    c.as_ref().map_or(0, |c| c.edges.len())
}

/// Edge `i` of the graph, sorted by winner then loser. The name pointers
/// are owned by `c`. Any output pointer may be NULL.
///
/// # Safety
/// `c` must be a live comparison handle; non-NULL outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn ac_comparison_edge(
    c: *const AcComparison,
    i: usize,
    winner: *mut *const c_char,
    loser: *mut *const c_char,
    apv: *mut f64,
) -> AcStatus {
    guard(|| {
        non_null(c, "comparison")?;
        let c = &*c;
        let edge = c.edges.get(i).ok_or_else(|| {
            Failure::new(AcStatus::AcErrOutOfRange, format!("edge {i} of {}", c.edges.len()))
        })?;
        if !winner.is_null() {
            winner.write(edge.winner.as_ptr());
        }
        if !loser.is_null() {
            loser.write(edge.loser.as_ptr());
        }
        if !apv.is_null() {
            apv.write(edge.apv);
        }
        Ok(())
    })
}

/// # Safety
/// `c` must be NULL or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn ac_comparison_free(c: *mut AcComparison) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Two-sided McNemar p-value for one pair of discordant counts.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ac_mcnemar_pvalue(test: AcTest, n01: u64, n10: u64, out: *mut f64) -> AcStatus {
    guard(|| {
        non_null(out, "out")?;
        out.write(run_test(test_kind(test)?, n01, n10)?.p_value);
        Ok(())
    })
}

/// Adjusted p-values for `k` raw p-values.
///
/// With `n_systems = 0` the values form a plain family of `k` hypotheses,
/// which the pairwise-only corrections (Nemenyi, Shaffer, Bergmann) reject.
/// With `n_systems ≥ 2`, `k` must equal `n_systems·(n_systems−1)/2` and the
/// values are the pairs `(0,1), (0,2), …, (n−2,n−1)` in that order.
///
/// # Safety
/// `raw_p` must hold `k` values and `out` must have room for `k` values.
#[no_mangle]
pub unsafe extern "C" fn ac_adjust_pvalues(
    correction_value: AcCorrection,
    n_systems: usize,
    raw_p: *const f64,
    k: usize,
    out: *mut f64,
) -> AcStatus {
    guard(|| {
        non_null(raw_p, "raw_p")?;
        non_null(out, "out")?;
        let method = correction(correction_value)?;
        let raw = std::slice::from_raw_parts(raw_p, k);
        let h = if n_systems == 0 {
            // one baseline against k others
            let systems: Vec<String> = (0..=k).map(|i| format!("h{i}")).collect();
            let hyps = raw
                .iter()
                .enumerate()
                .map(|(i, &p)| Hypothesis {
                    pair: (systems[0].clone(), systems[i + 1].clone()),
                    raw_p: p,
                })
                .collect();
            let baseline = systems[0].clone();
            HypothesisSet::new(systems, Mode::Nx1 { baseline }, hyps)?
        } else {
            let expected = n_systems * n_systems.saturating_sub(1) / 2;
            if k != expected {
                return Err(Failure::new(
                    AcStatus::AcErrInvalidArgument,
                    format!("{n_systems} systems need {expected} pairwise p-values, got {k}"),
                ));
            }
            HypothesisSet::all_pairs((0..n_systems).map(|i| format!("s{i}")).collect(), raw)?
        };
        let apv = adjust_with_cap(&h, method, DEFAULT_BERGMANN_CAP)?.apv;
        std::slice::from_raw_parts_mut(out, k).copy_from_slice(&apv);
        Ok(())
    })
}

/// Similarity in [0, 1] between two strings under one of the nine metrics.
///
/// # Safety
/// `a` and `b` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ac_similarity(metric_value: AcMetric, a: *const c_char, b: *const c_char, out: *mut f64) -> AcStatus {
    guard(|| {
        non_null(out, "out")?;
        let kind = metric(metric_value)?;
        out.write(similarity(kind, c_str(a, "a")?, c_str(b, "b")?));
        Ok(())
    })
}
