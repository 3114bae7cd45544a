//! C ABI over the telescoping laws. Laws are opaque heap handles created
//! and released by this library; every other exchange happens through
//! caller-owned flat buffers and out-parameters, and every entry point
//! returns a status code instead of unwinding.
//!
//! One pointer contract covers every entry point, so the individual
//! functions do not repeat it: handles must come from a `tl_law_*`
//! constructor and not have been freed; `values`/`buffer` must be valid
//! for `len`/`capacity` elements; out-parameters must be writable. Null
//! handles, buffers, and out-parameters are detected and reported as
//! `InvalidArgument`; dangling or undersized memory cannot be.

#![deny(unsafe_op_in_unsafe_fn)]
#![allow(clippy::missing_safety_doc)] // the contract is stated once, above

use std::panic::{catch_unwind, AssertUnwindSafe};

use telescoping::inference::{
    mle_tgeometric, mle_tpoisson_numeric, mom_tgeometric, mom_tpoisson, np_test_tgeometric,
    Calibration, Method,
};
use telescoping::law::TelescopingLaw;
use telescoping::sample::sample;
use telescoping::Error;

/// Status code returned by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TlStatus {
    Ok = 0,
    /// Null pointer, undersized buffer, or an out-parameter is missing.
    InvalidArgument = 1,
    /// A parameter violates its mathematical domain (theta, quantile level,
    /// mgf argument, hypothesis ordering, significance level).
    DomainError = 2,
    /// The sample is unusable: empty, outside the support, or degenerate
    /// for the requested estimator.
    DegenerateSample = 3,
    /// An enumeration or series cap was exceeded.
    CapExceeded = 4,
    /// Unexpected internal failure (a bug on this side of the boundary).
    InternalError = 5,
}

fn status_of(err: &Error) -> TlStatus {
    match err {
        Error::ParameterOutOfRange { .. }
        | Error::BelowSupport { .. }
        | Error::InvalidQuantileLevel(_)
        | Error::MgfDomain { .. }
        | Error::HypothesisOrder { .. }
        | Error::InvalidLevel(_) => TlStatus::DomainError,
        Error::EmptySample
        | Error::SampleBelowSupport { .. }
        | Error::DegenerateSample(_)
        | Error::SampleSizeMismatch { .. } => TlStatus::DegenerateSample,
        Error::CapExceeded { .. } | Error::SeriesHorizon { .. } => TlStatus::CapExceeded,
        _ => TlStatus::InternalError,
    }
}

/// Opaque handle to a telescoping law.
pub struct TlLaw {
    inner: TelescopingLaw,
}

/// A possibly divergent moment. `value` is meaningful only when `finite`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct TlMoment {
    pub finite: bool,
    pub value: f64,
}

/// Estimation route used for a fit.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TlMethod {
    Mom = 0,
    MleClosed = 1,
    MleNumeric = 2,
}

/// Result of a parameter fit.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct TlEstimate {
    pub theta_hat: f64,
    pub sample_mean: f64,
    pub clamped: bool,
    pub method: TlMethod,
}

/// Outcome of the most-powerful threshold test.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct TlNpResult {
    pub reject: bool,
    pub statistic: f64,
    pub critical_value: f64,
}

/// Runs a body that may touch raw pointers, converting panics into a
/// status instead of unwinding across the boundary.
fn guarded(body: impl FnOnce() -> TlStatus) -> TlStatus {
    catch_unwind(AssertUnwindSafe(body)).unwrap_or(TlStatus::InternalError)
}

fn emit_law(law: Result<TelescopingLaw, Error>, out: *mut *mut TlLaw) -> TlStatus {
    if out.is_null() {
        return TlStatus::InvalidArgument;
    }
    match law {
        Ok(inner) => {
            unsafe { *out = Box::into_raw(Box::new(TlLaw { inner })) };
            TlStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Creates the zeta2 law (support 1, 2, ...; divergent mean).
#[no_mangle]
pub unsafe extern "C" fn tl_law_zeta2(out: *mut *mut TlLaw) -> TlStatus {
    guarded(|| emit_law(Ok(TelescopingLaw::zeta2()), out))
}

/// Creates a tpoisson law; requires 0 < theta <= 1.
#[no_mangle]
pub unsafe extern "C" fn tl_law_tpoisson(theta: f64, out: *mut *mut TlLaw) -> TlStatus {
    guarded(|| emit_law(TelescopingLaw::tpoisson(theta), out))
}

/// Creates a tgeometric law; requires theta > 1.
#[no_mangle]
pub unsafe extern "C" fn tl_law_tgeometric(theta: f64, out: *mut *mut TlLaw) -> TlStatus {
    guarded(|| emit_law(TelescopingLaw::tgeometric(theta), out))
}

/// Releases a law handle. Passing NULL is a no-op.
#[no_mangle]
pub unsafe extern "C" fn tl_law_free(law: *mut TlLaw) {
    if !law.is_null() {
        drop(unsafe { Box::from_raw(law) });
    }
}

unsafe fn law_ref<'a>(law: *const TlLaw) -> Option<&'a TelescopingLaw> {
    unsafe { law.as_ref() }.map(|l| &l.inner)
}

/// First support point of the law.
#[no_mangle]
pub unsafe extern "C" fn tl_law_start(law: *const TlLaw, out: *mut u64) -> TlStatus {
    guarded(|| {
        let (Some(law), false) = (unsafe { law_ref(law) }, out.is_null()) else {
            return TlStatus::InvalidArgument;
        };
        unsafe { *out = law.start() };
        TlStatus::Ok
    })
}

unsafe fn eval_f64(
    law: *const TlLaw,
    out: *mut f64,
    f: impl FnOnce(&TelescopingLaw) -> Result<f64, Error>,
) -> TlStatus {
    let (Some(law), false) = (unsafe { law_ref(law) }, out.is_null()) else {
        return TlStatus::InvalidArgument;
    };
    match f(law) {
        Ok(v) => {
            unsafe { *out = v };
            TlStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// P(X = x).
#[no_mangle]
pub unsafe extern "C" fn tl_law_pmf(law: *const TlLaw, x: u64, out: *mut f64) -> TlStatus {
    guarded(|| unsafe { eval_f64(law, out, |l| l.pmf(x)) })
}

/// P(X <= x).
#[no_mangle]
pub unsafe extern "C" fn tl_law_cdf(law: *const TlLaw, x: u64, out: *mut f64) -> TlStatus {
    guarded(|| unsafe { eval_f64(law, out, |l| l.cdf(x)) })
}

/// P(X >= x).
#[no_mangle]
pub unsafe extern "C" fn tl_law_tail(law: *const TlLaw, x: u64, out: *mut f64) -> TlStatus {
    guarded(|| unsafe { eval_f64(law, out, |l| l.tail(x)) })
}

/// Moment generating function at t, where it exists.
#[no_mangle]
pub unsafe extern "C" fn tl_law_mgf(law: *const TlLaw, t: f64, out: *mut f64) -> TlStatus {
    guarded(|| unsafe { eval_f64(law, out, |l| l.mgf(t)) })
}

/// Smallest x with P(X <= x) >= u, for u in [0, 1).
#[no_mangle]
pub unsafe extern "C" fn tl_law_quantile(law: *const TlLaw, u: f64, out: *mut u64) -> TlStatus {
    guarded(|| {
        let (Some(law), false) = (unsafe { law_ref(law) }, out.is_null()) else {
            return TlStatus::InvalidArgument;
        };
        match law.quantile(u) {
            Ok(x) => {
                unsafe { *out = x };
                TlStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

unsafe fn eval_moment(
    law: *const TlLaw,
    out: *mut TlMoment,
    f: impl FnOnce(&TelescopingLaw) -> Option<f64>,
) -> TlStatus {
    let (Some(law), false) = (unsafe { law_ref(law) }, out.is_null()) else {
        return TlStatus::InvalidArgument;
    };
    let moment = match f(law) {
        Some(value) => TlMoment {
            finite: true,
            value,
        },
        None => TlMoment {
            finite: false,
            value: f64::INFINITY,
        },
    };
    unsafe { *out = moment };
    TlStatus::Ok
}

/// E X; `finite` is false for the divergent zeta2 mean.
#[no_mangle]
pub unsafe extern "C" fn tl_law_mean(law: *const TlLaw, out: *mut TlMoment) -> TlStatus {
    guarded(|| unsafe { eval_moment(law, out, |l| l.mean().finite()) })
}

/// Var X; `finite` is false when it diverges.
#[no_mangle]
pub unsafe extern "C" fn tl_law_variance(law: *const TlLaw, out: *mut TlMoment) -> TlStatus {
    guarded(|| unsafe { eval_moment(law, out, |l| l.variance().finite()) })
}

/// Draws `count` values into the caller's buffer of capacity `capacity`
/// using the library's seeded generator; identical (law, seed, count)
/// triples produce identical draws.
#[no_mangle]
pub unsafe extern "C" fn tl_law_sample(
    law: *const TlLaw,
    seed: u64,
    count: usize,
    buffer: *mut u64,
    capacity: usize,
) -> TlStatus {
    guarded(|| {
        let (Some(law), false) = (unsafe { law_ref(law) }, buffer.is_null()) else {
            return TlStatus::InvalidArgument;
        };
        if capacity < count {
            return TlStatus::InvalidArgument;
        }
        match sample(*law, seed, count) {
            Ok(batch) => {
                let dst = unsafe { std::slice::from_raw_parts_mut(buffer, count) };
                dst.copy_from_slice(batch.values());
                TlStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

fn convert_estimate(
    result: Result<telescoping::inference::EstimationResult, Error>,
    out: *mut TlEstimate,
) -> TlStatus {
    if out.is_null() {
        return TlStatus::InvalidArgument;
    }
    match result {
        Ok(r) => {
            let method = match r.method {
                Method::Mom => TlMethod::Mom,
                Method::MleClosed => TlMethod::MleClosed,
                Method::MleNumeric => TlMethod::MleNumeric,
            };
            unsafe {
                *out = TlEstimate {
                    theta_hat: r.theta_hat,
                    sample_mean: r.sample_mean,
                    clamped: r.clamped,
                    method,
                }
            };
            TlStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

unsafe fn values_slice<'a>(values: *const u64, len: usize) -> Option<&'a [u64]> {
    if values.is_null() {
        None
    } else {
        Some(unsafe { std::slice::from_raw_parts(values, len) })
    }
}

/// Moment estimate of the tpoisson parameter; clamps at theta = 1.
#[no_mangle]
pub unsafe extern "C" fn tl_estimate_tpoisson_mom(
    values: *const u64,
    len: usize,
    out: *mut TlEstimate,
) -> TlStatus {
    guarded(|| {
        let Some(values) = (unsafe { values_slice(values, len) }) else {
            return TlStatus::InvalidArgument;
        };
        convert_estimate(mom_tpoisson(values), out)
    })
}

/// Numeric maximum-likelihood estimate of the tpoisson parameter.
#[no_mangle]
pub unsafe extern "C" fn tl_estimate_tpoisson_mle(
    values: *const u64,
    len: usize,
    tol: f64,
    out: *mut TlEstimate,
) -> TlStatus {
    guarded(|| {
        let Some(values) = (unsafe { values_slice(values, len) }) else {
            return TlStatus::InvalidArgument;
        };
        convert_estimate(mle_tpoisson_numeric(values, tol), out)
    })
}

/// Estimate of the tgeometric parameter; the maximum-likelihood and moment
/// routes coincide, so `mle` only selects the reported method.
#[no_mangle]
pub unsafe extern "C" fn tl_estimate_tgeometric(
    values: *const u64,
    len: usize,
    mle: bool,
    out: *mut TlEstimate,
) -> TlStatus {
    guarded(|| {
        let Some(values) = (unsafe { values_slice(values, len) }) else {
            return TlStatus::InvalidArgument;
        };
        let result = if mle {
            mle_tgeometric(values)
        } else {
            mom_tgeometric(values)
        };
        convert_estimate(result, out)
    })
}

/// Most-powerful test of theta = theta0 against theta = theta1 > theta0
/// for the tgeometric family, rejecting for small sample means. The
/// threshold is calibrated by simulated null batches when `monte_carlo`,
/// and by the CLT plug-in otherwise; `seed` only matters for the former.
#[no_mangle]
pub unsafe extern "C" fn tl_np_test_tgeometric(
    values: *const u64,
    len: usize,
    theta0: f64,
    theta1: f64,
    alpha: f64,
    monte_carlo: bool,
    seed: u64,
    out: *mut TlNpResult,
) -> TlStatus {
    guarded(|| {
        let (Some(values), false) = (unsafe { values_slice(values, len) }, out.is_null()) else {
            return TlStatus::InvalidArgument;
        };
        let calibration = if monte_carlo {
            Calibration::MonteCarlo
        } else {
            Calibration::Clt
        };
        match np_test_tgeometric(values, theta0, theta1, alpha, calibration, seed) {
            Ok(r) => {
                unsafe {
                    *out = TlNpResult {
                        reject: r.reject,
                        statistic: r.statistic,
                        critical_value: r.critical_value,
                    }
                };
                TlStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    fn make(build: impl FnOnce(*mut *mut TlLaw) -> TlStatus) -> *mut TlLaw {
        let mut law: *mut TlLaw = ptr::null_mut();
        assert_eq!(build(&mut law), TlStatus::Ok);
        assert!(!law.is_null());
        law
    }

    #[test]
    fn law_lifecycle_and_pointwise_evaluation() {
        let law = make(|out| unsafe { tl_law_tgeometric(2.0, out) });
        unsafe {
            let mut start = 99u64;
            assert_eq!(tl_law_start(law, &mut start), TlStatus::Ok);
            assert_eq!(start, 1);

            let mut p = 0.0;
            assert_eq!(tl_law_pmf(law, 1, &mut p), TlStatus::Ok);
            assert_eq!(p, 0.25);
            assert_eq!(tl_law_cdf(law, 2, &mut p), TlStatus::Ok);
            assert_eq!(p, 0.5);
            assert_eq!(tl_law_tail(law, 3, &mut p), TlStatus::Ok);
            assert!((p - 0.5).abs() < 1e-15);

            let mut x = 0u64;
            assert_eq!(tl_law_quantile(law, 0.5, &mut x), TlStatus::Ok);
            assert_eq!(x, 2);

            let mut m = TlMoment {
                finite: false,
                value: 0.0,
            };
            assert_eq!(tl_law_mean(law, &mut m), TlStatus::Ok);
            assert!(m.finite);
            assert_eq!(m.value, 3.0);
            assert_eq!(tl_law_variance(law, &mut m), TlStatus::Ok);
            assert_eq!(m.value, 4.0);
            tl_law_free(law);
        }
    }

    #[test]
    fn divergent_moments_are_flagged_not_errored() {
        let law = make(|out| unsafe { tl_law_zeta2(out) });
        unsafe {
            let mut m = TlMoment {
                finite: true,
                value: 0.0,
            };
            assert_eq!(tl_law_mean(law, &mut m), TlStatus::Ok);
            assert!(!m.finite);
            tl_law_free(law);
        }
    }

    #[test]
    fn domain_violations_map_to_domain_status() {
        let mut law: *mut TlLaw = ptr::null_mut();
        unsafe {
            assert_eq!(tl_law_tpoisson(1.5, &mut law), TlStatus::DomainError);
            assert_eq!(tl_law_tgeometric(1.0, &mut law), TlStatus::DomainError);
        }
        assert!(law.is_null());

        let law = make(|out| unsafe { tl_law_tpoisson(0.5, out) });
        unsafe {
            let mut v = 0.0;
            assert_eq!(tl_law_mgf(law, 1e9, &mut v), TlStatus::Ok, "entire mgf");
            let mut x = 0u64;
            assert_eq!(tl_law_quantile(law, 1.0, &mut x), TlStatus::DomainError);
            tl_law_free(law);
        }

        let law = make(|out| unsafe { tl_law_tgeometric(2.0, out) });
        unsafe {
            let mut v = 0.0;
            // ln 2 is the abscissa of convergence for theta = 2.
            assert_eq!(tl_law_mgf(law, 0.8, &mut v), TlStatus::DomainError);
            let mut p = 0.0;
            assert_eq!(tl_law_pmf(law, 0, &mut p), TlStatus::DomainError);
            tl_law_free(law);
        }
    }

    #[test]
    fn null_pointers_are_rejected_not_dereferenced() {
        unsafe {
            assert_eq!(tl_law_zeta2(ptr::null_mut()), TlStatus::InvalidArgument);
            let mut p = 0.0;
            assert_eq!(
                tl_law_pmf(ptr::null(), 1, &mut p),
                TlStatus::InvalidArgument
            );
            let law = make(|out| tl_law_zeta2(out));
            assert_eq!(
                tl_law_pmf(law, 1, ptr::null_mut()),
                TlStatus::InvalidArgument
            );
            let mut est = TlEstimate {
                theta_hat: 0.0,
                sample_mean: 0.0,
                clamped: false,
                method: TlMethod::Mom,
            };
            assert_eq!(
                tl_estimate_tpoisson_mom(ptr::null(), 3, &mut est),
                TlStatus::InvalidArgument
            );
            tl_law_free(law);
            tl_law_free(ptr::null_mut());
        }
    }

    #[test]
    fn sampling_through_the_boundary_matches_the_library() {
        let law = make(|out| unsafe { tl_law_tpoisson(1.0, out) });
        unsafe {
            let mut buf = vec![0u64; 64];
            assert_eq!(
                tl_law_sample(law, 1234, 64, buf.as_mut_ptr(), buf.len()),
                TlStatus::Ok
            );
            let expected = sample(TelescopingLaw::tpoisson(1.0).unwrap(), 1234, 64).unwrap();
            assert_eq!(buf, expected.values());

            assert_eq!(
                tl_law_sample(law, 1234, 64, buf.as_mut_ptr(), 10),
                TlStatus::InvalidArgument,
                "undersized buffer"
            );
            tl_law_free(law);
        }
    }

    #[test]
    fn estimators_round_trip_through_the_boundary() {
        let mut est = TlEstimate {
            theta_hat: 0.0,
            sample_mean: 0.0,
            clamped: false,
            method: TlMethod::MleNumeric,
        };
        let values = [1u64, 5, 3, 3];
        unsafe {
            assert_eq!(
                tl_estimate_tgeometric(values.as_ptr(), values.len(), false, &mut est),
                TlStatus::Ok
            );
            assert_eq!(est.theta_hat, 2.0);
            assert_eq!(est.method, TlMethod::Mom);
            assert!(!est.clamped);

            let big = [4u64, 4, 4];
            assert_eq!(
                tl_estimate_tpoisson_mom(big.as_ptr(), big.len(), &mut est),
                TlStatus::Ok
            );
            assert_eq!(est.theta_hat, 1.0);
            assert!(est.clamped);

            let ones = [1u64, 1, 1];
            assert_eq!(
                tl_estimate_tgeometric(ones.as_ptr(), ones.len(), true, &mut est),
                TlStatus::DegenerateSample
            );
            assert_eq!(
                tl_estimate_tpoisson_mom(values.as_ptr(), 0, &mut est),
                TlStatus::DegenerateSample
            );
        }
    }

    #[test]
    fn threshold_test_through_the_boundary() {
        let law = make(|out| unsafe { tl_law_tgeometric(4.0, out) });
        let mut buf = vec![0u64; 500];
        let mut result = TlNpResult {
            reject: false,
            statistic: 0.0,
            critical_value: 0.0,
        };
        unsafe {
            assert_eq!(
                tl_law_sample(law, 99, 500, buf.as_mut_ptr(), buf.len()),
                TlStatus::Ok
            );
            assert_eq!(
                tl_np_test_tgeometric(
                    buf.as_ptr(),
                    buf.len(),
                    2.0,
                    4.0,
                    0.05,
                    false,
                    0,
                    &mut result
                ),
                TlStatus::Ok
            );
            assert!(result.reject, "far alternative at n = 500");
            assert!(result.statistic < result.critical_value);

            assert_eq!(
                tl_np_test_tgeometric(
                    buf.as_ptr(),
                    buf.len(),
                    4.0,
                    2.0,
                    0.05,
                    false,
                    0,
                    &mut result
                ),
                TlStatus::DomainError,
                "hypotheses out of order"
            );
            tl_law_free(law);
        }
    }
}
