//! McNemar's test on the discordant pair of a 2×2 table.
//!
//! Four variants are provided: the asymptotic χ² test, the exact binomial
//! test, the continuity-corrected χ² test and the mid-p test. Every variant
//! is two-sided and symmetric in its arguments.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::model::TestKind;

/// Below this many discordant pairs the χ² approximation is unreliable.
pub const SMALL_SAMPLE_LIMIT: u64 = 25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestResult {
    /// χ² value for the asymptotic and continuity-corrected tests.
    pub statistic: Option<f64>,
    pub p_value: f64,
    pub test_kind: TestKind,
    pub n01: u64,
    pub n10: u64,
    /// Set when a χ² based test runs on fewer than 25 discordant pairs.
    pub small_sample: bool,
}

pub fn run_test(kind: TestKind, n01: u64, n10: u64) -> Result<TestResult> {
    match kind {
        TestKind::Asymptotic => asymptotic_test(n01, n10),
        TestKind::Exact => exact_test(n01, n10),
        TestKind::ContinuityCorrected => cc_test(n01, n10),
        TestKind::MidP => midp_test(n01, n10),
    }
}

fn chi2_result(kind: TestKind, n01: u64, n10: u64, statistic: f64) -> TestResult {
    TestResult {
        statistic: Some(statistic),
        p_value: chi2_1_sf(statistic).clamp(0.0, 1.0),
        test_kind: kind,
        n01,
        n10,
        small_sample: n01 + n10 < SMALL_SAMPLE_LIMIT,
    }
}

pub fn asymptotic_test(n01: u64, n10: u64) -> Result<TestResult> {
    let n = n01 + n10;
    if n == 0 {
        return Err(Error::UndefinedStatistic);
    }
    let d = n01.abs_diff(n10) as f64;
    Ok(chi2_result(TestKind::Asymptotic, n01, n10, d * d / n as f64))
}

pub fn cc_test(n01: u64, n10: u64) -> Result<TestResult> {
    let n = n01 + n10;
    if n == 0 {
        return Err(Error::UndefinedStatistic);
    }
    // |d| - 1 is negative only for d = 0; the squared value then equals 1
    let d = n01.abs_diff(n10) as f64 - 1.0;
    Ok(chi2_result(TestKind::ContinuityCorrected, n01, n10, d * d / n as f64))
}

pub fn exact_test(n01: u64, n10: u64) -> Result<TestResult> {
    let tail = BinomialTail::new(n01, n10)?;
    Ok(TestResult {
        statistic: None,
        p_value: tail.exact_two_sided(),
        test_kind: TestKind::Exact,
        n01,
        n10,
        small_sample: false,
    })
}

pub fn midp_test(n01: u64, n10: u64) -> Result<TestResult> {
    let tail = BinomialTail::new(n01, n10)?;
    Ok(TestResult {
        statistic: None,
        p_value: tail.mid_p(),
        test_kind: TestKind::MidP,
        n01,
        n10,
        small_sample: false,
    })
}

/// Largest number of discordant pairs whose tail is summed in exact
/// integer arithmetic; above it the sum runs in log space.
pub const EXACT_TAIL_LIMIT: u64 = 20_000;

/// Upper tail of Binomial(n, 1/2) at `b = max(n01, n10)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinomialTail {
    /// P(X ≥ b)
    one_sided: f64,
    /// P(X = b)
    point: f64,
    /// min(1, 2·P(X ≥ b))
    two_sided: f64,
    mid_p: f64,
}

impl BinomialTail {
    pub fn new(n01: u64, n10: u64) -> Result<Self> {
        let n = n01 + n10;
        if n == 0 {
            return Err(Error::UndefinedStatistic);
        }
        let b = n01.max(n10);
        Ok(if n <= EXACT_TAIL_LIMIT {
            Self::exact(n, b)
        } else {
            Self::log_space(n, b)
        })
    }

    fn exact(n: u64, b: u64) -> Self {
        // walk C(n, x) from x = n down to x = b; all values scaled by 2^n
        let mut term = BigUint::one();
        let mut tail = BigUint::one();
        let mut x = n;
        while x > b {
            term = term * BigUint::from(x) / BigUint::from(n - x + 1);
            tail += &term;
            x -= 1;
        }
        let doubled = &tail << 1u32;
        let full = BigUint::one() << n;
        let capped = if doubled > full { full } else { doubled };
        let mid_p = if capped <= term {
            0.0
        } else {
            ratio_pow2(&(&capped - &term), n).clamp(0.0, 1.0)
        };
        Self {
            one_sided: ratio_pow2(&tail, n),
            point: ratio_pow2(&term, n),
            two_sided: ratio_pow2(&capped, n).min(1.0),
            mid_p,
        }
    }

    fn log_space(n: u64, b: u64) -> Self {
        // ln C(n, b) = Σ_{i < n−b} ln((n − i) / (i + 1))
        let ln_choose: f64 = (0..n - b).map(|i| ((n - i) as f64 / (i + 1) as f64).ln()).sum();
        let ln_point = ln_choose - n as f64 * std::f64::consts::LN_2;
        // Σ_{x ≥ b} C(n, x) / C(n, b); terms shrink geometrically past n/2
        let mut rel = 1.0f64;
        let mut sum = 1.0f64;
        let mut x = b;
        while x < n {
            rel *= (n - x) as f64 / (x + 1) as f64;
            sum += rel;
            if rel < sum * 1e-18 {
                break;
            }
            x += 1;
        }
        let point = ln_point.exp();
        let one_sided = (ln_point + sum.ln()).exp();
        let two_sided = (2.0 * one_sided).min(1.0);
        Self {
            one_sided,
            point,
            two_sided,
            mid_p: (two_sided - point).clamp(0.0, 1.0),
        }
    }

    pub fn one_sided(&self) -> f64 {
        self.one_sided
    }

    pub fn point_probability(&self) -> f64 {
        self.point
    }

    /// min(1, 2 × one-sided tail).
    pub fn exact_two_sided(&self) -> f64 {
        self.two_sided
    }

    /// Two-sided exact p-value minus the point probability of the observed
    /// count, clamped to [0, 1].
    pub fn mid_p(&self) -> f64 {
        self.mid_p
    }
}

/// `num / 2^exp` as a correctly scaled `f64`.
fn ratio_pow2(num: &BigUint, exp: u64) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let shift = num.bits().saturating_sub(64);
    let mantissa = (num >> shift).to_f64().expect("64-bit value fits f64");
    let e = shift as i64 - exp as i64;
    scale_pow2(mantissa, e)
}

fn scale_pow2(mut v: f64, mut e: i64) -> f64 {
    // powi on 2.0 is exact while the exponent stays within f64 range
    while e < -1000 {
        v *= 2f64.powi(-1000);
        e += 1000;
        if v == 0.0 {
            return 0.0;
        }
    }
    while e > 1000 {
        v *= 2f64.powi(1000);
        e -= 1000;
    }
    v * 2f64.powi(e as i32)
}

/// Survival function of the χ² distribution with one degree of freedom.
pub fn chi2_1_sf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x <= 0.0 {
        return 1.0;
    }
    erfc((x / 2.0).sqrt())
}

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

/// Complementary error function for `x ≥ 0`.
///
/// Uses the everywhere-positive series
/// `erf(x) = 2/√π · e^{-x²} · Σ (2x²)^k x / (1·3·…·(2k+1))` below 3 and a
/// Lentz continued fraction above it.
pub fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < 3.0 {
        1.0 - erf_series(x)
    } else {
        erfc_continued_fraction(x)
    }
}

fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= 2.0 * x2 / (2.0 * k + 1.0);
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    FRAC_2_SQRT_PI * (-x2).exp() * sum
}

/// erfc(x) = e^{-x²}/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + …))))
fn erfc_continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..500 {
        let a = k as f64 / 2.0;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        d = 1.0 / d;
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / (f * std::f64::consts::PI.sqrt())
}
