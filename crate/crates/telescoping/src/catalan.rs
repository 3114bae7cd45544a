//! Exact Catalan machinery: factorials, binomials, Catalan numbers and the
//! k-fold Catalan convolution, each with an independent brute-force route
//! so the closed forms can be cross-checked.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Default cap on `n` for composition enumeration in
/// [`catalan_convolution_bruteforce`].
pub const DEFAULT_CONVOLUTION_CAP: u64 = 30;

pub fn factorial(n: u64) -> BigUint {
    let mut out = BigUint::one();
    for k in 2..=n {
        out *= k;
    }
    out
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut out = BigUint::one();
    // multiply before dividing so every intermediate quotient is exact
    for i in 1..=k {
        out *= n - k + i;
        out /= i;
    }
    out
}

/// n-th Catalan number, binom(2n, n) / (n + 1).
pub fn catalan(n: u64) -> BigUint {
    let (q, r) = binomial(2 * n, n).div_rem(&BigUint::from(n + 1));
    debug_assert!(r.is_zero());
    q
}

/// k-fold Catalan convolution in closed form, k/(2n−k) · binom(2n−k, n).
pub fn catalan_convolution(n: u64, k: u64) -> Result<BigUint> {
    check_convolution_range(n, k)?;
    let (q, r) = (binomial(2 * n - k, n) * k).div_rem(&BigUint::from(2 * n - k));
    debug_assert!(r.is_zero());
    Ok(q)
}

/// Same value by its definition: Σ over compositions n = i₁ + … + i_k of
/// Π C_{i_r − 1}. The composition count explodes, hence the cap.
pub fn catalan_convolution_bruteforce(n: u64, k: u64) -> Result<BigUint> {
    catalan_convolution_bruteforce_with_cap(n, k, DEFAULT_CONVOLUTION_CAP)
}

pub fn catalan_convolution_bruteforce_with_cap(n: u64, k: u64, cap: u64) -> Result<BigUint> {
    check_convolution_range(n, k)?;
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    let table: Vec<BigUint> = (0..n).map(catalan).collect();
    let mut total = BigUint::zero();
    let mut acc = BigUint::one();
    sum_compositions(n, k, &table, &mut acc, &mut total);
    Ok(total)
}

fn sum_compositions(
    remaining: u64,
    parts: u64,
    table: &[BigUint],
    acc: &mut BigUint,
    total: &mut BigUint,
) {
    if parts == 1 {
        *total += &*acc * &table[(remaining - 1) as usize];
        return;
    }
    // leave at least one unit for each later part
    for first in 1..=(remaining - parts + 1) {
        let saved = acc.clone();
        *acc *= &table[(first - 1) as usize];
        sum_compositions(remaining - first, parts - 1, table, acc, total);
        *acc = saved;
    }
}

fn check_convolution_range(n: u64, k: u64) -> Result<()> {
    if k < 1 || k > n {
        return Err(Error::IndexOutOfRange {
            index: k as usize,
            n: n as usize,
        });
    }
    Ok(())
}
