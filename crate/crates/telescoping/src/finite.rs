//! Finite-n laws with exact rational masses. These are the distributions of
//! the permutation statistics at a fixed n; the limiting laws in [`crate::law`]
//! are their n → ∞ counterparts, and the enumeration oracles in
//! [`crate::verify`] check them against brute-force histograms.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use crate::catalan::{catalan, catalan_convolution, factorial};
use crate::error::{Error, Result};

/// A probability law on {1, ..., n} held as exact rationals. No floating
/// point: masses sum to 1 as a theorem, not within a tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteLaw {
    masses: Vec<BigRational>,
}

impl FiniteLaw {
    pub fn new(masses: Vec<BigRational>) -> Result<Self> {
        if masses.is_empty() || masses.iter().any(|m| m.is_negative()) {
            return Err(Error::InvalidMasses);
        }
        let total: BigRational = masses.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidMasses);
        }
        Ok(Self { masses })
    }

    pub fn n(&self) -> usize {
        self.masses.len()
    }

    /// Mass at the 1-based support point i.
    pub fn mass(&self, i: usize) -> Result<&BigRational> {
        if i < 1 || i > self.n() {
            return Err(Error::IndexOutOfRange {
                index: i,
                n: self.n(),
            });
        }
        Ok(&self.masses[i - 1])
    }

    pub fn masses(&self) -> &[BigRational] {
        &self.masses
    }

    /// Masses converted at the reporting boundary.
    pub fn to_f64(&self) -> Vec<f64> {
        self.masses
            .iter()
            .map(|m| m.to_f64().expect("masses lie in [0, 1]"))
            .collect()
    }
}

fn ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn check_order(n: usize) -> Result<()> {
    if n < 1 {
        Err(Error::ParameterOutOfRange {
            what: "n",
            value: n as f64,
            requirement: "n >= 1",
        })
    } else {
        Ok(())
    }
}

/// Law of the largest unicyclic reduction of a uniform permutation of [n]:
/// mass 1/(i(i+1)) for i < n, with the leftover atom 1/n at i = n.
pub fn finite_unicyclic_law(n: usize) -> Result<FiniteLaw> {
    check_order(n)?;
    let mut masses = Vec::with_capacity(n);
    for i in 1..n as u64 {
        masses.push(ratio(BigUint::one(), BigUint::from(i * (i + 1))));
    }
    masses.push(ratio(BigUint::one(), BigUint::from(n)));
    FiniteLaw::new(masses)
}

/// Law of the first ascent position of a uniform permutation of [n]:
/// mass k/(k+1)! for k < n, plus the single decreasing permutation's 1/n!.
pub fn finite_first_ascent_law(n: usize) -> Result<FiniteLaw> {
    check_order(n)?;
    let mut masses = Vec::with_capacity(n);
    for k in 1..n as u64 {
        masses.push(ratio(BigUint::from(k), factorial(k + 1)));
    }
    masses.push(ratio(BigUint::one(), factorial(n as u64)));
    FiniteLaw::new(masses)
}

/// Law of the first ascent position of a uniform 123-avoiding permutation
/// of [n]: mass C_{n,k}/C_n, the k-fold Catalan convolution over the
/// Catalan number.
pub fn avoiding_first_ascent_law(n: usize) -> Result<FiniteLaw> {
    check_order(n)?;
    let c_n = catalan(n as u64);
    let masses = (1..=n as u64)
        .map(|k| Ok(ratio(catalan_convolution(n as u64, k)?, c_n.clone())))
        .collect::<Result<Vec<_>>>()?;
    FiniteLaw::new(masses)
}

/// Exact distance |C_{n,k}/C_n − k/2^{k+1}| between the avoiding-ascent
/// mass and its geometric-like limit, as a big rational. The limit is the
/// tgeometric law at θ = 2, so this gap shrinking in n is the finite-size
/// convergence statement.
pub fn geometric_approximation_error_exact(n: u64, k: u64) -> Result<BigRational> {
    if k < 1 || k > n {
        return Err(Error::IndexOutOfRange {
            index: k as usize,
            n: n as usize,
        });
    }
    let finite = ratio(catalan_convolution(n, k)?, catalan(n));
    let limit = ratio(BigUint::from(k), BigUint::from(2u64).pow(k as u32 + 1));
    let diff = finite - limit;
    Ok(diff.abs())
}

/// [`geometric_approximation_error_exact`] converted at the boundary.
pub fn geometric_approximation_error(n: u64, k: u64) -> Result<f64> {
    Ok(geometric_approximation_error_exact(n, k)?
        .to_f64()
        .expect("error is a small rational"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(num: u64, den: u64) -> BigRational {
        ratio(BigUint::from(num), BigUint::from(den))
    }

    #[test]
    fn construction_rejects_bad_masses() {
        assert!(FiniteLaw::new(vec![]).is_err());
        assert!(FiniteLaw::new(vec![r(1, 2)]).is_err());
        assert!(FiniteLaw::new(vec![r(1, 2), r(1, 2)]).is_ok());
        assert!(FiniteLaw::new(vec![r(3, 2), -r(1, 2)]).is_err());
    }

    #[test]
    fn unicyclic_masses() {
        let law = finite_unicyclic_law(4).unwrap();
        assert_eq!(law.masses(), &[r(1, 2), r(1, 6), r(1, 12), r(1, 4)]);
        assert_eq!(finite_unicyclic_law(1).unwrap().masses(), &[r(1, 1)]);
        assert!(finite_unicyclic_law(0).is_err());
        for n in 1..=100 {
            // constructor would reject a sum differing from 1
            assert_eq!(finite_unicyclic_law(n).unwrap().n(), n);
        }
    }

    #[test]
    fn first_ascent_masses() {
        let law = finite_first_ascent_law(4).unwrap();
        assert_eq!(law.masses(), &[r(1, 2), r(1, 3), r(1, 8), r(1, 24)]);
        assert_eq!(
            finite_first_ascent_law(2).unwrap().masses(),
            &[r(1, 2), r(1, 2)]
        );
        assert_eq!(finite_first_ascent_law(1).unwrap().masses(), &[r(1, 1)]);
        for n in 1..=60 {
            assert_eq!(finite_first_ascent_law(n).unwrap().n(), n);
        }
    }

    #[test]
    fn avoiding_masses() {
        let law = avoiding_first_ascent_law(4).unwrap();
        assert_eq!(law.masses(), &[r(5, 14), r(5, 14), r(3, 14), r(1, 14)]);
        assert_eq!(avoiding_first_ascent_law(1).unwrap().masses(), &[r(1, 1)]);
        for n in 1..=30usize {
            let law = avoiding_first_ascent_law(n).unwrap();
            let last = law.mass(n).unwrap().clone();
            assert_eq!(last, ratio(BigUint::one(), catalan(n as u64)));
        }
    }

    #[test]
    fn avoiding_masses_alternate_closed_form() {
        // C_{n,k}/C_n must equal k(2n−k−1)!(n+1)!/((2n)!(n−k)!) identically
        for n in 1..=12u64 {
            let law = avoiding_first_ascent_law(n as usize).unwrap();
            for k in 1..=n {
                let alt = ratio(
                    BigUint::from(k) * factorial(2 * n - k - 1) * factorial(n + 1),
                    factorial(2 * n) * factorial(n - k),
                );
                assert_eq!(*law.mass(k as usize).unwrap(), alt, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn geometric_gap_examples() {
        assert_eq!(geometric_approximation_error_exact(4, 1).unwrap(), r(3, 28));
        let as_float = geometric_approximation_error(4, 1).unwrap();
        assert!((as_float - 3.0 / 28.0).abs() < 1e-15);
        assert!(geometric_approximation_error(4, 5).is_err());
        assert!(geometric_approximation_error(4, 0).is_err());
        // loose sanity on the trend; the full big-n comparison runs in the
        // acceptance suite
        for k in 1..=3 {
            let coarse = geometric_approximation_error_exact(20, k).unwrap();
            let fine = geometric_approximation_error_exact(60, k).unwrap();
            assert!(fine < coarse, "k={k}");
        }
    }

    #[test]
    fn mass_lookup_is_one_based() {
        let law = finite_unicyclic_law(3).unwrap();
        assert_eq!(*law.mass(1).unwrap(), r(1, 2));
        assert!(law.mass(0).is_err());
        assert!(law.mass(4).is_err());
        let floats = law.to_f64();
        assert!((floats[0] - 0.5).abs() < 1e-15);
        assert!((floats.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
