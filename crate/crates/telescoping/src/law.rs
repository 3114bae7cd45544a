//! The limiting telescoping laws: distributions on consecutive integers
//! whose upper tail q(x) = P(X ≥ x) is a closed form, so the mass function
//! is the difference f(x) = q(x) − q(x+1) and every CDF query telescopes.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Hard ceiling on series-oracle terms; past this the tail bound is treated
/// as unattainable and the call fails rather than looping on.
pub const MAX_SERIES_TERMS: usize = 100_000;

/// A moment that may fail to exist. Divergence is a first-class outcome,
/// not an exception and not an infinity smuggled into arithmetic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Moment {
    Finite(f64),
    Divergent,
}

impl Moment {
    pub fn finite(self) -> Option<f64> {
        match self {
            Moment::Finite(v) => Some(v),
            Moment::Divergent => None,
        }
    }

    pub fn is_divergent(self) -> bool {
        matches!(self, Moment::Divergent)
    }
}

impl fmt::Display for Moment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Moment::Finite(v) => write!(f, "{v}"),
            Moment::Divergent => write!(f, "divergent"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Zeta2,
    TPoisson(f64),
    TGeometric(f64),
}

/// One of the three telescoping families.
///
/// * `zeta2`: q(x) = 1/x on {1, 2, ...}; mass 1/(x(x+1)). Heavy-tailed, with
///   divergent mean.
/// * `tpoisson(θ)`, 0 < θ ≤ 1: q(x) = θ^x/x! on {0, 1, ...}. At θ = 1 the
///   mass at 0 vanishes and f(x) = x/(x+1)! for x ≥ 1.
/// * `tgeometric(θ)`, θ > 1: q(x) = ((θ−1)x + 1)/θ^x on {1, 2, ...}, with
///   mass (θ−1)²x/θ^{x+1}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TelescopingLaw {
    kind: Kind,
}

impl TelescopingLaw {
    pub fn zeta2() -> Self {
        Self { kind: Kind::Zeta2 }
    }

    pub fn tpoisson(theta: f64) -> Result<Self> {
        if theta > 0.0 && theta <= 1.0 {
            Ok(Self {
                kind: Kind::TPoisson(theta),
            })
        } else {
            Err(Error::ParameterOutOfRange {
                what: "theta",
                value: theta,
                requirement: "0 < theta <= 1",
            })
        }
    }

    pub fn tgeometric(theta: f64) -> Result<Self> {
        if theta.is_finite() && theta > 1.0 {
            Ok(Self {
                kind: Kind::TGeometric(theta),
            })
        } else {
            Err(Error::ParameterOutOfRange {
                what: "theta",
                value: theta,
                requirement: "theta > 1",
            })
        }
    }

    /// Smallest support point (0 for the tpoisson family, else 1).
    pub fn start(&self) -> u64 {
        match self.kind {
            Kind::TPoisson(_) => 0,
            _ => 1,
        }
    }

    pub fn theta(&self) -> Option<f64> {
        match self.kind {
            Kind::Zeta2 => None,
            Kind::TPoisson(t) | Kind::TGeometric(t) => Some(t),
        }
    }

    /// Upper tail q(x) = P(X ≥ x); equals 1 at the support start and is
    /// nonincreasing from there.
    pub fn tail(&self, x: u64) -> Result<f64> {
        self.check_support(x)?;
        Ok(self.q(x))
    }

    pub fn pmf(&self, x: u64) -> Result<f64> {
        self.check_support(x)?;
        // the two tails agree to well under 1e-15 wherever rounding could
        // push the difference negative, so clamping loses nothing real
        Ok((self.q(x) - self.q(x + 1)).max(0.0))
    }

    pub fn cdf(&self, x: u64) -> Result<f64> {
        self.check_support(x)?;
        Ok(1.0 - self.q(x + 1))
    }

    /// Right-continuous inverse CDF: the smallest x with cdf(x) ≥ u.
    ///
    /// zeta2 inverts its tail in closed form; the light-tailed families
    /// bracket by exponential doubling and binary-search the monotone CDF.
    /// Either way a final local scan pins minimality against the computed
    /// CDF, so rounding at the bracket edges cannot shift the answer.
    pub fn quantile(&self, u: f64) -> Result<u64> {
        if !(0.0..1.0).contains(&u) {
            return Err(Error::InvalidQuantileLevel(u));
        }
        let start = self.start();
        let mut x = match self.kind {
            Kind::Zeta2 => ((1.0 / (1.0 - u)).ceil() as u64).saturating_sub(1).max(1),
            _ => {
                if 1.0 - self.q(start + 1) >= u {
                    start
                } else {
                    let mut lo = start;
                    let mut hi = start.max(1) * 2;
                    while 1.0 - self.q(hi + 1) < u {
                        lo = hi;
                        hi *= 2;
                    }
                    while hi - lo > 1 {
                        let mid = lo + (hi - lo) / 2;
                        if 1.0 - self.q(mid + 1) >= u {
                            hi = mid;
                        } else {
                            lo = mid;
                        }
                    }
                    hi
                }
            }
        };
        while x > start && 1.0 - self.q(x) >= u {
            x -= 1;
        }
        while 1.0 - self.q(x + 1) < u {
            x += 1;
        }
        Ok(x)
    }

    pub fn mean(&self) -> Moment {
        match self.kind {
            Kind::Zeta2 => Moment::Divergent,
            Kind::TPoisson(th) => Moment::Finite(th.exp() - 1.0),
            Kind::TGeometric(th) => Moment::Finite(1.0 + 2.0 / (th - 1.0)),
        }
    }

    pub fn variance(&self) -> Moment {
        match self.kind {
            Kind::Zeta2 => Moment::Divergent,
            Kind::TPoisson(th) => Moment::Finite(th.exp() * (2.0 * th + 1.0 - th.exp())),
            Kind::TGeometric(th) => Moment::Finite(2.0 * th / ((th - 1.0) * (th - 1.0))),
        }
    }

    /// Moment generating function in closed form. Domains differ by family:
    /// zeta2 needs t ≤ 0 (its mean already diverges), tgeometric needs
    /// t < ln θ (pole where e^t reaches θ), tpoisson is entire.
    pub fn mgf(&self, t: f64) -> Result<f64> {
        match self.kind {
            Kind::Zeta2 => {
                if !(t <= 0.0) {
                    return Err(Error::MgfDomain {
                        t,
                        requirement: "t <= 0",
                    });
                }
                if t == 0.0 {
                    return Ok(1.0);
                }
                let z = t.exp();
                Ok(1.0 + (1.0 - z) / z * (1.0 - z).ln())
            }
            Kind::TPoisson(th) => {
                if !t.is_finite() {
                    return Err(Error::MgfDomain {
                        t,
                        requirement: "finite t",
                    });
                }
                Ok((th * t.exp()).exp() * (1.0 - (-t).exp()) + (-t).exp())
            }
            Kind::TGeometric(th) => {
                if !(t < th.ln()) {
                    return Err(Error::MgfDomain {
                        t,
                        requirement: "t < ln(theta)",
                    });
                }
                let ratio = (th - 1.0) / (th - t.exp());
                Ok(ratio * ratio * t.exp())
            }
        }
    }

    /// The MGF as a truncated series Σ e^{tx} f(x), an oracle independent
    /// of the closed forms. Terms accumulate until a certified bound on the
    /// remaining tail drops below `tail_tol`; if that takes more than
    /// [`MAX_SERIES_TERMS`] terms the call fails instead of stalling (the
    /// zeta2 tail at t = 0 shrinks only like 1/x, so tight tolerances are
    /// genuinely out of reach there).
    pub fn mgf_series(&self, t: f64, tail_tol: f64) -> Result<f64> {
        if !(tail_tol > 0.0) {
            return Err(Error::ParameterOutOfRange {
                what: "tail_tol",
                value: tail_tol,
                requirement: "tail_tol > 0",
            });
        }
        match self.kind {
            Kind::Zeta2 => {
                if !(t <= 0.0) {
                    return Err(Error::MgfDomain {
                        t,
                        requirement: "t <= 0",
                    });
                }
                let z = t.exp();
                let mut sum = 0.0;
                let mut zpow = z;
                for x in 1..=MAX_SERIES_TERMS as u64 {
                    let xf = x as f64;
                    sum += zpow / (xf * (xf + 1.0));
                    // remaining tail is at most z^{x+1} Σ_{y>x} 1/(y(y+1)),
                    // and that sum telescopes to 1/(x+1)
                    if zpow * z / (xf + 1.0) < tail_tol {
                        return Ok(sum);
                    }
                    zpow *= z;
                }
                Err(Error::SeriesHorizon {
                    terms: MAX_SERIES_TERMS,
                    tol: tail_tol,
                })
            }
            Kind::TPoisson(th) => {
                if !t.is_finite() {
                    return Err(Error::MgfDomain {
                        t,
                        requirement: "finite t",
                    });
                }
                let c = th * t.exp();
                let mut sum = 0.0;
                let mut w = 1.0;
                for x in 0..MAX_SERIES_TERMS as u64 {
                    let xf = x as f64;
                    sum += w * (1.0 - th / (xf + 1.0));
                    let w_next = w * c / (xf + 1.0);
                    // each term is at most c^x/x!, whose tail past x is
                    // geometrically dominated once x + 2 > c
                    if xf + 2.0 > c && w_next / (1.0 - c / (xf + 2.0)) < tail_tol {
                        return Ok(sum);
                    }
                    w = w_next;
                }
                Err(Error::SeriesHorizon {
                    terms: MAX_SERIES_TERMS,
                    tol: tail_tol,
                })
            }
            Kind::TGeometric(th) => {
                if !(t < th.ln()) {
                    return Err(Error::MgfDomain {
                        t,
                        requirement: "t < ln(theta)",
                    });
                }
                let r = t.exp() / th;
                let a = (th - 1.0) * (th - 1.0) / th;
                let mut sum = 0.0;
                let mut rpow = r;
                for x in 1..=MAX_SERIES_TERMS as u64 {
                    let xf = x as f64;
                    sum += a * xf * rpow;
                    // arithmetico-geometric tail, exactly
                    // Σ_{y>x} y r^y = r^{x+1}((x+1) − x r)/(1 − r)²
                    let tail = a * rpow * r * (xf + 1.0 - xf * r) / ((1.0 - r) * (1.0 - r));
                    if tail < tail_tol {
                        return Ok(sum);
                    }
                    rpow *= r;
                }
                Err(Error::SeriesHorizon {
                    terms: MAX_SERIES_TERMS,
                    tol: tail_tol,
                })
            }
        }
    }

    fn check_support(&self, x: u64) -> Result<()> {
        if x < self.start() {
            Err(Error::BelowSupport {
                x,
                start: self.start(),
            })
        } else {
            Ok(())
        }
    }

    fn q(&self, x: u64) -> f64 {
        match self.kind {
            Kind::Zeta2 => 1.0 / x as f64,
            Kind::TPoisson(th) => (1..=x).fold(1.0, |q, k| q * th / k as f64),
            Kind::TGeometric(th) => {
                if x > i32::MAX as u64 {
                    return 0.0;
                }
                // computing the numerator first keeps q(1) = θ/θ = 1 exact
                ((th - 1.0) * x as f64 + 1.0) / th.powi(x as i32)
            }
        }
    }
}

impl fmt::Display for TelescopingLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            Kind::Zeta2 => write!(f, "zeta2"),
            Kind::TPoisson(th) => write!(f, "tpoisson({th})"),
            Kind::TGeometric(th) => write!(f, "tgeometric({th})"),
        }
    }
}

/// Sign of the mass difference at x between tpoisson(θ) and an ordinary
/// Poisson(θ): `Less` means the telescoping law puts less weight there.
/// The telescoping law sits below at x = 0 and above everywhere else on
/// 0 < θ < 1 (the two laws share Σx f(x) only in the θ → 0 limit, so the
/// deficit at 0 must be repaid across all of x ≥ 1).
pub fn poisson_comparison(theta: f64, x: u64) -> Result<Ordering> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::ParameterOutOfRange {
            what: "theta",
            value: theta,
            requirement: "0 < theta < 1",
        });
    }
    let tp = TelescopingLaw::tpoisson(theta)?.pmf(x)?;
    let poisson = (-theta).exp() * (1..=x).fold(1.0, |m, k| m * theta / k as f64);
    Ok(tp.partial_cmp(&poisson).expect("masses are finite"))
}
