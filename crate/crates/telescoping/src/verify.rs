//! Cross-checks between independent routes to the same quantity: exhaustive
//! enumeration against the exact finite laws, closed forms against brute
//! force, and seeded Monte Carlo against limiting moments. Every check
//! returns a report with the compared values spelled out, so a failure can
//! be read directly instead of re-run under a debugger.

use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::catalan::{
    binomial, catalan, catalan_convolution, catalan_convolution_bruteforce_with_cap, factorial,
    DEFAULT_CONVOLUTION_CAP,
};
use crate::error::{Error, Result};
use crate::finite::{avoiding_first_ascent_law, finite_first_ascent_law, finite_unicyclic_law};
use crate::law::TelescopingLaw;
use crate::perm::{enumerate_permutations_with_cap, raw_unicyclic_statistic, Permutation};
use crate::sample::{derive_seed, sample};

/// Default size cap for checks that enumerate a full symmetric group.
pub const EXHAUSTIVE_CAP: u64 = 8;

/// The 123-avoiding check filters the whole group, so it gets one more.
pub const AVOIDING_CAP: u64 = 9;

/// Acceptance band for sample mean / ln n in the growth check.
pub const GROWTH_RATIO_BAND: (f64, f64) = (0.5, 2.0);

/// Default significance level for the goodness-of-fit check.
pub const GOF_LEVEL: f64 = 0.001;

/// One compared quantity inside a report. `expected` and `observed` are
/// rendered after the comparison, so exact checks stay exact.
#[derive(Debug, Clone)]
pub struct CheckLine {
    pub label: String,
    pub expected: String,
    pub observed: String,
    pub pass: bool,
}

impl CheckLine {
    fn exact<T: fmt::Display + PartialEq>(
        label: impl Into<String>,
        expected: &T,
        observed: &T,
    ) -> Self {
        CheckLine {
            label: label.into(),
            expected: expected.to_string(),
            observed: observed.to_string(),
            pass: expected == observed,
        }
    }

    fn close(label: impl Into<String>, expected: f64, observed: f64, tol: f64) -> Self {
        CheckLine {
            label: label.into(),
            expected: format!("{expected:.9} ± {tol:.3e}"),
            observed: format!("{observed:.9}"),
            pass: (observed - expected).abs() <= tol,
        }
    }
}

/// Outcome of one verification check.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub check: String,
    /// Human-readable parameter summary, e.g. "n = 4" or a grid description.
    pub parameter: String,
    /// Numeric tolerance when the comparison is approximate; None means the
    /// check demanded exact equality.
    pub tolerance: Option<f64>,
    pub lines: Vec<CheckLine>,
    pub pass: bool,
    pub runtime: Duration,
}

impl VerificationReport {
    fn assemble(
        check: impl Into<String>,
        parameter: String,
        tolerance: Option<f64>,
        lines: Vec<CheckLine>,
        started: Instant,
    ) -> Self {
        let pass = lines.iter().all(|l| l.pass);
        VerificationReport {
            check: check.into(),
            parameter,
            tolerance,
            lines,
            pass,
            runtime: started.elapsed(),
        }
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "[{}] {} ({}) in {:.3}s",
            if self.pass { "pass" } else { "FAIL" },
            self.check,
            self.parameter,
            self.runtime.as_secs_f64()
        )?;
        for line in &self.lines {
            writeln!(
                f,
                "  [{}] {}: expected {}, observed {}",
                if line.pass { "pass" } else { "FAIL" },
                line.label,
                line.expected,
                line.observed
            )?;
        }
        Ok(())
    }
}

fn big(r: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(r))
}

fn big_uint(u: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(u.clone()))
}

/// Histogram of the unicyclic statistic over all of S_n, compared count by
/// count against n! times the exact masses.
pub fn verify_unicyclic_law(n: usize) -> Result<VerificationReport> {
    verify_unicyclic_law_with_cap(n, EXHAUSTIVE_CAP)
}

pub fn verify_unicyclic_law_with_cap(n: usize, cap: u64) -> Result<VerificationReport> {
    let started = Instant::now();
    let law = finite_unicyclic_law(n)?;
    let mut hist = vec![0u64; n + 1];
    let mut total = 0u64;
    for p in enumerate_permutations_with_cap(n, cap)? {
        hist[p.unicyclic_statistic()] += 1;
        total += 1;
    }
    let nf = factorial(n as u64);
    let mut lines = vec![CheckLine::exact(
        "total permutations",
        &big_uint(&nf),
        &big(total),
    )];
    for i in 1..=n {
        let expected = law.mass(i)? * big_uint(&nf);
        lines.push(CheckLine::exact(
            format!("count with statistic {i}"),
            &expected,
            &big(hist[i]),
        ));
    }
    Ok(VerificationReport::assemble(
        "unicyclic statistic law",
        format!("n = {n}"),
        None,
        lines,
        started,
    ))
}

/// Histogram of the first-ascent position over all of S_n against the exact
/// masses k/(k+1)! with the lone descent-only permutation at n.
pub fn verify_first_ascent_law(n: usize) -> Result<VerificationReport> {
    verify_first_ascent_law_with_cap(n, EXHAUSTIVE_CAP)
}

pub fn verify_first_ascent_law_with_cap(n: usize, cap: u64) -> Result<VerificationReport> {
    let started = Instant::now();
    let law = finite_first_ascent_law(n)?;
    let mut hist = vec![0u64; n + 1];
    let mut total = 0u64;
    for p in enumerate_permutations_with_cap(n, cap)? {
        hist[p.first_ascent()] += 1;
        total += 1;
    }
    let nf = factorial(n as u64);
    let mut lines = vec![CheckLine::exact(
        "total permutations",
        &big_uint(&nf),
        &big(total),
    )];
    for k in 1..=n {
        let expected = law.mass(k)? * big_uint(&nf);
        lines.push(CheckLine::exact(
            format!("count with first ascent {k}"),
            &expected,
            &big(hist[k]),
        ));
    }
    Ok(VerificationReport::assemble(
        "first ascent law",
        format!("n = {n}"),
        None,
        lines,
        started,
    ))
}

/// First-ascent histogram restricted to 123-avoiding permutations, compared
/// against the Catalan convolution row and the Catalan total.
pub fn verify_avoiding_first_ascent(n: usize) -> Result<VerificationReport> {
    verify_avoiding_first_ascent_with_cap(n, AVOIDING_CAP)
}

pub fn verify_avoiding_first_ascent_with_cap(n: usize, cap: u64) -> Result<VerificationReport> {
    let started = Instant::now();
    // Constructing the law revalidates that the closed-form row sums to 1.
    let _law = avoiding_first_ascent_law(n)?;
    let mut hist = vec![0u64; n + 1];
    let mut total = 0u64;
    for p in enumerate_permutations_with_cap(n, cap)? {
        if p.is_123_avoiding() {
            hist[p.first_ascent()] += 1;
            total += 1;
        }
    }
    let mut lines = vec![CheckLine::exact(
        "total 123-avoiding permutations",
        &catalan(n as u64),
        &BigUint::from(total),
    )];
    for k in 1..=n {
        lines.push(CheckLine::exact(
            format!("avoiders with first ascent {k}"),
            &catalan_convolution(n as u64, k as u64)?,
            &BigUint::from(hist[k]),
        ));
    }
    Ok(VerificationReport::assemble(
        "123-avoiding first ascent law",
        format!("n = {n}"),
        None,
        lines,
        started,
    ))
}

/// Closed-form Catalan convolution against the composition-sum brute force
/// for every 1 ≤ k ≤ n ≤ n_max, plus the row-sum identity.
pub fn verify_catalan_convolution(n_max: u64) -> Result<VerificationReport> {
    let started = Instant::now();
    if n_max > DEFAULT_CONVOLUTION_CAP {
        return Err(Error::CapExceeded {
            n: n_max,
            cap: DEFAULT_CONVOLUTION_CAP,
        });
    }
    let mut lines = Vec::new();
    for n in 1..=n_max {
        let mut row_sum = BigUint::from(0u32);
        for k in 1..=n {
            let closed = catalan_convolution(n, k)?;
            let brute = catalan_convolution_bruteforce_with_cap(n, k, n_max)?;
            row_sum += &closed;
            lines.push(CheckLine::exact(
                format!("convolution (n={n}, k={k})"),
                &brute,
                &closed,
            ));
        }
        lines.push(CheckLine::exact(
            format!("row sum at n={n}"),
            &catalan(n),
            &row_sum,
        ));
    }
    Ok(VerificationReport::assemble(
        "catalan convolution routes",
        format!("1 <= k <= n <= {n_max}"),
        None,
        lines,
        started,
    ))
}

/// Event probabilities for the nested-reduction rows: 1/(i(i+1)) for
/// i < n via the binomial route, and 1/n for the unicyclic row.
pub fn rho_values(n: usize) -> Result<Vec<BigRational>> {
    if n == 0 {
        return Err(Error::ParameterOutOfRange {
            what: "n",
            value: 0.0,
            requirement: "n >= 1",
        });
    }
    let nf = big_uint(&factorial(n as u64));
    let mut rho = Vec::with_capacity(n);
    for i in 1..n as u64 {
        let ways = binomial(n as u64, i + 1) * factorial(i - 1) * factorial(n as u64 - i - 1);
        rho.push(big_uint(&ways) / &nf);
    }
    rho.push(BigRational::new(BigInt::from(1), BigInt::from(n)));
    Ok(rho)
}

/// Exact sum of the row probabilities; equals 1 for every n.
pub fn rho_total(n: usize) -> Result<BigRational> {
    Ok(rho_values(n)?.into_iter().sum())
}

/// Row-membership census over S_n: which permutations land in which row,
/// how often each appears across rows, and who is left out entirely.
#[derive(Debug, Clone)]
pub struct Table1Report {
    pub n: usize,
    /// rows[i - 1] lists the permutations in row i, in lexicographic order.
    pub rows: Vec<Vec<Permutation>>,
    pub row_counts: Vec<usize>,
    /// Permutations appearing in at least one row, with their row count.
    pub multiplicity: BTreeMap<Permutation, usize>,
    pub excluded: Vec<Permutation>,
    pub total_row_entries: usize,
    pub rho: Vec<BigRational>,
    /// Each |row i| equals n! ρ_i exactly.
    pub rows_match_rho: bool,
    pub rho_sum_is_one: bool,
    pub pass: bool,
    pub runtime: Duration,
}

/// Default cap for the row census; it stores whole rows, not just counts.
pub const TABLE_CAP: u64 = 8;

pub fn table1_experiment(n: usize) -> Result<Table1Report> {
    table1_experiment_with_cap(n, TABLE_CAP)
}

pub fn table1_experiment_with_cap(n: usize, cap: u64) -> Result<Table1Report> {
    let started = Instant::now();
    let rho = rho_values(n)?;
    let mut rows = vec![Vec::new(); n];
    let mut multiplicity = BTreeMap::new();
    let mut excluded = Vec::new();
    for p in enumerate_permutations_with_cap(n, cap)? {
        let indices = p.rho_event_indices();
        if indices.is_empty() {
            excluded.push(p);
            continue;
        }
        multiplicity.insert(p.clone(), indices.len());
        for i in indices {
            rows[i - 1].push(p.clone());
        }
    }
    let row_counts: Vec<usize> = rows.iter().map(Vec::len).collect();
    let total_row_entries = row_counts.iter().sum();
    let nf = big_uint(&factorial(n as u64));
    let rows_match_rho = (0..n).all(|i| big(row_counts[i] as u64) == &rho[i] * &nf);
    let rho_sum_is_one = rho.iter().cloned().sum::<BigRational>().is_one();
    Ok(Table1Report {
        n,
        rows,
        row_counts,
        multiplicity,
        excluded,
        total_row_entries,
        rho,
        rows_match_rho,
        rho_sum_is_one,
        pass: rows_match_rho && rho_sum_is_one,
        runtime: started.elapsed(),
    })
}

/// Seeded Monte Carlo check that the mean unicyclic statistic grows like
/// ln n: the ratio mean/ln n must stay inside GROWTH_RATIO_BAND at every
/// grid point past 1, and its drift from the limit ratio 1 must be no
/// larger at the top of the grid than at the bottom.
pub fn empirical_mean_growth(
    n_grid: &[usize],
    reps: usize,
    seed: u64,
) -> Result<VerificationReport> {
    if n_grid.is_empty() {
        return Err(Error::ParameterOutOfRange {
            what: "n_grid",
            value: 0.0,
            requirement: "at least one grid point",
        });
    }
    if n_grid[0] == 0 {
        return Err(Error::ParameterOutOfRange {
            what: "n_grid",
            value: 0.0,
            requirement: "grid points >= 1",
        });
    }
    if n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::ParameterOutOfRange {
            what: "n_grid",
            value: n_grid.len() as f64,
            requirement: "a strictly increasing grid",
        });
    }
    if reps == 0 {
        return Err(Error::ParameterOutOfRange {
            what: "reps",
            value: 0.0,
            requirement: "reps >= 1",
        });
    }
    let started = Instant::now();
    let (lo, hi) = GROWTH_RATIO_BAND;
    let mut lines = Vec::new();
    let mut ratios = Vec::new();
    for (j, &n) in n_grid.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, j as u64));
        let mut buf: Vec<usize> = (1..=n).collect();
        let mut acc = 0.0;
        for _ in 0..reps {
            buf.shuffle(&mut rng);
            acc += raw_unicyclic_statistic(&buf) as f64;
        }
        let mean = acc / reps as f64;
        if n == 1 {
            // Every permutation of a single point scores exactly 1.
            lines.push(CheckLine::close("mean at n=1", 1.0, mean, 0.0));
        } else {
            let ratio = mean / (n as f64).ln();
            ratios.push(ratio);
            lines.push(CheckLine {
                label: format!("mean/ln n at n={n} (mean {mean:.4})"),
                expected: format!("within [{lo}, {hi}]"),
                observed: format!("{ratio:.6}"),
                pass: (lo..=hi).contains(&ratio),
            });
        }
    }
    if ratios.len() >= 2 {
        let first = (ratios[0] - 1.0).abs();
        let last = (ratios[ratios.len() - 1] - 1.0).abs();
        lines.push(CheckLine {
            label: "drift |mean/ln n - 1| narrows across the grid".into(),
            expected: format!("<= {first:.6}"),
            observed: format!("{last:.6}"),
            pass: last <= first,
        });
    }
    Ok(VerificationReport::assemble(
        "mean growth of the unicyclic statistic",
        format!("grid {n_grid:?}, reps {reps}, seed {seed:#x}"),
        None,
        lines,
        started,
    ))
}

/// Sample-moment check for the two ascent-limit laws: sampled mean and
/// variance of tpoisson(1) and tgeometric(2) against e−1, e(3−e), 3 and 4,
/// each within three standard errors.
pub fn ascent_mean_comparison(reps: usize, seed: u64) -> Result<VerificationReport> {
    if reps < 10_000 {
        return Err(Error::ParameterOutOfRange {
            what: "reps",
            value: reps as f64,
            requirement: "reps >= 10000",
        });
    }
    let started = Instant::now();
    let cases = [
        (TelescopingLaw::tpoisson(1.0)?, 0u64),
        (TelescopingLaw::tgeometric(2.0)?, 1u64),
    ];
    let mut lines = Vec::new();
    for (law, stream) in cases {
        let batch = sample(law, derive_seed(seed, stream), reps)?;
        let mean_target = law.mean().finite().expect("both laws have finite mean");
        let var_target = law
            .variance()
            .finite()
            .expect("both laws have finite variance");
        let mean_tol = 3.0 * var_target.sqrt() / (reps as f64).sqrt();
        lines.push(CheckLine::close(
            format!("{law} sample mean"),
            mean_target,
            batch.mean(),
            mean_tol,
        ));
        let observed_var = batch.variance().expect("reps >= 2");
        let mean = batch.mean();
        let fourth = batch
            .values()
            .iter()
            .map(|&x| {
                let d = x as f64 - mean;
                d * d * d * d
            })
            .sum::<f64>()
            / reps as f64;
        let var_tol = 3.0 * ((fourth - observed_var * observed_var).max(0.0) / reps as f64).sqrt();
        lines.push(CheckLine::close(
            format!("{law} sample variance"),
            var_target,
            observed_var,
            var_tol,
        ));
    }
    Ok(VerificationReport::assemble(
        "ascent limit law moments",
        format!("reps {reps}, seed {seed:#x}"),
        Some(3.0),
        lines,
        started,
    ))
}

/// Pearson chi-square goodness of fit of a sample against a telescoping
/// law. Bins are the support points up to the 0.999 quantile with the rest
/// merged into one tail bin; a bin the law gives zero mass is skipped, but
/// any observation landing there fails the check outright.
#[derive(Debug, Clone)]
pub struct GofReport {
    pub law: TelescopingLaw,
    pub sample_size: usize,
    pub bins: usize,
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
    pub level: f64,
    pub pass: bool,
    pub runtime: Duration,
}

pub fn chi_square_gof(law: TelescopingLaw, values: &[u64], level: f64) -> Result<GofReport> {
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidLevel(level));
    }
    let started = Instant::now();
    let start = law.start();
    for &x in values {
        if x < start {
            return Err(Error::SampleBelowSupport { x, start });
        }
    }
    let cutoff = law.quantile(0.999)?;
    let width = (cutoff - start) as usize + 1;
    let mut observed = vec![0u64; width + 1];
    for &x in values {
        if x > cutoff {
            observed[width] += 1;
        } else {
            observed[(x - start) as usize] += 1;
        }
    }
    let n = values.len() as f64;
    let mut statistic = 0.0;
    let mut bins = 0usize;
    let mut impossible = false;
    for k in 0..=width {
        let p = if k == width {
            law.tail(cutoff + 1)?
        } else {
            law.pmf(start + k as u64)?
        };
        let expected = n * p;
        let got = observed[k] as f64;
        if expected == 0.0 {
            if got > 0.0 {
                impossible = true;
            }
            continue;
        }
        bins += 1;
        let d = got - expected;
        statistic += d * d / expected;
    }
    // No parameters were fitted from the sample, so df is bins − 1.
    let degrees_of_freedom = bins.saturating_sub(1).max(1);
    let (statistic, p_value) = if impossible {
        (f64::INFINITY, 0.0)
    } else {
        let dist = ChiSquared::new(degrees_of_freedom as f64).expect("df >= 1");
        (statistic, 1.0 - dist.cdf(statistic))
    };
    Ok(GofReport {
        law,
        sample_size: values.len(),
        bins,
        statistic,
        degrees_of_freedom,
        p_value,
        level,
        pass: p_value >= level,
        runtime: started.elapsed(),
    })
}
