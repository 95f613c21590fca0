//! Analytic pmfs and goodness-of-fit machinery.
//!
//! Chi-square bins are merged left to right until each merged bin expects at
//! least [`MIN_EXPECTED`] observations; any remainder joins the last bin.
//! The right tail beyond the largest observed value is one open-ended bin.

use serde::Serialize;

use crate::construct::{rising_factorial_log, urn_count_single_atom, IidCoins, DEFAULT_MAX_COINS};
use crate::error::{Error, Result};
use crate::measures::{MultisetPointProcess, StepFunction};
use crate::rng::RngState;
use crate::special::{chi_square_sf, ln_factorial};

/// Minimum expected count per chi-square bin.
pub const MIN_EXPECTED: f64 = 5.0;

/// Significance level of every pinned-seed test.
pub const ALPHA: f64 = 1e-3;

fn check_nb_params(r: f64, p: f64) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::invalid(format!("negative binomial r = {r} must be positive")));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid(format!("negative binomial p = {p} outside (0, 1)")));
    }
    Ok(())
}

/// `P{Z = k} = (r)_k / k! * p^k * (1 - p)^r`
pub fn nb_pmf(k: u64, r: f64, p: f64) -> Result<f64> {
    check_nb_params(r, p)?;
    let log = rising_factorial_log(r, k) - ln_factorial(k) + k as f64 * p.ln() + r * (-p).ln_1p();
    Ok(log.exp())
}

pub fn poisson_pmf(k: u64, lambda: f64) -> Result<f64> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::invalid(format!("poisson rate {lambda} must be finite and >= 0")));
    }
    if lambda == 0.0 {
        return Ok(if k == 0 { 1.0 } else { 0.0 });
    }
    Ok((k as f64 * lambda.ln() - lambda - ln_factorial(k)).exp())
}

/// `sum_i w_i * nb_pmf(k, r, p_i)`; weights must be non-negative and sum to one.
pub fn mixture_nb_pmf(k: u64, r: f64, components: &[(f64, f64)]) -> Result<f64> {
    if components.is_empty() {
        return Err(Error::invalid("mixture needs at least one component"));
    }
    if components.iter().any(|c| !(c.0 >= 0.0 && c.0.is_finite())) {
        return Err(Error::invalid("mixture weights must be finite and >= 0"));
    }
    let total: f64 = components.iter().map(|c| c.0).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!("mixture weights sum to {total}, not 1")));
    }
    components
        .iter()
        .map(|&(w, p)| nb_pmf(k, r, p).map(|v| w * v))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GofBin {
    pub label: String,
    pub observed: u64,
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GofResult {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
    pub alpha: f64,
    pub bins: Vec<GofBin>,
}

impl GofResult {
    pub fn passed(&self) -> bool {
        self.p_value > self.alpha
    }
}

/// Counts per integer value: `out[k]` is the number of samples equal to `k`.
pub fn histogram<I: IntoIterator<Item = u64>>(values: I) -> Vec<u64> {
    let mut out = Vec::new();
    for v in values {
        let v = v as usize;
        if out.len() <= v {
            out.resize(v + 1, 0);
        }
        out[v] += 1;
    }
    out
}

struct RawBin {
    lo: u64,
    hi: Option<u64>,
    observed: u64,
    expected: f64,
}

fn bin_label(lo: u64, hi: Option<u64>) -> String {
    match hi {
        Some(h) if h == lo => lo.to_string(),
        Some(h) => format!("{lo}-{h}"),
        None => format!("{lo}+"),
    }
}

/// Pearson chi-square of integer-valued samples against a pmf.
///
/// `observed[k]` counts the samples equal to `k`; the sum must equal
/// `n_samples`.
pub fn chi_square_gof<F>(observed: &[u64], pmf: F, n_samples: u64, alpha: f64) -> Result<GofResult>
where
    F: Fn(u64) -> Result<f64>,
{
    if n_samples == 0 {
        return Err(Error::InsufficientData("chi-square needs at least one sample".into()));
    }
    if observed.iter().sum::<u64>() != n_samples {
        return Err(Error::invalid("observed counts do not sum to the sample size"));
    }
    let n = n_samples as f64;
    let mut raw = Vec::with_capacity(observed.len() + 1);
    let mut cdf = 0.0;
    for (k, &o) in observed.iter().enumerate() {
        let p = pmf(k as u64)?;
        cdf += p;
        raw.push(RawBin { lo: k as u64, hi: Some(k as u64), observed: o, expected: n * p });
    }
    raw.push(RawBin {
        lo: observed.len() as u64,
        hi: None,
        observed: 0,
        expected: n * (1.0 - cdf).max(0.0),
    });

    let mut merged: Vec<RawBin> = Vec::new();
    let mut pending: Option<RawBin> = None;
    for b in raw {
        let acc = match pending.take() {
            None => b,
            Some(mut acc) => {
                acc.hi = b.hi;
                acc.observed += b.observed;
                acc.expected += b.expected;
                acc
            }
        };
        if acc.expected >= MIN_EXPECTED {
            merged.push(acc);
        } else {
            pending = Some(acc);
        }
    }
    if let Some(rest) = pending {
        match merged.last_mut() {
            Some(last) => {
                last.hi = rest.hi;
                last.observed += rest.observed;
                last.expected += rest.expected;
            }
            None => merged.push(rest),
        }
    }
    if merged.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "chi-square needs at least 2 bins after merging, got {}",
            merged.len()
        )));
    }
    let statistic: f64 = merged
        .iter()
        .map(|b| (b.observed as f64 - b.expected).powi(2) / b.expected)
        .sum();
    let dof = merged.len() - 1;
    Ok(GofResult {
        statistic,
        degrees_of_freedom: dof,
        p_value: chi_square_sf(statistic, dof),
        alpha,
        bins: merged
            .into_iter()
            .map(|b| GofBin { label: bin_label(b.lo, b.hi), observed: b.observed, expected: b.expected })
            .collect(),
    })
}

/// Monte-Carlo check of a Laplace functional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaplaceCheck {
    pub mean: f64,
    pub std_error: f64,
    pub analytic: f64,
    /// Zero when every sample equals the analytic value exactly.
    pub z: f64,
}

/// Compare the sample mean of `exp(-X(f))` over `n_samples` draws with `analytic`.
pub fn mc_laplace_check<S>(
    mut sampler: S,
    f: &StepFunction,
    analytic: f64,
    n_samples: u64,
) -> Result<LaplaceCheck>
where
    S: FnMut() -> Result<MultisetPointProcess>,
{
    if !(analytic > 0.0 && analytic <= 1.0) {
        return Err(Error::invalid(format!("analytic value {analytic} outside (0, 1]")));
    }
    if n_samples < 2 {
        return Err(Error::InsufficientData("Laplace check needs at least 2 samples".into()));
    }
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..n_samples {
        let v = (-sampler()?.integral_against(f)).exp();
        sum += v;
        sum_sq += v * v;
    }
    let n = n_samples as f64;
    let mean = sum / n;
    let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    let std_error = (var / n).sqrt();
    let z = if std_error == 0.0 {
        if (mean - analytic).abs() > 1e-12 {
            return Err(Error::InsufficientData(format!(
                "zero-variance sample with mean {mean} differs from analytic {analytic}"
            )));
        }
        0.0
    } else {
        (mean - analytic) / std_error
    };
    Ok(LaplaceCheck { mean, std_error, analytic, z })
}

/// Sums of independent NB(r_i, p) fitted against NB(sum r_i, p).
pub fn test_sum_property(
    r_list: &[f64],
    p: f64,
    n_samples: u64,
    rng: &mut RngState,
) -> Result<GofResult> {
    if r_list.is_empty() {
        return Err(Error::invalid("r_list must not be empty"));
    }
    for &r in r_list {
        check_nb_params(r, p)?;
    }
    let mut samples = Vec::with_capacity(n_samples as usize);
    for _ in 0..n_samples {
        let mut s = 0u64;
        for &r in r_list {
            s += rng.negbin_oracle(r, p)?;
        }
        samples.push(s);
    }
    let r_sum: f64 = r_list.iter().sum();
    chi_square_gof(&histogram(samples), |k| nb_pmf(k, r_sum, p), n_samples, ALPHA)
}

/// Successes before `r` failures of i.i.d. `p`-coins fitted against NB(r, p).
pub fn test_successes_before_failures(
    r: u64,
    p: f64,
    n_samples: u64,
    rng: &mut RngState,
) -> Result<GofResult> {
    if r == 0 {
        return Err(Error::invalid("r must be a positive integer"));
    }
    check_nb_params(r as f64, p)?;
    let mut coins = IidCoins::new(p, rng.derive("coins"))?;
    let samples = (0..n_samples)
        .map(|_| urn_count_single_atom(&mut coins, r, DEFAULT_MAX_COINS))
        .collect::<Result<Vec<_>>>()?;
    chi_square_gof(&histogram(samples), |k| nb_pmf(k, r as f64, p), n_samples, ALPHA)
}

/// Largest gap between the empirical CDFs of the rows under a labelling.
fn max_cdf_gap(order: &[(f64, usize, usize)], labels: &[Vec<usize>], k: usize, per_row: usize) -> f64 {
    let mut counts = vec![0usize; k];
    let mut best = 0usize;
    let mut i = 0;
    while i < order.len() {
        let v = order[i].0;
        while i < order.len() && order[i].0 == v {
            let (_, rep, row) = order[i];
            counts[labels[rep][row]] += 1;
            i += 1;
        }
        let hi = *counts.iter().max().unwrap();
        let lo = *counts.iter().min().unwrap();
        best = best.max(hi - lo);
    }
    best as f64 / per_row as f64
}

/// Permutation test for equality in law of row statistics under index swaps.
///
/// `rows[i][j]` is the statistic of row `i` in replicate `j`. Each
/// permutation shuffles the row labels within every replicate; the statistic
/// is the largest Kolmogorov distance between rows. Returns the p-value
/// `(1 + #{T_perm >= T_obs}) / (1 + n_permutations)`.
pub fn test_exchangeability(rows: &[Vec<f64>], n_permutations: u64, rng: &mut RngState) -> Result<f64> {
    if rows.len() < 2 {
        return Err(Error::InsufficientData("exchangeability needs at least 2 rows".into()));
    }
    let reps = rows[0].len();
    if reps < 2 || rows.iter().any(|r| r.len() != reps) {
        return Err(Error::InsufficientData(
            "exchangeability needs at least 2 replicates per row, equal across rows".into(),
        ));
    }
    if rows.iter().flatten().any(|v| v.is_nan()) {
        return Err(Error::invalid("row statistics must not be NaN"));
    }
    if n_permutations == 0 {
        return Err(Error::invalid("n_permutations must be positive"));
    }
    let k = rows.len();
    let mut order: Vec<(f64, usize, usize)> = rows
        .iter()
        .enumerate()
        .flat_map(|(row, vals)| vals.iter().enumerate().map(move |(rep, &v)| (v, rep, row)))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0));

    let identity: Vec<usize> = (0..k).collect();
    let mut labels = vec![identity.clone(); reps];
    let observed = max_cdf_gap(&order, &labels, k, reps);
    let mut at_least = 0u64;
    for _ in 0..n_permutations {
        for lab in labels.iter_mut() {
            lab.copy_from_slice(&identity);
            for i in (1..k).rev() {
                let j = ((rng.uniform01() * (i + 1) as f64) as usize).min(i);
                lab.swap(i, j);
            }
        }
        if max_cdf_gap(&order, &labels, k, reps) >= observed - 1e-12 {
            at_least += 1;
        }
    }
    Ok((1 + at_least) as f64 / (1 + n_permutations) as f64)
}
