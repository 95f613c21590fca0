//! Negative binomial constructions driven only by Bernoulli coins.
//!
//! - [`urn_count_single_atom`]: successes before the `r`-th failure.
//! - [`nb_urn_row`]: the urn scheme for integer `r` over an array source.
//! - [`nb_factory`]: rejection sampler turning `p`-coins into NB(r, p) for any
//!   `r > 0` with proposal NB(ceil(r), p) and acceptance
//!   `(r)_W / (ceil(r))_W`.
//! - [`nb_row_fractional`]: the urn scheme with per-atom factories.
//!
//! A row `n` restricts its support to the union of `Y_{n,1..ceil(r)}`; atom
//! `s` of that support reads the coin sequence `Y_{n,1}{s}, Y_{n,2}{s}, ...`.

use crate::error::{Error, Result};
use crate::measures::{support_union, Location, MultisetPointProcess, SimplePointProcess};
use crate::rng::RngState;
use crate::sources::BernoulliArraySource;
use crate::special::ln_gamma;

pub const DEFAULT_MAX_COINS: u64 = 1_000_000;
pub const DEFAULT_MAX_PROPOSALS: u64 = 10_000;

/// Below this many factors the rising factorial is summed term by term.
const RISING_DIRECT_MAX: u64 = 64;

/// A lazily read sequence of 0/1 coins.
pub trait CoinSource {
    fn next_coin(&mut self) -> Result<bool>;
}

/// Coins of one atom along one row of an array source:
/// coin `m` is whether `location` is an atom of `Y_{row, m}`.
pub struct CoinStream<'a> {
    array: &'a mut BernoulliArraySource,
    row: u64,
    location: Location,
    cursor: u64,
}

impl<'a> CoinStream<'a> {
    pub fn new(array: &'a mut BernoulliArraySource, row: u64, location: Location) -> Self {
        CoinStream { array, row, location, cursor: 1 }
    }

    /// Index of the next coin to be read.
    pub fn cursor(&self) -> u64 {
        self.cursor
    }
}

impl CoinSource for CoinStream<'_> {
    fn next_coin(&mut self) -> Result<bool> {
        let coin = self.array.get(self.row, self.cursor)?.contains(self.location);
        self.cursor += 1;
        Ok(coin)
    }
}

/// i.i.d. `p`-coins from a random stream.
pub struct IidCoins {
    p: f64,
    rng: RngState,
    consumed: u64,
}

impl IidCoins {
    pub fn new(p: f64, rng: RngState) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid(format!("coin bias {p} outside [0, 1]")));
        }
        Ok(IidCoins { p, rng, consumed: 0 })
    }

    pub fn consumed(&self) -> u64 {
        self.consumed
    }
}

impl CoinSource for IidCoins {
    fn next_coin(&mut self) -> Result<bool> {
        self.consumed += 1;
        self.rng.bernoulli(self.p)
    }
}

/// A fixed coin string; reading past its end yields failures.
pub struct ScriptedCoins<'a> {
    coins: &'a [bool],
    cursor: usize,
}

impl<'a> ScriptedCoins<'a> {
    pub fn new(coins: &'a [bool]) -> Self {
        ScriptedCoins { coins, cursor: 0 }
    }

    pub fn consumed(&self) -> usize {
        self.cursor
    }
}

impl CoinSource for ScriptedCoins<'_> {
    fn next_coin(&mut self) -> Result<bool> {
        let c = self.coins.get(self.cursor).copied().unwrap_or(false);
        self.cursor += 1;
        Ok(c)
    }
}

/// Number of successes before the `r`-th failure.
///
/// Consumes exactly `output + r` coins, or fails with
/// [`Error::CoinBudgetExceeded`] once `budget` coins are read without
/// reaching `r` failures.
pub fn urn_count_single_atom<C: CoinSource + ?Sized>(coins: &mut C, r: u64, budget: u64) -> Result<u64> {
    if r == 0 {
        return Err(Error::invalid("urn parameter r must be a positive integer"));
    }
    let mut successes = 0u64;
    let mut failures = 0u64;
    let mut read = 0u64;
    while failures < r {
        if read == budget {
            return Err(Error::CoinBudgetExceeded { budget, row: None, location: None });
        }
        read += 1;
        if coins.next_coin()? {
            successes += 1;
        } else {
            failures += 1;
        }
    }
    Ok(successes)
}

/// `ln((a)_k) = ln Gamma(a + k) - ln Gamma(a)`.
pub fn rising_factorial_log(a: f64, k: u64) -> f64 {
    if k <= RISING_DIRECT_MAX {
        (0..k).map(|i| (a + i as f64).ln()).sum()
    } else {
        ln_gamma(a + k as f64) - ln_gamma(a)
    }
}

/// Factory acceptance probability `(r)_W / (ceil(r))_W`.
pub fn acceptance_prob(w: u64, r: f64) -> f64 {
    (rising_factorial_log(r, w) - rising_factorial_log(r.ceil(), w)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactoryConfig {
    pub r: f64,
    pub max_coins: u64,
    pub max_proposals: u64,
}

impl FactoryConfig {
    pub fn new(r: f64) -> Result<Self> {
        FactoryConfig { r, max_coins: DEFAULT_MAX_COINS, max_proposals: DEFAULT_MAX_PROPOSALS }
            .validated()
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.r > 0.0 && self.r.is_finite()) {
            return Err(Error::invalid(format!("r = {} must be positive and finite", self.r)));
        }
        if self.max_coins == 0 || self.max_proposals == 0 {
            return Err(Error::invalid("factory budgets must be positive"));
        }
        Ok(self)
    }

    /// `ceil(r)` as an integer urn parameter.
    pub fn ceil_r(&self) -> u64 {
        self.r.ceil() as u64
    }

    pub fn is_integer(&self) -> bool {
        self.r.fract() == 0.0
    }
}

/// One factory output with its cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactoryDraw {
    pub value: u64,
    pub proposals: u64,
    pub coins: u64,
}

/// Negative binomial factory: NB(r, p) from `p`-coins with `p` unknown.
///
/// Proposals are urn counts with parameter `ceil(r)` read from consecutive
/// coins; the uniforms `G_k` come from `uniforms`, never from the coins.
pub fn nb_factory<C: CoinSource + ?Sized>(
    coins: &mut C,
    cfg: &FactoryConfig,
    uniforms: &mut RngState,
) -> Result<FactoryDraw> {
    let ceil_r = cfg.ceil_r();
    let mut used = 0u64;
    for proposals in 1..=cfg.max_proposals {
        let w = urn_count_single_atom(coins, ceil_r, cfg.max_coins - used)?;
        used += w + ceil_r;
        let g = uniforms.uniform01();
        if g < acceptance_prob(w, cfg.r) {
            return Ok(FactoryDraw { value: w, proposals, coins: used });
        }
    }
    Err(Error::ProposalBudgetExceeded { budget: cfg.max_proposals, row: None, location: None })
}

/// Candidate atoms of row `n`: the union of supports of `Y_{n,1..=k}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportIndex {
    atoms: SimplePointProcess,
}

impl SupportIndex {
    pub fn for_row(array: &mut BernoulliArraySource, n: u64, k: u64) -> Result<Self> {
        let mut prefix = Vec::with_capacity(k as usize);
        for m in 1..=k {
            prefix.push(array.get(n, m)?.clone());
        }
        Ok(SupportIndex { atoms: support_union(&prefix) })
    }

    pub fn atoms(&self) -> &[Location] {
        self.atoms.atoms()
    }

    /// `kappa_n`
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn contains(&self, loc: Location) -> bool {
        self.atoms.contains(loc)
    }
}

/// Cost of building one row.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RowTrace {
    pub support: usize,
    pub coins: u64,
    pub proposals: u64,
}

/// Urn-scheme row for integer `r`.
pub fn nb_urn_row(
    array: &mut BernoulliArraySource,
    n: u64,
    r: u64,
    max_coins: u64,
) -> Result<MultisetPointProcess> {
    nb_urn_row_traced(array, n, r, max_coins).map(|(x, _)| x)
}

pub fn nb_urn_row_traced(
    array: &mut BernoulliArraySource,
    n: u64,
    r: u64,
    max_coins: u64,
) -> Result<(MultisetPointProcess, RowTrace)> {
    if r == 0 {
        return Err(Error::invalid("urn parameter r must be a positive integer"));
    }
    let support = SupportIndex::for_row(array, n, r)?;
    let mut trace = RowTrace { support: support.len(), ..RowTrace::default() };
    let mut entries = Vec::with_capacity(support.len());
    for &loc in support.atoms() {
        let mut coins = CoinStream::new(array, n, loc);
        let count = urn_count_single_atom(&mut coins, r, max_coins)
            .map_err(|e| e.with_atom(n, loc.value()))?;
        trace.coins += count + r;
        trace.proposals += 1;
        entries.push((loc, count));
    }
    Ok((MultisetPointProcess::from_entries(entries)?, trace))
}

/// Row for any `r > 0`: each support atom's multiplicity is a factory draw
/// on that atom's coin stream.
pub fn nb_row_fractional(
    array: &mut BernoulliArraySource,
    n: u64,
    cfg: &FactoryConfig,
    uniforms: &mut RngState,
) -> Result<MultisetPointProcess> {
    nb_row_fractional_traced(array, n, cfg, uniforms).map(|(x, _)| x)
}

pub fn nb_row_fractional_traced(
    array: &mut BernoulliArraySource,
    n: u64,
    cfg: &FactoryConfig,
    uniforms: &mut RngState,
) -> Result<(MultisetPointProcess, RowTrace)> {
    let cfg = cfg.validated()?;
    let support = SupportIndex::for_row(array, n, cfg.ceil_r())?;
    let mut trace = RowTrace { support: support.len(), ..RowTrace::default() };
    let mut entries = Vec::with_capacity(support.len());
    for &loc in support.atoms() {
        let mut coins = CoinStream::new(array, n, loc);
        let draw =
            nb_factory(&mut coins, &cfg, uniforms).map_err(|e| e.with_atom(n, loc.value()))?;
        trace.coins += draw.coins;
        trace.proposals += draw.proposals;
        entries.push((loc, draw.value));
    }
    Ok((MultisetPointProcess::from_entries(entries)?, trace))
}
