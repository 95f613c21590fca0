//! Exchangeable sequences of Bernoulli processes and their array view.
//!
//! A [`BernoulliSequence`] is the only input the negative binomial
//! constructions see. The directing random measure is never held as data:
//! the IBP and one-parameter sources carry only counts of past occurrences.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::measures::{BaseMeasureSpec, Location, SimplePointProcess};
use crate::rng::RngState;

/// Lazy producer of an exchangeable sequence of simple point processes.
///
/// Outputs are generated strictly in order; output `n + 1` may depend on
/// outputs `1..=n`.
pub trait BernoulliSequence {
    fn next_process(&mut self) -> Result<SimplePointProcess>;
}

impl<S: BernoulliSequence + ?Sized> BernoulliSequence for Box<S> {
    fn next_process(&mut self) -> Result<SimplePointProcess> {
        (**self).next_process()
    }
}

/// Draw `count` fresh uniform locations, rejecting exact collisions with
/// `taken` or with each other.
fn fresh_locations(
    rng: &mut RngState,
    count: u64,
    mut taken: impl FnMut(Location) -> bool,
) -> Result<Vec<Location>> {
    let mut out = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let loc = Location::new(rng.uniform01())?;
        if taken(loc) || out.contains(&loc) {
            return Err(Error::LocationCollision(loc.value()));
        }
        out.push(loc);
    }
    Ok(out)
}

/// One Bernoulli process draw: every fixed atom independently with its mass,
/// plus `Poisson(diffuse_mass)` new atoms at uniform locations.
pub fn sample_bep(base: &BaseMeasureSpec, rng: &mut RngState) -> Result<SimplePointProcess> {
    let mut atoms = Vec::new();
    for &(loc, mass) in base.fixed_atoms() {
        if rng.bernoulli(mass)? {
            atoms.push(loc);
        }
    }
    let count = rng.poisson(base.diffuse_mass())?;
    let fixed = base.fixed_atoms();
    let fresh = fresh_locations(rng, count, |l| {
        fixed.binary_search_by(|a| a.0.cmp(&l)).is_ok()
    })?;
    atoms.extend(fresh);
    SimplePointProcess::from_atoms(atoms)
}

/// i.i.d. Bernoulli processes with a known base measure.
#[derive(Debug, Clone)]
pub struct IidBernoulli {
    base: BaseMeasureSpec,
    rng: RngState,
}

impl IidBernoulli {
    pub fn new(base: BaseMeasureSpec, rng: RngState) -> Self {
        IidBernoulli { base, rng }
    }

    pub fn base(&self) -> &BaseMeasureSpec {
        &self.base
    }
}

impl BernoulliSequence for IidBernoulli {
    fn next_process(&mut self) -> Result<SimplePointProcess> {
        sample_bep(&self.base, &mut self.rng)
    }
}

/// Indian buffet process with constant concentration `c` and a diffuse base
/// of total mass `gamma`.
///
/// Output `n + 1` takes each existing dish `s` with probability
/// `m_s / (c + n)` and `Poisson(c * gamma / (c + n))` new dishes.
#[derive(Debug, Clone)]
pub struct IndianBuffet {
    c: f64,
    gamma: f64,
    emitted: u64,
    dish_counts: BTreeMap<Location, u64>,
    rng: RngState,
}

impl IndianBuffet {
    pub fn new(c: f64, gamma: f64, rng: RngState) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::invalid(format!("concentration c = {c} must be positive")));
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::invalid(format!("mass gamma = {gamma} must be positive")));
        }
        Ok(IndianBuffet { c, gamma, emitted: 0, dish_counts: BTreeMap::new(), rng })
    }

    pub fn emitted(&self) -> u64 {
        self.emitted
    }

    pub fn dish_counts(&self) -> &BTreeMap<Location, u64> {
        &self.dish_counts
    }

    /// Rate of the Poisson number of new dishes in the next output.
    pub fn new_dish_rate(&self) -> f64 {
        self.c * self.gamma / (self.c + self.emitted as f64)
    }

    /// Inclusion probability of a dish seen `m` times so far.
    pub fn inclusion_probability(&self, m: u64) -> f64 {
        (m as f64 / (self.c + self.emitted as f64)).min(1.0)
    }
}

impl BernoulliSequence for IndianBuffet {
    fn next_process(&mut self) -> Result<SimplePointProcess> {
        let mut atoms = Vec::new();
        for (&dish, &m) in &self.dish_counts {
            if self.rng.bernoulli(self.inclusion_probability(m))? {
                atoms.push(dish);
            }
        }
        let count = self.rng.poisson(self.new_dish_rate())?;
        let counts = &self.dish_counts;
        let fresh = fresh_locations(&mut self.rng, count, |l| counts.contains_key(&l))?;
        atoms.extend(fresh);
        for &a in &atoms {
            *self.dish_counts.entry(a).or_insert(0) += 1;
        }
        self.emitted += 1;
        SimplePointProcess::from_atoms(atoms)
    }
}

/// One-parameter process over an inner sequence `Y`.
///
/// `W_1 = Y_1`; afterwards atom `s` enters `W_{n+1}` with probability
/// `(c * Y_{n+1}{s} + sum_{j <= n} W_j{s}) / (c + n)`.
pub struct OneParameter {
    c: f64,
    inner: Box<dyn BernoulliSequence + Send>,
    emitted: u64,
    w_counts: BTreeMap<Location, u64>,
    rng: RngState,
}

impl OneParameter {
    pub fn new(c: f64, inner: Box<dyn BernoulliSequence + Send>, rng: RngState) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::invalid(format!("concentration c = {c} must be positive")));
        }
        Ok(OneParameter { c, inner, emitted: 0, w_counts: BTreeMap::new(), rng })
    }

    pub fn emitted(&self) -> u64 {
        self.emitted
    }

    pub fn w_counts(&self) -> &BTreeMap<Location, u64> {
        &self.w_counts
    }

    /// Inclusion probability for an atom given its presence in the next inner
    /// output and its count among the emitted outputs.
    pub fn inclusion_probability(&self, in_inner: bool, count: u64) -> f64 {
        let y = if in_inner { self.c } else { 0.0 };
        ((y + count as f64) / (self.c + self.emitted as f64)).min(1.0)
    }
}

impl BernoulliSequence for OneParameter {
    fn next_process(&mut self) -> Result<SimplePointProcess> {
        let y = self.inner.next_process()?;
        let w = if self.emitted == 0 {
            y
        } else {
            let mut candidates: Vec<Location> =
                self.w_counts.keys().copied().chain(y.atoms().iter().copied()).collect();
            candidates.sort();
            candidates.dedup();
            let mut atoms = Vec::new();
            for s in candidates {
                let count = self.w_counts.get(&s).copied().unwrap_or(0);
                let p = self.inclusion_probability(y.contains(s), count);
                if self.rng.bernoulli(p)? {
                    atoms.push(s);
                }
            }
            SimplePointProcess::from_atoms(atoms)?
        };
        for &a in w.atoms() {
            *self.w_counts.entry(a).or_insert(0) += 1;
        }
        self.emitted += 1;
        Ok(w)
    }
}

/// Fixed script of processes, then empty processes forever. Test fixtures.
#[derive(Debug, Clone, Default)]
pub struct ReplaySequence {
    script: Vec<SimplePointProcess>,
    cursor: usize,
}

impl ReplaySequence {
    pub fn new(script: Vec<SimplePointProcess>) -> Self {
        ReplaySequence { script, cursor: 0 }
    }

    /// Script whose array view has the given processes at cells `(n, m)`.
    pub fn from_cells(cells: &[((u64, u64), SimplePointProcess)]) -> Result<Self> {
        let mut script = Vec::new();
        for ((n, m), p) in cells {
            let k = pairing_index(*n, *m)? as usize;
            if script.len() < k {
                script.resize(k, SimplePointProcess::empty());
            }
            script[k - 1] = p.clone();
        }
        Ok(ReplaySequence::new(script))
    }
}

impl BernoulliSequence for ReplaySequence {
    fn next_process(&mut self) -> Result<SimplePointProcess> {
        let p = self.script.get(self.cursor).cloned().unwrap_or_default();
        self.cursor += 1;
        Ok(p)
    }
}

/// Diagonal bijection N^2 -> N enumerating (1,1), (1,2), (2,1), (1,3), (2,2), ...
pub fn pairing_index(n: u64, m: u64) -> Result<u64> {
    if n == 0 || m == 0 {
        return Err(Error::invalid(format!("array cell ({n}, {m}) is not 1-based")));
    }
    let overflow = || Error::PairingOverflow { n, m };
    let d = (n as u128 + m as u128) - 1;
    let k = (d - 1).checked_mul(d).ok_or_else(overflow)? / 2 + n as u128;
    u64::try_from(k).map_err(|_| overflow())
}

/// Inverse of [`pairing_index`].
pub fn unpair_index(k: u64) -> Result<(u64, u64)> {
    if k == 0 {
        return Err(Error::invalid("global index is 1-based"));
    }
    let k = k as u128;
    // smallest d with d (d + 1) / 2 >= k
    let mut d = (((8.0 * k as f64 + 1.0).sqrt() - 1.0) / 2.0).ceil() as u128;
    while d * (d + 1) / 2 < k {
        d += 1;
    }
    while d > 1 && (d - 1) * d / 2 >= k {
        d -= 1;
    }
    let n = k - (d - 1) * d / 2;
    let m = d + 1 - n;
    Ok((n as u64, m as u64))
}

/// How array cells map onto positions of the underlying sequence.
///
/// Any injection gives an array with the same joint law, because the
/// sequence is exchangeable. The diagonal layout covers the whole of N^2;
/// the interleaved layout covers rows `1..=rows` only and reaches coin depth
/// `m` after `m * rows` outputs instead of roughly `m^2 / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArrayLayout {
    Diagonal,
    Interleaved { rows: u64 },
}

impl ArrayLayout {
    /// 1-based global index of cell `(n, m)`.
    pub fn index(self, n: u64, m: u64) -> Result<u64> {
        match self {
            ArrayLayout::Diagonal => pairing_index(n, m),
            ArrayLayout::Interleaved { rows } => {
                if n == 0 || m == 0 {
                    return Err(Error::invalid(format!("array cell ({n}, {m}) is not 1-based")));
                }
                if n > rows {
                    return Err(Error::RowNotRetained { row: n, limit: rows });
                }
                (m - 1)
                    .checked_mul(rows)
                    .and_then(|k| k.checked_add(n))
                    .ok_or(Error::PairingOverflow { n, m })
            }
        }
    }

    /// Cell `(n, m)` at 1-based global index `k`.
    pub fn cell(self, k: u64) -> Result<(u64, u64)> {
        match self {
            ArrayLayout::Diagonal => unpair_index(k),
            ArrayLayout::Interleaved { rows } => {
                if k == 0 {
                    return Err(Error::invalid("global index is 1-based"));
                }
                Ok(((k - 1) % rows + 1, (k - 1) / rows + 1))
            }
        }
    }
}

/// Two-dimensional view `Y_{n,m}` of one sequence.
///
/// Generation runs behind a single cursor: reading cell `(n, m)` draws every
/// earlier global index first.
pub struct BernoulliArraySource {
    sequence: Box<dyn BernoulliSequence + Send>,
    generated: u64,
    layout: ArrayLayout,
    rows: Vec<Vec<SimplePointProcess>>,
}

impl BernoulliArraySource {
    /// Unbounded array through [`pairing_index`].
    pub fn new(sequence: Box<dyn BernoulliSequence + Send>) -> Self {
        BernoulliArraySource { sequence, generated: 0, layout: ArrayLayout::Diagonal, rows: Vec::new() }
    }

    /// Array of rows `1..=limit` (at least one) in the interleaved layout.
    pub fn with_row_limit(sequence: Box<dyn BernoulliSequence + Send>, limit: u64) -> Self {
        let layout = ArrayLayout::Interleaved { rows: limit.max(1) };
        BernoulliArraySource { layout, ..Self::new(sequence) }
    }

    pub fn layout(&self) -> ArrayLayout {
        self.layout
    }

    /// Number of sequence outputs drawn so far.
    pub fn generated(&self) -> u64 {
        self.generated
    }

    fn advance(&mut self) -> Result<()> {
        let p = self.sequence.next_process()?;
        self.generated += 1;
        let (n, m) = self.layout.cell(self.generated)?;
        let row = n as usize - 1;
        if self.rows.len() <= row {
            self.rows.resize_with(row + 1, Vec::new);
        }
        debug_assert_eq!(self.rows[row].len() as u64 + 1, m);
        self.rows[row].push(p);
        Ok(())
    }

    pub fn get(&mut self, n: u64, m: u64) -> Result<&SimplePointProcess> {
        let k = self.layout.index(n, m)?;
        while self.generated < k {
            self.advance()?;
        }
        Ok(&self.rows[n as usize - 1][m as usize - 1])
    }
}
