//! Base measures, point-process realizations and step test functions on [0, 1].
//!
//! A base measure is a finite list of fixed atoms with masses in (0, 1) plus a
//! diffuse part `gamma * Uniform[0, 1]`. Processes are stored sorted by
//! location; multiset entries with multiplicity zero are never stored.

use std::cmp::Ordering;

use crate::error::{Error, Result};

/// A point of [0, 1]. Identity is exact numeric equality.
#[derive(Debug, Clone, Copy)]
pub struct Location(f64);

impl Location {
    pub fn new(value: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::invalid(format!("location {value} outside [0, 1]")));
        }
        // fold -0.0 into 0.0 so that equality and ordering agree
        Ok(Location(value + 0.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl PartialEq for Location {
    fn eq(&self, other: &Self) -> bool {
        self.0.to_bits() == other.0.to_bits()
    }
}

impl Eq for Location {}

impl PartialOrd for Location {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Location {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Deterministic base measure: fixed atoms plus `diffuse_mass * Uniform[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseMeasureSpec {
    fixed_atoms: Vec<(Location, f64)>,
    diffuse_mass: f64,
}

impl BaseMeasureSpec {
    /// Atom masses must lie strictly inside (0, 1) and locations must be distinct.
    pub fn new(atoms: Vec<(Location, f64)>, diffuse_mass: f64) -> Result<Self> {
        if !(diffuse_mass >= 0.0 && diffuse_mass.is_finite()) {
            return Err(Error::invalid(format!(
                "diffuse mass {diffuse_mass} must be finite and >= 0"
            )));
        }
        let mut atoms = atoms;
        for &(loc, mass) in &atoms {
            if !(mass > 0.0 && mass < 1.0) {
                return Err(Error::invalid(format!(
                    "atom mass {mass} at {} must lie in (0, 1)",
                    loc.value()
                )));
            }
        }
        atoms.sort_by_key(|a| a.0);
        if atoms.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::invalid("base measure atom locations must be distinct"));
        }
        Ok(BaseMeasureSpec { fixed_atoms: atoms, diffuse_mass })
    }

    /// Convenience constructor from raw `(location, mass)` pairs.
    pub fn from_pairs(atoms: &[(f64, f64)], diffuse_mass: f64) -> Result<Self> {
        let atoms = atoms
            .iter()
            .map(|&(l, m)| Location::new(l).map(|l| (l, m)))
            .collect::<Result<Vec<_>>>()?;
        BaseMeasureSpec::new(atoms, diffuse_mass)
    }

    pub fn diffuse_only(diffuse_mass: f64) -> Result<Self> {
        BaseMeasureSpec::new(Vec::new(), diffuse_mass)
    }

    /// Fixed atoms sorted by location.
    pub fn fixed_atoms(&self) -> &[(Location, f64)] {
        &self.fixed_atoms
    }

    pub fn diffuse_mass(&self) -> f64 {
        self.diffuse_mass
    }

    pub fn total_mass(&self) -> f64 {
        self.fixed_atoms.iter().map(|a| a.1).sum::<f64>() + self.diffuse_mass
    }
}

/// A finite set of distinct locations (a Bernoulli process realization).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SimplePointProcess {
    atoms: Vec<Location>,
}

impl SimplePointProcess {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Sorts the atoms; a repeated location is a collision.
    pub fn from_atoms(mut atoms: Vec<Location>) -> Result<Self> {
        atoms.sort();
        if let Some(w) = atoms.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::LocationCollision(w[0].value()));
        }
        Ok(SimplePointProcess { atoms })
    }

    pub fn from_values(values: &[f64]) -> Result<Self> {
        let atoms = values.iter().map(|&v| Location::new(v)).collect::<Result<Vec<_>>>()?;
        Self::from_atoms(atoms)
    }

    pub fn atoms(&self) -> &[Location] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn contains(&self, loc: Location) -> bool {
        self.atoms.binary_search(&loc).is_ok()
    }

    /// Same atoms, each with multiplicity one.
    pub fn to_multiset(&self) -> MultisetPointProcess {
        MultisetPointProcess {
            entries: self.atoms.iter().map(|&l| (l, 1)).collect(),
        }
    }
}

/// A finite multiset of locations (a negative binomial process realization).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MultisetPointProcess {
    entries: Vec<(Location, u64)>,
}

impl MultisetPointProcess {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Drops zero multiplicities; repeated locations are a collision.
    pub fn from_entries(entries: Vec<(Location, u64)>) -> Result<Self> {
        let mut entries: Vec<_> = entries.into_iter().filter(|e| e.1 > 0).collect();
        entries.sort_by_key(|a| a.0);
        if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::LocationCollision(w[0].0.value()));
        }
        Ok(MultisetPointProcess { entries })
    }

    pub fn from_pairs(pairs: &[(f64, u64)]) -> Result<Self> {
        let entries = pairs
            .iter()
            .map(|&(l, m)| Location::new(l).map(|l| (l, m)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_entries(entries)
    }

    pub fn entries(&self) -> &[(Location, u64)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Multiplicity at `loc` (zero if absent).
    pub fn multiplicity(&self, loc: Location) -> u64 {
        self.entries
            .binary_search_by(|e| e.0.cmp(&loc))
            .map(|i| self.entries[i].1)
            .unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.entries.iter().map(|e| e.1).sum()
    }

    /// Total multiplicity of atoms in the closed interval `[a, b]`.
    pub fn eval_measure(&self, a: f64, b: f64) -> Result<u64> {
        if !(a <= b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::invalid(format!("malformed interval [{a}, {b}]")));
        }
        Ok(self
            .entries
            .iter()
            .filter(|e| e.0.value() >= a && e.0.value() <= b)
            .map(|e| e.1)
            .sum())
    }

    /// `X(f) = sum of multiplicity * f(location)`.
    pub fn integral_against(&self, f: &StepFunction) -> f64 {
        self.entries.iter().map(|&(l, m)| m as f64 * f.eval(l.value())).sum()
    }
}

/// Non-negative step function on [0, 1].
///
/// Piece `i` covers `[breakpoints[i], breakpoints[i + 1])`; the last piece is
/// closed at 1.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl StepFunction {
    /// `breakpoints` must start at 0, end at 1 and increase strictly, with one
    /// value per piece.
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.len() < 2 || values.len() + 1 != breakpoints.len() {
            return Err(Error::invalid("step function needs k + 1 breakpoints for k values"));
        }
        if breakpoints[0] != 0.0 || *breakpoints.last().unwrap() != 1.0 {
            return Err(Error::invalid("step function breakpoints must span [0, 1]"));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::invalid("step function breakpoints must increase"));
        }
        if values.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(Error::invalid("step function values must be finite and >= 0"));
        }
        Ok(StepFunction { breakpoints, values })
    }

    pub fn constant(value: f64) -> Result<Self> {
        StepFunction::new(vec![0.0, 1.0], vec![value])
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = self.values.len();
        // index of the last breakpoint <= x, capped to the last piece
        let i = self.breakpoints.partition_point(|&b| b <= x).saturating_sub(1);
        self.values[i.min(k - 1)]
    }

    /// Iterator over `(width, value)` of each piece.
    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.breakpoints
            .windows(2)
            .zip(&self.values)
            .map(|(w, &v)| (w[1] - w[0], v))
    }
}

/// Sorted distinct union of the supports.
pub fn support_union<'a, I>(processes: I) -> SimplePointProcess
where
    I: IntoIterator<Item = &'a SimplePointProcess>,
{
    let mut atoms: Vec<Location> = processes
        .into_iter()
        .flat_map(|p| p.atoms.iter().copied())
        .collect();
    atoms.sort();
    atoms.dedup();
    SimplePointProcess { atoms }
}

/// `int (1 - e^{-f}) d(Uniform[0, 1])`
fn diffuse_exponent(f: &StepFunction) -> f64 {
    f.pieces().map(|(w, v)| w * -(-v).exp_m1()).sum()
}

/// Laplace functional `E[exp(-X(f))]` of a negative binomial process with
/// parameter `r` and base measure `base`.
pub fn analytic_laplace_nbp(base: &BaseMeasureSpec, r: f64, f: &StepFunction) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::invalid(format!("r = {r} must be positive")));
    }
    let ordinary = -r * base.diffuse_mass() * diffuse_exponent(f);
    let fixed: f64 = base
        .fixed_atoms()
        .iter()
        .map(|&(l, b)| {
            let e = (-f.eval(l.value())).exp();
            r * ((1.0 - b).ln() - (1.0 - b * e).ln())
        })
        .sum();
    Ok((ordinary + fixed).exp())
}

/// Laplace functional `E[exp(-Y(f))]` of a Bernoulli process with base measure `base`.
pub fn analytic_laplace_bep(base: &BaseMeasureSpec, f: &StepFunction) -> f64 {
    let ordinary = -base.diffuse_mass() * diffuse_exponent(f);
    let fixed: f64 = base
        .fixed_atoms()
        .iter()
        .map(|&(l, b)| (1.0 - b * -(-f.eval(l.value())).exp_m1()).ln())
        .sum();
    (ordinary + fixed).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn fixture() -> MultisetPointProcess {
        MultisetPointProcess::from_pairs(&[(0.25, 2), (0.75, 1)]).unwrap()
    }

    #[test]
    fn eval_measure_examples() {
        let x = fixture();
        assert_eq!(x.eval_measure(0.0, 0.5).unwrap(), 2);
        assert_eq!(x.eval_measure(0.3, 0.3).unwrap(), 0);
        assert_eq!(x.eval_measure(0.0, 1.0).unwrap(), 3);
        assert_eq!(x.eval_measure(0.25, 0.25).unwrap(), 2);
        assert!(x.eval_measure(0.6, 0.4).is_err());
        assert!(x.eval_measure(f64::NAN, 0.4).is_err());
    }

    #[test]
    fn integral_examples() {
        let x = fixture();
        let ind = StepFunction::new(vec![0.0, 0.5, 1.0], vec![1.0, 0.0]).unwrap();
        assert_eq!(x.integral_against(&ind), 2.0);
        assert_eq!(x.integral_against(&StepFunction::constant(0.0).unwrap()), 0.0);
        let v = x.integral_against(&StepFunction::constant(LN_2).unwrap());
        assert!((v - 3.0 * LN_2).abs() < 1e-12);
        assert!((v - 2.0794).abs() < 1e-4);
    }

    #[test]
    fn step_function_eval_and_validation() {
        let f = StepFunction::new(vec![0.0, 0.5, 1.0], vec![1.0, 2.0]).unwrap();
        assert_eq!(f.eval(0.0), 1.0);
        assert_eq!(f.eval(0.4999), 1.0);
        assert_eq!(f.eval(0.5), 2.0);
        assert_eq!(f.eval(1.0), 2.0);
        assert!(StepFunction::new(vec![0.0, 1.0], vec![-1.0]).is_err());
        assert!(StepFunction::new(vec![0.0, 0.6, 0.5, 1.0], vec![1.0, 1.0, 1.0]).is_err());
        assert!(StepFunction::new(vec![0.1, 1.0], vec![1.0]).is_err());
    }

    #[test]
    fn support_union_examples() {
        let a = SimplePointProcess::from_values(&[0.1, 0.5]).unwrap();
        let b = SimplePointProcess::from_values(&[0.5, 0.9]).unwrap();
        let u = support_union([&a, &b]);
        assert_eq!(u, SimplePointProcess::from_values(&[0.1, 0.5, 0.9]).unwrap());
        assert!(support_union(std::iter::empty()).is_empty());
        let e = SimplePointProcess::empty();
        let c = SimplePointProcess::from_values(&[0.2]).unwrap();
        assert_eq!(support_union([&e, &c]), c);
    }

    #[test]
    fn base_measure_validation() {
        assert!(BaseMeasureSpec::from_pairs(&[(0.5, 1.0)], 0.0).is_err());
        assert!(BaseMeasureSpec::from_pairs(&[(0.5, 0.0)], 0.0).is_err());
        assert!(BaseMeasureSpec::from_pairs(&[(0.5, 0.2), (0.5, 0.3)], 0.0).is_err());
        assert!(BaseMeasureSpec::from_pairs(&[], -1.0).is_err());
        assert!(BaseMeasureSpec::from_pairs(&[], f64::INFINITY).is_err());
        assert!(BaseMeasureSpec::from_pairs(&[(1.5, 0.2)], 0.0).is_err());
        let b = BaseMeasureSpec::from_pairs(&[(0.7, 0.6), (0.3, 0.2)], 1.5).unwrap();
        assert_eq!(b.fixed_atoms()[0].0.value(), 0.3);
        assert!((b.total_mass() - 2.3).abs() < 1e-12);
    }

    #[test]
    fn duplicate_atoms_collide() {
        assert!(matches!(
            SimplePointProcess::from_values(&[0.2, 0.2]),
            Err(Error::LocationCollision(_))
        ));
        let m = MultisetPointProcess::from_pairs(&[(0.2, 0), (0.4, 3)]).unwrap();
        assert_eq!(m.entries().len(), 1);
        assert_eq!(m.multiplicity(Location::new(0.2).unwrap()), 0);
        assert_eq!(m.multiplicity(Location::new(0.4).unwrap()), 3);
    }

    #[test]
    fn laplace_nbp_examples() {
        let zero = StepFunction::constant(0.0).unwrap();
        let ln2 = StepFunction::constant(LN_2).unwrap();
        let mixed = BaseMeasureSpec::from_pairs(&[(0.5, 0.5)], 1.0).unwrap();
        assert_eq!(analytic_laplace_nbp(&mixed, 2.0, &zero).unwrap(), 1.0);

        let atom = BaseMeasureSpec::from_pairs(&[(0.5, 0.5)], 0.0).unwrap();
        let v = analytic_laplace_nbp(&atom, 1.0, &ln2).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-14);

        let diffuse = BaseMeasureSpec::diffuse_only(1.0).unwrap();
        let v = analytic_laplace_nbp(&diffuse, 2.0, &ln2).unwrap();
        assert!((v - (-1.0f64).exp()).abs() < 1e-14);

        let v = analytic_laplace_nbp(&mixed, 2.0, &ln2).unwrap();
        assert!((v - 0.163_501_973_853_974_37).abs() < 1e-12);
        assert!(analytic_laplace_nbp(&mixed, 0.0, &ln2).is_err());
    }

    #[test]
    fn laplace_bep_examples() {
        let zero = StepFunction::constant(0.0).unwrap();
        let ln2 = StepFunction::constant(LN_2).unwrap();
        let atom = BaseMeasureSpec::from_pairs(&[(0.5, 0.5)], 0.0).unwrap();
        assert_eq!(analytic_laplace_bep(&atom, &zero), 1.0);
        assert!((analytic_laplace_bep(&atom, &ln2) - 0.75).abs() < 1e-14);
        let diffuse = BaseMeasureSpec::diffuse_only(1.0).unwrap();
        assert!((analytic_laplace_bep(&diffuse, &ln2) - (-0.5f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn laplace_piecewise_diffuse() {
        // f = ln 2 on [0, 0.5), 0 elsewhere: ordinary exponent = r * gamma * 0.5 * 0.5
        let f = StepFunction::new(vec![0.0, 0.5, 1.0], vec![LN_2, 0.0]).unwrap();
        let diffuse = BaseMeasureSpec::diffuse_only(2.0).unwrap();
        let v = analytic_laplace_nbp(&diffuse, 3.0, &f).unwrap();
        assert!((v - (-1.5f64).exp()).abs() < 1e-14);
    }
}
