use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Finite-support offspring law of a Galton-Watson tree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OffspringDistribution {
    atoms: Vec<(usize, f64)>,
}

const SUM_TOLERANCE: f64 = 1e-12;
const PARSE_TOLERANCE: f64 = 1e-9;

impl OffspringDistribution {
    /// Atoms `(j, P(xi = j))`. Probabilities must lie in `[0, 1]`, sum to 1
    /// within 1e-12, and the `j` must be distinct.
    pub fn new(mut atoms: Vec<(usize, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(invalid("offspring law needs at least one atom"));
        }
        atoms.sort_by_key(|a| a.0);
        if atoms.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(invalid("offspring atoms must be distinct"));
        }
        if atoms.iter().any(|&(_, p)| !(0.0..=1.0).contains(&p)) {
            return Err(invalid("atom probabilities must lie in [0, 1]"));
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(invalid(format!("atom probabilities sum to {total}, not 1")));
        }
        Ok(Self { atoms })
    }

    pub fn point_mass(j: usize) -> Self {
        Self { atoms: vec![(j, 1.0)] }
    }

    /// Parses `"j:prob,j:prob,..."`. Probabilities summing within 1e-9 of 1
    /// are renormalized; anything further off is rejected.
    pub fn parse(text: &str) -> Result<Self> {
        let mut atoms = Vec::new();
        for (i, item) in text.split(',').enumerate() {
            let item = item.trim();
            let bad = |message: String| Error::Parse { line: 1, message };
            let (j, p) = item.split_once(':').ok_or_else(|| bad(format!("atom {} ({item:?}) is not j:prob", i + 1)))?;
            let j: usize = j.trim().parse().map_err(|_| bad(format!("bad offspring count {j:?}")))?;
            let p: f64 = p.trim().parse().map_err(|_| bad(format!("bad probability {p:?}")))?;
            if !p.is_finite() {
                return Err(bad(format!("bad probability {p}")));
            }
            atoms.push((j, p));
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if !((total - 1.0).abs() <= PARSE_TOLERANCE) {
            return Err(invalid(format!("atom probabilities sum to {total}, not 1")));
        }
        for a in &mut atoms {
            a.1 /= total;
        }
        Self::new(atoms)
    }

    pub fn atoms(&self) -> &[(usize, f64)] {
        &self.atoms
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|&(j, p)| j as f64 * p).sum()
    }

    pub fn max_offspring(&self) -> usize {
        self.atoms.last().map_or(0, |a| a.0)
    }

    /// `P(xi < m)`.
    pub fn prob_below(&self, m: usize) -> f64 {
        self.atoms.iter().filter(|a| a.0 < m).map(|a| a.1).sum()
    }

    /// Inverse-CDF draw from a uniform `u` in `[0, 1)`.
    pub fn sample_with(&self, u: f64) -> usize {
        let mut acc = 0.0;
        for &(j, p) in &self.atoms {
            acc += p;
            if u < acc {
                return j;
            }
        }
        // rounding left u above the accumulated total
        self.atoms.iter().rev().find(|a| a.1 > 0.0).map_or(0, |a| a.0)
    }
}

impl fmt::Display for OffspringDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (j, p)) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{j}:{p}")?;
        }
        Ok(())
    }
}
