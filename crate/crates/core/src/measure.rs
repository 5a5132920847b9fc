//! Finite atomic measures on the line.

use crate::error::{GfError, Result};
use crate::markov::MarkovSystem;
use crate::word::Word;

/// Absolute tolerance below which two atoms are considered equal; merged
/// mass is assigned to the smaller atom.
pub const ATOM_MERGE_TOL: f64 = 1e-14;

/// A finite atomic measure: strictly increasing atoms with positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    atoms: Vec<f64>,
    weights: Vec<f64>,
    total_mass: f64,
}

impl DiscreteMeasure {
    /// Builds from unsorted pairs, merging atoms closer than
    /// [`ATOM_MERGE_TOL`] toward the smaller atom.
    pub fn from_pairs(mut pairs: Vec<(f64, f64)>) -> Result<Self> {
        if pairs.iter().any(|&(x, w)| !x.is_finite() || !(w > 0.0)) {
            return Err(GfError::Domain(
                "atoms must be finite and weights strictly positive".into(),
            ));
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut atoms: Vec<f64> = Vec::with_capacity(pairs.len());
        let mut weights: Vec<f64> = Vec::with_capacity(pairs.len());
        for (x, w) in pairs {
            match atoms.last() {
                Some(&last) if x - last <= ATOM_MERGE_TOL => {
                    *weights.last_mut().unwrap() += w;
                }
                _ => {
                    atoms.push(x);
                    weights.push(w);
                }
            }
        }
        let total_mass = weights.iter().sum();
        Ok(DiscreteMeasure { atoms, weights, total_mass })
    }

    pub fn dirac(x: f64) -> Self {
        DiscreteMeasure { atoms: vec![x], weights: vec![1.0], total_mass: 1.0 }
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.atoms.iter().copied().zip(self.weights.iter().copied())
    }

    /// Smallest gap between consecutive atoms (infinite for < 2 atoms).
    pub fn min_gap(&self) -> f64 {
        self.atoms
            .windows(2)
            .map(|p| p[1] - p[0])
            .fold(f64::INFINITY, f64::min)
    }

    pub fn normalized(&self) -> Self {
        let m = self.total_mass;
        DiscreteMeasure {
            atoms: self.atoms.clone(),
            weights: self.weights.iter().map(|w| w / m).collect(),
            total_mass: 1.0,
        }
    }

    /// Restriction to the closed interval `[lo, hi]`.
    pub fn restrict(&self, lo: f64, hi: f64) -> Self {
        let pairs: Vec<(f64, f64)> = self
            .iter()
            .filter(|&(x, _)| x >= lo && x <= hi)
            .collect();
        let total_mass = pairs.iter().map(|&(_, w)| w).sum();
        DiscreteMeasure {
            atoms: pairs.iter().map(|&(x, _)| x).collect(),
            weights: pairs.iter().map(|&(_, w)| w).collect(),
            total_mass,
        }
    }

    /// Pushforward under `x -> c x` (order-preserving for c > 0).
    pub fn scale(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(GfError::Domain("scale factor must be > 0".into()));
        }
        Ok(DiscreteMeasure {
            atoms: self.atoms.iter().map(|x| c * x).collect(),
            weights: self.weights.clone(),
            total_mass: self.total_mass,
        })
    }

    /// Mass of the interval of diameter `rho` centered at `a`.
    pub fn ball_mass(&self, a: f64, rho: f64) -> f64 {
        let (lo, hi) = (a - 0.5 * rho, a + 0.5 * rho);
        let i = self.atoms.partition_point(|&x| x < lo);
        let j = self.atoms.partition_point(|&x| x <= hi);
        self.weights[i..j].iter().sum()
    }
}

/// A depth-`n` cylinder approximation of a measure: one atom per word, at
/// the cylinder midpoint, tagged with the generating words so exact cylinder
/// data stays reachable.
#[derive(Debug, Clone)]
pub struct CylinderMeasure {
    pub system: MarkovSystem,
    pub depth: usize,
    pub words: Vec<Word>,
    pub atoms: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CylinderMeasure {
    pub fn new(
        system: MarkovSystem,
        depth: usize,
        words: Vec<Word>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        if words.len() != weights.len() {
            return Err(GfError::Structure(
                "words and weights must have equal length".into(),
            ));
        }
        let atoms = words
            .iter()
            .map(|w| system.cylinder_midpoint(w))
            .collect::<Result<Vec<_>>>()?;
        Ok(CylinderMeasure { system, depth, words, atoms, weights })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn to_discrete(&self) -> Result<DiscreteMeasure> {
        DiscreteMeasure::from_pairs(
            self.atoms
                .iter()
                .copied()
                .zip(self.weights.iter().copied())
                .collect(),
        )
    }

    /// Smallest exact cylinder length — the resolution of the midpoint
    /// discretization, which bounds the usable frequency range.
    pub fn min_cylinder_length(&self) -> Result<f64> {
        let mut m = f64::INFINITY;
        for w in &self.words {
            m = m.min(self.system.log_cylinder_length(w)?.exp());
        }
        Ok(m)
    }
}
