use std::collections::HashSet;

use super::{FuzzyError, TriangularMF};

/// Which term wins when the input falls in a coverage gap and two term
/// peaks are equally near.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapTieBreak {
    /// Prefer the lower-index term.
    Lower,
    /// Prefer the higher-index term.
    Higher,
}

impl GapTieBreak {
    pub fn as_str(self) -> &'static str {
        match self {
            GapTieBreak::Lower => "lower",
            GapTieBreak::Higher => "higher",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub label: String,
    pub mf: TriangularMF,
}

/// A quantity partitioned into named fuzzy terms over a closed universe.
#[derive(Debug, Clone, PartialEq)]
pub struct LinguisticVariable {
    name: String,
    universe: (f64, f64),
    terms: Vec<Term>,
    tie_break: GapTieBreak,
}

impl LinguisticVariable {
    /// Terms must carry unique labels and be ordered by peak, ascending.
    pub fn new(
        name: impl Into<String>,
        universe: (f64, f64),
        terms: Vec<(String, TriangularMF)>,
        tie_break: GapTieBreak,
    ) -> Result<Self, FuzzyError> {
        let name = name.into();
        let (lo, hi) = universe;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(FuzzyError::InvalidVariable {
                name,
                reason: format!("universe [{lo}, {hi}] is not a finite interval"),
            });
        }
        if terms.is_empty() {
            return Err(FuzzyError::InvalidVariable {
                name,
                reason: "no terms".into(),
            });
        }
        let mut seen = HashSet::new();
        for (label, _) in &terms {
            if !seen.insert(label.as_str()) {
                return Err(FuzzyError::InvalidVariable {
                    name,
                    reason: format!("duplicate term label {label}"),
                });
            }
        }
        if terms.windows(2).any(|w| w[0].1.b() > w[1].1.b()) {
            return Err(FuzzyError::InvalidVariable {
                name,
                reason: "terms are not ordered by peak".into(),
            });
        }
        Ok(LinguisticVariable {
            name,
            universe,
            terms: terms
                .into_iter()
                .map(|(label, mf)| Term { label, mf })
                .collect(),
            tie_break,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn universe(&self) -> (f64, f64) {
        self.universe
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn tie_break(&self) -> GapTieBreak {
        self.tie_break
    }

    pub fn term_index(&self, label: &str) -> Option<usize> {
        self.terms.iter().position(|t| t.label == label)
    }

    /// Degree of every term, in term order.
    ///
    /// The input is clipped to the universe first. If no term covers it, the
    /// term with the nearest peak gets degree 1 (ties per [`GapTieBreak`]).
    pub fn fuzzify(&self, x: f64) -> Vec<f64> {
        let x = x.clamp(self.universe.0, self.universe.1);
        let mut degrees: Vec<f64> = self.terms.iter().map(|t| t.mf.membership(x)).collect();
        if degrees.iter().all(|&d| d == 0.0) {
            let mut best = 0;
            let mut best_dist = f64::INFINITY;
            for (i, t) in self.terms.iter().enumerate() {
                let dist = (x - t.mf.b()).abs();
                let better = match self.tie_break {
                    GapTieBreak::Lower => dist < best_dist,
                    GapTieBreak::Higher => dist <= best_dist,
                };
                if better {
                    best = i;
                    best_dist = dist;
                }
            }
            degrees[best] = 1.0;
        }
        degrees
    }

    /// [`fuzzify`](Self::fuzzify) keyed by label.
    pub fn fuzzify_labeled(&self, x: f64) -> Vec<(&str, f64)> {
        self.terms
            .iter()
            .map(|t| t.label.as_str())
            .zip(self.fuzzify(x))
            .collect()
    }
}

pub fn fuzzify(var: &LinguisticVariable, x: f64) -> Vec<(&str, f64)> {
    var.fuzzify_labeled(x)
}
