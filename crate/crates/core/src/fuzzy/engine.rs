use std::collections::HashSet;

use super::{FuzzyError, GapTieBreak, LinguisticVariable, TriangularMF};

pub const DEFAULT_DISCRETIZATION: usize = 1001;

/// `if positive is pos_label and negative is neg_label then trust is consequent`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub pos_label: String,
    pub neg_label: String,
    pub consequent: String,
    pub weight: f64,
}

impl Rule {
    pub fn new(pos: &str, neg: &str, consequent: &str) -> Self {
        Rule {
            pos_label: pos.into(),
            neg_label: neg.into(),
            consequent: consequent.into(),
            weight: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct ResolvedRule {
    pos: usize,
    neg: usize,
    out: usize,
    weight: f64,
}

/// Two-input Mamdani system: min for AND, clipping for implication, max for
/// aggregation, centroid over `discretization` uniform samples of the output
/// universe. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyConfig {
    positive: LinguisticVariable,
    negative: LinguisticVariable,
    trust: LinguisticVariable,
    rules: Vec<Rule>,
    resolved: Vec<ResolvedRule>,
    discretization: usize,
}

impl FuzzyConfig {
    /// The rule base must name every (positive, negative) term pair exactly once.
    pub fn new(
        positive: LinguisticVariable,
        negative: LinguisticVariable,
        trust: LinguisticVariable,
        rules: Vec<Rule>,
        discretization: usize,
    ) -> Result<Self, FuzzyError> {
        if discretization < 2 {
            return Err(FuzzyError::InvalidRuleBase(format!(
                "discretization must be at least 2, got {discretization}"
            )));
        }
        let lookup = |var: &LinguisticVariable, label: &str| {
            var.term_index(label).ok_or_else(|| {
                FuzzyError::InvalidRuleBase(format!(
                    "unknown term {label} for variable {}",
                    var.name()
                ))
            })
        };
        let mut resolved = Vec::with_capacity(rules.len());
        let mut pairs = HashSet::new();
        for rule in &rules {
            if !(rule.weight > 0.0 && rule.weight <= 1.0) {
                return Err(FuzzyError::InvalidRuleBase(format!(
                    "rule weight {} outside (0, 1]",
                    rule.weight
                )));
            }
            let r = ResolvedRule {
                pos: lookup(&positive, &rule.pos_label)?,
                neg: lookup(&negative, &rule.neg_label)?,
                out: lookup(&trust, &rule.consequent)?,
                weight: rule.weight,
            };
            if !pairs.insert((r.pos, r.neg)) {
                return Err(FuzzyError::InvalidRuleBase(format!(
                    "more than one rule for ({}, {})",
                    rule.pos_label, rule.neg_label
                )));
            }
            resolved.push(r);
        }
        let expected = positive.terms().len() * negative.terms().len();
        if pairs.len() != expected {
            return Err(FuzzyError::InvalidRuleBase(format!(
                "rule base covers {} of {expected} antecedent pairs",
                pairs.len()
            )));
        }
        Ok(FuzzyConfig {
            positive,
            negative,
            trust,
            rules,
            resolved,
            discretization,
        })
    }

    /// The Light-Edge trust system.
    ///
    /// Positive behaviour on [0, 20]: Low(-inf, 0, 8), Normal(5, 10, 15),
    /// High(12, 20, inf). Negative behaviour on [0, 5]: Low(-1, 0, 1),
    /// High(1, 2, 3), Plenty(2, 5, inf). Trust on [0, 1]: T1..T9.
    pub fn light_edge() -> Self {
        let inf = f64::INFINITY;
        let tri = |a, b, c| TriangularMF::new(a, b, c).expect("static membership");
        let positive = LinguisticVariable::new(
            "Behaviour+",
            (0.0, 20.0),
            vec![
                ("Low".into(), tri(-inf, 0.0, 8.0)),
                ("Normal".into(), tri(5.0, 10.0, 15.0)),
                ("High".into(), tri(12.0, 20.0, inf)),
            ],
            GapTieBreak::Lower,
        )
        .expect("static variable");
        let negative = LinguisticVariable::new(
            "Behaviour-",
            (0.0, 5.0),
            vec![
                ("Low".into(), tri(-1.0, 0.0, 1.0)),
                ("High".into(), tri(1.0, 2.0, 3.0)),
                ("Plenty".into(), tri(2.0, 5.0, inf)),
            ],
            GapTieBreak::Higher,
        )
        .expect("static variable");
        let trust = LinguisticVariable::new(
            "Trust",
            (0.0, 1.0),
            vec![
                ("T1".into(), tri(-inf, 0.00186, 0.127)),
                ("T2".into(), tri(0.0, 0.125, 0.25)),
                ("T3".into(), tri(0.125, 0.25, 0.375)),
                ("T4".into(), tri(0.25, 0.375, 0.5)),
                ("T5".into(), tri(0.375, 0.5, 0.625)),
                ("T6".into(), tri(0.5, 0.625, 0.75)),
                ("T7".into(), tri(0.625, 0.75, 0.875)),
                ("T8".into(), tri(0.75, 0.875, 1.0)),
                ("T9".into(), tri(0.875, 1.0, inf)),
            ],
            GapTieBreak::Lower,
        )
        .expect("static variable");
        let rules = vec![
            Rule::new("High", "Low", "T9"),
            Rule::new("Normal", "Low", "T8"),
            Rule::new("Low", "Low", "T7"),
            Rule::new("High", "High", "T6"),
            Rule::new("High", "Plenty", "T5"),
            Rule::new("Normal", "High", "T4"),
            Rule::new("Normal", "Plenty", "T3"),
            Rule::new("Low", "High", "T2"),
            Rule::new("Low", "Plenty", "T1"),
        ];
        FuzzyConfig::new(positive, negative, trust, rules, DEFAULT_DISCRETIZATION)
            .expect("static rule base")
    }

    pub fn with_discretization(&self, n: usize) -> Result<Self, FuzzyError> {
        FuzzyConfig::new(
            self.positive.clone(),
            self.negative.clone(),
            self.trust.clone(),
            self.rules.clone(),
            n,
        )
    }

    pub fn positive_var(&self) -> &LinguisticVariable {
        &self.positive
    }

    pub fn negative_var(&self) -> &LinguisticVariable {
        &self.negative
    }

    pub fn trust_var(&self) -> &LinguisticVariable {
        &self.trust
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn discretization(&self) -> usize {
        self.discretization
    }

    /// Firing strength of each rule, in rule order.
    pub fn firing_strengths(&self, pos: f64, neg: f64) -> Result<Vec<f64>, FuzzyError> {
        for v in [pos, neg] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(FuzzyError::InvalidInput(v));
            }
        }
        let pd = self.positive.fuzzify(pos);
        let nd = self.negative.fuzzify(neg);
        Ok(self
            .resolved
            .iter()
            .map(|r| pd[r.pos].min(nd[r.neg]) * r.weight)
            .collect())
    }

    pub fn infer(&self, pos: f64, neg: f64) -> Result<Aggregate, FuzzyError> {
        let strengths = self.firing_strengths(pos, neg)?;
        let (lo, hi) = self.trust.universe();
        let n = self.discretization;
        let step = (hi - lo) / (n - 1) as f64;
        let xs: Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
        let mut mu = vec![0.0; n];
        for (rule, &strength) in self.resolved.iter().zip(&strengths) {
            if strength <= 0.0 {
                continue;
            }
            let mf = &self.trust.terms()[rule.out].mf;
            for (m, &x) in mu.iter_mut().zip(&xs) {
                let clipped = mf.membership(x).min(strength);
                if clipped > *m {
                    *m = clipped;
                }
            }
        }
        Ok(Aggregate { xs, mu })
    }

    pub fn trust_score(&self, pos: f64, neg: f64) -> Result<f64, FuzzyError> {
        defuzzify_centroid(&self.infer(pos, neg)?)
    }
}

impl Default for FuzzyConfig {
    fn default() -> Self {
        FuzzyConfig::light_edge()
    }
}

/// The aggregated output set, sampled on the output universe.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    xs: Vec<f64>,
    mu: Vec<f64>,
}

impl Aggregate {
    pub fn from_samples(xs: Vec<f64>, mu: Vec<f64>) -> Self {
        assert_eq!(xs.len(), mu.len(), "sample vectors differ in length");
        Aggregate { xs, mu }
    }

    /// Samples `f` at `n` uniform points of `[lo, hi]`.
    pub fn sample(lo: f64, hi: f64, n: usize, f: impl Fn(f64) -> f64) -> Self {
        let step = (hi - lo) / (n.max(2) - 1) as f64;
        let xs: Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
        let mu = xs.iter().map(|&x| f(x)).collect();
        Aggregate { xs, mu }
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }
}

/// Centroid: `sum(x * mu(x)) / sum(mu(x))` over the samples.
pub fn defuzzify_centroid(agg: &Aggregate) -> Result<f64, FuzzyError> {
    let (num, den) = agg
        .xs
        .iter()
        .zip(&agg.mu)
        .fold((0.0, 0.0), |(n, d), (&x, &m)| (n + x * m, d + m));
    if den <= 0.0 {
        return Err(FuzzyError::EmptyAggregate);
    }
    Ok(num / den)
}

pub fn infer(config: &FuzzyConfig, pos: f64, neg: f64) -> Result<Aggregate, FuzzyError> {
    config.infer(pos, neg)
}

pub fn trust_score(config: &FuzzyConfig, pos: f64, neg: f64) -> Result<f64, FuzzyError> {
    config.trust_score(pos, neg)
}
