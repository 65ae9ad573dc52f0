//! Plain-text fuzzy system description.
//!
//! Line oriented, `#` starts a comment. Infinite MF endpoints are written
//! `inf` / `-inf`. Terms and rules attach to the most recent `variable` line.
//!
//! ```text
//! discretization 1001
//! variable positive Behaviour+ 0 20 lower
//! term Low -inf 0 8
//! rule High Low T9 1
//! ```

use super::{FuzzyConfig, FuzzyError, GapTieBreak, LinguisticVariable, Rule, TriangularMF};

/// The shipped description of [`FuzzyConfig::light_edge`].
pub const LIGHT_EDGE_CONFIG: &str = include_str!("../../data/light_edge.fis");

const HEADER: &str = "\
# Light-Edge fuzzy trust system.
# variable <role> <name> <lo> <hi> <gap-tie-break>
# term <label> <a> <b> <c>
# rule <positive-term> <negative-term> <trust-term> <weight>
";

#[derive(Clone, Copy, PartialEq, Eq)]
enum Role {
    Positive,
    Negative,
    Trust,
}

struct PendingVar {
    role: Role,
    name: String,
    universe: (f64, f64),
    tie_break: GapTieBreak,
    terms: Vec<(String, TriangularMF)>,
    line: usize,
}

fn parse_num(tok: &str, line: usize) -> Result<f64, FuzzyError> {
    tok.parse::<f64>().map_err(|_| FuzzyError::Parse {
        line,
        reason: format!("not a number: {tok}"),
    })
}

pub fn parse_config(text: &str) -> Result<FuzzyConfig, FuzzyError> {
    let mut discretization = None;
    let mut vars: Vec<PendingVar> = Vec::new();
    let mut rules = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        let bad = |reason: String| FuzzyError::Parse { line, reason };
        match toks.as_slice() {
            ["discretization", n] => {
                let n = n
                    .parse::<usize>()
                    .map_err(|_| bad(format!("bad discretization {n}")))?;
                discretization = Some(n);
            }
            ["variable", role, name, lo, hi, tie] => {
                let role = match *role {
                    "positive" => Role::Positive,
                    "negative" => Role::Negative,
                    "trust" => Role::Trust,
                    other => return Err(bad(format!("unknown variable role {other}"))),
                };
                if vars.iter().any(|v| v.role == role) {
                    return Err(bad("variable role declared twice".into()));
                }
                let tie_break = match *tie {
                    "lower" => GapTieBreak::Lower,
                    "higher" => GapTieBreak::Higher,
                    other => return Err(bad(format!("unknown tie-break {other}"))),
                };
                vars.push(PendingVar {
                    role,
                    name: name.to_string(),
                    universe: (parse_num(lo, line)?, parse_num(hi, line)?),
                    tie_break,
                    terms: Vec::new(),
                    line,
                });
            }
            ["term", label, a, b, c] => {
                let var = vars
                    .last_mut()
                    .ok_or_else(|| bad("term before any variable".into()))?;
                let mf = TriangularMF::new(
                    parse_num(a, line)?,
                    parse_num(b, line)?,
                    parse_num(c, line)?,
                )
                .map_err(|e| bad(e.to_string()))?;
                var.terms.push((label.to_string(), mf));
            }
            ["rule", pos, neg, out, weight] => {
                rules.push(Rule {
                    pos_label: pos.to_string(),
                    neg_label: neg.to_string(),
                    consequent: out.to_string(),
                    weight: parse_num(weight, line)?,
                });
            }
            _ => return Err(bad(format!("unrecognised line: {content}"))),
        }
    }

    let last_line = text.lines().count();
    let mut take = |role: Role, what: &str| -> Result<LinguisticVariable, FuzzyError> {
        let pos = vars
            .iter()
            .position(|v| v.role == role)
            .ok_or_else(|| FuzzyError::Parse {
                line: last_line,
                reason: format!("missing {what} variable"),
            })?;
        let v = vars.remove(pos);
        LinguisticVariable::new(v.name, v.universe, v.terms, v.tie_break).map_err(|e| {
            FuzzyError::Parse {
                line: v.line,
                reason: e.to_string(),
            }
        })
    };
    let positive = take(Role::Positive, "positive")?;
    let negative = take(Role::Negative, "negative")?;
    let trust = take(Role::Trust, "trust")?;
    FuzzyConfig::new(
        positive,
        negative,
        trust,
        rules,
        discretization.unwrap_or(super::DEFAULT_DISCRETIZATION),
    )
}

pub fn format_config(config: &FuzzyConfig) -> String {
    use std::fmt::Write;

    let mut out = String::from(HEADER);
    writeln!(out, "discretization {}", config.discretization()).unwrap();
    for (role, var) in [
        ("positive", config.positive_var()),
        ("negative", config.negative_var()),
        ("trust", config.trust_var()),
    ] {
        let (lo, hi) = var.universe();
        writeln!(
            out,
            "\nvariable {role} {} {lo} {hi} {}",
            var.name(),
            var.tie_break().as_str()
        )
        .unwrap();
        for t in var.terms() {
            writeln!(
                out,
                "term {} {} {} {}",
                t.label,
                t.mf.a(),
                t.mf.b(),
                t.mf.c()
            )
            .unwrap();
        }
    }
    out.push('\n');
    for r in config.rules() {
        writeln!(
            out,
            "rule {} {} {} {}",
            r.pos_label, r.neg_label, r.consequent, r.weight
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_file_is_the_default_system() {
        assert_eq!(
            parse_config(LIGHT_EDGE_CONFIG).unwrap(),
            FuzzyConfig::light_edge()
        );
        assert_eq!(format_config(&FuzzyConfig::light_edge()), LIGHT_EDGE_CONFIG);
    }

    #[test]
    fn infinite_tokens_parse() {
        let cfg = parse_config(LIGHT_EDGE_CONFIG).unwrap();
        let t1 = &cfg.trust_var().terms()[0].mf;
        assert_eq!(t1.a(), f64::NEG_INFINITY);
        assert_eq!(t1.b(), 0.00186);
        assert_eq!(cfg.trust_var().terms()[8].mf.c(), f64::INFINITY);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let broken = LIGHT_EDGE_CONFIG.replace("term Normal 5 10 15", "term Normal 5 ten 15");
        match parse_config(&broken) {
            Err(FuzzyError::Parse { line, .. }) => assert_eq!(line, 9),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_config("bogus line"),
            Err(FuzzyError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_config("term A 0 1 2"),
            Err(FuzzyError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn missing_rule_rejected() {
        let broken = LIGHT_EDGE_CONFIG.replace("rule Low Plenty T1 1\n", "");
        assert!(matches!(
            parse_config(&broken),
            Err(FuzzyError::InvalidRuleBase(_))
        ));
    }

    #[test]
    fn discretization_round_trips() {
        let cfg = FuzzyConfig::light_edge().with_discretization(4097).unwrap();
        assert_eq!(parse_config(&format_config(&cfg)).unwrap(), cfg);
    }
}
