#![allow(dead_code)]

//! Test-only reference implementations, written without touching the
//! library's fuzzy or trust code paths.

use lightedge_core::trust::{ActionKind, ActivityRecord};

const INF: f64 = f64::INFINITY;

/// Triangle/shoulder evaluated straight from the definition.
fn tri(a: f64, b: f64, c: f64, x: f64) -> f64 {
    let left = if a.is_infinite() {
        1.0
    } else if b > a {
        ((x - a) / (b - a)).clamp(0.0, 1.0)
    } else if x >= b {
        1.0
    } else {
        0.0
    };
    let right = if c.is_infinite() {
        1.0
    } else if c > b {
        ((c - x) / (c - b)).clamp(0.0, 1.0)
    } else if x <= b {
        1.0
    } else {
        0.0
    };
    if x < b {
        left
    } else {
        right
    }
}

pub const POS_TERMS: [(f64, f64, f64); 3] =
    [(-INF, 0.0, 8.0), (5.0, 10.0, 15.0), (12.0, 20.0, INF)];
pub const NEG_TERMS: [(f64, f64, f64); 3] = [(-1.0, 0.0, 1.0), (1.0, 2.0, 3.0), (2.0, 5.0, INF)];
pub const TRUST_TERMS: [(f64, f64, f64); 9] = [
    (-INF, 0.00186, 0.127),
    (0.0, 0.125, 0.25),
    (0.125, 0.25, 0.375),
    (0.25, 0.375, 0.5),
    (0.375, 0.5, 0.625),
    (0.5, 0.625, 0.75),
    (0.625, 0.75, 0.875),
    (0.75, 0.875, 1.0),
    (0.875, 1.0, INF),
];

/// `RULES[pos_term][neg_term]` = trust term index (0-based T1..T9).
pub const RULES: [[usize; 3]; 3] = [
    // Low positive: Low/High/Plenty negative
    [6, 1, 0],
    // Normal
    [7, 3, 2],
    // High
    [8, 5, 4],
];

fn degrees(terms: &[(f64, f64, f64); 3], x: f64, prefer_higher: bool) -> [f64; 3] {
    let mut d = terms.map(|(a, b, c)| tri(a, b, c, x));
    if d.iter().all(|&v| v == 0.0) {
        let dist = terms.map(|(_, b, _)| (x - b).abs());
        let min = dist.iter().cloned().fold(INF, f64::min);
        let idx: Vec<usize> = (0..3).filter(|&i| dist[i] == min).collect();
        let pick = if prefer_higher {
            *idx.last().unwrap()
        } else {
            idx[0]
        };
        d[pick] = 1.0;
    }
    d
}

/// Rule firing strengths as a 3x3 table.
pub fn oracle_strengths(pos: f64, neg: f64) -> [[f64; 3]; 3] {
    let p = degrees(&POS_TERMS, pos.clamp(0.0, 20.0), false);
    let n = degrees(&NEG_TERMS, neg.clamp(0.0, 5.0), true);
    let mut s = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            s[i][j] = p[i].min(n[j]);
        }
    }
    s
}

/// Brute-force Mamdani: evaluate every rule at every sample.
pub fn oracle_trust_score(pos: f64, neg: f64, samples: usize) -> f64 {
    let s = oracle_strengths(pos, neg);
    let mut num = 0.0;
    let mut den = 0.0;
    for k in 0..samples {
        let x = k as f64 / (samples - 1) as f64;
        let mut mu: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let (a, b, c) = TRUST_TERMS[RULES[i][j]];
                mu = mu.max(tri(a, b, c, x).min(s[i][j]));
            }
        }
        num += x * mu;
        den += mu;
    }
    num / den
}

/// Linear scan with the window predicate spelled out per record.
pub fn oracle_qualify(records: &[ActivityRecord], curr: u64, w_p: u64, w_n: u64) -> (usize, usize) {
    let mut p = 0;
    let mut n = 0;
    for r in records {
        if r.action_time > curr {
            continue;
        }
        let age = curr - r.action_time;
        match r.kind {
            ActionKind::Positive => {
                if age <= w_p {
                    p += 1
                }
            }
            ActionKind::Negative => {
                if age <= w_n {
                    n += 1
                }
            }
        }
    }
    (p, n)
}
