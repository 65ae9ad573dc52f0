use super::FuzzyError;

/// Triangular membership function `(a, b, c)` with `a <= b <= c`.
///
/// An infinite `a` turns the left flank into a shoulder (membership 1 for
/// every `x <= b`); an infinite `c` does the same on the right.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangularMF {
    a: f64,
    b: f64,
    c: f64,
}

impl TriangularMF {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self, FuzzyError> {
        let ok = !a.is_nan()
            && !c.is_nan()
            && b.is_finite()
            && a != f64::INFINITY
            && c != f64::NEG_INFINITY
            && a <= b
            && b <= c;
        if !ok {
            return Err(FuzzyError::InvalidMembership { a, b, c });
        }
        Ok(TriangularMF { a, b, c })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// The peak.
    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn membership(&self, x: f64) -> f64 {
        let TriangularMF { a, b, c } = *self;
        if x == b {
            1.0
        } else if x < b {
            if a == f64::NEG_INFINITY {
                1.0
            } else if x <= a {
                0.0
            } else {
                (x - a) / (b - a)
            }
        } else if c == f64::INFINITY {
            1.0
        } else if x >= c {
            0.0
        } else {
            (c - x) / (c - b)
        }
    }
}

pub fn membership(mf: &TriangularMF, x: f64) -> f64 {
    mf.membership(x)
}
