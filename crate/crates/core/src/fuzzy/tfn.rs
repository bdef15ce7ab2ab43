use std::fmt;
use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};

use super::FuzzyError;

/// Triangular fuzzy number `(a, b, c)` with support `[a, c]` and peak `b`.
///
/// The constructor enforces `a <= b <= c` and finiteness; every operation in
/// this module preserves that ordering.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct Tfn {
    a: f64,
    b: f64,
    c: f64,
}

impl Tfn {
    pub const ZERO: Tfn = Tfn { a: 0.0, b: 0.0, c: 0.0 };
    pub const ONE: Tfn = Tfn { a: 1.0, b: 1.0, c: 1.0 };

    pub fn new(a: f64, b: f64, c: f64) -> Result<Self, FuzzyError> {
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(FuzzyError::NonFinite);
        }
        if a > b || b > c {
            return Err(FuzzyError::Unordered { a, b, c });
        }
        Ok(Tfn { a, b, c })
    }

    /// Crisp number embedded as `(v, v, v)`.
    pub fn crisp(v: f64) -> Self {
        assert!(v.is_finite(), "crisp value must be finite");
        Tfn { a: v, b: v, c: v }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn components(&self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }

    pub fn width(&self) -> f64 {
        self.c - self.a
    }

    pub fn is_crisp(&self) -> bool {
        self.a == self.c
    }

    pub fn is_nonnegative(&self) -> bool {
        self.a >= 0.0
    }

    /// Component-wise product. Both operands must be nonnegative, otherwise
    /// the component-wise rule can break the `a <= b <= c` ordering.
    pub fn try_mul(&self, other: &Tfn) -> Result<Tfn, FuzzyError> {
        if !self.is_nonnegative() || !other.is_nonnegative() {
            return Err(FuzzyError::NegativeProduct);
        }
        Ok(Tfn {
            a: self.a * other.a,
            b: self.b * other.b,
            c: self.c * other.c,
        })
    }

    pub fn scale(&self, r: f64) -> Result<Tfn, FuzzyError> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(FuzzyError::NegativeScalar(r));
        }
        Ok(Tfn {
            a: self.a * r,
            b: self.b * r,
            c: self.c * r,
        })
    }

    /// Membership grade of `t`. Flat edges (`a == b` or `b == c`) take the
    /// value 1 at the flat side.
    pub fn membership(&self, t: f64) -> f64 {
        if t < self.a || t > self.c {
            return 0.0;
        }
        if t <= self.b {
            if self.b == self.a {
                1.0
            } else {
                (t - self.a) / (self.b - self.a)
            }
        } else if self.c == self.b {
            1.0
        } else {
            (self.c - t) / (self.c - self.b)
        }
    }

    /// Integral of the membership function over `[p, q]`, exact for the
    /// piecewise-linear shape.
    pub fn membership_integral(&self, p: f64, q: f64) -> f64 {
        let lo = p.max(self.a);
        let hi = q.min(self.c);
        if hi <= lo {
            return 0.0;
        }
        let mut knots = vec![lo, hi];
        if self.b > lo && self.b < hi {
            knots.push(self.b);
        }
        knots.sort_by(f64::total_cmp);
        knots
            .windows(2)
            .map(|w| 0.5 * (w[1] - w[0]) * (self.membership(w[0]) + self.membership(w[1])))
            .sum()
    }

    /// Area under the membership function.
    pub fn area(&self) -> f64 {
        0.5 * (self.c - self.a)
    }

    pub fn max_abs_diff(&self, other: &Tfn) -> f64 {
        (self.a - other.a)
            .abs()
            .max((self.b - other.b).abs())
            .max((self.c - other.c).abs())
    }
}

impl TryFrom<[f64; 3]> for Tfn {
    type Error = FuzzyError;

    fn try_from(v: [f64; 3]) -> Result<Self, Self::Error> {
        Tfn::new(v[0], v[1], v[2])
    }
}

impl From<Tfn> for [f64; 3] {
    fn from(t: Tfn) -> Self {
        t.components()
    }
}

impl Add for Tfn {
    type Output = Tfn;

    fn add(self, rhs: Tfn) -> Tfn {
        Tfn {
            a: self.a + rhs.a,
            b: self.b + rhs.b,
            c: self.c + rhs.c,
        }
    }
}

impl Sub for Tfn {
    type Output = Tfn;

    // (a1 - c2, b1 - b2, c1 - a2)
    fn sub(self, rhs: Tfn) -> Tfn {
        Tfn {
            a: self.a - rhs.c,
            b: self.b - rhs.b,
            c: self.c - rhs.a,
        }
    }
}

impl fmt::Display for Tfn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => write!(f, "({:.*}, {:.*}, {:.*})", p, self.a, p, self.b, p, self.c),
            None => write!(f, "({}, {}, {})", self.a, self.b, self.c),
        }
    }
}
