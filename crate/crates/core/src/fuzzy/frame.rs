use serde::{Deserialize, Serialize};

use super::{FuzzyError, Tfn};

const SEVEN_CLASS_LABELS: [&str; 7] = ["B", "MB", "M", "MG", "G", "VG", "VVG"];

/// One linguistic class of a fuzzified frame. The membership function and the
/// representative TFN coincide: shoulder classes are the degenerate TFNs
/// `(lo, lo, a_3)` and `(a_{2m-3}, hi, hi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameClass {
    pub label: String,
    pub shape: Tfn,
}

/// A frame of discernment `[lo, hi]` partitioned into overlapping triangular
/// classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    lo: f64,
    hi: f64,
    knots: Vec<f64>,
    classes: Vec<FrameClass>,
}

impl Frame {
    /// Builds `m` classes over `[lo, hi]` from the knots
    /// `a_i = lo + i (hi - lo) / 2m`, `i = 1..2m-1`.
    ///
    /// The first class peaks at `lo` with support `[lo, a_3]`, the last at
    /// `hi` with support `[a_{2m-3}, hi]`, and interior class `k` peaks at
    /// `a_{2k-1}` with support `[a_{2k-3}, a_{2k+1}]`.
    pub fn fuzzify(lo: f64, hi: f64, m: usize) -> Result<Frame, FuzzyError> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(FuzzyError::NonFinite);
        }
        if lo >= hi {
            return Err(FuzzyError::EmptySpan { lo, hi });
        }
        if m < 2 {
            return Err(FuzzyError::TooFewClasses(m));
        }
        let step = (hi - lo) / (2 * m) as f64;
        let knot = |i: usize| lo + i as f64 * step;
        let knots: Vec<f64> = (1..2 * m).map(knot).collect();

        let label = |k: usize| {
            if m == 7 {
                SEVEN_CLASS_LABELS[k - 1].to_string()
            } else {
                format!("L{k}")
            }
        };
        let mut classes = Vec::with_capacity(m);
        classes.push(FrameClass {
            label: label(1),
            shape: Tfn::new(lo, lo, knot(3))?,
        });
        for k in 2..m {
            classes.push(FrameClass {
                label: label(k),
                shape: Tfn::new(knot(2 * k - 3), knot(2 * k - 1), knot(2 * k + 1))?,
            });
        }
        classes.push(FrameClass {
            label: label(m),
            shape: Tfn::new(knot(2 * m - 3), hi, hi)?,
        });
        Ok(Frame { lo, hi, knots, classes })
    }

    /// Frame with caller-supplied classes, ordered by peak.
    pub fn from_classes(lo: f64, hi: f64, classes: Vec<FrameClass>) -> Result<Frame, FuzzyError> {
        if lo >= hi {
            return Err(FuzzyError::EmptySpan { lo, hi });
        }
        if classes.len() < 2 {
            return Err(FuzzyError::TooFewClasses(classes.len()));
        }
        Ok(Frame {
            lo,
            hi,
            knots: Vec::new(),
            classes,
        })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn span(&self) -> f64 {
        self.hi - self.lo
    }

    /// `a_1 ..= a_{2m-1}`; empty for frames built with [`Frame::from_classes`].
    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn classes(&self) -> &[FrameClass] {
        &self.classes
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn class(&self, index: usize) -> Result<&FrameClass, FuzzyError> {
        self.classes.get(index).ok_or(FuzzyError::ClassIndex {
            index,
            count: self.classes.len(),
        })
    }

    pub fn class_membership(&self, index: usize, t: f64) -> Result<f64, FuzzyError> {
        Ok(self.class(index)?.shape.membership(t))
    }

    pub fn memberships(&self, t: f64) -> Vec<f64> {
        self.classes.iter().map(|c| c.shape.membership(t)).collect()
    }

    /// Support width of an interior class, `2 (hi - lo) / m`.
    pub fn interior_width(&self) -> f64 {
        2.0 * self.span() / self.classes.len() as f64
    }

    /// Point where the falling edge of class `k` meets the rising edge of
    /// class `k + 1`. For disjoint neighbours, the midpoint of the gap.
    pub fn crossing(&self, k: usize) -> Result<f64, FuzzyError> {
        let left = self.class(k)?.shape;
        let right = self.class(k + 1)?.shape;
        Ok(edge_crossing(&left, &right))
    }

    pub fn crossings(&self) -> Vec<f64> {
        (0..self.classes.len() - 1)
            .map(|k| edge_crossing(&self.classes[k].shape, &self.classes[k + 1].shape))
            .collect()
    }
}

pub(crate) fn edge_crossing(left: &Tfn, right: &Tfn) -> f64 {
    // falling edge of `left` on [b1, c1], rising edge of `right` on [a2, b2]
    let fall = left.c() - left.b();
    let rise = right.b() - right.a();
    if right.a() >= left.c() || fall + rise == 0.0 {
        return 0.5 * (left.c() + right.a());
    }
    (left.c() * rise + right.a() * fall) / (rise + fall)
}
