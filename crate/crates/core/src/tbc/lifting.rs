use crate::error::Result;
use crate::robin::{make_lifting, Lifting1D};
use crate::C64;

use super::geometry::{Corner, Segment, CORNERS, SEGMENTS};

/// Segment lifts `chi_r, chi_l` (axis 1, `kappa1`) and `chi_t, chi_b`
/// (axis 2, `kappa2`); corner lifts are the tensor products `chi_a1 chi_a2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lifting2D {
    pub axis1: Lifting1D,
    pub axis2: Lifting1D,
}

pub fn lift_2d(kappa1: C64, kappa2: C64) -> Result<Lifting2D> {
    Ok(Lifting2D { axis1: make_lifting(kappa1)?, axis2: make_lifting(kappa2)? })
}

/// `(d/dy + s kappa) chi` evaluated at `y = s`.
fn robin_at(c: [C64; 2], kappa: C64, s: f64) -> C64 {
    c[1] + kappa * s * (c[0] + s * c[1])
}

impl Lifting2D {
    /// Degree-one lift belonging to a segment, in that segment's normal variable.
    pub fn segment(&self, seg: Segment) -> [C64; 2] {
        match seg {
            Segment::R => self.axis1.chi_plus,
            Segment::L => self.axis1.chi_minus,
            Segment::T => self.axis2.chi_plus,
            Segment::B => self.axis2.chi_minus,
        }
    }

    /// `chi_a1(y1) chi_a2(y2)` as a 2x2 coefficient block.
    pub fn corner(&self, c: Corner) -> [[C64; 2]; 2] {
        let (a1, a2) = c.segments();
        let x = self.segment(a1);
        let y = self.segment(a2);
        [[x[0] * y[0], x[0] * y[1]], [x[1] * y[0], x[1] * y[1]]]
    }

    fn kappa(&self, seg: Segment) -> C64 {
        if seg.is_vertical() {
            self.axis1.kappa
        } else {
            self.axis2.kappa
        }
    }

    /// Largest deviation from the identity pattern over all segment and
    /// corner constraint pairs.
    pub fn constraint_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in SEGMENTS {
            for b in SEGMENTS {
                if a.is_vertical() != b.is_vertical() {
                    continue;
                }
                let v = robin_at(self.segment(a), self.kappa(b), b.sign());
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((v - target).norm());
            }
        }
        for c in CORNERS {
            let (a1, a2) = c.segments();
            for d in CORNERS {
                let (b1, b2) = d.segments();
                let v = robin_at(self.segment(a1), self.kappa(b1), b1.sign())
                    * robin_at(self.segment(a2), self.kappa(b2), b2.sign());
                let target = if c == d { 1.0 } else { 0.0 };
                worst = worst.max((v - target).norm());
            }
        }
        worst
    }
}
