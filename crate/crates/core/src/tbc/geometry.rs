//! Segment and corner bookkeeping for the reference square.

use ndarray::Array2;

use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Segment {
    R,
    L,
    T,
    B,
}

pub const SEGMENTS: [Segment; 4] = [Segment::R, Segment::L, Segment::T, Segment::B];

impl Segment {
    pub fn index(self) -> usize {
        match self {
            Segment::R => 0,
            Segment::L => 1,
            Segment::T => 2,
            Segment::B => 3,
        }
    }

    /// R and L run along `y2`.
    pub fn is_vertical(self) -> bool {
        matches!(self, Segment::R | Segment::L)
    }

    /// `+1` for R/T, `-1` for L/B.
    pub fn sign(self) -> f64 {
        match self {
            Segment::R | Segment::T => 1.0,
            Segment::L | Segment::B => -1.0,
        }
    }

    /// Corners at the `(minus, plus)` ends of the segment's own variable.
    pub fn end_corners(self) -> (Corner, Corner) {
        match self {
            Segment::R => (Corner::RB, Corner::RT),
            Segment::L => (Corner::LB, Corner::LT),
            Segment::T => (Corner::LT, Corner::RT),
            Segment::B => (Corner::LB, Corner::RB),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Corner {
    RT,
    RB,
    LT,
    LB,
}

pub const CORNERS: [Corner; 4] = [Corner::RT, Corner::RB, Corner::LT, Corner::LB];

impl Corner {
    pub fn index(self) -> usize {
        match self {
            Corner::RT => 0,
            Corner::RB => 1,
            Corner::LT => 2,
            Corner::LB => 3,
        }
    }

    /// `(vertical, horizontal)` segments meeting here.
    pub fn segments(self) -> (Segment, Segment) {
        match self {
            Corner::RT => (Segment::R, Segment::T),
            Corner::RB => (Segment::R, Segment::B),
            Corner::LT => (Segment::L, Segment::T),
            Corner::LB => (Segment::L, Segment::B),
        }
    }

    /// `s1 * s2`.
    pub fn sign(self) -> f64 {
        let (a1, a2) = self.segments();
        a1.sign() * a2.sign()
    }
}

/// Value of a Legendre series at `y = s`, `s = +-1`.
pub fn end_value(c: &[C64], s: f64) -> C64 {
    if s > 0.0 {
        c.iter().sum()
    } else {
        c.iter().enumerate().map(|(k, &v)| if k % 2 == 0 { v } else { -v }).sum()
    }
}

/// Derivative of a Legendre series at `y = s`.
pub fn end_derivative(c: &[C64], s: f64) -> C64 {
    c.iter()
        .enumerate()
        .map(|(k, &v)| {
            let d = (k * (k + 1)) as f64 / 2.0;
            if s > 0.0 || k % 2 == 1 {
                v * d
            } else {
                -v * d
            }
        })
        .sum()
}

/// Value of a segment field at the end of the segment that touches `corner`.
pub fn value_at_corner(seg: Segment, field: &[C64], corner: Corner) -> C64 {
    let (a1, a2) = corner.segments();
    let s = if seg.is_vertical() { a2.sign() } else { a1.sign() };
    end_value(field, s)
}

/// Restriction of a 2D coefficient array to a segment.
pub fn trace(u: &Array2<C64>, seg: Segment) -> Vec<C64> {
    let (n1, n2) = u.dim();
    let s = seg.sign();
    if seg.is_vertical() {
        (0..n2)
            .map(|p2| (0..n1).map(|p1| if s < 0.0 && p1 % 2 == 1 { -u[(p1, p2)] } else { u[(p1, p2)] }).sum())
            .collect()
    } else {
        (0..n1)
            .map(|p1| (0..n2).map(|p2| if s < 0.0 && p2 % 2 == 1 { -u[(p1, p2)] } else { u[(p1, p2)] }).sum())
            .collect()
    }
}

/// Derivative across a segment (`d/dy1` on R/L, `d/dy2` on T/B), restricted to it.
pub fn normal_trace(u: &Array2<C64>, seg: Segment) -> Vec<C64> {
    let (n1, n2) = u.dim();
    let s = seg.sign();
    let w = |p: usize| {
        let d = (p * (p + 1)) as f64 / 2.0;
        if s > 0.0 || p % 2 == 1 {
            d
        } else {
            -d
        }
    };
    if seg.is_vertical() {
        (0..n2).map(|p2| (0..n1).map(|p1| u[(p1, p2)] * w(p1)).sum()).collect()
    } else {
        (0..n1).map(|p1| (0..n2).map(|p2| u[(p1, p2)] * w(p2)).sum()).collect()
    }
}

/// Traces of a field on the four segments, indexed by `Segment::index`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryTrace {
    pub seg: [Vec<C64>; 4],
}

impl BoundaryTrace {
    pub fn from_field(u: &Array2<C64>) -> Self {
        Self { seg: SEGMENTS.map(|s| trace(u, s)) }
    }

    pub fn get(&self, s: Segment) -> &[C64] {
        &self.seg[s.index()]
    }

    /// Corner value read from the vertical segment.
    pub fn corner(&self, c: Corner) -> C64 {
        let (a1, _) = c.segments();
        value_at_corner(a1, self.get(a1), c)
    }

    pub fn zeros(n1: usize, n2: usize) -> Self {
        let z = C64::new(0.0, 0.0);
        Self { seg: [vec![z; n2 + 1], vec![z; n2 + 1], vec![z; n1 + 1], vec![z; n1 + 1]] }
    }

    pub fn average(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (a, b) in out.seg.iter_mut().zip(&other.seg) {
            for (x, y) in a.iter_mut().zip(b) {
                *x = (*x + *y) * 0.5;
            }
        }
        out
    }
}
