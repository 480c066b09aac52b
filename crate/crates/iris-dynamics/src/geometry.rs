//! Global layout of the four large squares and their local saddle frames.
//!
//! Square `k` (1-based, counted clockwise from the lower-left) carries local
//! coordinates `(s, u)` with the saddle at the origin, the stable axis `s`
//! pointing toward the entry edge and the unstable axis `u` toward the exit
//! edge. Square 1 has `s` along global `+x` and `u` along global `+y`; each
//! following square is the previous one rotated a quarter turn clockwise
//! about the origin.
//!
//! With `hx = 1 - a/2` and `hy = 1 + a/2` the centers are
//! `(-hx,-hy), (-hy,hx), (hx,hy), (hy,-hx)`. All four transforms below are
//! written so that a quarter-turn image of a point produces bitwise
//! identical local coordinates in the next square, which makes every
//! downstream computation exactly equivariant under the fourfold symmetry.

use crate::params::IrisParams;

/// One square of the iris: its index and the affine map between local
/// saddle coordinates and the global plane.
#[derive(Debug, Clone, Copy)]
pub struct SquareFrame {
    index: usize,
    hx: f64,
    hy: f64,
}

impl SquareFrame {
    /// Frame of square `index` (1 through 4).
    pub fn new(index: usize, p: &IrisParams) -> SquareFrame {
        assert!((1..=4).contains(&index), "square index must be 1..=4");
        SquareFrame {
            index,
            hx: 1.0 - 0.5 * p.a(),
            hy: 1.0 + 0.5 * p.a(),
        }
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn center(&self) -> (f64, f64) {
        match self.index {
            1 => (-self.hx, -self.hy),
            2 => (-self.hy, self.hx),
            3 => (self.hx, self.hy),
            4 => (self.hy, -self.hx),
            _ => unreachable!(),
        }
    }

    pub fn to_local(&self, x: f64, y: f64) -> (f64, f64) {
        match self.index {
            1 => (x + self.hx, y + self.hy),
            2 => (self.hx - y, x + self.hy),
            3 => (self.hx - x, self.hy - y),
            4 => (y + self.hx, self.hy - x),
            _ => unreachable!(),
        }
    }

    pub fn to_global(&self, s: f64, u: f64) -> (f64, f64) {
        match self.index {
            1 => (s - self.hx, u - self.hy),
            2 => (u - self.hy, self.hx - s),
            3 => (self.hx - s, self.hy - u),
            4 => (self.hy - u, s - self.hx),
            _ => unreachable!(),
        }
    }

    /// Global components of a local direction vector `(ds, du)`.
    pub fn direction_to_global(&self, ds: f64, du: f64) -> (f64, f64) {
        match self.index {
            1 => (ds, du),
            2 => (du, -ds),
            3 => (-ds, -du),
            4 => (-du, ds),
            _ => unreachable!(),
        }
    }

    pub fn contains_local(s: f64, u: f64) -> bool {
        (-1.0..=1.0).contains(&s) && (-1.0..=1.0).contains(&u)
    }
}

pub fn frames(p: &IrisParams) -> [SquareFrame; 4] {
    [
        SquareFrame::new(1, p),
        SquareFrame::new(2, p),
        SquareFrame::new(3, p),
        SquareFrame::new(4, p),
    ]
}

/// Quarter-turn clockwise about the origin, the symmetry that maps square k
/// onto square k+1.
pub fn rotate_quarter(x: f64, y: f64) -> (f64, f64) {
    (y, -x)
}

/// Which square owns a global point, with its local coordinates there.
///
/// A point on a shared edge belongs to the square it is entering: among the
/// squares containing the point, one not sitting on its own exit edge wins.
/// Returns `None` for points outside all four squares (the absorbing small
/// squares and everything beyond).
pub fn locate(x: f64, y: f64, p: &IrisParams) -> Option<(usize, (f64, f64))> {
    let mut on_exit_edge: Option<(usize, (f64, f64))> = None;
    for frame in frames(p) {
        let (s, u) = frame.to_local(x, y);
        if SquareFrame::contains_local(s, u) {
            if u == 1.0 {
                if on_exit_edge.is_none() {
                    on_exit_edge = Some((frame.index(), (s, u)));
                }
            } else {
                return Some((frame.index(), (s, u)));
            }
        }
    }
    on_exit_edge
}

/// Even-odd containment test for a closed polygon.
pub fn point_in_polygon(x: f64, y: f64, poly: &[(f64, f64)]) -> bool {
    let n = poly.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (xi, yi) = poly[i];
        let (xj, yj) = poly[j];
        if (yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi {
            inside = !inside;
        }
        j = i;
    }
    inside
}
