use std::fmt;

use serde::Serialize;

use super::Site;

/// An element of the direction set `D`: `e_i`, `e_i + e_j` or `e_i - e_j`
/// (with `i < j`, 0-based axes).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Direction {
    Axis { dim: usize, axis: usize },
    Sum { dim: usize, i: usize, j: usize },
    Diff { dim: usize, i: usize, j: usize },
}

impl Direction {
    pub fn axis(dim: usize, axis: usize) -> Self {
        assert!(axis < dim, "axis {axis} out of range for dimension {dim}");
        Direction::Axis { dim, axis }
    }

    /// The `d^2` directions: the axes first, then `e_i + e_j`, `e_i - e_j`
    /// for each `i < j` in lexicographic order.
    pub fn all(dim: usize) -> Vec<Direction> {
        let mut out: Vec<Direction> = (0..dim).map(|axis| Direction::Axis { dim, axis }).collect();
        for i in 0..dim {
            for j in i + 1..dim {
                out.push(Direction::Sum { dim, i, j });
                out.push(Direction::Diff { dim, i, j });
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        match *self {
            Direction::Axis { dim, .. } | Direction::Sum { dim, .. } | Direction::Diff { dim, .. } => dim,
        }
    }

    pub fn is_axis(&self) -> bool {
        matches!(self, Direction::Axis { .. })
    }

    pub fn vector(&self) -> Vec<i32> {
        let mut v = vec![0; self.dim()];
        match *self {
            Direction::Axis { axis, .. } => v[axis] = 1,
            Direction::Sum { i, j, .. } => {
                v[i] = 1;
                v[j] = 1;
            }
            Direction::Diff { i, j, .. } => {
                v[i] = 1;
                v[j] = -1;
            }
        }
        v
    }

    fn dot(&self, p: &Site) -> i64 {
        let c = p.coords();
        match *self {
            Direction::Axis { axis, .. } => c[axis] as i64,
            Direction::Sum { i, j, .. } => c[i] as i64 + c[j] as i64,
            Direction::Diff { i, j, .. } => c[i] as i64 - c[j] as i64,
        }
    }

    /// Unique `(q, t)` with `p = q + t e` and `q` in the base slab: `<q, e> = 0`
    /// for an axis, `<q, e> ∈ {0, 1}` for a diagonal.
    pub fn decompose(&self, p: &Site) -> (Site, i32) {
        let s = self.dot(p);
        let t = if self.is_axis() { s } else { s.div_euclid(2) } as i32;
        (p.add_scaled(&self.vector(), -t), t)
    }

    pub fn compose(&self, q: &Site, t: i32) -> Site {
        q.add_scaled(&self.vector(), t)
    }
}

impl fmt::Debug for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Direction::Axis { axis, .. } => write!(f, "e{}", axis + 1),
            Direction::Sum { i, j, .. } => write!(f, "e{}+e{}", i + 1, j + 1),
            Direction::Diff { i, j, .. } => write!(f, "e{}-e{}", i + 1, j + 1),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn direction_count() {
        for d in 1..5 {
            assert_eq!(Direction::all(d).len(), d * d);
        }
    }

    #[test]
    fn decompose_examples() {
        let (q, t) = Direction::axis(2, 0).decompose(&Site::new(&[3, 5]));
        assert_eq!((q, t), (Site::new(&[0, 5]), 3));
        let diff = Direction::Diff { dim: 2, i: 0, j: 1 };
        let (q, t) = diff.decompose(&Site::new(&[2, -1]));
        assert_eq!((q, t), (Site::new(&[1, 0]), 1));
    }

    proptest! {
        #[test]
        fn decompose_round_trip(c in prop::collection::vec(-1000i32..1000, 1..4)) {
            let p = Site::new(&c);
            for e in Direction::all(c.len()) {
                let (q, t) = e.decompose(&p);
                prop_assert_eq!(e.compose(&q, t), p.clone());
                let s = e.dot(&q);
                if e.is_axis() {
                    prop_assert_eq!(s, 0);
                } else {
                    prop_assert!(s == 0 || s == 1);
                }
            }
        }
    }
}
