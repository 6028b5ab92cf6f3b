//! Redelmeier enumeration of connected configurations (fixed lattice animals).

use super::{Config, Site};
use crate::error::{Error, Result};

/// Largest supported `N` per dimension; the counts grow roughly like `4^N`
/// in `d = 2` and `8^N` in `d = 3`.
fn size_limit(d: usize) -> Option<usize> {
    match d {
        1 => Some(64),
        2 => Some(12),
        3 => Some(7),
        _ => None,
    }
}

/// Every connected configuration of `n` sites in `Z^d` exactly once up to
/// translation, each translated so its bounding-box minimum is the origin.
pub fn enumerate_connected(n: usize, d: usize) -> Result<ConnectedConfigs> {
    match size_limit(d) {
        Some(limit) if n >= 1 && n <= limit => Ok(ConnectedConfigs::new(n, d)),
        _ if d == 0 => Err(Error::ZeroDimension),
        _ => Err(Error::BudgetExceeded { n, d }),
    }
}

struct Frame {
    untried: Vec<usize>,
    marked: Vec<usize>,
}

/// Single-consumer iterator returned by [`enumerate_connected`].
///
/// Cells live in a `(2n+1)^d` box centered at the origin. A cell may join only
/// if it follows the origin lexicographically, so each animal is generated
/// once, rooted at its lexicographically smallest cell.
pub struct ConnectedConfigs {
    n: usize,
    d: usize,
    width: usize,
    coords: Vec<Vec<i32>>,
    allowed: Vec<bool>,
    seen: Vec<bool>,
    stack: Vec<Frame>,
    current: Vec<usize>,
}

impl ConnectedConfigs {
    fn new(n: usize, d: usize) -> Self {
        let width = 2 * n + 1;
        let cells = width.pow(d as u32);
        let coords: Vec<Vec<i32>> = (0..cells)
            .map(|mut idx| {
                (0..d)
                    .map(|_| {
                        let c = (idx % width) as i32 - n as i32;
                        idx /= width;
                        c
                    })
                    .collect()
            })
            .collect();
        let allowed = coords
            .iter()
            .map(|c| match c.iter().find(|&&x| x != 0) {
                Some(&x) => x > 0,
                None => true,
            })
            .collect();
        let origin = (0..d).map(|k| n * width.pow(k as u32)).sum::<usize>();
        let mut seen = vec![false; cells];
        seen[origin] = true;
        ConnectedConfigs {
            n,
            d,
            width,
            coords,
            allowed,
            seen,
            stack: vec![Frame {
                untried: vec![origin],
                marked: vec![origin],
            }],
            current: Vec::with_capacity(n),
        }
    }

    fn emit(&self) -> Config {
        let sites = self.current.iter().map(|&c| Site::new(&self.coords[c])).collect();
        Config::new(sites).expect("distinct cells").canonical()
    }
}

impl Iterator for ConnectedConfigs {
    type Item = Config;

    fn next(&mut self) -> Option<Config> {
        loop {
            let level = self.stack.len().checked_sub(1)?;
            if self.current.len() > level {
                self.current.pop();
            }
            let Some(cell) = self.stack[level].untried.pop() else {
                let frame = self.stack.pop().expect("nonempty");
                for c in frame.marked {
                    self.seen[c] = false;
                }
                continue;
            };
            self.current.push(cell);
            if self.current.len() == self.n {
                return Some(self.emit());
            }
            let mut fresh = Vec::new();
            let mut stride = 1;
            for _ in 0..self.d {
                // the box is wide enough that neighbors of reachable cells stay inside
                for nb in [cell - stride, cell + stride] {
                    if self.allowed[nb] && !self.seen[nb] {
                        self.seen[nb] = true;
                        fresh.push(nb);
                    }
                }
                stride *= self.width;
            }
            let mut untried = self.stack[level].untried.clone();
            untried.extend_from_slice(&fresh);
            self.stack.push(Frame {
                untried,
                marked: fresh,
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::is_connected;
    use std::collections::{HashSet, VecDeque};

    // Independent oracle: grow all animals of size k+1 from those of size k
    // and dedup canonical forms.
    fn grow_count(n: usize, d: usize) -> Vec<usize> {
        let mut level: HashSet<Vec<Vec<i32>>> = HashSet::new();
        level.insert(vec![vec![0; d]]);
        let mut counts = vec![1];
        for _ in 1..n {
            let mut next = HashSet::new();
            for animal in &level {
                let set: HashSet<&Vec<i32>> = animal.iter().collect();
                let mut frontier = VecDeque::new();
                for c in animal {
                    for k in 0..d {
                        for delta in [-1, 1] {
                            let mut nb = c.clone();
                            nb[k] += delta;
                            if !set.contains(&nb) {
                                frontier.push_back(nb);
                            }
                        }
                    }
                }
                for nb in frontier {
                    let mut a = animal.clone();
                    a.push(nb);
                    let cfg = Config::from_coords(a).unwrap().canonical();
                    next.insert(cfg.to_coords());
                }
            }
            counts.push(next.len());
            level = next;
        }
        counts
    }

    #[test]
    fn fixed_polyomino_counts() {
        let expected = [1, 2, 6, 19, 63, 216, 760, 2725];
        for (i, &e) in expected.iter().enumerate() {
            assert_eq!(enumerate_connected(i + 1, 2).unwrap().count(), e, "N = {}", i + 1);
        }
    }

    #[test]
    fn fixed_polycube_counts() {
        let expected = [1, 3, 15, 86, 534, 3481];
        for (i, &e) in expected.iter().enumerate() {
            assert_eq!(enumerate_connected(i + 1, 3).unwrap().count(), e, "N = {}", i + 1);
        }
    }

    #[test]
    fn agrees_with_growth_oracle() {
        assert_eq!(
            (1..=6).map(|n| enumerate_connected(n, 2).unwrap().count()).collect::<Vec<_>>(),
            grow_count(6, 2)
        );
        assert_eq!(
            (1..=4).map(|n| enumerate_connected(n, 3).unwrap().count()).collect::<Vec<_>>(),
            grow_count(4, 3)
        );
    }

    #[test]
    fn outputs_are_distinct_connected_canonical() {
        let all: Vec<Config> = enumerate_connected(6, 2).unwrap().collect();
        let distinct: HashSet<Vec<Vec<i32>>> = all.iter().map(Config::to_coords).collect();
        assert_eq!(distinct.len(), all.len());
        for x in &all {
            assert_eq!(x.len(), 6);
            assert!(is_connected(x));
            assert_eq!(x.bounding_box().0, vec![0, 0]);
        }
    }

    #[test]
    fn one_dimensional_is_a_single_interval() {
        let all: Vec<Config> = enumerate_connected(5, 1).unwrap().collect();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].to_coords(), (0..5).map(|i| vec![i]).collect::<Vec<_>>());
    }

    #[test]
    fn budget_guard() {
        assert!(matches!(enumerate_connected(13, 2), Err(Error::BudgetExceeded { .. })));
        assert!(matches!(enumerate_connected(8, 3), Err(Error::BudgetExceeded { .. })));
        assert!(matches!(enumerate_connected(2, 4), Err(Error::BudgetExceeded { .. })));
        assert!(matches!(enumerate_connected(0, 2), Err(Error::BudgetExceeded { .. })));
    }
}
