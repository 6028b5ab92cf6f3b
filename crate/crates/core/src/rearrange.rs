//! Discrete symmetric decreasing rearrangements.
//!
//! On a line, the values `a_1 >= a_2 >= ...` of `u` are placed at
//! `0, 1, -1, 2, -2, ...`. In `Z^d` the rearrangement in direction `e` acts on
//! every lattice line `{q + t e}` separately, and the full rearrangement cycles
//! through the direction set until a whole cycle leaves the function fixed.
//!
//! For a diagonal `e`, neighboring lines alternate between the two slabs
//! `<q, e> = 0` and `<q, e> = 1`, and a site at `t` on an odd line touches
//! `t` and `t + 1` on the even lines next to it. Odd lines are therefore
//! filled in the mirrored order `0, -1, 1, -2, ...`; with the same order on
//! both slabs the 2x2 square is not a fixpoint and its eigenvalue goes up.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::function::LatticeFunction;
use crate::lattice::{Config, Direction, Site};

/// Maximum number of full direction cycles in [`rearrange_full`].
pub const CYCLE_CAP: usize = 10_000;

/// Position of the `k`-th largest value (0-based): `0, 1, -1, 2, -2, ...`,
/// or `0, -1, 1, -2, 2, ...` when `mirrored`.
fn slot(k: usize, mirrored: bool) -> i32 {
    let t = if k % 2 == 1 {
        k.div_ceil(2) as i32
    } else {
        -((k / 2) as i32)
    };
    if mirrored {
        -t
    } else {
        t
    }
}

/// Rearranges `(t, value)` pairs given in increasing `t`. Ties keep their
/// original order.
fn arrange_line(line: &mut [(i32, f64)], mirrored: bool) {
    line.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    for (k, entry) in line.iter_mut().enumerate() {
        entry.0 = slot(k, mirrored);
    }
}

/// Lines in the odd slab of a diagonal direction.
fn is_odd_line(e: &Direction, q: &Site) -> bool {
    !e.is_axis() && q.coords().iter().zip(e.vector()).map(|(a, b)| a * b).sum::<i32>() == 1
}

/// Symmetric decreasing rearrangement of a finitely supported `u: Z -> [0, inf)`.
pub fn rearrange_1d(u: &BTreeMap<i32, f64>) -> Result<BTreeMap<i32, f64>> {
    if let Some((&t, &v)) = u.iter().find(|(_, v)| **v < 0.0 || v.is_nan()) {
        return Err(Error::NegativeValue { site: vec![t], value: v });
    }
    let mut line: Vec<(i32, f64)> = u.iter().filter(|(_, v)| **v != 0.0).map(|(t, v)| (*t, *v)).collect();
    arrange_line(&mut line, false);
    Ok(line.into_iter().collect())
}

/// `(q, t)` with `i = q + t e` and `q` in the base slab of `e`.
pub fn line_decompose(e: &Direction, i: &Site) -> (Site, i32) {
    e.decompose(i)
}

/// Rearrangement of `u` in direction `e`, line by line.
pub fn rearrange_direction(u: &LatticeFunction, e: &Direction) -> Result<LatticeFunction> {
    u.check_nonnegative()?;
    Ok(rearrange_direction_unchecked(u, e))
}

fn rearrange_direction_unchecked(u: &LatticeFunction, e: &Direction) -> LatticeFunction {
    let mut lines: BTreeMap<Site, Vec<(i32, f64)>> = BTreeMap::new();
    for (p, v) in u.iter().filter(|(_, v)| *v != 0.0) {
        let (q, t) = e.decompose(p);
        lines.entry(q).or_default().push((t, v));
    }
    let mut out = Vec::with_capacity(u.len());
    for (q, mut line) in lines {
        // entries arrive in site order, which is not t order for every direction
        line.sort_by_key(|entry| entry.0);
        arrange_line(&mut line, is_odd_line(e, &q));
        out.extend(line.into_iter().map(|(t, v)| (e.compose(&q, t), v)));
    }
    LatticeFunction::from_pairs(u.dim(), out).expect("rearrangement is injective on each line")
}

/// One pass through the direction set, optionally recording supports.
fn cycle(u: &LatticeFunction, trace: Option<&mut Vec<Vec<Vec<i32>>>>) -> LatticeFunction {
    let mut cur = u.clone();
    let mut trace = trace;
    for e in Direction::all(u.dim()) {
        cur = rearrange_direction_unchecked(&cur, &e);
        if let Some(t) = trace.as_deref_mut() {
            t.push(cur.iter().map(|(s, _)| s.to_vec()).collect());
        }
    }
    cur
}

/// Outcome of a full rearrangement.
#[derive(Clone, Debug)]
pub struct FullRearrangement {
    pub function: LatticeFunction,
    /// Full cycles performed, including the final verification cycle.
    pub cycles: usize,
}

/// Support snapshots after each directional pass.
#[derive(Clone, Debug, Default, Serialize)]
pub struct RearrangeTrace {
    pub passes: Vec<Vec<Vec<i32>>>,
}

/// Full symmetric decreasing rearrangement `u*`.
pub fn rearrange_full(u: &LatticeFunction) -> Result<LatticeFunction> {
    rearrange_full_traced(u, None).map(|r| r.function)
}

pub fn rearrange_full_traced(u: &LatticeFunction, mut trace: Option<&mut RearrangeTrace>) -> Result<FullRearrangement> {
    u.check_nonnegative()?;
    let mut cur = u.pruned();
    for cycles in 1..=CYCLE_CAP {
        let next = cycle(&cur, trace.as_deref_mut().map(|t| &mut t.passes));
        if next == cur {
            return Ok(FullRearrangement { function: next, cycles });
        }
        cur = next;
    }
    Err(Error::RearrangementCap { cycles: CYCLE_CAP })
}

/// `R_e(X)`, computed by counting: each line of `X` in direction `e` becomes
/// the centered interval of the same length.
pub fn set_rearrange_direction(x: &Config, e: &Direction) -> Config {
    let mut counts: HashMap<Site, usize> = HashMap::new();
    for p in x.iter() {
        *counts.entry(e.decompose(p).0).or_default() += 1;
    }
    let mut sites = Vec::with_capacity(x.len());
    for (q, c) in counts {
        let mirrored = is_odd_line(e, &q);
        sites.extend((0..c).map(|k| e.compose(&q, slot(k, mirrored))));
    }
    Config::new(sites).expect("distinct lines give distinct sites")
}

/// `R(X)`: iterate the directional set rearrangements to a fixpoint.
pub fn set_rearrange(x: &Config) -> Result<Config> {
    let dirs = Direction::all(x.dim());
    let mut cur = x.clone();
    for _ in 0..CYCLE_CAP {
        let next = dirs.iter().fold(cur.clone(), |acc, e| set_rearrange_direction(&acc, e));
        if next == cur {
            return Ok(next);
        }
        cur = next;
    }
    Err(Error::RearrangementCap { cycles: CYCLE_CAP })
}

/// `R_e(X) = X` for every direction.
pub fn is_symmetric(x: &Config) -> bool {
    Direction::all(x.dim()).iter().all(|e| set_rearrange_direction(x, e) == *x)
}

/// Weight pair for Riesz sums: `G` and an `H` with finite support
/// `{0, ..., cutoff}`.
pub struct SupermodularTestFn {
    g: Box<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    h: Vec<f64>,
}

impl SupermodularTestFn {
    /// `h[r]` is `H(r)`; `H` vanishes beyond `h.len() - 1`. Requires `H`
    /// nonnegative and non-increasing, and `G(0, 0) = 0`.
    pub fn new<G>(g: G, h: Vec<f64>) -> Result<Self>
    where
        G: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        if h.is_empty() || h.iter().any(|v| v.is_nan() || *v < 0.0) || h.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidArgument("H must be nonnegative and non-increasing".into()));
        }
        if g(0.0, 0.0) != 0.0 {
            return Err(Error::InvalidArgument("G(0, 0) must vanish".into()));
        }
        Ok(SupermodularTestFn { g: Box::new(g), h })
    }

    /// `G(x, y) = xy`, `H = indicator of {0, ..., cutoff}`.
    pub fn product(cutoff: usize) -> Self {
        SupermodularTestFn::new(|x, y| x * y, vec![1.0; cutoff + 1]).expect("valid weights")
    }

    pub fn cutoff(&self) -> usize {
        self.h.len() - 1
    }

    pub fn g(&self, x: f64, y: f64) -> f64 {
        (self.g)(x, y)
    }

    pub fn h(&self, r: usize) -> f64 {
        self.h.get(r).copied().unwrap_or(0.0)
    }

    /// Checks `G(x, y+t) + G(x+s, y) <= G(x+s, y+t) + G(x, y)` on the given
    /// samples `(x, y, s, t)` with `s, t > 0`, with absolute slack `eps`.
    pub fn is_supermodular_on(&self, samples: &[(f64, f64, f64, f64)], eps: f64) -> bool {
        samples.iter().all(|&(x, y, s, t)| {
            self.g(x, y + t) + self.g(x + s, y) <= self.g(x + s, y + t) + self.g(x, y) + eps
        })
    }
}

/// `sum_{i, j} G(u(i), v(j)) H(|i - j|_1)`, exact: every pair with a nonzero
/// term lies within the cutoff of the joint support.
pub fn riesz_sum(u: &LatticeFunction, v: &LatticeFunction, w: &SupermodularTestFn) -> Result<f64> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            found: v.dim(),
        });
    }
    let d = u.dim();
    let r = w.cutoff() as i32;
    let ball = l1_ball(d, r);
    let mut region: Vec<Site> = Vec::new();
    {
        let mut seen = std::collections::HashSet::new();
        for (p, _) in u.iter().chain(v.iter()).filter(|(_, x)| *x != 0.0) {
            for off in &ball {
                let q = p.add(off);
                if seen.insert(q.clone()) {
                    region.push(q);
                }
            }
        }
        region.sort_unstable();
    }
    let mut total = 0.0;
    for i in &region {
        let ui = u.get(i);
        for off in &ball {
            let j = i.add(off);
            let hij = w.h(off.iter().map(|c| c.unsigned_abs() as usize).sum());
            if hij != 0.0 {
                total += w.g(ui, v.get(&j)) * hij;
            }
        }
    }
    Ok(total)
}

/// Offsets with `|x|_1 <= r`.
fn l1_ball(d: usize, r: i32) -> Vec<Vec<i32>> {
    let mut out = vec![vec![]];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<i32>| {
                let used: i32 = prefix.iter().map(|c| c.abs()).sum();
                (-(r - used)..=(r - used)).map(move |c| {
                    let mut p = prefix.clone();
                    p.push(c);
                    p
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn line(pairs: &[(i32, f64)]) -> BTreeMap<i32, f64> {
        pairs.iter().copied().collect()
    }

    fn random_function(rng: &mut ChaCha8Rng, d: usize, max: usize, span: i32, integer: bool) -> LatticeFunction {
        let room = (2 * span as usize + 1).pow(d as u32);
        let n = rng.random_range(1..=max.min(room));
        let mut pairs = BTreeMap::new();
        while pairs.len() < n {
            let c: Vec<i32> = (0..d).map(|_| rng.random_range(-span..=span)).collect();
            let v = if integer {
                rng.random_range(1..4) as f64
            } else {
                rng.random_range(0.01..1.0)
            };
            pairs.insert(Site::from(c), v);
        }
        LatticeFunction::from_pairs(d, pairs).unwrap()
    }

    #[test]
    fn one_dimensional_examples() {
        let r = rearrange_1d(&line(&[(5, 4.0), (7, 3.0), (10, 1.0)])).unwrap();
        assert_eq!(r, line(&[(0, 4.0), (1, 3.0), (-1, 1.0)]));
        assert_eq!(rearrange_1d(&line(&[(-17, 2.5)])).unwrap(), line(&[(0, 2.5)]));
        let c = rearrange_1d(&line(&[(0, 1.5), (1, 1.5), (2, 1.5), (3, 1.5)])).unwrap();
        assert_eq!(c.keys().copied().collect::<Vec<_>>(), vec![-1, 0, 1, 2]);
        assert!(matches!(rearrange_1d(&line(&[(0, -1.0)])), Err(Error::NegativeValue { .. })));
    }

    #[test]
    fn square_is_fixed_and_dominoes_settle() {
        let sq = Config::from_coords([[0, 0], [1, 0], [0, 1], [1, 1]]).unwrap();
        for e in Direction::all(2) {
            let r = rearrange_direction(&LatticeFunction::indicator(&sq), &e).unwrap();
            assert_eq!(r.support().unwrap().len(), 4);
        }
        assert!(is_symmetric(&sq));
        let domino = Config::from_coords([[0, 0], [1, 0]]).unwrap();
        assert_eq!(set_rearrange_direction(&domino, &Direction::axis(2, 0)), domino);
        assert_eq!(set_rearrange(&Config::from_coords([[7, 3]]).unwrap()).unwrap(), Config::from_coords([[0, 0]]).unwrap());
    }

    #[test]
    fn single_line_reduces_to_one_dimension() {
        let u = LatticeFunction::from_pairs(
            2,
            [(Site::new(&[3, 4]), 0.5), (Site::new(&[5, 4]), 2.0), (Site::new(&[9, 4]), 1.0)],
        )
        .unwrap();
        let r = rearrange_direction(&u, &Direction::axis(2, 0)).unwrap();
        let one = rearrange_1d(&line(&[(3, 0.5), (5, 2.0), (9, 1.0)])).unwrap();
        for (t, v) in one {
            assert_eq!(r.get(&Site::new(&[t, 4])), v);
        }
    }

    #[test]
    fn l_tromino() {
        let l = Config::from_coords([[0, 0], [1, 0], [0, 1]]).unwrap();
        let u = LatticeFunction::indicator(&l);
        let s = rearrange_full(&u).unwrap();
        assert_eq!(s.support().unwrap().len(), 3);
        assert!(s.dirichlet_energy() <= u.dirichlet_energy());
        assert!(is_symmetric(&s.support().unwrap()));
    }

    #[test]
    fn set_route_matches_function_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in 1..=3 {
            for _ in 0..100 {
                let u = random_function(&mut rng, d, 25, 4, true);
                let x = u.support().unwrap();
                let chi = LatticeFunction::indicator(&x);
                for e in Direction::all(d) {
                    let via_fn = rearrange_direction(&chi, &e).unwrap().support().unwrap();
                    assert_eq!(set_rearrange_direction(&x, &e), via_fn);
                }
                let full = rearrange_full(&chi).unwrap().support().unwrap();
                assert_eq!(set_rearrange(&x).unwrap(), full);
                assert_eq!(full.len(), x.len());
            }
        }
    }

    #[test]
    fn trace_records_every_pass() {
        let u = LatticeFunction::indicator(&Config::from_coords([[0, 0], [3, 1]]).unwrap());
        let mut trace = RearrangeTrace::default();
        let r = rearrange_full_traced(&u, Some(&mut trace)).unwrap();
        assert_eq!(trace.passes.len(), 4 * r.cycles);
    }

    #[test]
    fn riesz_examples() {
        let u = LatticeFunction::from_pairs(1, [(Site::new(&[0]), 1.0)]).unwrap();
        assert_eq!(riesz_sum(&u, &u, &SupermodularTestFn::product(1)).unwrap(), 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random_function(&mut rng, 2, 20, 3, false);
        let b = random_function(&mut rng, 2, 20, 3, false);
        let diag: f64 = a.iter().map(|(p, x)| x * b.get(p)).sum();
        assert!((riesz_sum(&a, &b, &SupermodularTestFn::product(0)).unwrap() - diag).abs() < 1e-14);
    }

    #[test]
    fn riesz_sum_with_nonzero_boundary_terms() {
        // G(x, y) = -(x - y)^2 picks up pairs where only one side is nonzero
        let w = SupermodularTestFn::new(|x, y| -(x - y) * (x - y), vec![1.0, 1.0]).unwrap();
        let u = LatticeFunction::from_pairs(1, [(Site::new(&[0]), 1.0)]).unwrap();
        // pairs (i, j) with |i-j| <= 1 touching site 0: (0,0) gives 0, (0,+-1) and (+-1,0) give -1
        assert_eq!(riesz_sum(&u, &u, &w).unwrap(), -4.0);
        assert!(w.is_supermodular_on(&[(0.1, 0.2, 0.3, 0.4), (1.0, -2.0, 5.0, 0.5)], 1e-12));
        let bad = SupermodularTestFn::new(|x, y| -x * y, vec![1.0]).unwrap();
        assert!(!bad.is_supermodular_on(&[(0.0, 0.0, 1.0, 1.0)], 0.0));
        assert!(SupermodularTestFn::new(|x, y| x * y, vec![0.5, 1.0]).is_err());
        assert!(SupermodularTestFn::new(|x, y| x * y + 1.0, vec![1.0]).is_err());
    }

    #[test]
    fn l1_ball_sizes() {
        assert_eq!(l1_ball(1, 1).len(), 3);
        assert_eq!(l1_ball(2, 1).len(), 5);
        assert_eq!(l1_ball(2, 2).len(), 13);
        assert_eq!(l1_ball(3, 1).len(), 7);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn directional_pass_preserves_mass_and_lowers_energy(seed in any::<u64>(), d in 1usize..=3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let integer = rng.random_bool(0.3);
            let u = random_function(&mut rng, d, 30, 4, integer);
            for e in Direction::all(d) {
                let r = rearrange_direction(&u, &e).unwrap();
                prop_assert_eq!(r.sorted_values(), u.sorted_values());
                prop_assert!(r.dirichlet_energy() <= u.dirichlet_energy() + 1e-12);
            }
        }

        #[test]
        fn full_rearrangement_is_idempotent_fixpoint(seed in any::<u64>(), d in 1usize..=3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let integer = rng.random_bool(0.5);
            let u = random_function(&mut rng, d, 30, 4, integer);
            let s = rearrange_full(&u).unwrap();
            prop_assert_eq!(s.sorted_values(), u.sorted_values());
            prop_assert!(s.dirichlet_energy() <= u.dirichlet_energy() + 1e-12);
            prop_assert_eq!(rearrange_full(&s).unwrap(), s.clone());
            for e in Direction::all(d) {
                prop_assert_eq!(rearrange_direction(&s, &e).unwrap(), s.clone());
            }
        }

        #[test]
        fn line_decompose_round_trip(c in prop::collection::vec(-500i32..500, 1..4)) {
            let p = Site::new(&c);
            for e in Direction::all(c.len()) {
                let (q, t) = line_decompose(&e, &p);
                prop_assert_eq!(e.compose(&q, t), p.clone());
            }
        }
    }
}
